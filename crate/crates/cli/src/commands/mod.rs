pub mod compare;
pub mod optimize;
pub mod sweep;
pub mod validate;
