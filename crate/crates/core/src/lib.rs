//! Link-level analysis of a RIS-assisted noncoherent one-sided ASK system.
//!
//! The transmitter sends amplitude levels `s_m = sqrt(E_m)` through a cascaded
//! Tx -> RIS -> Rx channel (plus a direct path); the receiver decides symbols
//! noncoherently from the channel *statistics* alone. This crate provides the
//! full chain:
//!
//! - [`channel`]: Gaussian (CLT) statistics of the cascaded channel and exact
//!   per-element sampling of the physical model,
//! - [`detector`]: the optimal noncoherent ML decision metric,
//! - [`analysis`]: closed-form pairwise error probabilities via Gamma moment
//!   matching and the SEP union bound,
//! - [`optimizer`]: energy-constrained optimal ASK constellation design,
//! - [`montecarlo`]: seeded, reproducible Monte Carlo SEP estimation used as
//!   the ground-truth oracle for every closed form,
//! - [`specfun`]: the self-contained special-function kernel backing the
//!   closed forms,
//! - [`config`]: parameter records, validation, and JSON (de)serialization.
//!
//! All analytical modules are generic over the floating-point scalar through
//! [`Real`]; sampling and Monte Carlo operate in `f64`, which is also the
//! default type parameter everywhere. Concrete aliases for both precisions
//! live at the crate root.

pub mod analysis;
pub mod channel;
pub mod config;
pub mod detector;
pub mod montecarlo;
pub mod optimizer;
pub mod rng;
pub mod scalar;
pub mod specfun;

pub use analysis::{GammaParams, PairGeometry, ThresholdConvention};
pub use channel::{ChannelSample, ChannelStats};
pub use config::{Constellation, ExperimentSettings, SystemParams};
pub use detector::ReceivedSample;
pub use montecarlo::{ChannelMode, McConfig, SepEstimate};
pub use optimizer::{EnergyBudget, OptimizerResult};
pub use rng::RandomStream;
pub use scalar::Real;

/// `f64` aliases (the default precision).
pub type SystemParams64 = config::SystemParams<f64>;
pub type Constellation64 = config::Constellation<f64>;
pub type ChannelStats64 = channel::ChannelStats<f64>;
pub type GammaParams64 = analysis::GammaParams<f64>;
pub type EnergyBudget64 = optimizer::EnergyBudget<f64>;

/// `f32` aliases for the analytical kernel.
pub type SystemParams32 = config::SystemParams<f32>;
pub type Constellation32 = config::Constellation<f32>;
pub type ChannelStats32 = channel::ChannelStats<f32>;
pub type GammaParams32 = analysis::GammaParams<f32>;
pub type EnergyBudget32 = optimizer::EnergyBudget<f32>;
