//! User-facing parameter records, their validation, and serialization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Physical-layer constants of the link.
///
/// Rician line-of-sight strength is carried through the K-factors
/// `K_i = |mu_i|^2 / sigma_h^2`; the complex channel means are reconstructed
/// as `|mu_i| = sqrt(K_i sigma_h^2)` when sampling. Only the magnitudes
/// matter because the RIS aligns the per-element phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams<T = f64> {
    /// Number of RIS reflecting elements.
    #[serde(rename = "L")]
    pub l: u32,
    /// Per-element fading variance of both hop channels.
    pub sigma_h_sq: T,
    /// Direct-channel variance (zero disables the direct path).
    pub sigma_hd_sq: T,
    /// Noise variance.
    pub sigma_n_sq: T,
    /// Rician factor of the Tx-RIS link.
    #[serde(rename = "K1")]
    pub k1: T,
    /// Rician factor of the RIS-Rx link.
    #[serde(rename = "K2")]
    pub k2: T,
}

/// A violated invariant, reported by field name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Outcome of [`SystemParams::validate`]: `Ok(())` or every violated invariant.
pub type ValidationResult = Result<(), Vec<Violation>>;

impl<T: Real> SystemParams<T> {
    /// Checks every invariant; total over all finite numeric inputs.
    pub fn validate(&self) -> ValidationResult {
        let mut violations = Vec::new();
        let mut check = |field: &'static str, ok: bool, message: &str| {
            if !ok {
                violations.push(Violation {
                    field,
                    message: message.to_string(),
                });
            }
        };
        check("L", self.l >= 1, "L must be >= 1");
        check(
            "sigma_h_sq",
            self.sigma_h_sq.is_finite() && self.sigma_h_sq > T::zero(),
            "sigma_h_sq must be > 0",
        );
        check(
            "sigma_hd_sq",
            self.sigma_hd_sq.is_finite() && self.sigma_hd_sq >= T::zero(),
            "sigma_hd_sq must be >= 0",
        );
        check(
            "sigma_n_sq",
            self.sigma_n_sq.is_finite() && self.sigma_n_sq > T::zero(),
            "sigma_n_sq must be > 0",
        );
        check(
            "K1",
            self.k1.is_finite() && self.k1 >= T::zero(),
            "K1 must be >= 0",
        );
        check(
            "K2",
            self.k2.is_finite() && self.k2 >= T::zero(),
            "K2 must be >= 0",
        );
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Line-of-sight mean magnitude of the Tx-RIS link, `sqrt(K1 sigma_h^2)`.
    pub fn mean_1(&self) -> T {
        (self.k1 * self.sigma_h_sq).sqrt()
    }

    /// Line-of-sight mean magnitude of the RIS-Rx link, `sqrt(K2 sigma_h^2)`.
    pub fn mean_2(&self) -> T {
        (self.k2 * self.sigma_h_sq).sqrt()
    }
}

/// Free-standing form of [`SystemParams::validate`].
pub fn validate<T: Real>(params: &SystemParams<T>) -> ValidationResult {
    params.validate()
}

/// Ordered one-sided ASK energy levels `E_1 < E_2 < ... < E_M`.
///
/// Symbol amplitudes are `s_m = sqrt(E_m)`. A single level is permitted as a
/// degenerate carrier; error-rate computations require at least two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<T>", try_from = "Vec<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Constellation<T: Real = f64> {
    energies: Vec<T>,
}

impl<T: Real> Constellation<T> {
    /// Builds a constellation, enforcing non-negative, strictly ascending,
    /// finite energies.
    pub fn new(energies: Vec<T>) -> Result<Self, ConfigError> {
        if energies.is_empty() {
            return Err(ConfigError::InvalidConstellation(
                "constellation must contain at least one energy".into(),
            ));
        }
        for (i, &e) in energies.iter().enumerate() {
            if !e.is_finite() || e < T::zero() {
                return Err(ConfigError::InvalidConstellation(format!(
                    "energy {i} must be finite and non-negative"
                )));
            }
            if i > 0 && e <= energies[i - 1] {
                return Err(ConfigError::InvalidConstellation(format!(
                    "energies must be strictly ascending (violated at index {i})"
                )));
            }
        }
        Ok(Self { energies })
    }

    /// Modulation order `M`.
    pub fn order(&self) -> usize {
        self.energies.len()
    }

    /// Energy of symbol `m` (zero-based).
    pub fn energy(&self, m: usize) -> T {
        self.energies[m]
    }

    /// Amplitude `s_m = sqrt(E_m)` of symbol `m` (zero-based).
    pub fn amplitude(&self, m: usize) -> T {
        self.energies[m].sqrt()
    }

    /// All energies in ascending order.
    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// Average energy per symbol, `(1/M) sum E_m`.
    pub fn mean_energy(&self) -> T {
        self.energies.iter().copied().sum::<T>() / T::from_usize(self.order()).unwrap()
    }
}

impl<T: Real> From<Constellation<T>> for Vec<T> {
    fn from(c: Constellation<T>) -> Self {
        c.energies
    }
}

impl<T: Real> TryFrom<Vec<T>> for Constellation<T> {
    type Error = ConfigError;

    fn try_from(energies: Vec<T>) -> Result<Self, Self::Error> {
        Self::new(energies)
    }
}

/// Experiment-level knobs that do not belong to the physical model.
///
/// The JSON config schema carries only [`SystemParams`]; these settings come
/// from CLI flags (or their defaults shown here).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    /// Base seed for every random stream.
    pub seed: u64,
    /// Monte Carlo trial count; zero disables simulation columns.
    pub trials: u64,
    /// Trials per parallel substream.
    pub chunk: u64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 0,
            chunk: 65_536,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Malformed JSON; the message carries serde's line/column diagnostics.
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    /// Parsed fine but violates model invariants.
    #[error("invalid config: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    /// Constellation-specific shape errors.
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Parses and validates the JSON config.
///
/// The schema is exactly the six [`SystemParams`] keys, all required, unknown
/// keys rejected. Experiment settings are returned at their defaults and are
/// overridden by CLI flags downstream.
pub fn load_config<T: Real + for<'de> Deserialize<'de>>(
    text: &str,
) -> Result<(SystemParams<T>, ExperimentSettings), ConfigError> {
    let params: SystemParams<T> = serde_json::from_str(text)?;
    params.validate().map_err(ConfigError::Invalid)?;
    Ok((params, ExperimentSettings::default()))
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // serialize(load_config(x)) parses back to the identical record
        #[test]
        fn config_round_trip(
            l in 1u32..100_000,
            sh in 1e-6f64..1e6,
            shd in 0.0f64..1e6,
            sn in 1e-6f64..1e6,
            k1 in 0.0f64..1e3,
            k2 in 0.0f64..1e3,
        ) {
            let params = SystemParams { l, sigma_h_sq: sh, sigma_hd_sq: shd,
                                        sigma_n_sq: sn, k1, k2 };
            let text = serde_json::to_string(&params).unwrap();
            let (back, _) = load_config::<f64>(&text).unwrap();
            prop_assert_eq!(params, back);
        }

        #[test]
        fn validate_never_panics(
            l in 0u32..10,
            sh in proptest::num::f64::ANY,
            sn in proptest::num::f64::ANY,
        ) {
            let params = SystemParams { l, sigma_h_sq: sh, sigma_hd_sq: 1.0,
                                        sigma_n_sq: sn, k1: 2.0, k2: 2.0 };
            let _ = params.validate();
        }
    }
}
