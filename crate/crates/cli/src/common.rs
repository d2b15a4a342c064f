//! Shared CLI plumbing: config resolution, SNR grids, output sinks, errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use risask_core::config::{load_config, ExperimentSettings};
use risask_core::SystemParams64;

/// Exit codes: 2 validation failure, 3 optimizer non-convergence,
/// 4 config error, 1 everything else.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Optimizer(String),
    Validation(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Optimizer(m) | CliError::Validation(m)
            | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Optimizer(_) => 3,
            CliError::Config(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file with the physical-layer parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// RIS element count used when no config file is given (default 64).
    #[arg(long = "L", value_name = "N")]
    pub l: Option<u32>,

    /// Base seed for all random streams.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    /// Resolves the physical parameters: config file if given, otherwise
    /// defaults (unit variances, K1 = K2 = 2) with `--L` elements.
    pub fn resolve_params(&self) -> Result<(SystemParams64, ExperimentSettings), CliError> {
        match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                load_config::<f64>(&text).map_err(|e| CliError::Config(e.to_string()))
            }
            None => {
                let params = SystemParams64 {
                    l: self.l.unwrap_or(64),
                    sigma_h_sq: 1.0,
                    sigma_hd_sq: 1.0,
                    sigma_n_sq: 1.0,
                    k1: 2.0,
                    k2: 2.0,
                };
                params
                    .validate()
                    .map_err(|v| CliError::Config(format!("invalid --L: {}", v[0])))?;
                Ok((params, ExperimentSettings::default()))
            }
        }
    }

    /// Opens the output sink (file or stdout).
    pub fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        sink_at(self.out.as_deref())
    }
}

pub fn sink_at(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

/// Parses an SNR grid: a single value, a comma list, or `start:stop:step`
/// (inclusive, step > 0), all in dB.
pub fn parse_snr_grid(grid: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Config(m);
    if grid.contains(':') {
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("--snr-db range must be start:stop:step, got `{grid}`")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("--snr-db: {e}")))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 {
            return Err(bad("--snr-db: step must be > 0".into()));
        }
        if start > stop {
            return Err(bad("--snr-db: start must not exceed stop".into()));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    } else {
        grid.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| bad(format!("--snr-db: {e}"))))
            .collect()
    }
}

/// dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_grid_forms() {
        assert_eq!(parse_snr_grid("10").unwrap(), vec![10.0]);
        assert_eq!(parse_snr_grid("5,7.5,20").unwrap(), vec![5.0, 7.5, 20.0]);
        assert_eq!(
            parse_snr_grid("0:30:5").unwrap(),
            vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
        );
        assert!(parse_snr_grid("5:0:5").is_err());
        assert!(parse_snr_grid("0:10:0").is_err());
        assert!(parse_snr_grid("a:b:c").is_err());
    }
}
