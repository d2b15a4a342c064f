//! `risask sweep`: SEP versus average SNR, one CSV row per grid point.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args as ClapArgs, ValueEnum};
use risask_core::analysis::sep_union_bound;
use risask_core::config::Constellation;
use risask_core::montecarlo::{mc_sep, ChannelMode, McConfig};
use risask_core::optimizer::{bisection_optimize, traditional_ask, EnergyBudget, DEFAULT_EPS};
use risask_core::Constellation64;

use crate::common::{db_to_linear, parse_snr_grid, CliError, CommonArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Traditional,
    Optimal,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Clt,
}

impl From<Mode> for ChannelMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => ChannelMode::Exact,
            Mode::Clt => ChannelMode::Clt,
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    #[command(flatten)]
    pub common: CommonArgs,

    /// SNR grid in dB: a value, a comma list, or start:stop:step.
    #[arg(long = "snr-db", default_value = "0:30:5")]
    pub snr_db: String,

    /// Modulation order.
    #[arg(short = 'M', long = "order", default_value_t = 4)]
    pub order: usize,

    /// Which constellation to sweep.
    #[arg(long, value_enum, default_value_t = Source::Traditional)]
    pub source: Source,

    /// Energy levels for --source file: a JSON array, or any object with an
    /// "energies" array (e.g. the output of `risask optimize`). The shape is
    /// rescaled to the energy budget at each SNR point.
    #[arg(long)]
    pub constellation: Option<PathBuf>,

    /// Monte Carlo trials per point; zero disables the simulation columns.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,

    /// Channel model for the Monte Carlo columns.
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,

    /// After each optimal-source row, emit the designed constellation as a
    /// `# constellation {json}` comment line.
    #[arg(long)]
    pub emit_constellations: bool,
}

fn load_shape(path: &PathBuf) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let array = value
        .as_array()
        .or_else(|| value.get("energies").and_then(|v| v.as_array()))
        .ok_or_else(|| {
            CliError::Config("constellation file must be a JSON array or carry an `energies` array".into())
        })?;
    array
        .iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| CliError::Config("constellation energies must be numbers".into()))
        })
        .collect()
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let (params, settings) = args.common.resolve_params()?;
    let stats = risask_core::channel::compute_stats(&params)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let grid = parse_snr_grid(&args.snr_db)?;
    let seed = args.common.seed.unwrap_or(settings.seed);

    let shape = match (args.source, &args.constellation) {
        (Source::File, Some(path)) => Some(load_shape(path)?),
        (Source::File, None) => {
            return Err(CliError::Config("--source file requires --constellation".into()))
        }
        _ => None,
    };

    let mut out = args.common.sink()?;
    writeln!(out, "# risask sweep csv v1")?;
    writeln!(
        out,
        "snr_db,M,L,source,sep_bound,sep_bound_clamped,sep_mc,ci_low,ci_high,trials,t_star"
    )?;

    for &snr_db in &grid {
        let budget = EnergyBudget::from_average_snr(db_to_linear(snr_db), &stats, &params)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let (constellation, t_star, source_name): (Constellation64, Option<f64>, &str) =
            match args.source {
                Source::Traditional => (
                    traditional_ask(args.order, &budget)
                        .map_err(|e| CliError::Config(e.to_string()))?,
                    None,
                    "traditional",
                ),
                Source::Optimal => {
                    let result =
                        bisection_optimize(args.order, &budget, &stats, &params, DEFAULT_EPS)
                            .map_err(|e| CliError::Optimizer(e.to_string()))?;
                    if !result.converged {
                        return Err(CliError::Optimizer(format!(
                            "optimizer did not converge at {snr_db} dB"
                        )));
                    }
                    (result.constellation.clone(), Some(result.t_star), "optimal")
                }
                Source::File => {
                    let raw = shape.as_ref().expect("checked above");
                    let mean: f64 = raw.iter().sum::<f64>() / raw.len() as f64;
                    if mean <= 0.0 {
                        return Err(CliError::Config(
                            "file constellation must have positive mean energy".into(),
                        ));
                    }
                    let scaled: Vec<f64> = raw.iter().map(|e| e * budget.c / mean).collect();
                    (
                        Constellation::new(scaled).map_err(|e| CliError::Config(e.to_string()))?,
                        None,
                        "file",
                    )
                }
            };

        let bound = sep_union_bound(&constellation, &stats, &params)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let (sep_mc, ci_low, ci_high) = if args.trials > 0 {
            let mc = McConfig {
                trials: args.trials,
                seed,
                channel_mode: args.mode.into(),
                chunk: settings.chunk,
            };
            let est = mc_sep(&constellation, &stats, &params, &mc);
            (
                est.p_hat.to_string(),
                est.ci_low.to_string(),
                est.ci_high.to_string(),
            )
        } else {
            (String::new(), String::new(), String::new())
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            snr_db,
            args.order,
            params.l,
            source_name,
            bound,
            bound.min(1.0),
            sep_mc,
            ci_low,
            ci_high,
            args.trials,
            t_star.map(|t| t.to_string()).unwrap_or_default(),
        )?;
        if args.emit_constellations && args.source == Source::Optimal {
            let mut value = serde_json::json!({
                "snr_db": snr_db,
                "energies": constellation.energies(),
            });
            if let Some(t) = t_star {
                value["t_star"] = serde_json::json!(t);
            }
            writeln!(out, "# constellation {value}")?;
        }
    }
    out.flush()?;
    Ok(())
}
