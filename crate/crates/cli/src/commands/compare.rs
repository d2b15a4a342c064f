//! `risask compare`: traditional vs optimal constellation points as CSV.

use std::io::Write;

use clap::Args as ClapArgs;
use risask_core::optimizer::{bisection_optimize, traditional_ask, EnergyBudget, DEFAULT_EPS};

use crate::common::{db_to_linear, parse_snr_grid, CliError, CommonArgs};

#[derive(Debug, ClapArgs)]
pub struct Args {
    #[command(flatten)]
    pub common: CommonArgs,

    /// SNR points in dB (value, comma list, or start:stop:step).
    #[arg(long = "snr-db", default_value = "5,25")]
    pub snr_db: String,

    /// Modulation order.
    #[arg(short = 'M', long = "order", default_value_t = 4)]
    pub order: usize,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let (params, _) = args.common.resolve_params()?;
    let stats = risask_core::channel::compute_stats(&params)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let grid = parse_snr_grid(&args.snr_db)?;

    let mut out = args.common.sink()?;
    writeln!(out, "# risask compare csv v1")?;
    writeln!(out, "snr_db,source,m,amplitude,energy")?;
    for &snr_db in &grid {
        let budget = EnergyBudget::from_average_snr(db_to_linear(snr_db), &stats, &params)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let traditional =
            traditional_ask(args.order, &budget).map_err(|e| CliError::Config(e.to_string()))?;
        let optimal = bisection_optimize(args.order, &budget, &stats, &params, DEFAULT_EPS)
            .map_err(|e| CliError::Optimizer(e.to_string()))?;
        if !optimal.converged {
            return Err(CliError::Optimizer(format!(
                "optimizer did not converge at {snr_db} dB"
            )));
        }
        for (source, c) in [("traditional", &traditional), ("optimal", &optimal.constellation)] {
            for m in 0..c.order() {
                // symbol index reported one-based
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    snr_db,
                    source,
                    m + 1,
                    c.amplitude(m),
                    c.energy(m)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
