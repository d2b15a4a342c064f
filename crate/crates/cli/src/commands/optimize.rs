//! `risask optimize`: one optimal constellation as JSON.

use std::io::Write;

use clap::Args as ClapArgs;
use risask_core::optimizer::{bisection_optimize, EnergyBudget, DEFAULT_EPS};

use crate::common::{db_to_linear, CliError, CommonArgs};

#[derive(Debug, ClapArgs)]
pub struct Args {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Target average SNR per symbol in dB.
    #[arg(long = "snr-db")]
    pub snr_db: f64,

    /// Modulation order.
    #[arg(short = 'M', long = "order", default_value_t = 4)]
    pub order: usize,

    /// Bisection tolerance (absolute on the target interval, relative on
    /// the energy constraint).
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let (params, _) = args.common.resolve_params()?;
    let stats = risask_core::channel::compute_stats(&params)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let budget = EnergyBudget::from_average_snr(db_to_linear(args.snr_db), &stats, &params)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let result = bisection_optimize(args.order, &budget, &stats, &params, args.eps)
        .map_err(|e| CliError::Optimizer(e.to_string()))?;
    let json = serde_json::to_string(&result).map_err(|e| CliError::Io(e.to_string()))?;
    let mut out = args.common.sink()?;
    writeln!(out, "{json}")?;
    out.flush()?;
    if !result.converged {
        return Err(CliError::Optimizer(format!(
            "optimizer did not converge (|S - C|/C = {:.3e} after {} iterations)",
            ((result.achieved_energy - budget.c) / budget.c).abs(),
            result.iterations
        )));
    }
    Ok(())
}
