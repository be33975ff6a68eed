//! Loads a problem file (default: `configs/derived.json`) and prints the solution.

use std::path::PathBuf;

use coupled_fixpoint::config::FredholmConfig;
use coupled_fixpoint::*;

fn main() -> Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/derived.json"));
    let cfg = FredholmConfig::from_path(&path)?;
    let sol = solve_integral_equation(&cfg.problem()?, &cfg.lower_upper()?, &cfg.solver_config())?;
    sol.write_csv(std::io::stdout().lock())
}
