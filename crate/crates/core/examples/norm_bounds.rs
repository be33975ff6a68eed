//! The sum `lambda + mu` admits kernels that the bound `2 max(lambda, mu)` rejects.

use coupled_fixpoint::fredholm::{check_assumptions, AssumptionSampler};
use coupled_fixpoint::*;

fn main() -> Result<()> {
    let problem = FredholmProblem::builder()
        .interval(0.0, 1.0)
        .kernels(|_, _| 4.0, |_, _| 0.0)
        .nonlinearities(|_, _| 0.0, |_, _| 0.0)
        .forcing(|t| t)
        .constants(1.0 / 6.0, 1.0 / 12.0)
        .theta(ControlFunction::theta1(0.25))
        .grid_size(129)
        .build()?;
    let r = check_assumptions(&problem, &AssumptionSampler::default())?;
    println!("(lambda + mu) sup ∫(K1 - K2) = {}  -> {}", r.norm_bound, if r.norm_ok { "accepted" } else { "rejected" });
    println!("2 max(lambda, mu) sup ∫(K1 - K2) = {:.6}", r.luong_bound);
    Ok(())
}
