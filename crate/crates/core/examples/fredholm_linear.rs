//! x(t) = ∫ (K1 + K2)(f + g)(s, x(s)) ds + 1 with K1 = 1/4, K2 = -1/8,
//! f = x/24, g = -x/48. The solution is the constant 384/383.

use coupled_fixpoint::*;

fn main() -> Result<()> {
    let problem = FredholmProblem::builder()
        .interval(0.0, 1.0)
        .kernels(|_, _| 0.25, |_, _| -0.125)
        .nonlinearities(|_, x| x / 24.0, |_, x| -x / 48.0)
        .forcing(|_| 1.0)
        .constants(1.0 / 6.0, 1.0 / 12.0)
        .theta(ControlFunction::theta1(0.25))
        .grid_size(101)
        .build()?;

    let sol = solve_integral_equation(&problem, &LowerUpperPair::constant(101, 0.0, 2.0)?, &SolverConfig::default())?;
    println!("hypotheses: {}", sol.report.summary());
    println!("norm bound {:.6}, older bound {:.6}", sol.report.norm_bound, sol.report.luong_bound);
    println!("x(0.5) = {:.12}, expected {:.12}", sol.solution[50], 384.0 / 383.0);
    println!("{} iterations, residual {:e}", sol.trace.iterations(), sol.residual);
    Ok(())
}
