//! Iterates the scalar example from (-2, 3) and writes the trace as CSV.

use std::io;

use coupled_fixpoint::*;

fn main() -> Result<()> {
    let f = CoupledMap::example1();
    let cfg = SolverConfig::default().with_metric(Metric::AbsoluteScalar);
    let x0 = OrderedVector::scalar(-2.0)?;
    let y0 = OrderedVector::scalar(3.0)?;

    let (fp, trace) = solve(&f, &x0, &y0, &cfg)?;
    trace.write_csv(io::stdout().lock())?;
    let diag = diagonal_check(&fp, &trace, &cfg)?;
    eprintln!(
        "{:?} start, {} iterations, limit ({:e}, {:e}), diagonal gap {:e}",
        trace.initial_condition,
        trace.iterations(),
        fp.point.first[0],
        fp.point.second[0],
        diag.gap
    );
    Ok(())
}
