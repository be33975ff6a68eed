//! Solves from several starts and probes whether the limits coincide.

use coupled_fixpoint::*;

fn main() -> Result<()> {
    let cfg = SolverConfig::default();
    let s = |v: f64| OrderedVector::scalar(v);
    let starts = vec![(s(-1.0)?, s(1.0)?), (s(-5.0)?, s(5.0)?), (s(-10.0)?, s(10.0)?)];

    let contraction = CoupledMap::scalar("0.6x - 0.2y", |x, y| 0.6 * x - 0.2 * y);
    let (fps, report) = uniqueness_from_starts(&contraction, &starts, &cfg)?;
    println!("{}: {:?} over {} limits", contraction.label(), report.verdict, fps.len());

    // every pair (x, y) is a coupled fixed point of F(x, y) = x
    let first = CoupledMap::scalar("x", |x, _| x);
    let fps = [(1.0, 2.0), (3.0, -1.0)]
        .iter()
        .map(|&(x, y)| solve(&first, &s(x)?, &s(y)?, &cfg).map(|(fp, _)| fp))
        .collect::<Result<Vec<_>>>()?;
    let report = uniqueness_probe(&first, &fps, &cfg)?;
    println!("{}: {:?}", first.label(), report.verdict);
    Ok(())
}
