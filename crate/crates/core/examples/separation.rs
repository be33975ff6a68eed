//! Which contractive conditions does `F(x, y) = (x - 2y) / 4` satisfy?

use coupled_fixpoint::*;

fn main() -> Result<()> {
    let f = CoupledMap::example1();
    let m = Metric::AbsoluteScalar;
    let phi = ControlFunction::identity();
    let psi = ControlFunction::psi_linear(0.25);

    let mut specs = vec![
        ConditionSpec::new(ConditionKind::Berinde { phi: phi.clone(), psi: psi.clone() }, m),
        ConditionSpec::new(ConditionKind::Luong { phi, psi }, m),
    ];
    for k in [0.1, 0.5, 0.9] {
        specs.push(ConditionSpec::new(ConditionKind::bhaskar(k)?, m));
    }

    for spec in &specs {
        let report = certify(spec, &f, 10_000, 42)?;
        println!("{:<45} {:?}", spec.kind.describe(), report.verdict);
        if let Some(w) = &report.witness {
            println!("    x={:?} y={:?} u={:?} v={:?}: {} > {}", w.x, w.y, w.u, w.v, w.lhs, w.rhs);
        }
    }
    Ok(())
}
