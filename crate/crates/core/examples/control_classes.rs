use coupled_fixpoint::*;

fn main() {
    let settings = ValidationSettings::default();
    let candidates = [
        ControlFunction::linear(0.5),
        ControlFunction::identity(),
        ControlFunction::psi_linear(0.25),
        ControlFunction::theta1(0.25),
        ControlFunction::theta1(0.75),
        ControlFunction::theta2(),
        ControlFunction::theta3(),
    ];
    for f in &candidates {
        let r = validate(f, &settings);
        let first = r.violations.first().map(|v| format!(" (first failure at t = {:e}: {})", v.input, v.expected));
        println!("{:?} {:<16} {}{}", r.class_checked, r.label, if r.passed { "ok" } else { "rejected" }, first.unwrap_or_default());
    }

    // psi derived from theta2 simplifies to s / (2s + 1)
    let psi = psi_from_theta(&ControlFunction::theta2());
    for s in [0.1, 1.0, 10.0] {
        println!("psi({s}) = {} vs {}", psi.eval(s), s / (2.0 * s + 1.0));
    }
}
