//! Compiles the five-round Mod_{3,0} chain protocol, prints its measurement
//! listing and checks it on every input.

use l2mbqc::boolean::BooleanFunction;
use l2mbqc::mbqc::{mod3_protocol, Basis};
use l2mbqc::sim::{verify_protocol, EngineKind};

fn main() -> l2mbqc::Result<()> {
    let n = 4;
    let s = mod3_protocol(n)?;
    println!("{} qubits, {}", s.len(), s.resources());
    for q in &s.qubits {
        let basis = match &q.basis {
            Basis::Xy { theta, bias, exact, .. } => {
                let angle = exact.map(|e| e.to_string()).unwrap_or_else(|| format!("{theta:.5}"));
                format!("(-1)^(s+{}) {angle}", u8::from(*bias))
            }
            Basis::Z => "Z".into(),
        };
        println!("  q{:<2} round {}  {basis:<22} P = {:04b}  A = {:?}", q.id, q.round, q.p_mask, q.a_ids);
    }
    println!("output = parity of qubits {:?}", s.o_ids);

    let f = BooleanFunction::mod_p(3, 0, n)?;
    let report = verify_protocol(&s, &f, 100, 7, EngineKind::Mps)?;
    println!(
        "min analytic success {:.12}, empirical {:.3}, beta {:.4}",
        report.min_analytic.unwrap(),
        report.empirical_rate,
        report.beta
    );
    Ok(())
}
