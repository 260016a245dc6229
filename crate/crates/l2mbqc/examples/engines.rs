//! Dense and MPS engines on the same schedule: marginal agreement, shot
//! reproducibility and the MPS path on a chain too large for the dense one.

use std::time::Instant;

use l2mbqc::boolean::BooleanFunction;
use l2mbqc::mbqc::{mod3_protocol, modp_protocol};
use l2mbqc::qsp::synthesize_mod_p;
use l2mbqc::sim::{cross_engine_deviation, run_shot, verify_protocol, EngineKind};

fn main() -> l2mbqc::Result<()> {
    let small = mod3_protocol(2)?;
    let worst = (0..4u64)
        .flat_map(|x| (0..20).map(move |seed| (x, seed)))
        .map(|(x, seed)| cross_engine_deviation(&small, x, seed))
        .collect::<l2mbqc::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("mod-3, n = 2 ({} qubits): max dense/MPS marginal difference {worst:.1e}", small.len());

    let a = run_shot(&small, 3, 42, EngineKind::Dense)?;
    let b = run_shot(&small, 3, 42, EngineKind::Mps)?;
    println!("seed 42 on both engines: same outcomes = {}", a == b);

    let (p, n) = (7, 5);
    let s = modp_protocol(p, 0, n, &synthesize_mod_p(p, 0)?)?;
    let start = Instant::now();
    let r = verify_protocol(&s, &BooleanFunction::mod_p(p, 0, n)?, 50, 0, EngineKind::Mps)?;
    println!(
        "Mod_{{{p},0}}, n = {n}: {} qubits, {} shots, success {} in {:.2?}",
        s.len(),
        50 << n,
        r.empirical_rate,
        start.elapsed()
    );
    Ok(())
}
