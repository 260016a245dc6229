//! OR_n through a binary Hamming-weight counter on one cut chain.

use l2mbqc::boolean::{format_bits, BooleanFunction};
use l2mbqc::mbqc::or_protocol;
use l2mbqc::onequbit::{or_bank_zero_probability, or_reduction_bank};
use l2mbqc::sim::{verify_protocol, EngineKind};

fn main() -> l2mbqc::Result<()> {
    let n = 5;
    let bank = or_reduction_bank(n)?;
    println!("counter width {} for n = {n}", bank.len());
    for x in [0u64, 1, 3, 7, 31] {
        println!("  x = {}  P(counter reads 0) = {:.3}", format_bits(x, n), or_bank_zero_probability(&bank, x));
    }

    let s = or_protocol(n)?;
    println!("{}", s.resources());
    let r = verify_protocol(&s, &BooleanFunction::or(n)?, 100, 3, EngineKind::Mps)?;
    println!("{} inputs x 100 shots, empirical success {}", r.inputs.len(), r.empirical_rate);
    Ok(())
}
