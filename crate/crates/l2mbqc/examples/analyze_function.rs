//! ANF, Walsh-Hadamard spectrum and the noncontextual bound of a few functions.

use l2mbqc::boolean::{format_bits, BooleanFunction};

fn main() -> l2mbqc::Result<()> {
    let functions = [
        ("AND_3", BooleanFunction::and(3)?),
        ("C_4^2", BooleanFunction::pairwise_and(4)?),
        ("Mod_{3,0}", BooleanFunction::mod_p(3, 0, 3)?),
        ("parity", BooleanFunction::parity(3)?),
    ];
    for (name, f) in &functions {
        let anf = f.anf();
        println!("{name} (n = {})", f.n());
        println!("  ANF     {}", anf.to_string_terms());
        println!("  degree  {}", anf.degree());
        println!("  f_max   {:.4}", f.f_max());
        println!("  beta    {:.4}   best affine agreement {:.4}", f.nchvm_bound(), f.best_affine_agreement());
        let peak = f
            .walsh_spectrum()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, v)| (k, *v))
            .unwrap();
        println!("  largest coefficient at k = {} ({:+.4})\n", format_bits(peak.0 as u64, f.n()), peak.1);
    }
    Ok(())
}
