//! Periodic Fourier decompositions, sparsity certificates and the GHZ
//! strategy they induce.

use l2mbqc::boolean::{format_bits, BooleanFunction};
use l2mbqc::pfd::{ghz_strategy, or_closed_form, solve_pfd, sparsity_certificate, verify_pfd};

fn main() -> l2mbqc::Result<()> {
    let or3 = BooleanFunction::or(3)?;
    let d = solve_pfd(&or3, None)?;
    println!("OR_3 = cos(pi * sum_p (p.x) phi_p):");
    for (mask, phi) in &d.angles {
        println!("  p = {}  phi = {phi}", format_bits(*mask, 3));
    }
    println!("residual {:.1e}", verify_pfd(&or3, &d)?.max_residual);
    println!("closed form agrees: {}", or_closed_form(3)? == d);

    for n in 2..=4 {
        let cert = sparsity_certificate(&BooleanFunction::and(n)?)?;
        println!("AND_{n}: {} non-integer angles, maximal sparsity certified: {}", cert.non_integer_count, cert.is_maximal());
    }

    let c2 = BooleanFunction::pairwise_and(3)?;
    let g = ghz_strategy(&solve_pfd(&c2, None)?, c2.eval(0))?;
    println!("C_3^2 GHZ strategy: {} qubits, output offset c = {}", g.qubits.len(), u8::from(g.c));
    for q in &g.qubits {
        println!("  measure X(pi * {}) when {}.x = 1", q.phi, format_bits(q.mask, 3));
    }
    Ok(())
}
