//! Nonadaptive GHZ protocols beat the noncontextual bound for nonlinear
//! functions and tie it for linear ones.

use l2mbqc::boolean::BooleanFunction;
use l2mbqc::mbqc::compile_pfd_to_ghz;
use l2mbqc::pfd::solve_pfd;
use l2mbqc::sim::bell_score;

fn main() -> l2mbqc::Result<()> {
    let cases = [
        ("AND_2", BooleanFunction::and(2)?),
        ("AND_3", BooleanFunction::and(3)?),
        ("C_4^2", BooleanFunction::pairwise_and(4)?),
        ("x1 + x2", BooleanFunction::parity(2)?),
    ];
    println!("{:<8} {:>6} {:>8} {:>9} {:>9}", "f", "qubits", "quantum", "beta", "violation");
    for (name, f) in &cases {
        let g = compile_pfd_to_ghz(&solve_pfd(f, None)?, f.eval(0))?;
        let b = bell_score(&g, f, 50, 1)?;
        println!("{name:<8} {:>6} {:>8.4} {:>9.4} {:>9}", g.len(), b.quantum, b.beta, b.violation);
    }
    Ok(())
}
