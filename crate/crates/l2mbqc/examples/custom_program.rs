//! Hand-written one-qubit program for x1 AND x2, compiled to a chain, checked analytically
//! and by branch enumeration, and written out as JSON.

use std::f64::consts::PI;

use l2mbqc::gates::Axis;
use l2mbqc::mbqc::compile_to_cluster;
use l2mbqc::onequbit::{Gate, OneQubitProgram};
use l2mbqc::sim::{effective_circuit, exact_distribution};

fn main() -> l2mbqc::Result<()> {
    let prog = OneQubitProgram::new(
        2,
        vec![
            Gate::select(Axis::X, PI / 2.0, 0b01),
            Gate::select(Axis::Z, PI, 0b10),
            Gate::select(Axis::X, PI / 2.0, 0b01),
            Gate::select(Axis::X, PI, 0b01),
        ],
    )?;
    let s = compile_to_cluster(&prog)?;
    println!("{} chain qubits, {}", s.len(), s.resources());
    for x in 0..4 {
        let analytic = effective_circuit(&s, x)?.probabilities;
        let enumerated = exact_distribution(&s, x)?;
        let direct = prog.evaluate(x).probabilities;
        println!("x = {x:02b}: P(y=1) program {:.6}  analytic {:.6}  enumerated {:.6}", direct[1], analytic[1], enumerated[1]);
    }
    println!("{}", s.to_json_string());
    Ok(())
}
