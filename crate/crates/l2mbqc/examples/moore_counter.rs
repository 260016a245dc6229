//! The Fourier-diagonalized counter reads zero with certainty exactly on
//! multiples of p.

use l2mbqc::onequbit::{moore_counter, moore_zero_probability};

fn main() -> l2mbqc::Result<()> {
    for p in [3u32, 5, 7] {
        let c = moore_counter(p, 12)?;
        let row: Vec<String> = (0..=12).map(|w| format!("{:.2}", moore_zero_probability(&c, w))).collect();
        println!("p = {p} ({} qubits): {}", c.qubits, row.join(" "));
    }
    Ok(())
}
