//! Single-qubit computations conditioned on mod-2 linear functions of the input.
//!
//! A [`OneQubitProgram`] is a list of X/Z rotations applied in order to `|0>`
//! and read out in the Z basis. Each rotation angle may depend on a parity
//! `l(x) = mask . x` of the input:
//!
//! - `None`: the angle is `theta`;
//! - `Select { mask }`: the angle is `theta * l(x)`;
//! - `Sign { mask, bias }`: the angle is `theta * (-1)^(l(x) + bias)`.

use serde::{Deserialize, Serialize};

use crate::boolean::{bits_to_index, BooleanFunction};
use crate::error::{invalid, Error, Result};
use crate::gates::{self, Axis, Mat2, C64};
use crate::pfd::PeriodicDecomposition;
use crate::qsp::{self, QspAngles};

use std::f64::consts::PI;

fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// How a rotation angle depends on the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cond {
    None,
    Select { mask: u64 },
    Sign { mask: u64, bias: bool },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub axis: Axis,
    pub theta: f64,
    pub cond: Cond,
}

impl Gate {
    pub fn fixed(axis: Axis, theta: f64) -> Self {
        Gate { axis, theta, cond: Cond::None }
    }

    pub fn select(axis: Axis, theta: f64, mask: u64) -> Self {
        Gate { axis, theta, cond: Cond::Select { mask } }
    }

    pub fn sign(axis: Axis, theta: f64, mask: u64, bias: bool) -> Self {
        Gate { axis, theta, cond: Cond::Sign { mask, bias } }
    }

    /// Rotation angle on input `x`.
    pub fn angle(&self, x: u64) -> f64 {
        match self.cond {
            Cond::None => self.theta,
            Cond::Select { mask } => {
                if parity(mask & x) {
                    self.theta
                } else {
                    0.0
                }
            }
            Cond::Sign { mask, bias } => {
                if parity(mask & x) ^ bias {
                    -self.theta
                } else {
                    self.theta
                }
            }
        }
    }

    pub fn unitary(&self, x: u64) -> Mat2 {
        gates::rot(self.axis, self.angle(x))
    }

    pub fn mask(&self) -> Option<u64> {
        match self.cond {
            Cond::None => None,
            Cond::Select { mask } | Cond::Sign { mask, .. } => Some(mask),
        }
    }
}

/// Result of running a program on one input.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub unitary: Mat2,
    /// `P(y)` for `y = 0, 1`.
    pub probabilities: [f64; 2],
    /// Output bit when one outcome has probability at least `1 - 1e-9`.
    pub deterministic: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneQubitProgram {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl OneQubitProgram {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let prog = OneQubitProgram { n, gates };
        prog.validate()?;
        Ok(prog)
    }

    /// Every condition row must live on the `n` input bits.
    pub fn validate(&self) -> Result<()> {
        let full = if self.n >= 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(mask) = g.mask() {
                if mask & !full != 0 {
                    return Err(invalid(format!("gate {i} conditions on bits beyond n = {}", self.n)));
                }
            }
            if !g.theta.is_finite() {
                return Err(invalid(format!("gate {i} has a non-finite angle")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Distinct nonzero condition rows.
    pub fn condition_rows(&self) -> Vec<u64> {
        let mut rows: Vec<u64> = self.gates.iter().filter_map(Gate::mask).filter(|&m| m != 0).collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// The product `U_T ... U_1` on input index `x`.
    pub fn unitary(&self, x: u64) -> Mat2 {
        self.gates.iter().fold(gates::identity(), |acc, g| gates::mul(&g.unitary(x), &acc))
    }

    pub fn evaluate(&self, x: u64) -> Evaluation {
        let unitary = self.unitary(x);
        let probabilities = gates::readout(&unitary);
        let deterministic = if probabilities[0] >= 1.0 - 1e-9 {
            Some(false)
        } else if probabilities[1] >= 1.0 - 1e-9 {
            Some(true)
        } else {
            None
        };
        Evaluation { unitary, probabilities, deterministic }
    }

    pub fn evaluate_bits(&self, bits: &[bool]) -> Result<Evaluation> {
        if bits.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: bits.len() });
        }
        Ok(self.evaluate(bits_to_index(bits)))
    }

    /// Worst failure probability against `f` over all `2^n` inputs.
    pub fn failure_against(&self, f: &BooleanFunction) -> Result<f64> {
        if f.n() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: f.n() });
        }
        Ok((0..(1u64 << self.n))
            .map(|x| 1.0 - self.evaluate(x).probabilities[usize::from(f.eval(x))])
            .fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gates: Vec<GateJson> = self.gates.iter().map(GateJson::from).collect();
        serde_json::to_value(ProgramJson { n: self.n, gates }).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: ProgramJson = serde_json::from_value(v.clone())?;
        let gates = raw.gates.into_iter().map(Gate::try_from).collect::<Result<_>>()?;
        Self::new(raw.n, gates)
    }
}

#[derive(Serialize, Deserialize)]
struct CondJson {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    mask: u64,
    #[serde(default)]
    bias: u8,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    axis: Axis,
    theta: f64,
    cond: CondJson,
}

#[derive(Serialize, Deserialize)]
struct ProgramJson {
    n: usize,
    gates: Vec<GateJson>,
}

impl From<&Gate> for GateJson {
    fn from(g: &Gate) -> Self {
        let cond = match g.cond {
            Cond::None => CondJson { kind: "none".into(), mask: 0, bias: 0 },
            Cond::Select { mask } => CondJson { kind: "select".into(), mask, bias: 0 },
            Cond::Sign { mask, bias } => CondJson { kind: "sign".into(), mask, bias: u8::from(bias) },
        };
        GateJson { axis: g.axis, theta: g.theta, cond }
    }
}

impl TryFrom<GateJson> for Gate {
    type Error = Error;

    fn try_from(g: GateJson) -> Result<Self> {
        let cond = match g.cond.kind.as_str() {
            "none" => Cond::None,
            "select" => Cond::Select { mask: g.cond.mask },
            "sign" => Cond::Sign { mask: g.cond.mask, bias: g.cond.bias != 0 },
            other => return Err(invalid(format!("unknown condition type {other:?}"))),
        };
        Ok(Gate { axis: g.axis, theta: g.theta, cond })
    }
}

/// Rewrites every `Select` gate as an unconditioned half rotation followed by
/// a `Sign` half rotation with bias 1, using `l = (1 - (-1)^l) / 2`.
pub fn normalize_sign_form(prog: &OneQubitProgram) -> OneQubitProgram {
    let mut gates = Vec::with_capacity(prog.gates.len());
    for g in &prog.gates {
        match g.cond {
            Cond::Select { mask } => {
                gates.push(Gate::fixed(g.axis, g.theta / 2.0));
                gates.push(Gate::sign(g.axis, g.theta / 2.0, mask, true));
            }
            _ => gates.push(*g),
        }
    }
    OneQubitProgram { n: prog.n, gates }
}

/// `cos(alpha) = 1/sqrt(3)`.
pub fn mod3_alpha() -> f64 {
    (1.0 / 3f64.sqrt()).acos()
}

/// `U_Q = R_Z(3 pi/4) R_X(alpha) R_Z(2 pi/3) R_X(-alpha) R_Z(-3 pi/4)`, which
/// equals `exp(-i pi (X + Y + Z) / (3 sqrt 3))` and cycles `Z -> X -> Y -> Z`.
pub fn u_q() -> Mat2 {
    let a = mod3_alpha();
    [gates::rz(3.0 * PI / 4.0), gates::rx(a), gates::rz(2.0 * PI / 3.0), gates::rx(-a), gates::rz(-3.0 * PI / 4.0)]
        .iter()
        .fold(gates::identity(), |acc, g| gates::mul(&acc, g))
}

/// `exp(-i pi (X + Y + Z) / (3 sqrt 3))` from its closed form.
pub fn u_q_exact() -> Mat2 {
    let t = PI / 3.0;
    let (s, c) = t.sin_cos();
    let k = s / 3f64.sqrt();
    let i = C64::new(0.0, 1.0);
    let n = gates::add(&gates::add(&gates::pauli_x(), &gates::pauli_y()), &gates::pauli_z());
    gates::add(&gates::scale(&gates::identity(), C64::new(c, 0.0)), &gates::scale(&n, -i * k))
}

/// One step of the abstract mod-3 circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordStep {
    /// `U_Q^dagger` when input bit `bit` (0-based) is set.
    UqDagger { bit: usize },
    PauliZ,
    /// `U_Q` when input bit `bit` is set.
    Uq { bit: usize },
}

/// The mod-3 circuit `prod U_Q^{x_j} Z prod (U_Q^{x_j})^dagger` in both its
/// abstract `2n + 1` step form and its X/Z Euler expansion.
#[derive(Clone, Debug)]
pub struct Mod3Clifford {
    pub n: usize,
    pub steps: Vec<CliffordStep>,
    /// `X(alpha)`, `n` selected `Z(-2 pi / 3)`, `X(-2 alpha)`, `n` selected `Z(2 pi / 3)`, `X(alpha)`.
    pub program: OneQubitProgram,
}

impl Mod3Clifford {
    pub fn abstract_count(&self) -> usize {
        self.steps.len()
    }

    /// The abstract circuit's unitary on input `x`.
    pub fn abstract_unitary(&self, x: u64) -> Mat2 {
        let uq = u_q();
        let uqd = gates::dagger(&uq);
        self.steps.iter().fold(gates::identity(), |acc, s| {
            let g = match *s {
                CliffordStep::UqDagger { bit } if x >> bit & 1 == 1 => uqd,
                CliffordStep::Uq { bit } if x >> bit & 1 == 1 => uq,
                CliffordStep::PauliZ => gates::pauli_z(),
                _ => gates::identity(),
            };
            gates::mul(&g, &acc)
        })
    }
}

pub fn build_mod3_clifford(n: usize) -> Result<Mod3Clifford> {
    if n == 0 || n > 63 {
        return Err(invalid("mod-3 circuit needs 1 <= n <= 63"));
    }
    let mut steps: Vec<CliffordStep> = (0..n).map(|bit| CliffordStep::UqDagger { bit }).collect();
    steps.push(CliffordStep::PauliZ);
    steps.extend((0..n).map(|bit| CliffordStep::Uq { bit }));

    let a = mod3_alpha();
    let mut g = vec![Gate::fixed(Axis::X, a)];
    g.extend((0..n).map(|i| Gate::select(Axis::Z, -2.0 * PI / 3.0, 1 << i)));
    g.push(Gate::fixed(Axis::X, -2.0 * a));
    g.extend((0..n).map(|i| Gate::select(Axis::Z, 2.0 * PI / 3.0, 1 << i)));
    g.push(Gate::fixed(Axis::X, a));
    Ok(Mod3Clifford { n, steps, program: OneQubitProgram::new(n, g)? })
}

/// Lead `Z(-xi_1)`, then per layer a block of X gates followed by
/// `Z(xi_i - xi_{i+1})`, ending with `Z(xi_L)` (or `X(pi)` when `flip`).
fn layered_program(n: usize, xi: &[f64], block: &[Gate], flip: bool) -> Result<OneQubitProgram> {
    let mut g = Vec::with_capacity(xi.len() * (block.len() + 1) + 1);
    let first = xi.first().copied().unwrap_or(0.0);
    g.push(Gate::fixed(Axis::Z, -first));
    for (i, &x) in xi.iter().enumerate() {
        g.extend_from_slice(block);
        match xi.get(i + 1) {
            Some(next) => g.push(Gate::fixed(Axis::Z, x - next)),
            None if flip => g.push(Gate::fixed(Axis::X, PI)),
            None => g.push(Gate::fixed(Axis::Z, x)),
        }
    }
    OneQubitProgram::new(n, g)
}

/// Select-form QSP circuit for `Mod_{p,j}`: each layer rotates by
/// `R_X(4 pi (|x| - j) / p)` as `n` selected `R_X(4 pi / p)` gates plus, for
/// `j != 0`, one fixed `R_X(-4 pi j / p)`.
pub fn build_qsp_program(p: u32, j: u32, n: usize, angles: &QspAngles) -> Result<OneQubitProgram> {
    if n == 0 || n > 63 {
        return Err(invalid("n must be in 1..=63"));
    }
    if j >= p {
        return Err(invalid(format!("j must be below p = {p}")));
    }
    if angles.l != 2 * p as usize - 1 {
        return Err(invalid(format!("expected L = {} angles, got {}", 2 * p - 1, angles.l)));
    }
    let failure = qsp::verify_qsp(angles, p, j, n);
    if failure > 1e-9 {
        return Err(Error::Unverified { failure });
    }
    let mut block: Vec<Gate> = (0..n).map(|i| Gate::select(Axis::X, 4.0 * PI / p as f64, 1 << i)).collect();
    if j != 0 {
        block.push(Gate::fixed(Axis::X, -4.0 * PI * j as f64 / p as f64));
    }
    layered_program(n, &angles.xi, &block, false)
}

/// Select-form QSP circuit for a symmetric function with `4n + 1` layers of
/// `n` selected `R_X(pi / (n + 1))` gates.
pub fn build_symmetric_program(f: &BooleanFunction, angles: &QspAngles) -> Result<OneQubitProgram> {
    let profile = f.profile().ok_or_else(|| invalid("function is not symmetric"))?;
    let n = f.n();
    if angles.l != 4 * n + 1 {
        return Err(invalid(format!("expected L = {} angles, got {}", 4 * n + 1, angles.l)));
    }
    let failure = qsp::verify_symmetric(angles, profile);
    if failure > 1e-9 {
        return Err(Error::Unverified { failure });
    }
    let block: Vec<Gate> = (0..n).map(|i| Gate::select(Axis::X, PI / (n as f64 + 1.0), 1 << i)).collect();
    layered_program(n, &angles.xi, &block, profile[0])
}

/// One selected `R_X(pi phi_p)` per mask of the decomposition's support.
pub fn build_commuting_program(d: &PeriodicDecomposition) -> Result<OneQubitProgram> {
    use num_traits::ToPrimitive;
    let gates = d
        .support()
        .into_iter()
        .map(|(mask, phi)| Gate::select(Axis::X, PI * phi.to_f64().expect("small rational"), mask))
        .collect();
    OneQubitProgram::new(d.n, gates)
}

/// Counter width for the OR reduction on `n` bits: `ceil(log2(n + 1))`.
pub fn or_reduction_width(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

/// Programs `j = 1..=kappa`, program `j` realizing `R_X(2 pi |x| / 2^j)`.
pub fn or_reduction_bank(n: usize) -> Result<Vec<OneQubitProgram>> {
    or_reduction_bank_with_width(n, or_reduction_width(n))
}

/// [`or_reduction_bank`] with an explicit counter width.
pub fn or_reduction_bank_with_width(n: usize, kappa: usize) -> Result<Vec<OneQubitProgram>> {
    if n == 0 || n > 63 {
        return Err(invalid("n must be in 1..=63"));
    }
    (1..=kappa)
        .map(|j| {
            let theta = 2.0 * PI / (1u64 << j) as f64;
            OneQubitProgram::new(n, (0..n).map(|i| Gate::select(Axis::X, theta, 1 << i)).collect())
        })
        .collect()
}

/// Probability that the bank's output string is all zeros on input `x`.
pub fn or_bank_zero_probability(bank: &[OneQubitProgram], x: u64) -> f64 {
    bank.iter().map(|p| p.evaluate(x).probabilities[0]).product()
}

/// A circuit on `kappa` qubits; basis index bit `q` is qubit `q`.
#[derive(Clone, Debug)]
pub struct MultiQubitCircuit {
    pub qubits: usize,
    pub gates: Vec<CircuitGate>,
}

#[derive(Clone, Debug)]
pub enum CircuitGate {
    /// A single-qubit gate, applied only when input bit `control` is set (if any).
    Single { qubit: usize, matrix: Mat2, control: Option<usize> },
    /// A named unitary on all qubits.
    Dense { name: String, matrix: Vec<Vec<C64>> },
}

impl MultiQubitCircuit {
    /// Largest deviation from unitarity over all gates.
    pub fn unitarity_deviation(&self) -> f64 {
        self.gates
            .iter()
            .map(|g| match g {
                CircuitGate::Single { matrix, .. } => gates::unitarity_deviation(matrix),
                CircuitGate::Dense { matrix, .. } => dense_unitarity_deviation(matrix),
            })
            .fold(0.0, f64::max)
    }

    /// Final state on input `x`, starting from all zeros.
    pub fn run(&self, x: u64) -> Vec<C64> {
        let dim = 1usize << self.qubits;
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        psi[0] = C64::new(1.0, 0.0);
        for g in &self.gates {
            match g {
                CircuitGate::Single { qubit, matrix, control } => {
                    if control.is_some_and(|c| x >> c & 1 == 0) {
                        continue;
                    }
                    let bit = 1usize << qubit;
                    for b in 0..dim {
                        if b & bit == 0 {
                            let (a0, a1) = (psi[b], psi[b | bit]);
                            psi[b] = matrix[0][0] * a0 + matrix[0][1] * a1;
                            psi[b | bit] = matrix[1][0] * a0 + matrix[1][1] * a1;
                        }
                    }
                }
                CircuitGate::Dense { matrix, .. } => {
                    psi = matrix.iter().map(|row| row.iter().zip(&psi).map(|(m, v)| m * v).sum()).collect();
                }
            }
        }
        psi
    }

    /// Computational-basis distribution on input `x`.
    pub fn distribution(&self, x: u64) -> Vec<f64> {
        self.run(x).iter().map(|a| a.norm_sqr()).collect()
    }
}

fn dense_unitarity_deviation(m: &[Vec<C64>]) -> f64 {
    let d = m.len();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            let v: C64 = (0..d).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (v - target).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Largest counter width handled by dense simulation.
pub const MAX_COUNTER_QUBITS: usize = 4;

/// Counter `M = U_DFT D U_DFT^dagger` on `kappa = ceil(log2 p)` qubits with
/// `D = prod_q R_Z(2^(q+1) pi / p)`, so `M^w |0> = |+-w mod p>` up to phase.
///
/// The circuit applies `U_DFT^dagger`, then for every input bit the `kappa`
/// Z rotations conditioned on that bit, then `U_DFT`.
pub fn moore_counter(p: u32, n: usize) -> Result<MultiQubitCircuit> {
    if p < 2 {
        return Err(invalid("p must be at least 2"));
    }
    let kappa = (u32::BITS - (p - 1).leading_zeros()) as usize;
    if kappa > MAX_COUNTER_QUBITS {
        return Err(Error::Capacity(format!("counter needs {kappa} qubits, cap is {MAX_COUNTER_QUBITS}")));
    }
    let dim = 1usize << kappa;
    let p_us = p as usize;
    let mut dft = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for (a, row) in dft.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = if a < p_us && b < p_us {
                gates::cis(2.0 * PI * (a * b) as f64 / p as f64) / (p as f64).sqrt()
            } else if a == b {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
        }
    }
    let dft_dagger: Vec<Vec<C64>> = (0..dim).map(|i| (0..dim).map(|j| dft[j][i].conj()).collect()).collect();
    let mut gates_out = vec![CircuitGate::Dense { name: "dft_dagger".into(), matrix: dft_dagger }];
    for bit in 0..n {
        for q in 0..kappa {
            let theta = (1u64 << (q + 1)) as f64 * PI / p as f64;
            gates_out.push(CircuitGate::Single { qubit: q, matrix: gates::rz(theta), control: Some(bit) });
        }
    }
    gates_out.push(CircuitGate::Dense { name: "dft".into(), matrix: dft });
    Ok(MultiQubitCircuit { qubits: kappa, gates: gates_out })
}

/// Probability that the counter reads all zeros on an input of weight `w`.
pub fn moore_zero_probability(circuit: &MultiQubitCircuit, w: usize) -> f64 {
    let x = if w == 0 { 0 } else { (1u64 << w) - 1 };
    circuit.distribution(x)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::parse_bits;
    use crate::pfd::{self, Angle};
    use crate::qsp::{synthesize_mod_p, synthesize_symmetric, table2};
    use proptest::prelude::*;

    fn idx(s: &str) -> u64 {
        bits_to_index(&parse_bits(s).unwrap())
    }

    #[test]
    fn u_q_matches_closed_form_and_cycles_paulis() {
        assert!(gates::phase_overlap(&u_q(), &u_q_exact()) > 2.0 - 1e-12);
        let u = u_q_exact();
        let conj = |p: Mat2| gates::mul(&gates::mul(&u, &p), &gates::dagger(&u));
        assert!(gates::phase_overlap(&conj(gates::pauli_z()), &gates::pauli_x()) > 2.0 - 1e-12);
        assert!(gates::phase_overlap(&conj(gates::pauli_x()), &gates::pauli_y()) > 2.0 - 1e-12);
        assert!(gates::phase_overlap(&conj(gates::pauli_y()), &gates::pauli_z()) > 2.0 - 1e-12);
    }

    #[test]
    fn mod3_clifford() {
        let c = build_mod3_clifford(3).unwrap();
        assert_eq!(c.abstract_count(), 7);
        assert_eq!(c.program.evaluate(idx("110")).deterministic, Some(true));
        let one = build_mod3_clifford(1).unwrap();
        assert!(gates::phase_overlap(&one.abstract_unitary(0), &gates::pauli_z()) > 2.0 - 1e-12);
        assert_eq!(one.program.evaluate(0).deterministic, Some(false));
        for n in 1..=6 {
            let c = build_mod3_clifford(n).unwrap();
            assert_eq!(c.abstract_count(), 2 * n + 1);
            let f = BooleanFunction::mod_p(3, 0, n).unwrap();
            for x in 0..(1u64 << n) {
                assert_eq!(c.program.evaluate(x).deterministic, Some(f.eval(x)), "n={n} x={x}");
                let expect = [gates::pauli_z(), gates::pauli_x(), gates::pauli_y()][x.count_ones() as usize % 3];
                assert!(gates::phase_overlap(&c.abstract_unitary(x), &expect) > 2.0 - 1e-12);
            }
        }
    }

    #[test]
    fn empty_program_outputs_zero() {
        let p = OneQubitProgram::new(3, vec![]).unwrap();
        assert_eq!(p.evaluate(5).deterministic, Some(false));
        assert!(p.evaluate_bits(&[true]).is_err());
    }

    #[test]
    fn qsp_program_from_fixture() {
        let t = &table2()[0];
        let prog = build_qsp_program(3, 0, 2, t).unwrap();
        assert_eq!(prog.evaluate(idx("11")).deterministic, Some(true));
        assert_eq!(prog.evaluate(0).deterministic, Some(false));
        assert_eq!(build_qsp_program(3, 0, 4, t).unwrap().len(), 26);
    }

    #[test]
    fn qsp_program_truth_tables() {
        for (p, j) in [(5u32, 0u32), (3, 1), (5, 3), (7, 0)] {
            let angles = synthesize_mod_p(p, j).unwrap();
            for n in 1..=8 {
                let prog = build_qsp_program(p, j, n, &angles).unwrap();
                let extra = if j == 0 { 0 } else { 2 * p as usize - 1 };
                assert_eq!(prog.len(), (2 * p as usize - 1) * n + 2 * p as usize + extra);
                let f = BooleanFunction::mod_p(p, j, n).unwrap();
                assert!(prog.failure_against(&f).unwrap() < 1e-9, "p={p} j={j} n={n}");
            }
        }
    }

    #[test]
    fn symmetric_programs() {
        let c22 = BooleanFunction::pairwise_and(2).unwrap();
        let prog = build_symmetric_program(&c22, &synthesize_symmetric(&c22).unwrap()).unwrap();
        assert_eq!(prog.len(), 28);
        assert_eq!(prog.evaluate(0).deterministic, Some(false));
        for n in 1..=6 {
            for f in [
                BooleanFunction::mod_p(3, 1, n).unwrap(),
                BooleanFunction::pairwise_and(n).unwrap(),
                BooleanFunction::constant(true, n).unwrap(),
            ] {
                let prog = build_symmetric_program(&f, &synthesize_symmetric(&f).unwrap()).unwrap();
                assert_eq!(prog.len(), 4 * n * n + 5 * n + 2);
                assert!(prog.failure_against(&f).unwrap() < 1e-9, "{f:?}");
            }
        }
    }

    #[test]
    fn commuting_programs() {
        let half = |v| Angle::new(v, 2);
        let or2 = pfd::PeriodicDecomposition::new(2, vec![(1, half(3)), (2, half(3)), (3, half(-1))]).unwrap();
        let prog = build_commuting_program(&or2).unwrap();
        let f = BooleanFunction::or(2).unwrap();
        assert!(prog.failure_against(&f).unwrap() < 1e-12);
        let zero = pfd::PeriodicDecomposition::new(2, vec![]).unwrap();
        assert!(build_commuting_program(&zero).unwrap().is_empty());
        let c3 = BooleanFunction::pairwise_and(3).unwrap();
        let d = pfd::PeriodicDecomposition::new(3, vec![(1, half(1)), (2, half(1)), (4, half(1)), (7, half(-1))]).unwrap();
        assert!(build_commuting_program(&d).unwrap().failure_against(&c3).unwrap() < 1e-12);
    }

    #[test]
    fn sign_form_examples() {
        let prog = OneQubitProgram::new(1, vec![Gate::select(Axis::X, PI / 3.0, 1)]).unwrap();
        let norm = normalize_sign_form(&prog);
        assert_eq!(norm.len(), 2);
        assert!(gates::phase_overlap(&norm.unitary(1), &gates::rx(PI / 3.0)) > 2.0 - 1e-12);
        assert!(gates::phase_overlap(&norm.unitary(0), &gates::identity()) > 2.0 - 1e-12);
    }

    #[test]
    fn or_bank() {
        assert_eq!(or_reduction_width(4), 3);
        assert_eq!(or_reduction_width(3), 2);
        let bank = or_reduction_bank(4).unwrap();
        assert_eq!(bank.len(), 3);
        assert_eq!(or_bank_zero_probability(&bank, 0), 1.0);
        assert!((bank[1].evaluate(0b0011).probabilities[1] - 1.0).abs() < 1e-12);
        for n in 1..=6 {
            let bank = or_reduction_bank(n).unwrap();
            for x in 1..(1u64 << n) {
                assert!(or_bank_zero_probability(&bank, x) < 1e-12, "n={n} x={x}");
            }
        }
        // the narrower width ceil(log2 n) aliases |x| = n = 4 to the zero counter
        let narrow = or_reduction_bank_with_width(4, 2).unwrap();
        assert!((or_bank_zero_probability(&narrow, 0b1111) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moore() {
        for p in [3u32, 5, 7, 11] {
            let c = moore_counter(p, 12).unwrap();
            assert!(c.unitarity_deviation() < 1e-12);
            for w in 0..=12 {
                let p0 = moore_zero_probability(&c, w);
                if w % p as usize == 0 {
                    assert!((p0 - 1.0).abs() < 1e-12, "p={p} w={w}");
                } else {
                    assert!(p0 < 1e-12, "p={p} w={w}");
                }
            }
        }
        let c = moore_counter(5, 2).unwrap();
        assert!(moore_zero_probability(&c, 2) < 1e-12);
        assert!(moore_counter(17, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let prog = normalize_sign_form(&build_mod3_clifford(2).unwrap().program);
        let back = OneQubitProgram::from_json(&prog.to_json()).unwrap();
        assert_eq!(back, prog);
        assert_eq!(prog.to_json()["gates"][2]["cond"]["type"], "sign");
    }

    fn random_program(n: usize, seed: u64, len: usize) -> OneQubitProgram {
        let mut s = seed | 1;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let gates = (0..len)
            .map(|_| {
                let axis = if next() & 1 == 0 { Axis::X } else { Axis::Z };
                let theta = (next() % 10_000) as f64 / 10_000.0 * 2.0 * PI - PI;
                let mask = next() & ((1 << n) - 1);
                match next() % 3 {
                    0 => Gate::fixed(axis, theta),
                    1 => Gate::select(axis, theta, mask),
                    _ => Gate::sign(axis, theta, mask, next() & 1 == 1),
                }
            })
            .collect();
        OneQubitProgram::new(n, gates).unwrap()
    }

    proptest! {
        #[test]
        fn sign_form_preserves_unitaries(n in 1usize..=4, seed in any::<u64>(), len in 0usize..12) {
            let prog = random_program(n, seed, len);
            let norm = normalize_sign_form(&prog);
            for x in 0..(1u64 << n) {
                prop_assert!(gates::phase_overlap(&prog.unitary(x), &norm.unitary(x)) > 2.0 - 1e-12);
                let (a, b) = (prog.evaluate(x).probabilities, norm.evaluate(x).probabilities);
                prop_assert!((a[0] - b[0]).abs() < 1e-12);
            }
        }

        #[test]
        fn commuting_program_order_invariance(n in 1usize..=4, seed in any::<u64>(), rot in 0usize..16) {
            let f = BooleanFunction::from_fn(n, |x| (x.wrapping_mul(seed | 1) >> 7) & 1 == 1).unwrap();
            let prog = build_commuting_program(&pfd::solve_pfd(&f, None).unwrap()).unwrap();
            let mut shuffled = prog.clone();
            if !shuffled.gates.is_empty() {
                let k = rot % shuffled.gates.len();
                shuffled.gates.rotate_left(k);
                shuffled.gates.reverse();
            }
            for x in 0..(1u64 << n) {
                prop_assert_eq!(prog.evaluate(x).deterministic, Some(f.eval(x) ^ f.eval(0)));
                prop_assert_eq!(shuffled.evaluate(x).deterministic, prog.evaluate(x).deterministic);
            }
        }

        #[test]
        fn programs_stay_unitary(n in 1usize..=3, seed in any::<u64>(), len in 0usize..30) {
            let prog = random_program(n, seed, len);
            for x in 0..(1u64 << n) {
                prop_assert!(gates::unitarity_deviation(&prog.unitary(x)) < 1e-13);
            }
        }
    }
}
