//! Simulation of measurement schedules.
//!
//! Two engines share one interface: a dense state vector (the reference, up
//! to [`MAX_DENSE_QUBITS`]) and a matrix product state for chains and GHZ
//! states whose bond dimension never exceeds [`MAX_BOND`]. Sampling draws
//! `u ~ U[0, 1)` from ChaCha8 seeded with `seed_from_u64` and picks outcome 1
//! iff `u >= P(0)`, so shots are reproducible across platforms.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolean::{format_bits, BooleanFunction};
use crate::error::{Error, Result};
use crate::gates::{self, Axis, Mat2, C64};
use crate::mbqc::{Basis, MeasurementSchedule, Qubit, Resource, ResourceReport, SegmentKind};

pub const MAX_DENSE_QUBITS: usize = 20;
/// Largest schedule handled by branch enumeration.
pub const MAX_ENUMERATION_QUBITS: usize = 14;
pub const MAX_BOND: usize = 2;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EngineKind {
    Dense,
    Mps,
    /// Dense up to 12 qubits, MPS beyond.
    #[default]
    Auto,
}

/// Eigenvectors `[v_0, v_1]` of the observable measured on `basis` with setting `s`.
pub fn basis_vectors(basis: &Basis, s: bool) -> [[C64; 2]; 2] {
    match basis.angle(s) {
        Some(a) => {
            let l = gates::cis(-a / 2.0) * FRAC_1_SQRT_2;
            let r = gates::cis(a / 2.0) * FRAC_1_SQRT_2;
            [[l, r], [l, -r]]
        }
        None => [[ONE, ZERO], [ZERO, ONE]],
    }
}

#[derive(Clone, Debug)]
pub struct DenseState {
    /// Qubit id held by bit position `k`.
    ids: Vec<usize>,
    psi: Vec<C64>,
}

impl DenseState {
    pub fn new(resource: &Resource) -> Result<Self> {
        let n = resource.size();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense engine holds at most {MAX_DENSE_QUBITS} qubits, got {n}")));
        }
        let segments = resource.segments();
        let psi = (0..1usize << n)
            .map(|b| {
                segments.iter().fold(ONE, |acc, seg| {
                    let bits: Vec<usize> = (0..seg.len).map(|k| b >> (seg.start - 1 + k) & 1).collect();
                    acc * match seg.kind {
                        SegmentKind::Chain => {
                            let sign = bits.windows(2).filter(|w| w[0] & w[1] == 1).count() % 2;
                            let mag = 0.5f64.powf(seg.len as f64 / 2.0);
                            C64::new(if sign == 1 { -mag } else { mag }, 0.0)
                        }
                        SegmentKind::Ghz if seg.len == 0 => ONE,
                        SegmentKind::Ghz => {
                            if bits.iter().all(|&v| v == bits[0]) {
                                C64::new(FRAC_1_SQRT_2, 0.0)
                            } else {
                                ZERO
                            }
                        }
                    }
                })
            })
            .collect();
        Ok(DenseState { ids: (1..=n).collect(), psi })
    }

    fn position(&self, id: usize) -> Result<usize> {
        self.ids
            .iter()
            .position(|&q| q == id)
            .ok_or_else(|| Error::InvalidSchedule(format!("qubit {id} is not present")))
    }

    fn project(&self, pos: usize, v: &[C64; 2]) -> Vec<C64> {
        let bit = 1usize << pos;
        let low = bit - 1;
        (0..self.psi.len() / 2)
            .map(|r| {
                let b0 = (r & low) | ((r & !low) << 1);
                v[0].conj() * self.psi[b0] + v[1].conj() * self.psi[b0 | bit]
            })
            .collect()
    }

    pub fn marginals(&self, id: usize, basis: &[[C64; 2]; 2]) -> Result<[f64; 2]> {
        let pos = self.position(id)?;
        Ok([0, 1].map(|m| self.project(pos, &basis[m]).iter().map(|a| a.norm_sqr()).sum()))
    }

    pub fn collapse(&mut self, id: usize, v: &[C64; 2], p: f64) -> Result<()> {
        let pos = self.position(id)?;
        let scale = 1.0 / p.sqrt();
        self.psi = self.project(pos, v).into_iter().map(|a| a * scale).collect();
        self.ids.remove(pos);
        Ok(())
    }
}

/// Matrix of at most `MAX_BOND x MAX_BOND` entries.
#[derive(Clone, Copy, Debug)]
struct Small {
    r: usize,
    c: usize,
    d: [[C64; MAX_BOND]; MAX_BOND],
}

impl Small {
    fn zeros(r: usize, c: usize) -> Self {
        Small { r, c, d: [[ZERO; MAX_BOND]; MAX_BOND] }
    }

    fn mul(&self, o: &Small) -> Small {
        debug_assert_eq!(self.c, o.r);
        let mut out = Small::zeros(self.r, o.c);
        for i in 0..self.r {
            for j in 0..o.c {
                out.d[i][j] = (0..self.c).map(|k| self.d[i][k] * o.d[k][j]).sum();
            }
        }
        out
    }

    fn adjoint(&self) -> Small {
        let mut out = Small::zeros(self.c, self.r);
        for i in 0..self.r {
            for j in 0..self.c {
                out.d[j][i] = self.d[i][j].conj();
            }
        }
        out
    }

    fn add(&self, o: &Small) -> Small {
        let mut out = *self;
        for i in 0..self.r {
            for j in 0..self.c {
                out.d[i][j] += o.d[i][j];
            }
        }
        out
    }

    fn scale(&self, s: C64) -> Small {
        let mut out = *self;
        for row in out.d.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    fn trace(&self) -> C64 {
        (0..self.r.min(self.c)).map(|i| self.d[i][i]).sum()
    }
}

#[derive(Clone, Debug)]
struct MpsSite {
    id: usize,
    t: [Small; 2],
}

#[derive(Clone, Debug)]
pub struct MpsState {
    sites: Vec<MpsSite>,
}

impl MpsState {
    pub fn new(resource: &Resource) -> Result<Self> {
        let mut sites = Vec::with_capacity(resource.size());
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        for seg in resource.segments() {
            for k in 0..seg.len {
                let left = if k == 0 { 1 } else { 2 };
                let right = if k + 1 == seg.len { 1 } else { 2 };
                let mut t = [Small::zeros(left, right), Small::zeros(left, right)];
                for (b, tb) in t.iter_mut().enumerate() {
                    for a in 0..left {
                        let col = if right == 1 { 0 } else { b };
                        let value = match seg.kind {
                            SegmentKind::Chain => {
                                let prev = if left == 1 { 0 } else { a };
                                if prev & b == 1 {
                                    -h
                                } else {
                                    h
                                }
                            }
                            SegmentKind::Ghz if k == 0 => h,
                            SegmentKind::Ghz => {
                                if a == b {
                                    ONE
                                } else {
                                    ZERO
                                }
                            }
                        };
                        tb.d[a][col] = value;
                    }
                }
                sites.push(MpsSite { id: seg.start + k, t });
            }
        }
        Ok(MpsState { sites })
    }

    /// Largest bond dimension currently held.
    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|s| s.t[0].r.max(s.t[0].c)).max().unwrap_or(1)
    }

    fn index(&self, id: usize) -> Result<usize> {
        self.sites
            .iter()
            .position(|s| s.id == id)
            .ok_or_else(|| Error::InvalidSchedule(format!("qubit {id} is not present")))
    }

    fn contract(t: &[Small; 2], v: &[C64; 2]) -> Small {
        t[0].scale(v[0].conj()).add(&t[1].scale(v[1].conj()))
    }

    pub fn marginals(&self, id: usize, basis: &[[C64; 2]; 2]) -> Result<[f64; 2]> {
        let i = self.index(id)?;
        let mut left = Small::zeros(1, 1);
        left.d[0][0] = ONE;
        for s in &self.sites[..i] {
            left = s.t[0].adjoint().mul(&left).mul(&s.t[0]).add(&s.t[1].adjoint().mul(&left).mul(&s.t[1]));
        }
        let mut right = Small::zeros(1, 1);
        right.d[0][0] = ONE;
        for s in self.sites[i + 1..].iter().rev() {
            right = s.t[0].mul(&right).mul(&s.t[0].adjoint()).add(&s.t[1].mul(&right).mul(&s.t[1].adjoint()));
        }
        Ok([0, 1].map(|m| {
            let b = Self::contract(&self.sites[i].t, &basis[m]);
            b.adjoint().mul(&left).mul(&b).mul(&right).trace().re
        }))
    }

    pub fn collapse(&mut self, id: usize, v: &[C64; 2], p: f64) -> Result<()> {
        let i = self.index(id)?;
        let b = Self::contract(&self.sites[i].t, v).scale(C64::new(1.0 / p.sqrt(), 0.0));
        self.sites.remove(i);
        if i > 0 {
            let s = &mut self.sites[i - 1];
            s.t = [s.t[0].mul(&b), s.t[1].mul(&b)];
        } else if let Some(s) = self.sites.first_mut() {
            s.t = [b.mul(&s.t[0]), b.mul(&s.t[1])];
        }
        let bond = self.max_bond();
        if bond > MAX_BOND {
            return Err(Error::Capacity(format!("bond dimension {bond} exceeds {MAX_BOND}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum State {
    Dense(DenseState),
    Mps(MpsState),
}

impl State {
    pub fn new(resource: &Resource, kind: EngineKind) -> Result<Self> {
        match kind {
            EngineKind::Dense => Ok(State::Dense(DenseState::new(resource)?)),
            EngineKind::Mps => Ok(State::Mps(MpsState::new(resource)?)),
            EngineKind::Auto if resource.size() <= 12 => Ok(State::Dense(DenseState::new(resource)?)),
            EngineKind::Auto => Ok(State::Mps(MpsState::new(resource)?)),
        }
    }

    pub fn marginals(&self, id: usize, basis: &[[C64; 2]; 2]) -> Result<[f64; 2]> {
        match self {
            State::Dense(s) => s.marginals(id, basis),
            State::Mps(s) => s.marginals(id, basis),
        }
    }

    pub fn collapse(&mut self, id: usize, v: &[C64; 2], p: f64) -> Result<()> {
        match self {
            State::Dense(s) => s.collapse(id, v, p),
            State::Mps(s) => s.collapse(id, v, p),
        }
    }
}

/// Input and outcome record of the parity side processor.
#[derive(Clone, Debug)]
pub struct SideProcessorState {
    pub x: u64,
    /// Outcome of qubit `id` at index `id - 1`, once measured.
    pub m: Vec<Option<bool>>,
}

impl SideProcessorState {
    pub fn new(x: u64, qubits: usize) -> Self {
        SideProcessorState { x, m: vec![None; qubits] }
    }

    /// `s_k = P_k . x + A_k . m`; every adaptation dependency must be recorded.
    pub fn setting(&self, q: &Qubit) -> Result<bool> {
        let mut s = (q.p_mask & self.x).count_ones() & 1 == 1;
        for &a in &q.a_ids {
            match self.m[a - 1] {
                Some(bit) => s ^= bit,
                None => {
                    return Err(Error::InvalidSchedule(format!(
                        "qubit {} queried before its dependency {a} was measured",
                        q.id
                    )))
                }
            }
        }
        Ok(s)
    }

    pub fn record(&mut self, id: usize, bit: bool) {
        self.m[id - 1] = Some(bit);
    }

    /// `y = o . m + c`.
    pub fn output(&self, s: &MeasurementSchedule) -> bool {
        s.o_ids.iter().fold(s.c, |y, &o| y ^ self.m[o - 1].unwrap_or(false))
    }
}

/// Outcomes and output of one shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shot {
    /// Outcome of qubit `id` at index `id - 1`.
    pub m: Vec<bool>,
    pub y: bool,
}

/// Measures every qubit in round order; `choose(id, marginals)` picks each outcome.
fn execute(
    s: &MeasurementSchedule,
    x: u64,
    kind: EngineKind,
    mut choose: impl FnMut(usize, [f64; 2]) -> Result<bool>,
) -> Result<(Shot, Vec<[f64; 2]>)> {
    let mut state = State::new(&s.resource, kind)?;
    let mut side = SideProcessorState::new(x, s.len());
    let mut trace = Vec::with_capacity(s.len());
    for id in s.measurement_order() {
        let q = s.qubit(id);
        let basis = basis_vectors(&q.basis, side.setting(q)?);
        let p = state.marginals(id, &basis)?;
        let m = choose(id, p)?;
        let pm = p[usize::from(m)];
        if pm <= 1e-300 {
            return Err(Error::InvalidSchedule(format!("outcome {} on qubit {id} has probability 0", u8::from(m))));
        }
        state.collapse(id, &basis[usize::from(m)], pm)?;
        side.record(id, m);
        trace.push(p);
    }
    let y = side.output(s);
    let m = side.m.into_iter().map(|b| b.unwrap_or(false)).collect();
    Ok((Shot { m, y }, trace))
}

/// One shot with outcomes sampled by the Born rule, in round order.
pub fn run_shot(s: &MeasurementSchedule, x: u64, seed: u64, kind: EngineKind) -> Result<Shot> {
    run_shot_traced(s, x, seed, kind).map(|(shot, _)| shot)
}

/// [`run_shot`] plus the marginals seen at each measurement.
pub fn run_shot_traced(s: &MeasurementSchedule, x: u64, seed: u64, kind: EngineKind) -> Result<(Shot, Vec<[f64; 2]>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    execute(s, x, kind, |_, p| Ok(rng.gen::<f64>() >= p[0]))
}

/// Marginals met along the given outcome record.
pub fn marginal_trace(s: &MeasurementSchedule, x: u64, outcomes: &[bool], kind: EngineKind) -> Result<Vec<[f64; 2]>> {
    if outcomes.len() != s.len() {
        return Err(Error::InvalidSchedule(format!("expected {} outcomes, got {}", s.len(), outcomes.len())));
    }
    execute(s, x, kind, |id, _| Ok(outcomes[id - 1])).map(|(_, t)| t)
}

/// Samples a shot on the dense engine, replays its outcomes on the MPS engine
/// and returns the largest marginal difference.
pub fn cross_engine_deviation(s: &MeasurementSchedule, x: u64, seed: u64) -> Result<f64> {
    let (shot, dense) = run_shot_traced(s, x, seed, EngineKind::Dense)?;
    let mps = marginal_trace(s, x, &shot.m, EngineKind::Mps)?;
    Ok(dense
        .iter()
        .zip(&mps)
        .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
        .fold(0.0, f64::max))
}

/// `[P(y = 0), P(y = 1)]` summed over every outcome branch on the dense engine.
pub fn exact_distribution(s: &MeasurementSchedule, x: u64) -> Result<[f64; 2]> {
    if s.len() > MAX_ENUMERATION_QUBITS {
        return Err(Error::Capacity(format!(
            "branch enumeration is capped at {MAX_ENUMERATION_QUBITS} qubits, schedule has {}",
            s.len()
        )));
    }
    let order = s.measurement_order();
    let mut out = [0.0; 2];
    let state = DenseState::new(&s.resource)?;
    let side = SideProcessorState::new(x, s.len());
    enumerate(s, &order, state, side, 1.0, &mut out)?;
    Ok(out)
}

fn enumerate(
    s: &MeasurementSchedule,
    order: &[usize],
    state: DenseState,
    side: SideProcessorState,
    weight: f64,
    out: &mut [f64; 2],
) -> Result<()> {
    let Some((&id, rest)) = order.split_first() else {
        out[usize::from(side.output(s))] += weight;
        return Ok(());
    };
    let q = s.qubit(id);
    let basis = basis_vectors(&q.basis, side.setting(q)?);
    let p = state.marginals(id, &basis)?;
    for m in [false, true] {
        let pm = p[usize::from(m)];
        if pm <= 1e-300 {
            continue;
        }
        let mut next = state.clone();
        next.collapse(id, &basis[usize::from(m)], pm)?;
        let mut side = side.clone();
        side.record(id, m);
        enumerate(s, rest, next, side, weight * pm, out)?;
    }
    Ok(())
}

/// The branch-independent single-qubit circuit of a compiled schedule.
#[derive(Clone, Debug)]
pub struct Effective {
    pub unitary: Mat2,
    /// `[P(y = 0), P(y = 1)]`, including the constant `c`.
    pub probabilities: [f64; 2],
}

impl Effective {
    pub fn success(&self, target: bool) -> f64 {
        self.probabilities[usize::from(target)]
    }
}

/// Resolves a compiled chain or nonadaptive GHZ schedule to the one-qubit
/// circuit it simulates on input `x`.
pub fn effective_circuit(s: &MeasurementSchedule, x: u64) -> Result<Effective> {
    let sign = |mask: u64, bias: bool| ((mask & x).count_ones() & 1 == 1) ^ bias;
    let unitary = if s.is_empty() {
        gates::identity()
    } else if let Some(sites) = s.chain_form() {
        sites.iter().fold(gates::identity(), |acc, &(axis, theta, bias, mask)| {
            let t = if sign(mask, bias) { -theta } else { theta };
            gates::mul(&gates::rot(axis, t), &acc)
        })
    } else if let Some(qubits) = s.ghz_form() {
        qubits.iter().fold(gates::identity(), |acc, &(theta, bias, offset, mask)| {
            let t = offset + if sign(mask, bias) { -theta } else { theta };
            gates::mul(&gates::rot(Axis::X, t), &acc)
        })
    } else {
        return Err(Error::NotCompiled);
    };
    let r = gates::readout(&unitary);
    let probabilities = if s.c { [r[1], r[0]] } else { r };
    Ok(Effective { unitary, probabilities })
}

#[derive(Clone, Debug, Serialize)]
pub struct InputReport {
    pub x: String,
    pub expected: bool,
    /// Success probability from the effective circuit.
    pub analytic: Option<f64>,
    /// Success probability from branch enumeration.
    pub exact: Option<f64>,
    pub shots: usize,
    pub correct: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub inputs: Vec<InputReport>,
    pub min_analytic: Option<f64>,
    pub min_exact: Option<f64>,
    pub empirical_rate: f64,
    /// Noncontextual bound of the target function.
    pub beta: f64,
    pub resources: ResourceReport,
}

impl SimulationReport {
    /// Every shot correct and every available exact check at least `1 - tol`.
    pub fn passed(&self, tol: f64) -> bool {
        self.inputs.iter().all(|i| {
            i.correct == i.shots
                && i.analytic.is_none_or(|p| p >= 1.0 - tol)
                && i.exact.is_none_or(|p| p >= 1.0 - tol)
        })
    }

    /// Mean success over inputs, preferring exact values over sampled ones.
    pub fn mean_success(&self) -> f64 {
        let per: Vec<f64> = self
            .inputs
            .iter()
            .map(|i| {
                i.analytic
                    .or(i.exact)
                    .unwrap_or(if i.shots == 0 { 0.0 } else { i.correct as f64 / i.shots as f64 })
            })
            .collect();
        per.iter().sum::<f64>() / per.len().max(1) as f64
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|p| format!("{p:.15}")).unwrap_or_default();
        let mut out = String::from("x,expected,analytic,exact,shots,correct\n");
        for i in &self.inputs {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                i.x,
                u8::from(i.expected),
                opt(i.analytic),
                opt(i.exact),
                i.shots,
                i.correct
            ));
        }
        out
    }
}

/// Seed for shot `k` on input `x`, drawn from stream `x` of the base seed.
pub fn shot_seeds(seed: u64, x: u64, shots: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(x);
    (0..shots).map(|_| rng.next_u64()).collect()
}

/// Checks `s` against `f` on all `2^n` inputs with every available method.
pub fn verify_protocol(
    s: &MeasurementSchedule,
    f: &BooleanFunction,
    shots: usize,
    seed: u64,
    kind: EngineKind,
) -> Result<SimulationReport> {
    if f.n() != s.arity {
        return Err(Error::ArityMismatch { expected: s.arity, got: f.n() });
    }
    let mut inputs = Vec::with_capacity(1 << s.arity);
    let mut total = 0;
    let mut good = 0;
    for x in 0..(1u64 << s.arity) {
        let expected = f.eval(x);
        let analytic = match effective_circuit(s, x) {
            Ok(e) => Some(e.success(expected)),
            Err(Error::NotCompiled) => None,
            Err(e) => return Err(e),
        };
        let exact = if s.len() <= MAX_ENUMERATION_QUBITS {
            Some(exact_distribution(s, x)?[usize::from(expected)])
        } else {
            None
        };
        let mut correct = 0;
        for seed in shot_seeds(seed, x, shots) {
            if run_shot(s, x, seed, kind)?.y == expected {
                correct += 1;
            }
        }
        total += shots;
        good += correct;
        inputs.push(InputReport { x: format_bits(x, s.arity), expected, analytic, exact, shots, correct });
    }
    let min = |v: Vec<Option<f64>>| v.into_iter().collect::<Option<Vec<f64>>>().map(|v| v.into_iter().fold(1.0, f64::min));
    Ok(SimulationReport {
        min_analytic: min(inputs.iter().map(|i| i.analytic).collect()),
        min_exact: min(inputs.iter().map(|i| i.exact).collect()),
        empirical_rate: if total == 0 { 1.0 } else { good as f64 / total as f64 },
        beta: f.nchvm_bound(),
        resources: s.resources(),
        inputs,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BellScore {
    /// Mean success of the protocol over uniform inputs.
    pub quantum: f64,
    /// `(1 + f_max) / 2` from the Walsh spectrum.
    pub beta: f64,
    /// Best agreement of any affine function, by enumeration.
    pub classical: f64,
    pub violation: bool,
}

pub fn bell_score(s: &MeasurementSchedule, f: &BooleanFunction, shots: usize, seed: u64) -> Result<BellScore> {
    let report = verify_protocol(s, f, shots, seed, EngineKind::Auto)?;
    let quantum = report.mean_success();
    let beta = report.beta;
    let classical = f.best_affine_agreement();
    let violation = quantum > beta + 1e-12;
    if report.passed(1e-9) && beta < 1.0 - 1e-12 && !violation {
        return Err(Error::Unverified { failure: 1.0 - quantum });
    }
    Ok(BellScore { quantum, beta, classical, violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::parse_bits;
    use crate::mbqc::{
        compile_pfd_to_ghz, compile_to_cluster, lift_ghz_to_cluster, mod3_protocol, modp_protocol, or_protocol,
        LcConvention,
    };
    use crate::onequbit::{Gate, OneQubitProgram};
    use crate::pfd::{solve_pfd, PeriodicDecomposition};
    use crate::qsp::synthesize_mod_p;

    fn ghz_zero(n: usize) -> MeasurementSchedule {
        let qubits = (1..=n)
            .map(|id| Qubit { id, round: 1, basis: Basis::xy(0.0, false), p_mask: 0, a_ids: vec![] })
            .collect();
        MeasurementSchedule::new(Resource::Ghz(n), 0, qubits, (1..=n).collect(), false, LcConvention::InputRows)
            .unwrap()
    }

    #[test]
    fn ghz_x_outcomes_have_even_parity() {
        let s = ghz_zero(3);
        for seed in 0..50 {
            let shot = run_shot(&s, 0, seed, EngineKind::Dense).unwrap();
            assert_eq!(shot.m.iter().filter(|&&b| b).count() % 2, 0);
            assert!(!shot.y);
        }
        assert!((exact_distribution(&s, 0).unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_schedule_outputs_c() {
        let s = MeasurementSchedule::constant(2, true);
        assert!(run_shot(&s, 3, 1, EngineKind::Mps).unwrap().y);
        assert_eq!(exact_distribution(&s, 0).unwrap(), [0.0, 1.0]);
        assert_eq!(effective_circuit(&s, 0).unwrap().probabilities, [0.0, 1.0]);
    }

    #[test]
    fn pauli_z_marginals() {
        let z = [[ONE, ZERO], [ZERO, ONE]];
        let chain = Resource::Cluster1D(5);
        for kind in [EngineKind::Dense, EngineKind::Mps] {
            let p = State::new(&chain, kind).unwrap().marginals(3, &z).unwrap();
            assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
            let p = State::new(&Resource::Ghz(4), kind).unwrap().marginals(1, &z).unwrap();
            assert!((p[0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn mod3_runs() {
        let s = mod3_protocol(4).unwrap();
        let x = crate::boolean::bits_to_index(&parse_bits("1110").unwrap());
        for seed in 0..20 {
            assert!(!run_shot(&s, x, seed, EngineKind::Mps).unwrap().y);
        }
        let one = mod3_protocol(1).unwrap();
        let f = BooleanFunction::mod_p(3, 0, 1).unwrap();
        for x in 0..2 {
            let d = exact_distribution(&one, x).unwrap();
            assert!((d[usize::from(f.eval(x))] - 1.0).abs() < 1e-10);
            assert!(cross_engine_deviation(&one, x, 7).unwrap() < 1e-12);
        }
        for n in 1..=8 {
            let s = mod3_protocol(n).unwrap();
            let f = BooleanFunction::mod_p(3, 0, n).unwrap();
            for x in 0..(1u64 << n) {
                assert!(effective_circuit(&s, x).unwrap().success(f.eval(x)) > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn identity_chain_effective() {
        let prog = OneQubitProgram::new(1, vec![]).unwrap();
        let s = compile_to_cluster(&prog).unwrap();
        let e = effective_circuit(&s, 1).unwrap();
        assert!(gates::phase_overlap(&e.unitary, &gates::identity()) > 2.0 - 1e-12);
        assert_eq!(e.success(false), 1.0);
    }

    #[test]
    fn modp_effective() {
        let angles = synthesize_mod_p(5, 0).unwrap();
        let s = modp_protocol(5, 0, 4, &angles).unwrap();
        let f = BooleanFunction::mod_p(5, 0, 4).unwrap();
        for x in 0..16 {
            assert!(effective_circuit(&s, x).unwrap().success(f.eval(x)) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn ghz_and_lift_verify() {
        let and2 = BooleanFunction::and(2).unwrap();
        let g = compile_pfd_to_ghz(&solve_pfd(&and2, None).unwrap(), false).unwrap();
        let r = verify_protocol(&g, &and2, 20, 1, EngineKind::Dense).unwrap();
        assert!(r.passed(1e-12), "{r:?}");
        assert_eq!(r.min_analytic.map(|p| p > 1.0 - 1e-12), Some(true));
        let lifted = lift_ghz_to_cluster(&g).unwrap();
        let r = verify_protocol(&lifted, &and2, 20, 1, EngineKind::Auto).unwrap();
        assert!(r.passed(1e-12));
        assert!(effective_circuit(&or_protocol(2).unwrap(), 0).is_err());
    }

    #[test]
    fn or_protocol_small() {
        let s = or_protocol(2).unwrap();
        let f = BooleanFunction::or(2).unwrap();
        let r = verify_protocol(&s, &f, 50, 3, EngineKind::Mps).unwrap();
        assert_eq!(r.empirical_rate, 1.0);
    }

    #[test]
    fn bell_scores() {
        let and2 = BooleanFunction::and(2).unwrap();
        let g = compile_pfd_to_ghz(&solve_pfd(&and2, None).unwrap(), false).unwrap();
        let b = bell_score(&g, &and2, 10, 0).unwrap();
        assert!(b.violation && (b.beta - 0.75).abs() < 1e-12 && (b.classical - 0.75).abs() < 1e-12);
        let par = BooleanFunction::parity(2).unwrap();
        let g = compile_pfd_to_ghz(&solve_pfd(&par, None).unwrap(), false).unwrap();
        let b = bell_score(&g, &par, 10, 0).unwrap();
        assert!(!b.violation && b.beta == 1.0 && b.quantum == 1.0);
    }

    #[test]
    fn seeded_shots_repeat() {
        let s = mod3_protocol(2).unwrap();
        let a = run_shot(&s, 1, 42, EngineKind::Mps).unwrap();
        let b = run_shot(&s, 1, 42, EngineKind::Mps).unwrap();
        let c = run_shot(&s, 1, 42, EngineKind::Dense).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(shot_seeds(9, 3, 4), shot_seeds(9, 3, 4));
        assert_ne!(shot_seeds(9, 3, 4), shot_seeds(9, 2, 4));
    }

    #[test]
    fn csv_has_one_row_per_input() {
        let f = BooleanFunction::mod_p(3, 0, 2).unwrap();
        let r = verify_protocol(&mod3_protocol(2).unwrap(), &f, 5, 0, EngineKind::Auto).unwrap();
        assert_eq!(r.to_csv().lines().count(), 5);
        assert_eq!(r.to_json()["resources"]["L_Q"], 13);
    }

    #[test]
    fn dense_cap() {
        assert!(DenseState::new(&Resource::Cluster1D(21)).is_err());
        assert!(exact_distribution(&mod3_protocol(3).unwrap(), 0).is_err());
        let d = PeriodicDecomposition::new(1, vec![]).unwrap();
        assert!(compile_pfd_to_ghz(&d, false).unwrap().is_empty());
        let _ = Gate::fixed(Axis::X, 0.0);
    }
}
