//! Measurement schedules for l2-MBQC and the compilers that produce them.
//!
//! Qubit ids are 1-based positions on the resource state. Qubit `k` is
//! measured in round `round_k` with setting bit `s_k = P_k . x + A_k . m`
//! (mod 2). An `xy` qubit measures `X(offset + (-1)^(s_k + bias) theta)`,
//! whose outcome-`m` eigenvector is `(e^{-i a/2}, (-1)^m e^{i a/2}) / sqrt 2`.
//! The output is `y = o . m + c`.
//!
//! On a 1D cluster chain, odd sites act as X rotations and even sites as Z
//! rotations of the simulated one-qubit circuit, and flipping a rotation's
//! sign by the parity of the earlier outcomes of opposite site parity
//! removes the measurement byproducts.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::boolean::BooleanFunction;
use crate::error::{invalid, Error, Result};
use crate::gates::Axis;
use crate::onequbit::{
    build_mod3_clifford, build_qsp_program, build_symmetric_program, mod3_alpha, normalize_sign_form,
    or_reduction_bank, or_reduction_width, Cond, OneQubitProgram,
};
use crate::pfd::{ghz_strategy, or_closed_form, PeriodicDecomposition};
use crate::qsp::QspAngles;

/// Entangled resource state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resource {
    Ghz(usize),
    Cluster1D(usize),
    /// Disjoint parts laid out one after another.
    Composite(Vec<Resource>),
}

/// A maximal entangled segment of the resource.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    /// First qubit id of the segment.
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    Ghz,
    Chain,
}

impl Resource {
    pub fn size(&self) -> usize {
        match self {
            Resource::Ghz(n) | Resource::Cluster1D(n) => *n,
            Resource::Composite(parts) => parts.iter().map(Resource::size).sum(),
        }
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        self.push_segments(1, &mut out);
        out
    }

    fn push_segments(&self, start: usize, out: &mut Vec<Segment>) -> usize {
        match self {
            Resource::Ghz(n) => {
                out.push(Segment { kind: SegmentKind::Ghz, start, len: *n });
                start + n
            }
            Resource::Cluster1D(n) => {
                out.push(Segment { kind: SegmentKind::Chain, start, len: *n });
                start + n
            }
            Resource::Composite(parts) => parts.iter().fold(start, |s, p| p.push_segments(s, out)),
        }
    }
}

/// An exact description of an angle, kept for audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactAngle {
    /// `num / den * pi`.
    PiRatio { num: i64, den: i64 },
    /// `mult * alpha` with `cos(alpha) = 1/sqrt(3)`.
    Alpha { mult: i64 },
}

impl ExactAngle {
    pub fn value(&self) -> f64 {
        match *self {
            ExactAngle::PiRatio { num, den } => PI * num as f64 / den as f64,
            ExactAngle::Alpha { mult } => mult as f64 * mod3_alpha(),
        }
    }

    /// Recognizes small rational multiples of pi and integer multiples of alpha.
    pub fn recognize(theta: f64) -> Option<Self> {
        for den in 1..=256i64 {
            let t = theta / PI * den as f64;
            let num = t.round();
            if ((t - num) / den as f64 * PI).abs() < 1e-12 && num.abs() < 1e6 {
                let g = gcd(num as i64, den);
                return Some(ExactAngle::PiRatio { num: num as i64 / g, den: den / g });
            }
        }
        let t = theta / mod3_alpha();
        let mult = t.round();
        if mult != 0.0 && mult.abs() <= 8.0 && ((t - mult) * mod3_alpha()).abs() < 1e-12 {
            return Some(ExactAngle::Alpha { mult: mult as i64 });
        }
        None
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for ExactAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ExactAngle::PiRatio { num, den: 1 } => write!(f, "{num} pi"),
            ExactAngle::PiRatio { num, den } => write!(f, "{num}/{den} pi"),
            ExactAngle::Alpha { mult } => write!(f, "{mult} alpha"),
        }
    }
}

impl FromStr for ExactAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid(format!("cannot parse exact angle {s:?}"));
        if let Some(r) = s.strip_suffix(" pi") {
            let (num, den) = r.split_once('/').unwrap_or((r, "1"));
            let num = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den <= 0 {
                return Err(bad());
            }
            Ok(ExactAngle::PiRatio { num, den })
        } else if let Some(r) = s.strip_suffix(" alpha") {
            Ok(ExactAngle::Alpha { mult: r.trim().parse().map_err(|_| bad())? })
        } else {
            Err(bad())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    /// Measures `X(offset + (-1)^(s + bias) theta)`.
    Xy { theta: f64, bias: bool, offset: f64, exact: Option<ExactAngle> },
    /// Pauli Z; the setting bit is unused.
    Z,
}

impl Basis {
    /// An `xy` basis with `theta >= 0`, folding a negative sign into the bias.
    pub fn xy(theta: f64, bias: bool) -> Self {
        Self::xy_offset(theta, bias, 0.0)
    }

    pub fn xy_offset(theta: f64, bias: bool, offset: f64) -> Self {
        let (theta, bias) = if theta < 0.0 { (-theta, !bias) } else { (theta, bias) };
        Basis::Xy { theta, bias, offset, exact: ExactAngle::recognize(theta) }
    }

    /// Measured angle for setting bit `s`, or `None` for Pauli Z.
    pub fn angle(&self, s: bool) -> Option<f64> {
        match self {
            Basis::Xy { theta, bias, offset, .. } => Some(offset + if s ^ bias { -theta } else { *theta }),
            Basis::Z => None,
        }
    }

    /// Whether the setting bit cannot change the measured observable.
    pub fn setting_irrelevant(&self) -> bool {
        match self {
            Basis::Xy { theta, .. } => is_pi_multiple(*theta),
            Basis::Z => true,
        }
    }
}

fn is_pi_multiple(t: f64) -> bool {
    let r = t / PI;
    (r - r.round()).abs() < 1e-12
}

#[derive(Clone, Debug, PartialEq)]
pub struct Qubit {
    pub id: usize,
    pub round: u32,
    pub basis: Basis,
    pub p_mask: u64,
    /// Earlier qubits whose outcome parity enters the setting bit.
    pub a_ids: Vec<usize>,
}

impl Qubit {
    fn pauli_z(id: usize) -> Self {
        Qubit { id, round: 1, basis: Basis::Z, p_mask: 0, a_ids: Vec::new() }
    }
}

/// How `L_C` is counted for a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LcConvention {
    /// Distinct nonzero preprocessing rows.
    #[default]
    InputRows,
    /// Distinct nonzero preprocessing rows plus one running-parity register
    /// per site parity class referenced by the adaptation.
    InputRowsAndRegisters,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSchedule {
    pub resource: Resource,
    pub arity: usize,
    /// Sorted by id, ids `1..=L_Q`.
    pub qubits: Vec<Qubit>,
    pub o_ids: Vec<usize>,
    pub c: bool,
    pub lc: LcConvention,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    #[serde(rename = "L_Q")]
    pub l_q: usize,
    #[serde(rename = "L_C")]
    pub l_c: usize,
    #[serde(rename = "T_C")]
    pub t_c: usize,
    #[serde(rename = "T_Q")]
    pub t_q: usize,
    /// `(L_Q + L_C)(T_Q + T_C)`.
    pub volume: usize,
}

impl ResourceReport {
    /// `(L_Q, L_C, T_C, T_Q)`.
    pub fn tuple(&self) -> (usize, usize, usize, usize) {
        (self.l_q, self.l_c, self.t_c, self.t_q)
    }
}

impl fmt::Display for ResourceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L_Q={} L_C={} T_C={} T_Q={} volume={}",
            self.l_q, self.l_c, self.t_c, self.t_q, self.volume
        )
    }
}

impl MeasurementSchedule {
    pub fn new(
        resource: Resource,
        arity: usize,
        qubits: Vec<Qubit>,
        o_ids: Vec<usize>,
        c: bool,
        lc: LcConvention,
    ) -> Result<Self> {
        let s = MeasurementSchedule { resource, arity, qubits, o_ids, c, lc };
        s.validate()?;
        Ok(s)
    }

    /// The constant schedule: no qubits, output `c`.
    pub fn constant(arity: usize, c: bool) -> Self {
        MeasurementSchedule {
            resource: Resource::Ghz(0),
            arity,
            qubits: Vec::new(),
            o_ids: Vec::new(),
            c,
            lc: LcConvention::InputRows,
        }
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn qubit(&self, id: usize) -> &Qubit {
        &self.qubits[id - 1]
    }

    pub fn is_adaptive(&self) -> bool {
        self.qubits.iter().any(|q| !q.a_ids.is_empty())
    }

    /// Ids ordered by round, then id.
    pub fn measurement_order(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (1..=self.len()).collect();
        ids.sort_by_key(|&id| (self.qubit(id).round, id));
        ids
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        if self.arity > 63 {
            return bad(format!("arity {} exceeds 63", self.arity));
        }
        if self.resource.size() != self.qubits.len() {
            return bad(format!(
                "resource has {} qubits but {} are scheduled",
                self.resource.size(),
                self.qubits.len()
            ));
        }
        let full = if self.arity == 0 { 0 } else { u64::MAX >> (64 - self.arity) };
        for (i, q) in self.qubits.iter().enumerate() {
            if q.id != i + 1 {
                return bad(format!("qubit ids must be 1..={} in order; found {} at position {}", self.len(), q.id, i + 1));
            }
            if q.round == 0 {
                return bad(format!("qubit {}: rounds start at 1", q.id));
            }
            if q.p_mask & !full != 0 {
                return bad(format!("qubit {}: p_mask uses bits beyond arity {}", q.id, self.arity));
            }
            match &q.basis {
                Basis::Z => {
                    if q.p_mask != 0 || !q.a_ids.is_empty() {
                        return bad(format!("qubit {}: Pauli Z qubits take no setting", q.id));
                    }
                }
                Basis::Xy { theta, offset, exact, .. } => {
                    if !theta.is_finite() || !offset.is_finite() {
                        return bad(format!("qubit {}: non-finite angle", q.id));
                    }
                    if let Some(e) = exact {
                        if (e.value() - theta).abs() > 1e-9 {
                            return bad(format!("qubit {}: exact tag {e} disagrees with theta {theta}", q.id));
                        }
                    }
                }
            }
            let mut seen = BTreeSet::new();
            for &a in &q.a_ids {
                if a == 0 || a > self.len() {
                    return bad(format!("qubit {}: adaptation references unknown qubit {a}", q.id));
                }
                if !seen.insert(a) {
                    return bad(format!("qubit {}: adaptation lists qubit {a} twice", q.id));
                }
                if self.qubit(a).round >= q.round {
                    return bad(format!(
                        "qubit {} (round {}) adapts on qubit {a} measured in round {}",
                        q.id,
                        q.round,
                        self.qubit(a).round
                    ));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for &o in &self.o_ids {
            if o == 0 || o > self.len() || !seen.insert(o) {
                return bad(format!("output mask entry {o} is unknown or repeated"));
            }
        }
        Ok(())
    }

    pub fn resources(&self) -> ResourceReport {
        let l_q = self.len();
        let rows: BTreeSet<u64> = self.qubits.iter().map(|q| q.p_mask).filter(|&m| m != 0).collect();
        let mut l_c = rows.len();
        if self.lc == LcConvention::InputRowsAndRegisters {
            let classes: BTreeSet<usize> = self.qubits.iter().flat_map(|q| q.a_ids.iter().map(|a| a % 2)).collect();
            l_c += classes.len();
        }
        let t_c = self.qubits.iter().map(|q| q.round as usize).max().unwrap_or(0);
        let t_q = if l_q > 0 { 3 } else { 0 };
        ResourceReport { l_q, l_c, t_c, t_q, volume: (l_q + l_c) * (t_q + t_c) }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ScheduleJson::from(self)).expect("plain data")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ScheduleJson::from(self)).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: ScheduleJson = serde_json::from_value(v.clone())?;
        raw.try_into()
    }

    /// Parses schedule JSON; syntax errors carry line and column.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ScheduleJson = serde_json::from_str(s)?;
        raw.try_into()
    }

    /// For a cluster chain in compiled form, the rotation sequence
    /// `(axis, theta, bias, p_mask)` of the simulated one-qubit circuit.
    ///
    /// Compiled form: one `Cluster1D` segment of odd length, all `xy` with zero
    /// offset, each adaptation row either the full opposite-parity prefix or
    /// empty on a pi-multiple angle, and the output mask equal to the odd sites.
    pub fn chain_form(&self) -> Option<Vec<(Axis, f64, bool, u64)>> {
        let Resource::Cluster1D(len) = self.resource else { return None };
        if len % 2 == 0 {
            return None;
        }
        let odd: Vec<usize> = (1..=len).step_by(2).collect();
        let mut o = self.o_ids.clone();
        o.sort_unstable();
        if o != odd {
            return None;
        }
        let mut out = Vec::with_capacity(len);
        for q in &self.qubits {
            let Basis::Xy { theta, bias, offset, .. } = q.basis else { return None };
            if offset != 0.0 {
                return None;
            }
            let standard: Vec<usize> = (1..q.id).filter(|k| (q.id - k) % 2 == 1).collect();
            let mut a = q.a_ids.clone();
            a.sort_unstable();
            if a != standard && !(a.is_empty() && is_pi_multiple(theta)) {
                return None;
            }
            let axis = if q.id % 2 == 1 { Axis::X } else { Axis::Z };
            out.push((axis, theta, bias, q.p_mask));
        }
        Some(out)
    }

    /// For a nonadaptive GHZ schedule reading the parity of all outcomes, the
    /// `(theta, bias, offset, p_mask)` of each qubit.
    pub fn ghz_form(&self) -> Option<Vec<(f64, bool, f64, u64)>> {
        let Resource::Ghz(len) = self.resource else { return None };
        if self.is_adaptive() || self.o_ids.len() != len {
            return None;
        }
        self.qubits
            .iter()
            .map(|q| match q.basis {
                Basis::Xy { theta, bias, offset, .. } => Some((theta, bias, offset, q.p_mask)),
                Basis::Z => None,
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ResourceJson {
    #[serde(rename = "type")]
    kind: String,
    n_qubits: usize,
    #[serde(default)]
    parts: Vec<ResourceJson>,
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias: Option<u8>,
    #[serde(default, skip_serializing_if = "is_zero")]
    offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Serialize, Deserialize)]
struct QubitJson {
    id: usize,
    round: u32,
    basis: BasisJson,
    p_mask: u64,
    a_ids: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    resource: ResourceJson,
    arity: usize,
    #[serde(default)]
    lc: LcConvention,
    qubits: Vec<QubitJson>,
    o_ids: Vec<usize>,
    c: u8,
}

impl From<&Resource> for ResourceJson {
    fn from(r: &Resource) -> Self {
        match r {
            Resource::Ghz(n) => ResourceJson { kind: "ghz".into(), n_qubits: *n, parts: vec![] },
            Resource::Cluster1D(n) => ResourceJson { kind: "cluster1d".into(), n_qubits: *n, parts: vec![] },
            Resource::Composite(p) => {
                ResourceJson { kind: "composite".into(), n_qubits: r.size(), parts: p.iter().map(Into::into).collect() }
            }
        }
    }
}

impl TryFrom<ResourceJson> for Resource {
    type Error = Error;

    fn try_from(r: ResourceJson) -> Result<Self> {
        match r.kind.as_str() {
            "ghz" => Ok(Resource::Ghz(r.n_qubits)),
            "cluster1d" => Ok(Resource::Cluster1D(r.n_qubits)),
            "composite" => {
                let parts = r.parts.into_iter().map(Resource::try_from).collect::<Result<Vec<_>>>()?;
                let res = Resource::Composite(parts);
                if res.size() != r.n_qubits {
                    return Err(Error::InvalidSchedule(format!(
                        "composite declares {} qubits but its parts hold {}",
                        r.n_qubits,
                        res.size()
                    )));
                }
                Ok(res)
            }
            other => Err(Error::InvalidSchedule(format!("unknown resource type {other:?}"))),
        }
    }
}

impl From<&MeasurementSchedule> for ScheduleJson {
    fn from(s: &MeasurementSchedule) -> Self {
        let qubits = s
            .qubits
            .iter()
            .map(|q| QubitJson {
                id: q.id,
                round: q.round,
                basis: match &q.basis {
                    Basis::Xy { theta, bias, offset, exact } => BasisJson {
                        kind: "xy".into(),
                        theta: Some(*theta),
                        bias: Some(u8::from(*bias)),
                        offset: *offset,
                        exact: exact.map(|e| e.to_string()),
                    },
                    Basis::Z => BasisJson { kind: "z".into(), theta: None, bias: None, offset: 0.0, exact: None },
                },
                p_mask: q.p_mask,
                a_ids: q.a_ids.clone(),
            })
            .collect();
        ScheduleJson {
            resource: (&s.resource).into(),
            arity: s.arity,
            lc: s.lc,
            qubits,
            o_ids: s.o_ids.clone(),
            c: u8::from(s.c),
        }
    }
}

impl TryFrom<ScheduleJson> for MeasurementSchedule {
    type Error = Error;

    fn try_from(raw: ScheduleJson) -> Result<Self> {
        let mut qubits = Vec::with_capacity(raw.qubits.len());
        for q in raw.qubits {
            let basis = match q.basis.kind.as_str() {
                "z" => Basis::Z,
                "xy" => {
                    let theta = q
                        .basis
                        .theta
                        .ok_or_else(|| Error::InvalidSchedule(format!("qubit {}: xy basis without theta", q.id)))?;
                    let exact = q.basis.exact.as_deref().map(ExactAngle::from_str).transpose()?;
                    Basis::Xy { theta, bias: q.basis.bias.unwrap_or(0) != 0, offset: q.basis.offset, exact }
                }
                other => return Err(Error::InvalidSchedule(format!("qubit {}: unknown basis {other:?}", q.id))),
            };
            qubits.push(Qubit { id: q.id, round: q.round, basis, p_mask: q.p_mask, a_ids: q.a_ids });
        }
        qubits.sort_by_key(|q| q.id);
        MeasurementSchedule::new(raw.resource.try_into()?, raw.arity, qubits, raw.o_ids, raw.c != 0, raw.lc)
    }
}

/// One site of a compiled chain.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Site {
    theta: f64,
    bias: bool,
    mask: u64,
}

/// Rotation sequence of `prog` laid out on chain sites: alternating X/Z
/// starting and ending with X, leading and trailing Z rotations dropped, the
/// fixed rotations of each commuting run merged into one site at its end.
fn chain_sites(prog: &OneQubitProgram) -> Result<Vec<Site>> {
    prog.validate()?;
    let norm = normalize_sign_form(prog);
    let first = norm.gates.iter().position(|g| g.axis == Axis::X);
    let last = norm.gates.iter().rposition(|g| g.axis == Axis::X);
    let zero = Site { theta: 0.0, bias: false, mask: 0 };
    let (Some(first), Some(last)) = (first, last) else {
        return Ok(vec![zero; 3]);
    };
    let gates = &norm.gates[first..=last];

    let mut sites: Vec<Site> = Vec::new();
    let mut i = 0;
    while i < gates.len() {
        let axis = gates[i].axis;
        let mut fixed: Option<f64> = None;
        let mut signed: Vec<Site> = Vec::new();
        while i < gates.len() && gates[i].axis == axis {
            let g = gates[i];
            match g.cond {
                Cond::None => *fixed.get_or_insert(0.0) += g.theta,
                Cond::Sign { mask: 0, bias } => *fixed.get_or_insert(0.0) += if bias { -g.theta } else { g.theta },
                Cond::Sign { mask, bias } => {
                    let (theta, bias) = if g.theta < 0.0 { (-g.theta, !bias) } else { (g.theta, bias) };
                    signed.push(Site { theta, bias, mask });
                }
                Cond::Select { .. } => unreachable!("sign form has no select gates"),
            }
            i += 1;
        }
        if let Some(t) = fixed {
            signed.push(Site { theta: t.abs(), bias: t < 0.0, mask: 0 });
        }
        let expected = if sites.len().is_multiple_of(2) { Axis::X } else { Axis::Z };
        if axis != expected {
            return Err(invalid("program cannot be laid out on alternating chain sites"));
        }
        for (k, s) in signed.into_iter().enumerate() {
            if k > 0 {
                sites.push(Site { theta: 0.0, bias: false, mask: 0 });
            }
            sites.push(s);
        }
    }
    if sites.len() == 1 {
        sites.extend([zero; 2]);
    }
    Ok(sites)
}

/// Qubits of a chain segment whose first site has id `start`, with the
/// standard adaptation (dropped on pi-multiple angles). Rounds are left at 1.
fn chain_qubits(sites: &[Site], start: usize) -> Vec<Qubit> {
    sites
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let id = start + i;
            let basis = Basis::xy(s.theta, s.bias);
            let a_ids = if basis.setting_irrelevant() {
                Vec::new()
            } else {
                (0..i).filter(|k| (i - k) % 2 == 1).map(|k| start + k).collect()
            };
            Qubit { id, round: 1, basis, p_mask: s.mask, a_ids }
        })
        .collect()
}

/// Each qubit's round becomes one more than the latest round it adapts on.
fn assign_rounds(qubits: &mut [Qubit]) {
    for i in 0..qubits.len() {
        let r = qubits[i].a_ids.iter().map(|&a| qubits[a - 1].round).max().unwrap_or(0) + 1;
        qubits[i].round = r;
    }
}

/// Cluster-chain schedule simulating `prog`; the output is the parity of the
/// odd sites.
pub fn compile_to_cluster(prog: &OneQubitProgram) -> Result<MeasurementSchedule> {
    let sites = chain_sites(prog)?;
    let mut qubits = chain_qubits(&sites, 1);
    assign_rounds(&mut qubits);
    let o_ids = (1..=qubits.len()).step_by(2).collect();
    MeasurementSchedule::new(Resource::Cluster1D(qubits.len()), prog.n, qubits, o_ids, false, LcConvention::InputRows)
}

/// Gives every chain site the full opposite-parity adaptation row, undoing
/// the pi-multiple exemption, and reassigns rounds.
pub fn with_full_adaptation(s: &MeasurementSchedule) -> Result<MeasurementSchedule> {
    if s.chain_form().is_none() {
        return Err(Error::NotCompiled);
    }
    let mut out = s.clone();
    for q in &mut out.qubits {
        q.a_ids = (1..q.id).filter(|k| (q.id - k) % 2 == 1).collect();
    }
    assign_rounds(&mut out.qubits);
    out.validate()?;
    Ok(out)
}

/// Nonadaptive GHZ schedule: qubit `j` measures `X(0)` or `X(pi phi_j)`
/// selected by `p_j . x`, written as offset `pi phi_j / 2` plus a signed half.
pub fn compile_pfd_to_ghz(d: &PeriodicDecomposition, f0: bool) -> Result<MeasurementSchedule> {
    let strategy = ghz_strategy(d, f0)?;
    let qubits: Vec<Qubit> = strategy
        .qubits
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let half = PI * q.phi.to_f64().expect("small rational") / 2.0;
            Qubit { id: i + 1, round: 1, basis: Basis::xy_offset(half, true, half), p_mask: q.mask, a_ids: vec![] }
        })
        .collect();
    let n = qubits.len();
    MeasurementSchedule::new(Resource::Ghz(n), d.n, qubits, (1..=n).collect(), f0, LcConvention::InputRows)
}

/// Runs a nonadaptive GHZ schedule on a `(2N + 1)`-site chain: even sites are
/// measured in the Pauli X basis first, odd site `2k - 1` carries GHZ qubit
/// `k`'s signed part, and the last site carries the summed offsets.
pub fn lift_ghz_to_cluster(s: &MeasurementSchedule) -> Result<MeasurementSchedule> {
    let parts = s.ghz_form().ok_or_else(|| invalid("lift needs a nonadaptive GHZ schedule reading all outcomes"))?;
    let mut sites = Vec::with_capacity(2 * parts.len() + 1);
    let mut total = 0.0;
    for &(theta, bias, offset, mask) in &parts {
        sites.push(Site { theta, bias, mask });
        sites.push(Site { theta: 0.0, bias: false, mask: 0 });
        total += offset;
    }
    sites.push(Site { theta: total.abs(), bias: total < 0.0, mask: 0 });
    let mut qubits = chain_qubits(&sites, 1);
    assign_rounds(&mut qubits);
    let len = qubits.len();
    MeasurementSchedule::new(
        Resource::Cluster1D(len),
        s.arity,
        qubits,
        (1..=len).step_by(2).collect(),
        s.c,
        LcConvention::InputRows,
    )
}

/// Constant-round chain protocol for `Mod_{3,0}` on `4n + 5` qubits.
pub fn mod3_protocol(n: usize) -> Result<MeasurementSchedule> {
    let mut s = compile_to_cluster(&build_mod3_clifford(n)?.program)?;
    s.lc = LcConvention::InputRowsAndRegisters;
    Ok(s)
}

/// Chain protocol for `Mod_{p,j}` from verified QSP angles, on
/// `(4p - 2)(n + 1) - 1` qubits in `4p - 2` rounds.
pub fn modp_protocol(p: u32, j: u32, n: usize, angles: &QspAngles) -> Result<MeasurementSchedule> {
    let mut s = compile_to_cluster(&build_qsp_program(p, j, n, angles)?)?;
    s.lc = LcConvention::InputRowsAndRegisters;
    Ok(s)
}

/// Chain protocol for a symmetric function from its QSP angles.
pub fn qsp_symmetric_protocol(f: &BooleanFunction, angles: &QspAngles) -> Result<MeasurementSchedule> {
    compile_to_cluster(&build_symmetric_program(f, angles)?)
}

/// `OR_n` on one chain cut by Pauli Z measurements into `kappa` counter
/// blocks of `2n + 1` sites (block `mu` realizes `R_X(2 pi |x| / 2^mu)`) and a
/// lifted GHZ tail of `2^(kappa+1) - 1` sites computing `OR_kappa` of the
/// counter bits. A Z-measured cut flips the outcomes of its neighbours, so
/// each counter bit is the parity of its block's odd sites and the adjacent
/// cuts.
pub fn or_protocol(n: usize) -> Result<MeasurementSchedule> {
    let kappa = or_reduction_width(n);
    let mut qubits: Vec<Qubit> = Vec::new();
    let mut counter: Vec<BTreeSet<usize>> = Vec::with_capacity(kappa);
    let mut prev_cut: Option<usize> = None;
    for prog in or_reduction_bank(n)? {
        let start = qubits.len() + 1;
        let block = chain_qubits(&chain_sites(&prog)?, start);
        let mut bit: BTreeSet<usize> = block.iter().map(|q| q.id).filter(|id| (id - start).is_multiple_of(2)).collect();
        qubits.extend(block);
        let cut = qubits.len() + 1;
        qubits.push(Qubit::pauli_z(cut));
        toggle(&mut bit, cut);
        if let Some(c) = prev_cut {
            toggle(&mut bit, c);
        }
        prev_cut = Some(cut);
        counter.push(bit);
    }

    let d = or_closed_form(kappa)?;
    let support = d.support();
    let start = qubits.len() + 1;
    let mut sites = Vec::with_capacity(2 * support.len() + 1);
    let mut total = 0.0;
    for (_, phi) in &support {
        let half = PI * phi.to_f64().expect("small rational") / 2.0;
        sites.push(Site { theta: half.abs(), bias: half >= 0.0, mask: 0 });
        sites.push(Site { theta: 0.0, bias: false, mask: 0 });
        total += half;
    }
    sites.push(Site { theta: total.abs(), bias: total < 0.0, mask: 0 });
    let mut tail = chain_qubits(&sites, start);
    for (k, (mask, _)) in support.iter().enumerate() {
        let q = &mut tail[2 * k];
        let mut row: BTreeSet<usize> = q.a_ids.iter().copied().collect();
        for (mu, bits) in counter.iter().enumerate() {
            if mask >> mu & 1 == 1 {
                for &id in bits {
                    toggle(&mut row, id);
                }
            }
        }
        q.a_ids = row.into_iter().collect();
    }
    let mut o: BTreeSet<usize> = tail.iter().map(|q| q.id).filter(|id| (id - start).is_multiple_of(2)).collect();
    if let Some(c) = prev_cut {
        toggle(&mut o, c);
    }
    qubits.extend(tail);
    assign_rounds(&mut qubits);
    let len = qubits.len();
    MeasurementSchedule::new(
        Resource::Cluster1D(len),
        n,
        qubits,
        o.into_iter().collect(),
        false,
        LcConvention::InputRowsAndRegisters,
    )
}

/// `2 kappa (n + 1) + 2^(kappa + 1) - 1` for the counter width used here.
pub fn or_protocol_size(n: usize) -> usize {
    let kappa = or_reduction_width(n);
    2 * kappa * (n + 1) + (1 << (kappa + 1)) - 1
}

fn toggle(set: &mut BTreeSet<usize>, id: usize) {
    if !set.remove(&id) {
        set.insert(id);
    }
}
