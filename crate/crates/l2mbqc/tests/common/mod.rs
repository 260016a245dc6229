//! Instance generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use l2mbqc::gates::{self, Axis};
use l2mbqc::mbqc::{Basis, LcConvention, MeasurementSchedule, Qubit, Resource};
use rand::Rng;

/// Nonadaptive GHZ(N) schedule at the given angles; output is the parity of all outcomes.
pub fn ghz_schedule(angles: &[f64]) -> MeasurementSchedule {
    let n = angles.len();
    let qubits = angles
        .iter()
        .enumerate()
        .map(|(k, &a)| Qubit { id: k + 1, round: 1, basis: Basis::xy(a, false), p_mask: 0, a_ids: vec![] })
        .collect();
    MeasurementSchedule::new(Resource::Ghz(n), 0, qubits, (1..=n).collect(), false, LcConvention::InputRows)
        .expect("valid GHZ schedule")
}

/// `P(y = 1)` of the commuting circuit `prod_k R_X(a_k) |0>`.
pub fn commuting_p1(angles: &[f64]) -> f64 {
    let u = angles.iter().fold(gates::identity(), |acc, &a| gates::mul(&gates::rx(a), &acc));
    gates::readout(&u)[1]
}

/// Chain of `angles.len()` sites where odd sites rotate about X and even sites
/// about Z; site `j` adapts on every earlier site of the other parity. The
/// output matches [`alternating_p1`] only for an odd number of sites.
pub fn chain_schedule(angles: &[f64]) -> MeasurementSchedule {
    let n = angles.len();
    let mut qubits: Vec<Qubit> = Vec::with_capacity(n);
    for (k, &a) in angles.iter().enumerate() {
        let id = k + 1;
        let a_ids: Vec<usize> = (1..id).filter(|i| (i + id) % 2 == 1).collect();
        let round = a_ids.iter().map(|&i| qubits[i - 1].round).max().unwrap_or(0) + 1;
        qubits.push(Qubit { id, round, basis: Basis::xy(a, false), p_mask: 0, a_ids });
    }
    MeasurementSchedule::new(Resource::Cluster1D(n), 0, qubits, (1..=n).step_by(2).collect(), false, LcConvention::InputRows)
        .expect("valid chain schedule")
}

/// `P(y = 1)` of `... R_Z(a_2) R_X(a_1) |0>`.
pub fn alternating_p1(angles: &[f64]) -> f64 {
    let u = angles.iter().enumerate().fold(gates::identity(), |acc, (k, &a)| {
        let axis = if k % 2 == 0 { Axis::X } else { Axis::Z };
        gates::mul(&gates::rot(axis, a), &acc)
    });
    gates::readout(&u)[1]
}

pub fn random_angles(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-PI..PI)).collect()
}
