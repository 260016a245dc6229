//! Dense 2x2 complex matrices and the single-qubit rotations used throughout.
//!
//! Conventions: `R_X(t) = exp(-i t X / 2)`, `R_Z(t) = exp(-i t Z / 2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Rotation axis of a single-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Z,
            Axis::Z => Axis::X,
        }
    }
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
}

pub fn rz(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, -s), ZERO], [ZERO, C64::new(c, s)]]
}

pub fn rot(axis: Axis, theta: f64) -> Mat2 {
    match axis {
        Axis::X => rx(theta),
        Axis::Z => rz(theta),
    }
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

/// Frobenius norm of `U^dagger U - I`.
pub fn unitarity_deviation(u: &Mat2) -> f64 {
    let p = mul(&dagger(u), u);
    let mut acc = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            acc += (v - target).norm_sqr();
        }
    }
    acc.sqrt()
}

/// `|tr(U^dagger V)|`, equal to 2 exactly when `U` and `V` agree up to a global phase.
pub fn phase_overlap(u: &Mat2, v: &Mat2) -> f64 {
    let p = mul(&dagger(u), v);
    (p[0][0] + p[1][1]).norm()
}

/// `|<y|U|0>|^2` for `y` in {0, 1}.
pub fn readout(u: &Mat2) -> [f64; 2] {
    [u[0][0].norm_sqr(), u[1][0].norm_sqr()]
}

/// The unit vector `(cos t, sin t)` as a complex number.
pub fn cis(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rotations_are_unitary_and_compose() {
        let a = mul(&rx(0.3), &rx(0.4));
        assert!(phase_overlap(&a, &rx(0.7)) > 2.0 - 1e-14);
        assert!(unitarity_deviation(&rz(1.234)) < 1e-15);
    }

    #[test]
    fn full_turn_is_minus_identity() {
        let u = rx(2.0 * PI);
        assert!((u[0][0] + ONE).norm() < 1e-15);
    }

    #[test]
    fn pauli_conjugation_flips_rotation() {
        let x = pauli_x();
        let lhs = mul(&mul(&x, &rz(0.8)), &x);
        assert!(phase_overlap(&lhs, &rz(-0.8)) > 2.0 - 1e-14);
    }
}
