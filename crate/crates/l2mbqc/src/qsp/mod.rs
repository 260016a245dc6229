//! Quantum signal processing synthesis.
//!
//! A sequence `xi_1..xi_L` defines
//! `U(phi) = F(xi_L) ... F(xi_1)` with `F(xi) = R_Z(xi) R_X(phi) R_Z(xi)^dagger`,
//! so `xi_1` acts first. Writing `z = e^{i phi / 2}`, every entry of `U` is a
//! Laurent polynomial in `z` and `U = A I + i B X + i C Y + i D Z`.
//!
//! Synthesis has three steps:
//!
//! 1. Solve a linear system for the Fourier coefficients of `A` (and `B`)
//!    on a grid of signal angles ([`solve_symmetric_coeffs`], [`solve_mod_p_coeffs`]).
//! 2. Complete `A` to a unitary by factoring `1 - A^2 = |B + iC|^2` with
//!    `D = 0`, so the readout `P(0) = A^2` is fixed by `A` alone.
//! 3. Peel one rotation layer per degree ([`complete_and_extract_angles`]).
//!
//! Steps 1 to 3 run in double-double arithmetic.

mod roots;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::boolean::BooleanFunction;
use crate::dd::{self, abs, dd, f, pi, Cdd, Dd};
use crate::error::{invalid, Error, Result};
use crate::gates::{self, Mat2};
use crate::pfd::Angle;

/// Coefficients below this magnitude are treated as zero when trimming.
const COEFF_EPS: f64 = 1e-12;
/// Gate on the completion remainder `1 - A^2 - |F|^2` and on dropped layer terms.
const COMPLETION_TOL: f64 = 1e-12;
/// Functional gate used while searching sign patterns.
const FUNCTIONAL_TOL: f64 = 1e-9;

/// What a synthesized sequence computes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QspTargetSpec {
    /// `Mod_{p,j}` on the grid `4 pi (w - j) / p`.
    ModP { p: u32, j: u32 },
    /// A symmetric function given by its weight profile on the grid `pi w / (n + 1)`.
    Profile { profile: Vec<u8> },
}

/// Interpolation conditions at one signal angle.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    /// Signal angle in units of pi.
    pub phi: Angle,
    /// Required `A(phi)`.
    pub a: f64,
    /// Required `B(phi)`.
    pub b: f64,
    /// Whether `A'(phi) = B'(phi) = 0` is imposed.
    pub derivative_zero: bool,
    /// Output bit expected at this point.
    pub bit: bool,
}

/// Grid of interpolation conditions for one linear solve.
#[derive(Clone, Debug, PartialEq)]
pub struct QspTarget {
    pub l: usize,
    pub points: Vec<GridPoint>,
}

impl QspTarget {
    /// Conditions for a symmetric profile with `f(0) = 0`:
    /// `A(phi_w) = 1 - f(w)`, `B(phi_w) = f(w)`, `phi_w = pi w / (n + 1)`.
    pub fn symmetric(profile: &[bool]) -> Result<Self> {
        let n = profile.len().checked_sub(1).ok_or_else(|| invalid("empty profile"))?;
        if profile[0] {
            return Err(invalid("symmetric targets need f(0) = 0; complement the profile first"));
        }
        let points = profile
            .iter()
            .enumerate()
            .map(|(w, &bit)| GridPoint {
                phi: Angle::new(w as i64, n as i64 + 1),
                a: if bit { 0.0 } else { 1.0 },
                b: if bit { 1.0 } else { 0.0 },
                derivative_zero: true,
                bit,
            })
            .collect();
        let t = QspTarget { l: 4 * n + 1, points };
        t.validate()?;
        Ok(t)
    }

    /// The reduced mod-p system on `phi_w = 4 pi w / p`, `w = 0..=(p-1)/2`:
    /// `A(phi_w) = delta_{w,0}`, `B(phi_w) = 0`, zero derivatives.
    pub fn mod_p(p: u32) -> Result<Self> {
        check_p(p)?;
        let points = (0..=(p as i64 - 1) / 2)
            .map(|w| GridPoint {
                phi: Angle::new(4 * w, p as i64),
                a: if w == 0 { 1.0 } else { 0.0 },
                b: 0.0,
                derivative_zero: true,
                bit: w != 0,
            })
            .collect();
        let t = QspTarget { l: 2 * p as usize - 1, points };
        t.validate()?;
        Ok(t)
    }

    pub fn parity(&self) -> usize {
        self.l % 2
    }

    /// Rejects grids with two angles equal modulo `4 pi`.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                if ((a.phi - b.phi) / 4).is_integer() {
                    return Err(invalid(format!("grid angles {} pi and {} pi coincide modulo 4 pi", a.phi, b.phi)));
                }
            }
        }
        Ok(())
    }
}

fn check_p(p: u32) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(invalid(format!("p must be odd and at least 3, got {p}")));
    }
    Ok(())
}

/// `A(phi) = sum a_k cos(k phi / 2)`, `B(phi) = sum b_k sin(k phi / 2)`.
#[derive(Clone, Debug)]
pub struct LaurentPair {
    pub l: usize,
    /// `a_0..a_L`.
    pub a: Vec<f64>,
    /// `b_0..b_L`; `b_0` is always zero.
    pub b: Vec<f64>,
    /// On the symmetric path, the `B` that interpolates the grid values and
    /// derivatives. It is reported but not used by the completion.
    pub b_interpolant: Option<Vec<f64>>,
    pub target: Option<QspTargetSpec>,
    /// Whether the readout must be complemented (`f(0) = 1` targets).
    pub flip: bool,
    /// Sign chosen for each `A(phi_w) = +-1` condition, in grid order.
    pub signs: Vec<i8>,
    /// Largest absolute residual of the linear system.
    pub residual: f64,
    /// 1-norm condition estimate of the linear system.
    pub condition: f64,
    a_dd: Vec<Dd>,
    b_dd: Vec<Dd>,
}

impl LaurentPair {
    /// A pair given directly by its coefficients.
    pub fn from_coefficients(l: usize, a: &[f64], b: &[f64]) -> Result<Self> {
        let pad = |v: &[f64]| -> Result<Vec<f64>> {
            if v.len() > l + 1 {
                return Err(invalid(format!("{} coefficients exceed degree {l}", v.len())));
            }
            let mut out = v.to_vec();
            out.resize(l + 1, 0.0);
            Ok(out)
        };
        let (a, b) = (pad(a)?, pad(b)?);
        let pair = LaurentPair {
            l,
            a_dd: a.iter().map(|&x| dd(x)).collect(),
            b_dd: b.iter().map(|&x| dd(x)).collect(),
            a,
            b,
            b_interpolant: None,
            target: None,
            flip: false,
            signs: Vec::new(),
            residual: 0.0,
            condition: 1.0,
        };
        pair.check_structure()?;
        Ok(pair)
    }

    fn from_dd(l: usize, a_dd: Vec<Dd>, b_dd: Vec<Dd>) -> Self {
        LaurentPair {
            l,
            a: a_dd.iter().map(|x| f(*x)).collect(),
            b: b_dd.iter().map(|x| f(*x)).collect(),
            a_dd,
            b_dd,
            b_interpolant: None,
            target: None,
            flip: false,
            signs: Vec::new(),
            residual: 0.0,
            condition: 1.0,
        }
    }

    /// Degree bound, parity, and `b_0 = 0`.
    pub fn check_structure(&self) -> Result<()> {
        if self.a.len() != self.l + 1 || self.b.len() != self.l + 1 {
            return Err(invalid("coefficient vectors must have length L + 1"));
        }
        for k in 0..=self.l {
            if k % 2 != self.l % 2 && (self.a[k] != 0.0 || self.b[k] != 0.0) {
                return Err(invalid(format!("coefficient {k} violates the parity of L = {}", self.l)));
            }
        }
        if self.b[0] != 0.0 {
            return Err(invalid("b_0 must vanish"));
        }
        Ok(())
    }

    pub fn eval_a(&self, phi: f64) -> f64 {
        self.a.iter().enumerate().map(|(k, c)| c * (k as f64 * phi / 2.0).cos()).sum()
    }

    pub fn eval_b(&self, phi: f64) -> f64 {
        self.b.iter().enumerate().map(|(k, c)| c * (k as f64 * phi / 2.0).sin()).sum()
    }

    pub fn eval_a_derivative(&self, phi: f64) -> f64 {
        self.a.iter().enumerate().map(|(k, c)| -c * k as f64 / 2.0 * (k as f64 * phi / 2.0).sin()).sum()
    }

    /// Largest `k` with `|a_k| > 1e-12`.
    pub fn effective_degree(&self) -> usize {
        (0..=self.l).rev().find(|&k| self.a[k].abs() > COEFF_EPS).unwrap_or(0)
    }

    /// `min (1 - A^2 - B^2)` over `samples` points of the circle.
    pub fn feasibility_margin(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| {
                let phi = 4.0 * std::f64::consts::PI * i as f64 / samples as f64;
                1.0 - self.eval_a(phi).powi(2) - self.eval_b(phi).powi(2)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn grid_theta(phi: Angle) -> Dd {
    pi() * (*phi.numer() as f64) / (2.0 * *phi.denom() as f64)
}

/// Rows `cos(k theta)` / `-k sin(k theta)` for `A`, `sin(k theta)` / `k cos(k theta)`
/// for `B`, over the odd or even harmonics `k <= L`; rows that vanish
/// identically are dropped and their targets must be zero.
fn assemble(
    target: &QspTarget,
    a_values: &[f64],
) -> Result<(Vec<usize>, Vec<Vec<Dd>>, Vec<Dd>, Vec<Vec<Dd>>, Vec<Dd>)> {
    let ks: Vec<usize> = (0..=target.l).filter(|k| k % 2 == target.parity()).collect();
    let (mut ma, mut ra, mut mb, mut rb) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (pt, &av) in target.points.iter().zip(a_values) {
        let theta = grid_theta(pt.phi);
        let trig: Vec<(Dd, Dd)> = ks.iter().map(|&k| dd::cos_sin(theta * k as f64)).collect();
        let zero_angle = pt.phi.is_zero();
        ma.push(trig.iter().map(|t| t.0).collect());
        ra.push(dd(av));
        if zero_angle {
            if pt.b != 0.0 {
                return Err(invalid("B vanishes at phi = 0 and cannot take a nonzero value there"));
            }
        } else {
            mb.push(trig.iter().map(|t| t.1).collect());
            rb.push(dd(pt.b));
        }
        if pt.derivative_zero {
            if !zero_angle {
                ma.push(ks.iter().zip(&trig).map(|(&k, t)| -t.1 * k as f64).collect());
                ra.push(dd(0.0));
            }
            mb.push(ks.iter().zip(&trig).map(|(&k, t)| t.0 * k as f64).collect());
            rb.push(dd(0.0));
        }
    }
    if ma.len() != ks.len() || mb.len() != ks.len() {
        return Err(invalid(format!(
            "system is not square: {} harmonics, {} A rows, {} B rows",
            ks.len(),
            ma.len(),
            mb.len()
        )));
    }
    Ok((ks, ma, ra, mb, rb))
}

fn residual(m: &[Vec<Dd>], x: &[Dd], rhs: &[Dd]) -> f64 {
    m.iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut acc = -*r;
            for (c, v) in row.iter().zip(x) {
                acc += *c * *v;
            }
            f(acc).abs()
        })
        .fold(0.0, f64::max)
}

fn scatter(l: usize, ks: &[usize], x: &[Dd]) -> Vec<Dd> {
    let mut out = vec![dd(0.0); l + 1];
    for (&k, v) in ks.iter().zip(x) {
        out[k] = *v;
    }
    out
}

fn solve_target(target: &QspTarget, a_values: &[f64]) -> Result<LaurentPair> {
    let (ks, ma, ra, mb, rb) = assemble(target, a_values)?;
    let (xa, ca) = dd::solve(&ma, &ra)?;
    let (xb, cb) = dd::solve(&mb, &rb)?;
    let res = residual(&ma, &xa, &ra).max(residual(&mb, &xb, &rb));
    let mut pair = LaurentPair::from_dd(target.l, scatter(target.l, &ks, &xa), scatter(target.l, &ks, &xb));
    pair.residual = res;
    pair.condition = ca.max(cb);
    Ok(pair)
}

/// Coefficients for `Mod_{p,0}` with `L = 2p - 1` on the grid `4 pi w / p`.
///
/// The same coefficients serve every `j`: `Mod_{p,j}(w) = Mod_{p,0}(w - j)`,
/// so the signal angle is shifted to `4 pi (w - j) / p` (see [`verify_qsp`]).
pub fn solve_mod_p_coeffs(p: u32, j: u32) -> Result<LaurentPair> {
    check_p(p)?;
    if j >= p {
        return Err(invalid(format!("j must be below p = {p}, got {j}")));
    }
    let target = QspTarget::mod_p(p)?;
    let a_values: Vec<f64> = target.points.iter().map(|pt| pt.a).collect();
    let mut pair = solve_target(&target, &a_values)?;
    pair.target = Some(QspTargetSpec::ModP { p, j });
    pair.signs = vec![1; a_values.len()];
    Ok(pair)
}

/// Coefficients for a symmetric function with `L = 4n + 1` on `phi_w = pi w / (n + 1)`.
///
/// `A` interpolates `+-(1 - f(w))` with zero derivatives; the signs of the
/// nonzero conditions are searched in binary order (all plus first) until the
/// completion succeeds. Functions with `f(0) = 1` are synthesized as their
/// complement and flagged with `flip`.
pub fn solve_symmetric_coeffs(f: &BooleanFunction) -> Result<LaurentPair> {
    let profile = f
        .profile()
        .ok_or_else(|| invalid("QSP synthesis on the Hamming-weight grid needs a symmetric function"))?;
    solve_symmetric_profile(profile)
}

/// [`solve_symmetric_coeffs`] from a weight profile `f(0), ..., f(n)`.
pub fn solve_symmetric_profile(profile: &[bool]) -> Result<LaurentPair> {
    if profile.len() < 2 {
        return Err(invalid("profile needs at least n = 1"));
    }
    let flip = profile[0];
    let work: Vec<bool> = profile.iter().map(|&b| b ^ flip).collect();
    let target = QspTarget::symmetric(&work)?;
    let free: Vec<usize> = (1..work.len()).filter(|&w| !work[w]).collect();
    let spec = QspTargetSpec::Profile { profile: profile.iter().map(|&b| u8::from(b)).collect() };
    let mut last_err = None;
    for pattern in 0u64..(1u64 << free.len()) {
        let mut signs = vec![1i8; work.len()];
        for (i, &w) in free.iter().enumerate() {
            if pattern >> i & 1 == 1 {
                signs[w] = -1;
            }
        }
        let a_values: Vec<f64> = target.points.iter().zip(&signs).map(|(pt, &s)| pt.a * f64::from(s)).collect();
        let mut pair = solve_target(&target, &a_values)?;
        pair.b_interpolant = Some(pair.b.clone());
        pair.b = vec![0.0; pair.l + 1];
        pair.b_dd = vec![dd(0.0); pair.l + 1];
        pair.target = Some(spec.clone());
        pair.flip = flip;
        pair.signs = signs;
        if !cosh_feasible(&pair) {
            continue;
        }
        match complete_and_extract_angles(&pair) {
            Ok(angles) if verify_symmetric(&angles, profile) <= FUNCTIONAL_TOL => return Ok(pair),
            Ok(angles) => last_err = Some(Error::Unverified { failure: verify_symmetric(&angles, profile) }),
            Err(e @ (Error::RootPairing(_) | Error::Completion(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Completion("no sign pattern gives a factorable 1 - A^2".into())))
}

/// Necessary condition for the `D = 0` completion on the real axis:
/// `sum a_k cosh(k t) >= 1` for `t >= 0`, so `A = 1` is never crossed.
fn cosh_feasible(pair: &LaurentPair) -> bool {
    let deg = pair.effective_degree();
    if deg == 0 || pair.a[deg] <= 0.0 {
        return false;
    }
    (1..=800).all(|i| {
        let t = 4.0 * i as f64 / 800.0;
        let h: f64 = pair.a.iter().enumerate().map(|(k, c)| c * (k as f64 * t).cosh()).sum::<f64>() - 1.0;
        h >= -1e-9 * (deg as f64 * t).cosh()
    })
}

/// An angle sequence; `xi[0]` is `xi_1`, the first rotation applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QspAngles {
    #[serde(rename = "L")]
    pub l: usize,
    pub xi: Vec<f64>,
    /// Trailing `R_Z(xi_0)`, applied before every layer. It does not change
    /// computational-basis readout and is omitted from fixtures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    pub target: Option<QspTargetSpec>,
    /// Largest of the linear residual, completion remainder and dropped layer terms.
    pub residual: Option<f64>,
}

impl QspAngles {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let a: QspAngles = serde_json::from_str(s)?;
        if a.xi.len() != a.l {
            return Err(invalid(format!("L = {} but {} angles given", a.l, a.xi.len())));
        }
        Ok(a)
    }

    /// Output flip implied by the target (`f(0) = 1` profiles).
    pub fn flip(&self) -> bool {
        matches!(&self.target, Some(QspTargetSpec::Profile { profile }) if profile.first() == Some(&1))
    }

    /// Worst failure probability on the target's own grid, for inputs up to weight `n`.
    pub fn failure(&self, n: usize) -> Result<f64> {
        match &self.target {
            Some(QspTargetSpec::ModP { p, j }) => Ok(verify_qsp(self, *p, *j, n)),
            Some(QspTargetSpec::Profile { profile }) => {
                let bits: Vec<bool> = profile.iter().map(|&b| b != 0).collect();
                Ok(verify_symmetric(self, &bits))
            }
            None => Err(invalid("angles carry no target")),
        }
    }
}

type DdMat = [[Cdd; 2]; 2];

fn dmat_zero() -> DdMat {
    [[Cdd::zero(); 2]; 2]
}

fn dmat_mul(a: &DdMat, b: &DdMat) -> DdMat {
    let mut out = dmat_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dmat_add(a: &mut DdMat, b: &DdMat) {
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] += b[i][j];
        }
    }
}

fn dmat_norm(a: &DdMat) -> f64 {
    a.iter().flatten().map(|z| f(abs(*z)).powi(2)).sum::<f64>().sqrt()
}

/// Completion of `A` with `D = 0`: returns `F = B + iC` as Laurent
/// coefficients on `z^-d..z^d` and the completion remainder.
fn complete_keep_a(pair: &LaurentPair, d: usize) -> Result<(Vec<Cdd>, f64)> {
    let a_lp: Vec<Dd> = (0..=2 * d)
        .map(|i| {
            let k = (i as i64 - d as i64).unsigned_abs() as usize;
            if k == 0 {
                pair.a_dd[0]
            } else {
                pair.a_dd[k] / 2.0
            }
        })
        .collect();
    // R = 1 - A^2 on z^-2d..z^2d; only even powers survive
    let mut r = vec![dd(0.0); 4 * d + 1];
    for (i, x) in a_lp.iter().enumerate() {
        for (j, y) in a_lp.iter().enumerate() {
            r[i + j] -= *x * *y;
        }
    }
    r[2 * d] += 1.0;
    let q: Vec<Cdd> = (0..=2 * d).map(|m| Cdd::new(r[2 * m], dd(0.0))).collect();
    let roots = roots::roots_with_multiplicity(&q)?;

    let mut selected: Vec<(Cdd, usize)> = Vec::new();
    for root in &roots {
        let z = dd::to_c64(root.z);
        let modulus = z.norm();
        let on_circle = (modulus - 1.0).abs() < 1e-9;
        let on_axis = z.im.abs() < 1e-9 * modulus.max(1.0);
        if on_circle || on_axis {
            if root.mult % 2 != 0 {
                let place = if on_circle { "unit circle" } else { "real axis" };
                return Err(Error::RootPairing(format!(
                    "root {z:.6} on the {place} has odd multiplicity {}",
                    root.mult
                )));
            }
            selected.push((root.z, root.mult / 2));
        } else if (modulus > 1.0 && z.im > 0.0) || (modulus < 1.0 && z.im < 0.0) {
            selected.push((root.z, root.mult));
        }
    }
    let count: usize = selected.iter().map(|s| s.1).sum();
    if count != d {
        return Err(Error::RootPairing(format!("selected {count} roots for degree {d}")));
    }

    let mut h = vec![Cdd::new(dd(1.0), dd(0.0))];
    for (z, m) in &selected {
        for _ in 0..*m {
            let mut next = vec![Cdd::zero(); h.len() + 1];
            for (k, c) in h.iter().enumerate() {
                next[k + 1] += *c;
                next[k] -= *c * *z;
            }
            h = next;
        }
    }

    // F(z) = kappa z^-d H(z^2), |kappa| = |a_d| / 2, phase aligned with the given B
    let mut fz = vec![Cdd::zero(); 2 * d + 1];
    for (m, c) in h.iter().enumerate() {
        fz[2 * m] = *c;
    }
    let mut overlap = Cdd::zero();
    for k in 1..=d {
        // B_k = b_k / (2i), B_-k = -b_k / (2i)
        let bk = Cdd::new(dd(0.0), -pair.b_dd[k] / 2.0);
        overlap = overlap + fz[d + k].conj() * bk - fz[d - k].conj() * bk;
    }
    let phase = if f(abs(overlap)) > 1e-14 { overlap / abs(overlap) } else { Cdd::new(dd(1.0), dd(0.0)) };
    let kappa = phase * (pair.a_dd[d].abs() / 2.0);
    for c in fz.iter_mut() {
        *c *= kappa;
    }

    let mut remainder: f64 = 0.0;
    for s in 0..64 {
        let phi = 4.0 * std::f64::consts::PI * (s as f64 + 0.5) / 64.0;
        let z = dd::cis(dd(phi / 2.0));
        let mut zk = dd::cis(dd(-(d as f64) * phi / 2.0));
        let (mut fv, mut av) = (Cdd::zero(), Cdd::zero());
        for (c, ac) in fz.iter().zip(&a_lp) {
            fv += *c * zk;
            av += zk * *ac;
            zk *= z;
        }
        let rem = dd(1.0) - av.re * av.re - fv.norm_sqr();
        remainder = remainder.max(f(rem).abs());
    }
    if remainder > COMPLETION_TOL {
        return Err(Error::Completion(format!("remainder 1 - A^2 - |F|^2 reaches {remainder:.3e}")));
    }
    Ok((fz, remainder))
}

/// Completes the pair to a unitary and extracts `xi_1..xi_L` (plus `xi_0`).
///
/// When the effective degree `d` of `A` is below `L`, the sequence is padded
/// with cancelling pairs `(pi, 0)` applied first, since `F(0) F(pi) = I`.
pub fn complete_and_extract_angles(pair: &LaurentPair) -> Result<QspAngles> {
    pair.check_structure()?;
    let d = pair.effective_degree();
    if !(pair.l - d).is_multiple_of(2) {
        return Err(Error::Completion(format!("degree {d} has the wrong parity for L = {}", pair.l)));
    }
    if d == 0 {
        if (pair.a[0].abs() - 1.0).abs() > COMPLETION_TOL {
            return Err(Error::Completion("a constant A must be +-1".into()));
        }
        let xi = [std::f64::consts::PI, 0.0].repeat(pair.l / 2);
        let xi0 = if pair.a[0] < 0.0 { Some(2.0 * std::f64::consts::PI) } else { None };
        return Ok(QspAngles { l: pair.l, xi, xi0, target: pair.target.clone(), residual: Some(pair.residual) });
    }
    let (fz, remainder) = complete_keep_a(pair, d)?;

    // U_k = [[A_k, -i conj(F_-k)... ]] written out per power below
    let mut u: Vec<DdMat> = (0..=2 * d)
        .map(|i| {
            let k = (i as i64 - d as i64).unsigned_abs() as usize;
            let a = if k == 0 { pair.a_dd[0] } else { pair.a_dd[k] / 2.0 };
            let a = Cdd::new(a, dd(0.0));
            let fk = fz[i];
            // B_k = i Im F_k, C_k = -i Re F_k; iB X + iC Y gives these off-diagonals
            let upper = Cdd::new(-fk.im, -fk.re);
            let lower = Cdd::new(-fk.im, fk.re);
            [[a, upper], [lower, a]]
        })
        .collect();

    let mut xis = Vec::with_capacity(d);
    let mut dropped: f64 = 0.0;
    for deg in (1..=d).rev() {
        let top = u[u.len() - 1];
        let col = if dmat_norm(&[[top[0][0], Cdd::zero()], [top[1][0], Cdd::zero()]])
            >= dmat_norm(&[[top[0][1], Cdd::zero()], [top[1][1], Cdd::zero()]])
        {
            [top[0][0], top[1][0]]
        } else {
            [top[0][1], top[1][1]]
        };
        if f(abs(col[0])) == 0.0 || f(abs(col[1])) == 0.0 {
            return Err(Error::Completion(format!("degenerate leading coefficient at degree {deg}")));
        }
        let ratio = -col[1] / col[0];
        let e = ratio / abs(ratio);
        xis.push(dd::arg(e));
        let half = Cdd::new(dd(0.5), dd(0.0));
        let off_lo = e * dd(0.5);
        let off_up = e.conj() * dd(0.5);
        let p_minus: DdMat = [[half, -off_up], [-off_lo, half]];
        let p_plus: DdMat = [[half, off_up], [off_lo, half]];
        // U' = (z^-1 P_- + z P_+) U, stored on powers -(deg+1)..(deg+1)
        let mut next = vec![dmat_zero(); 2 * deg + 3];
        for (i, m) in u.iter().enumerate() {
            dmat_add(&mut next[i], &dmat_mul(&p_minus, m));
            dmat_add(&mut next[i + 2], &dmat_mul(&p_plus, m));
        }
        let edge = dmat_norm(&next[0]).max(dmat_norm(&next[2 * deg + 2]));
        dropped = dropped.max(edge);
        if edge > COMPLETION_TOL {
            return Err(Error::Completion(format!("layer at degree {deg} leaves a term of size {edge:.3e}")));
        }
        u = next[2..=2 * deg].to_vec();
    }
    let rem = u[0];
    let xi0 = -2.0 * dd::arg(rem[0][0]);
    xis.reverse();
    let mut xi = [std::f64::consts::PI, 0.0].repeat((pair.l - d) / 2);
    xi.extend(xis);
    Ok(QspAngles {
        l: pair.l,
        xi,
        xi0: Some(xi0),
        target: pair.target.clone(),
        residual: Some(pair.residual.max(remainder).max(dropped)),
    })
}

/// `F(xi_L) ... F(xi_1) R_Z(xi_0)` at signal angle `phi`.
pub fn reconstruct_unitary(angles: &QspAngles, phi: f64) -> Mat2 {
    let layer = gates::rx(phi);
    let mut u = match angles.xi0 {
        Some(t) => gates::rz(t),
        None => gates::identity(),
    };
    for &xi in &angles.xi {
        let g = gates::mul(&gates::mul(&gates::rz(xi), &layer), &gates::rz(-xi));
        u = gates::mul(&g, &u);
    }
    u
}

/// Worst failure probability `1 - |<Mod_{p,j}(w)| U(4 pi (w - j) / p) |0>|^2` over `w = 0..=n`.
pub fn verify_qsp(angles: &QspAngles, p: u32, j: u32, n: usize) -> f64 {
    (0..=n)
        .map(|w| {
            let shift = (w as i64 - j as i64).rem_euclid(p as i64);
            let phi = 4.0 * std::f64::consts::PI * shift as f64 / p as f64;
            let bit = shift != 0;
            1.0 - gates::readout(&reconstruct_unitary(angles, phi))[usize::from(bit)]
        })
        .fold(0.0, f64::max)
}

/// Worst failure probability for a weight profile on `phi_w = pi w / (n + 1)`,
/// complementing the readout when `f(0) = 1`.
pub fn verify_symmetric(angles: &QspAngles, profile: &[bool]) -> f64 {
    let n = profile.len() - 1;
    let flip = profile[0];
    profile
        .iter()
        .enumerate()
        .map(|(w, &bit)| {
            let phi = std::f64::consts::PI * w as f64 / (n as f64 + 1.0);
            1.0 - gates::readout(&reconstruct_unitary(angles, phi))[usize::from(bit ^ flip)]
        })
        .fold(0.0, f64::max)
}

/// Synthesizes and verifies `Mod_{p,j}` angles.
pub fn synthesize_mod_p(p: u32, j: u32) -> Result<QspAngles> {
    let pair = solve_mod_p_coeffs(p, j)?;
    let angles = complete_and_extract_angles(&pair)?;
    let failure = verify_qsp(&angles, p, j, 2 * p as usize);
    if failure > FUNCTIONAL_TOL {
        return Err(Error::Unverified { failure });
    }
    Ok(angles)
}

/// Synthesizes and verifies angles for a symmetric function.
pub fn synthesize_symmetric(f: &BooleanFunction) -> Result<QspAngles> {
    let pair = solve_symmetric_coeffs(f)?;
    let angles = complete_and_extract_angles(&pair)?;
    let failure = verify_symmetric(&angles, f.profile().expect("checked by the solver"));
    if failure > FUNCTIONAL_TOL {
        return Err(Error::Unverified { failure });
    }
    Ok(angles)
}

const TABLE2_JSON: &str = include_str!("../../data/table2.json");

/// Reference five-digit `Mod_{p,0}` angles for `p = 3, 5, 7, 9`.
pub fn table2() -> Vec<QspAngles> {
    serde_json::from_str(TABLE2_JSON).expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn profile(n: usize, rule: impl Fn(usize) -> bool) -> Vec<bool> {
        (0..=n).map(rule).collect()
    }

    #[test]
    fn mod_p_system_shape() {
        let pair = solve_mod_p_coeffs(3, 0).unwrap();
        assert_eq!(pair.l, 5);
        assert!(pair.residual < 1e-12);
        let odd_sum: f64 = pair.a.iter().sum();
        assert!((odd_sum - 1.0).abs() < 1e-12);
        assert!(pair.b.iter().all(|&b| b == 0.0));
        for p in [3u32, 5, 7, 9, 11] {
            let pair = solve_mod_p_coeffs(p, 0).unwrap();
            pair.check_structure().unwrap();
            for w in 0..2 * p {
                let phi = 4.0 * PI * w as f64 / p as f64;
                let expect = if w % p == 0 { 1.0 } else { 0.0 };
                assert!((pair.eval_a(phi) - expect).abs() < 1e-10, "p={p} w={w}");
            }
            assert!(pair.feasibility_margin(2048) > -1e-12);
        }
        assert!(solve_mod_p_coeffs(4, 0).is_err());
        assert!(solve_mod_p_coeffs(5, 5).is_err());
    }

    #[test]
    fn symmetric_system_values() {
        let f = BooleanFunction::mod_p(3, 0, 3).unwrap();
        let pair = solve_symmetric_coeffs(&f).unwrap();
        assert_eq!(pair.l, 13);
        assert!(pair.residual < 1e-10);
        let prof = f.profile().unwrap();
        for w in 0..=3 {
            let phi = PI * w as f64 / 4.0;
            let expect = if prof[w] { 0.0 } else { 1.0 };
            assert!((pair.eval_a(phi).abs() - expect).abs() < 1e-10);
            assert!(pair.eval_a_derivative(phi).abs() < 1e-10);
        }
        let total: f64 = pair.a.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_n1_interpolant() {
        let pair = solve_symmetric_profile(&[false, true]).unwrap();
        assert!((pair.eval_a(0.0) - 1.0).abs() < 1e-12);
        let b = pair.b_interpolant.clone().unwrap();
        let bval: f64 = b.iter().enumerate().map(|(k, c)| c * (k as f64 * PI / 4.0).sin()).sum();
        assert!((bval - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_x_rotation() {
        let l = 5;
        let mut a = vec![0.0; l + 1];
        let mut b = vec![0.0; l + 1];
        a[l] = 1.0;
        b[l] = 1.0;
        let pair = LaurentPair::from_coefficients(l, &a, &b).unwrap();
        let angles = complete_and_extract_angles(&pair).unwrap();
        assert_eq!(angles.xi.len(), l);
        for x in &angles.xi {
            let diff = (x - angles.xi[0]).rem_euclid(2.0 * PI);
            assert!(diff < 1e-12 || 2.0 * PI - diff < 1e-12);
        }
        let u = reconstruct_unitary(&angles, 0.7);
        // A = cos, B = sin is cos + i sin X = R_X(-5 phi)
        assert!(gates::phase_overlap(&u, &gates::rx(-5.0 * 0.7)) > 2.0 - 1e-12);
    }

    #[test]
    fn own_mod_p_synthesis() {
        for p in [3u32, 5, 7, 9] {
            let angles = synthesize_mod_p(p, 0).unwrap();
            assert_eq!(angles.l as u32, 2 * p - 1);
            assert!(verify_qsp(&angles, p, 0, 20) < 1e-9, "p={p}");
            assert!(angles.residual.unwrap() < 1e-12);
        }
        let a = synthesize_mod_p(5, 2).unwrap();
        assert!(verify_qsp(&a, 5, 2, 12) < 1e-9);
    }

    #[test]
    fn reconstruction_matches_a_on_circle() {
        for p in [3u32, 5, 7, 9] {
            let pair = solve_mod_p_coeffs(p, 0).unwrap();
            let angles = complete_and_extract_angles(&pair).unwrap();
            for s in 0..1024 {
                let phi = 4.0 * PI * s as f64 / 1024.0;
                let u = reconstruct_unitary(&angles, phi);
                // strip R_Z(xi_0) to compare the Pauli components
                let v = gates::mul(&u, &gates::rz(-angles.xi0.unwrap()));
                let a = (v[0][0] + v[1][1]).re / 2.0;
                let dz = (v[0][0] - v[1][1]).im / 2.0;
                assert!((a - pair.eval_a(phi)).abs() < 1e-10, "p={p} phi={phi}");
                assert!(dz.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn table2_fixture() {
        let t = table2();
        assert_eq!(t.iter().map(|a| a.l).collect::<Vec<_>>(), vec![5, 9, 13, 17]);
        for a in &t {
            let Some(QspTargetSpec::ModP { p, j }) = a.target else { panic!() };
            assert_eq!(j, 0);
            assert!(verify_qsp(a, p, 0, 10) < 1e-10, "p={p}");
            let u = reconstruct_unitary(a, 0.0);
            assert!(gates::phase_overlap(&u, &gates::identity()) > 2.0 - 1e-12);
        }
        let p3 = &t[0];
        let u = reconstruct_unitary(p3, 4.0 * PI / 3.0);
        assert!(gates::readout(&u)[1] >= 1.0 - 1e-10);
    }

    #[test]
    fn own_angles_agree_with_fixture_functionally() {
        let fixture = &table2()[0];
        let own = synthesize_mod_p(3, 0).unwrap();
        for w in 0..=8 {
            let phi = 4.0 * PI * w as f64 / 3.0;
            let a = gates::readout(&reconstruct_unitary(fixture, phi));
            let b = gates::readout(&reconstruct_unitary(&own, phi));
            assert_eq!(a[1] > 0.5, b[1] > 0.5);
        }
    }

    #[test]
    fn symmetric_profiles_synthesize() {
        for n in 1..=5 {
            let cases = [
                profile(n, |w| w % 2 == 1),
                profile(n, |w| w == n),
                profile(n, |w| w > 0),
                profile(n, |w| (w >> 1) & 1 == 1),
                profile(n, |w| w % 3 != 0),
                profile(n, |w| w % 3 != 1),
            ];
            for prof in cases {
                let pair = solve_symmetric_profile(&prof).unwrap();
                let angles = complete_and_extract_angles(&pair).unwrap();
                assert_eq!(angles.l, 4 * n + 1);
                assert!(verify_symmetric(&angles, &prof) < 1e-9, "n={n} {prof:?}");
            }
        }
    }

    #[test]
    fn zero_profile_and_empty_sequence() {
        let empty = QspAngles { l: 0, xi: vec![], xi0: None, target: None, residual: None };
        assert_eq!(verify_symmetric(&empty, &[false, false, false]), 0.0);
        let u = reconstruct_unitary(&empty, 1.3);
        assert!(gates::unitarity_deviation(&u) < 1e-15);
    }

    #[test]
    fn grid_validation() {
        let bad = QspTarget {
            l: 3,
            points: vec![
                GridPoint { phi: Angle::new(0, 1), a: 1.0, b: 0.0, derivative_zero: true, bit: false },
                GridPoint { phi: Angle::new(4, 1), a: 0.0, b: 1.0, derivative_zero: true, bit: true },
            ],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = synthesize_mod_p(3, 1).unwrap();
        let back = QspAngles::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
        let v: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert_eq!(v["target"]["p"], 3);
        assert_eq!(v["L"], 5);
    }
}
