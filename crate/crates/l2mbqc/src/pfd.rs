//! Periodic Fourier decompositions.
//!
//! A decomposition assigns an angle `phi_p` (in units of pi) to every nonzero
//! mask `p` so that `cos(pi sum_p (p.x) phi_p) = (-1)^(f(x) + f(0))`, where
//! `p.x` is the parity of `p & x` taken as the integer 0 or 1.
//!
//! Rows and columns of the Sierpinski matrix are indexed by the nonzero masks
//! in increasing integer order.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::boolean::BooleanFunction;
use crate::error::{invalid, Error, Result};

/// Rational in units of pi.
pub type Angle = Ratio<i64>;

/// Largest arity handled by the Sierpinski system.
pub const MAX_PFD_ARITY: usize = 6;

fn parity(x: u64) -> i64 {
    i64::from(x.count_ones() & 1)
}

/// `M_{y,p} = 2^(|y|-1) chi(p & y)` and its closed-form inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SierpinskiSystem {
    pub n: usize,
    pub m: Vec<Vec<i64>>,
    pub m_inv: Vec<Vec<Angle>>,
}

impl SierpinskiSystem {
    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Exact product `M * M_inv`.
    pub fn product(&self) -> Vec<Vec<Angle>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).fold(Angle::zero(), |acc, k| acc + self.m_inv[k][j] * self.m[i][k]))
                    .collect()
            })
            .collect()
    }
}

fn check_pfd_arity(n: usize) -> Result<()> {
    if !(1..=MAX_PFD_ARITY).contains(&n) {
        return Err(Error::ArityCap { n, cap: MAX_PFD_ARITY });
    }
    Ok(())
}

pub fn sierpinski_matrix(n: usize) -> Result<SierpinskiSystem> {
    check_pfd_arity(n)?;
    let full = (1u64 << n) - 1;
    let masks: Vec<u64> = (1..=full).collect();
    let m = masks
        .iter()
        .map(|&y| {
            masks
                .iter()
                .map(|&p| if p & y != 0 { 1i64 << (y.count_ones() - 1) } else { 0 })
                .collect()
        })
        .collect();
    let m_inv = masks
        .iter()
        .map(|&p| {
            masks
                .iter()
                .map(|&y| {
                    if p | y != full {
                        return Angle::zero();
                    }
                    let sign = if parity(p & y) == 1 { 1 } else { -1 };
                    Angle::new(sign, 1i64 << (y.count_ones() - 1))
                })
                .collect()
        })
        .collect();
    Ok(SierpinskiSystem { n, m, m_inv })
}

/// A periodic Fourier decomposition with angles in units of pi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicDecomposition {
    pub n: usize,
    /// `(mask, phi)` pairs sorted by mask; masks are nonzero and distinct.
    pub angles: Vec<(u64, Angle)>,
}

impl PeriodicDecomposition {
    pub fn new(n: usize, mut angles: Vec<(u64, Angle)>) -> Result<Self> {
        angles.sort_by_key(|(m, _)| *m);
        let full = (1u64 << n) - 1;
        for w in angles.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(invalid(format!("mask {} appears twice", w[0].0)));
            }
        }
        if let Some((m, _)) = angles.iter().find(|(m, _)| *m == 0 || *m & !full != 0) {
            return Err(invalid(format!("mask {m} is not a nonzero {n}-bit mask")));
        }
        Ok(PeriodicDecomposition { n, angles })
    }

    pub fn angle(&self, mask: u64) -> Angle {
        self.angles
            .binary_search_by_key(&mask, |(m, _)| *m)
            .map(|i| self.angles[i].1)
            .unwrap_or_else(|_| Angle::zero())
    }

    /// `sum_p (p.x) phi_p`, exactly.
    pub fn phase(&self, x: u64) -> Angle {
        self.angles
            .iter()
            .filter(|(m, _)| parity(m & x) == 1)
            .fold(Angle::zero(), |acc, (_, a)| acc + a)
    }

    /// Masks whose angle is not a multiple of 2.
    pub fn support(&self) -> Vec<(u64, Angle)> {
        self.angles
            .iter()
            .filter(|(_, a)| !(*a / 2).is_integer())
            .copied()
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let angles: Vec<AngleJson> = self
            .angles
            .iter()
            .map(|(m, a)| AngleJson { mask: *m, num: *a.numer(), den: *a.denom() })
            .collect();
        serde_json::to_value(DecompositionJson { n: self.n, angles }).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: DecompositionJson = serde_json::from_value(v.clone())?;
        let angles = raw
            .angles
            .into_iter()
            .map(|a| {
                if a.den == 0 {
                    return Err(invalid("zero denominator"));
                }
                Ok((a.mask, Angle::new(a.num, a.den)))
            })
            .collect::<Result<_>>()?;
        Self::new(raw.n, angles)
    }
}

#[derive(Serialize, Deserialize)]
struct AngleJson {
    mask: u64,
    num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    n: usize,
    angles: Vec<AngleJson>,
}

/// Solves `phi = M_inv (a + k)` where `a` is the ANF coefficient vector over
/// nonzero masks and `k` is an even integer vector (all zeros when `None`).
pub fn solve_pfd(f: &BooleanFunction, k: Option<&[i64]>) -> Result<PeriodicDecomposition> {
    let sys = sierpinski_matrix(f.n())?;
    let d = sys.dim();
    let zeros = vec![0; d];
    let k = k.unwrap_or(&zeros);
    if k.len() != d {
        return Err(invalid(format!("offset vector has {} entries, expected {d}", k.len())));
    }
    if let Some(v) = k.iter().find(|v| *v % 2 != 0) {
        return Err(invalid(format!("offsets must be even integers, found {v}")));
    }
    let anf = f.anf();
    let rhs: Vec<i64> = (1..=d as u64).zip(k).map(|(y, k)| i64::from(anf.contains(y)) + k).collect();
    let angles = (0..d)
        .map(|p| {
            let phi = (0..d).fold(Angle::zero(), |acc, y| acc + sys.m_inv[p][y] * rhs[y]);
            (p as u64 + 1, phi)
        })
        .collect();
    PeriodicDecomposition::new(f.n(), angles)
}

/// Outcome of [`verify_pfd`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PfdCheck {
    pub ok: bool,
    pub max_residual: f64,
}

pub fn verify_pfd(f: &BooleanFunction, d: &PeriodicDecomposition) -> Result<PfdCheck> {
    if f.n() != d.n {
        return Err(Error::ArityMismatch { expected: f.n(), got: d.n });
    }
    let f0 = f.eval(0);
    let mut max_residual: f64 = 0.0;
    for x in 0..(1u64 << f.n()) {
        let target = if f.eval(x) ^ f0 { -1.0 } else { 1.0 };
        let phase = d.phase(x).to_f64().expect("small rational");
        max_residual = max_residual.max(((std::f64::consts::PI * phase).cos() - target).abs());
    }
    Ok(PfdCheck { ok: max_residual < 1e-9, max_residual })
}

/// Non-integer count of the canonical solution and, per mask, whether
/// `2^(n-1) phi_p` is an odd integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityCertificate {
    pub n: usize,
    pub non_integer_count: usize,
    /// `(mask, odd_integer_flag)` for every nonzero mask.
    pub odd_integer: Vec<(u64, bool)>,
    /// Whether the full-mask ANF coefficient is 1, so every flag must hold.
    pub full_degree: bool,
}

impl SparsityCertificate {
    /// True when every entry is certified non-integral for all even offsets.
    pub fn is_maximal(&self) -> bool {
        self.odd_integer.iter().all(|(_, b)| *b)
    }
}

pub fn sparsity_certificate(f: &BooleanFunction) -> Result<SparsityCertificate> {
    let d = solve_pfd(f, None)?;
    let scale = Angle::from_integer(1i64 << (f.n() - 1));
    let odd_integer = d
        .angles
        .iter()
        .map(|(m, a)| {
            let s = a * scale;
            (*m, s.is_integer() && s.to_integer().rem_euclid(2) == 1)
        })
        .collect();
    let full = (1u64 << f.n()) - 1;
    Ok(SparsityCertificate {
        n: f.n(),
        non_integer_count: d.angles.iter().filter(|(_, a)| !a.is_integer()).count(),
        odd_integer,
        full_degree: f.anf().contains(full),
    })
}

/// Closed-form decomposition of `OR_n`: `phi_S = -1/2^(n-1)` for every
/// proper nonempty `S` and `phi_[n] = (2^n - 1)/2^(n-1)`.
///
/// Every nonzero `x` has odd overlap with exactly `2^(n-1)` masks, so the
/// phase is `-1` when `|x|` is even and `+1` when it is odd.
pub fn or_closed_form(n: usize) -> Result<PeriodicDecomposition> {
    if n == 0 || n > 62 {
        return Err(invalid("OR closed form needs 1 <= n <= 62"));
    }
    let full = (1u64 << n) - 1;
    let den = 1i64 << (n - 1);
    let angles = (1..=full)
        .map(|s| {
            let num = if s == full { (1i64 << n) - 1 } else { -1 };
            (s, Angle::new(num, den))
        })
        .collect();
    PeriodicDecomposition::new(n, angles)
}

/// One GHZ qubit: it measures `X(0)` or `X(pi phi)` selected by `mask . x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzQubit {
    pub mask: u64,
    pub phi: Angle,
}

/// Parameters of the nonadaptive GHZ protocol; the output is the parity of
/// all outcomes plus `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzStrategy {
    pub n: usize,
    pub qubits: Vec<GhzQubit>,
    pub c: bool,
}

pub fn ghz_strategy(d: &PeriodicDecomposition, f0: bool) -> Result<GhzStrategy> {
    let qubits: Vec<GhzQubit> = d.support().into_iter().map(|(mask, phi)| GhzQubit { mask, phi }).collect();
    let constant = (0..(1u64 << d.n)).all(|x| (d.phase(x) / 2).is_integer() || d.phase(x).is_integer());
    if qubits.is_empty() && !constant {
        return Err(invalid("empty decomposition cannot represent a nonconstant function"));
    }
    Ok(GhzStrategy { n: d.n, qubits, c: f0 })
}

/// `2^(n-1) phi` for a rational angle, if integral.
pub fn scaled_integer(phi: Angle, n: usize) -> Option<i64> {
    let s = phi * Angle::from_integer(1i64 << (n - 1));
    s.is_integer().then(|| s.to_integer())
}

/// Distance from `phi` to the nearest odd integer, as a float check.
pub fn odd_integer_distance(x: f64) -> f64 {
    let nearest = 2.0 * ((x - 1.0) / 2.0).round() + 1.0;
    (x - nearest).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn half(n: i64) -> Angle {
        Angle::new(n, 2)
    }

    fn brute_m(n: usize, y: u64, p: u64) -> i64 {
        (0..(1u64 << n)).filter(|x| x & !y == 0).map(|x| parity(p & x)).sum()
    }

    #[test]
    fn sierpinski_small_cases() {
        let s1 = sierpinski_matrix(1).unwrap();
        assert_eq!(s1.m, vec![vec![1]]);
        assert_eq!(s1.m_inv, vec![vec![Angle::one()]]);
        let s2 = sierpinski_matrix(2).unwrap();
        assert_eq!(s2.m[2], vec![2, 2, 2]);
        assert!(sierpinski_matrix(7).is_err());
        assert!(sierpinski_matrix(0).is_err());
    }

    #[test]
    fn sierpinski_matches_brute_force_and_inverts() {
        for n in 1..=MAX_PFD_ARITY {
            let s = sierpinski_matrix(n).unwrap();
            let d = s.dim();
            for y in 0..d {
                for p in 0..d {
                    assert_eq!(s.m[y][p], brute_m(n, y as u64 + 1, p as u64 + 1));
                }
            }
            let prod = s.product();
            for (i, row) in prod.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert_eq!(*v, if i == j { Angle::one() } else { Angle::zero() }, "n={n}");
                }
            }
        }
    }

    #[test]
    fn or2_decomposition() {
        let f = BooleanFunction::or(2).unwrap();
        let reference = PeriodicDecomposition::new(2, vec![(1, half(3)), (2, half(3)), (3, half(-1))]).unwrap();
        assert!(verify_pfd(&f, &reference).unwrap().ok);
        for n in 1..=6 {
            let f = BooleanFunction::or(n).unwrap();
            let closed = or_closed_form(n).unwrap();
            assert!(verify_pfd(&f, &closed).unwrap().ok, "n={n}");
            assert_eq!(solve_pfd(&f, None).unwrap(), closed);
        }
    }

    #[test]
    fn constant_zero() {
        let f = BooleanFunction::constant(false, 3).unwrap();
        let d = solve_pfd(&f, None).unwrap();
        assert!(d.angles.iter().all(|(_, a)| a.is_zero()));
        assert!(verify_pfd(&f, &d).unwrap().ok);
        let cert = sparsity_certificate(&f).unwrap();
        assert_eq!(cert.non_integer_count, 0);
        let g = ghz_strategy(&d, false).unwrap();
        assert!(g.qubits.is_empty());
    }

    #[test]
    fn and3_is_odd_integral() {
        let f = BooleanFunction::and(3).unwrap();
        let d = solve_pfd(&f, None).unwrap();
        for (_, a) in &d.angles {
            let s = scaled_integer(*a, 3).unwrap();
            assert_eq!(s.rem_euclid(2), 1);
        }
        assert!(verify_pfd(&f, &d).unwrap().ok);
    }

    #[test]
    fn pairwise_and_decomposition() {
        let f = BooleanFunction::pairwise_and(3).unwrap();
        let d = PeriodicDecomposition::new(3, vec![(1, half(1)), (2, half(1)), (4, half(1)), (7, half(-1))]).unwrap();
        assert!(verify_pfd(&f, &d).unwrap().ok);
        let all_plus = PeriodicDecomposition::new(3, vec![(1, half(1)), (2, half(1)), (4, half(1)), (7, half(1))]).unwrap();
        assert!(!verify_pfd(&f, &all_plus).unwrap().ok);
        assert_eq!(ghz_strategy(&d, false).unwrap().qubits.len(), 4);
        let canonical = solve_pfd(&f, None).unwrap();
        assert!(verify_pfd(&f, &canonical).unwrap().ok);
    }

    #[test]
    fn certificates() {
        let and2 = sparsity_certificate(&BooleanFunction::and(2).unwrap()).unwrap();
        assert_eq!(and2.non_integer_count, 3);
        assert!(and2.is_maximal());
        let xor = BooleanFunction::parity(2).unwrap();
        let d = solve_pfd(&xor, None).unwrap();
        assert_eq!(d.angles, vec![(1, Angle::from_integer(-1)), (2, Angle::from_integer(-1)), (3, Angle::from_integer(2))]);
        assert_eq!(sparsity_certificate(&xor).unwrap().non_integer_count, 0);
    }

    #[test]
    fn ghz_counts() {
        let or2 = BooleanFunction::or(2).unwrap();
        let g = ghz_strategy(&solve_pfd(&or2, None).unwrap(), false).unwrap();
        assert_eq!(g.qubits.len(), 3);
        let empty = PeriodicDecomposition::new(2, vec![]).unwrap();
        assert!(ghz_strategy(&empty, false).unwrap().qubits.is_empty());
    }

    #[test]
    fn odd_offsets_rejected() {
        let f = BooleanFunction::and(2).unwrap();
        assert!(solve_pfd(&f, Some(&[0, 1, 0])).is_err());
        assert!(solve_pfd(&f, Some(&[0, 0])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = or_closed_form(3).unwrap();
        let v = d.to_json();
        assert_eq!(v["angles"][0]["mask"], 1);
        assert_eq!(PeriodicDecomposition::from_json(&v).unwrap(), d);
    }

    fn random_function(n: usize, seed: u64) -> BooleanFunction {
        BooleanFunction::from_fn(n, |x| {
            let h = (x ^ seed).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(17) ^ seed;
            h.count_ones() % 2 == 1
        })
        .unwrap()
    }

    #[test]
    fn random_functions_verify() {
        for n in 1..=4 {
            for s in 0..50u64 {
                let f = random_function(n, s.wrapping_mul(0x1234_5678_9abc_def1) ^ n as u64);
                let d = solve_pfd(&f, None).unwrap();
                assert!(verify_pfd(&f, &d).unwrap().ok, "n={n} seed={s}");
            }
        }
    }

    proptest! {
        #[test]
        fn full_degree_is_odd_integral(n in 2usize..=4, seed in any::<u64>()) {
            let f = random_function(n, seed);
            let full = (1u64 << n) - 1;
            prop_assume!(f.anf().contains(full));
            let cert = sparsity_certificate(&f).unwrap();
            prop_assert!(cert.full_degree && cert.is_maximal());
            prop_assert_eq!(cert.non_integer_count, (1usize << n) - 1);
            let d = solve_pfd(&f, None).unwrap();
            for (_, a) in &d.angles {
                let x = a.to_f64().unwrap() * (1u64 << (n - 1)) as f64;
                prop_assert!(odd_integer_distance(x) < 1e-9);
            }
        }

        #[test]
        fn even_offsets_preserve_validity(n in 1usize..=3, seed in any::<u64>(), ks in proptest::collection::vec(-3i64..=3, 7)) {
            let f = random_function(n, seed);
            let d = (1usize << n) - 1;
            let k: Vec<i64> = ks[..d].iter().map(|v| 2 * v).collect();
            let dec = solve_pfd(&f, Some(&k)).unwrap();
            prop_assert!(verify_pfd(&f, &dec).unwrap().ok);
        }
    }
}
