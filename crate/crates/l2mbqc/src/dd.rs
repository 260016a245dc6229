//! Double-double helpers on top of `twofloat`.
//!
//! `twofloat` supplies the arithmetic; its transcendental functions are only
//! accurate to about one `f64` ulp, so sine and cosine are evaluated here by
//! a Taylor series after argument halving.

use num_complex::Complex;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

pub(crate) type Dd = TwoFloat;
pub(crate) type Cdd = Complex<Dd>;

pub(crate) fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

pub(crate) fn pi() -> Dd {
    twofloat::consts::PI
}

#[cfg(test)]
pub(crate) fn cd(re: f64, im: f64) -> Cdd {
    Complex::new(dd(re), dd(im))
}

pub(crate) fn to_c64(z: Cdd) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}

pub(crate) fn f(x: Dd) -> f64 {
    x.hi() + x.lo()
}

pub(crate) fn abs(z: Cdd) -> Dd {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// `(cos t, sin t)` to double-double accuracy.
pub(crate) fn cos_sin(t: Dd) -> (Dd, Dd) {
    let mut x = t;
    let mut halvings = 0;
    while f(x).abs() > 0.05 {
        x /= 2.0;
        halvings += 1;
    }
    let x2 = x * x;
    let mut s = x;
    let mut c = dd(1.0);
    let mut term_s = x;
    let mut term_c = dd(1.0);
    for k in 1..20 {
        let k = k as f64;
        term_c = -term_c * x2 / ((2.0 * k - 1.0) * (2.0 * k));
        term_s = -term_s * x2 / ((2.0 * k) * (2.0 * k + 1.0));
        c += term_c;
        s += term_s;
        if f(term_c).abs() < 1e-36 && f(term_s).abs() < 1e-36 {
            break;
        }
    }
    for _ in 0..halvings {
        let (c2, s2) = (c * c - s * s, dd(2.0) * s * c);
        c = c2;
        s = s2;
    }
    (c, s)
}

pub(crate) fn cis(t: Dd) -> Cdd {
    let (c, s) = cos_sin(t);
    Complex::new(c, s)
}

/// Argument of a complex double-double, in `f64`.
pub(crate) fn arg(z: Cdd) -> f64 {
    let g = to_c64(z);
    g.im.atan2(g.re)
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
///
/// Returns the solution and a 1-norm condition estimate of `m`.
pub(crate) fn solve(m: &[Vec<Dd>], rhs: &[Dd]) -> Result<(Vec<Dd>, f64)> {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n) && rhs.len() == n);
    let inv = invert(m)?;
    let norm1 = |a: &[Vec<Dd>]| -> f64 {
        (0..n).map(|j| (0..n).map(|i| f(a[i][j]).abs()).sum::<f64>()).fold(0.0, f64::max)
    };
    let condition = norm1(m) * norm1(&inv);
    let mut x = vec![dd(0.0); n];
    for (i, xi) in x.iter_mut().enumerate() {
        for j in 0..n {
            *xi += inv[i][j] * rhs[j];
        }
    }
    // one refinement step against the original system
    let mut r = rhs.to_vec();
    for i in 0..n {
        for j in 0..n {
            r[i] -= m[i][j] * x[j];
        }
    }
    for i in 0..n {
        for j in 0..n {
            x[i] += inv[i][j] * r[j];
        }
    }
    Ok((x, condition))
}

fn invert(m: &[Vec<Dd>]) -> Result<Vec<Vec<Dd>>> {
    let n = m.len();
    let mut a: Vec<Vec<Dd>> = m.to_vec();
    let mut inv: Vec<Vec<Dd>> = (0..n)
        .map(|i| (0..n).map(|j| dd(if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    let scale = m.iter().flatten().map(|v| f(*v).abs()).fold(0.0, f64::max).max(1.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| f(a[i][col]).abs().total_cmp(&f(a[j][col]).abs()))
            .unwrap();
        if f(a[piv][col]).abs() < 1e-14 * scale {
            return Err(Error::Singular { condition: f64::INFINITY });
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = a[i][col];
            if f(factor) == 0.0 {
                continue;
            }
            for j in 0..n {
                let (ac, ic) = (a[col][j], inv[col][j]);
                a[i][j] -= factor * ac;
                inv[i][j] -= factor * ic;
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_sin_beats_f64() {
        // cos(2 pi / 7) to 34 digits
        let (c, s) = cos_sin(pi() * 2.0 / 7.0);
        let c_ref_hi = 6.234_898_018_587_335e-1;
        let err = f(c - dd(c_ref_hi)) - 4.716_099_920_540_896e-17;
        assert!(err.abs() < 1e-30, "{err:e}");
        assert!(f(c * c + s * s - dd(1.0)).abs() < 1e-30);
    }

    #[test]
    fn solve_small_system() {
        let m = vec![vec![dd(2.0), dd(1.0)], vec![dd(1.0), dd(3.0)]];
        let (x, cond) = solve(&m, &[dd(3.0), dd(5.0)]).unwrap();
        assert!(f(x[0] - dd(4.0) / 5.0).abs() < 1e-30);
        assert!(f(x[1] - dd(7.0) / 5.0).abs() < 1e-30);
        assert!(cond > 1.0 && cond < 10.0);
    }

    #[test]
    fn singular_is_reported() {
        let m = vec![vec![dd(1.0), dd(2.0)], vec![dd(2.0), dd(4.0)]];
        assert!(matches!(solve(&m, &[dd(1.0), dd(1.0)]), Err(Error::Singular { .. })));
    }
}
