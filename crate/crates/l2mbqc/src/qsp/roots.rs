//! Polynomial roots with multiplicities.
//!
//! Roots are located in `f64` by the Aberth-Ehrlich iteration, grouped into
//! clusters, and each cluster of size `m` is polished in double-double by
//! Newton's method on the `(m-1)`-th derivative, where the root is simple.

use num_complex::Complex64;

use crate::dd::{abs, dd, f, to_c64, Cdd};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct Root {
    pub z: Cdd,
    pub mult: usize,
}

fn horner<T>(coeffs: &[T], z: T) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    let mut acc = *coeffs.last().expect("nonempty");
    for c in coeffs.iter().rev().skip(1) {
        acc = acc * z + *c;
    }
    acc
}

fn derivative(coeffs: &[Cdd]) -> Vec<Cdd> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * dd(k as f64))
        .collect()
}

fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let radius = (coeffs[0].norm() / lead.norm()).powf(1.0 / n as f64).max(1e-3);
    let dcoeffs: Vec<Complex64> = coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.4) / n as f64))
        .collect();
    for _ in 0..4000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let p = horner(coeffs, z[i]);
            let dp = horner(&dcoeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    z
}

fn newton_dd(coeffs: &[Cdd], start: Cdd, order: usize) -> Cdd {
    let mut p = coeffs.to_vec();
    for _ in 0..order {
        p = derivative(&p);
    }
    let dp = derivative(&p);
    let mut z = start;
    for _ in 0..200 {
        let v = horner(&p, z);
        let d = horner(&dp, z);
        if f(abs(d)) == 0.0 {
            break;
        }
        let step = v / d;
        z -= step;
        if f(abs(step)) <= 1e-31 * f(abs(z)).max(1.0) {
            break;
        }
    }
    z
}

/// Relative size of `p(z)` against the coefficient envelope at `|z|`.
fn relative_value(coeffs: &[Cdd], z: Cdd) -> f64 {
    let r = f(abs(z));
    let envelope: f64 = coeffs.iter().enumerate().map(|(k, c)| f(abs(*c)) * r.powi(k as i32)).sum();
    f(abs(horner(coeffs, z))) / envelope.max(f64::MIN_POSITIVE)
}

/// All roots of `sum_k coeffs[k] z^k` with multiplicities summing to the degree.
pub(crate) fn roots_with_multiplicity(coeffs: &[Cdd]) -> Result<Vec<Root>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    if f(abs(coeffs[n])) == 0.0 || f(abs(coeffs[0])) == 0.0 {
        return Err(Error::Completion("polynomial has a vanishing end coefficient".into()));
    }
    let approx = aberth(&coeffs.iter().map(|c| to_c64(*c)).collect::<Vec<_>>());

    // union-find style clustering on the f64 approximations
    let mut cluster: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = approx[i].norm().max(approx[j].norm()).max(1.0);
            if (approx[i] - approx[j]).norm() < 1e-4 * scale {
                let (a, b) = (find(&mut cluster, i), find(&mut cluster, j));
                cluster[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut cluster, i);
        match label[r] {
            Some(g) => groups[g].push(i),
            None => {
                label[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let mut refined: Vec<Root> = Vec::new();
    for g in groups {
        let m = g.len();
        let mean: Complex64 = g.iter().map(|&i| approx[i]).sum::<Complex64>() / m as f64;
        let start = Cdd::new(dd(mean.re), dd(mean.im));
        let z = newton_dd(coeffs, start, m - 1);
        if m == 1 || relative_value(coeffs, z) < 1e-24 {
            refined.push(Root { z, mult: m });
        } else {
            for &i in &g {
                let s = Cdd::new(dd(approx[i].re), dd(approx[i].im));
                refined.push(Root { z: newton_dd(coeffs, s, 0), mult: 1 });
            }
        }
    }

    // merge roots that converged onto the same point
    let mut merged: Vec<Root> = Vec::new();
    for r in refined {
        let hit = merged.iter_mut().find(|q| {
            let scale = f(abs(q.z)).max(1.0);
            f(abs(q.z - r.z)) < 1e-10 * scale
        });
        match hit {
            Some(q) => q.mult += r.mult,
            None => merged.push(r),
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::cd;

    fn poly_from_roots(roots: &[(f64, f64)]) -> Vec<Cdd> {
        let mut p = vec![cd(1.0, 0.0)];
        for &(re, im) in roots {
            let r = cd(re, im);
            let mut next = vec![cd(0.0, 0.0); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                next[k + 1] += *c;
                next[k] -= *c * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn simple_and_double_roots() {
        let p = poly_from_roots(&[(1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (2.0, 0.5)]);
        let roots = roots_with_multiplicity(&p).unwrap();
        assert_eq!(roots.iter().map(|r| r.mult).sum::<usize>(), 5);
        let double = roots.iter().find(|r| r.mult == 2).unwrap();
        assert!(f(abs(double.z - cd(1.0, 0.0))) < 1e-28);
        for r in roots.iter().filter(|r| r.mult == 1) {
            assert!(relative_value(&p, r.z) < 1e-28);
        }
    }

    #[test]
    fn unit_circle_doubles() {
        let mut spec = Vec::new();
        for k in 0..6 {
            let t = 0.37 + k as f64;
            spec.push((t.cos(), t.sin()));
            spec.push((t.cos(), t.sin()));
        }
        let roots = roots_with_multiplicity(&poly_from_roots(&spec)).unwrap();
        assert_eq!(roots.len(), 6);
        assert!(roots.iter().all(|r| r.mult == 2 && (f(abs(r.z)) - 1.0).abs() < 1e-15));
    }
}
