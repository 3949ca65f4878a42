//! Complex roots of univariate polynomials with multiplicities.

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cnum::{CRat, C64};
use crate::upoly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("eigenvalue solver did not converge")]
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    #[serde(serialize_with = "ser_c64")]
    pub z: C64,
    pub multiplicity: usize,
}

pub fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Radius within which numerically computed roots are considered one root.
pub const CLUSTER_RADIUS: f64 = 1e-6;

pub fn horner(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(C64::zero(), |acc, c| acc * z + c)
}

fn deriv(p: &[C64]) -> Vec<C64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

fn trim(p: &[C64]) -> &[C64] {
    let n = p.iter().rposition(|c| *c != C64::zero()).map_or(0, |d| d + 1);
    &p[..n]
}

/// Eigenvalues of the companion matrix of `p` (ascending coefficients, nonzero
/// constant term, degree >= 1).
fn companion_roots(p: &[C64]) -> Result<Vec<C64>, RootError> {
    let n = p.len() - 1;
    if n == 1 {
        return Ok(vec![-p[0] / p[1]]);
    }
    let lead = p[n];
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -p[n - 1 - j] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::zero()
        }
    });
    let schur = m.try_schur(1e-15, 10_000).ok_or(RootError::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|k| t[(k, k)]).collect())
}

/// Newton polish; keeps the improvement only if the residual decreases.
fn newton(p: &[C64], dp: &[C64], mut z: C64, iters: usize) -> C64 {
    let mut r = horner(p, z).norm();
    for _ in 0..iters {
        let d = horner(dp, z);
        if d == C64::zero() {
            break;
        }
        let cand = z - horner(p, z) / d;
        let rc = horner(p, cand).norm();
        if !(rc < r) {
            break;
        }
        z = cand;
        r = rc;
        if r == 0.0 {
            break;
        }
    }
    z
}

/// All complex roots of `p` (ascending coefficients) with multiplicities.
///
/// Roots from the companion eigenvalues are polished, then grouped: points within
/// `CLUSTER_RADIUS` (relative to max(1,|z|)) form one root, and wider groups are
/// merged when the averaged point is a common zero of the needed derivatives.
/// A multiple root is re-polished with Newton on the (m-1)-th derivative.
pub fn roots_univariate(p: &[C64]) -> Result<Vec<Root>, RootError> {
    let p = trim(p);
    if p.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    let zeros = p.iter().position(|c| *c != C64::zero()).unwrap();
    let q = &p[zeros..];
    let mut out = Vec::new();
    if zeros > 0 {
        out.push(Root { z: C64::zero(), multiplicity: zeros });
    }
    if q.len() <= 1 {
        return Ok(out);
    }
    let dq = deriv(q);
    let raw: Vec<C64> = companion_roots(q)?.into_iter().map(|z| newton(q, &dq, z, 50)).collect();
    out.extend(cluster(q, raw));
    sort_roots(&mut out);
    Ok(out)
}

fn sort_roots(v: &mut [Root]) {
    v.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
}

fn cluster(p: &[C64], raw: Vec<C64>) -> Vec<Root> {
    // single-linkage groups at CLUSTER_RADIUS
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for z in raw {
        let near: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.iter().any(|w| (w - z).norm() <= CLUSTER_RADIUS * w.norm().max(1.0)))
            .map(|(k, _)| k)
            .collect();
        let mut merged = vec![z];
        for k in near.into_iter().rev() {
            merged.extend(groups.swap_remove(k));
        }
        groups.push(merged);
    }
    // merge wider groups whose centroid is a multiple root
    let scale: f64 = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut merged_any = true;
    while merged_any {
        merged_any = false;
        'outer: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let ci = centroid(&groups[i]);
                let cj = centroid(&groups[j]);
                if (ci - cj).norm() > 1e-3 * ci.norm().max(1.0) {
                    continue;
                }
                let m = groups[i].len() + groups[j].len();
                let c = (ci * groups[i].len() as f64 + cj * groups[j].len() as f64) / m as f64;
                if is_multiple_root(p, c, m, scale) {
                    let g = groups.swap_remove(j);
                    groups[i].extend(g);
                    merged_any = true;
                    break 'outer;
                }
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let m = g.len();
            let mut z = centroid(&g);
            if m > 1 {
                let mut d = p.to_vec();
                for _ in 0..m - 1 {
                    d = deriv(&d);
                }
                let dd = deriv(&d);
                z = newton(&d, &dd, z, 50);
            }
            Root { z, multiplicity: m }
        })
        .collect()
}

fn centroid(g: &[C64]) -> C64 {
    g.iter().sum::<C64>() / g.len() as f64
}

/// Whether `p^(k)(c)` is small for every k < m, relative to the coefficient scale.
fn is_multiple_root(p: &[C64], c: C64, m: usize, scale: f64) -> bool {
    let mut d = p.to_vec();
    let r = c.norm().max(1.0);
    for k in 0..m {
        let bound: f64 = d.iter().enumerate().map(|(i, a)| a.norm() * r.powi(i as i32)).sum();
        let v = horner(&d, c).norm();
        // tolerance loosens with the order of the derivative
        let tol = 1e-6f64.powf(1.0 - k as f64 / m as f64) * bound.max(scale * 1e-300);
        if v > tol {
            return false;
        }
        d = deriv(&d);
    }
    true
}

/// Roots of a polynomial with exact Gaussian-rational coefficients: the square-free
/// decomposition fixes multiplicities exactly, each square-free part is solved
/// numerically.
pub fn roots_exact(p: &[CRat]) -> Result<Vec<Root>, RootError> {
    let p = upoly::trim(p.to_vec());
    if p.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (f, k) in upoly::squarefree(&p) {
        let fc: Vec<C64> = f.iter().map(|c| c.to_c64()).collect();
        let zeros = fc.iter().position(|c| *c != C64::zero()).unwrap_or(0);
        if zeros > 0 {
            out.push(Root { z: C64::zero(), multiplicity: k });
        }
        let q = &fc[zeros..];
        if q.len() <= 1 {
            continue;
        }
        let dq = deriv(q);
        for z in companion_roots(q)? {
            out.push(Root { z: newton(q, &dq, z, 50), multiplicity: k });
        }
    }
    sort_roots(&mut out);
    Ok(out)
}

/// Relative residual |p(z)| / sum |a_i||z|^i.
pub fn relative_residual(p: &[C64], z: C64) -> f64 {
    let bound: f64 = p.iter().enumerate().map(|(i, a)| a.norm() * z.norm().powi(i as i32)).sum();
    if bound == 0.0 {
        0.0
    } else {
        horner(p, z).norm() / bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn from_roots(rs: &[C64]) -> Vec<C64> {
        let mut p = vec![C64::new(1.0, 0.0)];
        for r in rs {
            let mut q = vec![C64::zero(); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                q[k + 1] += c;
                q[k] -= c * r;
            }
            p = q;
        }
        p
    }

    #[test]
    fn simple_roots() {
        let rs = [C64::new(1.0, 0.0), C64::new(-2.0, 0.5), C64::new(0.0, 3.0)];
        let got = roots_univariate(&from_roots(&rs)).unwrap();
        assert_eq!(got.len(), 3);
        for r in &rs {
            assert!(got.iter().any(|g| (g.z - r).norm() < 1e-10 && g.multiplicity == 1));
        }
    }

    #[test]
    fn multiple_roots_cluster() {
        let a = C64::new(0.5, -0.25);
        let rs = [a, a, a, C64::new(2.0, 0.0), C64::zero(), C64::zero()];
        let got = roots_univariate(&from_roots(&rs)).unwrap();
        assert_eq!(got.len(), 3, "{got:?}");
        let ga = got.iter().find(|g| (g.z - a).norm() < 1e-6).unwrap();
        assert_eq!(ga.multiplicity, 3);
        let g0 = got.iter().find(|g| g.z.norm() < 1e-12).unwrap();
        assert_eq!(g0.multiplicity, 2);
    }

    #[test]
    fn exact_path_multiplicities() {
        // (z-1)^4 (z^2+1)
        let q = |n: i64| CRat::real(BigRational::from_integer(n.into()));
        let mut p = vec![q(1), q(0), q(1)];
        for _ in 0..4 {
            p = upoly::mul(&p, &[q(-1), q(1)]);
        }
        let got = roots_exact(&p).unwrap();
        assert_eq!(got.len(), 3);
        let one = got.iter().find(|g| (g.z - C64::new(1.0, 0.0)).norm() < 1e-12).unwrap();
        assert_eq!(one.multiplicity, 4);
    }

    #[test]
    fn residuals_small() {
        let p: Vec<C64> = (0..12).map(|k| C64::new((k * 7 % 5) as f64 - 2.0, (k % 3) as f64)).collect();
        for r in roots_univariate(&p).unwrap() {
            assert!(relative_residual(&p, r.z) < 1e-12, "{r:?}");
        }
    }
}
