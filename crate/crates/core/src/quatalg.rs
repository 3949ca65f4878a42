//! Quaternion algebras over polynomial rings.
//!
//! `Q0` has structure constants `a = (x+4)/x`, `b = z(z-x)` over the basis (x, z);
//! `QUV` has `a = u^2-1`, `b = v^2-1` over (u, v). Components are kept polynomial;
//! in `Q0` every product by `a` must land back in the polynomial ring, which holds
//! for elements with `s ≡ z w (mod x)` and fails loudly otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnum::C64;
use crate::exactpoly::{poly, Basis, PolyError, RatPoly2};
use crate::roots::roots_univariate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Q0,
    QUV,
}

impl Algebra {
    pub fn basis(self) -> Basis {
        match self {
            Algebra::Q0 => Basis::XZ,
            Algebra::QUV => Basis::UV,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuatError {
    #[error("algebra mismatch: {0:?} vs {1:?}")]
    AlgebraMismatch(Algebra, Algebra),
    #[error("component {0} of the result is not a polynomial")]
    NonPolynomial(&'static str),
    #[error("component basis does not match the algebra")]
    WrongBasis,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("unit search space has {0} candidates, above the cap of {1}")]
    SearchTooLarge(u128, u128),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quat {
    pub algebra: Algebra,
    pub r: RatPoly2,
    pub s: RatPoly2,
    pub t: RatPoly2,
    pub w: RatPoly2,
}

impl Quat {
    pub fn new(algebra: Algebra, r: RatPoly2, s: RatPoly2, t: RatPoly2, w: RatPoly2) -> Result<Self, QuatError> {
        let b = algebra.basis();
        if [&r, &s, &t, &w].iter().any(|p| p.basis() != b) {
            return Err(QuatError::WrongBasis);
        }
        Ok(Quat { algebra, r, s, t, w })
    }

    pub fn one(algebra: Algebra) -> Self {
        let b = algebra.basis();
        Quat {
            algebra,
            r: RatPoly2::one(b),
            s: RatPoly2::zero(b),
            t: RatPoly2::zero(b),
            w: RatPoly2::zero(b),
        }
    }

    /// Build from integer term lists over a common denominator.
    pub fn from_terms(algebra: Algebra, comps: [&[(u32, u32, i64)]; 4], den: i64) -> Self {
        let b = algebra.basis();
        let [r, s, t, w] = comps.map(|c| poly(b, c, den));
        Quat { algebra, r, s, t, w }
    }

    pub fn components(&self) -> [&RatPoly2; 4] {
        [&self.r, &self.s, &self.t, &self.w]
    }

    pub fn is_one(&self) -> bool {
        self.r.is_one() && self.s.is_zero() && self.t.is_zero() && self.w.is_zero()
    }

    pub fn neg(&self) -> Quat {
        Quat { algebra: self.algebra, r: -&self.r, s: -&self.s, t: -&self.t, w: -&self.w }
    }

    pub fn scale(&self, c: &BigRational) -> Quat {
        Quat {
            algebra: self.algebra,
            r: self.r.scale(c),
            s: self.s.scale(c),
            t: self.t.scale(c),
            w: self.w.scale(c),
        }
    }

    pub fn try_sub(&self, o: &Quat) -> Result<Quat, QuatError> {
        same(self, o)?;
        Ok(Quat {
            algebra: self.algebra,
            r: &self.r - &o.r,
            s: &self.s - &o.s,
            t: &self.t - &o.t,
            w: &self.w - &o.w,
        })
    }

    /// Flip the signs of S, T, W independently so each has a positive leading
    /// coefficient.
    pub fn sign_normalized(&self) -> Quat {
        let fix = |p: &RatPoly2| match p.terms().first() {
            Some((_, c)) if c.is_negative() => -p,
            _ => p.clone(),
        };
        Quat { algebra: self.algebra, r: self.r.clone(), s: fix(&self.s), t: fix(&self.t), w: fix(&self.w) }
    }

    pub fn display(&self) -> String {
        let (n0, n1) = self.algebra.basis().names();
        format!(
            "({}, {}, {}, {})",
            self.r.display_with(n0, n1),
            self.s.display_with(n0, n1),
            self.t.display_with(n0, n1),
            self.w.display_with(n0, n1)
        )
    }
}

impl std::fmt::Display for Quat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.display())
    }
}

fn same(p: &Quat, q: &Quat) -> Result<(), QuatError> {
    if p.algebra != q.algebra {
        return Err(QuatError::AlgebraMismatch(p.algebra, q.algebra));
    }
    Ok(())
}

/// `b` of the algebra as a polynomial.
pub fn struct_b(alg: Algebra) -> RatPoly2 {
    match alg {
        Algebra::Q0 => poly(Basis::XZ, &[(0, 2, 1), (1, 1, -1)], 1),
        Algebra::QUV => poly(Basis::UV, &[(0, 2, 1), (0, 0, -1)], 1),
    }
}

/// `a * p`; in `Q0` this is `p + 4 p / x` and needs `x | p`.
fn mul_a(alg: Algebra, p: &RatPoly2, comp: &'static str) -> Result<RatPoly2, QuatError> {
    match alg {
        Algebra::Q0 => {
            let q = p.div_monomial(1, 0).ok_or(QuatError::NonPolynomial(comp))?;
            Ok(p + &q.scale_int(4))
        }
        Algebra::QUV => Ok(p * &poly(Basis::UV, &[(2, 0, 1), (0, 0, -1)], 1)),
    }
}

pub fn qmul(p: &Quat, q: &Quat) -> Result<Quat, QuatError> {
    same(p, q)?;
    let alg = p.algebra;
    let b = struct_b(alg);
    let (r1, s1, t1, w1) = (&p.r, &p.s, &p.t, &p.w);
    let (r2, s2, t2, w2) = (&q.r, &q.s, &q.t, &q.w);
    let e = &(s1 * s2) - &(&b * &(w1 * w2));
    let f = &(s1 * w2) - &(w1 * s2);
    let r = &(&(r1 * r2) + &(&b * &(t1 * t2))) + &mul_a(alg, &e, "r")?;
    let s = &(&(r1 * s2) + &(s1 * r2)) + &(&b * &(&(w1 * t2) - &(t1 * w2)));
    let t = &(&(r1 * t2) + &(t1 * r2)) + &mul_a(alg, &f, "t")?;
    let w = &(&(r1 * w2) + &(w1 * r2)) + &(&(s1 * t2) - &(t1 * s2));
    Ok(Quat { algebra: alg, r, s, t, w })
}

pub fn qconj(q: &Quat) -> Quat {
    Quat { algebra: q.algebra, r: q.r.clone(), s: -&q.s, t: -&q.t, w: -&q.w }
}

/// `r^2 - a s^2 - b t^2 + a b w^2`.
pub fn qnorm(q: &Quat) -> Result<RatPoly2, QuatError> {
    let b = struct_b(q.algebra);
    let inner = &(&q.s * &q.s) - &(&b * &(&q.w * &q.w));
    Ok(&(&(&q.r * &q.r) - &(&b * &(&q.t * &q.t))) - &mul_a(q.algebra, &inner, "norm")?)
}

/// `q^n`, with negative powers through the conjugate (valid for norm-1 elements).
pub fn qpow(q: &Quat, n: i64) -> Result<Quat, QuatError> {
    let base = if n < 0 { qconj(q) } else { q.clone() };
    let mut out = Quat::one(q.algebra);
    for _ in 0..n.unsigned_abs() {
        out = qmul(&out, &base)?;
    }
    Ok(out)
}

/// `g = (s - z w) / x` for a `Q0` element, when polynomial.
pub fn g_of(q: &Quat) -> Option<RatPoly2> {
    let z = RatPoly2::var1(Basis::XZ);
    (&q.s - &(&z * &q.w)).div_monomial(1, 0)
}

/// Membership in the group of norm-1 elements of `Q0` with half-integer
/// components, `r(0,0) = 1` and `s ≡ z w (mod x)`.
pub fn in_v0(q: &Quat) -> bool {
    if q.algebra != Algebra::Q0 {
        return false;
    }
    if !q.components().iter().all(|c| c.is_half_integer()) {
        return false;
    }
    if !q.r.constant_term().is_one() || g_of(q).is_none() {
        return false;
    }
    matches!(qnorm(q), Ok(n) if n.is_one())
}

/// The three generators of the word group in `Q0`: images of `a^2`, `b a^2 b^-1`, `[b,a]`.
pub fn generator(k: usize) -> Quat {
    match k {
        1 => Quat::from_terms(Algebra::Q0, [&[(1, 0, 1), (0, 0, 2)], &[(1, 0, 1)], &[], &[]], 2),
        2 => Quat::from_terms(Algebra::Q0, [&[(1, 0, 1), (0, 0, 2)], &[(1, 0, 1), (0, 1, -2)], &[], &[(0, 0, -2)]], 2),
        3 => Quat::from_terms(Algebra::Q0, [&[(0, 1, 1), (0, 0, 2)], &[(0, 1, -1)], &[(0, 0, -1)], &[(0, 0, -1)]], 2),
        _ => panic!("generator index must be 1, 2 or 3"),
    }
}

fn uv(terms: &[(u32, u32, i64)]) -> RatPoly2 {
    poly(Basis::UV, terms, 1)
}

fn xz(terms: &[(u32, u32, i64)], den: i64) -> RatPoly2 {
    poly(Basis::XZ, terms, den)
}

/// `x = 2(u-1)`, `z = -(u-1)(v-1)`.
fn xz_in_uv() -> (RatPoly2, RatPoly2) {
    (uv(&[(1, 0, 2), (0, 0, -2)]), uv(&[(1, 1, -1), (1, 0, 1), (0, 1, 1), (0, 0, -1)]))
}

/// The isomorphism `Q0 -> QUV`: `(r, s/(u-1), (u-1) t, w)` after the change of variables.
pub fn rho(q: &Quat) -> Result<Quat, QuatError> {
    if q.algebra != Algebra::Q0 {
        return Err(QuatError::AlgebraMismatch(q.algebra, Algebra::Q0));
    }
    let (x, z) = xz_in_uv();
    let um1 = uv(&[(1, 0, 1), (0, 0, -1)]);
    let r = q.r.substitute(&x, &z)?;
    let s = q.s.substitute(&x, &z)?.divides_exactly(&um1).ok_or(QuatError::NonPolynomial("s"))?;
    let t = &q.t.substitute(&x, &z)? * &um1;
    let w = q.w.substitute(&x, &z)?;
    Ok(Quat { algebra: Algebra::QUV, r, s, t, w })
}

/// `x^k P((x+2)/2, (x-2z)/x)` as a polynomial in (x, z), if it is one.
fn uv_to_xz(p: &RatPoly2, k: i32) -> Option<RatPoly2> {
    let parts = p.split_var1();
    let jmax = parts.len().saturating_sub(1) as u32;
    let u_of_x = xz(&[(1, 0, 1), (0, 0, 2)], 2);
    let numer = xz(&[(1, 0, 1), (0, 1, -2)], 1);
    let zero = RatPoly2::zero(Basis::XZ);
    let mut acc = RatPoly2::zero(Basis::XZ);
    let mut npow = RatPoly2::one(Basis::XZ);
    for (j, part) in parts.iter().enumerate() {
        let pj = part.substitute(&u_of_x, &zero).ok()?;
        acc = &acc + &(&pj * &npow).shift(jmax - j as u32, 0);
        npow = &npow * &numer;
    }
    if k >= 0 {
        acc.shift(k as u32, 0).div_monomial(jmax, 0)
    } else {
        acc.div_monomial(jmax + k.unsigned_abs(), 0)
    }
}

/// Inverse of [`rho`]: `(R, x S/2, 2 T/x, W)` with `u = (x+2)/2`, `v = (x-2z)/x`.
pub fn rho_inv(q: &Quat) -> Result<Quat, QuatError> {
    if q.algebra != Algebra::QUV {
        return Err(QuatError::AlgebraMismatch(q.algebra, Algebra::QUV));
    }
    let half = BigRational::new(1.into(), 2.into());
    let r = uv_to_xz(&q.r, 0).ok_or(QuatError::NonPolynomial("r"))?;
    let s = uv_to_xz(&q.s, 1).ok_or(QuatError::NonPolynomial("s"))?.scale(&half);
    let t = uv_to_xz(&q.t, -1).ok_or(QuatError::NonPolynomial("t"))?.scale_int(2);
    let w = uv_to_xz(&q.w, 0).ok_or(QuatError::NonPolynomial("w"))?;
    Ok(Quat { algebra: Algebra::Q0, r, s, t, w })
}

/// `max(deg R, deg S + 1, deg T + 1, deg W + 2)`, ignoring zero components.
pub fn degree(q: &Quat) -> u32 {
    let d = |p: &RatPoly2, k: u32| p.total_degree().map(|d| d + k);
    [d(&q.r, 0), d(&q.s, 1), d(&q.t, 1), d(&q.w, 2)].into_iter().flatten().max().unwrap_or(0)
}

/// Decomposition `q = ints + P/2 ((u+1)(v+1), v+1, u+1, 1)` with `ints` integral and
/// `P` a 0/1 polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderWitness {
    pub ints: Quat,
    pub p: RatPoly2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCheck {
    pub member: bool,
    /// Second characterization: polynomial components and integral norm.
    pub norm_integral: bool,
    pub witness: Option<OrderWitness>,
}

impl OrderCheck {
    pub fn consistent(&self) -> bool {
        self.member == self.norm_integral
    }
}

/// The element `((u+1)(v+1), v+1, u+1, 1)`.
pub fn order_c() -> Quat {
    Quat::from_terms(
        Algebra::QUV,
        [&[(1, 1, 1), (1, 0, 1), (0, 1, 1), (0, 0, 1)], &[(0, 1, 1), (0, 0, 1)], &[(1, 0, 1), (0, 0, 1)], &[(0, 0, 1)]],
        1,
    )
}

/// Membership in the maximal order of half-integer quaternions.
pub fn in_order_o(q: &Quat) -> OrderCheck {
    let norm_integral = q.algebra == Algebra::QUV && matches!(qnorm(q), Ok(n) if n.is_integral());
    let witness = order_witness(q);
    OrderCheck { member: witness.is_some(), norm_integral, witness }
}

fn order_witness(q: &Quat) -> Option<OrderWitness> {
    if q.algebra != Algebra::QUV {
        return None;
    }
    let two_w = q.w.scale_int(2);
    let p = two_w.mod2_reduce().ok()?.lift(Basis::UV);
    let half_p = p.scale(&BigRational::new(1.into(), 2.into()));
    let c = order_c();
    let shift = Quat {
        algebra: Algebra::QUV,
        r: &half_p * &c.r,
        s: &half_p * &c.s,
        t: &half_p * &c.t,
        w: &half_p * &c.w,
    };
    let ints = q.try_sub(&shift).ok()?;
    if ints.components().iter().all(|c| c.is_integral()) {
        Some(OrderWitness { ints, p })
    } else {
        None
    }
}

/// Image conditions for the group of word quaternions in `QUV`: `R(1,1) = 1` and each
/// of `2R, 2(u-1)S, 2T/(u-1), 2W, S+(v-1)W` is a sum of `a (u-1)^m (v-1)^n` with
/// `m >= n` and `2^(m-n) | a`.
pub fn in_v(q: &Quat) -> bool {
    if q.algebra != Algebra::QUV {
        return false;
    }
    let one = BigRational::one();
    if q.r.eval_rat(&one, &one) != one {
        return false;
    }
    let um1 = uv(&[(1, 0, 1), (0, 0, -1)]);
    let vm1 = uv(&[(0, 1, 1), (0, 0, -1)]);
    let Some(t_div) = q.t.divides_exactly(&um1) else { return false };
    let checks = [
        q.r.scale_int(2),
        (&q.s * &um1).scale_int(2),
        t_div.scale_int(2),
        q.w.scale_int(2),
        &q.s + &(&vm1 * &q.w),
    ];
    checks.iter().all(shifted_form_ok)
}

fn shifted_form_ok(p: &RatPoly2) -> bool {
    // rewrite in U = u-1, V = v-1
    let shifted = p.substitute(&uv(&[(1, 0, 1), (0, 0, 1)]), &uv(&[(0, 1, 1), (0, 0, 1)])).expect("same basis");
    shifted.terms().iter().all(|&((m, n), ref a)| {
        if m < n || !a.is_integer() {
            return false;
        }
        let k = m - n;
        (a.numer() % (BigInt::one() << k as usize)).is_zero()
    })
}

/// The 14 members of degree at most 2 of the unit group, as published.
pub fn table2() -> Vec<Quat> {
    let q = |c: [&[(u32, u32, i64)]; 4], d| Quat::from_terms(Algebra::QUV, c, d);
    vec![
        q([&[(0, 0, 1)], &[], &[], &[]], 1),
        q([&[(1, 0, 1)], &[(0, 0, 1)], &[], &[]], 1),
        q([&[(0, 1, 1)], &[], &[(0, 0, 1)], &[]], 1),
        q([&[(1, 0, 1)], &[(0, 1, 1)], &[], &[(0, 0, 1)]], 1),
        q([&[(0, 1, 1)], &[], &[(1, 0, 1)], &[(0, 0, 1)]], 1),
        q([&[(1, 1, 1)], &[(0, 0, 1)], &[(1, 0, 1)], &[]], 1),
        q([&[(1, 1, 1)], &[(0, 1, 1)], &[(0, 0, 1)], &[]], 1),
        q([&[(1, 1, 1)], &[(0, 1, 1)], &[(1, 0, 1)], &[(0, 0, 1)]], 1),
        q([&[(2, 0, 2), (0, 0, -1)], &[(1, 0, 2)], &[], &[]], 1),
        q([&[(0, 2, 2), (0, 0, -1)], &[], &[(0, 1, 2)], &[]], 1),
        q([&[(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, -1)], &[(0, 1, 1), (0, 0, -1)], &[(1, 0, 1), (0, 0, -1)], &[(0, 0, 1)]], 2),
        q([&[(0, 0, 1), (1, 0, 1), (0, 1, -1), (1, 1, 1)], &[(0, 1, 1), (0, 0, 1)], &[(1, 0, 1), (0, 0, -1)], &[(0, 0, 1)]], 2),
        q([&[(0, 0, 1), (1, 0, -1), (0, 1, 1), (1, 1, 1)], &[(0, 1, 1), (0, 0, -1)], &[(1, 0, 1), (0, 0, 1)], &[(0, 0, 1)]], 2),
        q([&[(0, 0, -1), (1, 0, 1), (0, 1, 1), (1, 1, 1)], &[(0, 1, 1), (0, 0, 1)], &[(1, 0, 1), (0, 0, 1)], &[(0, 0, 1)]], 2),
    ]
}

/// The five-element generating set for low-degree units.
pub fn unit_generators() -> Vec<Quat> {
    let q = |c: [&[(u32, u32, i64)]; 4], d| Quat::from_terms(Algebra::QUV, c, d);
    let r3: &[(u32, u32, i64)] = &[(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, -1)];
    vec![
        q([&[(1, 0, 1)], &[(0, 0, 1)], &[], &[]], 1),
        q([&[(0, 1, 1)], &[], &[(0, 0, 1)], &[]], 1),
        q([&[(1, 0, 1)], &[(0, 1, 1)], &[], &[(0, 0, -1)]], 1),
        q([r3, &[(0, 1, 1), (0, 0, -1)], &[(0, 0, 1), (1, 0, -1)], &[(0, 0, -1)]], 2),
        q([r3, &[(0, 1, 1), (0, 0, -1)], &[(0, 0, 1), (1, 0, -1)], &[(0, 0, 1)]], 2),
    ]
}

/// Upper bound on brute-force candidates for [`enumerate_units`].
pub const UNIT_SEARCH_CAP: u128 = 200_000_000;

/// All norm-one quadruples with `R(1,1) = 1`, degree at most `max_degree` and
/// half-integer coefficients of absolute value at most `coeff_bound`, one
/// representative per sign class of (S, T, W).
///
/// S, T, W are enumerated; R is recovered as the square root of
/// `1 + a S^2 + b T^2 - a b W^2`, which must be a perfect square.
pub fn enumerate_units(max_degree: u32, coeff_bound: &BigRational) -> Result<Vec<Quat>, QuatError> {
    let nmax = (coeff_bound * BigRational::from_integer(2.into())).floor().to_integer().to_i64().unwrap_or(i64::MAX);
    let d = max_degree as usize;
    let mons = |k: Option<usize>| -> Vec<(usize, usize)> {
        match k {
            None => vec![],
            Some(k) => (0..=k).flat_map(|t| (0..=t).map(move |i| (i, t - i))).collect(),
        }
    };
    let ms = mons(d.checked_sub(1));
    let mw = mons(d.checked_sub(2));
    let nvars = 2 * ms.len() + mw.len();
    let base = (2 * nmax + 1) as u128;
    let count = base.checked_pow(nvars as u32).unwrap_or(u128::MAX);
    if count > UNIT_SEARCH_CAP {
        return Err(QuatError::SearchTooLarge(count, UNIT_SEARCH_CAP));
    }
    let dim = 2 * d + 3;
    let found: Vec<[Vec<i64>; 4]> = (0..count as u64)
        .into_par_iter()
        .filter_map(|idx| {
            let mut digits = Vec::with_capacity(nvars);
            let mut k = idx;
            for _ in 0..nvars {
                digits.push((k % base as u64) as i64 - nmax);
                k /= base as u64;
            }
            let (s, rest) = digits.split_at(ms.len());
            let (t, w) = rest.split_at(ms.len());
            if !leading_positive(s) || !leading_positive(t) || !leading_positive(w) {
                return None;
            }
            // all arrays hold doubled coefficients, indexed [i * dim + j]
            let s2 = dense(s, &ms, dim);
            let t2 = dense(t, &ms, dim);
            let w2 = dense(w, &mw, dim);
            let mut f = vec![0i64; dim * dim];
            f[0] = 4;
            add_times(&mut f, &square(&s2, dim), &[((2, 0), 1), ((0, 0), -1)], dim);
            add_times(&mut f, &square(&t2, dim), &[((0, 2), 1), ((0, 0), -1)], dim);
            add_times(&mut f, &square(&w2, dim), &[((2, 2), -1), ((2, 0), 1), ((0, 2), 1), ((0, 0), -1)], dim);
            let mut r2 = bivariate_sqrt(&f, dim)?;
            if r2.iter().sum::<i64>() < 0 {
                r2.iter_mut().for_each(|c| *c = -*c);
            }
            if r2.iter().any(|c| c.abs() > nmax) {
                return None;
            }
            Some([r2, s2, t2, w2])
        })
        .collect();
    let mut out: Vec<Quat> = found
        .into_iter()
        .map(|comps| {
            let [r, s, t, w] = comps.map(|c| {
                let terms: Vec<((u32, u32), i64)> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(k, v)| (((k / dim) as u32, (k % dim) as u32), *v))
                    .collect();
                RatPoly2::from_int_terms(Basis::UV, terms, 2)
            });
            Quat { algebra: Algebra::QUV, r, s, t, w }
        })
        .collect();
    out.sort_by_key(|q| (degree(q), q.display()));
    Ok(out)
}

fn leading_positive(c: &[i64]) -> bool {
    c.iter().find(|v| **v != 0).map_or(true, |v| *v > 0)
}

fn dense(c: &[i64], mons: &[(usize, usize)], dim: usize) -> Vec<i64> {
    let mut out = vec![0; dim * dim];
    for (v, &(i, j)) in c.iter().zip(mons) {
        out[i * dim + j] = *v;
    }
    out
}

fn square(p: &[i64], dim: usize) -> Vec<i64> {
    let nz: Vec<(usize, i64)> = p.iter().enumerate().filter(|(_, v)| **v != 0).map(|(k, v)| (k, *v)).collect();
    let mut out = vec![0; dim * dim];
    for &(a, x) in &nz {
        for &(b, y) in &nz {
            let (i, j) = (a / dim + b / dim, a % dim + b % dim);
            if i < dim && j < dim {
                out[i * dim + j] += x * y;
            }
        }
    }
    out
}

fn add_times(f: &mut [i64], p: &[i64], m: &[((usize, usize), i64)], dim: usize) {
    for (k, v) in p.iter().enumerate() {
        if *v == 0 {
            continue;
        }
        for &((di, dj), c) in m {
            let (i, j) = (k / dim + di, k % dim + dj);
            if i < dim && j < dim {
                f[i * dim + j] += c * v;
            }
        }
    }
}

/// Integer square root of a dense bivariate polynomial, via Kronecker packing into
/// one variable (`u^i v^j -> t^(i + j*dim)`).
fn bivariate_sqrt(f: &[i64], dim: usize) -> Option<Vec<i64>> {
    // pack: index i*dim + j -> j*dim + i so that lower u-powers come first
    let packed: Vec<i64> = (0..dim * dim).map(|k| f[(k % dim) * dim + k / dim]).collect();
    let top = packed.iter().rposition(|c| *c != 0)?;
    if top % 2 == 1 {
        return None;
    }
    let h = top / 2;
    let lead = packed[top];
    let c = (lead as f64).sqrt().round() as i64;
    if c <= 0 || c * c != lead {
        return None;
    }
    let mut q = vec![0i64; h + 1];
    q[h] = c;
    for k in 1..=h {
        let deg = top - k;
        let mut acc = packed[deg];
        for i in (h - k + 1)..=h {
            let j = deg as isize - i as isize;
            if j >= (h - k + 1) as isize && (j as usize) <= h {
                acc -= q[i] * q[j as usize];
            }
        }
        if acc % (2 * c) != 0 {
            return None;
        }
        q[h - k] = acc / (2 * c);
    }
    // verify the full square
    let mut sq = vec![0i64; 2 * h + 1];
    for (i, a) in q.iter().enumerate() {
        if *a == 0 {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            sq[i + j] += a * b;
        }
    }
    if sq[..] != packed[..=top] || packed[top + 1..].iter().any(|c| *c != 0) {
        return None;
    }
    // unpack, rejecting wrap-around in the u-degree
    let mut out = vec![0i64; dim * dim];
    for (k, v) in q.iter().enumerate() {
        if *v != 0 {
            let (j, i) = (k / dim, k % dim);
            out[i * dim + j] = *v;
        }
    }
    Some(out)
}

/// Components of the irrational-coefficient quartic unit with parameters `a`, `b`,
/// evaluated at `(u, v)`.
pub fn irrational_unit_at(a: f64, b: f64, u: f64, v: f64) -> [f64; 4] {
    [
        (1.0 - u * u) * (a - a * v * v + v * v) + u * u * v,
        (v - 1.0) * ((b - a * u) * (v + 1.0) + u * v),
        (1.0 - a) * (1.0 - v) * (1.0 - u * u) + u,
        a + b * v - u * (a - 1.0) * (v - 1.0),
    ]
}

fn uv_norm(q: [f64; 4], u: f64, v: f64) -> f64 {
    let (aa, bb) = (u * u - 1.0, v * v - 1.0);
    q[0] * q[0] - aa * q[1] * q[1] - bb * q[2] * q[2] + aa * bb * q[3] * q[3]
}

/// Max |norm - 1| of the quartic on a grid of sample points.
pub fn irrational_unit_deviation(a: f64, b: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..=10 {
        for j in 0..=10 {
            let u = -2.0 + 0.4 * i as f64;
            let v = -2.0 + 0.4 * j as f64;
            worst = worst.max((uv_norm(irrational_unit_at(a, b, u, v), u, v) - 1.0).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IrrationalUnitReport {
    pub a: f64,
    pub b: f64,
    pub deviation: f64,
    pub ok: bool,
}

fn real_root(coeffs: &[f64]) -> f64 {
    let c: Vec<C64> = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
    roots_univariate(&c)
        .expect("nonzero cubic")
        .into_iter()
        .min_by(|p, q| p.z.im.abs().total_cmp(&q.z.im.abs()))
        .map(|r| r.z.re)
        .expect("a cubic has a real root")
}

/// Solve the two cubics for their real roots and check the quartic has norm 1.
pub fn verify_irrational_unit() -> IrrationalUnitReport {
    let a = real_root(&[-1.0, 2.0, -2.0, 2.0]);
    let b = real_root(&[-1.0, 4.0, 6.0, 2.0]);
    let deviation = irrational_unit_deviation(a, b);
    IrrationalUnitReport { a, b, deviation, ok: deviation < 1e-9 }
}

/// Matrix model `[[x + y ξ1, (z + w ξ1) ξ2], [(z - w ξ1) ξ2, x - y ξ1]]` at a point,
/// with `ξ1^2 = a`, `ξ2^2 = b` there.
pub fn matrix_model(q: &Quat, p0: C64, p1: C64) -> [[C64; 2]; 2] {
    let (a, b) = match q.algebra {
        Algebra::Q0 => ((p0 + 4.0) / p0, p1 * (p1 - p0)),
        Algebra::QUV => (p0 * p0 - 1.0, p1 * p1 - 1.0),
    };
    let (x1, x2) = (a.sqrt(), b.sqrt());
    let [r, s, t, w] = q.components().map(|c| c.eval(p0, p1));
    [[r + s * x1, (t + w * x1) * x2], [(t - w * x1) * x2, r - s * x1]]
}
