//! Necessary conditions for discreteness: the three inequalities, killer-word search,
//! axis coincidence, multiple roots, multipliers at the fixed point 0, common zeros of
//! `T` and `W`, and a numeric arithmeticity screen.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cnum::{CNum, CRat, C64};
use crate::exactpoly::{Basis, RatPoly2};
use crate::roots::{roots_univariate, ser_c64};
use crate::upoly;
use crate::wordpoly::{word_polys, WordPolyError};
use crate::words::{enumerate_order2, parse_word, GoodWord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscretenessError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    WordPoly(#[from] WordPolyError),
    #[error("minimal polynomial must be monic with degree >= 1")]
    NotMonic,
    #[error("polynomial must have degree at most 1 in v")]
    DegreeInV,
}

/// `2 - 2 cos(pi/7)`.
pub fn cao_constant() -> f64 {
    2.0 - 2.0 * (std::f64::consts::PI / 7.0).cos()
}

/// Flags are `Some(true)` when the inequality holds and `None` when the test does not
/// apply (`gamma~ = 0` for the first, `gamma~ = beta` for the second, either for the third).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub jorgensen: Option<bool>,
    pub variant: Option<bool>,
    pub cao: Option<bool>,
}

impl InequalityReport {
    pub fn any_violated(&self) -> bool {
        [self.jorgensen, self.variant, self.cao].contains(&Some(false))
    }
}

/// `|a| + |b| >= 1` from the squared moduli, exactly.
fn moduli_sum_ge_one(a2: &BigRational, b2: &BigRational) -> bool {
    let one = BigRational::one();
    if *a2 >= one || *b2 >= one {
        return true;
    }
    // |b| >= 1 - |a|  <=>  2|a| >= 1 + |a|^2 - |b|^2 =: k
    let k = &one + a2 - b2;
    if !k.is_positive() {
        return true;
    }
    BigRational::from_integer(4.into()) * a2 >= &k * &k
}

pub fn inequality_tests_exact(beta: &CRat, gt: &CRat) -> InequalityReport {
    let diff = gt - beta;
    let b2 = beta.norm_sqr();
    let jorgensen = (!gt.is_zero()).then(|| moduli_sum_ge_one(&b2, &gt.norm_sqr()));
    let variant = (!diff.is_zero()).then(|| moduli_sum_ge_one(&b2, &diff.norm_sqr()));
    let cao = (!gt.is_zero() && !diff.is_zero()).then(|| {
        let prod = crate::cnum::rat_to_f64(&(gt.norm_sqr() * diff.norm_sqr()));
        prod.sqrt() >= cao_constant()
    });
    InequalityReport { jorgensen, variant, cao }
}

pub fn inequality_tests_f64(beta: C64, gt: C64) -> InequalityReport {
    let diff = gt - beta;
    let jorgensen = (gt != C64::zero()).then(|| beta.norm() + gt.norm() >= 1.0);
    let variant = (diff != C64::zero()).then(|| beta.norm() + diff.norm() >= 1.0);
    let cao = (gt != C64::zero() && diff != C64::zero()).then(|| gt.norm() * diff.norm() >= cao_constant());
    InequalityReport { jorgensen, variant, cao }
}

/// Exact when both inputs are exact.
pub fn inequality_tests(beta: &CNum, gt: &CNum) -> InequalityReport {
    match (beta, gt) {
        (CNum::Exact(b), CNum::Exact(g)) => inequality_tests_exact(b, g),
        _ => inequality_tests_f64(beta.to_c64(), gt.to_c64()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertKind {
    Jorgensen,
    Variant,
    Cao,
    SemigroupEscape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertValues {
    pub lhs: f64,
    pub rhs: f64,
}

/// A violated necessary condition. `chain` lists the composed words, outermost first:
/// `gamma~ = p_{chain[0]}(beta, p_{chain[1]}(beta, ... gamma))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub word: String,
    pub chain: Vec<String>,
    #[serde(serialize_with = "ser_c64")]
    pub beta: C64,
    #[serde(serialize_with = "ser_c64")]
    pub gamma: C64,
    pub values: CertValues,
    #[serde(skip)]
    exact_inputs: Option<(CRat, CRat)>,
}

/// Orbit values below this modulus (and nonzero) count as escape toward the fixed point 0.
pub const ESCAPE_EPS: f64 = 1e-8;
/// Orbit values above this modulus stop the iteration.
pub const ESCAPE_LARGE: f64 = 1e8;
/// Exact orbit values are demoted to floating point beyond this size in bits.
pub const EXACT_BITS_CAP: u64 = 4096;

#[derive(Debug, Clone)]
enum Val {
    Exact(CRat),
    Approx(C64),
}

impl Val {
    fn c64(&self) -> C64 {
        match self {
            Val::Exact(q) => q.to_c64(),
            Val::Approx(z) => *z,
        }
    }
}

/// `p_w(beta, .)` with `beta` fixed.
struct Univariate {
    word: GoodWord,
    exact: Option<Vec<CRat>>,
    approx: Vec<C64>,
    /// Absolute coefficient moduli, for roundoff bounds.
    abs: Vec<f64>,
}

impl Univariate {
    fn new(word: GoodWord, p: &RatPoly2, beta: &Val) -> Self {
        let (exact, approx) = match beta {
            Val::Exact(b) => {
                let e = p.coeffs_in_var1_exact(b);
                let a = e.iter().map(|c| c.to_c64()).collect();
                (Some(e), a)
            }
            Val::Approx(b) => (None, p.coeffs_in_var1(*b)),
        };
        let abs = approx.iter().map(|c| c.norm()).collect();
        Univariate { word, exact, approx, abs }
    }

    /// Next orbit value, or `None` for a (numerically) zero value.
    fn apply(&self, z: &Val) -> Option<Val> {
        match (z, &self.exact) {
            (Val::Exact(q), Some(cs)) => {
                let v = cs.iter().rev().fold(CRat::zero(), |acc, c| &(&acc * q) + c);
                if v.is_zero() {
                    None
                } else if v.bits() > EXACT_BITS_CAP {
                    Some(Val::Approx(v.to_c64()))
                } else {
                    Some(Val::Exact(v))
                }
            }
            _ => {
                let zc = z.c64();
                let v = crate::roots::horner(&self.approx, zc);
                let bound: f64 = self.abs.iter().rev().fold(0.0, |acc, c| acc * zc.norm() + c);
                if v.norm() <= 1e-9 * bound.max(1e-300) || !v.re.is_finite() || !v.im.is_finite() {
                    None
                } else {
                    Some(Val::Approx(v))
                }
            }
        }
    }
}

fn check_value(beta: &Val, v: &Val) -> Option<(CertKind, CertValues)> {
    let report = match (beta, v) {
        (Val::Exact(b), Val::Exact(g)) => inequality_tests_exact(b, g),
        _ => inequality_tests_f64(beta.c64(), v.c64()),
    };
    let (b, g) = (beta.c64(), v.c64());
    if report.jorgensen == Some(false) {
        return Some((CertKind::Jorgensen, CertValues { lhs: b.norm() + g.norm(), rhs: 1.0 }));
    }
    if report.variant == Some(false) {
        return Some((CertKind::Variant, CertValues { lhs: b.norm() + (g - b).norm(), rhs: 1.0 }));
    }
    if report.cao == Some(false) {
        return Some((CertKind::Cao, CertValues { lhs: g.norm() * (g - b).norm(), rhs: cao_constant() }));
    }
    None
}

fn to_val(x: &CNum) -> Val {
    match x {
        CNum::Exact(q) => Val::Exact(q.clone()),
        CNum::Approx(z) => Val::Approx(*z),
    }
}

/// Killer-word search prepared for one `beta`; reusable across many `gamma`.
pub struct KillerSearch {
    beta: Val,
    words: Vec<Univariate>,
    max_depth: usize,
}

impl KillerSearch {
    /// Words in breadth-first order (syllables, then max |exponent|, then lexicographic),
    /// truncated to `word_budget`.
    pub fn new(beta: &CNum, max_depth: usize, word_budget: usize) -> Result<Self, DiscretenessError> {
        let beta = to_val(beta);
        let mut words = Vec::new();
        let (mut m, mut e) = (1usize, 1i64);
        // grow the enumeration until it covers the budget
        let list = loop {
            let list = enumerate_order2(m, e);
            if list.len() >= word_budget || m >= 12 {
                break list;
            }
            m += 1;
            e = (e + 1).min(6);
        };
        let list: Vec<GoodWord> = sorted_search_order(list).into_iter().take(word_budget).collect();
        let polys: Vec<_> = list.par_iter().map(word_polys).collect::<Result<_, _>>()?;
        for (w, wp) in list.into_iter().zip(polys) {
            words.push(Univariate::new(w, &wp.p, &beta));
        }
        Ok(KillerSearch { beta, words, max_depth })
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    /// First certificate in word order; per word, orbit depth 1..=max_depth.
    pub fn search(&self, gamma: &CNum) -> Option<Certificate> {
        let g0 = to_val(gamma);
        let exact_inputs = match (&self.beta, &g0) {
            (Val::Exact(b), Val::Exact(g)) => Some((b.clone(), g.clone())),
            _ => None,
        };
        let found = self
            .words
            .par_iter()
            .enumerate()
            .filter_map(|(k, u)| self.orbit(u, &g0).map(|(depth, kind, values)| (k, depth, kind, values)))
            .min_by_key(|(k, ..)| *k)?;
        let (k, depth, kind, values) = found;
        let word = self.words[k].word.to_string();
        Some(Certificate {
            kind,
            chain: vec![word.clone(); depth],
            word,
            beta: self.beta.c64(),
            gamma: g0.c64(),
            values,
            exact_inputs,
        })
    }

    fn orbit(&self, u: &Univariate, g0: &Val) -> Option<(usize, CertKind, CertValues)> {
        let mut z = g0.clone();
        for depth in 1..=self.max_depth {
            z = u.apply(&z)?;
            if let Some((kind, values)) = check_value(&self.beta, &z) {
                return Some((depth, kind, values));
            }
            let n = z.c64().norm();
            if n < ESCAPE_EPS {
                return Some((depth, CertKind::SemigroupEscape, CertValues { lhs: n, rhs: ESCAPE_EPS }));
            }
            if n > ESCAPE_LARGE {
                return None;
            }
        }
        None
    }
}

fn sorted_search_order(mut list: Vec<GoodWord>) -> Vec<GoodWord> {
    let key = |w: &GoodWord| {
        let rs: Vec<i64> = w.syllables.iter().map(|s| s.1).collect();
        (w.m(), rs.iter().map(|r| r.abs()).max().unwrap_or(0), rs)
    };
    list.sort_by_key(key);
    list
}

/// Breadth-first search for a violated inequality among `p_w(beta, gamma)` and their
/// iterates. `None` is inconclusive.
pub fn killer_search(
    beta: &CNum,
    gamma: &CNum,
    max_depth: usize,
    word_budget: usize,
) -> Result<Option<Certificate>, DiscretenessError> {
    Ok(KillerSearch::new(beta, max_depth, word_budget)?.search(gamma))
}

/// Recompute the chain from scratch and confirm the violation.
pub fn validate_certificate(c: &Certificate) -> bool {
    let (beta, gamma) = match &c.exact_inputs {
        Some((b, g)) => (Val::Exact(b.clone()), Val::Exact(g.clone())),
        None => (Val::Approx(c.beta), Val::Approx(c.gamma)),
    };
    let mut z = gamma;
    for wd in c.chain.iter().rev() {
        let Ok(w) = parse_word(wd, true) else { return false };
        let Ok(wp) = word_polys(&w) else { return false };
        match Univariate::new(w, &wp.p, &beta).apply(&z) {
            Some(v) => z = v,
            None => return false,
        }
    }
    let got = match c.kind {
        CertKind::SemigroupEscape => {
            let n = z.c64().norm();
            (n < ESCAPE_EPS).then_some(CertValues { lhs: n, rhs: ESCAPE_EPS })
        }
        kind => check_value(&beta, &z).filter(|(k, _)| *k == kind).map(|(_, v)| v),
    };
    got.is_some_and(|v| (v.lhs - c.values.lhs).abs() <= 1e-9 * (1.0 + c.values.lhs.abs()) && v.lhs < v.rhs)
}

impl Certificate {
    /// Certificate from a recomputation with floating-point inputs only.
    pub fn approx_inputs(&self) -> Self {
        Certificate { exact_inputs: None, ..self.clone() }
    }
}

enum Pair {
    Exact(CRat, CRat),
    Approx(C64, C64),
}

fn pair(beta: &CNum, gamma: &CNum) -> Pair {
    match (beta, gamma) {
        (CNum::Exact(b), CNum::Exact(g)) => Pair::Exact(b.clone(), g.clone()),
        _ => Pair::Approx(beta.to_c64(), gamma.to_c64()),
    }
}

fn check_axis_pre(beta: &CNum, gamma: &CNum) -> Result<(), DiscretenessError> {
    let (b, g) = (beta.to_c64(), gamma.to_c64());
    let bad = match pair(beta, gamma) {
        Pair::Exact(b, g) => (&b + &CRat::from_int(4)).is_zero() || g.is_zero() || (&g - &b).is_zero(),
        Pair::Approx(..) => b == C64::new(-4.0, 0.0) || g == C64::zero() || g == b,
    };
    if bad {
        return Err(DiscretenessError::Precondition(format!("need beta != -4 and gamma not in {{0, beta}}, got ({b}, {g})")));
    }
    Ok(())
}

/// `t_w(beta, gamma) = w_w(beta, gamma) = 0`: exactly for exact inputs, else to 1e-9.
pub fn axis_coincidence(w: &GoodWord, beta: &CNum, gamma: &CNum) -> Result<bool, DiscretenessError> {
    check_axis_pre(beta, gamma)?;
    let wp = word_polys(w)?;
    Ok(match pair(beta, gamma) {
        Pair::Exact(b, g) => wp.t.eval_exact(&b, &g).is_zero() && wp.w.eval_exact(&b, &g).is_zero(),
        Pair::Approx(b, g) => wp.t.eval(b, g).norm() < 1e-9 && wp.w.eval(b, g).norm() < 1e-9,
    })
}

/// `gamma` is a root of `p_w(beta, .)` of multiplicity at least 2.
pub fn multiple_root_check(w: &GoodWord, beta: &CNum, gamma: &CNum) -> Result<bool, DiscretenessError> {
    let wp = word_polys(w)?;
    let dp = wp.p.derivative(1);
    Ok(match pair(beta, gamma) {
        Pair::Exact(b, g) => wp.p.eval_exact(&b, &g).is_zero() && dp.eval_exact(&b, &g).is_zero(),
        Pair::Approx(b, g) => {
            let scale = 1.0 + g.norm().powi(wp.p.degree1().unwrap_or(0) as i32);
            wp.p.eval(b, g).norm() < 1e-9 * scale && dp.eval(b, g).norm() < 1e-9 * scale
        }
    })
}

/// Coefficient of `z` in `p_w(x, z)`: the multiplier of the fixed point 0.
pub fn multiplier_at_zero(w: &GoodWord) -> Result<RatPoly2, DiscretenessError> {
    let wp = word_polys(w)?;
    let terms = wp.p.terms().into_iter().filter(|((_, j), _)| *j == 1).map(|((i, _), c)| ((i, 0), c));
    Ok(RatPoly2::from_terms(Basis::XZ, terms))
}

/// `dp_w/dz (x, 0)`, the same quantity by differentiation.
pub fn multiplier_by_derivative(w: &GoodWord) -> Result<RatPoly2, DiscretenessError> {
    let wp = word_polys(w)?;
    let x = RatPoly2::var0(Basis::XZ);
    Ok(wp.p.derivative(1).substitute(&x, &RatPoly2::zero(Basis::XZ)).expect("same basis"))
}

/// Ascending coefficients in the first variable of a polynomial free of the second.
fn univariate_in_var0(p: &RatPoly2) -> Vec<BigRational> {
    let d = p.degree0().unwrap_or(0);
    upoly::trim((0..=d).map(|i| p.coeff(i, 0)).collect())
}

fn from_univariate(basis: Basis, c: &[BigRational]) -> RatPoly2 {
    RatPoly2::from_terms(basis, c.iter().enumerate().map(|(i, c)| ((i as u32, 0), c.clone())))
}

/// Common zeros of two polynomials of degree at most 1 in the second variable.
#[derive(Debug, Clone)]
pub struct CommonZeros {
    /// Monic factor in the first variable alone shared by both; each of its roots gives a
    /// whole line of common zeros. Empty when there is none.
    pub shared_factor: Vec<BigRational>,
    pub rational_points: Vec<(BigRational, BigRational)>,
    /// All isolated common zeros, numerically.
    pub points: Vec<(C64, C64)>,
}

/// Solve `t = w = 0` for `t = t1 v + t0`, `w = w1 v + w0`: divide out the common factor
/// of all four coefficients, then take the roots of `t1 w0 - t0 w1` and back-substitute.
pub fn common_zeros(t: &RatPoly2, w: &RatPoly2) -> Result<CommonZeros, DiscretenessError> {
    if t.degree1().unwrap_or(0) > 1 || w.degree1().unwrap_or(0) > 1 {
        return Err(DiscretenessError::DegreeInV);
    }
    let parts = |p: &RatPoly2| -> [Vec<BigRational>; 2] {
        let s = p.split_var1();
        let get = |k: usize| s.get(k).map(univariate_in_var0).unwrap_or_default();
        [get(0), get(1)]
    };
    let [mut t0, mut t1] = parts(t);
    let [mut w0, mut w1] = parts(w);
    let mut shared: Vec<BigRational> = vec![];
    for c in [&t0, &t1, &w0, &w1] {
        shared = if shared.is_empty() { upoly::monic(c) } else { upoly::gcd(&shared, c) };
    }
    if upoly::degree(&shared).unwrap_or(0) > 0 {
        for c in [&mut t0, &mut t1, &mut w0, &mut w1] {
            *c = upoly::divrem(c, &shared).0;
        }
    } else {
        shared = vec![];
    }
    let res = upoly::sub(&upoly::mul(&t1, &w0), &upoly::mul(&t0, &w1));
    let (tt, ww) = (
        &(&from_univariate(t.basis(), &t1) * &RatPoly2::var1(t.basis())) + &from_univariate(t.basis(), &t0),
        &(&from_univariate(w.basis(), &w1) * &RatPoly2::var1(w.basis())) + &from_univariate(w.basis(), &w0),
    );
    let mut rational_points = Vec::new();
    let mut points = Vec::new();
    if res.is_empty() {
        if t1.is_empty() && w1.is_empty() {
            // both free of v and coprime after removing the shared factor
            return Ok(CommonZeros { shared_factor: shared, rational_points: vec![], points: vec![] });
        }
        return Err(DiscretenessError::Precondition("t and w are proportional; zero set is a curve".into()));
    }
    for (u, _) in upoly::rational_roots(&res) {
        let (a1, a0) = (upoly::eval(&t1, &u), upoly::eval(&t0, &u));
        let (b1, b0) = (upoly::eval(&w1, &u), upoly::eval(&w0, &u));
        let v = if !a1.is_zero() {
            Some(-a0 / a1)
        } else if !b1.is_zero() {
            Some(-b0 / b1)
        } else {
            None
        };
        if let Some(v) = v {
            if tt.eval_rat(&u, &v).is_zero() && ww.eval_rat(&u, &v).is_zero() {
                rational_points.push((u, v));
            }
        }
    }
    let rc: Vec<C64> = res.iter().map(|c| C64::new(crate::cnum::rat_to_f64(c), 0.0)).collect();
    let fc = |c: &[BigRational], z: C64| crate::roots::horner(&c.iter().map(|c| C64::new(crate::cnum::rat_to_f64(c), 0.0)).collect::<Vec<_>>(), z);
    if upoly::degree(&res).unwrap_or(0) > 0 {
        for r in roots_univariate(&rc).map_err(|e| DiscretenessError::Precondition(e.to_string()))? {
            let u = r.z;
            let (a1, a0, b1, b0) = (fc(&t1, u), fc(&t0, u), fc(&w1, u), fc(&w0, u));
            let size = |c: &[BigRational]| c.iter().map(|c| crate::cnum::rat_to_f64(c).abs()).sum::<f64>() * u.norm().max(1.0).powi(c.len() as i32);
            let (st, sw) = (size(&t1) + size(&t0), size(&w1) + size(&w0));
            // both leading coefficients vanish: the common zero runs off to v = infinity
            if a1.norm() <= 1e-8 * st && b1.norm() <= 1e-8 * sw {
                continue;
            }
            let v = if a1.norm() / st >= b1.norm() / sw { -a0 / a1 } else { -b0 / b1 };
            let rt = (a1 * v + a0).norm() / (st * (1.0 + v.norm()));
            let rw = (b1 * v + b0).norm() / (sw * (1.0 + v.norm()));
            if rt < 1e-9 && rw < 1e-9 {
                points.push((u, v));
            }
        }
    }
    Ok(CommonZeros { shared_factor: shared, rational_points, points })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArithReport {
    pub pass: bool,
    pub degree: usize,
    pub real_roots: Vec<f64>,
    pub complex_pairs: usize,
    pub v_at_real_roots: Vec<f64>,
    pub irreducible: Option<bool>,
    pub diagnostics: Vec<String>,
}

/// Screen for the arithmeticity corollary: `u` a root of a monic irreducible integer
/// polynomial with exactly one complex-conjugate pair of roots and all real roots in
/// (-1, 1), and `v = v_expr(u)` real in (-1, 1) at every real root. Irreducibility is
/// settled by a rational root test and by irreducibility modulo small primes; when
/// neither decides, it is reported as unverified.
pub fn arithmeticity_screen(minpoly: &[i64], v_expr: &[i64]) -> Result<ArithReport, DiscretenessError> {
    let n = minpoly.iter().rposition(|&c| c != 0).ok_or(DiscretenessError::NotMonic)?;
    if n == 0 || minpoly[n] != 1 {
        return Err(DiscretenessError::NotMonic);
    }
    let mp = &minpoly[..=n];
    let mut diagnostics = Vec::new();
    let q: Vec<BigRational> = mp.iter().map(|&c| BigRational::from_integer(c.into())).collect();
    let irreducible = if n > 1 && !upoly::rational_roots(&q).is_empty() {
        diagnostics.push("has a rational root: reducible".into());
        Some(false)
    } else if n == 1 {
        Some(true)
    } else {
        match small_primes().find(|&p| irreducible_mod_p(mp, p)) {
            Some(p) => {
                diagnostics.push(format!("irreducible modulo {p}"));
                Some(true)
            }
            None => {
                diagnostics.push("irreducibility not verified: reducible modulo every tested prime".into());
                None
            }
        }
    };
    let c: Vec<C64> = mp.iter().map(|&c| C64::new(c as f64, 0.0)).collect();
    let roots = roots_univariate(&c).map_err(|e| DiscretenessError::Precondition(e.to_string()))?;
    let mut real_roots = Vec::new();
    let mut nonreal = 0;
    for r in &roots {
        if r.z.im.abs() <= 1e-9 * r.z.norm().max(1.0) {
            real_roots.extend(std::iter::repeat(r.z.re).take(r.multiplicity));
        } else {
            nonreal += r.multiplicity;
        }
    }
    let complex_pairs = nonreal / 2;
    let v_at: Vec<f64> = real_roots.iter().map(|&x| v_expr.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)).collect();
    let mut pass = irreducible != Some(false);
    if complex_pairs != 1 {
        diagnostics.push(format!("{complex_pairs} complex-conjugate pairs, need exactly 1"));
        pass = false;
    }
    if let Some(x) = real_roots.iter().find(|x| x.abs() >= 1.0) {
        diagnostics.push(format!("real root {x} outside (-1, 1)"));
        pass = false;
    }
    if let Some(y) = v_at.iter().find(|y| y.abs() >= 1.0) {
        diagnostics.push(format!("v = {y} at a real root, outside (-1, 1)"));
        pass = false;
    }
    Ok(ArithReport { pass, degree: n, real_roots, complex_pairs, v_at_real_roots: v_at, irreducible, diagnostics })
}

fn small_primes() -> impl Iterator<Item = u64> {
    (2u64..200).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
}

// Polynomials over F_p as ascending Vec<u64>.

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let (mut b, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = fp_trim(a.to_vec());
    let dm = m.len() - 1;
    let inv = fp_inv(m[dm], p);
    while r.len() > dm {
        let d = r.len() - 1;
        let c = r[d] * inv % p;
        for (k, mk) in m.iter().enumerate() {
            let idx = d - dm + k;
            r[idx] = (r[idx] + p - c * mk % p) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_rem(&out, m, p)
}

fn fp_powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![1u64];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = fp_mulmod(&r, &b, m, p);
        }
        b = fp_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod f` by repeated p-th powers.
fn frobenius(f: &[u64], k: usize, p: u64) -> Vec<u64> {
    let mut x = vec![0, 1];
    for _ in 0..k {
        x = fp_powmod(&x, p as u128, f, p);
    }
    x
}

fn fp_sub_x(a: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    if a.len() < 2 {
        a.resize(2, 0);
    }
    a[1] = (a[1] + p - 1) % p;
    fp_trim(a)
}

/// Rabin's test for a monic integer polynomial reduced modulo `p`.
fn irreducible_mod_p(f: &[i64], p: u64) -> bool {
    let fp: Vec<u64> = f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    let n = fp.len() - 1;
    if !fp_rem(&frobenius(&fp, n, p), &fp, p).eq(&fp_rem(&[0, 1], &fp, p)) {
        return false;
    }
    let primes: Vec<usize> = (2..=n).filter(|&q| n % q == 0 && (2..q).all(|d| q % d != 0)).collect();
    primes.iter().all(|&q| {
        let h = fp_sub_x(&frobenius(&fp, n / q, p), p);
        fp_gcd(&fp, &h, p).len() == 1
    })
}

/// Exact integer coefficient of a rational, for callers that need integrality.
pub fn to_i64(q: &BigRational) -> Option<i64> {
    q.is_integer().then(|| q.to_integer()).and_then(|n: BigInt| n.to_i64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn ex(s: &str) -> CNum {
        s.parse().unwrap()
    }

    #[test]
    fn inequality_examples() {
        let r = inequality_tests(&ex("0"), &ex("0.5"));
        assert_eq!(r.jorgensen, Some(false));
        let r = inequality_tests(&ex("0"), &ex("1"));
        assert_eq!(r.jorgensen, Some(true));
        let r = inequality_tests(&ex("0.05"), &ex("0.05"));
        assert_eq!(r.cao, None);
        assert_eq!(r.variant, None);
        // exact boundary in the complex plane: |0.6 + 0.8i| = 1
        let r = inequality_tests(&ex("0"), &ex("0.6+0.8i"));
        assert_eq!(r.jorgensen, Some(true));
        let r = inequality_tests(&ex("0.3"), &ex("0.42+0.56i"));
        assert_eq!(r.jorgensen, Some(true));
        let r = inequality_tests(&ex("0.3"), &ex("0.42+0.55i"));
        assert_eq!(r.jorgensen, Some(false));
    }

    #[test]
    fn depth_zero_certificate() {
        let c = killer_search(&ex("-0.5"), &ex("0.4"), 5, 10).unwrap().unwrap();
        assert_eq!(c.kind, CertKind::Jorgensen);
        assert_eq!(c.chain, vec!["b".to_string()]);
        assert!(validate_certificate(&c));
    }

    #[test]
    fn free_group_point_inconclusive() {
        assert!(killer_search(&ex("0"), &ex("2"), 6, 200).unwrap().is_none());
        assert!(killer_search(&ex("0"), &ex("4"), 6, 200).unwrap().is_none());
    }

    #[test]
    fn orbit_certificate_revalidates() {
        // |beta| >= 1 disables the inequalities with beta, leaving cao and escape
        let s = KillerSearch::new(&ex("1.5"), 30, 40).unwrap();
        if let Some(c) = s.search(&ex("1.4+0.2i")) {
            assert!(validate_certificate(&c), "{c:?}");
            assert!(validate_certificate(&c.approx_inputs()), "{c:?}");
        }
    }

    #[test]
    fn multipliers() {
        let cases = [("bab", vec![(1, -1)]), ("babab", vec![(0, 1), (1, 2), (2, 1)]), ("baba^-1b", vec![(0, 1), (1, -2)])];
        for (wd, want) in cases {
            let w = parse_word(wd, true).unwrap();
            let m = multiplier_at_zero(&w).unwrap();
            let want = RatPoly2::from_int_terms(Basis::XZ, want.into_iter().map(|(i, c)| ((i, 0), c)), 1);
            assert_eq!(m, want, "{wd}");
            assert_eq!(multiplier_by_derivative(&w).unwrap(), m);
        }
        let w = parse_word("ba^-2bababa^-2bab", true).unwrap();
        assert!(multiplier_at_zero(&w).unwrap().is_zero());
    }

    #[test]
    fn multiple_roots() {
        let w = parse_word("babab", true).unwrap();
        assert!(multiple_root_check(&w, &ex("0.3"), &ex("1.3")).unwrap());
        let w = parse_word("bab", true).unwrap();
        assert!(!multiple_root_check(&w, &ex("0.6"), &ex("0.3")).unwrap());
    }

    #[test]
    fn arithmeticity() {
        let r = arithmeticity_screen(&[-1, 0, 1, 1], &[0, 1]).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.irreducible, Some(true));
        assert!((r.real_roots[0] - 0.7548776662).abs() < 1e-9);
        let r = arithmeticity_screen(&[1, 0, 1], &[0, 1]).unwrap();
        assert!(r.pass, "{r:?}");
        let r = arithmeticity_screen(&[-1, -1, 0, 1], &[0, 1]).unwrap();
        assert!(!r.pass);
        assert!(arithmeticity_screen(&[1, 2], &[0, 1]).is_err());
        // (z^2+1)(z^2-2) has no rational root and reduces modulo every prime
        let r = arithmeticity_screen(&[-2, 0, -1, 0, 1], &[0, 1]).unwrap();
        assert_eq!(r.irreducible, None);
    }

    #[test]
    fn integer_helper() {
        assert_eq!(to_i64(&BigRational::from_i64(7).unwrap()), Some(7));
    }
}
