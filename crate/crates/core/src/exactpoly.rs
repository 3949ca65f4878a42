//! Sparse bivariate polynomials with exact rational coefficients.
//!
//! Stored as integer numerators over one positive common denominator, kept in
//! lowest terms. Products then cost big-integer multiplies only, with a single
//! gcd pass at the end.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnum::{rat_to_f64, CRat, C64};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("basis mismatch: {0:?} vs {1:?}")]
    BasisMismatch(Basis, Basis),
    #[error("inexact division")]
    InexactDivision,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("non-integer coefficients where integers are required")]
    NotIntegral,
    #[error("bad polynomial JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    XZ,
    UV,
}

impl Basis {
    pub fn names(self) -> (&'static str, &'static str) {
        match self {
            Basis::XZ => ("x", "z"),
            Basis::UV => ("u", "v"),
        }
    }
}

pub type Exp = (u32, u32);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly2 {
    basis: Basis,
    den: BigInt,
    num: BTreeMap<Exp, BigInt>,
}

fn grlex(e: &Exp) -> (u32, u32, u32) {
    (e.0 + e.1, e.0, e.1)
}

impl RatPoly2 {
    pub fn zero(basis: Basis) -> Self {
        RatPoly2 { basis, den: BigInt::one(), num: BTreeMap::new() }
    }

    pub fn one(basis: Basis) -> Self {
        Self::from_int(basis, 1)
    }

    pub fn from_int(basis: Basis, c: i64) -> Self {
        Self::monomial(basis, 0, 0, BigRational::from_integer(c.into()))
    }

    pub fn constant(basis: Basis, c: BigRational) -> Self {
        Self::monomial(basis, 0, 0, c)
    }

    pub fn monomial(basis: Basis, i: u32, j: u32, c: BigRational) -> Self {
        Self::from_terms(basis, [((i, j), c)])
    }

    /// First variable (x or u).
    pub fn var0(basis: Basis) -> Self {
        Self::monomial(basis, 1, 0, BigRational::one())
    }

    /// Second variable (z or v).
    pub fn var1(basis: Basis) -> Self {
        Self::monomial(basis, 0, 1, BigRational::one())
    }

    /// Build from integer coefficients `c[(i,j)]` and a common denominator.
    pub fn from_int_terms<I: IntoIterator<Item = (Exp, i64)>>(basis: Basis, terms: I, den: i64) -> Self {
        let mut num = BTreeMap::new();
        for (e, c) in terms {
            *num.entry(e).or_insert_with(BigInt::zero) += BigInt::from(c);
        }
        Self::normalized(basis, num, BigInt::from(den))
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, BigRational)>>(basis: Basis, terms: I) -> Self {
        let terms: Vec<(Exp, BigRational)> = terms.into_iter().collect();
        let mut den = BigInt::one();
        for (_, c) in &terms {
            den = den.lcm(c.denom());
        }
        let mut num = BTreeMap::new();
        for (e, c) in terms {
            let n = c.numer() * (&den / c.denom());
            *num.entry(e).or_insert_with(BigInt::zero) += n;
        }
        Self::normalized(basis, num, den)
    }

    fn normalized(basis: Basis, mut num: BTreeMap<Exp, BigInt>, mut den: BigInt) -> Self {
        num.retain(|_, c| !c.is_zero());
        if num.is_empty() {
            return Self::zero(basis);
        }
        if den.is_negative() {
            den = -den;
            for c in num.values_mut() {
                *c = -&*c;
            }
        }
        let mut g = den.clone();
        for c in num.values() {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            den /= &g;
            for c in num.values_mut() {
                *c /= &g;
            }
        }
        RatPoly2 { basis, den, num }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.len() == 1 && self.num.get(&(0, 0)).is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.num.keys().all(|&e| e == (0, 0))
    }

    /// Common denominator (positive, lowest terms).
    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Integer numerators over [`Self::denominator`].
    pub fn numerators(&self) -> impl Iterator<Item = (&Exp, &BigInt)> {
        self.num.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.num.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        match self.num.get(&(i, j)) {
            Some(c) => BigRational::new(c.clone(), self.den.clone()),
            None => BigRational::zero(),
        }
    }

    /// Terms in graded lexicographic order, highest first.
    pub fn terms(&self) -> Vec<(Exp, BigRational)> {
        let mut v: Vec<(Exp, BigRational)> =
            self.num.iter().map(|(e, c)| (*e, BigRational::new(c.clone(), self.den.clone()))).collect();
        v.sort_by(|a, b| grlex(&b.0).cmp(&grlex(&a.0)));
        v
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(0, 0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.num.keys().map(|e| e.0 + e.1).max()
    }

    pub fn degree0(&self) -> Option<u32> {
        self.num.keys().map(|e| e.0).max()
    }

    pub fn degree1(&self) -> Option<u32> {
        self.num.keys().map(|e| e.1).max()
    }

    fn check(&self, o: &RatPoly2) -> Result<(), PolyError> {
        if self.basis != o.basis {
            Err(PolyError::BasisMismatch(self.basis, o.basis))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, o: &RatPoly2) -> Result<RatPoly2, PolyError> {
        self.check(o)?;
        Ok(self.add_signed(o, false))
    }

    pub fn try_sub(&self, o: &RatPoly2) -> Result<RatPoly2, PolyError> {
        self.check(o)?;
        Ok(self.add_signed(o, true))
    }

    pub fn try_mul(&self, o: &RatPoly2) -> Result<RatPoly2, PolyError> {
        self.check(o)?;
        Ok(self.mul_unchecked(o))
    }

    fn add_signed(&self, o: &RatPoly2, negate: bool) -> RatPoly2 {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -o } else { o.clone() };
        }
        let g = self.den.gcd(&o.den);
        let fa = &o.den / &g;
        let fb = &self.den / &g;
        let den = &self.den * &fa;
        let mut num: BTreeMap<Exp, BigInt> = self.num.iter().map(|(e, c)| (*e, c * &fa)).collect();
        for (e, c) in &o.num {
            let v = c * &fb;
            let slot = num.entry(*e).or_insert_with(BigInt::zero);
            if negate {
                *slot -= v;
            } else {
                *slot += v;
            }
        }
        Self::normalized(self.basis, num, den)
    }

    fn mul_unchecked(&self, o: &RatPoly2) -> RatPoly2 {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.basis);
        }
        let mut num: BTreeMap<Exp, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.num {
            for (eb, cb) in &o.num {
                let e = (ea.0 + eb.0, ea.1 + eb.1);
                let p = ca * cb;
                match num.get_mut(&e) {
                    Some(slot) => *slot += p,
                    None => {
                        num.insert(e, p);
                    }
                }
            }
        }
        Self::normalized(self.basis, num, &self.den * &o.den)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly2 {
        if c.is_zero() {
            return Self::zero(self.basis);
        }
        let num = self.num.iter().map(|(e, v)| (*e, v * c.numer())).collect();
        Self::normalized(self.basis, num, &self.den * c.denom())
    }

    pub fn scale_int(&self, c: i64) -> RatPoly2 {
        self.scale(&BigRational::from_integer(c.into()))
    }

    pub fn pow(&self, n: u32) -> RatPoly2 {
        let mut result = Self::one(self.basis);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiply by `var0^i var1^j`.
    pub fn shift(&self, i: u32, j: u32) -> RatPoly2 {
        RatPoly2 {
            basis: self.basis,
            den: self.den.clone(),
            num: self.num.iter().map(|(e, c)| ((e.0 + i, e.1 + j), c.clone())).collect(),
        }
    }

    /// Divide by `var0^i var1^j`; `None` when some term is not divisible.
    pub fn div_monomial(&self, i: u32, j: u32) -> Option<RatPoly2> {
        let mut num = BTreeMap::new();
        for (e, c) in &self.num {
            if e.0 < i || e.1 < j {
                return None;
            }
            num.insert((e.0 - i, e.1 - j), c.clone());
        }
        Some(RatPoly2 { basis: self.basis, den: self.den.clone(), num })
    }

    pub fn eval(&self, a: C64, b: C64) -> C64 {
        let d0 = self.degree0().unwrap_or(0) as usize;
        let d1 = self.degree1().unwrap_or(0) as usize;
        let pa = powers(a, d0);
        let pb = powers(b, d1);
        let mut acc = C64::new(0.0, 0.0);
        for (e, c) in &self.num {
            acc += pa[e.0 as usize] * pb[e.1 as usize] * big_to_f64(c);
        }
        acc / big_to_f64(&self.den)
    }

    pub fn eval_rat(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let d0 = self.degree0().unwrap_or(0) as usize;
        let d1 = self.degree1().unwrap_or(0) as usize;
        let pa = rat_powers(a, d0);
        let pb = rat_powers(b, d1);
        let mut acc = BigRational::zero();
        for (e, c) in &self.num {
            acc += &pa[e.0 as usize] * &pb[e.1 as usize] * c;
        }
        acc / BigRational::from_integer(self.den.clone())
    }

    pub fn eval_exact(&self, a: &CRat, b: &CRat) -> CRat {
        let d0 = self.degree0().unwrap_or(0) as usize;
        let d1 = self.degree1().unwrap_or(0) as usize;
        let mut pa = vec![CRat::one()];
        for k in 0..d0 {
            pa.push(&pa[k] * a);
        }
        let mut pb = vec![CRat::one()];
        for k in 0..d1 {
            pb.push(&pb[k] * b);
        }
        let mut acc = CRat::zero();
        for (e, c) in &self.num {
            let t = (&pa[e.0 as usize] * &pb[e.1 as usize]).scale(&BigRational::from_integer(c.clone()));
            acc = &acc + &t;
        }
        acc.scale(&BigRational::new(BigInt::one(), self.den.clone()))
    }

    /// Coefficients (ascending powers of the second variable) after fixing the first variable.
    pub fn coeffs_in_var1(&self, a: C64) -> Vec<C64> {
        let d1 = match self.degree1() {
            Some(d) => d as usize,
            None => return vec![],
        };
        let pa = powers(a, self.degree0().unwrap_or(0) as usize);
        let mut out = vec![C64::new(0.0, 0.0); d1 + 1];
        let den = big_to_f64(&self.den);
        for (e, c) in &self.num {
            out[e.1 as usize] += pa[e.0 as usize] * big_to_f64(c) / den;
        }
        out
    }

    /// Exact version of [`Self::coeffs_in_var1`].
    pub fn coeffs_in_var1_exact(&self, a: &CRat) -> Vec<CRat> {
        let d1 = match self.degree1() {
            Some(d) => d as usize,
            None => return vec![],
        };
        let mut pa = vec![CRat::one()];
        for k in 0..self.degree0().unwrap_or(0) as usize {
            pa.push(&pa[k] * a);
        }
        let mut out = vec![CRat::zero(); d1 + 1];
        for (e, c) in &self.num {
            let t = pa[e.0 as usize].scale(&BigRational::new(c.clone(), self.den.clone()));
            out[e.1 as usize] = &out[e.1 as usize] + &t;
        }
        out
    }

    /// Coefficient polynomials in the first variable, indexed by power of the second.
    pub fn split_var1(&self) -> Vec<RatPoly2> {
        let d1 = match self.degree1() {
            Some(d) => d as usize,
            None => return vec![],
        };
        let mut parts: Vec<BTreeMap<Exp, BigInt>> = vec![BTreeMap::new(); d1 + 1];
        for (e, c) in &self.num {
            parts[e.1 as usize].insert((e.0, 0), c.clone());
        }
        parts.into_iter().map(|num| Self::normalized(self.basis, num, self.den.clone())).collect()
    }

    /// `p(var0, q(var0, var1))`.
    pub fn compose_second(&self, q: &RatPoly2) -> Result<RatPoly2, PolyError> {
        self.check(q)?;
        let parts = self.split_var1();
        let mut acc = Self::zero(self.basis);
        for part in parts.iter().rev() {
            acc = &(&acc * q) + part;
        }
        Ok(acc)
    }

    /// `p(X, Z)` for polynomials `X`, `Z` in a common (possibly different) basis.
    pub fn substitute(&self, x: &RatPoly2, z: &RatPoly2) -> Result<RatPoly2, PolyError> {
        x.check(z)?;
        let target = x.basis;
        let parts = self.split_var1();
        let d0 = self.degree0().unwrap_or(0);
        let mut xp = vec![Self::one(target)];
        for k in 0..d0 as usize {
            xp.push(&xp[k] * x);
        }
        let mut acc = Self::zero(target);
        for part in parts.iter().rev() {
            let mut inner = Self::zero(target);
            for (e, c) in &part.num {
                let t = xp[e.0 as usize].scale(&BigRational::from_integer(c.clone()));
                inner = &inner + &t;
            }
            let inner = inner.scale(&BigRational::new(BigInt::one(), part.den.clone()));
            acc = &(&acc * z) + &inner;
        }
        Ok(acc)
    }

    /// Exact quotient `p / d`, or `None` if `d` does not divide `p`.
    pub fn divides_exactly(&self, d: &RatPoly2) -> Option<RatPoly2> {
        if self.basis != d.basis || d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.basis));
        }
        if d.num.len() == 1 {
            let (e, c) = d.num.iter().next().unwrap();
            let q = self.div_monomial(e.0, e.1)?;
            return Some(q.scale(&BigRational::new(d.den.clone(), c.clone())));
        }
        // Work with rational coefficients keyed in graded-lex order so the leading
        // term is the last map entry.
        let key = |e: &Exp| (e.0 + e.1, e.0, e.1);
        let mut rem: BTreeMap<(u32, u32, u32), BigRational> =
            self.num.iter().map(|(e, c)| (key(e), BigRational::new(c.clone(), self.den.clone()))).collect();
        let dterms: Vec<(Exp, BigRational)> =
            d.num.iter().map(|(e, c)| (*e, BigRational::new(c.clone(), d.den.clone()))).collect();
        let (dle, dlc) = dterms.iter().max_by_key(|(e, _)| key(e)).cloned().unwrap();
        let mut quot: Vec<(Exp, BigRational)> = Vec::new();
        while let Some((&(_, ri, rj), rc)) = rem.iter().next_back() {
            if ri < dle.0 || rj < dle.1 {
                return None;
            }
            let qe = (ri - dle.0, rj - dle.1);
            let qc = rc / &dlc;
            for (e, c) in &dterms {
                let k = key(&(e.0 + qe.0, e.1 + qe.1));
                let v = &qc * c;
                let slot = rem.entry(k).or_insert_with(BigRational::zero);
                *slot -= v;
                if slot.is_zero() {
                    rem.remove(&k);
                }
            }
            quot.push((qe, qc));
        }
        Some(Self::from_terms(self.basis, quot))
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Every coefficient has denominator 1 or 2.
    pub fn is_half_integer(&self) -> bool {
        self.den.is_one() || self.den == BigInt::from(2)
    }

    /// Reduce an integer polynomial mod 2.
    pub fn mod2_reduce(&self) -> Result<Z2Poly, PolyError> {
        if !self.is_integral() {
            return Err(PolyError::NotIntegral);
        }
        Ok(Z2Poly(self.num.iter().filter(|(_, c)| c.is_odd()).map(|(e, _)| *e).collect()))
    }

    /// Partial derivative in the first (`var = 0`) or second (`var = 1`) variable.
    pub fn derivative(&self, var: u8) -> RatPoly2 {
        let mut num = BTreeMap::new();
        for (e, c) in &self.num {
            let (k, e2) = if var == 0 {
                (e.0, (e.0.saturating_sub(1), e.1))
            } else {
                (e.1, (e.0, e.1.saturating_sub(1)))
            };
            if k > 0 {
                num.insert(e2, c * BigInt::from(k));
            }
        }
        Self::normalized(self.basis, num, self.den.clone())
    }

    /// Same coefficients read in another basis.
    pub fn rebased(&self, basis: Basis) -> RatPoly2 {
        RatPoly2 { basis, ..self.clone() }
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.num
            .values()
            .map(|c| BigRational::new(c.abs(), self.den.clone()))
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Render with custom variable names, highest graded-lex term first.
    pub fn display_with(&self, n0: &str, n1: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (e, c)) in self.terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut mono = Vec::new();
            for (name, k) in [(n0, e.0), (n1, e.1)] {
                match k {
                    0 => {}
                    1 => mono.push(name.to_string()),
                    _ => mono.push(format!("{name}^{k}")),
                }
            }
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    s.push_str(&a.to_string());
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            basis: self.basis,
            terms: self
                .terms()
                .into_iter()
                .map(|(e, c)| TermJson { i: e.0, j: e.1, num: c.numer().to_string(), den: c.denom().to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<RatPoly2, PolyError> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let n: BigInt = t.num.parse().map_err(|_| PolyError::Json(format!("bad numerator {}", t.num)))?;
            let d: BigInt = t.den.parse().map_err(|_| PolyError::Json(format!("bad denominator {}", t.den)))?;
            if d.is_zero() {
                return Err(PolyError::Json("zero denominator".into()));
            }
            terms.push(((t.i, t.j), BigRational::new(n, d)));
        }
        Ok(Self::from_terms(j.basis, terms))
    }
}

fn powers(a: C64, n: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(C64::new(1.0, 0.0));
    for k in 0..n {
        v.push(v[k] * a);
    }
    v
}

fn rat_powers(a: &BigRational, n: usize) -> Vec<BigRational> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(BigRational::one());
    for k in 0..n {
        v.push(&v[k] * a);
    }
    v
}

fn big_to_f64(b: &BigInt) -> f64 {
    b.to_f64().unwrap_or_else(|| rat_to_f64(&BigRational::from_integer(b.clone())))
}

impl fmt::Display for RatPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.basis.names();
        f.write_str(&self.display_with(a, b))
    }
}

impl fmt::Debug for RatPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly2[{:?}]({})", self.basis, self)
    }
}

// Operator forms panic on basis mismatch; the `try_*` methods report it.
impl Add for &RatPoly2 {
    type Output = RatPoly2;
    fn add(self, o: &RatPoly2) -> RatPoly2 {
        self.try_add(o).expect("basis mismatch")
    }
}

impl Sub for &RatPoly2 {
    type Output = RatPoly2;
    fn sub(self, o: &RatPoly2) -> RatPoly2 {
        self.try_sub(o).expect("basis mismatch")
    }
}

impl Mul for &RatPoly2 {
    type Output = RatPoly2;
    fn mul(self, o: &RatPoly2) -> RatPoly2 {
        self.try_mul(o).expect("basis mismatch")
    }
}

impl Neg for &RatPoly2 {
    type Output = RatPoly2;
    fn neg(self) -> RatPoly2 {
        RatPoly2 {
            basis: self.basis,
            den: self.den.clone(),
            num: self.num.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for RatPoly2 {
            type Output = RatPoly2;
            fn $m(self, o: RatPoly2) -> RatPoly2 {
                (&self).$m(&o)
            }
        }
        impl $tr<&RatPoly2> for RatPoly2 {
            type Output = RatPoly2;
            fn $m(self, o: &RatPoly2) -> RatPoly2 {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for RatPoly2 {
    type Output = RatPoly2;
    fn neg(self) -> RatPoly2 {
        -&self
    }
}

/// Polynomial over the field with two elements: the set of monomials with coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Z2Poly(pub BTreeSet<Exp>);

impl Z2Poly {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Lift to the integer polynomial with 0/1 coefficients.
    pub fn lift(&self, basis: Basis) -> RatPoly2 {
        RatPoly2::from_int_terms(basis, self.0.iter().map(|&e| (e, 1)), 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub i: u32,
    pub j: u32,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub basis: Basis,
    pub terms: Vec<TermJson>,
}

impl Serialize for RatPoly2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPoly2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        RatPoly2::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout: integer coefficients over a denominator.
pub fn poly(basis: Basis, terms: &[(u32, u32, i64)], den: i64) -> RatPoly2 {
    RatPoly2::from_int_terms(basis, terms.iter().map(|&(i, j, c)| ((i, j), c)), den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xz(terms: &[(u32, u32, i64)]) -> RatPoly2 {
        poly(Basis::XZ, terms, 1)
    }

    #[test]
    fn basic_arithmetic() {
        let x = RatPoly2::var0(Basis::XZ);
        let z = RatPoly2::var1(Basis::XZ);
        assert_eq!(&(&x + &z) * &(&x - &z), xz(&[(2, 0, 1), (0, 2, -1)]));
        let half_x = poly(Basis::XZ, &[(1, 0, 1)], 2);
        assert_eq!(half_x.scale_int(2), x);
        assert!(x.try_add(&RatPoly2::var0(Basis::UV)).is_err());
        assert_eq!((&x - &x), RatPoly2::zero(Basis::XZ));
    }

    #[test]
    fn eval_and_compose() {
        let p = xz(&[(2, 0, 1), (0, 2, -1)]);
        assert_eq!(p.eval(C64::new(2.0, 0.0), C64::new(1.0, 0.0)), C64::new(3.0, 0.0));
        let z2 = xz(&[(0, 2, 1)]);
        let q = xz(&[(0, 1, 1), (1, 0, -1)]);
        assert_eq!(z2.compose_second(&q).unwrap(), &q * &q);
    }

    #[test]
    fn division() {
        let p = xz(&[(1, 1, 1), (2, 0, 1)]);
        let x = RatPoly2::var0(Basis::XZ);
        assert_eq!(p.divides_exactly(&x).unwrap(), xz(&[(0, 1, 1), (1, 0, 1)]));
        let a = xz(&[(1, 0, 1), (0, 1, -3), (0, 0, 2)]);
        let b = xz(&[(2, 1, 5), (0, 0, -1), (1, 1, 1)]);
        assert_eq!((&a * &b).divides_exactly(&a).unwrap(), b);
        assert!((&(&a * &b) + &RatPoly2::one(Basis::XZ)).divides_exactly(&a).is_none());
        assert!(x.divides_exactly(&a).is_none());
    }

    #[test]
    fn half_integers_and_mod2() {
        let p = &poly(Basis::XZ, &[(1, 0, 1)], 2) + &RatPoly2::var1(Basis::XZ);
        assert!(p.is_half_integer());
        assert!(!poly(Basis::XZ, &[(1, 0, 1)], 3).is_half_integer());
        let q = xz(&[(1, 0, 3), (0, 1, 2), (0, 0, -1)]);
        let m = q.mod2_reduce().unwrap();
        assert_eq!(m.0.into_iter().collect::<Vec<_>>(), vec![(0, 0), (1, 0)]);
        assert!(p.mod2_reduce().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let p = poly(Basis::UV, &[(2, 1, -7), (0, 0, 3)], 2);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"basis\":\"uv\""));
        let back: RatPoly2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn display() {
        let p = poly(Basis::XZ, &[(1, 1, -1), (0, 2, 1), (0, 0, 3)], 2);
        assert_eq!(p.to_string(), "-1/2*x*z + 1/2*z^2 + 3/2");
    }

    #[test]
    fn substitute_change_of_variables() {
        // x = 2(u-1), z = -(u-1)(v-1) applied to z gives -(u-1)(v-1)
        let uv = Basis::UV;
        let x = poly(uv, &[(1, 0, 2), (0, 0, -2)], 1);
        let z = poly(uv, &[(1, 1, -1), (1, 0, 1), (0, 1, 1), (0, 0, -1)], 1);
        let p = xz(&[(1, 0, 1), (0, 1, 1)]);
        assert_eq!(p.substitute(&x, &z).unwrap(), &x + &z);
    }

    fn arb_poly() -> impl Strategy<Value = RatPoly2> {
        prop::collection::vec((0u32..4, 0u32..4, -9i64..10, 1i64..4), 0..6).prop_map(|ts| {
            RatPoly2::from_terms(
                Basis::XZ,
                ts.into_iter().map(|(i, j, n, d)| ((i, j), BigRational::new(n.into(), d.into()))),
            )
        })
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
        }

        #[test]
        fn eval_is_homomorphism(a in arb_poly(), b in arb_poly(), x in arb_c(), z in arb_c()) {
            let tol = 1e-9 * (1.0 + a.eval(x, z).norm() * b.eval(x, z).norm());
            prop_assert!(((&a * &b).eval(x, z) - a.eval(x, z) * b.eval(x, z)).norm() < tol);
            prop_assert!(((&a + &b).eval(x, z) - a.eval(x, z) - b.eval(x, z)).norm() < 1e-9 * (1.0 + tol));
        }

        #[test]
        fn product_division(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).divides_exactly(&b), Some(a));
        }

        #[test]
        fn exact_eval_matches(a in arb_poly(), x in -5i64..5, z in -5i64..5) {
            let ex = a.eval_exact(&CRat::from_int(x), &CRat::from_int(z));
            let r = a.eval_rat(&BigRational::from_integer(x.into()), &BigRational::from_integer(z.into()));
            prop_assert_eq!(ex.re.clone(), r);
            let f = a.eval(C64::new(x as f64, 0.0), C64::new(z as f64, 0.0));
            prop_assert!((ex.to_c64() - f).norm() < 1e-6 * (1.0 + f.norm()));
        }

        #[test]
        fn derivative_linear(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!((&a + &b).derivative(1), &a.derivative(1) + &b.derivative(1));
            prop_assert_eq!((&a * &b).derivative(0), &(&a.derivative(0) * &b) + &(&a * &b.derivative(0)));
        }
    }
}
