//! Dense univariate polynomials over exact fields (ℚ and ℚ(i)), ascending coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cnum::CRat;

pub trait Field: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn from_int(n: i64) -> Self;
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}

impl Field for CRat {
    fn zero() -> Self {
        CRat::zero()
    }
    fn one() -> Self {
        CRat::one()
    }
    fn is_zero(&self) -> bool {
        CRat::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self * &o.inv().expect("division by zero")
    }
    fn from_int(n: i64) -> Self {
        CRat::from_int(n)
    }
}

pub fn trim<F: Field>(mut p: Vec<F>) -> Vec<F> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Degree, `None` for the zero polynomial.
pub fn degree<F: Field>(p: &[F]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval<F: Field>(p: &[F], x: &F) -> F {
    p.iter().rev().fold(F::zero(), |acc, c| acc.mul(x).add(c))
}

pub fn derivative<F: Field>(p: &[F]) -> Vec<F> {
    trim(p.iter().enumerate().skip(1).map(|(k, c)| c.mul(&F::from_int(k as i64))).collect())
}

pub fn mul<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![F::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    trim(out)
}

/// Quotient and remainder; panics on a zero divisor.
pub fn divrem<F: Field>(a: &[F], b: &[F]) -> (Vec<F>, Vec<F>) {
    let b = trim(b.to_vec());
    let db = degree(&b).expect("division by the zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (vec![], r);
    }
    let lead = b[db].clone();
    let mut q = vec![F::zero(); r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr].div(&lead);
        let shift = dr - db;
        for (k, bk) in b.iter().enumerate() {
            r[k + shift] = r[k + shift].sub(&c.mul(bk));
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

pub fn monic<F: Field>(p: &[F]) -> Vec<F> {
    match degree(p) {
        None => vec![],
        Some(d) => {
            let l = p[d].clone();
            p[..=d].iter().map(|c| c.div(&l)).collect()
        }
    }
}

pub fn gcd<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(&a)
}

/// Yun's square-free decomposition: `p = c * prod f_k^k`, returned as `(f_k, k)` with
/// nonconstant monic `f_k`.
pub fn squarefree<F: Field>(p: &[F]) -> Vec<(Vec<F>, usize)> {
    let p = trim(p.to_vec());
    if degree(&p).unwrap_or(0) == 0 {
        return vec![];
    }
    let dp = derivative(&p);
    let a0 = gcd(&p, &dp);
    let mut b = divrem(&p, &a0).0;
    let mut c = divrem(&dp, &a0).0;
    let mut d: Vec<F> = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        let a = gcd(&b, &d);
        if degree(&a).unwrap_or(0) > 0 {
            out.push((a.clone(), k));
        }
        b = divrem(&b, &a).0;
        if degree(&b).unwrap_or(0) == 0 {
            break;
        }
        c = divrem(&d, &a).0;
        d = sub(&c, &derivative(&b));
        k += 1;
    }
    out
}

pub fn sub<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let n = a.len().max(b.len());
    let z = F::zero();
    trim((0..n).map(|k| a.get(k).unwrap_or(&z).sub(b.get(k).unwrap_or(&z))).collect())
}

/// Rational roots with multiplicity, by the rational root test on the primitive
/// integer multiple of `p`.
pub fn rational_roots(p: &[BigRational]) -> Vec<(BigRational, usize)> {
    let mut out = Vec::new();
    for (f, k) in squarefree(p) {
        for r in rational_roots_squarefree(&f) {
            out.push((r, k));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn rational_roots_squarefree(p: &[BigRational]) -> Vec<BigRational> {
    let mut p = trim(p.to_vec());
    let mut roots = Vec::new();
    while p.first().is_some_and(|c| Zero::is_zero(c)) {
        p.remove(0);
        roots.push(<BigRational as Zero>::zero());
    }
    let d = match degree(&p) {
        Some(d) if d > 0 => d,
        _ => return roots,
    };
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let a0 = ints[0].abs();
    let an = ints[d].abs();
    let dn = divisors(&a0);
    let dd = divisors(&an);
    let (Some(dn), Some(dd)) = (dn, dd) else { return roots };
    for num in &dn {
        for den in &dd {
            for sign in [1i64, -1] {
                let r = BigRational::new(num * BigInt::from(sign), den.clone());
                if Zero::is_zero(&eval(&p, &r)) && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

/// Positive divisors of a nonzero integer, or `None` when too large to factor by trial.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    use num_traits::ToPrimitive;
    let n = n.to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            small.push(BigInt::from(k));
            if k * k != n {
                large.push(BigInt::from(n / k));
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}
