//! Complex scalars that are either exact Gaussian rationals or doubles.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse complex number '{0}'")]
pub struct ParseComplexError(pub String);

/// Exact complex rational `re + i im`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRat { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        CRat::real(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        CRat::from_int(0)
    }

    pub fn one() -> Self {
        CRat::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// |z|^2, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> CRat {
        CRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn inv(&self) -> Option<CRat> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(CRat::new(&self.re / &n, -&self.im / &n))
    }

    pub fn scale(&self, c: &BigRational) -> CRat {
        CRat::new(&self.re * c, &self.im * c)
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Exact value of a finite double.
    pub fn from_c64(z: C64) -> Option<CRat> {
        Some(CRat::new(BigRational::from_float(z.re)?, BigRational::from_float(z.im)?))
    }

    /// Total bit length of all numerators and denominators, a size measure.
    pub fn bits(&self) -> u64 {
        self.re.numer().bits() + self.re.denom().bits() + self.im.numer().bits() + self.im.denom().bits()
    }
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64().filter(|v| v.is_finite()) {
        return v;
    }
    // keep the top 64 bits of numerator and denominator
    let ns = q.numer().bits().saturating_sub(64);
    let ds = q.denom().bits().saturating_sub(64);
    let n = (q.numer() >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> ds as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((ns as i64 - ds as i64).clamp(-2000, 2000) as i32)
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, o: &CRat) -> CRat {
        CRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, o: &CRat) -> CRat {
        CRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re.clone(), -self.im.clone())
    }
}

/// A complex parameter: exact when it came from an exact decimal/fraction literal.
#[derive(Debug, Clone, PartialEq)]
pub enum CNum {
    Exact(CRat),
    Approx(C64),
}

impl CNum {
    pub fn to_c64(&self) -> C64 {
        match self {
            CNum::Exact(q) => q.to_c64(),
            CNum::Approx(z) => *z,
        }
    }

    pub fn exact(&self) -> Option<&CRat> {
        match self {
            CNum::Exact(q) => Some(q),
            CNum::Approx(_) => None,
        }
    }

    pub fn from_i64(n: i64) -> CNum {
        CNum::Exact(CRat::from_int(n))
    }
}

impl From<C64> for CNum {
    fn from(z: C64) -> Self {
        CNum::Approx(z)
    }
}

impl From<f64> for CNum {
    fn from(x: f64) -> Self {
        CNum::Approx(C64::new(x, 0.0))
    }
}

impl fmt::Display for CNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CNum::Exact(q) => write!(f, "{q}"),
            CNum::Approx(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)
                }
            }
        }
    }
}

/// Parse a real literal exactly: integer, decimal (`-0.125`, `1e-3`) or fraction (`3/4`).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

impl FromStr for CNum {
    type Err = ParseComplexError;

    /// Accepts `re`, `im i`, `re+im i`, `re-im i` with exact real literals; the
    /// result is exact. `i`, `-i` are allowed.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseComplexError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        if let Some(body) = t.strip_suffix('i') {
            // split at the last sign that is not part of an exponent and not leading
            let bytes = body.as_bytes();
            let mut split = None;
            for k in (1..bytes.len()).rev() {
                if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                    split = Some(k);
                    break;
                }
            }
            let (re_s, im_s) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im = match im_s {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                other => parse_rational(other).ok_or_else(err)?,
            };
            let re = parse_rational(re_s).ok_or_else(err)?;
            Ok(CNum::Exact(CRat::new(re, im)))
        } else {
            Ok(CNum::Exact(CRat::real(parse_rational(&t).ok_or_else(err)?)))
        }
    }
}
