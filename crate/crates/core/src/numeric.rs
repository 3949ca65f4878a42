//! Concrete 2x2 complex matrices: canonical generator pairs, evaluation maps and
//! the numeric checks that back the symbolic pipeline.

use std::ops::Mul;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cnum::C64;
use crate::quatalg::{g_of, Algebra, Quat};
use crate::words::{FreeWord, GoodWord, Letter};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("inconsistent request: {0}")]
    Inconsistent(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("quaternion is in the wrong algebra")]
    WrongAlgebra,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2 {
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub a: C64,
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub b: C64,
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub c: C64,
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub d: C64,
}

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c_: f64, d: f64) -> Self {
        Mat2::new(c(a), c(b), c(c_), c(d))
    }

    pub fn identity() -> Self {
        Mat2::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, C64::zero(), C64::zero(), d)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn inv(&self) -> Mat2 {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn pow(&self, n: i64) -> Mat2 {
        let base = if n < 0 { self.inv() } else { *self };
        let mut out = Mat2::identity();
        let mut b = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out * b;
            }
            b = b * b;
            k >>= 1;
        }
        out
    }

    pub fn conj_by(&self, m: &Mat2) -> Mat2 {
        *m * *self * m.inv()
    }

    /// Max entrywise modulus of the difference.
    pub fn dist(&self, o: &Mat2) -> f64 {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Distance up to sign, for comparisons in PSL(2, C).
    pub fn dist_pm(&self, o: &Mat2) -> f64 {
        self.dist(o).min(self.dist(&o.neg()))
    }

    pub fn max_abs(&self) -> f64 {
        [self.a, self.b, self.c, self.d].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// `x y x^-1 y^-1`.
pub fn commutator(x: &Mat2, y: &Mat2) -> Mat2 {
    *x * *y * x.inv() * y.inv()
}

/// `tr[x, y] - 2`. For diagonal `x` this uses `-(k - 1/k)^2 y12 y21`, which avoids the
/// cancellation of the direct product when `y` has large entries.
pub fn commutator_defect(x: &Mat2, y: &Mat2) -> C64 {
    if x.b == C64::new(0.0, 0.0) && x.c == C64::new(0.0, 0.0) {
        let kk = x.a - x.d;
        -(kk * kk) * y.b * y.c
    } else {
        commutator(x, y).trace() - 2.0
    }
}

/// `beta = tr^2 - 4` of a matrix.
pub fn beta_of(m: &Mat2) -> C64 {
    m.trace() * m.trace() - 4.0
}

/// `gamma = tr[x, y] - 2`.
pub fn gamma_of(x: &Mat2, y: &Mat2) -> C64 {
    commutator(x, y).trace() - 2.0
}

/// Parameters `(beta(f), beta(g), gamma(f, g))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupParams {
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub beta: C64,
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub beta2: C64,
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub gamma: C64,
}

impl GroupParams {
    pub fn new(beta: C64, beta2: C64, gamma: C64) -> Self {
        GroupParams { beta, beta2, gamma }
    }

    pub fn lambda(&self) -> C64 {
        (self.beta + 2.0) / 2.0
    }

    pub fn lambda2(&self) -> C64 {
        (self.beta2 + 2.0) / 2.0
    }

    /// `1 - 2 gamma / beta`, undefined for parabolic `f`.
    pub fn mu(&self) -> Option<C64> {
        if self.beta.is_zero() {
            None
        } else {
            Some(1.0 - 2.0 * self.gamma / self.beta)
        }
    }

    /// From `(lambda, lambda', mu)`: `beta = 2(lambda-1)`, `gamma = -(lambda-1)(mu-1)`.
    pub fn from_lm(lambda: C64, lambda2: C64, mu: C64) -> Self {
        GroupParams {
            beta: 2.0 * (lambda - 1.0),
            beta2: 2.0 * (lambda2 - 1.0),
            gamma: -(lambda - 1.0) * (mu - 1.0),
        }
    }
}

/// `beta = 4 sinh^2((tau + i eta)/2)`.
pub fn beta_from_geometry(tau: f64, eta: f64) -> C64 {
    let s = (C64::new(tau, eta) / 2.0).sinh();
    4.0 * s * s
}

/// Inverse of [`beta_from_geometry`], normalized to `tau >= 0`.
pub fn geometry_from_beta(beta: C64) -> (f64, f64) {
    let mut delta = 2.0 * (beta.sqrt() / 2.0).asinh();
    if delta.re < 0.0 || (delta.re == 0.0 && delta.im < 0.0) {
        delta = -delta;
    }
    (delta.re, delta.im)
}

/// `gamma = beta(f) beta(g) sinh^2(Delta) / 4` for the complex distance `Delta`.
pub fn gamma_from_geometry(beta: C64, beta2: C64, delta: C64) -> C64 {
    let s = delta.sinh();
    beta * beta2 * s * s / 4.0
}

/// Off-diagonal options when the canonical form leaves them free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub enum Subchoice {
    /// The generic formulas; for degenerate cases `b = c = 0` and `l = 0`.
    #[default]
    Auto,
    B0C1,
    B1C0,
    B0C0,
    /// Upper-right entry of `B` in the doubly parabolic case.
    Ell(#[serde(serialize_with = "crate::roots::ser_c64")] C64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalPair {
    pub a: Mat2,
    pub b: Mat2,
    pub case: u8,
    pub subchoice: Subchoice,
}

/// Canonical matrices for `f`, `g` with the requested parameters (principal square
/// roots throughout). Case 1: `beta != 0`; case 2: `beta = 0`, `gamma != 0`;
/// case 3: `beta = gamma = 0`.
pub fn canonical_pair(p: &GroupParams, sub: Subchoice) -> Result<CanonicalPair, NumericError> {
    let (beta, beta2, gamma) = (p.beta, p.beta2, p.gamma);
    let parabolic = Mat2::real(1.0, 1.0, 0.0, 1.0);
    if !beta.is_zero() {
        let sb = beta.sqrt();
        let q = (beta * (beta + 4.0)).sqrt();
        let a_mat = Mat2::diag((q + beta) / (2.0 * sb), (q - beta) / (2.0 * sb));
        let root = ((4.0 * gamma + beta * beta2) / beta).sqrt();
        let s4 = (beta2 + 4.0).sqrt();
        let (a, d) = ((s4 + root) / 2.0, (s4 - root) / 2.0);
        let (b, cc, sub) = if !gamma.is_zero() {
            if !matches!(sub, Subchoice::Auto) {
                return Err(NumericError::Inconsistent("off-diagonal subchoice requires gamma = 0".into()));
            }
            let cc = (gamma / beta).sqrt();
            (-cc, cc, Subchoice::Auto)
        } else {
            match sub {
                Subchoice::Auto | Subchoice::B0C0 => (C64::zero(), C64::zero(), Subchoice::B0C0),
                Subchoice::B0C1 => (C64::zero(), C64::one(), sub),
                Subchoice::B1C0 => (C64::one(), C64::zero(), sub),
                Subchoice::Ell(_) => return Err(NumericError::Inconsistent("l applies only to case 3".into())),
            }
        };
        return Ok(CanonicalPair { a: a_mat, b: Mat2::new(a, b, cc, d), case: 1, subchoice: sub });
    }
    if !gamma.is_zero() {
        if !matches!(sub, Subchoice::Auto) {
            return Err(NumericError::Inconsistent("case 2 has no free parameters".into()));
        }
        let sg = gamma.sqrt();
        let b = Mat2::new(C64::zero(), -1.0 / sg, sg, (beta2 + 4.0).sqrt());
        return Ok(CanonicalPair { a: parabolic, b, case: 2, subchoice: sub });
    }
    let ell = match sub {
        Subchoice::Auto => C64::zero(),
        Subchoice::Ell(l) => l,
        _ => return Err(NumericError::Inconsistent("case 3 takes only the parameter l".into())),
    };
    if !beta2.is_zero() && !ell.is_zero() {
        return Err(NumericError::Inconsistent("l must be 0 unless beta(g) = 0".into()));
    }
    let s4 = (beta2 + 4.0).sqrt();
    let sb2 = beta2.sqrt();
    let b = Mat2::new((s4 + sb2) / 2.0, ell, C64::zero(), (s4 - sb2) / 2.0);
    Ok(CanonicalPair { a: parabolic, b, case: 3, subchoice: Subchoice::Ell(ell) })
}

/// Canonical pair in the `(lambda, lambda', mu)` parameters.
pub fn canonical_pair_lm(lambda: C64, lambda2: C64, mu: C64, sub: Subchoice) -> Result<(Mat2, Mat2), NumericError> {
    if lambda == C64::one() {
        return Err(NumericError::Domain("lambda = 1 (parabolic f)".into()));
    }
    let l1 = lambda - 1.0;
    let sq = (lambda * lambda - 1.0).sqrt();
    let den = (2.0 * l1).sqrt();
    let a_mat = Mat2::diag((sq + l1) / den, (sq - l1) / den);
    let r2 = 2f64.sqrt();
    let (p, q) = ((lambda2 + 1.0).sqrt(), (lambda2 - mu).sqrt());
    let (a, d) = ((p + q) / r2, (p - q) / r2);
    let (b, cc) = if mu != C64::one() {
        let cc = ((1.0 - mu) / 2.0).sqrt();
        (-cc, cc)
    } else {
        match sub {
            Subchoice::Auto | Subchoice::B0C0 => (C64::zero(), C64::zero()),
            Subchoice::B0C1 => (C64::zero(), C64::one()),
            Subchoice::B1C0 => (C64::one(), C64::zero()),
            Subchoice::Ell(_) => return Err(NumericError::Inconsistent("l applies only to case 3".into())),
        }
    };
    Ok((a_mat, Mat2::new(a, b, cc, d)))
}

pub fn eval_free_matrix(a: &Mat2, b: &Mat2, w: &FreeWord) -> Mat2 {
    w.0.iter().fold(Mat2::identity(), |acc, &(l, e)| {
        acc * match l {
            Letter::A => a.pow(e),
            Letter::B => b.pow(e),
        }
    })
}

/// Literal product of the word's letters.
pub fn eval_word_matrix(a: &Mat2, b: &Mat2, w: &GoodWord) -> Mat2 {
    eval_free_matrix(a, b, &w.to_free())
}

/// The evaluation homomorphism on `Q0`. `d12` overrides `(D1, D2)`, which must
/// satisfy `D1 D2 = gamma (gamma - beta) / beta^2`; the default is `(ab, cd)` from
/// the canonical pair.
pub fn phi_eval(q: &Quat, p: &GroupParams, d12: Option<(C64, C64)>) -> Result<Mat2, NumericError> {
    if q.algebra != Algebra::Q0 {
        return Err(NumericError::WrongAlgebra);
    }
    let (beta, gamma) = (p.beta, p.gamma);
    if !beta.is_zero() {
        let (d1, d2) = match d12 {
            Some(d) => d,
            None => {
                let cp = canonical_pair(p, Subchoice::Auto)?;
                (cp.b.a * cp.b.b, cp.b.c * cp.b.d)
            }
        };
        let qq = (beta * (beta + 4.0)).sqrt();
        let [r, s, t, w] = q.components().map(|c| c.eval(beta, gamma));
        return Ok(Mat2::new(r + s * qq / beta, d1 * (beta * t + w * qq), d2 * (beta * t - w * qq), r - s * qq / beta));
    }
    let g = g_of(q).ok_or_else(|| NumericError::Domain("s - z w is not divisible by x".into()))?;
    let zero = C64::zero();
    if !gamma.is_zero() {
        let [r, _, t, w] = q.components().map(|c| c.eval(zero, gamma));
        let g = g.eval(zero, gamma);
        return Ok(Mat2::new(r + gamma * t, 4.0 * g + 2.0 * w, 2.0 * gamma * w, r - gamma * t));
    }
    let b2 = p.beta2;
    let [r, _, _, w] = q.components().map(|c| c.eval(zero, zero));
    let g = g.eval(zero, zero);
    Ok(Mat2::new(r, 4.0 * g - (b2 + b2.sqrt() * (b2 + 4.0).sqrt()) * w, zero, r))
}

/// The evaluation homomorphism on `QUV` at `u = lambda`, `v = mu`, with the lower-left
/// entry `2cd (T - W sqrt(lambda^2-1))`.
pub fn psi_eval(q: &Quat, lambda: C64, lambda2: C64, mu: C64) -> Result<Mat2, NumericError> {
    if q.algebra != Algebra::QUV {
        return Err(NumericError::WrongAlgebra);
    }
    let (_, b) = canonical_pair_lm(lambda, lambda2, mu, Subchoice::Auto)?;
    let sq = (lambda * lambda - 1.0).sqrt();
    let [r, s, t, w] = q.components().map(|c| c.eval(lambda, mu));
    Ok(Mat2::new(r + s * sq, 2.0 * b.a * b.b * (t + w * sq), 2.0 * b.c * b.d * (t - w * sq), r - s * sq))
}

/// The conjugator `M = [[k, m], [0, 1/k]] C` that carries the evaluation map at `beta`
/// toward the parabolic one as `beta -> 0`.
pub fn limit_conjugator(beta: C64, beta2: C64, gamma: C64) -> Mat2 {
    let sb = beta.sqrt();
    let sg = gamma.sqrt();
    let s4 = (beta2 + 4.0).sqrt();
    let q = (beta * (beta + 4.0)).sqrt();
    let q2 = sb * (beta + 4.0).sqrt();
    let k = (1.0 / sb).sqrt();
    let m = -(1.0 / k) * (1.0 / sb + s4 / (2.0 * sg));
    let root = ((4.0 * gamma + beta * beta2) / beta).sqrt();
    let d1 = -0.5 * (gamma / beta).sqrt() * (s4 + root);
    let d2 = 0.5 * (gamma / beta).sqrt() * (s4 - root);
    let pre = sg / (2.0 * sb);
    let tail = 2.0 * sg * (1.0 + beta * beta2 / (4.0 * gamma)).sqrt() / sb;
    let d1p = -pre * (s4 + tail);
    let d2p = pre * (s4 - tail);
    let cm = if (q2 - q).norm() <= (q2 + q).norm() {
        Mat2::diag((d1p / d1).sqrt(), (d2p / d2).sqrt())
    } else {
        Mat2::new(C64::zero(), I * (d1p / d2).sqrt(), I * (d2p / d1).sqrt(), C64::zero())
    };
    Mat2::new(c(0.0) + k, m, C64::zero(), 1.0 / k) * cm
}

/// Deviation `|M phi_beta(q) M^-1 - phi_0(q)|` along a sequence `beta_n -> 0`.
pub fn verify_limits(q: &Quat, beta2: C64, gamma: C64, betas: &[C64]) -> Result<Vec<f64>, NumericError> {
    if gamma.is_zero() {
        return Err(NumericError::Domain("the first limit needs gamma != 0".into()));
    }
    let target = phi_eval(q, &GroupParams::new(C64::zero(), beta2, gamma), None)?;
    betas
        .iter()
        .map(|&beta| {
            let m = limit_conjugator(beta, beta2, gamma);
            let phi = phi_eval(q, &GroupParams::new(beta, beta2, gamma), None)?;
            Ok(phi.conj_by(&m).dist(&target))
        })
        .collect()
}

/// Deviation `|M1 phi_{0,gamma}(q) M1^-1 - phi_{0,0}(q)|` along `gamma_n -> 0`.
pub fn verify_second_limit(q: &Quat, beta2: C64, gammas: &[C64]) -> Result<Vec<f64>, NumericError> {
    let target = phi_eval(q, &GroupParams::new(C64::zero(), beta2, C64::zero()), None)?;
    gammas
        .iter()
        .map(|&gamma| {
            let m1 = ((beta2 + 4.0).sqrt() + beta2.sqrt()) / (2.0 * gamma.sqrt());
            let m = Mat2::new(c(1.0), m1, C64::zero(), c(1.0));
            let phi = phi_eval(q, &GroupParams::new(C64::zero(), beta2, gamma), None)?;
            Ok(phi.conj_by(&m).dist(&target))
        })
        .collect()
}

/// Residuals of the elementary conjugation and commutator identities for
/// `M = [[k, m], [0, 1/k]]`, `P = [[1, 1], [0, 1]]`, `Q = [[0, i sqrt k], [i/sqrt k, 0]]`
/// and `N = [[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct Section3Report {
    pub offdiag: f64,
    pub conjugation: f64,
    pub commutator: f64,
    pub parabolic_commutator: f64,
    pub trace: f64,
    pub parabolic_trace: f64,
}

impl Section3Report {
    pub fn max(&self) -> f64 {
        [self.offdiag, self.conjugation, self.commutator, self.parabolic_commutator, self.trace, self.parabolic_trace]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn section3_identities(k: C64, m: C64, a: C64, b: C64, cc: C64, d: C64) -> Result<Section3Report, NumericError> {
    let n = Mat2::new(a, b, cc, d);
    if (n.det() - 1.0).norm() > 1e-12 * (1.0 + n.max_abs().powi(2)) {
        return Err(NumericError::Domain("ad - bc != 1".into()));
    }
    let mm = Mat2::new(k, m, C64::zero(), 1.0 / k);
    let m0 = Mat2::new(k, C64::zero(), C64::zero(), 1.0 / k);
    let p = Mat2::real(1.0, 1.0, 0.0, 1.0);
    let sk = k.sqrt();
    let q = Mat2::new(C64::zero(), I * sk, I / sk, C64::zero());
    let offdiag = n.conj_by(&q).dist(&Mat2::new(d, k * cc, b / k, a));
    let conj_want = Mat2::new(a + m * cc / k, -m * m * cc + m * k * (d - a) + k * k * b, cc / (k * k), d - m * cc / k);
    let conjugation = n.conj_by(&mm).dist(&conj_want);
    let comm_want = Mat2::new(a * d - k * k * b * cc, a * b * (k * k - 1.0), cc * d * (1.0 / (k * k) - 1.0), a * d - b * cc / (k * k));
    let commutator = commutator(&m0, &n).dist(&comm_want);
    let pc_want = Mat2::new(1.0 + cc * cc + a * cc, 1.0 - a * a - a * cc, cc * cc, 1.0 - a * cc);
    let parabolic_commutator = crate::numeric::commutator(&p, &n).dist(&pc_want);
    let kk = k - 1.0 / k;
    let trace = (crate::numeric::commutator(&m0, &n).trace() - (2.0 - kk * kk * b * cc)).norm();
    let parabolic_trace = (crate::numeric::commutator(&p, &n).trace() - (2.0 + cc * cc)).norm();
    Ok(Section3Report { offdiag, conjugation, commutator, parabolic_commutator, trace, parabolic_trace })
}

pub fn section3_identities_check(k: C64, m: C64, a: C64, b: C64, cc: C64, d: C64) -> bool {
    match section3_identities(k, m, a, b, cc, d) {
        Ok(r) => {
            let scale = 1.0 + [k, 1.0 / k, m, a, b, cc, d].iter().map(|z| z.norm()).fold(0.0, f64::max).powi(4);
            r.max() < 1e-10 * scale
        }
        Err(_) => false,
    }
}
