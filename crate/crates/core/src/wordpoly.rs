//! Good word -> quaternion -> polynomials `(r, s, t, w)`, `g`, the trace polynomial
//! `p_w`, the `(u, v)` forms and the explicit Chebyshev expressions.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::cnum::C64;
use crate::exactpoly::{poly, Basis, PolyError, PolyJson, RatPoly2};
use crate::numeric::{canonical_pair, commutator, commutator_defect, eval_word_matrix, GroupParams, Subchoice};
use crate::quatalg::{g_of, generator, qconj, qmul, qnorm, rho, Algebra, Quat, QuatError};
use crate::upoly;
use crate::words::{Classification, Gen, GoodWord, Letter, WordError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WordPolyError {
    #[error("the empty word has no polynomials")]
    EmptyWord,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("exponent sum {0} is odd")]
    Parity(i64),
    #[error("{0} is not a polynomial")]
    NonPolynomial(&'static str),
}

type Result<T> = std::result::Result<T, WordPolyError>;

#[derive(Debug, Clone, PartialEq)]
pub struct WordPolys {
    pub r: RatPoly2,
    pub s: RatPoly2,
    pub t: RatPoly2,
    pub w: RatPoly2,
    /// `(s - z w)/x`; `None` when that is not a polynomial (possible for unbalanced words).
    pub g: Option<RatPoly2>,
    pub p: RatPoly2,
    pub balanced: bool,
    pub source: GoodWord,
    /// The regular balanced even word the polynomials are derived from.
    pub core: GoodWord,
}

impl WordPolys {
    pub fn as_quat(&self) -> Quat {
        Quat { algebra: Algebra::Q0, r: self.r.clone(), s: self.s.clone(), t: self.t.clone(), w: self.w.clone() }
    }
}

/// Product of the generator quaternions along [`GoodWord::decompose_rbe`].
pub fn word_to_quat(w: &GoodWord) -> Result<Quat> {
    let tokens = w.decompose_rbe()?;
    let gens = [generator(1), generator(2), generator(3)];
    let conjs = [qconj(&gens[0]), qconj(&gens[1]), qconj(&gens[2])];
    let mut out = Quat::one(Algebra::Q0);
    for tok in tokens {
        let k = match tok.gen {
            Gen::G1 => 0,
            Gen::G2 => 1,
            Gen::G3 => 2,
        };
        out = qmul(&out, if tok.inverse { &conjs[k] } else { &gens[k] })?;
    }
    Ok(out)
}

fn x() -> RatPoly2 {
    RatPoly2::var0(Basis::XZ)
}

fn z() -> RatPoly2 {
    RatPoly2::var1(Basis::XZ)
}

/// `z(x-z)(x t^2 - (x+4) w^2)` for balanced words, `z(t^2 - x(x+4) w^2)` otherwise.
fn trace_from(t: &RatPoly2, w: &RatPoly2, balanced: bool) -> RatPoly2 {
    let (x, z) = (x(), z());
    let x4 = poly(Basis::XZ, &[(1, 0, 1), (0, 0, 4)], 1);
    if balanced {
        let zxz = &z * &(&x - &z);
        &zxz * &(&(&x * &(t * t)) - &(&x4 * &(w * w)))
    } else {
        &z * &(&(t * t) - &(&(&x * &x4) * &(w * w)))
    }
}

/// Polynomials of a word, with `sign` the coefficient of `z` in `t = r~ + (x + sign z) t~`.
#[doc(hidden)]
pub fn word_polys_with_sign(w: &GoodWord, sign: i64) -> Result<WordPolys> {
    if w.is_identity() {
        return Err(WordPolyError::EmptyWord);
    }
    let balanced = w.classify().balanced;
    let core = w.core();
    let q = word_to_quat(&core)?;
    let (r, s, t, ww) = if balanced {
        (q.r, q.s, q.t, q.w)
    } else {
        let (x, z) = (x(), z());
        let g = g_of(&q).ok_or(WordPolyError::NonPolynomial("g"))?;
        let r = &q.r - &(&z * &q.t);
        let t = &q.r + &(&(&x + &z.scale_int(sign)) * &q.t);
        let w_ = &g + &q.w;
        (r, g, t, w_)
    };
    let p = trace_from(&t, &ww, balanced);
    let g = g_of(&Quat { algebra: Algebra::Q0, r: r.clone(), s: s.clone(), t: t.clone(), w: ww.clone() });
    Ok(WordPolys { r, s, t, w: ww, g, p, balanced, source: w.clone(), core })
}

/// Sign of the middle coefficient for unbalanced words, decided once by comparing
/// `p_w` against `tr[A, w(A,B)] - 2` at fixed parameter points.
pub fn unbalanced_sign() -> i64 {
    static SIGN: OnceLock<i64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let word = crate::words::parse_word("babab", true).expect("literal word");
        let err = |sign: i64| -> f64 {
            let wp = word_polys_with_sign(&word, sign).expect("babab has polynomials");
            oracle_points(20)
                .iter()
                .map(|p| {
                    let cp = canonical_pair(p, Subchoice::Auto).expect("generic parameters");
                    let m = eval_word_matrix(&cp.a, &cp.b, &word);
                    let lhs = commutator(&cp.a, &m).trace() - 2.0;
                    (lhs - wp.p.eval(p.beta, p.gamma)).norm()
                })
                .fold(0.0, f64::max)
        };
        if err(-1) <= err(1) {
            -1
        } else {
            1
        }
    })
}

/// Deterministic generic parameter points.
fn oracle_points(n: usize) -> Vec<GroupParams> {
    (0..n)
        .map(|k| {
            let t = k as f64;
            GroupParams::new(
                C64::new(0.35 + 0.11 * t, 0.4 - 0.07 * t),
                C64::new(-0.8 + 0.13 * t, 0.25),
                C64::new(0.6 - 0.09 * t, -0.3 + 0.05 * t),
            )
        })
        .collect()
}

fn cache() -> &'static RwLock<HashMap<String, Arc<WordPolys>>> {
    static CACHE: OnceLock<RwLock<HashMap<String, Arc<WordPolys>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized polynomials of a good word. Odd words use `w a`, irregular words flip
/// every b-sign first; unbalanced words go through `w b^-1`.
pub fn word_polys(w: &GoodWord) -> Result<Arc<WordPolys>> {
    let key = w.to_string();
    if let Some(hit) = cache().read().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let wp = Arc::new(word_polys_with_sign(w, unbalanced_sign())?);
    cache().write().expect("cache lock").insert(key, wp.clone());
    Ok(wp)
}

pub fn trace_poly(w: &GoodWord) -> Result<RatPoly2> {
    Ok(word_polys(w)?.p.clone())
}

/// `(R, S, T, W) = (r, 2s/x, x t/2, w)` after `x = 2(u-1)`, `z = -(u-1)(v-1)`.
pub fn rstw_uv(w: &GoodWord) -> Result<Quat> {
    let wp = word_polys(w)?;
    rho(&wp.as_quat()).map_err(|e| match e {
        QuatError::NonPolynomial(_) => WordPolyError::NonPolynomial("S"),
        e => e.into(),
    })
}

/// `a^{n1} b a^{n2} b^-1 a^{n3} b a^{n4} b^-1 a^{n5}`.
pub fn chebyshev_word(ns: [i64; 5]) -> GoodWord {
    let mut f = crate::words::FreeWord::identity();
    for (k, &n) in ns.iter().enumerate() {
        f.push(Letter::A, n);
        if k < 4 {
            f.push(Letter::B, if k % 2 == 0 { 1 } else { -1 });
        }
    }
    GoodWord::from_free(&f, false).expect("alternating b-signs")
}

struct Cheb {
    t: Vec<RatPoly2>,
    u: Vec<RatPoly2>,
}

impl Cheb {
    fn new(n: usize) -> Self {
        let one = RatPoly2::one(Basis::UV);
        let u = RatPoly2::var0(Basis::UV);
        let two_u = u.scale_int(2);
        let mut t = vec![one.clone(), u.clone()];
        let mut uu = vec![one, two_u.clone()];
        for k in 2..=n.max(1) {
            t.push(&(&two_u * &t[k - 1]) - &t[k - 2]);
            uu.push(&(&two_u * &uu[k - 1]) - &uu[k - 2]);
        }
        Cheb { t, u: uu }
    }

    /// `T_{|n|}`.
    fn tt(&self, n: i64) -> RatPoly2 {
        self.t[n.unsigned_abs() as usize].clone()
    }

    /// `U_{n-1}`, with `U_{-1} = 0` and `U_{n-1} = -U_{|n|-1}` for negative `n`.
    fn um1(&self, n: i64) -> RatPoly2 {
        match n {
            0 => RatPoly2::zero(Basis::UV),
            n if n > 0 => self.u[n as usize - 1].clone(),
            n => -&self.u[n.unsigned_abs() as usize - 1],
        }
    }
}

/// `(R, S, T, W)` of [`chebyshev_word`] in Chebyshev polynomials of `u`. The index of a
/// subset `S` of positions is `(sum_i ±n_i)/2` with `-` on `S`. `T` and `W` carry the
/// opposite sign to [`rstw_uv`]; see [`chebyshev_to_pipeline`].
pub fn chebyshev_rstw(ns: [i64; 5]) -> Result<Quat> {
    let total: i64 = ns.iter().sum();
    if total.rem_euclid(2) != 0 {
        return Err(WordPolyError::Parity(total));
    }
    let abs: i64 = ns.iter().map(|n| n.abs()).sum();
    let ch = Cheb::new((abs / 2) as usize + 1);
    let idx = |set: &[usize]| -> i64 {
        let s: i64 = (1..=5).map(|i| if set.contains(&i) { -ns[i - 1] } else { ns[i - 1] }).sum();
        s / 2
    };
    let ts = |set: &[usize]| ch.tt(idx(set));
    let us = |set: &[usize]| ch.um1(idx(set));
    let v = RatPoly2::var1(Basis::UV);
    let v2 = &v * &v;
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));

    let subsets: [&[usize]; 8] = [&[], &[2], &[3], &[4], &[2, 3], &[2, 4], &[3, 4], &[2, 3, 4]];
    let signed_sum = |f: &dyn Fn(&[usize]) -> RatPoly2, with5: bool| -> RatPoly2 {
        let mut acc = RatPoly2::zero(Basis::UV);
        for s in subsets {
            let mut set = s.to_vec();
            if with5 {
                set.push(5);
            }
            let term = f(&set);
            acc = if s.len() % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    };
    let sum_of = |f: &dyn Fn(&[usize]) -> RatPoly2, plus: &[&[usize]], minus: &[&[usize]]| -> RatPoly2 {
        let mut acc = RatPoly2::zero(Basis::UV);
        for s in plus {
            acc = &acc + &f(s);
        }
        for s in minus {
            acc = &acc - &f(s);
        }
        acc
    };
    let rs_form = |f: &dyn Fn(&[usize]) -> RatPoly2| -> RatPoly2 {
        let c2 = signed_sum(f, false).scale(&quarter);
        let c1 = (&f(&[]) - &f(&[2, 4])).scale(&half);
        let c0 = sum_of(f, &[&[], &[2], &[3], &[4], &[2, 4], &[2, 3, 4]], &[&[2, 3], &[3, 4]]).scale(&quarter);
        &(&(&c2 * &v2) + &(&c1 * &v)) + &c0
    };
    let r = rs_form(&ts);
    let s = rs_form(&us);
    let t1 = signed_sum(&ts, true).scale(&quarter);
    let t0 = sum_of(&ts, &[&[3, 5], &[2, 5], &[3, 4, 5], &[5]], &[&[1, 3], &[1, 4], &[1, 2, 3], &[1]]).scale(&quarter);
    let w1 = signed_sum(&us, true).scale(&quarter);
    let w0 = sum_of(&us, &[&[1, 3], &[3, 5], &[1, 4], &[2, 5], &[1, 2, 3], &[3, 4, 5], &[1], &[5]], &[]).scale(&quarter);
    let t = &(&t1 * &v) + &t0;
    let w = &(&w1 * &v) + &w0;
    Ok(Quat::new(Algebra::QUV, r, s, t, w)?)
}

/// Convert the Chebyshev form to the pipeline's sign convention: `(R, S, -T, -W)`.
pub fn chebyshev_to_pipeline(q: &Quat) -> Quat {
    Quat { algebra: q.algebra, r: q.r.clone(), s: q.s.clone(), t: -&q.t, w: -&q.w }
}

/// `p_w(0, z)` with all factors of `z` removed has no simple roots.
pub fn parabolic_square_check(p: &RatPoly2) -> bool {
    let mut c: Vec<BigRational> = p.coeffs_in_var1_exact(&crate::cnum::CRat::from_int(0)).iter().map(|c| c.re.clone()).collect();
    while c.first().is_some_and(|x| num_traits::Zero::is_zero(x)) {
        c.remove(0);
    }
    upoly::squarefree(&c).iter().all(|(_, k)| *k >= 2)
}

/// Published trace polynomials of ten short order-2-mode words, with `x = beta`,
/// `z = gamma`.
pub fn table1() -> Vec<(&'static str, RatPoly2)> {
    let c = |n: i64| RatPoly2::from_int(Basis::XZ, n);
    let (x, z) = (x(), z());
    let x4 = &x + &c(4);
    let zx = &z - &x;
    let sq = |p: RatPoly2| &p * &p;
    let cubic = &(&(&(&x * &x) + &z.pow(3)) - &(&(&x * &(&z * &z)).scale_int(2))) + &(&(&(&x - &c(1)) * &x) * &z);
    let long = &(&(&(&x * &(&(&(&z * &z) - &z.scale_int(3)) - &c(4))) - &(&(&x * &x) * &(&z + &c(1))))
        + &(&z * &z).scale_int(4))
        + &(&z.scale_int(4) + &c(1));
    vec![
        ("bab", &z * &zx),
        ("ba^2b", &(&x4 * &zx) * &z),
        ("babab", &sq(&(&x - &z) + &c(1)) * &z),
        ("baba^-1b", &z * &(&(&(&c(1) - &x.scale_int(2)) + &(&z * &z)) - &(&(&x - &c(2)) * &z))),
        (
            "baba^2b",
            &z * &(&(&(&c(1) + &(&(&x * &(&x + &c(1))) * &x4)) - &(&(&x4 * &(&x.scale_int(2) + &c(1))) * &z))
                + &(&x4 * &(&z * &z))),
        ),
        ("ba^2ba^2b", &sq(&(&(&(&x * &x) - &(&(&z - &c(4)) * &x)) - &z.scale_int(4)) + &c(1)) * &z),
        ("bababab", &(&z * &zx) * &sq(&(&x - &z) + &c(2))),
        ("bababa^-1b", &z * &cubic),
        ("baba^2ba^-1b", &(&z * &x4) * &cubic),
        ("ba^-2bababa^-2bab", &(&(&z.pow(3) * &zx) * &x4) * &long),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct WordChecks {
    pub norm_ok: bool,
    pub trace_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WordPolysJson {
    pub word: String,
    pub classification: Classification,
    pub r: PolyJson,
    pub s: PolyJson,
    pub t: PolyJson,
    pub w: PolyJson,
    pub g: Option<PolyJson>,
    pub p: PolyJson,
    pub checks: WordChecks,
}

/// Norm of the core quaternion is 1, and at fixed generic points `p_w` matches
/// `tr[A, w(A,B)] - 2`, and `2 r_w` is the trace of `w(A,B)` (of `w(A,B) A` for odd
/// words) when `w` is balanced.
pub fn word_checks(wp: &WordPolys) -> WordChecks {
    let norm_ok = word_to_quat(&wp.core).ok().and_then(|q| qnorm(&q).ok()).is_some_and(|n| n.is_one());
    let cls = wp.source.classify();
    let trace_ok = oracle_points(5).iter().all(|p| {
        let Ok(cp) = canonical_pair(p, Subchoice::Auto) else { return false };
        let m = eval_word_matrix(&cp.a, &cp.b, &wp.source);
        let scale = 1.0 + m.max_abs().powi(2);
        let pc = commutator_defect(&cp.a, &m) - wp.p.eval(p.beta, p.gamma);
        // tr = 2r only holds for balanced words; odd words carry the trailing a.
        let tr = match (cls.balanced, cls.even) {
            (false, _) => C64::new(0.0, 0.0),
            (true, true) => m.trace() - 2.0 * wp.r.eval(p.beta, p.gamma),
            (true, false) => (m * cp.a).trace() - 2.0 * wp.r.eval(p.beta, p.gamma),
        };
        pc.norm() < 1e-9 * scale && tr.norm() < 1e-9 * scale
    });
    WordChecks { norm_ok, trace_ok }
}

pub fn word_polys_json(wp: &WordPolys) -> WordPolysJson {
    WordPolysJson {
        word: wp.source.to_string(),
        classification: wp.source.classify(),
        r: wp.r.to_json(),
        s: wp.s.to_json(),
        t: wp.t.to_json(),
        w: wp.w.to_json(),
        g: wp.g.as_ref().map(|g| g.to_json()),
        p: wp.p.to_json(),
        checks: word_checks(wp),
    }
}
