use std::f64::consts::TAU;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tracepoly::cnum::CRat;
use tracepoly::exactpoly::RatPoly2;
use tracepoly::numeric::{
    canonical_pair, commutator_defect, eval_word_matrix, phi_eval, verify_limits, verify_second_limit, GroupParams,
    Subchoice,
};
use tracepoly::quatalg::{generator, qnorm};
use tracepoly::wordpoly::{unbalanced_sign, word_polys, word_polys_with_sign, word_to_quat, WordPolys};
use tracepoly::words::{random_word, GoodWord};

use crate::{failure, CliError};

const TOL: f64 = 1e-9;
const LIMIT_BETAS: [f64; 3] = [1e-2, 1e-4, 1e-6];
/// Each two decades of beta must shrink the deviation by at least this factor.
const LIMIT_RATIO: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Flip the sign of the middle coefficient for unbalanced words.
    SignFlip,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
    #[arg(long, hide = true, value_enum)]
    inject_fault: Option<Fault>,
}

#[derive(Debug, Clone, Serialize)]
struct Failure {
    word: String,
    beta: [f64; 2],
    beta2: [f64; 2],
    gamma: [f64; 2],
    error: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Sweep {
    name: &'static str,
    checked: usize,
    max_error: f64,
    tolerance: f64,
    failed: usize,
    /// First few failures, enough to reproduce.
    failures: Vec<Failure>,
}

impl Sweep {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Sweep { name, checked: 0, max_error: 0.0, tolerance, failed: 0, failures: Vec::new() }
    }

    fn record(&mut self, err: f64, ok: bool, w: &GoodWord, p: &GroupParams) {
        self.checked += 1;
        self.max_error = self.max_error.max(err);
        if !ok {
            self.failed += 1;
            if self.failures.len() < 5 {
                let c = |z: C64| [z.re, z.im];
                self.failures.push(Failure {
                    word: w.to_string(),
                    beta: c(p.beta),
                    beta2: c(p.beta2),
                    gamma: c(p.gamma),
                    error: err,
                });
            }
        }
    }

    fn check(&mut self, err: f64, w: &GoodWord, p: &GroupParams) {
        self.record(err, err < self.tolerance, w, p);
    }
}

#[derive(Debug, Serialize)]
struct Report {
    seed: u64,
    samples: usize,
    pass: bool,
    warnings: Vec<String>,
    sweeps: Vec<Sweep>,
}

fn polar<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..TAU))
}

/// Parameters kept away from the special values beta in {0, -4}, gamma = 0.
fn sample_params<R: Rng>(rng: &mut R) -> GroupParams {
    GroupParams::new(polar(rng, 0.5, 1.5), polar(rng, 0.0, 1.0), polar(rng, 0.1, 1.0))
}

fn sample_word<R: Rng>(rng: &mut R, max_m: usize, max_exp: i64) -> GoodWord {
    loop {
        let m = rng.gen_range(1..=max_m);
        let w = random_word(rng, m, max_exp, None);
        if !w.is_identity() {
            return w;
        }
    }
}

fn exact_eval(p: &RatPoly2, b: C64, g: C64) -> C64 {
    match (CRat::from_c64(b), CRat::from_c64(g)) {
        (Some(b), Some(g)) => p.eval_exact(&b, &g).to_c64(),
        _ => p.eval(b, g),
    }
}

/// `tr[A, w] - 2` and, for balanced words, the trace discrepancy against `2 r_w`.
fn oracle_errors(w: &GoodWord, wp: &WordPolys, p: &GroupParams) -> Result<(C64, Option<C64>), CliError> {
    let cp = canonical_pair(p, Subchoice::Auto).map_err(failure)?;
    let m = eval_word_matrix(&cp.a, &cp.b, w);
    let defect = commutator_defect(&cp.a, &m) - exact_eval(&wp.p, p.beta, p.gamma);
    let tr = if !wp.balanced {
        None
    } else {
        let tm = if w.classify().even { m.trace() } else { (m * cp.a).trace() };
        Some(tm - 2.0 * exact_eval(&wp.r, p.beta, p.gamma))
    };
    Ok((defect, tr))
}

/// Worst ratio of consecutive deviations; deviations already at roundoff count as converged.
fn convergence_ratio(devs: &[f64]) -> f64 {
    devs.windows(2).map(|d| if d[0] < 1e-12 { 0.0 } else { d[1] / d[0] }).fold(0.0, f64::max)
}

pub fn run(a: VerifyArgs) -> Result<u8, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut warnings = Vec::new();
    if a.samples == 0 {
        warnings.push("--samples 0: nothing was checked".to_string());
    }
    eprintln!("verify: seed {}, {} samples", a.seed, a.samples);
    let flip = a.inject_fault == Some(Fault::SignFlip);

    let mut trace = Sweep::new("trace", TOL);
    let mut comm = Sweep::new("commutator", TOL);
    let mut indep = Sweep::new("beta2-independence", 1e-10);
    for _ in 0..a.samples {
        let w = sample_word(&mut rng, 4, 3);
        let p = sample_params(&mut rng);
        let wp: Arc<WordPolys> = if flip {
            Arc::new(word_polys_with_sign(&w, -unbalanced_sign()).map_err(failure)?)
        } else {
            word_polys(&w).map_err(failure)?
        };
        let (d0, t0) = oracle_errors(&w, &wp, &p)?;
        comm.check(d0.norm(), &w, &p);
        if let Some(t0) = t0 {
            trace.check(t0.norm(), &w, &p);
        }
        // both discrepancies must not move when only beta' changes
        let mut spread = 0.0f64;
        for _ in 0..10 {
            let q = GroupParams::new(p.beta, polar(&mut rng, 0.0, 1.0), p.gamma);
            let (d, t) = oracle_errors(&w, &wp, &q)?;
            spread = spread.max((d - d0).norm());
            if let (Some(t), Some(t0)) = (t, t0) {
                spread = spread.max((t - t0).norm());
            }
        }
        indep.check(spread, &w, &p);
    }

    let mut norm = Sweep::new("norm", 0.5);
    for _ in 0..a.samples {
        let w = sample_word(&mut rng, 8, 5);
        let q = word_to_quat(&w.core()).map_err(failure)?;
        let ok = qnorm(&q).is_ok_and(|n| n.is_one());
        let p = GroupParams::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        norm.record(if ok { 0.0 } else { 1.0 }, ok, &w, &p);
    }

    let mut limit = Sweep::new("limit-convergence", 1.0 / LIMIT_RATIO);
    let mut second = Sweep::new("second-limit-convergence", 1.0 / LIMIT_RATIO);
    let mut parabolic = Sweep::new("parabolic-forms", TOL);
    let n_limit = a.samples.min(6);
    for k in 0..n_limit {
        let w = if k == 0 {
            tracepoly::words::parse_word("[b,a]", false).expect("literal word")
        } else {
            sample_word(&mut rng, 4, 3).core()
        };
        let q = if k == 0 { generator(3) } else { word_to_quat(&w).map_err(failure)? };
        let beta2 = polar(&mut rng, 0.1, 1.0);
        let gamma = polar(&mut rng, 0.1, 1.0);
        let p = GroupParams::new(C64::new(0.0, 0.0), beta2, gamma);
        let betas: Vec<C64> = LIMIT_BETAS.iter().map(|&b| C64::new(b, 0.0)).collect();
        let devs = verify_limits(&q, beta2, gamma, &betas).map_err(failure)?;
        let ratio = convergence_ratio(&devs);
        limit.check(ratio, &w, &p);
        let gammas: Vec<C64> = LIMIT_BETAS.iter().map(|&g| C64::new(g, 0.0)).collect();
        let devs = verify_second_limit(&q, beta2, &gammas).map_err(failure)?;
        let ratio = convergence_ratio(&devs);
        second.check(ratio, &w, &p);
        for g in [gamma, C64::new(0.0, 0.0)] {
            let p = GroupParams::new(C64::new(0.0, 0.0), beta2, g);
            let cp = canonical_pair(&p, Subchoice::Auto).map_err(failure)?;
            let m = eval_word_matrix(&cp.a, &cp.b, &w);
            let phi = phi_eval(&q, &p, None).map_err(failure)?;
            parabolic.check(m.dist(&phi) / (1.0 + m.max_abs()), &w, &p);
        }
    }

    let sweeps = vec![trace, comm, indep, norm, limit, second, parabolic];
    let pass = sweeps.iter().all(|s| s.failed == 0);
    let report = Report { seed: a.seed, samples: a.samples, pass, warnings, sweeps };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        println!("seed {}", report.seed);
        for s in &report.sweeps {
            let mark = if s.failed == 0 { "ok" } else { "FAILED" };
            println!(
                "{:<26} {:>5} checked  max {:>9.2e}  tol {:>8.1e}  {mark}",
                s.name, s.checked, s.max_error, s.tolerance
            );
            for f in &s.failures {
                println!(
                    "    {}  beta {:?}  beta2 {:?}  gamma {:?}  error {:.3e}",
                    f.word, f.beta, f.beta2, f.gamma, f.error
                );
            }
        }
        println!("{}", if pass { "all sweeps passed" } else { "verification FAILED" });
    }
    Ok(if pass { 0 } else { 1 })
}
