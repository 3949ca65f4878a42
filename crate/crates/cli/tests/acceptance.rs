//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tracepoly::cnum::{CNum, CRat};
use tracepoly::discreteness::{common_zeros, killer_search, multiplier_at_zero};
use tracepoly::exactpoly::{poly, Basis, RatPoly2};
use tracepoly::numeric::{
    canonical_pair, commutator_defect, eval_word_matrix, phi_eval, verify_limits, GroupParams, Subchoice,
};
use tracepoly::quatalg::*;
use tracepoly::wordpoly::*;
use tracepoly::words::*;
use tracepoly::zeroset::{classify_grid, CellClass, Window};

type Outcome = Result<String, String>;

fn bin(args: &[&str]) -> Result<(std::process::Output, Duration), String> {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_tracepoly")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out, t.elapsed()))
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed > limit {
        Err(format!("took {elapsed:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..TAU))
}

fn nonempty_word(rng: &mut ChaCha8Rng, max_m: usize, max_exp: i64) -> GoodWord {
    loop {
        let m = rng.gen_range(1..=max_m);
        let w = random_word(rng, m, max_exp, None);
        if !w.is_identity() {
            return w;
        }
    }
}

fn table_one() -> Outcome {
    let (out, dt) = bin(&["poly", "--table1", "--json"])?;
    if out.status.code() != Some(0) {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let want = table1();
    if rows.len() != want.len() || want.len() != 10 {
        return Err(format!("{} rows", rows.len()));
    }
    for (row, (wd, p)) in rows.iter().zip(&want) {
        let got = RatPoly2::from_json(&serde_json::from_value(row["p"].clone()).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if row["word"] != *wd || &got != p {
            return Err(format!("{wd}: got {got}, want {p}"));
        }
    }
    within(dt, Duration::from_secs(5))?;
    Ok(format!("10 rows exact in {dt:.1?}"))
}

fn table_two() -> Outcome {
    let (out, dt) = bin(&["units", "--max-degree", "2", "--json"])?;
    if out.status.code() != Some(0) {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    for r in rows {
        let q: Quat = serde_json::from_value(r["quaternion"].clone()).map_err(|e| e.to_string())?;
        got.push(q.sign_normalized());
    }
    let mut want: Vec<Quat> = table2().iter().map(|q| q.sign_normalized()).collect();
    got.sort_by_key(|q| q.display());
    want.sort_by_key(|q| q.display());
    if got != want {
        return Err(format!("{} units found, differing from the 14 listed", got.len()));
    }
    within(dt, Duration::from_secs(120))?;
    Ok(format!("14 units in {dt:.1?}"))
}

fn generators() -> Outcome {
    let words = ["a^2", "b a^2 b^-1", "[b,a]"];
    let uv = |c: [&[(u32, u32, i64)]; 4], d| Quat::from_terms(Algebra::QUV, c, d);
    let images = [
        uv([&[(1, 0, 1)], &[(0, 0, 1)], &[], &[]], 1),
        uv([&[(1, 0, 1)], &[(0, 1, 1)], &[], &[(0, 0, -1)]], 1),
        uv([&[(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, -1)], &[(0, 1, 1), (0, 0, -1)], &[(0, 0, 1), (1, 0, -1)], &[(0, 0, -1)]], 2),
    ];
    let q0 = |c: [&[(u32, u32, i64)]; 4]| Quat::from_terms(Algebra::Q0, c, 2);
    let gens = [
        q0([&[(1, 0, 1), (0, 0, 2)], &[(1, 0, 1)], &[], &[]]),
        q0([&[(1, 0, 1), (0, 0, 2)], &[(1, 0, 1), (0, 1, -2)], &[], &[(0, 0, -2)]]),
        q0([&[(0, 1, 1), (0, 0, 2)], &[(0, 1, -1)], &[(0, 0, -1)], &[(0, 0, -1)]]),
    ];
    for ((wd, g), img) in words.iter().zip(&gens).zip(&images) {
        let q = word_to_quat(&parse_word(wd, false).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if &q != g {
            return Err(format!("{wd}: {q}"));
        }
        let r = rho(&q).map_err(|e| e.to_string())?;
        if &r != img {
            return Err(format!("rho({wd}) = {r}"));
        }
    }
    Ok("three generators and their images exact".into())
}

fn norm_identity() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let w = nonempty_word(&mut rng, 8, 5);
        let q = word_to_quat(&w.core()).map_err(|e| e.to_string())?;
        if !qnorm(&q).map_err(|e| e.to_string())?.is_one() {
            return Err(format!("{w}: norm is not 1"));
        }
    }
    within(t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("500 words in {:.1?}", t.elapsed()))
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_t, mut worst_c, mut worst_spread) = (0.0f64, 0.0f64, 0.0f64);
    let mut balanced = 0;
    for _ in 0..500 {
        let w = nonempty_word(&mut rng, 4, 3);
        let wp = word_polys(&w).map_err(|e| e.to_string())?;
        let cls = w.classify();
        let beta = polar(&mut rng, 0.5, 1.5);
        let gamma = polar(&mut rng, 0.1, 1.0);
        let (b, g) = (CRat::from_c64(beta).unwrap(), CRat::from_c64(gamma).unwrap());
        let p_exact = wp.p.eval_exact(&b, &g).to_c64();
        let r2 = wp.r.eval_exact(&b, &g).to_c64() * 2.0;
        let mut first: Option<(C64, C64)> = None;
        for _ in 0..10 {
            let p = GroupParams::new(beta, polar(&mut rng, 0.0, 1.0), gamma);
            let cp = canonical_pair(&p, Subchoice::Auto).map_err(|e| e.to_string())?;
            let m = eval_word_matrix(&cp.a, &cp.b, &w);
            let dc = commutator_defect(&cp.a, &m) - p_exact;
            let dt = match (cls.balanced, cls.even) {
                (false, _) => C64::zero(),
                (true, true) => m.trace() - r2,
                (true, false) => (m * cp.a).trace() - r2,
            };
            worst_c = worst_c.max(dc.norm());
            worst_t = worst_t.max(dt.norm());
            match first {
                None => first = Some((dc, dt)),
                Some((c0, t0)) => worst_spread = worst_spread.max((dc - c0).norm()).max((dt - t0).norm()),
            }
        }
        balanced += cls.balanced as usize;
    }
    let detail = format!(
        "trace {worst_t:.1e} over {balanced} balanced words, commutator {worst_c:.1e}, beta' spread {worst_spread:.1e}"
    );
    if worst_t < 1e-9 && worst_c < 1e-9 && worst_spread < 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn limits() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut elements = vec![(parse_word("[b,a]", false).unwrap(), generator(3))];
    while elements.len() < 6 {
        let w = nonempty_word(&mut rng, 4, 3).core();
        if w.is_identity() {
            continue;
        }
        let q = word_to_quat(&w).map_err(|e| e.to_string())?;
        elements.push((w, q));
    }
    let (mut worst_limit, mut worst_form) = (0.0f64, 0.0f64);
    for (w, q) in &elements {
        let beta2 = polar(&mut rng, 0.1, 1.0);
        let gamma = polar(&mut rng, 0.1, 1.0);
        let dev = verify_limits(q, beta2, gamma, &[C64::new(1e-6, 0.0)]).map_err(|e| e.to_string())?;
        worst_limit = worst_limit.max(dev[0]);
        for g in [gamma, C64::zero()] {
            let p = GroupParams::new(C64::zero(), beta2, g);
            let cp = canonical_pair(&p, Subchoice::Auto).map_err(|e| e.to_string())?;
            let m = eval_word_matrix(&cp.a, &cp.b, w);
            let phi = phi_eval(q, &p, None).map_err(|e| e.to_string())?;
            worst_form = worst_form.max(m.dist(&phi) / (1.0 + m.max_abs()));
        }
    }
    let detail = format!("deviation at beta=1e-6 {worst_limit:.2e} (bound 1e-4), beta=0 forms {worst_form:.1e}");
    if worst_limit < 1e-4 && worst_form < 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 100 {
        let pick = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(1..=3);
            let rs: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 }).collect();
            order2_from_exponents(&rs)
        };
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        let xy = x.star(&y);
        if x.is_identity() || y.is_identity() || xy.is_identity() {
            continue;
        }
        let lhs = trace_poly(&xy).map_err(|e| e.to_string())?;
        let rhs = trace_poly(&x)
            .and_then(|px| trace_poly(&y).map(|py| (px, py)))
            .map_err(|e| e.to_string())
            .and_then(|(px, py)| px.compose_second(&py).map_err(|e| e.to_string()))?;
        if lhs != rhs {
            return Err(format!("{x} * {y}"));
        }
        done += 1;
    }
    Ok("100 pairs exact".into())
}

fn multipliers() -> Outcome {
    let x = |terms: &[(u32, u32, i64)]| poly(Basis::XZ, terms, 1);
    let table = [
        ("bab", x(&[(1, 0, -1)])),
        ("babab", x(&[(2, 0, 1), (1, 0, 2), (0, 0, 1)])),
        ("baba^-1b", x(&[(1, 0, -2), (0, 0, 1)])),
        ("bababab", x(&[(2, 0, 9), (1, 0, -6), (0, 0, 1)])),
        ("ba^-2bababa^-2bab", RatPoly2::zero(Basis::XZ)),
    ];
    let mut bad = Vec::new();
    for (wd, want) in &table {
        let got = multiplier_at_zero(&parse_word(wd, true).unwrap()).map_err(|e| e.to_string())?;
        if &got != want {
            bad.push(format!("{wd}: got {}, want {}", got.display_with("β", "γ"), want.display_with("β", "γ")));
        }
    }
    if bad.is_empty() {
        Ok("five multipliers exact".into())
    } else {
        Err(bad.join("; "))
    }
}

fn relators() -> Outcome {
    let w = parse_word("a b a^5 b^-1 a b a^2 b^-1 a^-3", false).unwrap();
    let q = rstw_uv(&w).map_err(|e| e.to_string())?;
    let cz = common_zeros(&q.t, &q.w).map_err(|e| e.to_string())?;
    let (u, v) = (rat(-1, 2), rat(-1, 3));
    if !cz.shared_factor.is_empty() || cz.points.len() != 1 || cz.rational_points != vec![(u.clone(), v.clone())] {
        return Err(format!("first relator: {:?}", cz.rational_points));
    }
    if !q.s.eval_rat(&u, &v).is_zero() || q.r.eval_rat(&u, &v) != -BigRational::one() {
        return Err("first relator: s, r wrong at the common zero".into());
    }

    let w = parse_word("a b a^5 b^-1 a^-2", false).unwrap();
    let q = rstw_uv(&w).map_err(|e| e.to_string())?;
    let cz = common_zeros(&q.t, &q.w).map_err(|e| e.to_string())?;
    // monic form of 4u^2 + 2u - 1
    if cz.shared_factor != vec![rat(-1, 4), rat(1, 2), rat(1, 1)] {
        return Err(format!("second relator shared factor {:?}", cz.shared_factor));
    }
    for u in [(-1.0 + 5f64.sqrt()) / 4.0, (-1.0 - 5f64.sqrt()) / 4.0] {
        let worst = [0.0, 1.0, 2.0].iter().map(|&v| q.s.eval(C64::new(u, 0.0), C64::new(v, 0.0)).norm()).fold(0.0, f64::max);
        if worst < 1e-6 {
            return Err(format!("second relator: s vanishes on u = {u}"));
        }
    }
    Ok("unique zero (-1/2, -1/3) with s = 0, r = -1; shared factor 4u^2 + 2u - 1".into())
}

fn sweep() -> Outcome {
    let t = Instant::now();
    let zero: CNum = "0".parse().unwrap();
    let win = Window { re_min: -1.5, re_max: 1.5, im_min: -1.5, im_max: 1.5 };
    let r = classify_grid(&zero, win, 100, 100, 30, 500, None).map_err(|e| e.to_string())?;
    let mut inside = 0;
    for row in 0..r.ny {
        for col in 0..r.nx {
            let g = r.center(row, col);
            if g.norm() > 0.0 && g.norm() < 1.0 {
                inside += 1;
                if r.get(row, col) != CellClass::Certificate {
                    return Err(format!("no certificate at {g}"));
                }
            }
        }
    }
    for g in ["2", "4"] {
        if killer_search(&zero, &g.parse().unwrap(), 30, 500).map_err(|e| e.to_string())?.is_some() {
            return Err(format!("certificate at gamma = {g}"));
        }
    }
    within(t.elapsed(), Duration::from_secs(600))?;
    Ok(format!("{inside} cells certified, none at 2 or 4, {:.1?}", t.elapsed()))
}

fn valid_witness(q: &Quat) -> bool {
    let c = in_order_o(q);
    let Some(wit) = &c.witness else { return false };
    if !c.member || !c.consistent() || !wit.ints.components().iter().all(|p| p.is_integral()) {
        return false;
    }
    if !wit.p.terms().iter().all(|(_, k)| k.is_one()) {
        return false;
    }
    let half = wit.p.scale(&rat(1, 2));
    let oc = order_c();
    let comps = wit.ints.components();
    let ok = comps.iter().zip(oc.components()).zip(q.components()).all(|((i, c), q)| &(*i + &(&half * c)) == q);
    ok
}

fn half_integrality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let w = nonempty_word(&mut rng, 6, 4);
        let q = rho(&word_to_quat(&w.core()).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !valid_witness(&q) {
            return Err(format!("word {w}"));
        }
    }
    let units = enumerate_units(2, &rat(2, 1)).map_err(|e| e.to_string())?;
    for q in units.iter().chain(&table2()) {
        if !valid_witness(q) {
            return Err(format!("unit {q}"));
        }
    }
    let irr = verify_irrational_unit();
    if !irr.ok {
        return Err(format!("irrational unit deviation {:e}", irr.deviation));
    }
    Ok(format!("200 words and {} units with witnesses; irrational unit {:.1e}", units.len(), irr.deviation))
}

fn chebyshev() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut done = 0;
    while done < 50 {
        let ns: [i64; 5] = std::array::from_fn(|_| rng.gen_range(-4..=4));
        if ns.iter().sum::<i64>() % 2 != 0 {
            continue;
        }
        let cheb = chebyshev_to_pipeline(&chebyshev_rstw(ns).map_err(|e| e.to_string())?);
        let w = chebyshev_word(ns);
        let pipe = if w.is_identity() { Quat::one(Algebra::QUV) } else { rstw_uv(&w).map_err(|e| e.to_string())? };
        if cheb != pipe {
            return Err(format!("{ns:?}"));
        }
        done += 1;
    }
    Ok("50 tuples exact".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("table of trace polynomials", table_one),
        ("table of units", table_two),
        ("generator quaternions", generators),
        ("norm identity", norm_identity),
        ("oracle agreement", oracle),
        ("parabolic limits", limits),
        ("composition law", composition),
        ("multiplier table", multipliers),
        ("relator detection", relators),
        ("discreteness sweep", sweep),
        ("half-integrality", half_integrality),
        ("chebyshev cross-check", chebyshev),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
