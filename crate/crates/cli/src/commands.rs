use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;

use tracepoly::cnum::{parse_rational, CNum};
use tracepoly::discreteness::{arithmeticity_screen, axis_coincidence, multiple_root_check, KillerSearch};
use tracepoly::exactpoly::RatPoly2;
use tracepoly::quatalg::{enumerate_units, in_order_o, Quat};
use tracepoly::wordpoly::{rstw_uv, table1, trace_poly, word_checks, word_polys, word_polys_json};
use tracepoly::words::parse_word;
use tracepoly::zeroset::{classify_grid, export_raster, scan_roots, write_roots_csv, CellClass, Corpus, Window};

use crate::{failure, usage, CliError, EXIT_CERTIFICATE};

type Res = Result<u8, CliError>;

fn print_json<T: Serialize>(v: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn greek(p: &RatPoly2) -> String {
    p.display_with("β", "γ")
}

pub fn parse_cnum(s: &str) -> Result<CNum, CliError> {
    s.parse::<CNum>().map_err(|e| usage(format!("bad complex number: {}", e.0)))
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// Word such as "bab", "b a^2 b^-1 a^-1" or "[b,a]".
    #[arg(required_unless_present = "table1")]
    word: Option<String>,
    /// Read `b` as an involution (b^-1 = b).
    #[arg(long)]
    order2: bool,
    /// Recompute the reference table of ten trace polynomials.
    #[arg(long, conflicts_with = "word")]
    table1: bool,
    /// Also print the quaternion in the (u, v) coordinates.
    #[arg(long)]
    uv: bool,
    #[arg(long)]
    json: bool,
}

pub fn poly(a: PolyArgs) -> Res {
    if a.table1 {
        return poly_table(a.json);
    }
    let text = a.word.as_deref().unwrap_or_default();
    let w = parse_word(text, a.order2).map_err(usage)?;
    let wp = word_polys(&w).map_err(usage)?;
    let uv = if a.uv { Some(rstw_uv(&w).map_err(usage)?) } else { None };
    if a.json {
        let mut v = serde_json::to_value(word_polys_json(&wp))?;
        if let Some(q) = &uv {
            v["uv"] = serde_json::to_value(q)?;
        }
        print_json(&v)?;
        return Ok(0);
    }
    let checks = word_checks(&wp);
    let ok = |b: bool| if b { "ok" } else { "FAILED" };
    println!("word        {w}");
    println!("class       {}", w.classify());
    println!("core        {}", wp.core);
    println!("quaternion  {}", wp.as_quat());
    println!("r           {}", greek(&wp.r));
    println!("s           {}", greek(&wp.s));
    println!("t           {}", greek(&wp.t));
    println!("w           {}", greek(&wp.w));
    match &wp.g {
        Some(g) => println!("g           {}", greek(g)),
        None => println!("g           (not a polynomial)"),
    }
    println!("p           {}", greek(&wp.p));
    if let Some(q) = &uv {
        println!("uv          {q}");
    }
    println!("checks      norm {}, oracle {}", ok(checks.norm_ok), ok(checks.trace_ok));
    Ok(if checks.norm_ok && checks.trace_ok { 0 } else { 1 })
}

fn poly_table(as_json: bool) -> Res {
    let mut rows = Vec::new();
    for (wd, want) in table1() {
        let w = parse_word(wd, true).map_err(failure)?;
        let p = trace_poly(&w).map_err(failure)?;
        let matches = p == want;
        rows.push(json!({ "word": wd, "p": p.to_json(), "display": greek(&p), "matches": matches }));
    }
    let all = rows.iter().all(|r| r["matches"] == true);
    if as_json {
        print_json(&rows)?;
    } else {
        for r in &rows {
            let mark = if r["matches"] == true { "ok" } else { "MISMATCH" };
            println!("{:<22} {:<8} {}", r["word"].as_str().unwrap_or(""), mark, r["display"].as_str().unwrap_or(""));
        }
    }
    Ok(if all { 0 } else { 1 })
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// beta, exact when given as a decimal or fraction literal (e.g. 0, -1/2, 0.25+1i).
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    #[arg(long, default_value_t = 5)]
    max_syllables: usize,
    #[arg(long, default_value_t = 4)]
    max_exp: i64,
    /// Write the roots as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Grid size `N` or `NXxNY`; enables the grid classification.
    #[arg(long)]
    resolution: Option<String>,
    /// Grid window `re_min,re_max,im_min,im_max`.
    #[arg(long, allow_hyphen_values = true, default_value = "-1.5,1.5,-1.5,1.5")]
    window: String,
    #[arg(long, default_value_t = 30)]
    depth: usize,
    #[arg(long, default_value_t = 500)]
    budget: usize,
    /// Raster output, `.pgm` or `.csv`, with a `.json` sidecar.
    #[arg(long)]
    raster: Option<PathBuf>,
}

fn parse_resolution(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || usage(format!("bad resolution '{s}'"));
    let (x, y) = match s.split_once(['x', 'X']) {
        Some((x, y)) => (x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if x == 0 || y == 0 {
        return Err(bad());
    }
    Ok((x, y))
}

fn parse_window(s: &str) -> Result<Window, CliError> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(usage)?;
    match v[..] {
        [re_min, re_max, im_min, im_max] if re_min < re_max && im_min < im_max => {
            Ok(Window { re_min, re_max, im_min, im_max })
        }
        _ => Err(usage(format!("bad window '{s}'"))),
    }
}

pub fn scan(a: ScanArgs) -> Res {
    let beta = parse_cnum(&a.beta)?;
    let corpus = Corpus { max_syllables: a.max_syllables, max_exp: a.max_exp };
    let res = if a.raster.is_some() { Some(a.resolution.as_deref().unwrap_or("100")) } else { a.resolution.as_deref() };
    let res = res.map(parse_resolution).transpose()?;
    let window = parse_window(&a.window)?;
    let scan = scan_roots(&beta, corpus).map_err(usage)?;
    if let Some(path) = &a.out {
        write_roots_csv(&scan, BufWriter::new(File::create(path)?)).map_err(failure)?;
    }
    let grid = match res {
        Some((nx, ny)) => {
            let r = classify_grid(&beta, window, nx, ny, a.depth, a.budget, Some(&scan)).map_err(usage)?;
            if let Some(path) = &a.raster {
                export_raster(&r, path).map_err(failure)?;
            }
            Some(r)
        }
        None => None,
    };
    let count = |c: CellClass| grid.as_ref().map(|g| g.cells.iter().filter(|&&x| x == c).count());
    if a.json {
        let mut v = serde_json::to_value(&scan)?;
        v["max_modulus"] = json!(scan.max_modulus());
        if let Some(g) = &grid {
            v["grid"] = json!({
                "window": g.window,
                "resolution": [g.nx, g.ny],
                "max_depth": g.max_depth,
                "word_budget": g.word_budget,
                "certificate": count(CellClass::Certificate),
                "root-near": count(CellClass::RootNear),
                "inconclusive": count(CellClass::Inconclusive),
            });
        }
        print_json(&v)?;
    } else {
        println!("beta          {beta}");
        println!("words         {}", scan.words_scanned);
        println!("roots         {}", scan.roots.len());
        println!("max |root|    {:.6}", scan.max_modulus());
        println!("max residual  {:.3e}", scan.max_residual);
        if let Some(g) = &grid {
            println!(
                "grid {}x{}    certificate {}, root-near {}, inconclusive {}",
                g.nx,
                g.ny,
                count(CellClass::Certificate).unwrap_or(0),
                count(CellClass::RootNear).unwrap_or(0),
                count(CellClass::Inconclusive).unwrap_or(0)
            );
        }
    }
    Ok(0)
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    /// Maximum number of composed words in an orbit chain.
    #[arg(long, default_value_t = 30)]
    depth: usize,
    /// Number of words tried at each step.
    #[arg(long, default_value_t = 500)]
    budget: usize,
    /// Instead of searching, test this word for axis coincidence and a multiple root.
    #[arg(long)]
    word: Option<String>,
    #[arg(long)]
    json: bool,
}

pub fn discrete(a: DiscreteArgs) -> Res {
    let beta = parse_cnum(&a.beta)?;
    let gamma = parse_cnum(&a.gamma)?;
    if let Some(text) = &a.word {
        let w = parse_word(text, true).map_err(usage)?;
        let axis = axis_coincidence(&w, &beta, &gamma).map_err(usage)?;
        let multiple = multiple_root_check(&w, &beta, &gamma).map_err(usage)?;
        if a.json {
            print_json(&json!({ "word": w.to_string(), "axis_coincidence": axis, "multiple_root": multiple }))?;
        } else {
            println!("word              {w}");
            println!("axis coincidence  {axis}");
            println!("multiple root     {multiple}");
        }
        return Ok(0);
    }
    let search = KillerSearch::new(&beta, a.depth, a.budget).map_err(usage)?;
    match search.search(&gamma) {
        Some(cert) => {
            print_json(&cert)?;
            Ok(EXIT_CERTIFICATE)
        }
        None => {
            let report = json!({
                "result": "inconclusive",
                "beta": beta.to_string(),
                "gamma": gamma.to_string(),
                "max_depth": a.depth,
                "words": search.num_words(),
            });
            if a.json {
                print_json(&report)?;
            } else {
                println!("inconclusive: no certificate within depth {} over {} words", a.depth, search.num_words());
            }
            Ok(0)
        }
    }
}

#[derive(Debug, Args)]
pub struct UnitsArgs {
    #[arg(long)]
    max_degree: u32,
    /// Bound on |coefficient|; half-integers are searched.
    #[arg(long, default_value = "2")]
    bound: String,
    #[arg(long)]
    json: bool,
}

pub fn units(a: UnitsArgs) -> Res {
    let bound = parse_rational(&a.bound).ok_or_else(|| usage(format!("bad bound '{}'", a.bound)))?;
    let mut found: Vec<Quat> = enumerate_units(a.max_degree, &bound).map_err(usage)?;
    found.sort_by_key(|q| q.display());
    let all_in_order = found.iter().all(|q| in_order_o(q).member);
    if a.json {
        let rows: Vec<_> = found
            .iter()
            .map(|q| json!({ "display": q.display(), "quaternion": q, "in_order": in_order_o(q).member }))
            .collect();
        print_json(&rows)?;
    } else {
        for q in &found {
            println!("{q}");
        }
        println!("{} units", found.len());
    }
    Ok(if all_in_order { 0 } else { 1 })
}

#[derive(Debug, Args)]
pub struct ArithArgs {
    /// Monic minimal polynomial of u, coefficients from the leading one down (e.g. "1,1,0,-1").
    #[arg(long, allow_hyphen_values = true)]
    minpoly: String,
    /// v as an integer polynomial in u, coefficients from the leading one down (e.g. "1,0" for v = u).
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long)]
    json: bool,
}

fn parse_coeffs(s: &str) -> Result<Vec<i64>, CliError> {
    let mut v: Vec<i64> = s.split(',').map(|t| t.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(usage)?;
    v.reverse();
    Ok(v)
}

pub fn arith(a: ArithArgs) -> Res {
    let minpoly = parse_coeffs(&a.minpoly)?;
    let v = parse_coeffs(&a.v)?;
    let rep = arithmeticity_screen(&minpoly, &v).map_err(usage)?;
    if a.json {
        print_json(&rep)?;
    } else {
        println!("pass           {}", rep.pass);
        println!("degree         {}", rep.degree);
        println!("real roots     {:?}", rep.real_roots);
        println!("complex pairs  {}", rep.complex_pairs);
        println!("v at roots     {:?}", rep.v_at_real_roots);
        let irr = match rep.irreducible {
            Some(true) => "yes",
            Some(false) => "no",
            None => "unverified",
        };
        println!("irreducible    {irr}");
        for d in &rep.diagnostics {
            println!("note           {d}");
        }
    }
    Ok(0)
}
