//! Roots of `p_w(beta, .)` over a word corpus, and a raster classification of the
//! gamma-plane by killer-word search.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnum::{CNum, C64};
use crate::discreteness::{DiscretenessError, KillerSearch};
use crate::roots::{horner, roots_exact, roots_univariate, RootError, CLUSTER_RADIUS};
use crate::wordpoly::{word_polys, WordPolyError};
use crate::words::enumerate_order2;

#[derive(Debug, Error)]
pub enum ZeroSetError {
    #[error("corpus of {0} words exceeds the budget of {1}")]
    Budget(usize, usize),
    #[error(transparent)]
    WordPoly(#[from] WordPolyError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Discreteness(#[from] DiscretenessError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub const MAX_WORDS: usize = 10_000;

/// Order-2-mode words with `1..=max_syllables` b-letters and |a-exponents| <= `max_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub max_syllables: usize,
    pub max_exp: i64,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus { max_syllables: 5, max_exp: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRoot {
    pub re: f64,
    pub im: f64,
    pub word: String,
    pub multiplicity: usize,
}

impl ScanRoot {
    pub fn z(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSetScan {
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub beta: C64,
    pub corpus: Corpus,
    pub words_scanned: usize,
    pub roots: Vec<ScanRoot>,
    /// Largest |p_w(beta, root)| over the scan.
    pub max_residual: f64,
}

impl ZeroSetScan {
    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|r| r.z().norm()).fold(0.0, f64::max)
    }

    pub fn near_root(&self, g: C64, radius: f64) -> bool {
        self.roots.iter().any(|r| (r.z() - g).norm() <= radius)
    }
}

/// All roots of `p_w(beta, .)` for the corpus, in corpus order, deduplicated within
/// `CLUSTER_RADIUS` (the first word to produce a root keeps it). The zero root is
/// reported once per word with its multiplicity before deduplication. Exact `beta`
/// uses a square-free decomposition for the multiplicities.
pub fn scan_roots(beta: &CNum, corpus: Corpus) -> Result<ZeroSetScan, ZeroSetError> {
    let words: Vec<_> = enumerate_order2(corpus.max_syllables, corpus.max_exp);
    if words.len() > MAX_WORDS {
        return Err(ZeroSetError::Budget(words.len(), MAX_WORDS));
    }
    let b = beta.to_c64();
    let per_word: Vec<(Vec<ScanRoot>, f64)> = words
        .par_iter()
        .map(|w| -> Result<_, ZeroSetError> {
            let wp = word_polys(w)?;
            let approx = wp.p.coeffs_in_var1(b);
            let roots = match beta {
                CNum::Exact(q) => roots_exact(&wp.p.coeffs_in_var1_exact(q))?,
                CNum::Approx(_) => roots_univariate(&approx)?,
            };
            let name = w.to_string();
            let mut worst = 0.0f64;
            let out = roots
                .into_iter()
                .map(|r| {
                    worst = worst.max(horner(&approx, r.z).norm());
                    ScanRoot { re: r.z.re, im: r.z.im, word: name.clone(), multiplicity: r.multiplicity }
                })
                .collect();
            Ok((out, worst))
        })
        .collect::<Result<_, _>>()?;
    let mut roots: Vec<ScanRoot> = Vec::new();
    let mut max_residual = 0.0f64;
    for (rs, worst) in per_word {
        max_residual = max_residual.max(worst);
        for r in rs {
            let z = r.z();
            if !roots.iter().any(|o| (o.z() - z).norm() <= CLUSTER_RADIUS * z.norm().max(1.0)) {
                roots.push(r);
            }
        }
    }
    Ok(ZeroSetScan { beta: b, corpus, words_scanned: words.len(), roots, max_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellClass {
    Certificate,
    RootNear,
    Inconclusive,
}

impl CellClass {
    pub fn code(self) -> u8 {
        match self {
            CellClass::Certificate => 2,
            CellClass::RootNear => 1,
            CellClass::Inconclusive => 0,
        }
    }
}

/// Row-major cells; row 0 is the top edge (largest imaginary part).
#[derive(Debug, Clone, Serialize)]
pub struct Raster {
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub beta: C64,
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub max_depth: usize,
    pub word_budget: usize,
    pub cells: Vec<CellClass>,
}

impl Raster {
    /// Center of cell `(row, col)`.
    pub fn center(&self, row: usize, col: usize) -> C64 {
        cell_center(&self.window, self.nx, self.ny, row, col)
    }

    pub fn get(&self, row: usize, col: usize) -> CellClass {
        self.cells[row * self.nx + col]
    }
}

pub fn cell_center(w: &Window, nx: usize, ny: usize, row: usize, col: usize) -> C64 {
    let dx = (w.re_max - w.re_min) / nx as f64;
    let dy = (w.im_max - w.im_min) / ny as f64;
    C64::new(w.re_min + (col as f64 + 0.5) * dx, w.im_max - (row as f64 + 0.5) * dy)
}

/// Classify each cell center by killer search, then by proximity to a scanned root.
pub fn classify_grid(
    beta: &CNum,
    window: Window,
    nx: usize,
    ny: usize,
    max_depth: usize,
    word_budget: usize,
    scan: Option<&ZeroSetScan>,
) -> Result<Raster, ZeroSetError> {
    let search = KillerSearch::new(beta, max_depth, word_budget)?;
    let cells = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let g = cell_center(&window, nx, ny, k / nx, k % nx);
            if search.search(&CNum::Approx(g)).is_some() {
                CellClass::Certificate
            } else if scan.is_some_and(|s| s.near_root(g, CLUSTER_RADIUS * g.norm().max(1.0))) {
                CellClass::RootNear
            } else {
                CellClass::Inconclusive
            }
        })
        .collect();
    Ok(Raster { beta: beta.to_c64(), window, nx, ny, max_depth, word_budget, cells })
}

pub fn write_roots_csv<W: Write>(scan: &ZeroSetScan, out: W) -> Result<(), ZeroSetError> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in &scan.roots {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_roots_csv<R: std::io::Read>(input: R) -> Result<Vec<ScanRoot>, ZeroSetError> {
    let mut rdr = csv::Reader::from_reader(input);
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

/// Plain PGM (P2): certificate 255, root-near 128, inconclusive 0.
pub fn write_pgm<W: Write>(r: &Raster, mut out: W) -> std::io::Result<()> {
    writeln!(out, "P2\n{} {}\n255", r.nx, r.ny)?;
    for row in r.cells.chunks(r.nx) {
        let line: Vec<String> = row.iter().map(|c| [0, 128, 255][c.code() as usize].to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// One line per row of cell codes (0 inconclusive, 1 root-near, 2 certificate).
pub fn write_grid_csv<W: Write>(r: &Raster, mut out: W) -> std::io::Result<()> {
    for row in r.cells.chunks(r.nx) {
        let line: Vec<String> = row.iter().map(|c| c.code().to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct RasterSidecar<'a> {
    #[serde(serialize_with = "crate::roots::ser_c64")]
    pub beta: C64,
    pub window: &'a Window,
    pub resolution: [usize; 2],
    pub row_order: &'static str,
    pub legend: serde_json::Value,
    pub max_depth: usize,
    pub word_budget: usize,
    pub counts: serde_json::Value,
}

pub fn sidecar(r: &Raster) -> RasterSidecar<'_> {
    let count = |c: CellClass| r.cells.iter().filter(|&&x| x == c).count();
    RasterSidecar {
        beta: r.beta,
        window: &r.window,
        resolution: [r.nx, r.ny],
        row_order: "row 0 at im_max, columns from re_min",
        legend: serde_json::json!({"0": "inconclusive", "1": "root-near", "2": "certificate"}),
        max_depth: r.max_depth,
        word_budget: r.word_budget,
        counts: serde_json::json!({
            "certificate": count(CellClass::Certificate),
            "root-near": count(CellClass::RootNear),
            "inconclusive": count(CellClass::Inconclusive),
        }),
    }
}

/// Write `<stem>.pgm` or `<stem>.csv` (by extension) and `<stem>.json` beside it.
pub fn export_raster(r: &Raster, path: &Path) -> Result<(), ZeroSetError> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => write_pgm(r, f)?,
        _ => write_grid_csv(r, f)?,
    }
    let side = std::io::BufWriter::new(std::fs::File::create(path.with_extension("json"))?);
    serde_json::to_writer_pretty(side, &sidecar(r))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str) -> CNum {
        s.parse().unwrap()
    }

    #[test]
    fn small_scan() {
        let scan = scan_roots(&ex("0"), Corpus { max_syllables: 3, max_exp: 1 }).unwrap();
        // bab at beta = 0 is z^2
        let zero = scan.roots.iter().find(|r| r.z().norm() < 1e-12).unwrap();
        assert_eq!(zero.word, "b");
        // babab: (1 - z)^2 z
        let one = scan.roots.iter().find(|r| (r.z() - C64::new(1.0, 0.0)).norm() < 1e-9).unwrap();
        assert_eq!(one.multiplicity, 2);
        assert!(scan.max_residual < 1e-8);
    }

    #[test]
    fn csv_roundtrip() {
        let scan = scan_roots(&ex("0"), Corpus { max_syllables: 3, max_exp: 2 }).unwrap();
        let mut buf = Vec::new();
        write_roots_csv(&scan, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("re,im,word,multiplicity"));
        assert_eq!(read_roots_csv(&buf[..]).unwrap(), scan.roots);
    }

    #[test]
    fn raster_shape() {
        let w = Window { re_min: -2.0, re_max: 2.0, im_min: -2.0, im_max: 2.0 };
        let r = classify_grid(&ex("0"), w, 6, 4, 5, 20, None).unwrap();
        assert_eq!(r.cells.len(), 24);
        let mut buf = Vec::new();
        write_pgm(&r, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3 + 4);
        // center cells (|gamma| < 1) carry certificates
        assert_eq!(r.get(1, 2), CellClass::Certificate);
        assert!((r.center(0, 0) - C64::new(-5.0 / 3.0, 1.5)).norm() < 1e-12);
    }
}
