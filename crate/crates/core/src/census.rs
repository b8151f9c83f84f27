//! Exact census tables `N_δ(L)`: counts of classes by length and defect.
//!
//! Two independent routes fill a table. The brute route enumerates every
//! class and tallies its defect. The motif route sums descendant counts over
//! the motifs of each defect. Quadratic polynomials are read off the motif
//! route by exact interpolation and cross-checked against the symbolic sum
//! of the motifs' binomial terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::class::{default_shard_depth, par_fold_classes, shard_prefixes};
use crate::error::{Error, Result};
use crate::intersection::primitive_intersection;
use crate::motif::{binom_conv, descendant_count, motifs_cached, MotifRecord};

/// Largest length the brute route accepts.
pub const BRUTE_LMAX_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Motif,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Motif => "motif",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "brute" => Ok(Method::Brute),
            "motif" => Ok(Method::Motif),
            _ => Err(format!("unknown method {s:?} (expected brute or motif)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(format!("unknown format {s:?} (expected csv, json or markdown)")),
        }
    }
}

/// How a table was produced. Deliberately free of timings and thread
/// counts so that serialized tables are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub method: Method,
    /// Work units: enumeration shards for the brute route, motifs for the
    /// motif route.
    pub shards: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub entries: BTreeMap<(i64, usize), u64>,
    pub method: Method,
    pub lmin: usize,
    pub lmax: usize,
    pub dmax: i64,
    /// Lengths whose whole defect distribution lies within `dmax`.
    pub complete_rows: BTreeSet<usize>,
    pub provenance: Provenance,
}

impl CensusTable {
    fn empty(method: Method, lmin: usize, lmax: usize, dmax: i64) -> Self {
        let mut entries = BTreeMap::new();
        for l in lmin..=lmax {
            for d in -1..=dmax {
                entries.insert((d, l), 0);
            }
        }
        CensusTable {
            entries,
            method,
            lmin,
            lmax,
            dmax,
            complete_rows: BTreeSet::new(),
            provenance: Provenance { method, shards: 0 },
        }
    }

    /// `N_δ(L)`, or `None` outside the table.
    pub fn get(&self, delta: i64, length: usize) -> Option<u64> {
        self.entries.get(&(delta, length)).copied()
    }

    /// Row total over the stored defects.
    pub fn row_total(&self, length: usize) -> u64 {
        self.entries
            .iter()
            .filter(|((_, l), _)| *l == length)
            .map(|(_, c)| *c)
            .sum()
    }

    pub fn deltas(&self) -> BTreeSet<i64> {
        self.entries.keys().map(|k| k.0).collect()
    }

    /// Reads a table back from its CSV export. Completeness is not stored in
    /// CSV, so no row is marked complete.
    pub fn from_csv(text: &str) -> Result<CensusTable> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "delta,L,count,method" => {}
            other => return Err(Error::BadRecord(other.unwrap_or("").to_string())),
        }
        let mut entries = BTreeMap::new();
        let mut method = None;
        for line in lines {
            let bad = || Error::BadRecord(line.to_string());
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let m: Method = f[3].parse().map_err(|_| bad())?;
            if method.is_some_and(|prev| prev != m) {
                return Err(bad());
            }
            method = Some(m);
            let d: i64 = f[0].parse().map_err(|_| bad())?;
            let l: usize = f[1].parse().map_err(|_| bad())?;
            let c: u64 = f[2].parse().map_err(|_| bad())?;
            if entries.insert((d, l), c).is_some() {
                return Err(bad());
            }
        }
        let method = method.unwrap_or(Method::Brute);
        let lengths = entries.keys().map(|k| k.1);
        Ok(CensusTable {
            lmin: lengths.clone().min().unwrap_or(0),
            lmax: lengths.max().unwrap_or(0),
            dmax: entries.keys().map(|k| k.0).max().unwrap_or(-1),
            entries,
            method,
            complete_rows: BTreeSet::new(),
            provenance: Provenance { method, shards: 0 },
        })
    }
}

#[derive(Serialize)]
struct JsonEntry {
    delta: i64,
    #[serde(rename = "L")]
    length: usize,
    count: u64,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    method: Method,
    lmin: usize,
    lmax: usize,
    dmax: i64,
    complete_rows: &'a BTreeSet<usize>,
    provenance: &'a Provenance,
    entries: Vec<JsonEntry>,
}

/// Full defect distribution of one length, from enumeration.
fn brute_row(length: usize) -> BTreeMap<i64, u64> {
    par_fold_classes(
        length,
        BTreeMap::new(),
        |acc: &mut BTreeMap<i64, u64>, w| {
            let delta = primitive_intersection(w) as i64 - length as i64;
            *acc.entry(delta).or_insert(0) += 1;
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    )
}

fn row_path(dir: &Path, length: usize) -> PathBuf {
    dir.join("census").join(format!("brute-L{length}.csv"))
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn load_row(dir: &Path, length: usize) -> Result<Option<BTreeMap<i64, u64>>> {
    let path = row_path(dir, length);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut row = BTreeMap::new();
    for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
        let bad = || Error::BadRecord(line.to_string());
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 || f[1] != length.to_string() || f[3] != "brute" {
            return Err(bad());
        }
        let d: i64 = f[0].parse().map_err(|_| bad())?;
        let c: u64 = f[2].parse().map_err(|_| bad())?;
        row.insert(d, c);
    }
    Ok(Some(row))
}

fn save_row(dir: &Path, length: usize, row: &BTreeMap<i64, u64>) -> Result<()> {
    let mut text = String::from("delta,L,count,method\n");
    for (d, c) in row {
        let _ = writeln!(text, "{d},{length},{c},brute");
    }
    write_atomic(&row_path(dir, length), &text)
}

/// Brute-force table for `2 ≤ L ≤ lmax` and `δ ≤ dmax`.
pub fn brute_table(lmax: usize, dmax: i64) -> Result<CensusTable> {
    brute_table_cached(lmax, dmax, None)
}

/// Brute-force table, reusing and writing per-length checkpoints under
/// `cache_dir/census/` when given.
pub fn brute_table_cached(lmax: usize, dmax: i64, cache_dir: Option<&Path>) -> Result<CensusTable> {
    if lmax > BRUTE_LMAX_CAP {
        return Err(Error::LimitExceeded {
            what: "brute-force length",
            requested: lmax,
            cap: BRUTE_LMAX_CAP,
        });
    }
    let mut table = CensusTable::empty(Method::Brute, 2, lmax.max(1), dmax);
    for length in 2..=lmax {
        let cached = match cache_dir {
            Some(dir) => load_row(dir, length)?,
            None => None,
        };
        let row = match cached {
            Some(row) => row,
            None => {
                let row = brute_row(length);
                if let Some(dir) = cache_dir {
                    save_row(dir, length, &row)?;
                }
                row
            }
        };
        table.provenance.shards += shard_prefixes(length, default_shard_depth(length)).len();
        let mut complete = true;
        for (d, c) in row {
            if d <= dmax {
                table.entries.insert((d, length), c);
            } else {
                complete = false;
            }
        }
        if complete {
            table.complete_rows.insert(length);
        }
    }
    if let Some(dir) = cache_dir {
        let path = dir.join("census").join(format!("brute-{lmax}.csv"));
        write_atomic(&path, &export(&table, Format::Csv)?)?;
    }
    Ok(table)
}

/// `N_δ(L)` from a motif list, valid for every `L`.
pub fn motif_count(motifs: &[MotifRecord], length: i64) -> i64 {
    motifs.iter().map(|m| descendant_count(m, length)).sum()
}

/// Table for a single defect over a length range, from the motif formula.
pub fn motif_table(delta: i64, lmin: usize, lmax: usize) -> CensusTable {
    let motifs = crate::motif::enumerate_motifs(delta);
    let mut catalog = BTreeMap::new();
    catalog.insert(delta, motifs);
    motif_table_from(&catalog, lmin, lmax)
}

/// Table for every defect in `catalog`.
pub fn motif_table_from(catalog: &BTreeMap<i64, Vec<MotifRecord>>, lmin: usize, lmax: usize) -> CensusTable {
    let dmax = catalog.keys().max().copied().unwrap_or(-1);
    let mut table = CensusTable::empty(Method::Motif, lmin, lmax, dmax);
    table.entries.retain(|(d, _), _| catalog.contains_key(d));
    for (&delta, motifs) in catalog {
        table.provenance.shards += motifs.len();
        for length in lmin..=lmax {
            let n = motif_count(motifs, length as i64);
            table.entries.insert((delta, length), n as u64);
        }
    }
    table
}

/// Motif-route table for `δ = −1..=dmax`, with motif lists cached on disk
/// when a directory is given.
pub fn motif_table_cached(dmax: i64, lmin: usize, lmax: usize, cache_dir: Option<&Path>) -> Result<CensusTable> {
    let mut catalog = BTreeMap::new();
    for delta in -1..=dmax {
        catalog.insert(delta, motifs_cached(cache_dir, delta)?);
    }
    let table = motif_table_from(&catalog, lmin, lmax);
    if let Some(dir) = cache_dir {
        let path = dir.join("census").join(format!("motif-{lmax}.csv"));
        write_atomic(&path, &export(&table, Format::Csv)?)?;
    }
    Ok(table)
}

/// The explicit binomial formulas for `δ ∈ {−1, 0, 1}`.
pub fn closed_form_eval(delta: i64, length: i64) -> Result<i64> {
    let c = binom_conv;
    let l = length;
    match delta {
        -1 => Ok(3 * c(l - 2, 1) + 3 * c(l - 1, 1) + 6 * c(l - 2, 2)),
        0 => Ok(8 * c(l - 4, 2) + 12 * c(l - 4, 1) + 6 * c(l - 4, 0) + c(l - 4, -1)),
        1 => Ok(3 * c(l - 5, -1)
            + 24 * c(l - 5, 0)
            + 54 * c(l - 5, 1)
            + 12 * c(l - 4, 1)
            + 36 * c(l - 5, 2)
            + 24 * c(l - 4, 2)),
        _ => Err(Error::UnsupportedDefect(delta)),
    }
}

/// Exact quadratic `a·L² + b·L + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadPoly {
    /// Coefficients of `L²`, `L`, `1`.
    pub coefficients: [Rational64; 3],
    pub delta: i64,
    pub valid_from: i64,
}

impl QuadPoly {
    pub fn eval(&self, length: i64) -> Rational64 {
        let l = Rational64::from_integer(length);
        let [a, b, c] = self.coefficients;
        (a * l + b) * l + c
    }

    pub fn leading(&self) -> Rational64 {
        self.coefficients[0]
    }
}

impl fmt::Display for QuadPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (coef, var) in self.coefficients.iter().zip(["L^2", "L", ""]) {
            if coef.is_zero() {
                continue;
            }
            let sign = if coef.is_negative() { "-" } else { "+" };
            if first {
                if coef.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = coef.abs();
            if !(mag == Rational64::from_integer(1) && !var.is_empty()) {
                write!(f, "{mag}")?;
            }
            f.write_str(var)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for QuadPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadPoly", 4)?;
        st.serialize_field("delta", &self.delta)?;
        st.serialize_field("valid_from", &self.valid_from)?;
        let coefs: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coefficients", &coefs)?;
        st.serialize_field("polynomial", &self.to_string())?;
        st.end()
    }
}

/// Quadratic through three points, by Lagrange interpolation.
fn interpolate(points: [(i64, i64); 3]) -> [Rational64; 3] {
    let mut out = [Rational64::zero(); 3];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        // Basis polynomial prod_{j != i} (L - xj) / (xi - xj).
        let others: Vec<i64> = points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.0).collect();
        let denom = (xi - others[0]) * (xi - others[1]);
        let scale = Rational64::new(yi, denom);
        out[0] += scale;
        out[1] -= scale * Rational64::from_integer(others[0] + others[1]);
        out[2] += scale * Rational64::from_integer(others[0] * others[1]);
    }
    out
}

/// Sum over motifs of the binomial term as a polynomial in `L`. Exact for
/// `L ≥ δ + 4`, where every term with positive rank has a nonnegative upper
/// argument and every rank-0 term vanishes.
pub fn symbolic_polynomial(motifs: &[MotifRecord]) -> Vec<Rational64> {
    let mut total = vec![Rational64::zero(); 4];
    for m in motifs.iter().filter(|m| m.rank > 0) {
        // C(L + s, k) with s = ρ − 1 − L(m), k = ρ − 1.
        let k = m.rank as i64 - 1;
        let s = k - m.length_l as i64;
        let mut poly = vec![Rational64::from_integer(1)];
        for i in 0..k {
            // Multiply by (L + s − i) / (i + 1).
            let c = Rational64::from_integer(s - i);
            let d = Rational64::from_integer(i + 1);
            let mut next = vec![Rational64::zero(); poly.len() + 1];
            for (p, &coef) in poly.iter().enumerate() {
                next[p + 1] += coef / d;
                next[p] += coef * c / d;
            }
            poly = next;
        }
        for (p, coef) in poly.into_iter().enumerate() {
            total[p] += coef;
        }
    }
    // Coefficients in ascending powers of L.
    total
}

/// The polynomial `p_δ` from a motif list, checked at `L = δ+4 ..= δ+10`
/// and against the symbolic route.
pub fn poly_from_motifs(delta: i64, motifs: &[MotifRecord]) -> Result<QuadPoly> {
    let start = delta + 4;
    let pts = [0, 1, 2].map(|k| (start + k, motif_count(motifs, start + k)));
    let poly = QuadPoly {
        coefficients: interpolate(pts),
        delta,
        valid_from: start,
    };
    for length in start..=delta + 10 {
        if poly.eval(length) != Rational64::from_integer(motif_count(motifs, length)) {
            return Err(Error::PolynomialMismatch { delta, length });
        }
    }
    let symbolic = symbolic_polynomial(motifs);
    let expected = [symbolic[2], symbolic[1], symbolic[0]];
    if !symbolic[3].is_zero() || expected != poly.coefficients {
        return Err(Error::PolynomialMismatch {
            delta,
            length: start,
        });
    }
    Ok(poly)
}

pub fn poly_extract(delta: i64) -> Result<QuadPoly> {
    poly_from_motifs(delta, &crate::motif::enumerate_motifs(delta))
}

pub fn export(table: &CensusTable, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::from("delta,L,count,method\n");
            for ((d, l), c) in &table.entries {
                let _ = writeln!(out, "{d},{l},{c},{}", table.method);
            }
            Ok(out)
        }
        Format::Json => {
            let doc = JsonTable {
                method: table.method,
                lmin: table.lmin,
                lmax: table.lmax,
                dmax: table.dmax,
                complete_rows: &table.complete_rows,
                provenance: &table.provenance,
                entries: table
                    .entries
                    .iter()
                    .map(|(&(delta, length), &count)| JsonEntry { delta, length, count })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Markdown => {
            let deltas = table.deltas();
            let lengths: BTreeSet<usize> = table.entries.keys().map(|k| k.1).collect();
            let mut out = String::from("| L |");
            for d in &deltas {
                let _ = write!(out, " δ={d} |");
            }
            out.push_str("\n|---|");
            for _ in &deltas {
                out.push_str("---:|");
            }
            out.push('\n');
            for l in lengths {
                let _ = write!(out, "| {l} |");
                for &d in &deltas {
                    match table.get(d, l) {
                        Some(c) => {
                            let _ = write!(out, " {c} |");
                        }
                        None => out.push_str("  |"),
                    }
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}
