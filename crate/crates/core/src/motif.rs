//! Motifs, their descendants, and per-defect motif catalogs.
//!
//! A class is a motif when each run of length at least 4 has a run of the
//! same type that is at most 2 shorter. Every class reduces to a unique motif
//! by contracting runs that are too long, and the classes over a motif of
//! rank `ρ` are counted by a single binomial coefficient.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::chord::is_thin_word;
use crate::class::{canonical_class, par_map_classes, CurveClass};
use crate::error::{Error, Result};
use crate::intersection::{class_intersection, primitive_intersection, Defects};
use crate::surgery::{contract_letters, distinguished_among, runs_of, Run};
use crate::word::{Letter, ReflectionWord};

/// A motif together with its invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MotifRecord {
    pub cls: CurveClass,
    pub intersection: u64,
    pub defect: i64,
    pub rank: usize,
    pub length_l: usize,
    pub distinguished: Vec<Run>,
}

impl MotifRecord {
    /// Builds the record of a class, which must be a motif.
    pub fn of_class(cls: CurveClass) -> MotifRecord {
        let runs = runs_of(cls.letters());
        let distinguished = distinguished_among(&runs);
        let intersection = class_intersection(&cls);
        let length_l = cls.length_l();
        MotifRecord {
            intersection,
            defect: intersection as i64 - length_l as i64,
            rank: distinguished.len(),
            length_l,
            distinguished,
            cls,
        }
    }

    fn of_letters(w: &[Letter]) -> MotifRecord {
        Self::of_class(CurveClass::from_canonical_unchecked(w.to_vec()))
    }

    /// `Δ = I − 2L`.
    pub fn big_delta(&self) -> i64 {
        Defects::new(self.intersection, self.length_l).big_delta
    }

    pub fn is_thin(&self) -> bool {
        is_thin_letters(self.cls.letters())
    }
}

/// No run of length 4 or more.
pub fn is_thin_letters(w: &[Letter]) -> bool {
    runs_of(w).iter().all(|r| r.length <= 3)
}

pub fn is_motif_letters(w: &[Letter]) -> bool {
    let runs = runs_of(w);
    runs.iter().filter(|r| r.length >= 4).all(|r| {
        runs.iter()
            .any(|s| s != r && s.run_type == r.run_type && r.length <= s.length + 2)
    })
}

pub fn is_motif(class: &CurveClass) -> bool {
    is_motif_letters(class.letters())
}

/// A run of length at least 4 exceeding every other run of its type by more
/// than 2.
fn is_overlong(r: &Run, runs: &[Run]) -> bool {
    r.length >= 4
        && runs
            .iter()
            .filter(|s| *s != r && s.run_type == r.run_type)
            .all(|s| r.length > s.length + 2)
}

/// Contracts overlong runs, visiting types in `order`, until a motif
/// remains.
pub fn motif_of_with_order(v: &CurveClass, order: &[usize; 3]) -> CurveClass {
    let mut w = v.letters().to_vec();
    loop {
        let runs = runs_of(&w);
        let next = order.iter().find_map(|&t| {
            runs.iter()
                .find(|r| r.run_type.index() == t && is_overlong(r, &runs))
                .copied()
        });
        let Some(r) = next else { break };
        w = contract_letters(&w, &r);
    }
    canonical_class(&ReflectionWord::new(w))
        .expect("contracting an overlong run stays within primitive classes")
}

/// The unique motif whose descendants contain `v`.
pub fn motif_of(v: &CurveClass) -> MotifRecord {
    MotifRecord::of_class(motif_of_with_order(v, &[0, 1, 2]))
}

/// Binomial coefficient with `C(n, k) = 0` when `n` or `k` is negative,
/// except `C(−1, −1) = 1`.
pub fn binom_conv(n: i64, k: i64) -> i64 {
    if n == -1 && k == -1 {
        return 1;
    }
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc as i64
}

/// Descendants of a motif of length `motif_length` and rank `rank` that have
/// length `length`.
pub fn descendants(motif_length: usize, rank: usize, length: i64) -> i64 {
    let (lm, r) = (motif_length as i64, rank as i64);
    binom_conv(length - lm + r - 1, r - 1)
}

pub fn descendant_count(m: &MotifRecord, length: i64) -> i64 {
    descendants(m.length_l, m.rank, length)
}

/// Largest possible motif length for a defect (motifs satisfy
/// `δ + ρ + 3 ≥ L` with `ρ ≤ 3`).
pub fn max_motif_length(delta: i64) -> usize {
    (delta + 6).max(0) as usize
}

/// All motifs with defect at most `max_delta`, grouped by defect. One pass
/// over the classes of each length up to `max_delta + 6`.
pub fn motif_catalog(max_delta: i64) -> BTreeMap<i64, Vec<MotifRecord>> {
    let mut out: BTreeMap<i64, Vec<MotifRecord>> = (-1..=max_delta).map(|d| (d, Vec::new())).collect();
    for length in 2..=max_motif_length(max_delta) {
        let found = par_map_classes(length, |w| {
            if !is_motif_letters(w) {
                return None;
            }
            let delta = primitive_intersection(w) as i64 - length as i64;
            (delta <= max_delta).then(|| MotifRecord::of_letters(w))
        });
        for m in found.into_iter().flatten() {
            out.entry(m.defect).or_default().push(m);
        }
    }
    out
}

/// Motifs with defect exactly `delta`, ordered by length then word.
pub fn enumerate_motifs(delta: i64) -> Vec<MotifRecord> {
    if delta < -1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for length in 2..=max_motif_length(delta) {
        let found = par_map_classes(length, |w| {
            (is_motif_letters(w) && primitive_intersection(w) as i64 - length as i64 == delta)
                .then(|| MotifRecord::of_letters(w))
        });
        out.extend(found.into_iter().flatten());
    }
    out
}

/// Motifs of every defect with length at most `max_length`.
pub fn motifs_up_to_length(max_length: usize) -> Vec<MotifRecord> {
    let mut out = Vec::new();
    for length in 2..=max_length {
        let found = par_map_classes(length, |w| is_motif_letters(w).then(|| MotifRecord::of_letters(w)));
        out.extend(found.into_iter().flatten());
    }
    out
}

/// Counts of motifs by `(rank, length)`.
pub fn rank_length_profile(motifs: &[MotifRecord]) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for m in motifs {
        *out.entry((m.rank, m.length_l)).or_insert(0) += 1;
    }
    out
}

fn cache_path(dir: &Path, delta: i64) -> PathBuf {
    dir.join("motifs").join(format!("delta={delta}.txt"))
}

/// Writes `word,L,delta,rho` lines.
pub fn save_motifs(dir: &Path, delta: i64, motifs: &[MotifRecord]) -> Result<PathBuf> {
    let path = cache_path(dir, delta);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    for m in motifs {
        writeln!(f, "{},{},{},{}", m.cls, m.length_l, m.defect, m.rank)?;
    }
    f.sync_all()?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Reads a cached motif list, recomputing and checking every field.
pub fn load_motifs(dir: &Path, delta: i64) -> Result<Option<Vec<MotifRecord>>> {
    let path = cache_path(dir, delta);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let bad = || Error::BadRecord(line.to_string());
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad());
        }
        let word: ReflectionWord = fields[0].parse().map_err(|_| bad())?;
        let cls = canonical_class(&word).map_err(|_| bad())?;
        let m = MotifRecord::of_class(cls);
        let expect = (
            fields[1].parse::<usize>().map_err(|_| bad())?,
            fields[2].parse::<i64>().map_err(|_| bad())?,
            fields[3].parse::<usize>().map_err(|_| bad())?,
        );
        if m.cls.to_string() != fields[0]
            || (m.length_l, m.defect, m.rank) != expect
            || m.defect != delta
            || !is_motif(&m.cls)
        {
            return Err(bad());
        }
        out.push(m);
    }
    Ok(Some(out))
}

/// Motifs for `delta`, read from or written to `cache_dir` when given.
pub fn motifs_cached(cache_dir: Option<&Path>, delta: i64) -> Result<Vec<MotifRecord>> {
    if let Some(dir) = cache_dir {
        if let Some(found) = load_motifs(dir, delta)? {
            return Ok(found);
        }
        let motifs = enumerate_motifs(delta);
        save_motifs(dir, delta, &motifs)?;
        return Ok(motifs);
    }
    Ok(enumerate_motifs(delta))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundViolation {
    pub word: String,
    pub rule: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MotifBoundsReport {
    /// Motifs checked against `δ + ρ + 3 ≥ L`.
    pub rank_bound_checked: usize,
    /// Motifs with `L ≤ 8` checked against `Δ + ρ ≥ −3`.
    pub short_motifs: usize,
    /// Thin motifs with `6 ≤ L ≤ 9` checked against `Δ ≥ −3`.
    pub thin_motifs_6_to_9: usize,
    /// Thin motifs with `L ≤ 9` checked against `I ≥ L²/6`.
    pub thin_motifs_quadratic: usize,
    /// Smallest `Δ` among thin motifs with `L ≤ 5`, and a word attaining it.
    pub short_thin_min: Option<(i64, String)>,
    pub violations: Vec<BoundViolation>,
}

impl MotifBoundsReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the motif length bounds for all defects up to `max_delta` and the
/// base cases over all short motifs.
pub fn verify_motif_bounds(max_delta: i64) -> MotifBoundsReport {
    let mut report = MotifBoundsReport::default();
    let fail = |word: &CurveClass, rule: &'static str, detail: String| BoundViolation {
        word: word.to_string(),
        rule,
        detail,
    };
    let mut violations = Vec::new();
    for (_, motifs) in motif_catalog(max_delta) {
        for m in motifs {
            report.rank_bound_checked += 1;
            if m.defect + m.rank as i64 + 3 < m.length_l as i64 {
                violations.push(fail(&m.cls, "rank-length", format!("δ={} ρ={} L={}", m.defect, m.rank, m.length_l)));
            }
        }
    }
    for m in motifs_up_to_length(9) {
        let (l, d, r) = (m.length_l as i64, m.big_delta(), m.rank as i64);
        if l <= 8 {
            report.short_motifs += 1;
            if d + r < -3 {
                violations.push(fail(&m.cls, "short-motif", format!("Δ={d} ρ={r}")));
            }
        }
        if m.is_thin() {
            report.thin_motifs_quadratic += 1;
            if 6 * m.intersection < (l * l) as u64 {
                violations.push(fail(&m.cls, "thin-quadratic", format!("I={} L={l}", m.intersection)));
            }
            if l >= 6 {
                report.thin_motifs_6_to_9 += 1;
                if d < -3 {
                    violations.push(fail(&m.cls, "thin-delta", format!("Δ={d} L={l}")));
                }
            } else if report.short_thin_min.as_ref().is_none_or(|(best, _)| d < *best) {
                report.short_thin_min = Some((d, m.cls.to_string()));
            }
        }
    }
    let sharp: ReflectionWord = "xyzxyz".parse().expect("literal");
    let sharp = MotifRecord::of_class(canonical_class(&sharp).expect("literal"));
    if !(sharp.defect == 0 && sharp.rank == 0 && sharp.length_l == 3 && is_motif(&sharp.cls)) {
        violations.push(fail(&sharp.cls, "sharpness", format!("{sharp:?}")));
    }
    report.violations = violations;
    report
}

/// True when the class's abc spelling has no two equal consecutive letters.
pub fn is_abc_thin(class: &CurveClass) -> bool {
    is_thin_word(&class.group_word())
}

/// Partition check: motif_of is total and descendant counts reproduce the
/// brute tally for each `(δ, L)` with `L ≤ max_length`. Returns the
/// mismatches as `(δ, L, brute, formula)`.
pub fn partition_mismatches(max_length: usize) -> Vec<(i64, usize, i64, i64)> {
    let mut brute: BTreeMap<(i64, usize), i64> = BTreeMap::new();
    let mut motifs: BTreeMap<String, MotifRecord> = BTreeMap::new();
    for length in 2..=max_length {
        let rows = par_map_classes(length, |w| {
            let m = motif_of(&CurveClass::from_canonical_unchecked(w.to_vec()));
            (primitive_intersection(w) as i64 - length as i64, m)
        });
        for (delta, m) in rows {
            *brute.entry((delta, length)).or_default() += 1;
            motifs.entry(m.cls.to_string()).or_insert(m);
        }
    }
    let mut formula: BTreeMap<(i64, usize), i64> = BTreeMap::new();
    for m in motifs.values() {
        for length in 2..=max_length {
            let n = descendant_count(m, length as i64);
            if n != 0 {
                *formula.entry((m.defect, length)).or_default() += n;
            }
        }
    }
    let keys: std::collections::BTreeSet<_> = brute.keys().chain(formula.keys()).copied().collect();
    keys.into_par_iter()
        .filter_map(|k| {
            let (b, f) = (brute.get(&k).copied().unwrap_or(0), formula.get(&k).copied().unwrap_or(0));
            (b != f).then_some((k.0, k.1, b, f))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::{aut_orbit_partition, enumerate_classes, orbit_partition_under, LETTER_PERMUTATIONS};
    use crate::surgery::{distinguished_runs, expand_class};

    fn class(s: &str) -> CurveClass {
        canonical_class(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn predicate_examples() {
        assert!(is_motif(&class("xyzxyz")));
        assert!(!is_motif(&class("xyxyxyzxyz")));
        assert!(is_motif(&class("xyxzxyxzyz")));
        assert_eq!(motif_of(&class("xyxyxyzxyz")).cls, class("xyxyzxyz"));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom_conv(-1, -1), 1);
        assert_eq!(binom_conv(3, -1), 0);
        assert_eq!(binom_conv(4, 2), 6);
        assert_eq!(binom_conv(-2, 1), 0);
        assert_eq!(binom_conv(2, 5), 0);
        assert_eq!(descendants(6, 3, 8), 6);
        assert_eq!(descendants(3, 0, 3), 1);
        assert_eq!(descendants(3, 0, 4), 0);
        // Stars and bars: C(n, k) = sum over j of C(n - 1 - j, k - 1).
        for n in -1..12i64 {
            for k in -1..=n.max(0) {
                if n >= 0 && k >= 1 {
                    let s: i64 = (0..=n - k).map(|j| binom_conv(n - 1 - j, k - 1)).sum();
                    assert_eq!(binom_conv(n, k), s, "C({n},{k})");
                }
            }
        }
    }

    #[test]
    fn small_motif_counts() {
        assert_eq!(enumerate_motifs(-1).len(), 12);
        let zero = enumerate_motifs(0);
        assert_eq!(zero.len(), 27);
        let classes: Vec<CurveClass> = zero.iter().map(|m| m.cls.clone()).collect();
        let mut rows: Vec<(usize, usize, usize)> = aut_orbit_partition(&classes)
            .iter()
            .map(|o| {
                let m = MotifRecord::of_class(o.representative.clone());
                (m.rank, m.length_l, o.size())
            })
            .collect();
        rows.sort();
        assert_eq!(
            rows,
            vec![(0, 3, 1), (1, 4, 6), (2, 5, 6), (2, 5, 6), (3, 6, 2), (3, 6, 6)]
        );
        // Letter permutations alone split these further.
        let finer = orbit_partition_under(&classes, &LETTER_PERMUTATIONS);
        assert_eq!(finer.len(), 10);
    }

    #[test]
    fn motif_of_laws() {
        for l in 2..=7 {
            for c in enumerate_classes(l) {
                let m = motif_of(&c);
                assert!(is_motif(&m.cls));
                assert_eq!(motif_of(&m.cls).cls, m.cls);
                for order in [[1, 2, 0], [2, 1, 0], [2, 0, 1]] {
                    assert_eq!(motif_of_with_order(&c, &order), m.cls);
                }
                if is_motif(&c) {
                    assert_eq!(m.cls, c);
                    for r in distinguished_runs(&c) {
                        let up = expand_class(&c, &r).unwrap();
                        assert_eq!(motif_of(&up).cls, c);
                    }
                }
            }
        }
    }

    #[test]
    fn partition_small() {
        assert!(partition_mismatches(7).is_empty());
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("ppants-motif-cache-{}", std::process::id()));
        let motifs = enumerate_motifs(0);
        save_motifs(&dir, 0, &motifs).unwrap();
        assert_eq!(load_motifs(&dir, 0).unwrap().unwrap(), motifs);
        assert_eq!(load_motifs(&dir, 7).unwrap(), None);
        fs::write(cache_path(&dir, 1), "xyzxyz,3,1,0\n").unwrap();
        assert!(matches!(load_motifs(&dir, 1), Err(Error::BadRecord(_))));
        fs::remove_dir_all(&dir).unwrap();
    }
}
