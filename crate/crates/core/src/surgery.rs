//! Runs of a cyclic word and the two elementary surgeries on them.
//!
//! A run of type `xy` is a maximal cyclic block containing no `z`, of length
//! at least 2 (and likewise for `yz` and `zx`). Expansion inserts a copy of
//! the run's first two letters; contraction deletes them. Both keep the parity
//! of every other letter's position, so the result is again a word of `G` and
//! the operation does not depend on which end of the run it is applied to.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::class::{canonical_class, is_primitive, CurveClass};
use crate::error::{Error, Result};
use crate::intersection::{class_intersection, self_intersection};
use crate::word::{Letter, ReflectionWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunType {
    XY,
    YZ,
    ZX,
}

impl RunType {
    pub const ALL: [RunType; 3] = [RunType::XY, RunType::YZ, RunType::ZX];

    /// The letter a run of this type never contains.
    pub fn missing(self) -> Letter {
        match self {
            RunType::XY => Letter::Z,
            RunType::YZ => Letter::X,
            RunType::ZX => Letter::Y,
        }
    }

    pub fn omitting(letter: Letter) -> RunType {
        match letter {
            Letter::Z => RunType::XY,
            Letter::X => RunType::YZ,
            Letter::Y => RunType::ZX,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RunType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunType::XY => "xy",
            RunType::YZ => "yz",
            RunType::ZX => "zx",
        })
    }
}

impl FromStr for RunType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xy" | "yx" => Ok(RunType::XY),
            "yz" | "zy" => Ok(RunType::YZ),
            "zx" | "xz" => Ok(RunType::ZX),
            _ => Err(Error::NotARun(s.to_string())),
        }
    }
}

/// A run located in a specific cyclic word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Run {
    pub run_type: RunType,
    pub start: usize,
    pub length: usize,
}

impl Run {
    /// The letters of the run read from its start.
    pub fn letters(&self, w: &[Letter]) -> Vec<Letter> {
        let n = w.len();
        (0..self.length).map(|k| w[(self.start + k) % n]).collect()
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}+{}", self.run_type, self.start, self.length)
    }
}

/// All runs of a cyclically reduced word containing all three letters,
/// ordered by type and then start.
pub fn runs_of(w: &[Letter]) -> Vec<Run> {
    let n = w.len();
    let mut out = Vec::new();
    for run_type in RunType::ALL {
        let missing = run_type.missing();
        let marks: Vec<usize> = (0..n).filter(|&i| w[i] == missing).collect();
        if marks.is_empty() {
            continue;
        }
        for (k, &p) in marks.iter().enumerate() {
            let q = if k + 1 < marks.len() {
                marks[k + 1]
            } else {
                marks[0] + n
            };
            let length = q - p - 1;
            if length >= 2 {
                out.push(Run {
                    run_type,
                    start: (p + 1) % n,
                    length,
                });
            }
        }
    }
    out.sort();
    out
}

pub fn runs(class: &CurveClass) -> Vec<Run> {
    runs_of(class.letters())
}

fn check_run(w: &[Letter], run: &Run) -> Result<()> {
    if runs_of(w).contains(run) {
        Ok(())
    } else {
        Err(Error::NotARun(run.to_string()))
    }
}

/// Inserts a copy of the run's first two letters in front of it.
pub(crate) fn expand_letters(w: &[Letter], run: &Run) -> Vec<Letter> {
    let n = w.len();
    let (s, t) = (w[run.start], w[(run.start + 1) % n]);
    let mut out = Vec::with_capacity(n + 2);
    out.extend_from_slice(&w[..run.start]);
    out.push(s);
    out.push(t);
    out.extend_from_slice(&w[run.start..]);
    out
}

/// Deletes the run's first two letters.
pub(crate) fn contract_letters(w: &[Letter], run: &Run) -> Vec<Letter> {
    let n = w.len();
    if run.start + 1 < n {
        let mut out = Vec::with_capacity(n - 2);
        out.extend_from_slice(&w[..run.start]);
        out.extend_from_slice(&w[run.start + 2..]);
        out
    } else {
        // The deleted pair straddles the end of the word; start the result at
        // an even position so the pairing into letters of G is kept.
        let mut out = w[2..n - 1].to_vec();
        out.push(w[1]);
        out
    }
}

/// `w⁺[r]` as a word.
pub fn expand(class: &CurveClass, run: &Run) -> Result<ReflectionWord> {
    check_run(class.letters(), run)?;
    Ok(ReflectionWord::new(expand_letters(class.letters(), run)))
}

/// `w⁺[r]` as a class; fails if the expanded word is a proper power.
pub fn expand_class(class: &CurveClass, run: &Run) -> Result<CurveClass> {
    canonical_class(&expand(class, run)?)
}

/// `w⁻[r]`; may be imprimitive or peripheral.
pub fn contract(class: &CurveClass, run: &Run) -> Result<ReflectionWord> {
    if run.length < 3 {
        return Err(Error::RunTooShort(run.length));
    }
    check_run(class.letters(), run)?;
    Ok(ReflectionWord::new(contract_letters(class.letters(), run)))
}

/// Runs strictly longer than every other run of their type.
pub fn distinguished_among(all: &[Run]) -> Vec<Run> {
    let mut out = Vec::new();
    for t in RunType::ALL {
        let mut best: Option<Run> = None;
        let mut tie = false;
        for r in all.iter().filter(|r| r.run_type == t) {
            match best {
                None => best = Some(*r),
                Some(b) if r.length > b.length => {
                    best = Some(*r);
                    tie = false;
                }
                Some(b) if r.length == b.length => tie = true,
                _ => {}
            }
        }
        if let (Some(b), false) = (best, tie) {
            out.push(b);
        }
    }
    out
}

pub fn distinguished_runs(class: &CurveClass) -> Vec<Run> {
    distinguished_among(&runs(class))
}

pub fn rank(class: &CurveClass) -> usize {
    distinguished_runs(class).len()
}

/// True when contracting `run` lowers `I` by exactly one.
pub fn is_exceptional(class: &CurveClass, run: &Run) -> Result<bool> {
    let shorter = contract(class, run)?;
    let before = class_intersection(class);
    Ok(self_intersection(&shorter)? + 1 == before)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurgeryRule {
    /// At most one exceptional run of each type.
    OneExceptionalPerType,
    /// A contraction drops `I` by one at a longest run, or by at least three.
    ContractionDrop,
    /// A run of length at least 4 that is longer than every same-type run by
    /// more than two is exceptional.
    LongRunExceptional,
    /// Expanding a distinguished run raises `I` by one.
    DistinguishedExpansion,
    /// Expanding a distinguished run keeps the defect.
    DefectPreserved,
    /// A primitive contraction changes the parity of `I`.
    ContractionParity,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurgeryViolation {
    pub class: CurveClass,
    pub run: Option<Run>,
    pub rule: SurgeryRule,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SurgeryReport {
    pub classes: usize,
    pub contractions: usize,
    pub expansions: usize,
    pub parity_checks: usize,
    pub violations: Vec<SurgeryViolation>,
}

impl SurgeryReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(mut self, other: SurgeryReport) -> SurgeryReport {
        self.classes += other.classes;
        self.contractions += other.contractions;
        self.expansions += other.expansions;
        self.parity_checks += other.parity_checks;
        self.violations.extend(other.violations);
        self
    }
}

/// Checks the surgery laws on a single class.
pub fn check_class(class: &CurveClass) -> SurgeryReport {
    let w = class.letters();
    let i0 = class_intersection(class) as i64;
    let all = runs_of(w);
    let distinguished = distinguished_among(&all);
    let mut report = SurgeryReport {
        classes: 1,
        ..Default::default()
    };
    let fail = |report: &mut SurgeryReport, run: Option<Run>, rule, detail: String| {
        report.violations.push(SurgeryViolation {
            class: class.clone(),
            run,
            rule,
            detail,
        });
    };

    let mut exceptional = [0usize; 3];
    for r in all.iter().filter(|r| r.length >= 3) {
        report.contractions += 1;
        let shorter = ReflectionWord::new(contract_letters(w, r));
        let i1 = self_intersection(&shorter).expect("contraction is cyclically reduced") as i64;
        let others = all
            .iter()
            .filter(|s| s.run_type == r.run_type && **s != *r)
            .map(|s| s.length);
        let longest = others.clone().all(|l| r.length >= l);
        let far_longest = others.clone().all(|l| r.length > l + 2);
        if i1 == i0 - 1 {
            exceptional[r.run_type.index()] += 1;
            if !longest {
                fail(
                    &mut report,
                    Some(*r),
                    SurgeryRule::ContractionDrop,
                    format!("exceptional but shorter than another run; I {i0} -> {i1}"),
                );
            }
        } else if i1 > i0 - 3 {
            fail(
                &mut report,
                Some(*r),
                SurgeryRule::ContractionDrop,
                format!("I {i0} -> {i1}"),
            );
        }
        // With length 3 the contracted run disappears and may merge its
        // neighbours, so the comparison only makes sense from length 4 on.
        if r.length >= 4 && far_longest && i1 != i0 - 1 {
            fail(
                &mut report,
                Some(*r),
                SurgeryRule::LongRunExceptional,
                format!("I {i0} -> {i1}"),
            );
        }
        if shorter.ell() >= 4 && is_primitive(&shorter) {
            report.parity_checks += 1;
            if (i0 - 1 - i1).rem_euclid(2) != 0 {
                fail(
                    &mut report,
                    Some(*r),
                    SurgeryRule::ContractionParity,
                    format!("I {i0} -> {i1}"),
                );
            }
        }
    }
    for t in RunType::ALL {
        if exceptional[t.index()] > 1 {
            fail(
                &mut report,
                None,
                SurgeryRule::OneExceptionalPerType,
                format!("{} exceptional runs of type {t}", exceptional[t.index()]),
            );
        }
    }

    for r in &distinguished {
        report.expansions += 1;
        let longer = ReflectionWord::new(expand_letters(w, r));
        let i1 = self_intersection(&longer).expect("expansion is cyclically reduced") as i64;
        if i1 != i0 + 1 {
            fail(
                &mut report,
                Some(*r),
                SurgeryRule::DistinguishedExpansion,
                format!("I {i0} -> {i1}"),
            );
        }
        let (l0, l1) = (w.len() as i64 / 2, longer.ell() as i64 / 2);
        if i1 - l1 != i0 - l0 {
            fail(
                &mut report,
                Some(*r),
                SurgeryRule::DefectPreserved,
                format!("defect {} -> {}", i0 - l0, i1 - l1),
            );
        }
    }
    report
}

/// Runs every surgery law over a sample of classes in parallel.
pub fn verify_surgery(sample: &[CurveClass]) -> SurgeryReport {
    sample
        .par_iter()
        .map(check_class)
        .reduce(SurgeryReport::default, SurgeryReport::merge)
}
