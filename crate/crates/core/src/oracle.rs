//! Self-intersection numbers from hyperbolic geometry, as an independent
//! check on the combinatorial count.
//!
//! The group acts on the upper half plane through integer matrices with
//! `a ↦ [[1,2],[0,1]]`, `b ↦ [[1,0],[-2,1]]` and `c ↦ (ab)⁻¹`, all parabolic.
//! A word `w` of length at least 2 acts hyperbolically and its axis has
//! endpoints in `Q(√D)` with `D = tr² − 4`. Every conjugate of `w` has the
//! same trace, so all endpoints that ever get compared live in the same
//! quadratic field and comparisons are exact.
//!
//! `I(w)` is half the number of double cosets `⟨w⟩ g ⟨w⟩` whose translated
//! axis `g·axis(w)` crosses `axis(w)`. Crossing axes of the Cayley tree share
//! an edge, hence a group vertex, so every crossing coset has a
//! representative `u·v⁻¹` with `u`, `v` vertices of the axis. Those are the
//! candidates; a full enumeration of a ball of group elements is also
//! available for short words.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::class::is_primitive;
use crate::error::{Error, Result};
use crate::word::{GroupLetter, GroupWord};

/// An integer 2×2 matrix `[[p, q], [r, s]]` of determinant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusMatrix {
    pub entries: [BigInt; 4],
}

impl MobiusMatrix {
    pub fn identity() -> Self {
        Self::from_i64([1, 0, 0, 1])
    }

    pub fn from_i64(e: [i64; 4]) -> Self {
        MobiusMatrix {
            entries: e.map(BigInt::from),
        }
    }

    pub fn trace(&self) -> BigInt {
        &self.entries[0] + &self.entries[3]
    }

    pub fn det(&self) -> BigInt {
        let [p, q, r, s] = &self.entries;
        p * s - q * r
    }

    pub fn mul(&self, other: &MobiusMatrix) -> MobiusMatrix {
        let [p, q, r, s] = &self.entries;
        let [p2, q2, r2, s2] = &other.entries;
        MobiusMatrix {
            entries: [p * p2 + q * r2, p * q2 + q * s2, r * p2 + s * r2, r * q2 + s * s2],
        }
    }

    /// `±` identity.
    pub fn is_central(&self) -> bool {
        let [p, q, r, s] = &self.entries;
        q.is_zero() && r.is_zero() && p == s && p.abs().is_one()
    }
}

pub fn generator_matrix(g: GroupLetter) -> MobiusMatrix {
    MobiusMatrix::from_i64(match g {
        GroupLetter::A => [1, 2, 0, 1],
        GroupLetter::B => [1, 0, -2, 1],
        GroupLetter::C => [1, -2, 2, -3],
        GroupLetter::AInv => [1, -2, 0, 1],
        GroupLetter::BInv => [1, 0, 2, 1],
        GroupLetter::CInv => [-3, 2, -2, 1],
    })
}

pub fn rep_matrix(w: &GroupWord) -> MobiusMatrix {
    w.letters()
        .iter()
        .fold(MobiusMatrix::identity(), |m, &g| m.mul(&generator_matrix(g)))
}

/// A point of `R ∪ {∞}`: either infinity or `(num + coef·√D) / den` with
/// `den > 0` and `D` fixed by context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BoundaryPoint {
    Infinity,
    Surd {
        #[serde(serialize_with = "big_str")]
        num: BigInt,
        #[serde(serialize_with = "big_str")]
        coef: BigInt,
        #[serde(serialize_with = "big_str")]
        den: BigInt,
    },
}

fn big_str<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl BoundaryPoint {
    fn surd(num: BigInt, coef: BigInt, den: BigInt) -> Self {
        if den.is_negative() {
            BoundaryPoint::Surd {
                num: -num,
                coef: -coef,
                den: -den,
            }
        } else {
            BoundaryPoint::Surd { num, coef, den }
        }
    }

    /// Approximate value, for display only.
    pub fn approx(&self, disc: &BigInt) -> f64 {
        match self {
            BoundaryPoint::Infinity => f64::INFINITY,
            BoundaryPoint::Surd { num, coef, den } => {
                let d = disc.to_f64().unwrap_or(f64::NAN).sqrt();
                (num.to_f64().unwrap_or(f64::NAN) + coef.to_f64().unwrap_or(f64::NAN) * d)
                    / den.to_f64().unwrap_or(f64::NAN)
            }
        }
    }
}

/// Sign of `x + y·√d` for `d > 0`.
fn sign_surd(x: &BigInt, y: &BigInt, d: &BigInt) -> Ordering {
    let zero = BigInt::zero();
    let sx = x.cmp(&zero);
    let sy = y.cmp(&zero);
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    // Opposite signs: the larger magnitude wins.
    match (x * x).cmp(&(y * y * d)) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Exact order on `R ∪ {∞}`, with infinity last.
pub fn compare_points(a: &BoundaryPoint, b: &BoundaryPoint, disc: &BigInt) -> Ordering {
    use BoundaryPoint::*;
    match (a, b) {
        (Infinity, Infinity) => Ordering::Equal,
        (Infinity, _) => Ordering::Greater,
        (_, Infinity) => Ordering::Less,
        (
            Surd {
                num: n1,
                coef: c1,
                den: d1,
            },
            Surd {
                num: n2,
                coef: c2,
                den: d2,
            },
        ) => sign_surd(&(n1 * d2 - n2 * d1), &(c1 * d2 - c2 * d1), disc),
    }
}

/// The two fixed points of a hyperbolic matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxisEndpoints {
    #[serde(serialize_with = "big_str")]
    pub disc: BigInt,
    pub points: [BoundaryPoint; 2],
}

pub fn axis_endpoints(m: &MobiusMatrix) -> Result<AxisEndpoints> {
    let t = m.trace();
    if t.abs() <= BigInt::from(2) {
        return Err(Error::NotHyperbolic(t.to_i64().unwrap_or(0)));
    }
    let disc = &t * &t - 4;
    let [p, q, r, s] = &m.entries;
    // Fixed points solve r z² + (s − p) z − q = 0.
    let points = if r.is_zero() {
        [
            BoundaryPoint::surd(q.clone(), BigInt::zero(), s - p),
            BoundaryPoint::Infinity,
        ]
    } else {
        [
            BoundaryPoint::surd(p - s, BigInt::from(-1), 2 * r),
            BoundaryPoint::surd(p - s, BigInt::one(), 2 * r),
        ]
    };
    Ok(AxisEndpoints { disc, points })
}

/// True when the endpoint pairs interleave on the circle. Pairs sharing a
/// point are not linked.
pub fn linked_pairs(p: &AxisEndpoints, q: &AxisEndpoints) -> bool {
    let d = &p.disc;
    let cmp = |a: &BoundaryPoint, b: &BoundaryPoint| compare_points(a, b, d);
    let (lo, hi) = match cmp(&p.points[0], &p.points[1]) {
        Ordering::Less => (&p.points[0], &p.points[1]),
        Ordering::Greater => (&p.points[1], &p.points[0]),
        Ordering::Equal => return false,
    };
    let mut inside = 0;
    for x in &q.points {
        let (a, b) = (cmp(x, lo), cmp(x, hi));
        if a == Ordering::Equal || b == Ordering::Equal {
            return false;
        }
        if a == Ordering::Greater && b == Ordering::Less {
            inside += 1;
        }
    }
    inside == 1
}

/// Smallest element (length, then letters) of `w^i g w^j` over
/// `|i|, |j| ≤ window`.
fn coset_key(w: &GroupWord, g: &GroupWord, window: i64) -> GroupWord {
    let powers: Vec<GroupWord> = (-window..=window).map(|k| w.pow(k)).collect();
    let mut best: Option<GroupWord> = None;
    for left in &powers {
        let lg = left.mul(g);
        for right in &powers {
            let cand = lg.mul(right);
            let better = match &best {
                None => true,
                Some(b) => (cand.len(), cand.letters()) < (b.len(), b.letters()),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

fn window_for(w: &GroupWord, g: &GroupWord, extra: i64) -> i64 {
    let n = w.len().max(1) as i64;
    2 * ((g.len() as i64 + n - 1) / n) + 2 + extra
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub word: String,
    pub intersection: u64,
    /// Number of linked double cosets (twice the intersection number).
    pub linked_cosets: u64,
    /// Radius at which the count was first seen stable.
    pub radius: usize,
    /// Distinct nontrivial double cosets examined.
    pub cosets: usize,
}

fn check_input(w: &GroupWord) -> Result<()> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced);
    }
    if !is_primitive(&w.to_reflection_word()) {
        return Err(Error::Imprimitive);
    }
    Ok(())
}

/// Linked cosets among the given keys, as `(key length, linked)`.
fn classify(w: &GroupWord, axis: &AxisEndpoints, keys: &BTreeSet<(usize, GroupWord)>) -> Result<Vec<(usize, bool)>> {
    let keys: Vec<_> = keys.iter().collect();
    keys.par_iter()
        .map(|(len, g)| {
            let conj = g.mul(w).mul(&g.inverse());
            let other = axis_endpoints(&rep_matrix(&conj))?;
            Ok((*len, linked_pairs(axis, &other)))
        })
        .collect()
}

/// Largest radius tried before giving up on stability.
pub fn radius_cap(w: &GroupWord) -> usize {
    8 * w.len() + 32
}

/// `I(w)` as half the number of crossing double cosets whose shortest
/// representative has length at most the radius. The radius starts at
/// `radius` and doubles until the count agrees with the count at radius + 2.
pub fn intersection_via_cosets(w: &GroupWord, radius: usize) -> Result<OracleReport> {
    check_input(w)?;
    let axis = axis_endpoints(&rep_matrix(w))?;
    let n = w.len();
    let prefixes: Vec<GroupWord> = (0..n).map(|k| GroupWord::new(w.letters()[..k].to_vec())).collect();
    let mut keys = BTreeSet::new();
    for u in &prefixes {
        for v in &prefixes {
            let g = u.mul(&v.inverse());
            let key = coset_key(w, &g, window_for(w, &g, 0));
            if !key.is_empty() {
                keys.insert((key.len(), key));
            }
        }
    }
    let verdicts = classify(w, &axis, &keys)?;
    let count = |r: usize| verdicts.iter().filter(|(len, linked)| *linked && *len <= r).count() as u64;
    let mut r = radius.max(1);
    let cap = radius_cap(w).max(r);
    loop {
        let (now, next) = (count(r), count(r + 2));
        if now == next {
            if now % 2 != 0 {
                return Err(Error::OddCosetCount(now));
            }
            return Ok(OracleReport {
                word: w.to_string(),
                intersection: now / 2,
                linked_cosets: now,
                radius: r,
                cosets: keys.len(),
            });
        }
        if r >= cap {
            return Err(Error::Unstable(r));
        }
        r = (2 * r).min(cap);
    }
}

/// Default starting radius, `2L + 4`.
pub fn default_radius(w: &GroupWord) -> usize {
    2 * w.len() + 4
}

/// Largest radius accepted by [`intersection_via_ball`].
pub const BALL_RADIUS_CAP: usize = 9;

/// All reduced words of length at most `radius`.
pub fn ball(radius: usize) -> Vec<GroupWord> {
    let mut out = vec![GroupWord::default()];
    let mut frontier = vec![GroupWord::default()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for l in GroupLetter::ALL {
                let mut letters = g.letters().to_vec();
                letters.push(l);
                let cand = GroupWord::new(letters);
                if cand.is_reduced() {
                    next.push(cand);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `I(w)` by testing every element of the ball of the given radius, with no
/// assumption about where crossing cosets live.
pub fn intersection_via_ball(w: &GroupWord, radius: usize) -> Result<u64> {
    check_input(w)?;
    if radius > BALL_RADIUS_CAP {
        return Err(Error::LimitExceeded {
            what: "ball radius",
            requested: radius,
            cap: BALL_RADIUS_CAP,
        });
    }
    let axis = axis_endpoints(&rep_matrix(w))?;
    let mut linked = BTreeSet::new();
    for g in ball(radius) {
        let conj = g.mul(w).mul(&g.inverse());
        if conj == *w {
            continue;
        }
        let other = axis_endpoints(&rep_matrix(&conj))?;
        if linked_pairs(&axis, &other) {
            linked.insert(coset_key(w, &g, window_for(w, &g, 0)));
        }
    }
    let count = linked.len() as u64;
    if !count.is_multiple_of(2) {
        return Err(Error::OddCosetCount(count));
    }
    Ok(count / 2)
}

/// Recomputes the candidate keys with a wider window and reports whether the
/// number of distinct cosets is unchanged.
pub fn window_is_stable(w: &GroupWord) -> bool {
    let n = w.len();
    let prefixes: Vec<GroupWord> = (0..n).map(|k| GroupWord::new(w.letters()[..k].to_vec())).collect();
    let keys = |extra: i64| -> BTreeSet<GroupWord> {
        let mut out = BTreeSet::new();
        for u in &prefixes {
            for v in &prefixes {
                let g = u.mul(&v.inverse());
                out.insert(coset_key(w, &g, window_for(w, &g, extra)));
            }
        }
        out
    };
    keys(0) == keys(3)
}
