//! Equivalence classes of closed curves: primitive, cyclically reduced words
//! of length at least 4, modulo even rotation and inversion.
//!
//! The canonical representative is the smallest word (length first, then
//! lexicographic with `x < y < z`) among all even rotations of the word and
//! of its reversal. Every class contains all three letters, and some even
//! rotation of the word or its reversal starts with `x`, so canonical words
//! always begin with `x`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{GroupWord, Letter, ReflectionWord};

/// Canonical representative of a curve class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveClass {
    canon: ReflectionWord,
}

impl CurveClass {
    pub fn canon(&self) -> &ReflectionWord {
        &self.canon
    }

    pub fn letters(&self) -> &[Letter] {
        self.canon.letters()
    }

    /// Combinatorial length `L`.
    pub fn length_l(&self) -> usize {
        self.canon.ell() / 2
    }

    /// Always true; imprimitive words never form a class.
    pub fn primitive(&self) -> bool {
        true
    }

    pub fn group_word(&self) -> GroupWord {
        self.canon
            .to_group_word()
            .expect("canonical words are reduced and even")
    }

    /// Wraps letters already known to be canonical.
    pub(crate) fn from_canonical_unchecked(letters: Vec<Letter>) -> Self {
        CurveClass {
            canon: ReflectionWord::new(letters),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.canon.fmt(f)
    }
}

impl Serialize for CurveClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.canon.to_string())
    }
}

impl<'de> Deserialize<'de> for CurveClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let w: ReflectionWord = s.parse().map_err(serde::de::Error::custom)?;
        canonical_class(&w).map_err(serde::de::Error::custom)
    }
}

/// Compares the cyclic sequence read from `start` (forwards or backwards)
/// against `w` itself.
#[inline]
fn cmp_rotation(w: &[Letter], start: usize, reversed: bool) -> Ordering {
    let n = w.len();
    for (k, &reference) in w.iter().enumerate() {
        let letter = if reversed {
            w[(start + n - k) % n]
        } else {
            w[(start + k) % n]
        };
        match letter.cmp(&reference) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// True when `w` is the canonical representative of its class and primitive.
/// Assumes `w` is cyclically reduced of even length.
pub(crate) fn is_canonical_primitive(w: &[Letter]) -> bool {
    let n = w.len();
    // Even rotations of w: a tie with a proper rotation is an even period.
    for s in (2..n).step_by(2) {
        if cmp_rotation(w, s, false) != Ordering::Greater {
            return false;
        }
    }
    // Even rotations of the reversal: reading backwards from an odd position
    // of w gives a word starting at an even position of reverse(w).
    for s in (1..n).step_by(2) {
        if cmp_rotation(w, s, true) == Ordering::Less {
            return false;
        }
    }
    true
}

/// Smallest even period of a cyclic word (the length itself when primitive).
pub fn minimal_even_period(w: &[Letter]) -> usize {
    let n = w.len();
    for p in (2..n).step_by(2) {
        if n.is_multiple_of(p) && (0..n).all(|i| w[i] == w[(i + p) % n]) {
            return p;
        }
    }
    n
}

/// Whether a cyclically reduced even word is not a proper power in `G`.
/// Only even periods count: an odd period is a root in the reflection group
/// that does not lie in `G` (so `xyzxyz` is primitive).
pub fn is_primitive(w: &ReflectionWord) -> bool {
    minimal_even_period(w.letters()) == w.ell()
}

/// Splits an even cyclic word as `root^n` with `root` primitive in `G`.
pub fn primitive_root(w: &ReflectionWord) -> (ReflectionWord, usize) {
    let p = minimal_even_period(w.letters());
    if p == 0 {
        return (w.clone(), 1);
    }
    (ReflectionWord::new(w.letters()[..p].to_vec()), w.ell() / p)
}

/// Canonical representative of the class of `w`.
pub fn canonical_class(w: &ReflectionWord) -> Result<CurveClass> {
    if !w.in_g() {
        return Err(Error::OddLength(w.ell()));
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced);
    }
    if w.ell() < 4 {
        return Err(Error::TooShort(w.ell()));
    }
    if !is_primitive(w) {
        return Err(Error::Imprimitive);
    }
    Ok(CurveClass::from_canonical_unchecked(canonical_letters(
        w.letters(),
    )))
}

/// Minimum over even rotations and reversed even rotations, without any
/// validity checks.
pub(crate) fn canonical_letters(w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    let mut best: Option<Vec<Letter>> = None;
    let mut consider = |cand: Vec<Letter>| {
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    };
    for s in (0..n).step_by(2) {
        consider((0..n).map(|k| w[(s + k) % n]).collect());
    }
    for s in (1..n).step_by(2) {
        consider((0..n).map(|k| w[(s + n - k) % n]).collect());
    }
    best.unwrap_or_default()
}

/// Pruned depth-first generation of canonical words of a fixed length.
///
/// A letter is rejected as soon as some even rotation that started inside
/// the prefix is already lexicographically smaller than the prefix. Words
/// reaching full length get the complete canonicity and primitivity check.
struct Generator<'a, F: FnMut(&[Letter])> {
    len: usize,
    word: Vec<Letter>,
    emit: &'a mut F,
}

impl<F: FnMut(&[Letter])> Generator<'_, F> {
    /// Starts still tied with the prefix after the current word.
    fn active_starts(&self) -> Vec<usize> {
        let w = &self.word;
        let mut active = Vec::new();
        for s in (2..w.len()).step_by(2) {
            match w[s..].iter().cmp(w[..w.len() - s].iter()) {
                Ordering::Equal => active.push(s),
                Ordering::Greater => {}
                Ordering::Less => unreachable!("prefix was pruned"),
            }
        }
        active
    }

    fn run(&mut self, active: &mut [usize]) {
        let k = self.word.len();
        if k == self.len {
            if is_canonical_primitive(&self.word) {
                (self.emit)(&self.word);
            }
            return;
        }
        let prev = self.word[k - 1];
        'letters: for letter in Letter::ALL {
            if letter == prev || (k + 1 == self.len && letter == self.word[0]) {
                continue;
            }
            let mut next = Vec::with_capacity(active.len() + 1);
            for &s in active.iter() {
                match letter.cmp(&self.word[k - s]) {
                    Ordering::Less => continue 'letters,
                    Ordering::Equal => next.push(s),
                    Ordering::Greater => {}
                }
            }
            if k.is_multiple_of(2) && letter == self.word[0] {
                next.push(k);
            }
            self.word.push(letter);
            self.run(&mut next);
            self.word.pop();
        }
    }
}

/// Calls `emit` on every canonical word of combinatorial length `length`
/// that extends `prefix`, in lexicographic order.
pub fn for_each_class_with_prefix<F: FnMut(&[Letter])>(length: usize, prefix: &[Letter], mut emit: F) {
    let len = 2 * length;
    if length < 2 || prefix.len() > len || prefix.first().is_some_and(|&l| l != Letter::X) {
        return;
    }
    let mut word = vec![Letter::X];
    if !prefix.is_empty() {
        word = prefix.to_vec();
        if !ReflectionWord::new(word.clone()).is_reduced() {
            return;
        }
        if word.len() == len && word[0] == word[len - 1] {
            return;
        }
    }
    let mut gen = Generator {
        len,
        word,
        emit: &mut emit,
    };
    // Replaying the prefix through the same pruning rules.
    for k in 2..=gen.word.len() {
        let w = &gen.word[..k];
        for s in (2..k).step_by(2) {
            if w[s..].iter().cmp(w[..k - s].iter()) == Ordering::Less {
                return;
            }
        }
    }
    let mut active = gen.active_starts();
    gen.run(&mut active);
}

/// Canonical prefixes of length `depth` used to split an enumeration into
/// independent shards.
pub fn shard_prefixes(length: usize, depth: usize) -> Vec<Vec<Letter>> {
    let depth = depth.clamp(1, 2 * length);
    let mut out = Vec::new();
    let mut stack = vec![vec![Letter::X]];
    while let Some(p) = stack.pop() {
        if p.len() == depth {
            out.push(p);
            continue;
        }
        for letter in Letter::ALL.iter().rev() {
            if *p.last().unwrap() == *letter {
                continue;
            }
            let mut q = p.clone();
            q.push(*letter);
            let k = q.len();
            let pruned = (2..k)
                .step_by(2)
                .any(|s| q[s..].iter().cmp(q[..k - s].iter()) == Ordering::Less);
            if !pruned {
                stack.push(q);
            }
        }
    }
    out.sort();
    out
}

/// Default shard depth: deep enough to balance work, shallow enough that
/// shards stay cheap to list.
pub fn default_shard_depth(length: usize) -> usize {
    (2 * length).min(10)
}

/// Every class of combinatorial length `length`, in lexicographic order.
pub fn enumerate_classes(length: usize) -> Vec<CurveClass> {
    let mut out = Vec::new();
    for_each_class_with_prefix(length, &[], |w| {
        out.push(CurveClass::from_canonical_unchecked(w.to_vec()))
    });
    out
}

/// Parallel map over every class of length `length`. Results are returned in
/// the same order as [`enumerate_classes`] regardless of thread count.
pub fn par_map_classes<T, F>(length: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[Letter]) -> T + Sync,
{
    if length < 2 {
        return Vec::new();
    }
    let prefixes = shard_prefixes(length, default_shard_depth(length));
    prefixes
        .par_iter()
        .map(|p| {
            let mut out = Vec::new();
            for_each_class_with_prefix(length, p, |w| out.push(f(w)));
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Parallel fold-and-merge over every class of length `length`; `merge` must
/// be associative and commutative for the result to be schedule independent.
pub fn par_fold_classes<A, F, M>(length: usize, init: A, fold: F, merge: M) -> A
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, &[Letter]) + Sync,
    M: Fn(A, A) -> A + Sync + Send,
{
    if length < 2 {
        return init;
    }
    let prefixes = shard_prefixes(length, default_shard_depth(length));
    prefixes
        .par_iter()
        .map(|p| {
            let mut acc = init.clone();
            for_each_class_with_prefix(length, p, |w| fold(&mut acc, w));
            acc
        })
        .reduce(|| init.clone(), &merge)
}

/// The six permutations of `{x, y, z}`.
pub const LETTER_PERMUTATIONS: [[Letter; 3]; 6] = {
    use Letter::*;
    [
        [X, Y, Z],
        [X, Z, Y],
        [Y, X, Z],
        [Y, Z, X],
        [Z, X, Y],
        [Z, Y, X],
    ]
};

pub fn permute_class(class: &CurveClass, perm: &[Letter; 3]) -> CurveClass {
    let letters: Vec<Letter> = class.letters().iter().map(|l| perm[l.index()]).collect();
    CurveClass::from_canonical_unchecked(canonical_letters(&letters))
}

/// One orbit of the letter-permutation action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    /// Smallest class in the orbit.
    pub representative: CurveClass,
    pub members: Vec<CurveClass>,
}

impl Orbit {
    /// Orbit size `C(w)`.
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Mirror image of a class: the cyclic word read from an odd position, that
/// is, conjugation by a single reflection letter.
pub fn mirror_class(class: &CurveClass) -> CurveClass {
    let w = class.letters();
    let n = w.len();
    let odd: Vec<Letter> = (0..n).map(|k| w[(k + 1) % n]).collect();
    CurveClass::from_canonical_unchecked(canonical_letters(&odd))
}

/// Partitions `classes` into orbits of a group given by the full list of
/// images of each class. Classes whose images fall outside the input are
/// still grouped by the images that are present.
pub fn orbit_partition_by<F>(classes: &[CurveClass], images: F) -> Vec<Orbit>
where
    F: Fn(&CurveClass) -> Vec<CurveClass>,
{
    let mut by_key: BTreeMap<CurveClass, Vec<CurveClass>> = BTreeMap::new();
    for c in classes {
        let key = images(c).into_iter().min().unwrap_or_else(|| c.clone());
        by_key.entry(key).or_default().push(c.clone());
    }
    by_key
        .into_values()
        .map(|mut members| {
            members.sort();
            members.dedup();
            Orbit {
                representative: members[0].clone(),
                members,
            }
        })
        .collect()
}

/// Orbits under the given letter permutations only.
pub fn orbit_partition_under(classes: &[CurveClass], group: &[[Letter; 3]]) -> Vec<Orbit> {
    orbit_partition_by(classes, |c| group.iter().map(|p| permute_class(c, p)).collect())
}

/// Images of a class under all automorphisms of `G`: the six letter
/// permutations, each with and without the mirror.
pub fn aut_images(class: &CurveClass) -> Vec<CurveClass> {
    let mirrored = mirror_class(class);
    LETTER_PERMUTATIONS
        .iter()
        .flat_map(|p| [permute_class(class, p), permute_class(&mirrored, p)])
        .collect()
}

/// Orbits of the automorphism group of `G` acting on classes.
pub fn aut_orbit_partition(classes: &[CurveClass]) -> Vec<Orbit> {
    orbit_partition_by(classes, aut_images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn rw(s: &str) -> ReflectionWord {
        s.parse().unwrap()
    }

    /// Generate-all-then-dedupe oracle.
    fn brute_classes(length: usize) -> BTreeSet<CurveClass> {
        let n = 2 * length;
        let mut out = BTreeSet::new();
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let letters: Vec<Letter> = (0..n)
                .map(|_| {
                    let l = Letter::from_index(c % 3);
                    c /= 3;
                    l
                })
                .collect();
            if let Ok(cls) = canonical_class(&ReflectionWord::new(letters)) {
                out.insert(cls);
            }
        }
        out
    }

    #[test]
    fn canonical_examples() {
        let c = |s: &str| canonical_class(&rw(s)).unwrap();
        assert_eq!(c("xyzxyz"), c("zxyzxy"));
        assert_eq!(c("xyzy"), c("yzyx"));
        assert_ne!(c("xyxz"), c("xyzy"));
        assert_eq!(c("zxyzxy").to_string(), "xyzxyz");
        assert_eq!(canonical_class(&rw("xyx")), Err(Error::OddLength(3)));
        assert_eq!(canonical_class(&rw("xyzx")), Err(Error::NotCyclicallyReduced));
        assert_eq!(canonical_class(&rw("xy")), Err(Error::TooShort(2)));
        assert_eq!(canonical_class(&rw("xyxy")), Err(Error::Imprimitive));
    }

    #[test]
    fn primitivity_examples() {
        assert!(!is_primitive(&rw("xyxy")));
        assert!(is_primitive(&rw("xyzxyz")));
        assert!(!is_primitive(&rw("xyzyxyzy")));
        assert_eq!(primitive_root(&rw("xyzyxyzy")), (rw("xyzy"), 2));
        assert_eq!(primitive_root(&rw("xyxyxy")), (rw("xy"), 3));
        assert_eq!(primitive_root(&rw("xyzxyzxyzxyz")), (rw("xyzxyz"), 2));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        assert!(enumerate_classes(1).is_empty());
        assert_eq!(enumerate_classes(2).len(), 3);
        assert_eq!(enumerate_classes(3).len(), 10);
        for length in 2..=6 {
            let fast: Vec<_> = enumerate_classes(length);
            let brute = brute_classes(length);
            assert_eq!(fast.len(), brute.len(), "L = {length}");
            assert_eq!(fast.iter().cloned().collect::<BTreeSet<_>>(), brute);
            assert!(fast.windows(2).all(|p| p[0] < p[1]), "sorted, no duplicates");
        }
    }

    #[test]
    fn shards_cover_enumeration() {
        for length in 2..=7 {
            let all = enumerate_classes(length);
            for depth in [1, 2, 3, 5, 2 * length] {
                let mut merged = Vec::new();
                for p in shard_prefixes(length, depth) {
                    for_each_class_with_prefix(length, &p, |w| {
                        merged.push(CurveClass::from_canonical_unchecked(w.to_vec()))
                    });
                }
                assert_eq!(merged, all, "L = {length}, depth = {depth}");
            }
            let par: Vec<CurveClass> =
                par_map_classes(length, |w| CurveClass::from_canonical_unchecked(w.to_vec()));
            assert_eq!(par, all);
        }
    }

    #[test]
    fn classes_contain_all_letters() {
        for length in 2..=7 {
            for c in enumerate_classes(length) {
                assert!(c.canon().contains_all_letters(), "{c}");
                assert_eq!(c.letters()[0], Letter::X);
            }
        }
    }

    #[test]
    fn orbit_examples() {
        let c = |s: &str| canonical_class(&rw(s)).unwrap();
        let orbits = aut_orbit_partition(&[c("xyzxyz")]);
        assert_eq!(orbits.len(), 1);
        // The trefoil's orbit is a single class.
        let full: Vec<_> = LETTER_PERMUTATIONS
            .iter()
            .map(|p| permute_class(&c("xyzxyz"), p))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(full.len(), 1);
        let identity = [[Letter::X, Letter::Y, Letter::Z]];
        let some = enumerate_classes(3);
        let singletons = orbit_partition_under(&some, &identity);
        assert_eq!(singletons.len(), some.len());
        assert!(singletons.iter().all(|o| o.size() == 1));
        let l2 = aut_orbit_partition(&enumerate_classes(2));
        assert_eq!(l2.len(), 1);
        assert_eq!(l2[0].size(), 3);
    }
}
