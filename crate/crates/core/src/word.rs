//! Words in the reflection group `⟨x, y, z | x² = y² = z² = 1⟩` and in its
//! orientation-preserving subgroup `G = ⟨a, b, c | abc = 1⟩`.
//!
//! The two presentations are linked by `a = xy`, `b = yz`, `c = zx`. Every
//! generator of the reflection group is an involution, so the inverse of an
//! xyz word is its reversal. ASCII encodings: xyz words are lowercase
//! `x`, `y`, `z`; abc words use `a`, `b`, `c` with `A`, `B`, `C` for inverses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator of the reflection group. The derived order `X < Y < Z` is the
/// letter order used for canonical representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Letter {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Letter {
        Letter::ALL[i % 3]
    }

    /// The letter different from both `self` and `other` (which must differ).
    #[inline]
    pub fn third(self, other: Letter) -> Letter {
        debug_assert_ne!(self, other);
        Letter::from_index(3 - self.index() - other.index())
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
            Letter::Z => 'z',
        }
    }

    pub fn from_char(ch: char) -> Option<Letter> {
        match ch {
            'x' => Some(Letter::X),
            'y' => Some(Letter::Y),
            'z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// A generator of `G` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupLetter {
    A,
    B,
    C,
    AInv,
    BInv,
    CInv,
}

impl GroupLetter {
    pub const ALL: [GroupLetter; 6] = [
        GroupLetter::A,
        GroupLetter::B,
        GroupLetter::C,
        GroupLetter::AInv,
        GroupLetter::BInv,
        GroupLetter::CInv,
    ];

    pub fn inverse(self) -> GroupLetter {
        use GroupLetter::*;
        match self {
            A => AInv,
            B => BInv,
            C => CInv,
            AInv => A,
            BInv => B,
            CInv => C,
        }
    }

    /// The pair of reflections spelling this letter (`a = xy` and so on).
    pub fn to_pair(self) -> (Letter, Letter) {
        use GroupLetter::*;
        use Letter::*;
        match self {
            A => (X, Y),
            B => (Y, Z),
            C => (Z, X),
            AInv => (Y, X),
            BInv => (Z, Y),
            CInv => (X, Z),
        }
    }

    /// Inverse of [`GroupLetter::to_pair`]; `None` when the two letters agree.
    pub fn from_pair(first: Letter, second: Letter) -> Option<GroupLetter> {
        use GroupLetter::*;
        use Letter::*;
        Some(match (first, second) {
            (X, Y) => A,
            (Y, Z) => B,
            (Z, X) => C,
            (Y, X) => AInv,
            (Z, Y) => BInv,
            (X, Z) => CInv,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        use GroupLetter::*;
        match self {
            A => 'a',
            B => 'b',
            C => 'c',
            AInv => 'A',
            BInv => 'B',
            CInv => 'C',
        }
    }

    pub fn from_char(ch: char) -> Option<GroupLetter> {
        use GroupLetter::*;
        Some(match ch {
            'a' => A,
            'b' => B,
            'c' => C,
            'A' => AInv,
            'B' => BInv,
            'C' => CInv,
            _ => return None,
        })
    }
}

/// A word in the generators `x, y, z` of the reflection group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ReflectionWord {
    letters: Vec<Letter>,
}

impl ReflectionWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        ReflectionWord { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    /// Word length ℓ(w).
    pub fn ell(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Words of even length represent elements of `G`.
    pub fn in_g(&self) -> bool {
        self.letters.len().is_multiple_of(2)
    }

    /// Combinatorial length `L = ℓ/2`; `None` for odd words.
    pub fn length_l(&self) -> Option<usize> {
        self.in_g().then_some(self.letters.len() / 2)
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != p[1])
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && (self.letters.len() < 2 || self.letters[0] != self.letters[self.letters.len() - 1])
    }

    /// Free reduction: cancels adjacent equal letters until none remain.
    pub fn reduce(&self) -> ReflectionWord {
        ReflectionWord::new(free_reduce(&self.letters))
    }

    /// The inverse element, i.e. the reversed word.
    pub fn inverse(&self) -> ReflectionWord {
        let mut letters = self.letters.clone();
        letters.reverse();
        ReflectionWord::new(letters)
    }

    /// Cyclic rotation starting at position `start`.
    pub fn rotate(&self, start: usize) -> ReflectionWord {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let s = start % n;
        let mut letters = Vec::with_capacity(n);
        letters.extend_from_slice(&self.letters[s..]);
        letters.extend_from_slice(&self.letters[..s]);
        ReflectionWord::new(letters)
    }

    /// Reduces, then strips matching first/last letters (conjugating by an
    /// involution each time). Parity of the length is preserved.
    pub fn cyclically_reduce(&self) -> ReflectionWord {
        let mut letters = free_reduce(&self.letters);
        let mut lo = 0;
        let mut hi = letters.len();
        while hi - lo >= 2 && letters[lo] == letters[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        letters.truncate(hi);
        letters.drain(..lo);
        ReflectionWord::new(letters)
    }

    /// Converts to the `a, b, c` presentation by pairing letters from the start.
    pub fn to_group_word(&self) -> Result<GroupWord> {
        to_group_word(self)
    }

    pub fn contains_all_letters(&self) -> bool {
        let mut seen = [false; 3];
        for &l in &self.letters {
            seen[l.index()] = true;
        }
        seen.iter().all(|&s| s)
    }
}

impl fmt::Display for ReflectionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for ReflectionWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match parse_word(s)? {
            Word::Reflection(w) => Ok(w),
            Word::Group(g) => Ok(g.to_reflection_word()),
        }
    }
}

/// A word in `a, b, c` and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupWord {
    letters: Vec<GroupLetter>,
}

impl GroupWord {
    pub fn new(letters: Vec<GroupLetter>) -> Self {
        GroupWord { letters }
    }

    pub fn letters(&self) -> &[GroupLetter] {
        &self.letters
    }

    /// Number of letters; equals `L(w)` for a reduced word.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_reflection_word(&self) -> ReflectionWord {
        to_reflection_word(self)
    }

    /// Unique reduced normal form of the group element.
    pub fn reduce(&self) -> GroupWord {
        reduce(self)
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| !forbidden_bigram(p[0], p[1]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        let n = self.letters.len();
        self.is_reduced() && (n < 2 || !forbidden_bigram(self.letters[n - 1], self.letters[0]))
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord::new(self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Cyclic conjugate `g_i g_{i+1} … g_{i-1}` (0-based start).
    pub fn rotate(&self, start: usize) -> GroupWord {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let s = start % n;
        let mut letters = Vec::with_capacity(n);
        letters.extend_from_slice(&self.letters[s..]);
        letters.extend_from_slice(&self.letters[..s]);
        GroupWord::new(letters)
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        reduce(&GroupWord::new(letters))
    }

    /// Reduced power; negative exponents use the inverse.
    pub fn pow(&self, exp: i64) -> GroupWord {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * exp.unsigned_abs() as usize);
        for _ in 0..exp.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        reduce(&GroupWord::new(letters))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match parse_word(s)? {
            Word::Group(g) => Ok(g),
            Word::Reflection(w) => to_group_word(&w),
        }
    }
}

/// A parsed word in either alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Reflection(ReflectionWord),
    Group(GroupWord),
}

impl Word {
    /// The xyz spelling; abc words are substituted letter by letter.
    pub fn to_reflection_word(&self) -> ReflectionWord {
        match self {
            Word::Reflection(w) => w.clone(),
            Word::Group(g) => g.to_reflection_word(),
        }
    }

    /// Whether the word names an element of `G` (abc words always do).
    pub fn in_g(&self) -> bool {
        match self {
            Word::Reflection(w) => w.in_g(),
            Word::Group(_) => true,
        }
    }
}

/// Parses an xyz or abc word. Surrounding whitespace and `.` separators are
/// ignored; mixing the two alphabets is an error.
pub fn parse_word(text: &str) -> Result<Word> {
    let mut xyz = Vec::new();
    let mut abc = Vec::new();
    for (pos, ch) in text.trim().chars().enumerate() {
        if ch == '.' || ch == '·' {
            continue;
        }
        if let Some(l) = Letter::from_char(ch) {
            xyz.push(l);
        } else if let Some(g) = GroupLetter::from_char(ch) {
            abc.push(g);
        } else {
            return Err(Error::UnknownCharacter(ch, pos));
        }
    }
    match (xyz.is_empty(), abc.is_empty()) {
        (true, true) => Err(Error::EmptyWord),
        (false, false) => Err(Error::MixedAlphabet),
        (false, true) => Ok(Word::Reflection(ReflectionWord::new(xyz))),
        (true, false) => Ok(Word::Group(GroupWord::new(abc))),
    }
}

/// Pairwise substitution `xy → a`, `yz → b`, `zx → c` (and inverses).
pub fn to_group_word(w: &ReflectionWord) -> Result<GroupWord> {
    if !w.in_g() {
        return Err(Error::OddLength(w.ell()));
    }
    w.letters
        .chunks_exact(2)
        .map(|p| GroupLetter::from_pair(p[0], p[1]).ok_or(Error::NotReduced))
        .collect::<Result<Vec<_>>>()
        .map(GroupWord::new)
}

pub fn to_reflection_word(g: &GroupWord) -> ReflectionWord {
    let mut letters = Vec::with_capacity(2 * g.len());
    for l in &g.letters {
        let (p, q) = l.to_pair();
        letters.push(p);
        letters.push(q);
    }
    ReflectionWord::new(letters)
}

/// Reduced normal form in `G`. Works through the reflection group: reduced
/// xyz words are unique, and reading one in pairs never produces an inverse
/// pair or one of the shortcut bigrams `ab, bc, ca, BA, CB, AC` (each of
/// those has a doubled middle letter).
pub fn reduce(g: &GroupWord) -> GroupWord {
    let xyz = free_reduce(to_reflection_word(g).letters());
    let letters = xyz
        .chunks_exact(2)
        .map(|p| GroupLetter::from_pair(p[0], p[1]).expect("reduced xyz word has distinct neighbours"))
        .collect();
    GroupWord::new(letters)
}

fn forbidden_bigram(first: GroupLetter, second: GroupLetter) -> bool {
    first.to_pair().1 == second.to_pair().0
}

pub(crate) fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}
