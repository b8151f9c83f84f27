//! Self-intersection numbers from words.
//!
//! For a primitive, cyclically reduced word `w = g_1 … g_n` in `a, b, c` the
//! self-intersection number is
//!
//! ```text
//! I(w) = 1/4 · Σ_{i,j} linked(δ_i, δ_j) · (deg_e(δ_i ∪ δ_j) − 2)
//! ```
//!
//! where `δ_i` is the axis through the origin of the cyclic conjugate
//! `w_i = g_i … g_{i-1}` and `deg_e` counts distinct edges at the origin.
//!
//! Linking is decided in the planar Cayley tree of `⟨x, y, z | x² = y² = z²⟩`
//! rather than in the Cayley graph of `G` (which has triangles). Vertices are
//! reflection-group elements; the edge germs `x, y, z` at a vertex appear in
//! counterclockwise order `(x, y, z)` at even vertices and `(x, z, y)` at odd
//! ones. Two bi-infinite paths are linked at infinity exactly when the germs
//! leaving the two ends of their common segment alternate around it.

use serde::Serialize;

use crate::class::{primitive_root, CurveClass};
use crate::error::{Error, Result};
use crate::word::{GroupLetter, GroupWord, Letter, ReflectionWord, Word};

/// A bi-infinite periodic path through the tree's origin, spelling the cyclic
/// word `word` starting at offset `start`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeAxis<'a> {
    word: &'a [Letter],
    start: usize,
}

impl<'a> TreeAxis<'a> {
    pub(crate) fn new(word: &'a [Letter], start: usize) -> Self {
        TreeAxis { word, start }
    }

    /// Letter `k` steps ahead of the origin along the orientation.
    #[inline]
    fn forward(&self, k: usize) -> Letter {
        let n = self.word.len();
        self.word[(self.start + k) % n]
    }

    /// Letter `k` steps behind the origin.
    #[inline]
    fn backward(&self, k: usize) -> Letter {
        let n = self.word.len();
        self.word[(self.start + n - 1 - (k % n)) % n]
    }

    #[inline]
    fn ray(&self, forward: bool, k: usize) -> Letter {
        if forward {
            self.forward(k)
        } else {
            self.backward(k)
        }
    }
}

/// Counterclockwise successor of `germ` at a vertex of the given parity.
#[inline]
fn next_ccw(germ: Letter, odd_vertex: bool) -> Letter {
    let step = if odd_vertex { 2 } else { 1 };
    Letter::from_index(germ.index() + step)
}

/// Outcome of comparing two axes through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct TreeLinking {
    /// Number of distinct tree edges of the two axes at the origin (2 or 3).
    pub tree_degree: u8,
    pub linked: bool,
}

/// Decides whether two axes through the origin are linked at infinity.
pub(crate) fn tree_linking(alpha: TreeAxis<'_>, beta: TreeAxis<'_>) -> TreeLinking {
    let bound = alpha.word.len() + beta.word.len();
    let (b_fwd0, b_bwd0) = (beta.forward(0), beta.backward(0));

    // For each direction of alpha: which ray of beta starts with the same
    // letter, and how long they agree.
    let agreement = |alpha_forward: bool| -> Option<(bool, usize)> {
        let s = alpha.ray(alpha_forward, 0);
        let beta_forward = if s == b_fwd0 {
            true
        } else if s == b_bwd0 {
            false
        } else {
            return Some((true, 0));
        };
        let mut k = 1;
        while k <= bound {
            if alpha.ray(alpha_forward, k) != beta.ray(beta_forward, k) {
                return Some((beta_forward, k));
            }
            k += 1;
        }
        // Agreeing rays of periodic paths share an end: same geodesic.
        None
    };

    let a_germs = [alpha.forward(0), alpha.backward(0)];
    let tree_degree = if a_germs.contains(&b_fwd0) && a_germs.contains(&b_bwd0) {
        2
    } else {
        3
    };
    let (Some((beta_dir_f, len_f)), Some((beta_dir_b, len_b))) = (agreement(true), agreement(false))
    else {
        return TreeLinking {
            tree_degree,
            linked: false,
        };
    };
    debug_assert!(len_f > 0 || len_b > 0);

    // The germ leaving the end of the common segment on alpha's side
    // `alpha_forward`, and whether it is the first counterclockwise germ
    // after the segment's own germ.
    let end_is_first = |alpha_forward: bool, len: usize, beta_forward: bool, other_len: usize| -> bool {
        if len > 0 {
            let incoming = alpha.ray(alpha_forward, len - 1);
            let leaving = alpha.ray(alpha_forward, len);
            debug_assert_ne!(leaving, beta.ray(beta_forward, len));
            leaving == next_ccw(incoming, len % 2 == 1)
        } else {
            // The segment ends at the origin and runs along alpha's other side.
            debug_assert!(other_len > 0);
            let into_segment = alpha.ray(!alpha_forward, 0);
            alpha.ray(alpha_forward, 0) == next_ccw(into_segment, false)
        }
    };

    let first_f = end_is_first(true, len_f, beta_dir_f, len_b);
    let first_b = end_is_first(false, len_b, beta_dir_b, len_f);
    debug_assert_eq!(tree_degree == 2, len_f > 0 && len_b > 0);
    TreeLinking {
        tree_degree,
        linked: first_f == first_b,
    }
}

/// The geodesic through the origin stabilized by a cyclic conjugate `w_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxisThroughOrigin {
    /// 1-based rotation index `i`.
    pub rotation_index: usize,
    #[serde(serialize_with = "serialize_display")]
    pub word: GroupWord,
    /// Germ `ḡ_{i-1}` pointing back along the axis.
    pub in_germ: GroupLetter,
    /// Germ `g_i` pointing forward.
    pub out_germ: GroupLetter,
}

fn serialize_display<S: serde::Serializer, T: std::fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Axes `δ_1 … δ_n` of a cyclically reduced word.
pub fn axes(w: &GroupWord) -> Result<Vec<AxisThroughOrigin>> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced);
    }
    let n = w.len();
    let g = w.letters();
    Ok((0..n)
        .map(|i| AxisThroughOrigin {
            rotation_index: i + 1,
            word: w.rotate(i),
            in_germ: g[(i + n - 1) % n].inverse(),
            out_germ: g[i],
        })
        .collect())
}

/// 1 when the two axes cross at infinity, 0 otherwise (including when they
/// are the same geodesic in either orientation).
pub fn linked(d1: &AxisThroughOrigin, d2: &AxisThroughOrigin) -> u8 {
    let u = d1.word.to_reflection_word();
    let v = d2.word.to_reflection_word();
    tree_linking(TreeAxis::new(u.letters(), 0), TreeAxis::new(v.letters(), 0)).linked as u8
}

/// `|{g_i, ḡ_{i-1}, g_j, ḡ_{j-1}}|` for 1-based `i, j`.
pub fn deg_e(w: &GroupWord, i: usize, j: usize) -> usize {
    let g = w.letters();
    let n = g.len();
    let germs = |k: usize| {
        let k = (k + n - 1) % n;
        (g[k], g[(k + n - 1) % n].inverse())
    };
    let (a, b) = germs(i);
    let (c, d) = germs(j);
    let mut set = vec![a, b, c, d];
    set.sort();
    set.dedup();
    set.len()
}

#[inline]
fn abc_germs(w: &[Letter], i: usize) -> (u8, u8) {
    // g_i = (w[2i], w[2i+1]); ḡ_{i-1} = (w[2i-1], w[2i-2]).
    let n = w.len();
    let out = (w[2 * i].index() * 3 + w[2 * i + 1].index()) as u8;
    let back = (w[(2 * i + n - 1) % n].index() * 3 + w[(2 * i + n - 2) % n].index()) as u8;
    (out, back)
}

/// The raw weighted sum `Σ_{i,j} linked · (deg_e − 2)` for a primitive,
/// cyclically reduced even xyz word of length at least 4.
pub fn raw_linking_sum(w: &[Letter]) -> u64 {
    let n = w.len() / 2;
    let germs: Vec<(u8, u8)> = (0..n).map(|i| abc_germs(w, i)).collect();
    let mut total = 0u64;
    for i in 0..n {
        let (gi, bi) = germs[i];
        for (j, &(gj, bj)) in germs.iter().enumerate().skip(i + 1) {
            let extra = (gj != gi && gj != bi) as u64 + (bj != gi && bj != bi && bj != gj) as u64;
            if extra == 0 {
                continue;
            }
            let l = tree_linking(TreeAxis::new(w, 2 * i), TreeAxis::new(w, 2 * j));
            if l.linked {
                total += extra;
            }
        }
    }
    2 * total
}

/// Second route to the same count: every rotation of the xyz word (both
/// parities) is an axis through a tree vertex, the tree has degree 3, and
/// each crossing contributes at both ends of its common segment.
pub fn raw_tree_sum(w: &[Letter]) -> u64 {
    let m = w.len();
    let mut total = 0u64;
    for i in 0..m {
        for j in ((i + 2)..m).step_by(2) {
            let l = tree_linking(TreeAxis::new(w, i), TreeAxis::new(w, j));
            if l.linked && l.tree_degree == 3 {
                total += 1;
            }
        }
    }
    2 * total
}

/// `I(w)` for a primitive cyclically reduced word given as letters.
#[inline]
pub(crate) fn primitive_intersection(w: &[Letter]) -> u64 {
    if w.len() <= 2 {
        return 0;
    }
    let raw = raw_linking_sum(w);
    debug_assert_eq!(raw % 4, 0, "raw linking sum {raw} for {w:?}");
    raw / 4
}

/// Self-intersection number of a class (hot path for enumeration).
pub fn class_intersection(class: &CurveClass) -> u64 {
    primitive_intersection(class.letters())
}

/// Self-intersection number of a cyclically reduced word in `G`.
///
/// Peripheral words have `I = 0`; a proper power `v^n` has
/// `I = n² I(v) + n − 1`.
pub fn self_intersection(w: &ReflectionWord) -> Result<u64> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !w.in_g() {
        return Err(Error::OddLength(w.ell()));
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced);
    }
    let (root, n) = primitive_root(w);
    let base = primitive_intersection(root.letters());
    let n = n as u64;
    Ok(n * n * base + n - 1)
}

pub fn self_intersection_word(w: &Word) -> Result<u64> {
    self_intersection(&w.to_reflection_word())
}

/// `δ = I − L` and `Δ = I − 2L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Defects {
    pub intersection: u64,
    pub length: usize,
    pub delta: i64,
    pub big_delta: i64,
}

impl Defects {
    pub fn new(intersection: u64, length: usize) -> Self {
        let (i, l) = (intersection as i64, length as i64);
        Defects {
            intersection,
            length,
            delta: i - l,
            big_delta: i - 2 * l,
        }
    }
}

pub fn defect_and_delta(w: &ReflectionWord) -> Result<Defects> {
    let i = self_intersection(w)?;
    Ok(Defects::new(i, w.ell() / 2))
}

pub fn class_defects(class: &CurveClass) -> Defects {
    Defects::new(class_intersection(class), class.length_l())
}
