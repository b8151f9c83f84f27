//! Chords of the hexagon around the origin of the Cayley graph and the
//! crossing form on them.
//!
//! The hexagon's sides carry the six letters in the cyclic order
//! `a, A, b, B, c, C` (capitals are inverses). A chord joins two non-adjacent
//! sides, giving 9 chords. A word whose abc spelling has no two equal
//! consecutive letters (cyclically) traces one chord per letter, from the
//! side of the inverse of the previous letter to the side of the current one.

#![allow(clippy::needless_range_loop)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intersection::self_intersection;
use crate::word::{GroupLetter, GroupWord};

/// Side positions of the hexagon.
pub fn side(g: GroupLetter) -> usize {
    match g {
        GroupLetter::A => 0,
        GroupLetter::AInv => 1,
        GroupLetter::B => 2,
        GroupLetter::BInv => 3,
        GroupLetter::C => 4,
        GroupLetter::CInv => 5,
    }
}

const SIDES: [GroupLetter; 6] = [
    GroupLetter::A,
    GroupLetter::AInv,
    GroupLetter::B,
    GroupLetter::BInv,
    GroupLetter::C,
    GroupLetter::CInv,
];

/// The 9 chords as pairs of side positions.
pub const CHORDS: [(usize, usize); 9] = [
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 4),
    (2, 5),
    (3, 5),
];

pub fn chord_index(u: GroupLetter, v: GroupLetter) -> Option<usize> {
    let (p, q) = (side(u).min(side(v)), side(u).max(side(v)));
    CHORDS.iter().position(|&c| c == (p, q))
}

pub fn chord_label(k: usize) -> String {
    let (p, q) = CHORDS[k];
    format!("[{},{}]", SIDES[p].to_char(), SIDES[q].to_char())
}

fn crosses(k: (usize, usize), m: (usize, usize)) -> bool {
    let inside = |t: usize| k.0 < t && t < k.1;
    let shared = k.0 == m.0 || k.0 == m.1 || k.1 == m.0 || k.1 == m.1;
    !shared && inside(m.0) != inside(m.1)
}

/// The 9×9 crossing matrix.
pub fn crossing_matrix() -> [[i64; 9]; 9] {
    let mut q = [[0; 9]; 9];
    for (i, row) in q.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = crosses(CHORDS[i], CHORDS[j]) as i64;
        }
    }
    q
}

/// Boundary of a single chord over the basis `a, b, c`.
pub fn chord_boundary(k: usize) -> [i64; 3] {
    let mut out = [0; 3];
    let (p, q) = CHORDS[k];
    for s in [p, q] {
        // Even positions are generators, odd ones their inverses.
        out[s / 2] += if s % 2 == 0 { 1 } else { -1 };
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChordVector {
    pub coords: [i64; 9],
    pub lambda: i64,
    pub boundary: [i64; 3],
}

impl ChordVector {
    pub fn from_coords(coords: [i64; 9]) -> Self {
        let mut boundary = [0; 3];
        for (k, &c) in coords.iter().enumerate() {
            let b = chord_boundary(k);
            for s in 0..3 {
                boundary[s] += c * b[s];
            }
        }
        ChordVector {
            coords,
            lambda: coords.iter().sum(),
            boundary,
        }
    }

    pub fn basis(k: usize) -> Self {
        let mut coords = [0; 9];
        coords[k] = 1;
        Self::from_coords(coords)
    }
}

/// True when no two cyclically consecutive abc letters are equal.
pub fn is_thin_word(w: &GroupWord) -> bool {
    let g = w.letters();
    let n = g.len();
    n > 0 && (0..n).all(|i| g[i] != g[(i + 1) % n])
}

pub fn chord_vector(w: &GroupWord) -> Result<ChordVector> {
    let g = w.letters();
    let n = g.len();
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced);
    }
    let mut coords = [0; 9];
    for i in 0..n {
        let prev = g[(i + n - 1) % n].inverse();
        match chord_index(prev, g[i]) {
            Some(k) => coords[k] += 1,
            None => return Err(Error::RepeatedLetter),
        }
    }
    Ok(ChordVector::from_coords(coords))
}

pub fn chord_form_q(v1: &ChordVector, v2: &ChordVector) -> i64 {
    let q = crossing_matrix();
    let mut total = 0;
    for i in 0..9 {
        for j in 0..9 {
            total += v1.coords[i] * q[i][j] * v2.coords[j];
        }
    }
    total
}

/// Signature `(positive, negative, zero)` of a symmetric rational matrix by
/// congruence diagonalization.
pub fn signature(m: &[Vec<Rational64>]) -> (usize, usize, usize) {
    let mut a: Vec<Vec<Rational64>> = m.to_vec();
    let n = a.len();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        // Bring a nonzero diagonal entry to position k.
        if a[k][k].is_zero() {
            if let Some(p) = (k + 1..n).find(|&p| !a[p][p].is_zero()) {
                a.swap(k, p);
                for row in a.iter_mut() {
                    row.swap(k, p);
                }
            } else if let Some(p) = (k + 1..n).find(|&p| !a[k][p].is_zero()) {
                // Replace e_k by e_k + e_p; the new diagonal entry is 2·a[k][p].
                for j in 0..n {
                    let v = a[p][j];
                    a[k][j] += v;
                }
                for i in 0..n {
                    let v = a[i][p];
                    a[i][k] += v;
                }
            } else {
                // Row k is zero.
                k += 1;
                continue;
            }
        }
        let pivot = a[k][k];
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let f = a[i][k] / pivot;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
        }
        // The trailing block is now the Schur complement, still symmetric.
        k += 1;
    }
    (pos, neg, n - pos - neg)
}

fn to_rational(m: &[[i64; 9]; 9]) -> Vec<Vec<Rational64>> {
    m.iter()
        .map(|row| row.iter().map(|&x| Rational64::from_integer(x)).collect())
        .collect()
}

/// An integer basis of the kernel of the boundary map, as 9-vectors.
pub fn boundary_kernel_basis() -> Vec<[i64; 9]> {
    // Row-reduce the 3×9 boundary matrix over the rationals.
    let mut rows: Vec<Vec<Rational64>> = (0..3)
        .map(|s| {
            (0..9)
                .map(|k| Rational64::from_integer(chord_boundary(k)[s]))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..9 {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&p| !rows[p][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c];
                for j in 0..9 {
                    let v = rows[r][j];
                    rows[i][j] -= f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..9).filter(|c| !pivots.contains(c)) {
        let mut v = [Rational64::zero(); 9];
        v[free] = Rational64::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[i][free];
        }
        let denom = v.iter().fold(1i64, |acc, x| num_integer::lcm(acc, *x.denom()));
        let mut out = [0i64; 9];
        for k in 0..9 {
            out[k] = (v[k] * Rational64::from_integer(denom)).to_integer();
        }
        basis.push(out);
    }
    basis
}

fn gram(m: &[Vec<Rational64>], basis: &[[i64; 9]]) -> Vec<Vec<Rational64>> {
    basis
        .iter()
        .map(|u| {
            basis
                .iter()
                .map(|v| {
                    let mut s = Rational64::zero();
                    for i in 0..9 {
                        for j in 0..9 {
                            s += m[i][j] * Rational64::from_integer(u[i] * v[j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Exact and numeric facts about the crossing form.
#[derive(Debug, Clone, Serialize)]
pub struct FormReport {
    /// Signature of the form on all of `R^9`.
    pub signature: (usize, usize, usize),
    pub kernel_dimension: usize,
    /// Signature of the form restricted to the kernel of the boundary map.
    pub kernel_signature: (usize, usize, usize),
    /// Signature of `Q − λ²/3` on the kernel.
    pub kernel_excess_signature: (usize, usize, usize),
    /// Smallest eigenvalue of the form on the kernel (orthonormal basis).
    pub kernel_min_eigenvalue: f64,
}

impl FormReport {
    pub fn kernel_positive_definite(&self) -> bool {
        let (p, n, z) = self.kernel_signature;
        p == self.kernel_dimension && n == 0 && z == 0
    }

    /// `Q(v,v) ≥ λ(v)²/3` on the kernel.
    pub fn length_bound_holds(&self) -> bool {
        self.kernel_excess_signature.1 == 0
    }
}

pub fn form_report() -> FormReport {
    let q = to_rational(&crossing_matrix());
    let basis = boundary_kernel_basis();
    let kernel_signature = signature(&gram(&q, &basis));
    let third = Rational64::new(1, 3);
    let excess: Vec<Vec<Rational64>> = q
        .iter()
        .map(|row| row.iter().map(|&x| x - third).collect())
        .collect();
    let kernel_excess_signature = signature(&gram(&excess, &basis));

    let b = DMatrix::from_fn(9, basis.len(), |i, j| basis[j][i] as f64);
    let ortho = b.qr().q();
    let qf = DMatrix::from_fn(9, 9, |i, j| crossing_matrix()[i][j] as f64);
    let restricted = ortho.transpose() * qf * &ortho;
    let eig = SymmetricEigen::new(restricted);
    let kernel_min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);

    FormReport {
        signature: signature(&q),
        kernel_dimension: basis.len(),
        kernel_signature,
        kernel_excess_signature,
        kernel_min_eigenvalue,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadBound {
    pub word: String,
    pub length: usize,
    pub intersection: u64,
    /// `Q(v,v)/2`.
    #[serde(serialize_with = "ratio_str")]
    pub half_q: Rational64,
    /// `L²/6`.
    #[serde(serialize_with = "ratio_str")]
    pub length_bound: Rational64,
}

fn ratio_str<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl QuadBound {
    pub fn holds(&self) -> bool {
        let i = Rational64::from_integer(self.intersection as i64);
        i >= self.half_q && self.half_q >= self.length_bound
    }
}

pub fn quad_bound_report(w: &GroupWord) -> Result<QuadBound> {
    let v = chord_vector(w)?;
    let intersection = self_intersection(&w.to_reflection_word())?;
    let l = w.len() as i64;
    Ok(QuadBound {
        word: w.to_string(),
        length: w.len(),
        intersection,
        half_q: Rational64::new(chord_form_q(&v, &v), 2),
        length_bound: Rational64::new(l * l, 6),
    })
}
