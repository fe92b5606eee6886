//! X/Z Pauli words in the binary symplectic picture.
//!
//! A word is a pair of bitmasks: bit `i - 1` of `x` marks an `X` on site `i`,
//! bit `i - 1` of `z` marks a `Z`. `Y` factors are excluded, so the masks are
//! disjoint and every product that stays inside the family carries phase `+1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{bits, Graph};

/// Widest word representable by the `u64` masks.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    n: usize,
    x: u64,
    z: u64,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliWord {
    pub fn new(n: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyVertices(n));
        }
        let outside = (x_mask | z_mask) & !full_mask(n);
        if outside != 0 {
            return Err(Error::LengthMismatch(n, 64 - outside.leading_zeros() as usize));
        }
        if let Some(&site) = bits(x_mask & z_mask).first() {
            return Err(Error::YFactor(site));
        }
        Ok(PauliWord { n, x: x_mask, z: z_mask })
    }

    pub fn identity(n: usize) -> Self {
        PauliWord { n, x: 0, z: 0 }
    }

    /// Builds a word from its `+1 / -1 / 0` sequence (`X / Z / I`).
    pub fn from_sequence(seq: &[i8]) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (k, &s) in seq.iter().enumerate() {
            match s {
                1 => x |= 1 << k,
                -1 => z |= 1 << k,
                0 => {}
                v => return Err(Error::BadSequenceEntry { site: k + 1, value: v as i64 }),
            }
        }
        PauliWord::new(seq.len(), x, z)
    }

    /// Parses words such as `"X1Z2Z3"` (1-based sites, any order).
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let bad = || Error::BadPauliWord(s.to_string());
        let (mut x, mut z) = (0u64, 0u64);
        let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(c) = chars.next() {
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let site: usize = digits.parse().map_err(|_| bad())?;
            if site == 0 || site > n {
                return Err(bad());
            }
            let bit = 1u64 << (site - 1);
            if (x | z) & bit != 0 {
                return Err(bad());
            }
            match c {
                'X' => x |= bit,
                'Z' => z |= bit,
                'I' => {}
                _ => return Err(bad()),
            }
        }
        PauliWord::new(n, x, z)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    /// Sequence entry at 1-based `site`: `+1` for X, `-1` for Z, `0` for I.
    pub fn sign_at(&self, site: usize) -> i8 {
        let bit = 1u64 << (site - 1);
        if self.x & bit != 0 {
            1
        } else if self.z & bit != 0 {
            -1
        } else {
            0
        }
    }

    pub fn sequence(&self) -> Vec<i8> {
        (1..=self.n).map(|i| self.sign_at(i)).collect()
    }

    /// Site-wise product. Rejected when some site pairs X with Z, since that
    /// site would carry a Y.
    pub fn multiply(&self, other: &PauliWord) -> Result<PauliWord> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        let clash = (self.x & other.z) | (self.z & other.x);
        if clash != 0 {
            return Err(Error::YCollision(bits(clash)));
        }
        Ok(PauliWord { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z })
    }

    /// Sites where one word has X and the other Z, ascending.
    pub fn anticommuting_positions(&self, other: &PauliWord) -> Vec<usize> {
        bits((self.x & other.z) | (self.z & other.x))
    }

    pub fn is_pairable(&self, other: &PauliWord) -> bool {
        (self.x & other.z) | (self.z & other.x) != 0
    }

    /// Packs `(x || z)` into one row of the binary symplectic matrix.
    pub(crate) fn row(&self) -> u128 {
        self.x as u128 | (self.z as u128) << self.n
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        for i in 1..=self.n {
            match self.sign_at(i) {
                1 => write!(f, "X{i}")?,
                -1 => write!(f, "Z{i}")?,
                _ => {}
            }
        }
        Ok(())
    }
}

/// Serialized as the sign sequence, e.g. `[1, -1, 0]` for `X1Z2`.
impl serde::Serialize for PauliWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.sequence().serialize(s)
    }
}

/// Anticommuting positions of `a` and `b`; the pair is pairable iff the list is
/// non-empty.
pub fn is_pairable(a: &PauliWord, b: &PauliWord) -> Vec<usize> {
    a.anticommuting_positions(b)
}

/// `G_i = X_i * prod_{j in n_i} Z_j` for `i = 1..=n`.
pub fn generators(g: &Graph) -> Vec<PauliWord> {
    (1..=g.n()).map(|i| PauliWord { n: g.n(), x: 1 << (i - 1), z: g.neighbor_mask(i) }).collect()
}

/// Incrementally row-reduced GF(2) basis over packed symplectic rows.
#[derive(Debug, Clone, Default)]
pub(crate) struct Gf2Basis {
    // (pivot bit, reduced row), kept so each pivot appears in exactly one row
    rows: Vec<(u32, u128)>,
}

impl Gf2Basis {
    pub(crate) fn reduce(&self, mut row: u128) -> u128 {
        for &(pivot, r) in &self.rows {
            if row >> pivot & 1 == 1 {
                row ^= r;
            }
        }
        row
    }

    /// Adds `row`; returns false when it is already in the span.
    pub(crate) fn insert(&mut self, row: u128) -> bool {
        let row = self.reduce(row);
        if row == 0 {
            return false;
        }
        let pivot = 127 - row.leading_zeros();
        for (_, r) in self.rows.iter_mut() {
            if *r >> pivot & 1 == 1 {
                *r ^= row;
            }
        }
        self.rows.push((pivot, row));
        true
    }

    pub(crate) fn contains(&self, row: u128) -> bool {
        self.reduce(row) == 0
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Rank over GF(2) of the matrix whose rows are `(x_mask || z_mask)`.
pub fn gf2_rank(words: &[PauliWord]) -> usize {
    let mut basis = Gf2Basis::default();
    for w in words {
        basis.insert(w.row());
    }
    basis.rank()
}
