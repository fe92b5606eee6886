use serde::Serialize;

use crate::error::{Error, Result, Violation};
use crate::pauli::PauliWord;

/// A stabilizer list together with the pairing set, the remainder and the
/// rotated positions (`AC`).
///
/// Stabilizer indices are 1-based into `stabilizers`; AC positions are
/// 1-based sites. A stabilizer may appear in several pairs. The list may hold
/// stabilizers that the configuration does not use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellConfig {
    n: usize,
    pub stabilizers: Vec<PauliWord>,
    pub pairs: Vec<(usize, usize)>,
    pub remainder: Vec<usize>,
    pub ac: Vec<usize>,
    /// Multiplier per stabilizer, applied on top of its occurrence count.
    pub weights: Vec<f64>,
}

impl BellConfig {
    /// Unit-weight configuration. All words must have the same length.
    pub fn new(
        stabilizers: Vec<PauliWord>,
        pairs: Vec<(usize, usize)>,
        remainder: Vec<usize>,
        ac: Vec<usize>,
    ) -> Result<Self> {
        let n = stabilizers
            .first()
            .map(|w| w.len())
            .ok_or(Error::InvalidArgument("a configuration needs at least one stabilizer".into()))?;
        if let Some(w) = stabilizers.iter().find(|w| w.len() != n) {
            return Err(Error::LengthMismatch(n, w.len()));
        }
        let mut ac = ac;
        ac.sort_unstable();
        ac.dedup();
        let weights = vec![1.0; stabilizers.len()];
        Ok(BellConfig { n, stabilizers, pairs, remainder, ac, weights })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.stabilizers.len() {
            return Err(Error::LengthMismatch(self.stabilizers.len(), weights.len()));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizer(&self, index: usize) -> &PauliWord {
        &self.stabilizers[index - 1]
    }

    /// Distinct stabilizer indices used by pairs or the remainder, in order of
    /// first appearance (pairs first).
    pub fn used_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let all = self.pairs.iter().flat_map(|&(l, k)| [l, k]).chain(self.remainder.iter().copied());
        for i in all {
            if !out.contains(&i) {
                out.push(i);
            }
        }
        out
    }

    /// The stabilizer set `ST`: every word that enters the expression.
    pub fn used_words(&self) -> Vec<PauliWord> {
        self.used_indices().into_iter().map(|i| self.stabilizers[i - 1]).collect()
    }

    pub fn has_unit_weights(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

/// Lists every broken requirement; an empty list means the configuration is
/// valid.
pub fn validate_config(c: &BellConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = c.stabilizers.len();
    let mut bad_index = false;
    for i in c.pairs.iter().flat_map(|&(l, k)| [l, k]).chain(c.remainder.iter().copied()) {
        if i == 0 || i > m {
            let v = Violation::UnknownStabilizer { index: i };
            if !out.contains(&v) {
                out.push(v);
            }
            bad_index = true;
        }
    }
    for (k, w) in c.weights.iter().enumerate() {
        if !w.is_finite() || *w < 0.0 {
            out.push(Violation::BadWeight { index: k + 1 });
        }
    }
    for &p in &c.ac {
        if p == 0 || p > c.n {
            out.push(Violation::PositionOutOfRange { position: p });
        }
    }
    if bad_index || !out.is_empty() {
        return out;
    }

    for &(l, k) in &c.pairs {
        let (a, b) = (c.stabilizer(l), c.stabilizer(k));
        let anti: Vec<usize> = c.ac.iter().copied().filter(|&p| a.sign_at(p) * b.sign_at(p) == -1).collect();
        match anti.len() {
            0 => out.push(Violation::NoAnticommutingPosition { pair: (l, k) }),
            1 => {}
            _ => out.push(Violation::MultipleAnticommutingPositions { pair: (l, k), positions: anti.clone() }),
        }
        for &p in &c.ac {
            if anti.contains(&p) {
                continue;
            }
            for (idx, w) in [(l, a), (k, b)] {
                if w.sign_at(p) != 0 {
                    out.push(Violation::PairNotIdentity { pair: (l, k), index: idx, position: p });
                }
            }
        }
    }
    for &r in &c.remainder {
        for &p in &c.ac {
            if c.stabilizer(r).sign_at(p) != 0 {
                out.push(Violation::RemainderNotIdentity { index: r, position: p });
            }
        }
    }
    out
}
