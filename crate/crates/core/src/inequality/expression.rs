use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::config::{validate_config, BellConfig};
use crate::pauli::PauliWord;

/// One weighted correlator. `sequence[i]` is the stabilizer entry of party
/// `i + 1`: inside AC a nonzero entry `s` reads `A + s B`, outside AC `+1`
/// reads `A`, `-1` reads `B`, and `0` is the identity everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "w")]
    pub weight: f64,
    #[serde(rename = "seq")]
    pub sequence: Vec<i8>,
}

impl Term {
    pub fn word(&self) -> Result<PauliWord> {
        PauliWord::from_sequence(&self.sequence)
    }

    /// Whether the term has a nonzero entry inside `ac`.
    pub fn touches(&self, ac: &[usize]) -> bool {
        ac.iter().any(|&p| self.sequence[p - 1] != 0)
    }
}

/// An evaluable Bell functional with its claimed classical and quantum bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BellExpression {
    pub n: usize,
    pub ac: Vec<usize>,
    pub terms: Vec<Term>,
    pub beta_c: f64,
    pub beta_q: f64,
    /// `None` when the graph is unknown.
    pub selftest: Option<bool>,
    /// Configuration the expression was built from, if any.
    pub config: Option<BellConfig>,
}

/// Wire form. Field order is fixed for diff-based regression checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionFile {
    pub n: usize,
    pub ac: Vec<usize>,
    pub terms: Vec<Term>,
    pub beta_c: f64,
    pub beta_q: f64,
    pub selftest: Option<bool>,
}

impl BellExpression {
    pub fn in_ac(&self, party: usize) -> bool {
        self.ac.contains(&party)
    }

    /// Two correlators for each term touching AC (they expand `A + s B`), one
    /// for every other term.
    pub fn correlation_count(&self) -> usize {
        self.terms.iter().map(|t| if t.touches(&self.ac) { 2 } else { 1 }).sum()
    }

    pub fn ratio(&self) -> f64 {
        self.beta_q / self.beta_c
    }

    /// Term words, i.e. the stabilizer set the expression is built on.
    pub fn words(&self) -> Result<Vec<PauliWord>> {
        self.terms.iter().map(Term::word).collect()
    }

    pub fn to_file(&self) -> ExpressionFile {
        ExpressionFile {
            n: self.n,
            ac: self.ac.clone(),
            terms: self.terms.clone(),
            beta_c: self.beta_c,
            beta_q: self.beta_q,
            selftest: self.selftest,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("expression serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: ExpressionFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        BellExpression::try_from(f)
    }
}

impl TryFrom<ExpressionFile> for BellExpression {
    type Error = Error;

    fn try_from(f: ExpressionFile) -> Result<Self> {
        for &p in &f.ac {
            if p == 0 || p > f.n {
                return Err(Error::Parse(format!("AC position {p} outside 1..={}", f.n)));
            }
        }
        for t in &f.terms {
            if t.sequence.len() != f.n {
                return Err(Error::Parse(format!("term has {} entries, expected {}", t.sequence.len(), f.n)));
            }
            if t.sequence.iter().any(|s| !matches!(s, -1..=1)) {
                return Err(Error::Parse("sequence entries must be -1, 0 or 1".into()));
            }
            if !t.weight.is_finite() || t.weight < 0.0 {
                return Err(Error::Parse(format!("bad weight {}", t.weight)));
            }
        }
        Ok(BellExpression {
            n: f.n,
            ac: f.ac,
            terms: f.terms,
            beta_c: f.beta_c,
            beta_q: f.beta_q,
            selftest: f.selftest,
            config: None,
        })
    }
}

/// Assembles the expression of a valid configuration.
///
/// Each used stabilizer becomes one term whose weight is its configured weight
/// times the number of times it occurs in pairs and the remainder. With unit
/// weights the bounds are `2|P| + |R|` and `2 sqrt 2 |P| + |R|`. Otherwise
/// the paired terms are grouped by their pivot position `T` and each group
/// contributes `2 max(W+, W-)` classically and `sqrt 2 (W+ + W-)` quantumly,
/// `W±` being the total weight with `s_T = ±1`.
pub fn build_expression(c: &BellConfig) -> Result<BellExpression> {
    let violations = validate_config(c);
    if !violations.is_empty() {
        return Err(Error::InvalidConfig(violations));
    }
    let mut coefficient: BTreeMap<usize, f64> = BTreeMap::new();
    for &(l, k) in &c.pairs {
        *coefficient.entry(l).or_default() += c.weights[l - 1];
        *coefficient.entry(k).or_default() += c.weights[k - 1];
    }
    for &r in &c.remainder {
        *coefficient.entry(r).or_default() += c.weights[r - 1];
    }
    let terms: Vec<Term> = c
        .used_indices()
        .into_iter()
        .map(|i| Term { weight: coefficient[&i], sequence: c.stabilizer(i).sequence() })
        .collect();

    let (beta_c, beta_q) = if c.has_unit_weights() {
        let p = c.pairs.len() as f64;
        let r = c.remainder.len() as f64;
        (2.0 * p + r, 2.0 * SQRT_2 * p + r)
    } else {
        weighted_bounds(c, &coefficient)
    };

    Ok(BellExpression { n: c.n(), ac: c.ac.clone(), terms, beta_c, beta_q, selftest: None, config: Some(c.clone()) })
}

fn weighted_bounds(c: &BellConfig, coefficient: &BTreeMap<usize, f64>) -> (f64, f64) {
    // pivot position -> (W+, W-)
    let mut groups: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut paired: Vec<usize> = c.pairs.iter().flat_map(|&(l, k)| [l, k]).collect();
    paired.sort_unstable();
    paired.dedup();
    for i in paired {
        let w = c.stabilizer(i);
        let pivot = c.ac.iter().copied().find(|&p| w.sign_at(p) != 0).expect("validated pair has a pivot");
        let entry = groups.entry(pivot).or_default();
        if w.sign_at(pivot) > 0 {
            entry.0 += coefficient[&i];
        } else {
            entry.1 += coefficient[&i];
        }
    }
    let rest: f64 = c.remainder.iter().map(|r| c.weights[r - 1]).sum();
    let beta_c = groups.values().map(|(p, m)| 2.0 * p.max(*m)).sum::<f64>() + rest;
    let beta_q = groups.values().map(|(p, m)| SQRT_2 * (p + m)).sum::<f64>() + rest;
    (beta_c, beta_q)
}

impl fmt::Display for BellExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if t.weight != 1.0 {
                write!(f, "{}", t.weight)?;
            }
            write!(f, "<")?;
            let mut empty = true;
            for (i, &s) in t.sequence.iter().enumerate() {
                let party = i + 1;
                let factor = match (self.in_ac(party), s) {
                    (_, 0) => continue,
                    (true, 1) => format!("(A{party}+B{party})"),
                    (true, _) => format!("(A{party}-B{party})"),
                    (false, 1) => format!("A{party}"),
                    (false, _) => format!("B{party}"),
                };
                write!(f, "{factor}")?;
                empty = false;
            }
            if empty {
                write!(f, "I")?;
            }
            write!(f, ">")?;
        }
        write!(f, " <= {}", self.beta_c)
    }
}
