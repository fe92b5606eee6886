//! Named constructions for the 3-qubit GHZ (path form), 4-qubit GHZ (star
//! form) and 4-qubit 1-D cluster states.
//!
//! Stabilizer numbering per family:
//!
//! | family     | graph        | S1..S4          | S5    | S6    |
//! |------------|--------------|-----------------|-------|-------|
//! | `ghz3`     | path 1-2-3   | G1, G2, G3, G1G3 | -    | -     |
//! | `ghz4`     | star at 1    | G1..G4          | G2G3  | G2G4  |
//! | `cluster4` | path 1-2-3-4 | G1..G4          | G1G3  | G2G4  |

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inequality::config::BellConfig;
use crate::inequality::expression::{build_expression, BellExpression};
use crate::inequality::selftest::is_selftesting;
use crate::pauli::{generators, PauliWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ghz3,
    Ghz4,
    Cluster4,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Ghz3, Family::Ghz4, Family::Cluster4];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ghz3 => "ghz3",
            Family::Ghz4 => "ghz4",
            Family::Cluster4 => "cluster4",
        }
    }

    pub fn graph(self) -> Graph {
        match self {
            Family::Ghz3 => Graph::cluster1d(3),
            Family::Ghz4 => Graph::ghz(4),
            Family::Cluster4 => Graph::cluster1d(4),
        }
        .expect("built-in graphs are valid")
    }

    pub fn stabilizers(self) -> Vec<PauliWord> {
        let g = generators(&self.graph());
        let prod = |a: usize, b: usize| g[a - 1].multiply(&g[b - 1]).expect("same-colour product");
        let mut out = g.clone();
        match self {
            Family::Ghz3 => out.push(prod(1, 3)),
            Family::Ghz4 => out.extend([prod(2, 3), prod(2, 4)]),
            Family::Cluster4 => out.extend([prod(1, 3), prod(2, 4)]),
        }
        out
    }

    /// Family for a graph shorthand or a graph equal to the family's graph.
    /// `ghz:3` maps to the path-form `ghz3` family.
    pub fn for_graph(descriptor: Option<&str>, g: &Graph) -> Option<Family> {
        match descriptor {
            Some("ghz:3") => return Some(Family::Ghz3),
            Some("ghz:4") => return Some(Family::Ghz4),
            Some("cluster1d:4") => return Some(Family::Cluster4),
            _ => {}
        }
        Family::ALL.into_iter().find(|f| f.graph() == *g)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogueEntry {
    pub family: Family,
    /// Construction number within the family (1-4).
    pub index: usize,
    pub ac: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub remainder: Vec<usize>,
    /// Quantum-to-classical ratio as printed, e.g. `(2√2+1)/3`.
    pub ratio_label: &'static str,
    pub ratio: f64,
}

impl CatalogueEntry {
    pub fn name(&self) -> String {
        format!("{}:{}", self.family, self.index)
    }

    pub fn graph(&self) -> Graph {
        self.family.graph()
    }

    pub fn config(&self) -> BellConfig {
        BellConfig::new(self.family.stabilizers(), self.pairs.clone(), self.remainder.clone(), self.ac.clone())
            .expect("catalogue configurations are well-formed")
    }

    pub fn expression(&self) -> BellExpression {
        let config = self.config();
        let mut e = build_expression(&config).expect("catalogue configurations are valid");
        e.selftest = Some(is_selftesting(&config, &self.graph()).is_selftesting());
        e
    }

    pub fn is_single_pair(&self) -> bool {
        self.pairs.len() == 1
    }
}

fn entry(
    family: Family,
    index: usize,
    ac: &[usize],
    pairs: &[(usize, usize)],
    remainder: &[usize],
    ratio_label: &'static str,
    ratio: f64,
) -> CatalogueEntry {
    CatalogueEntry {
        family,
        index,
        ac: ac.to_vec(),
        pairs: pairs.to_vec(),
        remainder: remainder.to_vec(),
        ratio_label,
        ratio,
    }
}

/// All twelve named constructions.
pub fn catalogue() -> Vec<CatalogueEntry> {
    use Family::*;
    let single = (SQRT_2 + 1.0) / 2.0;
    let double = (4.0 * SQRT_2 + 1.0) / 5.0;
    vec![
        entry(Ghz3, 1, &[1], &[(1, 2)], &[3], "(2√2+1)/3", (2.0 * SQRT_2 + 1.0) / 3.0),
        entry(Ghz3, 2, &[1], &[(1, 2), (2, 4)], &[3], "(4√2+1)/5", double),
        entry(Ghz3, 3, &[1], &[(1, 2), (2, 4)], &[], "√2", SQRT_2),
        entry(Ghz3, 4, &[2], &[(1, 2), (2, 3)], &[], "√2", SQRT_2),
        entry(Ghz4, 1, &[1], &[(1, 2)], &[5, 6], "(√2+1)/2", single),
        entry(Ghz4, 2, &[2], &[(1, 2)], &[3, 4], "(√2+1)/2", single),
        entry(Ghz4, 3, &[1], &[(1, 2), (1, 3)], &[6], "(4√2+1)/5", double),
        entry(Ghz4, 4, &[1], &[(1, 2), (1, 3), (1, 4)], &[], "√2", SQRT_2),
        entry(Cluster4, 1, &[1], &[(1, 2)], &[3, 4], "(√2+1)/2", single),
        entry(Cluster4, 2, &[2], &[(1, 2), (2, 3)], &[4], "(4√2+1)/5", double),
        entry(Cluster4, 3, &[1], &[(1, 2), (5, 6)], &[], "√2", SQRT_2),
        entry(Cluster4, 4, &[2], &[(1, 2), (3, 6)], &[], "√2", SQRT_2),
    ]
}

/// Looks up `"<family>:<index>"`, e.g. `"cluster4:2"`.
pub fn lookup(name: &str) -> Result<CatalogueEntry> {
    catalogue().into_iter().find(|e| e.name() == name).ok_or_else(|| Error::UnknownCatalogue(name.to_string()))
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownCatalogue(s.to_string()))
    }
}
