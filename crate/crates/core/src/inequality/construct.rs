//! Builders that pick `P`, `R` and `AC` automatically.

use crate::coloring::{color_classes, dominating_vertex};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inequality::config::{validate_config, BellConfig};
use crate::inequality::expression::{build_expression, BellExpression};
use crate::inequality::selftest::is_selftesting;
use crate::pauli::{generators, PauliWord};

/// Splits `st` around one anticommuting position.
///
/// Takes the first pairable pair in index order and its smallest
/// anticommuting position `T`, then sorts every stabilizer by its entry at
/// `T`: `+1` and `-1` stabilizers are paired off, the first element of the
/// shorter side being reused, and the `0` ones form the remainder.
pub fn find_suitable_ac(st: &[PauliWord]) -> Result<BellConfig> {
    let mut pivot = None;
    'outer: for (a, wa) in st.iter().enumerate() {
        for wb in &st[a + 1..] {
            if let Some(&t) = wa.anticommuting_positions(wb).first() {
                pivot = Some(t);
                break 'outer;
            }
        }
    }
    let t = pivot.ok_or(Error::NoPairablePair)?;
    let by_sign = |s: i8| -> Vec<usize> {
        st.iter().enumerate().filter(|(_, w)| w.sign_at(t) == s).map(|(i, _)| i + 1).collect()
    };
    let (plus, minus, zero) = (by_sign(1), by_sign(-1), by_sign(0));
    let pairs = (0..plus.len().max(minus.len()))
        .map(|i| (*plus.get(i).unwrap_or(&plus[0]), *minus.get(i).unwrap_or(&minus[0])))
        .collect();
    let config = BellConfig::new(st.to_vec(), pairs, zero, vec![t])?;
    debug_assert!(validate_config(&config).is_empty());
    Ok(config)
}

/// Automatic-AC expression for a graph's stabilizer list, tagged with its
/// self-testing verdict.
pub fn auto_expression(g: &Graph, st: &[PauliWord]) -> Result<BellExpression> {
    let config = find_suitable_ac(st)?;
    let mut e = build_expression(&config)?;
    e.selftest = Some(is_selftesting(&config, g).is_selftesting());
    Ok(e)
}

/// Ratio-`sqrt 2` expression with `2N` correlators that self-tests any
/// connected graph state.
///
/// Colours the graph, takes a vertex `d` adjacent to every other colour class
/// and its class `C1`, and builds
/// `P1 = {G_d} ∪ {G_d G_j : j ∈ C1 \ d}` and, per other class `Ck` with a
/// chosen neighbour `v_k ∈ Ck ∩ n_d`,
/// `Pk = {G_i : i ∈ Ck ∩ n_d} ∪ {G_vk G_j : j ∈ Ck \ n_d}`.
/// Everything in `P1` has `X` at `d`, everything else `Z`, so with
/// `AC = {d}` all cross pairs are valid. The two sides are zipped and the
/// surplus of the larger side is paired with one reused stabilizer of the
/// smaller side (`S^1` when `2|C1| <= N`, `S^N` otherwise).
pub fn constant_ratio_expression(g: &Graph) -> Result<BellExpression> {
    let config = constant_ratio_config(g)?;
    let mut e = build_expression(&config)?;
    e.selftest = Some(is_selftesting(&config, g).is_selftesting());
    Ok(e)
}

pub fn constant_ratio_config(g: &Graph) -> Result<BellConfig> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.n() < 2 {
        return Err(Error::NoPairablePair);
    }
    let gens = generators(g);
    let gen = |v: usize| gens[v - 1];
    let (coloring, d) = dominating_vertex(g, &color_classes(g));
    let own = coloring.class_of(d);
    let nd = g.neighbor_mask(d);
    let adjacent = |v: usize| nd >> (v - 1) & 1 == 1;

    let mut plus = vec![gen(d)];
    for &j in coloring.classes[own].iter().filter(|&&j| j != d) {
        plus.push(gen(d).multiply(&gen(j))?);
    }
    let mut minus = Vec::new();
    for (k, class) in coloring.classes.iter().enumerate() {
        if k == own {
            continue;
        }
        let near: Vec<usize> = class.iter().copied().filter(|&v| adjacent(v)).collect();
        let anchor = *near.first().expect("dominating vertex sees every class");
        minus.extend(near.iter().map(|&i| gen(i)));
        for &j in class.iter().filter(|&&j| !adjacent(j)) {
            minus.push(gen(anchor).multiply(&gen(j))?);
        }
    }

    let n = g.n();
    let c1 = plus.len();
    let mut stabilizers = plus;
    stabilizers.extend(minus);
    let plus_idx: Vec<usize> = (1..=c1).collect();
    let minus_idx: Vec<usize> = (c1 + 1..=n).collect();
    let pairs: Vec<(usize, usize)> = if 2 * c1 <= n {
        // reuse S^1 for the surplus of minus-side stabilizers
        (0..minus_idx.len()).map(|i| (*plus_idx.get(i).unwrap_or(&1), minus_idx[i])).collect()
    } else {
        (0..plus_idx.len()).map(|i| (plus_idx[i], *minus_idx.get(i).unwrap_or(&n))).collect()
    };
    BellConfig::new(stabilizers, pairs, vec![], vec![d])
}

/// Single-pair inequality: one pair plus remainder terms, classical bound
/// `2 + |R|`.
pub fn single_pair_expression(
    g: &Graph,
    stabilizers: &[PauliWord],
    pair: (usize, usize),
    remainder: &[usize],
    ac: &[usize],
) -> Result<BellExpression> {
    if stabilizers.iter().any(|w| w.len() != g.n()) {
        return Err(Error::PartyMismatch { expected: g.n(), found: stabilizers[0].len() });
    }
    let config = BellConfig::new(stabilizers.to_vec(), vec![pair], remainder.to_vec(), ac.to_vec())?;
    let mut e = build_expression(&config)?;
    e.selftest = Some(is_selftesting(&config, g).is_selftesting());
    Ok(e)
}
