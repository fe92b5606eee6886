//! Proper vertex colourings.
//!
//! Up to [`EXACT_COLORING_LIMIT`] vertices the colouring is a minimum one,
//! found by backtracking over increasing colour counts. Larger graphs get a
//! greedy colouring flagged as possibly non-minimal.

use crate::graph::{bits, Graph};

pub const EXACT_COLORING_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    /// Colour classes, each sorted, ordered by their smallest vertex.
    pub classes: Vec<Vec<usize>>,
    /// True when the number of classes is the chromatic number.
    pub minimal: bool,
}

impl Coloring {
    pub fn num_colors(&self) -> usize {
        self.classes.len()
    }

    /// Index of the class containing `v`.
    pub fn class_of(&self, v: usize) -> usize {
        self.classes.iter().position(|c| c.contains(&v)).expect("every vertex is coloured")
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        let mut seen = vec![false; g.n()];
        for class in &self.classes {
            for &v in class {
                if v == 0 || v > g.n() || seen[v - 1] {
                    return false;
                }
                seen[v - 1] = true;
            }
            for (a, &u) in class.iter().enumerate() {
                if class[a + 1..].iter().any(|&v| g.are_adjacent(u, v)) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn from_assignment(colors: &[usize]) -> Vec<Vec<usize>> {
        let k = colors.iter().max().map_or(0, |m| m + 1);
        let mut classes = vec![Vec::new(); k];
        for (v, &c) in colors.iter().enumerate() {
            classes[c].push(v + 1);
        }
        classes.retain(|c| !c.is_empty());
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

pub fn color_classes(g: &Graph) -> Coloring {
    if g.n() <= EXACT_COLORING_LIMIT {
        for k in 1..=g.n() {
            let mut colors = vec![usize::MAX; g.n()];
            if backtrack(g, 0, k, 0, &mut colors) {
                return Coloring { classes: Coloring::from_assignment(&colors), minimal: true };
            }
        }
        unreachable!("n colours always suffice");
    }
    Coloring { classes: Coloring::from_assignment(&greedy(g)), minimal: false }
}

// Vertices are coloured in index order; vertex v may open at most one new
// colour, which removes colour-permutation symmetry.
fn backtrack(g: &Graph, v: usize, k: usize, used: usize, colors: &mut [usize]) -> bool {
    if v == g.n() {
        return true;
    }
    let limit = (used + 1).min(k);
    for c in 0..limit {
        let clash = bits(g.neighbor_mask(v + 1)).into_iter().any(|u| u - 1 < v && colors[u - 1] == c);
        if clash {
            continue;
        }
        colors[v] = c;
        if backtrack(g, v + 1, k, used.max(c + 1), colors) {
            return true;
        }
    }
    colors[v] = usize::MAX;
    false
}

fn greedy(g: &Graph) -> Vec<usize> {
    let mut colors = vec![usize::MAX; g.n()];
    for v in 0..g.n() {
        let taken: Vec<usize> = bits(g.neighbor_mask(v + 1)).into_iter().map(|u| colors[u - 1]).collect();
        colors[v] = (0..).find(|c| !taken.contains(c)).unwrap();
    }
    colors
}

/// Finds a vertex adjacent to every colour class other than its own,
/// recolouring when none exists.
///
/// When no such vertex exists, a class not adjacent to the vertex with the
/// most distinct neighbour colours can be dissolved into the other classes,
/// which strictly lowers the colour count; the search repeats until a
/// dominating vertex appears. Returns the (possibly updated) colouring and
/// the smallest such vertex.
pub fn dominating_vertex(g: &Graph, coloring: &Coloring) -> (Coloring, usize) {
    let mut classes = coloring.classes.clone();
    let mut minimal = coloring.minimal;
    loop {
        let masks: Vec<u64> = classes.iter().map(|c| mask_of(c)).collect();
        let own = |v: usize| masks.iter().position(|m| m >> (v - 1) & 1 == 1).unwrap();
        let reach = |v: usize| {
            let nb = g.neighbor_mask(v);
            masks.iter().filter(|&&m| m & nb != 0).count()
        };
        if let Some(v) = (1..=g.n()).find(|&v| reach(v) == classes.len() - 1) {
            return (Coloring { classes, minimal }, v);
        }
        let best = (1..=g.n()).max_by_key(|&v| (reach(v), std::cmp::Reverse(v))).unwrap();
        let nb = g.neighbor_mask(best);
        let target = (0..classes.len())
            .find(|&k| k != own(best) && masks[k] & nb == 0)
            .expect("a non-dominating vertex misses some class");
        let members = classes[target].clone();
        for v in members {
            let vnb = g.neighbor_mask(v);
            let dest = (0..classes.len()).find(|&k| k != target && mask_of(&classes[k]) & vnb == 0);
            match dest {
                Some(k) => {
                    classes[target].retain(|&u| u != v);
                    classes[k].push(v);
                    classes[k].sort_unstable();
                }
                None => {
                    // v already sees every other class.
                    classes.retain(|c| !c.is_empty());
                    classes.sort_by_key(|c| c[0]);
                    return (Coloring { classes, minimal }, v);
                }
            }
        }
        classes.retain(|c| !c.is_empty());
        classes.sort_by_key(|c| c[0]);
        // Fewer colours than before: a "minimal" input could not get here.
        minimal = false;
    }
}

fn mask_of(class: &[usize]) -> u64 {
    class.iter().fold(0, |m, &v| m | 1 << (v - 1))
}
