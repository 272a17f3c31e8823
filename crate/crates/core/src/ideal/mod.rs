//! Ideal edges at a vertex with half-edges H = {a₁, ā₁, .., a_r, ā_r, b₁, .., b_s},
//! the complexes B(v) (all ideal edges) and L(v) (legal ones), their reduced
//! homology, and a Morse-collapse certificate for contractibility of L(r,s).
//!
//! Half-edge ids: aᵢ = 2(i−1), āᵢ = 2(i−1)+1, bⱼ = 2r + j − 1. The basepoint is
//! a₁ = 0 and every ideal edge is stored by its inside, the side holding it.

pub mod homology;
mod morse;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

pub use homology::{reduced_homology, Homology, MAX_HOMOLOGY_SIMPLICES};
pub use morse::{morse_collapse_certificate, MorseCertificate, TieOrder};

/// Largest |H| handled.
pub const MAX_HALF_EDGES: usize = 10;
/// Largest number of simplices a complex may have.
pub const MAX_SIMPLICES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("|H| = {0} exceeds the cap of {MAX_HALF_EDGES}")]
    TooManyHalfEdges(usize),
    #[error("|H| = {0} is below 4; there are no ideal edges")]
    TooFewHalfEdges(usize),
    #[error("complex has more than {0} simplices")]
    TooManySimplices(usize),
    #[error("the argument needs r >= 2 (got r = {0})")]
    HypothesisViolated(usize),
    #[error("expected the legal complex L({r},{s})")]
    WrongComplex { r: usize, s: usize },
}

/// Subsets of H as bitmasks.
pub type Mask = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct HalfEdgeSet {
    pub r: usize,
    pub s: usize,
}

impl HalfEdgeSet {
    pub fn new(r: usize, s: usize) -> Result<Self, IdealError> {
        let h = 2 * r + s;
        if h > MAX_HALF_EDGES {
            return Err(IdealError::TooManyHalfEdges(h));
        }
        Ok(Self { r, s })
    }

    pub fn len(&self) -> usize {
        2 * self.r + self.s
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn full(&self) -> Mask {
        ((1u32 << self.len()) - 1) as Mask
    }

    pub fn basepoint(&self) -> usize {
        0
    }

    /// The half-edge paired with `x`, if any.
    pub fn partner(&self, x: usize) -> Option<usize> {
        (x < 2 * self.r).then_some(x ^ 1)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..self.r).map(|i| (2 * i, 2 * i + 1))
    }

    pub fn name(&self, x: usize) -> String {
        if x < 2 * self.r {
            let i = x / 2 + 1;
            if x % 2 == 0 {
                format!("a{i}")
            } else {
                format!("abar{i}")
            }
        } else {
            format!("b{}", x - 2 * self.r + 1)
        }
    }

    pub fn names(&self, mask: Mask) -> Vec<String> {
        (0..self.len()).filter(|&x| mask >> x & 1 == 1).map(|x| self.name(x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealEdge {
    pub inside: Mask,
}

impl IdealEdge {
    pub fn size(&self) -> usize {
        self.inside.count_ones() as usize
    }

    pub fn outside(&self, h: &HalfEdgeSet) -> Mask {
        h.full() & !self.inside
    }

    /// Number of pairs (aᵢ, āᵢ) with exactly one member inside.
    pub fn split_pairs(&self, h: &HalfEdgeSet) -> usize {
        h.pairs()
            .filter(|&(x, y)| (self.inside >> x & 1) != (self.inside >> y & 1))
            .count()
    }

    pub fn is_legal(&self, h: &HalfEdgeSet) -> bool {
        self.split_pairs(h) <= 1
    }
}

/// All bipartitions of H with both sides of size at least 2, optionally only
/// the legal ones, ordered by inside mask.
pub fn enumerate_ideal_edges(h: &HalfEdgeSet, legal_only: bool) -> Vec<IdealEdge> {
    let n = h.len();
    if n < 4 {
        return Vec::new();
    }
    (0..=h.full())
        .filter(|m| m & 1 == 1)
        .map(|inside| IdealEdge { inside })
        .filter(|e| e.size() >= 2 && e.size() <= n - 2)
        .filter(|e| !legal_only || e.is_legal(h))
        .collect()
}

/// Non-crossing: some side of α is disjoint from some side of β.
pub fn compatible(h: &HalfEdgeSet, x: &IdealEdge, y: &IdealEdge) -> bool {
    let full = h.full();
    let (i, j) = (x.inside, y.inside);
    let (io, jo) = (full & !i, full & !j);
    i & jo == 0 || io & j == 0 || io & jo == 0 || i & j == 0
}

/// A flag complex on ideal edges; simplices are sorted vertex-index lists,
/// grouped by dimension.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    pub half_edges: HalfEdgeSet,
    pub legal_only: bool,
    pub vertices: Vec<IdealEdge>,
    pub adjacency: Vec<Vec<bool>>,
    pub simplices: Vec<Vec<Vec<u32>>>,
}

impl SimplicialComplex {
    /// -1 for the empty complex.
    pub fn dim(&self) -> isize {
        self.simplices.len() as isize - 1
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v]
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a)
            .map(|(u, _)| u)
    }

    /// Simplices not contained in a larger one.
    pub fn maximal_simplices(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for layer in &self.simplices {
            for s in layer {
                let extendable = (0..self.vertices.len()).any(|v| {
                    !s.contains(&(v as u32)) && s.iter().all(|&u| self.adjacency[u as usize][v])
                });
                if !extendable {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    pub fn to_json(&self, homology: Option<&Homology>) -> serde_json::Value {
        let h = &self.half_edges;
        let vertices: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .map(|e| {
                serde_json::json!({
                    "inside": h.names(e.inside),
                    "outside": h.names(e.outside(h)),
                    "size": e.size(),
                    "legal": e.is_legal(h),
                })
            })
            .collect();
        let mut out = serde_json::json!({
            "r": h.r,
            "s": h.s,
            "half_edges": (0..h.len()).map(|x| h.name(x)).collect::<Vec<_>>(),
            "legal_only": self.legal_only,
            "dim": self.dim(),
            "f_vector": self.f_vector(),
            "vertices": vertices,
            "maximal_simplices": self.maximal_simplices(),
        });
        if let Some(hom) = homology {
            out["homology"] = serde_json::to_value(hom).expect("serializable");
        }
        out
    }
}

/// Flag complex on the (legal) ideal edges of H.
pub fn build_complex(h: &HalfEdgeSet, legal_only: bool) -> Result<SimplicialComplex, IdealError> {
    if h.len() > MAX_HALF_EDGES {
        return Err(IdealError::TooManyHalfEdges(h.len()));
    }
    if h.len() < 4 {
        return Err(IdealError::TooFewHalfEdges(h.len()));
    }
    let vertices = enumerate_ideal_edges(h, legal_only);
    let n = vertices.len();
    let adjacency: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && compatible(h, &vertices[i], &vertices[j]))
                .collect()
        })
        .collect();
    let mut simplices: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut count = 0usize;
    let mut stack: Vec<u32> = Vec::new();
    for v in 0..n {
        let cands: Vec<usize> = (v + 1..n).filter(|&u| adjacency[v][u]).collect();
        stack.push(v as u32);
        extend_cliques(&adjacency, &mut stack, &cands, &mut simplices, &mut count)?;
        stack.pop();
    }
    Ok(SimplicialComplex {
        half_edges: *h,
        legal_only,
        vertices,
        adjacency,
        simplices,
    })
}

fn extend_cliques(
    adj: &[Vec<bool>],
    stack: &mut Vec<u32>,
    cands: &[usize],
    out: &mut Vec<Vec<Vec<u32>>>,
    count: &mut usize,
) -> Result<(), IdealError> {
    let d = stack.len() - 1;
    if out.len() <= d {
        out.push(Vec::new());
    }
    out[d].push(stack.clone());
    *count += 1;
    if *count > MAX_SIMPLICES {
        return Err(IdealError::TooManySimplices(MAX_SIMPLICES));
    }
    for (i, &u) in cands.iter().enumerate() {
        let next: Vec<usize> = cands[i + 1..].iter().copied().filter(|&w| adj[u][w]).collect();
        stack.push(u as u32);
        extend_cliques(adj, stack, &next, out, count)?;
        stack.pop();
    }
    Ok(())
}

/// Leaf-labelled trivalent trees on `n ≥ 3` leaves, each given by the set of
/// splits of its internal edges (as insides containing leaf 0).
pub fn trivalent_tree_splits(n: usize) -> Vec<BTreeSet<Mask>> {
    assert!((3..=MAX_HALF_EDGES).contains(&n));
    // node ids: leaves 0..n, internal nodes after; start from the 3-star
    let center = n;
    let start: Vec<(usize, usize)> = vec![(0, center), (1, center), (2, center)];
    let mut trees = vec![(start, n + 1)];
    for leaf in 3..n {
        let mut next = Vec::with_capacity(trees.len() * (2 * leaf - 3));
        for (edges, fresh) in &trees {
            for k in 0..edges.len() {
                let (x, y) = edges[k];
                let mut e = edges.clone();
                e[k] = (x, *fresh);
                e.push((*fresh, y));
                e.push((leaf, *fresh));
                next.push((e, fresh + 1));
            }
        }
        trees = next;
    }
    let full = ((1u32 << n) - 1) as Mask;
    trees
        .into_iter()
        .map(|(edges, _)| {
            let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &(x, y) in &edges {
                adj.entry(x).or_default().push(y);
                adj.entry(y).or_default().push(x);
            }
            edges
                .iter()
                .filter(|&&(x, y)| x >= n && y >= n)
                .map(|&(x, y)| {
                    let side = leaves_beyond(&adj, y, x, n);
                    if side & 1 == 1 {
                        side
                    } else {
                        full & !side
                    }
                })
                .collect()
        })
        .collect()
}

fn leaves_beyond(adj: &BTreeMap<usize, Vec<usize>>, start: usize, from: usize, n: usize) -> Mask {
    let mut mask = 0;
    let mut stack = vec![(start, from)];
    while let Some((v, p)) = stack.pop() {
        if v < n {
            mask |= 1 << v;
        }
        for &w in &adj[&v] {
            if w != p {
                stack.push((w, v));
            }
        }
    }
    mask
}

/// Compares the maximal simplices of B(v) with the trivalent trees on H.
/// Returns the number of trees when they agree.
pub fn check_against_trees(c: &SimplicialComplex) -> Result<usize, String> {
    let h = &c.half_edges;
    let trees: BTreeSet<BTreeSet<Mask>> = trivalent_tree_splits(h.len()).into_iter().collect();
    let simplices: BTreeSet<BTreeSet<Mask>> = c
        .maximal_simplices()
        .into_iter()
        .map(|s| s.iter().map(|&v| c.vertices[v as usize].inside).collect())
        .collect();
    if trees == simplices {
        Ok(trees.len())
    } else {
        Err(format!(
            "{} trees vs {} maximal simplices",
            trees.len(),
            simplices.len()
        ))
    }
}

/// Pairs of splits that occur together in some trivalent tree.
pub fn tree_compatible_pairs(n: usize) -> HashMap<(Mask, Mask), bool> {
    let mut out = HashMap::new();
    for tree in trivalent_tree_splits(n) {
        for &x in &tree {
            for &y in &tree {
                out.insert((x, y), true);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(r: usize, s: usize) -> HalfEdgeSet {
        HalfEdgeSet::new(r, s).unwrap()
    }

    fn edge(h: &HalfEdgeSet, names: &[&str]) -> IdealEdge {
        let mut inside = 0;
        for n in names {
            let x = (0..h.len()).find(|&x| h.name(x) == *n).unwrap();
            inside |= 1 << x;
        }
        IdealEdge { inside }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_ideal_edges(&h(2, 0), false).len(), 3);
        let legal = enumerate_ideal_edges(&h(2, 0), true);
        assert_eq!(legal, vec![edge(&h(2, 0), &["a1", "abar1"])]);
        assert_eq!(enumerate_ideal_edges(&h(2, 1), false).len(), 10);
        assert_eq!(enumerate_ideal_edges(&h(2, 1), true).len(), 6);
        let star = enumerate_ideal_edges(&h(0, 4), true);
        assert_eq!(star.len(), 3);
        assert!(enumerate_ideal_edges(&h(1, 1), false).is_empty());
        assert!(HalfEdgeSet::new(3, 5).is_err());
    }

    #[test]
    fn compatibility_examples() {
        let x = h(2, 1);
        assert!(compatible(&x, &edge(&x, &["a1", "abar1"]), &edge(&x, &["a1", "abar1", "b1"])));
        let y = h(2, 0);
        assert!(!compatible(&y, &edge(&y, &["a1", "abar1"]), &edge(&y, &["a1", "a2"])));
        for e in enumerate_ideal_edges(&x, false) {
            assert!(compatible(&x, &e, &e));
        }
    }

    #[test]
    fn legality_predicate() {
        for (r, s) in [(2, 0), (2, 1), (3, 0), (3, 2), (4, 1)] {
            let x = h(r, s);
            let all = enumerate_ideal_edges(&x, false);
            let legal: BTreeSet<IdealEdge> = enumerate_ideal_edges(&x, true).into_iter().collect();
            for e in all {
                assert_eq!(legal.contains(&e), e.split_pairs(&x) <= 1);
            }
        }
    }

    #[test]
    fn small_complexes() {
        let b4 = build_complex(&h(0, 4), false).unwrap();
        assert_eq!(b4.f_vector(), [3]);
        let b5 = build_complex(&h(0, 5), false).unwrap();
        assert_eq!(b5.f_vector(), [10, 15]);
        let l20 = build_complex(&h(2, 0), true).unwrap();
        assert_eq!(l20.f_vector(), [1]);
        assert_eq!(build_complex(&h(1, 1), true).unwrap_err(), IdealError::TooFewHalfEdges(3));
    }

    #[test]
    fn trees_match_maximal_simplices() {
        let expected = [(4, 3), (5, 15), (6, 105), (7, 945)];
        for (n, count) in expected {
            assert_eq!(trivalent_tree_splits(n).len(), count);
            let b = build_complex(&h(0, n), false).unwrap();
            assert_eq!(check_against_trees(&b), Ok(count));
            // a maximal simplex is a tree's n − 3 internal edges
            assert!(b.maximal_simplices().iter().all(|m| m.len() == n - 3));
            assert_eq!(b.dim(), n as isize - 4);
        }
        // the labelling of pairs does not change B(v)
        let b = build_complex(&h(2, 2), false).unwrap();
        assert_eq!(check_against_trees(&b), Ok(105));
    }

    #[test]
    fn compatibility_matches_trees() {
        for n in 4..=7 {
            let x = h(0, n);
            let together = tree_compatible_pairs(n);
            let all = enumerate_ideal_edges(&x, false);
            for a in &all {
                for b in &all {
                    assert_eq!(
                        compatible(&x, a, b),
                        together.contains_key(&(a.inside, b.inside)),
                        "{:?} {:?}",
                        x.names(a.inside),
                        x.names(b.inside)
                    );
                }
            }
        }
    }
}
