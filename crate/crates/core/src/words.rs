//! Words in the right-angled Artin group A_Γ: generators are the nodes of Γ
//! and two generators commute exactly when they span an edge.
//!
//! Reduction uses the shuffle-cancellation criterion (a word is geodesic iff
//! no letter can be shuffled next to its inverse), and equality is decided by
//! reducing `w₁·w₂⁻¹`, cross-checked against the lexicographic normal form of
//! the reduced trace.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{DefiningGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter `{0}` is not a node of the graph")]
    UnknownLetter(String),
    #[error("node id {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("bad exponent in `{0}`")]
    BadExponent(String),
    #[error("words belong to different groups")]
    ContextMismatch,
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub node: NodeId,
    pub inverse: bool,
}

impl Letter {
    pub fn new(node: NodeId, inverse: bool) -> Self {
        Self { node, inverse }
    }

    pub fn inv(self) -> Self {
        Self {
            node: self.node,
            inverse: !self.inverse,
        }
    }
}

/// A word over the generators of A_Γ. Words carry no reference to Γ; all
/// group operations go through a [`Raag`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RaagWord {
    letters: Vec<Letter>,
}

impl RaagWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn generator(v: NodeId) -> Self {
        Self {
            letters: vec![Letter::new(v, false)],
        }
    }

    /// `v^exp`, expanded into ±1 letters.
    pub fn power(v: NodeId, exp: i64) -> Self {
        let letter = Letter::new(v, exp < 0);
        Self {
            letters: vec![letter; exp.unsigned_abs() as usize],
        }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn push(&mut self, l: Letter) {
        self.letters.push(l);
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &RaagWord) -> RaagWord {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }

    /// `g · self · g⁻¹`, unreduced.
    pub fn conjugated_by(&self, g: &RaagWord) -> RaagWord {
        g.concat(self).concat(&g.inverse())
    }

    /// Letters with nodes outside `keep` deleted.
    pub fn retract(&self, keep: impl Fn(NodeId) -> bool) -> RaagWord {
        Self {
            letters: self.letters.iter().copied().filter(|l| keep(l.node)).collect(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.letters.iter().map(|l| l.node)
    }
}

impl Mul for &RaagWord {
    type Output = RaagWord;

    fn mul(self, rhs: &RaagWord) -> RaagWord {
        self.concat(rhs)
    }
}

/// The group A_Γ. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Raag {
    graph: Arc<DefiningGraph>,
    /// Position of each node in name order.
    rank: Arc<Vec<usize>>,
}

impl PartialEq for Raag {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph
    }
}

impl Eq for Raag {}

impl Raag {
    pub fn new(graph: DefiningGraph) -> Self {
        Self::from_arc(Arc::new(graph))
    }

    pub fn from_arc(graph: Arc<DefiningGraph>) -> Self {
        let mut rank = vec![0; graph.node_count()];
        for (i, v) in graph.nodes_by_name().into_iter().enumerate() {
            rank[v] = i;
        }
        Self {
            graph,
            rank: Arc::new(rank),
        }
    }

    /// The free group on `names` (A_Γ for an edgeless Γ).
    pub fn free(names: &[&str]) -> Self {
        Self::new(DefiningGraph::from_edges(names, &[]).expect("valid generator names"))
    }

    pub fn graph(&self) -> &DefiningGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.graph.node_count()
    }

    pub fn check(&self, w: &RaagWord) -> Result<(), WordError> {
        match w.letters.iter().find(|l| l.node >= self.rank()) {
            Some(l) => Err(WordError::NodeOutOfRange(l.node)),
            None => Ok(()),
        }
    }

    /// Two generators commute iff equal or adjacent.
    pub fn commute(&self, a: NodeId, b: NodeId) -> bool {
        a == b || self.graph.adjacent(a, b)
    }

    fn letter_cmp(&self, a: Letter, b: Letter) -> Ordering {
        self.rank[a.node]
            .cmp(&self.rank[b.node])
            .then(a.inverse.cmp(&b.inverse))
    }

    /// A reduced (geodesic) word equal to `w`.
    pub fn reduce(&self, w: &RaagWord) -> Result<RaagWord, WordError> {
        self.check(w)?;
        Ok(self.reduce_unchecked(w))
    }

    pub(crate) fn reduce_unchecked(&self, w: &RaagWord) -> RaagWord {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        'letters: for &x in &w.letters {
            for i in (0..out.len()).rev() {
                let y = out[i];
                if y == x.inv() {
                    out.remove(i);
                    continue 'letters;
                }
                if !self.commute(y.node, x.node) {
                    break;
                }
            }
            out.push(x);
        }
        RaagWord { letters: out }
    }

    /// Product of words, reduced.
    pub fn mul(&self, a: &RaagWord, b: &RaagWord) -> RaagWord {
        self.reduce_unchecked(&a.concat(b))
    }

    /// The lexicographically least word representing the same element
    /// (letters ordered by node name, then generator before inverse).
    pub fn canonical(&self, w: &RaagWord) -> Result<RaagWord, WordError> {
        self.check(w)?;
        Ok(self.canonical_unchecked(w))
    }

    pub(crate) fn canonical_unchecked(&self, w: &RaagWord) -> RaagWord {
        let mut rest = self.reduce_unchecked(w).letters;
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for i in 0..rest.len() {
                let x = rest[i];
                if !rest[..i].iter().all(|y| self.commute(y.node, x.node)) {
                    continue;
                }
                if best.is_none_or(|b| self.letter_cmp(x, rest[b]).is_lt()) {
                    best = Some(i);
                }
            }
            // the first letter is always movable to the front
            let b = best.unwrap();
            out.push(rest.remove(b));
        }
        RaagWord { letters: out }
    }

    /// Whether the two words represent the same element of A_Γ.
    pub fn equal(&self, a: &RaagWord, b: &RaagWord) -> Result<bool, WordError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.equal_unchecked(a, b))
    }

    pub(crate) fn equal_unchecked(&self, a: &RaagWord, b: &RaagWord) -> bool {
        let by_reduction = self.reduce_unchecked(&a.concat(&b.inverse())).is_empty();
        debug_assert_eq!(
            by_reduction,
            self.canonical_unchecked(a) == self.canonical_unchecked(b),
            "reduction and normal form disagree"
        );
        by_reduction
    }

    pub fn is_identity(&self, w: &RaagWord) -> bool {
        self.reduce_unchecked(w).is_empty()
    }

    /// Splits `w` as `conjugator · core · conjugator⁻¹` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self, w: &RaagWord) -> Result<(RaagWord, RaagWord), WordError> {
        self.check(w)?;
        Ok(self.cyclic_reduce_unchecked(w))
    }

    pub(crate) fn cyclic_reduce_unchecked(&self, w: &RaagWord) -> (RaagWord, RaagWord) {
        let mut core = self.reduce_unchecked(w).letters;
        let mut conjugator = Vec::new();
        loop {
            let n = core.len();
            let found = (0..n).find_map(|i| {
                let x = core[i];
                if !core[..i].iter().all(|y| self.commute(y.node, x.node)) {
                    return None;
                }
                ((i + 1)..n)
                    .find(|&j| {
                        core[j] == x.inv()
                            && core[j + 1..].iter().all(|y| self.commute(y.node, x.node))
                    })
                    .map(|j| (i, j))
            });
            let Some((i, j)) = found else { break };
            conjugator.push(core[i]);
            core.remove(j);
            core.remove(i);
        }
        (
            RaagWord {
                letters: conjugator,
            },
            RaagWord { letters: core },
        )
    }

    /// Parses `a b^-1 c^2`; the empty string is the identity.
    pub fn parse_word(&self, s: &str) -> Result<RaagWord, WordError> {
        let mut w = RaagWord::empty();
        for tok in s.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((name, e)) => (
                    name,
                    e.parse::<i64>()
                        .map_err(|_| WordError::BadExponent(tok.to_string()))?,
                ),
                None => (tok, 1),
            };
            let v = self
                .graph
                .node(name)
                .ok_or_else(|| WordError::UnknownLetter(name.to_string()))?;
            w.letters.extend(RaagWord::power(v, exp).letters);
        }
        Ok(w)
    }

    pub fn format(&self, w: &RaagWord) -> String {
        WordDisplay { raag: self, word: w }.to_string()
    }

    pub fn display<'a>(&'a self, w: &'a RaagWord) -> WordDisplay<'a> {
        WordDisplay { raag: self, word: w }
    }
}

pub struct WordDisplay<'a> {
    raag: &'a Raag,
    word: &'a RaagWord,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.word.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.raag.graph.name(l.node))?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}
