//! Generated test graphs: all trees up to isomorphism, cycles with small
//! trees attached, and a few girth ≥ 5 graphs that are not trees.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::autos::{compose, RaagAutomorphism};
use crate::fixtures;
use crate::graph::{DefiningGraph, NodeId};
use crate::words::{Raag, RaagWord};

/// A named corpus graph.
#[derive(Debug, Clone)]
pub struct CorpusGraph {
    pub name: String,
    pub graph: DefiningGraph,
}

fn tree_from_parents(parents: &[usize]) -> DefiningGraph {
    let mut g = DefiningGraph::new();
    g.add_node("n0").unwrap();
    for (i, &p) in parents.iter().enumerate() {
        let v = g.add_node(&format!("n{}", i + 1)).unwrap();
        g.add_edge(p, v).unwrap();
    }
    g
}

/// Canonical string of a tree: the smaller AHU encoding over its centres.
pub fn tree_code(g: &DefiningGraph) -> String {
    fn encode(g: &DefiningGraph, v: NodeId, parent: Option<NodeId>) -> String {
        let mut kids: Vec<String> = g
            .neighbors(v)
            .iter()
            .filter(|&&w| Some(w) != parent)
            .map(|&w| encode(g, w, Some(v)))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    centres(g)
        .into_iter()
        .map(|c| encode(g, c, None))
        .min()
        .unwrap_or_default()
}

fn centres(g: &DefiningGraph) -> Vec<NodeId> {
    let mut degree: Vec<usize> = g.nodes().map(|v| g.degree(v)).collect();
    let mut remaining = g.node_count();
    let mut layer: Vec<NodeId> = g.nodes().filter(|&v| degree[v] <= 1).collect();
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in g.neighbors(v) {
                if degree[w] > 1 {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    layer
}

/// One tree per isomorphism class for each node count 1..=`max_nodes`.
pub fn trees_up_to(max_nodes: usize) -> Vec<DefiningGraph> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for n in 1..=max_nodes {
        if n > 1 {
            let mut seen = BTreeSet::new();
            let mut next = Vec::new();
            for parents in &level {
                for p in 0..n - 1 {
                    let mut grown = parents.clone();
                    grown.push(p);
                    if seen.insert(tree_code(&tree_from_parents(&grown))) {
                        next.push(grown);
                    }
                }
            }
            level = next;
        }
        out.extend(level.iter().map(|p| tree_from_parents(p)));
    }
    out
}

/// Trees with at least four nodes that are not stars.
pub fn non_star_trees(max_nodes: usize) -> Vec<CorpusGraph> {
    trees_up_to(max_nodes)
        .into_iter()
        .filter(|g| g.node_count() >= 4 && g.nodes().filter(|&v| !g.is_leaf(v)).count() > 1)
        .map(|g| CorpusGraph {
            name: format!("tree{}:{}", g.node_count(), tree_code(&g)),
            graph: g,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hang {
    Leaf,
    Path2,
    Cherry,
    Path3,
}

const HANGS: [Hang; 4] = [Hang::Leaf, Hang::Path2, Hang::Cherry, Hang::Path3];

fn hang(g: &mut DefiningGraph, at: NodeId, kind: Hang, tag: &str) {
    let add = |g: &mut DefiningGraph, name: String, to: NodeId| {
        let v = g.add_node(&name).unwrap();
        g.add_edge(to, v).unwrap();
        v
    };
    match kind {
        Hang::Leaf => {
            add(g, format!("{tag}1"), at);
        }
        Hang::Path2 => {
            let x = add(g, format!("{tag}1"), at);
            add(g, format!("{tag}2"), x);
        }
        Hang::Cherry => {
            let x = add(g, format!("{tag}1"), at);
            add(g, format!("{tag}2"), x);
            add(g, format!("{tag}3"), x);
        }
        Hang::Path3 => {
            let x = add(g, format!("{tag}1"), at);
            let y = add(g, format!("{tag}2"), x);
            add(g, format!("{tag}3"), y);
        }
    }
}

/// k-cycles with a small tree on c1 and optionally another on c3: 20 graphs
/// per k.
pub fn cycles_with_trees(k: usize) -> Vec<CorpusGraph> {
    let mut out = Vec::new();
    for first in HANGS {
        for second in std::iter::once(None).chain(HANGS.map(Some)) {
            let mut g = fixtures::cycle(k);
            let c1 = g.node("c1").unwrap();
            let c3 = g.node("c3").unwrap();
            hang(&mut g, c1, first, "s");
            if let Some(kind) = second {
                hang(&mut g, c3, kind, "t");
            }
            out.push(CorpusGraph {
                name: format!("cycle{k}+{first:?}+{second:?}"),
                graph: g,
            });
        }
    }
    out
}

/// Connected, square-free graphs that are not trees.
pub fn girth_five_graphs() -> Vec<CorpusGraph> {
    let mut out: Vec<CorpusGraph> = [5, 6, 7]
        .into_iter()
        .flat_map(cycles_with_trees)
        .collect();
    for (name, graph) in [
        ("c5l", fixtures::c5l()),
        ("cycle_with_leaves5", fixtures::cycle_with_leaves(5)),
        ("cycle_with_leaves6", fixtures::cycle_with_leaves(6)),
        ("pentagons_bridged", fixtures::pentagons_bridged()),
        ("pentagons_shared", fixtures::pentagons_shared()),
        ("theta333", fixtures::theta333()),
        ("petersen", fixtures::petersen()),
    ] {
        out.push(CorpusGraph {
            name: name.into(),
            graph,
        });
    }
    out
}

/// Non-star trees up to `max_nodes` followed by the girth ≥ 5 graphs.
pub fn full_corpus(max_nodes: usize) -> Vec<CorpusGraph> {
    let mut out = non_star_trees(max_nodes);
    out.extend(girth_five_graphs());
    out
}

/// Conjugators g_w for a random pure symmetric automorphism of F(L_v), as
/// a product of `steps` random partial conjugations x ↦ y^±1 x y^∓1.
/// Keys and letters are nodes of `g`.
pub fn random_local_conjugators(
    g: &DefiningGraph,
    v: NodeId,
    steps: usize,
    rng: &mut impl Rng,
) -> BTreeMap<NodeId, RaagWord> {
    let mut link: Vec<NodeId> = g.neighbors(v).iter().copied().collect();
    link.sort_by(|&a, &b| g.name_cmp(a, b));
    let names: Vec<&str> = link.iter().map(|&w| g.name(w)).collect();
    let free = Raag::free(&names);
    let mut acc = RaagAutomorphism::identity(&free);
    if link.len() >= 2 {
        for _ in 0..steps {
            let x = rng.gen_range(0..link.len());
            let mut y = rng.gen_range(0..link.len() - 1);
            if y >= x {
                y += 1;
            }
            let by = RaagWord::power(y, if rng.gen_bool(0.5) { 1 } else { -1 });
            let step = RaagAutomorphism::partial_conjugation(&free, &[x], &by);
            acc = compose(&step, &acc).expect("same group");
        }
    }
    link.iter()
        .enumerate()
        .map(|(i, &w)| {
            let (c, core) = free.cyclic_reduce(acc.image(i)).expect("local word");
            debug_assert_eq!(core, RaagWord::generator(i));
            let global = RaagWord::from_letters(
                c.letters()
                    .iter()
                    .map(|l| crate::words::Letter::new(link[l.node], l.inverse))
                    .collect(),
            );
            (w, global)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts_match_known_sequence() {
        // unlabelled trees on n = 1..=9 nodes
        let expected = [1, 1, 1, 2, 3, 6, 11, 23, 47];
        let trees = trees_up_to(9);
        for (n, &count) in expected.iter().enumerate() {
            assert_eq!(trees.iter().filter(|g| g.node_count() == n + 1).count(), count);
        }
        assert!(trees.iter().all(|g| g.is_tree()));
    }

    #[test]
    fn tree_code_ignores_labels() {
        let a = tree_from_parents(&[0, 1, 2]);
        let b = tree_from_parents(&[0, 0, 1]);
        assert_eq!(tree_code(&a), tree_code(&b));
        let star = tree_from_parents(&[0, 0, 0]);
        assert_ne!(tree_code(&a), tree_code(&star));
    }

    #[test]
    fn non_star_tree_counts() {
        // one star per node count n ≥ 4 is dropped
        let n = non_star_trees(9).len();
        assert_eq!(n, (2 + 3 + 6 + 11 + 23 + 47) - 6);
    }

    #[test]
    fn cycle_fixture_shapes() {
        for k in [5, 6, 7] {
            let graphs = cycles_with_trees(k);
            assert_eq!(graphs.len(), 20);
            for cg in graphs {
                let g = &cg.graph;
                assert!(g.is_connected());
                assert_eq!(g.edge_count(), g.node_count());
            }
        }
    }

    #[test]
    fn random_local_data_is_pure_symmetric() {
        use rand::SeedableRng;
        let g = fixtures::spider();
        let c = g.node("c").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let data = random_local_conjugators(&g, c, 6, &mut rng);
            let local = crate::autos::LocalAutomorphism::from_conjugators(&g, c, &data).unwrap();
            assert!(local.is_automorphism());
        }
    }
}
