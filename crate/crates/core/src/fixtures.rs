//! Small named graphs used throughout tests, examples and the verify corpus.

use crate::graph::DefiningGraph;

fn build(edges: &[(&str, &str)]) -> DefiningGraph {
    DefiningGraph::from_edges(&[], edges).expect("fixture graphs are simple")
}

/// Path a–b–c–d–e.
pub fn p5() -> DefiningGraph {
    build(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])
}

/// 5-cycle v1..v5 with a leaf u attached at v1.
pub fn c5l() -> DefiningGraph {
    build(&[
        ("v1", "v2"),
        ("v2", "v3"),
        ("v3", "v4"),
        ("v4", "v5"),
        ("v5", "v1"),
        ("v1", "u"),
    ])
}

/// Centre c with three legs of length two.
pub fn spider() -> DefiningGraph {
    build(&[
        ("c", "x1"),
        ("x1", "y1"),
        ("c", "x2"),
        ("x2", "y2"),
        ("c", "x3"),
        ("x3", "y3"),
    ])
}

/// Square a–b–c–d–a.
pub fn square() -> DefiningGraph {
    build(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
}

/// k-cycle c1..ck.
pub fn cycle(k: usize) -> DefiningGraph {
    let names: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
    let mut g = DefiningGraph::new();
    let ids: Vec<_> = names.iter().map(|n| g.add_node(n).unwrap()).collect();
    for i in 0..k {
        g.add_edge(ids[i], ids[(i + 1) % k]).unwrap();
    }
    g
}

/// k-cycle with one leaf l_i hung on every cycle node.
pub fn cycle_with_leaves(k: usize) -> DefiningGraph {
    let mut g = cycle(k);
    for i in 1..=k {
        let c = g.node(&format!("c{i}")).unwrap();
        let l = g.add_node(&format!("l{i}")).unwrap();
        g.add_edge(c, l).unwrap();
    }
    g
}

/// Two pentagons joined by a bridge, with a leaf on each.
pub fn pentagons_bridged() -> DefiningGraph {
    build(&[
        ("p1", "p2"),
        ("p2", "p3"),
        ("p3", "p4"),
        ("p4", "p5"),
        ("p5", "p1"),
        ("q1", "q2"),
        ("q2", "q3"),
        ("q3", "q4"),
        ("q4", "q5"),
        ("q5", "q1"),
        ("p1", "q1"),
        ("p3", "s"),
        ("q3", "t"),
    ])
}

/// The Petersen graph (girth 5).
pub fn petersen() -> DefiningGraph {
    let mut edges = Vec::new();
    let outer: Vec<String> = (0..5).map(|i| format!("o{i}")).collect();
    let inner: Vec<String> = (0..5).map(|i| format!("i{i}")).collect();
    for i in 0..5 {
        edges.push((outer[i].clone(), outer[(i + 1) % 5].clone()));
        edges.push((inner[i].clone(), inner[(i + 2) % 5].clone()));
        edges.push((outer[i].clone(), inner[i].clone()));
    }
    let refs: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    build(&refs)
}

/// Two pentagons sharing the node p1.
pub fn pentagons_shared() -> DefiningGraph {
    build(&[
        ("p1", "p2"),
        ("p2", "p3"),
        ("p3", "p4"),
        ("p4", "p5"),
        ("p5", "p1"),
        ("p1", "q2"),
        ("q2", "q3"),
        ("q3", "q4"),
        ("q4", "q5"),
        ("q5", "p1"),
    ])
}

/// Three paths of length three between s and t (girth 6).
pub fn theta333() -> DefiningGraph {
    build(&[
        ("s", "x1"),
        ("x1", "y1"),
        ("y1", "t"),
        ("s", "x2"),
        ("x2", "y2"),
        ("y2", "t"),
        ("s", "x3"),
        ("x3", "y3"),
        ("y3", "t"),
    ])
}
