//! Lower and upper bounds on vcd Out(A_Γ) and the combined report.
//!
//! The lower bound counts the rank of an explicit free abelian subgroup,
//! `(π−1) + 2(ν−ν₀) − 2`, improved by one or two when Γ₀ has non-hub nodes or
//! an edge with two non-hub endpoints. The upper bound is
//! `(π−1) + Σ_{v∈V₀} (2|v| − 3 − max(|v|_U − 1, 0))`, with two closed-form
//! specializations that are evaluated and cross-checked when they apply.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::anomaly::Anomaly;
use crate::graph::{DefiningGraph, Ineligible, NodeId, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundCase {
    Base,
    NonhubNode,
    NonhubEdge,
    General,
    UEqualsV0,
    PrunedLeaves,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Node(String),
    Edge(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpperTerm {
    pub node: String,
    pub term: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Specialization {
    pub name: &'static str,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub value: i64,
    pub case: BoundCase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<UpperTerm>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub specializations: Vec<Specialization>,
}

fn sorted_pair(g: &DefiningGraph, a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if g.name_cmp(a, b).is_le() {
        (a, b)
    } else {
        (b, a)
    }
}

/// The strongest applicable case of the lower bound, with a witness chosen
/// lexicographically.
pub fn lower_bound(g: &DefiningGraph, s: &Structure) -> BoundResult {
    let pi = s.pieces.count() as i64;
    let nu = g.node_count() as i64;
    let nu0 = s.gamma0.nodes.len() as i64;
    let base = (pi - 1) + 2 * (nu - nu0) - 2;
    let hub = |v: NodeId| s.pieces.is_hub(v);

    let mut edges: Vec<(NodeId, NodeId)> = s
        .gamma0
        .edges
        .iter()
        .map(|&(a, b)| sorted_pair(g, a, b))
        .filter(|&(a, b)| !hub(a) && !hub(b))
        .collect();
    edges.sort_by(|x, y| (g.name(x.0), g.name(x.1)).cmp(&(g.name(y.0), g.name(y.1))));
    if let Some(&(a, b)) = edges.first() {
        return BoundResult {
            value: base + 2,
            case: BoundCase::NonhubEdge,
            witness: Some(Witness::Edge(g.name(a).into(), g.name(b).into())),
            terms: Vec::new(),
            specializations: Vec::new(),
        };
    }
    // gamma0.nodes is already sorted by name
    if let Some(&v) = s.gamma0.nodes.iter().find(|&&v| !hub(v)) {
        return BoundResult {
            value: base + 1,
            case: BoundCase::NonhubNode,
            witness: Some(Witness::Node(g.name(v).into())),
            terms: Vec::new(),
            specializations: Vec::new(),
        };
    }
    BoundResult {
        value: base,
        case: BoundCase::Base,
        witness: None,
        terms: Vec::new(),
        specializations: Vec::new(),
    }
}

/// The general upper bound with per-node terms. Specializations that apply are
/// recorded and any disagreement with the general value is returned as an
/// anomaly.
pub fn upper_bound(g: &DefiningGraph, s: &Structure) -> (BoundResult, Vec<Anomaly>) {
    let pi = s.pieces.count() as i64;
    let terms: Vec<UpperTerm> = s
        .gamma0
        .nodes
        .iter()
        .map(|&v| {
            let st = s.gamma0.stats[v];
            let term = 2 * st.valence as i64 - 3 - (st.valence_u as i64 - 1).max(0);
            UpperTerm {
                node: g.name(v).to_string(),
                term,
            }
        })
        .collect();
    let value = (pi - 1) + terms.iter().map(|t| t.term).sum::<i64>();

    let mut specializations = Vec::new();
    let mut case = BoundCase::General;
    let u_equals_v0 = s.gamma0.u.len() == s.gamma0.nodes.len()
        && s.gamma0.nodes.iter().all(|v| s.gamma0.u.contains(v));
    if u_equals_v0 {
        let sum_valence: i64 = s.gamma0.nodes.iter().map(|&v| g.degree(v) as i64).sum();
        let next = (pi - 1) + 2 * sum_valence
            - 2 * s.gamma0.nodes.len() as i64
            - 2 * s.gamma0.edges.len() as i64;
        specializations.push(Specialization {
            name: "UBnext",
            value: next,
        });
        case = BoundCase::UEqualsV0;
    }
    if s.gamma0.pruned_leaves_flag {
        let leaves = g.leaves().len() as i64;
        let three = (pi - 1) + 2 * (leaves - g.euler_characteristic());
        specializations.push(Specialization {
            name: "UBthree",
            value: three,
        });
        case = BoundCase::PrunedLeaves;
    }
    let anomalies = specializations
        .iter()
        .filter(|sp| sp.value != value)
        .map(|sp| Anomaly::SpecializationMismatch {
            name: sp.name.to_string(),
            general: value,
            specialized: sp.value,
        })
        .collect();
    (
        BoundResult {
            value,
            case,
            witness: None,
            terms,
            specializations,
        },
        anomalies,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Theorem {
    /// Γ a tree: vcd = e + 2ℓ − 3.
    Tree,
    /// No triangles or squares (or Γ₀ = Γ minus leaves), not a tree:
    /// π + 2ℓ − 1 ≤ vcd ≤ π + 2ℓ − 1 − 2χ.
    NoShortCycles,
    /// χ = 0 with unique cycle of the given length: vcd = e − k + 2ℓ.
    Cycle(usize),
    /// Lower bound e − k + 2ℓ only; reported when the cycle hypotheses hold
    /// but the two bounds fail to meet.
    LBzero,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theorem::Tree => f.write_str("Tree"),
            Theorem::NoShortCycles => f.write_str("NoShortCycles"),
            Theorem::Cycle(k) => write!(f, "Cycle({k})"),
            Theorem::LBzero => f.write_str("LBzero"),
        }
    }
}

impl Serialize for Theorem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub nodes: usize,
    pub nodes_gamma0: usize,
    pub edges: usize,
    pub leaves: usize,
    pub pieces: usize,
    pub euler_characteristic: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VcdReport {
    pub counts: Counts,
    pub gamma0: Vec<String>,
    pub pieces: Vec<Vec<(String, String)>>,
    pub hubs: Vec<String>,
    pub lower: BoundResult,
    pub upper: BoundResult,
    pub exact: Option<i64>,
    pub theorems: Vec<Theorem>,
    pub kernel_rank: usize,
    pub anomalies: Vec<Anomaly>,
}

/// Length of the unique cycle of a connected graph with χ = 0, found by
/// repeatedly stripping leaves.
pub fn unique_cycle_length(g: &DefiningGraph) -> Option<usize> {
    if g.euler_characteristic() != 0 || !g.is_connected() {
        return None;
    }
    let mut degree: Vec<usize> = g.nodes().map(|v| g.degree(v)).collect();
    let mut alive = vec![true; g.node_count()];
    let mut stack: Vec<NodeId> = g.nodes().filter(|&v| degree[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    let k = alive.iter().filter(|&&a| a).count();
    (k >= 3).then_some(k)
}

pub fn vcd_report(g: &DefiningGraph) -> Result<VcdReport, Ineligible> {
    let s = Structure::analyze(g)?;
    Ok(report_from_structure(g, &s))
}

pub fn report_from_structure(g: &DefiningGraph, s: &Structure) -> VcdReport {
    let lower = lower_bound(g, s);
    let (upper, mut anomalies) = upper_bound(g, s);
    anomalies.splice(0..0, s.anomalies.iter().cloned());

    let e = g.edge_count() as i64;
    let leaves = g.leaves().len() as i64;
    let pi = s.pieces.count() as i64;
    let chi = g.euler_characteristic();
    let cycle_length = unique_cycle_length(g);

    if lower.value > upper.value {
        anomalies.push(Anomaly::BoundsCrossed {
            lower: lower.value,
            upper: upper.value,
        });
    }
    let exact = (lower.value == upper.value).then_some(lower.value);

    let mut theorems = Vec::new();
    let mut closed_form = |name: &str, formula: i64, lower_formula: bool, upper_formula: bool| {
        let lower_ok = !lower_formula || lower.value == formula;
        let upper_ok = !upper_formula || upper.value == formula;
        if !(lower_ok && upper_ok) {
            anomalies.push(Anomaly::ClosedFormMismatch {
                theorem: name.to_string(),
                formula,
                lower: lower.value,
                upper: upper.value,
            });
        }
    };
    if g.is_tree() {
        theorems.push(Theorem::Tree);
        closed_form("Tree", e + 2 * leaves - 3, true, true);
    } else if s.validation.square_free || s.gamma0.pruned_leaves_flag {
        theorems.push(Theorem::NoShortCycles);
        closed_form("NoShortCycles.lower", pi + 2 * leaves - 1, true, false);
        closed_form("NoShortCycles.upper", pi + 2 * leaves - 1 - 2 * chi, false, true);
        if let Some(k) = cycle_length {
            if k >= 5 || s.gamma0.pruned_leaves_flag {
                let value = e - k as i64 + 2 * leaves;
                if exact == Some(value) {
                    theorems.push(Theorem::Cycle(k));
                } else {
                    theorems.push(Theorem::LBzero);
                    closed_form("Cycle", value, true, true);
                }
            }
        }
    }

    VcdReport {
        counts: Counts {
            nodes: g.node_count(),
            nodes_gamma0: s.gamma0.nodes.len(),
            edges: g.edge_count(),
            leaves: leaves as usize,
            pieces: s.pieces.count(),
            euler_characteristic: chi,
            cycle_length,
        },
        gamma0: s.gamma0.nodes.iter().map(|&v| g.name(v).to_string()).collect(),
        pieces: s
            .pieces
            .pieces
            .iter()
            .map(|p| {
                p.edges
                    .iter()
                    .map(|&(a, b)| {
                        let (a, b) = sorted_pair(g, a, b);
                        (g.name(a).to_string(), g.name(b).to_string())
                    })
                    .collect()
            })
            .collect(),
        hubs: g
            .nodes_by_name()
            .into_iter()
            .filter(|&v| s.gamma0.contains(v) && s.pieces.is_hub(v))
            .map(|v| g.name(v).to_string())
            .collect(),
        lower,
        upper,
        exact,
        theorems,
        kernel_rank: s.pieces.count() - 1,
        anomalies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn report(g: &DefiningGraph) -> VcdReport {
        vcd_report(g).unwrap()
    }

    #[test]
    fn p5_bounds() {
        let g = fixtures::p5();
        let s = Structure::analyze(&g).unwrap();
        let lo = lower_bound(&g, &s);
        assert_eq!((lo.value, lo.case), (5, BoundCase::Base));
        let (up, anomalies) = upper_bound(&g, &s);
        assert!(anomalies.is_empty());
        assert_eq!(up.value, 5);
        let terms: Vec<(&str, i64)> = up.terms.iter().map(|t| (t.node.as_str(), t.term)).collect();
        assert_eq!(terms, [("b", 1), ("c", 0), ("d", 1)]);
        let r = report(&g);
        assert_eq!(r.exact, Some(5));
        assert_eq!(r.theorems, [Theorem::Tree]);
    }

    #[test]
    fn c5l_bounds() {
        let g = fixtures::c5l();
        let s = Structure::analyze(&g).unwrap();
        let lo = lower_bound(&g, &s);
        assert_eq!((lo.value, lo.case), (3, BoundCase::NonhubEdge));
        // every cycle edge qualifies; the lexicographically least is reported
        assert_eq!(lo.witness, Some(Witness::Edge("v1".into(), "v2".into())));
        let (up, _) = upper_bound(&g, &s);
        assert_eq!(up.value, 3);
        let terms: Vec<i64> = up.terms.iter().map(|t| t.term).collect();
        assert_eq!(terms, [2, 0, 0, 0, 0]);
        assert_eq!(up.case, BoundCase::PrunedLeaves);
        assert!(up.specializations.iter().all(|sp| sp.value == 3));
        let r = report(&g);
        assert_eq!(r.exact, Some(3));
        assert_eq!(r.theorems, [Theorem::NoShortCycles, Theorem::Cycle(5)]);
        assert_eq!(r.kernel_rank, 1);
        assert!(r.anomalies.is_empty());
    }

    #[test]
    fn spider_bounds() {
        let g = fixtures::spider();
        let s = Structure::analyze(&g).unwrap();
        let lo = lower_bound(&g, &s);
        assert_eq!((lo.value, lo.case), (9, BoundCase::Base));
        assert_eq!(report(&g).exact, Some(9));
    }

    #[test]
    fn cycle_with_leaves_exact() {
        let g = fixtures::cycle_with_leaves(5);
        let r = report(&g);
        assert_eq!(r.counts.edges, 10);
        assert_eq!(r.exact, Some(15));
        assert!(r.theorems.contains(&Theorem::Cycle(5)));
    }

    #[test]
    fn square_uses_plain_terms() {
        // U = ∅ so every term is 2|v| − 3.
        let g = fixtures::square();
        let s = Structure::analyze(&g).unwrap();
        let (up, anomalies) = upper_bound(&g, &s);
        assert!(anomalies.is_empty());
        assert_eq!(up.case, BoundCase::General);
        assert!(up.terms.iter().all(|t| t.term == 1));
        assert_eq!(up.value, 2);
        let r = report(&g);
        assert!(r.theorems.is_empty());
        assert!(r.lower.value <= r.upper.value);
    }

    #[test]
    fn square_with_trees_gets_cycle_tag() {
        let g = DefiningGraph::from_edges(
            &[],
            &[
                ("a", "b"),
                ("b", "c"),
                ("c", "d"),
                ("d", "a"),
                ("a", "la"),
                ("b", "lb"),
                ("c", "lc"),
                ("d", "ld"),
            ],
        )
        .unwrap();
        let r = report(&g);
        assert_eq!(r.counts.cycle_length, Some(4));
        // e − k + 2ℓ = 8 − 4 + 8
        assert_eq!(r.exact, Some(12));
        assert!(r.theorems.contains(&Theorem::Cycle(4)));
        assert!(r.anomalies.is_empty());
    }

    #[test]
    fn petersen_sandwich() {
        let g = fixtures::petersen();
        let r = report(&g);
        assert_eq!(r.lower.value, 0);
        assert_eq!(r.upper.value, 10);
        assert_eq!(r.theorems, [Theorem::NoShortCycles]);
        assert!(r.anomalies.is_empty());
    }

    #[test]
    fn unique_cycle_peeling() {
        assert_eq!(unique_cycle_length(&fixtures::c5l()), Some(5));
        assert_eq!(unique_cycle_length(&fixtures::p5()), None);
        assert_eq!(unique_cycle_length(&fixtures::cycle(7)), Some(7));
    }

    #[test]
    fn theorem_tags_render() {
        let json = serde_json::to_string(&[Theorem::Tree, Theorem::Cycle(6)]).unwrap();
        assert_eq!(json, r#"["Tree","Cycle(6)"]"#);
    }
}
