//! The invariant suite behind `raag-vcd verify`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::autos::{
    build_generator_set, free_inner_conjugator, lift_local, project_local, verify_commuting,
    GeneratorChoices, LocalAutomorphism,
};
use crate::bounds::report_from_structure;
use crate::corpus::{self, CorpusGraph};
use crate::graph::Structure;
use crate::ideal::{build_complex, morse_collapse_certificate, reduced_homology, HalfEdgeSet, TieOrder};
use crate::psigma::{outer_rank, psigma_vcd, PsigmaSpec};

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub max_nodes: usize,
    pub graphs: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

/// Runs every check over the corpus of non-star trees up to `max_nodes` plus
/// the cycle-with-trees and girth ≥ 5 fixtures.
pub fn run_suite(max_nodes: usize) -> VerifyReport {
    let graphs = corpus::full_corpus(max_nodes);
    let mut structure = CheckResult::new("structure (no anomalies)");
    let mut bounds = CheckResult::new("bounds and closed forms");
    let mut witness = CheckResult::new("generator count (pi-1)+2(nu-nu0)");
    let mut commuting = CheckResult::new("commutator certificates at bound 4");
    let mut lifts = CheckResult::new("lift round-trip on trees");
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for CorpusGraph { name, graph: g } in &graphs {
        let s = match Structure::analyze(g) {
            Ok(s) => s,
            Err(e) => {
                structure.check(false, || format!("{name}: ineligible {:?}", e.0));
                continue;
            }
        };
        structure.check(s.anomalies.is_empty(), || format!("{name}: {:?}", s.anomalies));
        let report = report_from_structure(g, &s);
        bounds.check(report.anomalies.is_empty(), || format!("{name}: {:?}", report.anomalies));

        let Ok(choices) = GeneratorChoices::default_for(g, &s) else {
            witness.check(false, || format!("{name}: no generator choices"));
            continue;
        };
        match build_generator_set(g, &s, choices) {
            Ok(gs) => {
                let base = report.counts.pieces - 1
                    + 2 * (report.counts.nodes - report.counts.nodes_gamma0);
                witness.check(gs.count() == base, || {
                    format!("{name}: {} generators, expected {base}", gs.count())
                });
                for cert in verify_commuting(&gs, 4) {
                    commuting.check(cert.conjugator.is_some(), || {
                        format!("{name}: pair ({}, {})", cert.first, cert.second)
                    });
                }
            }
            Err(e) => witness.check(false, || format!("{name}: {e}")),
        }

        if g.is_tree() {
            for v in g.nodes().filter(|&v| g.degree(v) >= 2) {
                let data = corpus::random_local_conjugators(g, v, 4, &mut rng);
                let ok = lift_local(g, v, &data).is_ok_and(|lifted| {
                    let expected = LocalAutomorphism::from_conjugators(g, v, &data)
                        .expect("generated data lies in the link");
                    project_local(&lifted, v).auto.equals(&expected.auto)
                        && g.nodes().filter(|&u| u != v).all(|u| {
                            free_inner_conjugator(&project_local(&lifted, u).auto).is_some()
                        })
                });
                lifts.check(ok, || format!("{name}: lift at {}", g.name(v)));
            }
        }
    }

    let mut psigma = CheckResult::new("psigma formula and outer rank");
    for n in 2..=6 {
        psigma.check(psigma_vcd(n, 0) == Ok(2 * n - 3), || format!("vcd({n},0)"));
        for k in 1..=n {
            let spec = PsigmaSpec::new(n, k).expect("valid range");
            psigma.check(outer_rank(&spec).ok() == psigma_vcd(n, k).ok(), || {
                format!("outer_rank({n},{k})")
            });
        }
    }

    let mut ideal = CheckResult::new("L(r,s) contractible (homology and collapse)");
    for r in 2..=3 {
        for s in 0..=3 {
            let h = HalfEdgeSet::new(r, s).expect("within cap");
            let ok = build_complex(&h, true).is_ok_and(|c| {
                reduced_homology(&c).is_ok_and(|hom| hom.trivial)
                    && morse_collapse_certificate(&c, TieOrder::Lexicographic)
                        .is_ok_and(|cert| cert.certified)
            });
            ideal.check(ok, || format!("L({r},{s})"));
        }
    }

    VerifyReport {
        max_nodes,
        graphs: graphs.len(),
        checks: vec![structure, bounds, witness, commuting, lifts, psigma, ideal],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_suite(6);
        for c in &report.checks {
            assert!(c.passed(), "{}: {:?}", c.name, c.failures);
            assert!(c.cases > 0, "{}", c.name);
        }
    }
}
