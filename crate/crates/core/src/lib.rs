//! Bounds on the virtual cohomological dimension of Out(A_Γ) for
//! two-dimensional right-angled Artin groups, together with the objects that
//! witness them: a commuting family of automorphisms, the partially symmetric
//! subgroups PΣ(n,k) of Out(F_n), the lift of local automorphisms for trees,
//! and the complexes of legal ideal edges with contractibility certificates.

pub mod anomaly;
pub mod autos;
pub mod bounds;
pub mod corpus;
pub mod fixtures;
pub mod graph;
pub mod ideal;
pub mod psigma;
pub mod verify;
pub mod words;

pub use anomaly::Anomaly;
pub use bounds::{lower_bound, upper_bound, vcd_report, BoundCase, BoundResult, Theorem, VcdReport};
pub use graph::{parse_graph, validate, DefiningGraph, NodeId, Structure, ValidationReport};
pub use words::{Letter, Raag, RaagWord};
