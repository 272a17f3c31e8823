//! Findings where a computed structure disagrees with an identity that is
//! expected to hold. These are reported, never patched over.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Anomaly {
    GammaZeroDisconnected,
    LeafInGammaZero(String),
    LeafNeighborOutsideU(String),
    PiecesNotPartition,
    PiecesOverlap,
    DeltaMismatch {
        node: String,
        components: usize,
        pieces: usize,
    },
    KernelRankMismatch {
        sum: usize,
        pieces: usize,
    },
    SpecializationMismatch {
        name: String,
        general: i64,
        specialized: i64,
    },
    ClosedFormMismatch {
        theorem: String,
        formula: i64,
        lower: i64,
        upper: i64,
    },
    BoundsCrossed {
        lower: i64,
        upper: i64,
    },
}
