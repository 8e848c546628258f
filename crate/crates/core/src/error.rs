use thiserror::Error;

use crate::kernels::Vec2;
use crate::point_vortex::SeparationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which monitor stopped a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum StopCondition {
    #[serde(rename = "t_end")]
    TEnd,
    #[serde(rename = "patch-pair")]
    PatchPair,
    #[serde(rename = "patch-boundary")]
    PatchBoundary,
    #[serde(rename = "vortex-pair")]
    VortexPair,
    #[serde(rename = "vortex-boundary")]
    VortexBoundary,
}

impl std::fmt::Display for StopCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StopCondition::TEnd => "t_end",
            StopCondition::PatchPair => "patch-pair",
            StopCondition::PatchBoundary => "patch-boundary",
            StopCondition::VortexPair => "vortex-pair",
            StopCondition::VortexBoundary => "vortex-boundary",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel singularity at z = ({}, {})", .0.x, .0.y)]
    Singular(Vec2),

    #[error("point ({}, {}) is not inside the domain", .0.x, .0.y)]
    OutsideDomain(Vec2),

    #[error("evaluation point at boundary distance {distance:.3e} violates clearance {required:.3e}")]
    Clearance { distance: f64, required: f64 },

    #[error("singular boundary-integral system near {curve} (condition estimate {condition:.3e})")]
    SingularSystem { curve: String, condition: f64 },

    #[error("separation monitor fired: {condition}")]
    Separation { condition: StopCondition, report: SeparationReport },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("{what} index {index} out of range (have {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error("signed masses differ: {lhs} vs {rhs}")]
    MassMismatch { lhs: f64, rhs: f64 },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
