//! Brute-force verification over exhaustively enumerated small frames, and
//! bounded morphisms between frames.

pub mod claims;
pub mod enumerate;
pub mod morphism;
pub mod report;

use thiserror::Error;

use crate::logic::LogicError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search space too large: {size} candidate frames exceed the ceiling {ceiling}")]
    SearchSpaceTooLarge { size: u128, ceiling: u64 },
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

pub use claims::{verify_claim, verify_claim_with, verify_claims, ClaimId, ClaimReport, Outcome, SweepOptions};
pub use enumerate::{
    default_ceiling, enumerate_frames, enumerate_protocols, enumeration_size, EnumBounds, FramePos, Plan,
    RelationFilter, DEFAULT_CEILING,
};
pub use morphism::{
    check_bounded_morphism, nondefinability_report, nondefinability_witness, BoundedMorphism, MorphismCheck,
    MorphismError, MorphismViolation, NondefinabilityReport,
};
pub use report::{write_report, write_reports};
