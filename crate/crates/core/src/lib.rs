//! Epistemic temporal logic over finite tree and forest frames.
//!
//! A [`Frame`] is a prefix-closed protocol of event-labelled histories with
//! an accessibility relation. On top of it this crate decides the
//! perfect-recall conditions ([`recall`]), model-checks formulas
//! ([`logic`]), and verifies quantified claims by exhaustive enumeration of
//! small frames ([`oracle`]).

pub(crate) mod bits;
pub mod document;
pub mod fixtures;
pub mod frame;
pub mod logic;
pub mod oracle;
pub mod recall;
pub mod relations;
pub mod verdicts;

pub use bits::HistorySet;
pub use frame::{build_frame, Alphabet, EventId, Frame, FrameError, FrameSpec, HistoryId, Protocol, Rel, TreeSpec};
pub use logic::{Formula, Valuation};
pub use recall::{RecallProperty, RecallVerdict, RecallWitness, WsprVariant};
pub use relations::{RelationReport, RelationWitness};
