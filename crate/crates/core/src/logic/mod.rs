//! ETL formulas: syntax, printing, evaluation and frame validity.

mod eval;
mod formula;
mod parser;

pub use eval::{
    extension, satisfies, spr_axiom, star_axiom, star_axiom_named, valid_on_frame, valid_on_frame_with_limit,
    valid_on_model, valuation_count, FrameCheck, LogicError, ModelCheck, Valuation, DEFAULT_VALUATION_LIMIT,
};
pub use formula::{Formula, FormulaDisplay};
pub use parser::{parse_formula, ParseError};
