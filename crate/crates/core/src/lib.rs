//! Tooling for natural-language linear-program formulation.
//!
//! The crate covers the symbolic side of the pipeline: the JSON
//! intermediate representation of word problems ([`ir`]), lowering to matrix
//! form ([`canonical`]), rule-based post-editing and beam reranking
//! ([`rules`]), an embedded LP/ILP solver with LP-file I/O ([`solver`]),
//! canonical and execution accuracy ([`metrics`]) and IR-level data
//! augmentation ([`augment`]).

pub mod augment;
pub mod beams;
pub mod canonical;
pub mod ir;
pub mod metrics;
pub mod quantity;
pub mod rules;
pub mod solver;

pub use canonical::{
    CanonError, CanonicalLP, CanonicalRow, ObjectiveRow, Sense, canonical_objective, canonical_row,
    canonicalize, canonicalize_with, normalize_sense,
};
pub use ir::{
    ConstraintDecl, ConstraintType, EntityLabel, EntitySpan, Formulation, IrError, ObjectiveBody,
    ObjectiveDecl, ObjectiveDirection, Operator, ProblemRecord, Terms, ValidationReport, VarResolver,
    parse_corpus, parse_problem, serialize_ir, validate, validate_with,
};
pub use quantity::{Quantity, Rational, parse_quantity};
