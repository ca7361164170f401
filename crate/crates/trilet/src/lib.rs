//! trilet: a typechecker for a call-by-value lambda calculus with
//! intersection, union, and empty types.
//!
//! Two type systems are implemented over the same syntax: the left
//! tridirectional system, whose directL rule may name any synthesizing
//! subterm in evaluation position, and the let-normal system, which works
//! on translated terms where every such subterm is already let-bound. The
//! translation between them, its reverse, a canonicality measure, a
//! small-step evaluator, and a differential harness that checks the two
//! systems agree through the translation round out the crate.

pub mod derivation;
pub mod differ;
pub mod eval;
pub mod json;
pub mod lncheck;
pub mod parse;
pub mod pretty;
pub mod subtyping;
pub mod syntax;
pub mod transform;
pub mod tri;

pub use derivation::{validate, Derivation, Direction, Judgment, Rule, System};
pub use lncheck::{ln_check, ln_synth, LnChecker, LnOptions};
pub use subtyping::{subtype, subtype_derive, SubDerivation};
pub use syntax::{LNTerm, LinearContext, Term, Type, TypingContext};
pub use transform::{embed, measure, translate, translate_embed, unwind, wf_letnormal, Measure};
pub use tri::{
    tri_check, tri_check_term, tri_synth, CheckConfig, CheckError, CheckOutcome, Decision,
    Strategy, TriChecker,
};
