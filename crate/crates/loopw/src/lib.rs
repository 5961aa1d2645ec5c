//! A verifying compiler toolkit for a small total imperative language
//! with for-loops, first-class labels with non-local jumps, mutable
//! procedure-valued variables, and length-indexed natural number types.
//!
//! The pipeline:
//!
//! * [`parser`] turns source text into the [`ast`];
//! * [`wf`] checks scoping and arities;
//! * [`check`] runs the flow-sensitive type checker, collecting
//!   verification conditions along the way;
//! * [`index`] decides index-level equalities with rewriting over the
//!   program's equations plus congruence closure and bounded
//!   counterexample search;
//! * [`hoare`] exposes assertion triples built on the same machinery;
//! * [`smt`] exports undischarged conditions to SMT-LIB2;
//! * [`runtime`] interprets programs directly, while [`translate`] and
//!   [`core_eval`] compile them to a pure functional core and run that;
//!   agreement between the two is the semantic test bed.

pub mod ast;
pub mod check;
pub mod core_eval;
pub mod diag;
pub mod hoare;
pub mod index;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod runtime;
pub mod smt;
pub mod translate;
pub mod wf;

pub use ast::Program;
pub use check::{check_program, CheckConfig, CheckReport};
pub use diag::{Diagnostic, LineMap, Severity, Span};
pub use parser::parse_program;
pub use runtime::run;
pub use translate::translate;
