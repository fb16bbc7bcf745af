//! Modularity analysis for propositional action theories.
//!
//! A theory has static laws, and per action effect, executability and
//! inexecutability laws, plus a dependence relation saying which literals
//! each action may bring about. The crate finds implicit static and
//! inexecutability laws, decides the modularity postulates, and checks every
//! syntactic answer against a model-theoretic oracle.

pub mod analysis;
pub mod classical;
pub mod cli;
pub mod kripke;
pub mod parse;
pub mod report;
pub mod syntax;
pub mod theory;

pub use classical::{entails, new_cons, prime_implicates, satisfiable, valuations_of, Valuation};
pub use parse::{parse_formula, parse_query, Span, SyntaxError};
pub use syntax::{Atom, Clause, Formula, Literal, Query};
pub use theory::{parse_theory, validate, ActionTheory};
