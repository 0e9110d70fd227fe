//! A typed relational programming engine.
//!
//! The pieces, bottom up:
//!
//! - [`term`]: the term universe — atoms, constructor applications, and
//!   type-tagged logic variables.
//! - [`subst`] / [`unify`]: triangular substitutions, walking, the occurs
//!   check, and unification with dynamic tag enforcement.
//! - [`constraints`]: the disequality store.
//! - [`search`]: goals, lazy interleaving streams, the `delay` combinator,
//!   fuel-bounded pulling, and `run`.
//! - [`generics`]: runtime type descriptors and inject/project between
//!   ground values and terms.
//! - [`reify`]: canonical printable answers.
//! - [`trace`]: structured search traces with text/JSON/DOT export.
//! - [`stdlib`]: the canonical relation corpus (appendo, membero, pluso,
//!   lengtho, conso).

pub mod constraints;
pub mod generics;
pub mod reify;
pub mod search;
pub mod stdlib;
pub mod subst;
pub mod term;
pub mod trace;
pub mod unify;

pub use reify::Answer;
pub use search::{
    run, AnswerLimit, EngineConfig, EngineError, Goal, RunOutcome, RunSession, RunStats,
    RunStatus, SessionStep, State, Strategy, Stream,
};
pub use subst::Substitution;
pub use term::{Atom, Term, TypeTag, VarId};
pub use trace::{RenderOpts, TraceKind, TraceLimits, TraceTree};
pub use unify::{CyclicTerm, TypeMismatch};
