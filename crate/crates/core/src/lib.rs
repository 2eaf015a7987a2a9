//! Propositional abduction: searching for subset-minimal sets of literals
//! over designated abducible variables that, together with a knowledge
//! base, consistently entail a query.
//!
//! The solver works by projection. A full hypothesis is an explanation
//! exactly when it selects a model of the knowledge base whose
//! abducible part cannot be extended into a countermodel of the query;
//! greedy literal removal then shrinks it to a subset-minimal one. The
//! projection step is polynomial for affine (XOR) knowledge bases paired
//! with equation-disjunction queries, and for Horn, reverse-Horn, 2-DNF
//! and Horn-renamable DNF knowledge bases paired with clause queries
//! (plus the Horn/positive-style DNF-CNF pairings); everything else is
//! reported as unsupported rather than silently approximated.
//!
//! The `oracle` module carries a deliberately brute-force reference
//! implementation of all the semantic notions for small variable counts;
//! the test suites check every engine against it.

pub mod affine;
pub mod dnf;
pub mod engine;
pub mod formula;
pub mod generator;
pub mod io;
pub mod oracle;
mod twosat;

pub use affine::{AffineSystem, EquationDisjunction, LinearEquation};
pub use dnf::{
    classify, find_falsifying_assignment, find_horn_renaming, is_tautology, is_tautology_guarded,
    ApplyRenaming, DnfClass, GuardedDnf, Renaming, UnsupportedClass,
};
pub use engine::{
    enumerate_full, find_full_explanation, is_explanation, is_necessary, minimize, solve,
    AbductionProblem, Hypothesis, InvalidProblem, KnowledgeBase, Query, SolveOutcome,
};
pub use formula::{Assignment, Clause, Cnf, Dnf, Literal, PartialAssignment, Term, VarId, VarSet};
pub use oracle::{models, CapExceeded, ModelSet};
