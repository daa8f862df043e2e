//! SFM1: a process algebra for nondeterministic finite automata.
//!
//! Terms denote reduced NFAs, reduced NFAs compile back to terms, and
//! language equivalence comes with checkable equational proofs.

pub mod automata;
pub mod compiler;
pub mod proofs;
pub mod semantics;
pub mod terms;
