//! Word-automata side of the consistency checker: a decision engine for
//! monadic second-order logic over finite bit-vector words, the snapshot
//! encoding of histories and abstract executions as such words, the
//! translation from the history logic to word formulas, and emission of
//! solver-compatible input files.

pub mod bdd;
pub mod checker;
pub mod compile;
pub mod dfa;
pub mod formula;
pub mod layout;
pub mod mona;
pub mod translate;
pub mod word;
