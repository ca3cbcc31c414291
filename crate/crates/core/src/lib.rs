//! Core model for consistency checking of replicated data systems: histories
//! and abstract executions, a monadic second-order logic over them with a
//! direct evaluator, a catalog of consistency models, the returns-before
//! generator graph with its cut analysis, and trace parsing plus randomized
//! generators.

pub mod eval;
pub mod history;
pub mod logic;
pub mod models;
pub mod rbgraph;
pub mod testutil;
pub mod trace;

pub use history::{
    AbstractExecution, History, MetaParams, ObjId, OpId, OpType, OpVal, Operation, ProcId, Time,
    ValId,
};
