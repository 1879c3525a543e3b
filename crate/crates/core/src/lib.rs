//! Synthesis of control software from boolean control relations.
//!
//! Given a relation `K(x, u)` over state bits `x` and action bits `u` that
//! encodes every acceptable control choice, this crate solves the functional
//! equation `K(x, F(x)) = 1` for a tuple of per-bit functions
//! `F = <f_1, ..., f_r>` and compiles `F` into a deterministic branch program
//! with full node sharing, emitted as C source with a provable step bound.
//!
//! The pipeline is:
//!
//! 1. [`blif`] — parse the relation from a PLA-style cube cover.
//! 2. [`cobdd`] — canonical decision diagrams with complemented else-edges.
//! 3. [`solver`] — solve `K(x, F(x)) = 1` one action bit at a time.
//! 4. [`codegen`] — translate the solved functions into a shared-node
//!    [`codegen::BlockProgram`] and render it as C.
//! 5. [`interp`] — execute block programs directly to verify semantics and
//!    measure exact step counts.
//! 6. [`oracle`] — brute-force ground truth over the parsed cube list,
//!    independent of the diagram engine.

pub mod blif;
pub mod cobdd;
pub mod codegen;
pub mod dot;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod interp;
pub mod mutate;
pub mod oracle;
pub mod solver;

pub use cobdd::{BoolOp, CobddManager, FuncHandle, NodeId, VarId};
pub use codegen::{Block, BlockKind, BlockProgram, SynthReport};
pub use solver::{ControllerSpec, SolvedController};
