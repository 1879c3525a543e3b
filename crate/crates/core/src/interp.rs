//! Direct execution of block programs, without a C compiler.
//!
//! The interpreter is the primary semantics oracle for emitted code: it
//! follows branches exactly as the rendered C would and reports the visited
//! labels, so step counts can be checked against the height bounds.

use std::collections::HashMap;

use thiserror::Error;

use crate::cobdd::NodeId;
use crate::codegen::{BlockKind, BlockProgram};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("action {action} out of range (program has {r} action bits)")]
    ActionOutOfRange { action: usize, r: usize },
    #[error("state vector has {got} bits, program expects {want}")]
    StateLength { got: usize, want: usize },
    #[error("jump to unknown label for node {0:?}")]
    UnknownLabel(NodeId),
    #[error("execution exceeded the block count; the program is not acyclic")]
    StepOverflow,
}

/// Execution trace of one `K_bits` call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub result_bit: bool,
    /// Blocks executed, return block included. Equals `visited_labels.len()`.
    pub steps: usize,
    pub visited_labels: Vec<NodeId>,
}

/// Result of a full controller call: one output bit per action variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControllerRun {
    pub outputs: Vec<bool>,
    pub total_steps: usize,
}

/// Simulates `K_bits(x, action)`: initializes the parity bit from the entry
/// table and follows branches until the return block.
pub fn run_kbits(
    program: &BlockProgram,
    x: &[bool],
    action: usize,
) -> Result<RunTrace, InterpError> {
    let index = block_index(program);
    run_kbits_indexed(program, &index, x, action)
}

/// Runs every action bit in order, as the emitted `K` wrapper does.
pub fn run_controller(program: &BlockProgram, x: &[bool]) -> Result<ControllerRun, InterpError> {
    let index = block_index(program);
    let mut outputs = Vec::with_capacity(program.r);
    let mut total_steps = 0;
    for action in 0..program.r {
        let trace = run_kbits_indexed(program, &index, x, action)?;
        outputs.push(trace.result_bit);
        total_steps += trace.steps;
    }
    Ok(ControllerRun {
        outputs,
        total_steps,
    })
}

fn block_index(program: &BlockProgram) -> HashMap<NodeId, usize> {
    program
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (b.label, i))
        .collect()
}

fn run_kbits_indexed(
    program: &BlockProgram,
    index: &HashMap<NodeId, usize>,
    x: &[bool],
    action: usize,
) -> Result<RunTrace, InterpError> {
    if action >= program.entries.len() {
        return Err(InterpError::ActionOutOfRange {
            action,
            r: program.entries.len(),
        });
    }
    if x.len() != program.n {
        return Err(InterpError::StateLength {
            got: x.len(),
            want: program.n,
        });
    }
    let entry = program.entries[action];
    let mut ret_b = entry.init_bit;
    let mut at = entry.label;
    let mut visited = Vec::new();
    loop {
        if visited.len() > program.blocks.len() {
            return Err(InterpError::StepOverflow);
        }
        visited.push(at);
        let block = index
            .get(&at)
            .map(|&i| &program.blocks[i])
            .ok_or(InterpError::UnknownLabel(at))?;
        match &block.kind {
            BlockKind::Return => {
                let steps = visited.len();
                return Ok(RunTrace {
                    result_bit: ret_b,
                    steps,
                    visited_labels: visited,
                });
            }
            BlockKind::Branch {
                x_index,
                then_label,
                else_label,
                flip_on_else,
                ..
            } => {
                if x[*x_index] {
                    at = *then_label;
                } else {
                    if *flip_on_else {
                        ret_b = !ret_b;
                    }
                    at = *else_label;
                }
            }
        }
    }
}
