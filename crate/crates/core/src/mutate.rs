//! Single-edit program mutations, used to demonstrate that the verifier
//! catches corrupted output (and by the CLI's fault-injection hook).

use thiserror::Error;

use crate::codegen::{BlockKind, BlockProgram};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MutationError {
    #[error("block index {0} out of range")]
    BlockOutOfRange(usize),
    #[error("block {0} is the return block and cannot be branch-mutated")]
    NotABranch(usize),
    #[error("entry index {0} out of range")]
    EntryOutOfRange(usize),
    #[error("unrecognized mutation `{0}`, expected flip:<i>, swap:<i> or init:<i>")]
    Unparsable(String),
}

/// One single-edit corruption of a block program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Toggle `flip_on_else` of the branch block at this index.
    ToggleFlip(usize),
    /// Swap then/else targets of the branch block at this index.
    SwapTargets(usize),
    /// Toggle the init bit of this entry.
    ToggleInit(usize),
}

impl Mutation {
    /// Parses `flip:<i>`, `swap:<i>` or `init:<i>`.
    pub fn parse(s: &str) -> Result<Mutation, MutationError> {
        let bad = || MutationError::Unparsable(s.to_string());
        let (kind, idx) = s.split_once(':').ok_or_else(bad)?;
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "flip" => Ok(Mutation::ToggleFlip(idx)),
            "swap" => Ok(Mutation::SwapTargets(idx)),
            "init" => Ok(Mutation::ToggleInit(idx)),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for Mutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mutation::ToggleFlip(i) => write!(f, "flip:{i}"),
            Mutation::SwapTargets(i) => write!(f, "swap:{i}"),
            Mutation::ToggleInit(i) => write!(f, "init:{i}"),
        }
    }
}

/// Returns a copy of the program with the mutation applied.
pub fn apply_mutation(
    program: &BlockProgram,
    mutation: Mutation,
) -> Result<BlockProgram, MutationError> {
    let mut out = program.clone();
    match mutation {
        Mutation::ToggleFlip(i) => {
            let block = out
                .blocks
                .get_mut(i)
                .ok_or(MutationError::BlockOutOfRange(i))?;
            match &mut block.kind {
                BlockKind::Branch { flip_on_else, .. } => *flip_on_else = !*flip_on_else,
                BlockKind::Return => return Err(MutationError::NotABranch(i)),
            }
        }
        Mutation::SwapTargets(i) => {
            let block = out
                .blocks
                .get_mut(i)
                .ok_or(MutationError::BlockOutOfRange(i))?;
            match &mut block.kind {
                BlockKind::Branch {
                    then_label,
                    else_label,
                    ..
                } => std::mem::swap(then_label, else_label),
                BlockKind::Return => return Err(MutationError::NotABranch(i)),
            }
        }
        Mutation::ToggleInit(i) => {
            let entry = out
                .entries
                .get_mut(i)
                .ok_or(MutationError::EntryOutOfRange(i))?;
            entry.init_bit = !entry.init_bit;
        }
    }
    Ok(out)
}

/// Every single-edit mutation that changes the program: flip toggles and
/// target swaps per branch block (swaps with equal targets are skipped as
/// no-ops) plus init toggles per entry.
pub fn enumerate_mutations(program: &BlockProgram) -> Vec<Mutation> {
    let mut out = Vec::new();
    for (i, block) in program.blocks.iter().enumerate() {
        if let BlockKind::Branch {
            then_label,
            else_label,
            ..
        } = &block.kind
        {
            out.push(Mutation::ToggleFlip(i));
            if then_label != else_label {
                out.push(Mutation::SwapTargets(i));
            }
        }
    }
    for i in 0..program.entries.len() {
        out.push(Mutation::ToggleInit(i));
    }
    out
}
