//! Translation of solved controllers into labeled branch programs and C text.
//!
//! Every diagram node reachable from any of the solved functions becomes
//! exactly one block, shared across all action bits; the per-action entry
//! table records the initial parity bit and the entry label. Rendering is
//! byte-deterministic.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::cobdd::{CobddManager, NodeId, VarId};
use crate::solver::{ControllerSpec, SolvedController};

/// One labeled block: either a two-way branch on a state bit or the single
/// return block (always labeled by the terminal node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub label: NodeId,
    pub kind: BlockKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    Branch {
        var: VarId,
        /// Position of `var` within the state array `x[]`.
        x_index: usize,
        then_label: NodeId,
        else_label: NodeId,
        /// Whether taking the else edge toggles the parity bit.
        flip_on_else: bool,
    },
    Return,
}

/// Entry point for one action bit: initialize the parity bit, jump to the
/// root's block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub init_bit: bool,
    pub label: NodeId,
}

/// A branch program: blocks in emission order plus one entry per action bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockProgram {
    pub blocks: Vec<Block>,
    pub entries: Vec<Entry>,
    /// State bit count.
    pub n: usize,
    /// Action bit count.
    pub r: usize,
}

impl BlockProgram {
    pub fn block_by_label(&self, label: NodeId) -> Option<&Block> {
        self.blocks.iter().find(|b| b.label == label)
    }
}

/// Translates the solved functions into a block program, threading one
/// visited set across all roots so shared nodes are emitted once. Blocks
/// appear in recursive emission order: node, then-subtree, else-subtree,
/// roots in action-bit order.
pub fn generate_program(spec: &ControllerSpec, solved: &SolvedController) -> BlockProgram {
    let x_index: HashMap<VarId, usize> = spec
        .state_vars()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut visited = HashSet::new();
    let mut blocks = Vec::new();
    for f in &solved.functions {
        translate(&spec.manager, f.node(), &x_index, &mut visited, &mut blocks);
    }
    let entries = solved
        .functions
        .iter()
        .map(|f| Entry {
            init_bit: !f.flip(),
            label: f.node(),
        })
        .collect();
    BlockProgram {
        blocks,
        entries,
        n: spec.n(),
        r: spec.r(),
    }
}

fn translate(
    manager: &CobddManager,
    node: NodeId,
    x_index: &HashMap<VarId, usize>,
    visited: &mut HashSet<NodeId>,
    blocks: &mut Vec<Block>,
) {
    if !visited.insert(node) {
        return;
    }
    match manager.node_record(node) {
        None => blocks.push(Block {
            label: node,
            kind: BlockKind::Return,
        }),
        Some(rec) => {
            let rec = *rec;
            blocks.push(Block {
                label: node,
                kind: BlockKind::Branch {
                    var: rec.var,
                    x_index: x_index[&rec.var],
                    then_label: rec.high,
                    else_label: rec.low,
                    flip_on_else: rec.flip,
                },
            });
            translate(manager, rec.high, x_index, visited, blocks);
            translate(manager, rec.low, x_index, visited, blocks);
        }
    }
}

fn label(node: NodeId) -> String {
    if node.is_terminal() {
        "L_1".to_string()
    } else {
        format!("L_n{}", node.get())
    }
}

/// Worst-case block visits from each entry: longest label path to the
/// return block, return included.
fn step_bound(program: &BlockProgram) -> u64 {
    let index: HashMap<NodeId, &Block> = program.blocks.iter().map(|b| (b.label, b)).collect();
    let mut memo: HashMap<NodeId, u64> = HashMap::new();
    fn visits(
        label: NodeId,
        index: &HashMap<NodeId, &Block>,
        memo: &mut HashMap<NodeId, u64>,
    ) -> u64 {
        if let Some(&v) = memo.get(&label) {
            return v;
        }
        let v = match &index[&label].kind {
            BlockKind::Return => 1,
            BlockKind::Branch {
                then_label,
                else_label,
                ..
            } => 1 + visits(*then_label, index, memo).max(visits(*else_label, index, memo)),
        };
        memo.insert(label, v);
        v
    }
    program
        .entries
        .iter()
        .map(|e| visits(e.label, &index, &mut memo))
        .sum()
}

/// Renders the program as a self-contained C file defining exactly
/// `int K_bits(int *x, int action)` and `void K(int *x, int *u)`.
///
/// The output is ASCII, newline-terminated and byte-deterministic for a
/// given program.
pub fn emit_c_source(program: &BlockProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "/* synthesized controller: n={} state bits, r={} action bits, {} blocks, wcet bound {} steps */",
        program.n,
        program.r,
        program.blocks.len(),
        step_bound(program)
    );
    out.push_str(
        "/* contract: x[] entries must be 0 or 1; for states outside the controllable domain the outputs are unconstrained */\n",
    );
    out.push_str("int K_bits(int *x, int action) { int ret_b; switch(action) {\n");
    for (i, entry) in program.entries.iter().enumerate() {
        let _ = writeln!(
            out,
            "case {}: ret_b = {}; goto {};",
            i,
            entry.init_bit as u8,
            label(entry.label)
        );
    }
    out.push_str("}\n");
    for block in &program.blocks {
        match &block.kind {
            BlockKind::Return => {
                let _ = writeln!(out, "{}: return ret_b;", label(block.label));
            }
            BlockKind::Branch {
                x_index,
                then_label,
                else_label,
                flip_on_else,
                ..
            } => {
                if *flip_on_else {
                    let _ = writeln!(
                        out,
                        "{}: if (x[{}] == 1) goto {}; else {{ ret_b = !ret_b; goto {}; }}",
                        label(block.label),
                        x_index,
                        label(*then_label),
                        label(*else_label)
                    );
                } else {
                    let _ = writeln!(
                        out,
                        "{}: if (x[{}] == 1) goto {}; else goto {};",
                        label(block.label),
                        x_index,
                        label(*then_label),
                        label(*else_label)
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    let _ = writeln!(
        out,
        "void K(int *x, int *u) {{ int i; for (i = 0; i < {}; i++) u[i] = K_bits(x, i); }}",
        program.r
    );
    out
}

/// Node-count statistics and step bounds for a synthesis run.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthReport {
    /// Nodes reachable from K, terminal included.
    pub k_nodes: usize,
    /// Sum of per-function node counts (no cross-function sharing).
    pub f_unshared: usize,
    /// Blocks in the emitted program (shared nodes counted once).
    pub sw_blocks: usize,
    /// `(1 - sw_blocks / f_unshared) * 100`.
    pub gain_percent: f64,
    /// Height of each solved function's root.
    pub heights: Vec<u32>,
    /// `sum(height_i + 1)`, the total step bound for one controller call.
    pub wcet_steps_bound: u64,
}

impl SynthReport {
    /// One `key=value` line per field, in field order.
    pub fn key_value_lines(&self) -> String {
        let heights: Vec<String> = self.heights.iter().map(|h| h.to_string()).collect();
        format!(
            "k_nodes={}\nf_unshared={}\nsw_blocks={}\ngain_percent={:.2}\nheights={}\nwcet_steps_bound={}\n",
            self.k_nodes,
            self.f_unshared,
            self.sw_blocks,
            self.gain_percent,
            heights.join(","),
            self.wcet_steps_bound
        )
    }
}

/// Computes sharing statistics and step bounds for a solved instance.
pub fn compute_stats(
    spec: &ControllerSpec,
    solved: &SolvedController,
    program: &BlockProgram,
) -> SynthReport {
    let manager = &spec.manager;
    let k_nodes = manager
        .reachable_set(&[spec.k])
        .expect("spec handle belongs to its own manager")
        .len();
    let f_unshared = solved
        .functions
        .iter()
        .map(|&f| {
            manager
                .reachable_set(&[f])
                .expect("solved handle belongs to the spec manager")
                .len()
        })
        .sum::<usize>();
    let sw_blocks = program.blocks.len();
    let gain_percent = (1.0 - sw_blocks as f64 / f_unshared as f64) * 100.0;
    let heights: Vec<u32> = solved
        .functions
        .iter()
        .map(|f| manager.height(f.node()))
        .collect();
    let wcet_steps_bound = heights.iter().map(|&h| h as u64 + 1).sum();
    SynthReport {
        k_nodes,
        f_unshared,
        sw_blocks,
        gain_percent,
        heights,
        wcet_steps_bound,
    }
}
