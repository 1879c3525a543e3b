//! DOT export of diagram graphs for inspection.
//!
//! Then edges are solid, regular else edges are dashed, complemented else
//! edges are dotted. Optional per-root pointers use the same convention for
//! the root handle's flip bit. Output is deterministic: nodes ascending by
//! id, then edges grouped by source, then root pointers.

use std::fmt::Write as _;

use crate::cobdd::{CobddError, CobddManager, FuncHandle};

/// Renders the subgraph reachable from `roots` as a DOT digraph.
///
/// `labels` annotates the roots with plaintext pointer nodes; it must be
/// empty or have one entry per root.
pub fn emit_dot(
    manager: &CobddManager,
    roots: &[FuncHandle],
    labels: &[String],
) -> Result<String, CobddError> {
    assert!(
        labels.is_empty() || labels.len() == roots.len(),
        "labels must be empty or match the root count"
    );
    let reach = manager.reachable_set(roots)?;
    let mut out = String::new();
    out.push_str("digraph cobdd {\n");
    for &node in &reach {
        match manager.node_record(node) {
            None => {
                let _ = writeln!(out, "  n{} [label=\"1\" shape=box];", node.get());
            }
            Some(rec) => {
                let _ = writeln!(
                    out,
                    "  n{} [label=\"{}\"];",
                    node.get(),
                    manager.var_name(rec.var)
                );
            }
        }
    }
    for &node in &reach {
        if let Some(rec) = manager.node_record(node) {
            let _ = writeln!(
                out,
                "  n{} -> n{} [style=solid];",
                node.get(),
                rec.high.get()
            );
            let style = if rec.flip { "dotted" } else { "dashed" };
            let _ = writeln!(
                out,
                "  n{} -> n{} [style={}];",
                node.get(),
                rec.low.get(),
                style
            );
        }
    }
    for (root, name) in roots.iter().zip(labels) {
        let _ = writeln!(out, "  {name} [shape=plaintext];");
        let style = if root.flip() { "dotted" } else { "solid" };
        let _ = writeln!(
            out,
            "  {} -> n{} [style={}];",
            name,
            root.node().get(),
            style
        );
    }
    out.push_str("}\n");
    Ok(out)
}
