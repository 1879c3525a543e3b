//! Brute-force ground truth and end-to-end verification.
//!
//! Ground truth for the control relation is always the parsed cube list,
//! never the diagram engine's own algebra; the two meet only in the verdict
//! comparison. Exhaustive mode enumerates every state; beyond the variable
//! cap a seeded sample is used instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::blif::BlifModel;
use crate::cobdd::{CobddError, CobddManager, FuncHandle, VarId};
use crate::codegen::BlockProgram;
use crate::interp::{self, InterpError};
use crate::solver::{ControllerSpec, SolvedController};

/// Largest variable count enumerated exhaustively.
pub const EXHAUSTIVE_CAP: usize = 24;

/// Seed used when sampling is requested without an explicit seed.
pub const DEFAULT_SEED: u64 = 20210;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} variables exceed the exhaustive cap of {cap}", cap = EXHAUSTIVE_CAP)]
    TooManyVariables(usize),
    #[error(transparent)]
    Cobdd(#[from] CobddError),
    #[error("interpreter failure on a generated program: {0}")]
    Interp(#[from] InterpError),
}

/// Truth table of a handle over the given variables, rows in binary counting
/// order with `vars[0]` as the most significant bit.
pub fn truth_table(
    manager: &CobddManager,
    f: FuncHandle,
    vars: &[VarId],
) -> Result<Vec<bool>, OracleError> {
    if vars.len() > EXHAUSTIVE_CAP {
        return Err(OracleError::TooManyVariables(vars.len()));
    }
    let rows = 1u64 << vars.len();
    let mut table = Vec::with_capacity(rows as usize);
    let mut assignment = vec![None; manager.var_count()];
    for row in 0..rows {
        for (i, &v) in vars.iter().enumerate() {
            assignment[v.index()] = Some(row >> (vars.len() - 1 - i) & 1 == 1);
        }
        table.push(manager.eval(f, &assignment)?);
    }
    Ok(table)
}

/// Truth table of the cube cover over all model inputs, same row order.
pub fn cube_truth_table(model: &BlifModel) -> Result<Vec<bool>, OracleError> {
    let n = model.inputs.len();
    if n > EXHAUSTIVE_CAP {
        return Err(OracleError::TooManyVariables(n));
    }
    let rows = 1u64 << n;
    let mut table = Vec::with_capacity(rows as usize);
    let mut bits = vec![false; n];
    for row in 0..rows {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = row >> (n - 1 - i) & 1 == 1;
        }
        table.push(model.eval(&bits));
    }
    Ok(table)
}

/// How states are drawn for verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// One failing state with the reason it failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub state: Vec<bool>,
    pub reason: String,
}

/// Verdict of a verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub pass: bool,
    pub mode: VerifyMode,
    pub states_checked: u64,
    pub in_domain: u64,
    pub empty_domain: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl std::fmt::Display for VerifyOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.mode {
            VerifyMode::Exhaustive => writeln!(f, "mode=exhaustive")?,
            VerifyMode::Sampled { samples, seed } => {
                writeln!(f, "mode=sampled samples={samples} seed={seed}")?
            }
        }
        writeln!(f, "states_checked={}", self.states_checked)?;
        writeln!(f, "in_domain={}", self.in_domain)?;
        writeln!(f, "counterexamples={}", self.counterexamples.len())?;
        if self.empty_domain {
            writeln!(f, "warning: empty domain (no state admits any action)")?;
        }
        for cex in &self.counterexamples {
            let bits: String = cex
                .state
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            writeln!(f, "counterexample x={bits}: {}", cex.reason)?;
        }
        if self.pass {
            match self.mode {
                VerifyMode::Exhaustive => writeln!(
                    f,
                    "{}/{} states verified",
                    self.states_checked, self.states_checked
                )?,
                VerifyMode::Sampled { seed, .. } => writeln!(
                    f,
                    "{} sampled states verified (seed={seed})",
                    self.states_checked
                )?,
            }
            write!(f, "PASS")
        } else {
            write!(f, "FAIL")
        }
    }
}

/// Checks the synthesized artifacts against the cube-list ground truth.
///
/// For every state `x` drawn by `mode`:
///
/// - if some action satisfies the cover at `x`, the solved tuple `F(x)`
///   must satisfy it too;
/// - the interpreter's outputs must equal `F(x)` bit for bit;
/// - per-bit steps must stay within `height + 1` and the total within
///   `r * (n + 1)`;
/// - the solved domain function must agree with cube-level satisfiability.
pub fn verify_controller(
    model: &BlifModel,
    spec: &ControllerSpec,
    solved: &SolvedController,
    program: &BlockProgram,
    mode: VerifyMode,
) -> Result<VerifyOutcome, OracleError> {
    let manager = &spec.manager;
    let n = spec.n();
    let r = spec.r();
    let heights: Vec<u32> = solved
        .functions
        .iter()
        .map(|f| manager.height(f.node()))
        .collect();

    let mut outcome = VerifyOutcome {
        pass: true,
        mode,
        states_checked: 0,
        in_domain: 0,
        empty_domain: false,
        counterexamples: Vec::new(),
    };

    let check_state = |x: &[bool], outcome: &mut VerifyOutcome| -> Result<(), OracleError> {
        outcome.states_checked += 1;
        let mut assignment: Vec<Option<bool>> = vec![None; manager.var_count()];
        for (i, &v) in spec.state_vars().iter().enumerate() {
            assignment[v.index()] = Some(x[i]);
        }

        // Ground truth: does any action satisfy the cover at x?
        let mut full = vec![false; manager.var_count()];
        for (i, &v) in spec.state_vars().iter().enumerate() {
            full[v.index()] = x[i];
        }
        let mut dom_oracle = false;
        for u in 0..1u64 << r {
            for (j, &v) in spec.action_vars().iter().enumerate() {
                full[v.index()] = u >> (r - 1 - j) & 1 == 1;
            }
            if model.eval(&full) {
                dom_oracle = true;
                break;
            }
        }
        if dom_oracle {
            outcome.in_domain += 1;
        }

        let dom_solved = manager.eval(solved.dom, &assignment)?;
        if dom_solved != dom_oracle {
            outcome.counterexamples.push(Counterexample {
                state: x.to_vec(),
                reason: format!(
                    "domain function says {dom_solved} but the cube cover says {dom_oracle}"
                ),
            });
        }

        let mut f_bits = Vec::with_capacity(r);
        for &func in &solved.functions {
            f_bits.push(manager.eval(func, &assignment)?);
        }

        if dom_oracle {
            for (j, &v) in spec.action_vars().iter().enumerate() {
                full[v.index()] = f_bits[j];
            }
            if !model.eval(&full) {
                outcome.counterexamples.push(Counterexample {
                    state: x.to_vec(),
                    reason: format!(
                        "K(x, F(x)) = 0 for solved action bits {}",
                        bits_string(&f_bits)
                    ),
                });
            }
        }

        let mut total_steps = 0usize;
        for action in 0..r {
            let trace = interp::run_kbits(program, x, action)?;
            if trace.result_bit != f_bits[action] {
                outcome.counterexamples.push(Counterexample {
                    state: x.to_vec(),
                    reason: format!(
                        "interpreter bit {} is {} but the solved function gives {} (trace {})",
                        action,
                        trace.result_bit as u8,
                        f_bits[action] as u8,
                        trace
                            .visited_labels
                            .iter()
                            .map(|l| l.get().to_string())
                            .collect::<Vec<_>>()
                            .join("->")
                    ),
                });
            }
            let bound = heights[action] as usize + 1;
            if trace.steps > bound {
                outcome.counterexamples.push(Counterexample {
                    state: x.to_vec(),
                    reason: format!(
                        "bit {} took {} steps, bound is {}",
                        action, trace.steps, bound
                    ),
                });
            }
            total_steps += trace.steps;
        }
        if total_steps > r * (n + 1) {
            outcome.counterexamples.push(Counterexample {
                state: x.to_vec(),
                reason: format!(
                    "controller took {} steps, bound is {}",
                    total_steps,
                    r * (n + 1)
                ),
            });
        }
        Ok(())
    };

    match mode {
        VerifyMode::Exhaustive => {
            if n + r > EXHAUSTIVE_CAP {
                return Err(OracleError::TooManyVariables(n + r));
            }
            let mut x = vec![false; n];
            for row in 0..1u64 << n {
                for (i, b) in x.iter_mut().enumerate() {
                    *b = row >> (n - 1 - i) & 1 == 1;
                }
                check_state(&x, &mut outcome)?;
            }
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = vec![false; n];
            for _ in 0..samples {
                for b in x.iter_mut() {
                    *b = rng.random();
                }
                check_state(&x, &mut outcome)?;
            }
        }
    }

    outcome.empty_domain = outcome.in_domain == 0;
    outcome.pass = outcome.counterexamples.is_empty();
    Ok(outcome)
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
