//! Solving the boolean functional equation `K(x, F(x)) = 1`.
//!
//! Action bits are resolved in declared order, each one greedily set to 1
//! when satisfiable: bit `i` is obtained by substituting the already-solved
//! bits and the constant true into `K`, then projecting away the remaining
//! action variables. For every state in the controllable domain the
//! resulting tuple satisfies `K`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cobdd::{CobddError, CobddManager, FuncHandle, VarId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("state and action variables must be disjoint; `{0}` appears in both")]
    OverlappingVariable(String),
    #[error("at least one state variable is required")]
    NoStateVariables,
    #[error("at least one action variable is required")]
    NoActionVariables,
    #[error("variable `{0}` occurs in K but is neither a state nor an action variable")]
    UncoveredSupport(String),
    #[error(transparent)]
    Cobdd(#[from] CobddError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Cobdd(#[from] CobddError),
    #[error("solved bit {index} still depends on action variable `{var}`")]
    ActionInSolvedSupport { index: usize, var: String },
}

/// A control relation together with the state/action split of its variables.
#[derive(Debug)]
pub struct ControllerSpec {
    pub manager: CobddManager,
    pub k: FuncHandle,
    state_vars: Vec<VarId>,
    action_vars: Vec<VarId>,
}

impl ControllerSpec {
    /// Validates the split: both lists non-empty, disjoint, and jointly
    /// covering the support of `k`.
    pub fn new(
        manager: CobddManager,
        k: FuncHandle,
        state_vars: Vec<VarId>,
        action_vars: Vec<VarId>,
    ) -> Result<Self, SpecError> {
        if state_vars.is_empty() {
            return Err(SpecError::NoStateVariables);
        }
        if action_vars.is_empty() {
            return Err(SpecError::NoActionVariables);
        }
        let states: BTreeSet<VarId> = state_vars.iter().copied().collect();
        let actions: BTreeSet<VarId> = action_vars.iter().copied().collect();
        if let Some(&v) = states.intersection(&actions).next() {
            return Err(SpecError::OverlappingVariable(
                manager.var_name(v).to_string(),
            ));
        }
        let support = manager.support(k)?;
        for v in support {
            if !states.contains(&v) && !actions.contains(&v) {
                return Err(SpecError::UncoveredSupport(manager.var_name(v).to_string()));
            }
        }
        Ok(ControllerSpec {
            manager,
            k,
            state_vars,
            action_vars,
        })
    }

    pub fn state_vars(&self) -> &[VarId] {
        &self.state_vars
    }

    pub fn action_vars(&self) -> &[VarId] {
        &self.action_vars
    }

    /// Number of state bits.
    pub fn n(&self) -> usize {
        self.state_vars.len()
    }

    /// Number of action bits.
    pub fn r(&self) -> usize {
        self.action_vars.len()
    }
}

/// Per-bit solutions `f_1..f_r` plus the characteristic function of the
/// controllable domain.
#[derive(Debug, Clone)]
pub struct SolvedController {
    pub functions: Vec<FuncHandle>,
    pub dom: FuncHandle,
}

/// Characteristic function of the controllable states: `∃u K(x, u)`.
pub fn compute_dom(spec: &mut ControllerSpec) -> Result<FuncHandle, CobddError> {
    let actions = spec.action_vars.clone();
    spec.manager.exists_many(spec.k, &actions)
}

/// Solves `K(x, F(x)) = 1` for one function per action bit.
///
/// For each `i`, `f_i = ∃u_{i+1}..u_r K(x, f_1(x), .., f_{i-1}(x), 1,
/// u_{i+1}, .., u_r)`. No solved bit depends on an action variable, and for
/// every state in the domain the tuple `(f_1(x), .., f_r(x))` satisfies `K`.
pub fn solve_functional_eq(spec: &mut ControllerSpec) -> Result<SolvedController, SolveError> {
    let actions = spec.action_vars.clone();
    let r = actions.len();
    let mut functions: Vec<FuncHandle> = Vec::with_capacity(r);
    for i in 0..r {
        let mut subs: Vec<(VarId, FuncHandle)> = actions[..i]
            .iter()
            .copied()
            .zip(functions.iter().copied())
            .collect();
        subs.push((actions[i], spec.manager.constant(true)));
        let instantiated = spec.manager.compose_many(spec.k, &subs)?;
        let f = spec.manager.exists_many(instantiated, &actions[i + 1..])?;
        functions.push(f);
    }
    for (i, &f) in functions.iter().enumerate() {
        let support = spec.manager.support(f)?;
        if let Some(&v) = support.iter().find(|v| actions.contains(v)) {
            return Err(SolveError::ActionInSolvedSupport {
                index: i,
                var: spec.manager.var_name(v).to_string(),
            });
        }
    }
    let dom = compute_dom(spec)?;
    Ok(SolvedController { functions, dom })
}
