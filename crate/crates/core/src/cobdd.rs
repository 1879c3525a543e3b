//! Reduced ordered binary decision diagrams with complemented else-edges.
//!
//! A manager owns all nodes of a multi-rooted diagram over a fixed variable
//! order. Functions are denoted by [`FuncHandle`]s: a node paired with a flip
//! bit. The semantics of a handle `(v, b)` is defined recursively: the
//! terminal denotes `!b`, and an internal node over `x` denotes
//! `x * sem(high, b) + !x * sem(low, b ^ flip(v))`. A function and its
//! complement share one node and differ only in the handle's flip bit, so
//! negation is constant-time and semantic equality coincides with handle
//! equality.
//!
//! The canonical form keeps then-edges structurally regular: when a node is
//! built from cofactor handles `(vt, bt)` and `(ve, be)`, the stored record
//! carries `flip = bt ^ be` and the returned handle carries `bt`.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU32, Ordering};

use thiserror::Error;

/// Errors reported by manager operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CobddError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("a manager needs at least one variable")]
    NoVariables,
    #[error("too many variables: {0} exceeds the supported maximum")]
    TooManyVariables(usize),
    #[error("variable index {0} is not declared in this manager")]
    UnknownVariable(u16),
    #[error("variable `{var}` must precede the top variables of both children")]
    OrderViolation { var: String },
    #[error("handle belongs to a different manager")]
    ForeignHandle,
    #[error("assignment has {got} entries but the manager declares {want} variables")]
    AssignmentLength { got: usize, want: usize },
    #[error("no value assigned to variable `{0}`")]
    UnassignedVariable(String),
    #[error("substitution target `{0}` occurs in the support of a replacement")]
    SubstitutionTargetInReplacement(String),
    #[error("substitution target `{0}` is listed twice")]
    DuplicateSubstitutionTarget(String),
}

/// Ordinal position of a variable in the global order (0-based).
///
/// The total order on variables is the order on indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u16);

impl VarId {
    pub fn new(index: u16) -> Self {
        VarId(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Stable identifier of a node within one manager.
///
/// Identifiers are consecutive integers in creation order and are never
/// reused. The terminal node is always [`NodeId::TERMINAL`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    /// The terminal node, shared by every manager.
    pub const TERMINAL: NodeId = NodeId(1);

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_terminal(self) -> bool {
        self == Self::TERMINAL
    }
}

/// A boolean function: a node plus a flip bit.
///
/// `(TERMINAL, false)` denotes constant true and `(TERMINAL, true)` denotes
/// constant false. Handles are plain values; equality is function equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FuncHandle {
    mgr: u32,
    node: NodeId,
    flip: bool,
}

impl FuncHandle {
    pub fn node(self) -> NodeId {
        self.node
    }

    pub fn flip(self) -> bool {
        self.flip
    }

    /// Complement of this function. Constant-time, allocates nothing.
    pub fn negate(self) -> FuncHandle {
        FuncHandle {
            flip: !self.flip,
            ..self
        }
    }

    /// `Some(value)` if this handle denotes a constant.
    pub fn constant_value(self) -> Option<bool> {
        if self.node.is_terminal() {
            Some(!self.flip)
        } else {
            None
        }
    }

    pub fn is_constant(self) -> bool {
        self.node.is_terminal()
    }
}

impl std::ops::Not for FuncHandle {
    type Output = FuncHandle;

    fn not(self) -> FuncHandle {
        self.negate()
    }
}

/// Stored shape of an internal node.
///
/// Invariants: `var` precedes the variables of both children (the terminal
/// counts as greater than every variable), and no record has
/// `high == low && !flip`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeRecord {
    pub var: VarId,
    pub high: NodeId,
    pub low: NodeId,
    pub flip: bool,
}

/// Binary connectives supported by [`CobddManager::apply`].
///
/// Everything else is expressed through these plus [`FuncHandle::negate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
}

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

/// The canonical node store: variable order, node records, unique table and
/// operation caches.
///
/// Node-creating operations take `&mut self`; queries take `&self`. Caches
/// are unbounded within a run and dead nodes are never collected.
pub struct CobddManager {
    id: u32,
    names: Vec<String>,
    index_of: HashMap<String, VarId>,
    /// Internal records; `NodeId(i as u32 + 2)` maps to `records[i]`.
    records: Vec<NodeRecord>,
    unique: HashMap<NodeRecord, NodeId>,
    apply_cache: HashMap<(BoolOp, FuncHandle, FuncHandle), FuncHandle>,
    compose_cache: HashMap<(FuncHandle, VarId, FuncHandle), FuncHandle>,
    exists_cache: HashMap<(FuncHandle, u32, u32), FuncHandle>,
    /// Interned variable sets for exists-cache keys.
    exists_sets: Vec<Vec<VarId>>,
    exists_set_ids: HashMap<Vec<VarId>, u32>,
}

impl std::fmt::Debug for CobddManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CobddManager")
            .field("variables", &self.names.len())
            .field("nodes", &self.node_count())
            .finish()
    }
}

impl CobddManager {
    /// Creates a manager over the given variables; declaration order defines
    /// the variable order. The store starts with only the terminal node.
    pub fn new<I, S>(variables: I) -> Result<Self, CobddError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = variables.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(CobddError::NoVariables);
        }
        if names.len() > u16::MAX as usize {
            return Err(CobddError::TooManyVariables(names.len()));
        }
        let mut index_of = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index_of.insert(name.clone(), VarId(i as u16)).is_some() {
                return Err(CobddError::DuplicateVariable(name.clone()));
            }
        }
        Ok(CobddManager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            names,
            index_of,
            records: Vec::new(),
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            compose_cache: HashMap::new(),
            exists_cache: HashMap::new(),
            exists_sets: Vec::new(),
            exists_set_ids: HashMap::new(),
        })
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    /// All variables in order.
    pub fn variables(&self) -> impl ExactSizeIterator<Item = VarId> + '_ {
        (0..self.names.len() as u16).map(VarId)
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.index_of.get(name).copied()
    }

    /// Number of stored nodes, terminal included.
    pub fn node_count(&self) -> usize {
        self.records.len() + 1
    }

    /// Handle for a boolean constant.
    pub fn constant(&self, value: bool) -> FuncHandle {
        FuncHandle {
            mgr: self.id,
            node: NodeId::TERMINAL,
            flip: !value,
        }
    }

    /// Handle for the single-variable function `v`.
    pub fn var_handle(&mut self, v: VarId) -> Result<FuncHandle, CobddError> {
        let t = self.constant(true);
        let e = self.constant(false);
        self.mk_node(v, t, e)
    }

    /// Record of an internal node; `None` for the terminal.
    pub fn node_record(&self, node: NodeId) -> Option<&NodeRecord> {
        if node.is_terminal() {
            None
        } else {
            Some(&self.records[node.0 as usize - 2])
        }
    }

    /// All internal records with their ids, in creation order.
    pub fn node_records(&self) -> impl Iterator<Item = (NodeId, &NodeRecord)> {
        self.records
            .iter()
            .enumerate()
            .map(|(i, r)| (NodeId(i as u32 + 2), r))
    }

    fn record(&self, node: NodeId) -> NodeRecord {
        debug_assert!(!node.is_terminal());
        self.records[node.0 as usize - 2]
    }

    /// Top variable of a node; `None` means terminal (greater than all).
    fn top_var(&self, node: NodeId) -> Option<VarId> {
        if node.is_terminal() {
            None
        } else {
            Some(self.record(node).var)
        }
    }

    fn check_handle(&self, f: FuncHandle) -> Result<(), CobddError> {
        if f.mgr != self.id {
            return Err(CobddError::ForeignHandle);
        }
        debug_assert!(f.node.is_terminal() || (f.node.0 as usize - 2) < self.records.len());
        Ok(())
    }

    fn check_var(&self, v: VarId) -> Result<(), CobddError> {
        if v.index() < self.names.len() {
            Ok(())
        } else {
            Err(CobddError::UnknownVariable(v.0))
        }
    }

    /// Builds the node for `var ? then_f : else_f` in canonical form.
    ///
    /// If the cofactors are equal the shared handle is returned and no node
    /// is created. Otherwise the unique table yields one record per
    /// complement pair: the record's flip is the XOR of the cofactor flips
    /// and the returned handle carries the then-cofactor's flip, so stored
    /// then-edges are never complemented.
    pub fn mk_node(
        &mut self,
        var: VarId,
        then_f: FuncHandle,
        else_f: FuncHandle,
    ) -> Result<FuncHandle, CobddError> {
        self.check_var(var)?;
        self.check_handle(then_f)?;
        self.check_handle(else_f)?;
        for child in [then_f.node, else_f.node] {
            if let Some(cv) = self.top_var(child) {
                if var >= cv {
                    return Err(CobddError::OrderViolation {
                        var: self.var_name(var).to_string(),
                    });
                }
            }
        }
        Ok(self.mk_node_raw(var, then_f, else_f))
    }

    /// `mk_node` without precondition checks, for internal recursions that
    /// guarantee ordering by construction.
    fn mk_node_raw(&mut self, var: VarId, then_f: FuncHandle, else_f: FuncHandle) -> FuncHandle {
        if then_f == else_f {
            return then_f;
        }
        let rec = NodeRecord {
            var,
            high: then_f.node,
            low: else_f.node,
            flip: then_f.flip ^ else_f.flip,
        };
        let node = match self.unique.get(&rec) {
            Some(&id) => id,
            None => {
                let id = NodeId(self.records.len() as u32 + 2);
                self.records.push(rec);
                self.unique.insert(rec, id);
                id
            }
        };
        FuncHandle {
            mgr: self.id,
            node,
            flip: then_f.flip,
        }
    }

    /// Cofactor pair of `f` at variable `m`: `(f|m=1, f|m=0)` as handles,
    /// assuming `m` is no deeper than `f`'s top variable.
    fn expand(&self, f: FuncHandle, m: VarId) -> (FuncHandle, FuncHandle) {
        match self.top_var(f.node) {
            Some(v) if v == m => {
                let rec = self.record(f.node);
                let t = FuncHandle {
                    mgr: f.mgr,
                    node: rec.high,
                    flip: f.flip,
                };
                let e = FuncHandle {
                    mgr: f.mgr,
                    node: rec.low,
                    flip: f.flip ^ rec.flip,
                };
                (t, e)
            }
            _ => (f, f),
        }
    }

    /// Evaluates `f` under a (possibly partial) assignment, one entry per
    /// declared variable. Walks a single root-to-terminal path accumulating
    /// flip parity; a missing value for a variable on the path is an error.
    pub fn eval(&self, f: FuncHandle, values: &[Option<bool>]) -> Result<bool, CobddError> {
        self.check_handle(f)?;
        if values.len() != self.names.len() {
            return Err(CobddError::AssignmentLength {
                got: values.len(),
                want: self.names.len(),
            });
        }
        let mut node = f.node;
        let mut parity = f.flip;
        while !node.is_terminal() {
            let rec = self.record(node);
            match values[rec.var.index()] {
                Some(true) => node = rec.high,
                Some(false) => {
                    parity ^= rec.flip;
                    node = rec.low;
                }
                None => {
                    return Err(CobddError::UnassignedVariable(
                        self.var_name(rec.var).to_string(),
                    ))
                }
            }
        }
        Ok(!parity)
    }

    /// [`eval`](Self::eval) with a total assignment.
    pub fn eval_bits(&self, f: FuncHandle, bits: &[bool]) -> Result<bool, CobddError> {
        if bits.len() != self.names.len() {
            return Err(CobddError::AssignmentLength {
                got: bits.len(),
                want: self.names.len(),
            });
        }
        let values: Vec<Option<bool>> = bits.iter().map(|&b| Some(b)).collect();
        self.eval(f, &values)
    }

    /// Applies a binary connective. Memoized on `(op, f, g)` including flip
    /// bits; terminal cases short-circuit without recursion.
    pub fn apply(
        &mut self,
        op: BoolOp,
        f: FuncHandle,
        g: FuncHandle,
    ) -> Result<FuncHandle, CobddError> {
        self.check_handle(f)?;
        self.check_handle(g)?;
        Ok(self.apply_rec(op, f, g))
    }

    fn apply_shortcut(&self, op: BoolOp, f: FuncHandle, g: FuncHandle) -> Option<FuncHandle> {
        match op {
            BoolOp::And => match (f.constant_value(), g.constant_value()) {
                (Some(false), _) | (_, Some(false)) => Some(self.constant(false)),
                (Some(true), _) => Some(g),
                (_, Some(true)) => Some(f),
                _ if f == g => Some(f),
                _ if f == g.negate() => Some(self.constant(false)),
                _ => None,
            },
            BoolOp::Or => match (f.constant_value(), g.constant_value()) {
                (Some(true), _) | (_, Some(true)) => Some(self.constant(true)),
                (Some(false), _) => Some(g),
                (_, Some(false)) => Some(f),
                _ if f == g => Some(f),
                _ if f == g.negate() => Some(self.constant(true)),
                _ => None,
            },
            BoolOp::Xor => match (f.constant_value(), g.constant_value()) {
                (Some(false), _) => Some(g),
                (Some(true), _) => Some(g.negate()),
                (_, Some(false)) => Some(f),
                (_, Some(true)) => Some(f.negate()),
                _ if f == g => Some(self.constant(false)),
                _ if f == g.negate() => Some(self.constant(true)),
                _ => None,
            },
        }
    }

    fn apply_rec(&mut self, op: BoolOp, f: FuncHandle, g: FuncHandle) -> FuncHandle {
        if let Some(res) = self.apply_shortcut(op, f, g) {
            return res;
        }
        let key = (op, f, g);
        if let Some(&res) = self.apply_cache.get(&key) {
            return res;
        }
        let m = match (self.top_var(f.node), self.top_var(g.node)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!("terminal pairs are short-circuited"),
        };
        let (ft, fe) = self.expand(f, m);
        let (gt, ge) = self.expand(g, m);
        let t = self.apply_rec(op, ft, gt);
        let e = self.apply_rec(op, fe, ge);
        let res = self.mk_node_raw(m, t, e);
        self.apply_cache.insert(key, res);
        res
    }

    /// `f` with `var` fixed to `value`. `var` need not occur in `f`.
    pub fn cofactor(
        &mut self,
        f: FuncHandle,
        var: VarId,
        value: bool,
    ) -> Result<FuncHandle, CobddError> {
        self.check_handle(f)?;
        self.check_var(var)?;
        let mut memo = HashMap::new();
        Ok(self.cofactor_rec(f, var, value, &mut memo))
    }

    fn cofactor_rec(
        &mut self,
        f: FuncHandle,
        var: VarId,
        value: bool,
        memo: &mut HashMap<FuncHandle, FuncHandle>,
    ) -> FuncHandle {
        let top = match self.top_var(f.node) {
            None => return f,
            Some(v) if v > var => return f,
            Some(v) => v,
        };
        if top == var {
            let (t, e) = self.expand(f, var);
            return if value { t } else { e };
        }
        if let Some(&res) = memo.get(&f) {
            return res;
        }
        let (ft, fe) = self.expand(f, top);
        let t = self.cofactor_rec(ft, var, value, memo);
        let e = self.cofactor_rec(fe, var, value, memo);
        let res = self.mk_node_raw(top, t, e);
        memo.insert(f, res);
        res
    }

    /// Existential quantification over a set of variables:
    /// `∃v f = f|v=0 + f|v=1`, folded over the set. The result's support is
    /// disjoint from `vars`.
    pub fn exists_many(&mut self, f: FuncHandle, vars: &[VarId]) -> Result<FuncHandle, CobddError> {
        self.check_handle(f)?;
        for &v in vars {
            self.check_var(v)?;
        }
        let mut sorted: Vec<VarId> = vars.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Ok(f);
        }
        let set = match self.exists_set_ids.get(&sorted) {
            Some(&id) => id,
            None => {
                let id = self.exists_sets.len() as u32;
                self.exists_sets.push(sorted.clone());
                self.exists_set_ids.insert(sorted, id);
                id
            }
        };
        Ok(self.exists_rec(f, set, 0))
    }

    fn exists_rec(&mut self, f: FuncHandle, set: u32, mut start: usize) -> FuncHandle {
        let top = match self.top_var(f.node) {
            None => return f,
            Some(v) => v,
        };
        // Variables above f's top cannot occur below; quantifying them is identity.
        let len = self.exists_sets[set as usize].len();
        while start < len && self.exists_sets[set as usize][start] < top {
            start += 1;
        }
        if start == len {
            return f;
        }
        let key = (f, set, start as u32);
        if let Some(&res) = self.exists_cache.get(&key) {
            return res;
        }
        let quantify_here = self.exists_sets[set as usize][start] == top;
        let (ft, fe) = self.expand(f, top);
        let res = if quantify_here {
            let t = self.exists_rec(ft, set, start + 1);
            let e = self.exists_rec(fe, set, start + 1);
            self.apply_rec(BoolOp::Or, t, e)
        } else {
            let t = self.exists_rec(ft, set, start);
            let e = self.exists_rec(fe, set, start);
            self.mk_node_raw(top, t, e)
        };
        self.exists_cache.insert(key, res);
        res
    }

    /// Simultaneous substitution `f[x_i := g_i]`.
    ///
    /// Requires that no substituted variable occurs in the support of any
    /// replacement; under that precondition sequential single-variable
    /// composition is order-independent, and that is how it is implemented:
    /// `compose(f, x <- g) = g * f|x=1 + !g * f|x=0`.
    pub fn compose_many(
        &mut self,
        f: FuncHandle,
        subs: &[(VarId, FuncHandle)],
    ) -> Result<FuncHandle, CobddError> {
        self.check_handle(f)?;
        let mut targets = BTreeSet::new();
        for &(var, g) in subs {
            self.check_var(var)?;
            self.check_handle(g)?;
            if !targets.insert(var) {
                return Err(CobddError::DuplicateSubstitutionTarget(
                    self.var_name(var).to_string(),
                ));
            }
        }
        for &(_, g) in subs {
            let support = self.support(g)?;
            if let Some(&hit) = support.intersection(&targets).next() {
                return Err(CobddError::SubstitutionTargetInReplacement(
                    self.var_name(hit).to_string(),
                ));
            }
        }
        let mut acc = f;
        for &(var, g) in subs {
            acc = self.compose_one(acc, var, g);
        }
        Ok(acc)
    }

    fn compose_one(&mut self, f: FuncHandle, var: VarId, g: FuncHandle) -> FuncHandle {
        let key = (f, var, g);
        if let Some(&res) = self.compose_cache.get(&key) {
            return res;
        }
        let mut memo = HashMap::new();
        let c1 = self.cofactor_rec(f, var, true, &mut memo);
        let mut memo = HashMap::new();
        let c0 = self.cofactor_rec(f, var, false, &mut memo);
        let a = self.apply_rec(BoolOp::And, g, c1);
        let b = self.apply_rec(BoolOp::And, g.negate(), c0);
        let res = self.apply_rec(BoolOp::Or, a, b);
        self.compose_cache.insert(key, res);
        res
    }

    /// Every node on some path from one of the roots, terminal included.
    /// The returned set iterates in ascending id order.
    pub fn reachable_set(&self, roots: &[FuncHandle]) -> Result<BTreeSet<NodeId>, CobddError> {
        for &r in roots {
            self.check_handle(r)?;
        }
        let mut seen = BTreeSet::new();
        let mut stack: Vec<NodeId> = roots.iter().map(|r| r.node).collect();
        while let Some(node) = stack.pop() {
            if !seen.insert(node) {
                continue;
            }
            if let Some(rec) = self.node_record(node) {
                stack.push(rec.high);
                stack.push(rec.low);
            }
        }
        Ok(seen)
    }

    /// Variables occurring on some path from `f`'s node.
    pub fn support(&self, f: FuncHandle) -> Result<BTreeSet<VarId>, CobddError> {
        let reach = self.reachable_set(&[f])?;
        Ok(reach
            .into_iter()
            .filter_map(|n| self.node_record(n).map(|r| r.var))
            .collect())
    }

    /// Length of the longest path from `v` to the terminal. The terminal has
    /// height 0; every height is bounded by the variable count.
    pub fn height(&self, v: NodeId) -> u32 {
        let mut memo = HashMap::new();
        self.height_memo(v, &mut memo)
    }

    fn height_memo(&self, v: NodeId, memo: &mut HashMap<NodeId, u32>) -> u32 {
        if v.is_terminal() {
            return 0;
        }
        if let Some(&h) = memo.get(&v) {
            return h;
        }
        let rec = self.record(v);
        let h = 1 + self
            .height_memo(rec.high, memo)
            .max(self.height_memo(rec.low, memo));
        memo.insert(v, h);
        h
    }
}
