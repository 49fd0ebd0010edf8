//! Hash-consed extended algebraic decision diagrams.
//!
//! An [`XaddStore`] owns an append-only node table, the interned decision
//! table (whose registration order fixes the diagram variable order), and
//! the operation caches. Every diagram handled by the solver is a [`NodeId`]
//! into one store. Stores are single-owner mutable: operations mutate caches
//! and must not run concurrently on one store; independent solves fork the
//! store and work on their own copy.

mod apply;
mod dot;

pub use apply::BinOp;

use crate::expr::{
    Assignment, Decision, ExprError, ExtPoly, ExtVal, NormalizedIneq, Poly, Rat, VarId, VarKind,
    VarRegistry,
};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use thiserror::Error;

static NEXT_OWNER: AtomicU32 = AtomicU32::new(1);

/// Errors raised by diagram operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum XaddError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("node budget exceeded ({0} nodes allocated this iteration)")]
    BudgetExceeded(usize),
    #[error("NodeId belongs to a different store")]
    ForeignNode,
    #[error("undefined extended arithmetic: {0}")]
    UndefinedArithmetic(String),
    #[error("variable `{0}` is not boolean")]
    NotBoolean(String),
    #[error("nonlinear decision where a linear one is required: {0}")]
    NonlinearDecision(String),
    #[error("decision is not univariate quadratic: {0}")]
    NotUnivariateQuadratic(String),
}

/// Handle to a node in one particular store. The owner tag catches ids that
/// leak across unrelated stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    owner: u32,
    index: u32,
}

impl NodeId {
    pub fn index(self) -> usize {
        self.index as usize
    }
}

/// Policy data attached to a terminal: the action that achieves the leaf
/// value and, per continuous parameter, the substituted maximizer (a
/// case-valued diagram in the same store).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Annotation {
    pub action: Option<String>,
    /// Sorted by parameter VarId.
    pub params: Vec<(VarId, NodeId)>,
}

impl Annotation {
    pub fn param(&self, v: VarId) -> Option<NodeId> {
        self.params
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, n)| n)
    }

    fn set_param(&mut self, v: VarId, n: NodeId) {
        match self.params.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.params[i].1 = n,
            Err(i) => self.params.insert(i, (v, n)),
        }
    }
}

/// One stored node: a terminal with an optional policy annotation, or an
/// internal decision node with high (true) and low (false) branches.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum XaddNode {
    Leaf {
        value: ExtPoly,
        ann: Option<Annotation>,
    },
    Internal {
        dec: u32,
        hi: NodeId,
        lo: NodeId,
    },
}

/// Decision ordering policy, fixed at store construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderMode {
    /// First registration wins, booleans and inequalities interleaved.
    #[default]
    Registration,
    /// All boolean decisions order before all inequality decisions.
    BooleansFirst,
}

/// Counters surfaced through solve statistics.
#[derive(Debug, Clone, Default)]
pub struct StoreStats {
    pub implication_tests: u64,
    pub nodes_pruned: u64,
    pub sat_tests: u64,
    pub root_approximations: u64,
}

/// Hash-consed diagram store. See the module docs for the ownership rules.
#[derive(Debug, Clone)]
pub struct XaddStore {
    owner: u32,
    registry: VarRegistry,
    nodes: Vec<XaddNode>,
    leaf_cache: HashMap<(ExtPoly, Option<Annotation>), NodeId>,
    node_cache: HashMap<(u32, NodeId, NodeId), NodeId>,
    apply_cache: HashMap<(BinOp, NodeId, NodeId), NodeId>,
    decisions: Vec<Decision>,
    dec_keys: Vec<u64>,
    dec_index: HashMap<Decision, u32>,
    order_mode: OrderMode,
    /// Nodes allocated since the last `begin_epoch`, checked against the
    /// budget so blow-ups abort cleanly instead of exhausting memory.
    epoch_alloc: usize,
    budget: Option<usize>,
    pub stats: StoreStats,
}

impl Default for XaddStore {
    fn default() -> Self {
        Self::new()
    }
}

impl XaddStore {
    pub fn new() -> Self {
        Self::with_order_mode(OrderMode::Registration)
    }

    pub fn with_order_mode(order_mode: OrderMode) -> Self {
        XaddStore {
            owner: NEXT_OWNER.fetch_add(1, AtomicOrdering::Relaxed),
            registry: VarRegistry::new(),
            nodes: Vec::new(),
            leaf_cache: HashMap::new(),
            node_cache: HashMap::new(),
            apply_cache: HashMap::new(),
            decisions: Vec::new(),
            dec_keys: Vec::new(),
            dec_index: HashMap::new(),
            order_mode,
            epoch_alloc: 0,
            budget: None,
            stats: StoreStats::default(),
        }
    }

    /// Copy the store, keeping all NodeIds valid in the copy. Used to hand a
    /// model's diagrams to a solver without touching the original.
    pub fn fork(&self) -> Self {
        self.clone()
    }

    pub fn registry(&self) -> &VarRegistry {
        &self.registry
    }

    pub fn registry_mut(&mut self) -> &mut VarRegistry {
        &mut self.registry
    }

    pub fn set_budget(&mut self, budget: Option<usize>) {
        self.budget = budget;
    }

    /// Reset the per-iteration allocation counter.
    pub fn begin_epoch(&mut self) {
        self.epoch_alloc = 0;
    }

    pub fn epoch_allocations(&self) -> usize {
        self.epoch_alloc
    }

    pub fn total_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn check_owner(&self, id: NodeId) -> Result<(), XaddError> {
        if id.owner != self.owner || id.index() >= self.nodes.len() {
            return Err(XaddError::ForeignNode);
        }
        Ok(())
    }

    pub fn node(&self, id: NodeId) -> &XaddNode {
        &self.nodes[id.index()]
    }

    pub fn decision(&self, idx: u32) -> &Decision {
        &self.decisions[idx as usize]
    }

    pub fn decision_count(&self) -> usize {
        self.decisions.len()
    }

    /// Order key of a registered decision; paths must visit strictly
    /// increasing keys.
    pub fn order_key(&self, idx: u32) -> u64 {
        self.dec_keys[idx as usize]
    }

    fn alloc(&mut self, node: XaddNode) -> Result<NodeId, XaddError> {
        if let Some(budget) = self.budget {
            if self.epoch_alloc >= budget {
                return Err(XaddError::BudgetExceeded(self.epoch_alloc));
            }
        }
        let id = NodeId {
            owner: self.owner,
            index: self.nodes.len() as u32,
        };
        self.nodes.push(node);
        self.epoch_alloc += 1;
        Ok(id)
    }

    /// Intern a decision; the first registration fixes its order key.
    pub fn register_decision(&mut self, dec: Decision) -> u32 {
        if let Some(&idx) = self.dec_index.get(&dec) {
            return idx;
        }
        let idx = self.decisions.len() as u32;
        let class = match (&dec, self.order_mode) {
            (Decision::Bool(_), OrderMode::BooleansFirst) => 0u64,
            (Decision::Ineq(_), OrderMode::BooleansFirst) => 1u64,
            _ => 0u64,
        };
        self.dec_keys.push((class << 32) | idx as u64);
        self.dec_index.insert(dec.clone(), idx);
        self.decisions.push(dec);
        idx
    }

    // ---- terminal constructors ----

    pub fn leaf_ann(
        &mut self,
        value: ExtPoly,
        ann: Option<Annotation>,
    ) -> Result<NodeId, XaddError> {
        let key = (value, ann);
        if let Some(&id) = self.leaf_cache.get(&key) {
            return Ok(id);
        }
        let id = self.alloc(XaddNode::Leaf {
            value: key.0.clone(),
            ann: key.1.clone(),
        })?;
        self.leaf_cache.insert(key, id);
        Ok(id)
    }

    pub fn leaf(&mut self, value: ExtPoly) -> Result<NodeId, XaddError> {
        self.leaf_ann(value, None)
    }

    pub fn constant(&mut self, c: Rat) -> Result<NodeId, XaddError> {
        self.leaf(ExtPoly::constant(c))
    }

    pub fn zero(&mut self) -> Result<NodeId, XaddError> {
        self.leaf(ExtPoly::zero())
    }

    pub fn one(&mut self) -> Result<NodeId, XaddError> {
        self.constant(Rat::one())
    }

    pub fn neg_inf(&mut self) -> Result<NodeId, XaddError> {
        self.leaf(ExtPoly::NegInf)
    }

    pub fn pos_inf(&mut self) -> Result<NodeId, XaddError> {
        self.leaf(ExtPoly::PosInf)
    }

    pub fn poly_leaf(&mut self, p: Poly) -> Result<NodeId, XaddError> {
        self.leaf(ExtPoly::Finite(p))
    }

    // ---- internal node constructors ----

    /// Canonical internal node: returns `lo` when branches coincide,
    /// otherwise the unique id for the triple.
    pub fn get_node(&mut self, dec: u32, hi: NodeId, lo: NodeId) -> Result<NodeId, XaddError> {
        self.check_owner(hi)?;
        self.check_owner(lo)?;
        if hi == lo {
            return Ok(lo);
        }
        if let Some(&id) = self.node_cache.get(&(dec, hi, lo)) {
            return Ok(id);
        }
        let id = self.alloc(XaddNode::Internal { dec, hi, lo })?;
        self.node_cache.insert((dec, hi, lo), id);
        Ok(id)
    }

    /// Branch on `p >= 0`, normalizing the polynomial and folding constant
    /// tests; a flipped normalization swaps the branches.
    pub fn node_from_ineq(
        &mut self,
        p: Poly,
        hi: NodeId,
        lo: NodeId,
    ) -> Result<NodeId, XaddError> {
        match Decision::ineq(p) {
            NormalizedIneq::Always(true) => Ok(hi),
            NormalizedIneq::Always(false) => Ok(lo),
            NormalizedIneq::Dec { dec, flipped } => {
                let idx = self.register_decision(dec);
                let (h, l) = if flipped { (lo, hi) } else { (hi, lo) };
                self.get_node(idx, h, l)
            }
        }
    }

    /// Branch on a boolean variable.
    pub fn node_bool(&mut self, v: VarId, hi: NodeId, lo: NodeId) -> Result<NodeId, XaddError> {
        if !self.registry.kind(v).is_boolean() {
            return Err(XaddError::NotBoolean(self.registry.name(v).to_string()));
        }
        let idx = self.register_decision(Decision::Bool(v));
        self.get_node(idx, hi, lo)
    }

    // ---- structural operations ----

    /// Bottom-up rebuild removing redundant branches and sharing isomorphic
    /// subgraphs. All constructors already hash-cons, so this is the
    /// canonicalization entry point for externally assembled diagrams.
    pub fn reduce(&mut self, root: NodeId) -> Result<NodeId, XaddError> {
        self.check_owner(root)?;
        let mut cache: HashMap<NodeId, NodeId> = HashMap::new();
        self.reduce_rec(root, &mut cache)
    }

    fn reduce_rec(
        &mut self,
        f: NodeId,
        cache: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId, XaddError> {
        if let Some(&r) = cache.get(&f) {
            return Ok(r);
        }
        let r = match self.node(f).clone() {
            XaddNode::Leaf { value, ann } => self.leaf_ann(value, ann)?,
            XaddNode::Internal { dec, hi, lo } => {
                let h = self.reduce_rec(hi, cache)?;
                let l = self.reduce_rec(lo, cache)?;
                self.get_node(dec, h, l)?
            }
        };
        cache.insert(f, r);
        Ok(r)
    }

    /// Follow decisions under `rho`: high when the decision holds (boolean
    /// true / polynomial `>= 0`), low otherwise.
    pub fn evaluate(&self, root: NodeId, rho: &Assignment) -> Result<ExtVal, XaddError> {
        self.check_owner(root)?;
        let mut cur = root;
        loop {
            match self.node(cur) {
                XaddNode::Leaf { value, .. } => {
                    return Ok(match value {
                        ExtPoly::Finite(p) => ExtVal::Finite(p.eval(&rho.reals, &self.registry)?),
                        ExtPoly::NegInf => ExtVal::NegInf,
                        ExtPoly::PosInf => ExtVal::PosInf,
                    });
                }
                XaddNode::Internal { dec, hi, lo } => {
                    let take_hi = match &self.decisions[*dec as usize] {
                        Decision::Bool(v) => *rho.bools.get(v).ok_or_else(|| {
                            ExprError::MissingAssignment(self.registry.name(*v).to_string())
                        })?,
                        Decision::Ineq(p) => {
                            !p.eval(&rho.reals, &self.registry)?.is_negative()
                        }
                    };
                    cur = if take_hi { *hi } else { *lo };
                }
            }
        }
    }

    /// Fast float evaluation; `bools` and `reals` are indexed by `VarId`.
    /// Every variable reachable in the diagram must have an entry.
    pub fn evaluate_f64(&self, root: NodeId, bools: &[bool], reals: &[f64]) -> f64 {
        let mut cur = root;
        loop {
            match self.node(cur) {
                XaddNode::Leaf { value, .. } => {
                    return match value {
                        ExtPoly::Finite(p) => p.eval_f64(reals),
                        ExtPoly::NegInf => f64::NEG_INFINITY,
                        ExtPoly::PosInf => f64::INFINITY,
                    };
                }
                XaddNode::Internal { dec, hi, lo } => {
                    let take_hi = match &self.decisions[*dec as usize] {
                        Decision::Bool(v) => bools[v.index()],
                        Decision::Ineq(p) => p.eval_f64(reals) >= 0.0,
                    };
                    cur = if take_hi { *hi } else { *lo };
                }
            }
        }
    }

    /// Replace every node testing boolean `b` by its `val` branch.
    pub fn restrict(&mut self, f: NodeId, b: VarId, val: bool) -> Result<NodeId, XaddError> {
        self.check_owner(f)?;
        let mut memo = HashMap::new();
        self.restrict_rec(f, b, val, &mut memo)
    }

    fn restrict_rec(
        &mut self,
        f: NodeId,
        b: VarId,
        val: bool,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId, XaddError> {
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let r = match *self.node(f) {
            XaddNode::Leaf { .. } => f,
            XaddNode::Internal { dec, hi, lo } => {
                if self.decisions[dec as usize] == Decision::Bool(b) {
                    let branch = if val { hi } else { lo };
                    self.restrict_rec(branch, b, val, memo)?
                } else {
                    let h = self.restrict_rec(hi, b, val, memo)?;
                    let l = self.restrict_rec(lo, b, val, memo)?;
                    self.get_node(dec, h, l)?
                }
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    /// Sum out a boolean: `f|_{b=true} + f|_{b=false}`.
    pub fn marginalize_bool(&mut self, f: NodeId, b: VarId) -> Result<NodeId, XaddError> {
        let t = self.restrict(f, b, true)?;
        let e = self.restrict(f, b, false)?;
        self.apply(t, e, BinOp::Add)
    }

    /// Apply a polynomial substitution to every leaf and every inequality
    /// decision. Substituted decisions may fall out of order, so the result
    /// is reordered before return. Annotations are dropped.
    pub fn substitute(
        &mut self,
        f: NodeId,
        sigma: &BTreeMap<VarId, Poly>,
    ) -> Result<NodeId, XaddError> {
        self.check_owner(f)?;
        let mut memo = HashMap::new();
        let raw = self.substitute_rec(f, sigma, &mut memo)?;
        self.reorder(raw)
    }

    fn substitute_rec(
        &mut self,
        f: NodeId,
        sigma: &BTreeMap<VarId, Poly>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId, XaddError> {
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let r = match self.node(f).clone() {
            XaddNode::Leaf { value, .. } => match value {
                ExtPoly::Finite(p) => {
                    let q = p.substitute(sigma, &self.registry)?;
                    self.poly_leaf(q)?
                }
                inf => self.leaf(inf)?,
            },
            XaddNode::Internal { dec, hi, lo } => {
                let h = self.substitute_rec(hi, sigma, memo)?;
                let l = self.substitute_rec(lo, sigma, memo)?;
                match self.decisions[dec as usize].clone() {
                    Decision::Bool(_) => self.get_node(dec, h, l)?,
                    Decision::Ineq(p) => {
                        let q = p.substitute(sigma, &self.registry)?;
                        self.node_from_ineq(q, h, l)?
                    }
                }
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    /// Variable-to-variable renaming covering boolean decisions as well;
    /// used for priming. Annotations are dropped.
    pub fn rename_vars(
        &mut self,
        f: NodeId,
        map: &BTreeMap<VarId, VarId>,
    ) -> Result<NodeId, XaddError> {
        self.check_owner(f)?;
        let mut memo = HashMap::new();
        let raw = self.rename_rec(f, map, &mut memo)?;
        self.reorder(raw)
    }

    fn rename_rec(
        &mut self,
        f: NodeId,
        map: &BTreeMap<VarId, VarId>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId, XaddError> {
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let r = match self.node(f).clone() {
            XaddNode::Leaf { value, .. } => match value {
                ExtPoly::Finite(p) => {
                    let q = p.rename_vars(map);
                    self.poly_leaf(q)?
                }
                inf => self.leaf(inf)?,
            },
            XaddNode::Internal { dec, hi, lo } => {
                let h = self.rename_rec(hi, map, memo)?;
                let l = self.rename_rec(lo, map, memo)?;
                match self.decisions[dec as usize].clone() {
                    Decision::Bool(v) => {
                        let w = *map.get(&v).unwrap_or(&v);
                        self.node_bool(w, h, l)?
                    }
                    Decision::Ineq(p) => {
                        let q = p.rename_vars(map);
                        self.node_from_ineq(q, h, l)?
                    }
                }
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    /// Rebuild every leaf through `op`; decisions are untouched so ordering
    /// is preserved.
    pub fn map_leaves(
        &mut self,
        f: NodeId,
        op: &mut dyn FnMut(&ExtPoly, Option<&Annotation>) -> Result<(ExtPoly, Option<Annotation>), XaddError>,
    ) -> Result<NodeId, XaddError> {
        self.check_owner(f)?;
        let mut memo = HashMap::new();
        self.map_leaves_rec(f, op, &mut memo)
    }

    fn map_leaves_rec(
        &mut self,
        f: NodeId,
        op: &mut dyn FnMut(&ExtPoly, Option<&Annotation>) -> Result<(ExtPoly, Option<Annotation>), XaddError>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId, XaddError> {
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let r = match self.node(f).clone() {
            XaddNode::Leaf { value, ann } => {
                let (v, a) = op(&value, ann.as_ref())?;
                self.leaf_ann(v, a)?
            }
            XaddNode::Internal { dec, hi, lo } => {
                let h = self.map_leaves_rec(hi, op, memo)?;
                let l = self.map_leaves_rec(lo, op, memo)?;
                self.get_node(dec, h, l)?
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    /// Multiply every leaf by a constant. `scale(1)` is the identity;
    /// `scale(0)` is rejected on diagrams containing infinities because
    /// `0 * inf` is undefined. Negative factors flip infinities.
    pub fn scale(&mut self, f: NodeId, c: &Rat) -> Result<NodeId, XaddError> {
        if c.is_one() {
            return Ok(f);
        }
        if c.is_zero() && self.has_infinite_leaf(f) {
            return Err(XaddError::UndefinedArithmetic("0 * inf".to_string()));
        }
        let c = c.clone();
        self.map_leaves(f, &mut |value, _| {
            Ok((
                match value {
                    ExtPoly::Finite(p) => ExtPoly::Finite(p.scale(&c)),
                    ExtPoly::NegInf => {
                        if c.is_negative() {
                            ExtPoly::PosInf
                        } else {
                            ExtPoly::NegInf
                        }
                    }
                    ExtPoly::PosInf => {
                        if c.is_negative() {
                            ExtPoly::NegInf
                        } else {
                            ExtPoly::PosInf
                        }
                    }
                },
                None,
            ))
        })
    }

    pub fn negate(&mut self, f: NodeId) -> Result<NodeId, XaddError> {
        self.scale(f, &-Rat::one())
    }

    /// Set the action name on every finite leaf, keeping parameter
    /// annotations.
    pub fn stamp_action(&mut self, f: NodeId, name: &str) -> Result<NodeId, XaddError> {
        let name = name.to_string();
        self.map_leaves(f, &mut |value, ann| {
            if value.is_infinite() {
                return Ok((value.clone(), ann.cloned()));
            }
            let mut a = ann.cloned().unwrap_or_default();
            a.action = Some(name.clone());
            Ok((value.clone(), Some(a)))
        })
    }

    /// Root-to-leaf paths as signed decision lists plus the terminal id.
    /// High branches first, so the order is deterministic.
    pub fn export_paths(&self, root: NodeId) -> Vec<(Vec<(u32, bool)>, NodeId)> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.export_paths_rec(root, &mut prefix, &mut out);
        out
    }

    fn export_paths_rec(
        &self,
        f: NodeId,
        prefix: &mut Vec<(u32, bool)>,
        out: &mut Vec<(Vec<(u32, bool)>, NodeId)>,
    ) {
        match *self.node(f) {
            XaddNode::Leaf { .. } => out.push((prefix.clone(), f)),
            XaddNode::Internal { dec, hi, lo } => {
                prefix.push((dec, true));
                self.export_paths_rec(hi, prefix, out);
                prefix.pop();
                prefix.push((dec, false));
                self.export_paths_rec(lo, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Wrap `inner` under a conjunction of signed decisions, with `default`
    /// everywhere outside. The result may need reordering.
    pub fn path_gate(
        &mut self,
        path: &[(u32, bool)],
        inner: NodeId,
        default: NodeId,
    ) -> Result<NodeId, XaddError> {
        let mut acc = inner;
        for &(dec, branch) in path.iter().rev() {
            acc = if branch {
                self.get_node(dec, acc, default)?
            } else {
                self.get_node(dec, default, acc)?
            };
        }
        Ok(acc)
    }

    /// Count of distinct nodes reachable from `root`.
    pub fn node_count(&self, root: NodeId) -> usize {
        let mut seen = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            if let XaddNode::Internal { hi, lo, .. } = *self.node(n) {
                stack.push(hi);
                stack.push(lo);
            }
        }
        seen.len()
    }

    /// Variables mentioned in reachable decisions and leaf values
    /// (annotations excluded).
    pub fn collect_vars(&self, root: NodeId) -> BTreeSet<VarId> {
        let mut vars = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            match self.node(n) {
                XaddNode::Leaf { value, .. } => {
                    if let ExtPoly::Finite(p) = value {
                        vars.extend(p.vars());
                    }
                }
                XaddNode::Internal { dec, hi, lo } => {
                    vars.extend(self.decisions[*dec as usize].vars());
                    stack.push(*hi);
                    stack.push(*lo);
                }
            }
        }
        vars
    }

    pub fn mentions_kind(&self, root: NodeId, pred: impl Fn(VarKind) -> bool) -> bool {
        self.collect_vars(root)
            .into_iter()
            .any(|v| pred(self.registry.kind(v)))
    }

    pub fn has_infinite_leaf(&self, root: NodeId) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            match self.node(n) {
                XaddNode::Leaf { value, .. } => {
                    if value.is_infinite() {
                        return true;
                    }
                }
                XaddNode::Internal { hi, lo, .. } => {
                    stack.push(*hi);
                    stack.push(*lo);
                }
            }
        }
        false
    }

    /// True when every root-to-leaf path visits strictly increasing order
    /// keys.
    pub fn is_ordered(&self, root: NodeId) -> bool {
        fn rec(store: &XaddStore, f: NodeId, min_key: Option<u64>) -> bool {
            match *store.node(f) {
                XaddNode::Leaf { .. } => true,
                XaddNode::Internal { dec, hi, lo } => {
                    let key = store.order_key(dec);
                    if let Some(m) = min_key {
                        if key <= m {
                            return false;
                        }
                    }
                    rec(store, hi, Some(key)) && rec(store, lo, Some(key))
                }
            }
        }
        rec(self, root, None)
    }

    /// Structural invariants for the property suite: the node cache is a
    /// bijection onto internal nodes, terminals are unique, and no internal
    /// node has identical branches.
    pub fn check_integrity(&self) -> Result<(), String> {
        let mut internal_seen: HashMap<(u32, NodeId, NodeId), NodeId> = HashMap::new();
        let mut leaf_seen: HashMap<(ExtPoly, Option<Annotation>), NodeId> = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let id = NodeId {
                owner: self.owner,
                index: i as u32,
            };
            match node {
                XaddNode::Internal { dec, hi, lo } => {
                    if hi == lo {
                        return Err(format!("node {i} has identical branches"));
                    }
                    if let Some(prev) = internal_seen.insert((*dec, *hi, *lo), id) {
                        return Err(format!(
                            "duplicate internal node: {i} repeats {}",
                            prev.index()
                        ));
                    }
                }
                XaddNode::Leaf { value, ann } => {
                    if let Some(prev) = leaf_seen.insert((value.clone(), ann.clone()), id) {
                        return Err(format!("duplicate leaf: {i} repeats {}", prev.index()));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
