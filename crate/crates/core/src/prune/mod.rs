//! Feasibility and implication reasoning over diagram paths: consistency
//! pruning, redundancy pruning, and decision linearization.

mod feasible;
mod linearize;
mod sat;

pub use feasible::{feasible, LinConstraint};
pub use linearize::linearize;
pub use sat::{satisfiable, Lit};

use crate::expr::{Decision, Rat, VarId};
use crate::xadd::{NodeId, XaddError, XaddNode, XaddStore};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Tri-state implication result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Implied {
    True,
    False,
    Undetermined,
}

/// Verified directed implications between signed decisions. Soundness is
/// guaranteed (every entry passed the feasibility checker); completeness is
/// not assumed anywhere.
#[derive(Debug, Clone, Default)]
pub struct ImplicationKB {
    pairs: BTreeSet<(Lit, Lit)>,
}

impl ImplicationKB {
    pub fn insert(&mut self, premise: Lit, conclusion: Lit) {
        self.pairs.insert((premise, conclusion));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// CNF clauses `!premise | conclusion` for the SAT check.
    fn clauses(&self) -> Vec<Vec<Lit>> {
        self.pairs
            .iter()
            .map(|&((a, pa), (b, pb))| vec![(a, !pa), (b, pb)])
            .collect()
    }
}

/// Redundancy pruning behavior.
#[derive(Debug, Clone, PartialEq)]
pub enum RedundancyMode {
    /// Function-preserving removals only.
    Exact,
    /// Exact removals plus merging sibling leaves whose coefficients differ
    /// by less than epsilon.
    Epsilon(f64),
}

/// Pruning context: the model's bounding box (always conjoined to
/// feasibility tests) plus the accumulated implication knowledge base.
#[derive(Debug, Clone, Default)]
pub struct Pruner {
    pub bounds: BTreeMap<VarId, (Rat, Rat)>,
    pub kb: ImplicationKB,
}

impl Pruner {
    pub fn new(bounds: BTreeMap<VarId, (Rat, Rat)>) -> Self {
        Pruner {
            bounds,
            kb: ImplicationKB::default(),
        }
    }

    fn box_constraints(&self, vars: &BTreeSet<VarId>) -> Vec<LinConstraint> {
        let mut out = Vec::new();
        for v in vars {
            if let Some((lo, hi)) = self.bounds.get(v) {
                out.push(LinConstraint::lower_bound(*v, lo.clone()));
                out.push(LinConstraint::upper_bound(*v, hi.clone()));
            }
        }
        out
    }

    /// Linear constraints for the inequality literals of a signed path.
    /// Boolean literals partition by assignment and are checked for
    /// propositional contradiction separately.
    fn lin_of_paths(
        &self,
        store: &XaddStore,
        lits: &[Lit],
    ) -> Result<Option<Vec<LinConstraint>>, XaddError> {
        let mut cs = Vec::new();
        let mut bools: BTreeMap<VarId, bool> = BTreeMap::new();
        for &(dec, phase) in lits {
            match store.decision(dec) {
                Decision::Bool(v) => {
                    if let Some(&prev) = bools.get(v) {
                        if prev != phase {
                            return Ok(None); // propositionally contradictory
                        }
                    }
                    bools.insert(*v, phase);
                }
                Decision::Ineq(p) => {
                    let c = LinConstraint::from_poly(p, false, store.registry())?;
                    cs.push(if phase { c } else { c.negated() });
                }
            }
        }
        Ok(Some(cs))
    }

    /// Closed-region satisfiability of a signed decision conjunction plus
    /// the bounding box.
    pub fn feasible_signed(&self, store: &XaddStore, lits: &[Lit]) -> Result<bool, XaddError> {
        let Some(mut cs) = self.lin_of_paths(store, lits)? else {
            return Ok(false);
        };
        let vars: BTreeSet<VarId> = cs.iter().flat_map(|c| c.coeffs.keys().copied()).collect();
        cs.extend(self.box_constraints(&vars));
        Ok(feasible(&cs))
    }

    /// Interior (strict) satisfiability; used to distinguish genuine overlap
    /// from shared boundaries, which the paper's case notation uses freely.
    pub fn feasible_interior(
        &self,
        store: &XaddStore,
        lits: &[Lit],
    ) -> Result<bool, XaddError> {
        let Some(mut cs) = self.lin_of_paths(store, lits)? else {
            return Ok(false);
        };
        for c in &mut cs {
            c.strict = true;
        }
        let vars: BTreeSet<VarId> = cs.iter().flat_map(|c| c.coeffs.keys().copied()).collect();
        cs.extend(self.box_constraints(&vars));
        Ok(feasible(&cs))
    }

    /// Is `candidate` decided by `context`? Implied-true iff context with
    /// the negated candidate is infeasible; implied-false symmetrically.
    /// Pairwise verdicts feed the knowledge base.
    pub fn test_implied(
        &mut self,
        store: &mut XaddStore,
        context: &[Lit],
        candidate: Lit,
    ) -> Result<Implied, XaddError> {
        store.stats.implication_tests += 1;
        let mut with_neg: Vec<Lit> = context.to_vec();
        with_neg.push((candidate.0, !candidate.1));
        if !self.feasible_signed(store, &with_neg)? {
            if let [single] = context {
                self.kb.insert(*single, candidate);
            }
            return Ok(Implied::True);
        }
        let mut with_pos: Vec<Lit> = context.to_vec();
        with_pos.push(candidate);
        if !self.feasible_signed(store, &with_pos)? {
            if let [single] = context {
                self.kb.insert(*single, (candidate.0, !candidate.1));
            }
            return Ok(Implied::False);
        }
        Ok(Implied::Undetermined)
    }

    /// Top-down consistency pruning: nodes whose decision is implied by the
    /// path context collapse into the implied branch; the result is reduced
    /// and agrees with the input on every feasible assignment.
    pub fn prune_inconsistent(
        &mut self,
        store: &mut XaddStore,
        root: NodeId,
    ) -> Result<NodeId, XaddError> {
        store.check_owner(root)?;
        let mut ctx: Vec<Lit> = Vec::new();
        let mut bools: BTreeMap<VarId, bool> = BTreeMap::new();
        self.prune_inc_rec(store, root, &mut ctx, &mut bools)
    }

    fn prune_inc_rec(
        &mut self,
        store: &mut XaddStore,
        f: NodeId,
        ctx: &mut Vec<Lit>,
        bools: &mut BTreeMap<VarId, bool>,
    ) -> Result<NodeId, XaddError> {
        let (dec, hi, lo) = match *store.node(f) {
            XaddNode::Leaf { .. } => return Ok(f),
            XaddNode::Internal { dec, hi, lo } => (dec, hi, lo),
        };
        match store.decision(dec).clone() {
            Decision::Bool(v) => {
                if let Some(&b) = bools.get(&v) {
                    store.stats.nodes_pruned += 1;
                    let branch = if b { hi } else { lo };
                    return self.prune_inc_rec(store, branch, ctx, bools);
                }
                bools.insert(v, true);
                let h = self.prune_inc_rec(store, hi, ctx, bools)?;
                bools.insert(v, false);
                let l = self.prune_inc_rec(store, lo, ctx, bools)?;
                bools.remove(&v);
                store.get_node(dec, h, l)
            }
            Decision::Ineq(_) => match self.test_implied(store, ctx, (dec, true))? {
                Implied::True => {
                    store.stats.nodes_pruned += 1;
                    self.prune_inc_rec(store, hi, ctx, bools)
                }
                Implied::False => {
                    store.stats.nodes_pruned += 1;
                    self.prune_inc_rec(store, lo, ctx, bools)
                }
                Implied::Undetermined => {
                    ctx.push((dec, true));
                    let h = self.prune_inc_rec(store, hi, ctx, bools)?;
                    ctx.pop();
                    ctx.push((dec, false));
                    let l = self.prune_inc_rec(store, lo, ctx, bools)?;
                    ctx.pop();
                    store.get_node(dec, h, l)
                }
            },
        }
    }

    /// Verify pairwise implications between the inequality decisions of a
    /// diagram and record them in the knowledge base for redundancy pruning.
    pub fn harvest_implications(
        &mut self,
        store: &mut XaddStore,
        root: NodeId,
    ) -> Result<(), XaddError> {
        let mut decs: BTreeSet<u32> = BTreeSet::new();
        for (path, _) in store.export_paths(root) {
            for (dec, _) in path {
                if matches!(store.decision(dec), Decision::Ineq(_)) {
                    decs.insert(dec);
                }
            }
        }
        let decs: Vec<u32> = decs.into_iter().collect();
        for (i, &a) in decs.iter().enumerate() {
            for &b in decs.iter().skip(i + 1) {
                for pa in [true, false] {
                    for pb in [true, false] {
                        store.stats.implication_tests += 1;
                        // a(pa) => b(pb) iff a(pa) & !b(pb) infeasible
                        if !self.feasible_signed(store, &[(a, pa), (b, !pb)])? {
                            self.kb.insert((a, pa), (b, pb));
                        }
                        if !self.feasible_signed(store, &[(b, pb), (a, !pa)])? {
                            self.kb.insert((b, pb), (a, pa));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Bottom-up redundancy pruning. A node collapses into one branch when
    /// no assignment consistent with the knowledge base and the node's own
    /// path formulas can tell the branches apart. In epsilon mode, sibling
    /// leaves with near-identical coefficients merge as well.
    pub fn prune_redundant(
        &mut self,
        store: &mut XaddStore,
        root: NodeId,
        mode: RedundancyMode,
    ) -> Result<NodeId, XaddError> {
        store.check_owner(root)?;
        let formulas = collect_formulas(store, root);
        let mut memo = HashMap::new();
        self.prune_red_rec(store, root, &mode, &formulas, &mut memo)
    }

    fn prune_red_rec(
        &mut self,
        store: &mut XaddStore,
        f: NodeId,
        mode: &RedundancyMode,
        formulas: &HashMap<NodeId, Vec<Vec<Lit>>>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId, XaddError> {
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let (dec, hi, lo) = match *store.node(f) {
            XaddNode::Leaf { .. } => return Ok(f),
            XaddNode::Internal { dec, hi, lo } => (dec, hi, lo),
        };
        let h = self.prune_red_rec(store, hi, mode, formulas, memo)?;
        let l = self.prune_red_rec(store, lo, mode, formulas, memo)?;
        let mut result = None;
        if h == l {
            result = Some(h);
        }
        if result.is_none() {
            if let RedundancyMode::Epsilon(eps) = mode {
                if leaves_close(store, h, l, *eps) {
                    store.stats.nodes_pruned += 1;
                    result = Some(h);
                }
            }
        }
        if result.is_none() {
            let paths = formulas.get(&f).cloned().unwrap_or_default();
            // replace by the high branch iff low agrees with high wherever
            // the node is reachable with the decision false
            if self.branches_equivalent(store, h, l, &paths, (dec, false))? {
                store.stats.nodes_pruned += 1;
                result = Some(h);
            } else if self.branches_equivalent(store, l, h, &paths, (dec, true))? {
                store.stats.nodes_pruned += 1;
                result = Some(l);
            }
        }
        let r = match result {
            Some(n) => n,
            None => store.get_node(dec, h, l)?,
        };
        memo.insert(f, r);
        Ok(r)
    }

    /// Does `keep` equal `drop` on every KB-consistent assignment that
    /// reaches the node (some path formula holds) with `forced` set?
    fn branches_equivalent(
        &mut self,
        store: &mut XaddStore,
        keep: NodeId,
        drop: NodeId,
        paths_to_node: &[Vec<Lit>],
        forced: Lit,
    ) -> Result<bool, XaddError> {
        if paths_to_node.is_empty() {
            return Ok(false); // formula collection was capped; stay sound
        }
        let diffs = joint_diff_paths(store, keep, drop);
        let kb_clauses = self.kb.clauses();
        for (joint, la, lb) in diffs {
            if la == lb {
                continue;
            }
            for path in paths_to_node {
                let mut clauses = kb_clauses.clone();
                clauses.extend(path.iter().map(|&l| vec![l]));
                clauses.push(vec![forced]);
                clauses.extend(joint.iter().map(|&l| vec![l]));
                store.stats.sat_tests += 1;
                if satisfiable(&clauses) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Paths (signed literal lists) from the root to every node, capped so
/// pathological diagrams simply skip the SAT-based check for crowded nodes.
fn collect_formulas(store: &XaddStore, root: NodeId) -> HashMap<NodeId, Vec<Vec<Lit>>> {
    const CAP: usize = 32;
    let mut out: HashMap<NodeId, Vec<Vec<Lit>>> = HashMap::new();
    let mut prefix: Vec<Lit> = Vec::new();
    fn rec(
        store: &XaddStore,
        f: NodeId,
        prefix: &mut Vec<Lit>,
        out: &mut HashMap<NodeId, Vec<Vec<Lit>>>,
    ) {
        let entry = out.entry(f).or_default();
        if entry.len() < CAP {
            entry.push(prefix.clone());
        }
        if let XaddNode::Internal { dec, hi, lo } = *store.node(f) {
            prefix.push((dec, true));
            rec(store, hi, prefix, out);
            prefix.pop();
            prefix.push((dec, false));
            rec(store, lo, prefix, out);
            prefix.pop();
        }
    }
    rec(store, root, &mut prefix, &mut out);
    out
}

/// Product walk over two diagrams collecting joint path constraints and the
/// leaf pair they reach.
fn joint_diff_paths(
    store: &XaddStore,
    a: NodeId,
    b: NodeId,
) -> Vec<(Vec<Lit>, NodeId, NodeId)> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn rec(
        store: &XaddStore,
        a: NodeId,
        b: NodeId,
        prefix: &mut Vec<Lit>,
        out: &mut Vec<(Vec<Lit>, NodeId, NodeId)>,
    ) {
        let an = store.node(a);
        let bn = store.node(b);
        let pick = match (an, bn) {
            (XaddNode::Leaf { .. }, XaddNode::Leaf { .. }) => {
                out.push((prefix.clone(), a, b));
                return;
            }
            (XaddNode::Internal { dec, .. }, XaddNode::Leaf { .. }) => *dec,
            (XaddNode::Leaf { .. }, XaddNode::Internal { dec, .. }) => *dec,
            (XaddNode::Internal { dec: da, .. }, XaddNode::Internal { dec: db, .. }) => {
                if store.order_key(*da) <= store.order_key(*db) {
                    *da
                } else {
                    *db
                }
            }
        };
        let step = |n: NodeId, phase: bool| match *store.node(n) {
            XaddNode::Internal { dec, hi, lo } if dec == pick => {
                if phase {
                    hi
                } else {
                    lo
                }
            }
            _ => n,
        };
        for phase in [true, false] {
            prefix.push((pick, phase));
            rec(store, step(a, phase), step(b, phase), prefix, out);
            prefix.pop();
        }
    }
    rec(store, a, b, &mut prefix, &mut out);
    out
}

/// True when both nodes are finite leaves whose coefficients differ by less
/// than `eps * (1 + |coefficient|)` on the union of their monomials.
fn leaves_close(store: &XaddStore, a: NodeId, b: NodeId, eps: f64) -> bool {
    use crate::expr::rat_to_f64;
    let (pa, pb) = match (store.node(a), store.node(b)) {
        (
            XaddNode::Leaf {
                value: crate::expr::ExtPoly::Finite(pa),
                ..
            },
            XaddNode::Leaf {
                value: crate::expr::ExtPoly::Finite(pb),
                ..
            },
        ) => (pa, pb),
        _ => return false,
    };
    let mut monomials: BTreeMap<&crate::expr::PowerProduct, (f64, f64)> = BTreeMap::new();
    for (pp, c) in pa.terms() {
        monomials.entry(pp).or_insert((0.0, 0.0)).0 = rat_to_f64(c);
    }
    for (pp, c) in pb.terms() {
        monomials.entry(pp).or_insert((0.0, 0.0)).1 = rat_to_f64(c);
    }
    monomials
        .values()
        .all(|&(x, y)| (x - y).abs() < eps * (1.0 + x.abs().max(y.abs())))
}
