//! Binary operations over diagrams plus the reordering pass.

use super::{NodeId, XaddError, XaddNode, XaddStore};
use crate::expr::{ExtPoly, Rat};
use num_traits::Signed;
use std::collections::HashMap;

/// Pointwise binary operation. `Mul` follows the masking convention of the
/// terminal shortcut table: a zero operand annihilates even infinities,
/// which is what lets indicator masks gate partial functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Max,
    Min,
}

impl BinOp {
    pub fn is_commutative(self) -> bool {
        !matches!(self, BinOp::Sub)
    }
}

impl XaddStore {
    /// Pointwise `f op g`. Inputs must be ordered diagrams of this store;
    /// the result is ordered and reduced. `Max`/`Min` introduce comparison
    /// decisions between non-comparable terminals (high branch = first
    /// operand wins ties) and are reordered before return; annotations ride
    /// with the winning leaf, while arithmetic operations drop them.
    pub fn apply(&mut self, f: NodeId, g: NodeId, op: BinOp) -> Result<NodeId, XaddError> {
        self.check_owner(f)?;
        self.check_owner(g)?;
        let r = self.apply_rec(f, g, op)?;
        match op {
            BinOp::Max | BinOp::Min => self.reorder(r),
            _ => Ok(r),
        }
    }

    pub(crate) fn apply_rec(
        &mut self,
        f: NodeId,
        g: NodeId,
        op: BinOp,
    ) -> Result<NodeId, XaddError> {
        if let Some(r) = self.terminal_shortcut(f, g, op)? {
            return Ok(r);
        }
        let key = if op.is_commutative() && g < f {
            (op, g, f)
        } else {
            (op, f, g)
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return Ok(r);
        }

        let f_node = self.branch_info(f);
        let g_node = self.branch_info(g);
        let dec = match (f_node, g_node) {
            (Some((fd, fk)), Some((gd, gk))) => {
                if fk <= gk {
                    fd
                } else {
                    gd
                }
            }
            (Some((fd, _)), None) => fd,
            (None, Some((gd, _))) => gd,
            (None, None) => unreachable!("leaf-leaf handled by terminal_shortcut"),
        };

        let (fh, fl) = self.cofactor(f, dec);
        let (gh, gl) = self.cofactor(g, dec);
        let hi = self.apply_rec(fh, gh, op)?;
        let lo = self.apply_rec(fl, gl, op)?;
        let r = self.get_node(dec, hi, lo)?;
        self.apply_cache.insert(key, r);
        Ok(r)
    }

    fn branch_info(&self, f: NodeId) -> Option<(u32, u64)> {
        match *self.node(f) {
            XaddNode::Internal { dec, .. } => Some((dec, self.order_key(dec))),
            XaddNode::Leaf { .. } => None,
        }
    }

    fn cofactor(&self, f: NodeId, dec: u32) -> (NodeId, NodeId) {
        match *self.node(f) {
            XaddNode::Internal { dec: d, hi, lo } if d == dec => (hi, lo),
            _ => (f, f),
        }
    }

    fn leaf_value(&self, f: NodeId) -> Option<&ExtPoly> {
        match self.node(f) {
            XaddNode::Leaf { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Shortcut table for immediate results. Checked in order: identity
    /// elements before annihilators, so `f * 1 = f` keeps annotated zero
    /// leaves intact while `f * 0 = 0` masks whole subdiagrams away.
    fn terminal_shortcut(
        &mut self,
        f: NodeId,
        g: NodeId,
        op: BinOp,
    ) -> Result<Option<NodeId>, XaddError> {
        let fv = self.leaf_value(f).cloned();
        let gv = self.leaf_value(g).cloned();
        match op {
            BinOp::Add => {
                if gv.as_ref().is_some_and(|v| v.is_zero()) {
                    return Ok(Some(f));
                }
                if fv.as_ref().is_some_and(|v| v.is_zero()) {
                    return Ok(Some(g));
                }
            }
            BinOp::Sub => {
                if gv.as_ref().is_some_and(|v| v.is_zero()) {
                    return Ok(Some(f));
                }
            }
            BinOp::Mul => {
                if gv.as_ref().is_some_and(|v| v.is_one()) {
                    return Ok(Some(f));
                }
                if fv.as_ref().is_some_and(|v| v.is_one()) {
                    return Ok(Some(g));
                }
                if fv.as_ref().is_some_and(|v| v.is_zero())
                    || gv.as_ref().is_some_and(|v| v.is_zero())
                {
                    return Ok(Some(self.zero()?));
                }
            }
            BinOp::Max => {
                if f == g {
                    return Ok(Some(f));
                }
                if matches!(gv, Some(ExtPoly::NegInf)) {
                    return Ok(Some(f));
                }
                if matches!(fv, Some(ExtPoly::NegInf)) {
                    return Ok(Some(g));
                }
                if matches!(fv, Some(ExtPoly::PosInf)) || matches!(gv, Some(ExtPoly::PosInf)) {
                    return Ok(Some(self.pos_inf()?));
                }
            }
            BinOp::Min => {
                if f == g {
                    return Ok(Some(f));
                }
                if matches!(gv, Some(ExtPoly::PosInf)) {
                    return Ok(Some(f));
                }
                if matches!(fv, Some(ExtPoly::PosInf)) {
                    return Ok(Some(g));
                }
                if matches!(fv, Some(ExtPoly::NegInf)) || matches!(gv, Some(ExtPoly::NegInf)) {
                    return Ok(Some(self.neg_inf()?));
                }
            }
        }
        match (fv, gv) {
            (Some(a), Some(b)) => Ok(Some(self.leaf_op(f, g, &a, &b, op)?)),
            _ => Ok(None),
        }
    }

    fn leaf_op(
        &mut self,
        f: NodeId,
        g: NodeId,
        a: &ExtPoly,
        b: &ExtPoly,
        op: BinOp,
    ) -> Result<NodeId, XaddError> {
        use ExtPoly::*;
        match op {
            BinOp::Add => match (a, b) {
                (Finite(p), Finite(q)) => self.poly_leaf(p.add(q)),
                (PosInf, NegInf) | (NegInf, PosInf) => Err(XaddError::UndefinedArithmetic(
                    "inf + -inf".to_string(),
                )),
                (PosInf, _) | (_, PosInf) => self.pos_inf(),
                _ => self.neg_inf(),
            },
            BinOp::Sub => match (a, b) {
                (Finite(p), Finite(q)) => self.poly_leaf(p.sub(q)),
                (PosInf, PosInf) | (NegInf, NegInf) => Err(XaddError::UndefinedArithmetic(
                    "inf - inf".to_string(),
                )),
                (PosInf, _) | (_, NegInf) => self.pos_inf(),
                _ => self.neg_inf(),
            },
            BinOp::Mul => match (a, b) {
                (Finite(p), Finite(q)) => self.poly_leaf(p.mul(q)),
                (Finite(p), inf) | (inf, Finite(p)) => {
                    // zero operands were annihilated by the shortcut table
                    let c = p.as_constant().cloned().ok_or_else(|| {
                        XaddError::UndefinedArithmetic(
                            "inf * non-constant polynomial".to_string(),
                        )
                    })?;
                    let positive = matches!(inf, PosInf) == c.is_positive();
                    if positive {
                        self.pos_inf()
                    } else {
                        self.neg_inf()
                    }
                }
                (x, y) => {
                    let positive = matches!(x, PosInf) == matches!(y, PosInf);
                    if positive {
                        self.pos_inf()
                    } else {
                        self.neg_inf()
                    }
                }
            },
            BinOp::Max | BinOp::Min => {
                let (p, q) = match (a, b) {
                    (Finite(p), Finite(q)) => (p, q),
                    _ => unreachable!("infinite max/min handled by shortcuts"),
                };
                if p == q {
                    // same value: keep the first operand's leaf (and its
                    // annotation)
                    return Ok(f);
                }
                let diff = p.sub(q);
                if let Some(c) = diff.constant_value() {
                    let first_wins = match op {
                        BinOp::Max => !c.is_negative(),
                        _ => !c.is_positive(),
                    };
                    return Ok(if first_wins { f } else { g });
                }
                // comparison decision: diff >= 0 means the first operand is
                // at least the second
                let (hi, lo) = match op {
                    BinOp::Max => (f, g),
                    _ => (g, f),
                };
                self.node_from_ineq(diff, hi, lo)
            }
        }
    }

    /// Restore global decision order by indicator-multiply-and-sum
    /// recursion. Correct for arbitrary (even repeated-decision) diagrams;
    /// already-ordered input comes back as the same node.
    pub fn reorder(&mut self, f: NodeId) -> Result<NodeId, XaddError> {
        self.check_owner(f)?;
        let mut memo = HashMap::new();
        self.reorder_rec(f, &mut memo)
    }

    fn reorder_rec(
        &mut self,
        f: NodeId,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId, XaddError> {
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let r = match *self.node(f) {
            XaddNode::Leaf { .. } => f,
            XaddNode::Internal { dec, hi, lo } => {
                let t = self.reorder_rec(hi, memo)?;
                let e = self.reorder_rec(lo, memo)?;
                let one = self.one()?;
                let zero = self.zero()?;
                let ind_t = self.get_node(dec, one, zero)?;
                let ind_e = self.get_node(dec, zero, one)?;
                let mt = self.apply_rec(t, ind_t, BinOp::Mul)?;
                let me = self.apply_rec(e, ind_e, BinOp::Mul)?;
                self.apply_rec(mt, me, BinOp::Add)?
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    /// Convenience scalar constructor used in tests and model building.
    pub fn rat_leaf(&mut self, n: i64, d: i64) -> Result<NodeId, XaddError> {
        self.constant(Rat::new(n.into(), d.into()))
    }
}
