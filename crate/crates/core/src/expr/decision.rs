//! Branching atoms for XADD internal nodes, plus the extended-real leaf
//! payload.

use super::{Poly, Rat, VarRegistry};
use num_traits::Signed;
use std::collections::BTreeSet;

/// A branching test: a boolean variable or a normalized polynomial
/// inequality `poly >= 0`.
///
/// Inequalities are stored divided by the gcd of their coefficients with a
/// positive leading coefficient, so `2x - 4 >= 0` and `x - 2 >= 0` intern to
/// the same decision and `4 - 2x >= 0` interns to the same decision with
/// swapped branches. Negation is a branch direction, never a second stored
/// decision; boundary membership is immaterial because all represented
/// functions are continuous across partition borders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Decision {
    Bool(super::VarId),
    /// The polynomial `p` in `p >= 0`, in normalized form.
    Ineq(Poly),
}

/// Outcome of normalizing a raw inequality `p >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizedIneq {
    /// The inequality is constant.
    Always(bool),
    /// A proper decision; `flipped` means the original test is the stored
    /// decision's negation, so high/low branches must be swapped.
    Dec { dec: Decision, flipped: bool },
}

impl Decision {
    /// Normalize `p >= 0` into canonical decision form.
    pub fn ineq(p: Poly) -> NormalizedIneq {
        if let Some(c) = p.constant_value() {
            return NormalizedIneq::Always(!c.is_negative());
        }
        let content = p.content();
        let scaled = p.scale(&content.recip());
        if scaled.leading_coefficient().is_negative() {
            NormalizedIneq::Dec {
                dec: Decision::Ineq(scaled.neg()),
                flipped: true,
            }
        } else {
            NormalizedIneq::Dec {
                dec: Decision::Ineq(scaled),
                flipped: false,
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<super::VarId> {
        match self {
            Decision::Bool(v) => [*v].into(),
            Decision::Ineq(p) => p.vars(),
        }
    }

    pub fn render(&self, reg: &VarRegistry) -> String {
        match self {
            Decision::Bool(v) => reg.name(*v).to_string(),
            Decision::Ineq(p) => format!("{} >= 0", p.render(reg)),
        }
    }
}

/// XADD leaf payload: a finite polynomial or an infinity marker. Infinities
/// appear only at leaves, never inside decisions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtPoly {
    Finite(Poly),
    NegInf,
    PosInf,
}

impl ExtPoly {
    pub fn zero() -> Self {
        ExtPoly::Finite(Poly::zero())
    }

    pub fn constant(c: Rat) -> Self {
        ExtPoly::Finite(Poly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtPoly::Finite(p) if p.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ExtPoly::Finite(p) if p.as_constant().map(|c| c == &Rat::from_integer(1.into())).unwrap_or(false))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtPoly::NegInf | ExtPoly::PosInf)
    }

    pub fn as_finite(&self) -> Option<&Poly> {
        match self {
            ExtPoly::Finite(p) => Some(p),
            _ => None,
        }
    }

    pub fn render(&self, reg: &VarRegistry) -> String {
        match self {
            ExtPoly::Finite(p) => p.render(reg),
            ExtPoly::NegInf => "-inf".to_string(),
            ExtPoly::PosInf => "inf".to_string(),
        }
    }
}

/// Exact evaluation result of an XADD: a rational or an infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtVal {
    Finite(Rat),
    NegInf,
    PosInf,
}

impl ExtVal {
    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            ExtVal::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtVal::Finite(r) => super::rat_to_f64(r),
            ExtVal::NegInf => f64::NEG_INFINITY,
            ExtVal::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtVal::Finite(_))
    }
}
