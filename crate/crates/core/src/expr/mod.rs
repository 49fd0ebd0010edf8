//! Exact multivariate polynomial arithmetic and normalized decision atoms.
//!
//! Everything downstream (XADD leaves, decision nodes, feasibility checks)
//! is built on [`Poly`] with [`Rat`] (arbitrary-precision rational)
//! coefficients. Floats only appear at the edges: grid export and the
//! numeric test oracles.

mod decision;
mod poly;

pub use decision::{Decision, ExtPoly, ExtVal, NormalizedIneq};
pub use poly::{Assignment, Poly, PowerProduct};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Exact rational scalar used for every coefficient and evaluation result.
pub type Rat = num_rational::BigRational;

/// Errors raised by polynomial and registry operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("no assignment for variable `{0}`")]
    MissingAssignment(String),
    #[error("variable `{0}` appears on both sides of the substitution")]
    SubstitutionConflict(String),
    #[error("polynomial has degree {degree} in `{var}`; expected at most {max}")]
    UnsupportedDegree {
        var: String,
        degree: u32,
        max: u32,
    },
    #[error("variable `{0}` is already declared")]
    DuplicateVariable(String),
    #[error("variable `{0}` already has a primed counterpart")]
    AlreadyPrimed(String),
    #[error("boolean variable `{0}` cannot appear in a polynomial")]
    BooleanInPolynomial(String),
}

/// Role a variable plays in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Boolean state variable.
    Bool,
    /// Continuous state variable.
    Cont,
    /// Primed (next-state) boolean.
    BoolPrime,
    /// Primed (next-state) continuous.
    ContPrime,
    /// Continuous action parameter.
    Param,
}

impl VarKind {
    /// True for kinds that may appear inside polynomials.
    pub fn is_continuous(self) -> bool {
        matches!(self, VarKind::Cont | VarKind::ContPrime | VarKind::Param)
    }

    /// True for boolean state kinds (primed or not).
    pub fn is_boolean(self) -> bool {
        matches!(self, VarKind::Bool | VarKind::BoolPrime)
    }

    /// True for next-state kinds.
    pub fn is_primed(self) -> bool {
        matches!(self, VarKind::BoolPrime | VarKind::ContPrime)
    }
}

/// Dense handle into a [`VarRegistry`]. Indices are insertion-ordered and
/// stable for the lifetime of the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
struct VarInfo {
    name: String,
    kind: VarKind,
    /// Primed counterpart of an unprimed variable, or vice versa.
    partner: Option<VarId>,
}

/// Registry of variables; names are unique and index assignment is stable.
#[derive(Debug, Clone, Default)]
pub struct VarRegistry {
    vars: Vec<VarInfo>,
    by_name: HashMap<String, VarId>,
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declare a fresh variable. Fails on duplicate names.
    pub fn declare(&mut self, name: &str, kind: VarKind) -> Result<VarId, ExprError> {
        if self.by_name.contains_key(name) {
            return Err(ExprError::DuplicateVariable(name.to_string()));
        }
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarInfo {
            name: name.to_string(),
            kind,
            partner: None,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Declare the primed counterpart `name'` of a state variable and link
    /// the two. Each unprimed variable has at most one counterpart.
    pub fn declare_primed(&mut self, base: VarId) -> Result<VarId, ExprError> {
        if self.vars[base.index()].partner.is_some() {
            return Err(ExprError::AlreadyPrimed(self.name(base).to_string()));
        }
        let kind = match self.kind(base) {
            VarKind::Bool => VarKind::BoolPrime,
            VarKind::Cont => VarKind::ContPrime,
            other => {
                return Err(ExprError::AlreadyPrimed(format!(
                    "{} ({other:?} cannot be primed)",
                    self.name(base)
                )))
            }
        };
        let name = format!("{}'", self.name(base));
        let id = self.declare(&name, kind)?;
        self.vars[base.index()].partner = Some(id);
        self.vars[id.index()].partner = Some(base);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    pub fn kind(&self, v: VarId) -> VarKind {
        self.vars[v.index()].kind
    }

    /// Primed counterpart of an unprimed variable (or the reverse).
    pub fn partner(&self, v: VarId) -> Option<VarId> {
        self.vars[v.index()].partner
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len() as u32).map(VarId)
    }
}

/// Parse a decimal literal (`12`, `0.05`, `-3.5`) into an exact rational.
pub fn rat_from_decimal(text: &str) -> Option<Rat> {
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut num: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().ok()?
    };
    let mut den = BigInt::one();
    for c in frac_part.chars() {
        num = num * 10 + (c as u8 - b'0');
        den *= 10;
    }
    Some(Rat::new(num * sign, den))
}

/// Render a rational as a decimal when the denominator divides a power of
/// ten, otherwise as `num/den`. Round-trips through [`rat_from_decimal`]
/// for the decimal case.
pub fn rat_to_string(r: &Rat) -> String {
    let mut den = r.denom().clone();
    if den.is_one() {
        return r.numer().to_string();
    }
    // Strip factors of 2 and 5; a power-of-ten denominator terminates.
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let shift = twos.max(fives);
    let scale = BigInt::from(10).pow(shift);
    let scaled = r.numer() * &scale / r.denom();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = if digits.len() <= shift as usize {
        format!("{}{}", "0".repeat(shift as usize + 1 - digits.len()), digits)
    } else {
        digits
    };
    let split = digits.len() - shift as usize;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&digits[..split]);
    let frac = digits[split..].trim_end_matches('0');
    if !frac.is_empty() {
        out.push('.');
        out.push_str(frac);
    }
    out
}

/// Lossy projection used by grids, DOT tooltips and the numeric oracles.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Extremely large intermediates: fall back to the ratio of floats.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Convenience constructor for small integer rationals.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Convenience constructor for `n/d`.
pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
