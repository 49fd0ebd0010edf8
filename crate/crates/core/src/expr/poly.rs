//! Canonical sparse multivariate polynomials over the rationals.

use super::{rat_to_string, ExprError, Rat, VarId, VarRegistry};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// Product of variable powers, sorted by [`VarId`] with positive exponents.
/// The empty product stands for the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PowerProduct(Vec<(VarId, u32)>);

impl PowerProduct {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Self(vec![(v, 1)])
    }

    pub fn from_powers(mut powers: Vec<(VarId, u32)>) -> Self {
        powers.retain(|&(_, e)| e > 0);
        powers.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(VarId, u32)> = Vec::with_capacity(powers.len());
        for (v, e) in powers {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => merged.push((v, e)),
            }
        }
        Self(merged)
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn powers(&self) -> &[(VarId, u32)] {
        &self.0
    }

    fn mul(&self, other: &Self) -> Self {
        let mut powers = self.0.clone();
        powers.extend_from_slice(&other.0);
        Self::from_powers(powers)
    }
}

// Graded lexicographic order by VarId index: total degree first, then the
// earlier variable with the higher exponent ranks higher.
impl Ord for PowerProduct {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(other.0.iter()) {
                match a.0.cmp(&b.0) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match a.1.cmp(&b.1) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    },
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for PowerProduct {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Variable assignment split into boolean and rational parts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub bools: BTreeMap<VarId, bool>,
    pub reals: BTreeMap<VarId, Rat>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_bool(mut self, v: VarId, b: bool) -> Self {
        self.bools.insert(v, b);
        self
    }

    pub fn with_real(mut self, v: VarId, r: Rat) -> Self {
        self.reals.insert(v, r);
        self
    }
}

/// Canonical multivariate polynomial: monomials sorted in descending graded
/// lexicographic order, no zero coefficients, no duplicate power products.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(PowerProduct, Rat)>,
}

impl Poly {
    /// Canonicalize a raw term list: merge like terms, drop zeros, sort.
    /// Idempotent by construction.
    pub fn canonicalize(raw: impl IntoIterator<Item = (PowerProduct, Rat)>) -> Self {
        let mut map: BTreeMap<PowerProduct, Rat> = BTreeMap::new();
        for (pp, c) in raw {
            if c.is_zero() {
                continue;
            }
            let entry = map.entry(pp).or_insert_with(Rat::zero);
            *entry += c;
        }
        let mut terms: Vec<(PowerProduct, Rat)> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        terms.reverse(); // descending order, leading monomial first
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self {
                terms: vec![(PowerProduct::unit(), c)],
            }
        }
    }

    pub fn var(v: VarId) -> Self {
        Self {
            terms: vec![(PowerProduct::var(v), Rat::one())],
        }
    }

    /// `c * v`
    pub fn linear(c: Rat, v: VarId) -> Self {
        Self::canonicalize([(PowerProduct::var(v), c)])
    }

    pub fn terms(&self) -> &[(PowerProduct, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<&Rat> {
        match self.terms.as_slice() {
            [] => None,
            [(pp, c)] if pp.is_constant() => Some(c),
            _ => None,
        }
    }

    /// Constant value of the polynomial, treating the empty polynomial as 0.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else {
            self.as_constant().cloned()
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.first().map(|(pp, _)| pp.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms
            .iter()
            .map(|(pp, _)| pp.exponent(v))
            .max()
            .unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms
            .iter()
            .flat_map(|(pp, _)| pp.powers().iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn mentions(&self, v: VarId) -> bool {
        self.terms.iter().any(|(pp, _)| pp.exponent(v) > 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::canonicalize(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(pp, c)| (pp.clone(), c.clone())),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(pp, c)| (pp.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(pp, k)| (pp.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                raw.push((pa.mul(pb), ca * cb));
            }
        }
        Self::canonicalize(raw)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact evaluation. Every variable of the polynomial must be assigned.
    pub fn eval(&self, reals: &BTreeMap<VarId, Rat>, reg: &VarRegistry) -> Result<Rat, ExprError> {
        let mut total = Rat::zero();
        for (pp, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in pp.powers() {
                let val = reals
                    .get(&v)
                    .ok_or_else(|| ExprError::MissingAssignment(reg.name(v).to_string()))?;
                for _ in 0..e {
                    term *= val;
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Float evaluation indexed by `VarId`; used by grids and oracles.
    pub fn eval_f64(&self, reals: &[f64]) -> f64 {
        let mut total = 0.0;
        for (pp, c) in &self.terms {
            let mut term = super::rat_to_f64(c);
            for &(v, e) in pp.powers() {
                term *= reals[v.index()].powi(e as i32);
            }
            total += term;
        }
        total
    }

    /// Simultaneous substitution. Identity entries are dropped; after that,
    /// no substituted variable may appear in any replacement expression.
    pub fn substitute(
        &self,
        sigma: &BTreeMap<VarId, Poly>,
        reg: &VarRegistry,
    ) -> Result<Self, ExprError> {
        let sigma: BTreeMap<&VarId, &Poly> = sigma
            .iter()
            .filter(|(v, p)| p.terms.as_slice() != Poly::var(**v).terms.as_slice())
            .collect();
        for poly in sigma.values() {
            for v in poly.vars() {
                if sigma.contains_key(&v) {
                    return Err(ExprError::SubstitutionConflict(reg.name(v).to_string()));
                }
            }
        }
        let mut acc = Poly::zero();
        for (pp, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for &(v, e) in pp.powers() {
                match sigma.get(&v) {
                    Some(rep) => term = term.mul(&rep.pow(e)),
                    None => {
                        term = term.mul(&Poly {
                            terms: vec![(PowerProduct::from_powers(vec![(v, e)]), Rat::one())],
                        })
                    }
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Variable-to-variable renaming (used for priming). Exponents carry over.
    pub fn rename_vars(&self, map: &BTreeMap<VarId, VarId>) -> Self {
        Self::canonicalize(self.terms.iter().map(|(pp, c)| {
            let powers = pp
                .powers()
                .iter()
                .map(|&(v, e)| (*map.get(&v).unwrap_or(&v), e))
                .collect();
            (PowerProduct::from_powers(powers), c.clone())
        }))
    }

    /// Formal partial derivative with respect to `v`.
    pub fn derivative(&self, v: VarId) -> Self {
        Self::canonicalize(self.terms.iter().filter_map(|(pp, c)| {
            let e = pp.exponent(v);
            if e == 0 {
                return None;
            }
            let powers = pp
                .powers()
                .iter()
                .map(|&(w, k)| if w == v { (w, k - 1) } else { (w, k) })
                .collect();
            Some((PowerProduct::from_powers(powers), c * Rat::from_integer(e.into())))
        }))
    }

    /// Split `p = c*v + rest` where `rest` is free of `v`. Errors when the
    /// degree in `v` exceeds 1 or the coefficient of `v` is not constant.
    pub fn split_linear(&self, v: VarId, reg: &VarRegistry) -> Result<(Rat, Poly), ExprError> {
        let deg = self.degree_in(v);
        if deg > 1 {
            return Err(ExprError::UnsupportedDegree {
                var: reg.name(v).to_string(),
                degree: deg,
                max: 1,
            });
        }
        let mut coeff = Rat::zero();
        let mut rest = Vec::new();
        for (pp, c) in &self.terms {
            if pp.exponent(v) == 0 {
                rest.push((pp.clone(), c.clone()));
            } else if pp.powers().len() == 1 {
                coeff = c.clone();
            } else {
                // v multiplied by another variable: not linear in the sense
                // the bound classification needs.
                return Err(ExprError::UnsupportedDegree {
                    var: reg.name(v).to_string(),
                    degree: deg,
                    max: 1,
                });
            }
        }
        Ok((coeff, Poly::canonicalize(rest)))
    }

    /// Root of `p = 0` solved for `v` when `p` is linear in `v`, or `None`
    /// when `p` has no `v` term.
    pub fn solve_for_var(&self, v: VarId, reg: &VarRegistry) -> Result<Option<Poly>, ExprError> {
        let (coeff, rest) = self.split_linear(v, reg)?;
        if coeff.is_zero() {
            return Ok(None);
        }
        Ok(Some(rest.scale(&(-coeff.recip()))))
    }

    /// Decompose a univariate polynomial in `v` as `a*v^2 + b*v + c` with
    /// constant coefficients. Errors if other variables or degree > 2 appear.
    pub fn univariate_quadratic(
        &self,
        reg: &VarRegistry,
    ) -> Result<(VarId, Rat, Rat, Rat), ExprError> {
        let vars = self.vars();
        let v = match vars.iter().next() {
            Some(&v) if vars.len() == 1 => v,
            _ => {
                let name = vars
                    .iter()
                    .map(|&v| reg.name(v).to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                return Err(ExprError::UnsupportedDegree {
                    var: name,
                    degree: self.degree(),
                    max: 2,
                });
            }
        };
        if self.degree_in(v) > 2 {
            return Err(ExprError::UnsupportedDegree {
                var: reg.name(v).to_string(),
                degree: self.degree_in(v),
                max: 2,
            });
        }
        let mut a = Rat::zero();
        let mut b = Rat::zero();
        let mut c = Rat::zero();
        for (pp, k) in &self.terms {
            match pp.exponent(v) {
                2 => a = k.clone(),
                1 => b = k.clone(),
                _ => c = k.clone(),
            }
        }
        Ok((v, a, b, c))
    }

    /// Positive gcd of the coefficients (numerator gcd over denominator lcm);
    /// zero polynomial yields 1.
    pub fn content(&self) -> Rat {
        use num_integer::Integer;
        if self.terms.is_empty() {
            return Rat::one();
        }
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        Rat::new(num, den)
    }

    /// Leading (first-in-order) coefficient; zero polynomial yields 0.
    pub fn leading_coefficient(&self) -> Rat {
        self.terms
            .first()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Text form: constant term first, then monomials in descending order,
    /// e.g. `4 - 1*x^2 + 0.05*x`.
    pub fn render(&self, reg: &VarRegistry) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let constant = self
            .terms
            .iter()
            .find(|(pp, _)| pp.is_constant())
            .map(|(_, c)| c.clone());
        let mut parts: Vec<(bool, String)> = Vec::new();
        if let Some(c) = &constant {
            parts.push((c.is_negative(), rat_to_string(&c.abs())));
        }
        for (pp, c) in &self.terms {
            if pp.is_constant() {
                continue;
            }
            let mut s = String::new();
            let _ = write!(s, "{}", rat_to_string(&c.abs()));
            for &(v, e) in pp.powers() {
                let _ = write!(s, "*{}", reg.name(v));
                if e > 1 {
                    let _ = write!(s, "^{}", e);
                }
            }
            parts.push((c.is_negative(), s));
        }
        let mut out = String::new();
        for (i, (neg, body)) in parts.iter().enumerate() {
            if i == 0 {
                if *neg {
                    out.push('-');
                }
            } else {
                out.push_str(if *neg { " - " } else { " + " });
            }
            out.push_str(body);
        }
        out
    }
}
