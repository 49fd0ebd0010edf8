//! Exact rational feasibility of linear inequality systems.
//!
//! Fourier-Motzkin elimination decides small systems (it also supports
//! strict inequalities, needed for interior/overlap checks); a rational
//! simplex phase 1 takes over when more than three variables are involved.

use crate::expr::{Poly, Rat, VarId};
use crate::xadd::XaddError;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// `sum(coeffs . vars) + constant >= 0`, or `> 0` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinConstraint {
    pub coeffs: BTreeMap<VarId, Rat>,
    pub constant: Rat,
    pub strict: bool,
}

impl LinConstraint {
    /// Extract a linear constraint `p >= 0` from a polynomial. Errors on
    /// nonlinear terms, pointing the caller at the linearization pass.
    pub fn from_poly(p: &Poly, strict: bool, reg: &crate::expr::VarRegistry) -> Result<Self, XaddError> {
        let mut coeffs = BTreeMap::new();
        let mut constant = Rat::zero();
        for (pp, c) in p.terms() {
            match pp.powers() {
                [] => constant = c.clone(),
                [(v, 1)] => {
                    coeffs.insert(*v, c.clone());
                }
                _ => {
                    return Err(XaddError::NonlinearDecision(p.render(reg)));
                }
            }
        }
        Ok(LinConstraint {
            coeffs,
            constant,
            strict,
        })
    }

    /// Closed-region negation: `not (p >= 0)` becomes `-p >= 0`. Single
    /// boundary points are deliberately kept feasible on both sides.
    pub fn negated(&self) -> Self {
        LinConstraint {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, -c.clone())).collect(),
            constant: -self.constant.clone(),
            strict: self.strict,
        }
    }

    pub fn lower_bound(v: VarId, lo: Rat) -> Self {
        LinConstraint {
            coeffs: [(v, Rat::one())].into(),
            constant: -lo,
            strict: false,
        }
    }

    pub fn upper_bound(v: VarId, hi: Rat) -> Self {
        LinConstraint {
            coeffs: [(v, -Rat::one())].into(),
            constant: hi,
            strict: false,
        }
    }

    fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, _)| *v)
    }

    fn coeff(&self, v: VarId) -> Rat {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rat::zero)
    }

    fn is_constant(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    fn holds_trivially(&self) -> bool {
        debug_assert!(self.is_constant());
        if self.strict {
            self.constant.is_positive()
        } else {
            !self.constant.is_negative()
        }
    }
}

/// Decide satisfiability of a conjunction of linear constraints over the
/// reals. Dispatches on dimension: Fourier-Motzkin up to 3 variables,
/// simplex phase 1 above.
pub fn feasible(constraints: &[LinConstraint]) -> bool {
    let vars: BTreeSet<VarId> = constraints.iter().flat_map(|c| c.vars()).collect();
    if constraints.iter().any(|c| c.strict) || vars.len() <= 3 {
        fourier_motzkin(constraints.to_vec(), &vars)
    } else {
        simplex_phase1(constraints, &vars)
    }
}

fn fourier_motzkin(mut constraints: Vec<LinConstraint>, vars: &BTreeSet<VarId>) -> bool {
    for &v in vars {
        let mut lows = Vec::new();
        let mut ups = Vec::new();
        let mut rest = Vec::new();
        for c in constraints {
            let a = c.coeff(v);
            if a.is_positive() {
                lows.push(c);
            } else if a.is_negative() {
                ups.push(c);
            } else {
                rest.push(c);
            }
        }
        for lo in &lows {
            let a = lo.coeff(v);
            for up in &ups {
                let b = up.coeff(v); // negative
                // (-b) * lo + a * up eliminates v
                let mut coeffs: BTreeMap<VarId, Rat> = BTreeMap::new();
                for (w, c) in &lo.coeffs {
                    if *w != v {
                        *coeffs.entry(*w).or_insert_with(Rat::zero) += c * -b.clone();
                    }
                }
                for (w, c) in &up.coeffs {
                    if *w != v {
                        *coeffs.entry(*w).or_insert_with(Rat::zero) += c * a.clone();
                    }
                }
                coeffs.retain(|_, c| !c.is_zero());
                let combined = LinConstraint {
                    coeffs,
                    constant: &lo.constant * -b.clone() + &up.constant * a.clone(),
                    strict: lo.strict || up.strict,
                };
                if combined.is_constant() {
                    if !combined.holds_trivially() {
                        return false;
                    }
                } else {
                    rest.push(combined);
                }
            }
        }
        constraints = rest;
    }
    constraints.iter().all(|c| c.holds_trivially())
}

/// Rational simplex phase 1 with Bland's rule. Free variables are split
/// into nonnegative pairs; feasibility holds iff all artificials reach zero.
fn simplex_phase1(constraints: &[LinConstraint], vars: &BTreeSet<VarId>) -> bool {
    let var_list: Vec<VarId> = vars.iter().copied().collect();
    let n_free = var_list.len();
    let n_struct = 2 * n_free; // x = x+ - x-
    let m = constraints.len();
    if m == 0 {
        return true;
    }
    // columns: [x+ pairs | x- pairs | slack per row | artificial per row]
    let n_cols = n_struct + m + m;
    let mut tableau: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for (i, c) in constraints.iter().enumerate() {
        // sum a_j x_j + constant >= 0  ->  sum a_j x_j - s_i = -constant
        let mut row = vec![Rat::zero(); n_cols + 1];
        for (j, &v) in var_list.iter().enumerate() {
            let a = c.coeff(v);
            row[j] = a.clone();
            row[n_free + j] = -a;
        }
        row[n_struct + i] = -Rat::one(); // slack
        let mut rhs = -c.constant.clone();
        if rhs.is_negative() {
            for cell in row.iter_mut() {
                *cell = -cell.clone();
            }
            rhs = -rhs;
        }
        row[n_cols] = rhs;
        row[n_struct + m + i] = Rat::one(); // artificial
        basis.push(n_struct + m + i);
        tableau.push(row);
    }
    // objective: minimize sum of artificials; expressed as reduced costs
    let mut obj = vec![Rat::zero(); n_cols + 1];
    for row in &tableau {
        for (j, cell) in row.iter().enumerate() {
            obj[j] += cell;
        }
    }
    for i in n_struct + m..n_cols {
        obj[i] = Rat::zero();
    }

    loop {
        // Bland: smallest index with positive reduced cost
        let mut pivot_col = None;
        for (j, c) in obj.iter().enumerate().take(n_cols) {
            if c.is_positive() {
                pivot_col = Some(j);
                break;
            }
        }
        let Some(col) = pivot_col else {
            break;
        };
        // ratio test, Bland tie-break on basis index
        let mut pivot_row: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[n_cols] / &row[col];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[pivot_row.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    pivot_row = Some(i);
                }
            }
        }
        let Some(prow) = pivot_row else {
            // unbounded in phase 1 cannot happen with artificial start;
            // treat as feasible to stay safe
            break;
        };
        // pivot
        let piv = tableau[prow][col].clone();
        for cell in tableau[prow].iter_mut() {
            *cell /= &piv;
        }
        for i in 0..m {
            if i != prow && !tableau[i][col].is_zero() {
                let factor = tableau[i][col].clone();
                for j in 0..=n_cols {
                    let delta = &tableau[prow][j] * &factor;
                    tableau[i][j] -= delta;
                }
            }
        }
        if !obj[col].is_zero() {
            let factor = obj[col].clone();
            for j in 0..=n_cols {
                let delta = &tableau[prow][j] * &factor;
                obj[j] -= delta;
            }
        }
        basis[prow] = col;
    }
    // infeasible iff some artificial remains positive
    for (i, &b) in basis.iter().enumerate() {
        if b >= n_struct + m && tableau[i][n_cols].is_positive() {
            return false;
        }
    }
    true
}
