//! Replace univariate-quadratic decisions by equivalent linear tests built
//! from the real roots of the quadratic.

use crate::expr::{Poly, Rat, VarId};
use crate::xadd::{NodeId, XaddError, XaddNode, XaddStore};
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

/// Rewrite every nonlinear decision of `root` into linear tests. Quadratic
/// decisions over one continuous variable split on their real roots; a
/// quadratic with no real roots has constant sign and folds away. Irrational
/// roots are replaced by rational enclosures tight to 1e-9, counted in
/// `stats.root_approximations`. Leaves are untouched. The result may need
/// reordering (new decisions take fresh order keys).
pub fn linearize(store: &mut XaddStore, root: NodeId) -> Result<NodeId, XaddError> {
    store.check_owner(root)?;
    let mut memo = HashMap::new();
    let raw = linearize_rec(store, root, &mut memo)?;
    let ordered = store.reorder(raw)?;
    store.reduce(ordered)
}

fn linearize_rec(
    store: &mut XaddStore,
    f: NodeId,
    memo: &mut HashMap<NodeId, NodeId>,
) -> Result<NodeId, XaddError> {
    if let Some(&r) = memo.get(&f) {
        return Ok(r);
    }
    let r = match self_node(store, f) {
        XaddNode::Leaf { .. } => f,
        XaddNode::Internal { dec, hi, lo } => {
            let h = linearize_rec(store, hi, memo)?;
            let l = linearize_rec(store, lo, memo)?;
            match store.decision(dec).clone() {
                crate::expr::Decision::Bool(_) => store.get_node(dec, h, l)?,
                crate::expr::Decision::Ineq(p) => {
                    if p.degree() <= 1 {
                        store.get_node(dec, h, l)?
                    } else {
                        split_quadratic(store, &p, h, l)?
                    }
                }
            }
        }
    };
    memo.insert(f, r);
    Ok(r)
}

fn self_node(store: &XaddStore, f: NodeId) -> XaddNode {
    store.node(f).clone()
}

/// Build the linear-test subdiagram equivalent to `p >= 0` for a univariate
/// quadratic `p = a v^2 + b v + c` with `a != 0`, branching to `hi`/`lo`.
fn split_quadratic(
    store: &mut XaddStore,
    p: &Poly,
    hi: NodeId,
    lo: NodeId,
) -> Result<NodeId, XaddError> {
    let (v, a, b, c) = p
        .univariate_quadratic(store.registry())
        .map_err(|_| XaddError::NotUnivariateQuadratic(p.render(store.registry())))?;
    debug_assert!(!a.is_zero());
    let disc = &b * &b - Rat::from_integer(4.into()) * &a * &c;
    if !disc.is_positive() {
        // no sign change: a > 0 keeps p >= 0 everywhere (touching zero at a
        // double root); a < 0 keeps p <= 0 except possibly one point, which
        // is immaterial for continuous functions
        return Ok(if a.is_positive() { hi } else { lo });
    }
    let sqrt_disc = sqrt_or_enclose(store, &disc);
    let two_a = Rat::from_integer(2.into()) * &a;
    let mut r1 = (-&b - &sqrt_disc) / &two_a;
    let mut r2 = (-&b + &sqrt_disc) / &two_a;
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    let test = |c: &Rat| Poly::var(v).add(&Poly::constant(-c.clone()));
    if a.is_positive() {
        // p >= 0 outside [r1, r2]
        let inner = store.node_from_ineq(test(&r2), hi, lo)?;
        store.node_from_ineq(test(&r1), inner, hi)
    } else {
        // p >= 0 inside [r1, r2]
        let inner = store.node_from_ineq(test(&r2), lo, hi)?;
        store.node_from_ineq(test(&r1), inner, lo)
    }
}

/// Square root of a nonnegative rational: exact when both numerator and
/// denominator are perfect squares, otherwise a rational enclosure within
/// 1e-9 (recorded in the store statistics).
fn sqrt_or_enclose(store: &mut XaddStore, r: &Rat) -> Rat {
    debug_assert!(!r.is_negative());
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        return Rat::new(sn, sd);
    }
    // floor(sqrt(n*d*k^2)) / (d*k) is within 1/(d*k) <= 1e-9 of the root
    let k = BigInt::from(10u64.pow(9));
    let scaled = n * d * &k * &k;
    let s = scaled.sqrt();
    store.stats.root_approximations += 1;
    Rat::new(s, d * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, Assignment, ExtVal, VarKind};
    use rand::prelude::*;

    fn store_with_x() -> (XaddStore, VarId) {
        let mut store = XaddStore::new();
        let x = store.registry_mut().declare("x", VarKind::Cont).unwrap();
        (store, x)
    }

    #[test]
    fn rover_style_quadratic_splits_into_interval_tests() {
        let (mut store, x) = store_with_x();
        let one = store.one().unwrap();
        let zero = store.zero().unwrap();
        // 4 - x^2 >= 0  <=>  -2 <= x <= 2
        let p = Poly::constant(rat(4)).sub(&Poly::var(x).pow(2));
        let quad = store.node_from_ineq(p, one, zero).unwrap();
        let lin = linearize(&mut store, quad).unwrap();
        assert!(store.is_ordered(lin));
        // every reachable decision is linear now
        for (path, _) in store.export_paths(lin) {
            for (dec, _) in path {
                if let crate::expr::Decision::Ineq(q) = store.decision(dec) {
                    assert!(q.degree() <= 1);
                }
            }
        }
        for k in [-4i64, -2, -1, 0, 1, 2, 4] {
            let rho = Assignment::new().with_real(x, rat(k));
            let want = if (-2..=2).contains(&k) { rat(1) } else { rat(0) };
            assert_eq!(store.evaluate(lin, &rho).unwrap(), ExtVal::Finite(want));
        }
    }

    #[test]
    fn already_linear_is_identity() {
        let (mut store, x) = store_with_x();
        let one = store.one().unwrap();
        let zero = store.zero().unwrap();
        let p = Poly::var(x).add(&Poly::constant(rat(-2)));
        let d = store.node_from_ineq(p, one, zero).unwrap();
        assert_eq!(linearize(&mut store, d).unwrap(), d);
    }

    #[test]
    fn no_real_roots_folds_to_constant_sign() {
        let (mut store, x) = store_with_x();
        let one = store.one().unwrap();
        let zero = store.zero().unwrap();
        // x^2 + 1 >= 0 always
        let p = Poly::var(x).pow(2).add(&Poly::constant(rat(1)));
        let d = store.node_from_ineq(p, one, zero).unwrap();
        assert_eq!(linearize(&mut store, d).unwrap(), one);
        // -x^2 - 1 >= 0 never
        let q = Poly::var(x).pow(2).neg().sub(&Poly::constant(rat(1)));
        let d = store.node_from_ineq(q, one, zero).unwrap();
        assert_eq!(linearize(&mut store, d).unwrap(), zero);
    }

    #[test]
    fn random_quadratics_agree_with_sign_evaluation() {
        let (mut store, x) = store_with_x();
        let one = store.one().unwrap();
        let zero = store.zero().unwrap();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..40 {
            let a = rat(if rng.random_bool(0.5) { 1 } else { -1 });
            let b = rat(rng.random_range(-9i64..=9));
            let c = rat(rng.random_range(-9i64..=9));
            let p = Poly::var(x)
                .pow(2)
                .scale(&a)
                .add(&Poly::linear(b.clone(), x))
                .add(&Poly::constant(c.clone()));
            let d = store.node_from_ineq(p.clone(), one, zero).unwrap();
            let lin = linearize(&mut store, d).unwrap();
            for _ in 0..1000 {
                // sample off the (possibly approximated) boundary
                let num = rng.random_range(-4000i64..=4000);
                if num % 10 == 0 {
                    continue;
                }
                let xv = Rat::new(num.into(), 100.into());
                let sign = {
                    let mut reals = std::collections::BTreeMap::new();
                    reals.insert(x, xv.clone());
                    !p.eval(&reals, store.registry()).unwrap().is_negative()
                };
                let rho = Assignment::new().with_real(x, xv);
                let got = store.evaluate(lin, &rho).unwrap();
                let want = if sign { rat(1) } else { rat(0) };
                assert_eq!(got, ExtVal::Finite(want), "p = {:?}", p);
            }
        }
    }

    #[test]
    fn irrational_roots_are_recorded() {
        let (mut store, x) = store_with_x();
        let one = store.one().unwrap();
        let zero = store.zero().unwrap();
        // x^2 - 2 >= 0: roots +-sqrt(2)
        let p = Poly::var(x).pow(2).add(&Poly::constant(rat(-2)));
        let d = store.node_from_ineq(p, one, zero).unwrap();
        let before = store.stats.root_approximations;
        let lin = linearize(&mut store, d).unwrap();
        assert!(store.stats.root_approximations > before);
        // sign agrees away from the boundary
        for (xv, want) in [(-2i64, 1i64), (0, 0), (1, 0), (2, 1)] {
            let rho = Assignment::new().with_real(x, rat(xv));
            assert_eq!(
                store.evaluate(lin, &rho).unwrap(),
                ExtVal::Finite(rat(want))
            );
        }
    }
}
