use super::*;
use crate::expr::{rat, rat_frac, ExtPoly, ExtVal, Poly, VarKind};
use rand::prelude::*;

fn new_store() -> (XaddStore, VarId, VarId) {
    let mut store = XaddStore::new();
    let d = store.registry_mut().declare("d", VarKind::Bool).unwrap();
    let x = store.registry_mut().declare("x", VarKind::Cont).unwrap();
    (store, d, x)
}

/// x >= c as a decision on a diagram pair.
fn ge(store: &mut XaddStore, x: VarId, c: i64, hi: NodeId, lo: NodeId) -> NodeId {
    let p = Poly::var(x).add(&Poly::constant(rat(-c)));
    store.node_from_ineq(p, hi, lo).unwrap()
}

fn assign(d: VarId, dv: bool, x: VarId, xv: Rat) -> Assignment {
    Assignment::new().with_bool(d, dv).with_real(x, xv)
}

/// The closed-form two-stage inventory value function, transcribed case by
/// case, then reordered into canonical form.
fn build_v2(store: &mut XaddStore, d: VarId, x: VarId) -> NodeId {
    let lin = |store: &mut XaddStore, c0: (i64, i64), c1: (i64, i64)| {
        let p = Poly::constant(rat_frac(c0.0, c0.1)).add(&Poly::linear(rat_frac(c1.0, c1.1), x));
        store.poly_leaf(p).unwrap()
    };
    let hi1 = lin(store, (555, 2), (-1, 10)); // 277.5 - 0.1x
    let hi2 = lin(store, (465, 2), (1, 20)); // 232.5 + 0.05x
    let hi3 = lin(store, (165, 2), (21, 20)); // 82.5 + 1.05x
    let lo1 = lin(store, (265, 2), (-1, 10)); // 132.5 - 0.1x
    let lo2 = lin(store, (205, 2), (1, 20)); // 102.5 + 0.05x
    let lo3 = lin(store, (105, 2), (21, 20)); // 52.5 + 1.05x
    let d_inner = ge(store, x, 150, hi2, hi3);
    let d_branch = ge(store, x, 300, hi1, d_inner);
    let nd_inner = ge(store, x, 50, lo2, lo3);
    let nd_branch = ge(store, x, 200, lo1, nd_inner);
    let mid = store.node_bool(d, d_branch, nd_branch).unwrap();
    let ninf = store.neg_inf().unwrap();
    let ub = store
        .node_from_ineq(Poly::constant(rat(500)).sub(&Poly::var(x)), mid, ninf)
        .unwrap();
    let root = ge(store, x, 0, ub, ninf);
    store.reorder(root).unwrap()
}

#[test]
fn get_node_folds_redundant_branches() {
    let (mut store, _, x) = new_store();
    let t = store.constant(rat(7)).unwrap();
    let n = ge(&mut store, x, 0, t, t);
    assert_eq!(n, t);
}

#[test]
fn get_node_hash_conses() {
    let (mut store, _, x) = new_store();
    let a = store.constant(rat(1)).unwrap();
    let b = store.constant(rat(2)).unwrap();
    let n1 = ge(&mut store, x, 0, a, b);
    // unrelated insertion in between
    let _ = ge(&mut store, x, 17, b, a);
    let n2 = ge(&mut store, x, 0, a, b);
    assert_eq!(n1, n2);
}

#[test]
fn get_node_replays_like_a_naive_map() {
    let (mut store, _, x) = new_store();
    let leaves: Vec<NodeId> = (0..6).map(|i| store.constant(rat(i)).unwrap()).collect();
    let decs: Vec<u32> = (0..5)
        .map(|c| {
            let p = Poly::var(x).add(&Poly::constant(rat(-c)));
            match Decision::ineq(p) {
                NormalizedIneq::Dec { dec, .. } => store.register_decision(dec),
                _ => unreachable!(),
            }
        })
        .collect();
    let mut rng = StdRng::seed_from_u64(11);
    let mut mirror: HashMap<(u32, NodeId, NodeId), NodeId> = HashMap::new();
    for _ in 0..500 {
        let dec = decs[rng.random_range(0..decs.len())];
        let hi = leaves[rng.random_range(0..leaves.len())];
        let lo = leaves[rng.random_range(0..leaves.len())];
        let id = store.get_node(dec, hi, lo).unwrap();
        if hi == lo {
            assert_eq!(id, lo);
            continue;
        }
        match mirror.get(&(dec, hi, lo)) {
            Some(&prev) => assert_eq!(id, prev),
            None => {
                mirror.insert((dec, hi, lo), id);
            }
        }
    }
}

#[test]
fn evaluate_closed_form_inventory_examples() {
    let (mut store, d, x) = new_store();
    let v2 = build_v2(&mut store, d, x);
    assert!(store.is_ordered(v2));
    let v = store.evaluate(v2, &assign(d, true, x, rat(200))).unwrap();
    assert_eq!(v, ExtVal::Finite(rat_frac(485, 2))); // 242.5
    let v = store.evaluate(v2, &assign(d, true, x, rat(400))).unwrap();
    assert_eq!(v, ExtVal::Finite(rat_frac(475, 2))); // 237.5
    let v = store.evaluate(v2, &assign(d, false, x, rat(-1))).unwrap();
    assert_eq!(v, ExtVal::NegInf);
}

#[test]
fn v2_diagram_has_seven_partitions() {
    let (mut store, d, x) = new_store();
    let v2 = build_v2(&mut store, d, x);
    // 6 finite cases plus the -inf complement; after reduction the -inf
    // paths may share a terminal but the finite leaves stay distinct
    let paths = store.export_paths(v2);
    let finite = paths
        .iter()
        .filter(|(_, leaf)| {
            matches!(store.node(*leaf), XaddNode::Leaf { value, .. } if !value.is_infinite())
        })
        .count();
    assert_eq!(finite, 6);
}

#[test]
fn apply_identity_and_infinity_shortcuts() {
    let (mut store, d, x) = new_store();
    let v2 = build_v2(&mut store, d, x);
    let zero = store.zero().unwrap();
    assert_eq!(store.apply(v2, zero, BinOp::Add).unwrap(), v2);
    let ninf = store.neg_inf().unwrap();
    assert_eq!(store.apply(v2, ninf, BinOp::Max).unwrap(), v2);
    let one = store.one().unwrap();
    assert_eq!(store.apply(v2, one, BinOp::Mul).unwrap(), v2);
    // masking: 0 * f = 0 even when f holds infinities
    assert_eq!(store.apply(zero, v2, BinOp::Mul).unwrap(), zero);
}

#[test]
fn cross_sum_of_two_partition_diagrams() {
    let (mut store, _, x) = new_store();
    let a1 = store.constant(rat(1)).unwrap();
    let a2 = store.constant(rat(2)).unwrap();
    let b1 = store.poly_leaf(Poly::var(x)).unwrap();
    let b2 = store.constant(rat(10)).unwrap();
    let f = ge(&mut store, x, 0, a1, a2);
    let g = ge(&mut store, x, 5, b1, b2);
    let sum = store.apply(f, g, BinOp::Add).unwrap();
    // feasible partitions: x>=5 (1+x), 0<=x<5 (11), x<0 (12); the x>=5
    // branch under x<0 is structurally absent after reduction
    let mut seen = Vec::new();
    for (_, leaf) in store.export_paths(sum) {
        if let XaddNode::Leaf { value, .. } = store.node(leaf) {
            seen.push(value.render(store.registry()));
        }
    }
    seen.sort();
    assert_eq!(seen, vec!["1 + 1*x", "11", "12"]);
}

#[test]
fn scale_and_negate() {
    let (mut store, _, x) = new_store();
    let p = Poly::constant(rat(4)).sub(&Poly::var(x).pow(2));
    let leaf = store.poly_leaf(p).unwrap();
    assert_eq!(store.scale(leaf, &rat(1)).unwrap(), leaf);
    let neg = store.negate(leaf).unwrap();
    match store.node(neg) {
        XaddNode::Leaf { value, .. } => {
            assert_eq!(value.render(store.registry()), "-4 + 1*x^2");
        }
        _ => panic!("expected leaf"),
    }
    // scale(0) rejected on diagrams with infinite leaves
    let ninf = store.neg_inf().unwrap();
    let g = ge(&mut store, x, 0, leaf, ninf);
    assert!(store.scale(g, &rat(0)).is_err());
    assert_eq!(store.scale(g, &rat(2)).is_ok(), true);
}

#[test]
fn restrict_and_marginalize() {
    let (mut store, d, x) = new_store();
    // CPF for d' = true: {d: 0.7, !d: 0.3} as a function of d
    let p7 = store.rat_leaf(7, 10).unwrap();
    let p3 = store.rat_leaf(3, 10).unwrap();
    let cpf = store.node_bool(d, p7, p3).unwrap();

    // restricting a leaf is a no-op
    let leaf = store.poly_leaf(Poly::var(x)).unwrap();
    assert_eq!(store.restrict(leaf, d, true).unwrap(), leaf);

    // joint over d': ite(d', cpf, 1 - cpf); marginalizing d' sums to one
    let dp = {
        let reg = store.registry_mut();
        let dp = reg.declare("dp", VarKind::Bool).unwrap();
        dp
    };
    let one = store.one().unwrap();
    let inv = store.apply(one, cpf, BinOp::Sub).unwrap();
    let joint = store.node_bool(dp, cpf, inv).unwrap();
    let marg = store.marginalize_bool(joint, dp).unwrap();
    assert_eq!(marg, one);

    // f independent of b marginalizes to 2f
    let marg2 = store.marginalize_bool(cpf, dp).unwrap();
    let twice = store.scale(cpf, &rat(2)).unwrap();
    assert_eq!(marg2, twice);
}

#[test]
fn reorder_is_identity_on_ordered_diagrams() {
    let (mut store, d, x) = new_store();
    let v2 = build_v2(&mut store, d, x);
    assert_eq!(store.reorder(v2).unwrap(), v2);
}

#[test]
fn reorder_fixes_out_of_order_diagrams() {
    let (mut store, _, x) = new_store();
    let a = store.constant(rat(1)).unwrap();
    let b = store.constant(rat(2)).unwrap();
    let c = store.constant(rat(3)).unwrap();
    // register decision keys in order: d0 = (x >= 0), d1 = (x >= 5)
    let lower = ge(&mut store, x, 0, a, b);
    // build d1 above d0: out of order
    let p = Poly::var(x).add(&Poly::constant(rat(-5)));
    let d1 = match Decision::ineq(p) {
        NormalizedIneq::Dec { dec, .. } => store.register_decision(dec),
        _ => unreachable!(),
    };
    let bad = store.get_node(d1, lower, c).unwrap();
    assert!(!store.is_ordered(bad));
    let fixed = store.reorder(bad).unwrap();
    assert!(store.is_ordered(fixed));
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let xv = rat(rng.random_range(-20i64..20));
        let rho = Assignment::new().with_real(x, xv);
        assert_eq!(
            store.evaluate(bad, &rho).unwrap(),
            store.evaluate(fixed, &rho).unwrap()
        );
    }
}

#[test]
fn export_paths_basics() {
    let (mut store, d, x) = new_store();
    let leaf = store.poly_leaf(Poly::var(x)).unwrap();
    let paths = store.export_paths(leaf);
    assert_eq!(paths.len(), 1);
    assert!(paths[0].0.is_empty());

    let v2 = build_v2(&mut store, d, x);
    for (path, _) in store.export_paths(v2) {
        // decision keys strictly increase along each exported path
        let keys: Vec<u64> = path.iter().map(|&(dec, _)| store.order_key(dec)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn substitution_matches_composed_evaluation() {
    let (mut store, d, x) = new_store();
    let a = store.registry_mut().declare("a", VarKind::Param).unwrap();
    let v2 = build_v2(&mut store, d, x);
    // x := x + a - 150
    let mut sigma = BTreeMap::new();
    sigma.insert(
        x,
        Poly::var(x).add(&Poly::var(a)).add(&Poly::constant(rat(-150))),
    );
    let sub = store.substitute(v2, &sigma).unwrap();
    assert!(store.is_ordered(sub));
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let xv = rat(rng.random_range(-50i64..600));
        let av = rat(rng.random_range(0i64..300));
        let dv = rng.random_bool(0.5);
        let rho = Assignment::new()
            .with_bool(d, dv)
            .with_real(x, xv.clone())
            .with_real(a, av.clone());
        let composed = assign(d, dv, x, xv + av - rat(150));
        assert_eq!(
            store.evaluate(sub, &rho).unwrap(),
            store.evaluate(v2, &composed).unwrap()
        );
    }
}

#[test]
fn prime_renaming_preserves_shape() {
    let (mut store, d, x) = new_store();
    let dp = store.registry_mut().declare_primed(d).unwrap();
    let xp = store.registry_mut().declare_primed(x).unwrap();
    let v2 = build_v2(&mut store, d, x);
    let mut map = BTreeMap::new();
    map.insert(d, dp);
    map.insert(x, xp);
    let primed = store.rename_vars(v2, &map).unwrap();
    let vars = store.collect_vars(primed);
    assert!(vars.contains(&dp) && vars.contains(&xp));
    assert!(!vars.contains(&d) && !vars.contains(&x));
    // same value under the renamed assignment
    let rho = assign(d, true, x, rat(200));
    let rho_p = assign(dp, true, xp, rat(200));
    assert_eq!(
        store.evaluate(v2, &rho).unwrap(),
        store.evaluate(primed, &rho_p).unwrap()
    );
}

#[test]
fn max_introduces_comparison_and_keeps_annotation() {
    let (mut store, _, x) = new_store();
    let a = store.registry_mut().declare("a", VarKind::Param).unwrap();
    let maximizer = store.constant(rat(0)).unwrap();
    let ann = Annotation {
        action: Some("order".to_string()),
        params: vec![(a, maximizer)],
    };
    // f = 150 - 0.05x annotated, g = 85 + 0.05x
    let fpoly = Poly::constant(rat(150)).add(&Poly::linear(rat_frac(-1, 20), x));
    let f = store
        .leaf_ann(ExtPoly::Finite(fpoly), Some(ann.clone()))
        .unwrap();
    let g = {
        let p = Poly::constant(rat(85)).add(&Poly::linear(rat_frac(1, 20), x));
        store.poly_leaf(p).unwrap()
    };
    let m = store.apply(f, g, BinOp::Max).unwrap();
    // crossover at x = 650
    let low = store
        .evaluate(m, &Assignment::new().with_real(x, rat(0)))
        .unwrap();
    assert_eq!(low, ExtVal::Finite(rat(150)));
    let high = store
        .evaluate(m, &Assignment::new().with_real(x, rat(1000)))
        .unwrap();
    assert_eq!(high, ExtVal::Finite(rat(135)));
    // the winning side kept its annotation
    let paths = store.export_paths(m);
    let mut annotated = 0;
    for (_, leaf) in paths {
        if let XaddNode::Leaf { ann: Some(a2), .. } = store.node(leaf) {
            annotated += 1;
            assert_eq!(a2, &ann);
        }
    }
    assert_eq!(annotated, 1);
}

#[test]
fn foreign_node_is_rejected() {
    let (mut s1, _, x1) = new_store();
    let (mut s2, _, _) = new_store();
    let l1 = s1.poly_leaf(Poly::var(x1)).unwrap();
    let l2 = s2.zero().unwrap();
    assert_eq!(s2.check_owner(l1), Err(XaddError::ForeignNode));
    assert!(s2.apply(l2, l1, BinOp::Add).is_err());
    // forked stores keep ids valid
    let mut fork = s1.fork();
    assert!(fork.check_owner(l1).is_ok());
    assert!(fork.apply(l1, l1, BinOp::Add).is_ok());
}

#[test]
fn budget_aborts_allocation() {
    let (mut store, _, x) = new_store();
    store.set_budget(Some(8));
    store.begin_epoch();
    let mut err = None;
    for c in 0..100 {
        let hi = match store.constant(rat(c)) {
            Ok(n) => n,
            Err(e) => {
                err = Some(e);
                break;
            }
        };
        let lo = match store.constant(rat(-c - 1)) {
            Ok(n) => n,
            Err(e) => {
                err = Some(e);
                break;
            }
        };
        if let Err(e) = {
            let p = Poly::var(x).add(&Poly::constant(rat(-c)));
            store.node_from_ineq(p, hi, lo)
        } {
            err = Some(e);
            break;
        }
    }
    assert!(matches!(err, Some(XaddError::BudgetExceeded(_))));
}

// ---- randomized evaluation oracles ----

struct DiagramGen {
    bools: Vec<VarId>,
    conts: Vec<VarId>,
    dec_pool: Vec<u32>,
}

impl DiagramGen {
    fn new(store: &mut XaddStore, n_bool: usize, n_cont: usize, n_dec: usize) -> Self {
        let bools: Vec<VarId> = (0..n_bool)
            .map(|i| store.registry_mut().declare(&format!("b{i}"), VarKind::Bool).unwrap())
            .collect();
        let conts: Vec<VarId> = (0..n_cont)
            .map(|i| store.registry_mut().declare(&format!("c{i}"), VarKind::Cont).unwrap())
            .collect();
        let mut rng = StdRng::seed_from_u64(99);
        let mut dec_pool = Vec::new();
        for &b in &bools {
            dec_pool.push(store.register_decision(Decision::Bool(b)));
        }
        while dec_pool.len() < n_dec {
            let mut p = Poly::constant(rat(rng.random_range(-10i64..=10)));
            for &v in &conts {
                if rng.random_bool(0.7) {
                    p = p.add(&Poly::linear(rat(rng.random_range(-3i64..=3)), v));
                }
            }
            if let NormalizedIneq::Dec { dec, .. } = Decision::ineq(p) {
                let idx = store.register_decision(dec);
                if !dec_pool.contains(&idx) {
                    dec_pool.push(idx);
                }
            }
        }
        dec_pool.sort_by_key(|&d| store.order_key(d));
        DiagramGen {
            bools,
            conts,
            dec_pool,
        }
    }

    fn gen(
        &self,
        store: &mut XaddStore,
        rng: &mut StdRng,
        allow_inf: bool,
    ) -> NodeId {
        self.gen_from(store, rng, 0, 3, allow_inf)
    }

    fn gen_from(
        &self,
        store: &mut XaddStore,
        rng: &mut StdRng,
        min_dec: usize,
        depth: u32,
        allow_inf: bool,
    ) -> NodeId {
        if depth == 0 || min_dec >= self.dec_pool.len() || rng.random_bool(0.25) {
            if allow_inf && rng.random_bool(0.15) {
                return if rng.random_bool(0.7) {
                    store.neg_inf().unwrap()
                } else {
                    store.pos_inf().unwrap()
                };
            }
            let mut p = Poly::constant(rat(rng.random_range(-5i64..=5)));
            for &v in &self.conts {
                if rng.random_bool(0.5) {
                    p = p.add(&Poly::linear(rat(rng.random_range(-2i64..=2)), v));
                }
            }
            return store.poly_leaf(p).unwrap();
        }
        let di = rng.random_range(min_dec..self.dec_pool.len());
        let hi = self.gen_from(store, rng, di + 1, depth - 1, allow_inf);
        let lo = self.gen_from(store, rng, di + 1, depth - 1, allow_inf);
        store.get_node(self.dec_pool[di], hi, lo).unwrap()
    }

    fn random_assignment(&self, rng: &mut StdRng) -> Assignment {
        let mut rho = Assignment::new();
        for &b in &self.bools {
            rho.bools.insert(b, rng.random_bool(0.5));
        }
        for &c in &self.conts {
            // halves, to probe boundaries occasionally
            rho.reals.insert(c, rat_frac(rng.random_range(-40i64..=40), 2));
        }
        rho
    }
}

fn ext_op(a: &ExtVal, b: &ExtVal, op: BinOp) -> ExtVal {
    use ExtVal::*;
    match op {
        BinOp::Add => match (a, b) {
            (Finite(x), Finite(y)) => Finite(x + y),
            (PosInf, _) | (_, PosInf) => PosInf,
            _ => NegInf,
        },
        BinOp::Sub => match (a, b) {
            (Finite(x), Finite(y)) => Finite(x - y),
            (PosInf, _) | (_, NegInf) => PosInf,
            _ => NegInf,
        },
        BinOp::Mul => match (a, b) {
            (Finite(x), Finite(y)) => Finite(x * y),
            _ => unreachable!("oracle only multiplies finite diagrams"),
        },
        BinOp::Max => match (a, b) {
            (Finite(x), Finite(y)) => Finite(x.clone().max(y.clone())),
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, o) => o.clone(),
            (o, NegInf) => o.clone(),
        },
        BinOp::Min => match (a, b) {
            (Finite(x), Finite(y)) => Finite(x.clone().min(y.clone())),
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, o) => o.clone(),
            (o, PosInf) => o.clone(),
        },
    }
}

#[test]
fn apply_matches_pointwise_oracle() {
    let mut store = XaddStore::new();
    let gen = DiagramGen::new(&mut store, 2, 2, 8);
    let mut rng = StdRng::seed_from_u64(2024);
    for round in 0..100 {
        let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Max, BinOp::Min]
            [round % 5];
        let allow_inf = matches!(op, BinOp::Max | BinOp::Min);
        let f = gen.gen(&mut store, &mut rng, allow_inf);
        let g = gen.gen(&mut store, &mut rng, allow_inf);
        let r = store.apply(f, g, op).unwrap();
        assert!(store.is_ordered(r), "unordered result for {op:?}");
        for _ in 0..100 {
            let rho = gen.random_assignment(&mut rng);
            let va = store.evaluate(f, &rho).unwrap();
            let vb = store.evaluate(g, &rho).unwrap();
            let vr = store.evaluate(r, &rho).unwrap();
            assert_eq!(vr, ext_op(&va, &vb, op), "op {op:?}");
        }
    }
    store.check_integrity().unwrap();
}

#[test]
fn reduce_preserves_evaluation_on_random_trees() {
    let mut store = XaddStore::new();
    let gen = DiagramGen::new(&mut store, 2, 2, 10);
    let mut rng = StdRng::seed_from_u64(77);
    for _ in 0..20 {
        let f = gen.gen(&mut store, &mut rng, true);
        let r = store.reduce(f).unwrap();
        assert!(store.node_count(r) <= store.node_count(f));
        for _ in 0..200 {
            let rho = gen.random_assignment(&mut rng);
            assert_eq!(
                store.evaluate(f, &rho).unwrap(),
                store.evaluate(r, &rho).unwrap()
            );
        }
    }
}

#[test]
fn isomorphic_subtrees_share_nodes_after_reduce() {
    let (mut store, d, x) = new_store();
    // same subtree built twice under different parents
    let a = store.constant(rat(1)).unwrap();
    let b = store.constant(rat(2)).unwrap();
    let s1 = ge(&mut store, x, 10, a, b);
    let s2 = ge(&mut store, x, 10, a, b);
    assert_eq!(s1, s2); // hash-consing already shares
    let top = store.node_bool(d, s1, s2).unwrap();
    // identical children collapse entirely
    assert_eq!(top, s1);
}

#[test]
fn marginalize_matches_two_branch_sum() {
    let mut store = XaddStore::new();
    let gen = DiagramGen::new(&mut store, 2, 2, 8);
    let mut rng = StdRng::seed_from_u64(31);
    let b = gen.bools[0];
    for _ in 0..20 {
        let f = gen.gen(&mut store, &mut rng, false);
        let m = store.marginalize_bool(f, b).unwrap();
        for _ in 0..100 {
            let rho = gen.random_assignment(&mut rng);
            let mut rho_t = rho.clone();
            rho_t.bools.insert(b, true);
            let mut rho_f = rho.clone();
            rho_f.bools.insert(b, false);
            let want = ext_op(
                &store.evaluate(f, &rho_t).unwrap(),
                &store.evaluate(f, &rho_f).unwrap(),
                BinOp::Add,
            );
            assert_eq!(store.evaluate(m, &rho).unwrap(), want);
        }
    }
}

#[test]
fn fig_style_non_canonical_diagram_stays_semantically_equal() {
    // {x <= 1: 1, x >= 3: 3, 1 < x < 3: 2} written with a useless x < 2 test
    // is semantically equal to its minimal form even though no pruning can
    // align the two structurally.
    let (mut store, _, x) = new_store();
    let one = store.constant(rat(1)).unwrap();
    let two = store.constant(rat(2)).unwrap();
    let three = store.constant(rat(3)).unwrap();

    // verbose form: if x <= 1 then 1 else if x < 2 then 2 else if x >= 3
    // then 3 else 2
    let le1 = Poly::constant(rat(1)).sub(&Poly::var(x));
    let lt2 = Poly::constant(rat(2)).sub(&Poly::var(x));
    let ge3 = Poly::var(x).add(&Poly::constant(rat(-3)));
    let inner3 = store.node_from_ineq(ge3.clone(), three, two).unwrap();
    let inner2 = store.node_from_ineq(lt2, two, inner3).unwrap();
    let verbose = store.node_from_ineq(le1.clone(), one, inner2).unwrap();
    let verbose = store.reorder(verbose).unwrap();

    let minimal = {
        let inner = store.node_from_ineq(ge3, three, two).unwrap();
        let top = store.node_from_ineq(le1, one, inner).unwrap();
        store.reorder(top).unwrap()
    };

    for k in -8..16 {
        let rho = Assignment::new().with_real(x, rat_frac(k, 2));
        assert_eq!(
            store.evaluate(verbose, &rho).unwrap(),
            store.evaluate(minimal, &rho).unwrap(),
            "x = {k}/2"
        );
    }
}

#[test]
fn dot_export_is_stable() {
    let (mut store, d, x) = new_store();
    let v2 = build_v2(&mut store, d, x);
    let a = store.to_dot(v2, "V2");
    let b = store.to_dot(v2, "V2");
    assert_eq!(a, b);
    assert!(a.contains("style=solid"));
    assert!(a.contains("style=dashed"));
    assert!(a.contains(">= 0"));
}
