use proptest::prelude::*;
use serde_json::Value;

use nrgit_core::builtin::builtin;
use nrgit_core::hull::{hull_position, verify_witness};
use nrgit_core::limits::{act_gm, in_x0min, limit_p, support_profile, truncate};
use nrgit_core::linalg::{nullspace, rank, rref, QMat};
use nrgit_core::point::ProjPoint;
use nrgit_core::rep::Character;
use nrgit_core::scenario::{load, Overrides, Scenario};
use nrgit_core::stability::{kirwan_beta, torus_classify, InnerProduct, Verdict};
use nrgit_core::text::{from_text, to_text};
use nrgit_core::Rat;

fn rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=20).prop_map(|(n, d)| Rat::new(n, d))
}

fn weights(dim: usize) -> impl Strategy<Value = Vec<Vec<Rat>>> {
    prop::collection::vec(prop::collection::vec((-5i64..=5).prop_map(Rat::from_int), dim), 1..7)
}

fn scenario(name: &str) -> Scenario {
    load(builtin(name).unwrap(), &Overrides::default()).unwrap()
}

/// A point of the named scenario from raw coordinates, with zeros patched.
fn point_for(sc: &Scenario, raw: &[Rat]) -> ProjPoint {
    let mut k = 0;
    let f = sc
        .rep
        .factors()
        .iter()
        .map(|fac| {
            let mut v: Vec<Rat> = (0..fac.ncoords()).map(|i| raw[(k + i) % raw.len()].clone()).collect();
            k += fac.ncoords();
            if v.iter().all(Rat::is_zero) {
                v[0] = Rat::one();
            }
            v
        })
        .collect();
    ProjPoint::from_factors(f).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(prop_oneof![Just(Rat::zero()), rat()], 12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rationals_round_trip_in_lowest_terms(n in -1000i64..1000, d in 1i64..1000) {
        let r = Rat::new(n, d);
        let s = r.to_string();
        let back: Rat = s.parse().unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert!(r.denom() > &0.into());
        let g = num_integer::Integer::gcd(r.numer(), r.denom());
        prop_assert!(g == 1.into() || r.is_zero());
    }

    #[test]
    fn rank_plus_nullity(rows in prop::collection::vec(prop::collection::vec(rat(), 4), 1..5)) {
        let m = QMat::from_rows(&rows).unwrap();
        let ns = nullspace(&m);
        prop_assert_eq!(rank(&m) + ns.len(), 4);
        for v in &ns {
            prop_assert!(m.mul_vec(v).iter().all(Rat::is_zero));
        }
        let (r, pivots) = rref(&m);
        prop_assert_eq!(pivots.len(), rank(&m));
        for (i, &p) in pivots.iter().enumerate() {
            prop_assert!(r[(i, p)].is_one());
        }
    }

    #[test]
    fn hull_position_ignores_order_and_repeats(pts in weights(2), seed in any::<u64>()) {
        let (pos, w) = hull_position(&pts).unwrap();
        prop_assert!(verify_witness(&pts, pos, &w));
        let mut shuffled = pts.clone();
        let n = shuffled.len();
        shuffled.rotate_left((seed as usize) % n);
        shuffled.push(pts[(seed as usize / 7) % n].clone());
        prop_assert_eq!(hull_position(&shuffled).unwrap().0, pos);
    }

    #[test]
    fn hull_witnesses_verify_in_three_dimensions(pts in weights(3)) {
        let (pos, w) = hull_position(&pts).unwrap();
        prop_assert!(verify_witness(&pts, pos, &w));
    }

    #[test]
    fn beta_vanishes_exactly_on_semistable(pts in weights(2)) {
        let b = nrgit_core::stability::nearest_point(&pts, &InnerProduct::identity(2)).unwrap();
        let (pos, _) = hull_position(&pts).unwrap();
        prop_assert_eq!(b.is_zero(), pos != nrgit_core::hull::HullPosition::Outside);
    }

    #[test]
    fn torus_verdict_is_scale_free(raw in coords(), c in 1i64..4, f in 1i64..6) {
        let sc = scenario("ex61");
        let x = point_for(&sc, &raw);
        let chi = sc.chi0.clone();
        let v = torus_classify(&x, &sc.rep, &chi).unwrap().verdict;

        let scaled: Vec<Vec<Rat>> = x.factors().unwrap().iter()
            .map(|v| v.iter().map(|a| a * &Rat::from_int(f)).collect()).collect();
        let y = ProjPoint::from_factors(scaled).unwrap();
        prop_assert_eq!(torus_classify(&y, &sc.rep, &chi).unwrap().verdict, v);

        let rep_c = sc.rep.scale_linearisation(c).unwrap();
        let chi_c = chi.scaled(&Rat::from_int(c));
        prop_assert_eq!(torus_classify(&x, &rep_c, &chi_c).unwrap().verdict, v);

        let b = kirwan_beta(&x, &sc.rep, &chi, &InnerProduct::identity(2)).unwrap();
        prop_assert_eq!(v == Verdict::Unstable, !b.is_zero());
    }

    #[test]
    fn limits_and_stabilisers(raw in coords(), params in prop::collection::vec(rat(), 3), t in 1i64..9,
                              which in 0usize..3) {
        let sc = scenario(["ex61", "ex62", "ladder"][which]);
        let rep = &sc.rep;
        let x = point_for(&sc, &raw);
        let px = limit_p(&x, rep);
        prop_assert!(limit_p(&px, rep).proj_eq(&px, rep));

        let u: Vec<Rat> = params[..sc.u.dim()].to_vec();
        let ux = sc.u.exp_action(&u, &x, rep).unwrap();
        prop_assert!(limit_p(&ux, rep).proj_eq(&px, rep));

        let tx = act_gm(&x, rep, &Rat::from_int(t)).unwrap();
        prop_assert!(limit_p(&tx, rep).proj_eq(&px, rep));
        prop_assert_eq!(sc.u.stab_dim(&tx, rep).dim, sc.u.stab_dim(&x, rep).dim);
        prop_assert!(sc.u.stab_dim(&x, rep).dim <= sc.u.stab_dim(&px, rep).dim);

        let prof = support_profile(&x, rep);
        prop_assert!(prof.min_weight <= prof.max_weight);
        prop_assert_eq!(in_x0min(&x, rep), prof.min_weight == rep.weight_ladder().min());
        for r in rep.weight_ladder().values {
            if let Some(tr) = truncate(&x, rep, r) {
                prop_assert!(truncate(&tr, rep, r).unwrap().proj_eq(&tr, rep));
            }
        }
    }

    #[test]
    fn abelian_stage_parameters_add(raw in coords(), a in prop::collection::vec(rat(), 2), b in prop::collection::vec(rat(), 2)) {
        let sc = scenario("ex62");
        let x = point_for(&sc, &raw);
        let ab: Vec<Rat> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        let two = sc.u.exp_action(&a, &sc.u.exp_action(&b, &x, &sc.rep).unwrap(), &sc.rep).unwrap();
        prop_assert!(two.proj_eq(&sc.u.exp_action(&ab, &x, &sc.rep).unwrap(), &sc.rep));
    }

    #[test]
    fn text_reports_round_trip(v in json_value()) {
        prop_assert_eq!(from_text(&to_text(&v)).unwrap(), v);
    }
}

fn json_value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i32>().prop_map(|n| Value::from(n)),
        "[ -~]{0,8}".prop_map(Value::String),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Array),
            prop::collection::btree_map("[a-z .\"\\[]{1,5}", inner, 0..4)
                .prop_map(|m| Value::Object(m.into_iter().collect())),
        ]
    })
}

#[test]
fn beta_of_a_single_weight() {
    let rep = nrgit_core::rep::build_rep(&[nrgit_core::rep::FactorSpec::proj(vec![vec![2], vec![0], vec![2]])], 0).unwrap();
    let x = ProjPoint::from_ints(&[&[1, 0, 0]]);
    let b = kirwan_beta(&x, &rep, &Character::zero(1), &InnerProduct::identity(1)).unwrap();
    assert_eq!(b.beta, vec![Rat::from_int(2)]);
}

#[test]
fn beta_is_the_nearest_point_of_a_segment() {
    let pts: Vec<Vec<Rat>> = [[2, 0], [0, 2], [2, 2]].iter().map(|p| p.iter().map(|&a| Rat::from_int(a)).collect()).collect();
    let b = nrgit_core::stability::nearest_point(&pts, &InnerProduct::identity(2)).unwrap();
    assert_eq!(b.beta, vec![Rat::one(), Rat::one()]);
    assert_eq!(b.norm_sq, Rat::from_int(2));
}
