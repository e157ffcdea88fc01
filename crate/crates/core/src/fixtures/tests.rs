use super::*;
use crate::coalition::{all_coalitions, Coalition};
use crate::exact_math::Rat;
use crate::game::{is_monotone, is_superadditive, GameOracle};
use crate::mps::{mps_nucleolus, MpsMode};

fn params(n: usize) -> InstabilityParams {
    InstabilityParams::new(n, Rat::new(1, 16), Rat::from_int(64)).unwrap()
}

#[test]
fn instability_family_shape() {
    let p = params(0);
    let (v, vt) = gen_instability_pair(&p).unwrap();
    assert_eq!((v.players, v.sets.len()), (17, 17));
    assert_eq!(v.weight_of(Coalition::singleton(0)), Some(&Rat::one()));
    assert_eq!(vt.weight_of(Coalition::singleton(0)), Some(&(Rat::one() - Rat::new(1, 16))));
    let p2 = params(1);
    let (v2, _) = gen_instability_pair(&p2).unwrap();
    let pair = Coalition::from_members([p2.p(2, 3), p2.q(2, 3)]);
    assert_eq!(v2.weight_of(pair), Some(&Rat::from_int(4 * 64)));
    let diffs: Vec<_> = v.sets.iter().zip(&vt.sets).filter(|(a, b)| a != b).collect();
    assert_eq!(diffs.len(), 1);
}

#[test]
fn instability_params_validated() {
    assert!(InstabilityParams::new(3, Rat::new(1, 2), Rat::from_int(3)).is_err());
    assert!(InstabilityParams::new(3, Rat::new(1, 2), Rat::from_int(4)).is_ok());
    assert!(InstabilityParams::new(0, Rat::zero(), Rat::from_int(4)).is_err());
}

#[test]
fn instability_closed_form_values() {
    let p = params(2);
    let (y, yt) = instability_closed_forms(&p);
    assert_eq!(y.get(0), &Rat::one());
    assert_eq!(yt.get(0), &Rat::new(15, 16));
    assert_eq!(y.get(p.p(3, 2)), &Rat::from_int(192));
    assert_eq!(y.get(p.q(3, 2)), &Rat::from_int(192));
    assert_eq!(yt.get(p.q(3, 2)), &(Rat::from_int(192) - Rat::new(2, 16)));
    assert_eq!(yt.get(p.p(1, 1)), &(Rat::from_int(64) + Rat::new(1, 32)));
}

#[test]
fn instability_balance_holds() {
    for n in 0..=10 {
        let rep = verify_instability_balance(&params(n)).unwrap();
        assert!(rep.pass(), "n={n}: {:?}", rep.failures());
    }
    let p = params(1);
    let (v, _) = gen_instability_pair(&p).unwrap();
    let (y, _) = instability_closed_forms(&p);
    let m = p.m_set(2, 1);
    assert_eq!(crate::game::excess(&v, &y, m), Rat::from_int(128));
}

#[test]
fn instability_games_monotone_superadditive() {
    let p = InstabilityParams::new(0, Rat::new(1, 4), Rat::from_int(2)).unwrap();
    let (v, vt) = gen_instability_pair(&p).unwrap();
    // 17 players exceed the pairwise check cap; restrict to the first 16.
    let sub = |g: &PackingGame| PackingGame::new(16, g.sets.iter().filter(|(c, _)| c.fits(16)).cloned().collect()).unwrap();
    for g in [sub(&v), sub(&vt)] {
        assert!(is_monotone(&g).unwrap());
        assert!(is_superadditive(&g).unwrap());
    }
}

#[test]
fn instability_values_within_eps() {
    let p = params(0);
    let (v, vt) = gen_instability_pair(&p).unwrap();
    for s in all_coalitions(17) {
        assert!((v.value(s) - vt.value(s)).abs() <= p.eps);
    }
}

#[test]
fn instability_nucleoli_by_mps() {
    let p = params(0);
    let (v, vt) = gen_instability_pair(&p).unwrap();
    let (y, yt) = instability_closed_forms(&p);
    assert_eq!(mps_nucleolus(&v, MpsMode::Enumerate).unwrap().allocation, y);
    assert_eq!(mps_nucleolus(&vt, MpsMode::Enumerate).unwrap().allocation, yt);
}

#[test]
fn hardness_values() {
    let h = HardnessParams::standard(2).unwrap();
    let (vbar, vstar) = gen_hardness_pair(&h);
    let five = Coalition::from_members([0, 1, 2, 4, 5]);
    assert_eq!(vbar.value(five), Rat::new(9, 2));
    assert_eq!(vstar.value(h.s_star), Rat::from_int(4) + Rat::new(1, 6));
    let small = Coalition::from_members([0, 4, 5]);
    assert_eq!(vstar.value(small), Rat::from_int(3));
    assert_eq!(vbar.value(Coalition::from_members([0, 1, 4, 5])), Rat::new(9, 2));
    assert!(HardnessParams::new(2, Coalition::from_members([0, 1, 4])).is_err());
    assert!(HardnessParams::new(1, Coalition::from_members([0, 1])).is_err());
}

#[test]
fn hardness_checks_pass() {
    for k in 2..=3 {
        let rep = hardness_adversary_check(&HardnessParams::standard(k).unwrap()).unwrap();
        assert!(rep.pass(), "k={k}: {:?}", rep.failures());
    }
    let other = HardnessParams::new(2, Coalition::from_members([1, 2, 3, 7])).unwrap();
    assert!(hardness_adversary_check(&other).unwrap().pass());
    assert!(hardness_adversary_check(&HardnessParams::standard(4).unwrap()).is_err());
}

#[test]
fn random_games_deterministic_and_monotone() {
    let a = random_monotone_game(5, 3).unwrap();
    let b = random_monotone_game(5, 3).unwrap();
    assert_eq!(a.values(), b.values());
    assert!(is_monotone(&a).unwrap());
    assert_eq!(a.value(Coalition::EMPTY), Rat::zero());
    assert!(random_monotone_game(13, 0).is_err());
    assert_eq!(random_graph(4, 6, 9).unwrap(), random_graph(4, 6, 9).unwrap());
}

#[test]
fn packing_value_small() {
    let g = PackingGame::new(4, vec![
        (Coalition::from_members([0, 1]), Rat::from_int(3)),
        (Coalition::from_members([1, 2]), Rat::from_int(4)),
        (Coalition::from_members([2, 3]), Rat::from_int(3)),
        (Coalition::singleton(3), Rat::from_int(-1)),
    ])
    .unwrap();
    assert_eq!(g.value(Coalition::full(4)), Rat::from_int(6));
    assert_eq!(g.value(Coalition::from_members([1, 2, 3])), Rat::from_int(4));
    assert_eq!(g.value(Coalition::singleton(3)), Rat::zero());
}
