use img_core::treeauto::{are_conjugate, class_invariant, ConjugacyOracle, Portrait, MAX_LEVEL};
use proptest::prelude::*;

fn portrait(level: usize) -> impl Strategy<Value = Portrait> {
    let k = (1usize << level) - 1;
    proptest::collection::vec(any::<bool>(), k).prop_map(move |s| Portrait::from_swaps(level, &s).unwrap())
}

fn leveled() -> impl Strategy<Value = (Portrait, Portrait, Portrait)> {
    (1..=MAX_LEVEL).prop_flat_map(|n| (portrait(n), portrait(n), portrait(n)))
}

fn apply(perm: &[usize], then: &[usize]) -> Vec<usize> {
    perm.iter().map(|&i| then[i]).collect()
}

proptest! {
    #[test]
    fn compose_is_associative_and_acts_left_to_right((u, v, w) in leveled()) {
        prop_assert_eq!(u.mul_checked(&v).mul_checked(&w), u.mul_checked(&v.mul_checked(&w)));
        let uv = u.compose(&v).unwrap();
        prop_assert_eq!(uv.leaf_permutation(), apply(&u.leaf_permutation(), &v.leaf_permutation()));
        prop_assert!(u.compose(&u.invert()).unwrap().is_identity());
    }

    #[test]
    fn product_rule_with_root_swap(
        (x1, x2, y1, y2) in (0..MAX_LEVEL).prop_flat_map(|n| (portrait(n), portrait(n), portrait(n), portrait(n)))
    ) {
        let lhs = Portrait::from_sections(&x1, &x2, true).unwrap()
            .compose(&Portrait::from_sections(&y1, &y2, false).unwrap()).unwrap();
        let rhs = Portrait::from_sections(&x1.compose(&y2).unwrap(), &x2.compose(&y1).unwrap(), true).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sign_recursion((u, _, _) in leveled()) {
        let n = u.level();
        for m in 2..=n {
            let (l, r, _) = u.split().unwrap();
            prop_assert_eq!(u.sign(m).unwrap(), l.sign(m - 1).unwrap() * r.sign(m - 1).unwrap());
        }
    }

    #[test]
    fn odometer_characterisations_agree((u, _, _) in leveled()) {
        let single = u.cycle_type().parts() == [1u32 << u.level()];
        let signs = (1..=u.level()).all(|m| u.sign(m).unwrap() == -1);
        let order = u.order() == 1u64 << u.level();
        prop_assert_eq!(u.is_level_odometer().unwrap(), single);
        prop_assert_eq!(single, signs);
        prop_assert_eq!(single, order);
    }

    #[test]
    fn sections_compose((u, _, _) in leveled(), a in proptest::collection::vec(1u8..=2, 0..4), b in proptest::collection::vec(1u8..=2, 0..4)) {
        prop_assume!(a.len() + b.len() <= u.level());
        let ab: Vec<u8> = a.iter().chain(&b).copied().collect();
        prop_assert_eq!(u.section(&ab).unwrap(), u.section(&a).unwrap().section(&b).unwrap());
    }

    #[test]
    fn restriction_is_a_homomorphism((u, v, _) in leveled(), m in 0usize..=MAX_LEVEL) {
        let m = m.min(u.level());
        prop_assert_eq!(
            u.compose(&v).unwrap().restrict(m).unwrap(),
            u.restrict(m).unwrap().compose(&v.restrict(m).unwrap()).unwrap()
        );
    }

    #[test]
    fn wire_roundtrip((u, _, _) in leveled()) {
        prop_assert_eq!(Portrait::decode(&u.encode()).unwrap(), u);
        prop_assert_eq!(u.encode().parse::<Portrait>().unwrap(), u);
    }

    #[test]
    fn swapped_pair_conjugate((u, v, _) in (1..=4usize).prop_flat_map(|n| (portrait(n), portrait(n), portrait(n)))) {
        let a = Portrait::from_sections(&u, &v, false).unwrap();
        let b = Portrait::from_sections(&v, &u, false).unwrap();
        prop_assert!(are_conjugate(&a, &b).unwrap());
    }
}

trait MulChecked {
    fn mul_checked(&self, other: &Self) -> Self;
}

impl MulChecked for Portrait {
    fn mul_checked(&self, other: &Self) -> Self {
        self.compose(other).unwrap()
    }
}

#[test]
fn conjugacy_matches_brute_force_on_omega3() {
    for n in 1..=3 {
        let all: Vec<Portrait> = Portrait::enumerate_all(n).unwrap().collect();
        let inverses: Vec<Portrait> = all.iter().map(Portrait::invert).collect();
        let mut oracle = ConjugacyOracle::new();
        for u in &all {
            let class: std::collections::HashSet<Portrait> = all
                .iter()
                .zip(&inverses)
                .map(|(w, wi)| wi.compose(u).unwrap().compose(w).unwrap())
                .collect();
            for v in &all {
                let brute = class.contains(v);
                assert_eq!(oracle.are_conjugate(u, v).unwrap(), brute, "{u} vs {v}");
                assert_eq!(class_invariant(u) == class_invariant(v), brute);
            }
        }
    }
}

#[test]
fn restrict_of_a3_at_level_four() {
    let sys = img_core::selfsim::builtin_system_f();
    let a3 = sys.unfold_generator("a3", 4).unwrap();
    let s1 = Portrait::sigma(1).unwrap();
    let id1 = Portrait::identity(1).unwrap();
    assert_eq!(a3.restrict(2).unwrap(), Portrait::from_sections(&s1, &id1, false).unwrap());
    assert_eq!(a3.section(&[1]).unwrap(), sys.unfold_generator("a2", 3).unwrap());
    assert!(!a3.is_level_odometer().unwrap());
    assert_eq!(a3.sign(4).unwrap(), 1);
    assert_eq!(a3.invert().order(), 4);
}
