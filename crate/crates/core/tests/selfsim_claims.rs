use img_core::selfsim::{
    builtin_system_f, geometric_claims, geometric_tower, verify_triple_theorem, LevelGroup,
};
use img_core::treeauto::{are_conjugate, Portrait};

#[test]
fn structure_claims_hold_through_level_seven() {
    let tower = geometric_tower(7).unwrap();
    let checks = geometric_claims(&tower).unwrap();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "pass" } else { "FAIL" }, c.id, c.detail);
    }
    assert!(checks.len() > 40);
    assert!(checks.iter().all(|c| c.passed));
}

#[test]
fn triple_theorem_exhaustive() {
    for n in 1..=3 {
        let r = verify_triple_theorem(n).unwrap();
        println!("{r}");
        assert!(r.all_passed());
    }
    assert!(verify_triple_theorem(4).is_err());
}

#[test]
fn a2_conjugate_to_section_form() {
    let sys = builtin_system_f();
    for n in 1..=5 {
        let a2 = sys.unfold_generator("a2", n).unwrap();
        let a1 = sys.unfold_generator("a1", n - 1).unwrap();
        let form = Portrait::from_sections(&a1, &Portrait::identity(n - 1).unwrap(), true).unwrap();
        assert!(are_conjugate(&a2, &form).unwrap());
    }
}

#[test]
fn intersection_of_h1_h3_is_inverse_pairs() {
    let tower = geometric_tower(6).unwrap();
    for n in 3..=6 {
        let lvl = &tower[n - 1];
        let h13 = lvl.h[0].intersection(&lvl.h[2]).unwrap();
        let expected = LevelGroup::from_elements(
            n,
            tower[n - 2]
                .u
                .elements()
                .iter()
                .map(|x| Portrait::from_sections(x, &x.invert(), false).unwrap()),
        )
        .unwrap();
        assert_eq!(h13, expected);
    }
}

#[test]
fn cyclic_a3_invariants() {
    let a3 = builtin_system_f().unfold_generator("a3", 3).unwrap();
    let g = LevelGroup::closure(&[a3]).unwrap();
    assert_eq!(g.abelian_invariants().unwrap(), vec![4]);
}

#[test]
fn commutator_subgroup_contains_every_commutator() {
    let tower = geometric_tower(5).unwrap();
    let lvl = &tower[4];
    let els = lvl.g.elements();
    for x in els.iter().step_by(3) {
        for y in els.iter().step_by(5) {
            assert!(lvl.derived.contains(&x.commutator(y)));
        }
    }
}
