use img_core::constantfield::{
    dihedral_constant_field_check, precision_shrink, preimage_tree_with_flips, radical_sweep, sample_base_points,
    verify_on_tree, verify_radical_identities, ComplexApprox,
};

#[test]
fn seeded_sweep_at_256_bits() {
    let sweep = radical_sweep(20, 1, 256).unwrap();
    assert_eq!(sweep.reports.len(), 20);
    assert!(sweep.all_passed());
    assert!(sweep.max_residual() < 1e-40, "{}", sweep.max_residual());
}

#[test]
fn residuals_shrink_with_precision() {
    for (re, im, den) in [(3, 2, 1), (7, 0, 1), (-13, 4, 10)] {
        for (id, lo, hi) in precision_shrink((re, im, den), 256).unwrap() {
            assert!(hi <= lo * 1e-10 || lo == 0.0, "{id}: {lo:e} -> {hi:e}");
        }
    }
}

#[test]
fn named_base_points() {
    let r = verify_radical_identities(&ComplexApprox::from_ints(3, 2, 256)).unwrap();
    assert!(r.all_passed());
    assert!(r.identities.iter().find(|i| i.id == "square-root-of-minus-one").unwrap().max_residual < 1e-10);
    assert!(verify_radical_identities(&ComplexApprox::from_ints(7, 0, 256)).unwrap().all_passed());
    assert!(verify_radical_identities(&ComplexApprox::from_ints(0, 0, 256)).is_err());
}

#[test]
fn minus_one_identity_ignores_branches() {
    for t0 in sample_base_points(4, 9, 256) {
        for flip in ["", "1", "2", "11", "12", "21", "22"] {
            let tree = preimage_tree_with_flips(&t0, 3, &[flip]).unwrap();
            let r = verify_on_tree(&tree).unwrap();
            let minus_one = r.identities.iter().find(|i| i.id == "square-root-of-minus-one").unwrap();
            assert!(minus_one.passed, "flip at {flip:?}: {}", minus_one.max_residual);
        }
    }
}

#[test]
fn dihedral_group_content() {
    let r = dihedral_constant_field_check().unwrap();
    println!("{r}");
    assert!(r.all_passed());
}
