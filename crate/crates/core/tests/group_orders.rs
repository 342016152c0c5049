use arboreal::subgroup::{
    build_branch_stabilizer, build_s_subgroup, hausdorff_estimate, s_group_order, stab_branch_order,
    stab_s_index, BranchSpec,
};
use arboreal::tree::{aut_order, enumerate_aut, TreeShape, DEFAULT_ENUMERATION_LIMIT};
use num_bigint::BigUint;

const SHAPES: [(usize, usize); 5] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)];

#[test]
fn enumeration_matches_closed_forms() {
    for (d, n) in SHAPES {
        let shape = TreeShape::new(d, n).unwrap();
        let all = enumerate_aut(shape, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(BigUint::from(all.len()), aut_order(&shape), "{shape}");
        for m in 1..=n {
            let spec = BranchSpec::zeros(shape, m).unwrap();
            let stab = all.iter().filter(|a| spec.stabilizes(a)).count();
            let s = all.iter().filter(|a| spec.stabilizes(a) && spec.aligns(a)).count();
            assert_eq!(BigUint::from(stab), stab_branch_order(d, n), "{shape} Stab");
            assert_eq!(BigUint::from(s), s_group_order(d, n, m).unwrap(), "{shape} m={m} S");
            assert_eq!(BigUint::from(stab / s), stab_s_index(d, n, m).unwrap());
            let built = build_branch_stabilizer(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap();
            assert_eq!(built.order().unwrap(), stab);
            let built = build_s_subgroup(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap();
            assert_eq!(built.order().unwrap(), s);
            assert!(built.is_valid_subgroup().unwrap());
        }
    }
}

#[test]
fn other_periodic_branches_give_the_same_orders() {
    let shape = TreeShape::new(2, 4).unwrap();
    for pattern in [vec![1u8], vec![0, 1], vec![1, 1, 0]] {
        let m = pattern.len();
        let spec = BranchSpec::periodic(shape, pattern).unwrap();
        let s = build_s_subgroup(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(BigUint::from(s.order().unwrap()), s_group_order(2, 4, m).unwrap());
        let stab = build_branch_stabilizer(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(BigUint::from(stab.order().unwrap()), stab_branch_order(2, 4));
    }
}

#[test]
fn finite_hausdorff_ratios_match_enumerated_logs() {
    for (d, n) in [(2usize, 3usize), (3, 2)] {
        let shape = TreeShape::new(d, n).unwrap();
        let spec = BranchSpec::zeros(shape, 1).unwrap();
        let s = build_s_subgroup(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap().order().unwrap() as f64;
        let stab = build_branch_stabilizer(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap().order().unwrap() as f64;
        let est = hausdorff_estimate(d, 1, [n]).unwrap();
        let (_, r) = &est.ratios[0];
        assert!((r.to_f64() - s.ln() / stab.ln()).abs() < 1e-12, "d={d} n={n}");
    }
}
