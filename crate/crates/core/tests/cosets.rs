use std::collections::BTreeSet;

use gsp6_core::cosets::{
    coset_lattice, cosets_are_symplectic, gsp6_coset_reps, integral_conjugate_rep, lagrangian_oracle, t23_oracle,
    HeckeOp,
};

#[test]
fn t03_cosets_are_the_lagrangians() {
    let p = 3;
    let cs = gsp6_coset_reps(HeckeOp::T03, p);
    assert_eq!(cs.len(), 1120);
    assert!(cosets_are_symplectic(&cs, p));
    let lat: BTreeSet<_> = cs.iter().map(|c| coset_lattice(&c.h, p, 1)).collect();
    assert_eq!(lat.len(), cs.len());
    assert_eq!(lat, lagrangian_oracle(p));
}

#[test]
fn t23_cosets_match_line_lattices() {
    let p = 3;
    let cs = gsp6_coset_reps(HeckeOp::T23, p);
    assert_eq!(cs.len(), 1092);
    assert!(cosets_are_symplectic(&cs, p));
    let lat: BTreeSet<_> = cs.iter().map(|c| coset_lattice(&c.h, p, 2)).collect();
    assert_eq!(lat.len(), cs.len());
    assert_eq!(lat, t23_oracle(p));
}

#[test]
fn t03_cosets_have_integral_conjugates() {
    let p = 3;
    for c in gsp6_coset_reps(HeckeOp::T03, p) {
        assert!(integral_conjugate_rep(&c, p).is_some(), "{}", c.h);
    }
}
