//! Property tests for the algebraic invariants.

use gsp6_core::groups::{build_iota, levi_r, similitude_of, GroupElement, QuadElem};
use gsp6_core::hnf::{hnf_local, is_unimodular};
use gsp6_core::matrix::QMat;
use gsp6_core::modulus::{modulus_character, verify_modulus_bruteforce, Parabolic};
use gsp6_core::padic::{p_pow, q_int, CyclotomicCounter, Phase, Q};
use gsp6_core::series::FormalSeries;
use gsp6_core::symbols::{canonicalize_block, Canon, Setting, SymbolKey};
use num_traits::{One, Zero};
use proptest::prelude::*;

const D: i64 = 5;
const P: u64 = 3;

fn small_q() -> impl Strategy<Value = Q> {
    (-9i64..=9, prop::sample::select(vec![1i64, 2, 3, 9])).prop_map(|(n, d)| q_int(n) / q_int(d))
}

fn nonzero_q() -> impl Strategy<Value = Q> {
    small_q().prop_filter("nonzero", |x| !x.is_zero())
}

fn quad() -> impl Strategy<Value = QuadElem> {
    (small_q(), small_q())
        .prop_map(|(x, y)| QuadElem::new(x, y))
        .prop_filter("invertible", |l| !l.norm(D).is_zero())
}

/// Integral 3x3 matrix with nonzero determinant.
fn integral_3x3() -> impl Strategy<Value = QMat> {
    prop::collection::vec(-6i64..=6, 9)
        .prop_map(|v| QMat::from_rows(v.chunks(3).map(|r| r.iter().map(|&x| q_int(x)).collect()).collect()))
        .prop_filter("invertible", |m| !m.det().is_zero())
}

/// Element of `GL3(Z)` as a product of elementary and sign matrices.
fn unimodular_3x3() -> impl Strategy<Value = QMat> {
    prop::collection::vec((0usize..3, 0usize..3, -3i64..=3, prop::bool::ANY), 1..6).prop_map(|ops| {
        let mut u = QMat::identity(3);
        for (i, j, f, neg) in ops {
            if i != j {
                u.col_axpy(j, i, &q_int(f));
            }
            if neg {
                u.scale_col(i, &q_int(-1));
            }
        }
        u
    })
}

fn key() -> impl Strategy<Value = (SymbolKey, i64)> {
    (0u32..3, 0u32..3, 0u64..9, 0u32..3, -2i64..3, -2i64..3)
        .prop_map(|(a, b, beta, c, nu, w)| (SymbolKey { a, b, beta, c, nu }, w))
}

fn series() -> impl Strategy<Value = FormalSeries> {
    prop::collection::vec((0u32..4, key(), small_q()), 0..8).prop_map(|terms| {
        let mut s = FormalSeries::new(3);
        for (q, (k, w), c) in terms {
            s.add_term(q, k, w, &c);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iota_is_a_homomorphism(t1 in nonzero_q(), t2 in nonzero_q(), l1 in quad(), l2 in quad()) {
        let g = build_iota(&t1, &l1, D).mul(&build_iota(&t2, &l2, D));
        let h = build_iota(&(&t1 * &t2), &l1.mul(&l2, D), D);
        prop_assert_eq!(g.mat, h.mat);
    }

    #[test]
    fn iota_has_similitude_t(t in nonzero_q(), l in quad()) {
        let g = build_iota(&t, &l, D);
        prop_assert_eq!(similitude_of(&g.mat), Some(t.clone()));
        prop_assert!(GroupElement::symplectic(g.mat).is_ok());
    }

    #[test]
    fn hnf_factorization_and_idempotence(a in integral_3x3()) {
        let hf = hnf_local(&a, P).unwrap();
        prop_assert_eq!(&a * &hf.gamma, hf.h.clone());
        prop_assert!(is_unimodular(&hf.gamma, P));
        for i in 0..3 {
            prop_assert_eq!(hf.h[(i, i)].clone(), p_pow(P, hf.exponents[i] as i64));
            for j in 0..i {
                prop_assert!(hf.h[(i, j)].is_zero());
            }
        }
        prop_assert_eq!(hnf_local(&hf.h, P).unwrap().h, hf.h);
    }

    #[test]
    fn hnf_is_right_unimodular_invariant(a in integral_3x3(), u in unimodular_3x3()) {
        prop_assert_eq!(hnf_local(&(&a * &u), P).unwrap().h, hnf_local(&a, P).unwrap().h);
    }

    #[test]
    fn canonical_form_is_constant_on_k_orbits(b in integral_3x3(), u in unimodular_3x3(), e in -2i64..3) {
        let st = Setting::new(P, D, 12).unwrap();
        let nu = p_pow(P, e);
        let c1 = canonicalize_block(&st, &b, &nu).unwrap();
        let c2 = canonicalize_block(&st, &(&b * &u), &nu).unwrap();
        match (c1, c2) {
            (Canon::Symbol(x), Canon::Symbol(y)) => {
                prop_assert_eq!(x.key, y.key);
                prop_assert_eq!(x.w, y.w);
                prop_assert_eq!(x.phase, y.phase);
            }
            (Canon::Vanish(_), Canon::Vanish(_)) => {}
            _ => prop_assert!(false, "vanishing differs along the orbit"),
        }
    }

    #[test]
    fn series_addition_is_an_abelian_group(x in series(), y in series(), z in series()) {
        let mut xy = x.clone();
        xy.add_series(&y);
        let mut yx = y.clone();
        yx.add_series(&x);
        prop_assert_eq!(&xy, &yx);
        let mut xy_z = xy.clone();
        xy_z.add_series(&z);
        let mut yz = y.clone();
        yz.add_series(&z);
        let mut x_yz = x.clone();
        x_yz.add_series(&yz);
        prop_assert_eq!(xy_z, x_yz);
        prop_assert!(x.sub(&x).is_zero());
        prop_assert_eq!(xy.sub(&y), x);
    }

    #[test]
    fn series_scaling_distributes(x in series(), y in series(), f in small_q(), g in small_q()) {
        let mut xy = x.clone();
        xy.add_series(&y);
        let mut sx = x.scaled(&f);
        sx.add_series(&y.scaled(&f));
        prop_assert_eq!(xy.scaled(&f), sx);
        prop_assert_eq!(x.scaled(&f).scaled(&g), x.scaled(&(&f * &g)));
        prop_assert_eq!(x.scaled(&Q::one()), x.clone());
        prop_assert!(x.scaled(&Q::zero()).is_zero());
    }

    #[test]
    fn full_character_sums_vanish(k in 1u32..4, c in 1u64..50) {
        // sum over j mod p^k of psi(c j / p^k) is p^k when p^k | c, else 0
        let pk = P.pow(k);
        let mut counter = CyclotomicCounter::new(P, k);
        for j in 0..pk {
            counter.add_phase(Phase::of(&(q_int((c * j) as i64) / q_int(pk as i64)), P), &Q::one());
        }
        let want = if c % pk == 0 { q_int(pk as i64) } else { Q::zero() };
        prop_assert_eq!(counter.to_rational(), Some(want));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn levi_r_modulus_matches_counting(
        w in 0i64..2, z in 0i64..2, e in prop::collection::vec(0i64..2, 2), x in 0i64..3,
    ) {
        let y = QMat::from_rows(vec![
            vec![p_pow(P, e[0]), q_int(x)],
            vec![Q::zero(), p_pow(P, e[1])],
        ]);
        let m = levi_r(&p_pow(P, w), &y, &p_pow(P, z)).mat;
        let formula = modulus_character(Parabolic::R, &m, P).unwrap();
        let count = verify_modulus_bruteforce(Parabolic::R, &m, P, D, 10).unwrap();
        prop_assert_eq!(formula, count);
    }
}
