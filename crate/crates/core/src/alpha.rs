//! The local integral `alpha_chi(m)` over `N_L \ U_{P,4}` for torus elements
//! `m = (t m_l^{-t}, m_l)` of `GSp4`, evaluated by exact finite sums.
//!
//! `W4` has basis `e1, e2, f1, f2` (row vectors, right action) and
//! `V5 = wedge^2_0(W4) (x) nu^-1` with `v_D = D e1^f2 + e2^f1`. Modulo `N_L`
//! the unipotent `[[1, X], [0, 1]]` is represented by `X = diag(s, 0)`, on
//! which the character is `psi(-D s)`.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::groups::{build_m_ell, QuadElem};
use crate::matrix::QMat;
use crate::padic::{abs_p, is_integral, p_pow, q_int, valuation, CyclotomicCounter, PadicError, Phase, Q};
use crate::report::CheckResult;
use crate::symbols::Setting;

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Matrix of `wedge^2 g` on row vectors in the basis `w_i ^ w_j`, `i < j`.
pub fn wedge2(g: &QMat) -> QMat {
    let mut out = QMat::zeros(6, 6);
    for (r, &(i, j)) in PAIRS.iter().enumerate() {
        for (c, &(k, l)) in PAIRS.iter().enumerate() {
            out[(r, c)] = &g[(i, k)] * &g[(j, l)] - &g[(i, l)] * &g[(j, k)];
        }
    }
    out
}

pub fn v_d(d: i64) -> QMat {
    let mut v = QMat::zeros(1, 6);
    v[(0, 2)] = q_int(d);
    v[(0, 3)] = Q::one();
    v
}

/// `v . g` in `V5`, including the twist by `nu(g)^-1`.
pub fn act(v: &QMat, g: &QMat) -> QMat {
    let nu = crate::groups::similitude_of(g).expect("symplectic");
    (v * &wedge2(g)).scale(&(Q::one() / nu))
}

/// `(t m_l^{-t}, m_l)` in `GSp4`.
pub fn torus_element(t: &Q, l: &QuadElem, d: i64) -> QMat {
    let m = build_m_ell(l, d);
    let a = m.inverse().expect("l nonzero").transpose().scale(t);
    QMat::block_diag(&[&a, &m])
}

pub fn siegel_unipotent(x: &QMat) -> QMat {
    let mut u = QMat::identity(4);
    u.set_block(0, 2, x);
    u
}

/// `int_{Q_p} psi(-D s) charf(v_D u(s) m in V5(Z_p)) ds`, summed over
/// `s in p^-K Z_p / p^K' Z_p` with the window enlarged by `pad` on both sides.
pub fn alpha_chi_bruteforce(m: &QMat, p: u64, d: i64, pad: i64) -> Result<Q, PadicError> {
    let v = v_d(d);
    let a = act(&v, m);
    let u1 = siegel_unipotent(&QMat::diag(&[Q::one(), Q::zero()]));
    let b = act(&v, &(&u1 * m)).sub(&a);
    let mut lower = i64::MIN;
    let mut fine = 0i64;
    for i in 0..6 {
        let Some(vb) = valuation(&b[(0, i)], p) else { continue };
        let va = valuation(&a[(0, i)], p).unwrap_or(0).min(0);
        lower = lower.max(va - vb);
        fine = fine.max(-vb);
    }
    assert!(lower > i64::MIN, "integrand does not depend on s");
    let k = (-lower).max(0) + pad;
    let kf = fine.max(0) + pad;
    let n = (p as i64).pow((k + kf) as u32);
    let step = p_pow(p, -k);
    let dq = q_int(d);
    let mut counter = CyclotomicCounter::new(p, k as u32);
    let one = Q::one();
    for j in 0..n {
        let s = &step * q_int(j);
        let ok = (0..6).all(|i| is_integral(&(&a[(0, i)] + &s * &b[(0, i)]), p));
        if ok {
            counter.add_phase(Phase::of(&(-(&dq * &s)), p), &one);
        }
    }
    Ok(counter.to_rational().ok_or(PadicError::NotRational)? * p_pow(p, -kf))
}

/// `|t| |l|^-1` when `|t| <= |l|`, else 0.
pub fn alpha_chi_closed(t: &Q, l: &QuadElem, p: u64, d: i64) -> Q {
    let (at, al) = (abs_p(t, p), abs_p(&l.norm(d), p));
    if at <= al {
        at / al
    } else {
        Q::zero()
    }
}

pub fn alpha_chi_check(t: &Q, l: &QuadElem, setting: &Setting) -> Result<(Q, Q), PadicError> {
    let m = torus_element(t, l, setting.d);
    Ok((alpha_chi_bruteforce(&m, setting.p, setting.d, 0)?, alpha_chi_closed(t, l, setting.p, setting.d)))
}

/// Every `t` with `0 <= val(t) <= vmax` (with and without a unit factor)
/// against sample `l` with norm valuation at most `vmax`.
pub fn alpha_check(setting: &Setting, vmax: i64) -> CheckResult {
    let mut res = CheckResult::new("alpha-chi", "alpha_chi(t, l) = |t| |l|^-1 on |t| <= |l|, else 0");
    let p = setting.p;
    let ts: Vec<Q> = (0..=vmax).flat_map(|e| [p_pow(p, e), p_pow(p, e) * q_int(2)]).collect();
    let ells = crate::modulus::sample_ells(setting, vmax);
    let jobs: Vec<(Q, QuadElem)> = ts.iter().flat_map(|t| ells.iter().map(move |l| (t.clone(), l.clone()))).collect();
    let out: Vec<_> = jobs.par_iter().map(|(t, l)| (t, l, alpha_chi_check(t, l, setting))).collect();
    for (t, l, r) in out {
        match r {
            Ok((bf, cf)) => res.case(bf == cf, || format!("t={t} l={}+{}sqrtD: sum {bf}, closed {cf}", l.x, l.y)),
            Err(e) => res.error(format!("t={t} l={}+{}sqrtD: {e}", l.x, l.y)),
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::symplectic_form;

    #[test]
    fn v_d_is_fixed_by_the_torus_and_n_l() {
        for d in [5i64, 13] {
            let v = v_d(d);
            for (x, y) in [(1, 1), (2, 1), (3, 0), (4, 1)] {
                let l = QuadElem::new(q_int(x), q_int(y));
                for t in [q_int(1), q_int(3), q_int(7)] {
                    let m = torus_element(&t, &l, d);
                    assert_eq!(&(&m * &symplectic_form(4)) * &m.transpose(), symplectic_form(4).scale(&t));
                    assert_eq!(act(&v, &m), v);
                }
                let half = Q::new(1.into(), 2.into());
                let n = QMat::from_rows(vec![
                    vec![q_int(x) / q_int(d) * &half, q_int(y) * &half],
                    vec![q_int(y) * &half, q_int(x) * &half],
                ]);
                assert_eq!(act(&v, &siegel_unipotent(&n)), v);
            }
        }
    }

    #[test]
    fn worked_values() {
        let st = Setting::new(3, 5, 8).unwrap();
        let one = QuadElem::rational(q_int(1));
        assert_eq!(alpha_chi_check(&q_int(1), &one, &st).unwrap(), (Q::one(), Q::one()));
        assert_eq!(alpha_chi_check(&q_int(3), &one, &st).unwrap().0, p_pow(3, -1));
        let p = QuadElem::rational(q_int(3));
        assert_eq!(alpha_chi_check(&q_int(1), &p, &st).unwrap().0, Q::zero());
    }

    #[test]
    fn window_is_large_enough() {
        for d in [5i64, 13] {
            let st = Setting::new(3, d, 8).unwrap();
            for l in crate::modulus::sample_ells(&st, 2) {
                for e in 0..=2 {
                    let m = torus_element(&p_pow(3, e), &l, d);
                    let a0 = alpha_chi_bruteforce(&m, 3, d, 0).unwrap();
                    assert_eq!(a0, alpha_chi_bruteforce(&m, 3, d, 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn full_check_both_cases() {
        for (p, d) in [(3, 5), (3, 13), (5, 2), (5, 11)] {
            let r = alpha_check(&Setting::new(p, d, 8).unwrap(), 2);
            assert!(r.passed(), "{:?}", r.failures);
        }
    }
}
