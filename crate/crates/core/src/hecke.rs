//! Hecke operators acting on symbols `lambda(g)`.
//!
//! Three independent routes are provided for `T03` and `T23`: the raw
//! `GSp6` coset sum with `lambda(g x u) = chi(gx u (gx)^-1) lambda(gx)`, the
//! reduction to `GL3` coset sums, and the closed `GL2` forms in terms of
//! `T_p`.  `T_p` itself is always evaluated by its `p+1` representatives.

use std::collections::BTreeMap;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::cosets::{gl_coset_reps, gsp6_coset_reps, levi_tilde, um_measure_size, Gsp6Coset, HeckeOp};
use crate::groups::{chi_argument, cyclic_s, diag_element, t_matrix, t_prime_matrix, tp_representatives, GroupElement};
use crate::matrix::QMat;
use crate::padic::{character_sum, p_pow, q_int, Phase, Q};
use crate::series::{diff, Discrepancy, FormalSeries, PhaseAccumulator};
use crate::symbols::{canonicalize, iota_rep, Canon, EllClass, IotaSym, Setting, SymbolError, SymbolTable};

/// Adds `coeff * w^dw * psi(phase) * lambda(g)` at `q^0`.
pub fn accumulate(
    acc: &mut PhaseAccumulator,
    setting: &Setting,
    g: &GroupElement,
    coeff: &Q,
    dw: i64,
    phase: Phase,
) -> Result<Canon, SymbolError> {
    let c = canonicalize(setting, g)?;
    if let Canon::Symbol(red) = &c {
        acc.add(0, red.key, red.w + dw, red.phase.add(&phase, setting.p), coeff);
    }
    Ok(c)
}

/// `coeff * w^dw * lambda(iota(p^r, l))` as a series.
pub fn iota_term(setting: &Setting, s: &IotaSym, coeff: &Q, dw: i64) -> Result<FormalSeries, SymbolError> {
    let mut acc = PhaseAccumulator::new(setting.p, 0);
    accumulate(&mut acc, setting, &iota_rep(setting, s)?, coeff, dw, Phase::ZERO)?;
    Ok(acc.finish()?)
}

/// One term `lambda(g T(u))` of a `T_p` sum and how it reduced.
#[derive(Clone, Debug)]
pub struct TpTerm {
    pub u: QMat,
    pub outcome: Canon,
}

/// `sum_u lambda(g T(u))` (or `T'(u)`) over the `p+1` representatives.
pub fn tp_expansion(
    setting: &Setting,
    g: &GroupElement,
    primed: bool,
) -> Result<(FormalSeries, Vec<TpTerm>), SymbolError> {
    let p = setting.p;
    let mut acc = PhaseAccumulator::new(p, 0);
    let mut terms = Vec::new();
    for u in tp_representatives(p) {
        let t = if primed { t_prime_matrix(&u, p) } else { t_matrix(&u, p) };
        let outcome = accumulate(&mut acc, setting, &g.mul(&t), &Q::one(), 0, Phase::ZERO)?;
        terms.push(TpTerm { u, outcome });
    }
    Ok((acc.finish()?, terms))
}

fn require_support(s: &IotaSym) -> Result<(), SymbolError> {
    if s.in_support() {
        Ok(())
    } else {
        Err(SymbolError::OutOfSupport(s.to_string()))
    }
}

/// `(T_p lambda)(iota(p^r, l))` from the raw expansion.
pub fn apply_tp_raw(setting: &Setting, s: &IotaSym, primed: bool) -> Result<FormalSeries, SymbolError> {
    Ok(tp_expansion(setting, &iota_rep(setting, s)?, primed)?.0)
}

/// `T_p` on a symbol; the primed operator is rewritten as
/// `w^-1 (T_p lambda)(iota(p^2 t, p l))`.  The `GL2` forms call this on
/// shifted symbols outside the support, so no support check here.
pub fn apply_tp(setting: &Setting, s: &IotaSym, primed: bool) -> Result<FormalSeries, SymbolError> {
    if !primed {
        return apply_tp_raw(setting, s, false);
    }
    let shifted = IotaSym::new(s.r + 2, s.ell.times_p(1));
    let mut out = FormalSeries::new(0);
    out.add_scaled(&apply_tp_raw(setting, &shifted, false)?, &Q::one(), 0, -1);
    Ok(out)
}

fn shift(s: &IotaSym, dr: i64, dl: i64) -> IotaSym {
    IotaSym::new(s.r + dr, s.ell.times_p(dl))
}

/// `T03` via the six-term `GL2` form.
pub fn apply_t03(setting: &Setting, s: &IotaSym) -> Result<FormalSeries, SymbolError> {
    require_support(s)?;
    let p = setting.p;
    let mut out = FormalSeries::new(0);
    out.add_series(&iota_term(setting, &shift(s, -1, 0), &Q::one(), 1)?);
    out.add_series(&iota_term(setting, &shift(s, 1, 1), &p_pow(p, 3), 0)?);
    out.add_scaled(&apply_tp(setting, s, false)?, &p_pow(p, 1), 0, 0);
    out.add_scaled(&apply_tp(setting, &shift(s, 2, 1), false)?, &p_pow(p, 4), 0, -1);
    out.add_series(&iota_term(setting, &shift(s, -1, -1), &p_pow(p, 3), 1)?);
    out.add_series(&iota_term(setting, &shift(s, 1, 0), &p_pow(p, 6), 0)?);
    Ok(out)
}

/// `-p^3 + eps p^2`.
pub fn unit_sum_closed(setting: &Setting) -> Q {
    let p = setting.p;
    -p_pow(p, 3) + q_int(setting.epsilon()) * p_pow(p, 2)
}

/// `T23` via the five-term `GL2` form.
pub fn apply_t23(setting: &Setting, s: &IotaSym) -> Result<FormalSeries, SymbolError> {
    require_support(s)?;
    let p = setting.p;
    let mut out = FormalSeries::new(0);
    out.add_scaled(&apply_tp(setting, &shift(s, 1, 1), false)?, &p_pow(p, 1), 0, 0);
    out.add_series(&iota_term(setting, &shift(s, -2, -1), &Q::one(), 2)?);
    out.add_series(&iota_term(setting, &shift(s, 2, 1), &p_pow(p, 6), 0)?);
    out.add_scaled(&apply_tp(setting, &shift(s, 1, 0), false)?, &p_pow(p, 4), 0, 0);
    let mut c = p_pow(p, 3) - Q::one();
    if s.ell.norm_val() == s.r {
        c += unit_sum_closed(setting);
    }
    out.add_series(&iota_term(setting, s, &c, 1)?);
    Ok(out)
}

/// Rank-one symmetric `Z` mod `p` (as `Z/p`), i.e. the `u` with `p u` of
/// rank one over `F_p`.
pub fn rank_one_unipotents(p: u64) -> Vec<QMat> {
    let pi = p as i64;
    let mut out = Vec::new();
    let inv = p_pow(p, -1);
    for idx in 1..pi.pow(6) {
        let mut n = [[0i64; 3]; 3];
        let mut t = idx;
        for i in 0..3 {
            for j in i..3 {
                n[i][j] = t % pi;
                n[j][i] = n[i][j];
                t /= pi;
            }
        }
        // rank one iff all 2x2 minors vanish mod p
        let mut rank_one = true;
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            for (c, d) in [(0, 1), (0, 2), (1, 2)] {
                if (n[a][c] * n[b][d] - n[a][d] * n[b][c]).rem_euclid(pi) != 0 {
                    rank_one = false;
                }
            }
        }
        if rank_one {
            out.push(QMat::from_rows(
                n.iter().map(|r| r.iter().map(|&x| q_int(x) * &inv).collect()).collect(),
            ));
        }
    }
    out
}

fn up_matrix(z: &QMat) -> QMat {
    let mut m = QMat::identity(6);
    m.set_block(0, 3, &(z * &cyclic_s()));
    m
}

/// `sum_{u in U(p)'} (chi(g u g^-1) - 1)`, evaluated by an exact character sum.
pub fn unit_sum(setting: &Setting, g: &GroupElement) -> Result<Q, SymbolError> {
    let p = setting.p;
    let ginv = g.mat.inverse().expect("invertible");
    let mut args = Vec::new();
    let us = rank_one_unipotents(p);
    for z in &us {
        let c = &(&g.mat * &up_matrix(z)) * &ginv;
        args.push(chi_argument(&c, setting.d)?);
    }
    let k = args.iter().map(|a| Phase::of(a, p).k).max().unwrap_or(0);
    let sum = character_sum(&args, p, k)?;
    let total = sum.to_rational().ok_or(crate::padic::PadicError::NotRational)?;
    Ok(total - q_int(us.len() as i64))
}

/// Raw application of a `GSp6` double coset:
/// `sum_{x u K} chi(gx u (gx)^-1) lambda(gx)`.
pub fn apply_gsp6_raw(
    setting: &Setting,
    cosets: &[Gsp6Coset],
    g: &GroupElement,
) -> Result<FormalSeries, SymbolError> {
    let p = setting.p;
    let mut groups: BTreeMap<String, Vec<&Gsp6Coset>> = BTreeMap::new();
    for c in cosets {
        groups.entry(c.a.to_string()).or_default().push(c);
    }
    let parts: Vec<Result<PhaseAccumulator, SymbolError>> = groups
        .into_par_iter()
        .map(|(_, cs)| {
            let mut acc = PhaseAccumulator::new(p, 0);
            let x = levi_tilde(&cs[0].a, cs[0].nu_exp, p);
            let gx = g.mul(&x);
            let red = match canonicalize(setting, &gx)? {
                Canon::Vanish(_) => return Ok(acc),
                Canon::Symbol(r) => r,
            };
            let a = gx.mat.block(0, 0, 3, 3);
            let binv = gx.mat.block(3, 3, 3, 3).inverse().expect("invertible");
            let s = cyclic_s();
            for c in cs {
                let y = &(&(&a * &(&c.z * &s)) * &binv);
                let mut n = QMat::identity(6);
                n.set_block(0, 3, y);
                let ph = Phase::of(&chi_argument(&n, setting.d)?, p);
                acc.add(0, red.key, red.w, red.phase.add(&ph, p), &Q::one());
            }
            Ok(acc)
        })
        .collect();
    let mut acc = PhaseAccumulator::new(p, 0);
    for part in parts {
        acc.merge(part?);
    }
    Ok(acc.finish()?)
}

/// `sum_beta lambda(g v~_beta)` over the `GL3` cosets of `diag(p^e)`,
/// each lifted with similitude `p`.
fn bracket(
    acc: &mut PhaseAccumulator,
    setting: &Setting,
    g: &GroupElement,
    exps: &[i64],
    coeff: &Q,
) -> Result<(), SymbolError> {
    for v in gl_coset_reps(3, exps, setting.p) {
        accumulate(acc, setting, &g.mul(&levi_tilde(&v, 1, setting.p)), coeff, 0, Phase::ZERO)?;
    }
    Ok(())
}

/// Sizes `|U(x) / U_P(Z_p)|` for the four `GL3` families, by brute force.
pub fn gl3_family_sizes(p: u64) -> Vec<Vec<usize>> {
    [[0, 0, 0], [0, 0, 1], [0, 1, 1], [1, 1, 1]]
        .iter()
        .map(|e| gl_coset_reps(3, e, p).iter().map(|x| um_measure_size(x, p)).collect())
        .collect()
}

/// `T03` via the four `GL3` brackets weighted by `1, p, p^3, p^6`.
pub fn gl3_t03(setting: &Setting, g: &GroupElement) -> Result<FormalSeries, SymbolError> {
    let p = setting.p;
    let mut acc = PhaseAccumulator::new(p, 0);
    for (i, e) in [[0, 0, 0], [0, 0, 1], [0, 1, 1], [1, 1, 1]].iter().enumerate() {
        bracket(&mut acc, setting, g, e, &p_pow(p, [0, 1, 3, 6][i]))?;
    }
    Ok(acc.finish()?)
}

/// `T23` via the two `GL3` brackets plus the `U(p)'` sum, the latter
/// evaluated directly as a character sum.
pub fn gl3_t23(setting: &Setting, g: &GroupElement) -> Result<FormalSeries, SymbolError> {
    let p = setting.p;
    let mut acc = PhaseAccumulator::new(p, 0);
    let d1 = diag_element(&[0, 0, 0, 1, 1, 1], p)?;
    let dp = diag_element(&[1, 1, 1, 0, 0, 0], p)?;
    bracket(&mut acc, setting, &g.mul(&d1), &[0, 1, 1], &Q::one())?;
    bracket(&mut acc, setting, &g.mul(&dp), &[0, 0, 1], &p_pow(p, 4))?;
    let units = q_int(rank_one_unipotents(p).len() as i64) + unit_sum(setting, g)?;
    accumulate(&mut acc, setting, g, &units, 1, Phase::ZERO)?;
    Ok(acc.finish()?)
}

/// The three evaluations of one operator on one symbol.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub operator: String,
    pub symbol: String,
    pub equal: bool,
    pub raw_vs_gl3: Vec<Discrepancy>,
    pub raw_vs_gl2: Vec<Discrepancy>,
}

/// Compare raw coset application with the `GL3` and `GL2` forms.
pub fn reduction_crosscheck(
    setting: &Setting,
    table: &SymbolTable,
    op: HeckeOp,
    cosets: &[Gsp6Coset],
    s: &IotaSym,
) -> Result<CrossCheck, SymbolError> {
    let g = iota_rep(setting, s)?;
    let raw = apply_gsp6_raw(setting, cosets, &g)?;
    let (gl3, gl2) = match op {
        HeckeOp::T03 => (gl3_t03(setting, &g)?, apply_t03(setting, s)?),
        HeckeOp::T23 => (gl3_t23(setting, &g)?, apply_t23(setting, s)?),
        HeckeOp::T33 => {
            let c = iota_term(setting, s, &Q::one(), 1)?;
            (c.clone(), c)
        }
    };
    let a = diff(&raw, &gl3, table);
    let b = diff(&raw, &gl2, table);
    Ok(CrossCheck {
        operator: format!("{op:?}"),
        symbol: s.to_string(),
        equal: a.is_empty() && b.is_empty(),
        raw_vs_gl3: a,
        raw_vs_gl2: b,
    })
}

/// Symbols `iota(p^r, l)` with `r <= rmax` in the support.
pub fn support_symbols(setting: &Setting, rmax: i64) -> Vec<IotaSym> {
    let mut out = Vec::new();
    for r in 0..=rmax {
        for n in 0..=r {
            for ell in EllClass::with_norm_val(setting.split(), n) {
                out.push(IotaSym::new(r, ell));
            }
        }
    }
    out
}

/// Coset lists for the crosscheck, built once.
pub fn crosscheck_cosets(p: u64) -> (Vec<Gsp6Coset>, Vec<Gsp6Coset>, Vec<Gsp6Coset>) {
    (gsp6_coset_reps(HeckeOp::T03, p), gsp6_coset_reps(HeckeOp::T23, p), gsp6_coset_reps(HeckeOp::T33, p))
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sum_constants() {
        for (d, want) in [(5, -36), (13, -18)] {
            let st = Setting::new(3, d, 10).unwrap();
            let g = iota_rep(&st, &IotaSym::new(0, EllClass::one(st.split()))).unwrap();
            assert_eq!(unit_sum(&st, &g).unwrap(), q_int(want));
            assert_eq!(unit_sum_closed(&st), q_int(want));
        }
        assert_eq!(rank_one_unipotents(3).len(), 26);
    }

    #[test]
    fn t03_and_t23_reductions_at_identity() {
        for d in [5, 13] {
            let st = Setting::new(3, d, 10).unwrap();
            let table = SymbolTable::build(&st, 4).unwrap();
            let (c03, c23, _) = crosscheck_cosets(3);
            let s = IotaSym::new(0, EllClass::one(st.split()));
            for (op, cs) in [(HeckeOp::T03, &c03), (HeckeOp::T23, &c23)] {
                let cc = reduction_crosscheck(&st, &table, op, cs, &s).unwrap();
                assert!(cc.equal, "{cc:#?}");
            }
        }
    }
}
