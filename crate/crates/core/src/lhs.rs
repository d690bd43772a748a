//! The left side of the main identity: the zeta integral expanded as a
//! series in `q = p^{-s}` with coefficients in the symbols `lambda(g0)`.

use num_traits::Zero;

use crate::admissible::{admissible_bruteforce, pw, siegel_levi_element, RepresentativeM};
use crate::groups::levi_r;
use crate::matrix::QMat;
use crate::padic::{p_pow, q_int, Phase, Q};
use crate::series::{FormalSeries, PhaseAccumulator};
use crate::symbols::{canonicalize, Canon, EllClass, IotaSym, Setting, SymbolError, SymbolLabel, SymbolTable};

/// Brute-force expansion: sum over `q`-degree `R = r + c`, Hermite blocks
/// `m` with `g0(m)` not killed by a unipotent element, and the classes of
/// `gamma`, of
/// `charf(g_{m,r}) p^(2c-a-b) B(m) delta_R^-1(g0) lambda(g_{m,r})`.
pub fn lhs_series(setting: &Setting, rmax: u32) -> Result<FormalSeries, SymbolError> {
    let p = setting.p;
    let mut acc = PhaseAccumulator::new(p, rmax);
    for big_r in 0..=rmax {
        for c in 0..=big_r {
            let r = (big_r - c) as i64;
            for a in c..=big_r {
                for b in 0..=big_r {
                    for beta in (0..pw(p, a)).step_by(pw(p, c) as usize) {
                        let y = QMat::from_rows(vec![
                            vec![p_pow(p, a as i64), q_int(beta as i64)],
                            vec![Q::zero(), p_pow(p, b as i64)],
                        ]);
                        let g0 = levi_r(&p_pow(p, r), &y, &p_pow(p, c as i64));
                        if matches!(canonicalize(setting, &g0)?, Canon::Vanish(_)) {
                            continue;
                        }
                        let weight = p_pow(p, 2 * c as i64 - a as i64 - b as i64)
                            * p_pow(p, 6 * r - 3 * a as i64 - 3 * b as i64);
                        for gamma1 in 0..pw(p, a) as u64 {
                            for gamma2 in 0..pw(p, b) as u64 {
                                let m = RepresentativeM { a, b, c, beta: beta as u64, gamma1, gamma2 };
                                let g = siegel_levi_element(&m, r, p);
                                if !g.mat.is_integral(p) {
                                    continue;
                                }
                                let bm = admissible_bruteforce(setting, &m).b_value;
                                if bm.is_zero() {
                                    continue;
                                }
                                if let Canon::Symbol(red) = canonicalize(setting, &g)? {
                                    acc.add(big_r, red.key, red.w, red.phase, &(&weight * &bm));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(acc.finish()?)
}

/// Adds `coeff * w^dw * lambda(label)` at `q^n`; labels that vanish are skipped.
pub fn add_label(
    out: &mut FormalSeries,
    table: &SymbolTable,
    n: u32,
    label: SymbolLabel,
    dw: i64,
    coeff: &Q,
) {
    if let Some(k) = table.key(&label) {
        out.add_term(n, *k, dw, coeff);
    }
}

fn iota(r: i64, ell: EllClass) -> SymbolLabel {
    SymbolLabel::Iota(IotaSym::new(r, ell))
}

fn iota_tau_one(setting: &Setting, r: i64) -> SymbolLabel {
    SymbolLabel::IotaTau(IotaSym::new(r, EllClass::one(setting.split())))
}

/// Closed form of the left side.
pub fn lhs_closed_form(setting: &Setting, table: &SymbolTable, rmax: u32) -> FormalSeries {
    let p = setting.p;
    let one = EllClass::one(setting.split());
    let mut out = FormalSeries::new(rmax);
    for big_r in 0..=rmax {
        let r = big_r as i64;
        if !setting.split() {
            add_label(&mut out, table, big_r, iota(r, one), 0, &p_pow(p, 6 * r));
            if r >= 2 {
                add_label(&mut out, table, big_r, iota_tau_one(setting, r - 1), 0, &-p_pow(p, 6 * r - 6));
            }
            continue;
        }
        add_label(&mut out, table, big_r, iota(r, one), 0, &p_pow(p, 6 * r));
        for a in 1..=r {
            for i in [1, 2] {
                add_label(&mut out, table, big_r, iota(r, one.times_pi(i, a)), 0, &p_pow(p, 6 * r - 2 * a));
            }
        }
        if r >= 2 {
            add_label(&mut out, table, big_r, iota_tau_one(setting, r - 1), 0, &-p_pow(p, 6 * r - 6));
            add_label(&mut out, table, big_r, iota(r - 2, one), 1, &-(q_int(2) * p_pow(p, 6 * r - 8)));
        }
        for a in 2..=r - 1 {
            for i in [1, 2] {
                add_label(
                    &mut out,
                    table,
                    big_r,
                    iota(r - 2, one.times_pi(i, a - 1)),
                    1,
                    &-p_pow(p, 6 * r - 2 * a - 6),
                );
            }
        }
    }
    out
}

/// Closed form of the right side.
pub fn rhs_closed_form(setting: &Setting, table: &SymbolTable, rmax: u32) -> FormalSeries {
    let p = setting.p;
    let one = EllClass::one(setting.split());
    let mut out = FormalSeries::new(rmax);
    for big_r in 0..=rmax {
        let r = big_r as i64;
        add_label(&mut out, table, big_r, iota(r, one), 0, &p_pow(p, 6 * r));
        add_label(&mut out, table, big_r, iota_tau_one(setting, r - 1), 0, &-p_pow(p, 6 * r - 6));
        if !setting.split() {
            continue;
        }
        for i in [1, 2] {
            for k in 1..=r {
                add_label(&mut out, table, big_r, iota(r, one.times_pi(i, k)), 0, &p_pow(p, 6 * r - 2 * k));
            }
            for j in 0..=r - 2 {
                add_label(
                    &mut out,
                    table,
                    big_r,
                    iota(r - 2, one.times_pi(i, j)),
                    1,
                    &-p_pow(p, 4 - 2 * j + 6 * r - 12),
                );
            }
        }
    }
    out
}

/// Phase carried by `g_{m,r}` relative to its diagonal part.
pub fn block_phase(m: &RepresentativeM, p: u64) -> Phase {
    Phase::of(&(-q_int(m.gamma1 as i64) / p_pow(p, m.c as i64)), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::diff;

    #[test]
    fn brute_force_matches_closed_form() {
        for (p, d) in [(3, 5), (3, 13)] {
            let st = Setting::new(p, d, 14).unwrap();
            let table = SymbolTable::build(&st, 4).unwrap();
            let bf = lhs_series(&st, 3).unwrap();
            let cf = lhs_closed_form(&st, &table, 3);
            let dd = diff(&bf, &cf, &table);
            assert!(dd.is_empty(), "{dd:#?}");
        }
    }

    #[test]
    fn closed_forms_agree() {
        for (p, d) in [(3, 5), (3, 13), (5, 11)] {
            let st = Setting::new(p, d, 14).unwrap();
            let table = SymbolTable::build(&st, 4).unwrap();
            assert!(lhs_closed_form(&st, &table, 4) == rhs_closed_form(&st, &table, 4));
        }
    }
}
