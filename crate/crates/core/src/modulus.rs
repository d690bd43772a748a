//! Modulus characters of the parabolics `R`, the Borel of `GL2 x GL2L*` and the
//! Siegel parabolic `P4` of `GSp4`, together with a counting oracle on finite
//! quotients `U(Z_p) / U(p^N Z_p)`.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::groups::{build_iota, embed_gl2_gsp4, levi_r, levi_r_parts, similitude_of, u_r_element, GroupError, QuadElem};
use crate::matrix::QMat;
use crate::padic::{abs_p, p_pow, q_int, residue, valuation, PadicError, Q};
use crate::report::CheckResult;
use crate::symbols::Setting;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Parabolic {
    /// `R` in `GSp6`, Levi `diag(w, x, y, z)`.
    R,
    /// Borel of `GL2 x GL2L*` inside `GSp6`, at the elements `iota(t, l)`.
    BorelL,
    /// Siegel parabolic of `GSp4`, Levi `diag(nu y^{-t}, y)`.
    SiegelGsp4,
}

/// Closed forms: `|nu|^6 |z|^-6 |det y|^-3`, `|t|^3 |l|^-2`, `|nu|^3 |det y|^-3`.
pub fn modulus_character(par: Parabolic, m: &QMat, p: u64) -> Result<Q, GroupError> {
    match par {
        Parabolic::R => {
            let (w, y, z) = levi_r_parts(m)?;
            let nu = &w * &z;
            Ok(abs_p(&nu, p).pow(6) * abs_p(&z, p).pow(-6) * abs_p(&y.det(), p).pow(-3))
        }
        Parabolic::BorelL => {
            let (t, y, _) = iota_parts(m)?;
            Ok(abs_p(&t, p).pow(3) * abs_p(&y.det(), p).pow(-2))
        }
        Parabolic::SiegelGsp4 => {
            let (nu, y) = siegel4_parts(m)?;
            Ok(abs_p(&nu, p).pow(3) * abs_p(&y.det(), p).pow(-3))
        }
    }
}

fn iota_parts(m: &QMat) -> Result<(Q, QMat, Q), GroupError> {
    let (w, y, z) = levi_r_parts(m)?;
    if !z.is_one() {
        return Err(GroupError::NotInLevi);
    }
    Ok((w, y, z))
}

fn siegel4_parts(m: &QMat) -> Result<(Q, QMat), GroupError> {
    if m.rows() != 4 || !m.block(0, 2, 2, 2).is_zero() || !m.block(2, 0, 2, 2).is_zero() {
        return Err(GroupError::NotInLevi);
    }
    let nu = similitude_of(m).ok_or(GroupError::NotSymplectic)?;
    Ok((nu, m.block(2, 2, 2, 2)))
}

/// Lie algebra basis of the unipotent radical, as matrices of the ambient
/// group, each scaled so that the `Z_p`-span is the Lie algebra of `U(Z_p)`.
pub fn lie_basis(par: Parabolic, d: i64) -> Vec<QMat> {
    let one = Q::one;
    match par {
        Parabolic::R => (0..8)
            .map(|k| {
                let c: Vec<Q> = (0..8).map(|i| if i == k { one() } else { Q::zero() }).collect();
                u_r_element([&c[0], &c[1]], [&c[2], &c[3]], [&c[4], &c[5], &c[6]], &c[7]).sub(&QMat::identity(6))
            })
            .collect(),
        Parabolic::BorelL => {
            let half = Q::new(1.into(), 2.into());
            let dq = q_int(d);
            let nl = |x: Q, y: Q| {
                let n = QMat::from_rows(vec![
                    vec![&x / &dq * &half, &y * &half],
                    vec![&y * &half, &x * &half],
                ]);
                let mut g = QMat::zeros(4, 4);
                g.set_block(0, 2, &n);
                embed_lie(&QMat::zeros(2, 2), &g)
            };
            vec![
                embed_lie(&QMat::from_ints(&[&[0, 1], &[0, 0]]), &QMat::zeros(4, 4)),
                nl(one(), Q::zero()),
                nl(Q::zero(), one()),
            ]
        }
        Parabolic::SiegelGsp4 => [(0, 2), (0, 3), (1, 3)]
            .iter()
            .map(|&(i, k)| {
                let mut x = QMat::zeros(4, 4);
                x[(i, k)] = one();
                if (i, k) == (0, 3) {
                    x[(1, 2)] = one();
                }
                x
            })
            .collect(),
    }
}

fn embed_lie(x1: &QMat, x2: &QMat) -> QMat {
    let mut m = QMat::zeros(6, 6);
    m[(0, 0)] = x1[(0, 0)].clone();
    m[(0, 5)] = x1[(0, 1)].clone();
    m[(5, 0)] = x1[(1, 0)].clone();
    m[(5, 5)] = x1[(1, 1)].clone();
    m.set_block(1, 1, x2);
    m
}

/// Coordinates of `y` in the span of `basis`, if it lies there.
pub fn coordinates(basis: &[QMat], y: &QMat) -> Option<Vec<Q>> {
    let d = basis.len();
    let cells = y.entries().len();
    // augmented system, one row per matrix cell
    let mut rows: Vec<Vec<Q>> = (0..cells)
        .map(|c| {
            let mut r: Vec<Q> = basis.iter().map(|b| b.entries()[c].clone()).collect();
            r.push(y.entries()[c].clone());
            r
        })
        .collect();
    let mut piv = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(sel) = (row..cells).find(|&r| !rows[r][col].is_zero()) else {
            return None;
        };
        rows.swap(row, sel);
        let inv = Q::one() / &rows[row][col];
        for k in col..=d {
            rows[row][k] = &rows[row][k] * &inv;
        }
        for r in 0..cells {
            if r != row && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for k in col..=d {
                    let s = &f * &rows[row][k];
                    rows[r][k] = &rows[r][k] - s;
                }
            }
        }
        piv.push(row);
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[d].is_zero()) {
        return None;
    }
    Some(piv.iter().map(|&r| rows[r][d].clone()).collect())
}

/// Matrix of `Ad(m)` on the basis: column `b` holds the coordinates of
/// `m X_b m^-1`.
pub fn adjoint_matrix(m: &QMat, basis: &[QMat]) -> Result<QMat, GroupError> {
    let minv = m.inverse().ok_or(GroupError::Singular)?;
    let d = basis.len();
    let mut out = QMat::zeros(d, d);
    for (b, x) in basis.iter().enumerate() {
        let y = &(m * x) * &minv;
        let c = coordinates(basis, &y).ok_or(GroupError::NotInLevi)?;
        for (a, v) in c.into_iter().enumerate() {
            out[(a, b)] = v;
        }
    }
    Ok(out)
}

fn components(m: &QMat, minv: &QMat) -> Vec<Vec<usize>> {
    let d = m.rows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for a in 0..d {
        for b in 0..d {
            if !m[(a, b)].is_zero() || !minv[(a, b)].is_zero() {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..d {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// `#{x in (Z/p^n)^d : M x in Z_p^d}`, for `p^n M` integral. All but the last
/// coordinate are enumerated; the last is solved coordinate-wise.
fn count_integral(m: &[Vec<Q>], p: u64, n: u32) -> u128 {
    let pn = (p as i128).pow(n);
    let scale = p_pow(p, n as i64);
    let mi: Vec<Vec<i128>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    let r = residue(&(v * &scale), p, n).expect("window covers the denominators");
                    i128::try_from(r).expect("fits")
                })
                .collect()
        })
        .collect();
    let d = mi[0].len();
    let mut total = 0u128;
    let mut x = vec![0i128; d - 1];
    loop {
        // congruences a_i x_last + b_i = 0 mod p^n
        let mut modulus_exp = 0u32;
        let mut target: Option<i128> = Some(0);
        for row in &mi {
            let b: i128 = row[..d - 1].iter().zip(&x).map(|(a, v)| a * v).sum::<i128>().rem_euclid(pn);
            let a = row[d - 1];
            let va = vp(a, p, n);
            if va >= n {
                if b != 0 {
                    target = None;
                    break;
                }
                continue;
            }
            if vp(b, p, n) < va {
                target = None;
                break;
            }
            // x = -(b / p^va) (a / p^va)^-1 mod p^(n - va)
            let k = n - va;
            let pk = (p as i128).pow(k);
            let pv = (p as i128).pow(va);
            let sol = (-(b / pv) * crate::hnf::modinv_i128((a / pv).rem_euclid(pk), pk)).rem_euclid(pk);
            match target {
                Some(t) if k > modulus_exp => {
                    if t.rem_euclid((p as i128).pow(modulus_exp)) != sol.rem_euclid((p as i128).pow(modulus_exp)) {
                        target = None;
                        break;
                    }
                    target = Some(sol);
                    modulus_exp = k;
                }
                Some(t) => {
                    if t.rem_euclid(pk) != sol {
                        target = None;
                        break;
                    }
                }
                None => unreachable!(),
            }
        }
        if target.is_some() {
            total += (pn / (p as i128).pow(modulus_exp)) as u128;
        }
        let mut i = 0;
        loop {
            if i == d - 1 {
                return total;
            }
            x[i] += 1;
            if x[i] < pn {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

fn vp(x: i128, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut x = x;
    let mut v = 0;
    while x % p as i128 == 0 && v < cap {
        x /= p as i128;
        v += 1;
    }
    v
}

/// Volume of `m U(Z_p) m^-1` relative to `U(Z_p)`, from
/// `[m U m^-1 : m U m^-1 cap U] / [U : m U m^-1 cap U]`, with both indices read
/// off as counts on `U(Z_p) / U(p^N Z_p)`. `window` caps `N`.
pub fn verify_modulus_bruteforce(par: Parabolic, m: &QMat, p: u64, d: i64, window: u32) -> Result<Q, GroupError> {
    let basis = lie_basis(par, d);
    let ad = adjoint_matrix(m, &basis)?;
    let adinv = ad.inverse().ok_or(GroupError::Singular)?;
    let mut out = Q::one();
    for comp in components(&ad, &adinv) {
        let sub = |mat: &QMat| -> Vec<Vec<Q>> {
            comp.iter().map(|&a| comp.iter().map(|&b| mat[(a, b)].clone()).collect()).collect()
        };
        let (fwd, bwd) = (sub(&ad), sub(&adinv));
        let need = fwd
            .iter()
            .chain(bwd.iter())
            .flatten()
            .filter_map(|v| valuation(v, p))
            .map(|v| (-v).max(0))
            .max()
            .unwrap_or(0) as u32;
        if need > window {
            return Err(GroupError::Padic(PadicError::PrecisionExhausted { needed: need as i64, available: window as i64 }));
        }
        // u with m^-1 u m integral, and u with m u m^-1 integral
        let c1 = count_integral(&bwd, p, need);
        let c2 = count_integral(&fwd, p, need);
        out *= Q::new(c1.into(), c2.into());
    }
    Ok(out)
}

/// Sample elements of `L^x` with rational coordinates and norm valuation at
/// most `nmax`, one or two per valuation.
pub fn sample_ells(setting: &Setting, nmax: i64) -> Vec<QuadElem> {
    let (p, d) = (setting.p, setting.d);
    let mut out = Vec::new();
    for n in 0..=nmax {
        let mut found = 0;
        'search: for x in -12i64..=12 {
            for y in 0i64..=6 {
                let l = QuadElem::new(q_int(x), q_int(y));
                let nm = l.norm(d);
                if nm.is_zero() || valuation(&nm, p) != Some(n) {
                    continue;
                }
                if out.contains(&l) {
                    continue;
                }
                out.push(l);
                found += 1;
                if found == 2 {
                    break 'search;
                }
            }
        }
    }
    out
}

/// Levi elements with valuations at most `vmax` for the given parabolic.
pub fn sample_levi(par: Parabolic, setting: &Setting, vmax: i64) -> Vec<QMat> {
    let p = setting.p;
    let mut ys: Vec<QMat> = Vec::new();
    for i in 0..=vmax {
        for j in 0..=vmax - i {
            ys.push(QMat::diag(&[p_pow(p, i), p_pow(p, j)]));
            ys.push(QMat::from_rows(vec![vec![p_pow(p, i), q_int(1)], vec![Q::zero(), p_pow(p, j)]]));
        }
    }
    ys.push(QMat::from_ints(&[&[0, 1], &[1, 0]]));
    for l in sample_ells(setting, vmax) {
        ys.push(crate::groups::build_m_ell(&l, setting.d));
    }
    let pows: Vec<Q> = (0..=vmax).map(|e| p_pow(p, e)).chain([q_int(2)]).collect();
    let mut out = Vec::new();
    match par {
        Parabolic::R => {
            for w in &pows {
                for z in &pows {
                    for y in &ys {
                        out.push(levi_r(w, y, z).mat);
                    }
                }
            }
        }
        Parabolic::BorelL => {
            for t in &pows {
                for l in sample_ells(setting, vmax) {
                    out.push(build_iota(t, &l, setting.d).mat);
                }
            }
        }
        Parabolic::SiegelGsp4 => {
            for nu in &pows {
                for y in &ys {
                    let a = y.inverse().expect("invertible").transpose().scale(nu);
                    out.push(QMat::block_diag(&[&a, y]));
                }
            }
        }
    }
    out
}

/// Formula against counting for every sampled Levi element of the three
/// parabolics.
pub fn modulus_check(setting: &Setting, vmax: i64) -> CheckResult {
    let mut res = CheckResult::new("modulus", "delta_R, delta_B, delta_P4 against finite-quotient counts");
    let jobs: Vec<(Parabolic, QMat)> = [Parabolic::R, Parabolic::BorelL, Parabolic::SiegelGsp4]
        .into_iter()
        .flat_map(|par| sample_levi(par, setting, vmax).into_iter().map(move |m| (par, m)))
        .collect();
    let window = (4 * vmax + 2) as u32;
    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|(par, m)| {
            let f = modulus_character(*par, m, setting.p);
            let b = verify_modulus_bruteforce(*par, m, setting.p, setting.d, window);
            (*par, m, f, b)
        })
        .collect();
    for (par, m, f, b) in outcomes {
        match (f, b) {
            (Ok(f), Ok(b)) => res.case(f == b, || format!("{par:?} m={m}: formula {f}, count {b}")),
            (f, b) => res.error(format!("{par:?} m={m}: {f:?} / {b:?}")),
        }
    }
    res
}

/// `GL2 x GSp4` element of the Borel: `(diag(t,1), iota block)`.
pub fn borel_element(t: &Q, l: &QuadElem, d: i64) -> Result<QMat, GroupError> {
    let m = crate::groups::build_m_ell(l, d);
    let a = m.inverse().ok_or(GroupError::Singular)?.transpose().scale(t);
    let g2 = QMat::block_diag(&[&a, &m]);
    let g1 = QMat::diag(&[t.clone(), Q::one()]);
    Ok(embed_gl2_gsp4(&g1, &g2)?.mat)
}
