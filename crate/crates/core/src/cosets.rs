//! Right coset representatives `K d K / K` for `GL_n` and `GSp6`, plus
//! independent lattice-counting oracles used to certify the lists.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admissible::pw;
use crate::groups::{cyclic_s, similitude_of};
use crate::hnf::{columns_mod, elementary_divisors, lattice_hnf};
use crate::matrix::QMat;
use crate::padic::{p_pow, q_int, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HeckeOp {
    T03,
    T23,
    T33,
}

impl HeckeOp {
    /// Exponents of the elementary divisors of the double coset.
    pub fn divisors(&self) -> [i64; 6] {
        match self {
            HeckeOp::T03 => [0, 0, 0, 1, 1, 1],
            HeckeOp::T23 => [0, 1, 1, 1, 1, 2],
            HeckeOp::T33 => [1, 1, 1, 1, 1, 1],
        }
    }

    pub fn similitude_exp(&self) -> u32 {
        match self {
            HeckeOp::T03 => 1,
            HeckeOp::T23 | HeckeOp::T33 => 2,
        }
    }
}

/// Upper triangular Hermite matrices with diagonal exponents in
/// `[0, emax]`, as integer rows.
fn hermite_matrices(n: usize, emax: u32, p: u64) -> Vec<Vec<Vec<i128>>> {
    let mut out = Vec::new();
    let mut diag = vec![0u32; n];
    loop {
        // free entries: row i, columns j > i, each in [0, p^{e_i})
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let sizes: Vec<i128> = slots.iter().map(|&(i, _)| pw(p, diag[i])).collect();
        let total: i128 = sizes.iter().product();
        for mut idx in 0..total {
            let mut m = vec![vec![0i128; n]; n];
            for i in 0..n {
                m[i][i] = pw(p, diag[i]);
            }
            for (s, &(i, j)) in slots.iter().enumerate() {
                m[i][j] = idx % sizes[s];
                idx /= sizes[s];
            }
            out.push(m);
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            diag[k] += 1;
            if diag[k] <= emax {
                break;
            }
            diag[k] = 0;
            k += 1;
        }
    }
}

fn to_qmat(m: &[Vec<i128>]) -> QMat {
    QMat::from_rows(m.iter().map(|r| r.iter().map(|&x| q_int(x as i64)).collect()).collect())
}

/// Representatives of `GL_n(Z_p) diag(p^e) GL_n(Z_p) / GL_n(Z_p)` in Hermite form.
pub fn gl_coset_reps(n: usize, exps: &[i64], p: u64) -> Vec<QMat> {
    let mut target = exps.to_vec();
    target.sort();
    let emax = *target.last().unwrap_or(&0) as u32;
    hermite_matrices(n, emax, p)
        .into_iter()
        .map(|m| to_qmat(&m))
        .filter(|m| elementary_divisors(m, p).is_ok_and(|e| e == target))
        .collect()
}

/// `[K : K cap d K d^-1]`, counting invertible residue matrices mod `p`
/// and multiplying by the number of lifts of each constrained entry.
pub fn gl_double_coset_size(exps: &[i64], p: u64) -> u128 {
    let n = exps.len();
    let pi = p as i64;
    let total = (p as u128).pow((n * n) as u32);
    let mut gl = 0u128;
    let mut par = 0u128;
    for idx in 0..total {
        let mut m = vec![vec![0i64; n]; n];
        let mut t = idx;
        for i in 0..n {
            for j in 0..n {
                m[i][j] = (t % p as u128) as i64;
                t /= p as u128;
            }
        }
        if det_mod(&m, pi) == 0 {
            continue;
        }
        gl += 1;
        let in_p = (0..n).all(|i| (0..n).all(|j| exps[i] <= exps[j] || m[i][j] == 0));
        if in_p {
            par += 1;
        }
    }
    let mut lifts = 1u128;
    for i in 0..n {
        for j in 0..n {
            if exps[i] > exps[j] {
                lifts *= (p as u128).pow((exps[i] - exps[j] - 1) as u32);
            }
        }
    }
    gl / par * lifts
}

fn det_mod(m: &[Vec<i64>], p: i64) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<i64>> = m.to_vec();
    let mut det = 1i64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c].rem_euclid(p) != 0) else {
            return 0;
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        let pv = a[c][c].rem_euclid(p);
        det = (det * pv).rem_euclid(p);
        let inv = (1..p).find(|x| (x * pv) % p == 1).unwrap();
        for r in c + 1..n {
            let f = (a[r][c] * inv).rem_euclid(p);
            for k in c..n {
                a[r][k] = (a[r][k] - f * a[c][k]).rem_euclid(p);
            }
        }
    }
    det.rem_euclid(p)
}

/// Right coset `x u K` with `x = diag(A, nu S^t A^-t S)` and
/// `u = [[1, Z S], [0, 1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gsp6Coset {
    pub a: QMat,
    pub z: QMat,
    pub nu_exp: u32,
    pub h: QMat,
}

impl Gsp6Coset {
    pub fn levi(&self, p: u64) -> QMat {
        let s = cyclic_s();
        let b = (&(&s.transpose() * &self.a.inverse().unwrap().transpose()) * &s).scale(&p_pow(p, self.nu_exp as i64));
        QMat::block_diag(&[&self.a, &b])
    }
}

fn build_h(a: &QMat, z: &QMat, nu_exp: u32, p: u64) -> QMat {
    let s = cyclic_s();
    let nu = p_pow(p, nu_exp as i64);
    let b = (&(&s.transpose() * &a.inverse().unwrap().transpose()) * &s).scale(&nu);
    let mut h = QMat::zeros(6, 6);
    h.set_block(0, 0, a);
    h.set_block(0, 3, &(&(a * z) * &s));
    h.set_block(3, 3, &b);
    h
}

/// Symmetric `N` mod `p^k` (as `Z = N / p^k`) with `A N = 0 mod p^k`,
/// pruned row by row from the bottom.
fn symmetric_solutions(a: &[Vec<i128>], p: u64, k: u32) -> Vec<[[i128; 3]; 3]> {
    let pk = pw(p, k);
    let mut out = Vec::new();
    let row_ok = |n: &[[i128; 3]; 3], i: usize| (0..3).all(|j| (i..3).map(|l| a[i][l] * n[l][j]).sum::<i128>() % pk == 0);
    let mut n = [[0i128; 3]; 3];
    for z22 in 0..pk {
        for z12 in 0..pk {
            for z02 in 0..pk {
                n[2][2] = z22;
                n[1][2] = z12;
                n[2][1] = z12;
                n[0][2] = z02;
                n[2][0] = z02;
                n[0][0] = 0;
                n[0][1] = 0;
                n[1][0] = 0;
                n[1][1] = 0;
                // row 2 depends on n[2][*] only
                if (0..3).any(|j| (a[2][2] * n[2][j]) % pk != 0) {
                    continue;
                }
                for z11 in 0..pk {
                    for z01 in 0..pk {
                        n[1][1] = z11;
                        n[0][1] = z01;
                        n[1][0] = z01;
                        if !row_ok(&n, 1) {
                            continue;
                        }
                        for z00 in 0..pk {
                            n[0][0] = z00;
                            if row_ok(&n, 0) {
                                out.push(n);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn rank_mod_p(m: &QMat, p: u64) -> usize {
    let cols = columns_mod(m, p, 1);
    let h = lattice_hnf(&cols, m.rows(), p, 1);
    (0..m.rows()).filter(|&i| h[i][i] == 1).count()
}

/// Right coset representatives of the double coset of `op` in `GSp6`.
pub fn gsp6_coset_reps(op: HeckeOp, p: u64) -> Vec<Gsp6Coset> {
    if op == HeckeOp::T33 {
        let a = QMat::identity(3).scale(&p_pow(p, 1));
        let z = QMat::zeros(3, 3);
        let h = build_h(&a, &z, 2, p);
        return vec![Gsp6Coset { a, z, nu_exp: 2, h }];
    }
    let nu_exp = op.similitude_exp();
    let target = op.divisors().to_vec();
    let nu = p_pow(p, nu_exp as i64);
    let s = cyclic_s();
    let candidates: Vec<Vec<Vec<i128>>> = hermite_matrices(3, nu_exp, p)
        .into_iter()
        .filter(|a| {
            let aq = to_qmat(a);
            let b = (&(&s.transpose() * &aq.inverse().unwrap().transpose()) * &s).scale(&nu);
            if !b.is_integral(p) {
                return false;
            }
            // rank of h mod p is at least rank A + rank B; T23 needs rank one
            op != HeckeOp::T23 || rank_mod_p(&aq, p) + rank_mod_p(&b, p) <= 1
        })
        .collect();
    let mut out: Vec<Gsp6Coset> = candidates
        .par_iter()
        .flat_map_iter(|a| {
            let aq = to_qmat(a);
            let k = nu_exp;
            let scale = p_pow(p, -(k as i64));
            let target = target.clone();
            let rank = target.iter().filter(|&&e| e == 0).count();
            let pk = pw(p, k);
            let pi = p as i128;
            let s_mod = columns_mod(&s, p, 1);
            let b_mod = columns_mod(&build_h(&aq, &QMat::zeros(3, 3), nu_exp, p).block(3, 3, 3, 3), p, 1);
            symmetric_solutions(a, p, k).into_iter().filter_map(move |n| {
                // h mod p from integers; the divisors are then confirmed exactly
                let mut cols = vec![vec![0i128; 6]; 6];
                for j in 0..3 {
                    for i in 0..3 {
                        cols[j][i] = a[i][j].rem_euclid(pi);
                        cols[j + 3][i + 3] = b_mod[j][i];
                        let an: Vec<i128> = (0..3).map(|l| (0..3).map(|t| a[i][t] * n[t][l]).sum::<i128>() / pk).collect();
                        cols[j + 3][i] = (0..3).map(|l| an[l] * s_mod[j][l]).sum::<i128>().rem_euclid(pi);
                    }
                }
                let h_mod = lattice_hnf(&cols, 6, p, 1);
                if (0..6).filter(|&i| h_mod[i][i] == 1).count() != rank {
                    return None;
                }
                let z = QMat::from_rows(
                    n.iter().map(|r| r.iter().map(|&x| q_int(x as i64) * &scale).collect::<Vec<Q>>()).collect(),
                );
                let h = build_h(&aq, &z, nu_exp, p);
                let ed = elementary_divisors(&h, p).ok()?;
                if ed == target {
                    Some(Gsp6Coset { a: aq.clone(), z, nu_exp, h })
                } else {
                    None
                }
            })
        })
        .collect();
    out.sort_by(|x, y| format!("{}{}", x.a, x.z).cmp(&format!("{}{}", y.a, y.z)));
    out
}

/// Canonical lattice `h Z_p^6` modulo `p^k`.
pub fn coset_lattice(h: &QMat, p: u64, k: u32) -> Vec<Vec<i128>> {
    lattice_hnf(&columns_mod(h, p, k), h.rows(), p, k)
}

fn form_mod(x: &[i128], y: &[i128], m: i128) -> i128 {
    // J6 pairs coordinate i with 3 + sigma(i)
    let j = symplectic_form_int();
    let mut s = 0i128;
    for a in 0..6 {
        for b in 0..6 {
            s += x[a] * j[a][b] * y[b];
        }
    }
    s.rem_euclid(m)
}

fn symplectic_form_int() -> [[i128; 6]; 6] {
    let jq = crate::groups::symplectic_form(6);
    let mut j = [[0i128; 6]; 6];
    for (a, row) in j.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = if jq[(a, b)] == q_int(1) {
                1
            } else if jq[(a, b)] == q_int(-1) {
                -1
            } else {
                0
            };
        }
    }
    j
}

/// All row-reduced `dim x 6` matrices over `F_p` of full rank.
fn subspaces(dim: usize, p: u64) -> Vec<Vec<Vec<i128>>> {
    let mut out = Vec::new();
    let n = 6;
    let mut pivots: Vec<Vec<usize>> = Vec::new();
    fn choose(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            choose(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    choose(0, n, dim, &mut Vec::new(), &mut pivots);
    for piv in pivots {
        let free: Vec<(usize, usize)> = (0..dim)
            .flat_map(|r| {
                let piv = piv.clone();
                (piv[r] + 1..n).filter(move |c| !piv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let total = (p as u128).pow(free.len() as u32);
        for mut idx in 0..total {
            let mut m = vec![vec![0i128; n]; dim];
            for (r, &c) in piv.iter().enumerate() {
                m[r][c] = 1;
            }
            for &(r, c) in &free {
                m[r][c] = (idx % p as u128) as i128;
                idx /= p as u128;
            }
            out.push(m);
        }
    }
    out
}

/// Lagrangian subspaces of `F_p^6`, as canonical lattices mod `p`.
pub fn lagrangian_oracle(p: u64) -> BTreeSet<Vec<Vec<i128>>> {
    let pm = p as i128;
    subspaces(3, p)
        .into_par_iter()
        .filter(|b| (0..3).all(|i| (0..3).all(|j| form_mod(&b[i], &b[j], pm) == 0)))
        .map(|b| lattice_hnf(&b, 6, p, 1))
        .collect()
}

/// Lattices `Z_p v + p M` with `M` the preimage of the orthogonal of the
/// line through `v` mod `p`, canonical mod `p^2`.
pub fn t23_oracle(p: u64) -> BTreeSet<Vec<Vec<i128>>> {
    let pm = p as i128;
    let p2 = pm * pm;
    let mut out = BTreeSet::new();
    for line in subspaces(1, p) {
        let v0 = &line[0];
        let perp: Vec<Vec<Vec<i128>>> = subspaces(5, p)
            .into_iter()
            .filter(|b| b.iter().all(|x| form_mod(x, v0, pm) == 0))
            .collect();
        assert_eq!(perp.len(), 1, "orthogonal of a line is a hyperplane");
        let perp = &perp[0];
        let off = (0..6)
            .map(|i| {
                let mut e = vec![0i128; 6];
                e[i] = 1;
                e
            })
            .find(|e| form_mod(e, v0, pm) != 0)
            .unwrap();
        for t in 0..pm {
            let v: Vec<i128> = v0.iter().zip(&off).map(|(a, b)| (a + pm * t * b).rem_euclid(p2)).collect();
            let mut gens = vec![v];
            for x in perp {
                gens.push(x.iter().map(|c| (c * pm).rem_euclid(p2)).collect());
            }
            out.insert(lattice_hnf(&gens, 6, p, 2));
        }
    }
    out
}

/// `|U(x) / U_P(Z_p)|` for `x = diag(A, p S^t A^-t S)`: the number of
/// `Z in p^-1 Sym3(Z_p) / Sym3(Z_p)` with `A Z` integral.
pub fn um_measure_size(a: &QMat, p: u64) -> usize {
    let ai: Vec<Vec<i128>> = (0..3)
        .map(|i| (0..3).map(|j| a[(i, j)].to_integer().try_into().expect("small entries")).collect())
        .collect();
    symmetric_solutions(&ai, p, 1).len()
}

/// `x~ = diag(A, nu S^t A^-t S)` as a group element.
pub fn levi_tilde(a: &QMat, nu_exp: u32, p: u64) -> crate::groups::GroupElement {
    let s = cyclic_s();
    let b = (&(&s.transpose() * &a.inverse().unwrap().transpose()) * &s).scale(&p_pow(p, nu_exp as i64));
    crate::groups::GroupElement {
        mat: QMat::block_diag(&[a, &b]),
        tag: crate::groups::GroupTag::GSp6,
        similitude: p_pow(p, nu_exp as i64),
    }
}

/// `true` if every representative is symplectic with the right similitude.
pub fn cosets_are_symplectic(cs: &[Gsp6Coset], p: u64) -> bool {
    cs.iter().all(|c| similitude_of(&c.h) == Some(p_pow(p, c.nu_exp as i64)))
}

/// For a `T03` coset, look for `Z' = Z + W` (`W` integral symmetric mod `p`)
/// with `x u' x^-1` integral.
pub fn integral_conjugate_rep(c: &Gsp6Coset, p: u64) -> Option<QMat> {
    let s = cyclic_s();
    let x = c.levi(p);
    let xinv = x.inverse().unwrap();
    let pi = p as i64;
    let total = pi.pow(6);
    for mut idx in 0..total {
        let mut w = QMat::zeros(3, 3);
        for i in 0..3 {
            for j in i..3 {
                let v = q_int(idx % pi);
                idx /= pi;
                w[(i, j)] = v.clone();
                w[(j, i)] = v;
            }
        }
        let z = c.z.add(&w);
        let mut u = QMat::identity(6);
        u.set_block(0, 3, &(&z * &s));
        let conj = &(&x * &u) * &xinv;
        if conj.is_integral(p) {
            return Some(z);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_tp_count() {
        assert_eq!(gl_coset_reps(2, &[0, 1], 3).len(), 4);
        assert_eq!(gl_double_coset_size(&[0, 1], 3), 4);
    }

    #[test]
    fn gl3_counts() {
        for p in [3u64, 5] {
            for exps in [[0, 0, 1], [0, 1, 1], [0, 1, 2], [0, 0, 2]] {
                let reps = gl_coset_reps(3, &exps, p);
                assert_eq!(reps.len() as u128, gl_double_coset_size(&exps, p), "{exps:?} p={p}");
            }
        }
    }

    #[test]
    fn measure_sizes() {
        let p = 3;
        for (i, exps) in [[0, 0, 0], [0, 0, 1], [0, 1, 1], [1, 1, 1]].iter().enumerate() {
            for a in gl_coset_reps(3, exps, p) {
                assert_eq!(um_measure_size(&a, p), [1, 3, 27, 729][i]);
            }
        }
    }
}
