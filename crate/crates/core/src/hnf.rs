//! Hermite forms over `Z_p` under right multiplication by `GL_n(Z_p)`.
//!
//! Normal form: upper triangular, diagonal `p^{e_i}`, and every entry of row
//! `i` to the right of the diagonal reduced into `[0, p^{e_i})`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::matrix::QMat;
use crate::padic::{p_pow, residue, valuation, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HnfError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not p-integral")]
    NotIntegral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hermite {
    pub h: QMat,
    /// `h = a * gamma`, `gamma` in `GL_n(Z_(p))`.
    pub gamma: QMat,
    pub exponents: Vec<u32>,
}

/// Hermite form of an invertible p-integral square matrix.
pub fn hnf_local(a: &QMat, p: u64) -> Result<Hermite, HnfError> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    if !a.is_integral(p) {
        return Err(HnfError::NotIntegral);
    }
    let mut h = a.clone();
    let mut g = QMat::identity(n);
    let mut exps = vec![0u32; n];
    for i in (0..n).rev() {
        let (best, e) = (0..=i)
            .filter_map(|j| valuation(&h[(i, j)], p).map(|v| (j, v)))
            .min_by_key(|&(j, v)| (v, std::cmp::Reverse(j)))
            .ok_or(HnfError::Singular)?;
        h.swap_cols(best, i);
        g.swap_cols(best, i);
        let unit_inv = p_pow(p, e) / &h[(i, i)];
        h.scale_col(i, &unit_inv);
        g.scale_col(i, &unit_inv);
        let piv = h[(i, i)].clone();
        for j in 0..i {
            if h[(i, j)].is_zero() {
                continue;
            }
            let f = &h[(i, j)] / &piv;
            h.col_axpy(j, i, &f);
            g.col_axpy(j, i, &f);
        }
        exps[i] = e as u32;
    }
    for j in 1..n {
        for i in (0..j).rev() {
            let m = p_pow(p, exps[i] as i64);
            let x = h[(i, j)].clone();
            let r = Q::from_integer(residue(&x, p, exps[i]).expect("entries stay integral"));
            let f = (x - r) / m;
            h.col_axpy(j, i, &f);
            g.col_axpy(j, i, &f);
        }
    }
    Ok(Hermite { h, gamma: g, exponents: exps })
}

/// `true` if `g` lies in `GL_n(Z_p)`.
pub fn is_unimodular(g: &QMat, p: u64) -> bool {
    g.is_integral(p) && valuation(&g.det(), p) == Some(0)
}

/// Exponents of the elementary divisors of a nonsingular matrix, ascending.
pub fn elementary_divisors(a: &QMat, p: u64) -> Result<Vec<i64>, HnfError> {
    let n = a.rows();
    let mut m = a.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..n {
            for j in k..n {
                if let Some(v) = valuation(&m[(i, j)], p) {
                    if best.is_none_or(|b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let (bi, bj, v) = best.ok_or(HnfError::Singular)?;
        m.swap_rows(bi, k);
        m.swap_cols(bj, k);
        let piv = m[(k, k)].clone();
        for i in k + 1..n {
            if m[(i, k)].is_zero() {
                continue;
            }
            let f = &m[(i, k)] / &piv;
            for j in k..n {
                let t = &f * &m[(k, j)];
                m[(i, j)] -= t;
            }
        }
        for j in k + 1..n {
            if m[(k, j)].is_zero() {
                continue;
            }
            let f = &m[(k, j)] / &piv;
            m.col_axpy(j, k, &f);
        }
        out.push(v);
    }
    out.sort();
    Ok(out)
}

/// Canonical basis of the `Z_p`-lattice spanned by the columns of `gens`
/// together with `p^k Z_p^n`, computed on residues mod `p^k`.
/// Returns an upper triangular integer matrix in Hermite form.
pub fn lattice_hnf(gens: &[Vec<i128>], n: usize, p: u64, k: u32) -> Vec<Vec<i128>> {
    let pk = (p as i128).pow(k);
    let val = |x: i128| -> u32 {
        if x == 0 {
            return k;
        }
        let mut x = x;
        let mut v = 0;
        while x % p as i128 == 0 {
            x /= p as i128;
            v += 1;
        }
        v
    };
    let mut pool: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|x| x.rem_euclid(pk)).collect()).collect();
    let mut h = vec![vec![0i128; n]; n];
    let mut exps = vec![k; n];
    for i in (0..n).rev() {
        let best = pool.iter().enumerate().map(|(c, col)| (c, val(col[i]))).min_by_key(|&(c, v)| (v, c));
        match best {
            Some((c, e)) if e < k => {
                let mut piv = pool.swap_remove(c);
                let unit = piv[i] / (p as i128).pow(e);
                let inv = modinv_i128(unit, pk);
                for x in piv.iter_mut() {
                    *x = mulmod(*x, inv, pk);
                }
                let pe = (p as i128).pow(e);
                for col in pool.iter_mut() {
                    if col[i] == 0 {
                        continue;
                    }
                    let f = col[i] / pe;
                    for (x, y) in col.iter_mut().zip(&piv) {
                        *x = (*x - mulmod(f, *y, pk)).rem_euclid(pk);
                    }
                }
                for r in 0..n {
                    h[r][i] = piv[r];
                }
                exps[i] = e;
            }
            _ => {
                for r in 0..n {
                    h[r][i] = 0;
                }
                h[i][i] = pk;
                exps[i] = k;
            }
        }
    }
    for j in 1..n {
        for i in (0..j).rev() {
            let m = (p as i128).pow(exps[i]);
            let f = h[i][j].div_euclid(m);
            if f == 0 {
                continue;
            }
            for r in 0..=i {
                h[r][j] -= mulmod(f, h[r][i], pk);
            }
            for r in 0..=i {
                if r < i {
                    h[r][j] = h[r][j].rem_euclid(pk);
                }
            }
            h[i][j] = h[i][j].rem_euclid(m);
        }
    }
    h
}

fn mulmod(a: i128, b: i128, m: i128) -> i128 {
    (a.rem_euclid(m) * b.rem_euclid(m)).rem_euclid(m)
}

pub fn modinv_i128(a: i128, m: i128) -> i128 {
    let g = BigInt::from(a).extended_gcd(&BigInt::from(m));
    assert!(g.gcd.is_one(), "not invertible");
    g.x.mod_floor(&BigInt::from(m)).to_i128().unwrap()
}

/// Residue matrix of a p-integral rational matrix, as columns mod `p^k`.
pub fn columns_mod(a: &QMat, p: u64, k: u32) -> Vec<Vec<i128>> {
    (0..a.cols())
        .map(|j| {
            (0..a.rows())
                .map(|i| residue(&a[(i, j)], p, k).expect("integral matrix").to_i128().unwrap())
                .collect()
        })
        .collect()
}

pub fn qmat_from_i128(h: &[Vec<i128>]) -> QMat {
    QMat::from_rows(h.iter().map(|r| r.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::q_int;

    #[test]
    fn hermite_shape() {
        let a = QMat::from_ints(&[&[3, 5, 7], &[1, 9, 2], &[6, 0, 3]]);
        let hf = hnf_local(&a, 3).unwrap();
        assert_eq!(&a * &hf.gamma, hf.h);
        assert!(is_unimodular(&hf.gamma, 3));
        for i in 0..3 {
            for j in 0..i {
                assert!(hf.h[(i, j)].is_zero());
            }
            assert_eq!(hf.h[(i, i)], p_pow(3, hf.exponents[i] as i64));
            for j in i + 1..3 {
                let x = &hf.h[(i, j)];
                assert!(*x >= Q::zero() && *x < p_pow(3, hf.exponents[i] as i64));
            }
        }
    }

    #[test]
    fn elementary_divisor_exponents() {
        let a = QMat::from_ints(&[&[3, 0], &[0, 9]]);
        assert_eq!(elementary_divisors(&a, 3).unwrap(), vec![1, 2]);
        let b = QMat::from_ints(&[&[3, 1], &[0, 3]]);
        assert_eq!(elementary_divisors(&b, 3).unwrap(), vec![0, 2]);
    }

    #[test]
    fn lattice_hnf_agrees_with_exact() {
        let a = QMat::from_ints(&[&[9, 4, 1], &[0, 3, 5], &[0, 0, 1]]);
        let ex = hnf_local(&a, 3).unwrap().h;
        let lat = lattice_hnf(&columns_mod(&a, 3, 4), 3, 3, 4);
        assert_eq!(qmat_from_i128(&lat), ex);
        let _ = q_int(0);
    }
}
