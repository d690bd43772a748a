//! Concrete models of `GSp6`, `GSp4`, the torus `GL2L*` and the subgroups
//! used by the zeta integral, all as exact rational matrices.
//!
//! Conventions: `GSp6` preserves `J6 = [[0, S], [-S^t, 0]]` with
//! `S = [[0,0,1],[1,0,0],[0,1,0]]`, i.e. `g J6 g^t = nu(g) J6`;
//! `GSp4` preserves `J4 = [[0, 1], [-1, 0]]`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::QMat;
use crate::padic::{hensel_sqrt, legendre, p_pow, q_int, PadicError, Phase, TruncatedPadic, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix is not symplectic up to similitude")]
    NotSymplectic,
    #[error("similitude mismatch in embedding: {0} vs {1}")]
    SimilitudeMismatch(String, String),
    #[error("element is not in the unipotent radical U_R")]
    NotInUR,
    #[error("element is not in the expected Levi subgroup")]
    NotInLevi,
    #[error("singular matrix")]
    Singular,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupTag {
    GSp6,
    GSp4,
    GL3,
    GL2,
    GL2LStar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub mat: QMat,
    pub tag: GroupTag,
    pub similitude: Q,
}

/// `S` with `S e_1 = e_2`, `S e_2 = e_3`, `S e_3 = e_1`.
pub fn cyclic_s() -> QMat {
    QMat::from_ints(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]])
}

pub fn symplectic_form(size: usize) -> QMat {
    match size {
        6 => {
            let s = cyclic_s();
            let mut j = QMat::zeros(6, 6);
            j.set_block(0, 3, &s);
            j.set_block(3, 0, &s.transpose().scale(&q_int(-1)));
            j
        }
        4 => {
            let mut j = QMat::zeros(4, 4);
            j.set_block(0, 2, &QMat::identity(2));
            j.set_block(2, 0, &QMat::identity(2).scale(&q_int(-1)));
            j
        }
        _ => panic!("no symplectic form of size {size}"),
    }
}

/// `nu` with `g J g^t = nu J`, if it exists and is nonzero.
pub fn similitude_of(g: &QMat) -> Option<Q> {
    let n = g.rows();
    let j = symplectic_form(n);
    let lhs = &(g * &j) * &g.transpose();
    let c = (0..n).find(|&c| !j[(0, c)].is_zero()).expect("form has a nonzero first row");
    let nu = lhs[(0, c)].clone() / &j[(0, c)];
    if nu.is_zero() || lhs != j.scale(&nu) {
        return None;
    }
    Some(nu)
}

impl GroupElement {
    pub fn symplectic(mat: QMat) -> Result<Self, GroupError> {
        let tag = match mat.rows() {
            6 => GroupTag::GSp6,
            4 => GroupTag::GSp4,
            _ => return Err(GroupError::NotSymplectic),
        };
        let nu = similitude_of(&mat).ok_or(GroupError::NotSymplectic)?;
        Ok(GroupElement { mat, tag, similitude: nu })
    }

    /// Product of two symplectic elements, similitudes multiply.
    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        assert_eq!(self.tag, o.tag);
        GroupElement { mat: &self.mat * &o.mat, tag: self.tag, similitude: &self.similitude * &o.similitude }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            mat: self.mat.inverse().expect("group elements are invertible"),
            tag: self.tag,
            similitude: Q::one() / &self.similitude,
        }
    }

    pub fn conj(&self, n: &QMat) -> QMat {
        &(&self.mat * n) * &self.mat.inverse().expect("invertible")
    }
}

/// `x + y sqrt D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElem {
    pub x: Q,
    pub y: Q,
}

impl QuadElem {
    pub fn new(x: Q, y: Q) -> Self {
        QuadElem { x, y }
    }

    pub fn rational(x: Q) -> Self {
        QuadElem { x, y: Q::zero() }
    }

    pub fn norm(&self, d: i64) -> Q {
        &self.x * &self.x - q_int(d) * &self.y * &self.y
    }

    pub fn mul(&self, o: &QuadElem, d: i64) -> QuadElem {
        QuadElem {
            x: &self.x * &o.x + q_int(d) * &self.y * &o.y,
            y: &self.x * &o.y + &self.y * &o.x,
        }
    }

    pub fn inv(&self, d: i64) -> QuadElem {
        let n = self.norm(d);
        QuadElem { x: &self.x / &n, y: -&self.y / &n }
    }
}

/// The local algebra `L = Q_p[sqrt D]` with `p` odd, `p` not dividing `D`.
#[derive(Clone, Debug)]
pub struct EtaleQuadratic {
    pub p: u64,
    pub d: i64,
    pub split: bool,
    /// `sqrt D` in `Z_p` when split.
    pub h: Option<TruncatedPadic>,
}

impl EtaleQuadratic {
    pub fn new(p: u64, d: i64, precision: u32) -> Result<Self, PadicError> {
        if p.is_multiple_of(2) || d % p as i64 == 0 {
            return Err(PadicError::BadPrime { p, d });
        }
        let split = legendre(d, p) == 1;
        let h = if split { Some(hensel_sqrt(d, p, precision)?) } else { None };
        Ok(EtaleQuadratic { p, d, split, h })
    }

    /// `+1` split, `-1` inert.
    pub fn epsilon(&self) -> i64 {
        if self.split {
            1
        } else {
            -1
        }
    }
}

/// Matrix of multiplication by `l` on the basis `(sqrt D, 1)` read as
/// `[[x, D y], [y, x]]`.
pub fn build_m_ell(l: &QuadElem, d: i64) -> QMat {
    QMat::from_rows(vec![vec![l.x.clone(), q_int(d) * &l.y], vec![l.y.clone(), l.x.clone()]])
}

/// `diag(t, t m^{-t}, m, 1)` for a `2x2` block `m`.
pub fn iota_from_block(t: &Q, m: &QMat) -> GroupElement {
    let mit = m.inverse().expect("invertible block").transpose().scale(t);
    let mat = QMat::block_diag(&[&QMat::diag(std::slice::from_ref(t)), &mit, m, &QMat::identity(1)]);
    GroupElement { mat, tag: GroupTag::GSp6, similitude: t.clone() }
}

pub fn build_iota(t: &Q, l: &QuadElem, d: i64) -> GroupElement {
    iota_from_block(t, &build_m_ell(l, d))
}

/// Embedding of `{(g1, g2) : det g1 = nu(g2)}` into `GSp6`: `g1` on the
/// outer coordinates 1 and 6, `g2` on the middle four.
pub fn embed_gl2_gsp4(g1: &QMat, g2: &QMat) -> Result<GroupElement, GroupError> {
    let nu = similitude_of(g2).ok_or(GroupError::NotSymplectic)?;
    let det = g1.det();
    if det != nu {
        return Err(GroupError::SimilitudeMismatch(det.to_string(), nu.to_string()));
    }
    let mut m = QMat::zeros(6, 6);
    m[(0, 0)] = g1[(0, 0)].clone();
    m[(0, 5)] = g1[(0, 1)].clone();
    m[(5, 0)] = g1[(1, 0)].clone();
    m[(5, 5)] = g1[(1, 1)].clone();
    m.set_block(1, 1, g2);
    Ok(GroupElement { mat: m, tag: GroupTag::GSp6, similitude: nu })
}

/// Multiplication by `sqrt D` on the middle four coordinates; its
/// centralizer in `GSp4` is the image of `GL2L*`.
pub fn sqrt_d_operator(d: i64) -> QMat {
    QMat::from_ints(&[&[0, 1, 0, 0], &[d, 0, 0, 0], &[0, 0, 0, d], &[0, 0, 1, 0]])
}

/// Element of `U_R` with coordinates `v` (row 1), `r`, symmetric `u` and the
/// corner entry.
pub fn u_r_element(v: [&Q; 2], r: [&Q; 2], u: [&Q; 3], star: &Q) -> QMat {
    let umat = QMat::from_rows(vec![vec![u[0].clone(), u[1].clone()], vec![u[1].clone(), u[2].clone()]]);
    let vrow = QMat::from_rows(vec![vec![v[0].clone(), v[1].clone()]]);
    let rcol = QMat::from_rows(vec![vec![r[0].clone()], vec![r[1].clone()]]);
    let mid = rcol.sub(&(&umat * &vrow.transpose()));
    let mut m = QMat::identity(6);
    m[(0, 1)] = v[0].clone();
    m[(0, 2)] = v[1].clone();
    m[(0, 3)] = r[0].clone();
    m[(0, 4)] = r[1].clone();
    m[(0, 5)] = star.clone();
    m.set_block(1, 3, &umat);
    m.set_block(1, 5, &mid);
    m[(3, 5)] = -v[0].clone();
    m[(4, 5)] = -v[1].clone();
    m
}

/// `n_v`: the `U_R` element with only `v` nonzero.
pub fn n_v(v1: &Q, v2: &Q) -> QMat {
    let z = Q::zero();
    u_r_element([v1, v2], [&z, &z], [&z, &z, &z], &z)
}

/// Element `[[1, Z S], [0, 1]]` of `U_P` for symmetric `Z`.
pub fn u_p_element(z: &QMat) -> QMat {
    let mut m = QMat::identity(6);
    m.set_block(0, 3, &(z * &cyclic_s()));
    m
}

/// `U_R` shape: unipotent upper triangular with identity `2x2` diagonal
/// blocks and similitude one.
pub fn is_in_u_r(n: &QMat) -> bool {
    if n.rows() != 6 {
        return false;
    }
    for i in 0..6 {
        if !n[(i, i)].is_one() {
            return false;
        }
        for j in 0..i {
            if !n[(i, j)].is_zero() {
                return false;
            }
        }
    }
    n[(1, 2)].is_zero() && n[(3, 4)].is_zero() && similitude_of(n).is_some_and(|nu| nu.is_one())
}

/// Argument of `chi(n) = psi(v_1 - D u_11 + u_22)`.
pub fn chi_argument(n: &QMat, d: i64) -> Result<Q, GroupError> {
    if !is_in_u_r(n) {
        return Err(GroupError::NotInUR);
    }
    Ok(&n[(0, 1)] - q_int(d) * &n[(1, 3)] + &n[(2, 4)])
}

pub fn chi_value(n: &QMat, d: i64, p: u64) -> Result<Phase, GroupError> {
    Ok(Phase::of(&chi_argument(n, d)?, p))
}

/// Siegel Levi element `diag(A, B)` with `A = nu S B^{-t} S^t`.
pub fn siegel_levi(b: &QMat, nu: &Q) -> GroupElement {
    let s = cyclic_s();
    let a = (&(&s * &b.inverse().expect("invertible").transpose()) * &s.transpose()).scale(nu);
    GroupElement { mat: QMat::block_diag(&[&a, b]), tag: GroupTag::GSp6, similitude: nu.clone() }
}

/// Levi element `diag(w, x, y, z)` of `R` with `x = w z y^{-t}`.
pub fn levi_r(w: &Q, y: &QMat, z: &Q) -> GroupElement {
    let nu = w * z;
    let x = y.inverse().expect("invertible").transpose().scale(&nu);
    let mat = QMat::block_diag(&[&QMat::diag(std::slice::from_ref(w)), &x, y, &QMat::diag(std::slice::from_ref(z))]);
    GroupElement { mat, tag: GroupTag::GSp6, similitude: nu }
}

/// Components `(w, y, z)` of an element of the Levi of `R`.
pub fn levi_r_parts(g: &QMat) -> Result<(Q, QMat, Q), GroupError> {
    let w = g[(0, 0)].clone();
    let z = g[(5, 5)].clone();
    let y = g.block(3, 3, 2, 2);
    let expect = levi_r(&w, &y, &z);
    if w.is_zero() || z.is_zero() || y.det().is_zero() || expect.mat != *g {
        return Err(GroupError::NotInLevi);
    }
    Ok((w, y, z))
}

pub fn diag_q(entries: &[i64], p: u64) -> QMat {
    QMat::diag(&entries.iter().map(|&e| p_pow(p, e)).collect::<Vec<_>>())
}

/// `tau = diag(1, 1, p, p, 1, p)`.
pub fn tau(p: u64) -> GroupElement {
    GroupElement { mat: diag_q(&[0, 0, 1, 1, 0, 1], p), tag: GroupTag::GSp6, similitude: p_pow(p, 1) }
}

/// The central element `p * 1_6`.
pub fn central_p(p: u64) -> GroupElement {
    GroupElement { mat: QMat::identity(6).scale(&p_pow(p, 1)), tag: GroupTag::GSp6, similitude: p_pow(p, 2) }
}

/// `T(u) = diag(1, u, p u^{-t}, p)`.
pub fn t_matrix(u: &QMat, p: u64) -> GroupElement {
    let pq = p_pow(p, 1);
    let x = u.inverse().expect("invertible").transpose().scale(&pq);
    let mat = QMat::block_diag(&[&QMat::identity(1), u, &x, &QMat::diag(std::slice::from_ref(&pq))]);
    GroupElement { mat, tag: GroupTag::GSp6, similitude: pq }
}

/// `T'(u) = diag(p, u, p u^{-t}, 1)`.
pub fn t_prime_matrix(u: &QMat, p: u64) -> GroupElement {
    let pq = p_pow(p, 1);
    let x = u.inverse().expect("invertible").transpose().scale(&pq);
    let mat = QMat::block_diag(&[&QMat::diag(std::slice::from_ref(&pq)), u, &x, &QMat::identity(1)]);
    GroupElement { mat, tag: GroupTag::GSp6, similitude: pq }
}

/// Diagonal element of `GSp6` with the given exponents of `p`.
pub fn diag_element(exps: &[i64; 6], p: u64) -> Result<GroupElement, GroupError> {
    GroupElement::symplectic(diag_q(exps, p))
}

/// Representatives `[[1,0],[0,p]]`, `[[p,a],[0,1]]` of `GL2(Z_p) diag(1,p) GL2(Z_p) / GL2(Z_p)`.
pub fn tp_representatives(p: u64) -> Vec<QMat> {
    let pi = p as i64;
    let mut out = vec![QMat::from_ints(&[&[1, 0], &[0, pi]])];
    for a in 0..pi {
        out.push(QMat::from_ints(&[&[pi, a], &[0, 1]]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::q_frac;

    #[test]
    fn forms_are_alternating() {
        for n in [4, 6] {
            let j = symplectic_form(n);
            assert_eq!(j.transpose(), j.scale(&q_int(-1)));
            assert_eq!(similitude_of(&j), Some(Q::one()));
        }
    }

    #[test]
    fn iota_is_symplectic() {
        let l = QuadElem::new(q_int(2), q_frac(1, 3));
        let g = build_iota(&q_frac(9, 2), &l, 5);
        assert_eq!(similitude_of(&g.mat), Some(q_frac(9, 2)));
        let tl = &g.mat.block(1, 1, 4, 4) * &sqrt_d_operator(5);
        assert_eq!(tl, &sqrt_d_operator(5) * &g.mat.block(1, 1, 4, 4));
    }

    #[test]
    fn distinguished_elements() {
        for g in [tau(3), central_p(3)] {
            assert_eq!(similitude_of(&g.mat), Some(g.similitude.clone()));
        }
        for u in tp_representatives(3) {
            let t = t_matrix(&u, 3);
            assert_eq!(similitude_of(&t.mat), Some(q_int(3)));
            let tp = t_prime_matrix(&u, 3);
            assert_eq!(similitude_of(&tp.mat), Some(q_int(3)));
        }
    }

    #[test]
    fn unipotent_shapes() {
        let (a, b, c, d, e, f, g, h) =
            (q_int(1), q_frac(1, 3), q_int(2), q_frac(2, 9), q_int(5), q_int(-1), q_frac(4, 3), q_int(7));
        let n = u_r_element([&a, &b], [&c, &d], [&e, &f, &g], &h);
        assert!(is_in_u_r(&n));
        assert_eq!(chi_argument(&n, 5).unwrap(), &a - q_int(5) * &e + &g);
        let z = QMat::from_rows(vec![
            vec![q_int(1), q_int(2), q_int(3)],
            vec![q_int(2), q_int(4), q_int(5)],
            vec![q_int(3), q_int(5), q_int(6)],
        ]);
        let up = u_p_element(&z);
        assert!(is_in_u_r(&up));
        // u_11 = Z[1][2]*... read off through S
        assert_eq!(up[(1, 3)], z[(1, 1)]);
        assert_eq!(up[(2, 4)], z[(2, 2)]);
    }

    #[test]
    fn siegel_levi_shape() {
        let b = QMat::from_ints(&[&[9, 2, 1], &[0, 3, 2], &[0, 0, 3]]);
        let g = siegel_levi(&b, &q_int(27));
        assert_eq!(similitude_of(&g.mat), Some(q_int(27)));
        assert_eq!(g.mat[(0, 0)], q_int(9));
    }

    #[test]
    fn embedding_checks_similitude() {
        let g1 = QMat::from_ints(&[&[3, 0], &[0, 1]]);
        let g2 = QMat::diag(&[q_int(3), q_int(3), q_int(1), q_int(1)]);
        let e = embed_gl2_gsp4(&g1, &g2).unwrap();
        assert_eq!(similitude_of(&e.mat), Some(q_int(3)));
        assert!(embed_gl2_gsp4(&QMat::identity(2), &g2).is_err());
    }
}
