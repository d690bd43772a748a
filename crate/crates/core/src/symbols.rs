//! Symbols `lambda(g)` of the (4 2) Fourier functional on spherical vectors and
//! their reduction to canonical form.
//!
//! Every `g` in the Siegel Levi `M_P` is rewritten as
//! `g = n_v * p^s * g0 * k` with `g0` in the Levi of `R`, `k` integral and
//! `n_v` in `N_V`.  Then `lambda(g) = psi(phase) * w^s * lambda(g0)`, and
//! `lambda(g0)` either vanishes (some integral unipotent element is moved to
//! a point where the character is nontrivial) or is recorded by the key
//! `(a, b, beta, c, v(nu))` of `g0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{
    central_p, chi_argument, iota_from_block, levi_r, n_v, tau, u_p_element, EtaleQuadratic,
    GroupElement, GroupError,
};
use crate::hnf::{hnf_local, is_unimodular, HnfError};
use crate::matrix::QMat;
use crate::padic::{p_pow, residue, valuation, PadicError, Phase, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("element is not in the Siegel Levi")]
    NotInSiegelLevi,
    #[error(transparent)]
    Hnf(#[from] HnfError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("symbol is not an iota symbol: {0}")]
    NotIota(String),
    #[error("symbol outside the support |t| <= |l| <= 1: {0}")]
    OutOfSupport(String),
    #[error("two labels share the key {0}")]
    LabelCollision(String),
}

/// Local data fixed for a whole computation.
#[derive(Clone, Debug)]
pub struct Setting {
    pub p: u64,
    pub d: i64,
    pub quad: EtaleQuadratic,
    pub precision: u32,
}

impl Setting {
    pub fn new(p: u64, d: i64, precision: u32) -> Result<Self, PadicError> {
        Ok(Setting { p, d, quad: EtaleQuadratic::new(p, d, precision)?, precision })
    }

    pub fn split(&self) -> bool {
        self.quad.split
    }

    pub fn epsilon(&self) -> i64 {
        self.quad.epsilon()
    }

    /// Residue of `-h` (for `pi_1`) or `h` (for `pi_2`) modulo `p^k`.
    pub fn beta(&self, k: u32, first: bool) -> Result<u64, PadicError> {
        let h = self.quad.h.as_ref().expect("split setting");
        let h = if first { h.neg() } else { h.clone() };
        Ok(h.residue(k)?.to_u64().expect("small residue"))
    }
}

/// Key of a canonical `g0 = diag(w, x, y, z)` with
/// `y = [[p^a, beta], [0, p^b]]`, `z = p^c`, `min(a, b, c, v(beta)) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolKey {
    pub a: u32,
    pub b: u32,
    pub beta: u64,
    pub c: u32,
    pub nu: i64,
}

impl fmt::Display for SymbolKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g0(a={},b={},beta={},c={},nu=p^{})", self.a, self.b, self.beta, self.c, self.nu)
    }
}

/// Class of `l` in `L* / O_L*`: `p^k` when inert, `pi_1^e1 pi_2^e2` when split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EllClass {
    Inert { k: i64 },
    Split { e1: i64, e2: i64 },
}

impl EllClass {
    pub fn one(split: bool) -> Self {
        if split {
            EllClass::Split { e1: 0, e2: 0 }
        } else {
            EllClass::Inert { k: 0 }
        }
    }

    /// Valuation of the norm, so `|l| = p^{-norm_val}`.
    pub fn norm_val(&self) -> i64 {
        match *self {
            EllClass::Inert { k } => 2 * k,
            EllClass::Split { e1, e2 } => e1 + e2,
        }
    }

    pub fn is_integral(&self) -> bool {
        match *self {
            EllClass::Inert { k } => k >= 0,
            EllClass::Split { e1, e2 } => e1 >= 0 && e2 >= 0,
        }
    }

    pub fn times_p(&self, n: i64) -> Self {
        match *self {
            EllClass::Inert { k } => EllClass::Inert { k: k + n },
            EllClass::Split { e1, e2 } => EllClass::Split { e1: e1 + n, e2: e2 + n },
        }
    }

    /// Multiply by `pi_i^n` (split only).
    pub fn times_pi(&self, i: usize, n: i64) -> Self {
        match *self {
            EllClass::Split { e1, e2 } if i == 1 => EllClass::Split { e1: e1 + n, e2 },
            EllClass::Split { e1, e2 } => EllClass::Split { e1, e2: e2 + n },
            EllClass::Inert { .. } => panic!("pi_i only exists in the split case"),
        }
    }

    /// All integral classes with `norm_val == n`.
    pub fn with_norm_val(split: bool, n: i64) -> Vec<EllClass> {
        if split {
            (0..=n).map(|e1| EllClass::Split { e1, e2: n - e1 }).collect()
        } else if n % 2 == 0 {
            vec![EllClass::Inert { k: n / 2 }]
        } else {
            vec![]
        }
    }
}

impl fmt::Display for EllClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EllClass::Inert { k } => write!(f, "p^{k}"),
            EllClass::Split { e1, e2 } => write!(f, "pi1^{e1} pi2^{e2}"),
        }
    }
}

/// `lambda(iota(p^r, l))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IotaSym {
    pub r: i64,
    pub ell: EllClass,
}

impl IotaSym {
    pub fn new(r: i64, ell: EllClass) -> Self {
        IotaSym { r, ell }
    }

    pub fn in_support(&self) -> bool {
        self.ell.is_integral() && self.ell.norm_val() <= self.r
    }
}

impl fmt::Display for IotaSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iota(p^{}, {})", self.r, self.ell)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymbolLabel {
    Iota(IotaSym),
    IotaTau(IotaSym),
}

impl fmt::Display for SymbolLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolLabel::Iota(s) => write!(f, "lambda({s})"),
            SymbolLabel::IotaTau(s) => write!(f, "lambda({s} tau)"),
        }
    }
}

/// Block `m_l` up to right `GL2(Z_p)`: `p^k 1` (inert) or
/// `p^min(e) [[p^k, beta], [0, 1]]` (split).
pub fn ell_block(setting: &Setting, ell: &EllClass) -> Result<QMat, PadicError> {
    let p = setting.p;
    match *ell {
        EllClass::Inert { k } => Ok(QMat::identity(2).scale(&p_pow(p, k))),
        EllClass::Split { e1, e2 } => {
            let e = e1.min(e2);
            let k = (e1 - e2).unsigned_abs() as u32;
            let beta = if k == 0 { 0 } else { setting.beta(k, e1 > e2)? };
            let y = QMat::from_rows(vec![
                vec![p_pow(p, k as i64), Q::from_integer(BigInt::from(beta))],
                vec![Q::zero(), p_pow(p, 0)],
            ]);
            Ok(y.scale(&p_pow(p, e)))
        }
    }
}

/// Representative of `iota(p^r, l) K`.
pub fn iota_rep(setting: &Setting, s: &IotaSym) -> Result<GroupElement, PadicError> {
    Ok(iota_from_block(&p_pow(setting.p, s.r), &ell_block(setting, &s.ell)?))
}

pub fn label_element(setting: &Setting, label: &SymbolLabel) -> Result<GroupElement, PadicError> {
    match label {
        SymbolLabel::Iota(s) => iota_rep(setting, s),
        SymbolLabel::IotaTau(s) => Ok(iota_rep(setting, s)?.mul(&tau(setting.p))),
    }
}

/// Integral unipotent generator whose conjugate has nontrivial character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// `n_v` with `v = e_i`.
    Nv(usize),
    /// `[[1, E_ij S], [0, 1]]` with `E_ij` the symmetric unit matrix.
    Up(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishCertificate {
    pub witness: Witness,
    pub exponent: Phase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub key: SymbolKey,
    /// power of the central element `p 1_6`
    pub w: i64,
    pub phase: Phase,
    /// `B_in * gamma` is the Hermite block of the input, `gamma` integral.
    pub gamma: QMat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Canon {
    Vanish(VanishCertificate),
    Symbol(Reduction),
}

/// Levi-of-`R` element for a key.
pub fn key_element(setting: &Setting, key: &SymbolKey) -> GroupElement {
    let p = setting.p;
    let y = QMat::from_rows(vec![
        vec![p_pow(p, key.a as i64), Q::from_integer(BigInt::from(key.beta))],
        vec![Q::zero(), p_pow(p, key.b as i64)],
    ]);
    let z = p_pow(p, key.c as i64);
    let w = p_pow(p, key.nu) / &z;
    levi_r(&w, &y, &z)
}

/// Unipotent vanishing test for `lambda(g0)`, `g0` in the Levi of `R`.
pub fn vanish_by_unipotent(setting: &Setting, g0: &GroupElement) -> Result<Option<VanishCertificate>, SymbolError> {
    let p = setting.p;
    let d = setting.d;
    let ginv = g0.mat.inverse().ok_or(GroupError::Singular)?;
    let conj = |n: &QMat| &(&g0.mat * n) * &ginv;
    let one = Q::from_integer(BigInt::from(1));
    let zero = Q::zero();
    for i in 0..2 {
        let n = if i == 0 { n_v(&one, &zero) } else { n_v(&zero, &one) };
        let ph = Phase::of(&chi_argument(&conj(&n), d)?, p);
        if !ph.is_zero() {
            return Ok(Some(VanishCertificate { witness: Witness::Nv(i), exponent: ph }));
        }
    }
    for i in 0..3 {
        for j in i..3 {
            let mut e = QMat::zeros(3, 3);
            e[(i, j)] = one.clone();
            e[(j, i)] = one.clone();
            let ph = Phase::of(&chi_argument(&conj(&u_p_element(&e)), d)?, p);
            if !ph.is_zero() {
                return Ok(Some(VanishCertificate { witness: Witness::Up(i, j), exponent: ph }));
            }
        }
    }
    Ok(None)
}

fn is_siegel_levi(g: &QMat) -> bool {
    g.rows() == 6 && g.block(0, 3, 3, 3).is_zero() && g.block(3, 0, 3, 3).is_zero()
}

/// Canonical form of `lambda(g)` for `g` in the Siegel Levi.
pub fn canonicalize(setting: &Setting, g: &GroupElement) -> Result<Canon, SymbolError> {
    if !is_siegel_levi(&g.mat) {
        return Err(SymbolError::NotInSiegelLevi);
    }
    canonicalize_block(setting, &g.mat.block(3, 3, 3, 3), &g.similitude)
}

/// Canonical form of `lambda(diag(nu S B^{-t} S^t, B))`.
pub fn canonicalize_block(setting: &Setting, b: &QMat, nu: &Q) -> Result<Canon, SymbolError> {
    let p = setting.p;
    let s = b.min_valuation(p).ok_or(HnfError::Singular)?;
    let b1 = b.scale(&p_pow(p, -s));
    let hf = hnf_local(&b1, p)?;
    let h = &hf.h;
    let (a, bb, c) = (hf.exponents[0], hf.exponents[1], hf.exponents[2]);
    let beta = h[(0, 1)].clone();
    let gamma1 = h[(0, 2)].clone();
    let phase = Phase::of(&(-gamma1 / p_pow(p, c as i64)), p);
    let vb = valuation(&beta, p).map_or(i64::MAX, |v| v);
    let s2 = (a as i64).min(bb as i64).min(c as i64).min(vb);
    let nu1 = nu * p_pow(p, -2 * (s + s2));
    let vnu = valuation(&nu1, p).ok_or(HnfError::Singular)?;
    let beta2 = &beta * p_pow(p, -s2);
    let key = SymbolKey {
        a: (a as i64 - s2) as u32,
        b: (bb as i64 - s2) as u32,
        beta: residue(&beta2, p, 64).expect("integral").to_u64().expect("small"),
        c: (c as i64 - s2) as u32,
        nu: vnu,
    };
    // nu may differ from p^vnu by a unit; that unit is absorbed by K
    let g0 = key_element(setting, &key);
    if let Some(cert) = vanish_by_unipotent(setting, &g0)? {
        return Ok(Canon::Vanish(cert));
    }
    Ok(Canon::Symbol(Reduction { key, w: s + s2, phase, gamma: hf.gamma }))
}

/// Check a reduction: `B gamma` equals the Hermite block built from the key,
/// and `gamma` is unimodular.
pub fn audit_reduction(setting: &Setting, b: &QMat, red: &Reduction) -> bool {
    let p = setting.p;
    if !is_unimodular(&red.gamma, p) {
        return false;
    }
    let h = b * &red.gamma;
    let s = b.min_valuation(p).unwrap();
    let h = h.scale(&p_pow(p, -s));
    let hf = match hnf_local(&h, p) {
        Ok(x) => x,
        Err(_) => return false,
    };
    hf.h == h && hf.gamma == QMat::identity(3)
}

/// Map from canonical keys to the printed labels of iota symbols.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    by_key: BTreeMap<SymbolKey, SymbolLabel>,
    by_label: BTreeMap<SymbolLabel, SymbolKey>,
}

impl SymbolTable {
    /// Registers `lambda(iota(p^r, l))` and `lambda(iota(p^r, l) tau)` for
    /// `r` in `[-2, rmax]` and integral `l` with norm valuation at most
    /// `rmax + 2`, skipping vanishing ones.
    pub fn build(setting: &Setting, rmax: i64) -> Result<Self, SymbolError> {
        let mut t = SymbolTable::default();
        let split = setting.split();
        for r in -2..=rmax + 2 {
            for n in 0..=rmax + 2 {
                for ell in EllClass::with_norm_val(split, n) {
                    let s = IotaSym::new(r, ell);
                    t.try_register(setting, SymbolLabel::Iota(s))?;
                    if ell == EllClass::one(split) {
                        t.try_register(setting, SymbolLabel::IotaTau(s))?;
                    }
                }
            }
        }
        Ok(t)
    }

    fn try_register(&mut self, setting: &Setting, label: SymbolLabel) -> Result<(), SymbolError> {
        let g = label_element(setting, &label)?;
        if let Canon::Symbol(red) = canonicalize(setting, &g)? {
            if red.w != 0 || !red.phase.is_zero() {
                return Ok(());
            }
            if let Some(old) = self.by_key.get(&red.key) {
                if *old != label {
                    return Err(SymbolError::LabelCollision(format!("{} / {} / {}", red.key, old, label)));
                }
            }
            self.by_key.insert(red.key, label);
            self.by_label.insert(label, red.key);
        }
        Ok(())
    }

    pub fn label(&self, key: &SymbolKey) -> Option<&SymbolLabel> {
        self.by_key.get(key)
    }

    pub fn key(&self, label: &SymbolLabel) -> Option<&SymbolKey> {
        self.by_label.get(label)
    }

    pub fn iota(&self, key: &SymbolKey) -> Option<IotaSym> {
        match self.by_key.get(key) {
            Some(SymbolLabel::Iota(s)) => Some(*s),
            _ => None,
        }
    }

    pub fn describe(&self, key: &SymbolKey) -> String {
        match self.label(key) {
            Some(l) => l.to_string(),
            None => format!("lambda({key})"),
        }
    }

    pub fn len(&self) -> usize {
        self.by_key.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_key.is_empty()
    }
}

/// `lambda(iota(p^r,l) * p 1_6) = w lambda(iota(p^r, l))`: the central
/// element only shifts the `w` exponent.
pub fn central_shift(setting: &Setting, g: &GroupElement) -> GroupElement {
    g.mul(&central_p(setting.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::t_matrix;
    use crate::padic::q_int;

    fn inert() -> Setting {
        Setting::new(3, 5, 10).unwrap()
    }

    fn split() -> Setting {
        Setting::new(3, 13, 10).unwrap()
    }

    #[test]
    fn identity_is_trivial_symbol() {
        let st = inert();
        let g = iota_rep(&st, &IotaSym::new(0, EllClass::one(false))).unwrap();
        match canonicalize(&st, &g).unwrap() {
            Canon::Symbol(r) => {
                assert_eq!(r.key, SymbolKey { a: 0, b: 0, beta: 0, c: 0, nu: 0 });
                assert_eq!(r.w, 0);
                assert!(r.phase.is_zero());
            }
            Canon::Vanish(_) => panic!("identity must not vanish"),
        }
    }

    #[test]
    fn support_of_iota() {
        for st in [inert(), split()] {
            let sp = st.split();
            for r in -1..4 {
                for n in 0..5 {
                    for ell in EllClass::with_norm_val(sp, n) {
                        let s = IotaSym::new(r, ell);
                        let g = iota_rep(&st, &s).unwrap();
                        let nonvan = matches!(canonicalize(&st, &g).unwrap(), Canon::Symbol(_));
                        assert_eq!(nonvan, s.in_support(), "{s}");
                    }
                }
            }
        }
    }

    #[test]
    fn tau_symbol() {
        let st = inert();
        assert!(matches!(canonicalize(&st, &tau(3)).unwrap(), Canon::Vanish(_)));
        let g = iota_rep(&st, &IotaSym::new(1, EllClass::one(false))).unwrap().mul(&tau(3));
        assert!(matches!(canonicalize(&st, &g).unwrap(), Canon::Symbol(_)));
    }

    #[test]
    fn central_power_is_extracted() {
        let st = split();
        let g = iota_rep(&st, &IotaSym::new(2, EllClass::Split { e1: 1, e2: 0 })).unwrap();
        let Canon::Symbol(a) = canonicalize(&st, &g).unwrap() else { panic!() };
        let Canon::Symbol(b) = canonicalize(&st, &central_shift(&st, &g)).unwrap() else { panic!() };
        assert_eq!(a.key, b.key);
        assert_eq!(b.w, a.w + 1);
    }

    #[test]
    fn audit_recovers_k_element() {
        let st = split();
        let g = iota_rep(&st, &IotaSym::new(3, EllClass::Split { e1: 0, e2: 2 })).unwrap();
        let g = g.mul(&t_matrix(&QMat::from_ints(&[&[3, 2], &[0, 1]]), 3));
        let b = g.mat.block(3, 3, 3, 3);
        if let Canon::Symbol(r) = canonicalize(&st, &g).unwrap() {
            assert!(audit_reduction(&st, &b, &r));
        }
        let _ = q_int(0);
    }

    #[test]
    fn tables_have_no_collisions() {
        for st in [inert(), split()] {
            let t = SymbolTable::build(&st, 4).unwrap();
            assert!(!t.is_empty());
        }
    }
}
