//! Arithmetic local to a fixed odd prime `p`.
//!
//! Exact rationals carry their p-adic valuation; genuinely p-adic quantities
//! (the square root of `D` in the split case) live in [`TruncatedPadic`],
//! which tracks how many digits are known and refuses to guess beyond that.
//! Additive character sums are evaluated exactly through
//! [`CyclotomicCounter`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("precision exhausted: need {needed} digits, have {available}")]
    PrecisionExhausted { needed: i64, available: i64 },
    #[error("{d} is not a square modulo {p}")]
    NotASquare { d: i64, p: u64 },
    #[error("p = {p} must be odd and coprime to D = {d}")]
    BadPrime { p: u64, d: i64 },
    #[error("exponent {value} does not lie in p^-{k} Z_p")]
    MixedConductor { value: String, k: u32 },
    #[error("value is zero to the available precision")]
    ZeroToPrecision,
    #[error("not a p-adic unit")]
    NotAUnit,
    #[error("character sum is not rational")]
    NotRational,
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Valuation of a nonzero integer; `None` for zero.
pub fn int_valuation(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Valuation of a rational; `None` stands for +infinity.
pub fn valuation(x: &Q, p: u64) -> Option<i64> {
    let vn = int_valuation(x.numer(), p)?;
    let vd = int_valuation(x.denom(), p).unwrap_or(0);
    Some(vn - vd)
}

pub fn is_integral(x: &Q, p: u64) -> bool {
    int_valuation(x.denom(), p).is_none_or(|v| v == 0)
}

/// `p^e` as a rational, any sign of `e`.
pub fn p_pow(p: u64, e: i64) -> Q {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Q::from_integer(base)
    } else {
        Q::new(BigInt::one(), base)
    }
}

pub fn p_pow_int(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// Normalized absolute value `p^{-v(x)}`, zero for zero.
pub fn abs_p(x: &Q, p: u64) -> Q {
    match valuation(x, p) {
        None => Q::zero(),
        Some(v) => p_pow(p, -v),
    }
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Residue of a p-integral rational modulo `p^k`, in `[0, p^k)`.
pub fn residue(x: &Q, p: u64, k: u32) -> Option<BigInt> {
    if !is_integral(x, p) {
        return None;
    }
    let m = p_pow_int(p, k);
    if k == 0 {
        return Some(BigInt::zero());
    }
    let inv = mod_inverse(&x.denom().mod_floor(&m), &m)?;
    Some((x.numer() * inv).mod_floor(&m))
}

/// Class of a rational in `Q_p / Z_p`, written `j / p^k` with `p` not dividing
/// `j` unless the class is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Phase {
    pub k: u32,
    pub j: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { k: 0, j: 0 };

    pub fn of(x: &Q, p: u64) -> Phase {
        let k = match valuation(x, p) {
            None => return Phase::ZERO,
            Some(v) if v >= 0 => return Phase::ZERO,
            Some(v) => (-v) as u32,
        };
        let scaled = x * p_pow(p, k as i64);
        let j = residue(&scaled, p, k).expect("scaled value is integral");
        Phase { k, j: j.to_u64().expect("phase index fits in u64") }
    }

    pub fn is_zero(&self) -> bool {
        self.j == 0
    }

    pub fn to_rational(&self, p: u64) -> Q {
        Q::new(BigInt::from(self.j), p_pow_int(p, self.k))
    }

    pub fn add(&self, other: &Phase, p: u64) -> Phase {
        Phase::of(&(self.to_rational(p) + other.to_rational(p)), p)
    }

    pub fn neg(&self, p: u64) -> Phase {
        Phase::of(&-self.to_rational(p), p)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/p^{}", self.j, self.k)
        }
    }
}

/// A rational together with the prime it is measured at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalScalar {
    pub value: Q,
    pub p: u64,
}

impl LocalScalar {
    pub fn new(value: Q, p: u64) -> Self {
        LocalScalar { value, p }
    }

    pub fn valuation(&self) -> Option<i64> {
        valuation(&self.value, self.p)
    }

    pub fn abs(&self) -> Q {
        abs_p(&self.value, self.p)
    }

    pub fn is_integral(&self) -> bool {
        is_integral(&self.value, self.p)
    }
}

/// `p^v * u` with the unit `u` known modulo `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPadic {
    p: u64,
    valuation: i64,
    unit: BigInt,
    precision: u32,
    zero: bool,
}

impl TruncatedPadic {
    pub fn zero(p: u64, precision: u32) -> Self {
        TruncatedPadic { p, valuation: 0, unit: BigInt::zero(), precision, zero: true }
    }

    pub fn from_rational(x: &Q, p: u64, precision: u32) -> Self {
        match valuation(x, p) {
            None => Self::zero(p, precision),
            Some(v) => {
                let u = x * p_pow(p, -v);
                let unit = residue(&u, p, precision).expect("unit part is integral");
                TruncatedPadic { p, valuation: v, unit, precision, zero: false }
            }
        }
    }

    pub fn from_int(n: i64, p: u64, precision: u32) -> Self {
        Self::from_rational(&q_int(n), p, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.zero
    }

    pub fn valuation(&self) -> Result<i64, PadicError> {
        if self.zero {
            Err(PadicError::ZeroToPrecision)
        } else {
            Ok(self.valuation)
        }
    }

    fn modulus(&self) -> BigInt {
        p_pow_int(self.p, self.precision)
    }

    /// Residue modulo `p^k` of an integral element.
    pub fn residue(&self, k: u32) -> Result<BigInt, PadicError> {
        let m = p_pow_int(self.p, k);
        if self.zero {
            // known only to vanish modulo p^precision
            if k <= self.precision {
                return Ok(BigInt::zero());
            }
            return Err(PadicError::PrecisionExhausted { needed: k as i64, available: self.precision as i64 });
        }
        if self.valuation < 0 {
            return Err(PadicError::NotAUnit);
        }
        let v = self.valuation;
        if v >= k as i64 {
            return Ok(BigInt::zero());
        }
        let known = v + self.precision as i64;
        if known < k as i64 {
            return Err(PadicError::PrecisionExhausted { needed: k as i64, available: known });
        }
        Ok((&self.unit * p_pow_int(self.p, v as u32)).mod_floor(&m))
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        if !out.zero {
            out.unit = (-&out.unit).mod_floor(&self.modulus());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.precision.min(other.precision);
        if self.zero || other.zero {
            return Self::zero(self.p, prec);
        }
        let m = p_pow_int(self.p, prec);
        TruncatedPadic {
            p: self.p,
            valuation: self.valuation + other.valuation,
            unit: (&self.unit * &other.unit).mod_floor(&m),
            precision: prec,
            zero: false,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.zero {
            return other.clone();
        }
        if other.zero {
            return self.clone();
        }
        let (lo, hi) = if self.valuation <= other.valuation { (self, other) } else { (other, self) };
        let shift = (hi.valuation - lo.valuation) as u32;
        let prec = lo.precision.min(hi.precision + shift);
        let m = p_pow_int(self.p, prec);
        let s = (&lo.unit + &hi.unit * p_pow_int(self.p, shift)).mod_floor(&m);
        if s.is_zero() {
            return Self::zero(self.p, prec);
        }
        let e = int_valuation(&s, self.p).unwrap() as u32;
        let prec2 = prec - e;
        let unit = (s / p_pow_int(self.p, e)).mod_floor(&p_pow_int(self.p, prec2));
        TruncatedPadic { p: self.p, valuation: lo.valuation + e as i64, unit, precision: prec2, zero: false }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        if self.zero {
            return Err(PadicError::ZeroToPrecision);
        }
        let m = self.modulus();
        let unit = mod_inverse(&self.unit, &m).ok_or(PadicError::NotAUnit)?;
        Ok(TruncatedPadic { p: self.p, valuation: -self.valuation, unit, precision: self.precision, zero: false })
    }

    pub fn mul_rational(&self, x: &Q) -> Self {
        self.mul(&Self::from_rational(x, self.p, self.precision))
    }
}

impl fmt::Display for TruncatedPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            write!(f, "O(p^{})", self.precision)
        } else {
            write!(f, "p^{} * ({} + O(p^{}))", self.valuation, self.unit, self.precision)
        }
    }
}

/// Legendre symbol `(a/p)` for odd `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let a = BigInt::from(a).mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let e = (&pb - 1u32) / 2u32;
    if a.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

/// Square root of `D` in `Z_p` to `n` digits, choosing the branch whose
/// residue lies in `[1, (p-1)/2]`.
pub fn hensel_sqrt(d: i64, p: u64, n: u32) -> Result<TruncatedPadic, PadicError> {
    if p.is_multiple_of(2) || d % (p as i64) == 0 {
        return Err(PadicError::BadPrime { p, d });
    }
    if legendre(d, p) != 1 {
        return Err(PadicError::NotASquare { d, p });
    }
    let dd = BigInt::from(d);
    let pb = BigInt::from(p);
    let mut r = (1..=(p - 1) / 2)
        .map(BigInt::from)
        .find(|r| (r * r - &dd).mod_floor(&pb).is_zero())
        .expect("legendre symbol guarantees a root");
    for k in 2..=n {
        let m = p_pow_int(p, k);
        let two_r_inv = mod_inverse(&(BigInt::from(2) * &r).mod_floor(&m), &m).unwrap();
        r = (&r - (&r * &r - &dd) * two_r_inv).mod_floor(&m);
    }
    Ok(TruncatedPadic { p, valuation: 0, unit: r, precision: n, zero: false })
}

/// Formal `Q`-linear combination of `p^k`-th roots of unity, indexed by the
/// exponent `j` of `exp(2 pi i j / p^k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicCounter {
    p: u64,
    k: u32,
    coeffs: BTreeMap<u64, Q>,
}

impl CyclotomicCounter {
    pub fn new(p: u64, k: u32) -> Self {
        CyclotomicCounter { p, k, coeffs: BTreeMap::new() }
    }

    pub fn conductor(&self) -> u32 {
        self.k
    }

    fn lift_to(&mut self, k: u32) {
        if k <= self.k {
            return;
        }
        let f = self.p.pow(k - self.k);
        self.coeffs = std::mem::take(&mut self.coeffs).into_iter().map(|(j, c)| (j * f, c)).collect();
        self.k = k;
    }

    pub fn add_phase(&mut self, phase: Phase, coeff: &Q) {
        if coeff.is_zero() {
            return;
        }
        self.lift_to(phase.k);
        let j = phase.j * self.p.pow(self.k - phase.k);
        let e = self.coeffs.entry(j).or_insert_with(Q::zero);
        *e += coeff;
    }

    pub fn add_counter(&mut self, other: &CyclotomicCounter) {
        let k = self.k.max(other.k);
        self.lift_to(k);
        let f = self.p.pow(k - other.k);
        for (j, c) in &other.coeffs {
            *self.coeffs.entry(j * f).or_insert_with(Q::zero) += c;
        }
    }

    /// Coordinates in the basis of roots whose top base-p digit is not `p-1`.
    pub fn canonical(&self) -> BTreeMap<u64, Q> {
        let mut c = self.coeffs.clone();
        if self.k > 0 {
            let step = self.p.pow(self.k - 1);
            let top: Vec<(u64, Q)> = c
                .iter()
                .filter(|(j, v)| **j / step == self.p - 1 && !v.is_zero())
                .map(|(j, v)| (*j, v.clone()))
                .collect();
            for (j, v) in top {
                let j0 = j % step;
                for i in 0..self.p {
                    *c.entry(j0 + i * step).or_insert_with(Q::zero) -= &v;
                }
            }
        }
        c.retain(|_, v| !v.is_zero());
        c
    }

    pub fn to_rational(&self) -> Option<Q> {
        let c = self.canonical();
        match c.len() {
            0 => Some(Q::zero()),
            1 => c.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }
}

/// Exact value of `sum_{x in domain} psi(x)`, all `x` in `p^-k Z_p`.
pub fn character_sum(domain: &[Q], p: u64, k: u32) -> Result<CyclotomicCounter, PadicError> {
    let mut out = CyclotomicCounter::new(p, k);
    let one = Q::one();
    for x in domain {
        let ph = Phase::of(x, p);
        if ph.k > k {
            return Err(PadicError::MixedConductor { value: x.to_string(), k });
        }
        out.add_phase(ph, &one);
    }
    Ok(out)
}

/// Ground field of a Fourier indicator integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierField {
    Rationals,
    /// `Q_p(sqrt D)` or `Q_p x Q_p`, with integers `Z_p[sqrt D]` and
    /// character `x + y sqrt D -> psi(x)`.
    Quadratic { d: i64 },
}

/// Closed form of `int_M psi(v z) [psi(-z)] |p|^n 1(p^n z in O) dz`:
/// the indicator of `v` (or `v - 1`) lying in `p^n O`.
/// `v` is `x + y sqrt D`; `y` must be zero over `Q_p`.
pub fn fourier_indicator(v: (&Q, &Q), n: i64, twisted: bool, field: FourierField, p: u64) -> Q {
    let x = if twisted { v.0 - Q::one() } else { v.0.clone() };
    let coords = match field {
        FourierField::Rationals => vec![x],
        FourierField::Quadratic { .. } => vec![x, v.1.clone()],
    };
    let ok = coords.iter().all(|c| valuation(c, p).is_none_or(|e| e >= n));
    if ok {
        Q::one()
    } else {
        Q::zero()
    }
}

/// The same integral as [`fourier_indicator`], evaluated as an exact average
/// of `psi` over a finite grid.
pub fn fourier_indicator_bruteforce(
    v: (&Q, &Q),
    n: i64,
    twisted: bool,
    field: FourierField,
    p: u64,
) -> Result<Q, PadicError> {
    let a = if twisted { v.0 - Q::one() } else { v.0.clone() };
    let b = v.1.clone();
    let dim = match field {
        FourierField::Rationals => 1,
        FourierField::Quadratic { .. } => 2,
    };
    let d = match field {
        FourierField::Quadratic { d } => d,
        FourierField::Rationals => 0,
    };
    let mut minv = valuation(&a, p);
    if dim == 2 {
        minv = match (minv, valuation(&b, p)) {
            (None, x) => x,
            (x, None) => x,
            (Some(x), Some(y)) => Some(x.min(y)),
        };
    }
    let kk = minv.map_or(0, |m| (-m).max(0)) as u32;
    let nn = n.max(0) as u32;
    // z = (i + j sqrt D) p^-n with i, j mod p^(n+K); the phase of the x-part
    // of v z is (A i + B j) / p^(n+K), and the grid sum splits over i and j
    let k = nn + kk;
    let lift = p_pow(p, kk as i64);
    let res = |x: &Q| residue(&(x * &lift), p, k).expect("p-integral after scaling");
    let mut avg = mean_character(&res(&a), p, k)?;
    if dim == 2 {
        avg *= mean_character(&res(&(q_int(d) * &b)), p, k)?;
    }
    Ok(avg)
}

/// `p^-k sum_{i mod p^k} psi(c i / p^k)`, summed term by term.
fn mean_character(c: &BigInt, p: u64, k: u32) -> Result<Q, PadicError> {
    let pk = p_pow_int(p, k).to_u64().expect("grid fits");
    let c = (c % BigInt::from(pk)).to_u64().expect("reduced residue");
    let mut hist = vec![0u64; pk as usize];
    for i in 0..pk {
        hist[((c as u128 * i as u128) % pk as u128) as usize] += 1;
    }
    let mut counter = CyclotomicCounter::new(p, k);
    let denom = Q::from_integer(BigInt::from(pk));
    for (r, &m) in hist.iter().enumerate() {
        if m > 0 {
            counter.add_phase(Phase::of(&(q_int(r as i64) / &denom), p), &q_int(m as i64));
        }
    }
    let s = counter.to_rational().ok_or(PadicError::NotRational)?;
    Ok(s / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&q_frac(18, 5), 3), Some(2));
        assert_eq!(valuation(&q_frac(5, 27), 3), Some(-3));
        assert_eq!(valuation(&Q::zero(), 3), None);
        assert_eq!(abs_p(&q_int(9), 3), q_frac(1, 9));
    }

    #[test]
    fn hensel_examples() {
        let h = hensel_sqrt(13, 3, 2).unwrap();
        assert_eq!(h.residue(2).unwrap(), BigInt::from(7));
        assert_eq!(hensel_sqrt(5, 3, 4), Err(PadicError::NotASquare { d: 5, p: 3 }));
        let h = hensel_sqrt(11, 5, 8).unwrap();
        let sq = h.mul(&h).sub(&TruncatedPadic::from_int(11, 5, 8));
        assert!(sq.is_zero_to_precision());
        assert_eq!(h.residue(1).unwrap(), BigInt::from(1));
    }

    #[test]
    fn precision_is_enforced() {
        let h = hensel_sqrt(13, 3, 3).unwrap();
        assert!(matches!(h.residue(4), Err(PadicError::PrecisionExhausted { .. })));
        let z = h.sub(&h);
        assert_eq!(z.valuation(), Err(PadicError::ZeroToPrecision));
    }

    #[test]
    fn phases() {
        let ph = Phase::of(&q_frac(7, 9), 3);
        assert_eq!(ph, Phase { k: 2, j: 7 });
        assert_eq!(Phase::of(&q_frac(3, 9), 3), Phase { k: 1, j: 1 });
        assert_eq!(Phase::of(&q_frac(-1, 3), 3), Phase { k: 1, j: 2 });
        assert!(Phase::of(&q_frac(10, 7), 3).is_zero());
        // 1/2 = 2 (mod 3), so 1/(2*3) has class 2/3
        assert_eq!(Phase::of(&q_frac(1, 6), 3), Phase { k: 1, j: 2 });
    }

    #[test]
    fn full_character_sums_vanish() {
        for k in 1..4u32 {
            let dom: Vec<Q> = (0..3i64.pow(k)).map(|j| q_frac(j, 3i64.pow(k))).collect();
            assert_eq!(character_sum(&dom, 3, k).unwrap().to_rational(), Some(Q::zero()));
        }
        // a single primitive root is irrational
        assert_eq!(character_sum(&[q_frac(1, 5)], 5, 1).unwrap().to_rational(), None);
        assert!(character_sum(&[q_frac(1, 9)], 3, 1).is_err());
    }

    #[test]
    fn gauss_sum_squares() {
        // sum_x psi(x^2 / p) = sqrt(+-p) is irrational, its norm-type combination is not needed;
        // sum over nonzero x of psi(x/p) = -1
        let dom: Vec<Q> = (1..5).map(|j| q_frac(j, 5)).collect();
        assert_eq!(character_sum(&dom, 5, 1).unwrap().to_rational(), Some(q_int(-1)));
        let dom: Vec<Q> = (0..5).map(|x| q_frac(x * x, 5)).collect();
        assert_eq!(character_sum(&dom, 5, 1).unwrap().to_rational(), None);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(13, 3), 1);
        assert_eq!(legendre(5, 3), -1);
        assert_eq!(legendre(2, 5), -1);
        assert_eq!(legendre(11, 5), 1);
    }
}
