//! The lattices `U_m` attached to Hermite blocks
//! `m = [[p^a, beta, gamma1], [0, p^b, gamma2], [0, 0, p^c]]`, admissibility of
//! `m` (triviality of the character on `U_m`) and the constant `B(m)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::groups::{siegel_levi, GroupElement};
use crate::hnf::modinv_i128;
use crate::matrix::QMat;
use crate::padic::{is_integral, p_pow, q_int, CyclotomicCounter, PadicError, Phase, Q};
use crate::symbols::Setting;

pub fn pw(p: u64, e: u32) -> i128 {
    (p as i128).pow(e)
}

fn val_i128(x: i128, p: u64, cap: u32) -> u32 {
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

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RepresentativeM {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub beta: u64,
    pub gamma1: u64,
    pub gamma2: u64,
}

impl RepresentativeM {
    pub fn matrix(&self, p: u64) -> QMat {
        let qi = |x: u64| Q::from_integer(BigInt::from(x));
        QMat::from_rows(vec![
            vec![p_pow(p, self.a as i64), qi(self.beta), qi(self.gamma1)],
            vec![Q::zero(), p_pow(p, self.b as i64), qi(self.gamma2)],
            vec![Q::zero(), Q::zero(), p_pow(p, self.c as i64)],
        ])
    }

    /// Hermite-reduced entries.
    pub fn is_reduced(&self, p: u64) -> bool {
        let (pa, pb) = (pw(p, self.a), pw(p, self.b));
        (self.beta as i128) < pa && (self.gamma1 as i128) < pa && (self.gamma2 as i128) < pb
    }

    /// Membership in the set `M`: reduced, `c <= a` and `p^c | beta`.
    pub fn in_bold_m(&self, p: u64) -> bool {
        self.is_reduced(p) && self.c <= self.a && (self.beta as i128) % pw(p, self.c) == 0
    }
}

/// All `m` in `M` with `a, b, c <= amax`.
pub fn enumerate_m(p: u64, amax: u32) -> Vec<RepresentativeM> {
    let mut out = Vec::new();
    for a in 0..=amax {
        for b in 0..=amax {
            for c in 0..=a {
                let step = pw(p, c) as u64;
                for beta in (0..pw(p, a) as u64).step_by(step as usize) {
                    for gamma1 in 0..pw(p, a) as u64 {
                        for gamma2 in 0..pw(p, b) as u64 {
                            out.push(RepresentativeM { a, b, c, beta, gamma1, gamma2 });
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibleRecord {
    pub m: RepresentativeM,
    pub admissible: bool,
    /// `B(m)`; zero when `m` is not admissible.
    #[serde(serialize_with = "ser_q")]
    pub b_value: Q,
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// `u in U_m`: `u y` integral, and the row `gamma^t u y` lies in
/// `p^c Z_p x p^min(b,c) Z_p`.
pub fn um_contains(m: &RepresentativeM, u: [&Q; 3], p: u64) -> bool {
    let qi = |x: u64| Q::from_integer(BigInt::from(x));
    let (pa, pb) = (p_pow(p, m.a as i64), p_pow(p, m.b as i64));
    let beta = qi(m.beta);
    let uy = [
        [u[0] * &pa, u[0] * &beta + u[1] * &pb],
        [u[1] * &pa, u[1] * &beta + u[2] * &pb],
    ];
    if !uy.iter().flatten().all(|x| is_integral(x, p)) {
        return false;
    }
    let (g1, g2) = (qi(m.gamma1), qi(m.gamma2));
    let r1 = &g1 * &uy[0][0] + &g2 * &uy[1][0];
    let r2 = &g1 * &uy[0][1] + &g2 * &uy[1][1];
    is_integral(&(r1 * p_pow(p, -(m.c as i64))), p)
        && is_integral(&(r2 * p_pow(p, -(m.b.min(m.c) as i64))), p)
}

fn b_from_measure(m: &RepresentativeM, meas: Q, p: u64) -> Q {
    p_pow(p, (2 * m.c + m.b.min(m.c)) as i64) * meas
}

/// Exact computation of `U_m`: with `X = p^(a+b) u`, each defining
/// congruence cuts the current lattice of `X` down to a sublattice.
pub fn admissible_bruteforce(setting: &Setting, m: &RepresentativeM) -> AdmissibleRecord {
    let p = setting.p;
    let (a, b, c) = (m.a, m.b, m.c);
    let e = a + b;
    let k = e + c;
    let pk = pw(p, k);
    let (beta, g1, g2) = (m.beta as i128, m.gamma1 as i128, m.gamma2 as i128);
    let (pa, pb) = (pw(p, a), pw(p, b));
    let conds: [([i128; 3], u32); 6] = [
        ([pa, 0, 0], e),
        ([beta, pb, 0], e),
        ([0, pa, 0], e),
        ([0, beta, pb], e),
        ([pa * g1, pa * g2, 0], e + c),
        ([beta * g1, pb * g1 + beta * g2, pb * g2], e + b.min(c)),
    ];
    let mut basis = [[1i128, 0, 0], [0, 1, 0], [0, 0, 1]];
    let mut index = 0u32;
    let md = |x: i128| x.rem_euclid(pk);
    for (coef, mm) in conds.iter() {
        let ell: Vec<i128> = basis.iter().map(|v| md(coef[0] * v[0] + coef[1] * v[1] + coef[2] * v[2])).collect();
        let vals: Vec<u32> = ell.iter().map(|&x| val_i128(x, p, k)).collect();
        let (piv, v) = vals.iter().enumerate().map(|(i, &v)| (i, v)).min_by_key(|&(i, v)| (v, i)).unwrap();
        if v >= *mm {
            continue;
        }
        let pv = pw(p, v);
        let rest = pw(p, k - v);
        let unit_inv = modinv_i128((ell[piv] / pv).rem_euclid(rest), rest);
        for j in 0..3 {
            if j == piv || ell[j] == 0 {
                continue;
            }
            let f = ((ell[j] / pv) % rest * unit_inv).rem_euclid(rest);
            let bp = basis[piv];
            for t in 0..3 {
                basis[j][t] = md(basis[j][t] - md(f * bp[t]));
            }
        }
        let s = pw(p, mm - v);
        for t in 0..3 {
            basis[piv][t] = md(basis[piv][t] * s);
        }
        index += mm - v;
    }
    let pe = pw(p, e);
    let dd = setting.d as i128;
    let admissible = basis.iter().all(|v| md(-dd * v[0] + v[2]) % pe == 0);
    let meas = p_pow(p, 3 * e as i64 - index as i64);
    let b_value = if admissible { b_from_measure(m, meas, p) } else { Q::zero() };
    AdmissibleRecord { m: *m, admissible, b_value }
}

/// Literal enumeration of `U_m / p^c Sym2(Z_p)` on the grid
/// `u11, u12 in p^-a Z / p^c Z`, `u22 in p^-(a+b) Z / p^c Z`.
pub fn admissible_grid(setting: &Setting, m: &RepresentativeM) -> AdmissibleRecord {
    let p = setting.p;
    let (a, b, c) = (m.a as i64, m.b as i64, m.c as i64);
    let n1 = pw(p, (a + c) as u32);
    let n2 = pw(p, (a + b + c) as u32);
    let s1 = p_pow(p, -a);
    let s2 = p_pow(p, -(a + b));
    let mut count = 0i128;
    let mut admissible = true;
    let dq = q_int(setting.d);
    for i in 0..n1 {
        let u11 = &s1 * q_int(i as i64);
        for j in 0..n1 {
            let u12 = &s1 * q_int(j as i64);
            for l in 0..n2 {
                let u22 = &s2 * q_int(l as i64);
                if um_contains(m, [&u11, &u12, &u22], p) {
                    count += 1;
                    if !Phase::of(&(-(&dq * &u11) + &u22), p).is_zero() {
                        admissible = false;
                    }
                }
            }
        }
    }
    let meas = q_int(count as i64) * p_pow(p, -3 * c);
    let b_value = if admissible { b_from_measure(m, meas, p) } else { Q::zero() };
    AdmissibleRecord { m: *m, admissible, b_value }
}

fn sq_congruent(x: i128, d: i64, p: u64, e: u32) -> bool {
    let m = pw(p, e);
    (x * x - d as i128).rem_euclid(m) == 0
}

/// Admissibility and `B(m)` from the classification theorems.
pub fn admissible_classify(setting: &Setting, m: &RepresentativeM) -> AdmissibleRecord {
    let p = setting.p;
    let (a, b, c) = (m.a, m.b, m.c);
    let unit = |x: u64| !x.is_multiple_of(p);
    let no = AdmissibleRecord { m: *m, admissible: false, b_value: Q::zero() };
    let yes = |e: u32| AdmissibleRecord { m: *m, admissible: true, b_value: p_pow(p, e as i64) };
    if !m.in_bold_m(p) {
        return no;
    }
    if !setting.split() {
        if b == 0 && c == a && m.beta == 0 && (a == 0 || unit(m.gamma1)) {
            return yes(2 * a);
        }
        return no;
    }
    let d = setting.d;
    if b == 0 && c == 0 {
        if sq_congruent(m.beta as i128, d, p, a) {
            return yes(a);
        }
        return no;
    }
    if b == 0 && a == c && a >= 1 {
        if unit(m.gamma1) {
            return yes(2 * a);
        }
        return no;
    }
    if a == c && c >= b && b >= 1 {
        if m.beta == 0 && unit(m.gamma1) && unit(m.gamma2) {
            let pb = pw(p, b);
            let ratio = (m.gamma1 as i128 * modinv_i128(m.gamma2 as i128, pb)).rem_euclid(pb);
            if sq_congruent(ratio, d, p, b) {
                return yes(2 * a + 2 * b);
            }
        }
        return no;
    }
    if a > c && c == b && b >= 1 {
        if unit(m.gamma1) && unit(m.gamma2) {
            let pc = pw(p, c);
            let ratio = (m.gamma1 as i128 * modinv_i128(m.gamma2 as i128, pc)).rem_euclid(pc);
            let bp = m.beta as i128 / pc;
            let e = (a - c).min(c);
            if sq_congruent(ratio, d, p, c)
                && sq_congruent(bp, d, p, a - c)
                && (bp + ratio).rem_euclid(pw(p, e)) == 0
            {
                return yes(a + 3 * c);
            }
        }
        return no;
    }
    no
}

/// `g_{m,r}`: Siegel Levi element with lower-right block `m` and similitude
/// `p^(r+c)`, so that its upper-left entry is `p^r`.
pub fn siegel_levi_element(m: &RepresentativeM, r: i64, p: u64) -> GroupElement {
    siegel_levi(&m.matrix(p), &p_pow(p, r + m.c as i64))
}

/// Value of the `v`-integral for an admissible `m`.
pub fn integral_c(rec: &AdmissibleRecord, r: i64) -> Q {
    if rec.admissible && r >= rec.m.a as i64 {
        rec.b_value.clone()
    } else {
        Q::zero()
    }
}

/// Average of `chi(v) charf(n_v g_{m,r})` over the `v`-fiber whose block
/// has Hermite form `m`, times `B(m)`.
pub fn integral_c_bruteforce(setting: &Setting, m: &RepresentativeM, r: i64) -> Result<Q, PadicError> {
    let p = setting.p;
    let rec = admissible_bruteforce(setting, m);
    let g = siegel_levi_element(m, r, p).mat;
    let c = m.c as i64;
    let kk = (m.a as i64 + m.b as i64 - c).max(0);
    let n = pw(p, (c + kk) as u32);
    let step = p_pow(p, -c);
    let y = m.matrix(p).block(0, 0, 2, 2);
    let yinv = y.inverse().expect("invertible");
    let gamma = [m.matrix(p)[(0, 2)].clone(), m.matrix(p)[(1, 2)].clone()];
    let zero = Q::zero();
    // n_v g = g + v1 X1 + v2 X2 with v = (i, j) p^-c; every entry is affine in (i, j)
    let entry = |row: usize, col: usize| -> [Q; 3] {
        let (x1, x2) = match row {
            0 => (g[(1, col)].clone(), g[(2, col)].clone()),
            3 => (-&g[(5, col)], zero.clone()),
            4 => (zero.clone(), -&g[(5, col)]),
            _ => (zero.clone(), zero.clone()),
        };
        [g[(row, col)].clone(), &step * x1, &step * x2]
    };
    let sub = |a: &[Q; 3], b: &[Q; 3]| [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]];
    let scale = |k: &Q, a: &[Q; 3]| [k * &a[0], k * &a[1], k * &a[2]];
    let mut equal = Vec::new();
    for (u, v) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        equal.push(sub(&entry(3 + u, 3 + v), &[y[(u, v)].clone(), zero.clone(), zero.clone()]));
    }
    let shift = [0, 1].map(|u| sub(&entry(3 + u, 5), &[gamma[u].clone(), zero.clone(), zero.clone()]));
    let mut fiber_int = Vec::new();
    for u in 0..2 {
        let a = scale(&yinv[(u, 0)], &shift[0]);
        let b = scale(&yinv[(u, 1)], &shift[1]);
        fiber_int.push([&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]);
    }
    let mut charf_int = Vec::new();
    for row in 0..6 {
        for col in 0..6 {
            charf_int.push(entry(row, col));
        }
    }
    let forms = IntegerForms::new(p, [&equal, &fiber_int, &charf_int]);
    let pc = pw(p, c as u32);
    let mut hist = vec![0i64; pc as usize];
    let mut fiber = 0i64;
    for i in 0..n {
        for j in 0..n {
            if !forms.all_zero(0, i, j) || !forms.all_integral(1, i, j) {
                continue;
            }
            fiber += 1;
            if forms.all_integral(2, i, j) {
                hist[(i % pc) as usize] += 1;
            }
        }
    }
    let mut counter = CyclotomicCounter::new(p, 0);
    for (i, &k) in hist.iter().enumerate() {
        if k > 0 {
            counter.add_phase(Phase::of(&(&step * q_int(i as i64)), p), &q_int(k));
        }
    }
    let avg = counter.to_rational().ok_or(PadicError::NotRational)? / q_int(fiber);
    Ok(avg * rec.b_value)
}

/// Groups of affine forms `x0 + i x1 + j x2` over `Q`, cleared to a common
/// denominator `L = p^e u` so that tests run on integers.
struct IntegerForms {
    groups: Vec<Vec<[i128; 3]>>,
    pe: i128,
}

impl IntegerForms {
    fn new<const G: usize>(p: u64, groups: [&Vec<[Q; 3]>; G]) -> Self {
        let l = groups
            .iter()
            .flat_map(|g| g.iter().flatten())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut e = 0u32;
        let mut rest = l.clone();
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        let lq = Q::from_integer(l);
        let groups = groups
            .iter()
            .map(|g| {
                g.iter()
                    .filter(|f| f.iter().any(|x| !x.is_zero()))
                    .map(|f| f.clone().map(|x| (x * &lq).to_integer().to_i128().expect("small coefficients")))
                    .collect()
            })
            .collect();
        IntegerForms { groups, pe: pw(p, e) }
    }

    fn value(f: &[i128; 3], i: i128, j: i128) -> i128 {
        f[0] + i * f[1] + j * f[2]
    }

    fn all_zero(&self, g: usize, i: i128, j: i128) -> bool {
        self.groups[g].iter().all(|f| Self::value(f, i, j) == 0)
    }

    fn all_integral(&self, g: usize, i: i128, j: i128) -> bool {
        self.groups[g].iter().all(|f| Self::value(f, i, j) % self.pe == 0)
    }
}

/// Runs brute force and classification over every `m` in `M` with
/// `a, b, c <= amax`; returns the mismatches.
pub fn classification_mismatches(setting: &Setting, amax: u32) -> Vec<(AdmissibleRecord, AdmissibleRecord)> {
    enumerate_m(setting.p, amax)
        .par_iter()
        .filter_map(|m| {
            let bf = admissible_bruteforce(setting, m);
            let cl = admissible_classify(setting, m);
            if bf != cl {
                Some((bf, cl))
            } else {
                None
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(p: u64, d: i64) -> Setting {
        Setting::new(p, d, 12).unwrap()
    }

    #[test]
    fn identity_block() {
        let s = st(3, 5);
        let m = RepresentativeM { a: 0, b: 0, c: 0, beta: 0, gamma1: 0, gamma2: 0 };
        let r = admissible_bruteforce(&s, &m);
        assert!(r.admissible);
        assert_eq!(r.b_value, Q::one());
    }

    #[test]
    fn lattice_matches_grid_small() {
        for s in [st(3, 5), st(3, 13)] {
            for m in enumerate_m(3, 1) {
                assert_eq!(admissible_bruteforce(&s, &m), admissible_grid(&s, &m), "{m:?}");
            }
        }
    }

    #[test]
    fn denominator_beyond_max_abc() {
        // u22 = -1/p^3 is needed here although max(a, b, c) = 2
        let m = RepresentativeM { a: 2, b: 1, c: 0, beta: 1, gamma1: 0, gamma2: 0 };
        let u = [-p_pow(3, -1), p_pow(3, -2), -p_pow(3, -3)];
        assert!(um_contains(&m, [&u[0], &u[1], &u[2]], 3));
    }

    #[test]
    fn classification_small() {
        for s in [st(3, 5), st(3, 13), st(5, 2), st(5, 11)] {
            assert!(classification_mismatches(&s, 1).is_empty());
        }
    }

    #[test]
    fn g_mr_corner() {
        let m = RepresentativeM { a: 2, b: 1, c: 1, beta: 3, gamma1: 4, gamma2: 2 };
        let g = siegel_levi_element(&m, 3, 3);
        assert_eq!(g.mat[(0, 0)], p_pow(3, 3));
    }
}
