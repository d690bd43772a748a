//! Checks of the auxiliary lemmas: the `pi_1^k` block, the `iota`
//! identities, `T'_p` versus `T_p`, the vanishing and extremal values of
//! `T_p`, and Fourier inversion on `Q_p` and `L`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::groups::{build_iota, central_p, diag_element, t_matrix, t_prime_matrix, tp_representatives, QuadElem};
use crate::hecke::{apply_tp, apply_tp_raw, iota_term, support_symbols, tp_expansion};
use crate::padic::{
    fourier_indicator, fourier_indicator_bruteforce, p_pow, q_frac, q_int, FourierField, PadicError, TruncatedPadic, Q,
};
use crate::report::CheckResult;
use crate::series::{diff, FormalSeries};
use crate::symbols::{iota_rep, label_element, Canon, EllClass, IotaSym, Setting, SymbolLabel, SymbolTable};

/// `m_l` for `l = pi_i^k` has entries `(p^k+1)/2` and `(p^k-1)/2 * h^{+-1}`,
/// and reduces to `[[p^k, -+h], [0, 1]]` under right `GL2(Z_p)`.
pub fn hlem_check(setting: &Setting, kmax: u32) -> CheckResult {
    let mut res = CheckResult::new("h-lemma", "pi_i^k block normal form");
    let p = setting.p;
    let Some(h0) = setting.quad.h.clone() else {
        return CheckResult::skipped("h-lemma", "pi_i^k block normal form", "inert setting");
    };
    let prec = setting.precision;
    for k in 1..=kmax {
        for first in [true, false] {
            let h = if first { h0.clone() } else { h0.neg() };
            let r = (|| -> Result<bool, PadicError> {
                let pk = p_pow(p, k as i64);
                let x = TruncatedPadic::from_rational(&((&pk + q_int(1)) / q_int(2)), p, prec);
                let y = TruncatedPadic::from_rational(&((&pk - q_int(1)) / q_int(2)), p, prec).mul(&h.inv()?);
                // x + h y = p^k, x - h y = 1
                let hy = h.mul(&y);
                let e1 = x.add(&hy).sub(&TruncatedPadic::from_rational(&pk, p, prec));
                let e2 = x.sub(&hy).sub(&TruncatedPadic::from_int(1, p, prec));
                if !e1.is_zero_to_precision() || !e2.is_zero_to_precision() {
                    return Ok(false);
                }
                // m = [[x, D y], [y, x]]; clear the bottom-left with a column
                // operation, then scale both columns by units
                let dy = y.mul_rational(&q_int(setting.d));
                let xinv = x.inv()?;
                let det = x.mul(&x).sub(&dy.mul(&y));
                let top_left = det.mul(&xinv).mul(&x);
                let top_right = dy.mul(&xinv);
                let tl_ok = top_left.valuation()? == k as i64 && top_left.residue(k + 1)? == crate::padic::p_pow_int(p, k);
                let want = h.neg().residue(k)?;
                let got = top_right.residue(k)?;
                let beta = setting.beta(k, first)?;
                Ok(tl_ok && got == want && want == beta.into())
            })();
            match r {
                Ok(ok) => res.case(ok, || format!("k={k} pi_{}", if first { 1 } else { 2 })),
                Err(e) => res.error(format!("k={k}: {e}")),
            }
        }
    }
    res
}

fn random_q(rng: &mut ChaCha8Rng, p: u64) -> Q {
    let mut n: i64 = rng.gen_range(1..50);
    if rng.gen_bool(0.5) {
        n = -n;
    }
    let d: i64 = rng.gen_range(1..20);
    q_frac(n, d) * p_pow(p, rng.gen_range(-3..=3))
}

/// The four `iota` identities and the `T'(u)` factorization, exactly.
pub fn identities_check(setting: &Setting, samples: usize, seed: u64) -> CheckResult {
    let mut res = CheckResult::new("iota-identities", "iota identities and T'(u) factorization");
    let p = setting.p;
    let d = setting.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pq = p_pow(p, 1);
    let pinv = p_pow(p, -1);
    let diag = |e: [i64; 6]| diag_element(&e, p).expect("symplectic diagonal");
    let cp = central_p(p);
    for _ in 0..samples {
        let t = random_q(&mut rng, p);
        let l = loop {
            let l = QuadElem::new(random_q(&mut rng, p), if rng.gen_bool(0.3) { q_int(0) } else { random_q(&mut rng, p) });
            if l.norm(d) != q_int(0) {
                break l;
            }
        };
        let lp = QuadElem::new(&l.x * &pq, &l.y * &pq);
        let ldp = QuadElem::new(&l.x * &pinv, &l.y * &pinv);
        let g = build_iota(&t, &l, d);
        let checks = [
            (g.mul(&diag([0, 0, 0, 1, 1, 1])).mat, build_iota(&(&t * &pinv), &l, d).mul(&cp).mat),
            (g.mul(&diag([1, 1, 1, 0, 0, 0])).mat, build_iota(&(&t * &pq), &l, d).mat),
            (g.mul(&diag([1, 0, 0, 1, 1, 0])).mat, build_iota(&(&t * &pq), &lp, d).mat),
            (g.mul(&diag([0, 1, 1, 0, 0, 1])).mat, build_iota(&(&t * &pinv), &ldp, d).mul(&cp).mat),
        ];
        for (i, (a, b)) in checks.iter().enumerate() {
            res.case(a == b, || format!("identity {} at t={t}, l=({}, {})", i + 1, l.x, l.y));
        }
    }
    let left = diag([1, 1, 1, 0, 0, 0]).mul(&diag([1, 0, 0, 1, 1, 0]));
    for u in tp_representatives(p) {
        let lhs = t_prime_matrix(&u, p).mat;
        let rhs = (&left.mat * &t_matrix(&u, p).mat).scale(&pinv);
        res.case(lhs == rhs, || format!("T'(u) factorization at u={u}"));
    }
    res
}

/// Raw `T'_p` equals `w^-1 T_p` at `iota(p^2 t, p l)`.
pub fn tprime_check(setting: &Setting, table: &SymbolTable, rmax: i64) -> CheckResult {
    let mut res = CheckResult::new("tprime-vs-tp", "T'_p = w^-1 T_p(iota(p^2 t, p l))");
    for s in support_symbols(setting, rmax) {
        match (apply_tp_raw(setting, &s, true), apply_tp(setting, &s, true)) {
            (Ok(a), Ok(b)) => {
                let dd = diff(&a, &b, table);
                res.case(dd.is_empty(), || format!("{s}: {dd:?}"));
            }
            (Err(e), _) | (_, Err(e)) => res.error(format!("{s}: {e}")),
        }
    }
    res
}

fn vanish_summary(terms: &[crate::hecke::TpTerm]) -> String {
    terms
        .iter()
        .map(|t| match &t.outcome {
            Canon::Vanish(c) => format!("{:?}@{}", c.witness, c.exponent),
            Canon::Symbol(r) => format!("symbol {} phase {}", r.key, r.phase),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// `(T_p lambda)(iota(p^{r-1}, p l)) = 0` when `|l| = |p^{r-2}|`.
pub fn tp_vanish_check(setting: &Setting, rmax: i64) -> CheckResult {
    let mut res = CheckResult::new("tp-vanish", "T_p vanishing at iota(p^{r-1}, p l)");
    for r in 2..=rmax {
        for ell in EllClass::with_norm_val(setting.split(), r - 2) {
            let s = IotaSym::new(r - 1, ell.times_p(1));
            match iota_rep(setting, &s).map_err(Into::into).and_then(|g| tp_expansion(setting, &g, false)) {
                Ok((series, terms)) => {
                    res.case(series.is_zero(), || format!("{s}: {:?}", series.iter().collect::<Vec<_>>()));
                    res.certificate(format!("{s}: {}", vanish_summary(&terms)));
                }
                Err(e) => res.error(format!("{s}: {e}")),
            }
        }
    }
    res
}

fn expect_eq(res: &mut CheckResult, table: &SymbolTable, name: String, got: Result<FormalSeries, crate::symbols::SymbolError>, want: Result<FormalSeries, crate::symbols::SymbolError>) {
    match (got, want) {
        (Ok(a), Ok(b)) => {
            let dd = diff(&a, &b, table);
            res.case(dd.is_empty(), || format!("{name}: {dd:?}"));
        }
        (Err(e), _) | (_, Err(e)) => res.error(format!("{name}: {e}")),
    }
}

/// `T_p` at `iota(p^r, 1)` and at `iota(p^r, l)` with `|l| = |p^r|`.
pub fn tp_extremal1_check(setting: &Setting, table: &SymbolTable, rmax: i64) -> CheckResult {
    let mut res = CheckResult::new("tp-extremal-1", "T_p at iota(p^r,1) and at |l| = |p^r|");
    let split = setting.split();
    let one = EllClass::one(split);
    for r in 0..=rmax {
        let s = IotaSym::new(r, one);
        let want = label_element(setting, &SymbolLabel::IotaTau(s)).map_err(Into::into).and_then(|g| {
            let mut acc = crate::series::PhaseAccumulator::new(setting.p, 0);
            crate::hecke::accumulate(&mut acc, setting, &g, &q_int(1), 0, crate::padic::Phase::ZERO)?;
            Ok(acc.finish()?)
        });
        expect_eq(&mut res, table, format!("{s} -> tau"), apply_tp_raw(setting, &s, false), want);
        for ell in EllClass::with_norm_val(split, r) {
            let s = IotaSym::new(r, ell);
            let want = if split {
                let mut out = FormalSeries::new(0);
                let mut err = None;
                for i in [1, 2] {
                    let t = IotaSym::new(r - 1, ell.times_pi(i, 1).times_p(-1));
                    match iota_term(setting, &t, &q_int(1), 1) {
                        Ok(x) => out.add_series(&x),
                        Err(e) => err = Some(e),
                    }
                }
                match err {
                    Some(e) => Err(e),
                    None => Ok(out),
                }
            } else {
                Ok(FormalSeries::new(0))
            };
            expect_eq(&mut res, table, format!("{s}"), apply_tp_raw(setting, &s, false), want);
        }
    }
    res
}

/// Split only: `T_p` at `iota(p^r, pi_i^k)` is `w lambda(iota(p^{r-1}, pi_i^{k-1}))`.
pub fn tp_extremal2_check(setting: &Setting, table: &SymbolTable, rmax: i64, kmax: i64) -> CheckResult {
    let name = "tp-extremal-2";
    let anchor = "T_p at iota(p^r, pi_i^k)";
    if !setting.split() {
        return CheckResult::skipped(name, anchor, "inert setting");
    }
    let mut res = CheckResult::new(name, anchor);
    let one = EllClass::one(true);
    for r in 1..=rmax {
        for k in 1..=kmax.min(r) {
            for i in [1, 2] {
                let s = IotaSym::new(r, one.times_pi(i, k));
                let t = IotaSym::new(r - 1, one.times_pi(i, k - 1));
                expect_eq(&mut res, table, format!("{s}"), apply_tp_raw(setting, &s, false), iota_term(setting, &t, &q_int(1), 1));
            }
        }
    }
    res
}

/// Both Fourier inversion displays against explicit character sums.
pub fn fourier_check(p: u64, fields: &[FourierField]) -> CheckResult {
    let mut res = CheckResult::new("fourier-inversion", "Fourier inversion on O_M");
    let mut cases = Vec::new();
    let scalars: Vec<Q> = (-3..=3i64)
        .flat_map(|e| [q_int(1), q_int(p as i64 - 1)].map(|u| u * p_pow(p, e)))
        .chain([q_int(0)])
        .collect();
    for &field in fields {
        for n in 0..=3i64 {
            for twisted in [false, true] {
                match field {
                    FourierField::Rationals => {
                        for x in &scalars {
                            let v = if twisted { x + q_int(1) } else { x.clone() };
                            cases.push((field, v, q_int(0), n, twisted));
                        }
                    }
                    FourierField::Quadratic { .. } => {
                        for e1 in -3..=3i64 {
                            for e2 in [None, Some(-3i64), Some(0), Some(2)] {
                                let x = p_pow(p, e1);
                                let y = e2.map_or(q_int(0), |e| p_pow(p, e));
                                let v = if twisted { &x + q_int(1) } else { x };
                                cases.push((field, v, y, n, twisted));
                            }
                        }
                    }
                }
            }
        }
    }
    let out: Vec<(bool, String)> = cases
        .par_iter()
        .map(|(field, x, y, n, twisted)| {
            let closed = fourier_indicator((x, y), *n, *twisted, *field, p);
            let datum = format!("{field:?} v=({x},{y}) n={n} twisted={twisted}");
            match fourier_indicator_bruteforce((x, y), *n, *twisted, *field, p) {
                Ok(b) => (b == closed, format!("{datum}: closed {closed} brute {b}")),
                Err(e) => (false, format!("{datum}: {e}")),
            }
        })
        .collect();
    for (ok, datum) in out {
        res.case(ok, || datum);
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hlem_split() {
        let st = Setting::new(3, 13, 12).unwrap();
        let r = hlem_check(&st, 4);
        assert!(r.passed() && r.cases == 8, "{r:?}");
    }

    #[test]
    fn identities_hold() {
        let st = Setting::new(5, 2, 8).unwrap();
        assert!(identities_check(&st, 20, 7).passed());
    }

    #[test]
    fn tp_lemmas_small() {
        for d in [5, 13] {
            let st = Setting::new(3, d, 14).unwrap();
            let table = SymbolTable::build(&st, 5).unwrap();
            for r in [
                tp_vanish_check(&st, 4),
                tp_extremal1_check(&st, &table, 4),
                tp_extremal2_check(&st, &table, 4, 3),
                tprime_check(&st, &table, 3),
            ] {
                assert!(r.passed(), "{r:#?}");
            }
        }
    }
}
