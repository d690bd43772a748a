//! Named collections of checks, run in parallel and assembled into a
//! deterministic [`Report`].

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::{admissible_bruteforce, admissible_classify, enumerate_m, integral_c, integral_c_bruteforce};
use crate::alpha::alpha_check;
use crate::cosets::{
    coset_lattice, cosets_are_symplectic, gl_double_coset_size, lagrangian_oracle, t23_oracle, HeckeOp,
};
use crate::hecke::{crosscheck_cosets, reduction_crosscheck, support_symbols, unit_sum, unit_sum_closed};
use crate::lemmas::{
    fourier_check, hlem_check, identities_check, tp_extremal1_check, tp_extremal2_check, tp_vanish_check,
    tprime_check,
};
use crate::modulus::modulus_check;
use crate::padic::{p_pow, FourierField, Q};
use crate::report::{CheckResult, Report};
use crate::symbols::{iota_rep, Setting, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Admissible,
    Hecke,
    Modulus,
    Alphachi,
    Lemmas,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "admissible" => Suite::Admissible,
            "hecke" => Suite::Hecke,
            "modulus" => Suite::Modulus,
            "alphachi" => Suite::Alphachi,
            "lemmas" => Suite::Lemmas,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite {s}")),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub p: u64,
    #[serde(rename = "D")]
    pub d: i64,
    pub precision: u32,
    /// `r` range for the `T_p` lemmas.
    pub rmax: i64,
    /// `r` range for the Hecke reductions.
    pub hecke_rmax: i64,
    /// Bound on `a, b, c`.
    pub amax: u32,
    /// Bound on `k` in the `pi_i^k` checks.
    pub kmax: u32,
    /// Bound on valuations in the modulus and `alpha_chi` checks.
    pub vmax: i64,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip)]
    pub timings: bool,
}

impl SuiteConfig {
    pub fn new(p: u64, d: i64) -> Self {
        SuiteConfig {
            p,
            d,
            precision: 16,
            rmax: 4,
            hecke_rmax: 2,
            amax: 2,
            kmax: 3,
            vmax: 2,
            seed: 20240,
            samples: 20,
            timings: false,
        }
    }
}

type Job<'a> = Box<dyn Fn() -> Vec<CheckResult> + Send + Sync + 'a>;

fn run_jobs(jobs: Vec<Job<'_>>, timings: bool) -> Vec<CheckResult> {
    jobs.par_iter()
        .map(|job| {
            let t = Instant::now();
            let mut out = job();
            if timings {
                let ms = t.elapsed().as_millis() as u64;
                for c in &mut out {
                    c.wall_ms = Some(ms);
                }
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Brute-force admissibility and `B(m)` against the classification, the
/// power law `B(m) = p^(a+2b+c)`, and the `v`-integral.
pub fn admissible_checks(setting: &Setting, amax: u32) -> Vec<CheckResult> {
    let p = setting.p;
    let ms = enumerate_m(p, amax);
    let recs: Vec<_> = ms
        .par_iter()
        .map(|m| (admissible_bruteforce(setting, m), admissible_classify(setting, m)))
        .collect();
    let mut cls = CheckResult::new("admissible-classification", "brute-force U_m against the classification");
    let mut pow = CheckResult::new("admissible-b-power", "B(m) = p^(a+2b+c)");
    let mut admissible = 0usize;
    for (bf, cl) in &recs {
        cls.case(bf == cl, || format!("{:?}: brute {} / {}, classified {} / {}", bf.m, bf.admissible, bf.b_value, cl.admissible, cl.b_value));
        if bf.admissible {
            admissible += 1;
            let want = p_pow(p, (bf.m.a + 2 * bf.m.b + bf.m.c) as i64);
            pow.case(bf.b_value == want, || format!("{:?}: B = {}, want {want}", bf.m, bf.b_value));
        }
    }
    cls.certificate(format!("{admissible} admissible of {} with a, b, c <= {amax}", ms.len()));
    let jobs: Vec<_> = recs
        .iter()
        .filter(|(bf, _)| bf.admissible && bf.m.a >= 1)
        .flat_map(|(bf, _)| (0..=bf.m.a as i64 + 1).map(move |r| (bf, r)))
        .collect();
    let vals: Vec<_> = jobs.par_iter().map(|(rec, r)| (rec, *r, integral_c_bruteforce(setting, &rec.m, *r))).collect();
    let mut ic = CheckResult::new("integral-c", "v-integral is 0 for r < a and B(m) for r >= a");
    for (rec, r, v) in vals {
        match v {
            Ok(v) => {
                let want = integral_c(rec, r);
                ic.case(v == want, || format!("{:?} r={r}: brute {v}, want {want}", rec.m));
            }
            Err(e) => ic.error(format!("{:?} r={r}: {e}", rec.m)),
        }
    }
    vec![cls, pow, ic]
}

/// Coset lists against their lattice oracles.
pub fn coset_checks(p: u64) -> Vec<CheckResult> {
    let (c03, c23, _) = crosscheck_cosets(p);
    let mut out = Vec::new();
    for (op, cs, k, oracle) in [
        (HeckeOp::T03, &c03, 1u32, lagrangian_oracle(p)),
        (HeckeOp::T23, &c23, 2, t23_oracle(p)),
    ] {
        let name = format!("cosets-{op:?}").to_lowercase();
        let mut r = CheckResult::new(&name, "K diag K / K against lattices mod p^k");
        r.case(cosets_are_symplectic(cs, p), || "non-symplectic representative".into());
        let lat: std::collections::BTreeSet<_> = cs.iter().map(|c| coset_lattice(&c.h, p, k)).collect();
        r.case(lat.len() == cs.len(), || format!("{} cosets but {} lattices", cs.len(), lat.len()));
        r.case(lat == oracle, || format!("lattice set differs from oracle ({} vs {})", lat.len(), oracle.len()));
        r.certificate(format!("{} cosets", cs.len()));
        out.push(r);
    }
    let mut gl = CheckResult::new("cosets-gl3", "GL3 double coset sizes");
    for exps in [[0i64, 0, 1], [0, 1, 1], [0, 1, 2]] {
        let n = crate::cosets::gl_coset_reps(3, &exps, p).len() as u128;
        let want = gl_double_coset_size(&exps, p);
        gl.case(n == want, || format!("{exps:?}: {n} reps, want {want}"));
    }
    out.push(gl);
    out
}

/// Raw coset application against the `GL3` and `GL2` forms, and the unit sum.
pub fn hecke_checks(setting: &Setting, rmax: i64) -> Vec<CheckResult> {
    let p = setting.p;
    let table = match SymbolTable::build(setting, rmax + 3) {
        Ok(t) => t,
        Err(e) => {
            let mut r = CheckResult::new("hecke-reductions", "raw cosets = GL3 form = GL2 form");
            r.error(format!("symbol table: {e}"));
            return vec![r];
        }
    };
    let (c03, c23, _) = crosscheck_cosets(p);
    let syms = support_symbols(setting, rmax);
    let jobs: Vec<_> = syms.iter().flat_map(|s| [(HeckeOp::T03, s), (HeckeOp::T23, s)]).collect();
    let out: Vec<_> = jobs
        .par_iter()
        .map(|(op, s)| {
            let cs = if *op == HeckeOp::T03 { &c03 } else { &c23 };
            (op, s, reduction_crosscheck(setting, &table, *op, cs, s))
        })
        .collect();
    let mut red = CheckResult::new("hecke-reductions", "raw cosets = GL3 form = GL2 form");
    for (op, s, r) in out {
        match r {
            Ok(cc) => red.case(cc.equal, || serde_json::to_string(&cc).expect("serializable")),
            Err(e) => red.error(format!("{op:?} {s}: {e}")),
        }
    }
    let closed = unit_sum_closed(setting);
    let mut us = CheckResult::new("unit-sum", "sum over U(p)' of chi - 1 = -p^3 + eps p^2 at |t| = |l|, else 0");
    for s in &syms {
        match iota_rep(setting, s).map_err(Into::into).and_then(|g| unit_sum(setting, &g)) {
            Ok(v) => {
                let want = if s.ell.norm_val() == s.r { closed.clone() } else { Q::from_integer(0.into()) };
                us.case(v == want, || format!("{s}: sum {v}, want {want}"));
            }
            Err(e) => us.error(format!("{s}: {e}")),
        }
    }
    us.certificate(format!("constant {closed}"));
    vec![red, us]
}

pub fn lemma_checks(setting: &Setting, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let table = match SymbolTable::build(setting, cfg.rmax + 2) {
        Ok(t) => t,
        Err(e) => {
            let mut r = CheckResult::new("lemmas", "symbol table");
            r.error(format!("{e}"));
            return vec![r];
        }
    };
    let fields = [FourierField::Rationals, FourierField::Quadratic { d: setting.d }];
    let jobs: Vec<Job<'_>> = vec![
        Box::new(|| vec![hlem_check(setting, cfg.kmax)]),
        Box::new(|| vec![identities_check(setting, cfg.samples, cfg.seed)]),
        Box::new(|| vec![tprime_check(setting, &table, cfg.rmax)]),
        Box::new(|| vec![tp_vanish_check(setting, cfg.rmax)]),
        Box::new(|| vec![tp_extremal1_check(setting, &table, cfg.rmax)]),
        Box::new(|| vec![tp_extremal2_check(setting, &table, cfg.rmax, cfg.kmax as i64)]),
        Box::new(|| vec![fourier_check(setting.p, &fields)]),
    ];
    run_jobs(jobs, cfg.timings)
}

/// Runs one suite and assembles the report.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report, crate::padic::PadicError> {
    let setting = Setting::new(cfg.p, cfg.d, cfg.precision)?;
    let st = &setting;
    let mut jobs: Vec<Job<'_>> = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Admissible {
        jobs.push(Box::new(move || admissible_checks(st, cfg.amax)));
    }
    if all || suite == Suite::Hecke {
        jobs.push(Box::new(move || coset_checks(st.p)));
        jobs.push(Box::new(move || hecke_checks(st, cfg.hecke_rmax)));
    }
    if all || suite == Suite::Modulus {
        jobs.push(Box::new(move || vec![modulus_check(st, cfg.vmax)]));
    }
    if all || suite == Suite::Alphachi {
        jobs.push(Box::new(move || vec![alpha_check(st, cfg.vmax)]));
    }
    if all || suite == Suite::Lemmas {
        jobs.push(Box::new(move || lemma_checks(st, cfg)));
    }
    let checks = run_jobs(jobs, cfg.timings);
    let mut config = serde_json::to_value(cfg).expect("serializable");
    config["case"] = serde_json::Value::from(if setting.split() { "split" } else { "inert" });
    config["suite"] = serde_json::to_value(suite).expect("serializable");
    Ok(Report::new("check-suite", config, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in ["admissible", "hecke", "modulus", "alphachi", "lemmas", "all"] {
            let suite: Suite = s.parse().unwrap();
            assert_eq!(serde_json::to_value(suite).unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn modulus_suite_report_is_stable() {
        let cfg = SuiteConfig::new(3, 5);
        let a = run_suite(Suite::Modulus, &cfg).unwrap();
        let b = run_suite(Suite::Modulus, &cfg).unwrap();
        assert!(a.passed());
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.config["case"], "inert");
    }
}
