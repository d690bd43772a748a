//! `gsp6-verify`: runs the main identity, the check suites and the spin
//! factor display, writing JSON reports.
//!
//! Exit codes: 0 when every executed check passes, 1 on a failed check,
//! 2 on usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gsp6_core::padic::Q;
use gsp6_core::report::{CheckResult, Report};
use gsp6_core::rhs::verify_main_identity;
use gsp6_core::spin::{render, spin_euler_factor};
use gsp6_core::suites::{run_suite, Suite, SuiteConfig};
use gsp6_core::symbols::Setting;

#[derive(Parser)]
#[command(name = "gsp6-verify", version, about = "Exact local verification for the GSp6 spin zeta integral")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "GSP6_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    /// Odd prime.
    #[arg(long)]
    p: u64,
    /// Discriminant `D` of the quadratic algebra; `p` must not divide `2D`.
    #[arg(long = "disc", allow_hyphen_values = true)]
    disc: i64,
    /// p-adic working precision in digits.
    #[arg(long, env = "GSP6_PRECISION", default_value_t = 16)]
    precision: u32,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock times in the report.
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the four expansions of the zeta integral through `q^rmax`.
    VerifyMain {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        rmax: u32,
    },
    /// Run a named suite of oracle comparisons.
    CheckSuite {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["admissible", "hecke", "modulus", "alphachi", "lemmas", "all"])]
        suite: String,
        /// Bound on the block exponents `a, b, c`.
        #[arg(long, default_value_t = 2)]
        amax: u32,
        /// Range of `r` for the `T_p` lemmas.
        #[arg(long, default_value_t = 4)]
        rmax: i64,
        /// Range of `r` for the Hecke reductions.
        #[arg(long, default_value_t = 2)]
        hecke_rmax: i64,
        #[arg(long, default_value_t = 20240)]
        seed: u64,
    },
    /// Print the truncated degree-eight Euler factor; display only.
    ReportSpin {
        /// Four nonzero rationals `a0,a1,a2,a3`.
        #[arg(long)]
        satake: String,
        #[arg(long, default_value_t = 6)]
        rmax: usize,
    },
}

enum Failure {
    Usage(String),
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn setting(c: &Common) -> Result<Setting, Failure> {
    if !is_prime(c.p) || c.p == 2 {
        return Err(Failure::Usage(format!("p = {} is not an odd prime", c.p)));
    }
    Setting::new(c.p, c.disc, c.precision).map_err(|e| Failure::Usage(e.to_string()))
}

fn emit(report: &Report, out: &Option<PathBuf>) -> Result<(), Failure> {
    for c in &report.checks {
        eprintln!("{:<28} {:?} ({} cases)", c.name, c.status, c.cases);
        for f in c.failures.iter().take(3) {
            eprintln!("    {f}");
        }
    }
    let json = report.to_json();
    match out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn verify_main(common: &Common, rmax: u32) -> Result<bool, Failure> {
    let st = setting(common)?;
    let t = Instant::now();
    let mut check = CheckResult::new("main-identity", "lhs brute force = lhs closed form = N*D = rhs closed form");
    let payload = match verify_main_identity(&st, rmax) {
        Ok(r) => {
            check.case(r.passed(), || {
                let bad: Vec<_> = r.comparisons.iter().filter(|c| !c.equal).collect();
                serde_json::to_string(&bad).expect("serializable")
            });
            Some(serde_json::to_value(&r).expect("serializable"))
        }
        Err(e) => {
            check.error(e.to_string());
            None
        }
    };
    if common.timings {
        check.wall_ms = Some(t.elapsed().as_millis() as u64);
    }
    let config = serde_json::json!({
        "p": st.p, "D": st.d, "Rmax": rmax, "precision": st.precision,
        "case": if st.split() { "split" } else { "inert" },
    });
    let mut report = Report::new("verify-main", config, vec![check]);
    report.payload = payload;
    emit(&report, &common.out)?;
    Ok(report.passed())
}

fn check_suite(common: &Common, suite: &str, amax: u32, rmax: i64, hecke_rmax: i64, seed: u64) -> Result<bool, Failure> {
    setting(common)?;
    let suite: Suite = suite.parse().map_err(Failure::Usage)?;
    let mut cfg = SuiteConfig::new(common.p, common.disc);
    cfg.precision = common.precision;
    cfg.amax = amax;
    cfg.rmax = rmax;
    cfg.hecke_rmax = hecke_rmax;
    cfg.seed = seed;
    cfg.timings = common.timings;
    let report = run_suite(suite, &cfg).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(&report, &common.out)?;
    Ok(report.passed())
}

fn parse_satake(s: &str) -> Result<[Q; 4], Failure> {
    let vals: Vec<Q> = s
        .split(',')
        .map(|x| x.trim().parse::<Q>().map_err(|e| Failure::Usage(format!("bad parameter {x:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    let arr: [Q; 4] = vals
        .try_into()
        .map_err(|v: Vec<Q>| Failure::Usage(format!("expected 4 parameters, got {}", v.len())))?;
    if arr.iter().any(|x| *x == Q::from_integer(0.into())) {
        return Err(Failure::Usage("parameters must be nonzero".into()));
    }
    Ok(arr)
}

fn report_spin(satake: &str, rmax: usize) -> Result<bool, Failure> {
    let sat = parse_satake(satake)?;
    let series = spin_euler_factor(&sat, rmax);
    println!("{}", render(&series));
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.cmd {
        Command::VerifyMain { common, rmax } => verify_main(common, *rmax),
        Command::CheckSuite { common, suite, amax, rmax, hecke_rmax, seed } => {
            check_suite(common, suite, *amax, *rmax, *hecke_rmax, *seed)
        }
        Command::ReportSpin { satake, rmax } => report_spin(satake, *rmax),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
