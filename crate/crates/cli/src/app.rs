//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use iwasawa_core::analyzer::{gcd_ideal, Status};
use iwasawa_core::curve::{a_ell, classify_reduction, periods, verify_conductor, verify_fricke_sign, ConductorCheck};
use iwasawa_core::lambda::weierstrass;
use iwasawa_core::padic::is_prime;
use serde_json::{json, Value};

use crate::cache::TableCache;
use crate::curve_io::ingest_curve;
use crate::error::{CliError, CliResult};
use crate::pipeline::{default_level, run_until, Format, RunConfig, Stage, TableMode};
use crate::report::{emit, reduction_name, series_summary, GcdSummary, Report};

#[derive(Debug, Parser)]
#[command(name = "iwasawa", version, about = "Signed p-adic L-functions of elliptic curves at supersingular primes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curve data, conductor and root-number checks, reduction at p.
    CurveInfo(CurveArgs),
    /// Modular symbol table with Hecke validation.
    Symbols(RunArgs),
    /// Mazur–Tate elements and their compatibility.
    Theta(RunArgs),
    /// The signed pair and its gcd.
    Signed(RunArgs),
    /// gcd of the signed pair in the Iwasawa algebra.
    Gcd(RunArgs),
    /// Divisibility and prediction checks; exit 1 unless every check passes.
    Verify(RunArgs),
    /// Full report.
    Report(RunArgs),
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long, value_name = "FILE")]
    curve: PathBuf,
    #[arg(long = "p", value_name = "INT")]
    p: Option<u32>,
    #[arg(long, value_name = "INT", default_value_t = 30)]
    digits: u32,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_name = "FILE")]
    curve: PathBuf,
    #[arg(long = "p", value_name = "INT")]
    p: u32,
    /// n_max; defaults to 2 for p ≤ 7 and 1 above.
    #[arg(long, value_name = "INT")]
    level: Option<u32>,
    /// p-adic precision M.
    #[arg(long, value_name = "INT", default_value_t = 8)]
    prec: u32,
    #[arg(long, value_name = "INT", default_value_t = 30)]
    digits: u32,
    #[arg(long, value_name = "INT")]
    denom_bound: Option<i64>,
    /// Symbol table CSV for --import or --export.
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    #[arg(long, conflicts_with = "export", requires = "table")]
    import: bool,
    #[arg(long, requires = "table")]
    export: bool,
    /// Characteristic ideal of the fine Selmer group, e.g. `1` or `X*Phi1`.
    #[arg(long, value_name = "SPEC", default_value = "1")]
    fine_char: String,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format for `verify` and `report`.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        let mut c = RunConfig::new(&self.curve, self.p);
        c.n_max = self.level.unwrap_or_else(|| default_level(self.p));
        c.prec = self.prec;
        c.digits = self.digits;
        c.denom_bound = self.denom_bound;
        c.table = self.table.clone();
        c.table_mode = match (self.import, self.export) {
            (true, _) => TableMode::Import,
            (_, true) => TableMode::Export,
            _ => TableMode::Compute,
        };
        c.fine_char = self.fine_char.clone();
        c.out = self.out.clone();
        c.format = self.format;
        c.cache = TableCache::from_env();
        c
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn curve_info(args: &CurveArgs) -> CliResult<String> {
    let curve = ingest_curve(&args.curve)?;
    let conductor = match verify_conductor(&curve)? {
        ConductorCheck::Verified => "verified",
        ConductorCheck::SupportOnly => "support-only",
    };
    verify_fricke_sign(&curve)?;
    let (om_plus, om_minus) = periods(&curve, args.digits)?.as_f64();
    let traces: serde_json::Map<String, Value> = (2..50u64)
        .filter(|&l| is_prime(l) && !curve.is_bad(l))
        .map(|l| Ok((l.to_string(), json!(a_ell(&curve, l)?))))
        .collect::<iwasawa_core::Result<_>>()?;
    let mut v = json!({
        "label": curve.label,
        "a_invariants": curve.a,
        "conductor": curve.conductor,
        "conductor_check": conductor,
        "discriminant": curve.discriminant().to_string(),
        "rank": curve.rank,
        "e_sequence": curve.e_sequence.e,
        "fricke_sign": curve.fricke_sign,
        "fricke_sign_verified": true,
        "torsion_bound": curve.torsion_bound,
        "omega_plus": om_plus,
        "omega_minus": om_minus,
        "a_ell": traces,
    });
    if let Some(p) = args.p {
        let local = classify_reduction(&curve, p as u64);
        v["reduction"] = json!({
            "p": p,
            "type": reduction_name(local.kind),
            "a_p": local.a_p,
            "v_p_a_p": local.vp_ap,
        });
    }
    Ok(pretty(&v))
}

fn run_command(cmd: &Command) -> CliResult<(String, bool)> {
    let (args, stage) = match cmd {
        Command::CurveInfo(a) => return curve_info(a).map(|s| (s, true)),
        Command::Symbols(a) => (a, Stage::Hecke),
        Command::Theta(a) => (a, Stage::Compat),
        Command::Signed(a) | Command::Gcd(a) => (a, Stage::Gcd),
        Command::Verify(a) | Command::Report(a) => (a, Stage::Compare),
    };
    let config = args.config();
    let run = run_until(&config, stage)?;
    let head = |v: &mut Value| {
        v["curve"] = json!(run.curve.label);
        v["p"] = json!(config.p);
    };
    let text = match cmd {
        Command::Symbols(_) => {
            let t = run.table().expect("symbols stage ran");
            let hecke: Vec<Value> = run
                .hecke
                .iter()
                .map(|h| json!({"level": h.level, "checked": h.checked, "violations": h.violations}))
                .collect();
            let mut v = json!({
                "table": t.id(),
                "source": run.table.as_ref().map(|(_, s)| s),
                "max_level": t.max_level,
                "entries": t.len(),
                "symmetry_violations": t.symmetry_violations().len(),
                "hecke": hecke,
            });
            head(&mut v);
            pretty(&v)
        }
        Command::Theta(_) => {
            let thetas: Vec<Value> = run
                .thetas
                .iter()
                .map(|t| {
                    let inv = weierstrass(&t.body);
                    json!({
                        "level": t.level,
                        "coefficients": t.body.centered().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "mu": inv.mu,
                        "lambda": inv.lambda,
                    })
                })
                .collect();
            let compat: Vec<Value> = run
                .compat
                .iter()
                .map(|(n, f)| json!({"level": n, "status": if f.is_none() { "PASS" } else { "FAIL" }, "index": f}))
                .collect();
            let mut v = json!({
                "table": run.table().map(|t| t.id()),
                "prec": config.prec,
                "thetas": thetas,
                "compat": compat,
            });
            head(&mut v);
            pretty(&v)
        }
        Command::Signed(_) => {
            let pair = run.pair.as_ref().expect("extract stage ran");
            let g = run.gcd.as_ref().expect("gcd stage ran");
            let mut v = json!({
                "labels": pair.labels().map(|l| l.to_string()),
                "method": pair.method.to_string(),
                "series": series_summary(pair),
                "stabilized": pair.stabilized,
                "certified_precision": pair.certified_precision,
                "fit_agrees": pair.fit_agrees(),
                "gcd": g.to_string(),
                "gcd_certified": g.certified,
            });
            head(&mut v);
            pretty(&v)
        }
        Command::Gcd(_) => {
            let g = run.gcd.as_ref().expect("gcd stage ran");
            let mut v = json!({
                "gcd": GcdSummary::from(g),
                "ideal": gcd_ideal(g, config.p).to_string(),
            });
            head(&mut v);
            pretty(&v)
        }
        Command::Verify(_) if config.format == Format::Json => {
            let r = Report::from_run(&run);
            let mut v = json!({
                "verdict": r.overall(),
                "delta_E": r.delta_e,
                "checks": r.checks,
            });
            head(&mut v);
            pretty(&v)
        }
        Command::Verify(_) | Command::Report(_) => Report::from_run(&run).render(config.format),
        Command::CurveInfo(_) => unreachable!(),
    };
    let ok = !matches!(cmd, Command::Verify(_)) || run.verdict.overall() == Status::Pass;
    emit(&text, config.out.as_deref())?;
    Ok((String::new(), ok))
}

/// Runs the command line; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(&cli.command) {
        Ok((text, ok)) => {
            if !text.is_empty() {
                let out_path = match &cli.command {
                    Command::CurveInfo(a) => a.out.as_deref(),
                    _ => None,
                };
                if let Err(e) = emit(&text, out_path) {
                    let _ = writeln!(std::io::stderr(), "error: {e}");
                    return 1;
                }
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e @ CliError::Config(_)) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            2
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            1
        }
    }
}
