//! Curve file to verdict, stage by stage.

use std::path::PathBuf;

use iwasawa_core::analyzer::{compare_predictions, gcd_signed_pair, theorem_consistency, GcdReport, Status, Verdict};
use iwasawa_core::curve::{classify_reduction, verify_conductor, verify_fricke_sign, ConductorCheck, Curve, LocalData};
use iwasawa_core::modsym::{compute_table, default_denominator_bound, validate_hecke, HeckeReport, SymbolTable};
use iwasawa_core::module_model::FactoredIdeal;
use iwasawa_core::padic::is_prime;
use iwasawa_core::signed::{extract_plus_minus, extract_sharp_flat, SignedPair};
use iwasawa_core::theta::{build_thetas, check_compat, ThetaElement};
use iwasawa_core::Error as CoreError;
use serde::{Deserialize, Serialize};

use crate::cache::{CacheKey, TableCache};
use crate::curve_io::ingest_curve;
use crate::error::{CliError, CliResult, StageExt};
use crate::report::Report;
use crate::table_io::{export_table, import_table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Symbols,
    Hecke,
    Theta,
    Compat,
    Extract,
    Gcd,
    Compare,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Symbols => "symbols",
            Stage::Hecke => "validate_hecke",
            Stage::Theta => "theta",
            Stage::Compat => "compat",
            Stage::Extract => "extract",
            Stage::Gcd => "gcd",
            Stage::Compare => "compare",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMode {
    /// Compute, or reuse the cache.
    #[default]
    Compute,
    /// Read the table from `--table`, skipping numerics.
    Import,
    /// Compute and write the table to `--table`.
    Export,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub curve: PathBuf,
    pub p: u32,
    pub n_max: u32,
    pub prec: u32,
    pub digits: u32,
    pub denom_bound: Option<i64>,
    pub table: Option<PathBuf>,
    pub table_mode: TableMode,
    pub fine_char: String,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub cache: Option<TableCache>,
}

/// `n_max` used when none is given.
pub fn default_level(p: u32) -> u32 {
    if p <= 7 {
        2
    } else {
        1
    }
}

impl RunConfig {
    pub fn new(curve: impl Into<PathBuf>, p: u32) -> Self {
        Self {
            curve: curve.into(),
            p,
            n_max: default_level(p),
            prec: 8,
            digits: 30,
            denom_bound: None,
            table: None,
            table_mode: TableMode::Compute,
            fine_char: "1".into(),
            out: None,
            format: Format::Json,
            cache: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.p == 2 || !is_prime(self.p as u64) {
            return Err(CliError::Config(format!("p = {} is not an odd prime", self.p)));
        }
        if self.prec < 2 {
            return Err(CliError::Config("precision M must be at least 2".into()));
        }
        if self.digits < 15 {
            return Err(CliError::Config("at least 15 real digits are needed".into()));
        }
        if matches!(self.denom_bound, Some(b) if b < 1) {
            return Err(CliError::Config("denominator bound must be positive".into()));
        }
        if self.table_mode != TableMode::Compute && self.table.is_none() {
            return Err(CliError::Config("--import/--export need --table".into()));
        }
        FactoredIdeal::parse(&self.fine_char, self.p).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    /// Highest symbol level the pipeline reads.
    pub fn table_level(&self) -> u32 {
        self.n_max + 2
    }

    /// Highest theta level.
    pub fn theta_top(&self) -> u32 {
        self.n_max + 1
    }

    pub fn bound(&self, torsion_bound: u32) -> i64 {
        self.denom_bound.unwrap_or_else(|| default_denominator_bound(torsion_bound, self.p, self.prec))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSource {
    Computed,
    Cached,
    Imported,
}

/// Everything the stages produced, in order.
#[derive(Clone, Debug)]
pub struct Run {
    pub config: RunConfig,
    pub curve: Curve,
    pub conductor: ConductorCheck,
    pub local: LocalData,
    pub table: Option<(SymbolTable, TableSource)>,
    pub hecke: Vec<HeckeReport>,
    pub thetas: Vec<ThetaElement>,
    /// `(n, failing coefficient)` for each compatibility check.
    pub compat: Vec<(u32, Option<usize>)>,
    pub pair: Option<SignedPair>,
    pub gcd: Option<GcdReport>,
    pub verdict: Verdict,
}

impl Run {
    pub fn table(&self) -> Option<&SymbolTable> {
        self.table.as_ref().map(|(t, _)| t)
    }
}

fn load_table(config: &RunConfig, curve: &Curve) -> CliResult<(SymbolTable, TableSource)> {
    let stage = Stage::Symbols.name();
    let level = config.table_level();
    if config.table_mode == TableMode::Import {
        let path = config.table.as_deref().expect("validated");
        let table = import_table(path, Some((&curve.label, config.p)))?;
        return Ok((table, TableSource::Imported));
    }
    let bound = config.bound(curve.torsion_bound);
    let key = CacheKey { label: curve.label.clone(), p: config.p, level, digits: config.digits, bound };
    let cached = config.cache.as_ref().and_then(|c| c.load(&key));
    let (table, source) = match cached {
        Some(t) => (t, TableSource::Cached),
        None => {
            let t = compute_table(curve, config.p, level, config.digits, bound).stage(stage)?;
            if let Some(c) = &config.cache {
                c.store(&key, &t)?;
            }
            (t, TableSource::Computed)
        }
    };
    if config.table_mode == TableMode::Export {
        export_table(&table, config.table.as_deref().expect("validated"))?;
    }
    Ok((table, source))
}

/// Runs the stages up to and including `last`.
pub fn run_until(config: &RunConfig, last: Stage) -> CliResult<Run> {
    config.validate()?;
    let curve = ingest_curve(&config.curve)?;
    let conductor = verify_conductor(&curve).stage(Stage::Ingest.name())?;
    verify_fricke_sign(&curve).stage(Stage::Ingest.name())?;
    let local = classify_reduction(&curve, config.p as u64);
    let mut run = Run {
        config: config.clone(),
        curve,
        conductor,
        local,
        table: None,
        hecke: Vec::new(),
        thetas: Vec::new(),
        compat: Vec::new(),
        pair: None,
        gcd: None,
        verdict: Verdict::default(),
    };
    if last == Stage::Ingest {
        return Ok(run);
    }

    let (table, source) = load_table(config, &run.curve)?;
    let level = config.table_level();
    table.check_complete(level).stage(Stage::Symbols.name())?;
    run.table = Some((table.clone(), source));
    let table = &table;
    if last == Stage::Symbols {
        return Ok(run);
    }

    let a_p = run.local.a_p;
    for n in 0..level {
        let r = validate_hecke(table, a_p, n).stage(Stage::Hecke.name())?;
        let (status, detail) = if r.passed() {
            (Status::Pass, format!("{} residues", r.checked))
        } else {
            (Status::Fail, format!("violations at residues {:?}", r.violations))
        };
        run.verdict.push(format!("Hecke[{n}]"), status, detail);
        run.hecke.push(r);
    }
    if last == Stage::Hecke {
        return Ok(run);
    }

    run.thetas = build_thetas(table, config.theta_top(), config.prec).stage(Stage::Theta.name())?;
    if last == Stage::Theta {
        return Ok(run);
    }

    for n in 2..=config.theta_top() {
        let (status, detail, failed) = match check_compat(&run.thetas, n, a_p) {
            Ok(()) => (Status::Pass, "holds".to_string(), None),
            Err(CoreError::CompatFailed { index, .. }) => {
                (Status::Fail, format!("coefficient {index} differs"), Some(index))
            }
            Err(e) => return Err(CliError::Stage { stage: Stage::Compat.name(), source: e }),
        };
        run.verdict.push(format!("Compat[{n}]"), status, detail);
        run.compat.push((n, failed));
    }
    if last == Stage::Compat {
        return Ok(run);
    }

    let pair = if a_p == 0 { extract_plus_minus(&run.thetas, a_p) } else { extract_sharp_flat(&run.thetas, a_p) };
    run.pair = Some(pair.stage(Stage::Extract.name())?);
    if last == Stage::Extract {
        return Ok(run);
    }

    let gcd = gcd_signed_pair(run.pair.as_ref().unwrap()).stage(Stage::Gcd.name())?;
    run.gcd = Some(gcd);
    if last == Stage::Gcd {
        return Ok(run);
    }

    let fine = FactoredIdeal::parse(&config.fine_char, config.p).stage(Stage::Compare.name())?;
    let g = run.gcd.as_ref().unwrap();
    run.verdict.extend(theorem_consistency(g, config.p, &fine));
    run.verdict.extend(compare_predictions(g, config.p, &run.curve.e_sequence, &fine));
    Ok(run)
}

pub fn run_pipeline(config: &RunConfig) -> CliResult<Report> {
    let run = run_until(config, Stage::Compare)?;
    Ok(Report::from_run(&run))
}
