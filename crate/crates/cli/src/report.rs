//! Deterministic JSON and CSV reports.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use iwasawa_core::analyzer::{Check, GcdReport, Verdict};
use iwasawa_core::curve::{ConductorCheck, ReductionType};
use iwasawa_core::signed::SignedPair;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::pipeline::{Format, Run, TableMode, TableSource};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdSummary {
    pub mu: u32,
    pub x: u32,
    pub phi: BTreeMap<String, u32>,
    pub residual: String,
    pub generator: String,
    pub certified: bool,
}

impl From<&GcdReport> for GcdSummary {
    fn from(g: &GcdReport) -> Self {
        let residual = match &g.residual {
            None => "1".to_string(),
            Some(r) => {
                let c = r.centered();
                let d = r.degree().unwrap_or(0);
                let terms: Vec<String> = c[..=d].iter().map(i128::to_string).collect();
                format!("[{}]", terms.join(","))
            }
        };
        Self {
            mu: g.mu,
            x: g.x_exponent,
            phi: g.phi_exponents.iter().map(|(n, e)| (format!("Phi{n}"), *e)).collect(),
            residual,
            generator: g.to_string(),
            certified: g.certified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub status: String,
    pub detail: String,
}

impl From<&Check> for CheckRow {
    fn from(c: &Check) -> Self {
        Self { name: c.name.clone(), status: c.status.to_string(), detail: c.detail.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub curve_file: String,
    pub p: u32,
    pub level: u32,
    pub prec: u32,
    pub digits: u32,
    pub denom_bound: i64,
    pub table: Option<String>,
    pub table_mode: TableMode,
    pub fine_char: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub label: String,
    pub level: u32,
    pub mu: Option<u32>,
    pub lambda: Option<u32>,
    pub divisible_by_x: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub conductor: String,
    pub reduction: String,
    pub a_p: i64,
    pub table: Option<String>,
    pub table_source: Option<TableSource>,
    pub hecke_passed: Vec<u32>,
    pub compat_passed: Vec<u32>,
    pub method: Option<String>,
    pub series: Vec<SeriesSummary>,
    pub certified_precision: Option<u32>,
    pub stabilized: Option<bool>,
    pub fit_agrees: Option<bool>,
    pub gcd_certified: Option<bool>,
    pub overall: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub curve: String,
    pub p: u32,
    pub gcd: Option<GcdSummary>,
    #[serde(rename = "delta_E")]
    pub delta_e: Option<u8>,
    pub checks: Vec<CheckRow>,
    pub config: ConfigSummary,
    pub certification: Certification,
}

pub fn reduction_name(kind: ReductionType) -> &'static str {
    match kind {
        ReductionType::GoodOrdinary => "good-ordinary",
        ReductionType::GoodSupersingular => "good-supersingular",
        ReductionType::Multiplicative { split: true } => "split-multiplicative",
        ReductionType::Multiplicative { split: false } => "nonsplit-multiplicative",
        ReductionType::Additive => "additive",
    }
}

pub fn series_summary(pair: &SignedPair) -> Vec<SeriesSummary> {
    pair.series
        .iter()
        .map(|s| SeriesSummary {
            label: s.label.to_string(),
            level: s.level,
            mu: s.invariants.mu,
            lambda: s.invariants.lambda,
            divisible_by_x: s.divisible_by_x(),
        })
        .collect()
}

impl Report {
    pub fn from_run(run: &Run) -> Self {
        let c = &run.config;
        let verdict: &Verdict = &run.verdict;
        let config = ConfigSummary {
            curve_file: c.curve.display().to_string(),
            p: c.p,
            level: c.n_max,
            prec: c.prec,
            digits: c.digits,
            denom_bound: c.bound(run.curve.torsion_bound),
            table: c.table.as_ref().map(|t| t.display().to_string()),
            table_mode: c.table_mode,
            fine_char: c.fine_char.clone(),
        };
        let pair = run.pair.as_ref();
        let certification = Certification {
            conductor: match run.conductor {
                ConductorCheck::Verified => "verified".into(),
                ConductorCheck::SupportOnly => "support-only".into(),
            },
            reduction: reduction_name(run.local.kind).into(),
            a_p: run.local.a_p,
            table: run.table().map(|t| t.id()),
            table_source: run.table.as_ref().map(|(_, s)| *s),
            hecke_passed: run.hecke.iter().filter(|h| h.passed()).map(|h| h.level).collect(),
            compat_passed: run.compat.iter().filter(|(_, f)| f.is_none()).map(|(n, _)| *n).collect(),
            method: pair.map(|p| p.method.to_string()),
            series: pair.map(series_summary).unwrap_or_default(),
            certified_precision: pair.map(|p| p.certified_precision),
            stabilized: pair.map(|p| p.stabilized),
            fit_agrees: pair.and_then(|p| p.fit_agrees()),
            gcd_certified: run.gcd.as_ref().map(|g| g.certified),
            overall: verdict.overall().to_string(),
        };
        Self {
            curve: run.curve.label.clone(),
            p: c.p,
            gcd: run.gcd.as_ref().map(GcdSummary::from),
            delta_e: verdict.delta_e,
            checks: verdict.checks.iter().map(CheckRow::from).collect(),
            config,
            certification,
        }
    }

    pub fn overall(&self) -> &str {
        &self.certification.overall
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// One row per check.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["curve", "p", "name", "status", "detail"])?;
        for c in &self.checks {
            w.write_record([self.curve.as_str(), &self.p.to_string(), &c.name, &c.status, &c.detail])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => {
                let mut buf = Vec::new();
                self.write_csv(&mut buf).expect("in-memory write");
                String::from_utf8(buf).expect("csv is utf-8")
            }
        }
    }
}

/// Writes to `path`, or standard output when `None`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> CliResult<()> {
    emit(&report.render(format), path)
}
