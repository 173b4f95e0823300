//! Curve records in JSON.

use std::path::Path;

use iwasawa_core::curve::Curve;
use iwasawa_core::module_model::RankSequence;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRecord {
    pub label: String,
    pub a_invariants: [i64; 5],
    pub conductor: u64,
    pub rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_sequence: Option<Vec<u32>>,
    pub fricke_sign: i8,
    pub torsion_bound: u32,
}

impl CurveRecord {
    pub fn to_curve(&self) -> iwasawa_core::Result<Curve> {
        Curve::new(
            self.label.clone(),
            self.a_invariants,
            self.conductor,
            self.rank,
            self.e_sequence.clone().map(RankSequence::new),
            self.fricke_sign,
            self.torsion_bound,
        )
    }
}

pub fn parse_curve(text: &str, origin: &str) -> CliResult<Curve> {
    let rec: CurveRecord =
        serde_json::from_str(text).map_err(|e| CliError::parse(origin, e.line() as u64, e.to_string()))?;
    Ok(rec.to_curve()?)
}

pub fn ingest_curve(path: &Path) -> CliResult<Curve> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_curve(&text, &path.display().to_string())
}
