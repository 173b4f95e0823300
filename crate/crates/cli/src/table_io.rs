//! Symbol tables as CSV.
//!
//! ```text
//! curve,p
//! 37a1,17
//! k,a,plus_num,plus_den,minus_num,minus_den
//! 0,0,0,1,0,1
//! ...
//! ```

use std::io::{Read, Write};
use std::path::Path;

use iwasawa_core::modsym::{Provenance, Rat, SymbolTable};
use iwasawa_core::Error as CoreError;

use crate::error::{CliError, CliResult};

const ROW_HEADER: [&str; 6] = ["k", "a", "plus_num", "plus_den", "minus_num", "minus_den"];

pub fn write_table<W: Write>(table: &SymbolTable, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["curve", "p"])?;
    w.write_record([table.label.as_str(), &table.p.to_string()])?;
    w.write_record(ROW_HEADER)?;
    for (k, s) in table.symbols() {
        w.write_record([
            k.to_string(),
            s.a.to_string(),
            s.plus.numer().to_string(),
            s.plus.denom().to_string(),
            s.minus.numer().to_string(),
            s.minus.denom().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_table(table: &SymbolTable, path: &Path) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_table(table, std::io::BufWriter::new(file)).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        kind => CliError::parse(path.display().to_string(), line, format!("{kind:?}")),
    }
}

/// Reads a table. `expect` pins the curve label and prime.
pub fn read_table<R: Read>(input: R, origin: &str, expect: Option<(&str, u32)>) -> CliResult<SymbolTable> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = r.records();
    let mut next = |what: &str| -> CliResult<csv::StringRecord> {
        match records.next() {
            Some(Ok(rec)) => Ok(rec),
            Some(Err(e)) => {
                let line = e.position().map_or(0, |p| p.line());
                Err(CliError::parse(origin, line, e.to_string()))
            }
            None => Err(CliError::parse(origin, 0, format!("missing {what}"))),
        }
    };
    let line_of = |rec: &csv::StringRecord| rec.position().map_or(0, |p| p.line());

    let head = next("header")?;
    if head.iter().collect::<Vec<_>>() != ["curve", "p"] {
        return Err(CliError::parse(origin, line_of(&head), "expected header `curve,p`"));
    }
    let ctx = next("curve line")?;
    if ctx.len() != 2 {
        return Err(CliError::parse(origin, line_of(&ctx), "expected `label,p`"));
    }
    let label = ctx[0].to_string();
    let p: u32 = ctx[1].parse().map_err(|_| CliError::parse(origin, line_of(&ctx), "p is not an integer"))?;
    if let Some((want_label, want_p)) = expect {
        if want_label != label || want_p != p {
            return Err(CoreError::ContextMismatch(format!(
                "table is for {label} at p = {p}, expected {want_label} at p = {want_p}"
            ))
            .into());
        }
    }
    let rows = next("row header")?;
    if rows.iter().collect::<Vec<_>>() != ROW_HEADER {
        return Err(CliError::parse(origin, line_of(&rows), "expected row header"));
    }

    let mut parsed = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| CliError::parse(origin, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = line_of(&rec);
        let bad = |msg: &str| CliError::parse(origin, line, msg);
        if rec.len() != 6 {
            return Err(bad("expected 6 fields"));
        }
        let k: u32 = rec[0].parse().map_err(|_| bad("k is not an integer"))?;
        let a: u64 = rec[1].parse().map_err(|_| bad("a is not an integer"))?;
        let mut nums = [0i64; 4];
        for (i, slot) in nums.iter_mut().enumerate() {
            *slot = rec[i + 2].parse().map_err(|_| bad("symbol field is not an integer"))?;
        }
        if nums[1] <= 0 || nums[3] <= 0 {
            return Err(bad("denominators must be positive"));
        }
        parsed.push((line, k, a, Rat::new(nums[0], nums[1]), Rat::new(nums[2], nums[3])));
    }
    let max_level = parsed.iter().map(|r| r.1).max().unwrap_or(0);
    let mut table = SymbolTable::new(label, p, max_level, Provenance::Imported);
    for (line, k, a, plus, minus) in parsed {
        table.insert(k, a, plus, minus).map_err(|e| CliError::parse(origin, line, e.to_string()))?;
    }
    Ok(table)
}

pub fn import_table(path: &Path, expect: Option<(&str, u32)>) -> CliResult<SymbolTable> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_table(std::io::BufReader::new(file), &path.display().to_string(), expect)
}
