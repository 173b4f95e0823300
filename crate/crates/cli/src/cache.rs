//! On-disk cache of computed symbol tables.

use std::path::{Path, PathBuf};

use iwasawa_core::modsym::{Provenance, SymbolTable};

use crate::error::CliResult;
use crate::table_io::{export_table, import_table};

pub const CACHE_ENV: &str = "IWASAWA_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey {
    pub label: String,
    pub p: u32,
    pub level: u32,
    pub digits: u32,
    pub bound: i64,
}

impl CacheKey {
    pub fn file_name(&self) -> String {
        let label: String =
            self.label.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
        format!("{label}_p{}_k{}_d{}_b{}.csv", self.p, self.level, self.digits, self.bound)
    }
}

#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// A cached table, or `None` when absent or unreadable.
    pub fn load(&self, key: &CacheKey) -> Option<SymbolTable> {
        let path = self.path(key);
        if !path.exists() {
            return None;
        }
        let mut t = import_table(&path, Some((&key.label, key.p))).ok()?;
        if t.max_level < key.level {
            return None;
        }
        t.provenance = Provenance::Computed { digits: key.digits };
        Some(t)
    }

    pub fn store(&self, key: &CacheKey, table: &SymbolTable) -> CliResult<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| crate::error::CliError::io(&self.dir, e))?;
        let tmp = self.dir.join(format!(".{}.tmp", key.file_name()));
        export_table(table, &tmp)?;
        std::fs::rename(&tmp, self.path(key)).map_err(|e| crate::error::CliError::io(self.path(key), e))
    }
}
