//! Disk cache for simulated null distributions, keyed by
//! (statistic, m, n, grid descriptor, replicates, seed).
//!
//! Files are plain CSV with one metadata header line and one replicate value
//! per row at full round-trip precision. Writes go through a temp file and a
//! rename, so concurrent readers never observe a partial file.

use super::{plan, simulate_null, NullDistribution, StatConfig, StatId};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

const MAGIC: &str = "# ccurves-null v1";

/// Cache key for a null distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullCacheKey {
    pub stat: String,
    pub m: usize,
    pub n: usize,
    pub descriptor: String,
    pub replicates: usize,
    pub seed: u64,
}

impl NullCacheKey {
    pub fn file_name(&self) -> String {
        format!(
            "{}_m{}_n{}_{}_r{}_s{}.csv",
            self.stat, self.m, self.n, self.descriptor, self.replicates, self.seed
        )
    }
}

fn header(key: &NullCacheKey) -> String {
    format!(
        "{MAGIC} stat={} m={} n={} desc={} replicates={} seed={}",
        key.stat, key.m, key.n, key.descriptor, key.replicates, key.seed
    )
}

pub(crate) fn store_values(dir: &Path, key: &NullCacheKey, values: &[f64]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(key.file_name());
    let tmp = dir.join(format!(".{}.tmp", key.file_name()));
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        writeln!(w, "{}", header(key))?;
        let mut buf = String::new();
        for v in values {
            buf.clear();
            let _ = writeln!(buf, "{v}");
            w.write_all(buf.as_bytes())?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(())
}

pub(crate) fn load_values(dir: &Path, key: &NullCacheKey) -> Result<Option<Vec<f64>>> {
    let path = dir.join(key.file_name());
    if !path.exists() {
        return Ok(None);
    }
    let bad = |message: String| Error::Cache { path: path.display().to_string(), message };
    let reader = BufReader::new(fs::File::open(&path)?);
    let mut lines = reader.lines();
    let head = lines
        .next()
        .ok_or_else(|| bad("empty cache file".into()))??;
    if head != header(key) {
        return Err(bad(format!("header mismatch: {head:?}")));
    }
    let mut values = Vec::with_capacity(key.replicates);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|e| bad(format!("line {}: {e}", i + 2)))?;
        values.push(v);
    }
    if values.len() != key.replicates {
        return Err(bad(format!(
            "expected {} replicates, found {}",
            key.replicates,
            values.len()
        )));
    }
    Ok(Some(values))
}

pub(crate) fn store(dir: &Path, null: &NullDistribution) -> Result<()> {
    let key = NullCacheKey {
        stat: null.stat.as_str().to_string(),
        m: null.m,
        n: null.n,
        descriptor: null.descriptor.clone(),
        replicates: null.replicates,
        seed: null.seed,
    };
    store_values(dir, &key, null.values())
}

/// Loads the null distribution from the cache or simulates and stores it.
/// With `dir = None` this is a plain simulation.
pub fn load_or_simulate(
    stat: StatId,
    m: usize,
    n: usize,
    cfg: &StatConfig,
    replicates: usize,
    seed: u64,
    dir: Option<&Path>,
) -> Result<NullDistribution> {
    let descriptor = plan(stat, cfg, m + n)?.descriptor();
    if let Some(dir) = dir {
        let key = NullCacheKey {
            stat: stat.as_str().to_string(),
            m,
            n,
            descriptor: descriptor.clone(),
            replicates,
            seed,
        };
        if let Some(values) = load_values(dir, &key)? {
            // Values were stored sorted; from_replicates re-sorts, which is a
            // no-op but keeps the invariant local.
            return Ok(NullDistribution::from_replicates(stat, m, n, descriptor, seed, values));
        }
        let null = simulate_null(stat, m, n, cfg, replicates, seed)?;
        store(dir, &null)?;
        return Ok(null);
    }
    simulate_null(stat, m, n, cfg, replicates, seed)
}
