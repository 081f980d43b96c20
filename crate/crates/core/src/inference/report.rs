//! Composition of a full test run into a serializable report.

use super::cache;
use super::null::{critical_value, p_value, simulate_grid_null, GridNull};
use super::{StatConfig, StatId, Tail};
use crate::empirical::TwoSampleData;
use crate::error::{Error, Result};
use crate::grid::{bucket_minima, default_resolution, evaluate_p, evaluate_u, DecileBuckets, DyadicGrid, GridCap, ProcessKind};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

/// Grid selection for a test run: a size cap applied to N, or an explicit
/// resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridChoice {
    Cap(GridCap),
    Resolution(u32),
}

impl GridChoice {
    pub fn resolve(&self, total: usize) -> Result<DyadicGrid> {
        match self {
            GridChoice::Cap(cap) => default_resolution(total, *cap),
            GridChoice::Resolution(s) => Ok(DyadicGrid::new(*s)),
        }
    }
}

/// Everything a reproducible test run needs besides the data.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
    pub grid: GridChoice,
    pub epsilon: Option<f64>,
    pub interval: Option<(f64, f64)>,
    /// Cache directory for simulated nulls; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
    /// Attach per-decile barriers and observed local minima for the grid
    /// statistics.
    pub with_barriers: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            replicates: 10_000,
            seed: 0,
            grid: GridChoice::Cap(GridCap::MainBody),
            epsilon: None,
            interval: None,
            cache_dir: None,
            with_barriers: true,
        }
    }
}

impl RunSettings {
    pub(crate) fn stat_config(&self, stat: StatId, total: usize) -> Result<StatConfig> {
        let grid = match stat {
            StatId::U | StatId::P => Some(self.grid.resolve(total)?),
            _ => None,
        };
        Ok(StatConfig {
            grid,
            epsilon: self.epsilon,
            interval: self.interval,
        })
    }
}

/// Outcome of one statistic on one dataset, with its simulated critical
/// value and p-value, and (for the grid statistics) the per-decile barriers
/// and observed local minima. Serializes with stable field names.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TestReport {
    pub statistic: String,
    pub value: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub decision: Decision,
    pub tail: Tail,
    pub barriers: Option<Vec<Option<f64>>>,
    pub local_minima: Option<Vec<Option<f64>>>,
    pub m: usize,
    pub n: usize,
    pub d: Option<usize>,
    pub epsilon: Option<f64>,
    pub interval: Option<(f64, f64)>,
    pub seed: u64,
    pub replicates: usize,
    pub degenerate_null: bool,
}

impl TestReport {
    pub fn rejected(&self) -> bool {
        self.decision == Decision::Reject
    }
}

fn grid_null_cached(
    m: usize,
    n: usize,
    grid: &DyadicGrid,
    replicates: usize,
    seed: u64,
    cache_dir: Option<&std::path::Path>,
) -> Result<GridNull> {
    let Some(dir) = cache_dir else {
        return simulate_grid_null(m, n, grid, replicates, seed);
    };
    // Bucket minima are cached as pseudo-statistics keyed u.I1 .. p.I10 next
    // to the plain stat entries, all from the same replicate streams.
    let descriptor = format!("d{}", grid.d());
    let key = |stat: &str| cache::NullCacheKey {
        stat: stat.to_string(),
        m,
        n,
        descriptor: descriptor.clone(),
        replicates,
        seed,
    };
    let buckets = DecileBuckets::for_grid(grid);
    let ranges = buckets.ranges();

    let mut all_present = true;
    for stat in [StatId::U, StatId::P] {
        if cache::load_values(dir, &key(stat.as_str()))?.is_none() {
            all_present = false;
        }
        for (k, range) in ranges.iter().enumerate() {
            if range.is_some()
                && cache::load_values(dir, &key(&format!("{}.I{}", stat.as_str(), k + 1)))?.is_none()
            {
                all_present = false;
            }
        }
    }

    if !all_present {
        let gn = simulate_grid_null(m, n, grid, replicates, seed)?;
        cache::store(dir, &gn.stat_u)?;
        cache::store(dir, &gn.stat_p)?;
        for kind in [ProcessKind::U, ProcessKind::P] {
            let stat = if kind == ProcessKind::U { StatId::U } else { StatId::P };
            for k in 0..10 {
                if let Some(values) = gn.bucket_values(kind, k) {
                    cache::store_values(dir, &key(&format!("{}.I{}", stat.as_str(), k + 1)), values)?;
                }
            }
        }
        return Ok(gn);
    }

    let load = |stat: String| -> Result<Vec<f64>> {
        cache::load_values(dir, &key(&stat))?.ok_or_else(|| Error::Cache {
            path: dir.join(key(&stat).file_name()).display().to_string(),
            message: "cache entry vanished between probe and load".into(),
        })
    };
    let mut u_minima: [Option<Vec<f64>>; 10] = Default::default();
    let mut p_minima: [Option<Vec<f64>>; 10] = Default::default();
    for k in 0..10 {
        if ranges[k].is_some() {
            u_minima[k] = Some(load(format!("u.I{}", k + 1))?);
            p_minima[k] = Some(load(format!("p.I{}", k + 1))?);
        }
    }
    Ok(GridNull::assemble(
        grid.clone(),
        m,
        n,
        replicates,
        seed,
        load("u".into())?,
        load("p".into())?,
        u_minima,
        p_minima,
    ))
}

/// Runs one statistic end to end: value, simulated critical value, p-value,
/// decision, and (for U/P) barriers with observed bucket minima. Fully
/// seeded; identical settings give identical reports.
pub fn run_test(data: &TwoSampleData, stat: StatId, settings: &RunSettings) -> Result<TestReport> {
    let cfg = settings.stat_config(stat, data.total())?;
    let value = super::statistic(stat, data, &cfg)?;
    let tail = stat.tail();

    let is_grid_stat = matches!(stat, StatId::U | StatId::P);
    let grid_null = if is_grid_stat && settings.with_barriers {
        let grid = cfg.grid.as_ref().expect("grid stats carry a grid");
        Some(grid_null_cached(
            data.m(),
            data.n(),
            grid,
            settings.replicates,
            settings.seed,
            settings.cache_dir.as_deref(),
        )?)
    } else {
        None
    };

    // Without a subinterval the grid-null stat column is the same simulation
    // as a standalone run, so reuse it instead of paying twice.
    let null = match (&grid_null, settings.interval) {
        (Some(gn), None) => {
            if stat == StatId::U {
                gn.stat_u.clone()
            } else {
                gn.stat_p.clone()
            }
        }
        _ => cache::load_or_simulate(
            stat,
            data.m(),
            data.n(),
            &cfg,
            settings.replicates,
            settings.seed,
            settings.cache_dir.as_deref(),
        )?,
    };

    let crit = critical_value(&null, settings.alpha, tail)?;
    let p = p_value(&null, value, tail);
    // Strict inequalities on both tails: the rejection region is exactly the
    // set whose null mass the critical-value construction bounds by alpha,
    // which keeps the size at or below alpha even on the coarse value
    // lattices of equal-sample designs.
    let decision = match tail {
        Tail::Lower => value < crit.value,
        Tail::Upper => value > crit.value,
    };

    let (barriers, local_minima) = match &grid_null {
        None => (None, None),
        Some(gn) => {
            let kind = if stat == StatId::U { ProcessKind::U } else { ProcessKind::P };
            let grid = cfg.grid.as_ref().expect("grid stats carry a grid");
            let bars = match kind {
                ProcessKind::U => evaluate_u(data, grid)?,
                ProcessKind::P => evaluate_p(data, grid)?,
            };
            let buckets = DecileBuckets::for_grid(grid);
            let minima = bucket_minima(&bars, &buckets);
            (
                Some(gn.barriers(kind, settings.alpha)?.to_vec()),
                Some(minima.to_vec()),
            )
        }
    };

    let resolved_eps = match stat {
        StatId::Uc | StatId::IndexCc | StatId::IndexCcc => {
            Some(settings.epsilon.unwrap_or_else(|| super::default_epsilon(data.total())))
        }
        _ => None,
    };

    Ok(TestReport {
        statistic: stat.as_str().to_string(),
        value,
        critical_value: crit.value,
        p_value: p,
        alpha: settings.alpha,
        decision: if decision { Decision::Reject } else { Decision::Accept },
        tail,
        barriers,
        local_minima,
        m: data.m(),
        n: data.n(),
        d: cfg.grid.as_ref().map(|g| g.d()),
        epsilon: resolved_eps,
        interval: settings.interval,
        seed: settings.seed,
        replicates: settings.replicates,
        degenerate_null: crit.degenerate,
    })
}
