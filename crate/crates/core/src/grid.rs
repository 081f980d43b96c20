//! Dyadic grid construction, evaluation of the weighted rank processes over
//! it, bar-plot assembly, and decile-interval bucketing.

use crate::empirical::{RankCounts, TwoSampleData};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Dyadic grid at resolution s: points j / 2^(s+1) for j = 1..d with
/// d = 2^(s+1) - 1. The points are strictly increasing and symmetric about
/// one half, and each level is nested in the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicGrid {
    s: u32,
    points: Vec<f64>,
}

impl DyadicGrid {
    pub fn new(s: u32) -> Self {
        assert!(s <= 40, "resolution {s} would overflow the grid");
        let denom = (1u64 << (s + 1)) as f64;
        let d = (1usize << (s + 1)) - 1;
        let points = (1..=d).map(|j| j as f64 / denom).collect();
        Self { s, points }
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Number of grid points d = 2^(s+1) - 1.
    pub fn d(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// How the grid size D(N) is chosen from the total sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridCap {
    /// The default working size: s = 6, D = 127.
    MainBody,
    /// Largest D = 2^(s+1) - 1 not exceeding N.
    Largest,
    /// Largest D not exceeding floor(N / ln^3 N - 1), floored at s = 0. This
    /// is the growth cap under which the unpooled min statistic stays
    /// consistent.
    UStar,
}

/// Picks the grid resolution for a pooled sample of size `total`.
pub fn default_resolution(total: usize, cap: GridCap) -> Result<DyadicGrid> {
    if total < 4 {
        return Err(Error::Domain(format!("need N >= 4 to choose a grid, got {total}")));
    }
    let largest_s_with_d_at_most = |limit: f64| -> u32 {
        let mut s = 0u32;
        while ((1u64 << (s + 2)) - 1) as f64 <= limit {
            s += 1;
        }
        s
    };
    let grid = match cap {
        GridCap::MainBody => DyadicGrid::new(6),
        GridCap::Largest => DyadicGrid::new(largest_s_with_d_at_most(total as f64)),
        GridCap::UStar => {
            let ln = (total as f64).ln();
            let dcap = (total as f64 / (ln * ln * ln) - 1.0).floor();
            if dcap < 3.0 {
                DyadicGrid::new(0)
            } else {
                DyadicGrid::new(largest_s_with_d_at_most(dcap))
            }
        }
    };
    Ok(grid)
}

/// Which weighted process a bar plot holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcessKind {
    /// Unpooled process: eta_N times the empirical comparison curve.
    U,
    /// Pooled process: eta_N times the empirical contrast comparison curve.
    P,
}

impl std::fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProcessKind::U => write!(f, "U"),
            ProcessKind::P => write!(f, "P"),
        }
    }
}

/// Process values over the grid points, ready to draw as bars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarPlot {
    pub grid: DyadicGrid,
    pub kind: ProcessKind,
    pub bars: Vec<f64>,
    pub eta: f64,
    pub m: usize,
    pub n: usize,
}

pub(crate) fn bars_from_counts(counts: &RankCounts, grid: &DyadicGrid, kind: ProcessKind) -> Vec<f64> {
    let eta = counts.eta();
    grid.points()
        .iter()
        .map(|&p| {
            eta * match kind {
                ProcessKind::U => counts.cc_hat(p),
                ProcessKind::P => counts.ccc_hat(p),
            }
        })
        .collect()
}

fn evaluate(data: &TwoSampleData, grid: &DyadicGrid, kind: ProcessKind) -> Result<BarPlot> {
    let ranks = data.ranks()?;
    let bars = bars_from_counts(&ranks.counts(), grid, kind);
    Ok(BarPlot {
        grid: grid.clone(),
        kind,
        bars,
        eta: data.eta(),
        m: data.m(),
        n: data.n(),
    })
}

/// Bars of the unpooled process: eta_N (p - G_n(F_m^{-1}(p))) / sqrt(p(1-p)).
pub fn evaluate_u(data: &TwoSampleData, grid: &DyadicGrid) -> Result<BarPlot> {
    evaluate(data, grid, ProcessKind::U)
}

/// Bars of the pooled process:
/// eta_N (F_m(H_N^{-1}(p)) - G_n(H_N^{-1}(p))) / sqrt(p(1-p)).
pub fn evaluate_p(data: &TwoSampleData, grid: &DyadicGrid) -> Result<BarPlot> {
    evaluate(data, grid, ProcessKind::P)
}

/// The ten decile intervals I_1 = [0, 0.1], I_2 = (0.1, 0.2], ...,
/// I_10 = (0.9, 1], with each grid point assigned to exactly one of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecileBuckets {
    /// 1-based bucket index per grid point.
    assignment: Vec<u8>,
}

impl DecileBuckets {
    pub fn for_grid(grid: &DyadicGrid) -> Self {
        let assignment = grid.points().iter().map(|&p| Self::bucket_of(p)).collect();
        Self { assignment }
    }

    /// Smallest k in 1..=10 with p <= k/10.
    pub fn bucket_of(p: f64) -> u8 {
        for k in 1..=10u8 {
            if p <= k as f64 / 10.0 {
                return k;
            }
        }
        10
    }

    pub fn assignment(&self) -> &[u8] {
        &self.assignment
    }

    /// Grid-point index ranges per bucket; `None` for buckets without points.
    pub fn ranges(&self) -> [Option<std::ops::Range<usize>>; 10] {
        let mut out: [Option<std::ops::Range<usize>>; 10] = Default::default();
        for (i, &b) in self.assignment.iter().enumerate() {
            let slot = &mut out[(b - 1) as usize];
            match slot {
                None => *slot = Some(i..i + 1),
                Some(r) => r.end = i + 1,
            }
        }
        out
    }
}

/// Local minima L(., I_k): the minimum bar value over the grid points inside
/// each decile interval. Intervals containing no grid points stay empty.
pub fn bucket_minima(bars: &BarPlot, buckets: &DecileBuckets) -> [Option<f64>; 10] {
    let mut out = [None; 10];
    for (bar, &b) in bars.bars.iter().zip(buckets.assignment()) {
        let slot = &mut out[(b - 1) as usize];
        *slot = Some(match *slot {
            None => *bar,
            Some(cur) => bar.min(cur),
        });
    }
    out
}

/// B-plot rows as CSV with columns `j,p,bar,bucket`.
pub fn bplot_csv(bars: &BarPlot, buckets: &DecileBuckets) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# process={} m={} n={} d={} eta={}",
        bars.kind, bars.m, bars.n, bars.grid.d(), bars.eta
    );
    let _ = writeln!(out, "j,p,bar,bucket");
    for (i, (&p, &bar)) in bars.grid.points().iter().zip(&bars.bars).enumerate() {
        let _ = writeln!(out, "{},{},{},{}", i + 1, p, bar, buckets.assignment()[i]);
    }
    out
}
