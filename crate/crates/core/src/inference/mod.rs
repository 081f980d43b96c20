//! Test statistics, the Monte Carlo null engine, critical values, p-values,
//! acceptance-region barriers, and test reports.

mod cache;
mod null;
mod report;

pub use cache::{load_or_simulate, NullCacheKey};
pub use null::{
    barriers, critical_value, familywise_barriers, p_value, simulate_grid_null, simulate_null,
    simulate_null_joint, simulate_null_with_model, CriticalValue, GridNull, NullDistribution,
};
pub use report::{run_test, Decision, GridChoice, RunSettings, TestReport};

use crate::empirical::{weight, RankCounts, TwoSampleData};
use crate::error::{Error, Result};
use crate::grid::{DyadicGrid, ProcessKind};
use serde::{Deserialize, Serialize};

/// The test statistics of the suite.
///
/// `U` and `P` are the min-type statistics of the unpooled/pooled weighted
/// processes over a dyadic grid; small values are significant. `Ks` and `Auc`
/// are the classical one-sided Kolmogorov-Smirnov and AUC-type competitors;
/// large values are significant. `Uc` is the continuous version of `U`
/// (exact infimum over an interval), and the two index statistics are
/// sup-norm summaries for the two-sided problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatId {
    U,
    P,
    Ks,
    Auc,
    Uc,
    IndexCc,
    IndexCcc,
}

impl StatId {
    pub const ALL: [StatId; 7] = [
        StatId::U,
        StatId::P,
        StatId::Ks,
        StatId::Auc,
        StatId::Uc,
        StatId::IndexCc,
        StatId::IndexCcc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StatId::U => "u",
            StatId::P => "p",
            StatId::Ks => "ks",
            StatId::Auc => "auc",
            StatId::Uc => "uc",
            StatId::IndexCc => "index-cc",
            StatId::IndexCcc => "index-ccc",
        }
    }

    /// Which tail of the null distribution is significant.
    pub fn tail(&self) -> Tail {
        match self {
            StatId::U | StatId::P | StatId::Uc => Tail::Lower,
            StatId::Ks | StatId::Auc | StatId::IndexCc | StatId::IndexCcc => Tail::Upper,
        }
    }
}

impl std::fmt::Display for StatId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StatId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" => Ok(StatId::U),
            "p" => Ok(StatId::P),
            "ks" => Ok(StatId::Ks),
            "auc" => Ok(StatId::Auc),
            "uc" => Ok(StatId::Uc),
            "index-cc" => Ok(StatId::IndexCc),
            "index-ccc" => Ok(StatId::IndexCcc),
            other => Err(Error::Domain(format!(
                "unknown statistic {other:?}; expected one of u, p, ks, auc, uc, index-cc, index-ccc"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Lower,
    Upper,
}

/// Per-statistic evaluation settings: the grid for the min-type statistics
/// (optionally masked to a subinterval of (0,1)) and epsilon for the
/// interval-based ones.
#[derive(Debug, Clone, Default)]
pub struct StatConfig {
    pub grid: Option<DyadicGrid>,
    pub epsilon: Option<f64>,
    pub interval: Option<(f64, f64)>,
}

impl StatConfig {
    pub fn with_grid(grid: DyadicGrid) -> Self {
        Self { grid: Some(grid), ..Default::default() }
    }

    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon: Some(epsilon), ..Default::default() }
    }
}

/// Default clipping level for the interval statistics: ln^3(N) / N, the
/// smallest level at which the continuous min statistic stays consistent.
pub fn default_epsilon(total: usize) -> f64 {
    let ln = (total as f64).ln();
    ln * ln * ln / total as f64
}

/// A fully resolved statistic ready to evaluate on rank counts.
#[derive(Debug, Clone)]
pub(crate) enum PlannedStat {
    /// Min of the bars over (possibly masked) grid points.
    GridMin { kind: ProcessKind, points: Vec<f64> },
    /// eta_N sup_x (G_n(x) - F_m(x)) over the pooled jump points.
    Ks,
    /// eta_N (1/m) sum_i [G_n(X_(i)) - i/m]^+.
    Auc,
    /// Exact infimum of the U process over [eps, 1-eps].
    InfCc { eps: f64 },
    /// Sup of eta_N |cc-hat| or |ccc-hat| over [eps, 1-eps].
    SupAbs { kind: ProcessKind, eps: f64 },
}

impl PlannedStat {
    pub(crate) fn descriptor(&self) -> String {
        match self {
            PlannedStat::GridMin { points, .. } => format!("d{}", points.len()),
            PlannedStat::Ks => "all".into(),
            PlannedStat::Auc => "all".into(),
            PlannedStat::InfCc { eps } => format!("eps{eps}"),
            PlannedStat::SupAbs { eps, .. } => format!("eps{eps}"),
        }
    }
}

fn resolve_epsilon(cfg: &StatConfig, total: usize) -> Result<f64> {
    let eps = cfg.epsilon.unwrap_or_else(|| default_epsilon(total));
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 0.5), got {eps}; pass an explicit epsilon for small N"
        )));
    }
    Ok(eps)
}

pub(crate) fn plan(stat: StatId, cfg: &StatConfig, total: usize) -> Result<PlannedStat> {
    match stat {
        StatId::U | StatId::P => {
            let grid = cfg.grid.as_ref().ok_or_else(|| {
                Error::Domain(format!("statistic {stat} needs a grid"))
            })?;
            let points: Vec<f64> = match cfg.interval {
                None => grid.points().to_vec(),
                Some((p1, p2)) => {
                    if !(0.0 <= p1 && p1 < p2 && p2 <= 1.0) {
                        return Err(Error::Domain(format!(
                            "subinterval must satisfy 0 <= p1 < p2 <= 1, got ({p1}, {p2})"
                        )));
                    }
                    let pts: Vec<f64> = grid
                        .points()
                        .iter()
                        .copied()
                        .filter(|&p| p > p1 && p < p2)
                        .collect();
                    if pts.is_empty() {
                        return Err(Error::EmptyGrid(p1, p2));
                    }
                    pts
                }
            };
            let kind = if stat == StatId::U { ProcessKind::U } else { ProcessKind::P };
            Ok(PlannedStat::GridMin { kind, points })
        }
        StatId::Ks => Ok(PlannedStat::Ks),
        StatId::Auc => Ok(PlannedStat::Auc),
        StatId::Uc => Ok(PlannedStat::InfCc { eps: resolve_epsilon(cfg, total)? }),
        StatId::IndexCc => Ok(PlannedStat::SupAbs {
            kind: ProcessKind::U,
            eps: resolve_epsilon(cfg, total)?,
        }),
        StatId::IndexCcc => Ok(PlannedStat::SupAbs {
            kind: ProcessKind::P,
            eps: resolve_epsilon(cfg, total)?,
        }),
    }
}

/// One constancy piece of the weighted CC process, evaluated as
/// (p n - #{Y below}) / (n sqrt(p(1-p))) to match `cc_hat` bit for bit.
/// Strictly increasing in p on (0, 1), so its extremes over any subinterval
/// sit at the ends.
#[inline]
fn piece_value(y_below: u32, n: f64, p: f64) -> f64 {
    (p * n - y_below as f64) / (n * weight(p))
}

pub(crate) fn eval_planned(plan: &PlannedStat, counts: &RankCounts) -> f64 {
    let eta = counts.eta();
    match plan {
        PlannedStat::GridMin { kind, points } => {
            let mut min = f64::INFINITY;
            for &p in points {
                let v = match kind {
                    ProcessKind::U => counts.cc_hat(p),
                    ProcessKind::P => counts.ccc_hat(p),
                };
                min = min.min(v);
            }
            eta * min
        }
        PlannedStat::Ks => {
            // Integer numerators over the common denominator mn keep equal
            // rationals bit-identical; the statistic lives on a coarse
            // lattice when m = n and atoms must survive comparisons.
            let (mi, ni) = (counts.m as i64, counts.n as i64);
            let mut best: i64 = 0;
            for (k, &a) in counts.x_prefix.iter().enumerate() {
                let a = a as i64;
                let num = (k as i64 + 1 - a) * mi - a * ni;
                if num > best {
                    best = num;
                }
            }
            eta * best as f64 / (counts.m as f64 * counts.n as f64)
        }
        PlannedStat::Auc => {
            let (mi, ni) = (counts.m as i64, counts.n as i64);
            let mut sum: i64 = 0;
            for (i, &yb) in counts.y_below.iter().enumerate() {
                let num = yb as i64 * mi - (i as i64 + 1) * ni;
                if num > 0 {
                    sum += num;
                }
            }
            let m = counts.m as f64;
            eta * sum as f64 / (m * m * counts.n as f64)
        }
        PlannedStat::InfCc { eps } => {
            // G_n(F_m^{-1}(p)) is constant on each piece ((k-1)/m, k/m], and
            // the weighted piece is strictly increasing in p, so the infimum
            // over [eps, 1-eps] is the smallest left-end value among the
            // pieces meeting the interval. Left ends interior to a piece are
            // one-sided limits; the infimum still equals their value.
            let m = counts.m as f64;
            let n = counts.n as f64;
            let hi_cap = 1.0 - eps;
            let mut inf = f64::INFINITY;
            for (k0, &yb) in counts.y_below.iter().enumerate() {
                let lo_open = k0 as f64 / m;
                let hi = (k0 + 1) as f64 / m;
                if lo_open >= hi_cap || hi < *eps {
                    continue;
                }
                inf = inf.min(piece_value(yb, n, lo_open.max(*eps)));
            }
            eta * inf
        }
        PlannedStat::SupAbs { kind, eps } => {
            let hi_cap = 1.0 - eps;
            let mut sup: f64 = 0.0;
            match kind {
                ProcessKind::U => {
                    let m = counts.m as f64;
                    let n = counts.n as f64;
                    for (k0, &yb) in counts.y_below.iter().enumerate() {
                        let lo_open = k0 as f64 / m;
                        let hi = (k0 + 1) as f64 / m;
                        if lo_open >= hi_cap || hi < *eps {
                            continue;
                        }
                        let a = lo_open.max(*eps);
                        let b = hi.min(hi_cap);
                        sup = sup.max(piece_value(yb, n, a).abs()).max(piece_value(yb, n, b).abs());
                    }
                }
                ProcessKind::P => {
                    let mn = counts.m as f64 * counts.n as f64;
                    let total = counts.total() as f64;
                    for (k0, &a_cnt) in counts.x_prefix.iter().enumerate() {
                        let lo_open = k0 as f64 / total;
                        let hi = (k0 + 1) as f64 / total;
                        if lo_open >= hi_cap || hi < *eps {
                            continue;
                        }
                        let a_f = a_cnt as f64;
                        let delta =
                            (a_f * counts.n as f64 - ((k0 + 1) as f64 - a_f) * counts.m as f64) / mn;
                        let a = lo_open.max(*eps);
                        let b = hi.min(hi_cap);
                        let w = (delta / weight(a)).abs().max((delta / weight(b)).abs());
                        sup = sup.max(w);
                    }
                }
            }
            eta * sup
        }
    }
}

/// Evaluates a statistic on a dataset.
pub fn statistic(stat: StatId, data: &TwoSampleData, cfg: &StatConfig) -> Result<f64> {
    let plan = plan(stat, cfg, data.total())?;
    let ranks = data.ranks()?;
    Ok(eval_planned(&plan, &ranks.counts()))
}

/// Min of the unpooled bars over the grid; lower-tail statistic.
pub fn stat_u(data: &TwoSampleData, grid: &DyadicGrid) -> Result<f64> {
    statistic(StatId::U, data, &StatConfig::with_grid(grid.clone()))
}

/// Min of the pooled bars over the grid; lower-tail statistic.
pub fn stat_p(data: &TwoSampleData, grid: &DyadicGrid) -> Result<f64> {
    statistic(StatId::P, data, &StatConfig::with_grid(grid.clone()))
}

/// One-sided Kolmogorov-Smirnov statistic eta_N sup_x (G_n - F_m);
/// upper-tail.
pub fn stat_ks(data: &TwoSampleData) -> Result<f64> {
    statistic(StatId::Ks, data, &StatConfig::default())
}

/// AUC-type statistic eta_N (1/m) sum_i [G_n(X_(i)) - i/m]^+; upper-tail.
pub fn stat_auc(data: &TwoSampleData) -> Result<f64> {
    statistic(StatId::Auc, data, &StatConfig::default())
}

/// Exact infimum of the U process over [eps, 1-eps]; lower-tail.
pub fn stat_uc(data: &TwoSampleData, epsilon: f64) -> Result<f64> {
    statistic(StatId::Uc, data, &StatConfig::with_epsilon(epsilon))
}

/// Sup of eta_N |cc-hat| over [eps, 1-eps]; upper-tail.
pub fn index_cc(data: &TwoSampleData, epsilon: f64) -> Result<f64> {
    statistic(StatId::IndexCc, data, &StatConfig::with_epsilon(epsilon))
}

/// Sup of eta_N |ccc-hat| over [eps, 1-eps]; upper-tail.
pub fn index_ccc(data: &TwoSampleData, epsilon: f64) -> Result<f64> {
    statistic(StatId::IndexCcc, data, &StatConfig::with_epsilon(epsilon))
}
