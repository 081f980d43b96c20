//! Monte Carlo simulation of null distributions, empirical critical values
//! per the largest-value convention, p-values, and acceptance-region
//! barriers.
//!
//! Under F = G every statistic here is distribution free, so uniform(0,1)
//! samples characterize the null law exactly. Replicates are generated on
//! independent counter-derived RNG streams, which makes the output a pure
//! function of the seed no matter how many worker threads run.

use super::{eval_planned, plan, PlannedStat, StatConfig, StatId, Tail};
use crate::empirical::{merge_counts, RankCounts};
use crate::error::{Error, Result};
use crate::grid::{bars_from_counts, DecileBuckets, DyadicGrid, ProcessKind};
use crate::models::DistributionModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Sorted Monte Carlo replicates of one statistic under F = G.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    pub stat: StatId,
    pub m: usize,
    pub n: usize,
    /// Grid or epsilon descriptor, e.g. `d127` or `eps0.05`.
    pub descriptor: String,
    pub replicates: usize,
    pub seed: u64,
    values: Vec<f64>,
}

impl NullDistribution {
    pub(crate) fn from_replicates(
        stat: StatId,
        m: usize,
        n: usize,
        descriptor: String,
        seed: u64,
        mut values: Vec<f64>,
    ) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        let replicates = values.len();
        Self { stat, m, n, descriptor, replicates, seed, values }
    }

    /// Replicate values in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// An empirical critical value. `degenerate` flags a null with no spread (or
/// an upper tail whose largest tied block already exceeds alpha), where the
/// defining inequality cannot bind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub value: f64,
    pub degenerate: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Critical value over sorted replicates.
///
/// Lower tail: the largest replicate value q with `#{v < q}/R <= alpha`.
/// Upper tail is the exact mirror under negation: the smallest replicate
/// value t with `#{v > t}/R <= alpha`. Both definitions are enforced
/// literally on the ranked replicates, ties included, rather than through
/// quantile interpolation.
pub(crate) fn empirical_critical(sorted: &[f64], alpha: f64, tail: Tail) -> Result<CriticalValue> {
    check_alpha(alpha)?;
    if sorted.is_empty() {
        return Err(Error::Domain("empty null distribution".into()));
    }
    let r = sorted.len();
    let rf = r as f64;
    let degenerate = sorted[0] == sorted[r - 1];
    match tail {
        Tail::Lower => {
            let mut k = ((alpha * rf).floor() as usize).min(r - 1);
            // Enforce #{v < v[k]} / R <= alpha, stepping below tied blocks.
            loop {
                let less = sorted.partition_point(|v| *v < sorted[k]);
                if less as f64 / rf <= alpha || less == 0 {
                    break;
                }
                k = less - 1;
            }
            // Extend upward while the next distinct value still satisfies it.
            loop {
                let next = sorted.partition_point(|v| *v <= sorted[k]);
                if next >= r || next as f64 / rf > alpha {
                    break;
                }
                k = next;
            }
            Ok(CriticalValue { value: sorted[k], degenerate })
        }
        Tail::Upper => {
            // #{v > sorted[j]} depends on the last occurrence of the value;
            // start from the arithmetic guess and enforce the inequality.
            let mut j = ((rf - 1.0 - alpha * rf).ceil().max(0.0) as usize).min(r - 1);
            while j > 0 && (r - j) as f64 / rf <= alpha {
                j -= 1;
            }
            while j + 1 < r && (r - j - 1) as f64 / rf > alpha {
                j += 1;
            }
            // Walk down over tied blocks while the previous distinct value
            // still satisfies the inequality.
            loop {
                let first = sorted.partition_point(|v| *v < sorted[j]);
                if first == 0 {
                    j = 0;
                    break;
                }
                if (r - first) as f64 / rf <= alpha {
                    j = first - 1;
                } else {
                    break;
                }
            }
            Ok(CriticalValue { value: sorted[j], degenerate })
        }
    }
}

/// Critical value q(alpha; statistic) of a simulated null distribution.
pub fn critical_value(null: &NullDistribution, alpha: f64, tail: Tail) -> Result<CriticalValue> {
    empirical_critical(null.values(), alpha, tail)
}

/// Raw-proportion p-value: `#{v <= observed}/R` on the lower tail,
/// `#{v >= observed}/R` on the upper. A printed 0 means "below 1/R".
pub fn p_value(null: &NullDistribution, observed: f64, tail: Tail) -> f64 {
    let v = null.values();
    let r = v.len() as f64;
    match tail {
        Tail::Lower => v.partition_point(|x| *x <= observed) as f64 / r,
        Tail::Upper => (v.len() - v.partition_point(|x| *x < observed)) as f64 / r,
    }
}

#[derive(Default)]
struct Scratch {
    xk: Vec<u64>,
    yk: Vec<u64>,
    xv: Vec<f64>,
    yv: Vec<f64>,
    y_below: Vec<u32>,
    x_prefix: Vec<u32>,
}

fn rng_for(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Fills the rank counts for one replicate. Uniform draws are sorted through
/// their IEEE bit patterns (order-preserving for non-negative floats); model
/// draws go through the model sampler. A tie (possible only through f64
/// collisions) redraws the replicate on the same stream.
fn fill_counts(
    rng: &mut ChaCha8Rng,
    model: Option<&dyn DistributionModel>,
    m: usize,
    n: usize,
    scr: &mut Scratch,
) {
    loop {
        match model {
            None => {
                scr.xk.clear();
                scr.yk.clear();
                scr.xk.extend((0..m).map(|_| rng.random::<f64>().to_bits()));
                scr.yk.extend((0..n).map(|_| rng.random::<f64>().to_bits()));
                scr.xk.sort_unstable();
                scr.yk.sort_unstable();
                if merge_counts(&scr.xk, &scr.yk, &mut scr.y_below, &mut scr.x_prefix).is_none() {
                    return;
                }
            }
            Some(md) => {
                scr.xv.clear();
                scr.yv.clear();
                scr.xv.extend((0..m).map(|_| md.sample(rng)));
                scr.yv.extend((0..n).map(|_| md.sample(rng)));
                scr.xv.sort_unstable_by(f64::total_cmp);
                scr.yv.sort_unstable_by(f64::total_cmp);
                if merge_counts(&scr.xv, &scr.yv, &mut scr.y_below, &mut scr.x_prefix).is_none() {
                    return;
                }
            }
        }
    }
}

fn run_engine<T: Send>(
    m: usize,
    n: usize,
    replicates: usize,
    seed: u64,
    model: Option<&dyn DistributionModel>,
    eval: impl Fn(&RankCounts) -> T + Sync,
) -> Vec<T> {
    (0..replicates as u64)
        .into_par_iter()
        .map_init(Scratch::default, |scr, rep| {
            let mut rng = rng_for(seed, rep);
            fill_counts(&mut rng, model, m, n, scr);
            let counts = RankCounts { m, n, y_below: &scr.y_below, x_prefix: &scr.x_prefix };
            eval(&counts)
        })
        .collect()
}

fn validate_sim(m: usize, n: usize, replicates: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("sample sizes must be positive".into()));
    }
    if replicates < 100 {
        return Err(Error::Domain(format!("need at least 100 replicates, got {replicates}")));
    }
    Ok(())
}

fn simulate_joint_impl(
    stats: &[StatId],
    m: usize,
    n: usize,
    cfg: &StatConfig,
    replicates: usize,
    seed: u64,
    model: Option<&dyn DistributionModel>,
) -> Result<Vec<NullDistribution>> {
    validate_sim(m, n, replicates)?;
    let plans: Vec<PlannedStat> = stats
        .iter()
        .map(|s| plan(*s, cfg, m + n))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = run_engine(m, n, replicates, seed, model, |counts| {
        plans.iter().map(|p| eval_planned(p, counts)).collect()
    });
    Ok(stats
        .iter()
        .zip(&plans)
        .enumerate()
        .map(|(idx, (stat, plan))| {
            let column: Vec<f64> = rows.iter().map(|row| row[idx]).collect();
            NullDistribution::from_replicates(*stat, m, n, plan.descriptor(), seed, column)
        })
        .collect())
}

/// Simulates several statistics on shared replicates: each replicate draws
/// one pair of uniform samples and evaluates every statistic on it. The
/// per-statistic output is identical to a standalone `simulate_null` call
/// with the same seed.
pub fn simulate_null_joint(
    stats: &[StatId],
    m: usize,
    n: usize,
    cfg: &StatConfig,
    replicates: usize,
    seed: u64,
) -> Result<Vec<NullDistribution>> {
    simulate_joint_impl(stats, m, n, cfg, replicates, seed, None)
}

/// Simulates the null distribution of one statistic from independent
/// uniform(0,1) samples of sizes (m, n).
pub fn simulate_null(
    stat: StatId,
    m: usize,
    n: usize,
    cfg: &StatConfig,
    replicates: usize,
    seed: u64,
) -> Result<NullDistribution> {
    Ok(simulate_joint_impl(&[stat], m, n, cfg, replicates, seed, None)?
        .pop()
        .expect("one statistic in, one distribution out"))
}

/// Same as `simulate_null` but drawing both samples from an explicit common
/// model. By distribution-freeness the resulting law matches the uniform
/// default up to Monte Carlo error; this entry point exists to check that.
pub fn simulate_null_with_model(
    model: &dyn DistributionModel,
    stat: StatId,
    m: usize,
    n: usize,
    cfg: &StatConfig,
    replicates: usize,
    seed: u64,
) -> Result<NullDistribution> {
    Ok(simulate_joint_impl(&[stat], m, n, cfg, replicates, seed, Some(model))?
        .pop()
        .expect("one statistic in, one distribution out"))
}

/// Joint null simulation of everything grid-based: the two min statistics
/// plus the per-decile local minima of both processes, all from shared
/// replicates.
#[derive(Debug, Clone)]
pub struct GridNull {
    pub grid: DyadicGrid,
    pub m: usize,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub stat_u: NullDistribution,
    pub stat_p: NullDistribution,
    u_minima: [Option<Vec<f64>>; 10],
    p_minima: [Option<Vec<f64>>; 10],
}

impl GridNull {
    /// Barrier l(N, alpha, I_k) per decile: the lower-tail critical value of
    /// the bucket minimum under F = G, so that the minimum stays above the
    /// barrier with probability at least 1 - alpha. Empty buckets stay
    /// `None`.
    pub fn barriers(&self, kind: ProcessKind, alpha: f64) -> Result<[Option<f64>; 10]> {
        check_alpha(alpha)?;
        let cols = match kind {
            ProcessKind::U => &self.u_minima,
            ProcessKind::P => &self.p_minima,
        };
        let mut out = [None; 10];
        for (k, col) in cols.iter().enumerate() {
            if let Some(values) = col {
                out[k] = Some(empirical_critical(values, alpha, Tail::Lower)?.value);
            }
        }
        Ok(out)
    }

    pub(crate) fn bucket_values(&self, kind: ProcessKind, bucket: usize) -> Option<&[f64]> {
        let cols = match kind {
            ProcessKind::U => &self.u_minima,
            ProcessKind::P => &self.p_minima,
        };
        cols[bucket].as_deref()
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        grid: DyadicGrid,
        m: usize,
        n: usize,
        replicates: usize,
        seed: u64,
        u_values: Vec<f64>,
        p_values: Vec<f64>,
        u_minima: [Option<Vec<f64>>; 10],
        p_minima: [Option<Vec<f64>>; 10],
    ) -> Self {
        let descriptor = format!("d{}", grid.d());
        Self {
            grid,
            m,
            n,
            replicates,
            seed,
            stat_u: NullDistribution::from_replicates(StatId::U, m, n, descriptor.clone(), seed, u_values),
            stat_p: NullDistribution::from_replicates(StatId::P, m, n, descriptor, seed, p_values),
            u_minima,
            p_minima,
        }
    }
}

/// Runs the shared-replicate grid simulation.
pub fn simulate_grid_null(
    m: usize,
    n: usize,
    grid: &DyadicGrid,
    replicates: usize,
    seed: u64,
) -> Result<GridNull> {
    validate_sim(m, n, replicates)?;
    let buckets = DecileBuckets::for_grid(grid);
    let ranges = buckets.ranges();
    let rows: Vec<([f64; 10], [f64; 10])> = run_engine(m, n, replicates, seed, None, |counts| {
        let u_bars = bars_from_counts(counts, grid, ProcessKind::U);
        let p_bars = bars_from_counts(counts, grid, ProcessKind::P);
        let mut u_min = [f64::INFINITY; 10];
        let mut p_min = [f64::INFINITY; 10];
        for (i, &b) in buckets.assignment().iter().enumerate() {
            let k = (b - 1) as usize;
            u_min[k] = u_min[k].min(u_bars[i]);
            p_min[k] = p_min[k].min(p_bars[i]);
        }
        (u_min, p_min)
    });

    type MinRow = ([f64; 10], [f64; 10]);
    let collect_stat = |pick: fn(&MinRow) -> &[f64; 10]| -> Vec<f64> {
        rows.iter()
            .map(|row| pick(row).iter().copied().fold(f64::INFINITY, f64::min))
            .collect()
    };
    let stat_u_values = collect_stat(|r| &r.0);
    let stat_p_values = collect_stat(|r| &r.1);

    let mut u_minima: [Option<Vec<f64>>; 10] = Default::default();
    let mut p_minima: [Option<Vec<f64>>; 10] = Default::default();
    for k in 0..10 {
        if ranges[k].is_some() {
            let mut ucol: Vec<f64> = rows.iter().map(|r| r.0[k]).collect();
            let mut pcol: Vec<f64> = rows.iter().map(|r| r.1[k]).collect();
            ucol.sort_unstable_by(f64::total_cmp);
            pcol.sort_unstable_by(f64::total_cmp);
            u_minima[k] = Some(ucol);
            p_minima[k] = Some(pcol);
        }
    }

    let descriptor = format!("d{}", grid.d());
    Ok(GridNull {
        grid: grid.clone(),
        m,
        n,
        replicates,
        seed,
        stat_u: NullDistribution::from_replicates(StatId::U, m, n, descriptor.clone(), seed, stat_u_values),
        stat_p: NullDistribution::from_replicates(StatId::P, m, n, descriptor, seed, stat_p_values),
        u_minima,
        p_minima,
    })
}

/// Familywise variant of the barriers: a common per-bucket level is
/// calibrated on the simulated replicates so that the probability of ANY
/// bucket minimum falling below its barrier stays at or below alpha. More
/// conservative than the default per-bucket marginal barriers; off unless
/// asked for.
pub fn familywise_barriers(
    kind: ProcessKind,
    m: usize,
    n: usize,
    grid: &DyadicGrid,
    alpha: f64,
    replicates: usize,
    seed: u64,
) -> Result<[Option<f64>; 10]> {
    check_alpha(alpha)?;
    validate_sim(m, n, replicates)?;
    let buckets = DecileBuckets::for_grid(grid);
    let rows: Vec<[f64; 10]> = run_engine(m, n, replicates, seed, None, |counts| {
        let bars = bars_from_counts(counts, grid, kind);
        let mut min = [f64::INFINITY; 10];
        for (i, &b) in buckets.assignment().iter().enumerate() {
            let k = (b - 1) as usize;
            min[k] = min[k].min(bars[i]);
        }
        min
    });

    let occupied: Vec<usize> = buckets
        .ranges()
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.as_ref().map(|_| k))
        .collect();
    let mut cols: Vec<Vec<f64>> = occupied
        .iter()
        .map(|&k| rows.iter().map(|r| r[k]).collect())
        .collect();
    for col in &mut cols {
        col.sort_unstable_by(f64::total_cmp);
    }

    let barriers_at = |level: f64| -> Result<Vec<f64>> {
        cols.iter()
            .map(|col| Ok(empirical_critical(col, level, Tail::Lower)?.value))
            .collect()
    };
    let joint_exceedance = |barriers: &[f64]| -> f64 {
        let hits = rows
            .iter()
            .filter(|r| occupied.iter().zip(barriers).any(|(&k, &l)| r[k] < l))
            .count();
        hits as f64 / replicates as f64
    };

    // The joint exceedance grows with the per-bucket level, so bisect for
    // the largest level still meeting the familywise bound.
    let mut lo = 0.0f64;
    let mut hi = alpha;
    let mut best = barriers_at(alpha / occupied.len().max(1) as f64)?;
    if joint_exceedance(&barriers_at(alpha)?) <= alpha {
        best = barriers_at(alpha)?;
    } else {
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if mid <= 0.0 {
                break;
            }
            let cand = barriers_at(mid)?;
            if joint_exceedance(&cand) <= alpha {
                best = cand;
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    let mut out = [None; 10];
    for (slot, l) in occupied.iter().zip(best) {
        out[*slot] = Some(l);
    }
    Ok(out)
}

/// Simulated barriers l(N, alpha, I_k) for one process, k = 1..10.
pub fn barriers(
    kind: ProcessKind,
    m: usize,
    n: usize,
    grid: &DyadicGrid,
    alpha: f64,
    replicates: usize,
    seed: u64,
) -> Result<[Option<f64>; 10]> {
    simulate_grid_null(m, n, grid, replicates, seed)?.barriers(kind, alpha)
}
