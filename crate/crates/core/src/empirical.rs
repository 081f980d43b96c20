//! Samples, empirical CDFs and quantile functions, pooled-sample machinery,
//! and the ties policy underlying every rank computation.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A sorted sample of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Builds a sample from raw observations. Values are sorted; NaN and
    /// infinities are rejected with their 1-based row number in the input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("sample must contain at least one value".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i + 1, value: *v });
            }
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right-continuous empirical CDF: `#{values <= x} / n`.
    pub fn ecdf_at(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.n() as f64
    }

    pub(crate) fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|v| *v <= x)
    }

    /// Left-continuous generalized inverse of the empirical CDF: the smallest
    /// order statistic z with `ecdf_at(z) >= p`, i.e. the ceil(n*p)-th order
    /// statistic. Requires `0 < p <= 1`.
    pub fn equantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1], got {p}")));
        }
        Ok(self.values[order_index(self.n(), p)])
    }
}

/// 0-based index of the smallest order statistic whose empirical CDF value
/// reaches `p`. The ceil-based rank is nudged so that `k/n >= p` holds in the
/// same f64 arithmetic `ecdf_at` uses.
pub(crate) fn order_index(n: usize, p: f64) -> usize {
    let nf = n as f64;
    let mut k = (nf * p).ceil() as usize;
    k = k.clamp(1, n);
    while k > 1 && (k - 1) as f64 / nf >= p {
        k -= 1;
    }
    while k < n && (k as f64) / nf < p {
        k += 1;
    }
    k - 1
}

/// How ties in the pooled sample are handled at ingestion. The theory behind
/// every statistic assumes continuous data, so ties are never resolved
/// silently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiesPolicy {
    /// Fail with a `TiesViolation` naming the duplicated value.
    Reject,
    /// Break ties with seeded uniform noise of magnitude strictly below half
    /// the minimum positive gap in the pooled sample, so the ordering of
    /// distinct values is preserved.
    Jitter { seed: u64 },
}

/// The two samples under comparison: `x` is the reference group with CDF F
/// (size m), `y` the comparison group with CDF G (size n).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleData {
    x: Sample,
    y: Sample,
}

impl TwoSampleData {
    pub fn new(x: Sample, y: Sample) -> Self {
        Self { x, y }
    }

    /// Ingests raw observations, applying the ties policy to the pooled
    /// sample before anything rank-based can run.
    pub fn from_values(xs: Vec<f64>, ys: Vec<f64>, ties: TiesPolicy) -> Result<Self> {
        let data = Self::new(Sample::new(xs)?, Sample::new(ys)?);
        match (data.find_tie(), ties) {
            (None, _) => Ok(data),
            (Some(value), TiesPolicy::Reject) => Err(Error::TiesViolation { value }),
            (Some(_), TiesPolicy::Jitter { seed }) => data.jittered(seed),
        }
    }

    pub fn x(&self) -> &Sample {
        &self.x
    }

    pub fn y(&self) -> &Sample {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.x.n()
    }

    pub fn n(&self) -> usize {
        self.y.n()
    }

    /// Total pooled size N = m + n.
    pub fn total(&self) -> usize {
        self.m() + self.n()
    }

    /// lambda_N = m / N.
    pub fn lambda(&self) -> f64 {
        self.m() as f64 / self.total() as f64
    }

    /// eta_N = sqrt(m n / N), the rate that makes null bars asymptotically
    /// standard normal.
    pub fn eta(&self) -> f64 {
        ((self.m() as f64 * self.n() as f64) / self.total() as f64).sqrt()
    }

    /// Merged sorted sample of size N. Its ECDF equals
    /// `lambda_N * F_m + (1 - lambda_N) * G_n` by counting.
    pub fn pooled(&self) -> Result<Sample> {
        let mut merged = Vec::with_capacity(self.total());
        merged.extend_from_slice(self.x.values());
        merged.extend_from_slice(self.y.values());
        merged.sort_unstable_by(f64::total_cmp);
        if let Some(w) = merged.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::TiesViolation { value: w[0] });
        }
        Sample::new(merged)
    }

    fn find_tie(&self) -> Option<f64> {
        let mut merged: Vec<f64> = Vec::with_capacity(self.total());
        merged.extend_from_slice(self.x.values());
        merged.extend_from_slice(self.y.values());
        merged.sort_unstable_by(f64::total_cmp);
        merged.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
    }

    fn jittered(&self, seed: u64) -> Result<Self> {
        let mut pooled: Vec<f64> = Vec::with_capacity(self.total());
        pooled.extend_from_slice(self.x.values());
        pooled.extend_from_slice(self.y.values());
        pooled.sort_unstable_by(f64::total_cmp);
        let min_gap = pooled
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|g| *g > 0.0)
            .fold(f64::INFINITY, f64::min);
        let scale = if min_gap.is_finite() {
            min_gap
        } else {
            // Every pooled value is identical; any magnitude preserves the
            // (empty) order among distinct values.
            pooled[0].abs().max(1.0) * 1e-8
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut jitter = |v: &f64| v + (rng.random::<f64>() - 0.5) * scale * 0.999;
        let xs: Vec<f64> = self.x.values().iter().map(&mut jitter).collect();
        let ys: Vec<f64> = self.y.values().iter().map(&mut jitter).collect();
        let out = Self::new(Sample::new(xs)?, Sample::new(ys)?);
        match out.find_tie() {
            None => Ok(out),
            Some(value) => Err(Error::Domain(format!(
                "jitter with seed {seed} failed to separate tied value {value}; retry with another seed"
            ))),
        }
    }

    /// Applies a strictly increasing continuous transform to both samples.
    /// Every rank-based quantity downstream is bit-identical afterwards.
    /// Non-monotone behavior on the observed pooled values is an error.
    pub fn apply_monotone(&self, transform: impl Fn(f64) -> f64) -> Result<Self> {
        let pooled = {
            let mut v: Vec<f64> = Vec::with_capacity(self.total());
            v.extend_from_slice(self.x.values());
            v.extend_from_slice(self.y.values());
            v.sort_unstable_by(f64::total_cmp);
            v.dedup();
            v
        };
        let mapped: Vec<f64> = pooled.iter().map(|&v| transform(v)).collect();
        // catches non-increasing pairs and NaN output alike
        let strictly_greater = |i: &usize| {
            mapped[*i].partial_cmp(&mapped[*i - 1]) == Some(std::cmp::Ordering::Greater)
        };
        if let Some(i) = (1..mapped.len()).find(|i| !strictly_greater(i)) {
            return Err(Error::Domain(format!(
                "transform is not strictly increasing on the pooled values: t({}) = {} !> t({}) = {}",
                pooled[i], mapped[i], pooled[i - 1], mapped[i - 1]
            )));
        }
        let xs: Vec<f64> = self.x.values().iter().map(|&v| transform(v)).collect();
        let ys: Vec<f64> = self.y.values().iter().map(|&v| transform(v)).collect();
        Ok(Self::new(Sample::new(xs)?, Sample::new(ys)?))
    }

    /// Rank-merge view of the dataset. Fails on ties.
    pub fn ranks(&self) -> Result<PooledRanks> {
        PooledRanks::from_sorted(self.x.values(), self.y.values())
    }
}

/// Merge counts of two sorted sequences. Fills `y_below[k] = #{y <= x_(k+1)}`
/// (length m) and `x_prefix[k] = #x among the k+1 smallest pooled values`
/// (length m+n). Returns the duplicated value if any tie is found.
pub(crate) fn merge_counts<T: PartialOrd + Copy>(
    x: &[T],
    y: &[T],
    y_below: &mut Vec<u32>,
    x_prefix: &mut Vec<u32>,
) -> Option<T> {
    y_below.clear();
    x_prefix.clear();
    y_below.reserve(x.len());
    x_prefix.reserve(x.len() + y.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut xc: u32 = 0;
    while i < x.len() || j < y.len() {
        if i < x.len() && j < y.len() && x[i] == y[j] {
            return Some(x[i]);
        }
        let take_x = j == y.len() || (i < x.len() && x[i] < y[j]);
        if take_x {
            if i + 1 < x.len() && x[i] == x[i + 1] {
                return Some(x[i]);
            }
            xc += 1;
            y_below.push(j as u32);
            i += 1;
        } else {
            if j + 1 < y.len() && y[j] == y[j + 1] {
                return Some(y[j]);
            }
            j += 1;
        }
        x_prefix.push(xc);
    }
    None
}

/// Borrowed rank counts; everything downstream (curves, bars, statistics) is
/// a function of these integers and the grid point alone, which is what makes
/// the whole pipeline exactly invariant under monotone transforms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RankCounts<'a> {
    pub m: usize,
    pub n: usize,
    /// `y_below[k] = #{ Y_j <= X_(k+1) }`, k = 0..m
    pub y_below: &'a [u32],
    /// `x_prefix[k]` = number of X values among the k+1 smallest pooled values
    pub x_prefix: &'a [u32],
}

impl<'a> RankCounts<'a> {
    pub fn total(&self) -> usize {
        self.m + self.n
    }

    pub fn eta(&self) -> f64 {
        ((self.m as f64 * self.n as f64) / self.total() as f64).sqrt()
    }

    /// Empirical comparison curve (p - G_n(F_m^{-1}(p))) / sqrt(p(1-p)).
    ///
    /// The numerator is assembled as (p n - #{Y <= X_(k)}) / n, which is
    /// exact for dyadic p, so equal rank configurations produce bit-identical
    /// values no matter how they arose. Statistics on coarse lattices (equal
    /// sample sizes) rely on this when replicate values are compared against
    /// critical values.
    pub fn cc_hat(&self, p: f64) -> f64 {
        let k = order_index(self.m, p);
        let num = p * self.n as f64 - self.y_below[k] as f64;
        num / (self.n as f64 * weight(p))
    }

    /// Empirical contrast comparison curve
    /// (F_m(H_N^{-1}(p)) - G_n(H_N^{-1}(p))) / sqrt(p(1-p)), with the exact
    /// integer numerator a n - (K - a) m over the common denominator m n.
    pub fn ccc_hat(&self, p: f64) -> f64 {
        let k = order_index(self.total(), p);
        let a = self.x_prefix[k] as f64;
        let num = a * self.n as f64 - ((k + 1) as f64 - a) * self.m as f64;
        num / (self.m as f64 * self.n as f64 * weight(p))
    }
}

#[inline]
pub(crate) fn weight(p: f64) -> f64 {
    (p * (1.0 - p)).sqrt()
}

/// Owned rank counts for a dataset.
#[derive(Debug, Clone)]
pub struct PooledRanks {
    m: usize,
    n: usize,
    y_below: Vec<u32>,
    x_prefix: Vec<u32>,
}

impl PooledRanks {
    pub fn from_sorted(x: &[f64], y: &[f64]) -> Result<Self> {
        let mut y_below = Vec::new();
        let mut x_prefix = Vec::new();
        if let Some(value) = merge_counts(x, y, &mut y_below, &mut x_prefix) {
            return Err(Error::TiesViolation { value });
        }
        Ok(Self { m: x.len(), n: y.len(), y_below, x_prefix })
    }

    pub(crate) fn counts(&self) -> RankCounts<'_> {
        RankCounts {
            m: self.m,
            n: self.n,
            y_below: &self.y_below,
            x_prefix: &self.x_prefix,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.counts().eta()
    }

    pub fn cc_hat(&self, p: f64) -> f64 {
        self.counts().cc_hat(p)
    }

    pub fn ccc_hat(&self, p: f64) -> f64 {
        self.counts().ccc_hat(p)
    }
}
