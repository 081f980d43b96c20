//! Shared test oracles, kept independent of the library code paths they
//! check: a quadrature-based normal CDF, bisection quantiles, and dense-grid
//! brute forcing of the interval statistics.

#![allow(dead_code)]

use ccurves::empirical::{Sample, TwoSampleData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn simpson_fixed(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    acc * h / 3.0
}

/// High-precision standard normal CDF by composite Simpson quadrature of the
/// density; independent of any library evaluation.
pub fn normal_cdf_oracle(x: f64) -> f64 {
    if x < -12.0 {
        return 0.0;
    }
    if x > 12.0 {
        return 1.0;
    }
    let a = x.abs();
    // enough panels for ~1e-13 on [0, 12]
    let panels = 2 * ((a * 400.0).ceil() as usize + 200);
    let half = simpson_fixed(phi, 0.0, a, panels);
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Normal quantile by bisection on the quadrature CDF.
pub fn normal_quantile_oracle(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let (mut lo, mut hi) = (-12.0, 12.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf_oracle(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection inverse of an arbitrary CDF to a target tolerance in p.
pub fn bisect_quantile_oracle(cdf: impl Fn(f64) -> f64, p: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    assert!(cdf(lo) <= p && cdf(hi) >= p, "bracket does not contain the quantile");
    loop {
        let mid = 0.5 * (lo + hi);
        let c = cdf(mid);
        if (c - p).abs() <= tol || hi - lo < 1e-15 * (1.0 + mid.abs()) {
            return mid;
        }
        if c < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// A random tie-free dataset with sizes drawn in the given ranges.
pub fn random_dataset(seed: u64, m_range: std::ops::RangeInclusive<usize>, n_range: std::ops::RangeInclusive<usize>) -> TwoSampleData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(m_range);
    let n = rng.random_range(n_range);
    loop {
        let xs: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let d = TwoSampleData::new(Sample::new(xs).unwrap(), Sample::new(ys).unwrap());
        if d.pooled().is_ok() {
            return d;
        }
    }
}

/// All evaluation points for a dense-grid brute force over [eps, 1-eps]:
/// a uniform grid plus every ECDF breakpoint and its next-up float, so the
/// one-sided limits at piece boundaries are captured to within an ulp.
pub fn dense_points(eps: f64, grid_size: usize, breakpoints: impl Iterator<Item = f64>) -> Vec<f64> {
    let hi = 1.0 - eps;
    let mut pts: Vec<f64> = (0..=grid_size)
        .map(|i| eps + (hi - eps) * i as f64 / grid_size as f64)
        .collect();
    for b in breakpoints {
        for cand in [b, b.next_up()] {
            if cand >= eps && cand <= hi {
                pts.push(cand);
            }
        }
    }
    pts
}

/// Brute-force infimum of eta * cc-hat over [eps, 1-eps].
pub fn brute_force_uc(data: &TwoSampleData, eps: f64, grid_size: usize) -> f64 {
    let ranks = data.ranks().unwrap();
    let m = data.m();
    let eta = data.eta();
    let pts = dense_points(eps, grid_size, (1..m).map(|k| k as f64 / m as f64));
    pts.iter().map(|&p| eta * ranks.cc_hat(p)).fold(f64::INFINITY, f64::min)
}

/// Brute-force supremum of eta * |cc-hat| or eta * |ccc-hat|.
pub fn brute_force_index(data: &TwoSampleData, eps: f64, grid_size: usize, pooled: bool) -> f64 {
    let ranks = data.ranks().unwrap();
    let eta = data.eta();
    let den = if pooled { data.total() } else { data.m() };
    let pts = dense_points(eps, grid_size, (1..den).map(|k| k as f64 / den as f64));
    pts.iter()
        .map(|&p| {
            let v = if pooled { ranks.ccc_hat(p) } else { ranks.cc_hat(p) };
            (eta * v).abs()
        })
        .fold(0.0, f64::max)
}

/// Mean and (n-1)-denominator variance.
pub fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Covariance with (n-1) denominator.
pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0)
}
