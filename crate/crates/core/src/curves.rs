//! Theoretical and empirical comparison curves, comparison densities, and
//! asymptotic moment formulas for known (F, G) pairs.
//!
//! The unpooled comparison curve rescales the ordinal dominance curve
//! ODC(p) = G(F^{-1}(p)):
//!
//! ```text
//! CC(p) = (p - ODC(p)) / sqrt(p(1-p))
//! ```
//!
//! and the pooled contrast comparison curve replaces the reference F by the
//! mixture H = lambda F + (1-lambda) G:
//!
//! ```text
//! CCC(p) = (F - G)(H^{-1}(p)) / sqrt(p(1-p))
//! ```

use crate::empirical::{weight, TwoSampleData};
use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::models::DistributionModel;
use crate::numeric::{adaptive_simpson, invert_monotone};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn check_open_unit(p: f64, what: &str) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("{what} must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// Ordinal dominance curve G(F^{-1}(p)).
pub fn odc(f: &dyn DistributionModel, g: &dyn DistributionModel, p: f64) -> Result<f64> {
    check_open_unit(p, "p")?;
    Ok(g.cdf(f.quantile(p)))
}

/// ROC curve 1 - G(F^{-1}(1-p)).
pub fn roc(f: &dyn DistributionModel, g: &dyn DistributionModel, p: f64) -> Result<f64> {
    check_open_unit(p, "p")?;
    Ok(1.0 - g.cdf(f.quantile(1.0 - p)))
}

/// Comparison curve CC(p) = (p - G(F^{-1}(p))) / sqrt(p(1-p)).
pub fn cc_theoretical(f: &dyn DistributionModel, g: &dyn DistributionModel, p: f64) -> Result<f64> {
    Ok((p - odc(f, g, p)?) / weight(p))
}

/// Pooled reference quantile H^{-1}(p) with H = lambda F + (1-lambda) G,
/// found by bracketed bisection to 1e-10 in probability space.
pub fn pooled_quantile(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    lambda: f64,
    p: f64,
) -> Result<f64> {
    check_open_unit(p, "p")?;
    check_open_unit(lambda, "lambda")?;
    let h = |x: f64| lambda * f.cdf(x) + (1.0 - lambda) * g.cdf(x);
    let qf = f.quantile(p);
    let qg = g.quantile(p);
    invert_monotone(h, p, qf.min(qg), qf.max(qg), 1e-10, "pooled quantile")
}

/// Contrast comparison curve CCC(p) = (F - G)(H^{-1}(p)) / sqrt(p(1-p)).
pub fn ccc_theoretical(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    lambda: f64,
    p: f64,
) -> Result<f64> {
    let x = pooled_quantile(f, g, lambda, p)?;
    Ok((f.cdf(x) - g.cdf(x)) / weight(p))
}

/// Comparison density r(p) = g(F^{-1}(p)) / f(F^{-1}(p)). Often unbounded
/// near 0 or 1; a non-finite ratio is reported as a divergence, never as a
/// number.
pub fn comparison_density(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    p: f64,
) -> Result<f64> {
    check_open_unit(p, "p")?;
    let x = f.quantile(p);
    let r = g.density(x) / f.density(x);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Divergent { p })
    }
}

/// Pooled comparison densities (r1, r2) at p:
/// r1 = f(H^{-1}(p)) / h(H^{-1}(p)), r2 = g(H^{-1}(p)) / h(H^{-1}(p)).
/// They satisfy lambda r1 + (1-lambda) r2 = 1 and are always bounded.
pub fn pooled_densities(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    lambda: f64,
    p: f64,
) -> Result<(f64, f64)> {
    let x = pooled_quantile(f, g, lambda, p)?;
    let h = lambda * f.density(x) + (1.0 - lambda) * g.density(x);
    let r1 = f.density(x) / h;
    let r2 = g.density(x) / h;
    if r1.is_finite() && r2.is_finite() {
        Ok((r1, r2))
    } else {
        Err(Error::Divergent { p })
    }
}

/// Contrast density c(p) = r1(p) - r2(p).
pub fn contrast_density(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    lambda: f64,
    p: f64,
) -> Result<f64> {
    let (r1, r2) = pooled_densities(f, g, lambda, p)?;
    Ok(r1 - r2)
}

/// Integral of the contrast density over (delta, 1-delta) by adaptive
/// Simpson quadrature. The contrast is bounded by max(1/lambda, 1/(1-lambda))
/// but need not vanish at the endpoints, so delta = 1e-9 keeps the
/// truncation below the 1e-6 tolerance the zero-integral identity is held
/// to.
pub fn contrast_integral(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    lambda: f64,
) -> Result<f64> {
    let delta = 1e-9;
    let integrand = |p: f64| contrast_density(f, g, lambda, p).unwrap_or(0.0);
    Ok(adaptive_simpson(&integrand, delta, 1.0 - delta, 1e-9))
}

/// Asymptotic variances and covariances of the unweighted comparison
/// processes at (p, q) for known (F, G) and lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticMoments {
    /// Variance of the unpooled process at p:
    /// lambda R(p)(1-R(p)) + (1-lambda) p(1-p) r(p)^2.
    pub var_unpooled: f64,
    /// Variance of the pooled process at p:
    /// lambda r1(p)^2 R2(p)(1-R2(p)) + (1-lambda) r2(p)^2 R1(p)(1-R1(p)).
    pub var_pooled: f64,
    /// Covariance of the unpooled process between p and q.
    pub cov_unpooled: f64,
    /// Covariance of the pooled process between p and q.
    pub cov_pooled: f64,
}

/// Evaluates the asymptotic moment formulas, with
/// R(p) = G(F^{-1}(p)), R1(p) = F(H^{-1}(p)), R2(p) = G(H^{-1}(p)).
/// An unbounded comparison density at p or q surfaces as `Divergent`.
pub fn asymptotic_moments(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    lambda: f64,
    p: f64,
    q: f64,
) -> Result<AsymptoticMoments> {
    check_open_unit(lambda, "lambda")?;
    let big_r = |t: f64| -> Result<f64> { odc(f, g, t) };
    let rp = comparison_density(f, g, p)?;
    let rq = comparison_density(f, g, q)?;
    let (r1p, r2p) = pooled_densities(f, g, lambda, p)?;
    let (r1q, r2q) = pooled_densities(f, g, lambda, q)?;
    let xr = |t: f64| -> Result<(f64, f64)> {
        let x = pooled_quantile(f, g, lambda, t)?;
        Ok((f.cdf(x), g.cdf(x)))
    };

    let rp_ = big_r(p)?;
    let rq_ = big_r(q)?;
    let (r1_p, r2_p) = xr(p)?;
    let (r1_q, r2_q) = xr(q)?;

    let var_unpooled = lambda * rp_ * (1.0 - rp_) + (1.0 - lambda) * p * (1.0 - p) * rp * rp;
    let var_pooled = lambda * r1p * r1p * r2_p * (1.0 - r2_p)
        + (1.0 - lambda) * r2p * r2p * r1_p * (1.0 - r1_p);
    let cov_unpooled = lambda * (rp_.min(rq_) - rp_ * rq_)
        + (1.0 - lambda) * (p.min(q) - p * q) * rp * rq;
    let cov_pooled = lambda * r1p * r1q * (r2_p.min(r2_q) - r2_p * r2_q)
        + (1.0 - lambda) * r2p * r2q * (r1_p.min(r1_q) - r1_p * r1_q);

    Ok(AsymptoticMoments { var_unpooled, var_pooled, cov_unpooled, cov_pooled })
}

/// Empirical comparison curve (p - G_n(F_m^{-1}(p))) / sqrt(p(1-p)).
pub fn cc_empirical(data: &TwoSampleData, p: f64) -> Result<f64> {
    check_open_unit(p, "p")?;
    Ok(data.ranks()?.cc_hat(p))
}

/// Empirical contrast comparison curve
/// (F_m(H_N^{-1}(p)) - G_n(H_N^{-1}(p))) / sqrt(p(1-p)).
pub fn ccc_empirical(data: &TwoSampleData, p: f64) -> Result<f64> {
    check_open_unit(p, "p")?;
    Ok(data.ranks()?.ccc_hat(p))
}

/// Monte Carlo averages of the empirical curves over a grid.
#[derive(Debug, Clone)]
pub struct McCurves {
    pub grid: DyadicGrid,
    pub cc_mean: Vec<f64>,
    pub ccc_mean: Vec<f64>,
    pub m: usize,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
}

/// Averages the empirical CC and CCC over `replicates` independent datasets
/// of sizes (m, n) drawn from (F, G). Replicates run in parallel on
/// per-replicate RNG streams; results do not depend on the worker count.
pub fn mc_estimated_curves(
    f: &dyn DistributionModel,
    g: &dyn DistributionModel,
    m: usize,
    n: usize,
    grid: &DyadicGrid,
    replicates: usize,
    seed: u64,
) -> Result<McCurves> {
    if replicates == 0 {
        return Err(Error::Domain("replicates must be at least 1".into()));
    }
    if m == 0 || n == 0 {
        return Err(Error::Domain("sample sizes must be positive".into()));
    }
    let points = grid.points();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep);
            let mut xs = vec![0.0; m];
            let mut ys = vec![0.0; n];
            let ranks = loop {
                for v in xs.iter_mut() {
                    *v = f.sample(&mut rng);
                }
                for v in ys.iter_mut() {
                    *v = g.sample(&mut rng);
                }
                xs.sort_unstable_by(f64::total_cmp);
                ys.sort_unstable_by(f64::total_cmp);
                if let Ok(r) = crate::empirical::PooledRanks::from_sorted(&xs, &ys) {
                    break r;
                }
            };
            let cc: Vec<f64> = points.iter().map(|&p| ranks.cc_hat(p)).collect();
            let ccc: Vec<f64> = points.iter().map(|&p| ranks.ccc_hat(p)).collect();
            (cc, ccc)
        })
        .collect();

    // Sequential reduction keeps the float sums independent of thread count.
    let mut cc_mean = vec![0.0; points.len()];
    let mut ccc_mean = vec![0.0; points.len()];
    for (cc, ccc) in &rows {
        for (acc, v) in cc_mean.iter_mut().zip(cc) {
            *acc += v;
        }
        for (acc, v) in ccc_mean.iter_mut().zip(ccc) {
            *acc += v;
        }
    }
    let r = replicates as f64;
    cc_mean.iter_mut().for_each(|v| *v /= r);
    ccc_mean.iter_mut().for_each(|v| *v /= r);

    Ok(McCurves {
        grid: grid.clone(),
        cc_mean,
        ccc_mean,
        m,
        n,
        replicates,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::Sample;
    use crate::models::NormalModel;
    use approx::assert_abs_diff_eq;

    fn data(x: &[f64], y: &[f64]) -> TwoSampleData {
        TwoSampleData::new(Sample::new(x.to_vec()).unwrap(), Sample::new(y.to_vec()).unwrap())
    }

    #[test]
    fn cc_zero_when_f_equals_g() {
        let f = NormalModel::standard();
        let g = NormalModel::standard();
        assert_abs_diff_eq!(cc_theoretical(&f, &g, 0.3).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ccc_theoretical(&f, &g, 0.4, 0.7).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn equal_medians_give_zero_at_half() {
        let f = NormalModel::standard();
        let g = NormalModel::new(0.0, 1.5).unwrap();
        assert_abs_diff_eq!(cc_theoretical(&f, &g, 0.5).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ccc_theoretical(&f, &g, 0.5, 0.5).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn cc_empirical_hand_values() {
        assert_eq!(cc_empirical(&data(&[1.0, 3.0], &[2.0, 4.0]), 0.5).unwrap(), 1.0);
        assert_eq!(cc_empirical(&data(&[1.0, 2.0], &[3.0, 4.0]), 0.5).unwrap(), 1.0);
        assert_eq!(ccc_empirical(&data(&[1.0, 3.0], &[2.0, 4.0]), 0.5).unwrap(), 0.0);
        assert_eq!(ccc_empirical(&data(&[1.0, 2.0], &[3.0, 4.0]), 0.5).unwrap(), 2.0);
        assert!(cc_empirical(&data(&[1.0], &[2.0]), 0.0).is_err());
    }

    #[test]
    fn moments_under_null_are_brownian_bridge() {
        let f = NormalModel::standard();
        let g = NormalModel::standard();
        let m = asymptotic_moments(&f, &g, 0.5, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(m.var_unpooled, 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(m.var_pooled, 0.25, epsilon = 1e-9);
        let m = asymptotic_moments(&f, &g, 0.5, 0.25, 0.75).unwrap();
        assert_abs_diff_eq!(m.cov_unpooled, 0.0625, epsilon = 1e-9);
        assert_abs_diff_eq!(m.cov_pooled, 0.0625, epsilon = 1e-9);
    }

    #[test]
    fn pooled_density_identity() {
        let f = NormalModel::standard();
        let g = NormalModel::new(1.0, 1.0).unwrap();
        for i in 1..20 {
            let p = i as f64 / 20.0;
            let (r1, r2) = pooled_densities(&f, &g, 0.3, p).unwrap();
            assert_abs_diff_eq!(0.3 * r1 + 0.7 * r2, 1.0, epsilon = 1e-8);
            let c = contrast_density(&f, &g, 0.3, p).unwrap();
            assert_abs_diff_eq!(c, r1 - r2, epsilon = 1e-12);
        }
    }

    #[test]
    fn contrast_integrates_to_zero() {
        let f = NormalModel::standard();
        let g = NormalModel::new(1.0, 1.0).unwrap();
        let v = contrast_integral(&f, &g, 0.4).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-6);
    }
}
