//! Parametric distribution models: CDF, quantile, density, and seeded
//! sampling behind one object-safe trait.

use crate::error::{Error, Result};
use crate::numeric::invert_monotone;
use rand::RngCore;
use statrs::distribution::{Continuous, ContinuousCDF, Laplace, LogNormal, Normal, Pareto, Uniform};

/// A continuous distribution with everything the curve machinery needs.
///
/// The default sampler is the inverse-CDF transform of a uniform draw, which
/// keeps Monte Carlo output a pure function of the RNG stream.
pub trait DistributionModel: Send + Sync {
    fn cdf(&self, x: f64) -> f64;
    /// Quantile for p in (0, 1).
    fn quantile(&self, p: f64) -> f64;
    fn density(&self, x: f64) -> f64;
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.quantile(open_uniform(rng))
    }
}

/// Uniform draw in the open interval (0, 1).
pub fn open_uniform(rng: &mut dyn RngCore) -> f64 {
    loop {
        let u = rand::Rng::random::<f64>(rng);
        if u > 0.0 && u < 1.0 {
            return u;
        }
    }
}

macro_rules! statrs_model {
    ($name:ident, $inner:ty, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone)]
        pub struct $name {
            inner: $inner,
        }

        impl DistributionModel for $name {
            fn cdf(&self, x: f64) -> f64 {
                self.inner.cdf(x)
            }
            fn quantile(&self, p: f64) -> f64 {
                self.inner.inverse_cdf(p)
            }
            fn density(&self, x: f64) -> f64 {
                self.inner.pdf(x)
            }
        }
    };
}

statrs_model!(NormalModel, Normal, "Normal distribution N(mu, sigma^2); constructed from mean and standard deviation.");
statrs_model!(LogNormalModel, LogNormal, "Log-normal LN(mu, sigma): exp of N(mu, sigma^2), sigma being the log standard deviation.");
statrs_model!(LaplaceModel, Laplace, "Location-scale Laplace family.");
statrs_model!(UniformModel, Uniform, "Uniform distribution on [a, b].");

impl NormalModel {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite() && mean.is_finite()) {
            return Err(Error::Domain(format!("invalid normal parameters ({mean}, {sd})")));
        }
        Ok(Self { inner: Normal::new(mean, sd).expect("validated") })
    }

    pub fn standard() -> Self {
        Self { inner: Normal::standard() }
    }
}

impl LogNormalModel {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::Domain(format!("invalid log-normal parameters ({mu}, {sigma})")));
        }
        Ok(Self { inner: LogNormal::new(mu, sigma).expect("validated") })
    }
}

impl LaplaceModel {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite() && location.is_finite()) {
            return Err(Error::Domain(format!("invalid Laplace parameters ({location}, {scale})")));
        }
        Ok(Self { inner: Laplace::new(location, scale).expect("validated") })
    }
}

impl UniformModel {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("invalid uniform bounds ({a}, {b})")));
        }
        Ok(Self { inner: Uniform::new(a, b).expect("validated") })
    }

    pub fn standard() -> Self {
        Self::new(0.0, 1.0).expect("valid")
    }
}

/// Pareto with scale 1 and shape theta: CDF 1 - x^(-theta) on x >= 1.
#[derive(Debug, Clone)]
pub struct ParetoModel {
    inner: Pareto,
}

impl ParetoModel {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::Domain(format!("invalid Pareto shape {shape}")));
        }
        Ok(Self { inner: Pareto::new(1.0, shape).expect("validated") })
    }
}

impl DistributionModel for ParetoModel {
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }
    fn quantile(&self, p: f64) -> f64 {
        self.inner.inverse_cdf(p)
    }
    fn density(&self, x: f64) -> f64 {
        self.inner.pdf(x)
    }
}

/// Chi-squared with one degree of freedom, realized as Z^2 for standard
/// normal Z. Sampling draws Z and squares it.
#[derive(Debug, Clone)]
pub struct ChiSquaredOneModel {
    normal: Normal,
}

impl ChiSquaredOneModel {
    pub fn new() -> Self {
        Self { normal: Normal::standard() }
    }
}

impl Default for ChiSquaredOneModel {
    fn default() -> Self {
        Self::new()
    }
}

impl DistributionModel for ChiSquaredOneModel {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            2.0 * self.normal.cdf(x.sqrt()) - 1.0
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        let z = self.normal.inverse_cdf(0.5 * (1.0 + p));
        z * z
    }

    fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.normal.pdf(x.sqrt()) / x.sqrt()
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let z = self.normal.inverse_cdf(open_uniform(rng));
        z * z
    }
}

/// Lehmann power family over the standard normal: CDF Phi(x)^theta.
/// Sampled as Phi^{-1}(U^{1/theta}).
#[derive(Debug, Clone)]
pub struct LehmannNormalModel {
    theta: f64,
    normal: Normal,
}

impl LehmannNormalModel {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("invalid Lehmann exponent {theta}")));
        }
        Ok(Self { theta, normal: Normal::standard() })
    }
}

impl DistributionModel for LehmannNormalModel {
    fn cdf(&self, x: f64) -> f64 {
        self.normal.cdf(x).powf(self.theta)
    }

    fn quantile(&self, p: f64) -> f64 {
        self.normal.inverse_cdf(p.powf(1.0 / self.theta))
    }

    fn density(&self, x: f64) -> f64 {
        self.theta * self.normal.cdf(x).powf(self.theta - 1.0) * self.normal.pdf(x)
    }
}

/// Kurtotic family: X = Z * |Z|^theta with Z standard normal, so the CDF is
/// Phi(sign(x) |x|^(1/(1+theta))). theta = 0 recovers N(0, 1).
#[derive(Debug, Clone)]
pub struct KurtoticModel {
    theta: f64,
    normal: Normal,
}

impl KurtoticModel {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("invalid kurtotic exponent {theta}")));
        }
        Ok(Self { theta, normal: Normal::standard() })
    }
}

impl DistributionModel for KurtoticModel {
    fn cdf(&self, x: f64) -> f64 {
        let z = x.signum() * x.abs().powf(1.0 / (1.0 + self.theta));
        self.normal.cdf(z)
    }

    fn quantile(&self, p: f64) -> f64 {
        let z = self.normal.inverse_cdf(p);
        z.signum() * z.abs().powf(1.0 + self.theta)
    }

    fn density(&self, x: f64) -> f64 {
        if x == 0.0 {
            // Density blows up at 0 for theta > 0; callers treat this
            // through the divergence flags, never silently.
            return if self.theta == 0.0 { self.normal.pdf(0.0) } else { f64::INFINITY };
        }
        let e = 1.0 / (1.0 + self.theta);
        let z = x.signum() * x.abs().powf(e);
        self.normal.pdf(z) * e * x.abs().powf(e - 1.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let z = self.normal.inverse_cdf(open_uniform(rng));
        z * z.abs().powf(self.theta)
    }
}

/// Finite mixture of models. Sampling picks a component from the seeded
/// stream, then draws from it.
pub struct MixtureModel {
    components: Vec<(f64, Box<dyn DistributionModel>)>,
}

impl MixtureModel {
    pub fn new(components: Vec<(f64, Box<dyn DistributionModel>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("mixture needs at least one component".into()));
        }
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| !w.is_finite() || *w <= 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("mixture weights must be positive and sum to 1, got total {total}")));
        }
        Ok(Self { components })
    }
}

impl DistributionModel for MixtureModel {
    fn cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, c)| w * c.cdf(x)).sum()
    }

    fn quantile(&self, p: f64) -> f64 {
        let lo = self
            .components
            .iter()
            .map(|(_, c)| c.quantile(p))
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .components
            .iter()
            .map(|(_, c)| c.quantile(p))
            .fold(f64::NEG_INFINITY, f64::max);
        invert_monotone(|x| self.cdf(x), p, lo, hi, 1e-12, "mixture quantile")
            .expect("mixture cdf brackets its quantile")
    }

    fn density(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, c)| w * c.density(x)).sum()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u = open_uniform(rng);
        let mut acc = 0.0;
        for (w, c) in &self.components {
            acc += w;
            if u <= acc {
                return c.sample(rng);
            }
        }
        self.components.last().expect("nonempty").1.sample(rng)
    }
}
