//! The nine standard simulation models and the power-study harness.

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::inference::{
    critical_value, simulate_null_joint, CriticalValue, StatConfig, StatId, Tail,
};
use crate::models::{
    ChiSquaredOneModel, DistributionModel, KurtoticModel, LaplaceModel, LehmannNormalModel,
    LogNormalModel, MixtureModel, NormalModel, ParetoModel, UniformModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;

/// Identifiers of the built-in (F, G) model pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlternativeId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
}

impl AlternativeId {
    pub const ALL: [AlternativeId; 9] = [
        AlternativeId::A1,
        AlternativeId::A2,
        AlternativeId::A3,
        AlternativeId::A4,
        AlternativeId::A5,
        AlternativeId::A6,
        AlternativeId::A7,
        AlternativeId::A8,
        AlternativeId::A9,
    ];

    /// All pairs with a closed form (everything but A3).
    pub const IMPLEMENTED: [AlternativeId; 8] = [
        AlternativeId::A1,
        AlternativeId::A2,
        AlternativeId::A4,
        AlternativeId::A5,
        AlternativeId::A6,
        AlternativeId::A7,
        AlternativeId::A8,
        AlternativeId::A9,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlternativeId::A1 => "a1",
            AlternativeId::A2 => "a2",
            AlternativeId::A3 => "a3",
            AlternativeId::A4 => "a4",
            AlternativeId::A5 => "a5",
            AlternativeId::A6 => "a6",
            AlternativeId::A7 => "a7",
            AlternativeId::A8 => "a8",
            AlternativeId::A9 => "a9",
        }
    }
}

impl std::fmt::Display for AlternativeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlternativeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlternativeId::ALL
            .iter()
            .find(|a| a.as_str() == s.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| Error::Domain(format!("unknown alternative {s:?}; expected a1..a9")))
    }
}

/// An (F, G) pair with samplers and CDFs, F being the reference group.
pub struct AlternativeSpec {
    pub id: Option<AlternativeId>,
    pub f: Box<dyn DistributionModel>,
    pub g: Box<dyn DistributionModel>,
    pub description: String,
}

impl AlternativeSpec {
    /// Plug-in slot for user-supplied model pairs, including a stand-in for
    /// the unimplemented a3.
    pub fn custom(
        f: Box<dyn DistributionModel>,
        g: Box<dyn DistributionModel>,
        description: impl Into<String>,
    ) -> Self {
        Self { id: None, f, g, description: description.into() }
    }
}

/// Builds one of the nine standard model pairs.
///
/// a3 has no closed form available here (its F side is defined only by
/// citation in the source literature), so it is reported as unimplemented;
/// use `AlternativeSpec::custom` to supply the pair yourself.
pub fn make_alternative(id: AlternativeId) -> Result<AlternativeSpec> {
    let spec = match id {
        AlternativeId::A1 => AlternativeSpec {
            id: Some(id),
            f: Box::new(NormalModel::standard()),
            g: Box::new(LehmannNormalModel::new(0.7)?),
            description: "standard normal vs Lehmann power 0.7 of the normal CDF".into(),
        },
        AlternativeId::A2 => AlternativeSpec {
            id: Some(id),
            f: Box::new(ParetoModel::new(1.0)?),
            g: Box::new(ParetoModel::new(1.3)?),
            description: "Pareto shape 1 vs Pareto shape 1.3, scale 1, support x >= 1".into(),
        },
        AlternativeId::A3 => {
            return Err(Error::NotImplemented {
                what: "alternative a3",
                detail: "no closed form is registered for its F side; supply the pair through AlternativeSpec::custom",
            })
        }
        AlternativeId::A4 => AlternativeSpec {
            id: Some(id),
            f: Box::new(MixtureModel::new(vec![
                (0.4, Box::new(NormalModel::new(0.4, 1.0)?) as Box<dyn DistributionModel>),
                (0.6, Box::new(ChiSquaredOneModel::new())),
            ])?),
            g: Box::new(NormalModel::new(0.4, 1.0)?),
            description: "0.4 N(0.4,1) + 0.6 chi-squared(1) mixture vs N(0.4,1)".into(),
        },
        AlternativeId::A5 => AlternativeSpec {
            id: Some(id),
            f: Box::new(LogNormalModel::new(0.85, 0.6)?),
            g: Box::new(MixtureModel::new(vec![
                (0.9, Box::new(LogNormalModel::new(0.85, 0.4)?) as Box<dyn DistributionModel>),
                (0.1, Box::new(LogNormalModel::new(0.4, 0.9)?)),
            ])?),
            description: "LN(0.85,0.6) vs 0.9 LN(0.85,0.4) + 0.1 LN(0.4,0.9); sigma is the log-sd".into(),
        },
        AlternativeId::A6 => AlternativeSpec {
            id: Some(id),
            f: Box::new(KurtoticModel::new(0.0)?),
            g: Box::new(KurtoticModel::new(1.3)?),
            description: "Z|Z|^0 = N(0,1) vs kurtotic Z|Z|^1.3".into(),
        },
        AlternativeId::A7 => AlternativeSpec {
            id: Some(id),
            f: Box::new(NormalModel::standard()),
            g: Box::new(NormalModel::new(0.0, 1.5)?),
            description: "normal scale model: N(0,1) vs N(0,2.25), sigma = 1.5".into(),
        },
        AlternativeId::A8 => AlternativeSpec {
            id: Some(id),
            f: Box::new(LaplaceModel::new(0.0, 1.0)?),
            g: Box::new(LaplaceModel::new(1.0, 2.5)?),
            description: "Laplace(0,1) vs Laplace(1,2.5), location-scale".into(),
        },
        AlternativeId::A9 => AlternativeSpec {
            id: Some(id),
            f: Box::new(LogNormalModel::new(0.85, 0.6)?),
            g: Box::new(LogNormalModel::new(1.2, 0.2)?),
            description: "LN(0.85,0.6) vs LN(1.2,0.2); sigma is the log-sd".into(),
        },
    };
    Ok(spec)
}

/// The null pair F = G = Uniform(0,1), handy for level checks.
pub fn null_pair() -> AlternativeSpec {
    AlternativeSpec::custom(
        Box::new(UniformModel::standard()),
        Box::new(UniformModel::standard()),
        "null: F = G = Uniform(0,1)",
    )
}

/// Empirical rejection proportions per (test, alternative) cell.
pub struct PowerTable {
    pub tests: Vec<StatId>,
    pub alternatives: Vec<String>,
    /// `rates[i][j]` = rejection proportion of `tests[i]` under
    /// `alternatives[j]`.
    pub rates: Vec<Vec<f64>>,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub runs: usize,
    pub crit_replicates: usize,
    pub seed: u64,
}

impl PowerTable {
    /// CSV with rows = tests and columns = alternatives, preceded by a
    /// metadata header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# m={} n={} d={} alpha={} runs={} crit_replicates={} seed={}",
            self.m, self.n, self.d, self.alpha, self.runs, self.crit_replicates, self.seed
        );
        let _ = write!(out, "test");
        for a in &self.alternatives {
            let _ = write!(out, ",{a}");
        }
        let _ = writeln!(out);
        for (stat, row) in self.tests.iter().zip(&self.rates) {
            let _ = write!(out, "{stat}");
            for rate in row {
                let _ = write!(out, ",{rate}");
            }
            let _ = writeln!(out);
        }
        out
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Rejection proportions of the given tests against the given model pairs.
///
/// All tests are evaluated on the same `runs` datasets per pair (m draws
/// from F, n from G, on per-run RNG streams). Critical values are simulated
/// once per statistic from `crit_replicates` uniform replicates under the
/// same seed; pass a cached value set through `crits` to skip that.
#[allow(clippy::too_many_arguments)]
pub fn power_study(
    tests: &[StatId],
    alternatives: &[&AlternativeSpec],
    m: usize,
    n: usize,
    grid: &DyadicGrid,
    alpha: f64,
    runs: usize,
    seed: u64,
    crit_replicates: usize,
    crits: Option<&[CriticalValue]>,
) -> Result<PowerTable> {
    if tests.is_empty() {
        return Err(Error::Domain("power study needs at least one test".into()));
    }
    if runs == 0 {
        return Err(Error::Domain("power study needs at least one run".into()));
    }
    let cfg = StatConfig::with_grid(grid.clone());
    let owned_crits: Vec<CriticalValue> = match crits {
        Some(c) => {
            if c.len() != tests.len() {
                return Err(Error::Domain("one critical value per test is required".into()));
            }
            c.to_vec()
        }
        None => {
            let nulls = simulate_null_joint(tests, m, n, &cfg, crit_replicates, seed)?;
            nulls
                .iter()
                .zip(tests)
                .map(|(null, stat)| critical_value(null, alpha, stat.tail()))
                .collect::<Result<_>>()?
        }
    };
    let plans: Vec<crate::inference::PlannedStat> =
        tests.iter().map(|s| crate::inference::plan(*s, &cfg, m + n)).collect::<Result<_>>()?;

    let mut rates = vec![Vec::with_capacity(alternatives.len()); tests.len()];
    for (ai, alt) in alternatives.iter().enumerate() {
        let alt_seed = seed ^ splitmix(ai as u64 + 1);
        let rejects: Vec<u64> = (0..runs as u64)
            .into_par_iter()
            .map(|run| {
                let mut rng = ChaCha8Rng::seed_from_u64(alt_seed);
                rng.set_stream(run);
                let mut xs = vec![0.0; m];
                let mut ys = vec![0.0; n];
                let mut y_below = Vec::new();
                let mut x_prefix = Vec::new();
                loop {
                    for v in xs.iter_mut() {
                        *v = alt.f.sample(&mut rng);
                    }
                    for v in ys.iter_mut() {
                        *v = alt.g.sample(&mut rng);
                    }
                    xs.sort_unstable_by(f64::total_cmp);
                    ys.sort_unstable_by(f64::total_cmp);
                    if crate::empirical::merge_counts(&xs, &ys, &mut y_below, &mut x_prefix).is_none() {
                        break;
                    }
                }
                let counts = crate::empirical::RankCounts { m, n, y_below: &y_below, x_prefix: &x_prefix };
                let mut mask = 0u64;
                for (ti, (plan, crit)) in plans.iter().zip(&owned_crits).enumerate() {
                    let value = crate::inference::eval_planned(plan, &counts);
                    let reject = match tests[ti].tail() {
                        Tail::Lower => value < crit.value,
                        Tail::Upper => value > crit.value,
                    };
                    if reject {
                        mask |= 1 << ti;
                    }
                }
                mask
            })
            .collect();
        for (ti, row) in rates.iter_mut().enumerate() {
            let count = rejects.iter().filter(|mask| *mask & (1 << ti) != 0).count();
            row.push(count as f64 / runs as f64);
            let _ = ai;
        }
    }

    Ok(PowerTable {
        tests: tests.to_vec(),
        alternatives: alternatives
            .iter()
            .map(|a| a.id.map(|i| i.as_str().to_string()).unwrap_or_else(|| "custom".into()))
            .collect(),
        rates,
        m,
        n,
        d: grid.d(),
        alpha,
        runs,
        crit_replicates,
        seed,
    })
}
