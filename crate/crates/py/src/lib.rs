//! Python bindings: the `TwoSample` class plus module-level helpers for
//! grids, null simulation, model pairs, and power tables.

use ccurves::alternatives::{make_alternative, power_study, AlternativeId};
use ccurves::curves::{cc_theoretical, ccc_theoretical};
use ccurves::grid::{bucket_minima, evaluate_p, evaluate_u, DecileBuckets, DyadicGrid};
use ccurves::inference::{
    critical_value, load_or_simulate, run_test, GridChoice, RunSettings, StatConfig, StatId,
};
use ccurves::{GridCap, ProcessKind, TiesPolicy, TwoSampleData};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::path::PathBuf;
use std::str::FromStr;

fn to_py_err(err: ccurves::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_stat(stat: &str) -> PyResult<StatId> {
    StatId::from_str(stat).map_err(to_py_err)
}

fn parse_grid(grid: &str) -> PyResult<GridCap> {
    match grid {
        "127" => Ok(GridCap::MainBody),
        "largest" => Ok(GridCap::Largest),
        "ustar" => Ok(GridCap::UStar),
        other => Err(PyValueError::new_err(format!(
            "grid must be one of 127, largest, ustar; got {other:?}"
        ))),
    }
}

fn parse_kind(kind: &str) -> PyResult<ProcessKind> {
    match kind {
        "u" | "U" => Ok(ProcessKind::U),
        "p" | "P" => Ok(ProcessKind::P),
        other => Err(PyValueError::new_err(format!("process must be u or p, got {other:?}"))),
    }
}

/// Two samples under comparison: x is the reference group, y the comparison
/// group. Construction applies the ties policy to the pooled sample.
#[pyclass]
struct TwoSample {
    inner: TwoSampleData,
}

#[pymethods]
impl TwoSample {
    #[new]
    #[pyo3(signature = (x, y, ties="reject", jitter_seed=0))]
    fn new(x: Vec<f64>, y: Vec<f64>, ties: &str, jitter_seed: u64) -> PyResult<Self> {
        let policy = match ties {
            "reject" => TiesPolicy::Reject,
            "jitter" => TiesPolicy::Jitter { seed: jitter_seed },
            other => {
                return Err(PyValueError::new_err(format!(
                    "ties must be reject or jitter, got {other:?}"
                )))
            }
        };
        Ok(Self { inner: TwoSampleData::from_values(x, y, policy).map_err(to_py_err)? })
    }

    fn m(&self) -> usize {
        self.inner.m()
    }

    fn n(&self) -> usize {
        self.inner.n()
    }

    fn total(&self) -> usize {
        self.inner.total()
    }

    fn lambda_n(&self) -> f64 {
        self.inner.lambda()
    }

    fn eta_n(&self) -> f64 {
        self.inner.eta()
    }

    /// Bars of the unpooled weighted process over the dyadic grid at
    /// resolution s.
    #[pyo3(signature = (s=6))]
    fn bars_u(&self, s: u32) -> PyResult<Vec<f64>> {
        Ok(evaluate_u(&self.inner, &DyadicGrid::new(s)).map_err(to_py_err)?.bars)
    }

    /// Bars of the pooled weighted process over the dyadic grid at
    /// resolution s.
    #[pyo3(signature = (s=6))]
    fn bars_p(&self, s: u32) -> PyResult<Vec<f64>> {
        Ok(evaluate_p(&self.inner, &DyadicGrid::new(s)).map_err(to_py_err)?.bars)
    }

    /// Per-decile local minima of the bars; None for deciles holding no grid
    /// point.
    #[pyo3(signature = (kind, s=6))]
    fn local_minima(&self, kind: &str, s: u32) -> PyResult<Vec<Option<f64>>> {
        let grid = DyadicGrid::new(s);
        let bars = match parse_kind(kind)? {
            ProcessKind::U => evaluate_u(&self.inner, &grid),
            ProcessKind::P => evaluate_p(&self.inner, &grid),
        }
        .map_err(to_py_err)?;
        Ok(bucket_minima(&bars, &DecileBuckets::for_grid(&grid)).to_vec())
    }

    /// Evaluates one statistic: u, p, ks, auc, uc, index-cc, index-ccc.
    #[pyo3(signature = (stat, s=6, epsilon=None, interval=None))]
    fn statistic(
        &self,
        stat: &str,
        s: u32,
        epsilon: Option<f64>,
        interval: Option<(f64, f64)>,
    ) -> PyResult<f64> {
        let stat = parse_stat(stat)?;
        let cfg = StatConfig {
            grid: Some(DyadicGrid::new(s)),
            epsilon,
            interval,
        };
        ccurves::inference::statistic(stat, &self.inner, &cfg).map_err(to_py_err)
    }

    /// Full test run; returns the report as a JSON string with the stable
    /// field names (statistic, value, critical_value, p_value, alpha,
    /// decision, barriers, local_minima, m, n, d, seed, replicates).
    #[pyo3(signature = (stat, alpha=0.05, replicates=10_000, seed=0, grid="127", s=None, epsilon=None, interval=None, cache_dir=None))]
    #[allow(clippy::too_many_arguments)]
    fn run_test(
        &self,
        stat: &str,
        alpha: f64,
        replicates: usize,
        seed: u64,
        grid: &str,
        s: Option<u32>,
        epsilon: Option<f64>,
        interval: Option<(f64, f64)>,
        cache_dir: Option<String>,
    ) -> PyResult<String> {
        let settings = RunSettings {
            alpha,
            replicates,
            seed,
            grid: match s {
                Some(s) => GridChoice::Resolution(s),
                None => GridChoice::Cap(parse_grid(grid)?),
            },
            epsilon,
            interval,
            cache_dir: cache_dir.map(PathBuf::from),
            with_barriers: true,
        };
        let report = run_test(&self.inner, parse_stat(stat)?, &settings).map_err(to_py_err)?;
        Ok(serde_json::to_string(&report).expect("report serializes"))
    }
}

/// Dyadic grid points j / 2^(s+1), j = 1 .. 2^(s+1)-1.
#[pyfunction]
fn dyadic_points(s: u32) -> Vec<f64> {
    DyadicGrid::new(s).points().to_vec()
}

/// Simulated critical value of a statistic under F = G.
/// Returns (value, degenerate).
#[pyfunction]
#[pyo3(signature = (stat, m, n, alpha=0.05, replicates=10_000, seed=0, s=6, epsilon=None, cache_dir=None))]
#[allow(clippy::too_many_arguments)]
fn simulate_critical(
    stat: &str,
    m: usize,
    n: usize,
    alpha: f64,
    replicates: usize,
    seed: u64,
    s: u32,
    epsilon: Option<f64>,
    cache_dir: Option<String>,
) -> PyResult<(f64, bool)> {
    let stat = parse_stat(stat)?;
    let cfg = StatConfig {
        grid: Some(DyadicGrid::new(s)),
        epsilon,
        interval: None,
    };
    let dir = cache_dir.map(PathBuf::from);
    let null = load_or_simulate(stat, m, n, &cfg, replicates, seed, dir.as_deref()).map_err(to_py_err)?;
    let crit = critical_value(&null, alpha, stat.tail()).map_err(to_py_err)?;
    Ok((crit.value, crit.degenerate))
}

/// Acceptance-region barriers l(N, alpha, I_k), k = 1..10, for one process.
#[pyfunction]
#[pyo3(signature = (kind, m, n, alpha=0.05, replicates=10_000, seed=0, s=6))]
fn barriers(
    kind: &str,
    m: usize,
    n: usize,
    alpha: f64,
    replicates: usize,
    seed: u64,
    s: u32,
) -> PyResult<Vec<Option<f64>>> {
    let grid = DyadicGrid::new(s);
    ccurves::inference::barriers(parse_kind(kind)?, m, n, &grid, alpha, replicates, seed)
        .map(|b| b.to_vec())
        .map_err(to_py_err)
}

/// Identifiers of the built-in model pairs with a closed form.
#[pyfunction]
fn alternatives() -> Vec<&'static str> {
    AlternativeId::IMPLEMENTED.iter().map(|a| a.as_str()).collect()
}

/// Draws (x, y) samples of sizes (m, n) from a built-in model pair.
#[pyfunction]
#[pyo3(signature = (alt, m, n, seed=0))]
fn sample_alternative(alt: &str, m: usize, n: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    use rand::SeedableRng;
    let spec = AlternativeId::from_str(alt)
        .and_then(make_alternative)
        .map_err(to_py_err)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let xs = (0..m).map(|_| spec.f.sample(&mut rng)).collect();
    let ys = (0..n).map(|_| spec.g.sample(&mut rng)).collect();
    Ok((xs, ys))
}

/// Theoretical (p, cc, ccc) rows over the dyadic grid for a built-in pair.
#[pyfunction]
#[pyo3(signature = (alt, s=6, lambda=0.5))]
fn theoretical_curves(alt: &str, s: u32, lambda: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let spec = AlternativeId::from_str(alt)
        .and_then(make_alternative)
        .map_err(to_py_err)?;
    DyadicGrid::new(s)
        .points()
        .iter()
        .map(|&p| {
            let cc = cc_theoretical(spec.f.as_ref(), spec.g.as_ref(), p)?;
            let ccc = ccc_theoretical(spec.f.as_ref(), spec.g.as_ref(), lambda, p)?;
            Ok((p, cc, ccc))
        })
        .collect::<ccurves::Result<Vec<_>>>()
        .map_err(to_py_err)
}

/// Rejection-rate table as CSV (rows = tests, columns = alternatives).
#[pyfunction]
#[pyo3(signature = (tests, alts, m=120, n=120, runs=1000, seed=0, alpha=0.05, s=6, crit_replicates=10_000))]
#[allow(clippy::too_many_arguments)]
fn power_table(
    tests: Vec<String>,
    alts: Vec<String>,
    m: usize,
    n: usize,
    runs: usize,
    seed: u64,
    alpha: f64,
    s: u32,
    crit_replicates: usize,
) -> PyResult<String> {
    let stats: Vec<StatId> = tests
        .iter()
        .map(|t| parse_stat(t))
        .collect::<PyResult<_>>()?;
    let specs = alts
        .iter()
        .map(|a| AlternativeId::from_str(a).and_then(make_alternative))
        .collect::<ccurves::Result<Vec<_>>>()
        .map_err(to_py_err)?;
    let refs: Vec<&_> = specs.iter().collect();
    let grid = DyadicGrid::new(s);
    let table = power_study(&stats, &refs, m, n, &grid, alpha, runs, seed, crit_replicates, None)
        .map_err(to_py_err)?;
    Ok(table.to_csv())
}

#[pymodule]
fn ccurves_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TwoSample>()?;
    m.add_function(wrap_pyfunction!(dyadic_points, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_critical, m)?)?;
    m.add_function(wrap_pyfunction!(barriers, m)?)?;
    m.add_function(wrap_pyfunction!(alternatives, m)?)?;
    m.add_function(wrap_pyfunction!(sample_alternative, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_curves, m)?)?;
    m.add_function(wrap_pyfunction!(power_table, m)?)?;
    Ok(())
}
