//! Comparison-curve estimation and min-type stochastic dominance testing.
//!
//! The library compares two samples X (reference, CDF F) and Y (CDF G)
//! through normalized relative distributions: the comparison curve CC in the
//! unpooled setting and the contrast comparison curve CCC in the pooled one.
//! Their empirical versions, scaled by eta_N = sqrt(mn/N), are weighted rank
//! processes on (0,1); their values over a dyadic grid form bar plots, and
//! minima of the bars yield one-sided tests of the stochastic dominance
//! hypothesis F >= G with simulated, distribution-free critical values.
//!
//! Modules:
//! - [`empirical`]: samples, ECDFs/quantiles, pooling, ties policy, ranks
//! - [`models`]: parametric distribution models behind one trait
//! - [`curves`]: theoretical/empirical CC and CCC, comparison densities,
//!   asymptotic moments
//! - [`grid`]: dyadic grids, bar plots, decile buckets
//! - [`inference`]: test statistics, Monte Carlo nulls, critical values,
//!   barriers, reports
//! - [`alternatives`]: the nine standard simulation models and power studies
//! - [`ingest`]: file ingestion

pub mod alternatives;
pub mod curves;
pub mod empirical;
pub mod error;
pub mod grid;
pub mod inference;
pub mod ingest;
pub mod models;
pub mod numeric;

pub use empirical::{Sample, TiesPolicy, TwoSampleData};
pub use error::{Error, Result};
pub use grid::{DyadicGrid, GridCap, ProcessKind};
pub use inference::{RunSettings, StatId, Tail, TestReport};
