use crate::{data, DataArgs, GridArgs, McArgs, OutArgs, EXIT_OK};
use ccurves::alternatives::{make_alternative, AlternativeId};
use ccurves::curves::{
    asymptotic_moments, cc_theoretical, ccc_theoretical, comparison_density, mc_estimated_curves,
    pooled_densities,
};
use ccurves::error::Result;
use clap::Args;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Args, Debug)]
pub struct CurvesArgs {
    /// Built-in model pair a1..a9 for theoretical (and optionally MC) curves
    #[arg(long, value_parser = AlternativeId::from_str, conflicts_with_all = ["x", "y", "csv"])]
    pub alt: Option<AlternativeId>,
    /// Mixing proportion lambda for the pooled curve (default m/N when MC
    /// sizes are given, else 0.5)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Add columns r, r1, r2, var_a, var_b (theoretical mode)
    #[arg(long)]
    pub moments: bool,
    /// Monte Carlo estimate of the empirical curves: number of replicates
    #[arg(long)]
    pub mc_runs: Option<usize>,
    /// Sample sizes for the MC estimate
    #[arg(long, default_value_t = 5000)]
    pub m: usize,
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn run(args: CurvesArgs) -> Result<u8> {
    args.out.prepare()?;
    let mut csv = String::new();

    match args.alt {
        Some(id) => {
            let alt = make_alternative(id)?;
            let lambda = args
                .lambda
                .unwrap_or_else(|| args.m as f64 / (args.m + args.n) as f64);
            let grid = args.grid.choice().resolve((args.m + args.n).max(4))?;
            let mc = match args.mc_runs {
                Some(runs) => Some(mc_estimated_curves(
                    alt.f.as_ref(),
                    alt.g.as_ref(),
                    args.m,
                    args.n,
                    &grid,
                    runs,
                    args.mc.seed,
                )?),
                None => None,
            };
            let _ = writeln!(
                csv,
                "# alt={id} lambda={lambda} d={} mc_runs={} m={} n={} seed={}",
                grid.d(),
                args.mc_runs.map(|r| r.to_string()).unwrap_or_default(),
                args.m,
                args.n,
                args.mc.seed
            );
            let _ = write!(csv, "p,cc,ccc");
            if args.moments {
                let _ = write!(csv, ",r,r1,r2,var_a,var_b");
            }
            if mc.is_some() {
                let _ = write!(csv, ",cc_mc,ccc_mc");
            }
            let _ = writeln!(csv);
            for (i, &p) in grid.points().iter().enumerate() {
                let cc = cc_theoretical(alt.f.as_ref(), alt.g.as_ref(), p)?;
                let ccc = ccc_theoretical(alt.f.as_ref(), alt.g.as_ref(), lambda, p)?;
                let _ = write!(csv, "{p},{cc},{ccc}");
                if args.moments {
                    let r = comparison_density(alt.f.as_ref(), alt.g.as_ref(), p)
                        .map(|v| v.to_string())
                        .unwrap_or_else(|_| "divergent".into());
                    let (r1, r2) = pooled_densities(alt.f.as_ref(), alt.g.as_ref(), lambda, p)?;
                    match asymptotic_moments(alt.f.as_ref(), alt.g.as_ref(), lambda, p, p) {
                        Ok(m) => {
                            let _ = write!(csv, ",{r},{r1},{r2},{},{}", m.var_unpooled, m.var_pooled);
                        }
                        Err(_) => {
                            let _ = write!(csv, ",{r},{r1},{r2},divergent,divergent");
                        }
                    }
                }
                if let Some(mc) = &mc {
                    let _ = write!(csv, ",{},{}", mc.cc_mean[i], mc.ccc_mean[i]);
                }
                let _ = writeln!(csv);
            }
        }
        None => {
            let data = data::load(&args.data)?;
            let grid = args.grid.choice().resolve(data.total())?;
            let ranks = data.ranks()?;
            let _ = writeln!(
                csv,
                "# empirical m={} n={} d={} lambda={}",
                data.m(),
                data.n(),
                grid.d(),
                data.lambda()
            );
            let _ = writeln!(csv, "p,cc,ccc");
            for &p in grid.points() {
                let _ = writeln!(csv, "{p},{},{}", ranks.cc_hat(p), ranks.ccc_hat(p));
            }
        }
    }

    let path = args.out.out.join("curves.csv");
    std::fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}
