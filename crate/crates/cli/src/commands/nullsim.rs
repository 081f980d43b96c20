use crate::{GridArgs, McArgs, OutArgs, EXIT_OK};
use ccurves::error::Result;
use ccurves::inference::{critical_value, load_or_simulate, StatConfig, StatId};
use clap::Args;
use std::str::FromStr;

#[derive(Args, Debug)]
pub struct NullsimArgs {
    /// Reference sample size
    #[arg(long)]
    pub m: usize,
    /// Comparison sample size
    #[arg(long)]
    pub n: usize,
    /// Statistic (repeatable); defaults to u, p, ks, auc
    #[arg(long = "stat", value_parser = StatId::from_str)]
    pub stats: Vec<StatId>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Clipping level for uc / index statistics (default ln^3(N)/N)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Significance level (repeatable) at which to print critical values
    #[arg(long = "alpha", default_values_t = [0.05])]
    pub alphas: Vec<f64>,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn run(args: NullsimArgs) -> Result<u8> {
    args.out.prepare()?;
    let cache = args.out.cache_dir();
    let stats = if args.stats.is_empty() {
        vec![StatId::U, StatId::P, StatId::Ks, StatId::Auc]
    } else {
        args.stats.clone()
    };
    let total = args.m + args.n;
    let grid = args.grid.choice().resolve(total)?;
    let cfg = StatConfig {
        grid: Some(grid),
        epsilon: args.eps,
        interval: None,
    };
    println!(
        "null simulation: m={} n={} replicates={} seed={} cache={}",
        args.m,
        args.n,
        args.mc.runs,
        args.mc.seed,
        cache.display()
    );
    for stat in stats {
        let null = load_or_simulate(stat, args.m, args.n, &cfg, args.mc.runs, args.mc.seed, Some(&cache))?;
        let mut line = format!("{:<10} [{}]", stat.to_string(), null.descriptor);
        for &alpha in &args.alphas {
            let crit = critical_value(&null, alpha, stat.tail())?;
            line.push_str(&format!(
                "  q({alpha}) = {:.6}{}",
                crit.value,
                if crit.degenerate { " (degenerate)" } else { "" }
            ));
        }
        println!("{line}");
    }
    Ok(EXIT_OK)
}
