use crate::{GridArgs, McArgs, OutArgs, EXIT_OK};
use ccurves::alternatives::{make_alternative, power_study, AlternativeId};
use ccurves::error::{Error, Result};
use ccurves::inference::StatId;
use clap::Args;
use std::str::FromStr;

#[derive(Args, Debug)]
pub struct PowerArgs {
    /// Model pair (repeatable): a1..a9
    #[arg(long = "alt", value_parser = AlternativeId::from_str)]
    pub alts: Vec<AlternativeId>,
    /// Run every pair with a closed form (a3 excluded)
    #[arg(long, conflicts_with = "alts")]
    pub all: bool,
    /// Test statistic (repeatable); defaults to u, p, ks, auc
    #[arg(long = "stat", value_parser = StatId::from_str)]
    pub stats: Vec<StatId>,
    #[arg(long, default_value_t = 120)]
    pub m: usize,
    #[arg(long, default_value_t = 120)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Replicates for the critical-value simulation
    #[arg(long, default_value_t = 100_000)]
    pub crit_runs: usize,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn run(args: PowerArgs) -> Result<u8> {
    args.out.prepare()?;
    let stats = if args.stats.is_empty() {
        vec![StatId::U, StatId::P, StatId::Ks, StatId::Auc]
    } else {
        args.stats.clone()
    };
    if stats.is_empty() {
        return Err(Error::Domain("power study needs at least one test".into()));
    }
    let ids: Vec<AlternativeId> = if args.all {
        AlternativeId::IMPLEMENTED.to_vec()
    } else if args.alts.is_empty() {
        return Err(Error::Domain("pass --alt a1..a9 (repeatable) or --all".into()));
    } else {
        args.alts.clone()
    };
    let specs = ids
        .iter()
        .map(|id| make_alternative(*id))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&_> = specs.iter().collect();
    let grid = args.grid.choice().resolve(args.m + args.n)?;

    let table = power_study(
        &stats,
        &refs,
        args.m,
        args.n,
        &grid,
        args.alpha,
        args.mc.runs,
        args.mc.seed,
        args.crit_runs,
        None,
    )?;

    let csv = table.to_csv();
    print!("{csv}");
    let path = args.out.out.join("power.csv");
    std::fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}
