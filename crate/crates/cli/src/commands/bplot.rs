use crate::{data, svg, DataArgs, GridArgs, McArgs, OutArgs, EXIT_OK, EXIT_REJECT};
use ccurves::error::Result;
use ccurves::grid::{bucket_minima, evaluate_p, evaluate_u, DecileBuckets};
use ccurves::inference::{familywise_barriers, simulate_grid_null};
use ccurves::ProcessKind;
use clap::Args;
use std::fmt::Write as _;

#[derive(Args, Debug)]
pub struct BplotArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Significance level of the acceptance strips
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Skip the SVG rendering
    #[arg(long)]
    pub no_svg: bool,
    /// Calibrate the barriers jointly across the ten deciles instead of per
    /// bucket
    #[arg(long)]
    pub familywise: bool,
}

pub fn run(args: BplotArgs) -> Result<u8> {
    args.out.prepare()?;
    let data = data::load(&args.data)?;
    let grid = args.grid.choice().resolve(data.total())?;
    let buckets = DecileBuckets::for_grid(&grid);

    let bars_u = evaluate_u(&data, &grid)?;
    let bars_p = evaluate_p(&data, &grid)?;
    let (l_u, l_p) = if args.familywise {
        (
            familywise_barriers(ProcessKind::U, data.m(), data.n(), &grid, args.alpha, args.mc.runs, args.mc.seed)?,
            familywise_barriers(ProcessKind::P, data.m(), data.n(), &grid, args.alpha, args.mc.runs, args.mc.seed)?,
        )
    } else {
        let gn = simulate_grid_null(data.m(), data.n(), &grid, args.mc.runs, args.mc.seed)?;
        (gn.barriers(ProcessKind::U, args.alpha)?, gn.barriers(ProcessKind::P, args.alpha)?)
    };
    let min_u = bucket_minima(&bars_u, &buckets);
    let min_p = bucket_minima(&bars_p, &buckets);

    let meta = format!(
        "m={} n={} d={} alpha={} replicates={} seed={} barriers={}",
        data.m(),
        data.n(),
        grid.d(),
        args.alpha,
        args.mc.runs,
        args.mc.seed,
        if args.familywise { "familywise" } else { "per-bucket" }
    );

    let mut csv = String::new();
    let _ = writeln!(csv, "# {meta}");
    let _ = writeln!(csv, "j,p,bar_U,bar_P,bucket,barrier_U,barrier_P");
    for (i, &p) in grid.points().iter().enumerate() {
        let b = buckets.assignment()[i] as usize;
        let fmt_b = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            i + 1,
            p,
            bars_u.bars[i],
            bars_p.bars[i],
            b,
            fmt_b(l_u[b - 1]),
            fmt_b(l_p[b - 1]),
        );
    }
    let csv_path = args.out.out.join("bplot.csv");
    std::fs::write(&csv_path, csv)?;
    println!("wrote {}", csv_path.display());

    if !args.no_svg {
        let rendered = svg::render(
            &[
                svg::Panel {
                    title: "U process (unpooled)",
                    points: grid.points(),
                    bars: &bars_u.bars,
                    barriers: &l_u,
                    buckets: buckets.assignment(),
                },
                svg::Panel {
                    title: "P process (pooled)",
                    points: grid.points(),
                    bars: &bars_p.bars,
                    barriers: &l_p,
                    buckets: buckets.assignment(),
                },
            ],
            &meta,
        );
        let svg_path = args.out.out.join("bplot.svg");
        std::fs::write(&svg_path, rendered)?;
        println!("wrote {}", svg_path.display());
    }

    // Flag buckets whose observed local minimum dips below the barrier.
    let mut any_flag = false;
    for (label, mins, barriers) in [("U", &min_u, &l_u), ("P", &min_p, &l_p)] {
        for k in 0..10 {
            if let (Some(observed), Some(barrier)) = (mins[k], barriers[k]) {
                if observed < barrier {
                    any_flag = true;
                    println!(
                        "{label}: local minimum {observed:.3} in I{} below barrier {barrier:.3}",
                        k + 1
                    );
                }
            }
        }
    }
    if !any_flag {
        println!("no bucket minima below their barriers at alpha = {}", args.alpha);
    }
    Ok(if any_flag { EXIT_REJECT } else { EXIT_OK })
}
