use crate::{DataArgs, TiesArg};
use ccurves::error::{Error, Result};
use ccurves::ingest::{read_csv_groups, read_values_file};
use ccurves::{TiesPolicy, TwoSampleData};

pub fn load(args: &DataArgs) -> Result<TwoSampleData> {
    let (xs, ys) = match (&args.x, &args.y, &args.csv) {
        (Some(x), Some(y), None) => (read_values_file(x)?, read_values_file(y)?),
        (None, None, Some(csv)) => read_csv_groups(csv)?,
        _ => {
            return Err(Error::Domain(
                "provide either --x FILE and --y FILE, or --csv FILE".into(),
            ))
        }
    };
    let ties = match args.ties {
        TiesArg::Reject => TiesPolicy::Reject,
        TiesArg::Jitter => TiesPolicy::Jitter { seed: args.jitter_seed },
    };
    TwoSampleData::from_values(xs, ys, ties)
}
