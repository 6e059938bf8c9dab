//! Run a benchmark plan and print CSV. Pass a TOML path, or run the small
//! built-in plan.

use nks::bench::{run_benchmark, write_bound_csv, write_csv, BenchPlan};

const PLAN: &str = r#"
queries = 10
repetitions = 3

[[cell]]
mode = "exact"
N = 5000
d = 8
U = 100
t = 1
q = 3
k = 1
seed = 1
pruning = true

[[cell]]
mode = "approx"
N = 5000
d = 8
U = 100
t = 1
q = 3
k = 1
seed = 1

[[bound]]
N = 2000
d = 8
U = 40
t = 1
q = 3
width = 4000.0
lambdas = [0.5, 0.8, 0.95]
samples = 2000
queries = 3
"#;

fn main() -> nks::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).map_err(|e| nks::Error::Io {
            path: path.into(),
            source: e,
        })?,
        None => PLAN.to_string(),
    };
    let report = run_benchmark(&BenchPlan::from_toml(&text)?);
    write_csv(&report, std::io::stdout())?;
    println!();
    write_bound_csv(&report, std::io::stdout())?;
    Ok(())
}
