//! Compare approximate and exact answers on a synthetic dataset and report
//! the average approximation ratio.

use nks::bench::{avg_approx_ratio, gen_queries, gen_synthetic, SyntheticSpec};
use nks::{search, Index, IndexConfig, Mode};

fn main() -> nks::Result<()> {
    let dataset = gen_synthetic(&SyntheticSpec::new(5000, 16, 100, 2, 42))?;
    let exact = Index::build(&dataset, IndexConfig::new(Mode::Exact))?;
    let approx = Index::build(&dataset, IndexConfig::new(Mode::Approximate))?;

    let mut truth = Vec::new();
    let mut reported = Vec::new();
    for query in gen_queries(&dataset, 4, 20, 7)? {
        truth.push(search(&exact, &dataset, &query, 5, Mode::Exact)?.diameters());
        reported.push(search(&approx, &dataset, &query, 5, Mode::Approximate)?.diameters());
    }
    let report = avg_approx_ratio(&truth, &reported)?;
    println!("AAR over {} queries: {:.4}", truth.len(), report.aar);
    for (i, r) in report.per_query.iter().enumerate().take(5) {
        println!("  query {i}: {r:?}");
    }
    Ok(())
}
