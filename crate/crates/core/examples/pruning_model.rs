//! Filtering power and the approximation bound for a few dimensions.

use nks::bench::{approx_bound, empirical_distributions, gen_queries, gen_synthetic, pruning_ratio, SyntheticSpec};
use nks::{Index, IndexConfig};

fn main() -> nks::Result<()> {
    for d in [2, 8, 32] {
        let dataset = gen_synthetic(&SyntheticSpec::new(3000, d, 50, 1, 9))?;
        let index = Index::build(&dataset, IndexConfig::default())?;
        let query = gen_queries(&dataset, 3, 1, 1)?.remove(0);
        let pruning = pruning_ratio(&index, &dataset, &query)?;
        let width = pruning.width;
        let dist = empirical_distributions(&dataset, &query, 2, width, 2000, 3)?;
        let bound = approx_bound(&dataset, &query, 2, width, 0.8, 2000, 3)?;
        println!(
            "d={d}: pruning ratio {:.5} ({} of {}), expected explored {:.0}, rho*(0.8) {:.3}",
            pruning.ratio,
            pruning.explored,
            pruning.total,
            dist.expected_explored(),
            bound
        );
    }
    Ok(())
}
