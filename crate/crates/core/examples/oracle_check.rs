//! Cross-check the exact index against brute-force enumeration.

use nks::bench::{gen_queries, gen_synthetic, SyntheticSpec};
use nks::oracle::enumerate_candidates;
use nks::{brute_force_topk, search, Index, IndexConfig, Mode};

fn main() -> nks::Result<()> {
    let dataset = gen_synthetic(&SyntheticSpec::new(400, 8, 30, 2, 1))?;
    let index = Index::build(&dataset, IndexConfig::default())?;
    for query in gen_queries(&dataset, 3, 10, 2)? {
        let candidates = enumerate_candidates(&dataset, &query, nks::oracle::DEFAULT_LIMIT)?;
        let found = search(&index, &dataset, &query, 3, Mode::Exact)?;
        let truth = brute_force_topk(&dataset, &query, 3)?;
        let same = found.entries() == truth.entries();
        println!(
            "{:?}: {} candidates, best {:.3}, agrees: {same}",
            query.keywords(),
            candidates.len(),
            truth.entries()[0].diameter()
        );
        assert!(same);
    }
    Ok(())
}
