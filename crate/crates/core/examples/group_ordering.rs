//! Greedy group ordering against plain query order: same answers, fewer
//! tuples reach the last group.

use nks::bench::{gen_queries, gen_synthetic, SyntheticSpec};
use nks::subset::{GroupOrder, SubsetOptions};
use nks::{search_source, Index, IndexConfig, SearchOptions};

fn main() -> nks::Result<()> {
    let dataset = gen_synthetic(&SyntheticSpec::new(20_000, 8, 200, 1, 3))?;
    let index = Index::build(&dataset, IndexConfig::default())?;
    let source = index.source(&dataset);
    let with = |order| SearchOptions {
        subset: SubsetOptions {
            order,
            ..SubsetOptions::default()
        },
        ..SearchOptions::default()
    };
    let (mut greedy, mut plain) = (0, 0);
    for query in gen_queries(&dataset, 5, 20, 4)? {
        let a = search_source(&source, &query, 1, &with(GroupOrder::Greedy))?;
        let b = search_source(&source, &query, 1, &with(GroupOrder::Query))?;
        assert_eq!(a.outcome.diameters(), b.outcome.diameters());
        greedy += a.stats.subset.tuples_examined;
        plain += b.stats.subset.tuples_examined;
    }
    println!("tuples examined: greedy order {greedy}, query order {plain}");
    Ok(())
}
