//! Save an index, reopen it lazily and watch which files a query touches.

use nks::bench::{gen_synthetic, SyntheticSpec};
use nks::{open_index, save_index, search_source, Index, IndexConfig, Query, SearchOptions};

fn main() -> nks::Result<()> {
    let dataset = gen_synthetic(&SyntheticSpec::new(2000, 4, 50, 2, 5))?;
    let index = Index::build(&dataset, IndexConfig::default())?;
    let dir = std::env::temp_dir().join(format!("nks-example-{}", std::process::id()));
    save_index(&index, &dataset, &dir)?;

    let disk = open_index(&dir)?;
    let query = Query::new(["k3", "k17", "k40"])?;
    let report = search_source(&disk, &query, 2, &SearchOptions::default())?;
    for entry in report.outcome.entries() {
        println!("{entry}");
    }
    println!("{:?}", disk.read_counts());
    println!("buckets read: {:?}", &disk.bucket_log()[..disk.bucket_log().len().min(8)]);

    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
