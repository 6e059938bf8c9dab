//! Build an exact index over a dozen tagged points and ask for the tightest
//! groups covering three keywords.

use nks::{search, Dataset, Index, IndexConfig, Mode, Query};

fn main() -> nks::Result<()> {
    let mut b = Dataset::builder(2);
    for (id, x, y, tags) in [
        (1, 1.0, 1.0, &["a"][..]),
        (2, 3.0, 8.0, &["b"]),
        (3, 9.0, 2.0, &["c"]),
        (4, 6.0, 9.0, &["a", "b"]),
        (5, 2.0, 5.0, &["c"]),
        (6, 8.0, 8.0, &["b"]),
        (7, 5.0, 5.0, &["a"]),
        (8, 5.4, 5.3, &["b"]),
        (9, 5.2, 4.7, &["c"]),
        (10, 9.0, 9.0, &["a"]),
        (11, 0.5, 9.0, &["c"]),
        (12, 1.0, 3.0, &["b", "c"]),
    ] {
        b.push(id, vec![x, y], tags);
    }
    let dataset = b.build()?;
    let index = Index::build(&dataset, IndexConfig::default())?;
    let query = Query::new(["a", "b", "c"])?;

    let top = search(&index, &dataset, &query, 3, Mode::Exact)?;
    for (rank, entry) in top.entries().iter().enumerate() {
        println!("{}. {entry}", rank + 1);
    }
    Ok(())
}
