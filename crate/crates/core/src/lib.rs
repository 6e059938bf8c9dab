//! Nearest keyword set search: find the k tightest groups of points that
//! together carry every query keyword, using random projections hashed at
//! several bin widths.
//!
//! ```
//! use nks::{search, Dataset, Index, IndexConfig, Mode, Query};
//!
//! let mut b = Dataset::builder(2);
//! b.push(1, vec![0.0, 0.0], &["cafe"]);
//! b.push(2, vec![1.0, 0.0], &["park"]);
//! b.push(3, vec![50.0, 50.0], &["park"]);
//! let ds = b.build().unwrap();
//! let index = Index::build(&ds, IndexConfig::default()).unwrap();
//! let q = Query::new(["cafe", "park"]).unwrap();
//! let top = search(&index, &ds, &q, 1, Mode::Exact).unwrap();
//! assert_eq!(top.entries()[0].ids(), &[1, 2]);
//! ```

pub mod bench;
pub mod cli;
pub mod datafile;
pub mod error;
pub mod geometry;
pub mod index;
pub mod oracle;
pub mod persistence;
pub mod queue;
pub mod search;
pub mod subset;
pub mod types;

pub use error::{Error, Result};
pub use geometry::{diameter, distance};
pub use index::{Index, IndexConfig, IndexSource, Mode};
pub use oracle::brute_force_topk;
pub use persistence::{load_index, open_index, save_index, DiskIndex};
pub use queue::{ResultEntry, ResultQueue};
pub use search::{search, search_source, SearchOptions, SearchOutcome, SearchReport};
pub use types::{Dataset, KeywordId, Point, PointId, Query};
