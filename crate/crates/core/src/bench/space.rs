//! Analytic index and dataset sizes, in bytes.

use crate::index::{Index, Mode};
use crate::types::Dataset;

/// Bytes per point id, coordinate and keyword.
pub const ELEMENT_BYTES: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    pub mode: Mode,
    pub points: f64,
    pub dimension: f64,
    pub tags: f64,
    pub dictionary: f64,
    pub vectors: u32,
    pub table_size: f64,
    pub scales: f64,
}

impl SpaceParams {
    /// Parameters of the reference configuration: m = 2, M = 10 000, L = 5,
    /// one tag per point.
    pub fn reference(mode: Mode, points: f64, dimension: f64, dictionary: f64) -> Self {
        SpaceParams {
            mode,
            points,
            dimension,
            tags: 1.0,
            dictionary,
            vectors: 2,
            table_size: 10_000.0,
            scales: 5.0,
        }
    }

    /// Parameters of a built index; `tags` is the mean tags per point.
    pub fn of(index: &Index, dataset: &Dataset) -> Self {
        let config = index.config();
        SpaceParams {
            mode: index.mode(),
            points: dataset.len() as f64,
            dimension: dataset.dimension() as f64,
            tags: dataset.mean_keywords_per_point(),
            dictionary: dataset.dictionary().len() as f64,
            vectors: config.vectors as u32,
            table_size: config.table_size as f64,
            scales: index.levels().len() as f64,
        }
    }
}

/// How the per-scale structures are totalled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpaceFormula {
    /// Keyword-point index once, each scale's hashtable and keyword-bucket
    /// index: `kp + L·(H + khb)`.
    Structural,
    /// `L·(kp + H + khb)` for exact indexes, `kp + L·(H + khb)` for
    /// approximate ones. Agrees with the reference ratio table on most cells.
    #[default]
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceReport {
    pub keyword_points: f64,
    pub hashtable: f64,
    pub keyword_buckets: f64,
    pub index: f64,
    pub dataset: f64,
    pub ratio: f64,
}

pub fn space_report(params: &SpaceParams, formula: SpaceFormula) -> SpaceReport {
    let e = ELEMENT_BYTES;
    let p = params;
    let kp = p.points * e * p.tags;
    let signatures = match p.mode {
        Mode::Exact => 2f64.powi(p.vectors as i32),
        Mode::Approximate => 1.0,
    };
    let h = signatures * p.points * e;
    let khb = p.dictionary * p.table_size * p.table_size.log2() / 8.0;
    let index = match (formula, p.mode) {
        (SpaceFormula::Reference, Mode::Exact) => p.scales * (kp + h + khb),
        _ => kp + p.scales * (h + khb),
    };
    let dataset = (p.dimension + p.tags) * p.points * e;
    SpaceReport {
        keyword_points: kp,
        hashtable: h,
        keyword_buckets: khb,
        index,
        dataset,
        ratio: index / dataset,
    }
}

/// Index-to-dataset size ratio for a built index.
pub fn space_ratio(index: &Index, dataset: &Dataset) -> f64 {
    space_report(&SpaceParams::of(index, dataset), SpaceFormula::default()).ratio
}

/// Rounds to `decimals` places, half away from zero.
pub fn round_to(value: f64, decimals: u32) -> f64 {
    let f = 10f64.powi(decimals as i32);
    (value * f).round() / f
}
