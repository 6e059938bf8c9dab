//! Benchmark sweeps described in TOML, reported as CSV.
//!
//! ```toml
//! queries = 50
//! repetitions = 3
//!
//! [[cell]]
//! mode = "approx"
//! N = 10000
//! d = 32
//! U = 100
//! t = 2
//! q = 3
//! k = 5
//! seed = 1
//! ```

use std::io::Write;
use std::time::Instant;

use serde::Deserialize;

use crate::bench::metrics::{approx_bound_in, avg_approx_ratio, pruning_ratio};
use crate::bench::space::space_ratio;
use crate::bench::synth::{gen_queries, gen_synthetic, SyntheticSpec};
use crate::error::{Error, Result};
use crate::index::{Index, IndexConfig, Mode};
use crate::oracle::{brute_force_topk, enumerate_candidates, raw_tuple_count, DEFAULT_LIMIT};
use crate::search::{search_source, SearchOptions};
use crate::types::{Dataset, Query};

pub const CSV_HEADER: [&str; 14] = [
    "mode",
    "N",
    "d",
    "U",
    "t",
    "q",
    "k",
    "seed",
    "query_ms_mean",
    "AAR",
    "pruning_ratio",
    "subsets_explored",
    "buckets_scanned",
    "space_ratio",
];

pub const BOUND_HEADER: [&str; 11] = ["N", "d", "U", "t", "q", "m", "width", "seed", "lambda", "rho", "queries"];

/// Where the true diameters for AAR come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    /// Brute force when the raw tuple count fits the oracle limit, else an
    /// exact-mode index search.
    #[default]
    Auto,
    Oracle,
    Exact,
    None,
}

fn default_mode() -> Mode {
    Mode::Exact
}

fn deserialize_mode<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Mode, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchCell {
    #[serde(default = "default_mode", deserialize_with = "deserialize_mode")]
    pub mode: Mode,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    #[serde(rename = "U")]
    pub u: usize,
    pub t: usize,
    pub q: usize,
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    pub vectors: Option<usize>,
    pub scales: Option<usize>,
    pub table_size: Option<usize>,
    #[serde(default)]
    pub truth: Truth,
    #[serde(default)]
    pub pruning: bool,
}

impl BenchCell {
    fn spec(&self) -> SyntheticSpec {
        SyntheticSpec::new(self.n, self.d, self.u, self.t, self.seed)
    }

    fn config(&self, mode: Mode) -> IndexConfig {
        let mut c = IndexConfig::new(mode).with_seed(self.seed);
        if let Some(m) = self.vectors {
            c = c.with_vectors(m);
        }
        if let Some(l) = self.scales {
            c = c.with_scales(l);
        }
        if let Some(size) = self.table_size {
            c = c.with_table_size(size);
        }
        c
    }
}

/// Approximation-bound estimate over a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCell {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    #[serde(rename = "U")]
    pub u: usize,
    pub t: usize,
    pub q: usize,
    #[serde(default = "default_vectors")]
    pub m: u32,
    pub width: f64,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bound_queries")]
    pub queries: usize,
}

fn default_vectors() -> u32 {
    2
}

fn default_samples() -> usize {
    10_000
}

fn default_bound_queries() -> usize {
    5
}

fn default_queries() -> usize {
    50
}

fn default_repetitions() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchPlan {
    #[serde(default = "default_queries")]
    pub queries: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default, rename = "cell")]
    pub cells: Vec<BenchCell>,
    #[serde(default, rename = "bound")]
    pub bounds: Vec<BoundCell>,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            queries: default_queries(),
            repetitions: default_repetitions(),
            cells: Vec::new(),
            bounds: Vec::new(),
        }
    }
}

impl BenchPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: BenchPlan = toml::from_str(text).map_err(|e| Error::invalid(format!("bench plan: {e}")))?;
        if plan.repetitions == 0 {
            return Err(Error::invalid("bench plan: repetitions must be at least 1"));
        }
        Ok(plan)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub cell: BenchCell,
    pub query_ms_mean: Option<f64>,
    pub aar: Option<f64>,
    pub pruning_ratio: Option<f64>,
    pub subsets_explored: Option<f64>,
    pub buckets_scanned: Option<f64>,
    pub space_ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub cell: BoundCell,
    pub lambda: f64,
    /// Mean over queries; `None` if the cell failed.
    pub rho: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub bounds: Vec<BoundRow>,
}

pub fn run_benchmark(plan: &BenchPlan) -> BenchReport {
    let rows = plan
        .cells
        .iter()
        .map(|cell| {
            run_cell(plan, cell).unwrap_or_else(|e| BenchRow {
                cell: cell.clone(),
                query_ms_mean: None,
                aar: None,
                pruning_ratio: None,
                subsets_explored: None,
                buckets_scanned: None,
                space_ratio: None,
                error: Some(e.to_string()),
            })
        })
        .collect();
    let bounds = plan
        .bounds
        .iter()
        .flat_map(|cell| match run_bound(cell) {
            Ok(rhos) => cell
                .lambdas
                .iter()
                .zip(rhos)
                .map(|(&lambda, rho)| BoundRow {
                    cell: cell.clone(),
                    lambda,
                    rho: Some(rho),
                    error: None,
                })
                .collect::<Vec<_>>(),
            Err(e) => cell
                .lambdas
                .iter()
                .map(|&lambda| BoundRow {
                    cell: cell.clone(),
                    lambda,
                    rho: None,
                    error: Some(e.to_string()),
                })
                .collect(),
        })
        .collect();
    BenchReport { rows, bounds }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn run_cell(plan: &BenchPlan, cell: &BenchCell) -> Result<BenchRow> {
    let dataset = gen_synthetic(&cell.spec())?;
    let index = Index::build(&dataset, cell.config(cell.mode))?;
    let queries = gen_queries(&dataset, cell.q, plan.queries, cell.seed.wrapping_add(1))?;
    let options = SearchOptions::default();
    let source = index.source(&dataset);

    let mut times = Vec::with_capacity(queries.len());
    let mut reported = Vec::with_capacity(queries.len());
    let mut subsets = Vec::with_capacity(queries.len());
    let mut buckets = Vec::with_capacity(queries.len());
    for query in &queries {
        let mut report = None;
        let start = Instant::now();
        for _ in 0..plan.repetitions {
            report = Some(search_source(&source, query, cell.k, &options)?);
        }
        times.push(start.elapsed().as_secs_f64() * 1e3 / plan.repetitions as f64);
        let report = report.expect("at least one repetition");
        reported.push(report.outcome.diameters());
        subsets.push(report.stats.subsets_explored as f64);
        buckets.push(report.stats.buckets_scanned as f64);
    }

    let aar = match true_diameters(cell, &dataset, &index, &queries)? {
        Some(truth) => Some(avg_approx_ratio(&truth, &reported)?.aar),
        None => None,
    };
    let pruning = if cell.pruning {
        let ratios = queries
            .iter()
            .map(|q| pruning_ratio(&index, &dataset, q).map(|r| r.ratio))
            .collect::<Result<Vec<f64>>>()?;
        Some(mean(&ratios))
    } else {
        None
    };
    Ok(BenchRow {
        cell: cell.clone(),
        query_ms_mean: Some(mean(&times)),
        aar,
        pruning_ratio: pruning,
        subsets_explored: Some(mean(&subsets)),
        buckets_scanned: Some(mean(&buckets)),
        space_ratio: Some(space_ratio(&index, &dataset)),
        error: None,
    })
}

fn true_diameters(cell: &BenchCell, dataset: &Dataset, index: &Index, queries: &[Query]) -> Result<Option<Vec<Vec<f64>>>> {
    let oracle_fits = |q: &Query| raw_tuple_count(dataset, q).is_some_and(|n| n <= DEFAULT_LIMIT as u128);
    let use_oracle = match cell.truth {
        Truth::None => return Ok(None),
        Truth::Oracle => true,
        Truth::Exact => false,
        Truth::Auto => queries.iter().all(oracle_fits),
    };
    if use_oracle {
        let truth = queries
            .iter()
            .map(|q| Ok(brute_force_topk(dataset, q, cell.k)?.entries().iter().map(|e| e.diameter()).collect()))
            .collect::<Result<Vec<Vec<f64>>>>()?;
        return Ok(Some(truth));
    }
    let exact;
    let exact_index = if index.mode() == Mode::Exact {
        index
    } else {
        exact = Index::build(dataset, cell.config(Mode::Exact))?;
        &exact
    };
    let source = exact_index.source(dataset);
    let truth = queries
        .iter()
        .map(|q| Ok(search_source(&source, q, cell.k, &SearchOptions::default())?.outcome.diameters()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(Some(truth))
}

fn run_bound(cell: &BoundCell) -> Result<Vec<f64>> {
    let dataset = gen_synthetic(&SyntheticSpec::new(cell.n, cell.d, cell.u, cell.t, cell.seed))?;
    let queries = gen_queries(&dataset, cell.q, cell.queries, cell.seed.wrapping_add(1))?;
    let mut sums = vec![0.0; cell.lambdas.len()];
    for (i, q) in queries.iter().enumerate() {
        let universe = enumerate_candidates(&dataset, q, DEFAULT_LIMIT)?;
        let rhos = approx_bound_in(
            &dataset,
            &universe,
            cell.m,
            cell.width,
            &cell.lambdas,
            cell.samples,
            cell.seed.wrapping_add(i as u64),
        )?;
        for (s, r) in sums.iter_mut().zip(rhos) {
            *s += r;
        }
    }
    Ok(sums.into_iter().map(|s| s / queries.len() as f64).collect())
}

fn field(value: Option<f64>, failed: bool) -> String {
    match value {
        Some(v) => v.to_string(),
        None if failed => "error".to_string(),
        None => String::new(),
    }
}

pub fn write_csv(report: &BenchReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::invalid(format!("csv output: {e}"));
    w.write_record(CSV_HEADER).map_err(fail)?;
    for row in &report.rows {
        let c = &row.cell;
        let failed = row.error.is_some();
        w.write_record([
            c.mode.as_str().to_string(),
            c.n.to_string(),
            c.d.to_string(),
            c.u.to_string(),
            c.t.to_string(),
            c.q.to_string(),
            c.k.to_string(),
            c.seed.to_string(),
            field(row.query_ms_mean, failed),
            field(row.aar, failed),
            field(row.pruning_ratio, failed),
            field(row.subsets_explored, failed),
            field(row.buckets_scanned, failed),
            field(row.space_ratio, failed),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::invalid(format!("csv output: {e}")))?;
    Ok(())
}

pub fn write_bound_csv(report: &BenchReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::invalid(format!("csv output: {e}"));
    w.write_record(BOUND_HEADER).map_err(fail)?;
    for row in &report.bounds {
        let c = &row.cell;
        w.write_record([
            c.n.to_string(),
            c.d.to_string(),
            c.u.to_string(),
            c.t.to_string(),
            c.q.to_string(),
            c.m.to_string(),
            c.width.to_string(),
            c.seed.to_string(),
            row.lambda.to_string(),
            field(row.rho, row.error.is_some()),
            c.queries.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::invalid(format!("csv output: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_of(report: &BenchReport) -> String {
        let mut buf = Vec::new();
        write_csv(report, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    const ONE_CELL: &str = r#"
        queries = 4
        repetitions = 1
        [[cell]]
        mode = "approx"
        N = 300
        d = 4
        U = 10
        t = 1
        q = 3
        k = 2
        seed = 5
        pruning = true
    "#;

    #[test]
    fn empty_plan_is_header_only() {
        let plan = BenchPlan::from_toml("").unwrap();
        assert_eq!(plan.queries, 50);
        assert_eq!(plan.repetitions, 3);
        let csv = csv_of(&run_benchmark(&plan));
        assert_eq!(csv, format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn one_cell_one_row() {
        let plan = BenchPlan::from_toml(ONE_CELL).unwrap();
        let report = run_benchmark(&plan);
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert!(row.error.is_none(), "{:?}", row.error);
        assert!(row.aar.unwrap() >= 1.0);
        let p = row.pruning_ratio.unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(csv_of(&report).lines().count(), 2);
    }

    #[test]
    fn rerun_matches_apart_from_timing() {
        let plan = BenchPlan::from_toml(ONE_CELL).unwrap();
        let strip = |r: &BenchReport| {
            csv_of(r)
                .lines()
                .map(|l| {
                    let mut f: Vec<&str> = l.split(',').collect();
                    f.remove(8);
                    f.join(",")
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&run_benchmark(&plan)), strip(&run_benchmark(&plan)));
    }

    #[test]
    fn failing_cell_becomes_error_row() {
        let text = r#"
            queries = 2
            [[cell]]
            N = 10
            d = 2
            U = 3
            t = 5
            q = 2
            k = 1
        "#;
        let report = run_benchmark(&BenchPlan::from_toml(text).unwrap());
        assert!(report.rows[0].error.is_some());
        let csv = csv_of(&report);
        let row = csv.lines().nth(1).unwrap();
        assert!(row.ends_with("error,error,error,error,error,error"), "{row}");
    }

    #[test]
    fn exact_cells_have_unit_aar() {
        let text = ONE_CELL.replace("\"approx\"", "\"exact\"").replace("pruning = true", "truth = \"exact\"");
        let report = run_benchmark(&BenchPlan::from_toml(&text).unwrap());
        assert_eq!(report.rows[0].aar, Some(1.0));
        assert_eq!(report.rows[0].pruning_ratio, None);
    }

    #[test]
    fn bound_rows() {
        let text = r#"
            [[bound]]
            N = 200
            d = 4
            U = 8
            t = 1
            q = 2
            width = 4000.0
            lambdas = [0.0, 0.5, 0.9]
            samples = 100
            queries = 2
        "#;
        let report = run_benchmark(&BenchPlan::from_toml(text).unwrap());
        assert_eq!(report.bounds.len(), 3);
        assert_eq!(report.bounds[0].rho, Some(1.0));
        let mut buf = Vec::new();
        write_bound_csv(&report, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(BenchPlan::from_toml("[[cell]]\nbogus = 1").is_err());
        assert!(BenchPlan::from_toml("repetitions = 0").is_err());
    }
}
