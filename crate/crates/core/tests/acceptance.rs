//! Acceptance suite. One test runs every criterion in order and prints a
//! PASS/FAIL line for each, then fails if any criterion failed.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nks::bench::space::round_to;
use nks::bench::{
    gen_queries, gen_synthetic, pruning_ratio, run_benchmark, space_report, write_csv, BenchPlan, SpaceFormula,
    SpaceParams, SyntheticSpec,
};
use nks::index::{bucket_id, hash_keys, sample_unit_vectors, signatures, BinKeys, ProjectionBasis};
use nks::oracle::{brute_force_topk, for_each_candidate, raw_tuple_count, DEFAULT_LIMIT};
use nks::search::candidate_buckets;
use nks::{
    diameter, open_index, save_index, search_source, Dataset, Index, IndexConfig, IndexSource, Mode, Query,
    ResultEntry, SearchOptions,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// One random exactness instance.
struct Instance {
    dataset: Dataset,
    query: Query,
    k: usize,
    label: String,
}

fn instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::with_capacity(200);
    while out.len() < 200 {
        let n = [100, 500][rng.random_range(0..2)];
        let d = [2, 8, 32][rng.random_range(0..3)];
        let q = rng.random_range(2..=4);
        let k = [1, 3, 5][rng.random_range(0..3)];
        let t = rng.random_range(1..=3);
        let u = rng.random_range(q.max(t)..=50);
        let seed = rng.random();
        let dataset = gen_synthetic(&SyntheticSpec::new(n, d, u, t, seed)).unwrap();
        if dataset.dictionary().len() < q {
            continue;
        }
        let query = gen_queries(&dataset, q, 1, seed ^ 1).unwrap().remove(0);
        if raw_tuple_count(&dataset, &query).is_none_or(|c| c > DEFAULT_LIMIT as u128) {
            continue;
        }
        let label = format!("N={n} d={d} U={u} t={t} q={q} k={k} seed={seed}");
        out.push(Instance {
            dataset,
            query,
            k,
            label,
        });
    }
    out
}

fn exact_index(dataset: &Dataset) -> Index {
    Index::build(dataset, IndexConfig::new(Mode::Exact).with_seed(7)).unwrap()
}

/// Same diameters bit for bit; same sets for every diameter below the k-th;
/// sets tied at the k-th diameter must be genuine candidates of that diameter.
fn tie_normalized_equal(found: &[ResultEntry], truth: &[ResultEntry], ds: &Dataset, q: &Query) -> Result<(), String> {
    let bits = |e: &[ResultEntry]| e.iter().map(|x| x.diameter().to_bits()).collect::<Vec<_>>();
    if bits(found) != bits(truth) {
        return Err(format!(
            "diameters {:?} vs {:?}",
            found.iter().map(|e| e.diameter()).collect::<Vec<_>>(),
            truth.iter().map(|e| e.diameter()).collect::<Vec<_>>()
        ));
    }
    let Some(last) = truth.last().map(|e| e.diameter()) else {
        return Ok(());
    };
    let sets = |e: &[ResultEntry], keep: &dyn Fn(f64) -> bool| {
        e.iter()
            .filter(|x| keep(x.diameter()))
            .map(|x| x.ids().to_vec())
            .collect::<HashSet<_>>()
    };
    if sets(found, &|d| d < last) != sets(truth, &|d| d < last) {
        return Err("different sets below the k-th diameter".into());
    }
    let mut tied = HashSet::new();
    for_each_candidate(ds, q, DEFAULT_LIMIT, |ids, d| {
        if d == last {
            tied.insert(ids.to_vec());
        }
    })
    .map_err(|e| e.to_string())?;
    if sets(found, &|d| d == last).is_subset(&tied) {
        Ok(())
    } else {
        Err("a set tied at the k-th diameter is not a candidate".into())
    }
}

fn c1_oracle_equivalence(suite: &[Instance]) -> Verdict {
    let start = Instant::now();
    for inst in suite {
        let index = exact_index(&inst.dataset);
        let found = search_source(&index.source(&inst.dataset), &inst.query, inst.k, &SearchOptions::default())
            .unwrap()
            .outcome;
        let truth = brute_force_topk(&inst.dataset, &inst.query, inst.k).unwrap();
        if let Err(why) = tie_normalized_equal(found.entries(), truth.entries(), &inst.dataset, &inst.query) {
            return verdict(false, format!("{}: {why}", inst.label));
        }
    }
    let took = start.elapsed();
    verdict(
        took < Duration::from_secs(300),
        format!("{} instances agree with brute force in {:.1}s", suite.len(), took.as_secs_f64()),
    )
}

fn shares_bin(keys: &[BinKeys]) -> bool {
    let firsts: HashSet<i64> = keys.iter().map(|k| k.first()).collect();
    let seconds: HashSet<i64> = keys
        .iter()
        .map(|k| match k {
            BinKeys::Pair(_, h2) => *h2,
            BinKeys::Single(h) => *h,
        })
        .collect();
    firsts.len() == 1 || seconds.len() == 1
}

fn c2_overlapping_bins() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for trial in 0..1000u64 {
        let d = rng.random_range(1..=32);
        let size = rng.random_range(2..=6);
        let scale = 10f64.powi(rng.random_range(-2..=4));
        let points: Vec<Vec<f64>> = (0..size)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0) * scale).collect())
            .collect();
        let r = diameter(&points).unwrap();
        let width = if trial % 5 == 0 { 2.0 * r } else { 2.0 * r * rng.random_range(1.0..3.0) };
        let basis = ProjectionBasis::new(sample_unit_vectors(d, 5, trial).unwrap(), 1.0).unwrap();
        let projections: Vec<Vec<f64>> = points.iter().map(|p| basis.project(p)).collect();
        for v in 0..5 {
            let keys: Vec<BinKeys> = projections
                .iter()
                .map(|p| hash_keys(p[v], width, 0, Mode::Exact))
                .collect();
            if !shares_bin(&keys) {
                failures += 1;
            }
        }
    }
    verdict(failures == 0, format!("{failures} of 5000 set/vector trials split across both bins"))
}

fn c3_projection_contracts() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for batch in 0..100u64 {
        let d = rng.random_range(1..=64);
        let basis = ProjectionBasis::new(sample_unit_vectors(d, 1000, batch).unwrap(), 1.0).unwrap();
        for z in basis.vectors() {
            let a: Vec<f64> = (0..d).map(|_| rng.random_range(-1e4..1e4)).collect();
            let b: Vec<f64> = (0..d).map(|_| rng.random_range(-1e4..1e4)).collect();
            let dot = |p: &[f64]| z.iter().zip(p).map(|(x, y)| x * y).sum::<f64>();
            let excess = (dot(&a) - dot(&b)).abs() - nks::distance(&a, &b).unwrap();
            worst = worst.max(excess);
            if excess > 1e-9 {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0,
        format!("{violations} of 100000 trials violate; largest excess {worst:.3e}"),
    )
}

fn c4_approximate_quality() -> Verdict {
    let cells: String = (3..=5)
        .map(|q| {
            format!(
                "[[cell]]\nmode = \"approx\"\nN = 10000\nd = 32\nU = 100\nt = 2\nq = {q}\nk = 5\nseed = 4\ntruth = \"exact\"\n"
            )
        })
        .collect();
    let start = Instant::now();
    let plan = BenchPlan::from_toml(&format!("queries = 50\nrepetitions = 1\n{cells}")).unwrap();
    let report = run_benchmark(&plan);
    let mut pass = start.elapsed() < Duration::from_secs(600);
    let mut parts = Vec::new();
    for row in &report.rows {
        match (row.aar, &row.error) {
            (Some(aar), None) => {
                pass &= (1.0..=1.6).contains(&aar);
                parts.push(format!("q={} AAR={aar:.4}", row.cell.q));
            }
            _ => {
                pass = false;
                parts.push(format!("q={} error {:?}", row.cell.q, row.error));
            }
        }
    }
    verdict(pass, parts.join(", "))
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn c5_pruning_trend() -> Verdict {
    let mut cells = Vec::new();
    for d in [2, 4, 8, 16, 32] {
        let ds = gen_synthetic(&SyntheticSpec::new(10_000, d, 100, 1, 5)).unwrap();
        let index = exact_index(&ds);
        let ratios: Vec<f64> = gen_queries(&ds, 3, 20, 6)
            .unwrap()
            .iter()
            .map(|q| pruning_ratio(&index, &ds, q).unwrap().ratio)
            .collect();
        cells.push((d, mean_and_se(&ratios)));
    }
    let mut pass = cells[0].1 .0 < 0.05;
    for w in cells.windows(2) {
        let ((_, (m0, s0)), (_, (m1, s1))) = (w[0], w[1]);
        pass &= m1 >= m0 - (s0 * s0 + s1 * s1).sqrt();
    }
    let detail = cells
        .iter()
        .map(|(d, (m, s))| format!("d={d}: {m:.5}±{s:.5}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(pass, detail)
}

/// Reference index/dataset ratios: d, then exact N=1e7/U=100, N=1e7/U=1000,
/// N=1e8/U=100, N=1e8/U=1000, then the same four for approximate.
const SPACE_TABLE: [(f64, [f64; 8]); 5] = [
    (8.0, [2.8, 3.0, 2.8, 2.8, 0.7, 0.9, 0.7, 0.7]),
    (16.0, [1.4, 1.6, 1.5, 1.5, 0.4, 0.5, 0.4, 0.4]),
    (32.0, [0.7, 0.8, 0.8, 0.8, 0.2, 0.2, 0.2, 0.2]),
    (64.0, [0.4, 0.4, 0.4, 0.4, 0.09, 0.1, 0.09, 0.09]),
    (128.0, [0.2, 0.2, 0.2, 0.2, 0.05, 0.06, 0.05, 0.05]),
];

fn printed_decimals(v: f64) -> u32 {
    let s = v.to_string();
    s.split_once('.').map_or(0, |(_, f)| f.len() as u32)
}

fn c6_space_table() -> Verdict {
    let mut misses = Vec::new();
    let mut total = 0;
    for (d, row) in SPACE_TABLE {
        for (i, &printed) in row.iter().enumerate() {
            let mode = if i < 4 { Mode::Exact } else { Mode::Approximate };
            let n = if i % 4 < 2 { 1e7 } else { 1e8 };
            let u = if i % 2 == 0 { 100.0 } else { 1000.0 };
            let ratio = space_report(&SpaceParams::reference(mode, n, d, u), SpaceFormula::default()).ratio;
            total += 1;
            if round_to(ratio, printed_decimals(printed)) != printed {
                misses.push(format!("d={d} {mode} N={n:e} U={u}: {ratio:.4} vs {printed}"));
            }
        }
    }
    verdict(
        misses.is_empty(),
        format!("{} of {total} cells match; misses: [{}]", total - misses.len(), misses.join("; ")),
    )
}

fn c7_dedupe(suite: &[Instance]) -> Verdict {
    let mut repeats = 0;
    let mut changed = 0;
    let (mut with, mut without) = (0u64, 0u64);
    for inst in suite {
        let index = exact_index(&inst.dataset);
        let source = index.source(&inst.dataset);
        let on = SearchOptions {
            record_subsets: true,
            ..SearchOptions::default()
        };
        let a = search_source(&source, &inst.query, inst.k, &on).unwrap();
        let mut seen = HashSet::new();
        repeats += a.stats.explored.iter().filter(|s| !seen.insert((*s).clone())).count();
        let off = SearchOptions {
            dedupe_subsets: false,
            ..SearchOptions::default()
        };
        let b = search_source(&source, &inst.query, inst.k, &off).unwrap();
        if a.outcome != b.outcome {
            changed += 1;
        }
        with += a.stats.subsets_explored;
        without += b.stats.subsets_explored;
    }
    verdict(
        repeats == 0 && changed == 0 && without >= with,
        format!(
            "{repeats} repeated subsets; {changed} answers changed without dedupe; subsets explored {with} with, {without} without"
        ),
    )
}

fn c8_hash_multiplicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut problems = Vec::new();
    for build in 0..20u64 {
        let mode = if build % 2 == 0 { Mode::Exact } else { Mode::Approximate };
        let m = rng.random_range(1..=3);
        let n = rng.random_range(50..400);
        let d = rng.random_range(1..=16);
        let ds = gen_synthetic(&SyntheticSpec::new(n, d, 20, 2, build)).unwrap();
        let config = IndexConfig::new(mode).with_vectors(m).with_seed(build).with_table_size(rng.random_range(50..5000));
        let index = Index::build(&ds, config.clone()).unwrap();
        let per_point = if mode == Mode::Exact { 1u64 << m } else { 1 };
        for level in index.levels() {
            if level.placements() != per_point * n as u64 {
                problems.push(format!("build {build} scale {}: {} placements", level.scale(), level.placements()));
            }
            let mut holders: BTreeMap<u64, HashSet<u64>> = BTreeMap::new();
            for (b, ids) in level.occupied_buckets() {
                for &id in ids {
                    holders.entry(id).or_default().insert(b);
                }
            }
            for p in ds.points() {
                let proj = index.basis().project(&p.coords);
                let keys: Vec<BinKeys> = proj
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        let c = level.hash_constants().get(i).copied().unwrap_or(0);
                        hash_keys(x, level.bin_width(), c, mode)
                    })
                    .collect();
                let sigs = signatures(&keys);
                let expected: HashSet<u64> = sigs
                    .iter()
                    .map(|s| bucket_id(s, &config.primes, config.table_size))
                    .collect();
                if sigs.len() as u64 != per_point || holders.get(&p.id) != Some(&expected) {
                    problems.push(format!("build {build} scale {} point {}", level.scale(), p.id));
                }
            }
        }
    }
    verdict(
        problems.is_empty(),
        format!("20 builds checked; {} problems {:?}", problems.len(), problems.iter().take(3).collect::<Vec<_>>()),
    )
}

fn render(entries: &[ResultEntry]) -> String {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let ids: Vec<String> = e.ids().iter().map(u64::to_string).collect();
            format!("{}\t{:.6}\t{}\t{:016x}\n", i + 1, e.diameter(), ids.join(","), e.diameter().to_bits())
        })
        .collect()
}

fn c9_disk_round_trip(suite: &[Instance]) -> Verdict {
    let mut mismatches = 0;
    let mut extra_reads = 0;
    for inst in suite {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("index");
        let index = exact_index(&inst.dataset);
        save_index(&index, &inst.dataset, &root).unwrap();
        let disk = open_index(&root).unwrap();
        let memory = search_source(&index.source(&inst.dataset), &inst.query, inst.k, &SearchOptions::default()).unwrap();
        disk.reset_counters();
        let from_disk = search_source(&disk, &inst.query, inst.k, &SearchOptions::default()).unwrap();
        if render(memory.outcome.entries()) != render(from_disk.outcome.entries()) {
            mismatches += 1;
        }
        let log = disk.bucket_log();
        let keywords: Vec<u32> = inst
            .query
            .keywords()
            .iter()
            .map(|k| disk.keyword_id(k).unwrap())
            .collect();
        let mut expected = Vec::new();
        for s in 0..from_disk.stats.scales_visited {
            expected.extend(candidate_buckets(&disk, s, &keywords).unwrap().into_iter().map(|b| (s, b)));
        }
        if log != expected {
            extra_reads += 1;
        }
    }
    verdict(
        mismatches == 0 && extra_reads == 0,
        format!(
            "{} instances: {mismatches} result mismatches, {extra_reads} with bucket reads beyond the intersected buckets",
            suite.len()
        ),
    )
}

fn c10_scaling() -> Verdict {
    let mut cells = String::new();
    for mode in ["exact", "approx"] {
        for n in [10_000, 100_000, 1_000_000] {
            for d in [8, 32] {
                for q in [3, 5] {
                    cells += &format!(
                        "[[cell]]\nmode = \"{mode}\"\nN = {n}\nd = {d}\nU = 1000\nt = 1\nq = {q}\nk = 1\nseed = 10\ntruth = \"none\"\n"
                    );
                }
            }
        }
    }
    let start = Instant::now();
    let plan = BenchPlan::from_toml(&format!("queries = 10\nrepetitions = 3\n{cells}")).unwrap();
    let report = run_benchmark(&plan);
    let took = start.elapsed();
    let csv = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("scaling.csv");
    write_csv(&report, std::fs::File::create(&csv).unwrap()).unwrap();
    let mut pass = took < Duration::from_secs(1800);
    let mut parts = Vec::new();
    let time = |mode: Mode, n: usize, d: usize, q: usize| {
        report
            .rows
            .iter()
            .find(|r| r.cell.mode == mode && r.cell.n == n && r.cell.d == d && r.cell.q == q)
            .and_then(|r| r.query_ms_mean)
    };
    for mode in [Mode::Exact, Mode::Approximate] {
        for d in [8, 32] {
            for q in [3, 5] {
                match (time(mode, 10_000, d, q), time(mode, 1_000_000, d, q)) {
                    (Some(small), Some(large)) => {
                        let ratio = large / small;
                        pass &= ratio < 500.0;
                        parts.push(format!("{mode} d={d} q={q}: {ratio:.0}x"));
                    }
                    _ => {
                        pass = false;
                        parts.push(format!("{mode} d={d} q={q}: failed"));
                    }
                }
            }
        }
    }
    verdict(
        pass,
        format!("{:.0}s, {}; rows in {}", took.as_secs_f64(), parts.join(", "), csv.display()),
    )
}

#[test]
fn acceptance_criteria() {
    let suite = instances();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("1 exact search matches brute force", Box::new(|| c1_oracle_equivalence(&suite))),
        ("2 overlapping bins keep tight sets together", Box::new(c2_overlapping_bins)),
        ("3 projections never stretch distances", Box::new(c3_projection_contracts)),
        ("4 approximate quality", Box::new(c4_approximate_quality)),
        ("5 pruning ratio trend", Box::new(c5_pruning_trend)),
        ("6 space ratio table", Box::new(c6_space_table)),
        ("7 duplicate subset elimination", Box::new(|| c7_dedupe(&suite))),
        ("8 hash multiplicity", Box::new(c8_hash_multiplicity)),
        ("9 disk round trip", Box::new(|| c9_disk_round_trip(&suite))),
        ("10 scaling sweep", Box::new(c10_scaling)),
    ];
    let mut failed = Vec::new();
    for (name, run) in &criteria {
        let v = run();
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
