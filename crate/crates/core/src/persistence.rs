//! Directory layout for a saved index.
//!
//! ```text
//! root/
//!   meta                      key=value manifest
//!   kp/<keyword>.bin          point ids per keyword ordinal
//!   scale_<s>/buckets/<b>.bin point ids per non-empty bucket
//!   scale_<s>/khb/<keyword>.bin bucket ids per keyword ordinal
//!   points.dat                fixed-size point records sorted by id
//! ```
//!
//! Integers are 8-byte little-endian unsigned, coordinates 8-byte IEEE
//! doubles. A point record is `id, keyword count, d coordinates, T keyword
//! ordinals` where T is the largest keyword count in the dataset and unused
//! slots hold `u64::MAX`.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::index::{BucketId, HashLevel, Index, IndexConfig, IndexSource, Mode, ProjectionBasis};
use crate::types::{Dataset, KeywordId, Point, PointId};

pub const FORMAT: &str = "nks-index";
pub const VERSION: u32 = 1;
const MARKER: &str = ".incomplete";

fn write_u64s(path: &Path, values: impl IntoIterator<Item = u64>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for v in values {
        w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_u64s(path: &Path) -> Result<Vec<u64>> {
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::integrity(path, "file is missing")
        } else {
            Error::io(path, e)
        }
    })?;
    if bytes.len() % 8 != 0 {
        return Err(Error::integrity(path, "length is not a multiple of 8"));
    }
    let values: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::integrity(path, "ids are not strictly ascending"));
    }
    Ok(values)
}

fn join_display<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn scale_dir(root: &Path, s: usize) -> PathBuf {
    root.join(format!("scale_{s}"))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Write `index` and `dataset` under `root`, which must be absent or empty.
pub fn save_index(index: &Index, dataset: &Dataset, root: impl AsRef<Path>) -> Result<()> {
    let root = root.as_ref();
    if root.exists() {
        let mut entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
        if entries.next().is_some() {
            return Err(Error::invalid(format!("{} is not empty", root.display())));
        }
    }
    mkdir(root)?;
    let marker = root.join(MARKER);
    fs::write(&marker, b"").map_err(|e| Error::io(&marker, e))?;

    let kp = root.join("kp");
    mkdir(&kp)?;
    for kw in 0..dataset.dictionary().len() as KeywordId {
        write_u64s(&kp.join(format!("{kw}.bin")), index.keyword_points(kw).iter().copied())?;
    }
    for level in index.levels() {
        let dir = scale_dir(root, level.scale());
        let buckets = dir.join("buckets");
        let khb = dir.join("khb");
        mkdir(&buckets)?;
        mkdir(&khb)?;
        for (b, ids) in level.occupied_buckets() {
            write_u64s(&buckets.join(format!("{b}.bin")), ids.iter().copied())?;
        }
        for kw in 0..dataset.dictionary().len() as KeywordId {
            write_u64s(&khb.join(format!("{kw}.bin")), level.keyword_buckets(kw).iter().copied())?;
        }
    }

    let slots = dataset.max_keywords_per_point();
    let points = root.join("points.dat");
    {
        let file = File::create(&points).map_err(|e| Error::io(&points, e))?;
        let mut w = BufWriter::new(file);
        let mut put = |v: [u8; 8]| w.write_all(&v).map_err(|e| Error::io(&points, e));
        for p in dataset.points() {
            put(p.id.to_le_bytes())?;
            put((p.keywords.len() as u64).to_le_bytes())?;
            for c in &p.coords {
                put(c.to_le_bytes())?;
            }
            for i in 0..slots {
                let v = p.keywords.get(i).map_or(u64::MAX, |&k| k as u64);
                put(v.to_le_bytes())?;
            }
        }
        w.flush().map_err(|e| Error::io(&points, e))?;
    }

    let meta_path = root.join("meta");
    fs::write(&meta_path, render_meta(index, dataset)).map_err(|e| Error::io(&meta_path, e))?;
    fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))
}

fn render_meta(index: &Index, dataset: &Dataset) -> String {
    let config = index.config();
    let mut lines = vec![
        format!("format={FORMAT}"),
        format!("version={VERSION}"),
        format!("mode={}", config.mode),
        format!("dimension={}", dataset.dimension()),
        format!("points={}", dataset.len()),
        format!("vectors={}", config.vectors),
        format!("scales={}", config.scales),
        format!("table_size={}", config.table_size),
        format!("seed={}", config.seed),
        format!("initial_width={}", index.initial_width()),
        format!("initial_width_configured={}", config.initial_width.is_some()),
        format!("primes={}", join_display(&config.primes)),
        format!("pmax={}", index.basis().max_span()),
        format!("record_keywords={}", dataset.max_keywords_per_point()),
    ];
    for (i, v) in index.basis().vectors().iter().enumerate() {
        lines.push(format!("basis.{i}={}", join_display(v)));
    }
    for level in index.levels() {
        let s = level.scale();
        lines.push(format!("bin_width.{s}={}", level.bin_width()));
        lines.push(format!("hash_constants.{s}={}", join_display(level.hash_constants())));
        lines.push(format!("placements.{s}={}", level.placements()));
    }
    lines.push(format!("keywords={}", dataset.dictionary().len()));
    for (i, name) in dataset.dictionary().iter().enumerate() {
        lines.push(format!("keyword.{i}={name}"));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

/// Parsed manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub config: IndexConfig,
    pub basis: ProjectionBasis,
    pub initial_width: f64,
    pub dimension: usize,
    pub points: usize,
    pub record_keywords: usize,
    pub bin_widths: Vec<f64>,
    pub hash_constants: Vec<Vec<i64>>,
    pub placements: Vec<u64>,
    pub dictionary: Vec<String>,
}

impl Manifest {
    fn read(root: &Path) -> Result<Self> {
        let path = root.join("meta");
        if root.join(MARKER).exists() {
            return Err(Error::integrity(root.join(MARKER), "index was not completely written"));
        }
        let text = fs::read_to_string(&path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::integrity(&path, "manifest is missing")
            } else {
                Error::io(&path, e)
            }
        })?;
        let bad = |reason: String| Error::integrity(&path, reason);
        let mut map: HashMap<&str, &str> = HashMap::new();
        for line in text.lines().filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("malformed line {line:?}")))?;
            map.insert(k, v);
        }
        let get = |key: &str| -> Result<&str> {
            map.get(key).copied().ok_or_else(|| bad(format!("missing key {key}")))
        };
        fn parse<T: std::str::FromStr>(v: &str, key: &str, path: &Path) -> Result<T> {
            v.parse()
                .map_err(|_| Error::integrity(path, format!("bad value for {key}: {v:?}")))
        }
        fn list<T: std::str::FromStr>(v: &str, key: &str, path: &Path) -> Result<Vec<T>> {
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(',').map(|x| parse(x, key, path)).collect()
        }
        let num = |key: &str| -> Result<usize> { parse(get(key)?, key, &path) };

        if get("format")? != FORMAT {
            return Err(bad("unknown format".into()));
        }
        let version: u32 = parse(get("version")?, "version", &path)?;
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let mode: Mode = get("mode")?.parse().map_err(|_| bad("bad mode".into()))?;
        let vectors = num("vectors")?;
        let scales = num("scales")?;
        let initial_width: f64 = parse(get("initial_width")?, "initial_width", &path)?;
        let configured: bool = parse(get("initial_width_configured")?, "initial_width_configured", &path)?;
        let config = IndexConfig {
            vectors,
            scales,
            initial_width: configured.then_some(initial_width),
            table_size: num("table_size")?,
            seed: parse(get("seed")?, "seed", &path)?,
            mode,
            primes: list(get("primes")?, "primes", &path)?,
        };
        config.validate().map_err(|e| bad(e.to_string()))?;
        let basis_vectors = (0..vectors)
            .map(|i| {
                let key = format!("basis.{i}");
                list::<f64>(get(&key)?, &key, &path)
            })
            .collect::<Result<Vec<_>>>()?;
        let pmax: f64 = parse(get("pmax")?, "pmax", &path)?;
        let basis = ProjectionBasis::new(basis_vectors, pmax).map_err(|e| bad(e.to_string()))?;
        let mut bin_widths = Vec::new();
        let mut hash_constants = Vec::new();
        let mut placements = Vec::new();
        for s in 0..scales {
            let key = format!("bin_width.{s}");
            bin_widths.push(parse(get(&key)?, &key, &path)?);
            let key = format!("hash_constants.{s}");
            hash_constants.push(list(get(&key)?, &key, &path)?);
            let key = format!("placements.{s}");
            placements.push(parse(get(&key)?, &key, &path)?);
        }
        let dictionary = (0..num("keywords")?)
            .map(|i| get(&format!("keyword.{i}")).map(str::to_owned))
            .collect::<Result<Vec<_>>>()?;
        let dimension = num("dimension")?;
        if basis.dimension() != dimension {
            return Err(bad("basis dimension does not match".into()));
        }
        Ok(Manifest {
            config,
            basis,
            initial_width,
            dimension,
            points: num("points")?,
            record_keywords: num("record_keywords")?,
            bin_widths,
            hash_constants,
            placements,
            dictionary,
        })
    }

    fn record_len(&self) -> usize {
        8 * (2 + self.dimension + self.record_keywords)
    }

    fn decode_record(&self, bytes: &[u8], path: &Path) -> Result<Point> {
        let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
        let id = word(0);
        let count = word(1) as usize;
        if count == 0 || count > self.record_keywords {
            return Err(Error::integrity(path, format!("point {id} has a bad keyword count")));
        }
        let coords = (0..self.dimension).map(|i| f64::from_bits(word(2 + i))).collect();
        let keywords = (0..count)
            .map(|i| {
                let k = word(2 + self.dimension + i);
                if k as usize >= self.dictionary.len() {
                    Err(Error::integrity(path, format!("point {id} has an unknown keyword")))
                } else {
                    Ok(k as KeywordId)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Point { id, coords, keywords })
    }
}

/// Read counters of a [`DiskIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReadCounts {
    pub keyword_point_files: u64,
    pub keyword_bucket_files: u64,
    pub bucket_files: u64,
    /// Record reads from the point file, including binary-search probes.
    pub point_records: u64,
}

/// Read-only handle that loads files on demand.
#[derive(Debug)]
pub struct DiskIndex {
    root: PathBuf,
    manifest: Manifest,
    lookup: HashMap<String, KeywordId>,
    points: Mutex<File>,
    kp_reads: AtomicU64,
    khb_reads: AtomicU64,
    bucket_reads: AtomicU64,
    record_reads: AtomicU64,
    bucket_log: Mutex<Vec<(usize, BucketId)>>,
}

pub fn open_index(root: impl AsRef<Path>) -> Result<DiskIndex> {
    let root = root.as_ref().to_path_buf();
    let manifest = Manifest::read(&root)?;
    let path = root.join("points.dat");
    let file = File::open(&path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::integrity(&path, "file is missing")
        } else {
            Error::io(&path, e)
        }
    })?;
    let len = file.metadata().map_err(|e| Error::io(&path, e))?.len();
    if len != (manifest.points * manifest.record_len()) as u64 {
        return Err(Error::integrity(&path, "size does not match the manifest"));
    }
    let lookup = manifest
        .dictionary
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as KeywordId))
        .collect();
    Ok(DiskIndex {
        root,
        manifest,
        lookup,
        points: Mutex::new(file),
        kp_reads: AtomicU64::new(0),
        khb_reads: AtomicU64::new(0),
        bucket_reads: AtomicU64::new(0),
        record_reads: AtomicU64::new(0),
        bucket_log: Mutex::new(Vec::new()),
    })
}

impl DiskIndex {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn read_counts(&self) -> ReadCounts {
        ReadCounts {
            keyword_point_files: self.kp_reads.load(Ordering::Relaxed),
            keyword_bucket_files: self.khb_reads.load(Ordering::Relaxed),
            bucket_files: self.bucket_reads.load(Ordering::Relaxed),
            point_records: self.record_reads.load(Ordering::Relaxed),
        }
    }

    /// Every `(scale, bucket)` read since the last reset, in read order.
    pub fn bucket_log(&self) -> Vec<(usize, BucketId)> {
        self.bucket_log.lock().expect("bucket log").clone()
    }

    pub fn reset_counters(&self) {
        self.kp_reads.store(0, Ordering::Relaxed);
        self.khb_reads.store(0, Ordering::Relaxed);
        self.bucket_reads.store(0, Ordering::Relaxed);
        self.record_reads.store(0, Ordering::Relaxed);
        self.bucket_log.lock().expect("bucket log").clear();
    }

    fn check_scale(&self, scale: usize) -> Result<()> {
        if scale >= self.manifest.config.scales {
            return Err(Error::invalid(format!("scale {scale} out of range")));
        }
        Ok(())
    }

    fn read_record(&self, file: &mut File, rank: usize, buf: &mut [u8]) -> Result<()> {
        let path = self.root.join("points.dat");
        self.record_reads.fetch_add(1, Ordering::Relaxed);
        file.seek(SeekFrom::Start((rank * self.manifest.record_len()) as u64))
            .and_then(|_| file.read_exact(buf))
            .map_err(|e| Error::io(&path, e))
    }
}

impl IndexSource for DiskIndex {
    fn mode(&self) -> Mode {
        self.manifest.config.mode
    }

    fn scale_count(&self) -> usize {
        self.manifest.config.scales
    }

    fn initial_width(&self) -> f64 {
        self.manifest.initial_width
    }

    fn dimension(&self) -> usize {
        self.manifest.dimension
    }

    fn keyword_id(&self, name: &str) -> Option<KeywordId> {
        self.lookup.get(name).copied()
    }

    fn keyword_points(&self, keyword: KeywordId) -> Result<Cow<'_, [PointId]>> {
        if keyword as usize >= self.manifest.dictionary.len() {
            return Ok(Cow::Owned(Vec::new()));
        }
        self.kp_reads.fetch_add(1, Ordering::Relaxed);
        let path = self.root.join("kp").join(format!("{keyword}.bin"));
        let ids = read_u64s(&path)?;
        if ids.is_empty() {
            return Err(Error::integrity(&path, "keyword has no points"));
        }
        Ok(Cow::Owned(ids))
    }

    fn keyword_buckets(&self, scale: usize, keyword: KeywordId) -> Result<Cow<'_, [BucketId]>> {
        self.check_scale(scale)?;
        if keyword as usize >= self.manifest.dictionary.len() {
            return Ok(Cow::Owned(Vec::new()));
        }
        self.khb_reads.fetch_add(1, Ordering::Relaxed);
        let path = scale_dir(&self.root, scale).join("khb").join(format!("{keyword}.bin"));
        let ids = read_u64s(&path)?;
        if ids.iter().any(|&b| b >= self.manifest.config.table_size as u64) {
            return Err(Error::integrity(&path, "bucket id out of range"));
        }
        Ok(Cow::Owned(ids))
    }

    fn bucket_points(&self, scale: usize, bucket: BucketId) -> Result<Cow<'_, [PointId]>> {
        self.check_scale(scale)?;
        self.bucket_reads.fetch_add(1, Ordering::Relaxed);
        self.bucket_log.lock().expect("bucket log").push((scale, bucket));
        let path = scale_dir(&self.root, scale).join("buckets").join(format!("{bucket}.bin"));
        Ok(Cow::Owned(read_u64s(&path)?))
    }

    fn fetch_points(&self, ids: &[PointId]) -> Result<Vec<Point>> {
        let path = self.root.join("points.dat");
        let mut file = self.points.lock().expect("points file");
        let mut buf = vec![0u8; self.manifest.record_len()];
        let mut out = Vec::with_capacity(ids.len());
        let mut lo = 0usize;
        for &id in ids {
            // Binary search over record ids, starting after the previous hit.
            let mut hi = self.manifest.points;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                self.read_record(&mut file, mid, &mut buf[..8])?;
                let at = u64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
                if at < id {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if lo >= self.manifest.points {
                return Err(Error::integrity(&path, format!("point {id} not found")));
            }
            self.read_record(&mut file, lo, &mut buf)?;
            let point = self.manifest.decode_record(&buf, &path)?;
            if point.id != id {
                return Err(Error::integrity(&path, format!("point {id} not found")));
            }
            out.push(point);
            lo += 1;
        }
        Ok(out)
    }
}

/// Load a saved layout fully into memory.
pub fn load_index(root: impl AsRef<Path>) -> Result<(Index, Dataset)> {
    let disk = open_index(root)?;
    let m = &disk.manifest;
    let path = disk.root.join("points.dat");
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let points = bytes
        .chunks_exact(m.record_len())
        .map(|r| m.decode_record(r, &path))
        .collect::<Result<Vec<_>>>()?;
    if points.windows(2).any(|w| w[0].id >= w[1].id) {
        return Err(Error::integrity(&path, "records are not sorted by id"));
    }
    let dataset = Dataset::from_parts(m.dimension, points, m.dictionary.clone())
        .map_err(|e| Error::integrity(&path, e.to_string()))?;

    let u = m.dictionary.len() as KeywordId;
    let keyword_points = (0..u)
        .map(|kw| disk.keyword_points(kw).map(Cow::into_owned))
        .collect::<Result<Vec<_>>>()?;
    let mut levels = Vec::with_capacity(m.config.scales);
    for s in 0..m.config.scales {
        let dir = scale_dir(&disk.root, s).join("buckets");
        let mut buckets: Vec<Vec<PointId>> = vec![Vec::new(); m.config.table_size];
        let mut found: BTreeMap<BucketId, PathBuf> = BTreeMap::new();
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let entry = entry.map_err(|e| Error::io(&dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            let b: BucketId = name
                .strip_suffix(".bin")
                .and_then(|n| n.parse().ok())
                .filter(|&b| b < m.config.table_size as u64)
                .ok_or_else(|| Error::integrity(entry.path(), "unexpected bucket file"))?;
            found.insert(b, entry.path());
        }
        for (b, p) in found {
            buckets[b as usize] = read_u64s(&p)?;
        }
        let keyword_buckets = (0..u)
            .map(|kw| disk.keyword_buckets(s, kw).map(Cow::into_owned))
            .collect::<Result<Vec<_>>>()?;
        levels.push(HashLevel::from_parts(
            s,
            m.bin_widths[s],
            buckets,
            keyword_buckets,
            m.hash_constants[s].clone(),
            m.placements[s],
        ));
    }
    let index = Index::from_parts(
        m.config.clone(),
        m.basis.clone(),
        m.initial_width,
        keyword_points,
        levels,
    )?;
    Ok((index, dataset))
}
