//! Text dataset format: one point per line,
//! `<id>,<x1>,...,<xd>;<kw1>,<kw2>,...`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::Dataset;

pub fn parse_dataset(reader: impl BufRead) -> Result<Dataset> {
    let mut builder: Option<crate::types::DatasetBuilder> = None;
    let mut dimension = 0;
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::invalid(format!("line {}: {e}", n + 1)))?;
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::invalid(format!("line {}: {msg}", n + 1));
        let (point, tags) = line.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let mut fields = point.split(',');
        let id = fields
            .next()
            .unwrap_or("")
            .trim()
            .parse::<u64>()
            .map_err(|_| bad("bad point id"))?;
        let coords = fields
            .map(|f| f.trim().parse::<f64>().map_err(|_| bad("bad coordinate")))
            .collect::<Result<Vec<f64>>>()?;
        if coords.is_empty() {
            return Err(bad("no coordinates"));
        }
        let keywords: Vec<&str> = tags.split(',').map(str::trim).collect();
        if keywords.iter().any(|k| k.is_empty()) {
            return Err(bad("empty keyword"));
        }
        let b = builder.get_or_insert_with(|| {
            dimension = coords.len();
            Dataset::builder(dimension)
        });
        if coords.len() != dimension {
            return Err(bad(&format!("expected {dimension} coordinates, got {}", coords.len())));
        }
        b.push(id, coords, &keywords);
    }
    builder
        .ok_or_else(|| Error::invalid("dataset file has no records"))?
        .build()
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(BufReader::new(file))
}

pub fn write_dataset(dataset: &Dataset, mut out: impl Write) -> std::io::Result<()> {
    for p in dataset.points() {
        write!(out, "{}", p.id)?;
        for c in &p.coords {
            write!(out, ",{c}")?;
        }
        for (i, &k) in p.keywords.iter().enumerate() {
            let sep = if i == 0 { ';' } else { ',' };
            write!(out, "{sep}{}", dataset.dictionary()[k as usize])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_dataset(dataset, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
