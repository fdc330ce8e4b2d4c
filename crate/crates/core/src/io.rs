//! File formats: feature CSV, results CSV, seeds CSV, model JSON and the
//! key-value run report.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{ClusterAssignment, RunReport, SeedAssignment};
use crate::error::{Error, Result};
use crate::perception::PerceptionModel;
use crate::types::{ClusterId, Dataset, Label};

pub const MODEL_FORMAT: &str = "seedgrow-model/1";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Column holding truth labels; excluded from the features.
    pub label_column: Option<String>,
    /// Column holding point ids; rows are reordered by it and the ids must
    /// be exactly `0..n`.
    pub id_column: Option<String>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn parse_err(row: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        row,
        col,
        msg: msg.into(),
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| parse_err(0, 0, format!("no column named `{name}`")))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

/// Header names of a CSV file.
pub fn csv_header(path: &Path) -> Result<Vec<String>> {
    let mut rdr = reader(open(path)?);
    Ok(rdr.headers()?.iter().map(str::to_string).collect())
}

pub fn load_csv(path: &Path, options: &CsvOptions) -> Result<Dataset> {
    read_csv(open(path)?, options)
}

/// Parses a feature CSV with a header row. Error coordinates are 1-based:
/// `row` counts data rows (the header is row 0), `col` counts columns.
pub fn read_csv<R: Read>(input: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let width = headers.len();
    let label_col = options
        .label_column
        .as_deref()
        .map(|n| column_index(&headers, n))
        .transpose()?;
    let id_col = options
        .id_column
        .as_deref()
        .map(|n| column_index(&headers, n))
        .transpose()?;
    if label_col.is_some() && label_col == id_col {
        return Err(parse_err(0, 0, "label and id columns must differ"));
    }
    let feature_cols: Vec<usize> = (0..width)
        .filter(|&c| Some(c) != label_col && Some(c) != id_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(parse_err(0, 0, "no feature columns"));
    }

    let mut values = Vec::new();
    let mut truth = label_col.map(|_| Vec::new());
    let mut ids = id_col.map(|_| Vec::new());
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != width {
            return Err(parse_err(
                row,
                record.len().min(width) + 1,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        for &c in &feature_cols {
            let cell = &record[c];
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(row, c + 1, format!("not a number: `{cell}`")))?;
            if !v.is_finite() {
                return Err(parse_err(row, c + 1, format!("non-finite value `{cell}`")));
            }
            values.push(v);
        }
        if let (Some(c), Some(t)) = (label_col, truth.as_mut()) {
            let cell = &record[c];
            let label = cell
                .parse::<i64>()
                .ok()
                .and_then(|v| Label::new(v).ok())
                .ok_or_else(|| parse_err(row, c + 1, format!("bad label `{cell}`")))?;
            t.push(label);
        }
        if let (Some(c), Some(ids)) = (id_col, ids.as_mut()) {
            let cell = &record[c];
            let id: usize = cell
                .parse()
                .map_err(|_| parse_err(row, c + 1, format!("bad id `{cell}`")))?;
            ids.push(id);
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = feature_cols.len();
    if let Some(ids) = ids {
        let n = ids.len();
        let mut slot = vec![usize::MAX; n];
        for (row, &id) in ids.iter().enumerate() {
            if id >= n || slot[id] != usize::MAX {
                return Err(parse_err(
                    row + 1,
                    id_col.unwrap_or(0) + 1,
                    format!("ids must be a permutation of 0..{n}"),
                ));
            }
            slot[id] = row;
        }
        let mut sorted = Vec::with_capacity(values.len());
        for &row in &slot {
            sorted.extend_from_slice(&values[row * dim..(row + 1) * dim]);
        }
        values = sorted;
        truth = truth.map(|t| slot.iter().map(|&row| t[row]).collect());
    }
    Dataset::new(dim, values, truth)
}

/// Writes features (and truth, if present, as a `label` column).
pub fn write_csv<W: Write>(out: W, dataset: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..dataset.dim()).map(|k| format!("x{k}")).collect();
    if dataset.truth().is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for (i, p) in dataset.points().enumerate() {
        let mut row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        if let Some(t) = dataset.truth() {
            row.push(t[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn save_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    write_csv(create(path)?, dataset)
}

pub fn write_results<W: Write>(out: W, labels: &[Label], scores: &[f64]) -> Result<()> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: scores.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "label", "score"])?;
    for (i, (l, s)) in labels.iter().zip(scores).enumerate() {
        w.write_record([i.to_string(), l.to_string(), format!("{s:.16e}")])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn save_results(path: &Path, assignment: &ClusterAssignment) -> Result<()> {
    write_results(create(path)?, &assignment.labels, &assignment.scores)
}

/// Reads `id,label,score` rows; ids must run `0..n` in order.
pub fn read_results<R: Read>(input: R) -> Result<(Vec<Label>, Vec<f64>)> {
    let mut rdr = reader(input);
    let mut labels = Vec::new();
    let mut scores = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != 3 {
            return Err(parse_err(row, 1, "expected id,label,score"));
        }
        if record[0].parse::<usize>().ok() != Some(r) {
            return Err(parse_err(row, 1, format!("expected id {r}")));
        }
        let label = record[1]
            .parse::<i64>()
            .ok()
            .and_then(|v| Label::new(v).ok())
            .ok_or_else(|| parse_err(row, 2, format!("bad label `{}`", &record[1])))?;
        let score: f64 = record[2]
            .parse()
            .map_err(|_| parse_err(row, 3, format!("bad score `{}`", &record[2])))?;
        labels.push(label);
        scores.push(score);
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((labels, scores))
}

pub fn load_results(path: &Path) -> Result<(Vec<Label>, Vec<f64>)> {
    read_results(open(path)?)
}

/// Reads one label column from a CSV file with a header.
pub fn load_labels(path: &Path, column: &str) -> Result<Vec<Label>> {
    let mut rdr = reader(open(path)?);
    let c = column_index(rdr.headers()?, column)?;
    let mut out = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let cell = record
            .get(c)
            .ok_or_else(|| parse_err(r + 1, c + 1, "missing field"))?;
        let label = cell
            .parse::<i64>()
            .ok()
            .and_then(|v| Label::new(v).ok())
            .ok_or_else(|| parse_err(r + 1, c + 1, format!("bad label `{cell}`")))?;
        out.push(label);
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

/// Reads `id,cluster_id` rows (header names are not checked).
pub fn read_seeds<R: Read>(input: R) -> Result<SeedAssignment> {
    let mut rdr = reader(input);
    let mut seeds = SeedAssignment::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != 2 {
            return Err(parse_err(row, 1, "expected id,cluster_id"));
        }
        let id: usize = record[0]
            .parse()
            .map_err(|_| parse_err(row, 1, format!("bad id `{}`", &record[0])))?;
        let c: ClusterId = record[1]
            .parse()
            .map_err(|_| parse_err(row, 2, format!("bad cluster id `{}`", &record[1])))?;
        seeds.insert(id, c)?;
    }
    if seeds.is_empty() {
        return Err(Error::NoSeeds);
    }
    Ok(seeds)
}

pub fn load_seeds(path: &Path) -> Result<SeedAssignment> {
    read_seeds(open(path)?)
}

pub fn write_seeds<W: Write>(out: W, seeds: &SeedAssignment) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "cluster_id"])?;
    for (id, c) in seeds.iter() {
        w.write_record([id.to_string(), c.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn save_seeds(path: &Path, seeds: &SeedAssignment) -> Result<()> {
    write_seeds(create(path)?, seeds)
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format: String,
    dim: usize,
    clusters: Vec<ModelEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelEntry {
    id: ClusterId,
    median: Vec<f64>,
    n: usize,
    mu: f64,
    support: f64,
    gap_star: f64,
    edge: f64,
    cutoff: f64,
}

pub fn model_to_json(models: &BTreeMap<ClusterId, PerceptionModel>) -> Result<String> {
    let dim = models.values().next().map_or(0, PerceptionModel::dim);
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        dim,
        clusters: models
            .iter()
            .map(|(&id, m)| ModelEntry {
                id,
                median: m.median().to_vec(),
                n: m.n(),
                mu: m.mu(),
                support: m.support(),
                gap_star: m.gap_star(),
                edge: m.edge(),
                cutoff: m.cutoff(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn model_from_json(text: &str) -> Result<BTreeMap<ClusterId, PerceptionModel>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("format").and_then(|v| v.as_str()) {
        Some(MODEL_FORMAT) => {}
        Some(other) => return Err(Error::Model(format!("unsupported format `{other}`"))),
        None => return Err(Error::Model("missing format tag".into())),
    }
    let file: ModelFile = serde_json::from_value(value)?;
    if file.clusters.is_empty() {
        return Err(Error::Model("no clusters".into()));
    }
    let mut out = BTreeMap::new();
    for e in file.clusters {
        if e.median.len() != file.dim {
            return Err(Error::DimensionMismatch {
                expected: file.dim,
                got: e.median.len(),
            });
        }
        let m = PerceptionModel::from_parts(
            e.median, e.n, e.mu, e.support, e.gap_star, e.edge, e.cutoff,
        )?;
        if out.insert(e.id, m).is_some() {
            return Err(Error::Model(format!("duplicate cluster id {}", e.id)));
        }
    }
    Ok(out)
}

pub fn save_model(path: &Path, models: &BTreeMap<ClusterId, PerceptionModel>) -> Result<()> {
    let text = model_to_json(models)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<BTreeMap<ClusterId, PerceptionModel>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}

/// `key = value` rendering of a run report.
pub fn report_to_kv(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "passes = {}", report.passes);
    let _ = writeln!(out, "converged = {}", report.converged.as_str());
    let _ = writeln!(out, "ejected_total = {}", report.ejected_total);
    let _ = writeln!(out, "absorbed_total = {}", report.absorbed_total);
    for (c, s) in &report.per_cluster {
        let _ = writeln!(out, "cluster.{c}.size = {}", s.size);
        let _ = writeln!(out, "cluster.{c}.mu = {:.16e}", s.mu);
        let _ = writeln!(out, "cluster.{c}.cutoff = {:.16e}", s.cutoff);
    }
    let vanished: Vec<String> = report.vanished.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "vanished = {}", vanished.join(","));
    out
}
