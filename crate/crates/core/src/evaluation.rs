//! Agreement with ground truth, the anomaly label counting as an ordinary
//! class. Seeds carry truth cluster ids, so labels are compared directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::distance_unchecked;
use crate::synth::BenchmarkSpec;
use crate::types::{ClusterId, Dataset, Label};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScore {
    pub support: usize,
    pub predicted: usize,
    pub correct: usize,
    /// `None` when nothing was predicted as this class.
    pub precision: Option<f64>,
    /// `None` when the class does not occur in the truth.
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub per_class: BTreeMap<Label, ClassScore>,
    /// Counts keyed by `(truth, predicted)`; absent keys are zero.
    pub confusion: BTreeMap<(Label, Label), usize>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn evaluate(pred: &[Label], truth: &[Label]) -> Result<EvalReport> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut confusion = BTreeMap::new();
    for (&p, &t) in pred.iter().zip(truth) {
        *confusion.entry((t, p)).or_insert(0usize) += 1;
    }
    let classes: BTreeSet<Label> = pred.iter().chain(truth).copied().collect();
    let mut per_class = BTreeMap::new();
    let mut trace = 0;
    for &c in &classes {
        let mut support = 0;
        let mut predicted = 0;
        for (&(t, p), &k) in &confusion {
            if t == c {
                support += k;
            }
            if p == c {
                predicted += k;
            }
        }
        let correct = confusion.get(&(c, c)).copied().unwrap_or(0);
        trace += correct;
        per_class.insert(
            c,
            ClassScore {
                support,
                predicted,
                correct,
                precision: ratio(correct, predicted),
                recall: ratio(correct, support),
            },
        );
    }
    Ok(EvalReport {
        n: pred.len(),
        accuracy: trace as f64 / pred.len() as f64,
        per_class,
        confusion,
    })
}

impl EvalReport {
    /// `key = value` lines.
    pub fn to_kv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |x| format!("{x}"));
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "accuracy = {}", self.accuracy);
        for (label, s) in &self.per_class {
            let _ = writeln!(out, "class.{label}.support = {}", s.support);
            let _ = writeln!(out, "class.{label}.precision = {}", opt(s.precision));
            let _ = writeln!(out, "class.{label}.recall = {}", opt(s.recall));
        }
        for ((t, p), k) in &self.confusion {
            let _ = writeln!(out, "confusion.{t}.{p} = {k}");
        }
        out
    }

    /// Human-readable summary with a confusion matrix (rows = truth).
    pub fn to_table(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
        let mut out = String::new();
        let _ = writeln!(out, "accuracy: {:.6} ({} points)", self.accuracy, self.n);
        let _ = writeln!(
            out,
            "{:>8} {:>8} {:>10} {:>10}",
            "label", "support", "precision", "recall"
        );
        for (label, s) in &self.per_class {
            let _ = writeln!(
                out,
                "{:>8} {:>8} {:>10} {:>10}",
                label.to_string(),
                s.support,
                opt(s.precision),
                opt(s.recall)
            );
        }
        let labels: Vec<Label> = self.per_class.keys().copied().collect();
        let _ = write!(out, "\n{:>8}", "truth\\pred");
        for l in &labels {
            let _ = write!(out, " {:>7}", l.to_string());
        }
        out.push('\n');
        for t in &labels {
            let _ = write!(out, "{:>10}", t.to_string());
            for p in &labels {
                let k = self.confusion.get(&(*t, *p)).copied().unwrap_or(0);
                let _ = write!(out, " {k:>7}");
            }
            out.push('\n');
        }
        out
    }
}

/// For each true cluster: the fraction of its points lying within
/// `radius_in_stds` standard deviations of the generating center that were
/// labelled with that cluster. `None` marks an empty core.
pub fn cluster_recovery(
    pred: &[Label],
    dataset: &Dataset,
    spec: &BenchmarkSpec,
    radius_in_stds: f64,
) -> Result<BTreeMap<ClusterId, Option<f64>>> {
    let truth = dataset.truth().ok_or(Error::MissingTruth)?;
    if pred.len() != dataset.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: dataset.len(),
        });
    }
    if spec.dim() != dataset.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: dataset.dim(),
        });
    }
    let k = spec.cluster_centers.len();
    let mut core = vec![0usize; k];
    let mut hit = vec![0usize; k];
    for (i, (&t, &p)) in truth.iter().zip(pred).enumerate() {
        let Some(c) = t.as_cluster() else { continue };
        let ci = c as usize;
        if ci >= k {
            return Err(Error::UnknownCluster(c));
        }
        let radius = radius_in_stds * spec.cluster_stds[ci];
        if distance_unchecked(dataset.point(i), &spec.cluster_centers[ci]) <= radius {
            core[ci] += 1;
            if p == t {
                hit[ci] += 1;
            }
        }
    }
    Ok((0..k)
        .map(|c| (c as ClusterId, ratio(hit[c], core[c])))
        .collect())
}
