//! Seeded cluster growing.
//!
//! Every unseeded point starts in the anomaly pool. Each pass visits the
//! clusters from tightest to loosest; a cluster fits the kernel on its
//! members, ejects the anomalous tail to the pool, re-fits on the survivors
//! and absorbs every pool point the re-fitted model accepts. Passes repeat
//! until nothing changes, a label state repeats, or the pass cap is hit.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_unchecked, mean_squared_deviation};
use crate::perception::{PerceptionModel, Verdict};
use crate::types::{ClusterId, Dataset, Label};

pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

/// User-asserted cluster membership for a sparse set of points.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedAssignment {
    entries: BTreeMap<usize, ClusterId>,
}

impl SeedAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from `(point id, cluster id)` pairs, rejecting duplicate ids.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, ClusterId)>) -> Result<Self> {
        let mut seeds = SeedAssignment::new();
        for (id, cluster) in pairs {
            seeds.insert(id, cluster)?;
        }
        Ok(seeds)
    }

    pub fn insert(&mut self, id: usize, cluster: ClusterId) -> Result<()> {
        if self.entries.insert(id, cluster).is_some() {
            return Err(Error::DuplicateSeed(id));
        }
        Ok(())
    }

    pub fn get(&self, id: usize) -> Option<ClusterId> {
        self.entries.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, ClusterId)> + '_ {
        self.entries.iter().map(|(&id, &c)| (id, c))
    }

    pub fn cluster_ids(&self) -> BTreeSet<ClusterId> {
        self.entries.values().copied().collect()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::NoSeeds);
        }
        match self.entries.keys().next_back() {
            Some(&id) if id >= n => Err(Error::UnknownPoint { id, n }),
            _ => Ok(()),
        }
    }
}

/// Final labels, membership scores and per-cluster models of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<Label>,
    pub scores: Vec<f64>,
    pub models: BTreeMap<ClusterId, PerceptionModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convergence {
    /// A pass made no label changes.
    Yes,
    /// The pass cap was reached.
    No,
    /// A previously seen label state recurred.
    Cycle,
}

impl Convergence {
    pub fn as_str(self) -> &'static str {
        match self {
            Convergence::Yes => "yes",
            Convergence::No => "no",
            Convergence::Cycle => "cycle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub size: usize,
    pub mu: f64,
    pub cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub passes: usize,
    pub converged: Convergence,
    pub ejected_total: usize,
    pub absorbed_total: usize,
    pub per_cluster: BTreeMap<ClusterId, ClusterStats>,
    /// Seeded clusters that lost all their members.
    pub vanished: Vec<ClusterId>,
}

fn members_of(labels: &[Label], cluster: ClusterId) -> Vec<usize> {
    let label = Label::cluster(cluster);
    labels
        .iter()
        .enumerate()
        .filter_map(|(i, &l)| (l == label).then_some(i))
        .collect()
}

fn gather<'a>(dataset: &'a Dataset, ids: &[usize]) -> Vec<&'a [f64]> {
    ids.iter().map(|&i| dataset.point(i)).collect()
}

/// Non-empty clusters in `labels`, tightest first (mean squared deviation
/// from the median), ties broken by ascending id.
pub fn order_clusters(dataset: &Dataset, labels: &[Label]) -> Result<Vec<ClusterId>> {
    if labels.len() != dataset.len() {
        return Err(Error::LengthMismatch {
            left: dataset.len(),
            right: labels.len(),
        });
    }
    let mut groups: BTreeMap<ClusterId, Vec<&[f64]>> = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        if let Some(c) = label.as_cluster() {
            groups.entry(c).or_default().push(dataset.point(i));
        }
    }
    if groups.is_empty() {
        return Err(Error::NoClusters);
    }
    let mut keyed = groups
        .into_iter()
        .map(|(c, pts)| Ok((mean_squared_deviation(&pts)?, c)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(keyed.into_iter().map(|(_, c)| c).collect())
}

/// Label states visited so far, kept as 64-bit fingerprints.
#[derive(Default)]
struct StateLog(HashSet<u64>);

impl StateLog {
    /// Records `labels`; false if the state was seen before.
    fn record(&mut self, labels: &[Label]) -> bool {
        let mut h = DefaultHasher::new();
        labels.hash(&mut h);
        self.0.insert(h.finish())
    }
}

/// Grows the seeded clusters over `dataset`.
pub fn run(
    dataset: &Dataset,
    seeds: &SeedAssignment,
    max_n_iterations: usize,
) -> Result<(ClusterAssignment, RunReport)> {
    seeds.validate(dataset.len())?;
    if max_n_iterations == 0 {
        return Err(Error::ZeroIterations);
    }
    let seeded = seeds.cluster_ids();
    let mut labels = vec![Label::ANOMALY; dataset.len()];
    for (id, c) in seeds.iter() {
        labels[id] = Label::cluster(c);
    }

    let mut seen = StateLog::default();
    seen.record(&labels);
    let mut passes = 0;
    let mut ejected_total = 0;
    let mut absorbed_total = 0;
    let mut converged = Convergence::No;

    while passes < max_n_iterations {
        let before = labels.clone();
        for cluster in order_clusters(dataset, &labels)? {
            let label = Label::cluster(cluster);
            let members = members_of(&labels, cluster);
            let fit = PerceptionModel::fit_report(&gather(dataset, &members))?;
            for &k in &fit.tail {
                labels[members[k]] = Label::ANOMALY;
            }
            ejected_total += fit.tail.len();

            let survivors: Vec<usize> = if fit.tail.is_empty() {
                members
            } else {
                members_of(&labels, cluster)
            };
            let model = if fit.tail.is_empty() {
                fit.model
            } else {
                PerceptionModel::fit(&gather(dataset, &survivors))?
            };

            for (i, l) in labels.iter_mut().enumerate() {
                if l.is_anomaly()
                    && model.verdict(distance_unchecked(dataset.point(i), model.median()))
                        == Verdict::Member
                {
                    *l = label;
                    absorbed_total += 1;
                }
            }
        }
        passes += 1;

        if labels == before {
            converged = Convergence::Yes;
            break;
        }
        if !seen.record(&labels) {
            converged = Convergence::Cycle;
            break;
        }
    }

    let mut models = BTreeMap::new();
    let mut per_cluster = BTreeMap::new();
    let mut vanished = Vec::new();
    for &cluster in &seeded {
        let members = members_of(&labels, cluster);
        if members.is_empty() {
            vanished.push(cluster);
            continue;
        }
        let model = PerceptionModel::fit(&gather(dataset, &members))?;
        per_cluster.insert(
            cluster,
            ClusterStats {
                size: members.len(),
                mu: model.mu(),
                cutoff: model.cutoff(),
            },
        );
        models.insert(cluster, model);
    }

    let scores = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let x = dataset.point(i);
            match l.as_cluster() {
                Some(c) => {
                    let m = &models[&c];
                    m.expectation_unchecked(distance_unchecked(x, m.median()))
                }
                None => models
                    .values()
                    .map(|m| m.expectation_unchecked(distance_unchecked(x, m.median())))
                    .fold(0.0, f64::max),
            }
        })
        .collect();

    Ok((
        ClusterAssignment {
            labels,
            scores,
            models,
        },
        RunReport {
            passes,
            converged,
            ejected_total,
            absorbed_total,
            per_cluster,
            vanished,
        },
    ))
}

/// Assigns an unseen point to the cluster under which it is most expected,
/// or to the anomaly label if no cluster expects it at least once.
pub fn assign_new(
    models: &BTreeMap<ClusterId, PerceptionModel>,
    x: &[f64],
) -> Result<(Label, f64)> {
    let mut best: Option<(ClusterId, f64)> = None;
    for (&c, m) in models {
        let score = m.expectation_unchecked(m.deviation(x)?);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((c, score));
        }
    }
    let (c, score) = best.ok_or(Error::NoClusters)?;
    if score >= 1.0 {
        Ok((Label::cluster(c), score))
    } else {
        Ok((Label::ANOMALY, score))
    }
}
