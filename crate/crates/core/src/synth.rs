//! Deterministic synthetic benchmarks: Gaussian clusters with injected
//! isolated anomalies, a small anomalous cluster, and seed sampling with
//! optional mislabelling.
//!
//! Randomness comes from ChaCha8 with an explicit seed. Gaussians use the
//! Box-Muller transform over the pure-Rust `libm` routines, so the output is
//! identical on every platform.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::SeedAssignment;
use crate::error::{Error, Result};
use crate::types::{ClusterId, Dataset, Label};

#[derive(Debug, Clone, PartialEq)]
pub struct AnomalousCluster {
    pub center: Vec<f64>,
    pub std: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IsolatedAnomalies {
    /// Frozen positions.
    Fixed(Vec<Vec<f64>>),
    /// `count` points uniform over the axis-aligned box `[lo, hi]`.
    UniformBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
        count: usize,
    },
}

impl IsolatedAnomalies {
    pub fn count(&self) -> usize {
        match self {
            IsolatedAnomalies::Fixed(p) => p.len(),
            IsolatedAnomalies::UniformBox { count, .. } => *count,
        }
    }
}

/// Every constant that defines a generated benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub name: String,
    pub rng_seed: u64,
    pub cluster_centers: Vec<Vec<f64>>,
    pub cluster_stds: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
    pub isolated: IsolatedAnomalies,
    pub anomalous_cluster: AnomalousCluster,
    pub n_mislabelled_seeds: usize,
    pub seed_fraction: f64,
    pub min_seeds_per_cluster: usize,
}

const STDS_2D: [f64; 8] = [0.6, 2.0, 0.2, 0.7, 3.0, 0.4, 0.6, 0.6];

// Clusters 6 and 7 are the deliberately close pair.
const CENTERS_2D: [[f64; 2]; 8] = [
    [0.0, 0.0],
    [-5.0, 25.0],
    [10.0, 5.0],
    [20.0, -5.0],
    [40.0, 35.0],
    [25.0, 12.0],
    [30.0, -10.0],
    [34.2, -10.0],
];

const ISOLATED_1D: [f64; 15] = [
    -40.0, -28.0, -18.0, -10.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0, 138.0, 165.0, 175.0, 190.0,
    210.0,
];

impl BenchmarkSpec {
    /// Three 1-D clusters at 0/50/100 with stds 1/3/6, 10000 points each.
    pub fn one_dimensional(rng_seed: u64) -> Self {
        BenchmarkSpec {
            name: "1d".into(),
            rng_seed,
            cluster_centers: vec![vec![0.0], vec![50.0], vec![100.0]],
            cluster_stds: vec![1.0, 3.0, 6.0],
            cluster_sizes: vec![10_000; 3],
            isolated: IsolatedAnomalies::Fixed(ISOLATED_1D.iter().map(|&x| vec![x]).collect()),
            anomalous_cluster: AnomalousCluster {
                center: vec![150.0],
                std: 0.5,
                size: 30,
            },
            n_mislabelled_seeds: 3,
            seed_fraction: 0.005,
            min_seeds_per_cluster: 10,
        }
    }

    /// Eight 2-D clusters of 1250 points, 250 scattered anomalies and a
    /// 50-point anomalous cluster at (11, 20): 10300 points in total.
    pub fn two_dimensional(rng_seed: u64) -> Self {
        BenchmarkSpec {
            name: "2d".into(),
            rng_seed,
            cluster_centers: CENTERS_2D.iter().map(|c| c.to_vec()).collect(),
            cluster_stds: STDS_2D.to_vec(),
            cluster_sizes: vec![1250; 8],
            isolated: IsolatedAnomalies::UniformBox {
                lo: vec![-30.0, -30.0],
                hi: vec![70.0, 70.0],
                count: 250,
            },
            anomalous_cluster: AnomalousCluster {
                center: vec![11.0, 20.0],
                std: 0.3,
                size: 50,
            },
            n_mislabelled_seeds: 2,
            seed_fraction: 0.0097,
            min_seeds_per_cluster: 10,
        }
    }

    pub fn dim(&self) -> usize {
        self.cluster_centers.first().map_or(0, Vec::len)
    }

    pub fn total_points(&self) -> usize {
        self.cluster_sizes.iter().sum::<usize>()
            + self.isolated.count()
            + self.anomalous_cluster.size
    }

    fn validate(&self) -> Result<()> {
        let k = self.cluster_centers.len();
        let dim = self.dim();
        let ok = k > 0
            && dim > 0
            && self.cluster_stds.len() == k
            && self.cluster_sizes.len() == k
            && self.cluster_centers.iter().all(|c| c.len() == dim)
            && self.cluster_stds.iter().all(|&s| s > 0.0 && s.is_finite())
            && self.cluster_sizes.iter().all(|&n| n >= 1)
            && self.anomalous_cluster.center.len() == dim
            && self.anomalous_cluster.std > 0.0;
        if !ok {
            return Err(Error::InfeasibleQuota(format!(
                "inconsistent benchmark spec `{}`",
                self.name
            )));
        }
        Ok(())
    }

    /// Samples the dataset. Rows are ordered: clusters in id order, then the
    /// isolated anomalies, then the anomalous cluster.
    pub fn generate(&self) -> Result<Dataset> {
        self.validate()?;
        let mut gauss = Gaussian::new(self.rng_seed);
        let dim = self.dim();
        let mut values = Vec::with_capacity(self.total_points() * dim);
        let mut truth = Vec::with_capacity(self.total_points());

        for (k, ((center, &std), &size)) in self
            .cluster_centers
            .iter()
            .zip(&self.cluster_stds)
            .zip(&self.cluster_sizes)
            .enumerate()
        {
            for _ in 0..size {
                values.extend(center.iter().map(|&c| c + std * gauss.sample()));
                truth.push(Label::cluster(k as ClusterId));
            }
        }
        match &self.isolated {
            IsolatedAnomalies::Fixed(points) => {
                for p in points {
                    values.extend_from_slice(p);
                    truth.push(Label::ANOMALY);
                }
            }
            IsolatedAnomalies::UniformBox { lo, hi, count } => {
                for _ in 0..*count {
                    values.extend(
                        lo.iter()
                            .zip(hi)
                            .map(|(&a, &b)| a + (b - a) * gauss.uniform()),
                    );
                    truth.push(Label::ANOMALY);
                }
            }
        }
        let a = &self.anomalous_cluster;
        for _ in 0..a.size {
            values.extend(a.center.iter().map(|&c| c + a.std * gauss.sample()));
            truth.push(Label::ANOMALY);
        }
        Dataset::new(dim, values, Some(truth))
    }

    /// Seeds drawn with this benchmark's own seeding regime.
    pub fn sample_default_seeds(&self, dataset: &Dataset, rng_seed: u64) -> Result<SeedAssignment> {
        sample_seeds(
            dataset,
            self.seed_fraction,
            self.min_seeds_per_cluster,
            self.n_mislabelled_seeds,
            rng_seed,
        )
    }

    /// `key = value` text recording every constant.
    pub fn to_kv(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("benchmark", self.name.clone());
        line("rng_seed", self.rng_seed.to_string());
        line("dim", self.dim().to_string());
        line("n_clusters", self.cluster_centers.len().to_string());
        for (k, ((c, s), n)) in self
            .cluster_centers
            .iter()
            .zip(&self.cluster_stds)
            .zip(&self.cluster_sizes)
            .enumerate()
        {
            line(&format!("cluster.{k}.center"), list(c));
            line(&format!("cluster.{k}.std"), format!("{s}"));
            line(&format!("cluster.{k}.size"), n.to_string());
        }
        match &self.isolated {
            IsolatedAnomalies::Fixed(points) => {
                line("isolated.kind", "fixed".into());
                line("isolated.count", points.len().to_string());
                for (i, p) in points.iter().enumerate() {
                    line(&format!("isolated.{i}"), list(p));
                }
            }
            IsolatedAnomalies::UniformBox { lo, hi, count } => {
                line("isolated.kind", "uniform_box".into());
                line("isolated.count", count.to_string());
                line("isolated.lo", list(lo));
                line("isolated.hi", list(hi));
            }
        }
        let a = &self.anomalous_cluster;
        line("anomalous_cluster.center", list(&a.center));
        line("anomalous_cluster.std", format!("{}", a.std));
        line("anomalous_cluster.size", a.size.to_string());
        line("n_mislabelled_seeds", self.n_mislabelled_seeds.to_string());
        line("seed_fraction", format!("{}", self.seed_fraction));
        line(
            "min_seeds_per_cluster",
            self.min_seeds_per_cluster.to_string(),
        );
        line("total_points", self.total_points().to_string());
        out
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let (k, v) = raw.split_once('=').ok_or_else(|| Error::Parse {
                row: lineno + 1,
                col: 1,
                msg: "expected `key = value`".into(),
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| {
            map.get(k).cloned().ok_or_else(|| Error::Parse {
                row: 0,
                col: 0,
                msg: format!("missing key `{k}`"),
            })
        };
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse {
                row: 0,
                col: 0,
                msg: format!("bad value for `{k}`: {v}"),
            })
        }
        let list = |k: &str| -> Result<Vec<f64>> {
            get(k)?.split(',').map(|x| num(k, x.trim())).collect()
        };
        let k: usize = num("n_clusters", &get("n_clusters")?)?;
        let mut centers = Vec::with_capacity(k);
        let mut stds = Vec::with_capacity(k);
        let mut sizes = Vec::with_capacity(k);
        for i in 0..k {
            centers.push(list(&format!("cluster.{i}.center"))?);
            stds.push(num("std", &get(&format!("cluster.{i}.std"))?)?);
            sizes.push(num("size", &get(&format!("cluster.{i}.size"))?)?);
        }
        let count: usize = num("isolated.count", &get("isolated.count")?)?;
        let isolated = match get("isolated.kind")?.as_str() {
            "fixed" => IsolatedAnomalies::Fixed(
                (0..count)
                    .map(|i| list(&format!("isolated.{i}")))
                    .collect::<Result<_>>()?,
            ),
            "uniform_box" => IsolatedAnomalies::UniformBox {
                lo: list("isolated.lo")?,
                hi: list("isolated.hi")?,
                count,
            },
            other => {
                return Err(Error::Parse {
                    row: 0,
                    col: 0,
                    msg: format!("unknown isolated.kind `{other}`"),
                })
            }
        };
        let spec = BenchmarkSpec {
            name: get("benchmark")?,
            rng_seed: num("rng_seed", &get("rng_seed")?)?,
            cluster_centers: centers,
            cluster_stds: stds,
            cluster_sizes: sizes,
            isolated,
            anomalous_cluster: AnomalousCluster {
                center: list("anomalous_cluster.center")?,
                std: num("std", &get("anomalous_cluster.std")?)?,
                size: num("size", &get("anomalous_cluster.size")?)?,
            },
            n_mislabelled_seeds: num("n_mislabelled_seeds", &get("n_mislabelled_seeds")?)?,
            seed_fraction: num("seed_fraction", &get("seed_fraction")?)?,
            min_seeds_per_cluster: num("min_seeds_per_cluster", &get("min_seeds_per_cluster")?)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn gen_1d(rng_seed: u64) -> Result<(Dataset, BenchmarkSpec)> {
    let spec = BenchmarkSpec::one_dimensional(rng_seed);
    Ok((spec.generate()?, spec))
}

pub fn gen_2d(rng_seed: u64) -> Result<(Dataset, BenchmarkSpec)> {
    let spec = BenchmarkSpec::two_dimensional(rng_seed);
    Ok((spec.generate()?, spec))
}

/// The two built-in benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bench {
    OneD,
    TwoD,
}

impl std::str::FromStr for Bench {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1d" => Ok(Bench::OneD),
            "2d" => Ok(Bench::TwoD),
            other => Err(Error::InfeasibleQuota(format!(
                "unknown benchmark `{other}`"
            ))),
        }
    }
}

/// Offset between the data seed and the seed-sampling seed.
pub const SEED_STREAM_OFFSET: u64 = 1000;

/// Dataset, spec and default seed labels for `bench`. Seeds are sampled with
/// `rng_seed + SEED_STREAM_OFFSET` so they do not reuse the data stream.
pub fn benchmark(bench: Bench, rng_seed: u64) -> Result<(Dataset, BenchmarkSpec, SeedAssignment)> {
    let spec = match bench {
        Bench::OneD => BenchmarkSpec::one_dimensional(rng_seed),
        Bench::TwoD => BenchmarkSpec::two_dimensional(rng_seed),
    };
    let dataset = spec.generate()?;
    let seeds = spec.sample_default_seeds(&dataset, rng_seed.wrapping_add(SEED_STREAM_OFFSET))?;
    Ok((dataset, spec, seeds))
}

struct Gaussian {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Gaussian {
    fn new(seed: u64) -> Self {
        Gaussian {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    fn uniform(&mut self) -> f64 {
        uniform(&mut self.rng)
    }

    fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * libm::log(u1)).sqrt();
        let theta = 2.0 * PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }
}

fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unbiased integer in `0..n` (Lemire's multiply-and-reject).
fn below(rng: &mut impl RngCore, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as u64;
    let threshold = n.wrapping_neg() % n;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(n);
        if (m as u64) >= threshold {
            return (m >> 64) as usize;
        }
    }
}

/// Moves a uniform random `k`-subset of `items` to its front.
fn partial_shuffle<T>(rng: &mut impl RngCore, items: &mut [T], k: usize) {
    for i in 0..k.min(items.len()) {
        let j = i + below(rng, items.len() - i);
        items.swap(i, j);
    }
}

/// Draws seed labels from the ground truth.
///
/// The quota is `round(fraction * n)` (capped at the number of labelled
/// points). Every class first gets `min_per_cluster` uniformly drawn seeds;
/// the rest of the quota is drawn uniformly from the remaining labelled
/// points. Finally `n_mislabelled` seeds get a different, uniformly chosen
/// class id. Truth anomalies are never seeded.
pub fn sample_seeds(
    dataset: &Dataset,
    fraction: f64,
    min_per_cluster: usize,
    n_mislabelled: usize,
    rng_seed: u64,
) -> Result<SeedAssignment> {
    let truth = dataset.truth().ok_or(Error::MissingTruth)?;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InfeasibleQuota(format!(
            "fraction {fraction} not in (0, 1]"
        )));
    }
    let mut classes: BTreeMap<ClusterId, Vec<usize>> = BTreeMap::new();
    for (i, l) in truth.iter().enumerate() {
        if let Some(c) = l.as_cluster() {
            classes.entry(c).or_default().push(i);
        }
    }
    let labelled: usize = classes.values().map(Vec::len).sum();
    let k = classes.len();
    if k == 0 {
        return Err(Error::InfeasibleQuota("no labelled points".into()));
    }
    let total = ((fraction * dataset.len() as f64).round() as usize).min(labelled);
    if total < min_per_cluster * k {
        return Err(Error::InfeasibleQuota(format!(
            "{total} seeds cannot cover {min_per_cluster} per cluster for {k} clusters"
        )));
    }
    if let Some((c, ids)) = classes.iter().find(|(_, ids)| ids.len() < min_per_cluster) {
        return Err(Error::InfeasibleQuota(format!(
            "cluster {c} has only {} points",
            ids.len()
        )));
    }
    if n_mislabelled > total || (n_mislabelled > 0 && k < 2) {
        return Err(Error::InfeasibleQuota(format!(
            "cannot mislabel {n_mislabelled} of {total} seeds over {k} clusters"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut chosen: BTreeMap<usize, ClusterId> = BTreeMap::new();
    let mut rest = Vec::with_capacity(labelled);
    for (&c, ids) in &classes {
        let mut ids = ids.clone();
        partial_shuffle(&mut rng, &mut ids, min_per_cluster);
        chosen.extend(ids[..min_per_cluster].iter().map(|&i| (i, c)));
        rest.extend_from_slice(&ids[min_per_cluster..]);
    }
    rest.sort_unstable();
    let extra = total - chosen.len();
    partial_shuffle(&mut rng, &mut rest, extra);
    for &i in &rest[..extra] {
        let c = truth[i].as_cluster().expect("labelled point");
        chosen.insert(i, c);
    }

    let class_ids: Vec<ClusterId> = classes.keys().copied().collect();
    let mut ids: Vec<usize> = chosen.keys().copied().collect();
    partial_shuffle(&mut rng, &mut ids, n_mislabelled);
    for &i in &ids[..n_mislabelled] {
        let own = chosen[&i];
        let others: Vec<ClusterId> = class_ids.iter().copied().filter(|&c| c != own).collect();
        chosen.insert(i, others[below(&mut rng, others.len())]);
    }
    SeedAssignment::from_pairs(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(ds: &Dataset) -> BTreeMap<Label, usize> {
        let mut m = BTreeMap::new();
        for &l in ds.truth().unwrap() {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn one_d_counts() {
        let (ds, spec) = gen_1d(42).unwrap();
        assert_eq!(ds.len(), 30_045);
        assert_eq!(spec.total_points(), 30_045);
        let c = counts(&ds);
        assert_eq!(c[&Label::cluster(0)], 10_000);
        assert_eq!(c[&Label::cluster(1)], 10_000);
        assert_eq!(c[&Label::cluster(2)], 10_000);
        assert_eq!(c[&Label::ANOMALY], 45);
    }

    #[test]
    fn one_d_sample_means_within_standard_error() {
        let (ds, spec) = gen_1d(42).unwrap();
        let truth = ds.truth().unwrap();
        for (k, (center, std)) in spec
            .cluster_centers
            .iter()
            .zip(&spec.cluster_stds)
            .enumerate()
        {
            let xs: Vec<f64> = (0..ds.len())
                .filter(|&i| truth[i] == Label::cluster(k as u32))
                .map(|i| ds.point(i)[0])
                .collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let bound = 5.0 * std / (xs.len() as f64).sqrt();
            assert!(
                (mean - center[0]).abs() <= bound,
                "cluster {k}: mean {mean}"
            );
        }
    }

    #[test]
    fn one_d_isolated_anomalies_are_far_from_every_center() {
        let spec = BenchmarkSpec::one_dimensional(0);
        let IsolatedAnomalies::Fixed(points) = &spec.isolated else {
            panic!("fixed placement expected")
        };
        for p in points {
            for (c, s) in spec.cluster_centers.iter().zip(&spec.cluster_stds) {
                assert!(
                    (p[0] - c[0]).abs() >= 6.0 * s,
                    "{} too close to {}",
                    p[0],
                    c[0]
                );
            }
        }
    }

    #[test]
    fn two_d_counts_and_layout() {
        let (ds, spec) = gen_2d(7).unwrap();
        assert_eq!(ds.len(), 10_300);
        assert_eq!(ds.dim(), 2);
        let c = counts(&ds);
        for k in 0..8 {
            assert_eq!(c[&Label::cluster(k)], 1250);
        }
        assert_eq!(c[&Label::ANOMALY], 300);
        assert_eq!(
            spec.cluster_stds,
            vec![0.6, 2.0, 0.2, 0.7, 3.0, 0.4, 0.6, 0.6]
        );

        // Only clusters 6 and 7 may sit closer than 6 * (sum of stds).
        let mut close_pairs = vec![];
        for a in 0..8 {
            for b in a + 1..8 {
                let (ca, cb) = (&spec.cluster_centers[a], &spec.cluster_centers[b]);
                let d = ((ca[0] - cb[0]).powi(2) + (ca[1] - cb[1]).powi(2)).sqrt();
                if d < 6.0 * (spec.cluster_stds[a] + spec.cluster_stds[b]) {
                    close_pairs.push((a, b));
                }
            }
        }
        assert_eq!(close_pairs, vec![(6, 7)]);
    }

    #[test]
    fn two_d_anomalous_cluster_mean() {
        let (ds, _) = gen_2d(7).unwrap();
        let n = ds.len();
        let (sx, sy) = (n - 50..n).fold((0.0, 0.0), |(x, y), i| {
            (x + ds.point(i)[0], y + ds.point(i)[1])
        });
        assert!((sx / 50.0 - 11.0).abs() < 0.2);
        assert!((sy / 50.0 - 20.0).abs() < 0.2);
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(gen_1d(42).unwrap().0, gen_1d(42).unwrap().0);
        assert_eq!(gen_2d(7).unwrap().0, gen_2d(7).unwrap().0);
        assert_ne!(gen_2d(7).unwrap().0, gen_2d(8).unwrap().0);
    }

    #[test]
    fn kv_round_trip() {
        for spec in [
            BenchmarkSpec::one_dimensional(3),
            BenchmarkSpec::two_dimensional(9),
        ] {
            assert_eq!(BenchmarkSpec::from_kv(&spec.to_kv()).unwrap(), spec);
        }
    }

    #[test]
    fn paper_seed_regimes() {
        let (ds, spec) = gen_1d(42).unwrap();
        let seeds = sample_seeds(&ds, 0.005, 10, 0, 1).unwrap();
        assert_eq!(seeds.len(), 150);
        let truth = ds.truth().unwrap();
        let mut per = BTreeMap::new();
        for (id, c) in seeds.iter() {
            assert_eq!(truth[id], Label::cluster(c));
            *per.entry(c).or_insert(0) += 1;
        }
        assert!(per.values().all(|&n| n >= 10), "{per:?}");
        assert_eq!(spec.sample_default_seeds(&ds, 1).unwrap().len(), 150);

        let (ds2, _) = gen_2d(7).unwrap();
        let seeds = sample_seeds(&ds2, 0.0097, 10, 0, 1).unwrap();
        assert_eq!(seeds.len(), 100);
    }

    #[test]
    fn full_fraction_seeds_every_labelled_point() {
        let ds = Dataset::new(
            1,
            vec![0.0, 1.0, 2.0, 3.0, 9.0],
            Some(vec![
                Label::cluster(0),
                Label::cluster(0),
                Label::cluster(1),
                Label::cluster(1),
                Label::ANOMALY,
            ]),
        )
        .unwrap();
        let seeds = sample_seeds(&ds, 1.0, 1, 0, 5).unwrap();
        let got: Vec<_> = seeds.iter().collect();
        assert_eq!(got, vec![(0, 0), (1, 0), (2, 1), (3, 1)]);
    }

    #[test]
    fn mislabelled_seeds_change_class_and_skip_anomalies() {
        let (ds, _) = gen_1d(1).unwrap();
        let truth = ds.truth().unwrap();
        let seeds = sample_seeds(&ds, 0.005, 10, 5, 11).unwrap();
        let wrong = seeds
            .iter()
            .filter(|&(id, c)| truth[id] != Label::cluster(c))
            .count();
        assert_eq!(wrong, 5);
        assert!(seeds.iter().all(|(id, _)| !truth[id].is_anomaly()));
    }

    #[test]
    fn infeasible_quotas() {
        let (ds, _) = gen_2d(7).unwrap();
        assert!(matches!(
            sample_seeds(&ds, 0.001, 10, 0, 1),
            Err(Error::InfeasibleQuota(_))
        ));
        assert!(sample_seeds(&ds, 0.0, 1, 0, 1).is_err());
        assert!(sample_seeds(&ds, 1.5, 1, 0, 1).is_err());
        let no_truth = Dataset::new(1, vec![1.0], None).unwrap();
        assert!(matches!(
            sample_seeds(&no_truth, 0.5, 1, 0, 1),
            Err(Error::MissingTruth)
        ));
    }

    #[test]
    fn below_is_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..50 {
            for _ in 0..20 {
                assert!(below(&mut rng, n) < n);
            }
        }
    }
}
