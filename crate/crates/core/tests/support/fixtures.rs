use seedgrow_core::{ClusterAssignment, Dataset, Label, SeedAssignment, Verdict};

/// {0.0..0.9} and {5.0..5.9} in steps of 0.1 plus a lone 20; the inner
/// eight of each group are seeded as clusters 0 and 1.
pub fn hand_trace() -> (Dataset, SeedAssignment) {
    let mut xs: Vec<f64> = (0..10).map(|i| f64::from(i) / 10.0).collect();
    xs.extend((0..10).map(|i| 5.0 + f64::from(i) / 10.0));
    xs.push(20.0);
    let ds = Dataset::new(1, xs, None).unwrap();
    let seeds = SeedAssignment::from_pairs((1..=8).flat_map(|i| [(i, 0), (10 + i, 1)])).unwrap();
    (ds, seeds)
}

pub fn hand_trace_expected() -> Vec<Label> {
    let mut v = vec![Label::cluster(0); 10];
    v.extend(vec![Label::cluster(1); 10]);
    v.push(Label::ANOMALY);
    v
}

/// Two seeded cores at [0, 1] and [9, 10] joined by a uniform bridge of
/// 399 unseeded points that both clusters creep into, pass by pass.
pub fn fringe() -> (Dataset, SeedAssignment) {
    let mut xs: Vec<f64> = (0..21).map(|i| f64::from(i) * 0.05).collect();
    xs.extend((0..21).map(|i| 9.0 + f64::from(i) * 0.05));
    xs.extend((1..400).map(|i| 1.0 + f64::from(i) * 0.02));
    let ds = Dataset::new(1, xs, None).unwrap();
    let seeds = SeedAssignment::from_pairs((0..21).flat_map(|i| [(i, 0), (21 + i, 1)])).unwrap();
    (ds, seeds)
}

/// Checks that every member is a member under its own final model and every
/// anomaly is an anomaly under all of them. Returns the first violation.
pub fn fixed_point_violation(ds: &Dataset, a: &ClusterAssignment) -> Option<String> {
    for (i, (x, l)) in ds.points().zip(&a.labels).enumerate() {
        match l.as_cluster() {
            Some(c) => {
                let (v, _) = a.models[&c].classify(x).unwrap();
                if v != Verdict::Member {
                    return Some(format!("point {i} rejected by its own cluster {c}"));
                }
            }
            None => {
                for (c, m) in &a.models {
                    if m.classify(x).unwrap().0 != Verdict::Anomaly {
                        return Some(format!("anomaly {i} accepted by cluster {c}"));
                    }
                }
            }
        }
    }
    None
}
