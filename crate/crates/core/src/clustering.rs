//! k-means over PAA vectors and archetype labelling of the centroids.
//!
//! Lloyd iterations from k-means++ seeding with a ChaCha generator, so the
//! same inputs and seed always give the same model. Distances are Euclidean
//! in raw PAA space; z-normalization is only used when naming centroids.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 8;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

/// Point counts above this use the parallel assignment step.
const PARALLEL_ASSIGN_MIN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArchetypePrototype {
    Flat,
    GradualRise,
    EarlyPeak,
    LateSpike,
    UShape,
    SteadyDecline,
    Oscillatory,
    InvertedU,
}

impl ArchetypePrototype {
    pub const ALL: [ArchetypePrototype; 8] = [
        ArchetypePrototype::Flat,
        ArchetypePrototype::GradualRise,
        ArchetypePrototype::EarlyPeak,
        ArchetypePrototype::LateSpike,
        ArchetypePrototype::UShape,
        ArchetypePrototype::SteadyDecline,
        ArchetypePrototype::Oscillatory,
        ArchetypePrototype::InvertedU,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ArchetypePrototype::Flat => "Flat",
            ArchetypePrototype::GradualRise => "Gradual Rise",
            ArchetypePrototype::EarlyPeak => "Early Peak",
            ArchetypePrototype::LateSpike => "Late Spike",
            ArchetypePrototype::UShape => "U-Shape",
            ArchetypePrototype::SteadyDecline => "Steady Decline",
            ArchetypePrototype::Oscillatory => "Oscillatory",
            ArchetypePrototype::InvertedU => "Inverted-U",
        }
    }

    /// Raw prototype shape over `len` segments (before z-normalization).
    ///
    /// Positions are `u = t / (len - 1)`; for `len = 16` the early bump is
    /// centred on segment 3 and the late spike on segment 14.
    pub fn raw_shape(self, len: usize) -> Vec<f64> {
        assert!(len >= 2);
        let last = (len - 1) as f64;
        let bump = |t: f64, centre: f64, width: f64| {
            let z = (t / last - centre) / width;
            (-0.5 * z * z).exp()
        };
        (0..len)
            .map(|i| {
                let t = i as f64;
                let u = t / last;
                match self {
                    ArchetypePrototype::Flat => 0.0,
                    ArchetypePrototype::GradualRise => u,
                    ArchetypePrototype::SteadyDecline => -u,
                    ArchetypePrototype::EarlyPeak => bump(t, 3.0 / 15.0, 2.0 / 15.0),
                    ArchetypePrototype::LateSpike => bump(t, 14.0 / 15.0, 1.25 / 15.0),
                    ArchetypePrototype::UShape => (u - 0.5).powi(2),
                    ArchetypePrototype::InvertedU => -(u - 0.5).powi(2),
                    ArchetypePrototype::Oscillatory => {
                        (2.0 * std::f64::consts::PI * 2.0 * t / len as f64).sin()
                    }
                }
            })
            .collect()
    }

    /// Z-normalized shape; all zeros for `Flat`.
    pub fn shape(self, len: usize) -> Vec<f64> {
        z_normalize(&self.raw_shape(len)).unwrap_or_else(|| vec![0.0; len])
    }
}

impl fmt::Display for ArchetypePrototype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn population_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Population z-score; `None` for (near-)constant input.
fn z_normalize(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = population_std(v);
    if std < 1e-12 {
        return None;
    }
    Some(v.iter().map(|x| (x - mean) / std).collect())
}

/// Pearson correlation of two z-normalized vectors.
fn z_correlation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub seed: u64,
    pub dimension: usize,
    pub centroids: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub inertia: f64,
    #[serde(skip)]
    pub iterations_run: usize,
}

impl ClusterModel {
    /// Nearest centroid by Euclidean distance, lowest index on ties.
    pub fn assign(&self, vector: &[f64]) -> Result<usize> {
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, actual: vector.len() });
        }
        Ok(nearest(&self.centroids, vector).0)
    }

    pub fn label(&self, cluster: usize) -> &str {
        &self.labels[cluster]
    }

    /// Sum of squared distances of `vectors` to their nearest centroid.
    pub fn inertia_of(&self, vectors: &[Vec<f64>]) -> f64 {
        vectors.iter().map(|v| nearest(&self.centroids, v).1).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: ClusterModel = serde_json::from_str(s)?;
        if model.centroids.len() != model.k || model.labels.len() != model.k {
            return Err(Error::Config("model has inconsistent k".into()));
        }
        if let Some(c) = model.centroids.iter().find(|c| c.len() != model.dimension) {
            return Err(Error::DimensionMismatch { expected: model.dimension, actual: c.len() });
        }
        Ok(model)
    }
}

pub fn generic_labels(k: usize) -> Vec<String> {
    (0..k).map(|j| format!("cluster-{j}")).collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(centroids: &[Vec<f64>], v: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(c, v);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    /// Independent seedings; the lowest-inertia run is kept.
    pub restarts: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self { k: DEFAULT_K, seed: crate::config::DEFAULT_SEED, max_iter: DEFAULT_MAX_ITER, tol: DEFAULT_TOL, restarts: 1 }
    }
}

impl KMeansOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, ..Default::default() }
    }
}

/// A fitted model with the final assignment and the inertia measured after
/// every assignment step.
#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub model: ClusterModel,
    pub assignments: Vec<usize>,
    pub inertia_history: Vec<f64>,
}

pub fn kmeans(vectors: &[Vec<f64>], opts: &KMeansOptions) -> Result<ClusterModel> {
    fit_kmeans(vectors, opts).map(|fit| fit.model)
}

pub fn fit_kmeans(vectors: &[Vec<f64>], opts: &KMeansOptions) -> Result<KMeansFit> {
    let k = opts.k;
    if k == 0 {
        return Err(Error::Config("k must be positive".into()));
    }
    if vectors.len() < k {
        return Err(Error::TooFewPoints { k, actual: vectors.len() });
    }
    let dimension = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != dimension) {
        return Err(Error::DimensionMismatch { expected: dimension, actual: v.len() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<KMeansFit> = None;
    for _ in 0..opts.restarts.max(1) {
        let fit = lloyd(vectors, kmeans_plus_plus(vectors, k, &mut rng), opts, dimension);
        if best.as_ref().is_none_or(|b| fit.model.inertia < b.model.inertia) {
            best = Some(fit);
        }
    }
    let mut fit = best.expect("at least one run");
    fit.model.labels = match try_label_archetypes(&fit.model) {
        Ok(labels) => labels,
        Err(_) => generic_labels(k),
    };
    Ok(fit)
}

fn kmeans_plus_plus(vectors: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = vectors.len();
    let mut centroids = vec![vectors[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = vectors.iter().map(|v| squared_distance(v, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && *d > 0.0 {
                    pick = i;
                    break;
                }
            }
            while d2[pick] == 0.0 {
                pick -= 1;
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        let c = vectors[next].clone();
        for (d, v) in d2.iter_mut().zip(vectors) {
            *d = d.min(squared_distance(v, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn assign_all(vectors: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<(usize, f64)> {
    if vectors.len() >= PARALLEL_ASSIGN_MIN {
        vectors.par_iter().map(|v| nearest(centroids, v)).collect()
    } else {
        vectors.iter().map(|v| nearest(centroids, v)).collect()
    }
}

fn lloyd(vectors: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, opts: &KMeansOptions, dimension: usize) -> KMeansFit {
    let k = centroids.len();
    let mut history = Vec::new();
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let nearest = assign_all(vectors, &centroids);
        history.push(nearest.iter().map(|(_, d)| d).sum());
        let mut labels: Vec<usize> = nearest.iter().map(|(j, _)| *j).collect();
        let mut dist: Vec<f64> = nearest.iter().map(|(_, d)| *d).collect();

        // Empty clusters take the point farthest from its centroid, drawn from
        // clusters that keep at least one member.
        let mut counts = vec![0usize; k];
        for &j in &labels {
            counts[j] += 1;
        }
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            let donor = (0..vectors.len())
                .filter(|&i| counts[labels[i]] > 1)
                .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)));
            if let Some(i) = donor {
                counts[labels[i]] -= 1;
                counts[empty] = 1;
                labels[i] = empty;
                dist[i] = 0.0;
            }
        }

        let mut sums = vec![vec![0.0; dimension]; k];
        for (v, &j) in vectors.iter().zip(&labels) {
            for (s, x) in sums[j].iter_mut().zip(v) {
                *s += x;
            }
        }
        let mut shift: f64 = 0.0;
        for j in 0..k {
            if counts[j] == 0 {
                continue;
            }
            let mean: Vec<f64> = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            shift = shift.max(squared_distance(&mean, &centroids[j]).sqrt());
            centroids[j] = mean;
        }
        iterations += 1;
        if shift < opts.tol {
            break;
        }
    }

    let nearest = assign_all(vectors, &centroids);
    let inertia: f64 = nearest.iter().map(|(_, d)| d).sum();
    history.push(inertia);
    KMeansFit {
        model: ClusterModel {
            k,
            seed: opts.seed,
            dimension,
            centroids,
            labels: generic_labels(k),
            inertia,
            iterations_run: iterations,
        },
        assignments: nearest.into_iter().map(|(j, _)| j).collect(),
        inertia_history: history,
    }
}

/// Free-function form of [`ClusterModel::assign`].
pub fn assign(model: &ClusterModel, vector: &[f64]) -> Result<usize> {
    model.assign(vector)
}

/// Pearson correlation of every centroid against every prototype.
/// Rows are centroids, columns follow [`ArchetypePrototype::ALL`]. Constant
/// centroids score `+inf` against `Flat` and `-inf` elsewhere; `Flat`
/// scores 0 against any other centroid.
pub fn archetype_scores(centroids: &[Vec<f64>]) -> Vec<[f64; 8]> {
    let len = centroids.first().map_or(0, Vec::len);
    let shapes: Vec<Vec<f64>> = ArchetypePrototype::ALL.iter().map(|p| p.shape(len)).collect();
    centroids
        .iter()
        .map(|c| {
            let mut row = [0.0; 8];
            match z_normalize(c) {
                None => {
                    for (p, score) in ArchetypePrototype::ALL.iter().zip(row.iter_mut()) {
                        *score = if *p == ArchetypePrototype::Flat { f64::INFINITY } else { f64::NEG_INFINITY };
                    }
                }
                Some(z) => {
                    for ((p, shape), score) in ArchetypePrototype::ALL.iter().zip(&shapes).zip(row.iter_mut()) {
                        *score = if *p == ArchetypePrototype::Flat { 0.0 } else { z_correlation(&z, shape) };
                    }
                }
            }
            row
        })
        .collect()
}

/// Greedy bijection of centroids to archetype names: the highest-scoring
/// (centroid, prototype) pair is fixed first, then the best pair among the
/// unused ones, and so on. Equal scores go to the centroid with the smaller
/// spread, so the result does not depend on centroid order.
pub fn try_label_archetypes(model: &ClusterModel) -> Result<Vec<String>> {
    if model.k != ArchetypePrototype::ALL.len() || model.centroids.len() != model.k || model.dimension < 2 {
        return Err(Error::WrongK(model.k));
    }
    let scores = archetype_scores(&model.centroids);
    let spread: Vec<f64> = model.centroids.iter().map(|c| population_std(c)).collect();
    let mut pairs: Vec<(f64, usize, usize)> = scores
        .iter()
        .enumerate()
        .flat_map(|(c, row)| row.iter().enumerate().map(move |(p, &s)| (s, c, p)))
        .collect();
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(spread[a.1].total_cmp(&spread[b.1]))
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut labels: Vec<Option<&'static str>> = vec![None; model.k];
    let mut used = [false; 8];
    for (_, c, p) in pairs {
        if labels[c].is_none() && !used[p] {
            labels[c] = Some(ArchetypePrototype::ALL[p].name());
            used[p] = true;
        }
    }
    Ok(labels.into_iter().map(|l| l.expect("bijection").to_owned()).collect())
}

/// Returns `model` with archetype labels, or generic `cluster-<j>` names
/// when `k != 8`.
pub fn label_archetypes(mut model: ClusterModel) -> ClusterModel {
    model.labels = try_label_archetypes(&model).unwrap_or_else(|_| generic_labels(model.k));
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_vectors(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..d).map(|_| rng.gen_range(0.3..0.7)).collect()).collect()
    }

    fn model_from(centroids: Vec<Vec<f64>>) -> ClusterModel {
        ClusterModel {
            k: centroids.len(),
            seed: 0,
            dimension: centroids[0].len(),
            labels: generic_labels(centroids.len()),
            centroids,
            inertia: 0.0,
            iterations_run: 0,
        }
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let data = random_vectors(50, 4, 1);
        let model = kmeans(&data, &KMeansOptions::new(1, 3)).unwrap();
        for d in 0..4 {
            let mean = data.iter().map(|v| v[d]).sum::<f64>() / 50.0;
            assert!((model.centroids[0][d] - mean).abs() < 1e-12);
        }
        let total: f64 = data.iter().map(|v| squared_distance(v, &model.centroids[0])).sum();
        assert!((model.inertia - total).abs() < 1e-12);
        assert_eq!(model.labels, vec!["cluster-0"]);
    }

    #[test]
    fn separable_groups_are_recovered_exactly() {
        let centres: Vec<Vec<f64>> = (0..8).map(|g| vec![g as f64 * 10.0, (g % 3) as f64]).collect();
        let data: Vec<Vec<f64>> = centres.iter().flat_map(|c| std::iter::repeat_n(c.clone(), 10)).collect();
        let fit = fit_kmeans(&data, &KMeansOptions::new(8, 42)).unwrap();
        assert_eq!(fit.model.inertia, 0.0);
        let mut got = fit.model.centroids.clone();
        got.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(got, centres);
        for g in 0..8 {
            let first = fit.assignments[g * 10];
            assert!(fit.assignments[g * 10..g * 10 + 10].iter().all(|&a| a == first));
        }
    }

    #[test]
    fn inertia_is_non_increasing() {
        let data = random_vectors(500, 16, 7);
        let fit = fit_kmeans(&data, &KMeansOptions::new(8, 1)).unwrap();
        assert!(fit.inertia_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        assert!(fit.model.inertia <= fit.inertia_history[0]);
        let recomputed = fit.model.inertia_of(&data);
        assert!((recomputed - fit.model.inertia).abs() <= 1e-6 * recomputed);
    }

    #[test]
    fn converged_assignment_is_optimal() {
        let data = random_vectors(300, 16, 8);
        let fit = fit_kmeans(&data, &KMeansOptions::new(8, 2)).unwrap();
        for (v, &a) in data.iter().zip(&fit.assignments) {
            assert_eq!(nearest(&fit.model.centroids, v).0, a);
        }
    }

    #[test]
    fn deterministic_with_seed_and_restarts() {
        let data = random_vectors(200, 16, 9);
        let opts = KMeansOptions { restarts: 3, ..KMeansOptions::new(8, 5) };
        let a = kmeans(&data, &opts).unwrap();
        let b = kmeans(&data, &opts).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let single = kmeans(&data, &KMeansOptions::new(8, 5)).unwrap();
        assert!(a.inertia <= single.inertia);
    }

    #[test]
    fn too_few_points_and_ragged_input() {
        let data = random_vectors(3, 16, 1);
        assert!(matches!(kmeans(&data, &KMeansOptions::new(8, 0)), Err(Error::TooFewPoints { k: 8, actual: 3 })));
        let ragged = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(matches!(kmeans(&ragged, &KMeansOptions::new(1, 0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn assign_examples() {
        let model = model_from(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![5.0, 5.0], vec![2.0, 2.0], vec![-1.0, 0.0]]);
        assert_eq!(model.assign(&[2.0, 2.0]).unwrap(), 3);
        // equidistant from centroid 1 and centroid 4
        let model = model_from(vec![vec![9.0, 9.0], vec![1.0, 0.0], vec![7.0, 7.0], vec![8.0, 8.0], vec![-1.0, 0.0]]);
        assert_eq!(model.assign(&[0.0, 0.0]).unwrap(), 1);
        assert!(matches!(model.assign(&[0.0]), Err(Error::DimensionMismatch { .. })));

        let centres = random_vectors(8, 16, 4);
        let model = model_from(centres.clone());
        for v in random_vectors(50, 16, 5) {
            let dists: Vec<f64> = centres.iter().map(|c| squared_distance(c, &v)).collect();
            let want = (0..8).min_by(|&a, &b| dists[a].total_cmp(&dists[b])).unwrap();
            assert_eq!(model.assign(&v).unwrap(), want);
        }
    }

    #[test]
    fn prototypes_are_distinct_and_unit_variance() {
        let shapes: Vec<Vec<f64>> = ArchetypePrototype::ALL.iter().map(|p| p.shape(16)).collect();
        for (i, a) in shapes.iter().enumerate() {
            if i > 0 {
                let var = a.iter().map(|x| x * x).sum::<f64>() / 16.0;
                assert!((var - 1.0).abs() < 1e-12);
            }
            for b in &shapes[i + 1..] {
                assert!(squared_distance(a, b) > 1e-3);
            }
        }
    }

    #[test]
    fn labels_its_own_prototypes() {
        let centroids: Vec<Vec<f64>> = ArchetypePrototype::ALL.iter().map(|p| p.raw_shape(16)).collect();
        let labels = try_label_archetypes(&model_from(centroids)).unwrap();
        let names: Vec<&str> = ArchetypePrototype::ALL.iter().map(|p| p.name()).collect();
        assert_eq!(labels, names);
    }

    #[test]
    fn simple_labelling_examples() {
        let mut centroids: Vec<Vec<f64>> = ArchetypePrototype::ALL.iter().map(|p| p.raw_shape(16)).collect();
        centroids[0] = vec![0.47; 16];
        centroids[1] = (0..16).map(|i| 0.4 + 0.01 * i as f64).collect();
        let labels = try_label_archetypes(&model_from(centroids)).unwrap();
        assert_eq!(labels[0], "Flat");
        assert_eq!(labels[1], "Gradual Rise");
    }

    #[test]
    fn single_late_maximum_is_late_spike() {
        // maximum at segment 15 of 16 (index 14)
        let mut spike = vec![0.45; 16];
        spike[14] = 0.6;
        let scores = archetype_scores(std::slice::from_ref(&spike));
        let best = (0..8).max_by(|&a, &b| scores[0][a].total_cmp(&scores[0][b])).unwrap();
        assert_eq!(ArchetypePrototype::ALL[best], ArchetypePrototype::LateSpike);

        let mut centroids: Vec<Vec<f64>> = ArchetypePrototype::ALL.iter().map(|p| p.raw_shape(16)).collect();
        centroids[3] = spike;
        let labels = try_label_archetypes(&model_from(centroids)).unwrap();
        assert_eq!(labels[3], "Late Spike");
    }

    #[test]
    fn wrong_k_falls_back_to_generic_names() {
        let model = model_from(random_vectors(3, 16, 1));
        assert!(matches!(try_label_archetypes(&model), Err(Error::WrongK(3))));
        assert_eq!(label_archetypes(model).labels, vec!["cluster-0", "cluster-1", "cluster-2"]);
    }

    #[test]
    fn json_round_trip() {
        let data = random_vectors(40, 16, 2);
        let model = kmeans(&data, &KMeansOptions::new(8, 1)).unwrap();
        let json = model.to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let mut keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(keys, ["centroids", "dimension", "inertia", "k", "labels", "seed"]);
        let back = ClusterModel::from_json(&json).unwrap();
        assert_eq!(back.centroids, model.centroids);
        assert_eq!(back.labels, model.labels);
    }

    proptest! {
        #[test]
        fn labelling_is_a_permutation_consistent_bijection(perm in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(), seed in any::<u64>()) {
            let centroids = random_vectors(8, 16, seed);
            let labels = try_label_archetypes(&model_from(centroids.clone())).unwrap();
            let mut sorted = labels.clone();
            sorted.sort();
            let mut names: Vec<String> = ArchetypePrototype::ALL.iter().map(|p| p.name().to_owned()).collect();
            names.sort();
            prop_assert_eq!(sorted, names);

            let shuffled: Vec<Vec<f64>> = perm.iter().map(|&i| centroids[i].clone()).collect();
            let relabelled = try_label_archetypes(&model_from(shuffled)).unwrap();
            for (pos, &i) in perm.iter().enumerate() {
                prop_assert_eq!(&relabelled[pos], &labels[i]);
            }
        }
    }
}
