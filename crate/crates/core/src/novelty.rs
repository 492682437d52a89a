//! Running-centroid novelty.
//!
//! For 0-based paragraph index `i >= 1`,
//! `novelty[i] = 1 - cos(e_i, mean(e_0, ..., e_{i-1}))`; `novelty[0]` is 0.5.
//! The centroid is kept as a running `f64` sum and divided on demand, which is
//! algebraically the same as the incremental mean update
//! `mean_i = ((i - 1) * mean_{i-1} + e_i) / i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Novelty assigned to the first paragraph, which has no preceding context.
pub const FIRST_NOVELTY: f64 = 0.5;

/// Centroid norms below this make the cosine undefined.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoveltyTrajectory {
    pub book_id: String,
    pub values: Vec<f64>,
}

impl NoveltyTrajectory {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Arithmetic mean of the embeddings absorbed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningCentroid {
    sum: Vec<f64>,
    count: usize,
}

impl RunningCentroid {
    pub fn new(first: &[f64]) -> Self {
        Self { sum: first.to_vec(), count: 1 }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dimension(&self) -> usize {
        self.sum.len()
    }

    pub fn sum(&self) -> &[f64] {
        &self.sum
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.sum.iter().map(|s| s / n).collect()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.sum) / self.count as f64
    }

    pub fn absorb(&mut self, e: &[f64]) {
        debug_assert_eq!(e.len(), self.sum.len());
        for (s, v) in self.sum.iter_mut().zip(e) {
            *s += v;
        }
        self.count += 1;
    }

    /// Cosine similarity between `e` and the current mean.
    pub fn cosine(&self, e: &[f64]) -> Option<f64> {
        let sum_norm = norm(&self.sum);
        if sum_norm / (self.count as f64) < DEGENERATE_NORM {
            return None;
        }
        let e_norm = norm(e);
        if e_norm == 0.0 {
            return None;
        }
        let dot: f64 = e.iter().zip(&self.sum).map(|(a, b)| a * b).sum();
        Some((dot / (e_norm * sum_norm)).clamp(-1.0, 1.0))
    }
}

/// Returns the centroid after absorbing `e`.
pub fn update_centroid(mut c: RunningCentroid, e: &[f64]) -> RunningCentroid {
    c.absorb(e);
    c
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Computes the novelty trajectory of an ordered embedding sequence.
pub fn novelty_trajectory<E: AsRef<[f64]>>(book_id: &str, embeddings: &[E]) -> Result<NoveltyTrajectory> {
    let (first, rest) = embeddings.split_first().ok_or(Error::EmptyBook)?;
    let first = first.as_ref();
    let mut centroid = RunningCentroid::new(first);
    let mut values = Vec::with_capacity(embeddings.len());
    values.push(FIRST_NOVELTY);

    for (offset, e) in rest.iter().enumerate() {
        let e = e.as_ref();
        if e.len() != first.len() {
            return Err(Error::DimensionMismatch { expected: first.len(), actual: e.len() });
        }
        let cos = centroid.cosine(e).ok_or(Error::DegenerateCentroid(offset + 1))?;
        values.push(1.0 - cos);
        centroid.absorb(e);
    }

    Ok(NoveltyTrajectory { book_id: book_id.to_owned(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::mock_embed;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Recomputes every centroid from scratch.
    pub(crate) fn brute_force(embeddings: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.5];
        for i in 1..embeddings.len() {
            let d = embeddings[i].len();
            let mut mean = vec![0.0; d];
            for e in &embeddings[..i] {
                for k in 0..d {
                    mean[k] += e[k];
                }
            }
            for m in &mut mean {
                *m /= i as f64;
            }
            let dot: f64 = (0..d).map(|k| embeddings[i][k] * mean[k]).sum();
            let na: f64 = embeddings[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.push(1.0 - dot / (na * nb));
        }
        out
    }

    fn mock_book(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        (0..n).map(|i| mock_embed(&format!("p{i}"), d, seed).into_inner()).collect()
    }

    #[test]
    fn anchors() {
        let single = novelty_trajectory("b", &[vec![0.0, 1.0]]).unwrap();
        assert_eq!(single.values, vec![0.5]);

        let u = vec![0.6, 0.8];
        let dup = novelty_trajectory("b", &[u.clone(), u]).unwrap();
        assert_eq!(dup.values[0], 0.5);
        assert!(dup.values[1].abs() < 1e-12);

        let orth = novelty_trajectory("b", &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(orth.values, vec![0.5, 1.0]);
    }

    #[test]
    fn errors() {
        let empty: Vec<Vec<f64>> = vec![];
        assert!(matches!(novelty_trajectory("b", &empty), Err(Error::EmptyBook)));
        let opposite = [vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(novelty_trajectory("b", &opposite), Err(Error::DegenerateCentroid(2))));
        assert!(matches!(
            novelty_trajectory("b", &[vec![1.0, 0.0], vec![1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn matches_from_scratch_oracle_on_50_mock_vectors() {
        let book = mock_book(50, 64, 11);
        let traj = novelty_trajectory("b", &book).unwrap();
        let oracle = brute_force(&book);
        for (a, b) in traj.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn update_centroid_examples() {
        let c = RunningCentroid::new(&[1.0, 0.0]);
        let c = update_centroid(c, &[0.0, 1.0]);
        assert_eq!(c.count(), 2);
        assert_eq!(c.mean(), vec![0.5, 0.5]);

        let mean = c.mean();
        let c2 = update_centroid(c.clone(), &mean);
        for (a, b) in c2.mean().iter().zip(&mean) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(c2.count(), 3);
    }

    #[test]
    fn thousand_absorptions_match_batch_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<Vec<f64>> = (0..1000).map(|_| (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut c = RunningCentroid::new(&data[0]);
        for v in &data[1..] {
            c = update_centroid(c, v);
        }
        let mean = c.mean();
        for k in 0..16 {
            let batch = data.iter().map(|v| v[k]).sum::<f64>() / 1000.0;
            assert!((mean[k] - batch).abs() < 1e-9);
        }
    }

    #[test]
    fn order_dependent() {
        let book = mock_book(3, 8, 2);
        let shuffled = vec![book[2].clone(), book[0].clone(), book[1].clone()];
        let a = novelty_trajectory("b", &book).unwrap();
        let b = novelty_trajectory("b", &shuffled).unwrap();
        assert_ne!(a.values, b.values);
    }

    #[test]
    fn nonnegative_vectors_stay_in_unit_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let book: Vec<Vec<f64>> = (0..200).map(|_| (0..10).map(|_| rng.gen::<f64>()).collect()).collect();
        let traj = novelty_trajectory("b", &book).unwrap();
        assert!(traj.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    proptest! {
        #[test]
        fn oracle_equivalence_and_range(n in 1usize..60, d in 2usize..24, seed in any::<u64>()) {
            let book = mock_book(n, d, seed);
            let traj = novelty_trajectory("b", &book).unwrap();
            prop_assert_eq!(traj.len(), n);
            prop_assert_eq!(traj.values[0], 0.5);
            for (a, b) in traj.values.iter().zip(brute_force(&book)) {
                prop_assert!((a - b).abs() < 1e-9);
                prop_assert!((0.0..=2.0).contains(a));
            }
        }
    }
}
