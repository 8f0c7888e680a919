use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self { max_iter: 100, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    /// Sum of squared distances to the assigned centers.
    pub objective: f64,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Lloyd's algorithm from `k` distinct, seeded random data points.
///
/// A cluster that empties is re-seeded with the point currently farthest
/// from its own center.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, options: &KMeansOptions) -> Result<KMeansResult> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} must be in 1..={n}")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidParameter("points have inconsistent dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, n, k).into_vec();
    picks.sort_unstable();
    let mut centers: Vec<Vec<f64>> = picks.iter().map(|&i| points[i].clone()).collect();
    let mut assignment = vec![usize::MAX; n];
    let mut iterations = 0;

    while iterations < options.max_iter {
        iterations += 1;
        let mut changed = false;
        let mut dists = vec![0.0; n];
        for (i, p) in points.iter().enumerate() {
            let (j, d) = nearest(p, &centers);
            dists[i] = d;
            if assignment[i] != j {
                assignment[i] = j;
                changed = true;
            }
        }

        let mut sizes = vec![0usize; k];
        for &j in &assignment {
            sizes[j] += 1;
        }
        for j in 0..k {
            if sizes[j] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| sizes[assignment[i]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
            if let Some(i) = far {
                sizes[assignment[i]] -= 1;
                assignment[i] = j;
                sizes[j] = 1;
                dists[i] = 0.0;
                changed = true;
            }
        }

        let mut shift = 0.0f64;
        for (j, center) in centers.iter_mut().enumerate() {
            let mut sum = vec![0.0; dim];
            for (p, _) in points.iter().zip(&assignment).filter(|(_, &a)| a == j) {
                for (s, x) in sum.iter_mut().zip(p) {
                    *s += x;
                }
            }
            let mean: Vec<f64> = sum.into_iter().map(|s| s / sizes[j] as f64).collect();
            shift = shift.max(sq_dist(&mean, center).sqrt());
            *center = mean;
        }
        if !changed || shift <= options.tol {
            break;
        }
    }

    let objective = points.iter().zip(&assignment).map(|(p, &j)| sq_dist(p, &centers[j])).sum();
    Ok(KMeansResult { assignment, centers, objective, iterations })
}
