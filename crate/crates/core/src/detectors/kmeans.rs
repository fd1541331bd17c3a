//! Plain k-means with k-means++ seeding, used to turn a curve collection
//! into distance-to-nearest-centroid novelty scores.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};

const MAX_LLOYD_ITERATIONS: usize = 100;

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Fit `n_clusters` centroids to the rows of `data`.
///
/// Seeding is k-means++ (squared-distance weighted); refinement is Lloyd's
/// algorithm, run until assignments stop changing or 100 iterations.  A
/// cluster left empty by a reassignment keeps its previous centroid.
pub fn kmeans_fit<R: Rng>(
    data: ArrayView2<f64>,
    n_clusters: usize,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let (rows, cols) = data.dim();
    if n_clusters == 0 {
        return Err(Error::config("cluster count must be at least 1"));
    }
    if n_clusters > rows {
        return Err(Error::config(format!(
            "cannot fit {n_clusters} clusters to {rows} observations"
        )));
    }

    let mut centers = Array2::<f64>::zeros((n_clusters, cols));
    let first = rng.gen_range(0..rows);
    centers.row_mut(0).assign(&data.row(first));
    let mut nearest_sq = vec![f64::INFINITY; rows];
    for c in 1..n_clusters {
        for (i, slot) in nearest_sq.iter_mut().enumerate() {
            let d = squared_distance(data.row(i), centers.row(c - 1));
            if d < *slot {
                *slot = d;
            }
        }
        let choice = match WeightedIndex::new(&nearest_sq) {
            Ok(weighted) => weighted.sample(rng),
            // All remaining points coincide with chosen centroids; any
            // point works, so fall back to a uniform draw.
            Err(_) => rng.gen_range(0..rows),
        };
        centers.row_mut(c).assign(&data.row(choice));
    }

    let mut assignment = vec![usize::MAX; rows];
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        for (i, slot) in assignment.iter_mut().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for c in 0..n_clusters {
                let d = squared_distance(data.row(i), centers.row(c));
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if *slot != best {
                *slot = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = Array2::<f64>::zeros((n_clusters, cols));
        let mut counts = vec![0usize; n_clusters];
        for (i, &c) in assignment.iter().enumerate() {
            counts[c] += 1;
            let mut row = sums.row_mut(c);
            row += &data.row(i);
        }
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                let mut row = centers.row_mut(c);
                row.assign(&sums.row(c));
                row /= count as f64;
            }
        }
    }
    Ok(centers)
}

/// Euclidean distance from each row of `data` to its nearest centroid.
pub fn kmeans_score(data: ArrayView2<f64>, centers: ArrayView2<f64>) -> Result<Vec<f64>> {
    if data.ncols() != centers.ncols() {
        return Err(Error::DimensionMismatch {
            expected: centers.ncols(),
            got: data.ncols(),
            context: "centroid dimensionality",
        });
    }
    if centers.nrows() == 0 {
        return Err(Error::config("no centroids to score against"));
    }
    Ok((0..data.nrows())
        .map(|i| {
            (0..centers.nrows())
                .map(|c| squared_distance(data.row(i), centers.row(c)))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect())
}
