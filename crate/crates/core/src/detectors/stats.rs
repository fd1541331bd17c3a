//! Two-sample statistics used by the windowed detectors: the
//! Kolmogorov–Smirnov test for scalar streams and the kernel maximum mean
//! discrepancy for multivariate latents.

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    /// Supremum distance between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic p-value, clamped to `[1e-16, 1]`.
    pub p_value: f64,
}

/// Smallest p-value the asymptotic approximation will report.  Keeps
/// `log(1 + 1/p)` finite for downstream scores.
pub const P_VALUE_FLOOR: f64 = 1e-16;

/// Two-sample Kolmogorov–Smirnov test.
///
/// The statistic is the exact sup-distance between the empirical CDFs
/// (ties handled by evaluating only after consuming every copy of a value);
/// the p-value uses the asymptotic Kolmogorov distribution with the standard
/// small-sample correction `λ = (√n_eff + 0.12 + 0.11/√n_eff)·D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::config(format!(
            "Kolmogorov-Smirnov test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::config(
            "Kolmogorov-Smirnov samples must be finite".to_string(),
        ));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite"));
    sb.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite"));

    let (n_a, n_b) = (sa.len(), sb.len());
    let mut statistic = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n_a || j < n_b {
        let value = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!("loop condition"),
        };
        while i < n_a && sa[i] == value {
            i += 1;
        }
        while j < n_b && sb[j] == value {
            j += 1;
        }
        let diff = (i as f64 / n_a as f64 - j as f64 / n_b as f64).abs();
        statistic = statistic.max(diff);
    }

    let n_eff = (n_a * n_b) as f64 / (n_a + n_b) as f64;
    let lambda = (n_eff.sqrt() + 0.12 + 0.11 / n_eff.sqrt()) * statistic;
    Ok(KsTest {
        statistic,
        p_value: kolmogorov_survival(lambda),
    })
}

/// Asymptotic survival function `Q(λ) = 2·Σ_{j≥1} (−1)^{j−1} e^{−2 j² λ²}`,
/// truncated once terms drop below 1e-12 and clamped to `[1e-16, 1]`.
fn kolmogorov_survival(lambda: f64) -> f64 {
    // Below this point the survival probability is 1 to far beyond f64
    // precision, and the alternating series converges too slowly to sum.
    if lambda < 0.1 {
        return 1.0;
    }
    let mut sum = 0.0f64;
    let mut sign = 1.0f64;
    for j in 1..=256u32 {
        let term = (-2.0 * (j as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(P_VALUE_FLOOR, 1.0)
}

/// Biased (V-statistic) squared maximum mean discrepancy with an RBF kernel
/// `κ(u,v) = exp(−‖u−v‖² / (2·bandwidth²))`, floored at 0.
pub fn mmd(x: ArrayView2<f64>, y: ArrayView2<f64>, bandwidth: f64) -> Result<f64> {
    if x.nrows() == 0 || y.nrows() == 0 {
        return Err(Error::config(
            "maximum mean discrepancy needs at least one point per sample".to_string(),
        ));
    }
    if x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x.ncols(),
            got: y.ncols(),
            context: "MMD sample dimensions",
        });
    }
    if !bandwidth.is_finite() || bandwidth <= 0.0 {
        return Err(Error::config(format!(
            "MMD bandwidth must be positive and finite, got {bandwidth}"
        )));
    }
    let k_xx = mean_kernel(x, x, bandwidth);
    let k_yy = mean_kernel(y, y, bandwidth);
    let k_xy = mean_kernel(x, y, bandwidth);
    Ok((k_xx - 2.0 * k_xy + k_yy).max(0.0))
}

fn mean_kernel(a: ArrayView2<f64>, b: ArrayView2<f64>, bandwidth: f64) -> f64 {
    let scale = -0.5 / (bandwidth * bandwidth);
    let mut total = 0.0;
    for u in a.rows() {
        for v in b.rows() {
            let sq: f64 = u
                .iter()
                .zip(v.iter())
                .map(|(p, q)| (p - q) * (p - q))
                .sum();
            total += (scale * sq).exp();
        }
    }
    total / (a.nrows() * b.nrows()) as f64
}

/// Median Euclidean distance over all point pairs; 0 when fewer than two
/// points.  The usual bandwidth heuristic for RBF kernels.
pub fn median_pairwise_distance(points: ArrayView2<f64>) -> f64 {
    let n = points.nrows();
    if n < 2 {
        return 0.0;
    }
    let mut distances = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let sq: f64 = points
                .row(i)
                .iter()
                .zip(points.row(j).iter())
                .map(|(p, q)| (p - q) * (p - q))
                .sum();
            distances.push(sq.sqrt());
        }
    }
    distances.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite distances"));
    let mid = distances.len() / 2;
    if distances.len() % 2 == 1 {
        distances[mid]
    } else {
        0.5 * (distances[mid - 1] + distances[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{arr2, Array2};
    use rand::Rng;

    #[test]
    fn identical_samples_have_zero_distance_and_full_p() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let result = ks_two_sample(&a, &a).unwrap();
        assert_eq!(result.statistic, 0.0);
        assert_eq!(result.p_value, 1.0);
    }

    #[test]
    fn disjoint_samples_have_distance_one_and_tiny_p() {
        let a: Vec<f64> = (0..50).map(|v| v as f64).collect();
        let b: Vec<f64> = (0..50).map(|v| 1000.0 + v as f64).collect();
        let result = ks_two_sample(&a, &b).unwrap();
        assert_eq!(result.statistic, 1.0);
        assert!(result.p_value < 1e-10);
    }

    #[test]
    fn statistic_matches_hand_ecdf_walk() {
        let result = ks_two_sample(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(result.statistic, 1.0 / 3.0);
    }

    #[test]
    fn asymptotic_p_tracks_an_exhaustive_permutation_test() {
        // All 20 ways to split the pooled six values into two triples.
        let pooled = [1.0, 2.0, 3.0, 2.0, 3.0, 4.0];
        let observed = ks_two_sample(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        let mut at_least_as_extreme = 0usize;
        let mut total = 0usize;
        for selector in 0u32..64 {
            if selector.count_ones() != 3 {
                continue;
            }
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (idx, &value) in pooled.iter().enumerate() {
                if selector & (1 << idx) != 0 {
                    left.push(value);
                } else {
                    right.push(value);
                }
            }
            let d = ks_two_sample(&left, &right).unwrap().statistic;
            if d >= observed.statistic - 1e-12 {
                at_least_as_extreme += 1;
            }
            total += 1;
        }
        assert_eq!(total, 20);
        let exact_p = at_least_as_extreme as f64 / total as f64;
        assert!(
            (observed.p_value - exact_p).abs() < 0.15,
            "asymptotic {} vs exact {exact_p}",
            observed.p_value
        );
    }

    #[test]
    fn tied_values_are_consumed_together() {
        // Interleaved ties: evaluating mid-tie would overestimate the sup.
        let a = [1.0, 1.0];
        let b = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        let result = ks_two_sample(&a, &b).unwrap();
        assert_relative_eq!(result.statistic, 0.5);
    }

    #[test]
    fn undersized_samples_are_rejected() {
        assert!(ks_two_sample(&[1.0], &[1.0, 2.0]).is_err());
        assert!(ks_two_sample(&[1.0, 2.0], &[]).is_err());
        assert!(ks_two_sample(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mmd_of_identical_sets_is_zero() {
        let x = arr2(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]);
        let value = mmd(x.view(), x.view(), 1.0).unwrap();
        assert!(value.abs() < 1e-12);
    }

    #[test]
    fn mmd_symmetry() {
        let x = arr2(&[[1.0, 2.0], [3.0, 4.0], [0.5, 0.1]]);
        let y = arr2(&[[2.0, 2.0], [0.0, 1.0]]);
        let forward = mmd(x.view(), y.view(), 0.7).unwrap();
        let backward = mmd(y.view(), x.view(), 0.7).unwrap();
        assert_relative_eq!(forward, backward, max_relative = 1e-12);
    }

    #[test]
    fn mmd_saturates_for_far_separated_samples() {
        let x = Array2::zeros((10, 1));
        let y = Array2::from_elem((10, 1), 1000.0);
        let value = mmd(x.view(), y.view(), 1.0).unwrap();
        assert!(value > 1.9, "separated samples should approach 2, got {value}");
    }

    #[test]
    fn mmd_matches_a_double_loop_oracle() {
        let mut rng = crate::rng::substream(99, crate::rng::StreamKind::Detector, &[1]);
        let x = Array2::from_shape_fn((20, 3), |_| rng.gen_range(-1.0..1.0));
        let y = Array2::from_shape_fn((20, 3), |_| rng.gen_range(-1.0..1.0));
        let bandwidth = 0.8;
        let fast = mmd(x.view(), y.view(), bandwidth).unwrap();

        // Deliberately naive re-derivation: explicit kernel sums.
        let kernel = |u: &[f64], v: &[f64]| {
            let sq: f64 = u.iter().zip(v).map(|(p, q)| (p - q) * (p - q)).sum();
            (-sq / (2.0 * bandwidth * bandwidth)).exp()
        };
        let rows = |m: &Array2<f64>| -> Vec<Vec<f64>> {
            m.rows().into_iter().map(|r| r.to_vec()).collect()
        };
        let (xr, yr) = (rows(&x), rows(&y));
        let mut xx = 0.0;
        let mut yy = 0.0;
        let mut xy = 0.0;
        for u in &xr {
            for v in &xr {
                xx += kernel(u, v);
            }
            for v in &yr {
                xy += kernel(u, v);
            }
        }
        for u in &yr {
            for v in &yr {
                yy += kernel(u, v);
            }
        }
        let slow = xx / (xr.len() * xr.len()) as f64 - 2.0 * xy / (xr.len() * yr.len()) as f64
            + yy / (yr.len() * yr.len()) as f64;
        assert_relative_eq!(fast, slow.max(0.0), max_relative = 1e-10);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let x = Array2::<f64>::zeros((3, 2));
        let y = Array2::<f64>::zeros((3, 3));
        assert!(matches!(
            mmd(x.view(), y.view(), 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(mmd(x.view(), x.view(), 0.0).is_err());
    }

    #[test]
    fn median_distance_handles_odd_even_and_degenerate_inputs() {
        let three = arr2(&[[0.0], [1.0], [3.0]]); // pairwise distances 1, 2, 3
        assert_relative_eq!(median_pairwise_distance(three.view()), 2.0);
        let two = arr2(&[[0.0], [4.0]]);
        assert_relative_eq!(median_pairwise_distance(two.view()), 4.0);
        let one = arr2(&[[0.0]]);
        assert_eq!(median_pairwise_distance(one.view()), 0.0);
    }
}
