//! Shared fixtures for the criterion benchmarks: small generated datasets
//! and synthetic score series with known drift segments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use driftlab_core::{generate, preset, GroundTruth, ProcessCurveDataset, ScoreSeries};

/// The single-drift preset at a twentieth of its full size (`T` = 500).
pub fn small_dataset() -> ProcessCurveDataset {
    let spec = preset("dataset-1", 0.05, 7).expect("known preset");
    generate(&spec).expect("preset generates")
}

/// A ground truth with evenly spaced drift segments plus seeded positive
/// scores, for exercising the threshold sweep at a given length.
pub fn synthetic_scores(executions: usize, segments: usize) -> (GroundTruth, ScoreSeries) {
    let stride = executions / segments;
    let length = (stride / 10).max(1);
    let spans: Vec<(usize, usize)> = (0..segments)
        .map(|i| {
            let start = 1 + i * stride;
            (start, start + length - 1)
        })
        .collect();
    let gt = GroundTruth::new(executions, &spans).expect("segments fit");

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let values: Vec<f64> = (0..executions).map(|_| rng.gen_range(0.01..1.0)).collect();
    (gt, ScoreSeries::new(values).expect("finite scores"))
}
