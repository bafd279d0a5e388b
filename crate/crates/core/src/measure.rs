//! Projective measurement in the product basis and seeded sampling.
//!
//! Sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Both the seed expansion and the ChaCha
//! stream are platform independent, so a seed fixes the outcome everywhere.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::state::{Layout, PureState};

/// Outcomes whose probability does not exceed this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// One outcome of a product-basis measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    /// `e`/`g` per measured ion, in target order.
    pub outcome_label: String,
    pub probability: f64,
    /// Renormalized state of the unmeasured subsystems, in ascending order.
    /// When nothing is left this is a one-dimensional state whose single
    /// amplitude keeps the phase of the collapsed amplitude.
    pub post_state: PureState,
}

/// Every outcome of measuring `targets` that has nonzero probability, in
/// ascending order of the outcome bits (first target most significant).
pub fn measure_distribution(s: &PureState, targets: &[usize]) -> Result<Vec<MeasurementRecord>> {
    let layout = s.layout();
    let n = layout.subsystems();
    let k = targets.len();
    let mut mask = 0usize;
    for &t in targets {
        if t >= n {
            return Err(Error::TargetOutOfRange {
                target: t,
                count: n,
            });
        }
        let bit = 1 << (n - 1 - t);
        if mask & bit != 0 {
            return Err(Error::DuplicateTarget(t));
        }
        mask |= bit;
    }
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let post_layout = layout.with_subsystems(rest.len());

    let mut records = Vec::new();
    for outcome in 0..1usize << k {
        let fixed = targets.iter().enumerate().fold(0usize, |acc, (pos, &t)| {
            if (outcome >> (k - 1 - pos)) & 1 == 1 {
                acc | 1 << (n - 1 - t)
            } else {
                acc
            }
        });
        let branch = DVector::from_iterator(
            1 << rest.len(),
            (0..1usize << rest.len()).map(|r| {
                let full = rest.iter().enumerate().fold(fixed, |acc, (pos, &q)| {
                    if (r >> (rest.len() - 1 - pos)) & 1 == 1 {
                        acc | 1 << (n - 1 - q)
                    } else {
                        acc
                    }
                });
                s.amplitude(full)
            }),
        );
        let probability = branch.norm_squared();
        if probability <= ZERO_PROBABILITY {
            continue;
        }
        let outcome_label = targets
            .iter()
            .enumerate()
            .map(|(pos, _)| layout.subsystem_label((outcome >> (k - 1 - pos)) & 1))
            .collect();
        records.push(MeasurementRecord {
            outcome_label,
            probability,
            post_state: PureState::normalized(branch, post_layout)?,
        });
    }
    Ok(records)
}

/// Draws one record with probability proportional to its Born weight.
pub fn sample_outcome(distribution: &[MeasurementRecord], seed: u64) -> Result<MeasurementRecord> {
    let total: f64 = distribution.iter().map(|r| r.probability).sum();
    let last = distribution.last().ok_or(Error::EmptyDistribution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for record in distribution {
        acc += record.probability;
        if u < acc {
            return Ok(record.clone());
        }
    }
    Ok(last.clone())
}

/// Global phase of a one-dimensional post-measurement state.
pub fn residual_phase(post_state: &PureState) -> Option<Complex64> {
    (post_state.layout() == Layout::logical(0) || post_state.layout() == Layout::physical(0))
        .then(|| post_state.amplitude(0))
}
