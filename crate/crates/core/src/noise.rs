//! Dephasing channels on physical ions.
//!
//! A dephasing event multiplies the `|e⟩` component of an ion by `e^{iφ}`.
//! Under collective dephasing every ion sees the same `φ`, so any state in
//! which each pair holds exactly one excitation only picks up a global
//! phase. Independent dephasing gives each ion its own `φⱼ`.
//!
//! Ensemble averages draw `φ ~ N(0, σ²)`. Samples are split into chunks of
//! [`CHUNK_SIZE`]; chunk `k` uses `ChaCha8Rng::seed_from_u64(seed)` with its
//! stream set to `k`. Chunk sums are combined in chunk order, so the result
//! is bit-identical regardless of how many threads run the chunks.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::{embed_logical_to_physical, fidelity, Layout, PureState};

pub const CHUNK_SIZE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DephaseMode {
    /// One phase shared by all ions.
    Collective,
    /// An independent phase per ion.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephaseSpec {
    pub mode: DephaseMode,
    /// Standard deviation of the Gaussian phase, radians.
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
}

impl DephaseSpec {
    pub fn new(mode: DephaseMode, sigma: f64, samples: usize, seed: u64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidSpec(format!("sigma must be ≥ 0, got {sigma}")));
        }
        if samples == 0 {
            return Err(Error::InvalidSpec("at least one sample is required".into()));
        }
        Ok(Self {
            mode,
            sigma,
            samples,
            seed,
        })
    }
}

fn require_physical(s: &PureState) -> Result<usize> {
    match s.layout() {
        Layout::Physical { ions } => Ok(ions),
        Layout::Logical { .. } => Err(Error::LayoutMismatch(
            "dephasing acts on physical ions; embed the logical state first".into(),
        )),
    }
}

/// Same phase `φ` on the `|e⟩` component of every ion.
pub fn collective_dephase(s: &PureState, phi: f64) -> Result<PureState> {
    let ions = require_physical(s)?;
    independent_dephase(s, &vec![phi; ions])
}

/// Phase `phis[j]` on the `|e⟩` component of ion `j`.
pub fn independent_dephase(s: &PureState, phis: &[f64]) -> Result<PureState> {
    let ions = require_physical(s)?;
    if phis.len() != ions {
        return Err(Error::LengthMismatch {
            expected: ions,
            found: phis.len(),
        });
    }
    if phis.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("dephasing phase"));
    }
    let amplitudes = DVector::from_iterator(
        s.dim(),
        s.amplitudes().iter().enumerate().map(|(index, a)| {
            // |e⟩ is bit value 0
            let phase: f64 = (0..ions)
                .filter(|&j| (index >> (ions - 1 - j)) & 1 == 0)
                .map(|j| phis[j])
                .sum();
            a * Complex64::from_polar(1.0, phase)
        }),
    );
    PureState::new(amplitudes, s.layout())
}

/// Sample mean of the fidelity and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    /// `None` for a single sample.
    pub std_error: Option<f64>,
    pub samples: usize,
}

/// Average of `|⟨s|D(φ)|s⟩|²` over Gaussian phases.
pub fn ensemble_fidelity(s: &PureState, spec: &DephaseSpec) -> Result<EnsembleStats> {
    let ions = require_physical(s)?;
    if spec.sigma == 0.0 {
        // every draw is φ = 0, the identity channel
        return Ok(EnsembleStats {
            mean: 1.0,
            std_error: (spec.samples > 1).then_some(0.0),
            samples: spec.samples,
        });
    }
    let normal = Normal::new(0.0, spec.sigma)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let chunks = spec.samples.div_ceil(CHUNK_SIZE);
    // per chunk: (count, mean, sum of squared deviations), Welford style
    let partials: Vec<Result<(f64, f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(chunk as u64);
            let count = CHUNK_SIZE.min(spec.samples - chunk * CHUNK_SIZE);
            let (mut mean, mut m2) = (0.0, 0.0);
            let mut phis = vec![0.0; ions];
            for k in 0..count {
                let noisy = match spec.mode {
                    DephaseMode::Collective => collective_dephase(s, normal.sample(&mut rng))?,
                    DephaseMode::Independent => {
                        phis.iter_mut().for_each(|p| *p = normal.sample(&mut rng));
                        independent_dephase(s, &phis)?
                    }
                };
                let f = fidelity(s, &noisy)?;
                let delta = f - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (f - mean);
            }
            Ok((count as f64, mean, m2))
        })
        .collect();
    // pairwise merge in chunk order
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for partial in partials {
        let (nb, mb, m2b) = partial?;
        let total = n + nb;
        let delta = mb - mean;
        mean += delta * nb / total;
        m2 += m2b + delta * delta * n * nb / total;
        n = total;
    }
    let std_error = (spec.samples > 1).then(|| (m2 / (n - 1.0) / n).sqrt());
    Ok(EnsembleStats {
        mean,
        std_error,
        samples: spec.samples,
    })
}

/// `(1 + e^{−σ²/2})/2`, the exact Gaussian average of `cos²(φ/2)`.
pub fn bare_mean_fidelity(sigma: f64) -> f64 {
    0.5 * (1.0 + (-0.5 * sigma * sigma).exp())
}

/// `(|e⟩ + |g⟩)/√2` on one unencoded ion.
pub fn bare_superposition() -> PureState {
    PureState::from_slice(&[Complex64::new(1.0, 0.0); 2], Layout::physical(1)).expect("nonzero")
}

/// `(|eg⟩ + e^{iθ}|ge⟩)/√2` on one ion pair.
pub fn dfs_pair_state(theta: f64) -> Result<PureState> {
    let logical = PureState::from_slice(
        &[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)],
        Layout::logical(1),
    )?;
    embed_logical_to_physical(&logical)
}
