//! Seeded generation of perturbation problems for certification ensembles.
//!
//! Every trial is a pure function of `(master seed, trial index)`: the
//! per-trial seed comes from [`crate::random::derive_seed`], so trials can be
//! generated independently and in any order with identical results.

use crate::error::{Error, Result};
use crate::lab::PerturbationProblem;
use crate::random::{derive_seed, random_symmetric, SplitMix64};
use crate::scalar::{real, Real};
use crate::spectral::{gap_from_classes, SpectralSet};

/// Ensemble parameters: dimensions are drawn uniformly from `dim_range`
/// (inclusive), the target ratio `x = ||V|| / d` uniformly from `x_range`.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleConfig {
    pub master_seed: u64,
    pub dim_range: (usize, usize),
    pub x_range: (f64, f64),
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim_range.0 < 2 || self.dim_range.0 > self.dim_range.1 {
            return Err(Error::Validation(format!(
                "dimension range {:?} must be ordered with lower end >= 2",
                self.dim_range
            )));
        }
        if !(self.x_range.0 > 0.0 && self.x_range.0 <= self.x_range.1 && self.x_range.1 < 0.5) {
            return Err(Error::Validation(format!(
                "x range {:?} must lie inside (0, 1/2)",
                self.x_range
            )));
        }
        Ok(())
    }
}

/// A generated trial: the problem plus the drawing parameters.
#[derive(Debug, Clone)]
pub struct GeneratedProblem<T> {
    pub problem: PerturbationProblem<T>,
    pub trial_seed: u64,
    pub dim: usize,
    pub target_x: T,
}

/// Generates the trial with the given index. The spectral component is a
/// random proper eigenvalue subset of a random symmetric matrix, covered by
/// closed intervals with margin `d/4`; the perturbation is scaled to
/// `||V|| = x d` exactly. Draws with pathologically small relative gaps are
/// rejected and redrawn deterministically.
pub fn generate_problem<T: Real>(
    config: &EnsembleConfig,
    index: u64,
) -> Result<GeneratedProblem<T>> {
    config.validate()?;
    let trial_seed = derive_seed(config.master_seed, index);
    let mut rng = SplitMix64::new(trial_seed);
    let dim = rng.next_usize(config.dim_range.0, config.dim_range.1);
    let span = config.x_range.1 - config.x_range.0;
    let x: T = real::<T>(config.x_range.0) + real::<T>(span) * rng.next_unit::<T>();

    for _attempt in 0..64 {
        let a = random_symmetric::<T>(dim, rng.next_u64());
        let eig = match a.eigen() {
            Ok(e) => e,
            Err(_) => continue,
        };
        // random nonempty proper subset of the eigenvalue indices
        let mut mask: Vec<bool> = (0..dim).map(|_| rng.next_bool()).collect();
        if mask.iter().all(|&m| m) {
            mask[0] = false;
        }
        if mask.iter().all(|&m| !m) {
            mask[0] = true;
        }
        let d = match gap_from_classes(&eig.eigenvalues, &mask) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let scale = T::one() + a.spectral_norm();
        if d < real::<T>(1e-4) * scale {
            continue;
        }
        let sigma = interval_cover(&eig.eigenvalues, &mask, d / real::<T>(4.0))?;

        let raw = random_symmetric::<T>(dim, rng.next_u64());
        let raw_norm = raw.spectral_norm();
        if raw_norm == T::zero() {
            continue;
        }
        let v = raw.scaled(x * d / raw_norm);
        let problem = PerturbationProblem::new(a, sigma, v)?;
        return Ok(GeneratedProblem {
            problem,
            trial_seed,
            dim,
            target_x: x,
        });
    }
    Err(Error::Internal(format!(
        "no acceptable draw after 64 attempts for trial {index}"
    )))
}

/// Minimal closed-interval cover of the selected eigenvalues: consecutive
/// selected runs merge into one interval, inflated by `margin` on each side.
fn interval_cover<T: Real>(eigenvalues: &[T], mask: &[bool], margin: T) -> Result<SpectralSet<T>> {
    let mut intervals = Vec::new();
    let mut run: Option<(T, T)> = None;
    for (i, &selected) in mask.iter().enumerate() {
        if selected {
            let ev = eigenvalues[i];
            run = match run {
                None => Some((ev, ev)),
                Some((lo, hi)) => Some((lo.min(ev), hi.max(ev))),
            };
        } else if let Some((lo, hi)) = run.take() {
            intervals.push((lo - margin, hi + margin));
        }
    }
    if let Some((lo, hi)) = run {
        intervals.push((lo - margin, hi + margin));
    }
    SpectralSet::new(intervals)
}
