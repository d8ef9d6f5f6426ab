//! Finite truncation of the N-dimensional isotropic harmonic oscillator with
//! its parity partition.
//!
//! The truncated diagonal operator is treated as an exact finite-dimensional
//! instance: eigenvalue `n + N/2` with multiplicity `binomial(N + n - 1, n)`
//! for levels `n = 0 ..= n_max`, even-parity eigenvectors at even `n`. The
//! parity classes are separated by a gap of exactly 1.

use crate::error::{Error, Result};
use crate::lab::{analyze_full, AnalysisRecord, PerturbationProblem};
use crate::matrix::SymmetricMatrix;
use crate::random::random_symmetric;
use crate::scalar::{real, scaled_tol, Real};
use crate::spectral::SpectralSet;

const DIMENSION_CAP: usize = 2000;

/// Multiplicity of level `n`: `binomial(N + n - 1, n)`.
pub fn multiplicity(n_dims: usize, n: usize) -> usize {
    let mut value: u128 = 1;
    for i in 1..=n as u128 {
        value = value * (n_dims as u128 - 1 + i) / i;
    }
    value as usize
}

/// Truncated oscillator model.
#[derive(Debug, Clone)]
pub struct OscillatorModel<T> {
    pub n_dims: usize,
    pub n_max: usize,
    /// Diagonal operator with entries `n + N/2`, ascending.
    pub matrix: SymmetricMatrix<T>,
    /// Level of each basis vector.
    pub levels: Vec<usize>,
    /// Multi-index (composition of the level into `N` parts) of each basis
    /// vector, enumerated by level then lexicographically.
    pub multi_indices: Vec<Vec<u32>>,
    /// Point set of the even-parity eigenvalues.
    pub sigma_even: SpectralSet<T>,
}

impl<T: Real> OscillatorModel<T> {
    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn is_even(&self, basis_index: usize) -> bool {
        self.levels[basis_index].is_multiple_of(2)
    }

    pub fn eigenvalue(&self, level: usize) -> T {
        real::<T>(level as f64 + self.n_dims as f64 / 2.0)
    }

    /// Zeroes the blocks of `v` coupling the two parity classes.
    pub fn parity_preserving(&self, v: &SymmetricMatrix<T>) -> SymmetricMatrix<T> {
        SymmetricMatrix::from_fn(self.dim(), |i, j| {
            if self.is_even(i) == self.is_even(j) {
                v.get(i, j)
            } else {
                T::zero()
            }
        })
    }
}

/// Builds the truncated model; the total dimension is capped at 2000.
pub fn build_oscillator<T: Real>(n_dims: usize, n_max: usize) -> Result<OscillatorModel<T>> {
    if n_dims < 1 || n_max < 1 {
        return Err(Error::Validation(
            "need at least one dimension and one excited level".into(),
        ));
    }
    let mut total = 0usize;
    for n in 0..=n_max {
        total += multiplicity(n_dims, n);
        if total > DIMENSION_CAP {
            return Err(Error::SizeExceeded {
                dim: total,
                cap: DIMENSION_CAP,
            });
        }
    }

    let mut levels = Vec::with_capacity(total);
    let mut multi_indices = Vec::with_capacity(total);
    let mut diag = Vec::with_capacity(total);
    for n in 0..=n_max {
        let compositions = compositions_lex(n_dims, n);
        debug_assert_eq!(compositions.len(), multiplicity(n_dims, n));
        for idx in compositions {
            levels.push(n);
            multi_indices.push(idx);
            diag.push(real::<T>(n as f64 + n_dims as f64 / 2.0));
        }
    }
    let even_points: Vec<T> = (0..=n_max)
        .filter(|n| n % 2 == 0)
        .map(|n| real::<T>(n as f64 + n_dims as f64 / 2.0))
        .collect();
    Ok(OscillatorModel {
        n_dims,
        n_max,
        matrix: SymmetricMatrix::diagonal(&diag),
        levels,
        multi_indices,
        sigma_even: SpectralSet::from_points(&even_points)?,
    })
}

/// All compositions of `total` into `parts` nonnegative integers, in
/// lexicographic order.
fn compositions_lex(parts: usize, total: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fill(&mut out, &mut current, 0, total as u32);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        fill(out, current, pos + 1, remaining - v);
    }
}

/// Per-level localization of the perturbed spectrum.
#[derive(Debug, Clone)]
pub struct LocalizationReport<T> {
    /// `(level, expected multiplicity, eigenvalues of L found in the
    /// closed ||V||-neighborhood of the level)`
    pub per_level: Vec<(usize, usize, usize)>,
    /// Every eigenvalue of `L` lies within `||V||` of the unperturbed
    /// spectrum.
    pub all_localized: bool,
    /// Every neighborhood contains exactly the unperturbed multiplicity.
    pub counts_ok: bool,
    pub tolerance: T,
}

/// Outcome of one oscillator experiment.
#[derive(Debug, Clone)]
pub struct OscillatorExperiment<T> {
    pub record: AnalysisRecord<T>,
    /// Maximal angle between the complementary (odd-parity side) subspaces.
    pub complement_theta: T,
    /// Complement equality `theta(A^perp, L^perp) = theta(A, L)`.
    pub complement_matches: bool,
    pub localization: LocalizationReport<T>,
}

/// Runs the parity-partition experiment: a seeded symmetric perturbation of
/// norm `vnorm` applied to the truncated oscillator, analyzed against the
/// even-parity component (gap `d = 1`).
pub fn oscillator_experiment<T: Real>(
    n_dims: usize,
    n_max: usize,
    vnorm: T,
    seed: u64,
) -> Result<OscillatorExperiment<T>> {
    let model = build_oscillator::<T>(n_dims, n_max)?;
    let v = scaled_perturbation(&model, vnorm, seed)?;
    oscillator_experiment_with(&model, v)
}

/// Seeded perturbation scaled to spectral norm `vnorm` on the model space.
pub fn scaled_perturbation<T: Real>(
    model: &OscillatorModel<T>,
    vnorm: T,
    seed: u64,
) -> Result<SymmetricMatrix<T>> {
    let half = real::<T>(0.5);
    if vnorm < T::zero() || !(vnorm < half) {
        return Err(Error::PerturbationTooLarge {
            vnorm: crate::scalar::to_f64(vnorm),
            limit: 0.5,
        });
    }
    if vnorm == T::zero() {
        return Ok(SymmetricMatrix::zeros(model.dim()));
    }
    let raw = random_symmetric::<T>(model.dim(), seed);
    Ok(raw.scaled(vnorm / raw.spectral_norm()))
}

/// Runs the experiment with an explicit perturbation (must have norm < 1/2).
pub fn oscillator_experiment_with<T: Real>(
    model: &OscillatorModel<T>,
    v: SymmetricMatrix<T>,
) -> Result<OscillatorExperiment<T>> {
    let problem = PerturbationProblem::new(model.matrix.clone(), model.sigma_even.clone(), v)?;
    let analysis = analyze_full(&problem)?;
    let localization = localization_report(model, &problem)?;

    // complement equality at the norm level
    let pc = analysis.unperturbed.complement()?;
    let qc = analysis.perturbed.complement()?;
    let complement_theta = crate::geometry::maximal_angle(&pc, &qc)?;
    let complement_matches =
        (complement_theta - analysis.record.theta).abs() < scaled_tol::<T>(1e-12);

    Ok(OscillatorExperiment {
        record: analysis.record,
        complement_theta,
        complement_matches,
        localization,
    })
}

fn localization_report<T: Real>(
    model: &OscillatorModel<T>,
    problem: &PerturbationProblem<T>,
) -> Result<LocalizationReport<T>> {
    let l_eig = problem.l.eigen()?;
    let tol = scaled_tol::<T>(1e-9) * (T::one() + problem.a.spectral_norm() + problem.vnorm);
    let window = problem.vnorm + tol;

    let mut per_level = Vec::with_capacity(model.n_max + 1);
    for n in 0..=model.n_max {
        let center = model.eigenvalue(n);
        let count = l_eig
            .eigenvalues
            .iter()
            .filter(|&&ev| (ev - center).abs() <= window)
            .count();
        per_level.push((n, multiplicity(model.n_dims, n), count));
    }
    let all_localized = l_eig
        .eigenvalues
        .iter()
        .all(|&ev| (0..=model.n_max).any(|n| (ev - model.eigenvalue(n)).abs() <= window));
    let counts_ok = per_level.iter().all(|&(_, expect, got)| expect == got);
    Ok(LocalizationReport {
        per_level,
        all_localized,
        counts_ok,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities_match_binomials() {
        // N = 1: all levels simple
        for n in 0..6 {
            assert_eq!(multiplicity(1, n), 1);
        }
        // N = 2: 1, 2, 3, ...
        assert_eq!(multiplicity(2, 0), 1);
        assert_eq!(multiplicity(2, 1), 2);
        assert_eq!(multiplicity(2, 2), 3);
        // N = 3: 1, 3, 6
        assert_eq!(multiplicity(3, 0), 1);
        assert_eq!(multiplicity(3, 1), 3);
        assert_eq!(multiplicity(3, 2), 6);
    }

    #[test]
    fn one_dimensional_truncation() {
        let m = build_oscillator::<f64>(1, 3).unwrap();
        assert_eq!(m.dim(), 4);
        let expect = [0.5, 1.5, 2.5, 3.5];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(m.matrix.get(i, i), e);
        }
        assert_eq!(m.levels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_dimensional_truncation() {
        let m = build_oscillator::<f64>(2, 2).unwrap();
        assert_eq!(m.dim(), 6);
        let mut counts = std::collections::BTreeMap::new();
        for i in 0..m.dim() {
            *counts.entry(m.levels[i]).or_insert(0usize) += 1;
        }
        assert_eq!(counts[&0], 1);
        assert_eq!(counts[&1], 2);
        assert_eq!(counts[&2], 3);
        // eigenvalues n + 1 for N = 2
        assert_eq!(m.matrix.get(0, 0), 1.0);
        assert_eq!(m.matrix.get(5, 5), 3.0);
    }

    #[test]
    fn multi_index_bookkeeping() {
        let m = build_oscillator::<f64>(3, 2).unwrap();
        // level 1 compositions of 1 into 3 parts, lexicographic
        let level1: Vec<_> = (0..m.dim())
            .filter(|&i| m.levels[i] == 1)
            .map(|i| m.multi_indices[i].clone())
            .collect();
        assert_eq!(level1, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn dimension_cap_enforced() {
        assert!(matches!(
            build_oscillator::<f64>(3, 50),
            Err(Error::SizeExceeded { .. })
        ));
    }

    #[test]
    fn zero_perturbation_gives_zero_angle() {
        let exp = oscillator_experiment::<f64>(1, 6, 0.0, 1).unwrap();
        assert_eq!(exp.record.theta, 0.0);
        assert!(exp.complement_matches);
        assert!(exp.localization.counts_ok && exp.localization.all_localized);
    }

    #[test]
    fn perturbation_norm_rejected_at_half() {
        assert!(matches!(
            oscillator_experiment::<f64>(1, 6, 0.5, 1),
            Err(Error::PerturbationTooLarge { .. })
        ));
    }

    #[test]
    fn parity_gap_is_one() {
        let m = build_oscillator::<f64>(2, 4).unwrap();
        let p = PerturbationProblem::new(
            m.matrix.clone(),
            m.sigma_even.clone(),
            SymmetricMatrix::zeros(m.dim()),
        )
        .unwrap();
        assert_eq!(p.d, 1.0);
    }

    #[test]
    fn parity_preserving_perturbation_keeps_subspace() {
        let m = build_oscillator::<f64>(1, 10).unwrap();
        let raw = scaled_perturbation(&m, 0.3, 99).unwrap();
        let v = m.parity_preserving(&raw);
        let exp = oscillator_experiment_with(&m, v).unwrap();
        assert!(
            exp.record.theta < 1e-10,
            "parity-preserving theta = {}",
            exp.record.theta
        );
    }
}
