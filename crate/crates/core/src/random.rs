//! Seeded, portable random inputs for experiments and tests.
//!
//! The generator is SplitMix64: a 64-bit counter advanced by the odd constant
//! `0x9e3779b97f4a7c15` and pushed through a fixed avalanche finalizer
//! (Steele, Lea, Flood 2014). It is specified entirely in terms of `u64`
//! arithmetic, so identical seeds give bitwise-identical streams on every
//! platform. No platform RNG is involved anywhere in the crate.

use crate::geometry::Projector;
use crate::matrix::{Matrix, SymmetricMatrix};
use crate::scalar::{real, Real};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random mantissa bits.
    pub fn next_unit<T: Real>(&mut self) -> T {
        let bits = self.next_u64() >> 11;
        real::<T>(bits as f64 * (1.0 / (1u64 << 53) as f64))
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed<T: Real>(&mut self) -> T {
        let u: T = self.next_unit();
        u + u - T::one()
    }

    /// Standard normal via Box-Muller.
    pub fn next_normal<T: Real>(&mut self) -> T {
        let u1: T = self.next_unit();
        let u2: T = self.next_unit();
        // 1 - u1 lies in (0, 1], keeping the log finite
        let r = (-(T::one() - u1).ln() * real::<T>(2.0)).sqrt();
        r * (real::<T>(2.0) * T::PI() * u2).cos()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn next_usize(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as usize
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

/// Per-trial seed derivation: finalize the master seed and the trial index
/// separately, then finalize their XOR. Trials can therefore be generated in
/// any order (or concurrently) with identical results.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(GAMMA)))
}

/// Dense matrix with entries uniform in `[-1, 1)`.
pub fn random_matrix<T: Real>(rows: usize, cols: usize, seed: u64) -> Matrix<T> {
    let mut rng = SplitMix64::new(seed);
    Matrix::from_fn(rows, cols, |_, _| rng.next_signed())
}

/// Symmetric matrix with entries uniform in `[-1, 1)`; the two triangles are
/// mirrored from a single draw, so the symmetry residual is exactly zero.
pub fn random_symmetric<T: Real>(dim: usize, seed: u64) -> SymmetricMatrix<T> {
    let mut rng = SplitMix64::new(seed);
    SymmetricMatrix::from_fn(dim, |_, _| rng.next_signed())
}

/// Orthonormal `dim x rank` frame: standard-normal columns orthonormalized
/// by modified Gram-Schmidt with one re-orthogonalization pass.
pub fn random_orthonormal<T: Real>(dim: usize, rank: usize, seed: u64) -> Matrix<T> {
    assert!(rank <= dim, "rank must not exceed dimension");
    let mut rng = SplitMix64::new(seed);
    loop {
        let raw = Matrix::from_fn(dim, rank, |_, _| rng.next_normal());
        if let Some(q) = gram_schmidt(&raw) {
            return q;
        }
        // rank-deficient draw (probability ~0): try the next block of draws
    }
}

fn gram_schmidt<T: Real>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let (dim, rank) = (m.rows(), m.cols());
    let mut cols: Vec<Vec<T>> = (0..rank).map(|j| m.column(j)).collect();
    for j in 0..rank {
        for _pass in 0..2 {
            for k in 0..j {
                let dot = dot(&cols[j], &cols[k]);
                for i in 0..dim {
                    cols[j][i] = cols[j][i] - dot * cols[k][i];
                }
            }
        }
        let norm = dot(&cols[j], &cols[j]).sqrt();
        if norm < real::<T>(1e-8) {
            return None;
        }
        for i in 0..dim {
            cols[j][i] /= norm;
        }
    }
    Some(Matrix::from_columns(&cols))
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x * y)
        .fold(T::zero(), |s, v| s + v)
}

/// Random orthogonal projector of the given rank.
pub fn random_projector<T: Real>(dim: usize, rank: usize, seed: u64) -> Projector<T> {
    let basis = random_orthonormal(dim, rank, seed);
    Projector::from_basis(basis).expect("orthonormal by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a: SymmetricMatrix<f64> = random_symmetric(8, 31337);
        let b: SymmetricMatrix<f64> = random_symmetric(8, 31337);
        assert_eq!(a.matrix(), b.matrix());
        let c: SymmetricMatrix<f64> = random_symmetric(8, 31338);
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn single_entry_reproducible() {
        let a: SymmetricMatrix<f64> = random_symmetric(1, 5);
        let b: SymmetricMatrix<f64> = random_symmetric(1, 5);
        assert_eq!(a.get(0, 0), b.get(0, 0));
    }

    #[test]
    fn symmetry_residual_exactly_zero() {
        let m: SymmetricMatrix<f64> = random_symmetric(8, 2024);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let s0 = derive_seed(77, 0);
        let s1 = derive_seed(77, 1);
        assert_ne!(s0, s1);
        assert_eq!(s0, derive_seed(77, 0));
    }

    #[test]
    fn orthonormal_frames() {
        let q: Matrix<f64> = random_orthonormal(7, 3, 99);
        let g = q.transpose().matmul(&q);
        assert!(g.sub(&Matrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn normals_have_plausible_moments() {
        let mut rng = SplitMix64::new(4242);
        let n = 20_000;
        let mut sum = 0.0_f64;
        let mut sumsq = 0.0_f64;
        for _ in 0..n {
            let z: f64 = rng.next_normal();
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }
}
