//! Angles and rotations between subspaces: maximal angle, relative angle,
//! angular operator and operator angle, direct rotation, spectral angle.
//!
//! A subspace is carried by its orthogonal [`Projector`]. The angular
//! operator of an acute pair is computed in coordinates adapted to the first
//! subspace: writing the second basis in the frame `(range | complement)` as
//! stacked blocks `(W_top; W_bot)`, the angular operator is
//! `X = W_bot W_top^{-1}`, and the second projector is reconstructed from
//! the graph-representation block formula as a consistency check.

use crate::error::{Error, Result};
use crate::matrix::{
    lu_solve, operator_norm, sym_extreme_eigenvalues, sym_function, EigenDecomposition, Matrix,
    SymmetricMatrix,
};
use crate::scalar::{real, scaled_tol, to_f64, Real};

/// Orthogonal projection together with an orthonormal basis of its range.
#[derive(Debug, Clone)]
pub struct Projector<T> {
    matrix: SymmetricMatrix<T>,
    basis: Matrix<T>,
    rank: usize,
}

impl<T: Real> Projector<T> {
    /// Builds from an orthonormal `dim x rank` basis of the range.
    pub fn from_basis(basis: Matrix<T>) -> Result<Self> {
        let rank = basis.cols();
        let gram = basis.transpose().matmul(&basis);
        let orth_resid = gram.sub(&Matrix::identity(rank)).max_abs();
        if orth_resid > scaled_tol::<T>(1e-10) {
            return Err(Error::Validation(format!(
                "basis not orthonormal: residual {}",
                to_f64(orth_resid)
            )));
        }
        let matrix = projector_matrix(&basis);
        Ok(Projector {
            matrix,
            basis,
            rank,
        })
    }

    /// Builds from a projection matrix; eigenvalues must sit near {0, 1}.
    pub fn from_matrix(matrix: SymmetricMatrix<T>) -> Result<Self> {
        let eig = matrix.eigen()?;
        let tol = scaled_tol::<T>(1e-8);
        let mut selected = Vec::with_capacity(eig.dim());
        for &l in &eig.eigenvalues {
            if (l - T::one()).abs() <= tol {
                selected.push(true);
            } else if l.abs() <= tol {
                selected.push(false);
            } else {
                return Err(Error::Validation(format!(
                    "matrix is not a projection: eigenvalue {} away from {{0, 1}}",
                    to_f64(l)
                )));
            }
        }
        let basis = select_columns(&eig.eigenvectors, &selected);
        let rank = basis.cols();
        Ok(Projector {
            matrix,
            basis,
            rank,
        })
    }

    /// Projector onto the span of the selected eigenvector columns.
    pub fn from_eigencolumns(eig: &EigenDecomposition<T>, selected: &[bool]) -> Result<Self> {
        assert_eq!(eig.dim(), selected.len());
        let basis = select_columns(&eig.eigenvectors, selected);
        let rank = basis.cols();
        let matrix = projector_matrix(&basis);
        Ok(Projector {
            matrix,
            basis,
            rank,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Projector {
            matrix: SymmetricMatrix::zeros(dim),
            basis: Matrix::zeros(dim, 0),
            rank: 0,
        }
    }

    pub fn full(dim: usize) -> Self {
        Projector {
            matrix: SymmetricMatrix::identity(dim),
            basis: Matrix::identity(dim),
            rank: dim,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &SymmetricMatrix<T> {
        &self.matrix
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    /// Projector onto the orthogonal complement. The matrix is `I - P`
    /// entrywise; the basis is recovered from its eigenvectors.
    pub fn complement(&self) -> Result<Projector<T>> {
        let n = self.dim();
        let comp = SymmetricMatrix::from_fn(n, |i, j| {
            let id = if i == j { T::one() } else { T::zero() };
            id - self.matrix.get(i, j)
        });
        Projector::from_matrix(comp)
    }

    /// Orthogonal frame adapted to this subspace: range vectors first, then
    /// complement vectors, both from the eigendecomposition of the projection
    /// matrix (deterministic for a fixed projector).
    pub fn adapted_frame(&self) -> Result<Matrix<T>> {
        let eig = self.matrix.eigen()?;
        let n = self.dim();
        let tol = scaled_tol::<T>(1e-8);
        let mut range_cols = Vec::new();
        let mut comp_cols = Vec::new();
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if (l - T::one()).abs() <= tol {
                range_cols.push(k);
            } else if l.abs() <= tol {
                comp_cols.push(k);
            } else {
                return Err(Error::Internal(format!(
                    "projector eigenvalue {} away from {{0, 1}}",
                    to_f64(l)
                )));
            }
        }
        if range_cols.len() != self.rank {
            return Err(Error::Internal(format!(
                "projector rank {} disagrees with spectral count {}",
                self.rank,
                range_cols.len()
            )));
        }
        let mut frame = Matrix::zeros(n, n);
        for (j, &k) in range_cols.iter().chain(comp_cols.iter()).enumerate() {
            for i in 0..n {
                frame.set(i, j, eig.eigenvectors.get(i, k));
            }
        }
        Ok(frame)
    }
}

fn projector_matrix<T: Real>(basis: &Matrix<T>) -> SymmetricMatrix<T> {
    let n = basis.rows();
    let r = basis.cols();
    SymmetricMatrix::from_fn(n, |i, j| {
        let mut s = T::zero();
        for k in 0..r {
            s += basis.get(i, k) * basis.get(j, k);
        }
        s
    })
}

fn select_columns<T: Real>(m: &Matrix<T>, selected: &[bool]) -> Matrix<T> {
    let cols: Vec<Vec<T>> = selected
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(j, _)| m.column(j))
        .collect();
    if cols.is_empty() {
        Matrix::zeros(m.rows(), 0)
    } else {
        Matrix::from_columns(&cols)
    }
}

fn check_same_dim<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "projectors live in dimensions {} and {}",
            p.dim(),
            q.dim()
        )));
    }
    Ok(())
}

/// Clamps a norm meant to lie in `[0, 1]`; an excursion beyond the clamp
/// window signals a logic error rather than rounding.
fn clamp_unit_norm<T: Real>(norm: T) -> Result<T> {
    let tol = scaled_tol::<T>(1e-12);
    if norm > T::one() + tol {
        return Err(Error::Internal(format!(
            "norm {} exceeds 1 beyond the clamp window",
            to_f64(norm)
        )));
    }
    Ok(norm.min(T::one()).max(T::zero()))
}

/// Maximal angle `arcsin ||P - Q||` in `[0, pi/2]`.
pub fn maximal_angle<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<T> {
    check_same_dim(p, q)?;
    let diff = p.matrix().sub(q.matrix());
    Ok(clamp_unit_norm(diff.spectral_norm())?.asin())
}

/// Relative angle `arcsin ||Q^perp P||`; asymmetric in its arguments and
/// defined only for a nonzero first subspace.
pub fn relative_angle<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<T> {
    check_same_dim(p, q)?;
    if p.rank() == 0 {
        return Err(Error::UndefinedAngle(
            "relative angle needs a nonzero first subspace".into(),
        ));
    }
    let n = p.dim();
    let qperp = Matrix::identity(n).sub(q.matrix().matrix());
    let prod = qperp.matmul(p.matrix().matrix());
    Ok(clamp_unit_norm(operator_norm(&prod))?.asin())
}

/// Sine of the maximal angle between two equal-rank subspaces given by
/// orthonormal bases: `sqrt(1 - lambda_min(M^T M))` with `M = U^T V`.
/// Agrees with `sin(maximal_angle)` and is much cheaper for repeated use.
pub fn subspace_sin_max<T: Real>(u: &Matrix<T>, v: &Matrix<T>) -> T {
    assert_eq!(u.rows(), v.rows(), "ambient dimension mismatch");
    assert_eq!(u.cols(), v.cols(), "equal ranks required");
    if u.cols() == 0 {
        return T::zero();
    }
    let m = u.transpose().matmul(v);
    let g = m.transpose().matmul(&m);
    let (lo, _) = sym_extreme_eigenvalues(&g);
    (T::one() - lo).max(T::zero()).min(T::one()).sqrt()
}

/// Angular description of an ordered pair of subspaces.
#[derive(Debug, Clone)]
pub struct AngularData<T> {
    /// Maximal angle in `[0, pi/2]`.
    pub theta: T,
    /// Angular operator in the frame adapted to the first subspace;
    /// present exactly in the acute-angle case.
    pub x: Option<Matrix<T>>,
    /// Operator angle `arctan sqrt(X^T X)`; present with `x`.
    pub theta_operator: Option<SymmetricMatrix<T>>,
    /// Spectral-norm residual of rebuilding the second projector from `x`.
    pub recon_residual: Option<T>,
    /// Condition estimate of the top block, reported close to `pi/2`.
    pub w_top_condition: Option<T>,
}

/// Computes the maximal angle and, in the acute-angle case, the angular
/// operator, the operator angle, and the graph-formula reconstruction
/// residual of the second projector.
pub fn angular_data<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<AngularData<T>> {
    check_same_dim(p, q)?;
    let theta = maximal_angle(p, q)?;
    let absent = AngularData {
        theta,
        x: None,
        theta_operator: None,
        recon_residual: None,
        w_top_condition: None,
    };
    if theta >= T::FRAC_PI_2() {
        return Ok(absent);
    }
    if p.rank() != q.rank() {
        return Err(Error::Internal(format!(
            "angle {} below pi/2 with ranks {} vs {}",
            to_f64(theta),
            p.rank(),
            q.rank()
        )));
    }
    if p.rank() == 0 || p.rank() == p.dim() {
        // trivial subspace: the pair coincides, X is the empty operator
        let r = p.rank();
        let n = p.dim();
        return Ok(AngularData {
            theta,
            x: Some(Matrix::zeros(n - r, r)),
            theta_operator: Some(SymmetricMatrix::zeros(r)),
            recon_residual: Some(T::zero()),
            w_top_condition: None,
        });
    }

    let n = p.dim();
    let r = p.rank();
    let frame = p.adapted_frame()?;
    let w = frame.transpose().matmul(q.basis());
    let w_top = w.block(0, r, 0, r);
    let w_bot = w.block(r, n, 0, r);

    let near_flat = theta >= T::FRAC_PI_2() - real::<T>(1e-6);
    // X^T solves W_top^T X^T = W_bot^T
    let x = match lu_solve(&w_top.transpose(), &w_bot.transpose()) {
        Ok(xt) => xt.transpose(),
        Err(_) if near_flat => return Ok(absent),
        Err(_) => {
            return Err(Error::Internal(format!(
                "top block singular at angle {}",
                to_f64(theta)
            )))
        }
    };

    let w_top_condition = if theta > T::FRAC_PI_2() - real::<T>(0.01) {
        let g = w_top.transpose().matmul(&w_top);
        let (lo, hi) = sym_extreme_eigenvalues(&g);
        Some((hi.max(T::zero()) / lo.max(T::epsilon() * T::epsilon())).sqrt())
    } else {
        None
    };

    // operator angle: arctan of the symmetric square root of X^T X
    let gram = SymmetricMatrix::new(x.transpose().matmul(&x))?;
    let theta_operator = sym_function(&gram, |l| l.max(T::zero()).sqrt().atan())?;

    // graph-formula reconstruction of Q in the adapted frame
    let inv = sym_function(&gram, |l| (T::one() + l).recip())?;
    let tl = inv.matrix().clone();
    let tr = inv.matrix().matmul(&x.transpose());
    let bl = x.matmul(inv.matrix());
    let br = x.matmul(inv.matrix()).matmul(&x.transpose());
    let mut q_frame = Matrix::zeros(n, n);
    q_frame.set_block(0, 0, &tl);
    q_frame.set_block(0, r, &tr);
    q_frame.set_block(r, 0, &bl);
    q_frame.set_block(r, r, &br);
    let q_rebuilt = frame.matmul(&q_frame).matmul(&frame.transpose());
    let recon_residual = operator_norm(&q_rebuilt.sub(q.matrix().matrix()));
    if recon_residual > scaled_tol::<T>(1e-9) {
        return Err(Error::Internal(format!(
            "graph reconstruction residual {}",
            to_f64(recon_residual)
        )));
    }

    Ok(AngularData {
        theta,
        x: Some(x),
        theta_operator: Some(theta_operator),
        recon_residual: Some(recon_residual),
        w_top_condition,
    })
}

/// Direct rotation from the first subspace onto the second, assembled from
/// the angular operator by the block formula
/// `[[(I + X^T X)^{-1/2}, -X^T (I + X X^T)^{-1/2}],
///   [X (I + X^T X)^{-1/2}, (I + X X^T)^{-1/2}]]`
/// in adapted coordinates and rotated back to the ambient frame. It maps the
/// first range onto the second, squares to `(Q^perp - Q)(P^perp - P)`, and
/// has positive-semidefinite real part.
pub fn direct_rotation<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<Matrix<T>> {
    check_same_dim(p, q)?;
    let data = angular_data(p, q)?;
    let x = match data.x {
        Some(x) => x,
        None => {
            return Err(Error::NotAcute {
                theta: to_f64(data.theta),
            })
        }
    };
    let n = p.dim();
    let r = p.rank();
    if r == 0 || r == n {
        return Ok(Matrix::identity(n));
    }
    let g0 = SymmetricMatrix::new(x.transpose().matmul(&x))?;
    let g1 = SymmetricMatrix::new(x.matmul(&x.transpose()))?;
    let inv_sqrt0 = sym_function(&g0, |l| (T::one() + l.max(T::zero())).sqrt().recip())?;
    let inv_sqrt1 = sym_function(&g1, |l| (T::one() + l.max(T::zero())).sqrt().recip())?;

    let mut u_frame = Matrix::zeros(n, n);
    u_frame.set_block(0, 0, inv_sqrt0.matrix());
    u_frame.set_block(
        0,
        r,
        &x.transpose().matmul(inv_sqrt1.matrix()).scaled(-T::one()),
    );
    u_frame.set_block(r, 0, &x.matmul(inv_sqrt0.matrix()));
    u_frame.set_block(r, r, inv_sqrt1.matrix());

    let frame = p.adapted_frame()?;
    Ok(frame.matmul(&u_frame).matmul(&frame.transpose()))
}

/// Spectral angle of an orthogonal matrix: `arccos(min spec((S + S^T)/2))`,
/// the largest argument over the unit-circle spectrum.
pub fn spectral_angle<T: Real>(s: &Matrix<T>) -> Result<T> {
    if s.rows() != s.cols() {
        return Err(Error::DimensionMismatch(format!(
            "spectral angle needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let gram = s.transpose().matmul(s);
    let resid = operator_norm(&gram.sub(&Matrix::identity(s.rows())));
    if resid > scaled_tol::<T>(1e-8) {
        return Err(Error::Validation(format!(
            "matrix not orthogonal: ||S^T S - I|| = {}",
            to_f64(resid)
        )));
    }
    let re = SymmetricMatrix::new(s.add(&s.transpose()).scaled(real::<T>(0.5)))?;
    let (lo, _) = sym_extreme_eigenvalues(re.matrix());
    let tol = scaled_tol::<T>(1e-12);
    if lo < -T::one() - tol || lo > T::one() + tol {
        return Err(Error::Internal(format!(
            "real-part eigenvalue {} outside [-1, 1]",
            to_f64(lo)
        )));
    }
    Ok(lo.min(T::one()).max(-T::one()).acos())
}
