//! Sylvester equations `X L0 - L1 X = Y` with self-adjoint coefficients and
//! disjoint spectra, the `pi/2` norm-bound certificate, the cross-projection
//! bound, and Riccati residuals for angular operators.

use crate::error::{Error, Result};
use crate::matrix::{operator_norm, sym_function, Matrix, SymmetricMatrix};
use crate::scalar::{real, scaled_tol, to_f64, Real};
use crate::spectral::{spectral_projection, SpectralSet};

/// Sylvester problem `X L0 - L1 X = Y` with `Y` of shape `n1 x n0`.
/// The spectral separation `delta` is computed, never supplied.
#[derive(Debug, Clone)]
pub struct SylvesterProblem<T> {
    pub lambda0: SymmetricMatrix<T>,
    pub lambda1: SymmetricMatrix<T>,
    pub y: Matrix<T>,
    pub delta: T,
}

impl<T: Real> SylvesterProblem<T> {
    pub fn new(
        lambda0: SymmetricMatrix<T>,
        lambda1: SymmetricMatrix<T>,
        y: Matrix<T>,
    ) -> Result<Self> {
        if y.rows() != lambda1.dim() || y.cols() != lambda0.dim() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side must be {}x{}, got {}x{}",
                lambda1.dim(),
                lambda0.dim(),
                y.rows(),
                y.cols()
            )));
        }
        let e0 = lambda0.eigen()?;
        let e1 = lambda1.eigen()?;
        let mut delta = T::infinity();
        for &a in &e0.eigenvalues {
            for &b in &e1.eigenvalues {
                delta = delta.min((a - b).abs());
            }
        }
        Ok(SylvesterProblem {
            lambda0,
            lambda1,
            y,
            delta,
        })
    }

    fn near_singular_threshold(&self) -> T {
        scaled_tol::<T>(1e-8)
            * (T::one() + self.lambda0.spectral_norm() + self.lambda1.spectral_norm())
    }
}

/// Solves the Sylvester equation by entrywise division in the eigenbases of
/// the two coefficients.
pub fn solve_sylvester<T: Real>(p: &SylvesterProblem<T>) -> Result<Matrix<T>> {
    let threshold = p.near_singular_threshold();
    if p.delta <= threshold {
        return Err(Error::NearSingular {
            delta: to_f64(p.delta),
            threshold: to_f64(threshold),
        });
    }
    let e0 = p.lambda0.eigen()?;
    let e1 = p.lambda1.eigen()?;
    let q0 = &e0.eigenvectors;
    let q1 = &e1.eigenvectors;
    let y_t = q1.transpose().matmul(&p.y).matmul(q0);
    let mut x_t = Matrix::zeros(p.y.rows(), p.y.cols());
    for i in 0..x_t.rows() {
        for j in 0..x_t.cols() {
            let denom = e0.eigenvalues[j] - e1.eigenvalues[i];
            x_t.set(i, j, y_t.get(i, j) / denom);
        }
    }
    let x = q1.matmul(&x_t).matmul(&q0.transpose());

    let residual = sylvester_residual(p, &x);
    let tol = scaled_tol::<T>(1e-9) * (T::one() + operator_norm(&p.y));
    if residual > tol {
        return Err(Error::Internal(format!(
            "sylvester residual {} above {}",
            to_f64(residual),
            to_f64(tol)
        )));
    }
    Ok(x)
}

fn sylvester_residual<T: Real>(p: &SylvesterProblem<T>, x: &Matrix<T>) -> T {
    let lhs = x
        .matmul(p.lambda0.matrix())
        .sub(&p.lambda1.matrix().matmul(x));
    operator_norm(&lhs.sub(&p.y))
}

/// Outcome of the `delta ||X|| <= (pi/2) ||Y||` certificate.
#[derive(Debug, Clone, Copy)]
pub struct SylvesterBoundReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
    pub pass: bool,
}

/// Re-verifies that `x` solves the problem, then certifies the norm bound.
pub fn sylvester_bound_check<T: Real>(
    p: &SylvesterProblem<T>,
    x: &Matrix<T>,
) -> Result<SylvesterBoundReport<T>> {
    let residual = sylvester_residual(p, x);
    let tol = scaled_tol::<T>(1e-9) * (T::one() + operator_norm(&p.y));
    if residual > tol {
        return Err(Error::StaleSolution {
            residual: to_f64(residual),
            tolerance: to_f64(tol),
        });
    }
    let lhs = p.delta * operator_norm(x);
    let rhs = T::FRAC_PI_2() * operator_norm(&p.y);
    Ok(SylvesterBoundReport {
        lhs,
        rhs,
        residual,
        pass: lhs <= rhs + scaled_tol::<T>(1e-9),
    })
}

/// Outcome of the cross-projection bound
/// `dist(omega, Omega) ||E_A(omega) E_B(Omega)|| <= (pi/2) ||B - A||`.
#[derive(Debug, Clone, Copy)]
pub struct CrossProjectionReport<T> {
    pub dist: T,
    pub lhs: T,
    pub rhs: T,
    pub pass: bool,
    /// Set when the two interval sets intersect, making the bound vacuous.
    pub trivial: bool,
}

pub fn cross_projection_check<T: Real>(
    a: &SymmetricMatrix<T>,
    b: &SymmetricMatrix<T>,
    omega: &SpectralSet<T>,
    omega_cap: &SpectralSet<T>,
) -> Result<CrossProjectionReport<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operators of dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let c = b.sub(a);
    let rhs = T::FRAC_PI_2() * c.spectral_norm();
    let dist = omega.distance_to_set(omega_cap);
    if dist == T::zero() {
        return Ok(CrossProjectionReport {
            dist,
            lhs: T::zero(),
            rhs,
            pass: true,
            trivial: true,
        });
    }
    let ea = spectral_projection(a, omega, None)?;
    let eb = spectral_projection(b, omega_cap, None)?;
    let prod = ea.matrix().matrix().matmul(eb.matrix().matrix());
    let lhs = dist * operator_norm(&prod);
    Ok(CrossProjectionReport {
        dist,
        lhs,
        rhs,
        pass: lhs <= rhs + scaled_tol::<T>(1e-9),
        trivial: false,
    })
}

/// Block data of a partitioned self-adjoint operator
/// `L = [[D0, B], [B^T, D1]]` with a candidate angular operator `X`
/// (mapping the first block space into the second).
#[derive(Debug, Clone)]
pub struct RiccatiData<T> {
    pub d0: SymmetricMatrix<T>,
    pub d1: SymmetricMatrix<T>,
    pub b: Matrix<T>,
    pub x: Matrix<T>,
}

impl<T: Real> RiccatiData<T> {
    pub fn new(
        d0: SymmetricMatrix<T>,
        d1: SymmetricMatrix<T>,
        b: Matrix<T>,
        x: Matrix<T>,
    ) -> Result<Self> {
        let (n0, n1) = (d0.dim(), d1.dim());
        if b.rows() != n0 || b.cols() != n1 {
            return Err(Error::DimensionMismatch(format!(
                "off-diagonal block must be {n0}x{n1}, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        if x.rows() != n1 || x.cols() != n0 {
            return Err(Error::DimensionMismatch(format!(
                "candidate solution must be {n1}x{n0}, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        Ok(RiccatiData { d0, d1, b, x })
    }

    /// The assembled operator `[[D0, B], [B^T, D1]]`.
    pub fn assembled(&self) -> SymmetricMatrix<T> {
        let n0 = self.d0.dim();
        let n1 = self.d1.dim();
        let n = n0 + n1;
        let mut m = Matrix::zeros(n, n);
        m.set_block(0, 0, self.d0.matrix());
        m.set_block(0, n0, &self.b);
        m.set_block(n0, 0, &self.b.transpose());
        m.set_block(n0, n0, self.d1.matrix());
        SymmetricMatrix::from_symmetric_parts(m)
    }
}

/// `||X D0 - D1 X + X B X - B^T||`, zero exactly when the graph of `X`
/// reduces the assembled operator.
pub fn riccati_residual<T: Real>(r: &RiccatiData<T>) -> T {
    let lhs =
        r.x.matmul(r.d0.matrix())
            .sub(&r.d1.matrix().matmul(&r.x))
            .add(&r.x.matmul(&r.b).matmul(&r.x))
            .sub(&r.b.transpose());
    operator_norm(&lhs)
}

/// Diagonalizing transform of a Riccati solution into Sylvester form.
#[derive(Debug, Clone)]
pub struct TransformedSylvester<T> {
    /// `(I + X^T X)^{1/2} (D0 + B X) (I + X^T X)^{-1/2}`
    pub lambda0: Matrix<T>,
    /// `(I + X X^T)^{1/2} (D1 - B^T X^T) (I + X X^T)^{-1/2}`
    pub lambda1: Matrix<T>,
    /// `(I + X X^T)^{1/2} B^T (I + X^T X)^{1/2}`
    pub y: Matrix<T>,
    pub z0: Matrix<T>,
    pub z1: Matrix<T>,
    /// `||X lambda0 - lambda1 X - Y||`
    pub residual: T,
}

/// Builds the transformed Sylvester data for a (near-)exact Riccati solution
/// and returns the defect of `X lambda0 - lambda1 X = Y`.
pub fn transformed_sylvester<T: Real>(r: &RiccatiData<T>) -> Result<TransformedSylvester<T>> {
    let scale = T::one() + r.assembled().spectral_norm();
    let ric = riccati_residual(r);
    if ric > scaled_tol::<T>(1e-8) * scale {
        return Err(Error::Validation(format!(
            "riccati residual {} too large for the transform",
            to_f64(ric)
        )));
    }
    let g0 = SymmetricMatrix::new(r.x.transpose().matmul(&r.x))?;
    let g1 = SymmetricMatrix::new(r.x.matmul(&r.x.transpose()))?;
    let sqrt0 = sym_function(&g0, |l| (T::one() + l.max(T::zero())).sqrt())?;
    let inv_sqrt0 = sym_function(&g0, |l| (T::one() + l.max(T::zero())).sqrt().recip())?;
    let sqrt1 = sym_function(&g1, |l| (T::one() + l.max(T::zero())).sqrt())?;
    let inv_sqrt1 = sym_function(&g1, |l| (T::one() + l.max(T::zero())).sqrt().recip())?;

    let z0 = r.d0.matrix().add(&r.b.matmul(&r.x));
    let z1 = r.d1.matrix().sub(&r.b.transpose().matmul(&r.x.transpose()));
    let lambda0 = sqrt0.matrix().matmul(&z0).matmul(inv_sqrt0.matrix());
    let lambda1 = sqrt1.matrix().matmul(&z1).matmul(inv_sqrt1.matrix());
    let y = sqrt1
        .matrix()
        .matmul(&r.b.transpose())
        .matmul(sqrt0.matrix());
    let residual = operator_norm(&r.x.matmul(&lambda0).sub(&lambda1.matmul(&r.x)).sub(&y));
    Ok(TransformedSylvester {
        lambda0,
        lambda1,
        y,
        z0,
        z1,
        residual,
    })
}

/// Sorted eigenvalues of a matrix that is symmetric up to a small defect
/// (such as the similarity-transformed blocks above). The defect bounds how
/// far the returned values can sit from the true spectrum.
pub fn eigenvalues_of_near_symmetric<T: Real>(m: &Matrix<T>) -> Result<(Vec<T>, T)> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "square matrix required, got {}x{}",
            n,
            m.cols()
        )));
    }
    let mut asym = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((m.get(i, j) - m.get(j, i)).abs());
        }
    }
    let half = real::<T>(0.5);
    let sym = SymmetricMatrix::from_symmetric_parts(m.add(&m.transpose()).scaled(half));
    let eig = sym.eigen()?;
    Ok((eig.eigenvalues, asym))
}
