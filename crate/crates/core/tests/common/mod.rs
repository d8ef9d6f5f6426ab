//! Shared helpers for the integration suites: independent oracles and
//! instance builders kept separate from the implementation paths they check.

use spb_core::lab::PerturbationProblem;
use spb_core::matrix::{lu_solve, Matrix, SymmetricMatrix};
use spb_core::spectral::SpectralSet;

/// Dense Kronecker-system oracle for `X L0 - L1 X = Y`: vectorize the
/// unknown and solve the `n0 n1` linear system directly. Independent of the
/// eigenbasis route used by the solver.
pub fn kronecker_solve(
    l0: &SymmetricMatrix<f64>,
    l1: &SymmetricMatrix<f64>,
    y: &Matrix<f64>,
) -> Matrix<f64> {
    let n0 = l0.dim();
    let n1 = l1.dim();
    let idx = |i: usize, j: usize| j * n1 + i;
    let mut m = Matrix::zeros(n0 * n1, n0 * n1);
    let mut rhs = Matrix::zeros(n0 * n1, 1);
    for i in 0..n1 {
        for j in 0..n0 {
            rhs.set(idx(i, j), 0, y.get(i, j));
            for ip in 0..n1 {
                for jp in 0..n0 {
                    let mut v = 0.0;
                    if ip == i {
                        v += l0.get(jp, j);
                    }
                    if jp == j {
                        v -= l1.get(i, ip);
                    }
                    if v != 0.0 {
                        m.set(idx(i, j), idx(ip, jp), v);
                    }
                }
            }
        }
    }
    let x_vec = lu_solve(&m, &rhs).expect("oracle system solvable");
    Matrix::from_fn(n1, n0, |i, j| x_vec.get(idx(i, j), 0))
}

/// The closed-form 2x2 instance: `A = diag(0, 1)`, off-diagonal coupling
/// `v`, component around the lower eigenvalue. The exact maximal angle is
/// `arctan(2 v) / 2`.
pub fn two_by_two(v: f64) -> PerturbationProblem<f64> {
    let a = SymmetricMatrix::diagonal(&[0.0, 1.0]);
    let sigma = SpectralSet::single(-0.1, 0.1).unwrap();
    let pert = SymmetricMatrix::from_fn(2, |i, j| if i != j { v } else { 0.0 });
    PerturbationProblem::new(a, sigma, pert).unwrap()
}
