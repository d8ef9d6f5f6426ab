//! Dense real matrices and the symmetric eigenproblem.
//!
//! Everything here is self-contained and deterministic: the eigensolver is a
//! cyclic Jacobi scheme, operator norms go through Gram matrices with a
//! Householder/bisection extreme-eigenvalue routine, and linear solves use
//! LU with partial pivoting.

use crate::error::{Error, Result};
use crate::scalar::{real, scaled_tol, to_f64, Real};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from a row-major slice; panics if the length does not match.
    pub fn from_rows(rows: usize, cols: usize, data: &[T]) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Matrix {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let ncols = cols.len();
        let nrows = if ncols == 0 { 0 } else { cols[0].len() };
        let mut m = Matrix::zeros(nrows, ncols);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows, "column length mismatch");
            for i in 0..nrows {
                m.set(i, j, c[i]);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scaled(&self, s: T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Copy of the sub-block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix<T> {
        assert!(r1 <= self.rows && c1 <= self.cols && r0 <= r1 && c0 <= c1);
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix<T>) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|&v| v * v)
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .fold(T::zero(), |a, b| a + b)
            })
            .collect()
    }
}

/// Dense real symmetric matrix; symmetry is enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    m: Matrix<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    /// Accepts a square matrix whose max entrywise asymmetry is below `1e-12`
    /// (scaled up for coarser scalar types); stores the symmetrized average.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut asym = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((m.get(i, j) - m.get(j, i)).abs());
            }
        }
        if asym >= scaled_tol(1e-12) {
            return Err(Error::NotSymmetric {
                asymmetry: to_f64(asym),
            });
        }
        let half: T = real(0.5);
        let mut s = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (s.get(i, j) + s.get(j, i)) * half;
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        Ok(SymmetricMatrix { m: s })
    }

    /// Builds from `f(i, j)` evaluated on `i <= j` and mirrored, so the
    /// result is symmetric exactly.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        SymmetricMatrix { m }
    }

    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix {
            m: Matrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        SymmetricMatrix {
            m: Matrix::identity(dim),
        }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        SymmetricMatrix { m }
    }

    /// Wraps a matrix known to be symmetric by construction (exact mirror).
    pub(crate) fn from_symmetric_parts(m: Matrix<T>) -> Self {
        debug_assert_eq!(m.rows(), m.cols());
        SymmetricMatrix { m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.m.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        self.m.clone()
    }

    pub fn add(&self, rhs: &SymmetricMatrix<T>) -> SymmetricMatrix<T> {
        SymmetricMatrix {
            m: self.m.add(&rhs.m),
        }
    }

    pub fn sub(&self, rhs: &SymmetricMatrix<T>) -> SymmetricMatrix<T> {
        SymmetricMatrix {
            m: self.m.sub(&rhs.m),
        }
    }

    pub fn scaled(&self, s: T) -> SymmetricMatrix<T> {
        SymmetricMatrix {
            m: self.m.scaled(s),
        }
    }

    /// `self + t * v`, symmetric exactly.
    pub fn add_scaled(&self, t: T, v: &SymmetricMatrix<T>) -> SymmetricMatrix<T> {
        SymmetricMatrix {
            m: self.m.add(&v.m.scaled(t)),
        }
    }

    pub fn max_abs(&self) -> T {
        self.m.max_abs()
    }

    /// Spectral norm, i.e. the largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> T {
        if self.dim() == 0 {
            return T::zero();
        }
        let (lo, hi) = sym_extreme_eigenvalues(&self.m);
        lo.abs().max(hi.abs())
    }

    /// Full eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back in ascending order, eigenvectors as the columns
    /// of an orthogonal matrix, each column sign-normalized so the output is
    /// deterministic for a fixed input.
    pub fn eigen(&self) -> Result<EigenDecomposition<T>> {
        jacobi_eigen(&self.m)
    }
}

/// Result of the symmetric eigenproblem: `M = Q diag(values) Q^T`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q diag(values) Q^T`, for reconstruction checks.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for j in 0..n {
            for i in 0..n {
                scaled.set(i, j, q.get(i, j) * self.eigenvalues[j]);
            }
        }
        scaled.matmul(&q.transpose())
    }
}

const MAX_JACOBI_SWEEPS: usize = 100;

fn jacobi_eigen<T: Real>(m: &Matrix<T>) -> Result<EigenDecomposition<T>> {
    let n = m.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: Matrix::zeros(0, 0),
        });
    }
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let frob = a.frobenius_norm();
    if frob == T::zero() {
        return Ok(EigenDecomposition {
            eigenvalues: vec![T::zero(); n],
            eigenvectors: v,
        });
    }
    let tol = T::epsilon() * frob;

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if off.sqrt() <= tol {
            converged = true;
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (real::<T>(2.0) * apq);
                // stable tangent of the rotation angle
                let t = if theta.abs() > T::one() / T::epsilon().sqrt() {
                    (real::<T>(2.0) * theta).recip()
                } else {
                    let s = if theta < T::zero() {
                        -T::one()
                    } else {
                        T::one()
                    };
                    s / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                // A <- J^T A J with J the (p,q) rotation
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.get(i, i)).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("non-NaN eigenvalues"));

    let eigenvalues: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        // sign convention: largest-magnitude entry positive
        let mut pivot = 0;
        let mut best = T::zero();
        for i in 0..n {
            let x = v.get(i, old_j).abs();
            if x > best {
                best = x;
                pivot = i;
            }
        }
        let flip = v.get(pivot, old_j) < T::zero();
        for i in 0..n {
            let x = v.get(i, old_j);
            eigenvectors.set(i, new_j, if flip { -x } else { x });
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns the diagonal and sub-diagonal; transforms are not accumulated.
fn tridiagonalize<T: Real>(m: &Matrix<T>) -> (Vec<T>, Vec<T>) {
    let n = m.rows();
    let mut a = m.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n.saturating_sub(1)];

    for k in 0..n.saturating_sub(2) {
        // Householder vector annihilating column k below the sub-diagonal
        let mut alpha = T::zero();
        for i in (k + 1)..n {
            alpha += a.get(i, k) * a.get(i, k);
        }
        alpha = alpha.sqrt();
        if a.get(k + 1, k) > T::zero() {
            alpha = -alpha;
        }
        e[k] = alpha;
        if alpha == T::zero() {
            continue;
        }
        let r2 = alpha * alpha - a.get(k + 1, k) * alpha;
        if r2 <= T::zero() {
            continue;
        }
        let mut v = vec![T::zero(); n];
        v[k + 1] = a.get(k + 1, k) - alpha;
        for i in (k + 2)..n {
            v[i] = a.get(i, k);
        }
        let beta = r2.recip();
        // p = beta * A v  restricted to the trailing block
        let mut p = vec![T::zero(); n];
        for i in (k + 1)..n {
            let mut s = T::zero();
            for j in (k + 1)..n {
                s += a.get(i, j) * v[j];
            }
            p[i] = s * beta;
        }
        let vp = ((k + 1)..n)
            .map(|i| v[i] * p[i])
            .fold(T::zero(), |x, y| x + y);
        let half_beta_vp = vp * beta * real::<T>(0.5);
        for i in (k + 1)..n {
            p[i] -= half_beta_vp * v[i];
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let val = a.get(i, j) - v[i] * p[j] - p[i] * v[j];
                a.set(i, j, val);
            }
        }
    }
    if n >= 2 {
        e[n - 2] = a.get(n - 1, n - 2);
    }
    for i in 0..n {
        d[i] = a.get(i, i);
    }
    (d, e)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`
/// (Sturm sequence count).
fn sturm_count<T: Real>(d: &[T], e: &[T], x: T, pivmin: T) -> usize {
    let n = d.len();
    let mut count = 0;
    let mut q = d[0] - x;
    if q < T::zero() {
        count += 1;
    }
    for k in 1..n {
        if q.abs() < pivmin {
            q = if q < T::zero() { -pivmin } else { pivmin };
        }
        q = d[k] - x - e[k - 1] * e[k - 1] / q;
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// Smallest and largest eigenvalue of a symmetric matrix via Householder
/// tridiagonalization and Sturm bisection. Much cheaper than a full
/// decomposition when only the spectral interval is needed.
pub fn sym_extreme_eigenvalues<T: Real>(m: &Matrix<T>) -> (T, T) {
    let n = m.rows();
    assert_eq!(n, m.cols(), "square matrix required");
    if n == 0 {
        return (T::zero(), T::zero());
    }
    if n == 1 {
        return (m.get(0, 0), m.get(0, 0));
    }
    let (d, e) = tridiagonalize(m);
    let mut lo = d[0];
    let mut hi = d[0];
    for i in 0..n {
        let left = if i > 0 { e[i - 1].abs() } else { T::zero() };
        let right = if i < n - 1 { e[i].abs() } else { T::zero() };
        lo = lo.min(d[i] - left - right);
        hi = hi.max(d[i] + left + right);
    }
    // scale-relative resolution so tiny-norm matrices resolve correctly
    let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
    let pivmin = (T::epsilon() * T::epsilon() * scale).max(T::min_positive_value());

    let bisect = |target: usize| -> T {
        let mut a = lo - scale * T::epsilon();
        let mut b = hi + scale * T::epsilon();
        for _ in 0..128 {
            let mid = (a + b) * real::<T>(0.5);
            if b - a <= T::epsilon() * scale * real::<T>(2.0) {
                break;
            }
            if sturm_count(&d, &e, mid, pivmin) >= target {
                b = mid;
            } else {
                a = mid;
            }
        }
        (a + b) * real::<T>(0.5)
    };

    (bisect(1), bisect(n))
}

/// Spectral norm (largest singular value) of a general rectangular matrix.
/// The input is normalized by its Frobenius norm before squaring into the
/// Gram matrix, keeping the result accurate in a relative sense for
/// small-norm inputs (residual checks depend on this).
pub fn operator_norm<T: Real>(m: &Matrix<T>) -> T {
    if m.rows() == 0 || m.cols() == 0 {
        return T::zero();
    }
    let frob = m.frobenius_norm();
    if frob == T::zero() || !frob.is_finite() {
        return frob;
    }
    let unit = m.scaled(frob.recip());
    // Gram matrix on the smaller side
    let g = if unit.rows() >= unit.cols() {
        unit.transpose().matmul(&unit)
    } else {
        unit.matmul(&unit.transpose())
    };
    let (_, top) = sym_extreme_eigenvalues(&g);
    frob * top.max(T::zero()).sqrt()
}

/// LU factorization with partial pivoting; `a` square.
struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: i32,
}

fn lu_factor<T: Real>(a: &Matrix<T>) -> Result<Lu<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "square matrix required");
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1;
    for k in 0..n {
        let mut piv = k;
        let mut best = lu.get(k, k).abs();
        for i in (k + 1)..n {
            let v = lu.get(i, k).abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == T::zero() {
            return Err(Error::Validation(format!(
                "matrix numerically singular at pivot {k}"
            )));
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu.set(k, j, lu.get(piv, j));
                lu.set(piv, j, tmp);
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let pivot = lu.get(k, k);
        for i in (k + 1)..n {
            let factor = lu.get(i, k) / pivot;
            lu.set(i, k, factor);
            for j in (k + 1)..n {
                let v = lu.get(i, j) - factor * lu.get(k, j);
                lu.set(i, j, v);
            }
        }
    }
    Ok(Lu { lu, perm, sign })
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn lu_solve<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    assert_eq!(n, b.rows(), "solve dimension mismatch");
    let f = lu_factor(a)?;
    let mut x = Matrix::zeros(n, b.cols());
    for col in 0..b.cols() {
        // forward substitution on the permuted right-hand side
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut s = b.get(f.perm[i], col);
            for j in 0..i {
                s -= f.lu.get(i, j) * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= f.lu.get(i, j) * x.get(j, col);
            }
            x.set(i, col, s / f.lu.get(i, i));
        }
    }
    Ok(x)
}

/// Determinant via LU; zero for singular input.
pub fn determinant<T: Real>(a: &Matrix<T>) -> T {
    match lu_factor(a) {
        Ok(f) => {
            let mut det = if f.sign >= 0 { T::one() } else { -T::one() };
            for i in 0..a.rows() {
                det *= f.lu.get(i, i);
            }
            det
        }
        Err(_) => T::zero(),
    }
}

/// Applies a scalar function to a symmetric matrix through its
/// eigendecomposition: `Q f(Λ) Q^T`, mirrored so the result is exactly
/// symmetric.
pub fn sym_function<T: Real>(
    m: &SymmetricMatrix<T>,
    f: impl Fn(T) -> T,
) -> Result<SymmetricMatrix<T>> {
    let eig = m.eigen()?;
    let n = m.dim();
    let q = &eig.eigenvectors;
    let vals: Vec<T> = eig.eigenvalues.iter().map(|&l| f(l)).collect();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = T::zero();
            for k in 0..n {
                s += q.get(i, k) * vals[k] * q.get(j, k);
            }
            out.set(i, j, s);
            out.set(j, i, s);
        }
    }
    Ok(SymmetricMatrix::from_symmetric_parts(out))
}

/// Plain-text fixture format: first line is the dimension, then one
/// whitespace-separated row per line.
pub fn write_symmetric_text<T: Real>(m: &SymmetricMatrix<T>) -> String {
    let n = m.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:.17e}", m.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_symmetric_text<T: Real>(text: &str) -> Result<SymmetricMatrix<T>> {
    let mut tokens = text.split_whitespace();
    let dim: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty matrix text".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
    let mut data = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {} entries", dim * dim)))?;
        let v: f64 = tok
            .parse()
            .map_err(|e| Error::Parse(format!("bad entry {tok:?}: {e}")))?;
        data.push(real::<T>(v));
    }
    if tokens.next().is_some() {
        return Err(Error::Parse("trailing tokens after matrix entries".into()));
    }
    SymmetricMatrix::new(Matrix::from_rows(dim, dim, &data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn construction_rejects_asymmetry() {
        let mut m = Matrix::<f64>::identity(2);
        m.set(0, 1, 1e-6);
        assert!(matches!(
            SymmetricMatrix::new(m),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn construction_symmetrizes_roundoff() {
        let mut m = Matrix::<f64>::identity(2);
        m.set(0, 1, 1e-13);
        let s = SymmetricMatrix::new(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn eigen_diag_permutation() {
        let m = SymmetricMatrix::diagonal(&[3.0, 1.0, 2.0]);
        let e = m.eigen().unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        // permutation eigenvectors
        for (j, &col) in [1usize, 2, 0].iter().enumerate() {
            for i in 0..3 {
                let expect = if i == col { 1.0 } else { 0.0 };
                assert_close(e.eigenvectors.get(i, j), expect, 1e-14);
            }
        }
    }

    #[test]
    fn eigen_2x2_quadratic_formula() {
        // [[0, v], [v, 1]] with v = 0.2 has eigenvalues (1 +/- sqrt(1 + 4 v^2)) / 2
        let v = 0.2;
        let m = SymmetricMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => 0.0,
            (1, 1) => 1.0,
            _ => v,
        });
        let e = m.eigen().unwrap();
        let s = (1.0_f64 + 4.0 * v * v).sqrt();
        assert_close(e.eigenvalues[0], (1.0 - s) / 2.0, 1e-14);
        assert_close(e.eigenvalues[1], (1.0 + s) / 2.0, 1e-14);
    }

    #[test]
    fn eigen_reconstruction_residual() {
        let m = crate::random::random_symmetric::<f64>(8, 7070);
        let e = m.eigen().unwrap();
        let recon = e.reconstruct();
        let resid = SymmetricMatrix::new(recon.sub(m.matrix()).clone())
            .map(|s| s.spectral_norm())
            .unwrap_or_else(|_| operator_norm(&recon.sub(m.matrix())));
        assert!(resid < 1e-10 * (1.0 + m.spectral_norm()));
        let qtq = e.eigenvectors.transpose().matmul(&e.eigenvectors);
        assert!(qtq.sub(&Matrix::identity(8)).max_abs() < 1e-10);
    }

    #[test]
    fn eigen_trace_and_determinant_oracles() {
        for seed in [1u64, 2, 3] {
            let m = crate::random::random_symmetric::<f64>(4, seed);
            let e = m.eigen().unwrap();
            let trace: f64 = (0..4).map(|i| m.get(i, i)).sum();
            let sum: f64 = e.eigenvalues.iter().sum();
            assert_close(sum, trace, 1e-10 * 4.0 * (1.0 + m.spectral_norm()));
            let det_oracle = determinant(m.matrix());
            let prod: f64 = e.eigenvalues.iter().product();
            assert_close(prod, det_oracle, 1e-10 * (1.0 + det_oracle.abs()));
        }
    }

    #[test]
    fn operator_norm_identity_and_rank_one() {
        assert_close(operator_norm(&Matrix::<f64>::identity(3)), 1.0, 1e-14);
        // rank-one u v^T has norm |u| |v|
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 4.0];
        let m = Matrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_close(operator_norm(&m), nu * nv, 1e-12);
    }

    #[test]
    fn operator_norm_matches_power_iteration() {
        let m = crate::random::random_matrix::<f64>(6, 6, 1234);
        let by_gram = operator_norm(&m);
        // power iteration on M^T M as an independent oracle
        let g = m.transpose().matmul(&m);
        let mut v = vec![1.0_f64; 6];
        let mut lam = 0.0;
        for _ in 0..2000 {
            let w = g.mul_vec(&v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = w.iter().map(|x| x / norm).collect();
            lam = norm;
        }
        assert_close(by_gram, lam.sqrt(), 1e-8);
    }

    #[test]
    fn extreme_eigenvalues_match_jacobi() {
        for seed in 0..20u64 {
            let dim = 2 + (seed as usize % 9);
            let m = crate::random::random_symmetric::<f64>(dim, 900 + seed);
            let e = m.eigen().unwrap();
            let (lo, hi) = sym_extreme_eigenvalues(m.matrix());
            assert_close(lo, e.eigenvalues[0], 1e-12 * (1.0 + m.spectral_norm()));
            assert_close(
                hi,
                e.eigenvalues[dim - 1],
                1e-12 * (1.0 + m.spectral_norm()),
            );
        }
    }

    #[test]
    fn eigen_handles_clustered_spectra() {
        // known eigenvalues with multiplicities, conjugated by a random frame
        let values = [1.0_f64, 1.0, 1.0, 2.0, 2.0, 3.0];
        let q = crate::random::random_orthonormal::<f64>(6, 6, 505);
        let m = SymmetricMatrix::new(
            q.matmul(&SymmetricMatrix::diagonal(&values).to_matrix())
                .matmul(&q.transpose()),
        )
        .unwrap();
        let e = m.eigen().unwrap();
        for (got, want) in e.eigenvalues.iter().zip(values.iter()) {
            assert_close(*got, *want, 1e-12);
        }
        let (lo, hi) = sym_extreme_eigenvalues(m.matrix());
        assert_close(lo, 1.0, 1e-12);
        assert_close(hi, 3.0, 1e-12);
        let resid = e.reconstruct().sub(m.matrix()).max_abs();
        assert!(resid < 1e-12);
    }

    #[test]
    fn lu_solve_roundtrip() {
        let a = crate::random::random_matrix::<f64>(5, 5, 42);
        let x_true = crate::random::random_matrix::<f64>(5, 2, 43);
        let b = a.matmul(&x_true);
        let x = lu_solve(&a, &b).unwrap();
        assert!(x.sub(&x_true).max_abs() < 1e-10);
    }

    #[test]
    fn text_roundtrip_is_exact() {
        let m = crate::random::random_symmetric::<f64>(5, 99);
        let text = write_symmetric_text(&m);
        let back: SymmetricMatrix<f64> = read_symmetric_text(&text).unwrap();
        assert_eq!(m.matrix(), back.matrix());
    }

    #[test]
    fn f32_eigen_smoke() {
        let m = SymmetricMatrix::<f32>::diagonal(&[2.0, -1.0]);
        let e = m.eigen().unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0_f32, 2.0]);
    }
}
