//! Finite unions of closed real intervals, used to select spectral
//! components, plus spectral projections and the spectral gap.

use crate::error::{Error, Result};
use crate::geometry::Projector;
use crate::matrix::SymmetricMatrix;
use crate::scalar::{scaled_tol, to_f64, Real};

/// Sorted, pairwise disjoint list of closed intervals. Points are encoded as
/// zero-length intervals. Membership is inclusive of endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSet<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Real> SpectralSet<T> {
    /// Validates ordering and disjointness; rejects overlapping intervals.
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo <= hi) {
                return Err(Error::Validation(format!(
                    "interval [{}, {}] has lo > hi",
                    to_f64(lo),
                    to_f64(hi)
                )));
            }
        }
        let mut sorted = intervals;
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-NaN interval bounds"));
        for w in sorted.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::Validation(format!(
                    "intervals [{}, {}] and [{}, {}] are not disjoint",
                    to_f64(w[0].0),
                    to_f64(w[0].1),
                    to_f64(w[1].0),
                    to_f64(w[1].1)
                )));
            }
        }
        Ok(SpectralSet { intervals: sorted })
    }

    /// Sorts and merges overlapping or touching intervals.
    pub fn merged(intervals: Vec<(T, T)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo <= hi) {
                return Err(Error::Validation(format!(
                    "interval [{}, {}] has lo > hi",
                    to_f64(lo),
                    to_f64(hi)
                )));
            }
        }
        let mut sorted = intervals;
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-NaN interval bounds"));
        let mut out: Vec<(T, T)> = Vec::new();
        for (lo, hi) in sorted {
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    last.1 = last.1.max(hi);
                }
                _ => out.push((lo, hi)),
            }
        }
        Ok(SpectralSet { intervals: out })
    }

    /// Degenerate intervals at the given points, merged.
    pub fn from_points(points: &[T]) -> Result<Self> {
        Self::merged(points.iter().map(|&p| (p, p)).collect())
    }

    pub fn single(lo: T, hi: T) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: T) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Distance from a point to the set; zero inside.
    pub fn distance_to_point(&self, x: T) -> T {
        if self.intervals.is_empty() {
            return T::infinity();
        }
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    T::zero()
                }
            })
            .fold(T::infinity(), |a, b| a.min(b))
    }

    /// Distance between two interval sets; zero if they intersect.
    pub fn distance_to_set(&self, other: &SpectralSet<T>) -> T {
        if self.intervals.is_empty() || other.intervals.is_empty() {
            return T::infinity();
        }
        let mut best = T::infinity();
        for &(alo, ahi) in &self.intervals {
            for &(blo, bhi) in &other.intervals {
                let d = if ahi < blo {
                    blo - ahi
                } else if bhi < alo {
                    alo - bhi
                } else {
                    T::zero()
                };
                best = best.min(d);
            }
        }
        best
    }

    /// Closed `r`-neighborhood: each interval inflated by `r`, then merged so
    /// disjointness is preserved.
    pub fn neighborhood(&self, r: T) -> Result<SpectralSet<T>> {
        if r < T::zero() {
            return Err(Error::Validation(format!(
                "negative neighborhood radius {}",
                to_f64(r)
            )));
        }
        Self::merged(
            self.intervals
                .iter()
                .map(|&(lo, hi)| (lo - r, hi + r))
                .collect(),
        )
    }
}

/// Default classification tolerance for an operator of the given norm.
pub fn default_classification_tol<T: Real>(operator_norm: T) -> T {
    scaled_tol::<T>(1e-9) * (T::one() + operator_norm)
}

/// Classifies eigenvalues against a spectral set: a value inside the set
/// (inclusive) is selected; a value outside but within `tol` of the set is a
/// boundary straddle and rejected; anything farther out is not selected.
pub fn classify_eigenvalues<T: Real>(
    eigenvalues: &[T],
    set: &SpectralSet<T>,
    tol: T,
) -> Result<Vec<bool>> {
    eigenvalues
        .iter()
        .map(|&ev| {
            if set.contains(ev) {
                Ok(true)
            } else if set.distance_to_point(ev) <= tol {
                Err(Error::AmbiguousClassification {
                    eigenvalue: to_f64(ev),
                    tol: to_f64(tol),
                })
            } else {
                Ok(false)
            }
        })
        .collect()
}

/// Orthogonal projection onto the span of eigenvectors of `a` whose
/// eigenvalues lie in `s`. `tol` defaults to `1e-9 * (1 + ||a||)`.
pub fn spectral_projection<T: Real>(
    a: &SymmetricMatrix<T>,
    s: &SpectralSet<T>,
    tol: Option<T>,
) -> Result<Projector<T>> {
    let eig = a.eigen()?;
    let tol = tol.unwrap_or_else(|| default_classification_tol(a.spectral_norm()));
    let selected = classify_eigenvalues(&eig.eigenvalues, s, tol)?;
    Projector::from_eigencolumns(&eig, &selected)
}

/// Minimal distance between the eigenvalues of `a` selected by `sigma` and
/// the remaining eigenvalues. Errors if the selection is empty or full.
pub fn gap<T: Real>(a: &SymmetricMatrix<T>, sigma: &SpectralSet<T>) -> Result<T> {
    let eig = a.eigen()?;
    let tol = default_classification_tol(a.spectral_norm());
    let selected = classify_eigenvalues(&eig.eigenvalues, sigma, tol)?;
    gap_from_classes(&eig.eigenvalues, &selected)
}

/// Gap between the two eigenvalue classes given by the selection mask.
pub fn gap_from_classes<T: Real>(eigenvalues: &[T], selected: &[bool]) -> Result<T> {
    let inside: Vec<T> = eigenvalues
        .iter()
        .zip(selected)
        .filter(|(_, &s)| s)
        .map(|(&ev, _)| ev)
        .collect();
    let outside: Vec<T> = eigenvalues
        .iter()
        .zip(selected)
        .filter(|(_, &s)| !s)
        .map(|(&ev, _)| ev)
        .collect();
    if inside.is_empty() || outside.is_empty() {
        return Err(Error::DegeneratePartition {
            selected: inside.len(),
            total: eigenvalues.len(),
        });
    }
    let mut d = T::infinity();
    for &a in &inside {
        for &b in &outside {
            d = d.min((a - b).abs());
        }
    }
    Ok(d)
}
