//! Estimating functions for the maximal angle between spectral subspaces,
//! as functions of the dimensionless ratio `x = ||V|| / d`.
//!
//! The central object is the piecewise-arcsin function `m_star`, built on the
//! partition of `[0, 1/2)` by the sequence `kappa(n) = (1 - q^n) / 2` with
//! `q = (pi^2 - 4) / (pi^2 + 4)`. The older logarithmic and arcsin bounds
//! `m_ms` and `m_kmm` are provided for comparison, together with the named
//! threshold constants.

use crate::error::{Error, Result};
use crate::scalar::{real, scaled_tol, to_f64, Real};

/// `q = (pi^2 - 4) / (pi^2 + 4)`, the contraction ratio of the partition.
pub fn q_ratio<T: Real>() -> T {
    let pi2 = T::PI() * T::PI();
    let four = real::<T>(4.0);
    (pi2 - four) / (pi2 + four)
}

/// `kappa(n) = (1 - q^n) / 2`. Strictly increasing from 0 toward 1/2.
pub fn kappa<T: Real>(n: usize) -> T {
    let q: T = q_ratio();
    (T::one() - q.powi(n as i32)) * real::<T>(0.5)
}

/// Half-angle step height `C0 = arcsin(4 pi / (pi^2 + 4)) / 2`, the exact
/// increment of `m_star` across one partition interval.
pub fn c0<T: Real>() -> T {
    let pi2 = T::PI() * T::PI();
    let four = real::<T>(4.0);
    (four * T::PI() / (pi2 + four)).asin() * real::<T>(0.5)
}

/// Largest `n` with `kappa(n) <= x`; forward scan, bounded because `x < 1/2`.
pub fn n_sharp<T: Real>(x: T) -> Result<usize> {
    check_unit_half_domain(x)?;
    let mut n = 0usize;
    while kappa::<T>(n + 1) <= x {
        n += 1;
    }
    Ok(n)
}

fn check_unit_half_domain<T: Real>(x: T) -> Result<()> {
    if x < T::zero() || x >= real::<T>(0.5) {
        return Err(Error::Domain(format!(
            "argument {} outside [0, 1/2)",
            to_f64(x)
        )));
    }
    Ok(())
}

/// Arcsin with the crate clamp policy: arguments within `1e-12` of the
/// boundary of `[-1, 1]` are clamped; anything farther out is a logic error,
/// not rounding, and is rejected.
pub(crate) fn checked_asin<T: Real>(arg: T) -> Result<T> {
    let tol = scaled_tol::<T>(1e-12);
    if arg.abs() > T::one() + tol {
        return Err(Error::Domain(format!(
            "arcsin argument {} outside [-1, 1]",
            to_f64(arg)
        )));
    }
    Ok(arg.min(T::one()).max(-T::one()).asin())
}

/// Piecewise-arcsin bound: on `[kappa(n), kappa(n+1))` it equals
/// `n * C0 + arcsin(pi (x - kappa(n)) / (1 - 2 kappa(n))) / 2`.
pub fn m_star<T: Real>(x: T) -> Result<T> {
    let n = n_sharp(x)?;
    let kn: T = kappa(n);
    let qn = T::one() - (kn + kn); // = q^n
    let arg = T::PI() * (x - kn) / qn;
    if arg < -scaled_tol::<T>(1e-12) || arg > T::one() + scaled_tol::<T>(1e-12) {
        return Err(Error::Domain(format!(
            "piecewise arcsin argument {} outside [0, 1]",
            to_f64(arg)
        )));
    }
    let half = real::<T>(0.5);
    Ok(real::<T>(n as f64) * c0::<T>() + half * checked_asin(arg.max(T::zero()))?)
}

/// Logarithmic bound `pi/4 * ln(1 / (1 - 2x))` on `[0, 1/2)`.
pub fn m_ms<T: Real>(x: T) -> Result<T> {
    check_unit_half_domain(x)?;
    let two = real::<T>(2.0);
    Ok(-T::PI() / real::<T>(4.0) * (-two * x).ln_1p())
}

/// Arcsin bound `arcsin(pi x / (2 (1 - x)))` on `[0, c_kmm]` (inclusive:
/// the argument equals 1 exactly at the right endpoint).
pub fn m_kmm<T: Real>(x: T) -> Result<T> {
    let end = Constants::<T>::new().c_kmm;
    if x < T::zero() || x > end + scaled_tol::<T>(1e-12) {
        return Err(Error::Domain(format!(
            "argument {} outside [0, c_kmm = {}]",
            to_f64(x),
            to_f64(end)
        )));
    }
    let arg = T::PI() * x / (real::<T>(2.0) * (T::one() - x));
    checked_asin(arg)
}

/// Named threshold constants, all in closed form.
#[derive(Debug, Clone, Copy)]
pub struct Constants<T> {
    /// Unique solution of `m_star(c) = pi/2`; perturbations below `c_star * d`
    /// keep the subspaces in the acute-angle case.
    pub c_star: T,
    /// Solution of `m_ms(c) = pi/2`: `1/2 - 1/(2 e^2)`.
    pub c_ms: T,
    /// Right endpoint of the `m_kmm` domain: `2 / (2 + pi)`.
    pub c_kmm: T,
    /// Solution of `m_ms(c) = pi/4`: `1/2 - 1/(2 e)`.
    pub c_pi4: T,
    /// Step height of `m_star` across one partition interval.
    pub c0: T,
    /// Contraction ratio of the kappa partition.
    pub q: T,
}

impl<T: Real> Constants<T> {
    pub fn new() -> Self {
        let pi = T::PI();
        let pi2 = pi * pi;
        let four = real::<T>(4.0);
        let half = real::<T>(0.5);
        let e = T::E();
        let denom4 = (pi2 + four).powi(4);
        let c_star = real::<T>(16.0)
            * (pi2 * pi2 * pi2 - real::<T>(2.0) * pi2 * pi2 + real::<T>(32.0) * pi2
                - real::<T>(32.0))
            / denom4;
        Constants {
            c_star,
            c_ms: half - half / (e * e),
            c_kmm: real::<T>(2.0) / (real::<T>(2.0) + pi),
            c_pi4: half - half / e,
            c0: c0(),
            q: q_ratio(),
        }
    }
}

impl<T: Real> Default for Constants<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Returns the table of named constants.
pub fn constants<T: Real>() -> Constants<T> {
    Constants::new()
}

/// Cached prefix `kappa(0) ..= kappa(n_max)` of the partition sequence.
#[derive(Debug, Clone)]
pub struct KappaSequence<T> {
    q: T,
    terms: Vec<T>,
}

impl<T: Real> KappaSequence<T> {
    pub fn up_to(n_max: usize) -> Self {
        let terms = (0..=n_max).map(|n| kappa::<T>(n)).collect();
        KappaSequence {
            q: q_ratio(),
            terms,
        }
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn term(&self, n: usize) -> T {
        self.terms[n]
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A validated increasing step sequence `mu` with `mu_0 = 0` and
/// `0 < pi (mu_n - mu_{n-1}) / (1 - 2 mu_{n-1}) <= 1`, together with the
/// piecewise-arcsin function it generates.
#[derive(Debug, Clone)]
pub struct StepSequence<T> {
    mu: Vec<T>,
    /// prefix[n] = half-sum of the first n arcsin step terms
    prefix: Vec<T>,
}

impl<T: Real> StepSequence<T> {
    pub fn new(mu: Vec<T>) -> Result<Self> {
        if mu.len() < 2 {
            return Err(Error::Validation(
                "step sequence needs at least two points".into(),
            ));
        }
        if mu[0] != T::zero() {
            return Err(Error::Validation(format!(
                "step sequence must start at 0, got {}",
                to_f64(mu[0])
            )));
        }
        let tol = scaled_tol::<T>(1e-12);
        let half = real::<T>(0.5);
        let mut prefix = vec![T::zero()];
        for n in 1..mu.len() {
            let denom = T::one() - real::<T>(2.0) * mu[n - 1];
            let ratio = T::PI() * (mu[n] - mu[n - 1]) / denom;
            if ratio <= T::zero() {
                return Err(Error::Validation(format!(
                    "step sequence not strictly increasing at index {n}"
                )));
            }
            if ratio > T::one() + tol {
                return Err(Error::Validation(format!(
                    "step ratio {} at index {n} exceeds 1",
                    to_f64(ratio)
                )));
            }
            let term = half * checked_asin(ratio)?;
            prefix.push(prefix[n - 1] + term);
        }
        Ok(StepSequence { mu, prefix })
    }

    /// A step sequence built from the kappa partition itself; its function
    /// coincides with `m_star`.
    pub fn from_kappa(n_max: usize) -> Self {
        let terms = KappaSequence::<T>::up_to(n_max).terms().to_vec();
        StepSequence::new(terms).expect("kappa terms satisfy the step conditions")
    }

    /// Upper end of the evaluation domain (the last sequence point).
    pub fn sup(&self) -> T {
        *self.mu.last().expect("non-empty")
    }

    pub fn points(&self) -> &[T] {
        &self.mu
    }

    /// Piecewise value: half-sum of the step arcsines up to the interval
    /// containing `x`, plus the residual arcsin term.
    pub fn eval(&self, x: T) -> Result<T> {
        if x < T::zero() || x >= self.sup() {
            return Err(Error::Domain(format!(
                "argument {} outside [0, {})",
                to_f64(x),
                to_f64(self.sup())
            )));
        }
        let mut n = 0;
        while n + 1 < self.mu.len() && self.mu[n + 1] <= x {
            n += 1;
        }
        let denom = T::one() - real::<T>(2.0) * self.mu[n];
        let arg = T::PI() * (x - self.mu[n]) / denom;
        Ok(self.prefix[n] + real::<T>(0.5) * checked_asin(arg)?)
    }
}

/// Evaluates the step function generated by `mu` at `x`.
pub fn general_f<T: Real>(mu: &[T], x: T) -> Result<T> {
    StepSequence::new(mu.to_vec())?.eval(x)
}

/// Which estimating function a [`BoundCurve`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    MStar,
    MMs,
    MKmm,
    GeneralF,
}

/// Uniform evaluator over the four families. `m_star`, `m_ms`, and general
/// step functions live on half-open domains; `m_kmm` includes its right
/// endpoint, where its arcsin argument is exactly 1.
#[derive(Debug, Clone)]
pub struct BoundCurve<T> {
    kind: BoundKind,
    sequence: Option<StepSequence<T>>,
    domain_end: T,
}

impl<T: Real> BoundCurve<T> {
    pub fn m_star() -> Self {
        BoundCurve {
            kind: BoundKind::MStar,
            sequence: None,
            domain_end: real(0.5),
        }
    }

    pub fn m_ms() -> Self {
        BoundCurve {
            kind: BoundKind::MMs,
            sequence: None,
            domain_end: real(0.5),
        }
    }

    pub fn m_kmm() -> Self {
        BoundCurve {
            kind: BoundKind::MKmm,
            sequence: None,
            domain_end: Constants::<T>::new().c_kmm,
        }
    }

    pub fn general(sequence: StepSequence<T>) -> Self {
        let domain_end = sequence.sup();
        BoundCurve {
            kind: BoundKind::GeneralF,
            sequence: Some(sequence),
            domain_end,
        }
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn domain_end(&self) -> T {
        self.domain_end
    }

    pub fn eval(&self, x: T) -> Result<T> {
        match self.kind {
            BoundKind::MStar => m_star(x),
            BoundKind::MMs => m_ms(x),
            BoundKind::MKmm => m_kmm(x),
            BoundKind::GeneralF => self
                .sequence
                .as_ref()
                .expect("general curve carries its sequence")
                .eval(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL6: f64 = 1e-6;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn kappa_printed_decimals() {
        assert_eq!(kappa::<f64>(0), 0.0);
        assert_close(kappa::<f64>(1), 0.288400, TOL6);
        assert_close(kappa::<f64>(2), 0.410451, TOL6);
        assert_close(
            kappa::<f64>(1),
            4.0 / (std::f64::consts::PI.powi(2) + 4.0),
            1e-15,
        );
    }

    #[test]
    fn kappa_recurrence_consistency() {
        let q = q_ratio::<f64>();
        let step = 4.0 / (std::f64::consts::PI.powi(2) + 4.0);
        for n in 1..=24 {
            let lhs = kappa::<f64>(n);
            let rhs = step + q * kappa::<f64>(n - 1);
            assert!((lhs - rhs).abs() < 1e-14, "recurrence drift at n = {n}");
        }
    }

    #[test]
    fn kappa_strictly_increasing_below_half() {
        let seq = KappaSequence::<f64>::up_to(40);
        for n in 0..40 {
            assert!(seq.term(n) < seq.term(n + 1));
            assert!(seq.term(n + 1) < 0.5);
        }
    }

    #[test]
    fn n_sharp_examples() {
        assert_eq!(n_sharp(0.0_f64).unwrap(), 0);
        assert_eq!(n_sharp(0.3_f64).unwrap(), 1);
        assert_eq!(n_sharp(0.45_f64).unwrap(), 2);
        assert!(n_sharp(-0.1_f64).is_err());
        assert!(n_sharp(0.5_f64).is_err());
    }

    #[test]
    fn n_sharp_matches_log_oracle() {
        // closed form: floor(log_q(1 - 2x)) away from the partition points
        let q = q_ratio::<f64>();
        for i in 1..500 {
            let x = i as f64 * 0.4999 / 500.0;
            let by_scan = n_sharp(x).unwrap();
            let by_log = ((1.0 - 2.0 * x).ln() / q.ln()).floor() as usize;
            // the log form may sit on a boundary within roundoff
            assert!(
                by_scan == by_log || (kappa::<f64>(by_scan) <= x && x < kappa::<f64>(by_scan + 1)),
                "x = {x}: scan {by_scan}, log {by_log}"
            );
        }
    }

    #[test]
    fn n_sharp_boundary_agreement() {
        for n in 0..=8 {
            let k = kappa::<f64>(n);
            assert_eq!(n_sharp(k).unwrap(), n, "at kappa({n})");
        }
    }

    #[test]
    fn m_star_values() {
        assert_eq!(m_star(0.0_f64).unwrap(), 0.0);
        // n = 0 branch: arcsin evaluated directly as the oracle
        assert_close(
            m_star(0.1_f64).unwrap(),
            0.5 * (0.1 * std::f64::consts::PI).asin(),
            1e-15,
        );
        assert_close(m_star(0.1_f64).unwrap(), 0.15978547665362986, 1e-15);
        // fixed point at c_star
        let c = constants::<f64>();
        assert!((m_star(c.c_star).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn m_ms_values() {
        assert_eq!(m_ms(0.0_f64).unwrap(), 0.0);
        let c = constants::<f64>();
        assert_close(m_ms(c.c_ms).unwrap(), std::f64::consts::FRAC_PI_2, 1e-12);
        assert_close(
            m_ms(0.25_f64).unwrap(),
            std::f64::consts::PI / 4.0 * 2.0_f64.ln(),
            1e-15,
        );
    }

    #[test]
    fn m_kmm_values() {
        assert_eq!(m_kmm(0.0_f64).unwrap(), 0.0);
        let c = constants::<f64>();
        assert_close(m_kmm(c.c_kmm).unwrap(), std::f64::consts::FRAC_PI_2, 1e-12);
        assert_close(
            m_kmm(0.2_f64).unwrap(),
            (std::f64::consts::PI / 8.0).asin(),
            1e-15,
        );
        assert!(m_kmm(c.c_kmm + 1e-6).is_err());
    }

    #[test]
    fn constants_printed_decimals() {
        let c = constants::<f64>();
        assert_close(c.c_star, 0.454169, TOL6);
        assert_close(c.c_ms, 0.432332, TOL6);
        assert_close(c.c_kmm, 0.388984, TOL6);
        assert_close(c.c_pi4, 0.316060, TOL6);
        assert_close(c.c0 / std::f64::consts::FRAC_PI_2, 0.360907, TOL6);
        assert!(c.c_pi4 < c.c_kmm && c.c_kmm < c.c_ms && c.c_ms < c.c_star && c.c_star < 0.5);
    }

    #[test]
    fn m_star_strictly_monotone() {
        let mut prev = m_star(0.0_f64).unwrap();
        for i in 1..=1000 {
            let x = i as f64 * 0.4995 / 1000.0;
            let v = m_star(x).unwrap();
            assert!(v > prev, "not strictly increasing at x = {x}");
            prev = v;
        }
    }

    #[test]
    fn m_star_diverges_toward_half() {
        let mut prev = 0.0;
        for k in 2..=8 {
            let x = 0.5 - 10f64.powi(-k);
            let v = m_star(x).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(prev > 3.0, "m_star(1/2 - 1e-8) = {prev} should be large");
    }

    #[test]
    fn junction_continuity_and_c1() {
        let eps = 1e-7;
        for n in 1..=6 {
            let k = kappa::<f64>(n);
            let jump = (m_star(k - eps).unwrap() - m_star(k).unwrap()).abs();
            assert!(jump < 1e-4, "jump {jump} at kappa({n})");
            // second-order one-sided difference stencils
            let left = (3.0 * m_star(k).unwrap() - 4.0 * m_star(k - eps).unwrap()
                + m_star(k - 2.0 * eps).unwrap())
                / (2.0 * eps);
            let right = (-3.0 * m_star(k).unwrap() + 4.0 * m_star(k + eps).unwrap()
                - m_star(k + 2.0 * eps).unwrap())
                / (2.0 * eps);
            assert!(
                (left - right).abs() < 1e-4,
                "derivative mismatch {} at kappa({n})",
                (left - right).abs()
            );
        }
    }

    #[test]
    fn derivative_matches_m_ms_at_partition_points() {
        let eps = 1e-7;
        for n in 0..=4 {
            let k = kappa::<f64>(n);
            let star_right = (-3.0 * m_star(k).unwrap() + 4.0 * m_star(k + eps).unwrap()
                - m_star(k + 2.0 * eps).unwrap())
                / (2.0 * eps);
            let ms_right = (-3.0 * m_ms(k).unwrap() + 4.0 * m_ms(k + eps).unwrap()
                - m_ms(k + 2.0 * eps).unwrap())
                / (2.0 * eps);
            assert!(
                (star_right - ms_right).abs() < 1e-6,
                "slope mismatch {} at kappa({n})",
                (star_right - ms_right).abs()
            );
        }
    }

    #[test]
    fn ordering_on_grids() {
        for i in 1..1000 {
            let x = i as f64 * 0.4995 / 1000.0;
            assert!(
                m_star(x).unwrap() < m_ms(x).unwrap(),
                "ordering fails at {x}"
            );
        }
        let ckmm = constants::<f64>().c_kmm;
        for i in 1..=1000 {
            let x = i as f64 * ckmm / 1000.0;
            assert!(
                m_ms(x).unwrap() < m_kmm(x).unwrap(),
                "ordering fails at {x}"
            );
        }
    }

    #[test]
    fn general_f_with_kappa_is_m_star() {
        let seq = StepSequence::<f64>::from_kappa(32);
        for i in 0..500 {
            let x = i as f64 * 0.49 / 500.0;
            let f = seq.eval(x).unwrap();
            let m = m_star(x).unwrap();
            assert!((f - m).abs() < 1e-14, "mismatch at x = {x}: {f} vs {m}");
        }
    }

    #[test]
    fn general_f_first_branch() {
        let mu = vec![0.0, 0.2, 0.35, 0.42];
        assert_close(
            general_f(&mu, 0.1).unwrap(),
            0.5 * (0.1 * std::f64::consts::PI).asin(),
            1e-15,
        );
    }

    #[test]
    fn step_sequence_rejections() {
        assert!(StepSequence::new(vec![0.1_f64, 0.2]).is_err()); // mu_0 != 0
        assert!(StepSequence::new(vec![0.0_f64, 0.2, 0.2]).is_err()); // not increasing
        assert!(StepSequence::new(vec![0.0_f64, 0.4]).is_err()); // ratio pi*0.4 > 1
        assert!(StepSequence::new(vec![0.0_f64]).is_err());
    }

    #[test]
    fn curve_domains() {
        let star = BoundCurve::<f64>::m_star();
        assert_eq!(star.eval(0.0).unwrap(), 0.0);
        assert!(star.eval(0.5).is_err());
        let ms = BoundCurve::<f64>::m_ms();
        assert_eq!(ms.eval(0.0).unwrap(), 0.0);
        assert!(ms.eval(0.5).is_err());
        let kmm = BoundCurve::<f64>::m_kmm();
        assert_eq!(kmm.eval(0.0).unwrap(), 0.0);
        let end = kmm.domain_end();
        assert!(kmm.eval(end).is_ok());
        assert!(kmm.eval(end + 1e-9).is_err());
        let gen = BoundCurve::general(StepSequence::<f64>::from_kappa(6));
        assert!(gen.eval(kappa::<f64>(6)).is_err());
        assert_eq!(gen.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn f32_bounds_smoke() {
        let c = constants::<f32>();
        assert!((c.c_star - 0.454169_f32).abs() < 1e-5);
        assert!((m_star(0.1_f32).unwrap() - 0.159785_f32).abs() < 1e-5);
    }
}
