//! End-to-end verification engine: given a self-adjoint operator `A`, an
//! isolated spectral component selected by `sigma`, and a perturbation `V`
//! with `||V|| < d/2`, compute the exact maximal angle between the
//! unperturbed and perturbed spectral subspaces and certify every applicable
//! bound, including the stepwise path construction along the kappa partition
//! and the norm-continuity bounds along the coupling homotopy `A + t V`.

use crate::bounds::{c0, constants, kappa, m_kmm, m_ms, m_star, n_sharp};
use crate::error::{Error, Result};
use crate::geometry::{angular_data, maximal_angle, subspace_sin_max, Projector};
use crate::matrix::{EigenDecomposition, Matrix, SymmetricMatrix};
use crate::scalar::{real, scaled_tol, to_f64, Real};
use crate::spectral::{classify_eigenvalues, gap_from_classes, SpectralSet};
use crate::sylvester::RiccatiData;

/// A perturbation instance with its derived quantities.
#[derive(Debug, Clone)]
pub struct PerturbationProblem<T> {
    pub a: SymmetricMatrix<T>,
    pub sigma: SpectralSet<T>,
    pub v: SymmetricMatrix<T>,
    pub l: SymmetricMatrix<T>,
    /// Gap between the selected and unselected eigenvalues of `a`.
    pub d: T,
    pub vnorm: T,
    /// `vnorm / d`, strictly below 1/2.
    pub x: T,
    a_eig: EigenDecomposition<T>,
    sigma_mask: Vec<bool>,
}

impl<T: Real> PerturbationProblem<T> {
    /// Validates the construction: `sigma` must select a nonempty proper
    /// subset of the spectrum of `a`, and `||v|| < d/2` strictly.
    pub fn new(
        a: SymmetricMatrix<T>,
        sigma: SpectralSet<T>,
        v: SymmetricMatrix<T>,
    ) -> Result<Self> {
        if a.dim() != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator dimension {} vs perturbation dimension {}",
                a.dim(),
                v.dim()
            )));
        }
        let a_eig = a.eigen()?;
        let tol = scaled_tol::<T>(1e-9) * (T::one() + a.spectral_norm());
        let sigma_mask = classify_eigenvalues(&a_eig.eigenvalues, &sigma, tol)?;
        let d = gap_from_classes(&a_eig.eigenvalues, &sigma_mask)?;
        let vnorm = v.spectral_norm();
        let half = real::<T>(0.5);
        if !(vnorm < half * d) {
            return Err(Error::PerturbationTooLarge {
                vnorm: to_f64(vnorm),
                limit: to_f64(half * d),
            });
        }
        let l = a.add(&v);
        let x = vnorm / d;
        Ok(PerturbationProblem {
            a,
            sigma,
            v,
            l,
            d,
            vnorm,
            x,
            a_eig,
            sigma_mask,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn sigma_mask(&self) -> &[bool] {
        &self.sigma_mask
    }

    /// Eigenvalues of `a` selected by `sigma` (the spectral component).
    pub fn sigma_points(&self) -> Vec<T> {
        masked(&self.a_eig.eigenvalues, &self.sigma_mask, true)
    }

    pub fn complement_points(&self) -> Vec<T> {
        masked(&self.a_eig.eigenvalues, &self.sigma_mask, false)
    }

    pub fn a_eigen(&self) -> &EigenDecomposition<T> {
        &self.a_eig
    }

    fn classification_tol(&self) -> T {
        scaled_tol::<T>(1e-9) * (T::one() + self.a.spectral_norm() + self.vnorm)
    }
}

fn masked<T: Copy>(values: &[T], mask: &[bool], keep: bool) -> Vec<T> {
    values
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m == keep)
        .map(|(&v, _)| v)
        .collect()
}

/// Splits eigenvalues into the class within `radius` of `near` and the rest,
/// requiring an unambiguous dichotomy against `far`.
fn classify_against_points<T: Real>(
    eigenvalues: &[T],
    near: &[T],
    far: &[T],
    radius: T,
    tol: T,
) -> Result<Vec<bool>> {
    eigenvalues
        .iter()
        .map(|&ev| {
            let d_near = min_distance(ev, near);
            let d_far = min_distance(ev, far);
            let in_near = d_near <= radius + tol;
            let in_far = d_far <= radius + tol;
            match (in_near, in_far) {
                (true, false) => Ok(true),
                (false, true) => Ok(false),
                _ => Err(Error::AmbiguousClassification {
                    eigenvalue: to_f64(ev),
                    tol: to_f64(tol),
                }),
            }
        })
        .collect()
}

fn min_distance<T: Real>(x: T, points: &[T]) -> T {
    points
        .iter()
        .map(|&p| (x - p).abs())
        .fold(T::infinity(), |a, b| a.min(b))
}

/// Everything `analyze` computes, including the two projectors for
/// downstream consumers (angular operators, rotations, Riccati blocks).
#[derive(Debug, Clone)]
pub struct Analysis<T> {
    pub record: AnalysisRecord<T>,
    pub unperturbed: Projector<T>,
    pub perturbed: Projector<T>,
    pub l_eigenvalues: Vec<T>,
    pub omega_mask: Vec<bool>,
}

/// One experiment's outputs: the exact angle, every applicable bound, and
/// the pass flags (slack `1e-8` on the angle bounds, `1e-9` on the rest).
#[derive(Debug, Clone)]
pub struct AnalysisRecord<T> {
    pub dim: usize,
    pub d: T,
    pub vnorm: T,
    pub x: T,
    pub theta: T,
    pub acute: bool,
    pub rank_sigma: usize,
    pub rank_omega: usize,
    pub omega: SpectralSet<T>,
    /// Gap between the perturbed component and the rest of `spec(L)`.
    pub delta_omega: T,
    pub bound_mstar: T,
    pub bound_ms: T,
    pub bound_kmm: Option<T>,
    pub pass_mstar: bool,
    pub pass_ms: bool,
    pub pass_kmm: Option<bool>,
    /// A priori pair `d sin(2 theta)` vs `pi ||V||`.
    pub sin2_lhs: T,
    pub sin2_rhs: T,
    pub pass_sin2_apriori: bool,
    pub pass_sin2_posteriori: bool,
    /// Bound at `max{d, delta}`; set by the a posteriori analysis.
    pub bound_combined: Option<T>,
}

impl<T: Real> AnalysisRecord<T> {
    pub fn pass_all(&self) -> bool {
        self.pass_mstar
            && self.pass_ms
            && self.pass_kmm.unwrap_or(true)
            && self.pass_sin2_apriori
            && self.pass_sin2_posteriori
    }
}

const ANGLE_SLACK: f64 = 1e-8;
const CHECK_SLACK: f64 = 1e-9;

/// Full a priori analysis: classifies the perturbed spectrum, computes the
/// exact maximal angle, and evaluates every applicable estimating function.
pub fn analyze_full<T: Real>(p: &PerturbationProblem<T>) -> Result<Analysis<T>> {
    let l_eig = p.l.eigen()?;
    let sigma_pts = p.sigma_points();
    let complement_pts = p.complement_points();
    let tol = p.classification_tol();
    let omega_mask = classify_against_points(
        &l_eig.eigenvalues,
        &sigma_pts,
        &complement_pts,
        p.vnorm,
        tol,
    )?;

    let unperturbed = Projector::from_eigencolumns(&p.a_eig, &p.sigma_mask)?;
    let perturbed = Projector::from_eigencolumns(&l_eig, &omega_mask)?;
    let theta = maximal_angle(&unperturbed, &perturbed)?;
    let omega_pts = masked(&l_eig.eigenvalues, &omega_mask, true);
    let delta_omega = gap_from_classes(&l_eig.eigenvalues, &omega_mask)?;

    let record = build_record(
        p.dim(),
        p.d,
        p.vnorm,
        p.x,
        theta,
        unperturbed.rank(),
        perturbed.rank(),
        SpectralSet::from_points(&omega_pts)?,
        delta_omega,
        None,
    )?;
    let l_eigenvalues = l_eig.eigenvalues.clone();
    Ok(Analysis {
        record,
        unperturbed,
        perturbed,
        l_eigenvalues,
        omega_mask,
    })
}

/// The a priori analysis record alone.
pub fn analyze<T: Real>(p: &PerturbationProblem<T>) -> Result<AnalysisRecord<T>> {
    Ok(analyze_full(p)?.record)
}

#[allow(clippy::too_many_arguments)]
fn build_record<T: Real>(
    dim: usize,
    d: T,
    vnorm: T,
    x: T,
    theta: T,
    rank_sigma: usize,
    rank_omega: usize,
    omega: SpectralSet<T>,
    delta_omega: T,
    bound_combined: Option<T>,
) -> Result<AnalysisRecord<T>> {
    let consts = constants::<T>();
    let angle_slack = scaled_tol::<T>(ANGLE_SLACK);
    let check_slack = scaled_tol::<T>(CHECK_SLACK);
    let bound_mstar = m_star(x)?;
    let bound_ms = m_ms(x)?;
    let bound_kmm = if x <= consts.c_kmm {
        Some(m_kmm(x)?)
    } else {
        None
    };
    let acute = theta < T::FRAC_PI_2();
    let two = real::<T>(2.0);
    let sin2_lhs = d * (two * theta).sin();
    let sin2_rhs = T::PI() * vnorm;
    let sin2_posteriori_lhs = delta_omega * (two * theta).sin();
    Ok(AnalysisRecord {
        dim,
        d,
        vnorm,
        x,
        theta,
        acute,
        rank_sigma,
        rank_omega,
        omega,
        delta_omega,
        bound_mstar,
        bound_ms,
        bound_kmm,
        pass_mstar: theta <= bound_mstar + angle_slack,
        pass_ms: theta <= bound_ms + angle_slack,
        pass_kmm: bound_kmm.map(|b| theta <= b + angle_slack),
        sin2_lhs,
        sin2_rhs,
        // the sin(2 theta) estimates presuppose the acute-angle case
        pass_sin2_apriori: !acute || sin2_lhs <= sin2_rhs + check_slack,
        pass_sin2_posteriori: !acute || sin2_posteriori_lhs <= sin2_rhs + check_slack,
        bound_combined,
    })
}

/// A posteriori analysis: the roles of the operators are swapped. `omega`
/// selects an isolated component of `spec(L)` with gap `delta > 2 ||V||`;
/// the unperturbed component is recovered as the spectrum of `A` inside the
/// `||V||`-neighborhood of the perturbed one, and the bound is evaluated at
/// `||V|| / delta`. When the unperturbed gap `d` is also defined, the record
/// carries the combined bound at `max{d, delta}`.
pub fn analyze_posteriori<T: Real>(
    a: &SymmetricMatrix<T>,
    v: &SymmetricMatrix<T>,
    omega_target: &SpectralSet<T>,
) -> Result<AnalysisRecord<T>> {
    if a.dim() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator dimension {} vs perturbation dimension {}",
            a.dim(),
            v.dim()
        )));
    }
    let l = a.add(v);
    let l_eig = l.eigen()?;
    let tol_l = scaled_tol::<T>(1e-9) * (T::one() + l.spectral_norm());
    let omega_mask = classify_eigenvalues(&l_eig.eigenvalues, omega_target, tol_l)?;
    let delta = gap_from_classes(&l_eig.eigenvalues, &omega_mask)?;
    let vnorm = v.spectral_norm();
    let half = real::<T>(0.5);
    if !(vnorm < half * delta) {
        return Err(Error::PerturbationTooLarge {
            vnorm: to_f64(vnorm),
            limit: to_f64(half * delta),
        });
    }

    let omega_pts = masked(&l_eig.eigenvalues, &omega_mask, true);
    let rest_pts = masked(&l_eig.eigenvalues, &omega_mask, false);
    let a_eig = a.eigen()?;
    let tol = scaled_tol::<T>(1e-9) * (T::one() + a.spectral_norm() + vnorm);
    let sigma_mask =
        classify_against_points(&a_eig.eigenvalues, &omega_pts, &rest_pts, vnorm, tol)?;

    let unperturbed = Projector::from_eigencolumns(&a_eig, &sigma_mask)?;
    let perturbed = Projector::from_eigencolumns(&l_eig, &omega_mask)?;
    let theta = maximal_angle(&unperturbed, &perturbed)?;

    // combined bound when the unperturbed gap is defined as well
    let d = gap_from_classes(&a_eig.eigenvalues, &sigma_mask).ok();
    let bound_combined = match d {
        Some(d) => {
            let best = if d > delta { d } else { delta };
            Some(m_star(vnorm / best)?)
        }
        None => None,
    };

    build_record(
        a.dim(),
        d.unwrap_or(delta),
        vnorm,
        vnorm / delta,
        theta,
        unperturbed.rank(),
        perturbed.rank(),
        SpectralSet::from_points(&omega_pts)?,
        delta,
        bound_combined,
    )
}

/// Report of the generic `sin(2 theta)` estimates for one analysis.
#[derive(Debug, Clone, Copy)]
pub struct Sin2Report<T> {
    /// Set when the pair is not acute and the estimates do not apply.
    pub skipped: bool,
    pub apriori_lhs: T,
    pub apriori_rhs: T,
    pub pass_apriori: bool,
    pub posteriori_lhs: T,
    pub pass_posteriori: bool,
    /// Half-arcsin refinement, available when `||V|| <= c_pi4 * d`.
    pub refined_bound: Option<T>,
    pub pass_refined: Option<bool>,
}

/// Certifies `d sin(2 theta) <= pi ||V||` (a priori),
/// `dist(omega, Omega) sin(2 theta) <= pi ||V||` (a posteriori), and the
/// half-arcsin refinement below the `pi/4` threshold.
pub fn sin2theta_check<T: Real>(
    p: &PerturbationProblem<T>,
    record: &AnalysisRecord<T>,
) -> Sin2Report<T> {
    let slack = scaled_tol::<T>(CHECK_SLACK);
    let two = real::<T>(2.0);
    let sin2 = (two * record.theta).sin();
    let apriori_lhs = p.d * sin2;
    let apriori_rhs = T::PI() * p.vnorm;
    let posteriori_lhs = record.delta_omega * sin2;
    if !record.acute {
        return Sin2Report {
            skipped: true,
            apriori_lhs,
            apriori_rhs,
            pass_apriori: true,
            posteriori_lhs,
            pass_posteriori: true,
            refined_bound: None,
            pass_refined: None,
        };
    }
    let consts = constants::<T>();
    let (refined_bound, pass_refined) = if p.vnorm <= consts.c_pi4 * p.d {
        let bound = real::<T>(0.5) * (T::PI() * p.vnorm / p.d).asin();
        (Some(bound), Some(record.theta <= bound + slack))
    } else {
        (None, None)
    };
    Sin2Report {
        skipped: false,
        apriori_lhs,
        apriori_rhs,
        pass_apriori: apriori_lhs <= apriori_rhs + slack,
        posteriori_lhs,
        pass_posteriori: posteriori_lhs <= apriori_rhs + slack,
        refined_bound,
        pass_refined,
    }
}

/// One segment of the kappa-path construction.
#[derive(Debug, Clone, Copy)]
pub struct PathStep<T> {
    /// Index of the segment start on the kappa partition.
    pub j: usize,
    /// Coupling constant of the segment start (`kappa_j / x`).
    pub t: T,
    /// Norm of the segment perturbation.
    pub w_norm: T,
    /// Actual gap of the segment-start operator's spectrum.
    pub delta_j: T,
    /// Guaranteed floor `d (1 - 2 kappa_j)` for that gap.
    pub delta_floor: T,
    /// Maximal angle between consecutive spectral subspaces.
    pub theta_step: T,
    /// Half-arcsin bound for the segment.
    pub step_bound: T,
    pub within_bound: bool,
    pub within_c0: bool,
    pub delta_floor_ok: bool,
}

/// Trace of the stepwise construction along the kappa partition.
#[derive(Debug, Clone)]
pub struct PathTrace<T> {
    /// `n_sharp(x)`: the trace has `n + 1` segments.
    pub n: usize,
    pub steps: Vec<PathStep<T>>,
    /// Sum of the segment angles.
    pub sum: T,
    /// Direct maximal angle between the endpoint subspaces.
    pub theta_direct: T,
    /// Triangle inequality `theta_direct <= sum + 1e-9`.
    pub triangle_ok: bool,
}

impl<T: Real> PathTrace<T> {
    pub fn all_ok(&self) -> bool {
        self.triangle_ok
            && self
                .steps
                .iter()
                .all(|s| s.within_bound && s.within_c0 && s.delta_floor_ok)
    }
}

/// Walks the intermediate operators `L_j = A + kappa_j (d / ||V||) V` up to
/// `n = n_sharp(x)` and then to `L` itself, certifying each segment angle
/// against its half-arcsin bound and against the step constant `C0`, and the
/// direct angle against the telescoped sum.
pub fn kappa_path<T: Real>(p: &PerturbationProblem<T>) -> Result<PathTrace<T>> {
    let slack = scaled_tol::<T>(CHECK_SLACK);
    let tol = p.classification_tol();
    let c0_val = c0::<T>();

    if p.vnorm == T::zero() {
        let proj = Projector::from_eigencolumns(p.a_eigen(), p.sigma_mask())?;
        let step = PathStep {
            j: 0,
            t: T::zero(),
            w_norm: T::zero(),
            delta_j: p.d,
            delta_floor: p.d,
            theta_step: maximal_angle(&proj, &proj)?,
            step_bound: T::zero(),
            within_bound: true,
            within_c0: true,
            delta_floor_ok: true,
        };
        return Ok(PathTrace {
            n: 0,
            steps: vec![step],
            sum: T::zero(),
            theta_direct: T::zero(),
            triangle_ok: true,
        });
    }

    let n = n_sharp(p.x)?;
    let half = real::<T>(0.5);
    let two = real::<T>(2.0);

    // segment start data: operator eigensystem, component mask, projector
    let mut eig = p.a_eigen().clone();
    let mut mask = p.sigma_mask().to_vec();
    let mut proj = Projector::from_eigencolumns(&eig, &mask)?;
    let start_proj = proj.clone();

    let mut steps = Vec::with_capacity(n + 1);
    let mut sum = T::zero();

    for j in 0..=n {
        let k_j: T = kappa(j);
        let k_next: T = if j < n { kappa(j + 1) } else { p.x };
        let t_j = k_j / p.x;
        let w_norm = (k_next - k_j) * p.d;
        let delta_j = gap_from_classes(&eig.eigenvalues, &mask)?;
        let delta_floor = p.d * (T::one() - two * k_j);

        // next operator along the path: L for the final segment
        let next = if j < n {
            p.a.add_scaled(k_next / p.x, &p.v)
        } else {
            p.l.clone()
        };
        let next_eig = next.eigen()?;
        let near = masked(&eig.eigenvalues, &mask, true);
        let far = masked(&eig.eigenvalues, &mask, false);
        let next_mask = classify_against_points(&next_eig.eigenvalues, &near, &far, w_norm, tol)?;
        let next_proj = Projector::from_eigencolumns(&next_eig, &next_mask)?;

        let theta_step = maximal_angle(&proj, &next_proj)?;
        let step_bound = half * crate::bounds::checked_asin(T::PI() * w_norm / delta_j)?;
        steps.push(PathStep {
            j,
            t: t_j,
            w_norm,
            delta_j,
            delta_floor,
            theta_step,
            step_bound,
            within_bound: theta_step <= step_bound + slack,
            within_c0: theta_step <= c0_val + slack,
            delta_floor_ok: delta_j >= delta_floor - slack,
        });
        sum += theta_step;

        eig = next_eig;
        mask = next_mask;
        proj = next_proj;
    }

    let theta_direct = maximal_angle(&start_proj, &proj)?;
    Ok(PathTrace {
        n,
        steps,
        sum,
        theta_direct,
        triangle_ok: theta_direct <= sum + slack,
    })
}

/// Certification report for the projection path `t -> Gamma(t)` along
/// `A + t V` over a partition of `[a, b] in [0, 1]`.
#[derive(Debug, Clone)]
pub struct ProjectionPathReport<T> {
    pub points: usize,
    pub rank: usize,
    /// All pairwise norm bounds `||Gamma(t) - Gamma(s)||
    /// <= (pi/2) ||V|| |t - s| / (d - ||V||(t + s))` hold.
    pub pairwise_ok: bool,
    /// Smallest slack `bound - norm` over all pairs.
    pub min_pairwise_slack: T,
    /// Sum of adjacent norms along the partition.
    pub length: T,
    /// `(pi/4) log((d - 2a||V||) / (d - 2b||V||))`.
    pub log_bound: T,
    pub length_ok: bool,
    /// `arcsin ||Gamma(b) - Gamma(a)||`.
    pub endpoint_angle: T,
    /// Endpoint angle against the logarithmic bound.
    pub ms_ok: bool,
    /// Sum of adjacent maximal angles (arcsines of the adjacent norms).
    pub angle_sum: T,
    /// Endpoint angle against the telescoped angle sum.
    pub triangle_ok: bool,
}

impl<T: Real> ProjectionPathReport<T> {
    pub fn all_ok(&self) -> bool {
        self.pairwise_ok && self.length_ok && self.ms_ok && self.triangle_ok
    }
}

/// Computes the spectral projections `Gamma(t_k)` of `A + t_k V` associated
/// with the perturbed component of `sigma` and certifies the pairwise norm
/// bounds, the logarithmic length bound, and the endpoint inequalities.
pub fn projection_path<T: Real>(
    p: &PerturbationProblem<T>,
    partition: &[T],
) -> Result<ProjectionPathReport<T>> {
    if partition.len() < 2 {
        return Err(Error::Validation(
            "partition needs at least two points".into(),
        ));
    }
    for w in partition.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Validation(
                "partition must be strictly increasing".into(),
            ));
        }
    }
    if partition[0] < T::zero() || *partition.last().unwrap() > T::one() {
        return Err(Error::Validation("partition must lie in [0, 1]".into()));
    }

    let slack = scaled_tol::<T>(CHECK_SLACK);
    let tol = p.classification_tol();
    let sigma_pts = p.sigma_points();
    let complement_pts = p.complement_points();
    let rank = sigma_pts.len();

    // basis of Gamma(t) for every partition point
    let mut bases: Vec<Matrix<T>> = Vec::with_capacity(partition.len());
    for &t in partition {
        let lt = p.a.add_scaled(t, &p.v);
        let eig = lt.eigen()?;
        let mask =
            classify_against_points(&eig.eigenvalues, &sigma_pts, &complement_pts, p.vnorm, tol)?;
        let proj = Projector::from_eigencolumns(&eig, &mask)?;
        if proj.rank() != rank {
            return Err(Error::Internal(format!(
                "projection rank changed along the path: {} vs {}",
                proj.rank(),
                rank
            )));
        }
        bases.push(proj.basis().clone());
    }

    let m = partition.len();
    let half_pi = T::FRAC_PI_2();
    let mut pairwise_ok = true;
    let mut min_slack = T::infinity();
    for i in 0..m {
        for j in (i + 1)..m {
            let norm = subspace_sin_max(&bases[i], &bases[j]);
            let denom = p.d - p.vnorm * (partition[i] + partition[j]);
            let bound = half_pi * p.vnorm * (partition[j] - partition[i]) / denom;
            let gap = bound - norm;
            min_slack = min_slack.min(gap);
            if norm > bound + slack {
                pairwise_ok = false;
            }
        }
    }

    let mut length = T::zero();
    let mut angle_sum = T::zero();
    for k in 0..m - 1 {
        let norm = subspace_sin_max(&bases[k], &bases[k + 1]);
        length += norm;
        angle_sum += norm.min(T::one()).asin();
    }
    let two = real::<T>(2.0);
    let a = partition[0];
    let b = partition[m - 1];
    let log_bound =
        T::PI() / real::<T>(4.0) * ((p.d - two * a * p.vnorm) / (p.d - two * b * p.vnorm)).ln();
    let endpoint_norm = subspace_sin_max(&bases[0], &bases[m - 1]);
    let endpoint_angle = endpoint_norm.min(T::one()).asin();

    Ok(ProjectionPathReport {
        points: m,
        rank,
        pairwise_ok,
        min_pairwise_slack: min_slack,
        length,
        log_bound,
        length_ok: length <= log_bound + slack,
        endpoint_angle,
        ms_ok: endpoint_angle <= log_bound + slack,
        angle_sum,
        triangle_ok: endpoint_angle <= angle_sum + slack,
    })
}

/// Block data of `L` in the frame adapted to the unperturbed subspace,
/// together with the extracted angular operator. The Riccati residual of
/// this data is small exactly because the perturbed subspace is a reducing
/// graph subspace.
pub fn riccati_data<T: Real>(
    p: &PerturbationProblem<T>,
    analysis: &Analysis<T>,
) -> Result<RiccatiData<T>> {
    let data = angular_data(&analysis.unperturbed, &analysis.perturbed)?;
    let x = data.x.ok_or(Error::NotAcute {
        theta: to_f64(data.theta),
    })?;
    let frame = analysis.unperturbed.adapted_frame()?;
    let r = analysis.unperturbed.rank();
    let n = p.dim();
    let l_frame = frame.transpose().matmul(p.l.matrix()).matmul(&frame);
    let d0 = SymmetricMatrix::new(l_frame.block(0, r, 0, r))?;
    let d1 = SymmetricMatrix::new(l_frame.block(r, n, r, n))?;
    let b = l_frame.block(0, r, r, n);
    RiccatiData::new(d0, d1, b, x)
}
