//! Property and invariant suites: the metric structure of the maximal
//! angle, ensemble-level invariants of the analysis, and randomized checks
//! of the numeric plumbing.

use proptest::prelude::*;

use spb_core::bounds::{constants, kappa, m_kmm, m_ms, m_star, n_sharp, q_ratio};
use spb_core::ensemble::{generate_problem, EnsembleConfig};
use spb_core::geometry::{maximal_angle, relative_angle};
use spb_core::lab::{
    analyze_full, analyze_posteriori, kappa_path, projection_path, sin2theta_check,
};
use spb_core::matrix::{read_symmetric_text, write_symmetric_text, Matrix};
use spb_core::random::{random_projector, random_symmetric, SplitMix64};
use spb_core::spectral::SpectralSet;
use spb_core::sylvester::{riccati_residual, transformed_sylvester};

#[test]
fn triangle_inequality_for_maximal_angles() {
    let mut rng = SplitMix64::new(0x3a_2024);
    for case in 0..1000 {
        let dim = rng.next_usize(2, 10);
        let rp = rng.next_usize(1, dim - 1);
        let rq = rng.next_usize(1, dim - 1);
        let rr = rng.next_usize(1, dim - 1);
        let p = random_projector::<f64>(dim, rp, rng.next_u64());
        let q = random_projector::<f64>(dim, rq, rng.next_u64());
        let r = random_projector::<f64>(dim, rr, rng.next_u64());
        let pq = maximal_angle(&p, &q).unwrap();
        let pr = maximal_angle(&p, &r).unwrap();
        let rq_angle = maximal_angle(&r, &q).unwrap();
        assert!(
            pq <= pr + rq_angle + 1e-9,
            "case {case}: {pq} > {pr} + {rq_angle}"
        );
    }
}

#[test]
fn relative_angle_max_identity() {
    let mut rng = SplitMix64::new(0x3b_2024);
    for case in 0..200 {
        let dim = rng.next_usize(2, 9);
        let rp = rng.next_usize(1, dim - 1);
        let rq = rng.next_usize(1, dim - 1);
        let p = random_projector::<f64>(dim, rp, rng.next_u64());
        let q = random_projector::<f64>(dim, rq, rng.next_u64());
        let theta = maximal_angle(&p, &q).unwrap();
        let fwd = relative_angle(&p, &q).unwrap();
        let bwd = relative_angle(&q, &p).unwrap();
        // the identity is exact at the sine level; near pi/2 the arcsin is
        // infinitely steep, so the angle comparison only makes sense away
        // from the right endpoint
        let sine_gap = (theta.sin() - fwd.max(bwd).sin()).abs();
        assert!(sine_gap < 1e-12, "case {case}: sine gap {sine_gap:e}");
        if theta < std::f64::consts::FRAC_PI_2 - 1e-3 {
            assert!(
                (theta - fwd.max(bwd)).abs() < 1e-10,
                "case {case}: angle identity fails away from pi/2"
            );
        }
    }
}

#[test]
fn ensemble_records_satisfy_structural_invariants() {
    let config = EnsembleConfig {
        master_seed: 0x3c_2024,
        dim_range: (2, 30),
        x_range: (0.01, 0.49),
    };
    let c_star = constants::<f64>().c_star;
    for trial in 0..150u64 {
        let g = generate_problem::<f64>(&config, trial).unwrap();
        let analysis = analyze_full(&g.problem).unwrap();
        let record = &analysis.record;

        // the perturbed component sits inside the inflated unperturbed one
        let tol = 1e-9 * (1.0 + g.problem.a.spectral_norm() + g.problem.vnorm);
        let inflated = SpectralSet::merged(
            g.problem
                .sigma_points()
                .iter()
                .map(|&p| (p - record.vnorm - tol, p + record.vnorm + tol))
                .collect(),
        )
        .unwrap();
        for &(lo, hi) in record.omega.intervals() {
            assert!(
                inflated.contains(lo) && inflated.contains(hi),
                "trial {trial}: omega escapes the perturbed neighborhood"
            );
        }

        // rank preservation in the acute regime
        if record.x < c_star {
            assert_eq!(record.rank_sigma, record.rank_omega, "trial {trial}");
        }
        // bound ordering realized on data
        assert!(record.theta <= record.bound_mstar + 1e-8);
        assert!(record.bound_mstar < record.bound_ms);

        // half-arcsin refinement in the small-coupling regime
        let sin2 = sin2theta_check(&g.problem, record);
        if let Some(pass) = sin2.pass_refined {
            assert!(pass, "trial {trial}: refined bound violated");
        }
    }
}

#[test]
fn posteriori_ensemble_never_violates_its_bound() {
    let config = EnsembleConfig {
        master_seed: 0x4a_2024,
        dim_range: (2, 25),
        x_range: (0.01, 0.49),
    };
    let mut certified = 0usize;
    for trial in 0..150u64 {
        let g = generate_problem::<f64>(&config, trial).unwrap();
        let analysis = analyze_full(&g.problem).unwrap();
        // hand the perturbed component back as the target set
        match analyze_posteriori(&g.problem.a, &g.problem.v, &analysis.record.omega) {
            Ok(record) => {
                assert!(
                    record.pass_all(),
                    "trial {trial}: posteriori bound violated"
                );
                assert!(
                    (record.theta - analysis.record.theta).abs() < 1e-10,
                    "trial {trial}: angle changed between viewpoints"
                );
                // the combined bound is at least as strong as either side
                let combined = record.bound_combined.unwrap();
                assert!(combined <= record.bound_mstar + 1e-12);
                assert!(record.theta <= combined + 1e-8);
                certified += 1;
            }
            // the perturbed gap can fall below 2 ||V||; that is a valid
            // precondition failure, not a bound violation
            Err(spb_core::Error::PerturbationTooLarge { .. }) => {}
            Err(e) => panic!("trial {trial}: unexpected error {e}"),
        }
    }
    assert!(
        certified > 100,
        "only {certified} instances were certifiable"
    );
}

#[test]
fn kappa_path_segment_count_matches_n_sharp() {
    let config = EnsembleConfig {
        master_seed: 0x3d_2024,
        dim_range: (3, 16),
        x_range: (0.05, 0.49),
    };
    for trial in 0..60u64 {
        let g = generate_problem::<f64>(&config, trial).unwrap();
        let trace = kappa_path(&g.problem).unwrap();
        assert_eq!(trace.steps.len(), n_sharp(g.problem.x).unwrap() + 1);
        assert!(trace.all_ok());
    }
}

#[test]
fn projection_path_length_monotone_under_refinement() {
    let config = EnsembleConfig {
        master_seed: 0x3e_2024,
        dim_range: (12, 12),
        x_range: (0.35, 0.45),
    };
    let g = generate_problem::<f64>(&config, 1).unwrap();
    let mut prev = 0.0;
    for m in [2usize, 4, 8, 16, 32, 64] {
        let partition: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
        let report = projection_path(&g.problem, &partition).unwrap();
        assert!(report.all_ok(), "bounds fail at {m} intervals");
        assert!(
            report.length >= prev - 1e-12,
            "length decreased under refinement at {m} intervals"
        );
        prev = report.length;
    }
}

#[test]
fn transformed_blocks_are_similar_to_their_untransformed_forms() {
    // eigenvalues of lambda0 must solve det(z0 - lambda I) = 0; certify via
    // the smallest singular value, plus the exact trace identity
    let config = EnsembleConfig {
        master_seed: 0x3f_2024,
        dim_range: (3, 10),
        x_range: (0.05, 0.4),
    };
    for trial in 0..40u64 {
        let g = generate_problem::<f64>(&config, trial).unwrap();
        let analysis = analyze_full(&g.problem).unwrap();
        let r = spb_core::lab::riccati_data(&g.problem, &analysis).unwrap();
        assert!(riccati_residual(&r) < 1e-8 * (1.0 + g.problem.l.spectral_norm()));
        let t = transformed_sylvester(&r).unwrap();
        assert!(t.residual < 1e-8 * (1.0 + g.problem.l.spectral_norm()));

        let (lam0, _) = spb_core::sylvester::eigenvalues_of_near_symmetric(&t.lambda0).unwrap();
        let n0 = t.z0.rows();
        let trace_z0: f64 = (0..n0).map(|i| t.z0.get(i, i)).sum();
        let trace_lam: f64 = lam0.iter().sum();
        assert!(
            (trace_z0 - trace_lam).abs() < 1e-8 * (1.0 + trace_z0.abs()),
            "trial {trial}: traces differ"
        );
        for &lam in &lam0 {
            let shifted = t.z0.sub(&Matrix::identity(n0).scaled(lam));
            let sigma_min = smallest_singular_value(&shifted);
            assert!(
                sigma_min < 1e-7 * (1.0 + g.problem.l.spectral_norm()),
                "trial {trial}: {lam} is not an eigenvalue of z0 (sigma_min {sigma_min})"
            );
        }
    }
}

fn smallest_singular_value(m: &Matrix<f64>) -> f64 {
    let g = m.transpose().matmul(m);
    let (lo, _) = spb_core::matrix::sym_extreme_eigenvalues(&g);
    lo.max(0.0).sqrt()
}

#[test]
fn f32_lane_smoke() {
    use spb_core::lab::PerturbationProblem;
    use spb_core::matrix::SymmetricMatrix;
    let a = SymmetricMatrix::<f32>::diagonal(&[0.0, 1.0]);
    let sigma = SpectralSet::single(-0.1f32, 0.1).unwrap();
    let v = SymmetricMatrix::from_fn(2, |i, j| if i != j { 0.2f32 } else { 0.0 });
    let p = PerturbationProblem::new(a, sigma, v).unwrap();
    let record = spb_core::lab::analyze(&p).unwrap();
    let exact = 0.5 * (0.4f32).atan();
    assert!((record.theta - exact).abs() < 1e-5);
    assert!(record.pass_all());
}

proptest! {
    #[test]
    fn m_star_monotone_on_random_pairs(a in 0.0..0.499f64, b in 0.0..0.499f64) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(m_star(lo).unwrap() < m_star(hi).unwrap());
    }

    #[test]
    fn bound_ordering_at_random_points(x in 1e-6..0.38f64) {
        let star = m_star(x).unwrap();
        let ms = m_ms(x).unwrap();
        let kmm = m_kmm(x).unwrap();
        prop_assert!(star < ms && ms < kmm);
    }

    #[test]
    fn kappa_recurrence_at_random_index(n in 1usize..30) {
        let q = q_ratio::<f64>();
        let step = 4.0 / (std::f64::consts::PI.powi(2) + 4.0);
        let lhs = kappa::<f64>(n);
        let rhs = step + q * kappa::<f64>(n - 1);
        prop_assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn n_sharp_brackets_its_argument(x in 0.0..0.4999f64) {
        let n = n_sharp(x).unwrap();
        prop_assert!(kappa::<f64>(n) <= x);
        prop_assert!(x < kappa::<f64>(n + 1));
    }

    #[test]
    fn neighborhood_contains_the_set(lo in -5.0..5.0f64, len in 0.0..3.0f64, r in 0.0..2.0f64) {
        let s = SpectralSet::single(lo, lo + len).unwrap();
        let inflated = s.neighborhood(r).unwrap();
        prop_assert!(inflated.contains(lo) && inflated.contains(lo + len));
        prop_assert!(inflated.contains(lo - r) && inflated.contains(lo + len + r));
        prop_assert!(!inflated.contains(lo - r - 1e-9));
    }

    #[test]
    fn matrix_text_roundtrip(dim in 1usize..6, seed in any::<u64>()) {
        let m = random_symmetric::<f64>(dim, seed);
        let back = read_symmetric_text::<f64>(&write_symmetric_text(&m)).unwrap();
        prop_assert_eq!(m.matrix(), back.matrix());
    }

    #[test]
    fn projector_differences_are_contractions(
        dim in 2usize..8,
        rp in 1usize..7,
        rq in 1usize..7,
        seed in any::<u64>(),
    ) {
        prop_assume!(rp < dim && rq < dim);
        let p = random_projector::<f64>(dim, rp, seed);
        let q = random_projector::<f64>(dim, rq, seed ^ 0x5555);
        prop_assert!(p.matrix().sub(q.matrix()).spectral_norm() <= 1.0 + 1e-12);
    }
}
