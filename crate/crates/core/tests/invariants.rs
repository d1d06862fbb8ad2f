//! Cross-module properties: correlator routes, loss channel and Wigner grid.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use gcs_core::correlators::{d3_expanded, moments_from_density};
use gcs_core::wigner::{state_negativity, wigner_field};
use gcs_core::{
    apply_damping_dense, auto_grid, damp_gcs_analytic, gcs_density, kerr_intensity_field,
    kerr_mean_quadrature, mixture_to_density, negativity, pure_to_density, series_intensity_field,
    series_mean_quadrature, state_phase, witness, DampingChannel, DensityMatrix, FockVector,
    GcsParams, SeriesConfig, TruncationPolicy,
};
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_TOL: f64 = 1e-4;

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn kerr(alpha: f64, t: f64) -> GcsParams {
    GcsParams::kerr(alpha, 0.0, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_routes_agree_for_kerr_states(
        alpha in 0.05f64..2.0,
        phi in -PI..PI,
        t in 0.0f64..PI,
        theta in -PI..PI,
    ) {
        let p = GcsParams::kerr(alpha, phi, t).unwrap();
        let m = moments_from_density(&gcs_density(&p, &policy()).unwrap(), theta).unwrap();
        let cfg = SeriesConfig::default();
        let q = [series_mean_quadrature(&p, theta, &cfg).unwrap(), kerr_mean_quadrature(&p, theta).unwrap(), m.mean_quad];
        let c = [series_intensity_field(&p, theta, &cfg).unwrap(), kerr_intensity_field(&p, theta).unwrap(), m.n_quad];
        for v in [q, c] {
            prop_assert!((v[0] - v[1]).abs() < 1e-9 && (v[1] - v[2]).abs() < 1e-9, "{v:?}");
        }
    }

    #[test]
    fn gcs_never_violates_the_determinant_bound(
        alpha in 0.05f64..2.0,
        eps in prop::sample::select(vec![0.5, 1.0, 1.5, 2.0, 3.0]),
        t in 0.0f64..10.0,
        k in 0u32..4,
        theta in -PI..PI,
    ) {
        let p = GcsParams::new(alpha, 0.0, eps, t).unwrap().with_offset(k);
        let r = witness(&gcs_density(&p, &policy()).unwrap(), theta).unwrap();
        prop_assert!(r.d3 <= 1e-10, "d3 = {}", r.d3);
        prop_assert!((r.d3 - d3_expanded(&r.moments)).abs() <= 1e-10);
    }

    #[test]
    fn damped_mixture_stays_poissonian(alpha in 0.1f64..2.0, t in 0.0f64..PI, eta in 0.01f64..1.0) {
        let mix = damp_gcs_analytic(&kerr(alpha, t), eta, None).unwrap();
        let m = moments_from_density(&mixture_to_density(&mix, &policy()).unwrap(), 0.0).unwrap();
        prop_assert!((m.mean_n - eta * alpha * alpha).abs() < 1e-9);
        prop_assert!(m.n_sq - m.mean_n * m.mean_n <= 1e-10 * (1.0 + m.mean_n * m.mean_n));
    }
}

#[test]
fn g32_is_independent_of_loss_at_fixed_theta() {
    for t in [0.15, PI / 4.0, PI / 2.0, 2.0] {
        let p = kerr(1.0, t);
        let theta = state_phase(&gcs_density(&p, &policy()).unwrap()).unwrap();
        let g: Vec<f64> = [1.0, 0.7, 0.3, 0.05, 1e-3]
            .iter()
            .map(|&eta| {
                let rho = mixture_to_density(&damp_gcs_analytic(&p, eta, None).unwrap(), &policy()).unwrap();
                witness(&rho, theta).unwrap().g32.unwrap()
            })
            .collect();
        for v in &g {
            assert_abs_diff_eq!(*v, g[0], epsilon = 1e-8);
        }
    }
}

#[test]
fn damping_preserves_trace_of_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let dim = 10;
        let g = Array2::from_shape_fn((dim, dim), |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let raw = g.dot(&g.t().mapv(|z| z.conj()));
        let tr: f64 = raw.diag().iter().map(|z| z.re).sum();
        let herm = Array2::from_shape_fn((dim, dim), |(i, j)| 0.5 * (raw[[i, j]] + raw[[j, i]].conj()) / tr);
        let rho = DensityMatrix::new(herm).unwrap();
        let eta = rng.random_range(0.05..1.0);
        let out = apply_damping_dense(&rho, &DampingChannel::exact_for_dim(eta, dim).unwrap()).unwrap();
        assert_abs_diff_eq!(out.trace(), rho.trace(), epsilon = 1e-10);
        // the channel never creates coherence beyond what it removes from populations
        assert!(out.populations().iter().all(|p| *p >= -1e-15));
    }
}

fn acceptance_states() -> Vec<(String, DensityMatrix)> {
    let mut v = vec![
        ("fock 1".to_string(), pure_to_density(&FockVector::basis(1, 8).unwrap())),
        ("fock 2".to_string(), pure_to_density(&FockVector::basis(2, 8).unwrap())),
    ];
    for t in [0.15, PI / 4.0, PI / 2.0] {
        v.push((format!("kerr t={t:.3}"), gcs_density(&kerr(1.0, t), &policy()).unwrap()));
    }
    v.push((
        "cubic t=0.36".into(),
        gcs_density(&GcsParams::new(1.0, 0.0, 3.0, 0.36).unwrap(), &policy()).unwrap(),
    ));
    let mix = damp_gcs_analytic(&kerr(1.0, PI / 2.0), 0.7, None).unwrap();
    v.push(("damped kerr".into(), mixture_to_density(&mix, &policy()).unwrap()));
    v
}

#[test]
fn negativity_is_invariant_under_phase_space_rotation() {
    for (name, rho) in acceptance_states() {
        let base = state_negativity(&rho).unwrap();
        for chi in [PI / 4.0, PI / 2.0] {
            let rotated = state_negativity(&rho.rotated(chi)).unwrap();
            assert!((rotated - base).abs() < GRID_TOL, "{name} chi={chi}: {base} vs {rotated}");
        }
    }
}

#[test]
fn negativity_converges_under_grid_refinement() {
    for (name, rho) in acceptance_states() {
        let grid = auto_grid(&rho, 4.0).unwrap();
        let coarse = negativity(&wigner_field(&rho, &grid).unwrap());
        let fine = negativity(&wigner_field(&rho, &grid.refined()).unwrap());
        assert!((coarse - fine).abs() < GRID_TOL, "{name}: {coarse} vs {fine}");
        let wide = gcs_core::PhaseSpaceGrid::new(2.0 * grid.half_extent, 2 * grid.points_per_axis - 1).unwrap();
        let wider = negativity(&wigner_field(&rho, &wide).unwrap());
        assert!((coarse - wider).abs() < GRID_TOL, "{name}: {coarse} vs doubled {wider}");
    }
}

#[test]
fn wigner_integrates_to_the_trace() {
    for (name, rho) in acceptance_states() {
        let w = wigner_field(&rho, &auto_grid(&rho, 4.0).unwrap()).unwrap();
        assert!((w.integral() - rho.trace()).abs() < 5.0 * GRID_TOL, "{name}: {}", w.integral());
    }
}
