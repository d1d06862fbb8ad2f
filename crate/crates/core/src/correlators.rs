//! Normally ordered moments and the witnesses built from them: the
//! normalized intensity-field correlation `g^(3/2)`, the connected correlator
//! `G_c^(3/2)` and the 3x3 moment determinant `D^(3)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{expectation, DensityMatrix, Ladder, TruncationPolicy};
use crate::gcs::{gcs_density, wrap_phase, PHASE_FLOOR};
use crate::loss::GcsMixture;

use Ladder::{Annihilate as A, Create as C};

/// Below this `|<n><a_theta>|` the normalized correlation is reported as absent.
pub const DIV_FLOOR: f64 = 1e-12;
/// `D^(3) < -D3_TOL` flags nonclassicality.
pub const D3_TOL: f64 = 1e-10;
/// Largest imaginary residue tolerated on a Hermitian moment.
pub const IMAG_TOL: f64 = 1e-10;

/// The five real moments entering the `D^(3)` determinant, at one quadrature angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// `<a_theta>`
    pub mean_quad: f64,
    /// `<n>`
    pub mean_n: f64,
    /// `<:a_theta^2:>`
    pub quad_sq: f64,
    /// `<:n a_theta:>`
    pub n_quad: f64,
    /// `<:n^2:>`
    pub n_sq: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceNote {
    Ok,
    /// `<n><a_theta>` fell below [`DIV_FLOOR`]; `g^(3/2)` is undefined.
    QuadOrthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    pub moments: MomentSet,
    pub g32: Option<f64>,
    pub gc32: f64,
    pub d3: f64,
    pub nonclassical: bool,
    pub divergence_note: DivergenceNote,
}

fn real_part(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * (1.0 + z.re.abs()) {
        return Err(Error::invalid(format!(
            "{what} has imaginary residue {:.3e}; density matrix is not Hermitian",
            z.im
        )));
    }
    Ok(z.re)
}

/// Complex `<a>`.
pub fn mean_field(rho: &DensityMatrix) -> Result<Complex64> {
    expectation(rho, &[A])
}

/// `arg <a>` of a density matrix, wrapped to `(-pi, pi]`.
pub fn state_phase(rho: &DensityMatrix) -> Result<f64> {
    let a = mean_field(rho)?;
    if a.norm() < PHASE_FLOOR {
        return Err(Error::UndefinedPhase(a.norm()));
    }
    Ok(wrap_phase(a.arg()))
}

pub fn moments_from_density(rho: &DensityMatrix, theta: f64) -> Result<MomentSet> {
    let a = expectation(rho, &[A])?;
    let ad = expectation(rho, &[C])?;
    let n = expectation(rho, &[C, A])?;
    let aa = expectation(rho, &[A, A])?;
    let adad = expectation(rho, &[C, C])?;
    let ada = expectation(rho, &[C, A, A])?;
    let adada = expectation(rho, &[C, C, A])?;
    let n2 = expectation(rho, &[C, C, A, A])?;

    let e1 = Complex64::from_polar(1.0, theta);
    let e2 = Complex64::from_polar(1.0, 2.0 * theta);
    let mean_quad = (a * e1.conj() + ad * e1) * 0.5;
    let quad_sq = (aa * e2.conj() + n * 2.0 + adad * e2) * 0.25;
    let n_quad = (ada * e1.conj() + adada * e1) * 0.5;

    Ok(MomentSet {
        mean_quad: real_part(mean_quad, "<a_theta>")?,
        mean_n: real_part(n, "<n>")?,
        quad_sq: real_part(quad_sq, "<:a_theta^2:>")?,
        n_quad: real_part(n_quad, "<:n a_theta:>")?,
        n_sq: real_part(n2, "<:n^2:>")?,
        theta,
    })
}

/// `<:n a_theta:> / (<n><a_theta>)`, absent below [`DIV_FLOOR`].
pub fn g32(m: &MomentSet) -> Option<f64> {
    g32_with_floor(m, DIV_FLOOR)
}

pub fn g32_with_floor(m: &MomentSet, floor: f64) -> Option<f64> {
    let denom = m.mean_n * m.mean_quad;
    if denom.abs() < floor {
        None
    } else {
        Some(m.n_quad / denom)
    }
}

/// `<:n a_theta:> - <n><a_theta>`.
pub fn gc32(m: &MomentSet) -> f64 {
    m.n_quad - m.mean_n * m.mean_quad
}

/// Determinant of the 3x3 moment matrix, expanded along the first row.
pub fn d3(m: &MomentSet) -> f64 {
    let (q, n, s, c, w) = (m.mean_quad, m.mean_n, m.quad_sq, m.n_quad, m.n_sq);
    (s * w - c * c) - q * (q * w - c * n) + n * (q * c - s * n)
}

/// The same determinant written as variance product minus a square:
/// `(<:a_theta^2:> - <a_theta>^2)(<:n^2:> - <n>^2) - G_c^2`.
pub fn d3_expanded(m: &MomentSet) -> f64 {
    let var_quad = m.quad_sq - m.mean_quad * m.mean_quad;
    let var_n = m.n_sq - m.mean_n * m.mean_n;
    var_quad * var_n - gc32(m).powi(2)
}

/// Second-line form `(<a_theta><n>)^2 (g - 1)^2`, only when `g` is defined.
pub fn d3_expanded_normalized(m: &MomentSet) -> Option<f64> {
    let g = g32(m)?;
    let var_quad = m.quad_sq - m.mean_quad * m.mean_quad;
    let var_n = m.n_sq - m.mean_n * m.mean_n;
    Some(var_quad * var_n - (m.mean_quad * m.mean_n).powi(2) * (g - 1.0).powi(2))
}

pub fn report_from_moments(moments: MomentSet) -> WitnessReport {
    let g = g32(&moments);
    let d = d3(&moments);
    WitnessReport {
        moments,
        g32: g,
        gc32: gc32(&moments),
        d3: d,
        nonclassical: d < -D3_TOL,
        divergence_note: if g.is_some() {
            DivergenceNote::Ok
        } else {
            DivergenceNote::QuadOrthogonal
        },
    }
}

pub fn witness(rho: &DensityMatrix, theta: f64) -> Result<WitnessReport> {
    Ok(report_from_moments(moments_from_density(rho, theta)?))
}

/// `G_c^(3/2)` of a mixture as the weighted sum over its pure components.
///
/// Exact only because every component shares `<n> = |alpha|^2`, which
/// [`GcsMixture`] enforces on construction.
pub fn mixture_gc32(mix: &GcsMixture, theta: f64, policy: &TruncationPolicy) -> Result<f64> {
    let mut total = 0.0;
    for (weight, params) in mix.components() {
        let m = moments_from_density(&gcs_density(params, policy)?, theta)?;
        total += weight * gc32(&m);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{pure_to_density, FockVector};
    use crate::gcs::{build_gcs, kerr_intensity_field, kerr_state_phase, GcsParams};
    use crate::loss::mixture_to_density;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use std::f64::consts::PI;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn coherent_rho(alpha: f64, phi: f64) -> DensityMatrix {
        gcs_density(&GcsParams::coherent(alpha, phi).unwrap(), &policy()).unwrap()
    }

    #[test]
    fn coherent_moments_factorize() {
        let m = moments_from_density(&coherent_rho(1.0, 0.0), 0.0).unwrap();
        for v in [m.mean_quad, m.mean_n, m.n_quad, m.n_sq, m.quad_sq] {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-11);
        }
        let r = report_from_moments(m);
        assert_abs_diff_eq!(r.g32.unwrap(), 1.0, epsilon = 1e-11);
        assert_abs_diff_eq!(r.gc32, 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!(r.d3, 0.0, epsilon = 1e-10);
        assert!(!r.nonclassical);
    }

    #[test]
    fn fock_one_moments() {
        let rho = pure_to_density(&FockVector::basis(1, 8).unwrap());
        for &theta in &[0.0, 1.0, 2.5] {
            let m = moments_from_density(&rho, theta).unwrap();
            assert_eq!(m.mean_quad, 0.0);
            assert_eq!(m.mean_n, 1.0);
            assert_eq!(m.n_sq, 0.0);
        }
        let m = moments_from_density(&rho, 0.0).unwrap();
        // antibunching: variance of n is negative in normal order
        assert!(d3(&m) < 0.0);
        assert!(witness(&rho, 0.0).unwrap().nonclassical);
    }

    #[test]
    fn kerr_intensity_field_matches_closed_form() {
        let p = GcsParams::kerr(1.0, 0.0, 0.3).unwrap();
        let m = moments_from_density(&gcs_density(&p, &policy()).unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(m.n_quad, kerr_intensity_field(&p, 0.0).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn kerr_quarter_period_values() {
        let p = GcsParams::kerr(1.0, 0.0, PI / 4.0).unwrap();
        let rho = gcs_density(&p, &policy()).unwrap();
        let theta = kerr_state_phase(&p).unwrap();
        let m = moments_from_density(&rho, theta).unwrap();
        assert_abs_diff_eq!(g32(&m).unwrap(), 0.0, epsilon = 1e-10);
        // -<n><a_theta> = -1 * e^{-1}, frozen from substitution of the Kerr closed forms
        assert_abs_diff_eq!(gc32(&m), -0.36787944117144233, epsilon = 1e-10);
    }

    #[test]
    fn vacuum_has_no_g32() {
        let rho = DensityMatrix::vacuum(16).unwrap();
        let r = witness(&rho, 0.3).unwrap();
        assert_eq!(r.g32, None);
        assert_eq!(r.divergence_note, DivergenceNote::QuadOrthogonal);
        assert!(!r.nonclassical);
        assert_eq!(r.gc32, 0.0);
    }

    #[test]
    fn kerr_half_second_is_nonclassical() {
        let p = GcsParams::kerr(1.0, 0.0, 0.5).unwrap();
        let r = witness(&gcs_density(&p, &policy()).unwrap(), kerr_state_phase(&p).unwrap()).unwrap();
        assert!(r.nonclassical);
        assert_abs_diff_eq!(r.g32.unwrap(), 1.0f64.cos(), epsilon = 1e-10);
    }

    #[test]
    fn orthogonal_quadrature_still_witnessed_by_gc32() {
        let p = GcsParams::kerr(1.0, 0.0, 0.5).unwrap();
        let theta = kerr_state_phase(&p).unwrap() + PI / 2.0;
        let r = witness(&gcs_density(&p, &policy()).unwrap(), theta).unwrap();
        assert_eq!(r.g32, None);
        assert!(r.gc32.abs() > 1e-3);
        assert!(r.nonclassical);
    }

    /// Squeezed-vacuum-like state (0.9|0> + 0.4359|2>): negative normally
    /// ordered quadrature variance along the squeezed axis, superbunched n.
    #[test]
    fn squeezed_like_fixture_is_negative() {
        let c2 = (1.0f64 - 0.81).sqrt();
        let v = FockVector::new(vec![
            Complex64::new(0.9, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-c2, 0.0),
        ])
        .unwrap();
        let m = moments_from_density(&pure_to_density(&v), 0.0).unwrap();
        assert!(m.quad_sq - m.mean_quad.powi(2) < 0.0);
        assert!(m.n_sq - m.mean_n.powi(2) > 0.0);
        assert!(d3_expanded(&m) < 0.0);
        assert_abs_diff_eq!(d3(&m), d3_expanded(&m), epsilon = 1e-14);
    }

    #[test]
    fn non_hermitian_input_is_caught() {
        let mut e = Array2::from_elem((3, 3), Complex64::new(0.0, 0.0));
        e[[0, 0]] = Complex64::new(0.5, 0.0);
        e[[1, 1]] = Complex64::new(0.5, 0.0);
        e[[0, 1]] = Complex64::new(0.0, 0.3);
        let rho = DensityMatrix::from_entries_unchecked(e);
        assert!(matches!(moments_from_density(&rho, 0.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn mixture_linearity_examples() {
        let p = GcsParams::kerr(1.0, 0.0, 0.6).unwrap();
        let single = GcsMixture::new(vec![(1.0, p)]).unwrap();
        let pure = gc32(&moments_from_density(&gcs_density(&p, &policy()).unwrap(), 0.0).unwrap());
        assert_abs_diff_eq!(mixture_gc32(&single, 0.0, &policy()).unwrap(), pure, epsilon = 1e-15);

        let mix = GcsMixture::new(vec![(0.5, p), (0.5, p.with_t(-0.6))]).unwrap();
        let linear = mixture_gc32(&mix, 0.0, &policy()).unwrap();
        let dense = gc32(&moments_from_density(&mixture_to_density(&mix, &policy()).unwrap(), 0.0).unwrap());
        assert_abs_diff_eq!(linear, dense, epsilon = 1e-9);

        let coh = GcsMixture::new(vec![
            (0.3, GcsParams::coherent(1.2, 0.0).unwrap()),
            (0.7, GcsParams::coherent(1.2, 2.0).unwrap()),
        ])
        .unwrap();
        assert_abs_diff_eq!(mixture_gc32(&coh, 0.4, &policy()).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn mixture_rejects_different_amplitudes() {
        let err = GcsMixture::new(vec![
            (0.5, GcsParams::kerr(1.0, 0.0, 0.3).unwrap()),
            (0.5, GcsParams::kerr(1.1, 0.0, 0.3).unwrap()),
        ]);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn phase_covariance() {
        let p = GcsParams::new(1.1, 0.3, 3.0, 0.4).unwrap();
        let v = build_gcs(&p, &policy()).unwrap();
        for &chi in &[0.3, PI / 2.0, -2.0] {
            let a = moments_from_density(&pure_to_density(&v), 0.7).unwrap();
            let b = moments_from_density(&pure_to_density(&v.rotated(chi)), 0.7 + chi).unwrap();
            for (x, y) in [
                (a.mean_quad, b.mean_quad),
                (a.mean_n, b.mean_n),
                (a.quad_sq, b.quad_sq),
                (a.n_quad, b.n_quad),
                (a.n_sq, b.n_sq),
            ] {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
        }
    }
}
