//! Generalized coherent states `|alpha_{eps,t,k}>` and their correlators.
//!
//! Amplitudes are `e^{-|alpha|^2/2} alpha^n / sqrt(n!) e^{-i t (n+k)^eps}`. The
//! photon-number distribution is Poissonian for every `(eps, t, k)`; only the
//! Fock phases differ from a coherent state.
//!
//! Three independent routes to `<a_theta>` and `<:n a_theta:>` exist: the
//! Poisson-weighted series here (any `eps`, `k = 0`), the Kerr closed forms
//! (`eps = 2`), and dense moments of the state vector in [`crate::correlators`].

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{choose_dim, pure_to_density, DensityMatrix, FockVector, TruncationPolicy};

/// Default half-width of the band around the poles of `tan` in [`kerr_g32`].
pub const DEFAULT_G_TOL: f64 = 1e-8;

/// Below this `|<a>|` the state phase is reported as undefined.
pub const PHASE_FLOOR: f64 = 1e-14;

/// Parameters of one pure GCS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcsParams {
    pub alpha_mag: f64,
    /// `arg(alpha)` in radians.
    pub alpha_phase: f64,
    /// Nonlinear exponent.
    pub epsilon: f64,
    /// Dimensionless interaction time.
    pub t: f64,
    /// Photon-loss phase offset: phases are `t (n + k)^eps`.
    pub k: u32,
}

impl GcsParams {
    pub fn new(alpha_mag: f64, alpha_phase: f64, epsilon: f64, t: f64) -> Result<Self> {
        let p = Self {
            alpha_mag,
            alpha_phase,
            epsilon,
            t,
            k: 0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Kerr state (`eps = 2`).
    pub fn kerr(alpha_mag: f64, alpha_phase: f64, t: f64) -> Result<Self> {
        Self::new(alpha_mag, alpha_phase, 2.0, t)
    }

    pub fn coherent(alpha_mag: f64, alpha_phase: f64) -> Result<Self> {
        Self::new(alpha_mag, alpha_phase, 0.0, 0.0)
    }

    pub fn with_offset(self, k: u32) -> Self {
        Self { k, ..self }
    }

    pub fn with_t(self, t: f64) -> Self {
        Self { t, ..self }
    }

    pub fn with_alpha_mag(self, alpha_mag: f64) -> Self {
        Self { alpha_mag, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_mag.is_finite() && self.alpha_mag >= 0.0) {
            return Err(Error::invalid(format!(
                "|alpha| must be finite and >= 0, got {}",
                self.alpha_mag
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::invalid(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if !self.t.is_finite() || !self.alpha_phase.is_finite() {
            return Err(Error::invalid("t and arg(alpha) must be finite"));
        }
        Ok(())
    }

    pub fn mean_n(&self) -> f64 {
        self.alpha_mag * self.alpha_mag
    }

    fn require_series_family(&self) -> Result<()> {
        self.validate()?;
        if self.k != 0 {
            return Err(Error::invalid(
                "series correlators are defined for k = 0; use the density-matrix route for k > 0",
            ));
        }
        Ok(())
    }

    fn require_kerr(&self) -> Result<()> {
        self.require_series_family()?;
        if self.epsilon != 2.0 {
            return Err(Error::invalid(format!(
                "Kerr closed forms need epsilon = 2, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// `z_{m} = t m^eps`, reduced mod 2 pi. `0^0 = 1`, `0^eps = 0` for `eps > 0`.
pub fn nonlinear_phase(t: f64, m: u64, epsilon: f64) -> f64 {
    (t * (m as f64).powf(epsilon)).rem_euclid(TAU)
}

/// Builds the truncated state vector. The dimension comes from the Poisson
/// tail of `|alpha|^2` under `policy`.
pub fn build_gcs(p: &GcsParams, policy: &TruncationPolicy) -> Result<FockVector> {
    p.validate()?;
    let dim = choose_dim(p.mean_n(), policy)?;
    build_gcs_with_dim(p, dim)
}

pub fn build_gcs_with_dim(p: &GcsParams, dim: usize) -> Result<FockVector> {
    p.validate()?;
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    if p.alpha_mag == 0.0 {
        amps[0] = Complex64::from_polar(1.0, -nonlinear_phase(p.t, p.k as u64, p.epsilon));
        return FockVector::new(amps);
    }
    let half_x = p.mean_n() / 2.0;
    let ln_alpha = p.alpha_mag.ln();
    let mut ln_fact = 0.0;
    for (n, amp) in amps.iter_mut().enumerate() {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let modulus = (-half_x + n as f64 * ln_alpha - 0.5 * ln_fact).exp();
        let phase = (n as f64 * p.alpha_phase).rem_euclid(TAU)
            - nonlinear_phase(p.t, (n as u64) + p.k as u64, p.epsilon);
        *amp = Complex64::from_polar(modulus, phase);
    }
    FockVector::new(amps)
}

/// `|psi><psi|` of [`build_gcs`].
pub fn gcs_density(p: &GcsParams, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    Ok(pure_to_density(&build_gcs(p, policy)?))
}

/// Stopping controls for the Poisson-weighted series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub rel_tol: f64,
    /// `None` means ten times the truncation dimension for `|alpha|^2`.
    pub max_terms: Option<usize>,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: None,
        }
    }
}

impl SeriesConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_terms == Some(0) {
            return Err(Error::invalid("max_terms must be at least 1"));
        }
        Ok(())
    }

    fn term_budget(&self, mean_n: f64) -> Result<usize> {
        match self.max_terms {
            Some(m) => Ok(m),
            None => Ok(10 * choose_dim(mean_n, &TruncationPolicy::default())?),
        }
    }
}

/// One term of the series: Poisson weight `e^{-|alpha|^2} |alpha|^{2n} / n!`
/// and the phases `z_{n,j} = t (n + j)^eps` for `j = 0, 1, 2` (mod 2 pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTerm {
    pub n: usize,
    pub poisson_weight: f64,
    pub z: [f64; 3],
}

/// Sums `sum_n w_n f(term_n)` with `|f| <= 1`, stopping once the remaining
/// Poisson mass is below `rel_tol` times the mass accumulated so far.
fn poisson_series<T, F>(p: &GcsParams, cfg: &SeriesConfig, zero: T, mut f: F) -> Result<T>
where
    T: std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    F: FnMut(&SeriesTerm) -> T,
{
    cfg.validate()?;
    let x = p.mean_n();
    let budget = cfg.term_budget(x)?;
    let mut acc = zero;
    if x == 0.0 {
        return Ok(acc);
    }
    let ln_x = x.ln();
    let mut ln_fact = 0.0;
    let mut mass = 0.0;
    for n in 0..budget {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let w = (-x + n as f64 * ln_x - ln_fact).exp();
        let nn = n as u64;
        let term = SeriesTerm {
            n,
            poisson_weight: w,
            z: [
                nonlinear_phase(p.t, nn, p.epsilon),
                nonlinear_phase(p.t, nn + 1, p.epsilon),
                nonlinear_phase(p.t, nn + 2, p.epsilon),
            ],
        };
        acc += f(&term) * w;
        mass += w;
        // geometric bound on the tail once the weights decrease
        let ratio = x / (n as f64 + 2.0);
        if ratio < 1.0 {
            let next = w * x / (n as f64 + 1.0);
            let tail = next / (1.0 - ratio);
            if tail <= cfg.rel_tol * (mass + f64::MIN_POSITIVE) {
                return Ok(acc);
            }
        }
    }
    Err(Error::NumericLimit(format!(
        "Poisson series did not converge within {budget} terms (|alpha|^2 = {x})"
    )))
}

/// `<a_theta>` from the Poisson series.
pub fn series_mean_quadrature(p: &GcsParams, theta: f64, cfg: &SeriesConfig) -> Result<f64> {
    p.require_series_family()?;
    let phi = p.alpha_phase;
    let s = poisson_series(p, cfg, 0.0, |term| (phi - theta - term.z[1] + term.z[0]).cos())?;
    Ok(p.alpha_mag * s)
}

/// `<:n a_theta:>` from the Poisson series.
pub fn series_intensity_field(p: &GcsParams, theta: f64, cfg: &SeriesConfig) -> Result<f64> {
    p.require_series_family()?;
    let phi = p.alpha_phase;
    let s = poisson_series(p, cfg, 0.0, |term| (phi - theta - term.z[2] + term.z[1]).cos())?;
    Ok(p.alpha_mag.powi(3) * s)
}

/// Complex `<a>` from the series with the cosine replaced by `exp(i .)`.
pub fn series_mean_field(p: &GcsParams, cfg: &SeriesConfig) -> Result<Complex64> {
    p.require_series_family()?;
    let phi = p.alpha_phase;
    let s = poisson_series(p, cfg, Complex64::new(0.0, 0.0), |term| {
        Complex64::from_polar(1.0, phi - term.z[1] + term.z[0])
    })?;
    Ok(s * p.alpha_mag)
}

/// `arg <a>` for any `eps` (k = 0), wrapped to `(-pi, pi]`.
pub fn gcs_state_phase(p: &GcsParams, cfg: &SeriesConfig) -> Result<f64> {
    let mean = series_mean_field(p, cfg)?;
    if mean.norm() < PHASE_FLOOR {
        return Err(Error::UndefinedPhase(mean.norm()));
    }
    Ok(wrap_phase(mean.arg()))
}

fn kerr_envelope(p: &GcsParams) -> f64 {
    (-p.mean_n() * (1.0 - (2.0 * p.t).cos())).exp()
}

/// Phase `phi - theta - t - |alpha|^2 sin 2t` shared by the Kerr formulas.
fn kerr_offset(p: &GcsParams, theta: f64) -> f64 {
    p.alpha_phase - theta - p.t - p.mean_n() * (2.0 * p.t).sin()
}

/// Closed-form `<a_theta>` of a Kerr state.
pub fn kerr_mean_quadrature(p: &GcsParams, theta: f64) -> Result<f64> {
    p.require_kerr()?;
    Ok(p.alpha_mag * kerr_envelope(p) * kerr_offset(p, theta).cos())
}

/// Closed-form `<:n a_theta:>` of a Kerr state.
pub fn kerr_intensity_field(p: &GcsParams, theta: f64) -> Result<f64> {
    p.require_kerr()?;
    Ok(p.alpha_mag.powi(3) * kerr_envelope(p) * (kerr_offset(p, theta) - 2.0 * p.t).cos())
}

/// Closed-form normalized intensity-field correlation of a Kerr state.
///
/// Returns [`Error::QuadratureOrthogonal`] when the tangent argument is within
/// `g_tol` of a pole, i.e. `<a_theta>` vanishes.
pub fn kerr_g32(p: &GcsParams, theta: f64, g_tol: f64) -> Result<f64> {
    p.require_kerr()?;
    let psi = kerr_offset(p, theta);
    let r = (psi - PI / 2.0).rem_euclid(PI);
    let dist = r.min(PI - r);
    if dist < g_tol {
        return Err(Error::QuadratureOrthogonal { argument: dist });
    }
    let two_t = 2.0 * p.t;
    Ok(two_t.cos() + two_t.sin() * psi.tan())
}

/// `arg <a> = phi - t - |alpha|^2 sin 2t` of a Kerr state, wrapped to `(-pi, pi]`.
pub fn kerr_state_phase(p: &GcsParams) -> Result<f64> {
    p.require_kerr()?;
    Ok(wrap_phase(kerr_offset(p, 0.0)))
}
