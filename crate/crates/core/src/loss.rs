//! Zero-temperature amplitude damping.
//!
//! Two routes: the dense Kraus sum `sum_k A_k rho A_k^dag`, and the analytic
//! decomposition of a damped GCS into a Poisson mixture of GCSs with amplitude
//! `sqrt(eta) |alpha|` and phase offset `k`. The analytic weights come from
//! `|| A_k |alpha_{eps,t}> ||^2 = e^{-|alpha|^2 (1-eta)} (|alpha|^2 (1-eta))^k / k!`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::correlators::{g32, gc32, moments_from_density, state_phase};
use crate::error::{Error, Result};
use crate::exec::{map_indices, Exec};
use crate::fock::{choose_dim, poisson_pmf_until, pure_to_density, DensityMatrix, TruncationPolicy};
use crate::gcs::{build_gcs_with_dim, gcs_density, GcsParams};
use crate::wigner::{state_negativity_with, GridSpec};

/// Allowed trace loss from dropping Kraus terms.
pub const KRAUS_TOL: f64 = 1e-10;
/// Allowed deficit of the retained Poisson weights.
pub const WEIGHT_TOL: f64 = 1e-10;

fn validate_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid(format!(
            "transmission eta must lie in (0, 1], got {eta}"
        )));
    }
    Ok(())
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `x^e` in the log domain with `0^0 = 1`.
fn ln_pow(ln_base: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * ln_base
    }
}

/// Coefficient of `|i-k><i|` in `A_k(eta)`, given log-factorials up to `i`.
fn kraus_coefficient(i: usize, k: usize, ln_eta: f64, ln_loss: f64, ln_fact: &[f64]) -> f64 {
    let ln_binom = ln_fact[i] - ln_fact[k] - ln_fact[i - k];
    (0.5 * (ln_binom + ln_pow(ln_eta, i - k) + ln_pow(ln_loss, k))).exp()
}

/// Dense `A_k(eta) = sum_{i>=k} sqrt(C(i,k)) eta^{(i-k)/2} (1-eta)^{k/2} |i-k><i|`.
pub fn kraus_matrix(k: usize, eta: f64, dim: usize) -> Result<Array2<Complex64>> {
    validate_eta(eta)?;
    if k >= dim {
        return Err(Error::invalid(format!(
            "Kraus index {k} must be below the dimension {dim}"
        )));
    }
    let ln_fact = ln_factorials(dim);
    let (ln_eta, ln_loss) = (eta.ln(), (1.0 - eta).ln());
    let mut a = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for i in k..dim {
        a[[i - k, i]] = Complex64::new(kraus_coefficient(i, k, ln_eta, ln_loss, &ln_fact), 0.0);
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingChannel {
    pub eta: f64,
    /// Kraus operators `A_0 ..= A_{k_max}` are applied.
    pub k_max: usize,
}

impl DampingChannel {
    pub fn new(eta: f64, k_max: usize) -> Result<Self> {
        validate_eta(eta)?;
        Ok(Self { eta, k_max })
    }

    /// Keeps every Kraus operator that is nonzero on a space of dimension `dim`,
    /// which makes the channel exactly trace preserving there.
    pub fn exact_for_dim(eta: f64, dim: usize) -> Result<Self> {
        Self::new(eta, dim.saturating_sub(1))
    }

    /// Smallest `k_max` whose Poisson(`|alpha|^2 (1 - eta)`) tail is below [`WEIGHT_TOL`].
    pub fn for_amplitude(eta: f64, alpha_mag: f64) -> Result<Self> {
        validate_eta(eta)?;
        Self::new(eta, default_k_max(alpha_mag * alpha_mag * (1.0 - eta)))
    }

    /// Trace lost on `rho` by truncating the Kraus sum at `k_max`:
    /// `sum_i rho_ii P(Binomial(i, 1 - eta) > k_max)`.
    pub fn completeness_deficit(&self, rho: &DensityMatrix) -> f64 {
        let dim = rho.dim();
        if self.k_max + 1 >= dim {
            return 0.0;
        }
        let ln_fact = ln_factorials(dim);
        let (ln_eta, ln_loss) = (self.eta.ln(), (1.0 - self.eta).ln());
        let pops = rho.populations();
        let mut deficit = 0.0;
        for (i, &pop) in pops.iter().enumerate().skip(self.k_max + 1) {
            let kept: f64 = (0..=self.k_max)
                .map(|k| kraus_coefficient(i, k, ln_eta, ln_loss, &ln_fact).powi(2))
                .sum();
            deficit += pop * (1.0 - kept).max(0.0);
        }
        deficit
    }
}

fn default_k_max(loss_mean: f64) -> usize {
    let pmf = poisson_pmf_until(loss_mean, WEIGHT_TOL * 1e-6);
    let mut kept = 0.0;
    for (k, p) in pmf.iter().enumerate() {
        kept += p;
        if 1.0 - kept < WEIGHT_TOL {
            return k;
        }
    }
    pmf.len() - 1
}

/// `sum_{k <= k_max} A_k rho A_k^dag`, applied index-wise (each `A_k` is a
/// single shifted diagonal).
pub fn apply_damping_dense(rho: &DensityMatrix, ch: &DampingChannel) -> Result<DensityMatrix> {
    validate_eta(ch.eta)?;
    let deficit = ch.completeness_deficit(rho);
    if deficit > KRAUS_TOL {
        return Err(Error::ResourceLimit(format!(
            "k_max = {} drops trace {deficit:.3e} > {KRAUS_TOL:e}; raise k_max",
            ch.k_max
        )));
    }
    let dim = rho.dim();
    let ln_fact = ln_factorials(dim);
    let (ln_eta, ln_loss) = (ch.eta.ln(), (1.0 - ch.eta).ln());
    let r = rho.entries();
    let mut out = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for k in 0..=ch.k_max.min(dim - 1) {
        if k > 0 && ch.eta == 1.0 {
            break;
        }
        let coef: Vec<f64> = (k..dim)
            .map(|i| kraus_coefficient(i, k, ln_eta, ln_loss, &ln_fact))
            .collect();
        for m in 0..dim - k {
            for n in 0..dim - k {
                out[[m, n]] += r[[m + k, n + k]] * (coef[m] * coef[n]);
            }
        }
    }
    Ok(DensityMatrix::from_entries_unchecked(out))
}

/// Weighted GCS components sharing one amplitude `|alpha|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcsMixture {
    components: Vec<(f64, GcsParams)>,
    alpha_mag: f64,
}

impl GcsMixture {
    /// Weights must be nonnegative and sum to within `1e-10` of one; every
    /// component must carry the same `|alpha|`.
    pub fn new(components: Vec<(f64, GcsParams)>) -> Result<Self> {
        let Some(&(_, first)) = components.first() else {
            return Err(Error::invalid("mixture needs at least one component"));
        };
        let alpha_mag = first.alpha_mag;
        let mut total = 0.0;
        for (w, p) in &components {
            p.validate()?;
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::invalid(format!("mixture weight {w} is not a probability")));
            }
            if (p.alpha_mag - alpha_mag).abs() > 1e-12 * alpha_mag.max(1.0) {
                return Err(Error::invalid(format!(
                    "mixture components must share |alpha| (linearity of G_c needs equal <n>): {} vs {}",
                    p.alpha_mag, alpha_mag
                )));
            }
            total += w;
        }
        if !(1.0 - WEIGHT_TOL..=1.0 + 1e-12).contains(&total) {
            return Err(Error::invalid(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            components,
            alpha_mag,
        })
    }

    pub fn components(&self) -> &[(f64, GcsParams)] {
        &self.components
    }

    pub fn alpha_mag(&self) -> f64 {
        self.alpha_mag
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }
}

/// Poisson mixture produced by damping the pure GCS `p` (which must have `k = 0`).
/// `k_max = None` picks the smallest cutoff with retained weight deficit below 1e-10.
pub fn damp_gcs_analytic(p: &GcsParams, eta: f64, k_max: Option<usize>) -> Result<GcsMixture> {
    p.validate()?;
    validate_eta(eta)?;
    if p.k != 0 {
        return Err(Error::invalid("analytic damping expects an undamped state with k = 0"));
    }
    let loss_mean = p.mean_n() * (1.0 - eta);
    let k_max = k_max.unwrap_or_else(|| default_k_max(loss_mean));
    let mut pmf = poisson_pmf_until(loss_mean, WEIGHT_TOL * 1e-6);
    if pmf.len() <= k_max {
        pmf.resize(k_max + 1, 0.0);
    }
    let weights = &pmf[..=k_max];
    let kept: f64 = weights.iter().sum();
    if 1.0 - kept > WEIGHT_TOL {
        return Err(Error::ResourceLimit(format!(
            "k_max = {k_max} keeps only {kept} of the loss distribution; raise k_max"
        )));
    }
    let damped = p.with_alpha_mag(eta.sqrt() * p.alpha_mag);
    let components = weights
        .iter()
        .enumerate()
        .map(|(k, &w)| (w, damped.with_offset(k as u32)))
        .collect();
    GcsMixture::new(components)
}

/// `sum_i p_i |psi_i><psi_i|` in a common dimension chosen from `|alpha|^2`.
pub fn mixture_to_density(mix: &GcsMixture, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    let dim = choose_dim(mix.alpha_mag() * mix.alpha_mag(), policy)?;
    let mut acc = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for (w, params) in mix.components() {
        if *w == 0.0 {
            continue;
        }
        let v = build_gcs_with_dim(params, dim)?;
        acc.scaled_add(Complex64::new(*w, 0.0), pure_to_density(&v).entries());
    }
    Ok(DensityMatrix::from_entries_unchecked(acc))
}

/// How the local-oscillator phase is chosen in a loss sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaRule {
    Fixed(f64),
    /// `theta = arg <a>` of the undamped state, held for every `eta`.
    MatchInitialStatePhase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRow {
    pub eta: f64,
    pub theta: f64,
    pub gc32: f64,
    pub g32: Option<f64>,
    pub negativity: f64,
}

/// Witness and Wigner negativity of the damped state for each `eta`.
pub fn loss_sweep(
    p: &GcsParams,
    theta_rule: ThetaRule,
    etas: &[f64],
    policy: &TruncationPolicy,
    grid: &GridSpec,
    exec: Exec,
) -> Result<Vec<LossRow>> {
    p.validate()?;
    for &eta in etas {
        validate_eta(eta)?;
    }
    let theta = match theta_rule {
        ThetaRule::Fixed(theta) => theta,
        ThetaRule::MatchInitialStatePhase => state_phase(&gcs_density(p, policy)?)?,
    };
    // points are independent; the Wigner grid inside each stays serial
    let rows = map_indices(etas.len(), exec, |i| -> Result<LossRow> {
        let eta = etas[i];
        let rho = mixture_to_density(&damp_gcs_analytic(p, eta, None)?, policy)?;
        let m = moments_from_density(&rho, theta)?;
        Ok(LossRow {
            eta,
            theta,
            gc32: gc32(&m),
            g32: g32(&m),
            negativity: state_negativity_with(&rho, grid, Exec::Serial)?,
        })
    });
    rows.into_iter().collect()
}
