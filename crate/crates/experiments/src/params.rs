//! Shared parameter handling for the subcommands.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use gcs_core::{
    damp_gcs_analytic, gcs_density, mixture_to_density, state_phase, witness, DensityMatrix,
    Exec, GcsParams, GridSpec, PhaseSpaceGrid, TruncationPolicy, WitnessReport,
};

use crate::error::{invalid, CliError, CliResult};
use crate::output::{fmt_real, Manifest};

/// Local-oscillator phase selection on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    /// `theta = arg <a>` of the state being measured.
    Match,
    Value(f64),
}

impl ThetaSpec {
    pub fn resolve(&self, rho: &DensityMatrix) -> CliResult<f64> {
        match *self {
            ThetaSpec::Match => Ok(state_phase(rho)?),
            ThetaSpec::Value(v) => Ok(v),
        }
    }
}

impl FromStr for ThetaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "match" {
            return Ok(ThetaSpec::Match);
        }
        match s.strip_prefix("value:") {
            Some(v) => parse_real(v).map(ThetaSpec::Value),
            None => Err(format!("expected 'match' or 'value:<rad>', got '{s}'")),
        }
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSpec::Match => f.write_str("match"),
            ThetaSpec::Value(v) => write!(f, "value:{}", fmt_real(*v)),
        }
    }
}

/// Parses a plain number or a multiple of pi such as `pi/4`, `-2pi/3`, `0.5*pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("cannot parse '{s}' as a real number");
    let Some(pos) = s.find("pi") else {
        let v: f64 = s.parse().map_err(|_| bad())?;
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    };
    let coeff = s[..pos].trim_end_matches('*');
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &s[pos + 2..];
    let denom = match rest {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    let v = coeff * PI / denom;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
                .collect()
        }
    }
}

/// Time after which the state returns to a coherent state, when there is one.
///
/// For integer exponents `n^eps - n` is divisible by 2 (eps = 2) or 6 (eps = 3),
/// so the nonlinear phase collapses onto a linear one at these times.
pub fn revival_time(eps: f64) -> Option<f64> {
    if eps == 2.0 {
        Some(PI)
    } else if eps == 3.0 {
        Some(PI / 3.0)
    } else {
        None
    }
}

/// Default time window for the figure sweeps.
pub fn default_t_window(eps: f64) -> (f64, f64) {
    match revival_time(eps) {
        Some(t) => (0.0, t),
        None => (0.0, 10.0),
    }
}

pub fn eps_tag(eps: f64) -> String {
    format!("{eps}")
}

/// Truncation, grid and scheduling settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub policy: TruncationPolicy,
    pub grid: GridSpec,
    pub exec: Exec,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            policy: TruncationPolicy::default(),
            grid: GridSpec::AUTO,
            exec: Exec::default(),
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> CliResult<()> {
        self.policy.validate()?;
        if let Some(l) = self.grid.half_extent {
            if !(l.is_finite() && l > 0.0) {
                return Err(invalid(format!("--grid-extent must be positive, got {l}")));
            }
        }
        if let Some(m) = self.grid.points_per_axis {
            PhaseSpaceGrid::new(1.0, m)?;
        }
        Ok(())
    }

    pub fn record(&self, m: &mut Manifest) {
        m.set_real("tolerance.tail_tol", self.policy.tail_tol);
        m.set("tolerance.min_dim", self.policy.min_dim);
        m.set_real("tolerance.div_floor", gcs_core::correlators::DIV_FLOOR);
        m.set_real("tolerance.d3_tol", gcs_core::correlators::D3_TOL);
        m.set_real("tolerance.imag_tol", gcs_core::correlators::IMAG_TOL);
        m.set_real("tolerance.kraus_tol", gcs_core::loss::KRAUS_TOL);
        m.set_real("tolerance.weight_tol", gcs_core::loss::WEIGHT_TOL);
        m.set_real("tolerance.grid_max_spacing", gcs_core::wigner::MAX_SPACING);
        m.set_real("tolerance.grid_pad", gcs_core::wigner::DEFAULT_PAD);
        m.set(
            "grid.half_extent",
            self.grid.half_extent.map(fmt_real).unwrap_or_else(|| "auto".into()),
        );
        m.set(
            "grid.points_per_axis",
            self.grid
                .points_per_axis
                .map(|p| p.to_string())
                .unwrap_or_else(|| "auto".into()),
        );
        m.set("exec", if self.exec.is_parallel() { "parallel" } else { "serial" });
    }
}

/// Density matrix of the GCS `p` after transmission `eta` (`eta = 1` is lossless).
pub fn prepare_state(p: &GcsParams, eta: f64, policy: &TruncationPolicy) -> CliResult<DensityMatrix> {
    if eta == 1.0 {
        return Ok(gcs_density(p, policy)?);
    }
    Ok(mixture_to_density(&damp_gcs_analytic(p, eta, None)?, policy)?)
}

/// Witness at the resolved angle; `None` when `Match` finds no defined phase.
pub fn witness_at(rho: &DensityMatrix, theta: ThetaSpec) -> CliResult<Option<(f64, WitnessReport)>> {
    let theta = match theta.resolve(rho) {
        Ok(v) => v,
        Err(CliError::Core(gcs_core::Error::UndefinedPhase(_))) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(Some((theta, witness(rho, theta)?)))
}

pub(crate) fn require_steps(name: &str, n: usize, min: usize) -> CliResult<()> {
    if n < min {
        return Err(invalid(format!("{name} must be at least {min}, got {n}")));
    }
    Ok(())
}

pub(crate) fn require_window(name: &str, (lo, hi): (f64, f64)) -> CliResult<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("{name} needs finite min < max, got [{lo}, {hi}]")));
    }
    Ok(())
}
