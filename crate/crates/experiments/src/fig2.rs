//! Time traces of `g^(3/2)` and Wigner negativity at `theta = arg <a>(t)`,
//! with the `g = 1` crossings and phase-offset insets around them.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use gcs_core::exec::map_indices;
use gcs_core::wigner::state_negativity_with;
use gcs_core::{gcs_density, Exec, GcsParams};

use crate::error::{invalid, CliResult};
use crate::output::{ensure_dir, fmt_flag, fmt_opt, fmt_real, Manifest, Table};
use crate::params::{
    default_t_window, eps_tag, linspace, require_steps, require_window, revival_time, witness_at,
    Numerics, ThetaSpec,
};
use crate::RunSummary;

/// Samples with `|g - 1|` below this are treated as touching 1, not crossing it.
pub const TOUCH_BAND: f64 = 1e-9;
/// Bisection stops once the bracket is this narrow.
pub const CROSSING_RESOLUTION: f64 = 1e-10;
/// A converged bracket must have `|g - 1|` below this, otherwise it straddled a pole.
pub const CROSSING_ACCEPT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Config {
    pub mean_n: f64,
    pub phi: f64,
    pub eps_list: Vec<f64>,
    pub t_steps: usize,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub dphi_list: Vec<f64>,
    /// Inset half-width as a fraction of the revival period (or of the window).
    pub inset_fraction: f64,
    pub inset_steps: usize,
    pub numerics: Numerics,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Fig2Config {
            mean_n: 1.0,
            phi: 0.0,
            eps_list: vec![0.5, 2.0, 3.0],
            t_steps: 400,
            t_min: None,
            t_max: None,
            dphi_list: vec![-PI / 3.0, -PI / 6.0, 0.0, PI / 6.0, PI / 3.0],
            inset_fraction: 0.05,
            inset_steps: 101,
            numerics: Numerics::default(),
        }
    }
}

impl Fig2Config {
    pub fn window(&self, eps: f64) -> (f64, f64) {
        let (lo, hi) = default_t_window(eps);
        (self.t_min.unwrap_or(lo), self.t_max.unwrap_or(hi))
    }

    pub fn inset_half_width(&self, eps: f64) -> f64 {
        let (lo, hi) = self.window(eps);
        self.inset_fraction * revival_time(eps).unwrap_or(hi - lo)
    }

    fn base(&self, eps: f64) -> CliResult<GcsParams> {
        Ok(GcsParams::new(self.mean_n.sqrt(), self.phi, eps, 0.0)?)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.mean_n.is_finite() && self.mean_n > 0.0) {
            return Err(invalid(format!("mean photon number must be > 0, got {}", self.mean_n)));
        }
        if self.eps_list.is_empty() {
            return Err(invalid("--eps needs at least one value"));
        }
        for &eps in &self.eps_list {
            self.base(eps)?;
            require_window("t window", self.window(eps))?;
        }
        require_steps("--t-steps", self.t_steps, 2)?;
        require_steps("--inset-steps", self.inset_steps, 2)?;
        if self.dphi_list.iter().any(|d| !d.is_finite()) {
            return Err(invalid("--dphi-list values must be finite"));
        }
        if !(self.inset_fraction.is_finite() && self.inset_fraction > 0.0) {
            return Err(invalid("--inset-width must be positive"));
        }
        self.numerics.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Row {
    pub t: f64,
    /// `None` when `<a>` vanishes and the phase is undefined.
    pub theta: Option<f64>,
    pub g32: Option<f64>,
    pub gc32: Option<f64>,
    pub negativity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub t_star: f64,
    pub theta: f64,
    pub g32: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsetRow {
    pub crossing: usize,
    pub dphi: f64,
    pub t: f64,
    pub theta: Option<f64>,
    pub g32: Option<f64>,
    pub gc32: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Series {
    pub eps: f64,
    pub rows: Vec<Fig2Row>,
    pub crossings: Vec<Crossing>,
    pub inset: Vec<InsetRow>,
}

fn trace_point(base: &GcsParams, t: f64, numerics: &Numerics) -> CliResult<Fig2Row> {
    let rho = gcs_density(&base.with_t(t), &numerics.policy)?;
    let w = witness_at(&rho, ThetaSpec::Match)?;
    Ok(Fig2Row {
        t,
        theta: w.map(|(theta, _)| theta),
        g32: w.and_then(|(_, r)| r.g32),
        gc32: w.map(|(_, r)| r.gc32),
        negativity: state_negativity_with(&rho, &numerics.grid, Exec::Serial)?,
    })
}

fn g_offset(base: &GcsParams, t: f64, numerics: &Numerics) -> CliResult<Option<f64>> {
    let rho = gcs_density(&base.with_t(t), &numerics.policy)?;
    Ok(witness_at(&rho, ThetaSpec::Match)?.and_then(|(_, r)| r.g32.map(|g| g - 1.0)))
}

/// Sign-change brackets of `g - 1` between samples, skipping samples that touch 1.
pub fn crossing_brackets(rows: &[Fig2Row]) -> Vec<(f64, f64)> {
    let signed: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.g32.map(|g| (r.t, g - 1.0)))
        .filter(|(_, d)| d.abs() > TOUCH_BAND)
        .collect();
    signed
        .windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .map(|w| (w[0].0, w[1].0))
        .collect()
}

fn bisect(base: &GcsParams, (mut lo, mut hi): (f64, f64), numerics: &Numerics) -> CliResult<Option<f64>> {
    let Some(f_lo) = g_offset(base, lo, numerics)? else {
        return Ok(None);
    };
    while hi - lo > CROSSING_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        match g_offset(base, mid, numerics)? {
            None => return Ok(None),
            Some(0.0) => return Ok(Some(mid)),
            Some(f) if (f > 0.0) == (f_lo > 0.0) => lo = mid,
            Some(_) => hi = mid,
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn locate_crossing(base: &GcsParams, bracket: (f64, f64), numerics: &Numerics) -> CliResult<Option<Crossing>> {
    let Some(t_star) = bisect(base, bracket, numerics)? else {
        return Ok(None);
    };
    let row = trace_point(base, t_star, numerics)?;
    match (row.theta, row.g32) {
        (Some(theta), Some(g)) if (g - 1.0).abs() <= CROSSING_ACCEPT => Ok(Some(Crossing {
            t_star,
            theta,
            g32: g,
            negativity: row.negativity,
        })),
        _ => Ok(None),
    }
}

fn inset_rows(cfg: &Fig2Config, base: &GcsParams, eps: f64, crossings: &[Crossing]) -> CliResult<Vec<InsetRow>> {
    let w = cfg.inset_half_width(eps);
    let jobs: Vec<(usize, f64)> = crossings
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            linspace(c.t_star - w, c.t_star + w, cfg.inset_steps)
                .into_iter()
                .map(move |t| (i, t))
        })
        .collect();
    let per_t = map_indices(jobs.len(), cfg.numerics.exec, |j| -> CliResult<Vec<InsetRow>> {
        let (crossing, t) = jobs[j];
        let rho = gcs_density(&base.with_t(t), &cfg.numerics.policy)?;
        let phase = witness_at(&rho, ThetaSpec::Match)?.map(|(theta, _)| theta);
        cfg.dphi_list
            .iter()
            .map(|&dphi| {
                let w = match phase {
                    Some(p) => witness_at(&rho, ThetaSpec::Value(p + dphi))?,
                    None => None,
                };
                Ok(InsetRow {
                    crossing,
                    dphi,
                    t,
                    theta: w.map(|(theta, _)| theta),
                    g32: w.and_then(|(_, r)| r.g32),
                    gc32: w.map(|(_, r)| r.gc32),
                })
            })
            .collect()
    });
    let mut keyed = Vec::with_capacity(jobs.len() * cfg.dphi_list.len());
    for chunk in per_t {
        keyed.extend(chunk?.into_iter().enumerate());
    }
    // one curve per (crossing, dphi); the stable sort keeps t ascending within it
    keyed.sort_by_key(|(d, r)| (r.crossing, *d));
    let rows = keyed.into_iter().map(|(_, r)| r).collect();
    Ok(rows)
}

pub fn compute_fig2(cfg: &Fig2Config) -> CliResult<Vec<Fig2Series>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.eps_list.len());
    for &eps in &cfg.eps_list {
        let base = cfg.base(eps)?;
        let (lo, hi) = cfg.window(eps);
        let ts = linspace(lo, hi, cfg.t_steps);
        let rows = map_indices(ts.len(), cfg.numerics.exec, |i| trace_point(&base, ts[i], &cfg.numerics))
            .into_iter()
            .collect::<CliResult<Vec<_>>>()?;
        let brackets = crossing_brackets(&rows);
        let crossings = map_indices(brackets.len(), cfg.numerics.exec, |i| {
            locate_crossing(&base, brackets[i], &cfg.numerics)
        })
        .into_iter()
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
        let inset = inset_rows(cfg, &base, eps, &crossings)?;
        out.push(Fig2Series {
            eps,
            rows,
            crossings,
            inset,
        });
    }
    Ok(out)
}

fn t_eps(t: f64, eps: f64) -> String {
    if eps == 0.0 {
        String::new()
    } else {
        fmt_real(2.0 * t / eps)
    }
}

pub fn fig2_tables(series: &[Fig2Series]) -> Vec<Table> {
    let mut tables = Vec::new();
    for s in series {
        let tag = eps_tag(s.eps);
        let mut trace = Table::new(
            format!("fig2_eps{tag}.csv"),
            &["t", "t_eps", "theta", "g32", "divergence_flag", "gc32", "negativity"],
        );
        for r in &s.rows {
            trace.push(vec![
                fmt_real(r.t),
                t_eps(r.t, s.eps),
                fmt_opt(r.theta),
                fmt_opt(r.g32),
                fmt_flag(r.g32.is_none()),
                fmt_opt(r.gc32),
                fmt_real(r.negativity),
            ]);
        }
        let mut cross = Table::new(
            format!("fig2_crossings_eps{tag}.csv"),
            &["crossing", "t_star", "t_eps_star", "theta", "g32", "negativity"],
        );
        for (i, c) in s.crossings.iter().enumerate() {
            cross.push(vec![
                i.to_string(),
                fmt_real(c.t_star),
                t_eps(c.t_star, s.eps),
                fmt_real(c.theta),
                fmt_real(c.g32),
                fmt_real(c.negativity),
            ]);
        }
        let mut inset = Table::new(
            format!("fig2_inset_eps{tag}.csv"),
            &["crossing", "t_star", "dphi", "t", "theta", "g32", "divergence_flag", "gc32"],
        );
        for r in &s.inset {
            inset.push(vec![
                r.crossing.to_string(),
                fmt_real(s.crossings[r.crossing].t_star),
                fmt_real(r.dphi),
                fmt_real(r.t),
                fmt_opt(r.theta),
                fmt_opt(r.g32),
                fmt_flag(r.g32.is_none()),
                fmt_opt(r.gc32),
            ]);
        }
        tables.extend([trace, cross, inset]);
    }
    tables
}

pub fn run_fig2(cfg: &Fig2Config, out_dir: &Path) -> CliResult<RunSummary> {
    let start = Instant::now();
    cfg.validate()?;
    ensure_dir(out_dir)?;
    let series = compute_fig2(cfg)?;
    let mut manifest = Manifest::new("fig2");
    manifest.set("config.out_dir", out_dir.display());
    manifest.set_real("config.mean_n", cfg.mean_n);
    manifest.set_real("config.phi", cfg.phi);
    manifest.set_list("config.eps_list", &cfg.eps_list);
    for &eps in &cfg.eps_list {
        let (lo, hi) = cfg.window(eps);
        manifest.set_list(&format!("config.t_window.eps{}", eps_tag(eps)), &[lo, hi]);
        manifest.set_real(
            &format!("config.inset_half_width.eps{}", eps_tag(eps)),
            cfg.inset_half_width(eps),
        );
    }
    manifest.set("config.t_steps", cfg.t_steps);
    manifest.set_list("config.dphi_list", &cfg.dphi_list);
    manifest.set_real("config.inset_fraction", cfg.inset_fraction);
    manifest.set("config.inset_steps", cfg.inset_steps);
    manifest.set("config.theta", ThetaSpec::Match);
    manifest.set_real("tolerance.crossing_resolution", CROSSING_RESOLUTION);
    manifest.set_real("tolerance.crossing_touch_band", TOUCH_BAND);
    manifest.set_real("tolerance.crossing_accept", CROSSING_ACCEPT);
    cfg.numerics.record(&mut manifest);
    RunSummary::write(fig2_tables(&series), manifest, out_dir, start)
}
