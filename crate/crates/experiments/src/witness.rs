//! Single-point witness queries and plain time sweeps.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use gcs_core::correlators::d3_expanded;
use gcs_core::exec::map_indices;
use gcs_core::wigner::state_negativity_with;
use gcs_core::{DivergenceNote, Exec, GcsParams, WitnessReport};

use crate::error::{invalid, CliResult};
use crate::output::{ensure_dir, fmt_flag, fmt_opt, fmt_real, Manifest, Table};
use crate::params::{linspace, prepare_state, require_steps, require_window, witness_at, Numerics, ThetaSpec};
use crate::RunSummary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConfig {
    pub alpha: f64,
    pub phi: f64,
    pub eps: f64,
    pub t: f64,
    pub k: u32,
    pub theta: ThetaSpec,
    /// Transmission of an amplitude-damping channel applied first; 1 means no loss.
    pub eta: f64,
}

impl Default for PointConfig {
    fn default() -> Self {
        PointConfig {
            alpha: 1.0,
            phi: 0.0,
            eps: 2.0,
            t: 0.0,
            k: 0,
            theta: ThetaSpec::Match,
            eta: 1.0,
        }
    }
}

impl PointConfig {
    pub fn params(&self) -> CliResult<GcsParams> {
        Ok(GcsParams::new(self.alpha, self.phi, self.eps, self.t)?.with_offset(self.k))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.params()?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if self.eta < 1.0 && self.k != 0 {
            return Err(invalid("loss is applied to undamped states only; use --k 0 with --eta"));
        }
        if let ThetaSpec::Value(v) = self.theta {
            if !v.is_finite() {
                return Err(invalid("theta must be finite"));
            }
        }
        Ok(())
    }
}

/// Columns shared by the witness and sweep tables.
pub const POINT_HEADER: [&str; 18] = [
    "alpha",
    "phi",
    "eps",
    "t",
    "k",
    "eta",
    "theta",
    "mean_quad",
    "mean_n",
    "quad_sq",
    "n_quad",
    "n_sq",
    "g32",
    "divergence_flag",
    "gc32",
    "d3",
    "d3_expanded",
    "nonclassical",
];

fn point_row(cfg: &PointConfig, r: &WitnessReport) -> Vec<String> {
    let m = &r.moments;
    vec![
        fmt_real(cfg.alpha),
        fmt_real(cfg.phi),
        fmt_real(cfg.eps),
        fmt_real(cfg.t),
        cfg.k.to_string(),
        fmt_real(cfg.eta),
        fmt_real(m.theta),
        fmt_real(m.mean_quad),
        fmt_real(m.mean_n),
        fmt_real(m.quad_sq),
        fmt_real(m.n_quad),
        fmt_real(m.n_sq),
        fmt_opt(r.g32),
        fmt_flag(r.g32.is_none()),
        fmt_real(r.gc32),
        fmt_real(r.d3),
        fmt_real(d3_expanded(m)),
        fmt_flag(r.nonclassical),
    ]
}

pub fn evaluate_point(cfg: &PointConfig, numerics: &Numerics) -> CliResult<WitnessReport> {
    cfg.validate()?;
    let rho = prepare_state(&cfg.params()?, cfg.eta, &numerics.policy)?;
    match witness_at(&rho, cfg.theta)? {
        Some((_, r)) => Ok(r),
        None => Err(invalid(
            "<a> vanishes for this state, so --theta match is undefined; pass --theta value:<rad>",
        )),
    }
}

pub fn render_report(cfg: &PointConfig, r: &WitnessReport) -> String {
    let m = &r.moments;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "state: |alpha| = {}, arg(alpha) = {}, eps = {}, t = {}, k = {}, eta = {}",
        cfg.alpha, cfg.phi, cfg.eps, cfg.t, cfg.k, cfg.eta
    );
    let _ = writeln!(s, "theta ({}): {}", cfg.theta, m.theta);
    let _ = writeln!(s, "  <a_theta>        {:+.12e}", m.mean_quad);
    let _ = writeln!(s, "  <n>              {:+.12e}", m.mean_n);
    let _ = writeln!(s, "  <:a_theta^2:>    {:+.12e}", m.quad_sq);
    let _ = writeln!(s, "  <:n a_theta:>    {:+.12e}", m.n_quad);
    let _ = writeln!(s, "  <:n^2:>          {:+.12e}", m.n_sq);
    match (r.g32, r.divergence_note) {
        (Some(g), _) => {
            let _ = writeln!(s, "g32              {:+.12e}", g);
        }
        (None, DivergenceNote::QuadOrthogonal) | (None, DivergenceNote::Ok) => {
            let _ = writeln!(
                s,
                "g32              undefined: <n><a_theta> vanishes (quadrature orthogonal to the field)"
            );
        }
    }
    let _ = writeln!(s, "gc32             {:+.12e}", r.gc32);
    let _ = writeln!(s, "d3               {:+.12e}", r.d3);
    let _ = writeln!(
        s,
        "nonclassical     {}",
        if r.nonclassical { "yes (d3 < 0)" } else { "no" }
    );
    s
}

pub fn run_witness(cfg: &PointConfig, numerics: &Numerics, out_dir: &Path) -> CliResult<(RunSummary, String)> {
    let start = Instant::now();
    cfg.validate()?;
    numerics.validate()?;
    ensure_dir(out_dir)?;
    let r = evaluate_point(cfg, numerics)?;
    let mut table = Table::new("witness.csv", &POINT_HEADER);
    table.push(point_row(cfg, &r));
    let mut manifest = Manifest::new("witness");
    manifest.set("config.out_dir", out_dir.display());
    record_point(&mut manifest, cfg);
    numerics.record(&mut manifest);
    let summary = RunSummary::write(vec![table], manifest, out_dir, start)?;
    Ok((summary, render_report(cfg, &r)))
}

fn record_point(m: &mut Manifest, cfg: &PointConfig) {
    m.set_real("config.alpha", cfg.alpha);
    m.set_real("config.phi", cfg.phi);
    m.set_real("config.eps", cfg.eps);
    m.set_real("config.t", cfg.t);
    m.set("config.k", cfg.k);
    m.set_real("config.eta", cfg.eta);
    m.set("config.theta", cfg.theta);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// `t` is ignored; times come from the window.
    pub point: PointConfig,
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub with_negativity: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.point.validate()?;
        require_window("t window", (self.t_min, self.t_max))?;
        require_steps("--t-steps", self.t_steps, 2)
    }
}

/// Witness at each time of the window; rows whose phase is undefined under
/// `--theta match` are skipped and counted in the manifest.
pub fn run_sweep(cfg: &SweepConfig, numerics: &Numerics, out_dir: &Path) -> CliResult<RunSummary> {
    let start = Instant::now();
    cfg.validate()?;
    numerics.validate()?;
    ensure_dir(out_dir)?;
    let ts = linspace(cfg.t_min, cfg.t_max, cfg.t_steps);
    let rows = map_indices(ts.len(), numerics.exec, |i| -> CliResult<Option<Vec<String>>> {
        let point = PointConfig { t: ts[i], ..cfg.point };
        let rho = prepare_state(&point.params()?, point.eta, &numerics.policy)?;
        let Some((_, r)) = witness_at(&rho, point.theta)? else {
            return Ok(None);
        };
        let mut row = point_row(&point, &r);
        if cfg.with_negativity {
            row.push(fmt_real(state_negativity_with(&rho, &numerics.grid, Exec::Serial)?));
        }
        Ok(Some(row))
    });
    let mut header: Vec<&str> = POINT_HEADER.to_vec();
    if cfg.with_negativity {
        header.push("negativity");
    }
    let mut table = Table::new("sweep.csv", &header);
    let mut skipped = 0usize;
    for row in rows {
        match row? {
            Some(r) => table.push(r),
            None => skipped += 1,
        }
    }
    let mut manifest = Manifest::new("sweep");
    manifest.set("config.out_dir", out_dir.display());
    record_point(&mut manifest, &cfg.point);
    manifest.set_list("config.t_window", &[cfg.t_min, cfg.t_max]);
    manifest.set("config.t_steps", cfg.t_steps);
    manifest.set("config.negativity", cfg.with_negativity);
    manifest.set("skipped_undefined_phase", skipped);
    numerics.record(&mut manifest);
    RunSummary::write(vec![table], manifest, out_dir, start)
}
