//! Heat maps of `|G_c^(3/2)| / |alpha|^(3/2)` over time and initial amplitude.

use std::path::Path;
use std::time::Instant;

use gcs_core::exec::map_indices;
use gcs_core::{gcs_density, GcsParams};

use crate::error::{invalid, CliResult};
use crate::output::{ensure_dir, fmt_opt, fmt_real, Manifest, Table};
use crate::params::{
    default_t_window, eps_tag, linspace, require_steps, require_window, witness_at, Numerics,
    ThetaSpec,
};
use crate::RunSummary;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Config {
    pub phi: f64,
    pub eps_list: Vec<f64>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_steps: usize,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: usize,
    pub numerics: Numerics,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Fig3Config {
            phi: 0.0,
            eps_list: vec![0.5, 2.0, 3.0],
            alpha_min: 0.1,
            alpha_max: 4.0,
            alpha_steps: 79,
            t_min: None,
            t_max: None,
            t_steps: 101,
            numerics: Numerics::default(),
        }
    }
}

impl Fig3Config {
    pub fn window(&self, eps: f64) -> (f64, f64) {
        let (lo, hi) = default_t_window(eps);
        (self.t_min.unwrap_or(lo), self.t_max.unwrap_or(hi))
    }

    pub fn alphas(&self) -> Vec<f64> {
        linspace(self.alpha_min, self.alpha_max, self.alpha_steps)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.alpha_min.is_finite() && self.alpha_min > 0.0) {
            return Err(invalid(format!("alpha range must be positive, got min {}", self.alpha_min)));
        }
        require_window("alpha range", (self.alpha_min, self.alpha_max))?;
        require_steps("--alpha-steps", self.alpha_steps, 2)?;
        require_steps("--t-steps", self.t_steps, 2)?;
        if self.eps_list.is_empty() {
            return Err(invalid("--eps needs at least one value"));
        }
        for &eps in &self.eps_list {
            GcsParams::new(self.alpha_max, self.phi, eps, 0.0)?;
            require_window("t window", self.window(eps))?;
        }
        self.numerics.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig3Cell {
    pub t: f64,
    pub alpha: f64,
    /// `None` (and blank cells) where `<a>` vanishes and `arg <a>` is undefined.
    pub theta: Option<f64>,
    pub gc32: Option<f64>,
}

impl Fig3Cell {
    pub fn scaled(&self) -> Option<f64> {
        self.gc32.map(|g| g.abs() / self.alpha.powf(1.5))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Map {
    pub eps: f64,
    pub ts: Vec<f64>,
    pub alphas: Vec<f64>,
    /// t-major: `cells[i * alphas.len() + j]` is `(ts[i], alphas[j])`.
    pub cells: Vec<Fig3Cell>,
}

impl Fig3Map {
    pub fn cell(&self, i_t: usize, j_alpha: usize) -> &Fig3Cell {
        &self.cells[i_t * self.alphas.len() + j_alpha]
    }
}

pub fn compute_fig3(cfg: &Fig3Config) -> CliResult<Vec<Fig3Map>> {
    cfg.validate()?;
    let alphas = cfg.alphas();
    let mut maps = Vec::with_capacity(cfg.eps_list.len());
    for &eps in &cfg.eps_list {
        let (lo, hi) = cfg.window(eps);
        let ts = linspace(lo, hi, cfg.t_steps);
        let n_alpha = alphas.len();
        let cells = map_indices(ts.len() * n_alpha, cfg.numerics.exec, |idx| -> CliResult<Fig3Cell> {
            let (t, alpha) = (ts[idx / n_alpha], alphas[idx % n_alpha]);
            let p = GcsParams::new(alpha, cfg.phi, eps, t)?;
            let rho = gcs_density(&p, &cfg.numerics.policy)?;
            let w = witness_at(&rho, ThetaSpec::Match)?;
            Ok(Fig3Cell {
                t,
                alpha,
                theta: w.map(|(theta, _)| theta),
                gc32: w.map(|(_, r)| r.gc32),
            })
        })
        .into_iter()
        .collect::<CliResult<Vec<_>>>()?;
        maps.push(Fig3Map {
            eps,
            ts,
            alphas: alphas.clone(),
            cells,
        });
    }
    Ok(maps)
}

pub fn fig3_tables(maps: &[Fig3Map]) -> Vec<Table> {
    maps.iter()
        .map(|m| {
            let mut table = Table::new(
                format!("fig3_eps{}.csv", eps_tag(m.eps)),
                &["t", "alpha", "theta", "gc32", "abs_gc32_over_alpha_1p5"],
            );
            for c in &m.cells {
                table.push(vec![
                    fmt_real(c.t),
                    fmt_real(c.alpha),
                    fmt_opt(c.theta),
                    fmt_opt(c.gc32),
                    fmt_opt(c.scaled()),
                ]);
            }
            table
        })
        .collect()
}

pub fn run_fig3(cfg: &Fig3Config, out_dir: &Path) -> CliResult<RunSummary> {
    let start = Instant::now();
    cfg.validate()?;
    ensure_dir(out_dir)?;
    let maps = compute_fig3(cfg)?;
    let mut manifest = Manifest::new("fig3");
    manifest.set("config.out_dir", out_dir.display());
    manifest.set_real("config.phi", cfg.phi);
    manifest.set_list("config.eps_list", &cfg.eps_list);
    manifest.set_list("config.alpha_range", &[cfg.alpha_min, cfg.alpha_max]);
    manifest.set("config.alpha_steps", cfg.alpha_steps);
    for &eps in &cfg.eps_list {
        let (lo, hi) = cfg.window(eps);
        manifest.set_list(&format!("config.t_window.eps{}", eps_tag(eps)), &[lo, hi]);
    }
    manifest.set("config.t_steps", cfg.t_steps);
    manifest.set("config.theta", ThetaSpec::Match);
    cfg.numerics.record(&mut manifest);
    RunSummary::write(fig3_tables(&maps), manifest, out_dir, start)
}
