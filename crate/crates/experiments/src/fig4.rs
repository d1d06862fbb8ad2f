//! Witness and Wigner negativity of damped Kerr states against the loss `1 - eta`.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use gcs_core::{loss_sweep, GcsParams, LossRow, ThetaRule};

use crate::error::{invalid, CliResult};
use crate::output::{ensure_dir, fmt_flag, fmt_opt, fmt_real, Manifest, Table};
use crate::params::{linspace, require_steps, Numerics, ThetaSpec};
use crate::RunSummary;

/// Largest loss on the default grid; `eta = 0` itself is outside the channel's domain.
pub const MAX_DEFAULT_LOSS: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Config {
    pub alpha: f64,
    pub phi: f64,
    pub eps: f64,
    pub t_list: Vec<f64>,
    /// Explicit transmissions; `None` uses `eta_steps` losses evenly spread over `[0, 0.999]`.
    pub eta_list: Option<Vec<f64>>,
    pub eta_steps: usize,
    pub theta: ThetaSpec,
    pub numerics: Numerics,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Fig4Config {
            alpha: 1.0,
            phi: 0.0,
            eps: 2.0,
            t_list: vec![0.15, PI / 4.0, PI / 2.0],
            eta_list: None,
            eta_steps: 41,
            theta: ThetaSpec::Match,
            numerics: Numerics::default(),
        }
    }
}

impl Fig4Config {
    pub fn etas(&self) -> Vec<f64> {
        match &self.eta_list {
            Some(list) => list.clone(),
            None => linspace(0.0, MAX_DEFAULT_LOSS, self.eta_steps)
                .into_iter()
                .map(|loss| 1.0 - loss)
                .collect(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.t_list.is_empty() {
            return Err(invalid("--t needs at least one value"));
        }
        for &t in &self.t_list {
            GcsParams::new(self.alpha, self.phi, self.eps, t)?;
        }
        if self.eta_list.is_none() {
            require_steps("--eta-steps", self.eta_steps, 2)?;
        }
        let etas = self.etas();
        if etas.is_empty() {
            return Err(invalid("--eta-list needs at least one value"));
        }
        if let Some(bad) = etas.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(invalid(format!("eta must lie in (0, 1], got {bad}")));
        }
        if self.theta == ThetaSpec::Match && self.alpha == 0.0 {
            return Err(invalid("--theta match needs |alpha| > 0"));
        }
        self.numerics.validate()
    }

    fn rule(&self) -> ThetaRule {
        match self.theta {
            ThetaSpec::Match => ThetaRule::MatchInitialStatePhase,
            ThetaSpec::Value(v) => ThetaRule::Fixed(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Curve {
    pub t: f64,
    pub rows: Vec<LossRow>,
}

pub fn compute_fig4(cfg: &Fig4Config) -> CliResult<Vec<Fig4Curve>> {
    cfg.validate()?;
    let etas = cfg.etas();
    cfg.t_list
        .iter()
        .map(|&t| {
            let p = GcsParams::new(cfg.alpha, cfg.phi, cfg.eps, t)?;
            let rows = loss_sweep(
                &p,
                cfg.rule(),
                &etas,
                &cfg.numerics.policy,
                &cfg.numerics.grid,
                cfg.numerics.exec,
            )?;
            Ok(Fig4Curve { t, rows })
        })
        .collect()
}

pub fn fig4_tables(curves: &[Fig4Curve]) -> Vec<Table> {
    curves
        .iter()
        .map(|c| {
            let mut table = Table::new(
                format!("fig4_t{:.4}.csv", c.t),
                &[
                    "t",
                    "one_minus_eta",
                    "eta",
                    "theta",
                    "gc32",
                    "g32",
                    "divergence_flag",
                    "negativity",
                ],
            );
            for r in &c.rows {
                table.push(vec![
                    fmt_real(c.t),
                    fmt_real(1.0 - r.eta),
                    fmt_real(r.eta),
                    fmt_real(r.theta),
                    fmt_real(r.gc32),
                    fmt_opt(r.g32),
                    fmt_flag(r.g32.is_none()),
                    fmt_real(r.negativity),
                ]);
            }
            table
        })
        .collect()
}

pub fn run_fig4(cfg: &Fig4Config, out_dir: &Path) -> CliResult<RunSummary> {
    let start = Instant::now();
    cfg.validate()?;
    ensure_dir(out_dir)?;
    let curves = compute_fig4(cfg)?;
    let mut manifest = Manifest::new("fig4");
    manifest.set("config.out_dir", out_dir.display());
    manifest.set_real("config.alpha", cfg.alpha);
    manifest.set_real("config.phi", cfg.phi);
    manifest.set_real("config.eps", cfg.eps);
    manifest.set_list("config.t_list", &cfg.t_list);
    manifest.set_list("config.eta_list", &cfg.etas());
    manifest.set("config.theta", cfg.theta);
    manifest.set("config.theta_resolution", "once, from the undamped state");
    cfg.numerics.record(&mut manifest);
    RunSummary::write(fig4_tables(&curves), manifest, out_dir, start)
}
