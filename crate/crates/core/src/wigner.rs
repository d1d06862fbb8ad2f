//! Wigner function on a square phase-space grid and its negativity.
//!
//! Convention: `x = sqrt(2) Re(alpha)`, `p = sqrt(2) Im(alpha)`, so the vacuum
//! is `exp(-(x^2 + p^2)) / pi` and `W` integrates to one over `dx dp`.
//! Matrix elements of the displaced parity are generated by an upward
//! recurrence (generalized Laguerre functions in normalized form), which stays
//! finite for large Fock indices where factorial ratios would overflow.

use std::f64::consts::{FRAC_1_PI, SQRT_2};

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_indices, Exec};
use crate::fock::{expectation, DensityMatrix, Ladder};

/// Largest Fock dimension accepted by [`wigner_field`].
pub const DIM_MAX: usize = 256;
/// Node spacing enforced by [`auto_grid`]. `max(0, -W)` has kinks on the
/// zero contour where Simpson's rule drops to second order; at this spacing
/// that error stays around 1e-5.
pub const MAX_SPACING: f64 = 0.025;
pub const DEFAULT_PAD: f64 = 4.0;
pub const DEFAULT_POINTS: usize = 201;

/// Square grid `[-L, L]^2` with an odd number of nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    pub half_extent: f64,
    pub points_per_axis: usize,
}

impl PhaseSpaceGrid {
    pub fn new(half_extent: f64, points_per_axis: usize) -> Result<Self> {
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::invalid(format!(
                "grid half extent must be positive, got {half_extent}"
            )));
        }
        if points_per_axis < 3 || points_per_axis.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "grid needs an odd number of points >= 3, got {points_per_axis}"
            )));
        }
        Ok(Self {
            half_extent,
            points_per_axis,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / (self.points_per_axis - 1) as f64
    }

    /// Coordinate of node `i`; the centre node is exactly zero.
    pub fn coord(&self, i: usize) -> f64 {
        let centre = ((self.points_per_axis - 1) / 2) as f64;
        (i as f64 - centre) * self.spacing()
    }

    pub fn centre_index(&self) -> usize {
        (self.points_per_axis - 1) / 2
    }

    /// Composite Simpson weights along one axis.
    pub fn simpson_weights(&self) -> Vec<f64> {
        let m = self.points_per_axis;
        let h = self.spacing();
        (0..m)
            .map(|i| {
                let c = if i == 0 || i == m - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect()
    }

    /// Same extent, `2M - 1` points (every old node kept).
    pub fn refined(&self) -> Self {
        Self {
            half_extent: self.half_extent,
            points_per_axis: 2 * self.points_per_axis - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    /// `values[[i, j]] = W(x_i, p_j)`.
    pub values: Array2<f64>,
    pub grid: PhaseSpaceGrid,
}

impl WignerField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn at_origin(&self) -> f64 {
        let c = self.grid.centre_index();
        self.values[[c, c]]
    }

    fn simpson(&self, f: impl Fn(f64) -> f64) -> f64 {
        let w = self.grid.simpson_weights();
        let m = self.grid.points_per_axis;
        let mut total = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for (j, wj) in w.iter().enumerate() {
                row += wj * f(self.values[[i, j]]);
            }
            total += w[i] * row;
        }
        total
    }

    /// Simpson integral of `W` over the grid.
    pub fn integral(&self) -> f64 {
        self.simpson(|v| v)
    }

    pub fn abs_integral(&self) -> f64 {
        self.simpson(f64::abs)
    }
}

/// Per-state tables reused across grid points.
struct Kernel<'a> {
    rho: &'a [Complex64],
    dim: usize,
    sqrt: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

impl<'a> Kernel<'a> {
    fn new(rho: &'a DensityMatrix) -> Result<Self> {
        let dim = rho.dim();
        if dim > DIM_MAX {
            return Err(Error::ResourceLimit(format!(
                "Wigner evaluation supports dim <= {DIM_MAX}, got {dim}"
            )));
        }
        let rho = rho
            .entries()
            .as_slice()
            .ok_or_else(|| Error::invalid("density matrix must be in standard layout"))?;
        let sqrt: Vec<f64> = (0..dim).map(|k| (k as f64).sqrt()).collect();
        let inv_sqrt = sqrt.iter().map(|s| if *s > 0.0 { 1.0 / s } else { 0.0 }).collect();
        Ok(Kernel {
            rho,
            dim,
            sqrt,
            inv_sqrt,
        })
    }

    /// Radial sums `F_d = c_d sum_m rho_{m,m+d} H_{m,m+d}(r)` with `r = |2 beta|`,
    /// `c_0 = 1`, `c_d = 2`. The displaced-parity element is `u^d H_{m,m+d}` with
    /// `u = beta / |beta|`, so the phase is applied afterwards in [`Self::combine`].
    fn radial(&self, r: f64, h: &mut [f64], out: &mut [Complex64]) {
        let (rho, dim) = (self.rho, self.dim);
        out.fill(Complex64::new(0.0, 0.0));
        h[0] = (-0.5 * r * r).exp() * FRAC_1_PI;
        out[0] += rho[0] * h[0];
        for k in 1..dim {
            h[k] = r * h[k - 1] * self.inv_sqrt[k];
            out[k] += rho[k] * (2.0 * h[k]);
        }
        for m in 1..dim {
            let sm = self.sqrt[m];
            let row = &rho[m * dim..(m + 1) * dim];
            // h[k] holds row m - 1 until overwritten
            let mut prev = h[m];
            h[m] = (r * prev - sm * h[m - 1]) * self.inv_sqrt[m];
            out[0] += row[m] * h[m];
            for k in m + 1..dim {
                let next = (r * h[k - 1] - sm * prev) * self.inv_sqrt[k];
                prev = h[k];
                h[k] = next;
                out[k - m] += row[k] * (2.0 * next);
            }
        }
    }

    /// `W = sum_d Re(u^d F_d)` at `(x, p)`.
    fn combine(radial: &[Complex64], x: f64, p: f64) -> f64 {
        let norm = (x * x + p * p).sqrt();
        let u = if norm > 0.0 {
            Complex64::new(x / norm, p / norm)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut pow = Complex64::new(1.0, 0.0);
        let mut w = 0.0;
        for f in radial {
            w += pow.re * f.re - pow.im * f.im;
            pow *= u;
        }
        w
    }

    fn scratch(&self) -> (Vec<f64>, Vec<Complex64>) {
        (vec![0.0; self.dim], vec![Complex64::new(0.0, 0.0); self.dim])
    }
}

/// `|2 beta|` for the phase-space point `(x, p)`.
fn radius(x: f64, p: f64) -> f64 {
    (2.0 * (x * x + p * p)).sqrt()
}

pub fn wigner_field(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> Result<WignerField> {
    wigner_field_with(rho, grid, Exec::default())
}

/// [`wigner_field`] with explicit scheduling. Every value is a pure function
/// of `(rho, x, p)`, so the result does not depend on `exec`.
pub fn wigner_field_with(rho: &DensityMatrix, grid: &PhaseSpaceGrid, exec: Exec) -> Result<WignerField> {
    let kernel = Kernel::new(rho)?;
    let grid = PhaseSpaceGrid::new(grid.half_extent, grid.points_per_axis)?;
    let m = grid.points_per_axis;
    let c = grid.centre_index();
    // the radial part is shared by the four mirror images (+-x, +-p)
    let row_pairs = map_indices(c + 1, exec, |a| {
        let (mut h, mut radial) = kernel.scratch();
        let x = grid.coord(c + a);
        let mut upper = vec![0.0; m];
        let mut lower = vec![0.0; m];
        for b in 0..=c {
            let p = grid.coord(c + b);
            kernel.radial(radius(x, p), &mut h, &mut radial);
            upper[c + b] = Kernel::combine(&radial, x, p);
            upper[c - b] = Kernel::combine(&radial, x, -p);
            lower[c + b] = Kernel::combine(&radial, -x, p);
            lower[c - b] = Kernel::combine(&radial, -x, -p);
        }
        (lower, upper)
    });
    let mut values = Array2::zeros((m, m));
    for (a, (lower, upper)) in row_pairs.into_iter().enumerate() {
        values.row_mut(c - a).assign(&ArrayView1::from(&lower));
        values.row_mut(c + a).assign(&ArrayView1::from(&upper));
    }
    Ok(WignerField { values, grid })
}

/// `W` at one phase-space point.
pub fn wigner_at(rho: &DensityMatrix, x: f64, p: f64) -> Result<f64> {
    let kernel = Kernel::new(rho)?;
    let (mut h, mut radial) = kernel.scratch();
    kernel.radial(radius(x, p), &mut h, &mut radial);
    Ok(Kernel::combine(&radial, x, p))
}

/// Integral of the negative part, `int max(0, -W) dx dp`, with 2D Simpson weights.
pub fn negativity(w: &WignerField) -> f64 {
    w.simpson(|v| (-v).max(0.0))
}

/// Grid covering the state: `L = sqrt(2) (sqrt(<n>) + pad)` with spacing <= [`MAX_SPACING`].
pub fn auto_grid(rho: &DensityMatrix, pad: f64) -> Result<PhaseSpaceGrid> {
    if !(pad.is_finite() && pad > 0.0) {
        return Err(Error::invalid(format!("pad must be positive, got {pad}")));
    }
    let mean_n = expectation(rho, &[Ladder::Create, Ladder::Annihilate])?.re.max(0.0);
    let half_extent = SQRT_2 * (mean_n.sqrt() + pad);
    GridSpec {
        half_extent: Some(half_extent),
        points_per_axis: None,
    }
    .resolve_fixed_extent()
}

/// Grid choice with optional overrides; unset fields follow [`auto_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridSpec {
    pub half_extent: Option<f64>,
    pub points_per_axis: Option<usize>,
}

impl GridSpec {
    pub const AUTO: GridSpec = GridSpec {
        half_extent: None,
        points_per_axis: None,
    };

    pub fn resolve(&self, rho: &DensityMatrix) -> Result<PhaseSpaceGrid> {
        match (self.half_extent, self.points_per_axis) {
            (None, None) => auto_grid(rho, DEFAULT_PAD),
            (None, Some(m)) => PhaseSpaceGrid::new(auto_grid(rho, DEFAULT_PAD)?.half_extent, m),
            (Some(_), _) => self.resolve_fixed_extent(),
        }
    }

    /// Uses the given extent; the point count defaults to spacing <= [`MAX_SPACING`].
    fn resolve_fixed_extent(&self) -> Result<PhaseSpaceGrid> {
        let l = self.half_extent.unwrap_or(0.0);
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid(format!("grid half extent must be positive, got {l}")));
        }
        let m = match self.points_per_axis {
            Some(m) => m,
            None => {
                let mut intervals = (2.0 * l / MAX_SPACING).ceil() as usize;
                if intervals % 2 == 1 {
                    intervals += 1;
                }
                intervals.max(2) + 1
            }
        };
        PhaseSpaceGrid::new(l, m)
    }
}

/// Negativity on the default [`auto_grid`].
pub fn state_negativity(rho: &DensityMatrix) -> Result<f64> {
    state_negativity_with(rho, &GridSpec::AUTO, Exec::default())
}

pub fn state_negativity_with(rho: &DensityMatrix, grid: &GridSpec, exec: Exec) -> Result<f64> {
    let grid = grid.resolve(rho)?;
    Ok(negativity(&wigner_field_with(rho, &grid, exec)?))
}
