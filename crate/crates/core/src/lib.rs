//! Generalized coherent states (GCS) in a truncated Fock space, and the
//! nonclassicality witnesses built from intensity-field correlations.
//!
//! - [`fock`]: state vectors, density matrices, ladder operators, truncation.
//! - [`gcs`]: `|alpha_{eps,t,k}>` states, Poisson-weighted series and Kerr closed forms.
//! - [`correlators`]: normally ordered moments, `g^(3/2)`, `G_c^(3/2)`, `D^(3)`.
//! - [`wigner`]: Wigner function on a grid and its negativity.
//! - [`loss`]: amplitude damping via Kraus operators and the analytic GCS mixture.
//!
//! Grids and sweeps run on rayon when the `parallel` feature is on (default);
//! see [`exec`].

pub mod correlators;
pub mod error;
pub mod exec;
pub mod fock;
pub mod gcs;
pub mod loss;
pub mod wigner;

pub use correlators::{
    d3, d3_expanded, g32, gc32, mean_field, mixture_gc32, moments_from_density, state_phase,
    witness, DivergenceNote, MomentSet, WitnessReport,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use fock::{
    apply_annihilation, apply_creation, choose_dim, expectation, pure_to_density, DensityMatrix,
    FockVector, Ladder, TruncationPolicy,
};
pub use gcs::{
    build_gcs, gcs_density, gcs_state_phase, kerr_g32, kerr_intensity_field, kerr_mean_quadrature,
    kerr_state_phase, series_intensity_field, series_mean_quadrature, GcsParams, SeriesConfig,
};
pub use loss::{
    apply_damping_dense, damp_gcs_analytic, kraus_matrix, loss_sweep, mixture_to_density,
    DampingChannel, GcsMixture, LossRow, ThetaRule,
};
pub use wigner::{
    auto_grid, negativity, state_negativity, wigner_field, GridSpec, PhaseSpaceGrid, WignerField,
};
