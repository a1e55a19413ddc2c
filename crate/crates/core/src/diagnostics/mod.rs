//! Eigenfunctions, projection norms, numerical-range probes and polygon
//! reconstruction.

pub mod eigenfunction;
pub mod probe;
pub mod quadrature;
pub mod reconstruct;

pub use eigenfunction::{
    adjoint_eigenfunction, eigenfunction, projection_norm, PiecewiseExponentialFunction,
    ProjectionReport,
};
pub use probe::{numerical_range_probe, probe_details, ProbeConfig, ProbeResult};
pub use quadrature::{exp_gram, integrate};
pub use reconstruct::{reconstruct_polygon, ReconstructConfig, Reconstruction, RecoveredEdge};
