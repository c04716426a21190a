//! Strong leaves, their density on the torus, and the lattice geometry of
//! the center segment.

pub mod field;
pub mod lattice;
pub mod leaf;
pub mod probes;

pub use leaf::{leaf_tangent, trace_leaf, Direction, LeafSegment, TraceOptions};
pub use probes::{
    backward_convergence_probe, density_csv, density_curve, density_probe, u_section_probe,
    ConvergenceReport, DensityReport, USectionOptions, USectionReport,
};
