//! Derived-from-Anosov partially hyperbolic maps f_k = A_k∘ψ_k∘A_k on the
//! 3-torus, with numerical checks of their construction.
//!
//! Everything is generic over [`Real`]; the aliases below fix the scalar to
//! `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anosov;
pub mod damap;
pub mod error;
pub mod foliation;
pub mod hyperbolicity;
pub mod linalg;
pub mod perturbation;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{Mat3, Vec3};
pub use num_traits;
pub use scalar::{Real, Wide};

pub type Spectrum = anosov::Spectrum<f64>;
pub type EigenFrame = anosov::EigenFrame<f64>;
pub type TubeParams = perturbation::TubeParams<f64>;
pub type CylinderMap = perturbation::CylinderMap<f64>;
pub type DAParams = damap::DAParams<f64>;
pub type DAMap = damap::DAMap<f64>;
pub type TorusPoint = damap::TorusPoint<f64>;
pub type LiftPoint = damap::LiftPoint<f64>;
pub type ConeParams = hyperbolicity::ConeParams<f64>;
pub type LeafSegment = foliation::LeafSegment<f64>;
pub type Vec3f = linalg::Vec3<f64>;
pub type Mat3f = linalg::Mat3<f64>;
