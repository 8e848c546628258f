//! Vortex dynamics in bounded, possibly multiply-connected planar domains.
//!
//! Two systems are evolved side by side: the Kirchhoff–Routh point-vortex
//! ODE ([`point_vortex`]) and a vortex-blob particle discretization of the
//! Euler vorticity equation ([`euler_sim`]). The [`metrics`] module measures
//! how closely the particle patches concentrate around the point vortices
//! (Wasserstein distances, centers of vorticity), and [`harness`] drives
//! scenario runs, convergence studies and validation reports.

pub mod error;
pub mod euler_sim;
pub mod geometry;
pub mod harmonic;
pub mod harness;
pub mod kernels;
pub mod metrics;
pub mod point_vortex;
pub mod velocity;

pub use error::{Error, Result};
pub use euler_sim::{ParticleField, PatchSpec, Profile};
pub use geometry::{Backend, BoundaryCurve, Domain, FourierCurve};
pub use harmonic::{Harmonics, HarmonicEvaluator, HoleField};
pub use kernels::Vec2;
pub use metrics::{SignedMeasure, TransportPlan};
pub use point_vortex::{PointVortexState, SeparationReport};
pub use velocity::FlowState;
