//! Scenario runs, convergence sweeps, validation reports, the leapfrog demo
//! and their file outputs.

pub mod config;
pub mod converge;
pub mod io;
pub mod leapfrog;
pub mod plot;
pub mod run;
pub mod validate;

pub use config::Scenario;
pub use converge::{converge, RateReport, Runner, Simulation};
pub use leapfrog::{demo_leapfrog, LeapfrogOutcome, LeapfrogParams};
pub use run::{run, Frame, RunRecord, VortexFrame};
pub use validate::{validate, ValidationReport};
