//! Two like-signed point vortices near the wall of the unit disk: they spin
//! around each other while the pair travels along the boundary, so their
//! radial order keeps flipping.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::run::{Frame, RunRecord, VortexFrame};
use crate::error::{Error, Result, StopCondition};
use crate::geometry::Domain;
use crate::harmonic::Harmonics;
use crate::kernels::Vec2;
use crate::point_vortex::{self, separation_monitor, PointVortexState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeapfrogParams {
    pub positions: [Vec2; 2],
    pub strengths: [f64; 2],
    pub delta: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub frames_every: usize,
}

impl Default for LeapfrogParams {
    fn default() -> Self {
        LeapfrogParams {
            positions: [Vec2::new(0.75, 0.0), Vec2::new(0.85, 0.0)],
            strengths: [1.0, 1.0],
            delta: 0.1,
            t_end: 2.0,
            dt: None,
            frames_every: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeapfrogOutcome {
    pub record: RunRecord,
    /// Sign changes of `|Y₁| − |Y₂|` over all steps.
    pub exchanges: usize,
    pub hamiltonian_drift: f64,
}

fn frame(state: &PointVortexState, h: &Harmonics, delta: f64) -> Result<Frame> {
    let dy = point_vortex::kr_rhs(state, h, delta)?;
    Ok(Frame {
        t: state.t,
        vortices: state
            .positions
            .iter()
            .zip(dy)
            .map(|(&y, dy)| VortexFrame { y, dy, x: None, dx: None, w2: None, fmax: None })
            .collect(),
        w1: None,
        hamiltonian: Some(point_vortex::hamiltonian(state, h)?),
        patch_separation: None,
        vortex_separation: separation_monitor(state, h.domain(), delta),
        hole_coefficients: vec![],
    })
}

/// Integrates the point-vortex pair and counts radial-order exchanges.
pub fn demo_leapfrog(params: &LeapfrogParams) -> Result<LeapfrogOutcome> {
    let started = Instant::now();
    if params.frames_every == 0 || !(params.t_end > 0.0) || !(params.delta > 0.0) {
        return Err(Error::Config("leapfrog needs t_end > 0, δ > 0 and frames_every ≥ 1".into()));
    }
    if params.strengths[0] * params.strengths[1] <= 0.0 {
        return Err(Error::Config("leapfrogging needs two like-signed vortices".into()));
    }
    let h = Arc::new(Harmonics::new(Domain::unit_disk(64)?)?);
    let mut state = PointVortexState::new(params.positions.to_vec(), params.strengths.to_vec(), vec![])?;
    if !separation_monitor(&state, h.domain(), params.delta).ok {
        return Err(Error::Config("initial vortices violate the δ/2 monitor".into()));
    }
    let dt_rule = params.dt.unwrap_or_else(|| point_vortex::suggested_dt(&state, params.delta));
    let n_steps = (params.t_end / dt_rule).ceil().max(1.0) as usize;
    let dt = params.t_end / n_steps as f64;

    let order = |s: &PointVortexState| (s.positions[0].norm() - s.positions[1].norm()).signum();
    let mut last_order = order(&state);
    let mut exchanges = 0;
    let mut frames = vec![frame(&state, &h, params.delta)?];
    let mut stop = StopCondition::TEnd;
    let mut stop_detail = None;
    let mut step = 0;
    while step < n_steps {
        match point_vortex::step(&state, &h, params.delta, dt) {
            Ok(next) => state = PointVortexState { t: (step + 1) as f64 * dt, ..next },
            Err(e @ Error::Separation { condition, .. }) => {
                stop = condition;
                stop_detail = Some(e.to_string());
                break;
            }
            Err(e @ (Error::OutsideDomain(_) | Error::Clearance { .. })) => {
                stop = StopCondition::VortexBoundary;
                stop_detail = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
        step += 1;
        let o = order(&state);
        if o != 0.0 && o != last_order {
            if last_order != 0.0 {
                exchanges += 1;
            }
            last_order = o;
        }
        if !separation_monitor(&state, h.domain(), params.delta).ok {
            stop = if separation_monitor(&state, h.domain(), params.delta).pair_ok() {
                StopCondition::VortexBoundary
            } else {
                StopCondition::VortexPair
            };
            break;
        }
        if step % params.frames_every == 0 || step == n_steps {
            frames.push(frame(&state, &h, params.delta)?);
        }
    }
    let h0 = frames[0].hamiltonian.unwrap_or(0.0);
    let drift = frames
        .iter()
        .filter_map(|f| f.hamiltonian)
        .map(|v| ((v - h0) / h0).abs())
        .fold(0.0, f64::max);
    let record = RunRecord {
        name: "leapfrog".into(),
        config_hash: String::new(),
        strengths: params.strengths.to_vec(),
        delta: params.delta,
        dt,
        blob: 0.0,
        steps: step,
        frames_every: params.frames_every,
        t_stop: step as f64 * dt,
        stop,
        stop_detail,
        wall_time_s: started.elapsed().as_secs_f64(),
        frames,
    };
    Ok(LeapfrogOutcome { record, exchanges, hamiltonian_drift: drift })
}
