//! Side-by-side integration of the particle system and the point-vortex
//! system, with diagnostics recorded on a fixed frame cadence.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::Scenario;
use crate::error::{Error, Result, StopCondition};
use crate::euler_sim::{advect, support_monitor, ParticleField};
use crate::harmonic::Harmonics;
use crate::kernels::Vec2;
use crate::metrics::{center_of_vorticity, center_velocity, intensity, w1_signed, w2_to_dirac, SignedMeasure};
use crate::point_vortex::{self, separation_monitor, PointVortexState, SeparationReport};
use crate::velocity::FlowState;

/// Per-vortex diagnostics of one frame. Particle-side fields are `None` in
/// point-vortex-only runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexFrame {
    pub y: Vec2,
    pub dy: Vec2,
    pub x: Option<Vec2>,
    pub dx: Option<Vec2>,
    pub w2: Option<f64>,
    /// `max |F_i|` over the particles of patch `i`.
    pub fmax: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: f64,
    pub vortices: Vec<VortexFrame>,
    pub w1: Option<f64>,
    pub hamiltonian: Option<f64>,
    pub patch_separation: Option<SeparationReport>,
    pub vortex_separation: SeparationReport,
    pub hole_coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub name: String,
    pub config_hash: String,
    pub strengths: Vec<f64>,
    pub delta: f64,
    pub dt: f64,
    pub blob: f64,
    pub steps: usize,
    pub frames_every: usize,
    pub t_stop: f64,
    pub stop: StopCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_detail: Option<String>,
    pub wall_time_s: f64,
    pub frames: Vec<Frame>,
}

impl RunRecord {
    pub fn n_vortices(&self) -> usize {
        self.frames.first().map_or(0, |f| f.vortices.len())
    }

    fn max_over(&self, f: impl Fn(&Frame) -> Option<f64>) -> Option<f64> {
        self.frames.iter().map(f).try_fold(f64::NEG_INFINITY, |m, v| v.map(|v| m.max(v)))
    }

    /// `max_t max_i W₂_i`.
    pub fn max_w2(&self) -> Option<f64> {
        self.max_over(|fr| fr.vortices.iter().map(|v| v.w2).try_fold(0.0, |m: f64, w| w.map(|w| m.max(w))))
    }

    /// `max_t max_i |X_i − Y_i|`.
    pub fn max_center_error(&self) -> Option<f64> {
        self.max_over(|fr| fr.vortices.iter().try_fold(0.0, |m: f64, v| v.x.map(|x| m.max((x - v.y).norm()))))
    }

    /// `max_t max_i |dX_i/dt − dY_i/dt|`.
    pub fn max_velocity_error(&self) -> Option<f64> {
        self.max_over(|fr| fr.vortices.iter().try_fold(0.0, |m: f64, v| v.dx.map(|dx| m.max((dx - v.dy).norm()))))
    }

    pub fn max_w1(&self) -> Option<f64> {
        self.max_over(|fr| fr.w1)
    }

    /// `max_t max_i max_{p ∈ i} |F_i(x_p)|`.
    pub fn max_far_field(&self) -> Option<f64> {
        self.max_over(|fr| fr.vortices.iter().try_fold(0.0, |m: f64, v| v.fmax.map(|f| m.max(f))))
    }

    /// Largest relative Hamiltonian change against the first frame.
    pub fn hamiltonian_drift(&self) -> Option<f64> {
        let h0 = self.frames.first()?.hamiltonian?;
        self.max_over(|fr| fr.hamiltonian.map(|h| ((h - h0) / h0).abs()))
    }
}

/// Step size for a scenario: the point-vortex rule
/// `0.1·min(δ², 0.1·d²/max|a|)`, further limited so the fastest patch core
/// turns at most `max_core_rotation` radians per step.
pub fn scenario_dt(scenario: &Scenario, field: &ParticleField, vortices: &PointVortexState) -> f64 {
    if let Some(dt) = scenario.numerics.dt {
        return dt;
    }
    let pv = point_vortex::suggested_dt(vortices, scenario.physics.delta);
    let peak = field.peak_vorticity();
    if peak > 0.0 {
        pv.min(2.0 * scenario.numerics.max_core_rotation / peak)
    } else {
        pv
    }
}

fn stop_from_reports(patch_rep: &SeparationReport, vortex_rep: &SeparationReport) -> Option<StopCondition> {
    if !patch_rep.pair_ok() {
        Some(StopCondition::PatchPair)
    } else if !patch_rep.boundary_ok() {
        Some(StopCondition::PatchBoundary)
    } else if !vortex_rep.pair_ok() {
        Some(StopCondition::VortexPair)
    } else if !vortex_rep.boundary_ok() {
        Some(StopCondition::VortexBoundary)
    } else {
        None
    }
}

fn particle_step_stop(err: &Error) -> Option<StopCondition> {
    match err {
        Error::Clearance { .. } | Error::OutsideDomain(_) => Some(StopCondition::PatchBoundary),
        _ => None,
    }
}

fn vortex_step_stop(err: &Error) -> Option<StopCondition> {
    match err {
        Error::Separation { condition, .. } => Some(*condition),
        Error::Clearance { .. } | Error::OutsideDomain(_) => Some(StopCondition::VortexBoundary),
        _ => None,
    }
}

fn record_frame(
    t: f64,
    state: &FlowState,
    vortices: &PointVortexState,
    harmonics: &Harmonics,
    scenario: &Scenario,
    patch_rep: SeparationReport,
    vortex_rep: SeparationReport,
) -> Result<Frame> {
    let blob = scenario.blob();
    let delta = scenario.physics.delta;
    let dy = point_vortex::kr_rhs(vortices, harmonics, delta)?;
    let field = state.field();
    let mut out = Vec::with_capacity(vortices.len());
    for i in 0..vortices.len() {
        let a = intensity(field, i)?;
        let far = state.far_field_on_patch(i, blob)?;
        let fmax = far.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let (x, dx, w2) = if a == 0.0 {
            let ps = field.patch(i)?;
            let centroid = ps.iter().map(|p| p.position).sum::<Vec2>() / ps.len().max(1) as f64;
            (centroid, Vec2::ZERO, 0.0)
        } else {
            (center_of_vorticity(field, i)?, center_velocity(state, i, blob)?, w2_to_dirac(field, i, vortices.positions[i])?)
        };
        out.push(VortexFrame { y: vortices.positions[i], dy: dy[i], x: Some(x), dx: Some(dx), w2: Some(w2), fmax: Some(fmax) });
    }
    let w1 = w1_signed(&SignedMeasure::from_field(field), &SignedMeasure::from_vortices(&vortices.positions, &vortices.strengths))?;
    let hamiltonian = if harmonics.domain().n_holes() == 0 { Some(point_vortex::hamiltonian(vortices, harmonics)?) } else { None };
    Ok(Frame {
        t,
        vortices: out,
        w1: Some(w1),
        hamiltonian,
        patch_separation: Some(patch_rep),
        vortex_separation: vortex_rep,
        hole_coefficients: state.hole_coefficients().to_vec(),
    })
}

/// Runs a scenario to `t_end` or to the first monitor violation.
fn describe(r: &SeparationReport) -> String {
    let pair = r.min_pair.map_or("none".to_string(), |d| format!("{d:.6}"));
    format!("min pair {pair}, min boundary {:.6}, threshold {:.6}", r.min_boundary, r.threshold)
}

pub fn run(scenario: &Scenario) -> Result<RunRecord> {
    let started = Instant::now();
    scenario.check()?;
    let delta = scenario.physics.delta;
    let domain = Arc::new(scenario.domain.build()?);
    let harmonics = Arc::new(Harmonics::new(domain.clone())?);
    let specs = scenario.patch_specs();
    let field = ParticleField::from_patches(&specs, &domain, delta)?;
    let circulations = scenario.physics.circulations.clone();
    if circulations.len() > domain.n_holes() {
        return Err(Error::Config(format!("{} circulations for {} holes", circulations.len(), domain.n_holes())));
    }
    let mut vortices = PointVortexState::new(
        specs.iter().map(|s| s.center).collect(),
        specs.iter().map(|s| s.strength).collect(),
        circulations.clone(),
    )?;
    let vortex_rep = separation_monitor(&vortices, &domain, delta);
    if !vortex_rep.ok {
        return Err(Error::Config(format!("initial vortex positions violate the δ/2 monitor: {vortex_rep:?}")));
    }
    let mut state = FlowState::new(harmonics.clone(), field, circulations).map_err(|e| match e {
        Error::Clearance { .. } => Error::Config(format!("initial particles too close to the boundary: {e}")),
        other => other,
    })?;

    let dt_rule = scenario_dt(scenario, state.field(), &vortices);
    let t_end = scenario.numerics.t_end;
    let n_steps = (t_end / dt_rule).ceil().max(1.0) as usize;
    let dt = t_end / n_steps as f64;
    let blob = scenario.blob();
    let every = scenario.numerics.frames_every;

    let mut frames = Vec::new();
    let mut stop = StopCondition::TEnd;
    let mut stop_detail = None;
    let mut step = 0usize;
    loop {
        let t = step as f64 * dt;
        let patch_rep = support_monitor(state.field(), &domain);
        let vortex_rep = separation_monitor(&vortices, &domain, delta);
        if let Some(s) = stop_from_reports(&patch_rep, &vortex_rep) {
            stop = s;
            stop_detail = Some(format!("particles: {}; point vortices: {}", describe(&patch_rep), describe(&vortex_rep)));
            break;
        }
        if step % every == 0 || step == n_steps {
            frames.push(record_frame(t, &state, &vortices, &harmonics, scenario, patch_rep, vortex_rep)?);
        }
        if step == n_steps {
            break;
        }
        let next_field = match advect(&state, dt, blob) {
            Ok(f) => f,
            Err(e) => match particle_step_stop(&e) {
                Some(s) => {
                    stop = s;
                    stop_detail = Some(e.to_string());
                    break;
                }
                None => return Err(e),
            },
        };
        let next_state = match FlowState::new(harmonics.clone(), next_field, state.circulations().to_vec()) {
            Ok(s) => s,
            Err(e) => match particle_step_stop(&e) {
                Some(s) => {
                    stop = s;
                    stop_detail = Some(e.to_string());
                    break;
                }
                None => return Err(e),
            },
        };
        let next_vortices = match point_vortex::step(&vortices, &harmonics, delta, dt) {
            Ok(v) => v,
            Err(e) => match vortex_step_stop(&e) {
                Some(s) => {
                    stop = s;
                    stop_detail = Some(e.to_string());
                    break;
                }
                None => return Err(e),
            },
        };
        state = next_state;
        vortices = PointVortexState { t: (step + 1) as f64 * dt, ..next_vortices };
        step += 1;
    }

    Ok(RunRecord {
        name: scenario.name.clone(),
        config_hash: scenario.config_hash(),
        strengths: specs.iter().map(|s| s.strength).collect(),
        delta,
        dt,
        blob,
        steps: step,
        frames_every: every,
        t_stop: step as f64 * dt,
        stop,
        stop_detail,
        wall_time_s: started.elapsed().as_secs_f64(),
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler_sim::Profile;
    use crate::harness::config::PatchConfig;

    fn short(eps: f64) -> Scenario {
        let mut s = Scenario::standard(eps);
        s.numerics.t_end = 0.02;
        s.numerics.frames_every = 2;
        s
    }

    #[test]
    fn short_run_records_frames() {
        let r = run(&short(0.05)).unwrap();
        assert_eq!(r.stop, StopCondition::TEnd);
        assert!((r.t_stop - 0.02).abs() < 1e-15);
        assert!(r.frames.windows(2).all(|w| w[0].t < w[1].t));
        assert_eq!(r.frames.last().unwrap().t, r.t_stop);
        let f0 = &r.frames[0];
        assert_eq!(f0.vortices.len(), 2);
        let w2 = f0.vortices[0].w2.unwrap();
        assert!((w2 - 0.05 * 0.75f64.sqrt()).abs() < 2e-3, "{w2}");
        let bound: f64 = f0.vortices.iter().map(|v| v.w2.unwrap()).sum();
        assert!(f0.w1.unwrap() <= bound + 1e-9);
    }

    #[test]
    fn zero_strength_patches_stay_put() {
        let mut s = short(0.05);
        for p in &mut s.patches {
            p.strength = 0.0;
        }
        let r = run(&s).unwrap();
        assert_eq!(r.stop, StopCondition::TEnd);
        for fr in &r.frames {
            for (v, v0) in fr.vortices.iter().zip(&r.frames[0].vortices) {
                assert_eq!(v.y, v0.y);
                assert_eq!(v.x, v0.x);
                assert_eq!(v.dx, Some(Vec2::ZERO));
                assert_eq!(v.w2, Some(0.0));
            }
            assert_eq!(fr.w1, Some(0.0));
        }
    }

    #[test]
    fn stop_priority() {
        let good = SeparationReport::new(Some(1.0), 1.0, 0.5);
        let bad_pair = SeparationReport::new(Some(0.1), 1.0, 0.5);
        let bad_both = SeparationReport::new(Some(0.1), 0.1, 0.5);
        assert_eq!(stop_from_reports(&good, &good), None);
        assert_eq!(stop_from_reports(&bad_both, &good), Some(StopCondition::PatchPair));
        assert_eq!(stop_from_reports(&good, &bad_pair), Some(StopCondition::VortexPair));
        let bad_boundary = SeparationReport::new(None, 0.1, 0.5);
        assert_eq!(stop_from_reports(&good, &bad_boundary), Some(StopCondition::VortexBoundary));
    }

    #[test]
    fn monitor_stop_leaves_no_violating_frame() {
        // Three point vortices whose closest approach falls to a quarter of
        // the initial spacing.
        let mut s = short(0.016);
        s.physics.delta = 0.16;
        s.numerics.h_over_eps = 0.125;
        s.numerics.t_end = 1.5;
        s.numerics.frames_every = 5;
        s.numerics.dt = Some(0.005);
        let patch = |x: f64, y: f64, a: f64| PatchConfig {
            center: Vec2::new(x, y),
            strength: a,
            profile: Profile::UniformDisc,
            offset: Vec2::ZERO,
        };
        s.patches = vec![patch(0.59, -0.03, 1.0), patch(0.39, -0.02, -1.0), patch(0.39, -0.48, -1.0)];
        let r = run(&s).unwrap();
        assert_ne!(r.stop, StopCondition::TEnd);
        for fr in &r.frames {
            assert!(fr.patch_separation.unwrap().ok && fr.vortex_separation.ok);
        }
    }
}
