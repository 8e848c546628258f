//! Kirchhoff–Routh point-vortex system in a bounded domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StopCondition};
use crate::geometry::Domain;
use crate::harmonic::Harmonics;
use crate::kernels::{biot_savart_kernel, newtonian_potential, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVortexState {
    pub positions: Vec<Vec2>,
    pub strengths: Vec<f64>,
    /// Circulations `γ_m` around the holes.
    pub circulations: Vec<f64>,
    pub t: f64,
}

impl PointVortexState {
    pub fn new(positions: Vec<Vec2>, strengths: Vec<f64>, circulations: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != strengths.len() {
            return Err(Error::InvalidInput("need N ≥ 1 positions with one strength each".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) || strengths.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("non-finite vortex data".into()));
        }
        Ok(PointVortexState { positions, strengths, circulations, t: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Pairwise and boundary clearances compared against `δ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `None` when there is no pair to compare.
    pub min_pair: Option<f64>,
    pub min_boundary: f64,
    pub threshold: f64,
    pub ok: bool,
}

impl SeparationReport {
    pub fn new(min_pair: Option<f64>, min_boundary: f64, delta: f64) -> Self {
        let threshold = 0.5 * delta;
        let ok = min_pair.is_none_or(|d| d >= threshold) && min_boundary >= threshold;
        SeparationReport { min_pair, min_boundary, threshold, ok }
    }

    pub fn pair_ok(&self) -> bool {
        self.min_pair.is_none_or(|d| d >= self.threshold)
    }

    pub fn boundary_ok(&self) -> bool {
        self.min_boundary >= self.threshold
    }
}

/// Separation monitor on the vortex positions.
pub fn separation_monitor(state: &PointVortexState, domain: &Domain, delta: f64) -> SeparationReport {
    let ys = &state.positions;
    let mut min_pair: Option<f64> = None;
    for i in 0..ys.len() {
        for j in (i + 1)..ys.len() {
            let d = (ys[i] - ys[j]).norm();
            min_pair = Some(min_pair.map_or(d, |m| m.min(d)));
        }
    }
    let min_boundary = ys
        .iter()
        .map(|&y| domain.boundary_distance(y).unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    SeparationReport::new(min_pair, min_boundary, delta)
}

fn check_separation(state: &PointVortexState, domain: &Domain, delta: f64) -> Result<()> {
    let report = separation_monitor(state, domain, delta);
    if report.ok {
        return Ok(());
    }
    let condition = if report.pair_ok() { StopCondition::VortexBoundary } else { StopCondition::VortexPair };
    Err(Error::Separation { condition, report })
}

/// Right-hand side of the Kirchhoff–Routh system:
/// `dY_i/dt = Σ_{j≠i} a_j K(Y_i − Y_j) + ∇^⊥θ(Y_i) + Σ_m (Σ_j a_j w_m(Y_j) + γ_m) ξ_m(Y_i)`.
///
/// Fails with [`Error::Separation`] when the `δ/2` monitor is violated.
pub fn kr_rhs(state: &PointVortexState, harmonics: &Harmonics, delta: f64) -> Result<Vec<Vec2>> {
    let domain = harmonics.domain();
    check_separation(state, domain, delta)?;
    let sources: Vec<(Vec2, f64)> = state.positions.iter().copied().zip(state.strengths.iter().copied()).collect();
    let theta = harmonics.point_source_extension(&sources)?;
    let mut hole_coeffs = Vec::with_capacity(domain.n_holes());
    for (m, w) in harmonics.harmonic_measures().iter().enumerate() {
        let mut c = state.circulations.get(m).copied().unwrap_or(0.0);
        for &(y, a) in &sources {
            c += a * w.value(y)?;
        }
        hole_coeffs.push(c);
    }
    let mut out = Vec::with_capacity(state.len());
    for (i, &yi) in state.positions.iter().enumerate() {
        let mut v = theta.gradient(yi)?.perp();
        for (j, &(yj, aj)) in sources.iter().enumerate() {
            if j != i && aj != 0.0 {
                v += biot_savart_kernel(yi - yj)? * aj;
            }
        }
        for (c, xi) in hole_coeffs.iter().zip(harmonics.hole_fields()) {
            v += xi.eval(yi)? * *c;
        }
        out.push(v);
    }
    Ok(out)
}

fn shifted(state: &PointVortexState, k: &[Vec2], h: f64) -> PointVortexState {
    PointVortexState {
        positions: state.positions.iter().zip(k).map(|(&y, &v)| y + v * h).collect(),
        strengths: state.strengths.clone(),
        circulations: state.circulations.clone(),
        t: state.t + h,
    }
}

/// One classical RK4 step. On error the input state is the last good state.
pub fn step(state: &PointVortexState, harmonics: &Harmonics, delta: f64, dt: f64) -> Result<PointVortexState> {
    let k1 = kr_rhs(state, harmonics, delta)?;
    let k2 = kr_rhs(&shifted(state, &k1, 0.5 * dt), harmonics, delta)?;
    let k3 = kr_rhs(&shifted(state, &k2, 0.5 * dt), harmonics, delta)?;
    let k4 = kr_rhs(&shifted(state, &k3, dt), harmonics, delta)?;
    let positions: Vec<Vec2> = (0..state.len())
        .map(|i| state.positions[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
        .collect();
    if let Some(&p) = positions.iter().find(|&&p| !harmonics.domain().contains(p)) {
        return Err(Error::OutsideDomain(p));
    }
    Ok(PointVortexState {
        positions,
        strengths: state.strengths.clone(),
        circulations: state.circulations.clone(),
        t: state.t + dt,
    })
}

/// Kirchhoff–Routh energy for simply connected domains,
/// `H = Σ_{i<j} a_i a_j G_Ω(Y_i, Y_j) + ½ Σ_i a_i² h(Y_i)`,
/// where `h(y) = R(y, y)` is the regular part of the Green function on the
/// diagonal (`R(·, y)` harmonic with boundary values `G(· − y)`) and
/// `G_Ω = R − G` is the Green function of the Laplacian with zero boundary
/// values. For one vortex in the unit disk, `H = −a² log(1 − |Y|²) / 4π`.
pub fn hamiltonian(state: &PointVortexState, harmonics: &Harmonics) -> Result<f64> {
    if harmonics.domain().n_holes() > 0 {
        return Err(Error::Unsupported("Hamiltonian is only implemented for simply connected domains"));
    }
    let ys = &state.positions;
    let mut regular = Vec::with_capacity(ys.len());
    for &y in ys {
        regular.push(harmonics.point_source_extension(&[(y, 1.0)])?);
    }
    let mut h = 0.0;
    for i in 0..ys.len() {
        let (ai, yi) = (state.strengths[i], ys[i]);
        h += 0.5 * ai * ai * regular[i].value(yi)?;
        for j in (i + 1)..ys.len() {
            let green = regular[j].value(yi)? - newtonian_potential(yi - ys[j])?;
            h += ai * state.strengths[j] * green;
        }
    }
    Ok(h)
}

/// Fixed step size `0.1·min(δ², 0.1·d²/max|a|)` with `d` the closest pair distance.
pub fn suggested_dt(state: &PointVortexState, delta: f64) -> f64 {
    let amax = state.strengths.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut dmin = f64::INFINITY;
    for i in 0..state.len() {
        for j in (i + 1)..state.len() {
            dmin = dmin.min((state.positions[i] - state.positions[j]).norm());
        }
    }
    let pair = if amax > 0.0 && dmin.is_finite() { 0.1 * dmin * dmin / amax } else { f64::INFINITY };
    0.1 * (delta * delta).min(pair)
}
