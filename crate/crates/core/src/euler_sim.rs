//! Vortex-blob particle discretization of the Euler vorticity equation.
//!
//! Patches are seeded by deterministic cell quadrature on a square grid and
//! then carried by the flow. Weights never change, so every patch keeps its
//! intensity, its sign and every cell-based norm proxy exactly.

use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::kernels::Vec2;
use crate::point_vortex::SeparationReport;
use crate::velocity::FlowState;

/// Initial vorticity profile on the ball `B_ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    /// `a·χ_{B_ε}/(πε²)`.
    UniformDisc,
    /// `(1 − λ)` of the mass spread uniformly plus `λ` of it in a
    /// `|x − center|^{−β}` profile (truncated at `h/2`). `λ` defaults to
    /// `ε^{2/p}`, which keeps the `L^p` norm of the singular part at
    /// `O(ε^{−2(1−2/p)})`.
    SingularPerturbed {
        beta: f64,
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    /// Initial point-vortex position `Ȳ_i`.
    pub center: Vec2,
    pub strength: f64,
    #[serde(flatten)]
    pub profile: Profile,
    pub eps: f64,
    /// Grid spacing.
    pub h: f64,
    /// Shift of the ball center from `center`, in units of `ε`.
    #[serde(default)]
    pub offset: Vec2,
}

impl PatchSpec {
    pub fn uniform(center: Vec2, strength: f64, eps: f64, h: f64) -> Self {
        PatchSpec { center, strength, profile: Profile::UniformDisc, eps, h, offset: Vec2::ZERO }
    }

    pub fn ball_center(&self) -> Vec2 {
        self.center + self.offset * self.eps
    }

    /// Mass fraction carried by the singular part.
    pub fn singular_fraction(&self) -> f64 {
        match self.profile {
            Profile::UniformDisc => 0.0,
            Profile::SingularPerturbed { p, lambda, .. } => lambda.unwrap_or_else(|| self.eps.powf(2.0 / p)),
        }
    }
}

/// One vortex blob. `weight = singular_weight + (weight − singular_weight)`
/// splits the carried vorticity into its `L^p` and `L^∞` parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Vec2,
    pub weight: f64,
    pub singular_weight: f64,
    pub patch: usize,
}

impl Particle {
    pub fn bounded_weight(&self) -> f64 {
        self.weight - self.singular_weight
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleField {
    particles: Vec<Particle>,
    patches: Vec<PatchSpec>,
    ranges: Vec<Range<usize>>,
    delta: f64,
}

/// Builds the particles of one patch.
///
/// Requires the ball to keep distance `δ` from the boundary and `h ≤ ε/8`.
pub fn make_patch(spec: &PatchSpec, domain: &Domain, delta: f64) -> Result<Vec<Particle>> {
    let (eps, h) = (spec.eps, spec.h);
    if !(eps > 0.0 && h > 0.0) {
        return Err(Error::Config("patch needs ε > 0 and h > 0".into()));
    }
    if h > eps / 8.0 * (1.0 + 1e-12) {
        return Err(Error::Config(format!("grid spacing h = {h} exceeds ε/8 = {}", eps / 8.0)));
    }
    let lambda = spec.singular_fraction();
    let beta = match spec.profile {
        Profile::UniformDisc => 0.0,
        Profile::SingularPerturbed { beta, p, .. } => {
            if !(p > 2.0) {
                return Err(Error::Config(format!("integrability exponent p = {p} must exceed 2")));
            }
            if !(beta >= 0.0 && beta * p < 2.0) {
                return Err(Error::Config(format!("β·p = {} must lie in [0, 2)", beta * p)));
            }
            beta
        }
    };
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Config(format!("λ = {lambda} outside [0, 1]")));
    }
    let ball = spec.ball_center();
    let clearance = domain.boundary_distance(ball).map_err(|_| Error::Config("patch center outside the domain".into()))? - eps;
    if clearance < delta {
        return Err(Error::Config(format!("patch ball is {clearance:.4} from the boundary, less than δ = {delta}")));
    }

    let n = (eps / h).ceil() as i64 + 1;
    let mut cells = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let off = Vec2::new(i as f64 * h, j as f64 * h);
            if off.norm() <= eps * (1.0 + 1e-12) {
                cells.push((ball + off, off.norm().max(0.5 * h)));
            }
        }
    }
    let singular: Vec<f64> = cells.iter().map(|&(_, r)| r.powf(-beta)).collect();
    let s_total: f64 = singular.iter().sum();
    let count = cells.len() as f64;
    let a = spec.strength;
    let mut particles: Vec<Particle> = cells
        .iter()
        .zip(&singular)
        .map(|(&(pos, _), &s)| {
            let ws = a * lambda * s / s_total;
            let wb = a * (1.0 - lambda) / count;
            Particle { position: pos, weight: ws + wb, singular_weight: ws, patch: 0 }
        })
        .collect();
    // Exact-mass correction on the central cell.
    let center_idx = cells
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 .0 - ball).norm().total_cmp(&(y.1 .0 - ball).norm()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    for _ in 0..8 {
        let total: f64 = particles.iter().map(|p| p.weight).sum();
        if total == a {
            break;
        }
        particles[center_idx].weight += a - total;
    }
    Ok(particles)
}

impl ParticleField {
    /// Seeds every patch and checks pairwise ball separation `≥ δ`.
    pub fn from_patches(specs: &[PatchSpec], domain: &Domain, delta: f64) -> Result<Self> {
        for i in 0..specs.len() {
            for j in (i + 1)..specs.len() {
                let gap = (specs[i].ball_center() - specs[j].ball_center()).norm() - specs[i].eps - specs[j].eps;
                if gap < delta {
                    return Err(Error::Config(format!("patches {i} and {j} are {gap:.4} apart, less than δ = {delta}")));
                }
            }
        }
        let mut particles = Vec::new();
        let mut ranges = Vec::new();
        for (i, spec) in specs.iter().enumerate() {
            let start = particles.len();
            particles.extend(make_patch(spec, domain, delta)?.into_iter().map(|p| Particle { patch: i, ..p }));
            ranges.push(start..particles.len());
        }
        Ok(ParticleField { particles, patches: specs.to_vec(), ranges, delta })
    }

    /// Field from explicit particles (patch labels must be contiguous from 0).
    pub fn from_particles(particles: Vec<Particle>, delta: f64) -> Result<Self> {
        let mut ranges: Vec<Range<usize>> = Vec::new();
        for (k, p) in particles.iter().enumerate() {
            match p.patch.cmp(&ranges.len()) {
                std::cmp::Ordering::Less if p.patch + 1 == ranges.len() => ranges[p.patch].end = k + 1,
                std::cmp::Ordering::Equal => ranges.push(k..k + 1),
                _ => return Err(Error::InvalidInput("particles must be grouped by consecutive patch labels".into())),
            }
        }
        for r in &ranges {
            let slice = &particles[r.clone()];
            if slice.iter().any(|p| p.weight > 0.0) && slice.iter().any(|p| p.weight < 0.0) {
                return Err(Error::InvalidInput("patch weights must share one sign".into()));
            }
        }
        Ok(ParticleField { particles, patches: vec![], ranges, delta })
    }

    pub fn empty(delta: f64) -> Self {
        ParticleField { particles: vec![], patches: vec![], ranges: vec![], delta }
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.particles.iter().map(|p| p.position).collect()
    }

    pub fn patch_specs(&self) -> &[PatchSpec] {
        &self.patches
    }

    pub fn n_patches(&self) -> usize {
        self.ranges.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn patch(&self, i: usize) -> Result<&[Particle]> {
        self.ranges
            .get(i)
            .map(|r| &self.particles[r.clone()])
            .ok_or(Error::IndexOutOfRange { what: "patch", index: i, len: self.ranges.len() })
    }

    pub fn patch_range(&self, i: usize) -> Result<Range<usize>> {
        self.ranges.get(i).cloned().ok_or(Error::IndexOutOfRange { what: "patch", index: i, len: self.ranges.len() })
    }

    /// Same particles at new positions.
    pub fn moved(&self, positions: &[Vec2]) -> Self {
        debug_assert_eq!(positions.len(), self.particles.len());
        let particles = self
            .particles
            .iter()
            .zip(positions)
            .map(|(p, &x)| Particle { position: x, ..*p })
            .collect();
        ParticleField { particles, patches: self.patches.clone(), ranges: self.ranges.clone(), delta: self.delta }
    }

    fn cell_area(&self, i: usize) -> Result<f64> {
        self.patches
            .get(i)
            .map(|s| s.h * s.h)
            .ok_or(Error::Unsupported("norm proxies need grid metadata from patch specs"))
    }

    /// Cellwise `(Σ |ω^p|^q h²)^{1/q}` of the singular part of patch `i`.
    pub fn lp_proxy(&self, i: usize, q: f64) -> Result<f64> {
        let area = self.cell_area(i)?;
        let sum: f64 = self.patch(i)?.iter().map(|p| (p.singular_weight.abs() / area).powf(q) * area).sum();
        Ok(sum.powf(1.0 / q))
    }

    /// Cellwise `max |ω^∞|` of the bounded part of patch `i`.
    pub fn linf_proxy(&self, i: usize) -> Result<f64> {
        let area = self.cell_area(i)?;
        Ok(self.patch(i)?.iter().map(|p| p.bounded_weight().abs() / area).fold(0.0, f64::max))
    }

    /// Largest discrete vorticity value `max |w|/h²` over all patches.
    pub fn peak_vorticity(&self) -> f64 {
        (0..self.n_patches())
            .filter_map(|i| {
                let area = self.cell_area(i).ok()?;
                Some(self.patch(i).ok()?.iter().map(|p| p.weight.abs() / area).fold(0.0, f64::max))
            })
            .fold(0.0, f64::max)
    }
}

/// One RK4 step of every particle along the velocity of the current field.
/// Weights, patch labels and part splits are carried over unchanged.
pub fn advect(state: &FlowState, dt: f64, blob: f64) -> Result<ParticleField> {
    let x0 = state.field().positions();
    if x0.is_empty() {
        return Ok(state.field().clone());
    }
    let stage = |base: &[Vec2], k: &[Vec2], h: f64| -> Vec<Vec2> { base.iter().zip(k).map(|(&x, &v)| x + v * h).collect() };
    let k1 = state.particle_velocities(blob)?;
    let s2 = state.with_positions(&stage(&x0, &k1, 0.5 * dt))?;
    let k2 = s2.particle_velocities(blob)?;
    let s3 = state.with_positions(&stage(&x0, &k2, 0.5 * dt))?;
    let k3 = s3.particle_velocities(blob)?;
    let s4 = state.with_positions(&stage(&x0, &k3, dt))?;
    let k4 = s4.particle_velocities(blob)?;
    let x1: Vec<Vec2> = (0..x0.len())
        .map(|p| x0[p] + (k1[p] + k2[p] * 2.0 + k3[p] * 2.0 + k4[p]) * (dt / 6.0))
        .collect();
    if let Some(&p) = x1.iter().find(|&&p| !state.domain().contains(p)) {
        return Err(Error::OutsideDomain(p));
    }
    Ok(state.field().moved(&x1))
}

/// Minimum distance between particles of different patches, computed with
/// a uniform grid whose cell size is an upper bound of the answer.
pub fn min_cross_patch_distance(field: &ParticleField) -> Option<f64> {
    let n = field.n_patches();
    let non_empty: Vec<usize> = (0..n).filter(|&i| !field.ranges[i].is_empty()).collect();
    if non_empty.len() < 2 {
        return None;
    }
    let ps = &field.particles;
    let mut bound = f64::INFINITY;
    for (ai, &a) in non_empty.iter().enumerate() {
        for &b in &non_empty[ai + 1..] {
            let rb = field.ranges[b].clone();
            let cb = ps[rb.clone()].iter().map(|p| p.position).sum::<Vec2>() / rb.len() as f64;
            let near = ps[field.ranges[a].clone()]
                .iter()
                .min_by(|x, y| (x.position - cb).norm_sq().total_cmp(&(y.position - cb).norm_sq()))
                .expect("non-empty patch");
            let d = ps[rb].iter().map(|q| (q.position - near.position).norm()).fold(f64::INFINITY, f64::min);
            bound = bound.min(d);
        }
    }
    if bound == 0.0 {
        return Some(0.0);
    }
    let key = |x: Vec2| ((x.x / bound).floor() as i64, (x.y / bound).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, p) in ps.iter().enumerate() {
        grid.entry(key(p.position)).or_default().push(k);
    }
    let mut best = bound;
    for (k, p) in ps.iter().enumerate() {
        let (cx, cy) = key(p.position);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(cell) = grid.get(&(cx + dx, cy + dy)) {
                    for &q in cell {
                        if q > k && ps[q].patch != p.patch {
                            best = best.min((ps[q].position - p.position).norm());
                        }
                    }
                }
            }
        }
    }
    Some(best)
}

/// Support separation of the patches (particle point sets), compared with `δ/2`.
pub fn support_monitor(field: &ParticleField, domain: &Domain) -> SeparationReport {
    let min_boundary = field
        .particles
        .iter()
        .map(|p| domain.boundary_distance(p.position).unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    SeparationReport::new(min_cross_patch_distance(field), min_boundary, field.delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> Domain {
        Domain::unit_disk(64).unwrap()
    }

    fn brute_force(field: &ParticleField) -> Option<f64> {
        let ps = field.particles();
        let mut best: Option<f64> = None;
        for i in 0..ps.len() {
            for j in (i + 1)..ps.len() {
                if ps[i].patch != ps[j].patch {
                    let d = (ps[i].position - ps[j].position).norm();
                    best = Some(best.map_or(d, |b: f64| b.min(d)));
                }
            }
        }
        best
    }

    #[test]
    fn uniform_patch_mass_and_moments() {
        let spec = PatchSpec::uniform(Vec2::new(0.1, -0.2), -2.0, 0.1, 0.01);
        let ps = make_patch(&spec, &disk(), 0.5).unwrap();
        let total: f64 = ps.iter().map(|p| p.weight).sum();
        assert_eq!(total, -2.0);
        assert!(ps.iter().all(|p| p.weight < 0.0));
        let second: f64 = ps.iter().map(|p| p.weight / -2.0 * (p.position - spec.center).norm_sq()).sum();
        // Discrete second moment approaches ε²/2.
        assert!((second.sqrt() - 0.1 / 2f64.sqrt()).abs() < 2e-3, "{}", second.sqrt());
        let field = ParticleField::from_patches(&[spec], &disk(), 0.5).unwrap();
        let sup = field.linf_proxy(0).unwrap();
        let expect = 2.0 / (std::f64::consts::PI * 0.01);
        assert!((sup / expect - 1.0).abs() < 0.03, "{sup} vs {expect}");
        assert_eq!(field.lp_proxy(0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn singular_patch_split() {
        let spec = PatchSpec {
            center: Vec2::ZERO,
            strength: 1.0,
            profile: Profile::SingularPerturbed { beta: 0.5, p: 3.0, lambda: None },
            eps: 0.1,
            h: 0.01,
            offset: Vec2::ZERO,
        };
        let ps = make_patch(&spec, &disk(), 0.5).unwrap();
        let singular: f64 = ps.iter().map(|p| p.singular_weight).sum();
        assert!((singular - 0.1f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert_eq!(ps.iter().map(|p| p.weight).sum::<f64>(), 1.0);
    }

    #[test]
    fn config_errors() {
        let d = disk();
        let mut spec = PatchSpec::uniform(Vec2::new(0.6, 0.0), 1.0, 0.05, 0.005);
        assert!(matches!(make_patch(&spec, &d, 0.5), Err(Error::Config(_))));
        spec.center = Vec2::ZERO;
        spec.h = 0.01;
        assert!(matches!(make_patch(&spec, &d, 0.5), Err(Error::Config(_))));
        spec.h = 0.005;
        spec.profile = Profile::SingularPerturbed { beta: 0.7, p: 3.0, lambda: None };
        assert!(matches!(make_patch(&spec, &d, 0.5), Err(Error::Config(_))));
        let a = PatchSpec::uniform(Vec2::new(-0.2, 0.0), 1.0, 0.05, 0.005);
        let b = PatchSpec::uniform(Vec2::new(0.2, 0.0), 1.0, 0.05, 0.005);
        assert!(ParticleField::from_patches(&[a, b], &d, 0.5).is_err());
    }

    #[test]
    fn support_monitor_values() {
        let d = disk();
        let ps = vec![
            Particle { position: Vec2::new(0.2, 0.0), weight: 1.0, singular_weight: 0.0, patch: 0 },
            Particle { position: Vec2::new(-0.2, 0.0), weight: 1.0, singular_weight: 0.0, patch: 1 },
        ];
        let f = ParticleField::from_particles(ps.clone(), 0.5).unwrap();
        let rep = support_monitor(&f, &d);
        assert!((rep.min_pair.unwrap() - 0.4).abs() < 1e-15);
        assert!((rep.min_boundary - 0.8).abs() < 1e-15);
        let one = ParticleField::from_particles(ps[..1].to_vec(), 0.5).unwrap();
        assert_eq!(support_monitor(&one, &d).min_pair, None);
    }

    #[test]
    fn bucketed_scan_matches_brute_force() {
        let mut state = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..40 {
            let patches = 2 + trial % 3;
            let mut ps = Vec::new();
            for i in 0..patches {
                let c = Vec2::new(next() - 0.5, next() - 0.5);
                let spread = 0.01 + 0.3 * next();
                for _ in 0..(5 + trial * 3) {
                    ps.push(Particle {
                        position: c + Vec2::new(next() - 0.5, next() - 0.5) * spread,
                        weight: 1.0,
                        singular_weight: 0.0,
                        patch: i,
                    });
                }
            }
            let f = ParticleField::from_particles(ps, 0.1).unwrap();
            assert_eq!(min_cross_patch_distance(&f), brute_force(&f), "trial {trial}");
        }
    }

    #[test]
    fn mixed_signs_rejected() {
        let ps = vec![
            Particle { position: Vec2::new(0.2, 0.0), weight: 1.0, singular_weight: 0.0, patch: 0 },
            Particle { position: Vec2::new(0.21, 0.0), weight: -1.0, singular_weight: 0.0, patch: 0 },
        ];
        assert!(ParticleField::from_particles(ps, 0.5).is_err());
    }
}
