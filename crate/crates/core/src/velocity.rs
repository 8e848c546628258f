//! Velocity of a particle field in a bounded domain:
//! `u = K_δ ∗ ω + ∇^⊥η + Σ_m c_m ξ_m`, where `η` is the harmonic extension of
//! `G ∗ ω` from the boundary and `c_m = ∫ ω w_m + γ_m`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euler_sim::ParticleField;
use crate::geometry::{Backend, Domain};
use crate::harmonic::{HarmonicEvaluator, Harmonics};
use crate::kernels::{blob_kernel, Vec2};

/// Scaled image data for the unit-disk fast path.
#[derive(Debug, Clone)]
struct DiskImages {
    center: Vec2,
    radius: f64,
    scaled: Vec<(Vec2, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    harmonics: Arc<Harmonics>,
    field: ParticleField,
    circulations: Vec<f64>,
    eta: HarmonicEvaluator,
    hole_coeffs: Vec<f64>,
    images: Option<DiskImages>,
}

impl FlowState {
    /// `circulations[m]` is `γ_{m+1}`; missing entries count as zero.
    pub fn new(harmonics: Arc<Harmonics>, field: ParticleField, circulations: Vec<f64>) -> Result<Self> {
        let m = harmonics.domain().n_holes();
        if circulations.len() > m {
            return Err(Error::InvalidInput(format!("{} circulations given for {m} holes", circulations.len())));
        }
        let sources: Vec<(Vec2, f64)> = field.particles().iter().map(|p| (p.position, p.weight)).collect();
        if let Some(&(x, _)) = sources.iter().find(|(x, _)| !harmonics.domain().contains(*x)) {
            return Err(Error::OutsideDomain(x));
        }
        let eta = harmonics.point_source_extension(&sources)?;
        let mut hole_coeffs = Vec::with_capacity(m);
        for (k, w) in harmonics.harmonic_measures().iter().enumerate() {
            let mut c = circulations.get(k).copied().unwrap_or(0.0);
            for &(x, q) in &sources {
                c += q * w.value(x)?;
            }
            hole_coeffs.push(c);
        }
        let images = match harmonics.domain().backend() {
            Backend::AnalyticDisk { center, radius } => Some(DiskImages {
                center: *center,
                radius: *radius,
                scaled: sources
                    .iter()
                    .map(|&(y, q)| {
                        let ys = (y - *center) / *radius;
                        (ys, ys.norm_sq(), q)
                    })
                    .collect(),
            }),
            _ => None,
        };
        Ok(FlowState { harmonics, field, circulations, eta, hole_coeffs, images })
    }

    /// Same weights and circulations, particles moved to `positions`.
    pub fn with_positions(&self, positions: &[Vec2]) -> Result<Self> {
        if positions.len() != self.field.particles().len() {
            return Err(Error::InvalidInput("one position per particle required".into()));
        }
        FlowState::new(self.harmonics.clone(), self.field.moved(positions), self.circulations.clone())
    }

    pub fn field(&self) -> &ParticleField {
        &self.field
    }

    pub fn harmonics(&self) -> &Arc<Harmonics> {
        &self.harmonics
    }

    pub fn domain(&self) -> &Domain {
        self.harmonics.domain()
    }

    /// Boundary correction potential `η`.
    pub fn eta(&self) -> &HarmonicEvaluator {
        &self.eta
    }

    /// `c_m` for every hole.
    pub fn hole_coefficients(&self) -> &[f64] {
        &self.hole_coeffs
    }

    pub fn circulations(&self) -> &[f64] {
        &self.circulations
    }

    fn boundary_part(&self, x: Vec2) -> Result<Vec2> {
        let mut v = match &self.images {
            Some(img) => {
                let xs = (x - img.center) / img.radius;
                let x2 = xs.norm_sq();
                let mut g = Vec2::ZERO;
                for &(ys, y2, q) in &img.scaled {
                    let d = x2 * y2 - 2.0 * xs.dot(ys) + 1.0;
                    g += (xs * y2 - ys) * (q / d);
                }
                (g * (-0.5 / (PI * img.radius))).perp()
            }
            None => self.eta.gradient(x)?.perp(),
        };
        for (c, xi) in self.hole_coeffs.iter().zip(self.harmonics.hole_fields()) {
            v += xi.eval(x)? * *c;
        }
        Ok(v)
    }

    fn check(&self, x: Vec2) -> Result<()> {
        if self.domain().contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(x))
        }
    }

    /// `∇^⊥η(x) + Σ_m c_m ξ_m(x)`.
    pub fn boundary_velocity(&self, x: Vec2) -> Result<Vec2> {
        self.check(x)?;
        self.boundary_part(x)
    }

    /// Full velocity at an interior point.
    pub fn velocity_at(&self, x: Vec2, blob: f64) -> Result<Vec2> {
        self.check(x)?;
        let mut v = self.boundary_part(x)?;
        for p in self.field.particles() {
            v += blob_kernel(x - p.position, blob) * p.weight;
        }
        Ok(v)
    }

    /// Velocity at many points, evaluated in parallel. The result does not
    /// depend on the thread count.
    pub fn velocities(&self, points: &[Vec2], blob: f64) -> Result<Vec<Vec2>> {
        points.par_iter().map(|&x| self.velocity_at(x, blob)).collect()
    }

    pub fn particle_velocities(&self, blob: f64) -> Result<Vec<Vec2>> {
        self.velocities(&self.field.positions(), blob)
    }

    /// Free-space self velocity `u_i = K_δ ∗ ω_i` of patch `i`.
    pub fn patch_velocity(&self, x: Vec2, i: usize, blob: f64) -> Result<Vec2> {
        Ok(self
            .field
            .patch(i)?
            .iter()
            .map(|p| blob_kernel(x - p.position, blob) * p.weight)
            .sum())
    }

    /// `F_i = u − u_i`: the velocity patch `i` feels from everything else.
    pub fn far_field_at(&self, x: Vec2, i: usize, blob: f64) -> Result<Vec2> {
        self.check(x)?;
        let own = self.field.patch_range(i)?;
        let mut v = self.boundary_part(x)?;
        for (k, p) in self.field.particles().iter().enumerate() {
            if !own.contains(&k) {
                v += blob_kernel(x - p.position, blob) * p.weight;
            }
        }
        Ok(v)
    }

    /// `F_i` at the particles of patch `i`.
    pub fn far_field_on_patch(&self, i: usize, blob: f64) -> Result<Vec<Vec2>> {
        let pts: Vec<Vec2> = self.field.patch(i)?.iter().map(|p| p.position).collect();
        pts.par_iter().map(|&x| self.far_field_at(x, i, blob)).collect()
    }
}
