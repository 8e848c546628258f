//! Scenario files: a versioned TOML schema describing the domain, the
//! patches and the numerical parameters of a run.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::euler_sim::{PatchSpec, Profile};
use crate::geometry::{BoundaryCurve, CurveRole, Domain, FourierCurve};
use crate::kernels::Vec2;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum CurveConfig {
    Circle { center: Vec2, radius: f64 },
    Ellipse { center: Vec2, a: f64, b: f64 },
    Fourier(FourierCurve),
}

impl CurveConfig {
    pub fn to_curve(&self) -> FourierCurve {
        match self {
            CurveConfig::Circle { center, radius } => FourierCurve::circle(*center, *radius),
            CurveConfig::Ellipse { center, a, b } => FourierCurve::ellipse(*center, *a, *b),
            CurveConfig::Fourier(c) => c.clone(),
        }
    }
}

fn default_radius() -> f64 {
    1.0
}

fn default_n_quad() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "kebab-case")]
pub enum DomainConfig {
    AnalyticDisk {
        #[serde(default)]
        center: Vec2,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_n_quad")]
        n_quad: usize,
    },
    AnalyticAnnulus {
        #[serde(default)]
        center: Vec2,
        inner: f64,
        outer: f64,
        #[serde(default = "default_n_quad")]
        n_quad: usize,
    },
    BoundaryIntegral {
        outer: CurveConfig,
        #[serde(default)]
        holes: Vec<CurveConfig>,
        #[serde(default = "default_n_quad")]
        n_quad: usize,
    },
}

impl DomainConfig {
    pub fn unit_disk() -> Self {
        DomainConfig::AnalyticDisk { center: Vec2::ZERO, radius: 1.0, n_quad: default_n_quad() }
    }

    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainConfig::AnalyticDisk { center, radius, n_quad } => Domain::disk(*center, *radius, *n_quad),
            DomainConfig::AnalyticAnnulus { center, inner, outer, n_quad } => {
                Domain::annulus(*center, *inner, *outer, *n_quad)
            }
            DomainConfig::BoundaryIntegral { outer, holes, n_quad } => {
                let outer = BoundaryCurve::new(outer.to_curve(), CurveRole::Outer, *n_quad)?;
                let holes = holes
                    .iter()
                    .map(|h| BoundaryCurve::new(h.to_curve(), CurveRole::Hole, *n_quad))
                    .collect::<Result<Vec<_>>>()?;
                Domain::new(outer, holes)
            }
        }
    }

    pub fn n_quad(&self) -> usize {
        match self {
            DomainConfig::AnalyticDisk { n_quad, .. }
            | DomainConfig::AnalyticAnnulus { n_quad, .. }
            | DomainConfig::BoundaryIntegral { n_quad, .. } => *n_quad,
        }
    }

    pub fn set_n_quad(&mut self, n: usize) {
        match self {
            DomainConfig::AnalyticDisk { n_quad, .. }
            | DomainConfig::AnalyticAnnulus { n_quad, .. }
            | DomainConfig::BoundaryIntegral { n_quad, .. } => *n_quad = n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchConfig {
    pub center: Vec2,
    pub strength: f64,
    #[serde(flatten)]
    pub profile: Profile,
    /// Ball-center shift in units of `ε`.
    #[serde(default)]
    pub offset: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    pub delta: f64,
    pub eps: f64,
    /// `γ_m` per hole.
    #[serde(default)]
    pub circulations: Vec<f64>,
}

fn default_h_over_eps() -> f64 {
    0.1
}
fn default_blob_over_h() -> f64 {
    2.0
}
fn default_frames_every() -> usize {
    10
}
fn default_max_ratio() -> f64 {
    0.1
}
fn default_rotation() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    #[serde(default = "default_h_over_eps")]
    pub h_over_eps: f64,
    #[serde(default = "default_blob_over_h")]
    pub blob_over_h: f64,
    pub t_end: f64,
    /// Fixed step; derived from the separation and core rotation rules when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_frames_every")]
    pub frames_every: usize,
    #[serde(default = "default_max_ratio")]
    pub max_eps_over_delta: f64,
    /// Largest rotation angle per step of the fastest patch core.
    #[serde(default = "default_rotation")]
    pub max_core_rotation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeConfig {
    pub eps: Vec<f64>,
    #[serde(default = "default_window")]
    pub slope_window: [f64; 2],
    /// Sub-runs stopping earlier count as non-uniform stopping times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
}

fn default_window() -> [f64; 2] {
    [0.7, 1.3]
}

#[derive(Deserialize)]
struct DomainFile {
    schema_version: u32,
    name: String,
    domain: DomainConfig,
}

/// Reads only the `name` and `[domain]` of a scenario file; other tables are
/// ignored, so validation configs need no patches.
pub fn load_domain(path: impl AsRef<Path>) -> Result<(String, DomainConfig)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let f: DomainFile = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    if f.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            f.schema_version
        )));
    }
    Ok((f.name, f.domain))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub domain: DomainConfig,
    pub physics: Physics,
    pub numerics: Numerics,
    #[serde(default)]
    pub patches: Vec<PatchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeConfig>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.check()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Standard two-patch unit-disk scenario.
    pub fn standard(eps: f64) -> Self {
        let patch = |x: f64| PatchConfig {
            center: Vec2::new(x, 0.0),
            strength: 1.0,
            profile: Profile::UniformDisc,
            offset: Vec2::new(0.0, 0.5),
        };
        Scenario {
            schema_version: SCHEMA_VERSION,
            name: "standard-two-patch".into(),
            domain: DomainConfig::unit_disk(),
            physics: Physics { delta: 0.5, eps, circulations: vec![] },
            numerics: Numerics {
                h_over_eps: default_h_over_eps(),
                blob_over_h: default_blob_over_h(),
                t_end: 0.5,
                dt: None,
                frames_every: default_frames_every(),
                max_eps_over_delta: default_max_ratio(),
                max_core_rotation: default_rotation(),
            },
            patches: vec![patch(-0.375), patch(0.375)],
            converge: Some(ConvergeConfig { eps: vec![0.05, 0.025, 0.0125], slope_window: default_window(), t_min: None }),
        }
    }

    /// Structural checks that need no geometry.
    pub fn check(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let (p, n) = (&self.physics, &self.numerics);
        if !(p.delta > 0.0 && p.eps > 0.0) {
            return Err(Error::Config("δ and ε must be positive".into()));
        }
        if p.eps > n.max_eps_over_delta * p.delta * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "ε = {} exceeds {}·δ = {}",
                p.eps,
                n.max_eps_over_delta,
                n.max_eps_over_delta * p.delta
            )));
        }
        if !(n.t_end > 0.0 && n.h_over_eps > 0.0 && n.blob_over_h > 0.0 && n.max_core_rotation > 0.0) {
            return Err(Error::Config("t_end, h_over_eps, blob_over_h and max_core_rotation must be positive".into()));
        }
        if n.dt.is_some_and(|dt| !(dt > 0.0)) {
            return Err(Error::Config("dt must be positive".into()));
        }
        if n.frames_every == 0 {
            return Err(Error::Config("frames_every must be at least 1".into()));
        }
        if self.patches.is_empty() {
            return Err(Error::Config("at least one patch is required".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.numerics.h_over_eps * self.physics.eps
    }

    pub fn blob(&self) -> f64 {
        self.numerics.blob_over_h * self.h()
    }

    pub fn patch_specs(&self) -> Vec<PatchSpec> {
        self.patches
            .iter()
            .map(|c| PatchSpec {
                center: c.center,
                strength: c.strength,
                profile: c.profile.clone(),
                eps: self.physics.eps,
                h: self.h(),
                offset: c.offset,
            })
            .collect()
    }

    /// Copy with a new `ε`; `h` and the blob radius follow through their ratios.
    pub fn with_eps(&self, eps: f64) -> Self {
        let mut s = self.clone();
        s.physics.eps = eps;
        s
    }

    /// SHA-256 of the canonical JSON form, as lowercase hex.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
