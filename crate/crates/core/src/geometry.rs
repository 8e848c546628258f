//! Domain geometry: an exterior contour and zero or more hole contours, each a
//! smooth closed curve given by a truncated Fourier series.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Vec2;

/// Minimum number of quadrature nodes accepted for a domain boundary.
pub const MIN_QUAD: usize = 16;

/// Points closer than this to a boundary node are treated as outside.
const ON_BOUNDARY_TOL: f64 = 1e-12;

/// `s ↦ (Σ xc_k cos ks + xs_k sin ks, Σ yc_k cos ks + ys_k sin ks)`, `s ∈ [0, 2π)`.
///
/// Index 0 of the cosine arrays is the constant term; index 0 of the sine
/// arrays is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FourierCurve {
    #[serde(default)]
    pub x_cos: Vec<f64>,
    #[serde(default)]
    pub x_sin: Vec<f64>,
    #[serde(default)]
    pub y_cos: Vec<f64>,
    #[serde(default)]
    pub y_sin: Vec<f64>,
}

impl FourierCurve {
    pub fn circle(center: Vec2, radius: f64) -> Self {
        FourierCurve {
            x_cos: vec![center.x, radius],
            x_sin: vec![0.0, 0.0],
            y_cos: vec![center.y, 0.0],
            y_sin: vec![0.0, radius],
        }
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Self {
        FourierCurve {
            x_cos: vec![center.x, a],
            x_sin: vec![0.0, 0.0],
            y_cos: vec![center.y, 0.0],
            y_sin: vec![0.0, b],
        }
    }

    /// Evaluates the `order`-th derivative (0, 1 or 2) at `s`.
    fn eval_series(cos: &[f64], sin: &[f64], s: f64, order: u32) -> f64 {
        let n = cos.len().max(sin.len());
        let mut acc = 0.0;
        for k in 0..n {
            let kf = k as f64;
            let (sk, ck) = (kf * s).sin_cos();
            let a = cos.get(k).copied().unwrap_or(0.0);
            let b = if k == 0 { 0.0 } else { sin.get(k).copied().unwrap_or(0.0) };
            acc += match order {
                0 => a * ck + b * sk,
                1 => kf * (-a * sk + b * ck),
                _ => -kf * kf * (a * ck + b * sk),
            };
        }
        acc
    }

    pub fn point(&self, s: f64) -> Vec2 {
        Vec2::new(
            Self::eval_series(&self.x_cos, &self.x_sin, s, 0),
            Self::eval_series(&self.y_cos, &self.y_sin, s, 0),
        )
    }

    pub fn derivative(&self, s: f64) -> Vec2 {
        Vec2::new(
            Self::eval_series(&self.x_cos, &self.x_sin, s, 1),
            Self::eval_series(&self.y_cos, &self.y_sin, s, 1),
        )
    }

    pub fn second_derivative(&self, s: f64) -> Vec2 {
        Vec2::new(
            Self::eval_series(&self.x_cos, &self.x_sin, s, 2),
            Self::eval_series(&self.y_cos, &self.y_sin, s, 2),
        )
    }

    /// Same curve traversed in the opposite direction (`s ↦ -s`).
    fn reversed(&self) -> Self {
        let neg = |v: &[f64]| v.iter().map(|c| -c).collect();
        FourierCurve {
            x_cos: self.x_cos.clone(),
            x_sin: neg(&self.x_sin),
            y_cos: self.y_cos.clone(),
            y_sin: neg(&self.y_sin),
        }
    }
}

/// Whether a curve is the exterior contour or bounds a hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveRole {
    Outer,
    Hole,
}

/// One trapezoidal quadrature node on a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub s: f64,
    pub point: Vec2,
    /// Unit tangent, counterclockwise.
    pub tangent: Vec2,
    /// Unit normal pointing out of the fluid domain.
    pub normal: Vec2,
    pub weight: f64,
    /// `γ'(s)` and `γ''(s)`, kept for boundary-integral diagonal terms.
    pub d1: Vec2,
    pub d2: Vec2,
}

#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    curve: FourierCurve,
    role: CurveRole,
    n_quad: usize,
    flipped: bool,
    nodes: Vec<QuadNode>,
    length: f64,
}

impl BoundaryCurve {
    /// Builds the curve, orienting it counterclockwise and checking that the
    /// speed never vanishes and that the node polygon is simple.
    pub fn new(curve: FourierCurve, role: CurveRole, n_quad: usize) -> Result<Self> {
        if n_quad < 3 {
            return Err(Error::Geometry(format!("n_quad = {n_quad} is too small")));
        }
        let probe = nodes_for(&curve, role, n_quad);
        if probe.iter().any(|n| !(n.d1.norm() > 0.0) || !n.point.is_finite()) {
            return Err(Error::Geometry("curve speed vanishes at a quadrature node".into()));
        }
        let area = signed_area(&probe);
        if area == 0.0 {
            return Err(Error::Geometry("curve encloses no area".into()));
        }
        let (curve, flipped) = if area < 0.0 { (curve.reversed(), true) } else { (curve, false) };
        let nodes = nodes_for(&curve, role, n_quad);
        if !polygon_is_simple(&nodes) {
            return Err(Error::Geometry("curve self-intersects at quadrature resolution".into()));
        }
        let length = nodes.iter().map(|n| n.weight).sum();
        Ok(BoundaryCurve { curve, role, n_quad, flipped, nodes, length })
    }

    pub fn curve(&self) -> &FourierCurve {
        &self.curve
    }

    pub fn role(&self) -> CurveRole {
        self.role
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    /// True when the supplied parameterization was clockwise and got reversed.
    pub fn was_reoriented(&self) -> bool {
        self.flipped
    }

    pub fn is_counterclockwise(&self) -> bool {
        true
    }

    /// Trapezoidal length of the curve at its quadrature resolution.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn quadrature_nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    /// Nodes at a different resolution (for convergence studies).
    pub fn nodes_at(&self, n: usize) -> Vec<QuadNode> {
        nodes_for(&self.curve, self.role, n)
    }

    /// Same curve with a different node count.
    pub fn with_n_quad(&self, n_quad: usize) -> Result<Self> {
        BoundaryCurve::new(self.curve.clone(), self.role, n_quad)
    }

    /// True when `x` is inside the region the node polygon encloses.
    pub fn encloses(&self, x: Vec2) -> bool {
        self.winding_contains(x)
    }

    fn winding_contains(&self, x: Vec2) -> bool {
        winding_number(&self.nodes, x) != 0
    }

    fn polyline_distance(&self, x: Vec2) -> f64 {
        let n = self.nodes.len();
        (0..n)
            .map(|k| segment_distance(x, self.nodes[k].point, self.nodes[(k + 1) % n].point))
            .fold(f64::INFINITY, f64::min)
    }

    fn near_node(&self, x: Vec2) -> bool {
        self.nodes.iter().any(|n| (n.point - x).norm() <= ON_BOUNDARY_TOL)
    }
}

fn nodes_for(curve: &FourierCurve, role: CurveRole, n: usize) -> Vec<QuadNode> {
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            let s = h * k as f64;
            let d1 = curve.derivative(s);
            let speed = d1.norm();
            let tangent = d1 / speed;
            // Outer: fluid on the left of a ccw tangent, so outward is to the right.
            // Holes: fluid outside the hole, out of the fluid means into the hole (left).
            let normal = match role {
                CurveRole::Outer => Vec2::new(tangent.y, -tangent.x),
                CurveRole::Hole => tangent.perp(),
            };
            QuadNode {
                s,
                point: curve.point(s),
                tangent,
                normal,
                weight: speed * h,
                d1,
                d2: curve.second_derivative(s),
            }
        })
        .collect()
}

fn signed_area(nodes: &[QuadNode]) -> f64 {
    let n = nodes.len();
    0.5 * (0..n).map(|k| nodes[k].point.cross(nodes[(k + 1) % n].point)).sum::<f64>()
}

fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn polygon_is_simple(nodes: &[QuadNode]) -> bool {
    let n = nodes.len();
    let p = |k: usize| nodes[k % n].point;
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(p(i), p(i + 1), p(j), p(j + 1)) {
                return false;
            }
        }
    }
    true
}

fn polygons_cross(a: &[QuadNode], b: &[QuadNode]) -> bool {
    let (na, nb) = (a.len(), b.len());
    (0..na).any(|i| {
        (0..nb).any(|j| {
            segments_cross(a[i].point, a[(i + 1) % na].point, b[j].point, b[(j + 1) % nb].point)
        })
    })
}

fn winding_number(nodes: &[QuadNode], x: Vec2) -> i32 {
    let n = nodes.len();
    let mut w = 0;
    for k in 0..n {
        let a = nodes[k].point;
        let b = nodes[(k + 1) % n].point;
        if a.y <= x.y {
            if b.y > x.y && (b - a).cross(x - a) > 0.0 {
                w += 1;
            }
        } else if b.y <= x.y && (b - a).cross(x - a) < 0.0 {
            w -= 1;
        }
    }
    w
}

fn segment_distance(x: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((x - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

/// How interior Laplace problems are solved on a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "kebab-case")]
pub enum Backend {
    /// Disk with exact method-of-images formulas.
    AnalyticDisk { center: Vec2, radius: f64 },
    /// Concentric annulus `inner < |x - center| < outer` with radial/Fourier solutions.
    AnalyticAnnulus { center: Vec2, inner: f64, outer: f64 },
    /// Nyström double-layer solver on the Fourier curves.
    BoundaryIntegral,
}

#[derive(Debug, Clone)]
pub struct Domain {
    outer: BoundaryCurve,
    holes: Vec<BoundaryCurve>,
    backend: Backend,
}

impl Domain {
    /// General domain solved by the boundary-integral backend.
    pub fn new(outer: BoundaryCurve, holes: Vec<BoundaryCurve>) -> Result<Self> {
        Self::with_backend(outer, holes, Backend::BoundaryIntegral)
    }

    fn with_backend(outer: BoundaryCurve, holes: Vec<BoundaryCurve>, backend: Backend) -> Result<Self> {
        if outer.role() != CurveRole::Outer || holes.iter().any(|h| h.role() != CurveRole::Hole) {
            return Err(Error::Geometry("curve roles do not match their position".into()));
        }
        if outer.n_quad() < MIN_QUAD || holes.iter().any(|h| h.n_quad() < MIN_QUAD) {
            return Err(Error::Geometry(format!("n_quad must be at least {MIN_QUAD}")));
        }
        for (m, hole) in holes.iter().enumerate() {
            if hole.quadrature_nodes().iter().any(|n| !outer.winding_contains(n.point)) {
                return Err(Error::Geometry(format!("hole {} is not inside the outer contour", m + 1)));
            }
            if polygons_cross(outer.quadrature_nodes(), hole.quadrature_nodes()) {
                return Err(Error::Geometry(format!("hole {} touches the outer contour", m + 1)));
            }
            for (l, other) in holes.iter().enumerate().skip(m + 1) {
                let nested = hole.quadrature_nodes().iter().any(|n| other.winding_contains(n.point))
                    || other.quadrature_nodes().iter().any(|n| hole.winding_contains(n.point));
                if nested || polygons_cross(hole.quadrature_nodes(), other.quadrature_nodes()) {
                    return Err(Error::Geometry(format!("holes {} and {} overlap", m + 1, l + 1)));
                }
            }
        }
        Ok(Domain { outer, holes, backend })
    }

    pub fn unit_disk(n_quad: usize) -> Result<Self> {
        Self::disk(Vec2::ZERO, 1.0, n_quad)
    }

    pub fn disk(center: Vec2, radius: f64, n_quad: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Geometry("disk radius must be positive".into()));
        }
        let outer = BoundaryCurve::new(FourierCurve::circle(center, radius), CurveRole::Outer, n_quad)?;
        Self::with_backend(outer, vec![], Backend::AnalyticDisk { center, radius })
    }

    pub fn annulus(center: Vec2, inner: f64, outer: f64, n_quad: usize) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::Geometry("annulus needs 0 < inner < outer".into()));
        }
        let o = BoundaryCurve::new(FourierCurve::circle(center, outer), CurveRole::Outer, n_quad)?;
        let h = BoundaryCurve::new(FourierCurve::circle(center, inner), CurveRole::Hole, n_quad)?;
        Self::with_backend(o, vec![h], Backend::AnalyticAnnulus { center, inner, outer })
    }

    /// Same curves, solved with the boundary-integral backend.
    pub fn to_boundary_integral(&self) -> Self {
        Domain { outer: self.outer.clone(), holes: self.holes.clone(), backend: Backend::BoundaryIntegral }
    }

    /// Same domain with every curve resampled at `n_quad` nodes.
    pub fn with_n_quad(&self, n_quad: usize) -> Result<Self> {
        let outer = self.outer.with_n_quad(n_quad)?;
        let holes = self.holes.iter().map(|h| h.with_n_quad(n_quad)).collect::<Result<_>>()?;
        Self::with_backend(outer, holes, self.backend.clone())
    }

    pub fn outer(&self) -> &BoundaryCurve {
        &self.outer
    }

    pub fn holes(&self) -> &[BoundaryCurve] {
        &self.holes
    }

    pub fn n_holes(&self) -> usize {
        self.holes.len()
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// Boundary components in order `Γ₀, Γ₁, …, Γ_M`.
    pub fn curves(&self) -> impl Iterator<Item = &BoundaryCurve> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    /// Largest per-component clearance `5·L_c/n_c` required by quadrature-based evaluators.
    pub fn evaluation_clearance(&self) -> f64 {
        self.curves().map(|c| 5.0 * c.length() / c.n_quad() as f64).fold(0.0, f64::max)
    }

    /// `Some((distance, required))` when `x` is within `5·L_c/n_c` of some
    /// boundary component `c`.
    pub fn clearance_violation(&self, x: Vec2) -> Option<(f64, f64)> {
        self.curves().enumerate().find_map(|(k, c)| {
            let required = 5.0 * c.length() / c.n_quad() as f64;
            let d = match self.backend {
                Backend::AnalyticDisk { center, radius } => radius - (x - center).norm(),
                Backend::AnalyticAnnulus { center, inner, outer } => {
                    let r = (x - center).norm();
                    if k == 0 {
                        outer - r
                    } else {
                        r - inner
                    }
                }
                Backend::BoundaryIntegral => c.polyline_distance(x),
            };
            (d <= required).then_some((d, required))
        })
    }

    /// True iff `x` lies in the open fluid region.
    pub fn contains(&self, x: Vec2) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self.backend {
            Backend::AnalyticDisk { center, radius } => (x - center).norm() < radius - ON_BOUNDARY_TOL,
            Backend::AnalyticAnnulus { center, inner, outer } => {
                let r = (x - center).norm();
                r > inner + ON_BOUNDARY_TOL && r < outer - ON_BOUNDARY_TOL
            }
            Backend::BoundaryIntegral => {
                self.outer.winding_contains(x)
                    && !self.holes.iter().any(|h| h.winding_contains(x))
                    && !self.curves().any(|c| c.near_node(x))
            }
        }
    }

    /// Distance from an interior point to `∂Ω`; exact for analytic backends,
    /// node-polyline distance for the boundary-integral backend.
    pub fn boundary_distance(&self, x: Vec2) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain(x));
        }
        Ok(self.boundary_distance_unchecked(x))
    }

    pub(crate) fn boundary_distance_unchecked(&self, x: Vec2) -> f64 {
        match self.backend {
            Backend::AnalyticDisk { center, radius } => radius - (x - center).norm(),
            Backend::AnalyticAnnulus { center, inner, outer } => {
                let r = (x - center).norm();
                (r - inner).min(outer - r)
            }
            Backend::BoundaryIntegral => self.curves().map(|c| c.polyline_distance(x)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Index (0 = outer) of the boundary component nearest to `x`.
    pub fn nearest_component(&self, x: Vec2) -> usize {
        self.curves()
            .enumerate()
            .map(|(k, c)| (k, c.polyline_distance(x)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
            .0
    }
}
