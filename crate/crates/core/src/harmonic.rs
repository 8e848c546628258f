//! Interior Dirichlet problems on the fluid domain.
//!
//! Three representations share one evaluator type:
//! - disk domains use the method of images for point-source data and a
//!   Poisson (Fourier) series for general data;
//! - concentric annuli use the separable `log r`, `r^{±k}` series;
//! - general smooth domains use a double-layer potential discretized by the
//!   trapezoidal Nyström method, completed by one logarithmic source inside
//!   every hole (with zero-mean density constraints on the holes) so the
//!   system stays uniquely solvable when the domain is multiply connected.
//!
//! From these the module builds the harmonic measures `w_m` and the hole
//! fields `ξ_m`. The circulation of `∇^⊥u` around a hole equals `2π` times
//! the coefficient of that hole's logarithmic term (the double layer carries
//! no flux), which gives `ξ_m` without any boundary differentiation.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::{Backend, Domain, QuadNode};
use crate::kernels::{newtonian_potential, Vec2};

const INV_2PI: f64 = 0.5 / PI;
const MAX_CONDITION: f64 = 1e12;

pub(crate) mod series {
    //! Trigonometric interpolation of samples at equispaced angles.
    use super::*;

    /// Returns `(a, b)` with `f(φ) ≈ a₀ + Σ_{k≥1} a_k cos kφ + b_k sin kφ`.
    pub fn fit(samples: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let kmax = n / 2;
        let mut a = vec![0.0; kmax + 1];
        let mut b = vec![0.0; kmax + 1];
        let inv = 1.0 / n as f64;
        a[0] = buf[0].re * inv;
        for k in 1..=kmax {
            let c = buf[k] * inv;
            if 2 * k == n {
                a[k] = c.re;
            } else {
                a[k] = 2.0 * c.re;
                b[k] = -2.0 * c.im;
            }
        }
        (a, b)
    }
}

/// Dense Nyström system for a boundary-integral domain, factored once.
#[derive(Debug)]
pub(crate) struct NystromSystem {
    nodes: Vec<QuadNode>,
    /// `(start, len)` of each component's nodes.
    spans: Vec<(usize, usize)>,
    hole_points: Vec<Vec2>,
    matrix: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl NystromSystem {
    fn build(domain: &Domain) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut component = Vec::new();
        let mut spans = Vec::new();
        for (c, curve) in domain.curves().enumerate() {
            spans.push((nodes.len(), curve.quadrature_nodes().len()));
            for n in curve.quadrature_nodes() {
                nodes.push(*n);
                component.push(c);
            }
        }
        let mut hole_points = Vec::new();
        for (m, hole) in domain.holes().iter().enumerate() {
            let pts = hole.quadrature_nodes();
            let z = pts.iter().map(|n| n.point).sum::<Vec2>() / pts.len() as f64;
            if !hole.encloses(z) {
                return Err(Error::Geometry(format!(
                    "centroid of hole {} is not inside the hole; non-star-shaped holes are unsupported",
                    m + 1
                )));
            }
            hole_points.push(z);
        }
        let n = nodes.len();
        let m = hole_points.len();
        let dim = n + m;
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..n {
            let x = nodes[i].point;
            for j in 0..n {
                let y = &nodes[j];
                let k = if i == j {
                    y.normal.dot(y.d2) / (2.0 * y.d1.norm_sq()) * INV_2PI
                } else {
                    let r = x - y.point;
                    INV_2PI * y.normal.dot(r) / r.norm_sq()
                };
                a[(i, j)] = k * y.weight;
            }
            a[(i, i)] -= 0.5;
            for (l, z) in hole_points.iter().enumerate() {
                a[(i, n + l)] = (x - *z).norm().ln();
            }
        }
        for l in 0..m {
            let (start, len) = spans[l + 1];
            let length: f64 = nodes[start..start + len].iter().map(|q| q.weight).sum();
            for j in start..start + len {
                a[(n + l, j)] = nodes[j].weight / length;
            }
        }
        let lu = a.clone().lu();
        let lu_t = a.transpose().lu();
        let condition = estimate_condition(&a, &lu, &lu_t);
        if !(condition <= MAX_CONDITION) {
            let u = lu.u();
            let worst = (0..dim)
                .min_by(|&p, &q| u[(p, p)].abs().total_cmp(&u[(q, q)].abs()))
                .unwrap_or(0);
            let curve = if worst < n {
                format!("boundary component Γ{}", component[worst])
            } else {
                format!("source of hole {}", worst - n + 1)
            };
            return Err(Error::SingularSystem { curve, condition });
        }
        Ok(NystromSystem {
            nodes,
            spans,
            hole_points,
            matrix: a,
            lu,
            condition,
        })
    }

    fn solve(&self, data: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.nodes.len();
        let mut rhs = DVector::<f64>::zeros(n + self.hole_points.len());
        rhs.rows_mut(0, n).copy_from_slice(data);
        let sol = self.lu.solve(&rhs).expect("factorization checked at build time");
        let weighted = (0..n).map(|j| sol[j] * self.nodes[j].weight).collect();
        let logs = sol.rows(n, self.hole_points.len()).iter().copied().collect();
        (weighted, logs)
    }

    fn value(&self, weighted: &[f64], logs: &[f64], x: Vec2) -> f64 {
        let mut acc = 0.0;
        for (q, &s) in self.nodes.iter().zip(weighted) {
            let r = x - q.point;
            acc += s * q.normal.dot(r) / r.norm_sq();
        }
        acc *= INV_2PI;
        for (z, &c) in self.hole_points.iter().zip(logs) {
            acc += c * (x - *z).norm().ln();
        }
        acc
    }

    fn gradient(&self, weighted: &[f64], logs: &[f64], x: Vec2) -> Vec2 {
        let mut g = Vec2::ZERO;
        for (q, &s) in self.nodes.iter().zip(weighted) {
            let r = x - q.point;
            let r2 = r.norm_sq();
            let nr = q.normal.dot(r);
            g += (q.normal - r * (2.0 * nr / r2)) * (s / r2);
        }
        g = g * INV_2PI;
        for (z, &c) in self.hole_points.iter().zip(logs) {
            let r = x - *z;
            g += r * (c / r.norm_sq());
        }
        g
    }
}

/// Hager's estimate of `‖A‖₁ ‖A⁻¹‖₁`.
fn estimate_condition(
    a: &DMatrix<f64>,
    lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_t: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
) -> f64 {
    let n = a.nrows();
    let norm_a = (0..n).map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let Some(y) = lu.solve(&x) else { return f64::INFINITY };
        est = y.iter().map(|v| v.abs()).sum::<f64>();
        let sign = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let Some(z) = lu_t.solve(&sign) else { return f64::INFINITY };
        let (jmax, zmax) = z.iter().enumerate().fold((0, 0.0), |b, (j, v)| if v.abs() > b.1 { (j, v.abs()) } else { b });
        if zmax <= z.dot(&x) {
            break;
        }
        x.fill(0.0);
        x[jmax] = 1.0;
    }
    if est.is_finite() { norm_a * est } else { f64::INFINITY }
}

#[derive(Debug, Clone)]
enum Repr {
    /// `constant + Σ q_j R(x, y_j)` with `R` the regular part of the disk Green function.
    Images { center: Vec2, radius: f64, sources: Vec<(Vec2, f64)> },
    /// `Σ (r/R)^k (a_k cos kφ + b_k sin kφ)`.
    DiskSeries { center: Vec2, radius: f64, a: Vec<f64>, b: Vec<f64> },
    /// `A + B log(r/r₁) + Σ [α (r/r₁)^k + β (r₀/r)^k] (cos, sin)`.
    AnnulusSeries {
        center: Vec2,
        inner: f64,
        outer: f64,
        mean: f64,
        log: f64,
        /// Per mode `k ≥ 1`: `[α_cos, β_cos, α_sin, β_sin]`.
        modes: Vec<[f64; 4]>,
    },
    Nystrom { system: Arc<NystromSystem>, weighted: Vec<f64>, logs: Vec<f64> },
}

/// A solved Laplace problem on the domain; immutable and thread-safe.
#[derive(Debug, Clone)]
pub struct HarmonicEvaluator {
    domain: Arc<Domain>,
    repr: Repr,
    data_range: (f64, f64),
}

impl HarmonicEvaluator {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `(min, max)` of the prescribed boundary data at the quadrature nodes.
    pub fn data_range(&self) -> (f64, f64) {
        self.data_range
    }

    fn check(&self, x: Vec2) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain(x));
        }
        if let Repr::Nystrom { .. } = &self.repr {
            if let Some((distance, required)) = self.domain.clearance_violation(x) {
                return Err(Error::Clearance { distance, required });
            }
        }
        Ok(())
    }

    pub fn value(&self, x: Vec2) -> Result<f64> {
        self.check(x)?;
        Ok(self.value_unchecked(x))
    }

    pub fn gradient(&self, x: Vec2) -> Result<Vec2> {
        self.check(x)?;
        Ok(self.gradient_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: Vec2) -> f64 {
        match &self.repr {
            Repr::Images { center, radius, sources } => {
                let xs = (x - *center) / *radius;
                let mut acc = 0.0;
                for &(y, q) in sources {
                    let ys = (y - *center) / *radius;
                    let d = xs.norm_sq() * ys.norm_sq() - 2.0 * xs.dot(ys) + 1.0;
                    acc += q * (radius.ln() + 0.5 * d.ln());
                }
                -INV_2PI * acc
            }
            Repr::DiskSeries { center, radius, a, b } => {
                let z = (x - *center) / *radius;
                let w = Complex64::new(z.x, z.y);
                let mut p = Complex64::new(1.0, 0.0);
                let mut acc = a[0];
                for k in 1..a.len() {
                    p *= w;
                    acc += a[k] * p.re + b[k] * p.im;
                }
                acc
            }
            Repr::AnnulusSeries { center, inner, outer, mean, log, modes } => {
                let z = x - *center;
                let r = z.norm();
                let e = Complex64::new(z.x / r, z.y / r);
                let (up, down) = (r / outer, inner / r);
                let mut acc = mean + log * up.ln();
                let (mut pu, mut pd, mut ek) = (1.0, 1.0, Complex64::new(1.0, 0.0));
                for m in modes {
                    pu *= up;
                    pd *= down;
                    ek *= e;
                    acc += (m[0] * pu + m[1] * pd) * ek.re + (m[2] * pu + m[3] * pd) * ek.im;
                }
                acc
            }
            Repr::Nystrom { system, weighted, logs } => system.value(weighted, logs, x),
        }
    }

    pub(crate) fn gradient_unchecked(&self, x: Vec2) -> Vec2 {
        match &self.repr {
            Repr::Images { center, radius, sources } => {
                let xs = (x - *center) / *radius;
                let x2 = xs.norm_sq();
                let mut g = Vec2::ZERO;
                for &(y, q) in sources {
                    let ys = (y - *center) / *radius;
                    let y2 = ys.norm_sq();
                    let d = x2 * y2 - 2.0 * xs.dot(ys) + 1.0;
                    g += (xs * y2 - ys) * (q / d);
                }
                g * (-INV_2PI / radius)
            }
            Repr::DiskSeries { center, radius, a, b } => {
                // Re/Im of z^k have gradients k·(Re, -Im)(z^{k-1}) and k·(Im, Re)(z^{k-1}).
                let z = (x - *center) / *radius;
                let w = Complex64::new(z.x, z.y);
                let mut p = Complex64::new(1.0, 0.0);
                let mut g = Vec2::ZERO;
                for k in 1..a.len() {
                    let kf = k as f64;
                    g += Vec2::new(p.re, -p.im) * (kf * a[k]) + Vec2::new(p.im, p.re) * (kf * b[k]);
                    p *= w;
                }
                g / *radius
            }
            Repr::AnnulusSeries { center, inner, outer, log, modes, .. } => {
                let z = x - *center;
                let r = z.norm();
                let er = z / r;
                let ephi = er.perp();
                let e = Complex64::new(er.x, er.y);
                let (up, down) = (r / outer, inner / r);
                let mut dr = log / r;
                let mut dphi = 0.0;
                let (mut pu, mut pd, mut ek) = (1.0, 1.0, Complex64::new(1.0, 0.0));
                for (idx, m) in modes.iter().enumerate() {
                    let k = (idx + 1) as f64;
                    pu *= up;
                    pd *= down;
                    ek *= e;
                    let rc = k / r * (m[0] * pu - m[1] * pd);
                    let rs = k / r * (m[2] * pu - m[3] * pd);
                    dr += rc * ek.re + rs * ek.im;
                    dphi += k / r * (-(m[0] * pu + m[1] * pd) * ek.im + (m[2] * pu + m[3] * pd) * ek.re);
                }
                er * dr + ephi * dphi
            }
            Repr::Nystrom { system, weighted, logs } => system.gradient(weighted, logs, x),
        }
    }

    /// Circulation of `∇^⊥u` around each hole, counterclockwise; equivalently
    /// the outward flux of `∇u` through the hole boundary.
    pub fn hole_circulations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Images { .. } | Repr::DiskSeries { .. } => vec![],
            Repr::AnnulusSeries { log, .. } => vec![2.0 * PI * log],
            Repr::Nystrom { logs, .. } => logs.iter().map(|c| 2.0 * PI * c).collect(),
        }
    }

    /// One-sided boundary values at every quadrature node, per component,
    /// reproducing the prescribed data up to the discretization residual.
    pub fn boundary_trace(&self) -> Vec<Vec<f64>> {
        match &self.repr {
            Repr::Nystrom { system, weighted, logs } => {
                let n = system.nodes.len();
                let mut sol = DVector::<f64>::zeros(n + logs.len());
                for j in 0..n {
                    sol[j] = weighted[j] / system.nodes[j].weight;
                }
                for (l, c) in logs.iter().enumerate() {
                    sol[n + l] = *c;
                }
                let full = &system.matrix * sol;
                system.spans.iter().map(|&(s, len)| (s..s + len).map(|i| full[i]).collect()).collect()
            }
            _ => self
                .domain
                .curves()
                .map(|c| c.quadrature_nodes().iter().map(|q| self.value_unchecked(q.point)).collect())
                .collect(),
        }
    }
}

/// Divergence- and curl-free field tangent to `∂Ω` with unit circulation
/// around hole `m` and none around the others: `ξ = ∇^⊥ Σ_k C_k w_k`, with
/// the stream function gauged to zero on the outer contour.
#[derive(Debug, Clone)]
pub struct HoleField {
    hole: usize,
    stream_constants: Vec<f64>,
    measures: Vec<HarmonicEvaluator>,
}

impl HoleField {
    /// 1-based hole index.
    pub fn hole(&self) -> usize {
        self.hole
    }

    /// Value of the stream function on `Γ₁ … Γ_M` (zero on `Γ₀`).
    pub fn stream_constants(&self) -> &[f64] {
        &self.stream_constants
    }

    pub fn eval(&self, x: Vec2) -> Result<Vec2> {
        let mut g = Vec2::ZERO;
        for (c, w) in self.stream_constants.iter().zip(&self.measures) {
            g += w.gradient(x)? * *c;
        }
        Ok(g.perp())
    }

    pub fn stream_function(&self, x: Vec2) -> Result<f64> {
        let mut v = 0.0;
        for (c, w) in self.stream_constants.iter().zip(&self.measures) {
            v += c * w.value(x)?;
        }
        Ok(v)
    }
}

/// Laplace machinery bound to one domain: the factored Nyström system (when
/// needed), the harmonic measures and the hole fields.
#[derive(Debug, Clone)]
pub struct Harmonics {
    domain: Arc<Domain>,
    system: Option<Arc<NystromSystem>>,
    measures: Vec<HarmonicEvaluator>,
    hole_fields: Vec<HoleField>,
}

impl Harmonics {
    pub fn new(domain: impl Into<Arc<Domain>>) -> Result<Self> {
        let domain = domain.into();
        let system = match domain.backend() {
            Backend::BoundaryIntegral => Some(Arc::new(NystromSystem::build(&domain)?)),
            _ => None,
        };
        let mut h = Harmonics { domain, system, measures: vec![], hole_fields: vec![] };
        let m = h.domain.n_holes();
        h.measures = (1..=m).map(|k| h.build_measure(k)).collect::<Result<_>>()?;
        h.hole_fields = (1..=m).map(|k| h.build_hole_field(k)).collect::<Result<_>>()?;
        Ok(h)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<Domain> {
        &self.domain
    }

    /// Condition estimate of the Nyström matrix (boundary-integral backend only).
    pub fn condition_estimate(&self) -> Option<f64> {
        self.system.as_ref().map(|s| s.condition)
    }

    fn evaluator(&self, repr: Repr, data_range: (f64, f64)) -> HarmonicEvaluator {
        HarmonicEvaluator { domain: self.domain.clone(), repr, data_range }
    }

    fn node_values(&self, g: &dyn Fn(Vec2) -> f64) -> Vec<Vec<f64>> {
        self.domain.curves().map(|c| c.quadrature_nodes().iter().map(|q| g(q.point)).collect()).collect()
    }

    fn from_node_values(&self, values: Vec<Vec<f64>>) -> Result<HarmonicEvaluator> {
        let range = values
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if !(range.0.is_finite() && range.1.is_finite()) {
            return Err(Error::InvalidInput("boundary data is not finite at every node".into()));
        }
        let repr = match self.domain.backend() {
            Backend::AnalyticDisk { center, radius } => {
                let (a, b) = series::fit(&values[0]);
                Repr::DiskSeries { center: *center, radius: *radius, a, b }
            }
            Backend::AnalyticAnnulus { center, inner, outer } => {
                let (ao, bo) = series::fit(&values[0]);
                let (ai, bi) = series::fit(&values[1]);
                let kmax = ao.len().max(ai.len());
                let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
                let ratio = inner / outer;
                let log = (at(&ai, 0) - at(&ao, 0)) / ratio.ln();
                let mut modes = Vec::with_capacity(kmax.saturating_sub(1));
                for k in 1..kmax {
                    let q = ratio.powi(k as i32);
                    let den = 1.0 - q * q;
                    let split = |go: f64, gi: f64| ((go - q * gi) / den, (gi - q * go) / den);
                    let (ac, bc) = split(at(&ao, k), at(&ai, k));
                    let (as_, bs) = split(at(&bo, k), at(&bi, k));
                    modes.push([ac, bc, as_, bs]);
                }
                Repr::AnnulusSeries { center: *center, inner: *inner, outer: *outer, mean: at(&ao, 0), log, modes }
            }
            Backend::BoundaryIntegral => {
                let system = self.system.clone().expect("boundary-integral system built");
                let flat: Vec<f64> = values.into_iter().flatten().collect();
                let (weighted, logs) = system.solve(&flat);
                Repr::Nystrom { system, weighted, logs }
            }
        };
        Ok(self.evaluator(repr, range))
    }

    /// Harmonic function with trace `g` on every boundary component.
    pub fn solve_dirichlet(&self, g: impl Fn(Vec2) -> f64) -> Result<HarmonicEvaluator> {
        self.from_node_values(self.node_values(&g))
    }

    /// Harmonic function equal to `values[c]` on component `c` (0 = outer).
    pub fn solve_piecewise_constant(&self, values: &[f64]) -> Result<HarmonicEvaluator> {
        if values.len() != self.domain.n_holes() + 1 {
            return Err(Error::InvalidInput("one value per boundary component required".into()));
        }
        let data = self
            .domain
            .curves()
            .zip(values)
            .map(|(c, &v)| vec![v; c.quadrature_nodes().len()])
            .collect();
        self.from_node_values(data)
    }

    /// Harmonic extension of `x ↦ Σ q_j G(x - y_j)` from the boundary.
    pub fn point_source_extension(&self, sources: &[(Vec2, f64)]) -> Result<HarmonicEvaluator> {
        let exact_images = matches!(self.domain.backend(), Backend::AnalyticDisk { .. });
        for &(y, _) in sources {
            if !self.domain.contains(y) {
                return Err(Error::OutsideDomain(y));
            }
            if let (false, Some((distance, required))) = (exact_images, self.domain.clearance_violation(y)) {
                return Err(Error::Clearance { distance, required });
            }
        }
        if let Backend::AnalyticDisk { center, radius } = self.domain.backend() {
            let data = self.node_values(&|x| source_sum(sources, x));
            let range = data[0].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let repr = Repr::Images { center: *center, radius: *radius, sources: sources.to_vec() };
            return Ok(self.evaluator(repr, range));
        }
        self.from_node_values(self.node_values(&|x| source_sum(sources, x)))
    }

    /// `w_m`: harmonic, one on `Γ_m`, zero on every other component. `m` is 1-based.
    pub fn harmonic_measure(&self, m: usize) -> Result<&HarmonicEvaluator> {
        self.measures.get(m.wrapping_sub(1)).ok_or(Error::IndexOutOfRange {
            what: "hole",
            index: m,
            len: self.domain.n_holes(),
        })
    }

    pub fn harmonic_measures(&self) -> &[HarmonicEvaluator] {
        &self.measures
    }

    /// `ξ_m` for 1-based hole index `m`.
    pub fn hole_field(&self, m: usize) -> Result<&HoleField> {
        self.hole_fields.get(m.wrapping_sub(1)).ok_or(Error::IndexOutOfRange {
            what: "hole",
            index: m,
            len: self.domain.n_holes(),
        })
    }

    pub fn hole_fields(&self) -> &[HoleField] {
        &self.hole_fields
    }

    fn build_measure(&self, m: usize) -> Result<HarmonicEvaluator> {
        if let Backend::AnalyticAnnulus { center, inner, outer } = self.domain.backend() {
            let log = 1.0 / (inner / outer).ln();
            let repr = Repr::AnnulusSeries { center: *center, inner: *inner, outer: *outer, mean: 0.0, log, modes: vec![] };
            return Ok(self.evaluator(repr, (0.0, 1.0)));
        }
        let mut values = vec![0.0; self.domain.n_holes() + 1];
        values[m] = 1.0;
        self.solve_piecewise_constant(&values)
    }

    fn build_hole_field(&self, m: usize) -> Result<HoleField> {
        let n = self.measures.len();
        // P[l][k]: circulation of ∇^⊥w_k around Γ_l.
        let mut p = DMatrix::<f64>::zeros(n, n);
        for (k, w) in self.measures.iter().enumerate() {
            for (l, c) in w.hole_circulations().into_iter().enumerate() {
                p[(l, k)] = c;
            }
        }
        let mut rhs = DVector::<f64>::zeros(n);
        rhs[m - 1] = 1.0;
        let constants = p
            .lu()
            .solve(&rhs)
            .filter(|c| c.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::SingularSystem { curve: format!("hole {m} circulation system"), condition: f64::INFINITY })?;
        Ok(HoleField { hole: m, stream_constants: constants.iter().copied().collect(), measures: self.measures.clone() })
    }
}

fn source_sum(sources: &[(Vec2, f64)], x: Vec2) -> f64 {
    sources
        .iter()
        .map(|&(y, q)| q * newtonian_potential(x - y).unwrap_or(f64::NAN))
        .sum()
}

/// Harmonic extension of `g` on a freshly prepared domain.
pub fn solve_dirichlet(domain: impl Into<Arc<Domain>>, g: impl Fn(Vec2) -> f64) -> Result<HarmonicEvaluator> {
    Harmonics::new(domain)?.solve_dirichlet(g)
}
