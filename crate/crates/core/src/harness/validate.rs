//! Oracle checks of the kernel and Laplace solvers on a configured domain,
//! reported as machine-readable pass/fail entries.

use std::f64::consts::PI;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{Backend, Domain, FourierCurve};
use crate::harmonic::{HarmonicEvaluator, Harmonics};
use crate::kernels::{biot_savart_kernel, newtonian_potential, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Observed error (or `NaN` when the check could not be evaluated).
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value < tolerance, detail: None }
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> Self {
        Check { name: name.into(), value: f64::NAN, tolerance, pass: false, detail: Some(detail) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub backend: Backend,
    pub n_quad: usize,
    pub n_points: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub runtime_s: f64,
}

/// `Some((center, radius))` if the curve is a circle.
pub fn circle_params(c: &FourierCurve) -> Option<(Vec2, f64)> {
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    let r = at(&c.x_cos, 1);
    let extra = |v: &[f64], from: usize| v.iter().skip(from).any(|&x| x != 0.0);
    let circle = r > 0.0
        && at(&c.y_sin, 1).abs() == r
        && at(&c.x_sin, 1) == 0.0
        && at(&c.y_cos, 1) == 0.0
        && !extra(&c.x_cos, 2)
        && !extra(&c.x_sin, 2)
        && !extra(&c.y_cos, 2)
        && !extra(&c.y_sin, 2);
    circle.then(|| (Vec2::new(at(&c.x_cos, 0), at(&c.y_cos, 0)), r))
}

/// Deterministic interior points respecting the quadrature clearance.
pub fn sample_points(domain: &Domain, target: usize) -> Vec<Vec2> {
    let nodes = domain.outer().quadrature_nodes();
    let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for q in nodes {
        lo = Vec2::new(lo.x.min(q.point.x), lo.y.min(q.point.y));
        hi = Vec2::new(hi.x.max(q.point.x), hi.y.max(q.point.y));
    }
    let mut out = Vec::new();
    // Low-discrepancy (golden-ratio) sequence over the bounding box.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut u, mut v) = (0.5f64, 0.5f64);
    for _ in 0..(200 * target) {
        u = (u + g).fract();
        v = (v + g * g).fract();
        let x = Vec2::new(lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y));
        if domain.contains(x) && domain.clearance_violation(x).is_none() {
            out.push(x);
            if out.len() == target {
                break;
            }
        }
    }
    out
}

fn max_error(points: &[Vec2], f: impl Fn(Vec2) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in points {
        worst = worst.max(f(x)?);
    }
    Ok(worst)
}

fn evaluate(name: &str, tol: f64, points: &[Vec2], f: impl Fn(Vec2) -> Result<f64>) -> Check {
    if points.is_empty() {
        return Check::failed(name, tol, "no interior point satisfies the quadrature clearance".into());
    }
    match max_error(points, f) {
        Ok(v) => Check::new(name, v, tol),
        Err(e) => Check::failed(name, tol, e.to_string()),
    }
}

fn kernel_check() -> Check {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for z in [Vec2::new(0.3, -0.2), Vec2::new(-1.5, 0.7), Vec2::new(0.01, 0.02)] {
        let g = |p: Vec2| newtonian_potential(p).unwrap_or(f64::NAN);
        let grad = Vec2::new(
            (g(z + Vec2::new(h, 0.0)) - g(z - Vec2::new(h, 0.0))) / (2.0 * h),
            (g(z + Vec2::new(0.0, h)) - g(z - Vec2::new(0.0, h))) / (2.0 * h),
        );
        let k = biot_savart_kernel(z).unwrap_or(Vec2::new(f64::NAN, f64::NAN));
        worst = worst.max((k + grad.perp()).norm() / k.norm());
    }
    Check::new("kernel-finite-difference", worst, 1e-5)
}

/// Disk Green function regular part `R(x, y)` in closed form.
fn disk_regular(center: Vec2, radius: f64, x: Vec2, y: Vec2) -> f64 {
    let (xs, ys) = ((x - center) / radius, (y - center) / radius);
    let d = xs.norm_sq() * ys.norm_sq() - 2.0 * xs.dot(ys) + 1.0;
    -(radius.ln() + 0.5 * d.ln()) / (2.0 * PI)
}

fn exp_data(x: Vec2) -> f64 {
    x.x.exp() * x.y.cos()
}

fn solve_check(name: &str, tol: f64, points: &[Vec2], ev: Result<HarmonicEvaluator>, exact: impl Fn(Vec2) -> f64) -> Check {
    match ev {
        Ok(ev) => evaluate(name, tol, points, |x| Ok((ev.value(x)? - exact(x)).abs())),
        Err(e) => Check::failed(name, tol, e.to_string()),
    }
}

/// Runs every applicable oracle on the domain.
pub fn validate(domain: &Domain) -> Result<ValidationReport> {
    let started = Instant::now();
    let points = sample_points(domain, 50);
    let mut checks = vec![kernel_check()];
    let harmonics = match Harmonics::new(domain.clone()) {
        Ok(h) => Some(h),
        Err(e) => {
            checks.push(Check::failed("boundary-system", 1e12, e.to_string()));
            None
        }
    };
    if let Some(h) = &harmonics {
        checks.push(solve_check("constant-data", 1e-8, &points, h.solve_dirichlet(|_| 1.0), |_| 1.0));
        checks.push(solve_check("linear-data", 1e-8, &points, h.solve_dirichlet(|x| x.x), |x| x.x));
        checks.push(solve_check("harmonic-exp-data", 1e-6, &points, h.solve_dirichlet(exp_data), exp_data));

        let wave = |x: Vec2| (3.0 * x.y.atan2(x.x)).sin() + 0.5 * x.x * x.y;
        match h.solve_dirichlet(wave) {
            Ok(ev) => {
                let (lo, hi) = ev.data_range();
                let slack = 1e-9 * (hi - lo).max(1.0);
                checks.push(evaluate("maximum-principle", slack, &points, |x| {
                    let v = ev.value(x)?;
                    Ok((lo - v).max(v - hi).max(0.0))
                }));
            }
            Err(e) => checks.push(Check::failed("maximum-principle", 1e-9, e.to_string())),
        }

        match domain.with_n_quad(2 * domain.outer().n_quad()).and_then(Harmonics::new) {
            Ok(fine) => {
                let pair = h.solve_dirichlet(exp_data).and_then(|a| Ok((a, fine.solve_dirichlet(exp_data)?)));
                match pair {
                    Ok((a, b)) => checks.push(evaluate("quadrature-convergence", 1e-8, &points, |x| {
                        Ok((a.value(x)? - b.value(x)?).abs())
                    })),
                    Err(e) => checks.push(Check::failed("quadrature-convergence", 1e-8, e.to_string())),
                }
            }
            Err(e) => checks.push(Check::failed("quadrature-convergence", 1e-8, e.to_string())),
        }

        if domain.n_holes() == 0 {
            if let Some((c, r)) = circle_params(domain.outer().curve()) {
                let sources = [c + Vec2::new(0.3 * r, 0.1 * r), c + Vec2::new(-0.5 * r, -0.4 * r), c];
                let mut worst = 0.0f64;
                let mut failure = None;
                for &y in &sources {
                    if points.is_empty() {
                        break;
                    }
                    let res = h.point_source_extension(&[(y, 1.0)]).and_then(|ev| {
                        max_error(&points, |x| Ok((ev.value(x)? - disk_regular(c, r, x, y)).abs()))
                    });
                    match res {
                        Ok(v) => worst = worst.max(v),
                        Err(e) => failure = Some(e.to_string()),
                    }
                }
                checks.push(match (failure, points.is_empty()) {
                    (Some(e), _) => Check::failed("disk-images-theta", 1e-6, e),
                    (None, true) => Check::failed("disk-images-theta", 1e-6, "no admissible points".into()),
                    (None, false) => Check::new("disk-images-theta", worst, 1e-6),
                });
            }
        }
        if domain.n_holes() == 1 {
            let outer = circle_params(domain.outer().curve());
            let inner = circle_params(domain.holes()[0].curve());
            if let (Some((c0, r0)), Some((c1, r1))) = (outer, inner) {
                if c0 == c1 {
                    let exact = |x: Vec2| ((x - c0).norm() / r0).ln() / (r1 / r0).ln();
                    let ev = h.harmonic_measure(1).cloned();
                    checks.push(solve_check("annulus-harmonic-measure", 1e-6, &points, ev, exact));
                }
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(ValidationReport {
        backend: domain.backend().clone(),
        n_quad: domain.outer().n_quad(),
        n_points: points.len(),
        checks,
        pass,
        runtime_s: started.elapsed().as_secs_f64(),
    })
}
