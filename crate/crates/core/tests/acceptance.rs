//! End-to-end acceptance checks. Runs as a plain binary (no libtest harness)
//! so that every check prints exactly one PASS/FAIL line.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use vortexkit::harness::{self, config::ConvergeConfig, io, LeapfrogParams, RunRecord, Scenario};
use vortexkit::kernels::{biot_savart_kernel, newtonian_potential};
use vortexkit::metrics::{w1_signed, SignedMeasure};
use vortexkit::point_vortex::{self, PointVortexState};
use vortexkit::{Domain, Harmonics, Profile, Result, Vec2};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn xorshift(seed: u64) -> impl FnMut() -> f64 {
    let mut s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn disk_points(n: usize, r_max: f64) -> Vec<Vec2> {
    let mut next = xorshift(7);
    (0..n).map(|_| Vec2::from_polar(r_max * next().sqrt(), 2.0 * PI * next())).collect()
}

/// `R(x, y)` for the unit disk from the image construction.
fn disk_regular(x: Vec2, y: Vec2) -> f64 {
    let d = x.norm_sq() * y.norm_sq() - 2.0 * x.dot(y) + 1.0;
    -d.ln() / (4.0 * PI)
}

fn harmonic_oracles() -> Result<Outcome> {
    let started = Instant::now();
    let bi = Domain::unit_disk(256)?.to_boundary_integral();
    let h = Harmonics::new(bi)?;
    // n = 256 requires |x| ≲ 0.87 for the evaluation clearance.
    let pts = disk_points(50, 0.85);
    let sources = [(Vec2::new(0.3, 0.1), 1.0), (Vec2::new(-0.5, -0.4), -0.7), (Vec2::new(0.0, 0.6), 0.4)];
    let eta = h.point_source_extension(&sources)?;
    let mut theta_err = 0.0f64;
    let mut grad_err = 0.0f64;
    for &x in &pts {
        let exact: f64 = sources.iter().map(|&(y, a)| a * disk_regular(x, y)).sum();
        theta_err = theta_err.max((eta.value(x)? - exact).abs());
        let fd = 1e-5;
        let g = |p: Vec2| sources.iter().map(|&(y, a)| a * disk_regular(p, y)).sum::<f64>();
        let exact_grad = Vec2::new(
            (g(x + Vec2::new(fd, 0.0)) - g(x - Vec2::new(fd, 0.0))) / (2.0 * fd),
            (g(x + Vec2::new(0.0, fd)) - g(x - Vec2::new(0.0, fd))) / (2.0 * fd),
        );
        grad_err = grad_err.max((eta.gradient(x)? - exact_grad).norm());
    }

    let (r1, r0) = (0.4, 1.0);
    let annulus = Domain::annulus(Vec2::ZERO, r1, r0, 256)?;
    let mut next = xorshift(11);
    let ring: Vec<Vec2> = (0..50).map(|_| Vec2::from_polar(0.55 + 0.3 * next(), 2.0 * PI * next())).collect();
    let exact_w = |x: Vec2| (x.norm() / r0).ln() / (r1 / r0).ln();
    let mut w_err = [0.0f64; 2];
    for (k, d) in [annulus.clone(), annulus.to_boundary_integral()].into_iter().enumerate() {
        let h = Harmonics::new(d)?;
        let w = h.harmonic_measure(1)?;
        for &x in &ring {
            w_err[k] = w_err[k].max((w.value(x)? - exact_w(x)).abs());
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let pass = theta_err < 1e-6 && grad_err < 1e-6 && w_err[0] < 1e-6 && w_err[1] < 1e-6 && secs < 10.0;
    Ok(outcome(
        pass,
        format!(
            "disk θ err {theta_err:.1e}, ∇θ err {grad_err:.1e}; annulus w1 err analytic {:.1e}, boundary-integral {:.1e}; {secs:.2} s",
            w_err[0], w_err[1]
        ),
    ))
}

fn kernel_identities() -> Result<Outcome> {
    let started = Instant::now();
    let zs = [Vec2::new(0.3, -0.2), Vec2::new(-1.5, 0.7), Vec2::new(0.05, 0.08), Vec2::new(2.0, 3.0)];
    let fd_err = |h: f64| -> Result<f64> {
        let mut worst = 0.0f64;
        for &z in &zs {
            let dx = (newtonian_potential(z + Vec2::new(h, 0.0))? - newtonian_potential(z - Vec2::new(h, 0.0))?) / (2.0 * h);
            let dy = (newtonian_potential(z + Vec2::new(0.0, h))? - newtonian_potential(z - Vec2::new(0.0, h))?) / (2.0 * h);
            let k = biot_savart_kernel(z)?;
            worst = worst.max((k + Vec2::new(dx, dy).perp()).norm() / k.norm());
        }
        Ok(worst)
    };
    let (e3, e4) = (fd_err(1e-3)?, fd_err(1e-4)?);
    let order = (e3 / e4).log10();
    let mut odd = 0.0f64;
    let mut orth = 0.0f64;
    let mut next = xorshift(3);
    for _ in 0..10_000 {
        let z = Vec2::new(20.0 * next() - 10.0, 20.0 * next() - 10.0);
        let k = biot_savart_kernel(z)?;
        odd = odd.max((biot_savart_kernel(-z)? + k).norm() / k.norm());
        orth = orth.max(k.dot(z).abs() / (k.norm() * z.norm()));
    }
    let secs = started.elapsed().as_secs_f64();
    let pass = (1.8..=2.2).contains(&order) && odd < 1e-14 && orth < 1e-14 && secs < 1.0;
    Ok(outcome(
        pass,
        format!("finite-difference order {order:.3} ({e3:.1e} → {e4:.1e}); oddness {odd:.1e}; orthogonality {orth:.1e}; {secs:.3} s"),
    ))
}

fn single_vortex_error(h: &Harmonics, steps: usize) -> Result<f64> {
    // a = 2π at r = 0.5: speed r/(1 − r²) = 2/3, period 3π/2.
    let period = 1.5 * PI;
    let start = Vec2::new(0.5, 0.0);
    let mut s = PointVortexState::new(vec![start], vec![2.0 * PI], vec![])?;
    let dt = period / steps as f64;
    for _ in 0..steps {
        s = point_vortex::step(&s, h, 0.5, dt)?;
    }
    Ok((s.positions[0] - start).norm())
}

fn point_vortex_dynamics() -> Result<Outcome> {
    let h = Harmonics::new(Domain::unit_disk(64)?)?;
    let closure = single_vortex_error(&h, 2000)?;
    let errs: Vec<f64> = [25, 50, 100].iter().map(|&n| single_vortex_error(&h, n)).collect::<Result<_>>()?;
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();

    let mut s = PointVortexState::new(vec![Vec2::new(0.3, 0.0), Vec2::new(-0.2, 0.4)], vec![1.0, 0.5], vec![])?;
    let h0 = point_vortex::hamiltonian(&s, &h)?;
    let dt = 1e-3;
    let mut drift = 0.0f64;
    for k in 1..=5000 {
        s = point_vortex::step(&s, &h, 0.2, dt)?;
        if k % 100 == 0 {
            drift = drift.max(((point_vortex::hamiltonian(&s, &h)? - h0) / h0).abs());
        }
    }
    let pass = closure < 1e-6 && orders.iter().all(|o| (3.7..=4.3).contains(o)) && drift < 1e-8;
    Ok(outcome(
        pass,
        format!(
            "period closure {closure:.1e}; RK4 orders {:.3}, {:.3}; two-vortex Hamiltonian drift {drift:.1e}",
            orders[0], orders[1]
        ),
    ))
}

struct Sweep {
    report: harness::RateReport,
    records: Vec<RunRecord>,
}

fn sweep(template: &Scenario, eps: &[f64]) -> Result<Sweep> {
    let records = RefCell::new(Vec::new());
    let runner = |s: &Scenario| -> Result<RunRecord> {
        let r = harness::run(s)?;
        records.borrow_mut().push(r.clone());
        Ok(r)
    };
    let report = harness::converge(template, eps, &runner)?;
    Ok(Sweep { report, records: records.into_inner() })
}

const EPS: [f64; 3] = [0.05, 0.025, 0.0125];

fn in_window(v: f64) -> bool {
    (0.7..=1.3).contains(&v)
}

fn w2_rate(sw: &Sweep) -> Outcome {
    let r = &sw.report;
    let Some(s) = &r.slopes else {
        return outcome(false, format!("no slopes: stopping times {:?}", r.rows.iter().map(|x| x.t_stop).collect::<Vec<_>>()));
    };
    let t_ok = r.rows.iter().all(|x| x.t_stop >= 0.5 && x.stop == vortexkit::error::StopCondition::TEnd);
    outcome(
        in_window(s.w2) && t_ok,
        format!(
            "W2 slope {:.3}; max W2 {:?}; T(ε) {:?}",
            s.w2,
            r.rows.iter().map(|x| format!("{:.3e}", x.max_w2)).collect::<Vec<_>>(),
            r.rows.iter().map(|x| x.t_stop).collect::<Vec<_>>()
        ),
    )
}

fn center_rates(sw: &Sweep) -> Outcome {
    match &sw.report.slopes {
        Some(s) => outcome(
            in_window(s.center) && in_window(s.velocity),
            format!("|X−Y| slope {:.3}, |dX/dt − dY/dt| slope {:.3}", s.center, s.velocity),
        ),
        None => outcome(false, "no slopes".into()),
    }
}

fn w1_chain(sw: &Sweep) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut frames = 0;
    for rec in &sw.records {
        for f in &rec.frames {
            let bound: f64 = f.vortices.iter().zip(&rec.strengths).map(|(v, a)| a.abs() * v.w2.unwrap_or(f64::NAN)).sum();
            worst = worst.max(f.w1.unwrap_or(f64::NAN) - bound);
            frames += 1;
        }
    }
    match &sw.report.slopes {
        Some(s) => outcome(
            worst <= 1e-9 && in_window(s.w1),
            format!("max over {frames} frames of W1 − Σ|a|W2 = {worst:.3e}; W1 slope {:.3}", s.w1),
        ),
        None => outcome(false, "no slopes".into()),
    }
}

fn unbounded_data(template: &Scenario) -> Result<Outcome> {
    let mut t = template.clone();
    for p in &mut t.patches {
        p.profile = Profile::SingularPerturbed { beta: 0.5, p: 3.0, lambda: None };
    }
    let sw = sweep(&t, &EPS)?;
    let r = &sw.report;
    let scaled: Vec<f64> = r
        .rows
        .iter()
        .map(|x| x.lp_proxy.unwrap_or(f64::NAN) * x.eps.powf(2.0 * (1.0 - 2.0 / 3.0)))
        .collect();
    let spread = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let slope = r.slopes.as_ref().map_or(f64::NAN, |s| s.w2);
    Ok(outcome(
        spread < 2.0 && in_window(slope) && r.uniform_t,
        format!("L^p proxy·ε^(2/3) {scaled:.3?} (spread {spread:.3}); W2 slope {slope:.3}"),
    ))
}

fn far_field(sw: &Sweep) -> Outcome {
    let maxima: Vec<f64> = sw.report.rows.iter().map(|r| r.max_far_field).collect();
    let ratio = sw.report.far_field_ratio;
    outcome(ratio < 2.0, format!("max |F_i| per ε {maxima:.4?}; ratio {ratio:.3}"))
}

/// Minimum over basic feasible solutions of the transportation polytope.
fn vertex_enumeration(src: &[(Vec2, f64)], snk: &[(Vec2, f64)]) -> f64 {
    let (m, n) = (src.len(), snk.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let k = m + n - 1;
    let mut rhs = DVector::zeros(k);
    for i in 0..m {
        rhs[i] = src[i].1;
    }
    for j in 0..n - 1 {
        rhs[m + j] = snk[j].1;
    }
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << cells.len()) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let basis: Vec<(usize, usize)> = (0..cells.len()).filter(|b| mask >> b & 1 == 1).map(|b| cells[b]).collect();
        let mut a = DMatrix::<f64>::zeros(k, k);
        for (col, &(i, j)) in basis.iter().enumerate() {
            a[(i, col)] = 1.0;
            if j < n - 1 {
                a[(m + j, col)] = 1.0;
            }
        }
        let lu = a.clone().lu();
        if lu.determinant().abs() < 1e-9 {
            continue;
        }
        let Some(x) = lu.solve(&rhs) else { continue };
        if x.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let cost: f64 = basis.iter().zip(x.iter()).map(|(&(i, j), &f)| f * (src[i].0 - snk[j].0).norm()).sum();
        best = best.min(cost);
    }
    best
}

fn transport_exactness() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for m in 1..=4 {
        for n in 1..=3 {
            for seed in 0..25u64 {
                let mut next = xorshift(1000 * m as u64 + 100 * n as u64 + seed);
                let mut pt = || Vec2::new((8.0 * next()).floor() - 4.0, (8.0 * next()).floor() - 4.0 + 0.5 * next());
                let src: Vec<(Vec2, f64)> = (0..m).map(|_| (pt(), 0.0)).collect();
                let snk: Vec<(Vec2, f64)> = (0..n).map(|_| (pt(), 0.0)).collect();
                let mut next = xorshift(seed + 77);
                let src: Vec<(Vec2, f64)> = src.into_iter().map(|(p, _)| (p, 1.0 + (5.0 * next()).floor())).collect();
                let total: f64 = src.iter().map(|a| a.1).sum();
                let raw: Vec<f64> = (0..n).map(|_| 1.0 + (5.0 * next()).floor()).collect();
                let raw_total: f64 = raw.iter().sum();
                let snk: Vec<(Vec2, f64)> = snk.into_iter().zip(&raw).map(|((p, _), &w)| (p, w * total / raw_total)).collect();
                if src.iter().any(|a| snk.iter().any(|b| a.0 == b.0)) {
                    continue;
                }
                // f carries the sources and minus the first sink; g the remaining sinks.
                let mut f_atoms = src.clone();
                f_atoms.push((snk[0].0, -snk[0].1));
                let f = SignedMeasure::new(f_atoms);
                let g = SignedMeasure::new(snk[1..].to_vec());
                let w1 = w1_signed(&f, &g)?;
                let oracle = vertex_enumeration(&src, &snk);
                worst = worst.max((w1 - oracle).abs());
                count += 1;
            }
        }
    }
    Ok(outcome(worst <= 1e-9, format!("{count} instances up to 4×3; max |simplex − enumeration| = {worst:.1e}")))
}

fn leapfrogging() -> Result<Outcome> {
    let p = LeapfrogParams::default();
    let out = harness::demo_leapfrog(&p)?;
    Ok(outcome(
        out.exchanges >= 1 && out.hamiltonian_drift < 1e-6,
        format!(
            "vortices at ({}, {}) and ({}, {}), δ = {}, t = {}: {} radial-order exchanges, Hamiltonian drift {:.1e}",
            p.positions[0].x, p.positions[0].y, p.positions[1].x, p.positions[1].y, p.delta, p.t_end, out.exchanges, out.hamiltonian_drift
        ),
    ))
}

fn determinism(template: &Scenario) -> Result<Outcome> {
    let mut csv = Vec::new();
    let mut files = Vec::new();
    for _ in 0..2 {
        let r = harness::run(template)?;
        csv.push(io::frames_to_csv(&r.frames));
        let dir = tempfile::tempdir()?;
        io::write_run(&r, dir.path())?;
        files.push(std::fs::read(dir.path().join(io::FRAMES_FILE))?);
    }
    Ok(outcome(
        csv[0] == csv[1] && files[0] == files[1],
        format!("two runs of {}: {} CSV bytes, identical = {}", template.name, files[0].len(), files[0] == files[1]),
    ))
}

fn report(n: usize, name: &str, r: Result<Outcome>, all: &mut bool) {
    let (pass, detail) = match r {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    *all &= pass;
    println!("acceptance {n:>2} {name:<26} {}  {detail}", if pass { "PASS" } else { "FAIL" });
}

fn main() -> ExitCode {
    let mut all = true;
    report(1, "harmonic oracles", harmonic_oracles(), &mut all);
    report(2, "kernel identities", kernel_identities(), &mut all);
    report(3, "point-vortex dynamics", point_vortex_dynamics(), &mut all);

    let mut template = Scenario::standard(EPS[0]);
    template.converge = Some(ConvergeConfig { eps: EPS.to_vec(), slope_window: [0.7, 1.3], t_min: Some(0.5) });
    match sweep(&template, &EPS) {
        Ok(sw) => {
            report(4, "W2 rate", Ok(w2_rate(&sw)), &mut all);
            report(5, "center position/velocity", Ok(center_rates(&sw)), &mut all);
            report(6, "W1 chain", Ok(w1_chain(&sw)), &mut all);
            report(7, "unbounded data", unbounded_data(&template), &mut all);
            report(8, "far-field bound", Ok(far_field(&sw)), &mut all);
        }
        Err(e) => {
            for (n, name) in [(4, "W2 rate"), (5, "center position/velocity"), (6, "W1 chain"), (8, "far-field bound")] {
                report(n, name, Ok(outcome(false, format!("sweep error: {e}"))), &mut all);
            }
            report(7, "unbounded data", unbounded_data(&template), &mut all);
        }
    }
    report(9, "transport exactness", transport_exactness(), &mut all);
    report(10, "leapfrogging", leapfrogging(), &mut all);
    report(11, "determinism", determinism(&template), &mut all);
    if all {
        println!("acceptance: all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some checks FAILED");
        ExitCode::FAILURE
    }
}
