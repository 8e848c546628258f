use vortexkit::error::StopCondition;
use vortexkit::euler_sim::Profile;
use vortexkit::harness::config::{DomainConfig, PatchConfig};
use vortexkit::harness::{io, run, Scenario};
use vortexkit::Vec2;

fn disk_orbit(eps: f64) -> Scenario {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/disk-orbit.toml");
    let mut s = Scenario::load(path).unwrap().with_eps(eps);
    s.numerics.t_end = 0.5;
    s
}

#[test]
fn disk_orbit_traces_a_circle_and_converges() {
    let coarse = run(&disk_orbit(0.04)).unwrap();
    let fine = run(&disk_orbit(0.02)).unwrap();
    for f in &coarse.frames {
        assert!((f.vortices[0].y.norm() - 0.5).abs() < 1e-9, "{:?}", f.vortices[0].y);
    }
    // Angular speed a/(2π(1 − r²)) of a single vortex in the unit disk.
    let last = coarse.frames.last().unwrap();
    let angle = last.vortices[0].y.y.atan2(last.vortices[0].y.x);
    assert!((angle - 0.5 / (2.0 * std::f64::consts::PI * 0.75)).abs() < 1e-9);
    assert!(fine.max_center_error().unwrap() < 0.6 * coarse.max_center_error().unwrap());
    assert!(fine.max_w2().unwrap() < 0.6 * coarse.max_w2().unwrap());
}

#[test]
fn record_invariants_and_prefix_consistency() {
    let mut s = Scenario::standard(0.05);
    s.numerics.t_end = 0.06;
    s.numerics.frames_every = 4;
    let r = run(&s).unwrap();
    assert!(r.frames.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(r.config_hash, s.config_hash());
    let hamiltonian: Vec<f64> = r.frames.iter().map(|f| f.hamiltonian.unwrap()).collect();
    let drift = hamiltonian.iter().map(|h| (h - hamiltonian[0]).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-9 * hamiltonian[0].abs());

    // Reload from disk: lossless apart from the wall-clock entry.
    let dir = tempfile::tempdir().unwrap();
    io::write_run(&r, dir.path()).unwrap();
    let back = io::read_run(dir.path()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn monitor_stop_is_reproducible() {
    let mut s = Scenario::standard(0.016);
    s.physics.delta = 0.16;
    s.numerics.h_over_eps = 0.125;
    s.numerics.t_end = 1.5;
    s.numerics.dt = Some(0.005);
    s.numerics.frames_every = 5;
    let patch = |x: f64, y: f64, a: f64| PatchConfig { center: Vec2::new(x, y), strength: a, profile: Profile::UniformDisc, offset: Vec2::ZERO };
    s.patches = vec![patch(0.59, -0.03, 1.0), patch(0.39, -0.02, -1.0), patch(0.39, -0.48, -1.0)];
    let r = run(&s).unwrap();
    assert_ne!(r.stop, StopCondition::TEnd);
    assert!(r.stop_detail.as_deref().unwrap().contains("threshold"));
    assert!(r.frames.last().unwrap().t < r.t_stop);
    assert!(r.frames.iter().all(|f| f.vortex_separation.ok && f.patch_separation.unwrap().ok));
    // Ending one step before the violation reproduces every recorded frame.
    let mut short = s.clone();
    short.numerics.t_end = (r.steps - 1) as f64 * r.dt;
    let again = run(&short).unwrap();
    assert_eq!(again.stop, StopCondition::TEnd);
    assert_eq!(again.steps, r.steps - 1);
    let mut diff = 0.0f64;
    for f in &r.frames {
        let g = again.frames.iter().find(|g| (g.t - f.t).abs() < 1e-12).expect("frame time reproduced");
        for (u, v) in f.vortices.iter().zip(&g.vortices) {
            diff = diff.max((u.y - v.y).norm()).max((u.x.unwrap() - v.x.unwrap()).norm());
        }
    }
    assert!(diff < 1e-12, "{diff}");
}

#[test]
fn annulus_run_records_hole_coefficients() {
    let s = Scenario {
        domain: DomainConfig::AnalyticAnnulus { center: Vec2::ZERO, inner: 0.3, outer: 1.0, n_quad: 128 },
        ..Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/annulus.toml")).unwrap()
    };
    let mut s = s;
    s.numerics.t_end = 0.05;
    let r = run(&s).unwrap();
    assert_eq!(r.stop, StopCondition::TEnd);
    for f in &r.frames {
        assert!(f.hamiltonian.is_none());
        assert_eq!(f.hole_coefficients.len(), 1);
        // A patch on a circle about the hole keeps Σ a w_1 + γ fixed.
        assert!((f.hole_coefficients[0] - r.frames[0].hole_coefficients[0]).abs() < 1e-6);
    }
    let csv = io::frames_to_csv(&r.frames);
    assert!(csv.lines().next().unwrap().ends_with(",c_1"));
}
