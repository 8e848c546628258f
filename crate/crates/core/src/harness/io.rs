//! Run artifacts: a frames CSV and a JSON manifest per run directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::{Frame, RunRecord, VortexFrame};
use crate::error::{Error, Result, StopCondition};
use crate::kernels::Vec2;
use crate::point_vortex::SeparationReport;

pub const FRAMES_FILE: &str = "frames.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

const FIXED_HEADER: [&str; 18] = [
    "t", "i", "Yx", "Yy", "Xx", "Xy", "dXx", "dXy", "dYx", "dYy", "W2", "Fmax", "W1", "H", "patch_pair", "patch_boundary",
    "vortex_pair", "vortex_boundary",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
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
    pub n_frames: usize,
    pub n_vortices: usize,
    pub n_holes: usize,
    pub frames_csv: String,
}

fn num(out: &mut String, v: f64) {
    // Debug formatting prints the shortest representation that parses back exactly.
    let _ = write!(out, "{v:?}");
}

fn opt(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        num(out, v);
    }
}

/// Header line (without newline) for `n_holes` hole coefficients.
pub fn csv_header(n_holes: usize) -> String {
    let mut cols: Vec<String> = FIXED_HEADER.iter().map(|s| s.to_string()).collect();
    cols.extend((1..=n_holes).map(|m| format!("c_{m}")));
    cols.join(",")
}

/// One row per (frame, vortex).
pub fn frames_to_csv(frames: &[Frame]) -> String {
    let n_holes = frames.first().map_or(0, |f| f.hole_coefficients.len());
    let mut out = csv_header(n_holes);
    out.push('\n');
    for fr in frames {
        for (i, v) in fr.vortices.iter().enumerate() {
            let mut cells: Vec<String> = Vec::with_capacity(18 + n_holes);
            let cell = |f: &dyn Fn(&mut String)| {
                let mut s = String::new();
                f(&mut s);
                s
            };
            cells.push(cell(&|s| num(s, fr.t)));
            cells.push(i.to_string());
            cells.push(cell(&|s| num(s, v.y.x)));
            cells.push(cell(&|s| num(s, v.y.y)));
            cells.push(cell(&|s| opt(s, v.x.map(|x| x.x))));
            cells.push(cell(&|s| opt(s, v.x.map(|x| x.y))));
            cells.push(cell(&|s| opt(s, v.dx.map(|x| x.x))));
            cells.push(cell(&|s| opt(s, v.dx.map(|x| x.y))));
            cells.push(cell(&|s| num(s, v.dy.x)));
            cells.push(cell(&|s| num(s, v.dy.y)));
            cells.push(cell(&|s| opt(s, v.w2)));
            cells.push(cell(&|s| opt(s, v.fmax)));
            cells.push(cell(&|s| opt(s, fr.w1)));
            cells.push(cell(&|s| opt(s, fr.hamiltonian)));
            cells.push(cell(&|s| opt(s, fr.patch_separation.and_then(|r| r.min_pair))));
            cells.push(cell(&|s| opt(s, fr.patch_separation.map(|r| r.min_boundary))));
            cells.push(cell(&|s| opt(s, fr.vortex_separation.min_pair)));
            cells.push(cell(&|s| num(s, fr.vortex_separation.min_boundary)));
            for &c in &fr.hole_coefficients {
                cells.push(cell(&|s| num(s, c)));
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    }
    out
}

fn parse_opt(cell: &str, line: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::InvalidInput(format!("line {line}: cannot parse {cell:?} as a number")))
}

fn parse_req(cell: &str, line: usize) -> Result<f64> {
    parse_opt(cell, line)?.ok_or_else(|| Error::InvalidInput(format!("line {line}: missing required value")))
}

fn pair(a: Option<f64>, b: Option<f64>) -> Option<Vec2> {
    Some(Vec2::new(a?, b?))
}

/// Inverse of [`frames_to_csv`]; `delta` reconstructs the monitor thresholds.
pub fn frames_from_csv(text: &str, delta: f64) -> Result<Vec<Frame>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidInput("empty frames file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < FIXED_HEADER.len() || cols[..FIXED_HEADER.len()] != FIXED_HEADER {
        return Err(Error::InvalidInput(format!("unexpected header {header:?}")));
    }
    let n_holes = cols.len() - FIXED_HEADER.len();
    let mut frames: Vec<Frame> = Vec::new();
    for (k, line) in lines.enumerate() {
        let ln = k + 2;
        let c: Vec<&str> = line.split(',').collect();
        if c.len() != cols.len() {
            return Err(Error::InvalidInput(format!("line {ln}: expected {} cells, got {}", cols.len(), c.len())));
        }
        let t = parse_req(c[0], ln)?;
        let i: usize = c[1].parse().map_err(|_| Error::InvalidInput(format!("line {ln}: bad vortex index")))?;
        let v = VortexFrame {
            y: Vec2::new(parse_req(c[2], ln)?, parse_req(c[3], ln)?),
            x: pair(parse_opt(c[4], ln)?, parse_opt(c[5], ln)?),
            dx: pair(parse_opt(c[6], ln)?, parse_opt(c[7], ln)?),
            dy: Vec2::new(parse_req(c[8], ln)?, parse_req(c[9], ln)?),
            w2: parse_opt(c[10], ln)?,
            fmax: parse_opt(c[11], ln)?,
        };
        if i == 0 {
            let patch_boundary = parse_opt(c[15], ln)?;
            frames.push(Frame {
                t,
                vortices: vec![],
                w1: parse_opt(c[12], ln)?,
                hamiltonian: parse_opt(c[13], ln)?,
                patch_separation: patch_boundary.map(|b| SeparationReport::new(parse_opt(c[14], ln).ok().flatten(), b, delta)),
                vortex_separation: SeparationReport::new(parse_opt(c[16], ln)?, parse_req(c[17], ln)?, delta),
                hole_coefficients: (0..n_holes).map(|m| parse_req(c[18 + m], ln)).collect::<Result<_>>()?,
            });
        }
        let fr = frames.last_mut().ok_or_else(|| Error::InvalidInput(format!("line {ln}: frame must start at i = 0")))?;
        if fr.t != t || fr.vortices.len() != i {
            return Err(Error::InvalidInput(format!("line {ln}: rows out of order")));
        }
        fr.vortices.push(v);
    }
    Ok(frames)
}

pub fn manifest(record: &RunRecord, n_holes: usize) -> Manifest {
    Manifest {
        name: record.name.clone(),
        config_hash: record.config_hash.clone(),
        strengths: record.strengths.clone(),
        delta: record.delta,
        dt: record.dt,
        blob: record.blob,
        steps: record.steps,
        frames_every: record.frames_every,
        t_stop: record.t_stop,
        stop: record.stop,
        stop_detail: record.stop_detail.clone(),
        wall_time_s: record.wall_time_s,
        n_frames: record.frames.len(),
        n_vortices: record.n_vortices(),
        n_holes,
        frames_csv: FRAMES_FILE.into(),
    }
}

/// Writes `frames.csv` and `manifest.json` into `dir` (created if needed).
pub fn write_run(record: &RunRecord, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let n_holes = record.frames.first().map_or(0, |f| f.hole_coefficients.len());
    std::fs::write(dir.join(FRAMES_FILE), frames_to_csv(&record.frames))?;
    let json = serde_json::to_string_pretty(&manifest(record, n_holes))?;
    std::fs::write(dir.join(MANIFEST_FILE), json + "\n")?;
    Ok(())
}

/// Reloads a run directory written by [`write_run`].
pub fn read_run(dir: &Path) -> Result<RunRecord> {
    let m: Manifest = serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let frames = frames_from_csv(&std::fs::read_to_string(dir.join(&m.frames_csv))?, m.delta)?;
    Ok(RunRecord {
        name: m.name,
        config_hash: m.config_hash,
        strengths: m.strengths,
        delta: m.delta,
        dt: m.dt,
        blob: m.blob,
        steps: m.steps,
        frames_every: m.frames_every,
        t_stop: m.t_stop,
        stop: m.stop,
        stop_detail: m.stop_detail,
        wall_time_s: m.wall_time_s,
        frames,
    })
}

/// `<out>/<name>-<unix seconds>`, with a numeric suffix if it already exists.
pub fn timestamped_dir(out: &Path, name: &str) -> PathBuf {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let base = out.join(format!("{name}-{secs}"));
    let mut dir = base.clone();
    let mut k = 1;
    while dir.exists() {
        dir = PathBuf::from(format!("{}-{k}", base.display()));
        k += 1;
    }
    dir
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunRecord {
        let rep = SeparationReport::new(Some(0.4), 0.8, 0.5);
        let frame = |t: f64| Frame {
            t,
            vortices: vec![
                VortexFrame {
                    y: Vec2::new(0.1 + t, -0.3),
                    dy: Vec2::new(1e-20, 3.0),
                    x: Some(Vec2::new(0.1, 1.0 / 3.0)),
                    dx: Some(Vec2::new(-0.0, 2.5e300)),
                    w2: Some(0.031),
                    fmax: Some(0.7),
                },
                VortexFrame { y: Vec2::new(0.2, 0.2), dy: Vec2::ZERO, x: None, dx: None, w2: None, fmax: None },
            ],
            w1: Some(0.07),
            hamiltonian: None,
            patch_separation: Some(SeparationReport::new(None, 0.3, 0.5)),
            vortex_separation: rep,
            hole_coefficients: vec![0.25, -1.5],
        };
        RunRecord {
            name: "sample".into(),
            config_hash: "00ff".into(),
            strengths: vec![1.0, -0.5],
            delta: 0.5,
            dt: 0.001,
            blob: 0.01,
            steps: 20,
            frames_every: 10,
            t_stop: 0.02,
            stop: StopCondition::VortexBoundary,
            stop_detail: Some("detail".into()),
            wall_time_s: 1.25,
            frames: vec![frame(0.0), frame(0.01), frame(0.02)],
        }
    }

    #[test]
    fn header_layout() {
        assert_eq!(csv_header(0), "t,i,Yx,Yy,Xx,Xy,dXx,dXy,dYx,dYy,W2,Fmax,W1,H,patch_pair,patch_boundary,vortex_pair,vortex_boundary");
        assert!(csv_header(2).ends_with(",c_1,c_2"));
    }

    #[test]
    fn csv_and_manifest_round_trip() {
        let rec = sample();
        let dir = tempfile::tempdir().unwrap();
        write_run(&rec, dir.path()).unwrap();
        let back = read_run(dir.path()).unwrap();
        assert_eq!(back, rec);
        let again = frames_to_csv(&back.frames);
        assert_eq!(again, std::fs::read_to_string(dir.path().join(FRAMES_FILE)).unwrap());
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(serde_json::from_str::<RunRecord>(&json).unwrap(), rec);
    }

    #[test]
    fn malformed_csv_rejected() {
        assert!(frames_from_csv("", 0.5).is_err());
        assert!(frames_from_csv("a,b\n", 0.5).is_err());
        let mut text = frames_to_csv(&sample().frames);
        text.push_str("0.5,1,x\n");
        assert!(frames_from_csv(&text, 0.5).is_err());
    }
}
