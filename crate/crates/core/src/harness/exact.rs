//! Exact and reference solutions laid out like a numerical snapshot.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::solver1d::{cell_average, TimeStep};
use crate::solver2d::cell_average_2d;
use crate::Error;

use super::problems::{
    euler_model, scalar_breakpoints, scalar_exact, sod_riemann, vortex_exact, ExactSource, ProblemId, Scheme,
};
use super::{derive_euler, derive_scalar, derive_vortex, run, RunSpec, Snapshot};

/// Gauss points per smooth piece for exact cell averages.
const EXACT_POINTS: usize = 8;

const SHU_OSHER_FIXTURE: &str = include_str!("../../fixtures/shu_osher_reference.csv");

/// The exact (or reference) solution at `template.time`, sampled at the
/// template's cells and faces.
pub fn exact_snapshot(template: &Snapshot) -> Result<Snapshot, Error> {
    let id = template.problem;
    let t = template.time;
    match id {
        ProblemId::AdvectionPeriodic | ProblemId::AdvectionDirichlet | ProblemId::SquareWave | ProblemId::Nonconvex => {
            let bp = scalar_breakpoints(id, t);
            let f = move |x: f64| [scalar_exact(id, x, t)];
            Ok(fill_1d(
                template,
                derive_scalar,
                |_, a, b| cell_average(&f, a, b, &bp, EXACT_POINTS),
                |_, x| f(x),
            ))
        }
        ProblemId::Sod => {
            let r = sod_riemann();
            let m = euler_model();
            let f = move |x: f64| {
                if t > 0.0 {
                    m.conserved(&r.sample(x / t))
                } else {
                    m.conserved(&if x < 0.0 { r.left } else { r.right })
                }
            };
            let bp: Vec<f64> = r.wave_speeds().into_iter().map(|s| s * t).collect();
            Ok(fill_1d(
                template,
                derive_euler,
                |_, a, b| cell_average(&f, a, b, &bp, EXACT_POINTS),
                |_, x| f(x),
            ))
        }
        ProblemId::EulerSmoothPeriodic => {
            let fine = euler_reference(t)?;
            restrict(template, &fine, false)
        }
        ProblemId::ShuOsher => {
            if t != id.spec().t_final {
                return Err(Error::MissingExact(format!(
                    "the {id} reference is stored for t = {} only",
                    id.spec().t_final
                )));
            }
            let fine = shu_osher_fixture()?;
            restrict(template, &fine, true)
        }
        ProblemId::Vortex2d => Ok(fill_2d(template, t)),
    }
}

fn fill_1d<const D: usize>(
    tpl: &Snapshot,
    derive: fn(&[f64; D]) -> Vec<f64>,
    avg: impl Fn(usize, f64, f64) -> [f64; D],
    point: impl Fn(usize, f64) -> [f64; D],
) -> Snapshot {
    let n = tpl.cells.0;
    let (x0, h) = (tpl.origin.0, tpl.h.0);
    let face = |k: usize| x0 + h * n as f64 * k as f64 / n as f64;
    let mut out = tpl.clone();
    for (i, s) in out.averages.iter_mut().enumerate() {
        s.values = derive(&avg(i, face(i), face(i + 1)));
    }
    for fam in &mut out.faces {
        for (k, s) in fam.samples.iter_mut().enumerate() {
            s.values = derive(&point(k, s.x));
        }
    }
    out
}

fn fill_2d(tpl: &Snapshot, t: f64) -> Snapshot {
    let (hx, hy) = tpl.h;
    let f = move |x: f64, y: f64| vortex_exact(x, y, t);
    let mut out = tpl.clone();
    for s in &mut out.averages {
        let xr = (s.x - 0.5 * hx, s.x + 0.5 * hx);
        let yr = (s.y - 0.5 * hy, s.y + 0.5 * hy);
        s.values = derive_vortex(&cell_average_2d(&f, xr, yr, EXACT_POINTS / 2));
    }
    for fam in &mut out.faces {
        for s in &mut fam.samples {
            s.values = derive_vortex(&f(s.x, s.y));
        }
    }
    out
}

/// Restricts a fine profile of conserved averages to the template mesh.
/// Face values are the fine nodal values at coinciding faces when the fine
/// profile has them, otherwise the mean of the two adjacent fine cells.
fn restrict(tpl: &Snapshot, fine: &FineProfile, from_averages: bool) -> Result<Snapshot, Error> {
    let n = tpl.cells.0;
    let nf = fine.averages.len();
    if n == 0 || !nf.is_multiple_of(n) {
        return Err(Error::MissingExact(format!(
            "{} reference has {nf} cells, which {n} cells do not divide",
            tpl.problem
        )));
    }
    let r = nf / n;
    let avg = |i: usize, _: f64, _: f64| {
        let mut acc = [0.0; 3];
        for w in &fine.averages[i * r..(i + 1) * r] {
            for c in 0..3 {
                acc[c] += w[c];
            }
        }
        acc.map(|v| v / r as f64)
    };
    let point = |k: usize, _: f64| match (&fine.nodals, from_averages) {
        (Some(nodals), false) => nodals[k * r],
        _ => {
            let lo = (k * r).saturating_sub(1);
            let hi = (k * r).min(nf - 1);
            std::array::from_fn(|c| 0.5 * (fine.averages[lo][c] + fine.averages[hi][c]))
        }
    };
    if !from_averages && fine.nodals.is_none() {
        return Err(Error::MissingExact(format!(
            "{} reference has no face values",
            tpl.problem
        )));
    }
    Ok(fill_1d(tpl, derive_euler, avg, point))
}

/// Conserved Euler data on a fine mesh.
pub struct FineProfile {
    pub averages: Vec<[f64; 3]>,
    pub nodals: Option<Vec<[f64; 3]>>,
}

fn conserved_rows(s: &Snapshot, rows: &[super::Sample]) -> Vec<[f64; 3]> {
    debug_assert_eq!(s.conserved, 3);
    rows.iter().map(|r| [r.values[0], r.values[1], r.values[2]]).collect()
}

/// Fine-mesh FD-FV run of the smooth Euler problem, cached per final time.
fn euler_reference(t: f64) -> Result<Arc<FineProfile>, Error> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FineProfile>>>> = OnceLock::new();
    let ExactSource::ReferenceRun { scheme, cells, cfl } = ProblemId::EulerSmoothPeriodic.spec().exact else {
        unreachable!()
    };
    let mut cache = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|p| p.into_inner());
    if let Some(p) = cache.get(&t.to_bits()) {
        return Ok(p.clone());
    }
    let mut spec =
        RunSpec::new(ProblemId::EulerSmoothPeriodic, Scheme::Fdfv(scheme), cells).with_step(TimeStep::Cfl(cfl));
    spec.t_final = t;
    let res = run(&spec)?;
    let s = &res.snapshot;
    let profile = Arc::new(FineProfile {
        averages: conserved_rows(s, &s.averages),
        nodals: Some(conserved_rows(s, &s.faces[0].samples)),
    });
    cache.insert(t.to_bits(), profile.clone());
    Ok(profile)
}

/// The stored fine finite-volume Shu-Osher profile.
pub fn shu_osher_fixture() -> Result<Arc<FineProfile>, Error> {
    static FIXTURE: OnceLock<Result<Arc<FineProfile>, String>> = OnceLock::new();
    FIXTURE
        .get_or_init(|| parse_fixture(SHU_OSHER_FIXTURE).map(Arc::new))
        .clone()
        .map_err(Error::MissingExact)
}

fn parse_fixture(text: &str) -> Result<FineProfile, String> {
    let ExactSource::Fixture { cells } = ProblemId::ShuOsher.spec().exact else {
        unreachable!()
    };
    let mut averages = Vec::with_capacity(cells);
    for (ln, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("shu-osher fixture line {}: {e}", ln + 1))?;
        if v.len() != 4 {
            return Err(format!("shu-osher fixture line {}: expected 4 fields", ln + 1));
        }
        averages.push([v[1], v[2], v[3]]);
    }
    if averages.len() != cells {
        return Err(format!(
            "shu-osher fixture has {} rows, expected {cells}; regenerate it with `fdfv reference`",
            averages.len()
        ));
    }
    Ok(FineProfile { averages, nodals: None })
}
