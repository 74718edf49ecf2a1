//! Benchmark harness: problem registry, run dispatch, snapshots, error
//! measurement, convergence studies and performance comparisons.
//!
//! Runs are described by a [`RunSpec`], either built directly or parsed from
//! a JSON [`RunConfig`]. Results are returned as dimension-erased
//! [`Snapshot`]s so that errors, oscillation metrics and CSV output work the
//! same way for every model and scheme.

mod exact;
mod problems;
mod riemann;
mod study;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;

use crate::fvm_reference::{initialize_fv, initialize_fv_2d, Fvm1d, Fvm2d, FvmOptions, Limiter};
use crate::physics::{conservative_to_primitive, FluxModel, Nonconvex};
use crate::solver1d::{initialize, BoundaryClosure, FdfvScheme, RunOptions, Solver1d, StageBoundary, TimeStep};
use crate::solver2d::{initialize_2d, Solver2d};
use crate::time_integration::{RkKind, RkScheme};
use crate::Error;

pub use exact::{exact_snapshot, shu_osher_fixture};
pub use problems::{
    nonconvex_exact, nonconvex_inverse_speed, vortex_exact, ExactSource, Pairing, ProblemId, ProblemSpec, Scheme,
};
pub use riemann::Riemann;
pub use study::{
    compare_performance, convergence_study, l1_error, mesh_for_dof, oscillation_metric, ConvergenceReport,
    ConvergenceRow, ErrorKind, L1Errors, MatchCriterion, Oscillation, PerfRow, PerfTable,
};

use problems::{advection_speed, euler_model, euler_setup, scalar_setup, vortex_model, Setup1d};

/// Gauss points per direction for two-dimensional initial averages.
const INIT_POINTS_2D: usize = 3;
const DEFAULT_MAX_STEPS: usize = 50_000_000;

/// Spatial discretization of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Fdfv {
        stencil: String,
        rk: RkKind,
    },
    /// MUSCL-Roe finite volumes with RK2.
    Fvm(FvmOptions),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Fdfv { stencil, rk } => match Pairing::ALL.iter().find(|p| p.stencil() == stencil && p.rk() == *rk)
            {
                Some(p) => p.name().to_string(),
                None => format!("{stencil}+{}", rk.name()),
            },
            Method::Fvm(o) => match o.limiter {
                Limiter::None => "fvm".into(),
                Limiter::VanAlbada => "fvm-van-albada".into(),
            },
        }
    }

    fn pairing(&self) -> Option<Pairing> {
        match self {
            Method::Fdfv { stencil, rk } => Pairing::ALL
                .into_iter()
                .find(|p| p.stencil() == stencil && p.rk() == *rk),
            Method::Fvm(_) => None,
        }
    }

    fn default_scheme(&self) -> Option<Scheme> {
        match self {
            Method::Fdfv { .. } => self.pairing().map(Scheme::Fdfv),
            Method::Fvm(o) => Some(Scheme::Fvm(o.limiter)),
        }
    }
}

impl From<Scheme> for Method {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Fdfv(p) => Method::Fdfv {
                stencil: p.stencil().to_string(),
                rk: p.rk(),
            },
            Scheme::Fvm(limiter) => Method::Fvm(FvmOptions {
                limiter,
                ..FvmOptions::default()
            }),
        }
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemId,
    pub method: Method,
    /// Cells (in x for two-dimensional problems).
    pub n: usize,
    /// Cells in y; ignored in 1D.
    pub ny: usize,
    pub step: TimeStep,
    pub t_final: f64,
    /// Extra output times before `t_final` (1D only).
    pub snapshots: Vec<f64>,
    pub closure: BoundaryClosure,
    pub stage_boundary: StageBoundary,
    pub max_steps: usize,
}

impl RunSpec {
    /// The registered defaults of `problem` for `scheme` on `n` cells per direction.
    pub fn new(problem: ProblemId, scheme: Scheme, n: usize) -> Self {
        let spec = problem.spec();
        Self {
            problem,
            method: scheme.into(),
            n,
            ny: n,
            step: spec.default_step(scheme),
            t_final: spec.t_final,
            snapshots: Vec::new(),
            closure: BoundaryClosure::default(),
            stage_boundary: StageBoundary::default(),
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn with_step(mut self, step: TimeStep) -> Self {
        self.step = step;
        self
    }

    pub fn with_mesh(mut self, n: usize) -> Self {
        self.n = n;
        self.ny = n;
        self
    }

    pub fn label(&self) -> String {
        self.method.label()
    }

    /// Unknowns stored by the discretization.
    pub fn dof(&self) -> usize {
        let d = self.problem.spec().quantities_conserved();
        let (n, ny) = (self.n, self.ny);
        match (&self.method, self.problem.spec().is_2d()) {
            (Method::Fdfv { .. }, false) => (2 * n + 1) * d,
            (Method::Fvm(_), false) => n * d,
            (Method::Fdfv { .. }, true) => (n * ny + (n + 1) * ny + n * (ny + 1)) * d,
            (Method::Fvm(_), true) => n * ny * d,
        }
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self, Error> {
        let problem: ProblemId = cfg.problem.parse()?;
        let spec = problem.spec();
        if let Some(model) = &cfg.model {
            let expect = problem.model_name();
            if model != expect {
                return Err(Error::Config(format!(
                    "problem `{problem}` uses model `{expect}`, not `{model}`"
                )));
            }
        }
        if let Some(domain) = &cfg.domain {
            let mut expect = vec![spec.x_range.0, spec.x_range.1];
            if let Some(y) = spec.y_range {
                expect.extend([y.0, y.1]);
            }
            if domain != &expect {
                return Err(Error::Config(format!(
                    "problem `{problem}` is posed on {expect:?}, not {domain:?}"
                )));
            }
        }
        if let Some(bc) = &cfg.bc {
            let expect = problem.bc_kind();
            if bc != expect {
                return Err(Error::Config(format!(
                    "problem `{problem}` has `{expect}` boundaries, not `{bc}`"
                )));
            }
        }

        let method = match (&cfg.scheme, &cfg.stencil) {
            (Some(_), Some(_)) => return Err(Error::Config("give either `scheme` or `stencil`, not both".into())),
            (Some(s), None) => {
                if cfg.rk.is_some() {
                    return Err(Error::Config("`rk` is implied by `scheme`".into()));
                }
                let mut m = Method::from(s.parse::<Scheme>()?);
                if let Method::Fvm(o) = &mut m {
                    if let Some(l) = &cfg.limiter {
                        o.limiter = l.parse()?;
                    }
                }
                m
            }
            (None, Some(stencil)) => {
                crate::ddo::StencilFamily::from_name(stencil)?;
                let rk = cfg
                    .rk
                    .as_deref()
                    .ok_or_else(|| Error::Config("`stencil` needs an `rk` scheme".into()))?
                    .parse()?;
                Method::Fdfv {
                    stencil: stencil.clone(),
                    rk,
                }
            }
            (None, None) => return Err(Error::Config("one of `scheme` or `stencil` is required".into())),
        };
        let mut method = method;
        match &mut method {
            Method::Fvm(o) => {
                if let Some(r) = &cfg.reconstruction {
                    o.variables = r.parse()?;
                }
                o.entropy_fix = cfg.entropy_fix.unwrap_or(false);
            }
            Method::Fdfv { .. } => {
                if cfg.limiter.is_some() || cfg.reconstruction.is_some() || cfg.entropy_fix.is_some() {
                    return Err(Error::Config(
                        "`limiter`, `reconstruction` and `entropy_fix` apply to the finite-volume scheme only".into(),
                    ));
                }
            }
        }

        let step = match (cfg.cfl, cfg.dt_ratio) {
            (Some(_), Some(_)) => return Err(Error::Config("give either `cfl` or `dt_ratio`, not both".into())),
            (Some(c), None) => TimeStep::Cfl(c),
            (None, Some(r)) => TimeStep::FixedRatio(r),
            (None, None) => match method.default_scheme() {
                Some(s) => spec.default_step(s),
                None => {
                    return Err(Error::Config(format!(
                        "no default step for `{}`; set `cfl` or `dt_ratio`",
                        method.label()
                    )))
                }
            },
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match step {
            TimeStep::Cfl(v) | TimeStep::FixedRatio(v) if !positive(v) => {
                return Err(Error::Config(format!("time step parameter must be positive, got {v}")))
            }
            _ => {}
        }
        let t_final = cfg.t_final.unwrap_or(spec.t_final);
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::Config(format!("final time must be non-negative, got {t_final}")));
        }
        if cfg.n == 0 || cfg.ny == Some(0) {
            return Err(Error::Config("cell counts must be positive".into()));
        }
        if !spec.is_2d() && cfg.ny.is_some() {
            return Err(Error::Config(format!(
                "`ny` given for one-dimensional problem `{problem}`"
            )));
        }
        if spec.is_2d() && !cfg.snapshots.is_empty() {
            return Err(Error::Config("intermediate snapshots are only supported in 1D".into()));
        }
        let closure = match cfg.closure.as_deref() {
            None => BoundaryClosure::default(),
            Some("lower-order") => BoundaryClosure::LowerOrder,
            Some("same-order") => BoundaryClosure::SameOrder,
            Some(o) => {
                return Err(Error::Config(format!(
                    "unknown closure `{o}`; valid: lower-order, same-order"
                )))
            }
        };
        let stage_boundary = match cfg.stage_boundary.as_deref() {
            None => StageBoundary::default(),
            Some("nominal") => StageBoundary::Nominal,
            Some("integrated") => StageBoundary::Integrated,
            Some(o) => {
                return Err(Error::Config(format!(
                    "unknown stage boundary treatment `{o}`; valid: nominal, integrated"
                )))
            }
        };
        Ok(Self {
            problem,
            method,
            n: cfg.n,
            ny: cfg.ny.unwrap_or(cfg.n),
            step,
            t_final,
            snapshots: cfg.snapshots.clone(),
            closure,
            stage_boundary,
            max_steps: cfg.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
        })
    }
}

/// JSON run description. `problem` (alias `ic`) fixes the model, domain,
/// boundary conditions and initial data; `model`, `domain` and `bc` may be
/// repeated as a consistency check.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(alias = "ic")]
    pub problem: String,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub domain: Option<Vec<f64>>,
    #[serde(default)]
    pub bc: Option<String>,
    /// A pairing name such as `d2up-rk3`, or `fvm` / `fvm-van-albada`.
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default)]
    pub stencil: Option<String>,
    #[serde(default)]
    pub rk: Option<String>,
    #[serde(default)]
    pub limiter: Option<String>,
    #[serde(default)]
    pub reconstruction: Option<String>,
    #[serde(default)]
    pub entropy_fix: Option<bool>,
    #[serde(alias = "nx")]
    pub n: usize,
    #[serde(default)]
    pub ny: Option<usize>,
    #[serde(default)]
    pub cfl: Option<f64>,
    #[serde(default)]
    pub dt_ratio: Option<f64>,
    #[serde(default, alias = "T")]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub closure: Option<String>,
    #[serde(default)]
    pub stage_boundary: Option<String>,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One point of a snapshot. `weight` is the quadrature weight used by the
/// L1 norm; aliased periodic faces carry weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceFamily {
    pub name: &'static str,
    pub samples: Vec<Sample>,
}

/// Solution at one time, with conserved components followed by derived
/// primitive quantities in every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub problem: ProblemId,
    pub time: f64,
    pub columns: Vec<&'static str>,
    /// Number of leading conserved columns.
    pub conserved: usize,
    pub dims: usize,
    pub cells: (usize, usize),
    pub origin: (f64, f64),
    pub h: (f64, f64),
    pub averages: Vec<Sample>,
    /// Empty for finite-volume runs.
    pub faces: Vec<FaceFamily>,
}

impl Snapshot {
    /// `sum ubar * cell volume` per conserved component.
    pub fn totals(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.conserved];
        for s in &self.averages {
            for (acc, v) in t.iter_mut().zip(&s.values) {
                *acc += v;
            }
        }
        let vol = self.h.0 * self.h.1;
        t.into_iter().map(|v| v * vol).collect()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Averages as CSV: `x[,y]` followed by every column.
    pub fn averages_csv(&self) -> String {
        samples_csv(self.dims, &self.columns, &self.averages)
    }

    pub fn faces_csv(&self, family: &FaceFamily) -> String {
        samples_csv(self.dims, &self.columns, &family.samples)
    }

    /// Writes `{stem}_averages.csv` and one `{stem}_{family}.csv` per face
    /// family into `dir`; returns the file names.
    pub fn write_csv(&self, dir: &Path, stem: &str) -> Result<Vec<String>, Error> {
        let mut names = Vec::new();
        let mut put = |name: String, body: String| -> Result<(), Error> {
            let path = dir.join(&name);
            fs::write(&path, body).map_err(|e| Error::io(path, e))?;
            names.push(name);
            Ok(())
        };
        put(format!("{stem}_averages.csv"), self.averages_csv())?;
        for f in &self.faces {
            put(format!("{stem}_{}.csv", f.name), self.faces_csv(f))?;
        }
        Ok(names)
    }
}

fn samples_csv(dims: usize, columns: &[&str], samples: &[Sample]) -> String {
    let mut out = String::from(if dims == 2 { "x,y" } else { "x" });
    for c in columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for s in samples {
        let _ = write!(out, "{}", s.x);
        if dims == 2 {
            let _ = write!(out, ",{}", s.y);
        }
        for v in &s.values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub spec: RunSpec,
    /// State at `t_final`.
    pub snapshot: Snapshot,
    /// States at the requested intermediate times.
    pub snapshots: Vec<Snapshot>,
    pub initial_totals: Vec<f64>,
    pub steps: usize,
    pub dof: usize,
    /// Wall-clock seconds spent time stepping.
    pub seconds: f64,
}

impl RunResult {
    /// Largest change of a conserved total relative to its initial size.
    /// Totals that start at zero are measured against the largest one.
    pub fn conservation_drift(&self) -> f64 {
        let end = self.snapshot.totals();
        let scale = self.initial_totals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.initial_totals
            .iter()
            .zip(&end)
            .map(|(a, b)| {
                let d = if *a != 0.0 { a.abs() } else { scale };
                if d == 0.0 {
                    (b - a).abs()
                } else {
                    (b - a).abs() / d
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Runs `spec` to its final time.
pub fn run(spec: &RunSpec) -> Result<RunResult, Error> {
    use ProblemId::*;
    let id = spec.problem;
    match id {
        AdvectionPeriodic | AdvectionDirichlet | SquareWave => {
            run_1d(spec, &advection_speed(id), scalar_setup(id), derive_scalar)
        }
        Nonconvex => run_1d(spec, &self::Nonconvex, scalar_setup(id), derive_scalar),
        EulerSmoothPeriodic | Sod | ShuOsher => run_1d(spec, &euler_model(), euler_setup(id), derive_euler),
        Vortex2d => run_2d(spec),
    }
}

pub(crate) fn derive_scalar(w: &[f64; 1]) -> Vec<f64> {
    vec![w[0]]
}

pub(crate) fn derive_euler(w: &[f64; 3]) -> Vec<f64> {
    let (u, p) = conservative_to_primitive(w, problems::EULER_GAMMA);
    vec![w[0], w[1], w[2], u, p]
}

pub(crate) fn derive_vortex(w: &[f64; 4]) -> Vec<f64> {
    let p = vortex_model().primitive(w);
    vec![w[0], w[1], w[2], w[3], p[1], p[2], p[3]]
}

fn rk_of(spec: &RunSpec) -> RkScheme {
    match &spec.method {
        Method::Fdfv { rk, .. } => RkScheme::new(*rk),
        Method::Fvm(_) => RkScheme::new(RkKind::Rk2),
    }
}

/// Layout information shared by the snapshot builders.
pub(crate) struct Grid1d {
    pub x_left: f64,
    pub h: f64,
    pub n: usize,
    pub periodic: bool,
}

impl Grid1d {
    fn face(&self, k: usize) -> f64 {
        let n = self.n as f64;
        self.x_left + self.h * n * k as f64 / n
    }
}

pub(crate) fn snapshot_1d<const D: usize>(
    problem: ProblemId,
    g: &Grid1d,
    time: f64,
    averages: &[[f64; D]],
    nodals: Option<&[[f64; D]]>,
    derive: fn(&[f64; D]) -> Vec<f64>,
) -> Snapshot {
    let spec = problem.spec();
    let averages = averages
        .iter()
        .enumerate()
        .map(|(i, w)| Sample {
            x: 0.5 * (g.face(i) + g.face(i + 1)),
            y: 0.0,
            weight: g.h,
            values: derive(w),
        })
        .collect();
    let faces = nodals
        .map(|nodals| {
            vec![FaceFamily {
                name: "faces",
                samples: nodals
                    .iter()
                    .enumerate()
                    .map(|(k, w)| Sample {
                        x: g.face(k),
                        y: 0.0,
                        weight: if g.periodic && k == g.n { 0.0 } else { g.h },
                        values: derive(w),
                    })
                    .collect(),
            }]
        })
        .unwrap_or_default();
    Snapshot {
        problem,
        time,
        columns: spec.quantities.to_vec(),
        conserved: D,
        dims: 1,
        cells: (g.n, 1),
        origin: (g.x_left, 0.0),
        h: (g.h, 1.0),
        averages,
        faces,
    }
}

fn run_1d<M: FluxModel<D>, const D: usize>(
    spec: &RunSpec,
    model: &M,
    setup: Setup1d<D>,
    derive: fn(&[f64; D]) -> Vec<f64>,
) -> Result<RunResult, Error> {
    let p = spec.problem.spec();
    let (a, b) = p.x_range;
    let n = spec.n;
    let grid = Grid1d {
        x_left: a,
        h: (b - a) / n as f64,
        n,
        periodic: setup.bc.is_periodic(),
    };
    let rk = rk_of(spec);
    let opts = RunOptions {
        t_final: spec.t_final,
        step: spec.step,
        max_steps: spec.max_steps,
        snapshots: spec.snapshots.clone(),
    };
    match &spec.method {
        Method::Fdfv { stencil, .. } => {
            let scheme = FdfvScheme::new(stencil, spec.closure)?;
            let order = scheme.stencil_order() + 1;
            let solver = Solver1d::new(model, scheme, setup.bc, n)?.with_stage_boundary(spec.stage_boundary);
            let init = initialize(a, b, n, &setup.ic, order);
            let initial_totals = init.total().to_vec();
            let dof = init.dof();
            let start = Instant::now();
            let out = solver.run(init, &rk, &opts)?;
            let seconds = start.elapsed().as_secs_f64();
            let snap = |s: &crate::solver1d::MeshState<D>| {
                snapshot_1d(spec.problem, &grid, s.time, &s.averages, Some(&s.nodals), derive)
            };
            Ok(RunResult {
                spec: spec.clone(),
                snapshot: snap(&out.state),
                snapshots: out.snapshots.iter().map(snap).collect(),
                initial_totals,
                steps: out.steps,
                dof,
                seconds,
            })
        }
        Method::Fvm(o) => {
            let fvm = Fvm1d::new(model, setup.bc, *o)?;
            let init = initialize_fv(a, b, n, &setup.ic);
            let initial_totals = init.total().to_vec();
            let dof = init.dof();
            let start = Instant::now();
            let (state, snaps, steps) = fvm.run_with_snapshots(init, &rk, &opts.schedule(), spec.step)?;
            let seconds = start.elapsed().as_secs_f64();
            let snap = |s: &crate::fvm_reference::FvState<D>| {
                snapshot_1d(spec.problem, &grid, s.time, &s.averages, None, derive)
            };
            Ok(RunResult {
                spec: spec.clone(),
                snapshot: snap(&state),
                snapshots: snaps.iter().map(snap).collect(),
                initial_totals,
                steps,
                dof,
                seconds,
            })
        }
    }
}

pub(crate) struct Grid2d {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2d {
    fn xf(&self, i: usize) -> f64 {
        self.x0 + self.hx * self.nx as f64 * i as f64 / self.nx as f64
    }
    fn yf(&self, j: usize) -> f64 {
        self.y0 + self.hy * self.ny as f64 * j as f64 / self.ny as f64
    }
    fn xc(&self, i: usize) -> f64 {
        0.5 * (self.xf(i) + self.xf(i + 1))
    }
    fn yc(&self, j: usize) -> f64 {
        0.5 * (self.yf(j) + self.yf(j + 1))
    }
}

/// x-face and y-face values.
type FacePair<'a, const D: usize> = (&'a [[f64; D]], &'a [[f64; D]]);

pub(crate) fn snapshot_2d<const D: usize>(
    problem: ProblemId,
    g: &Grid2d,
    time: f64,
    averages: &[[f64; D]],
    faces: Option<FacePair<D>>,
    derive: fn(&[f64; D]) -> Vec<f64>,
) -> Snapshot {
    let (nx, ny) = (g.nx, g.ny);
    let vol = g.hx * g.hy;
    let mut avg = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            avg.push(Sample {
                x: g.xc(i),
                y: g.yc(j),
                weight: vol,
                values: derive(&averages[j * nx + i]),
            });
        }
    }
    let mut families = Vec::new();
    if let Some((xfaces, yfaces)) = faces {
        let mut xs = Vec::with_capacity(xfaces.len());
        for j in 0..ny {
            for i in 0..=nx {
                xs.push(Sample {
                    x: g.xf(i),
                    y: g.yc(j),
                    weight: if i == nx { 0.0 } else { vol },
                    values: derive(&xfaces[j * (nx + 1) + i]),
                });
            }
        }
        let mut ys = Vec::with_capacity(yfaces.len());
        for j in 0..=ny {
            for i in 0..nx {
                ys.push(Sample {
                    x: g.xc(i),
                    y: g.yf(j),
                    weight: if j == ny { 0.0 } else { vol },
                    values: derive(&yfaces[j * nx + i]),
                });
            }
        }
        families.push(FaceFamily {
            name: "xfaces",
            samples: xs,
        });
        families.push(FaceFamily {
            name: "yfaces",
            samples: ys,
        });
    }
    Snapshot {
        problem,
        time,
        columns: problem.spec().quantities.to_vec(),
        conserved: D,
        dims: 2,
        cells: (nx, ny),
        origin: (g.x0, g.y0),
        h: (g.hx, g.hy),
        averages: avg,
        faces: families,
    }
}

fn run_2d(spec: &RunSpec) -> Result<RunResult, Error> {
    let p = spec.problem.spec();
    let (xr, yr) = (p.x_range, p.y_range.expect("two-dimensional problem"));
    let (nx, ny) = (spec.n, spec.ny);
    if !spec.snapshots.is_empty() {
        return Err(Error::Config("intermediate snapshots are only supported in 1D".into()));
    }
    let model = vortex_model();
    let ic = |x: f64, y: f64| vortex_exact(x, y, 0.0);
    let grid = Grid2d {
        x0: xr.0,
        y0: yr.0,
        hx: (xr.1 - xr.0) / nx as f64,
        hy: (yr.1 - yr.0) / ny as f64,
        nx,
        ny,
    };
    let rk = rk_of(spec);
    let (snapshot, initial_totals, dof, steps, seconds) = match &spec.method {
        Method::Fdfv { stencil, .. } => {
            let solver = Solver2d::new(&model, stencil, nx, ny)?;
            let init = initialize_2d(xr, yr, nx, ny, &ic, INIT_POINTS_2D);
            let totals = init.total().to_vec();
            let dof = init.dof();
            let start = Instant::now();
            let (state, steps) = solver.run_counted(init, &rk, spec.t_final, spec.step, spec.max_steps)?;
            let seconds = start.elapsed().as_secs_f64();
            let snap = snapshot_2d(
                spec.problem,
                &grid,
                state.time,
                &state.averages,
                Some((&state.xfaces, &state.yfaces)),
                derive_vortex,
            );
            (snap, totals, dof, steps, seconds)
        }
        Method::Fvm(o) => {
            let fvm = Fvm2d::new(&model, *o);
            let init = initialize_fv_2d(xr, yr, nx, ny, &ic, INIT_POINTS_2D);
            let totals = init.total().to_vec();
            let dof = init.dof();
            let start = Instant::now();
            let (state, steps) = fvm.run_counted(init, &rk, spec.t_final, spec.step, spec.max_steps)?;
            let seconds = start.elapsed().as_secs_f64();
            let snap = snapshot_2d(spec.problem, &grid, state.time, &state.averages, None, derive_vortex);
            (snap, totals, dof, steps, seconds)
        }
    };
    Ok(RunResult {
        spec: spec.clone(),
        snapshot,
        snapshots: Vec::new(),
        initial_totals,
        steps,
        dof,
        seconds,
    })
}

/// Fine finite-volume run that provides the stored Shu-Osher reference.
pub fn shu_osher_reference_spec() -> RunSpec {
    let cells = match ProblemId::ShuOsher.spec().exact {
        ExactSource::Fixture { cells } => cells,
        _ => unreachable!(),
    };
    RunSpec::new(ProblemId::ShuOsher, Scheme::Fvm(Limiter::VanAlbada), cells)
}

/// CSV body of a reference profile: cell centers and conserved averages.
pub fn reference_csv(result: &RunResult) -> String {
    let s = &result.snapshot;
    let cols = &s.columns[..s.conserved];
    let mut out = String::from("x");
    for c in cols {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for a in &s.averages {
        let _ = write!(out, "{}", a.x);
        for v in &a.values[..s.conserved] {
            let _ = write!(out, ",{v:e}");
        }
        out.push('\n');
    }
    out
}

impl ProblemId {
    pub fn model_name(self) -> &'static str {
        match self {
            ProblemId::AdvectionPeriodic | ProblemId::AdvectionDirichlet | ProblemId::SquareWave => "advection",
            ProblemId::Nonconvex => "nonconvex",
            ProblemId::EulerSmoothPeriodic | ProblemId::Sod | ProblemId::ShuOsher => "euler1d",
            ProblemId::Vortex2d => "euler2d",
        }
    }

    pub fn bc_kind(self) -> &'static str {
        match self {
            ProblemId::AdvectionPeriodic
            | ProblemId::SquareWave
            | ProblemId::EulerSmoothPeriodic
            | ProblemId::Vortex2d => "periodic",
            _ => "dirichlet",
        }
    }
}

impl ProblemSpec {
    pub fn quantities_conserved(&self) -> usize {
        match self.id.model_name() {
            "euler1d" => 3,
            "euler2d" => 4,
            _ => 1,
        }
    }
}
