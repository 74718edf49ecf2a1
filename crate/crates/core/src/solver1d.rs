//! One-dimensional FD-FV semi-discretization.
//!
//! Cell averages evolve by the exact flux difference across their faces. Face
//! values evolve by the locally frozen characteristic form
//! `dw/dt = -R diag(lambda) L [D w]`, where each characteristic picks the
//! backward or forward member of the stencil family by the sign of its speed.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ddo::{catalog, catalog_all, rational_to_f64, DdoError, Direction, Stencil, StencilFamily, TermKind};
use crate::physics::{FluxModel, PhysicsError};
use crate::time_integration::{march, MarchError, OdeState, RkScheme, Schedule, StepError, Timed};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Ddo(#[from] DdoError),
    #[error("{location}: {source}")]
    Physics {
        location: String,
        #[source]
        source: PhysicsError,
    },
    #[error("no {dir:?} stencil of the family fits at face {face}")]
    Closure { face: usize, dir: Direction },
    #[error("ill-posed Neumann closure: stencil `{0}` has no weight on the boundary value")]
    IllPosedNeumann(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical blow-up at step {step}, t = {time}, stage {stage}")]
    BlowUp { step: usize, time: f64, stage: usize },
    #[error("step limit {0} reached before the final time")]
    StepLimit(usize),
}

impl SolverError {
    pub(crate) fn from_march(e: MarchError<SolverError>) -> Self {
        match e {
            MarchError::Step { step, time, source } => match source {
                StepError::BlowUp { stage } => SolverError::BlowUp { step, time, stage },
                StepError::Rhs {
                    stage,
                    source: SolverError::Physics { .. },
                } => SolverError::BlowUp { step, time, stage },
                StepError::Rhs { source, .. } => source,
            },
            MarchError::Other(e) => e,
            MarchError::StepLimit(n) => SolverError::StepLimit(n),
        }
    }

    /// Breakdowns of the computed solution, as opposed to bad input.
    pub fn is_blow_up(&self) -> bool {
        matches!(self, SolverError::BlowUp { .. } | SolverError::Physics { .. })
    }
}

/// Cell averages and face values on a uniform mesh of `averages.len()` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshState<const D: usize> {
    pub x_left: f64,
    pub h: f64,
    pub averages: Vec<[f64; D]>,
    pub nodals: Vec<[f64; D]>,
    pub time: f64,
}

impl<const D: usize> MeshState<D> {
    pub fn zeros(x_left: f64, x_right: f64, n: usize) -> Self {
        Self {
            x_left,
            h: (x_right - x_left) / n as f64,
            averages: vec![[0.0; D]; n],
            nodals: vec![[0.0; D]; n + 1],
            time: 0.0,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.averages.len()
    }

    pub fn x_right(&self) -> f64 {
        self.face_x(self.n_cells())
    }

    /// Position of face `k`, computed as `a + (b - a) k / N` so that faces
    /// that should coincide with simple fractions of the domain do.
    pub fn face_x(&self, k: usize) -> f64 {
        let n = self.n_cells() as f64;
        let width = self.h * n;
        self.x_left + width * k as f64 / n
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        0.5 * (self.face_x(i) + self.face_x(i + 1))
    }

    /// `sum_i ubar_i h` per component.
    pub fn total(&self) -> [f64; D] {
        let mut s = [0.0; D];
        for a in &self.averages {
            for c in 0..D {
                s[c] += a[c];
            }
        }
        s.map(|v| v * self.h)
    }

    /// Unknown count: `N d + (N + 1) d`.
    pub fn dof(&self) -> usize {
        (self.averages.len() + self.nodals.len()) * D
    }

    fn zeroed(&self) -> Self {
        Self {
            x_left: self.x_left,
            h: self.h,
            averages: vec![[0.0; D]; self.averages.len()],
            nodals: vec![[0.0; D]; self.nodals.len()],
            time: self.time,
        }
    }
}

impl<const D: usize> Timed for MeshState<D> {
    fn time(&self) -> f64 {
        self.time
    }
    fn set_time(&mut self, t: f64) {
        self.time = t;
    }
}

impl<const D: usize> OdeState for MeshState<D> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.averages.axpy(a, &x.averages);
        self.nodals.axpy(a, &x.nodals);
    }

    fn all_finite(&self) -> bool {
        self.averages.all_finite() && self.nodals.all_finite()
    }
}

pub type BoundaryFn<const D: usize> = Arc<dyn Fn(f64) -> [f64; D] + Send + Sync>;

/// Condition on one side of the domain.
#[derive(Clone)]
pub enum Boundary<const D: usize> {
    Periodic,
    /// Prescribed face value `g_d(t)`.
    Dirichlet(BoundaryFn<D>),
    /// Prescribed gradient `g_n(t)`.
    Neumann(BoundaryFn<D>),
}

impl<const D: usize> Boundary<D> {
    pub fn dirichlet_const(w: [f64; D]) -> Self {
        Boundary::Dirichlet(Arc::new(move |_| w))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::Dirichlet(_) => "dirichlet",
            Boundary::Neumann(_) => "neumann",
        }
    }
}

impl<const D: usize> fmt::Debug for Boundary<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())
    }
}

#[derive(Debug, Clone)]
pub struct BoundarySpec<const D: usize> {
    pub left: Boundary<D>,
    pub right: Boundary<D>,
}

impl<const D: usize> BoundarySpec<D> {
    pub fn periodic() -> Self {
        Self {
            left: Boundary::Periodic,
            right: Boundary::Periodic,
        }
    }

    pub fn dirichlet_const(left: [f64; D], right: [f64; D]) -> Self {
        Self {
            left: Boundary::dirichlet_const(left),
            right: Boundary::dirichlet_const(right),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.left, Boundary::Periodic)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let l = matches!(self.left, Boundary::Periodic);
        let r = matches!(self.right, Boundary::Periodic);
        if l != r {
            return Err(SolverError::Config("periodicity must be imposed on both sides".into()));
        }
        Ok(())
    }
}

/// Treatment of boundary data inside Runge-Kutta stages. Boundary data is
/// always imposed exactly at the start and end of every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StageBoundary {
    /// Re-impose `g(t + c_i dt)` on every stage input.
    #[default]
    Nominal,
    /// Advance Dirichlet faces with the time derivative of `g`, so stage
    /// values are the same combinations the stepper forms for interior data.
    Integrated,
}

/// How faces next to a non-periodic boundary pick a stencil when the
/// family's own stencil would read data outside the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryClosure {
    /// Keep the design order: try same-order stencils of the same upwind
    /// sign, then same-order stencils of the opposite sign, then lower orders.
    SameOrder,
    /// Try same-order stencils of the same sign, then drop to lower orders
    /// of the same sign.
    #[default]
    LowerOrder,
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    name: String,
    /// `(is_average, offset, coeff)` in declaration order.
    terms: Vec<(bool, i32, f64)>,
    avg_range: (i32, i32),
    nodal_range: (i32, i32),
}

impl Compiled {
    pub(crate) fn new(s: &Stencil) -> Self {
        let terms = s
            .terms()
            .iter()
            .map(|t| (t.kind == TermKind::Average, t.offset, rational_to_f64(t.coeff)))
            .collect();
        Self {
            name: s.name().to_string(),
            terms,
            avg_range: s.extent(TermKind::Average).unwrap_or((1, 0)),
            nodal_range: s.extent(TermKind::Nodal).unwrap_or((1, 0)),
        }
    }

    /// Fewest cells on which the periodic wrap in [`Compiled::eval`] is valid.
    pub(crate) fn min_periodic_cells(&self) -> usize {
        let r = self
            .terms
            .iter()
            .map(|t| t.1.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        r + 2
    }

    fn fits(&self, face: usize, n: usize) -> bool {
        let k = face as i64;
        let (alo, ahi) = self.avg_range;
        let (nlo, nhi) = self.nodal_range;
        let avg_ok = alo > ahi || (k + alo as i64 >= 1 && k + ahi as i64 - 1 < n as i64);
        let nod_ok = nlo > nhi || (k + nlo as i64 >= 0 && k + nhi as i64 <= n as i64);
        avg_ok && nod_ok
    }

    #[inline]
    pub(crate) fn eval<const D: usize>(
        &self,
        avgs: &[[f64; D]],
        nods: &[[f64; D]],
        face: usize,
        periodic: bool,
        inv_h: f64,
    ) -> [f64; D] {
        let n = avgs.len() as i64;
        let k = face as i64;
        let mut acc = [0.0; D];
        // Stencils are narrower than the mesh, so one wrap suffices.
        let wrap = |i: i64| {
            if !periodic {
                i
            } else if i < 0 {
                i + n
            } else if i >= n {
                i - n
            } else {
                i
            }
        };
        for &(is_avg, off, c) in &self.terms {
            let v = if is_avg {
                &avgs[wrap(k + off as i64 - 1) as usize]
            } else {
                &nods[wrap(k + off as i64) as usize]
            };
            for d in 0..D {
                acc[d] += c * v[d];
            }
        }
        acc.map(|x| x * inv_h)
    }
}

/// Family of upwind stencils used by the scheme, plus the candidates used to
/// close it near boundaries.
#[derive(Debug, Clone)]
pub struct FdfvScheme {
    family: StencilFamily,
    closure: BoundaryClosure,
    /// Index 0 is the backward member, 1 the forward member.
    own: [Compiled; 2],
    candidates: [Vec<Compiled>; 2],
    neumann: [Stencil; 2],
}

impl FdfvScheme {
    pub fn new(stencil_name: &str, closure: BoundaryClosure) -> Result<Self, SolverError> {
        let family = StencilFamily::from_name(stencil_name)?;
        let p = family.order;
        let stable: Vec<Stencil> = catalog_all()
            .into_iter()
            .filter(|s| !s.name().starts_with("4th-backward") && !s.name().starts_with("4th-forward"))
            .collect();
        let order_of = |s: &Stencil| {
            s.analyze(crate::ddo::MAX_ANALYZED_ORDER)
                .map(|r| r.designed_order)
                .unwrap_or(0)
        };
        let sign_ok = |s: &Stencil, dir: Direction| s.direction() == dir;

        let mut candidates: [Vec<Compiled>; 2] = [Vec::new(), Vec::new()];
        for (slot, dir) in [(0, Direction::Backward), (1, Direction::Forward)] {
            let own = family.get(dir);
            let mut list: Vec<Compiled> = vec![Compiled::new(own)];
            let push = |s: &Stencil, list: &mut Vec<Compiled>| {
                if !list.iter().any(|c| c.name == s.name()) {
                    list.push(Compiled::new(s));
                }
            };
            for s in stable.iter().filter(|s| order_of(s) == p && sign_ok(s, dir)) {
                push(s, &mut list);
            }
            if closure == BoundaryClosure::SameOrder {
                for s in stable.iter().filter(|s| order_of(s) == p && !sign_ok(s, dir)) {
                    push(s, &mut list);
                }
            }
            for q in (1..p).rev() {
                for s in stable.iter().filter(|s| order_of(s) == q && sign_ok(s, dir)) {
                    push(s, &mut list);
                }
            }
            candidates[slot] = list;
        }
        let ordinal = ["1st", "2nd", "3rd", "4th"][p - 1];
        let neumann = [
            catalog(&format!("{ordinal}-forward"))?,
            catalog(&format!("{ordinal}-backward"))?,
        ];
        Ok(Self {
            own: [
                Compiled::new(family.get(Direction::Backward)),
                Compiled::new(family.get(Direction::Forward)),
            ],
            family,
            closure,
            candidates,
            neumann,
        })
    }

    pub fn family(&self) -> &StencilFamily {
        &self.family
    }

    pub fn closure(&self) -> BoundaryClosure {
        self.closure
    }

    /// Designed order of the operators; the scheme itself is one order higher.
    pub fn stencil_order(&self) -> usize {
        self.family.order
    }

    /// Names of the stencils used at each face, `(backward, forward)`, on an
    /// `n`-cell mesh with the given boundary kinds. `None` marks faces where
    /// the value is imposed by a boundary condition.
    pub fn face_plan<const D: usize>(
        &self,
        n: usize,
        bc: &BoundarySpec<D>,
    ) -> Vec<Option<(Option<String>, Option<String>)>> {
        let plan = FacePlan::build(self, n, bc);
        plan.faces
            .iter()
            .map(|f| {
                f.map(|[b, fw]| {
                    (
                        b.map(|i| plan.table[i].name.clone()),
                        fw.map(|i| plan.table[i].name.clone()),
                    )
                })
            })
            .collect()
    }
}

/// Stencil indices per face; `None` at faces whose value is imposed.
#[derive(Debug, Clone)]
struct FacePlan {
    table: Vec<Compiled>,
    faces: Vec<Option<[Option<usize>; 2]>>,
}

impl FacePlan {
    fn build<const D: usize>(scheme: &FdfvScheme, n: usize, bc: &BoundarySpec<D>) -> Self {
        let mut table: Vec<Compiled> = Vec::new();
        let index_of = |c: &Compiled, table: &mut Vec<Compiled>| -> usize {
            if let Some(i) = table.iter().position(|t| t.name == c.name) {
                i
            } else {
                table.push(c.clone());
                table.len() - 1
            }
        };
        let mut faces = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let imposed = (k == 0 && !matches!(bc.left, Boundary::Periodic))
                || (k == n && !matches!(bc.right, Boundary::Periodic));
            if imposed {
                faces.push(None);
                continue;
            }
            let mut pick = [None, None];
            for slot in 0..2 {
                let found = if bc.is_periodic() {
                    Some(&scheme.own[slot])
                } else {
                    scheme.candidates[slot].iter().find(|c| c.fits(k, n))
                };
                pick[slot] = found.map(|c| index_of(c, &mut table));
            }
            faces.push(Some(pick));
        }
        Self { table, faces }
    }
}

/// Assembled 1D FD-FV solver for one model, stencil family and boundary setup.
pub struct Solver1d<'m, M, const D: usize> {
    model: &'m M,
    scheme: FdfvScheme,
    bc: BoundarySpec<D>,
    plan: FacePlan,
    n: usize,
    stage_bc: StageBoundary,
}

impl<'m, M: FluxModel<D>, const D: usize> Solver1d<'m, M, D> {
    pub fn new(model: &'m M, scheme: FdfvScheme, bc: BoundarySpec<D>, n: usize) -> Result<Self, SolverError> {
        bc.validate()?;
        let min = if bc.is_periodic() {
            scheme
                .own
                .iter()
                .map(Compiled::min_periodic_cells)
                .max()
                .unwrap_or(2)
                .max(2)
        } else {
            2
        };
        if n < min {
            return Err(SolverError::Config(format!("need at least {min} cells, got {n}")));
        }
        let plan = FacePlan::build(&scheme, n, &bc);
        Ok(Self {
            model,
            scheme,
            bc,
            plan,
            n,
            stage_bc: StageBoundary::default(),
        })
    }

    pub fn with_stage_boundary(mut self, mode: StageBoundary) -> Self {
        self.stage_bc = mode;
        self
    }

    pub fn stage_boundary(&self) -> StageBoundary {
        self.stage_bc
    }

    /// Dirichlet faces advance with `dg/dt`, taken by a fourth-order
    /// central difference of the boundary data.
    fn boundary_rates(&self, rate: &mut MeshState<D>, t: f64) {
        for (face, b) in [(0usize, &self.bc.left), (self.n, &self.bc.right)] {
            if let Boundary::Dirichlet(g) = b {
                let d = 1e-4 * t.abs().max(1.0);
                let (p1, m1, p2, m2) = (g(t + d), g(t - d), g(t + 2.0 * d), g(t - 2.0 * d));
                for c in 0..D {
                    rate.nodals[face][c] = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * d);
                }
            }
        }
    }

    pub fn scheme(&self) -> &FdfvScheme {
        &self.scheme
    }

    pub fn boundary(&self) -> &BoundarySpec<D> {
        &self.bc
    }

    fn check_shape(&self, state: &MeshState<D>) -> Result<(), SolverError> {
        if state.averages.len() != self.n || state.nodals.len() != self.n + 1 {
            return Err(SolverError::Config(format!(
                "state has {} cells / {} faces, solver expects {} / {}",
                state.averages.len(),
                state.nodals.len(),
                self.n,
                self.n + 1
            )));
        }
        Ok(())
    }

    /// Imposes boundary data at time `t`: the periodic alias, Dirichlet
    /// values, or the face value that makes the one-sided derivative equal
    /// the prescribed gradient.
    pub fn apply_bc(&self, state: &mut MeshState<D>, t: f64) -> Result<(), SolverError> {
        self.impose(state, t, true)
    }

    fn impose(&self, state: &mut MeshState<D>, t: f64, dirichlet: bool) -> Result<(), SolverError> {
        let n = self.n;
        if self.bc.is_periodic() {
            state.nodals[n] = state.nodals[0];
            return Ok(());
        }
        for (side, bc) in [(0usize, &self.bc.left), (1usize, &self.bc.right)] {
            let face = if side == 0 { 0 } else { n };
            match bc {
                Boundary::Periodic => unreachable!("validated"),
                Boundary::Dirichlet(g) if dirichlet => state.nodals[face] = g(t),
                Boundary::Dirichlet(_) => {}
                Boundary::Neumann(g) => {
                    let s = &self.scheme.neumann[side];
                    let grad = g(t);
                    state.nodals[face] = solve_neumann(s, state, face, grad)?;
                }
            }
        }
        Ok(())
    }

    /// Time derivative of both kinds of unknowns. The boundary data are
    /// assumed to have been imposed already.
    pub fn rhs(&self, state: &MeshState<D>) -> Result<MeshState<D>, SolverError> {
        self.check_shape(state)?;
        let n = self.n;
        let periodic = self.bc.is_periodic();
        let inv_h = 1.0 / state.h;
        let mut rate = state.zeroed();

        let fluxes: Vec<[f64; D]> = state.nodals.iter().map(|w| self.model.flux(w)).collect();
        for i in 0..n {
            for c in 0..D {
                rate.averages[i][c] = -(fluxes[i + 1][c] - fluxes[i][c]) * inv_h;
            }
        }

        let last = if periodic { n } else { n + 1 };
        for k in 0..last {
            let Some(pick) = self.plan.faces[k] else { continue };
            let w = &state.nodals[k];
            let eig = self.model.eigen(w).map_err(|source| SolverError::Physics {
                location: format!("face {k} (x = {})", state.face_x(k)),
                source,
            })?;
            let needs_b = eig.values.iter().any(|&l| l >= 0.0);
            let needs_f = eig.values.iter().any(|&l| l < 0.0);
            let eval = |slot: usize| -> Result<[f64; D], SolverError> {
                let idx = pick[slot].ok_or(SolverError::Closure {
                    face: k,
                    dir: if slot == 0 {
                        Direction::Backward
                    } else {
                        Direction::Forward
                    },
                })?;
                Ok(self.plan.table[idx].eval(&state.averages, &state.nodals, k, periodic, inv_h))
            };
            let db = if needs_b { eval(0)? } else { [0.0; D] };
            let df = if needs_f { eval(1)? } else { [0.0; D] };
            let out = &mut rate.nodals[k];
            if D == 1 {
                let l = eig.values[0];
                out[0] = -l * if l >= 0.0 { db[0] } else { df[0] };
                continue;
            }
            for m in 0..D {
                let lam = eig.values[m];
                let d = if lam >= 0.0 { &db } else { &df };
                let proj: f64 = (0..D).map(|c| eig.left[m][c] * d[c]).sum();
                let s = lam * proj;
                for c in 0..D {
                    out[c] -= eig.right[c][m] * s;
                }
            }
        }
        if periodic {
            rate.nodals[n] = rate.nodals[0];
        }
        Ok(rate)
    }

    /// Largest characteristic speed over all face values.
    pub fn max_speed(&self, state: &MeshState<D>) -> Result<f64, SolverError> {
        let mut s: f64 = 0.0;
        for (k, w) in state.nodals.iter().enumerate() {
            let v = self.model.max_speed(w).map_err(|source| SolverError::Physics {
                location: format!("face {k}"),
                source,
            })?;
            s = s.max(v);
        }
        Ok(s)
    }

    /// Advances `state` to `opts.t_final`. Snapshots are copies of the state
    /// at the requested times, which the step size is clipped to hit exactly.
    pub fn run(&self, state: MeshState<D>, rk: &RkScheme, opts: &RunOptions) -> Result<RunOutput<D>, SolverError> {
        self.check_shape(&state)?;
        let out = march(
            rk,
            state,
            &opts.schedule(),
            |s| match opts.step {
                TimeStep::Cfl(cfl) => Ok(cfl * s.h / self.max_speed(s)?),
                TimeStep::FixedRatio(r) => Ok(r * s.h),
            },
            |s| {
                let t = s.time;
                self.apply_bc(s, t)
            },
            |t, s| {
                self.impose(s, t, self.stage_bc == StageBoundary::Nominal)?;
                let mut r = self.rhs(s)?;
                if self.stage_bc == StageBoundary::Integrated {
                    self.boundary_rates(&mut r, t);
                }
                Ok(r)
            },
        )
        .map_err(SolverError::from_march)?;
        Ok(RunOutput {
            state: out.state,
            snapshots: out.snapshots,
            steps: out.steps,
        })
    }
}

fn solve_neumann<const D: usize>(
    s: &Stencil,
    state: &MeshState<D>,
    face: usize,
    grad: [f64; D],
) -> Result<[f64; D], SolverError> {
    let beta0 = rational_to_f64(s.beta_at(0));
    if beta0 == 0.0 {
        return Err(SolverError::IllPosedNeumann(s.name().to_string()));
    }
    let n = state.n_cells();
    let c = Compiled::new(s);
    if !c.fits(face, n) {
        return Err(SolverError::Closure {
            face,
            dir: s.direction(),
        });
    }
    let mut out = [0.0; D];
    for d in 0..D {
        let mut rest = 0.0;
        for &(is_avg, off, coeff) in &c.terms {
            if !is_avg && off == 0 {
                continue;
            }
            let v = if is_avg {
                state.averages[(face as i64 + off as i64 - 1) as usize][d]
            } else {
                state.nodals[(face as i64 + off as i64) as usize][d]
            };
            rest += coeff * v;
        }
        out[d] = (state.h * grad[d] - rest) / beta0;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `dt = cfl * h / max |lambda|`, re-evaluated every step.
    Cfl(f64),
    /// `dt = ratio * h`.
    FixedRatio(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub t_final: f64,
    pub step: TimeStep,
    pub max_steps: usize,
    pub snapshots: Vec<f64>,
}

impl RunOptions {
    pub fn schedule(&self) -> Schedule {
        Schedule {
            t_final: self.t_final,
            snapshots: self.snapshots.clone(),
            max_steps: self.max_steps,
        }
    }

    pub fn fixed_ratio(t_final: f64, ratio: f64) -> Self {
        Self {
            step: TimeStep::FixedRatio(ratio),
            ..Self::cfl(t_final, 1.0)
        }
    }

    pub fn cfl(t_final: f64, cfl: f64) -> Self {
        Self {
            t_final,
            step: TimeStep::Cfl(cfl),
            max_steps: 50_000_000,
            snapshots: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput<const D: usize> {
    pub state: MeshState<D>,
    pub snapshots: Vec<MeshState<D>>,
    pub steps: usize,
}

pub type InitialFn<const D: usize> = Arc<dyn Fn(f64) -> [f64; D] + Send + Sync>;

/// Initial data with the points where it is discontinuous (or not smooth).
/// At a breakpoint the function should return the right-hand state.
#[derive(Clone)]
pub struct InitialCondition<const D: usize> {
    pub func: InitialFn<D>,
    pub breakpoints: Vec<f64>,
}

impl<const D: usize> InitialCondition<D> {
    pub fn smooth(f: impl Fn(f64) -> [f64; D] + Send + Sync + 'static) -> Self {
        Self {
            func: Arc::new(f),
            breakpoints: Vec::new(),
        }
    }

    pub fn piecewise(f: impl Fn(f64) -> [f64; D] + Send + Sync + 'static, breakpoints: Vec<f64>) -> Self {
        Self {
            func: Arc::new(f),
            breakpoints,
        }
    }
}

impl<const D: usize> fmt::Debug for InitialCondition<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialCondition")
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Mean of `f` over `[a, b]` with `npts` Gauss points on every piece between
/// breakpoints.
pub fn cell_average<const D: usize>(
    f: &dyn Fn(f64) -> [f64; D],
    a: f64,
    b: f64,
    breakpoints: &[f64],
    npts: usize,
) -> [f64; D] {
    let (xs, ws) = gauss_legendre(npts);
    let mut cuts = vec![a];
    cuts.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    cuts.sort_by(f64::total_cmp);
    cuts.push(b);
    // Accumulating deviations from one sample keeps constant data exact.
    let base = f(0.5 * (cuts[0] + cuts[1]));
    let mut acc = [0.0; D];
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in xs.iter().zip(&ws) {
            let v = f(mid + half * x);
            for c in 0..D {
                acc[c] += w * half * (v[c] - base[c]);
            }
        }
    }
    std::array::from_fn(|c| base[c] + acc[c] / (b - a))
}

/// Gauss points per cell for `p`-th order accurate initial averages.
pub fn quadrature_points(p: usize) -> usize {
    p.div_ceil(2) + 1
}

/// Face values sampled from `ic`, cell averages by quadrature accurate to
/// order `scheme_order`.
pub fn initialize<const D: usize>(
    x_left: f64,
    x_right: f64,
    n: usize,
    ic: &InitialCondition<D>,
    scheme_order: usize,
) -> MeshState<D> {
    let mut s = MeshState::zeros(x_left, x_right, n);
    let npts = quadrature_points(scheme_order);
    for k in 0..=n {
        s.nodals[k] = (ic.func)(s.face_x(k));
    }
    for i in 0..n {
        s.averages[i] = cell_average(&*ic.func, s.face_x(i), s.face_x(i + 1), &ic.breakpoints, npts);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::Advection;

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..=8 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn constant_state_has_zero_rate() {
        let m = Advection { c: 2.0 };
        let scheme = FdfvScheme::new("3rd-backward", BoundaryClosure::default()).unwrap();
        let solver = Solver1d::new(&m, scheme, BoundarySpec::periodic(), 10).unwrap();
        let ic = InitialCondition::smooth(|_| [5.0]);
        let s = initialize(-1.0, 1.0, 10, &ic, 4);
        let r = solver.rhs(&s).unwrap();
        assert!(r.averages.iter().chain(&r.nodals).all(|v| v[0] == 0.0));
    }

    #[test]
    fn mismatched_periodicity_rejected() {
        let bc = BoundarySpec::<1> {
            left: Boundary::Periodic,
            right: Boundary::dirichlet_const([1.0]),
        };
        assert!(bc.validate().is_err());
    }

    #[test]
    fn closure_plan_near_boundary() {
        let bc = BoundarySpec::dirichlet_const([1.0], [1.0]);
        let low = FdfvScheme::new("4th-B-biased", BoundaryClosure::LowerOrder).unwrap();
        let plan = low.face_plan(10, &bc);
        assert!(plan[0].is_none() && plan[10].is_none());
        assert_eq!(plan[1].as_ref().unwrap().0.as_deref(), Some("3rd-B-biased"));
        assert_eq!(plan[2].as_ref().unwrap().0.as_deref(), Some("4th-B-biased"));
        assert_eq!(plan[9].as_ref().unwrap().1.as_deref(), Some("3rd-F-biased"));
        let same = FdfvScheme::new("4th-B-biased", BoundaryClosure::SameOrder).unwrap();
        let plan = same.face_plan(10, &bc);
        assert_eq!(plan[1].as_ref().unwrap().0.as_deref(), Some("4th-F-biased"));
        let third = FdfvScheme::new("3rd-backward", BoundaryClosure::SameOrder).unwrap();
        let plan = third.face_plan(10, &bc);
        assert_eq!(plan[1].as_ref().unwrap().0.as_deref(), Some("3rd-B-biased"));
    }

    #[test]
    fn neumann_value_solves_one_sided_derivative() {
        let m = Advection { c: 1.0 };
        let scheme = FdfvScheme::new("3rd-backward", BoundaryClosure::default()).unwrap();
        let g: BoundaryFn<1> = Arc::new(|_| [0.7]);
        let bc = BoundarySpec {
            left: Boundary::Neumann(g),
            right: Boundary::dirichlet_const([0.0]),
        };
        let solver = Solver1d::new(&m, scheme, bc, 8).unwrap();
        let mut s = initialize(0.0, 1.0, 8, &InitialCondition::smooth(|x| [x.sin()]), 4);
        solver.apply_bc(&mut s, 0.0).unwrap();
        let h = s.h;
        let expect = (s.averages[1][0] - 8.0 * s.nodals[1][0] + 17.0 * s.averages[0][0] - 2.0 * h * 0.7) / 10.0;
        assert!((s.nodals[0][0] - expect).abs() < 1e-14);
    }
}
