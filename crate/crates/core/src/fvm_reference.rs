//! Second-order finite-volume baseline: MUSCL reconstruction, Roe flux,
//! optional van Albada limiting. Cell averages are the only unknowns.
//!
//! Slopes are taken in conserved variables by default, or optionally in the
//! model's reconstruction variables (primitive variables for Euler). In 2D the
//! scheme is applied dimension by dimension on a periodic grid.

use std::str::FromStr;

use crate::physics::{Eigen, FluxModel, FluxModel2D};
use crate::solver1d::{cell_average, Boundary, BoundarySpec, InitialCondition, SolverError, TimeStep};
use crate::solver2d::cell_average_2d;
use crate::time_integration::{march, OdeState, RkScheme, Schedule, Timed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Limiter {
    /// Unlimited central slopes.
    #[default]
    None,
    VanAlbada,
}

impl FromStr for Limiter {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Limiter::None),
            "van-albada" => Ok(Limiter::VanAlbada),
            _ => Err(SolverError::Config(format!("unknown limiter `{s}`"))),
        }
    }
}

impl Limiter {
    pub fn name(&self) -> &'static str {
        match self {
            Limiter::None => "none",
            Limiter::VanAlbada => "van-albada",
        }
    }

    /// Slope from the backward and forward differences `a`, `b`.
    #[inline]
    pub fn slope(&self, a: f64, b: f64) -> f64 {
        match self {
            Limiter::None => 0.5 * (a + b),
            Limiter::VanAlbada => {
                let ab = a * b;
                if ab <= 0.0 {
                    0.0
                } else {
                    ab * (a + b) / (a * a + b * b)
                }
            }
        }
    }
}

/// Variable set that slopes are computed and limited in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reconstruction {
    #[default]
    Conserved,
    /// The model's reconstruction variables (primitive variables for Euler).
    Primitive,
}

impl FromStr for Reconstruction {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conserved" => Ok(Reconstruction::Conserved),
            "primitive" => Ok(Reconstruction::Primitive),
            _ => Err(SolverError::Config(format!("unknown reconstruction variables `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FvmOptions {
    pub limiter: Limiter,
    pub variables: Reconstruction,
    /// Harten's entropy fix on the Roe speeds, off by default.
    pub entropy_fix: bool,
}

/// Cell averages on a uniform 1D mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FvState<const D: usize> {
    pub x_left: f64,
    pub h: f64,
    pub averages: Vec<[f64; D]>,
    pub time: f64,
}

impl<const D: usize> FvState<D> {
    pub fn n_cells(&self) -> usize {
        self.averages.len()
    }

    pub fn face_x(&self, k: usize) -> f64 {
        let n = self.n_cells() as f64;
        self.x_left + self.h * n * k as f64 / n
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        0.5 * (self.face_x(i) + self.face_x(i + 1))
    }

    pub fn total(&self) -> [f64; D] {
        let mut s = [0.0; D];
        for a in &self.averages {
            for c in 0..D {
                s[c] += a[c];
            }
        }
        s.map(|v| v * self.h)
    }

    pub fn dof(&self) -> usize {
        self.averages.len() * D
    }
}

impl<const D: usize> OdeState for FvState<D> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.averages.axpy(a, &x.averages);
    }
    fn all_finite(&self) -> bool {
        self.averages.all_finite()
    }
}

impl<const D: usize> Timed for FvState<D> {
    fn time(&self) -> f64 {
        self.time
    }
    fn set_time(&mut self, t: f64) {
        self.time = t;
    }
}

/// Cell averages of `ic` with two Gauss points per smooth piece.
pub fn initialize_fv<const D: usize>(x_left: f64, x_right: f64, n: usize, ic: &InitialCondition<D>) -> FvState<D> {
    let h = (x_right - x_left) / n as f64;
    let face = |k: usize| x_left + (x_right - x_left) * k as f64 / n as f64;
    FvState {
        x_left,
        h,
        averages: (0..n)
            .map(|i| cell_average(&*ic.func, face(i), face(i + 1), &ic.breakpoints, 2))
            .collect(),
        time: 0.0,
    }
}

#[inline]
fn apply_abs<const D: usize>(e: &Eigen<D>, jump: &[f64; D], fix: bool) -> [f64; D] {
    let delta = if fix { 0.1 * e.spectral_radius() } else { 0.0 };
    let mut out = [0.0; D];
    for m in 0..D {
        let mut proj = 0.0;
        for c in 0..D {
            proj += e.left[m][c] * jump[c];
        }
        let lam = e.values[m].abs();
        let lam = if lam < delta {
            0.5 * (lam * lam + delta * delta) / delta
        } else {
            lam
        };
        let s = lam * proj;
        for c in 0..D {
            out[c] += e.right[c][m] * s;
        }
    }
    out
}

/// Roe flux `(f(l) + f(r))/2 - R |Lambda| L (r - l) / 2`.
#[inline]
fn roe_flux<const D: usize>(
    fl: [f64; D],
    fr: [f64; D],
    e: &Eigen<D>,
    l: &[f64; D],
    r: &[f64; D],
    fix: bool,
) -> [f64; D] {
    let jump: [f64; D] = std::array::from_fn(|c| r[c] - l[c]);
    let diss = apply_abs(e, &jump, fix);
    std::array::from_fn(|c| 0.5 * (fl[c] + fr[c] - diss[c]))
}

type RoeFn<'a, const D: usize> = dyn Fn(&[f64; D], &[f64; D]) -> Result<Eigen<D>, crate::physics::PhysicsError> + 'a;

/// Computes interface fluxes along a line of `n` cells from `q`, which holds
/// reconstruction variables with two ghost cells on each side. Writes the
/// `n + 1` fluxes into `out`.
#[allow(clippy::too_many_arguments)]
fn line_fluxes<const D: usize>(
    q: &[[f64; D]],
    n: usize,
    limiter: Limiter,
    fix: bool,
    to_cons: &dyn Fn(&[f64; D]) -> [f64; D],
    flux: &dyn Fn(&[f64; D]) -> [f64; D],
    roe: &RoeFn<'_, D>,
    slopes: &mut Vec<[f64; D]>,
    out: &mut [[f64; D]],
) -> Result<(), (usize, crate::physics::PhysicsError)> {
    // slopes for extended cells 1..=n+2
    slopes.clear();
    slopes.resize(n + 4, [0.0; D]);
    for i in 1..n + 3 {
        let (a, b, c) = (&q[i - 1], &q[i], &q[i + 1]);
        slopes[i] = std::array::from_fn(|d| limiter.slope(b[d] - a[d], c[d] - b[d]));
    }
    for k in 0..=n {
        // face k sits between extended cells k+1 and k+2
        let (i, j) = (k + 1, k + 2);
        let ql: [f64; D] = std::array::from_fn(|d| q[i][d] + 0.5 * slopes[i][d]);
        let qr: [f64; D] = std::array::from_fn(|d| q[j][d] - 0.5 * slopes[j][d]);
        let wl = to_cons(&ql);
        let wr = to_cons(&qr);
        let e = roe(&wl, &wr).map_err(|err| (k, err))?;
        out[k] = roe_flux(flux(&wl), flux(&wr), &e, &wl, &wr, fix);
    }
    Ok(())
}

/// 1D MUSCL-Roe solver.
pub struct Fvm1d<'m, M, const D: usize> {
    model: &'m M,
    bc: BoundarySpec<D>,
    opts: FvmOptions,
}

impl<'m, M: FluxModel<D>, const D: usize> Fvm1d<'m, M, D> {
    pub fn new(model: &'m M, bc: BoundarySpec<D>, opts: FvmOptions) -> Result<Self, SolverError> {
        bc.validate()?;
        Ok(Self { model, bc, opts })
    }

    fn ghost(&self, b: &Boundary<D>, inner: &[f64; D], k: f64, sign: f64, h: f64, t: f64) -> [f64; D] {
        match b {
            Boundary::Periodic => unreachable!(),
            Boundary::Dirichlet(g) => g(t),
            Boundary::Neumann(g) => {
                let grad = g(t);
                std::array::from_fn(|c| inner[c] + sign * k * h * grad[c])
            }
        }
    }

    pub fn rhs(&self, s: &FvState<D>) -> Result<FvState<D>, SolverError> {
        let n = s.n_cells();
        if n < 2 {
            return Err(SolverError::Config("at least two cells are required".into()));
        }
        let t = s.time;
        let mut ext = Vec::with_capacity(n + 4);
        if self.bc.is_periodic() {
            ext.push(s.averages[n - 2]);
            ext.push(s.averages[n - 1]);
            ext.extend_from_slice(&s.averages);
            ext.push(s.averages[0]);
            ext.push(s.averages[1]);
        } else {
            let (first, last) = (&s.averages[0], &s.averages[n - 1]);
            ext.push(self.ghost(&self.bc.left, first, 2.0, -1.0, s.h, t));
            ext.push(self.ghost(&self.bc.left, first, 1.0, -1.0, s.h, t));
            ext.extend_from_slice(&s.averages);
            ext.push(self.ghost(&self.bc.right, last, 1.0, 1.0, s.h, t));
            ext.push(self.ghost(&self.bc.right, last, 2.0, 1.0, s.h, t));
        }
        for (i, w) in ext.iter_mut().enumerate() {
            self.model.check(w).map_err(|source| SolverError::Physics {
                location: format!("cell {}", i as i64 - 2),
                source,
            })?;
            if self.opts.variables == Reconstruction::Primitive {
                *w = self.model.to_reconstruction(w);
            }
        }
        let prim = self.opts.variables == Reconstruction::Primitive;
        let mut fluxes = vec![[0.0; D]; n + 1];
        let mut slopes = Vec::new();
        line_fluxes(
            &ext,
            n,
            self.opts.limiter,
            self.opts.entropy_fix,
            &|q| if prim { self.model.from_reconstruction(q) } else { *q },
            &|w| self.model.flux(w),
            &|l, r| self.model.roe_eigen(l, r),
            &mut slopes,
            &mut fluxes,
        )
        .map_err(|(k, source)| SolverError::Physics {
            location: format!("interface {k}"),
            source,
        })?;
        let inv_h = 1.0 / s.h;
        let averages = (0..n)
            .map(|i| std::array::from_fn(|c| -(fluxes[i + 1][c] - fluxes[i][c]) * inv_h))
            .collect();
        Ok(FvState {
            x_left: s.x_left,
            h: s.h,
            averages,
            time: s.time,
        })
    }

    pub fn max_speed(&self, s: &FvState<D>) -> Result<f64, SolverError> {
        let mut m: f64 = 0.0;
        for (i, w) in s.averages.iter().enumerate() {
            let v = self.model.max_speed(w).map_err(|source| SolverError::Physics {
                location: format!("cell {i}"),
                source,
            })?;
            m = m.max(v);
        }
        Ok(m)
    }

    pub fn run(
        &self,
        state: FvState<D>,
        rk: &RkScheme,
        schedule: &Schedule,
        step: TimeStep,
    ) -> Result<FvState<D>, SolverError> {
        Ok(self.run_with_snapshots(state, rk, schedule, step)?.0)
    }

    pub fn run_with_snapshots(
        &self,
        state: FvState<D>,
        rk: &RkScheme,
        schedule: &Schedule,
        step: TimeStep,
    ) -> Result<(FvState<D>, Vec<FvState<D>>, usize), SolverError> {
        let out = march(
            rk,
            state,
            schedule,
            |s| match step {
                TimeStep::Cfl(cfl) => Ok(cfl * s.h / self.max_speed(s)?),
                TimeStep::FixedRatio(r) => Ok(r * s.h),
            },
            |_| Ok(()),
            |_, s| self.rhs(s),
        )
        .map_err(SolverError::from_march)?;
        Ok((out.state, out.snapshots, out.steps))
    }
}

/// Cell averages on a periodic `nx x ny` grid, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct FvState2D<const D: usize> {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub averages: Vec<[f64; D]>,
    pub time: f64,
}

impl<const D: usize> FvState2D<D> {
    pub fn total(&self) -> [f64; D] {
        let mut s = [0.0; D];
        for a in &self.averages {
            for c in 0..D {
                s[c] += a[c];
            }
        }
        s.map(|v| v * self.hx * self.hy)
    }

    pub fn dof(&self) -> usize {
        self.averages.len() * D
    }
}

impl<const D: usize> OdeState for FvState2D<D> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.averages.axpy(a, &x.averages);
    }
    fn all_finite(&self) -> bool {
        self.averages.all_finite()
    }
}

impl<const D: usize> Timed for FvState2D<D> {
    fn time(&self) -> f64 {
        self.time
    }
    fn set_time(&mut self, t: f64) {
        self.time = t;
    }
}

pub fn initialize_fv_2d<const D: usize>(
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
    ic: &dyn Fn(f64, f64) -> [f64; D],
    npts: usize,
) -> FvState2D<D> {
    let xf = |i: usize| x_range.0 + (x_range.1 - x_range.0) * i as f64 / nx as f64;
    let yf = |j: usize| y_range.0 + (y_range.1 - y_range.0) * j as f64 / ny as f64;
    let mut averages = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            averages.push(cell_average_2d(ic, (xf(i), xf(i + 1)), (yf(j), yf(j + 1)), npts));
        }
    }
    FvState2D {
        nx,
        ny,
        x0: x_range.0,
        y0: y_range.0,
        hx: (x_range.1 - x_range.0) / nx as f64,
        hy: (y_range.1 - y_range.0) / ny as f64,
        averages,
        time: 0.0,
    }
}

/// Periodic 2D MUSCL-Roe solver.
pub struct Fvm2d<'m, M, const D: usize> {
    model: &'m M,
    opts: FvmOptions,
}

impl<'m, M: FluxModel2D<D>, const D: usize> Fvm2d<'m, M, D> {
    pub fn new(model: &'m M, opts: FvmOptions) -> Self {
        Self { model, opts }
    }

    pub fn rhs(&self, s: &FvState2D<D>) -> Result<FvState2D<D>, SolverError> {
        let (nx, ny) = (s.nx, s.ny);
        if nx < 2 || ny < 2 {
            return Err(SolverError::Config(format!("grid {nx}x{ny} is too small")));
        }
        let prim = self.opts.variables == Reconstruction::Primitive;
        let mut q = Vec::with_capacity(s.averages.len());
        for (k, w) in s.averages.iter().enumerate() {
            self.model.check(w).map_err(|source| SolverError::Physics {
                location: format!("cell ({}, {})", k % nx, k / nx),
                source,
            })?;
            q.push(if prim { self.model.to_reconstruction(w) } else { *w });
        }
        let mut rate = vec![[0.0; D]; nx * ny];
        let mut line = Vec::with_capacity(nx.max(ny) + 4);
        let mut fl = vec![[0.0; D]; nx.max(ny) + 1];
        let mut slopes = Vec::new();
        let to_cons = |q: &[f64; D]| if prim { self.model.from_reconstruction(q) } else { *q };
        let fix = self.opts.entropy_fix;

        let (ihx, ihy) = (1.0 / s.hx, 1.0 / s.hy);
        for j in 0..ny {
            line.clear();
            for i in (0..nx + 4).map(|i| (i + 2 * nx - 2) % nx) {
                line.push(q[j * nx + i]);
            }
            line_fluxes(
                &line,
                nx,
                self.opts.limiter,
                fix,
                &to_cons,
                &|w| self.model.flux(w),
                &|l, r| self.model.roe_eigen(l, r),
                &mut slopes,
                &mut fl,
            )
            .map_err(|(k, source)| SolverError::Physics {
                location: format!("x interface {k} of row {j}"),
                source,
            })?;
            for i in 0..nx {
                for c in 0..D {
                    rate[j * nx + i][c] -= (fl[i + 1][c] - fl[i][c]) * ihx;
                }
            }
        }
        for i in 0..nx {
            line.clear();
            for j in (0..ny + 4).map(|j| (j + 2 * ny - 2) % ny) {
                line.push(q[j * nx + i]);
            }
            line_fluxes(
                &line,
                ny,
                self.opts.limiter,
                fix,
                &to_cons,
                &|w| self.model.flux_y(w),
                &|l, r| self.model.roe_eigen_y(l, r),
                &mut slopes,
                &mut fl,
            )
            .map_err(|(k, source)| SolverError::Physics {
                location: format!("y interface {k} of column {i}"),
                source,
            })?;
            for j in 0..ny {
                for c in 0..D {
                    rate[j * nx + i][c] -= (fl[j + 1][c] - fl[j][c]) * ihy;
                }
            }
        }
        Ok(FvState2D {
            averages: rate,
            ..s.clone_meta()
        })
    }

    pub fn max_speed(&self, s: &FvState2D<D>) -> Result<f64, SolverError> {
        let mut m: f64 = 0.0;
        for (k, w) in s.averages.iter().enumerate() {
            let v = self.model.max_speed(w).map_err(|source| SolverError::Physics {
                location: format!("cell {k}"),
                source,
            })?;
            m = m.max(v);
        }
        Ok(m)
    }

    pub fn run(
        &self,
        state: FvState2D<D>,
        rk: &RkScheme,
        t_final: f64,
        step: TimeStep,
    ) -> Result<FvState2D<D>, SolverError> {
        Ok(self.run_counted(state, rk, t_final, step, 50_000_000)?.0)
    }

    pub fn run_counted(
        &self,
        state: FvState2D<D>,
        rk: &RkScheme,
        t_final: f64,
        step: TimeStep,
        max_steps: usize,
    ) -> Result<(FvState2D<D>, usize), SolverError> {
        let schedule = Schedule {
            t_final,
            snapshots: Vec::new(),
            max_steps,
        };
        let out = march(
            rk,
            state,
            &schedule,
            |s| {
                let h = s.hx.min(s.hy);
                match step {
                    TimeStep::Cfl(cfl) => Ok(cfl * h / self.max_speed(s)?),
                    TimeStep::FixedRatio(r) => Ok(r * h),
                }
            },
            |_| Ok(()),
            |_, s| self.rhs(s),
        )
        .map_err(SolverError::from_march)?;
        Ok((out.state, out.steps))
    }
}

impl<const D: usize> FvState2D<D> {
    fn clone_meta(&self) -> Self {
        Self {
            averages: Vec::new(),
            ..*self
        }
    }
}
