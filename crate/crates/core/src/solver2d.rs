//! Two-dimensional FD-FV scheme on a periodic Cartesian grid.
//!
//! Unknowns are cell averages, x-face values at `(x_{i+1/2}, y_j)` and y-face
//! values at `(x_i, y_{j+1/2})`. Averages are updated by edge-center fluxes.
//! An x-face value follows `w_t = -J [D_x w] - K [D~_y w]`: the normal
//! derivative uses the 1D stencil along the row, the tangential one a
//! first-order one-sided difference of neighbouring x-face values. Both are
//! upwinded characteristic by characteristic. y-faces are symmetric.

use crate::physics::{Eigen, FluxModel2D};
use crate::solver1d::{BoundaryClosure, Compiled, FdfvScheme, SolverError, TimeStep};
use crate::time_integration::{march, OdeState, RkScheme, Schedule, Timed};

/// Grid data. Averages and y-faces are stored row by row (`j * nx + i`),
/// x-faces as `j * (nx + 1) + i`. Face `nx` (resp. row `ny`) aliases face 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshState2D<const D: usize> {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub averages: Vec<[f64; D]>,
    pub xfaces: Vec<[f64; D]>,
    pub yfaces: Vec<[f64; D]>,
    pub time: f64,
}

impl<const D: usize> MeshState2D<D> {
    pub fn zeros(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            x0: x_range.0,
            y0: y_range.0,
            hx: (x_range.1 - x_range.0) / nx as f64,
            hy: (y_range.1 - y_range.0) / ny as f64,
            averages: vec![[0.0; D]; nx * ny],
            xfaces: vec![[0.0; D]; (nx + 1) * ny],
            yfaces: vec![[0.0; D]; nx * (ny + 1)],
            time: 0.0,
        }
    }

    pub fn x_face(&self, i: usize) -> f64 {
        self.x0 + self.hx * self.nx as f64 * i as f64 / self.nx as f64
    }

    pub fn y_face(&self, j: usize) -> f64 {
        self.y0 + self.hy * self.ny as f64 * j as f64 / self.ny as f64
    }

    pub fn x_center(&self, i: usize) -> f64 {
        0.5 * (self.x_face(i) + self.x_face(i + 1))
    }

    pub fn y_center(&self, j: usize) -> f64 {
        0.5 * (self.y_face(j) + self.y_face(j + 1))
    }

    pub fn avg(&self, i: usize, j: usize) -> &[f64; D] {
        &self.averages[j * self.nx + i]
    }

    pub fn xface(&self, i: usize, j: usize) -> &[f64; D] {
        &self.xfaces[j * (self.nx + 1) + i]
    }

    pub fn yface(&self, i: usize, j: usize) -> &[f64; D] {
        &self.yfaces[j * self.nx + i]
    }

    /// `sum ubar * hx * hy` per component.
    pub fn total(&self) -> [f64; D] {
        let mut s = [0.0; D];
        for a in &self.averages {
            for c in 0..D {
                s[c] += a[c];
            }
        }
        s.map(|v| v * self.hx * self.hy)
    }

    /// Unknowns counted as stored: averages plus both face families.
    pub fn dof(&self) -> usize {
        (self.averages.len() + self.xfaces.len() + self.yfaces.len()) * D
    }

    fn zeroed(&self) -> Self {
        Self {
            averages: vec![[0.0; D]; self.averages.len()],
            xfaces: vec![[0.0; D]; self.xfaces.len()],
            yfaces: vec![[0.0; D]; self.yfaces.len()],
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            x0: self.x0,
            y0: self.y0,
            hx: self.hx,
            hy: self.hy,
            averages: Vec::new(),
            xfaces: Vec::new(),
            yfaces: Vec::new(),
            time: self.time,
        }
    }

    /// Restores the periodic aliases `x-face nx == x-face 0` and
    /// `y-face row ny == row 0`.
    pub fn sync_periodic(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            self.xfaces[j * (nx + 1) + nx] = self.xfaces[j * (nx + 1)];
        }
        for i in 0..nx {
            self.yfaces[ny * nx + i] = self.yfaces[i];
        }
    }
}

impl<const D: usize> OdeState for MeshState2D<D> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.averages.axpy(a, &x.averages);
        self.xfaces.axpy(a, &x.xfaces);
        self.yfaces.axpy(a, &x.yfaces);
    }

    fn all_finite(&self) -> bool {
        self.averages.all_finite() && self.xfaces.all_finite() && self.yfaces.all_finite()
    }
}

impl<const D: usize> Timed for MeshState2D<D> {
    fn time(&self) -> f64 {
        self.time
    }
    fn set_time(&mut self, t: f64) {
        self.time = t;
    }
}

/// Adds `-R diag(lambda) L d` to `out`, with `d = back` for non-negative
/// speeds and `d = fwd` otherwise.
#[inline]
fn upwind_into<const D: usize>(out: &mut [f64; D], e: &Eigen<D>, back: &[f64; D], fwd: &[f64; D]) {
    for m in 0..D {
        let lam = e.values[m];
        let d = if lam >= 0.0 { back } else { fwd };
        let mut proj = 0.0;
        for c in 0..D {
            proj += e.left[m][c] * d[c];
        }
        let s = lam * proj;
        for c in 0..D {
            out[c] -= e.right[c][m] * s;
        }
    }
}

#[cold]
fn face_error(what: &str, i: usize, j: usize, source: crate::physics::PhysicsError) -> SolverError {
    SolverError::Physics {
        location: format!("{what} ({i}, {j})"),
        source,
    }
}

#[inline]
fn diff<const D: usize>(a: &[f64; D], b: &[f64; D], inv_h: f64) -> [f64; D] {
    std::array::from_fn(|c| (a[c] - b[c]) * inv_h)
}

/// Periodic 2D FD-FV solver for the first-order stencil family.
pub struct Solver2d<'m, M, const D: usize> {
    model: &'m M,
    back: Compiled,
    fwd: Compiled,
    nx: usize,
    ny: usize,
}

impl<'m, M: FluxModel2D<D>, const D: usize> Solver2d<'m, M, D> {
    pub fn new(model: &'m M, stencil: &str, nx: usize, ny: usize) -> Result<Self, SolverError> {
        let scheme = FdfvScheme::new(stencil, BoundaryClosure::default())?;
        if scheme.stencil_order() != 1 {
            return Err(SolverError::Config(format!(
                "the 2D scheme supports only the first-order stencil family, got `{stencil}`"
            )));
        }
        let fam = scheme.family();
        let (back, fwd) = (Compiled::new(&fam.backward), Compiled::new(&fam.forward));
        let min = back.min_periodic_cells().max(fwd.min_periodic_cells()).max(2);
        if nx < min || ny < min {
            return Err(SolverError::Config(format!("grid {nx}x{ny} is too small")));
        }
        Ok(Self {
            model,
            back,
            fwd,
            nx,
            ny,
        })
    }

    #[inline(always)]
    fn eig(&self, w: &[f64; D], what: &str, i: usize, j: usize) -> Result<(Eigen<D>, Eigen<D>), SolverError> {
        match self.model.eigen_xy(w) {
            Ok(e) => Ok(e),
            Err(source) => Err(face_error(what, i, j, source)),
        }
    }

    pub fn rhs(&self, s: &MeshState2D<D>) -> Result<MeshState2D<D>, SolverError> {
        let (nx, ny) = (self.nx, self.ny);
        if s.nx != nx || s.ny != ny {
            return Err(SolverError::Config(format!(
                "state grid {}x{} does not match solver grid {nx}x{ny}",
                s.nx, s.ny
            )));
        }
        let (ihx, ihy) = (1.0 / s.hx, 1.0 / s.hy);
        let mut rate = s.zeroed();

        let fx: Vec<[f64; D]> = s.xfaces.iter().map(|w| self.model.flux(w)).collect();
        let gy: Vec<[f64; D]> = s.yfaces.iter().map(|w| self.model.flux_y(w)).collect();
        for j in 0..ny {
            for i in 0..nx {
                let (l, r) = (&fx[j * (nx + 1) + i], &fx[j * (nx + 1) + i + 1]);
                let (b, t) = (&gy[j * nx + i], &gy[(j + 1) * nx + i]);
                let out = &mut rate.averages[j * nx + i];
                for c in 0..D {
                    out[c] = -(r[c] - l[c]) * ihx - (t[c] - b[c]) * ihy;
                }
            }
        }

        // x-faces: rows of averages and x-face values are contiguous.
        for j in 0..ny {
            let avg_row = &s.averages[j * nx..(j + 1) * nx];
            let face_row = &s.xfaces[j * (nx + 1)..(j + 1) * (nx + 1)];
            let (jm, jp) = ((j + ny - 1) % ny, (j + 1) % ny);
            for i in 0..nx {
                let w = &face_row[i];
                let (ej, ek) = self.eig(w, "x-face", i, j)?;
                let db = self.back.eval(avg_row, face_row, i, true, ihx);
                let df = self.fwd.eval(avg_row, face_row, i, true, ihx);
                let below = s.xface(i, jm);
                let above = s.xface(i, jp);
                let tb = diff(w, below, ihy);
                let tf = diff(above, w, ihy);
                let out = &mut rate.xfaces[j * (nx + 1) + i];
                upwind_into(out, &ej, &db, &df);
                upwind_into(out, &ek, &tb, &tf);
            }
        }

        // y-faces: gather columns so the 1D stencil sees contiguous data.
        let mut avg_col = vec![[0.0; D]; ny];
        let mut face_col = vec![[0.0; D]; ny + 1];
        for i in 0..nx {
            for j in 0..ny {
                avg_col[j] = *s.avg(i, j);
            }
            for j in 0..=ny {
                face_col[j] = *s.yface(i, j);
            }
            let (im, ip) = ((i + nx - 1) % nx, (i + 1) % nx);
            for j in 0..ny {
                let w = &face_col[j];
                let (ej, ek) = self.eig(w, "y-face", i, j)?;
                let db = self.back.eval(&avg_col, &face_col, j, true, ihy);
                let df = self.fwd.eval(&avg_col, &face_col, j, true, ihy);
                let left = s.yface(im, j);
                let right = s.yface(ip, j);
                let tb = diff(w, left, ihx);
                let tf = diff(right, w, ihx);
                let out = &mut rate.yfaces[j * nx + i];
                upwind_into(out, &ek, &db, &df);
                upwind_into(out, &ej, &tb, &tf);
            }
        }
        rate.sync_periodic();
        Ok(rate)
    }

    pub fn max_speed(&self, s: &MeshState2D<D>) -> Result<f64, SolverError> {
        let mut m: f64 = 0.0;
        for (k, w) in s.xfaces.iter().chain(&s.yfaces).enumerate() {
            let v = self.model.max_speed(w).map_err(|source| SolverError::Physics {
                location: format!("face {k}"),
                source,
            })?;
            m = m.max(v);
        }
        Ok(m)
    }

    /// Marches to `t_final`; `dt = cfl * min(hx, hy) / max speed`, or a fixed
    /// multiple of `min(hx, hy)`.
    pub fn run(
        &self,
        state: MeshState2D<D>,
        rk: &RkScheme,
        t_final: f64,
        step: TimeStep,
    ) -> Result<MeshState2D<D>, SolverError> {
        Ok(self.run_counted(state, rk, t_final, step, 50_000_000)?.0)
    }

    /// [`Self::run`] with a step budget; also returns the steps taken.
    pub fn run_counted(
        &self,
        state: MeshState2D<D>,
        rk: &RkScheme,
        t_final: f64,
        step: TimeStep,
        max_steps: usize,
    ) -> Result<(MeshState2D<D>, usize), SolverError> {
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
            |s| {
                s.sync_periodic();
                Ok(())
            },
            |_, s| self.rhs(s),
        )
        .map_err(SolverError::from_march)?;
        Ok((out.state, out.steps))
    }
}

/// Face values sampled at edge centers, averages by tensor Gauss quadrature
/// with `npts` points per direction.
pub fn initialize_2d<const D: usize>(
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
    ic: &dyn Fn(f64, f64) -> [f64; D],
    npts: usize,
) -> MeshState2D<D> {
    let mut s = MeshState2D::zeros(x_range, y_range, nx, ny);
    for j in 0..ny {
        for i in 0..=nx {
            s.xfaces[j * (nx + 1) + i] = ic(s.x_face(i), s.y_center(j));
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            s.yfaces[j * nx + i] = ic(s.x_center(i), s.y_face(j));
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            s.averages[j * nx + i] =
                cell_average_2d(ic, (s.x_face(i), s.x_face(i + 1)), (s.y_face(j), s.y_face(j + 1)), npts);
        }
    }
    s
}

/// Mean of `f` over a rectangle by tensor Gauss-Legendre quadrature.
pub fn cell_average_2d<const D: usize>(
    f: &dyn Fn(f64, f64) -> [f64; D],
    xr: (f64, f64),
    yr: (f64, f64),
    npts: usize,
) -> [f64; D] {
    let (xs, ws) = crate::solver1d::gauss_legendre(npts);
    let (xm, xh) = (0.5 * (xr.0 + xr.1), 0.5 * (xr.1 - xr.0));
    let (ym, yh) = (0.5 * (yr.0 + yr.1), 0.5 * (yr.1 - yr.0));
    let base = f(xm, ym);
    let mut acc = [0.0; D];
    for (a, wa) in xs.iter().zip(&ws) {
        for (b, wb) in xs.iter().zip(&ws) {
            let v = f(xm + xh * a, ym + yh * b);
            for c in 0..D {
                acc[c] += 0.25 * wa * wb * (v[c] - base[c]);
            }
        }
    }
    std::array::from_fn(|c| base[c] + acc[c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{Advection2d, Euler2d};

    #[test]
    fn higher_orders_rejected() {
        let m = Euler2d::default();
        assert!(matches!(
            Solver2d::new(&m, "2nd-backward", 8, 8),
            Err(SolverError::Config(_))
        ));
        assert!(Solver2d::new(&m, "1st-forward", 8, 8).is_ok());
    }

    #[test]
    fn constant_state_is_steady() {
        let m = Euler2d::default();
        let w = m.conserved(&[1.0, 0.3, -0.2, 1.0]);
        let s = initialize_2d((0.0, 1.0), (0.0, 2.0), 6, 5, &|_, _| w, 2);
        let r = Solver2d::new(&m, "1st-backward", 6, 5).unwrap().rhs(&s).unwrap();
        for v in r.averages.iter().chain(&r.xfaces).chain(&r.yfaces) {
            assert!(v.iter().all(|x| x.abs() < 1e-13), "{v:?}");
        }
    }

    #[test]
    fn scalar_layout() {
        let m = Advection2d { cx: 1.0, cy: 0.5 };
        let s = initialize_2d((0.0, 1.0), (0.0, 1.0), 4, 3, &|x, y| [x + 10.0 * y], 2);
        assert_eq!(s.xfaces.len(), 15);
        assert_eq!(s.yfaces.len(), 16);
        assert_eq!(s.dof(), 12 + 15 + 16);
        assert!((s.xface(1, 2)[0] - (0.25 + 10.0 * (2.5 / 3.0))).abs() < 1e-12);
        let _ = Solver2d::new(&m, "1st-backward", 4, 3).unwrap();
    }
}
