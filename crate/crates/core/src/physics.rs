//! Conservation laws: fluxes, Jacobians and characteristic decompositions.
//!
//! Matrices are row-major `[[f64; D]; D]`. In an [`Eigen`] the columns of
//! `right` are the right eigenvectors and the rows of `left` the left ones, so
//! `left = right^-1` and `J = right * diag(values) * left`.

use thiserror::Error;

pub type Mat<const D: usize> = [[f64; D]; D];

/// States closer to vacuum than this are rejected.
pub const VACUUM_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("inadmissible state: density {density:e}, pressure {pressure:e}")]
    Vacuum { density: f64, pressure: f64 },
    #[error("non-finite state component")]
    NonFinite,
}

/// Eigen-decomposition with eigenvalues in ascending order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen<const D: usize> {
    pub values: [f64; D],
    pub right: Mat<D>,
    pub left: Mat<D>,
}

impl<const D: usize> Eigen<D> {
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A system `w_t + f(w)_x = 0` with `D` conserved components.
pub trait FluxModel<const D: usize>: Send + Sync {
    fn name(&self) -> &'static str;
    fn flux(&self, w: &[f64; D]) -> [f64; D];
    fn jacobian(&self, w: &[f64; D]) -> Mat<D>;
    fn eigen(&self, w: &[f64; D]) -> Result<Eigen<D>, PhysicsError>;

    fn max_speed(&self, w: &[f64; D]) -> Result<f64, PhysicsError> {
        Ok(self.eigen(w)?.spectral_radius())
    }

    fn check(&self, w: &[f64; D]) -> Result<(), PhysicsError> {
        if w.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(PhysicsError::NonFinite)
        }
    }

    /// Decomposition at the Roe-averaged state between `l` and `r`, used by
    /// the finite-volume baseline. Defaults to the arithmetic midpoint.
    fn roe_eigen(&self, l: &[f64; D], r: &[f64; D]) -> Result<Eigen<D>, PhysicsError> {
        self.eigen(&std::array::from_fn(|c| 0.5 * (l[c] + r[c])))
    }

    /// Variables that MUSCL reconstruction works on. Identity by default.
    fn to_reconstruction(&self, w: &[f64; D]) -> [f64; D] {
        *w
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_reconstruction(&self, q: &[f64; D]) -> [f64; D] {
        *q
    }
}

/// A system `w_t + f(w)_x + g(w)_y = 0`; the [`FluxModel`] part is the x-direction.
pub trait FluxModel2D<const D: usize>: FluxModel<D> {
    fn flux_y(&self, w: &[f64; D]) -> [f64; D];
    fn jacobian_y(&self, w: &[f64; D]) -> Mat<D>;
    fn eigen_y(&self, w: &[f64; D]) -> Result<Eigen<D>, PhysicsError>;

    fn roe_eigen_y(&self, l: &[f64; D], r: &[f64; D]) -> Result<Eigen<D>, PhysicsError> {
        self.eigen_y(&std::array::from_fn(|c| 0.5 * (l[c] + r[c])))
    }

    /// Both decompositions at one state.
    fn eigen_xy(&self, w: &[f64; D]) -> Result<(Eigen<D>, Eigen<D>), PhysicsError> {
        Ok((self.eigen(w)?, self.eigen_y(w)?))
    }
}

fn scalar_eigen(speed: f64) -> Eigen<1> {
    Eigen {
        values: [speed],
        right: [[1.0]],
        left: [[1.0]],
    }
}

/// `f(u) = c u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Advection {
    pub c: f64,
}

impl FluxModel<1> for Advection {
    fn name(&self) -> &'static str {
        "advection"
    }
    fn flux(&self, w: &[f64; 1]) -> [f64; 1] {
        [self.c * w[0]]
    }
    fn jacobian(&self, _w: &[f64; 1]) -> Mat<1> {
        [[self.c]]
    }
    fn eigen(&self, _w: &[f64; 1]) -> Result<Eigen<1>, PhysicsError> {
        Ok(scalar_eigen(self.c))
    }
}

/// `u_t + cx u_x + cy u_y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Advection2d {
    pub cx: f64,
    pub cy: f64,
}

impl FluxModel<1> for Advection2d {
    fn name(&self) -> &'static str {
        "advection2d"
    }
    fn flux(&self, w: &[f64; 1]) -> [f64; 1] {
        [self.cx * w[0]]
    }
    fn jacobian(&self, _w: &[f64; 1]) -> Mat<1> {
        [[self.cx]]
    }
    fn eigen(&self, _w: &[f64; 1]) -> Result<Eigen<1>, PhysicsError> {
        Ok(scalar_eigen(self.cx))
    }
}

impl FluxModel2D<1> for Advection2d {
    fn flux_y(&self, w: &[f64; 1]) -> [f64; 1] {
        [self.cy * w[0]]
    }
    fn jacobian_y(&self, _w: &[f64; 1]) -> Mat<1> {
        [[self.cy]]
    }
    fn eigen_y(&self, _w: &[f64; 1]) -> Result<Eigen<1>, PhysicsError> {
        Ok(scalar_eigen(self.cy))
    }
}

/// `f(u) = (u^2 - 1)(u^2 - 4) / 4`, whose derivative `u^3 - 5u/2` changes
/// monotonicity at `u = +-sqrt(5/6)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Nonconvex;

impl Nonconvex {
    pub fn f(u: f64) -> f64 {
        0.25 * (u * u - 1.0) * (u * u - 4.0)
    }
    pub fn df(u: f64) -> f64 {
        u * u * u - 2.5 * u
    }
}

impl FluxModel<1> for Nonconvex {
    fn name(&self) -> &'static str {
        "nonconvex"
    }
    fn flux(&self, w: &[f64; 1]) -> [f64; 1] {
        [Self::f(w[0])]
    }
    fn jacobian(&self, w: &[f64; 1]) -> Mat<1> {
        [[Self::df(w[0])]]
    }
    fn eigen(&self, w: &[f64; 1]) -> Result<Eigen<1>, PhysicsError> {
        Ok(scalar_eigen(Self::df(w[0])))
    }

    /// Secant speed, so the Roe flux is exact on isolated jumps.
    fn roe_eigen(&self, l: &[f64; 1], r: &[f64; 1]) -> Result<Eigen<1>, PhysicsError> {
        let du = r[0] - l[0];
        let s = if du.abs() > 1e-12 * (1.0 + l[0].abs().max(r[0].abs())) {
            (Self::f(r[0]) - Self::f(l[0])) / du
        } else {
            Self::df(0.5 * (l[0] + r[0]))
        };
        Ok(scalar_eigen(s))
    }
}

/// One-dimensional Euler equations for a gamma-law gas, `w = (rho, rho u, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler1d {
    pub gamma: f64,
}

impl Default for Euler1d {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

impl Euler1d {
    /// `(rho, u, p)` from conserved variables, without admissibility checks.
    pub fn primitive(&self, w: &[f64; 3]) -> [f64; 3] {
        let rho = w[0];
        let u = w[1] / rho;
        let p = (self.gamma - 1.0) * (w[2] - 0.5 * w[1] * w[1] / rho);
        [rho, u, p]
    }

    pub fn conserved(&self, prim: &[f64; 3]) -> [f64; 3] {
        let [rho, u, p] = *prim;
        [rho, rho * u, p / (self.gamma - 1.0) + 0.5 * rho * u * u]
    }

    fn admissible(&self, w: &[f64; 3]) -> Result<[f64; 3], PhysicsError> {
        if !w.iter().all(|v| v.is_finite()) {
            return Err(PhysicsError::NonFinite);
        }
        let prim = self.primitive(w);
        if !(prim[0] >= VACUUM_FLOOR && prim[2] >= VACUUM_FLOOR) {
            return Err(PhysicsError::Vacuum {
                density: prim[0],
                pressure: prim[2],
            });
        }
        Ok(prim)
    }
}

/// `(u, p)` of a conserved triple, with velocity taken as the direct ratio of
/// momentum to density. Used for error reporting on cell averages.
pub fn conservative_to_primitive(w: &[f64; 3], gamma: f64) -> (f64, f64) {
    let p = Euler1d { gamma }.primitive(w);
    (p[1], p[2])
}

impl FluxModel<3> for Euler1d {
    fn name(&self) -> &'static str {
        "euler1d"
    }

    fn flux(&self, w: &[f64; 3]) -> [f64; 3] {
        let [_, u, p] = self.primitive(w);
        [w[1], w[1] * u + p, (w[2] + p) * u]
    }

    fn jacobian(&self, w: &[f64; 3]) -> Mat<3> {
        let g = self.gamma;
        let [rho, u, p] = self.primitive(w);
        let h = (w[2] + p) / rho;
        [
            [0.0, 1.0, 0.0],
            [0.5 * (g - 3.0) * u * u, (3.0 - g) * u, g - 1.0],
            [u * (0.5 * (g - 1.0) * u * u - h), h - (g - 1.0) * u * u, g * u],
        ]
    }

    fn eigen(&self, w: &[f64; 3]) -> Result<Eigen<3>, PhysicsError> {
        let [rho, u, p] = self.admissible(w)?;
        let a = (self.gamma * p / rho).sqrt();
        Ok(self.eigen_at(u, (w[2] + p) / rho, a))
    }

    fn roe_eigen(&self, l: &[f64; 3], r: &[f64; 3]) -> Result<Eigen<3>, PhysicsError> {
        let pl = self.admissible(l)?;
        let pr = self.admissible(r)?;
        let (sl, sr) = (pl[0].sqrt(), pr[0].sqrt());
        let wt = |a: f64, b: f64| (sl * a + sr * b) / (sl + sr);
        let u = wt(pl[1], pr[1]);
        let h = wt((l[2] + pl[2]) / pl[0], (r[2] + pr[2]) / pr[0]);
        let a2 = (self.gamma - 1.0) * (h - 0.5 * u * u);
        if a2.is_nan() || a2 <= 0.0 {
            return Err(PhysicsError::Vacuum {
                density: sl * sr,
                pressure: a2,
            });
        }
        Ok(self.eigen_at(u, h, a2.sqrt()))
    }

    fn to_reconstruction(&self, w: &[f64; 3]) -> [f64; 3] {
        self.primitive(w)
    }

    fn from_reconstruction(&self, q: &[f64; 3]) -> [f64; 3] {
        self.conserved(q)
    }

    fn max_speed(&self, w: &[f64; 3]) -> Result<f64, PhysicsError> {
        let [rho, u, p] = self.admissible(w)?;
        Ok(u.abs() + (self.gamma * p / rho).sqrt())
    }

    fn check(&self, w: &[f64; 3]) -> Result<(), PhysicsError> {
        self.admissible(w).map(|_| ())
    }
}

impl Euler1d {
    /// Decomposition from velocity, total enthalpy and sound speed.
    fn eigen_at(&self, u: f64, h: f64, a: f64) -> Eigen<3> {
        let b1 = (self.gamma - 1.0) / (a * a);
        let b2 = 0.5 * b1 * u * u;
        Eigen {
            values: [u - a, u, u + a],
            right: [[1.0, 1.0, 1.0], [u - a, u, u + a], [h - u * a, 0.5 * u * u, h + u * a]],
            left: [
                [0.5 * (b2 + u / a), -0.5 * (b1 * u + 1.0 / a), 0.5 * b1],
                [1.0 - b2, b1 * u, -b1],
                [0.5 * (b2 - u / a), -0.5 * (b1 * u - 1.0 / a), 0.5 * b1],
            ],
        }
    }
}

/// Two-dimensional Euler equations, `w = (rho, rho u, rho v, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler2d {
    pub gamma: f64,
}

impl Default for Euler2d {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

impl Euler2d {
    /// `(rho, u, v, p)`.
    pub fn primitive(&self, w: &[f64; 4]) -> [f64; 4] {
        let rho = w[0];
        let u = w[1] / rho;
        let v = w[2] / rho;
        let p = (self.gamma - 1.0) * (w[3] - 0.5 * (w[1] * u + w[2] * v));
        [rho, u, v, p]
    }

    pub fn conserved(&self, prim: &[f64; 4]) -> [f64; 4] {
        let [rho, u, v, p] = *prim;
        [
            rho,
            rho * u,
            rho * v,
            p / (self.gamma - 1.0) + 0.5 * rho * (u * u + v * v),
        ]
    }

    #[inline]
    fn admissible(&self, w: &[f64; 4]) -> Result<[f64; 4], PhysicsError> {
        if !w.iter().all(|v| v.is_finite()) {
            return Err(PhysicsError::NonFinite);
        }
        let prim = self.primitive(w);
        if !(prim[0] >= VACUUM_FLOOR && prim[3] >= VACUUM_FLOOR) {
            return Err(PhysicsError::Vacuum {
                density: prim[0],
                pressure: prim[3],
            });
        }
        Ok(prim)
    }

    /// Decomposition of `n . (J, K)` for the unit normal `n = (nx, ny)`, which
    /// is either `(1, 0)` or `(0, 1)`.
    #[inline]
    fn eigen_dir(&self, w: &[f64; 4], nx: f64, ny: f64) -> Result<Eigen<4>, PhysicsError> {
        let [rho, u, v, p] = self.admissible(w)?;
        let a = (self.gamma * p / rho).sqrt();
        Ok(self.eigen_at(u, v, (w[3] + p) / rho, a, nx, ny))
    }

    #[inline]
    fn roe_dir(&self, l: &[f64; 4], r: &[f64; 4], nx: f64, ny: f64) -> Result<Eigen<4>, PhysicsError> {
        let pl = self.admissible(l)?;
        let pr = self.admissible(r)?;
        let (sl, sr) = (pl[0].sqrt(), pr[0].sqrt());
        let wt = |a: f64, b: f64| (sl * a + sr * b) / (sl + sr);
        let u = wt(pl[1], pr[1]);
        let v = wt(pl[2], pr[2]);
        let h = wt((l[3] + pl[3]) / pl[0], (r[3] + pr[3]) / pr[0]);
        let a2 = (self.gamma - 1.0) * (h - 0.5 * (u * u + v * v));
        if a2.is_nan() || a2 <= 0.0 {
            return Err(PhysicsError::Vacuum {
                density: sl * sr,
                pressure: a2,
            });
        }
        Ok(self.eigen_at(u, v, h, a2.sqrt(), nx, ny))
    }

    #[inline]
    fn eigen_at(&self, u: f64, v: f64, h: f64, a: f64, nx: f64, ny: f64) -> Eigen<4> {
        let g = self.gamma;
        let q2 = u * u + v * v;
        let un = u * nx + v * ny;
        // tangential unit vector and velocity
        let (tx, ty) = (-ny, nx);
        let ut = u * tx + v * ty;
        let ia = 1.0 / a;
        let b1 = (g - 1.0) * ia * ia;
        let b2 = 0.5 * b1 * q2;
        Eigen {
            values: [un - a, un, un, un + a],
            right: [
                [1.0, 1.0, 0.0, 1.0],
                [u - a * nx, u, tx, u + a * nx],
                [v - a * ny, v, ty, v + a * ny],
                [h - a * un, 0.5 * q2, ut, h + a * un],
            ],
            left: [
                [
                    0.5 * (b2 + un * ia),
                    -0.5 * (b1 * u + nx * ia),
                    -0.5 * (b1 * v + ny * ia),
                    0.5 * b1,
                ],
                [1.0 - b2, b1 * u, b1 * v, -b1],
                [-ut, tx, ty, 0.0],
                [
                    0.5 * (b2 - un * ia),
                    -0.5 * (b1 * u - nx * ia),
                    -0.5 * (b1 * v - ny * ia),
                    0.5 * b1,
                ],
            ],
        }
    }
}

impl FluxModel<4> for Euler2d {
    fn name(&self) -> &'static str {
        "euler2d"
    }

    fn flux(&self, w: &[f64; 4]) -> [f64; 4] {
        let [_, u, _, p] = self.primitive(w);
        [w[1], w[1] * u + p, w[2] * u, (w[3] + p) * u]
    }

    fn jacobian(&self, w: &[f64; 4]) -> Mat<4> {
        let g = self.gamma;
        let [rho, u, v, p] = self.primitive(w);
        let h = (w[3] + p) / rho;
        let phi = 0.5 * (g - 1.0) * (u * u + v * v);
        [
            [0.0, 1.0, 0.0, 0.0],
            [phi - u * u, (3.0 - g) * u, -(g - 1.0) * v, g - 1.0],
            [-u * v, v, u, 0.0],
            [u * (phi - h), h - (g - 1.0) * u * u, -(g - 1.0) * u * v, g * u],
        ]
    }

    fn eigen(&self, w: &[f64; 4]) -> Result<Eigen<4>, PhysicsError> {
        self.eigen_dir(w, 1.0, 0.0)
    }

    #[inline]
    fn roe_eigen(&self, l: &[f64; 4], r: &[f64; 4]) -> Result<Eigen<4>, PhysicsError> {
        self.roe_dir(l, r, 1.0, 0.0)
    }

    fn to_reconstruction(&self, w: &[f64; 4]) -> [f64; 4] {
        self.primitive(w)
    }

    fn from_reconstruction(&self, q: &[f64; 4]) -> [f64; 4] {
        self.conserved(q)
    }

    /// Largest `|u_n| + a` over both directions.
    fn max_speed(&self, w: &[f64; 4]) -> Result<f64, PhysicsError> {
        let [rho, u, v, p] = self.admissible(w)?;
        Ok(u.abs().max(v.abs()) + (self.gamma * p / rho).sqrt())
    }

    fn check(&self, w: &[f64; 4]) -> Result<(), PhysicsError> {
        self.admissible(w).map(|_| ())
    }
}

impl FluxModel2D<4> for Euler2d {
    fn flux_y(&self, w: &[f64; 4]) -> [f64; 4] {
        let [_, _, v, p] = self.primitive(w);
        [w[2], w[1] * v, w[2] * v + p, (w[3] + p) * v]
    }

    fn jacobian_y(&self, w: &[f64; 4]) -> Mat<4> {
        let g = self.gamma;
        let [rho, u, v, p] = self.primitive(w);
        let h = (w[3] + p) / rho;
        let phi = 0.5 * (g - 1.0) * (u * u + v * v);
        [
            [0.0, 0.0, 1.0, 0.0],
            [-u * v, v, u, 0.0],
            [phi - v * v, -(g - 1.0) * u, (3.0 - g) * v, g - 1.0],
            [v * (phi - h), -(g - 1.0) * u * v, h - (g - 1.0) * v * v, g * v],
        ]
    }

    fn eigen_y(&self, w: &[f64; 4]) -> Result<Eigen<4>, PhysicsError> {
        self.eigen_dir(w, 0.0, 1.0)
    }

    #[inline]
    fn roe_eigen_y(&self, l: &[f64; 4], r: &[f64; 4]) -> Result<Eigen<4>, PhysicsError> {
        self.roe_dir(l, r, 0.0, 1.0)
    }

    #[inline]
    fn eigen_xy(&self, w: &[f64; 4]) -> Result<(Eigen<4>, Eigen<4>), PhysicsError> {
        let [rho, u, v, p] = self.admissible(w)?;
        let a = (self.gamma * p / rho).sqrt();
        let h = (w[3] + p) / rho;
        Ok((self.eigen_at(u, v, h, a, 1.0, 0.0), self.eigen_at(u, v, h, a, 0.0, 1.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonconvex_values() {
        assert_eq!(Nonconvex::f(1.0), 0.0);
        assert_eq!(Nonconvex::f(2.0), 0.0);
        assert_eq!(Nonconvex::f(0.0), 1.0);
        assert_eq!(Nonconvex::df(3.0), 19.5);
    }

    #[test]
    fn euler_rest_state_speeds() {
        let m = Euler1d::default();
        let e = m.eigen(&m.conserved(&[1.0, 0.0, 1.0])).unwrap();
        let a = 1.4f64.sqrt();
        assert!((e.values[0] + a).abs() < 1e-14);
        assert!(e.values[1].abs() < 1e-14);
        assert!((e.values[2] - a).abs() < 1e-14);
    }

    #[test]
    fn primitive_examples() {
        let (u, p) = conservative_to_primitive(&[1.0, 2.0, 3.4], 1.4);
        assert!((u - 2.0).abs() < 1e-15);
        assert!((p - 0.56).abs() < 1e-14);
        let (u, p) = conservative_to_primitive(&[2.0, 0.0, 5.0], 1.4);
        assert_eq!(u, 0.0);
        assert!((p - 2.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_rejected() {
        let m = Euler1d::default();
        assert!(matches!(m.eigen(&[0.0, 0.0, 1.0]), Err(PhysicsError::Vacuum { .. })));
        assert!(matches!(m.eigen(&[1.0, 0.0, -1.0]), Err(PhysicsError::Vacuum { .. })));
        assert_eq!(m.eigen(&[f64::NAN, 0.0, 1.0]), Err(PhysicsError::NonFinite));
    }

    #[test]
    fn euler2d_y_swaps_roles() {
        let m = Euler2d::default();
        let w = m.conserved(&[1.2, 0.3, -0.7, 0.9]);
        let ex = m.eigen(&w).unwrap();
        let ey = m.eigen_y(&w).unwrap();
        assert!((ex.values[1] - 0.3).abs() < 1e-14);
        assert!((ey.values[1] + 0.7).abs() < 1e-14);
    }
}
