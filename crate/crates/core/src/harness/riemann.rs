//! Exact solution of the Riemann problem for the gamma-law Euler equations.

/// Primitive state `(rho, u, p)`.
pub type Prim = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Riemann {
    pub gamma: f64,
    pub left: Prim,
    pub right: Prim,
    pub p_star: f64,
    pub u_star: f64,
}

impl Riemann {
    /// Solves for the star-region pressure by Newton iteration.
    pub fn new(gamma: f64, left: Prim, right: Prim) -> Self {
        let g = gamma;
        let (al, ar) = ((g * left[2] / left[0]).sqrt(), (g * right[2] / right[0]).sqrt());
        assert!(
            2.0 / (g - 1.0) * (al + ar) > right[1] - left[1],
            "vacuum is generated by this Riemann problem"
        );
        let du = right[1] - left[1];
        let mut p = (0.5 * (left[2] + right[2]) - 0.125 * du * (left[0] + right[0]) * (al + ar)).max(1e-8);
        for _ in 0..100 {
            let (fl, dfl) = pressure_fn(g, p, &left);
            let (fr, dfr) = pressure_fn(g, p, &right);
            let next = (p - (fl + fr + du) / (dfl + dfr)).max(1e-12);
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-15 {
                break;
            }
        }
        let (fl, _) = pressure_fn(g, p, &left);
        let (fr, _) = pressure_fn(g, p, &right);
        Self {
            gamma,
            left,
            right,
            p_star: p,
            u_star: 0.5 * (left[1] + right[1]) + 0.5 * (fr - fl),
        }
    }

    /// Self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> Prim {
        let g = self.gamma;
        let g1 = (g - 1.0) / (2.0 * g);
        let g3 = 2.0 * g / (g - 1.0);
        let g4 = 2.0 / (g - 1.0);
        let g5 = 2.0 / (g + 1.0);
        let g6 = (g - 1.0) / (g + 1.0);
        let g7 = 0.5 * (g - 1.0);
        let (ps, us) = (self.p_star, self.u_star);
        if xi < us {
            let [rl, ul, pl] = self.left;
            let al = (g * pl / rl).sqrt();
            if ps > pl {
                let sl = ul - al * ((g + 1.0) / (2.0 * g) * ps / pl + g1).sqrt();
                if xi < sl {
                    self.left
                } else {
                    [rl * (ps / pl + g6) / (g6 * ps / pl + 1.0), us, ps]
                }
            } else if xi < ul - al {
                self.left
            } else {
                let a_star = al * (ps / pl).powf(g1);
                if xi > us - a_star {
                    [rl * (ps / pl).powf(1.0 / g), us, ps]
                } else {
                    let c = g5 * (al + g7 * (ul - xi));
                    [rl * (c / al).powf(g4), g5 * (al + g7 * ul + xi), pl * (c / al).powf(g3)]
                }
            }
        } else {
            let [rr, ur, pr] = self.right;
            let ar = (g * pr / rr).sqrt();
            if ps > pr {
                let sr = ur + ar * ((g + 1.0) / (2.0 * g) * ps / pr + g1).sqrt();
                if xi >= sr {
                    self.right
                } else {
                    [rr * (ps / pr + g6) / (g6 * ps / pr + 1.0), us, ps]
                }
            } else if xi >= ur + ar {
                self.right
            } else {
                let a_star = ar * (ps / pr).powf(g1);
                if xi <= us + a_star {
                    [rr * (ps / pr).powf(1.0 / g), us, ps]
                } else {
                    let c = g5 * (ar - g7 * (ur - xi));
                    [
                        rr * (c / ar).powf(g4),
                        g5 * (-ar + g7 * ur + xi),
                        pr * (c / ar).powf(g3),
                    ]
                }
            }
        }
    }

    /// Speeds of every wave edge: shocks, rarefaction heads and tails, and
    /// the contact.
    pub fn wave_speeds(&self) -> Vec<f64> {
        let g = self.gamma;
        let g1 = (g - 1.0) / (2.0 * g);
        let (ps, us) = (self.p_star, self.u_star);
        let mut out = vec![us];
        let [rl, ul, pl] = self.left;
        let al = (g * pl / rl).sqrt();
        if ps > pl {
            out.push(ul - al * ((g + 1.0) / (2.0 * g) * ps / pl + g1).sqrt());
        } else {
            out.push(ul - al);
            out.push(us - al * (ps / pl).powf(g1));
        }
        let [rr, ur, pr] = self.right;
        let ar = (g * pr / rr).sqrt();
        if ps > pr {
            out.push(ur + ar * ((g + 1.0) / (2.0 * g) * ps / pr + g1).sqrt());
        } else {
            out.push(ur + ar);
            out.push(us + ar * (ps / pr).powf(g1));
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Toro's pressure function `f_K(p)` and its derivative.
fn pressure_fn(g: f64, p: f64, s: &Prim) -> (f64, f64) {
    let [rho, _, pk] = *s;
    let a = (g * pk / rho).sqrt();
    if p > pk {
        let big_a = 2.0 / ((g + 1.0) * rho);
        let big_b = (g - 1.0) / (g + 1.0) * pk;
        let q = (big_a / (p + big_b)).sqrt();
        ((p - pk) * q, q * (1.0 - 0.5 * (p - pk) / (big_b + p)))
    } else {
        let r = p / pk;
        let e = (g - 1.0) / (2.0 * g);
        (
            2.0 * a / (g - 1.0) * (r.powf(e) - 1.0),
            r.powf(-(g + 1.0) / (2.0 * g)) / (rho * a),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sod_star_state() {
        let r = Riemann::new(1.4, [1.0, 0.0, 1.0], [0.125, 0.0, 0.1]);
        assert!((r.p_star - 0.30313).abs() < 1e-5);
        assert!((r.u_star - 0.92745).abs() < 1e-5);
        let shock = r.wave_speeds().last().copied().unwrap();
        assert!((shock - 1.75216).abs() < 1e-4);
    }
}
