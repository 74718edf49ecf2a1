//! Explicit Runge-Kutta steppers for semi-discrete systems.
//!
//! Tableaus are stored exactly (rational) and every stage vector `K_i` is kept
//! for the duration of a step.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ddo::rational_to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RkKind {
    Fe,
    Rk2,
    Rk3,
    Rk4,
    Rk5,
}

impl RkKind {
    pub const ALL: [RkKind; 5] = [RkKind::Fe, RkKind::Rk2, RkKind::Rk3, RkKind::Rk4, RkKind::Rk5];

    pub fn name(self) -> &'static str {
        match self {
            RkKind::Fe => "fe",
            RkKind::Rk2 => "rk2",
            RkKind::Rk3 => "rk3",
            RkKind::Rk4 => "rk4",
            RkKind::Rk5 => "rk5",
        }
    }

    /// Classical order of accuracy.
    pub fn order(self) -> usize {
        match self {
            RkKind::Fe => 1,
            RkKind::Rk2 => 2,
            RkKind::Rk3 => 3,
            RkKind::Rk4 => 4,
            RkKind::Rk5 => 5,
        }
    }
}

impl fmt::Display for RkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown Runge-Kutta scheme `{0}`; valid: fe, rk2, rk3, rk4, rk5")]
pub struct UnknownScheme(pub String);

impl FromStr for RkKind {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RkKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

/// Error raised by [`RkScheme::step`].
#[derive(Debug, Error)]
pub enum StepError<E> {
    /// The right-hand side failed while evaluating stage `stage` (1-based).
    #[error("right-hand side failed at stage {stage}: {source}")]
    Rhs { stage: usize, source: E },
    /// A non-finite value appeared in the stage-`stage` rate or the updated state.
    #[error("non-finite values after stage {stage}")]
    BlowUp { stage: usize },
}

/// State vectors the stepper can combine.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn all_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Complex64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }

    fn all_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl<const D: usize> OdeState for Vec<[f64; D]> {
    fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (s, v) in self.iter_mut().zip(x) {
            for k in 0..D {
                s[k] += a * v[k];
            }
        }
    }

    fn all_finite(&self) -> bool {
        // `x * 0` is zero exactly when `x` is finite; the fold vectorizes.
        self.iter().flatten().fold(0.0, |acc, &x| acc + x * 0.0) == 0.0
    }
}

/// An explicit Runge-Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct RkScheme {
    kind: RkKind,
    /// Row `i` holds the weights of `K_1..K_i` entering stage `i+1`.
    stages: Vec<Vec<Rational64>>,
    weights: Vec<Rational64>,
    stages_f: Vec<Vec<f64>>,
    weights_f: Vec<f64>,
    nodes_f: Vec<f64>,
    /// Coefficients of the stability polynomial `P(z) = sum c_k z^k`.
    poly: Vec<Rational64>,
    poly_f: Vec<f64>,
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl RkScheme {
    pub fn new(kind: RkKind) -> Self {
        let (stages, weights): (Vec<Vec<Rational64>>, Vec<Rational64>) = match kind {
            RkKind::Fe => (vec![vec![]], vec![r(1, 1)]),
            RkKind::Rk2 => (vec![vec![], vec![r(1, 1)]], vec![r(1, 2), r(1, 2)]),
            RkKind::Rk3 => (
                vec![vec![], vec![r(1, 1)], vec![r(1, 4), r(1, 4)]],
                vec![r(1, 6), r(1, 6), r(4, 6)],
            ),
            RkKind::Rk4 => (
                vec![
                    vec![],
                    vec![r(1, 2)],
                    vec![r(0, 1), r(1, 2)],
                    vec![r(0, 1), r(0, 1), r(1, 1)],
                ],
                vec![r(1, 6), r(2, 6), r(2, 6), r(1, 6)],
            ),
            RkKind::Rk5 => (
                vec![
                    vec![],
                    vec![r(1, 1)],
                    vec![r(1, 2), r(1, 2)],
                    vec![r(7, 32), r(5, 64), r(-3, 64)],
                    vec![r(-1, 8), r(-1, 8), r(1, 12), r(2, 3)],
                    vec![r(0, 1), r(-9, 64), r(5, 64), r(1, 4), r(9, 16)],
                ],
                vec![r(7, 90), r(0, 1), r(7, 90), r(32, 90), r(12, 90), r(32, 90)],
            ),
        };
        let poly = stability_polynomial(&stages, &weights);
        Self {
            kind,
            stages_f: stages
                .iter()
                .map(|row| row.iter().copied().map(rational_to_f64).collect())
                .collect(),
            weights_f: weights.iter().copied().map(rational_to_f64).collect(),
            nodes_f: stages
                .iter()
                .map(|row| rational_to_f64(row.iter().copied().sum()))
                .collect(),
            poly_f: poly.iter().copied().map(rational_to_f64).collect(),
            stages,
            weights,
            poly,
        }
    }

    pub fn kind(&self) -> RkKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn stage_count(&self) -> usize {
        self.weights.len()
    }

    pub fn stage_coefficients(&self) -> &[Vec<Rational64>] {
        &self.stages
    }

    pub fn output_weights(&self) -> &[Rational64] {
        &self.weights
    }

    /// Stage times `c_i = sum_j a_ij`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes_f
    }

    pub fn stability_polynomial(&self) -> &[Rational64] {
        &self.poly
    }

    /// `P(z)`: one step of the scheme applied to `y' = z y`, `y = 1`, `dt = 1`.
    pub fn stability_function(&self, z: Complex64) -> Complex64 {
        self.poly_f
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Real stability interval `x` such that `|P(-y)| <= 1` for `y` in `[0, x]`.
    pub fn real_stability_limit(&self) -> f64 {
        let bad = |y: f64| self.stability_function(Complex64::new(-y, 0.0)).norm() > 1.0 + 1e-12;
        let step = 1e-3;
        let mut y = step;
        while !bad(y) {
            y += step;
            if y > 100.0 {
                return f64::INFINITY;
            }
        }
        let (mut lo, mut hi) = (y - step, y);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if bad(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Advances `state` from `t` to `t + dt`.
    ///
    /// `rhs(t_stage, y)` receives each stage input mutably so the caller can
    /// impose boundary data at the stage's nominal time before computing the
    /// rate. The first stage input is `state` itself.
    pub fn step<S, E, F>(&self, state: &mut S, t: f64, dt: f64, mut rhs: F) -> Result<(), StepError<E>>
    where
        S: OdeState,
        F: FnMut(f64, &mut S) -> Result<S, E>,
    {
        let mut ks: Vec<S> = Vec::with_capacity(self.stage_count());
        for (i, row) in self.stages_f.iter().enumerate() {
            let stage = i + 1;
            let t_stage = t + self.nodes_f[i] * dt;
            let k = if i == 0 {
                rhs(t_stage, state)
            } else {
                let mut y = state.clone();
                for (a, kj) in row.iter().zip(&ks) {
                    if *a != 0.0 {
                        y.axpy(a * dt, kj);
                    }
                }
                if !y.all_finite() {
                    return Err(StepError::BlowUp { stage });
                }
                rhs(t_stage, &mut y)
            }
            .map_err(|source| StepError::Rhs { stage, source })?;
            if !k.all_finite() {
                return Err(StepError::BlowUp { stage });
            }
            ks.push(k);
        }
        for (b, k) in self.weights_f.iter().zip(&ks) {
            if *b != 0.0 {
                state.axpy(b * dt, k);
            }
        }
        if !state.all_finite() {
            return Err(StepError::BlowUp {
                stage: self.stage_count(),
            });
        }
        Ok(())
    }
}

impl From<RkKind> for RkScheme {
    fn from(kind: RkKind) -> Self {
        RkScheme::new(kind)
    }
}

impl FromStr for RkScheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<RkKind>().map(RkScheme::new)
    }
}

type Poly = Vec<Rational64>;

fn poly_add_scaled(acc: &mut Poly, a: Rational64, p: &Poly) {
    if acc.len() < p.len() {
        acc.resize(p.len(), Rational64::zero());
    }
    for (s, c) in acc.iter_mut().zip(p) {
        *s += a * c;
    }
}

/// Stage-by-stage symbolic expansion: with `y' = z y`, `K_i = z (1 + sum_j a_ij K_j)`.
fn stability_polynomial(stages: &[Vec<Rational64>], weights: &[Rational64]) -> Poly {
    let mut ks: Vec<Poly> = Vec::new();
    for row in stages {
        let mut y: Poly = vec![Rational64::one()];
        for (a, k) in row.iter().zip(&ks) {
            poly_add_scaled(&mut y, *a, k);
        }
        let mut k = vec![Rational64::zero()];
        k.extend(y);
        ks.push(k);
    }
    let mut p: Poly = vec![Rational64::one()];
    for (b, k) in weights.iter().zip(&ks) {
        poly_add_scaled(&mut p, *b, k);
    }
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// States that carry their own time coordinate.
pub trait Timed {
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
}

/// Where a time march stops: the final time plus intermediate output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub t_final: f64,
    pub snapshots: Vec<f64>,
    pub max_steps: usize,
}

#[derive(Debug, Error)]
pub enum MarchError<E> {
    #[error("step {step} from t = {time}: {source}")]
    Step {
        step: usize,
        time: f64,
        source: StepError<E>,
    },
    #[error("{0}")]
    Other(E),
    #[error("step limit {0} reached before the final time")]
    StepLimit(usize),
}

/// Result of [`march`]: final state, snapshots in time order and step count.
#[derive(Debug, Clone)]
pub struct Marched<S> {
    pub state: S,
    pub snapshots: Vec<S>,
    pub steps: usize,
}

/// Repeats [`RkScheme::step`] until `schedule.t_final`, clipping the last step
/// before every snapshot time and the final time so they are hit exactly.
///
/// `dt_of` proposes a step for the current state, `settle` runs after every
/// completed step (and once before the first) with the state's new time set.
pub fn march<S, E>(
    rk: &RkScheme,
    mut state: S,
    schedule: &Schedule,
    mut dt_of: impl FnMut(&S) -> Result<f64, E>,
    mut settle: impl FnMut(&mut S) -> Result<(), E>,
    mut rhs: impl FnMut(f64, &mut S) -> Result<S, E>,
) -> Result<Marched<S>, MarchError<E>>
where
    S: OdeState + Timed,
{
    let t_start = state.time();
    let mut marks: Vec<f64> = schedule
        .snapshots
        .iter()
        .copied()
        .filter(|&t| t > t_start && t < schedule.t_final)
        .collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    marks.push(schedule.t_final);

    settle(&mut state).map_err(MarchError::Other)?;
    let mut snapshots = Vec::new();
    let mut steps = 0usize;
    for (m, &target) in marks.iter().enumerate() {
        while state.time() < target {
            if steps >= schedule.max_steps {
                return Err(MarchError::StepLimit(schedule.max_steps));
            }
            let t0 = state.time();
            let mut dt = dt_of(&state).map_err(MarchError::Other)?;
            let last = dt.is_nan() || dt <= 0.0 || t0 + dt >= target - 1e-12 * dt;
            if last {
                dt = target - t0;
            }
            rk.step(&mut state, t0, dt, &mut rhs)
                .map_err(|source| MarchError::Step {
                    step: steps,
                    time: t0,
                    source,
                })?;
            steps += 1;
            state.set_time(if last { target } else { t0 + dt });
            settle(&mut state).map_err(MarchError::Other)?;
        }
        if m + 1 < marks.len() {
            snapshots.push(state.clone());
        }
    }
    Ok(Marched {
        state,
        snapshots,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for kind in RkKind::ALL {
            let s = RkScheme::new(kind);
            let total: Rational64 = s.output_weights().iter().copied().sum();
            assert_eq!(total, Rational64::one(), "{kind}");
        }
    }

    #[test]
    fn forward_euler_polynomial() {
        let fe = RkScheme::new(RkKind::Fe);
        assert_eq!(fe.stability_polynomial(), &[r(1, 1), r(1, 1)]);
        let z = Complex64::new(-0.3, 0.7);
        assert!((fe.stability_function(z) - (1.0 + z)).norm() < 1e-15);
    }

    #[test]
    fn rk4_is_exponential_truncation() {
        let p = RkScheme::new(RkKind::Rk4);
        assert_eq!(
            p.stability_polynomial(),
            &[r(1, 1), r(1, 1), r(1, 2), r(1, 6), r(1, 24)]
        );
        assert_eq!(p.stability_function(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rk5_matches_taylor_through_fifth_order() {
        let p = RkScheme::new(RkKind::Rk5);
        let poly = p.stability_polynomial();
        let fact = [1, 1, 2, 6, 24, 120];
        for (k, f) in fact.iter().enumerate() {
            assert_eq!(poly[k], r(1, *f), "coefficient {k}");
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("RK3".parse::<RkKind>().unwrap(), RkKind::Rk3);
        assert!("rk7".parse::<RkKind>().is_err());
    }

    #[test]
    fn fe_on_zero_rate() {
        let fe = RkScheme::new(RkKind::Fe);
        let mut y = 3.0_f64;
        fe.step(&mut y, 0.0, 0.1, |_, _| Ok::<_, ()>(0.0)).unwrap();
        assert_eq!(y, 3.0);
    }

    #[test]
    fn rk4_exponential_growth() {
        let rk4 = RkScheme::new(RkKind::Rk4);
        let mut y = 1.0_f64;
        rk4.step(&mut y, 0.0, 0.1, |_, y| Ok::<_, ()>(*y)).unwrap();
        assert!((y - 0.1_f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn blow_up_reports_stage() {
        let rk2 = RkScheme::new(RkKind::Rk2);
        let mut y = 1.0_f64;
        let err = rk2
            .step(&mut y, 0.0, 0.1, |t, _| {
                Ok::<_, ()>(if t > 0.0 { f64::NAN } else { 1.0 })
            })
            .unwrap_err();
        assert!(matches!(err, StepError::BlowUp { stage: 2 }));
    }

    #[test]
    fn stage_times_follow_tableau() {
        let rk5 = RkScheme::new(RkKind::Rk5);
        assert_eq!(rk5.nodes(), &[0.0, 1.0, 1.0, 0.25, 0.5, 0.75]);
        let mut seen = Vec::new();
        let mut y = 0.0_f64;
        rk5.step(&mut y, 1.0, 0.5, |t, _| {
            seen.push(t);
            Ok::<_, ()>(0.0)
        })
        .unwrap();
        assert_eq!(seen, vec![1.0, 1.5, 1.5, 1.125, 1.25, 1.375]);
    }
}
