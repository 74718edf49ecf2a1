//! Von Neumann analysis of the semi- and fully-discrete schemes.
//!
//! Applying a stencil to `u_t + c u_x = 0` with a simple wave of angle
//! `theta = k h` couples the cell-average amplitude `A` and nodal amplitude
//! `N` through `d/dt [A, N] = -c k C(theta) [A, N]`, with
//! `C = [[0, i], [a(theta), b(theta)]]`. The two eigenvalues of `C` are the
//! physical branch (`lambda1`, close to `i`) and the spurious branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::ddo::{rational_to_f64, Stencil};
use crate::time_integration::RkScheme;

/// Roots whose product/sum are checked against `C(theta)` must stay within this
/// relative distance.
pub const UNIT_CIRCLE_SLACK: f64 = 1e-10;

/// Minimum sample count accepted by [`max_courant`].
pub const MIN_THETA_SAMPLES: usize = 512;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("wave angle must lie in (0, pi], got {0}")]
    BadTheta(f64),
    #[error("stencil `{0}` has b0 = 0; the analysis assumes b0 != 0")]
    ZeroB0(String),
    #[error("at least {MIN_THETA_SAMPLES} theta samples are required, got {0}")]
    TooFewSamples(usize),
}

/// Symbol functions and eigenvalues of `C(theta)` at one wave angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSpectrum {
    pub theta: f64,
    pub a_sym: Complex64,
    pub b_sym: Complex64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

fn symbol_ab(stencil: &Stencil, theta: f64) -> (Complex64, Complex64) {
    let phase = |l: i32| Complex64::from_polar(1.0, l as f64 * theta);
    let sa: Complex64 = stencil.alpha().map(|(l, c)| phase(l) * rational_to_f64(c)).sum();
    let sb: Complex64 = stencil.beta().map(|(l, c)| phase(l) * rational_to_f64(c)).sum();
    let one_minus = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -theta);
    let a = one_minus / (I * theta * theta) * sa;
    let b = sb / theta;
    (a, b)
}

fn roots(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let disc = (b * b + 4.0 * I * a).sqrt();
    let r1 = 0.5 * (b + disc);
    let r2 = 0.5 * (b - disc);
    // The difference of the roots loses accuracy when |b| is large; recover the
    // small root from the product instead.
    let prod = -I * a;
    if r1.norm() >= r2.norm() {
        (r1, if r1.norm() > 0.0 { prod / r1 } else { r2 })
    } else {
        (if r2.norm() > 0.0 { prod / r2 } else { r1 }, r2)
    }
}

/// Symbol and eigenvalues at a single angle; `lambda1` is the root nearer to `i`.
pub fn symbol(stencil: &Stencil, theta: f64) -> Result<SymbolSpectrum, StabilityError> {
    if !(theta > 0.0 && theta <= PI + 1e-12) {
        return Err(StabilityError::BadTheta(theta));
    }
    let (a, b) = symbol_ab(stencil, theta);
    let (r1, r2) = roots(a, b);
    let (lambda1, lambda2) = if (r1 - I).norm() <= (r2 - I).norm() {
        (r1, r2)
    } else {
        (r2, r1)
    };
    Ok(SymbolSpectrum {
        theta,
        a_sym: a,
        b_sym: b,
        lambda1,
        lambda2,
    })
}

/// Symbols along a sweep with the physical branch tracked by continuity,
/// seeded at the smallest angle by proximity to `i`. Output follows input order.
pub fn symbol_sweep(stencil: &Stencil, thetas: &[f64]) -> Result<Vec<SymbolSpectrum>, StabilityError> {
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&i, &j| thetas[i].total_cmp(&thetas[j]));
    let mut out: Vec<Option<SymbolSpectrum>> = vec![None; thetas.len()];
    let mut prev: Option<Complex64> = None;
    for idx in order {
        let mut s = symbol(stencil, thetas[idx])?;
        if let Some(p) = prev {
            if (s.lambda2 - p).norm() < (s.lambda1 - p).norm() {
                std::mem::swap(&mut s.lambda1, &mut s.lambda2);
            }
        }
        prev = Some(s.lambda1);
        out[idx] = Some(s);
    }
    Ok(out.into_iter().map(|s| s.expect("every index visited")).collect())
}

/// Error diagnostics of the semi-discrete scheme over a grid of angles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticCurves {
    pub theta_grid: Vec<f64>,
    pub dispersion: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub stationary_phase_avg: Vec<f64>,
    pub stationary_phase_nodal: Vec<f64>,
    pub stationary_magnitude_avg: Vec<f64>,
    pub stationary_magnitude_nodal: Vec<f64>,
    pub noise_avg: Vec<f64>,
    pub noise_nodal: Vec<f64>,
}

impl DiagnosticCurves {
    pub const CSV_HEADER: &'static str =
        "theta,dispersion,dissipation,phase_avg,phase_nodal,mag_avg,mag_nodal,noise_avg,noise_nodal";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for k in 0..self.theta_grid.len() {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.theta_grid[k],
                self.dispersion[k],
                self.dissipation[k],
                self.stationary_phase_avg[k],
                self.stationary_phase_nodal[k],
                self.stationary_magnitude_avg[k],
                self.stationary_magnitude_nodal[k],
                self.noise_avg[k],
                self.noise_nodal[k],
            ));
        }
        s
    }
}

/// Evaluates dispersion, dissipation, the stationary phase/magnitude errors and
/// the spurious-mode noise (at `t = h / c`, i.e. `c k t = theta`).
pub fn diagnostics(stencil: &Stencil, theta_grid: &[f64]) -> Result<DiagnosticCurves, StabilityError> {
    let spectra = symbol_sweep(stencil, theta_grid)?;
    let mut out = DiagnosticCurves {
        theta_grid: theta_grid.to_vec(),
        ..Default::default()
    };
    for s in spectra {
        let (l1, l2, th) = (s.lambda1, s.lambda2, s.theta);
        let scaled = l1 * th / I;
        let gap = l2 - l1;
        let stat_avg = (l2 - I) / gap;
        let stat_nodal = l1 * (l2 - I) / (I * gap);
        let decay = (-(l2 - I) * th).exp();
        let noise_avg = (l1 - I) / gap * decay;
        let noise_nodal = l2 * (l1 - I) / (I * gap) * decay;
        out.dispersion.push(scaled.re);
        out.dissipation.push(scaled.im);
        out.stationary_phase_avg.push(stat_avg.arg());
        out.stationary_phase_nodal.push(stat_nodal.arg());
        out.stationary_magnitude_avg.push(stat_avg.norm());
        out.stationary_magnitude_nodal.push(stat_nodal.norm());
        out.noise_avg.push(noise_avg.norm());
        out.noise_nodal.push(noise_nodal.norm());
    }
    Ok(out)
}

/// `n` uniform samples on `(0, pi]`.
pub fn uniform_theta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| PI * k as f64 / n as f64).collect()
}

/// Uniform samples plus geometric refinement on `[1e-4, 1e-2]`, sorted.
pub fn analysis_theta_grid(uniform_samples: usize) -> Vec<f64> {
    let mut grid = uniform_theta_grid(uniform_samples);
    let refine = 64;
    for k in 0..=refine {
        let e = -4.0 + 2.0 * k as f64 / refine as f64;
        grid.push(10f64.powf(e));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Worst semi-discrete growth rate over both branches: the largest
/// `eps = -Re(lambda) * theta` on `thetas`, with the angle where it occurs. A
/// positive value means modes grow for any time step.
pub fn semi_discrete_growth(stencil: &Stencil, thetas: &[f64]) -> Result<(f64, f64), StabilityError> {
    let mut worst = (f64::NAN, f64::NEG_INFINITY);
    for &th in thetas {
        let s = symbol(stencil, th)?;
        let eps = -(s.lambda1.re.min(s.lambda2.re)) * th;
        if eps > worst.1 {
            worst = (th, eps);
        }
    }
    Ok(worst)
}

/// Fully-discrete growth factor `P(-z)` for a Runge-Kutta scheme.
pub fn rk_stability_function(scheme: &RkScheme, z: Complex64) -> Complex64 {
    scheme.stability_function(z)
}

/// `max_{theta, l} |P(-courant * theta * lambda_l(theta))|` over precomputed spectra.
pub fn max_growth(scheme: &RkScheme, spectra: &[SymbolSpectrum], courant: f64) -> f64 {
    spectra
        .iter()
        .flat_map(|s| [s.lambda1, s.lambda2].map(|l| (s.theta, l)))
        .map(|(th, l)| scheme.stability_function(-l * (courant * th)).norm())
        .fold(0.0, f64::max)
}

/// Necessary Courant bound from the `theta -> 0` limit, where the spurious
/// eigenvalue satisfies `theta * lambda2 -> b0`: `c_scheme / |b0|` with
/// `c_scheme` the real-axis stability interval of the scheme.
pub fn asymptotic_bound(scheme: &RkScheme, b0: f64) -> f64 {
    scheme.real_stability_limit() / b0.abs()
}

/// Largest Courant number for which every sampled mode is non-amplifying.
/// Returns 0 when no positive Courant number is stable.
pub fn max_courant(
    stencil: &Stencil,
    scheme: &RkScheme,
    theta_samples: usize,
    tol: f64,
) -> Result<f64, StabilityError> {
    if theta_samples < MIN_THETA_SAMPLES {
        return Err(StabilityError::TooFewSamples(theta_samples));
    }
    let b0 = rational_to_f64(stencil.b0());
    if b0 == 0.0 {
        return Err(StabilityError::ZeroB0(stencil.name().to_string()));
    }
    let grid = analysis_theta_grid(theta_samples);
    let spectra: Vec<SymbolSpectrum> = grid.iter().map(|&t| symbol(stencil, t)).collect::<Result<_, _>>()?;
    let stable = |c: f64| max_growth(scheme, &spectra, c) <= 1.0 + UNIT_CIRCLE_SLACK;

    let mut lo = 0.0;
    let mut hi = 1.5 * asymptotic_bound(scheme, b0);
    while stable(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(lo);
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `(theta, courant, max growth)` samples for contour plots of the
/// fully-discrete amplification on the theta-Courant plane.
pub fn growth_contour(
    stencil: &Stencil,
    scheme: &RkScheme,
    thetas: &[f64],
    courants: &[f64],
) -> Result<Vec<(f64, f64, f64)>, StabilityError> {
    let mut out = Vec::with_capacity(thetas.len() * courants.len());
    for &th in thetas {
        let s = symbol(stencil, th)?;
        for &c in courants {
            out.push((th, c, max_growth(scheme, std::slice::from_ref(&s), c)));
        }
    }
    Ok(out)
}
