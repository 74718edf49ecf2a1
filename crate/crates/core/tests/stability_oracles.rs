use std::f64::consts::PI;

use fdfv_core::ddo::{catalog, rational_to_f64};
use fdfv_core::stability::{
    analysis_theta_grid, asymptotic_bound, diagnostics, max_courant, rk_stability_function, semi_discrete_growth,
    symbol, symbol_sweep, uniform_theta_grid,
};
use fdfv_core::time_integration::{RkKind, RkScheme};
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

const RETAINED: [(&str, RkKind, f64, f64); 5] = [
    ("1st-backward", RkKind::Rk2, 1.0, 1.0),
    ("2nd-backward", RkKind::Rk3, 0.409, 0.418),
    ("3rd-B-biased", RkKind::Rk4, 0.808, 0.926),
    ("3rd-backward", RkKind::Rk4, 0.309, 0.309),
    ("4th-B-biased", RkKind::Rk5, 0.494, 0.504),
];

/// Eigenvalues of a complex 2x2 matrix through its 4x4 real embedding, whose
/// spectrum is the union of the eigenvalues and their conjugates.
fn embedded_eigenvalues(m: [[Complex64; 2]; 2]) -> Vec<Complex<f64>> {
    let real = DMatrix::from_fn(4, 4, |r, c| {
        let z = m[r % 2][c % 2];
        match (r / 2, c / 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    real.complex_eigenvalues().iter().copied().collect()
}

#[test]
fn eigenvalues_match_dense_solver() {
    let s = catalog("3rd-B-biased").unwrap();
    let th = PI / 4.0;
    let sp = symbol(&s, th).unwrap();
    let i = Complex64::i();
    let eigs = embedded_eigenvalues([[Complex64::new(0.0, 0.0), i], [sp.a_sym, sp.b_sym]]);
    for lam in [sp.lambda1, sp.lambda2] {
        let best = eigs
            .iter()
            .map(|e| (Complex64::new(e.re, e.im) - lam).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-10 * (1.0 + lam.norm()), "{lam}: {best}");
    }
}

#[test]
fn trace_and_determinant_identities() {
    for s in fdfv_core::ddo::catalog_all() {
        for th in [1e-3, 0.3, 1.0, 2.0, PI] {
            let sp = symbol(&s, th).unwrap();
            let tr = sp.lambda1 + sp.lambda2;
            let det = sp.lambda1 * sp.lambda2;
            let minus_ia = -Complex64::i() * sp.a_sym;
            assert!(
                (tr - sp.b_sym).norm() <= 1e-10 * sp.b_sym.norm().max(1.0),
                "{} {th}",
                s.name()
            );
            assert!(
                (det - minus_ia).norm() <= 1e-10 * minus_ia.norm().max(1.0),
                "{} {th}",
                s.name()
            );
        }
    }
}

#[test]
fn branch_tracks_i_near_zero() {
    for (name, ..) in RETAINED {
        let s = catalog(name).unwrap();
        let grid = analysis_theta_grid(1024);
        let sweep = symbol_sweep(&s, &grid).unwrap();
        assert!((sweep[0].lambda1 - Complex64::i()).norm() < 1e-3, "{name}");
        let b0 = rational_to_f64(s.b0());
        assert!((sweep[0].lambda2 * grid[0] - b0).norm() < 1e-2 * b0, "{name}");
        // Continuity of the physical branch along the sweep.
        for w in sweep.windows(2) {
            let jump = (w[1].lambda1 - w[0].lambda1).norm();
            let other = (w[1].lambda2 - w[0].lambda1).norm();
            assert!(jump <= other, "{name} at {}", w[1].theta);
        }
    }
}

#[test]
fn table_courant_limits() {
    for (name, rk, lmax, lasym) in RETAINED {
        let s = catalog(name).unwrap();
        let scheme = RkScheme::new(rk);
        let got = max_courant(&s, &scheme, 1024, 1e-4).unwrap();
        let bound = asymptotic_bound(&scheme, rational_to_f64(s.b0()));
        assert!((got - lmax).abs() <= 0.005, "{name}/{}: {got} vs {lmax}", scheme.name());
        assert!(
            (bound - lasym).abs() <= 0.005,
            "{name}/{}: {bound} vs {lasym}",
            scheme.name()
        );
        assert!(got <= bound + 1e-4, "{name}: {got} exceeds the necessary bound {bound}");
    }
}

#[test]
fn asymptotic_bound_examples() {
    assert!((asymptotic_bound(&RkScheme::new(RkKind::Fe), 2.0) - 1.0).abs() < 1e-12);
    assert!((asymptotic_bound(&RkScheme::new(RkKind::Rk3), 6.0) - 0.418).abs() < 0.002);
    assert!((asymptotic_bound(&RkScheme::new(RkKind::Rk5), 5.0) - 0.504).abs() < 0.002);
}

#[test]
fn fourth_backward_is_unstable() {
    let s = catalog("4th-backward").unwrap();
    let (theta, eps) = semi_discrete_growth(&s, &uniform_theta_grid(1024)).unwrap();
    assert!(eps > 0.0 && theta > 0.5 * PI, "eps {eps} at {theta}");
    let d = diagnostics(&s, &uniform_theta_grid(1024)).unwrap();
    let near_pi = d.dissipation.last().copied().unwrap();
    assert!(near_pi > 0.0, "{near_pi}");
    for kind in [RkKind::Rk2, RkKind::Rk3, RkKind::Rk4, RkKind::Rk5] {
        assert_eq!(max_courant(&s, &RkScheme::new(kind), 1024, 1e-4).unwrap(), 0.0);
    }
}

#[test]
fn retained_stencils_do_not_grow() {
    for (name, ..) in RETAINED {
        let s = catalog(name).unwrap();
        let d = diagnostics(&s, &uniform_theta_grid(1024)).unwrap();
        for (th, e) in d.theta_grid.iter().zip(&d.dissipation) {
            assert!(*e <= 1e-10, "{name}: eps {e} at {th}");
        }
        for curve in [
            &d.dispersion,
            &d.stationary_phase_avg,
            &d.stationary_phase_nodal,
            &d.stationary_magnitude_avg,
            &d.stationary_magnitude_nodal,
            &d.noise_avg,
            &d.noise_nodal,
        ] {
            assert!(curve.iter().all(|v| v.is_finite()), "{name}");
        }
    }
}

#[test]
fn rk_polynomial_matches_stage_evaluation() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for kind in [RkKind::Fe, RkKind::Rk2, RkKind::Rk3, RkKind::Rk4, RkKind::Rk5] {
        let scheme = RkScheme::new(kind);
        for _ in 0..20 {
            let z = Complex64::new(rng.random_range(-3.0..1.0), rng.random_range(-3.0..3.0));
            let mut y = Complex64::new(1.0, 0.0);
            scheme
                .step(&mut y, 0.0, 1.0, |_, y: &mut Complex64| Ok::<_, ()>(*y * z))
                .unwrap();
            let p = rk_stability_function(&scheme, z);
            assert!((p - y).norm() < 1e-12 * (1.0 + y.norm()), "{}: {z}", scheme.name());
        }
    }
    let fe = RkScheme::new(RkKind::Fe);
    let z = Complex64::new(-0.3, 0.7);
    assert!((rk_stability_function(&fe, z) - (1.0 + z)).norm() < 1e-15);
    let rk4 = RkScheme::new(RkKind::Rk4);
    assert_eq!(
        rk_stability_function(&rk4, Complex64::new(0.0, 0.0)),
        Complex64::new(1.0, 0.0)
    );
}
