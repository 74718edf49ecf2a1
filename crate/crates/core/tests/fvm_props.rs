use fdfv_core::fvm_reference::{initialize_fv, Fvm1d, FvmOptions, Limiter};
use fdfv_core::harness::{convergence_study, run, ErrorKind, ProblemId, RunSpec, Scheme};
use fdfv_core::physics::Euler1d;
use fdfv_core::solver1d::{BoundarySpec, InitialCondition, TimeStep};
use fdfv_core::time_integration::{RkKind, RkScheme, Schedule};
use proptest::prelude::*;

#[test]
fn unlimited_scheme_is_second_order_on_smooth_data() {
    let base = RunSpec::new(ProblemId::AdvectionPeriodic, Scheme::Fvm(Limiter::None), 40);
    let report = convergence_study(&base, &[40, 80, 160, 320]).unwrap();
    let rates = report.rates(ErrorKind::Average, "u").unwrap();
    let last = *rates.last().unwrap();
    assert!((last - 2.0).abs() < 0.2, "rates {rates:?}");
}

#[test]
fn van_albada_sod_density_stays_in_range() {
    let res = run(&RunSpec::new(ProblemId::Sod, Scheme::Fvm(Limiter::VanAlbada), 200)).unwrap();
    let col = res.snapshot.column("rho").unwrap();
    for s in &res.snapshot.averages {
        let rho = s.values[col];
        assert!((0.12..=1.01).contains(&rho), "density {rho} at x = {}", s.x);
    }
}

#[test]
fn periodic_euler_is_conservative() {
    let m = Euler1d::default();
    let ic = InitialCondition::smooth(|x: f64| {
        Euler1d::default().conserved(&[1.0 + 0.3 * (6.0 * x).sin(), 0.4, 1.0 + 0.2 * (6.0 * x).cos()])
    });
    for limiter in [Limiter::None, Limiter::VanAlbada] {
        let s0 = initialize_fv(0.0, 1.0, 50, &ic);
        let a = s0.total();
        let fvm = Fvm1d::new(
            &m,
            BoundarySpec::periodic(),
            FvmOptions {
                limiter,
                ..Default::default()
            },
        )
        .unwrap();
        let schedule = Schedule {
            t_final: 0.3,
            snapshots: Vec::new(),
            max_steps: 100_000,
        };
        let b = fvm
            .run(s0, &RkScheme::new(RkKind::Rk2), &schedule, TimeStep::Cfl(0.8))
            .unwrap()
            .total();
        for c in 0..3 {
            assert!((a[c] - b[c]).abs() <= 1e-12 * a[c].abs(), "{limiter:?} component {c}");
        }
    }
}

proptest! {
    #[test]
    fn van_albada_slope_is_bounded(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let s = Limiter::VanAlbada.slope(a, b);
        if a * b <= 0.0 {
            prop_assert_eq!(s, 0.0);
        } else {
            prop_assert!(s * a > 0.0);
            prop_assert!(s.abs() <= a.abs().max(b.abs()) * (1.0 + 1e-15));
            prop_assert!(s.abs() >= a.abs().min(b.abs()) * (1.0 - 1e-15));
        }
        prop_assert!((s - Limiter::VanAlbada.slope(b, a)).abs() <= 1e-15 * s.abs());
        prop_assert_eq!(Limiter::None.slope(a, b), 0.5 * (a + b));
    }
}
