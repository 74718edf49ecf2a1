use fdfv_core::time_integration::{RkKind, RkScheme, StepError};
use num_rational::Rational64;
use proptest::prelude::*;

const ALL: [RkKind; 5] = [RkKind::Fe, RkKind::Rk2, RkKind::Rk3, RkKind::Rk4, RkKind::Rk5];

fn integrate(scheme: &RkScheme, y0: f64, t_final: f64, dt: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let steps = (t_final / dt).round() as usize;
    let mut y = y0;
    for k in 0..steps {
        scheme
            .step(&mut y, k as f64 * dt, dt, |t, y: &mut f64| Ok::<_, ()>(f(t, *y)))
            .unwrap();
    }
    y
}

fn observed_order(scheme: &RkScheme, f: impl Fn(f64, f64) -> f64 + Copy, exact: f64, dts: &[f64]) -> Vec<f64> {
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| (integrate(scheme, 1.0, 1.0, dt, f) - exact).abs())
        .collect();
    errs.windows(2)
        .zip(dts.windows(2))
        .map(|(e, d)| (e[0] / e[1]).ln() / (d[0] / d[1]).ln())
        .collect()
}

#[test]
fn weights_are_consistent() {
    for kind in ALL {
        let s = RkScheme::new(kind);
        let sum: Rational64 = s.output_weights().iter().copied().sum();
        assert_eq!(sum, Rational64::from_integer(1), "{}", s.name());
    }
}

#[test]
fn linear_decay_orders() {
    for kind in ALL {
        let s = RkScheme::new(kind);
        let rates = observed_order(&s, |_, y| -y, (-1.0f64).exp(), &[0.1, 0.05, 0.025]);
        for r in rates {
            assert!((r - kind.order() as f64).abs() < 0.2, "{}: {r}", s.name());
        }
    }
}

#[test]
fn nonlinear_time_dependent_orders() {
    // y' = -y^2 + cos t, integrated against a very fine RK5 solution.
    let f = |t: f64, y: f64| -y * y + t.cos();
    let reference = integrate(&RkScheme::new(RkKind::Rk5), 1.0, 1.0, 1e-4, f);
    for kind in ALL {
        let s = RkScheme::new(kind);
        let rates = observed_order(&s, f, reference, &[0.1, 0.05, 0.025]);
        let last = *rates.last().unwrap();
        assert!((last - kind.order() as f64).abs() < 0.2, "{}: {rates:?}", s.name());
    }
}

#[test]
fn rk4_single_step() {
    let s = RkScheme::new(RkKind::Rk4);
    let y = integrate(&s, 1.0, 0.1, 0.1, |_, y| y);
    assert!((y - 0.1f64.exp()).abs() < 1e-7);
}

#[test]
fn blow_up_is_reported() {
    let s = RkScheme::new(RkKind::Rk3);
    let mut y = vec![1.0, 2.0];
    let err = s
        .step(&mut y, 0.0, 1.0, |_, y: &mut Vec<f64>| {
            Ok::<_, ()>(y.iter().map(|v| v * f64::MAX).collect())
        })
        .unwrap_err();
    assert!(matches!(err, StepError::BlowUp { .. }));
}

proptest! {
    #[test]
    fn linear_rhs_gives_linear_step(
        y in prop::collection::vec(-5.0f64..5.0, 4),
        alpha in -3.0f64..3.0,
        k in 0usize..5,
    ) {
        // A fixed rotation-plus-decay operator.
        let apply = |v: &Vec<f64>| -> Vec<f64> {
            vec![-0.5 * v[0] + v[1], -v[0] - 0.5 * v[1], -0.1 * v[2], 2.0 * v[3] - v[2]]
        };
        let s = RkScheme::new(ALL[k]);
        let mut a = y.clone();
        s.step(&mut a, 0.0, 0.2, |_, v: &mut Vec<f64>| Ok::<_, ()>(apply(v))).unwrap();
        let mut b: Vec<f64> = y.iter().map(|v| alpha * v).collect();
        s.step(&mut b, 0.0, 0.2, |_, v: &mut Vec<f64>| Ok::<_, ()>(apply(v))).unwrap();
        for (x, z) in a.iter().zip(&b) {
            prop_assert!((alpha * x - z).abs() <= 1e-12 * (1.0 + z.abs()));
        }
    }
}
