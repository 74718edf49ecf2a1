//! Helpers shared by several integration-test binaries.
#![allow(dead_code)]

use std::f64::consts::PI;

use fdfv_core::physics::{Euler1d, Euler2d};
use fdfv_core::solver1d::{
    initialize, BoundaryClosure, BoundarySpec, FdfvScheme, InitialCondition, RunOptions, Solver1d, TimeStep,
};
use fdfv_core::solver2d::{initialize_2d, Solver2d};
use fdfv_core::time_integration::{RkKind, RkScheme};

/// Runs a y-independent Euler flow (zero transverse velocity) with the 2D
/// solver and the same x-profile with the 1D solver, at identical fixed time
/// steps, and returns the largest difference over every row of averages and
/// x-face values, relative to the solution magnitude.
pub fn dimension_reduction_gap(n: usize, ny: usize, t_final: f64) -> f64 {
    let prim = |x: f64| {
        [
            1.0 + 0.2 * (PI * x).sin(),
            0.7 + 0.1 * (PI * x).cos(),
            1.0 + 0.15 * (PI * x).sin(),
        ]
    };
    let m1 = Euler1d::default();
    let m2 = Euler2d::default();
    let ratio = 0.15;
    let rk = RkScheme::new(RkKind::Rk2);

    let s1 = initialize(
        -1.0,
        1.0,
        n,
        &InitialCondition::smooth(move |x| m1.conserved(&prim(x))),
        2,
    );
    let solver1 = Solver1d::new(
        &m1,
        FdfvScheme::new("1st-backward", BoundaryClosure::default()).unwrap(),
        BoundarySpec::periodic(),
        n,
    )
    .unwrap();
    let out1 = solver1
        .run(s1, &rk, &RunOptions::fixed_ratio(t_final, ratio))
        .unwrap()
        .state;

    // Square cells so that `min(hx, hy)` equals the 1D cell size.
    let width = 2.0 * ny as f64 / n as f64;
    let ic2 = move |x: f64, _y: f64| {
        let [r, u, p] = prim(x);
        m2.conserved(&[r, u, 0.0, p])
    };
    let s2 = initialize_2d((-1.0, 1.0), (0.0, width), n, ny, &ic2, 2);
    let solver2 = Solver2d::new(&m2, "1st-backward", n, ny).unwrap();
    let out2 = solver2.run(s2, &rk, t_final, TimeStep::FixedRatio(ratio)).unwrap();

    let pick = |w: &[f64; 4]| [w[0], w[1], w[3]];
    let mut gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for j in 0..ny {
        for i in 0..n {
            let a2 = pick(&out2.averages[j * n + i]);
            let a1 = out1.averages[i];
            for c in 0..3 {
                gap = gap.max((a2[c] - a1[c]).abs());
                scale = scale.max(a1[c].abs());
            }
            assert!(
                out2.averages[j * n + i][2].abs() < 1e-14,
                "transverse momentum appeared"
            );
        }
        for i in 0..=n {
            let f2 = pick(&out2.xfaces[j * (n + 1) + i]);
            let f1 = out1.nodals[i];
            for c in 0..3 {
                gap = gap.max((f2[c] - f1[c]).abs());
            }
        }
    }
    gap / scale
}
