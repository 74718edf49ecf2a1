//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion,
//! followed by indented measurements.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` may fail without failing the
//! target; any other failure exits non-zero.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fdfv_core::ddo::{analyze, catalog, StencilFamily, CATALOG_NAMES, MAX_ANALYZED_ORDER};
use fdfv_core::fvm_reference::Limiter;
use fdfv_core::harness::{
    compare_performance, convergence_study, exact_snapshot, l1_error, oscillation_metric, run, ErrorKind,
    MatchCriterion, Pairing, ProblemId, RunSpec, Scheme, Snapshot,
};
use fdfv_core::solver1d::StageBoundary;
use fdfv_core::stability::{asymptotic_bound, max_courant, semi_discrete_growth, uniform_theta_grid};
use fdfv_core::time_integration::RkScheme;
use num_rational::Rational64;

/// Criteria that are measured and reported but do not fail the target.
const KNOWN_DEVIATIONS: &[&str] = &["advection-rates", "efficiency-ordering"];

struct Check {
    pass: bool,
    lines: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            pass: true,
            lines: Vec::new(),
        }
    }

    /// Records a measurement; `ok` feeds the verdict.
    fn expect(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok " } else { "BAD" }));
    }

    /// A measurement that does not take part in the verdict.
    fn note(&mut self, what: String) {
        self.lines.push(format!("    {what}"));
    }

    fn within(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.expect(
            (got - want).abs() <= tol,
            format!("{label}: {got:.4} (want {want} ± {tol})"),
        );
    }

    fn runtime(&mut self, elapsed: Duration, limit: Duration) {
        self.expect(
            elapsed <= limit,
            format!("runtime {:.1} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()),
        );
    }
}

fn pairing_scheme(p: Pairing) -> Scheme {
    Scheme::Fdfv(p)
}

fn order_conditions() -> Check {
    let mut c = Check::new();
    let start = Instant::now();
    for name in CATALOG_NAMES {
        let designed = StencilFamily::from_name(name).unwrap().order;
        let r = analyze(&catalog(name).unwrap(), MAX_ANALYZED_ORDER).unwrap();
        c.expect(
            r.designed_order == designed && r.leading_error != Rational64::from_integer(0),
            format!(
                "{name}: order {} (designed {designed}), c_p = {}",
                r.designed_order, r.leading_error
            ),
        );
    }
    for (p, b0) in Pairing::ALL.into_iter().zip([2, 6, 3, 9, 5]) {
        let got = analyze(&catalog(p.stencil()).unwrap(), MAX_ANALYZED_ORDER)
            .unwrap()
            .b0();
        c.expect(
            got == Rational64::from_integer(b0),
            format!("{}: b0 = {got} (want {b0})", p.stencil()),
        );
    }
    c.runtime(start.elapsed(), Duration::from_secs(1));
    c
}

fn stability_limits() -> Check {
    let mut c = Check::new();
    let start = Instant::now();
    let table = [
        (1.0, 1.0),
        (0.409, 0.418),
        (0.808, 0.926),
        (0.309, 0.309),
        (0.494, 0.504),
    ];
    for (p, (lmax, lasym)) in Pairing::ALL.into_iter().zip(table) {
        let s = catalog(p.stencil()).unwrap();
        let rk = RkScheme::new(p.rk());
        let got = max_courant(&s, &rk, 1024, 1e-4).unwrap();
        c.within(&format!("{} lambda_max", p.name()), got, lmax, 0.005);
        let bound = asymptotic_bound(&rk, fdfv_core::ddo::rational_to_f64(s.b0()));
        c.within(&format!("{} lambda_asym", p.name()), bound, lasym, 0.005);
    }
    let (theta, eps) = semi_discrete_growth(&catalog("4th-backward").unwrap(), &uniform_theta_grid(1024)).unwrap();
    c.expect(
        eps > 0.0 && theta > 0.5 * std::f64::consts::PI,
        format!("4th-backward flagged unstable: max growth {eps:.3e} at theta {theta:.3}"),
    );
    c.runtime(start.elapsed(), Duration::from_secs(30));
    c
}

fn last_rates(problem: ProblemId, p: Pairing, stage: StageBoundary) -> (f64, f64) {
    let mut base = RunSpec::new(problem, pairing_scheme(p), 20);
    base.stage_boundary = stage;
    let rep = convergence_study(&base, &[20, 40, 80, 160]).unwrap();
    let last = |k| *rep.rates(k, "u").unwrap().last().unwrap();
    (last(ErrorKind::Average), last(ErrorKind::Nodal))
}

fn advection_rates() -> Check {
    let mut c = Check::new();
    let start = Instant::now();
    for problem in [ProblemId::AdvectionPeriodic, ProblemId::AdvectionDirichlet] {
        for p in Pairing::ALL {
            let want = (p.stencil_order() + 1) as f64;
            let (a, n) = last_rates(problem, p, StageBoundary::Nominal);
            c.within(&format!("{problem} {} avg rate", p.name()), a, want, 0.25);
            c.within(&format!("{problem} {} nodal rate", p.name()), n, want, 0.25);
        }
    }
    c.runtime(start.elapsed(), Duration::from_secs(120));
    for p in Pairing::ALL {
        let (a, n) = last_rates(ProblemId::AdvectionDirichlet, p, StageBoundary::Integrated);
        c.note(format!(
            "advection-dirichlet {} with integrated stage data: avg {a:.3}, nodal {n:.3}",
            p.name()
        ));
    }
    c
}

fn euler_smooth() -> Check {
    let mut c = Check::new();
    let start = Instant::now();
    let meshes = [40, 80, 160, 320];
    let d1 = convergence_study(
        &RunSpec::new(ProblemId::EulerSmoothPeriodic, pairing_scheme(Pairing::D1upRk2), 40),
        &meshes,
    )
    .unwrap();
    let errs = d1.errors(ErrorKind::Nodal, "u").unwrap();
    for ((n, e), want) in meshes.iter().zip(&errs).zip([6.61e-3, 1.80e-3, 4.70e-4, 1.20e-4]) {
        c.expect(
            (e / want - 1.0).abs() <= 0.2,
            format!("d1up-rk2 u error at {n}: {e:.3e} (want {want:.2e} ± 20%)"),
        );
    }
    let rates = d1.rates(ErrorKind::Nodal, "u").unwrap();
    for ((r, want), n) in rates.iter().zip([1.87, 1.94, 1.97]).zip(&meshes[1..]) {
        c.within(&format!("d1up-rk2 u rate at {n}"), *r, want, 0.1);
    }
    let avg = d1.errors(ErrorKind::Average, "u").unwrap();
    c.note(format!("d1up-rk2 averaged u errors: {}", fmt_list(&avg, "e")));

    let d4 = convergence_study(
        &RunSpec::new(
            ProblemId::EulerSmoothPeriodic,
            pairing_scheme(Pairing::D4upBiasedRk5),
            40,
        ),
        &[160, 320],
    )
    .unwrap();
    let r = d4.rates(ErrorKind::Nodal, "p").unwrap()[0];
    c.within("d4up-biased-rk5 p rate at 320", r, 4.97, 0.15);
    c.note(format!(
        "d4up-biased-rk5 averaged p rate at 320: {:.3}",
        d4.rates(ErrorKind::Average, "p").unwrap()[0]
    ));
    c.runtime(start.elapsed(), Duration::from_secs(600));
    c
}

fn conservation() -> Check {
    let mut c = Check::new();
    for p in Pairing::ALL {
        let r = run(&RunSpec::new(ProblemId::SquareWave, pairing_scheme(p), 120)).unwrap();
        let d = r.conservation_drift();
        c.expect(d <= 1e-12, format!("square-wave {} at 120: drift {d:.2e}", p.name()));
    }
    for scheme in [pairing_scheme(Pairing::D1upRk2), Scheme::Fvm(Limiter::VanAlbada)] {
        let r = run(&RunSpec::new(ProblemId::Vortex2d, scheme, 40)).unwrap();
        let d = r.conservation_drift();
        c.expect(d <= 1e-12, format!("vortex2d {scheme} at 40x40: drift {d:.2e}"));
    }
    c
}

/// Worst excursion of the first column beyond the exact range.
fn overshoot(snap: &Snapshot, windows: &[(f64, f64)]) -> f64 {
    let exact = exact_snapshot(snap).unwrap();
    oscillation_metric(snap, &exact, 0, windows).magnitude()
}

fn square_wave_oscillations() -> Check {
    let mut c = Check::new();
    let over = |scheme, n| {
        overshoot(
            &run(&RunSpec::new(ProblemId::SquareWave, scheme, n)).unwrap().snapshot,
            &[],
        )
    };
    for p in Pairing::ALL {
        let (a, b) = (over(pairing_scheme(p), 30), over(pairing_scheme(p), 120));
        c.expect(
            b <= 1.5 * a,
            format!("{}: overshoot {a:.4} at 30, {b:.4} at 120", p.name()),
        );
    }
    let fvm: Vec<f64> = [30, 60, 120]
        .into_iter()
        .map(|n| over(Scheme::Fvm(Limiter::None), n))
        .collect();
    c.expect(
        fvm.windows(2).all(|w| w[1] > w[0]),
        format!("unlimited fvm overshoot at 30/60/120: {}", fmt_list(&fvm, "f")),
    );
    c
}

fn sod_robustness() -> Check {
    let mut c = Check::new();
    let mut worst_fdfv: f64 = 0.0;
    for p in Pairing::ALL {
        for n in [20, 40, 80] {
            let spec = RunSpec::new(ProblemId::Sod, pairing_scheme(p), n);
            match run(&spec) {
                Ok(r)
                    if r.snapshot
                        .averages
                        .iter()
                        .all(|s| s.values.iter().all(|v| v.is_finite())) =>
                {
                    if n == 80 {
                        let o = overshoot(&r.snapshot, &ProblemId::Sod.spec().oscillation_windows(spec.t_final));
                        worst_fdfv = worst_fdfv.max(o);
                        c.expect(
                            true,
                            format!("{} completes at {:?}; overshoot at 80: {o:.4}", p.name(), spec.step),
                        );
                    }
                }
                Ok(_) => c.expect(false, format!("{} at {n}: non-finite output", p.name())),
                Err(e) => c.expect(false, format!("{} at {n}: {e}", p.name())),
            }
        }
    }
    let spec = RunSpec::new(ProblemId::Sod, Scheme::Fvm(Limiter::None), 80);
    match run(&spec) {
        Err(e) if e.is_blow_up() => c.expect(true, format!("unlimited fvm at 80 blows up: {e}")),
        Err(e) => c.expect(false, format!("unlimited fvm at 80 failed unexpectedly: {e}")),
        Ok(r) => {
            let o = overshoot(&r.snapshot, &ProblemId::Sod.spec().oscillation_windows(spec.t_final));
            c.expect(
                o > worst_fdfv,
                format!("unlimited fvm overshoot at 80: {o:.4} vs fdfv {worst_fdfv:.4}"),
            );
        }
    }
    c
}

fn nonconvex() -> Check {
    let mut c = Check::new();
    for p in Pairing::ALL {
        let errs: Vec<f64> = [80, 160, 320]
            .into_iter()
            .map(|n| {
                let r = run(&RunSpec::new(ProblemId::Nonconvex, pairing_scheme(p), n)).unwrap();
                l1_error(&r.snapshot, &exact_snapshot(&r.snapshot).unwrap())
                    .unwrap()
                    .averages[0]
            })
            .collect();
        c.expect(
            errs.windows(2).all(|w| w[1] < w[0]),
            format!("{} L1 at 80/160/320: {}", p.name(), fmt_list(&errs, "e")),
        );
        let r = run(&RunSpec::new(ProblemId::Nonconvex, pairing_scheme(p), 81)).unwrap();
        let asym = antisymmetry_gap(&r.snapshot);
        c.expect(
            asym <= 1e-10,
            format!("{} at 81 cells: |u(x) + u(-x)| <= {asym:.2e}", p.name()),
        );
    }
    c
}

/// Largest `|u(x) + u(-x)|` over averages and faces, which are laid out
/// symmetrically about the origin.
fn antisymmetry_gap(s: &Snapshot) -> f64 {
    let gap = |pts: &[fdfv_core::harness::Sample]| {
        pts.iter()
            .zip(pts.iter().rev())
            .map(|(a, b)| {
                assert!((a.x + b.x).abs() < 1e-12, "mesh is not symmetric");
                (a.values[0] + b.values[0]).abs()
            })
            .fold(0.0, f64::max)
    };
    s.faces.iter().map(|f| gap(&f.samples)).fold(gap(&s.averages), f64::max)
}

fn vortex() -> Check {
    let mut c = Check::new();
    let start = Instant::now();
    let rep = convergence_study(
        &RunSpec::new(ProblemId::Vortex2d, pairing_scheme(Pairing::D1upRk2), 20),
        &[20, 40, 80, 160],
    )
    .unwrap();
    let rates = rep.rates(ErrorKind::Average, "rho").unwrap();
    for ((r, want), n) in rates.iter().zip([1.20, 1.75, 1.95]).zip([40, 80, 160]) {
        c.within(&format!("d1up-rk2 rho rate at {n}x{n}"), *r, want, 0.15);
    }
    c.note(format!(
        "rho errors: {}",
        fmt_list(&rep.errors(ErrorKind::Average, "rho").unwrap(), "e")
    ));
    c.runtime(start.elapsed(), Duration::from_secs(1200));
    let gap = common::dimension_reduction_gap(40, 3, 0.5);
    c.expect(gap <= 1e-12, format!("dimension reduction gap {gap:.2e}"));
    c
}

fn efficiency() -> Check {
    let mut c = Check::new();
    let schemes = [pairing_scheme(Pairing::D1upRk2), Scheme::Fvm(Limiter::VanAlbada)];
    let mesh = compare_performance(ProblemId::Vortex2d, &schemes, 80, MatchCriterion::SameMesh, 3).unwrap();
    let (fd, fv) = (mesh.row("d1up-rk2").unwrap(), mesh.row("fvm-van-albada").unwrap());
    let rho = mesh.columns.iter().position(|q| *q == "rho").unwrap();
    c.expect(
        fd.avg_errors[rho] < fv.avg_errors[rho],
        format!(
            "same mesh 80x80: rho error {:.3e} vs {:.3e}",
            fd.avg_errors[rho], fv.avg_errors[rho]
        ),
    );
    c.expect(
        fd.seconds <= 1.3 * fv.seconds,
        format!(
            "same mesh 80x80: time {:.2} s vs {:.2} s (ratio {:.2})",
            fd.seconds,
            fv.seconds,
            fd.seconds / fv.seconds
        ),
    );
    let dof = compare_performance(ProblemId::Vortex2d, &schemes, 80, MatchCriterion::SameDof, 3).unwrap();
    let (fd, fv) = (dof.row("d1up-rk2").unwrap(), dof.row("fvm-van-albada").unwrap());
    c.expect(
        fv.seconds >= 3.0 * fd.seconds,
        format!(
            "same dof {} vs {} ({}x{} fvm): time {:.2} s vs {:.2} s (ratio {:.2})",
            fd.dof,
            fv.dof,
            fv.n,
            fv.n,
            fv.seconds,
            fd.seconds,
            fv.seconds / fd.seconds
        ),
    );
    c
}

type Criterion = (&'static str, fn() -> Check);

fn fmt_list(v: &[f64], style: &str) -> String {
    let f = |x: &f64| {
        if style == "e" {
            format!("{x:.3e}")
        } else {
            format!("{x:.4}")
        }
    };
    v.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("order-conditions", order_conditions),
        ("stability-limits", stability_limits),
        ("advection-rates", advection_rates),
        ("euler-smooth-convergence", euler_smooth),
        ("conservation", conservation),
        ("oscillation-mesh-independence", square_wave_oscillations),
        ("sod-robustness", sod_robustness),
        ("nonconvex-flux", nonconvex),
        ("vortex-2d", vortex),
        ("efficiency-ordering", efficiency),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let check = f();
        let verdict = if check.pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {name} ({:.1} s)", start.elapsed().as_secs_f64());
        for l in &check.lines {
            println!("    {l}");
        }
        if check.pass {
            passed += 1;
        } else if !KNOWN_DEVIATIONS.contains(&name) {
            unexpected.push(name);
        }
    }
    println!("{passed}/10 criteria pass");
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
