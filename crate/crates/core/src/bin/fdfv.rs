use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fdfv_core::ddo::{catalog, catalog_all, rational_to_f64, Stencil};
use fdfv_core::harness::{
    compare_performance, convergence_study, exact_snapshot, l1_error, reference_csv, run, shu_osher_reference_spec,
    ErrorKind, MatchCriterion, ProblemId, RunConfig, RunSpec, Scheme,
};
use fdfv_core::solver1d::TimeStep;
use fdfv_core::stability::{
    analysis_theta_grid, asymptotic_bound, diagnostics, growth_contour, max_courant, uniform_theta_grid,
};
use fdfv_core::time_integration::RkScheme;
use fdfv_core::Error;

#[derive(Parser)]
#[command(
    name = "fdfv",
    version,
    about = "Hybrid FD-FV schemes for hyperbolic conservation laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Von Neumann analysis: diagnostic curves, growth contours and Courant limits.
    Stability {
        /// Stencil identifier, repeatable; `all` selects the whole catalog.
        #[arg(long = "stencil", required = true)]
        stencils: Vec<String>,
        /// Runge-Kutta scheme: fe, rk2, rk3, rk4 or rk5.
        #[arg(long)]
        rk: String,
        #[arg(long)]
        out: PathBuf,
        /// Uniform wave-angle samples on (0, pi].
        #[arg(long, default_value_t = 2048)]
        samples: usize,
        /// Courant numbers sampled for the contour map.
        #[arg(long, default_value_t = 101)]
        courants: usize,
        /// Largest Courant number of the contour map.
        #[arg(long, default_value_t = 1.2)]
        courant_max: f64,
    },
    /// Runs one problem from a JSON configuration and writes snapshot CSVs.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mesh-refinement study with L1 errors and observed rates.
    Convergence {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        scheme: String,
        /// Comma-separated cell counts; defaults to the problem's meshes.
        #[arg(long, value_delimiter = ',')]
        meshes: Vec<usize>,
        /// Overrides the default Courant number.
        #[arg(long)]
        cfl: Option<f64>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wall-clock and error comparison between schemes.
    Compare {
        #[arg(long)]
        problem: String,
        /// `same-mesh` or `same-dof`.
        #[arg(long = "match", default_value = "same-mesh")]
        criterion: String,
        /// Comma-separated schemes; the first one sets the unknown count for `same-dof`.
        #[arg(long, value_delimiter = ',', default_values_t = ["d1up-rk2".to_string(), "fvm-van-albada".to_string()])]
        schemes: Vec<String>,
        /// Cells per direction of the first scheme.
        #[arg(long, default_value_t = 80)]
        mesh: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerates the stored fine-mesh Shu-Osher reference profile.
    Reference {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Stability {
            stencils,
            rk,
            out,
            samples,
            courants,
            courant_max,
        } => stability(&stencils, &rk, &out, samples, courants, courant_max),
        Command::Solve { config, out } => solve(&config, &out),
        Command::Convergence {
            problem,
            scheme,
            meshes,
            cfl,
            out,
        } => {
            let problem: ProblemId = problem.parse()?;
            let scheme: Scheme = scheme.parse()?;
            let meshes = if meshes.is_empty() {
                problem.spec().default_meshes
            } else {
                meshes
            };
            let mut base = RunSpec::new(problem, scheme, meshes[0]);
            if let Some(c) = cfl {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::Config(format!("CFL must be positive, got {c}")));
                }
                base = base.with_step(TimeStep::Cfl(c));
            }
            let report = convergence_study(&base, &meshes)?;
            for kind in [ErrorKind::Average, ErrorKind::Nodal] {
                if let Some(r) = report.rates(kind, report.columns[0]) {
                    if let Some(last) = r.last() {
                        eprintln!(
                            "{} {} {} rate on finest pair: {last:.3}",
                            report.scheme,
                            kind.name(),
                            report.columns[0]
                        );
                    }
                }
            }
            emit(out.as_deref(), &report.to_csv())
        }
        Command::Compare {
            problem,
            criterion,
            schemes,
            mesh,
            repeats,
            out,
        } => {
            let problem: ProblemId = problem.parse()?;
            let criterion: MatchCriterion = criterion.parse()?;
            let schemes: Vec<Scheme> = schemes.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
            let table = compare_performance(problem, &schemes, mesh, criterion, repeats)?;
            emit(out.as_deref(), &table.to_csv())
        }
        Command::Reference { out } => {
            let spec = shu_osher_reference_spec();
            eprintln!("running {} on {} cells", spec.label(), spec.n);
            let res = run(&spec)?;
            write_file(&out, &reference_csv(&res))?;
            eprintln!("wrote {} ({} steps)", out.display(), res.steps);
            Ok(())
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Error> {
    match out {
        Some(p) => write_file(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.to_path_buf(),
            source: e,
        })?;
    }
    fs::write(path, body).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn stability(
    names: &[String],
    rk: &str,
    out: &Path,
    samples: usize,
    courants: usize,
    courant_max: f64,
) -> Result<(), Error> {
    let scheme: RkScheme = rk.parse()?;
    let stencils: Vec<Stencil> = if names.iter().any(|n| n == "all") {
        catalog_all()
    } else {
        names.iter().map(|n| catalog(n)).collect::<Result<_, _>>()?
    };
    if courants < 2 || courant_max.is_nan() || courant_max <= 0.0 {
        return Err(Error::Config(
            "the contour needs at least 2 Courant numbers and a positive maximum".into(),
        ));
    }
    create_dir(out)?;
    let grid = uniform_theta_grid(samples);
    let lambdas: Vec<f64> = (0..courants)
        .map(|k| courant_max * k as f64 / (courants - 1) as f64)
        .collect();
    let mut summary = String::from("stencil,scheme,b0,lambda_asym,lambda_max\n");
    for s in &stencils {
        let curves = diagnostics(s, &grid)?;
        write_file(&out.join(format!("diagnostics_{}.csv", s.name())), &curves.to_csv())?;

        let contour = growth_contour(s, &scheme, &analysis_theta_grid(samples.min(512)), &lambdas)?;
        let mut c = String::from("theta,courant,growth\n");
        for (th, lam, g) in contour {
            let _ = writeln!(c, "{th:e},{lam:e},{g:e}");
        }
        write_file(&out.join(format!("contour_{}_{}.csv", s.name(), scheme.name())), &c)?;

        let b0 = rational_to_f64(s.b0());
        let lmax = max_courant(s, &scheme, samples, 1e-6)?;
        let _ = writeln!(
            summary,
            "{},{},{b0},{:.6},{lmax:.6}",
            s.name(),
            scheme.name(),
            asymptotic_bound(&scheme, b0)
        );
    }
    write_file(&out.join("summary.csv"), &summary)?;
    eprintln!(
        "wrote stability tables for {} stencil(s) to {}",
        stencils.len(),
        out.display()
    );
    Ok(())
}

fn solve(config: &Path, out: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(config).map_err(|e| Error::Io {
        path: config.to_path_buf(),
        source: e,
    })?;
    let spec = RunSpec::from_config(&RunConfig::from_json(&text)?)?;
    let res = run(&spec)?;
    create_dir(out)?;

    let mut index = String::from("index,time,files\n");
    for (k, s) in res.snapshots.iter().chain([&res.snapshot]).enumerate() {
        let files = s.write_csv(out, &format!("snapshot_{k:03}"))?;
        let _ = writeln!(index, "{k},{},{}", s.time, files.join(" "));
    }
    write_file(&out.join("snapshots.csv"), &index)?;

    let mut summary = String::from("problem,scheme,nx,ny,dof,steps,seconds,conservation_drift\n");
    let ny = if spec.problem.spec().is_2d() { spec.ny } else { 1 };
    let _ = writeln!(
        summary,
        "{},{},{},{ny},{},{},{:.4},{:e}",
        spec.problem,
        spec.label(),
        spec.n,
        res.dof,
        res.steps,
        res.seconds,
        res.conservation_drift()
    );
    write_file(&out.join("run.csv"), &summary)?;

    match exact_snapshot(&res.snapshot) {
        Ok(exact) => {
            let e = l1_error(&res.snapshot, &exact)?;
            let mut csv = String::from("kind,quantity,l1\n");
            for kind in [ErrorKind::Average, ErrorKind::Nodal] {
                if let Some(v) = e.get(kind) {
                    for (q, err) in res.snapshot.columns.iter().zip(v) {
                        let _ = writeln!(csv, "{},{q},{err:e}", kind.name());
                    }
                }
            }
            write_file(&out.join("errors.csv"), &csv)?;
        }
        Err(e @ Error::MissingExact(_)) => eprintln!("no errors written: {e}"),
        Err(e) => return Err(e),
    }
    eprintln!("{} steps; outputs in {}", res.steps, out.display());
    Ok(())
}
