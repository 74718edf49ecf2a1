//! Error norms, convergence studies, oscillation measurement and timing
//! comparisons.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::Error;

use super::problems::{ExactSource, ProblemId, Scheme};
use super::{exact_snapshot, run, RunSpec, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Average,
    Nodal,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Average => "avg",
            ErrorKind::Nodal => "nodal",
        }
    }
}

/// Per-column L1 errors of cell averages and, when the scheme has them, of
/// face values.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Errors {
    pub averages: Vec<f64>,
    pub nodal: Option<Vec<f64>>,
}

impl L1Errors {
    pub fn get(&self, kind: ErrorKind) -> Option<&[f64]> {
        match kind {
            ErrorKind::Average => Some(&self.averages),
            ErrorKind::Nodal => self.nodal.as_deref(),
        }
    }
}

fn weighted_l1(num: &[super::Sample], exact: &[super::Sample], ncols: usize) -> Vec<f64> {
    let mut e = vec![0.0; ncols];
    for (a, b) in num.iter().zip(exact) {
        for (c, acc) in e.iter_mut().enumerate() {
            *acc += a.weight * (a.values[c] - b.values[c]).abs();
        }
    }
    e
}

/// `sum |u - u_exact| * weight` per column. With several face families
/// (2D) the nodal error is their mean.
pub fn l1_error(numerical: &Snapshot, exact: &Snapshot) -> Result<L1Errors, Error> {
    let same = numerical.columns == exact.columns
        && numerical.averages.len() == exact.averages.len()
        && numerical.faces.len() == exact.faces.len()
        && numerical
            .faces
            .iter()
            .zip(&exact.faces)
            .all(|(a, b)| a.samples.len() == b.samples.len());
    if !same {
        return Err(Error::Config("snapshots have different layouts".into()));
    }
    let ncols = numerical.columns.len();
    let averages = weighted_l1(&numerical.averages, &exact.averages, ncols);
    let nodal = (!numerical.faces.is_empty()).then(|| {
        let mut acc = vec![0.0; ncols];
        for (a, b) in numerical.faces.iter().zip(&exact.faces) {
            for (s, v) in acc.iter_mut().zip(weighted_l1(&a.samples, &b.samples, ncols)) {
                *s += v;
            }
        }
        let k = numerical.faces.len() as f64;
        acc.into_iter().map(|v| v / k).collect()
    });
    Ok(L1Errors { averages, nodal })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dof: usize,
    pub steps: usize,
    pub seconds: f64,
    pub errors: L1Errors,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub problem: ProblemId,
    pub scheme: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<ConvergenceRow>,
    /// False when errors are measured against a stored reference that is
    /// not an exact solution; rates are then withheld.
    pub rates_available: bool,
}

impl ConvergenceReport {
    pub fn errors(&self, kind: ErrorKind, column: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|q| *q == column)?;
        self.rows.iter().map(|r| r.errors.get(kind).map(|e| e[c])).collect()
    }

    /// `log(e_{k-1} / e_k) / log(n_k / n_{k-1})` for every row after the
    /// first.
    pub fn rates(&self, kind: ErrorKind, column: &str) -> Option<Vec<f64>> {
        if !self.rates_available {
            return None;
        }
        let e = self.errors(kind, column)?;
        Some(
            self.rows
                .windows(2)
                .zip(e.windows(2))
                .map(|(r, e)| rate(e[0], e[1], r[0].n, r[1].n))
                .collect(),
        )
    }

    /// One row per mesh: `n,dof,steps` then an error and a rate column per
    /// quantity, averages first. Rates of the first row are empty. Timings
    /// are left out so that reruns reproduce the file exactly.
    pub fn to_csv(&self) -> String {
        let kinds: Vec<ErrorKind> = [ErrorKind::Average, ErrorKind::Nodal]
            .into_iter()
            .filter(|k| self.rows.first().is_some_and(|r| r.errors.get(*k).is_some()))
            .collect();
        let mut out = String::from("n,dof,steps");
        for k in &kinds {
            for c in &self.columns {
                let _ = write!(out, ",{}_{c}_l1,{}_{c}_rate", k.name(), k.name());
            }
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{},{},{}", row.n, row.dof, row.steps);
            for k in &kinds {
                let e = row.errors.get(*k).unwrap_or(&[]);
                for (c, v) in e.iter().enumerate() {
                    let _ = write!(out, ",{v:e},");
                    if i > 0 && self.rates_available {
                        let prev = self.rows[i - 1].errors.get(*k).unwrap_or(&[])[c];
                        let _ = write!(out, "{:.6}", rate(prev, *v, self.rows[i - 1].n, row.n));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn rate(e0: f64, e1: f64, n0: usize, n1: usize) -> f64 {
    (e0 / e1).ln() / (n1 as f64 / n0 as f64).ln()
}

/// Runs `base` on every mesh and measures errors against the problem's
/// exact or reference solution.
pub fn convergence_study(base: &RunSpec, meshes: &[usize]) -> Result<ConvergenceReport, Error> {
    if meshes.is_empty() {
        return Err(Error::Config("no meshes given".into()));
    }
    if meshes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("meshes must increase strictly, got {meshes:?}")));
    }
    let spec = base.problem.spec();
    let mut rows = Vec::with_capacity(meshes.len());
    let mut columns = Vec::new();
    for &n in meshes {
        let res = run(&base.clone().with_mesh(n))?;
        let exact = exact_snapshot(&res.snapshot)?;
        columns = res.snapshot.columns.clone();
        rows.push(ConvergenceRow {
            n,
            dof: res.dof,
            steps: res.steps,
            seconds: res.seconds,
            errors: l1_error(&res.snapshot, &exact)?,
        });
    }
    Ok(ConvergenceReport {
        problem: base.problem,
        scheme: base.label(),
        columns,
        rows,
        rates_available: !matches!(spec.exact, ExactSource::Fixture { .. }),
    })
}

/// Over- and undershoot beyond the range of the exact solution, both
/// clipped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    pub overshoot: f64,
    pub undershoot: f64,
}

impl Oscillation {
    pub fn magnitude(&self) -> f64 {
        self.overshoot.max(self.undershoot)
    }
}

/// Compares the extremes of column `column` (averages and face values
/// together) with those of the exact snapshot, inside each window in turn;
/// an empty window list means the whole domain. The worst window counts.
pub fn oscillation_metric(num: &Snapshot, exact: &Snapshot, column: usize, windows: &[(f64, f64)]) -> Oscillation {
    let whole = [(f64::NEG_INFINITY, f64::INFINITY)];
    let windows = if windows.is_empty() { &whole[..] } else { windows };
    let all = |s: &Snapshot| -> Vec<(f64, f64)> {
        s.averages
            .iter()
            .chain(s.faces.iter().flat_map(|f| &f.samples))
            .map(|p| (p.x, p.values[column]))
            .collect()
    };
    let (a, b) = (all(num), all(exact));
    let mut out = Oscillation {
        overshoot: 0.0,
        undershoot: 0.0,
    };
    for &(lo, hi) in windows {
        let range = |pts: &[(f64, f64)]| {
            pts.iter()
                .filter(|(x, _)| *x >= lo && *x <= hi)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), (_, v)| {
                    (mn.min(*v), mx.max(*v))
                })
        };
        let (nmin, nmax) = range(&a);
        let (emin, emax) = range(&b);
        if nmin > nmax || emin > emax {
            continue;
        }
        out.overshoot = out.overshoot.max(nmax - emax);
        out.undershoot = out.undershoot.max(emin - nmin);
    }
    out
}

/// How the meshes of a performance comparison are matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchCriterion {
    SameMesh,
    /// Every scheme gets the mesh whose unknown count is closest to that of
    /// the first scheme on the base mesh.
    SameDof,
}

impl FromStr for MatchCriterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same-mesh" => Ok(MatchCriterion::SameMesh),
            "same-dof" => Ok(MatchCriterion::SameDof),
            _ => Err(Error::Config(format!(
                "unknown match `{s}`; valid: same-mesh, same-dof"
            ))),
        }
    }
}

/// Cells per direction for `scheme` whose unknown count is closest to `dof`.
pub fn mesh_for_dof(problem: ProblemId, scheme: Scheme, dof: usize) -> usize {
    let count = |n: usize| RunSpec::new(problem, scheme, n).dof();
    let (mut lo, mut hi) = (1usize, 1usize);
    while count(hi) < dof {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if count(mid) < dof {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if dof.abs_diff(count(lo)) < dof.abs_diff(count(hi)) {
        lo
    } else {
        hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerfRow {
    pub scheme: String,
    pub n: usize,
    pub dof: usize,
    pub steps: usize,
    /// Median wall-clock seconds over the repeats.
    pub seconds: f64,
    pub avg_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerfTable {
    pub problem: ProblemId,
    pub criterion: MatchCriterion,
    pub columns: Vec<&'static str>,
    pub rows: Vec<PerfRow>,
}

impl PerfTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,mesh,dof,steps,seconds");
        for c in &self.columns {
            let _ = write!(out, ",avg_{c}_l1");
        }
        out.push('\n');
        let dims = if self.problem.spec().is_2d() { 2 } else { 1 };
        for r in &self.rows {
            let mesh = if dims == 2 {
                format!("{0}x{0}", r.n)
            } else {
                r.n.to_string()
            };
            let _ = write!(out, "{},{mesh},{},{},{:.4}", r.scheme, r.dof, r.steps, r.seconds);
            for e in &r.avg_errors {
                let _ = write!(out, ",{e:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn row(&self, scheme: &str) -> Option<&PerfRow> {
        self.rows.iter().find(|r| r.scheme == scheme)
    }
}

/// Times every scheme on `problem` (median of `repeats` runs) and records
/// its cell-average L1 errors.
pub fn compare_performance(
    problem: ProblemId,
    schemes: &[Scheme],
    base_mesh: usize,
    criterion: MatchCriterion,
    repeats: usize,
) -> Result<PerfTable, Error> {
    let Some(&first) = schemes.first() else {
        return Err(Error::Config("no schemes to compare".into()));
    };
    let target = RunSpec::new(problem, first, base_mesh).dof();
    let mut rows = Vec::new();
    let mut columns = Vec::new();
    for &scheme in schemes {
        let n = match criterion {
            MatchCriterion::SameMesh => base_mesh,
            MatchCriterion::SameDof => mesh_for_dof(problem, scheme, target),
        };
        let spec = RunSpec::new(problem, scheme, n);
        let mut times = Vec::new();
        let mut last = None;
        for _ in 0..repeats.max(1) {
            let res = run(&spec)?;
            times.push(res.seconds);
            last = Some(res);
        }
        let res = last.expect("at least one repeat");
        times.sort_by(f64::total_cmp);
        let exact = exact_snapshot(&res.snapshot)?;
        let errors = l1_error(&res.snapshot, &exact)?;
        columns = res.snapshot.columns.clone();
        rows.push(PerfRow {
            scheme: scheme.name().to_string(),
            n,
            dof: res.dof,
            steps: res.steps,
            seconds: times[times.len() / 2],
            avg_errors: errors.averages,
        });
    }
    Ok(PerfTable {
        problem,
        criterion,
        columns,
        rows,
    })
}
