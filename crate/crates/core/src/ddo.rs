//! Discrete differential operators over mixed cell-average / face-nodal data.
//!
//! A stencil approximates `du/dx` at a face `x_{j+1/2}` as
//!
//! ```text
//! [D u]_{j+1/2} = (1/h) * ( sum_l alpha_l * ubar_{j+l}  +  sum_l beta_l * u_{j+1/2+l} )
//! ```
//!
//! where `ubar_{j+l}` is the average over the cell whose right face is
//! `x_{j+1/2+l}`. Offsets are signed and relative to the face.
//!
//! Coefficients are held as exact rationals so that the order conditions can
//! be checked without roundoff; they are converted to `f64` once, when a
//! stencil is compiled for evaluation.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The six upwind-type (backward family) catalog entries. The forward family
/// is generated from these by mirroring about the face.
/// Name, mirror name and `(kind, offset, numerator, denominator)` terms.
type CatalogEntry = (&'static str, &'static str, &'static [(TermKind, i32, i64, i64)]);

const BACKWARD_ENTRIES: [CatalogEntry; 6] = [
    (
        "1st-backward",
        "1st-forward",
        &[(TermKind::Nodal, 0, 2, 1), (TermKind::Average, 0, -2, 1)],
    ),
    (
        "2nd-backward",
        "2nd-forward",
        &[
            (TermKind::Nodal, 0, 4, 1),
            (TermKind::Average, 0, -6, 1),
            (TermKind::Nodal, -1, 2, 1),
        ],
    ),
    (
        "3rd-B-biased",
        "3rd-F-biased",
        &[
            (TermKind::Average, 1, 1, 2),
            (TermKind::Nodal, 0, 4, 2),
            (TermKind::Average, 0, -7, 2),
            (TermKind::Nodal, -1, 2, 2),
        ],
    ),
    (
        "3rd-backward",
        "3rd-forward",
        &[
            (TermKind::Nodal, 0, 10, 2),
            (TermKind::Average, 0, -17, 2),
            (TermKind::Nodal, -1, 8, 2),
            (TermKind::Average, -1, -1, 2),
        ],
    ),
    (
        "4th-B-biased",
        "4th-F-biased",
        &[
            (TermKind::Average, 1, 2, 6),
            (TermKind::Nodal, 0, 18, 6),
            (TermKind::Average, 0, -31, 6),
            (TermKind::Nodal, -1, 12, 6),
            (TermKind::Average, -1, -1, 6),
        ],
    ),
    (
        "4th-backward",
        "4th-forward",
        &[
            (TermKind::Nodal, 0, 12, 2),
            (TermKind::Average, 0, -23, 2),
            (TermKind::Nodal, -1, 16, 2),
            (TermKind::Average, -1, -7, 2),
            (TermKind::Nodal, -2, 2, 2),
        ],
    ),
];

/// Stable identifiers of every catalog entry, in table order.
pub const CATALOG_NAMES: [&str; 12] = [
    "1st-forward",
    "1st-backward",
    "2nd-forward",
    "2nd-backward",
    "3rd-forward",
    "3rd-F-biased",
    "3rd-B-biased",
    "3rd-backward",
    "4th-forward",
    "4th-F-biased",
    "4th-B-biased",
    "4th-backward",
];

/// Largest order `analyze` will examine; keeps factorials inside `i64`.
pub const MAX_ANALYZED_ORDER: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdoError {
    #[error("unknown stencil `{name}`; valid identifiers: {}", valid.join(", "))]
    UnknownStencil { name: String, valid: Vec<String> },
    #[error("stencil `{stencil}` needs {kind} value at offset {offset}, which is outside the window")]
    OutOfStencil {
        stencil: String,
        kind: TermKind,
        offset: i32,
    },
    #[error("max_order must lie in 1..={MAX_ANALYZED_ORDER}, got {0}")]
    BadOrder(usize),
    #[error("stencil has no terms")]
    Empty,
}

/// Whether a coefficient multiplies a cell average or a face-nodal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    Average,
    Nodal,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermKind::Average => write!(f, "cell-average"),
            TermKind::Nodal => write!(f, "nodal"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub offset: i32,
    pub coeff: Rational64,
}

/// A linear discrete differential operator over cell averages and nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    name: String,
    radius: usize,
    terms: Vec<Term>,
}

impl Stencil {
    /// Builds a stencil from its terms. Duplicate (kind, offset) pairs are
    /// merged; zero coefficients are dropped. Evaluation follows term order.
    pub fn new(name: impl Into<String>, terms: impl IntoIterator<Item = Term>) -> Result<Self, DdoError> {
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            if let Some(existing) = merged.iter_mut().find(|m| m.kind == t.kind && m.offset == t.offset) {
                existing.coeff += t.coeff;
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        if merged.is_empty() {
            return Err(DdoError::Empty);
        }
        let radius = merged
            .iter()
            .map(|t| match t.kind {
                // alpha_l lives on l in -q+1..=q
                TermKind::Average => t.offset.max(1 - t.offset),
                TermKind::Nodal => t.offset.abs(),
            })
            .max()
            .unwrap_or(1)
            .max(1) as usize;
        Ok(Self {
            name: name.into(),
            radius,
            terms: merged,
        })
    }

    /// Convenience constructor from `(alpha_l, beta_l)` offset maps.
    pub fn from_coefficients(
        name: impl Into<String>,
        alpha: &[(i32, Rational64)],
        beta: &[(i32, Rational64)],
    ) -> Result<Self, DdoError> {
        let terms = alpha
            .iter()
            .map(|&(offset, coeff)| Term {
                kind: TermKind::Average,
                offset,
                coeff,
            })
            .chain(beta.iter().map(|&(offset, coeff)| Term {
                kind: TermKind::Nodal,
                offset,
                coeff,
            }));
        Self::new(name, terms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn alpha(&self) -> impl Iterator<Item = (i32, Rational64)> + '_ {
        self.terms
            .iter()
            .filter(|t| t.kind == TermKind::Average)
            .map(|t| (t.offset, t.coeff))
    }

    pub fn beta(&self) -> impl Iterator<Item = (i32, Rational64)> + '_ {
        self.terms
            .iter()
            .filter(|t| t.kind == TermKind::Nodal)
            .map(|t| (t.offset, t.coeff))
    }

    pub fn alpha_at(&self, offset: i32) -> Rational64 {
        self.coeff(TermKind::Average, offset)
    }

    pub fn beta_at(&self, offset: i32) -> Rational64 {
        self.coeff(TermKind::Nodal, offset)
    }

    fn coeff(&self, kind: TermKind, offset: i32) -> Rational64 {
        self.terms
            .iter()
            .find(|t| t.kind == kind && t.offset == offset)
            .map_or_else(Rational64::zero, |t| t.coeff)
    }

    /// `b_0 = sum beta_l`; nonzero for every catalog entry.
    pub fn b0(&self) -> Rational64 {
        self.beta().map(|(_, c)| c).sum()
    }

    /// First order condition: coefficients sum to zero.
    pub fn is_consistent(&self) -> bool {
        self.terms.iter().map(|t| t.coeff).sum::<Rational64>().is_zero()
    }

    /// Reflection about the face: `x -> -x` maps `alpha_l -> -alpha_{1-l}` and
    /// `beta_l -> -beta_{-l}`. Term order is preserved so mirrored data is
    /// summed in the same sequence.
    pub fn mirrored(&self, name: impl Into<String>) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                kind: t.kind,
                offset: match t.kind {
                    TermKind::Average => 1 - t.offset,
                    TermKind::Nodal => -t.offset,
                },
                coeff: -t.coeff,
            })
            .collect();
        Self {
            name: name.into(),
            radius: self.radius,
            terms,
        }
    }

    /// Offsets of cell averages / nodal values read by the stencil, as
    /// `(min, max)` over each kind (`None` if the kind is unused).
    pub fn extent(&self, kind: TermKind) -> Option<(i32, i32)> {
        let mut it = self.terms.iter().filter(|t| t.kind == kind).map(|t| t.offset);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), o| (lo.min(o), hi.max(o))))
    }

    /// Floating-point form for evaluation in solver loops.
    pub fn compile(&self) -> CompiledStencil {
        CompiledStencil {
            terms: self
                .terms
                .iter()
                .map(|t| CompiledTerm {
                    kind: t.kind,
                    offset: t.offset,
                    coeff: rational_to_f64(t.coeff),
                })
                .collect(),
        }
    }

    /// Evaluates `[D u]` at the window's face.
    pub fn apply<W: Window + ?Sized>(&self, window: &W, h: f64) -> Result<f64, DdoError> {
        let mut acc = 0.0;
        for t in &self.terms {
            let value = match t.kind {
                TermKind::Average => window.average(t.offset),
                TermKind::Nodal => window.nodal(t.offset),
            }
            .ok_or_else(|| DdoError::OutOfStencil {
                stencil: self.name.clone(),
                kind: t.kind,
                offset: t.offset,
            })?;
            acc += rational_to_f64(t.coeff) * value;
        }
        Ok(acc / h)
    }

    /// Moment analysis and designed order.
    pub fn analyze(&self, max_order: usize) -> Result<OrderReport, DdoError> {
        analyze(self, max_order)
    }
}

impl fmt::Display for Stencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: (", self.name)?;
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let sym = match t.kind {
                TermKind::Average => "ubar",
                TermKind::Nodal => "u",
            };
            write!(f, "{:+}*{}[{:+}]", t.coeff, sym, t.offset)?;
        }
        write!(f, ")/h")
    }
}

pub fn rational_to_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Float form of a stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledStencil {
    pub terms: Vec<CompiledTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompiledTerm {
    pub kind: TermKind,
    pub offset: i32,
    pub coeff: f64,
}

/// Mixed data around one face, addressed by the same signed offsets as the
/// stencil coefficients.
pub trait Window {
    /// `ubar_{j+offset}`: average of the cell whose right face is `offset` faces away.
    fn average(&self, offset: i32) -> Option<f64>;
    /// `u_{j+1/2+offset}`.
    fn nodal(&self, offset: i32) -> Option<f64>;
}

/// Window over contiguous arrays: `averages[k]` is cell `k` (0-based, between
/// faces `k` and `k+1`), `nodals[k]` is face `k`.
#[derive(Debug, Clone, Copy)]
pub struct SliceWindow<'a> {
    pub averages: &'a [f64],
    pub nodals: &'a [f64],
    pub face: usize,
}

impl Window for SliceWindow<'_> {
    fn average(&self, offset: i32) -> Option<f64> {
        let idx = self.face as i64 + offset as i64 - 1;
        usize::try_from(idx).ok().and_then(|i| self.averages.get(i).copied())
    }

    fn nodal(&self, offset: i32) -> Option<f64> {
        let idx = self.face as i64 + offset as i64;
        usize::try_from(idx).ok().and_then(|i| self.nodals.get(i).copied())
    }
}

/// Looks up a catalog entry by identifier (case-insensitive).
pub fn catalog(name: &str) -> Result<Stencil, DdoError> {
    for (backward, forward, terms) in BACKWARD_ENTRIES.iter() {
        let is_back = backward.eq_ignore_ascii_case(name);
        let is_fwd = forward.eq_ignore_ascii_case(name);
        if !(is_back || is_fwd) {
            continue;
        }
        let base = Stencil::new(
            *backward,
            terms.iter().map(|&(kind, offset, num, den)| Term {
                kind,
                offset,
                coeff: Rational64::new(num, den),
            }),
        )
        .expect("catalog entries are non-empty");
        return Ok(if is_back { base } else { base.mirrored(*forward) });
    }
    Err(DdoError::UnknownStencil {
        name: name.to_string(),
        valid: CATALOG_NAMES.iter().map(|s| s.to_string()).collect(),
    })
}

/// All twelve catalog entries in table order.
pub fn catalog_all() -> Vec<Stencil> {
    CATALOG_NAMES
        .iter()
        .map(|n| catalog(n).expect("catalog name"))
        .collect()
}

/// Name of the mirrored partner of a catalog entry (backward <-> forward).
pub fn mirror_name(name: &str) -> Option<&'static str> {
    BACKWARD_ENTRIES.iter().find_map(|(b, f, _)| {
        if b.eq_ignore_ascii_case(name) {
            Some(*f)
        } else if f.eq_ignore_ascii_case(name) {
            Some(*b)
        } else {
            None
        }
    })
}

/// Result of the moment analysis of a stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    /// Designed order `p`; 0 when the stencil is not consistent.
    pub designed_order: usize,
    /// `c_p = a_{p+1} + b_{p+1}`. Zero only if the conditions held up to `max_order + 1`.
    pub leading_error: Rational64,
    pub moments_a: Vec<Rational64>,
    pub moments_b: Vec<Rational64>,
    /// `None` when every computed `b_m` vanishes in the pattern that defines `s >= 2`.
    pub s_beta: Option<usize>,
}

impl OrderReport {
    pub fn leading_error_f64(&self) -> f64 {
        rational_to_f64(self.leading_error)
    }

    pub fn b0(&self) -> Rational64 {
        self.moments_b[0]
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product::<i64>().max(1)
}

fn ipow(base: i64, exp: usize) -> Rational64 {
    Rational64::from_integer(base.pow(exp as u32))
}

/// `a_m = sum_l (l^{m+1} - (l-1)^{m+1}) alpha_l / (m+1)!`
pub fn moment_a(stencil: &Stencil, m: usize) -> Rational64 {
    let s: Rational64 = stencil
        .alpha()
        .map(|(l, c)| (ipow(l as i64, m + 1) - ipow(l as i64 - 1, m + 1)) * c)
        .sum();
    s / Rational64::from_integer(factorial(m + 1))
}

/// `b_m = sum_l l^m beta_l / m!`
pub fn moment_b(stencil: &Stencil, m: usize) -> Rational64 {
    let s: Rational64 = stencil.beta().map(|(l, c)| ipow(l as i64, m) * c).sum();
    s / Rational64::from_integer(factorial(m))
}

/// Determines the designed order, leading error constant and `s_beta`.
pub fn analyze(stencil: &Stencil, max_order: usize) -> Result<OrderReport, DdoError> {
    if !(1..=MAX_ANALYZED_ORDER).contains(&max_order) {
        return Err(DdoError::BadOrder(max_order));
    }
    let a: Vec<Rational64> = (0..=max_order + 1).map(|m| moment_a(stencil, m)).collect();
    let b: Vec<Rational64> = (0..=max_order + 1).map(|m| moment_b(stencil, m)).collect();
    let sum = |m: usize| a[m] + b[m];

    let s_beta = if !b[0].is_zero() {
        Some(0)
    } else if b[1] != Rational64::from_integer(2) {
        Some(1)
    } else {
        (2..b.len()).find(|&s| !b[s].is_zero())
    };

    if !sum(0).is_zero() || !sum(1).is_one() {
        return Ok(OrderReport {
            designed_order: 0,
            leading_error: sum(0),
            moments_a: a[..2].to_vec(),
            moments_b: b[..2].to_vec(),
            s_beta,
        });
    }
    let mut p = 1;
    while p < max_order && sum(p + 1).is_zero() {
        p += 1;
    }
    Ok(OrderReport {
        designed_order: p,
        leading_error: sum(p + 1),
        moments_a: a[..=p + 1].to_vec(),
        moments_b: b[..=p + 1].to_vec(),
        s_beta,
    })
}

/// Upwind direction a stencil serves: `Backward` reads mostly upstream data
/// for positive wave speeds (`b_0 > 0`), `Forward` the mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Backward,
    Forward,
}

impl Stencil {
    pub fn direction(&self) -> Direction {
        if self.b0().is_negative() {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }
}

/// A backward-family stencil paired with its mirrored forward partner, as
/// used for characteristic-wise upwinding.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilFamily {
    pub backward: Stencil,
    pub forward: Stencil,
    pub order: usize,
}

impl StencilFamily {
    /// Accepts either member's identifier, e.g. `"3rd-B-biased"` or `"3rd-F-biased"`.
    pub fn from_name(name: &str) -> Result<Self, DdoError> {
        let s = catalog(name)?;
        let partner = catalog(mirror_name(s.name()).expect("catalog entries have partners"))?;
        let (backward, forward) = match s.direction() {
            Direction::Backward => (s, partner),
            Direction::Forward => (partner, s),
        };
        let order = backward
            .analyze(MAX_ANALYZED_ORDER)
            .map(|r| r.designed_order)
            .unwrap_or(0);
        Ok(Self {
            backward,
            forward,
            order,
        })
    }

    pub fn get(&self, dir: Direction) -> &Stencil {
        match dir {
            Direction::Backward => &self.backward,
            Direction::Forward => &self.forward,
        }
    }
}
