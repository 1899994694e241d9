//! Underlying spaces and their finite sample grids.
//!
//! A [`DomainSpec`] is a domain kind plus a deterministic grid: polar rings
//! for discs, uniformly spaced angles for circles, log-spaced rings for the
//! punctured plane, consecutive integers for lattices. Grids are sampling
//! devices; membership is a predicate with a tolerance slack and is not
//! restricted to grid points.
//!
//! Lattice ranges stand in for the (unbounded) integer spaces: a range whose
//! lower end is at least 0 models the half-line, anything else models the
//! full line. The compactified variants add a single point at infinity whose
//! value under a function is estimated from the outermost samples with a
//! Cauchy check.

use crate::expr::{EvalError, Expression};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Tolerance of the Cauchy test used to assign a value at the point at
/// infinity of a compactified lattice.
pub const INFINITY_CAUCHY_TOL: f64 = 1e-8;

/// Outermost ring radius sampled inside the open punctured unit disc.
const PUNCTURED_DISC_OUTER: f64 = 0.95;

/// The supported underlying spaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum DomainKind {
    /// Closed disc of the given radius centred at 0.
    ClosedDisc { radius: f64 },
    /// Circle of the given radius centred at 0.
    Circle { radius: f64 },
    /// Open unit disc with the origin removed. Grids stay outside the
    /// given neighbourhood of the puncture.
    PuncturedDisc { inner_cutoff: f64 },
    /// Complex plane with the origin removed. Grids sample the annulus
    /// between the two cutoffs.
    PuncturedPlane { inner_cutoff: f64, outer_cutoff: f64 },
    /// Consecutive integers. `lo >= 0` models the half-line.
    Lattice { lo: i64, hi: i64 },
    /// Lattice plus a one-point compactification marker.
    CompactifiedLattice { lo: i64, hi: i64 },
}

/// A point of a domain: a complex number, a lattice index, or the point at
/// infinity of a compactified lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DomainPoint {
    Complex(Complex64),
    Index(i64),
    Infinity,
}

impl DomainPoint {
    /// Complex representative, if the point is finite.
    pub fn to_complex(self) -> Option<Complex64> {
        match self {
            DomainPoint::Complex(c) => Some(c),
            DomainPoint::Index(j) => Some(Complex64::new(j as f64, 0.0)),
            DomainPoint::Infinity => None,
        }
    }
}

impl std::fmt::Display for DomainPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainPoint::Complex(c) => write!(f, "({}, {})", c.re, c.im),
            DomainPoint::Index(j) => write!(f, "lattice point {j}"),
            DomainPoint::Infinity => write!(f, "the point at infinity"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DomainError {
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
}

/// Failure when a function is evaluated at a domain point.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum PointEvalError {
    #[error("evaluation failed: {0}")]
    Expr(#[from] EvalError),
    #[error("tail is not Cauchy at {INFINITY_CAUCHY_TOL:e}; no value at infinity")]
    TailNotCauchy,
    #[error("the two tails disagree; no value at infinity")]
    TailsDisagree,
    #[error("this domain has no point at infinity")]
    NoInfinity,
}

/// A domain kind with its grid, membership tolerance and resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub resolution: u32,
    pub tolerance: f64,
    grid: Vec<DomainPoint>,
}

/// One self-map violation: a grid point whose image fell outside the domain
/// or could not be evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfMapViolation {
    pub point: DomainPoint,
    pub image: Option<Complex64>,
    pub reason: String,
}

/// Outcome of sweeping the symbol over the grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SelfMapReport {
    pub violations: Vec<SelfMapViolation>,
}

impl SelfMapReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl DomainKind {
    /// Builds the deterministic grid. `resolution` means rings for discs and
    /// annuli and the number of angles for circles; it must be at least 8.
    /// Lattice grids are the stated range regardless of resolution.
    pub fn build(self, resolution: u32, tolerance: f64) -> Result<DomainSpec, DomainError> {
        if !(tolerance > 0.0) {
            return Err(DomainError::Degenerate(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if resolution < 8 {
            return Err(DomainError::Degenerate(format!(
                "resolution must be at least 8, got {resolution}"
            )));
        }
        let n = resolution as usize;
        let mut grid = Vec::new();
        match self {
            DomainKind::ClosedDisc { radius } => {
                if !(radius > 0.0) {
                    return Err(DomainError::Degenerate(format!(
                        "radius must be positive, got {radius}"
                    )));
                }
                grid.push(DomainPoint::Complex(Complex64::new(0.0, 0.0)));
                for k in 1..=n {
                    let rho = radius * k as f64 / n as f64;
                    push_ring(&mut grid, rho, 4 * n);
                }
            }
            DomainKind::Circle { radius } => {
                if !(radius > 0.0) {
                    return Err(DomainError::Degenerate(format!(
                        "radius must be positive, got {radius}"
                    )));
                }
                push_ring(&mut grid, radius, n);
            }
            DomainKind::PuncturedDisc { inner_cutoff } => {
                if !(inner_cutoff > 0.0 && inner_cutoff < PUNCTURED_DISC_OUTER) {
                    return Err(DomainError::Degenerate(format!(
                        "inner cutoff must lie in (0, {PUNCTURED_DISC_OUTER}), got {inner_cutoff}"
                    )));
                }
                for k in 0..n {
                    let t = k as f64 / (n - 1) as f64;
                    let rho = inner_cutoff + (PUNCTURED_DISC_OUTER - inner_cutoff) * t;
                    push_ring(&mut grid, rho, 4 * n);
                }
            }
            DomainKind::PuncturedPlane {
                inner_cutoff,
                outer_cutoff,
            } => {
                if !(inner_cutoff > 0.0 && outer_cutoff > inner_cutoff) {
                    return Err(DomainError::Degenerate(format!(
                        "need 0 < inner < outer, got {inner_cutoff}, {outer_cutoff}"
                    )));
                }
                let ratio = outer_cutoff / inner_cutoff;
                for k in 0..n {
                    let t = k as f64 / (n - 1) as f64;
                    let rho = inner_cutoff * ratio.powf(t);
                    push_ring(&mut grid, rho, 4 * n);
                }
            }
            DomainKind::Lattice { lo, hi } | DomainKind::CompactifiedLattice { lo, hi } => {
                if lo > hi {
                    return Err(DomainError::Degenerate(format!(
                        "empty lattice range [{lo}, {hi}]"
                    )));
                }
                grid.extend((lo..=hi).map(DomainPoint::Index));
                if matches!(self, DomainKind::CompactifiedLattice { .. }) {
                    grid.push(DomainPoint::Infinity);
                }
            }
        }
        Ok(DomainSpec {
            kind: self,
            resolution,
            tolerance,
            grid,
        })
    }

    /// Whether the underlying space (not the grid) is compact.
    pub fn is_compact(self) -> bool {
        matches!(
            self,
            DomainKind::ClosedDisc { .. }
                | DomainKind::Circle { .. }
                | DomainKind::CompactifiedLattice { .. }
        )
    }

    pub fn is_lattice(self) -> bool {
        matches!(
            self,
            DomainKind::Lattice { .. } | DomainKind::CompactifiedLattice { .. }
        )
    }
}

fn push_ring(grid: &mut Vec<DomainPoint>, rho: f64, angles: usize) {
    for j in 0..angles {
        let theta = TAU * j as f64 / angles as f64;
        grid.push(DomainPoint::Complex(Complex64::new(
            rho * theta.cos(),
            rho * theta.sin(),
        )));
    }
}

impl DomainSpec {
    pub fn grid(&self) -> &[DomainPoint] {
        &self.grid
    }

    /// Finite grid points as complex numbers, in grid order.
    pub fn complex_grid(&self) -> Vec<Complex64> {
        self.grid.iter().filter_map(|p| p.to_complex()).collect()
    }

    /// Membership with tolerance slack. Only the marker of a compactified
    /// lattice counts as the point at infinity.
    pub fn contains(&self, p: DomainPoint) -> bool {
        let tol = self.tolerance;
        match (self.kind, p) {
            (DomainKind::CompactifiedLattice { .. }, DomainPoint::Infinity) => true,
            (_, DomainPoint::Infinity) => false,
            (kind, p) => {
                let c = p.to_complex().expect("finite point");
                match kind {
                    DomainKind::ClosedDisc { radius } => c.norm() <= radius + tol,
                    DomainKind::Circle { radius } => (c.norm() - radius).abs() <= tol,
                    DomainKind::PuncturedDisc { .. } => {
                        c.norm() > tol && c.norm() <= 1.0 + tol
                    }
                    DomainKind::PuncturedPlane { .. } => c.norm() > tol,
                    DomainKind::Lattice { lo, .. }
                    | DomainKind::CompactifiedLattice { lo, .. } => {
                        let j = c.re.round();
                        let integral = c.im.abs() <= tol && (c.re - j).abs() <= tol;
                        integral && (lo < 0 || j >= 0.0)
                    }
                }
            }
        }
    }

    /// Snaps a complex image back onto the domain's point representation:
    /// lattice images within tolerance of an integer become indices.
    pub fn classify_image(&self, c: Complex64) -> DomainPoint {
        if self.kind.is_lattice() {
            let j = c.re.round();
            if c.im.abs() <= self.tolerance && (c.re - j).abs() <= self.tolerance {
                return DomainPoint::Index(j as i64);
            }
        }
        DomainPoint::Complex(c)
    }

    /// Sweeps `phi` over the grid and records every point whose image leaves
    /// the domain or fails to evaluate. The infinity marker is fixed by
    /// convention and is skipped.
    pub fn self_map_check(&self, phi: &Expression) -> SelfMapReport {
        let mut report = SelfMapReport::default();
        for &p in &self.grid {
            let c = match p.to_complex() {
                Some(c) => c,
                None => continue,
            };
            match phi.eval(c) {
                Ok(image) => {
                    let image_point = self.classify_image(image);
                    if !self.contains(image_point) {
                        report.violations.push(SelfMapViolation {
                            point: p,
                            image: Some(image),
                            reason: "image outside the domain".to_string(),
                        });
                    }
                }
                Err(e) => report.violations.push(SelfMapViolation {
                    point: p,
                    image: None,
                    reason: e.to_string(),
                }),
            }
        }
        report
    }

    /// Evaluates `f` at a domain point. At the infinity marker the value is
    /// the estimated limit over the outermost lattice samples; the estimate
    /// requires the tail (both tails, on a full line) to be Cauchy at
    /// [`INFINITY_CAUCHY_TOL`] and, on a full line, to agree.
    pub fn eval_at(&self, f: &Expression, p: DomainPoint) -> Result<Complex64, PointEvalError> {
        match p {
            DomainPoint::Complex(c) => Ok(f.eval(c)?),
            DomainPoint::Index(j) => Ok(f.eval(Complex64::new(j as f64, 0.0))?),
            DomainPoint::Infinity => match self.kind {
                DomainKind::CompactifiedLattice { lo, hi } => {
                    let up = tail_limit(f, (0..10).map(|m| hi - 9 + m).filter(|j| *j >= lo))?;
                    if lo < 0 {
                        let down =
                            tail_limit(f, (0..10).map(|m| lo + 9 - m).filter(|j| *j <= hi))?;
                        if (up - down).norm() > INFINITY_CAUCHY_TOL {
                            return Err(PointEvalError::TailsDisagree);
                        }
                    }
                    Ok(up)
                }
                _ => Err(PointEvalError::NoInfinity),
            },
        }
    }
}

/// Limit estimate along indices marching towards the range end. The last
/// value is returned once consecutive differences stay within tolerance.
fn tail_limit(
    f: &Expression,
    js: impl Iterator<Item = i64>,
) -> Result<Complex64, PointEvalError> {
    let values: Vec<Complex64> = js
        .map(|j| f.eval(Complex64::new(j as f64, 0.0)))
        .collect::<Result<_, _>>()?;
    if values.len() < 2 {
        return Err(PointEvalError::TailNotCauchy);
    }
    for pair in values.windows(2) {
        if (pair[1] - pair[0]).norm() > INFINITY_CAUCHY_TOL {
            return Err(PointEvalError::TailNotCauchy);
        }
    }
    Ok(*values.last().expect("nonempty"))
}
