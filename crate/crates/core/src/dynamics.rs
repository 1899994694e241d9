//! Orbit machinery for the symbol: iteration and classification, fixed and
//! periodic points with local refinement, Denjoy-Wolff limits on the closed
//! disc, stable-orbit and runaway certificates, and rotation numbers of
//! circle maps computed through monotone lifts.

use crate::domains::{DomainKind, DomainPoint, DomainSpec};
use crate::expr::{EvalError, Expression};
use crate::params::Params;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;
use thiserror::Error;

/// Orbits whose modulus exceeds this are treated as escaping even on
/// unbounded domains.
pub const ESCAPE_MODULUS: f64 = 1e12;

/// Fixed-point residual accepted as a precondition (before refinement).
pub const FIXED_POINT_PRE: f64 = 1e-8;

/// Number of fine-grid samples used to build circle lifts.
const LIFT_GRID: usize = 4096;

/// Classification of a finite orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum OrbitClass {
    ConvergesTo { limit: Complex64 },
    Periodic { period: usize },
    Escaping { step: usize },
    Unresolved,
}

/// An orbit together with its classification and last-step residual.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitTrace {
    pub start: Complex64,
    pub points: Vec<Complex64>,
    pub class: OrbitClass,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DynamicsError {
    #[error("this check needs a closed disc domain")]
    NeedsDisc,
    #[error("this check needs a circle domain")]
    NeedsCircle,
    #[error("{0} is not a fixed point: residual {1:e} exceeds {FIXED_POINT_PRE:e}")]
    NotFixed(Complex64, f64),
    #[error("grid has only {found} points within radius {radius}; at least {needed} are required")]
    AccumulationProxy { radius: f64, found: usize, needed: usize },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("not an orientation-preserving circle homeomorphism: {0}")]
    NotHomeomorphism(String),
    #[error("lift displacement spans almost a full turn; branch selection is ambiguous")]
    DegenerateLift,
}

/// Iterates the symbol from `start`, aborting when the orbit leaves the
/// domain, fails to evaluate, or exceeds [`ESCAPE_MODULUS`]. The trace
/// contains the start as its first point.
pub fn iterate(
    phi: &Expression,
    domain: &DomainSpec,
    start: DomainPoint,
    steps: usize,
    params: &Params,
) -> OrbitTrace {
    let c0 = match start.to_complex() {
        Some(c) => c,
        None => {
            return OrbitTrace {
                start: Complex64::new(f64::NAN, f64::NAN),
                points: Vec::new(),
                class: OrbitClass::Unresolved,
                residual: f64::NAN,
            }
        }
    };
    let mut points = Vec::with_capacity(steps + 1);
    points.push(c0);
    let mut class = None;
    for k in 1..=steps {
        let prev = *points.last().expect("nonempty");
        match phi.eval(prev) {
            Ok(next) => {
                if !domain.contains(domain.classify_image(next)) || next.norm() > ESCAPE_MODULUS
                {
                    class = Some(OrbitClass::Escaping { step: k });
                    points.push(next);
                    break;
                }
                points.push(next);
            }
            Err(_) => {
                class = Some(OrbitClass::Escaping { step: k });
                break;
            }
        }
    }
    let residual = match points.len() {
        0 | 1 => 0.0,
        n => (points[n - 1] - points[n - 2]).norm(),
    };
    let class = class.unwrap_or_else(|| classify_tail(&points, params));
    OrbitTrace {
        start: c0,
        points,
        class,
        residual,
    }
}

fn classify_tail(points: &[Complex64], params: &Params) -> OrbitClass {
    let tol = params.tolerances.cauchy;
    let window = params.horizons.cauchy_window.max(2);
    if points.len() >= window {
        let tail = &points[points.len() - window..];
        if tail
            .windows(2)
            .all(|p| (p[1] - p[0]).norm() <= tol)
        {
            return OrbitClass::ConvergesTo {
                limit: *tail.last().expect("nonempty"),
            };
        }
    }
    let burn = params.horizons.burn_in.min(points.len().saturating_sub(2));
    for p in 1..=params.horizons.max_period {
        if points.len() < burn + 2 * p + 1 {
            break;
        }
        let ok = (burn..points.len() - p)
            .all(|k| (points[k + p] - points[k]).norm() <= params.tolerances.periodic_residual);
        if ok {
            return OrbitClass::Periodic { period: p };
        }
    }
    OrbitClass::Unresolved
}

/// Secant refinement of a root of `g`. Returns the final iterate when it is
/// finite; the caller re-checks the residual.
fn secant_refine<G: Fn(Complex64) -> Option<Complex64>>(
    g: G,
    seed: Complex64,
) -> Option<Complex64> {
    let mut z0 = seed;
    let mut g0 = g(z0)?;
    if g0.norm() == 0.0 {
        return Some(z0);
    }
    let mut z1 = seed + Complex64::new(1e-6 * (1.0 + seed.norm()), 0.0);
    let mut g1 = g(z1)?;
    for _ in 0..64 {
        if g1.norm() <= 1e-13 * (1.0 + z1.norm()) {
            break;
        }
        let denom = g1 - g0;
        if denom.norm() < 1e-300 {
            break;
        }
        let z2 = z1 - g1 * (z1 - z0) / denom;
        if !z2.re.is_finite() || !z2.im.is_finite() {
            return None;
        }
        z0 = z1;
        g0 = g1;
        z1 = z2;
        g1 = g(z1)?;
    }
    Some(z1)
}

fn dedup_sorted(mut points: Vec<Complex64>, cluster: f64) -> Vec<Complex64> {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<Complex64> = Vec::new();
    for p in points {
        if out.iter().all(|q| (p - q).norm() > cluster) {
            out.push(p);
        }
    }
    out
}

/// Fixed points found by scanning the grid and refining each candidate with
/// a secant iteration on `phi(z) - z`. Accepted points have residual below
/// the configured threshold, lie in the domain, and duplicates within the
/// cluster radius are merged. Lattice domains are scanned exactly.
pub fn find_fixed_points(
    phi: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> Vec<DomainPoint> {
    let tol = params.tolerances.fixed_point_residual;
    if domain.kind.is_lattice() {
        let mut out = Vec::new();
        for &p in domain.grid() {
            if let Some(c) = p.to_complex() {
                if let Ok(img) = phi.eval(c) {
                    if (img - c).norm() <= tol {
                        out.push(p);
                    }
                }
            }
        }
        return out;
    }
    let g = |z: Complex64| phi.eval(z).ok().map(|w| w - z);
    let seeds = strided(&domain.complex_grid(), 512);
    let mut found = Vec::new();
    for seed in seeds {
        if let Some(z) = secant_refine(g, seed) {
            if let Some(r) = g(z) {
                if r.norm() <= tol && domain.contains(DomainPoint::Complex(z)) {
                    found.push(z);
                }
            }
        }
    }
    dedup_sorted(found, 1e-6)
        .into_iter()
        .map(DomainPoint::Complex)
        .collect()
}

/// A periodic point with its minimal period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodicPoint {
    pub point: Complex64,
    pub period: usize,
    pub residual: f64,
}

/// Periodic points of minimal period between 2 and `max_period`, found by a
/// grid scan plus secant refinement of `phi^p(z) - z`. Minimality is
/// enforced against every divisor of the period.
pub fn find_periodic_points(
    phi: &Expression,
    domain: &DomainSpec,
    max_period: usize,
    params: &Params,
) -> Vec<PeriodicPoint> {
    let tol = params.tolerances.periodic_residual;
    let iter_p = |z: Complex64, p: usize| -> Option<Complex64> {
        let mut w = z;
        for _ in 0..p {
            w = phi.eval(w).ok()?;
        }
        Some(w)
    };
    let minimal = |z: Complex64, p: usize| -> bool {
        (1..p)
            .filter(|q| p % q == 0)
            .all(|q| iter_p(z, q).map_or(false, |w| (w - z).norm() > tol))
    };

    if domain.kind.is_lattice() {
        let mut out = Vec::new();
        for &gp in domain.grid() {
            if let Some(c) = gp.to_complex() {
                for p in 2..=max_period {
                    if let Some(w) = iter_p(c, p) {
                        let r = (w - c).norm();
                        if r <= tol && minimal(c, p) {
                            out.push(PeriodicPoint {
                                point: c,
                                period: p,
                                residual: r,
                            });
                            break;
                        }
                    }
                }
            }
        }
        return out;
    }

    let mut found: Vec<PeriodicPoint> = Vec::new();
    for seed in strided(&domain.complex_grid(), 512) {
        // Coarse scan for a candidate period.
        let mut candidate = None;
        let mut w = seed;
        for p in 1..=max_period {
            w = match phi.eval(w) {
                Ok(w) => w,
                Err(_) => break,
            };
            if (w - seed).norm() <= 1e-6 {
                candidate = Some(p);
                break;
            }
        }
        let p = match candidate {
            Some(p) if p >= 2 => p,
            _ => continue,
        };
        let g = |z: Complex64| iter_p(z, p).map(|w| w - z);
        if let Some(z) = secant_refine(g, seed) {
            if let Some(r) = g(z) {
                let r = r.norm();
                if r <= tol
                    && domain.contains(DomainPoint::Complex(z))
                    && minimal(z, p)
                    && found
                        .iter()
                        .all(|q| q.period != p || (q.point - z).norm() > 1e-6)
                {
                    found.push(PeriodicPoint {
                        point: z,
                        period: p,
                        residual: r,
                    });
                }
            }
        }
    }
    found.sort_by(|a, b| {
        a.period
            .cmp(&b.period)
            .then(a.point.re.total_cmp(&b.point.re))
            .then(a.point.im.total_cmp(&b.point.im))
    });
    found
}

fn strided(points: &[Complex64], cap: usize) -> Vec<Complex64> {
    if points.len() <= cap {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(cap);
    points.iter().copied().step_by(stride).collect()
}

/// Outcome of the Denjoy-Wolff iteration on the closed disc.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum DenjoyWolff {
    /// All seeds converged to a common point.
    Point {
        point: Complex64,
        boundary: bool,
        agreement: f64,
    },
    /// Orbits failed to settle or disagreed; elliptic or identity-like
    /// symbols land here by design.
    NotApplicable { reason: String },
}

/// Runs the orbit iteration from a fixed set of interior seeds and reports
/// the common limit if every orbit converges to the same point.
pub fn denjoy_wolff(
    phi: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> Result<DenjoyWolff, DynamicsError> {
    let radius = match domain.kind {
        DomainKind::ClosedDisc { radius } => radius,
        _ => return Err(DynamicsError::NeedsDisc),
    };
    let seeds = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.5, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(0.0, -0.5),
        Complex64::new(0.25, 0.25),
    ]
    .map(|s| s * radius);
    let mut limits = Vec::new();
    for seed in seeds {
        let trace = iterate(
            phi,
            domain,
            DomainPoint::Complex(seed),
            params.horizons.orbit_n,
            params,
        );
        match trace.class {
            OrbitClass::ConvergesTo { limit } => limits.push(limit),
            other => {
                return Ok(DenjoyWolff::NotApplicable {
                    reason: format!("orbit from {seed} did not settle ({other:?})"),
                })
            }
        }
    }
    let mut agreement: f64 = 0.0;
    for i in 0..limits.len() {
        for j in i + 1..limits.len() {
            agreement = agreement.max((limits[i] - limits[j]).norm());
        }
    }
    if agreement > params.tolerances.dw_agreement {
        return Ok(DenjoyWolff::NotApplicable {
            reason: format!("seed limits disagree by {agreement:e}"),
        });
    }
    let mean = limits.iter().sum::<Complex64>() / limits.len() as f64;
    Ok(DenjoyWolff::Point {
        point: mean,
        boundary: mean.norm() >= radius * (1.0 - 1e-6),
        agreement,
    })
}

/// One tested radius of the stable-orbit certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StableRadius {
    pub radius: f64,
    pub invariant: bool,
    pub points_checked: usize,
}

/// Checks whether the grid trace of each ball `B(z0, r)` is mapped into
/// itself. `z0` must already be a fixed point to [`FIXED_POINT_PRE`], and
/// the grid must contain at least 8 points within every tested radius (the
/// finite stand-in for `z0` being an accumulation point).
pub fn stable_orbit_check(
    phi: &Expression,
    domain: &DomainSpec,
    z0: Complex64,
    radii: &[f64],
    params: &Params,
) -> Result<Vec<StableRadius>, DynamicsError> {
    let pre = (phi.eval(z0)? - z0).norm();
    if pre > FIXED_POINT_PRE {
        return Err(DynamicsError::NotFixed(z0, pre));
    }
    let grid = domain.complex_grid();
    let mut out = Vec::new();
    for &radius in radii {
        let ball: Vec<Complex64> = grid
            .iter()
            .copied()
            .filter(|p| (p - z0).norm() <= radius)
            .collect();
        if ball.len() < 8 {
            return Err(DynamicsError::AccumulationProxy {
                radius,
                found: ball.len(),
                needed: 8,
            });
        }
        let mut invariant = true;
        for p in &ball {
            match phi.eval(*p) {
                Ok(img) if (img - z0).norm() <= radius + params.tolerances.membership => {}
                _ => {
                    invariant = false;
                    break;
                }
            }
        }
        out.push(StableRadius {
            radius,
            invariant,
            points_checked: ball.len(),
        });
    }
    Ok(out)
}

/// Outcome of the finite-horizon runaway certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum RunawayOutcome {
    /// Images stayed separated from the base set from `n0` to the horizon.
    Runaway { n0: usize, horizon: usize },
    /// Images kept coming back up to the horizon.
    Returns { last_return: usize, returns: Vec<usize> },
    /// The horizon was too short to tell.
    Unresolved { reason: String },
}

/// Steps the sampled compact set `k_set` through the symbol and measures its
/// distance to the original samples. `separation` is the distance below
/// which the image is considered to meet the set again; it should be of the
/// order of the sample spacing.
pub fn strongly_runaway(
    phi: &Expression,
    k_set: &[Complex64],
    horizon: usize,
    separation: f64,
) -> RunawayOutcome {
    if k_set.is_empty() || horizon == 0 {
        return RunawayOutcome::Unresolved {
            reason: "empty set or zero horizon".to_string(),
        };
    }
    let mut current = k_set.to_vec();
    let mut returns = Vec::new();
    for n in 1..=horizon {
        for p in current.iter_mut() {
            match phi.eval(*p) {
                Ok(img) => *p = img,
                Err(e) => {
                    return RunawayOutcome::Unresolved {
                        reason: format!("evaluation failed at step {n}: {e}"),
                    }
                }
            }
        }
        let dist = current
            .iter()
            .flat_map(|a| k_set.iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        if dist <= separation {
            returns.push(n);
        }
    }
    match returns.last().copied() {
        None => RunawayOutcome::Runaway {
            n0: 1,
            horizon,
        },
        Some(last) if horizon - last >= 16 => RunawayOutcome::Runaway {
            n0: last + 1,
            horizon,
        },
        Some(last) if horizon >= 32 => {
            returns.truncate(8);
            RunawayOutcome::Returns {
                last_return: last,
                returns,
            }
        }
        Some(_) => RunawayOutcome::Unresolved {
            reason: format!("horizon {horizon} too short"),
        },
    }
}

/// Deterministic samples of a closed ball, used as the compact set of
/// runaway certificates.
pub fn sample_disc(center: Complex64, radius: f64, rings: usize) -> Vec<Complex64> {
    let mut out = vec![center];
    for k in 1..=rings {
        let rho = radius * k as f64 / rings as f64;
        let angles = 8 * k;
        for j in 0..angles {
            let theta = TAU * j as f64 / angles as f64;
            out.push(center + Complex64::from_polar(rho, theta));
        }
    }
    out
}

/// Rotation number data for an orientation-preserving circle homeomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct RotationReport {
    /// Estimate in [0, 1), averaged over the seeds.
    pub rotation_number: f64,
    /// Largest pairwise circular distance between per-seed estimates.
    pub confidence: f64,
    /// Set when the estimate is within 1e-4 of p/q with q <= 32.
    pub likely_rational: Option<(u32, u32)>,
    /// Lift orbit of the first seed (first 1024 values) for traces.
    pub lift_samples: Vec<f64>,
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// Computes the rotation number of the angle map induced by `phi` on the
/// circle of the given radius: a monotone lift is built on a fine grid,
/// checked for degree one, and iterated from three seeds.
pub fn rotation_number(
    phi: &Expression,
    radius: f64,
    steps: usize,
    _params: &Params,
) -> Result<RotationReport, DynamicsError> {
    let angle = |theta: f64| -> Result<f64, DynamicsError> {
        let z = Complex64::from_polar(radius, TAU * theta);
        let w = phi.eval(z)?;
        Ok(frac(w.arg() / TAU))
    };

    // Unwrapped lift on the fine grid.
    let m = LIFT_GRID;
    let mut lift = Vec::with_capacity(m + 1);
    let psi0 = angle(0.0)?;
    lift.push(psi0);
    for j in 1..=m {
        let theta = j as f64 / m as f64;
        let psi = if j == m { psi0 + 0.0 } else { angle(theta)? };
        let prev = lift[j - 1];
        let k = (prev - psi).round();
        lift.push(psi + k);
    }
    // Sequential unwrapping is exact while the map moves features by less
    // than half a turn between neighbouring grid angles, so the winding of
    // the closed-up lift is the degree.
    let mut winding = lift[m] - lift[0];
    if (winding - winding.round()).abs() > 0.25 {
        return Err(DynamicsError::NotHomeomorphism(format!(
            "lift does not close up (winding {winding:.3})"
        )));
    }
    winding = winding.round();
    if winding == -1.0 {
        return Err(DynamicsError::NotHomeomorphism(
            "orientation-reversing".to_string(),
        ));
    }
    if winding != 1.0 {
        return Err(DynamicsError::NotHomeomorphism(format!(
            "degree {winding}"
        )));
    }
    for w in lift.windows(2) {
        if w[1] < w[0] - 1e-9 {
            return Err(DynamicsError::NotHomeomorphism(
                "lift is not monotone".to_string(),
            ));
        }
    }

    // Displacement range; must be well inside one turn for unambiguous
    // branch selection at orbit points.
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for (j, l) in lift.iter().enumerate().take(m) {
        let d = l - j as f64 / m as f64;
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    if dmax - dmin >= 0.98 {
        return Err(DynamicsError::DegenerateLift);
    }
    let mid = 0.5 * (dmin + dmax);

    let displacement = |theta: f64| -> Result<f64, DynamicsError> {
        let raw = angle(theta)? - theta;
        let k = (mid - raw).round();
        let d = raw + k;
        if d < dmin - 0.01 || d > dmax + 0.01 {
            return Err(DynamicsError::DegenerateLift);
        }
        Ok(d)
    };

    let seeds = [0.0, 1.0 / 3.0, 2.0 / 3.0];
    let mut estimates = Vec::new();
    let mut lift_samples = Vec::new();
    for (si, seed) in seeds.iter().enumerate() {
        let mut x = *seed;
        for step in 0..steps {
            if si == 0 && step < 1024 {
                lift_samples.push(x);
            }
            x += displacement(frac(x))?;
        }
        estimates.push(frac((x - seed) / steps as f64));
    }
    let base = estimates[0];
    let mut confidence: f64 = 0.0;
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            confidence = confidence.max(circ_dist(estimates[i], estimates[j]));
        }
    }
    let mean_offset: f64 = estimates
        .iter()
        .map(|e| {
            let d = frac(e - base);
            if d > 0.5 {
                d - 1.0
            } else {
                d
            }
        })
        .sum::<f64>()
        / estimates.len() as f64;
    let rho = frac(base + mean_offset);

    let mut likely_rational = None;
    'outer: for q in 1..=32u32 {
        for p in 0..=q {
            if circ_dist(rho, p as f64 / q as f64) <= 1e-4 {
                let g = gcd(p.max(1), q);
                likely_rational = Some((p / g.max(1), q / g.max(1)));
                break 'outer;
            }
        }
    }

    Ok(RotationReport {
        rotation_number: rho,
        confidence,
        likely_rational,
        lift_samples,
    })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn expr(s: &str) -> Expression {
        Expression::parse(s).expect("parses")
    }

    fn disc() -> DomainSpec {
        DomainKind::ClosedDisc { radius: 1.0 }
            .build(64, 1e-9)
            .expect("valid")
    }

    #[test]
    fn orbit_trace_agrees_with_direct_evaluation() {
        let phi = expr("(z+0.5)/(1+0.5*z)");
        let trace = iterate(
            &phi,
            &disc(),
            DomainPoint::Complex(Complex64::new(0.0, 0.3)),
            40,
            &Params::default(),
        );
        assert_eq!(trace.points.len(), 41);
        assert_eq!(trace.points[0], Complex64::new(0.0, 0.3));
        for k in 0..40 {
            assert_eq!(trace.points[k + 1], phi.eval(trace.points[k]).unwrap());
        }
    }

    #[test]
    fn contraction_orbit_converges_to_its_algebraic_fixed_point() {
        // z/2 + 1/4 has the unique fixed point 1/2.
        let trace = iterate(
            &expr("z/2 + 0.25"),
            &disc(),
            DomainPoint::Complex(Complex64::new(0.0, 0.0)),
            256,
            &Params::default(),
        );
        match trace.class {
            OrbitClass::ConvergesTo { limit } => {
                assert!((limit - Complex64::new(0.5, 0.0)).norm() < 1e-8)
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn translation_orbit_escapes_and_records_the_exit_point() {
        let trace = iterate(
            &expr("z+1"),
            &disc(),
            DomainPoint::Complex(Complex64::new(0.5, 0.0)),
            16,
            &Params::default(),
        );
        assert_eq!(trace.class, OrbitClass::Escaping { step: 1 });
        assert_eq!(
            trace.points,
            vec![Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0)]
        );
    }

    #[test]
    fn antipodal_orbit_classifies_as_period_two() {
        let trace = iterate(
            &expr("-z"),
            &disc(),
            DomainPoint::Complex(Complex64::new(0.5, 0.0)),
            256,
            &Params::default(),
        );
        assert_eq!(trace.class, OrbitClass::Periodic { period: 2 });
    }

    #[test]
    fn hyperbolic_blaschke_fixed_points_match_the_quadratic_roots() {
        // (z+1/2)/(1+z/2) = z reduces to z^2 = 1.
        let found = find_fixed_points(&expr("(z+0.5)/(1+0.5*z)"), &disc(), &Params::default());
        let mut roots: Vec<Complex64> = found.iter().filter_map(|p| p.to_complex()).collect();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(roots.len(), 2, "roots: {roots:?}");
        assert!((roots[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-8);
        assert!((roots[1] - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn quarter_rotation_has_minimal_period_four_points() {
        let found = find_periodic_points(&expr("i*z"), &disc(), 8, &Params::default());
        assert!(!found.is_empty());
        let phi = expr("i*z");
        for p in &found {
            assert_eq!(p.period, 4);
            assert!(p.residual <= 1e-8);
            let mut w = p.point;
            for _ in 0..4 {
                w = phi.eval(w).unwrap();
            }
            assert!((w - p.point).norm() <= 1e-8);
        }
    }

    #[test]
    fn denjoy_wolff_limit_agrees_across_extra_random_seeds() {
        let phi = expr("(z+0.5)/(1+0.5*z)");
        let params = Params::default();
        let dw = denjoy_wolff(&phi, &disc(), &params).expect("disc domain");
        let point = match dw {
            DenjoyWolff::Point {
                point,
                boundary,
                agreement,
            } => {
                assert!(boundary, "attracting point lies on the boundary");
                assert!(agreement <= params.tolerances.dw_agreement);
                assert!((point - Complex64::new(1.0, 0.0)).norm() < 1e-6);
                point
            }
            other => panic!("expected a common limit, got {other:?}"),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let seed = Complex64::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let trace = iterate(&phi, &disc(), DomainPoint::Complex(seed), 256, &params);
            match trace.class {
                OrbitClass::ConvergesTo { limit } => {
                    assert!((limit - point).norm() < 1e-6, "seed {seed} limit {limit}")
                }
                other => panic!("seed {seed} did not settle: {other:?}"),
            }
        }
    }

    #[test]
    fn elliptic_rotation_defeats_the_denjoy_wolff_iteration() {
        let dw = denjoy_wolff(&expr("i*z"), &disc(), &Params::default()).expect("disc domain");
        assert!(matches!(dw, DenjoyWolff::NotApplicable { .. }));
    }

    #[test]
    fn denjoy_wolff_requires_a_disc() {
        let circle = DomainKind::Circle { radius: 1.0 }.build(64, 1e-9).unwrap();
        let err = denjoy_wolff(&expr("z"), &circle, &Params::default()).unwrap_err();
        assert_eq!(err, DynamicsError::NeedsDisc);
    }

    #[test]
    fn translation_moves_a_disc_sample_away_forever() {
        let k_set = sample_disc(Complex64::new(0.0, 0.0), 0.5, 3);
        assert_eq!(k_set.len(), 1 + 8 + 16 + 24);
        let out = strongly_runaway(&expr("z+2"), &k_set, 64, 0.1);
        assert_eq!(out, RunawayOutcome::Runaway { n0: 1, horizon: 64 });
    }

    #[test]
    fn antipodal_map_returns_the_sample_to_itself() {
        // The ring samples are antipodally symmetric, so every step lands
        // back on the set.
        let k_set = sample_disc(Complex64::new(0.0, 0.0), 0.5, 3);
        match strongly_runaway(&expr("-z"), &k_set, 64, 0.05) {
            RunawayOutcome::Returns {
                last_return,
                returns,
            } => {
                assert_eq!(last_return, 64);
                assert_eq!(returns, (1..=8).collect::<Vec<_>>());
            }
            other => panic!("expected returns, got {other:?}"),
        }
    }

    #[test]
    fn rigid_rotation_number_matches_the_angle() {
        let report =
            rotation_number(&expr("exp(i*0.3)*z"), 1.0, 1 << 12, &Params::default()).unwrap();
        assert!((report.rotation_number - 0.3 / TAU).abs() <= 1e-9);
        assert!(report.confidence <= 1e-9);
        assert!(report.likely_rational.is_none());
        assert_eq!(report.lift_samples.len(), 1024);
    }

    #[test]
    fn rotation_number_of_an_iterated_rotation_scales_linearly() {
        for k in 2..=5u32 {
            let report = rotation_number(
                &expr(&format!("exp(i*0.3*{k})*z")),
                1.0,
                1 << 12,
                &Params::default(),
            )
            .unwrap();
            let expected = frac(0.3 * f64::from(k) / TAU);
            assert!(
                circ_dist(report.rotation_number, expected) <= 1e-9,
                "k={k}: {} vs {expected}",
                report.rotation_number
            );
        }
    }

    #[test]
    fn perturbed_rotation_number_matches_a_long_orbit_oracle() {
        let omega = 0.6180339887498949;
        let kick = 0.002;
        let phi = expr("z*exp(i*2*pi*0.6180339887498949)*exp(i*0.002*im(z))");
        let report = rotation_number(&phi, 1.0, 1 << 17, &Params::default()).unwrap();

        // Independent oracle: iterate the induced angle map directly in
        // turns for a million steps.
        let mut theta = 0.0f64;
        let n = 1_000_000usize;
        for _ in 0..n {
            theta += omega + kick / TAU * (TAU * frac(theta)).sin();
        }
        let oracle = frac(theta / n as f64);

        assert!(
            circ_dist(report.rotation_number, oracle) <= 1e-4,
            "estimate {} vs oracle {oracle}",
            report.rotation_number
        );
        assert!((report.rotation_number - omega).abs() < 1e-3);
        assert!(report.likely_rational.is_none());
        assert!(report.confidence <= 1e-3);
    }

    #[test]
    fn angle_doubling_is_rejected_as_a_circle_homeomorphism() {
        let err = rotation_number(&expr("z*z"), 1.0, 1024, &Params::default()).unwrap_err();
        assert!(matches!(err, DynamicsError::NotHomeomorphism(_)));
    }

    #[test]
    fn orientation_reversal_is_rejected() {
        let err = rotation_number(&expr("conj(z)"), 1.0, 1024, &Params::default()).unwrap_err();
        assert!(matches!(err, DynamicsError::NotHomeomorphism(_)));
    }

    #[test]
    fn contraction_ball_is_invariant_at_every_dyadic_radius() {
        let radii = [0.5, 0.25, 0.125, 0.0625];
        let out = stable_orbit_check(
            &expr("z/2"),
            &disc(),
            Complex64::new(0.0, 0.0),
            &radii,
            &Params::default(),
        )
        .unwrap();
        assert_eq!(out.len(), radii.len());
        for (r, s) in radii.iter().zip(&out) {
            assert_eq!(s.radius, *r);
            assert!(s.invariant);
            assert!(s.points_checked >= 8);
        }
    }

    #[test]
    fn stable_orbit_check_rejects_non_fixed_centers() {
        let err = stable_orbit_check(
            &expr("z+1"),
            &disc(),
            Complex64::new(0.0, 0.0),
            &[0.5],
            &Params::default(),
        )
        .unwrap_err();
        assert!(matches!(err, DynamicsError::NotFixed(_, _)));
    }

    #[test]
    fn tiny_radius_fails_the_accumulation_proxy() {
        let err = stable_orbit_check(
            &expr("z/2"),
            &disc(),
            Complex64::new(0.0, 0.0),
            &[1e-4],
            &Params::default(),
        )
        .unwrap_err();
        assert!(matches!(err, DynamicsError::AccumulationProxy { .. }));
    }
}
