//! Quotient-sequence diagnostic. For a pair of points z1, z2 the sequence
//!
//! ```text
//!           w(z1) w(phi(z1)) ... w(phi^{n-1}(z1)) * f(phi^n(z1))
//!     Q_n = ---------------------------------------------------
//!           w(z2) w(phi(z2)) ... w(phi^{n-1}(z2)) * f(phi^n(z2))
//! ```
//!
//! must be dense in the plane, over some pair and every candidate f, for
//! the operator to be pointwise supercyclic. A tail that stays bounded or
//! converges therefore rules that out. The sequence is tracked in log-polar
//! form (log-modulus plus accumulated phase) so products over hundreds of
//! factors neither overflow nor lose the winding.

use super::{Citation, Conclusion, Fact, Verdict};
use crate::domains::DomainSpec;
use crate::dynamics::iterate;
use crate::expr::Expression;
use crate::params::Params;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Log-modulus threshold beyond which the sequence is declared unbounded
/// outright; `exp` overflows near 709.
const LOG_OVERFLOW: f64 = 700.0;
/// Second-half growth margin for the unbounded rule: the max log-modulus
/// must gain at least ln(100).
const GROWTH_LOG: f64 = 4.605170185988092;
/// Mesh used by the density heuristic: 12 x 12 cells over the log-polar
/// rectangle 1e-3 <= |c| <= 1e3.
const DENSE_MESH: usize = 12;
const DENSE_LOG_LO: f64 = -6.907755278982137;
const DENSE_LOG_HI: f64 = 6.907755278982137;

/// One term of the sequence in log-polar form. `phase` accumulates the
/// arguments of the factors without wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuotientValue {
    pub n: usize,
    pub log_mag: f64,
    pub phase: f64,
}

impl QuotientValue {
    /// Complex representative; infinite when the log-modulus overflows.
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }
}

/// Tail classification, checked in this order: an (eventually) constant
/// sequence is reported as bounded; a Cauchy tail as convergent; a sweep of
/// the whole log-polar mesh as apparently dense; second-half growth or
/// overflow as unbounded; anything else as bounded by its observed maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum QuotientClass {
    Bounded { max_modulus: f64 },
    ConvergesTo { limit: Complex64 },
    ApparentlyDense { cells_hit: usize },
    Unbounded { max_log_modulus: f64 },
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuotientDiagnostic {
    pub pair: (Complex64, Complex64),
    pub values: Vec<QuotientValue>,
    /// Indices where a factor vanished and the term is undefined.
    pub skipped: Vec<usize>,
    /// Set when one of the orbits left the domain or stopped evaluating
    /// before the requested horizon.
    pub truncated_at: Option<usize>,
    pub class: QuotientClass,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum QuotientError {
    #[error("seed {0} lies outside the domain")]
    SeedOutsideDomain(Complex64),
    #[error("every index was skipped; the sequence is undefined for this pair")]
    AllSkipped,
}

/// Computes and classifies the sequence for one pair over the configured
/// horizon. Indices where a weight or test-function factor is exactly zero
/// are skipped; once a weight factor vanishes on an orbit, every later
/// index on that orbit is skipped too, since the factor stays in the
/// product.
pub fn quotient_sequence(
    phi: &Expression,
    w: &Expression,
    f: &Expression,
    domain: &DomainSpec,
    pair: (Complex64, Complex64),
    params: &Params,
) -> Result<QuotientDiagnostic, QuotientError> {
    for z in [pair.0, pair.1] {
        if !domain.contains(domain.classify_image(z)) {
            return Err(QuotientError::SeedOutsideDomain(z));
        }
    }
    let horizon = params.horizons.quotient_n;
    let tr1 = iterate(phi, domain, domain.classify_image(pair.0), horizon, params);
    let tr2 = iterate(phi, domain, domain.classify_image(pair.1), horizon, params);
    // An escaping trace ends with the point that left the domain; the
    // sequence is only meaningful over the in-domain prefix.
    let usable = |tr: &crate::dynamics::OrbitTrace| match tr.class {
        crate::dynamics::OrbitClass::Escaping { step } => tr.points.len().min(step),
        _ => tr.points.len(),
    };
    let n_avail = usable(&tr1).min(usable(&tr2));
    let truncated_at = (n_avail < horizon + 1).then_some(n_avail);

    let mut values = Vec::with_capacity(n_avail);
    let mut skipped = Vec::new();
    // Running log-modulus and phase of the weight products along each orbit;
    // poisoned (set to None) once a factor is exactly zero (including
    // underflow) or fails to evaluate. Tiny nonzero factors are fine: the
    // log-polar form represents them without loss.
    let mut cum: [Option<(f64, f64)>; 2] = [Some((0.0, 0.0)), Some((0.0, 0.0))];
    for n in 0..n_avail {
        let points = [tr1.points[n], tr2.points[n]];
        let f_vals = [f.eval(points[0]), f.eval(points[1])];
        let term = match (&cum[0], &cum[1], &f_vals[0], &f_vals[1]) {
            (Some((lm1, ph1)), Some((lm2, ph2)), Ok(f1), Ok(f2))
                if f1.norm() > 0.0 && f2.norm() > 0.0 =>
            {
                Some(QuotientValue {
                    n,
                    log_mag: lm1 - lm2 + f1.norm().ln() - f2.norm().ln(),
                    phase: ph1 - ph2 + f1.arg() - f2.arg(),
                })
            }
            _ => None,
        };
        match term {
            Some(v) => values.push(v),
            None => skipped.push(n),
        }
        for (c, &p) in cum.iter_mut().zip(&points) {
            *c = c.and_then(|(lm, ph)| match w.eval(p) {
                Ok(v) if v.norm() > 0.0 => Some((lm + v.norm().ln(), ph + v.arg())),
                _ => None,
            });
        }
    }
    if values.is_empty() {
        return Err(QuotientError::AllSkipped);
    }
    let class = classify(&values, params);
    Ok(QuotientDiagnostic {
        pair,
        values,
        skipped,
        truncated_at,
        class,
    })
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = a - b;
    (d - std::f64::consts::TAU * (d / std::f64::consts::TAU).round()).abs()
}

fn classify(values: &[QuotientValue], params: &Params) -> QuotientClass {
    let tol = params.tolerances.cauchy;
    let max_log = values.iter().map(|v| v.log_mag).fold(f64::NEG_INFINITY, f64::max);

    // Constant sequence: log-moduli agree and phases agree modulo a turn.
    let first = values[0];
    let constant = values.iter().all(|v| {
        (v.log_mag - first.log_mag).abs() <= tol && circular_gap(v.phase, first.phase) <= tol
    });
    if constant {
        return QuotientClass::Bounded {
            max_modulus: max_log.exp(),
        };
    }

    // Cauchy tail over the configured window.
    let window = params.horizons.cauchy_window.min(values.len());
    let tail = &values[values.len() - window..];
    if window >= 2 && tail.iter().all(|v| v.log_mag < LOG_OVERFLOW) {
        let pts: Vec<Complex64> = tail.iter().map(|v| v.to_complex()).collect();
        let last = *pts.last().expect("window >= 2");
        let spread = pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        if spread <= tol * (1.0 + last.norm()) {
            return QuotientClass::ConvergesTo { limit: last };
        }
    }

    // Density heuristic: every cell of the log-polar mesh was visited.
    let mut cells = vec![false; DENSE_MESH * DENSE_MESH];
    for v in values {
        if v.log_mag < DENSE_LOG_LO || v.log_mag > DENSE_LOG_HI {
            continue;
        }
        let mi = (((v.log_mag - DENSE_LOG_LO) / (DENSE_LOG_HI - DENSE_LOG_LO))
            * DENSE_MESH as f64)
            .floor()
            .min(DENSE_MESH as f64 - 1.0) as usize;
        let frac = (v.phase / std::f64::consts::TAU).rem_euclid(1.0);
        let pi_ = ((frac * DENSE_MESH as f64).floor() as usize).min(DENSE_MESH - 1);
        cells[mi * DENSE_MESH + pi_] = true;
    }
    let cells_hit = cells.iter().filter(|&&c| c).count();
    if cells_hit == DENSE_MESH * DENSE_MESH {
        return QuotientClass::ApparentlyDense { cells_hit };
    }

    // Unbounded: the max log-modulus gained a factor of 100 between the two
    // halves of the horizon, or the modulus left floating-point range.
    let half = values.len() / 2;
    let max_first = values[..half]
        .iter()
        .map(|v| v.log_mag)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_second = values[half..]
        .iter()
        .map(|v| v.log_mag)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_log > LOG_OVERFLOW || (half > 0 && max_second >= max_first + GROWTH_LOG) {
        return QuotientClass::Unbounded {
            max_log_modulus: max_log,
        };
    }

    QuotientClass::Bounded {
        max_modulus: max_log.exp(),
    }
}

/// Folds a family of diagnostics (several pairs, several test functions)
/// into a verdict. Any member whose tail stays bounded or converges denies
/// the density that pointwise supercyclicity would force.
pub fn quotient_family_verdict(diagnostics: &[QuotientDiagnostic]) -> Verdict {
    let hit = diagnostics.iter().find(|d| {
        matches!(
            d.class,
            QuotientClass::Bounded { .. } | QuotientClass::ConvergesTo { .. }
        )
    });
    match hit {
        Some(d) => {
            let mut evidence = vec![
                Fact::point("pair first point", d.pair.0),
                Fact::point("pair second point", d.pair.1),
                Fact::int("terms computed", d.values.len() as i64),
            ];
            match d.class {
                QuotientClass::Bounded { max_modulus } => {
                    evidence.push(Fact::text("tail class", "bounded"));
                    evidence.push(Fact::real("max modulus", max_modulus));
                }
                QuotientClass::ConvergesTo { limit } => {
                    evidence.push(Fact::text("tail class", "convergent"));
                    evidence.push(Fact::point("limit", limit));
                }
                _ => unreachable!("filtered above"),
            }
            let mut v = Verdict::new(Conclusion::NotTauPSupercyclic, Citation::Prop4, evidence)
                .with_caveat("boundedness is certified over the computed horizon only")
                .with_caveat(
                    "density was probed for a finite family of point pairs and test functions",
                );
            if !d.skipped.is_empty() {
                v = v.with_caveat(format!(
                    "{} indices were skipped where a factor vanished",
                    d.skipped.len()
                ));
            }
            v
        }
        None => Verdict::inconclusive(vec![Fact::text(
            "note",
            "no quotient sequence in the family had a bounded or convergent tail",
        )]),
    }
}

/// Default pair for a domain: the grid points with extreme real parts.
/// Extremes survive grid refinement, so the choice is resolution-stable.
pub fn default_pair(domain: &DomainSpec) -> Option<(Complex64, Complex64)> {
    let grid = domain.complex_grid();
    let hi = grid
        .iter()
        .copied()
        .max_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite grid"))?;
    let lo = grid
        .iter()
        .copied()
        .min_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite grid"))?;
    (hi != lo).then_some((hi, lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainKind;
    use crate::params::Params;

    fn disc() -> DomainSpec {
        DomainKind::ClosedDisc { radius: 1.0 }
            .build(8, 1e-9)
            .expect("valid domain")
    }

    fn expr(s: &str) -> Expression {
        Expression::parse(s).expect("parses")
    }

    #[test]
    fn constant_ratio_classifies_bounded() {
        let d = diag("z/2", "1", "z", (1.0, 0.5));
        assert!(matches!(
            d.class,
            QuotientClass::Bounded { max_modulus } if (max_modulus - 2.0).abs() < 1e-9
        ));
        assert!(d.skipped.is_empty());
    }

    #[test]
    fn convergent_product_matches_direct_oracle() {
        // Orbit of 0 is fixed, so the sequence reduces to the partial
        // products of 1 + 2^-m; compare against the plainly computed value.
        let d = diag("z/2", "1+z", "1", (1.0, 0.0));
        let mut oracle = 1.0f64;
        let mut m = 0u32;
        loop {
            let factor = 1.0 + 0.5f64.powi(m as i32);
            if factor == 1.0 {
                break;
            }
            oracle *= factor;
            m += 1;
        }
        match d.class {
            QuotientClass::ConvergesTo { limit } => {
                assert!((limit.re - oracle).abs() < 1e-9, "limit {limit} vs {oracle}");
                assert!(limit.im.abs() < 1e-12);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn geometric_growth_classifies_unbounded() {
        let d = diag("z", "1+re(z)", "1", (1.0, 0.0));
        assert!(matches!(d.class, QuotientClass::Unbounded { .. }));
    }

    #[test]
    fn vanishing_denominator_everywhere_is_an_error() {
        let err = quotient_sequence(
            &expr("z/2"),
            &expr("1"),
            &expr("z"),
            &disc(),
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            &Params::default(),
        )
        .expect_err("denominator is identically zero");
        assert_eq!(err, QuotientError::AllSkipped);
    }

    #[test]
    fn pointwise_zero_skips_only_that_index() {
        let d = diag("z/2", "1", "z - 0.5", (1.0, 0.0));
        assert_eq!(d.skipped, vec![1]);
        assert!(matches!(
            d.class,
            QuotientClass::ConvergesTo { limit } if (limit - Complex64::new(1.0, 0.0)).norm() < 1e-9
        ));
    }

    #[test]
    fn seed_outside_domain_is_rejected() {
        let err = quotient_sequence(
            &expr("z/2"),
            &expr("1"),
            &expr("1"),
            &disc(),
            (Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)),
            &Params::default(),
        )
        .expect_err("seed outside the disc");
        assert!(matches!(err, QuotientError::SeedOutsideDomain(_)));
    }

    #[test]
    fn mesh_sweep_classifies_apparently_dense() {
        // Synthetic log-polar values marching through every mesh cell.
        let values: Vec<QuotientValue> = (0..2 * DENSE_MESH * DENSE_MESH)
            .map(|n| {
                let mi = n % DENSE_MESH;
                let pi_ = (n / DENSE_MESH) % DENSE_MESH;
                QuotientValue {
                    n,
                    log_mag: DENSE_LOG_LO
                        + (mi as f64 + 0.5) / DENSE_MESH as f64 * (DENSE_LOG_HI - DENSE_LOG_LO),
                    phase: (pi_ as f64 + 0.5) / DENSE_MESH as f64 * std::f64::consts::TAU,
                }
            })
            .collect();
        let class = classify(&values, &Params::default());
        assert!(matches!(class, QuotientClass::ApparentlyDense { cells_hit: 144 }));
    }

    #[test]
    fn family_verdict_fires_on_bounded_member() {
        let bounded = diag("z/2", "1", "z", (1.0, 0.5));
        let verdict = quotient_family_verdict(&[bounded]);
        assert_eq!(verdict.conclusion, Conclusion::NotTauPSupercyclic);
        assert_eq!(verdict.citation, Some(Citation::Prop4));
        assert!(!verdict.caveats.is_empty());
    }

    #[test]
    fn family_verdict_stays_inconclusive_without_bounded_member() {
        let unbounded = diag("z", "1+re(z)", "1", (1.0, 0.0));
        let verdict = quotient_family_verdict(&[unbounded]);
        assert_eq!(verdict.conclusion, Conclusion::Inconclusive);
        assert_eq!(verdict.citation, None);
    }

    #[test]
    fn default_pair_takes_real_extremes() {
        let d = disc();
        let (a, b) = default_pair(&d).expect("disc has extremes");
        assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((b - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    fn diag(phi: &str, w: &str, f: &str, pair: (f64, f64)) -> QuotientDiagnostic {
        quotient_sequence(
            &expr(phi),
            &expr(w),
            &expr(f),
            &disc(),
            (Complex64::new(pair.0, 0.0), Complex64::new(pair.1, 0.0)),
            &Params::default(),
        )
        .expect("sequence defined")
    }
}
