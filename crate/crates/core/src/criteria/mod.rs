//! The obstruction rules. Every rule inspects finite data (a grid sweep, an
//! orbit, a truncated matrix) and either fires a [`Verdict`] naming the rule
//! that produced it, or stays inconclusive. Rules never guess: a verdict
//! carries the numbers that fired it, and anything certified only at grid or
//! horizon scale says so in a caveat.
//!
//! Conclusions are deliberately independent: a `NotWeaklySupercyclic`
//! verdict says nothing about the pointwise topology and vice versa; no
//! inference between topologies is ever applied.

mod circle;
mod laurent;
mod punctured;
mod quotient;
mod spectral;

pub use circle::{circle_verdict, CircleAssertions};
pub use laurent::{
    laurent_identity_checks, laurent_obstruction, laurent_projection, LaurentCheck, LaurentError,
};
pub use punctured::{
    punctured_disc_verdict, punctured_plane_verdict, punctured_self_map_classifier, PuncturedForm,
};
pub use quotient::{
    default_pair, quotient_family_verdict, quotient_sequence, QuotientClass, QuotientDiagnostic,
    QuotientError, QuotientValue,
};
pub use spectral::{spectral_obstruction, OperatorMatrix, SpectralError};

use crate::domains::{DomainKind, DomainPoint, DomainSpec};
use crate::dynamics::{
    self, find_fixed_points, find_periodic_points, iterate, DenjoyWolff, OrbitClass,
};
use crate::expr::Expression;
use crate::params::Params;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// What a verdict claims about the operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    NotTauPSupercyclic,
    NotWeaklySupercyclic,
    NotCyclic,
    WitnessExhibited,
    Inconclusive,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Conclusion::NotTauPSupercyclic => "NotTauPSupercyclic",
            Conclusion::NotWeaklySupercyclic => "NotWeaklySupercyclic",
            Conclusion::NotCyclic => "NotCyclic",
            Conclusion::WitnessExhibited => "WitnessExhibited",
            Conclusion::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Clause of the five-part dynamical rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Clause {
    I,
    II,
    III,
    IV,
    V,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::I => "i",
            Clause::II => "ii",
            Clause::III => "iii",
            Clause::IV => "iv",
            Clause::V => "v",
        };
        f.write_str(s)
    }
}

/// Report tag of the rule that fired. These labels are the tool's stable
/// vocabulary; reports and golden files match on them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Citation {
    Prop2i,
    Prop2ii,
    Prop4,
    Thm4,
    Thm5(Clause),
    Thm6,
    Cor10,
    Cor11,
    Thm12,
    Ex14,
    Lemma15,
    Prop16i,
    Prop16ii,
    Ex17,
    Cor18,
    Thm19,
    Lemma20,
    Prop21,
    Prop22,
    Thm23,
}

impl fmt::Display for Citation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Citation::Prop2i => write!(f, "Prop. 2(i)"),
            Citation::Prop2ii => write!(f, "Prop. 2(ii)"),
            Citation::Prop4 => write!(f, "Prop. 4"),
            Citation::Thm4 => write!(f, "Thm 4"),
            Citation::Thm5(c) => write!(f, "Thm 5({c})"),
            Citation::Thm6 => write!(f, "Thm 6"),
            Citation::Cor10 => write!(f, "Cor. 10"),
            Citation::Cor11 => write!(f, "Cor. 11"),
            Citation::Thm12 => write!(f, "Thm 12"),
            Citation::Ex14 => write!(f, "Ex. 14"),
            Citation::Lemma15 => write!(f, "Lemma 15"),
            Citation::Prop16i => write!(f, "Prop. 16(i)"),
            Citation::Prop16ii => write!(f, "Prop. 16(ii)"),
            Citation::Ex17 => write!(f, "Ex. 17"),
            Citation::Cor18 => write!(f, "Cor. 18"),
            Citation::Thm19 => write!(f, "Thm 19"),
            Citation::Lemma20 => write!(f, "Lemma 20"),
            Citation::Prop21 => write!(f, "Prop. 21"),
            Citation::Prop22 => write!(f, "Prop. 22"),
            Citation::Thm23 => write!(f, "Thm 23"),
        }
    }
}

impl Serialize for Citation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One labelled piece of evidence.
#[derive(Clone, Debug, Serialize)]
pub struct Fact {
    pub label: String,
    pub value: FactValue,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum FactValue {
    Text(String),
    Real(f64),
    Int(i64),
    Bool(bool),
    Point(Complex64),
    Points(Vec<Complex64>),
}

impl Fact {
    pub fn text(label: impl Into<String>, value: impl Into<String>) -> Fact {
        Fact {
            label: label.into(),
            value: FactValue::Text(value.into()),
        }
    }
    pub fn real(label: impl Into<String>, value: f64) -> Fact {
        Fact {
            label: label.into(),
            value: FactValue::Real(value),
        }
    }
    pub fn int(label: impl Into<String>, value: i64) -> Fact {
        Fact {
            label: label.into(),
            value: FactValue::Int(value),
        }
    }
    pub fn boolean(label: impl Into<String>, value: bool) -> Fact {
        Fact {
            label: label.into(),
            value: FactValue::Bool(value),
        }
    }
    pub fn point(label: impl Into<String>, value: Complex64) -> Fact {
        Fact {
            label: label.into(),
            value: FactValue::Point(value),
        }
    }
    pub fn points(label: impl Into<String>, value: Vec<Complex64>) -> Fact {
        Fact {
            label: label.into(),
            value: FactValue::Points(value),
        }
    }
}

/// A conclusion, the rule tag that produced it, the numbers that fired the
/// rule, and any finite-scale caveats.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub conclusion: Conclusion,
    pub citation: Option<Citation>,
    pub evidence: Vec<Fact>,
    pub caveats: Vec<String>,
}

impl Verdict {
    pub fn new(conclusion: Conclusion, citation: Citation, evidence: Vec<Fact>) -> Verdict {
        Verdict {
            conclusion,
            citation: Some(citation),
            evidence,
            caveats: Vec::new(),
        }
    }

    pub fn inconclusive(evidence: Vec<Fact>) -> Verdict {
        Verdict {
            conclusion: Conclusion::Inconclusive,
            citation: None,
            evidence,
            caveats: Vec::new(),
        }
    }

    pub fn with_caveat(mut self, caveat: impl Into<String>) -> Verdict {
        self.caveats.push(caveat.into());
        self
    }

    pub fn fired(&self) -> bool {
        self.conclusion != Conclusion::Inconclusive
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CriteriaError {
    #[error("this rule needs a {0} domain")]
    NeedsKind(&'static str),
    #[error("the symbol is not a self-map of the grid: {0} violations")]
    SelfMap(usize),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::expr::EvalError),
    #[error("projection diagnostic failed: {0}")]
    Laurent(#[from] LaurentError),
}

/// Outcome of the zero-free weight sweep. It fails at the first grid point,
/// in grid order, where the weight vanishes or cannot be evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum ZeroFreeOutcome {
    Pass { min_modulus: f64 },
    Fail { point: DomainPoint, modulus: Option<f64> },
}

/// Sweeps `|w|` over the grid (including the infinity marker, where the
/// weight's tail limit is used).
pub fn zero_free_weight_check(
    w: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> ZeroFreeOutcome {
    let mut min_modulus = f64::INFINITY;
    for &p in domain.grid() {
        match domain.eval_at(w, p) {
            Ok(v) => {
                let m = v.norm();
                if m < params.tolerances.weight_zero {
                    return ZeroFreeOutcome::Fail {
                        point: p,
                        modulus: Some(m),
                    };
                }
                min_modulus = min_modulus.min(m);
            }
            Err(_) => {
                return ZeroFreeOutcome::Fail {
                    point: p,
                    modulus: None,
                }
            }
        }
    }
    ZeroFreeOutcome::Pass { min_modulus }
}

/// Outcome of the pairwise injectivity sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum UnivalenceOutcome {
    Pass { pairs_checked: usize },
    Fail {
        a: Complex64,
        b: Complex64,
        image_gap: f64,
    },
}

/// Compares the images of every pair of distinct grid points. Two points
/// further apart than twice the membership tolerance whose images coincide
/// within the tolerance witness a collision. Points where the symbol fails
/// to evaluate are skipped (the self-map check reports those).
pub fn univalence_check(
    phi: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> UnivalenceOutcome {
    let tol = params.tolerances.membership;
    let points = domain.complex_grid();
    let images: Vec<Option<Complex64>> = points.iter().map(|&p| phi.eval(p).ok()).collect();
    let sep2 = (2.0 * tol) * (2.0 * tol);
    let col2 = tol * tol;
    let n = points.len();
    let hit = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let fi = images[i]?;
            for j in i + 1..n {
                if let Some(fj) = images[j] {
                    if (points[i] - points[j]).norm_sqr() > sep2
                        && (fi - fj).norm_sqr() <= col2
                    {
                        return Some((i, j));
                    }
                }
            }
            None
        })
        .min();
    match hit {
        Some((i, j)) => UnivalenceOutcome::Fail {
            a: points[i],
            b: points[j],
            image_gap: (images[i].unwrap() - images[j].unwrap()).norm(),
        },
        None => UnivalenceOutcome::Pass {
            pairs_checked: n * (n.saturating_sub(1)) / 2,
        },
    }
}

/// Verdict wrapper for the two necessary conditions: a vanishing weight or
/// an injectivity collision each rule out pointwise supercyclicity.
pub fn necessary_conditions_verdict(
    zero_free: &ZeroFreeOutcome,
    univalence: &UnivalenceOutcome,
) -> Verdict {
    if let ZeroFreeOutcome::Fail { point, modulus } = zero_free {
        let mut ev = vec![Fact::text("weight vanishes at", point.to_string())];
        if let Some(m) = modulus {
            ev.push(Fact::real("modulus", *m));
        } else {
            ev.push(Fact::text("note", "weight failed to evaluate there"));
        }
        return Verdict::new(Conclusion::NotTauPSupercyclic, Citation::Prop2i, ev);
    }
    if let UnivalenceOutcome::Fail { a, b, image_gap } = univalence {
        return Verdict::new(
            Conclusion::NotTauPSupercyclic,
            Citation::Prop2ii,
            vec![
                Fact::point("collision point a", *a),
                Fact::point("collision point b", *b),
                Fact::real("image gap", *image_gap),
            ],
        );
    }
    Verdict::inconclusive(vec![Fact::text(
        "note",
        "weight is zero-free and the symbol is injective on the grid",
    )])
}

/// Structural rule for compact domains: on a compact space, a sup-norm
/// function space containing a nowhere-vanishing member admits no weakly
/// supercyclic weighted composition operator.
pub fn compact_banach_obstruction(domain: &DomainSpec, has_nowhere_vanishing: bool) -> Verdict {
    if !domain.kind.is_compact() {
        return Verdict::inconclusive(vec![Fact::text("note", "domain is not compact")]);
    }
    if !has_nowhere_vanishing {
        return Verdict::inconclusive(vec![Fact::text(
            "note",
            "no nowhere-vanishing member asserted for the space",
        )]);
    }
    Verdict::new(
        Conclusion::NotWeaklySupercyclic,
        Citation::Thm4,
        vec![
            Fact::text("domain", format!("{:?}", domain.kind)),
            Fact::boolean("nowhere-vanishing member asserted", true),
        ],
    )
}

/// Per-seed outcome of the along-orbit non-vanishing check for a test
/// function: a candidate supercyclic function must be nonzero somewhere on
/// every orbit.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitNonVanishing {
    pub seed: Complex64,
    pub first_nonzero_step: Option<usize>,
}

pub fn orbit_nonvanishing_check(
    phi: &Expression,
    f: &Expression,
    domain: &DomainSpec,
    seeds: &[Complex64],
    params: &Params,
) -> Vec<OrbitNonVanishing> {
    seeds
        .iter()
        .map(|&seed| {
            let trace = iterate(
                phi,
                domain,
                DomainPoint::Complex(seed),
                params.horizons.orbit_n,
                params,
            );
            let first = trace.points.iter().enumerate().find_map(|(k, &p)| {
                match f.eval(p) {
                    Ok(v) if v.norm() > params.tolerances.weight_zero => Some(k),
                    _ => None,
                }
            });
            OrbitNonVanishing {
                seed,
                first_nonzero_step: first,
            }
        })
        .collect()
}

/// The five dynamical detectors, run in order; the first that fires wins.
///
/// i. two distinct fixed points;
/// ii. a non-constant orbit converging inside the domain;
/// iii. a periodic non-fixed point on a compact continuum domain;
/// iv. a fixed point where the weight modulus is maximal (compact domain);
/// v. a fixed grid-accumulation point whose balls are invariant.
///
/// On lattice domains only the first two clauses run, and orbits that leave
/// the sampled range count as escaping: the pointwise topology being probed
/// there is convergence at the finite lattice points.
pub fn dynamical_obstructions(
    phi: &Expression,
    w: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> Verdict {
    let fixed = find_fixed_points(phi, domain, params);
    let fixed_complex: Vec<Complex64> =
        fixed.iter().filter_map(|p| p.to_complex()).collect();

    // (i) two distinct fixed points.
    if fixed_complex.len() >= 2 {
        let mut shown = fixed_complex.clone();
        shown.truncate(8);
        return Verdict::new(
            Conclusion::NotTauPSupercyclic,
            Citation::Thm5(Clause::I),
            vec![
                Fact::int("fixed points found", fixed_complex.len() as i64),
                Fact::points("fixed points", shown),
            ],
        );
    }

    // (ii) a non-constant convergent orbit.
    let seeds: Vec<Complex64> = {
        let grid = domain.complex_grid();
        let cap = 16usize;
        if grid.len() <= cap {
            grid
        } else {
            let stride = grid.len() / cap;
            grid.into_iter().step_by(stride).collect()
        }
    };
    for &seed in &seeds {
        let trace = iterate(
            phi,
            domain,
            DomainPoint::Complex(seed),
            params.horizons.orbit_n,
            params,
        );
        if let OrbitClass::ConvergesTo { limit } = trace.class {
            let moved = trace
                .points
                .get(1)
                .map_or(false, |p1| (p1 - seed).norm() > params.tolerances.periodic_residual);
            // The clause needs the limit inside the domain: an orbit sinking
            // into a puncture converges, but not to a member.
            if moved && domain.contains(DomainPoint::Complex(limit)) {
                return Verdict::new(
                    Conclusion::NotTauPSupercyclic,
                    Citation::Thm5(Clause::II),
                    vec![
                        Fact::point("orbit seed", seed),
                        Fact::point("orbit limit", limit),
                        Fact::real("final residual", trace.residual),
                    ],
                );
            }
        }
    }

    let compact_continuum = matches!(
        domain.kind,
        DomainKind::ClosedDisc { .. } | DomainKind::Circle { .. }
    );

    // (iii) a periodic non-fixed point on a compact continuum.
    if compact_continuum {
        let periodic = find_periodic_points(phi, domain, params.horizons.max_period, params);
        if let Some(p) = periodic.first() {
            return Verdict::new(
                Conclusion::NotTauPSupercyclic,
                Citation::Thm5(Clause::III),
                vec![
                    Fact::point("periodic point", p.point),
                    Fact::int("period", p.period as i64),
                    Fact::real("residual", p.residual),
                    Fact::int("periodic points found", periodic.len() as i64),
                ],
            );
        }
    }

    // (iv) weight modulus maximal at a fixed point (compact continuum).
    if compact_continuum && !fixed_complex.is_empty() {
        let grid = domain.complex_grid();
        for &z2 in &fixed_complex {
            if let Ok(w2) = w.eval(z2) {
                let bound = w2.norm() + params.tolerances.membership;
                let dominated = grid.iter().all(|&z| match w.eval(z) {
                    Ok(v) => v.norm() <= bound,
                    Err(_) => false,
                });
                if dominated && grid.len() >= 2 {
                    return Verdict::new(
                        Conclusion::NotTauPSupercyclic,
                        Citation::Thm5(Clause::IV),
                        vec![
                            Fact::point("fixed point", z2),
                            Fact::real("weight modulus there", w2.norm()),
                            Fact::text("note", "weight modulus is maximal at the fixed point"),
                        ],
                    );
                }
            }
        }
    }

    // (v) invariant balls around a fixed accumulation point.
    if !domain.kind.is_lattice() {
        let scale = match domain.kind {
            DomainKind::ClosedDisc { radius } | DomainKind::Circle { radius } => radius,
            DomainKind::PuncturedDisc { .. } => 1.0,
            DomainKind::PuncturedPlane { outer_cutoff, .. } => outer_cutoff,
            _ => 1.0,
        };
        let radii: Vec<f64> = [0.5, 0.25, 0.125, 0.0625].iter().map(|r| r * scale).collect();
        for &z0 in &fixed_complex {
            match dynamics::stable_orbit_check(phi, domain, z0, &radii, params) {
                Ok(report) if report.iter().all(|r| r.invariant) => {
                    return Verdict::new(
                        Conclusion::NotTauPSupercyclic,
                        Citation::Thm5(Clause::V),
                        vec![
                            Fact::point("fixed point", z0),
                            Fact::text(
                                "invariant radii",
                                report
                                    .iter()
                                    .map(|r| format!("{} ({} pts)", r.radius, r.points_checked))
                                    .collect::<Vec<_>>()
                                    .join(", "),
                            ),
                        ],
                    )
                    .with_caveat(
                        "a finite radius family stands in for a fundamental family of neighbourhoods",
                    );
                }
                _ => {}
            }
        }
    }

    Verdict::inconclusive(vec![
        Fact::int("fixed points found", fixed_complex.len() as i64),
        Fact::text("note", "none of the five dynamical detectors fired"),
    ])
}

/// Unconditional rule for symbols asserted analytic on the closed unit
/// disc: such weighted composition operators are never pointwise
/// supercyclic. The evidence attaches the Denjoy-Wolff point when the
/// iteration resolves one, and an invariant-ball certificate otherwise.
pub fn disc_algebra_verdict(
    phi: &Expression,
    _w: &Expression,
    domain: &DomainSpec,
    analytic_asserted: bool,
    params: &Params,
) -> Result<Verdict, CriteriaError> {
    if !matches!(domain.kind, DomainKind::ClosedDisc { .. }) {
        return Err(CriteriaError::NeedsKind("closed disc"));
    }
    if !analytic_asserted {
        return Ok(Verdict::inconclusive(vec![Fact::text(
            "note",
            "symbol not asserted analytic; rule does not apply",
        )]));
    }
    let report = domain.self_map_check(phi);
    if !report.ok() {
        return Err(CriteriaError::SelfMap(report.violations.len()));
    }
    let mut evidence = Vec::new();
    match dynamics::denjoy_wolff(phi, domain, params)? {
        DenjoyWolff::Point {
            point,
            boundary,
            agreement,
        } => {
            evidence.push(Fact::point("Denjoy-Wolff point", point));
            evidence.push(Fact::boolean("on the boundary", boundary));
            evidence.push(Fact::real("seed agreement", agreement));
        }
        DenjoyWolff::NotApplicable { reason } => {
            evidence.push(Fact::text("Denjoy-Wolff iteration", reason));
            // Elliptic or identity-like symbol: exhibit an invariant ball
            // certificate at a fixed point instead.
            let fixed = find_fixed_points(phi, domain, params);
            if let Some(z0) = fixed.first().and_then(|p| p.to_complex()) {
                let radius = match domain.kind {
                    DomainKind::ClosedDisc { radius } => radius,
                    _ => 1.0,
                };
                let radii: Vec<f64> = [0.5, 0.25].iter().map(|r| r * radius).collect();
                if let Ok(rep) = dynamics::stable_orbit_check(phi, domain, z0, &radii, params) {
                    if rep.iter().all(|r| r.invariant) {
                        evidence.push(Fact::point("fixed point with invariant balls", z0));
                    }
                }
            }
        }
    }
    Ok(Verdict::new(
        Conclusion::NotTauPSupercyclic,
        Citation::Thm6,
        evidence,
    )
    .with_caveat("analyticity of the symbol is a scenario assertion, verified only as a grid self-map sweep"))
}

/// Surjective-isometry rule on the closed disc: an injective self-map
/// together with a unimodular weight presents the operator as a sup-norm
/// isometry, which is never pointwise supercyclic.
pub fn isometry_verdict(
    phi: &Expression,
    w: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> Result<Verdict, CriteriaError> {
    if !matches!(domain.kind, DomainKind::ClosedDisc { .. }) {
        return Err(CriteriaError::NeedsKind("closed disc"));
    }
    let self_map = domain.self_map_check(phi);
    if !self_map.ok() {
        return Ok(Verdict::inconclusive(vec![Fact::int(
            "self-map violations",
            self_map.violations.len() as i64,
        )]));
    }
    let mut max_dev: f64 = 0.0;
    for &p in domain.grid() {
        match domain.eval_at(w, p) {
            Ok(v) => max_dev = max_dev.max((v.norm() - 1.0).abs()),
            Err(_) => {
                return Ok(Verdict::inconclusive(vec![Fact::text(
                    "note",
                    "weight failed to evaluate on the grid",
                )]))
            }
        }
    }
    if max_dev > params.tolerances.membership {
        return Ok(Verdict::inconclusive(vec![Fact::real(
            "max | |w|-1 | on grid",
            max_dev,
        )]));
    }
    match univalence_check(phi, domain, params) {
        UnivalenceOutcome::Pass { pairs_checked } => Ok(Verdict::new(
            Conclusion::NotTauPSupercyclic,
            Citation::Thm19,
            vec![
                Fact::real("max | |w|-1 | on grid", max_dev),
                Fact::int("injectivity pairs checked", pairs_checked as i64),
            ],
        )
        .with_caveat("the symbol being a homeomorphism of the disc is certified only at grid scale")),
        UnivalenceOutcome::Fail { a, b, .. } => Ok(Verdict::inconclusive(vec![
            Fact::point("injectivity collision a", a),
            Fact::point("injectivity collision b", b),
        ])),
    }
}

/// Rotation rule on the closed disc: a symbol acting as multiplication by a
/// constant of modulus at most one is never pointwise supercyclic, for any
/// weight.
pub fn disc_rotation_verdict(
    phi: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> Result<Verdict, CriteriaError> {
    let radius = match domain.kind {
        DomainKind::ClosedDisc { radius } => radius,
        _ => return Err(CriteriaError::NeedsKind("closed disc")),
    };
    let lambda = phi.eval(Complex64::new(radius, 0.0))? / radius;
    let mut max_dev: f64 = 0.0;
    for p in domain.complex_grid() {
        let v = phi.eval(p)?;
        max_dev = max_dev.max((v - lambda * p).norm());
    }
    if max_dev > params.tolerances.membership {
        return Ok(Verdict::inconclusive(vec![
            Fact::real("max |phi(z) - lambda z|", max_dev),
            Fact::text("note", "symbol is not multiplication by a constant"),
        ]));
    }
    if lambda.norm() > 1.0 + params.tolerances.membership {
        return Ok(Verdict::inconclusive(vec![Fact::real(
            "|lambda|",
            lambda.norm(),
        )]));
    }
    Ok(Verdict::new(
        Conclusion::NotTauPSupercyclic,
        Citation::Cor18,
        vec![
            Fact::point("lambda", lambda),
            Fact::real("|lambda|", lambda.norm()),
            Fact::real("max |phi(z) - lambda z| on grid", max_dev),
        ],
    ))
}
