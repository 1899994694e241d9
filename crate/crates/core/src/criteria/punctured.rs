//! Verdicts for composition operators on the punctured disc and plane.
//! Injective self-maps of the punctured plane have one of two closed
//! forms, `a z` or `a / z`; the verdict classifies the symbol, then runs
//! the branch that obstructs it: Laurent-projection growth for genuine
//! dilations, the involution argument for `a / z`, and for unimodular
//! rotations a runaway refutation on an invariant ring sample.

use super::{laurent_obstruction, Citation, Conclusion, CriteriaError, Fact, Verdict};
use crate::domains::{DomainKind, DomainSpec};
use crate::dynamics::{strongly_runaway, RunawayOutcome};
use crate::expr::Expression;
use crate::params::Params;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Relative tolerance for fitting the closed forms on the grid.
const FORM_FIT_REL: f64 = 1e-8;
/// Angular recurrence: fire once some iterate of the rotation factor comes
/// back within this distance of 1.
const RECURRENCE_TOL: f64 = 0.05;
/// Steps tried before giving up on a recurrence; pigeonhole guarantees a
/// return well inside this for any unimodular factor.
const RECURRENCE_HORIZON: usize = 4096;
/// Laurent indices verified alongside the witness index.
const DEFAULT_K_LIST: [i64; 5] = [-2, -1, 0, 1, 2];
/// Sample count of the invariant ring used by the runaway refutation.
const RING_SAMPLES: usize = 64;

/// Closed form fitted to the symbol on a punctured-domain grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "camelCase")]
pub enum PuncturedForm {
    /// phi(z) = a z on the whole grid.
    Dilation { a: Complex64 },
    /// phi(z) = a / z on the whole grid.
    Reciprocal { a: Complex64 },
    /// Neither form fits; the symbol is not an injective self-map shape.
    NotInjectiveForm,
}

/// Fits `a` from the value at 1, then tries the two closed forms over the
/// full grid at relative tolerance 1e-8.
pub fn punctured_self_map_classifier(phi: &Expression, domain: &DomainSpec) -> PuncturedForm {
    let one = Complex64::new(1.0, 0.0);
    let a = match phi.eval(one) {
        Ok(v) => v,
        Err(_) => return PuncturedForm::NotInjectiveForm,
    };
    let grid = domain.complex_grid();
    let fits = |model: &dyn Fn(Complex64) -> Option<Complex64>| {
        grid.iter().all(|&z| {
            match (phi.eval(z), model(z)) {
                (Ok(got), Some(want)) => (got - want).norm() <= FORM_FIT_REL * (1.0 + want.norm()),
                _ => false,
            }
        })
    };
    if fits(&|z| Some(a * z)) {
        return PuncturedForm::Dilation { a };
    }
    if fits(&|z| (z.norm() > 0.0).then(|| a / z)) {
        return PuncturedForm::Reciprocal { a };
    }
    PuncturedForm::NotInjectiveForm
}

/// First n >= 1 with |a^n - 1| below the recurrence tolerance, tracking the
/// angle only, plus the achieved distance.
fn rotation_recurrence(a: Complex64) -> Option<(usize, f64)> {
    let mut p = Complex64::new(1.0, 0.0);
    let dir = a / a.norm();
    for n in 1..=RECURRENCE_HORIZON {
        p *= dir;
        let dist = (p - Complex64::new(1.0, 0.0)).norm();
        if dist < RECURRENCE_TOL {
            return Some((n, dist));
        }
    }
    None
}

fn weight_is_one(w: &Expression, domain: &DomainSpec, tol: f64) -> Result<f64, ()> {
    let mut max_dev: f64 = 0.0;
    for z in domain.complex_grid() {
        match w.eval(z) {
            Ok(v) => max_dev = max_dev.max((v - Complex64::new(1.0, 0.0)).norm()),
            Err(_) => return Err(()),
        }
    }
    if max_dev <= tol {
        Ok(max_dev)
    } else {
        Err(())
    }
}

/// A rotation keeps every centred ring invariant, so weak supercyclicity
/// would contradict the runaway requirement. The verdict certifies the
/// failure on a sampled ring: the iterated sample keeps meeting the
/// original one all the way to the horizon.
fn rotation_branch_verdict(
    phi: &Expression,
    a: Complex64,
    domain: &DomainSpec,
    params: &Params,
) -> Verdict {
    let (n, dist) = match rotation_recurrence(a) {
        Some(hit) => hit,
        None => {
            return Verdict::inconclusive(vec![
                Fact::point("rotation factor", a),
                Fact::text("note", "no angular recurrence found within the horizon"),
            ])
        }
    };
    let moduli: Vec<f64> = domain.complex_grid().iter().map(|z| z.norm()).collect();
    let lo = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = moduli.iter().copied().fold(0.0f64, f64::max);
    let r0 = (lo * hi).sqrt();
    let ring: Vec<Complex64> = (0..RING_SAMPLES)
        .map(|j| Complex64::from_polar(r0, TAU * j as f64 / RING_SAMPLES as f64))
        .collect();
    // Any rotated ring point sits within half a sample spacing of the
    // original sample, so one full chord spacing separates hits from misses.
    let separation = 2.0 * r0 * (PI / RING_SAMPLES as f64).sin();
    let base = vec![
        Fact::text("branch", "rotation recurrence"),
        Fact::point("rotation factor", a),
        Fact::int("recurrence step", n as i64),
        Fact::real("distance to identity at recurrence", dist),
    ];
    match strongly_runaway(phi, &ring, params.horizons.runaway_n, separation) {
        RunawayOutcome::Returns { last_return, .. } => {
            let mut evidence = base;
            evidence.push(Fact::real("invariant ring radius", r0));
            evidence.push(Fact::int(
                "last return of the ring sample",
                last_return as i64,
            ));
            Verdict::new(Conclusion::NotWeaklySupercyclic, Citation::Cor11, evidence)
                .with_caveat("the runaway refutation samples one ring over a finite horizon")
        }
        other => {
            let mut evidence = base;
            evidence.push(Fact::text("runaway certificate", format!("{other:?}")));
            Verdict::inconclusive(evidence)
        }
    }
}

fn dilation_branch_verdict(
    a: Complex64,
    radius: f64,
    params: &Params,
) -> Result<Verdict, CriteriaError> {
    let witness = if a.norm() < 1.0 { "1/z" } else { "z" };
    let f = Expression::parse(witness).expect("fixed witness parses");
    let verdict = laurent_obstruction(a, &f, radius, &DEFAULT_K_LIST, params)?;
    let mut evidence = vec![Fact::text("branch", "dilation")];
    evidence.extend(verdict.evidence);
    Ok(Verdict {
        conclusion: verdict.conclusion,
        citation: verdict.citation,
        evidence,
        caveats: verdict.caveats,
    })
}

/// Composition-operator verdict on the punctured plane.
pub fn punctured_plane_verdict(
    phi: &Expression,
    w: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> Result<Verdict, CriteriaError> {
    let DomainKind::PuncturedPlane { .. } = domain.kind else {
        return Err(CriteriaError::NeedsKind("punctured plane"));
    };
    if weight_is_one(w, domain, params.tolerances.membership).is_err() {
        return Ok(Verdict::inconclusive(vec![Fact::text(
            "note",
            "the rule covers composition operators; the weight is not identically 1",
        )]));
    }
    let self_map = domain.self_map_check(phi);
    let form = punctured_self_map_classifier(phi, domain);
    match form {
        PuncturedForm::Dilation { a } if (a.norm() - 1.0).abs() <= params.tolerances.spectral_margin => {
            Ok(rotation_branch_verdict(phi, a, domain, params))
        }
        PuncturedForm::Dilation { a } => dilation_branch_verdict(a, 1.0, params),
        PuncturedForm::Reciprocal { a } => {
            // phi(phi(z)) = a / (a / z) = z; certify on the grid and use the
            // involution argument: the square of the operator is the
            // identity, which is never weakly supercyclic in dimension > 1.
            let mut max_res: f64 = 0.0;
            for z in domain.complex_grid() {
                let back = phi.eval(z).and_then(|u| phi.eval(u));
                match back {
                    Ok(b) => max_res = max_res.max((b - z).norm() / (1.0 + z.norm())),
                    Err(_) => {
                        return Ok(Verdict::inconclusive(vec![Fact::text(
                            "note",
                            "the composition square failed to evaluate on the grid",
                        )]))
                    }
                }
            }
            if max_res > FORM_FIT_REL {
                return Ok(Verdict::inconclusive(vec![Fact::real(
                    "max relative residual of the composition square",
                    max_res,
                )]));
            }
            Ok(Verdict::new(
                Conclusion::NotWeaklySupercyclic,
                Citation::Thm12,
                vec![
                    Fact::text("branch", "involution"),
                    Fact::point("reciprocal factor", a),
                    Fact::real("max relative residual of the composition square", max_res),
                ],
            ))
        }
        PuncturedForm::NotInjectiveForm => Ok(Verdict::inconclusive(vec![
            Fact::text("fitted form", "neither a z nor a / z"),
            Fact::int("self-map violations", self_map.violations.len() as i64),
        ])),
    }
}

/// Composition-operator verdict on the punctured disc. The fitted dilation
/// extends across the puncture; a contracting factor runs the Laurent
/// branch on a circle inside the disc, a unimodular one the recurrence
/// branch.
pub fn punctured_disc_verdict(
    phi: &Expression,
    w: &Expression,
    domain: &DomainSpec,
    params: &Params,
) -> Result<Verdict, CriteriaError> {
    let DomainKind::PuncturedDisc { .. } = domain.kind else {
        return Err(CriteriaError::NeedsKind("punctured disc"));
    };
    if weight_is_one(w, domain, params.tolerances.membership).is_err() {
        return Ok(Verdict::inconclusive(vec![Fact::text(
            "note",
            "the rule covers composition operators; the weight is not identically 1",
        )]));
    }
    let self_map = domain.self_map_check(phi);
    if !self_map.ok() {
        return Ok(Verdict::inconclusive(vec![
            Fact::int("self-map violations", self_map.violations.len() as i64),
            Fact::text("note", "the symbol does not map the punctured disc into itself"),
        ]));
    }
    match punctured_self_map_classifier(phi, domain) {
        PuncturedForm::Dilation { a } if (a.norm() - 1.0).abs() <= params.tolerances.spectral_margin => {
            Ok(rotation_branch_verdict(phi, a, domain, params))
        }
        PuncturedForm::Dilation { a } if a.norm() < 1.0 => {
            let mut verdict = dilation_branch_verdict(a, 0.5, params)?;
            verdict.evidence.insert(
                0,
                Fact::text("extension", "the dilation extends across the puncture"),
            );
            Ok(verdict)
        }
        PuncturedForm::Dilation { a } => Ok(Verdict::inconclusive(vec![
            Fact::point("dilation factor", a),
            Fact::text(
                "note",
                "an expanding dilation is not a self-map of the punctured disc; the grid sweep was too coarse to notice",
            ),
        ])),
        PuncturedForm::Reciprocal { a } => Ok(Verdict::inconclusive(vec![
            Fact::point("reciprocal factor", a),
            Fact::text("note", "a / z does not map the punctured disc into itself"),
        ])),
        PuncturedForm::NotInjectiveForm => Ok(Verdict::inconclusive(vec![Fact::text(
            "fitted form",
            "neither a z nor a / z",
        )])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::FactValue;

    fn expr(s: &str) -> Expression {
        Expression::parse(s).expect("parses")
    }

    fn plane() -> DomainSpec {
        DomainKind::PuncturedPlane {
            inner_cutoff: 0.05,
            outer_cutoff: 4.0,
        }
        .build(8, 1e-9)
        .expect("valid")
    }

    fn disc() -> DomainSpec {
        DomainKind::PuncturedDisc { inner_cutoff: 0.05 }
            .build(8, 1e-9)
            .expect("valid")
    }

    #[test]
    fn classifier_recognizes_the_three_shapes() {
        let d = plane();
        assert_eq!(
            punctured_self_map_classifier(&expr("2*z"), &d),
            PuncturedForm::Dilation {
                a: Complex64::new(2.0, 0.0)
            }
        );
        assert_eq!(
            punctured_self_map_classifier(&expr("0.5/z"), &d),
            PuncturedForm::Reciprocal {
                a: Complex64::new(0.5, 0.0)
            }
        );
        assert_eq!(
            punctured_self_map_classifier(&expr("z+1"), &d),
            PuncturedForm::NotInjectiveForm
        );
    }

    #[test]
    fn expanding_dilation_runs_the_laurent_branch() {
        let v = punctured_plane_verdict(&expr("2*z"), &expr("1"), &plane(), &Params::default())
            .expect("domain matches");
        assert_eq!(v.conclusion, Conclusion::NotWeaklySupercyclic);
        assert_eq!(v.citation, Some(Citation::Thm12));
        assert!(v
            .evidence
            .iter()
            .any(|f| f.label == "branch" && matches!(&f.value, FactValue::Text(t) if t == "dilation")));
    }

    #[test]
    fn reciprocal_runs_the_involution_branch() {
        let v = punctured_plane_verdict(&expr("0.5/z"), &expr("1"), &plane(), &Params::default())
            .expect("domain matches");
        assert_eq!(v.conclusion, Conclusion::NotWeaklySupercyclic);
        assert!(v
            .evidence
            .iter()
            .any(|f| f.label == "branch" && matches!(&f.value, FactValue::Text(t) if t == "involution")));
    }

    #[test]
    fn unit_rotation_runs_the_recurrence_branch() {
        let v = punctured_plane_verdict(
            &expr("exp(i)*z"),
            &expr("1"),
            &plane(),
            &Params::default(),
        )
        .expect("domain matches");
        assert_eq!(v.conclusion, Conclusion::NotWeaklySupercyclic);
        assert_eq!(v.citation, Some(Citation::Cor11));
        let step = v.evidence.iter().find(|f| f.label == "recurrence step");
        assert!(
            matches!(step, Some(Fact { value: FactValue::Int(44), .. })),
            "one radian first recurs at step 44, got {step:?}"
        );
        assert!(v.evidence.iter().any(|f| f.label == "last return of the ring sample"));
    }

    #[test]
    fn shifted_symbol_is_inconclusive() {
        let v = punctured_plane_verdict(&expr("z+1"), &expr("1"), &plane(), &Params::default())
            .expect("domain matches");
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
    }

    #[test]
    fn nonunit_weight_is_out_of_scope() {
        let v = punctured_plane_verdict(&expr("2*z"), &expr("z"), &plane(), &Params::default())
            .expect("domain matches");
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
    }

    #[test]
    fn contracting_dilation_obstructs_on_the_disc() {
        let v = punctured_disc_verdict(&expr("z/2"), &expr("1"), &disc(), &Params::default())
            .expect("domain matches");
        assert_eq!(v.conclusion, Conclusion::NotWeaklySupercyclic);
        assert_eq!(v.citation, Some(Citation::Thm12));
    }

    #[test]
    fn disc_rotation_recurs() {
        let v = punctured_disc_verdict(&expr("i*z"), &expr("1"), &disc(), &Params::default())
            .expect("domain matches");
        assert_eq!(v.conclusion, Conclusion::NotWeaklySupercyclic);
        assert_eq!(v.citation, Some(Citation::Cor11));
        let step = v.evidence.iter().find(|f| f.label == "recurrence step");
        assert!(matches!(
            step,
            Some(Fact {
                value: FactValue::Int(4),
                ..
            })
        ));
    }

    #[test]
    fn wrong_domain_kind_is_an_error() {
        let circle = DomainKind::Circle { radius: 1.0 }.build(8, 1e-9).expect("valid");
        assert!(punctured_plane_verdict(&expr("2*z"), &expr("1"), &circle, &Params::default())
            .is_err());
    }
}
