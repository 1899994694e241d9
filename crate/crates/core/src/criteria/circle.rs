//! Verdict pipeline for weighted composition operators on a circle. The
//! stages run in a fixed order and the first one that fires wins:
//! injectivity (a failure is already an obstruction), periodic points,
//! rigid rotations with unimodular weight, and finally irrational rotation
//! number with unimodular weight under the asserted absence of wandering
//! intervals.

use super::{
    univalence_check, Citation, Conclusion, CriteriaError, Fact, UnivalenceOutcome, Verdict,
};
use crate::domains::{DomainKind, DomainSpec};
use crate::dynamics::{find_fixed_points, find_periodic_points, rotation_number};
use crate::expr::Expression;
use crate::params::Params;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Facts about the scenario that cannot be established numerically and are
/// taken on the caller's word. Verdicts that consume them say so.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CircleAssertions {
    /// The symbol has no wandering interval (true for instance for C^2
    /// diffeomorphisms); required by the irrational-rotation stage.
    pub no_wandering_interval: bool,
}

fn max_weight_unimodular_deviation(
    w: &Expression,
    grid: &[Complex64],
) -> Result<f64, CriteriaError> {
    let mut max_dev: f64 = 0.0;
    for &z in grid {
        let v = w.eval(z)?;
        max_dev = max_dev.max((v.norm() - 1.0).abs());
    }
    Ok(max_dev)
}

/// Runs the circle pipeline. The symbol must map the circle grid into the
/// circle; anything else is an error, not a verdict.
pub fn circle_verdict(
    phi: &Expression,
    w: &Expression,
    domain: &DomainSpec,
    assertions: CircleAssertions,
    params: &Params,
) -> Result<Verdict, CriteriaError> {
    let DomainKind::Circle { radius } = domain.kind else {
        return Err(CriteriaError::NeedsKind("circle"));
    };
    let self_map = domain.self_map_check(phi);
    if !self_map.ok() {
        return Err(CriteriaError::SelfMap(self_map.violations.len()));
    }

    // Injectivity. A collision is itself an obstruction; a pass upgrades
    // the symbol to a homeomorphism (catalogue rule Lemma 20), which the
    // later stages assume.
    if let UnivalenceOutcome::Fail { a, b, image_gap } = univalence_check(phi, domain, params) {
        return Ok(Verdict::new(
            Conclusion::NotTauPSupercyclic,
            Citation::Prop2ii,
            vec![
                Fact::point("collision point a", a),
                Fact::point("collision point b", b),
                Fact::real("image gap", image_gap),
            ],
        ));
    }
    let homeo_fact = Fact::text("homeomorphism", "injective on the grid, upgraded by Lemma 20");

    // Periodic points, fixed points included.
    let fixed = find_fixed_points(phi, domain, params);
    if let Some(p) = fixed.first().and_then(|p| p.to_complex()) {
        return Ok(Verdict::new(
            Conclusion::NotTauPSupercyclic,
            Citation::Prop21,
            vec![
                homeo_fact,
                Fact::point("periodic point", p),
                Fact::int("period", 1),
            ],
        ));
    }
    let periodic = find_periodic_points(phi, domain, params.horizons.max_period, params);
    if let Some(p) = periodic.first() {
        return Ok(Verdict::new(
            Conclusion::NotTauPSupercyclic,
            Citation::Prop21,
            vec![
                homeo_fact,
                Fact::point("periodic point", p.point),
                Fact::int("period", p.period as i64),
                Fact::real("residual", p.residual),
            ],
        ));
    }

    let grid = domain.complex_grid();
    let weight_dev = max_weight_unimodular_deviation(w, &grid)?;
    let weight_unimodular = weight_dev <= params.tolerances.membership;

    // Rigid rotation with unimodular weight.
    let base = grid.first().copied().expect("circle grids are nonempty");
    let lambda = phi.eval(base)? / base;
    let rotation_dev = grid
        .iter()
        .map(|&z| match phi.eval(z) {
            Ok(v) => (v - lambda * z).norm(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0f64, f64::max);
    let is_rotation = rotation_dev <= params.tolerances.membership * (1.0 + radius);
    if is_rotation && weight_unimodular {
        return Ok(Verdict::new(
            Conclusion::NotTauPSupercyclic,
            Citation::Prop22,
            vec![
                homeo_fact,
                Fact::point("rotation factor", lambda),
                Fact::real("rotation in turns", lambda.arg().rem_euclid(TAU) / TAU),
                Fact::real("max rotation residual", rotation_dev),
                Fact::real("max | |w|-1 |", weight_dev),
            ],
        ));
    }

    // Irrational rotation number, unimodular weight, no wandering interval.
    let rotation = rotation_number(phi, radius, params.horizons.rotation_n, params);
    if let Ok(report) = &rotation {
        if report.likely_rational.is_none() && weight_unimodular && assertions.no_wandering_interval
        {
            return Ok(Verdict::new(
                Conclusion::NotTauPSupercyclic,
                Citation::Thm23,
                vec![
                    homeo_fact,
                    Fact::real("rotation number", report.rotation_number),
                    Fact::real("seed disagreement", report.confidence),
                    Fact::text(
                        "rationality scan",
                        "no p/q with q <= 32 within 1e-4 of the estimate",
                    ),
                    Fact::real("max | |w|-1 |", weight_dev),
                ],
            )
            .with_caveat("the absence of wandering intervals is a scenario assertion")
            .with_caveat(
                "irrationality of the rotation number is inferred from a finite-precision estimate",
            ));
        }
    }

    let mut facts = vec![
        homeo_fact,
        Fact::boolean("weight unimodular on grid", weight_unimodular),
        Fact::boolean("rigid rotation", is_rotation),
        Fact::boolean("no-wandering-interval asserted", assertions.no_wandering_interval),
    ];
    match rotation {
        Ok(report) => {
            facts.push(Fact::real("rotation number", report.rotation_number));
            if let Some((p, q)) = report.likely_rational {
                facts.push(Fact::text("likely rational", format!("{p}/{q}")));
            }
        }
        Err(e) => facts.push(Fact::text("rotation number", e.to_string())),
    }
    Ok(Verdict::inconclusive(facts))
}
