//! The full analysis pipeline over a scenario, in fixed order: necessary
//! conditions, compactness obstruction, dynamical detectors, quotient
//! classification, then the domain-specific rules, then any shift
//! experiments. Fired conclusions accumulate in that order, so the report
//! always ends with the most specific verdict.

use num_complex::Complex64;
use supercyc_core::criteria::{
    circle_verdict, compact_banach_obstruction, default_pair, disc_algebra_verdict,
    disc_rotation_verdict, dynamical_obstructions, isometry_verdict, necessary_conditions_verdict,
    punctured_disc_verdict, punctured_plane_verdict, quotient_family_verdict, quotient_sequence,
    univalence_check, zero_free_weight_check, Citation, CircleAssertions, Conclusion,
    CriteriaError, Fact, QuotientClass, QuotientDiagnostic, QuotientError, UnivalenceOutcome,
    Verdict, ZeroFreeOutcome,
};
use supercyc_core::domains::{DomainKind, DomainPoint};
use supercyc_core::shiftlab::{
    apply_shift, construct_supercyclic_vector, cyclicity_structure_check, preimage_in_cinf,
    witness_search, SeqVector, WitnessCertificate,
};

use crate::report::{sig, sig_complex, Csv, Report};
use crate::scenario::{Scenario, SearchPlan, ShiftPlan};
use crate::CliError;

/// Largest window error a witness search may report and still count as
/// finite-scale approximation evidence.
pub const SEARCH_EVIDENCE_TOL: f64 = 1e-6;

/// A finished analysis: the report plus its numeric trace files.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub report: Report,
    pub csvs: Vec<Csv>,
}

pub fn describe_point(p: DomainPoint) -> String {
    match p {
        DomainPoint::Complex(c) => sig_complex(c),
        DomainPoint::Index(i) => format!("lattice point {i}"),
        DomainPoint::Infinity => "the point at infinity".to_string(),
    }
}

pub fn describe_quotient_class(class: &QuotientClass) -> String {
    match class {
        QuotientClass::Bounded { max_modulus } => {
            format!("Bounded (max modulus {})", sig(*max_modulus))
        }
        QuotientClass::ConvergesTo { limit } => {
            format!("ConvergesTo (limit {})", sig_complex(*limit))
        }
        QuotientClass::ApparentlyDense { cells_hit } => {
            format!("ApparentlyDense ({cells_hit} of 144 log-polar cells hit)")
        }
        QuotientClass::Unbounded { max_log_modulus } => {
            format!("Unbounded (max log modulus {})", sig(*max_log_modulus))
        }
    }
}

pub fn quotient_csv(scenario_name: &str, pair_idx: usize, f_idx: usize, d: &QuotientDiagnostic) -> Csv {
    let rows = d
        .values
        .iter()
        .map(|v| format!("{},{},{}", v.n, sig(v.log_mag), sig(v.phase)))
        .collect();
    Csv::new(
        format!("{scenario_name}.quotient.p{pair_idx}f{f_idx}.csv"),
        "n,log_abs_q,arg_q",
        rows,
    )
}

/// Runs every applicable check and assembles the report.
pub fn analyze(s: &Scenario) -> Result<Analysis, CliError> {
    let mut report = Report::new(&s.name, &s.domain, &s.symbol_src, &s.weight_src);
    let mut csvs = Vec::new();

    self_map_stage(s, &mut report);
    necessary_stage(s, &mut report);
    compactness_stage(s, &mut report);
    detector_stage(s, &mut report);
    quotient_stage(s, &mut report, &mut csvs)?;
    domain_stage(s, &mut report);
    if let Some(plan) = &s.shift {
        shift_stage(s, plan, &mut report, &mut csvs)?;
    }

    report.finish();
    Ok(Analysis { report, csvs })
}

/// Runs only the shift experiments; the scenario must carry a shift section.
pub fn witness_only(s: &Scenario) -> Result<Analysis, CliError> {
    let plan = s.shift.as_ref().ok_or_else(|| {
        CliError::Scenario("witness requires a shift section in the scenario".to_string())
    })?;
    let mut report = Report::new(&s.name, &s.domain, &s.symbol_src, &s.weight_src);
    let mut csvs = Vec::new();
    shift_stage(s, plan, &mut report, &mut csvs)?;
    report.finish();
    Ok(Analysis { report, csvs })
}

fn self_map_stage(s: &Scenario, report: &mut Report) {
    let sweep = s.domain.self_map_check(&s.symbol);
    let notes = if sweep.ok() {
        vec![format!(
            "every grid point maps into the domain ({} points)",
            s.domain.grid().len()
        )]
    } else {
        let first = &sweep.violations[0];
        vec![
            format!(
                "{} of {} grid points leave the domain or fail to evaluate",
                sweep.violations.len(),
                s.domain.grid().len()
            ),
            format!(
                "first violation at {}: {}",
                describe_point(first.point),
                first.reason
            ),
        ]
    };
    report.push_note("symbol self-map sweep", notes);
}

fn necessary_stage(s: &Scenario, report: &mut Report) {
    let zero_free = zero_free_weight_check(&s.weight, &s.domain, &s.params);
    let univalence = univalence_check(&s.symbol, &s.domain, &s.params);
    let mut notes = Vec::new();
    match &zero_free {
        ZeroFreeOutcome::Pass { min_modulus } => {
            notes.push(format!("min |w| on the grid = {}", sig(*min_modulus)));
        }
        ZeroFreeOutcome::Fail { point, modulus } => {
            let m = modulus.map_or("not evaluable".to_string(), sig);
            notes.push(format!(
                "weight vanishes at {} (modulus {m})",
                describe_point(*point)
            ));
        }
    }
    match &univalence {
        UnivalenceOutcome::Pass { pairs_checked } => {
            notes.push(format!("injectivity: {pairs_checked} grid pairs checked"));
        }
        UnivalenceOutcome::Fail { a, b, image_gap } => {
            notes.push(format!(
                "injectivity collision: {} and {} map within {}",
                sig_complex(*a),
                sig_complex(*b),
                sig(*image_gap)
            ));
        }
    }
    let verdict = necessary_conditions_verdict(&zero_free, &univalence);
    report.push_verdict("necessary conditions [Prop. 2]", notes, verdict);
}

fn compactness_stage(s: &Scenario, report: &mut Report) {
    let verdict =
        compact_banach_obstruction(&s.domain, s.assertions.nowhere_vanishing_member);
    let verdict = if verdict.fired() {
        verdict.with_caveat(
            "existence of a nowhere-vanishing member is a scenario assertion about the space",
        )
    } else {
        verdict
    };
    report.push_verdict("compactness obstruction [Thm 4]", Vec::new(), verdict);
}

fn detector_stage(s: &Scenario, report: &mut Report) {
    let verdict = dynamical_obstructions(&s.symbol, &s.weight, &s.domain, &s.params);
    report.push_verdict("dynamical detectors [Thm 5]", Vec::new(), verdict);
}

fn quotient_stage(s: &Scenario, report: &mut Report, csvs: &mut Vec<Csv>) -> Result<(), CliError> {
    if s.test_functions.is_empty() {
        return Ok(());
    }
    let pairs: Vec<(Complex64, Complex64)> = if s.quotient_pairs.is_empty() {
        default_pair(&s.domain).into_iter().collect()
    } else {
        s.quotient_pairs.clone()
    };
    if pairs.is_empty() {
        report.push_note(
            "quotient classification [Prop. 4]",
            vec!["no seed pair available on this grid".to_string()],
        );
        return Ok(());
    }
    let mut notes = Vec::new();
    let mut diagnostics = Vec::new();
    for (pi, pair) in pairs.iter().enumerate() {
        for (fi, (src, f)) in s.test_functions.iter().enumerate() {
            match quotient_sequence(&s.symbol, &s.weight, f, &s.domain, *pair, &s.params) {
                Ok(diag) => {
                    notes.push(format!(
                        "pair {pi} = ({}, {}), f = {src}: {}",
                        sig_complex(pair.0),
                        sig_complex(pair.1),
                        describe_quotient_class(&diag.class)
                    ));
                    if let Some(at) = diag.truncated_at {
                        notes.push(format!("pair {pi}, f = {src}: truncated at index {at}"));
                    }
                    csvs.push(quotient_csv(&s.name, pi, fi, &diag));
                    diagnostics.push(diag);
                }
                Err(QuotientError::SeedOutsideDomain(z)) => {
                    return Err(CliError::Scenario(format!(
                        "quotientPairs[{pi}]: seed {} lies outside the domain",
                        sig_complex(z)
                    )));
                }
                Err(QuotientError::AllSkipped) => {
                    notes.push(format!(
                        "pair {pi}, f = {src}: every index skipped; the sequence is undefined"
                    ));
                }
            }
        }
    }
    let verdict = if diagnostics.is_empty() {
        Verdict::inconclusive(vec![Fact::text(
            "note",
            "no quotient sequence was defined for the requested pairs",
        )])
    } else {
        quotient_family_verdict(&diagnostics)
    };
    report.push_verdict("quotient classification [Prop. 4]", notes, verdict);
    Ok(())
}

fn push_rule_outcome(
    report: &mut Report,
    name: &str,
    outcome: Result<Verdict, CriteriaError>,
) {
    match outcome {
        Ok(verdict) => report.push_verdict(name, Vec::new(), verdict),
        Err(e) => report.push_note(name, vec![format!("skipped: {e}")]),
    }
}

fn domain_stage(s: &Scenario, report: &mut Report) {
    let p = &s.params;
    match s.domain.kind {
        DomainKind::ClosedDisc { .. } => {
            push_rule_outcome(
                report,
                "analytic disc rule [Thm 6]",
                disc_algebra_verdict(&s.symbol, &s.weight, &s.domain, s.assertions.analytic, p),
            );
            push_rule_outcome(
                report,
                "isometry rule [Thm 19]",
                isometry_verdict(&s.symbol, &s.weight, &s.domain, p),
            );
            push_rule_outcome(
                report,
                "constant-multiplier rule [Cor. 18]",
                disc_rotation_verdict(&s.symbol, &s.domain, p),
            );
        }
        DomainKind::Circle { .. } => {
            let assertions = CircleAssertions {
                no_wandering_interval: s.assertions.no_wandering_interval,
            };
            push_rule_outcome(
                report,
                "circle pipeline [Prop. 21 / Prop. 22 / Thm 23]",
                circle_verdict(&s.symbol, &s.weight, &s.domain, assertions, p),
            );
        }
        DomainKind::PuncturedDisc { .. } => {
            push_rule_outcome(
                report,
                "punctured disc rule [Thm 12]",
                punctured_disc_verdict(&s.symbol, &s.weight, &s.domain, p),
            );
        }
        DomainKind::PuncturedPlane { .. } => {
            push_rule_outcome(
                report,
                "punctured plane rule [Thm 12]",
                punctured_plane_verdict(&s.symbol, &s.weight, &s.domain, p),
            );
        }
        DomainKind::Lattice { .. } | DomainKind::CompactifiedLattice { .. } => {
            // Sequence-space checks come from the shift section.
        }
    }
}

/// Largest coordinate deviation between two sequence vectors over the union
/// of their supports.
fn sup_deviation(a: &SeqVector, b: &SeqVector) -> f64 {
    let mut indices: Vec<i64> = a.iter().map(|(i, _)| i).collect();
    indices.extend(b.iter().map(|(i, _)| i));
    indices
        .into_iter()
        .map(|i| (a.get(i) - b.get(i)).norm())
        .fold(0.0, f64::max)
}

fn witness_csv_row(target_id: usize, n: usize, lambda: Complex64, error: f64) -> String {
    format!(
        "{target_id},{n},{},{},{}",
        sig(lambda.re),
        sig(lambda.im),
        sig(error)
    )
}

fn construction_check(
    plan: &ShiftPlan,
    targets: &[SeqVector],
    schedule: &[f64],
    report: &mut Report,
    rows: &mut Vec<String>,
) -> Result<(), CliError> {
    let cert: WitnessCertificate = construct_supercyclic_vector(targets, schedule)
        .map_err(|e| CliError::Scenario(format!("shift.construct: {e}")))?;
    let drift = cert.reverification_drift(&plan.op, targets);
    let mut notes = Vec::new();
    let mut max_error: f64 = 0.0;
    for a in &cert.approximations {
        max_error = max_error.max(a.window_error);
        notes.push(format!(
            "target {}: shift power n = {}, lambda = {}, window [{}, {}], window error = {}",
            a.target_id,
            a.n,
            sig_complex(a.lambda),
            a.window.0,
            a.window.1,
            sig(a.window_error)
        ));
        rows.push(witness_csv_row(a.target_id, a.n, a.lambda, a.window_error));
    }
    notes.push(format!(
        "re-verification drift through stepwise shifting = {}",
        sig(drift)
    ));
    notes.push(format!(
        "decay proxy on the declared support: {}",
        cert.vector.decay_proxy_ok()
    ));
    let verdict = Verdict::new(
        Conclusion::WitnessExhibited,
        Citation::Ex14,
        vec![
            Fact::int("targets reproduced", targets.len() as i64),
            Fact::real("largest window error", max_error),
            Fact::real("certificate tolerance", cert.tolerance),
            Fact::real("re-verification drift", drift),
        ],
    )
    .with_caveat(
        "finitely many windows at a finite horizon stand in for pointwise approximation on every finite set",
    );
    report.push_verdict("shift block construction [Ex. 14]", notes, verdict);
    Ok(())
}

fn search_check(plan: &ShiftPlan, search: &SearchPlan, report: &mut Report, rows: &mut Vec<String>) {
    let mut notes = Vec::new();
    let mut max_error: f64 = 0.0;
    for (i, target) in search.targets.iter().enumerate() {
        let hit = witness_search(&plan.op, &search.from, target, search.window, search.max_n);
        max_error = max_error.max(hit.error);
        notes.push(format!(
            "target {i}: best shift power n = {}, lambda = {}, window error = {}",
            hit.n,
            sig_complex(hit.lambda),
            sig(hit.error)
        ));
        rows.push(witness_csv_row(i, hit.n, hit.lambda, hit.error));
    }
    let facts = vec![
        Fact::int("targets searched", search.targets.len() as i64),
        Fact::int("largest power tried", search.max_n as i64),
        Fact::real("largest window error", max_error),
    ];
    let verdict = if max_error <= SEARCH_EVIDENCE_TOL {
        Verdict::new(Conclusion::WitnessExhibited, Citation::Prop16i, facts)
            .with_caveat("a finite search over shift powers is evidence, not a proof")
    } else {
        Verdict::inconclusive(facts)
    };
    report.push_verdict("shift witness search [Prop. 16(i)]", notes, verdict);
}

fn preimage_check(plan: &ShiftPlan, f: &SeqVector, report: &mut Report) -> Result<(), CliError> {
    let outcome = preimage_in_cinf(&plan.op, f)
        .map_err(|e| CliError::Scenario(format!("shift.preimageOf: {e}")))?;
    match outcome {
        Some(g) => {
            let back = apply_shift(&plan.op, &g, 1);
            let residual = sup_deviation(&back, f);
            let (lo, hi) = g.support_hull().unwrap_or((0, 0));
            let limit = g.limit_value().unwrap_or(Complex64::new(0.0, 0.0));
            let verdict = Verdict::new(
                Conclusion::WitnessExhibited,
                Citation::Prop16ii,
                vec![
                    Fact::text("preimage support hull", format!("[{lo}, {hi}]")),
                    Fact::point("preimage tail limit", limit),
                    Fact::real("one-step verification residual", residual),
                ],
            );
            report.push_verdict("shift preimage step [Prop. 16(ii)]", Vec::new(), verdict);
        }
        None => {
            report.push_note(
                "shift preimage step [Prop. 16(ii)]",
                vec![
                    "the candidate preimage tail does not settle; no preimage in the convergent space"
                        .to_string(),
                ],
            );
        }
    }
    Ok(())
}

fn shift_stage(
    s: &Scenario,
    plan: &ShiftPlan,
    report: &mut Report,
    csvs: &mut Vec<Csv>,
) -> Result<(), CliError> {
    report.push_note(
        "shift experiment setup",
        vec![format!("operator: {}", plan.label)],
    );
    let mut rows = Vec::new();
    if let Some((targets, schedule)) = &plan.construct {
        construction_check(plan, targets, schedule, report, &mut rows)?;
    }
    if let Some(search) = &plan.search {
        search_check(plan, search, report, &mut rows);
    }
    if let Some(f) = &plan.preimage_of {
        preimage_check(plan, f, report)?;
    }
    if let Some((codimension, image_inside)) = plan.structure {
        let verdict = cyclicity_structure_check(codimension, image_inside)
            .with_caveat("the invariant-subspace data is a scenario declaration");
        report.push_verdict("cyclicity structure rule [Lemma 15]", Vec::new(), verdict);
    }
    if !rows.is_empty() {
        csvs.push(Csv::new(
            format!("{}.witness.csv", s.name),
            "targetId,n,re_lambda,im_lambda,error",
            rows,
        ));
    }
    Ok(())
}
