//! Shipped preset scenarios. Each reproduces one separating example at desk
//! scale, with resolutions and horizons pinned so the reports are stable.

use num_complex::Complex64;
use supercyc_core::criteria::punctured_plane_verdict;
use supercyc_core::domains::DomainKind;
use supercyc_core::expr::Expression;
use supercyc_core::params::Horizons;
use supercyc_core::shiftlab::{multiplication_example, SeqVector, SpaceTag};

use crate::analyze::{analyze, Analysis};
use crate::report::sig;
use crate::scenario::{
    resolve, Assertions, ConstructSection, PointData, ScenarioFile, SearchSection, ShiftKindTag,
    ShiftSection, StructureSection,
};
use crate::CliError;

/// The shipped preset ids, in catalogue order.
pub const PRESET_IDS: [&str; 10] = [
    "thm6-disc",
    "prop22-rotation",
    "prop21-periodic",
    "thm12-punctured-disc",
    "thm12-punctured-plane",
    "ex14-bilateral-shift",
    "prop16-weighted-shift",
    "ex17-multiplication",
    "thm19-isometry",
    "cor18-disc-rotation",
];

/// Extra study a preset runs after the generic pipeline.
#[derive(Clone, Debug)]
pub enum PresetExtra {
    None,
    /// Classifies each symbol on the preset's punctured-plane grid.
    PlaneBranchSweep(&'static [&'static str]),
    /// Polynomial-density study of the multiplication operator.
    MultiplicationStudy { resolution: u32, max_degree: usize },
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub file: ScenarioFile,
    pub extra: PresetExtra,
}

fn base_file(name: &str, domain: DomainKind, resolution: u32, symbol: &str, weight: &str) -> ScenarioFile {
    ScenarioFile {
        name: Some(name.to_string()),
        domain,
        resolution,
        symbol: symbol.to_string(),
        weight: weight.to_string(),
        test_functions: Vec::new(),
        quotient_pairs: Vec::new(),
        assertions: Assertions::default(),
        horizons: Horizons::default(),
        tolerances: Default::default(),
        shift: None,
    }
}

fn seq(tag: SpaceTag, entries: &[(i64, f64)]) -> SeqVector {
    SeqVector::from_entries(
        tag,
        entries.iter().map(|&(i, x)| (i, Complex64::new(x, 0.0))),
    )
}

fn declared(tag: SpaceTag, entries: &[(i64, f64)], lo: i64, hi: i64) -> SeqVector {
    seq(tag, entries)
        .declare_support(lo, hi)
        .expect("preset support hulls fit their declarations")
}

/// Builds the preset with the given id.
pub fn preset(id: &str) -> Result<Preset, CliError> {
    let p = match id {
        "thm6-disc" => {
            let mut f = base_file(
                id,
                DomainKind::ClosedDisc { radius: 1.0 },
                32,
                "(z+0.5)/(1+0.5*z)",
                "2",
            );
            f.test_functions = vec!["1".to_string()];
            f.assertions.analytic = true;
            f.assertions.nowhere_vanishing_member = true;
            Preset { file: f, extra: PresetExtra::None }
        }
        "prop22-rotation" => {
            let mut f = base_file(
                id,
                DomainKind::Circle { radius: 1.0 },
                64,
                "exp(2*pi*i*0.3)*z",
                "z",
            );
            f.test_functions = vec!["1".to_string()];
            // The rotation by 3/10 of a turn has period-ten points; the
            // periodic scan is capped below ten so the report exercises the
            // rigid-rotation rule that names this preset.
            f.horizons.max_period = 8;
            Preset { file: f, extra: PresetExtra::None }
        }
        "prop21-periodic" => {
            let mut f = base_file(id, DomainKind::Circle { radius: 1.0 }, 64, "-z", "exp(z)");
            f.test_functions = vec!["1".to_string()];
            Preset { file: f, extra: PresetExtra::None }
        }
        "thm12-punctured-disc" => {
            let mut f = base_file(
                id,
                DomainKind::PuncturedDisc { inner_cutoff: 0.05 },
                16,
                "z/2",
                "1",
            );
            f.test_functions = vec!["1".to_string()];
            Preset { file: f, extra: PresetExtra::None }
        }
        "thm12-punctured-plane" => {
            let mut f = base_file(
                id,
                DomainKind::PuncturedPlane { inner_cutoff: 0.05, outer_cutoff: 4.0 },
                16,
                "2*z",
                "1",
            );
            f.test_functions = vec!["1".to_string()];
            Preset {
                file: f,
                extra: PresetExtra::PlaneBranchSweep(&["2*z", "0.5/z", "exp(i)*z"]),
            }
        }
        "ex14-bilateral-shift" => {
            let mut f = base_file(
                id,
                DomainKind::CompactifiedLattice { lo: -32, hi: 32 },
                16,
                "z+1",
                "1",
            );
            f.assertions.nowhere_vanishing_member = true;
            f.shift = Some(ShiftSection {
                kind: ShiftKindTag::Bilateral,
                weights: Vec::new(),
                weights_decay: false,
                construct: Some(ConstructSection {
                    targets: vec![
                        declared(SpaceTag::C0Z, &[(0, 1.0)], -2, 2),
                        declared(SpaceTag::C0Z, &[(-1, 3.0), (0, 1.0)], -3, 3),
                        declared(SpaceTag::C0Z, &[(0, 1.0), (1, 2.0), (2, 1.0)], -3, 3),
                    ],
                    schedule: None,
                }),
                search: None,
                structure: None,
                preimage_of: None,
            });
            Preset { file: f, extra: PresetExtra::None }
        }
        "prop16-weighted-shift" => {
            let mut f = base_file(
                id,
                DomainKind::Lattice { lo: 0, hi: 48 },
                16,
                "z+1",
                "1/(z+2)",
            );
            // Weight at index j (from 1) is 1/(j+1), matching the grid
            // weight 1/(n+2) read off at lattice point n = j-1.
            let weights: Vec<f64> = (1..=128).map(|j| 1.0 / (j as f64 + 1.0)).collect();
            f.shift = Some(ShiftSection {
                kind: ShiftKindTag::Unilateral,
                weights,
                weights_decay: true,
                construct: None,
                search: Some(SearchSection {
                    from: seq(SpaceTag::C0N, &[(5, 1.0)]),
                    targets: vec![seq(SpaceTag::C0N, &[(0, 1.0)]), seq(SpaceTag::C0N, &[(1, 1.0)])],
                    window: (0, 6),
                    max_n: Some(32),
                }),
                structure: Some(StructureSection { codimension: 2, image_inside: true }),
                preimage_of: Some(seq(SpaceTag::C0N, &[(0, 1.0)])),
            });
            Preset { file: f, extra: PresetExtra::None }
        }
        "ex17-multiplication" => {
            let mut f = base_file(id, DomainKind::ClosedDisc { radius: 1.0 }, 32, "z", "z");
            f.test_functions = vec!["1".to_string()];
            Preset {
                file: f,
                extra: PresetExtra::MultiplicationStudy { resolution: 64, max_degree: 16 },
            }
        }
        "thm19-isometry" => {
            let mut f = base_file(
                id,
                DomainKind::ClosedDisc { radius: 1.0 },
                32,
                "(z-0.3)/(1-0.3*z)",
                "exp(i*0.2)",
            );
            f.test_functions = vec!["1".to_string()];
            f.assertions.analytic = true;
            f.assertions.nowhere_vanishing_member = true;
            Preset { file: f, extra: PresetExtra::None }
        }
        "cor18-disc-rotation" => {
            let mut f = base_file(
                id,
                DomainKind::ClosedDisc { radius: 1.0 },
                32,
                "exp(i*0.5)*z",
                "1+z/2",
            );
            f.test_functions = vec!["1".to_string()];
            f.assertions.nowhere_vanishing_member = true;
            f.quotient_pairs = vec![(
                PointData { re: 1.0, im: 0.0 },
                PointData { re: 0.5, im: 0.0 },
            )];
            Preset { file: f, extra: PresetExtra::None }
        }
        _ => {
            return Err(CliError::Scenario(format!(
                "unknown preset id {id:?}; known ids: {}",
                PRESET_IDS.join(", ")
            )))
        }
    };
    Ok(p)
}

fn plane_branch_sweep(analysis: &mut Analysis, scenario: &crate::scenario::Scenario, symbols: &[&str]) {
    for sym in symbols {
        let name = format!("branch sweep [Thm 12]: {sym}");
        match Expression::parse(sym) {
            Ok(phi) => match punctured_plane_verdict(&phi, &scenario.weight, &scenario.domain, &scenario.params) {
                Ok(verdict) => analysis.report.push_verdict(&name, Vec::new(), verdict),
                Err(e) => analysis.report.push_note(&name, vec![format!("skipped: {e}")]),
            },
            Err(e) => analysis.report.push_note(&name, vec![format!("skipped: {e}")]),
        }
    }
}

fn multiplication_study(
    analysis: &mut Analysis,
    resolution: u32,
    max_degree: usize,
) -> Result<(), CliError> {
    let (verdict, density) = multiplication_example(resolution, max_degree)
        .map_err(|e| CliError::Numeric(format!("multiplication study: {e}")))?;
    let mut notes = vec![format!("disc grid points = {}", density.grid_points)];
    for fit in &density.fits {
        let top = fit.sup_errors.last().copied().unwrap_or(f64::NAN);
        notes.push(format!(
            "sup error fitting {} by polynomials of degree {} = {}",
            fit.name,
            fit.sup_errors.len().saturating_sub(1),
            sig(top)
        ));
    }
    analysis
        .report
        .push_verdict("multiplication operator study [Ex. 17]", notes, verdict);
    Ok(())
}

/// Runs a preset end to end: generic pipeline plus the preset's extra
/// study. `grid_scale` multiplies the pinned grid resolution; the verdict
/// set must not depend on it.
pub fn reproduce(id: &str, grid_scale: u32) -> Result<Analysis, CliError> {
    let preset = preset(id)?;
    let scenario = resolve(preset.file, id)?.with_resolution_scale(grid_scale)?;
    let mut analysis = analyze(&scenario)?;
    match preset.extra {
        PresetExtra::None => {}
        PresetExtra::PlaneBranchSweep(symbols) => {
            plane_branch_sweep(&mut analysis, &scenario, symbols);
        }
        PresetExtra::MultiplicationStudy { resolution, max_degree } => {
            multiplication_study(&mut analysis, resolution.saturating_mul(grid_scale), max_degree)?;
        }
    }
    analysis.report.finish();
    Ok(analysis)
}
