//! Scenario files: the JSON schema, validation, and the resolved form the
//! pipeline consumes.
//!
//! A scenario names a domain, a symbol and a weight, and optionally test
//! functions for quotient checks, assertion flags the rules may consume,
//! horizon/tolerance overrides, and a shift-experiment section for the
//! sequence-space checks. Every expression is parsed at load time so a bad
//! scenario fails before any analysis starts.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use supercyc_core::domains::{DomainKind, DomainSpec};
use supercyc_core::expr::Expression;
use supercyc_core::params::{Horizons, Params, Tolerances};
use supercyc_core::shiftlab::{default_epsilon_schedule, SeqVector, ShiftOperator};

use crate::CliError;

fn default_resolution() -> u32 {
    32
}

fn default_weight() -> String {
    "1".to_string()
}

/// A complex number in scenario files; both parts are required so a typo
/// cannot silently zero a coordinate.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointData {
    pub re: f64,
    pub im: f64,
}

impl PointData {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Scenario assertions: facts about the operator that finite sampling
/// cannot establish. Rules that consume one say so in a caveat.
#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct Assertions {
    /// The symbol is analytic on the closed disc.
    pub analytic: bool,
    /// The circle symbol has no wandering interval.
    pub no_wandering_interval: bool,
    /// The function space contains a nowhere-vanishing member.
    pub nowhere_vanishing_member: bool,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub enum ShiftKindTag {
    Bilateral,
    Unilateral,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ConstructSection {
    pub targets: Vec<SeqVector>,
    #[serde(default)]
    pub schedule: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SearchSection {
    pub from: SeqVector,
    pub targets: Vec<SeqVector>,
    pub window: (i64, i64),
    #[serde(default)]
    pub max_n: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct StructureSection {
    pub codimension: usize,
    pub image_inside: bool,
}

/// Shift-experiment section of a scenario.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ShiftSection {
    pub kind: ShiftKindTag,
    /// Unilateral weights, indexed from 1.
    #[serde(default)]
    pub weights: Vec<f64>,
    /// Whether the unilateral weights tend to zero.
    #[serde(default)]
    pub weights_decay: bool,
    #[serde(default)]
    pub construct: Option<ConstructSection>,
    #[serde(default)]
    pub search: Option<SearchSection>,
    #[serde(default)]
    pub structure: Option<StructureSection>,
    #[serde(default)]
    pub preimage_of: Option<SeqVector>,
}

/// The raw JSON schema. Unknown fields are rejected so typos surface as
/// schema errors naming the field.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub domain: DomainKind,
    #[serde(default = "default_resolution")]
    pub resolution: u32,
    pub symbol: String,
    #[serde(default = "default_weight")]
    pub weight: String,
    #[serde(default)]
    pub test_functions: Vec<String>,
    /// Seed pairs for the quotient checks. Empty means the default pair of
    /// grid extremes when test functions are present.
    #[serde(default)]
    pub quotient_pairs: Vec<(PointData, PointData)>,
    #[serde(default)]
    pub assertions: Assertions,
    #[serde(default)]
    pub horizons: Horizons,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub shift: Option<ShiftSection>,
}

/// Resolved witness-search plan.
#[derive(Clone, Debug)]
pub struct SearchPlan {
    pub from: SeqVector,
    pub targets: Vec<SeqVector>,
    pub window: (i64, i64),
    pub max_n: usize,
}

/// Resolved shift-experiment plan with a ready operator.
#[derive(Clone, Debug)]
pub struct ShiftPlan {
    pub op: ShiftOperator,
    pub label: &'static str,
    pub construct: Option<(Vec<SeqVector>, Vec<f64>)>,
    pub search: Option<SearchPlan>,
    pub structure: Option<(usize, bool)>,
    pub preimage_of: Option<SeqVector>,
}

/// A validated scenario: domain built, every expression parsed, defaults
/// applied.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub domain: DomainSpec,
    pub symbol_src: String,
    pub weight_src: String,
    pub symbol: Expression,
    pub weight: Expression,
    pub test_functions: Vec<(String, Expression)>,
    pub quotient_pairs: Vec<(Complex64, Complex64)>,
    pub assertions: Assertions,
    pub params: Params,
    pub shift: Option<ShiftPlan>,
}

impl Scenario {
    /// Rebuilds the domain grid at a scaled resolution, leaving everything
    /// else in place.
    pub fn with_resolution_scale(mut self, scale: u32) -> Result<Scenario, CliError> {
        if scale == 0 {
            return Err(CliError::Usage("grid scale must be at least 1".into()));
        }
        let resolution = self.domain.resolution.saturating_mul(scale);
        self.domain = self
            .domain
            .kind
            .build(resolution, self.domain.tolerance)
            .map_err(|e| CliError::Scenario(format!("domain: {e}")))?;
        Ok(self)
    }
}

fn parse_expr(field: &str, src: &str) -> Result<Expression, CliError> {
    Expression::parse(src)
        .map_err(|e| CliError::Scenario(format!("{field}: {e} (in {src:?})")))
}

/// Validates a deserialized scenario file and resolves it.
pub fn resolve(file: ScenarioFile, fallback_name: &str) -> Result<Scenario, CliError> {
    let params = Params {
        tolerances: file.tolerances,
        horizons: file.horizons,
    };
    let domain = file
        .domain
        .build(file.resolution, params.tolerances.membership)
        .map_err(|e| CliError::Scenario(format!("domain: {e}")))?;

    let symbol = parse_expr("symbol", &file.symbol)?;
    let weight = parse_expr("weight", &file.weight)?;
    let mut test_functions = Vec::with_capacity(file.test_functions.len());
    for (i, src) in file.test_functions.iter().enumerate() {
        let f = parse_expr(&format!("testFunctions[{i}]"), src)?;
        test_functions.push((src.clone(), f));
    }
    if !file.quotient_pairs.is_empty() && test_functions.is_empty() {
        return Err(CliError::Scenario(
            "quotientPairs: at least one test function is required when quotient checks are requested"
                .into(),
        ));
    }
    let quotient_pairs = file
        .quotient_pairs
        .iter()
        .map(|(a, b)| (a.to_complex(), b.to_complex()))
        .collect();

    let shift = match file.shift {
        None => None,
        Some(section) => Some(resolve_shift(section, &params)?),
    };

    Ok(Scenario {
        name: file.name.unwrap_or_else(|| fallback_name.to_string()),
        domain,
        symbol_src: file.symbol,
        weight_src: file.weight,
        symbol,
        weight,
        test_functions,
        quotient_pairs,
        assertions: file.assertions,
        params,
        shift,
    })
}

fn resolve_shift(section: ShiftSection, params: &Params) -> Result<ShiftPlan, CliError> {
    let (op, label) = match section.kind {
        ShiftKindTag::Bilateral => {
            if !section.weights.is_empty() {
                return Err(CliError::Scenario(
                    "shift.weights: the bilateral shift takes no weight list".into(),
                ));
            }
            if section.preimage_of.is_some() {
                return Err(CliError::Scenario(
                    "shift.preimageOf: preimage steps need the unilateral shift".into(),
                ));
            }
            (ShiftOperator::bilateral(), "bilateral backward shift")
        }
        ShiftKindTag::Unilateral => {
            if section.construct.is_some() {
                return Err(CliError::Scenario(
                    "shift.construct: the block construction runs on the bilateral shift".into(),
                ));
            }
            let op = ShiftOperator::unilateral(section.weights.clone(), section.weights_decay)
                .map_err(|e| CliError::Scenario(format!("shift.weights: {e}")))?;
            (op, "unilateral weighted backward shift")
        }
    };
    let construct = section.construct.map(|c| {
        let schedule = c
            .schedule
            .unwrap_or_else(|| default_epsilon_schedule(c.targets.len()));
        (c.targets, schedule)
    });
    let search = section.search.map(|s| SearchPlan {
        from: s.from,
        targets: s.targets,
        window: (s.window.0.min(s.window.1), s.window.0.max(s.window.1)),
        max_n: s.max_n.unwrap_or(params.horizons.witness_n),
    });
    Ok(ShiftPlan {
        op,
        label,
        construct,
        search,
        structure: section.structure.map(|s| (s.codimension, s.image_inside)),
        preimage_of: section.preimage_of,
    })
}

/// Loads and validates a scenario file. Schema violations, unreadable
/// files and expression errors all surface with the offending field or
/// offset.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Scenario(format!("{}: schema violation: {e}", path.display())))?;
    let fallback = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    resolve(file, fallback)
}
