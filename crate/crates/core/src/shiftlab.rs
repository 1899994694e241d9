//! Sequence-space experiments: backward shifts on bilateral and unilateral
//! sequence spaces, construction of vectors carrying prescribed projective
//! approximations, witness searches over shift orbits, cyclicity structure
//! checks, and the polynomial-density study of the multiplication operator.
//!
//! Vectors store finite supports only. Membership claims for the decaying
//! and convergent sequence spaces are finite-scale proxies evaluated on the
//! stored tail; every operation documents how its proxy is read.

use crate::criteria::{Citation, Conclusion, Fact, Verdict};
use crate::domains::{DomainError, DomainKind};
use crate::expr::{EvalError, Expression};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Outer-decile magnitudes must be below this multiple of the overall
/// maximum for the decay proxy to hold.
pub const DECAY_PROXY_RATIO: f64 = 1e-6;

/// Consecutive block scales must drop by at least this factor.
pub const SCHEDULE_RATIO: f64 = 1e-3;

/// Zero indices kept between consecutive blocks beyond window disjointness.
pub const GUARD_BAND: i64 = 8;

/// Largest block offset the constructor will place.
pub const MAX_OFFSET: i64 = 1 << 20;

/// Every certificate approximation must verify below this error.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// Trailing stored values examined by the preimage tail test.
pub const PREIMAGE_TAIL_WINDOW: usize = 10;

/// Cauchy threshold for the preimage tail test.
pub const PREIMAGE_TAIL_TOL: f64 = 1e-8;

/// Largest polynomial degree the density fit will attempt.
pub const DEGREE_CAP: usize = 40;

/// Which sequence space a vector is a finite-scale stand-in for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceTag {
    /// Bilateral sequences decaying at both ends.
    #[serde(rename = "c0Z")]
    C0Z,
    /// Bilateral sequences converging at infinity.
    #[serde(rename = "cInfZ")]
    CInfZ,
    /// One-sided decaying sequences.
    #[serde(rename = "c0N")]
    C0N,
    /// One-sided convergent sequences.
    #[serde(rename = "cInfN")]
    CInfN,
    /// Bounded sequences; no decay demanded.
    #[serde(rename = "lInf")]
    LInf,
}

impl SpaceTag {
    fn is_c0(self) -> bool {
        matches!(self, SpaceTag::C0Z | SpaceTag::C0N)
    }

    fn is_bilateral(self) -> bool {
        matches!(self, SpaceTag::C0Z | SpaceTag::CInfZ)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ShiftError {
    #[error("at least one target is required")]
    EmptyTargets,
    #[error("schedule has {have} entries for {targets} targets")]
    ScheduleTooShort { targets: usize, have: usize },
    #[error("schedule entry {index} violates the interference bound: consecutive scales must drop by {SCHEDULE_RATIO:e}")]
    ScheduleInterference { index: usize },
    #[error("block offsets would reach {needed}, beyond the budget {cap}")]
    OffsetBudget { needed: i64, cap: i64 },
    #[error("target {target} verified at error {error:e}, above the certificate tolerance")]
    CertificateTolerance { target: usize, error: f64 },
    #[error("declared support [{lo}, {hi}] does not contain all nonzero entries")]
    BadDeclaredSupport { lo: i64, hi: i64 },
    #[error("weight {index} is not positive: {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("this operation needs the unilateral weighted shift")]
    NeedsUnilateral,
    #[error("degree {requested} exceeds the fit cap {cap}")]
    DegreeCap { requested: usize, cap: usize },
    #[error("domain construction failed: {0}")]
    Domain(#[from] DomainError),
    #[error("target evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

/// A finitely supported sequence standing in for a member of the tagged
/// space. Entries outside the declared support are exactly zero; the
/// declared interval may be wider than the nonzero hull, in which case the
/// stored zeros attest the tail behaviour.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "SeqVectorData", into = "SeqVectorData")]
pub struct SeqVector {
    tag: SpaceTag,
    entries: BTreeMap<i64, Complex64>,
    declared: Option<(i64, i64)>,
    limit_value: Option<Complex64>,
}

/// Serde mirror of [`SeqVector`].
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SeqVectorData {
    tag: SpaceTag,
    entries: Vec<(i64, Complex64)>,
    #[serde(default)]
    declared: Option<(i64, i64)>,
    #[serde(default)]
    limit_value: Option<Complex64>,
}

impl From<SeqVectorData> for SeqVector {
    fn from(d: SeqVectorData) -> SeqVector {
        let mut v = SeqVector::from_entries(d.tag, d.entries);
        v.declared = d.declared;
        v.limit_value = d.limit_value;
        v
    }
}

impl From<SeqVector> for SeqVectorData {
    fn from(v: SeqVector) -> SeqVectorData {
        SeqVectorData {
            tag: v.tag,
            entries: v.entries.into_iter().collect(),
            declared: v.declared,
            limit_value: v.limit_value,
        }
    }
}

/// Equality compares the tag, the nonzero entries and the limit estimate;
/// the declared support interval is presentation metadata.
impl PartialEq for SeqVector {
    fn eq(&self, other: &SeqVector) -> bool {
        self.tag == other.tag
            && self.entries == other.entries
            && self.limit_value == other.limit_value
    }
}

impl SeqVector {
    pub fn zero(tag: SpaceTag) -> SeqVector {
        SeqVector {
            tag,
            entries: BTreeMap::new(),
            declared: None,
            limit_value: None,
        }
    }

    /// The standard basis vector with a single unit entry at `index`.
    pub fn basis(tag: SpaceTag, index: i64) -> SeqVector {
        SeqVector::from_entries(tag, [(index, Complex64::new(1.0, 0.0))])
    }

    /// Builds a vector from `(index, value)` pairs; exact zeros are dropped.
    pub fn from_entries(
        tag: SpaceTag,
        pairs: impl IntoIterator<Item = (i64, Complex64)>,
    ) -> SeqVector {
        let mut entries = BTreeMap::new();
        for (i, v) in pairs {
            if v.norm() > 0.0 {
                entries.insert(i, v);
            }
        }
        SeqVector {
            tag,
            entries,
            declared: None,
            limit_value: None,
        }
    }

    /// Records the limit the tails of the represented sequence approach.
    pub fn with_limit(mut self, limit: Complex64) -> SeqVector {
        self.limit_value = Some(limit);
        self
    }

    /// Widens the declared support. The interval must contain every nonzero
    /// entry; the extra zero margin is what the decay proxy reads as tail.
    pub fn declare_support(mut self, lo: i64, hi: i64) -> Result<SeqVector, ShiftError> {
        if let Some((a, b)) = self.support_hull() {
            if lo > a || hi < b {
                return Err(ShiftError::BadDeclaredSupport { lo, hi });
            }
        }
        if lo > hi {
            return Err(ShiftError::BadDeclaredSupport { lo, hi });
        }
        self.declared = Some((lo, hi));
        Ok(self)
    }

    pub fn tag(&self) -> SpaceTag {
        self.tag
    }

    pub fn limit_value(&self) -> Option<Complex64> {
        self.limit_value
    }

    /// Entry at `index`; exactly zero outside the stored support.
    pub fn get(&self, index: i64) -> Complex64 {
        self.entries
            .get(&index)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Smallest interval containing the nonzero entries.
    pub fn support_hull(&self) -> Option<(i64, i64)> {
        let lo = self.entries.keys().next()?;
        let hi = self.entries.keys().next_back()?;
        Some((*lo, *hi))
    }

    /// Declared support if set, otherwise the nonzero hull.
    pub fn declared_support(&self) -> Option<(i64, i64)> {
        self.declared.or_else(|| self.support_hull())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Nonzero entries in index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, *v))
    }

    pub fn scale(&self, factor: Complex64) -> SeqVector {
        let mut out = self.clone();
        out.entries = self
            .entries
            .iter()
            .filter_map(|(i, v)| {
                let w = factor * v;
                (w.norm() > 0.0).then_some((*i, w))
            })
            .collect();
        out.limit_value = self.limit_value.map(|l| factor * l);
        out
    }

    /// Entrywise sum; both vectors must carry the same tag.
    pub fn add(&self, other: &SeqVector) -> SeqVector {
        debug_assert_eq!(self.tag, other.tag, "adding vectors from different spaces");
        let mut entries = self.entries.clone();
        for (i, v) in &other.entries {
            let w = entries.get(i).copied().unwrap_or(Complex64::new(0.0, 0.0)) + v;
            if w.norm() > 0.0 {
                entries.insert(*i, w);
            } else {
                entries.remove(i);
            }
        }
        let limit_value = match (self.limit_value, other.limit_value) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        SeqVector {
            tag: self.tag,
            entries,
            declared: None,
            limit_value,
        }
    }

    /// Finite-scale decay check: the largest magnitude over the outer
    /// decile of the declared support (both ends for bilateral tags, the
    /// upper end otherwise) must be at most [`DECAY_PROXY_RATIO`] times the
    /// overall maximum. Tags without a decay demand pass vacuously.
    pub fn decay_proxy_ok(&self) -> bool {
        if !self.tag.is_c0() {
            return true;
        }
        let Some((lo, hi)) = self.declared_support() else {
            return true;
        };
        let span = hi - lo + 1;
        let d = (span + 9) / 10;
        let overall = self.sup_norm();
        let outer = |range: std::ops::RangeInclusive<i64>| {
            range.map(|i| self.get(i).norm()).fold(0.0, f64::max)
        };
        let mut worst = outer(hi - d + 1..=hi);
        if self.tag.is_bilateral() {
            worst = worst.max(outer(lo..=lo + d - 1));
        }
        worst <= DECAY_PROXY_RATIO * overall
    }
}

/// The two backward shifts studied here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ShiftKind {
    BilateralBackward,
    UnilateralWeightedBackward,
}

/// A backward shift. The bilateral one translates indices down by one; the
/// unilateral one multiplies by a positive weight on the way down and
/// annihilates the entry at index zero.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftOperator {
    kind: ShiftKind,
    weights: Vec<f64>,
    decays: bool,
}

impl ShiftOperator {
    pub fn bilateral() -> ShiftOperator {
        ShiftOperator {
            kind: ShiftKind::BilateralBackward,
            weights: Vec::new(),
            decays: false,
        }
    }

    /// Weighted unilateral shift. `weights[j-1]` is the factor picked up by
    /// the basis vector at index `j`; all must be positive. `decays`
    /// declares that the weights tend to zero.
    pub fn unilateral(weights: Vec<f64>, decays: bool) -> Result<ShiftOperator, ShiftError> {
        for (index, &value) in weights.iter().enumerate() {
            if !(value > 0.0) {
                return Err(ShiftError::NonPositiveWeight { index, value });
            }
        }
        Ok(ShiftOperator {
            kind: ShiftKind::UnilateralWeightedBackward,
            weights,
            decays,
        })
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    /// Weight attached to index `j >= 1`. Panics when the stored list is
    /// too short: supply weights covering every index the experiment
    /// shifts through.
    pub fn weight(&self, j: usize) -> f64 {
        assert!(j >= 1, "weights are indexed from 1");
        self.weights
            .get(j - 1)
            .copied()
            .unwrap_or_else(|| panic!("weight {j} requested but only {} stored", self.weights.len()))
    }

    /// One application of the shift. Entries that would land below index
    /// zero under the unilateral shift are annihilated; its output tag is
    /// re-derived (decaying weights send bounded sequences into the
    /// one-sided decaying space).
    pub fn step(&self, f: &SeqVector) -> SeqVector {
        match self.kind {
            ShiftKind::BilateralBackward => {
                let entries = f.entries.iter().map(|(i, v)| (i - 1, *v)).collect();
                SeqVector {
                    tag: f.tag,
                    entries,
                    declared: f.declared.map(|(lo, hi)| (lo - 1, hi - 1)),
                    limit_value: f.limit_value,
                }
            }
            ShiftKind::UnilateralWeightedBackward => {
                let mut entries = BTreeMap::new();
                for (&i, &v) in &f.entries {
                    if i >= 1 {
                        let w = self.weight(i as usize) * v;
                        if w.norm() > 0.0 {
                            entries.insert(i - 1, w);
                        }
                    }
                }
                let tag = match (f.tag, self.decays) {
                    (SpaceTag::C0Z | SpaceTag::C0N, _) => SpaceTag::C0N,
                    (_, true) => SpaceTag::C0N,
                    (SpaceTag::CInfZ | SpaceTag::CInfN, false) => SpaceTag::CInfN,
                    (SpaceTag::LInf, false) => SpaceTag::LInf,
                };
                SeqVector {
                    tag,
                    entries,
                    declared: None,
                    limit_value: None,
                }
            }
        }
    }
}

/// `n`-fold application of the shift, computed stepwise so that composing
/// shifts and shifting by a sum are the same arithmetic.
pub fn apply_shift(op: &ShiftOperator, f: &SeqVector, n: usize) -> SeqVector {
    let mut cur = f.clone();
    for _ in 0..n {
        cur = op.step(&cur);
    }
    cur
}

/// One recorded projective approximation: scaling the `n`-th shift of the
/// constructed vector by `lambda` reproduces the target on its window.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Approximation {
    pub target_id: usize,
    pub n: usize,
    pub lambda: Complex64,
    pub window: (i64, i64),
    pub window_error: f64,
}

/// A vector together with re-checkable approximation records.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessCertificate {
    pub vector: SeqVector,
    pub approximations: Vec<Approximation>,
    pub tolerance: f64,
}

impl WitnessCertificate {
    /// Re-verifies every approximation through [`apply_shift`] and returns
    /// the largest deviation between the recomputed window error and the
    /// recorded one.
    pub fn reverification_drift(&self, op: &ShiftOperator, targets: &[SeqVector]) -> f64 {
        let mut drift: f64 = 0.0;
        for a in &self.approximations {
            let shifted = apply_shift(op, &self.vector, a.n);
            let target = &targets[a.target_id];
            let err = window_error(a.lambda, &shifted, target, a.window);
            drift = drift.max((err - a.window_error).abs());
        }
        drift
    }
}

fn window_error(lambda: Complex64, h: &SeqVector, g: &SeqVector, window: (i64, i64)) -> f64 {
    let (lo, hi) = window;
    (lo..=hi)
        .map(|i| (lambda * h.get(i) - g.get(i)).norm())
        .fold(0.0, f64::max)
}

fn window_radius(target: &SeqVector) -> i64 {
    match target.declared_support() {
        Some((lo, hi)) => lo.abs().max(hi.abs()),
        None => 0,
    }
}

/// Default rapidly decreasing block scales: entry `j` (zero-based) is
/// `10^(-3(j+1))`.
pub fn default_epsilon_schedule(count: usize) -> Vec<f64> {
    (1..=count as i32).map(|j| 10f64.powi(-3 * j)).collect()
}

/// Builds one vector whose shifted, rescaled copies reproduce every target
/// on its window, and certifies each reproduction.
///
/// Block `j` is the target scaled by the `j`-th schedule entry, placed at an
/// offset chosen so the translated windows are pairwise disjoint with a
/// guard band of [`GUARD_BAND`] zero indices. Disjointness makes cross-block
/// leakage exactly zero, so the recorded window errors are pure rounding.
/// The declared support is padded with zeros so the outer-decile decay
/// proxy reads the genuine tail of the construction.
pub fn construct_supercyclic_vector(
    targets: &[SeqVector],
    schedule: &[f64],
) -> Result<WitnessCertificate, ShiftError> {
    if targets.is_empty() {
        return Err(ShiftError::EmptyTargets);
    }
    if schedule.len() < targets.len() {
        return Err(ShiftError::ScheduleTooShort {
            targets: targets.len(),
            have: schedule.len(),
        });
    }
    let schedule = &schedule[..targets.len()];
    for (j, &eps) in schedule.iter().enumerate() {
        if !(eps > 0.0) {
            return Err(ShiftError::ScheduleInterference { index: j });
        }
        if j > 0 && eps > schedule[j - 1] * SCHEDULE_RATIO * (1.0 + 1e-9) {
            return Err(ShiftError::ScheduleInterference { index: j });
        }
    }

    // Offsets: each block sits one guard band past the previous window.
    let radii: Vec<i64> = targets.iter().map(window_radius).collect();
    let mut offsets = Vec::with_capacity(targets.len());
    let mut prev_n = 0i64;
    let mut prev_k = 0i64;
    for &k in &radii {
        let n = prev_n + prev_k + k + GUARD_BAND;
        if n + k > MAX_OFFSET {
            return Err(ShiftError::OffsetBudget {
                needed: n + k,
                cap: MAX_OFFSET,
            });
        }
        offsets.push(n);
        prev_n = n;
        prev_k = k;
    }

    let mut f = SeqVector::zero(SpaceTag::C0Z);
    for ((target, &eps), &n) in targets.iter().zip(schedule).zip(&offsets) {
        let block = SeqVector::from_entries(
            SpaceTag::C0Z,
            target.iter().map(|(i, v)| (i + n, eps * v)),
        );
        f = f.add(&block);
    }
    if let Some((lo, hi)) = f.support_hull() {
        // Pad so the outer decile of the declared interval lies in the
        // zero margin.
        let pad = (hi - lo + 1) / 8 + 1;
        f = f.declare_support(lo - pad, hi + pad)?;
    }

    let op = ShiftOperator::bilateral();
    let mut approximations = Vec::with_capacity(targets.len());
    for (j, ((target, &eps), &n)) in targets.iter().zip(schedule).zip(&offsets).enumerate() {
        let lambda = Complex64::new(1.0 / eps, 0.0);
        let k = radii[j];
        let shifted = apply_shift(&op, &f, n as usize);
        let error = window_error(lambda, &shifted, target, (-k, k));
        if error > CERTIFICATE_TOL {
            return Err(ShiftError::CertificateTolerance { target: j, error });
        }
        approximations.push(Approximation {
            target_id: j,
            n: n as usize,
            lambda,
            window: (-k, k),
            window_error: error,
        });
    }

    Ok(WitnessCertificate {
        vector: f,
        approximations,
        tolerance: CERTIFICATE_TOL,
    })
}

/// Best projective approximation found along a shift orbit.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WitnessHit {
    pub n: usize,
    pub lambda: Complex64,
    pub error: f64,
}

/// Scans `T^n f` for `n = 0..=max_n` and reports the power whose best
/// least-squares rescaling comes closest to `g` on the window. The scale is
/// the inner product of the target with the shifted vector over the squared
/// norm of the latter, zero when that norm vanishes; the error is the
/// largest coordinate deviation on the window. Ties keep the smallest `n`.
pub fn witness_search(
    op: &ShiftOperator,
    f: &SeqVector,
    g: &SeqVector,
    window: (i64, i64),
    max_n: usize,
) -> WitnessHit {
    let (lo, hi) = (window.0.min(window.1), window.0.max(window.1));
    let mut cur = f.clone();
    let mut best: Option<WitnessHit> = None;
    for n in 0..=max_n {
        let mut denom = 0.0;
        let mut numer = Complex64::new(0.0, 0.0);
        for i in lo..=hi {
            let h = cur.get(i);
            denom += h.norm_sqr();
            numer += g.get(i) * h.conj();
        }
        let lambda = if denom > 0.0 {
            numer / denom
        } else {
            Complex64::new(0.0, 0.0)
        };
        let error = window_error(lambda, &cur, g, (lo, hi));
        if best.map_or(true, |b| error < b.error) {
            best = Some(WitnessHit { n, lambda, error });
        }
        if n < max_n {
            cur = op.step(&cur);
        }
    }
    best.expect("the n = 0 candidate always exists")
}

/// Structure check for cyclicity: an invariant subspace of codimension at
/// least two that contains the image rules cyclicity out; any other
/// combination is left open.
pub fn cyclicity_structure_check(codimension: usize, image_inside: bool) -> Verdict {
    let facts = vec![
        Fact::int("codimension of the invariant subspace", codimension as i64),
        Fact::boolean("image contained in the subspace", image_inside),
    ];
    if codimension > 1 && image_inside {
        Verdict::new(Conclusion::NotCyclic, Citation::Lemma15, facts)
    } else {
        Verdict::inconclusive(facts)
    }
}

/// Solves the unilateral weighted shift for a preimage: the entry above
/// each index of `f` is that value divided by the corresponding weight, and
/// the free entry at index zero is set to zero.
///
/// Membership of the result in the one-sided convergent space is decided on
/// the stored tail: vectors shorter than [`PREIMAGE_TAIL_WINDOW`] are taken
/// at face value (their genuine tail is the zero extension, so the limit is
/// zero); longer ones are treated as truncated stand-ins whose trailing
/// stored values must be Cauchy at [`PREIMAGE_TAIL_TOL`], and the last of
/// them estimates the limit. A non-settling tail returns `None`.
pub fn preimage_in_cinf(
    op: &ShiftOperator,
    f: &SeqVector,
) -> Result<Option<SeqVector>, ShiftError> {
    if op.kind != ShiftKind::UnilateralWeightedBackward {
        return Err(ShiftError::NeedsUnilateral);
    }
    let Some((_, hi)) = f.support_hull() else {
        return Ok(Some(
            SeqVector::zero(SpaceTag::CInfN).with_limit(Complex64::new(0.0, 0.0)),
        ));
    };
    let hi = hi.max(0);
    let values: Vec<Complex64> = (0..=hi)
        .map(|j| {
            let v = f.get(j);
            if v.norm() > 0.0 {
                v / op.weight(j as usize + 1)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let g = SeqVector::from_entries(
        SpaceTag::CInfN,
        values.iter().enumerate().map(|(j, v)| (j as i64 + 1, *v)),
    );
    if values.len() < PREIMAGE_TAIL_WINDOW {
        return Ok(Some(g.with_limit(Complex64::new(0.0, 0.0))));
    }
    let tail = &values[values.len() - PREIMAGE_TAIL_WINDOW..];
    let settled = tail
        .windows(2)
        .all(|p| (p[1] - p[0]).norm() <= PREIMAGE_TAIL_TOL);
    if settled {
        Ok(Some(g.with_limit(*tail.last().expect("nonempty"))))
    } else {
        Ok(None)
    }
}

/// Sup errors of the best polynomial fits to one target, indexed by degree.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetFit {
    pub name: String,
    pub sup_errors: Vec<f64>,
}

/// Density evidence produced by [`multiplication_example`].
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityReport {
    pub grid_points: usize,
    pub fits: Vec<TargetFit>,
}

/// Studies the multiplication operator on the closed unit disc: polynomials
/// approximate a fixed family of analytic targets with errors shrinking in
/// the degree (cyclicity evidence), while a structural eigenvector
/// obstruction still rules out pointwise supercyclicity.
///
/// Fits use monomial projection on the polar grid, where distinct monomials
/// up to the degree cap are orthogonal ring by ring, so each coefficient is
/// a single quotient of inner products and no ill-conditioned system is
/// solved.
pub fn multiplication_example(
    grid_resolution: u32,
    max_degree: usize,
) -> Result<(Verdict, DensityReport), ShiftError> {
    if max_degree > DEGREE_CAP {
        return Err(ShiftError::DegreeCap {
            requested: max_degree,
            cap: DEGREE_CAP,
        });
    }
    let domain = DomainKind::ClosedDisc { radius: 1.0 }.build(grid_resolution, 1e-9)?;
    let grid: Vec<Complex64> = domain.complex_grid();
    let names = ["exp(z)", "1/(2-z)", "z"];

    let mut fits = Vec::with_capacity(names.len());
    for name in names {
        let target = Expression::parse(name).expect("fixed target parses");
        let values: Vec<Complex64> = grid
            .iter()
            .map(|&z| target.eval(z))
            .collect::<Result<_, _>>()?;

        // Coefficients by monomial projection; powers are accumulated.
        let mut pow: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); grid.len()];
        let mut coeffs = Vec::with_capacity(max_degree + 1);
        for _k in 0..=max_degree {
            let mut numer = Complex64::new(0.0, 0.0);
            let mut denom = 0.0;
            for (i, p) in pow.iter().enumerate() {
                numer += values[i] * p.conj();
                denom += p.norm_sqr();
            }
            coeffs.push(numer / denom);
            for (p, z) in pow.iter_mut().zip(&grid) {
                *p *= z;
            }
        }

        // Sup error of each truncation.
        let mut partial = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut pow: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); grid.len()];
        let mut sup_errors = Vec::with_capacity(max_degree + 1);
        for &c in &coeffs {
            for i in 0..grid.len() {
                partial[i] += c * pow[i];
                pow[i] *= grid[i];
            }
            let err = partial
                .iter()
                .zip(&values)
                .map(|(p, v)| (p - v).norm())
                .fold(0.0, f64::max);
            sup_errors.push(err);
        }
        fits.push(TargetFit {
            name: name.to_string(),
            sup_errors,
        });
    }

    let mut evidence = vec![Fact::text(
        "dense family",
        "polynomials approximate the analytic targets on the disc grid",
    )];
    for fit in &fits {
        let best = fit.sup_errors.last().copied().unwrap_or(f64::NAN);
        evidence.push(Fact::real(
            format!("sup error fitting {} at top degree", fit.name),
            best,
        ));
    }
    evidence.push(Fact::text(
        "obstruction",
        "the adjoint carries independent eigenvectors, which rules out pointwise supercyclicity",
    ));
    let verdict = Verdict::new(Conclusion::NotTauPSupercyclic, Citation::Ex17, evidence)
        .with_caveat(format!(
            "density checked on a finite grid of {} points up to degree {max_degree}",
            grid.len()
        ));
    Ok((
        verdict,
        DensityReport {
            grid_points: grid.len(),
            fits,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Weights 1/2, 1/3, 1/4, ...: entry j carries 1/(j+1).
    fn harmonic_weights(len: usize) -> Vec<f64> {
        (1..=len).map(|j| 1.0 / (j as f64 + 1.0)).collect()
    }

    #[test]
    fn bilateral_shift_moves_a_basis_vector_down() {
        let op = ShiftOperator::bilateral();
        let shifted = apply_shift(&op, &SeqVector::basis(SpaceTag::C0Z, 5), 1);
        assert_eq!(shifted, SeqVector::basis(SpaceTag::C0Z, 4));
    }

    #[test]
    fn double_shift_translates_an_indicator() {
        let op = ShiftOperator::bilateral();
        let ind = |lo: i64, hi: i64| {
            SeqVector::from_entries(SpaceTag::C0Z, (lo..=hi).map(|i| (i, c(1.0, 0.0))))
        };
        assert_eq!(apply_shift(&op, &ind(0, 3), 2), ind(-2, 1));
    }

    #[test]
    fn weighted_shift_telescopes_the_weights() {
        let op = ShiftOperator::unilateral(harmonic_weights(8), true).unwrap();
        let shifted = apply_shift(&op, &SeqVector::basis(SpaceTag::C0N, 2), 2);
        assert_eq!(shifted.support_hull(), Some((0, 0)));
        assert_eq!(shifted.get(0), c((1.0 / 3.0) * 0.5, 0.0));
    }

    #[test]
    fn unilateral_shift_annihilates_the_origin() {
        let op = ShiftOperator::unilateral(harmonic_weights(8), true).unwrap();
        let shifted = apply_shift(&op, &SeqVector::basis(SpaceTag::C0N, 0), 1);
        assert!(shifted.is_zero());
    }

    #[test]
    fn shift_linearity_is_exact_on_stored_vectors() {
        let op = ShiftOperator::bilateral();
        let f = SeqVector::from_entries(
            SpaceTag::C0Z,
            [(-3, c(0.3, -1.7)), (0, c(2.0, 0.1)), (5, c(-0.9, 4.2))],
        );
        let g = SeqVector::from_entries(SpaceTag::C0Z, [(-3, c(1.1, 0.4)), (2, c(0.0, -2.5))]);
        let (alpha, beta) = (c(1.25, -0.5), c(-3.0, 0.125));
        let lhs = apply_shift(&op, &f.scale(alpha).add(&g.scale(beta)), 3);
        let rhs = apply_shift(&op, &f, 3)
            .scale(alpha)
            .add(&apply_shift(&op, &g, 3).scale(beta));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn shifts_compose_exactly() {
        let op = ShiftOperator::unilateral(harmonic_weights(32), true).unwrap();
        let f = SeqVector::from_entries(
            SpaceTag::C0N,
            (0..20).map(|i| (i, c(1.0 / (i as f64 + 1.0), 0.3 * i as f64))),
        );
        let whole = apply_shift(&op, &f, 7);
        let split = apply_shift(&op, &apply_shift(&op, &f, 3), 4);
        assert_eq!(whole, split);
    }

    #[test]
    fn bilateral_shift_is_a_sup_norm_isometry() {
        let op = ShiftOperator::bilateral();
        let f = SeqVector::from_entries(
            SpaceTag::C0Z,
            [(-2, c(0.1, 0.2)), (1, c(-3.5, 0.0)), (9, c(0.0, 2.25))],
        );
        assert_eq!(apply_shift(&op, &f, 4).sup_norm(), f.sup_norm());
    }

    #[test]
    fn single_target_certificate_is_its_own_oracle() {
        let target = SeqVector::basis(SpaceTag::C0Z, 0)
            .declare_support(-2, 2)
            .unwrap();
        let cert = construct_supercyclic_vector(&[target.clone()], &[1e-2]).unwrap();
        assert_eq!(cert.approximations.len(), 1);
        let a = &cert.approximations[0];
        assert_eq!(a.n, 10, "window radius 2 plus the guard band");
        assert_eq!(a.lambda, c(100.0, 0.0));
        assert!(a.window_error < 1e-9);
        assert_eq!(cert.vector.get(10), c(1e-2, 0.0));
        assert!(cert.vector.decay_proxy_ok());
        let op = ShiftOperator::bilateral();
        assert!(cert.reverification_drift(&op, &[target]) <= 1e-12);
    }

    #[test]
    fn identity_rescaling_of_a_vector_by_itself_is_exact() {
        let f = SeqVector::from_entries(
            SpaceTag::C0Z,
            [(-1, c(0.7, -0.3)), (0, c(1.0, 0.0)), (2, c(-0.2, 0.9))],
        );
        let op = ShiftOperator::bilateral();
        let hit = witness_search(&op, &f, &f, (-2, 2), 0);
        assert_eq!(hit.n, 0);
        assert_eq!(hit.lambda, c(1.0, 0.0));
        assert_eq!(hit.error, 0.0);
    }

    #[test]
    fn empty_target_list_is_rejected() {
        assert_eq!(
            construct_supercyclic_vector(&[], &[1e-3]).unwrap_err(),
            ShiftError::EmptyTargets
        );
    }

    #[test]
    fn slowly_decreasing_schedule_is_rejected() {
        let targets = [
            SeqVector::basis(SpaceTag::C0Z, 0),
            SeqVector::basis(SpaceTag::C0Z, 1),
        ];
        assert_eq!(
            construct_supercyclic_vector(&targets, &[1e-3, 1e-4]).unwrap_err(),
            ShiftError::ScheduleInterference { index: 1 }
        );
    }

    #[test]
    fn witness_search_recovers_each_certificate_block() {
        // Both targets span two coordinates: a single-coordinate window is
        // projectively matched by any stray nonzero entry, so it would not
        // pin the search to the intended block.
        let targets = [
            SeqVector::from_entries(SpaceTag::C0Z, [(0, c(1.0, 0.0)), (1, c(2.0, 0.0))]),
            SeqVector::from_entries(SpaceTag::C0Z, [(-1, c(3.0, 0.0)), (0, c(1.0, 0.0))]),
        ];
        let schedule = default_epsilon_schedule(2);
        let cert = construct_supercyclic_vector(&targets, &schedule).unwrap();
        let op = ShiftOperator::bilateral();
        let horizon = cert.approximations.iter().map(|a| a.n).max().unwrap() + 5;
        for a in &cert.approximations {
            let hit = witness_search(&op, &cert.vector, &targets[a.target_id], a.window, horizon);
            assert_eq!(hit.n, a.n);
            assert!((hit.error - a.window_error).abs() <= 1e-12);
            assert!((hit.lambda - a.lambda).norm() <= 1e-9 * a.lambda.norm());
        }
        assert!(cert.reverification_drift(&op, &targets) <= 1e-12);
        assert!(cert.vector.decay_proxy_ok());
    }

    #[test]
    fn search_error_is_monotone_in_the_horizon() {
        let op = ShiftOperator::bilateral();
        let f = SeqVector::from_entries(
            SpaceTag::C0Z,
            (0..12).map(|i| (i, c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))),
        );
        let g = SeqVector::from_entries(SpaceTag::C0Z, [(0, c(0.4, 0.0)), (1, c(-0.6, 0.2))]);
        let mut prev = f64::INFINITY;
        for n in 0..16 {
            let hit = witness_search(&op, &f, &g, (-2, 2), n);
            assert!(hit.error <= prev);
            prev = hit.error;
        }
    }

    #[test]
    fn shifted_basis_vectors_never_reach_a_higher_index() {
        let op = ShiftOperator::bilateral();
        let hit = witness_search(
            &op,
            &SeqVector::basis(SpaceTag::C0Z, 0),
            &SeqVector::basis(SpaceTag::C0Z, 1),
            (-2, 2),
            6,
        );
        assert_eq!(hit.error, 1.0);
        assert_eq!(hit.n, 0, "ties keep the smallest power");
    }

    #[test]
    fn zero_target_is_matched_at_once() {
        let op = ShiftOperator::bilateral();
        let hit = witness_search(
            &op,
            &SeqVector::basis(SpaceTag::C0Z, 0),
            &SeqVector::zero(SpaceTag::C0Z),
            (-2, 2),
            4,
        );
        assert_eq!((hit.n, hit.lambda, hit.error), (0, c(0.0, 0.0), 0.0));
    }

    #[test]
    fn cyclicity_structure_needs_both_hypotheses() {
        let fired = cyclicity_structure_check(2, true);
        assert_eq!(fired.conclusion, Conclusion::NotCyclic);
        assert_eq!(fired.citation, Some(Citation::Lemma15));
        assert_eq!(
            cyclicity_structure_check(1, true).conclusion,
            Conclusion::Inconclusive
        );
        assert_eq!(
            cyclicity_structure_check(2, false).conclusion,
            Conclusion::Inconclusive
        );
    }

    #[test]
    fn preimage_of_a_basis_vector_is_one_weighted_term() {
        let op = ShiftOperator::unilateral(harmonic_weights(32), true).unwrap();
        let g = preimage_in_cinf(&op, &SeqVector::basis(SpaceTag::C0N, 0))
            .unwrap()
            .expect("short exact vector lifts");
        assert_eq!(g.support_hull(), Some((1, 1)));
        assert_eq!(g.get(1), c(2.0, 0.0));
        assert_eq!(g.limit_value(), Some(c(0.0, 0.0)));
    }

    #[test]
    fn preimage_of_the_weight_pattern_has_a_constant_tail() {
        let weights = harmonic_weights(64);
        let f = SeqVector::from_entries(
            SpaceTag::C0N,
            (0..25).map(|j| (j, c(weights[j as usize], 0.0))),
        );
        let op = ShiftOperator::unilateral(weights, true).unwrap();
        let g = preimage_in_cinf(&op, &f).unwrap().expect("constant tail");
        assert_eq!(g.limit_value(), Some(c(1.0, 0.0)));
        for j in 1..=25 {
            assert!((g.get(j) - c(1.0, 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn preimage_with_an_unbounded_tail_is_refused() {
        let f = SeqVector::from_entries(SpaceTag::LInf, (0..25).map(|j| (j, c(1.0, 0.0))));
        let op = ShiftOperator::unilateral(harmonic_weights(64), true).unwrap();
        assert_eq!(preimage_in_cinf(&op, &f).unwrap(), None);
    }

    #[test]
    fn preimage_needs_the_unilateral_shift() {
        let err = preimage_in_cinf(&ShiftOperator::bilateral(), &SeqVector::zero(SpaceTag::C0N))
            .unwrap_err();
        assert_eq!(err, ShiftError::NeedsUnilateral);
    }

    #[test]
    fn polynomials_capture_the_analytic_targets() {
        let (verdict, report) = multiplication_example(64, 16).unwrap();
        assert_eq!(verdict.conclusion, Conclusion::NotTauPSupercyclic);
        assert_eq!(verdict.citation, Some(Citation::Ex17));

        let by_name = |n: &str| report.fits.iter().find(|f| f.name == n).unwrap();
        // Taylor tail bound at degree 12.
        assert!(by_name("exp(z)").sup_errors[12] < 1e-9);
        // Geometric tail: each degree should roughly halve the error.
        let geo = &by_name("1/(2-z)").sup_errors;
        for d in 2..=16 {
            assert!(geo[d] <= 2f64.powi(-(d as i32)), "degree {d}: {}", geo[d]);
        }
        assert!(geo[16] < geo[8] && geo[8] < geo[2]);
        // A monomial is reproduced exactly.
        assert!(by_name("z").sup_errors[1] < 1e-14);
    }

    #[test]
    fn degree_cap_is_enforced() {
        assert_eq!(
            multiplication_example(64, 41).unwrap_err(),
            ShiftError::DegreeCap {
                requested: 41,
                cap: 40
            }
        );
    }
}
