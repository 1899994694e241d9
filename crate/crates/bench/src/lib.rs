//! Shared fixtures for the pipeline benchmarks: representative inputs at the
//! sizes the presets actually use, built once per benchmark group.

use num_complex::Complex64;
use supercyc_core::domains::{DomainKind, DomainSpec};
use supercyc_core::expr::Expression;
use supercyc_core::params::Params;
use supercyc_core::shiftlab::{SeqVector, SpaceTag};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The hyperbolic disc automorphism used throughout the analytic checks.
pub fn disc_automorphism() -> Expression {
    Expression::parse("(z+0.5)/(1+0.5*z)").unwrap()
}

/// A closed unit disc at the default preset resolution.
pub fn unit_disc() -> DomainSpec {
    DomainKind::ClosedDisc { radius: 1.0 }.build(32, 1e-9).unwrap()
}

/// Contraction symbol, affine weight and constant test function for the
/// quotient benchmark.
pub fn quotient_inputs() -> (Expression, Expression, Expression) {
    (
        Expression::parse("z/2").unwrap(),
        Expression::parse("1+z").unwrap(),
        Expression::parse("1").unwrap(),
    )
}

/// A dense degree-16 trigonometric polynomial with fixed coefficients.
pub fn laurent_polynomial() -> Expression {
    Expression::parse(
        "(0.3+0.7*i)*z^16 + (1.1-0.2*i)*z^5 + (0.9+0.1*i) \
         + (0.4-0.3*i)*(1/z)^7 + (0.2+0.2*i)*(1/z)^16",
    )
    .unwrap()
}

/// The three bilateral approximation targets from the shift construction.
pub fn bilateral_targets() -> Vec<SeqVector> {
    vec![
        SeqVector::from_entries(SpaceTag::C0Z, [(0, c(1.0, 0.0))])
            .declare_support(-2, 2)
            .unwrap(),
        SeqVector::from_entries(SpaceTag::C0Z, [(-1, c(3.0, 0.0)), (0, c(1.0, 0.0))])
            .declare_support(-3, 3)
            .unwrap(),
        SeqVector::from_entries(
            SpaceTag::C0Z,
            [(0, c(1.0, 0.0)), (1, c(2.0, 0.0)), (2, c(1.0, 0.0))],
        )
        .declare_support(-3, 3)
        .unwrap(),
    ]
}

/// Default tolerances and horizons shared by every benchmark.
pub fn params() -> Params {
    Params::default()
}
