//! Numerical laboratory for deciding whether a weighted composition operator
//! `C f = w * (f o phi)` on a concrete function space admits supercyclic
//! behaviour for the pointwise or the weak topology.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`]: a small complex expression language for symbols, weights and
//!   test functions;
//! * [`domains`]: the supported underlying spaces and their sample grids;
//! * [`dynamics`]: orbit machinery (fixed points, Denjoy-Wolff iteration,
//!   rotation numbers, runaway certificates);
//! * [`criteria`]: the obstruction checks proper, each returning a
//!   [`Verdict`] tagged with the rule that produced it;
//! * [`shiftlab`]: sequence-space experiments for backward shifts
//!   (supercyclic-vector construction, witness searches, preimages).
//!
//! Every check is finite-scale: grids, horizons and tolerances are explicit
//! inputs, and verdict evidence records the numbers that fired a rule.

pub mod criteria;
pub mod domains;
pub mod dynamics;
pub mod expr;
pub mod params;
pub mod shiftlab;

pub use criteria::{Citation, Conclusion, Verdict};
pub use num_complex::Complex64;
