//! A finite-dimensional laboratory for thresholding greedy algorithms.
//!
//! Everything here works with real coefficient vectors of explicit finite
//! support inside a fixed ambient dimension, a norm oracle abstraction
//! (`norms`), weak greedy set enumeration and the thresholding/truncation
//! operators (`greedy`), best m-term approximation errors backed by a
//! derivative-free convex solver (`approx`), certified lower-bound
//! estimators for greedy-type constants (`constants`) and Lebesgue
//! parameters (`lebesgue`), an explicit weighted-tail-norm space with
//! block-compressed vectors (`counterexample`), and a verification harness
//! (`harness`) that checks inequality chains pointwise and at estimate
//! level, emitting deterministic JSON/CSV/SVG reports.
//!
//! All estimators are certified lower bounds: every reported value is
//! realized by a stored witness that re-evaluates to the bound.

pub mod approx;
pub mod coeff;
pub mod constants;
pub mod counterexample;
pub mod error;
pub mod family;
pub mod greedy;
pub mod harness;
pub mod lebesgue;
pub mod norms;
pub(crate) mod par;
pub mod report;
pub mod solver;

pub use coeff::{CoeffVector, IndexSet, SignPattern};
pub use error::{Error, Result};
pub use norms::{make_lp_norm, make_weighted_tail_norm, norm_eval, parse_norm_spec, NormOracle};
