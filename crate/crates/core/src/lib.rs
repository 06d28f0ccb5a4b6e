//! Exact intersection theory for metrised R-divisors on a curve over a
//! trivially valued field.
//!
//! The analytification of such a curve is a tree of length one: a root
//! `η₀` joined to one leaf per closed point by an edge parametrised by
//! `[0, +∞]`. Green functions restrict to asymptotically linear functions on
//! each edge, and with rational piecewise-linear data every invariant in this
//! crate (pairings, essential infima, χ-volumes, Arakelov degrees of the
//! section spaces) is an exact rational number.
//!
//! Module map:
//!
//! * [`plf`]: piecewise-linear functions on `[0, +∞]`, energies, convex
//!   envelopes and the Legendre-type transform.
//! * [`curve`]: closed points, R-divisors and Riemann–Roch on genus-0 models.
//! * [`green`]: metrised R-divisors, the intersection pairing, infimum slopes
//!   and section norms.
//! * [`positivity`]: the essential infimum as an exact maximin program, the
//!   divisors `D_{g,t}`, χ-volume, volume and the positivity classes.
//! * [`hilbert_samuel`]: Arakelov degrees of `(H⁰(nD), ‖·‖_{ng})` by two
//!   independent routes and the randomized inequality suite.

pub mod curve;
pub mod error;
pub mod green;
pub mod hilbert_samuel;
pub mod lp;
pub mod plf;
pub mod positivity;
pub mod random;
pub mod rational;

pub use curve::{CurveModel, PointId, RDivisor};
pub use error::{Error, Result};
pub use green::{EdgeData, MetrisedDivisor, SectionDivisor};
pub use hilbert_samuel::{FiltrationProfile, HsReport, HsRow, InequalityReport};
pub use plf::{DerivativeMeasure, Plf};
pub use positivity::{Classification, DistributionProfile, MaximinProgram, ThresholdFunction};
pub use rational::{Extended, Rational};
