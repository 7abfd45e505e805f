//! Exact enumeration of Salem numbers of degree 4.
//!
//! The crate counts palindromic quartics `x^4 + a x^3 + b x^2 + a x + 1`
//! whose largest root is a Salem number bounded by `Q`, together with the
//! square-rootable subclass, the Salem numbers generated by the traces of a
//! Bianchi group `PSL(2, O_K)`, and the analogous system of inequalities over
//! a real quadratic field.
//!
//! Every membership decision is made with exact integer arithmetic. Floating
//! point appears only in diagnostic values (approximate roots, fitted
//! constants) and in search-box bounds that are always re-checked exactly.
//!
//! Modules:
//! - [`algebra`]: integer square roots and quadratic rings of integers
//! - [`quartic`]: the [`SalemQuartic`] type and its predicates
//! - [`census`]: enumeration over the rational integers
//! - [`bianchi`]: trace enumeration for `Q(sqrt(-D))`
//! - [`totally_real`]: the inequality system over a real quadratic field
//! - [`asymptotics`]: leading constants, power-law fits, multiplicity report
//! - [`output`]: CSV and JSON encodings of all of the above

pub mod algebra;
pub mod asymptotics;
pub mod bianchi;
pub mod census;
mod error;
pub mod output;
pub mod quartic;
pub mod totally_real;

pub use algebra::{is_perfect_square, QuadIntK, RealQuadElem};
pub use asymptotics::{multiplicity_report, omega, power_fit, FitResult, MultiplicityRow};
pub use bianchi::{
    bianchi_census, marklof_constant, salem_from_trace, BianchiCensus, BianchiSalem,
};
pub use census::{
    box_sums, count_deg2, count_salem_deg4, count_sr, enumerate_salem_deg4, enumerate_sr,
    CensusRecord, Source,
};
pub use error::{Error, Result};
pub use quartic::{SalemQuartic, SqrtWitness};
pub use totally_real::{
    count_system, enumerate_system, lattice_geometry, verify_salem_over_l, Branch, LatticeGeometry,
    SystemSolution,
};
