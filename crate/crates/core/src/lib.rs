//! Exact symbolic toolkit for based endomorphisms of projectivized toric
//! vector bundles.
//!
//! The crate is organized around a chain of small exact-arithmetic layers:
//!
//! * [`poly`] and [`fiber`] - Laurent polynomials over Q, homogeneous fiber
//!   polynomials, and semigroup-ring membership for chart coordinate rings.
//! * [`lattice`] - fans, smoothness and completeness certification, walls
//!   and their integer relations, and lattice endomorphism analysis.
//! * [`transition`] - tangent and cotangent transition Jacobians across a
//!   wall, the Sym^d substitution action, and the closed coefficient
//!   calculus that drives the nonexistence certificates.
//! * [`sections`] - divisor polytopes, lattice-point section bases, and
//!   dimension bookkeeping for split-bundle map families.
//! * [`split`] - transition cocycles, gluing verification, common-zero
//!   analysis, and the classification of based maps on split bundles.
//! * [`obstruction`] - compatibility-equation verification and the
//!   monomial nonexistence certificates for projectivized (co)tangent
//!   bundles.
//! * [`chern`] - the Chern-class identity layer: pullback expansion,
//!   coefficient lemmas, and the projective-space obstruction.
//!
//! All computation is exact; no floating point is used anywhere.

pub mod arith;
pub mod chern;
pub mod comp;
pub mod fiber;
pub mod lattice;
pub mod obstruction;
pub mod poly;
pub mod sections;
pub mod split;
pub mod transition;

pub use fiber::{FiberPoly, MembershipReport, SemigroupRing};
pub use lattice::{Fan, Wall, WallRelation};
pub use poly::{LaurentPoly, VarSet};
