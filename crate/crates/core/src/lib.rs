//! Flows of null curves in Minkowski 3-space driven by the KdV hierarchy.
//!
//! The crate is organized around one pipeline:
//!
//! * [`diffpoly`] — exact symbolic algebra of differential polynomials in the
//!   jet variables `u0, u1, …` with rational coefficients, including the total
//!   derivative `D`, the Euler (variational derivative) operator `E`, and the
//!   third-order operator `𝒟 = D³ + 4 u0 D + 2 u1`.
//! * [`hierarchy`] — the Lenard recursion generating the KdV hierarchy's
//!   gradients and conserved densities, and the curvature motions they induce.
//! * [`geometry`] — Minkowski 3-vectors, null Frenet frames, pseudo-arc
//!   parametrization, and reconstruction of a null curve from its curvature.
//! * [`evolution`] — pseudospectral time evolution of periodic curvature
//!   profiles and co-evolution of the curve itself, with conserved-quantity
//!   monitors.
//! * [`special`] — closed-form material: Weierstrass traveling waves, the Lax
//!   pair along congruence curves, Painlevé II similarity solutions, and the
//!   similarity rescaling law.

pub mod diffpoly;
pub mod evolution;
pub mod geometry;
pub mod hierarchy;
pub mod ode;
pub mod special;
pub mod spectral;

pub use diffpoly::{DiffPoly, DiffPolyError, Monomial, Rational};
pub use hierarchy::{HierarchyError, HierarchyTable, MotionSpec};
