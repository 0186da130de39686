//! Positive twisted traces on generalized q-Weyl algebras.
//!
//! The algebra `A(P, q)` is generated by `u, v, Z^{+-1}` with
//! `Z u Z^-1 = q^2 u`, `Z v Z^-1 = q^-2 v`, `u v = P(q^-1 Z)` and
//! `v u = P(q Z)`. A trace is represented by its moments `c_i = T(Z^i)`, or
//! equivalently by the bilateral series `w = sum c_i z^-i`. This crate builds
//! candidate traces from quotients of theta functions, checks them against
//! the algebra's defining relations, and certifies positivity.

pub mod algebra;
pub mod error;
pub mod json;
pub mod laurent;
pub mod linalg;
pub mod positivity;
pub mod theta;
pub mod tolerances;
pub mod trace;

pub use algebra::{AlgebraElement, AlgebraParams};
pub use error::{Error, Result};
pub use laurent::{BilateralSeries, ConstantTerm, LaurentPoly, RootData, Window};
pub use num_complex::Complex64;
pub use positivity::{classify, ClassificationReport, ClassifyOptions, Verdict};
pub use theta::ThetaParams;
pub use tolerances::Tolerances;
pub use trace::{MomentTable, TraceAnsatz};
