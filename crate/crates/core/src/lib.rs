//! Exact-arithmetic workbench for genus-0 quantum K-theory.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix the
//! two exact domains used throughout: rationals and rational functions in `q`.

#![allow(clippy::needless_range_loop)]

pub mod dm;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod potential;
pub mod poly;
pub mod qde;
pub mod ratfun;
pub mod report;
pub mod ring;
pub mod sampler;
pub mod scalar;
pub mod series;
pub mod wdvv;

pub use dm::{lee_euler, s_matrix_pt, s_matrix_pt_symbolic, witten_integral, PsiExponentVector};
pub use engine::{christoffel, connection_matrices, curvature, metric, quantum_product, third_derivs};
pub use error::{Error, Result};
pub use matrix::{mat_inverse, SeriesMatrix};
pub use poly::Polynomial;
pub use potential::{Potential, PotentialKind, Theory};
pub use qde::{QSeries, QTarget};
pub use ratfun::{expand_ratfun, RationalFunction};
pub use report::{CheckReport, VerifiedThrough, Witness};
pub use ring::{
    euler_char_line, h_ring_cpn, k_ring_cpn, point_ring, ring_element_pairing, FrobeniusRing,
};
pub use scalar::{Rational, Scalar};
pub use sampler::sample_k_potential;
pub use series::{MultiSeries, Truncation};

/// Series with exact rational coefficients.
pub type RatSeries = MultiSeries<Rational>;
/// Series whose coefficients are rational functions of `q`.
pub type RatFnSeries = MultiSeries<RationalFunction>;
pub type RatMatrix = SeriesMatrix<Rational>;
pub type RatFnMatrix = SeriesMatrix<RationalFunction>;
