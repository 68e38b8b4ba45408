//! Finite-dimensional realization theory for noncommutative analytic
//! functions.
//!
//! A free formal power series `h = sum_w h_w z^w` is *recognizable* when it
//! can be generated by a finite state-space realization: a tuple of matrices
//! `A = (A_1, .., A_d)` and vectors `b, c` with `h_w = b^* A^w c`, or the
//! Fornasini-Marchesini variant `(A, B, C, D)`. This crate implements that
//! calculus end to end:
//!
//! - [`series`] — truncated free power series: the exact-coefficient oracle
//!   every realization computation is cross-checked against;
//! - [`realization`] — descriptor/FM realizations, pencil evaluation at
//!   matrix points, coefficient extraction, the sum/product/inverse block
//!   algebra, conversions, shifts;
//! - [`minimal`] — controllable/observable Krylov subspaces, Kalman
//!   compression to a minimal realization, similarity recovery;
//! - [`entire`] — jointly nilpotent monomial realizations, the weighted
//!   block constructions realizing entire functions with quasinilpotent
//!   truncations, joint-spectral-radius estimation;
//! - [`spectral`] — pencil condition analysis, pole candidates of
//!   meromorphic restrictions with Jordan-order bounds, circle-blow-up pole
//!   confirmation, Riesz projectors by contour quadrature and ordered Schur
//!   forms, Schatten norms, Zariski-density probes;
//! - [`matcentre`] — realizations recentred at a matrix point, ampliated
//!   evaluation, Taylor-Taylor terms and the recentred block algebra;
//! - [`expr`] — a parser/printer/compiler for NC rational expressions over
//!   `z1 .. zd`;
//! - [`json`] — versioned interchange formats used by the CLI.
//!
//! ```
//! use ncrealize::{expr, MatrixTuple, Word};
//! use num_complex::Complex64;
//!
//! // compile an NC rational expression to a realization ..
//! let ast = expr::parse("inv(1 - z1 - z2)").unwrap();
//! let fm = expr::compile(&ast, 2).unwrap();
//!
//! // .. every word has exactly one factorization, so all coefficients are 1
//! assert!((fm.coeff(&Word::from([1, 2, 2])) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
//!
//! // .. and evaluate it at a matrix point through the linear pencil
//! let x = MatrixTuple::scalars(&[Complex64::new(0.25, 0.0), Complex64::new(0.25, 0.0)]);
//! let value = fm.eval(&x).unwrap();
//! assert!((value[(0, 0)] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
//! ```

pub mod entire;
pub mod error;
pub mod expr;
pub mod json;
pub mod linalg;
pub mod matcentre;
pub mod matrix;
pub mod minimal;
pub mod realization;
pub mod sampling;
pub mod series;
pub mod spectral;
pub mod word;

pub use error::{Error, Result};
pub use matrix::MatrixTuple;
pub use realization::{DescriptorRealization, FmRealization};
pub use series::{ShiftSide, TruncatedSeries};
pub use word::Word;
