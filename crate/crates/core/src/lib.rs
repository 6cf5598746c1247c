//! Multivariable orthogonal polynomials through interacting Fock data.
//!
//! Everything is generic over a [`Scalar`]; the aliases below fix the two
//! backends used in practice.

pub mod error;
pub mod favard;
pub mod fock;
pub mod gradation;
pub mod linalg;
pub mod marginal;
pub mod measures;
pub mod nullideal;
pub mod polynomial;
pub mod scalar;
mod tolerance;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use tolerance::Tolerances;

pub type PolynomialF64 = polynomial::Polynomial<f64>;
pub type PolynomialF32 = polynomial::Polynomial<f32>;
pub type ExactPolynomial = polynomial::Polynomial<Rational>;
pub type GradationF64 = gradation::GradationBasis<f64>;
pub type ExactGradation = gradation::GradationBasis<Rational>;
pub type FockDataF64 = fock::FockData<f64>;
pub type ExactFockData = fock::FockData<Rational>;
pub type FockInputF64 = favard::FockInput<f64>;
pub type ExactFockInput = favard::FockInput<Rational>;
pub type MatrixF64 = linalg::Matrix<f64>;
pub type ExactMatrix = linalg::Matrix<Rational>;
