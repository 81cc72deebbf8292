//! Shifted Bessel polynomial Tau method.
//!
//! The basis and its operational matrices are built exactly over
//! [`Exact`] rationals; the nonlinear Tau systems are solved in any
//! [`scalar::Scalar`], normally the arbitrary-precision [`Real`].

pub mod approx;
pub mod basis;
pub mod error;
pub mod linalg;
pub mod newton;
pub mod opmat;
pub mod problems;
pub mod quadrature;
pub mod scalar;
pub mod tau;
pub mod verify;

pub use basis::BasisSpec;
pub use error::{Result, TauError};
pub use newton::{solve, InitialGuess, NewtonConfig, SolveReport};
pub use opmat::{OpMatrixSet, Operators};
pub use problems::{ProblemId, SqueezingFlowParams};
pub use scalar::{MpFloat, RealScalar, Scalar};
pub use tau::{BoundaryCondition, TauForm, TauProblem, TermTree};

/// Exact rational scalar used for matrix construction.
pub type Exact = num_rational::BigRational;
/// Arbitrary-precision float used by the solver.
pub type Real = MpFloat;

/// Operators in arbitrary precision.
pub type RealOperators = Operators<Real>;
/// Operators in exact arithmetic (linear problems only need finitely many
/// operations, so Newton on an affine problem is exact).
pub type ExactOperators = Operators<Exact>;
/// A Tau problem in arbitrary precision.
pub type RealProblem = TauProblem<Real>;
/// A Tau problem in double precision.
pub type F64Problem = TauProblem<f64>;
