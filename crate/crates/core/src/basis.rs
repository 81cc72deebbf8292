//! Shifted Bessel polynomial basis and its monomial change matrices.
//!
//! The basis member `Q_n(x) = B_n((x-a)/(b-a))` is the Bessel series
//! `B_n(t) = Σ_r (-1)^r / (r! (n+r)!) (t/2)^(2r+n)` truncated at total
//! degree `N`. With `X(x) = [1, x, ..., x^N]ᵀ` we have `Q(x) = M X(x)` where
//! `M = Y S`, `Y` holds the truncated series coefficients and `S` the
//! binomial expansion of the affine shift.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, TauError};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Coefficients `c` of an expansion `cᵀQ(x)` (length `N + 1`).
pub type CoeffVec<T> = Vec<T>;

/// Smallest accepted working precision in decimal digits.
pub const MIN_PRECISION_DIGITS: u32 = 30;
/// Precision used when none is requested.
pub const DEFAULT_PRECISION_DIGITS: u32 = 60;

/// One shifted Bessel basis: order `N`, interval `[a, b]` and the number of
/// decimal digits requested from float results.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    order: usize,
    a: BigRational,
    b: BigRational,
    precision_digits: u32,
}

impl BasisSpec {
    pub fn new(order: usize, a: BigRational, b: BigRational, precision_digits: u32) -> Result<Self> {
        if a >= b {
            return Err(TauError::InvalidSpec(format!("interval [{a}, {b}] is empty")));
        }
        if precision_digits < MIN_PRECISION_DIGITS {
            return Err(TauError::InvalidSpec(format!(
                "precision {precision_digits} is below the minimum of {MIN_PRECISION_DIGITS} digits"
            )));
        }
        Ok(BasisSpec { order, a, b, precision_digits })
    }

    /// Basis on `[a, b]` with integer endpoints and the default precision.
    pub fn on(order: usize, a: i64, b: i64) -> Result<Self> {
        BasisSpec::new(order, int(a), int(b), DEFAULT_PRECISION_DIGITS)
    }

    pub fn with_precision(mut self, digits: u32) -> Result<Self> {
        if digits < MIN_PRECISION_DIGITS {
            return Err(TauError::InvalidSpec(format!(
                "precision {digits} is below the minimum of {MIN_PRECISION_DIGITS} digits"
            )));
        }
        self.precision_digits = digits;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.order + 1
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `Y[n][n+2r] = (-1)^r / (r! (n+r)! 2^(2r+n))`, upper triangular.
pub fn build_y(n: usize) -> Matrix<BigRational> {
    let mut y = Matrix::zeros(n + 1, n + 1);
    for row in 0..=n {
        let mut r = 0;
        while row + 2 * r <= n {
            let m = row + 2 * r;
            let den = factorial(r) * factorial(row + r) * (BigInt::one() << m);
            let num = if r % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            y[(row, m)] = BigRational::new(num, den);
            r += 1;
        }
    }
    y
}

/// `S[i][j] = C(i,j) (-a)^(i-j) / (b-a)^i`, lower triangular: row `i` holds
/// the monomial coefficients of `((x-a)/(b-a))^i`.
pub fn build_s(n: usize, a: &BigRational, b: &BigRational) -> Matrix<BigRational> {
    let width = b - a;
    let neg_a = -a;
    let mut s = Matrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let scale = num_traits::pow(width.clone(), i);
        for j in 0..=i {
            let c = BigRational::from_integer(binomial(BigInt::from(i), BigInt::from(j)));
            s[(i, j)] = c * num_traits::pow(neg_a.clone(), i - j) / &scale;
        }
    }
    s
}

/// `Y`, `S`, `M = Y S` and `M⁻¹ = S⁻¹ Y⁻¹`, all exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeMatrices {
    pub y_mat: Matrix<BigRational>,
    pub s_mat: Matrix<BigRational>,
    pub m_mat: Matrix<BigRational>,
    pub m_inv: Matrix<BigRational>,
}

pub fn build_change_matrices(spec: &BasisSpec) -> ChangeMatrices {
    let n = spec.order;
    let y_mat = build_y(n);
    let s_mat = build_s(n, &spec.a, &spec.b);
    let m_mat = y_mat.mul(&s_mat);
    // both factors have nonzero diagonals by construction
    let y_inv = y_mat.inverse_upper().expect("Y has a nonzero diagonal");
    let s_inv = s_mat.inverse_lower().expect("S has a nonzero diagonal");
    let m_inv = s_inv.mul(&y_inv);
    ChangeMatrices { y_mat, s_mat, m_mat, m_inv }
}

/// `[1, x, ..., x^n]`.
pub fn monomials<T: Scalar>(x: &T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = T::one();
    for _ in 0..=n {
        out.push(p.clone());
        p = p * x;
    }
    out
}

/// Evaluates a monomial polynomial `Σ p_m x^m` by Horner's rule.
pub fn horner<T: Scalar>(p: &[T], x: &T) -> T {
    p.iter().rev().fold(T::zero(), |acc, c| acc * x + c)
}

/// `Q(x) = M X(x)` with `M` already converted to the evaluation type.
pub fn eval_basis<T: Scalar>(m: &Matrix<T>, x: &T) -> Vec<T> {
    (0..m.rows()).map(|i| horner(m.row(i), x)).collect()
}

/// `cᵀQ(x)`, evaluated through the monomial coefficients `Mᵀc`.
pub fn eval_expansion<T: Scalar>(m: &Matrix<T>, c: &[T], x: &T) -> T {
    horner(&m.vec_mul(c), x)
}

/// Logarithm base 10 of a positive rational, valid far beyond `f64` range.
pub(crate) fn log10_rational(q: &BigRational) -> f64 {
    let q = Signed::abs(q);
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    let shift = |v: &BigInt| -> (f64, i64) {
        let bits = v.bits() as i64;
        let drop = (bits - 60).max(0);
        let top: BigInt = v >> drop as usize;
        (num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::MAX), drop)
    };
    let (n, dn) = shift(q.numer());
    let (d, dd) = shift(q.denom());
    n.log10() - d.log10() + (dn - dd) as f64 * std::f64::consts::LOG10_2
}

/// `log10(‖A‖∞ ‖B‖∞)` for a matrix and its inverse.
pub(crate) fn log10_condition(a: &Matrix<BigRational>, a_inv: &Matrix<BigRational>) -> f64 {
    log10_rational(&a.norm_inf()) + log10_rational(&a_inv.norm_inf())
}
