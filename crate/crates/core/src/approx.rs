//! Best weighted least-squares approximation in the shifted Bessel basis.
//!
//! The coefficients `A` of `f_N = AᵀQ` solve `K A = ⟨f, Q⟩_w`. Polynomials
//! are projected exactly through the moment formulas; other functions use
//! Gauss–Legendre quadrature with node doubling.

use num_rational::BigRational;
use num_traits::Zero;

use crate::basis::int;
use crate::error::{Result, TauError};
use crate::linalg::{dot, Matrix};
use crate::opmat::{moment, OpMatrixSet};
use crate::quadrature::gauss_legendre;
use crate::scalar::RealScalar;

/// Coefficients of the projection and the squared weighted L² norm of
/// `f - f_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult<T> {
    pub coeffs: Vec<T>,
    pub residual_norm_sq: T,
}

impl<T: RealScalar> ProjectionResult<T> {
    pub fn residual_norm(&self) -> T {
        let r = self.residual_norm_sq.clone();
        if r > T::zero() {
            r.sqrt()
        } else {
            T::zero()
        }
    }
}

/// Exact projection of `Σ mono[k] x^k` (any degree).
pub fn project_polynomial(set: &OpMatrixSet, mono: &[BigRational]) -> ProjectionResult<BigRational> {
    let n = set.order();
    let inner_mono = |m: usize| -> BigRational {
        mono.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(BigRational::zero(), |s, (k, c)| s + c.clone() * moment(&set.spec, k + m))
    };
    let mono_moments: Vec<BigRational> = (0..=n).map(inner_mono).collect();
    let g = set.change.m_mat.mul_vec(&mono_moments);
    let coeffs = set.k_mat.solve(&g).expect("dual matrix is positive definite");
    let norm_f = mono
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(BigRational::zero(), |s, (k, c)| s + c.clone() * inner_mono(k));
    let residual_norm_sq = norm_f - dot(&coeffs, &g);
    ProjectionResult { coeffs, residual_norm_sq }
}

/// Smallest rule tried by [`project_function`].
const MIN_NODES: usize = 16;
/// Largest rule tried before giving up.
const MAX_NODES: usize = 2048;

/// Projection of an arbitrary function, accurate to about `digits` digits.
///
/// The moments `⟨f, x^m⟩_w` are computed with Gauss–Legendre rules of
/// doubling size until two successive rules agree to `10^(10-digits)`
/// relative to the largest moment. The dual system is solved with enough
/// extra digits to absorb its conditioning, so the returned values carry
/// more precision than requested.
pub fn project_function<T, F>(set: &OpMatrixSet, f: F, digits: u32) -> Result<ProjectionResult<T>>
where
    T: RealScalar,
    F: Fn(&T) -> T,
{
    let n = set.order();
    let hi = digits + set.log10_cond_h().max(0.0).ceil() as u32 + 10;
    let q = |v: &BigRational| T::from_rational(v, hi);
    let a = q(set.spec.a());
    let b = q(set.spec.b());
    let half = T::from_rational(&(int(1) / int(2)), hi);
    let mid = (a.clone() + &b) * &half;
    let rad = (b - &a) * &half;

    let moments_with = |nodes: usize| -> (Vec<T>, T) {
        let rule = gauss_legendre::<T>(nodes, hi);
        let mut out = vec![T::zero(); n + 1];
        let mut sq = T::zero();
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let x = mid.clone() + rad.clone() * t;
            let fx = f(&x);
            let wf = w.clone() * &half * &fx;
            sq = sq + wf.clone() * &fx;
            let mut xp = wf;
            for o in out.iter_mut() {
                *o = o.clone() + &xp;
                xp = xp * &x;
            }
        }
        (out, sq)
    };

    let tol = T::from_rational(&int(10), hi).powi(10 - digits as i32);
    let mut nodes = MIN_NODES.max(n + 2).next_power_of_two();
    let mut prev = moments_with(nodes).0;
    let (moments, norm_sq) = loop {
        nodes *= 2;
        let (cur, cur_sq) = moments_with(nodes);
        let scale = crate::scalar::max_abs(&cur).to_f64_lossy().max(f64::MIN_POSITIVE);
        let change = cur
            .iter()
            .zip(&prev)
            .map(|(c, p)| (c.clone() - p).abs())
            .fold(T::zero(), |m, d| if d > m { d } else { m });
        if change <= tol.clone() * T::from_f64(scale, hi) || cur.iter().all(Zero::is_zero) {
            break (cur, cur_sq);
        }
        if nodes >= MAX_NODES {
            return Err(TauError::QuadratureNotConverged {
                nodes,
                change: change.to_f64_lossy() / scale,
            });
        }
        prev = cur;
    };

    let m = set.change.m_mat.map(|v| q(v));
    let k: Matrix<T> = set.k_mat.map(|v| q(v));
    let g = m.mul_vec(&moments);
    let coeffs = k.solve(&g)?;
    let residual_norm_sq = norm_sq - dot(&coeffs, &g);
    Ok(ProjectionResult { coeffs, residual_norm_sq })
}

/// Error bound `M/(N+1)! · sqrt(b^(2N+2)/(2N+3))` for the projection on
/// `[0, b]` of a function whose `(N+1)`-th derivative is bounded by `M`.
pub fn error_bound<T: RealScalar>(n: usize, deriv_bound: &T, b: &T) -> T {
    let digits = b.digits().max(deriv_bound.digits());
    let fact = (1..=n as i64 + 1).fold(T::from_i64(1, digits), |acc, k| acc * T::from_i64(k, digits));
    let ratio = b.powi(2 * n as i32 + 2) / T::from_i64(2 * n as i64 + 3, digits);
    deriv_bound.clone() / fact * ratio.sqrt()
}
