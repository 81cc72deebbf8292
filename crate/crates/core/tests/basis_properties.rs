//! Properties of the shifted Bessel basis and its change matrices.

mod common;

use common::*;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use taubessel_core::basis::build_change_matrices;
use taubessel_core::linalg::Matrix;
use taubessel_core::{BasisSpec, MpFloat, Operators, Scalar};

fn factorial(n: usize) -> BigRational {
    (1..=n as i64).fold(BigRational::one(), |acc, k| acc * int(k))
}

/// `Σ_r (-1)^r / (r! (n+r)!) (t/2)^(2r+n)` over `2r + n ≤ N`.
fn direct_basis(n: usize, order: usize, t: &BigRational) -> BigRational {
    let half = t / int(2);
    let mut sum = BigRational::zero();
    let mut r = 0;
    while n + 2 * r <= order {
        let sign = if r % 2 == 0 { int(1) } else { int(-1) };
        sum += sign / (factorial(r) * factorial(n + r)) * num_traits::pow(half.clone(), n + 2 * r);
        r += 1;
    }
    sum
}

proptest! {
    #[test]
    fn basis_values_match_the_truncated_series(order in 0usize..=10, (a, b) in interval(), t in unit_point()) {
        let ops = exact_ops(order, a, b);
        let values = ops.eval_basis(&point(a, b, &t));
        for (n, v) in values.iter().enumerate() {
            prop_assert_eq!(v, &direct_basis(n, order, &t));
        }
    }

    #[test]
    fn float_basis_values_round_correctly(order in 0usize..=12, (a, b) in interval(), t in unit_point()) {
        let spec = BasisSpec::on(order, a, b).unwrap();
        let ops = Operators::<MpFloat>::for_spec(&spec);
        let x = ops.scalar(&point(a, b, &t));
        let tol = 10f64.powi(-(spec.precision_digits() as i32) + 5);
        for (n, v) in ops.eval_basis(&x).iter().enumerate() {
            let exact = direct_basis(n, order, &t);
            let err = (v.clone() - ops.scalar(&exact)).abs().to_f64_lossy();
            prop_assert!(err <= tol, "Q_{} off by {:e}", n, err);
        }
    }

    #[test]
    fn change_matrices_are_triangular_and_invert_exactly(order in 0usize..=12, (a, b) in interval()) {
        let c = build_change_matrices(&BasisSpec::on(order, a, b).unwrap());
        prop_assert!(c.y_mat.is_upper_triangular());
        prop_assert!(c.s_mat.is_lower_triangular());
        prop_assert!((0..=order).all(|i| !c.y_mat[(i, i)].is_zero() && !c.s_mat[(i, i)].is_zero()));
        prop_assert_eq!(c.y_mat.mul(&c.s_mat), c.m_mat.clone());
        prop_assert_eq!(c.m_mat.mul(&c.m_inv), Matrix::identity(order + 1));
        prop_assert_eq!(c.m_inv.mul(&c.m_mat), Matrix::identity(order + 1));
    }

    #[test]
    fn polynomials_are_reproduced_at_sample_points(
        order in 1usize..=15,
        (a, b) in interval(),
        p in poly(16),
        ts in proptest::collection::vec(unit_point(), 20),
    ) {
        let p = &p[..=order];
        let spec = BasisSpec::on(order, a, b).unwrap();
        let ops = Operators::<MpFloat>::for_spec(&spec);
        let c = ops.polynomial(p);
        let l1 = p.iter().fold(BigRational::zero(), |s, v| s + Signed::abs(v));
        let size = l1.to_f64_lossy().max(1.0) * (b as f64).powi(order as i32);
        let tol = 10f64.powi(-(spec.precision_digits() as i32) + 5) * size;
        for t in &ts {
            let x = point(a, b, t);
            let err = (ops.eval(&c, &ops.scalar(&x)) - ops.scalar(&horner(p, &x))).abs().to_f64_lossy();
            prop_assert!(err <= tol, "error {:e} at {}", err, x);
        }
    }
}
