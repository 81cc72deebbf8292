//! Properties of the weighted least-squares projection and its error bound.

mod common;

use common::*;
use num_traits::Zero;
use proptest::prelude::*;
use taubessel_core::approx::{error_bound, project_function, project_polynomial};
use taubessel_core::{MpFloat, RealScalar, Scalar};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_error_is_orthogonal_to_the_basis(order in 0usize..=6, (a, b) in interval(), f in poly(14), deg in 0usize..14) {
        let ops = exact_ops(order, a, b);
        let f = &f[..=deg];
        let r = project_polynomial(ops.set(), f);
        let error: Vec<_> = mono_add(f, &ops.to_monomial(&r.coeffs).into_iter().map(|v| -v).collect::<Vec<_>>());
        for i in 0..=order {
            prop_assert!(inner(a, b, ops.set().change.m_mat.row(i), &error).is_zero());
        }
        prop_assert_eq!(r.residual_norm_sq.clone(), inner(a, b, &error, &error));
    }

    #[test]
    fn projection_is_idempotent_and_linear(order in 0usize..=6, (a, b) in interval(), f in poly(12), g in poly(12), s in rational()) {
        let set = exact_ops(order, a, b).set().clone();
        let ops = exact_ops(order, a, b);
        let pf = project_polynomial(&set, &f).coeffs;
        let again = project_polynomial(&set, &ops.to_monomial(&pf));
        prop_assert_eq!(&again.coeffs, &pf);
        prop_assert!(again.residual_norm_sq.is_zero());
        let pg = project_polynomial(&set, &g).coeffs;
        let mix: Vec<_> = f.iter().zip(&g).map(|(x, y)| &s * x + y).collect();
        let lhs = project_polynomial(&set, &mix).coeffs;
        let rhs: Vec<_> = pf.iter().zip(&pg).map(|(x, y)| &s * x + y).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quadrature_projection_agrees_with_the_exact_one(order in 0usize..=8, (a, b) in interval(), f in poly(9)) {
        let ops = exact_ops(order, a, b);
        let f = f[..=order].to_vec();
        let digits = 40;
        let exact = project_polynomial(ops.set(), &f).coeffs;
        let g = f.clone();
        let quad = project_function::<MpFloat, _>(ops.set(), move |x| {
            g.iter().rev().fold(MpFloat::from_i64(0, digits), |acc, c| acc * x + MpFloat::from_rational(c, digits))
        }, digits).unwrap();
        for (e, c) in exact.iter().zip(&quad.coeffs) {
            let err = (MpFloat::from_rational(e, digits) - c).abs().to_f64_lossy();
            prop_assert!(err <= 1e-25 * (1.0 + e.to_f64_lossy().abs()), "coefficient off by {:e}", err);
        }
    }

    #[test]
    fn error_bound_decays(order in 0usize..=30, m in 1i64..=1000, b in 1i64..=3) {
        let digits = 30;
        let mm = MpFloat::from_i64(m, digits);
        let bb = MpFloat::from_i64(b, digits);
        let now = error_bound(order, &mm, &bb).to_f64_lossy();
        let next = error_bound(order + 1, &mm, &bb).to_f64_lossy();
        // the ratio is b/(N+2) times a factor below one
        prop_assert!(next < now * b as f64 / (order as f64 + 2.0));
    }
}

/// On `[0, 1]` the exp(x²) projection error falls with `N` and stays below
/// the bound `max|f^(N+1)| / (N+1)! · sqrt(1/(2N+3))`.
#[test]
fn exp_x2_error_decays_under_the_bound() {
    let digits = 40;
    let mut previous = f64::INFINITY;
    for order in 2..=12 {
        let ops = exact_ops(order, 0, 1);
        let r = project_function::<MpFloat, _>(ops.set(), |x| (x.clone() * x).exp(), digits).unwrap();
        let measured = r.residual_norm().to_f64_lossy();
        // d^k exp(x²) = p_k(x) exp(x²) with non-negative coefficients, so
        // the maximum on [0, 1] is p_k(1) e
        let mut p: Vec<f64> = vec![1.0];
        for _ in 0..=order {
            let mut next = vec![0.0; p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                if k > 0 {
                    next[k - 1] += k as f64 * c;
                }
                next[k + 1] += 2.0 * c;
            }
            p = next;
        }
        let m = p.iter().sum::<f64>() * std::f64::consts::E;
        let bound = error_bound(order, &MpFloat::from_f64(m, digits), &MpFloat::from_i64(1, digits)).to_f64_lossy();
        assert!(measured <= bound, "N={order}: {measured:e} > {bound:e}");
        assert!(measured < previous, "N={order}: error did not decrease");
        previous = measured;
    }
}
