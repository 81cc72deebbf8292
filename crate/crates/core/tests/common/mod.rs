//! Shared strategies and exact monomial arithmetic for the property tests.

#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use taubessel_core::{BasisSpec, OpMatrixSet, Operators};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Small rationals in `[-4, 4]`.
pub fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=10).prop_map(|(n, d)| q(n, d))
}

/// A point of `[0, 1]`, later mapped onto `[a, b]`.
pub fn unit_point() -> impl Strategy<Value = BigRational> {
    (0i64..=64).prop_map(|k| q(k, 64))
}

pub fn interval() -> impl Strategy<Value = (i64, i64)> {
    prop_oneof![Just((0, 1)), Just((0, 3)), Just((1, 2))]
}

pub fn poly(len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    proptest::collection::vec(rational(), len)
}

pub fn exact_ops(n: usize, a: i64, b: i64) -> Operators<BigRational> {
    Operators::new(Arc::new(OpMatrixSet::new(&BasisSpec::on(n, a, b).unwrap())))
}

pub fn point(a: i64, b: i64, t: &BigRational) -> BigRational {
    int(a) + int(b - a) * t
}

/// `Σ p_k x^k`.
pub fn horner(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub fn padded(p: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = p.to_vec();
    out.resize(len.max(p.len()), BigRational::zero());
    out
}

pub fn mono_mul(u: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); u.len() + v.len() - 1];
    for (i, x) in u.iter().enumerate() {
        for (j, y) in v.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn mono_deriv(p: &[BigRational]) -> Vec<BigRational> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect()
}

/// Antiderivative vanishing at `a`.
pub fn mono_integ(p: &[BigRational], a: &BigRational) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    out.extend(p.iter().enumerate().map(|(k, c)| c / int(k as i64 + 1)));
    out[0] = -horner(&out, a);
    out
}

pub fn mono_add(u: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
    let len = u.len().max(v.len());
    padded(u, len).into_iter().zip(padded(v, len)).map(|(x, y)| x + y).collect()
}

/// `∫_a^b x^k dx / (b - a)`, the weighted moment, computed directly.
pub fn moment(a: i64, b: i64, k: usize) -> BigRational {
    let e = k as u32 + 1;
    (BigRational::from_integer(BigInt::from(b).pow(e)) - BigRational::from_integer(BigInt::from(a).pow(e)))
        / int(k as i64 + 1)
        / int(b - a)
}

/// `⟨p, r⟩_w` for monomial coefficient vectors.
pub fn inner(a: i64, b: i64, p: &[BigRational], r: &[BigRational]) -> BigRational {
    let prod = mono_mul(p, r);
    prod.iter().enumerate().fold(BigRational::zero(), |s, (k, c)| s + c * moment(a, b, k))
}

pub fn unit(n: usize, k: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::zero(); n];
    e[k] = BigRational::one();
    e
}
