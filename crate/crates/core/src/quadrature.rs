//! Gauss–Legendre rules at arbitrary precision.
//!
//! Nodes are the roots of `P_n`, found by Newton's method from the
//! asymptotic estimate `cos(π(i - 1/4)/(n + 1/2))` and refined at the
//! requested precision. Rules are cached per (type, node count, digits).

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::scalar::RealScalar;

/// Nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

type CacheKey = (TypeId, usize, u32);
type Cache = RwLock<HashMap<CacheKey, Arc<dyn Any + Send + Sync>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: RealScalar>(n: usize, x: &T, digits: u32) -> (T, T) {
    let one = T::from_i64(1, digits);
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = T::from_i64(k as i64, digits);
        let a = T::from_i64(2 * k as i64 - 1, digits);
        let b = T::from_i64(k as i64 - 1, digits);
        let p2 = (a * x * &p1 - b * &p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (one, T::zero());
    }
    let nf = T::from_i64(n as i64, digits);
    let dp = nf * (x.clone() * &p1 - p0) / (x.clone() * x - one);
    (p1, dp)
}

fn compute<T: RealScalar>(n: usize, digits: u32) -> GaussLegendre<T> {
    assert!(n >= 1, "a Gauss rule needs at least one node");
    let two = T::from_i64(2, digits);
    let one = T::from_i64(1, digits);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = T::from_f64(guess, digits);
        let eps = x.rounding_unit() * T::from_i64(8, digits);
        let mut dp;
        let mut steps = 0;
        loop {
            let (p, d) = legendre(n, &x, digits);
            dp = d;
            let dx = p / &dp;
            x = x - &dx;
            steps += 1;
            if dx.abs() <= eps || steps > 200 {
                break;
            }
        }
        let (_, d) = legendre(n, &x, digits);
        dp = d;
        let w = two.clone() / ((one.clone() - x.clone() * &x) * &dp * &dp);
        // descending roots from the guess; store ascending and mirror
        nodes[n - 1 - i] = x.clone();
        weights[n - 1 - i] = w.clone();
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    GaussLegendre { nodes, weights }
}

/// The `n`-point rule at `digits` decimal digits, computed once and shared.
pub fn gauss_legendre<T: RealScalar>(n: usize, digits: u32) -> Arc<GaussLegendre<T>> {
    let key = (TypeId::of::<T>(), n, digits);
    if let Some(hit) = cache().read().expect("quadrature cache poisoned").get(&key) {
        return hit.clone().downcast::<GaussLegendre<T>>().expect("cache entry type");
    }
    let rule = Arc::new(compute::<T>(n, digits));
    cache()
        .write()
        .expect("quadrature cache poisoned")
        .entry(key)
        .or_insert_with(|| rule.clone() as Arc<dyn Any + Send + Sync>)
        .clone()
        .downcast::<GaussLegendre<T>>()
        .expect("cache entry type")
}
