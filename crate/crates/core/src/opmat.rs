//! Operational matrices of derivative, integration, product and the dual
//! (Gram) matrix, built exactly and converted on demand.
//!
//! Row-vector convention throughout: an expansion is `cᵀQ(x)`, its
//! derivative is `cᵀD Q(x)`, its integral from `a` is `cᵀI Q(x)` and its
//! product with `vᵀQ(x)` is `cᵀC̃(v) Q(x)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::basis::{
    build_change_matrices, eval_expansion, horner, int, log10_condition, BasisSpec, ChangeMatrices,
};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Monomial derivative: `P[i][i-1] = i`, so `X'(x) = P X(x)`.
pub fn build_p(n: usize) -> Matrix<BigRational> {
    Matrix::from_fn(n + 1, n + 1, |i, j| if i == j + 1 { int(i as i64) } else { int(0) })
}

/// Weighted monomial moment `∫_a^b x^k dx / (b-a)`.
pub fn moment(spec: &BasisSpec, k: usize) -> BigRational {
    let (a, b) = (spec.a(), spec.b());
    let p = k + 1;
    (num_traits::pow(b.clone(), p) - num_traits::pow(a.clone(), p)) / (int(p as i64) * (b - a))
}

/// Monomial Gram matrix `H[i][j] = ⟨x^i, x^j⟩_w` with `w = 1/(b-a)`.
pub fn build_moment(spec: &BasisSpec) -> Matrix<BigRational> {
    let n = spec.order();
    let moments: Vec<_> = (0..=2 * n).map(|k| moment(spec, k)).collect();
    Matrix::from_fn(n + 1, n + 1, |i, j| moments[i + j].clone())
}

pub fn build_d(change: &ChangeMatrices) -> Matrix<BigRational> {
    let n = change.m_mat.rows() - 1;
    change.m_mat.mul(&build_p(n)).mul(&change.m_inv)
}

/// Dual matrix `K = M H Mᵀ`.
pub fn build_k(spec: &BasisSpec, change: &ChangeMatrices) -> Matrix<BigRational> {
    change.m_mat.mul(&build_moment(spec)).mul(&change.m_mat.transpose())
}

/// Least-squares projections of the monomials `x^m` for `m = N+1 ..= 2N+1`
/// onto `span{1, ..., x^N}`, one row of monomial coefficients per `m`.
pub fn build_overflow(spec: &BasisSpec) -> Matrix<BigRational> {
    let n = spec.order();
    let h = build_moment(spec);
    let rhs = Matrix::from_fn(n + 1, n + 1, |i, k| moment(spec, i + n + 1 + k));
    h.solve_matrix(&rhs).expect("moment matrix is positive definite").transpose()
}

/// Monomial integral from `a`. Rows below `N` are exact antiderivatives;
/// row `N` is the projection of `x^(N+1)/(N+1)` minus its value at `a`.
pub fn build_l(spec: &BasisSpec, overflow: &Matrix<BigRational>) -> Matrix<BigRational> {
    let n = spec.order();
    let a = spec.a();
    let mut l = Matrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let k = int(i as i64 + 1);
        if i < n {
            l[(i, i + 1)] = BigRational::one() / &k;
        } else {
            for j in 0..=n {
                l[(i, j)] = overflow[(0, j)].clone() / &k;
            }
        }
        let shift = num_traits::pow(a.clone(), i + 1) / &k;
        l[(i, 0)] = l[(i, 0)].clone() - shift;
    }
    l
}

pub fn build_i(change: &ChangeMatrices, l: &Matrix<BigRational>) -> Matrix<BigRational> {
    change.m_mat.mul(l).mul(&change.m_inv)
}

/// Monomial product matrix `Ṽ(v)`: row `i` holds `x^i · Σ_j v_j x^j`
/// projected back onto degree `N`.
pub fn v_tilde<T: Scalar>(overflow: &Matrix<T>, v: &[T]) -> Matrix<T> {
    let n = v.len() - 1;
    let mut out = Matrix::<T>::zeros(n + 1, n + 1);
    for i in 0..=n {
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let m = i + j;
            if m <= n {
                out[(i, m)] = out[(i, m)].clone() + vj;
            } else {
                let e = overflow.row(m - n - 1);
                for (k, ek) in e.iter().enumerate() {
                    out[(i, k)] = out[(i, k)].clone() + vj.clone() * ek;
                }
            }
        }
    }
    out
}

/// All exact matrices of one basis.
#[derive(Debug, Clone)]
pub struct OpMatrixSet {
    pub spec: BasisSpec,
    pub change: ChangeMatrices,
    pub p_mat: Matrix<BigRational>,
    pub d_mat: Matrix<BigRational>,
    pub h_mat: Matrix<BigRational>,
    pub k_mat: Matrix<BigRational>,
    pub l_mat: Matrix<BigRational>,
    pub i_mat: Matrix<BigRational>,
    /// Projections of `x^(N+1) ..= x^(2N+1)`, see [`build_overflow`].
    pub overflow: Matrix<BigRational>,
    log10_cond_m: f64,
    log10_cond_h: f64,
}

impl OpMatrixSet {
    pub fn new(spec: &BasisSpec) -> Self {
        let change = build_change_matrices(spec);
        let n = spec.order();
        let p_mat = build_p(n);
        let d_mat = build_d(&change);
        let h_mat = build_moment(spec);
        let k_mat = change.m_mat.mul(&h_mat).mul(&change.m_mat.transpose());
        let overflow = build_overflow(spec);
        let l_mat = build_l(spec, &overflow);
        let i_mat = build_i(&change, &l_mat);
        let log10_cond_m = log10_condition(&change.m_mat, &change.m_inv);
        let h_inv = h_mat.inverse().expect("moment matrix is positive definite");
        let log10_cond_h = log10_condition(&h_mat, &h_inv);
        OpMatrixSet {
            spec: spec.clone(),
            change,
            p_mat,
            d_mat,
            h_mat,
            k_mat,
            l_mat,
            i_mat,
            overflow,
            log10_cond_m,
            log10_cond_h,
        }
    }

    /// Process-wide cached build, so repeated solves on one basis share the
    /// exact matrices.
    pub fn shared(spec: &BasisSpec) -> Arc<OpMatrixSet> {
        static CACHE: OnceLock<Mutex<HashMap<BasisSpec, Arc<OpMatrixSet>>>> = OnceLock::new();
        let mut cache = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
        cache.entry(spec.clone()).or_insert_with(|| Arc::new(OpMatrixSet::new(spec))).clone()
    }

    pub fn order(&self) -> usize {
        self.spec.order()
    }

    /// `log10(‖M‖∞ ‖M⁻¹‖∞)`.
    pub fn log10_cond_m(&self) -> f64 {
        self.log10_cond_m
    }

    /// `log10(‖H‖∞ ‖H⁻¹‖∞)`.
    pub fn log10_cond_h(&self) -> f64 {
        self.log10_cond_h
    }

    /// Decimal digits carried by float computations: the requested
    /// precision plus the digits lost converting between the basis and
    /// monomial coordinates.
    pub fn working_digits(&self) -> u32 {
        self.spec.precision_digits() + self.log10_cond_m.max(0.0).ceil() as u32
    }

    /// Exact `Ṽ(v)` for monomial coefficients `v`.
    pub fn build_v_tilde(&self, v: &[BigRational]) -> Matrix<BigRational> {
        v_tilde(&self.overflow, v)
    }

    /// Exact `C̃(c) = M Ṽ(Mᵀc) M⁻¹` for basis coefficients `c`.
    pub fn build_c_tilde(&self, c: &[BigRational]) -> Matrix<BigRational> {
        let v = self.change.m_mat.vec_mul(c);
        self.change.m_mat.mul(&self.build_v_tilde(&v)).mul(&self.change.m_inv)
    }
}

/// The operational matrices converted to a computation type, with the
/// row-vector operations used by the Tau reduction.
#[derive(Debug, Clone)]
pub struct Operators<T> {
    set: Arc<OpMatrixSet>,
    digits: u32,
    m: Matrix<T>,
    m_inv: Matrix<T>,
    d: Matrix<T>,
    i: Matrix<T>,
    k: Matrix<T>,
    overflow: Matrix<T>,
}

impl<T: Scalar> Operators<T> {
    /// Converts at the set's working precision.
    pub fn new(set: Arc<OpMatrixSet>) -> Self {
        let digits = set.working_digits();
        Self::with_digits(set, digits)
    }

    pub fn with_digits(set: Arc<OpMatrixSet>, digits: u32) -> Self {
        let conv = |m: &Matrix<BigRational>| m.map(|q| T::from_rational(q, digits));
        Operators {
            m: conv(&set.change.m_mat),
            m_inv: conv(&set.change.m_inv),
            d: conv(&set.d_mat),
            i: conv(&set.i_mat),
            k: conv(&set.k_mat),
            overflow: conv(&set.overflow),
            digits,
            set,
        }
    }

    pub fn for_spec(spec: &BasisSpec) -> Self {
        Self::new(OpMatrixSet::shared(spec))
    }

    pub fn set(&self) -> &Arc<OpMatrixSet> {
        &self.set
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.set.spec
    }

    pub fn order(&self) -> usize {
        self.set.order()
    }

    pub fn size(&self) -> usize {
        self.set.order() + 1
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn m(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn m_inv(&self) -> &Matrix<T> {
        &self.m_inv
    }

    pub fn d(&self) -> &Matrix<T> {
        &self.d
    }

    pub fn i(&self) -> &Matrix<T> {
        &self.i
    }

    pub fn k(&self) -> &Matrix<T> {
        &self.k
    }

    /// Converts an exact value at this operator set's precision.
    pub fn scalar(&self, q: &BigRational) -> T {
        T::from_rational(q, self.digits)
    }

    pub fn int(&self, v: i64) -> T {
        T::from_i64(v, self.digits)
    }

    pub fn zeros(&self) -> CoeffRow<T> {
        vec![T::zero(); self.size()]
    }

    /// Basis coordinates → monomial coefficients (`Mᵀc`).
    pub fn to_monomial(&self, c: &[T]) -> Vec<T> {
        self.m.vec_mul(c)
    }

    /// Monomial coefficients (degree ≤ N, shorter is zero padded) → basis
    /// coordinates (`M⁻ᵀp`).
    pub fn from_monomial(&self, p: &[T]) -> Vec<T> {
        assert!(p.len() <= self.size(), "degree exceeds the basis order");
        let mut padded = p.to_vec();
        padded.resize(self.size(), T::zero());
        self.m_inv.vec_mul(&padded)
    }

    /// `cᵀD^k`.
    pub fn deriv(&self, c: &[T], k: usize) -> Vec<T> {
        (0..k).fold(c.to_vec(), |acc, _| self.d.vec_mul(&acc))
    }

    /// `cᵀI^k`.
    pub fn integ(&self, c: &[T], k: usize) -> Vec<T> {
        (0..k).fold(c.to_vec(), |acc, _| self.i.vec_mul(&acc))
    }

    /// Projected product `uᵀC̃(v)`; symmetric in `u` and `v`.
    pub fn product(&self, u: &[T], v: &[T]) -> Vec<T> {
        let n = self.order();
        let p = self.to_monomial(u);
        let q = self.to_monomial(v);
        let mut full = vec![T::zero(); 2 * n + 1];
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for (j, qj) in q.iter().enumerate() {
                if !qj.is_zero() {
                    full[i + j] = full[i + j].clone() + pi.clone() * qj;
                }
            }
        }
        let mut low: Vec<T> = full[..=n].to_vec();
        for (m, g) in full.iter().enumerate().skip(n + 1) {
            if g.is_zero() {
                continue;
            }
            for (l, e) in low.iter_mut().zip(self.overflow.row(m - n - 1)) {
                *l = l.clone() + g.clone() * e;
            }
        }
        self.m_inv.vec_mul(&low)
    }

    /// Product matrix `C̃(c) = M Ṽ(Mᵀc) M⁻¹`.
    pub fn product_matrix(&self, c: &[T]) -> Matrix<T> {
        let v = self.to_monomial(c);
        self.m.mul(&v_tilde(&self.overflow, &v)).mul(&self.m_inv)
    }

    pub fn eval_basis(&self, x: &T) -> Vec<T> {
        crate::basis::eval_basis(&self.m, x)
    }

    pub fn eval(&self, c: &[T], x: &T) -> T {
        eval_expansion(&self.m, c, x)
    }

    /// Value and first `k` derivatives of `cᵀQ` at `x`.
    pub fn eval_jet(&self, c: &[T], x: &T, k: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(k + 1);
        let mut cur = c.to_vec();
        for order in 0..=k {
            if order > 0 {
                cur = self.d.vec_mul(&cur);
            }
            out.push(horner(&self.m.vec_mul(&cur), x));
        }
        out
    }

    /// Basis coordinates of the monomial polynomial `p` (degree ≤ N),
    /// computed exactly and then rounded.
    pub fn polynomial(&self, p: &[BigRational]) -> Vec<T> {
        assert!(p.len() <= self.size(), "degree exceeds the basis order");
        let mut padded = p.to_vec();
        padded.resize(self.size(), BigRational::zero());
        self.set.change.m_inv.vec_mul(&padded).iter().map(|q| self.scalar(q)).collect()
    }
}

/// A row of basis coefficients in a computation type.
pub type CoeffRow<T> = Vec<T>;

/// Convenience zero test for exact matrices.
pub fn is_zero_matrix(m: &Matrix<BigRational>) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().all(Zero::is_zero))
}
