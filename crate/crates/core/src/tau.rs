//! Term trees over unknown coefficient vectors and their reduction to an
//! algebraic system by the Tau method.
//!
//! Every equation is a tree whose value is a basis coefficient row `r`
//! (the residual function is `rᵀQ(x)`). Tau orthogonality
//! `∫ r(x) Q(x)ᵀ w dx = rᵀK = 0` is imposed either in the reduced form
//! `r = 0` (valid because `K` is invertible) or literally as `K r = 0`.
//! The two differ only once boundary rows are spliced in, which replace the
//! last rows of each unknown's block.
//!
//! Tau rows are scaled by the size of the basis member they belong to, so
//! that `‖R‖∞` measures the residual function rather than raw coefficients
//! (the coefficients of `Q_n` grow roughly like `2^n n!`). Row scaling leaves
//! the solution and the Newton steps unchanged.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Result, TauError};
use num_traits::Zero;

use crate::linalg::{dot, Matrix};
use crate::opmat::Operators;
use crate::scalar::Scalar;

/// Symbolic expression whose value is a coefficient row.
#[derive(Debug, Clone, PartialEq)]
pub enum TermTree<T> {
    Unknown(usize),
    Known(Vec<T>),
    Add(Vec<TermTree<T>>),
    Scale(T, Box<TermTree<T>>),
    Deriv(usize, Box<TermTree<T>>),
    Integ(usize, Box<TermTree<T>>),
    /// Projected product `uᵀC̃(v)` of the two children.
    Mul(Box<TermTree<T>>, Box<TermTree<T>>),
}

impl<T: Scalar> TermTree<T> {
    pub fn unknown(id: usize) -> Self {
        TermTree::Unknown(id)
    }

    pub fn known(c: Vec<T>) -> Self {
        TermTree::Known(c)
    }

    pub fn deriv(self, k: usize) -> Self {
        assert!(k >= 1, "derivative order must be positive");
        TermTree::Deriv(k, Box::new(self))
    }

    pub fn integ(self, k: usize) -> Self {
        assert!(k >= 1, "integral order must be positive");
        TermTree::Integ(k, Box::new(self))
    }

    pub fn scale(self, c: T) -> Self {
        TermTree::Scale(c, Box::new(self))
    }

    /// Projected product node.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: TermTree<T>) -> Self {
        TermTree::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn plus(self, rhs: TermTree<T>) -> Self {
        match self {
            TermTree::Add(mut terms) => {
                terms.push(rhs);
                TermTree::Add(terms)
            }
            other => TermTree::Add(vec![other, rhs]),
        }
    }

    pub fn minus(self, rhs: TermTree<T>) -> Self {
        self.plus(rhs.scale(-T::one()))
    }

    /// `self^k` as a left-associated chain of products.
    pub fn pow(self, k: usize) -> Self {
        assert!(k >= 1, "power must be positive");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self.clone());
        }
        acc
    }

    /// Whether any node is a product with an unknown on both sides.
    pub fn is_linear(&self) -> bool {
        match self {
            TermTree::Unknown(_) | TermTree::Known(_) => true,
            TermTree::Add(ts) => ts.iter().all(TermTree::is_linear),
            TermTree::Scale(_, t) | TermTree::Deriv(_, t) | TermTree::Integ(_, t) => t.is_linear(),
            TermTree::Mul(a, b) => {
                (a.is_constant() && b.is_linear()) || (b.is_constant() && a.is_linear())
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            TermTree::Unknown(_) => false,
            TermTree::Known(_) => true,
            TermTree::Add(ts) => ts.iter().all(TermTree::is_constant),
            TermTree::Scale(_, t) | TermTree::Deriv(_, t) | TermTree::Integ(_, t) => t.is_constant(),
            TermTree::Mul(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Coefficient row of the tree at `state`.
    pub fn flatten(&self, ops: &Operators<T>, state: &[Vec<T>]) -> Result<Vec<T>> {
        Ok(self.eval(ops, state, false)?.value)
    }

    /// Coefficient row and its sensitivities: row `k` of the returned matrix
    /// is the derivative of the coefficient row with respect to the `k`-th
    /// scalar of the concatenated state.
    pub fn flatten_with_sensitivity(
        &self,
        ops: &Operators<T>,
        state: &[Vec<T>],
    ) -> Result<(Vec<T>, Matrix<T>)> {
        let nvars = state.len() * ops.size();
        let flat = self.eval(ops, state, true)?;
        let sens = flat.sens.unwrap_or_else(|| Matrix::zeros(nvars, ops.size()));
        Ok((flat.value, sens))
    }

    fn eval(&self, ops: &Operators<T>, state: &[Vec<T>], want_sens: bool) -> Result<Flat<T>> {
        let n = ops.size();
        let nvars = state.len() * n;
        Ok(match self {
            TermTree::Unknown(id) => {
                let value = state.get(*id).ok_or(TauError::UnboundUnknown(*id))?.clone();
                if value.len() != n {
                    return Err(TauError::DimensionMismatch(format!(
                        "unknown {id} has {} coefficients, basis has {n}",
                        value.len()
                    )));
                }
                let sens = want_sens.then(|| {
                    Matrix::from_fn(nvars, n, |k, j| if k == id * n + j { T::one() } else { T::zero() })
                });
                Flat { value, sens }
            }
            TermTree::Known(c) => {
                if c.len() != n {
                    return Err(TauError::DimensionMismatch(format!(
                        "known vector has {} coefficients, basis has {n}",
                        c.len()
                    )));
                }
                Flat { value: c.clone(), sens: None }
            }
            TermTree::Add(terms) => {
                let mut value = vec![T::zero(); n];
                let mut sens: Option<Matrix<T>> = None;
                for t in terms {
                    let f = t.eval(ops, state, want_sens)?;
                    for (v, x) in value.iter_mut().zip(&f.value) {
                        *v = v.clone() + x;
                    }
                    sens = match (sens, f.sens) {
                        (Some(a), Some(b)) => Some(a.add(&b)),
                        (a, b) => a.or(b),
                    };
                }
                Flat { value, sens }
            }
            TermTree::Scale(c, t) => {
                let f = t.eval(ops, state, want_sens)?;
                Flat {
                    value: f.value.into_iter().map(|v| v * c).collect(),
                    sens: f.sens.map(|s| s.scale(c)),
                }
            }
            TermTree::Deriv(k, t) => {
                let f = t.eval(ops, state, want_sens)?;
                let mut sens = f.sens;
                if let Some(s) = sens.as_mut() {
                    for _ in 0..*k {
                        *s = s.mul(ops.d());
                    }
                }
                Flat { value: ops.deriv(&f.value, *k), sens }
            }
            TermTree::Integ(k, t) => {
                let f = t.eval(ops, state, want_sens)?;
                let mut sens = f.sens;
                if let Some(s) = sens.as_mut() {
                    for _ in 0..*k {
                        *s = s.mul(ops.i());
                    }
                }
                Flat { value: ops.integ(&f.value, *k), sens }
            }
            TermTree::Mul(a, b) => {
                let fa = a.eval(ops, state, want_sens)?;
                let fb = b.eval(ops, state, want_sens)?;
                let value = ops.product(&fa.value, &fb.value);
                // the projected product is bilinear and symmetric, so
                // d(u·v) = du·v + u·dv
                let sens = match (&fa.sens, &fb.sens) {
                    (None, None) => None,
                    _ => {
                        let mut s = Matrix::zeros(nvars, n);
                        for k in 0..nvars {
                            let mut row = vec![T::zero(); n];
                            if let Some(sa) = &fa.sens {
                                if sa.row(k).iter().any(|x| !x.is_zero()) {
                                    row = ops.product(sa.row(k), &fb.value);
                                }
                            }
                            if let Some(sb) = &fb.sens {
                                if sb.row(k).iter().any(|x| !x.is_zero()) {
                                    let extra = ops.product(&fa.value, sb.row(k));
                                    for (r, e) in row.iter_mut().zip(extra) {
                                        *r = r.clone() + e;
                                    }
                                }
                            }
                            s.row_mut(k).clone_from_slice(&row);
                        }
                        Some(s)
                    }
                };
                Flat { value, sens }
            }
        })
    }
}

struct Flat<T> {
    value: Vec<T>,
    sens: Option<Matrix<T>>,
}

/// `cᵀD^k Q(point) = value` on one unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition<T> {
    pub unknown: usize,
    pub point: T,
    pub deriv_order: usize,
    pub value: T,
}

impl<T: Scalar> BoundaryCondition<T> {
    pub fn new(unknown: usize, point: T, deriv_order: usize, value: T) -> Self {
        BoundaryCondition { unknown, point, deriv_order, value }
    }

    /// The vector `w = D^k Q(point)` with `cᵀD^kQ(point) = c·w`.
    pub fn row(&self, ops: &Operators<T>) -> Vec<T> {
        let mut w = ops.eval_basis(&self.point);
        for _ in 0..self.deriv_order {
            w = ops.d().mul_vec(&w);
        }
        w
    }
}

/// How the Tau orthogonality conditions enter the algebraic system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauForm {
    /// Rows are the residual coefficients `r` themselves.
    #[default]
    Reduced,
    /// Rows are the weighted inner products `K r = ⟨r, Q⟩_w`.
    Weighted,
}

/// Pointwise residual of the differential equation, given the jets
/// `jets[output][k]` (value and derivatives) of the problem's outputs.
#[derive(Clone)]
pub struct PointwiseResidual<T>(pub Arc<PointwiseFn<T>>);

/// `(x, jets) ↦ residual per equation`.
pub type PointwiseFn<T> = dyn Fn(&T, &[Vec<T>]) -> Vec<T> + Send + Sync;

impl<T> fmt::Debug for PointwiseResidual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PointwiseResidual(..)")
    }
}

/// A named function of the unknowns reported by the solver, such as `y`
/// when the unknown represents `y''`.
#[derive(Debug, Clone, PartialEq)]
pub struct Output<T> {
    pub name: String,
    pub tree: TermTree<T>,
}

/// A differential problem in Tau form. Equation `i` owns the block of rows
/// of unknown `i`, whose last rows are replaced by that unknown's boundary
/// conditions.
#[derive(Debug, Clone)]
pub struct TauProblem<T> {
    pub ops: Arc<Operators<T>>,
    pub unknowns: Vec<String>,
    pub equations: Vec<TermTree<T>>,
    pub bcs: Vec<BoundaryCondition<T>>,
    pub params: BTreeMap<String, T>,
    pub form: TauForm,
    pub outputs: Vec<Output<T>>,
    /// Highest derivative of each output the pointwise residual needs.
    pub jet_order: usize,
    pub pointwise: Option<PointwiseResidual<T>>,
}

impl<T: Scalar> TauProblem<T> {
    pub fn new(ops: Arc<Operators<T>>, unknowns: Vec<String>, equations: Vec<TermTree<T>>) -> Self {
        let outputs = unknowns
            .iter()
            .enumerate()
            .map(|(i, name)| Output { name: name.clone(), tree: TermTree::Unknown(i) })
            .collect();
        TauProblem {
            ops,
            unknowns,
            equations,
            bcs: Vec::new(),
            params: BTreeMap::new(),
            form: TauForm::Reduced,
            outputs,
            jet_order: 0,
            pointwise: None,
        }
    }

    pub fn size(&self) -> usize {
        self.ops.size()
    }

    pub fn dimension(&self) -> usize {
        self.unknowns.len() * self.size()
    }

    /// Tau rows with boundary conditions spliced in.
    pub fn system(&self) -> Result<AlgebraicSystem<T>> {
        apply_bcs(tau_project(self)?, &self.bcs)
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|o| o.name == name)
    }

    /// Coefficients of every output at `state`.
    pub fn output_coeffs(&self, state: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        self.outputs.iter().map(|o| o.tree.flatten(&self.ops, state)).collect()
    }

    /// Value and derivatives up to `k` of one output at `x`.
    pub fn output_jet(&self, state: &[Vec<T>], output: usize, x: &T, k: usize) -> Result<Vec<T>> {
        let c = self.outputs[output].tree.flatten(&self.ops, state)?;
        Ok(self.ops.eval_jet(&c, x, k))
    }

    /// Residual of the differential equations at `x`, obtained by
    /// substituting the outputs (derivatives taken from their expansions)
    /// into the pointwise form. Falls back to [`Self::projected_residual_at`]
    /// when the problem has no pointwise form.
    pub fn residual_at(&self, state: &[Vec<T>], x: &T) -> Result<Vec<T>> {
        match &self.pointwise {
            Some(p) => {
                let jets = self
                    .output_coeffs(state)?
                    .iter()
                    .map(|c| self.ops.eval_jet(c, x, self.jet_order))
                    .collect::<Vec<_>>();
                Ok((p.0)(x, &jets))
            }
            None => self.projected_residual_at(state, x),
        }
    }

    /// `rᵀQ(x)` for each flattened equation.
    pub fn projected_residual_at(&self, state: &[Vec<T>], x: &T) -> Result<Vec<T>> {
        self.equations
            .iter()
            .map(|e| Ok(self.ops.eval(&e.flatten(&self.ops, state)?, x)))
            .collect()
    }

    /// Splits a concatenated state vector into per-unknown blocks.
    pub fn split(&self, z: &[T]) -> Vec<Vec<T>> {
        z.chunks(self.size()).map(<[T]>::to_vec).collect()
    }
}

/// Residual map `R(z)` with analytic Jacobian. Rows are grouped in blocks
/// of `N + 1` per unknown.
#[derive(Debug, Clone)]
pub struct AlgebraicSystem<T> {
    ops: Arc<Operators<T>>,
    equations: Vec<TermTree<T>>,
    form: TauForm,
    /// Per block: `(row weights, value)` replacing the block's last rows.
    bc_rows: Vec<Vec<(Vec<T>, T)>>,
    /// Multiplier of each Tau row, see [`row_scales`].
    scales: Vec<T>,
    /// Reduced form only: `Q_n(x_k) / s_n` on an equispaced grid, mapping
    /// scaled rows back to residual function values.
    sampler: Option<Matrix<T>>,
}

/// Row multipliers of the Tau conditions. With `s_n = Σ_m |Y[n][m]|`, a
/// bound for `|Q_n|` on `[a, b]`, reduced rows `r_n` are multiplied by
/// `s_n` and weighted rows `⟨r, Q_n⟩` divided by it.
pub fn row_scales<T: Scalar>(ops: &Operators<T>, form: TauForm) -> Vec<T> {
    let y = &ops.set().change.y_mat;
    (0..y.rows())
        .map(|n| {
            let s = y.row(n).iter().fold(num_rational::BigRational::zero(), |acc, v| acc + num_traits::Signed::abs(v));
            match form {
                TauForm::Reduced => ops.scalar(&s),
                TauForm::Weighted => ops.scalar(&num_traits::Inv::inv(s)),
            }
        })
        .collect()
}

/// Builds the unconstrained Tau system of a problem.
pub fn tau_project<T: Scalar>(problem: &TauProblem<T>) -> Result<AlgebraicSystem<T>> {
    if problem.equations.len() != problem.unknowns.len() {
        return Err(TauError::DimensionMismatch(format!(
            "{} equations for {} unknowns",
            problem.equations.len(),
            problem.unknowns.len()
        )));
    }
    Ok(AlgebraicSystem {
        ops: problem.ops.clone(),
        equations: problem.equations.clone(),
        form: problem.form,
        bc_rows: vec![Vec::new(); problem.unknowns.len()],
        scales: row_scales(&problem.ops, problem.form),
        sampler: match problem.form {
            TauForm::Reduced => Some(residual_sampler(&problem.ops)),
            TauForm::Weighted => None,
        },
    })
}

/// `2N + 3` equispaced points including both ends; rows are `Q_n(x_k) / s_n`.
fn residual_sampler<T: Scalar>(ops: &Operators<T>) -> Matrix<T> {
    let n = ops.size();
    let scales = row_scales(ops, TauForm::Reduced);
    let spec = &ops.set().spec;
    let points = 2 * n + 1;
    let mut out = Matrix::zeros(points, n);
    for k in 0..points {
        let t = num_rational::BigRational::new(k.into(), (points - 1).into());
        let x = ops.scalar(&(spec.a() + (spec.b() - spec.a()) * t));
        for (e, (q, s)) in out.row_mut(k).iter_mut().zip(ops.eval_basis(&x).iter().zip(&scales)) {
            *e = q.clone() / s;
        }
    }
    out
}

/// Replaces the last Tau rows of each unknown's block by its boundary
/// conditions, in the order given.
pub fn apply_bcs<T: Scalar>(
    mut system: AlgebraicSystem<T>,
    bcs: &[BoundaryCondition<T>],
) -> Result<AlgebraicSystem<T>> {
    let n = system.ops.size();
    for bc in bcs {
        if bc.unknown >= system.bc_rows.len() {
            return Err(TauError::UnboundUnknown(bc.unknown));
        }
        system.bc_rows[bc.unknown].push((bc.row(&system.ops), bc.value.clone()));
    }
    for (unknown, rows) in system.bc_rows.iter().enumerate() {
        if rows.len() > n {
            return Err(TauError::TooManyBCs { unknown, count: rows.len(), rows: n });
        }
    }
    Ok(system)
}

impl<T: Scalar> AlgebraicSystem<T> {
    pub fn dimension(&self) -> usize {
        self.equations.len() * self.ops.size()
    }

    pub fn ops(&self) -> &Arc<Operators<T>> {
        &self.ops
    }

    pub fn blocks(&self, z: &[T]) -> Vec<Vec<T>> {
        z.chunks(self.ops.size()).map(<[T]>::to_vec).collect()
    }

    pub fn residual(&self, z: &[T]) -> Result<Vec<T>> {
        self.check(z)?;
        let state = self.blocks(z);
        let mut out = Vec::with_capacity(self.dimension());
        for (i, eq) in self.equations.iter().enumerate() {
            let r = eq.flatten(&self.ops, &state)?;
            out.extend(self.finish_block(i, r, &state[i]));
        }
        Ok(out)
    }

    pub fn residual_and_jacobian(&self, z: &[T]) -> Result<(Vec<T>, Matrix<T>)> {
        self.check(z)?;
        let n = self.ops.size();
        let dim = self.dimension();
        let state = self.blocks(z);
        let mut out = Vec::with_capacity(dim);
        let mut jac = Matrix::zeros(dim, dim);
        for (i, eq) in self.equations.iter().enumerate() {
            let (r, sens) = eq.flatten_with_sensitivity(&self.ops, &state)?;
            out.extend(self.finish_block(i, r, &state[i]));
            // sens is (variables × rows); the block Jacobian is its transpose
            let block = match self.form {
                TauForm::Reduced => sens.transpose(),
                TauForm::Weighted => self.ops.k().mul(&sens.transpose()),
            };
            let nb = self.bc_rows[i].len();
            for row in 0..n - nb {
                let scale = &self.scales[row];
                for (j, v) in jac.row_mut(i * n + row).iter_mut().zip(block.row(row)) {
                    *j = v.clone() * scale;
                }
            }
            for (t, (w, _)) in self.bc_rows[i].iter().enumerate() {
                let row = jac.row_mut(i * n + n - nb + t);
                for v in row.iter_mut() {
                    *v = T::zero();
                }
                row[i * n..(i + 1) * n].clone_from_slice(w);
            }
        }
        Ok((out, jac))
    }

    /// Newton merit of a residual vector. Reduced blocks contribute the sup
    /// of their residual function on a grid (the Tau rows replaced by BCs
    /// dropped); weighted and boundary rows contribute their absolute values.
    pub fn merit(&self, r: &[T]) -> T {
        let n = self.ops.size();
        let mut best = T::zero();
        let mut bump = |v: T| {
            let v = v.abs();
            if v > best {
                best = v;
            }
        };
        for (i, block) in r.chunks(n).enumerate() {
            let kept = n - self.bc_rows[i].len();
            match &self.sampler {
                Some(sampler) => {
                    for k in 0..sampler.rows() {
                        bump(dot(&sampler.row(k)[..kept], &block[..kept]));
                    }
                }
                None => block[..kept].iter().cloned().for_each(&mut bump),
            }
            block[kept..].iter().cloned().for_each(&mut bump);
        }
        best
    }

    fn finish_block(&self, i: usize, r: Vec<T>, coeffs: &[T]) -> Vec<T> {
        let mut r = match self.form {
            TauForm::Reduced => r,
            TauForm::Weighted => self.ops.k().mul_vec(&r),
        };
        for (v, scale) in r.iter_mut().zip(&self.scales) {
            *v = v.clone() * scale;
        }
        let n = r.len();
        let nb = self.bc_rows[i].len();
        for (t, (w, value)) in self.bc_rows[i].iter().enumerate() {
            r[n - nb + t] = dot(coeffs, w) - value;
        }
        r
    }

    fn check(&self, z: &[T]) -> Result<()> {
        if z.len() != self.dimension() {
            return Err(TauError::DimensionMismatch(format!(
                "state has {} entries, system has {}",
                z.len(),
                self.dimension()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{int, BasisSpec};
    use num_rational::BigRational;

    fn ops(n: usize, a: i64, b: i64) -> Arc<Operators<BigRational>> {
        Arc::new(Operators::for_spec(&BasisSpec::on(n, a, b).unwrap()))
    }

    #[test]
    fn unknown_flattens_to_its_state() {
        let o = ops(3, 0, 1);
        let c: Vec<_> = (1..=4).map(int).collect();
        assert_eq!(TermTree::unknown(0).flatten(&o, std::slice::from_ref(&c)).unwrap(), c);
        assert_eq!(
            TermTree::<BigRational>::unknown(1).flatten(&o, &[c]),
            Err(TauError::UnboundUnknown(1))
        );
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let o = ops(2, 0, 1);
        let one = TermTree::known(vec![int(1), int(0), int(2)]);
        assert_eq!(one.deriv(1).flatten(&o, &[]).unwrap(), vec![int(0); 3]);
    }

    #[test]
    fn product_of_x_with_itself() {
        let o = ops(3, 0, 1);
        let x = TermTree::known(o.polynomial(&[int(0), int(1)]));
        let sq = x.clone().mul(x).flatten(&o, &[]).unwrap();
        assert_eq!(sq, o.polynomial(&[int(0), int(0), int(1)]));
    }

    #[test]
    fn linear_jacobian_is_the_transposed_operator() {
        let o = ops(4, 0, 1);
        let p = TauProblem::new(o.clone(), vec!["y".into()], vec![TermTree::unknown(0).deriv(2)]);
        let sys = p.system().unwrap();
        let z: Vec<_> = (0..5).map(|k| int(k * k - 3)).collect();
        let (r, j) = sys.residual_and_jacobian(&z).unwrap();
        let s = row_scales(&o, TauForm::Reduced);
        let d2t = o.d().mul(o.d()).transpose();
        assert_eq!(j, Matrix::from_fn(5, 5, |a, b| d2t[(a, b)].clone() * &s[a]));
        let expect: Vec<_> = o.deriv(&z, 2).into_iter().zip(&s).map(|(v, s)| v * s).collect();
        assert_eq!(r, expect);
    }

    #[test]
    fn boundary_rows_replace_the_last_rows() {
        let o = ops(2, 0, 1);
        let mut p = TauProblem::new(o.clone(), vec!["y".into()], vec![TermTree::unknown(0)]);
        p.bcs.push(BoundaryCondition::new(0, int(0), 0, int(5)));
        let sys = p.system().unwrap();
        let z = vec![int(1), int(2), int(3)];
        let r = sys.residual(&z).unwrap();
        let s = row_scales(&o, TauForm::Reduced);
        assert_eq!(r, vec![int(1) * &s[0], int(2) * &s[1], int(1) - int(5)]);
        assert_eq!(p.bcs[0].row(&o), vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn row_scales_bound_the_basis() {
        let o = ops(4, 0, 1);
        let s = row_scales(&o, TauForm::Reduced);
        // Q_0 = 1 - x²/4 + x⁴/64, Q_4 = x⁴/384
        assert_eq!(s[0], int(1) + BigRational::new(1.into(), 4.into()) + BigRational::new(1.into(), 64.into()));
        assert_eq!(s[4], BigRational::new(1.into(), 384.into()));
        let w = row_scales(&o, TauForm::Weighted);
        assert!(w.iter().zip(&s).all(|(a, b)| a.clone() * b == int(1)));
    }

    #[test]
    fn too_many_bcs() {
        let o = ops(1, 0, 1);
        let mut p = TauProblem::new(o, vec!["y".into()], vec![TermTree::unknown(0)]);
        for k in 0..3 {
            p.bcs.push(BoundaryCondition::new(0, int(0), k, int(0)));
        }
        assert!(matches!(p.system(), Err(TauError::TooManyBCs { count: 3, .. })));
    }

    #[test]
    fn mismatched_equation_count() {
        let o = ops(1, 0, 1);
        let p = TauProblem::new(o, vec!["y".into(), "z".into()], vec![TermTree::unknown(0)]);
        assert!(matches!(p.system(), Err(TauError::DimensionMismatch(_))));
    }

    #[test]
    fn bilinear_sensitivity_matches_exact_difference() {
        let o = ops(3, 1, 2);
        let tree = TermTree::unknown(0).mul(TermTree::unknown(0).deriv(1));
        let z: Vec<_> = (0..4).map(|k| BigRational::new((k + 1).into(), 3.into())).collect();
        let (v, s) = tree.flatten_with_sensitivity(&o, std::slice::from_ref(&z)).unwrap();
        // f(z + t e_k) is quadratic in t: f(z+e) - f(z-e) = 2 ∂f
        for k in 0..4 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] = zp[k].clone() + int(1);
            zm[k] = zm[k].clone() - int(1);
            let fp = tree.flatten(&o, &[zp]).unwrap();
            let fm = tree.flatten(&o, &[zm]).unwrap();
            for j in 0..4 {
                assert_eq!((fp[j].clone() - &fm[j]) / int(2), s[(k, j)]);
            }
        }
        assert_eq!(v, tree.flatten(&o, &[z]).unwrap());
    }

    #[test]
    fn linearity_classification() {
        let x = TermTree::known(vec![int(0), int(1)]);
        let u = TermTree::<BigRational>::unknown(0);
        assert!(u.clone().mul(x.clone()).deriv(1).is_linear());
        assert!(!u.clone().mul(u.clone()).is_linear());
        assert!(x.clone().mul(x).is_constant());
        assert_eq!(u.clone().pow(3), u.clone().mul(u.clone()).mul(u));
    }
}
