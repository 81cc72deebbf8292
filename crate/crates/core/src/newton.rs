//! Damped Newton iteration for Tau systems.
//!
//! Steps are halved until the merit of the residual strictly decreases. For
//! reduced-form blocks the merit is the sup of the residual function rather
//! than of its Bessel coefficients, whose alternating signs cancel.

use num_rational::BigRational;

use crate::basis::int;
use crate::error::{Result, TauError};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::tau::{AlgebraicSystem, TauProblem};

/// Starting point of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess<T> {
    Zero,
    /// See [`bc_interpolant_init`].
    BcInterpolant,
    /// Per-unknown coefficient vectors.
    Given(Vec<Vec<T>>),
}

#[derive(Debug, Clone)]
pub struct NewtonConfig<T> {
    /// Convergence threshold on the merit [`AlgebraicSystem::merit`].
    pub tol: T,
    pub max_iter: usize,
    /// Smallest damping factor tried by the halving line search.
    pub min_step: T,
    pub init: InitialGuess<T>,
}

impl<T: Scalar> NewtonConfig<T> {
    /// `tol = 10^(15 - precision_digits)`, 50 iterations, steps down to
    /// `2^-20`, started from the boundary interpolant.
    pub fn for_precision(precision_digits: u32, working_digits: u32) -> Self {
        let ten = BigRational::from_integer(10.into());
        let tol = num_traits::pow(ten.recip(), (precision_digits as usize).saturating_sub(15));
        let min_step = num_traits::pow(int(1) / int(2), 20);
        NewtonConfig {
            tol: T::from_rational(&tol, working_digits),
            max_iter: 50,
            min_step: T::from_rational(&min_step, working_digits),
            init: InitialGuess::BcInterpolant,
        }
    }
}

/// Outcome of [`solve`]. A run that stops early still reports its last
/// accepted state.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    /// Per-unknown coefficient vectors.
    pub state: Vec<Vec<T>>,
    pub iterations: usize,
    /// Merit of the residual at the start and after every accepted step.
    pub residual_norm_history: Vec<T>,
    /// Damping factor of every accepted step.
    pub step_history: Vec<T>,
    pub converged: bool,
    /// `log10(‖J‖∞ ‖J⁻¹‖∞)` of the final Jacobian, when it is invertible.
    pub log10_condition: Option<f64>,
    /// Which starting point was used.
    pub init: String,
}

impl<T: Scalar> SolveReport<T> {
    pub fn residual_norm(&self) -> &T {
        self.residual_norm_history.last().expect("history starts with the initial residual")
    }

    /// Turns a non-converged report into [`TauError::NotConverged`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(TauError::NotConverged {
                iterations: self.iterations,
                residual: self.residual_norm().to_f64_lossy(),
            })
        }
    }
}

/// Newton's method with a halving line search: a step is accepted once
/// `‖R‖∞` decreases, and the iteration stops without convergence if even
/// the smallest step fails to decrease it.
pub fn solve<T: Scalar>(
    problem: &TauProblem<T>,
    cfg: &NewtonConfig<T>,
) -> Result<SolveReport<T>> {
    let system = problem.system()?;
    let (z0, init) = match &cfg.init {
        InitialGuess::Zero => (vec![T::zero(); system.dimension()], "zero".to_string()),
        InitialGuess::BcInterpolant => (bc_interpolant_init(problem).concat(), "bc-interpolant".to_string()),
        InitialGuess::Given(state) => (state.concat(), "given".to_string()),
    };
    solve_system(&system, z0, cfg, init)
}

pub fn solve_system<T: Scalar>(
    system: &AlgebraicSystem<T>,
    mut z: Vec<T>,
    cfg: &NewtonConfig<T>,
    init: String,
) -> Result<SolveReport<T>> {
    let two = T::one() + T::one();
    let (mut r, mut jac) = system.residual_and_jacobian(&z)?;
    let mut norm = system.merit(&r);
    let mut history = vec![norm.clone()];
    let mut steps = Vec::new();
    let mut iterations = 0;
    let mut converged = norm <= cfg.tol;
    while !converged && iterations < cfg.max_iter {
        iterations += 1;
        let dx = jac.solve(&r).map_err(|_| TauError::SingularJacobian { iteration: iterations })?;
        let mut step = T::one();
        let accepted = loop {
            let trial: Vec<T> = z.iter().zip(&dx).map(|(zi, di)| zi.clone() - step.clone() * di).collect();
            let trial_norm = system.merit(&system.residual(&trial)?);
            if trial_norm < norm {
                break Some(trial);
            }
            step = step / &two;
            if step < cfg.min_step {
                break None;
            }
        };
        let Some(next) = accepted else { break };
        z = next;
        (r, jac) = system.residual_and_jacobian(&z)?;
        norm = system.merit(&r);
        history.push(norm.clone());
        steps.push(step);
        converged = norm <= cfg.tol;
    }
    Ok(SolveReport {
        state: system.blocks(&z),
        iterations,
        residual_norm_history: history,
        step_history: steps,
        converged,
        log10_condition: log10_condition(&jac),
        init,
    })
}

fn log10_condition<T: Scalar>(jac: &Matrix<T>) -> Option<f64> {
    let inv = jac.inverse().ok()?;
    Some(jac.norm_inf().to_f64_lossy().log10() + inv.norm_inf().to_f64_lossy().log10())
}

/// Per unknown, the basis coefficients of the lowest-degree polynomial
/// meeting all of its boundary conditions. Derivative conditions are
/// dropped when the full set has no solution; unknowns without conditions
/// start at zero.
pub fn bc_interpolant_init<T: Scalar>(problem: &TauProblem<T>) -> Vec<Vec<T>> {
    let ops = &problem.ops;
    let n = ops.size();
    (0..problem.unknowns.len())
        .map(|u| {
            let all: Vec<_> = problem.bcs.iter().filter(|bc| bc.unknown == u).collect();
            let values: Vec<_> = all.iter().copied().filter(|bc| bc.deriv_order == 0).collect();
            [all, values]
                .into_iter()
                .filter(|set| !set.is_empty() && set.len() <= n)
                .find_map(|set| {
                    let m = set.len();
                    let a = Matrix::from_fn(m, m, |i, j| {
                        let k = set[i].deriv_order;
                        if j < k {
                            return T::zero();
                        }
                        // d^k/dx^k x^j = j!/(j-k)! x^(j-k)
                        let falling = (j - k + 1..=j).fold(T::one(), |acc, f| acc * T::from_i64(f as i64, ops.digits()));
                        let mut p = T::one();
                        for _ in 0..j - k {
                            p = p * &set[i].point;
                        }
                        falling * p
                    });
                    let rhs: Vec<T> = set.iter().map(|bc| bc.value.clone()).collect();
                    a.solve(&rhs).ok().map(|mono| ops.from_monomial(&mono))
                })
                .unwrap_or_else(|| vec![T::zero(); n])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use crate::opmat::Operators;
    use crate::scalar::{MpFloat, RealScalar};
    use crate::tau::{BoundaryCondition, TermTree};
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn affine_problem_converges_in_one_step_exactly() {
        let ops = Arc::new(Operators::<BigRational>::for_spec(&BasisSpec::on(4, 0, 1).unwrap()));
        // y'' = 6x with y(0) = 0, y(1) = 2  →  y = x³ + x
        let six_x = TermTree::known(ops.polynomial(&[int(0), int(6)]));
        let mut p = TauProblem::new(ops.clone(), vec!["y".into()], vec![TermTree::unknown(0).deriv(2).minus(six_x)]);
        p.bcs.push(BoundaryCondition::new(0, int(0), 0, int(0)));
        p.bcs.push(BoundaryCondition::new(0, int(1), 0, int(2)));
        let mut cfg = NewtonConfig::<BigRational>::for_precision(60, 60);
        cfg.tol = int(0);
        cfg.init = InitialGuess::Zero;
        let rep = solve(&p, &cfg).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.state[0], ops.polynomial(&[int(0), int(1), int(0), int(1)]));
    }

    #[test]
    fn square_root_converges_quadratically() {
        // R(A) = A·A - 2 on the constant coefficient of an N = 0 basis
        let ops = Arc::new(Operators::<MpFloat>::for_spec(&BasisSpec::on(0, 0, 1).unwrap()));
        let two = TermTree::known(vec![MpFloat::from_i64(2, 80)]);
        let p = TauProblem::new(
            ops,
            vec!["a".into()],
            vec![TermTree::unknown(0).mul(TermTree::unknown(0)).minus(two)],
        );
        let mut cfg = NewtonConfig::<MpFloat>::for_precision(60, 80);
        cfg.init = InitialGuess::Given(vec![vec![MpFloat::from_i64(1, 80)]]);
        let rep = solve(&p, &cfg).unwrap();
        assert!(rep.converged);
        let h: Vec<f64> = rep.residual_norm_history.iter().map(|v| v.to_f64_lossy().log10()).collect();
        // digits at least double once in the quadratic regime
        assert!(h.windows(2).any(|w| w[1] < 2.0 * w[0] && w[0] < -2.0), "{h:?}");
        let err = (rep.state[0][0].clone() - MpFloat::from_i64(2, 80).sqrt()).abs();
        assert!(err.to_f64_lossy() < 1e-44);
    }

    fn quadratic_problem(n: usize, c: MpFloat) -> TauProblem<MpFloat> {
        let ops = Arc::new(Operators::<MpFloat>::for_spec(&BasisSpec::on(n, 0, 1).unwrap()));
        let y = TermTree::unknown(0);
        let eq = y.clone().deriv(2).minus(y.clone().mul(y).scale(c));
        let mut p = TauProblem::new(ops, vec!["y".into()], vec![eq]);
        p.bcs.push(BoundaryCondition::new(0, MpFloat::from_i64(0, 80), 0, MpFloat::from_i64(0, 80)));
        p.bcs.push(BoundaryCondition::new(0, MpFloat::from_i64(1, 80), 0, MpFloat::from_i64(1, 80)));
        p
    }

    #[test]
    fn mild_nonlinearity_converges_monotonically() {
        let p = quadratic_problem(6, MpFloat::from_rational(&q(1, 4), 80));
        let cfg = NewtonConfig::<MpFloat>::for_precision(60, p.ops.digits());
        let rep = solve(&p, &cfg).unwrap();
        assert!(rep.converged);
        assert!(rep.residual_norm_history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn damped_steps_never_increase_the_residual() {
        let p = quadratic_problem(6, MpFloat::from_i64(3, 80));
        let mut cfg = NewtonConfig::<MpFloat>::for_precision(60, p.ops.digits());
        cfg.max_iter = 10;
        let rep = solve(&p, &cfg).unwrap();
        assert!(rep.residual_norm_history.windows(2).all(|w| w[1] < w[0]));
        let one = MpFloat::from_i64(1, 80);
        assert!(rep.step_history.iter().all(|s| *s <= one && *s >= cfg.min_step));
    }

    #[test]
    fn interpolant_init_cases() {
        let ops = Arc::new(Operators::<BigRational>::for_spec(&BasisSpec::on(5, 0, 1).unwrap()));
        let mut p = TauProblem::new(ops.clone(), vec!["y".into()], vec![TermTree::unknown(0)]);
        assert_eq!(bc_interpolant_init(&p), vec![vec![int(0); 6]]);
        p.bcs.push(BoundaryCondition::new(0, int(0), 0, int(0)));
        p.bcs.push(BoundaryCondition::new(0, int(1), 0, int(1)));
        assert_eq!(bc_interpolant_init(&p), vec![ops.polynomial(&[int(0), int(1)])]);
        p.bcs.clear();
        p.bcs.push(BoundaryCondition::new(0, int(0), 0, int(1)));
        p.bcs.push(BoundaryCondition::new(0, int(0), 1, int(0)));
        assert_eq!(bc_interpolant_init(&p), vec![ops.polynomial(&[int(1)])]);
        // f(0)=1/10, f'(0)=0, f(1)=1/2, f'(1)=0: cubic Hermite interpolant
        p.bcs.clear();
        p.bcs.push(BoundaryCondition::new(0, int(0), 0, q(1, 10)));
        p.bcs.push(BoundaryCondition::new(0, int(0), 1, int(0)));
        p.bcs.push(BoundaryCondition::new(0, int(1), 0, q(1, 2)));
        p.bcs.push(BoundaryCondition::new(0, int(1), 1, int(0)));
        let c = &bc_interpolant_init(&p)[0];
        assert_eq!(ops.to_monomial(c), vec![q(1, 10), int(0), q(6, 5), q(-4, 5), int(0), int(0)]);
    }

    #[test]
    fn not_converged_is_reported() {
        let ops = Arc::new(Operators::<MpFloat>::for_spec(&BasisSpec::on(0, 0, 1).unwrap()));
        // a² + 1 = 0 has no real root
        let one = TermTree::known(vec![MpFloat::from_i64(1, 80)]);
        let p = TauProblem::new(ops, vec!["a".into()], vec![TermTree::unknown(0).mul(TermTree::unknown(0)).plus(one)]);
        let mut cfg = NewtonConfig::<MpFloat>::for_precision(60, 80);
        cfg.init = InitialGuess::Given(vec![vec![MpFloat::from_i64(3, 80)]]);
        let rep = solve(&p, &cfg).unwrap();
        assert!(!rep.converged);
        assert!(matches!(rep.ensure_converged(), Err(TauError::NotConverged { .. })));
    }
}
