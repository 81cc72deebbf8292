//! The five benchmark problems as Tau problem builders, and the published
//! values they are compared against.
//!
//! | id                    | unknown    | interval | equation                                   |
//! |-----------------------|------------|----------|--------------------------------------------|
//! | `squeezing-flow`      | `f`, `θ`   | `[0, 1]` | squeezing flow with viscous dissipation    |
//! | `lane-emden-type`     | `y''`      | `[0, 3]` | `y'' + (2/x) y' - 2(2x² + 3) y = 0`         |
//! | `abel`                | `y'`       | `[0, 1]` | `y' = sin(x) y³ - x y² + x² y - x³`         |
//! | `lane-emden-standard` | `y''`      | `[0, 2]` | `y'' + (2/x) y' + y² = 0`                   |
//! | `troesch`             | `y`        | `[0, 1]` | `y'' = γ sinh(γ y)`                         |
//!
//! When the unknown is a derivative of `y`, the lower derivatives are
//! recovered with the integration matrix so the initial conditions hold by
//! construction. Equations with a `1/x` coefficient are multiplied by `x`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::approx::{project_function, project_polynomial};
use crate::basis::{int, BasisSpec};
use crate::error::{Result, TauError};
use crate::opmat::{OpMatrixSet, Operators};
use crate::scalar::{parse_rational, RealScalar};
use crate::tau::{BoundaryCondition, Output, PointwiseResidual, TauForm, TauProblem, TermTree};

/// Identifier of a built-in problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemId {
    SqueezingFlow,
    LaneEmdenType,
    Abel,
    LaneEmdenStandard,
    Troesch,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::SqueezingFlow,
        ProblemId::LaneEmdenType,
        ProblemId::Abel,
        ProblemId::LaneEmdenStandard,
        ProblemId::Troesch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::SqueezingFlow => "squeezing-flow",
            ProblemId::LaneEmdenType => "lane-emden-type",
            ProblemId::Abel => "abel",
            ProblemId::LaneEmdenStandard => "lane-emden-standard",
            ProblemId::Troesch => "troesch",
        }
    }

    /// Default interval `[a, b]`.
    pub fn interval(self) -> (i64, i64) {
        match self {
            ProblemId::LaneEmdenType => (0, 3),
            ProblemId::LaneEmdenStandard => (0, 2),
            _ => (0, 1),
        }
    }

    /// Basis order used for the published tables.
    pub fn default_order(self) -> usize {
        match self {
            ProblemId::SqueezingFlow => 15,
            ProblemId::LaneEmdenType => 40,
            ProblemId::Abel => 10,
            ProblemId::LaneEmdenStandard => 12,
            ProblemId::Troesch => 10,
        }
    }

    /// Smallest order the formulation supports.
    pub fn min_order(self) -> usize {
        match self {
            ProblemId::SqueezingFlow => 5,
            ProblemId::Abel => 3,
            _ => 2,
        }
    }

    /// Whether the right endpoint carries a boundary condition, which pins
    /// it to 1.
    fn fixed_right_end(self) -> bool {
        matches!(self, ProblemId::SqueezingFlow | ProblemId::Troesch)
    }

    /// Names accepted by [`build_problem`].
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ProblemId::SqueezingFlow => &["A", "S", "G", "Pr", "Ec", "delta"],
            ProblemId::Troesch => &["gamma", "sinh_order"],
            _ => &[],
        }
    }

    /// Basis of the given order on the problem's default interval.
    pub fn spec(self, order: usize, precision_digits: u32) -> Result<BasisSpec> {
        let (a, b) = self.interval();
        BasisSpec::new(order, int(a), int(b), precision_digits)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = TauError;
    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| TauError::InvalidSpec(format!("unknown problem `{s}`")))
    }
}

fn check_spec(id: ProblemId, spec: &BasisSpec) -> Result<()> {
    if spec.order() < id.min_order() {
        return Err(TauError::InvalidSpec(format!(
            "{id} needs N ≥ {}, got {}",
            id.min_order(),
            spec.order()
        )));
    }
    if !spec.a().is_zero() {
        return Err(TauError::InvalidSpec(format!("{id} is posed with a = 0, got {}", spec.a())));
    }
    if id.fixed_right_end() && !spec.b().is_one() {
        return Err(TauError::InvalidSpec(format!("{id} is posed with b = 1, got {}", spec.b())));
    }
    Ok(())
}

fn operators<T: RealScalar>(spec: &BasisSpec) -> Arc<Operators<T>> {
    Arc::new(Operators::new(OpMatrixSet::shared(spec)))
}

/// Known expansion of a monomial polynomial of any degree (projected when
/// the degree exceeds `N`).
/// Coefficients of a polynomial coefficient function; exact when it fits
/// the basis, projected otherwise.
fn known<T: RealScalar>(ops: &Operators<T>, mono: &[BigRational]) -> TermTree<T> {
    if mono.len() <= ops.size() {
        return TermTree::known(ops.polynomial(mono));
    }
    let c = project_polynomial(ops.set(), mono).coeffs;
    TermTree::known(c.iter().map(|q| ops.scalar(q)).collect())
}

fn mono(coeffs: &[i64]) -> Vec<BigRational> {
    coeffs.iter().map(|&c| int(c)).collect()
}

fn pointwise<T, F>(f: F) -> Option<PointwiseResidual<T>>
where
    F: Fn(&T, &[Vec<T>]) -> Vec<T> + Send + Sync + 'static,
{
    Some(PointwiseResidual(Arc::new(f)))
}

/// Parameters of the squeezing flow. `g` is the magnetic parameter, printed
/// as `M` in the tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingFlowParams {
    pub a: BigRational,
    pub s: BigRational,
    pub g: BigRational,
    pub pr: BigRational,
    pub ec: BigRational,
    pub delta: BigRational,
}

impl Default for SqueezingFlowParams {
    /// `A = 0.1, S = 0.1, G = 0.2, Pr = 0.3, Ec = 0.2, δ = 0.1`.
    fn default() -> Self {
        let tenth = |k: i64| BigRational::new(k.into(), 10.into());
        SqueezingFlowParams { a: tenth(1), s: tenth(1), g: tenth(2), pr: tenth(3), ec: tenth(2), delta: tenth(1) }
    }
}

impl SqueezingFlowParams {
    pub fn validate(&self) -> Result<()> {
        if self.pr.is_negative() || self.ec.is_negative() {
            return Err(TauError::InvalidSpec("Pr and Ec must be non-negative".into()));
        }
        Ok(())
    }

    /// Sets a parameter by its name in [`ProblemId::param_names`] (`M` is
    /// accepted for `G`).
    pub fn set(&mut self, name: &str, value: BigRational) -> Result<()> {
        let slot = match name {
            "A" => &mut self.a,
            "S" => &mut self.s,
            "G" | "M" => &mut self.g,
            "Pr" => &mut self.pr,
            "Ec" => &mut self.ec,
            "delta" => &mut self.delta,
            _ => return Err(TauError::InvalidSpec(format!("squeezing-flow has no parameter `{name}`"))),
        };
        *slot = value;
        Ok(())
    }
}

/// Unknowns `f` and `θ` on `[0, 1]`:
///
/// `f'''' - S(x f''' + 3f'' - 2 f f''') - G² f'' = 0`,
/// `θ'' + S Pr (2 f θ' - x θ') + Pr Ec (f''² + 12 δ² f'²) = 0`,
///
/// with `f(0) = A, f'(0) = 0, f(1) = 1/2, f'(1) = 0, θ(0) = 1, θ(1) = 0`.
/// The Tau conditions are imposed in weighted form.
pub fn build_squeezing_flow<T: RealScalar>(spec: &BasisSpec, p: &SqueezingFlowParams) -> Result<TauProblem<T>> {
    check_spec(ProblemId::SqueezingFlow, spec)?;
    p.validate()?;
    let ops = operators::<T>(spec);
    let c = |q: &BigRational| ops.scalar(q);
    let g2 = &p.g * &p.g;
    let f = || TermTree::<T>::unknown(0);
    let th = || TermTree::<T>::unknown(1);
    let x = known(&ops, &mono(&[0, 1]));

    let f_eq = f()
        .deriv(4)
        .minus(
            x.clone()
                .mul(f().deriv(3))
                .plus(f().deriv(2).scale(ops.int(3)))
                .minus(f().mul(f().deriv(3)).scale(ops.int(2)))
                .scale(c(&p.s)),
        )
        .minus(f().deriv(2).scale(c(&g2)));
    let th_eq = th()
        .deriv(2)
        .plus(f().mul(th().deriv(1)).scale(ops.int(2)).minus(x.mul(th().deriv(1))).scale(c(&(&p.s * &p.pr))))
        .plus(
            f().deriv(2)
                .mul(f().deriv(2))
                .plus(f().deriv(1).mul(f().deriv(1)).scale(c(&(int(12) * &p.delta * &p.delta))))
                .scale(c(&(&p.pr * &p.ec))),
        );

    let mut problem = TauProblem::new(ops.clone(), vec!["f".into(), "theta".into()], vec![f_eq, th_eq]);
    problem.form = TauForm::Weighted;
    let (zero, one) = (ops.int(0), ops.int(1));
    let half = c(&BigRational::new(1.into(), 2.into()));
    problem.bcs = vec![
        BoundaryCondition::new(0, zero.clone(), 0, c(&p.a)),
        BoundaryCondition::new(0, zero.clone(), 1, zero.clone()),
        BoundaryCondition::new(0, one.clone(), 0, half),
        BoundaryCondition::new(0, one.clone(), 1, zero.clone()),
        BoundaryCondition::new(1, zero.clone(), 0, one.clone()),
        BoundaryCondition::new(1, one, 0, zero),
    ];
    for (name, v) in [("A", &p.a), ("S", &p.s), ("G", &p.g), ("Pr", &p.pr), ("Ec", &p.ec), ("delta", &p.delta)] {
        problem.params.insert(name.into(), c(v));
    }
    problem.jet_order = 4;
    let (s, g2, pr, ec) = (c(&p.s), c(&g2), c(&p.pr), c(&p.ec));
    let d2 = c(&(int(12) * &p.delta * &p.delta));
    problem.pointwise = pointwise(move |x: &T, jets: &[Vec<T>]| {
        let (f, t) = (&jets[0], &jets[1]);
        let two = T::one() + T::one();
        let three = two.clone() + T::one();
        let rf = f[4].clone()
            - s.clone() * (x.clone() * &f[3] + three * &f[2] - two.clone() * &f[0] * &f[3])
            - g2.clone() * &f[2];
        let rt = t[2].clone()
            + s.clone() * &pr * (two * &f[0] * &t[1] - x.clone() * &t[1])
            + pr.clone() * &ec * (f[2].clone() * &f[2] + d2.clone() * &f[1] * &f[1]);
        vec![rf, rt]
    });
    Ok(problem)
}

/// Scaled Nusselt number `-θ'(1)` of a solved squeezing flow.
pub fn nusselt<T: RealScalar>(problem: &TauProblem<T>, state: &[Vec<T>]) -> T {
    let ops = &problem.ops;
    -ops.eval(&ops.deriv(&state[1], 1), &ops.int(1))
}

/// Unknown `A ≈ y''` on `[0, 3]` with `y' = AᵀI Q`, `y = (AᵀI² + V)ᵀQ`
/// for `y(0) = 1, y'(0) = 0`, and residual `x y'' + 2y' - 2(2x³ + 3x) y`.
/// The exact solution is `exp(x²)`.
pub fn build_lane_emden_type<T: RealScalar>(spec: &BasisSpec) -> Result<TauProblem<T>> {
    check_spec(ProblemId::LaneEmdenType, spec)?;
    let ops = operators::<T>(spec);
    let a = || TermTree::<T>::unknown(0);
    let y = a().integ(2).plus(known(&ops, &mono(&[1])));
    let eq = a()
        .mul(known(&ops, &mono(&[0, 1])))
        .plus(a().integ(1).scale(ops.int(2)))
        .minus(y.clone().mul(known(&ops, &mono(&[0, 3, 0, 2]))).scale(ops.int(2)));
    let mut problem = TauProblem::new(ops, vec!["y''".into()], vec![eq]);
    problem.outputs = vec![Output { name: "y".into(), tree: y }];
    problem.jet_order = 2;
    problem.pointwise = pointwise(|x: &T, jets: &[Vec<T>]| {
        let y = &jets[0];
        let two = T::one() + T::one();
        let three = two.clone() + T::one();
        let z = two.clone() * x * x * x + three * x;
        vec![x.clone() * &y[2] + two.clone() * &y[1] - two * z * &y[0]]
    });
    Ok(problem)
}

/// Unknown `A ≈ y'` on `[0, 1]` with `y = AᵀI Q` for `y(0) = 0`, and
/// residual `y' - sin(x) y³ + x y² - x² y + x³`, `sin` taken from its
/// projection.
pub fn build_abel<T: RealScalar>(spec: &BasisSpec) -> Result<TauProblem<T>> {
    check_spec(ProblemId::Abel, spec)?;
    let ops = operators::<T>(spec);
    let sin = project_function::<T, _>(ops.set(), |x| x.sin(), ops.digits())?;
    let a = || TermTree::<T>::unknown(0);
    let y = || a().integ(1);
    let eq = a()
        .minus(y().mul(y()).mul(y()).mul(TermTree::known(sin.coeffs)))
        .plus(y().mul(y()).mul(known(&ops, &mono(&[0, 1]))))
        .minus(y().mul(known(&ops, &mono(&[0, 0, 1]))))
        .plus(known(&ops, &mono(&[0, 0, 0, 1])));
    let mut problem = TauProblem::new(ops, vec!["y'".into()], vec![eq]);
    problem.outputs = vec![Output { name: "y".into(), tree: y() }];
    problem.jet_order = 1;
    problem.pointwise = pointwise(|x: &T, jets: &[Vec<T>]| {
        let y = &jets[0];
        let rhs = x.sin() * &y[0] * &y[0] * &y[0] - x.clone() * &y[0] * &y[0] + x.clone() * x * &y[0]
            - x.clone() * x * x;
        vec![y[1].clone() - rhs]
    });
    Ok(problem)
}

/// Unknown `A ≈ y''` on `[0, 2]` with `y(0) = 1, y'(0) = 0` embedded as for
/// [`build_lane_emden_type`], and residual `x y'' + 2y' + x y²`.
pub fn build_lane_emden_standard<T: RealScalar>(spec: &BasisSpec) -> Result<TauProblem<T>> {
    check_spec(ProblemId::LaneEmdenStandard, spec)?;
    let ops = operators::<T>(spec);
    let a = || TermTree::<T>::unknown(0);
    let y = a().integ(2).plus(known(&ops, &mono(&[1])));
    let eq = a()
        .mul(known(&ops, &mono(&[0, 1])))
        .plus(a().integ(1).scale(ops.int(2)))
        .plus(y.clone().mul(y.clone()).mul(known(&ops, &mono(&[0, 1]))));
    let mut problem = TauProblem::new(ops, vec!["y''".into()], vec![eq]);
    problem.outputs = vec![Output { name: "y".into(), tree: y }];
    problem.jet_order = 2;
    problem.pointwise = pointwise(|x: &T, jets: &[Vec<T>]| {
        let y = &jets[0];
        let two = T::one() + T::one();
        vec![x.clone() * &y[2] + two * &y[1] + x.clone() * &y[0] * &y[0]]
    });
    Ok(problem)
}

/// Unknown `A ≈ y` on `[0, 1]` with `y(0) = 0, y(1) = 1` and residual
/// `y'' - γ Σ γ^k y^k / k!` over odd `k ≤ sinh_order`.
pub fn build_troesch<T: RealScalar>(spec: &BasisSpec, gamma: &BigRational, sinh_order: usize) -> Result<TauProblem<T>> {
    check_spec(ProblemId::Troesch, spec)?;
    if sinh_order.is_multiple_of(2) {
        return Err(TauError::InvalidSpec(format!("sinh_order must be odd, got {sinh_order}")));
    }
    let ops = operators::<T>(spec);
    let a = || TermTree::<T>::unknown(0);
    let mut eq = a().deriv(2);
    let mut factorial = BigRational::one();
    for k in 1..=sinh_order {
        factorial *= int(k as i64);
        if k % 2 == 1 {
            let coeff = num_traits::pow(gamma.clone(), k + 1) / &factorial;
            eq = eq.minus(a().pow(k).scale(ops.scalar(&coeff)));
        }
    }
    let mut problem = TauProblem::new(ops.clone(), vec!["y".into()], vec![eq]);
    problem.bcs = vec![
        BoundaryCondition::new(0, ops.int(0), 0, ops.int(0)),
        BoundaryCondition::new(0, ops.int(1), 0, ops.int(1)),
    ];
    let g = ops.scalar(gamma);
    problem.params.insert("gamma".into(), g.clone());
    problem.params.insert("sinh_order".into(), ops.int(sinh_order as i64));
    problem.jet_order = 2;
    problem.pointwise = pointwise(move |_x: &T, jets: &[Vec<T>]| {
        let y = &jets[0];
        vec![y[2].clone() - g.clone() * (g.clone() * &y[0]).sinh()]
    });
    Ok(problem)
}

/// Builds any problem from textual parameter overrides (`name → value`).
pub fn build_problem<T: RealScalar>(
    id: ProblemId,
    spec: &BasisSpec,
    params: &BTreeMap<String, String>,
) -> Result<TauProblem<T>> {
    let value = |name: &str, text: &str| {
        parse_rational(text).ok_or_else(|| TauError::InvalidSpec(format!("parameter {name}: `{text}` is not a number")))
    };
    let reject = |name: &str| Err(TauError::InvalidSpec(format!("{id} has no parameter `{name}`")));
    match id {
        ProblemId::SqueezingFlow => {
            let mut p = SqueezingFlowParams::default();
            for (name, text) in params {
                p.set(name, value(name, text)?)?;
            }
            build_squeezing_flow(spec, &p)
        }
        ProblemId::Troesch => {
            let mut gamma = BigRational::new(1.into(), 2.into());
            let mut order = 5;
            for (name, text) in params {
                match name.as_str() {
                    "gamma" => gamma = value(name, text)?,
                    "sinh_order" => {
                        order = text.parse().map_err(|_| {
                            TauError::InvalidSpec(format!("sinh_order: `{text}` is not a positive integer"))
                        })?
                    }
                    _ => return reject(name),
                }
            }
            build_troesch(spec, &gamma, order)
        }
        _ => {
            if let Some(name) = params.keys().next() {
                return reject(name);
            }
            match id {
                ProblemId::LaneEmdenType => build_lane_emden_type(spec),
                ProblemId::Abel => build_abel(spec),
                _ => build_lane_emden_standard(spec),
            }
        }
    }
}

/// Origin of a published value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// The Bessel Tau results printed alongside the comparisons.
    Present,
    Exact,
    Vim,
    Horedt,
    Bfc,
    Gfcfs,
    Fcfs,
    Hfc,
    Alias,
    Feng,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Present => "present",
            Source::Exact => "exact",
            Source::Vim => "VIM",
            Source::Horedt => "Horedt",
            Source::Bfc => "BFC",
            Source::Gfcfs => "GFCFs",
            Source::Fcfs => "FCFs",
            Source::Hfc => "HFC",
            Source::Alias => "Alias",
            Source::Feng => "Feng",
        }
    }
}

/// What a reference value measures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Quantity {
    /// `deriv`-th derivative of a named output.
    Value { output: String, deriv: usize },
    /// Absolute pointwise residual of an equation.
    Residual { equation: usize },
    Nusselt,
}

/// Where a reference value is taken: a point of the interval, or a set of
/// parameter overrides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum At {
    X(String),
    Params(BTreeMap<String, String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub at: At,
    pub quantity: Quantity,
    pub source: Source,
    /// Decimal string as printed (after documented corrections).
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReferenceRow {
    pub fn value_rational(&self) -> BigRational {
        parse_rational(&self.value).expect("reference values are decimal literals")
    }

    pub fn x(&self) -> Option<BigRational> {
        match &self.at {
            At::X(x) => parse_rational(x),
            At::Params(_) => None,
        }
    }

    /// Significant digits printed.
    pub fn digits(&self) -> usize {
        let mantissa = self.value.split(['e', 'E']).next().unwrap_or("");
        let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
        digits.trim_start_matches('0').len().max(1)
    }
}

/// One published table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub id: String,
    pub problem: ProblemId,
    /// Basis order of the published run.
    pub order: usize,
    /// Parameter settings of the published run.
    pub params: BTreeMap<String, String>,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    /// Rows of one source and quantity, in table order.
    pub fn select<'a>(&'a self, source: Source, quantity: &'a Quantity) -> impl Iterator<Item = &'a ReferenceRow> + 'a {
        self.rows.iter().filter(move |r| r.source == source && &r.quantity == quantity)
    }
}

fn value_of(output: &str, deriv: usize) -> Quantity {
    Quantity::Value { output: output.into(), deriv }
}

fn x_rows(quantity: &Quantity, source: Source, rows: &[(&str, &str)]) -> Vec<ReferenceRow> {
    rows.iter()
        .map(|(x, v)| ReferenceRow {
            at: At::X(x.to_string()),
            quantity: quantity.clone(),
            source,
            value: v.to_string(),
            note: None,
        })
        .collect()
}

fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Every published comparison table, values as printed. Two entries of the
/// Abel table carry documented corrections, see their notes.
pub fn reference_tables() -> Vec<ReferenceTable> {
    let mut tables = Vec::new();
    let squeeze = params(&[("A", "0.1"), ("S", "0.1"), ("G", "0.2"), ("Pr", "0.3"), ("Ec", "0.2"), ("delta", "0.1")]);

    let fp = value_of("f", 1);
    let mut rows = x_rows(
        &fp,
        Source::Present,
        &[("0.2", "0.384801280290557"), ("0.4", "0.575554143054330"), ("0.6", "0.575174675564395"), ("0.8", "0.384040432902588")],
    );
    rows.extend(x_rows(&fp, Source::Vim, &[("0.2", "0.384801"), ("0.4", "0.575554"), ("0.6", "0.575174"), ("0.8", "0.384040")]));
    rows.extend(x_rows(
        &Quantity::Residual { equation: 0 },
        Source::Present,
        &[("0.2", "1.39535e-12"), ("0.4", "8.21911e-14"), ("0.6", "1.90287e-12"), ("0.8", "1.91562e-12")],
    ));
    tables.push(ReferenceTable { id: "table1".into(), problem: ProblemId::SqueezingFlow, order: 15, params: squeeze.clone(), rows });

    let th = value_of("theta", 0);
    let mut rows = x_rows(
        &th,
        Source::Present,
        &[("0.2", "0.806144282850332"), ("0.4", "0.607022034290869"), ("0.6", "0.407003862839112"), ("0.8", "0.206120555470330")],
    );
    rows.extend(x_rows(&th, Source::Vim, &[("0.2", "0.806144"), ("0.4", "0.607022"), ("0.6", "0.407004"), ("0.8", "0.206121")]));
    rows.extend(x_rows(
        &Quantity::Residual { equation: 1 },
        Source::Present,
        &[("0.2", "8.25970e-14"), ("0.4", "7.26187e-14"), ("0.6", "7.24240e-14"), ("0.8", "8.19659e-14")],
    ));
    tables.push(ReferenceTable { id: "table2".into(), problem: ProblemId::SqueezingFlow, order: 15, params: squeeze.clone(), rows });

    let nusselt_rows = [
        ("0.0", "0.2", "0.1", "1.00000000000000000", "1.00000"),
        ("0.1", "0.2", "0.1", "1.01893685003010788", "1.01894"),
        ("0.2", "0.2", "0.1", "1.03787156909761297", "1.03787"),
        ("0.3", "0.0", "0.1", "0.99859957004178043", "0.99860"),
        ("0.3", "0.2", "0.1", "1.05680415677248143", "1.05680"),
        ("0.3", "0.4", "0.1", "1.11500874350318244", "1.11501"),
        ("0.3", "0.3", "0.0", "1.08487154864359339", "1.08487"),
        ("0.3", "0.3", "0.5", "1.11074408599955706", "1.11074"),
        ("0.3", "0.3", "1.0", "1.18836169806744806", "1.18836"),
    ];
    let mut rows = Vec::new();
    for (pr, ec, delta, present, vim) in nusselt_rows {
        let at = At::Params(params(&[("Pr", pr), ("Ec", ec), ("delta", delta)]));
        for (source, value) in [(Source::Present, present), (Source::Vim, vim)] {
            rows.push(ReferenceRow { at: at.clone(), quantity: Quantity::Nusselt, source, value: value.into(), note: None });
        }
    }
    tables.push(ReferenceTable { id: "table3".into(), problem: ProblemId::SqueezingFlow, order: 15, params: squeeze, rows });

    let y = value_of("y", 0);
    let mut rows = x_rows(
        &y,
        Source::Exact,
        &[
            ("0.01", "1.00010000500016667083"),
            ("0.02", "1.00040008001066773341"),
            ("0.05", "1.00250312760579508497"),
            ("0.10", "1.01005016708416805754"),
            ("0.20", "1.04081077419238822675"),
            ("0.50", "1.28402541668774148407"),
            ("0.70", "1.63231621995537897012"),
            ("0.80", "1.89648087930495135334"),
            ("0.90", "2.24790798667647141917"),
            ("1.00", "2.71828182845904523536"),
            ("1.5", "9.48773583635852572055"),
            ("2.0", "54.5981500331442390781"),
            ("2.5", "518.012824668342025939"),
            ("3.0", "8103.08392757538400770"),
        ],
    );
    rows.extend(x_rows(
        &y,
        Source::Hfc,
        &[
            ("0.01", "1.0000999826"),
            ("0.02", "1.0004000642"),
            ("0.05", "1.0025031064"),
            ("0.10", "1.0100501492"),
            ("0.20", "1.0408107527"),
            ("0.50", "1.2840253862"),
            ("0.70", "1.6323161777"),
            ("0.80", "1.8964808279"),
            ("0.90", "2.2479078937"),
            ("1.00", "2.7182819166"),
        ],
    ));
    rows.extend(x_rows(
        &y,
        Source::Present,
        &[
            ("0.01", "1.00010000500016665722"),
            ("0.02", "1.00040008001066774881"),
            ("0.05", "1.00250312760579507309"),
            ("0.10", "1.01005016708416805546"),
            ("0.20", "1.04081077419238822399"),
            ("0.50", "1.28402541668774147818"),
            ("0.70", "1.63231621995537896294"),
            ("0.80", "1.89648087930495136037"),
            ("0.90", "2.24790798667647141232"),
            ("1.00", "2.71828182845904524184"),
            ("1.5", "9.48773583635852572300"),
            ("2.0", "54.5981500331442390719"),
            ("2.5", "518.012824668342025947"),
            ("3.0", "8103.08392757538400765"),
        ],
    ));
    tables.push(ReferenceTable {
        id: "table4".into(),
        problem: ProblemId::LaneEmdenType,
        order: 40,
        params: BTreeMap::new(),
        rows,
    });

    let mut rows = x_rows(
        &y,
        Source::Fcfs,
        &[
            ("0.1", "-2.500e-5"),
            ("0.2", "-4.004e-4"),
            ("0.3", "-2.032e-3"),
            ("0.4", "-6.459e-3"),
            ("0.5", "-1.591e-2"),
            ("0.6", "-3.346e-2"),
            ("0.7", "-6.327e-2"),
            ("0.8", "-1.111e-1"),
            ("0.9", "-1.855e-1"),
            ("1.0", "-2.999e-1"),
        ],
    );
    let mut present = x_rows(
        &y,
        Source::Present,
        &[
            ("0.1", "-2.541201381e-5"),
            ("0.2", "-4.000957821e-4"),
            ("0.3", "-2.033184449e-3"),
            ("0.4", "-6.459447204e-3"),
            ("0.5", "-1.591376982e-2"),
            ("0.6", "-3.346334651e-2"),
            ("0.7", "-6.327405918e-2"),
            ("0.8", "-1.111347323e-1"),
            ("0.9", "-1.855105463e-1"),
            ("1.0", "-2.999554921e-1"),
        ],
    );
    present[6].note = Some("printed without its minus sign".into());
    present[8].note = Some("printed without its minus sign, in a row labelled 0.1".into());
    rows.extend(present);
    let mut residuals = x_rows(
        &Quantity::Residual { equation: 0 },
        Source::Present,
        &[
            ("0.1", "2.13471e-6"),
            ("0.2", "1.42107e-6"),
            ("0.3", "3.48798e-6"),
            ("0.4", "7.35610e-6"),
            ("0.5", "6.64911e-6"),
            ("0.6", "1.36557e-6"),
            ("0.7", "4.86862e-6"),
            ("0.8", "9.41866e-6"),
            ("0.9", "1.23827e-5"),
            ("1.0", "1.98917e-4"),
        ],
    );
    residuals[8].note = Some("printed in a row labelled 0.1".into());
    rows.extend(residuals);
    tables.push(ReferenceTable { id: "table5".into(), problem: ProblemId::Abel, order: 10, params: BTreeMap::new(), rows });

    let mut rows = x_rows(
        &y,
        Source::Present,
        &[
            ("0.1", "0.998334998549872"),
            ("0.3", "0.985133946938390"),
            ("0.5", "0.959352715810926"),
            ("0.7", "0.922170348514590"),
            ("1.0", "0.848654111411546"),
            ("1.5", "0.695367147241325"),
            ("2.0", "0.529836429310169"),
        ],
    );
    rows.extend(x_rows(&y, Source::Horedt, &[("0.1", "0.9983350"), ("0.5", "0.9593527"), ("1.0", "0.8486541")]));
    rows.extend(x_rows(&y, Source::Bfc, &[("0.1", "0.99833499854"), ("0.5", "0.95935271580"), ("1.0", "0.84865411140")]));
    rows.extend(x_rows(&y, Source::Gfcfs, &[("0.1", "0.99833499986"), ("0.5", "0.95935271585"), ("1.0", "0.84865409603")]));
    tables.push(ReferenceTable {
        id: "table6".into(),
        problem: ProblemId::LaneEmdenStandard,
        order: 12,
        params: BTreeMap::new(),
        rows,
    });

    let yt = value_of("y", 0);
    let mut rows = x_rows(
        &yt,
        Source::Alias,
        &[
            ("0.1", "0.09597247"),
            ("0.2", "0.19218506"),
            ("0.3", "0.28887905"),
            ("0.4", "0.38629807"),
            ("0.5", "0.48441684"),
            ("0.6", "0.58428140"),
            ("0.7", "0.68525684"),
            ("0.8", "0.78807945"),
            ("0.9", "0.89292601"),
        ],
    );
    rows.extend(x_rows(
        &yt,
        Source::Feng,
        &[
            ("0.1", "0.0959477541"),
            ("0.2", "0.1921352537"),
            ("0.3", "0.2888034214"),
            ("0.4", "0.3861955524"),
            ("0.5", "0.4845585473"),
            ("0.6", "0.5841442013"),
            ("0.7", "0.6852105701"),
            ("0.8", "0.7880234321"),
            ("0.9", "0.8928578710"),
        ],
    ));
    rows.extend(x_rows(
        &yt,
        Source::Present,
        &[
            ("0.1", "0.095944350620621"),
            ("0.2", "0.192128750320282"),
            ("0.3", "0.288794404891654"),
            ("0.4", "0.386184851707410"),
            ("0.5", "0.484547171441282"),
            ("0.6", "0.584133256467667"),
            ("0.7", "0.685201157498259"),
            ("0.8", "0.788016532411673"),
            ("0.9", "0.892854224345211"),
        ],
    ));
    rows.extend(x_rows(
        &Quantity::Residual { equation: 0 },
        Source::Present,
        &[
            ("0.1", "3.18e-13"),
            ("0.2", "6.98e-12"),
            ("0.3", "1.04e-10"),
            ("0.4", "7.44e-10"),
            ("0.5", "3.63e-09"),
            ("0.6", "1.49e-08"),
            ("0.7", "5.56e-08"),
            ("0.8", "1.91e-07"),
            ("0.9", "6.07e-07"),
        ],
    ));
    tables.push(ReferenceTable {
        id: "table7".into(),
        problem: ProblemId::Troesch,
        order: 10,
        params: params(&[("gamma", "0.5")]),
        rows,
    });
    tables
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::{solve, NewtonConfig};
    use crate::scalar::{MpFloat, Scalar};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn solve_default(p: &TauProblem<MpFloat>) -> Vec<Vec<MpFloat>> {
        let cfg = NewtonConfig::for_precision(p.ops.spec().precision_digits(), p.ops.digits());
        solve(p, &cfg).unwrap().ensure_converged().unwrap().state
    }

    #[test]
    fn ids_round_trip() {
        for id in ProblemId::ALL {
            assert_eq!(id.as_str().parse::<ProblemId>().unwrap(), id);
        }
        assert!("nope".parse::<ProblemId>().is_err());
    }

    #[test]
    fn spec_checks() {
        let p = SqueezingFlowParams::default();
        assert!(build_squeezing_flow::<MpFloat>(&ProblemId::SqueezingFlow.spec(4, 40).unwrap(), &p).is_err());
        let wide = BasisSpec::new(6, int(0), int(2), 40).unwrap();
        assert!(build_troesch::<MpFloat>(&wide, &q(1, 2), 5).is_err());
        let unit = ProblemId::Troesch.spec(6, 40).unwrap();
        assert!(build_troesch::<MpFloat>(&unit, &q(1, 2), 4).is_err());
        let bad = SqueezingFlowParams { pr: q(-1, 10), ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn unknown_parameters_are_rejected() {
        let spec = ProblemId::Abel.spec(4, 40).unwrap();
        let params = BTreeMap::from([("gamma".to_string(), "1".to_string())]);
        assert!(build_problem::<MpFloat>(ProblemId::Abel, &spec, &params).is_err());
        let spec = ProblemId::Troesch.spec(4, 40).unwrap();
        let params = BTreeMap::from([("gamma".to_string(), "x".to_string())]);
        assert!(build_problem::<MpFloat>(ProblemId::Troesch, &spec, &params).is_err());
    }

    #[test]
    fn embedded_initial_values_are_exact_below_the_top_degree() {
        // y(0) = 1 and y'(0) = 0 whenever y'' has degree ≤ N - 2, so both
        // integrations avoid the projected top row
        for id in [ProblemId::LaneEmdenType, ProblemId::LaneEmdenStandard] {
            let spec = id.spec(6, 40).unwrap();
            let ops = Operators::<BigRational>::new(OpMatrixSet::shared(&spec));
            let a = ops.polynomial(&[q(3, 7), int(-2), int(5), q(1, 9), int(4)]);
            let y = ops.integ(&a, 2);
            let v = ops.polynomial(&[int(1)]);
            let y: Vec<_> = y.iter().zip(&v).map(|(p, r)| p + r).collect();
            assert_eq!(ops.eval_jet(&y, &int(0), 1), vec![int(1), int(0)]);
        }
    }

    #[test]
    fn troesch_linear_limit_is_the_identity() {
        let spec = ProblemId::Troesch.spec(6, 40).unwrap();
        let p = build_troesch::<MpFloat>(&spec, &int(0), 5).unwrap();
        let y = &solve_default(&p)[0];
        for k in 0..=10 {
            let x = MpFloat::from_rational(&q(k, 10), 60);
            let d = (p.ops.eval(y, &x) - &x).abs().to_f64_lossy();
            assert!(d < 1e-35, "{d}");
        }
    }

    #[test]
    fn troesch_first_order_series_is_linear() {
        let spec = ProblemId::Troesch.spec(8, 40).unwrap();
        let p = build_troesch::<MpFloat>(&spec, &q(1, 2), 1).unwrap();
        assert!(p.equations[0].is_linear());
        let mut cfg = NewtonConfig::for_precision(40, p.ops.digits());
        cfg.init = crate::newton::InitialGuess::Zero;
        let rep = solve(&p, &cfg).unwrap();
        assert!(rep.converged && rep.iterations == 1);
    }

    #[test]
    fn uncoupled_temperature_is_linear() {
        // Pr = 0 leaves θ'' = 0 with θ(0) = 1, θ(1) = 0
        let params = SqueezingFlowParams { pr: int(0), ..Default::default() };
        let spec = ProblemId::SqueezingFlow.spec(8, 40).unwrap();
        let p = build_squeezing_flow::<MpFloat>(&spec, &params).unwrap();
        let state = solve_default(&p);
        let nu = nusselt(&p, &state);
        assert!((nu - MpFloat::from_i64(1, 40)).abs().to_f64_lossy() < 1e-30);
        let doubled: Vec<Vec<MpFloat>> =
            vec![state[0].clone(), state[1].iter().map(|c| c.clone() * MpFloat::from_i64(2, 40)).collect()];
        let nu2 = nusselt(&p, &doubled);
        assert!((nu2 - MpFloat::from_i64(2, 40)).abs().to_f64_lossy() < 1e-30);
    }

    #[test]
    fn reference_tables_are_well_formed() {
        let tables = reference_tables();
        assert_eq!(tables.len(), 7);
        for t in &tables {
            let (a, b) = t.problem.interval();
            for r in &t.rows {
                r.value_rational();
                if let Some(x) = r.x() {
                    assert!(x >= int(a) && x <= int(b), "{} {:?}", t.id, r.at);
                }
            }
        }
        let y = value_of("y", 0);
        let t4 = &tables[3];
        let exact = t4.select(Source::Exact, &y).find(|r| r.at == At::X("0.05".into())).unwrap();
        assert_eq!(exact.value, "1.00250312760579508497");
        let t6 = &tables[5];
        assert_eq!(t6.select(Source::Bfc, &y).next().unwrap().value, "0.99833499854");
        let t7 = &tables[6];
        assert_eq!(t7.select(Source::Feng, &y).next().unwrap().value, "0.0959477541");
        assert_eq!(t4.rows[0].digits(), 21);
    }
}
