//! `solve`, `sweep` and `verify`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use taubessel_core::problems::{build_problem, nusselt, At, Quantity, ReferenceTable, Source};
use taubessel_core::scalar::parse_rational;
use taubessel_core::verify::run_all;
use taubessel_core::{
    solve, BasisSpec, InitialGuess, MpFloat, NewtonConfig, ProblemId, RealProblem, RealScalar, Scalar, SolveReport,
    TauError,
};

use crate::output::{emit, render, Format, Table};
use crate::{config_error, Global, ProblemArgs};

/// Samples used when neither `--points` nor `--samples` is given.
const DEFAULT_SAMPLES: usize = 11;

pub fn rational(label: &str, text: &str) -> Result<BigRational> {
    parse_rational(text).ok_or_else(|| config_error(format!("{label}: `{text}` is not a number")))
}

/// Exact decimal when the denominator divides a power of ten, otherwise
/// `sig` significant digits.
pub fn rational_decimal(q: &BigRational, sig: usize) -> String {
    let mut d = q.denom().clone();
    for p in [2u32, 5] {
        while (&d % p).is_zero() {
            d /= p;
        }
    }
    if d == 1u32.into() {
        let digits = sig.max(q.numer().to_string().len() + q.denom().to_string().len() + 2) as u32;
        let s = MpFloat::from_rational(q, digits + 10).to_decimal(digits as usize);
        if s.contains('.') && !s.contains(['e', 'E']) {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        MpFloat::from_rational(q, sig as u32 + 10).to_decimal(sig)
    }
}

fn params_map(list: &[String]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in list {
        let (k, v) = item.split_once('=').ok_or_else(|| config_error(format!("--param `{item}` is not NAME=VALUE")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Everything needed to build and sample one problem.
#[derive(Debug, Clone)]
struct Setup {
    id: ProblemId,
    spec: BasisSpec,
    params: BTreeMap<String, String>,
    points: Vec<BigRational>,
    deriv: bool,
}

impl Setup {
    fn new(g: &Global, p: &ProblemArgs) -> Result<Self> {
        let id = p.problem;
        let (da, db) = id.interval();
        let a = g.a.as_deref().map(|s| rational("--a", s)).transpose()?.unwrap_or_else(|| BigRational::from_integer(da.into()));
        let b = g.b.as_deref().map(|s| rational("--b", s)).transpose()?.unwrap_or_else(|| BigRational::from_integer(db.into()));
        let spec = BasisSpec::new(g.n.unwrap_or(id.default_order()), a.clone(), b.clone(), g.precision)?;
        let points = if !p.points.is_empty() {
            p.points.iter().map(|s| rational("--points", s)).collect::<Result<Vec<_>>>()?
        } else {
            let count = p.samples.unwrap_or(DEFAULT_SAMPLES);
            if count < 2 {
                return Err(config_error("--samples needs at least 2 points"));
            }
            let step = (&b - &a) / BigRational::from_integer((count - 1).into());
            (0..count).map(|k| &a + &step * BigRational::from_integer(k.into())).collect()
        };
        if let Some(x) = points.iter().find(|x| **x < a || **x > b) {
            return Err(config_error(format!("sample point {x} lies outside [{a}, {b}]")));
        }
        Ok(Setup { id, spec, params: params_map(&p.params)?, points, deriv: p.deriv })
    }
}

fn newton_config(g: &Global, problem: &RealProblem) -> Result<NewtonConfig<MpFloat>> {
    let digits = problem.ops.digits();
    let mut cfg = NewtonConfig::for_precision(g.precision, digits);
    if let Some(t) = &g.tol {
        let tol = rational("--tol", t)?;
        if !tol.is_positive() {
            return Err(config_error("--tol must be positive"));
        }
        cfg.tol = MpFloat::from_rational(&tol, digits);
    }
    if let Some(m) = g.max_iter {
        if m == 0 {
            return Err(config_error("--max-iter must be at least 1"));
        }
        cfg.max_iter = m;
    }
    cfg.init = match g.init.as_str() {
        "zero" => InitialGuess::Zero,
        "bc" => InitialGuess::BcInterpolant,
        other => {
            let path = other
                .strip_prefix("file:")
                .ok_or_else(|| config_error(format!("--init `{other}`: expected zero, bc or file:<path>")))?;
            InitialGuess::Given(read_init(Path::new(path), problem)?)
        }
    };
    Ok(cfg)
}

/// One coefficient per line, unknowns one after another.
fn read_init(path: &Path, problem: &RealProblem) -> Result<Vec<Vec<MpFloat>>> {
    let text = fs::read_to_string(path).map_err(|e| config_error(format!("--init {}: {e}", path.display())))?;
    let values = read_numbers(&text, "--init")?;
    if values.len() != problem.dimension() {
        return Err(config_error(format!(
            "--init {}: {} values for {} unknown coefficients",
            path.display(),
            values.len(),
            problem.dimension()
        )));
    }
    let digits = problem.ops.digits();
    let values: Vec<_> = values.iter().map(|q| MpFloat::from_rational(q, digits)).collect();
    Ok(values.chunks(problem.size()).map(<[_]>::to_vec).collect())
}

/// Numbers one per line; blank lines and `#` comments are skipped.
pub fn read_numbers(text: &str, label: &str) -> Result<Vec<BigRational>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| rational(label, l))
        .collect()
}

struct Outcome {
    setup: Setup,
    problem: RealProblem,
    report: SolveReport<MpFloat>,
}

impl Outcome {
    fn x(&self, q: &BigRational) -> MpFloat {
        self.problem.ops.scalar(q)
    }

    fn nusselt(&self) -> Option<MpFloat> {
        (self.setup.id == ProblemId::SqueezingFlow).then(|| nusselt(&self.problem, &self.report.state))
    }

    fn fmt(&self, v: &MpFloat) -> String {
        v.to_decimal(self.setup.spec.precision_digits() as usize)
    }
}

fn solve_setup(g: &Global, setup: Setup) -> Result<Outcome> {
    let problem = build_problem::<MpFloat>(setup.id, &setup.spec, &setup.params)?;
    let cfg = newton_config(g, &problem)?;
    let report = solve(&problem, &cfg)?;
    Ok(Outcome { setup, problem, report })
}

/// Whether output `i` gets a derivative column.
fn has_deriv(o: &Outcome, i: usize) -> bool {
    o.setup.deriv || (o.setup.id == ProblemId::SqueezingFlow && o.problem.outputs[i].name == "f")
}

/// `x,value[,deriv],residual` for one output; named columns otherwise.
fn sample_table(o: &Outcome) -> Result<Table> {
    let outputs = &o.problem.outputs;
    let single = outputs.len() == 1;
    let mut header = vec!["x".to_string()];
    for (i, out) in outputs.iter().enumerate() {
        header.push(if single { "value".into() } else { out.name.clone() });
        if has_deriv(o, i) {
            header.push(if single { "deriv".into() } else { format!("{}'", out.name) });
        }
    }
    let equations = o.problem.equations.len();
    for e in 0..equations {
        header.push(match () {
            _ if equations == 1 => "residual".into(),
            _ if equations == outputs.len() => format!("residual_{}", outputs[e].name),
            _ => format!("residual_{e}"),
        });
    }
    let mut table = Table::new(header);
    for q in &o.setup.points {
        let x = o.x(q);
        let mut row = vec![rational_decimal(q, o.setup.spec.precision_digits() as usize)];
        for i in 0..outputs.len() {
            let k = usize::from(has_deriv(o, i));
            let jet = o.problem.output_jet(&o.report.state, i, &x, k)?;
            row.extend(jet.iter().map(|v| o.fmt(v)));
        }
        row.extend(o.problem.residual_at(&o.report.state, &x)?.iter().map(|v| o.fmt(v)));
        table.rows.push(row);
    }
    Ok(table)
}

/// One computed quantity against a published one.
struct Comparison {
    table: String,
    source: Source,
    label: String,
    computed: MpFloat,
    reference: BigRational,
    /// Residual rows are informational; values must agree to one unit in
    /// the last printed digit.
    tolerance: Option<f64>,
}

impl Comparison {
    fn diff(&self) -> f64 {
        let reference = MpFloat::from_rational(&self.reference, self.computed.digits());
        (self.computed.clone() - reference).abs().to_f64_lossy()
    }

    fn passed(&self) -> Option<bool> {
        self.tolerance.map(|t| self.diff() <= t)
    }
}

fn last_digit_unit(value: &str, q: &BigRational) -> f64 {
    let mantissa = value.split(['e', 'E']).next().unwrap_or("");
    let sig = mantissa.chars().filter(char::is_ascii_digit).collect::<String>().trim_start_matches('0').len().max(1);
    let v = MpFloat::from_rational(q, 30).abs().to_f64_lossy();
    let exp = if v > 0.0 { v.log10().floor() } else { 0.0 };
    10f64.powf(exp - sig as f64 + 1.0)
}

fn params_agree(given: &BTreeMap<String, String>, want: &BTreeMap<String, String>) -> bool {
    given.iter().all(|(k, v)| {
        let table_value = want.get(k).or_else(|| (k == "M").then(|| want.get("G")).flatten());
        matches!((table_value.and_then(|t| parse_rational(t)), parse_rational(v)), (Some(a), Some(b)) if a == b)
    })
}

/// Matches the run against every embedded table of the same problem, order,
/// interval and parameters.
fn compare(o: &Outcome, tables: &[ReferenceTable]) -> Result<Vec<Comparison>> {
    let id = o.setup.id;
    let (da, db) = id.interval();
    let spec = &o.setup.spec;
    if *spec.a() != BigRational::from_integer(da.into()) || *spec.b() != BigRational::from_integer(db.into()) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for t in tables.iter().filter(|t| t.problem == id && t.order == spec.order() && params_agree(&o.setup.params, &t.params)) {
        for row in t.rows.iter().filter(|r| matches!(r.source, Source::Present | Source::Exact)) {
            let reference = row.value_rational();
            let (label, computed, tolerance) = match (&row.at, &row.quantity) {
                (At::X(xs), Quantity::Value { output, deriv }) => {
                    let Some(i) = o.problem.output_index(output) else { continue };
                    let x = o.x(&rational("reference x", xs)?);
                    let v = o.problem.output_jet(&o.report.state, i, &x, *deriv)?.swap_remove(*deriv);
                    let name = format!("{output}{}({xs})", "'".repeat(*deriv));
                    (name, v, Some(last_digit_unit(&row.value, &reference)))
                }
                (At::X(xs), Quantity::Residual { equation }) => {
                    let x = o.x(&rational("reference x", xs)?);
                    let v = o.problem.residual_at(&o.report.state, &x)?.swap_remove(*equation).abs();
                    (format!("|Res|({xs})"), v, None)
                }
                (At::Params(p), Quantity::Nusselt) => {
                    let mut effective = t.params.clone();
                    effective.extend(o.setup.params.clone());
                    if !params_agree(p, &effective) {
                        continue;
                    }
                    let Some(nu) = o.nusselt() else { continue };
                    let at: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    (format!("Nu({})", at.join(",")), nu, Some(last_digit_unit(&row.value, &reference)))
                }
                _ => continue,
            };
            out.push(Comparison { table: t.id.clone(), source: row.source, label, computed, reference, tolerance });
        }
    }
    Ok(out)
}

fn comparison_json(c: &Comparison, o: &Outcome) -> Value {
    json!({
        "table": c.table,
        "source": c.source.as_str(),
        "quantity": c.label,
        "computed": o.fmt(&c.computed),
        "reference": rational_decimal(&c.reference, 30),
        "abs_diff": format!("{:.3e}", c.diff()),
        "pass": c.passed(),
    })
}

fn metadata(o: &Outcome) -> Value {
    let spec = &o.setup.spec;
    json!({
        "problem": o.setup.id.as_str(),
        "n": spec.order(),
        "a": spec.a().to_string(),
        "b": spec.b().to_string(),
        "precision": spec.precision_digits(),
        "params": o.setup.params,
        "converged": o.report.converged,
        "iterations": o.report.iterations,
        "init": o.report.init,
        "residual_history": o.report.residual_norm_history.iter().map(|v| v.to_decimal(6)).collect::<Vec<_>>(),
        "nusselt": o.nusselt().map(|v| o.fmt(&v)),
        "coefficients": o.report.state.iter().map(|b| b.iter().map(|v| o.fmt(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn not_converged(report: &SolveReport<MpFloat>) -> anyhow::Error {
    TauError::NotConverged { iterations: report.iterations, residual: report.residual_norm().to_f64_lossy() }.into()
}

pub fn solve_command(g: &Global, p: &ProblemArgs) -> Result<()> {
    let o = solve_setup(g, Setup::new(g, p)?)?;
    if !o.report.converged {
        return Err(not_converged(&o.report));
    }
    let comparisons = compare(&o, &taubessel_core::problems::reference_tables())?;
    let mut meta = metadata(&o);
    meta["comparison"] = comparisons.iter().map(|c| comparison_json(c, &o)).collect();
    emit(&render(&sample_table(&o)?, g.format, meta)?, g.out.as_deref())?;

    eprintln!(
        "{}: N={} converged in {} iterations, merit {}",
        o.setup.id,
        o.setup.spec.order(),
        o.report.iterations,
        o.report.residual_norm().to_decimal(3)
    );
    if let Some(nu) = o.nusselt() {
        eprintln!("Nu = {}", o.fmt(&nu));
    }
    for c in &comparisons {
        let verdict = match c.passed() {
            Some(true) => "ok",
            Some(false) => "DIFFERS",
            None => "info",
        };
        eprintln!(
            "  {} {:<8} {:<16} computed {} reference {} |diff| {:.3e} {verdict}",
            c.table,
            c.source.as_str(),
            c.label,
            c.computed.to_decimal(20),
            rational_decimal(&c.reference, 20),
            c.diff(),
        );
    }
    Ok(())
}

/// `NAME=START:STOP:COUNT` (equispaced, both ends included) or
/// `NAME=V1,V2,...`.
fn parse_sweep(spec: &str) -> Result<(String, Vec<BigRational>)> {
    let bad = || config_error(format!("--sweep `{spec}`: expected NAME=START:STOP:COUNT or NAME=V1,V2,..."));
    let (name, range) = spec.split_once('=').ok_or_else(bad)?;
    let name = name.trim().to_string();
    if name.is_empty() {
        return Err(bad());
    }
    let parts: Vec<&str> = range.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, count] => {
            let (start, stop) = (rational("sweep start", start)?, rational("sweep stop", stop)?);
            let count: usize = count.trim().parse().map_err(|_| bad())?;
            match count {
                0 => return Err(bad()),
                1 => vec![start],
                _ => {
                    let step = (&stop - &start) / BigRational::from_integer((count - 1).into());
                    (0..count).map(|k| &start + &step * BigRational::from_integer(k.into())).collect()
                }
            }
        }
        [list] => list.split(',').map(|v| rational("sweep value", v)).collect::<Result<_>>()?,
        _ => return Err(bad()),
    };
    Ok((name, values))
}

pub fn sweep_command(g: &Global, p: &ProblemArgs, sweep: &str) -> Result<()> {
    let (name, values) = parse_sweep(sweep)?;
    let id = p.problem;
    if !id.param_names().contains(&name.as_str()) && !(id == ProblemId::SqueezingFlow && name == "M") {
        return Err(config_error(format!("{id} has no parameter `{name}` (known: {})", id.param_names().join(", "))));
    }
    let base = Setup::new(g, p)?;
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let sig = g.precision as usize;

    let run_one = |k: usize, value: &BigRational| -> Vec<String> {
        let mut setup = base.clone();
        setup.params.insert(name.clone(), value.to_string());
        let file = format!("{id}-{name}-{k:03}.{}", g.format.extension());
        let mut row = vec![k.to_string(), rational_decimal(value, sig)];
        let result = solve_setup(g, setup).and_then(|o| {
            if !o.report.converged {
                return Ok((o, "not-converged".to_string()));
            }
            emit(&render(&sample_table(&o)?, g.format, metadata(&o))?, Some(&dir.join(&file)))?;
            Ok((o, "converged".to_string()))
        });
        match result {
            Ok((o, status)) => {
                let written = status == "converged";
                row.push(if written { file } else { String::new() });
                row.push(status);
                row.push(o.report.iterations.to_string());
                if id == ProblemId::SqueezingFlow {
                    row.push(if written { o.nusselt().map(|v| o.fmt(&v)).unwrap_or_default() } else { String::new() });
                }
            }
            Err(e) => {
                row.push(String::new());
                row.push(format!("error: {e:#}"));
                row.push(String::new());
                if id == ProblemId::SqueezingFlow {
                    row.push(String::new());
                }
            }
        }
        row
    };

    let pool = rayon::ThreadPoolBuilder::new().num_threads(g.jobs.unwrap_or(0)).build()?;
    let rows: Vec<Vec<String>> = pool.install(|| values.par_iter().enumerate().map(|(k, v)| run_one(k, v)).collect());

    let mut header: Vec<String> = ["index", name.as_str(), "file", "status", "iterations"].map(String::from).to_vec();
    if id == ProblemId::SqueezingFlow {
        header.push("nusselt".into());
    }
    let failed = rows.iter().filter(|r| r[3] != "converged").count();
    let index = Table { header, rows };
    let meta = json!({ "problem": id.as_str(), "parameter": name });
    emit(&render(&index, g.format, meta)?, Some(&dir.join(format!("index.{}", g.format.extension()))))?;
    eprintln!("{id}: {} of {} values solved, files in {}", values.len() - failed, values.len(), dir.display());
    Ok(())
}

pub fn verify_command(g: &Global, filter: Option<&str>, references: Option<&Path>) -> Result<bool> {
    let tables = match references {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| config_error(format!("--references {}: {e}", path.display())))?;
            serde_json::from_str::<Vec<ReferenceTable>>(&text)
                .map_err(|e| config_error(format!("--references {}: {e}", path.display())))?
        }
        None => taubessel_core::problems::reference_tables(),
    };
    let reports = run_all(filter, &tables);
    if reports.is_empty() {
        return Err(config_error(format!("no criterion matches `{}`", filter.unwrap_or(""))));
    }
    let text = match g.format {
        Format::Csv => {
            let mut s = String::new();
            for r in &reports {
                s += &format!("{r}\n");
                for c in r.failures() {
                    s += &format!("    {}: {:.6e} (limit {:.3e})\n", c.label, c.measured, c.limit);
                }
            }
            s
        }
        Format::Json => {
            let doc: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "title": r.title,
                        "passed": r.passed(),
                        "error": r.error,
                        "seconds": r.elapsed.as_secs_f64(),
                        "checks": r.checks.iter().map(|c| json!({
                            "label": c.label, "measured": c.measured, "limit": c.limit, "passed": c.passed,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    emit(&text, g.out.as_deref())?;
    Ok(reports.iter().all(|r| r.passed()))
}
