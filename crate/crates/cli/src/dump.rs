//! `matrices` and `approx`.

use std::fs;
use std::path::Path;

use anyhow::Result;
use num_rational::BigRational;
use serde_json::json;
use taubessel_core::approx::{project_function, project_polynomial, ProjectionResult};
use taubessel_core::linalg::Matrix;
use taubessel_core::{BasisSpec, MpFloat, OpMatrixSet, RealScalar, Scalar};

use crate::output::{emit, render, Table};
use crate::run::{rational, read_numbers};
use crate::{config_error, Global, Which};

/// Order used when `--n` is absent.
const DEFAULT_ORDER: usize = 10;

fn basis(g: &Global) -> Result<BasisSpec> {
    let a = g.a.as_deref().map(|s| rational("--a", s)).transpose()?.unwrap_or_else(|| BigRational::from_integer(0.into()));
    let b = g.b.as_deref().map(|s| rational("--b", s)).transpose()?.unwrap_or_else(|| BigRational::from_integer(1.into()));
    Ok(BasisSpec::new(g.n.unwrap_or(DEFAULT_ORDER), a, b, g.precision)?)
}

/// Entries as `p/q`, integers included.
fn exact_entry(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn matrix_table(m: &Matrix<BigRational>) -> Table {
    let mut header = vec!["row".to_string()];
    header.extend((0..m.cols()).map(|j| j.to_string()));
    let mut t = Table::new(header);
    for i in 0..m.rows() {
        let mut row = vec![i.to_string()];
        row.extend(m.row(i).iter().map(exact_entry));
        t.rows.push(row);
    }
    t
}

pub fn matrices_command(g: &Global, which: Which, product_from: Option<&Path>) -> Result<()> {
    let spec = basis(g)?;
    let set = OpMatrixSet::new(&spec);
    let (name, m) = match product_from {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| config_error(format!("--product-from {}: {e}", path.display())))?;
            let c = read_numbers(&text, "--product-from")?;
            if c.len() != spec.size() {
                return Err(config_error(format!("--product-from: {} coefficients for N = {}", c.len(), spec.order())));
            }
            ("product".to_string(), set.build_c_tilde(&c))
        }
        None => {
            let m = match which {
                Which::Y => set.change.y_mat.clone(),
                Which::S => set.change.s_mat.clone(),
                Which::M => set.change.m_mat.clone(),
                Which::Minv => set.change.m_inv.clone(),
                Which::P => set.p_mat.clone(),
                Which::D => set.d_mat.clone(),
                Which::L => set.l_mat.clone(),
                Which::I => set.i_mat.clone(),
                Which::K => set.k_mat.clone(),
                Which::H => set.h_mat.clone(),
            };
            (format!("{which:?}").to_lowercase(), m)
        }
    };
    let meta = json!({ "matrix": name, "n": spec.order(), "a": spec.a().to_string(), "b": spec.b().to_string() });
    emit(&render(&matrix_table(&m), g.format, meta)?, g.out.as_deref())
}

pub fn approx_command(g: &Global, function: &str, emit_to: Option<&Path>) -> Result<()> {
    let spec = basis(g)?;
    let set = OpMatrixSet::new(&spec);
    let digits = set.working_digits();
    let sig = spec.precision_digits() as usize;
    let result: ProjectionResult<MpFloat> = match function {
        "sin" => project_function(&set, |x: &MpFloat| x.sin(), digits)?,
        "exp_x2" => project_function(&set, |x: &MpFloat| (x.clone() * x).exp(), digits)?,
        other => {
            let list = other
                .strip_prefix("polynomial:")
                .ok_or_else(|| config_error(format!("--function `{other}`: expected sin, exp_x2 or polynomial:c0,c1,...")))?;
            let mono = list.split(',').map(|c| rational("polynomial coefficient", c)).collect::<Result<Vec<_>>>()?;
            let r = project_polynomial(&set, &mono);
            ProjectionResult {
                coeffs: r.coeffs.iter().map(|q| MpFloat::from_rational(q, digits)).collect(),
                residual_norm_sq: MpFloat::from_rational(&r.residual_norm_sq, digits),
            }
        }
    };
    let mut table = Table::new(vec!["n".into(), "coefficient".into()]);
    for (n, c) in result.coeffs.iter().enumerate() {
        table.rows.push(vec![n.to_string(), c.to_decimal(sig)]);
    }
    let error = result.residual_norm().to_decimal(6);
    let meta = json!({
        "function": function,
        "n": spec.order(),
        "a": spec.a().to_string(),
        "b": spec.b().to_string(),
        "weighted_l2_error": error,
    });
    emit(&render(&table, g.format, meta)?, emit_to.or(g.out.as_deref()))?;
    eprintln!("{function}: N={} weighted L2 error {error}", spec.order());
    Ok(())
}
