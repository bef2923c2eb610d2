//! One analysis on one grid level: resolves the coefficient roles and calls
//! the matching library operation.

use std::collections::BTreeMap;

use formlab::certificates::{
    form_nonneg_1d_with, linear_sufficient_check_with, riccati_check_1d, riccati_check_nd, riccati_construct_1d_with,
    riccati_construct_nd_with,
};
use formlab::eigen::EigenOptions;
use formlab::field::io::FieldFile;
use formlab::hodge::{hodge_decompose, two_d_obstruction};
use formlab::reduction::{CoefficientSet, FormTag, PointMass};
use formlab::regnorms::{bmo_norm, lip_seminorm, morrey_constant, trace_norm_with};
use formlab::varforms::{
    accretivity_min_with, commutator_constant_with, criterion_crosscheck, form_bound_constant_with,
    magnetic_comparability, schrodinger_positivity_with, subordination_profile, SubordinationMode, DEFAULT_WINDOW,
};
use formlab::{Grid, MatrixField, ScalarField, VectorField};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::family::{build, Kind, Value as Field};
use crate::report::number;
use crate::scenario::{AnalysisSpec, Scenario};

/// Coefficient roles of an analysis: name, kind, and whether it is required.
fn roles(analysis: &str, dim: usize) -> Vec<(&'static str, Kind, bool)> {
    use Kind::*;
    match analysis {
        "accretivity" | "formbound" => vec![("a", Matrix, false), ("b", Vector, false), ("c", Scalar, false)],
        "commutator" => vec![("d", Vector, true)],
        "decompose" => vec![("b", Vector, true), ("q", Scalar, false)],
        "norms" => vec![("mu", Scalar, false), ("f", Scalar, false), ("g", Vector, false)],
        "subordination" => vec![("q", Scalar, true)],
        "magnetic" => vec![("vector_potential", Vector, true), ("q", Scalar, false)],
        "riccati1d" => vec![("p", Scalar, false), ("b", Scalar, false), ("c", Scalar, false)],
        "riccatind" => vec![("p", Matrix, false), ("sigma", Scalar, true)],
        "check-certificate" if dim == 1 => vec![
            ("p", Scalar, false),
            ("b", Scalar, false),
            ("c", Scalar, false),
            ("f", Scalar, true),
        ],
        "check-certificate" => vec![("p", Matrix, false), ("sigma", Scalar, true), ("g", Vector, true)],
        _ => Vec::new(),
    }
}

/// Coefficients of one analysis on one level, built and checked up front.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub grid: Grid,
    fields: BTreeMap<&'static str, Field>,
    atoms: Vec<PointMass>,
}

impl Inputs {
    pub fn prepare(scenario: &Scenario, analysis: &str, grid: Grid) -> Result<Self> {
        let dim = grid.dim();
        if analysis == "riccati1d" && dim != 1 {
            return Err(CliError::scenario("riccati1d needs a one-dimensional grid"));
        }
        if !scenario.atoms.is_empty() && dim != 1 {
            return Err(CliError::scenario("point masses need a one-dimensional grid"));
        }
        let mut fields = BTreeMap::new();
        for (role, kind, required) in roles(analysis, dim) {
            match scenario.coefficients.get(role) {
                Some(spec) => {
                    let f = build(spec, &grid, kind, scenario.seed, &scenario.base_dir)
                        .map_err(|e| CliError::scenario(format!("coefficient `{role}` of {analysis}: {e}")))?;
                    fields.insert(role, f);
                }
                None if required => {
                    return Err(CliError::scenario(format!("{analysis} needs coefficient `{role}`")));
                }
                None => {}
            }
        }
        if analysis == "norms" && fields.is_empty() {
            return Err(CliError::scenario("norms needs at least one of `mu`, `f`, `g`"));
        }
        Ok(Self {
            grid,
            fields,
            atoms: scenario.point_masses(),
        })
    }

    fn scalar(&self, role: &str, default: f64) -> ScalarField {
        self.fields
            .get(role)
            .cloned()
            .map(Field::into_scalar)
            .unwrap_or_else(|| ScalarField::constant(self.grid, Complex64::new(default, 0.0)))
    }

    fn vector(&self, role: &str) -> VectorField {
        self.fields
            .get(role)
            .cloned()
            .map(Field::into_vector)
            .unwrap_or_else(|| VectorField::zeros(self.grid))
    }

    fn matrix(&self, role: &str, default: f64) -> MatrixField {
        self.fields
            .get(role)
            .cloned()
            .map(Field::into_matrix)
            .unwrap_or_else(|| MatrixField::scalar_multiple(self.grid, Complex64::new(default, 0.0)))
    }

    fn has(&self, role: &str) -> bool {
        self.fields.contains_key(role)
    }
}

/// Result of one analysis on one level, before it is written out.
#[derive(Debug, Clone)]
pub struct LevelOutput {
    pub result: Value,
    pub quantities: BTreeMap<String, f64>,
    pub sidecars: Vec<(String, FieldFile)>,
}

impl LevelOutput {
    fn new(result: Value) -> Self {
        Self {
            result,
            quantities: BTreeMap::new(),
            sidecars: Vec::new(),
        }
    }

    fn quantity(&mut self, name: &str, v: f64) {
        self.quantities.insert(name.to_string(), v);
    }

    fn sidecar(&mut self, name: &str, field: Option<impl Into<FieldFile>>) {
        if let Some(f) = field {
            self.sidecars.push((name.to_string(), f.into()));
        }
    }
}

pub fn eigen_options(spec: &AnalysisSpec, tol_override: Option<f64>) -> EigenOptions {
    let mut opts = EigenOptions::default();
    if let Some(t) = tol_override.or(spec.tol) {
        opts.tol = t;
    }
    if let Some(m) = spec.max_iter {
        opts.max_iter = m;
    }
    opts
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn form_tag(spec: &AnalysisSpec) -> Result<FormTag> {
    match spec.form.as_deref() {
        None | Some("divergence") => Ok(FormTag::Divergence),
        Some("nondivergence") => Ok(FormTag::Nondivergence),
        Some(other) => Err(CliError::scenario(format!("unknown form `{other}`"))),
    }
}

fn subordination_mode(spec: &AnalysisSpec) -> Result<SubordinationMode> {
    let p = || spec.p.ok_or_else(|| CliError::scenario("subordination mode needs `p`"));
    match spec.mode.as_deref() {
        None | Some("infinitesimal") => Ok(SubordinationMode::Infinitesimal),
        Some("trudinger") => Ok(SubordinationMode::Trudinger),
        Some("p_subordination") => Ok(SubordinationMode::PSubordination { p: p()? }),
        Some("nash") => Ok(SubordinationMode::Nash { p: p()? }),
        Some(other) => Err(CliError::scenario(format!("unknown subordination mode `{other}`"))),
    }
}

/// Option checks that do not depend on the grid.
pub fn check_spec(analysis: &str, spec: &AnalysisSpec) -> Result<()> {
    match analysis {
        "accretivity" | "formbound" => form_tag(spec).map(|_| ()),
        "subordination" => subordination_mode(spec).map(|_| ()),
        "norms" => {
            for w in spec.which.iter().flatten() {
                if !["trace", "bmo", "lip", "morrey"].contains(&w.as_str()) {
                    return Err(CliError::scenario(format!("unknown norm `{w}`")));
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn construct_outcome<T: serde::Serialize>(r: formlab::Result<T>) -> Result<(Option<T>, Value)> {
    match r {
        Ok(c) => Ok((Some(c), Value::Null)),
        Err(e @ (formlab::Error::Indefinite { .. } | formlab::Error::Marginal { .. } | formlab::Error::InvalidParameter(_))) => {
            Ok((None, Value::String(e.to_string())))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run_level(analysis: &str, spec: &AnalysisSpec, inputs: &Inputs, opts: &EigenOptions) -> Result<LevelOutput> {
    let grid = inputs.grid;
    match analysis {
        "accretivity" | "formbound" => {
            let cs = CoefficientSet::new(
                inputs.matrix("a", 0.0),
                inputs.vector("b"),
                inputs.scalar("c", 0.0),
                form_tag(spec)?,
            )?
            .with_point_masses(inputs.atoms.clone())?;
            if analysis == "accretivity" {
                let r = accretivity_min_with(&cs, opts)?;
                let mut out = LevelOutput::new(to_json(&r)?);
                out.quantity("min_rayleigh", r.min_rayleigh);
                out.sidecar("witness_u", r.witness_u);
                Ok(out)
            } else {
                let r = form_bound_constant_with(&cs, spec.mass_term, opts)?;
                let mut out = LevelOutput::new(to_json(&r)?);
                out.quantity("constant", r.constant);
                out.sidecar("witness_u", r.witness_u);
                out.sidecar("witness_v", r.witness_v);
                Ok(out)
            }
        }
        "commutator" => {
            let d = inputs.vector("d");
            let r = commutator_constant_with(&d, opts)?;
            let cross = if spec.crosscheck {
                Some(criterion_crosscheck(&d, spec.window.unwrap_or(DEFAULT_WINDOW), opts)?)
            } else {
                None
            };
            let mut out = LevelOutput::new(json!({ "commutator": to_json(&r)?, "crosscheck": to_json(&cross)? }));
            out.quantity("constant", r.constant);
            if let Some(c) = &cross {
                out.quantity("crosscheck_ratio", c.ratio);
            }
            out.sidecar("witness_u", r.witness_u);
            out.sidecar("witness_v", r.witness_v);
            Ok(out)
        }
        "decompose" => {
            let b = inputs.vector("b");
            let parts = hodge_decompose(&b);
            let obstruction = if grid.dim() == 2 {
                let q = inputs.scalar("q", 0.0);
                Some(two_d_obstruction(&b, &q, spec.obstruction_tol.unwrap_or(1e-10))?)
            } else {
                None
            };
            let solenoidal = parts.solenoidal();
            let result = json!({
                "mean": to_json(&parts.mean)?,
                "potential_l2": number(parts.potential.l2_norm()),
                "irrotational_l2": number(parts.irrotational.l2_norm()),
                "solenoidal_l2": number(solenoidal.l2_norm()),
                "skew_max": number(parts.skew.max_norm()),
                "reconstruction_error": number(parts.reconstruction_error(&b)),
                "orthogonality_defect": number(parts.orthogonality_defect()),
                "low_mode_fraction": number(parts.low_mode_fraction),
                "low_mode_dominated": parts.is_low_mode_dominated(),
                "obstruction": to_json(&obstruction)?,
            });
            let mut out = LevelOutput::new(result);
            out.quantity("reconstruction_error", parts.reconstruction_error(&b));
            out.quantity("irrotational_l2", parts.irrotational.l2_norm());
            out.quantity("solenoidal_l2", solenoidal.l2_norm());
            out.sidecar("potential", Some(parts.potential));
            out.sidecar("irrotational", Some(parts.irrotational));
            out.sidecar("skew", Some(parts.skew));
            Ok(out)
        }
        "norms" => {
            let default: Vec<String> = [("mu", "trace"), ("f", "bmo"), ("g", "morrey")]
                .iter()
                .filter(|(role, _)| inputs.has(role))
                .map(|(_, n)| n.to_string())
                .collect();
            let which = spec.which.clone().unwrap_or(default);
            let mut result = serde_json::Map::new();
            let mut out = LevelOutput::new(Value::Null);
            for name in which {
                let need = match name.as_str() {
                    "trace" => "mu",
                    "morrey" => "g",
                    _ => "f",
                };
                if !inputs.has(need) {
                    return Err(CliError::scenario(format!("norm `{name}` needs coefficient `{need}`")));
                }
                let r = match name.as_str() {
                    "trace" => trace_norm_with(&inputs.scalar("mu", 0.0), &inputs.atoms, opts)?,
                    "bmo" => bmo_norm(&inputs.scalar("f", 0.0)),
                    "lip" => lip_seminorm(&inputs.scalar("f", 0.0), spec.alpha.unwrap_or(0.5))?,
                    _ => morrey_constant(&inputs.vector("g"), spec.s.unwrap_or(1.0))?,
                };
                out.quantity(&name, r.value);
                out.sidecar(&format!("{name}_witness"), r.witness_field.clone());
                result.insert(name, to_json(&r)?);
            }
            out.result = Value::Object(result);
            Ok(out)
        }
        "subordination" => {
            let eps = spec.epsilons.clone().unwrap_or_else(|| vec![1e-3, 3e-3, 1e-2, 3e-2, 1e-1]);
            let r = subordination_profile(&inputs.scalar("q", 0.0), &inputs.atoms, subordination_mode(spec)?, &eps, opts)?;
            let mut out = LevelOutput::new(to_json(&r)?);
            if let Some(b) = r.fitted_beta {
                out.quantity("fitted_beta", b);
            }
            if let Some(c) = r.p_constant {
                out.quantity("p_constant", c);
            }
            Ok(out)
        }
        "magnetic" => {
            let r = magnetic_comparability(
                &inputs.vector("vector_potential"),
                &inputs.scalar("q", 0.0),
                spec.mass_term,
                spec.window,
                opts,
            )?;
            let mut out = LevelOutput::new(to_json(&r)?);
            out.quantity("magnetic", r.magnetic);
            out.quantity("ratio", r.ratio);
            Ok(out)
        }
        "riccati1d" => {
            let (p, b, c) = (inputs.scalar("p", 1.0), inputs.scalar("b", 0.0), inputs.scalar("c", 0.0));
            let form = form_nonneg_1d_with(&p, &b, &c, &inputs.atoms, opts)?;
            let (cert, construct_error) = construct_outcome(riccati_construct_1d_with(&p, &b, &c, &inputs.atoms, opts))?;
            let mut out = LevelOutput::new(json!({
                "form": to_json(&form)?,
                "certificate": to_json(&cert)?,
                "construct_error": construct_error,
            }));
            out.quantity("min_rayleigh", form.min_rayleigh);
            if let Some(cert) = cert {
                out.quantity("min_slack", cert.min_slack);
                out.sidecar("f", Some(cert.f));
                out.sidecar("slack", Some(cert.slack));
            }
            Ok(out)
        }
        "riccatind" => {
            let (p, sigma) = (inputs.matrix("p", 1.0), inputs.scalar("sigma", 0.0));
            let positivity = schrodinger_positivity_with(&p, &sigma, &inputs.atoms, opts)?;
            let (cert, construct_error) = construct_outcome(riccati_construct_nd_with(&p, &sigma, opts))?;
            let mut out = LevelOutput::new(json!({
                "positivity": to_json(&positivity)?,
                "certificate": to_json(&cert)?,
                "construct_error": construct_error,
            }));
            out.quantity("min_rayleigh", positivity.min_rayleigh);
            if let Some(cert) = cert {
                out.quantity("min_slack", cert.min_slack);
                out.sidecar("g", Some(cert.g));
                out.sidecar("slack", Some(cert.slack));
            }
            Ok(out)
        }
        "check-certificate" if grid.dim() == 1 => {
            let (p, b, c) = (inputs.scalar("p", 1.0), inputs.scalar("b", 0.0), inputs.scalar("c", 0.0));
            let cert = riccati_check_1d(&p, &b, &c, &inputs.atoms, &inputs.scalar("f", 0.0))?;
            let mut out = LevelOutput::new(json!({ "certificate": to_json(&cert)? }));
            out.quantity("min_slack", cert.min_slack);
            out.sidecar("slack", Some(cert.slack));
            Ok(out)
        }
        "check-certificate" => {
            let (p, sigma, g) = (inputs.matrix("p", 1.0), inputs.scalar("sigma", 0.0), inputs.vector("g"));
            let cert = riccati_check_nd(&p, &sigma, &g)?;
            let linear = linear_sufficient_check_with(&p, &sigma, &g, opts)?;
            let mut out = LevelOutput::new(json!({
                "certificate": to_json(&cert)?,
                "linear": to_json(&linear)?,
            }));
            out.quantity("min_slack", cert.min_slack);
            out.quantity("quarter_value", linear.quarter_value);
            out.quantity("divergence_min_slack", linear.divergence_min_slack);
            out.sidecar("slack", Some(cert.slack));
            Ok(out)
        }
        other => Err(CliError::scenario(format!("unknown analysis `{other}`"))),
    }
}
