//! Coefficient families evaluated on a grid.

use std::path::Path;

use formlab::field::io::FieldFile;
use formlab::field::{grad, random_band_limited};
use formlab::profiles::{hardy, hardy_vector, log_distance, perp_gradient, power};
use formlab::{Grid, MatrixField, ScalarField, VectorField};
use num_complex::Complex64;

use crate::error::{CliError, Result};
use crate::scenario::{ConstValue, FamilySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    Vector,
    Matrix,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Scalar => "scalar",
            Kind::Vector => "vector",
            Kind::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Scalar(ScalarField),
    Vector(VectorField),
    Matrix(MatrixField),
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Scalar(_) => Kind::Scalar,
            Value::Vector(_) => Kind::Vector,
            Value::Matrix(_) => Kind::Matrix,
        }
    }

    pub fn into_scalar(self) -> ScalarField {
        match self {
            Value::Scalar(f) => f,
            _ => unreachable!("kind checked at build time"),
        }
    }

    pub fn into_vector(self) -> VectorField {
        match self {
            Value::Vector(f) => f,
            _ => unreachable!("kind checked at build time"),
        }
    }

    pub fn into_matrix(self) -> MatrixField {
        match self {
            Value::Matrix(f) => f,
            _ => unreachable!("kind checked at build time"),
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::scenario(msg)
}

fn core(e: formlab::Error) -> CliError {
    CliError::scenario(e.to_string())
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn center(grid: &Grid, given: &Option<Vec<f64>>) -> Result<[f64; 3]> {
    match given {
        None => Ok(grid.inner_center()),
        Some(v) if v.len() == grid.dim() => {
            let mut out = [0.0; 3];
            out[..v.len()].copy_from_slice(v);
            Ok(out)
        }
        Some(v) => Err(bad(format!("center has {} entries, grid dimension is {}", v.len(), grid.dim()))),
    }
}

/// Converts a scalar to the requested kind: `s I` for matrices, the single
/// component for vectors in one dimension.
fn promote(value: Value, want: Kind, family: &str) -> Result<Value> {
    match (value, want) {
        (v, w) if v.kind() == w => Ok(v),
        (Value::Scalar(s), Kind::Matrix) => {
            let d = s.grid().dim();
            Ok(Value::Matrix(MatrixField::diagonal(vec![s; d]).map_err(core)?))
        }
        (Value::Scalar(s), Kind::Vector) if s.grid().dim() == 1 => {
            Ok(Value::Vector(VectorField::new(vec![s]).map_err(core)?))
        }
        (v, w) => Err(bad(format!(
            "family `{family}` gives a {} field where a {} field is required",
            v.kind().name(),
            w.name()
        ))),
    }
}

/// Evaluates `spec` on `grid` as a field of kind `want`. Random families mix
/// their own seed with `seed`; relative file paths resolve against `base`.
pub fn build(spec: &FamilySpec, grid: &Grid, want: Kind, seed: u64, base: &Path) -> Result<Value> {
    match spec {
        FamilySpec::Constant { value } => {
            let d = grid.dim();
            let v = match value {
                ConstValue::Scalar(s) => Value::Scalar(ScalarField::constant(*grid, c(*s))),
                ConstValue::List(l) if l.len() == d && want != Kind::Matrix => {
                    let vals: Vec<Complex64> = l.iter().map(|x| c(*x)).collect();
                    Value::Vector(VectorField::constant(*grid, &vals).map_err(core)?)
                }
                ConstValue::List(l) if l.len() == d * d => Value::Matrix(
                    MatrixField::new(l.iter().map(|x| ScalarField::constant(*grid, c(*x))).collect()).map_err(core)?,
                ),
                ConstValue::List(l) => {
                    return Err(bad(format!("constant list of length {} fits neither {d} nor {}", l.len(), d * d)))
                }
            };
            promote(v, want, "constant")
        }
        FamilySpec::GradientOf { of } => {
            let f = build(of, grid, Kind::Scalar, seed, base)?.into_scalar();
            promote(Value::Vector(grad(&f)), want, "gradient_of")
        }
        FamilySpec::PerpGradientOf { of } => {
            if grid.dim() != 2 {
                return Err(bad("perp_gradient_of needs a two-dimensional grid"));
            }
            let f = build(of, grid, Kind::Scalar, seed, base)?.into_scalar();
            promote(Value::Vector(perp_gradient(&f).map_err(core)?), want, "perp_gradient_of")
        }
        FamilySpec::LogBmo { scale, center: x0 } => {
            let f = log_distance(grid, center(grid, x0)?).map_err(core)?.scale(c(*scale));
            promote(Value::Scalar(f), want, "log_bmo")
        }
        FamilySpec::Hardy { gamma, center: x0 } => {
            let x0 = center(grid, x0)?;
            if want == Kind::Vector && grid.dim() > 1 {
                Ok(Value::Vector(hardy_vector(grid, *gamma, x0).map_err(core)?))
            } else {
                promote(Value::Scalar(hardy(grid, *gamma, x0).map_err(core)?), want, "hardy")
            }
        }
        FamilySpec::Power {
            exponent,
            scale,
            center: x0,
        } => {
            let f = power(grid, center(grid, x0)?, *exponent).map_err(core)?.scale(c(*scale));
            promote(Value::Scalar(f), want, "power")
        }
        FamilySpec::Bump {
            width,
            amplitude,
            center: x0,
        } => {
            if !(*width > 0.0) {
                return Err(bad("bump width must be positive"));
            }
            let x0 = center(grid, x0)?;
            let f = ScalarField::from_real_fn(*grid, |x| {
                let off = grid.periodic_offset(x, x0);
                let r2: f64 = off.iter().map(|o| o * o).sum();
                amplitude * (-r2 / (2.0 * width * width)).exp()
            })
            .map_err(core)?;
            promote(Value::Scalar(f), want, "bump")
        }
        FamilySpec::RandomBandLimited {
            seed: own,
            band,
            real,
            amplitude,
        } => {
            let mixed = own.wrapping_add(seed.wrapping_mul(1_000_003));
            let count = match want {
                Kind::Scalar => 1,
                Kind::Vector => grid.dim(),
                Kind::Matrix => grid.dim() * grid.dim(),
            };
            let comps = (0..count as u64)
                .map(|k| {
                    random_band_limited(grid, mixed.wrapping_mul(31).wrapping_add(k), *band, *real)
                        .map(|f| f.scale(c(*amplitude)))
                        .map_err(core)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(match want {
                Kind::Scalar => Value::Scalar(comps.into_iter().next().expect("one component")),
                Kind::Vector => Value::Vector(VectorField::new(comps).map_err(core)?),
                Kind::Matrix => Value::Matrix(MatrixField::new(comps).map_err(core)?),
            })
        }
        FamilySpec::File { path } => {
            let path = if path.is_absolute() { path.clone() } else { base.join(path) };
            let file = FieldFile::load(&path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
            if !file.grid().same_shape(grid) {
                return Err(bad(format!("{} does not match the grid of this level", path.display())));
            }
            let v = match file {
                FieldFile::Scalar(f) => Value::Scalar(f),
                FieldFile::Vector(f) => Value::Vector(f),
                FieldFile::Matrix(f) => Value::Matrix(f),
            };
            promote(v, want, "file")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_promote_to_identity_multiples() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let spec = FamilySpec::Constant {
            value: ConstValue::Scalar(2.0),
        };
        let m = build(&spec, &g, Kind::Matrix, 0, Path::new(".")).unwrap().into_matrix();
        assert_eq!(m.entry(0, 0).values()[0], c(2.0));
        assert_eq!(m.entry(0, 1).values()[0], c(0.0));
        assert!(build(&spec, &g, Kind::Vector, 0, Path::new(".")).is_err());
    }

    #[test]
    fn random_fields_are_seeded() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let spec = FamilySpec::RandomBandLimited {
            seed: 3,
            band: 2,
            real: true,
            amplitude: 1.0,
        };
        let a = build(&spec, &g, Kind::Scalar, 1, Path::new(".")).unwrap().into_scalar();
        let b = build(&spec, &g, Kind::Scalar, 1, Path::new(".")).unwrap().into_scalar();
        let other = build(&spec, &g, Kind::Scalar, 2, Path::new(".")).unwrap().into_scalar();
        assert_eq!(a, b);
        assert_ne!(a, other);
    }
}
