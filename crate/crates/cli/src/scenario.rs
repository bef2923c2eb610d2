//! Scenario files: a TOML document with a grid, named coefficient fields and
//! one table per analysis.
//!
//! ```toml
//! name = "hardy"
//! seed = 7
//!
//! [grid]
//! dim = 3
//! points = 32
//! side = 1.0
//!
//! [refinement]
//! levels = [16, 32]
//!
//! [coefficients.sigma]
//! family = "hardy"
//! gamma = 0.2
//!
//! [analysis.riccatind]
//! tol = 1e-8
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use formlab::reduction::PointMass;
use formlab::Grid;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Analyses in the order they are reported.
pub const ANALYSES: [&str; 10] = [
    "accretivity",
    "check-certificate",
    "commutator",
    "decompose",
    "formbound",
    "magnetic",
    "norms",
    "riccati1d",
    "riccatind",
    "subordination",
];

/// Default cap on grid points per level.
pub const DEFAULT_MAX_POINTS: usize = 1 << 24;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSpec,
    #[serde(default)]
    pub refinement: Refinement,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub coefficients: BTreeMap<String, FamilySpec>,
    /// One-dimensional point masses of the zeroth-order term.
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub analysis: BTreeMap<String, AnalysisSpec>,
    /// Directory of the scenario file, for relative field paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub points: usize,
    #[serde(default = "one")]
    pub side: f64,
    #[serde(default)]
    pub inner_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Refinement {
    /// Points per axis of each level; the grid's own size when empty.
    #[serde(default)]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub max_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub location: f64,
    pub mass: f64,
}

/// Constant value: a number, or a list of `dim` (vector) or `dim^2`
/// (row-major matrix) numbers.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConstValue {
    Scalar(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Constant {
        value: ConstValue,
    },
    GradientOf {
        of: Box<FamilySpec>,
    },
    PerpGradientOf {
        of: Box<FamilySpec>,
    },
    /// `scale log|x - x0|`, regularized at the grid scale.
    LogBmo {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `gamma |x - x0|^-2` as a scalar, `gamma (x - x0) |x - x0|^-2` as a vector.
    Hardy {
        gamma: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `scale |x - x0|^exponent`, regularized at the grid scale.
    Power {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `amplitude exp(-|x - x0|^2 / (2 width^2))`.
    Bump {
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    RandomBandLimited {
        #[serde(default)]
        seed: u64,
        #[serde(default = "two")]
        band: usize,
        #[serde(default = "yes")]
        real: bool,
        #[serde(default = "one")]
        amplitude: f64,
    },
    File {
        path: PathBuf,
    },
}

/// Options of one analysis table. Each analysis reads the keys it knows.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Relative residual of the eigen-solver.
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    /// `"divergence"` (default) or `"nondivergence"`.
    pub form: Option<String>,
    #[serde(default)]
    pub mass_term: bool,
    /// Commutator: also run the Hodge cross-check.
    #[serde(default)]
    pub crosscheck: bool,
    pub window: Option<f64>,
    /// Subordination: `infinitesimal`, `trudinger`, `p_subordination`, `nash`.
    pub mode: Option<String>,
    pub p: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    /// Norms: any of `trace`, `bmo`, `lip`, `morrey`.
    pub which: Option<Vec<String>>,
    pub alpha: Option<f64>,
    pub s: Option<f64>,
    /// Decompose: tolerance of the two-dimensional obstruction test.
    pub obstruction_tol: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

fn yes() -> bool {
    true
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::scenario(format!("cannot read {}: {e}", path.display())))?;
        let mut s = Self::parse(&text)?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(s)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let s: Self = toml::from_str(text).map_err(|e| CliError::scenario(e.to_string()))?;
        for name in s.analysis.keys() {
            if !ANALYSES.contains(&name.as_str()) {
                return Err(CliError::scenario(format!("unknown analysis `{name}`")));
            }
        }
        Ok(s)
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| "scenario".into())
    }

    pub fn max_points(&self) -> usize {
        self.refinement.max_points.unwrap_or(DEFAULT_MAX_POINTS)
    }

    /// Grids of all refinement levels, checked against the memory cap.
    pub fn grids(&self) -> Result<Vec<Grid>> {
        let levels = if self.refinement.levels.is_empty() {
            vec![self.grid.points]
        } else {
            self.refinement.levels.clone()
        };
        let cap = self.max_points();
        levels
            .into_iter()
            .map(|n| {
                let total = (n as u128).checked_pow(self.grid.dim as u32).unwrap_or(u128::MAX);
                if total > cap as u128 {
                    return Err(CliError::scenario(format!(
                        "level {n} has {total} points, above the cap {cap}"
                    )));
                }
                let g = Grid::new(self.grid.dim, n, self.grid.side).map_err(|e| CliError::scenario(e.to_string()))?;
                match self.grid.inner_fraction {
                    Some(f) => g.with_inner_fraction(f).map_err(|e| CliError::scenario(e.to_string())),
                    None => Ok(g),
                }
            })
            .collect()
    }

    pub fn point_masses(&self) -> Vec<PointMass> {
        self.atoms
            .iter()
            .map(|a| PointMass {
                location: a.location,
                weight: Complex64::new(a.mass, 0.0),
            })
            .collect()
    }

    /// Options of `name`, defaults when the scenario has no table for it.
    pub fn analysis_spec(&self, name: &str) -> AnalysisSpec {
        self.analysis.get(name).cloned().unwrap_or_default()
    }
}
