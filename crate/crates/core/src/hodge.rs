//! Decomposition of vector fields into a mean, an irrotational part and the
//! row divergence of a skew-symmetric matrix field.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{
    curl_matrix, div, div_matrix_rows, fft, grad, inv_laplacian, Grid, MatrixField, ScalarField,
    VectorField,
};

/// Tolerance on `max |F + F^T|` relative to `max |F|` for skew inputs.
const SKEW_TOL: f64 = 1e-12;

/// Share of non-mean spectral energy above which a field is flagged as
/// concentrated at the lowest modes.
pub const LOW_MODE_FLAG: f64 = 0.5;

/// `b = mean + grad f + Div F` with `F` skew.
#[derive(Debug, Clone)]
pub struct HodgeParts {
    pub mean: Vec<Complex64>,
    pub potential: ScalarField,
    pub irrotational: VectorField,
    pub skew: MatrixField,
    /// Fraction of the non-mean spectral energy in modes with `max |m_a| <= 1`.
    pub low_mode_fraction: f64,
}

impl HodgeParts {
    pub fn grid(&self) -> &Grid {
        self.potential.grid()
    }

    pub fn solenoidal(&self) -> VectorField {
        div_matrix_rows(&self.skew)
    }

    pub fn reconstruct(&self) -> VectorField {
        let mean = VectorField::constant(*self.grid(), &self.mean).expect("mean has dim entries");
        mean.add(&self.irrotational)
            .and_then(|v| v.add(&self.solenoidal()))
            .expect("same grid")
    }

    /// `max |b - reconstruct()| / max |b|` (absolute when `b = 0`).
    pub fn reconstruction_error(&self, b: &VectorField) -> f64 {
        let err = b.sub(&self.reconstruct()).expect("same grid").max_norm();
        let scale = b.max_norm();
        if scale > 0.0 {
            err / scale
        } else {
            err
        }
    }

    /// `|<grad f, Div F>| / (||grad f|| ||Div F||)`, zero if either part vanishes.
    pub fn orthogonality_defect(&self) -> f64 {
        let s = self.solenoidal();
        let denom = self.irrotational.l2_norm() * s.l2_norm();
        if denom == 0.0 {
            return 0.0;
        }
        self.irrotational.inner(&s).expect("same grid").norm() / denom
    }

    pub fn is_low_mode_dominated(&self) -> bool {
        self.low_mode_fraction > LOW_MODE_FLAG
    }
}

/// Fraction of non-mean spectral energy in the modes adjacent to the mean.
pub fn low_mode_fraction(b: &VectorField) -> f64 {
    let grid = *b.grid();
    let n = grid.points_per_axis();
    let mut low = 0.0;
    let mut total = 0.0;
    for c in b.components() {
        for (l, x) in c.spectral().iter().enumerate() {
            let idx = grid.multi(l);
            let m = (0..grid.dim())
                .map(|a| fft::signed_frequency(idx[a], n).unsigned_abs())
                .max()
                .unwrap_or(0);
            if m == 0 {
                continue;
            }
            let e = x.norm_sqr();
            total += e;
            if m <= 1 {
                low += e;
            }
        }
    }
    if total > 0.0 {
        low / total
    } else {
        0.0
    }
}

/// `f = Δ⁻¹ div b`, `F = -Δ⁻¹ Curl b`, mean kept separately.
pub fn hodge_decompose(b: &VectorField) -> HodgeParts {
    let potential = inv_laplacian(&div(b)).solution;
    let irrotational = grad(&potential);
    let curl = curl_matrix(b);
    let skew = negated_inverse_laplacian(&curl);
    HodgeParts {
        mean: b.mean(),
        potential,
        irrotational,
        skew,
        low_mode_fraction: low_mode_fraction(b),
    }
}

fn negated_inverse_laplacian(f: &MatrixField) -> MatrixField {
    let d = f.grid().dim();
    let mut entries: Vec<ScalarField> = (0..d * d).map(|_| ScalarField::zeros(*f.grid())).collect();
    for j in 0..d {
        for k in j + 1..d {
            let e = inv_laplacian(f.entry(j, k)).solution;
            entries[k * d + j] = e.clone();
            entries[j * d + k] = e.scale(Complex64::new(-1.0, 0.0));
        }
    }
    MatrixField::new(entries).expect("same grid").with_skew_flag(true)
}

/// Decomposition with a prescribed skew part: `F = -Δ⁻¹ Curl(b - Div A_c) + A_c`.
pub fn decompose_with_skew(b: &VectorField, a_c: &MatrixField) -> Result<HodgeParts> {
    b.grid().check_same(a_c.grid())?;
    let defect = a_c.skew_defect();
    if defect > SKEW_TOL * a_c.max_norm().max(1.0) {
        return Err(Error::NotSkew(defect));
    }
    let reduced = b.sub(&div_matrix_rows(a_c))?;
    let mut parts = hodge_decompose(&reduced);
    let d = b.grid().dim();
    let mut entries = parts.skew.entries().to_vec();
    for j in 0..d {
        for k in j + 1..d {
            let e = entries[j * d + k].add(a_c.entry(j, k))?;
            entries[k * d + j] = e.scale(Complex64::new(-1.0, 0.0));
            entries[j * d + k] = e;
        }
    }
    parts.skew = MatrixField::new(entries)?.with_skew_flag(true);
    parts.low_mode_fraction = low_mode_fraction(b);
    Ok(parts)
}

/// `h = grad Δ⁻¹ q` with `div h = q - mean(q)`.
#[derive(Debug, Clone)]
pub struct PotentialField {
    pub field: VectorField,
    pub mean: Complex64,
}

pub fn potential_field(q: &ScalarField) -> PotentialField {
    let inv = inv_laplacian(q);
    PotentialField {
        field: grad(&inv.solution),
        mean: inv.mean,
    }
}

/// Two-dimensional necessary condition `div b = 0` and `q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub div_b_norm: f64,
    pub q_norm: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn two_d_obstruction(b: &VectorField, q: &ScalarField, tolerance: f64) -> Result<ObstructionReport> {
    if b.grid().dim() != 2 {
        return Err(Error::Dimension {
            expected: "dimension 2".into(),
            found: b.grid().dim(),
        });
    }
    b.grid().check_same(q.grid())?;
    let div_b_norm = div(b).l2_norm();
    let q_norm = q.l2_norm();
    Ok(ObstructionReport {
        div_b_norm,
        q_norm,
        tolerance,
        pass: div_b_norm <= tolerance && q_norm <= tolerance,
    })
}
