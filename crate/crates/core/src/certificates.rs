//! Riccati certificates for nonnegativity of real Schrödinger-type forms
//! `<P grad h, grad h> - <sigma h, h>` on the discrete Dirichlet space.
//!
//! A vector field `g` is tested edge by edge. Along the edge from node `a`
//! to its forward neighbour `b` on axis `j`, with weight `w = p_e dV / h^2`
//! and `rho = exp(-h g_e)`,
//!
//! `w (u_b - u_a)^2 >= w (1 - rho) u_a^2 + w (1 - 1/rho) u_b^2`,
//!
//! where `p_e` and `g_e` are the trapezoid averages of `P_jj` and `g_j` over
//! the two endpoints. Edges ending on the boundary ring contribute `w u_a^2`.
//! Summing gives a nodal lower bound `R` for the principal form, and the
//! certificate slack is `R - sigma`. Nonnegative slack at every node implies
//! nonnegativity of the discrete form, and a positive ground state `phi`
//! with `g_e = -ln(phi_b / phi_a) / h` makes the slack equal its eigenvalue.
//!
//! To first order in `h`, `R = div(P g) - P g . g`, so the slack is the
//! nodal residual of `sigma <= div(P g) - (P g) . g`.

use num_complex::Complex64;
use serde::Serialize;

use crate::discrete::DirichletSpace;
use crate::eigen::{largest, smallest, EigenOptions};
use crate::error::{Error, Result};
use crate::field::{div_nyquist_free, Grid, MatrixField, ScalarField, VectorField};
use crate::reduction::{ellipticity_range, PointMass};
use crate::varforms::{schrodinger_positivity_with, AccretivityReport, Verdict};

/// Slack tolerance of the nodal tests.
pub const SLACK_TOL: f64 = 1e-8;

/// Required positivity margin before a certificate is constructed.
pub const CONSTRUCT_MARGIN: f64 = 1e-6;

/// Relative floor added to `|phi|` before taking logarithms.
const GROUND_STATE_FLOOR: f64 = 1e-12;

/// Relative size below which `p` counts as zero.
const DEGENERATE_TOL: f64 = 1e-12;

/// One-dimensional certificate `f` for
/// `Re c - (Re b)'/2 + (Im b)^2/(4p) <= f' - f^2/p`.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate1D {
    pub valid: bool,
    pub min_slack: f64,
    /// Grid index of the smallest slack.
    pub worst_index: Vec<usize>,
    /// Mass-normalized ground-state eigenvalue, for constructed certificates.
    pub ground_state_eigenvalue: Option<f64>,
    #[serde(skip)]
    pub f: ScalarField,
    #[serde(skip)]
    pub slack: ScalarField,
}

/// Certificate `g` for `sigma <= div(P g) - (P g) . g`.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateND {
    pub valid: bool,
    pub min_slack: f64,
    pub worst_index: Vec<usize>,
    pub ground_state_eigenvalue: Option<f64>,
    #[serde(skip)]
    pub g: VectorField,
    #[serde(skip)]
    pub slack: ScalarField,
}

/// Both clauses of the linear test `sigma <= div(P g)` and
/// `int (P g . g) h^2 <= 1/4 int P grad h . grad h`.
#[derive(Debug, Clone, Serialize)]
pub struct LinearCheckReport {
    pub divergence_min_slack: f64,
    pub divergence_valid: bool,
    /// Best constant `C` in `int (P g . g) h^2 <= C int P grad h . grad h`.
    pub quarter_value: f64,
    pub quarter_valid: bool,
    pub valid: bool,
    pub note: &'static str,
    #[serde(skip)]
    pub divergence_slack: ScalarField,
}

const LINEAR_NOTE: &str =
    "sufficient condition only: a failed clause does not imply that the form is indefinite";

/// Diagonal of `P` per axis together with the Dirichlet space.
struct EdgeScheme {
    space: DirichletSpace,
    p: Vec<Vec<f64>>,
}

/// Interior edge or edge to the boundary ring, seen from an unknown.
struct Edge {
    other: Option<usize>,
    grid_here: usize,
    grid_other: usize,
    weight: f64,
}

impl EdgeScheme {
    fn new(p: &MatrixField) -> Result<Self> {
        let grid = *p.grid();
        let d = grid.dim();
        let scale = p.max_norm().max(f64::MIN_POSITIVE);
        for j in 0..d {
            for k in 0..d {
                if j != k && p.entry(j, k).max_norm() > DEGENERATE_TOL * scale {
                    return Err(Error::InvalidParameter(
                        "Riccati certificates require a diagonal principal part".into(),
                    ));
                }
            }
        }
        let p: Vec<Vec<f64>> = (0..d).map(|a| p.entry(a, a).real_parts()).collect();
        if let Some(min) = p.iter().flatten().copied().reduce(f64::min) {
            if min < -DEGENERATE_TOL * scale {
                return Err(Error::NegativeDensity { min });
            }
        }
        Ok(Self {
            space: DirichletSpace::new(&grid)?,
            p,
        })
    }

    fn grid(&self) -> &Grid {
        self.space.grid()
    }

    /// Edge from unknown `i` along `axis`, with density weight `p_e / h^2`.
    fn edge(&self, i: usize, axis: usize, forward: bool) -> Edge {
        let grid = self.grid();
        let here = self.space.grid_multi(i);
        let there = grid.shifted(here, axis, if forward { 1 } else { -1 });
        let grid_here = grid.linear(here);
        let grid_other = grid.linear(there);
        let h = grid.spacing(axis);
        let pe = 0.5 * (self.p[axis][grid_here] + self.p[axis][grid_other]);
        Edge {
            other: self.space.neighbor(i, axis, forward),
            grid_here,
            grid_other,
            weight: pe / (h * h),
        }
    }

    /// Nodal slack density `R - sigma` for nodal `g` given per axis on the grid.
    fn slack(&self, g: &[Vec<f64>], sigma: &[f64]) -> Vec<f64> {
        let d = self.grid().dim();
        (0..self.space.len())
            .map(|i| {
                let mut r = 0.0;
                for a in 0..d {
                    let h = self.grid().spacing(a);
                    for forward in [true, false] {
                        let e = self.edge(i, a, forward);
                        if e.weight == 0.0 {
                            continue;
                        }
                        r += match e.other {
                            None => e.weight,
                            Some(_) => {
                                let ge = 0.5 * (g[a][e.grid_here] + g[a][e.grid_other]);
                                // forward: 1 - exp(-h g_e); backward: 1 - exp(h g_e)
                                let x = if forward { -h * ge } else { h * ge };
                                -e.weight * x.exp_m1()
                            }
                        };
                    }
                }
                r - sigma[i]
            })
            .collect()
    }

    /// Nodal `sigma` density on the unknowns, atoms spread over one cell.
    fn sigma(&self, sigma: &ScalarField, atoms: &[PointMass]) -> Result<Vec<f64>> {
        let real_atoms: Vec<PointMass> = atoms
            .iter()
            .map(|a| PointMass {
                location: a.location,
                weight: Complex64::new(a.weight.re, 0.0),
            })
            .collect();
        let pot = self.space.potential(&sigma.re(), &real_atoms)?;
        let vol = self.space.cell_volume();
        Ok(pot.diag.iter().map(|v| v.re / vol).collect())
    }

    fn to_field(&self, values: &[f64]) -> ScalarField {
        let x: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.space.embed(&x)
    }

    fn worst(&self, slack: &[f64]) -> (f64, Vec<usize>) {
        let (i, min) = slack
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, s)| if s < acc.1 || s.is_nan() { (i, s) } else { acc });
        let d = self.grid().dim();
        (min, self.space.grid_multi(i)[..d].to_vec())
    }

    /// Nodal `g` with trapezoid edge averages equal to `-ln(phi_b/phi_a)/h`
    /// on every interior edge.
    fn ground_state_field(&self, phi: &[f64]) -> Vec<Vec<f64>> {
        let grid = *self.grid();
        let d = grid.dim();
        let m = self.space.interior_per_axis();
        let logs: Vec<f64> = phi.iter().map(|v| v.ln()).collect();
        let mut g = vec![vec![0.0; grid.len()]; d];
        for (a, ga) in g.iter_mut().enumerate() {
            let h = grid.spacing(a);
            let starts = (0..self.space.len()).filter(|&i| self.space.coords(i)[a] == 0);
            for start in starts {
                let mut line = Vec::with_capacity(m);
                let mut cur = Some(start);
                while let Some(i) = cur {
                    line.push(i);
                    cur = self.space.neighbor(i, a, true);
                }
                let n = line.len();
                let edge: Vec<f64> = line.windows(2).map(|w| -(logs[w[1]] - logs[w[0]]) / h).collect();
                let central: Vec<f64> = (0..n)
                    .map(|k| match (k, n) {
                        (_, 1) => 0.0,
                        (0, _) => edge[0],
                        (k, n) if k == n - 1 => edge[n - 2],
                        (k, _) => 0.5 * (edge[k - 1] + edge[k]),
                    })
                    .collect();
                // g_k = (-1)^k x + r_k with r_0 = 0 and r_{k+1} = 2 edge_k - r_k.
                let mut r = vec![0.0; n];
                for k in 0..n.saturating_sub(1) {
                    r[k + 1] = 2.0 * edge[k] - r[k];
                }
                let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
                let x = (0..n).map(|k| sign(k) * (central[k] - r[k])).sum::<f64>() / n as f64;
                for (k, i) in line.iter().enumerate() {
                    ga[self.space.grid_index(*i)] = sign(k) * x + r[k];
                }
            }
        }
        g
    }

    /// Positive ground state of `K_P - Sigma` against the mass `dV I`.
    fn ground_state(
        &self,
        p: &MatrixField,
        sigma: &ScalarField,
        atoms: &[PointMass],
        opts: &EigenOptions,
    ) -> Result<(f64, Vec<f64>)> {
        let space = &self.space;
        let kp = crate::varforms::principal_form(space, p)?;
        let pot = crate::varforms::real_potential(space, sigma, atoms)?;
        let vol = space.cell_volume();
        let a = |x: &[Complex64]| -> Vec<Complex64> {
            kp.apply(x).iter().zip(pot.apply(x)).map(|(k, s)| -k - s).collect()
        };
        let mass = |x: &[Complex64]| -> Vec<Complex64> { x.iter().map(|v| v * vol).collect() };
        let t = |x: &[Complex64]| space.solve(x, 0.0);
        let pair = smallest(&a, &mass, &t, space.len(), &opts.real())?;
        let top = pair.vector.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let floor = GROUND_STATE_FLOOR * top;
        let phi = pair.vector.iter().map(|v| v.norm() + floor).collect();
        Ok((pair.value, phi))
    }
}

/// Effective potential `Re c - (Re b)'/2 + (Im b)^2/(4p)` with `0/0 = 0`.
/// `None` when `Im b` is nonzero at a zero of `p`.
fn effective_potential_1d(p: &ScalarField, b: &ScalarField, c: &ScalarField) -> Result<Option<ScalarField>> {
    let grid = *p.grid();
    if grid.dim() != 1 {
        return Err(Error::Dimension {
            expected: "dimension 1".into(),
            found: grid.dim(),
        });
    }
    grid.check_same(b.grid())?;
    grid.check_same(c.grid())?;
    let pv = p.real_parts();
    let pmax = pv.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if let Some(min) = pv.iter().copied().reduce(f64::min) {
        if min < -DEGENERATE_TOL * pmax {
            return Err(Error::NegativeDensity { min });
        }
    }
    let bmax = b.max_norm().max(1.0);
    let drift = div_nyquist_free(&VectorField::new(vec![b.re()])?).real_parts();
    let mut out = Vec::with_capacity(grid.len());
    for (l, (pl, cl)) in pv.iter().zip(c.values()).enumerate() {
        let ib = b.values()[l].im;
        let magnetic = if *pl <= DEGENERATE_TOL * pmax {
            if ib.abs() > DEGENERATE_TOL * bmax {
                return Ok(None);
            }
            0.0
        } else {
            ib * ib / (4.0 * pl)
        };
        out.push(cl.re - 0.5 * drift[l] + magnetic);
    }
    Ok(Some(ScalarField::from_real(grid, &out)?))
}

fn principal_1d(p: &ScalarField) -> Result<MatrixField> {
    MatrixField::diagonal(vec![p.re()])
}

pub fn form_nonneg_1d(p: &ScalarField, b: &ScalarField, c: &ScalarField, atoms: &[PointMass]) -> Result<AccretivityReport> {
    form_nonneg_1d_with(p, b, c, atoms, &EigenOptions::default())
}

/// Smallest value of
/// `(int p h'^2 - <Re c - (Re b)'/2 + (Im b)^2/(4p), h^2>) / int h'^2`
/// over real `h` in the discrete Dirichlet space.
pub fn form_nonneg_1d_with(
    p: &ScalarField,
    b: &ScalarField,
    c: &ScalarField,
    atoms: &[PointMass],
    opts: &EigenOptions,
) -> Result<AccretivityReport> {
    match effective_potential_1d(p, b, c)? {
        Some(sigma) => schrodinger_positivity_with(&principal_1d(p)?, &sigma, atoms, opts),
        None => Ok(AccretivityReport {
            min_rayleigh: f64::NEG_INFINITY,
            verdict: Verdict::Not,
            upper_eps: None,
            lower_k: None,
            direction: None,
            iterations: 0,
            residual: 0.0,
            refinement_trace: vec![(p.grid().points_per_axis(), f64::NEG_INFINITY)],
            witness_u: None,
        }),
    }
}

/// Nodal test of `Re c - (Re b)'/2 + (Im b)^2/(4p) <= f' - f^2/p`.
pub fn riccati_check_1d(
    p: &ScalarField,
    b: &ScalarField,
    c: &ScalarField,
    atoms: &[PointMass],
    f: &ScalarField,
) -> Result<Certificate1D> {
    p.grid().check_same(f.grid())?;
    let sigma = effective_potential_1d(p, b, c)?;
    let scheme = EdgeScheme::new(&principal_1d(p)?)?;
    let pmax = scheme.p[0].iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let fv = f.real_parts();
    let mut blowup = Vec::new();
    let g: Vec<f64> = fv
        .iter()
        .zip(&scheme.p[0])
        .enumerate()
        .map(|(l, (fl, pl))| {
            if *pl > DEGENERATE_TOL * pmax {
                fl / pl
            } else {
                if *fl != 0.0 {
                    blowup.push(l);
                }
                0.0
            }
        })
        .collect();
    let mut slack = match &sigma {
        Some(s) => scheme.slack(std::slice::from_ref(&g), &scheme.sigma(s, atoms)?),
        None => vec![f64::NEG_INFINITY; scheme.space.len()],
    };
    for (i, s) in slack.iter_mut().enumerate() {
        if blowup.contains(&scheme.space.grid_index(i)) {
            *s = f64::NEG_INFINITY;
        }
    }
    let (min_slack, worst_index) = scheme.worst(&slack);
    Ok(Certificate1D {
        valid: min_slack >= -SLACK_TOL,
        min_slack,
        worst_index,
        ground_state_eigenvalue: None,
        f: f.re(),
        slack: scheme.to_field(&slack),
    })
}

pub fn riccati_construct_1d(p: &ScalarField, b: &ScalarField, c: &ScalarField, atoms: &[PointMass]) -> Result<Certificate1D> {
    riccati_construct_1d_with(p, b, c, atoms, &EigenOptions::default())
}

/// Certificate `f = -p phi'/phi` from the positive discrete ground state
/// `phi`. Requires `p` bounded below by a positive constant and a
/// positivity margin of [`CONSTRUCT_MARGIN`].
pub fn riccati_construct_1d_with(
    p: &ScalarField,
    b: &ScalarField,
    c: &ScalarField,
    atoms: &[PointMass],
    opts: &EigenOptions,
) -> Result<Certificate1D> {
    let sigma = effective_potential_1d(p, b, c)?.ok_or_else(|| Error::Indefinite {
        min: f64::NEG_INFINITY,
        witness_peak: Vec::new(),
    })?;
    let pm = principal_1d(p)?;
    let nd = construct(&pm, &sigma, atoms, opts)?;
    let check = riccati_check_1d(p, b, c, atoms, &nd.g.component(0).mul(&p.re())?)?;
    Ok(Certificate1D {
        ground_state_eigenvalue: nd.ground_state_eigenvalue,
        ..check
    })
}

/// Nodal test of `sigma <= div(P g) - (P g) . g` for diagonal `P`.
pub fn riccati_check_nd(p: &MatrixField, sigma: &ScalarField, g: &VectorField) -> Result<CertificateND> {
    check(p, sigma, &[], g)
}

fn check(p: &MatrixField, sigma: &ScalarField, atoms: &[PointMass], g: &VectorField) -> Result<CertificateND> {
    p.grid().check_same(sigma.grid())?;
    p.grid().check_same(g.grid())?;
    let scheme = EdgeScheme::new(p)?;
    let gv: Vec<Vec<f64>> = g.components().iter().map(|c| c.real_parts()).collect();
    let slack = scheme.slack(&gv, &scheme.sigma(sigma, atoms)?);
    let (min_slack, worst_index) = scheme.worst(&slack);
    Ok(CertificateND {
        valid: min_slack >= -SLACK_TOL,
        min_slack,
        worst_index,
        ground_state_eigenvalue: None,
        g: g.re(),
        slack: scheme.to_field(&slack),
    })
}

pub fn riccati_construct_nd(p: &MatrixField, sigma: &ScalarField) -> Result<CertificateND> {
    riccati_construct_nd_with(p, sigma, &EigenOptions::default())
}

/// Certificate `g = -grad(phi)/phi` from the positive discrete ground state.
pub fn riccati_construct_nd_with(p: &MatrixField, sigma: &ScalarField, opts: &EigenOptions) -> Result<CertificateND> {
    construct(p, sigma, &[], opts)
}

fn construct(p: &MatrixField, sigma: &ScalarField, atoms: &[PointMass], opts: &EigenOptions) -> Result<CertificateND> {
    let scheme = EdgeScheme::new(p)?;
    let (lo, hi) = ellipticity_range(&p.re());
    if lo <= DEGENERATE_TOL * hi.abs() || lo <= 0.0 {
        return Err(Error::InvalidParameter(
            "certificate construction requires a uniformly elliptic principal part".into(),
        ));
    }
    let positivity = schrodinger_positivity_with(p, sigma, atoms, opts)?;
    let min = positivity.min_rayleigh;
    if min < -crate::varforms::MARGINAL_BAND {
        let witness_peak = positivity
            .witness_u
            .as_ref()
            .map(|w| {
                let l = w
                    .values()
                    .iter()
                    .enumerate()
                    .fold((0, 0.0), |acc, (l, v)| if v.norm() > acc.1 { (l, v.norm()) } else { acc })
                    .0;
                w.grid().multi(l)[..w.grid().dim()].to_vec()
            })
            .unwrap_or_default();
        return Err(Error::Indefinite { min, witness_peak });
    }
    if min < CONSTRUCT_MARGIN {
        return Err(Error::Marginal {
            min,
            margin: CONSTRUCT_MARGIN,
        });
    }
    let (lambda, phi) = scheme.ground_state(p, sigma, atoms, opts)?;
    let gv = scheme.ground_state_field(&phi);
    let grid = *p.grid();
    let g = VectorField::new(
        gv.iter()
            .map(|c| ScalarField::from_real(grid, c))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let cert = check(p, sigma, atoms, &g)?;
    Ok(CertificateND {
        ground_state_eigenvalue: Some(lambda),
        ..cert
    })
}

pub fn linear_sufficient_check(p: &MatrixField, sigma: &ScalarField, g: &VectorField) -> Result<LinearCheckReport> {
    linear_sufficient_check_with(p, sigma, g, &EigenOptions::default())
}

/// Linear sufficient test. The divergence clause uses the same edge averages
/// as the Riccati test; the quarter clause compares the nodal weight
/// `sum_e p_e g_e^2 / 2` over the edges at a node with the P-weighted
/// Dirichlet form.
pub fn linear_sufficient_check_with(
    p: &MatrixField,
    sigma: &ScalarField,
    g: &VectorField,
    opts: &EigenOptions,
) -> Result<LinearCheckReport> {
    p.grid().check_same(sigma.grid())?;
    p.grid().check_same(g.grid())?;
    let scheme = EdgeScheme::new(p)?;
    let space = &scheme.space;
    let d = space.dim();
    let gv: Vec<Vec<f64>> = g.components().iter().map(|c| c.real_parts()).collect();
    let sig = scheme.sigma(sigma, &[])?;
    let mut div_slack = Vec::with_capacity(space.len());
    let mut weight = Vec::with_capacity(space.len());
    for (i, s) in sig.iter().enumerate() {
        let (mut div, mut w) = (0.0, 0.0);
        for (a, ga) in gv.iter().enumerate().take(d) {
            let h = space.spacing(a);
            for forward in [true, false] {
                let e = scheme.edge(i, a, forward);
                let ge = 0.5 * (ga[e.grid_here] + ga[e.grid_other]);
                let flux = e.weight * h * ge;
                div += if forward { flux } else { -flux };
                w += 0.5 * e.weight * h * h * ge * ge;
            }
        }
        div_slack.push(div - s);
        weight.push(w);
    }
    let (divergence_min_slack, _) = scheme.worst(&div_slack);
    let quarter_value = if weight.iter().all(|w| *w == 0.0) {
        0.0
    } else {
        let vol = space.cell_volume();
        let kp = crate::varforms::principal_form(space, p)?;
        let kpos = |x: &[Complex64]| -> Vec<Complex64> { kp.apply(x).into_iter().map(|v| -v).collect() };
        let wm = |x: &[Complex64]| -> Vec<Complex64> { x.iter().zip(&weight).map(|(v, w)| v * (w * vol)).collect() };
        let t = |x: &[Complex64]| space.solve(x, 0.0);
        largest(&wm, &kpos, &t, space.len(), &opts.real())?.value
    };
    let divergence_valid = divergence_min_slack >= -SLACK_TOL;
    let quarter_valid = quarter_value <= 0.25 + SLACK_TOL;
    Ok(LinearCheckReport {
        divergence_min_slack,
        divergence_valid,
        quarter_value,
        quarter_valid,
        valid: divergence_valid && quarter_valid,
        note: LINEAR_NOTE,
        divergence_slack: scheme.to_field(&div_slack),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn interval(n: usize) -> Grid {
        Grid::new(1, n, PI).unwrap().with_inner_fraction(1.0).unwrap()
    }

    fn constant(g: Grid, v: f64) -> ScalarField {
        ScalarField::constant(g, Complex64::new(v, 0.0))
    }

    #[test]
    fn zero_certificate_accepts_nonpositive_potentials() {
        let g = interval(64);
        let (one, zero) = (constant(g, 1.0), constant(g, 0.0));
        let c = ScalarField::from_real_fn(g, |x| -x[0].sin()).unwrap();
        assert!(riccati_check_1d(&one, &zero, &c, &[], &zero).unwrap().valid);
        let c = constant(g, 0.1);
        assert!(!riccati_check_1d(&one, &zero, &c, &[], &zero).unwrap().valid);
    }

    #[test]
    fn ground_state_slack_is_the_eigenvalue() {
        let g = interval(64);
        let (one, zero) = (constant(g, 1.0), constant(g, 0.0));
        let cert = riccati_construct_1d(&one, &zero, &constant(g, 0.5), &[]).unwrap();
        assert!(cert.valid);
        let lambda = cert.ground_state_eigenvalue.unwrap();
        let space = DirichletSpace::new(&g).unwrap();
        assert!((lambda - (space.first_eigenvalue() - 0.5)).abs() < 1e-9);
        let space_slack = space.restrict(&cert.slack).unwrap();
        for s in space_slack {
            assert!((s.re - lambda).abs() < 1e-7 * (1.0 + lambda), "{s}");
        }
    }

    #[test]
    fn constructor_refuses_past_the_threshold() {
        let g = interval(64);
        let (one, zero) = (constant(g, 1.0), constant(g, 0.0));
        match riccati_construct_1d(&one, &zero, &constant(g, 1.2), &[]) {
            Err(Error::Indefinite { min, witness_peak }) => {
                assert!(min < 0.0);
                assert_eq!(witness_peak.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_p_with_imaginary_drift_is_not_accretive() {
        let g = interval(64);
        let p = ScalarField::from_real_fn(g, |x| (x[0] - PI / 2.0).powi(2)).unwrap();
        let b = ScalarField::constant(g, Complex64::new(0.0, 1.0));
        let r = form_nonneg_1d(&p, &b, &constant(g, 0.0), &[]).unwrap();
        assert_eq!(r.verdict, Verdict::Not);
    }

    #[test]
    fn non_diagonal_principal_part_is_rejected() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let mut entries: Vec<ScalarField> = (0..4).map(|_| constant(g, 0.0)).collect();
        entries[0] = constant(g, 1.0);
        entries[3] = constant(g, 1.0);
        entries[1] = constant(g, 0.2);
        entries[2] = constant(g, 0.2);
        let p = MatrixField::new(entries).unwrap();
        let err = riccati_check_nd(&p, &constant(g, 0.0), &VectorField::zeros(g));
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn linear_check_with_zero_field() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let p = MatrixField::identity(g);
        let r = linear_sufficient_check(&p, &constant(g, -1.0), &VectorField::zeros(g)).unwrap();
        assert!(r.valid && r.quarter_value == 0.0);
        let r = linear_sufficient_check(&p, &constant(g, 1.0), &VectorField::zeros(g)).unwrap();
        assert!(!r.divergence_valid);
    }
}
