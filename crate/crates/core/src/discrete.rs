//! Finite-difference quadratic forms on the grid nodes strictly inside the
//! inner sub-box, with zero values on its boundary ring, plus the periodic
//! counterparts used on the whole torus.
//!
//! The principal part uses the corner-gradient form
//! `S_A(u, v) = 2^-n sum_x sum_s sum_jk A_jk(x) g_sk(u) conj(g_sj(v)) dV`,
//! where `g_sj(u) = s_j (u(x + s_j h_j e_j) - u(x)) / h_j` for every sign
//! vector `s`. For `A = I` it is the standard `(2n+1)`-point Dirichlet form.
//! First-order terms use the antisymmetrized centered difference
//! `T_b(u, v) = 1/2 sum b . (D0 u conj(v) - u D0 conj(v)) dV`, so the real
//! part of the quadratic form only sees the potential and the imaginary drift.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{
    div_matrix_rows_nyquist_free, div_nyquist_free, fft, Grid, MatrixField, ScalarField,
    VectorField,
};
use crate::reduction::{split_symmetric, to_divergence_form, CoefficientSet, FormTag, PointMass};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unknowns at the interior nodes of the inner sub-box.
#[derive(Debug, Clone)]
pub struct DirichletSpace {
    grid: Grid,
    lo: usize,
    m: usize,
    strides: [usize; 3],
    eigenvalues: Vec<f64>,
}

impl DirichletSpace {
    pub fn new(grid: &Grid) -> Result<Self> {
        let (lo, hi) = grid.inner_bounds();
        if hi < lo + 2 {
            return Err(Error::InvalidGrid("inner sub-box has no interior node".into()));
        }
        let m = hi - lo - 1;
        let d = grid.dim();
        let mut strides = [0; 3];
        for (a, s) in strides.iter_mut().enumerate().take(d) {
            *s = m.pow((d - 1 - a) as u32);
        }
        let vol = grid.cell_volume();
        let axis_eigs: Vec<Vec<f64>> = (0..d)
            .map(|a| {
                let h = grid.spacing(a);
                (1..=m)
                    .map(|k| {
                        (2.0 - 2.0 * (std::f64::consts::PI * k as f64 / (m + 1) as f64).cos())
                            / (h * h)
                    })
                    .collect()
            })
            .collect();
        let len = m.pow(d as u32);
        let eigenvalues = (0..len)
            .map(|i| {
                let c = coords(i, d, m);
                vol * (0..d).map(|a| axis_eigs[a][c[a]]).sum::<f64>()
            })
            .collect();
        Ok(Self {
            grid: *grid,
            lo,
            m,
            strides,
            eigenvalues,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Interior nodes per axis.
    pub fn interior_per_axis(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.grid.cell_volume()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.grid.spacing(axis)
    }

    /// Interior coordinates `0..m` of unknown `i`.
    #[inline]
    pub fn coords(&self, i: usize) -> [usize; 3] {
        coords(i, self.dim(), self.m)
    }

    /// Grid multi-index of unknown `i`.
    pub fn grid_multi(&self, i: usize) -> [usize; 3] {
        let c = self.coords(i);
        let mut idx = [0; 3];
        for a in 0..self.dim() {
            idx[a] = self.lo + 1 + c[a];
        }
        idx
    }

    pub fn grid_index(&self, i: usize) -> usize {
        self.grid.linear(self.grid_multi(i))
    }

    /// Grid linear index of closed-box local coordinates `t` in `0..=m+1`.
    fn closed_grid_index(&self, t: [usize; 3]) -> usize {
        let n = self.grid.points_per_axis();
        let mut idx = [0; 3];
        for a in 0..self.dim() {
            idx[a] = (self.lo + t[a]) % n;
        }
        self.grid.linear(idx)
    }

    /// Unknown index of closed-box coordinates, `None` on the boundary ring.
    #[inline]
    fn interior_of_closed(&self, t: [isize; 3]) -> Option<usize> {
        let mut i = 0;
        for a in 0..self.dim() {
            if t[a] < 1 || t[a] > self.m as isize {
                return None;
            }
            i += (t[a] as usize - 1) * self.strides[a];
        }
        Some(i)
    }

    /// Neighbour of unknown `i` one step along `axis`, `None` on the boundary ring.
    #[inline]
    pub fn neighbor(&self, i: usize, axis: usize, forward: bool) -> Option<usize> {
        let c = self.coords(i)[axis];
        if forward {
            (c + 1 < self.m).then(|| i + self.strides[axis])
        } else {
            (c > 0).then(|| i - self.strides[axis])
        }
    }

    pub fn restrict(&self, f: &ScalarField) -> Result<Vec<Complex64>> {
        self.grid.check_same(f.grid())?;
        Ok((0..self.len()).map(|i| f.values()[self.grid_index(i)]).collect())
    }

    /// Zero extension of interior values to the whole grid.
    pub fn embed(&self, x: &[Complex64]) -> ScalarField {
        let mut vals = vec![ZERO; self.grid.len()];
        for (i, v) in x.iter().enumerate() {
            vals[self.grid_index(i)] = *v;
        }
        ScalarField::new(self.grid, vals).expect("finite values")
    }

    /// Dirichlet Laplacian matrix `K`, with `x^H K x = ||grad_h x||^2`.
    pub fn laplacian(&self, x: &[Complex64]) -> Vec<Complex64> {
        let vol = self.cell_volume();
        let d = self.dim();
        let inv_h2: Vec<f64> = (0..d).map(|a| 1.0 / self.spacing(a).powi(2)).collect();
        (0..self.len())
            .map(|i| {
                let mut acc = ZERO;
                for (a, w) in inv_h2.iter().enumerate() {
                    let mut s = x[i] * 2.0;
                    if let Some(j) = self.neighbor(i, a, true) {
                        s -= x[j];
                    }
                    if let Some(j) = self.neighbor(i, a, false) {
                        s -= x[j];
                    }
                    acc += s * *w;
                }
                acc * vol
            })
            .collect()
    }

    /// Eigenvalues of `K` in the sine basis, indexed like the unknowns.
    pub fn laplacian_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue of `K` relative to the mass matrix `dV I`.
    pub fn first_eigenvalue(&self) -> f64 {
        self.eigenvalues[0] / self.cell_volume()
    }

    /// `(K + mass dV I)^-1 x` by the type-I sine transform.
    pub fn solve(&self, x: &[Complex64], mass: f64) -> Vec<Complex64> {
        let mut y = x.to_vec();
        fft::dst1(&mut y, self.dim(), self.m);
        let shift = mass * self.cell_volume();
        for (v, l) in y.iter_mut().zip(&self.eigenvalues) {
            *v /= l + shift;
        }
        fft::dst1(&mut y, self.dim(), self.m);
        y
    }

    /// `(K + mass dV I)^s x` for real `s`.
    pub fn power(&self, x: &[Complex64], mass: f64, s: f64) -> Vec<Complex64> {
        let mut y = x.to_vec();
        fft::dst1(&mut y, self.dim(), self.m);
        let shift = mass * self.cell_volume();
        for (v, l) in y.iter_mut().zip(&self.eigenvalues) {
            *v *= (l + shift).powf(s);
        }
        fft::dst1(&mut y, self.dim(), self.m);
        y
    }

    pub fn energy(&self, x: &[Complex64]) -> f64 {
        dot(x, &self.laplacian(x)).re
    }

    pub fn mass(&self, x: &[Complex64]) -> f64 {
        self.cell_volume() * x.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Unknown nearest to a one-dimensional location, if interior.
    pub fn nearest_interior(&self, location: f64) -> Option<usize> {
        let n = self.grid.points_per_axis() as i64;
        let node = (location / self.spacing(0)).round() as i64;
        let node = node.rem_euclid(n) as usize;
        let t = node as isize - self.lo as isize;
        self.interior_of_closed([t, 0, 0])
    }
}

#[inline]
fn coords(mut i: usize, d: usize, m: usize) -> [usize; 3] {
    let mut c = [0; 3];
    for a in (0..d).rev() {
        c[a] = i % m;
        i /= m;
    }
    c
}

#[inline]
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Matrix `B` of the discrete form `<L u, v>_h = v^H B u` on a [`DirichletSpace`].
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    space: DirichletSpace,
    /// `d x d` principal coefficients at every closed-box node.
    principal: Option<Vec<Complex64>>,
    /// Antisymmetrized drift at interior nodes, `d` entries each.
    drift: Option<Vec<Complex64>>,
    /// Potential density at interior nodes.
    potential: Vec<Complex64>,
    atoms: Vec<(usize, Complex64)>,
}

impl DiscreteOperator {
    pub fn zero(space: &DirichletSpace) -> Self {
        Self {
            space: space.clone(),
            principal: None,
            drift: None,
            potential: vec![ZERO; space.len()],
            atoms: Vec::new(),
        }
    }

    pub fn space(&self) -> &DirichletSpace {
        &self.space
    }

    /// Adds `-S_A` for the given principal coefficients.
    pub fn with_principal(mut self, a: &MatrixField) -> Result<Self> {
        let sp = &self.space;
        sp.grid.check_same(a.grid())?;
        let d = sp.dim();
        let side = sp.m + 2;
        let count = side.pow(d as u32);
        let mut p = self.principal.take().unwrap_or_else(|| vec![ZERO; count * d * d]);
        for t_lin in 0..count {
            let t = coords(t_lin, d, side);
            let g = sp.closed_grid_index(t);
            for j in 0..d {
                for k in 0..d {
                    p[t_lin * d * d + j * d + k] += a.entry(j, k).values()[g];
                }
            }
        }
        self.principal = Some(p);
        Ok(self)
    }

    /// Adds the antisymmetrized drift `T_b` and the potential `-div(b)/2`.
    pub fn with_drift(mut self, b: &VectorField) -> Result<Self> {
        let sp = self.space.clone();
        sp.grid.check_same(b.grid())?;
        let d = sp.dim();
        let mut beta = self.drift.take().unwrap_or_else(|| vec![ZERO; sp.len() * d]);
        for i in 0..sp.len() {
            let g = sp.grid_index(i);
            for a in 0..d {
                beta[i * d + a] += b.component(a).values()[g];
            }
        }
        self.drift = Some(beta);
        let divb = div_nyquist_free(b).scale(Complex64::new(-0.5, 0.0));
        self.with_potential(&divb)
    }

    pub fn with_potential(mut self, c: &ScalarField) -> Result<Self> {
        let vals = self.space.restrict(c)?;
        for (p, v) in self.potential.iter_mut().zip(vals) {
            *p += v;
        }
        Ok(self)
    }

    /// One-dimensional atoms, each moved to its nearest grid node. Atoms
    /// landing outside the interior act on zero values and are dropped.
    pub fn with_atoms(mut self, atoms: &[PointMass]) -> Result<Self> {
        if !atoms.is_empty() && self.space.dim() != 1 {
            return Err(Error::PointMassDimension);
        }
        for a in atoms {
            if let Some(i) = self.space.nearest_interior(a.location) {
                self.atoms.push((i, a.weight));
            }
        }
        Ok(self)
    }

    /// Discrete form of a coefficient set: `-S_{A_s} + T_{b'} + C_{c'}` with
    /// `b' = b - Div A_c` and `c' = c - div(b')/2`.
    pub fn from_coefficients(space: &DirichletSpace, cs: &CoefficientSet) -> Result<Self> {
        let cs = match cs.form {
            FormTag::Divergence => cs.clone(),
            FormTag::Nondivergence => to_divergence_form(cs)?,
        };
        let (sym, skew) = split_symmetric(&cs.a);
        let drift = cs.b.sub(&div_matrix_rows_nyquist_free(&skew))?;
        Self::zero(space)
            .with_principal(&sym)?
            .with_drift(&drift)?
            .with_potential(&cs.c)?
            .with_atoms(&cs.point_masses)
    }

    /// `B^H`.
    pub fn adjoint(&self) -> Self {
        let d = self.space.dim();
        let principal = self.principal.as_ref().map(|p| {
            let mut q = p.clone();
            for (node, chunk) in p.chunks_exact(d * d).enumerate() {
                for j in 0..d {
                    for k in 0..d {
                        q[node * d * d + j * d + k] = chunk[k * d + j].conj();
                    }
                }
            }
            q
        });
        Self {
            space: self.space.clone(),
            principal,
            drift: self.drift.as_ref().map(|b| b.iter().map(|v| -v.conj()).collect()),
            potential: self.potential.iter().map(|v| v.conj()).collect(),
            atoms: self.atoms.iter().map(|(i, w)| (*i, w.conj())).collect(),
        }
    }

    /// `B x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let sp = &self.space;
        let d = sp.dim();
        let vol = sp.cell_volume();
        let h: Vec<f64> = (0..d).map(|a| sp.spacing(a)).collect();
        let mut y = vec![ZERO; sp.len()];

        if let Some(p) = &self.principal {
            let side = sp.m + 2;
            let weight = vol / (1usize << d) as f64;
            let mut g = [ZERO; 3];
            let mut nb: [Option<usize>; 3] = [None; 3];
            for t_lin in 0..side.pow(d as u32) {
                let t = coords(t_lin, d, side);
                let ti = [t[0] as isize, t[1] as isize, t[2] as isize];
                let here = sp.interior_of_closed(ti);
                let u0 = here.map_or(ZERO, |i| x[i]);
                let a = &p[t_lin * d * d..(t_lin + 1) * d * d];
                for s in 0..(1usize << d) {
                    let mut any = here.is_some();
                    for j in 0..d {
                        let sj: isize = if s >> j & 1 == 1 { 1 } else { -1 };
                        let mut tn = ti;
                        tn[j] += sj;
                        nb[j] = sp.interior_of_closed(tn);
                        any |= nb[j].is_some();
                        let un = nb[j].map_or(ZERO, |i| x[i]);
                        g[j] = (un - u0) * (sj as f64 / h[j]);
                    }
                    if !any {
                        continue;
                    }
                    for j in 0..d {
                        let mut w = ZERO;
                        for k in 0..d {
                            w += a[j * d + k] * g[k];
                        }
                        let sj = if s >> j & 1 == 1 { 1.0 } else { -1.0 };
                        let c = w * (-weight * sj / h[j]);
                        if let Some(n) = nb[j] {
                            y[n] += c;
                        }
                        if let Some(i) = here {
                            y[i] -= c;
                        }
                    }
                }
            }
        }

        if let Some(beta) = &self.drift {
            for i in 0..sp.len() {
                let b = &beta[i * d..(i + 1) * d];
                let ui = x[i];
                for a in 0..d {
                    if b[a] == ZERO {
                        continue;
                    }
                    let fwd = sp.neighbor(i, a, true);
                    let bwd = sp.neighbor(i, a, false);
                    let d0 = (fwd.map_or(ZERO, |j| x[j]) - bwd.map_or(ZERO, |j| x[j])) / (2.0 * h[a]);
                    y[i] += b[a] * d0 * (0.5 * vol);
                    let c = ui * b[a] * (0.5 * vol / (2.0 * h[a]));
                    if let Some(j) = fwd {
                        y[j] -= c;
                    }
                    if let Some(j) = bwd {
                        y[j] += c;
                    }
                }
            }
        }

        for ((o, p), v) in y.iter_mut().zip(&self.potential).zip(x) {
            *o += p * v * vol;
        }
        for (i, w) in &self.atoms {
            y[*i] += w * x[*i];
        }
        y
    }

    /// `<L u, v>_h = v^H B u`.
    pub fn form(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        dot(v, &self.apply(u))
    }
}

/// Real antisymmetric form `C_d(u, v) = sum d . (u D0 v - v D0 u) dV = v^T M u`.
#[derive(Debug, Clone)]
pub struct CommutatorOperator {
    space: DirichletSpace,
    d: Vec<f64>,
}

impl CommutatorOperator {
    /// Uses the real part of `d`.
    pub fn new(space: &DirichletSpace, d: &VectorField) -> Result<Self> {
        space.grid.check_same(d.grid())?;
        let dim = space.dim();
        let mut vals = vec![0.0; space.len() * dim];
        for i in 0..space.len() {
            let g = space.grid_index(i);
            for a in 0..dim {
                vals[i * dim + a] = d.component(a).values()[g].re;
            }
        }
        Ok(Self {
            space: space.clone(),
            d: vals,
        })
    }

    pub fn space(&self) -> &DirichletSpace {
        &self.space
    }

    /// `M u`.
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let sp = &self.space;
        let dim = sp.dim();
        let vol = sp.cell_volume();
        let mut y = vec![ZERO; sp.len()];
        for i in 0..sp.len() {
            for a in 0..dim {
                let da = self.d[i * dim + a];
                if da == 0.0 {
                    continue;
                }
                let h2 = 2.0 * sp.spacing(a);
                let fwd = sp.neighbor(i, a, true);
                let bwd = sp.neighbor(i, a, false);
                let d0 = (fwd.map_or(ZERO, |j| u[j]) - bwd.map_or(ZERO, |j| u[j])) / h2;
                y[i] -= d0 * (da * vol);
                let c = u[i] * (da * vol / h2);
                if let Some(j) = fwd {
                    y[j] += c;
                }
                if let Some(j) = bwd {
                    y[j] -= c;
                }
            }
        }
        y
    }

    /// `C_d(u, v)` without conjugation.
    pub fn form(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        v.iter().zip(self.apply(u)).map(|(a, b)| a * b).sum()
    }
}

/// All grid nodes of the periodic box with the periodic difference Laplacian.
#[derive(Debug, Clone)]
pub struct PeriodicSpace {
    grid: Grid,
    eigenvalues: Vec<f64>,
}

impl PeriodicSpace {
    pub fn new(grid: &Grid) -> Self {
        let d = grid.dim();
        let n = grid.points_per_axis();
        let vol = grid.cell_volume();
        let eigenvalues = (0..grid.len())
            .map(|l| {
                let idx = grid.multi(l);
                vol * (0..d)
                    .map(|a| {
                        let h = grid.spacing(a);
                        (2.0 - 2.0 * (2.0 * std::f64::consts::PI * idx[a] as f64 / n as f64).cos())
                            / (h * h)
                    })
                    .sum::<f64>()
            })
            .collect();
        Self {
            grid: *grid,
            eigenvalues,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.grid.cell_volume()
    }

    /// Periodic difference Laplacian `K`, `x^H K x = ||grad_h x||^2`.
    pub fn laplacian(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.diagonal_in_fourier(x, |l| l)
    }

    /// `(K + shift dV I)^-1 x`.
    pub fn solve(&self, x: &[Complex64], shift: f64) -> Vec<Complex64> {
        let s = shift * self.cell_volume();
        self.diagonal_in_fourier(x, |l| 1.0 / (l + s))
    }

    fn diagonal_in_fourier(&self, x: &[Complex64], f: impl Fn(f64) -> f64) -> Vec<Complex64> {
        let mut y = x.to_vec();
        let (d, n) = (self.grid.dim(), self.grid.points_per_axis());
        fft::forward(&mut y, d, n);
        for (v, l) in y.iter_mut().zip(&self.eigenvalues) {
            *v *= f(*l);
        }
        fft::inverse(&mut y, d, n);
        y
    }

    /// Potential matrix `dV diag(q)` plus node-snapped one-dimensional atoms.
    pub fn potential(&self, q: &ScalarField, atoms: &[PointMass]) -> Result<PotentialMatrix> {
        self.grid.check_same(q.grid())?;
        if !atoms.is_empty() && self.grid.dim() != 1 {
            return Err(Error::PointMassDimension);
        }
        let vol = self.cell_volume();
        let mut diag: Vec<Complex64> = q.values().iter().map(|v| v * vol).collect();
        let n = self.grid.points_per_axis() as i64;
        for a in atoms {
            let node = ((a.location / self.grid.spacing(0)).round() as i64).rem_euclid(n) as usize;
            diag[node] += a.weight;
        }
        Ok(PotentialMatrix { diag })
    }
}

/// Diagonal matrix acting on grid values.
#[derive(Debug, Clone)]
pub struct PotentialMatrix {
    pub diag: Vec<Complex64>,
}

impl PotentialMatrix {
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.diag.iter().zip(x).map(|(d, v)| d * v).collect()
    }

    /// Hermitian part `(D + D^H)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            diag: self.diag.iter().map(|d| Complex64::new(d.re, 0.0)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d * s).collect(),
        }
    }
}

impl DirichletSpace {
    /// Potential matrix `dV diag(q)` on interior nodes plus node-snapped atoms.
    pub fn potential(&self, q: &ScalarField, atoms: &[PointMass]) -> Result<PotentialMatrix> {
        let op = DiscreteOperator::zero(self).with_potential(q)?.with_atoms(atoms)?;
        let vol = self.cell_volume();
        let mut diag: Vec<Complex64> = op.potential.iter().map(|v| v * vol).collect();
        for (i, w) in op.atoms {
            diag[i] += w;
        }
        Ok(PotentialMatrix { diag })
    }
}
