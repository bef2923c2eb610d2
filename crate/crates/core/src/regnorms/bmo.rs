use rayon::prelude::*;

use super::{NormKind, NormReport, Witness};
use crate::field::{MatrixField, ScalarField};

/// Dyadic BMO seminorm: the largest mean oscillation `|Q|^-1 int_Q |f - f_Q|`
/// over all dyadic cubes, from the whole box down to single cells.
pub fn bmo_norm(f: &ScalarField) -> NormReport {
    let (value, level, origin) = scan(f);
    NormReport::new(
        f.grid(),
        NormKind::Bmo,
        value,
        Witness::Cube {
            level,
            origin,
            entry: None,
        },
    )
}

/// Largest dyadic BMO seminorm over the entries of a matrix field.
pub fn bmo_norm_matrix(m: &MatrixField) -> NormReport {
    let d = m.grid().dim();
    let mut best = (0.0, 0, vec![0; d], (0, 0));
    for j in 0..d {
        for k in 0..d {
            let (v, level, origin) = scan(m.entry(j, k));
            if v > best.0 {
                best = (v, level, origin, (j, k));
            }
        }
    }
    NormReport::new(
        m.grid(),
        NormKind::Bmo,
        best.0,
        Witness::Cube {
            level: best.1,
            origin: best.2,
            entry: Some(best.3),
        },
    )
}

fn scan(f: &ScalarField) -> (f64, usize, Vec<usize>) {
    let g = *f.grid();
    let d = g.dim();
    let n = g.points_per_axis();
    let levels = n.trailing_zeros() as usize;
    let vals = f.values();
    let per_level: Vec<(f64, usize, Vec<usize>)> = (0..=levels)
        .into_par_iter()
        .map(|level| {
            let side = n >> level;
            let cubes = 1usize << level;
            let cells = side.pow(d as u32);
            let mut best = (0.0, level, vec![0; d]);
            for c in 0..cubes.pow(d as u32) {
                let mut corner = [0; 3];
                let mut rest = c;
                for a in (0..d).rev() {
                    corner[a] = (rest % cubes) * side;
                    rest /= cubes;
                }
                let index = |i: usize| {
                    let mut idx = [0; 3];
                    let mut r = i;
                    for a in (0..d).rev() {
                        idx[a] = corner[a] + r % side;
                        r /= side;
                    }
                    g.linear(idx)
                };
                let mean = (0..cells).map(|i| vals[index(i)]).sum::<num_complex::Complex64>() / cells as f64;
                let osc = (0..cells).map(|i| (vals[index(i)] - mean).norm()).sum::<f64>() / cells as f64;
                if osc > best.0 {
                    best = (osc, level, corner[..d].to_vec());
                }
            }
            best
        })
        .collect();
    per_level
        .into_iter()
        .fold((0.0, 0, vec![0; d]), |acc, x| if x.0 > acc.0 { x } else { acc })
}
