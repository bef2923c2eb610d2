use rayon::prelude::*;

use super::{NormKind, NormReport, Witness};
use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField};

/// Hölder seminorm `max |f(x) - f(y)| / |x - y|^alpha` over pairs of nodes
/// of the closed inner sub-box. Pairs are displaced by `k` cells along
/// every direction in `{-1, 0, 1}^n` for `k = 1, 2, 4, ...` up to half the
/// inner box.
pub fn lip_seminorm(f: &ScalarField, alpha: f64) -> Result<NormReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
    }
    let grid = *f.grid();
    let d = grid.dim();
    let (lo, hi) = grid.inner_bounds();
    let span = hi - lo;
    let directions = directions(d);
    let steps: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2))
        .take_while(|k| *k <= (span / 2).max(1))
        .collect();
    let side = span + 1;
    let count = side.pow(d as u32);
    let vals = f.values();
    let best = (0..count)
        .into_par_iter()
        .map(|c| {
            let mut x = [0usize; 3];
            let mut rest = c;
            for a in (0..d).rev() {
                x[a] = lo + rest % side;
                rest /= side;
            }
            let fx = vals[wrap(&grid, x)];
            let mut best = (0.0, x, x);
            for dir in &directions {
                for &k in &steps {
                    let mut y = [0usize; 3];
                    let mut dist2 = 0.0;
                    let mut inside = true;
                    for a in 0..d {
                        let ya = x[a] as isize + dir[a] * k as isize;
                        if ya < lo as isize || ya > hi as isize {
                            inside = false;
                            break;
                        }
                        y[a] = ya as usize;
                        dist2 += (dir[a] as f64 * k as f64 * grid.spacing(a)).powi(2);
                    }
                    if !inside {
                        continue;
                    }
                    let q = (vals[wrap(&grid, y)] - fx).norm() / dist2.sqrt().powf(alpha);
                    if q > best.0 {
                        best = (q, x, y);
                    }
                }
            }
            best
        })
        .reduce(|| (0.0, [0; 3], [0; 3]), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    Ok(NormReport::new(
        &grid,
        NormKind::Lip { alpha },
        best.0,
        Witness::Pair {
            x: best.1[..d].to_vec(),
            y: best.2[..d].to_vec(),
        },
    ))
}

fn wrap(grid: &Grid, idx: [usize; 3]) -> usize {
    let n = grid.points_per_axis();
    grid.linear([idx[0] % n, idx[1] % n, idx[2] % n])
}

/// Half of the nonzero vectors of `{-1, 0, 1}^d`, one per line.
fn directions(d: usize) -> Vec<[isize; 3]> {
    let mut out = Vec::new();
    for c in 0..3usize.pow(d as u32) {
        let mut v = [0isize; 3];
        let mut rest = c;
        for slot in v.iter_mut().take(d) {
            *slot = (rest % 3) as isize - 1;
            rest /= 3;
        }
        let first = v[..d].iter().find(|x| **x != 0);
        if first == Some(&1) {
            out.push(v);
        }
    }
    out
}
