use nalgebra::DMatrix;

use super::{inner, norm, C64};
use crate::error::{Error, Result};

/// Orthonormal basis of the span of `vectors`, by classical Gram–Schmidt with
/// a second re-orthogonalization pass. Vectors whose residual norm falls below
/// `tol` are dropped, so the output size is the numerical rank.
pub fn orthonormalize(vectors: &[Vec<C64>], tol: f64) -> Result<Vec<Vec<C64>>> {
    let len = match vectors.first() {
        Some(v) => v.len(),
        None => return Err(Error::EmptySpan),
    };
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::Shape("vectors of differing length".into()));
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let scale = norm(v);
        if scale <= tol {
            continue;
        }
        let mut w: Vec<C64> = v.iter().map(|x| x / scale).collect();
        for _ in 0..2 {
            let overlaps: Vec<C64> = basis.iter().map(|b| inner(b, &w)).collect();
            for (b, ov) in basis.iter().zip(&overlaps) {
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= ov * y);
            }
        }
        let r = norm(&w);
        if r > tol {
            w.iter_mut().for_each(|x| *x /= r);
            basis.push(w);
        }
    }
    if basis.is_empty() {
        return Err(Error::EmptySpan);
    }
    Ok(basis)
}

/// Extends an orthonormal set to a basis of the whole space of dimension `dim`.
pub fn complete_basis(partial: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut out = partial.to_vec();
    for k in 0..dim {
        if out.len() >= dim {
            break;
        }
        let mut w = vec![C64::new(0.0, 0.0); dim];
        w[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &out {
                let ov = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= ov * y);
            }
        }
        let r = norm(&w);
        if r > 1e-8 {
            w.iter_mut().for_each(|x| *x /= r);
            out.push(w);
        }
    }
    out
}

/// Number of singular values of the stacked vectors above `tol` (relative to the largest).
pub fn numerical_rank(vectors: &[Vec<C64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let len = vectors[0].len();
    let m = DMatrix::from_fn(len, vectors.len(), |r, c| vectors[c][r]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}
