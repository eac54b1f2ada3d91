use nalgebra::DMatrix;

use super::{Bipartition, CutLayout, PureState, C64};
use crate::error::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// `|psi> = Σ_i coeffs[i] |left_i>_A |right_i>_Ā`, coefficients descending.
///
/// `left`/`right` hold one vector per entry of `coeffs` (all `min(d_A, d_Ā)` of
/// them); only the first `rank` carry weight above the threshold.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub layout: CutLayout,
    pub coeffs: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
    pub rank: usize,
}

impl SchmidtDecomposition {
    pub fn cut(&self) -> Bipartition {
        self.layout.cut
    }

    /// Squared coefficients `λ_i`.
    pub fn lambdas(&self) -> Vec<f64> {
        self.coeffs.iter().map(|s| s * s).collect()
    }

    /// `|left_i> ⊗ |right_j>` in global party order.
    pub fn product(&self, i: usize, j: usize) -> Vec<C64> {
        self.layout.embed(&self.left[i], &self.right[j])
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.layout.total_dim()];
        for i in 0..self.rank {
            for (o, p) in out.iter_mut().zip(self.product(i, i)) {
                *o += p * self.coeffs[i];
            }
        }
        out
    }
}

pub fn schmidt(state: &PureState, cut: Bipartition, tol: f64) -> Result<SchmidtDecomposition> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::Domain(format!(
            "rank threshold {tol} outside (0, 1e-6]"
        )));
    }
    state.ensure_normalized()?;
    let layout = CutLayout::new(state.dims(), cut)?;
    let flat = layout.reshape(state.amps());
    let m = DMatrix::from_row_slice(layout.dim_a, layout.dim_b, &flat);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coeffs: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left = order
        .iter()
        .map(|&k| u.column(k).iter().copied().collect())
        .collect();
    let right = order
        .iter()
        .map(|&k| vt.row(k).iter().copied().collect())
        .collect();
    let rank = coeffs.iter().filter(|&&s| s > tol).count();
    Ok(SchmidtDecomposition {
        layout,
        coeffs,
        left,
        right,
        rank,
    })
}
