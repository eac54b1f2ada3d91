use nalgebra::DMatrix;

use super::{inner, kron, norm, total_dim, C64};
use crate::error::{Error, Result};

/// Amplitude vector over an `n`-party register with per-party dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl PureState {
    /// Wraps an amplitude vector without rescaling it.
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArity(
                "a state needs at least one party".into(),
            ));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Shape(format!("local dimension {d} < 2")));
        }
        let dim = total_dim(&dims);
        if amps.len() != dim {
            return Err(Error::Shape(format!(
                "{} amplitudes for a register of dimension {dim}",
                amps.len()
            )));
        }
        Ok(Self { dims, amps })
    }

    /// Wraps and rescales to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let mut s = Self::new(dims, amps)?;
        let nrm = norm(&s.amps);
        if nrm <= f64::EPSILON {
            return Err(Error::Normalization { norm: nrm });
        }
        s.amps.iter_mut().for_each(|a| *a /= nrm);
        Ok(s)
    }

    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        Self::normalized(dims, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim = total_dim(&dims);
        if index >= dim {
            return Err(Error::Shape(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized(1e-10) {
            Ok(())
        } else {
            Err(Error::Normalization { norm: self.norm() })
        }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            dims,
            amps: kron(&self.amps, &other.amps),
        }
    }

    /// Dense `|psi><psi|`.
    pub fn projector_matrix(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.amps[r] * self.amps[c].conj())
    }

    /// Largest entrywise deviation from another state of the same shape.
    pub fn max_deviation(&self, other: &PureState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_has_unit_norm() {
        let s = PureState::from_real(vec![2, 2], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_length_and_dims() {
        assert!(matches!(
            PureState::new(vec![2, 2], vec![C64::new(1.0, 0.0); 3]),
            Err(Error::Shape(_))
        ));
        assert!(PureState::new(vec![1, 2], vec![C64::new(1.0, 0.0); 2]).is_err());
        assert!(matches!(
            PureState::normalized(vec![2], vec![C64::new(0.0, 0.0); 2]),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn tensor_product_orders_big_endian() {
        let zero = PureState::basis(vec![2], 0).unwrap();
        let one = PureState::basis(vec![3], 1).unwrap();
        let t = zero.tensor(&one);
        assert_eq!(t.dims(), &[2, 3]);
        assert_eq!(t.amps()[1], C64::new(1.0, 0.0));
    }
}
