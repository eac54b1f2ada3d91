use nalgebra::DMatrix;

use super::{total_dim, Bipartition, CutLayout, PureState, C64};
use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-10;

/// Dense Hermitian operator on a multi-party register.
#[derive(Clone, Debug)]
pub struct HermOperator {
    dims: Vec<usize>,
    matrix: DMatrix<C64>,
}

fn max_antihermitian(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for r in 0..n {
        for c in r..n {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

impl HermOperator {
    pub fn new(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let d = total_dim(&dims);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "{}x{} matrix for a register of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = max_antihermitian(&matrix);
        if deviation > HERMITICITY_TOL {
            return Err(Error::Hermiticity { deviation });
        }
        Ok(Self { dims, matrix })
    }

    /// Accepts a matrix that is Hermitian up to rounding and symmetrizes it.
    pub fn from_matrix_symmetrized(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let op = Self::new(dims, matrix)?;
        let m = (&op.matrix + op.matrix.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self {
            dims: op.dims,
            matrix: m,
        })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let d = total_dim(&dims);
        Self {
            dims,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let d = total_dim(&dims);
        Self {
            dims,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn projector(state: &PureState) -> Self {
        Self {
            dims: state.dims().to_vec(),
            matrix: state.projector_matrix(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    fn check_same(&self, other: &HermOperator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!(
                "operators on {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &HermOperator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &HermOperator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * C64::new(s, 0.0),
        }
    }

    /// Adds `c |v><v|` in place.
    pub fn add_rank_one(&mut self, c: f64, v: &[C64]) {
        let d = self.dim();
        for col in 0..d {
            let vc = v[col].conj() * c;
            if vc == C64::new(0.0, 0.0) {
                continue;
            }
            for row in 0..d {
                self.matrix[(row, col)] += v[row] * vc;
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.matrix[(k, k)].re).sum()
    }

    /// `<v|M|v>` for an arbitrary (not necessarily normalized) vector.
    pub fn quadratic_form(&self, v: &[C64]) -> f64 {
        let mv = &self.matrix * nalgebra::DVector::from_column_slice(v);
        v.iter()
            .zip(mv.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        if state.dims() != self.dims.as_slice() {
            return Err(Error::Shape(format!(
                "state on {:?}, operator on {:?}",
                state.dims(),
                self.dims
            )));
        }
        Ok(self.quadratic_form(state.amps()))
    }

    /// `Tr(M rho)` for a dense density matrix.
    pub fn expectation_dense(&self, rho: &DMatrix<C64>) -> Result<f64> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::Shape("density matrix dimension mismatch".into()));
        }
        let d = self.dim();
        let mut acc = 0.0;
        for r in 0..d {
            for c in 0..d {
                acc += (self.matrix[(r, c)] * rho[(c, r)]).re;
            }
        }
        Ok(acc)
    }

    pub fn max_entry_deviation(&self, other: &HermOperator) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn partial_transpose(&self, cut: Bipartition) -> Result<Self> {
        partial_transpose(self, cut)
    }
}

/// Smallest eigenvalue of a Hermitian matrix given as a dense buffer.
pub fn min_eigenvalue(matrix: &DMatrix<C64>) -> Result<f64> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::Shape("non-square matrix".into()));
    }
    let deviation = max_antihermitian(matrix);
    if deviation > HERMITICITY_TOL {
        return Err(Error::Hermiticity { deviation });
    }
    Ok(matrix
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// Transposes the factors on side `A` of the cut.
pub fn partial_transpose(op: &HermOperator, cut: Bipartition) -> Result<HermOperator> {
    let lay = CutLayout::new(op.dims(), cut)?;
    let mut join = vec![0usize; lay.total_dim()];
    for (g, &(a, b)) in lay.split.iter().enumerate() {
        join[a * lay.dim_b + b] = g;
    }
    let d = op.dim();
    let m = op.matrix();
    let mut out = DMatrix::zeros(d, d);
    for c in 0..d {
        let (ac, bc) = lay.split[c];
        for r in 0..d {
            let (ar, br) = lay.split[r];
            let r2 = join[ac * lay.dim_b + br];
            let c2 = join[ar * lay.dim_b + bc];
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(HermOperator {
        dims: op.dims().to_vec(),
        matrix: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phi_plus() -> PureState {
        PureState::from_real(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn random_herm(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        let a = DMatrix::from_fn(d, d, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        &a + a.adjoint()
    }

    fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        a.kronecker(b)
    }

    #[test]
    fn identity_is_fixed_by_partial_transpose() {
        let id = HermOperator::identity(vec![2, 3]);
        let cut = Bipartition::new(2, &[0]).unwrap();
        let pt = id.partial_transpose(cut).unwrap();
        assert_eq!(pt.max_entry_deviation(&id).unwrap(), 0.0);
    }

    #[test]
    fn bell_partial_transpose_min_eig_is_minus_half() {
        let p = HermOperator::projector(&phi_plus());
        let pt = p
            .partial_transpose(Bipartition::new(2, &[0]).unwrap())
            .unwrap();
        // SWAP/2 has spectrum {1/2, 1/2, 1/2, -1/2}
        let ev = pt.eigenvalues();
        assert!((ev[0] + 0.5).abs() < 1e-12);
        assert!(ev[1..].iter().all(|e| (e - 0.5).abs() < 1e-12));
    }

    #[test]
    fn product_rule_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_herm(3, &mut rng);
        let b = random_herm(2, &mut rng);
        let op = HermOperator::new(vec![3, 2], kron(&a, &b)).unwrap();
        let cut = Bipartition::new(2, &[0]).unwrap();
        let pt = op.partial_transpose(cut).unwrap();
        let expect = HermOperator::new(vec![3, 2], kron(&a.transpose(), &b)).unwrap();
        assert!(pt.max_entry_deviation(&expect).unwrap() == 0.0);
        let back = pt.partial_transpose(cut).unwrap();
        assert_eq!(back.max_entry_deviation(&op).unwrap(), 0.0);
    }

    #[test]
    fn partial_transpose_on_middle_party() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_herm(2, &mut rng);
        let b = random_herm(3, &mut rng);
        let c = random_herm(2, &mut rng);
        let op = HermOperator::new(vec![2, 3, 2], kron(&kron(&a, &b), &c)).unwrap();
        let cut = Bipartition::new(3, &[1]).unwrap();
        // canonical side A is {0, 2}: transposing {0,2} equals full transpose then transposing {1}
        let pt = op.partial_transpose(cut).unwrap();
        let expect = kron(&kron(&a.transpose(), &b), &c.transpose());
        let expect = HermOperator::new(vec![2, 3, 2], expect).unwrap();
        assert!(pt.max_entry_deviation(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((HermOperator::identity(vec![3, 3]).min_eigenvalue() - 1.0).abs() < 1e-12);
        let zero = PureState::basis(vec![2], 0).unwrap();
        assert!(HermOperator::projector(&zero).min_eigenvalue().abs() < 1e-12);
        let bad = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!(matches!(
            min_eigenvalue(&bad),
            Err(Error::Hermiticity { .. })
        ));
    }

    #[test]
    fn dims_mismatch_is_a_shape_error() {
        let a = HermOperator::identity(vec![2, 2]);
        let b = HermOperator::identity(vec![4]);
        assert!(matches!(a.sub(&b), Err(Error::Shape(_))));
        let cut = Bipartition::new(3, &[0]).unwrap();
        assert!(matches!(a.partial_transpose(cut), Err(Error::Shape(_))));
    }
}
