//! Dense complex linear algebra over multi-qudit registers.
//!
//! Every index in this crate is big-endian over parties: for local dimensions
//! `dims = [d0, d1, ..., d(n-1)]` the global index of the digit string
//! `(i0, i1, ..., i(n-1))` is `i0 * (d1 * ... * d(n-1)) + ... + i(n-1)`, so
//! party 0 is the most significant factor. The same convention applies inside
//! each side of a [`Bipartition`]: parties of a side keep their increasing
//! party order.

mod bipartition;
mod operator;
mod ortho;
mod schmidt;
mod state;

pub use bipartition::{enumerate_bipartitions, Bipartition, CutLayout};
pub use operator::{min_eigenvalue, partial_transpose, HermOperator, HERMITICITY_TOL};
pub use ortho::{complete_basis, numerical_rank, orthonormalize};
pub use schmidt::{schmidt, SchmidtDecomposition, DEFAULT_RANK_TOL};
pub use state::PureState;

pub use num_complex::Complex64 as C64;

/// `<a|b>`, conjugating the left argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Digit strides of a big-endian mixed-radix register.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        out[k] = out[k + 1] * dims[k + 1];
    }
    out
}

pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Kronecker product of two vectors.
pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}
