use std::fmt;

use super::{digits, total_dim, C64};
use crate::error::{Error, Result};

/// A cut `A|Ā` of an `n`-party register.
///
/// Stored canonically: party 0 always belongs to side `A`, so a cut and its
/// complement have the same representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    n: usize,
    mask: u64,
}

impl Bipartition {
    /// Builds a cut from the parties on one side (either side may be given).
    pub fn new(n: usize, side: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &p in side {
            if p >= n {
                return Err(Error::Shape(format!("party {p} out of range for n = {n}")));
            }
            mask |= 1 << p;
        }
        Self::from_mask(n, mask)
    }

    /// Bit `p` of `mask` marks party `p` as belonging to the given side.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if !(2..=63).contains(&n) {
            return Err(Error::InvalidArity(format!(
                "bipartitions need 2 <= n <= 63, got {n}"
            )));
        }
        let full = (1u64 << n) - 1;
        if mask & !full != 0 {
            return Err(Error::Shape(format!(
                "mask {mask:#b} has parties beyond n = {n}"
            )));
        }
        let mask = if mask & 1 == 0 { full & !mask } else { mask };
        if mask == full || mask == 0 {
            return Err(Error::Shape("a cut needs both sides non-empty".into()));
        }
        Ok(Self { n, mask })
    }

    pub fn n_parties(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, party: usize) -> bool {
        self.mask >> party & 1 == 1
    }

    pub fn side_a(&self) -> Vec<usize> {
        (0..self.n).filter(|&p| self.contains(p)).collect()
    }

    pub fn side_b(&self) -> Vec<usize> {
        (0..self.n).filter(|&p| !self.contains(p)).collect()
    }

    pub fn size_a(&self) -> usize {
        self.mask.count_ones() as usize
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<usize>| {
            let sep = if self.n > 10 { "," } else { "" };
            v.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        write!(f, "{}|{}", join(self.side_a()), join(self.side_b()))
    }
}

/// All `2^(n-1) - 1` canonical cuts of an `n`-party register, ordered by mask.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if n < 2 {
        return Err(Error::InvalidArity(format!(
            "need at least 2 parties, got {n}"
        )));
    }
    if n > 63 {
        return Err(Error::InvalidArity(format!(
            "at most 63 parties supported, got {n}"
        )));
    }
    let count = (1u64 << (n - 1)) - 1;
    (0..count)
        .map(|k| Bipartition::from_mask(n, 1 | (k << 1)))
        .collect()
}

/// Index bookkeeping for reshaping a register into a `d_A × d_Ā` matrix.
#[derive(Clone, Debug)]
pub struct CutLayout {
    pub cut: Bipartition,
    pub dims_a: Vec<usize>,
    pub dims_b: Vec<usize>,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Global index -> `(a, b)` row/column of the reshaped matrix.
    pub split: Vec<(usize, usize)>,
}

impl CutLayout {
    pub fn new(dims: &[usize], cut: Bipartition) -> Result<Self> {
        if dims.len() != cut.n_parties() {
            return Err(Error::Shape(format!(
                "cut over {} parties applied to a {}-party register",
                cut.n_parties(),
                dims.len()
            )));
        }
        let a = cut.side_a();
        let b = cut.side_b();
        let dims_a: Vec<usize> = a.iter().map(|&p| dims[p]).collect();
        let dims_b: Vec<usize> = b.iter().map(|&p| dims[p]).collect();
        let dim = total_dim(dims);
        let split = (0..dim)
            .map(|g| {
                let dg = digits(g, dims);
                let ia = a.iter().fold(0, |acc, &p| acc * dims[p] + dg[p]);
                let ib = b.iter().fold(0, |acc, &p| acc * dims[p] + dg[p]);
                (ia, ib)
            })
            .collect();
        Ok(Self {
            cut,
            dim_a: total_dim(&dims_a),
            dim_b: total_dim(&dims_b),
            dims_a,
            dims_b,
            split,
        })
    }

    pub fn total_dim(&self) -> usize {
        self.split.len()
    }

    /// `|left>_A ⊗ |right>_Ā` in global party order.
    pub fn embed(&self, left: &[C64], right: &[C64]) -> Vec<C64> {
        self.split
            .iter()
            .map(|&(a, b)| left[a] * right[b])
            .collect()
    }

    /// Reshapes a global vector into a row-major `d_A × d_Ā` buffer.
    pub fn reshape(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim_a * self.dim_b];
        for (g, &(a, b)) in self.split.iter().enumerate() {
            out[a * self.dim_b + b] = v[g];
        }
        out
    }
}
