//! Closed-form targets and their analytic witnesses.

use crate::error::{Error, Result};
use crate::lift::{Block, BlockBasis, LiftedWitness};
use crate::tensorcore::{PureState, C64};

/// Computational strings with exactly `i` ones on `n` qubits, party 0 as the
/// most significant bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricProjector {
    pub n: usize,
    pub i: usize,
    pub strings: Vec<usize>,
}

impl SymmetricProjector {
    pub fn new(n: usize, i: usize) -> Result<Self> {
        if i > n {
            return Err(Error::Domain(format!("excitation {i} > {n} qubits")));
        }
        if n > 30 {
            return Err(Error::Size {
                dim: 1 << 30,
                limit: 1 << 30,
            });
        }
        let strings = (0usize..1 << n)
            .filter(|s| s.count_ones() as usize == i)
            .collect();
        Ok(Self { n, i, strings })
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn block(&self, coeff: f64) -> Block {
        Block {
            coeff,
            basis: BlockBasis::Computational(self.strings.clone()),
        }
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidArity(format!(
            "W state needs n >= 2, got {n}"
        )));
    }
    let mut amps = vec![real(0.0); 1 << n];
    for k in 0..n {
        amps[1 << k] = real(1.0);
    }
    PureState::normalized(vec![2; n], amps)
}

pub fn ghz_state(d: usize, n: usize) -> Result<PureState> {
    schmidt_state(&vec![1.0 / d as f64; d], n)
}

/// Sorts a spectrum descending; returns the sorted values and, for each sorted
/// position, the input index it came from.
pub fn sorted_spectrum(lambdas: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    if lambdas.len() < 2 {
        return Err(Error::Domain("need at least two Schmidt weights".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
        return Err(Error::Domain(format!("negative or non-finite weight {l}")));
    }
    let total: f64 = lambdas.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("weights sum to {total}, not 1")));
    }
    let mut perm: Vec<usize> = (0..lambdas.len()).collect();
    perm.sort_by(|&a, &b| lambdas[b].total_cmp(&lambdas[a]));
    Ok((perm.iter().map(|&k| lambdas[k]).collect(), perm))
}

/// `Σ_i √λ_i |i>^{⊗n}` with the spectrum sorted descending.
pub fn schmidt_state(lambdas: &[f64], n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidArity(format!("need n >= 2, got {n}")));
    }
    let (l, _) = sorted_spectrum(lambdas)?;
    let d = l.len();
    let dims = vec![d; n];
    let total: usize = dims.iter().product();
    let step = (total - 1) / (d - 1);
    let mut amps = vec![real(0.0); total];
    for (i, li) in l.iter().enumerate() {
        amps[i * step] = real(li.sqrt());
    }
    PureState::normalized(dims, amps)
}

/// Four-qubit singlet parameters with `a² + b² + cos θ · ab = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingletParams {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

impl SingletParams {
    pub fn new(a: f64, b: f64, theta: f64) -> Result<Self> {
        let c = a * a + b * b + theta.cos() * a * b;
        if (c - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "a² + b² + cos(θ)ab = {c}, expected 1"
            )));
        }
        Ok(Self { a, b, theta })
    }

    /// Solves the constraint for the non-negative root `b`.
    pub fn from_a_theta(a: f64, theta: f64) -> Result<Self> {
        let ct = theta.cos();
        let disc = a * a * ct * ct - 4.0 * (a * a - 1.0);
        if disc < 0.0 {
            return Err(Error::Domain(format!("no real b for a = {a}, θ = {theta}")));
        }
        let b = (-a * ct + disc.sqrt()) / 2.0;
        if b < -1e-12 {
            return Err(Error::Domain(format!(
                "no non-negative b for a = {a}, θ = {theta}"
            )));
        }
        Self::new(a, b.max(0.0), theta)
    }
}

/// Singlet `(|01> − |10>)/√2` on qubits `p < q` of an `n`-qubit register,
/// written as a map from the pair's bits to an amplitude.
fn singlet_product(n: usize, pairs: &[(usize, usize)]) -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![real(0.0); 1 << n];
    for (idx, amp) in out.iter_mut().enumerate() {
        let bit = |p: usize| (idx >> (n - 1 - p)) & 1;
        let mut a = 1.0;
        for &(p, q) in pairs {
            a *= match (bit(p), bit(q)) {
                (0, 1) => s,
                (1, 0) => -s,
                _ => 0.0,
            };
        }
        *amp = real(a);
    }
    out
}

/// `a |ψ⁻_12 ψ⁻_34> + e^{iθ} b |ψ⁻_13 ψ⁻_24>` (parties numbered from 0 here).
pub fn singlet4_state(p: &SingletParams) -> Result<PureState> {
    let t1 = singlet_product(4, &[(0, 1), (2, 3)]);
    let t2 = singlet_product(4, &[(0, 2), (1, 3)]);
    let phase = C64::from_polar(p.b, p.theta);
    let amps = t1
        .iter()
        .zip(&t2)
        .map(|(x, y)| x * p.a + y * phase)
        .collect();
    PureState::normalized(vec![2; 4], amps)
}

/// The printed six-qubit singlet superposition, rescaled to unit norm.
pub fn singlet6_state() -> Result<PureState> {
    let i = C64::new(0.0, 1.0);
    let terms = [
        (real(1.0), singlet_product(6, &[(0, 1), (2, 3), (4, 5)])),
        (i, singlet_product(6, &[(0, 2), (1, 3), (4, 5)])),
        (i, singlet_product(6, &[(0, 1), (2, 4), (3, 5)])),
        (real(-1.0), singlet_product(6, &[(0, 2), (1, 4), (3, 5)])),
    ];
    let mut amps = vec![real(0.0); 64];
    for (c, t) in &terms {
        for (a, x) in amps.iter_mut().zip(t) {
            *a += c * x * 0.5;
        }
    }
    PureState::normalized(vec![2; 6], amps)
}

/// `((n−1)/n) P_1 + (√(⌊n/2⌋(n−⌊n/2⌋))/n)(P_0 + P_2) − |W_n><W_n|`.
pub fn w_witness(n: usize) -> Result<LiftedWitness> {
    if n < 3 {
        return Err(Error::InvalidArity(format!(
            "W witness needs n >= 3, got {n}"
        )));
    }
    let nf = n as f64;
    let h = n / 2;
    let side = ((h * (n - h)) as f64).sqrt() / nf;
    let blocks = vec![
        SymmetricProjector::new(n, 1)?.block((nf - 1.0) / nf),
        SymmetricProjector::new(n, 0)?.block(side),
        SymmetricProjector::new(n, 2)?.block(side),
    ];
    Ok(LiftedWitness::new(w_state(n)?, blocks))
}

fn digits_to_index(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Cross-term strings `π(i^r j^{n−r})`, `1 ≤ r ≤ n−1`, for one pair `i < j`.
pub fn pair_strings(i: usize, j: usize, d: usize, n: usize) -> Vec<usize> {
    (1usize..(1 << n) - 1)
        .map(|mask| {
            let digits: Vec<usize> = (0..n)
                .map(|p| if (mask >> (n - 1 - p)) & 1 == 1 { j } else { i })
                .collect();
            digits_to_index(&digits, d)
        })
        .collect()
}

/// Witness for `Σ √λ_i |i>^{⊗n}`: `√(λ_iλ_j)` on every mixed string of a pair,
/// `λ_i` on `|i>^{⊗n}`.
pub fn schmidt_witness(lambdas: &[f64], n: usize) -> Result<LiftedWitness> {
    let target = schmidt_state(lambdas, n)?;
    let (l, _) = sorted_spectrum(lambdas)?;
    let nonzero = l.iter().filter(|&&x| x > 0.0).count();
    if nonzero < 2 {
        return Err(Error::NotGme(format!("{nonzero} nonzero Schmidt weight")));
    }
    let d = l.len();
    let mut blocks = Vec::new();
    for i in 0..d {
        if l[i] > 0.0 {
            blocks.push(Block {
                coeff: l[i],
                basis: BlockBasis::Computational(vec![digits_to_index(&vec![i; n], d)]),
            });
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let c = (l[i] * l[j]).sqrt();
            if c > 0.0 {
                blocks.push(Block {
                    coeff: c,
                    basis: BlockBasis::Computational(pair_strings(i, j, d, n)),
                });
            }
        }
    }
    Ok(LiftedWitness::new(target, blocks))
}

/// Printed white-noise tolerance of the Schmidt-state witness.
pub fn schmidt_tolerance_formula(lambdas: &[f64], n: usize) -> Result<f64> {
    let (l, _) = sorted_spectrum(lambdas)?;
    let d = l.len() as f64;
    let purity: f64 = l.iter().map(|x| x * x).sum();
    let root_sum: f64 = l.iter().map(|x| x.sqrt()).sum();
    let growth = (2f64.powi(n as i32 - 1) - 1.0) / d.powi(n as i32);
    Ok((1.0 - purity) / (1.0 - purity + growth * (root_sum * root_sum - 1.0)))
}

/// `(c_2, c_1, c_0)` of the four-qubit singlet witness.
pub fn singlet4_coeffs(p: &SingletParams) -> (f64, f64, f64) {
    let (a2, b2) = (p.a * p.a, p.b * p.b);
    let c2 = (1.0 - 0.75 * a2)
        .max(1.0 - 0.75 * b2)
        .max(0.75 * (a2 + b2) - 0.5);
    let c0 = (0.5 - 0.25 * (a2 + b2)).max(0.25 * a2).max(0.25 * b2);
    (c2, 0.5, c0)
}

pub fn singlet4_witness(p: &SingletParams) -> Result<LiftedWitness> {
    let p = SingletParams::new(p.a, p.b, p.theta)?;
    let (c2, c1, c0) = singlet4_coeffs(&p);
    let blocks = [c0, c1, c2, c1, c0]
        .iter()
        .enumerate()
        .map(|(i, &c)| Ok(SymmetricProjector::new(4, i)?.block(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LiftedWitness::new(singlet4_state(&p)?, blocks))
}

pub const SINGLET6_COEFFS: [f64; 7] = [0.125, 0.25, 0.5, 0.625, 0.5, 0.25, 0.125];

pub fn singlet6_witness() -> Result<LiftedWitness> {
    let blocks = SINGLET6_COEFFS
        .iter()
        .enumerate()
        .map(|(i, &c)| Ok(SymmetricProjector::new(6, i)?.block(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LiftedWitness::new(singlet6_state()?, blocks))
}
