//! Witness evaluation: expectations on white-noise mixtures, noise tolerance,
//! the finer-than ordering and a see-saw search over product states.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bew::BipartiteWitness;
use crate::error::{Error, Result};
use crate::graphstate::DiagonalGraphWitness;
use crate::lift::LiftedWitness;
use crate::tensorcore::{
    enumerate_bipartitions, inner, total_dim, Bipartition, CutLayout, HermOperator, PureState, C64,
};

pub const DEFAULT_DENSE_LIMIT: usize = 4096;
pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_ITERS: usize = 200;

/// Anything with a trace, a pure-state quadratic form and (on request) a dense matrix.
pub trait Witness {
    fn dims(&self) -> Vec<usize>;

    fn trace(&self) -> f64;

    fn expectation_pure(&self, v: &[C64]) -> Result<f64>;

    fn dense(&self, limit: usize) -> Result<HermOperator>;

    fn total_dim(&self) -> usize {
        total_dim(&self.dims())
    }
}

fn check_len(w: &impl Witness, v: &[C64]) -> Result<()> {
    if v.len() != w.total_dim() {
        return Err(Error::Shape(format!(
            "vector of length {} for a witness on dimension {}",
            v.len(),
            w.total_dim()
        )));
    }
    Ok(())
}

fn guard(dim: usize, limit: usize) -> Result<()> {
    if dim > limit {
        return Err(Error::Size { dim, limit });
    }
    Ok(())
}

impl Witness for LiftedWitness {
    fn dims(&self) -> Vec<usize> {
        LiftedWitness::dims(self).to_vec()
    }

    fn trace(&self) -> f64 {
        LiftedWitness::trace(self)
    }

    fn expectation_pure(&self, v: &[C64]) -> Result<f64> {
        check_len(self, v)?;
        Ok(LiftedWitness::expectation_pure(self, v))
    }

    fn dense(&self, limit: usize) -> Result<HermOperator> {
        guard(self.total_dim(), limit)?;
        Ok(LiftedWitness::dense(self))
    }
}

impl Witness for DiagonalGraphWitness {
    fn dims(&self) -> Vec<usize> {
        vec![2; self.n]
    }

    fn trace(&self) -> f64 {
        DiagonalGraphWitness::trace(self)
    }

    fn expectation_pure(&self, v: &[C64]) -> Result<f64> {
        DiagonalGraphWitness::expectation_pure(self, v)
    }

    fn dense(&self, limit: usize) -> Result<HermOperator> {
        self.to_dense(limit)
    }
}

impl Witness for BipartiteWitness {
    fn dims(&self) -> Vec<usize> {
        BipartiteWitness::dims(self).to_vec()
    }

    fn trace(&self) -> f64 {
        BipartiteWitness::trace(self)
    }

    fn expectation_pure(&self, v: &[C64]) -> Result<f64> {
        check_len(self, v)?;
        Ok(BipartiteWitness::dense(self).quadratic_form(v))
    }

    fn dense(&self, limit: usize) -> Result<HermOperator> {
        guard(self.total_dim(), limit)?;
        Ok(BipartiteWitness::dense(self))
    }
}

impl Witness for HermOperator {
    fn dims(&self) -> Vec<usize> {
        HermOperator::dims(self).to_vec()
    }

    fn trace(&self) -> f64 {
        HermOperator::trace(self)
    }

    fn expectation_pure(&self, v: &[C64]) -> Result<f64> {
        check_len(self, v)?;
        Ok(self.quadratic_form(v))
    }

    fn dense(&self, limit: usize) -> Result<HermOperator> {
        guard(self.dim(), limit)?;
        Ok(self.clone())
    }
}

/// `λ I − |ψ><ψ|`.
#[derive(Clone, Debug)]
pub struct FidelityWitness {
    pub target: PureState,
    pub lambda: f64,
}

impl FidelityWitness {
    /// Uses the largest squared Schmidt coefficient over all cuts, the maximal
    /// squared overlap of the target with a biseparable pure state.
    pub fn for_state(target: &PureState) -> Result<Self> {
        let n = target.n_parties();
        let mut lambda = 0.0f64;
        for cut in enumerate_bipartitions(n)? {
            let sd = crate::tensorcore::schmidt(target, cut, crate::tensorcore::DEFAULT_RANK_TOL)?;
            lambda = lambda.max(sd.coeffs[0] * sd.coeffs[0]);
        }
        Ok(Self {
            target: target.clone(),
            lambda,
        })
    }
}

impl Witness for FidelityWitness {
    fn dims(&self) -> Vec<usize> {
        self.target.dims().to_vec()
    }

    fn trace(&self) -> f64 {
        self.lambda * self.target.dim() as f64 - 1.0
    }

    fn expectation_pure(&self, v: &[C64]) -> Result<f64> {
        check_len(self, v)?;
        let nn: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        Ok(self.lambda * nn - inner(self.target.amps(), v).norm_sqr())
    }

    fn dense(&self, limit: usize) -> Result<HermOperator> {
        guard(self.total_dim(), limit)?;
        HermOperator::identity(self.dims())
            .scale(self.lambda)
            .sub(&HermOperator::projector(&self.target))
    }
}

/// `ρ(p) = p I/D + (1 − p)|ψ><ψ|`.
#[derive(Clone, Debug)]
pub struct NoisyStateModel {
    pub target: PureState,
    pub p: f64,
}

impl NoisyStateModel {
    pub fn new(target: PureState, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("noise level {p} outside [0, 1]")));
        }
        Ok(Self { target, p })
    }

    pub fn total_dim(&self) -> usize {
        self.target.dim()
    }

    pub fn dense(&self, limit: usize) -> Result<DMatrix<C64>> {
        let d = self.total_dim();
        guard(d, limit)?;
        let a = self.target.amps();
        Ok(DMatrix::from_fn(d, d, |r, c| {
            let mix = if r == c { self.p / d as f64 } else { 0.0 };
            a[r] * a[c].conj() * (1.0 - self.p) + C64::new(mix, 0.0)
        }))
    }
}

pub enum Rho<'a> {
    Noisy(&'a NoisyStateModel),
    Dense(&'a DMatrix<C64>),
}

/// `Tr(W ρ)`; the noisy model never densifies.
pub fn expectation(w: &impl Witness, rho: Rho<'_>, dense_limit: usize) -> Result<f64> {
    match rho {
        Rho::Noisy(m) => {
            if m.total_dim() != w.total_dim() {
                return Err(Error::Shape("state and witness dimensions differ".into()));
            }
            let wpsi = w.expectation_pure(m.target.amps())?;
            Ok(m.p * w.trace() / m.total_dim() as f64 + (1.0 - m.p) * wpsi)
        }
        Rho::Dense(r) => {
            if r.nrows() != w.total_dim() || r.ncols() != w.total_dim() {
                return Err(Error::Shape(
                    "density matrix and witness dimensions differ".into(),
                ));
            }
            w.dense(dense_limit)?.expectation_dense(r)
        }
    }
}

/// `Tr W` from the structured form.
pub fn trace_of(w: &impl Witness) -> f64 {
    w.trace()
}

/// `p* = −w_ψ / (Tr(W)/D − w_ψ)`, clamped to `[0, 1]`.
pub fn white_noise_tolerance(w: &impl Witness, target: &PureState) -> Result<f64> {
    if target.dim() != w.total_dim() {
        return Err(Error::Shape("target and witness dimensions differ".into()));
    }
    let wpsi = w.expectation_pure(target.amps())?;
    if wpsi >= 0.0 {
        return Err(Error::NotDetecting { expectation: wpsi });
    }
    let mixed = w.trace() / target.dim() as f64;
    Ok((-wpsi / (mixed - wpsi)).clamp(0.0, 1.0))
}

/// Same quantity by bisection on the dense `Tr(W ρ(p))`.
pub fn white_noise_tolerance_bisection(
    w: &impl Witness,
    target: &PureState,
    dense_limit: usize,
) -> Result<f64> {
    let wd = w.dense(dense_limit)?;
    let f = |p: f64| -> Result<f64> {
        let m = NoisyStateModel::new(target.clone(), p)?;
        wd.expectation_dense(&m.dense(dense_limit)?)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if f(lo)? >= 0.0 {
        return Err(Error::NotDetecting {
            expectation: f(lo)?,
        });
    }
    if f(hi)? < 0.0 {
        return Ok(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FinerReport {
    pub finer: bool,
    /// `min eig(W1 − W2)`.
    pub margin: f64,
}

/// `W2` is finer than `W1` when `W1 − W2 ⪰ 0`.
pub fn finer_than(
    w1: &impl Witness,
    w2: &impl Witness,
    tol: f64,
    dense_limit: usize,
) -> Result<FinerReport> {
    if w1.dims() != w2.dims() {
        return Err(Error::Shape("witnesses act on different spaces".into()));
    }
    let diff = w1.dense(dense_limit)?.sub(&w2.dense(dense_limit)?)?;
    let margin = diff.min_eigenvalue();
    Ok(FinerReport {
        finer: margin >= -tol,
        margin,
    })
}

/// Configuration of the product-state see-saw.
#[derive(Clone, Copy, Debug)]
pub struct SeeSaw {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SeeSaw {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            iters: DEFAULT_ITERS,
            seed: 42,
        }
    }
}

pub(crate) fn random_unit(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Witness matrix reordered so that row `α·dB + β` is `|α>_A|β>_B`.
pub(crate) fn cut_ordered(w: &DMatrix<C64>, layout: &CutLayout) -> DMatrix<C64> {
    let (da, db) = (layout.dim_a, layout.dim_b);
    let mut idx = vec![0usize; da * db];
    for (g, &(a, b)) in layout.split.iter().enumerate() {
        idx[a * db + b] = g;
    }
    DMatrix::from_fn(da * db, da * db, |r, c| w[(idx[r], idx[c])])
}

/// `<b|W|b>` on side A when `b_side` is false, `<a|W|a>` on side B otherwise.
pub(crate) fn contract(
    m: &DMatrix<C64>,
    da: usize,
    db: usize,
    fixed: &[C64],
    fixed_is_b: bool,
) -> DMatrix<C64> {
    if fixed_is_b {
        DMatrix::from_fn(da, da, |a, a2| {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..db {
                let row = fixed[b].conj();
                for b2 in 0..db {
                    s += row * m[(a * db + b, a2 * db + b2)] * fixed[b2];
                }
            }
            s
        })
    } else {
        DMatrix::from_fn(db, db, |b, b2| {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..da {
                let row = fixed[a].conj();
                for a2 in 0..da {
                    s += row * m[(a * db + b, a2 * db + b2)] * fixed[a2];
                }
            }
            s
        })
    }
}

/// Lowest eigenpair of a small Hermitian matrix.
pub(crate) fn extreme_eigvec(m: DMatrix<C64>, lowest: bool) -> (f64, Vec<C64>) {
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let (mut best, mut k) = (eig.eigenvalues[0], 0);
    for (i, &e) in eig.eigenvalues.iter().enumerate() {
        if (lowest && e < best) || (!lowest && e > best) {
            best = e;
            k = i;
        }
    }
    let v: DVector<C64> = eig.eigenvectors.column(k).into_owned();
    (best, v.iter().copied().collect())
}

/// Upper bound on `min <ab|W|ab>` over product states across `cut`.
pub fn biseparable_min(w: &HermOperator, cut: Bipartition, cfg: &SeeSaw) -> Result<f64> {
    let layout = CutLayout::new(w.dims(), cut)?;
    let m = cut_ordered(w.matrix(), &layout);
    let (da, db) = (layout.dim_a, layout.dim_b);
    let vals: Vec<f64> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (cut.mask() << 24));
            rng.set_stream(r as u64);
            let mut b = random_unit(db, &mut rng);
            let mut prev = f64::INFINITY;
            let mut val = prev;
            for _ in 0..cfg.iters {
                let (_, a) = extreme_eigvec(contract(&m, da, db, &b, true), true);
                let (e, nb) = extreme_eigvec(contract(&m, da, db, &a, false), true);
                b = nb;
                val = e;
                if (prev - val).abs() < 1e-12 {
                    break;
                }
                prev = val;
            }
            val
        })
        .collect();
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

/// `biseparable_min` over every bipartition.
pub fn biseparable_min_all(w: &HermOperator, cfg: &SeeSaw) -> Result<Vec<(Bipartition, f64)>> {
    let cuts = enumerate_bipartitions(w.dims().len())?;
    cuts.into_par_iter()
        .map(|c| biseparable_min(w, c, cfg).map(|v| (c, v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bew::{fidelity_bew, optimal_bew};
    use crate::families::{
        ghz_state, schmidt_state, schmidt_tolerance_formula, schmidt_witness, w_state, w_witness,
    };
    use crate::graphstate::{cluster_witness, DiagonalGraphWitness};
    use crate::lift::{lift, LiftOptions};

    fn bell() -> PureState {
        ghz_state(2, 2).unwrap()
    }

    #[test]
    fn maximally_mixed_endpoint() {
        let w = w_witness(3).unwrap();
        let m = NoisyStateModel::new(w_state(3).unwrap(), 1.0).unwrap();
        let e = expectation(&w, Rho::Noisy(&m), 4096).unwrap();
        assert!((e - w.trace() / 8.0).abs() < 1e-14);
    }

    #[test]
    fn noisy_expectation_matches_dense() {
        let w = w_witness(3).unwrap();
        let m = NoisyStateModel::new(w_state(3).unwrap(), 0.3).unwrap();
        let a = expectation(&w, Rho::Noisy(&m), 4096).unwrap();
        let rho = m.dense(4096).unwrap();
        let b = expectation(&w, Rho::Dense(&rho), 4096).unwrap();
        assert!((a - b).abs() < 1e-12);
        let e0 = expectation(
            &w,
            Rho::Noisy(&NoisyStateModel::new(m.target.clone(), 0.0).unwrap()),
            4096,
        )
        .unwrap();
        let e1 = expectation(
            &w,
            Rho::Noisy(&NoisyStateModel::new(m.target.clone(), 1.0).unwrap()),
            4096,
        )
        .unwrap();
        assert!((a - (0.7 * e0 + 0.3 * e1)).abs() < 1e-12);
    }

    #[test]
    fn schmidt_witness_on_target() {
        let l = [0.5, 0.3, 0.2];
        let s = schmidt_state(&l, 3).unwrap();
        let w = schmidt_witness(&l, 3).unwrap();
        let m = NoisyStateModel::new(s.clone(), 0.0).unwrap();
        let q: f64 = l.iter().map(|x| x * x).sum();
        assert!((expectation(&w, Rho::Noisy(&m), 4096).unwrap() - (q - 1.0)).abs() < 1e-12);
        let p = white_noise_tolerance(&w, &s).unwrap();
        assert!((p - schmidt_tolerance_formula(&l, 3).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn ghz_tolerances() {
        let s = ghz_state(3, 3).unwrap();
        let w = schmidt_witness(&[1.0 / 3.0; 3], 3).unwrap();
        assert!((white_noise_tolerance(&w, &s).unwrap() - 0.75).abs() < 1e-12);
        let f = FidelityWitness::for_state(&s).unwrap();
        assert!((white_noise_tolerance(&f, &s).unwrap() - 18.0 / 26.0).abs() < 1e-12);
        let b = white_noise_tolerance_bisection(&w, &s, 4096).unwrap();
        assert!((b - 0.75).abs() < 1e-10);
    }

    #[test]
    fn w_state_fidelity_tolerance() {
        for n in 3..=6 {
            let s = w_state(n).unwrap();
            let f = FidelityWitness::for_state(&s).unwrap();
            let want = 1.0 / (n as f64 * (1.0 - 0.5f64.powi(n as i32)));
            assert!((white_noise_tolerance(&f, &s).unwrap() - want).abs() < 1e-10);
            assert!((trace_of(&f) - (f.lambda * (1 << n) as f64 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_detecting_is_an_error() {
        let s = bell();
        let w = HermOperator::identity(vec![2, 2]);
        assert!(matches!(
            white_noise_tolerance(&w, &s),
            Err(Error::NotDetecting { .. })
        ));
    }

    #[test]
    fn traces() {
        let w = w_witness(3).unwrap();
        assert!((trace_of(&w) - (1.0 + 4.0 * 2f64.sqrt() / 3.0)).abs() < 1e-12);
        assert!((w.dense().trace() - trace_of(&w)).abs() < 1e-10);
        let c = cluster_witness(4).unwrap();
        assert!((trace_of(&c) - (11.0 + 4.0 / 3.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn finer_orderings() {
        let s = schmidt_state(&[0.6, 0.3, 0.1], 2).unwrap();
        let cut = Bipartition::new(2, &[0]).unwrap();
        let wo = optimal_bew(&s, cut).unwrap();
        let wf = fidelity_bew(&s, cut).unwrap();
        assert!(finer_than(&wf, &wo, 1e-10, 4096).unwrap().finer);
        let same = finer_than(&wo, &wo, 1e-10, 4096).unwrap();
        assert!(same.finer && same.margin.abs() < 1e-12);
        let c = cluster_witness(4).unwrap();
        assert!(
            finer_than(&c, &DiagonalGraphWitness::cluster4_opt(), 1e-10, 4096)
                .unwrap()
                .finer
        );
    }

    #[test]
    fn see_saw_touches_zero_for_bell_witnesses() {
        let s = bell();
        let cut = Bipartition::new(2, &[0]).unwrap();
        let wo = optimal_bew(&s, cut).unwrap().dense();
        let cfg = SeeSaw::default();
        assert!(biseparable_min(&wo, cut, &cfg).unwrap().abs() < 1e-9);
        let f = FidelityWitness::for_state(&s).unwrap().dense(4096).unwrap();
        assert!(biseparable_min(&f, cut, &cfg).unwrap().abs() < 1e-9);
    }

    #[test]
    fn see_saw_finds_violation_of_corrupted_witness() {
        let s = ghz_state(3, 3).unwrap();
        let run = lift(&s, &LiftOptions::default()).unwrap();
        let cfg = SeeSaw::default();
        let good = biseparable_min_all(&run.witness.dense(), &cfg).unwrap();
        assert!(good.iter().all(|(_, v)| *v >= -1e-7));
        let bad = biseparable_min_all(&run.witness.with_scaled_coeffs(0.5).dense(), &cfg).unwrap();
        assert!(bad.iter().any(|(_, v)| *v < -1e-3));
    }

    #[test]
    fn see_saw_is_deterministic() {
        let w = w_witness(3).unwrap().dense();
        let cut = Bipartition::new(3, &[0]).unwrap();
        let cfg = SeeSaw {
            restarts: 8,
            iters: 50,
            seed: 7,
        };
        assert_eq!(
            biseparable_min(&w, cut, &cfg).unwrap(),
            biseparable_min(&w, cut, &cfg).unwrap()
        );
    }

    #[test]
    fn dense_guard() {
        let w = cluster_witness(8).unwrap();
        assert!(matches!(Witness::dense(&w, 64), Err(Error::Size { .. })));
    }
}
