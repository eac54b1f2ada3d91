//! Unfaithfulness tolerances for bipartite pure states and geometric-measure
//! lower bounds for noisy GHZ states.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{expectation, random_unit, NoisyStateModel, Rho};
use crate::families::{ghz_state, schmidt_witness};
use crate::tensorcore::{enumerate_bipartitions, CutLayout, HermOperator, C64};

/// Descending, normalized bipartite Schmidt spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    lambdas: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn new(lambdas: &[f64]) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::InvalidArity(format!(
                "spectrum of length {}",
                lambdas.len()
            )));
        }
        if lambdas.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::Domain(
                "negative or non-finite Schmidt weight".into(),
            ));
        }
        let s: f64 = lambdas.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization { norm: s });
        }
        let mut v: Vec<f64> = lambdas.iter().map(|l| l / s).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { lambdas: v })
    }

    /// `λ_i = x_i² / |x|²`.
    pub fn from_amplitudes(x: &[f64]) -> Result<Self> {
        let n: f64 = x.iter().map(|v| v * v).sum();
        if n == 0.0 {
            return Err(Error::Domain("zero amplitude vector".into()));
        }
        Self::new(&x.iter().map(|v| v * v / n).collect::<Vec<_>>())
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(&vec![1.0 / d as f64; d])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn d(&self) -> usize {
        self.lambdas.len()
    }

    /// `(Σ √λ_i)²`.
    pub fn s(&self) -> f64 {
        self.lambdas.iter().map(|l| l.sqrt()).sum::<f64>().powi(2)
    }

    /// `Σ λ_i²`.
    pub fn purity(&self) -> f64 {
        self.lambdas.iter().map(|l| l * l).sum()
    }

    /// `S − 1 = 2 Σ_{i<j} √(λ_i λ_j)` without cancellation.
    pub fn s_minus_one(&self) -> f64 {
        2.0 * self.pair_sum(|a, b| (a * b).sqrt())
    }

    /// `1 − Σ λ_i² = 2 Σ_{i<j} λ_i λ_j` without cancellation.
    pub fn linear_entropy(&self) -> f64 {
        2.0 * self.pair_sum(|a, b| a * b)
    }

    fn pair_sum(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let l = &self.lambdas;
        (0..l.len())
            .flat_map(|i| (i + 1..l.len()).map(move |j| (i, j)))
            .map(|(i, j)| f(l[i], l[j]))
            .sum()
    }

    fn ensure_entangled(&self) -> Result<()> {
        if self.lambdas[1] <= 0.0 {
            let cut = crate::tensorcore::Bipartition::new(2, &[0])?;
            return Err(Error::NotEntangledAcrossCut(cut));
        }
        Ok(())
    }
}

/// Tolerance of the best fidelity-type witness: `(S − 1)/(S − 1/d)`.
pub fn pf(spec: &SchmidtSpectrum) -> Result<f64> {
    spec.ensure_entangled()?;
    let sm = spec.s_minus_one();
    Ok(sm / (sm + 1.0 - 1.0 / spec.d() as f64))
}

/// Tolerance of the optimal decomposable witness: `(1 − q)/(1 − q + (S − 1)/d²)`.
pub fn po(spec: &SchmidtSpectrum) -> Result<f64> {
    spec.ensure_entangled()?;
    let le = spec.linear_entropy();
    let d2 = (spec.d() * spec.d()) as f64;
    Ok(le / (le + spec.s_minus_one() / d2))
}

/// Entanglement threshold of the noisy state: `d²√(λ0λ1)/(1 + d²√(λ0λ1))`.
pub fn pe(spec: &SchmidtSpectrum) -> Result<f64> {
    spec.ensure_entangled()?;
    let l = spec.lambdas();
    let x = (spec.d() * spec.d()) as f64 * (l[0] * l[1]).sqrt();
    Ok(x / (1.0 + x))
}

/// `(1 − 1/d)/(1 − 1/d^n)`.
pub fn fidelity_tolerance_bound(d: usize, n: usize) -> Result<f64> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidArity(format!("d = {d}, n = {n}")));
    }
    Ok((1.0 - 1.0 / d as f64) / (1.0 - (d as f64).powi(-(n as i32))))
}

#[derive(Clone, Debug)]
pub struct LdResult {
    pub l: f64,
    pub spectrum: SchmidtSpectrum,
}

struct NegativeGap;

impl CostFunction for NegativeGap {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(match SchmidtSpectrum::from_amplitudes(x) {
            Ok(s) => match (po(&s), pf(&s)) {
                (Ok(a), Ok(b)) => b - a,
                _ => 0.0,
            },
            Err(_) => 0.0,
        })
    }
}

fn nelder_mead_from(x0: Vec<f64>, iters: u64) -> Option<(f64, Vec<f64>)> {
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        v[i] += 0.1;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-13).ok()?;
    let res = Executor::new(NegativeGap, solver)
        .configure(|s| s.max_iters(iters))
        .run()
        .ok()?;
    let st = res.state();
    Some((-st.get_best_cost(), st.get_best_param()?.clone()))
}

/// Maximal `po − pf` over spectra of length `d`, by multi-start Nelder–Mead on
/// square-root coordinates.
pub fn ld_maximize(d: usize, starts: usize, seed: u64) -> Result<LdResult> {
    if !(2..=12).contains(&d) {
        return Err(Error::InvalidArity(format!("d = {d}")));
    }
    let best = (0..starts)
        .into_par_iter()
        .filter_map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let x0: Vec<f64> = (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
                .collect();
            nelder_mead_from(x0, 4000)
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
        .ok_or_else(|| Error::Domain("no optimization start converged".into()))?;
    Ok(LdResult {
        l: best.0,
        spectrum: SchmidtSpectrum::from_amplitudes(&best.1)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnfaithfulAverage {
    pub gap: f64,
    pub window: f64,
    pub ratio: f64,
    pub samples: usize,
}

pub const SAMPLE_CHUNK: usize = 10_000;

/// Monte-Carlo averages of `po − pf`, `pe − pf` and their ratio over spectra
/// with `√λ` uniform on the positive orthant of the unit sphere.
pub fn unfaithful_average(d: usize, samples: usize, seed: u64) -> Result<UnfaithfulAverage> {
    if d < 2 || samples == 0 {
        return Err(Error::InvalidArity(format!("d = {d}, samples = {samples}")));
    }
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<[f64; 3]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            let mut acc = [0.0; 3];
            for _ in 0..len {
                let x: Vec<f64> = (0..d)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let s = SchmidtSpectrum::from_amplitudes(&x).expect("gaussian sample is nonzero");
                let (f, o, e) = (pf(&s).unwrap(), po(&s).unwrap(), pe(&s).unwrap());
                acc[0] += o - f;
                acc[1] += e - f;
                if e - f > 0.0 {
                    acc[2] += (o - f) / (e - f);
                }
            }
            acc
        })
        .collect();
    let mut tot = [0.0; 3];
    for p in parts {
        (0..3).for_each(|i| tot[i] += p[i]);
    }
    let n = samples as f64;
    Ok(UnfaithfulAverage {
        gap: tot[0] / n,
        window: tot[1] / n,
        ratio: tot[2] / n,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GammaNorm {
    /// `ε_f = 1 − γ(S)/d`.
    #[default]
    Corrected,
    /// `ε_f = 1 − γ(S)` as printed.
    Printed,
}

/// Fidelity-witness lower bound on the geometric measure of the noisy GHZ state.
pub fn gamma_bound(d: usize, n: usize, p: f64, norm: GammaNorm) -> Result<f64> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidArity(format!("d = {d}, n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p}")));
    }
    let df = d as f64;
    let s = (df * (1.0 - p) + p / df.powi(n as i32 - 1))
        .max(1.0)
        .min(df);
    let gamma = (s.sqrt() + ((df - 1.0) * (df - s)).sqrt()).powi(2) / df;
    let eps = match norm {
        GammaNorm::Corrected => 1.0 - gamma / df,
        GammaNorm::Printed => 1.0 - gamma,
    };
    Ok(eps.max(0.0))
}

/// Conjugate function of the geometric measure for `r W` with the GHZ witness.
/// Uses `(s − u)/2 = 2rc/(s + u)` to avoid cancellation at large `|r|`.
pub fn ehat_closed(d: usize, r: f64) -> f64 {
    let c = (d as f64 - 1.0) / d as f64;
    let u = 1.0 - r;
    let s = (u * u + 4.0 * r * c).sqrt();
    -c * r + 2.0 * r * c / (s + u)
}

/// The printed expression, for comparison at moderate `r`.
pub fn ehat_closed_naive(d: usize, r: f64) -> f64 {
    let c = (d as f64 - 1.0) / d as f64;
    (1.0 - r) / 2.0 + 0.5 * ((1.0 - r).powi(2) + 4.0 * r * c).sqrt() + r / d as f64 - 1.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureBoundResult {
    pub p: f64,
    pub w: f64,
    pub eps_f: f64,
    pub eps_o: f64,
    pub r_star: f64,
}

/// `Tr(ρ(p) W)` for the uniform GHZ witness: `p Tr W/d^n + (1 − p)(1/d − 1)`
/// with `Tr W = (2^{n−1} − 1)(d − 1)`.
pub fn ghz_witness_expectation_closed(d: usize, n: usize, p: f64) -> f64 {
    let df = d as f64;
    let tr = ((1u64 << (n - 1)) - 1) as f64 * (df - 1.0);
    p * tr / df.powi(n as i32) + (1.0 - p) * (1.0 / df - 1.0)
}

pub const STRUCTURED_DIM_LIMIT: usize = 1 << 20;

/// `Tr(ρ(p) W)` through the structured witness when it fits, else closed form.
pub fn ghz_witness_expectation(d: usize, n: usize, p: f64) -> Result<f64> {
    Ok(GhzBoundModel::new(d, n)?.w(p))
}

/// Endpoints of the linear map `p ↦ Tr(ρ(p) W)` for the uniform GHZ witness.
#[derive(Clone, Copy, Debug)]
pub struct GhzBoundModel {
    pub d: usize,
    pub n: usize,
    /// `Tr(W)/D`.
    pub mixed: f64,
    /// `<GHZ|W|GHZ>`.
    pub target: f64,
}

impl GhzBoundModel {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 || n < 2 {
            return Err(Error::InvalidArity(format!("d = {d}, n = {n}")));
        }
        let dim = (d as f64).powi(n as i32);
        let (mixed, target) = if dim > STRUCTURED_DIM_LIMIT as f64 {
            (
                ghz_witness_expectation_closed(d, n, 1.0),
                ghz_witness_expectation_closed(d, n, 0.0),
            )
        } else {
            let w = schmidt_witness(&vec![1.0 / d as f64; d], n)?;
            let s = ghz_state(d, n)?;
            let at = |p: f64| -> Result<f64> {
                expectation(&w, Rho::Noisy(&NoisyStateModel::new(s.clone(), p)?), 0)
            };
            (at(1.0)?, at(0.0)?)
        };
        Ok(Self {
            d,
            n,
            mixed,
            target,
        })
    }

    pub fn w(&self, p: f64) -> f64 {
        p * self.mixed + (1.0 - p) * self.target
    }

    pub fn bound(&self, p: f64, norm: GammaNorm) -> Result<MeasureBoundResult> {
        let (d, n) = (self.d, self.n);
        let eps_f = gamma_bound(d, n, p, norm)?;
        let w = self.w(p);
        let obj = |r: f64| r * w - ehat_closed(d, r);
        let mut big_r = R_WINDOW;
        let (mut r_star, mut val) = golden_max(obj, -big_r, 0.0, 1e-10);
        while r_star < -0.99 * big_r && big_r < R_MAX {
            big_r *= 2.0;
            let (r2, v2) = golden_max(obj, -big_r, -0.5 * big_r, 1e-10);
            if v2 <= val {
                break;
            }
            r_star = r2;
            val = v2;
        }
        if val < 0.0 {
            r_star = 0.0;
            val = 0.0;
        }
        Ok(MeasureBoundResult {
            p,
            w,
            eps_f,
            eps_o: val,
            r_star,
        })
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol * (1.0 + a.abs().max(b.abs())) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

pub const R_WINDOW: f64 = 64.0;
const R_MAX: f64 = 1e12;

/// `ε_o = sup_{r ≤ 0} { r w − Ê(r) }` together with the fidelity bound.
pub fn eps_o(d: usize, n: usize, p: f64, norm: GammaNorm) -> Result<MeasureBoundResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p}")));
    }
    GhzBoundModel::new(d, n)?.bound(p, norm)
}

fn top_product(layout: &CutLayout, psi: &[C64]) -> Vec<C64> {
    let flat = layout.reshape(psi);
    let m = DMatrix::from_row_slice(layout.dim_a, layout.dim_b, &flat);
    let svd = m.svd(true, true);
    let k = svd.singular_values.imax();
    let u: Vec<C64> = svd
        .u
        .as_ref()
        .expect("u requested")
        .column(k)
        .iter()
        .copied()
        .collect();
    let v: Vec<C64> = svd
        .v_t
        .as_ref()
        .expect("v_t requested")
        .row(k)
        .iter()
        .copied()
        .collect();
    layout.embed(&u, &v)
}

/// Largest eigenvalue and eigenvector of `diag(e) + |φ><φ|` (φ in the eigenbasis).
fn rank_one_top(e: &[f64], phi: &[C64]) -> (f64, Vec<C64>) {
    let w: Vec<f64> = phi.iter().map(|x| x.norm_sqr()).collect();
    let emax = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let active = e
        .iter()
        .zip(&w)
        .filter(|(_, &wk)| wk > 1e-300)
        .map(|(&ek, _)| ek)
        .fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = w.iter().sum();
    // Newton from the right on Σ w_k/(μ − e_k) = 1 converges monotonically
    let mut mu = active + total;
    for _ in 0..200 {
        let (g, dg) = e.iter().zip(&w).fold((0.0, 0.0), |(g, dg), (&ek, &wk)| {
            let t = 1.0 / (mu - ek);
            (g + wk * t, dg - wk * t * t)
        });
        let step = (g - 1.0) / dg;
        let next = mu - step;
        if !(next > active) {
            mu = 0.5 * (mu + active);
            continue;
        }
        if (next - mu).abs() <= 1e-16 * mu.abs().max(1.0) {
            mu = next;
            break;
        }
        mu = next;
    }
    if mu < emax {
        let k = e.iter().position(|&x| x == emax).expect("max exists");
        let mut v = vec![C64::new(0.0, 0.0); e.len()];
        v[k] = C64::new(1.0, 0.0);
        return (emax, v);
    }
    let v: Vec<C64> = e.iter().zip(phi).map(|(&ek, &pk)| pk / (mu - ek)).collect();
    let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    (mu, v.into_iter().map(|x| x / nv).collect())
}

/// `sup_ψ sup_{φ biseparable} <ψ|(rW + |φ><φ|)|ψ> − 1` by alternating the
/// top eigenvector of `rW + |φ><φ|` with the best product approximation of ψ.
pub fn ehat_numeric(w: &HermOperator, r: f64, restarts: usize, seed: u64) -> Result<f64> {
    let dim = w.dim();
    if dim > 4096 {
        return Err(Error::Size { dim, limit: 4096 });
    }
    let eig = (w.matrix() * C64::new(r, 0.0)).symmetric_eigen();
    let e: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let u = eig.eigenvectors;
    let ut = u.adjoint();
    let cuts = enumerate_bipartitions(w.dims().len())?;
    let layouts: Vec<CutLayout> = cuts
        .iter()
        .map(|&c| CutLayout::new(w.dims(), c))
        .collect::<Result<_>>()?;
    let best = (0..restarts * layouts.len())
        .into_par_iter()
        .map(|job| {
            let layout = &layouts[job % layouts.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(job as u64);
            let a = random_unit(layout.dim_a, &mut rng);
            let b = random_unit(layout.dim_b, &mut rng);
            let mut phi = layout.embed(&a, &b);
            let mut prev = f64::NEG_INFINITY;
            let mut val = prev;
            for _ in 0..2000 {
                let pe = &ut * nalgebra::DVector::from_column_slice(&phi);
                let (mu, y) = rank_one_top(&e, pe.as_slice());
                val = mu;
                let psi = &u * nalgebra::DVector::from_column_slice(&y);
                phi = top_product(layout, psi.as_slice());
                if (val - prev).abs() < 1e-14 {
                    break;
                }
                prev = val;
            }
            val
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best - 1.0)
}
