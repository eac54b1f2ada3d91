//! Bipartite witnesses `W = O − |ψ><ψ|` for a single cut.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tensorcore::{
    complete_basis, inner, numerical_rank, partial_transpose, schmidt, Bipartition, HermOperator,
    PureState, SchmidtDecomposition, C64, DEFAULT_RANK_TOL,
};

#[derive(Clone, Debug, PartialEq)]
pub enum WitnessKind {
    OptimalPt,
    /// `alphas` in lexicographic `(i, j)` order over Schmidt pairs `i < j`.
    GeneralizedPt {
        alphas: Vec<f64>,
    },
    Fidelity,
    Custom,
}

/// A term `c |l_i>_A |r_j>_Ā` expressed in the Schmidt bases of the cut.
#[derive(Clone, Debug)]
pub struct SchmidtTerm {
    pub coeff: f64,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Debug)]
pub enum PositivePart {
    Schmidt {
        schmidt: SchmidtDecomposition,
        terms: Vec<SchmidtTerm>,
    },
    /// `c · I` on the whole register.
    ScaledIdentity(f64),
    /// Global-order vectors with non-negative weights.
    Explicit(Vec<(f64, Vec<C64>)>),
}

#[derive(Clone, Debug)]
pub struct BipartiteWitness {
    pub cut: Bipartition,
    pub target: PureState,
    pub kind: WitnessKind,
    pub positive: PositivePart,
}

impl BipartiteWitness {
    /// Expanded `(c_i, |v_i>)` pairs; `None` for the symbolic identity.
    pub fn positive_terms(&self) -> Option<Vec<(f64, Vec<C64>)>> {
        match &self.positive {
            PositivePart::Schmidt { schmidt, terms } => Some(
                terms
                    .iter()
                    .map(|t| (t.coeff, schmidt.product(t.i, t.j)))
                    .collect(),
            ),
            PositivePart::ScaledIdentity(_) => None,
            PositivePart::Explicit(v) => Some(v.clone()),
        }
    }

    pub fn dims(&self) -> &[usize] {
        self.target.dims()
    }

    pub fn dense(&self) -> HermOperator {
        let dims = self.target.dims().to_vec();
        let mut op = match &self.positive {
            PositivePart::ScaledIdentity(c) => HermOperator::identity(dims).scale(*c),
            _ => {
                let mut op = HermOperator::zeros(dims);
                for (c, v) in self.positive_terms().unwrap_or_default() {
                    op.add_rank_one(c, &v);
                }
                op
            }
        };
        op.add_rank_one(-1.0, self.target.amps());
        op
    }

    /// `<ψ|W|ψ>` from the term list.
    pub fn target_expectation(&self) -> f64 {
        let psi = self.target.amps();
        let pos = match &self.positive {
            PositivePart::ScaledIdentity(c) => *c,
            _ => self
                .positive_terms()
                .unwrap_or_default()
                .iter()
                .map(|(c, v)| c * inner(v, psi).norm_sqr())
                .sum(),
        };
        pos - 1.0
    }

    pub fn trace(&self) -> f64 {
        match &self.positive {
            PositivePart::ScaledIdentity(c) => c * self.target.dim() as f64 - 1.0,
            _ => {
                self.positive_terms()
                    .unwrap_or_default()
                    .iter()
                    .map(|(c, v)| c * inner(v, v).re)
                    .sum::<f64>()
                    - 1.0
            }
        }
    }

    /// Smallest eigenvalue of `W^Γ` over side `A`; non-negative for a decomposable witness.
    pub fn decomposability_margin(&self) -> Result<f64> {
        Ok(partial_transpose(&self.dense(), self.cut)?.min_eigenvalue())
    }

    /// Rescales so that `<ψ|W|ψ> = −1` and re-expresses the positive part
    /// `O' = sO − (s−1)|ψ><ψ|` by its positive eigen-terms on the Schmidt support.
    pub fn normalized(&self) -> Result<BipartiteWitness> {
        let PositivePart::Schmidt { schmidt, terms } = &self.positive else {
            return Err(Error::Domain(
                "only Schmidt-structured witnesses can be renormalized".into(),
            ));
        };
        let w = self.target_expectation();
        if w >= 0.0 {
            return Err(Error::NotDetecting { expectation: w });
        }
        let s = -1.0 / w;
        let r = schmidt.rank;
        let n2 = r * r;
        // the Schmidt support of the cut, indexed by (i, j) -> i * r + j
        let mut m = DMatrix::<C64>::zeros(n2, n2);
        for t in terms {
            let k = t.i * r + t.j;
            m[(k, k)] += C64::new(s * t.coeff, 0.0);
        }
        for i in 0..r {
            for j in 0..r {
                let v = schmidt.coeffs[i] * schmidt.coeffs[j] * (s - 1.0);
                m[(i * r + i, j * r + j)] -= C64::new(v, 0.0);
            }
        }
        let eig = m.symmetric_eigen();
        let mut out = Vec::new();
        for (k, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev <= 1e-12 {
                continue;
            }
            let col = eig.eigenvectors.column(k);
            let mut v = vec![C64::new(0.0, 0.0); self.target.dim()];
            for i in 0..r {
                for j in 0..r {
                    let a = col[i * r + j];
                    if a.norm() == 0.0 {
                        continue;
                    }
                    for (o, p) in v.iter_mut().zip(schmidt.product(i, j)) {
                        *o += a * p;
                    }
                }
            }
            out.push((ev, v));
        }
        Ok(BipartiteWitness {
            cut: self.cut,
            target: self.target.clone(),
            kind: WitnessKind::Custom,
            positive: PositivePart::Explicit(out),
        })
    }

    pub fn schmidt(&self) -> Option<&SchmidtDecomposition> {
        match &self.positive {
            PositivePart::Schmidt { schmidt, .. } => Some(schmidt),
            _ => None,
        }
    }
}

fn entangled_schmidt(state: &PureState, cut: Bipartition) -> Result<SchmidtDecomposition> {
    let s = schmidt(state, cut, DEFAULT_RANK_TOL)?;
    if s.rank < 2 {
        return Err(Error::NotEntangledAcrossCut(cut));
    }
    Ok(s)
}

/// `Σ_{ij} √(λ_i λ_j) |i_A j_Ā><i_A j_Ā| − |ψ><ψ|`, the partial transpose of `Q`.
pub fn optimal_bew(state: &PureState, cut: Bipartition) -> Result<BipartiteWitness> {
    let s = entangled_schmidt(state, cut)?;
    let r = s.rank;
    let mut terms = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r {
            terms.push(SchmidtTerm {
                coeff: s.coeffs[i] * s.coeffs[j],
                i,
                j,
            });
        }
    }
    Ok(BipartiteWitness {
        cut,
        target: state.clone(),
        kind: WitnessKind::OptimalPt,
        positive: PositivePart::Schmidt { schmidt: s, terms },
    })
}

/// Number of Schmidt pairs `i < j` at a cut, i.e. the expected `alphas` length.
pub fn pair_count(state: &PureState, cut: Bipartition) -> Result<usize> {
    let r = schmidt(state, cut, DEFAULT_RANK_TOL)?.rank;
    Ok(r * (r.saturating_sub(1)) / 2)
}

/// Witness from `Q̃ = Σ_{i<j} (α|ij> − β|ji>)(α<ij| − β<ji|)` with `αβ = √(λ_iλ_j)`.
pub fn generalized_bew(
    state: &PureState,
    cut: Bipartition,
    alphas: &[f64],
) -> Result<BipartiteWitness> {
    let s = entangled_schmidt(state, cut)?;
    let r = s.rank;
    let pairs = r * (r - 1) / 2;
    if alphas.len() != pairs {
        return Err(Error::Shape(format!(
            "{} alphas for {pairs} Schmidt pairs",
            alphas.len()
        )));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {a}")));
    }
    let mut terms = Vec::with_capacity(r * r);
    let mut k = 0;
    for i in 0..r {
        terms.push(SchmidtTerm {
            coeff: s.coeffs[i] * s.coeffs[i],
            i,
            j: i,
        });
        for j in i + 1..r {
            let a = alphas[k];
            let b = s.coeffs[i] * s.coeffs[j] / a;
            terms.push(SchmidtTerm { coeff: a * a, i, j });
            terms.push(SchmidtTerm {
                coeff: b * b,
                i: j,
                j: i,
            });
            k += 1;
        }
    }
    Ok(BipartiteWitness {
        cut,
        target: state.clone(),
        kind: WitnessKind::GeneralizedPt {
            alphas: alphas.to_vec(),
        },
        positive: PositivePart::Schmidt { schmidt: s, terms },
    })
}

/// `λ_0 I − |ψ><ψ|` with `λ_0` the largest Schmidt weight at the cut.
pub fn fidelity_bew(state: &PureState, cut: Bipartition) -> Result<BipartiteWitness> {
    let s = schmidt(state, cut, DEFAULT_RANK_TOL)?;
    let l0 = s.coeffs[0] * s.coeffs[0];
    Ok(BipartiteWitness {
        cut,
        target: state.clone(),
        kind: WitnessKind::Fidelity,
        positive: PositivePart::ScaledIdentity(l0),
    })
}

#[derive(Clone, Debug)]
pub struct SpanReport {
    pub rank: usize,
    pub full_dim: usize,
    pub listed: usize,
    pub max_abs_expectation: f64,
    /// Smallest expectation seen over random product states.
    pub min_random_product: f64,
}

impl SpanReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.full_dim
    }
}

fn normalize(v: Vec<C64>) -> Vec<C64> {
    let n = crate::tensorcore::norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

/// Builds the zero-expectation product states of the optimality argument and
/// checks that they span the whole bipartite space. `samples` random product
/// states are also evaluated as a Monte-Carlo separability probe.
pub fn optimality_span_check(w: &BipartiteWitness, samples: usize) -> Result<SpanReport> {
    let (schm, terms) = match (&w.kind, &w.positive) {
        (
            WitnessKind::OptimalPt | WitnessKind::GeneralizedPt { .. },
            PositivePart::Schmidt { schmidt, terms },
        ) => (schmidt, terms),
        _ => {
            return Err(Error::Domain(
                "span check needs an optimal or generalized partial-transpose witness".into(),
            ))
        }
    };
    let dense = w.dense();
    let lay = &schm.layout;
    let r = schm.rank;
    let weight = |i: usize, j: usize| {
        terms
            .iter()
            .find(|t| t.i == i && t.j == j)
            .map(|t| t.coeff.sqrt())
            .unwrap_or(0.0)
    };
    let one = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    let mut states: Vec<Vec<C64>> = Vec::new();
    for e in 0..r {
        for f in e + 1..r {
            // α = weight on |e f>, β = weight on |f e>
            let (a, b) = (weight(e, f), weight(f, e));
            let (sa, sb) = (a.sqrt(), b.sqrt());
            let combo = |side: &[Vec<C64>], ce: C64, cf: C64| -> Vec<C64> {
                side[e]
                    .iter()
                    .zip(&side[f])
                    .map(|(x, y)| x * ce + y * cf)
                    .collect()
            };
            states.push(schm.product(e, e));
            states.push(schm.product(f, f));
            let l = combo(&schm.left, one * sb, one * sa);
            let rr = combo(&schm.right, one * sa, one * sb);
            states.push(normalize(lay.embed(&l, &rr)));
            let l = combo(&schm.left, one * sb, im * sa);
            let rr = combo(&schm.right, one * sa, -im * sb);
            states.push(normalize(lay.embed(&l, &rr)));
        }
    }
    // products touching the complement of the Schmidt support
    let left_full = complete_basis(&schm.left[..r], lay.dim_a);
    let right_full = complete_basis(&schm.right[..r], lay.dim_b);
    for (i, l) in left_full.iter().enumerate() {
        for (j, rv) in right_full.iter().enumerate() {
            if i >= r || j >= r {
                states.push(lay.embed(l, rv));
            }
        }
    }
    let mut max_abs = 0.0f64;
    for v in &states {
        let e = dense.quadratic_form(v);
        max_abs = max_abs.max(e.abs());
    }
    if max_abs > 1e-9 {
        return Err(Error::CertificateFailure(format!(
            "listed product state has expectation {max_abs:e}"
        )));
    }
    let rank = numerical_rank(&states, 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut min_rand = f64::INFINITY;
    let random_side = |d: usize, rng: &mut ChaCha8Rng| -> Vec<C64> {
        normalize(
            (0..d)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        )
    };
    for _ in 0..samples {
        let l = random_side(lay.dim_a, &mut rng);
        let rv = random_side(lay.dim_b, &mut rng);
        min_rand = min_rand.min(dense.quadratic_form(&lay.embed(&l, &rv)));
    }
    Ok(SpanReport {
        rank,
        full_dim: lay.dim_a * lay.dim_b,
        listed: states.len(),
        max_abs_expectation: max_abs,
        min_random_product: min_rand,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorcore::enumerate_bipartitions;

    fn cut2() -> Bipartition {
        Bipartition::new(2, &[0]).unwrap()
    }

    fn schmidt_pair(lambdas: &[f64]) -> PureState {
        let d = lambdas.len();
        let mut amps = vec![0.0; d * d];
        for (i, l) in lambdas.iter().enumerate() {
            amps[i * d + i] = l.sqrt();
        }
        PureState::from_real(vec![d, d], &amps).unwrap()
    }

    fn w3() -> PureState {
        let mut a = vec![0.0; 8];
        a[1] = 1.0;
        a[2] = 1.0;
        a[4] = 1.0;
        PureState::from_real(vec![2, 2, 2], &a).unwrap()
    }

    #[test]
    fn bell_optimal_witness_matches_printed_form() {
        let phi = schmidt_pair(&[0.5, 0.5]);
        let w = optimal_bew(&phi, cut2()).unwrap();
        let terms = w.positive_terms().unwrap();
        assert_eq!(terms.len(), 4);
        assert!(terms.iter().all(|(c, _)| (c - 0.5).abs() < 1e-12));
        let mut expect = HermOperator::identity(vec![2, 2]).scale(0.5);
        expect.add_rank_one(-1.0, phi.amps());
        assert!(w.dense().max_entry_deviation(&expect).unwrap() < 1e-12);
        assert!((w.dense().min_eigenvalue() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_expectation_on_schmidt_product() {
        let phi = schmidt_pair(&[0.7, 0.3]);
        let w = optimal_bew(&phi, cut2()).unwrap();
        let e00 = PureState::basis(vec![2, 2], 0).unwrap();
        assert!(w.dense().expectation(&e00).unwrap().abs() < 1e-12);
    }

    #[test]
    fn target_expectation_is_purity_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=4 {
            let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 0.05).collect();
            let tot: f64 = raw.iter().sum();
            let l: Vec<f64> = raw.iter().map(|x| x / tot).collect();
            let phi = schmidt_pair(&l);
            let w = optimal_bew(&phi, cut2()).unwrap();
            let purity: f64 = l.iter().map(|x| x * x).sum();
            let dense = w.dense().expectation(&phi).unwrap();
            assert!((dense - (purity - 1.0)).abs() < 1e-10);
            assert!((w.target_expectation() - dense).abs() < 1e-12);
            assert!(w.decomposability_margin().unwrap() > -1e-10);
        }
    }

    #[test]
    fn rank_one_cut_is_rejected() {
        let p = PureState::basis(vec![2, 2], 0).unwrap();
        assert!(matches!(
            optimal_bew(&p, cut2()),
            Err(Error::NotEntangledAcrossCut(_))
        ));
    }

    #[test]
    fn generalized_reduces_to_optimal() {
        let phi = schmidt_pair(&[0.5, 0.3, 0.2]);
        let s = schmidt(&phi, cut2(), 1e-9).unwrap();
        let l = s.lambdas();
        let alphas: Vec<f64> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| (l[i] * l[j]).powf(0.25))
            .collect();
        let g = generalized_bew(&phi, cut2(), &alphas).unwrap();
        let o = optimal_bew(&phi, cut2()).unwrap();
        assert!(g.dense().max_entry_deviation(&o.dense()).unwrap() < 1e-12);
    }

    #[test]
    fn generalized_w3_matches_primed_witness() {
        let a = 0.9f64;
        let b = 2f64.sqrt() / 3.0 / a;
        let cut = Bipartition::new(3, &[0]).unwrap();
        let w = generalized_bew(&w3(), cut, &[a]).unwrap();
        // [(a|0>|00> − b|1>|ψ+>)(...)]^Γ1, built directly
        let s2 = 0.5f64.sqrt();
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(a, 0.0);
        v[5] = C64::new(-b * s2, 0.0);
        v[6] = C64::new(-b * s2, 0.0);
        let q = HermOperator::new(vec![2, 2, 2], {
            DMatrix::from_fn(8, 8, |r, c| v[r] * v[c].conj())
        })
        .unwrap();
        let want = partial_transpose(&q, cut).unwrap();
        assert!(w.dense().max_entry_deviation(&want).unwrap() < 1e-12);
        assert!(matches!(
            generalized_bew(&w3(), cut, &[-1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fidelity_examples() {
        let phi = schmidt_pair(&[0.5, 0.5]);
        let f = fidelity_bew(&phi, cut2()).unwrap();
        let mut want = HermOperator::identity(vec![2, 2]).scale(0.5);
        want.add_rank_one(-1.0, phi.amps());
        assert!(f.dense().max_entry_deviation(&want).unwrap() < 1e-12);
        let fw = fidelity_bew(&w3(), Bipartition::new(3, &[0]).unwrap()).unwrap();
        assert!(
            matches!(fw.positive, PositivePart::ScaledIdentity(c) if (c - 2.0 / 3.0).abs() < 1e-12)
        );
    }

    #[test]
    fn fidelity_dominates_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let d = rng.random_range(2..=4);
            let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 0.01).collect();
            let tot: f64 = raw.iter().sum();
            let l: Vec<f64> = raw.iter().map(|x| x / tot).collect();
            let phi = schmidt_pair(&l);
            let f = fidelity_bew(&phi, cut2()).unwrap().dense();
            let o = optimal_bew(&phi, cut2()).unwrap().dense();
            assert!(f.sub(&o).unwrap().min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn span_certificates() {
        let phi = schmidt_pair(&[0.5, 0.5]);
        let rep = optimality_span_check(&optimal_bew(&phi, cut2()).unwrap(), 200).unwrap();
        assert_eq!(rep.rank, 4);
        assert!(rep.max_abs_expectation < 1e-12);
        assert!(rep.min_random_product > -1e-9);

        let phi3 = schmidt_pair(&[1.0 / 3.0; 3]);
        let rep = optimality_span_check(&optimal_bew(&phi3, cut2()).unwrap(), 0).unwrap();
        assert_eq!(rep.listed, 12);
        assert_eq!(rep.rank, 9);

        let phi2 = schmidt_pair(&[0.8, 0.2]);
        let g = generalized_bew(&phi2, cut2(), &[0.9]).unwrap();
        let rep = optimality_span_check(&g, 500).unwrap();
        assert_eq!(rep.rank, 4);
        assert!(rep.min_random_product > -1e-9);
    }

    #[test]
    fn span_check_covers_rank_deficient_cuts() {
        // rank 2 inside a 3x3 space
        let phi = schmidt_pair(&[0.6, 0.4, 0.0]);
        let rep = optimality_span_check(&optimal_bew(&phi, cut2()).unwrap(), 0).unwrap();
        assert_eq!(rep.full_dim, 9);
        assert!(rep.full_rank());
    }

    #[test]
    fn normalized_has_unit_target_expectation() {
        let mut a = vec![0.0; 16];
        a[0] = 1.0;
        a[15] = 1.0;
        let ghz = PureState::from_real(vec![2; 4], &a).unwrap();
        for cut in enumerate_bipartitions(4).unwrap() {
            let w = optimal_bew(&ghz, cut).unwrap();
            let n = w.normalized().unwrap();
            assert!((n.target_expectation() + 1.0).abs() < 1e-12);
            let scaled = w.dense().scale(2.0);
            assert!(n.dense().max_entry_deviation(&scaled).unwrap() < 1e-12);
        }
    }
}
