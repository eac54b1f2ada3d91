//! Lifting a family of bipartite witnesses to a multipartite one,
//! `Ŵ = Σ_k c_k Ĩ_k − |ψ><ψ|`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bew::{optimal_bew, BipartiteWitness};
use crate::error::{Error, Result};
use crate::tensorcore::{
    enumerate_bipartitions, inner, orthonormalize, schmidt, Bipartition, HermOperator, PureState,
    C64, DEFAULT_RANK_TOL,
};

pub const DEFAULT_ORTH_TOL: f64 = 1e-8;
pub const DEFAULT_DEDUP_TOL: f64 = 1e-9;
pub const DEFAULT_CERT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct TaggedEntry {
    pub coeff: f64,
    pub vector: Vec<C64>,
    pub origin: Bipartition,
}

#[derive(Clone, Debug, Default)]
pub struct TaggedVectorSet {
    pub entries: Vec<TaggedEntry>,
    /// Cuts across which the target had Schmidt rank 1.
    pub rank_one_cuts: Vec<Bipartition>,
}

impl TaggedVectorSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges entries describing the same ray, keeping the larger coefficient.
    pub fn dedup(&self, tol: f64) -> TaggedVectorSet {
        let mut kept: Vec<TaggedEntry> = Vec::new();
        for e in &self.entries {
            match kept
                .iter_mut()
                .find(|k| inner(&k.vector, &e.vector).norm() > 1.0 - tol)
            {
                Some(k) => {
                    if e.coeff > k.coeff {
                        k.coeff = e.coeff;
                        k.origin = e.origin;
                    }
                }
                None => kept.push(e.clone()),
            }
        }
        TaggedVectorSet {
            entries: kept,
            rank_one_cuts: self.rank_one_cuts.clone(),
        }
    }
}

/// One block of terms from a single witness that share a coefficient; any
/// orthonormal basis of their span describes the same operator.
struct Eigenspace {
    coeff: f64,
    origin: Bipartition,
    basis: Vec<Vec<C64>>,
}

fn eigenspaces_of(terms: &[(f64, Vec<C64>)], origin: Bipartition) -> Result<Vec<Eigenspace>> {
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[b].0.total_cmp(&terms[a].0));
    let mut spaces: Vec<Eigenspace> = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let c0 = terms[order[k]].0;
        let mut end = k + 1;
        while end < order.len() && (terms[order[end]].0 - c0).abs() <= 1e-10 * c0.abs().max(1.0) {
            end += 1;
        }
        let vecs: Vec<Vec<C64>> = order[k..end].iter().map(|&i| terms[i].1.clone()).collect();
        let coeff = order[k..end]
            .iter()
            .map(|&i| terms[i].0)
            .fold(f64::MIN, f64::max);
        spaces.push(Eigenspace {
            coeff,
            origin,
            basis: orthonormalize(&vecs, 1e-10)?,
        });
        k = end;
    }
    Ok(spaces)
}

/// Deterministic, generic probe weights.
fn probe_weight(j: usize) -> f64 {
    let g = 0.618_033_988_749_894_9_f64;
    1.0 + ((j as f64 + 1.0) * g).fract()
}

/// Rotates every degenerate eigenspace onto the eigenbasis of the probe
/// `H = Σ_e w_e P_e` restricted to it. `H` is built from all spaces of all
/// cuts, so the rotated vectors align with structure shared between cuts.
fn canonicalize(spaces: &mut [Eigenspace]) {
    let weights: Vec<f64> = (0..spaces.len()).map(probe_weight).collect();
    let rotated: Vec<Option<Vec<Vec<C64>>>> = spaces
        .par_iter()
        .map(|sp| {
            let m = sp.basis.len();
            if m < 2 {
                return None;
            }
            // H B, accumulated space by space
            let dim = sp.basis[0].len();
            let mut hb = vec![vec![C64::new(0.0, 0.0); dim]; m];
            for (other, w) in spaces.iter().zip(&weights) {
                for u in &other.basis {
                    let ov: Vec<C64> = sp.basis.iter().map(|b| inner(u, b)).collect();
                    if ov.iter().all(|x| x.norm() < 1e-14) {
                        continue;
                    }
                    for (col, o) in hb.iter_mut().zip(&ov) {
                        let f = o * w;
                        col.iter_mut().zip(u).for_each(|(x, y)| *x += y * f);
                    }
                }
            }
            let small = DMatrix::from_fn(m, m, |r, c| inner(&sp.basis[r], &hb[c]));
            let small = (&small + small.adjoint()) * C64::new(0.5, 0.0);
            let eig = small.symmetric_eigen();
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let out = idx
                .iter()
                .map(|&k| {
                    let col = eig.eigenvectors.column(k);
                    let mut v = vec![C64::new(0.0, 0.0); dim];
                    for (b, a) in sp.basis.iter().zip(col.iter()) {
                        v.iter_mut().zip(b).for_each(|(x, y)| *x += y * a);
                    }
                    v
                })
                .collect();
            Some(out)
        })
        .collect();
    for (sp, rot) in spaces.iter_mut().zip(rotated) {
        if let Some(r) = rot {
            sp.basis = r;
        }
    }
}

/// Collects the positive parts of the given witnesses. Rank-one cuts listed in
/// `rank_one` add their product vector with coefficient 1.
pub fn harvest_witnesses(
    state: &PureState,
    bews: &[BipartiteWitness],
    rank_one: &[Bipartition],
) -> Result<TaggedVectorSet> {
    let mut spaces = Vec::new();
    for w in bews {
        if w.target.dims() != state.dims() || w.target.max_deviation(state) > 1e-12 {
            return Err(Error::Inconsistent(format!(
                "witness for cut {} targets a different state",
                w.cut
            )));
        }
        let terms = w
            .positive_terms()
            .ok_or_else(|| Error::Domain("identity-based witnesses cannot be lifted".into()))?;
        spaces.extend(eigenspaces_of(&terms, w.cut)?);
    }
    for &cut in rank_one {
        let s = schmidt(state, cut, DEFAULT_RANK_TOL)?;
        spaces.push(Eigenspace {
            coeff: 1.0,
            origin: cut,
            basis: vec![s.product(0, 0)],
        });
    }
    canonicalize(&mut spaces);
    let entries = spaces
        .into_iter()
        .flat_map(|sp| {
            let (c, o) = (sp.coeff, sp.origin);
            sp.basis.into_iter().map(move |vector| TaggedEntry {
                coeff: c,
                vector,
                origin: o,
            })
        })
        .collect();
    Ok(TaggedVectorSet {
        entries,
        rank_one_cuts: rank_one.to_vec(),
    })
}

/// How each cut's witness is scaled before harvesting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scaling {
    /// The optimal partial-transpose witness as is.
    #[default]
    Lemma,
    /// Rescaled to `<ψ|W|ψ> = −1`, positive part re-expanded by eigen-terms.
    UnitTargetExpectation,
}

#[derive(Clone, Debug)]
pub struct LiftOptions {
    pub schmidt_tol: f64,
    pub orth_tol: f64,
    pub dedup_tol: f64,
    pub scaling: Scaling,
}

impl Default for LiftOptions {
    fn default() -> Self {
        Self {
            schmidt_tol: DEFAULT_RANK_TOL,
            orth_tol: DEFAULT_ORTH_TOL,
            dedup_tol: DEFAULT_DEDUP_TOL,
            scaling: Scaling::Lemma,
        }
    }
}

/// Builds the bipartite family for `cuts`; also returns the rank-one cuts.
pub fn bipartite_family(
    state: &PureState,
    cuts: &[Bipartition],
    opts: &LiftOptions,
) -> Result<(Vec<BipartiteWitness>, Vec<Bipartition>)> {
    if cuts.is_empty() {
        return Err(Error::InvalidArity("no cuts given".into()));
    }
    state.ensure_normalized()?;
    let built: Vec<Result<Option<BipartiteWitness>>> = cuts
        .par_iter()
        .map(|&cut| {
            let s = schmidt(state, cut, opts.schmidt_tol)?;
            if s.rank < 2 {
                return Ok(None);
            }
            let w = optimal_bew(state, cut)?;
            Ok(Some(match opts.scaling {
                Scaling::Lemma => w,
                Scaling::UnitTargetExpectation => w.normalized()?,
            }))
        })
        .collect();
    let mut bews = Vec::new();
    let mut rank_one = Vec::new();
    for (r, &cut) in built.into_iter().zip(cuts) {
        match r? {
            Some(w) => bews.push(w),
            None => rank_one.push(cut),
        }
    }
    Ok((bews, rank_one))
}

/// Tagged set from the Lemma-1 witnesses of the given cuts.
pub fn harvest(state: &PureState, cuts: &[Bipartition], tol: f64) -> Result<TaggedVectorSet> {
    let opts = LiftOptions {
        schmidt_tol: tol,
        ..Default::default()
    };
    let (bews, rank_one) = bipartite_family(state, cuts, &opts)?;
    harvest_witnesses(state, &bews, &rank_one)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoPartition {
    pub groups: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Connected components of the graph joining entries with `|<u|v>| > orth_tol`.
/// Groups are ordered by their smallest member index.
pub fn group(set: &TaggedVectorSet, orth_tol: f64) -> OrthoPartition {
    let n = set.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let vi = &set.entries[i].vector;
            (i + 1..n)
                .filter(move |&j| inner(vi, &set.entries[j].vector).norm() > orth_tol)
                .map(move |j| (i, j))
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    OrthoPartition { groups }
}

#[derive(Clone, Debug)]
pub enum BlockBasis {
    Vectors(Vec<Vec<C64>>),
    /// Computational basis states by global index.
    Computational(Vec<usize>),
}

impl BlockBasis {
    pub fn dim(&self) -> usize {
        match self {
            BlockBasis::Vectors(v) => v.len(),
            BlockBasis::Computational(v) => v.len(),
        }
    }

    /// `<ψ|P|ψ>` for the block projector.
    pub fn weight_on(&self, psi: &[C64]) -> f64 {
        match self {
            BlockBasis::Vectors(v) => v.iter().map(|u| inner(u, psi).norm_sqr()).sum(),
            BlockBasis::Computational(ix) => ix.iter().map(|&i| psi[i].norm_sqr()).sum(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Block {
    pub coeff: f64,
    pub basis: BlockBasis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessWarning {
    /// Some cut has Schmidt rank 1: the target is not GME.
    RankOneCuts(Vec<Bipartition>),
    /// Built from a strict subset of all bipartitions.
    Partial,
}

#[derive(Clone, Debug)]
pub struct LiftedWitness {
    pub target: PureState,
    pub blocks: Vec<Block>,
    pub warnings: Vec<WitnessWarning>,
}

impl LiftedWitness {
    pub fn new(target: PureState, blocks: Vec<Block>) -> Self {
        Self {
            target,
            blocks,
            warnings: Vec::new(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        self.target.dims()
    }

    pub fn is_gme_claim(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn dense(&self) -> HermOperator {
        let dims = self.target.dims().to_vec();
        let mut op = HermOperator::zeros(dims.clone());
        let mut m = op.clone().into_matrix();
        for b in &self.blocks {
            match &b.basis {
                BlockBasis::Vectors(vs) => {
                    for v in vs {
                        op.add_rank_one(b.coeff, v);
                    }
                }
                BlockBasis::Computational(ix) => {
                    for &i in ix {
                        m[(i, i)] += C64::new(b.coeff, 0.0);
                    }
                }
            }
        }
        op.add_rank_one(-1.0, self.target.amps());
        let total = op.into_matrix() + m;
        HermOperator::from_matrix_symmetrized(dims, total).expect("sum of projectors is Hermitian")
    }

    /// `Σ_k c_k dim(V_k) − 1`.
    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.coeff * b.basis.dim() as f64)
            .sum::<f64>()
            - 1.0
    }

    /// `<ψ|Ŵ|ψ>` for the target.
    pub fn target_expectation(&self) -> f64 {
        self.expectation_pure(self.target.amps())
    }

    pub fn expectation_pure(&self, v: &[C64]) -> f64 {
        let pos: f64 = self
            .blocks
            .iter()
            .map(|b| b.coeff * b.basis.weight_on(v))
            .sum();
        pos - inner(self.target.amps(), v).norm_sqr()
    }

    /// Copy with every block coefficient multiplied by `f` (test control).
    pub fn with_scaled_coeffs(&self, f: f64) -> LiftedWitness {
        let mut out = self.clone();
        out.blocks.iter_mut().for_each(|b| b.coeff *= f);
        out
    }

    pub fn max_block_overlap(&self) -> f64 {
        let vecs: Vec<(usize, Vec<C64>)> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(k, b)| match &b.basis {
                BlockBasis::Vectors(v) => v.iter().map(|x| (k, x.clone())).collect::<Vec<_>>(),
                BlockBasis::Computational(ix) => ix
                    .iter()
                    .map(|&i| {
                        let mut e = vec![C64::new(0.0, 0.0); self.target.dim()];
                        e[i] = C64::new(1.0, 0.0);
                        (k, e)
                    })
                    .collect(),
            })
            .collect();
        let mut worst = 0.0f64;
        for (a, (ka, u)) in vecs.iter().enumerate() {
            for (kb, v) in &vecs[a + 1..] {
                if ka != kb {
                    worst = worst.max(inner(u, v).norm());
                }
            }
        }
        worst
    }
}

/// Orthonormalizes each group and takes its maximal coefficient.
pub fn assemble(
    state: &PureState,
    set: &TaggedVectorSet,
    partition: &OrthoPartition,
) -> Result<LiftedWitness> {
    let blocks: Vec<Result<Block>> = partition
        .groups
        .par_iter()
        .map(|g| {
            let vecs: Vec<Vec<C64>> = g.iter().map(|&i| set.entries[i].vector.clone()).collect();
            let coeff = g
                .iter()
                .map(|&i| set.entries[i].coeff)
                .fold(f64::MIN, f64::max);
            Ok(Block {
                coeff,
                basis: BlockBasis::Vectors(orthonormalize(&vecs, 1e-6)?),
            })
        })
        .collect();
    let mut w = LiftedWitness::new(state.clone(), blocks.into_iter().collect::<Result<_>>()?);
    if !set.rank_one_cuts.is_empty() {
        w.warnings
            .push(WitnessWarning::RankOneCuts(set.rank_one_cuts.clone()));
    }
    Ok(w)
}

#[derive(Clone, Debug)]
pub struct CutMargin {
    pub cut: Bipartition,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub margins: Vec<CutMargin>,
    pub tol: f64,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.margins.iter().all(|m| m.margin >= -self.tol)
    }

    pub fn worst(&self) -> f64 {
        self.margins
            .iter()
            .map(|m| m.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn worst_margin(&self) -> Option<&CutMargin> {
        self.margins
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
    }
}

/// `min eig(Ŵ − W_{A|Ā})` for each bipartite witness. Rank-one cuts have no
/// witness and are not listed; the lifted witness carries a warning for them.
pub fn certify(
    state: &PureState,
    lifted: &LiftedWitness,
    bews: &[BipartiteWitness],
    tol: f64,
) -> Result<CertificateReport> {
    if lifted.target.dims() != state.dims() || lifted.target.max_deviation(state) > 1e-12 {
        return Err(Error::Inconsistent(
            "lifted witness targets a different state".into(),
        ));
    }
    for w in bews {
        if w.target.dims() != state.dims() || w.target.max_deviation(state) > 1e-12 {
            return Err(Error::Inconsistent(format!(
                "witness for cut {} targets a different state",
                w.cut
            )));
        }
    }
    let hat = lifted.dense();
    let margins: Vec<CutMargin> = bews
        .par_iter()
        .map(|w| {
            let diff = hat.sub(&w.dense()).expect("same dims");
            CutMargin {
                cut: w.cut,
                margin: diff.min_eigenvalue(),
            }
        })
        .collect();
    Ok(CertificateReport { margins, tol })
}

/// Everything produced by one run of the pipeline.
#[derive(Clone, Debug)]
pub struct LiftRun {
    pub bews: Vec<BipartiteWitness>,
    pub rank_one: Vec<Bipartition>,
    pub set: TaggedVectorSet,
    pub partition: OrthoPartition,
    pub witness: LiftedWitness,
}

impl LiftRun {
    pub fn certify(&self, tol: f64) -> Result<CertificateReport> {
        certify(&self.witness.target, &self.witness, &self.bews, tol)
    }
}

/// Harvest, merge duplicate rays, group and assemble over the given cuts.
pub fn lift_with(state: &PureState, cuts: &[Bipartition], opts: &LiftOptions) -> Result<LiftRun> {
    let (bews, rank_one) = bipartite_family(state, cuts, opts)?;
    let set = harvest_witnesses(state, &bews, &rank_one)?.dedup(opts.dedup_tol);
    let partition = group(&set, opts.orth_tol);
    let mut witness = assemble(state, &set, &partition)?;
    if cuts.len() < (1usize << (state.n_parties() - 1)) - 1 {
        witness.warnings.push(WitnessWarning::Partial);
    }
    Ok(LiftRun {
        bews,
        rank_one,
        set,
        partition,
        witness,
    })
}

/// Full pipeline over every bipartition.
pub fn lift(state: &PureState, opts: &LiftOptions) -> Result<LiftRun> {
    let cuts = enumerate_bipartitions(state.n_parties())?;
    lift_with(state, &cuts, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w3() -> PureState {
        let mut a = vec![0.0; 8];
        a[1] = 1.0;
        a[2] = 1.0;
        a[4] = 1.0;
        PureState::from_real(vec![2, 2, 2], &a).unwrap()
    }

    fn ghz(d: usize, n: usize) -> PureState {
        let dims = vec![d; n];
        let total: usize = dims.iter().product();
        let mut a = vec![0.0; total];
        let step = (total - 1) / (d - 1);
        for i in 0..d {
            a[i * step] = 1.0;
        }
        PureState::from_real(dims, &a).unwrap()
    }

    fn all_cuts(n: usize) -> Vec<Bipartition> {
        enumerate_bipartitions(n).unwrap()
    }

    #[test]
    fn ghz_harvest_has_twelve_half_weight_entries() {
        let s = harvest(&ghz(2, 3), &all_cuts(3), 1e-9).unwrap();
        assert_eq!(s.len(), 12);
        assert!(s.entries.iter().all(|e| (e.coeff - 0.5).abs() < 1e-12));
    }

    #[test]
    fn w3_harvest_coefficients() {
        let s = harvest(&w3(), &all_cuts(3), 1e-9).unwrap();
        assert_eq!(s.len(), 12);
        let r2 = 2f64.sqrt() / 3.0;
        for cut in all_cuts(3) {
            let mut c: Vec<f64> = s
                .entries
                .iter()
                .filter(|e| e.origin == cut)
                .map(|e| e.coeff)
                .collect();
            c.sort_by(|a, b| b.total_cmp(a));
            let want = [2.0 / 3.0, r2, r2, 1.0 / 3.0];
            assert!(c.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn product_state_harvest() {
        let p = PureState::basis(vec![2, 2, 2], 0).unwrap();
        let s = harvest(&p, &all_cuts(3), 1e-9).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s
            .entries
            .iter()
            .all(|e| e.coeff == 1.0 && (e.vector[0].norm() - 1.0).abs() < 1e-12));
        assert_eq!(s.rank_one_cuts.len(), 3);
        assert!(matches!(
            harvest(&p, &[], 1e-9),
            Err(Error::InvalidArity(_))
        ));
    }

    #[test]
    fn w3_groups_one_six_three() {
        let s = harvest(&w3(), &all_cuts(3), 1e-9)
            .unwrap()
            .dedup(DEFAULT_DEDUP_TOL);
        let p = group(&s, DEFAULT_ORTH_TOL);
        let mut sizes: Vec<usize> = p.groups.iter().map(|g| g.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 6]);
    }

    #[test]
    fn orthogonal_entries_stay_apart() {
        let cut = Bipartition::new(2, &[0]).unwrap();
        let entries = (0..4)
            .map(|k| {
                let mut v = vec![C64::new(0.0, 0.0); 4];
                v[k] = C64::new(1.0, 0.0);
                TaggedEntry {
                    coeff: 0.5,
                    vector: v,
                    origin: cut,
                }
            })
            .collect();
        let s = TaggedVectorSet {
            entries,
            rank_one_cuts: vec![],
        };
        assert_eq!(group(&s, DEFAULT_ORTH_TOL).groups.len(), 4);
    }

    #[test]
    fn ghz_entries_are_mutually_orthogonal() {
        let s = harvest(&ghz(3, 3), &all_cuts(3), 1e-9)
            .unwrap()
            .dedup(DEFAULT_DEDUP_TOL);
        let p = group(&s, DEFAULT_ORTH_TOL);
        // the |iii> span is the only block that may carry several entries
        let multi: Vec<&Vec<usize>> = p.groups.iter().filter(|g| g.len() > 1).collect();
        assert!(multi.len() <= 1);
        assert_eq!(p.groups.iter().map(|g| g.len()).sum::<usize>(), s.len());
    }

    #[test]
    fn group_is_order_free() {
        let s = harvest(&w3(), &all_cuts(3), 1e-9)
            .unwrap()
            .dedup(DEFAULT_DEDUP_TOL);
        let p = group(&s, DEFAULT_ORTH_TOL);
        let mut rev = s.clone();
        rev.entries.reverse();
        let q = group(&rev, DEFAULT_ORTH_TOL);
        let n = s.len();
        let canon = |p: &OrthoPartition, map: &dyn Fn(usize) -> usize| {
            let mut g: Vec<Vec<usize>> = p
                .groups
                .iter()
                .map(|g| {
                    let mut x: Vec<usize> = g.iter().map(|&i| map(i)).collect();
                    x.sort();
                    x
                })
                .collect();
            g.sort();
            g
        };
        assert_eq!(canon(&p, &|i| i), canon(&q, &|i| n - 1 - i));
    }

    #[test]
    fn w3_pipeline_matches_printed_witness() {
        let run = lift(&w3(), &LiftOptions::default()).unwrap();
        let r2 = 2f64.sqrt() / 3.0;
        let mut want = HermOperator::zeros(vec![2, 2, 2]);
        for (i, c) in [
            (0, r2),
            (5, r2),
            (3, r2),
            (6, r2),
            (1, 2.0 / 3.0),
            (2, 2.0 / 3.0),
            (4, 2.0 / 3.0),
        ] {
            let e = PureState::basis(vec![2, 2, 2], i).unwrap();
            want.add_rank_one(c, e.amps());
        }
        want.add_rank_one(-1.0, w3().amps());
        let dev = run.witness.dense().max_entry_deviation(&want).unwrap();
        assert!(dev < 1e-10, "deviation {dev}");
        assert!(run.witness.is_gme_claim());
        let cert = run.certify(DEFAULT_CERT_TOL).unwrap();
        assert_eq!(cert.margins.len(), 3);
        assert!(cert.worst() > -1e-10);
        assert!(run.witness.max_block_overlap() < 1e-9);
        assert!((run.witness.trace() - run.witness.dense().trace()).abs() < 1e-10);
    }

    #[test]
    fn ghz4_certificate_and_corruption() {
        let g = ghz(2, 4);
        let run = lift(&g, &LiftOptions::default()).unwrap();
        let cert = run.certify(DEFAULT_CERT_TOL).unwrap();
        assert_eq!(cert.margins.len(), 7);
        assert!(cert.worst() > -1e-10);
        let bad = run.witness.with_scaled_coeffs(0.5);
        let rep = certify(&g, &bad, &run.bews, DEFAULT_CERT_TOL).unwrap();
        assert!(!rep.passed());
        assert!(rep.worst() < 0.0);
    }

    #[test]
    fn mismatched_target_is_inconsistent() {
        let run = lift(&w3(), &LiftOptions::default()).unwrap();
        let other = ghz(2, 3);
        assert!(matches!(
            certify(&other, &run.witness, &run.bews, DEFAULT_CERT_TOL),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn rank_one_and_partial_are_flagged() {
        // |ψ+>_{01} ⊗ |0>_2 is rank 1 across 01|2
        let mut a = vec![0.0; 8];
        a[2] = 1.0;
        a[4] = 1.0;
        let s = PureState::from_real(vec![2, 2, 2], &a).unwrap();
        let run = lift(&s, &LiftOptions::default()).unwrap();
        assert!(!run.witness.is_gme_claim());
        let part = lift_with(&w3(), &all_cuts(3)[..1], &LiftOptions::default()).unwrap();
        assert!(part.witness.warnings.contains(&WitnessWarning::Partial));
    }

    #[test]
    fn single_cut_reproduces_its_witness() {
        let cut = all_cuts(3)[0];
        let run = lift_with(&w3(), &[cut], &LiftOptions::default()).unwrap();
        let bw = optimal_bew(&w3(), cut).unwrap().dense();
        // one cut: groups are the cut's own orthogonal products, nothing to inflate
        assert!(run.witness.dense().max_entry_deviation(&bw).unwrap() < 1e-10);
    }

    #[test]
    fn fidelity_dominates_lift() {
        for st in [w3(), ghz(2, 3), ghz(3, 3)] {
            let run = lift(&st, &LiftOptions::default()).unwrap();
            let lam = all_cuts(st.n_parties())
                .iter()
                .map(|&c| schmidt(&st, c, 1e-9).unwrap().coeffs[0].powi(2))
                .fold(0.0, f64::max);
            let mut wf = HermOperator::identity(st.dims().to_vec()).scale(lam);
            wf.add_rank_one(-1.0, st.amps());
            assert!(wf.sub(&run.witness.dense()).unwrap().min_eigenvalue() > -1e-9);
            assert!(run.witness.target_expectation() < 0.0);
        }
    }
}
