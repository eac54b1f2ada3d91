//! Graph states, the graph-state basis, local complementation and the
//! diagonal cluster-state witness.
//!
//! Vertex `p` is party `p`. Graph-basis labels store `a_p` in bit `p`; dense
//! computational indices stay big-endian (party 0 most significant), so the
//! two are related by reversing `n` bits.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lift::{Block, BlockBasis, LiftedWitness};
use crate::tensorcore::{Bipartition, HermOperator, PureState, C64};

pub const DENSE_GRAPH_LIMIT: usize = 16;

/// Simple undirected graph; `adj[p]` has bit `q` set iff `p ~ q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidArity(format!("graph with {n} vertices")));
        }
        let mut adj = vec![0u64; n];
        for &(p, q) in edges {
            if p >= n || q >= n {
                return Err(Error::Shape(format!("edge {p}-{q} outside {n} vertices")));
            }
            if p == q {
                return Err(Error::Shape(format!("self loop at {p}")));
            }
            adj[p] |= 1 << q;
            adj[q] |= 1 << p;
        }
        Ok(Self { n, adj })
    }

    /// Parses a 1-based edge list such as `1-2,2-3,3-4`.
    pub fn from_edge_list(n: usize, text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut pos = 0;
        for part in text.split(',') {
            let trimmed = part.trim();
            let (a, b) = trimmed.split_once('-').ok_or_else(|| Error::Parse {
                position: pos,
                message: format!("expected `u-v`, got `{trimmed}`"),
            })?;
            let parse = |s: &str, off: usize| -> Result<usize> {
                let v: usize = s.trim().parse().map_err(|_| Error::Parse {
                    position: off,
                    message: format!("bad vertex `{s}`"),
                })?;
                if v == 0 {
                    return Err(Error::Parse {
                        position: off,
                        message: "vertices are numbered from 1".into(),
                    });
                }
                Ok(v - 1)
            };
            edges.push((parse(a, pos)?, parse(b, pos + a.len() + 1)?));
            pos += part.len() + 1;
        }
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, p: usize) -> u64 {
        self.adj[p]
    }

    pub fn has_edge(&self, p: usize, q: usize) -> bool {
        self.adj[p] >> q & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.n {
            for q in p + 1..self.n {
                if self.has_edge(p, q) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Number of edges with both endpoints in the vertex mask.
    pub fn induced_edges(&self, mask: u64) -> u32 {
        let mut c = 0;
        for p in 0..self.n {
            if mask >> p & 1 == 1 {
                c += (self.adj[p] & mask).count_ones();
            }
        }
        c / 2
    }

    /// Off-diagonal block `Γ_{A|Ā}`: one row per side-`A` vertex, bit `j` for
    /// the `j`-th vertex of side `Ā`.
    pub fn cut_block(&self, cut: Bipartition) -> Vec<u64> {
        let b = cut.side_b();
        cut.side_a()
            .iter()
            .map(|&p| {
                b.iter()
                    .enumerate()
                    .filter(|(_, &q)| self.has_edge(p, q))
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect()
    }
}

/// Path graph `0 - 1 - ... - (n-1)`.
pub fn cluster_graph(n: usize) -> Result<Graph> {
    let edges: Vec<(usize, usize)> = (1..n).map(|p| (p - 1, p)).collect();
    Graph::new(n, &edges)
}

/// Rank over GF(2) of a matrix given as row bitmasks.
pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 == 1 {
                *row ^= p;
            }
        }
        rank += 1;
    }
    rank
}

/// Reverses the low `n` bits: vertex mask <-> big-endian computational index.
pub fn reverse_bits(x: u64, n: usize) -> u64 {
    x.reverse_bits() >> (64 - n)
}

fn check_dense(n: usize) -> Result<()> {
    if n > DENSE_GRAPH_LIMIT {
        return Err(Error::Size {
            dim: 1 << n,
            limit: 1 << DENSE_GRAPH_LIMIT,
        });
    }
    Ok(())
}

/// `(−1)^{a·x} |G>` amplitudes; `label` in vertex order.
pub fn graph_basis_state(g: &Graph, label: u64) -> Result<PureState> {
    check_dense(g.n)?;
    let n = g.n;
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let amps = (0..1u64 << n)
        .map(|x| {
            let v = reverse_bits(x, n);
            let sign = g.induced_edges(v) + (v & label).count_ones();
            C64::new(if sign % 2 == 0 { amp } else { -amp }, 0.0)
        })
        .collect();
    PureState::new(vec![2; n], amps)
}

/// `Π CZ |+>^{⊗n}`.
pub fn graph_state_dense(g: &Graph) -> Result<PureState> {
    graph_basis_state(g, 0)
}

/// `g_p = X_p Π_{q∈N(p)} Z_q` applied to a dense vector.
pub fn apply_stabilizer(g: &Graph, p: usize, v: &[C64]) -> Vec<C64> {
    let n = g.n;
    let xbit = 1usize << (n - 1 - p);
    let zmask = reverse_bits(g.adj[p], n) as usize;
    (0..v.len())
        .map(|y| {
            let s = ((y & zmask).count_ones() % 2) as i32;
            v[y ^ xbit] * if s == 0 { 1.0 } else { -1.0 }
        })
        .collect()
}

/// A graph-basis label `a_0 a_1 ... a_{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GraphBasisLabel {
    pub n: usize,
    pub bits: u64,
}

impl GraphBasisLabel {
    pub fn new(n: usize, bits: u64) -> Self {
        Self { n, bits }
    }

    pub fn bit(&self, p: usize) -> bool {
        self.bits >> p & 1 == 1
    }
}

impl FromStr for GraphBasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (p, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << p,
                _ => {
                    return Err(Error::Parse {
                        position: p,
                        message: format!("expected 0 or 1, got `{ch}`"),
                    })
                }
            }
        }
        Ok(Self { n: s.len(), bits })
    }
}

impl fmt::Display for GraphBasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.n {
            write!(f, "{}", if self.bit(p) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Size of the largest set of 1-positions with pairwise distance at least 3;
/// `None` for the all-zero (target) label.
pub fn vk_class(label: GraphBasisLabel) -> Option<usize> {
    vk_class_bits(label.bits, label.n)
}

pub fn vk_class_bits(bits: u64, n: usize) -> Option<usize> {
    if bits == 0 {
        return None;
    }
    let mut k = 0;
    let mut last: Option<usize> = None;
    for p in 0..n {
        if bits >> p & 1 == 1 && last.is_none_or(|l| p - l >= 3) {
            k += 1;
            last = Some(p);
        }
    }
    Some(k)
}

pub fn max_class(n: usize) -> usize {
    n.div_ceil(3)
}

/// `|V_k|` for `k = 1..=⌈n/3⌉` by enumerating all labels in parallel.
pub fn vk_counts(n: usize) -> Result<Vec<u64>> {
    if !(1..=30).contains(&n) {
        return Err(Error::InvalidArity(format!("class counts for n = {n}")));
    }
    let kmax = max_class(n);
    let chunk = 1u64 << n.min(14);
    let chunks = (1u64 << n) / chunk;
    let parts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = vec![0u64; kmax];
            for bits in c * chunk..(c + 1) * chunk {
                if let Some(k) = vk_class_bits(bits, n) {
                    local[k - 1] += 1;
                }
            }
            local
        })
        .collect();
    let mut total = vec![0u64; kmax];
    for p in parts {
        total.iter_mut().zip(p).for_each(|(t, x)| *t += x);
    }
    Ok(total)
}

/// Witness diagonal in the cluster graph basis: coefficient `coeffs[k-1]` on
/// every label of class `k`, minus the target projector.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalGraphWitness {
    pub n: usize,
    pub coeffs: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DiagonalGraphWitness {
    /// `1/(2^k − 1)` on `V_k`.
    pub fn cluster(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidArity(format!(
                "cluster witness needs n >= 4, got {n}"
            )));
        }
        if n > 30 {
            return Err(Error::Size {
                dim: usize::MAX,
                limit: 1 << 30,
            });
        }
        let coeffs = (1..=max_class(n))
            .map(|k| 1.0 / ((1u64 << k) - 1) as f64)
            .collect();
        Ok(Self {
            n,
            coeffs,
            counts: vk_counts(n)?,
        })
    }

    /// The four-qubit comparison witness keeping only `V_1`.
    pub fn cluster4_opt() -> Self {
        Self {
            n: 4,
            coeffs: vec![1.0, 0.0],
            counts: vk_counts(4).expect("n = 4"),
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn coeff_of(&self, label: u64) -> f64 {
        match vk_class_bits(label, self.n) {
            None => -1.0,
            Some(k) => self.coeffs[k - 1],
        }
    }

    /// `Σ_k |V_k| c_k − 1`.
    pub fn trace(&self) -> f64 {
        self.counts
            .iter()
            .zip(&self.coeffs)
            .map(|(&c, &x)| c as f64 * x)
            .sum::<f64>()
            - 1.0
    }

    pub fn target_expectation(&self) -> f64 {
        -1.0
    }

    /// `p* = 1/(1 + T/2^n)`.
    pub fn noise_tolerance(&self) -> f64 {
        1.0 / (1.0 + self.trace() / self.dim() as f64)
    }

    /// `<v|W|v>` via a Walsh–Hadamard transform of `G(x) v(x)`.
    pub fn expectation_pure(&self, v: &[C64]) -> Result<f64> {
        let n = self.n;
        check_dense(n)?;
        if v.len() != 1 << n {
            return Err(Error::Shape("vector length mismatch".into()));
        }
        let g = cluster_graph(n)?;
        let amp = (0.5f64).powf(n as f64 / 2.0);
        let mut u: Vec<C64> = (0..v.len())
            .map(|x| {
                let s = g.induced_edges(reverse_bits(x as u64, n)) % 2;
                v[x] * if s == 0 { amp } else { -amp }
            })
            .collect();
        walsh_hadamard(&mut u);
        Ok(u.iter()
            .enumerate()
            .map(|(aidx, o)| self.coeff_of(reverse_bits(aidx as u64, n)) * o.norm_sqr())
            .sum())
    }

    /// Dense matrix: `W[x,y] = G(x) G(y) F(x ⊕ y)` with `F` the transform of the coefficients.
    pub fn to_dense(&self, limit: usize) -> Result<HermOperator> {
        let d = self.dim();
        if d > limit || self.n > 12 {
            return Err(Error::Size {
                dim: d,
                limit: limit.min(1 << 12),
            });
        }
        let n = self.n;
        let g = cluster_graph(n)?;
        let mut f: Vec<C64> = (0..d)
            .map(|aidx| C64::new(self.coeff_of(reverse_bits(aidx as u64, n)), 0.0))
            .collect();
        walsh_hadamard(&mut f);
        let scale = 1.0 / d as f64;
        let sign: Vec<f64> = (0..d)
            .map(|x| {
                if g.induced_edges(reverse_bits(x as u64, n)) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let m = nalgebra::DMatrix::from_fn(d, d, |x, y| f[x ^ y] * (sign[x] * sign[y] * scale));
        HermOperator::from_matrix_symmetrized(vec![2; n], m)
    }

    /// Block form with one block of graph-basis vectors per class.
    pub fn to_lifted(&self) -> Result<LiftedWitness> {
        let n = self.n;
        if n > 12 {
            return Err(Error::Size {
                dim: 1 << n,
                limit: 1 << 12,
            });
        }
        let g = cluster_graph(n)?;
        let mut blocks = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let vecs = (1u64..1 << n)
                .filter(|&a| vk_class_bits(a, n) == Some(k + 1))
                .map(|a| graph_basis_state(&g, a).map(|s| s.amps().to_vec()))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(Block {
                coeff: c,
                basis: BlockBasis::Vectors(vecs),
            });
        }
        Ok(LiftedWitness::new(graph_state_dense(&g)?, blocks))
    }
}

/// Unnormalized in-place Walsh–Hadamard transform.
pub fn walsh_hadamard(v: &mut [C64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

pub fn cluster_witness(n: usize) -> Result<DiagonalGraphWitness> {
    DiagonalGraphWitness::cluster(n)
}

pub fn cluster_noise_tolerance(n: usize) -> Result<f64> {
    if !(4..=24).contains(&n) {
        return Err(Error::InvalidArity(format!(
            "tolerance needs 4 <= n <= 24, got {n}"
        )));
    }
    Ok(DiagonalGraphWitness::cluster(n)?.noise_tolerance())
}

/// Tolerance of `½ I − |Cl_n><Cl_n|`.
pub fn cluster_fidelity_tolerance(n: usize) -> f64 {
    0.5 / (1.0 - 0.5f64.powi(n as i32))
}

/// Result of `τ_a`: the new graph and the label map `a ↦ a'` with
/// `a'_b = a_b ⊕ a_a` for `b ∈ N(a)`.
#[derive(Clone, Debug)]
pub struct LocalComplement {
    pub graph: Graph,
    pub vertex: usize,
    pub neighborhood: u64,
}

impl LocalComplement {
    pub fn map_label(&self, label: u64) -> u64 {
        if label >> self.vertex & 1 == 1 {
            label ^ self.neighborhood
        } else {
            label
        }
    }
}

pub fn local_complementation(g: &Graph, a: usize) -> Result<LocalComplement> {
    if a >= g.n {
        return Err(Error::Shape(format!("vertex {a} outside {} vertices", g.n)));
    }
    let nb = g.adj[a];
    let mut adj = g.adj.clone();
    for p in 0..g.n {
        if nb >> p & 1 == 1 {
            adj[p] ^= nb & !(1 << p);
        }
    }
    Ok(LocalComplement {
        graph: Graph { n: g.n, adj },
        vertex: a,
        neighborhood: nb,
    })
}

/// `U_a = exp(−iπX_a/4) Π_{b∈N(a)} exp(iπZ_b/4)` applied to a dense vector.
pub fn apply_local_complement_unitary(g: &Graph, a: usize, v: &[C64]) -> Vec<C64> {
    let n = g.n;
    let zmask = g.adj[a];
    let ph = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let mut w: Vec<C64> = (0..v.len())
        .map(|x| {
            let vm = reverse_bits(x as u64, n);
            // each neighbor contributes e^{iπ/4} for bit 0 and e^{−iπ/4} for bit 1
            let ones = (vm & zmask).count_ones() as i32;
            let zeros = zmask.count_ones() as i32 - ones;
            v[x] * ph.powi(zeros - ones)
        })
        .collect();
    let xbit = 1usize << (n - 1 - a);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mi = C64::new(0.0, -1.0);
    let src = w.clone();
    for (x, out) in w.iter_mut().enumerate() {
        *out = (src[x] + mi * src[x ^ xbit]) * s;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{lift, LiftOptions, Scaling};
    use crate::tensorcore::{enumerate_bipartitions, inner, schmidt};

    fn label(s: &str) -> GraphBasisLabel {
        s.parse().unwrap()
    }

    fn brute_class(bits: u64, n: usize) -> Option<usize> {
        if bits == 0 {
            return None;
        }
        let ones: Vec<usize> = (0..n).filter(|p| bits >> p & 1 == 1).collect();
        let mut best = 0;
        for sub in 1u64..1 << ones.len() {
            let pick: Vec<usize> = (0..ones.len())
                .filter(|i| sub >> i & 1 == 1)
                .map(|i| ones[i])
                .collect();
            if pick.windows(2).all(|w| w[1] - w[0] >= 3) {
                best = best.max(pick.len());
            }
        }
        Some(best)
    }

    #[test]
    fn printed_class_examples() {
        assert_eq!(vk_class(label("1101100")), Some(2));
        assert_eq!(vk_class(label("1001011")), Some(3));
        assert_eq!(vk_class(label("0000")), None);
    }

    #[test]
    fn four_qubit_class_lists() {
        let v1 = [
            "0001", "0010", "0011", "0100", "0101", "0110", "0111", "1000", "1010", "1100", "1110",
        ];
        let v2 = ["1001", "1011", "1101", "1111"];
        for s in v1 {
            assert_eq!(vk_class(label(s)), Some(1), "{s}");
        }
        for s in v2 {
            assert_eq!(vk_class(label(s)), Some(2), "{s}");
        }
        assert_eq!(vk_counts(4).unwrap(), vec![11, 4]);
    }

    #[test]
    fn greedy_matches_brute_force() {
        for n in 1..=12 {
            for bits in 0u64..1 << n {
                assert_eq!(vk_class_bits(bits, n), brute_class(bits, n));
            }
            let total: u64 = vk_counts(n).unwrap().iter().sum();
            assert_eq!(total, (1 << n) - 1);
        }
    }

    #[test]
    fn class_is_reversal_invariant() {
        for n in 4..=10 {
            for bits in 1u64..1 << n {
                assert_eq!(
                    vk_class_bits(bits, n),
                    vk_class_bits(reverse_bits(bits, n), n)
                );
            }
        }
    }

    #[test]
    fn two_vertex_graph_is_bell_like() {
        let g = cluster_graph(2).unwrap();
        let s = graph_state_dense(&g).unwrap();
        let sd = schmidt(&s, Bipartition::new(2, &[0]).unwrap(), 1e-9).unwrap();
        assert_eq!(sd.rank, 2);
        assert!((sd.coeffs[0] - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn stabilizer_signs_follow_labels() {
        let g = cluster_graph(4).unwrap();
        for bits in 0u64..16 {
            let s = graph_basis_state(&g, bits).unwrap();
            for p in 0..4 {
                let gs = apply_stabilizer(&g, p, s.amps());
                let e = inner(s.amps(), &gs).re;
                let want = if bits >> p & 1 == 1 { -1.0 } else { 1.0 };
                assert!((e - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gf2_ranks() {
        assert_eq!(gf2_rank(&[0, 0, 0]), 0);
        assert_eq!(gf2_rank(&[0b011, 0b110, 0b101]), 2);
        let g = cluster_graph(6).unwrap();
        let c = Bipartition::new(6, &[0, 1, 2]).unwrap();
        assert_eq!(gf2_rank(&g.cut_block(c)), 1);
    }

    #[test]
    fn schmidt_rank_is_two_to_the_cut_rank() {
        for n in 2..=8 {
            let g = cluster_graph(n).unwrap();
            let s = graph_state_dense(&g).unwrap();
            for cut in enumerate_bipartitions(n).unwrap() {
                let r = schmidt(&s, cut, 1e-9).unwrap().rank;
                assert_eq!(r, 1 << gf2_rank(&g.cut_block(cut)), "cut {cut}");
            }
        }
        // {1,2,4,5}|{3,6} in 1-based numbering
        let g = cluster_graph(6).unwrap();
        let cut = Bipartition::new(6, &[2, 5]).unwrap();
        let k = gf2_rank(&g.cut_block(cut));
        let r = schmidt(&graph_state_dense(&g).unwrap(), cut, 1e-9)
            .unwrap()
            .rank;
        assert_eq!(r, 1 << k);
        assert_eq!(k, 2);
    }

    #[test]
    fn local_complementation_examples() {
        let tri = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = local_complementation(&tri, 0).unwrap().graph;
        assert!(!t.has_edge(1, 2) && t.has_edge(0, 1) && t.has_edge(0, 2));
        let path = cluster_graph(3).unwrap();
        let t = local_complementation(&path, 1).unwrap().graph;
        assert!(t.has_edge(0, 2));
        let back = local_complementation(&t, 1).unwrap().graph;
        assert_eq!(back, path);
        assert!(local_complementation(&path, 3).is_err());
    }

    #[test]
    fn local_complement_unitary_and_label_map() {
        for (g, vertices) in [
            (cluster_graph(5).unwrap(), vec![0, 2, 4]),
            (
                Graph::new(4, &[(0, 1), (0, 2), (0, 3), (2, 3)]).unwrap(),
                vec![0, 3],
            ),
        ] {
            for a in vertices {
                let lc = local_complementation(&g, a).unwrap();
                for bits in 0u64..1 << g.n() {
                    let s = graph_basis_state(&g, bits).unwrap();
                    let u = apply_local_complement_unitary(&g, a, s.amps());
                    let t = graph_basis_state(&lc.graph, lc.map_label(bits)).unwrap();
                    let ov = inner(t.amps(), &u).norm();
                    assert!((ov - 1.0).abs() < 1e-9, "a = {a}, label {bits:b}");
                }
            }
        }
    }

    #[test]
    fn target_expectation_and_trace() {
        let w = cluster_witness(4).unwrap();
        assert!((w.trace() - (11.0 + 4.0 / 3.0 - 1.0)).abs() < 1e-12);
        assert!((w.noise_tolerance() - 0.5854).abs() < 1e-4);
        let g = cluster_graph(4).unwrap();
        let s = graph_state_dense(&g).unwrap();
        assert!((w.expectation_pure(s.amps()).unwrap() + 1.0).abs() < 1e-12);
        let dense = w.to_dense(4096).unwrap();
        assert!((dense.trace() - w.trace()).abs() < 1e-10);
        assert!((dense.expectation(&s).unwrap() + 1.0).abs() < 1e-12);
        let lifted = w.to_lifted().unwrap();
        assert!(lifted.dense().max_entry_deviation(&dense).unwrap() < 1e-12);
        assert!(matches!(cluster_witness(3), Err(Error::InvalidArity(_))));
    }

    #[test]
    fn walsh_path_agrees_with_dense() {
        let w = cluster_witness(6).unwrap();
        let dense = w.to_dense(4096).unwrap();
        let v: Vec<C64> = (0..64)
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let a = w.expectation_pure(&v).unwrap();
        let b = dense.quadratic_form(&v);
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn opt_witness_is_finer() {
        let w = cluster_witness(4).unwrap().to_dense(4096).unwrap();
        let o = DiagonalGraphWitness::cluster4_opt();
        assert!((o.noise_tolerance() - 0.6154).abs() < 1e-4);
        let diff = w.sub(&o.to_dense(4096).unwrap()).unwrap();
        assert!(diff.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn lift_reproduces_cluster_witness() {
        for n in 4..=5 {
            let g = cluster_graph(n).unwrap();
            let s = graph_state_dense(&g).unwrap();
            let opts = LiftOptions {
                scaling: Scaling::UnitTargetExpectation,
                ..Default::default()
            };
            let run = lift(&s, &opts).unwrap();
            let want = cluster_witness(n).unwrap().to_dense(4096).unwrap();
            let dev = run.witness.dense().max_entry_deviation(&want).unwrap();
            assert!(dev < 1e-10, "n = {n}: deviation {dev}");
        }
    }

    #[test]
    fn tolerance_is_increasing() {
        let mut prev = 0.0;
        for n in 4..=16 {
            let p = cluster_noise_tolerance(n).unwrap();
            assert!(p > prev);
            assert!(p > cluster_fidelity_tolerance(n));
            prev = p;
        }
    }

    #[test]
    fn edge_list_parsing() {
        let g = Graph::from_edge_list(4, "1-2,2-3,3-4").unwrap();
        assert_eq!(g, cluster_graph(4).unwrap());
        match Graph::from_edge_list(4, "1-2,2x3") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
    }
}
