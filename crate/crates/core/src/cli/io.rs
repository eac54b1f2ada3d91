//! JSON forms of states and witnesses, and descriptor-driven construction.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::eval::{white_noise_tolerance, FidelityWitness, Witness};
use crate::families::{
    ghz_state, schmidt_state, schmidt_witness, singlet4_state, singlet4_witness, singlet6_state,
    singlet6_witness, sorted_spectrum, w_state, w_witness, SingletParams,
};
use crate::graphstate::{cluster_fidelity_tolerance, graph_state_dense, DiagonalGraphWitness};
use crate::lift::{lift, Block, BlockBasis, LiftOptions, LiftedWitness, Scaling, WitnessWarning};
use crate::tensorcore::{HermOperator, PureState, C64};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateJson {
    pub fn from_state(s: &PureState) -> Self {
        Self {
            dims: s.dims().to_vec(),
            re: s.amps().iter().map(|a| a.re).collect(),
            im: s.amps().iter().map(|a| a.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        if self.re.len() != self.im.len() {
            return Err(Error::Shape("re and im arrays differ in length".into()));
        }
        let amps = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| C64::new(r, i))
            .collect();
        let s = PureState::new(self.dims.clone(), amps)?;
        s.ensure_normalized()?;
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlockJson {
    pub coeff: f64,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vectors: Option<Vec<VectorJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub blocks: usize,
    pub block_dims: Vec<usize>,
    pub coeffs: Vec<f64>,
    pub trace: f64,
    pub target_expectation: f64,
    pub tolerance: Option<f64>,
    pub fidelity_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub class_counts: Option<Vec<u64>>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessJson {
    Lifted {
        target: StateJson,
        blocks: Vec<BlockJson>,
        summary: Summary,
    },
    GraphDiagonal {
        n: usize,
        coeffs: Vec<f64>,
        counts: Vec<u64>,
        summary: Summary,
    },
}

impl WitnessJson {
    pub fn summary(&self) -> &Summary {
        match self {
            WitnessJson::Lifted { summary, .. } | WitnessJson::GraphDiagonal { summary, .. } => {
                summary
            }
        }
    }

    pub fn to_witness(&self) -> Result<AnyWitness> {
        match self {
            WitnessJson::Lifted { target, blocks, .. } => {
                let target = target.to_state()?;
                let dim = target.dim();
                let mut out = Vec::new();
                for b in blocks {
                    let basis = match (&b.indices, &b.vectors) {
                        (Some(ix), None) => {
                            if ix.iter().any(|&i| i >= dim) {
                                return Err(Error::Shape("block index out of range".into()));
                            }
                            BlockBasis::Computational(ix.clone())
                        }
                        (None, Some(vs)) => BlockBasis::Vectors(
                            vs.iter()
                                .map(|v| {
                                    if v.re.len() != dim || v.im.len() != dim {
                                        return Err(Error::Shape("block vector length".into()));
                                    }
                                    Ok(v.re
                                        .iter()
                                        .zip(&v.im)
                                        .map(|(&r, &i)| C64::new(r, i))
                                        .collect())
                                })
                                .collect::<Result<_>>()?,
                        ),
                        _ => {
                            return Err(Error::Shape(
                                "block needs exactly one of indices/vectors".into(),
                            ))
                        }
                    };
                    out.push(Block {
                        coeff: b.coeff,
                        basis,
                    });
                }
                Ok(AnyWitness::Lifted(LiftedWitness::new(target, out)))
            }
            WitnessJson::GraphDiagonal { n, coeffs, .. } => {
                let mut w = DiagonalGraphWitness::cluster(*n)?;
                if coeffs.len() != w.coeffs.len() {
                    return Err(Error::Shape("class coefficient count".into()));
                }
                w.coeffs = coeffs.clone();
                Ok(AnyWitness::Diagonal(w))
            }
        }
    }
}

/// A constructed witness of either structured kind.
#[derive(Clone, Debug)]
pub enum AnyWitness {
    Lifted(LiftedWitness),
    Diagonal(DiagonalGraphWitness),
}

impl Witness for AnyWitness {
    fn dims(&self) -> Vec<usize> {
        match self {
            AnyWitness::Lifted(w) => Witness::dims(w),
            AnyWitness::Diagonal(w) => Witness::dims(w),
        }
    }

    fn trace(&self) -> f64 {
        match self {
            AnyWitness::Lifted(w) => Witness::trace(w),
            AnyWitness::Diagonal(w) => Witness::trace(w),
        }
    }

    fn expectation_pure(&self, v: &[C64]) -> Result<f64> {
        match self {
            AnyWitness::Lifted(w) => Witness::expectation_pure(w, v),
            AnyWitness::Diagonal(w) => Witness::expectation_pure(w, v),
        }
    }

    fn dense(&self, limit: usize) -> Result<HermOperator> {
        match self {
            AnyWitness::Lifted(w) => Witness::dense(w, limit),
            AnyWitness::Diagonal(w) => Witness::dense(w, limit),
        }
    }
}

/// Target state, witness and fidelity tolerance for a descriptor.
pub struct Constructed {
    pub target: Option<PureState>,
    pub witness: AnyWitness,
    pub fidelity_tolerance: Option<f64>,
}

pub fn load_state(path: &Path) -> Result<PureState> {
    let text = std::fs::read_to_string(path)?;
    let j: StateJson = serde_json::from_str(&text)?;
    j.to_state()
}

fn guard(dim: usize, limit: usize) -> Result<()> {
    if dim > limit {
        return Err(Error::Size { dim, limit });
    }
    Ok(())
}

/// Target state of a descriptor, when it can be held densely.
pub fn descriptor_state(d: &Descriptor) -> Result<PureState> {
    match d {
        Descriptor::W { n } => w_state(*n),
        Descriptor::Ghz { d, n } => ghz_state(*d, *n),
        Descriptor::Schmidt { lambdas, n } => schmidt_state(lambdas, *n),
        Descriptor::Cluster { n } => graph_state_dense(&crate::graphstate::cluster_graph(*n)?),
        Descriptor::Graph { graph } => graph_state_dense(graph),
        Descriptor::Singlet4 { a, theta } => {
            singlet4_state(&SingletParams::from_a_theta(*a, *theta)?)
        }
        Descriptor::Singlet6 => singlet6_state(),
        Descriptor::File { path } => load_state(path),
    }
}

pub fn construct(d: &Descriptor, dense_limit: usize) -> Result<Constructed> {
    match d {
        Descriptor::W { n } => {
            let n = *n;
            let l = (n as f64 - 1.0) / n as f64;
            Ok(Constructed {
                target: Some(w_state(n)?),
                witness: AnyWitness::Lifted(w_witness(n)?),
                fidelity_tolerance: Some((1.0 - l) / (1.0 - 0.5f64.powi(n as i32))),
            })
        }
        Descriptor::Ghz { d, n } => {
            let w = schmidt_witness(&vec![1.0 / *d as f64; *d], *n)?;
            Ok(Constructed {
                target: Some(w.target.clone()),
                witness: AnyWitness::Lifted(w),
                fidelity_tolerance: Some(crate::applications::fidelity_tolerance_bound(*d, *n)?),
            })
        }
        Descriptor::Schmidt { lambdas, n } => {
            let w = schmidt_witness(lambdas, *n)?;
            let (sorted, _) = sorted_spectrum(lambdas)?;
            let l0 = sorted[0];
            let dn = (lambdas.len() as f64).powi(*n as i32);
            Ok(Constructed {
                target: Some(w.target.clone()),
                witness: AnyWitness::Lifted(w),
                fidelity_tolerance: Some((1.0 - l0) / (1.0 - 1.0 / dn)),
            })
        }
        Descriptor::Cluster { n } => Ok(Constructed {
            target: if *n <= 16 {
                Some(descriptor_state(d)?)
            } else {
                None
            },
            witness: AnyWitness::Diagonal(DiagonalGraphWitness::cluster(*n)?),
            fidelity_tolerance: Some(cluster_fidelity_tolerance(*n)),
        }),
        Descriptor::Singlet4 { a, theta } => {
            let w = singlet4_witness(&SingletParams::from_a_theta(*a, *theta)?)?;
            generic_fidelity(w)
        }
        Descriptor::Singlet6 => generic_fidelity(singlet6_witness()?),
        Descriptor::Graph { .. } | Descriptor::File { .. } => {
            let s = descriptor_state(d)?;
            guard(s.dim(), dense_limit)?;
            let scaling = if matches!(d, Descriptor::Graph { .. }) {
                Scaling::UnitTargetExpectation
            } else {
                Scaling::Lemma
            };
            let run = lift(
                &s,
                &LiftOptions {
                    scaling,
                    ..Default::default()
                },
            )?;
            generic_fidelity(run.witness)
        }
    }
}

fn generic_fidelity(w: LiftedWitness) -> Result<Constructed> {
    let f = FidelityWitness::for_state(&w.target)?;
    let p = white_noise_tolerance(&f, &w.target).ok();
    Ok(Constructed {
        target: Some(w.target.clone()),
        witness: AnyWitness::Lifted(w),
        fidelity_tolerance: p,
    })
}

fn warning_text(w: &WitnessWarning) -> String {
    match w {
        WitnessWarning::RankOneCuts(c) => format!(
            "target is a product across {}; not a GME witness",
            c.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
        WitnessWarning::Partial => "built from a subset of bipartitions; not a GME witness".into(),
    }
}

pub fn summarize(c: &Constructed) -> Result<Summary> {
    let w = &c.witness;
    let (block_dims, coeffs, counts, warnings, wpsi) = match w {
        AnyWitness::Lifted(l) => (
            l.blocks.iter().map(|b| b.basis.dim()).collect::<Vec<_>>(),
            l.blocks.iter().map(|b| b.coeff).collect::<Vec<_>>(),
            None,
            l.warnings.iter().map(warning_text).collect(),
            l.target_expectation(),
        ),
        AnyWitness::Diagonal(g) => (
            g.counts.iter().map(|&x| x as usize).collect(),
            g.coeffs.clone(),
            Some(g.counts.clone()),
            Vec::new(),
            g.target_expectation(),
        ),
    };
    let tolerance = match (w, &c.target) {
        (AnyWitness::Diagonal(g), _) => Some(g.noise_tolerance()),
        (_, Some(t)) => white_noise_tolerance(w, t).ok(),
        _ => None,
    };
    Ok(Summary {
        blocks: block_dims.len(),
        block_dims,
        coeffs,
        trace: w.trace(),
        target_expectation: wpsi,
        tolerance,
        fidelity_tolerance: c.fidelity_tolerance,
        class_counts: counts,
        warnings,
    })
}

pub fn to_json(c: &Constructed) -> Result<WitnessJson> {
    let summary = summarize(c)?;
    Ok(match &c.witness {
        AnyWitness::Lifted(l) => WitnessJson::Lifted {
            target: StateJson::from_state(&l.target),
            blocks: l
                .blocks
                .iter()
                .map(|b| match &b.basis {
                    BlockBasis::Computational(ix) => BlockJson {
                        coeff: b.coeff,
                        dim: ix.len(),
                        indices: Some(ix.clone()),
                        vectors: None,
                    },
                    BlockBasis::Vectors(vs) => BlockJson {
                        coeff: b.coeff,
                        dim: vs.len(),
                        indices: None,
                        vectors: Some(
                            vs.iter()
                                .map(|v| VectorJson {
                                    re: v.iter().map(|x| x.re).collect(),
                                    im: v.iter().map(|x| x.im).collect(),
                                })
                                .collect(),
                        ),
                    },
                })
                .collect(),
            summary,
        },
        AnyWitness::Diagonal(g) => WitnessJson::GraphDiagonal {
            n: g.n,
            coeffs: g.coeffs.clone(),
            counts: g.counts.clone(),
            summary,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::descriptor::parse_descriptor;

    #[test]
    fn w4_summary() {
        let c = construct(&parse_descriptor("w:n=4").unwrap(), 4096).unwrap();
        let s = summarize(&c).unwrap();
        assert_eq!(s.blocks, 3);
        let want = [0.75, 0.5, 0.5];
        for (a, b) in s.coeffs.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_tolerance_field() {
        let c = construct(&parse_descriptor("ghz:d=3,n=3").unwrap(), 4096).unwrap();
        assert!((summarize(&c).unwrap().tolerance.unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn large_cluster_is_summary_only() {
        let c = construct(&parse_descriptor("cluster:n=20").unwrap(), 4096).unwrap();
        assert!(c.target.is_none());
        let j = to_json(&c).unwrap();
        assert!(matches!(j, WitnessJson::GraphDiagonal { .. }));
        assert_eq!(
            j.summary()
                .class_counts
                .as_ref()
                .unwrap()
                .iter()
                .sum::<u64>(),
            (1 << 20) - 1
        );
    }

    #[test]
    fn json_round_trip() {
        for desc in ["w:n=3", "graph:n=3,edges=1-2,2-3", "cluster:n=5"] {
            let c = construct(&parse_descriptor(desc).unwrap(), 4096).unwrap();
            let j = to_json(&c).unwrap();
            let text = serde_json::to_string(&j).unwrap();
            let back: WitnessJson = serde_json::from_str(&text).unwrap();
            let w = back.to_witness().unwrap();
            let a = c.witness.dense(4096).unwrap();
            let b = w.dense(4096).unwrap();
            assert!(a.max_entry_deviation(&b).unwrap() < 1e-12, "{desc}");
        }
    }

    #[test]
    fn state_json_round_trip() {
        let s = w_state(3).unwrap();
        let j = StateJson::from_state(&s);
        assert_eq!(j.to_state().unwrap().max_deviation(&s), 0.0);
        let bad = StateJson {
            dims: vec![2],
            re: vec![1.0, 1.0],
            im: vec![0.0, 0.0],
        };
        assert!(matches!(bad.to_state(), Err(Error::Normalization { .. })));
    }
}
