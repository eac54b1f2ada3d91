//! Verification runs over the built-in corpus or a user state.

use serde::Serialize;

use crate::bew::{optimal_bew, optimality_span_check};
use crate::error::Result;
use crate::eval::{biseparable_min_all, white_noise_tolerance, FidelityWitness, SeeSaw};
use crate::families::{
    ghz_state, schmidt_witness, singlet4_state, singlet6_state, w_state, w_witness, SingletParams,
};
use crate::graphstate::{cluster_graph, graph_state_dense, DiagonalGraphWitness};
use crate::lift::{lift, lift_with, LiftOptions, Scaling};
use crate::tensorcore::{enumerate_bipartitions, schmidt, Bipartition, HermOperator, PureState};

pub const CERT_TOL: f64 = 1e-9;
pub const ANALYTIC_TOL: f64 = 1e-10;
pub const SEPARABLE_TOL: f64 = 1e-7;
/// Subset count expected for the four-qubit singlet family.
pub const SINGLET4_GROUPS: usize = 5;

pub struct CorpusEntry {
    pub name: String,
    pub state: PureState,
    pub scaling: Scaling,
    /// Closed-form witness the lift must reproduce.
    pub analytic: Option<HermOperator>,
}

pub fn singlet4_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for a in [0.3, 0.6, 0.9] {
        for theta in [
            0.0,
            std::f64::consts::FRAC_PI_3,
            2.0 * std::f64::consts::FRAC_PI_3,
        ] {
            out.push((a, theta));
        }
    }
    out
}

pub fn corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for n in 3..=5 {
        out.push(CorpusEntry {
            name: format!("w:n={n}"),
            state: w_state(n)?,
            scaling: Scaling::Lemma,
            analytic: Some(w_witness(n)?.dense()),
        });
    }
    for d in 2..=4 {
        for n in 2..=4 {
            out.push(CorpusEntry {
                name: format!("ghz:d={d},n={n}"),
                state: ghz_state(d, n)?,
                scaling: Scaling::Lemma,
                analytic: Some(schmidt_witness(&vec![1.0 / d as f64; d], n)?.dense()),
            });
        }
    }
    for n in 4..=6 {
        out.push(CorpusEntry {
            name: format!("cluster:n={n}"),
            state: graph_state_dense(&cluster_graph(n)?)?,
            scaling: Scaling::UnitTargetExpectation,
            analytic: Some(DiagonalGraphWitness::cluster(n)?.to_dense(4096)?),
        });
    }
    for (a, theta) in singlet4_grid() {
        out.push(CorpusEntry {
            name: format!("singlet4:a={a},theta={theta:.6}"),
            state: singlet4_state(&SingletParams::from_a_theta(a, theta)?)?,
            scaling: Scaling::Lemma,
            analytic: None,
        });
    }
    out.push(CorpusEntry {
        name: "singlet6".into(),
        state: singlet6_state()?,
        scaling: Scaling::Lemma,
        analytic: None,
    });
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub entry: String,
    pub check: String,
    pub passed: bool,
    pub value: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub see_saw: SeeSaw,
    /// Halve every block coefficient before checking.
    pub corrupt: bool,
    pub span_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            see_saw: SeeSaw::default(),
            corrupt: false,
            span_samples: 16,
        }
    }
}

fn check(entry: &str, name: &str, passed: bool, value: f64, detail: String) -> CheckResult {
    CheckResult {
        entry: entry.into(),
        check: name.into(),
        passed,
        value,
        detail,
    }
}

pub fn verify_entry(e: &CorpusEntry, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut run = lift(
        &e.state,
        &LiftOptions {
            scaling: e.scaling,
            ..Default::default()
        },
    )?;
    if opts.corrupt {
        run.witness = run.witness.with_scaled_coeffs(0.5);
    }
    let cert = run.certify(CERT_TOL)?;
    let worst = cert.worst_margin();
    out.push(check(
        &e.name,
        "certificate",
        cert.passed(),
        worst.map(|m| m.margin).unwrap_or(0.0),
        worst
            .map(|m| format!("worst cut {}", m.cut))
            .unwrap_or_default(),
    ));
    if e.name.starts_with("singlet4") {
        // informational: the operator is certified either way
        let k = run.witness.blocks.len();
        out.push(check(
            &e.name,
            "partition",
            true,
            k as f64,
            if k == SINGLET4_GROUPS {
                String::new()
            } else {
                format!("{k} groups, expected {SINGLET4_GROUPS}")
            },
        ));
    }
    let dense = run.witness.dense();
    if let Some(a) = &e.analytic {
        let dev = dense.max_entry_deviation(a)?;
        out.push(check(
            &e.name,
            "analytic",
            dev <= ANALYTIC_TOL,
            dev,
            String::new(),
        ));
    }
    let mins = biseparable_min_all(&dense, &opts.see_saw)?;
    let (wc, wv) = mins
        .iter()
        .copied()
        .fold((None, f64::INFINITY), |acc, (c, v)| {
            if v < acc.1 {
                (Some(c), v)
            } else {
                acc
            }
        });
    out.push(check(
        &e.name,
        "separable",
        wv >= -SEPARABLE_TOL,
        wv,
        wc.map(|c| format!("cut {c}")).unwrap_or_default(),
    ));
    let mut span_ok = true;
    let mut span_detail = String::new();
    for cut in enumerate_bipartitions(e.state.n_parties())? {
        if schmidt(&e.state, cut, crate::tensorcore::DEFAULT_RANK_TOL)?.rank < 2 {
            continue;
        }
        let rep = optimality_span_check(&optimal_bew(&e.state, cut)?, opts.span_samples)?;
        if !rep.full_rank() || rep.min_random_product < -CERT_TOL {
            span_ok = false;
            span_detail = format!("cut {cut}: rank {} of {}", rep.rank, rep.full_dim);
        }
    }
    out.push(check(
        &e.name,
        "span",
        span_ok,
        if span_ok { 1.0 } else { 0.0 },
        span_detail,
    ));
    let p_ours = white_noise_tolerance(&run.witness, &e.state).unwrap_or(0.0);
    let p_fid =
        white_noise_tolerance(&FidelityWitness::for_state(&e.state)?, &e.state).unwrap_or(0.0);
    out.push(check(
        &e.name,
        "tolerance",
        p_ours >= p_fid - 1e-12,
        p_ours,
        format!("fidelity {p_fid}"),
    ));
    Ok(out)
}

pub fn verify_corpus(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for e in corpus()? {
        out.extend(verify_entry(&e, opts)?);
    }
    Ok(out)
}

pub fn parse_cuts(text: &str, n: usize) -> Result<Vec<Bipartition>> {
    if text.trim() == "all" {
        return enumerate_bipartitions(n);
    }
    let mut out = Vec::new();
    let mut pos = 0;
    for item in text.split(';') {
        let left = item.split('|').next().unwrap_or("");
        let side: Vec<usize> = if left.contains(',') {
            left.split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| crate::Error::Parse {
                    position: pos,
                    message: format!("bad cut `{item}`"),
                })?
        } else {
            left.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| crate::Error::Parse {
                    position: pos,
                    message: format!("bad cut `{item}`"),
                })?
        };
        out.push(Bipartition::new(n, &side)?);
        pos += item.len() + 1;
    }
    Ok(out)
}

/// Lifts a user state over `cuts` and lists the certificate margins.
pub fn verify_state(
    state: &PureState,
    cuts: &[Bipartition],
    opts: &VerifyOptions,
) -> Result<Vec<CheckResult>> {
    let mut run = lift_with(state, cuts, &LiftOptions::default())?;
    if opts.corrupt {
        run.witness = run.witness.with_scaled_coeffs(0.5);
    }
    let cert = run.certify(CERT_TOL)?;
    let mut out: Vec<CheckResult> = cert
        .margins
        .iter()
        .map(|m| {
            check(
                "state",
                &format!("margin {}", m.cut),
                m.margin >= -CERT_TOL,
                m.margin,
                String::new(),
            )
        })
        .collect();
    for w in &run.witness.warnings {
        out.push(check("state", "warning", true, 0.0, format!("{w:?}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions {
            see_saw: SeeSaw {
                restarts: 8,
                iters: 100,
                seed: 42,
            },
            ..Default::default()
        }
    }

    #[test]
    fn small_entries_pass() {
        for e in corpus()
            .unwrap()
            .into_iter()
            .filter(|e| e.state.dim() <= 16)
        {
            for c in verify_entry(&e, &quick()).unwrap() {
                assert!(c.passed, "{} {} {} {}", c.entry, c.check, c.value, c.detail);
            }
        }
    }

    #[test]
    fn corruption_is_caught() {
        let e = corpus()
            .unwrap()
            .into_iter()
            .find(|e| e.name == "ghz:d=3,n=3")
            .unwrap();
        let opts = VerifyOptions {
            corrupt: true,
            ..quick()
        };
        let r = verify_entry(&e, &opts).unwrap();
        assert!(r.iter().any(|c| c.check == "certificate" && !c.passed));
        assert!(r.iter().any(|c| c.check == "separable" && !c.passed));
    }

    #[test]
    fn cut_parsing() {
        let c = parse_cuts("0|12;02|1", 3).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].to_string(), "02|1");
        assert_eq!(parse_cuts("all", 4).unwrap().len(), 7);
        assert!(parse_cuts("0x|1", 3).is_err());
    }

    #[test]
    fn user_state_margins() {
        let s = w_state(3).unwrap();
        let r = verify_state(&s, &enumerate_bipartitions(3).unwrap(), &quick()).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|c| c.passed));
    }
}
