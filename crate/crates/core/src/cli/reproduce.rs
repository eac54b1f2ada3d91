//! CSV tables for the figures and appendix tables.

use std::fmt;
use std::str::FromStr;

use crate::applications::{
    fidelity_tolerance_bound, ld_maximize, unfaithful_average, GammaNorm, GhzBoundModel,
};
use crate::error::{Error, Result};
use crate::families::schmidt_tolerance_formula;
use crate::graphstate::{cluster_fidelity_tolerance, cluster_noise_tolerance};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    TableA1,
    TableA2,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "fig1" => Figure::Fig1,
            "fig2" => Figure::Fig2,
            "fig3" => Figure::Fig3,
            "tablea1" => Figure::TableA1,
            "tablea2" => Figure::TableA2,
            _ => {
                return Err(Error::Parse {
                    position: 0,
                    message: format!("unknown figure `{s}`"),
                })
            }
        })
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::TableA1 => "tableA1",
            Figure::TableA2 => "tableA2",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReproduceConfig {
    pub seed: u64,
    pub samples: usize,
    pub starts: usize,
    pub gamma: GammaNorm,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 100_000,
            starts: 200,
            gamma: GammaNorm::Corrected,
        }
    }
}

fn csv_body(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn num(x: f64) -> String {
    format!("{x}")
}

pub fn fig1_rows() -> Result<Vec<(usize, f64, f64)>> {
    (4..=20)
        .map(|n| {
            Ok((
                n,
                cluster_noise_tolerance(n)?,
                cluster_fidelity_tolerance(n),
            ))
        })
        .collect()
}

pub fn fig2_rows() -> Result<Vec<(usize, usize, f64, f64)>> {
    let mut out = Vec::new();
    for d in 3..=6 {
        for n in 3..=10 {
            let ours = schmidt_tolerance_formula(&vec![1.0 / d as f64; d], n)?;
            out.push((d, n, ours, fidelity_tolerance_bound(d, n)?));
        }
    }
    Ok(out)
}

pub fn fig3_rows(gamma: GammaNorm) -> Result<Vec<(usize, f64, f64, f64)>> {
    let mut out = Vec::new();
    for n in [3, 5, 7, 9] {
        let model = GhzBoundModel::new(3, n)?;
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            let r = model.bound(p, gamma)?;
            out.push((n, p, r.eps_o, r.eps_f));
        }
    }
    Ok(out)
}

pub fn reproduce(fig: Figure, cfg: &ReproduceConfig) -> Result<String> {
    let gamma = match cfg.gamma {
        GammaNorm::Corrected => "corrected",
        GammaNorm::Printed => "printed",
    };
    let (config, body) = match fig {
        Figure::Fig1 => (
            "cluster states n=4..20".to_string(),
            csv_body(
                &["n", "p_ours", "p_fidelity"],
                fig1_rows()?
                    .into_iter()
                    .map(|(n, a, b)| vec![n.to_string(), num(a), num(b)])
                    .collect(),
            )?,
        ),
        Figure::Fig2 => (
            "GHZ d=3..6 n=3..10".to_string(),
            csv_body(
                &["d", "n", "p_ours", "p_fidelity"],
                fig2_rows()?
                    .into_iter()
                    .map(|(d, n, a, b)| vec![d.to_string(), n.to_string(), num(a), num(b)])
                    .collect(),
            )?,
        ),
        Figure::Fig3 => (
            format!("GHZ d=3 n=3,5,7,9 p-step=0.01 gamma={gamma}"),
            csv_body(
                &["n", "p", "epsO", "epsF"],
                fig3_rows(cfg.gamma)?
                    .into_iter()
                    .map(|(n, p, o, f)| vec![n.to_string(), num(p), num(o), num(f)])
                    .collect(),
            )?,
        ),
        Figure::TableA1 => {
            let mut rows = Vec::new();
            for d in 3..=7 {
                let r = ld_maximize(d, cfg.starts, cfg.seed)?;
                let spec: Vec<String> = r.spectrum.lambdas().iter().map(|&x| num(x)).collect();
                rows.push(vec![d.to_string(), num(r.l), spec.join(";")]);
            }
            (
                format!("d=3..7 starts={}", cfg.starts),
                csv_body(&["d", "l_d", "argmax_lambda"], rows)?,
            )
        }
        Figure::TableA2 => {
            let mut rows = Vec::new();
            for d in 3..=7 {
                let a = unfaithful_average(d, cfg.samples, cfg.seed)?;
                rows.push(vec![
                    d.to_string(),
                    num(a.gap),
                    num(a.window),
                    num(a.ratio),
                    a.samples.to_string(),
                    cfg.seed.to_string(),
                ]);
            }
            (
                format!("d=3..7 samples={}", cfg.samples),
                csv_body(
                    &["d", "avgGap", "avgWindow", "avgRatio", "samples", "seed"],
                    rows,
                )?,
            )
        }
    };
    Ok(format!(
        "# gmew {VERSION} reproduce {fig}\n# config: {config}\n# seed: {}\n{body}",
        cfg.seed
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_first_row() {
        let r = fig1_rows().unwrap();
        assert_eq!(r[0].0, 4);
        assert!((r[0].1 - 0.5854).abs() < 1e-4);
        assert!((r[0].2 - 0.5333).abs() < 1e-4);
    }

    #[test]
    fn fig2_first_row() {
        let r = fig2_rows().unwrap();
        assert_eq!((r[0].0, r[0].1), (3, 3));
        assert!((r[0].2 - 0.75).abs() < 1e-12);
        assert!((r[0].3 - 0.6923).abs() < 1e-4);
    }

    #[test]
    fn header_lines() {
        let s = reproduce(Figure::Fig2, &ReproduceConfig::default()).unwrap();
        let mut lines = s.lines();
        assert!(lines.next().unwrap().starts_with("# gmew"));
        assert!(lines.next().unwrap().starts_with("# config"));
        assert_eq!(lines.next().unwrap(), "# seed: 42");
        assert_eq!(lines.next().unwrap(), "d,n,p_ours,p_fidelity");
        assert_eq!(s.lines().count(), 4 + 32);
    }

    #[test]
    fn figure_names() {
        for f in [
            Figure::Fig1,
            Figure::Fig2,
            Figure::Fig3,
            Figure::TableA1,
            Figure::TableA2,
        ] {
            assert_eq!(f.to_string().parse::<Figure>().unwrap(), f);
        }
        assert!("fig9".parse::<Figure>().is_err());
    }
}
