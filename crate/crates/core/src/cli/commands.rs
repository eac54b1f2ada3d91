use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::descriptor::parse_descriptor;
use super::io::{construct, descriptor_state, load_state, summarize, to_json, WitnessJson};
use super::reproduce::{reproduce, Figure, ReproduceConfig};
use super::verify::{parse_cuts, verify_corpus, verify_state, CheckResult, VerifyOptions};
use crate::applications::GammaNorm;
use crate::error::{Error, Result};
use crate::eval::{
    expectation, white_noise_tolerance, FidelityWitness, NoisyStateModel, Rho, SeeSaw,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "gmew",
    version,
    about = "Genuine multipartite entanglement witnesses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Monte-Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Random starts (optimizers) or restarts (see-saw).
    #[arg(long, global = true)]
    pub starts: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Largest total dimension that may be densified.
    #[arg(long, global = true, default_value_t = 4096)]
    pub dense_limit: usize,

    /// Use the literal printed normalization of the fidelity bound.
    #[arg(long, global = true)]
    pub gamma_printed: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the witness for a state descriptor and write it as JSON.
    Construct { descriptor: String },
    /// Tr(W ρ(p)) for the constructed (or a loaded) witness.
    Evaluate {
        descriptor: String,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Witness JSON to evaluate instead of constructing one.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// White-noise tolerance of the constructed and the fidelity witness.
    Tolerance { descriptor: String },
    /// CSV for fig1, fig2, fig3, tableA1 or tableA2.
    Reproduce { figure: String },
    /// Run the certificate, separability, span and tolerance checks.
    Verify {
        /// Halve all block coefficients first; every check should then fail.
        #[arg(long)]
        corrupt: bool,
        /// State JSON to lift instead of the built-in corpus.
        #[arg(long)]
        state: Option<PathBuf>,
        /// `all` or cuts such as `0|12;02|1`.
        #[arg(long, default_value = "all")]
        cuts: String,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                so.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into())
}

fn report(checks: &[CheckResult]) -> Result<(String, bool)> {
    let mut text = String::new();
    for c in checks {
        text.push_str(&serde_json::to_string(c)?);
        text.push('\n');
    }
    let ok = checks.iter().all(|c| c.passed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    text.push_str(&format!(
        "{{\"summary\":\"{}\",\"checks\":{},\"failed\":{}}}\n",
        if ok { "PASS" } else { "FAIL" },
        checks.len(),
        failed
    ));
    Ok((text, ok))
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    if let Some(t) = cli.threads {
        // ignore the error raised when a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match &cli.command {
        Command::Construct { descriptor } => {
            let d = parse_descriptor(descriptor)?;
            let c = construct(&d, cli.dense_limit)?;
            let j = to_json(&c)?;
            let s = j.summary();
            eprintln!(
                "blocks {}  dims {:?}  c {:?}\nTr {:.6}  w_psi {:.6}  p* {}  p_fid {}",
                s.blocks,
                s.block_dims,
                s.coeffs,
                s.trace,
                s.target_expectation,
                fmt_opt(s.tolerance),
                fmt_opt(s.fidelity_tolerance)
            );
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            let text = match &j {
                WitnessJson::GraphDiagonal { .. } => serde_json::to_string_pretty(&j)?,
                WitnessJson::Lifted { .. } => serde_json::to_string(&j)?,
            };
            emit(&cli.out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Evaluate {
            descriptor,
            p,
            witness,
        } => {
            let d = parse_descriptor(descriptor)?;
            let target = descriptor_state(&d)?;
            let model = NoisyStateModel::new(target.clone(), *p)?;
            let w = match witness {
                Some(path) => {
                    let j: WitnessJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    j.to_witness()?
                }
                None => construct(&d, cli.dense_limit)?.witness,
            };
            let ours = expectation(&w, Rho::Noisy(&model), cli.dense_limit)?;
            let fid = FidelityWitness::for_state(&target)?;
            let f = expectation(&fid, Rho::Noisy(&model), cli.dense_limit)?;
            emit(
                &cli.out,
                &format!("{{\"p\":{p},\"expectation\":{ours},\"fidelity_expectation\":{f}}}"),
            )?;
            Ok(EXIT_OK)
        }
        Command::Tolerance { descriptor } => {
            let d = parse_descriptor(descriptor)?;
            let c = construct(&d, cli.dense_limit)?;
            let s = summarize(&c)?;
            let ours = match (&c.target, s.tolerance) {
                (_, Some(t)) => t,
                (Some(t), None) => white_noise_tolerance(&c.witness, t)?,
                (None, None) => return Err(Error::Domain("no tolerance available".into())),
            };
            emit(
                &cli.out,
                &format!(
                    "{{\"descriptor\":{},\"p_ours\":{ours},\"p_fidelity\":{}}}",
                    serde_json::to_string(descriptor)?,
                    s.fidelity_tolerance
                        .map(|v| v.to_string())
                        .unwrap_or("null".into())
                ),
            )?;
            Ok(EXIT_OK)
        }
        Command::Reproduce { figure } => {
            let fig: Figure = figure.parse()?;
            let mut cfg = ReproduceConfig {
                seed: cli.seed,
                gamma: if cli.gamma_printed {
                    GammaNorm::Printed
                } else {
                    GammaNorm::Corrected
                },
                ..Default::default()
            };
            if let Some(s) = cli.samples {
                cfg.samples = s;
            }
            if let Some(s) = cli.starts {
                cfg.starts = s;
            }
            emit(&cli.out, &reproduce(fig, &cfg)?)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            corrupt,
            state,
            cuts,
        } => {
            let mut opts = VerifyOptions {
                corrupt: *corrupt,
                see_saw: SeeSaw {
                    seed: cli.seed,
                    ..Default::default()
                },
                ..Default::default()
            };
            if let Some(s) = cli.starts {
                opts.see_saw.restarts = s;
            }
            let checks = match state {
                Some(path) => {
                    let s = load_state(path)?;
                    if s.dim() > cli.dense_limit {
                        return Err(Error::Size {
                            dim: s.dim(),
                            limit: cli.dense_limit,
                        });
                    }
                    let cuts = parse_cuts(cuts, s.n_parties())?;
                    verify_state(&s, &cuts, &opts)?
                }
                None => verify_corpus(&opts)?,
            };
            let (text, ok) = report(&checks)?;
            emit(&cli.out, &text)?;
            Ok(if ok { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

/// Exit code for a library error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::CertificateFailure(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}
