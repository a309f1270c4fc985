use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use mwgap_core::brute::brute_force_min_cut;
use mwgap_core::dual::{certify, CertFamily};
use mwgap_core::io::{
    cut_from_json, instance_digest, instance_from_json, CertificateBundle, CertificateJson, CutJson, InstanceJson,
};
use mwgap_core::ledger;
use mwgap_core::lpsearch::search;
use mwgap_core::projection::{check_projection_bounds, d_profile, CostLemmaChecker};
use mwgap_core::rational::{format_q, parse_q};
use mwgap_core::rounding::estimate_density;
use mwgap_core::simplex::WeightFunction;
use mwgap_core::svg::{emit_svg, Overlay};
use mwgap_core::weights::WeightKind;
use mwgap_core::Error;

#[derive(Parser)]
#[command(name = "mwgap", version, about = "Integrality-gap instances for Multiway Cut on simplex grids")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Wrap the output in a reproducibility bundle.
    #[arg(long, global = true)]
    bundle: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build one of the weight constructions.
    Build {
        #[arg(long)]
        weights: WeightKind,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: Option<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Value of the canonical LP solution of an instance.
    Lpc {
        /// Instance JSON; stdin when omitted or "-".
        instance: Option<PathBuf>,
    },
    /// Dual-graph lower-bound certificate.
    Certify {
        instance: Option<PathBuf>,
        #[arg(long, default_value = "nonopposite")]
        family: CertFamily,
        #[arg(long, default_value = "1")]
        target: String,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustive minimum cut (at most 15 grid points).
    Brute {
        instance: Option<PathBuf>,
        #[arg(long, default_value = "nonopposite")]
        family: CertFamily,
        #[command(flatten)]
        output: Output,
    },
    /// Projection fractions and cost lemmas for a k-way cut.
    Project {
        instance: Option<PathBuf>,
        #[arg(long)]
        cut: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo density of the rounding distribution.
    Round {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value = "1/5")]
        p_corner: String,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Row-generation search for low-LP weights.
    Lpsearch {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Draw a k = 3 instance as SVG.
    Svg {
        instance: Option<PathBuf>,
        #[arg(long)]
        cut: Option<PathBuf>,
        /// Print the potential of this terminal (1-3) on every face.
        #[arg(long)]
        potential: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the acceptance criteria and print a pass/fail table.
    Ledger {
        /// Run only this criterion (1-10).
        #[arg(long)]
        criterion: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

/// Input problems exit with 2, failed checks with 1.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Structural(_) | Error::Degenerate(_) | Error::Lp(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_input(path: Option<&PathBuf>) -> CliResult<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn read_instance(path: Option<&PathBuf>) -> CliResult<WeightFunction> {
    Ok(instance_from_json(&read_input(path)?)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

struct Run {
    argv: Vec<String>,
    bundle: bool,
}

impl Run {
    fn json<T: Serialize>(&self, out: &Option<PathBuf>, value: &T, digest: Option<String>, seeds: Vec<u64>) -> CliResult<()> {
        let value = serde_json::to_value(value).map_err(|e| Failure::Usage(e.to_string()))?;
        let value = if self.bundle {
            serde_json::to_value(CertificateBundle::new(self.argv.clone(), digest, seeds, value))
                .expect("bundle serializes")
        } else {
            value
        };
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        emit(out, &text)
    }
}

fn build(kind: WeightKind, k: usize, n: Option<u32>) -> CliResult<WeightFunction> {
    let n = match (kind, n) {
        (WeightKind::Fk, None) => 2,
        (_, Some(n)) => n,
        (_, None) => return Err(Failure::Usage(format!("--n is required for {}", kind.as_str()))),
    };
    Ok(kind.build(k, n)?)
}

fn run(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    let r = Run { argv, bundle: cli.bundle };
    match cli.command {
        Command::Build { weights, k, n, output } => {
            let w = build(weights, k, n)?;
            r.json(&output.out, &InstanceJson::from_weights(&w), Some(instance_digest(&w)), vec![])
        }
        Command::Lpc { instance } => {
            let w = read_instance(instance.as_ref())?;
            r.json(&None, &format_q(&w.lpc()), Some(instance_digest(&w)), vec![])
        }
        Command::Certify { instance, family, target, output } => {
            let w = read_instance(instance.as_ref())?;
            let target = parse_q(&target)?;
            let cert = certify(w.n(), &w, family, &target)?;
            r.json(&output.out, &CertificateJson::from_certificate(&cert), Some(cert.digest.clone()), vec![])?;
            if cert.pass {
                Ok(())
            } else {
                Err(Failure::Check(format!("certified bound {} is below {}", format_q(&cert.overall), format_q(&target))))
            }
        }
        Command::Brute { instance, family, output } => {
            let w = read_instance(instance.as_ref())?;
            let (min, cut) = brute_force_min_cut(w.n(), &w, family)?;
            let report = json!({ "min": format_q(&min), "cut": CutJson::from_cut(&cut) });
            r.json(&output.out, &report, Some(instance_digest(&w)), vec![])
        }
        Command::Project { instance, cut, output } => {
            let w = read_instance(instance.as_ref())?;
            let p = cut_from_json(&read_input(Some(&cut))?)?;
            let projection = check_projection_bounds(&p)?;
            let lemmas = if p.n() % 3 == 0 && p.k() >= 3 {
                let report = CostLemmaChecker::new(p.k(), p.n())?.check(&p)?;
                Some(report)
            } else {
                None
            };
            let holds = projection.holds && lemmas.as_ref().is_none_or(|l| l.holds());
            let report = json!({
                "cost": format_q(&p.cost(&w)?),
                "d_profile": d_profile(&p),
                "projection": projection,
                "cost_lemmas": lemmas,
                "holds": holds,
            });
            r.json(&output.out, &report, Some(instance_digest(&w)), vec![])?;
            if holds {
                Ok(())
            } else {
                Err(Failure::Check("a projection bound or cost lemma failed".into()))
            }
        }
        Command::Round { n, samples, p_corner, seed, output } => {
            let p = parse_q(&p_corner)?;
            let est = estimate_density(n, samples, &p, seed)?;
            r.json(&output.out, &est, None, vec![seed])
        }
        Command::Lpsearch { n, tol, max_iter, output } => {
            let state = search(n, tol, max_iter)?;
            let recheck = state.recheck.as_ref().expect("search always rechecks");
            let mut report = serde_json::to_value(InstanceJson::from_weights(&recheck.weights)).expect("instance serializes");
            let extra = json!({
                "lpc_exact": format_q(&recheck.lpc_exact),
                "iterations": state.iterations(),
                "certified": recheck.certified,
                "converged": state.converged,
            });
            if let (Value::Object(base), Value::Object(more)) = (&mut report, extra) {
                base.extend(more);
            }
            r.json(&output.out, &report, Some(instance_digest(&recheck.weights)), vec![])?;
            if recheck.certified {
                Ok(())
            } else {
                Err(Failure::Check("rescaled weights could not be certified".into()))
            }
        }
        Command::Svg { instance, cut, potential, output } => {
            let w = read_instance(instance.as_ref())?;
            let cut = cut.map(|c| read_input(Some(&c)).and_then(|s| Ok(cut_from_json(&s)?))).transpose()?;
            let potential = match potential {
                Some(i @ 1..=3) => Some(i - 1),
                Some(i) => return Err(Failure::Usage(format!("potential index must be 1, 2 or 3, got {i}"))),
                None => None,
            };
            let svg = emit_svg(&w, Overlay { cut: cut.as_ref(), potential })?;
            emit(&output.out, &svg)
        }
        Command::Ledger { criterion, output } => {
            let report = match criterion {
                Some(id) => {
                    let c = ledger::run_criterion(id)?;
                    let passed = usize::from(c.pass);
                    ledger::LedgerReport { failed: 1 - passed, passed, criteria: vec![c] }
                }
                None => ledger::run_all()?,
            };
            for c in &report.criteria {
                println!("{}", c.line());
            }
            println!("{} passed, {} failed", report.passed, report.failed);
            if output.out.is_some() {
                r.json(&output.out, &report, None, vec![])?;
            }
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Check(format!("{} criteria failed", report.failed)))
            }
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("mwgap: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli, argv[1..].to_vec()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("mwgap: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("mwgap: {msg}");
            ExitCode::from(1)
        }
    }
}
