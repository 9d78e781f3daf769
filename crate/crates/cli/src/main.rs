//! `pcert`: build and check exact positivity certificates.
//!
//! Exit codes: 0 success, 1 verification failed, 2 input or precondition
//! error, 3 escalation exhausted. Every failure writes one JSON object to
//! stderr.

mod error;
mod problem;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pcert_core::cert::{verify_independent, Certificate, Verdict};
use pcert_core::lp::farkas_decompose;
use pcert_core::pipelines::{
    handelman_cert, jacobi_prestel_cert, putinar_cert, schmudgen_cert, Certified, Counterexample,
    EscalationConfig, PipelineError, ProblemInstance,
};
use pcert_core::polya::{polya_exponent_with, Exhaustion, PolyaError};
use pcert_core::{LinearSystem, Poly, Rational};
use serde_json::{json, Value};

use error::CliError;
use problem::{parse_rational, read_certificate, Problem, Task};

#[derive(Debug, Parser)]
#[command(name = "pcert", version, about = "Exact positivity certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a certificate pipeline on a problem file.
    Cert {
        task: CertTask,
        problem: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
        /// Certificate output; stdout when omitted.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Trace output; defaults to `<output>.trace.json` when `-o` is given.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Run twice and fail unless both certificates are byte-identical.
        #[arg(long)]
        seedless: bool,
    },
    /// Pólya exponent of the (homogeneous) target.
    Polya {
        problem: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Farkas witness of the (linear) target over the generators.
    Farkas { problem: PathBuf },
    /// Re-verify a certificate file.
    Verify { certificate: PathBuf },
    /// Evaluate a certificate's target and terms at a rational point.
    Eval {
        certificate: PathBuf,
        /// Comma-separated rationals, e.g. `1/2,1/3`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CertTask {
    Handelman,
    Jp,
    Schmudgen,
    Putinar,
}

impl CertTask {
    fn task(self) -> Task {
        match self {
            CertTask::Handelman => Task::Handelman,
            CertTask::Jp => Task::Jp,
            CertTask::Schmudgen => Task::Schmudgen,
            CertTask::Putinar => Task::Putinar,
        }
    }
}

#[derive(Debug, clap::Args)]
struct RunOpts {
    #[arg(long)]
    polya_cap: Option<u32>,
    #[arg(long)]
    max_rounds: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Cert {
            task,
            problem,
            opts,
            output,
            trace,
            seedless,
        } => {
            let p = load(&problem, &opts)?;
            if let Some(t) = p.task {
                if t != task.task() {
                    return Err(CliError::Input(format!(
                        "problem file declares task {t:?}, not {task:?}"
                    )));
                }
            }
            let first = certify(task, &p)?;
            let cert_json = first.certificate.to_json();
            if seedless && certify(task, &p)?.certificate.to_json() != cert_json {
                return Err(CliError::Nondeterministic);
            }
            let trace_path =
                trace.or_else(|| output.as_ref().map(|o| with_suffix(o, ".trace.json")));
            match &output {
                Some(path) => write(path, &cert_json)?,
                None => println!("{cert_json}"),
            }
            if let Some(path) = trace_path {
                write(&path, &first.trace.to_json())?;
            }
            Ok(())
        }
        Command::Polya { problem, opts } => {
            let p = load(&problem, &opts)?;
            println!("{}", polya(&p.target, &p.config)?);
            Ok(())
        }
        Command::Farkas { problem } => {
            let p = Problem::load(&problem)?;
            println!("{}", farkas(&p)?);
            Ok(())
        }
        Command::Verify { certificate } => {
            let cert = read_certificate(&certificate, None)?;
            match verify_independent(&cert) {
                Verdict::Valid => {
                    println!("{}", json!({ "verdict": "Valid" }));
                    Ok(())
                }
                Verdict::Invalid(reason) => Err(CliError::Rejected(reason)),
            }
        }
        Command::Eval { certificate, at } => {
            let cert = read_certificate(&certificate, None)?;
            println!("{}", eval(&cert, &at)?);
            Ok(())
        }
    }
}

fn load(path: &Path, opts: &RunOpts) -> Result<Problem, CliError> {
    let mut p = Problem::load(path)?;
    if let Some(cap) = opts.polya_cap {
        p.config.polya_cap = cap;
    }
    if let Some(r) = opts.max_rounds {
        p.config.max_rounds = r;
    }
    if let Ok(v) = std::env::var("PCERT_GRID_LIMIT") {
        p.config.grid_limit = v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("PCERT_GRID_LIMIT: not an integer: `{v}`")))?;
    }
    Ok(p)
}

fn certify(task: CertTask, p: &Problem) -> Result<Certified, CliError> {
    let instance =
        ProblemInstance::new(p.system.clone(), p.target.clone()).with_config(p.config.clone());
    let missing = |table: &str| CliError::Input(format!("task needs a [{table}] table"));
    let out = match task {
        CertTask::Handelman => handelman_cert(&instance)?,
        CertTask::Jp => {
            let jp = p.jp.as_ref().ok_or_else(|| missing("jp"))?;
            jacobi_prestel_cert(&instance, &jp.l, &jp.l_certs)?
        }
        CertTask::Schmudgen => {
            let pair = p.stengle.as_ref().ok_or_else(|| missing("schmudgen"))?;
            schmudgen_cert(&instance, pair)?
        }
        CertTask::Putinar => {
            let pu = p.putinar.as_ref().ok_or_else(|| missing("putinar"))?;
            putinar_cert(&instance, &pu.g_cert, &pu.radius, pu.stengle.as_ref())?
        }
    };
    Ok(out)
}

fn polya(f: &Poly, config: &EscalationConfig) -> Result<Value, CliError> {
    let opts = config.polya_options();
    match polya_exponent_with(f, &opts) {
        Ok(r) => Ok(json!({ "exponent": r.exponent, "product": r.expanded.to_string() })),
        Err(PolyaError::NotHomogeneous) => Err(CliError::Input("target is not homogeneous".into())),
        Err(PolyaError::Zero) => Err(CliError::Input("target is zero".into())),
        Err(PolyaError::CapExceeded {
            cap,
            reached,
            reason,
        }) => {
            let (detail, counterexample) = match reason {
                Exhaustion::Cap => (format!("no exponent up to {cap}"), None),
                Exhaustion::TermLimit { terms } => (
                    format!("stopped at {reached}: next product has {terms} terms"),
                    None,
                ),
                Exhaustion::GridCounterexample { value, point } => (
                    "negative value on the simplex grid".to_string(),
                    Some(Box::new(Counterexample { value, point })),
                ),
            };
            Err(PipelineError::CapExceeded {
                stage: "polya".into(),
                detail,
                counterexample,
            }
            .into())
        }
    }
}

fn farkas(p: &Problem) -> Result<Value, CliError> {
    let sys =
        LinearSystem::new(&p.ctx, p.system.polys()).map_err(|e| CliError::Input(e.to_string()))?;
    let w =
        farkas_decompose(&p.target, &sys).map_err(|e| CliError::Input(format!("farkas: {e}")))?;
    let multipliers: serde_json::Map<String, Value> = p
        .system
        .names()
        .into_iter()
        .zip(&w.multipliers[1..])
        .map(|(n, l)| (n, Value::String(l.to_string())))
        .collect();
    Ok(json!({ "constant": w.multipliers[0].to_string(), "multipliers": multipliers }))
}

fn eval(cert: &Certificate, at: &str) -> Result<Value, CliError> {
    let point: Vec<Rational> = at
        .split(',')
        .map(|s| {
            parse_rational(s)
                .ok_or_else(|| CliError::Input(format!("--at: invalid rational `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    let ctx = cert.context();
    if point.len() != ctx.len() {
        return Err(CliError::Input(format!(
            "--at: expected {} coordinates, got {}",
            ctx.len(),
            point.len()
        )));
    }
    let at_point = |p: &Poly| {
        p.evaluate(&point)
            .map_err(|e| CliError::Input(e.to_string()))
    };
    let mut gens = std::collections::BTreeMap::new();
    for g in cert.system.generators() {
        gens.insert(g.name.clone(), at_point(&g.poly)?);
    }
    let mut terms = Vec::with_capacity(cert.terms.len());
    let mut sum = Rational::from_integer(0.into());
    for t in &cert.terms {
        let root = at_point(&t.square_root)?;
        let mut v = &t.coeff * &root * &root;
        for (name, value) in &gens {
            for _ in 0..t.exponent(name) {
                v *= value;
            }
        }
        sum += &v;
        terms.push(Value::String(v.to_string()));
    }
    let target = at_point(&cert.target)?;
    let gens: serde_json::Map<String, Value> = gens
        .into_iter()
        .map(|(k, v)| (k, Value::String(v.to_string())))
        .collect();
    Ok(json!({
        "target": target.to_string(),
        "sum": sum.to_string(),
        "agree": sum == target,
        "generators": gens,
        "terms": terms,
    }))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
