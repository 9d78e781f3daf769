//! Problem files: TOML with polynomials in the core text syntax.
//!
//! ```toml
//! variables = ["X1"]
//! target = "1/2 + X1 - X1^2"
//!
//! [[generators]]
//! name = "a1"
//! poly = "X1"
//!
//! [escalation]
//! polya_cap = 60
//! c_start = "1/16"
//! ```
//!
//! Task payloads live in `[jp]`, `[schmudgen]` and `[putinar]` tables.
//! Relative paths resolve against the problem file's directory.

use std::path::{Path, PathBuf};

use pcert_core::cert::{Certificate, Flavor, GeneratorSystem, StenglePair};
use pcert_core::pipelines::EscalationConfig;
use pcert_core::poly::{Ctx, VariableContext};
use pcert_core::{Poly, Rational};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    variables: Vec<String>,
    #[serde(default)]
    generators: Vec<RawGenerator>,
    target: Spanned<String>,
    task: Option<String>,
    jp: Option<RawJp>,
    schmudgen: Option<RawSchmudgen>,
    putinar: Option<RawPutinar>,
    #[serde(default)]
    escalation: RawEscalation,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: String,
    poly: Spanned<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJp {
    l: Vec<Spanned<String>>,
    l_certs: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchmudgen {
    stengle: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPutinar {
    g: Option<String>,
    g_cert: Option<String>,
    radius: Spanned<RawRational>,
    stengle: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEscalation {
    polya_cap: Option<u32>,
    max_rounds: Option<u32>,
    c_start: Option<Spanned<RawRational>>,
    c_ratio: Option<Spanned<RawRational>>,
    n_start: Option<Spanned<RawRational>>,
    n_ratio: Option<Spanned<RawRational>>,
    eps_start: Option<Spanned<RawRational>>,
    eps_ratio: Option<Spanned<RawRational>>,
    t_slack: Option<Spanned<RawRational>>,
    short_circuit: Option<bool>,
    max_terms: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Handelman,
    Jp,
    Schmudgen,
    Putinar,
    Polya,
    Farkas,
    Verify,
}

impl Task {
    pub fn parse(s: &str) -> Option<Task> {
        Some(match s {
            "handelman" => Task::Handelman,
            "jp" => Task::Jp,
            "schmudgen" => Task::Schmudgen,
            "putinar" => Task::Putinar,
            "polya" => Task::Polya,
            "farkas" => Task::Farkas,
            "verify" => Task::Verify,
            _ => return None,
        })
    }
}

pub struct JpPayload {
    pub l: Vec<Poly>,
    pub l_certs: Vec<Certificate>,
}

pub struct PutinarPayload {
    pub g_cert: Certificate,
    pub radius: Rational,
    pub stengle: Option<StenglePair>,
}

pub struct Problem {
    pub ctx: Ctx,
    pub system: GeneratorSystem,
    pub target: Poly,
    pub task: Option<Task>,
    pub jp: Option<JpPayload>,
    pub stengle: Option<StenglePair>,
    pub putinar: Option<PutinarPayload>,
    pub config: EscalationConfig,
}

/// Byte offset to 1-based line and column.
fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Source<'a> {
    file: String,
    text: &'a str,
    dir: PathBuf,
}

impl Source<'_> {
    fn error_at(&self, offset: usize, message: impl Into<String>) -> CliError {
        let (line, column) = line_col(self.text, offset);
        CliError::Parse {
            file: self.file.clone(),
            line,
            column,
            message: message.into(),
        }
    }

    fn poly(&self, ctx: &Ctx, field: &Spanned<String>, what: &str) -> Result<Poly, CliError> {
        Poly::parse(ctx, field.get_ref()).map_err(|e| {
            // the span starts at the opening quote
            let inner: usize = field
                .get_ref()
                .chars()
                .take(e.column.saturating_sub(1))
                .map(char::len_utf8)
                .sum();
            self.error_at(
                field.span().start + 1 + inner,
                format!("{what}: {}", e.message),
            )
        })
    }

    fn rational(&self, field: &Spanned<RawRational>, what: &str) -> Result<Rational, CliError> {
        match field.get_ref() {
            RawRational::Int(n) => Ok(Rational::from_integer((*n).into())),
            RawRational::Text(s) => parse_rational(s).ok_or_else(|| {
                self.error_at(
                    field.span().start,
                    format!("{what}: invalid rational `{s}`"),
                )
            }),
        }
    }

    fn path(&self, p: &str) -> PathBuf {
        self.dir.join(p)
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.contains('/') {
        s.parse().ok()
    } else {
        s.parse::<pcert_core::Integer>()
            .ok()
            .map(Rational::from_integer)
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_certificate(path: &Path, ctx: Option<&Ctx>) -> Result<Certificate, CliError> {
    let text = read_file(path)?;
    let parsed = match ctx {
        Some(c) => Certificate::from_json_in(&text, c),
        None => Certificate::from_json(&text),
    };
    parsed.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_stengle(path: &Path, ctx: &Ctx) -> Result<StenglePair, CliError> {
    let text = read_file(path)?;
    StenglePair::from_json_in(&text, ctx)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, CliError> {
        let text = read_file(path)?;
        let src = Source {
            file: path.display().to_string(),
            text: &text,
            dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        let raw: RawProblem = toml::from_str(&text).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            src.error_at(offset, e.message().to_string())
        })?;
        Self::build(raw, &src)
    }

    fn build(raw: RawProblem, src: &Source) -> Result<Problem, CliError> {
        let ctx = VariableContext::new(raw.variables.iter().cloned())
            .map_err(|e| CliError::Input(format!("variables: {e}")))?;
        let mut gens = Vec::with_capacity(raw.generators.len());
        for g in &raw.generators {
            gens.push((
                g.name.clone(),
                src.poly(&ctx, &g.poly, &format!("generator {}", g.name))?,
            ));
        }
        let system =
            GeneratorSystem::from_user(&ctx, gens).map_err(|e| CliError::Input(e.to_string()))?;
        let target = src.poly(&ctx, &raw.target, "target")?;
        let task = match &raw.task {
            Some(t) => {
                Some(Task::parse(t).ok_or_else(|| CliError::Input(format!("unknown task `{t}`")))?)
            }
            None => None,
        };

        let jp = match raw.jp {
            Some(j) => {
                let l =
                    j.l.iter()
                        .enumerate()
                        .map(|(i, p)| src.poly(&ctx, p, &format!("jp.l[{i}]")))
                        .collect::<Result<Vec<_>, _>>()?;
                let l_certs = match j.l_certs {
                    Some(paths) => paths
                        .iter()
                        .map(|p| read_certificate(&src.path(p), Some(&ctx)))
                        .collect::<Result<Vec<_>, _>>()?,
                    None => l
                        .iter()
                        .map(|li| generator_cert(&system, li))
                        .collect::<Result<Vec<_>, _>>()?,
                };
                Some(JpPayload { l, l_certs })
            }
            None => None,
        };
        let stengle = match raw.schmudgen {
            Some(s) => Some(read_stengle(&src.path(&s.stengle), &ctx)?),
            None => None,
        };
        let putinar = match raw.putinar {
            Some(p) => {
                let g_cert = match (&p.g, &p.g_cert) {
                    (Some(name), None) => {
                        Certificate::generator(system.clone(), name, Flavor::QuadraticModule)
                            .map_err(|e| CliError::Input(format!("putinar.g: {e}")))?
                    }
                    (None, Some(path)) => read_certificate(&src.path(path), Some(&ctx))?,
                    _ => {
                        return Err(CliError::Input(
                            "putinar needs exactly one of `g` and `g_cert`".into(),
                        ))
                    }
                };
                let radius = src.rational(&p.radius, "putinar.radius")?;
                let stengle = match &p.stengle {
                    Some(path) => Some(read_stengle(&src.path(path), &ctx)?),
                    None => None,
                };
                Some(PutinarPayload {
                    g_cert,
                    radius,
                    stengle,
                })
            }
            None => None,
        };

        let mut config = EscalationConfig::default();
        let e = raw.escalation;
        if let Some(v) = e.polya_cap {
            config.polya_cap = v;
        }
        if let Some(v) = e.max_rounds {
            config.max_rounds = v;
        }
        if let Some(v) = e.short_circuit {
            config.short_circuit = v;
        }
        if let Some(v) = e.max_terms {
            config.max_terms = v;
        }
        let fields = [
            (&e.c_start, &mut config.c_schedule.start, "c_start"),
            (&e.c_ratio, &mut config.c_schedule.ratio, "c_ratio"),
            (&e.n_start, &mut config.n_schedule.start, "n_start"),
            (&e.n_ratio, &mut config.n_schedule.ratio, "n_ratio"),
            (&e.eps_start, &mut config.eps_schedule.start, "eps_start"),
            (&e.eps_ratio, &mut config.eps_schedule.ratio, "eps_ratio"),
            (&e.t_slack, &mut config.t_slack, "t_slack"),
        ];
        for (raw, slot, name) in fields {
            if let Some(v) = raw {
                *slot = src.rational(v, &format!("escalation.{name}"))?;
            }
        }

        Ok(Problem {
            ctx,
            system,
            target,
            task,
            jp,
            stengle,
            putinar,
            config,
        })
    }
}

/// `1·g` for the generator whose polynomial is `l`.
fn generator_cert(system: &GeneratorSystem, l: &Poly) -> Result<Certificate, CliError> {
    let g = system
        .generators()
        .iter()
        .find(|g| &g.poly == l)
        .ok_or_else(|| {
            CliError::Input(format!(
                "jp.l entry {l} is not a generator; supply jp.l_certs"
            ))
        })?;
    Certificate::generator(system.clone(), &g.name, Flavor::QuadraticModule)
        .map_err(|e| CliError::Input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3"), Some(Rational::from_integer(3.into())));
        assert_eq!(
            parse_rational("-1/4"),
            Some(Rational::new((-1).into(), 4.into()))
        );
        assert_eq!(parse_rational("x"), None);
    }
}
