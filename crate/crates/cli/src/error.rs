use pcert_core::cert::InvalidReason;
use pcert_core::pipelines::PipelineError;
use serde_json::{json, Value};
use thiserror::Error;

/// Everything that ends a run with a nonzero exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}:{line}:{column}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("certificate rejected: {0}")]
    Rejected(InvalidReason),
    #[error("two runs produced different certificates")]
    Nondeterministic,
}

impl CliError {
    /// 1 verification failed, 2 precondition or input error, 3 escalation exhausted.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Rejected(_) | CliError::Nondeterministic => 1,
            CliError::Pipeline(PipelineError::Unverified { .. }) => 1,
            CliError::Pipeline(PipelineError::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Parse { .. } => "Parse",
            CliError::Input(_) => "Input",
            CliError::Rejected(r) => match r {
                InvalidReason::NegativeCoefficient { .. } => "NegativeCoefficient",
                InvalidReason::FlavorViolation { .. } => "FlavorViolation",
                InvalidReason::ExpansionMismatch(_) => "ExpansionMismatch",
                InvalidReason::Malformed(_) => "Malformed",
            },
            CliError::Nondeterministic => "Nondeterministic",
            CliError::Pipeline(e) => match e {
                PipelineError::NotLinear(_) => "NotLinear",
                PipelineError::EmptyPolyhedron => "EmptyPolyhedron",
                PipelineError::UnboundedPolyhedron => "UnboundedPolyhedron",
                PipelineError::DegenerateCoordinates => "DegenerateCoordinates",
                PipelineError::CapExceeded { .. } => "CapExceeded",
                PipelineError::GammaTooSmall { .. } => "GammaTooSmall",
                PipelineError::InvalidParameter(_) => "InvalidParameter",
                PipelineError::InvalidWitnessCert(_) => "InvalidWitnessCert",
                PipelineError::InvalidStenglePair(_) => "InvalidStenglePair",
                PipelineError::MissingStenglePair => "MissingStenglePair",
                PipelineError::InvalidConfig(_) => "InvalidConfig",
                PipelineError::ContextMismatch => "ContextMismatch",
                PipelineError::Cert(_) => "Certificate",
                PipelineError::Unverified { .. } => "Unverified",
            },
        }
    }

    /// The single JSON object written to stderr.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() });
        let extra = match self {
            CliError::Parse {
                file, line, column, ..
            } => json!({ "file": file, "line": line, "column": column }),
            CliError::Rejected(InvalidReason::ExpansionMismatch(diff)) => {
                json!({ "difference": diff.to_string() })
            }
            CliError::Rejected(InvalidReason::NegativeCoefficient { term }) => {
                json!({ "term": term })
            }
            CliError::Rejected(InvalidReason::FlavorViolation { term, flavor }) => {
                json!({ "term": term, "flavor": flavor.as_str() })
            }
            CliError::Pipeline(PipelineError::CapExceeded {
                stage,
                counterexample,
                ..
            }) => {
                let cx = counterexample.as_ref().map(|c| {
                    json!({ "value": c.value.to_string(), "point": c.point.iter().map(|x| x.to_string()).collect::<Vec<_>>() })
                });
                json!({ "stage": stage, "counterexample": cx })
            }
            _ => json!({}),
        };
        if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
            base.extend(more);
        }
        v
    }
}
