//! JSON form of certificates and Stengle pairs.
//!
//! Polynomials are written in canonical text syntax and exponent maps are
//! sorted by name, so emit → parse → emit is byte-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CertTerm, Certificate, Flavor, GeneratorSystem, Provenance, StenglePair};
use crate::poly::{Ctx, ParseError, VariableContext};
use crate::{Poly, Rational};

#[derive(Debug, Error)]
pub enum CertIoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Poly { field: String, source: ParseError },
    #[error("{0}")]
    Schema(String),
}

#[derive(Serialize, Deserialize)]
struct GeneratorJson {
    name: String,
    polynomial: String,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    square_root: String,
    exponents: BTreeMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    flavor: String,
    variables: Vec<String>,
    generators: Vec<GeneratorJson>,
    target: String,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct StengleJson {
    target: String,
    g_cert: CertificateJson,
    h_cert: CertificateJson,
}

impl std::str::FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "semiring" => Ok(Flavor::Semiring),
            "preordering" => Ok(Flavor::Preordering),
            "quadratic_module" => Ok(Flavor::QuadraticModule),
            other => Err(format!("unknown flavor `{other}`")),
        }
    }
}

fn parse_poly(ctx: &Ctx, field: impl Into<String>, text: &str) -> Result<Poly, CertIoError> {
    Poly::parse(ctx, text).map_err(|source| CertIoError::Poly {
        field: field.into(),
        source,
    })
}

fn to_repr(cert: &Certificate) -> CertificateJson {
    CertificateJson {
        flavor: cert.flavor.to_string(),
        variables: cert.context().names().to_vec(),
        generators: cert
            .system
            .generators()
            .iter()
            .map(|g| GeneratorJson {
                name: g.name.clone(),
                polynomial: g.poly.to_string(),
                provenance: g.provenance.to_string(),
            })
            .collect(),
        target: cert.target.to_string(),
        terms: cert
            .terms
            .iter()
            .map(|t| TermJson {
                coeff: t.coeff.to_string(),
                square_root: t.square_root.to_string(),
                exponents: t.exponents.clone(),
            })
            .collect(),
    }
}

fn context_for(names: &[String], shared: Option<&Ctx>) -> Result<Ctx, CertIoError> {
    match shared {
        Some(ctx) if ctx.names() == names => Ok(ctx.clone()),
        Some(_) => Err(CertIoError::Schema(
            "certificates disagree on the variable list".into(),
        )),
        None => VariableContext::new(names.iter().cloned())
            .map_err(|e| CertIoError::Schema(e.to_string())),
    }
}

fn from_repr(repr: CertificateJson, shared: Option<&Ctx>) -> Result<Certificate, CertIoError> {
    let ctx = context_for(&repr.variables, shared)?;
    let flavor: Flavor = repr.flavor.parse().map_err(CertIoError::Schema)?;
    let mut system = GeneratorSystem::new(&ctx);
    for g in repr.generators {
        let p = parse_poly(&ctx, format!("generator {}", g.name), &g.polynomial)?;
        let prov: Provenance = g.provenance.parse().map_err(CertIoError::Schema)?;
        system
            .push(g.name, p, prov)
            .map_err(|e| CertIoError::Schema(e.to_string()))?;
    }
    let target = parse_poly(&ctx, "target", &repr.target)?;
    let mut terms = Vec::with_capacity(repr.terms.len());
    for (i, t) in repr.terms.into_iter().enumerate() {
        let coeff: Rational = t.coeff.parse().map_err(|_| {
            CertIoError::Schema(format!("term {i}: invalid coefficient `{}`", t.coeff))
        })?;
        let root = parse_poly(&ctx, format!("term {i} square_root"), &t.square_root)?;
        terms.push(CertTerm::new(coeff, root, t.exponents));
    }
    Ok(Certificate::new(flavor, system, target, terms))
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&to_repr(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CertIoError> {
        from_repr(serde_json::from_str(text)?, None)
    }

    /// Parses a certificate that must use exactly the variables of `ctx`.
    pub fn from_json_in(text: &str, ctx: &Ctx) -> Result<Self, CertIoError> {
        from_repr(serde_json::from_str(text)?, Some(ctx))
    }
}

impl StenglePair {
    pub fn to_json(&self) -> String {
        let repr = StengleJson {
            target: self.target.to_string(),
            g_cert: to_repr(&self.g_cert),
            h_cert: to_repr(&self.h_cert),
        };
        serde_json::to_string_pretty(&repr).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CertIoError> {
        Self::parse(text, None)
    }

    pub fn from_json_in(text: &str, ctx: &Ctx) -> Result<Self, CertIoError> {
        Self::parse(text, Some(ctx))
    }

    fn parse(text: &str, shared: Option<&Ctx>) -> Result<Self, CertIoError> {
        let repr: StengleJson = serde_json::from_str(text)?;
        let g_cert = from_repr(repr.g_cert, shared)?;
        let ctx = g_cert.context().clone();
        let h_cert = from_repr(repr.h_cert, Some(&ctx))?;
        let target = parse_poly(&ctx, "target", &repr.target)?;
        Ok(StenglePair {
            target,
            g_cert,
            h_cert,
        })
    }
}
