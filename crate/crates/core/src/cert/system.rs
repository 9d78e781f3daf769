use std::fmt;

use super::CertError;
use crate::poly::{is_identifier, same_context, Ctx, VariableContext};
use crate::Poly;

/// Where a generator came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    User,
    /// Introduced by the named construction rule.
    Derived(String),
}

impl Provenance {
    pub fn derived(rule: impl Into<String>) -> Self {
        Provenance::Derived(rule.into())
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::User => f.write_str("user"),
            Provenance::Derived(rule) => write!(f, "derived({rule})"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "user" {
            return Ok(Provenance::User);
        }
        s.strip_prefix("derived(")
            .and_then(|r| r.strip_suffix(')'))
            .map(|r| Provenance::Derived(r.to_string()))
            .ok_or_else(|| format!("unknown provenance `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub poly: Poly,
    pub provenance: Provenance,
}

/// Named generators over one variable context; names are unique identifiers.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorSystem {
    ctx: Ctx,
    generators: Vec<Generator>,
}

impl fmt::Debug for GeneratorSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for g in &self.generators {
            m.entry(&g.name, &format_args!("{} [{}]", g.poly, g.provenance));
        }
        m.finish()
    }
}

impl GeneratorSystem {
    pub fn new(ctx: &Ctx) -> Self {
        GeneratorSystem {
            ctx: ctx.clone(),
            generators: Vec::new(),
        }
    }

    /// User generators in the given order.
    pub fn from_user<I, S>(ctx: &Ctx, gens: I) -> Result<Self, CertError>
    where
        I: IntoIterator<Item = (S, Poly)>,
        S: Into<String>,
    {
        let mut sys = Self::new(ctx);
        for (name, p) in gens {
            sys.push(name, p, Provenance::User)?;
        }
        Ok(sys)
    }

    /// `a1, …, am` for the given polynomials.
    pub fn numbered(ctx: &Ctx, polys: &[Poly]) -> Result<Self, CertError> {
        Self::from_user(
            ctx,
            polys
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("a{}", i + 1), p.clone())),
        )
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        poly: Poly,
        provenance: Provenance,
    ) -> Result<(), CertError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(CertError::BadGeneratorName(name));
        }
        if self.get(&name).is_some() {
            return Err(CertError::DuplicateGenerator(name));
        }
        if !same_context(poly.context(), &self.ctx) {
            return Err(CertError::ContextMismatch);
        }
        self.generators.push(Generator {
            name,
            poly,
            provenance,
        });
        Ok(())
    }

    /// Builder form of [`push`](Self::push).
    pub fn with(
        mut self,
        name: impl Into<String>,
        poly: Poly,
        provenance: Provenance,
    ) -> Result<Self, CertError> {
        self.push(name, poly, provenance)?;
        Ok(self)
    }

    pub fn context(&self) -> &Ctx {
        &self.ctx
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn polys(&self) -> Vec<Poly> {
        self.generators.iter().map(|g| g.poly.clone()).collect()
    }

    /// `base`, or `base` followed by enough underscores to be unused.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.get(&name).is_some() {
            name.push('_');
        }
        name
    }

    /// The system with `name` removed.
    pub fn without(&self, name: &str) -> Self {
        GeneratorSystem {
            ctx: self.ctx.clone(),
            generators: self
                .generators
                .iter()
                .filter(|g| g.name != name)
                .cloned()
                .collect(),
        }
    }

    /// Union by name: `self`'s generators first, then `other`'s new ones.
    pub fn merge(&self, other: &GeneratorSystem) -> Result<Self, CertError> {
        if !same_context(&self.ctx, &other.ctx) {
            return Err(CertError::ContextMismatch);
        }
        let mut out = self.clone();
        for g in &other.generators {
            match out.get(&g.name) {
                Some(existing) if existing.poly != g.poly => {
                    return Err(CertError::GeneratorClash(g.name.clone()))
                }
                Some(_) => {}
                None => out.generators.push(g.clone()),
            }
        }
        Ok(out)
    }

    /// A polynomial ring whose variables are the generator names.
    pub fn formal_context(&self) -> Ctx {
        VariableContext::new(self.names()).expect("generator names are unique identifiers")
    }
}
