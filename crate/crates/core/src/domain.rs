//! Category domains and their pluralization lexicons.
//!
//! A domain is an ordered set of basic-level categories (e.g. the 24 mammals)
//! together with the superordinate label that general arguments conclude
//! with. Domains are declared in small TOML manifests; see
//! `data/exp1_domains.toml` for the packaged set.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    /// Plural label used in general conclusions ("mammals").
    pub superordinate: String,
    /// A strictly broader class ("animals"), used by Specificity pairs.
    #[serde(default)]
    pub broader_superordinate: Option<String>,
    /// Value substituted for `X` in domain-aware prompt text.
    #[serde(default = "default_placeholder")]
    pub placeholder: String,
    /// Source of out-of-category premises for Non-Monotonicity.
    #[serde(default)]
    pub supplementary_domain: Option<String>,
    pub categories: Vec<String>,
}

fn default_placeholder() -> String {
    "living things".to_string()
}

impl Domain {
    pub fn new(
        name: impl Into<String>,
        superordinate: impl Into<String>,
        categories: Vec<String>,
    ) -> Result<Self> {
        let domain = Domain {
            name: name.into(),
            superordinate: superordinate.into(),
            broader_superordinate: None,
            placeholder: default_placeholder(),
            supplementary_domain: None,
            categories,
        };
        domain.validate()?;
        Ok(domain)
    }

    pub fn validate(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::Schema(format!("domain {} has no categories", self.name)));
        }
        let mut seen = HashSet::new();
        for c in &self.categories {
            if !seen.insert(c.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate category `{c}` in domain {}",
                    self.name
                )));
            }
        }
        if seen.contains(self.superordinate.as_str()) {
            return Err(Error::Schema(format!(
                "superordinate `{}` of domain {} is also listed as a category",
                self.superordinate, self.name
            )));
        }
        if let Some(broader) = &self.broader_superordinate {
            if broader == &self.superordinate || seen.contains(broader.as_str()) {
                return Err(Error::Schema(format!(
                    "broader superordinate `{broader}` of domain {} collides with the domain",
                    self.name
                )));
            }
        }
        if self.supplementary_domain.as_deref() == Some(self.name.as_str()) {
            return Err(Error::Schema(format!(
                "domain {} names itself as its supplementary domain",
                self.name
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn contains(&self, category: &str) -> bool {
        self.categories.iter().any(|c| c == category)
    }

    pub fn index_of(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    /// Returns a copy restricted to the first `n` categories.
    pub fn truncated(&self, n: usize) -> Domain {
        Domain {
            categories: self.categories.iter().take(n).cloned().collect(),
            ..self.clone()
        }
    }
}

/// A set of domains loaded from one manifest, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainSet {
    domains: BTreeMap<String, Domain>,
    order: Vec<String>,
}

#[derive(Deserialize)]
struct ManifestFile {
    domain: Vec<Domain>,
}

impl DomainSet {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ManifestFile = toml::from_str(text)?;
        let mut set = DomainSet::default();
        for d in file.domain {
            set.insert(d)?;
        }
        set.check_references()?;
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn insert(&mut self, domain: Domain) -> Result<()> {
        domain.validate()?;
        if self.domains.contains_key(&domain.name) {
            return Err(Error::Schema(format!("domain {} declared twice", domain.name)));
        }
        self.order.push(domain.name.clone());
        self.domains.insert(domain.name.clone(), domain);
        Ok(())
    }

    fn check_references(&self) -> Result<()> {
        for d in self.domains.values() {
            if let Some(s) = &d.supplementary_domain {
                if !self.domains.contains_key(s) {
                    return Err(Error::Schema(format!(
                        "domain {} references unknown supplementary domain {s}",
                        d.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Domain> {
        self.domains
            .get(name)
            .ok_or_else(|| Error::Schema(format!("unknown domain {name}")))
    }

    pub fn supplementary_of(&self, domain: &Domain) -> Result<Option<&Domain>> {
        domain
            .supplementary_domain
            .as_deref()
            .map(|s| self.get(s))
            .transpose()
    }

    /// Domains in manifest order.
    pub fn iter(&self) -> impl Iterator<Item = &Domain> {
        self.order.iter().map(|n| &self.domains[n])
    }

    /// Domains that are not merely supplementary to another domain.
    pub fn primary(&self) -> impl Iterator<Item = &Domain> {
        let supplementary: HashSet<&str> = self
            .domains
            .values()
            .filter_map(|d| d.supplementary_domain.as_deref())
            .collect();
        self.iter()
            .filter(move |d| !supplementary.contains(d.name.as_str()))
    }
}

/// Singular → plural table. Irregular forms ("mice", "hovercraft") make an
/// explicit table the only reliable option.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    plurals: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct LexiconRow {
    singular: String,
    plural: String,
}

impl Lexicon {
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lex = Lexicon::default();
        lex.extend_from_csv_str(text)?;
        Ok(lex)
    }

    pub fn extend_from_csv_str(&mut self, text: &str) -> Result<()> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for row in reader.deserialize::<LexiconRow>() {
            let row = row?;
            self.insert(row.singular, row.plural);
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn insert(&mut self, singular: impl Into<String>, plural: impl Into<String>) {
        self.plurals.insert(singular.into(), plural.into());
    }

    pub fn merge(&mut self, other: &Lexicon) {
        for (s, p) in &other.plurals {
            self.plurals.insert(s.clone(), p.clone());
        }
    }

    pub fn plural(&self, singular: &str) -> Result<&str> {
        self.plurals
            .get(singular)
            .map(String::as_str)
            .ok_or_else(|| Error::Prompt(format!("`{singular}` is missing from the pluralization lexicon")))
    }

    pub fn contains(&self, singular: &str) -> bool {
        self.plurals.contains_key(singular)
    }
}
