//! A loaded set of domains with their norms and pluralization lexicon.
//!
//! Stores are immutable once built and can be shared freely between threads.
//! On disk a store is a manifest plus a norms directory holding
//! `<domain>_similarity.csv` and `<domain>_typicality.csv` (lower-cased domain
//! name) and a lexicon directory of `<domain>.csv` files.

use std::collections::BTreeMap;
use std::path::Path;

use crate::domain::{Domain, DomainSet, Lexicon};
use crate::error::{Error, Result};
use crate::similarity::{load_similarity, load_typicality, LoadOptions, Scale, SimilarityMatrix, TypicalityVector};

#[derive(Debug, Clone)]
pub struct DomainNorms {
    pub similarity: SimilarityMatrix,
    pub typicality: Option<TypicalityVector>,
}

#[derive(Debug, Clone)]
pub struct NormStore {
    domains: DomainSet,
    norms: BTreeMap<String, DomainNorms>,
    lexicon: Lexicon,
}

/// Raw norm texts for one domain, before parsing.
pub struct NormSource<'a> {
    pub similarity: Option<&'a str>,
    pub typicality: Option<&'a str>,
}

impl NormStore {
    pub fn from_sources<'a>(
        domains: DomainSet,
        sources: impl Fn(&Domain) -> NormSource<'a>,
        lexicon: Lexicon,
        scale: Scale,
        options: LoadOptions,
    ) -> Result<Self> {
        let mut norms = BTreeMap::new();
        for d in domains.iter() {
            let src = sources(d);
            let Some(sim_text) = src.similarity else { continue };
            let similarity = load_similarity(sim_text, d, scale, options)
                .map_err(|e| Error::Schema(format!("{} similarity: {e}", d.name)))?;
            let typicality = src
                .typicality
                .map(|t| load_typicality(t, d))
                .transpose()
                .map_err(|e| Error::Schema(format!("{} typicality: {e}", d.name)))?;
            norms.insert(d.name.clone(), DomainNorms { similarity, typicality });
        }
        Ok(NormStore {
            domains,
            norms,
            lexicon,
        })
    }

    /// Loads a manifest and looks up each domain's files in `norms_dir` and
    /// `lexicon_dir`. Domains without a similarity file carry no norms.
    pub fn load_dir(
        manifest: impl AsRef<Path>,
        norms_dir: impl AsRef<Path>,
        lexicon_dir: impl AsRef<Path>,
        options: LoadOptions,
    ) -> Result<Self> {
        let domains = DomainSet::load(manifest)?;
        let read = |p: std::path::PathBuf| -> Result<Option<String>> {
            if p.exists() {
                Ok(Some(std::fs::read_to_string(p)?))
            } else {
                Ok(None)
            }
        };
        let mut texts = BTreeMap::new();
        let mut lexicon = Lexicon::default();
        for d in domains.iter() {
            let stem = d.name.to_lowercase();
            let sim = read(norms_dir.as_ref().join(format!("{stem}_similarity.csv")))?;
            let typ = read(norms_dir.as_ref().join(format!("{stem}_typicality.csv")))?;
            texts.insert(d.name.clone(), (sim, typ));
            if let Some(lex) = read(lexicon_dir.as_ref().join(format!("{stem}.csv")))? {
                lexicon.extend_from_csv_str(&lex)?;
            }
        }
        if let Some(fruits) = read(lexicon_dir.as_ref().join("fruits.csv"))? {
            lexicon.extend_from_csv_str(&fruits)?;
        }
        Self::from_sources(
            domains,
            |d| {
                let (s, t) = &texts[&d.name];
                NormSource {
                    similarity: s.as_deref(),
                    typicality: t.as_deref(),
                }
            },
            lexicon,
            Scale::RATING_0_20,
            options,
        )
    }

    pub fn domains(&self) -> &DomainSet {
        &self.domains
    }

    pub fn domain(&self, name: &str) -> Result<&Domain> {
        self.domains.get(name)
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn norms(&self, domain: &str) -> Result<&DomainNorms> {
        self.norms
            .get(domain)
            .ok_or_else(|| Error::Schema(format!("no norms loaded for domain {domain}")))
    }

    pub fn similarity(&self, domain: &str) -> Result<&SimilarityMatrix> {
        Ok(&self.norms(domain)?.similarity)
    }

    pub fn typicality(&self, domain: &str) -> Result<&TypicalityVector> {
        self.norms(domain)?
            .typicality
            .as_ref()
            .ok_or_else(|| Error::Schema(format!("no typicality norms for domain {domain}")))
    }

    /// Replaces one domain's similarity matrix, e.g. with ratings elicited
    /// from an agent.
    pub fn with_similarity(&self, domain: &str, matrix: SimilarityMatrix) -> Result<NormStore> {
        let mut out = self.clone();
        let entry = out
            .norms
            .get_mut(domain)
            .ok_or_else(|| Error::Schema(format!("no norms loaded for domain {domain}")))?;
        if matrix.domain() != entry.similarity.domain() {
            return Err(Error::Schema(format!("replacement matrix does not cover domain {domain}")));
        }
        entry.similarity = matrix;
        Ok(out)
    }
}

/// The synthetic norms and manifests shipped with the crate.
pub mod packaged {
    use super::*;

    pub const EXP1_DOMAINS: &str = include_str!("../data/exp1_domains.toml");
    pub const EXP2_DOMAINS: &str = include_str!("../data/exp2_domains.toml");

    const NORMS: &[(&str, &str, &str)] = &[
        (
            "Mammals",
            include_str!("../data/norms/mammals_similarity.csv"),
            include_str!("../data/norms/mammals_typicality.csv"),
        ),
        (
            "Birds",
            include_str!("../data/norms/birds_similarity.csv"),
            include_str!("../data/norms/birds_typicality.csv"),
        ),
        (
            "Vehicles",
            include_str!("../data/norms/vehicles_similarity.csv"),
            include_str!("../data/norms/vehicles_typicality.csv"),
        ),
    ];

    const LEXICONS: &[&str] = &[
        include_str!("../data/lexicon/mammals.csv"),
        include_str!("../data/lexicon/birds.csv"),
        include_str!("../data/lexicon/vehicles.csv"),
        include_str!("../data/lexicon/reptiles.csv"),
        include_str!("../data/lexicon/insects.csv"),
        include_str!("../data/lexicon/tools.csv"),
        include_str!("../data/lexicon/fruits.csv"),
    ];

    pub fn lexicon() -> Lexicon {
        let mut lex = Lexicon::default();
        for text in LEXICONS {
            lex.extend_from_csv_str(text).expect("packaged lexicon parses");
        }
        lex
    }

    fn store(manifest: &str) -> Result<NormStore> {
        NormStore::from_sources(
            DomainSet::from_toml_str(manifest)?,
            |d| {
                let found = NORMS.iter().find(|(n, _, _)| *n == d.name);
                NormSource {
                    similarity: found.map(|f| f.1),
                    typicality: found.map(|f| f.2),
                }
            },
            lexicon(),
            Scale::RATING_0_20,
            LoadOptions::default(),
        )
    }

    /// Domains and norms for the argument-pair experiment.
    pub fn exp1() -> Result<NormStore> {
        store(EXP1_DOMAINS)
    }

    /// Domains and norms for the argument-rating experiment.
    pub fn exp2() -> Result<NormStore> {
        store(EXP2_DOMAINS)
    }
}
