//! Suite manifests: one JSON record per line, header first.
//!
//! The serialized form is the reproducibility contract. Regenerating with the
//! same seed, parameters and norms yields the same bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::exp1::{Exp1Params, SelectedPair};
use super::exp2::{Exp2Params, Exp2Split};
use super::templates::ConclusionKind;
use crate::argument::{Argument, ArgumentPair, Conclusion, Phenomenon};
use crate::domain::Lexicon;
use crate::error::{Error, Result};
use crate::store::NormStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Exp1,
    Exp2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum GenerationParams {
    Exp1(Exp1Params),
    Exp2(Exp2Params),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteHeader {
    pub suite_id: String,
    pub seed: u64,
    pub params: GenerationParams,
    /// sha256 over the similarity matrices the suite was generated from.
    pub norms_hash: String,
}

impl SuiteHeader {
    pub fn experiment(&self) -> Experiment {
        match self.params {
            GenerationParams::Exp1(_) => Experiment::Exp1,
            GenerationParams::Exp2(_) => Experiment::Exp2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStimulus {
    pub stimulus_id: String,
    pub phenomenon: Phenomenon,
    pub domain: String,
    pub stronger: Argument,
    pub weaker: Argument,
    pub scm_disparity: Option<f64>,
}

impl PairStimulus {
    pub fn pair(&self) -> ArgumentPair {
        ArgumentPair {
            pair_id: self.stimulus_id.clone(),
            phenomenon: self.phenomenon,
            domain: self.domain.clone(),
            stronger: self.stronger.clone(),
            weaker: self.weaker.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgumentStimulus {
    pub stimulus_id: String,
    pub domain: String,
    pub kind: ConclusionKind,
    pub argument: Argument,
    pub scm_strength: f64,
    /// For single-premise arguments, the two-premise arguments they came from.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
}

impl ArgumentStimulus {
    pub fn split(&self) -> String {
        split_name(&self.domain, self.kind)
    }
}

pub fn split_name(domain: &str, kind: ConclusionKind) -> String {
    let k = match kind {
        ConclusionKind::General => "general",
        ConclusionKind::Specific => "specific",
        ConclusionKind::Mixed => "mixed",
    };
    format!("{}-{k}", domain.to_lowercase())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub split: String,
    pub block: usize,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttentionCheck {
    Pair {
        id: String,
        stronger: Argument,
        weaker: Argument,
    },
    Rating {
        id: String,
        argument: Argument,
        min: f64,
        max: f64,
    },
}

impl AttentionCheck {
    pub fn id(&self) -> &str {
        match self {
            AttentionCheck::Pair { id, .. } | AttentionCheck::Rating { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line {
    Header(SuiteHeader),
    Pair(PairStimulus),
    Argument(ArgumentStimulus),
    Block(BlockRecord),
    Attention(AttentionCheck),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub header: SuiteHeader,
    pub pairs: Vec<PairStimulus>,
    pub arguments: Vec<ArgumentStimulus>,
    pub blocks: Vec<BlockRecord>,
    pub attention: Vec<AttentionCheck>,
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Hash of the primary domains' similarity matrices as serialized.
pub fn norms_hash(store: &NormStore) -> Result<String> {
    let mut h = Sha256::new();
    for d in store.domains().primary() {
        h.update(d.name.as_bytes());
        h.update(store.similarity(&d.name)?.to_csv_string().as_bytes());
    }
    Ok(hex(&h.finalize()))
}

impl SuiteManifest {
    fn assemble(
        seed: u64,
        params: GenerationParams,
        norms_hash: String,
        pairs: Vec<PairStimulus>,
        arguments: Vec<ArgumentStimulus>,
        blocks: Vec<BlockRecord>,
        attention: Vec<AttentionCheck>,
    ) -> Result<Self> {
        let mut m = SuiteManifest {
            header: SuiteHeader {
                suite_id: String::new(),
                seed,
                params,
                norms_hash,
            },
            pairs,
            arguments,
            blocks,
            attention,
        };
        let body = m.to_jsonl()?;
        let exp = match m.header.experiment() {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2 => "exp2",
        };
        m.header.suite_id = format!("{exp}-{seed}-{}", &hex(&Sha256::digest(body.as_bytes()))[..12]);
        Ok(m)
    }

    pub fn exp1(store: &NormStore, params: Exp1Params, seed: u64, selected: Vec<SelectedPair>) -> Result<Self> {
        let pairs = selected
            .into_iter()
            .map(|s| PairStimulus {
                stimulus_id: s.pair.pair_id,
                phenomenon: s.pair.phenomenon,
                domain: s.pair.domain,
                stronger: s.pair.stronger,
                weaker: s.pair.weaker,
                scm_disparity: s.scm_disparity,
            })
            .collect();
        let attention = packaged_attention(Experiment::Exp1)?;
        Self::assemble(seed, GenerationParams::Exp1(params), norms_hash(store)?, pairs, vec![], vec![], attention)
    }

    pub fn exp2(store: &NormStore, params: Exp2Params, seed: u64, splits: Vec<Exp2Split>) -> Result<Self> {
        let mut arguments = Vec::new();
        let mut blocks = Vec::new();
        for s in splits {
            let split = split_name(&s.domain, s.kind);
            let two_ids: Vec<String> = (1..=s.two_premise.len()).map(|i| format!("{split}-2p-{i:03}")).collect();
            for (a, id) in s.two_premise.into_iter().zip(&two_ids) {
                arguments.push(ArgumentStimulus {
                    stimulus_id: id.clone(),
                    domain: s.domain.clone(),
                    kind: s.kind,
                    argument: a.argument,
                    scm_strength: a.scm_strength,
                    sources: vec![],
                });
            }
            for (i, (a, src)) in s.single_premise.into_iter().enumerate() {
                arguments.push(ArgumentStimulus {
                    stimulus_id: format!("{split}-1p-{:03}", i + 1),
                    domain: s.domain.clone(),
                    kind: s.kind,
                    argument: a.argument,
                    scm_strength: a.scm_strength,
                    sources: src.iter().map(|&j| two_ids[j].clone()).collect(),
                });
            }
            for (b, members) in s.blocks.blocks.iter().enumerate() {
                blocks.push(BlockRecord {
                    split: split.clone(),
                    block: b + 1,
                    members: members.iter().map(|&j| two_ids[j].clone()).collect(),
                });
            }
        }
        let attention = packaged_attention(Experiment::Exp2)?;
        Self::assemble(seed, GenerationParams::Exp2(params), norms_hash(store)?, vec![], arguments, blocks, attention)
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        let mut push = |line: Line| -> Result<()> {
            out.push_str(&serde_json::to_string(&line)?);
            out.push('\n');
            Ok(())
        };
        push(Line::Header(self.header.clone()))?;
        for p in &self.pairs {
            push(Line::Pair(p.clone()))?;
        }
        for a in &self.arguments {
            push(Line::Argument(a.clone()))?;
        }
        for b in &self.blocks {
            push(Line::Block(b.clone()))?;
        }
        for a in &self.attention {
            push(Line::Attention(a.clone()))?;
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut header = None;
        let (mut pairs, mut arguments, mut blocks, mut attention) = (vec![], vec![], vec![], vec![]);
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(line)
                .map_err(|e| Error::Schema(format!("manifest line {}: {e}", n + 1)))?;
            match parsed {
                Line::Header(h) if header.is_none() && n == 0 => header = Some(h),
                Line::Header(_) => return Err(Error::Schema(format!("manifest line {}: unexpected header", n + 1))),
                Line::Pair(p) => pairs.push(p),
                Line::Argument(a) => arguments.push(a),
                Line::Block(b) => blocks.push(b),
                Line::Attention(a) => attention.push(a),
            }
        }
        let header = header.ok_or_else(|| Error::Schema("manifest has no header line".into()))?;
        Ok(SuiteManifest {
            header,
            pairs,
            arguments,
            blocks,
            attention,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_jsonl(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_jsonl()?)?)
    }

    /// sha256 of the serialized manifest.
    pub fn content_hash(&self) -> Result<String> {
        Ok(hex(&Sha256::digest(self.to_jsonl()?.as_bytes())))
    }

    pub fn stimulus_ids(&self) -> Vec<&str> {
        self.pairs
            .iter()
            .map(|p| p.stimulus_id.as_str())
            .chain(self.arguments.iter().map(|a| a.stimulus_id.as_str()))
            .collect()
    }
}

#[derive(Deserialize)]
struct RawArgument {
    premises: Vec<String>,
    conclusion: Conclusion,
}

impl RawArgument {
    fn into_argument(self) -> Argument {
        Argument {
            domain: "fixture".into(),
            premises: self.premises,
            conclusion: self.conclusion,
        }
    }
}

#[derive(Deserialize)]
struct RawPairCheck {
    id: String,
    stronger: RawArgument,
    weaker: RawArgument,
}

#[derive(Deserialize)]
struct RawRatingCheck {
    id: String,
    argument: RawArgument,
    min: f64,
    max: f64,
}

#[derive(Deserialize)]
struct AttentionFile {
    #[serde(default)]
    lexicon: BTreeMap<String, String>,
    #[serde(default)]
    exp1: Vec<RawPairCheck>,
    #[serde(default)]
    exp2: Vec<RawRatingCheck>,
}

pub const ATTENTION_FIXTURES: &str = include_str!("../../data/fixtures/attention.toml");

/// Parses an attention-check fixture file, returning the checks for
/// `experiment` and the extra lexicon entries they need.
pub fn parse_attention(text: &str, experiment: Experiment) -> Result<(Vec<AttentionCheck>, Lexicon)> {
    let file: AttentionFile = toml::from_str(text)?;
    let mut lex = Lexicon::default();
    for (s, p) in file.lexicon {
        lex.insert(s, p);
    }
    let checks = match experiment {
        Experiment::Exp1 => file
            .exp1
            .into_iter()
            .map(|c| AttentionCheck::Pair {
                id: c.id,
                stronger: c.stronger.into_argument(),
                weaker: c.weaker.into_argument(),
            })
            .collect(),
        Experiment::Exp2 => file
            .exp2
            .into_iter()
            .map(|c| {
                if !(0.0..=100.0).contains(&c.min) || c.min > c.max || c.max > 100.0 {
                    return Err(Error::Schema(format!("attention check {}: bad range", c.id)));
                }
                Ok(AttentionCheck::Rating {
                    id: c.id,
                    argument: c.argument.into_argument(),
                    min: c.min,
                    max: c.max,
                })
            })
            .collect::<Result<_>>()?,
    };
    Ok((checks, lex))
}

pub fn packaged_attention(experiment: Experiment) -> Result<Vec<AttentionCheck>> {
    Ok(parse_attention(ATTENTION_FIXTURES, experiment)?.0)
}

/// Lexicon entries used only by the packaged attention checks.
pub fn attention_lexicon() -> Lexicon {
    parse_attention(ATTENTION_FIXTURES, Experiment::Exp1)
        .expect("packaged fixtures parse")
        .1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimuli::exp1::generate_exp1;

    fn small_exp1() -> (NormStore, Exp1Params) {
        let store = crate::store::packaged::exp1().unwrap();
        let params = Exp1Params {
            pool_size: 1500,
            ..Exp1Params::default()
        };
        (store, params)
    }

    #[test]
    fn manifest_round_trips_and_is_deterministic() {
        let (store, params) = small_exp1();
        let a = SuiteManifest::exp1(&store, params, 5, generate_exp1(&store, &params, 5).unwrap()).unwrap();
        let b = SuiteManifest::exp1(&store, params, 5, generate_exp1(&store, &params, 5).unwrap()).unwrap();
        let text = a.to_jsonl().unwrap();
        assert_eq!(text, b.to_jsonl().unwrap());
        assert_eq!(SuiteManifest::from_jsonl(&text).unwrap(), a);
        assert!(text.starts_with("{\"record\":\"header\""));
        assert_eq!(a.attention.len(), 4);

        let c = SuiteManifest::exp1(&store, params, 6, generate_exp1(&store, &params, 6).unwrap()).unwrap();
        assert_ne!(c.header.suite_id, a.header.suite_id);
    }

    #[test]
    fn header_required() {
        assert!(SuiteManifest::from_jsonl("").is_err());
        assert!(SuiteManifest::from_jsonl("{\"record\":\"block\",\"split\":\"x\",\"block\":1,\"members\":[]}").is_err());
    }

    #[test]
    fn attention_fixtures_parse() {
        let exp2 = packaged_attention(Experiment::Exp2).unwrap();
        assert_eq!(exp2.len(), 4);
        let lex = attention_lexicon();
        assert_eq!(lex.plural("gorilla").unwrap(), "gorillas");
    }
}
