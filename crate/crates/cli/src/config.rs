//! Run configuration and provenance.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use induction::agents::AgentConfig;
use induction::prompts::{PromptEnv, PromptSpec, PromptTemplates};
use induction::similarity::LoadOptions;
use induction::stimuli::{sha256_hex, Exp1Params, Exp2Params, Experiment};
use induction::store::packaged;
use induction::NormStore;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Exp1,
    Exp2,
    SimilarityExtraction,
}

impl ExperimentKind {
    /// The stimulus experiment whose norms and prompts this run uses.
    pub fn stimuli(self) -> Experiment {
        match self {
            ExperimentKind::Exp1 | ExperimentKind::SimilarityExtraction => Experiment::Exp1,
            ExperimentKind::Exp2 => Experiment::Exp2,
        }
    }
}

/// Where to read norms from. Omitted means the packaged synthetic norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormPaths {
    pub manifest: PathBuf,
    pub norms_dir: PathBuf,
    pub lexicon_dir: PathBuf,
    #[serde(default)]
    pub symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub alpha: f64,
    pub reliability_splits: usize,
    pub bootstrap_resamples: usize,
    pub spearman_brown: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            alpha: 0.05,
            reliability_splits: 100,
            bootstrap_resamples: 1000,
            spearman_brown: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttentionConfig {
    /// Correct attention checks needed to keep a participant.
    pub min_correct: usize,
}

impl Default for AttentionConfig {
    fn default() -> Self {
        AttentionConfig { min_correct: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norms: Option<NormPaths>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates_dir: Option<PathBuf>,
    /// Prompt design ID; defaults to the best design for the experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_spec: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp1: Option<Exp1Params>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp2: Option<Exp2Params>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub attention: AttentionConfig,
    #[serde(default)]
    pub agents: Vec<AgentConfig>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn new(experiment: ExperimentKind, seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            experiment,
            seed,
            output_dir: output_dir.into(),
            norms: None,
            templates_dir: None,
            prompt_spec: None,
            exp1: None,
            exp2: None,
            analysis: AnalysisConfig::default(),
            attention: AttentionConfig::default(),
            agents: Vec::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).context("parsing run config")?;
        Ok(c)
    }

    /// Loads a config, resolving relative paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut c = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut c.output_dir);
        if let Some(n) = &mut c.norms {
            fix(&mut n.manifest);
            fix(&mut n.norms_dir);
            fix(&mut n.lexicon_dir);
        }
        if let Some(t) = &mut c.templates_dir {
            fix(t);
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(n) = &self.norms {
            for p in [&n.manifest, &n.norms_dir, &n.lexicon_dir] {
                if !p.exists() {
                    bail!("configured path {} does not exist", p.display());
                }
            }
        }
        if let Some(t) = &self.templates_dir {
            if !t.is_dir() {
                bail!("templates directory {} does not exist", t.display());
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for a in &self.agents {
            a.validate()?;
            if !ids.insert(a.id.as_str()) {
                bail!("agent id `{}` appears twice", a.id);
            }
            if [crate::analyze::HUMAN, crate::analyze::SCM, crate::analyze::GPT_SCM].contains(&a.id.as_str()) {
                bail!("agent id `{}` is reserved for a built-in source", a.id);
            }
        }
        if !(0.0..1.0).contains(&self.analysis.alpha) || self.analysis.alpha == 0.0 {
            bail!("analysis alpha must be in (0, 1)");
        }
        if self.experiment != ExperimentKind::SimilarityExtraction {
            self.spec()?.validate(&self.templates()?)?;
        }
        Ok(())
    }

    /// Canonical hash of the configuration.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }

    pub fn store(&self) -> Result<NormStore> {
        let store = match &self.norms {
            Some(n) => NormStore::load_dir(
                &n.manifest,
                &n.norms_dir,
                &n.lexicon_dir,
                LoadOptions {
                    symmetrize: n.symmetrize,
                },
            )?,
            None => match self.experiment.stimuli() {
                Experiment::Exp1 => packaged::exp1()?,
                Experiment::Exp2 => packaged::exp2()?,
            },
        };
        Ok(store)
    }

    pub fn templates(&self) -> Result<PromptTemplates> {
        Ok(match &self.templates_dir {
            Some(dir) => PromptTemplates::load_dir(dir)?,
            None => PromptTemplates::packaged(),
        })
    }

    pub fn prompt_env(&self, store: &NormStore) -> Result<PromptEnv> {
        Ok(PromptEnv::new(self.templates()?, store))
    }

    pub fn spec(&self) -> Result<PromptSpec> {
        let exp = self.experiment.stimuli();
        Ok(match &self.prompt_spec {
            Some(id) => PromptSpec::parse(exp, id)?,
            None => match exp {
                Experiment::Exp1 => PromptSpec::exp1_best(),
                Experiment::Exp2 => PromptSpec::exp2_best(),
            },
        })
    }

    pub fn agent(&self, id: &str) -> Result<&AgentConfig> {
        self.agents
            .iter()
            .find(|a| a.id == id)
            .with_context(|| format!("no agent `{id}` in the config"))
    }

    pub fn exp1_params(&self) -> Exp1Params {
        self.exp1.unwrap_or_default()
    }

    pub fn exp2_params(&self) -> Exp2Params {
        self.exp2.unwrap_or_default()
    }
}

/// Embedded in every output so a file can be traced to its inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub suite_hash: String,
}

impl Provenance {
    /// A one-line comment for tabular files.
    pub fn comment(&self) -> String {
        format!(
            "# seed={} config={} suite={}\n",
            self.seed, self.config_hash, self.suite_hash
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::from_toml_str("experiment = \"exp1\"\nseed = 3\n").unwrap();
        assert_eq!(c.output_dir, PathBuf::from("out"));
        assert_eq!(c.attention.min_correct, 3);
        c.validate().unwrap();
        assert_eq!(c.spec().unwrap(), PromptSpec::exp1_best());
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(RunConfig::from_toml_str("experiment = \"exp2\"\n").is_err());
    }

    #[test]
    fn missing_norm_files_fail_validation() {
        let c = RunConfig::from_toml_str(
            "experiment = \"exp1\"\nseed = 1\n[norms]\nmanifest = \"/nope.toml\"\nnorms_dir = \"/nope\"\nlexicon_dir = \"/nope\"\n",
        )
        .unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn agents_parse() {
        let c = RunConfig::from_toml_str(
            r#"
experiment = "exp2"
seed = 7
prompt_spec = "S3-C1-A1-Q1-O1-T1"

[[agents]]
id = "scm-agent"
kind = "scm"

[[agents]]
id = "fifty"
kind = "scripted"
script = { mode = "constant", reply = "50" }

[[agents]]
id = "gpt"
kind = "remote-chat"
model = "gpt-4"
request_rate_limit = 2.0
"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.agents.len(), 3);
        assert_eq!(c.agent("gpt").unwrap().request_rate_limit, 2.0);
        assert_ne!(c.hash(), RunConfig::new(ExperimentKind::Exp2, 7, "out").hash());
    }

    #[test]
    fn reserved_agent_ids_are_refused() {
        let mut c = RunConfig::new(ExperimentKind::Exp2, 7, "out");
        c.agents.push(AgentConfig::scm("gpt-scm"));
        assert!(c.validate().unwrap_err().to_string().contains("reserved"));
    }
}
