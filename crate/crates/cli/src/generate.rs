//! `generate`: suite manifests plus a per-split count report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use induction::stimuli::{generate_exp1, generate_exp2, Experiment, SuiteManifest};
use induction::NormStore;

use crate::config::{ExperimentKind, Provenance, RunConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCount {
    pub split: String,
    pub two_premise: usize,
    pub single_premise: usize,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub manifest: SuiteManifest,
    pub counts: Vec<SplitCount>,
    pub suite_path: PathBuf,
    pub report_path: PathBuf,
}

impl Generated {
    pub fn total(&self) -> usize {
        self.counts.iter().map(|c| c.two_premise + c.single_premise).sum()
    }
}

pub fn suite_path(out: &Path, exp: Experiment) -> PathBuf {
    let name = match exp {
        Experiment::Exp1 => "exp1",
        Experiment::Exp2 => "exp2",
    };
    out.join(format!("suite-{name}.jsonl"))
}

pub fn build_manifest(config: &RunConfig, store: &NormStore) -> Result<SuiteManifest> {
    Ok(match config.experiment {
        ExperimentKind::Exp1 => {
            let params = config.exp1_params();
            let pairs = generate_exp1(store, &params, config.seed).context("generating exp1 pairs")?;
            SuiteManifest::exp1(store, params, config.seed, pairs)?
        }
        ExperimentKind::Exp2 => {
            let params = config.exp2_params();
            let splits = generate_exp2(store, &params, config.seed).context("generating exp2 arguments")?;
            SuiteManifest::exp2(store, params, config.seed, splits)?
        }
        ExperimentKind::SimilarityExtraction => bail!("similarity extraction has no stimulus suite"),
    })
}

/// Counts per split: pairs for Exp1, two- and single-premise arguments for
/// Exp2.
pub fn split_counts(manifest: &SuiteManifest) -> Vec<SplitCount> {
    let mut counts: BTreeMap<String, SplitCount> = BTreeMap::new();
    let mut bump = |split: String, two: bool| {
        let e = counts.entry(split.clone()).or_insert(SplitCount {
            split,
            two_premise: 0,
            single_premise: 0,
        });
        if two {
            e.two_premise += 1;
        } else {
            e.single_premise += 1;
        }
    };
    for p in &manifest.pairs {
        bump(format!("{}/{}", p.domain.to_lowercase(), p.phenomenon.tag()), true);
    }
    for a in &manifest.arguments {
        bump(a.split(), a.argument.premises.len() == 2);
    }
    counts.into_values().collect()
}

pub fn cmd_generate(config: &RunConfig) -> Result<Generated> {
    config.validate()?;
    let store = config.store()?;
    let manifest = build_manifest(config, &store)?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let suite = suite_path(out, manifest.header.experiment());
    manifest.save(&suite)?;

    let counts = split_counts(&manifest);
    let prov = Provenance {
        seed: config.seed,
        config_hash: config.hash(),
        suite_hash: manifest.content_hash()?,
    };
    let mut text = prov.comment();
    let mut w = csv::Writer::from_writer(Vec::new());
    match manifest.header.experiment() {
        Experiment::Exp1 => {
            w.write_record(["split", "pairs"])?;
            for c in &counts {
                w.write_record([c.split.clone(), c.two_premise.to_string()])?;
            }
        }
        Experiment::Exp2 => {
            w.write_record(["split", "two_premise", "single_premise"])?;
            for c in &counts {
                w.write_record([c.split.clone(), c.two_premise.to_string(), c.single_premise.to_string()])?;
            }
        }
    }
    text.push_str(&String::from_utf8(w.into_inner()?)?);
    let report = out.join(format!("generation-{}.csv", suite.file_stem().unwrap().to_string_lossy()));
    std::fs::write(&report, text)?;
    Ok(Generated {
        manifest,
        counts,
        suite_path: suite,
        report_path: report,
    })
}
