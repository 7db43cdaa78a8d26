//! `analyze`: sign tests for pair judgments; correlations, split-half
//! reliability and bootstrap comparisons for argument ratings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use induction::agents::JudgmentRecord;
use induction::similarity::{load_similarity_file, LoadOptions};
use induction::stats::{
    bootstrap_compare, sign_test, spearman, split_half_reliability, Direction, ReliabilityOptions, SignSeries,
};
use induction::stimuli::{Experiment, SuiteManifest};
use induction::{NormStore, Scale, ScmModel, ScmParams};
use serde::{Deserialize, Serialize};

use crate::config::{Provenance, RunConfig};
use crate::human::HumanResponses;
use crate::run::ResultsLog;

pub const HUMAN: &str = "human";
pub const SCM: &str = "scm";
pub const GPT_SCM: &str = "gpt-scm";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignRow {
    pub source: String,
    pub domain: String,
    pub phenomenon: String,
    pub n: usize,
    pub plus: usize,
    pub minus: usize,
    pub ties: usize,
    pub missing: usize,
    pub p: Option<f64>,
    pub direction: Option<Direction>,
    pub marker: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub source: String,
    pub phenomenon: String,
    pub bin: u8,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub split: String,
    pub set: String,
    pub model: String,
    pub against: String,
    pub rho: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityRow {
    pub split: String,
    pub set: String,
    pub mean: f64,
    pub se: f64,
    pub splits: usize,
    pub stimuli: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRow {
    pub split: String,
    pub set: String,
    pub model_a: String,
    pub model_b: String,
    pub proportion: f64,
    pub strict: f64,
    pub ties: usize,
    pub resamples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub provenance: Provenance,
    pub experiment: Experiment,
    pub alpha: f64,
    pub sources: Vec<String>,
    #[serde(default)]
    pub sign_tests: Vec<SignRow>,
    #[serde(default)]
    pub histogram: Vec<HistogramRow>,
    #[serde(default)]
    pub correlations: Vec<CorrelationRow>,
    #[serde(default)]
    pub reliability: Vec<ReliabilityRow>,
    #[serde(default)]
    pub bootstrap: Vec<BootstrapRow>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl Analysis {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Similarity matrices elicited from a model, one `<domain>_similarity.csv`
/// per primary domain on a 0–20 scale.
pub fn load_gpt_scm(store: &NormStore, dir: &Path) -> Result<NormStore> {
    let mut out = store.clone();
    for d in store.domains().primary() {
        let path = dir.join(format!("{}_similarity.csv", d.name.to_lowercase()));
        let m = load_similarity_file(&path, d, Scale::RATING_0_20, LoadOptions::default())
            .with_context(|| format!("loading {}", path.display()))?;
        out = out.with_similarity(&d.name, m)?;
    }
    Ok(out)
}

fn list(ids: &[&str]) -> String {
    const SHOWN: usize = 20;
    let mut s = ids.iter().take(SHOWN).copied().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(" and {} more", ids.len() - SHOWN));
    }
    s
}

/// Indexes a results log by stimulus, failing on any stimulus that is
/// missing, unknown or recorded twice.
pub fn align<'a>(log: &'a ResultsLog, suite: &SuiteManifest) -> Result<HashMap<&'a str, &'a JudgmentRecord>> {
    let agent = &log.header.agent_id;
    let ids: BTreeSet<&str> = suite.stimulus_ids().into_iter().collect();
    let mut map = HashMap::new();
    let mut unknown = Vec::new();
    let mut dup = Vec::new();
    for r in &log.records {
        if !ids.contains(r.stimulus_id.as_str()) {
            unknown.push(r.stimulus_id.as_str());
        } else if map.insert(r.stimulus_id.as_str(), r).is_some() {
            dup.push(r.stimulus_id.as_str());
        }
    }
    let missing: Vec<&str> = suite
        .stimulus_ids()
        .into_iter()
        .filter(|id| !map.contains_key(id))
        .collect();
    let mut problems = Vec::new();
    if !missing.is_empty() {
        problems.push(format!("{} stimuli have no record: {}", missing.len(), list(&missing)));
    }
    if !unknown.is_empty() {
        problems.push(format!("{} records name stimuli not in the suite: {}", unknown.len(), list(&unknown)));
    }
    if !dup.is_empty() {
        problems.push(format!("{} stimuli recorded more than once: {}", dup.len(), list(&dup)));
    }
    if !problems.is_empty() {
        bail!("results for agent `{agent}` do not align with the suite: {}", problems.join("; "));
    }
    Ok(map)
}

pub struct AnalysisInputs<'a> {
    pub config: &'a RunConfig,
    pub suite: &'a SuiteManifest,
    pub results: &'a [ResultsLog],
    pub human: Option<&'a HumanResponses>,
    /// Norm store with elicited similarity matrices substituted.
    pub gpt_scm: Option<&'a NormStore>,
}

pub fn analyze(inputs: &AnalysisInputs<'_>) -> Result<Analysis> {
    let AnalysisInputs {
        config,
        suite,
        results,
        human,
        gpt_scm,
    } = *inputs;
    let suite_hash = suite.content_hash()?;
    let mut warnings = Vec::new();
    let mut aligned = Vec::new();
    for log in results {
        if log.header.provenance.suite_hash != suite_hash {
            bail!(
                "results for agent `{}` were produced from a different suite",
                log.header.agent_id
            );
        }
        aligned.push((log.header.agent_id.as_str(), align(log, suite)?));
    }
    if let Some(h) = human {
        let ids: BTreeSet<&str> = suite.stimulus_ids().into_iter().collect();
        let unknown: Vec<&str> = h
            .rows
            .iter()
            .map(|r| r.stimulus_id.as_str())
            .filter(|id| !ids.contains(id))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if !unknown.is_empty() {
            bail!("human responses name stimuli not in the suite: {}", list(&unknown));
        }
    }
    let mut a = Analysis {
        provenance: Provenance {
            seed: config.seed,
            config_hash: config.hash(),
            suite_hash,
        },
        experiment: suite.header.experiment(),
        alpha: config.analysis.alpha,
        sources: aligned.iter().map(|(id, _)| id.to_string()).collect(),
        sign_tests: Vec::new(),
        histogram: Vec::new(),
        correlations: Vec::new(),
        reliability: Vec::new(),
        bootstrap: Vec::new(),
        warnings: Vec::new(),
    };
    if human.is_some() {
        a.sources.push(HUMAN.into());
    }
    match a.experiment {
        Experiment::Exp1 => {
            if gpt_scm.is_some() {
                warnings.push("GPT-SCM scores apply to argument ratings only; ignored for pair judgments".into());
            }
            exp1(&mut a, suite, &aligned, human)?;
        }
        Experiment::Exp2 => exp2(&mut a, config, suite, &aligned, human, gpt_scm, &mut warnings)?,
    }
    a.warnings.extend(warnings);
    Ok(a)
}

type Aligned<'a> = Vec<(&'a str, HashMap<&'a str, &'a JudgmentRecord>)>;

/// Unit-width bin centred on 1..6 holding a canonical 1–6 value; a value on
/// an edge goes to the upper bin.
fn bin(v: f64) -> u8 {
    (v + 0.5).floor().clamp(1.0, 6.0) as u8
}

fn exp1(a: &mut Analysis, suite: &SuiteManifest, aligned: &Aligned<'_>, human: Option<&HumanResponses>) -> Result<()> {
    // Splits in manifest order.
    let mut splits: Vec<(String, String)> = Vec::new();
    let mut members: HashMap<(String, String), Vec<&str>> = HashMap::new();
    for p in &suite.pairs {
        let key = (p.domain.clone(), p.phenomenon.tag().to_string());
        if !members.contains_key(&key) {
            splits.push(key.clone());
        }
        members.entry(key).or_default().push(&p.stimulus_id);
    }
    let phenomenon_of: HashMap<&str, &str> = suite
        .pairs
        .iter()
        .map(|p| (p.stimulus_id.as_str(), p.phenomenon.tag()))
        .collect();
    let by_stimulus: HashMap<&str, Vec<f64>> = human.map_or_else(HashMap::new, |h| {
        let mut m: HashMap<&str, Vec<f64>> = HashMap::new();
        for r in &h.rows {
            m.entry(r.stimulus_id.as_str()).or_default().push(r.value);
        }
        m
    });

    let push = |a: &mut Analysis, source: &str, split: &(String, String), series: SignSeries| {
        let test = sign_test(&series).ok();
        a.sign_tests.push(SignRow {
            source: source.into(),
            domain: split.0.clone(),
            phenomenon: split.1.clone(),
            n: series.n(),
            plus: series.plus(),
            minus: series.n() - series.plus(),
            ties: series.n_discarded_ties,
            missing: series.n_missing,
            p: test.as_ref().map(|t| t.value),
            direction: test.as_ref().map(|t| t.direction),
            marker: test.map_or("", |t| t.direction.marker(t.value, a.alpha)).into(),
        });
    };
    for (agent, records) in aligned {
        for split in &splits {
            let label = format!("{}/{}", split.0, split.1);
            let values = members[split].iter().map(|id| records[id].centered_preference());
            push(a, agent, split, SignSeries::from_values(&label, values, 0.0));
        }
        let mut hist: BTreeMap<(&str, u8), usize> = BTreeMap::new();
        for p in &suite.pairs {
            let r = records[p.stimulus_id.as_str()];
            if r.response_kind != induction::prompts::ResponseKind::Choice {
                continue;
            }
            if let Some(c) = r.centered_preference() {
                *hist.entry((phenomenon_of[p.stimulus_id.as_str()], bin(c + 3.5))).or_default() += 1;
            }
        }
        push_hist(a, agent, hist);
    }
    if human.is_some() {
        for split in &splits {
            let label = format!("{}/{}", split.0, split.1);
            let mut series = SignSeries::new(&label);
            for id in &members[split] {
                for v in by_stimulus.get(id).into_iter().flatten() {
                    series.push(Some(v - 3.5), 0.0);
                }
            }
            push(a, HUMAN, split, series);
        }
        let mut hist: BTreeMap<(&str, u8), usize> = BTreeMap::new();
        for (id, vs) in &by_stimulus {
            for v in vs {
                *hist.entry((phenomenon_of[id], bin(*v))).or_default() += 1;
            }
        }
        push_hist(a, HUMAN, hist);
    }
    Ok(())
}

fn push_hist(a: &mut Analysis, source: &str, hist: BTreeMap<(&str, u8), usize>) {
    let phenomena: BTreeSet<&str> = hist.keys().map(|(p, _)| *p).collect();
    for p in phenomena {
        for b in 1..=6u8 {
            a.histogram.push(HistogramRow {
                source: source.into(),
                phenomenon: p.into(),
                bin: b,
                count: hist.get(&(p, b)).copied().unwrap_or(0),
            });
        }
    }
}

const SETS: [&str; 3] = ["two_premise", "single_premise", "all"];

fn in_set(set: &str, premises: usize) -> bool {
    match set {
        "two_premise" => premises == 2,
        "single_premise" => premises == 1,
        _ => true,
    }
}

fn exp2(
    a: &mut Analysis,
    config: &RunConfig,
    suite: &SuiteManifest,
    aligned: &Aligned<'_>,
    human: Option<&HumanResponses>,
    gpt_scm: Option<&NormStore>,
    warnings: &mut Vec<String>,
) -> Result<()> {
    // Model name -> stimulus -> score.
    let mut models: Vec<(String, HashMap<&str, f64>)> = Vec::new();
    for (agent, records) in aligned {
        let scores = records
            .iter()
            .filter_map(|(id, r)| r.score().map(|s| (*id, s)))
            .collect();
        models.push((agent.to_string(), scores));
    }
    // Model strengths go on the 0-100 rating scale, as the SCM agent reports them.
    models.push((
        SCM.into(),
        suite
            .arguments
            .iter()
            .map(|s| (s.stimulus_id.as_str(), 100.0 * s.scm_strength))
            .collect(),
    ));
    if let Some(store) = gpt_scm {
        let mut scm: HashMap<String, ScmModel> = HashMap::new();
        for d in store.domains().primary() {
            scm.insert(d.name.clone(), ScmModel::new(store.similarity(&d.name)?, ScmParams::default())?);
        }
        let mut scores = HashMap::new();
        for s in &suite.arguments {
            let m = scm.get(&s.domain).with_context(|| format!("no GPT-SCM matrix for {}", s.domain))?;
            scores.insert(s.stimulus_id.as_str(), 100.0 * m.strength(&s.argument)?);
        }
        a.sources.insert(a.sources.len() - usize::from(human.is_some()), GPT_SCM.into());
        models.push((GPT_SCM.into(), scores));
    }
    let means = human.map(HumanResponses::means);
    let raters: Vec<&str> = human.map_or_else(Vec::new, |h| {
        h.rows
            .iter()
            .map(|r| r.participant_id.as_str())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    });
    let mut rating: HashMap<(&str, &str), f64> = HashMap::new();
    if let Some(h) = human {
        for r in &h.rows {
            rating.insert((r.stimulus_id.as_str(), r.participant_id.as_str()), r.value);
        }
    }

    let mut splits: Vec<String> = Vec::new();
    for s in &suite.arguments {
        let name = s.split();
        if !splits.contains(&name) {
            splits.push(name);
        }
    }
    for split in &splits {
        for set in SETS {
            let ids: Vec<&str> = suite
                .arguments
                .iter()
                .filter(|s| &s.split() == split && in_set(set, s.argument.premises.len()))
                .map(|s| s.stimulus_id.as_str())
                .collect();
            if ids.is_empty() {
                continue;
            }
            let series = |scores: &HashMap<&str, f64>, other: &HashMap<&str, f64>| -> (Vec<f64>, Vec<f64>) {
                ids.iter()
                    .filter_map(|id| Some((*scores.get(id)?, *other.get(id)?)))
                    .unzip()
            };
            let mut correlate = |name: &str, x: &HashMap<&str, f64>, against: &str, y: &HashMap<&str, f64>| {
                let (xs, ys) = series(x, y);
                let rho = spearman(&xs, &ys).ok();
                if rho.is_none() {
                    warnings.push(format!("{split} {set}: no correlation between {name} and {against} (n = {})", xs.len()));
                }
                a.correlations.push(CorrelationRow {
                    split: split.clone(),
                    set: set.into(),
                    model: name.into(),
                    against: against.into(),
                    rho,
                    n: xs.len(),
                });
            };
            for i in 0..models.len() {
                for j in (i + 1)..models.len() {
                    correlate(&models[i].0, &models[i].1, &models[j].0, &models[j].1);
                }
            }
            let Some(means) = &means else { continue };
            let h: HashMap<&str, f64> = means.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            for (name, scores) in &models {
                correlate(name, scores, HUMAN, &h);
            }

            let table: Vec<Vec<Option<f64>>> = ids
                .iter()
                .map(|id| raters.iter().map(|p| rating.get(&(*id, *p)).copied()).collect())
                .collect();
            let seed = induction::rng::derive_seed(config.seed, &format!("reliability/{split}/{set}"));
            let opts = ReliabilityOptions {
                n_splits: config.analysis.reliability_splits,
                seed,
                spearman_brown: config.analysis.spearman_brown,
            };
            match split_half_reliability(&table, opts) {
                Ok(r) => a.reliability.push(ReliabilityRow {
                    split: split.clone(),
                    set: set.into(),
                    mean: r.value,
                    se: r.se.unwrap_or(0.0),
                    splits: r.resamples.unwrap_or(0),
                    stimuli: ids.len(),
                    seed,
                }),
                Err(e) => warnings.push(format!("{split} {set}: no split-half reliability: {e}")),
            }

            for i in 0..models.len() {
                for j in (i + 1)..models.len() {
                    let (na, sa) = (&models[i].0, &models[i].1);
                    let (nb, sb) = (&models[j].0, &models[j].1);
                    let rows: Vec<(f64, f64, f64)> = ids
                        .iter()
                        .filter_map(|id| Some((*sa.get(id)?, *sb.get(id)?, *h.get(id)?)))
                        .collect();
                    let xa: Vec<f64> = rows.iter().map(|r| r.0).collect();
                    let xb: Vec<f64> = rows.iter().map(|r| r.1).collect();
                    let xh: Vec<f64> = rows.iter().map(|r| r.2).collect();
                    let seed = induction::rng::derive_seed(config.seed, &format!("bootstrap/{split}/{set}/{na}/{nb}"));
                    let n = config.analysis.bootstrap_resamples;
                    match (bootstrap_compare(&xa, &xb, &xh, n, seed), bootstrap_compare(&xb, &xa, &xh, n, seed)) {
                        (Ok(ab), Ok(ba)) => {
                            for (m1, m2, o) in [(na, nb, ab), (nb, na, ba)] {
                                a.bootstrap.push(BootstrapRow {
                                    split: split.clone(),
                                    set: set.into(),
                                    model_a: m1.clone(),
                                    model_b: m2.clone(),
                                    proportion: o.proportion,
                                    strict: o.strict,
                                    ties: o.ties,
                                    resamples: o.resamples,
                                    seed,
                                });
                            }
                        }
                        (Err(e), _) | (_, Err(e)) => {
                            warnings.push(format!("{split} {set}: no bootstrap comparison of {na} and {nb}: {e}"))
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn csv_text<T: Serialize>(prov: &Provenance, rows: &[T]) -> Result<String> {
    let mut text = prov.comment();
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    text.push_str(&String::from_utf8(w.into_inner()?)?);
    Ok(text)
}

/// Writes `analysis.json` plus one CSV per table. Returns the paths written.
pub fn write_analysis(a: &Analysis, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        written.push(p);
        Ok(())
    };
    let mut json = serde_json::to_string_pretty(a)?;
    json.push('\n');
    put("analysis.json", json)?;
    let prov = &a.provenance;
    match a.experiment {
        Experiment::Exp1 => {
            put("sign_tests.csv", csv_text(prov, &a.sign_tests)?)?;
            put("preference_histogram.csv", csv_text(prov, &a.histogram)?)?;
        }
        Experiment::Exp2 => {
            put("correlations.csv", csv_text(prov, &a.correlations)?)?;
            put("reliability.csv", csv_text(prov, &a.reliability)?)?;
            put("bootstrap.csv", csv_text(prov, &a.bootstrap)?)?;
        }
    }
    Ok(written)
}

pub fn analysis_dir(config: &RunConfig) -> PathBuf {
    config.output_dir.join("analysis")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins() {
        assert_eq!(bin(1.0), 1);
        assert_eq!(bin(1.49), 1);
        assert_eq!(bin(3.5), 4);
        assert_eq!(bin(6.0), 6);
        assert_eq!(bin(0.7), 1);
    }

    #[test]
    fn sets() {
        assert!(in_set("two_premise", 2) && !in_set("two_premise", 1));
        assert!(in_set("single_premise", 1) && in_set("all", 1) && in_set("all", 2));
    }

    #[test]
    fn long_lists_are_abbreviated() {
        let ids: Vec<String> = (0..25).map(|i| format!("s{i}")).collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let s = list(&refs);
        assert!(s.starts_with("s0, s1") && s.ends_with("and 5 more"), "{s}");
    }
}
