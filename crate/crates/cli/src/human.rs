//! `ingest-human`: validate a response file and drop participants who fail
//! the attention checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use induction::prompts::LabelOrder;
use induction::stimuli::{AttentionCheck, Experiment, SuiteManifest};
use serde::{Deserialize, Serialize};

use crate::config::{Provenance, RunConfig};

#[derive(Debug, Deserialize)]
struct RawRow {
    participant_id: String,
    stimulus_id: String,
    response: String,
    #[serde(default)]
    block: Option<String>,
    #[serde(default)]
    label_order: Option<String>,
    #[serde(default)]
    passed_attention_checks: Option<String>,
}

/// One retained response, on the canonical scale: for pairs 6 means the
/// theoretically stronger argument was judged much stronger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanResponse {
    pub participant_id: String,
    pub stimulus_id: String,
    pub value: f64,
    #[serde(default)]
    pub block: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HumanResponses {
    pub experiment: Experiment,
    pub participants: usize,
    pub excluded: Vec<String>,
    pub rows: Vec<HumanResponse>,
    /// Non-fatal findings, e.g. unusual block sizes.
    pub warnings: Vec<String>,
}

impl HumanResponses {
    pub fn retained(&self) -> usize {
        self.participants - self.excluded.len()
    }

    pub fn to_csv(&self, prov: &Provenance) -> Result<String> {
        let mut text = prov.comment();
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        text.push_str(&String::from_utf8(w.into_inner()?)?);
        Ok(text)
    }

    /// Reads a file written by [`HumanResponses::to_csv`].
    pub fn load_filtered(path: impl AsRef<Path>, experiment: Experiment) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let rows: Vec<HumanResponse> = r
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("parsing {}", path.display()))?;
        let participants = rows.iter().map(|r| &r.participant_id).collect::<BTreeSet<_>>().len();
        Ok(HumanResponses {
            experiment,
            participants,
            excluded: Vec::new(),
            rows,
            warnings: Vec::new(),
        })
    }

    /// Mean canonical value per stimulus.
    pub fn means(&self) -> BTreeMap<String, f64> {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for r in &self.rows {
            let e = acc.entry(r.stimulus_id.clone()).or_default();
            e.0 += r.value;
            e.1 += 1;
        }
        acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
    }
}

fn scale(exp: Experiment) -> (f64, f64) {
    match exp {
        Experiment::Exp1 => (1.0, 6.0),
        Experiment::Exp2 => (0.0, 100.0),
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

fn parse_order(s: &str) -> Option<LabelOrder> {
    match s.trim() {
        "stronger_first" | "sf" => Some(LabelOrder::StrongerFirst),
        "weaker_first" | "wf" => Some(LabelOrder::WeakerFirst),
        _ => None,
    }
}

fn check_passed(check: &AttentionCheck, value: f64) -> bool {
    match check {
        AttentionCheck::Pair { .. } => value > 3.5,
        AttentionCheck::Rating { min, max, .. } => (*min..=*max).contains(&value),
    }
}

/// Parses and filters a raw response file. Every malformed row is reported
/// with its line number before anything is returned.
pub fn ingest(text: &str, suite: &SuiteManifest, min_correct: usize) -> Result<HumanResponses> {
    let exp = suite.header.experiment();
    let (lo, hi) = scale(exp);
    let stimuli: BTreeSet<&str> = suite.stimulus_ids().into_iter().collect();
    let checks: HashMap<&str, &AttentionCheck> = suite.attention.iter().map(|c| (c.id(), c)).collect();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let mut errors = Vec::new();
    let mut rows = Vec::new();
    let mut correct: BTreeMap<String, usize> = BTreeMap::new();
    let mut flags: BTreeMap<String, bool> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for rec in reader.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                errors.push(format!("{e}"));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        let raw: RawRow = match rec.deserialize(Some(&headers)) {
            Ok(r) => r,
            Err(e) => {
                errors.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let mut bad = |msg: String| errors.push(format!("line {line}: {msg}"));
        if raw.participant_id.is_empty() {
            bad("empty participant_id".into());
            continue;
        }
        if !correct.contains_key(&raw.participant_id) {
            correct.insert(raw.participant_id.clone(), 0);
            order.push(raw.participant_id.clone());
        }
        if let Some(f) = raw.passed_attention_checks.as_deref().filter(|s| !s.is_empty()) {
            match parse_bool(f) {
                Some(b) => {
                    if flags.insert(raw.participant_id.clone(), b).is_some_and(|prev| prev != b) {
                        bad(format!("conflicting passed_attention_checks for {}", raw.participant_id));
                    }
                }
                None => bad(format!("passed_attention_checks `{f}` is not a boolean")),
            }
        }
        let Ok(value) = raw.response.parse::<f64>() else {
            bad(format!("response `{}` is not a number", raw.response));
            continue;
        };
        if !(lo..=hi).contains(&value) {
            bad(format!("response {value} outside [{lo}, {hi}]"));
            continue;
        }
        let label = match raw.label_order.as_deref().filter(|s| !s.is_empty()) {
            None => LabelOrder::WeakerFirst,
            Some(s) => match parse_order(s) {
                Some(o) => o,
                None => {
                    bad(format!("label_order `{s}` is not stronger_first or weaker_first"));
                    continue;
                }
            },
        };
        let value = match exp {
            Experiment::Exp1 => label.canonical(value),
            Experiment::Exp2 => value,
        };
        if let Some(check) = checks.get(raw.stimulus_id.as_str()) {
            if check_passed(check, value) {
                *correct.get_mut(&raw.participant_id).expect("inserted above") += 1;
            }
            continue;
        }
        if !stimuli.contains(raw.stimulus_id.as_str()) {
            bad(format!("unknown stimulus `{}`", raw.stimulus_id));
            continue;
        }
        rows.push(HumanResponse {
            participant_id: raw.participant_id,
            stimulus_id: raw.stimulus_id,
            value,
            block: raw.block.filter(|b| !b.is_empty()),
        });
    }
    if !errors.is_empty() {
        bail!("{} malformed rows:\n{}", errors.len(), errors.join("\n"));
    }

    let mut excluded = Vec::new();
    let mut missing_meta = Vec::new();
    for p in &order {
        let passed = match flags.get(p) {
            Some(&flag) => flag,
            None if !checks.is_empty() => correct[p] >= min_correct,
            None => {
                missing_meta.push(p.clone());
                continue;
            }
        };
        if !passed {
            excluded.push(p.clone());
        }
    }
    if !missing_meta.is_empty() {
        bail!(
            "no attention-check information for participants: {}",
            missing_meta.join(", ")
        );
    }
    let dropped: BTreeSet<&String> = excluded.iter().collect();
    rows.retain(|r| !dropped.contains(&r.participant_id));

    let mut warnings = Vec::new();
    let mut blocks: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for r in &rows {
        if let Some(b) = &r.block {
            *blocks.entry((r.participant_id.as_str(), b.as_str())).or_default() += 1;
        }
    }
    if let Some(typical) = mode(blocks.values().copied()) {
        for ((p, b), n) in &blocks {
            if *n != typical {
                warnings.push(format!("participant {p} block {b}: {n} responses, most blocks have {typical}"));
            }
        }
    }
    Ok(HumanResponses {
        experiment: exp,
        participants: order.len(),
        excluded,
        rows,
        warnings,
    })
}

fn mode(values: impl Iterator<Item = usize>) -> Option<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    counts.into_iter().max_by_key(|(v, c)| (*c, usize::MAX - v)).map(|(v, _)| v)
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub responses: HumanResponses,
    pub output: PathBuf,
}

pub fn filtered_path(out: &Path, exp: Experiment) -> PathBuf {
    let e = match exp {
        Experiment::Exp1 => "exp1",
        Experiment::Exp2 => "exp2",
    };
    out.join(format!("human-{e}.csv"))
}

pub fn cmd_ingest_human(config: &RunConfig, suite: &SuiteManifest, file: &Path, out: Option<PathBuf>) -> Result<Ingested> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let responses = ingest(&text, suite, config.attention.min_correct).with_context(|| format!("in {}", file.display()))?;
    let output = out.unwrap_or_else(|| filtered_path(&config.output_dir, suite.header.experiment()));
    if let Some(dir) = output.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let prov = Provenance {
        seed: config.seed,
        config_hash: config.hash(),
        suite_hash: suite.content_hash()?,
    };
    std::fs::write(&output, responses.to_csv(&prov)?)?;
    Ok(Ingested { responses, output })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;
    use crate::generate::build_manifest;

    fn suite() -> SuiteManifest {
        let c = RunConfig::new(ExperimentKind::Exp1, 20240501, "unused");
        build_manifest(&c, &c.store().unwrap()).unwrap()
    }

    /// `n_correct` of the four checks answered in the stronger direction.
    fn participant(text: &mut String, id: &str, suite: &SuiteManifest, n_correct: usize) {
        for (i, c) in suite.attention.iter().enumerate() {
            let v = if i < n_correct { 6 } else { 1 };
            text.push_str(&format!("{id},{},{v},1,weaker_first\n", c.id()));
        }
        for p in suite.pairs.iter().take(5) {
            text.push_str(&format!("{id},{},5,1,stronger_first\n", p.stimulus_id));
        }
    }

    const HEADER: &str = "participant_id,stimulus_id,response,block,label_order\n";

    #[test]
    fn attention_exclusion() {
        let s = suite();
        assert_eq!(s.attention.len(), 4);
        let mut text = HEADER.to_string();
        for i in 0..120 {
            participant(&mut text, &format!("p{i:03}"), &s, if i < 10 { 2 } else { 3 + i % 2 });
        }
        let r = ingest(&text, &s, 3).unwrap();
        assert_eq!((r.participants, r.retained(), r.excluded.len()), (120, 110, 10));
        assert_eq!(r.rows.len(), 110 * 5);
        // stronger_first 5 is canonical 2.
        assert!(r.rows.iter().all(|row| row.value == 2.0));
    }

    #[test]
    fn all_passing_is_identity() {
        let s = suite();
        let mut text = HEADER.to_string();
        for i in 0..6 {
            participant(&mut text, &format!("q{i}"), &s, 4);
        }
        let r = ingest(&text, &s, 3).unwrap();
        assert!(r.excluded.is_empty());
        assert_eq!(r.rows.len(), 30);
    }

    #[test]
    fn row_errors_carry_line_numbers() {
        let s = suite();
        let id = &s.pairs[0].stimulus_id;
        let text = format!("{HEADER}a,{id},7,1,weaker_first\na,{id},x,1,\na,nope,3,1,\n");
        let e = ingest(&text, &s, 3).unwrap_err().to_string();
        assert!(e.contains("line 2: response 7 outside [1, 6]"), "{e}");
        assert!(e.contains("line 3: response `x`"), "{e}");
        assert!(e.contains("line 4: unknown stimulus `nope`"), "{e}");
    }

    #[test]
    fn flag_column_overrides() {
        let s = suite();
        let id = &s.pairs[0].stimulus_id;
        let text = format!(
            "participant_id,stimulus_id,response,passed_attention_checks\na,{id},4,true\nb,{id},2,false\n"
        );
        let r = ingest(&text, &s, 3).unwrap();
        assert_eq!(r.excluded, vec!["b".to_string()]);
        assert_eq!(r.means()[id.as_str()], 4.0);
    }

    #[test]
    fn round_trip() {
        let s = suite();
        let mut text = HEADER.to_string();
        participant(&mut text, "z", &s, 4);
        let r = ingest(&text, &s, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let prov = Provenance {
            seed: 1,
            config_hash: "c".into(),
            suite_hash: "s".into(),
        };
        std::fs::write(&path, r.to_csv(&prov).unwrap()).unwrap();
        let back = HumanResponses::load_filtered(&path, Experiment::Exp1).unwrap();
        assert_eq!(back.rows, r.rows);
    }
}
