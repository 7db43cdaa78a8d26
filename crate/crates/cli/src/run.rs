//! `run`: drive one agent over a suite and append to a resumable results log.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use induction::agents::http::HttpTransport;
use induction::agents::{
    Agent, AgentConfig, AgentKind, CachingTransport, JudgmentRecord, RateLimited, RecordingTransport, RemoteAgent,
    RemoteStyle, ReplayTransport, Request, Response, ScmAgent, ScriptedAgent, Transport,
};
use induction::prompts::{LabelOrder, PromptEnv, PromptSpec};
use induction::stimuli::{Experiment, SuiteManifest};
use induction::NormStore;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Provenance, RunConfig};

/// Where remote traffic comes from and goes to.
#[derive(Debug, Clone, Default)]
pub struct TransportOptions {
    /// Answer from this transcript instead of the network.
    pub replay: Option<PathBuf>,
    /// Append every exchange to this transcript.
    pub record: Option<PathBuf>,
}

/// Counts requests that reach the bottom of the stack.
pub struct Counted<T> {
    inner: T,
    calls: Arc<AtomicUsize>,
}

impl<T: Transport> Transport for Counted<T> {
    fn send(&self, request: &Request) -> induction::Result<Response> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.send(request)
    }
}

/// The transport stack for a remote agent: replay or rate-limited HTTP at
/// the bottom, then the request cache, then the recorder.
pub fn build_transport(
    cfg: &AgentConfig,
    out_dir: &Path,
    opts: &TransportOptions,
    calls: Arc<AtomicUsize>,
) -> Result<Box<dyn Transport>> {
    let mut t: Box<dyn Transport> = match &opts.replay {
        Some(path) => Box::new(Counted {
            inner: ReplayTransport::load(path).with_context(|| format!("loading transcript {}", path.display()))?,
            calls,
        }),
        None => {
            let http = HttpTransport::from_env(&cfg.base_url, &cfg.api_key_var, Duration::from_secs(cfg.timeout_secs))?;
            let limited = RateLimited::new(http, cfg.request_rate_limit, cfg.retry)?;
            let counted = Counted { inner: limited, calls };
            if cfg.cache_enabled {
                let path = out_dir.join("cache").join(format!("{}.jsonl", cfg.id));
                Box::new(CachingTransport::persistent(counted, path)?)
            } else {
                Box::new(counted)
            }
        }
    };
    if let Some(path) = &opts.record {
        t = Box::new(RecordingTransport::new(t, path)?);
    }
    Ok(t)
}

pub fn build_agent(
    cfg: &AgentConfig,
    store: &NormStore,
    out_dir: &Path,
    opts: &TransportOptions,
    calls: Arc<AtomicUsize>,
) -> Result<Box<dyn Agent>> {
    cfg.validate()?;
    Ok(match cfg.kind {
        AgentKind::Scm => Box::new(ScmAgent::new(&cfg.id, store, cfg.scm_params()?)?),
        AgentKind::Scripted => Box::new(ScriptedAgent::new(
            &cfg.id,
            cfg.script.clone().context("scripted agent without a script")?,
        )?),
        AgentKind::RemoteChat | AgentKind::RemoteCompletion => {
            let style = if cfg.kind == AgentKind::RemoteChat {
                RemoteStyle::Chat
            } else {
                RemoteStyle::Completion
            };
            Box::new(RemoteAgent::new(cfg, style, build_transport(cfg, out_dir, opts, calls)?)?)
        }
        AgentKind::RemoteEmbedding => bail!("agent `{}` is an embedding model and cannot judge arguments", cfg.id),
    })
}

/// First line of a results log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsHeader {
    pub agent_id: String,
    pub prompt_spec: String,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: ResultsHeader,
}

#[derive(Debug, Clone)]
pub struct ResultsLog {
    pub header: ResultsHeader,
    pub records: Vec<JudgmentRecord>,
}

impl ResultsLog {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().context("results log is empty")?;
        let header = serde_json::from_str::<HeaderLine>(first)
            .context("line 1: expected a results header")?
            .header;
        let mut records = Vec::new();
        for (i, line) in lines {
            // A crash mid-write can leave a truncated final line.
            match serde_json::from_str::<JudgmentRecord>(line) {
                Ok(r) => records.push(r),
                Err(e) if i + 1 == text.lines().count() && !text.ends_with('\n') => {
                    eprintln!("{}", log_line("truncated_record", &[("line", &(i + 1).to_string()), ("error", &e.to_string())]));
                }
                Err(e) => bail!("line {}: {e}", i + 1),
            }
        }
        Ok(ResultsLog { header, records })
    }
}

pub fn results_path(out: &Path, agent_id: &str, exp: Experiment) -> PathBuf {
    let e = match exp {
        Experiment::Exp1 => "exp1",
        Experiment::Exp2 => "exp2",
    };
    out.join(format!("results-{e}-{agent_id}.jsonl"))
}

/// Which argument of pair `stimulus_id` is shown first.
pub fn label_order(seed: u64, stimulus_id: &str) -> LabelOrder {
    if induction::rng::stream(seed, &format!("label-order/{stimulus_id}")).gen_bool(0.5) {
        LabelOrder::StrongerFirst
    } else {
        LabelOrder::WeakerFirst
    }
}

/// A JSON log line: `{"event": .., key: value, ..}`.
pub fn log_line(event: &str, fields: &[(&str, &str)]) -> String {
    let mut m = serde_json::Map::new();
    m.insert("event".into(), event.into());
    for (k, v) in fields {
        m.insert((*k).into(), (*v).into());
    }
    serde_json::Value::Object(m).to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub results_path: PathBuf,
    pub written: usize,
    pub skipped: usize,
    pub failed: usize,
    pub transport_calls: usize,
}

pub struct RunInputs<'a> {
    pub config: &'a RunConfig,
    pub suite: &'a SuiteManifest,
    pub agent_id: &'a str,
    pub transport: TransportOptions,
    /// Defaults to `results-<exp>-<agent>.jsonl` in the output directory.
    pub results: Option<PathBuf>,
}

pub fn cmd_run(inputs: RunInputs<'_>) -> Result<RunSummary> {
    let RunInputs {
        config,
        suite,
        agent_id,
        transport,
        results,
    } = inputs;
    config.validate()?;
    let exp = suite.header.experiment();
    if exp != config.experiment.stimuli() {
        bail!("suite is for {exp:?} but the config describes {:?}", config.experiment);
    }
    let store = config.store()?;
    let env = config.prompt_env(&store)?;
    let spec = config.spec()?;
    let cfg = config.agent(agent_id)?;
    let calls = Arc::new(AtomicUsize::new(0));
    let out = &config.output_dir;
    std::fs::create_dir_all(out)?;
    let agent = build_agent(cfg, &store, out, &transport, calls.clone())?;

    let path = results.unwrap_or_else(|| results_path(out, agent_id, exp));
    let header = ResultsHeader {
        agent_id: agent_id.into(),
        prompt_spec: spec.id(),
        provenance: Provenance {
            seed: config.seed,
            config_hash: config.hash(),
            suite_hash: suite.content_hash()?,
        },
    };
    let mut done = HashSet::new();
    if path.exists() {
        let text = std::fs::read_to_string(&path)?;
        if !text.ends_with('\n') {
            let keep = text.rfind('\n').map_or(0, |i| i + 1);
            std::fs::write(&path, &text[..keep])?;
        }
        let log = ResultsLog::parse(&text).with_context(|| format!("in {}", path.display()))?;
        if log.header.agent_id != header.agent_id
            || log.header.prompt_spec != header.prompt_spec
            || log.header.provenance.suite_hash != header.provenance.suite_hash
            || log.header.provenance.seed != header.provenance.seed
        {
            bail!(
                "{} was written for a different agent, prompt design, seed or suite; move it aside to start over",
                path.display()
            );
        }
        done.extend(log.records.iter().map(|r| r.stimulus_id.clone()));
    } else {
        let mut line = serde_json::to_string(&HeaderLine { header: header.clone() })?;
        line.push('\n');
        std::fs::write(&path, line)?;
    }
    let mut file = OpenOptions::new().append(true).open(&path)?;

    let mut summary = RunSummary {
        results_path: path.clone(),
        written: 0,
        skipped: 0,
        failed: 0,
        transport_calls: 0,
    };
    let mut emit = |rec: JudgmentRecord, file: &mut std::fs::File| -> Result<()> {
        if let Some(e) = &rec.error {
            summary.failed += 1;
            eprintln!("{}", log_line("failure", &[("stimulus", &rec.stimulus_id), ("error", e)]));
        }
        let mut line = serde_json::to_string(&rec)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        file.flush()?;
        summary.written += 1;
        Ok(())
    };
    for p in &suite.pairs {
        if done.contains(&p.stimulus_id) {
            summary.skipped += 1;
            continue;
        }
        let order = label_order(config.seed, &p.stimulus_id);
        emit(agent.judge_pair(&p.pair(), &spec, order, &env), &mut file)?;
    }
    for a in &suite.arguments {
        if done.contains(&a.stimulus_id) {
            summary.skipped += 1;
            continue;
        }
        emit(agent.rate_argument(&a.stimulus_id, &a.argument, &spec, &env), &mut file)?;
    }
    summary.transport_calls = calls.load(Ordering::SeqCst);
    Ok(summary)
}

/// Shared by `run` and `extract-similarity`.
pub fn agent_env(config: &RunConfig) -> Result<(NormStore, PromptEnv, PromptSpec)> {
    let store = config.store()?;
    let env = config.prompt_env(&store)?;
    let spec = config.spec()?;
    Ok((store, env, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;
    use crate::generate::build_manifest;
    use induction::agents::Script;

    fn scripted_config(dir: &Path) -> RunConfig {
        let mut c = RunConfig::new(ExperimentKind::Exp1, 20240501, dir);
        c.agents.push(AgentConfig::scripted(
            "const",
            Script::Constant { reply: "D".into() },
        ));
        c
    }

    #[test]
    fn label_orders_are_stable_and_mixed() {
        let a: Vec<_> = (0..200).map(|i| label_order(5, &format!("s{i}"))).collect();
        let b: Vec<_> = (0..200).map(|i| label_order(5, &format!("s{i}"))).collect();
        assert_eq!(a, b);
        let sf = a.iter().filter(|o| **o == LabelOrder::StrongerFirst).count();
        assert!((70..130).contains(&sf), "{sf}");
    }

    #[test]
    fn resume_skips_recorded_stimuli() {
        let dir = tempfile::tempdir().unwrap();
        let config = scripted_config(dir.path());
        let store = config.store().unwrap();
        let suite = build_manifest(&config, &store).unwrap();
        let run = |suite: &SuiteManifest| {
            cmd_run(RunInputs {
                config: &config,
                suite,
                agent_id: "const",
                transport: TransportOptions::default(),
                results: None,
            })
            .unwrap()
        };
        let mut partial = suite.clone();
        partial.pairs.truncate(100);
        let first = run(&partial);
        assert_eq!(first.written, 100);
        // The suite hash differs for a truncated manifest, so resume against
        // the full one requires the same header: rewrite it.
        let text = std::fs::read_to_string(&first.results_path).unwrap();
        let mut log = ResultsLog::parse(&text).unwrap();
        log.header.provenance.suite_hash = suite.content_hash().unwrap();
        let mut body = serde_json::to_string(&HeaderLine { header: log.header }).unwrap();
        body.push('\n');
        body.push_str(text.split_once('\n').unwrap().1);
        std::fs::write(&first.results_path, body).unwrap();

        let second = run(&suite);
        assert_eq!((second.written, second.skipped, second.transport_calls), (692, 100, 0));
        let log = ResultsLog::load(&second.results_path).unwrap();
        assert_eq!(log.records.len(), 792);
        let ids: HashSet<_> = log.records.iter().map(|r| &r.stimulus_id).collect();
        assert_eq!(ids.len(), 792);
        assert_eq!(run(&suite).written, 0);
    }

    #[test]
    fn mismatched_log_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let config = scripted_config(dir.path());
        let store = config.store().unwrap();
        let suite = build_manifest(&config, &store).unwrap();
        let path = results_path(dir.path(), "const", Experiment::Exp1);
        std::fs::write(
            &path,
            "{\"header\":{\"agent_id\":\"other\",\"prompt_spec\":\"x\",\"provenance\":{\"seed\":1,\"config_hash\":\"\",\"suite_hash\":\"\"}}}\n",
        )
        .unwrap();
        let e = cmd_run(RunInputs {
            config: &config,
            suite: &suite,
            agent_id: "const",
            transport: TransportOptions::default(),
            results: None,
        })
        .unwrap_err();
        assert!(e.to_string().contains("different agent"), "{e}");
    }

    #[test]
    fn truncated_tail_is_tolerated() {
        let log = ResultsLog::parse(
            "{\"header\":{\"agent_id\":\"a\",\"prompt_spec\":\"x\",\"provenance\":{\"seed\":1,\"config_hash\":\"\",\"suite_hash\":\"\"}}}\n{\"agent_id\":",
        )
        .unwrap();
        assert!(log.records.is_empty());
        assert!(ResultsLog::parse("{\"header\":{\"agent_id\":\"a\",\"prompt_spec\":\"x\",\"provenance\":{\"seed\":1,\"config_hash\":\"\",\"suite_hash\":\"\"}}}\n{bad}\n").is_err());
    }
}
