use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use induction::stimuli::SuiteManifest;
use induction_harness::analyze::{analysis_dir, analyze, load_gpt_scm, write_analysis, AnalysisInputs};
use induction_harness::config::RunConfig;
use induction_harness::extract::cmd_extract_similarity;
use induction_harness::generate::{cmd_generate, suite_path};
use induction_harness::human::{cmd_ingest_human, filtered_path, HumanResponses};
use induction_harness::report::cmd_report;
use induction_harness::run::{cmd_run, log_line, ResultsLog, RunInputs, TransportOptions};
use serde_json::json;

#[derive(Parser)]
#[command(name = "induct", version, about = "Category-based induction experiments for language models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut c = RunConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            c.seed = s;
        }
        Ok(c)
    }
}

#[derive(Args)]
struct Remote {
    /// Answer remote requests from this transcript instead of the network.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Append every remote exchange to this transcript.
    #[arg(long)]
    record: Option<PathBuf>,
}

impl Remote {
    fn options(&self) -> TransportOptions {
        TransportOptions {
            replay: self.replay.clone(),
            record: self.record.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the stimulus suite.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Collect one agent's judgments over a suite.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        agent: String,
        /// Defaults to the suite in the output directory.
        #[arg(long)]
        suite: Option<PathBuf>,
        #[arg(long)]
        results: Option<PathBuf>,
        #[command(flatten)]
        remote: Remote,
    },
    /// Validate human responses and apply attention-check exclusions.
    IngestHuman {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        human: PathBuf,
        #[arg(long)]
        suite: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute sign tests, correlations, reliabilities and bootstrap comparisons.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Results logs, one per agent.
        #[arg(long, num_args = 1..)]
        results: Vec<PathBuf>,
        /// Filtered human responses from `ingest-human`.
        #[arg(long)]
        human: Option<PathBuf>,
        /// Elicited similarity matrices for GPT-SCM scores.
        #[arg(long)]
        gpt_scm_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Elicit or embed a similarity matrix for every domain.
    ExtractSimilarity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        remote: Remote,
    },
    /// Render an analysis as markdown tables.
    Report {
        /// `analysis.json` or the directory holding it.
        #[arg(long)]
        analysis: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_suite(config: &RunConfig, suite: Option<PathBuf>) -> Result<SuiteManifest> {
    let path = suite.unwrap_or_else(|| suite_path(&config.output_dir, config.experiment.stimuli()));
    SuiteManifest::load(&path).with_context(|| format!("loading suite {}", path.display()))
}

fn execute(cli: Cli) -> Result<serde_json::Value> {
    Ok(match cli.command {
        Command::Generate { common } => {
            let g = cmd_generate(&common.load()?)?;
            json!({
                "event": "generated",
                "suite": g.suite_path,
                "report": g.report_path,
                "splits": g.counts.len(),
                "stimuli": g.total(),
            })
        }
        Command::Run {
            common,
            agent,
            suite,
            results,
            remote,
        } => {
            let config = common.load()?;
            let suite = load_suite(&config, suite)?;
            let s = cmd_run(RunInputs {
                config: &config,
                suite: &suite,
                agent_id: &agent,
                transport: remote.options(),
                results,
            })?;
            json!({
                "event": "run_finished",
                "results": s.results_path,
                "written": s.written,
                "skipped": s.skipped,
                "failed": s.failed,
                "transport_calls": s.transport_calls,
            })
        }
        Command::IngestHuman {
            common,
            human,
            suite,
            out,
        } => {
            let config = common.load()?;
            let suite = load_suite(&config, suite)?;
            let i = cmd_ingest_human(&config, &suite, &human, out)?;
            for w in &i.responses.warnings {
                eprintln!("{}", log_line("warning", &[("message", w)]));
            }
            json!({
                "event": "ingested",
                "output": i.output,
                "participants": i.responses.participants,
                "retained": i.responses.retained(),
                "excluded": i.responses.excluded,
                "responses": i.responses.rows.len(),
            })
        }
        Command::Analyze {
            common,
            suite,
            results,
            human,
            gpt_scm_dir,
            out,
        } => {
            let config = common.load()?;
            let suite = load_suite(&config, suite)?;
            let exp = suite.header.experiment();
            let logs = results.iter().map(ResultsLog::load).collect::<Result<Vec<_>>>()?;
            let human = match human {
                Some(p) => Some(HumanResponses::load_filtered(&p, exp)?),
                None => {
                    let p = filtered_path(&config.output_dir, exp);
                    p.exists().then(|| HumanResponses::load_filtered(&p, exp)).transpose()?
                }
            };
            let gpt = gpt_scm_dir
                .map(|d| load_gpt_scm(&config.store()?, &d))
                .transpose()?;
            let a = analyze(&AnalysisInputs {
                config: &config,
                suite: &suite,
                results: &logs,
                human: human.as_ref(),
                gpt_scm: gpt.as_ref(),
            })?;
            for w in &a.warnings {
                eprintln!("{}", log_line("warning", &[("message", w)]));
            }
            let dir = out.unwrap_or_else(|| analysis_dir(&config));
            let files = write_analysis(&a, &dir)?;
            json!({ "event": "analyzed", "files": files })
        }
        Command::ExtractSimilarity {
            common,
            agent,
            out,
            remote,
        } => {
            let config = common.load()?;
            let e = cmd_extract_similarity(&config, &agent, &remote.options(), out.as_deref())?;
            json!({
                "event": "extracted",
                "dir": e.dir,
                "files": e.files,
                "pairs": e.pairs,
                "transport_calls": e.transport_calls,
            })
        }
        Command::Report { analysis, out } => {
            let path = cmd_report(&analysis, out.as_deref())?;
            json!({ "event": "reported", "report": path })
        }
    })
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "event": "error", "error": format!("{e:#}") }));
            ExitCode::FAILURE
        }
    }
}
