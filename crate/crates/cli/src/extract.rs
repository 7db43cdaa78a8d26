//! `extract-similarity`: elicit or embed a similarity matrix per domain.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use anyhow::{Context, Result};
use induction::agents::{elicit_similarity_matrix, embedding_matrix, AgentKind, RemoteEmbedder};
use induction::similarity::LoadOptions;
use induction::stimuli::manifest::norms_hash;
use induction::{Scale, SimilarityMatrix};

use crate::config::{Provenance, RunConfig};
use crate::run::{build_agent, build_transport, TransportOptions};

#[derive(Debug, Clone)]
pub struct Extracted {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Unordered category pairs rated, over all domains.
    pub pairs: usize,
    pub transport_calls: usize,
}

pub fn similarity_dir(config: &RunConfig, agent_id: &str) -> PathBuf {
    config.output_dir.join("similarity").join(agent_id)
}

/// Cosines on [−1, 1] mapped linearly onto the 0–20 rating scale.
fn cosine_to_rating(m: &SimilarityMatrix) -> Result<SimilarityMatrix> {
    let n = m.len();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 10.0 * (m.at(i, j) + 1.0) }).collect())
        .collect();
    Ok(SimilarityMatrix::from_rows(
        m.domain().clone(),
        rows,
        Scale::RATING_0_20,
        LoadOptions::default(),
    )?)
}

pub fn cmd_extract_similarity(
    config: &RunConfig,
    agent_id: &str,
    transport: &TransportOptions,
    out: Option<&Path>,
) -> Result<Extracted> {
    config.validate()?;
    let store = config.store()?;
    let env = config.prompt_env(&store)?;
    let cfg = config.agent(agent_id)?;
    let dir = out.map_or_else(|| similarity_dir(config, agent_id), Path::to_path_buf);
    std::fs::create_dir_all(&dir)?;
    let calls = Arc::new(AtomicUsize::new(0));
    let prov = Provenance {
        seed: config.seed,
        config_hash: config.hash(),
        suite_hash: norms_hash(&store)?,
    };

    let mut files = Vec::new();
    let mut pairs = 0;
    let domains: Vec<_> = store.domains().primary().cloned().collect();
    let mut write = |m: &SimilarityMatrix| -> Result<()> {
        let path = dir.join(format!("{}_similarity.csv", m.domain().name.to_lowercase()));
        let mut text = prov.comment();
        text.push_str(&m.to_csv_string());
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        pairs += m.len() * (m.len() - 1) / 2;
        files.push(path);
        Ok(())
    };
    if cfg.kind == AgentKind::RemoteEmbedding {
        cfg.validate()?;
        let embedder = RemoteEmbedder::new(&cfg.model, build_transport(cfg, &config.output_dir, transport, calls.clone())?);
        for d in &domains {
            let m = embedding_matrix(&embedder, d).with_context(|| format!("embedding {}", d.name))?;
            write(&cosine_to_rating(&m)?)?;
        }
    } else {
        let agent = build_agent(cfg, &store, &config.output_dir, transport, calls.clone())?;
        for d in &domains {
            let m = elicit_similarity_matrix(agent.as_ref(), d, &env).with_context(|| format!("eliciting {}", d.name))?;
            write(&m)?;
        }
    }
    Ok(Extracted {
        dir,
        files,
        pairs,
        transport_calls: calls.load(Ordering::SeqCst),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;
    use induction::agents::AgentConfig;

    #[test]
    fn scm_agent_reproduces_norms() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::new(ExperimentKind::SimilarityExtraction, 1, dir.path());
        c.agents.push(AgentConfig::scm("oracle"));
        let e = cmd_extract_similarity(&c, "oracle", &TransportOptions::default(), None).unwrap();
        let store = c.store().unwrap();
        let n_primary = store.domains().primary().count();
        assert_eq!(e.files.len(), n_primary);
        assert_eq!(e.pairs, n_primary * 276);
        assert_eq!(e.transport_calls, 0);
        let loaded = crate::analyze::load_gpt_scm(&store, &e.dir).unwrap();
        for d in store.domains().primary() {
            let a = store.similarity(&d.name).unwrap().normalize().unwrap();
            let b = loaded.similarity(&d.name).unwrap().normalize().unwrap();
            assert!(a.approx_eq(&b, 1e-12));
        }
    }

    #[test]
    fn cosines_map_onto_rating_scale() {
        let d = induction::Domain::new("D", "ds", vec!["a".into(), "b".into()]).unwrap();
        let m = SimilarityMatrix::from_rows(
            d,
            vec![vec![0.0, -0.5], vec![-0.5, 0.0]],
            Scale::new(-1.0, 1.0).unwrap(),
            LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(cosine_to_rating(&m).unwrap().at(0, 1), 5.0);
    }
}
