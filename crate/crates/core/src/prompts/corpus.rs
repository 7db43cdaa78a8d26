//! The fixed set of prompts kept as a regression corpus: every design
//! applied to two stimuli per experiment.

use serde::{Deserialize, Serialize};

use super::render::{compose_pair_prompt, compose_rating_prompt, LabelOrder, PromptEnv, PromptSpec, RenderedPrompt};
use crate::argument::{Argument, ArgumentPair, Phenomenon};
use crate::error::Result;
use crate::stimuli::Experiment;
use crate::store::{packaged, NormStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusLine {
    pub case: String,
    pub prompt: RenderedPrompt,
}

/// Practice answers replayed into designs with practice trials.
pub const PRACTICE_ANSWERS: [&str; 2] = ["75", "60"];

fn typicality_pair(store: &NormStore, domain: &str, strong: &str, weak: &str) -> Result<ArgumentPair> {
    let d = store.domain(domain)?;
    Ok(ArgumentPair {
        pair_id: format!("{domain}-golden"),
        phenomenon: Phenomenon::Typicality,
        domain: domain.into(),
        stronger: Argument::general(&[strong], d)?,
        weaker: Argument::general(&[weak], d)?,
    })
}

pub fn exp1_corpus() -> Result<Vec<CorpusLine>> {
    let store = packaged::exp1()?;
    let env = PromptEnv::packaged(&store);
    let pairs = [
        ("mammals", typicality_pair(&store, "Mammals", "dog", "hedgehog")?),
        ("vehicles", typicality_pair(&store, "Vehicles", "car", "sled")?),
    ];
    let mut out = Vec::new();
    for spec in PromptSpec::all(Experiment::Exp1, &env.templates) {
        for (name, pair) in &pairs {
            out.push(CorpusLine {
                case: format!("{name}/{spec}"),
                prompt: compose_pair_prompt(pair, &spec, LabelOrder::StrongerFirst, &env)?,
            });
        }
    }
    Ok(out)
}

pub fn exp2_corpus() -> Result<Vec<CorpusLine>> {
    let store = packaged::exp2()?;
    let env = PromptEnv::packaged(&store);
    let m = store.domain("Mammals")?;
    let v = store.domain("Vehicles")?;
    let args = [
        ("mammals-1p-general", Argument::general(&["dog"], m)?),
        ("vehicles-2p-specific", Argument::specific(&["bus", "hovercraft"], "tram", v)?),
    ];
    let answers: Vec<String> = PRACTICE_ANSWERS.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    for spec in PromptSpec::all(Experiment::Exp2, &env.templates) {
        for (name, a) in &args {
            let practice = spec.uses_practice().then_some(answers.as_slice());
            out.push(CorpusLine {
                case: format!("{name}/{spec}"),
                prompt: compose_rating_prompt(a, &spec, practice, &env)?,
            });
        }
    }
    Ok(out)
}

pub fn to_jsonl(corpus: &[CorpusLine]) -> Result<String> {
    let mut text = String::new();
    for l in corpus {
        text.push_str(&serde_json::to_string(l)?);
        text.push('\n');
    }
    Ok(text)
}
