//! Component texts, one file per variant ID.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::stimuli::Experiment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgumentStyle {
    /// "Fact - …" lines followed by a "Claim - …" line.
    Lines,
    /// One "Based on the fact that …, we claim that …" sentence.
    Sentence,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ArgumentFormat {
    pub style: ArgumentStyle,
    pub verb: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PracticeBlock {
    pub intro_one: String,
    pub intro_two: String,
    pub outro: String,
    pub superordinate: String,
    pub one_premise: Vec<Vec<String>>,
    pub two_premise: Vec<Vec<String>>,
}

/// Texts for one experiment, keyed by component letter and variant number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentTexts {
    pub system: BTreeMap<u8, String>,
    pub context: BTreeMap<u8, String>,
    pub question: BTreeMap<u8, String>,
    pub options: BTreeMap<u8, String>,
    pub arguments: BTreeMap<u8, ArgumentFormat>,
    /// Exp2 only: T1 is the practice block, T2 means no trials.
    pub practice: Option<PracticeBlock>,
    pub trials: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplates {
    pub exp1: ComponentTexts,
    pub exp2: ComponentTexts,
    pub similarity: String,
}

macro_rules! t {
    ($p:literal) => {
        include_str!(concat!("../../templates/", $p))
    };
}

fn parse_arg(text: &str) -> Result<ArgumentFormat> {
    Ok(toml::from_str(text)?)
}

impl PromptTemplates {
    pub fn packaged() -> Self {
        let shared_sys = || BTreeMap::from([(1, t!("shared/S1.txt")), (2, t!("shared/S2.txt")), (3, t!("shared/S3.txt"))]);
        let args = || {
            [(1, t!("shared/A1.toml")), (2, t!("shared/A2.toml")), (3, t!("shared/A3.toml"))]
                .into_iter()
                .map(|(k, v)| (k, parse_arg(v).expect("packaged argument format parses")))
                .collect::<BTreeMap<_, _>>()
        };
        let own = |m: BTreeMap<u8, &str>| m.into_iter().map(|(k, v)| (k, v.to_string())).collect();
        let exp1 = ComponentTexts {
            system: own(shared_sys()),
            context: own(BTreeMap::from([
                (1, t!("exp1/C1.txt")),
                (2, t!("exp1/C2.txt")),
                (3, t!("exp1/C3.txt")),
                (4, t!("exp1/C4.txt")),
            ])),
            question: own(BTreeMap::from([
                (1, t!("exp1/Q1.txt")),
                (2, t!("exp1/Q2.txt")),
                (3, t!("exp1/Q3.txt")),
                (4, t!("exp1/Q4.txt")),
            ])),
            options: own(BTreeMap::from([(1, t!("exp1/O1.txt")), (2, t!("exp1/O2.txt"))])),
            arguments: args(),
            practice: None,
            trials: vec![],
        };
        let exp2 = ComponentTexts {
            system: own(shared_sys()),
            context: own(BTreeMap::from([(1, t!("exp2/C1.txt")), (2, t!("exp2/C2.txt")), (3, t!("exp2/C3.txt"))])),
            question: own(BTreeMap::from([
                (1, t!("exp2/Q1.txt")),
                (2, t!("exp2/Q2.txt")),
                (3, t!("exp2/Q3.txt")),
                (4, t!("exp2/Q4.txt")),
            ])),
            options: own(BTreeMap::from([(1, t!("exp2/O1.txt")), (2, t!("exp2/O2.txt"))])),
            arguments: args(),
            practice: Some(toml::from_str(t!("exp2/T1.toml")).expect("packaged practice block parses")),
            trials: vec![1, 2],
        };
        PromptTemplates {
            exp1,
            exp2,
            similarity: t!("shared/similarity.txt").to_string(),
        }
    }

    /// Loads a template tree with the same layout as the packaged one
    /// (`shared/`, `exp1/`, `exp2/`).
    pub fn load_dir(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        let read = |p: &str| -> Result<String> {
            std::fs::read_to_string(root.join(p)).map_err(|e| Error::Schema(format!("template {p}: {e}")))
        };
        let scan = |dir: &str, letter: char| -> Result<BTreeMap<u8, String>> {
            let mut out = BTreeMap::new();
            for n in 1..=9u8 {
                let p = format!("{dir}/{letter}{n}.txt");
                if root.join(&p).exists() {
                    out.insert(n, read(&p)?);
                }
            }
            Ok(out)
        };
        let mut arguments = BTreeMap::new();
        for n in 1..=9u8 {
            let p = format!("shared/A{n}.toml");
            if root.join(&p).exists() {
                arguments.insert(n, parse_arg(&read(&p)?)?);
            }
        }
        let system = scan("shared", 'S')?;
        let exp = |dir: &str| -> Result<ComponentTexts> {
            let practice = if root.join(dir).join("T1.toml").exists() {
                Some(toml::from_str(&read(&format!("{dir}/T1.toml"))?)?)
            } else {
                None
            };
            let trials = if practice.is_some() { vec![1, 2] } else { vec![] };
            Ok(ComponentTexts {
                system: system.clone(),
                context: scan(dir, 'C')?,
                question: scan(dir, 'Q')?,
                options: scan(dir, 'O')?,
                arguments: arguments.clone(),
                practice,
                trials,
            })
        };
        Ok(PromptTemplates {
            exp1: exp("exp1")?,
            exp2: exp("exp2")?,
            similarity: read("shared/similarity.txt")?,
        })
    }

    pub fn texts(&self, experiment: Experiment) -> &ComponentTexts {
        match experiment {
            Experiment::Exp1 => &self.exp1,
            Experiment::Exp2 => &self.exp2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packaged_inventory_sizes() {
        let t = PromptTemplates::packaged();
        let e1 = &t.exp1;
        assert_eq!(
            e1.system.len() * e1.context.len() * e1.arguments.len() * e1.question.len() * e1.options.len(),
            288
        );
        let e2 = &t.exp2;
        assert_eq!(
            e2.system.len() * e2.context.len() * e2.arguments.len() * e2.question.len() * e2.options.len() * e2.trials.len(),
            432
        );
        assert_eq!(e1.arguments[&2].verb, "possess");
    }

    #[test]
    fn load_dir_matches_packaged() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("templates");
        assert_eq!(PromptTemplates::load_dir(root).unwrap(), PromptTemplates::packaged());
    }
}
