//! Rendering stimuli into chat turns or a single completion prompt.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::templates::{ArgumentFormat, ArgumentStyle, ComponentTexts, PromptTemplates};
use crate::argument::{Argument, ArgumentPair, Conclusion};
use crate::domain::Lexicon;
use crate::error::{Error, Result};
use crate::stimuli::Experiment;
use crate::store::NormStore;

pub const DEFAULT_PLACEHOLDER: &str = "living things";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PromptSpec {
    pub experiment: Experiment,
    pub system: u8,
    pub context: u8,
    pub argument: u8,
    pub question: u8,
    pub options: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u8>,
    /// Overrides the domain's placeholder for `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placeholder: Option<String>,
}

impl PromptSpec {
    /// The best Exp1 design: S3-C1-A1-Q3-O1.
    pub fn exp1_best() -> Self {
        PromptSpec::parse(Experiment::Exp1, "S3-C1-A1-Q3-O1").expect("valid id")
    }

    /// The best Exp2 design: S3-C1-A1-Q1-O1-T1.
    pub fn exp2_best() -> Self {
        PromptSpec::parse(Experiment::Exp2, "S3-C1-A1-Q1-O1-T1").expect("valid id")
    }

    pub fn id(&self) -> String {
        let mut s = format!(
            "S{}-C{}-A{}-Q{}-O{}",
            self.system, self.context, self.argument, self.question, self.options
        );
        if let Some(t) = self.trials {
            s.push_str(&format!("-T{t}"));
        }
        s
    }

    /// Parses an ID such as `S3-C1-A1-Q3-O1` or `S3-C1-A1-Q1-O1-T1`.
    pub fn parse(experiment: Experiment, id: &str) -> Result<Self> {
        let bad = || Error::Prompt(format!("malformed prompt id `{id}`"));
        let mut fields: BTreeMap<char, u8> = BTreeMap::new();
        for part in id.trim().split('-') {
            let mut chars = part.chars();
            let letter = chars.next().ok_or_else(bad)?;
            let n: u8 = chars.as_str().parse().map_err(|_| bad())?;
            if !"SCAQOT".contains(letter) || fields.insert(letter, n).is_some() {
                return Err(bad());
            }
        }
        let get = |c: char| fields.get(&c).copied().ok_or_else(bad);
        Ok(PromptSpec {
            experiment,
            system: get('S')?,
            context: get('C')?,
            argument: get('A')?,
            question: get('Q')?,
            options: get('O')?,
            trials: fields.get(&'T').copied(),
            placeholder: None,
        })
    }

    pub fn validate(&self, templates: &PromptTemplates) -> Result<()> {
        let t = templates.texts(self.experiment);
        let ok = t.system.contains_key(&self.system)
            && t.context.contains_key(&self.context)
            && t.arguments.contains_key(&self.argument)
            && t.question.contains_key(&self.question)
            && t.options.contains_key(&self.options)
            && match (self.experiment, self.trials) {
                (Experiment::Exp1, None) => true,
                (Experiment::Exp1, Some(_)) | (Experiment::Exp2, None) => false,
                (Experiment::Exp2, Some(n)) => t.trials.contains(&n),
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Prompt(format!("invalid variant combination {} for {:?}", self.id(), self.experiment)))
        }
    }

    pub fn uses_practice(&self) -> bool {
        self.trials == Some(1)
    }

    pub fn response_kind(&self) -> ResponseKind {
        match (self.experiment, self.options) {
            (Experiment::Exp1, 2) | (Experiment::Exp2, 1) => ResponseKind::Number,
            _ => ResponseKind::Choice,
        }
    }

    /// Every valid combination, in S, C, A, Q, O, T order.
    pub fn all(experiment: Experiment, templates: &PromptTemplates) -> Vec<PromptSpec> {
        let t = templates.texts(experiment);
        let trials: Vec<Option<u8>> = match experiment {
            Experiment::Exp1 => vec![None],
            Experiment::Exp2 => t.trials.iter().map(|&n| Some(n)).collect(),
        };
        let mut out = Vec::new();
        for &s in t.system.keys() {
            for &c in t.context.keys() {
                for &a in t.arguments.keys() {
                    for &q in t.question.keys() {
                        for &o in t.options.keys() {
                            for &tr in &trials {
                                out.push(PromptSpec {
                                    experiment,
                                    system: s,
                                    context: c,
                                    argument: a,
                                    question: q,
                                    options: o,
                                    trials: tr,
                                    placeholder: None,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for PromptSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    /// A letter A–F.
    Choice,
    /// A number from 0 to 100.
    Number,
}

/// Which argument of a pair is shown as "Argument A".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelOrder {
    StrongerFirst,
    WeakerFirst,
}

impl LabelOrder {
    pub fn flipped(self) -> Self {
        match self {
            LabelOrder::StrongerFirst => LabelOrder::WeakerFirst,
            LabelOrder::WeakerFirst => LabelOrder::StrongerFirst,
        }
    }

    /// Maps a 1–6 response (6 = B much stronger) onto a scale where 6 means
    /// the theoretically stronger argument is much stronger.
    pub fn canonical(self, raw: f64) -> f64 {
        match self {
            LabelOrder::WeakerFirst => raw,
            LabelOrder::StrongerFirst => 7.0 - raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub spec_id: String,
    pub system_text: String,
    /// User turns, with earlier assistant answers interleaved when practice
    /// trials are included. Always ends with a user turn.
    pub turns: Vec<ChatMessage>,
    pub expected: ResponseKind,
}

impl RenderedPrompt {
    pub fn user_messages(&self) -> impl Iterator<Item = &str> {
        self.turns.iter().filter(|m| m.role == Role::User).map(|m| m.content.as_str())
    }

    /// Messages for a chat endpoint; an empty system text is omitted.
    pub fn chat_messages(&self) -> Vec<ChatMessage> {
        let mut out = Vec::with_capacity(self.turns.len() + 1);
        if !self.system_text.is_empty() {
            out.push(ChatMessage {
                role: Role::System,
                content: self.system_text.clone(),
            });
        }
        out.extend(self.turns.iter().cloned());
        out
    }

    /// Everything in one prompt, parts separated by a blank line.
    pub fn completion_text(&self) -> String {
        self.chat_messages()
            .iter()
            .map(|m| m.content.as_str())
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

/// Templates plus the lookups rendering needs.
#[derive(Debug, Clone)]
pub struct PromptEnv {
    pub templates: PromptTemplates,
    pub lexicon: Lexicon,
    /// Domain name to the text substituted for `X`.
    pub placeholders: BTreeMap<String, String>,
}

impl PromptEnv {
    pub fn new(templates: PromptTemplates, store: &NormStore) -> Self {
        let mut lexicon = store.lexicon().clone();
        lexicon.merge(&crate::stimuli::manifest::attention_lexicon());
        let placeholders = store
            .domains()
            .iter()
            .map(|d| (d.name.clone(), d.placeholder.clone()))
            .collect();
        PromptEnv {
            templates,
            lexicon,
            placeholders,
        }
    }

    pub fn packaged(store: &NormStore) -> Self {
        Self::new(PromptTemplates::packaged(), store)
    }

    fn placeholder<'a>(&'a self, spec: &'a PromptSpec, domain: &str) -> &'a str {
        spec.placeholder
            .as_deref()
            .or_else(|| self.placeholders.get(domain).map(String::as_str))
            .unwrap_or(DEFAULT_PLACEHOLDER)
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn conclusion_phrase(c: &Conclusion, lexicon: &Lexicon) -> Result<String> {
    Ok(match c {
        Conclusion::General(label) => format!("all {label}"),
        Conclusion::Specific(cat) => lexicon.plural(cat)?.to_string(),
    })
}

fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Renders one labeled argument block.
pub fn render_argument(argument: &Argument, format: &ArgumentFormat, label: &str, lexicon: &Lexicon) -> Result<String> {
    let plurals = argument
        .premises
        .iter()
        .map(|p| lexicon.plural(p).map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let claim = conclusion_phrase(&argument.conclusion, lexicon)?;
    let verb = &format.verb;
    Ok(match format.style {
        ArgumentStyle::Lines => {
            let mut lines: Vec<String> = plurals
                .iter()
                .map(|p| format!("Fact - {} {verb} property P.", capitalize(p)))
                .collect();
            lines.push(format!("Claim - {} {verb} property P.", capitalize(&claim)));
            format!("Argument {label}: {}", lines.join("\n "))
        }
        ArgumentStyle::Sentence => format!(
            "Argument {label}: Based on the fact that {} {verb} property P, we claim that {claim} {verb} property P.",
            join_list(&plurals)
        ),
    })
}

fn texts<'a>(env: &'a PromptEnv, spec: &PromptSpec) -> Result<&'a ComponentTexts> {
    spec.validate(&env.templates)?;
    Ok(env.templates.texts(spec.experiment))
}

fn join_parts(parts: &[&str]) -> String {
    parts.iter().filter(|p| !p.is_empty()).copied().collect::<Vec<_>>().join("\n\n")
}

fn question_options(t: &ComponentTexts, spec: &PromptSpec) -> String {
    format!("{} {}", t.question[&spec.question], t.options[&spec.options])
}

pub fn compose_pair_prompt(
    pair: &ArgumentPair,
    spec: &PromptSpec,
    order: LabelOrder,
    env: &PromptEnv,
) -> Result<RenderedPrompt> {
    if spec.experiment != Experiment::Exp1 {
        return Err(Error::Prompt(format!("{} is not a pair-judgment design", spec.id())));
    }
    let t = texts(env, spec)?;
    let x = env.placeholder(spec, &pair.domain);
    let fmt = &t.arguments[&spec.argument];
    let (a, b) = match order {
        LabelOrder::StrongerFirst => (&pair.stronger, &pair.weaker),
        LabelOrder::WeakerFirst => (&pair.weaker, &pair.stronger),
    };
    let args = format!(
        "{}\n{}",
        render_argument(a, fmt, "A", &env.lexicon)?,
        render_argument(b, fmt, "B", &env.lexicon)?
    );
    let context = t.context[&spec.context].replace("{X}", x);
    let qo = question_options(t, spec);
    Ok(RenderedPrompt {
        spec_id: spec.id(),
        system_text: t.system[&spec.system].replace("{X}", x),
        turns: vec![ChatMessage::user(join_parts(&[&context, &args, &qo]))],
        expected: spec.response_kind(),
    })
}

fn practice_arguments(t: &ComponentTexts, premise_count: usize) -> Result<(&str, Vec<Argument>)> {
    let block = t
        .practice
        .as_ref()
        .ok_or_else(|| Error::Prompt("no practice block in the templates".into()))?;
    let (intro, sets) = match premise_count {
        1 => (&block.intro_one, &block.one_premise),
        2 => (&block.intro_two, &block.two_premise),
        n => return Err(Error::Prompt(format!("no practice trials for {n}-premise arguments"))),
    };
    let args = sets
        .iter()
        .map(|ps| Argument {
            domain: "practice".into(),
            premises: ps.clone(),
            conclusion: Conclusion::General(block.superordinate.clone()),
        })
        .collect();
    Ok((intro, args))
}

/// Builds the turns up to and including practice trial `step` (0 or 1),
/// given the agent's answers to the earlier practice trials.
fn practice_turns(
    argument: &Argument,
    spec: &PromptSpec,
    env: &PromptEnv,
    answers: &[String],
    upto: usize,
) -> Result<Vec<ChatMessage>> {
    let t = texts(env, spec)?;
    let x = env.placeholder(spec, &argument.domain);
    let fmt = &t.arguments[&spec.argument];
    let qo = question_options(t, spec);
    let context = t.context[&spec.context].replace("{X}", x);
    let (intro, practice) = practice_arguments(t, argument.premises.len())?;
    let mut turns = Vec::new();
    for (i, p) in practice.iter().enumerate().take(upto + 1) {
        let block = render_argument(p, fmt, "A", &env.lexicon)?;
        let text = if i == 0 {
            join_parts(&[&context, intro, &block, &qo])
        } else {
            join_parts(&[&block, &qo])
        };
        turns.push(ChatMessage::user(text));
        if i < upto {
            turns.push(ChatMessage::assistant(answers[i].clone()));
        }
    }
    Ok(turns)
}

/// The prompt for practice trial `step` (0 or 1); `answers` holds the
/// agent's replies to the earlier practice trials.
pub fn compose_practice_prompt(
    argument: &Argument,
    spec: &PromptSpec,
    step: usize,
    answers: &[String],
    env: &PromptEnv,
) -> Result<RenderedPrompt> {
    if !spec.uses_practice() {
        return Err(Error::Prompt(format!("{} has no practice trials", spec.id())));
    }
    if step > 1 || answers.len() != step {
        return Err(Error::Prompt(format!(
            "practice step {step} needs exactly {step} earlier answers, got {}",
            answers.len()
        )));
    }
    let t = texts(env, spec)?;
    Ok(RenderedPrompt {
        spec_id: spec.id(),
        system_text: t.system[&spec.system].replace("{X}", env.placeholder(spec, &argument.domain)),
        turns: practice_turns(argument, spec, env, answers, step)?,
        expected: spec.response_kind(),
    })
}

pub fn compose_rating_prompt(
    argument: &Argument,
    spec: &PromptSpec,
    practice_responses: Option<&[String]>,
    env: &PromptEnv,
) -> Result<RenderedPrompt> {
    if spec.experiment != Experiment::Exp2 {
        return Err(Error::Prompt(format!("{} is not a rating design", spec.id())));
    }
    let t = texts(env, spec)?;
    let x = env.placeholder(spec, &argument.domain);
    let fmt = &t.arguments[&spec.argument];
    let qo = question_options(t, spec);
    let block = render_argument(argument, fmt, "A", &env.lexicon)?;
    let turns = if spec.uses_practice() {
        let answers = practice_responses.unwrap_or(&[]);
        if answers.len() != 2 {
            return Err(Error::Prompt(format!(
                "{} needs the agent's two practice answers, got {}",
                spec.id(),
                answers.len()
            )));
        }
        let mut turns = practice_turns(argument, spec, env, answers, 1)?;
        turns.push(ChatMessage::assistant(answers[1].clone()));
        let outro = &t.practice.as_ref().expect("checked above").outro;
        turns.push(ChatMessage::user(join_parts(&[outro, &block, &qo])));
        turns
    } else {
        if practice_responses.is_some_and(|r| !r.is_empty()) {
            return Err(Error::Prompt(format!("practice answers given but {} has no practice trials", spec.id())));
        }
        let context = t.context[&spec.context].replace("{X}", x);
        vec![ChatMessage::user(join_parts(&[&context, &block, &qo]))]
    };
    Ok(RenderedPrompt {
        spec_id: spec.id(),
        system_text: t.system[&spec.system].replace("{X}", x),
        turns,
        expected: spec.response_kind(),
    })
}

/// The 0–20 similarity elicitation for one category pair. `x` names the
/// class (e.g. "mammals").
pub fn similarity_prompt(x: &str, a: &str, b: &str, env: &PromptEnv) -> Result<String> {
    Ok(env
        .templates
        .similarity
        .replace("{X}", x)
        .replace("{C1}", env.lexicon.plural(a)?)
        .replace("{C2}", env.lexicon.plural(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::packaged;

    fn env() -> (PromptEnv, NormStore) {
        let store = packaged::exp1().unwrap();
        (PromptEnv::packaged(&store), store)
    }

    fn dogs_hedgehogs(store: &NormStore) -> ArgumentPair {
        let d = store.domain("Mammals").unwrap();
        ArgumentPair {
            pair_id: "t".into(),
            phenomenon: crate::Phenomenon::Typicality,
            domain: "Mammals".into(),
            stronger: Argument::general(&["dog"], d).unwrap(),
            weaker: Argument::general(&["hedgehog"], d).unwrap(),
        }
    }

    #[test]
    fn argument_variants() {
        let (env, store) = env();
        let a = Argument::general(&["dog"], store.domain("Mammals").unwrap()).unwrap();
        let f = &env.templates.exp1.arguments;
        assert_eq!(
            render_argument(&a, &f[&1], "A", &env.lexicon).unwrap(),
            "Argument A: Fact - Dogs have property P.\n Claim - All mammals have property P."
        );
        assert_eq!(
            render_argument(&a, &f[&2], "A", &env.lexicon).unwrap(),
            "Argument A: Fact - Dogs possess property P.\n Claim - All mammals possess property P."
        );
        assert_eq!(
            render_argument(&a, &f[&3], "A", &env.lexicon).unwrap(),
            "Argument A: Based on the fact that dogs have property P, we claim that all mammals have property P."
        );
    }

    #[test]
    fn multi_premise_and_irregular_plurals() {
        let (env, store) = env();
        let d = store.domain("Mammals").unwrap();
        let a = Argument::specific(&["mouse", "sheep", "deer"], "cow", d).unwrap();
        let f = &env.templates.exp1.arguments;
        assert_eq!(
            render_argument(&a, &f[&1], "B", &env.lexicon).unwrap(),
            "Argument B: Fact - Mice have property P.\n Fact - Sheep have property P.\n Fact - Deer have property P.\n Claim - Cows have property P."
        );
        assert_eq!(
            render_argument(&a, &f[&3], "B", &env.lexicon).unwrap(),
            "Argument B: Based on the fact that mice, sheep and deer have property P, we claim that cows have property P."
        );
        let mut missing = a.clone();
        missing.premises[0] = "unicorn".into();
        assert!(render_argument(&missing, &f[&1], "A", &env.lexicon).is_err());
    }

    #[test]
    fn flipped_order_swaps_blocks() {
        let (env, store) = env();
        let pair = dogs_hedgehogs(&store);
        let spec = PromptSpec::exp1_best();
        let a = compose_pair_prompt(&pair, &spec, LabelOrder::StrongerFirst, &env).unwrap();
        let b = compose_pair_prompt(&pair, &spec, LabelOrder::WeakerFirst, &env).unwrap();
        let swapped = a.turns[0]
            .content
            .replace("Argument A: Fact - Dogs", "@")
            .replace("Argument B: Fact - Hedgehogs", "Argument A: Fact - Hedgehogs")
            .replace('@', "Argument B: Fact - Dogs");
        // Block order also changes, so compare as sets of lines.
        let mut l1: Vec<&str> = swapped.lines().collect();
        let mut l2: Vec<&str> = b.turns[0].content.lines().collect();
        l1.sort_unstable();
        l2.sort_unstable();
        assert_eq!(l1, l2);
        assert_eq!(a.system_text, b.system_text);
    }

    #[test]
    fn vehicles_placeholder_is_objects() {
        let (env, store) = env();
        let d = store.domain("Vehicles").unwrap();
        let pair = ArgumentPair {
            pair_id: "v".into(),
            phenomenon: crate::Phenomenon::Typicality,
            domain: "Vehicles".into(),
            stronger: Argument::general(&["car"], d).unwrap(),
            weaker: Argument::general(&["sled"], d).unwrap(),
        };
        let p = compose_pair_prompt(&pair, &PromptSpec::exp1_best(), LabelOrder::StrongerFirst, &env).unwrap();
        assert!(p.system_text.starts_with("You are an expert on objects and"));
    }

    #[test]
    fn spec_ids_round_trip_and_validate() {
        let t = PromptTemplates::packaged();
        for exp in [Experiment::Exp1, Experiment::Exp2] {
            for s in PromptSpec::all(exp, &t) {
                assert_eq!(PromptSpec::parse(exp, &s.id()).unwrap(), s);
                s.validate(&t).unwrap();
            }
        }
        assert!(PromptSpec::parse(Experiment::Exp1, "S3-C1-A1-Q3").is_err());
        assert!(PromptSpec::parse(Experiment::Exp1, "S3-C5-A1-Q3-O1").unwrap().validate(&t).is_err());
        assert!(PromptSpec::parse(Experiment::Exp1, "S3-C1-A1-Q3-O1-T1").unwrap().validate(&t).is_err());
        assert!(PromptSpec::parse(Experiment::Exp2, "S3-C4-A1-Q3-O1-T1").unwrap().validate(&t).is_err());
    }

    #[test]
    fn practice_rules() {
        let store = packaged::exp2().unwrap();
        let env = PromptEnv::packaged(&store);
        let a = Argument::general(&["dog"], store.domain("Mammals").unwrap()).unwrap();
        let t2 = PromptSpec::parse(Experiment::Exp2, "S3-C1-A1-Q1-O1-T2").unwrap();
        let answers = vec!["70".to_string(), "60".to_string()];
        assert!(compose_rating_prompt(&a, &t2, Some(&answers), &env).is_err());
        let single = compose_rating_prompt(&a, &t2, None, &env).unwrap();
        assert_eq!(single.turns.len(), 1);

        let t1 = PromptSpec::exp2_best();
        assert!(compose_rating_prompt(&a, &t1, None, &env).is_err());
        let full = compose_rating_prompt(&a, &t1, Some(&answers), &env).unwrap();
        assert_eq!(full.turns.len(), 5);
        let roles: Vec<Role> = full.turns.iter().map(|m| m.role).collect();
        assert_eq!(roles, [Role::User, Role::Assistant, Role::User, Role::Assistant, Role::User]);

        // The staged practice prompts are prefixes of the final one.
        let p0 = compose_practice_prompt(&a, &t1, 0, &[], &env).unwrap();
        let p1 = compose_practice_prompt(&a, &t1, 1, &answers[..1], &env).unwrap();
        assert_eq!(p0.turns[..], full.turns[..1]);
        assert_eq!(p1.turns[..], full.turns[..3]);
        assert!(compose_practice_prompt(&a, &t1, 1, &[], &env).is_err());
    }

    #[test]
    fn completion_joins_with_blank_line() {
        let (env, store) = env();
        let p = compose_pair_prompt(&dogs_hedgehogs(&store), &PromptSpec::exp1_best(), LabelOrder::StrongerFirst, &env)
            .unwrap();
        assert_eq!(p.completion_text(), format!("{}\n\n{}", p.system_text, p.turns[0].content));
        let s1 = PromptSpec::parse(Experiment::Exp1, "S1-C1-A1-Q3-O1").unwrap();
        let p = compose_pair_prompt(&dogs_hedgehogs(&store), &s1, LabelOrder::StrongerFirst, &env).unwrap();
        assert_eq!(p.completion_text(), p.turns[0].content);
        assert_eq!(p.chat_messages().len(), 1);
    }

    #[test]
    fn canonical_mapping_mirrors() {
        for k in 1..=6 {
            let k = k as f64;
            assert_eq!(LabelOrder::WeakerFirst.canonical(k), LabelOrder::StrongerFirst.canonical(7.0 - k));
        }
    }

    #[test]
    fn similarity_prompt_fills_slots() {
        let (env, _) = env();
        let p = similarity_prompt("mammals", "mouse", "dog", &env).unwrap();
        assert!(p.contains("how similar are mice and dogs on a scale of 0 to 20?"));
        assert!(p.starts_with("You are an expert on mammals"));
        assert!(p.ends_with("Answer:"));
    }
}
