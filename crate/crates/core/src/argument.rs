//! Inductive arguments and argument pairs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};

pub const MAX_PREMISES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum Conclusion {
    /// A category at the same level as the premises.
    Specific(String),
    /// A superordinate class ("mammals"), read as "all mammals".
    General(String),
}

impl Conclusion {
    pub fn label(&self) -> &str {
        match self {
            Conclusion::Specific(s) | Conclusion::General(s) => s,
        }
    }

    pub fn is_general(&self) -> bool {
        matches!(self, Conclusion::General(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Argument {
    pub domain: String,
    pub premises: Vec<String>,
    pub conclusion: Conclusion,
}

impl Argument {
    /// Validates premises against `domain`, also admitting categories of
    /// `supplementary` (the source of out-of-category premises).
    pub fn new(
        premises: Vec<String>,
        conclusion: Conclusion,
        domain: &Domain,
        supplementary: Option<&Domain>,
    ) -> Result<Self> {
        if premises.is_empty() || premises.len() > MAX_PREMISES {
            return Err(Error::Validation(format!(
                "an argument takes 1 to {MAX_PREMISES} premises, got {}",
                premises.len()
            )));
        }
        for (i, p) in premises.iter().enumerate() {
            if premises[..i].contains(p) {
                return Err(Error::Validation(format!("premise `{p}` repeated")));
            }
            let known = domain.contains(p) || supplementary.is_some_and(|s| s.contains(p));
            if !known {
                return Err(Error::UnknownCategory {
                    category: p.clone(),
                    domain: domain.name.clone(),
                });
            }
        }
        match &conclusion {
            Conclusion::Specific(c) => {
                if !domain.contains(c) {
                    return Err(Error::UnknownCategory {
                        category: c.clone(),
                        domain: domain.name.clone(),
                    });
                }
                if premises.contains(c) {
                    return Err(Error::Validation(format!(
                        "conclusion `{c}` also appears as a premise"
                    )));
                }
            }
            Conclusion::General(label) => {
                let ok = *label == domain.superordinate
                    || domain.broader_superordinate.as_deref() == Some(label.as_str());
                if !ok {
                    return Err(Error::Validation(format!(
                        "general conclusion `{label}` is not a superordinate of {}",
                        domain.name
                    )));
                }
            }
        }
        Ok(Argument {
            domain: domain.name.clone(),
            premises,
            conclusion,
        })
    }

    pub fn specific<S: AsRef<str>>(premises: &[S], conclusion: &str, domain: &Domain) -> Result<Self> {
        Self::new(
            premises.iter().map(|p| p.as_ref().to_string()).collect(),
            Conclusion::Specific(conclusion.to_string()),
            domain,
            None,
        )
    }

    pub fn general<S: AsRef<str>>(premises: &[S], domain: &Domain) -> Result<Self> {
        Self::new(
            premises.iter().map(|p| p.as_ref().to_string()).collect(),
            Conclusion::General(domain.superordinate.clone()),
            domain,
            None,
        )
    }

    pub fn is_general(&self) -> bool {
        self.conclusion.is_general()
    }

    /// Canonical text used for deduplication and stable tie-breaking.
    /// Premise order does not matter.
    pub fn key(&self) -> String {
        let mut ps: Vec<&str> = self.premises.iter().map(String::as_str).collect();
        ps.sort_unstable();
        let tag = if self.is_general() { "all " } else { "" };
        format!("{{{}}}>{tag}{}", ps.join(","), self.conclusion.label())
    }

    pub fn sorted_premises(&self) -> Vec<String> {
        let mut ps = self.premises.clone();
        ps.sort();
        ps
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} -> ", self.premises.join(", "))?;
        match &self.conclusion {
            Conclusion::Specific(c) => write!(f, "{c}"),
            Conclusion::General(c) => write!(f, "all {c}"),
        }
    }
}

/// The eleven phenomena, with general and specific variants of Diversity,
/// Monotonicity and Non-Monotonicity counted separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phenomenon {
    Similarity,
    Typicality,
    Specificity,
    MonotonicityGeneral,
    MonotonicitySpecific,
    DiversityGeneral,
    DiversitySpecific,
    NonMonotonicityGeneral,
    NonMonotonicitySpecific,
    Asymmetry,
    InclusionFallacy,
}

impl Phenomenon {
    pub const ALL: [Phenomenon; 11] = [
        Phenomenon::Similarity,
        Phenomenon::Typicality,
        Phenomenon::Specificity,
        Phenomenon::MonotonicityGeneral,
        Phenomenon::MonotonicitySpecific,
        Phenomenon::DiversityGeneral,
        Phenomenon::DiversitySpecific,
        Phenomenon::NonMonotonicityGeneral,
        Phenomenon::NonMonotonicitySpecific,
        Phenomenon::Asymmetry,
        Phenomenon::InclusionFallacy,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Phenomenon::Similarity => "similarity",
            Phenomenon::Typicality => "typicality",
            Phenomenon::Specificity => "specificity",
            Phenomenon::MonotonicityGeneral => "monotonicity_general",
            Phenomenon::MonotonicitySpecific => "monotonicity_specific",
            Phenomenon::DiversityGeneral => "diversity_general",
            Phenomenon::DiversitySpecific => "diversity_specific",
            Phenomenon::NonMonotonicityGeneral => "nonmonotonicity_general",
            Phenomenon::NonMonotonicitySpecific => "nonmonotonicity_specific",
            Phenomenon::Asymmetry => "asymmetry",
            Phenomenon::InclusionFallacy => "inclusion_fallacy",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Phenomenon> {
        Phenomenon::ALL.into_iter().find(|p| p.tag() == tag)
    }

    /// Human-readable name as used in result tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Phenomenon::Similarity => "Similarity",
            Phenomenon::Typicality => "Typicality",
            Phenomenon::Specificity => "Specificity",
            Phenomenon::MonotonicityGeneral => "Monotonicity (general)",
            Phenomenon::MonotonicitySpecific => "Monotonicity (specific)",
            Phenomenon::DiversityGeneral => "Diversity (general)",
            Phenomenon::DiversitySpecific => "Diversity (specific)",
            Phenomenon::NonMonotonicityGeneral => "Non-monotonicity (general)",
            Phenomenon::NonMonotonicitySpecific => "Non-monotonicity (specific)",
            Phenomenon::Asymmetry => "Asymmetry",
            Phenomenon::InclusionFallacy => "Inclusion fallacy",
        }
    }

    /// Phenomena whose pairs involve categories or classes outside the
    /// domain's similarity matrix, so no SCM score exists.
    pub fn scm_computable(self) -> bool {
        !matches!(
            self,
            Phenomenon::Specificity
                | Phenomenon::NonMonotonicityGeneral
                | Phenomenon::NonMonotonicitySpecific
        )
    }
}

impl fmt::Display for Phenomenon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentPair {
    pub pair_id: String,
    pub phenomenon: Phenomenon,
    pub domain: String,
    /// The theoretically stronger argument.
    pub stronger: Argument,
    pub weaker: Argument,
}

impl ArgumentPair {
    pub fn key(&self) -> String {
        format!("{}|{}", self.stronger.key(), self.weaker.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn birds() -> Domain {
        let mut d = Domain::new(
            "Birds",
            "birds",
            ["robin", "sparrow", "goose", "penguin"].iter().map(|s| s.to_string()).collect(),
        )
        .unwrap();
        d.broader_superordinate = Some("animals".into());
        d
    }

    #[test]
    fn validates_premise_count() {
        let d = birds();
        let none: [&str; 0] = [];
        assert!(Argument::general(&none, &d).is_err());
        assert!(Argument::general(&["robin", "sparrow", "goose", "penguin"], &d).is_err());
        assert!(Argument::general(&["robin", "sparrow", "goose"], &d).is_ok());
    }

    #[test]
    fn specific_conclusion_cannot_be_premise() {
        let d = birds();
        assert!(Argument::specific(&["robin"], "robin", &d).is_err());
        assert!(Argument::specific(&["robin"], "goose", &d).is_ok());
    }

    #[test]
    fn general_conclusion_must_be_superordinate() {
        let d = birds();
        let ok = Argument::new(vec!["robin".into()], Conclusion::General("animals".into()), &d, None);
        assert!(ok.is_ok());
        let bad = Argument::new(vec!["robin".into()], Conclusion::General("fish".into()), &d, None);
        assert!(bad.is_err());
    }

    #[test]
    fn supplementary_premises_admitted_only_when_given() {
        let d = birds();
        let insects = Domain::new("Insects", "insects", vec!["bee".into()]).unwrap();
        let premises = vec!["robin".to_string(), "bee".to_string()];
        let conclusion = Conclusion::Specific("goose".into());
        assert!(Argument::new(premises.clone(), conclusion.clone(), &d, None).is_err());
        assert!(Argument::new(premises, conclusion, &d, Some(&insects)).is_ok());
    }

    #[test]
    fn key_ignores_premise_order() {
        let d = birds();
        let a = Argument::specific(&["robin", "sparrow"], "goose", &d).unwrap();
        let b = Argument::specific(&["sparrow", "robin"], "goose", &d).unwrap();
        assert_eq!(a.key(), b.key());
        assert_eq!(a.to_string(), "{robin, sparrow} -> goose");
    }

    #[test]
    fn phenomenon_tags_round_trip() {
        for p in Phenomenon::ALL {
            assert_eq!(Phenomenon::from_tag(p.tag()), Some(p));
        }
        assert_eq!(Phenomenon::ALL.iter().filter(|p| p.scm_computable()).count(), 8);
    }
}
