//! Argument-pair templates, one per phenomenon, and the candidate sampler.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::argument::{Argument, ArgumentPair, Conclusion, Phenomenon};
use crate::domain::Domain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConclusionKind {
    Specific,
    General,
    /// One argument concludes to the class, the other to a member.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// The stronger argument's contrasting premise is highly typical and the
    /// weaker one's atypical.
    TypicalitySplit,
    /// The stronger argument has a highly similar premise-conclusion pair and
    /// every premise-conclusion pair of the weaker one is dissimilar.
    SimilaritySplit,
    /// The stronger argument's unique premise is no more typical (general) or
    /// similar to the conclusion (specific) than its counterpart.
    UniquePremiseControl,
    /// The weaker argument carries exactly one supplementary-domain premise.
    SupplementaryPremise,
    /// The weaker argument concludes to the broader superordinate.
    ConclusionNesting,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhenomenonTemplate {
    pub phenomenon: Phenomenon,
    pub arity_strong: usize,
    pub arity_weak: usize,
    pub conclusion_kind: ConclusionKind,
    pub constraints: Vec<Constraint>,
}

impl PhenomenonTemplate {
    pub fn for_phenomenon(phenomenon: Phenomenon) -> Self {
        use Constraint::*;
        use Phenomenon::*;
        let (arity_strong, arity_weak, conclusion_kind, constraints) = match phenomenon {
            Similarity => (2, 2, ConclusionKind::Specific, vec![SimilaritySplit]),
            Typicality => (1, 1, ConclusionKind::General, vec![TypicalitySplit]),
            Specificity => (2, 2, ConclusionKind::General, vec![ConclusionNesting]),
            MonotonicityGeneral => (3, 2, ConclusionKind::General, vec![UniquePremiseControl]),
            MonotonicitySpecific => (3, 2, ConclusionKind::Specific, vec![UniquePremiseControl]),
            DiversityGeneral => (2, 2, ConclusionKind::General, vec![UniquePremiseControl]),
            DiversitySpecific => (2, 2, ConclusionKind::Specific, vec![UniquePremiseControl]),
            NonMonotonicityGeneral => (2, 3, ConclusionKind::General, vec![SupplementaryPremise]),
            NonMonotonicitySpecific => (1, 2, ConclusionKind::Specific, vec![SupplementaryPremise]),
            Asymmetry => (1, 1, ConclusionKind::Specific, vec![TypicalitySplit]),
            InclusionFallacy => (1, 1, ConclusionKind::Mixed, vec![TypicalitySplit]),
        };
        PhenomenonTemplate {
            phenomenon,
            arity_strong,
            arity_weak,
            conclusion_kind,
            constraints,
        }
    }

    pub fn all() -> Vec<PhenomenonTemplate> {
        Phenomenon::ALL.into_iter().map(Self::for_phenomenon).collect()
    }

    /// Distinct in-domain categories one candidate needs.
    pub fn distinct_categories(&self) -> usize {
        use Phenomenon::*;
        match self.phenomenon {
            Similarity | MonotonicitySpecific | DiversitySpecific => 4,
            MonotonicityGeneral | DiversityGeneral => 3,
            Typicality | Specificity | NonMonotonicityGeneral | NonMonotonicitySpecific | Asymmetry
            | InclusionFallacy => 2,
        }
    }

    pub fn needs_supplementary(&self) -> bool {
        self.constraints.contains(&Constraint::SupplementaryPremise)
    }

    /// Fills the template's slots once. `cats` are distinct in-domain
    /// categories, `extra` a supplementary-domain category when required.
    fn instantiate(
        &self,
        cats: &[&String],
        extra: Option<&String>,
        domain: &Domain,
        supplementary: Option<&Domain>,
    ) -> Result<(Argument, Argument)> {
        use Phenomenon::*;
        let s = |v: &[&String]| v.iter().map(|c| (*c).clone()).collect::<Vec<_>>();
        let specific = |c: &String| Conclusion::Specific(c.clone());
        let general = Conclusion::General(domain.superordinate.clone());
        let mk = |ps: Vec<String>, c: Conclusion| Argument::new(ps, c, domain, supplementary);
        let (x, y) = (cats[0], cats[1]);
        Ok(match self.phenomenon {
            Similarity => (mk(s(&[x, y]), specific(cats[2]))?, mk(s(&[x, y]), specific(cats[3]))?),
            Typicality => (mk(s(&[x]), general.clone())?, mk(s(&[y]), general)?),
            Specificity => {
                let broader = domain.broader_superordinate.clone().ok_or_else(|| {
                    Error::Schema(format!("domain {} has no broader superordinate", domain.name))
                })?;
                (mk(s(&[x, y]), general)?, mk(s(&[x, y]), Conclusion::General(broader))?)
            }
            MonotonicityGeneral => (mk(s(&[x, y, cats[2]]), general.clone())?, mk(s(&[x, y]), general)?),
            MonotonicitySpecific => (
                mk(s(&[x, y, cats[2]]), specific(cats[3]))?,
                mk(s(&[x, y]), specific(cats[3]))?,
            ),
            DiversityGeneral => (mk(s(&[x, y]), general.clone())?, mk(s(&[x, cats[2]]), general)?),
            DiversitySpecific => (
                mk(s(&[x, y]), specific(cats[3]))?,
                mk(s(&[x, cats[2]]), specific(cats[3]))?,
            ),
            NonMonotonicityGeneral => {
                let e = extra.expect("supplementary slot filled");
                (mk(s(&[x, y]), general.clone())?, mk(s(&[x, y, e]), general)?)
            }
            NonMonotonicitySpecific => {
                let e = extra.expect("supplementary slot filled");
                (mk(s(&[x]), specific(y))?, mk(s(&[x, e]), specific(y))?)
            }
            Asymmetry => (mk(s(&[x]), specific(y))?, mk(s(&[y]), specific(x))?),
            InclusionFallacy => (mk(s(&[x]), general)?, mk(s(&[x]), specific(y))?),
        })
    }
}

/// Draws `pool_size` candidates by filling every slot with a uniformly
/// sampled category, rejecting repeats inside an argument and dropping exact
/// duplicate pairs.
pub fn sample_candidates<R: Rng + ?Sized>(
    template: &PhenomenonTemplate,
    domain: &Domain,
    supplementary: Option<&Domain>,
    pool_size: usize,
    rng: &mut R,
) -> Result<Vec<ArgumentPair>> {
    let need = template.distinct_categories();
    if domain.len() < need {
        return Err(Error::Validation(format!(
            "{} needs {need} distinct categories but {} has {}",
            template.phenomenon,
            domain.name,
            domain.len()
        )));
    }
    let supp = if template.needs_supplementary() {
        let s = supplementary.ok_or_else(|| {
            Error::Schema(format!(
                "{} needs a supplementary domain for {}",
                domain.name, template.phenomenon
            ))
        })?;
        if s.is_empty() {
            return Err(Error::Schema(format!("supplementary domain {} is empty", s.name)));
        }
        Some(s)
    } else {
        None
    };

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for _ in 0..pool_size {
        let cats: Vec<&String> = domain.categories.choose_multiple(rng, need).collect();
        let extra = supp.map(|s| s.categories.choose(rng).expect("non-empty"));
        let (stronger, weaker) = template.instantiate(&cats, extra, domain, supp)?;
        let pair = ArgumentPair {
            pair_id: String::new(),
            phenomenon: template.phenomenon,
            domain: domain.name.clone(),
            stronger,
            weaker,
        };
        if seen.insert(pair.key()) {
            out.push(pair);
        }
    }
    Ok(out)
}

fn premise_set(a: &Argument) -> Vec<&str> {
    let mut v: Vec<&str> = a.premises.iter().map(String::as_str).collect();
    v.sort_unstable();
    v
}

/// Checks that a pair has the shape its phenomenon's template produces.
pub fn validate_pair(pair: &ArgumentPair, domain: &Domain, supplementary: Option<&Domain>) -> Result<()> {
    use Phenomenon::*;
    let t = PhenomenonTemplate::for_phenomenon(pair.phenomenon);
    let (s, w) = (&pair.stronger, &pair.weaker);
    let fail = |why: &str| Err(Error::Validation(format!("{} pair {}: {why}", pair.phenomenon, pair.key())));
    if s.domain != domain.name || w.domain != domain.name || pair.domain != domain.name {
        return fail("arguments must share the pair's domain");
    }
    if s.premises.len() != t.arity_strong || w.premises.len() != t.arity_weak {
        return fail("premise counts do not match the template");
    }
    let in_domain = |a: &Argument| a.premises.iter().all(|p| domain.contains(p));
    let sup = &domain.superordinate;
    let is_sup = |a: &Argument| matches!(&a.conclusion, Conclusion::General(l) if l == sup);
    let same_conclusion = s.conclusion == w.conclusion;
    let ok = match pair.phenomenon {
        Similarity => {
            premise_set(s) == premise_set(w)
                && !s.is_general()
                && !w.is_general()
                && !same_conclusion
                && in_domain(s)
        }
        Typicality => is_sup(s) && is_sup(w) && premise_set(s) != premise_set(w) && in_domain(s) && in_domain(w),
        Specificity => {
            let broader = domain.broader_superordinate.as_deref();
            is_sup(s)
                && matches!(&w.conclusion, Conclusion::General(l) if Some(l.as_str()) == broader)
                && premise_set(s) == premise_set(w)
                && in_domain(s)
        }
        MonotonicityGeneral | MonotonicitySpecific => {
            let general = pair.phenomenon == MonotonicityGeneral;
            same_conclusion
                && s.is_general() == general
                && (!general || is_sup(s))
                && w.premises.iter().all(|p| s.premises.contains(p))
                && in_domain(s)
        }
        DiversityGeneral | DiversitySpecific => {
            let general = pair.phenomenon == DiversityGeneral;
            let shared = s.premises.iter().filter(|p| w.premises.contains(p)).count();
            same_conclusion
                && s.is_general() == general
                && (!general || is_sup(s))
                && shared == 1
                && in_domain(s)
                && in_domain(w)
        }
        NonMonotonicityGeneral | NonMonotonicitySpecific => {
            let general = pair.phenomenon == NonMonotonicityGeneral;
            let outsiders: Vec<&String> = w.premises.iter().filter(|p| !domain.contains(p)).collect();
            let from_supp = outsiders
                .iter()
                .all(|p| supplementary.is_some_and(|d| d.contains(p)));
            same_conclusion
                && s.is_general() == general
                && in_domain(s)
                && outsiders.len() == 1
                && from_supp
                && s.premises.iter().all(|p| w.premises.contains(p))
        }
        Asymmetry => match (&s.conclusion, &w.conclusion) {
            (Conclusion::Specific(cs), Conclusion::Specific(cw)) => {
                s.premises[0] == *cw && w.premises[0] == *cs && in_domain(s)
            }
            _ => false,
        },
        InclusionFallacy => {
            is_sup(s) && !w.is_general() && s.premises == w.premises && in_domain(s)
        }
    };
    if ok {
        Ok(())
    } else {
        fail("structure does not match the template")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn domain(n: usize) -> Domain {
        let mut d = Domain::new("D", "things", (0..n).map(|i| format!("c{i:02}")).collect()).unwrap();
        d.broader_superordinate = Some("stuff".into());
        d.supplementary_domain = Some("S".into());
        d
    }

    fn supp() -> Domain {
        Domain::new("S", "others", vec!["s1".into(), "s2".into(), "s3".into()]).unwrap()
    }

    #[test]
    fn zero_pool_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = PhenomenonTemplate::for_phenomenon(Phenomenon::Similarity);
        assert!(sample_candidates(&t, &domain(24), None, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn arity_exceeding_domain_is_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = PhenomenonTemplate::for_phenomenon(Phenomenon::Similarity);
        assert!(sample_candidates(&t, &domain(3), None, 10, &mut rng).is_err());
    }

    #[test]
    fn similarity_pool_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = PhenomenonTemplate::for_phenomenon(Phenomenon::Similarity);
        let d = domain(24);
        let pool = sample_candidates(&t, &d, None, 5000, &mut rng).unwrap();
        assert!(!pool.is_empty() && pool.len() <= 5000);
        let keys: HashSet<_> = pool.iter().map(|p| p.key()).collect();
        assert_eq!(keys.len(), pool.len());
        for p in &pool {
            validate_pair(p, &d, None).unwrap();
            assert_eq!(p.stronger.premises, p.weaker.premises);
            assert_ne!(p.stronger.conclusion, p.weaker.conclusion);
        }
    }

    #[test]
    fn every_template_yields_valid_pairs() {
        let d = domain(24);
        let s = supp();
        for t in PhenomenonTemplate::all() {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let pool = sample_candidates(&t, &d, Some(&s), 300, &mut rng).unwrap();
            assert!(!pool.is_empty(), "{}", t.phenomenon);
            for p in &pool {
                validate_pair(p, &d, Some(&s)).unwrap();
            }
        }
    }

    #[test]
    fn nonmonotonic_weak_has_one_supplementary_premise() {
        let d = domain(24);
        let s = supp();
        for ph in [Phenomenon::NonMonotonicityGeneral, Phenomenon::NonMonotonicitySpecific] {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let t = PhenomenonTemplate::for_phenomenon(ph);
            for p in sample_candidates(&t, &d, Some(&s), 200, &mut rng).unwrap() {
                let n = p.weaker.premises.iter().filter(|q| s.contains(q)).count();
                assert_eq!(n, 1);
                assert!(p.stronger.premises.iter().all(|q| d.contains(q)));
            }
            assert!(sample_candidates(&t, &d, None, 5, &mut rng).is_err());
        }
    }

    #[test]
    fn validator_rejects_wrong_shape() {
        let d = domain(24);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = PhenomenonTemplate::for_phenomenon(Phenomenon::Similarity);
        let mut p = sample_candidates(&t, &d, None, 1, &mut rng).unwrap().remove(0);
        p.phenomenon = Phenomenon::Typicality;
        assert!(validate_pair(&p, &d, None).is_err());
    }
}
