//! The argument-pair suite: constraint filtering and per-split selection.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::templates::{sample_candidates, Constraint, PhenomenonTemplate};
use crate::argument::{Argument, ArgumentPair, Conclusion, Phenomenon};
use crate::error::{Error, Result};
use crate::rng;
use crate::scm::{ScmModel, ScmParams};
use crate::similarity::{zscore_partition, Partition, SimilarityMatrix, TypicalityVector};
use crate::store::{DomainNorms, NormStore};

pub const DEFAULT_POOL_SIZE: usize = 5000;
pub const DEFAULT_THRESHOLD: f64 = 0.75;
pub const PAIRS_PER_SPLIT: usize = 24;

/// Norm-derived lookups shared by every candidate of one domain.
struct Lookups<'a> {
    sim: &'a SimilarityMatrix,
    typ: Option<&'a TypicalityVector>,
    typ_split: Option<Partition<usize>>,
    sim_split: Partition<(usize, usize)>,
}

impl<'a> Lookups<'a> {
    fn new(norms: &'a DomainNorms, threshold: f64) -> Result<Self> {
        let sim = &norms.similarity;
        let sim_split = zscore_partition(&sim.pair_values(), threshold)?;
        let typ = norms.typicality.as_ref();
        let typ_split = typ.map(|t| t.partition(threshold)).transpose()?;
        Ok(Lookups {
            sim,
            typ,
            typ_split,
            sim_split,
        })
    }

    fn idx(&self, c: &str) -> Option<usize> {
        self.sim.domain().index_of(c)
    }

    fn typ(&self, c: &str) -> Result<f64> {
        self.typ
            .ok_or_else(|| Error::Schema(format!("typicality norms required for {}", self.sim.domain().name)))?
            .get(c)
    }

    fn typ_split(&self) -> Result<&Partition<usize>> {
        self.typ_split
            .as_ref()
            .ok_or_else(|| Error::Schema(format!("typicality norms required for {}", self.sim.domain().name)))
    }

    fn pair_key(&self, a: &str, b: &str) -> Option<(usize, usize)> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        Some((i.min(j), i.max(j)))
    }

    fn sim(&self, a: &str, b: &str) -> Result<f64> {
        self.sim.sim(a, b)
    }

    fn max_sim(&self, premises: &[String], c: &str) -> Result<f64> {
        premises.iter().map(|p| self.sim(p, c)).try_fold(f64::NEG_INFINITY, |m, v| Ok(m.max(v?)))
    }
}

fn specific_label(a: &Argument) -> Option<&str> {
    match &a.conclusion {
        Conclusion::Specific(c) => Some(c),
        Conclusion::General(_) => None,
    }
}

fn unique_premise<'a>(a: &'a Argument, other: &Argument) -> Option<&'a String> {
    let mut it = a.premises.iter().filter(|p| !other.premises.contains(p));
    let first = it.next();
    if it.next().is_some() {
        None
    } else {
        first
    }
}

fn keep(pair: &ArgumentPair, constraint: Constraint, lk: &Lookups) -> Result<bool> {
    use Phenomenon::*;
    let (s, w) = (&pair.stronger, &pair.weaker);
    Ok(match constraint {
        Constraint::TypicalitySplit => {
            // Typicality: premise of each side. Asymmetry: the premise of the
            // stronger side is the typical one. Inclusion: the shared premise
            // is typical and the weaker's specific conclusion atypical.
            let (hi, lo): (&str, &str) = match pair.phenomenon {
                Typicality | Asymmetry => (&s.premises[0], &w.premises[0]),
                InclusionFallacy => match specific_label(w) {
                    Some(c) => (&s.premises[0], c),
                    None => return Ok(false),
                },
                _ => return Ok(true),
            };
            let split = lk.typ_split()?;
            match (lk.idx(hi), lk.idx(lo)) {
                (Some(h), Some(l)) => split.is_high(&h) && split.is_low(&l),
                _ => false,
            }
        }
        Constraint::SimilaritySplit => {
            let (Some(c1), Some(c2)) = (specific_label(s), specific_label(w)) else {
                return Ok(false);
            };
            let high = s
                .premises
                .iter()
                .filter_map(|p| lk.pair_key(p, c1))
                .any(|k| lk.sim_split.is_high(&k));
            let low = w
                .premises
                .iter()
                .map(|p| lk.pair_key(p, c2))
                .all(|k| k.is_some_and(|k| lk.sim_split.is_low(&k)));
            high && low
        }
        Constraint::UniquePremiseControl => {
            let Some(u) = unique_premise(s, w) else { return Ok(false) };
            let general = s.is_general();
            let score = |p: &str| -> Result<f64> {
                match specific_label(s) {
                    Some(c) => lk.sim(p, c),
                    None => lk.typ(p),
                }
            };
            let bound = match pair.phenomenon {
                DiversityGeneral | DiversitySpecific => {
                    let Some(v) = unique_premise(w, s) else { return Ok(false) };
                    score(v)?
                }
                MonotonicityGeneral | MonotonicitySpecific => {
                    if general {
                        let mut m = f64::NEG_INFINITY;
                        for p in &w.premises {
                            m = m.max(lk.typ(p)?);
                        }
                        m
                    } else {
                        lk.max_sim(&w.premises, specific_label(s).expect("specific"))?
                    }
                }
                _ => return Ok(true),
            };
            score(u)? <= bound
        }
        Constraint::SupplementaryPremise | Constraint::ConclusionNesting => true,
    })
}

/// Keeps the candidates that satisfy every constraint of `template` under
/// the z-score split at `threshold`.
pub fn apply_constraints(
    candidates: &[ArgumentPair],
    template: &PhenomenonTemplate,
    norms: &DomainNorms,
    threshold: f64,
) -> Result<Vec<ArgumentPair>> {
    let lk = Lookups::new(norms, threshold)?;
    let mut out = Vec::new();
    for pair in candidates {
        let mut ok = true;
        for &c in &template.constraints {
            if !keep(pair, c, &lk)? {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(pair.clone());
        }
    }
    if out.is_empty() && !candidates.is_empty() {
        return Err(Error::Unsatisfiable(format!(
            "{} constraints unsatisfiable at this threshold ({threshold} SD) in {}; \
             try a smaller threshold or a larger candidate pool",
            template.phenomenon,
            norms.similarity.domain().name
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedPair {
    pub pair: ArgumentPair,
    /// `None` where the model cannot score the pair.
    pub scm_disparity: Option<f64>,
}

/// Top `k` by disparity for model-computable phenomena (ties by pair key),
/// otherwise a uniform sample of `k`.
pub fn select_exp1_pairs<R: Rng + ?Sized>(
    filtered: &[ArgumentPair],
    model: &ScmModel,
    k: usize,
    rng: &mut R,
) -> Result<Vec<SelectedPair>> {
    if filtered.len() < k {
        let context = filtered
            .first()
            .map(|p| format!("{} / {}", p.domain, p.phenomenon))
            .unwrap_or_else(|| "empty candidate list".into());
        return Err(Error::Shortfall {
            needed: k,
            found: filtered.len(),
            context,
        });
    }
    let computable = filtered.first().is_some_and(|p| p.phenomenon.scm_computable());
    if !computable {
        return Ok(filtered
            .choose_multiple(rng, k)
            .map(|p| SelectedPair {
                pair: p.clone(),
                scm_disparity: None,
            })
            .collect());
    }
    let mut scored = filtered
        .iter()
        .map(|p| Ok((model.disparity(p)?, p.key(), p)))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    Ok(scored
        .into_iter()
        .take(k)
        .map(|(d, _, p)| SelectedPair {
            pair: p.clone(),
            scm_disparity: Some(d),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Exp1Params {
    pub pool_size: usize,
    pub threshold: f64,
    pub pairs_per_split: usize,
    pub alpha: f64,
}

impl Default for Exp1Params {
    fn default() -> Self {
        Exp1Params {
            pool_size: DEFAULT_POOL_SIZE,
            threshold: DEFAULT_THRESHOLD,
            pairs_per_split: PAIRS_PER_SPLIT,
            alpha: ScmParams::default().alpha,
        }
    }
}

/// Runs sampling, filtering and selection for every primary domain and
/// phenomenon. Each split draws from its own seeded stream, so splits are
/// independent of one another and of iteration order.
pub fn generate_exp1(store: &NormStore, params: &Exp1Params, seed: u64) -> Result<Vec<SelectedPair>> {
    let scm = ScmParams::new(params.alpha)?;
    let mut out = Vec::new();
    for domain in store.domains().primary() {
        let norms = store.norms(&domain.name)?;
        let supplementary = store.domains().supplementary_of(domain)?;
        let model = ScmModel::new(&norms.similarity, scm)?;
        for phenomenon in Phenomenon::ALL {
            let template = PhenomenonTemplate::for_phenomenon(phenomenon);
            let mut r = rng::stream(seed, &format!("exp1/{}/{}", domain.name, phenomenon.tag()));
            let pool = sample_candidates(&template, domain, supplementary, params.pool_size, &mut r)?;
            let filtered = apply_constraints(&pool, &template, norms, params.threshold)?;
            let selected = select_exp1_pairs(&filtered, &model, params.pairs_per_split, &mut r)?;
            for (i, mut s) in selected.into_iter().enumerate() {
                s.pair.pair_id = format!("{}-{}-{:02}", domain.name.to_lowercase(), phenomenon.tag(), i + 1);
                out.push(s);
            }
        }
    }
    Ok(out)
}
