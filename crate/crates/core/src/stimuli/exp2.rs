//! The argument-rating suite: binned two-premise sampling, derived
//! single-premise arguments and stratified blocks.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::templates::ConclusionKind;
use crate::argument::Argument;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::scm::{ScmModel, ScmParams};
use crate::store::NormStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinMode {
    /// Equal-width intervals of model strength.
    Value,
    /// Equal-size slices of the strength ranking.
    Rank,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Exp2Params {
    pub samples: usize,
    pub bins: usize,
    pub per_bin: usize,
    pub premise_set_cap: usize,
    pub category_cap: usize,
    pub max_retries: usize,
    pub bin_mode: BinMode,
    pub blocks: usize,
    pub alpha: f64,
}

impl Default for Exp2Params {
    fn default() -> Self {
        Exp2Params {
            samples: 10_000,
            bins: 25,
            per_bin: 4,
            premise_set_cap: 3,
            category_cap: 15,
            max_retries: 50,
            bin_mode: BinMode::Rank,
            blocks: 10,
            alpha: ScmParams::default().alpha,
        }
    }
}

/// Seed the packaged suites are generated and checked with.
pub const DEFAULT_SEED: u64 = 7;

impl Exp2Params {
    pub fn target(&self) -> usize {
        self.bins * self.per_bin
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredArgument {
    pub argument: Argument,
    pub scm_strength: f64,
}

fn draw<R: Rng + ?Sized>(domain: &Domain, kind: ConclusionKind, rng: &mut R) -> Result<Argument> {
    match kind {
        ConclusionKind::General => {
            let ps: Vec<&String> = domain.categories.choose_multiple(rng, 2).collect();
            Argument::general(&ps, domain)
        }
        ConclusionKind::Specific => {
            let cs: Vec<&String> = domain.categories.choose_multiple(rng, 3).collect();
            Argument::specific(&cs[..2], cs[2], domain)
        }
        ConclusionKind::Mixed => Err(Error::Validation("rating arguments are either general or specific".into())),
    }
}

fn bin_of(i: usize, strength: f64, lo: f64, hi: f64, n: usize, params: &Exp2Params) -> usize {
    let bins = params.bins;
    match params.bin_mode {
        BinMode::Value => {
            if hi <= lo {
                return 0;
            }
            (((strength - lo) / (hi - lo) * bins as f64).floor() as usize).min(bins - 1)
        }
        BinMode::Rank => (i * bins / n).min(bins - 1),
    }
}

/// The category cap counts premise mentions only.
fn categories(a: &Argument) -> impl Iterator<Item = &str> {
    a.premises.iter().map(String::as_str)
}

/// One pass of capped sampling over the bins; `None` if some bin runs dry.
fn fill_bins<R: Rng + ?Sized>(
    bins: &[Vec<usize>],
    pool: &[ScoredArgument],
    params: &Exp2Params,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let mut set_count: HashMap<Vec<String>, usize> = HashMap::new();
    let mut cat_count: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<usize> = (0..bins.len()).collect();
    // Thin bins first, so scarce members are not blocked by caps spent elsewhere.
    order.sort_by_key(|&b| (bins[b].len(), b));
    let mut chosen = Vec::with_capacity(params.target());
    for b in order {
        let mut members = bins[b].clone();
        members.shuffle(rng);
        let mut taken = 0;
        for m in members {
            if taken == params.per_bin {
                break;
            }
            let a = &pool[m].argument;
            let set = a.sorted_premises();
            if set_count.get(&set).copied().unwrap_or(0) >= params.premise_set_cap {
                continue;
            }
            if categories(a).any(|c| cat_count.get(c).copied().unwrap_or(0) >= params.category_cap) {
                continue;
            }
            *set_count.entry(set).or_default() += 1;
            for c in categories(a) {
                *cat_count.entry(c).or_default() += 1;
            }
            chosen.push(m);
            taken += 1;
        }
        if taken < params.per_bin {
            return None;
        }
    }
    Some(chosen)
}

/// Samples two-premise arguments, bins them by model strength and draws
/// `per_bin` from each bin under the premise-set and category caps. Output
/// is ordered from strongest to weakest.
pub fn generate_exp2_two_premise<R: Rng + ?Sized>(
    domain: &Domain,
    kind: ConclusionKind,
    model: &ScmModel,
    params: &Exp2Params,
    rng: &mut R,
) -> Result<Vec<ScoredArgument>> {
    if params.bins == 0 || params.per_bin == 0 {
        return Err(Error::Validation("bins and per_bin must be positive".into()));
    }
    let mut seen = HashSet::new();
    let mut pool = Vec::new();
    for _ in 0..params.samples {
        let a = draw(domain, kind, rng)?;
        if seen.insert(a.key()) {
            let s = model.strength(&a)?;
            pool.push(ScoredArgument {
                argument: a,
                scm_strength: s,
            });
        }
    }
    pool.sort_by(|a, b| {
        b.scm_strength
            .total_cmp(&a.scm_strength)
            .then_with(|| a.argument.key().cmp(&b.argument.key()))
    });
    let n = pool.len();
    let hi = pool.first().map_or(0.0, |a| a.scm_strength);
    let lo = pool.last().map_or(0.0, |a| a.scm_strength);
    let mut bins = vec![Vec::new(); params.bins];
    for (i, a) in pool.iter().enumerate() {
        // Bin 0 holds the weakest arguments.
        let rank_from_weak = n - 1 - i;
        bins[bin_of(rank_from_weak, a.scm_strength, lo, hi, n, params)].push(i);
    }
    let thin = bins.iter().filter(|b| b.len() < params.per_bin).count();
    if thin > 0 {
        return Err(Error::Shortfall {
            needed: params.per_bin,
            found: bins.iter().map(Vec::len).min().unwrap_or(0),
            context: format!(
                "{} {:?}: {thin} of {} {:?} bins hold fewer than {} of {} unique arguments",
                domain.name, kind, params.bins, params.bin_mode, params.per_bin, n
            ),
        });
    }
    for _ in 0..params.max_retries.max(1) {
        let mut sub = StreamRng::seed_from_u64(rng.gen());
        if let Some(mut chosen) = fill_bins(&bins, &pool, params, &mut sub) {
            chosen.sort_unstable();
            return Ok(chosen.into_iter().map(|i| pool[i].clone()).collect());
        }
    }
    Err(Error::Shortfall {
        needed: params.target(),
        found: 0,
        context: format!(
            "{} {:?}: caps could not be met in {} attempts",
            domain.name, kind, params.max_retries
        ),
    })
}

/// Splits every argument into its single-premise arguments, keeping the
/// first occurrence of each. Also returns, per output, the indices of the
/// source arguments it came from.
pub fn derive_single_premise(two_premise: &[Argument]) -> Vec<(Argument, Vec<usize>)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut out: Vec<(Argument, Vec<usize>)> = Vec::new();
    for (src, a) in two_premise.iter().enumerate() {
        for p in &a.premises {
            let single = Argument {
                domain: a.domain.clone(),
                premises: vec![p.clone()],
                conclusion: a.conclusion.clone(),
            };
            match index.get(&single.key()) {
                Some(&i) => {
                    if !out[i].1.contains(&src) {
                        out[i].1.push(src);
                    }
                }
                None => {
                    index.insert(single.key(), out.len());
                    out.push((single, vec![src]));
                }
            }
        }
    }
    out
}

/// Block assignment over a score-stratified ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAssignment {
    pub blocks: Vec<Vec<usize>>,
    /// True when tied scores produced the extra block.
    pub tie_block: bool,
}

/// Orders items by score (descending), cuts the ordering into strata of
/// `n_blocks` and deals one member of each stratum to every block. When any
/// scores tie, an extra block is added that takes a tied member from each
/// stratum that has one (otherwise a random member).
pub fn stratify_blocks<R: Rng + ?Sized>(scores: &[f64], n_blocks: usize, rng: &mut R) -> Result<BlockAssignment> {
    if n_blocks == 0 || scores.len() % n_blocks != 0 {
        return Err(Error::Validation(format!(
            "{} items cannot be split into strata of {n_blocks}",
            scores.len()
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut by_score: BTreeMap<u64, usize> = BTreeMap::new();
    for s in scores {
        *by_score.entry(s.to_bits()).or_default() += 1;
    }
    let tied = |i: usize| by_score[&scores[i].to_bits()] > 1;
    let tie_block = scores.iter().enumerate().any(|(i, _)| tied(i));

    let mut blocks = vec![Vec::new(); n_blocks + usize::from(tie_block)];
    for stratum in order.chunks(n_blocks) {
        let mut members = stratum.to_vec();
        if tie_block {
            let pick = members
                .iter()
                .copied()
                .find(|&i| tied(i))
                .unwrap_or_else(|| *members.choose(rng).expect("non-empty stratum"));
            blocks[n_blocks].push(pick);
        }
        members.shuffle(rng);
        for (b, m) in members.into_iter().enumerate() {
            blocks[b].push(m);
        }
    }
    Ok(BlockAssignment { blocks, tie_block })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Split {
    pub domain: String,
    pub kind: ConclusionKind,
    pub two_premise: Vec<ScoredArgument>,
    /// Single-premise arguments with the positions of their sources in
    /// `two_premise`.
    pub single_premise: Vec<(ScoredArgument, Vec<usize>)>,
    pub blocks: BlockAssignment,
}

/// Generates both conclusion kinds for every primary domain.
pub fn generate_exp2(store: &NormStore, params: &Exp2Params, seed: u64) -> Result<Vec<Exp2Split>> {
    let scm = ScmParams::new(params.alpha)?;
    let mut out = Vec::new();
    for domain in store.domains().primary() {
        let model = ScmModel::new(store.similarity(&domain.name)?, scm)?;
        for kind in [ConclusionKind::General, ConclusionKind::Specific] {
            let label = format!("exp2/{}/{:?}", domain.name, kind).to_lowercase();
            let mut r = crate::rng::stream(seed, &label);
            let two = generate_exp2_two_premise(domain, kind, &model, params, &mut r)?;
            let args: Vec<Argument> = two.iter().map(|a| a.argument.clone()).collect();
            let single = derive_single_premise(&args)
                .into_iter()
                .map(|(a, src)| {
                    let s = model.strength(&a)?;
                    Ok((
                        ScoredArgument {
                            argument: a,
                            scm_strength: s,
                        },
                        src,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let scores: Vec<f64> = two.iter().map(|a| a.scm_strength).collect();
            let blocks = stratify_blocks(&scores, params.blocks, &mut r)?;
            out.push(Exp2Split {
                domain: domain.name.clone(),
                kind,
                two_premise: two,
                single_premise: single,
                blocks,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use rand_chacha::ChaCha8Rng;

    fn birds() -> Domain {
        Domain::new(
            "Birds",
            "birds",
            ["canary", "seagull", "stork", "robin"].iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_premise_from_pair() {
        let d = birds();
        let a = Argument::specific(&["canary", "seagull"], "stork", &d).unwrap();
        let out = derive_single_premise(&[a]);
        let shown: Vec<String> = out.iter().map(|(a, _)| a.to_string()).collect();
        assert_eq!(shown, ["{canary} -> stork", "{seagull} -> stork"]);
        assert!(derive_single_premise(&[]).is_empty());
    }

    #[test]
    fn single_premise_dedups_and_tracks_sources() {
        let d = birds();
        let a = Argument::specific(&["canary", "seagull"], "stork", &d).unwrap();
        let b = Argument::specific(&["canary", "robin"], "stork", &d).unwrap();
        let out = derive_single_premise(&[a, b]);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].1, vec![0, 1]);
    }

    #[test]
    fn stratify_distinct_scores() {
        let scores: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let b = stratify_blocks(&scores, 10, &mut r).unwrap();
        assert!(!b.tie_block);
        assert_eq!(b.blocks.len(), 10);
        let mut all: Vec<usize> = b.blocks.concat();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        for block in &b.blocks {
            assert_eq!(block.len(), 10);
            // One member per decile of the score range.
            let mut deciles: Vec<usize> = block.iter().map(|&i| (99 - i) / 10).collect();
            deciles.sort_unstable();
            assert_eq!(deciles, (0..10).collect::<Vec<_>>());
        }
    }

    #[test]
    fn stratify_tie_adds_block() {
        let mut scores: Vec<f64> = (0..100).map(|i| i as f64).collect();
        scores[37] = scores[38];
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let b = stratify_blocks(&scores, 10, &mut r).unwrap();
        assert!(b.tie_block);
        assert_eq!(b.blocks.len(), 11);
        assert_eq!(b.blocks[10].len(), 10);
        assert!(b.blocks[10].contains(&37) || b.blocks[10].contains(&38));
    }

    #[test]
    fn stratify_rejects_uneven() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        assert!(stratify_blocks(&[1.0, 2.0, 3.0], 2, &mut r).is_err());
        assert!(stratify_blocks(&[1.0], 0, &mut r).is_err());
    }

    fn check_caps(args: &[ScoredArgument], p: &Exp2Params) {
        let mut sets: HashMap<Vec<String>, usize> = HashMap::new();
        let mut cats: HashMap<String, usize> = HashMap::new();
        for a in args {
            *sets.entry(a.argument.sorted_premises()).or_default() += 1;
            for c in categories(&a.argument) {
                *cats.entry(c.to_string()).or_default() += 1;
            }
        }
        assert!(sets.values().all(|&n| n <= p.premise_set_cap));
        assert!(cats.values().all(|&n| n <= p.category_cap));
    }

    #[test]
    fn packaged_suite_sizes_and_caps() {
        let store = crate::store::packaged::exp2().unwrap();
        let p = Exp2Params::default();
        let splits = generate_exp2(&store, &p, DEFAULT_SEED).unwrap();
        assert_eq!(splits.len(), 6);
        let mut two = 0;
        let mut single = 0;
        for s in &splits {
            assert_eq!(s.two_premise.len(), 100);
            check_caps(&s.two_premise, &p);
            let n = s.single_premise.len();
            assert!((24..=169).contains(&n), "{} {:?}: {n}", s.domain, s.kind);
            if s.kind == ConclusionKind::General {
                assert_eq!(n, 24);
            }
            two += s.two_premise.len();
            single += n;
            let keys: HashSet<String> = s.single_premise.iter().map(|(a, _)| a.argument.key()).collect();
            assert_eq!(keys.len(), n);
            for (a, src) in &s.single_premise {
                assert!(!src.is_empty());
                for &i in src {
                    let parent = &s.two_premise[i].argument;
                    assert!(parent.premises.contains(&a.argument.premises[0]));
                    assert_eq!(parent.conclusion, a.argument.conclusion);
                }
            }
        }
        assert_eq!(two, 600);
        assert!(single >= 6 * 24);
    }
}
