//! The similarity-coverage model as an agent.

use std::collections::HashMap;

use super::record::{JudgmentKind, JudgmentRecord};
use super::Agent;
use crate::argument::{Argument, ArgumentPair};
use crate::domain::Domain;
use crate::error::Result;
use crate::prompts::{LabelOrder, PromptEnv, PromptSpec, ResponseKind};
use crate::scm::{ScmModel, ScmParams};
use crate::similarity::{Scale, SimilarityMatrix};
use crate::store::NormStore;

/// Judges from SCM scores without rendering prompts.
pub struct ScmAgent {
    id: String,
    models: HashMap<String, ScmModel>,
    raw: HashMap<String, SimilarityMatrix>,
}

impl ScmAgent {
    pub fn new(id: &str, store: &NormStore, params: ScmParams) -> Result<Self> {
        let mut models = HashMap::new();
        let mut raw = HashMap::new();
        for d in store.domains().primary() {
            let m = store.similarity(&d.name)?;
            models.insert(d.name.clone(), ScmModel::new(m, params)?);
            raw.insert(d.name.clone(), m.clone());
        }
        Ok(ScmAgent { id: id.into(), models, raw })
    }

    fn model(&self, domain: &str) -> Result<&ScmModel> {
        self.models
            .get(domain)
            .ok_or_else(|| crate::Error::NotComputable(format!("no similarity norms for {domain}")))
    }
}

/// The extreme response favouring the stronger argument in the prompt's
/// label space, or the midpoint for a tie.
fn pair_response(disparity: f64, order: LabelOrder, kind: ResponseKind) -> f64 {
    let (a_end, b_end, mid) = match kind {
        ResponseKind::Choice => (1.0, 6.0, 3.5),
        ResponseKind::Number => (0.0, 100.0, 50.0),
    };
    if disparity == 0.0 {
        return mid;
    }
    let favours_a = (disparity > 0.0) == (order == LabelOrder::StrongerFirst);
    if favours_a {
        a_end
    } else {
        b_end
    }
}

impl Agent for ScmAgent {
    fn id(&self) -> &str {
        &self.id
    }

    fn judge_pair(&self, pair: &ArgumentPair, spec: &PromptSpec, order: LabelOrder, _env: &PromptEnv) -> JudgmentRecord {
        let kind = spec.response_kind();
        let rec = JudgmentRecord::new(&self.id, &pair.pair_id, JudgmentKind::Pair, &spec.id(), kind, Some(order));
        match self.model(&pair.domain).and_then(|m| m.disparity(pair)) {
            Ok(d) => JudgmentRecord {
                derived_score: Some(pair_response(d, order, kind)),
                ..rec
            },
            Err(e) => rec.failed("not_computable", e),
        }
    }

    fn rate_argument(
        &self,
        stimulus_id: &str,
        argument: &Argument,
        spec: &PromptSpec,
        _env: &PromptEnv,
    ) -> JudgmentRecord {
        let rec = JudgmentRecord::new(
            &self.id,
            stimulus_id,
            JudgmentKind::Rating,
            &spec.id(),
            spec.response_kind(),
            None,
        );
        match self.model(&argument.domain).and_then(|m| m.strength(argument)) {
            Ok(s) => JudgmentRecord {
                derived_score: Some(100.0 * s),
                ..rec
            },
            Err(e) => rec.failed("not_computable", e),
        }
    }

    fn elicit_similarity(&self, domain: &Domain, a: &str, b: &str, _env: &PromptEnv) -> Result<f64> {
        // Norms already on the 0-20 scale pass through untouched, so a matrix
        // elicited from this agent normalizes to the same bits as the norms.
        let m = self
            .raw
            .get(&domain.name)
            .ok_or_else(|| crate::Error::NotComputable(format!("no similarity norms for {}", domain.name)))?;
        let v = m.sim(a, b)?;
        if m.scale() == Scale::RATING_0_20 {
            Ok(v)
        } else {
            Ok(20.0 * (v - m.scale().min) / (m.scale().max - m.scale().min))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argument::Phenomenon;
    use crate::store::packaged;

    #[test]
    fn pair_mapping() {
        assert_eq!(pair_response(0.2, LabelOrder::WeakerFirst, ResponseKind::Choice), 6.0);
        assert_eq!(pair_response(0.2, LabelOrder::StrongerFirst, ResponseKind::Choice), 1.0);
        assert_eq!(pair_response(-0.2, LabelOrder::StrongerFirst, ResponseKind::Choice), 6.0);
        assert_eq!(pair_response(0.0, LabelOrder::StrongerFirst, ResponseKind::Choice), 3.5);
        assert_eq!(pair_response(0.2, LabelOrder::WeakerFirst, ResponseKind::Number), 100.0);
    }

    #[test]
    fn judges_and_rates_from_norms() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let agent = ScmAgent::new("scm", &store, ScmParams::default()).unwrap();
        let m = store.domain("Mammals").unwrap();
        let pair = ArgumentPair {
            pair_id: "p".into(),
            phenomenon: Phenomenon::Typicality,
            domain: "Mammals".into(),
            stronger: Argument::general(&["dog"], m).unwrap(),
            weaker: Argument::general(&["hedgehog"], m).unwrap(),
        };
        let spec = PromptSpec::exp1_best();
        let r = agent.judge_pair(&pair, &spec, LabelOrder::WeakerFirst, &env);
        let model = ScmModel::new(store.similarity("Mammals").unwrap(), ScmParams::default()).unwrap();
        let expected = if model.disparity(&pair).unwrap() > 0.0 { 6.0 } else { 1.0 };
        assert_eq!(r.derived_score, Some(expected));

        let arg = Argument::general(&["dog"], m).unwrap();
        let rated = agent.rate_argument("a", &arg, &PromptSpec::exp2_best(), &env);
        assert_eq!(rated.derived_score, Some(100.0 * model.strength(&arg).unwrap()));

        let outside = Argument::general(&["dog", "sparrow"], m);
        if let Ok(outside) = outside {
            assert!(agent.rate_argument("b", &outside, &PromptSpec::exp2_best(), &env).error.is_some());
        }
        assert_eq!(agent.elicit_similarity(m, "dog", "dog", &env).unwrap(), 20.0);
    }
}
