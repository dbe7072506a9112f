use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::PredictionRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    /// Label by member majority; score is the fraction of members voting 1.
    MajorityVote,
    /// Score is the mean member score; label by threshold.
    SoftmaxMean,
}

impl EnsembleMode {
    pub fn source_name(self) -> &'static str {
        match self {
            EnsembleMode::MajorityVote => "ensemble_majority",
            EnsembleMode::SoftmaxMean => "ensemble_softmax_mean",
        }
    }
}

impl FromStr for EnsembleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" => Ok(EnsembleMode::MajorityVote),
            "softmax_mean" => Ok(EnsembleMode::SoftmaxMean),
            other => Err(Error::Usage(format!(
                "unknown ensemble mode '{other}' (expected majority or softmax_mean)"
            ))),
        }
    }
}

impl fmt::Display for EnsembleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleMode::MajorityVote => "majority",
            EnsembleMode::SoftmaxMean => "softmax_mean",
        })
    }
}

type Keyed<'a> = BTreeMap<(u64, usize), &'a PredictionRecord>;

fn index_member(member: usize, records: &[PredictionRecord]) -> Result<Keyed<'_>> {
    let mut keyed = BTreeMap::new();
    for r in records {
        if keyed.insert(r.key(), r).is_some() {
            return Err(Error::Usage(format!(
                "model {member} has two predictions for document {} pair {}",
                r.doc_id, r.pair_index
            )));
        }
    }
    Ok(keyed)
}

/// Combines per-model predictions covering identical pair sets.
pub fn ensemble(predictions_by_model: &[Vec<PredictionRecord>], mode: EnsembleMode) -> Result<Vec<PredictionRecord>> {
    let models = predictions_by_model.len();
    if models == 0 {
        return Err(Error::Usage("ensemble needs at least one model".into()));
    }
    if mode == EnsembleMode::MajorityVote && models.is_multiple_of(2) {
        return Err(Error::Usage(format!(
            "majority vote needs an odd number of models, got {models}"
        )));
    }
    let members = predictions_by_model
        .iter()
        .enumerate()
        .map(|(i, records)| index_member(i, records))
        .collect::<Result<Vec<_>>>()?;

    let reference = &members[0];
    for (i, member) in members.iter().enumerate().skip(1) {
        let missing: Vec<_> = reference.keys().filter(|k| !member.contains_key(k)).collect();
        let extra: Vec<_> = member.keys().filter(|k| !reference.contains_key(k)).collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(Error::Usage(format!(
                "model {i} coverage differs from model 0: missing (doc, pair) {missing:?}, extra {extra:?}"
            )));
        }
    }

    let n = models as f64;
    let combined = reference
        .keys()
        .map(|&(doc_id, pair_index)| {
            let member_records = members.iter().map(|m| m[&(doc_id, pair_index)]);
            match mode {
                EnsembleMode::MajorityVote => {
                    let votes = member_records.filter(|r| r.label == 1).count();
                    let mut record = PredictionRecord::from_score(
                        doc_id,
                        pair_index,
                        votes as f64 / n,
                        mode.source_name(),
                    );
                    record.label = u8::from(2 * votes > models);
                    record
                }
                EnsembleMode::SoftmaxMean => {
                    let mean = member_records.map(|r| r.score).sum::<f64>() / n;
                    PredictionRecord::from_score(doc_id, pair_index, mean, mode.source_name())
                }
            }
        })
        .collect();
    Ok(combined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(score: f64) -> Vec<PredictionRecord> {
        vec![PredictionRecord::from_score(1, 0, score, "m")]
    }

    #[test]
    fn majority_two_of_three() {
        let out = ensemble(&[one(1.0), one(1.0), one(0.0)], EnsembleMode::MajorityVote).unwrap();
        assert_eq!(out[0].label, 1);
        assert_eq!(out[0].score, 2.0 / 3.0);
    }

    #[test]
    fn softmax_mean_example() {
        let out = ensemble(&[one(0.2), one(0.3), one(0.9)], EnsembleMode::SoftmaxMean).unwrap();
        let expected = (0.2 + 0.3 + 0.9) / 3.0;
        assert_eq!(out[0].score, expected);
        assert!((out[0].score - 0.466_666_666_666_666_7).abs() < 1e-15);
        assert_eq!(out[0].label, 0);
    }

    #[test]
    fn single_model_softmax_mean_is_identity() {
        let member = vec![
            PredictionRecord::from_score(1, 0, 0.31, "m"),
            PredictionRecord::from_score(1, 1, 0.77, "m"),
        ];
        let out = ensemble(std::slice::from_ref(&member), EnsembleMode::SoftmaxMean).unwrap();
        let scores: Vec<f64> = out.iter().map(|r| r.score).collect();
        assert_eq!(scores, [0.31, 0.77]);
    }

    #[test]
    fn even_majority_rejected() {
        assert!(matches!(
            ensemble(&[one(1.0), one(0.0)], EnsembleMode::MajorityVote),
            Err(Error::Usage(_))
        ));
        assert!(matches!(ensemble(&[], EnsembleMode::SoftmaxMean), Err(Error::Usage(_))));
    }

    #[test]
    fn coverage_mismatch_rejected() {
        let other = vec![PredictionRecord::from_score(2, 0, 0.5, "m")];
        let err = ensemble(&[one(0.5), other], EnsembleMode::SoftmaxMean).unwrap_err();
        assert!(err.to_string().contains("coverage"), "{err}");
    }

    #[test]
    fn mode_names() {
        assert_eq!("majority".parse::<EnsembleMode>().unwrap(), EnsembleMode::MajorityVote);
        assert_eq!("softmax_mean".parse::<EnsembleMode>().unwrap(), EnsembleMode::SoftmaxMean);
        assert!("mean".parse::<EnsembleMode>().is_err());
    }

    proptest! {
        #[test]
        fn hard_scores_make_modes_agree(labels in proptest::collection::vec(proptest::collection::vec(0u8..2, 6), 1..4)) {
            // odd member count
            let mut labels = labels;
            if labels.len() % 2 == 0 { labels.pop(); }
            let members: Vec<Vec<PredictionRecord>> = labels.iter().map(|ls| {
                ls.iter().enumerate().map(|(i, &l)| PredictionRecord::from_score(1, i, f64::from(l), "m")).collect()
            }).collect();
            let majority = ensemble(&members, EnsembleMode::MajorityVote).unwrap();
            let mean = ensemble(&members, EnsembleMode::SoftmaxMean).unwrap();
            for (a, b) in majority.iter().zip(&mean) {
                prop_assert_eq!(a.label, b.label);
            }
        }
    }
}
