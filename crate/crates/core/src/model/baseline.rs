use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PredictionRecord;
use crate::corpus::ParagraphPair;

pub const RANDOM_SOURCE: &str = "random";

/// Draws each label uniformly from {0, 1}; the score equals the label.
pub fn random_baseline(pairs: &[ParagraphPair], seed: u64) -> Vec<PredictionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs
        .iter()
        .map(|p| {
            let label = u8::from(rng.gen::<bool>());
            PredictionRecord::from_score(p.doc_id, p.pair_index, f64::from(label), RANDOM_SOURCE)
        })
        .collect()
}
