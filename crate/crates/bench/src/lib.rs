//! Synthetic inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use style_seam::ParagraphPair;

const WORDS: &[&str] = &[
    "the", "committee", "reviewed", "proposal", "and", "found", "it", "lacking", "yeah", "cool", "stuff", "people",
    "would", "never", "buy", "that", "evidence", "suggests", "otherwise", "time", "world", "we", "tried", "again",
];
const ENDINGS: &[&str] = &[".", "?", "!", "...", "(sic)."];

/// A paragraph of roughly `words` tokens with mixed punctuation.
pub fn paragraph(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut out = String::new();
    for i in 0..words {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
        if rng.gen_bool(0.1) {
            out.push_str(ENDINGS[rng.gen_range(0..ENDINGS.len())]);
        }
    }
    out
}

/// `count` labeled pairs grouped into documents of four pairs.
pub fn pairs(count: usize, words: usize, seed: u64) -> Vec<ParagraphPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut previous = paragraph(&mut rng, words);
    (0..count)
        .map(|i| {
            let next = paragraph(&mut rng, words);
            let pair = ParagraphPair {
                doc_id: (i / 4) as u64 + 1,
                pair_index: i % 4,
                left: std::mem::replace(&mut previous, next.clone()),
                right: next,
                label: Some(rng.gen_range(0..2)),
            };
            if i % 4 == 3 {
                previous = paragraph(&mut rng, words);
            }
            pair
        })
        .collect()
}

/// Random label vectors of length `n`.
pub fn labels(n: usize, seed: u64) -> (Vec<u8>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gold = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let pred = (0..n).map(|_| rng.gen_range(0..2)).collect();
    (gold, pred)
}
