//! Independent BLEU-4 scorer used to cross-check the library scorer.
//!
//! Deliberately naive: n-grams are compared as vectors with linear scans
//! and the geometric mean is taken as a product root instead of a log mean.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ngrams(words: &[&str], n: usize) -> Vec<Vec<String>> {
    if words.len() < n {
        return Vec::new();
    }
    (0..=words.len() - n)
        .map(|i| words[i..i + n].iter().map(|w| w.to_string()).collect())
        .collect()
}

fn clipped(cand: &[Vec<String>], refr: &[Vec<String>]) -> usize {
    let mut pool: Vec<Option<&Vec<String>>> = refr.iter().map(Some).collect();
    let mut hits = 0;
    for g in cand {
        if let Some(slot) = pool.iter_mut().find(|s| s.is_some_and(|r| r == g)) {
            *slot = None;
            hits += 1;
        }
    }
    hits
}

pub fn oracle_corpus_bleu(pairs: &[(String, String)]) -> f64 {
    let mut hit = [0usize; 4];
    let mut tot = [0usize; 4];
    let (mut c_len, mut r_len) = (0usize, 0usize);
    for (c, r) in pairs {
        let cw: Vec<&str> = c.split_whitespace().collect();
        let rw: Vec<&str> = r.split_whitespace().collect();
        c_len += cw.len();
        r_len += rw.len();
        for n in 1..=4 {
            let cg = ngrams(&cw, n);
            let rg = ngrams(&rw, n);
            hit[n - 1] += clipped(&cg, &rg);
            tot[n - 1] += cg.len();
        }
    }
    if c_len == 0 || (0..4).any(|i| hit[i] == 0) {
        return 0.0;
    }
    let product: f64 = (0..4).map(|i| hit[i] as f64 / tot[i] as f64).product();
    let bp = if c_len > r_len {
        1.0
    } else {
        (1.0 - r_len as f64 / c_len as f64).exp()
    };
    100.0 * bp * product.powf(0.25)
}

pub const VOCAB: [&str; 16] = [
    "take", "1", "tablet", "by", "mouth", "every", "day", "twice", "a", "as", "needed", "for", "pain",
    "inhale", "2", "puffs",
];

pub fn synthetic_pairs(seed: u64, count: usize) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(4..14);
            let reference: Vec<&str> = (0..len).map(|_| *VOCAB.choose(&mut rng).unwrap()).collect();
            let mut cand = reference.clone();
            for _ in 0..rng.gen_range(0..4) {
                match rng.gen_range(0..3) {
                    0 if cand.len() > 1 => {
                        let i = rng.gen_range(0..cand.len());
                        cand.remove(i);
                    }
                    1 => {
                        let i = rng.gen_range(0..=cand.len());
                        cand.insert(i, VOCAB.choose(&mut rng).unwrap());
                    }
                    _ => {
                        let i = rng.gen_range(0..cand.len());
                        cand[i] = VOCAB.choose(&mut rng).unwrap();
                    }
                }
            }
            (cand.join(" "), reference.join(" "))
        })
        .collect()
}
