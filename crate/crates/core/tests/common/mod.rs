#![allow(dead_code)]

use std::collections::HashMap;

use orbitcount::group::{free_reduce, inverse_word, Dehn, Symbol, Word};

/// Breadth-first enumeration of a small-cancellation group that decides
/// equality only through Dehn's algorithm on u·v⁻¹. Elements are bucketed by
/// their image in the abelianization to keep comparisons few.
pub struct DehnBfs {
    pub spheres: Vec<Vec<Word>>,
}

/// Values of integer linear forms on the exponent-sum vector. The forms must
/// vanish on every relator for the key to be an invariant.
fn abelian_key(w: &[Symbol], forms: &[Vec<i32>]) -> Vec<i32> {
    forms
        .iter()
        .map(|f| {
            w.iter()
                .map(|&s| {
                    if s % 2 == 0 {
                        f[(s / 2) as usize]
                    } else {
                        -f[(s / 2) as usize]
                    }
                })
                .sum()
        })
        .collect()
}

pub fn unit_forms(rank: usize) -> Vec<Vec<i32>> {
    (0..rank)
        .map(|i| (0..rank).map(|j| i32::from(i == j)).collect())
        .collect()
}

/// Image under generator i ↦ generator `map[i]` (a retraction onto a free
/// factor when the map kills the relators), freely reduced.
fn retract(w: &[Symbol], map: &[Symbol]) -> Word {
    let img: Vec<Symbol> = w.iter().map(|&s| map[(s / 2) as usize] ^ (s & 1)).collect();
    free_reduce(&img)
}

impl DehnBfs {
    pub fn run(
        dehn: &Dehn,
        rank: usize,
        n: usize,
        forms: &[Vec<i32>],
        retractions: &[Vec<Symbol>],
    ) -> Self {
        let alpha = 2 * rank;
        let mut buckets: HashMap<(Vec<i32>, Vec<Word>), Vec<Word>> = HashMap::new();
        let key = |w: &[Symbol]| {
            (
                abelian_key(w, forms),
                retractions
                    .iter()
                    .map(|m| retract(w, m))
                    .collect::<Vec<_>>(),
            )
        };
        buckets.insert(key(&[]), vec![Vec::new()]);
        let mut spheres: Vec<Vec<Word>> = vec![vec![Vec::new()]];
        for _ in 1..=n {
            let mut next = Vec::new();
            for g in spheres.last().unwrap() {
                for s in 0..alpha as Symbol {
                    let mut w = g.clone();
                    w.push(s);
                    let bucket = buckets.entry(key(&w)).or_default();
                    let known = bucket.iter().any(|v| {
                        let mut t = w.clone();
                        t.extend(inverse_word(v));
                        dehn.is_trivial(&t)
                    });
                    if !known {
                        bucket.push(w.clone());
                        next.push(w);
                    }
                }
            }
            spheres.push(next);
        }
        DehnBfs { spheres }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.spheres.iter().map(Vec::len).collect()
    }
}

/// Retractions of the genus-2 surface group onto free factors:
/// (a,b,c,d) ↦ (a,b,b,a) and (a,b,c,d) ↦ (d,c,c,d).
pub fn genus2_retractions() -> Vec<Vec<Symbol>> {
    vec![vec![0, 2, 2, 0], vec![6, 4, 4, 6]]
}
