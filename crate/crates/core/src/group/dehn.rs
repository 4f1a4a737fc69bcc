use super::word::{free_reduce, inverse_word, Symbol, Word};
use crate::error::{input, Result};

/// Dehn's algorithm for a C′(1/6) presentation.
#[derive(Clone, Debug)]
pub struct Dehn {
    relators: Vec<Word>,
    /// Cyclic conjugates of relators and their inverses, bucketed by first symbol.
    by_first: Vec<Vec<Word>>,
}

fn lcp(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Dehn {
    pub fn new(alphabet_size: usize, relators: &[Word]) -> Result<Self> {
        let mut by_first: Vec<Vec<Word>> = vec![Vec::new(); alphabet_size];
        let mut all: Vec<Word> = Vec::new();
        for r in relators {
            let red = free_reduce(r);
            if red.len() != r.len() || r.is_empty() || r[0] == super::word::inv(r[r.len() - 1]) {
                return input("relators must be non-empty and cyclically reduced");
            }
            for base in [r.clone(), inverse_word(r)] {
                for i in 0..base.len() {
                    let mut c = base[i..].to_vec();
                    c.extend_from_slice(&base[..i]);
                    if !all.contains(&c) {
                        all.push(c);
                    }
                }
            }
        }
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let p = lcp(a, b);
                if 6 * p >= a.len().min(b.len()) {
                    return input(format!(
                        "presentation is not C'(1/6): piece of length {p} in relators of length {} and {}",
                        a.len(),
                        b.len()
                    ));
                }
            }
        }
        for c in all {
            by_first[c[0] as usize].push(c);
        }
        for bucket in &mut by_first {
            bucket.sort();
        }
        Ok(Dehn {
            relators: relators.to_vec(),
            by_first,
        })
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Cyclic conjugates (of relators and inverses) starting with `s`.
    pub fn conjugates_from(&self, s: Symbol) -> &[Word] {
        &self.by_first[s as usize]
    }

    fn find_long_piece(&self, w: &[Symbol]) -> Option<(usize, usize, Word)> {
        for i in 0..w.len() {
            for r in &self.by_first[w[i] as usize] {
                let m = lcp(&w[i..], r);
                if 2 * m > r.len() {
                    return Some((i, m, inverse_word(&r[m..])));
                }
            }
        }
        None
    }

    /// Replaces subwords longer than half a relator by the shorter complement
    /// until none is left. The result represents the same element and is
    /// empty exactly when the input is trivial.
    pub fn reduce(&self, w: &[Symbol]) -> Word {
        let mut w = free_reduce(w);
        while let Some((i, m, repl)) = self.find_long_piece(&w) {
            let mut next = w[..i].to_vec();
            next.extend_from_slice(&repl);
            next.extend_from_slice(&w[i + m..]);
            w = free_reduce(&next);
        }
        w
    }

    /// Dehn reduction applied to the cyclic word: returns a conjugate of `w`
    /// with no cyclic subword longer than half a relator.
    pub fn cyclic_reduce(&self, w: &[Symbol]) -> Word {
        let mut w = super::word::cyclic_reduce(&self.reduce(w)).1;
        'outer: loop {
            for i in 0..w.len() {
                let mut rot = w[i..].to_vec();
                rot.extend_from_slice(&w[..i]);
                let red = super::word::cyclic_reduce(&self.reduce(&rot)).1;
                if red.len() < w.len() {
                    w = red;
                    continue 'outer;
                }
            }
            return w;
        }
    }

    pub fn is_trivial(&self, w: &[Symbol]) -> bool {
        self.reduce(w).is_empty()
    }
}
