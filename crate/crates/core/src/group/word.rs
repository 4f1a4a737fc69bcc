use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

/// Alphabet symbol. Generator `i` is `2i`, its inverse `2i + 1`.
pub type Symbol = u8;
pub type Word = Vec<Symbol>;

#[inline]
pub fn inv(s: Symbol) -> Symbol {
    s ^ 1
}

pub fn inverse_word(w: &[Symbol]) -> Word {
    w.iter().rev().map(|&s| inv(s)).collect()
}

pub fn free_reduce(w: &[Symbol]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &s in w {
        if out.last() == Some(&inv(s)) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

/// Splits a freely reduced word as `u · core · u⁻¹` and returns `(u, core)`.
pub fn cyclic_reduce(w: &[Symbol]) -> (Word, Word) {
    let w = free_reduce(w);
    let mut i = 0;
    let mut j = w.len();
    while j >= i + 2 && w[i] == inv(w[j - 1]) {
        i += 1;
        j -= 1;
    }
    (w[..i].to_vec(), w[i..j].to_vec())
}

pub fn shortlex_cmp(a: &[Symbol], b: &[Symbol]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn rotations(w: &[Symbol]) -> impl Iterator<Item = Word> + '_ {
    (0..w.len().max(1)).map(move |i| {
        let mut r = w[i.min(w.len())..].to_vec();
        r.extend_from_slice(&w[..i.min(w.len())]);
        r
    })
}

/// Generator names in declared order; that order fixes the shortlex order
/// `g0 < g0⁻¹ < g1 < g1⁻¹ < …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return input("alphabet needs at least one generator");
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(|c| c.is_whitespace() || "'^⁻¹*·".contains(c)) {
                return input(format!("bad generator name {n:?}"));
            }
            if names[..i].contains(n) {
                return input(format!("duplicate generator name {n:?}"));
            }
        }
        if 2 * names.len() > Symbol::MAX as usize {
            return input("too many generators");
        }
        Ok(Alphabet { names })
    }

    /// `a, b, c, …` for small ranks, `x1, x2, …` otherwise.
    pub fn standard(rank: usize) -> Self {
        let names = if rank <= 26 {
            (0..rank)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect()
        } else {
            (1..=rank).map(|i| format!("x{i}")).collect()
        };
        Alphabet { names }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Number of symbols, generators and inverses together.
    pub fn size(&self) -> usize {
        2 * self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn single_letters(&self) -> bool {
        self.names
            .iter()
            .all(|n| n.len() == 1 && n.chars().all(|c| c.is_ascii_lowercase()))
    }

    pub fn symbol_name(&self, s: Symbol) -> String {
        let base = &self.names[(s / 2) as usize];
        if s % 2 == 0 {
            base.clone()
        } else if self.single_letters() {
            base.to_ascii_uppercase()
        } else {
            format!("{base}^-1")
        }
    }

    pub fn format(&self, w: &[Symbol]) -> String {
        let parts: Vec<String> = w.iter().map(|&s| self.symbol_name(s)).collect();
        if self.single_letters() {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    /// Parses a word. Inverses are written `x^-1`, `x⁻¹`, `x'`, or by the
    /// upper-case letter when generator names are single lower-case letters.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.names[i].len()));
        let single = self.single_letters();
        let mut out = Vec::new();
        let mut rest = text;
        loop {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '*' || c == '·');
            if rest.is_empty() {
                break;
            }
            let mut sym = None;
            for &i in &order {
                if let Some(r) = rest.strip_prefix(self.names[i].as_str()) {
                    sym = Some((2 * i) as Symbol);
                    rest = r;
                    break;
                }
            }
            if sym.is_none() && single {
                let c = rest.chars().next().unwrap();
                if c.is_ascii_uppercase() {
                    let lower = c.to_ascii_lowercase().to_string();
                    if let Some(i) = self.names.iter().position(|n| *n == lower) {
                        sym = Some((2 * i + 1) as Symbol);
                        rest = &rest[1..];
                    }
                }
            }
            let Some(mut s) = sym else {
                return input(format!("unknown symbol at {rest:?}"));
            };
            for suffix in ["^-1", "⁻¹", "'"] {
                if let Some(r) = rest.strip_prefix(suffix) {
                    s = inv(s);
                    rest = r;
                    break;
                }
            }
            out.push(s);
        }
        Ok(out)
    }

    pub fn check(&self, w: &[Symbol]) -> Result<()> {
        match w.iter().find(|&&s| s as usize >= self.size()) {
            Some(s) => input(format!(
                "symbol {s} outside alphabet of size {}",
                self.size()
            )),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let al = Alphabet::standard(2);
        let w = al.parse("a a^-1 b").unwrap();
        assert_eq!(w, vec![0, 1, 2]);
        assert_eq!(al.parse("aAb").unwrap(), w);
        assert_eq!(al.parse("a a⁻¹ b").unwrap(), w);
        assert_eq!(al.format(&w), "aAb");
        assert!(al.parse("ac").is_err());
    }

    #[test]
    fn multi_letter_names() {
        let al = Alphabet::new(vec!["x1".into(), "x2".into(), "x12".into()]).unwrap();
        let w = al.parse("x12 x1^-1 x2").unwrap();
        assert_eq!(w, vec![4, 1, 2]);
        assert_eq!(al.format(&w), "x12 x1^-1 x2");
    }

    #[test]
    fn reductions() {
        assert_eq!(free_reduce(&[0, 2, 3, 1, 2]), vec![2]);
        let (u, core) = cyclic_reduce(&[2, 0, 3]);
        assert_eq!(u, vec![2]);
        assert_eq!(core, vec![0]);
        let (_, core) = cyclic_reduce(&[0, 1]);
        assert!(core.is_empty());
    }
}
