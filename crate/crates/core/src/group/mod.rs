//! Group presentations with a solvable word problem: free groups, C′(1/6)
//! small-cancellation groups (Dehn's algorithm) and Schottky matrix groups.

mod ball;
mod conj;
mod dehn;
mod word;

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

pub use ball::CayleyBall;
pub use conj::ConjClass;
pub use dehn::Dehn;
pub use word::{
    cyclic_reduce, free_reduce, inv, inverse_word, rotations, shortlex_cmp, Alphabet, Symbol, Word,
};

use crate::error::{input, Error, Result};
use crate::mobius::{check_ping_pong, Disc, DiscPair, Mat2};

#[derive(Clone, Debug)]
pub enum Family {
    Free,
    SmallCancellation {
        dehn: Dehn,
    },
    Matrix {
        matrices: Vec<Mat2>,
        discs: Vec<DiscPair>,
    },
}

#[derive(Clone, Debug)]
pub struct Presentation {
    alphabet: Alphabet,
    family: Family,
}

impl Presentation {
    pub fn free(rank: usize) -> Result<Self> {
        if rank < 2 {
            return input("free groups of rank < 2 are elementary");
        }
        Ok(Presentation {
            alphabet: Alphabet::standard(rank),
            family: Family::Free,
        })
    }

    pub fn free_named(names: Vec<String>) -> Result<Self> {
        if names.len() < 2 {
            return input("free groups of rank < 2 are elementary");
        }
        Ok(Presentation {
            alphabet: Alphabet::new(names)?,
            family: Family::Free,
        })
    }

    /// Closed orientable surface group ⟨a,b,c,d,… | [a,b][c,d]…⟩.
    pub fn surface(genus: usize) -> Result<Self> {
        if genus < 2 {
            return input("surface groups need genus ≥ 2");
        }
        let alphabet = Alphabet::standard(2 * genus);
        let mut rel = Vec::new();
        for i in 0..genus {
            let (x, y) = ((4 * i) as Symbol, (4 * i + 2) as Symbol);
            rel.extend_from_slice(&[x, y, inv(x), inv(y)]);
        }
        let dehn = Dehn::new(alphabet.size(), &[rel])?;
        Ok(Presentation {
            alphabet,
            family: Family::SmallCancellation { dehn },
        })
    }

    pub fn small_cancellation(names: Vec<String>, relators: &[&str]) -> Result<Self> {
        let alphabet = Alphabet::new(names)?;
        if alphabet.rank() < 2 {
            return input("need at least two generators");
        }
        let rels = relators
            .iter()
            .map(|r| alphabet.parse(r))
            .collect::<Result<Vec<_>>>()?;
        if rels.is_empty() {
            return Ok(Presentation {
                alphabet,
                family: Family::Free,
            });
        }
        let dehn = Dehn::new(alphabet.size(), &rels)?;
        Ok(Presentation {
            alphabet,
            family: Family::SmallCancellation { dehn },
        })
    }

    pub fn matrix(names: Vec<String>, matrices: Vec<Mat2>, discs: Vec<DiscPair>) -> Result<Self> {
        let alphabet = Alphabet::new(names)?;
        if matrices.len() != alphabet.rank() {
            return input("one matrix per generator is required");
        }
        if matrices.len() < 2 {
            return input("need at least two Schottky generators");
        }
        check_ping_pong(&matrices, &discs)?;
        Ok(Presentation {
            alphabet,
            family: Family::Matrix { matrices, discs },
        })
    }

    /// Two-generator Schottky group: A = diag(μ, 1/μ) with trace `t1` and
    /// the symmetric matrix B with trace `t2` and fixed points ±1. Discs are
    /// placed symmetrically; fails if they overlap.
    pub fn schottky(t1: f64, t2: f64) -> Result<Self> {
        if t1 <= 2.0 || t2 <= 2.0 {
            return input("Schottky traces must exceed 2");
        }
        let mu = (t1 + (t1 * t1 - 4.0).sqrt()) / 2.0;
        let p = t2 / 2.0;
        let q = (p * p - 1.0).sqrt();
        let a = Mat2::new(mu, 0.0, 0.0, 1.0 / mu);
        let b = Mat2::new(p, q, q, p);
        let discs = vec![
            DiscPair {
                repel: Disc {
                    center: 0.0,
                    radius: 1.0 / mu,
                    outside: false,
                },
                attract: Disc {
                    center: 0.0,
                    radius: mu,
                    outside: true,
                },
            },
            DiscPair {
                repel: Disc {
                    center: -p / q,
                    radius: 1.0 / q,
                    outside: false,
                },
                attract: Disc {
                    center: p / q,
                    radius: 1.0 / q,
                    outside: false,
                },
            },
        ];
        Self::matrix(vec!["a".into(), "b".into()], vec![a, b], discs)
    }

    /// Same group with generators renamed/reordered: `order[i]` is the old
    /// index of new generator `i`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let r = self.alphabet.rank();
        let mut seen = vec![false; r];
        if order.len() != r
            || order
                .iter()
                .any(|&i| i >= r || std::mem::replace(&mut seen[i], true))
        {
            return input("generator order must be a permutation");
        }
        let names = order
            .iter()
            .map(|&i| self.alphabet.names()[i].clone())
            .collect();
        let alphabet = Alphabet::new(names)?;
        let mut new_index = vec![0usize; r];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let map = |w: &[Symbol]| -> Word {
            w.iter()
                .map(|&s| (2 * new_index[(s / 2) as usize]) as Symbol | (s & 1))
                .collect()
        };
        let family = match &self.family {
            Family::Free => Family::Free,
            Family::SmallCancellation { dehn } => {
                let rels: Vec<Word> = dehn.relators().iter().map(|r| map(r)).collect();
                Family::SmallCancellation {
                    dehn: Dehn::new(alphabet.size(), &rels)?,
                }
            }
            Family::Matrix { matrices, discs } => Family::Matrix {
                matrices: order.iter().map(|&i| matrices[i]).collect(),
                discs: order.iter().map(|&i| discs[i]).collect(),
            },
        };
        Ok(Presentation { alphabet, family })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Groups whose normal forms are freely reduced words.
    pub fn is_free(&self) -> bool {
        !matches!(self.family, Family::SmallCancellation { .. })
    }

    pub fn matrices(&self) -> Option<&[Mat2]> {
        match &self.family {
            Family::Matrix { matrices, .. } => Some(matrices),
            _ => None,
        }
    }

    pub fn dehn(&self) -> Option<&Dehn> {
        match &self.family {
            Family::SmallCancellation { dehn } => Some(dehn),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        let names = self.alphabet.names().join(",");
        match &self.family {
            Family::Free => format!("free<{names}>"),
            Family::SmallCancellation { dehn } => {
                let rels: Vec<String> = dehn
                    .relators()
                    .iter()
                    .map(|r| self.alphabet.format(r))
                    .collect();
                format!("<{names} | {}>", rels.join(", "))
            }
            Family::Matrix { matrices, .. } => {
                let tr: Vec<String> = matrices.iter().map(|m| format!("{}", m.trace())).collect();
                format!("schottky<{names}> traces {}", tr.join(","))
            }
        }
    }
}

/// Group element in normal form (freely reduced for free groups, shortlex
/// geodesic for small-cancellation groups).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element(Word);

impl Element {
    pub fn identity() -> Self {
        Element(Vec::new())
    }

    pub fn word(&self) -> &[Symbol] {
        &self.0
    }

    /// The element spelled by one symbol.
    pub fn identity_with(s: Symbol) -> Self {
        Element(vec![s])
    }

    /// Wraps a word already known to be in normal form.
    pub fn from_normal_form(w: Word) -> Self {
        Element(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_word(self) -> Word {
        self.0
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        shortlex_cmp(&self.0, &other.0)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Cap on Cayley-ball vertices for small-cancellation groups.
    pub max_ball: usize,
    /// Cap on the size of a materialized sphere.
    pub max_sphere: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ball: 3_000_000,
            max_sphere: 20_000_000,
        }
    }
}

pub struct Group {
    pres: Presentation,
    limits: Limits,
    ball: Mutex<Option<CayleyBall>>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group")
            .field("presentation", &self.pres.describe())
            .finish()
    }
}

impl Group {
    pub fn new(pres: Presentation) -> Self {
        Self::with_limits(pres, Limits::default())
    }

    pub fn with_limits(pres: Presentation, limits: Limits) -> Self {
        Group {
            pres,
            limits,
            ball: Mutex::new(None),
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.pres.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.pres.alphabet.size()
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn parse(&self, text: &str) -> Result<Element> {
        let w = self.pres.alphabet.parse(text)?;
        self.reduce(&w)
    }

    pub fn format(&self, g: &Element) -> String {
        if g.is_identity() {
            "1".into()
        } else {
            self.pres.alphabet.format(g.word())
        }
    }

    /// Runs `f` on the Cayley ball grown to at least radius `r`. For free
    /// families this is the tree ball.
    pub fn with_ball<T>(&self, r: usize, f: impl FnOnce(&CayleyBall) -> T) -> Result<T> {
        let mut guard = self.ball.lock().unwrap_or_else(|e| e.into_inner());
        let ball = guard.get_or_insert_with(|| match self.pres.dehn() {
            Some(dehn) => CayleyBall::new(self.alphabet_size(), dehn),
            None => CayleyBall::new(
                self.alphabet_size(),
                &Dehn::new(self.alphabet_size(), &[]).unwrap(),
            ),
        });
        ball.ensure_radius(r, self.limits.max_ball)?;
        Ok(f(ball))
    }

    /// Normal form of a word.
    pub fn reduce(&self, raw: &[Symbol]) -> Result<Element> {
        self.pres.alphabet.check(raw)?;
        match &self.pres.family {
            Family::Free | Family::Matrix { .. } => Ok(Element(free_reduce(raw))),
            Family::SmallCancellation { dehn } => {
                let short = dehn.reduce(raw);
                if short.is_empty() {
                    return Ok(Element::identity());
                }
                self.with_ball(short.len(), |b| {
                    let v = b.trace(0, &short).expect("ball complete up to word length");
                    Element(b.word_of(v))
                })
            }
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        let mut w = a.0.clone();
        w.extend_from_slice(&b.0);
        self.reduce(&w)
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.reduce(&inverse_word(&a.0))
    }

    pub fn power(&self, a: &Element, n: usize) -> Result<Element> {
        self.reduce(&a.0.repeat(n))
    }

    /// Conjugate h⁻¹·g·h.
    pub fn conjugate(&self, g: &Element, h: &Element) -> Result<Element> {
        let mut w = inverse_word(&h.0);
        w.extend_from_slice(&g.0);
        w.extend_from_slice(&h.0);
        self.reduce(&w)
    }

    pub fn sphere_sizes(&self, n: usize) -> Result<Vec<usize>> {
        match &self.pres.family {
            Family::SmallCancellation { .. } => {
                self.with_ball(n, |b| (0..=n).map(|k| b.sphere_range(k).len()).collect())
            }
            _ => {
                let k = self.alphabet_size();
                Ok((0..=n)
                    .map(|i| {
                        if i == 0 {
                            1
                        } else {
                            k * (k - 1).pow(i as u32 - 1)
                        }
                    })
                    .collect())
            }
        }
    }

    /// Number of geodesic words of each length 0..=n.
    pub fn geodesic_word_counts(&self, n: usize) -> Result<Vec<u128>> {
        if self.is_free_family() {
            let k = self.alphabet_size() as u128;
            return Ok((0..=n)
                .map(|i| {
                    if i == 0 {
                        1
                    } else {
                        k * (k - 1).pow(i as u32 - 1)
                    }
                })
                .collect());
        }
        self.with_ball(n, |b| {
            let mut geo = vec![0u128; b.vertex_count()];
            geo[0] = 1;
            let mut out = vec![1u128];
            for k in 0..n {
                let mut total = 0u128;
                for v in b.sphere_range(k) {
                    for s in 0..self.alphabet_size() as Symbol {
                        let w = b.step(v as u32, s);
                        if b.len_of(w) == k + 1 {
                            geo[w as usize] += geo[v];
                            total += geo[v];
                        }
                    }
                }
                out.push(total);
            }
            out
        })
    }

    fn is_free_family(&self) -> bool {
        !matches!(self.pres.family, Family::SmallCancellation { .. })
    }

    /// Calls `f` on every normal form of length exactly `n`, in shortlex order.
    pub fn visit_sphere(&self, n: usize, mut f: impl FnMut(&[Symbol])) -> Result<()> {
        match &self.pres.family {
            Family::SmallCancellation { .. } => self.with_ball(n, |b| {
                for v in b.sphere_range(n) {
                    f(&b.word_of(v as u32));
                }
            }),
            _ => {
                let k = self.alphabet_size() as Symbol;
                let mut w: Word = Vec::with_capacity(n);
                fn rec(w: &mut Word, n: usize, k: Symbol, f: &mut dyn FnMut(&[Symbol])) {
                    if w.len() == n {
                        f(w);
                        return;
                    }
                    for s in 0..k {
                        if w.last() == Some(&inv(s)) {
                            continue;
                        }
                        w.push(s);
                        rec(w, n, k, f);
                        w.pop();
                    }
                }
                rec(&mut w, n, k, &mut f);
                Ok(())
            }
        }
    }

    pub fn sphere(&self, n: usize) -> Result<Vec<Element>> {
        let size = *self.sphere_sizes(n)?.last().unwrap();
        if size > self.limits.max_sphere {
            return Err(Error::ResourceCap {
                what: "sphere size",
                requested: size,
                cap: self.limits.max_sphere,
            });
        }
        let mut out = Vec::with_capacity(size);
        self.visit_sphere(n, |w| out.push(Element(w.to_vec())))?;
        Ok(out)
    }

    pub fn ball(&self, n: usize) -> Result<Vec<Element>> {
        let mut out = Vec::new();
        for k in 0..=n {
            out.extend(self.sphere(k)?);
        }
        Ok(out)
    }

    /// Index of all elements of B(n) by normal form.
    pub fn ball_index(&self, n: usize) -> Result<HashMap<Word, u32>> {
        let mut idx = HashMap::new();
        for k in 0..=n {
            self.visit_sphere(k, |w| {
                let id = idx.len() as u32;
                idx.insert(w.to_vec(), id);
            })?;
        }
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduce_examples() {
        let g = Group::new(Presentation::free(2).unwrap());
        let x = g.parse("a a^-1 b").unwrap();
        assert_eq!(g.format(&x), "b");
        assert_eq!(x.len(), 1);
        assert!(g.parse("").unwrap().is_identity());
        let ab = g.parse("ab").unwrap();
        let ba = g.parse("Ba").unwrap();
        assert_eq!(g.format(&g.multiply(&ab, &ba).unwrap()), "aa");
    }

    #[test]
    fn free_spheres() {
        let g = Group::new(Presentation::free(2).unwrap());
        assert_eq!(g.sphere(1).unwrap().len(), 4);
        assert_eq!(g.sphere_sizes(10).unwrap()[10], 78732);
        let s3 = g.sphere(3).unwrap();
        assert!(s3.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn surface_relator_is_trivial() {
        let g = Group::new(Presentation::surface(2).unwrap());
        assert!(g.parse("abABcdCD").unwrap().is_identity());
        assert_eq!(g.sphere(1).unwrap().len(), 8);
        // Half a relator has two geodesic spellings; the normal form is the
        // shortlex-least one.
        let x = g.parse("dcDC").unwrap();
        assert_eq!(g.format(&x), "abAB");
    }

    #[test]
    fn schottky_default_discs_are_valid() {
        let p = Presentation::schottky(3.0, 5.0).unwrap();
        assert!(p.is_free());
        assert!(Presentation::schottky(2.1, 5.0).is_err());
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(Presentation::free(1).is_err());
        assert!(Presentation::surface(1).is_err());
        let g = Group::new(Presentation::free(2).unwrap());
        assert!(g.reduce(&[9]).is_err());
    }
}
