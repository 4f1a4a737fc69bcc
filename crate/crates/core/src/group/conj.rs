use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::word::{cyclic_reduce, inv, inverse_word, rotations, shortlex_cmp, Word};
use super::{Element, Group};
use crate::error::{Error, Result};

/// Conjugacy class with its canonical representative.
///
/// Free groups: the shortlex-least cyclic rotation of the cyclically reduced
/// word. Inverse classes are kept apart ([a] ≠ [a⁻¹]). Small-cancellation
/// groups: the shortlex-least element of minimal length found by a bounded
/// conjugation search; `heuristic` is set when the bound is below the longest
/// relator length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ConjClass {
    pub representative: Element,
    pub is_torsion: bool,
    pub heuristic: bool,
}

impl PartialOrd for ConjClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConjClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.representative.cmp(&other.representative)
    }
}

const SEARCH_BUDGET: usize = 50_000;

fn least_rotation(w: &[u8]) -> Word {
    rotations(w)
        .min_by(|a, b| shortlex_cmp(a, b))
        .unwrap_or_default()
}

impl Group {
    pub fn canonical_class(&self, g: &Element, search_radius: usize) -> Result<ConjClass> {
        let Some(dehn) = self.presentation().dehn() else {
            let (_, core) = cyclic_reduce(g.word());
            let rep = Element(least_rotation(&core));
            let is_torsion = rep.is_identity();
            return Ok(ConjClass {
                representative: rep,
                is_torsion,
                heuristic: false,
            });
        };
        let (best, seen) = self.conjugation_search(g, search_radius)?;
        let rep = seen
            .into_iter()
            .filter(|w| w.len() == best)
            .min_by(|a, b| shortlex_cmp(a, b))
            .map(Element)
            .unwrap_or_else(Element::identity);
        let is_torsion = rep.is_identity() || {
            let mut t = false;
            for k in 2..=dehn.max_relator_len() {
                if dehn.is_trivial(&rep.word().repeat(k)) {
                    t = true;
                    break;
                }
            }
            t
        };
        Ok(ConjClass {
            representative: rep,
            is_torsion,
            heuristic: search_radius < dehn.max_relator_len(),
        })
    }

    /// Breadth-first search over s⁻¹us from the Dehn-reduced form of g,
    /// keeping elements within `search_radius` of the shortest length seen.
    fn conjugation_search(
        &self,
        g: &Element,
        search_radius: usize,
    ) -> Result<(usize, HashSet<Word>)> {
        let dehn = self
            .presentation()
            .dehn()
            .expect("small-cancellation family");
        let start = self.reduce(&dehn.cyclic_reduce(g.word()))?;
        let mut best = start.len();
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.word().to_vec());
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            if u.len() > best + search_radius {
                continue;
            }
            for s in 0..self.alphabet_size() as u8 {
                let mut w = vec![inv(s)];
                w.extend_from_slice(u.word());
                w.push(s);
                let v = self.reduce(&w)?;
                best = best.min(v.len());
                if v.len() <= best + search_radius && seen.insert(v.word().to_vec()) {
                    if seen.len() > SEARCH_BUDGET {
                        return Err(Error::Unresolved(format!(
                            "conjugacy search for {} exceeded {SEARCH_BUDGET} elements",
                            self.format(g)
                        )));
                    }
                    queue.push_back(v);
                }
            }
        }
        Ok((best, seen))
    }

    /// Every element of minimal length in the class of g, in shortlex order.
    pub fn shortest_conjugates(&self, g: &Element, search_radius: usize) -> Result<Vec<Element>> {
        let mut out: Vec<Word> = if self.presentation().dehn().is_none() {
            let (_, core) = cyclic_reduce(g.word());
            rotations(&core).collect()
        } else {
            let (best, seen) = self.conjugation_search(g, search_radius)?;
            seen.into_iter().filter(|w| w.len() == best).collect()
        };
        out.sort_by(|a, b| shortlex_cmp(a, b));
        out.dedup();
        Ok(out.into_iter().map(Element).collect())
    }

    /// All classes meeting B(n_max), sorted by representative.
    pub fn enumerate_classes(&self, n_max: usize, search_radius: usize) -> Result<Vec<ConjClass>> {
        let mut out = BTreeSet::new();
        for n in 0..=n_max {
            if self.presentation().is_free() {
                // Only cyclically reduced words need canonicalizing.
                let mut err = None;
                self.visit_sphere(n, |w| {
                    if n > 1 && w[0] == inv(w[n - 1]) {
                        return;
                    }
                    match self.canonical_class(&Element(w.to_vec()), search_radius) {
                        Ok(c) => {
                            out.insert(c);
                        }
                        Err(e) => err = Some(e),
                    }
                })?;
                if let Some(e) = err {
                    return Err(e);
                }
            } else {
                for g in self.sphere(n)? {
                    out.insert(self.canonical_class(&g, search_radius)?);
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Whether two elements are conjugate, decided through canonical classes.
    pub fn conjugate_to(&self, g: &Element, h: &Element, search_radius: usize) -> Result<bool> {
        Ok(self.canonical_class(g, search_radius)?.representative
            == self.canonical_class(h, search_radius)?.representative)
    }

    pub fn class_inverse(&self, c: &ConjClass, search_radius: usize) -> Result<ConjClass> {
        let w = inverse_word(c.representative.word());
        let g = self.reduce(&w)?;
        self.canonical_class(&g, search_radius)
    }
}
