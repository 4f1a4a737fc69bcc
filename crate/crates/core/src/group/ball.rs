use super::dehn::Dehn;
use super::word::{inv, inverse_word, Symbol, Word};
use crate::error::{Error, Result};

pub const NONE: u32 = u32::MAX;

/// Breadth-first ball in the Cayley graph of a small-cancellation group.
///
/// Vertices are created sphere by sphere. Before `g·s` becomes a new vertex,
/// each relator conjugate `s·t` is traced backwards as `g·t⁻¹` along edges
/// already present; a complete trace identifies `g·s` with a known vertex.
/// Vertices inside a sphere are stored in shortlex order of normal forms.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    alpha: usize,
    tails: Vec<Vec<Word>>,
    nbr: Vec<u32>,
    parent: Vec<u32>,
    last: Vec<Symbol>,
    len: Vec<u16>,
    sphere_start: Vec<usize>,
}

impl CayleyBall {
    pub fn new(alpha: usize, dehn: &Dehn) -> Self {
        let tails = (0..alpha)
            .map(|s| {
                dehn.conjugates_from(s as Symbol)
                    .iter()
                    .map(|c| inverse_word(&c[1..]))
                    .collect()
            })
            .collect();
        CayleyBall {
            alpha,
            tails,
            nbr: vec![NONE; alpha],
            parent: vec![NONE],
            last: vec![0],
            len: vec![0],
            sphere_start: vec![0, 1],
        }
    }

    /// Largest n such that the sphere S_n is complete.
    pub fn radius(&self) -> usize {
        self.sphere_start.len() - 2
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn sphere_range(&self, n: usize) -> std::ops::Range<usize> {
        self.sphere_start[n]..self.sphere_start[n + 1]
    }

    pub fn len_of(&self, v: u32) -> usize {
        self.len[v as usize] as usize
    }

    #[inline]
    pub fn step(&self, v: u32, s: Symbol) -> u32 {
        self.nbr[v as usize * self.alpha + s as usize]
    }

    pub fn trace(&self, from: u32, w: &[Symbol]) -> Option<u32> {
        let mut v = from;
        for &s in w {
            v = self.step(v, s);
            if v == NONE {
                return None;
            }
        }
        Some(v)
    }

    pub fn word_of(&self, mut v: u32) -> Word {
        let mut w = Vec::with_capacity(self.len_of(v));
        while v != 0 {
            w.push(self.last[v as usize]);
            v = self.parent[v as usize];
        }
        w.reverse();
        w
    }

    fn link(&mut self, g: u32, s: Symbol, y: u32) -> Result<()> {
        let back = self.step(y, inv(s));
        if back != NONE && back != g {
            return Err(Error::Validation(format!(
                "Cayley ball inconsistency at vertex {y}: two different {}-neighbours",
                inv(s)
            )));
        }
        self.nbr[g as usize * self.alpha + s as usize] = y;
        self.nbr[y as usize * self.alpha + inv(s) as usize] = g;
        Ok(())
    }

    fn deduce(&self, g: u32, s: Symbol) -> Option<u32> {
        self.tails[s as usize].iter().find_map(|t| self.trace(g, t))
    }

    /// Builds the next sphere. Fails if the vertex count would exceed `cap`,
    /// leaving the ball as it was.
    pub fn grow(&mut self, cap: usize) -> Result<()> {
        let before = self.parent.len();
        let res = self.grow_inner(cap);
        if res.is_err() {
            self.parent.truncate(before);
            self.last.truncate(before);
            self.len.truncate(before);
            self.nbr.truncate(before * self.alpha);
            for x in &mut self.nbr {
                if *x != NONE && *x as usize >= before {
                    *x = NONE;
                }
            }
        }
        res
    }

    fn grow_inner(&mut self, cap: usize) -> Result<()> {
        let n = self.radius() + 1;
        let prev = self.sphere_range(n - 1);
        for g in prev {
            let g = g as u32;
            for s in 0..self.alpha as Symbol {
                if self.step(g, s) != NONE {
                    continue;
                }
                let y = match self.deduce(g, s) {
                    Some(y) => y,
                    None => {
                        if self.parent.len() >= cap {
                            return Err(Error::ResourceCap {
                                what: "Cayley ball vertices",
                                requested: self.parent.len() + 1,
                                cap,
                            });
                        }
                        let y = self.parent.len() as u32;
                        self.parent.push(g);
                        self.last.push(s);
                        self.len.push(n as u16);
                        self.nbr.extend(std::iter::repeat(NONE).take(self.alpha));
                        y
                    }
                };
                self.link(g, s, y)?;
            }
        }
        self.sphere_start.push(self.parent.len());
        Ok(())
    }

    pub fn ensure_radius(&mut self, r: usize, cap: usize) -> Result<()> {
        while self.radius() < r {
            self.grow(cap)?;
        }
        Ok(())
    }
}
