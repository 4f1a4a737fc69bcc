//! Components of the coding graph, periods, loops and arithmeticity.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::automaton::{GeodesicAutomaton, INITIAL};
use crate::error::{input, Error, Result};
use crate::group::{ConjClass, Element, Group, Symbol, Word};
use crate::linalg::{perron_root, Sparse};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub id: usize,
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// Contains a cycle.
    pub nontrivial: bool,
    /// Whether this is the 0-state's component.
    pub is_zero: bool,
    /// 0 for trivial components.
    pub period: usize,
    /// V_1, …, V_p: edges go from part j to part j+1 mod p.
    pub cyclic_parts: Vec<Vec<usize>>,
}

impl Component {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub components: Vec<Component>,
    pub component_of: Vec<usize>,
}

/// Successors of a vertex, including identity edges into the 0-state.
pub fn successors(aut: &GeodesicAutomaton, v: usize) -> Vec<usize> {
    match aut.zero() {
        Some(z) if v == z => vec![z],
        Some(z) => {
            let mut out: Vec<usize> = aut.out(v).map(|(_, t)| t).collect();
            if v != INITIAL {
                out.push(z);
            }
            out
        }
        None => aut.out(v).map(|(_, t)| t).collect(),
    }
}

/// Tarjan's algorithm, iterative. Components are numbered by their
/// smallest vertex.
pub fn scc_decompose(aut: &GeodesicAutomaton) -> Decomposition {
    let n = aut.num_vertices();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| successors(aut, v)).collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    raw.push(comp);
                }
            }
        }
    }
    raw.sort_by_key(|c| c[0]);
    let mut component_of = vec![0; n];
    let components = raw
        .into_iter()
        .enumerate()
        .map(|(id, vertices)| {
            for &v in &vertices {
                component_of[v] = id;
            }
            let nontrivial = vertices.len() > 1 || adj[vertices[0]].contains(&vertices[0]);
            let is_zero = aut.zero() == Some(vertices[0]);
            let mut c = Component {
                id,
                vertices,
                nontrivial,
                is_zero,
                period: 0,
                cyclic_parts: Vec::new(),
            };
            let (p, parts) = period_of(&adj, &c);
            c.period = p;
            c.cyclic_parts = parts;
            c
        })
        .collect();
    Decomposition {
        components,
        component_of,
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn period_of(adj: &[Vec<usize>], c: &Component) -> (usize, Vec<Vec<usize>>) {
    if !c.nontrivial {
        return (0, Vec::new());
    }
    let root = c.vertices[0];
    let mut level = std::collections::HashMap::new();
    level.insert(root, 0usize);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut p = 0;
    while let Some(u) = queue.pop_front() {
        let lu = level[&u];
        for &w in &adj[u] {
            if !c.contains(w) {
                continue;
            }
            match level.get(&w) {
                Some(&lw) => p = gcd(p, (lu + 1).abs_diff(lw)),
                None => {
                    level.insert(w, lu + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    let mut parts = vec![Vec::new(); p];
    for &v in &c.vertices {
        parts[level[&v] % p].push(v);
    }
    (p, parts)
}

impl Decomposition {
    /// Period of a component; trivial components report 0 with a warning.
    pub fn period(&self, id: usize) -> usize {
        let c = &self.components[id];
        if !c.nontrivial {
            log::warn!("component {id} is trivial; period reported as 0");
        }
        c.period
    }

    /// Whether the condensation has no directed cycle.
    pub fn condensation_is_acyclic(&self, aut: &GeodesicAutomaton) -> bool {
        let k = self.components.len();
        let mut out: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        let mut indeg = vec![0usize; k];
        for v in 0..aut.num_vertices() {
            for w in successors(aut, v) {
                let (a, b) = (self.component_of[v], self.component_of[w]);
                if a != b && out[a].insert(b) {
                    indeg[b] += 1;
                }
            }
        }
        let mut ready: Vec<usize> = (0..k).filter(|&c| indeg[c] == 0).collect();
        let mut seen = 0;
        while let Some(c) = ready.pop() {
            seen += 1;
            for &d in &out[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.push(d);
                }
            }
        }
        seen == k
    }

    /// Nontrivial components other than the 0-state's.
    pub fn coding_components(&self) -> impl Iterator<Item = &Component> {
        self.components
            .iter()
            .filter(|c| c.nontrivial && !c.is_zero)
    }
}

/// 0-1 adjacency matrix of a component in its sorted vertex order.
pub fn adjacency(aut: &GeodesicAutomaton, comp: &Component) -> Sparse<f64> {
    let rows = comp
        .vertices
        .iter()
        .map(|&v| {
            let mut r: Vec<(u32, f64)> = successors(aut, v)
                .into_iter()
                .filter_map(|w| {
                    comp.vertices
                        .binary_search(&w)
                        .ok()
                        .map(|j| (j as u32, 1.0))
                })
                .collect();
            r.sort_by_key(|x| x.0);
            r
        })
        .collect();
    Sparse { rows }
}

/// log of the Perron root of the component's 0-1 matrix; −∞ for trivial
/// components.
pub fn component_growth(aut: &GeodesicAutomaton, comp: &Component) -> Result<f64> {
    if !comp.nontrivial {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(perron_root(&adjacency(aut, comp), 1e-14)?.ln())
}

/// Relative tolerance for ties between component growth rates.
pub const GROWTH_TIE: f64 = 1e-9;

/// Ids of the coding components of maximal word growth.
pub fn word_maximal_components(aut: &GeodesicAutomaton, dec: &Decomposition) -> Result<Vec<usize>> {
    let growth: Vec<(usize, f64)> = dec
        .coding_components()
        .map(|c| Ok((c.id, component_growth(aut, c)?)))
        .collect::<Result<_>>()?;
    Ok(argmax(&growth, GROWTH_TIE))
}

pub(crate) fn argmax(values: &[(usize, f64)], tol: f64) -> Vec<usize> {
    let best = values.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .filter(|x| x.1 >= best - tol * best.abs().max(1.0))
        .map(|x| x.0)
        .collect()
}

/// Whether some path leads from component `a` into component `b`.
pub fn reachable(aut: &GeodesicAutomaton, dec: &Decomposition, a: usize, b: usize) -> bool {
    let start = &dec.components[a].vertices;
    let mut seen: HashSet<usize> = start.iter().copied().collect();
    let mut stack = start.clone();
    while let Some(v) = stack.pop() {
        for w in successors(aut, v) {
            if dec.component_of[w] == b {
                return true;
            }
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    /// x_0, …, x_{l−1}; the closing edge is x_{l−1} → x_0.
    pub vertices: Vec<usize>,
    pub word: Word,
}

impl PeriodicOrbit {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// (k+1)-vertex window starting at position i, read cyclically.
    pub fn window(&self, i: usize, k: usize) -> Vec<usize> {
        (0..=k)
            .map(|j| self.vertices[(i + j) % self.len()])
            .collect()
    }
}

/// Follows `w` from `v`, staying inside the component.
fn run_in(aut: &GeodesicAutomaton, comp: &Component, v: usize, w: &[Symbol]) -> Option<Vec<usize>> {
    let mut path = vec![v];
    for &s in w {
        let t = aut.step(*path.last().unwrap(), s)?;
        if !comp.contains(t) {
            return None;
        }
        path.push(t);
    }
    Some(path)
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopWitness {
    pub orbit: PeriodicOrbit,
    pub power: usize,
    /// +1 for [g^N], −1 for [g^{−N}].
    pub sign: i8,
}

/// Searches, by increasing N then increasing loop length, for a periodic
/// orbit of the component whose label lies in [g^{±N}]. A loop label is
/// geodesic under every power, so its length is the stable length of its
/// class and it spells a shortest conjugate; only those are tried.
pub fn loops_realizing_class(
    aut: &GeodesicAutomaton,
    comp: &Component,
    group: &Group,
    class: &ConjClass,
    n_max: usize,
    l_max: usize,
    search_radius: usize,
) -> Result<Option<LoopWitness>> {
    if class.is_torsion {
        return input("torsion classes are not realized by loops");
    }
    let g = &class.representative;
    for n in 1..=n_max {
        let mut found: Option<LoopWitness> = None;
        for sign in [1i8, -1] {
            let base = if sign > 0 {
                g.clone()
            } else {
                group.inverse(g)?
            };
            let h = group.power(&base, n)?;
            for u in group.shortest_conjugates(&h, search_radius)? {
                if u.len() > l_max || u.is_identity() {
                    continue;
                }
                for &v in &comp.vertices {
                    let Some(path) = run_in(aut, comp, v, u.word()) else {
                        continue;
                    };
                    if *path.last().unwrap() != v {
                        continue;
                    }
                    let orbit = PeriodicOrbit {
                        vertices: path[..path.len() - 1].to_vec(),
                        word: u.word().to_vec(),
                    };
                    let better = match &found {
                        None => true,
                        Some(f) => {
                            (orbit.len(), &orbit.word, &orbit.vertices)
                                < (f.orbit.len(), &f.orbit.word, &f.orbit.vertices)
                        }
                    };
                    if better {
                        found = Some(LoopWitness {
                            orbit,
                            power: n,
                            sign,
                        });
                    }
                    break;
                }
            }
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Primitive periodic orbits of length ≤ `l_max`, one per cyclic class,
/// in order of length then vertex sequence; at most `cap` of them.
pub fn periodic_orbits(
    aut: &GeodesicAutomaton,
    comp: &Component,
    l_max: usize,
    cap: usize,
) -> Vec<PeriodicOrbit> {
    let mut seen: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for l in 1..=l_max {
        for &v in &comp.vertices {
            // Closed walks at v with every vertex ≥ v.
            let mut stack: Vec<(Vec<usize>, usize)> = vec![(vec![v], 0)];
            while let Some((path, _)) = stack.pop() {
                if seen.len() >= cap {
                    break;
                }
                let last = *path.last().unwrap();
                if path.len() == l {
                    if aut.out(last).any(|(_, t)| t == v) && is_primitive(&path) {
                        let canon = least_rotation(&path);
                        seen.insert((l, canon));
                    }
                    continue;
                }
                let mut next: Vec<usize> = aut
                    .out(last)
                    .map(|(_, t)| t)
                    .filter(|&t| t >= v && comp.contains(t))
                    .collect();
                next.sort_unstable();
                for t in next.into_iter().rev() {
                    let mut p = path.clone();
                    p.push(t);
                    stack.push((p, 0));
                }
            }
        }
    }
    seen.into_iter()
        .map(|(_, vertices)| {
            let l = vertices.len();
            let word = (0..l)
                .map(|i| {
                    aut.edge_label(vertices[i], vertices[(i + 1) % l])
                        .flatten()
                        .expect("labelled edge")
                })
                .collect();
            PeriodicOrbit { vertices, word }
        })
        .collect()
}

fn is_primitive(p: &[usize]) -> bool {
    let l = p.len();
    (1..l)
        .filter(|d| l % d == 0)
        .all(|d| (0..l).any(|i| p[i] != p[(i + d) % l]))
}

fn least_rotation(p: &[usize]) -> Vec<usize> {
    (0..p.len())
        .map(|i| {
            let mut r = p[i..].to_vec();
            r.extend_from_slice(&p[..i]);
            r
        })
        .min()
        .unwrap()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Lattice { gap: f64 },
    NonArithmetic { confidence: f64, min_residual: f64 },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct ArithmeticityReport {
    pub verdict: Verdict,
    pub orbit_values: Vec<f64>,
    /// Largest distance of an orbit value from gap·ℤ when a lattice is found.
    pub max_residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ArithmeticityOptions {
    /// Remainders below this count as zero in the real Euclid reduction.
    pub tol: f64,
    /// Candidate gaps below this reject the lattice hypothesis.
    pub reject_below: f64,
    pub min_orbits: usize,
}

impl Default for ArithmeticityOptions {
    fn default() -> Self {
        ArithmeticityOptions {
            tol: 1e-8,
            reject_below: 1e-3,
            min_orbits: 2,
        }
    }
}

fn real_gcd(mut a: f64, mut b: f64, tol: f64) -> f64 {
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while b > tol {
        let r = (a - b * (a / b).round()).abs();
        a = b;
        b = r;
    }
    a
}

/// Common lattice gap of orbit sums by real Euclid reduction.
pub fn arithmeticity(values: &[f64], opts: ArithmeticityOptions) -> ArithmeticityReport {
    let orbit_values = values.to_vec();
    let positive: Vec<f64> = values.iter().copied().filter(|v| *v > opts.tol).collect();
    if positive.len() < opts.min_orbits {
        return ArithmeticityReport {
            verdict: Verdict::Inconclusive {
                reason: format!("only {} positive orbit sums", positive.len()),
            },
            orbit_values,
            max_residual: f64::NAN,
        };
    }
    let mut gap = positive[0];
    for &v in &positive[1..] {
        gap = real_gcd(gap, v, opts.tol);
        if gap < opts.reject_below {
            let rejected = positive
                .iter()
                .filter(|&&v| v > 2.0 * opts.reject_below)
                .count();
            return ArithmeticityReport {
                verdict: Verdict::NonArithmetic {
                    confidence: 1.0 - 1.0 / (1.0 + rejected as f64),
                    min_residual: gap,
                },
                orbit_values,
                max_residual: f64::NAN,
            };
        }
    }
    let max_residual = positive
        .iter()
        .map(|v| (v - gap * (v / gap).round()).abs())
        .fold(0.0, f64::max);
    ArithmeticityReport {
        verdict: Verdict::Lattice { gap },
        orbit_values,
        max_residual,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<u64>,
    /// The expansion ended: the ratio is rational at working precision.
    pub terminated: bool,
    /// All partial quotients after the first are at most `threshold`.
    /// Heuristic evidence only.
    pub bounded_up_to_depth: bool,
    pub threshold: u64,
}

/// Continued fraction of l1/l2 to the given depth.
pub fn badly_approximable_diagnostic(
    l1: f64,
    l2: f64,
    depth: usize,
    threshold: u64,
) -> Result<ContinuedFraction> {
    if !(l1 > 0.0 && l2 > 0.0) {
        return input("lengths must be positive");
    }
    let mut x = l1 / l2;
    let mut q = Vec::new();
    let mut terminated = false;
    for _ in 0..depth {
        let a = x.floor();
        q.push(a as u64);
        let frac = x - a;
        if frac < 1e-9 * x.max(1.0) {
            terminated = true;
            break;
        }
        x = 1.0 / frac;
    }
    let bounded = q.iter().skip(1).all(|&a| a <= threshold);
    Ok(ContinuedFraction {
        partial_quotients: q,
        terminated,
        bounded_up_to_depth: bounded && !terminated,
        threshold,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub r: usize,
    pub n: usize,
    pub sphere_size: usize,
    pub covered: usize,
    pub covered_fraction: f64,
}

/// Fraction of S_n of the form f₁·g·f₂ with f₁, f₂ ∈ B(r) and g the label
/// of a path inside the component.
pub fn gqt_cover_check(
    aut: &GeodesicAutomaton,
    comp: &Component,
    group: &Group,
    r: usize,
    n: usize,
) -> Result<CoverReport> {
    let lo = n.saturating_sub(2 * r);
    let hi = n + 2 * r;
    let mut paths: HashSet<Word> = HashSet::new();
    let mut frontier: Vec<(usize, Word)> = comp.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for len in 0..=hi {
        if len >= lo {
            for (_, w) in &frontier {
                paths.insert(w.clone());
            }
        }
        if len == hi {
            break;
        }
        let mut next = Vec::new();
        let mut dedup: HashSet<(usize, Word)> = HashSet::new();
        for (v, w) in &frontier {
            for (s, t) in aut.out(*v) {
                if comp.contains(t) {
                    let mut w2 = w.clone();
                    w2.push(s);
                    if dedup.insert((t, w2.clone())) {
                        next.push((t, w2));
                    }
                }
            }
        }
        frontier = next;
        if paths.len() + frontier.len() > group.limits().max_ball {
            return Err(Error::ResourceCap {
                what: "component path set",
                requested: paths.len() + frontier.len(),
                cap: group.limits().max_ball,
            });
        }
    }
    // Paths spell geodesics, so the words are normal forms up to shortlex.
    let elements: HashSet<Word> = paths
        .iter()
        .map(|w| group.reduce(w).map(Element::into_word))
        .collect::<Result<_>>()?;
    let ball = group.ball(r)?;
    let inverses: Vec<Word> = ball
        .iter()
        .map(|f| group.inverse(f).map(Element::into_word))
        .collect::<Result<_>>()?;
    let sphere = group.sphere(n)?;
    let mut covered = 0;
    for x in &sphere {
        let hit = inverses.iter().any(|f1i| {
            let mut left = f1i.clone();
            left.extend_from_slice(x.word());
            inverses.iter().any(|f2i| {
                let mut w = left.clone();
                w.extend_from_slice(f2i);
                group
                    .reduce(&w)
                    .map(|e| elements.contains(e.word()))
                    .unwrap_or(false)
            })
        });
        covered += usize::from(hit);
    }
    Ok(CoverReport {
        r,
        n,
        sphere_size: sphere.len(),
        covered,
        covered_fraction: covered as f64 / sphere.len().max(1) as f64,
    })
}
