//! Cannon codings: finite labelled digraphs whose paths from ∗ spell
//! geodesic words.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::group::{inv, Element, Group, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutomatonKind {
    AcceptsAllGeodesics,
    ShortlexUnique,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// `None` is the identity label of edges into the 0-state.
    pub label: Option<Symbol>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicAutomaton {
    kind: AutomatonKind,
    alphabet_size: usize,
    /// `trans[v][s]`: target of the edge labelled s out of v.
    trans: Vec<Vec<Option<usize>>>,
    zero: Option<usize>,
    pub r_cone: usize,
    pub label_split: bool,
}

pub const INITIAL: usize = 0;
const MAX_STATES: usize = 2_000_000;

impl GeodesicAutomaton {
    /// Builds from a transition table; state 0 is ∗.
    pub fn from_table(
        kind: AutomatonKind,
        alphabet_size: usize,
        trans: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let n = trans.len();
        if n == 0 {
            return input("automaton needs at least the initial state");
        }
        for row in &trans {
            if row.len() != alphabet_size || row.iter().flatten().any(|&t| t >= n) {
                return input("malformed transition table");
            }
        }
        Ok(GeodesicAutomaton {
            kind,
            alphabet_size,
            trans,
            zero: None,
            r_cone: 0,
            label_split: false,
        })
    }

    pub fn kind(&self) -> AutomatonKind {
        self.kind
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn num_vertices(&self) -> usize {
        self.trans.len() + usize::from(self.zero.is_some())
    }

    /// Vertices other than the 0-state.
    pub fn num_coding_vertices(&self) -> usize {
        self.trans.len()
    }

    pub fn initial(&self) -> usize {
        INITIAL
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn is_augmented(&self) -> bool {
        self.zero.is_some()
    }

    pub fn step(&self, v: usize, s: Symbol) -> Option<usize> {
        self.trans.get(v).and_then(|row| row[s as usize])
    }

    /// Labelled out-edges of a coding vertex in label order.
    pub fn out(&self, v: usize) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.trans[v]
            .iter()
            .enumerate()
            .filter_map(|(s, t)| t.map(|t| (s as Symbol, t)))
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for v in 0..self.trans.len() {
            for (s, t) in self.out(v) {
                out.push(Edge {
                    from: v,
                    to: t,
                    label: Some(s),
                });
            }
            if let (Some(z), true) = (self.zero, v != INITIAL) {
                out.push(Edge {
                    from: v,
                    to: z,
                    label: None,
                });
            }
        }
        if let Some(z) = self.zero {
            out.push(Edge {
                from: z,
                to: z,
                label: None,
            });
        }
        out
    }

    /// Label of the unique edge u → v, if any.
    pub fn edge_label(&self, u: usize, v: usize) -> Option<Option<Symbol>> {
        if Some(v) == self.zero {
            return (u != INITIAL).then_some(None);
        }
        if Some(u) == self.zero {
            return None;
        }
        self.out(u).find(|&(_, t)| t == v).map(|(s, _)| Some(s))
    }

    pub fn has_parallel_edges(&self) -> bool {
        self.trans.iter().any(|row| {
            let targets: Vec<usize> = row.iter().flatten().copied().collect();
            let set: HashSet<usize> = targets.iter().copied().collect();
            set.len() != targets.len()
        })
    }

    /// Follows a word from ∗.
    pub fn run(&self, w: &[Symbol]) -> Option<usize> {
        let mut v = INITIAL;
        for &s in w {
            v = self.step(v, s)?;
        }
        Some(v)
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        self.run(w).is_some()
    }

    /// Number of accepted words of each length 0..=n.
    pub fn count_words(&self, n: usize) -> Vec<u128> {
        let m = self.trans.len();
        let mut cur = vec![0u128; m];
        cur[INITIAL] = 1;
        let mut out = vec![1u128];
        for _ in 0..n {
            let mut next = vec![0u128; m];
            for v in 0..m {
                if cur[v] != 0 {
                    for (_, t) in self.out(v) {
                        next[t] += cur[v];
                    }
                }
            }
            out.push(next.iter().sum());
            cur = next;
        }
        out
    }

    /// Adds the 0-state with identity edges from every vertex except ∗ and an
    /// identity self-loop. A second call changes nothing.
    pub fn augment(&self) -> GeodesicAutomaton {
        let mut a = self.clone();
        if a.zero.is_some() {
            log::warn!("automaton already augmented; leaving it unchanged");
            return a;
        }
        a.zero = Some(a.trans.len());
        a
    }

    /// The automaton without its 0-state.
    pub fn unaugmented(&self) -> GeodesicAutomaton {
        let mut a = self.clone();
        a.zero = None;
        a
    }

    /// ev of a vertex path: the product of its edge labels.
    pub fn ev(&self, group: &Group, path: &[usize]) -> Result<Element> {
        Ok(group.reduce(&self.path_word(path)?)?)
    }

    /// Edge labels along a vertex path, identity labels dropped.
    pub fn path_word(&self, path: &[usize]) -> Result<Word> {
        let mut w = Vec::new();
        for p in path.windows(2) {
            match self.edge_label(p[0], p[1]) {
                Some(Some(s)) => w.push(s),
                Some(None) => {}
                None => return input(format!("no edge {} -> {}", p[0], p[1])),
            }
        }
        Ok(w)
    }

    /// ev of the first n edges of a path.
    pub fn ev_n(&self, group: &Group, path: &[usize], n: usize) -> Result<Element> {
        if path.len() < n + 1 {
            return input("path prefix shorter than n");
        }
        self.ev(group, &path[..=n])
    }

    /// Vertex path from ∗ spelling `w`.
    pub fn path_of(&self, w: &[Symbol]) -> Option<Vec<usize>> {
        let mut p = vec![INITIAL];
        for &s in w {
            p.push(self.step(*p.last().unwrap(), s)?);
        }
        Some(p)
    }

    /// Removes an edge (for fault-injection tests).
    pub fn without_edge(&self, v: usize, s: Symbol) -> GeodesicAutomaton {
        let mut a = self.clone();
        a.trans[v][s as usize] = None;
        a
    }
}

/// Moore minimization of a partial deterministic automaton in which every
/// state accepts, followed by canonical breadth-first renumbering.
fn minimize(trans: &[Vec<Option<usize>>]) -> Vec<Vec<Option<usize>>> {
    let n = trans.len();
    let mut block = vec![0usize; n];
    let mut count = 1;
    loop {
        let mut ids: HashMap<(usize, Vec<Option<usize>>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for v in 0..n {
            let sig: Vec<Option<usize>> = trans[v].iter().map(|t| t.map(|t| block[t])).collect();
            let k = ids.len();
            next[v] = *ids.entry((block[v], sig)).or_insert(k);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let mut rep = vec![usize::MAX; count];
    for v in 0..n {
        if rep[block[v]] == usize::MAX {
            rep[block[v]] = v;
        }
    }
    let quotient: Vec<Vec<Option<usize>>> = (0..count)
        .map(|b| trans[rep[b]].iter().map(|t| t.map(|t| block[t])).collect())
        .collect();
    canonical(&quotient, block[INITIAL])
}

/// Renumbers states in breadth-first order from `start`, labels ascending.
fn canonical(trans: &[Vec<Option<usize>>], start: usize) -> Vec<Vec<Option<usize>>> {
    let mut order = vec![usize::MAX; trans.len()];
    let mut seq = vec![start];
    order[start] = 0;
    let mut i = 0;
    while i < seq.len() {
        for t in trans[seq[i]].iter().flatten() {
            if order[*t] == usize::MAX {
                order[*t] = seq.len();
                seq.push(*t);
            }
        }
        i += 1;
    }
    seq.iter()
        .map(|&v| trans[v].iter().map(|t| t.map(|t| order[t])).collect())
        .collect()
}

/// Splits states by incoming label so that no two edges share endpoints.
fn split_by_label(trans: &[Vec<Option<usize>>]) -> Vec<Vec<Option<usize>>> {
    let alpha = trans[0].len();
    let mut ids: HashMap<(usize, Option<Symbol>), usize> = HashMap::new();
    let mut keys = vec![(INITIAL, None)];
    ids.insert((INITIAL, None), 0);
    let mut out: Vec<Vec<Option<usize>>> = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let (v, _) = keys[i];
        let mut row = vec![None; alpha];
        for s in 0..alpha {
            if let Some(t) = trans[v][s] {
                let key = (t, Some(s as Symbol));
                let k = keys.len();
                let id = *ids.entry(key).or_insert_with(|| k);
                if id == keys.len() {
                    keys.push(key);
                }
                row[s] = Some(id);
            }
        }
        out.push(row);
        i += 1;
    }
    out
}

/// How a comparison word v relates to the word w read so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Track {
    /// Same length, not known to be smaller.
    Same,
    /// Same length and lexicographically smaller.
    Less,
    /// v has stopped: it is shorter than w.
    Ended,
}

/// Elements of B(radius) reached as differences w⁻¹v, with memoized steps
/// d ↦ s⁻¹·d·t.
struct Differences<'a> {
    group: &'a Group,
    radius: usize,
    words: Vec<Word>,
    ids: HashMap<Word, u32>,
    memo: HashMap<(u32, Symbol, Option<Symbol>), Option<u32>>,
}

impl<'a> Differences<'a> {
    fn new(group: &'a Group, radius: usize) -> Self {
        let mut ids = HashMap::new();
        ids.insert(Vec::new(), 0);
        Differences {
            group,
            radius,
            words: vec![Vec::new()],
            ids,
            memo: HashMap::new(),
        }
    }

    fn step(&mut self, d: u32, s: Symbol, t: Option<Symbol>) -> Result<Option<u32>> {
        if let Some(r) = self.memo.get(&(d, s, t)) {
            return Ok(*r);
        }
        let mut w = vec![inv(s)];
        w.extend_from_slice(&self.words[d as usize]);
        w.extend(t);
        let e = match self.group.reduce(&w) {
            Ok(e) => e,
            Err(Error::ResourceCap { .. }) => {
                return Err(Error::Unsaturated {
                    radius: self.radius,
                    detail: "difference elements exceed the Cayley ball cap".into(),
                })
            }
            Err(e) => return Err(e),
        };
        let r = if e.len() > self.radius {
            None
        } else {
            let next = self.words.len() as u32;
            let id = *self.ids.entry(e.word().to_vec()).or_insert(next);
            if id == next {
                self.words.push(e.into_word());
            }
            Some(id)
        };
        self.memo.insert((d, s, t), r);
        Ok(r)
    }
}

/// Subset construction over comparison words v that stay within `radius`
/// of the word w being read. w·s is rejected once some v (shorter, or equal
/// length and lexicographically smaller when `shortlex`) reaches the same
/// element. Returns the minimized, canonically numbered table.
fn difference_automaton(
    group: &Group,
    radius: usize,
    shortlex: bool,
) -> Result<Vec<Vec<Option<usize>>>> {
    let alpha = group.alphabet_size() as Symbol;
    let mut diffs = Differences::new(group, radius);
    let mut ids: HashMap<Vec<(u32, Track)>, usize> = HashMap::new();
    let mut keys: Vec<Vec<(u32, Track)>> = vec![Vec::new()];
    ids.insert(Vec::new(), 0);
    let mut trans: Vec<Vec<Option<usize>>> = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let cur = keys[i].clone();
        let mut row = vec![None; alpha as usize];
        'letters: for s in 0..alpha {
            let mut next: BTreeSet<(u32, Track)> = BTreeSet::new();
            // v equal to w so far: it may diverge now or stop.
            for t in 0..alpha {
                if t == s || (shortlex && t > s) {
                    continue;
                }
                let tr = if shortlex { Track::Less } else { Track::Same };
                if let Some(d) = diffs.step(0, s, Some(t))? {
                    next.insert((d, tr));
                }
            }
            if let Some(d) = diffs.step(0, s, None)? {
                next.insert((d, Track::Ended));
            }
            for &(d, tr) in &cur {
                let moves: &[Option<Symbol>] = &[None];
                let letters: Vec<Option<Symbol>> = match tr {
                    Track::Ended => moves.to_vec(),
                    _ => (0..alpha).map(Some).chain([None]).collect(),
                };
                for t in letters {
                    let Some(d2) = diffs.step(d, s, t)? else {
                        continue;
                    };
                    let tr2 = if t.is_none() { Track::Ended } else { tr };
                    if d2 == 0 {
                        if tr2 == Track::Same {
                            // Same element, same length: behaves like w itself.
                            continue;
                        }
                        continue 'letters;
                    }
                    next.insert((d2, tr2));
                }
            }
            let key: Vec<(u32, Track)> = next.into_iter().collect();
            let k = keys.len();
            let id = *ids.entry(key.clone()).or_insert(k);
            if id == k {
                if k >= MAX_STATES {
                    return Err(Error::Unsaturated {
                        radius,
                        detail: "state cap reached".into(),
                    });
                }
                keys.push(key);
            }
            row[s as usize] = Some(id);
        }
        trans.push(row);
        i += 1;
    }
    log::debug!(
        "difference automaton at radius {radius}: {} raw states, {} differences",
        trans.len(),
        diffs.words.len()
    );
    Ok(minimize(&trans))
}

fn saturated(group: &Group, r_cone: usize, shortlex: bool) -> Result<Vec<Vec<Option<usize>>>> {
    if r_cone < 1 {
        return input("R_cone must be at least 1");
    }
    let a = difference_automaton(group, r_cone, shortlex)?;
    let b = difference_automaton(group, r_cone + 1, shortlex)?;
    if a.len() != b.len() {
        return Err(Error::Unsaturated {
            radius: r_cone,
            detail: format!(
                "{} states at R={} but {} at R={}",
                a.len(),
                r_cone,
                b.len(),
                r_cone + 1
            ),
        });
    }
    Ok(a)
}

/// Accepts every geodesic word. Fails as unsaturated when radius
/// `r_cone + 1` yields a different minimal state count, and as a validation
/// failure when [`validate_geodesics`] rejects it up to `validate_to`.
pub fn build_geodesic_acceptor(
    group: &Group,
    r_cone: usize,
    validate_to: usize,
) -> Result<GeodesicAutomaton> {
    let table = saturated(group, r_cone, false)?;
    let mut a = GeodesicAutomaton::from_table(
        AutomatonKind::AcceptsAllGeodesics,
        group.alphabet_size(),
        table,
    )?;
    a.r_cone = r_cone;
    let report = validate_geodesics(&a, group, validate_to)?;
    if !report.ok {
        return Err(Error::Validation(format!(
            "geodesic acceptor at R={r_cone} fails validation: {}",
            report
                .first_failure
                .map(|f| f.describe())
                .unwrap_or_default()
        )));
    }
    Ok(a)
}

/// Minimal state count of the geodesic acceptor for each radius.
pub fn saturation_sweep(group: &Group, radii: &[usize]) -> Result<Vec<(usize, usize)>> {
    radii
        .iter()
        .map(|&r| Ok((r, difference_automaton(group, r, false)?.len())))
        .collect()
}

/// Accepts exactly the shortlex-least geodesic of each element. The result
/// is split by incoming label if two edges share endpoints, and checked
/// with [`validate_bijection`] up to `validate_to`.
pub fn build_shortlex_acceptor(
    group: &Group,
    r_cone: usize,
    validate_to: usize,
) -> Result<GeodesicAutomaton> {
    let mut table = saturated(group, r_cone, true)?;
    let alpha = group.alphabet_size();
    let probe = GeodesicAutomaton::from_table(AutomatonKind::ShortlexUnique, alpha, table.clone())?;
    let split = probe.has_parallel_edges();
    if split {
        table = split_by_label(&table);
    }
    let mut a = GeodesicAutomaton::from_table(AutomatonKind::ShortlexUnique, alpha, table)?;
    a.r_cone = r_cone;
    a.label_split = split;
    let report = validate_bijection(&a, group, validate_to)?;
    if !report.ok {
        return Err(Error::Validation(format!(
            "shortlex acceptor at R={r_cone} fails validation: {}",
            report
                .first_failure
                .map(|f| f.describe())
                .unwrap_or_default()
        )));
    }
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureKind {
    NotGeodesic,
    Duplicate,
    CountMismatch { expected: u128, found: u128 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BijectionFailure {
    pub length: usize,
    #[serde(flatten)]
    pub kind: FailureKind,
    pub word: Option<String>,
}

impl BijectionFailure {
    pub fn describe(&self) -> String {
        match &self.kind {
            FailureKind::NotGeodesic => {
                format!(
                    "accepted word {} of length {} is not geodesic",
                    self.word.as_deref().unwrap_or(""),
                    self.length
                )
            }
            FailureKind::Duplicate => {
                format!(
                    "two accepted words of length {} evaluate to {}",
                    self.length,
                    self.word.as_deref().unwrap_or("")
                )
            }
            FailureKind::CountMismatch { expected, found } => {
                format!(
                    "{found} accepted words of length {} but {expected} expected",
                    self.length
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BijectionReport {
    pub ok: bool,
    pub n_max: usize,
    pub accepted_per_length: Vec<u128>,
    /// Sphere sizes, or geodesic word counts for a geodesic acceptor.
    pub expected_per_length: Vec<u128>,
    pub cumulative: u128,
    pub first_failure: Option<BijectionFailure>,
}

/// Checks, length by length, that accepted words are geodesic, pairwise
/// distinct as elements, and as many as the sphere.
pub fn validate_bijection(
    aut: &GeodesicAutomaton,
    group: &Group,
    n_max: usize,
) -> Result<BijectionReport> {
    let spheres = group
        .sphere_sizes(n_max)?
        .into_iter()
        .map(|x| x as u128)
        .collect();
    validate(aut, group, n_max, spheres, true)
}

/// Checks that accepted words are geodesic and as many as all geodesic words.
pub fn validate_geodesics(
    aut: &GeodesicAutomaton,
    group: &Group,
    n_max: usize,
) -> Result<BijectionReport> {
    let expected = group.geodesic_word_counts(n_max)?;
    validate(aut, group, n_max, expected, false)
}

fn validate(
    aut: &GeodesicAutomaton,
    group: &Group,
    n_max: usize,
    expected: Vec<u128>,
    distinct: bool,
) -> Result<BijectionReport> {
    let mut counts = vec![1u128];
    let mut frontier: Vec<(usize, Word)> = vec![(INITIAL, Vec::new())];
    let mut failure = None;
    for n in 1..=n_max {
        let mut next = Vec::new();
        for (v, w) in &frontier {
            for (s, t) in aut.out(*v) {
                let mut w2 = w.clone();
                w2.push(s);
                next.push((t, w2));
            }
        }
        counts.push(next.len() as u128);
        if failure.is_none() {
            let mut seen: HashSet<Word> = HashSet::with_capacity(next.len());
            for (_, w) in &next {
                let e = group.reduce(w)?;
                if e.len() != n {
                    failure = Some(BijectionFailure {
                        length: n,
                        kind: FailureKind::NotGeodesic,
                        word: Some(group.alphabet().format(w)),
                    });
                    break;
                }
                if distinct && !seen.insert(e.word().to_vec()) {
                    failure = Some(BijectionFailure {
                        length: n,
                        kind: FailureKind::Duplicate,
                        word: Some(group.format(&e)),
                    });
                    break;
                }
            }
            if failure.is_none() && next.len() as u128 != expected[n] {
                failure = Some(BijectionFailure {
                    length: n,
                    kind: FailureKind::CountMismatch {
                        expected: expected[n],
                        found: next.len() as u128,
                    },
                    word: None,
                });
            }
        }
        if failure.is_some() {
            // Counts for the remaining lengths are still reported.
            let rest = aut.count_words(n_max);
            counts = rest;
            break;
        }
        frontier = next;
    }
    Ok(BijectionReport {
        ok: failure.is_none(),
        n_max,
        cumulative: counts.iter().sum(),
        accepted_per_length: counts,
        expected_per_length: expected,
        first_failure: failure,
    })
}

/// Shortlex acceptor at the smallest saturated radius in `1..=max_radius`.
pub fn build_coding(
    group: &Group,
    max_radius: usize,
    validate_to: usize,
) -> Result<GeodesicAutomaton> {
    let mut last = None;
    for r in 1..=max_radius {
        match build_shortlex_acceptor(group, r, validate_to) {
            Ok(a) => return Ok(a),
            Err(e @ (Error::Unsaturated { .. } | Error::Validation(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Input("max radius must be at least 1".into())))
}

#[derive(Serialize, Deserialize)]
struct AutomatonFile {
    format: String,
    version: u32,
    kind: AutomatonKind,
    alphabet: Vec<String>,
    vertices: usize,
    initial: usize,
    zero: Option<usize>,
    edges: Vec<(usize, usize, Option<String>)>,
    flags: Flags,
}

#[derive(Serialize, Deserialize)]
struct Flags {
    augmented: bool,
    label_split: bool,
    r_cone: usize,
}

pub const FORMAT_NAME: &str = "orbitcount-automaton";
pub const FORMAT_VERSION: u32 = 1;

impl GeodesicAutomaton {
    pub fn to_json(&self, group: &Group) -> String {
        let al = group.alphabet();
        let file = AutomatonFile {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            kind: self.kind,
            alphabet: al.names().to_vec(),
            vertices: self.num_vertices(),
            initial: INITIAL,
            zero: self.zero,
            edges: self
                .edges()
                .iter()
                .map(|e| (e.from, e.to, e.label.map(|s| al.symbol_name(s))))
                .collect(),
            flags: Flags {
                augmented: self.zero.is_some(),
                label_split: self.label_split,
                r_cone: self.r_cone,
            },
        };
        serde_json::to_string_pretty(&file).expect("automaton serializes")
    }

    pub fn from_json(text: &str, group: &Group) -> Result<Self> {
        let file: AutomatonFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("automaton file: {e}")))?;
        if file.format != FORMAT_NAME || file.version != FORMAT_VERSION {
            return input(format!(
                "unsupported automaton format {} v{}",
                file.format, file.version
            ));
        }
        if file.alphabet != group.alphabet().names() {
            return input("automaton alphabet does not match the group");
        }
        let coding = file.vertices - usize::from(file.zero.is_some());
        if file.zero.is_some_and(|z| z != coding) || file.initial != INITIAL {
            return input("automaton must number ∗ first and the 0-state last");
        }
        let mut trans = vec![vec![None; group.alphabet_size()]; coding];
        for (from, to, label) in file.edges {
            match label {
                Some(name) => {
                    let w = group.alphabet().parse(&name)?;
                    if w.len() != 1 || from >= coding || to >= coding {
                        return input(format!("bad edge label {name}"));
                    }
                    if trans[from][w[0] as usize].replace(to).is_some() {
                        return input("automaton is not deterministic");
                    }
                }
                None => {
                    if Some(to) != file.zero {
                        return input("identity edges must end at the 0-state");
                    }
                }
            }
        }
        let mut a = GeodesicAutomaton::from_table(file.kind, group.alphabet_size(), trans)?;
        a.zero = file.zero;
        a.r_cone = file.flags.r_cone;
        a.label_split = file.flags.label_split;
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Presentation;

    #[test]
    fn free_geodesic_acceptor_has_five_states() {
        let g = Group::new(Presentation::free(2).unwrap());
        let a = build_geodesic_acceptor(&g, 1, 8).unwrap();
        assert_eq!(a.num_vertices(), 5);
        let counts = a.count_words(8);
        for n in 1..=8 {
            assert_eq!(counts[n], 4 * 3u128.pow(n as u32 - 1));
        }
    }

    #[test]
    fn free_shortlex_equals_geodesic() {
        let g = Group::new(Presentation::free(2).unwrap());
        let geo = build_geodesic_acceptor(&g, 1, 8).unwrap();
        let sl = build_shortlex_acceptor(&g, 1, 6).unwrap();
        assert_eq!(geo.trans, sl.trans);
        assert!(!sl.label_split);
    }

    #[test]
    fn augmentation() {
        let g = Group::new(Presentation::free(2).unwrap());
        let a = build_shortlex_acceptor(&g, 1, 4).unwrap();
        let aug = a.augment();
        assert_eq!(aug.num_vertices(), 6);
        assert_eq!(
            aug.edges().len(),
            a.edges().len() + a.num_vertices() - 1 + 1
        );
        assert_eq!(aug.augment(), aug);
        let z = aug.zero().unwrap();
        let p = vec![0, aug.step(0, 0).unwrap(), z, z];
        assert_eq!(aug.ev(&g, &p).unwrap(), g.parse("a").unwrap());
        assert!(aug.ev(&g, &[0, z]).is_err());
    }

    #[test]
    fn ev_examples() {
        let g = Group::new(Presentation::free(2).unwrap());
        let a = build_shortlex_acceptor(&g, 1, 4).unwrap();
        assert!(a.ev(&g, &[0]).unwrap().is_identity());
        let w = g.alphabet().parse("aba").unwrap();
        let p = a.path_of(&w).unwrap();
        let e = a.ev(&g, &p).unwrap();
        assert_eq!(g.format(&e), "aba");
        assert_eq!(a.ev_n(&g, &p, 2).unwrap(), g.parse("ab").unwrap());
    }

    #[test]
    fn fault_injection_reports_smallest_length() {
        let g = Group::new(Presentation::free(2).unwrap());
        let a = build_shortlex_acceptor(&g, 1, 4).unwrap();
        let v = a.run(&g.alphabet().parse("ab").unwrap()).unwrap();
        // The state after "ab" is the state after "b", so "bb" goes missing.
        let broken = a.without_edge(v, 2);
        let r = validate_bijection(&broken, &g, 6).unwrap();
        assert!(!r.ok);
        let f = r.first_failure.unwrap();
        assert_eq!(f.length, 2);
        assert_eq!(
            f.kind,
            FailureKind::CountMismatch {
                expected: 12,
                found: 11
            }
        );
    }

    #[test]
    fn json_round_trip() {
        let g = Group::new(Presentation::free(2).unwrap());
        let a = build_shortlex_acceptor(&g, 1, 4).unwrap().augment();
        let text = a.to_json(&g);
        assert_eq!(GeodesicAutomaton::from_json(&text, &g).unwrap(), a);
        assert_eq!(text, a.to_json(&g));
    }
}
