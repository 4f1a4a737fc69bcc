//! Left-invariant metrics on a group, evaluated at the base point o.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::group::{cyclic_reduce, inv, ConjClass, Element, Group, Symbol};
use crate::mobius::{orbit_distance, product, Mat2};

/// Nearest-neighbour random walk: `probs[s]` for each alphabet symbol plus an
/// optional holding probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub probs: Vec<f64>,
    #[serde(default)]
    pub identity: f64,
}

impl WalkSpec {
    pub fn uniform(alphabet_size: usize) -> Self {
        WalkSpec {
            probs: vec![1.0 / alphabet_size as f64; alphabet_size],
            identity: 0.0,
        }
    }

    pub fn validate(&self, alphabet_size: usize) -> Result<()> {
        if self.probs.len() != alphabet_size {
            return input(format!("walk needs {alphabet_size} probabilities"));
        }
        if self.probs.iter().any(|&p| !(p > 0.0)) || self.identity < 0.0 {
            return input("walk probabilities must be positive on every generator");
        }
        let total: f64 = self.probs.iter().sum::<f64>() + self.identity;
        if (total - 1.0).abs() > 1e-12 {
            return input(format!("walk probabilities sum to {total}, not 1"));
        }
        for s in 0..alphabet_size {
            if (self.probs[s] - self.probs[inv(s as Symbol) as usize]).abs() > 1e-12 {
                return input("walk is not symmetric");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricKind {
    Word,
    ScaledWord(f64),
    /// Green metric of the uniform nearest-neighbour walk on a free group.
    GreenClosedForm,
    GreenNumeric {
        walk: WalkSpec,
        absorbing_radius: usize,
    },
    /// d(o, g) = d_H(i, ρ(g)·i) for the matrix model ρ.
    FuchsianOrbit,
}

/// Distance from Green data: on free groups the absorbing problem is solved
/// exactly by eliminating subtrees; otherwise by conjugate gradients on the
/// enumerated ball.
#[derive(Clone, Debug)]
enum GreenSolution {
    Tree {
        q: Vec<Vec<f64>>,
        g_oo: f64,
        radius: usize,
    },
    Ball {
        u: Vec<f64>,
        radius: usize,
        residual: f64,
    },
}

const TREE_MARGIN: usize = 10;

#[derive(Clone)]
pub struct Metric {
    kind: MetricKind,
    group: Arc<Group>,
    scale: f64,
    mats: Vec<Mat2>,
    green: Option<Arc<GreenSolution>>,
}

impl std::fmt::Debug for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Metric({})", self.tag())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationLength {
    pub value: f64,
    pub error: f64,
    pub low_confidence: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicityReport {
    pub samples: usize,
    pub in_range: usize,
    pub violations: usize,
    pub max_violation: f64,
    /// Largest c with |four-point difference| ≤ e^{−c·gap} on every in-range sample.
    pub fitted_c: f64,
    pub inconclusive: bool,
}

fn symbol_matrices(group: &Group) -> Vec<Mat2> {
    match group.presentation().matrices() {
        Some(ms) => ms.iter().flat_map(|m| [*m, m.inverse()]).collect(),
        None => Vec::new(),
    }
}

impl Metric {
    pub fn new(group: Arc<Group>, kind: MetricKind) -> Result<Self> {
        let free = group.presentation().is_free();
        let alpha = group.alphabet_size();
        let mut green = None;
        match &kind {
            MetricKind::Word => {}
            MetricKind::ScaledWord(f) => {
                if !(*f > 0.0) {
                    return input("scale factor must be positive");
                }
            }
            MetricKind::GreenClosedForm => {
                if !free {
                    return input("closed-form Green metric is only available on free groups");
                }
            }
            MetricKind::GreenNumeric {
                walk,
                absorbing_radius,
            } => {
                walk.validate(alpha)?;
                green = Some(Arc::new(if free {
                    solve_tree(walk, *absorbing_radius)?
                } else {
                    solve_ball(&group, walk, *absorbing_radius)?
                }));
            }
            MetricKind::FuchsianOrbit => {
                if group.presentation().matrices().is_none() {
                    return input("Fuchsian orbit metric needs a matrix model");
                }
            }
        }
        let mats = symbol_matrices(&group);
        Ok(Metric {
            kind,
            group,
            scale: 1.0,
            mats,
            green,
        })
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The metric k·d.
    pub fn scaled(&self, k: f64) -> Metric {
        let mut m = self.clone();
        m.scale *= k;
        m
    }

    pub fn tag(&self) -> String {
        let base = match &self.kind {
            MetricKind::Word => "word".to_string(),
            MetricKind::ScaledWord(f) => format!("scaled_word({f})"),
            MetricKind::GreenClosedForm => "green_closed_form".to_string(),
            MetricKind::GreenNumeric {
                absorbing_radius, ..
            } => format!("green_numeric(R={absorbing_radius})"),
            MetricKind::FuchsianOrbit => "fuchsian_orbit".to_string(),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    /// `Some(c)` when d = c·|·|_S exactly.
    pub fn word_multiple(&self) -> Option<f64> {
        let k = self.group.alphabet_size() as f64;
        match &self.kind {
            MetricKind::Word => Some(self.scale),
            MetricKind::ScaledWord(f) => Some(f * self.scale),
            MetricKind::GreenClosedForm => Some((k - 1.0).ln() * self.scale),
            _ => None,
        }
    }

    pub fn is_fuchsian(&self) -> bool {
        matches!(self.kind, MetricKind::FuchsianOrbit)
    }

    /// ρ(w) with its log scale.
    pub fn matrix_of(&self, w: &[Symbol]) -> (Mat2, f64) {
        product(w.iter().map(|&s| &self.mats[s as usize]))
    }

    pub fn symbol_matrix(&self, s: Symbol) -> &Mat2 {
        &self.mats[s as usize]
    }

    pub fn dist(&self, g: &Element) -> Result<f64> {
        self.dist_geodesic(g.word())
    }

    /// d(o, w) for a geodesic word `w` (any word for the Fuchsian metric).
    pub fn dist_geodesic(&self, w: &[Symbol]) -> Result<f64> {
        let raw = match &self.kind {
            MetricKind::Word => w.len() as f64,
            MetricKind::ScaledWord(f) => f * w.len() as f64,
            MetricKind::GreenClosedForm => {
                w.len() as f64 * ((self.group.alphabet_size() - 1) as f64).ln()
            }
            MetricKind::GreenNumeric { .. } => self.green_distance(w)?,
            MetricKind::FuchsianOrbit => {
                let (m, s) = self.matrix_of(w);
                orbit_distance(&m, s)
            }
        };
        Ok(raw * self.scale)
    }

    fn green_distance(&self, w: &[Symbol]) -> Result<f64> {
        match self.green.as_deref().expect("green data") {
            GreenSolution::Tree { q, radius, .. } => {
                if w.len() + TREE_MARGIN.min(radius / 3) > *radius {
                    return Err(Error::Numeric(format!(
                        "Green metric truncated: |g| = {} too close to absorbing radius {radius}",
                        w.len()
                    )));
                }
                Ok(w.iter()
                    .enumerate()
                    .map(|(j, &s)| -q[radius - j - 1][s as usize].ln())
                    .sum())
            }
            GreenSolution::Ball { u, radius, .. } => {
                if w.len() + 1 > *radius {
                    return Err(Error::Numeric(format!(
                        "Green metric truncated: |g| = {} too close to absorbing radius {radius}",
                        w.len()
                    )));
                }
                let v = self
                    .group
                    .with_ball(*radius, |b| b.trace(0, w))?
                    .expect("inside ball");
                Ok(-(u[v as usize] / u[0]).ln())
            }
        }
    }

    /// G(o, g) from the absorbing-boundary solve.
    pub fn green_value(&self, g: &Element) -> Result<f64> {
        let Some(sol) = self.green.as_deref() else {
            return input("not a numeric Green metric");
        };
        let g_oo = match sol {
            GreenSolution::Tree { g_oo, .. } => *g_oo,
            GreenSolution::Ball { u, .. } => u[0],
        };
        Ok(g_oo * (-self.green_distance(g.word())?).exp())
    }

    pub fn green_residual(&self) -> Option<f64> {
        match self.green.as_deref()? {
            GreenSolution::Ball { residual, .. } => Some(*residual),
            GreenSolution::Tree { .. } => Some(0.0),
        }
    }

    pub fn dist_between(&self, x: &Element, y: &Element) -> Result<f64> {
        let mut w = crate::group::inverse_word(x.word());
        w.extend_from_slice(y.word());
        let z = self.group.reduce(&w)?;
        self.dist(&z)
    }

    pub fn gromov_product(&self, x: &Element, y: &Element) -> Result<f64> {
        Ok(0.5 * (self.dist(x)? + self.dist(y)? - self.dist_between(x, y)?))
    }

    /// d(x, pₙ) − d(o, pₙ) where pₙ is the length-n prefix of a geodesic ray.
    pub fn busemann_trunc(&self, x: &Element, ray: &[Symbol], n: usize) -> Result<f64> {
        if ray.len() < n {
            return input("ray prefix shorter than requested depth");
        }
        let p = self.group.reduce(&ray[..n])?;
        if p.len() != n {
            return input("ray prefix is not geodesic");
        }
        Ok(self.dist_between(x, &p)? - self.dist(&p)?)
    }

    pub fn translation_length(&self, c: &ConjClass, power_cap: usize) -> Result<TranslationLength> {
        let rep = &c.representative;
        if rep.is_identity() {
            return Ok(TranslationLength {
                value: 0.0,
                error: 0.0,
                low_confidence: false,
            });
        }
        let free = self.group.presentation().is_free();
        if let (Some(k), true) = (self.word_multiple(), free) {
            let (_, core) = cyclic_reduce(rep.word());
            return Ok(TranslationLength {
                value: k * core.len() as f64,
                error: 0.0,
                low_confidence: false,
            });
        }
        if self.is_fuchsian() {
            let (m, s) = self.matrix_of(rep.word());
            // |tr| grows like e^{ℓ/2}; use the log form for scaled products.
            let value = if s == 0.0 {
                m.translation_length()
            } else {
                2.0 * (m.trace().abs().ln() + s)
            };
            return Ok(TranslationLength {
                value: value * self.scale,
                error: 0.0,
                low_confidence: false,
            });
        }
        // Richardson extrapolation of d(o, gᵐ)/m over m = 2, 4, 8, …
        let mut avgs = Vec::new();
        let mut m = 2;
        while m <= power_cap.max(2) {
            match self.dist(&self.group.power(rep, m)?) {
                Ok(d) => avgs.push((m, d / m as f64)),
                Err(Error::Numeric(_)) | Err(Error::ResourceCap { .. }) => break,
                Err(e) => return Err(e),
            }
            m *= 2;
        }
        if avgs.is_empty() {
            let d = self.dist(rep)?;
            return Ok(TranslationLength {
                value: d,
                error: d,
                low_confidence: true,
            });
        }
        let ex: Vec<f64> = avgs.windows(2).map(|w| 2.0 * w[1].1 - w[0].1).collect();
        let (value, error) = match ex.len() {
            0 => (avgs[0].1, avgs[0].1),
            1 => (ex[0], (ex[0] - avgs[1].1).abs()),
            n => (
                ex[n - 1],
                ex.iter().map(|e| (e - ex[n - 1]).abs()).fold(0.0, f64::max),
            ),
        };
        Ok(TranslationLength {
            value,
            error,
            low_confidence: ex.len() < 2,
        })
    }

    /// Samples quadruples x, x′ ∈ B(2), y ∈ B(n), y′ = y·h with h ∈ B(2), and
    /// tests the four-point condition with gap d(x,y) − d(x,x′) + d(x′,y′) − d(y,y′).
    pub fn check_strong_hyperbolicity(
        &self,
        sample_count: usize,
        n: usize,
        r0: f64,
        c_candidate: f64,
        seed: u64,
    ) -> Result<HyperbolicityReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = self.group.alphabet_size() as u8;
        let random_word = |len: usize, rng: &mut ChaCha8Rng| -> Vec<Symbol> {
            let mut w: Vec<Symbol> = Vec::with_capacity(len);
            while w.len() < len {
                let s = rng.gen_range(0..alpha);
                if w.last() != Some(&inv(s)) {
                    w.push(s);
                }
            }
            w
        };
        let mut rep = HyperbolicityReport {
            samples: sample_count,
            in_range: 0,
            violations: 0,
            max_violation: 0.0,
            fitted_c: f64::INFINITY,
            inconclusive: false,
        };
        for _ in 0..sample_count {
            let lx = rng.gen_range(0..=2);
            let lx2 = rng.gen_range(0..=2);
            let lh = rng.gen_range(0..=2);
            let x = self.group.reduce(&random_word(lx, &mut rng))?;
            let x2 = self.group.reduce(&random_word(lx2, &mut rng))?;
            let yw = random_word(n, &mut rng);
            let mut y2w = yw.clone();
            y2w.extend(random_word(lh, &mut rng));
            let y = self.group.reduce(&yw)?;
            let y2 = self.group.reduce(&y2w)?;
            let d = |a: &Element, b: &Element| self.dist_between(a, b);
            let gap = d(&x, &y)? - d(&x, &x2)? + d(&x2, &y2)? - d(&y, &y2)?;
            if gap < r0 {
                continue;
            }
            rep.in_range += 1;
            let diff = (d(&x, &y)? - d(&x2, &y)? - d(&x, &y2)? + d(&x2, &y2)?).abs();
            let bound = (-c_candidate * gap).exp();
            if diff > bound {
                rep.violations += 1;
                rep.max_violation = rep.max_violation.max(diff - bound);
            }
            if diff > 0.0 {
                rep.fitted_c = rep.fitted_c.min(-diff.ln() / gap);
            }
        }
        rep.inconclusive = rep.in_range < sample_count / 10 + 1;
        Ok(rep)
    }

    /// Range of d(o,x)/|x|_S over S_n (quasi-isometry sanity).
    pub fn ratio_range(&self, n: usize) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut err = None;
        self.group
            .visit_sphere(n, |w| match self.dist_geodesic(w) {
                Ok(d) => {
                    let r = d / n as f64;
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
                Err(e) => err = Some(e),
            })?;
        match err {
            Some(e) => Err(e),
            None => Ok((lo, hi)),
        }
    }
}

/// G(o, g) for a walk on the ball of the given absorbing radius.
pub fn green_function(
    group: Arc<Group>,
    walk: &WalkSpec,
    g: &Element,
    absorbing_radius: usize,
) -> Result<f64> {
    let m = Metric::new(
        group,
        MetricKind::GreenNumeric {
            walk: walk.clone(),
            absorbing_radius,
        },
    )?;
    m.green_value(g)
}

/// Subtree elimination on the free group: `q[m][s]` is the ratio u(x·s)/u(x)
/// when the subtree below x·s has m further levels.
fn solve_tree(walk: &WalkSpec, radius: usize) -> Result<GreenSolution> {
    if radius < 2 {
        return input("absorbing radius must be at least 2");
    }
    let alpha = walk.probs.len();
    let p = &walk.probs;
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(radius);
    let mut prev = vec![0.0; alpha];
    for _m in 0..radius {
        let cur: Vec<f64> = (0..alpha)
            .map(|s| {
                let back = inv(s as Symbol) as usize;
                let out: f64 = (0..alpha)
                    .filter(|&t| t != back)
                    .map(|t| p[t] * prev[t])
                    .sum();
                p[back] / (1.0 - walk.identity - out)
            })
            .collect();
        q.push(cur.clone());
        prev = cur;
    }
    let out: f64 = (0..alpha).map(|t| p[t] * prev[t]).sum();
    let denom = 1.0 - walk.identity - out;
    if !(denom > 0.0) {
        return Err(Error::Numeric("Green elimination broke down".into()));
    }
    Ok(GreenSolution::Tree {
        q,
        g_oo: 1.0 / denom,
        radius,
    })
}

/// Conjugate gradients for (I − P)u = δ_o on B(R), zero outside.
fn solve_ball(group: &Group, walk: &WalkSpec, radius: usize) -> Result<GreenSolution> {
    let alpha = group.alphabet_size();
    let (nbrs, n) = group.with_ball(radius + 1, |b| {
        let n = b.sphere_range(radius).end;
        let mut nb = vec![u32::MAX; n * alpha];
        for v in 0..n {
            for s in 0..alpha {
                let y = b.step(v as u32, s as Symbol);
                if (y as usize) < n {
                    nb[v * alpha + s] = y;
                }
            }
        }
        (nb, n)
    })?;
    let apply = |x: &[f64], out: &mut [f64]| {
        for v in 0..n {
            let mut acc = (1.0 - walk.identity) * x[v];
            for s in 0..alpha {
                let y = nbrs[v * alpha + s];
                if y != u32::MAX {
                    acc -= walk.probs[s] * x[y as usize];
                }
            }
            out[v] = acc;
        }
    };
    let mut u = vec![0.0; n];
    let mut r = vec![0.0; n];
    r[0] = 1.0;
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr: f64 = 1.0;
    let mut iter = 0;
    while rr.sqrt() > 1e-14 {
        iter += 1;
        if iter > 10_000 {
            return Err(Error::Numeric(format!(
                "Green solve did not converge, residual {}",
                rr.sqrt()
            )));
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::Numeric(
                "Green system is not positive definite".into(),
            ));
        }
        let a = rr / pap;
        for i in 0..n {
            u[i] += a * p[i];
            r[i] -= a * ap[i];
        }
        let rr_new: f64 = r.iter().map(|x| x * x).sum();
        let b = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + b * p[i];
        }
        rr = rr_new;
    }
    apply(&u, &mut ap);
    ap[0] -= 1.0;
    let residual = ap.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(GreenSolution::Ball {
        u,
        radius,
        residual,
    })
}
