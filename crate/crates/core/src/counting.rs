//! Orbit counting on word balls, asymptotic fits, Poincaré partial sums and
//! correlation counts.

use num_complex::Complex64;
use serde::Serialize;

use crate::automaton::GeodesicAutomaton;
use crate::error::{input, Error, Result};
use crate::group::Symbol;
use crate::metric::Metric;
use crate::shift::{word_maximal_components, Decomposition};

/// Cap on the number of group elements enumerated by a single count.
pub const MAX_BALL: usize = 30_000_000;
/// Relative variation of N(T)e^{−δT}/C above which the oscillation flag is raised.
pub const OSCILLATION_THRESHOLD: f64 = 0.05;
const FIT_POINTS: usize = 40;

fn ball_size(metric: &Metric, n_max: usize) -> Result<usize> {
    let total: usize = metric.group().sphere_sizes(n_max)?.iter().sum();
    if total > MAX_BALL {
        return Err(Error::ResourceCap {
            what: "ball size",
            requested: total,
            cap: MAX_BALL,
        });
    }
    Ok(total)
}

/// Calls `f(n, word)` on every element of B_S(n_max).
fn visit_ball(
    metric: &Metric,
    n_max: usize,
    mut f: impl FnMut(usize, &[Symbol]) -> Result<()>,
) -> Result<()> {
    let mut err = None;
    for n in 0..=n_max {
        metric.group().visit_sphere(n, |w| {
            if err.is_none() {
                if let Err(e) = f(n, w) {
                    err = Some(e);
                }
            }
        })?;
        if let Some(e) = err.take() {
            return Err(e);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub tag: String,
    pub n_max: usize,
    /// d(o, x) for x in B_S(n_max), sorted.
    #[serde(skip)]
    pub distances: Vec<f64>,
    /// inf of d over the outermost sphere; N(T) is complete for T ≤ t_cov.
    pub t_cov: f64,
    pub ball_size: usize,
}

impl CountReport {
    /// N(T) = #{x : d(o,x) < T}.
    pub fn n_below(&self, t: f64) -> usize {
        self.distances.partition_point(|&d| d < t)
    }

    pub fn series(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.n_below(t) as f64).collect()
    }
}

pub fn count_ball(metric: &Metric, n_max: usize) -> Result<CountReport> {
    let size = ball_size(metric, n_max)?;
    let mut distances = Vec::with_capacity(size);
    let mut t_cov = f64::INFINITY;
    visit_ball(metric, n_max, |n, w| {
        let d = metric.dist_geodesic(w)?;
        if n == n_max {
            t_cov = t_cov.min(d);
        }
        distances.push(d);
        Ok(())
    })?;
    distances.sort_by(f64::total_cmp);
    Ok(CountReport {
        tag: metric.tag(),
        n_max,
        distances,
        t_cov,
        ball_size: size,
    })
}

/// `count` evenly spaced points covering [a, b].
pub fn grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Ordinary least squares y = a + b·x; returns (a, b, residual norm).
pub fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - a - b * x).powi(2))
        .sum();
    (a, b, rss.sqrt())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSource {
    Hint,
    LogSlope,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticFit {
    pub c: f64,
    pub delta: f64,
    pub delta_source: DeltaSource,
    /// Least-squares fit of log N on the same window.
    pub c_lsq: f64,
    pub delta_lsq: f64,
    /// (T, N(T), N(T)e^{−δT}/C − 1) on the fit window.
    pub residuals: Vec<(f64, f64, f64)>,
    /// (max − min) of N(T)e^{−δT}/C over the window.
    pub variation: f64,
    pub oscillation_flag: bool,
    /// The two C estimators differ by more than 2%.
    pub estimators_disagree: bool,
}

/// Fit N(T) ≈ C e^{δT} over the last third of [0, t_max].
pub fn fit_series(ts: &[f64], ns: &[f64], delta_hint: Option<f64>) -> Result<AsymptoticFit> {
    if ts.len() < 20 || ns.iter().any(|&n| !(n > 0.0)) {
        return input("fit needs at least 20 points with positive counts");
    }
    let logs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (a, b, _) = line_fit(ts, &logs);
    let (delta, delta_source) = match delta_hint {
        Some(d) => (d, DeltaSource::Hint),
        None => (b, DeltaSource::LogSlope),
    };
    let ratios: Vec<f64> = ts
        .iter()
        .zip(ns)
        .map(|(t, n)| n * (-delta * t).exp())
        .collect();
    let c = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let residuals: Vec<(f64, f64, f64)> = ts
        .iter()
        .zip(ns)
        .zip(&ratios)
        .map(|((&t, &n), r)| (t, n, r / c - 1.0))
        .collect();
    let lo = residuals.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let hi = residuals
        .iter()
        .map(|r| r.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let variation = hi - lo;
    let c_lsq = a.exp();
    Ok(AsymptoticFit {
        c,
        delta,
        delta_source,
        c_lsq,
        delta_lsq: b,
        residuals,
        variation,
        oscillation_flag: variation > OSCILLATION_THRESHOLD,
        estimators_disagree: delta_hint.is_none() && (c_lsq / c - 1.0).abs() > 0.02,
    })
}

pub fn fit_asymptotic(report: &CountReport, delta_hint: Option<f64>) -> Result<AsymptoticFit> {
    if !(report.t_cov > 0.0) || !report.t_cov.is_finite() {
        return input("covered range is empty");
    }
    let ts = grid(2.0 * report.t_cov / 3.0, report.t_cov, FIT_POINTS);
    fit_series(&ts, &report.series(&ts), delta_hint)
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectedFit {
    pub c: f64,
    pub delta: f64,
    pub kappa: f64,
    /// Coefficient of T^{−κ}.
    pub b: f64,
    /// Relative residual norm.
    pub rss: f64,
}

/// Weighted fit of N e^{−δT} = C + C·b·T^{−κ}: linear in (C, C·b) for
/// fixed (δ, κ), minimized over (δ, κ) by nested golden-section search.
///
/// Counts are read as floors of a smooth curve: each point is centred at
/// N + ½ and its relative residual is weighted by 1/σ with
/// σ² = 1/(12(N + ½)²) + σ₀².
pub fn fit_corrected(ts: &[f64], ns: &[f64]) -> Result<CorrectedFit> {
    if ts.len() < 20 || ts.iter().any(|&t| !(t > 0.0)) || ns.iter().any(|&n| !(n > 0.0)) {
        return input("corrected fit needs at least 20 points with T > 0 and positive counts");
    }
    const SIGMA0: f64 = 1e-9;
    let weights: Vec<f64> = ns
        .iter()
        .map(|n| 1.0 / (1.0 / (12.0 * (n + 0.5).powi(2)) + SIGMA0 * SIGMA0).sqrt())
        .collect();
    let yy: f64 = weights.iter().map(|w| w * w).sum();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // Weighted least squares by Gram–Schmidt on the two columns; the
    // weights span many decades, so normal equations lose too much.
    let project = |delta: f64, kappa: f64| -> (f64, f64, f64) {
        let mut a = Vec::with_capacity(ts.len());
        let mut b = Vec::with_capacity(ts.len());
        for ((&t, &n), &w) in ts.iter().zip(ns).zip(&weights) {
            let y = (n + 0.5) * (-delta * t).exp();
            a.push(w / y);
            b.push(w * t.powf(-kappa) / y);
        }
        let na = dot(&a, &a).sqrt();
        let q1: Vec<f64> = a.iter().map(|x| x / na).collect();
        let p = dot(&q1, &b);
        let b2: Vec<f64> = b.iter().zip(&q1).map(|(x, q)| x - p * q).collect();
        let nb = dot(&b2, &b2).sqrt();
        let q2: Vec<f64> = b2.iter().map(|x| x / nb).collect();
        let (z1, z2) = (dot(&q1, &weights), dot(&q2, &weights));
        let c1 = z2 / nb;
        let c0 = (z1 - p * c1) / na;
        let rss: f64 = weights
            .iter()
            .zip(q1.iter().zip(&q2))
            .map(|(w, (x, y))| (w - z1 * x - z2 * y).powi(2))
            .sum();
        (c0, c1, rss / yy)
    };
    let golden = |f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize| -> f64 {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..iters {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = f(x2);
            }
        }
        0.5 * (a + b)
    };
    let logs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (_, slope, _) = line_fit(ts, &logs);
    let width = 0.2 * slope.abs().max(0.1);
    // Neither profile is unimodal over its whole bracket: scan coarsely,
    // then refine around the best grid point.
    let deltas = grid(slope - width, slope + width, 81);
    let dstep = deltas[1] - deltas[0];
    let best_delta = |kappa: f64| {
        let d0 = deltas
            .iter()
            .copied()
            .min_by(|a, b| project(*a, kappa).2.total_cmp(&project(*b, kappa).2))
            .unwrap();
        golden(&|d| project(d, kappa).2, d0 - dstep, d0 + dstep, 80)
    };
    let kappas = grid(0.05, 8.0, 80);
    let mut k0 = kappas[0];
    let mut best = f64::INFINITY;
    for &k in &kappas {
        let r = project(best_delta(k), k).2;
        if r < best {
            best = r;
            k0 = k;
        }
    }
    let step = kappas[1] - kappas[0];
    let kappa = golden(
        &|k| project(best_delta(k), k).2,
        (k0 - step).max(1e-3),
        k0 + step,
        60,
    );
    let delta = best_delta(kappa);
    let (c0, c1, _) = project(delta, kappa);
    let rel: f64 = ts
        .iter()
        .zip(ns)
        .map(|(&t, &n)| {
            let m = (c0 + c1 * t.powf(-kappa)) * (delta * t).exp();
            ((n + 0.5 - m) / (n + 0.5)).powi(2)
        })
        .sum();
    Ok(CorrectedFit {
        c: c0,
        delta,
        kappa,
        b: c1 / c0,
        rss: (rel / ts.len() as f64).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorTermFit {
    pub kappa: f64,
    /// Approximate 95% interval from the regression standard error.
    pub kappa_interval: (f64, f64),
    pub points: usize,
}

/// log|residual| against log T over the window where residuals are above
/// numeric noise.
pub fn error_term_fit(fit: &AsymptoticFit, arithmetic: bool) -> Result<ErrorTermFit> {
    if arithmetic {
        return input("error-term fit applies to non-arithmetic metrics only");
    }
    let noise = 1e-12;
    let pts: Vec<(f64, f64)> = fit
        .residuals
        .iter()
        .filter(|r| r.2.abs() > noise && r.0 > 1.0)
        .map(|r| (r.0.ln(), r.2.abs().ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::Unresolved("residuals are at numeric noise".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (_, b, rss) = line_fit(&xs, &ys);
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let se = rss / ((xs.len() as f64 - 2.0).max(1.0) * sxx).sqrt();
    Ok(ErrorTermFit {
        kappa: -b,
        kappa_interval: (-b - 2.0 * se, -b + 2.0 * se),
        points: xs.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareRow {
    pub n: usize,
    /// Σ_{|x|=n} e^{−s d(o,x)}.
    pub direct: Complex64,
    /// Per maximal component j: direct sum over M_j(n).
    pub direct_restricted: Vec<Complex64>,
    /// Per maximal component j: L_{j,s}^{n+1} χ(0̇).
    pub operator: Vec<Complex64>,
    /// direct − Σ_j direct_restricted.
    pub beta: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub s: Complex64,
    pub components: Vec<usize>,
    pub rows: Vec<PoincareRow>,
    pub max_relative_discrepancy: f64,
    /// Partial sums Σ_{n ≤ N} of the direct sphere sums.
    pub partial_sums: Vec<Complex64>,
    /// max/min of |sphere sum| over the second half of the range.
    pub sphere_sum_spread: f64,
    /// Ratio of the last two sphere sums.
    pub sphere_sum_ratio: f64,
}

fn maximal_vertex_sets(
    aut: &GeodesicAutomaton,
    dec: &Decomposition,
) -> Result<(Vec<usize>, Vec<Vec<bool>>)> {
    let ids = word_maximal_components(aut, dec)?;
    let n = aut.num_vertices();
    // blocked[j][v]: v lies in a maximal component other than j.
    let blocked = ids
        .iter()
        .map(|&j| {
            let mut b = vec![false; n];
            for &k in &ids {
                if k != j {
                    for &v in &dec.components[k].vertices {
                        b[v] = true;
                    }
                }
            }
            b
        })
        .collect();
    Ok((ids, blocked))
}

/// Compares Σ_{|x|=n} e^{−s d(o,x)} computed along forward paths with the
/// operator form L_{j,s}^{n+1} χ(0̇) computed by backward preimage recursion
/// from 0̇ on the augmented coding, where L_{j,s} drops every edge touching
/// a maximal component other than C_j and e^{−sΨ} uses the exact
/// increments Ψ(y) = d(o, ev(y)) − d(o, ev(σy)) of eventually-zero y.
pub fn poincare_compare(
    aut: &GeodesicAutomaton,
    dec: &Decomposition,
    metric: &Metric,
    s: Complex64,
    n_max: usize,
) -> Result<PoincareReport> {
    let coding = aut.unaugmented();
    let (ids, blocked) = maximal_vertex_sets(&coding, dec)?;
    let m = ids.len();
    let mut rows: Vec<PoincareRow> = (1..=n_max)
        .map(|n| PoincareRow {
            n,
            direct: Complex64::new(0.0, 0.0),
            direct_restricted: vec![Complex64::new(0.0, 0.0); m],
            operator: vec![Complex64::new(0.0, 0.0); m],
            beta: Complex64::new(0.0, 0.0),
        })
        .collect();
    let mut budget = 0usize;
    let mut charge = |k: usize| -> Result<()> {
        budget += k;
        if budget > MAX_BALL {
            return Err(Error::ResourceCap {
                what: "Poincaré paths",
                requested: budget,
                cap: MAX_BALL,
            });
        }
        Ok(())
    };

    // Forward: every path from ∗ is one group element.
    let init = coding.initial();
    let mut stack: Vec<(usize, Vec<Symbol>, Vec<bool>)> = vec![(init, Vec::new(), vec![true; m])];
    while let Some((v, w, allowed)) = stack.pop() {
        for (sym, t) in coding.out(v) {
            let mut w2 = w.clone();
            w2.push(sym);
            let n = w2.len();
            charge(1)?;
            let term = (-s * metric.dist_geodesic(&w2)?).exp();
            let allowed2: Vec<bool> = (0..m).map(|j| allowed[j] && !blocked[j][t]).collect();
            let row = &mut rows[n - 1];
            row.direct += term;
            for j in 0..m {
                if allowed2[j] {
                    row.direct_restricted[j] += term;
                }
            }
            if n < n_max {
                stack.push((t, w2, allowed2));
            }
        }
    }

    // Backward: preimages of 0̇ under σ^{n+1} that start at ∗.
    let aug = if coding.is_augmented() {
        coding.clone()
    } else {
        coding.augment()
    };
    let zero = aug.zero().expect("augmented");
    let mut preds: Vec<Vec<(usize, Option<Symbol>)>> = vec![Vec::new(); aug.num_vertices()];
    for e in aug.edges() {
        if !(e.from == zero && e.to == zero) {
            preds[e.to].push((e.from, e.label));
        }
    }
    for j in 0..m {
        // (front vertex, labels of ev(y) reversed, S Ψ so far)
        let mut stack: Vec<(usize, Vec<Symbol>, f64, f64, usize)> =
            vec![(zero, Vec::new(), 0.0, 0.0, 0)];
        let mut word = Vec::new();
        while let Some((v, rev, sum, d_prev, depth)) = stack.pop() {
            if depth == n_max + 1 {
                continue;
            }
            for &(u, label) in &preds[v] {
                if blocked[j][u] {
                    continue;
                }
                charge(1)?;
                let mut rev2 = rev.clone();
                if let Some(l) = label {
                    rev2.push(l);
                }
                word.clear();
                word.extend(rev2.iter().rev());
                let d = metric.dist_geodesic(&word)?;
                let sum2 = sum + (d - d_prev);
                if u == init {
                    let n = depth;
                    if n >= 1 {
                        rows[n - 1].operator[j] += (-s * sum2).exp();
                    }
                } else {
                    stack.push((u, rev2, sum2, d, depth + 1));
                }
            }
        }
    }

    let mut max_rel = 0.0f64;
    let mut partial = Vec::with_capacity(n_max);
    let mut acc = Complex64::new(0.0, 0.0);
    for row in rows.iter_mut() {
        row.beta = row.direct - row.direct_restricted.iter().sum::<Complex64>();
        for j in 0..m {
            let a = row.direct_restricted[j];
            let b = row.operator[j];
            let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
            max_rel = max_rel.max((a - b).norm() / scale);
        }
        acc += row.direct;
        partial.push(acc);
    }
    let half: Vec<f64> = rows[n_max / 2..].iter().map(|r| r.direct.norm()).collect();
    let spread = half.iter().cloned().fold(0.0, f64::max)
        / half.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = if n_max >= 2 {
        rows[n_max - 1].direct.norm() / rows[n_max - 2].direct.norm()
    } else {
        f64::NAN
    };
    Ok(PoincareReport {
        s,
        components: ids,
        rows,
        max_relative_discrepancy: max_rel,
        partial_sums: partial,
        sphere_sum_spread: spread,
        sphere_sum_ratio: ratio,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationStatus {
    Ok,
    Underpowered,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub log_c: f64,
    pub residual_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub eps: f64,
    pub t_cov: f64,
    /// (d(o,x), d∗(o,x)) over B_S(n_max), sorted by d.
    #[serde(skip)]
    pub pairs: Vec<(f64, f64)>,
    /// (T, M(T), N(T)) on the fit grid, with N(T) = #{d ≤ T}.
    pub counts: Vec<(f64, usize, usize)>,
    /// log M = log C + αT.
    pub plain: Option<ExponentFit>,
    /// log M = log C + αT − ½ log T.
    pub sqrt_corrected: Option<ExponentFit>,
    pub sqrt_better: bool,
    pub degenerate: bool,
    pub status: CorrelationStatus,
}

impl CorrelationReport {
    /// M(T) = #{d ≤ T, |d∗ − d| ≤ ε'} for any ε'.
    pub fn m(&self, t: f64, eps: f64) -> usize {
        let end = self.pairs.partition_point(|p| p.0 <= t);
        self.pairs[..end]
            .iter()
            .filter(|p| (p.1 - p.0).abs() <= eps)
            .count()
    }

    pub fn n(&self, t: f64) -> usize {
        self.pairs.partition_point(|p| p.0 <= t)
    }
}

/// Joint counts of two metrics over B_S(n_max). The fit uses T in
/// [t_cov/3, t_cov], at the distinct values of d when d takes few values
/// there, otherwise on an even grid.
pub fn correlate(d: &Metric, dstar: &Metric, eps: f64, n_max: usize) -> Result<CorrelationReport> {
    if !(eps > 0.0) {
        return input("ε must be positive");
    }
    if !same_group(d, dstar) {
        return input("both metrics must live on the same group");
    }
    let size = ball_size(d, n_max)?;
    let mut pairs = Vec::with_capacity(size);
    let mut t_cov = f64::INFINITY;
    visit_ball(d, n_max, |n, w| {
        let a = d.dist_geodesic(w)?;
        if n == n_max {
            t_cov = t_cov.min(a);
        }
        pairs.push((a, dstar.dist_geodesic(w)?));
        Ok(())
    })?;
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let lo = t_cov / 3.0;
    let mut distinct: Vec<f64> = Vec::new();
    for p in pairs.iter().filter(|p| p.0 >= lo && p.0 <= t_cov) {
        if distinct
            .last()
            .map_or(true, |&x| p.0 - x > 1e-9 * p.0.abs().max(1.0))
        {
            distinct.push(p.0);
            if distinct.len() > 200 {
                break;
            }
        }
    }
    let ts = if distinct.len() <= 200 {
        distinct
    } else {
        grid(lo, t_cov, FIT_POINTS)
    };
    let mut report = CorrelationReport {
        eps,
        t_cov,
        pairs,
        counts: Vec::new(),
        plain: None,
        sqrt_corrected: None,
        sqrt_better: false,
        degenerate: false,
        status: CorrelationStatus::Underpowered,
    };
    // Each T rounded up to include ties at lattice points.
    report.counts = ts
        .iter()
        .map(|&t| {
            (
                t,
                report.m(t * (1.0 + 1e-12), eps),
                report.n(t * (1.0 + 1e-12)),
            )
        })
        .collect();
    report.degenerate = report.pairs.iter().all(|p| (p.1 - p.0).abs() <= eps);
    let usable: Vec<(f64, f64)> = report
        .counts
        .iter()
        .filter(|c| c.1 > 0 && c.0 > 0.0)
        .map(|c| (c.0, c.1 as f64))
        .collect();
    if usable.len() < 4 || usable[0].1 < 10.0 {
        log::warn!(
            "correlation range underpowered: {} usable points",
            usable.len()
        );
        return Ok(report);
    }
    let xs: Vec<f64> = usable.iter().map(|u| u.0).collect();
    let plain_y: Vec<f64> = usable.iter().map(|u| u.1.ln()).collect();
    let sqrt_y: Vec<f64> = usable.iter().map(|u| u.1.ln() + 0.5 * u.0.ln()).collect();
    let (a1, b1, r1) = line_fit(&xs, &plain_y);
    let (a2, b2, r2) = line_fit(&xs, &sqrt_y);
    report.plain = Some(ExponentFit {
        exponent: b1,
        log_c: a1,
        residual_norm: r1,
    });
    report.sqrt_corrected = Some(ExponentFit {
        exponent: b2,
        log_c: a2,
        residual_norm: r2,
    });
    report.sqrt_better = r2 < r1;
    report.status = CorrelationStatus::Ok;
    Ok(report)
}

fn same_group(a: &Metric, b: &Metric) -> bool {
    std::sync::Arc::ptr_eq(a.group(), b.group())
        || a.group().presentation().describe() == b.group().presentation().describe()
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanRatioReport {
    /// Per radius n: (median of d_α/|x|, fraction outside Λ ± ε').
    pub per_radius: Vec<(usize, f64, f64)>,
    pub lambda: f64,
    /// Fitted exponential decay rate of the tail fraction; None when the
    /// tail is identically zero.
    pub decay_rate: Option<f64>,
    pub non_decaying: bool,
}

/// Distribution of d_α(o,x)/|x|_S with d_α = a·d + b·d∗ over spheres 1..=n_max.
pub fn mean_ratio_diagnostic(
    d: &Metric,
    dstar: &Metric,
    a: f64,
    b: f64,
    eps: f64,
    n_max: usize,
) -> Result<MeanRatioReport> {
    if n_max < 2 {
        return input("need at least two radii");
    }
    ball_size(d, n_max)?;
    let mut spheres: Vec<Vec<f64>> = vec![Vec::new(); n_max + 1];
    visit_ball(d, n_max, |n, w| {
        if n > 0 {
            spheres[n].push((a * d.dist_geodesic(w)? + b * dstar.dist_geodesic(w)?) / n as f64);
        }
        Ok(())
    })?;
    let medians: Vec<f64> = spheres[1..]
        .iter_mut()
        .map(|v| {
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        })
        .collect();
    let lambda = *medians.last().unwrap();
    let mut per_radius = Vec::new();
    for (i, v) in spheres[1..].iter().enumerate() {
        let out = v.iter().filter(|r| (*r - lambda).abs() > eps).count() as f64 / v.len() as f64;
        per_radius.push((i + 1, medians[i], out));
    }
    let tail: Vec<(f64, f64)> = per_radius
        .iter()
        .filter(|p| p.2 > 0.0 && p.0 > n_max / 2)
        .map(|p| (p.0 as f64, p.2.ln()))
        .collect();
    let decay_rate = if tail.len() >= 3 {
        Some(
            -line_fit(
                &tail.iter().map(|t| t.0).collect::<Vec<_>>(),
                &tail.iter().map(|t| t.1).collect::<Vec<_>>(),
            )
            .1,
        )
    } else {
        None
    };
    let last = per_radius.last().unwrap().2;
    let first_half = per_radius[n_max / 2 - 1].2;
    Ok(MeanRatioReport {
        per_radius,
        lambda,
        decay_rate,
        non_decaying: last > 0.0 && last >= first_half && decay_rate.map_or(true, |r| r <= 0.0),
    })
}
