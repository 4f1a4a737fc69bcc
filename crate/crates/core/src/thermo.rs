//! Depth-k cylinder potentials, transfer operators, pressure and the
//! quantities derived from it.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::automaton::GeodesicAutomaton;
use crate::error::{input, Error, Result};
use crate::group::Symbol;
use crate::linalg::{perron, spectral_radius, Perron, Sparse};
use crate::metric::Metric;
use crate::mobius::busemann_gain;
use crate::shift::{
    arithmeticity, component_growth, periodic_orbits, reachable, word_maximal_components,
    ArithmeticityOptions, ArithmeticityReport, Component, Decomposition, PeriodicOrbit, Verdict,
};

/// Cap on the number of cylinder states of an explicit shift.
pub const MAX_CYLINDERS: usize = 1_500_000;
const PERRON_TOL: f64 = 1e-14;

/// Subshift on (k+1)-vertex windows of a component: window x_0…x_k is
/// followed by x_1…x_{k+1}.
#[derive(Clone, Debug)]
pub struct CylinderShift {
    pub depth: usize,
    pub states: Vec<Vec<u32>>,
    pub succ: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
}

fn comp_out(aut: &GeodesicAutomaton, comp: &Component, v: usize) -> Vec<usize> {
    aut.out(v)
        .map(|(_, t)| t)
        .filter(|&t| comp.contains(t))
        .collect()
}

impl CylinderShift {
    pub fn new(aut: &GeodesicAutomaton, comp: &Component, depth: usize) -> Result<Self> {
        if depth < 1 {
            return input("cylinder depth must be at least 1");
        }
        if !comp.nontrivial || comp.is_zero {
            return input("cylinder shifts live on nontrivial coding components");
        }
        let mut states: Vec<Vec<u32>> = comp.vertices.iter().map(|&v| vec![v as u32]).collect();
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &states {
                for t in comp_out(aut, comp, *w.last().unwrap() as usize) {
                    let mut w2 = w.clone();
                    w2.push(t as u32);
                    next.push(w2);
                }
            }
            if next.len() > MAX_CYLINDERS {
                return Err(Error::ResourceCap {
                    what: "cylinder states",
                    requested: next.len(),
                    cap: MAX_CYLINDERS,
                });
            }
            states = next;
        }
        let index: HashMap<Vec<u32>, u32> = states
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let succ = states
            .iter()
            .map(|w| {
                comp_out(aut, comp, *w.last().unwrap() as usize)
                    .into_iter()
                    .map(|t| {
                        let mut w2 = w[1..].to_vec();
                        w2.push(t as u32);
                        index[&w2]
                    })
                    .collect()
            })
            .collect();
        Ok(CylinderShift {
            depth,
            states,
            succ,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, window: &[usize]) -> Option<usize> {
        let key: Vec<u32> = window.iter().map(|&v| v as u32).collect();
        self.index.get(&key).map(|&i| i as usize)
    }

    /// A[i][j] = e^{φ(i)} whenever i is followed by j.
    pub fn transfer(&self, phi: &[f64]) -> Sparse<f64> {
        Sparse {
            rows: self
                .succ
                .iter()
                .zip(phi)
                .map(|(s, &p)| s.iter().map(|&j| (j, p.exp())).collect())
                .collect(),
        }
    }

    /// A[i][j] = e^{−s·ψ(i)} for complex s.
    pub fn complex_transfer(&self, psi: &[f64], s: Complex64) -> Sparse<Complex64> {
        Sparse {
            rows: self
                .succ
                .iter()
                .zip(psi)
                .map(|(r, &p)| r.iter().map(|&j| (j, (-s * p).exp())).collect())
                .collect(),
        }
    }
}

/// Evaluates Ψ on (k+1)-vertex windows of a component, memoized.
///
/// Word-multiple metrics give the constant c on every edge. The Fuchsian
/// metric uses the exact Busemann increment toward the boundary point of
/// the canonical continuation (smallest-label edge staying in the
/// component, eventually periodic). Other metrics use the finite difference
/// d(o, ev_k(x)) − d(o, ev_{k−1}(σx)).
pub struct PotentialEvaluator<'a> {
    aut: &'a GeodesicAutomaton,
    metric: &'a Metric,
    greedy: HashMap<usize, (Symbol, usize)>,
    cache: HashMap<Vec<usize>, f64>,
}

impl<'a> PotentialEvaluator<'a> {
    pub fn new(aut: &'a GeodesicAutomaton, comp: &Component, metric: &'a Metric) -> Self {
        let greedy = comp
            .vertices
            .iter()
            .filter_map(|&v| aut.out(v).find(|&(_, t)| comp.contains(t)).map(|e| (v, e)))
            .collect();
        PotentialEvaluator {
            aut,
            metric,
            greedy,
            cache: HashMap::new(),
        }
    }

    fn labels(&self, window: &[usize]) -> Vec<Symbol> {
        window
            .windows(2)
            .map(|p| {
                self.aut
                    .edge_label(p[0], p[1])
                    .flatten()
                    .expect("labelled edge")
            })
            .collect()
    }

    /// Labels of the canonical continuation from v: (preperiod, cycle).
    fn continuation(&self, v: usize) -> (Vec<Symbol>, Vec<Symbol>) {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut u = v;
        loop {
            if let Some(&at) = seen.get(&u) {
                let cycle = labels[at..].to_vec();
                labels.truncate(at);
                return (labels, cycle);
            }
            seen.insert(u, labels.len());
            let (s, t) = self.greedy[&u];
            labels.push(s);
            u = t;
        }
    }

    pub fn value(&mut self, window: &[usize]) -> Result<f64> {
        if let Some(&v) = self.cache.get(window) {
            return Ok(v);
        }
        let labels = self.labels(window);
        let v = if let Some(c) = self.metric.word_multiple() {
            c
        } else if self.metric.is_fuchsian() {
            let (pre, cycle) = self.continuation(*window.last().unwrap());
            let mut head = labels[1..].to_vec();
            head.extend(pre);
            let (mh, _) = self.metric.matrix_of(&head);
            let (mc, _) = self.metric.matrix_of(&cycle);
            let xi = mh.apply_boundary(mc.attracting_fixed_point());
            let s0 = self.metric.symbol_matrix(labels[0]).inverse();
            -busemann_gain(&s0, xi) * self.metric.scale()
        } else {
            self.metric.dist_geodesic(&labels)? - self.metric.dist_geodesic(&labels[1..])?
        };
        self.cache.insert(window.to_vec(), v);
        Ok(v)
    }

    /// S_lΨ along a periodic orbit, windows read cyclically. For the
    /// Fuchsian metric each increment is taken toward the orbit's own
    /// boundary point, so the sum is the exact translation length.
    pub fn birkhoff(&mut self, orbit: &PeriodicOrbit, depth: usize) -> Result<f64> {
        if self.metric.is_fuchsian() {
            let l = orbit.word.len();
            let mut total = 0.0;
            for i in 0..l {
                let rot: Vec<Symbol> = (1..=l).map(|j| orbit.word[(i + j) % l]).collect();
                let (m, _) = self.metric.matrix_of(&rot);
                let s0 = self.metric.symbol_matrix(orbit.word[i]).inverse();
                total -= busemann_gain(&s0, m.attracting_fixed_point());
            }
            return Ok(total * self.metric.scale());
        }
        (0..orbit.len())
            .map(|i| self.value(&orbit.window(i, depth)))
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct CylinderPotential {
    pub shift: CylinderShift,
    pub values: Vec<f64>,
    /// max over sampled depth-(k+1) cylinders of |Ψ^{(k+1)} − Ψ^{(k)}|.
    pub epsilon: f64,
    /// Ψ summed over the k windows that finish a state along the canonical
    /// continuation; a cylinder of n states spans n + k vertices.
    pub tail: Vec<f64>,
    pub tag: String,
}

const EPSILON_SAMPLES: usize = 2048;

impl CylinderPotential {
    pub fn depth(&self) -> usize {
        self.shift.depth
    }

    pub fn is_constant(&self) -> bool {
        let v0 = self.values[0];
        self.values.iter().all(|&v| v == v0)
    }

    /// Same potential multiplied by k.
    pub fn scaled(&self, k: f64) -> CylinderPotential {
        CylinderPotential {
            shift: self.shift.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
            epsilon: self.epsilon * k.abs(),
            tail: self.tail.iter().map(|v| v * k).collect(),
            tag: format!("{k}*{}", self.tag),
        }
    }
}

pub fn cylinder_potential(
    aut: &GeodesicAutomaton,
    comp: &Component,
    metric: &Metric,
    depth: usize,
) -> Result<CylinderPotential> {
    let shift = CylinderShift::new(aut, comp, depth)?;
    let mut ev = PotentialEvaluator::new(aut, comp, metric);
    let values = shift
        .states
        .iter()
        .map(|w| ev.value(&w.iter().map(|&v| v as usize).collect::<Vec<_>>()))
        .collect::<Result<Vec<f64>>>()?;
    // Depth-(k+1) windows, evenly thinned to the sample budget.
    let mut longer = Vec::new();
    for w in &shift.states {
        for t in comp_out(aut, comp, *w.last().unwrap() as usize) {
            let mut w2: Vec<usize> = w.iter().map(|&v| v as usize).collect();
            w2.push(t);
            longer.push(w2);
        }
    }
    let step = (longer.len() / EPSILON_SAMPLES).max(1);
    let mut epsilon = 0.0f64;
    for w in longer.iter().step_by(step) {
        let a = ev.value(w)?;
        let b = values[shift.index_of(&w[..=depth]).expect("prefix is a state")];
        epsilon = epsilon.max((a - b).abs());
    }
    let mut tail = Vec::with_capacity(shift.len());
    for w in &shift.states {
        let mut path: Vec<usize> = w.iter().map(|&v| v as usize).collect();
        for _ in 0..depth {
            let (_, t) = ev.greedy[path.last().unwrap()];
            path.push(t);
        }
        let mut acc = 0.0;
        for j in 1..=depth {
            acc += ev.value(&path[j..=j + depth])?;
        }
        tail.push(acc);
    }
    Ok(CylinderPotential {
        shift,
        values,
        epsilon,
        tail,
        tag: metric.tag(),
    })
}

/// P(φ) = log ρ of the transfer matrix.
pub fn pressure_of(shift: &CylinderShift, phi: &[f64]) -> Result<f64> {
    Ok(perron(&shift.transfer(phi), PERRON_TOL)?.value.ln())
}

/// P(−sΨ).
pub fn pressure(pot: &CylinderPotential, s: f64) -> Result<f64> {
    let phi: Vec<f64> = pot.values.iter().map(|v| -s * v).collect();
    pressure_of(&pot.shift, &phi)
}

/// (1/n)·log Σ_{σⁿx = x} e^{−s·SₙΨ(x)} = (1/n)·log tr(Aⁿ).
pub fn periodic_pressure(pot: &CylinderPotential, s: f64, n: usize) -> f64 {
    let a = pot
        .shift
        .transfer(&pot.values.iter().map(|v| -s * v).collect::<Vec<_>>());
    let dim = a.dim();
    // Column by column, rescaling to avoid overflow.
    let mut x = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    let mut total_log = f64::NEG_INFINITY;
    for i in 0..dim {
        x.iter_mut().for_each(|v| *v = 0.0);
        x[i] = 1.0;
        let mut ls = 0.0;
        for _ in 0..n {
            a.mul_vec(&x, &mut y);
            let m = y.iter().cloned().fold(0.0, f64::max);
            if m == 0.0 {
                break;
            }
            y.iter_mut().for_each(|v| *v /= m);
            ls += m.ln();
            std::mem::swap(&mut x, &mut y);
        }
        if x[i] > 0.0 {
            let term = x[i].ln() + ls;
            total_log = log_add(total_log, term);
        }
    }
    total_log / n as f64
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Root of a decreasing function: expand a bracket, bisect to `width`,
/// then polish with secant steps.
fn decreasing_root(f: impl Fn(f64) -> Result<f64>, start: f64, width: f64) -> Result<f64> {
    let (mut lo, mut hi) = (start, start + 1.0);
    let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
    let mut k = 0;
    while flo < 0.0 {
        hi = lo;
        fhi = flo;
        lo -= 2f64.powi(k);
        flo = f(lo)?;
        k += 1;
        if k > 60 {
            return Err(Error::Numeric("no sign change below the bracket".into()));
        }
    }
    k = 0;
    while fhi > 0.0 {
        lo = hi;
        flo = fhi;
        hi += 2f64.powi(k);
        fhi = f(hi)?;
        k += 1;
        if k > 60 {
            return Err(Error::Numeric("no sign change above the bracket".into()));
        }
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm > 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    let (mut a, mut fa, mut b, mut fb) = (lo, flo, hi, fhi);
    for _ in 0..6 {
        if fb == fa {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        if !c.is_finite() || c < lo - width || c > hi + width {
            break;
        }
        let fc = f(c)?;
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        if fc.abs() < 1e-15 {
            break;
        }
    }
    Ok(if fb.abs() <= fa.abs().min(flo.abs()).min(fhi.abs()) {
        b
    } else if flo.abs() < fhi.abs() {
        lo
    } else {
        hi
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRate {
    pub v: f64,
    /// P(−vΨ) at the returned root.
    pub residual: f64,
    /// Smallest average of Ψ over the periodic orbits checked for positivity.
    pub min_orbit_average: f64,
}

/// v with P(−vΨ) = 0 on the component.
pub fn growth_rate(
    aut: &GeodesicAutomaton,
    comp: &Component,
    pot: &CylinderPotential,
) -> Result<GrowthRate> {
    let orbits = periodic_orbits(aut, comp, 8, 400);
    let mut min_avg = f64::INFINITY;
    for o in &orbits {
        let sum: f64 = (0..o.len())
            .map(|i| {
                pot.values[pot
                    .shift
                    .index_of(&o.window(i, pot.depth()))
                    .expect("window")]
            })
            .sum();
        min_avg = min_avg.min(sum / o.len() as f64);
    }
    if !(min_avg > 0.0) {
        return Err(Error::Numeric(format!(
            "potential {} is not cohomologous to a positive function: orbit average {min_avg}",
            pot.tag
        )));
    }
    let v = decreasing_root(|s| pressure(pot, s), 0.0, 1e-8)?;
    Ok(GrowthRate {
        v,
        residual: pressure(pot, v)?,
        min_orbit_average: min_avg,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GibbsReport {
    pub s: f64,
    pub eigenvalue: f64,
    pub pressure: f64,
    /// Per cylinder length n = 1..=depth_test: (min ratio, max ratio, total mass).
    pub by_length: Vec<(f64, f64, f64)>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// ratio_max / ratio_min.
    pub spread: f64,
    pub eigen_residual: f64,
    #[serde(skip)]
    pub perron: Option<Perron>,
}

/// Perron data for e^{−sΨ} and the ratios μ[i_0…i_{n−1}] / e^{−nP + S_n(−sΨ)}
/// over every cylinder of n ≤ `depth_test` states.
pub fn gibbs_data(pot: &CylinderPotential, s: f64, depth_test: usize) -> Result<GibbsReport> {
    let phi: Vec<f64> = pot.values.iter().map(|v| -s * v).collect();
    let a = pot.shift.transfer(&phi);
    let p = perron(&a, PERRON_TOL)?;
    let lam = p.value;
    let pr = lam.ln();
    let mut y = vec![0.0; a.dim()];
    a.mul_vec(&p.right, &mut y);
    let eigen_residual = y
        .iter()
        .zip(&p.right)
        .map(|(y, r)| (y - lam * r).abs())
        .fold(0.0, f64::max);
    if eigen_residual > 1e-8 * lam {
        return Err(Error::Numeric(format!(
            "Perron residual {eigen_residual:.3e}"
        )));
    }
    let mut by_length = Vec::new();
    let (mut gmin, mut gmax) = (f64::INFINITY, 0.0f64);
    // Cylinders as (last state, log of ℓ_{i0}·Π A, S_nφ).
    let mut frontier: Vec<(u32, f64, f64)> = (0..a.dim())
        .map(|i| (i as u32, p.left[i].ln(), phi[i]))
        .collect();
    for n in 1..=depth_test {
        let (mut lo, mut hi, mut mass) = (f64::INFINITY, 0.0f64, 0.0);
        for &(last, log_w, sn) in &frontier {
            let log_mu = log_w + p.right[last as usize].ln() - (n as f64 - 1.0) * pr;
            let mu = log_mu.exp();
            mass += mu;
            let span = (n + pot.depth()) as f64;
            let ratio = (log_mu - (-span * pr + sn - s * pot.tail[last as usize])).exp();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        by_length.push((lo, hi, mass));
        gmin = gmin.min(lo);
        gmax = gmax.max(hi);
        if n == depth_test {
            break;
        }
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for &(last, log_w, sn) in &frontier {
            for &j in &pot.shift.succ[last as usize] {
                next.push((j, log_w + phi[last as usize], sn + phi[j as usize]));
            }
        }
        if next.len() > 20_000_000 {
            return Err(Error::ResourceCap {
                what: "Gibbs cylinders",
                requested: next.len(),
                cap: 20_000_000,
            });
        }
        frontier = next;
    }
    Ok(GibbsReport {
        s,
        eigenvalue: lam,
        pressure: pr,
        by_length,
        ratio_min: gmin,
        ratio_max: gmax,
        spread: gmax / gmin,
        eigen_residual,
        perron: Some(p),
    })
}

/// θ_{d/S}(t) = P(−tΨ_d).
pub fn manhattan(pot: &CylinderPotential, t: f64) -> Result<f64> {
    pressure(pot, t)
}

fn check_same_shift(a: &CylinderPotential, b: &CylinderPotential) -> Result<()> {
    if a.shift.states != b.shift.states {
        return input("potentials must live on the same cylinder shift");
    }
    Ok(())
}

fn pair_phi(pd: &CylinderPotential, ps: &CylinderPotential, s: f64, t: f64) -> Vec<f64> {
    pd.values
        .iter()
        .zip(&ps.values)
        .map(|(a, b)| -s * a - t * b)
        .collect()
}

/// θ_{d∗/d}(t): the s with P(−sΨ_d − tΨ_{d∗}) = 0.
pub fn manhattan_pair(pd: &CylinderPotential, ps: &CylinderPotential, t: f64) -> Result<f64> {
    check_same_shift(pd, ps)?;
    decreasing_root(
        |s| pressure_of(&pd.shift, &pair_phi(pd, ps, s, t)),
        0.0,
        1e-13,
    )
}

/// θ′(t) = −∫Ψ_{d∗}dμ / ∫Ψ_d dμ for the equilibrium state μ of
/// −θ(t)Ψ_d − tΨ_{d∗}.
pub fn manhattan_pair_slope(
    pd: &CylinderPotential,
    ps: &CylinderPotential,
    t: f64,
) -> Result<(f64, f64)> {
    let theta = manhattan_pair(pd, ps, t)?;
    let p = perron(&pd.shift.transfer(&pair_phi(pd, ps, theta, t)), PERRON_TOL)?;
    let (mut md, mut ms) = (0.0, 0.0);
    for i in 0..p.right.len() {
        let w = p.left[i] * p.right[i];
        md += w * pd.values[i];
        ms += w * ps.values[i];
    }
    Ok((theta, -ms / md))
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationExponent {
    pub xi: f64,
    pub theta_xi: f64,
    pub alpha: f64,
    /// θ is affine: the metrics are dependent and α = 1.
    pub degenerate: bool,
    /// Five-point finite-difference θ′(ξ), step 1e−4.
    pub slope_fd: f64,
    pub theta_at_0: f64,
    pub theta_at_1: f64,
}

/// ξ with θ′_{d∗/d}(ξ) = −1 and α = ξ + θ(ξ), for potentials of two
/// metrics both normalized to growth rate 1.
pub fn correlation_exponent(
    pd: &CylinderPotential,
    ps: &CylinderPotential,
) -> Result<CorrelationExponent> {
    check_same_shift(pd, ps)?;
    let (theta0, slope0) = manhattan_pair_slope(pd, ps, 0.0)?;
    let (theta1, slope1) = manhattan_pair_slope(pd, ps, 1.0)?;
    if (slope0 + 1.0).abs() < 1e-9 && (slope1 + 1.0).abs() < 1e-9 {
        return Ok(CorrelationExponent {
            xi: 0.0,
            theta_xi: theta0,
            alpha: 1.0,
            degenerate: true,
            slope_fd: -1.0,
            theta_at_0: theta0,
            theta_at_1: theta1,
        });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let g = |t: f64| -> Result<f64> { Ok(manhattan_pair_slope(pd, ps, t)?.1 + 1.0) };
    let mut k = 0;
    while g(lo)? > 0.0 {
        lo -= 1.0;
        k += 1;
        if k > 20 {
            return Err(Error::Numeric(
                "θ′ never reaches −1: inputs not normalized?".into(),
            ));
        }
    }
    while g(hi)? < 0.0 {
        hi += 1.0;
        k += 1;
        if k > 40 {
            return Err(Error::Numeric(
                "θ′ never reaches −1: inputs not normalized?".into(),
            ));
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi = 0.5 * (lo + hi);
    let theta_xi = manhattan_pair(pd, ps, xi)?;
    let h = 1e-4;
    let th = |t: f64| manhattan_pair(pd, ps, t);
    let slope_fd = (th(xi - 2.0 * h)? - 8.0 * th(xi - h)? + 8.0 * th(xi + h)? - th(xi + 2.0 * h)?)
        / (12.0 * h);
    Ok(CorrelationExponent {
        xi,
        theta_xi,
        alpha: xi + theta_xi,
        degenerate: false,
        slope_fd,
        theta_at_0: theta0,
        theta_at_1: theta1,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub t: f64,
    pub rho: f64,
    pub gap: f64,
    pub converged: bool,
}

/// ρ(L_{v+it}) over the grid.
pub fn spectral_scan(pot: &CylinderPotential, v: f64, t_grid: &[f64]) -> Vec<ScanPoint> {
    t_grid
        .iter()
        .map(|&t| {
            let a = pot
                .shift
                .complex_transfer(&pot.values, Complex64::new(v, t));
            let r = spectral_radius(&a, 1e-12);
            ScanPoint {
                t,
                rho: r.rho,
                gap: 1.0 - r.rho,
                converged: r.converged,
            }
        })
        .collect()
}

/// Birkhoff sums of Ψ over primitive periodic orbits of length ≤ `l_max`.
pub fn orbit_sums(
    aut: &GeodesicAutomaton,
    comp: &Component,
    metric: &Metric,
    depth: usize,
    l_max: usize,
    cap: usize,
) -> Result<Vec<(PeriodicOrbit, f64)>> {
    let mut ev = PotentialEvaluator::new(aut, comp, metric);
    periodic_orbits(aut, comp, l_max, cap)
        .into_iter()
        .map(|o| {
            let s = ev.birkhoff(&o, depth)?;
            Ok((o, s))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MixingVerdict {
    WeakMixing,
    NotWeakMixing { lattice: f64 },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub verdict: MixingVerdict,
    pub roof_power: usize,
    pub arithmeticity: ArithmeticityReport,
}

/// Suspension with roof S_NΨ: the roof's sums over periodic orbits are the
/// orbit sums of Ψ, so the verdict follows their arithmeticity.
pub fn mixing_check(
    aut: &GeodesicAutomaton,
    comp: &Component,
    metric: &Metric,
    depth: usize,
    roof_power: usize,
    l_max: usize,
    opts: ArithmeticityOptions,
) -> Result<MixingReport> {
    let sums: Vec<f64> = orbit_sums(aut, comp, metric, depth, l_max, 2000)?
        .into_iter()
        .map(|x| x.1)
        .collect();
    let rep = arithmeticity(&sums, opts);
    let verdict = match &rep.verdict {
        Verdict::Lattice { gap } => MixingVerdict::NotWeakMixing { lattice: *gap },
        Verdict::NonArithmetic { .. } => MixingVerdict::WeakMixing,
        Verdict::Inconclusive { reason } => MixingVerdict::Inconclusive {
            reason: reason.clone(),
        },
    };
    Ok(MixingReport {
        verdict,
        roof_power,
        arithmeticity: rep,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalityReport {
    pub word_maximal: Vec<usize>,
    pub pressure_maximal: Vec<usize>,
    /// (component, word growth, P_C(−v_dΨ_d)).
    pub per_component: Vec<(usize, f64, f64)>,
    pub agree: bool,
    /// Pairs of distinct word-maximal components joined by a path.
    pub connected_pairs: Vec<(usize, usize)>,
}

pub const PRESSURE_TIE: f64 = 2e-6;

/// Compares word-maximal components with the components maximizing
/// P_C(−v_dΨ_d), and checks that maximal components are mutually
/// unreachable.
pub fn cross_check_maximal(
    aut: &GeodesicAutomaton,
    dec: &Decomposition,
    metric: &Metric,
    v_d: f64,
    depth: usize,
) -> Result<MaximalityReport> {
    let word_maximal = word_maximal_components(aut, dec)?;
    let mut per_component = Vec::new();
    for c in dec.coding_components() {
        let pot = cylinder_potential(aut, c, metric, depth)?;
        per_component.push((c.id, component_growth(aut, c)?, pressure(&pot, v_d)?));
    }
    let pressures: Vec<(usize, f64)> = per_component.iter().map(|x| (x.0, x.2)).collect();
    let best = pressures
        .iter()
        .map(|x| x.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let pressure_maximal: Vec<usize> = pressures
        .iter()
        .filter(|x| x.1 >= best - PRESSURE_TIE)
        .map(|x| x.0)
        .collect();
    let mut connected_pairs = Vec::new();
    for &a in &word_maximal {
        for &b in &word_maximal {
            if a != b && reachable(aut, dec, a, b) {
                connected_pairs.push((a, b));
            }
        }
    }
    Ok(MaximalityReport {
        agree: word_maximal == pressure_maximal,
        word_maximal,
        pressure_maximal,
        per_component,
        connected_pairs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthChoice {
    pub depth: usize,
    /// (depth, growth rate, ε_k).
    pub history: Vec<(usize, f64, f64)>,
    pub converged: bool,
}

/// Smallest depth in [k_min, k_max] whose growth rate moves less than
/// `tol` at the next depth.
pub fn choose_depth(
    aut: &GeodesicAutomaton,
    comp: &Component,
    metric: &Metric,
    k_min: usize,
    k_max: usize,
    tol: f64,
) -> Result<DepthChoice> {
    let mut history = Vec::new();
    let mut prev: Option<f64> = None;
    for k in k_min..=k_max {
        let pot = match cylinder_potential(aut, comp, metric, k) {
            Ok(p) => p,
            Err(Error::ResourceCap { .. }) => break,
            Err(e) => return Err(e),
        };
        let v = growth_rate(aut, comp, &pot)?.v;
        history.push((k, v, pot.epsilon));
        if let Some(p) = prev {
            if (v - p).abs() < tol {
                return Ok(DepthChoice {
                    depth: k - 1,
                    history,
                    converged: true,
                });
            }
        }
        prev = Some(v);
    }
    let depth = history.last().map(|h| h.0).unwrap_or(k_min);
    Ok(DepthChoice {
        depth,
        history,
        converged: false,
    })
}

/// Largest deviation |S_nΨ − d(o, ev_n)| over paths of length n inside the
/// component that start with the given vertices.
pub fn telescoping_defect(
    aut: &GeodesicAutomaton,
    comp: &Component,
    metric: &Metric,
    depth: usize,
    prefix: &[usize],
    n: usize,
) -> Result<f64> {
    if prefix.is_empty() || !prefix.iter().all(|&v| comp.contains(v)) {
        return input("prefix must lie in the component");
    }
    let mut ev = PotentialEvaluator::new(aut, comp, metric);
    let mut path = prefix.to_vec();
    while path.len() < n + depth + 1 {
        let last = *path.last().unwrap();
        let (_, t) = ev.greedy[&last];
        path.push(t);
    }
    let mut s = 0.0;
    let mut worst = 0.0f64;
    let labels: Vec<Symbol> = path
        .windows(2)
        .map(|p| aut.edge_label(p[0], p[1]).flatten().unwrap())
        .collect();
    for i in 0..n {
        s += ev.value(&path[i..=i + depth])?;
        let d = metric.dist_geodesic(&labels[..=i])?;
        worst = worst.max((s - d).abs());
    }
    Ok(worst)
}
