use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use orbitcount::automaton::{
    build_coding, build_shortlex_acceptor, validate_bijection, GeodesicAutomaton,
};
use orbitcount::counting::{
    correlate, count_ball, error_term_fit, fit_asymptotic, grid, mean_ratio_diagnostic,
    poincare_compare, CorrelationStatus,
};
use orbitcount::group::Group;
use orbitcount::metric::Metric;
use orbitcount::shift::{
    arithmeticity, scc_decompose, word_maximal_components, ArithmeticityOptions, Component,
    Decomposition, Verdict,
};
use orbitcount::thermo::{
    choose_depth, correlation_exponent, cross_check_maximal, cylinder_potential, growth_rate,
    manhattan, manhattan_pair, mixing_check, orbit_sums, spectral_scan, CylinderPotential,
};
use orbitcount::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{num, sha_hex, write_atomic, Sink, VERSION};

pub struct Ctx {
    pub cfg: RunConfig,
    pub hash: String,
    pub group: Arc<Group>,
    pub metrics: Vec<Metric>,
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> Result<Ctx> {
        let hash = sha_hex(&cfg.canonical());
        let group = Arc::new(cfg.group_spec().build()?);
        let metrics = cfg
            .metrics
            .iter()
            .map(|m| m.build(&group))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ctx {
            cfg,
            hash,
            group,
            metrics,
        })
    }

    pub fn sink(&self, command: &str) -> Sink {
        Sink::new(self.cfg.output_dir.clone(), self.hash.clone(), command)
    }

    fn metric(&self, i: usize) -> Result<&Metric> {
        self.metrics
            .get(i)
            .ok_or_else(|| Error::Input(format!("config needs at least {} metric(s)", i + 1)))
    }

    fn cache_path(&self) -> PathBuf {
        let key = json!({
            "group": self.cfg.group_spec(),
            "automaton": self.cfg.automaton,
            "version": VERSION,
        });
        let h = sha_hex(&key.to_string());
        self.cfg
            .output_dir
            .join("cache")
            .join(format!("automaton-{}.json", &h[..16]))
    }

    /// Coding from the cache, or built and cached.
    pub fn automaton(&self) -> Result<GeodesicAutomaton> {
        let path = self.cache_path();
        if let Ok(text) = std::fs::read_to_string(&path) {
            match GeodesicAutomaton::from_json(&text, &self.group) {
                Ok(a) => {
                    log::info!("automaton loaded from {}", path.display());
                    return Ok(a);
                }
                Err(e) => log::warn!("ignoring unreadable cache {}: {e}", path.display()),
            }
        }
        let p = &self.cfg.automaton;
        let a = match p.rcone {
            Some(r) => build_shortlex_acceptor(&self.group, r, p.validate_to)?,
            None => build_coding(&self.group, p.max_rcone, p.validate_to)?,
        };
        write_atomic(&path, a.to_json(&self.group).as_bytes())?;
        Ok(a)
    }

    fn potential(
        &self,
        aut: &GeodesicAutomaton,
        comp: &Component,
        metric: &Metric,
    ) -> Result<CylinderPotential> {
        let depth = match (self.cfg.thermo.depth, metric.word_multiple()) {
            (Some(k), _) => k,
            (None, Some(_)) => 1,
            (None, None) => {
                choose_depth(
                    aut,
                    comp,
                    metric,
                    2,
                    self.cfg.thermo.max_depth,
                    self.cfg.thermo.tol,
                )?
                .depth
            }
        };
        cylinder_potential(aut, comp, metric, depth)
    }
}

struct Structure {
    aut: GeodesicAutomaton,
    dec: Decomposition,
    maximal: Vec<usize>,
}

fn structure(ctx: &Ctx) -> Result<Structure> {
    let aut = ctx.automaton()?;
    let dec = scc_decompose(&aut);
    let maximal = word_maximal_components(&aut, &dec)?;
    Ok(Structure { aut, dec, maximal })
}

#[derive(Serialize)]
struct Growth {
    metric: String,
    component: usize,
    depth: usize,
    epsilon: f64,
    v: f64,
    residual: f64,
}

fn growth_all(
    ctx: &Ctx,
    s: &Structure,
    metric: &Metric,
) -> Result<(Vec<Growth>, CylinderPotential)> {
    let mut out = Vec::new();
    let mut first = None;
    for &id in &s.maximal {
        let comp = &s.dec.components[id];
        let pot = ctx.potential(&s.aut, comp, metric)?;
        let g = growth_rate(&s.aut, comp, &pot)?;
        out.push(Growth {
            metric: metric.tag(),
            component: id,
            depth: pot.depth(),
            epsilon: pot.epsilon,
            v: g.v,
            residual: g.residual,
        });
        if first.is_none() {
            first = Some(pot);
        }
    }
    Ok((out, first.expect("a coding has a maximal component")))
}

pub fn cmd_automaton(ctx: &Ctx) -> Result<Value> {
    let aut = ctx.automaton()?;
    let report = validate_bijection(&aut, &ctx.group, ctx.cfg.automaton.validate_to)?;
    let mut sink = ctx.sink("automaton");
    let doc: Value = serde_json::from_str(&aut.to_json(&ctx.group)).expect("automaton json");
    sink.json("automaton.json", &doc)?;
    sink.json("bijection_report.json", &report)?;
    let summary = json!({
        "states": aut.num_vertices(),
        "r_cone": aut.r_cone,
        "bijection_ok": report.ok,
        "cumulative": report.cumulative.to_string(),
    });
    if !report.ok {
        return Err(Error::Validation(
            report
                .first_failure
                .map(|f| f.describe())
                .unwrap_or_else(|| "bijection check failed".into()),
        ));
    }
    Ok(summary)
}

pub fn cmd_analyze(ctx: &Ctx) -> Result<Value> {
    let s = structure(ctx)?;
    let metric = ctx.metric(0)?;
    let (growth, pot) = growth_all(ctx, &s, metric)?;
    let v = growth[0].v;
    let cross = cross_check_maximal(&s.aut, &s.dec, metric, v, pot.depth())?;
    let mut verdicts = Vec::new();
    for &id in &s.maximal {
        let comp = &s.dec.components[id];
        let sums: Vec<f64> = orbit_sums(
            &s.aut,
            comp,
            metric,
            pot.depth(),
            ctx.cfg.thermo.orbit_length,
            2000,
        )?
        .into_iter()
        .map(|x| x.1)
        .collect();
        verdicts.push(json!({ "component_id": id, "report": arithmeticity(&sums, ArithmeticityOptions::default()) }));
    }
    let components: Vec<Value> = s
        .dec
        .components
        .iter()
        .map(|c| json!({ "id": c.id, "vertices": c.vertices, "nontrivial": c.nontrivial, "zero": c.is_zero, "period": c.period }))
        .collect();
    let doc = json!({
        "components": components,
        "acyclic_condensation": s.dec.condensation_is_acyclic(&s.aut),
        "word_maximal": s.maximal,
        "growth": growth,
        "cross_check": cross,
        "arithmeticity": verdicts,
    });
    ctx.sink("analyze").json("analysis.json", &doc)?;
    if !cross.agree || !cross.connected_pairs.is_empty() {
        return Err(Error::Validation(format!(
            "maximal components: word {:?}, pressure {:?}, connected {:?}",
            cross.word_maximal, cross.pressure_maximal, cross.connected_pairs
        )));
    }
    let brief: Vec<Value> = doc["arithmeticity"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|v| json!({ "component_id": v["component_id"], "verdict": v["report"]["verdict"] }))
        .collect();
    Ok(json!({ "word_maximal": s.maximal, "verdicts": brief }))
}

pub fn cmd_growth(ctx: &Ctx) -> Result<Value> {
    let s = structure(ctx)?;
    let mut all = Vec::new();
    for m in &ctx.metrics {
        all.extend(growth_all(ctx, &s, m)?.0);
    }
    if all.is_empty() {
        return Err(Error::Input("config names no metric".into()));
    }
    ctx.sink("growth").json("growth.json", &all)?;
    Ok(json!(all
        .iter()
        .map(|g| json!({ "metric": g.metric, "component": g.component, "v": g.v }))
        .collect::<Vec<_>>()))
}

fn fd(f: &dyn Fn(f64) -> Result<f64>, t: f64) -> Result<f64> {
    let h = 1e-4;
    Ok((f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h))
}

pub fn cmd_manhattan(ctx: &Ctx) -> Result<Value> {
    let s = structure(ctx)?;
    let d = ctx.metric(0)?;
    let (g, pot) = growth_all(ctx, &s, d)?;
    let (a, b, n) = ctx.cfg.thermo.manhattan_grid;
    let ts = grid(a, b, n);
    let mut sink = ctx.sink("manhattan");
    let mut rows = Vec::new();
    for &t in &ts {
        let th = manhattan(&pot, t)?;
        let der = fd(&|x| manhattan(&pot, x), t)?;
        rows.push(vec![num(t), num(th), num(der), String::new()]);
    }
    sink.csv(
        "manhattan_d_s.csv",
        &["t", "theta", "derivative", "flags"],
        &rows,
    )?;
    let mut summary = json!({ "theta_at_0": manhattan(&pot, 0.0)?, "theta_at_v": manhattan(&pot, g[0].v)?, "v": g[0].v });
    if let Ok(dstar) = ctx.metric(1) {
        let comp = &s.dec.components[s.maximal[0]];
        let pd = pot.scaled(g[0].v);
        let ps_raw = cylinder_potential(&s.aut, comp, dstar, pot.depth())?;
        let vs = growth_rate(&s.aut, comp, &ps_raw)?.v;
        let ps = ps_raw.scaled(vs);
        let ce = correlation_exponent(&pd, &ps)?;
        let mut rows = Vec::new();
        let grid2 = grid(0.0, 1.0, n);
        for &t in &grid2 {
            let th = manhattan_pair(&pd, &ps, t)?;
            let der = fd(&|x| manhattan_pair(&pd, &ps, x), t)?;
            let flag = if ce.degenerate { "affine" } else { "" };
            rows.push(vec![num(t), num(th), num(der), flag.into()]);
        }
        sink.csv(
            "manhattan_pair.csv",
            &["t", "theta", "derivative", "flags"],
            &rows,
        )?;
        sink.json("correlation_exponent.json", &ce)?;
        summary["pair"] = json!({ "alpha": ce.alpha, "xi": ce.xi, "affine": ce.degenerate });
    }
    sink.json("manhattan.json", &summary)?;
    Ok(summary)
}

pub fn cmd_scan(ctx: &Ctx) -> Result<Value> {
    let s = structure(ctx)?;
    let (g, pot) = growth_all(ctx, &s, ctx.metric(0)?)?;
    let (a, b, n) = ctx.cfg.thermo.scan_grid;
    let pts = spectral_scan(&pot, g[0].v, &grid(a, b, n));
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| vec![num(p.t), num(p.rho), num(p.gap), p.converged.to_string()])
        .collect();
    let mut sink = ctx.sink("scan");
    sink.csv(
        "spectral_scan.csv",
        &["t", "rho", "gap", "converged"],
        &rows,
    )?;
    let eta = pts.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
    let summary = json!({ "v": g[0].v, "min_gap": eta, "points": pts.len() });
    sink.json("scan.json", &summary)?;
    Ok(summary)
}

pub fn cmd_count(ctx: &Ctx) -> Result<Value> {
    let s = structure(ctx)?;
    let d = ctx.metric(0)?;
    let (g, pot) = growth_all(ctx, &s, d)?;
    let v = g[0].v;
    let report = count_ball(d, ctx.cfg.counting.n_max)?;
    let fit = fit_asymptotic(&report, Some(v))?;
    let comp = &s.dec.components[s.maximal[0]];
    let sums: Vec<f64> = orbit_sums(
        &s.aut,
        comp,
        d,
        pot.depth(),
        ctx.cfg.thermo.orbit_length,
        2000,
    )?
    .into_iter()
    .map(|x| x.1)
    .collect();
    let arith = arithmeticity(&sums, ArithmeticityOptions::default());
    let kappa = match error_term_fit(&fit, matches!(arith.verdict, Verdict::Lattice { .. })) {
        Ok(k) => json!(k),
        Err(e) => json!({ "status": e.to_string() }),
    };
    let pn = ctx.cfg.counting.poincare_n;
    let above = poincare_compare(&s.aut, &s.dec, d, Complex64::new(v + 0.1, 0.0), pn)?;
    let at = poincare_compare(&s.aut, &s.dec, d, Complex64::new(v, 0.0), pn)?;
    let mut sink = ctx.sink("count");
    let rows: Vec<Vec<String>> = fit
        .residuals
        .iter()
        .map(|r| vec![num(r.0), num(r.1), num(r.2)])
        .collect();
    sink.csv("counts.csv", &["T", "N", "residual"], &rows)?;
    let summary = json!({
        "metric": report.tag,
        "ball_size": report.ball_size,
        "t_cov": report.t_cov,
        "c": fit.c,
        "delta": fit.delta,
        "variation": fit.variation,
        "oscillation_flag": fit.oscillation_flag,
        "kappa": kappa,
        "poincare_discrepancy": above.max_relative_discrepancy,
        "poincare_at_v_spread": at.sphere_sum_spread,
    });
    sink.json(
        "count.json",
        &json!({ "summary": summary, "fit": fit, "poincare_above": above, "poincare_at_v": at }),
    )?;
    Ok(summary)
}

pub fn cmd_correlate(ctx: &Ctx) -> Result<Value> {
    let s = structure(ctx)?;
    let (d, dstar) = (ctx.metric(0)?, ctx.metric(1)?);
    let (gd, pd) = growth_all(ctx, &s, d)?;
    let (gs, ps) = growth_all(ctx, &s, dstar)?;
    let (vd, vs) = (gd[0].v, gs[0].v);
    let ce = correlation_exponent(&pd.scaled(vd), &ps.scaled(vs))?;
    let (dn, sn) = (d.scaled(vd), dstar.scaled(vs));
    let rep = correlate(&dn, &sn, ctx.cfg.counting.eps, ctx.cfg.counting.n_max)?;
    let ratio = mean_ratio_diagnostic(
        &dn,
        &sn,
        ce.alpha - ce.xi,
        ce.xi,
        0.1,
        ctx.cfg.counting.n_max.min(12),
    )?;
    if rep.status == CorrelationStatus::Underpowered {
        log::warn!("correlation range underpowered; data emitted without fits");
    }
    let mut sink = ctx.sink("correlate");
    let rows: Vec<Vec<String>> = rep
        .counts
        .iter()
        .map(|c| vec![num(c.0), c.1.to_string(), c.2.to_string()])
        .collect();
    sink.csv("correlation_counts.csv", &["T", "M", "N"], &rows)?;
    let summary = json!({
        "status": rep.status,
        "alpha": ce.alpha,
        "xi": ce.xi,
        "degenerate": ce.degenerate || rep.degenerate,
        "fitted_exponent": rep.sqrt_corrected.as_ref().map(|f| f.exponent),
        "sqrt_better": rep.sqrt_better,
    });
    sink.json(
        "correlation.json",
        &json!({ "summary": summary, "exponent": ce, "report": rep, "mean_ratio": ratio }),
    )?;
    Ok(summary)
}

pub fn cmd_mixing(ctx: &Ctx) -> Result<Value> {
    let s = structure(ctx)?;
    let mut out = Vec::new();
    for m in &ctx.metrics {
        let (_, pot) = growth_all(ctx, &s, m)?;
        let comp = &s.dec.components[s.maximal[0]];
        let r = mixing_check(
            &s.aut,
            comp,
            m,
            pot.depth(),
            ctx.cfg.thermo.roof_power,
            ctx.cfg.thermo.orbit_length,
            ArithmeticityOptions::default(),
        )?;
        out.push(json!({ "metric": m.tag(), "component": comp.id, "report": r }));
    }
    ctx.sink("mixing").json("mixing.json", &out)?;
    Ok(json!(out
        .iter()
        .map(|o| json!({ "metric": o["metric"], "verdict": o["report"]["verdict"] }))
        .collect::<Vec<_>>()))
}

pub fn cmd_report(ctx: &Ctx) -> Result<Value> {
    let mut doc = serde_json::Map::new();
    doc.insert("automaton".into(), cmd_automaton(ctx)?);
    doc.insert("analyze".into(), cmd_analyze(ctx)?);
    doc.insert("growth".into(), cmd_growth(ctx)?);
    doc.insert("manhattan".into(), cmd_manhattan(ctx)?);
    doc.insert("scan".into(), cmd_scan(ctx)?);
    doc.insert("count".into(), cmd_count(ctx)?);
    if ctx.metrics.len() == 2 {
        doc.insert("correlate".into(), cmd_correlate(ctx)?);
    }
    doc.insert("mixing".into(), cmd_mixing(ctx)?);
    let v = Value::Object(doc);
    ctx.sink("report").json("report.json", &v)?;
    Ok(v)
}
