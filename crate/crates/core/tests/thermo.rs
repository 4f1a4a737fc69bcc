use std::sync::{Arc, OnceLock};

use orbitcount::automaton::{build_shortlex_acceptor, GeodesicAutomaton};
use orbitcount::group::{Group, Presentation};
use orbitcount::metric::{Metric, MetricKind};
use orbitcount::shift::{scc_decompose, word_maximal_components, Component};
use orbitcount::thermo::*;
use proptest::prelude::*;

struct Schottky {
    aut: GeodesicAutomaton,
    comp: Component,
    fuchsian: Metric,
    pot: CylinderPotential,
    word: CylinderPotential,
    v: f64,
}

fn schottky() -> &'static Schottky {
    static CELL: OnceLock<Schottky> = OnceLock::new();
    CELL.get_or_init(|| {
        let group = Arc::new(Group::new(Presentation::schottky(3.0, 5.0).unwrap()));
        let aut = build_shortlex_acceptor(&group, 1, 4).unwrap();
        let dec = scc_decompose(&aut);
        let comp = dec.components[word_maximal_components(&aut, &dec).unwrap()[0]].clone();
        let fuchsian = Metric::new(group.clone(), MetricKind::FuchsianOrbit).unwrap();
        let pot = cylinder_potential(&aut, &comp, &fuchsian, 4).unwrap();
        let wm = Metric::new(group.clone(), MetricKind::Word).unwrap();
        let word = cylinder_potential(&aut, &comp, &wm, 4).unwrap();
        let v = growth_rate(&aut, &comp, &pot).unwrap().v;
        Schottky {
            aut,
            comp,
            fuchsian,
            pot,
            word,
            v,
        }
    })
}

#[test]
fn growth_rate_is_stable_in_depth() {
    let s = schottky();
    let choice = choose_depth(&s.aut, &s.comp, &s.fuchsian, 2, 7, 1e-6).unwrap();
    assert!(choice.converged, "{:?}", choice.history);
    let vs: Vec<f64> = choice.history.iter().map(|h| h.1).collect();
    let steps: Vec<f64> = vs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(
        steps.windows(2).all(|s| s[1] < s[0]),
        "{:?}",
        choice.history
    );
    assert!((vs.last().unwrap() - 0.551542).abs() < 1e-5);
}

#[test]
fn epsilon_shrinks_with_depth() {
    let s = schottky();
    let e: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&k| {
            cylinder_potential(&s.aut, &s.comp, &s.fuchsian, k)
                .unwrap()
                .epsilon
        })
        .collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
}

#[test]
fn telescoping_stays_bounded() {
    let s = schottky();
    let start = s.comp.vertices[0];
    let d = telescoping_defect(&s.aut, &s.comp, &s.fuchsian, 4, &[start], 30).unwrap();
    assert!(d < 5.0, "{d}");
}

#[test]
fn periodic_pressure_converges() {
    let s = schottky();
    let p = pressure(&s.pot, 0.3).unwrap();
    let e20 = (periodic_pressure(&s.pot, 0.3, 20) - p).abs();
    let e60 = (periodic_pressure(&s.pot, 0.3, 60) - p).abs();
    assert!(e60 < e20 && e60 < 0.05, "{e20} {e60}");
}

#[test]
fn maximality_cross_check_agrees() {
    let s = schottky();
    let dec = scc_decompose(&s.aut);
    let r = cross_check_maximal(&s.aut, &dec, &s.fuchsian, s.v, 4).unwrap();
    assert!(r.agree && r.connected_pairs.is_empty());
}

#[test]
fn fuchsian_orbit_sums_are_non_arithmetic() {
    let s = schottky();
    let r = mixing_check(&s.aut, &s.comp, &s.fuchsian, 4, 1, 6, Default::default()).unwrap();
    assert_eq!(r.verdict, MixingVerdict::WeakMixing);
}

#[test]
fn correlation_exponent_is_inside_the_unit_interval() {
    let s = schottky();
    let ce = correlation_exponent(&s.word.scaled(3f64.ln()), &s.pot.scaled(s.v)).unwrap();
    assert!(!ce.degenerate);
    assert!(ce.alpha > 0.0 && ce.alpha < 1.0, "{ce:?}");
    assert!((ce.slope_fd + 1.0).abs() < 1e-5, "{ce:?}");
    // Swapping the roles reflects the curve; α is symmetric.
    let swapped = correlation_exponent(&s.pot.scaled(s.v), &s.word.scaled(3f64.ln())).unwrap();
    assert!((swapped.alpha - ce.alpha).abs() < 1e-6);
}

#[test]
fn potentials_on_different_shifts_are_rejected() {
    let s = schottky();
    let other = cylinder_potential(&s.aut, &s.comp, &s.fuchsian, 2).unwrap();
    assert!(manhattan_pair(&s.pot, &other, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pressure_is_decreasing_and_convex(a in -1.0f64..3.0, h in 0.01f64..1.0) {
        let s = schottky();
        let (p0, p1, p2) = (
            pressure(&s.pot, a).unwrap(),
            pressure(&s.pot, a + h).unwrap(),
            pressure(&s.pot, a + 2.0 * h).unwrap(),
        );
        prop_assert!(p1 < p0 && p2 < p1);
        prop_assert!(p1 <= 0.5 * (p0 + p2) + 1e-12);
    }

    #[test]
    fn scaling_the_metric_scales_the_growth_rate(k in 0.2f64..5.0) {
        let s = schottky();
        let v = growth_rate(&s.aut, &s.comp, &s.pot.scaled(k)).unwrap().v;
        prop_assert!((v * k - s.v).abs() < 1e-9);
    }

    #[test]
    fn manhattan_pair_is_convex(a in -0.5f64..1.2, h in 0.02f64..0.4) {
        let s = schottky();
        let th = |t: f64| manhattan_pair(&s.word, &s.pot, t).unwrap();
        prop_assert!(th(a + h) <= 0.5 * (th(a) + th(a + 2.0 * h)) + 1e-10);
        prop_assert!(th(a + h) < th(a));
    }

    #[test]
    fn twisted_spectral_radius_is_below_one(t in 0.1f64..30.0) {
        let s = schottky();
        let p = spectral_scan(&s.pot, s.v, &[t]);
        prop_assert!(p[0].rho < 1.0 && p[0].rho > 0.0);
    }

    #[test]
    fn gibbs_masses_sum_to_one(sv in 0.2f64..2.0) {
        let s = schottky();
        let g = gibbs_data(&s.pot, sv, 4).unwrap();
        for (_, _, mass) in &g.by_length {
            prop_assert!((mass - 1.0).abs() < 1e-9);
        }
        prop_assert!(g.spread.is_finite() && g.spread >= 1.0);
    }
}
