use std::sync::{Arc, OnceLock};

use orbitcount::automaton::{build_coding, build_shortlex_acceptor, GeodesicAutomaton};
use orbitcount::group::{free_reduce, Group, Presentation, Symbol};
use orbitcount::shift::*;
use proptest::prelude::*;

struct Fixture {
    group: Arc<Group>,
    aut: GeodesicAutomaton,
    dec: Decomposition,
}

fn free2() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let group = Arc::new(Group::new(Presentation::free(2).unwrap()));
        let aut = build_shortlex_acceptor(&group, 1, 6).unwrap();
        let dec = scc_decompose(&aut);
        Fixture { group, aut, dec }
    })
}

fn genus2() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let group = Arc::new(Group::new(Presentation::surface(2).unwrap()));
        let aut = build_coding(&group, 6, 5).unwrap();
        let dec = scc_decompose(&aut);
        Fixture { group, aut, dec }
    })
}

#[test]
fn condensation_is_a_dag() {
    for f in [free2(), genus2()] {
        assert!(f.dec.condensation_is_acyclic(&f.aut));
        let covered: usize = f.dec.components.iter().map(|c| c.vertices.len()).sum();
        assert_eq!(covered, f.aut.num_vertices());
    }
}

#[test]
fn cyclic_parts_shift_by_one() {
    for f in [free2(), genus2()] {
        for c in f.dec.coding_components() {
            let p = c.period;
            assert_eq!(c.cyclic_parts.len(), p);
            let part_of = |v: usize| {
                c.cyclic_parts
                    .iter()
                    .position(|part| part.contains(&v))
                    .unwrap()
            };
            for &v in &c.vertices {
                for w in successors(&f.aut, v).into_iter().filter(|&w| c.contains(w)) {
                    assert_eq!(part_of(w), (part_of(v) + 1) % p);
                }
            }
        }
    }
}

#[test]
fn periodic_orbit_lengths_are_multiples_of_the_period() {
    for f in [free2(), genus2()] {
        for c in f.dec.coding_components() {
            for o in periodic_orbits(&f.aut, c, 6, 500) {
                assert_eq!(o.len() % c.period, 0);
                for i in 0..o.len() {
                    assert_eq!(
                        f.aut.step(o.vertices[i], o.word[i]),
                        Some(o.vertices[(i + 1) % o.len()])
                    );
                }
            }
        }
    }
}

#[test]
fn free_word_maximal_component_has_growth_three() {
    let f = free2();
    let ids = word_maximal_components(&f.aut, &f.dec).unwrap();
    assert_eq!(ids.len(), 1);
    let g = component_growth(&f.aut, &f.dec.components[ids[0]]).unwrap();
    assert!((g - 3f64.ln()).abs() < 1e-12, "{g}");
}

#[test]
fn genus2_has_one_maximal_component() {
    let f = genus2();
    let ids = word_maximal_components(&f.aut, &f.dec).unwrap();
    assert_eq!(ids.len(), 1);
    for &a in &ids {
        for &b in &ids {
            assert!(a == b || !reachable(&f.aut, &f.dec, a, b));
        }
    }
}

#[test]
fn arithmeticity_of_word_orbits() {
    let f = free2();
    let c = f.dec.coding_components().next().unwrap();
    let lengths: Vec<f64> = periodic_orbits(&f.aut, c, 6, 200)
        .iter()
        .map(|o| o.len() as f64)
        .collect();
    let r = arithmeticity(&lengths, ArithmeticityOptions::default());
    assert_eq!(r.verdict, Verdict::Lattice { gap: 1.0 });
}

#[test]
fn too_few_orbits_is_inconclusive() {
    let r = arithmeticity(&[2.5], ArithmeticityOptions::default());
    assert!(matches!(r.verdict, Verdict::Inconclusive { .. }));
}

#[test]
fn golden_ratio_is_badly_approximable() {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let cf = badly_approximable_diagnostic(phi, 1.0, 12, 10).unwrap();
    assert!(cf.partial_quotients.iter().all(|&q| q == 1));
    assert!(cf.bounded_up_to_depth);
    assert!(
        badly_approximable_diagnostic(1.5, 1.0, 12, 10)
            .unwrap()
            .terminated
    );
}

fn strip(w: &[Symbol]) -> Vec<Symbol> {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] ^ 1 == *w.last().unwrap() {
        w.remove(0);
        w.pop();
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lattice_sums_recover_their_gap(gap in 0.1f64..5.0, ks in proptest::collection::vec(1u32..40, 3..12)) {
        let mut ks = ks;
        ks.push(1);
        let values: Vec<f64> = ks.iter().map(|&k| gap * k as f64).collect();
        match arithmeticity(&values, ArithmeticityOptions::default()).verdict {
            Verdict::Lattice { gap: g } => prop_assert!((g - gap).abs() < 1e-7 * gap.max(1.0)),
            v => prop_assert!(false, "{v:?}"),
        }
    }

    #[test]
    fn random_free_classes_are_realized(raw in proptest::collection::vec(0u8..4, 1..9)) {
        let f = free2();
        let core = strip(&raw);
        prop_assume!(!core.is_empty());
        let g = f.group.reduce(&core).unwrap();
        let class = f.group.canonical_class(&g, 8).unwrap();
        let c = f.dec.coding_components().next().unwrap();
        let w = loops_realizing_class(&f.aut, c, &f.group, &class, 4, 32, 8).unwrap().unwrap();
        // In a free group the loop spells a rotation of g's cyclic core.
        let word = &w.orbit.word;
        prop_assert_eq!(w.power, 1);
        let target = if w.sign > 0 { core.clone() } else { orbitcount::group::inverse_word(&core) };
        prop_assert!((0..word.len()).any(|i| word[i..].iter().chain(&word[..i]).eq(target.iter())));
    }
}
