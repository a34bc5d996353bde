use std::collections::BTreeSet;
use std::sync::OnceLock;

use preproj_core::families::*;
use preproj_core::preprojective::{ideal_degree_span, relation_element};
use preproj_core::rewriting::*;
use preproj_core::{hilbert_series, DecoratedQuiver, Error, Field, Scalar, SignConvention};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: Field = Field::Rational;

const C_RULES: &str = include_str!("../../../data/c_algebra.rules");

fn c_system() -> RewriteSystem {
    parse_rule_file(C_RULES, Q).unwrap()
}

fn word(sys: &RewriteSystem, text: &str) -> Word {
    let e = parse_terms(&sys.alphabet, Q, text, 1, 1).unwrap();
    assert_eq!(e.len(), 1);
    e.into_keys().next().unwrap()
}

fn elem(sys: &RewriteSystem, text: &str) -> Elem {
    parse_terms(&sys.alphabet, Q, text, 1, 1).unwrap()
}

#[test]
fn c_system_normal_forms() {
    let sys = c_system();
    assert!(sys.normal_form(&elem(&sys, "a.a.a")).unwrap().is_empty());
    let ab = elem(&sys, "a.b");
    assert_eq!(sys.normal_form(&ab).unwrap(), ab);
    assert_eq!(
        sys.normal_form(&elem(&sys, "b.a.b.a")).unwrap(),
        elem(&sys, "-a.b.a.b - b.a.a.b")
    );
}

#[test]
fn c_system_ambiguities_and_witness() {
    let sys = c_system();
    let ambs = sys.find_ambiguities();
    let target = word(&sys, "b.a.b.a.a.a");
    let amb = ambs.iter().find(|a| a.word == target).expect("overlap of r3 with r1");
    assert_eq!(amb.kind, AmbiguityKind::Overlap);
    let w = sys.resolve(amb).unwrap().expect("unresolved before completion");
    // By hand: r1 kills one branch; r3 three times reduces the other.
    let expected = elem(&sys, "b.a.a.b.a.a + a.a.b.a.a.b - a.b.a.a.b.a");
    let neg: Elem = expected.iter().map(|(k, c)| (k.clone(), -c.clone())).collect();
    assert!(w == expected || w == neg);
    let unresolved: Vec<_> = ambs.iter().filter(|a| sys.resolve(a).unwrap().is_some()).collect();
    assert_eq!(unresolved.len(), 1);
}

/// Irreducible words of C, read off from the four reductions.
const C_BASIS: [&str; 24] = [
    "e_1", "b",
    "a", "a.b", "b.a", "b.a.b",
    "a.a", "a.a.b", "a.b.a", "a.b.a.b", "b.a.a", "b.a.a.b",
    "a.a.b.a", "a.a.b.a.b", "a.b.a.a", "a.b.a.a.b", "b.a.a.b.a", "b.a.a.b.a.b",
    "a.a.b.a.a", "a.a.b.a.a.b", "a.b.a.a.b.a", "a.b.a.a.b.a.b",
    "a.a.b.a.a.b.a", "a.a.b.a.a.b.a.b",
];

#[test]
fn c_system_completion() {
    let mut sys = c_system();
    let report = sys.complete().unwrap();
    assert_eq!(report.initial_rules, 3);
    assert_eq!(report.final_rules, 4);
    assert_eq!(report.added, vec![word(&sys, "b.a.a.b.a.a")]);
    let r4 = sys.rules().into_iter().find(|r| r.lhs == report.added[0]).unwrap();
    assert_eq!(r4.rhs, elem(&sys, "a.b.a.a.b.a - a.a.b.a.a.b"));
    assert!(matches!(r4.provenance, Provenance::Completion { .. }));
    for a in sys.find_ambiguities() {
        assert_eq!(sys.resolve(&a).unwrap(), None);
    }

    let words = sys.irreducible_words(sys.degree_bound).unwrap();
    assert_eq!(words.len(), 24);
    let found: BTreeSet<String> = words.iter().map(|w| w.render(&sys.alphabet)).collect();
    let expected: BTreeSet<String> = C_BASIS.iter().map(|s| s.to_string()).collect();
    assert_eq!(found, expected);
    assert_eq!(words.last().unwrap().render(&sys.alphabet), "a.a.b.a.a.b.a.b");

    // A confluent system is a fixed point of completion.
    let before = sys.rules();
    let again = sys.complete().unwrap();
    assert!(again.added.is_empty());
    assert_eq!(sys.rules(), before);
}

#[test]
fn trivial_ambiguity_cases() {
    let sys = parse_rule_file("order vertex 1: b > a\nrule: a.b -> 0\n", Q).unwrap();
    assert!(sys.find_ambiguities().is_empty());
    let sys = parse_rule_file("order vertex 1: c > b > a\nrule: a.b -> 0\nrule: b.c -> 0\n", Q).unwrap();
    let ambs = sys.find_ambiguities();
    assert_eq!(ambs.len(), 1);
    assert_eq!(sys.resolve(&ambs[0]).unwrap(), None);
}

#[test]
fn inclusion_ambiguities_are_found() {
    let text = "order vertex 1: b > a\nrule: b.a.b -> a.a.a\nrule: a.b -> a.a\n";
    let sys = parse_rule_file(text, Q).unwrap();
    assert!(sys.find_ambiguities().iter().any(|a| a.kind == AmbiguityKind::Inclusion));
}

#[test]
fn order_properties() {
    let sys = c_system();
    let w = |t: &str| word(&sys, t);
    // Length first, then rank: b > a.
    assert_eq!(sys.compare(&w("a.a"), &w("b")), std::cmp::Ordering::Greater);
    assert_eq!(sys.compare(&w("b.a"), &w("a.b")), std::cmp::Ordering::Greater);
    // Compatible with concatenation on either side.
    let pairs = [("b.a", "a.b"), ("b.a.a", "a.b.b"), ("b", "a")];
    for (u, v) in pairs {
        for x in ["a", "b.a", "a.a.b"] {
            let (uu, vv) = (w(&format!("{x}.{u}")), w(&format!("{x}.{v}")));
            assert_eq!(sys.compare(&uu, &vv), std::cmp::Ordering::Greater);
            let (uu, vv) = (w(&format!("{u}.{x}")), w(&format!("{v}.{x}")));
            assert_eq!(sys.compare(&uu, &vv), std::cmp::Ordering::Greater);
        }
    }
}

#[test]
fn rule_file_errors() {
    let bad = parse_rule_file("order vertex 1: b > a\nrule: a.c -> 0\n", Q);
    assert!(matches!(bad, Err(Error::ParseError { line: 2, .. })));
    let increasing = parse_rule_file("order vertex 1: b > a\nrule: a.b -> b.a\n", Q);
    assert!(matches!(increasing, Err(Error::ParseError { line: 2, .. })));
    let junk = parse_rule_file("order vertex 1: b > a\nfrobnicate\n", Q);
    assert!(matches!(junk, Err(Error::ParseError { line: 2, col: 1, .. })));
}

#[test]
fn degree_bound_is_enforced() {
    let sys = parse_rule_file("order vertex 1: b > a\nbound: 3\nrule: b.b -> 0\n", Q).unwrap();
    let long = elem(&sys, "a.a.a.a");
    assert_eq!(sys.normal_form(&long), Err(Error::DegreeBoundExceeded(3)));
}

#[test]
fn rule_file_round_trip() {
    let mut sys = c_system();
    sys.complete().unwrap();
    let again = parse_rule_file(&sys.to_rule_file(), Q).unwrap();
    assert_eq!(again.rules().len(), 4);
    assert_eq!(again.irreducible_words(12).unwrap().len(), 24);
}

fn completed(dq: &DecoratedQuiver, style: RankingStyle) -> RewriteSystem {
    let h = hilbert_series(dq, SignConvention::Signed, 40).unwrap();
    let top = h.max_t().unwrap();
    let (mut sys, _) = preprojective_system(dq, SignConvention::Signed, style, top + 1).unwrap();
    sys.complete().unwrap();
    sys
}

#[test]
fn oracle_agreement_with_linear_algebra() {
    let mut cases: Vec<(DecoratedQuiver, RankingStyle)> = vec![(g2(Q), RankingStyle::TowardLower), (f4(Q), RankingStyle::TowardLower)];
    cases.extend((2..=5).map(|n| (b_n(Q, n), RankingStyle::TowardLower)));
    cases.extend((2..=6).map(|n| (c_n(Q, n), RankingStyle::TowardHigher)));
    // The counts do not depend on the ranking.
    cases.push((b_n(Q, 3), RankingStyle::TowardHigher));
    cases.push((c_n(Q, 4), RankingStyle::TowardLower));
    for (dq, style) in cases {
        for conv in [SignConvention::Signed, SignConvention::AllPlus] {
            let h = hilbert_series(&dq, conv, 40).unwrap();
            let top = h.max_t().unwrap();
            let (mut sys, _) = preprojective_system(&dq, conv, style, top + 1).unwrap();
            sys.complete().unwrap();
            let ir = sys.irreducible_series().unwrap();
            assert!(ir.stabilized);
            assert_eq!(ir.terms, h.terms, "{:?}", dq.vertices().len());
        }
    }
}

#[test]
fn degree_zero_counts_vertex_algebras() {
    for dq in [g2(Q), b_n(Q, 3), c_n(Q, 4)] {
        let sys = completed(&dq, RankingStyle::TowardLower);
        let counts = sys.irreducible_count(0).unwrap();
        for v in 0..dq.num_vertices() {
            let n: usize = counts.iter().filter(|(k, _)| k.0 == v).map(|(_, c)| c).sum();
            assert_eq!(n, dq.algebra(v).dim());
        }
    }
}

#[test]
fn c_n_block_totals() {
    for n in 2..=6 {
        let sys = completed(&c_n(Q, n), RankingStyle::TowardHigher);
        let h = sys.irreducible_series().unwrap();
        let blocks = h.block_totals();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(blocks[i][j], 2 * (i.min(j) as i64 + 1));
            }
        }
    }
}

/// The straight path through the given vertices (1-based, adjacent).
fn gamma(sys: &RewriteSystem, stops: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    for w in stops.windows(2) {
        let (mut v, t) = (w[0], w[1]);
        while v != t {
            let next = if t > v { v + 1 } else { v - 1 };
            let name = if next > v { format!("a{v}") } else { format!("a{next}*") };
            gens.push(sys.alphabet.generator_index(&name).unwrap());
            v = next;
        }
    }
    gens
}

#[test]
fn c_n_completion_contains_x_and_death_reductions() {
    for n in 3..=5 {
        let sys = completed(&c_n(Q, n), RankingStyle::TowardHigher);
        let x = sys.alphabet.generator_index(&format!("x_{n}")).unwrap();
        let rules = sys.rules();
        let find = |gens: &[usize]| rules.iter().find(|r| r.lhs.gens == gens).cloned();
        for k in 2..=n {
            let mut lhs = vec![x];
            lhs.extend(gamma(&sys, &[n, k - 1, k]));
            let rule = find(&lhs).unwrap_or_else(|| panic!("X-reduction for k = {k}"));
            let mut rhs = gamma(&sys, &[n, n - 1, n]);
            rhs.push(x);
            rhs.extend(gamma(&sys, &[n, k]));
            assert_eq!(rule.rhs.len(), 1);
            assert_eq!(rule.rhs.keys().next().unwrap().gens, rhs);
        }
        for i in 2..=n {
            for j in 1..i {
                let mut lhs = gamma(&sys, &[i, i - j, n]);
                lhs.push(x);
                lhs.extend(gamma(&sys, &[n, j]));
                let rule = find(&lhs).unwrap_or_else(|| panic!("death reduction ({i}, {j})"));
                assert!(rule.rhs.is_empty());
            }
        }
    }
}

#[test]
fn b_n_completion_adds_the_integral_reduction() {
    for n in 3..=5 {
        let dq = b_n(Q, n);
        let (initial, _) = preprojective_system(&dq, SignConvention::Signed, RankingStyle::TowardLower, 2 * n).unwrap();
        assert!(initial.find_ambiguities().iter().any(|a| initial.resolve(a).unwrap().is_some()));
        let sys = completed(&dq, RankingStyle::TowardLower);
        let lhs = gamma(&sys, &[2, 1, 3, 2]);
        let rule = sys.rules().into_iter().find(|r| r.lhs.gens == lhs).expect("integral reduction");
        assert!(matches!(rule.provenance, Provenance::Completion { .. }));
    }
}

#[test]
fn completed_rules_lie_in_the_ideal() {
    for dq in [g2(Q), b_n(Q, 3), c_n(Q, 3), b_n(Q, 2)] {
        let h = hilbert_series(&dq, SignConvention::Signed, 40).unwrap();
        let (mut sys, pres) = preprojective_system(&dq, SignConvention::Signed, RankingStyle::TowardLower, h.max_t().unwrap() + 1).unwrap();
        sys.complete().unwrap();
        let d = dq.double();
        let r = relation_element(&d, SignConvention::Signed).unwrap();
        for rule in sys.rules() {
            let mut e = rule.rhs.clone();
            for c in e.values_mut() {
                *c = -c.clone();
            }
            e.insert(rule.lhs.clone(), Q.one());
            let t = pres.telem_of(&d, &e);
            let n = rule.lhs.degree(&sys.alphabet);
            let (piece, ech) = ideal_degree_span(&d, &r, n);
            assert!(ech.contains(&piece.coords(&t)), "{}", rule.lhs.render(&sys.alphabet));
        }
    }
}

#[test]
fn presentation_round_trips_path_words() {
    for dq in [g2(Q), b_n(Q, 3), f4(Q)] {
        let pres = Presentation::new(&dq).unwrap();
        let d = dq.double();
        for n in 0..=3 {
            for w in preproj_core::tensor::graded_piece(&d, n).words {
                let g = pres.word_of(&d, &w);
                assert_eq!(pres.path_word(&d, &g), Some(w));
            }
        }
    }
    let z = k_to(Q, decoration("Z", preproj_core::standard::z_algebra(Q, 4).unwrap())).unwrap();
    assert!(matches!(Presentation::new(&z), Err(Error::UnsupportedParams(_))));
}

fn systems() -> &'static Vec<RewriteSystem> {
    static S: OnceLock<Vec<RewriteSystem>> = OnceLock::new();
    S.get_or_init(|| {
        let mut c = c_system();
        c.complete().unwrap();
        vec![
            c,
            completed(&g2(Q), RankingStyle::TowardLower),
            completed(&b_n(Q, 3), RankingStyle::TowardLower),
            completed(&c_n(Q, 4), RankingStyle::TowardHigher),
        ]
    })
}

fn random_elem(sys: &RewriteSystem, rng: &mut ChaCha8Rng) -> Elem {
    let mut e = Elem::new();
    for _ in 0..rng.gen_range(1..6) {
        let mut v = rng.gen_range(0..sys.alphabet.vertices.len());
        let source = v;
        let mut gens = Vec::new();
        let mut deg = 0;
        for _ in 0..rng.gen_range(0..10) {
            let out: Vec<usize> = (0..sys.alphabet.generators.len())
                .filter(|&g| sys.alphabet.generators[g].source == v)
                .collect();
            if out.is_empty() {
                break;
            }
            let g = out[rng.gen_range(0..out.len())];
            let gen = &sys.alphabet.generators[g];
            if deg + gen.length > sys.degree_bound {
                break;
            }
            deg += gen.length;
            v = gen.target;
            gens.push(g);
        }
        let c: Scalar = Q.from_i64(rng.gen_range(-3..=3));
        e.insert(Word::new(source, gens), c);
    }
    e.retain(|_, c| !c.is_zero());
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normal_form_is_independent_of_reduction_choices(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sys in systems() {
            let e = random_elem(sys, &mut rng);
            let fixed = sys.normal_form(&e).unwrap();
            let shuffled = sys.normal_form_random(&e, &mut rng).unwrap();
            prop_assert_eq!(&fixed, &shuffled);
            for w in fixed.keys() {
                prop_assert!(!sys.is_reducible(w));
            }
        }
    }
}
