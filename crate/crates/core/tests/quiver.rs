use preproj_core::families::*;
use preproj_core::quiver::*;
use preproj_core::standard::{ground, truncated_poly};
use preproj_core::{hilbert_series, Error, Field, SignConvention};
use proptest::prelude::*;

const Q: Field = Field::Rational;

fn k_and_s() -> Vec<Decoration> {
    vec![decoration("k", ground(Q)), decoration("S", truncated_poly(Q, 2).unwrap())]
}

#[test]
fn builds_b2_and_single_vertex() {
    let dq = DecoratedQuiver::build(
        k_and_s(),
        vec![("1".into(), 0), ("2".into(), 1)],
        vec![ArrowSpec::new("a", "1", "2", ArrowKind::TensorUnit)],
    )
    .unwrap();
    assert_eq!(dq.num_vertices(), 2);
    assert_eq!(dq.bimodule_dim(0), 2);
    let single = single_vertex(Q);
    assert_eq!(single.num_vertices(), 1);
    assert!(single.arrows().is_empty());
}

#[test]
fn identification_between_different_algebras_is_rejected() {
    let r = DecoratedQuiver::build(
        k_and_s(),
        vec![("1".into(), 0), ("2".into(), 1)],
        vec![ArrowSpec::new("a", "1", "2", ArrowKind::Identification)],
    );
    assert!(matches!(r, Err(Error::ConditionFViolation(_))));
}

#[test]
fn dangling_arrow_is_rejected() {
    let r = DecoratedQuiver::build(
        k_and_s(),
        vec![("1".into(), 0)],
        vec![ArrowSpec::new("a", "1", "7", ArrowKind::TensorUnit)],
    );
    assert!(matches!(r, Err(Error::DanglingArrow(_))));
}

#[test]
fn doubling() {
    let b2 = b_n(Q, 2).double();
    let ends: Vec<(usize, usize)> = b2.arrows().iter().map(|a| (a.source, a.target)).collect();
    assert_eq!(ends, vec![(0, 1), (1, 0)]);
    assert_eq!(b2.bimodule_dim(0), 2);
    assert_eq!(b2.bimodule_dim(1), 2);
    assert!(single_vertex(Q).double().arrows().is_empty());
    for n in 2..=6 {
        let d = c_n(Q, n).double();
        assert_eq!(d.arrows().len(), 2 * (n - 1));
        let tensor = d.arrows().iter().filter(|a| a.kind == ArrowKind::TensorUnit).count();
        assert_eq!(tensor, 2);
    }
}

#[test]
fn fold_a3_and_d4() {
    let (a3, g) = a_odd_centered(Q, 2);
    let folded = fold(&a3, &[g]).unwrap();
    let mut dims: Vec<usize> = (0..2).map(|v| folded.algebra(v).dim()).collect();
    dims.sort();
    assert_eq!(dims, vec![1, 2]);
    assert_eq!(folded.arrows().len(), 1);
    assert_eq!(folded.arrows()[0].kind, ArrowKind::TensorUnit);

    let (d4, gens) = d4(Q);
    let folded = fold(&d4, &gens).unwrap();
    let mut dims: Vec<usize> = (0..2).map(|v| folded.algebra(v).dim()).collect();
    dims.sort();
    assert_eq!(dims, vec![1, 3]);
}

#[test]
fn fold_preserves_graded_dimensions() {
    let (a3, g) = a_odd_centered(Q, 2);
    let (d4, gens) = d4(Q);
    let (e6, r) = e6(Q);
    for (dq, gs) in [(a3, vec![g]), (d4, gens), (e6, vec![r])] {
        let folded = fold(&dq, &gs).unwrap();
        let h = hilbert_series(&dq, SignConvention::Signed, 30).unwrap();
        let hf = hilbert_series(&folded, SignConvention::Signed, 30).unwrap();
        assert!(h.stabilized && hf.stabilized);
        assert_eq!(h.t_totals(), hf.t_totals());
    }
}

#[test]
fn identity_fold_is_unchanged() {
    let dq = a_n(Q, 3);
    let folded = fold(&dq, &[Automorphism::identity(&dq)]).unwrap();
    assert_eq!(folded.num_vertices(), 3);
    assert_eq!(folded.arrows().len(), 2);
    assert!((0..3).all(|v| folded.algebra(v).dim() == 1));
}

#[test]
fn non_automorphism_is_rejected() {
    let dq = a_n(Q, 3);
    let bad = Automorphism::from_cycles(&dq, &[vec!["1".into(), "2".into()]], &[]).unwrap();
    assert!(matches!(fold(&dq, &[bad]), Err(Error::NotAnAutomorphism(_))));
    assert!(matches!(
        Automorphism::from_cycles(&dq, &[vec!["9".into()]], &[]),
        Err(Error::NotAnAutomorphism(_))
    ));
}

#[test]
fn automorphism_groups() {
    assert_eq!(automorphism_group(&a_odd_centered(Q, 2).0).unwrap().len(), 2);
    assert_eq!(automorphism_group(&d4(Q).0).unwrap().len(), 6);
    assert_eq!(automorphism_group(&b_n(Q, 2)).unwrap().len(), 1);
}

#[test]
fn cartan_examples() {
    let c = cartan_data(&b_n(Q, 2));
    assert_eq!(c.a, vec![vec![0, 2], vec![1, 0]]);
    assert_eq!(c.d, vec![1, 2]);
    let m = c.cartan_matrix(Q);
    assert_eq!(m, preproj_core::linalg::Matrix::from_i64(Q, &[vec![2, -2], vec![-1, 2]]));

    let c = cartan_data(&g2(Q));
    assert_eq!(c.a, vec![vec![0, 3], vec![1, 0]]);

    let c = cartan_data(&single_vertex(Q));
    assert_eq!(c.a, vec![vec![0]]);
    assert_eq!(c.cartan_matrix(Q), preproj_core::linalg::Matrix::from_i64(Q, &[vec![2]]));
}

#[test]
fn dynkin_detection() {
    assert!(is_dynkin(&b_n(Q, 2)));
    assert!(is_dynkin(&g2(Q)));
    assert!(is_dynkin(&f4(Q)));
    assert!(is_dynkin(&c_n(Q, 5)));
    assert!(!is_dynkin(&jordan(Q)));
    assert!(!is_dynkin(&star(Q, 4)));
    assert!(is_dynkin(&star(Q, 3)));
}

fn corpus() -> Vec<DecoratedQuiver> {
    let mut v = vec![single_vertex(Q), g2(Q), f4(Q), jordan(Q), star(Q, 5), d4(Q).0, e6(Q).0];
    v.extend((2..=5).map(|n| b_n(Q, n)));
    v.extend((2..=5).map(|n| c_n(Q, n)));
    v.extend((1..=4).map(|n| folded_a_odd(Q, n).unwrap()));
    v
}

#[test]
fn symmetrizer_holds_on_corpus() {
    for dq in corpus() {
        assert!(cartan_data(&dq).symmetrizable());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn doubling_counts_and_idempotence(idx in 0usize..19) {
        let dq = corpus().swap_remove(idx);
        let d = dq.double();
        prop_assert_eq!(d.arrows().len(), 2 * dq.arrows().len());
        prop_assert_eq!(d.double().arrows().len(), d.arrows().len());
        prop_assert_eq!(d.positive().double().arrows().len(), d.arrows().len());
        for a in 0..d.arrows().len() {
            prop_assert_eq!(d.dual_arrow(d.dual_arrow(a)), a);
        }
    }
}
