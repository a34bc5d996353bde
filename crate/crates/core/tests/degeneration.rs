use preproj_core::algebra::{validate_frobenius, FiniteDimAlgebra, FrobeniusForm};
use preproj_core::degeneration::*;
use preproj_core::families::{a_n, assemble, b_n, decoration, folded_a_odd, k_to, k_to_truncated, star};
use preproj_core::linalg::Matrix;
use preproj_core::standard::*;
use preproj_core::{ArrowKind, DecoratedQuiver, Error, Field, Scalar, SignConvention};
use proptest::prelude::*;

const Q: Field = Field::Rational;
const SIGNED: SignConvention = SignConvention::Signed;

fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| Q.from_i64(x)).collect()
}

fn same_products(a: &FiniteDimAlgebra, b: &FiniteDimAlgebra) -> bool {
    a.dim() == b.dim() && (0..a.dim()).all(|i| (0..a.dim()).all(|j| a.basis_product(i, j) == b.basis_product(i, j)))
}

#[test]
fn form_on_truncated_poly() {
    let s = truncated_poly(Q, 2).unwrap();
    let form = FrobeniusForm::new(ints(&[1, 1]));
    let g = form_vanishing_on_unit(&s.algebra, &form).unwrap();
    assert!(g.eval(s.algebra.unit()).is_zero());
    assert!(validate_frobenius(&s.algebra, &g).nondegenerate);

    let already = FrobeniusForm::new(ints(&[0, 1]));
    assert_eq!(form_vanishing_on_unit(&s.algebra, &already).unwrap(), already);
}

#[test]
fn form_on_two_idempotents() {
    let kk = sum_of_ground(Q, 2).unwrap();
    let form = FrobeniusForm::new(ints(&[1, 1]));
    let u = unit_in_kernel(&kk.algebra, &form, 0).unwrap();
    assert!(!u[0].is_zero());
    assert_eq!(u[1], -u[0].clone());
    let g = form_vanishing_on_unit(&kk.algebra, &form).unwrap();
    assert!(g.eval(&ints(&[1, 1])).is_zero());
}

#[test]
fn no_form_on_the_ground_field() {
    let k = ground(Q);
    assert_eq!(form_vanishing_on_unit(&k.algebra, k.form()), Err(Error::NoSuchForm));
}

#[test]
fn no_form_for_an_idempotent_over_f2() {
    let f2 = Field::prime(2).unwrap();
    let kk = sum_of_ground(f2, 2).unwrap();
    let form = FrobeniusForm::new(vec![f2.one(), f2.zero()]);
    assert_eq!(form_vanishing_on_unit(&kk.algebra, &form), Err(Error::NoSuchForm));
    let s = truncated_poly(f2, 2).unwrap();
    let g = form_vanishing_on_unit(&s.algebra, &FrobeniusForm::new(vec![f2.one(), f2.one()])).unwrap();
    assert!(g.eval(s.algebra.unit()).is_zero());
}

#[test]
fn most_degenerate_of_k4_looks_like_z4() {
    let k4 = sum_of_ground(Q, 4).unwrap();
    let form = FrobeniusForm::new(ints(&[1, 1, 1, -3]));
    let md = most_degenerate(&k4.algebra, &form).unwrap();
    assert_eq!(md.graded_dims(), vec![1, 2, 1]);
    let z4 = z_algebra(Q, 4).unwrap();
    assert_eq!(md.algebra.hilbert(), z4.algebra.hilbert());
    let diag = diagonalize_symmetric(&md.bilinear).unwrap();
    assert!(diag.iter().all(|d| !d.is_zero()));
    assert!(validate_frobenius(&md.algebra, &md.form).nondegenerate);
}

#[test]
fn most_degenerate_is_a_bilinear_form_algebra() {
    let k4 = sum_of_ground(Q, 4).unwrap();
    let md = most_degenerate(&k4.algebra, &FrobeniusForm::new(ints(&[2, -1, 1, -2]))).unwrap();
    let direct = bilinear_form_algebra(&md.bilinear).unwrap();
    assert!(same_products(&md.algebra, &direct.algebra));
    assert_eq!(md.form, *direct.form());
}

#[test]
fn bilinear_form_algebra_is_a_fixed_point() {
    let m = Matrix::from_i64(Q, &[vec![1, 2], vec![0, 3]]);
    let b = bilinear_form_algebra(&m).unwrap();
    let md = most_degenerate(&b.algebra, b.form()).unwrap();
    assert_eq!(md.bilinear, m);
    assert!(same_products(&md.algebra, &b.algebra));
}

#[test]
fn most_degenerate_of_matrices() {
    let m2 = matrix_algebra(Q, 2).unwrap();
    let off = m2.named_form("offdiag").unwrap();
    let md = most_degenerate(&m2.algebra, off).unwrap();
    assert_eq!(md.graded_dims(), vec![1, 2, 1]);
    assert_eq!(md.bilinear, md.bilinear.transpose().scale(&Q.from_i64(-1)));
    assert_eq!(md.bilinear.rank(), 2);

    let trace = m2.named_form("trace").unwrap();
    assert_eq!(most_degenerate(&m2.algebra, trace), Err(Error::FormNonVanishingOnUnit));
    let shifted = form_vanishing_on_unit(&m2.algebra, trace).unwrap();
    let md = most_degenerate(&m2.algebra, &shifted).unwrap();
    assert_eq!(md.graded_dims(), vec![1, 2, 1]);
}

#[test]
fn clifford_degenerates_to_exterior() {
    for b in [vec![vec![1, 0], vec![0, -1]], vec![vec![2, 1], vec![1, 3]]] {
        let cl = clifford(&Matrix::from_i64(Q, &b)).unwrap();
        let gr = associated_graded(&cl.algebra, &Filtration::by_prefix(&cl.algebra, &[1, 3, 4])).unwrap();
        assert_eq!(gr, exterior(Q, 2).unwrap().algebra);
    }
    let b3 = Matrix::from_i64(Q, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    let cl = clifford(&b3).unwrap();
    let gr = associated_graded(&cl.algebra, &Filtration::by_prefix(&cl.algebra, &[1, 4, 7, 8])).unwrap();
    assert_eq!(gr, exterior(Q, 3).unwrap().algebra);
}

#[test]
fn group_like_degenerates_to_truncated() {
    for n in 2..=5 {
        let g = group_like(Q, n).unwrap();
        let sizes: Vec<usize> = (1..=n).collect();
        let gr = associated_graded(&g.algebra, &Filtration::by_prefix(&g.algebra, &sizes)).unwrap();
        assert!(same_products(&gr, &truncated_poly(Q, n).unwrap().algebra), "n = {n}");
    }
}

#[test]
fn trivial_filtration_is_the_identity() {
    for s in [matrix_algebra(Q, 2).unwrap(), z_algebra(Q, 5).unwrap(), group_like(Q, 3).unwrap()] {
        let gr = associated_graded(&s.algebra, &Filtration::trivial(&s.algebra)).unwrap();
        assert!(same_products(&gr, &s.algebra));
    }
}

#[test]
fn xdeg_filtration_of_a_graded_algebra() {
    let s = truncated_poly(Q, 4).unwrap();
    let gr = associated_graded(&s.algebra, &Filtration::by_xdeg(&s.algebra, 2)).unwrap();
    assert!(same_products(&gr, &s.algebra));
}

#[test]
fn non_multiplicative_filtration() {
    let m2 = matrix_algebra(Q, 2).unwrap();
    let a = &m2.algebra;
    // F_0 = span{1, E12, E21} is not closed under products.
    let f = Filtration {
        steps: vec![vec![a.unit().to_vec(), a.basis_vec(1), a.basis_vec(2)], (0..4).map(|i| a.basis_vec(i)).collect()],
    };
    assert_eq!(associated_graded(a, &f), Err(Error::NotMultiplicative(0, 0)));
}

#[test]
fn malformed_filtrations() {
    let s = truncated_poly(Q, 3).unwrap();
    let a = &s.algebra;
    let short = Filtration::by_prefix(a, &[1, 2]);
    assert!(matches!(associated_graded(a, &short), Err(Error::UnsupportedParams(_))));
    let unnested = Filtration {
        steps: vec![vec![a.basis_vec(0)], vec![a.basis_vec(1), a.basis_vec(2)], (0..3).map(|i| a.basis_vec(i)).collect()],
    };
    assert!(matches!(associated_graded(a, &unnested), Err(Error::UnsupportedParams(_))));
    let no_unit = Filtration {
        steps: vec![vec![a.basis_vec(1)], (0..3).map(|i| a.basis_vec(i)).collect()],
    };
    assert!(matches!(associated_graded(a, &no_unit), Err(Error::UnsupportedParams(_))));
}

#[test]
fn diagonalization() {
    let h = Matrix::from_i64(Q, &[vec![0, 1], vec![1, 0]]);
    let d = diagonalize_symmetric(&h).unwrap();
    assert_eq!(d, vec![Q.from_i64(2), Q.ratio(-1, 2).unwrap()]);
    assert_eq!(diagonalize_symmetric(&Matrix::from_i64(Q, &[vec![0, 1], vec![-1, 0]])), None);
}

#[test]
fn fold_of_a3_is_flat_over_b2() {
    let left = folded_a_odd(Q, 2).unwrap();
    let rep = flatness_check(&left, &b_n(Q, 2), 12, SIGNED).unwrap();
    assert!(rep.flat, "{rep:?}");
    assert!(rep.is_monotone());
    let kk = k_to(Q, decoration("kk", sum_of_ground(Q, 2).unwrap())).unwrap();
    let rep = flatness_check(&kk, &k_to_truncated(Q, 2), 12, SIGNED).unwrap();
    assert!(rep.flat);
}

#[test]
fn identical_quivers_are_flat() {
    let g = k_to_truncated(Q, 3);
    let rep = flatness_check(&g, &g, 10, SIGNED).unwrap();
    assert!(rep.flat);
    let json = serde_json::to_string(&rep).unwrap();
    assert_eq!(json, r#"{"quiver":"2 vertices; 1->2","left":"k,S'","right":"k,S'","cutoff":10,"flat":true}"#);
}

#[test]
fn star_matches_z_per_degree() {
    for n in 2..=8 {
        let z = k_to(Q, decoration("Z", z_algebra(Q, n).unwrap())).unwrap();
        let rep = flatness_check_degrees(&star(Q, n), &z, 5, SIGNED).unwrap();
        assert!(rep.flat && rep.is_monotone(), "n = {n}: {rep:?}");
        let kn = k_to(Q, decoration("K", sum_of_ground(Q, n).unwrap())).unwrap();
        let rep = flatness_check(&kn, &z, 5, SIGNED).unwrap();
        assert!(rep.flat && rep.is_monotone(), "n = {n}: {rep:?}");
    }
}

#[test]
fn differences_and_violations_are_reported() {
    let z5 = k_to(Q, decoration("Z", z_algebra(Q, 5).unwrap())).unwrap();
    let rep = flatness_check_degrees(&star(Q, 4), &z5, 3, SIGNED).unwrap();
    assert!(!rep.flat);
    let d = rep.first_difference.clone().unwrap();
    assert_eq!((d.t, d.left_dim, d.right_dim), (0, 5, 6));
    assert_eq!(rep.violation, Some(d));
    let json = serde_json::to_value(&rep).unwrap();
    assert_eq!(json["first_difference"], serde_json::json!({"t": 0, "left_dim": 5, "right_dim": 6}));

    let rep = flatness_check_degrees(&z5, &star(Q, 4), 3, SIGNED).unwrap();
    assert!(!rep.flat && rep.is_monotone());
}

#[test]
fn shapes_must_match() {
    assert!(matches!(flatness_check(&a_n(Q, 2), &b_n(Q, 3), 5, SIGNED), Err(Error::NotComparable(_))));
    let s3 = k_to_truncated(Q, 3);
    assert!(matches!(flatness_check(&b_n(Q, 2), &s3, 5, SIGNED), Err(Error::NotComparable(_))));
    assert_eq!(match_shapes(&folded_a_odd(Q, 2).unwrap(), &b_n(Q, 2)), Some(vec![1, 0]));
}

fn ident_pair(name: &str, s: StandardAlgebra) -> DecoratedQuiver {
    assemble(vec![decoration(name, s)], &[0, 0], &[(0, 1, ArrowKind::Identification)]).unwrap()
}

#[test]
fn identification_pairs_are_flat() {
    let cases = [
        (ident_pair("kk", sum_of_ground(Q, 2).unwrap()), ident_pair("S", truncated_poly(Q, 2).unwrap())),
        (ident_pair("M", matrix_algebra(Q, 2).unwrap()), ident_pair("Z", z_algebra(Q, 4).unwrap())),
    ];
    for (l, r) in cases {
        let rep = flatness_check(&l, &r, 8, SIGNED).unwrap();
        assert!(rep.flat && rep.is_monotone(), "{rep:?}");
    }
}

fn random_form(dim: usize, coeffs: &[i64]) -> FrobeniusForm {
    FrobeniusForm::new(coeffs[..dim].iter().map(|&c| Q.from_i64(c)).collect())
}

fn test_algebras() -> Vec<StandardAlgebra> {
    vec![
        sum_of_ground(Q, 4).unwrap(),
        truncated_poly(Q, 3).unwrap(),
        z_algebra(Q, 4).unwrap(),
        matrix_algebra(Q, 2).unwrap(),
        group_like(Q, 3).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vanishing_forms_and_degenerations_validate(which in 0usize..5, coeffs in proptest::collection::vec(-3i64..=3, 4)) {
        let s = &test_algebras()[which];
        let a = &s.algebra;
        let form = random_form(a.dim(), &coeffs);
        prop_assume!(validate_frobenius(a, &form).nondegenerate);
        let g = form_vanishing_on_unit(a, &form).unwrap();
        prop_assert!(g.eval(a.unit()).is_zero());
        prop_assert!(validate_frobenius(a, &g).nondegenerate);
        let md = most_degenerate(a, &g).unwrap();
        prop_assert_eq!(md.algebra.dim(), a.dim());
        prop_assert_eq!(md.graded_dims(), vec![1, a.dim() - 2, 1]);
        prop_assert!(validate_frobenius(&md.algebra, &md.form).nondegenerate);
        prop_assert_eq!(md.bilinear.rank(), a.dim() - 2);
    }

    #[test]
    fn associated_graded_keeps_dimension(which in 0usize..5, cut in 1usize..4) {
        let s = &test_algebras()[which];
        let a = &s.algebra;
        let sizes: Vec<usize> = (1..=a.dim()).collect();
        let filt = Filtration::by_prefix(a, &sizes[..]);
        if let Ok(gr) = associated_graded(a, &filt) {
            prop_assert_eq!(gr.dim(), a.dim());
        }
        let coarse = Filtration::by_prefix(a, &[1, cut.min(a.dim()), a.dim()]);
        if let Ok(gr) = associated_graded(a, &coarse) {
            prop_assert_eq!(gr.hilbert().values().sum::<i64>(), a.dim() as i64);
        }
    }
}
