use preproj_core::families::*;
use preproj_core::standard::{sum_of_ground, truncated_poly};
use preproj_core::tensor::*;
use preproj_core::{DecoratedQuiver, Field};
use proptest::prelude::*;

const Q: Field = Field::Rational;

#[test]
fn bimodule_tensor_examples() {
    let s = truncated_poly(Q, 2).unwrap().algebra;
    let ss = bimodule_tensor_basis(&regular_module(&s, true), &regular_module(&s, false)).unwrap();
    assert_eq!(ss.dim(), 2);

    // S ⊗_k S: both sides viewed over the ground field.
    let as_k = |dim: usize| ModuleDesc {
        dim,
        action: vec![preproj_core::linalg::Matrix::identity(Q, dim)],
    };
    assert_eq!(bimodule_tensor_basis(&as_k(2), &as_k(2)).unwrap().dim(), 4);

    let kk = sum_of_ground(Q, 2).unwrap().algebra;
    let t = bimodule_tensor_basis(&regular_module(&kk, true), &regular_module(&kk, false)).unwrap();
    assert_eq!(t.dim(), 2);
}

#[test]
fn action_mismatch() {
    let s = truncated_poly(Q, 2).unwrap().algebra;
    let s3 = truncated_poly(Q, 3).unwrap().algebra;
    let r = bimodule_tensor_basis(&regular_module(&s, true), &regular_module(&s3, false));
    assert!(matches!(r, Err(preproj_core::Error::ActionMismatch(_))));
}

#[test]
fn b2_low_degree_pieces() {
    let dq = b_n(Q, 2);
    let p0 = graded_piece(&dq, 0);
    assert_eq!(p0.dims(2), vec![vec![1, 0], vec![0, 2]]);
    assert_eq!(p0.dim(), 3);
    let p1 = graded_piece(&dq, 1);
    assert_eq!(p1.dims(2), vec![vec![0, 2], vec![2, 0]]);
}

fn corpus() -> Vec<DecoratedQuiver> {
    vec![
        b_n(Q, 2),
        b_n(Q, 3),
        g2(Q),
        f4(Q),
        c_n(Q, 3),
        folded_a_odd(Q, 2).unwrap(),
        jordan(Q),
        d4(Q).0,
        star(Q, 4),
    ]
}

#[test]
fn degree_one_is_the_arrow_bimodules() {
    for dq in corpus() {
        let d = dq.double();
        let total: usize = (0..d.arrows().len()).map(|a| d.bimodule_dim(a)).sum();
        assert_eq!(graded_piece(&dq, 1).dim(), total);
    }
}

#[test]
fn constant_k_pieces_count_paths() {
    for dq in [a_n(Q, 4), d4(Q).0, jordan(Q), star(Q, 4), e6(Q).0] {
        for n in 0..=6 {
            let p = graded_piece(&dq, n);
            let counts = path_counts(&dq, n);
            assert_eq!(p.dims(dq.num_vertices()), counts);
        }
    }
}

#[test]
fn degree_two_matches_bimodule_tensor_products() {
    for dq in corpus() {
        let d = dq.double();
        let p2 = graded_piece(&dq, 2);
        for (a, arr) in d.arrows().iter().enumerate() {
            for (b, brr) in d.arrows().iter().enumerate() {
                if arr.target != brr.source {
                    continue;
                }
                let m = arrow_module(&d, a, true);
                let n = arrow_module(&d, b, false);
                let expected = bimodule_tensor_basis(&m, &n).unwrap().dim();
                let found = p2.words.iter().filter(|w| w.arrows == vec![a, b]).count();
                assert_eq!(found, expected, "arrows {} {}", arr.id, brr.id);
            }
        }
    }
}

#[test]
fn bidims_refine_dims() {
    for dq in corpus() {
        for n in 0..=4 {
            let p = graded_piece(&dq, n);
            let dims = p.dims(dq.num_vertices());
            for ((i, j), m) in p.bidims() {
                assert_eq!(m.values().sum::<usize>(), dims[i][j]);
            }
        }
    }
}

#[test]
fn multiplication_examples() {
    let dq = b_n(Q, 2);
    let d = dq.double();
    let p0 = graded_piece(&dq, 0);
    let p1 = graded_piece(&dq, 1);
    let p2 = graded_piece(&dq, 2);
    // Left unit action: T^0 · T^1 spans T^1.
    let mut rank = 0;
    for i in 0..2 {
        for j in 0..2 {
            let m = multiplication_matrix(&dq, &p0, (i, i), &p1, (i, j), &p1);
            rank += m.rank();
        }
    }
    assert_eq!(rank, p1.dim());
    // (1 ⊗_S 1) · x = 1 ⊗_S x.
    let one_s_one = PathWord {
        source: 0,
        arrows: vec![0, 1],
        slots: vec![0, 0, 0],
    };
    let u = PathWord {
        source: 0,
        arrows: vec![0],
        slots: vec![0, 0],
    };
    let xs = PathWord {
        source: 1,
        arrows: vec![1],
        slots: vec![1, 0],
    };
    let prod = word_product(&d, &u, &xs);
    let expected = PathWord {
        source: 0,
        arrows: vec![0, 1],
        slots: vec![0, 1, 0],
    };
    assert_eq!(prod.len(), 1);
    assert!(prod.contains_key(&expected));
    assert!(p2.index_of(&one_s_one).is_some());
    // Mismatched middle vertices.
    let m = multiplication_matrix(&dq, &p1, (0, 1), &p1, (0, 1), &p2);
    assert!(m.is_zero());
}

#[test]
fn dump_lists_one_word_per_line() {
    let dq = b_n(Q, 2);
    let p = graded_piece(&dq, 1);
    let text = p.dump(&dq.double());
    assert_eq!(text.lines().count(), p.dim());
    assert!(text.contains("a1*"));
}

fn elem_of(p: &GradedPiece, coeffs: &[i64]) -> TElem {
    let mut e = TElem::new();
    for (w, &c) in p.words.iter().zip(coeffs) {
        telem_add(&mut e, w.clone(), Q.from_i64(c));
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn multiplication_is_associative(
        idx in 0usize..9,
        a in 0usize..3, b in 0usize..3, c in 0usize..3,
        coeffs in proptest::collection::vec(-3i64..=3, 3 * 64),
    ) {
        let dq = corpus().swap_remove(idx);
        let d = dq.double();
        let (pa, pb, pc) = (graded_piece(&dq, a), graded_piece(&dq, b), graded_piece(&dq, c));
        let take = |p: &GradedPiece, k: usize| -> Vec<i64> {
            (0..p.dim()).map(|i| coeffs[(k * 64 + i) % coeffs.len()]).collect()
        };
        let u = elem_of(&pa, &take(&pa, 0));
        let v = elem_of(&pb, &take(&pb, 1));
        let w = elem_of(&pc, &take(&pc, 2));
        let left = telem_product(&d, &telem_product(&d, &u, &v), &w);
        let right = telem_product(&d, &u, &telem_product(&d, &v, &w));
        prop_assert_eq!(left, right);
    }
}
