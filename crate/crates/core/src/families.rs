//! Decorated quivers used throughout the tests, benchmarks and CLI suites.
//!
//! Vertices are named `1..n`. Constant-`k` arrows are identifications of `k`
//! with itself, which coincide with tensor arrows `k ⊗ k`.

use crate::error::Result;
use crate::quiver::{fold, ArrowKind, ArrowSpec, Automorphism, Decoration, DecoratedQuiver};
use crate::scalar::Field;
use crate::standard::{ground, truncated_poly, StandardAlgebra};

use ArrowKind::{Identification as Id, TensorUnit as Tu};

fn dec(name: &str, s: StandardAlgebra) -> Decoration {
    let form = s.form().clone();
    Decoration::new(name, s.algebra, form)
}

fn vid(i: usize) -> String {
    (i + 1).to_string()
}

/// Builds a quiver from per-vertex decoration indices and `(source, target,
/// kind)` arrows with 0-based vertex indices; arrows are named `a1, a2, ...`.
pub fn assemble(decorations: Vec<Decoration>, vertex_decs: &[usize], arrows: &[(usize, usize, ArrowKind)]) -> Result<DecoratedQuiver> {
    let vertices = vertex_decs.iter().enumerate().map(|(i, &d)| (vid(i), d)).collect();
    let arrows = arrows
        .iter()
        .enumerate()
        .map(|(k, &(s, t, kind))| ArrowSpec::new(&format!("a{}", k + 1), &vid(s), &vid(t), kind))
        .collect();
    DecoratedQuiver::build(decorations, vertices, arrows)
}

fn k_and_s(field: Field, s_dim: usize) -> Vec<Decoration> {
    vec![
        dec("k", ground(field)),
        dec(if s_dim == 2 { "S" } else { "S'" }, truncated_poly(field, s_dim).expect("valid")),
    ]
}

/// A single vertex decorated by `k`.
pub fn single_vertex(field: Field) -> DecoratedQuiver {
    assemble(vec![dec("k", ground(field))], &[0], &[]).expect("valid")
}

/// A single vertex decorated by an arbitrary algebra.
pub fn single_decorated(d: Decoration) -> Result<DecoratedQuiver> {
    assemble(vec![d], &[0], &[])
}

/// `k → S` for `B_2`, `k → S_3` style for `G_2`: vertex 1 is `k`, vertex 2 is
/// `k[x]/(x^m)`, one tensor arrow.
pub fn k_to_truncated(field: Field, m: usize) -> DecoratedQuiver {
    assemble(k_and_s(field, m), &[0, 1], &[(0, 1, Tu)]).expect("valid")
}

/// `G_2`: `k → k[x]/(x^3)`.
pub fn g2(field: Field) -> DecoratedQuiver {
    k_to_truncated(field, 3)
}

/// `B_n`: `k → S - S - ⋯ - S`, tensor arrow first, identifications after.
pub fn b_n(field: Field, n: usize) -> DecoratedQuiver {
    assert!(n >= 2);
    let mut vd = vec![0];
    vd.extend(std::iter::repeat_n(1, n - 1));
    let mut arrows = vec![(0, 1, Tu)];
    arrows.extend((1..n - 1).map(|i| (i, i + 1, Id)));
    assemble(k_and_s(field, 2), &vd, &arrows).expect("valid")
}

/// `C_n`: `k - ⋯ - k → S`, identifications between the `k` vertices and a
/// tensor arrow into `S`.
pub fn c_n(field: Field, n: usize) -> DecoratedQuiver {
    assert!(n >= 2);
    let mut vd = vec![0; n - 1];
    vd.push(1);
    let mut arrows: Vec<_> = (0..n - 2).map(|i| (i, i + 1, Id)).collect();
    arrows.push((n - 2, n - 1, Tu));
    assemble(k_and_s(field, 2), &vd, &arrows).expect("valid")
}

/// `F_4`: `k - k → S - S`.
pub fn f4(field: Field) -> DecoratedQuiver {
    assemble(k_and_s(field, 2), &[0, 0, 1, 1], &[(0, 1, Id), (1, 2, Tu), (2, 3, Id)]).expect("valid")
}

/// Constant-`k` linear `A_n`, arrows `i → i+1`.
pub fn a_n(field: Field, n: usize) -> DecoratedQuiver {
    let arrows: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1, Id)).collect();
    assemble(vec![dec("k", ground(field))], &vec![0; n], &arrows).expect("valid")
}

/// Constant-`k` `A_{2n-1}` oriented away from the middle vertex `n`, with the
/// reflection swapping the two arms.
pub fn a_odd_centered(field: Field, n: usize) -> (DecoratedQuiver, Automorphism) {
    assert!(n >= 1);
    let m = 2 * n - 1;
    let c = n - 1;
    let mut arrows = Vec::new();
    for i in (1..n).rev() {
        arrows.push((i, i - 1, Id));
    }
    for i in c..m - 1 {
        arrows.push((i, i + 1, Id));
    }
    let dq = assemble(vec![dec("k", ground(field))], &vec![0; m], &arrows).expect("valid");
    let vertices = (0..m).map(|v| m - 1 - v).collect();
    // Arrow k on the left arm (from c-k to c-k-1) mirrors arrow k on the right.
    let arms = n - 1;
    let arrows = (0..2 * arms).map(|k| if k < arms { k + arms } else { k - arms }).collect();
    (dq, Automorphism { vertices, arrows })
}

/// Constant-`k` `D_4` with arrows from the centre (vertex 1) to the three
/// outer vertices, and generators of the symmetric group on the outer ones.
pub fn d4(field: Field) -> (DecoratedQuiver, Vec<Automorphism>) {
    let dq = assemble(vec![dec("k", ground(field))], &[0, 0, 0, 0], &[(0, 1, Id), (0, 2, Id), (0, 3, Id)]).expect("valid");
    let g1 = Automorphism {
        vertices: vec![0, 2, 1, 3],
        arrows: vec![1, 0, 2],
    };
    let g2 = Automorphism {
        vertices: vec![0, 2, 3, 1],
        arrows: vec![1, 2, 0],
    };
    (dq, vec![g1, g2])
}

/// Constant-`k` `E_6`: chain `1-2-3-4-5` with vertex 6 on vertex 3, oriented
/// `6→3`, `3→2→1`, `3→4→5`, with the diagram reflection.
pub fn e6(field: Field) -> (DecoratedQuiver, Automorphism) {
    let dq = assemble(
        vec![dec("k", ground(field))],
        &[0; 6],
        &[(5, 2, Id), (2, 1, Id), (1, 0, Id), (2, 3, Id), (3, 4, Id)],
    )
    .expect("valid");
    let g = Automorphism {
        vertices: vec![4, 3, 2, 1, 0, 5],
        arrows: vec![0, 3, 4, 1, 2],
    };
    (dq, g)
}

/// Constant-`k` star with `n` outer vertices `2..=n+1` pointing into vertex 1.
pub fn star(field: Field, n: usize) -> DecoratedQuiver {
    let arrows: Vec<_> = (1..=n).map(|i| (i, 0, Id)).collect();
    assemble(vec![dec("k", ground(field))], &vec![0; n + 1], &arrows).expect("valid")
}

/// Constant-`k` Jordan quiver: one vertex with a loop.
pub fn jordan(field: Field) -> DecoratedQuiver {
    assemble(vec![dec("k", ground(field))], &[0], &[(0, 0, Id)]).expect("valid")
}

/// `k → A` with a tensor arrow.
pub fn k_to(field: Field, a: Decoration) -> Result<DecoratedQuiver> {
    assemble(vec![dec("k", ground(field)), a], &[0, 1], &[(0, 1, Tu)])
}

/// `A → k` with a tensor arrow.
pub fn to_k(field: Field, a: Decoration) -> Result<DecoratedQuiver> {
    assemble(vec![a, dec("k", ground(field))], &[0, 1], &[(0, 1, Tu)])
}

/// `A → A` with an identification arrow.
pub fn self_identification(a: Decoration) -> Result<DecoratedQuiver> {
    assemble(vec![a], &[0, 0], &[(0, 1, Id)])
}

/// `A_{2n-1}` folded by its reflection: `k → k⊕k - ⋯ - k⊕k`.
pub fn folded_a_odd(field: Field, n: usize) -> Result<DecoratedQuiver> {
    let (dq, g) = a_odd_centered(field, n);
    fold(&dq, &[g])
}

/// Decoration helper for callers outside this module.
pub fn decoration(name: &str, s: StandardAlgebra) -> Decoration {
    dec(name, s)
}

/// Decoration with a named (non-canonical) form of a standard algebra.
pub fn decoration_with(name: &str, s: &StandardAlgebra, form: &str) -> Option<Decoration> {
    s.named_form(form).map(|f| Decoration::new(name, s.algebra.clone(), f.clone()))
}
