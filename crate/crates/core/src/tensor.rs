//! Graded pieces of the tensor algebra of a doubled decorated quiver.
//!
//! A basis vector of `M^{α_1} ⊗_A ⋯ ⊗_A M^{α_n}` is a [`PathWord`]: the
//! arrows plus one algebra basis index per segment, where segments are cut
//! at tensor arrows. Along an identification arrow the two neighbouring
//! algebra factors coincide, so the whole run carries a single slot.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, Matrix, SparseAcc, SparseVec};
use crate::quiver::{ArrowKind, DecoratedQuiver};
use crate::scalar::Scalar;

/// A basis monomial of the tensor algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathWord {
    pub source: usize,
    pub arrows: Vec<usize>,
    /// One basis index per segment.
    pub slots: Vec<usize>,
}

/// A finite linear combination of path words.
pub type TElem = BTreeMap<PathWord, Scalar>;

pub fn telem_add(e: &mut TElem, w: PathWord, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match e.get_mut(&w) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                e.remove(&w);
            }
        }
        None => {
            e.insert(w, c);
        }
    }
}

impl PathWord {
    /// The degree-zero word `e_slot` at a vertex.
    pub fn trivial(source: usize, slot: usize) -> PathWord {
        PathWord {
            source,
            arrows: Vec::new(),
            slots: vec![slot],
        }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn target(&self, dq: &DecoratedQuiver) -> usize {
        self.arrows.last().map_or(self.source, |&a| dq.arrows()[a].target)
    }

    /// Vertex whose algebra carries each slot.
    pub fn slot_vertices(&self, dq: &DecoratedQuiver) -> Vec<usize> {
        let mut out = vec![self.source];
        for &a in &self.arrows {
            let arr = &dq.arrows()[a];
            if arr.kind == ArrowKind::TensorUnit {
                out.push(arr.target);
            }
        }
        out
    }

    /// Sum of slot x-degrees and arrow weights, in half-units.
    pub fn xdeg(&self, dq: &DecoratedQuiver) -> i64 {
        let sv = self.slot_vertices(dq);
        let slots: i64 = sv.iter().zip(&self.slots).map(|(&v, &s)| dq.algebra(v).xdeg(s)).sum();
        slots + self.arrows.iter().map(|&a| dq.arrows()[a].xweight).sum::<i64>()
    }

    /// Checks composability and slot ranges.
    pub fn is_valid(&self, dq: &DecoratedQuiver) -> bool {
        let mut v = self.source;
        for &a in &self.arrows {
            match dq.arrows().get(a) {
                Some(arr) if arr.source == v => v = arr.target,
                _ => return false,
            }
        }
        let sv = self.slot_vertices(dq);
        sv.len() == self.slots.len() && sv.iter().zip(&self.slots).all(|(&v, &s)| s < dq.algebra(v).dim())
    }

    /// Human-readable form: arrows interleaved with slot labels, each slot
    /// written at the end of its segment.
    pub fn render(&self, dq: &DecoratedQuiver) -> String {
        let sv = self.slot_vertices(dq);
        let label = |seg: usize| format!("[{}]", dq.algebra(sv[seg]).label(self.slots[seg]));
        let mut tokens = Vec::new();
        let mut seg = 0;
        for &a in &self.arrows {
            let arr = &dq.arrows()[a];
            if arr.kind == ArrowKind::TensorUnit {
                tokens.push(label(seg));
                seg += 1;
            }
            tokens.push(arr.id.clone());
        }
        tokens.push(label(seg));
        tokens.join(" ")
    }
}

/// Product of two words: concatenation, merging the junction slots.
pub fn word_product(dq: &DecoratedQuiver, u: &PathWord, w: &PathWord) -> TElem {
    let mut out = TElem::new();
    let v = u.target(dq);
    if v != w.source {
        return out;
    }
    let alg = dq.algebra(v);
    let p = *u.slots.last().expect("words have a slot");
    let q = w.slots[0];
    for (k, c) in alg.basis_product(p, q) {
        let mut arrows = u.arrows.clone();
        arrows.extend_from_slice(&w.arrows);
        let mut slots = u.slots[..u.slots.len() - 1].to_vec();
        slots.push(*k);
        slots.extend_from_slice(&w.slots[1..]);
        out.insert(
            PathWord {
                source: u.source,
                arrows,
                slots,
            },
            c.clone(),
        );
    }
    out
}

/// Product of two linear combinations.
pub fn telem_product(dq: &DecoratedQuiver, a: &TElem, b: &TElem) -> TElem {
    let mut out = TElem::new();
    for (u, x) in a {
        for (w, y) in b {
            let xy = x * y;
            for (z, c) in word_product(dq, u, w) {
                telem_add(&mut out, z, &xy * &c);
            }
        }
    }
    out
}

/// One graded piece `T^n` with an explicit basis.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub degree: usize,
    pub words: Vec<PathWord>,
    index: HashMap<PathWord, usize>,
    /// Word indices per (source, target) block.
    pub blocks: BTreeMap<(usize, usize), Vec<usize>>,
    /// x-degree of each word, in half-units.
    pub xdegs: Vec<i64>,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn index_of(&self, w: &PathWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Block dimensions as a vertex-by-vertex matrix.
    pub fn dims(&self, nv: usize) -> Vec<Vec<usize>> {
        let mut d = vec![vec![0; nv]; nv];
        for (&(i, j), ws) in &self.blocks {
            d[i][j] = ws.len();
        }
        d
    }

    /// Per block, x-degree to dimension.
    pub fn bidims(&self) -> BTreeMap<(usize, usize), BTreeMap<i64, usize>> {
        let mut out = BTreeMap::new();
        for (&b, ws) in &self.blocks {
            let m: &mut BTreeMap<i64, usize> = out.entry(b).or_default();
            for &w in ws {
                *m.entry(self.xdegs[w]).or_default() += 1;
            }
        }
        out
    }

    /// Coordinates of an element supported in this piece.
    pub fn coords(&self, e: &TElem) -> SparseVec {
        let mut acc = SparseAcc::new();
        for (w, c) in e {
            let i = self.index_of(w).expect("word belongs to this piece");
            acc.add(i, c);
        }
        acc.into_vec()
    }

    /// Debug dump, one word per line.
    pub fn dump(&self, dq: &DecoratedQuiver) -> String {
        let mut s = String::new();
        for (i, w) in self.words.iter().enumerate() {
            let _ = writeln!(s, "{i}: {}", w.render(dq));
        }
        s
    }
}

fn arrow_paths(dq: &DecoratedQuiver, n: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    let mut out_arrows = vec![Vec::new(); dq.num_vertices()];
    for (k, a) in dq.arrows().iter().enumerate() {
        out_arrows[a.source].push(k);
    }
    fn rec(dq: &DecoratedQuiver, outs: &[Vec<usize>], v: usize, left: usize, cur: &mut Vec<usize>, src: usize, out: &mut Vec<(usize, Vec<usize>)>) {
        if left == 0 {
            out.push((src, cur.clone()));
            return;
        }
        for &a in &outs[v] {
            cur.push(a);
            rec(dq, outs, dq.arrows()[a].target, left - 1, cur, src, out);
            cur.pop();
        }
    }
    for v in 0..dq.num_vertices() {
        rec(dq, &out_arrows, v, n, &mut Vec::new(), v, &mut out);
    }
    out
}

/// Degree-`n` piece of the tensor algebra of the double of `dq`.
pub fn graded_piece(dq: &DecoratedQuiver, n: usize) -> GradedPiece {
    let d = dq.double();
    let mut words = Vec::new();
    for (src, arrows) in arrow_paths(&d, n) {
        let proto = PathWord {
            source: src,
            arrows,
            slots: Vec::new(),
        };
        let dims: Vec<usize> = proto.slot_vertices(&d).iter().map(|&v| d.algebra(v).dim()).collect();
        let mut slots = vec![0; dims.len()];
        'combos: loop {
            words.push(PathWord {
                slots: slots.clone(),
                ..proto.clone()
            });
            for k in (0..dims.len()).rev() {
                slots[k] += 1;
                if slots[k] < dims[k] {
                    continue 'combos;
                }
                slots[k] = 0;
            }
            break;
        }
    }
    words.sort();
    let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut blocks: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, w) in words.iter().enumerate() {
        blocks.entry((w.source, w.target(&d))).or_default().push(i);
    }
    let xdegs = words.iter().map(|w| w.xdeg(&d)).collect();
    GradedPiece {
        degree: n,
        words,
        index,
        blocks,
        xdegs,
    }
}

/// A module over an algebra `B`, given by the action matrix of each basis
/// element of `B`.
#[derive(Clone, Debug)]
pub struct ModuleDesc {
    pub dim: usize,
    pub action: Vec<Matrix>,
}

/// Basis of `M ⊗_B N` as classes of pure tensors `m_i ⊗ n_j`.
#[derive(Clone, Debug)]
pub struct TensorBasis {
    pub basis: Vec<(usize, usize)>,
    /// Row-reduced relations `m·b ⊗ n − m ⊗ b·n` in coordinates `i * dim N + j`.
    pub relations: Echelon,
}

impl TensorBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Computes `(M ⊗_k N) / span{m·b ⊗ n − m ⊗ b·n}`.
///
/// `m` carries the right action and `n` the left action of the same algebra.
pub fn bimodule_tensor_basis(m: &ModuleDesc, n: &ModuleDesc) -> Result<TensorBasis> {
    if m.action.len() != n.action.len() {
        return Err(Error::ActionMismatch(format!(
            "right action has {} generators, left action has {}",
            m.action.len(),
            n.action.len()
        )));
    }
    for (x, d) in [(m, m.dim), (n, n.dim)] {
        if x.action.iter().any(|a| a.rows() != d || a.cols() != d) {
            return Err(Error::ActionMismatch("action matrix has the wrong shape".into()));
        }
    }
    let nd = n.dim;
    let mut ech = Echelon::new();
    for (rb, lb) in m.action.iter().zip(&n.action) {
        for i in 0..m.dim {
            for j in 0..nd {
                let mut acc = SparseAcc::new();
                for k in 0..m.dim {
                    acc.add(k * nd + j, rb.get(k, i));
                }
                for k in 0..nd {
                    acc.add(i * nd + k, &-lb.get(k, j));
                }
                ech.insert(&acc.into_vec());
            }
        }
    }
    let basis = (0..m.dim * nd).filter(|c| !ech.is_pivot(*c)).map(|c| (c / nd, c % nd)).collect();
    Ok(TensorBasis { basis, relations: ech })
}

/// The regular module of an algebra: right action if `right`, else left.
pub fn regular_module(a: &crate::algebra::FiniteDimAlgebra, right: bool) -> ModuleDesc {
    ModuleDesc {
        dim: a.dim(),
        action: (0..a.dim())
            .map(|b| {
                let v = a.basis_vec(b);
                if right {
                    a.right_mult_matrix(&v)
                } else {
                    a.left_mult_matrix(&v)
                }
            })
            .collect(),
    }
}

/// The bimodule of an arrow viewed as a right module over its target
/// algebra (`right`) or a left module over its source algebra.
pub fn arrow_module(dq: &DecoratedQuiver, arrow: usize, right: bool) -> ModuleDesc {
    let a = &dq.arrows()[arrow];
    let (s, t) = (dq.algebra(a.source), dq.algebra(a.target));
    match a.kind {
        ArrowKind::Identification => regular_module(s, right),
        ArrowKind::TensorUnit => {
            // Basis e_p ⊗ e_q with index p * dim t + q.
            let (ds, dt) = (s.dim(), t.dim());
            let f = s.field();
            let acting = if right { t } else { s };
            let action = (0..acting.dim())
                .map(|b| {
                    let mut mtx = Matrix::zeros(f, ds * dt, ds * dt);
                    for p in 0..ds {
                        for q in 0..dt {
                            if right {
                                for (k, c) in t.basis_product(q, b) {
                                    mtx.set(p * dt + k, p * dt + q, c.clone());
                                }
                            } else {
                                for (k, c) in s.basis_product(b, p) {
                                    mtx.set(k * dt + q, p * dt + q, c.clone());
                                }
                            }
                        }
                    }
                    mtx
                })
                .collect();
            ModuleDesc { dim: ds * dt, action }
        }
    }
}

/// Matrix of the product from block `ba` of `pa` times block `bb` of `pb`
/// into `pc`. Columns are pairs `(u, w)` in row-major order, rows are the
/// words of `pc` in the block `(ba.0, bb.1)`. Mismatched middle vertices give
/// the zero map.
pub fn multiplication_matrix(
    dq: &DecoratedQuiver,
    pa: &GradedPiece,
    ba: (usize, usize),
    pb: &GradedPiece,
    bb: (usize, usize),
    pc: &GradedPiece,
) -> Matrix {
    let d = dq.double();
    let f = d.field();
    let empty = Vec::new();
    let ua = pa.blocks.get(&ba).unwrap_or(&empty);
    let wb = pb.blocks.get(&bb).unwrap_or(&empty);
    let rows = pc.blocks.get(&(ba.0, bb.1)).unwrap_or(&empty);
    let row_of: HashMap<usize, usize> = rows.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut m = Matrix::zeros(f, rows.len(), ua.len() * wb.len());
    if ba.1 != bb.0 {
        return m;
    }
    for (x, &u) in ua.iter().enumerate() {
        for (y, &w) in wb.iter().enumerate() {
            for (z, c) in word_product(&d, &pa.words[u], &pb.words[w]) {
                let i = pc.index_of(&z).expect("product lies in the target piece");
                m.set(row_of[&i], x * wb.len() + y, c);
            }
        }
    }
    m
}

/// Number of arrow paths of length `n` from `i` to `j` in the double.
pub fn path_counts(dq: &DecoratedQuiver, n: usize) -> Vec<Vec<usize>> {
    let d = dq.double();
    let nv = d.num_vertices();
    let mut c = vec![vec![0; nv]; nv];
    for (src, arrows) in arrow_paths(&d, n) {
        let t = arrows.last().map_or(src, |&a| d.arrows()[a].target);
        c[src][t] += 1;
    }
    c
}
