//! The preprojective relation `r` and the graded quotient `Π = T / (r)`.
//!
//! `Π` is built degree by degree: `Π^n` is the quotient of
//! `Π^{n-1} ⊗_{T^0} T^1` by the image of `Π^{n-2} · r`. A basis of
//! `Π^{n-1} ⊗_{T^0} T^1` is indexed by candidates `(s, α, q)` where `s` is a
//! standard word of degree `n-1`, `α` an arrow out of its target and `q` a
//! basis index of the target algebra (tensor arrows only). The standard words
//! of degree `n` are the candidates that are not pivots of the row-reduced
//! relations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::algebra::{frobenius_dual_basis, validate_frobenius};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, Matrix, SparseAcc, SparseVec};
use crate::quiver::{ArrowKind, DecoratedQuiver, Role};
use crate::series::HilbertSeries;
use crate::tensor::{graded_piece, telem_add, telem_product, GradedPiece, PathWord, TElem};

/// Sign of the second summand of each arrow's contribution to `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignConvention {
    Signed,
    AllPlus,
}

/// The components `e_i r` as elements of `T^2` of the doubled quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationElement {
    pub convention: SignConvention,
    pub components: Vec<TElem>,
}

impl RelationElement {
    /// The sum `r = Σ_i e_i r`.
    pub fn total(&self) -> TElem {
        let mut out = TElem::new();
        for c in &self.components {
            for (w, x) in c {
                telem_add(&mut out, w.clone(), x.clone());
            }
        }
        out
    }
}

/// Builds `r` over the double of `dq`; words index arrows of `dq.double()`.
pub fn relation_element(dq: &DecoratedQuiver, convention: SignConvention) -> Result<RelationElement> {
    let d = dq.double();
    let f = d.field();
    let sign = match convention {
        SignConvention::Signed => f.from_i64(-1),
        SignConvention::AllPlus => f.one(),
    };
    let mut duals = Vec::new();
    for v in 0..d.num_vertices() {
        duals.push(frobenius_dual_basis(d.algebra(v), d.form(v))?);
    }
    let mut comps = vec![TElem::new(); d.num_vertices()];
    for (k, a) in d.arrows().iter().enumerate() {
        if a.role != Role::Positive {
            continue;
        }
        let ks = d.dual_arrow(k);
        let (i, j) = (a.source, a.target);
        match a.kind {
            ArrowKind::TensorUnit => {
                // Σ_l e_l ⊗ 1 ⊗ f_l on α α* at i, and on α* α at j.
                for (v, other, first, second, c) in [(i, j, k, ks, f.one()), (j, i, ks, k, sign.clone())] {
                    let unit = d.algebra(other).unit_sparse();
                    for (l, fl) in duals[v].iter().enumerate() {
                        for (p, fp) in fl.iter().enumerate() {
                            if fp.is_zero() {
                                continue;
                            }
                            for (u, cu) in &unit {
                                let w = PathWord {
                                    source: v,
                                    arrows: vec![first, second],
                                    slots: vec![l, *u, p],
                                };
                                telem_add(&mut comps[v], w, &(&c * fp) * cu);
                            }
                        }
                    }
                }
            }
            ArrowKind::Identification => {
                for (v, first, second, c) in [(i, k, ks, f.one()), (j, ks, k, sign.clone())] {
                    for (u, cu) in d.algebra(v).unit_sparse() {
                        let w = PathWord {
                            source: v,
                            arrows: vec![first, second],
                            slots: vec![u],
                        };
                        telem_add(&mut comps[v], w, &c * &cu);
                    }
                }
            }
        }
    }
    Ok(RelationElement {
        convention,
        components: comps,
    })
}

/// Row-reduced basis of the degree-`n` part of the ideal `(r)` inside the
/// explicit piece `T^n`, spanned by all `u · e_v r · w`.
pub fn ideal_degree_span(dq: &DecoratedQuiver, r: &RelationElement, n: usize) -> (GradedPiece, Echelon) {
    let d = dq.double();
    let piece = graded_piece(&d, n);
    let mut ech = Echelon::new();
    if n < 2 {
        return (piece, ech);
    }
    for a in 0..=n - 2 {
        let left = graded_piece(&d, a);
        let right = graded_piece(&d, n - 2 - a);
        for u in &left.words {
            let v = u.target(&d);
            let comp = &r.components[v];
            if comp.is_empty() {
                continue;
            }
            let ue = TElem::from([(u.clone(), d.field().one())]);
            let ur = telem_product(&d, &ue, comp);
            for w in &right.words {
                if w.source != v {
                    continue;
                }
                let we = TElem::from([(w.clone(), d.field().one())]);
                let x = telem_product(&d, &ur, &we);
                ech.insert(&piece.coords(&x));
            }
        }
    }
    (piece, ech)
}

/// Series of `T/(r)` through degree `max_n`, computed from explicit spans.
pub fn explicit_series(dq: &DecoratedQuiver, convention: SignConvention, max_n: usize) -> Result<HilbertSeries> {
    let d = dq.double();
    let r = relation_element(&d, convention)?;
    let mut h = HilbertSeries::new(d.vertices().iter().map(|v| v.id.clone()).collect(), max_n, false);
    for n in 0..=max_n {
        let (piece, ech) = ideal_degree_span(&d, &r, n);
        for (&(i, j), ws) in &piece.blocks {
            for &w in ws {
                h.add(n, piece.xdegs[w], i, j, 1);
            }
        }
        // Remove one basis word per pivot, at the pivot's bidegree.
        for p in ech.pivots() {
            let w = &piece.words[p];
            h.add(n, piece.xdegs[p], w.source, w.target(&d), -1);
        }
    }
    Ok(h)
}

const NONE: u32 = u32::MAX;

/// A standard word of some degree.
#[derive(Clone, Debug)]
pub struct StdWord {
    pub source: usize,
    pub target: usize,
    pub xdeg: i64,
    /// Standard word of the previous degree it extends.
    pub parent: u32,
    pub arrow: u32,
    /// Basis index of the new slot for tensor arrows.
    pub slot: u32,
    pub word: PathWord,
}

#[derive(Clone, Debug, Default)]
struct Level {
    std: Vec<StdWord>,
    /// First candidate index of each standard word of the previous degree.
    cand_offset: Vec<usize>,
    /// Each candidate expressed in standard words of this degree.
    cand_to_std: Vec<SparseVec>,
    /// `right_mult[s][b]` is `s · e_b` for `b` in the target algebra.
    right_mult: Vec<Vec<SparseVec>>,
}

/// The graded algebra `Π` computed degree by degree up to a cutoff.
#[derive(Clone, Debug)]
pub struct PiAlgebra {
    dq: DecoratedQuiver,
    relation: RelationElement,
    levels: Vec<Level>,
    cutoff: usize,
    stabilized: bool,
    homogeneous: bool,
    /// Position of each arrow's candidate block among those of its source.
    arrow_offset: Vec<usize>,
}

/// Default cutoff: twice the total dimension of the vertex algebras.
pub fn default_cutoff(dq: &DecoratedQuiver) -> usize {
    2 * dq.total_vertex_dim()
}

impl PiAlgebra {
    pub fn compute(dq: &DecoratedQuiver, convention: SignConvention, cutoff: usize) -> Result<PiAlgebra> {
        let d = dq.double();
        for v in 0..d.num_vertices() {
            if !validate_frobenius(d.algebra(v), d.form(v)).nondegenerate {
                return Err(Error::DegenerateForm);
            }
        }
        let relation = relation_element(&d, convention)?;
        let homogeneous = relation.components.iter().all(|c| {
            let degs: BTreeSet<i64> = c.keys().map(|w| w.xdeg(&d)).collect();
            degs.len() <= 1
        });
        let nv = d.num_vertices();
        let mut arrow_offset = vec![0; d.arrows().len()];
        let mut out_count = vec![0; nv];
        for (k, a) in d.arrows().iter().enumerate() {
            arrow_offset[k] = out_count[a.source];
            out_count[a.source] += match a.kind {
                ArrowKind::TensorUnit => d.algebra(a.target).dim(),
                ArrowKind::Identification => 1,
            };
        }
        let mut pi = PiAlgebra {
            dq: d,
            relation,
            levels: Vec::new(),
            cutoff,
            stabilized: false,
            homogeneous,
            arrow_offset,
        };
        pi.build_level0();
        let mut empty_run = 0;
        for n in 1..=cutoff {
            pi.build_level(n);
            if pi.levels[n].std.is_empty() {
                empty_run += 1;
                if empty_run == 2 {
                    pi.stabilized = true;
                    break;
                }
            } else {
                empty_run = 0;
            }
        }
        Ok(pi)
    }

    pub fn quiver(&self) -> &DecoratedQuiver {
        &self.dq
    }

    pub fn relation(&self) -> &RelationElement {
        &self.relation
    }

    pub fn is_stabilized(&self) -> bool {
        self.stabilized
    }

    /// Whether every `e_i r` is x-homogeneous, so that x-degrees are defined
    /// on the quotient.
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn std(&self, n: usize) -> &[StdWord] {
        self.levels.get(n).map_or(&[], |l| &l.std)
    }

    pub fn dim(&self) -> usize {
        self.levels.iter().map(|l| l.std.len()).sum()
    }

    fn build_level0(&mut self) {
        let d = &self.dq;
        let mut std = Vec::new();
        let mut offset = vec![0; d.num_vertices()];
        for v in 0..d.num_vertices() {
            offset[v] = std.len();
            let a = d.algebra(v);
            for p in 0..a.dim() {
                std.push(StdWord {
                    source: v,
                    target: v,
                    xdeg: a.xdeg(p),
                    parent: NONE,
                    arrow: NONE,
                    slot: p as u32,
                    word: PathWord::trivial(v, p),
                });
            }
        }
        let right_mult = std
            .iter()
            .map(|s| {
                let a = d.algebra(s.source);
                (0..a.dim())
                    .map(|b| {
                        a.basis_product(s.slot as usize, b)
                            .iter()
                            .map(|(k, c)| (offset[s.source] + k, c.clone()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        self.levels.push(Level {
            std,
            cand_offset: Vec::new(),
            cand_to_std: Vec::new(),
            right_mult,
        });
    }

    /// Candidate index at level `n` for `(s, arrow, q)`.
    fn cand(&self, n: usize, s: usize, arrow: usize, q: usize) -> usize {
        self.levels[n].cand_offset[s] + self.arrow_offset[arrow] + q
    }

    fn reduce(&self, n: usize, v: &SparseVec) -> SparseVec {
        let mut acc = SparseAcc::new();
        for (c, x) in v {
            acc.add_scaled(x, &self.levels[n].cand_to_std[*c]);
        }
        acc.into_vec()
    }

    /// `x · w` for `x` in standard coordinates of degree `m`. Returns standard
    /// coordinates of degree `m + |w|`, or candidate coordinates when `w` is
    /// nonempty and `reduce_last` is false.
    fn mul_word(&self, m: usize, x: &SparseVec, w: &PathWord, reduce_last: bool) -> SparseVec {
        let d = &self.dq;
        let lm = &self.levels[m];
        let mut acc = SparseAcc::new();
        for (s, c) in x {
            if lm.std[*s].target == w.source {
                acc.add_scaled(c, &lm.right_mult[*s][w.slots[0]]);
            }
        }
        let mut y = acc.into_vec();
        let mut seg = 0;
        for (k, &a) in w.arrows.iter().enumerate() {
            let n = m + k + 1;
            if n >= self.levels.len() || y.is_empty() {
                return Vec::new();
            }
            let arr = &d.arrows()[a];
            let q = match arr.kind {
                ArrowKind::TensorUnit => {
                    seg += 1;
                    w.slots[seg]
                }
                ArrowKind::Identification => 0,
            };
            let cands: SparseVec = {
                let mut acc = SparseAcc::new();
                for (s, c) in &y {
                    acc.add(self.cand(n, *s, a, q), c);
                }
                acc.into_vec()
            };
            if k + 1 == w.arrows.len() && !reduce_last {
                return cands;
            }
            y = self.reduce(n, &cands);
        }
        y
    }

    fn block_key(&self, source: usize, target: usize, xdeg: i64) -> (usize, usize, i64) {
        (source, target, if self.homogeneous { xdeg } else { 0 })
    }

    fn build_level(&mut self, n: usize) {
        let d = self.dq.clone();
        let prev = &self.levels[n - 1];
        // Candidates.
        let mut cand_offset = Vec::with_capacity(prev.std.len());
        let mut cand_info: Vec<(u32, u32, u32, usize, usize, i64)> = Vec::new();
        let mut outs: Vec<Vec<usize>> = vec![Vec::new(); d.num_vertices()];
        for (k, a) in d.arrows().iter().enumerate() {
            outs[a.source].push(k);
        }
        for (si, s) in prev.std.iter().enumerate() {
            cand_offset.push(cand_info.len());
            for &a in &outs[s.target] {
                let arr = &d.arrows()[a];
                match arr.kind {
                    ArrowKind::TensorUnit => {
                        let t = d.algebra(arr.target);
                        for q in 0..t.dim() {
                            cand_info.push((si as u32, a as u32, q as u32, s.source, arr.target, s.xdeg + arr.xweight + t.xdeg(q)));
                        }
                    }
                    ArrowKind::Identification => {
                        cand_info.push((si as u32, a as u32, NONE, s.source, arr.target, s.xdeg + arr.xweight));
                    }
                }
            }
        }
        self.levels.push(Level {
            std: Vec::new(),
            cand_offset,
            cand_to_std: Vec::new(),
            right_mult: Vec::new(),
        });

        // Relations from Π^{n-2} · r (· T^0 when the form is not symmetric).
        let mut echs: HashMap<(usize, usize, i64), Echelon> = HashMap::new();
        if n >= 2 {
            let nonsym: Vec<bool> = (0..d.num_vertices())
                .map(|v| !validate_frobenius(d.algebra(v), d.form(v)).symmetric)
                .collect();
            let base = &self.levels[n - 2];
            for (si, s) in base.std.iter().enumerate() {
                let comp = &self.relation.components[s.target];
                if comp.is_empty() {
                    continue;
                }
                let mut rels: Vec<TElem> = vec![comp.clone()];
                if nonsym[s.target] {
                    let a = d.algebra(s.target);
                    for b in 0..a.dim() {
                        let mut e = TElem::new();
                        for (w, c) in comp {
                            let last = *w.slots.last().unwrap();
                            for (k, x) in a.basis_product(last, b) {
                                let mut w2 = w.clone();
                                *w2.slots.last_mut().unwrap() = *k;
                                telem_add(&mut e, w2, c * x);
                            }
                        }
                        rels.push(e);
                    }
                }
                let x = vec![(si, d.field().one())];
                for rel in rels {
                    let mut acc = SparseAcc::new();
                    for (w, c) in &rel {
                        acc.add_scaled(c, &self.mul_word(n - 2, &x, w, false));
                    }
                    let row = acc.into_vec();
                    if row.is_empty() {
                        continue;
                    }
                    let (_, _, _, src, tgt, xd) = cand_info[row[0].0];
                    echs.entry(self.block_key(src, tgt, xd)).or_default().insert(&row);
                }
            }
        }

        // Standard words are the non-pivot candidates.
        let mut pivot_rows: HashMap<usize, SparseVec> = HashMap::new();
        for e in echs.values() {
            for row in e.rows() {
                pivot_rows.insert(row[0].0, row.clone());
            }
        }
        let prev = &self.levels[n - 1];
        let mut std = Vec::new();
        let mut std_of = vec![usize::MAX; cand_info.len()];
        for (c, &(si, a, q, src, tgt, xd)) in cand_info.iter().enumerate() {
            if pivot_rows.contains_key(&c) {
                continue;
            }
            std_of[c] = std.len();
            let parent = &prev.std[si as usize];
            let mut word = parent.word.clone();
            word.arrows.push(a as usize);
            if q != NONE {
                word.slots.push(q as usize);
            }
            std.push(StdWord {
                source: src,
                target: tgt,
                xdeg: xd,
                parent: si,
                arrow: a,
                slot: q,
                word,
            });
        }
        let cand_to_std: Vec<SparseVec> = (0..cand_info.len())
            .map(|c| match pivot_rows.get(&c) {
                None => vec![(std_of[c], d.field().one())],
                Some(row) => {
                    let mut v: SparseVec = row[1..].iter().map(|(k, x)| (std_of[*k], -x)).collect();
                    v.sort_by_key(|e| e.0);
                    v
                }
            })
            .collect();
        self.levels[n].std = std;
        self.levels[n].cand_to_std = cand_to_std;

        // Right multiplication by the target algebra.
        let mut right_mult = Vec::with_capacity(self.levels[n].std.len());
        for s in &self.levels[n].std {
            let t = d.algebra(s.target);
            let a = s.arrow as usize;
            let mut row = Vec::with_capacity(t.dim());
            for b in 0..t.dim() {
                let mut acc = SparseAcc::new();
                if s.slot != NONE {
                    for (k, c) in t.basis_product(s.slot as usize, b) {
                        acc.add(self.cand(n, s.parent as usize, a, *k), c);
                    }
                } else {
                    for (y, c) in &self.levels[n - 1].right_mult[s.parent as usize][b] {
                        acc.add(self.cand(n, *y, a, 0), c);
                    }
                }
                row.push(self.reduce(n, &acc.into_vec()));
            }
            right_mult.push(row);
        }
        self.levels[n].right_mult = right_mult;
    }

    /// Bigraded dimensions.
    pub fn series(&self) -> HilbertSeries {
        let mut h = HilbertSeries::new(
            self.dq.vertices().iter().map(|v| v.id.clone()).collect(),
            self.cutoff,
            self.stabilized,
        );
        for (n, l) in self.levels.iter().enumerate() {
            for s in &l.std {
                h.add(n, s.xdeg, s.source, s.target, 1);
            }
        }
        h
    }

    /// Product of standard words `a` (degree `m`) and `b` (degree `m2`), in
    /// standard coordinates of degree `m + m2`. Empty beyond the cutoff.
    pub fn product(&self, m: usize, a: usize, m2: usize, b: usize) -> SparseVec {
        let w = &self.levels[m2].std[b].word;
        self.mul_word(m, &vec![(a, self.dq.field().one())], w, true)
    }

    /// Product of an element in standard coordinates of degree `m` with an
    /// arbitrary path word.
    pub fn mul_elem_word(&self, m: usize, x: &SparseVec, w: &PathWord) -> SparseVec {
        self.mul_word(m, x, w, true)
    }

    /// Normal form of a path word in standard coordinates of its degree.
    pub fn normal_form(&self, w: &PathWord) -> SparseVec {
        let d = &self.dq;
        let a = d.algebra(w.source);
        let unit: SparseVec = a.unit_sparse();
        let base: SparseVec = unit.iter().map(|(k, c)| (self.level0_index(w.source, *k), c.clone())).collect();
        self.mul_word(0, &base, w, true)
    }

    fn level0_index(&self, v: usize, k: usize) -> usize {
        self.levels[0].std.iter().position(|s| s.source == v && s.slot as usize == k).expect("basis element")
    }

    fn top_bidegree(&self) -> Option<(usize, i64)> {
        let t = (0..self.levels.len()).rev().find(|&n| !self.levels[n].std.is_empty())?;
        let x = self.levels[t].std.iter().map(|s| s.xdeg).max()?;
        Some((t, x))
    }

    /// Gram matrix of `(a, b) ↦ φ(ab)` on the standard basis, where `φ` sums
    /// the coefficients of the top-bidegree standard cycles.
    pub fn frobenius_pairing(&self) -> Result<FrobeniusPairing> {
        if !self.stabilized {
            return Err(Error::NotFiniteDimensional);
        }
        let f = self.dq.field();
        let Some((tt, x)) = self.top_bidegree() else {
            return Ok(FrobeniusPairing {
                gram: Matrix::zeros(f, 0, 0),
                rank: 0,
                basis: Vec::new(),
            });
        };
        let top: Vec<bool> = self.levels[tt].std.iter().map(|s| s.xdeg == x && s.source == s.target).collect();
        let basis: Vec<(usize, usize)> = (0..=tt).flat_map(|n| (0..self.levels[n].std.len()).map(move |i| (n, i))).collect();
        let pos: HashMap<(usize, usize), usize> = basis.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let mut gram = Matrix::zeros(f, basis.len(), basis.len());
        for m in 0..=tt {
            let m2 = tt - m;
            for (i, a) in self.levels[m].std.iter().enumerate() {
                for (j, b) in self.levels[m2].std.iter().enumerate() {
                    if a.target != b.source || b.target != a.source {
                        continue;
                    }
                    if self.homogeneous && a.xdeg + b.xdeg != x {
                        continue;
                    }
                    let mut val = f.zero();
                    for (k, c) in self.product(m, i, m2, j) {
                        if top[k] {
                            val += &c;
                        }
                    }
                    gram.set(pos[&(m, i)], pos[&(m2, j)], val);
                }
            }
        }
        let rank = gram.rank();
        Ok(FrobeniusPairing { gram, rank, basis })
    }

    /// Graded dimensions of the centre, from `[z, g] = 0` for all generators
    /// `g` of degrees 0 and 1.
    pub fn center_dims(&self) -> Result<BTreeMap<usize, usize>> {
        if !self.stabilized {
            return Err(Error::NotFiniteDimensional);
        }
        let mut gens: Vec<(usize, usize)> = (0..self.levels[0].std.len()).map(|i| (0, i)).collect();
        if self.levels.len() > 1 {
            gens.extend((0..self.levels[1].std.len()).map(|i| (1, i)));
        }
        let mut out = BTreeMap::new();
        for m in 0..self.levels.len() {
            let count = self.levels[m].std.len();
            if count == 0 {
                continue;
            }
            // Rows of the transpose: for each z, all commutators concatenated.
            let mut offsets = Vec::new();
            let mut off = 0;
            for &(gm, _) in &gens {
                offsets.push(off);
                off += self.levels.get(m + gm).map_or(0, |l| l.std.len());
            }
            let mut ech = Echelon::new();
            for z in 0..count {
                let mut acc = SparseAcc::new();
                for (g, &(gm, gi)) in gens.iter().enumerate() {
                    if m + gm >= self.levels.len() {
                        continue;
                    }
                    let zg = self.product(m, z, gm, gi);
                    let gz = self.product(gm, gi, m, z);
                    for (k, c) in zg {
                        acc.add(offsets[g] + k, &c);
                    }
                    for (k, c) in gz {
                        acc.add(offsets[g] + k, &-c);
                    }
                }
                ech.insert(&acc.into_vec());
            }
            let dim = count - ech.rank();
            if dim > 0 {
                out.insert(m, dim);
            }
        }
        Ok(out)
    }
}

/// Result of [`PiAlgebra::frobenius_pairing`].
#[derive(Clone, Debug)]
pub struct FrobeniusPairing {
    pub gram: Matrix,
    pub rank: usize,
    /// `(degree, index)` of each row and column.
    pub basis: Vec<(usize, usize)>,
}

impl FrobeniusPairing {
    pub fn nondegenerate(&self) -> bool {
        self.rank == self.basis.len()
    }
}

/// The bigraded Hilbert series of `Π`.
pub fn hilbert_series(dq: &DecoratedQuiver, convention: SignConvention, cutoff: usize) -> Result<HilbertSeries> {
    Ok(PiAlgebra::compute(dq, convention, cutoff)?.series())
}

/// Total dimension, or the cutoff at which the series had not stabilized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TotalDimension {
    Finite(usize),
    InfiniteAtCutoff(usize),
}

pub fn total_dimension(dq: &DecoratedQuiver, cutoff: Option<usize>) -> Result<TotalDimension> {
    let cutoff = cutoff.unwrap_or_else(|| default_cutoff(dq));
    let pi = PiAlgebra::compute(dq, SignConvention::Signed, cutoff)?;
    Ok(if pi.is_stabilized() {
        TotalDimension::Finite(pi.dim())
    } else {
        TotalDimension::InfiniteAtCutoff(cutoff)
    })
}
