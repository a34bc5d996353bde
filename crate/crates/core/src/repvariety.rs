//! Representations of decorated quivers, the map `Φ` and the moment map.
//!
//! `V_i = A_i^{d_i}` is a space of column vectors with `A_i` acting by right
//! multiplication; `A_i`-linear maps are left multiplication by matrices over
//! `A_i`. k-coordinates of `V_i` are ordered block by block: index `j·n + m`
//! is basis element `m` of entry `j`. Path words act left to right, so a word
//! `a_0 α a_1 β a_2` evaluates to `R_{a_2} ρ_β R_{a_1} ρ_α R_{a_0}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{frobenius_dual_basis, validate_frobenius, FiniteDimAlgebra, FrobeniusForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::preprojective::{relation_element, RelationElement, SignConvention};
use crate::quiver::{ArrowKind, DecoratedQuiver, Role};
use crate::scalar::{Field, Scalar};
use crate::tensor::PathWord;

/// A matrix with entries in a finite-dimensional algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major coefficient vectors.
    pub entries: Vec<Vec<Scalar>>,
}

impl AMatrix {
    pub fn zero(a: &FiniteDimAlgebra, rows: usize, cols: usize) -> AMatrix {
        AMatrix {
            rows,
            cols,
            entries: vec![a.field().vec_zeros(a.dim()); rows * cols],
        }
    }

    pub fn identity(a: &FiniteDimAlgebra, n: usize) -> AMatrix {
        let mut m = AMatrix::zero(a, n, n);
        for i in 0..n {
            m.set(i, i, a.unit().to_vec());
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &[Scalar] {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Vec<Scalar>) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.iter().all(Scalar::is_zero))
    }

    pub fn mul(&self, a: &FiniteDimAlgebra, o: &AMatrix) -> AMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = AMatrix::zero(a, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = a.field().vec_zeros(a.dim());
                for k in 0..self.cols {
                    let p = a.multiply(self.get(i, k), o.get(k, j)).expect("dimensions agree");
                    add_into(&mut acc, &p, &a.field().one());
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, o: &AMatrix) -> AMatrix {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &AMatrix) -> AMatrix {
        self.combine(o, -1)
    }

    fn combine(&self, o: &AMatrix, sign: i64) -> AMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut out = self.clone();
        for (e, f) in out.entries.iter_mut().zip(&o.entries) {
            let c = e.first().or(f.first()).map(|s| s.field().from_i64(sign));
            if let Some(c) = c {
                add_into(e, f, &c);
            }
        }
        out
    }

    /// Sum of the diagonal entries, an element of the algebra.
    pub fn trace(&self, a: &FiniteDimAlgebra) -> Vec<Scalar> {
        let mut acc = a.field().vec_zeros(a.dim());
        for i in 0..self.rows.min(self.cols) {
            add_into(&mut acc, self.get(i, i), &a.field().one());
        }
        acc
    }

    /// The k-matrix of `v ↦ M v` on column vectors.
    pub fn to_kmatrix(&self, a: &FiniteDimAlgebra) -> Matrix {
        let n = a.dim();
        let mut m = Matrix::zeros(a.field(), self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let l = a.left_mult_matrix(self.get(i, j));
                for r in 0..n {
                    for c in 0..n {
                        m.set(i * n + r, j * n + c, l.get(r, c).clone());
                    }
                }
            }
        }
        m
    }

    /// Reads off the matrix of an `A`-linear k-map; `None` if the map does
    /// not commute with right multiplication.
    pub fn from_kmatrix(a: &FiniteDimAlgebra, m: &Matrix, rows: usize, cols: usize) -> Option<AMatrix> {
        let n = a.dim();
        let mut out = AMatrix::zero(a, rows, cols);
        for j in 0..cols {
            let mut v = a.field().vec_zeros(cols * n);
            v[j * n..(j + 1) * n].clone_from_slice(a.unit());
            let img = m.mul_vec(&v);
            for i in 0..rows {
                out.set(i, j, img[i * n..(i + 1) * n].to_vec());
            }
        }
        (out.to_kmatrix(a) == *m).then_some(out)
    }

    /// Inverse, if the k-map is invertible.
    pub fn inverse(&self, a: &FiniteDimAlgebra) -> Option<AMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let inv = self.to_kmatrix(a).inverse()?;
        AMatrix::from_kmatrix(a, &inv, self.rows, self.cols)
    }
}

fn add_into(acc: &mut [Scalar], v: &[Scalar], c: &Scalar) {
    for (x, y) in acc.iter_mut().zip(v) {
        if !y.is_zero() {
            *x += &(c * y);
        }
    }
}

/// Block-diagonal matrix of right multiplication by `u` on `A^d`.
pub fn right_mult_blocks(a: &FiniteDimAlgebra, u: &[Scalar], d: usize) -> Matrix {
    let n = a.dim();
    let r = a.right_mult_matrix(u);
    let mut m = Matrix::zeros(a.field(), d * n, d * n);
    for b in 0..d {
        for i in 0..n {
            for j in 0..n {
                m.set(b * n + i, b * n + j, r.get(i, j).clone());
            }
        }
    }
    m
}

/// Free parameters of one arrow of a representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrowData {
    /// `ρ(1 ⊗ 1)` as a k-matrix `V_s → V_t`.
    Tensor(Matrix),
    /// `ρ(1)` as an `A`-linear map `V_s → V_t`.
    Ident(AMatrix),
}

/// A representation of the double of a decorated quiver on free modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    quiver: DecoratedQuiver,
    pub dims: Vec<usize>,
    /// Indexed by the arrows of the doubled quiver.
    pub arrows: Vec<ArrowData>,
}

/// Per-vertex `A_i`-linear endomorphisms of `A_i^{d_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    pub blocks: Vec<AMatrix>,
}

impl LieElement {
    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(AMatrix::is_zero)
    }
}

/// A group element: one invertible `A_i`-matrix per vertex.
pub type GroupElement = LieElement;

fn require_symmetric(dq: &DecoratedQuiver) -> Result<()> {
    for v in 0..dq.num_vertices() {
        let rep = validate_frobenius(dq.algebra(v), dq.form(v));
        if !rep.nondegenerate {
            return Err(Error::DegenerateForm);
        }
        if !rep.symmetric {
            return Err(Error::UnsupportedParams(format!(
                "vertex {} has a nonsymmetric form",
                dq.vertices()[v].id
            )));
        }
    }
    Ok(())
}

fn check_dims(dq: &DecoratedQuiver, d: &[usize]) -> Result<()> {
    if d.len() != dq.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: dq.num_vertices(),
            found: d.len(),
        });
    }
    if d.contains(&0) {
        return Err(Error::UnsupportedParams("dimension vector entries must be positive".into()));
    }
    Ok(())
}

impl Representation {
    /// The zero representation of the double of `dq`.
    pub fn zero(dq: &DecoratedQuiver, d: &[usize]) -> Result<Representation> {
        Representation::sampled(dq, d, |f| f.zero())
    }

    fn sampled(dq: &DecoratedQuiver, d: &[usize], mut draw: impl FnMut(Field) -> Scalar) -> Result<Representation> {
        let dq = dq.double();
        require_symmetric(&dq)?;
        check_dims(&dq, d)?;
        let f = dq.field();
        let mut arrows = Vec::new();
        for a in dq.arrows() {
            let (s, t) = (a.source, a.target);
            let (ns, nt) = (dq.algebra(s).dim(), dq.algebra(t).dim());
            arrows.push(match a.kind {
                ArrowKind::TensorUnit => {
                    let rows = (0..d[t] * nt).map(|_| (0..d[s] * ns).map(|_| draw(f)).collect()).collect();
                    ArrowData::Tensor(Matrix::from_rows(f, rows))
                }
                ArrowKind::Identification => {
                    let alg = dq.algebra(s);
                    let mut m = AMatrix::zero(alg, d[t], d[s]);
                    for e in &mut m.entries {
                        for x in e.iter_mut() {
                            *x = draw(f);
                        }
                    }
                    ArrowData::Ident(m)
                }
            });
        }
        Ok(Representation {
            quiver: dq,
            dims: d.to_vec(),
            arrows,
        })
    }

    /// The doubled quiver the representation lives on.
    pub fn quiver(&self) -> &DecoratedQuiver {
        &self.quiver
    }

    /// Number of free scalars carried by each arrow.
    pub fn num_parameters(&self) -> Vec<usize> {
        self.arrows
            .iter()
            .map(|a| match a {
                ArrowData::Tensor(m) => m.rows() * m.cols(),
                ArrowData::Ident(m) => m.entries.iter().map(Vec::len).sum(),
            })
            .collect()
    }

    /// The k-matrix `ρ_α(1)`.
    pub fn arrow_matrix(&self, arrow: usize) -> Matrix {
        match &self.arrows[arrow] {
            ArrowData::Tensor(m) => m.clone(),
            ArrowData::Ident(m) => m.to_kmatrix(self.quiver.algebra(self.quiver.arrows()[arrow].source)),
        }
    }

    /// The k-matrix of a path word.
    pub fn word_matrix(&self, w: &PathWord) -> Matrix {
        let dq = &self.quiver;
        let sv = w.slot_vertices(dq);
        let slot_map = |seg: usize| {
            let v = sv[seg];
            right_mult_blocks(dq.algebra(v), &dq.algebra(v).basis_vec(w.slots[seg]), self.dims[v])
        };
        let mut m = slot_map(0);
        let mut seg = 0;
        for &a in &w.arrows {
            m = self.arrow_matrix(a).mul(&m);
            if dq.arrows()[a].kind == ArrowKind::TensorUnit {
                seg += 1;
                m = slot_map(seg).mul(&m);
            }
        }
        m
    }
}

/// Seeded representation with entries drawn uniformly from `-3..=3`.
pub fn random_representation(dq: &DecoratedQuiver, d: &[usize], seed: u64) -> Result<Representation> {
    random_representation_in(dq, d, seed, -3, 3)
}

/// Seeded representation with entries drawn uniformly from `lo..=hi`.
pub fn random_representation_in(dq: &DecoratedQuiver, d: &[usize], seed: u64, lo: i64, hi: i64) -> Result<Representation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Representation::sampled(dq, d, |f| f.from_i64(rng.gen_range(lo..=hi)))
}

/// Evaluates `r` on a representation, vertex by vertex.
pub fn evaluate_relation(rep: &Representation, r: &RelationElement) -> Result<LieElement> {
    let dq = rep.quiver();
    let mut blocks = Vec::new();
    for (v, comp) in r.components.iter().enumerate() {
        let alg = dq.algebra(v);
        let size = rep.dims[v] * alg.dim();
        let mut acc = Matrix::zeros(dq.field(), size, size);
        for (w, c) in comp {
            acc = acc.add(&rep.word_matrix(w).scale(c));
        }
        blocks.push(AMatrix::from_kmatrix(alg, &acc, rep.dims[v], rep.dims[v]).ok_or(Error::NotALinearResult(v))?);
    }
    Ok(LieElement { blocks })
}

/// Evaluates the signed relation element of the representation's quiver.
pub fn evaluate_signed_relation(rep: &Representation) -> Result<LieElement> {
    let r = relation_element(&rep.quiver().positive(), SignConvention::Signed)?;
    evaluate_relation(rep, &r)
}

/// `Φ(φ)(a) = Σ_i φ(e_i) f_i a` for a k-linear `φ` on `A`, with `f_i` dual
/// to `e_i` under `λ`. `Φ(φ)` is left multiplication by the returned
/// element.
pub fn phi(a: &FiniteDimAlgebra, form: &FrobeniusForm, map: &Matrix) -> Result<Vec<Scalar>> {
    let duals = frobenius_dual_basis(a, form)?;
    let mut out = a.field().vec_zeros(a.dim());
    for (i, fi) in duals.iter().enumerate() {
        let p = a.multiply(&map.col(i), fi)?;
        add_into(&mut out, &p, &a.field().one());
    }
    debug_assert_eq!(map.trace(), form.eval(&out));
    Ok(out)
}

/// `Mat_d(Φ)`: applies `Φ` to each `A`-block of a k-linear map on `A^d`.
pub fn phi_matrix(a: &FiniteDimAlgebra, form: &FrobeniusForm, map: &Matrix, d: usize) -> Result<AMatrix> {
    let n = a.dim();
    let mut out = AMatrix::zero(a, d, d);
    for i in 0..d {
        for j in 0..d {
            let rows = (0..n).map(|r| (0..n).map(|c| map.get(i * n + r, j * n + c).clone()).collect()).collect();
            out.set(i, j, phi(a, form, &Matrix::from_rows(a.field(), rows))?);
        }
    }
    Ok(out)
}

/// `λ ∘ tr_A` of an `A`-matrix.
pub fn lambda_trace(a: &FiniteDimAlgebra, form: &FrobeniusForm, m: &AMatrix) -> Scalar {
    form.eval(&m.trace(a))
}

fn ident(data: &ArrowData) -> &AMatrix {
    match data {
        ArrowData::Ident(m) => m,
        ArrowData::Tensor(_) => unreachable!("arrow kinds match their data"),
    }
}

/// Value of the moment map on one basis element `X` of `𝔤𝔩_{d_v}(A_v)`.
/// Tensor arrows contribute k-traces, identification arrows `λ ∘ tr_A`.
fn moment_functional(rep: &Representation, v: usize, x: &AMatrix) -> Scalar {
    let dq = rep.quiver();
    let alg = dq.algebra(v);
    let xk = x.to_kmatrix(alg);
    let mut total = dq.field().zero();
    for (k, a) in dq.arrows().iter().enumerate() {
        if a.role != Role::Positive {
            continue;
        }
        let ks = dq.dual_arrow(k);
        for (end, sign) in [(a.source, 1), (a.target, -1)] {
            if end != v {
                continue;
            }
            let c = dq.field().from_i64(sign);
            let val = match a.kind {
                ArrowKind::TensorUnit => {
                    let (f, fs) = (rep.arrow_matrix(k), rep.arrow_matrix(ks));
                    let loop_map = if sign == 1 { fs.mul(&f) } else { f.mul(&fs) };
                    xk.mul(&loop_map).trace()
                }
                ArrowKind::Identification => {
                    let (n, ns) = (ident(&rep.arrows[k]), ident(&rep.arrows[ks]));
                    let loop_map = if sign == 1 { ns.mul(alg, n) } else { n.mul(alg, ns) };
                    lambda_trace(alg, dq.form(v), &x.mul(alg, &loop_map))
                }
            };
            total += &(&c * &val);
        }
    }
    total
}

fn gl_basis(a: &FiniteDimAlgebra, d: usize) -> Vec<AMatrix> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for m in 0..a.dim() {
                let mut x = AMatrix::zero(a, d, d);
                x.set(i, j, a.basis_vec(m));
                out.push(x);
            }
        }
    }
    out
}

/// The moment map `μ(ρ)` as the functional `X ↦ Σ_α ⟨ρ_{α*}, X·ρ_α⟩`
/// evaluated on a basis of `𝔤`, converted to a Lie element through the
/// pairing `(X, Y) ↦ Σ_i λ_i tr_{A_i}(XY)`. Sign fixed so that `μ` agrees
/// with the signed relation.
pub fn moment_map_via_pairing(rep: &Representation) -> Result<LieElement> {
    let dq = rep.quiver();
    require_symmetric(dq)?;
    let mut blocks = Vec::new();
    for v in 0..dq.num_vertices() {
        let alg = dq.algebra(v);
        let basis = gl_basis(alg, rep.dims[v]);
        let gram: Vec<Vec<Scalar>> = basis
            .iter()
            .map(|x| basis.iter().map(|y| lambda_trace(alg, dq.form(v), &x.mul(alg, y))).collect())
            .collect();
        let rhs: Vec<Scalar> = basis.iter().map(|x| moment_functional(rep, v, x)).collect();
        let y = Matrix::from_rows(dq.field(), gram).solve(&rhs).ok_or(Error::DegenerateForm)?;
        let mut out = AMatrix::zero(alg, rep.dims[v], rep.dims[v]);
        for (c, x) in y.iter().zip(&basis) {
            if !c.is_zero() {
                out = out.add(&AMatrix {
                    entries: x.entries.iter().map(|e| e.iter().map(|s| c * s).collect()).collect(),
                    ..x.clone()
                });
            }
        }
        blocks.push(out);
    }
    Ok(LieElement { blocks })
}

/// The moment map assembled directly: `Mat_d(Φ)(ρ_{α*} ρ_α)` for tensor
/// arrows and `ρ_{α*} ρ_α` over `A` for identification arrows.
pub fn moment_map_via_transport(rep: &Representation) -> Result<LieElement> {
    let dq = rep.quiver();
    require_symmetric(dq)?;
    let mut blocks: Vec<AMatrix> = (0..dq.num_vertices())
        .map(|v| AMatrix::zero(dq.algebra(v), rep.dims[v], rep.dims[v]))
        .collect();
    for (k, a) in dq.arrows().iter().enumerate() {
        if a.role != Role::Positive {
            continue;
        }
        let ks = dq.dual_arrow(k);
        let (s, t) = (a.source, a.target);
        match a.kind {
            ArrowKind::TensorUnit => {
                let (f, fs) = (rep.arrow_matrix(k), rep.arrow_matrix(ks));
                let at_s = phi_matrix(dq.algebra(s), dq.form(s), &fs.mul(&f), rep.dims[s])?;
                let at_t = phi_matrix(dq.algebra(t), dq.form(t), &f.mul(&fs), rep.dims[t])?;
                blocks[s] = blocks[s].add(&at_s);
                blocks[t] = blocks[t].sub(&at_t);
            }
            ArrowKind::Identification => {
                let alg = dq.algebra(s);
                let (n, ns) = (ident(&rep.arrows[k]), ident(&rep.arrows[ks]));
                blocks[s] = blocks[s].add(&ns.mul(alg, n));
                blocks[t] = blocks[t].sub(&n.mul(alg, ns));
            }
        }
    }
    Ok(LieElement { blocks })
}

/// `(g·ρ)_α = g_t ρ_α g_s^{-1}`.
pub fn act(g: &GroupElement, rep: &Representation) -> Result<Representation> {
    let dq = rep.quiver();
    let mut inv = Vec::new();
    for (v, b) in g.blocks.iter().enumerate() {
        if b.rows != rep.dims[v] || b.cols != rep.dims[v] {
            return Err(Error::DimensionMismatch {
                expected: rep.dims[v],
                found: b.rows,
            });
        }
        inv.push(b.inverse(dq.algebra(v)).ok_or_else(|| Error::NotInvertible(format!("vertex {}", dq.vertices()[v].id)))?);
    }
    let mut out = rep.clone();
    for (k, a) in dq.arrows().iter().enumerate() {
        let (s, t) = (a.source, a.target);
        out.arrows[k] = match &rep.arrows[k] {
            ArrowData::Tensor(m) => {
                let gt = g.blocks[t].to_kmatrix(dq.algebra(t));
                let gs = inv[s].to_kmatrix(dq.algebra(s));
                ArrowData::Tensor(gt.mul(m).mul(&gs))
            }
            ArrowData::Ident(m) => {
                let alg = dq.algebra(s);
                ArrowData::Ident(g.blocks[t].mul(alg, m).mul(alg, &inv[s]))
            }
        };
    }
    Ok(out)
}

/// Blockwise `g X g^{-1}`.
pub fn conjugate(dq: &DecoratedQuiver, g: &GroupElement, x: &LieElement) -> Result<LieElement> {
    let mut blocks = Vec::new();
    for (v, (gb, xb)) in g.blocks.iter().zip(&x.blocks).enumerate() {
        let alg = dq.algebra(v);
        let inv = gb.inverse(alg).ok_or_else(|| Error::NotInvertible(format!("vertex {}", dq.vertices()[v].id)))?;
        blocks.push(gb.mul(alg, xb).mul(alg, &inv));
    }
    Ok(LieElement { blocks })
}

/// Seeded invertible group element: identity plus a random strictly
/// upper-triangular part, times a random unit scalar on the diagonal.
pub fn random_group_element(dq: &DecoratedQuiver, d: &[usize], seed: u64) -> Result<GroupElement> {
    check_dims(dq, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = dq.field();
    let mut blocks = Vec::new();
    for (v, &dv) in d.iter().enumerate() {
        let alg = dq.algebra(v);
        let mut g = AMatrix::identity(alg, dv);
        for i in 0..dv {
            for j in 0..dv {
                if j > i {
                    g.set(i, j, (0..alg.dim()).map(|_| f.from_i64(rng.gen_range(-2..=2))).collect());
                }
            }
            let c = f.from_i64(rng.gen_range(1..=3));
            let mut diag: Vec<Scalar> = alg.unit().iter().map(|u| &c * u).collect();
            for (k, x) in diag.iter_mut().enumerate() {
                if alg.xdegs().is_some() && alg.xdeg(k) > 0 {
                    *x += &f.from_i64(rng.gen_range(-2..=2));
                }
            }
            g.set(i, i, diag);
        }
        if g.inverse(alg).is_none() {
            return Err(Error::NotInvertible(format!("vertex {}", dq.vertices()[v].id)));
        }
        blocks.push(g);
    }
    Ok(LieElement { blocks })
}

/// First seed and vertex where the two maps differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub seed: u64,
    pub vertex: String,
}

/// Outcome of comparing the moment map with the evaluation of `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentCheckReport {
    pub case: String,
    pub seeds: usize,
    pub all_equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<Mismatch>,
}

/// Compares [`moment_map_via_pairing`] with [`evaluate_relation`] on the
/// representations seeded by `base_seed .. base_seed + seeds`.
pub fn moment_check(case: &str, dq: &DecoratedQuiver, d: &[usize], base_seed: u64, seeds: usize) -> Result<MomentCheckReport> {
    let r = relation_element(&dq.positive(), SignConvention::Signed)?;
    let mut first_mismatch = None;
    for s in base_seed..base_seed + seeds as u64 {
        let rep = random_representation(dq, d, s)?;
        let lhs = moment_map_via_pairing(&rep)?;
        let rhs = evaluate_relation(&rep, &r)?;
        if let Some(v) = (0..lhs.blocks.len()).find(|&v| lhs.blocks[v] != rhs.blocks[v]) {
            first_mismatch = Some(Mismatch {
                seed: s,
                vertex: rep.quiver().vertices()[v].id.clone(),
            });
            break;
        }
    }
    Ok(MomentCheckReport {
        case: case.to_string(),
        seeds,
        all_equal: first_mismatch.is_none(),
        first_mismatch,
    })
}
