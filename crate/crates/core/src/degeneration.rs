//! Frobenius degenerations: forms vanishing on the unit, the most degenerate
//! algebra `k ⊕ ker λ / k ⊕ k`, associated graded algebras of filtrations,
//! and the flatness comparison of Hilbert series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{change_form, make_algebra, FiniteDimAlgebra, FrobeniusForm};
use crate::error::{Error, Result};
use crate::linalg::{dense_to_sparse, Echelon, Matrix};
use crate::preprojective::{hilbert_series, SignConvention};
use crate::quiver::DecoratedQuiver;
use crate::scalar::{Field, Scalar};
use crate::series::HilbertSeries;

const UNIT_SAMPLES: usize = 1000;
const FALLBACK_LIMIT: usize = 1 << 20;

fn kernel_basis(a: &FiniteDimAlgebra, form: &FrobeniusForm) -> Vec<Vec<Scalar>> {
    Matrix::from_rows(a.field(), vec![form.lambda.clone()]).nullspace()
}

fn combine(field: Field, basis: &[Vec<Scalar>], coeffs: &[i64], dim: usize) -> Vec<Scalar> {
    let mut u = field.vec_zeros(dim);
    for (b, &c) in basis.iter().zip(coeffs) {
        if c != 0 {
            let c = field.from_i64(c);
            for (x, y) in u.iter_mut().zip(b) {
                *x += &(&c * y);
            }
        }
    }
    u
}

/// A unit `u` with `λ(u) = 0`: seeded samples in `ker λ` first, then an
/// enumeration of coefficient vectors in `{-2, …, 2}` over a kernel basis.
pub fn unit_in_kernel(a: &FiniteDimAlgebra, form: &FrobeniusForm, seed: u64) -> Result<Vec<Scalar>> {
    let field = a.field();
    let basis = kernel_basis(a, form);
    let m = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if m > 0 {
        for _ in 0..UNIT_SAMPLES {
            let coeffs: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
            let u = combine(field, &basis, &coeffs, a.dim());
            if a.is_unit(&u) {
                return Ok(u);
            }
        }
    }
    let total = 5usize.checked_pow(m as u32).filter(|&t| t <= FALLBACK_LIMIT);
    let Some(total) = total else {
        return Err(Error::SearchExhausted);
    };
    for mut code in 0..total {
        let coeffs: Vec<i64> = (0..m)
            .map(|_| {
                let c = (code % 5) as i64 - 2;
                code /= 5;
                c
            })
            .collect();
        let u = combine(field, &basis, &coeffs, a.dim());
        if a.is_unit(&u) {
            return Ok(u);
        }
    }
    // Over F_p with p <= 5 the enumeration covered the whole kernel.
    match field {
        Field::Prime(p) if p <= 5 => Err(Error::NoSuchForm),
        _ if m == 0 => Err(Error::NoSuchForm),
        _ => Err(Error::SearchExhausted),
    }
}

/// `λ ∘ L_u` for a unit `u ∈ ker λ`, or `λ` itself if it already vanishes
/// on the unit.
pub fn form_vanishing_on_unit(a: &FiniteDimAlgebra, form: &FrobeniusForm) -> Result<FrobeniusForm> {
    if form.eval(a.unit()).is_zero() {
        return Ok(form.clone());
    }
    let u = unit_in_kernel(a, form, 0)?;
    change_form(a, form, &u)
}

/// A chain `F_0 ⊆ F_1 ⊆ ⋯ ⊆ F_m = A`, each given by spanning vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub steps: Vec<Vec<Vec<Scalar>>>,
}

impl Filtration {
    /// The one-step filtration `F_0 = A`.
    pub fn trivial(a: &FiniteDimAlgebra) -> Filtration {
        Filtration {
            steps: vec![(0..a.dim()).map(|i| a.basis_vec(i)).collect()],
        }
    }

    /// `F_i` spanned by the basis elements of x-degree at most `i·step`.
    pub fn by_xdeg(a: &FiniteDimAlgebra, step: i64) -> Filtration {
        let top = (0..a.dim()).map(|i| a.xdeg(i)).max().unwrap_or(0);
        let m = (top + step - 1) / step;
        Filtration {
            steps: (0..=m)
                .map(|i| (0..a.dim()).filter(|&b| a.xdeg(b) <= i * step).map(|b| a.basis_vec(b)).collect())
                .collect(),
        }
    }

    /// `F_i` spanned by the first `sizes[i]` basis elements.
    pub fn by_prefix(a: &FiniteDimAlgebra, sizes: &[usize]) -> Filtration {
        Filtration {
            steps: sizes.iter().map(|&s| (0..s).map(|b| a.basis_vec(b)).collect()).collect(),
        }
    }
}

/// A basis adapted to a filtration and the coordinates it induces.
struct Adapted {
    /// Layer of each adapted basis vector.
    layer: Vec<usize>,
    reps: Vec<Vec<Scalar>>,
    to_adapted: Matrix,
}

fn adapt(a: &FiniteDimAlgebra, f: &Filtration) -> Result<Adapted> {
    let n = a.dim();
    let mut ech = Echelon::new();
    let mut layer = Vec::new();
    let mut reps = Vec::new();
    for (i, step) in f.steps.iter().enumerate() {
        let mut here = Echelon::new();
        for v in step {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            here.insert(&dense_to_sparse(v));
            if ech.insert(&dense_to_sparse(v)) {
                layer.push(i);
                reps.push(v.clone());
            }
        }
        if here.rank() != ech.rank() {
            return Err(Error::UnsupportedParams(format!("filtration step {i} does not contain the previous step")));
        }
    }
    if reps.len() != n {
        return Err(Error::UnsupportedParams("last filtration step is not the whole algebra".into()));
    }
    let basis = Matrix::from_cols(a.field(), n, &reps);
    let to_adapted = basis.inverse().expect("adapted vectors are independent");
    Ok(Adapted { layer, reps, to_adapted })
}

/// `gr A = ⊕ F_i / F_{i-1}` on the chosen coset representatives, with the
/// layer index as x-degree. Representatives that are basis vectors keep
/// their labels.
pub fn associated_graded(a: &FiniteDimAlgebra, f: &Filtration) -> Result<FiniteDimAlgebra> {
    let field = a.field();
    let n = a.dim();
    let ad = adapt(a, f)?;
    let top = ad.layer.last().copied().unwrap_or(0);
    let unit = ad.to_adapted.mul_vec(a.unit());
    if (0..n).any(|k| ad.layer[k] > 0 && !unit[k].is_zero()) {
        return Err(Error::UnsupportedParams("the unit does not lie in F_0".into()));
    }
    let mut sc = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let deg = ad.layer[i] + ad.layer[j];
            let p = ad.to_adapted.mul_vec(&a.multiply(&ad.reps[i], &ad.reps[j])?);
            for (k, c) in p.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if ad.layer[k] > deg {
                    return Err(Error::NotMultiplicative(ad.layer[i], ad.layer[j]));
                }
                if ad.layer[k] == deg && deg <= top {
                    sc.push((i, j, k, c.clone()));
                }
            }
        }
    }
    let gr_unit = (0..n).map(|k| if ad.layer[k] == 0 { unit[k].clone() } else { field.zero() }).collect();
    let labels = ad
        .reps
        .iter()
        .enumerate()
        .map(|(k, r)| match single_basis_index(r) {
            Some(b) => a.label(b).to_string(),
            None => format!("g{k}"),
        })
        .collect();
    let xdeg = ad.layer.iter().map(|&l| l as i64).collect();
    make_algebra(field, n, &sc, gr_unit, Some(labels), Some(xdeg))
}

fn single_basis_index(v: &[Scalar]) -> Option<usize> {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    (nz.len() == 1 && v[nz[0]].is_one()).then(|| nz[0])
}

/// Result of [`most_degenerate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MostDegenerate {
    pub algebra: FiniteDimAlgebra,
    /// The coefficient of the top basis element.
    pub form: FrobeniusForm,
    /// `M_ij = λ(v_i v_j)` on the middle layer.
    pub bilinear: Matrix,
}

impl MostDegenerate {
    /// Dimensions of the three layers.
    pub fn graded_dims(&self) -> Vec<usize> {
        let h = self.algebra.hilbert();
        h.values().map(|&c| c as usize).collect()
    }
}

/// Associated graded of `k·1 ⊆ ker λ ⊆ A` for a form with `λ(1) = 0`.
pub fn most_degenerate(a: &FiniteDimAlgebra, form: &FrobeniusForm) -> Result<MostDegenerate> {
    if !form.eval(a.unit()).is_zero() {
        return Err(Error::FormNonVanishingOnUnit);
    }
    if !crate::algebra::validate_frobenius(a, form).nondegenerate {
        return Err(Error::DegenerateForm);
    }
    let mut middle = vec![a.unit().to_vec()];
    middle.extend(kernel_basis(a, form));
    let all = (0..a.dim()).map(|i| a.basis_vec(i)).collect();
    let filt = Filtration {
        steps: vec![vec![a.unit().to_vec()], middle, all],
    };
    let gr = associated_graded(a, &filt)?;
    let n = gr.dim();
    let top = n - 1;
    let r = n - 2;
    let mut m = Matrix::zeros(a.field(), r, r);
    for i in 0..r {
        for j in 0..r {
            let p = gr.basis_product(i + 1, j + 1);
            if let Some((_, c)) = p.iter().find(|(k, _)| *k == top) {
                m.set(i, j, c.clone());
            }
        }
    }
    Ok(MostDegenerate {
        algebra: gr,
        form: FrobeniusForm::new(a.field().unit_vec(n, top)),
        bilinear: m,
    })
}

/// Diagonal entries of a congruence diagonalization `P M Pᵀ` of a symmetric
/// matrix, for reporting only. `None` if `M` is not symmetric or the
/// characteristic is 2.
pub fn diagonalize_symmetric(m: &Matrix) -> Option<Vec<Scalar>> {
    let f = m.field();
    if *m != m.transpose() || f.characteristic() == 2 {
        return None;
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut diag = Vec::new();
    for k in 0..n {
        if a.get(k, k).is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a.get(j, j).is_zero()) {
                swap_sym(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                // Row/column k += row/column j makes the pivot 2·a_kj.
                add_sym(&mut a, k, j, &f.one());
            }
        }
        let p = a.get(k, k).clone();
        if !p.is_zero() {
            for i in k + 1..n {
                let c = -(a.get(i, k).div(&p).expect("nonzero pivot"));
                add_sym(&mut a, i, k, &c);
            }
        }
        diag.push(a.get(k, k).clone());
    }
    Some(diag)
}

fn swap_sym(a: &mut Matrix, i: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let (x, y) = (a.get(i, c).clone(), a.get(j, c).clone());
        a.set(i, c, y);
        a.set(j, c, x);
    }
    for r in 0..n {
        let (x, y) = (a.get(r, i).clone(), a.get(r, j).clone());
        a.set(r, i, y);
        a.set(r, j, x);
    }
}

/// Row `i += c·row j`, then column `i += c·column j`.
fn add_sym(a: &mut Matrix, i: usize, j: usize, c: &Scalar) {
    let n = a.rows();
    for col in 0..n {
        let v = a.get(j, col) * c;
        a.add_at(i, col, &v);
    }
    for row in 0..n {
        let v = a.get(row, j) * c;
        a.add_at(row, i, &v);
    }
}

/// Position of a disagreement between two series. Block indices refer to
/// the vertices of the right quiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Difference {
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_half: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub left_dim: i64,
    pub right_dim: i64,
}

/// Outcome of comparing a deformed (left) and degenerate (right) quiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatnessReport {
    pub quiver: String,
    pub left: String,
    pub right: String,
    pub cutoff: usize,
    pub flat: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<Difference>,
    /// A coefficient where the degenerate side is larger, which the
    /// inequality `dim deformed ≥ dim degenerate` forbids.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Difference>,
}

impl FlatnessReport {
    pub fn is_monotone(&self) -> bool {
        self.violation.is_none()
    }
}

fn shape_string(dq: &DecoratedQuiver) -> String {
    let arrows: Vec<String> = dq
        .arrows()
        .iter()
        .map(|a| format!("{}->{}", dq.vertices()[a.source].id, dq.vertices()[a.target].id))
        .collect();
    format!("{} vertices; {}", dq.num_vertices(), arrows.join(" "))
}

fn decoration_string(dq: &DecoratedQuiver) -> String {
    dq.vertices().iter().map(|v| dq.decorations()[v.decoration].name.clone()).collect::<Vec<_>>().join(",")
}

fn positive_arrow_signature(dq: &DecoratedQuiver, perm: &[usize]) -> Vec<(usize, usize, crate::quiver::ArrowKind)> {
    let mut out: Vec<_> = dq.positive().arrows().iter().map(|a| (perm[a.source], perm[a.target], a.kind)).collect();
    out.sort();
    out
}

/// A vertex bijection `left → right` preserving algebra dimensions and
/// arrows; the lexicographically first one.
pub fn match_shapes(left: &DecoratedQuiver, right: &DecoratedQuiver) -> Option<Vec<usize>> {
    let n = left.num_vertices();
    if n != right.num_vertices() || left.positive().arrows().len() != right.positive().arrows().len() {
        return None;
    }
    let identity: Vec<usize> = (0..n).collect();
    let target = positive_arrow_signature(right, &identity);
    let mut perm = Vec::new();
    let mut used = vec![false; n];
    fn search(
        left: &DecoratedQuiver,
        right: &DecoratedQuiver,
        target: &[(usize, usize, crate::quiver::ArrowKind)],
        perm: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let n = left.num_vertices();
        if perm.len() == n {
            return positive_arrow_signature(left, perm) == target;
        }
        let v = perm.len();
        for w in 0..n {
            if !used[w] && left.algebra(v).dim() == right.algebra(w).dim() {
                used[w] = true;
                perm.push(w);
                if search(left, right, target, perm, used) {
                    return true;
                }
                perm.pop();
                used[w] = false;
            }
        }
        false
    }
    search(left, right, &target, &mut perm, &mut used).then_some(perm)
}

fn x_profiles_agree(left: &DecoratedQuiver, right: &DecoratedQuiver, perm: &[usize]) -> bool {
    let algebras = (0..left.num_vertices()).all(|v| left.algebra(v).hilbert() == right.algebra(perm[v]).hilbert());
    let mut lw: Vec<_> = left.arrows().iter().map(|a| (perm[a.source], perm[a.target], a.kind, a.xweight)).collect();
    let mut rw: Vec<_> = right.arrows().iter().map(|a| (a.source, a.target, a.kind, a.xweight)).collect();
    lw.sort();
    rw.sort();
    algebras && lw == rw
}

/// `(t, s_half, i, j)`; unused coordinates are `None`.
type TermKey = (usize, Option<i64>, Option<usize>, Option<usize>);

/// Coefficients compared by a flatness check, keyed for reporting.
fn compared_terms(h: &HilbertSeries, perm: Option<&[usize]>, bigraded: bool) -> Vec<(TermKey, i64)> {
    let mut out = std::collections::BTreeMap::new();
    for (&(t, s), m) in &h.terms {
        let s_key = bigraded.then_some(s);
        for (i, row) in m.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let key = match perm {
                    Some(p) => (t, s_key, Some(p[i]), Some(p[j])),
                    None => (t, s_key, None, None),
                };
                *out.entry(key).or_insert(0) += c;
            }
        }
    }
    out.into_iter().collect()
}

fn compare(
    left: &HilbertSeries,
    right: &HilbertSeries,
    left_perm: Option<&[usize]>,
    bigraded: bool,
) -> (Option<Difference>, Option<Difference>) {
    let l = compared_terms(left, left_perm, bigraded);
    let identity: Vec<usize> = (0..right.n()).collect();
    let r = compared_terms(right, left_perm.map(|_| identity.as_slice()), bigraded);
    let lm: std::collections::BTreeMap<_, _> = l.into_iter().collect();
    let rm: std::collections::BTreeMap<_, _> = r.into_iter().collect();
    let mut keys: Vec<_> = lm.keys().chain(rm.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let mut first = None;
    let mut violation = None;
    for k in keys {
        let (a, b) = (lm.get(&k).copied().unwrap_or(0), rm.get(&k).copied().unwrap_or(0));
        if a == b {
            continue;
        }
        let d = Difference {
            t: k.0,
            s_half: k.1,
            i: k.2,
            j: k.3,
            left_dim: a,
            right_dim: b,
        };
        if b > a && violation.is_none() {
            violation = Some(d.clone());
        }
        if first.is_none() {
            first = Some(d);
        }
    }
    (first, violation)
}

fn report(
    left: &DecoratedQuiver,
    right: &DecoratedQuiver,
    hl: &HilbertSeries,
    hr: &HilbertSeries,
    perm: Option<&[usize]>,
    bigraded: bool,
    cutoff: usize,
) -> FlatnessReport {
    let (first_difference, violation) = compare(hl, hr, perm, bigraded);
    FlatnessReport {
        quiver: shape_string(left),
        left: decoration_string(left),
        right: decoration_string(right),
        cutoff,
        flat: first_difference.is_none() && hl.stabilized == hr.stabilized,
        first_difference,
        violation,
    }
}

/// Compares the series of a deformed quiver (left) and a degenerate one
/// (right) block by block through degree `cutoff`. Blocks are matched
/// through [`match_shapes`]; x-degrees are compared only when the vertex
/// algebras have the same x-grading.
pub fn flatness_check(left: &DecoratedQuiver, right: &DecoratedQuiver, cutoff: usize, conv: SignConvention) -> Result<FlatnessReport> {
    let perm = match_shapes(left, right).ok_or_else(|| {
        Error::NotComparable(format!("`{}` and `{}` have different shapes", shape_string(left), shape_string(right)))
    })?;
    let bigraded = x_profiles_agree(left, right, &perm);
    let hl = hilbert_series(left, conv, cutoff)?;
    let hr = hilbert_series(right, conv, cutoff)?;
    Ok(report(left, right, &hl, &hr, Some(&perm), bigraded, cutoff))
}

/// Compares total dimensions per path degree only; the quivers may have
/// different shapes.
pub fn flatness_check_degrees(left: &DecoratedQuiver, right: &DecoratedQuiver, cutoff: usize, conv: SignConvention) -> Result<FlatnessReport> {
    let hl = hilbert_series(left, conv, cutoff)?;
    let hr = hilbert_series(right, conv, cutoff)?;
    Ok(report(left, right, &hl, &hr, None, false, cutoff))
}
