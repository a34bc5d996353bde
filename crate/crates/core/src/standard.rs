//! Named algebras with their canonical Frobenius forms.

use std::collections::BTreeMap;

use crate::algebra::{make_algebra, FiniteDimAlgebra, FrobeniusForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Field, Scalar};

/// Parameters of a named algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Ground,
    SumOfGround(usize),
    TruncatedPoly(usize),
    ZAlgebra(usize),
    BilinearForm(Matrix),
    Clifford(Matrix),
    Exterior(usize),
    MatrixAlgebra(usize),
    GroupLike(usize),
    Product(Box<StandardKind>, Box<StandardKind>),
}

/// An algebra together with the named forms it carries; the first one is the
/// canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardAlgebra {
    pub algebra: FiniteDimAlgebra,
    pub forms: Vec<(String, FrobeniusForm)>,
}

impl StandardAlgebra {
    fn single(algebra: FiniteDimAlgebra, form: FrobeniusForm) -> StandardAlgebra {
        StandardAlgebra {
            algebra,
            forms: vec![("canonical".into(), form)],
        }
    }

    pub fn form(&self) -> &FrobeniusForm {
        &self.forms[0].1
    }

    pub fn named_form(&self, name: &str) -> Option<&FrobeniusForm> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

/// Builds a named algebra over `field`.
pub fn standard_algebra(field: Field, kind: &StandardKind) -> Result<StandardAlgebra> {
    match kind {
        StandardKind::Ground => Ok(ground(field)),
        StandardKind::SumOfGround(n) => sum_of_ground(field, *n),
        StandardKind::TruncatedPoly(n) => truncated_poly(field, *n),
        StandardKind::ZAlgebra(n) => z_algebra(field, *n),
        StandardKind::BilinearForm(m) => bilinear_form_algebra(m),
        StandardKind::Clifford(b) => clifford(b),
        StandardKind::Exterior(n) => exterior(field, *n),
        StandardKind::MatrixAlgebra(n) => matrix_algebra(field, *n),
        StandardKind::GroupLike(n) => group_like(field, *n),
        StandardKind::Product(a, b) => {
            let a = standard_algebra(field, a)?;
            let b = standard_algebra(field, b)?;
            Ok(product(&a, &b))
        }
    }
}

fn top_form(field: Field, dim: usize) -> FrobeniusForm {
    FrobeniusForm::new(field.unit_vec(dim, dim - 1))
}

/// The ground field `k`.
pub fn ground(field: Field) -> StandardAlgebra {
    let a = make_algebra(field, 1, &[(0, 0, 0, field.one())], vec![field.one()], Some(vec!["1".into()]), Some(vec![0]))
        .expect("ground field is valid");
    StandardAlgebra::single(a, FrobeniusForm::new(vec![field.one()]))
}

/// `k^n` with orthogonal idempotents and the sum-of-coordinates form.
pub fn sum_of_ground(field: Field, n: usize) -> Result<StandardAlgebra> {
    if n == 0 {
        return Err(Error::UnsupportedParams("sum_of_ground needs n >= 1".into()));
    }
    let sc: Vec<_> = (0..n).map(|i| (i, i, i, field.one())).collect();
    let a = make_algebra(
        field,
        n,
        &sc,
        vec![field.one(); n],
        Some((1..=n).map(|i| format!("e{i}")).collect()),
        Some(vec![0; n]),
    )?;
    Ok(StandardAlgebra::single(a, FrobeniusForm::new(vec![field.one(); n])))
}

/// `k[x]/(x^n)` with `x` in x-degree one and the top-coefficient form.
pub fn truncated_poly(field: Field, n: usize) -> Result<StandardAlgebra> {
    if n == 0 {
        return Err(Error::UnsupportedParams("truncated_poly needs n >= 1".into()));
    }
    let mut sc = Vec::new();
    for i in 0..n {
        for j in 0..n - i {
            sc.push((i, j, i + j, field.one()));
        }
    }
    let labels = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect();
    let a = make_algebra(
        field,
        n,
        &sc,
        field.unit_vec(n, 0),
        Some(labels),
        Some((0..n as i64).map(|i| 2 * i).collect()),
    )?;
    Ok(StandardAlgebra::single(a, top_form(field, n)))
}

/// `k ⊕ V ⊕ k` with `v_i v_j = M_ij w` for an invertible matrix `M`.
///
/// The middle layer sits in x-degree 1/2 and the top line in x-degree 1.
pub fn bilinear_form_algebra(m: &Matrix) -> Result<StandardAlgebra> {
    let field = m.field();
    let r = m.rows();
    if r != m.cols() {
        return Err(Error::UnsupportedParams("bilinear form matrix must be square".into()));
    }
    if r > 0 && m.rank() < r {
        return Err(Error::UnsupportedParams("bilinear form must be nondegenerate".into()));
    }
    let dim = r + 2;
    let top = r + 1;
    let mut sc = Vec::new();
    for i in 0..dim {
        sc.push((0, i, i, field.one()));
        if i > 0 {
            sc.push((i, 0, i, field.one()));
        }
    }
    for i in 0..r {
        for j in 0..r {
            if !m.get(i, j).is_zero() {
                sc.push((i + 1, j + 1, top, m.get(i, j).clone()));
            }
        }
    }
    let mut labels = vec!["1".to_string()];
    labels.extend((1..=r).map(|i| format!("v{i}")));
    labels.push("w".into());
    let mut xdeg = vec![0];
    xdeg.extend(std::iter::repeat_n(1, r));
    xdeg.push(2);
    let a = make_algebra(field, dim, &sc, field.unit_vec(dim, 0), Some(labels), Some(xdeg))?;
    Ok(StandardAlgebra::single(a, top_form(field, dim)))
}

/// `Z_n = k ⊕ k^{n-2} ⊕ k` with the identity form on the middle layer.
///
/// `Z_1` is the ground field and `Z_2` is `k[w]/(w^2)`.
pub fn z_algebra(field: Field, n: usize) -> Result<StandardAlgebra> {
    match n {
        0 => Err(Error::UnsupportedParams("z_algebra needs n >= 1".into())),
        1 => Ok(ground(field)),
        _ => {
            let mut s = bilinear_form_algebra(&Matrix::identity(field, n - 2))?;
            let mut labels = vec!["1".to_string()];
            labels.extend((1..=n - 2).map(|i| format!("x{i}")));
            labels.push("w".into());
            s.algebra = s.algebra.with_labels(labels);
            Ok(s)
        }
    }
}

/// Subsets of `{0..m}` ordered by size, then lexicographically.
fn graded_subsets(m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u64..1 << m)
        .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

type Combo = BTreeMap<Vec<usize>, Scalar>;

fn combo_add(out: &mut Combo, w: Vec<usize>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = out.entry(w.clone()).or_insert_with(|| c.field().zero());
    *e += &c;
    if e.is_zero() {
        out.remove(&w);
    }
}

/// Sorted word times a generator in the Clifford algebra of `b`.
fn word_times_gen(w: &[usize], j: usize, b: &Matrix) -> Combo {
    let f = b.field();
    let mut out = Combo::new();
    match w.split_last() {
        None => combo_add(&mut out, vec![j], f.one()),
        Some((&s, _)) if s < j => {
            let mut v = w.to_vec();
            v.push(j);
            combo_add(&mut out, v, f.one());
        }
        Some((&s, rest)) if s == j => combo_add(&mut out, rest.to_vec(), b.get(j, j).clone()),
        Some((&s, rest)) => {
            // w' s j = -(w' j) s + 2 B(s, j) w'
            for (u, c) in word_times_gen(rest, j, b) {
                for (u2, c2) in word_times_gen(&u, s, b) {
                    combo_add(&mut out, u2, -(&c * &c2));
                }
            }
            combo_add(&mut out, rest.to_vec(), &f.from_i64(2) * b.get(s, j));
        }
    }
    out
}

fn clifford_like(b: &Matrix, graded: bool) -> Result<StandardAlgebra> {
    let field = b.field();
    let m = b.rows();
    if m != b.cols() || *b != b.transpose() {
        return Err(Error::UnsupportedParams("Clifford form must be a symmetric matrix".into()));
    }
    if m > 6 {
        return Err(Error::UnsupportedParams("Clifford algebras are limited to 6 generators".into()));
    }
    let basis = graded_subsets(m);
    let index: BTreeMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut sc = Vec::new();
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let mut cur = Combo::new();
            cur.insert(u.clone(), field.one());
            for &g in v {
                let mut next = Combo::new();
                for (w, c) in cur {
                    for (w2, c2) in word_times_gen(&w, g, b) {
                        combo_add(&mut next, w2, &c * &c2);
                    }
                }
                cur = next;
            }
            for (w, c) in cur {
                sc.push((i, j, index[&w], c));
            }
        }
    }
    let labels = basis
        .iter()
        .map(|w| {
            if w.is_empty() {
                "1".to_string()
            } else {
                w.iter().map(|i| format!("v{}", i + 1)).collect::<String>()
            }
        })
        .collect();
    let xdeg = graded.then(|| basis.iter().map(|w| w.len() as i64).collect());
    let dim = basis.len();
    let a = make_algebra(field, dim, &sc, field.unit_vec(dim, 0), Some(labels), xdeg)?;
    Ok(StandardAlgebra::single(a, top_form(field, dim)))
}

/// Clifford algebra of a symmetric bilinear form: `v_i v_j + v_j v_i = 2 B_ij`.
///
/// The form is the coefficient of the top monomial.
pub fn clifford(b: &Matrix) -> Result<StandardAlgebra> {
    clifford_like(b, false)
}

/// Exterior algebra on `n` generators, each in x-degree 1/2, with the top
/// wedge projection.
pub fn exterior(field: Field, n: usize) -> Result<StandardAlgebra> {
    clifford_like(&Matrix::zeros(field, n, n), true)
}

/// `Mat_n(k)` with basis `E_ij` in row-major order.
///
/// Carries the trace form `trace` and, for `n >= 2`, the nonsymmetric form
/// `offdiag` summing the off-diagonal entries. Neither is preferred: the
/// caller names one.
pub fn matrix_algebra(field: Field, n: usize) -> Result<StandardAlgebra> {
    if n == 0 {
        return Err(Error::UnsupportedParams("matrix_algebra needs n >= 1".into()));
    }
    let dim = n * n;
    let mut sc = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                sc.push((i * n + j, j * n + l, i * n + l, field.one()));
            }
        }
    }
    let mut unit = field.vec_zeros(dim);
    for i in 0..n {
        unit[i * n + i] = field.one();
    }
    let labels = (0..dim).map(|k| format!("E{}{}", k / n + 1, k % n + 1)).collect();
    let a = make_algebra(field, dim, &sc, unit.clone(), Some(labels), Some(vec![0; dim]))?;
    let mut forms = vec![("trace".to_string(), FrobeniusForm::new(unit.clone()))];
    if n >= 2 {
        let off = unit.iter().map(|u| if u.is_zero() { field.one() } else { field.zero() }).collect();
        forms.push(("offdiag".to_string(), FrobeniusForm::new(off)));
    }
    Ok(StandardAlgebra { algebra: a, forms })
}

/// `k[x]/(x^n - 1)` with the top-coefficient form.
pub fn group_like(field: Field, n: usize) -> Result<StandardAlgebra> {
    if n == 0 {
        return Err(Error::UnsupportedParams("group_like needs n >= 1".into()));
    }
    let mut sc = Vec::new();
    for i in 0..n {
        for j in 0..n {
            sc.push((i, j, (i + j) % n, field.one()));
        }
    }
    let labels = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect();
    let a = make_algebra(field, n, &sc, field.unit_vec(n, 0), Some(labels), None)?;
    Ok(StandardAlgebra::single(a, top_form(field, n)))
}

/// A primitive n-th root of unity in `field`, if one exists.
pub fn primitive_root_of_unity(field: Field, n: usize) -> Option<Scalar> {
    match field {
        Field::Rational => match n {
            1 => Some(field.one()),
            2 => Some(field.from_i64(-1)),
            _ => None,
        },
        Field::Prime(p) => {
            if n == 0 || !(p as usize - 1).is_multiple_of(n) {
                return None;
            }
            (1..p as i64).map(|g| field.from_i64(g)).find(|g| {
                let mut x = field.one();
                for k in 1..=n {
                    x = &x * g;
                    if x.is_one() {
                        return k == n;
                    }
                }
                false
            })
        }
    }
}

/// The `n` orthogonal idempotents of `k[x]/(x^n - 1)` obtained by discrete
/// Fourier interpolation, in the basis `1, x, ..., x^{n-1}`.
pub fn group_like_idempotents(field: Field, n: usize) -> Result<Vec<Vec<Scalar>>> {
    let missing = || Error::FieldLacksRoots(format!("no primitive {n}-th root of unity over {field}"));
    let zeta = primitive_root_of_unity(field, n).ok_or_else(missing)?;
    let n_inv = field.from_i64(n as i64).inv().map_err(|_| missing())?;
    let zeta_inv = zeta.inv()?;
    let mut out = Vec::new();
    let mut base = field.one();
    for _ in 0..n {
        let mut v = Vec::with_capacity(n);
        let mut c = n_inv.clone();
        for _ in 0..n {
            v.push(c.clone());
            c = &c * &base;
        }
        out.push(v);
        base = &base * &zeta_inv;
    }
    Ok(out)
}

/// Direct product with the sum of the canonical forms.
pub fn product(a: &StandardAlgebra, b: &StandardAlgebra) -> StandardAlgebra {
    StandardAlgebra::single(a.algebra.product(&b.algebra), a.form().direct_sum(b.form()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{frobenius_dual_basis, validate_frobenius};

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn truncated_poly_dual_basis() {
        let s = truncated_poly(q(), 2).unwrap();
        let d = frobenius_dual_basis(&s.algebra, s.form()).unwrap();
        assert_eq!(d, vec![s.algebra.basis_vec(1), s.algebra.basis_vec(0)]);
    }

    #[test]
    fn z_algebra_products() {
        let z = z_algebra(q(), 4).unwrap();
        let a = &z.algebra;
        assert_eq!(a.dim(), 4);
        let x1 = a.basis_vec(1);
        let x2 = a.basis_vec(2);
        assert_eq!(a.multiply(&x1, &x1).unwrap(), a.basis_vec(3));
        assert!(a.multiply(&x1, &x2).unwrap().iter().all(Scalar::is_zero));
        assert!(a.multiply(&x1, &a.basis_vec(3)).unwrap().iter().all(Scalar::is_zero));
        assert!(validate_frobenius(a, z.form()).symmetric);
    }

    #[test]
    fn matrix_forms() {
        let m = matrix_algebra(q(), 2).unwrap();
        let t = validate_frobenius(&m.algebra, m.named_form("trace").unwrap());
        assert!(t.nondegenerate && t.symmetric);
        let o = validate_frobenius(&m.algebra, m.named_form("offdiag").unwrap());
        assert!(o.nondegenerate && !o.symmetric);
        assert_eq!(o.witness, Some((0, 1)));
        assert_eq!(matrix_algebra(q(), 1).unwrap().algebra, ground(q()).algebra.with_labels(vec!["E11".into()]));
    }

    #[test]
    fn clifford_relations() {
        let b = Matrix::from_i64(q(), &[vec![1, 1], vec![1, 3]]);
        let c = clifford(&b).unwrap();
        let a = &c.algebra;
        assert_eq!(a.dim(), 4);
        let v1 = a.basis_vec(1);
        let v2 = a.basis_vec(2);
        let anti = a.multiply(&v1, &v2).unwrap();
        let anti2 = a.multiply(&v2, &v1).unwrap();
        let sum: Vec<Scalar> = anti.iter().zip(&anti2).map(|(x, y)| x + y).collect();
        assert_eq!(sum, a.unit().iter().map(|u| u * &q().from_i64(2)).collect::<Vec<_>>());
        assert_eq!(a.multiply(&v2, &v2).unwrap(), a.unit().iter().map(|u| u * &q().from_i64(3)).collect::<Vec<_>>());
    }

    #[test]
    fn exterior_symmetry_depends_on_parity() {
        for n in 1..=4 {
            let e = exterior(q(), n).unwrap();
            let r = validate_frobenius(&e.algebra, e.form());
            assert!(r.nondegenerate);
            assert_eq!(r.symmetric, n % 2 == 1, "n = {n}");
        }
    }

    #[test]
    fn group_like_idempotents_gf7() {
        let f = Field::prime(7).unwrap();
        let g = group_like(f, 3).unwrap();
        let es = group_like_idempotents(f, 3).unwrap();
        let mut total = f.vec_zeros(3);
        for (i, e) in es.iter().enumerate() {
            assert_eq!(&g.algebra.multiply(e, e).unwrap(), e);
            for (j, e2) in es.iter().enumerate() {
                if i != j {
                    assert!(g.algebra.multiply(e, e2).unwrap().iter().all(Scalar::is_zero));
                }
            }
            total = total.iter().zip(e).map(|(a, b)| a + b).collect();
        }
        assert_eq!(total, g.algebra.unit().to_vec());
        assert!(matches!(group_like_idempotents(q(), 3), Err(Error::FieldLacksRoots(_))));
    }
}
