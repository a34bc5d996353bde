//! Finite-dimensional unital algebras given by structure constants, together
//! with Frobenius forms and their dual bases.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{dense_to_sparse, sparse_to_dense, Matrix, SparseAcc, SparseVec};
use crate::scalar::{Field, Scalar};

/// A finite-dimensional associative unital algebra over an exact field.
///
/// The product of basis elements `e_i e_j` is stored as a sparse vector at
/// index `i * dim + j`. Optional x-degrees are stored in half-units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDimAlgebra {
    field: Field,
    dim: usize,
    table: Vec<SparseVec>,
    unit: Vec<Scalar>,
    labels: Vec<String>,
    xdeg: Option<Vec<i64>>,
}

/// Validates structure constants and builds an algebra.
///
/// `sc` lists the nonzero constants `(i, j, k, c)` meaning `e_i e_j` has
/// coefficient `c` on `e_k`; repeated entries are summed.
pub fn make_algebra(
    field: Field,
    dim: usize,
    sc: &[(usize, usize, usize, Scalar)],
    unit: Vec<Scalar>,
    labels: Option<Vec<String>>,
    xdeg: Option<Vec<i64>>,
) -> Result<FiniteDimAlgebra> {
    if dim == 0 {
        return Err(Error::UnsupportedParams("algebra dimension must be positive".into()));
    }
    let mut accs = vec![SparseAcc::new(); dim * dim];
    for (i, j, k, c) in sc {
        if *i >= dim || *j >= dim || *k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: (*i).max(*j).max(*k) + 1,
            });
        }
        accs[i * dim + j].add(*k, c);
    }
    let table = accs.into_iter().map(SparseAcc::into_vec).collect();
    FiniteDimAlgebra::from_table(field, dim, table, unit, labels, xdeg)
}

impl FiniteDimAlgebra {
    /// Builds an algebra from a full product table and validates it.
    pub fn from_table(
        field: Field,
        dim: usize,
        table: Vec<SparseVec>,
        unit: Vec<Scalar>,
        labels: Option<Vec<String>>,
        xdeg: Option<Vec<i64>>,
    ) -> Result<FiniteDimAlgebra> {
        if table.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: table.len(),
            });
        }
        if unit.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: unit.len(),
            });
        }
        let labels = match labels {
            Some(l) if l.len() != dim => {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: l.len(),
                })
            }
            Some(l) => l,
            None => (0..dim).map(|i| format!("e{i}")).collect(),
        };
        if let Some(x) = &xdeg {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
        }
        let a = FiniteDimAlgebra {
            field,
            dim,
            table,
            unit,
            labels,
            xdeg,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let u = dense_to_sparse(&self.unit);
        for i in 0..self.dim {
            let e = vec![(i, self.field.one())];
            if self.mul_sparse(&u, &e) != e || self.mul_sparse(&e, &u) != e {
                return Err(Error::BadUnit(i));
            }
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let ij = &self.table[i * self.dim + j];
                for k in 0..self.dim {
                    let left = self.mul_sparse(ij, &vec![(k, self.field.one())]);
                    let jk = &self.table[j * self.dim + k];
                    let right = self.mul_sparse(&vec![(i, self.field.one())], jk);
                    if left != right {
                        return Err(Error::NonAssociative(i, j, k));
                    }
                }
            }
        }
        if let Some(x) = &self.xdeg {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    if self.table[i * self.dim + j]
                        .iter()
                        .any(|(k, _)| x[*k] != x[i] + x[j])
                    {
                        return Err(Error::NotGraded(i, j));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn unit_sparse(&self) -> SparseVec {
        dense_to_sparse(&self.unit)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Replaces the basis labels.
    pub fn with_labels(mut self, labels: Vec<String>) -> FiniteDimAlgebra {
        assert_eq!(labels.len(), self.dim);
        self.labels = labels;
        self
    }

    pub fn is_graded(&self) -> bool {
        self.xdeg.is_some()
    }

    /// x-degree of a basis element in half-units (0 when ungraded).
    pub fn xdeg(&self, i: usize) -> i64 {
        self.xdeg.as_ref().map_or(0, |x| x[i])
    }

    pub fn xdegs(&self) -> Option<&[i64]> {
        self.xdeg.as_deref()
    }

    /// Largest x-degree of a basis element.
    pub fn top_xdeg(&self) -> i64 {
        (0..self.dim).map(|i| self.xdeg(i)).max().unwrap_or(0)
    }

    /// Graded dimension: x-degree (half-units) to multiplicity.
    pub fn hilbert(&self) -> BTreeMap<i64, i64> {
        let mut h = BTreeMap::new();
        for i in 0..self.dim {
            *h.entry(self.xdeg(i)).or_insert(0) += 1;
        }
        h
    }

    /// The product `e_i e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i * self.dim + j]
    }

    pub fn mul_sparse(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut acc = SparseAcc::new();
        for (i, a) in u {
            for (j, b) in v {
                acc.add_scaled(&(a * b), &self.table[i * self.dim + j]);
            }
        }
        acc.into_vec()
    }

    /// Product of two coefficient vectors.
    pub fn multiply(&self, u: &[Scalar], v: &[Scalar]) -> Result<Vec<Scalar>> {
        for w in [u, v] {
            if w.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: w.len(),
                });
            }
        }
        let p = self.mul_sparse(&dense_to_sparse(u), &dense_to_sparse(v));
        Ok(sparse_to_dense(self.field, &p, self.dim))
    }

    /// Matrix of `a ↦ u a`; column j is `u e_j`.
    pub fn left_mult_matrix(&self, u: &[Scalar]) -> Matrix {
        let us = dense_to_sparse(u);
        let mut m = Matrix::zeros(self.field, self.dim, self.dim);
        for j in 0..self.dim {
            for (k, c) in self.mul_sparse(&us, &vec![(j, self.field.one())]) {
                m.set(k, j, c);
            }
        }
        m
    }

    /// Matrix of `a ↦ a u`; column j is `e_j u`.
    pub fn right_mult_matrix(&self, u: &[Scalar]) -> Matrix {
        let us = dense_to_sparse(u);
        let mut m = Matrix::zeros(self.field, self.dim, self.dim);
        for j in 0..self.dim {
            for (k, c) in self.mul_sparse(&vec![(j, self.field.one())], &us) {
                m.set(k, j, c);
            }
        }
        m
    }

    /// Whether `u` is invertible, decided by the rank of left multiplication.
    pub fn is_unit(&self, u: &[Scalar]) -> bool {
        self.left_mult_matrix(u).rank() == self.dim
    }

    /// Two-sided inverse of a unit.
    pub fn inverse(&self, u: &[Scalar]) -> Result<Vec<Scalar>> {
        self.left_mult_matrix(u)
            .solve(&self.unit)
            .filter(|_| self.is_unit(u))
            .ok_or(Error::NotAUnit)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.basis_product(i, j) == self.basis_product(j, i)))
    }

    /// Basis vector `e_i`.
    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        self.field.unit_vec(self.dim, i)
    }

    /// Direct product `A × B` with the basis of `A` followed by that of `B`.
    pub fn product(&self, other: &FiniteDimAlgebra) -> FiniteDimAlgebra {
        assert_eq!(self.field, other.field, "product over different fields");
        let n = self.dim + other.dim;
        let mut table = vec![Vec::new(); n * n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                table[i * n + j] = self.table[i * self.dim + j].clone();
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                table[(self.dim + i) * n + self.dim + j] = other.table[i * other.dim + j]
                    .iter()
                    .map(|(k, c)| (self.dim + k, c.clone()))
                    .collect();
            }
        }
        let mut unit = self.unit.clone();
        unit.extend(other.unit.iter().cloned());
        let labels = self
            .labels
            .iter()
            .map(|l| format!("({l},0)"))
            .chain(other.labels.iter().map(|l| format!("(0,{l})")))
            .collect();
        let xdeg = match (&self.xdeg, &other.xdeg) {
            (None, None) => None,
            _ => Some(
                (0..self.dim)
                    .map(|i| self.xdeg(i))
                    .chain((0..other.dim).map(|i| other.xdeg(i)))
                    .collect(),
            ),
        };
        FiniteDimAlgebra {
            field: self.field,
            dim: n,
            table,
            unit,
            labels,
            xdeg,
        }
    }
}

/// A linear functional on an algebra, given by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusForm {
    pub lambda: Vec<Scalar>,
}

/// Result of [`validate_frobenius`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormReport {
    pub nondegenerate: bool,
    pub symmetric: bool,
    /// A basis pair with `λ(e_i e_j) ≠ λ(e_j e_i)`, when not symmetric.
    pub witness: Option<(usize, usize)>,
}

impl FrobeniusForm {
    pub fn new(lambda: Vec<Scalar>) -> FrobeniusForm {
        FrobeniusForm { lambda }
    }

    pub fn eval(&self, v: &[Scalar]) -> Scalar {
        let f = self.lambda[0].field();
        let mut s = f.zero();
        for (a, b) in self.lambda.iter().zip(v) {
            if !a.is_zero() && !b.is_zero() {
                s += &(a * b);
            }
        }
        s
    }

    pub fn eval_sparse(&self, v: &SparseVec) -> Scalar {
        let mut s = self.lambda[0].field().zero();
        for (i, c) in v {
            s += &(&self.lambda[*i] * c);
        }
        s
    }

    /// Gram matrix `G[i][j] = λ(e_i e_j)`.
    pub fn gram(&self, a: &FiniteDimAlgebra) -> Matrix {
        let n = a.dim();
        let mut g = Matrix::zeros(a.field(), n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, self.eval_sparse(a.basis_product(i, j)));
            }
        }
        g
    }

    /// Sum of two forms on the factors of a direct product.
    pub fn direct_sum(&self, other: &FrobeniusForm) -> FrobeniusForm {
        let mut l = self.lambda.clone();
        l.extend(other.lambda.iter().cloned());
        FrobeniusForm { lambda: l }
    }
}

fn check_len(a: &FiniteDimAlgebra, v: &[Scalar]) -> Result<()> {
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: v.len(),
        });
    }
    Ok(())
}

/// Reports nondegeneracy and symmetry of `λ` on `A`.
pub fn validate_frobenius(a: &FiniteDimAlgebra, form: &FrobeniusForm) -> FormReport {
    if form.lambda.len() != a.dim() {
        return FormReport {
            nondegenerate: false,
            symmetric: false,
            witness: None,
        };
    }
    let g = form.gram(a);
    let nondegenerate = g.rank() == a.dim();
    let mut witness = None;
    'outer: for i in 0..a.dim() {
        for j in i + 1..a.dim() {
            if g.get(i, j) != g.get(j, i) {
                witness = Some((i, j));
                break 'outer;
            }
        }
    }
    FormReport {
        nondegenerate,
        symmetric: witness.is_none(),
        witness,
    }
}

/// Dual basis `f_1..f_n` with `λ(e_i f_j) = δ_ij`.
pub fn frobenius_dual_basis(a: &FiniteDimAlgebra, form: &FrobeniusForm) -> Result<Vec<Vec<Scalar>>> {
    check_len(a, &form.lambda)?;
    let inv = form.gram(a).inverse().ok_or(Error::DegenerateForm)?;
    Ok((0..a.dim()).map(|j| inv.col(j)).collect())
}

/// The form `λ ∘ L_u`, defined for a unit `u`.
pub fn change_form(a: &FiniteDimAlgebra, form: &FrobeniusForm, u: &[Scalar]) -> Result<FrobeniusForm> {
    check_len(a, u)?;
    check_len(a, &form.lambda)?;
    if !a.is_unit(u) {
        return Err(Error::NotAUnit);
    }
    let l = a.left_mult_matrix(u);
    Ok(FrobeniusForm {
        lambda: (0..a.dim()).map(|j| form.eval(&l.col(j))).collect(),
    })
}
