//! Decorated quivers: validation of condition (F), doubling, folding by
//! automorphisms and Cartan data.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{validate_frobenius, FiniteDimAlgebra, FrobeniusForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Field;

/// A named vertex algebra with its Frobenius form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoration {
    pub name: String,
    pub algebra: FiniteDimAlgebra,
    pub form: FrobeniusForm,
}

impl Decoration {
    pub fn new(name: impl Into<String>, algebra: FiniteDimAlgebra, form: FrobeniusForm) -> Decoration {
        Decoration {
            name: name.into(),
            algebra,
            form,
        }
    }

    fn same_structure(&self, o: &Decoration) -> bool {
        self.algebra == o.algebra && self.form == o.form
    }
}

/// Bimodule carried by an arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrowKind {
    /// `M = A_s ⊗_k A_t`.
    TensorUnit,
    /// `M = A_s = A_t` as a bimodule over itself.
    Identification,
}

/// Whether an arrow is original or the dual of an original arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Positive,
    /// Dual of the arrow with the given index.
    Starred(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
    pub kind: ArrowKind,
    /// x-degree of the arrow itself, in half-units.
    pub xweight: i64,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    /// Index into [`DecoratedQuiver::decorations`].
    pub decoration: usize,
}

/// Whether nonsymmetric vertex forms are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormPolicy {
    RequireSymmetric,
    AllowNonsymmetric,
}

/// A quiver with a Frobenius algebra at each vertex and a condition-(F)
/// bimodule at each arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedQuiver {
    decorations: Vec<Decoration>,
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
    doubled: bool,
}

/// Arrow description used by the builders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowSpec {
    pub id: String,
    pub source: String,
    pub target: String,
    pub kind: ArrowKind,
    pub xweight: Option<i64>,
}

impl ArrowSpec {
    pub fn new(id: &str, source: &str, target: &str, kind: ArrowKind) -> ArrowSpec {
        ArrowSpec {
            id: id.into(),
            source: source.into(),
            target: target.into(),
            kind,
            xweight: None,
        }
    }

    pub fn with_xweight(mut self, w: i64) -> ArrowSpec {
        self.xweight = Some(w);
        self
    }
}

/// Default arrow weight: zero on tensor arrows, half the top x-degree of the
/// algebra on identification arrows.
pub fn default_xweight(kind: ArrowKind, algebra: &FiniteDimAlgebra) -> i64 {
    match kind {
        ArrowKind::TensorUnit => 0,
        ArrowKind::Identification => algebra.top_xdeg() / 2,
    }
}

impl DecoratedQuiver {
    /// Validates and builds a decorated quiver.
    ///
    /// `vertices` pairs a vertex id with an index into `decorations`.
    pub fn build(
        decorations: Vec<Decoration>,
        vertices: Vec<(String, usize)>,
        arrows: Vec<ArrowSpec>,
    ) -> Result<DecoratedQuiver> {
        DecoratedQuiver::build_with(decorations, vertices, arrows, FormPolicy::RequireSymmetric)
    }

    pub fn build_with(
        decorations: Vec<Decoration>,
        vertices: Vec<(String, usize)>,
        arrows: Vec<ArrowSpec>,
        policy: FormPolicy,
    ) -> Result<DecoratedQuiver> {
        let field = decorations.first().map(|d| d.algebra.field());
        for d in &decorations {
            if Some(d.algebra.field()) != field {
                return Err(Error::ConditionFViolation(format!("algebra `{}` is over a different field", d.name)));
            }
            let r = validate_frobenius(&d.algebra, &d.form);
            if !r.nondegenerate {
                return Err(Error::ConditionFViolation(format!("form on algebra `{}` is degenerate", d.name)));
            }
            if !r.symmetric && policy == FormPolicy::RequireSymmetric {
                let (i, j) = r.witness.unwrap_or((0, 0));
                return Err(Error::ConditionFViolation(format!(
                    "form on algebra `{}` is not symmetric at ({}, {})",
                    d.name,
                    d.algebra.label(i),
                    d.algebra.label(j)
                )));
            }
        }
        let mut index = BTreeMap::new();
        let mut vs = Vec::new();
        for (id, dec) in vertices {
            if dec >= decorations.len() {
                return Err(Error::ConditionFViolation(format!("vertex `{id}` uses an undeclared algebra")));
            }
            if index.insert(id.clone(), vs.len()).is_some() {
                return Err(Error::ConditionFViolation(format!("vertex `{id}` declared twice")));
            }
            vs.push(Vertex { id, decoration: dec });
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in arrows {
            let (Some(&s), Some(&t)) = (index.get(&a.source), index.get(&a.target)) else {
                return Err(Error::DanglingArrow(a.id));
            };
            if !seen.insert(a.id.clone()) {
                return Err(Error::ConditionFViolation(format!("arrow `{}` declared twice", a.id)));
            }
            let (ds, dt) = (&decorations[vs[s].decoration], &decorations[vs[t].decoration]);
            if a.kind == ArrowKind::Identification && !ds.same_structure(dt) {
                return Err(Error::ConditionFViolation(format!(
                    "identification arrow `{}` joins different algebras `{}` and `{}`",
                    a.id, ds.name, dt.name
                )));
            }
            let xweight = a.xweight.unwrap_or_else(|| default_xweight(a.kind, &ds.algebra));
            out.push(Arrow {
                id: a.id,
                source: s,
                target: t,
                kind: a.kind,
                xweight,
                role: Role::Positive,
            });
        }
        Ok(DecoratedQuiver {
            decorations,
            vertices: vs,
            arrows: out,
            doubled: false,
        })
    }

    pub fn field(&self) -> Field {
        self.decorations.first().map_or(Field::Rational, |d| d.algebra.field())
    }

    pub fn decorations(&self) -> &[Decoration] {
        &self.decorations
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_doubled(&self) -> bool {
        self.doubled
    }

    pub fn decoration(&self, v: usize) -> &Decoration {
        &self.decorations[self.vertices[v].decoration]
    }

    pub fn algebra(&self, v: usize) -> &FiniteDimAlgebra {
        &self.decoration(v).algebra
    }

    pub fn form(&self, v: usize) -> &FrobeniusForm {
        &self.decoration(v).form
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    /// Dimension of the bimodule carried by an arrow.
    pub fn bimodule_dim(&self, a: usize) -> usize {
        let a = &self.arrows[a];
        match a.kind {
            ArrowKind::TensorUnit => self.algebra(a.source).dim() * self.algebra(a.target).dim(),
            ArrowKind::Identification => self.algebra(a.source).dim(),
        }
    }

    /// Sum of the vertex algebra dimensions.
    pub fn total_vertex_dim(&self) -> usize {
        (0..self.num_vertices()).map(|v| self.algebra(v).dim()).sum()
    }

    /// Replaces the form at one decoration, keeping the rest.
    pub fn with_form(&self, decoration: usize, form: FrobeniusForm, policy: FormPolicy) -> Result<DecoratedQuiver> {
        let mut decs = self.decorations.clone();
        decs[decoration].form = form;
        let r = validate_frobenius(&decs[decoration].algebra, &decs[decoration].form);
        if !r.nondegenerate || (!r.symmetric && policy == FormPolicy::RequireSymmetric) {
            return Err(Error::ConditionFViolation(format!(
                "replacement form on `{}` is not admissible",
                decs[decoration].name
            )));
        }
        Ok(DecoratedQuiver {
            decorations: decs,
            ..self.clone()
        })
    }

    /// Positive arrows only.
    pub fn positive(&self) -> DecoratedQuiver {
        DecoratedQuiver {
            arrows: self.arrows.iter().filter(|a| a.role == Role::Positive).cloned().collect(),
            doubled: false,
            ..self.clone()
        }
    }

    /// Adds a reversed arrow `α*` for each positive arrow `α`, with the same
    /// kind and weight. Doubling a doubled quiver returns it unchanged.
    pub fn double(&self) -> DecoratedQuiver {
        if self.doubled {
            return self.clone();
        }
        let mut arrows = self.arrows.clone();
        for (i, a) in self.arrows.iter().enumerate() {
            arrows.push(Arrow {
                id: format!("{}*", a.id),
                source: a.target,
                target: a.source,
                kind: a.kind,
                xweight: a.xweight,
                role: Role::Starred(i),
            });
        }
        DecoratedQuiver {
            arrows,
            doubled: true,
            ..self.clone()
        }
    }

    /// Index of the dual arrow in a doubled quiver.
    pub fn dual_arrow(&self, a: usize) -> usize {
        match self.arrows[a].role {
            Role::Starred(o) => o,
            Role::Positive => self
                .arrows
                .iter()
                .position(|b| b.role == Role::Starred(a))
                .expect("quiver is doubled"),
        }
    }

    /// Whether the underlying graph is bipartite (loops make it non-bipartite).
    pub fn is_bipartite(&self) -> bool {
        let n = self.num_vertices();
        let mut colour = vec![None; n];
        for start in 0..n {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                let c = colour[v].unwrap();
                for a in &self.arrows {
                    let w = if a.source == v {
                        a.target
                    } else if a.target == v {
                        a.source
                    } else {
                        continue;
                    };
                    match colour[w] {
                        None => {
                            colour[w] = Some(!c);
                            stack.push(w);
                        }
                        Some(cw) if cw == c => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

/// A permutation of vertices and arrows given by images of indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub vertices: Vec<usize>,
    pub arrows: Vec<usize>,
}

impl Automorphism {
    pub fn identity(dq: &DecoratedQuiver) -> Automorphism {
        Automorphism {
            vertices: (0..dq.num_vertices()).collect(),
            arrows: (0..dq.arrows().len()).collect(),
        }
    }

    /// Builds an automorphism from disjoint cycles of vertex and arrow ids.
    pub fn from_cycles(dq: &DecoratedQuiver, vertex_cycles: &[Vec<String>], arrow_cycles: &[Vec<String>]) -> Result<Automorphism> {
        let mut g = Automorphism::identity(dq);
        for cyc in vertex_cycles {
            let idx = cyc
                .iter()
                .map(|v| dq.vertex_index(v).ok_or_else(|| Error::NotAnAutomorphism(format!("unknown vertex `{v}`"))))
                .collect::<Result<Vec<_>>>()?;
            for k in 0..idx.len() {
                g.vertices[idx[k]] = idx[(k + 1) % idx.len()];
            }
        }
        for cyc in arrow_cycles {
            let idx = cyc
                .iter()
                .map(|a| dq.arrow_index(a).ok_or_else(|| Error::NotAnAutomorphism(format!("unknown arrow `{a}`"))))
                .collect::<Result<Vec<_>>>()?;
            for k in 0..idx.len() {
                g.arrows[idx[k]] = idx[(k + 1) % idx.len()];
            }
        }
        Ok(g)
    }

    fn check(&self, dq: &DecoratedQuiver) -> Result<()> {
        let n = dq.num_vertices();
        let m = dq.arrows().len();
        let is_perm = |p: &[usize], k: usize| p.len() == k && p.iter().collect::<BTreeSet<_>>().len() == k && p.iter().all(|&x| x < k);
        if !is_perm(&self.vertices, n) || !is_perm(&self.arrows, m) {
            return Err(Error::NotAnAutomorphism("not a permutation".into()));
        }
        for v in 0..n {
            if !dq.decoration(v).same_structure(dq.decoration(self.vertices[v])) {
                return Err(Error::NotAnAutomorphism(format!(
                    "vertex `{}` and its image carry different algebras",
                    dq.vertices()[v].id
                )));
            }
        }
        for (i, a) in dq.arrows().iter().enumerate() {
            let b = &dq.arrows()[self.arrows[i]];
            if b.source != self.vertices[a.source]
                || b.target != self.vertices[a.target]
                || b.kind != a.kind
                || b.xweight != a.xweight
            {
                return Err(Error::NotAnAutomorphism(format!("arrow `{}`", a.id)));
            }
        }
        Ok(())
    }
}

fn orbits(gens: &[&[usize]], n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut orbit = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in gens {
                let y = g[x];
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Quotient by the group generated by `gens`, with direct-sum decorations on
/// vertex orbits and direct-sum bimodules on arrow orbits.
pub fn fold(dq: &DecoratedQuiver, gens: &[Automorphism]) -> Result<DecoratedQuiver> {
    if dq.is_doubled() {
        return fold(&dq.positive(), gens);
    }
    for g in gens {
        g.check(dq)?;
    }
    let vgens: Vec<&[usize]> = gens.iter().map(|g| g.vertices.as_slice()).collect();
    let agens: Vec<&[usize]> = gens.iter().map(|g| g.arrows.as_slice()).collect();
    let vorbits = orbits(&vgens, dq.num_vertices());
    let aorbits = orbits(&agens, dq.arrows().len());
    let mut orbit_of = vec![0; dq.num_vertices()];
    for (k, o) in vorbits.iter().enumerate() {
        for &v in o {
            orbit_of[v] = k;
        }
    }

    let mut decorations: Vec<Decoration> = Vec::new();
    let mut vertices = Vec::new();
    for o in &vorbits {
        let mut d = dq.decoration(o[0]).clone();
        for &v in &o[1..] {
            let e = dq.decoration(v);
            d = Decoration::new(
                format!("{}+{}", d.name, e.name),
                d.algebra.product(&e.algebra),
                d.form.direct_sum(&e.form),
            );
        }
        let idx = match decorations.iter().position(|x| x.same_structure(&d)) {
            Some(i) => i,
            None => {
                decorations.push(d);
                decorations.len() - 1
            }
        };
        let id = o.iter().map(|&v| dq.vertices()[v].id.as_str()).collect::<Vec<_>>().join("+");
        vertices.push((id, idx));
    }

    let mut arrows = Vec::new();
    for o in &aorbits {
        let first = &dq.arrows()[o[0]];
        let (os, ot) = (orbit_of[first.source], orbit_of[first.target]);
        let (vs, vt) = (&vorbits[os], &vorbits[ot]);
        let id = o.iter().map(|&a| dq.arrows()[a].id.as_str()).collect::<Vec<_>>().join("+");
        let pairs: BTreeSet<(usize, usize)> = o.iter().map(|&a| (dq.arrows()[a].source, dq.arrows()[a].target)).collect();
        let tensor_like = o.iter().all(|&a| {
            let a = &dq.arrows()[a];
            a.kind == ArrowKind::TensorUnit || dq.algebra(a.source).dim() == 1
        });
        let ident_like = o.iter().all(|&a| dq.arrows()[a].kind == ArrowKind::Identification);
        let covers_product = pairs.len() == o.len() && o.len() == vs.len() * vt.len();
        let diagonal = o.len() == vs.len()
            && vs.len() == vt.len()
            && pairs.len() == o.len()
            && pairs.iter().all(|(s, t)| vs.binary_search(s).ok() == vt.binary_search(t).ok());
        let kind = if tensor_like && covers_product {
            ArrowKind::TensorUnit
        } else if ident_like && diagonal {
            ArrowKind::Identification
        } else {
            return Err(Error::ConditionFViolation(format!(
                "arrow orbit `{id}` does not fold to a condition-(F) bimodule"
            )));
        };
        arrows.push(
            ArrowSpec::new(&id, &vertices[os].0, &vertices[ot].0, kind).with_xweight(first.xweight),
        );
    }
    DecoratedQuiver::build_with(decorations, vertices, arrows, FormPolicy::AllowNonsymmetric)
}

/// All automorphisms of a quiver with at most 10 vertices, by backtracking
/// over vertex permutations that preserve decorations and arrow counts.
pub fn automorphism_group(dq: &DecoratedQuiver) -> Result<Vec<Automorphism>> {
    let n = dq.num_vertices();
    if n > 10 {
        return Err(Error::UnsupportedParams("automorphism search is limited to 10 vertices".into()));
    }
    let key = |a: &Arrow| (a.source, a.target, a.kind, a.xweight);
    let mut count: BTreeMap<(usize, usize, ArrowKind, i64), usize> = BTreeMap::new();
    for a in dq.arrows() {
        *count.entry(key(a)).or_default() += 1;
    }
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        dq: &DecoratedQuiver,
        count: &BTreeMap<(usize, usize, ArrowKind, i64), usize>,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        k: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = perm.len();
        if k == n {
            out.push(perm.clone());
            return;
        }
        for img in 0..n {
            if used[img] || !dq.decoration(k).same_structure(dq.decoration(img)) {
                continue;
            }
            perm[k] = img;
            let consistent = count.iter().all(|(&(s, t, kind, w), &c)| {
                if s > k || t > k {
                    return true;
                }
                count.get(&(perm[s], perm[t], kind, w)) == Some(&c)
            });
            if consistent {
                used[img] = true;
                rec(dq, count, perm, used, k + 1, out);
                used[img] = false;
            }
        }
        perm[k] = usize::MAX;
    }
    let mut perms = Vec::new();
    rec(dq, &count, &mut perm, &mut used, 0, &mut perms);
    for p in perms {
        let mut taken = vec![false; dq.arrows().len()];
        let mut arrows = Vec::new();
        for a in dq.arrows() {
            let want = (p[a.source], p[a.target], a.kind, a.xweight);
            let j = (0..dq.arrows().len())
                .find(|&j| !taken[j] && key(&dq.arrows()[j]) == want)
                .expect("arrow counts match");
            taken[j] = true;
            arrows.push(j);
        }
        out.push(Automorphism { vertices: p, arrows });
    }
    Ok(out)
}

/// Polynomial in `s^{1/2}`: exponent in half-units to coefficient.
pub type SPoly = BTreeMap<i64, i64>;

/// Cartan data of a decorated quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanData {
    /// `a_ij` summed over the arrows `i → j` of the double.
    pub a: Vec<Vec<i64>>,
    /// Diagonal of the symmetrizer, `dim A_i`.
    pub d: Vec<i64>,
    pub a_s: Vec<Vec<SPoly>>,
    pub b_s: Vec<SPoly>,
    /// Graded dimension of each vertex algebra.
    pub h: Vec<SPoly>,
    /// Whether every `e_i r` is x-homogeneous.
    pub homogeneous: bool,
}

impl CartanData {
    /// `2I - A` as a rational matrix.
    pub fn cartan_matrix(&self, field: Field) -> Matrix {
        let n = self.a.len();
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j { 2 } else { 0 } - self.a[i][j];
                m.set(i, j, field.from_i64(v));
            }
        }
        m
    }

    /// Whether `DA` is symmetric.
    pub fn symmetrizable(&self) -> bool {
        let n = self.a.len();
        (0..n).all(|i| (0..n).all(|j| self.d[i] * self.a[i][j] == self.d[j] * self.a[j][i]))
    }
}

fn spoly_add(p: &mut SPoly, e: i64, c: i64) {
    let v = p.entry(e).or_insert(0);
    *v += c;
    if *v == 0 {
        p.remove(&e);
    }
}

/// x-degrees (half-units) of the components `e_i r`.
pub fn relation_xdegs(dq: &DecoratedQuiver) -> Vec<BTreeSet<i64>> {
    let d = dq.double();
    let mut out = vec![BTreeSet::new(); d.num_vertices()];
    for (k, a) in d.arrows().iter().enumerate() {
        if a.role != Role::Positive {
            continue;
        }
        let w = a.xweight + d.arrows()[d.dual_arrow(k)].xweight;
        match a.kind {
            ArrowKind::TensorUnit => {
                out[a.source].insert(w + d.algebra(a.source).top_xdeg());
                out[a.target].insert(w + d.algebra(a.target).top_xdeg());
            }
            ArrowKind::Identification => {
                out[a.source].insert(w);
                out[a.target].insert(w);
            }
        }
    }
    out
}

pub fn cartan_data(dq: &DecoratedQuiver) -> CartanData {
    let d = dq.double();
    let n = d.num_vertices();
    let h: Vec<SPoly> = (0..n).map(|v| d.algebra(v).hilbert()).collect();
    let mut a = vec![vec![0i64; n]; n];
    let mut a_s = vec![vec![SPoly::new(); n]; n];
    for (k, arr) in d.arrows().iter().enumerate() {
        let (i, j) = (arr.source, arr.target);
        a[i][j] += (d.bimodule_dim(k) / d.algebra(i).dim()) as i64;
        match arr.kind {
            ArrowKind::TensorUnit => {
                for (e, c) in &h[j] {
                    spoly_add(&mut a_s[i][j], e + arr.xweight, *c);
                }
            }
            ArrowKind::Identification => spoly_add(&mut a_s[i][j], arr.xweight, 1),
        }
    }
    let degs = relation_xdegs(dq);
    let homogeneous = degs.iter().all(|s| s.len() <= 1);
    let b_s = degs
        .iter()
        .map(|s| s.iter().next_back().map(|&e| SPoly::from([(e, 1)])).unwrap_or_default())
        .collect();
    CartanData {
        a,
        d: (0..n).map(|v| d.algebra(v).dim() as i64).collect(),
        a_s,
        b_s,
        h,
        homogeneous,
    }
}

/// Whether `2I - A` is positive definite, by leading principal minors.
pub fn is_dynkin(dq: &DecoratedQuiver) -> bool {
    let c = cartan_data(dq);
    let m = c.cartan_matrix(Field::Rational);
    let n = m.rows();
    (1..=n).all(|k| {
        let mut sub = Matrix::zeros(Field::Rational, k, k);
        for i in 0..k {
            for j in 0..k {
                sub.set(i, j, m.get(i, j).clone());
            }
        }
        sub.det().signum() == Some(1)
    })
}
