//! Matrix-valued Hilbert series in `t` (path length) and `s` (x-degree,
//! tracked in half-units), plus the conjectured closed form.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::quiver::{cartan_data, is_dynkin, DecoratedQuiver, SPoly};

/// Coefficients `(t, s_half) → matrix` indexed by (source, target) vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSeries {
    pub vertices: Vec<String>,
    pub cutoff: usize,
    /// Whether the computation reached two consecutive zero degrees.
    pub stabilized: bool,
    pub terms: BTreeMap<(usize, i64), Vec<Vec<i64>>>,
}

impl HilbertSeries {
    pub fn new(vertices: Vec<String>, cutoff: usize, stabilized: bool) -> HilbertSeries {
        HilbertSeries {
            vertices,
            cutoff,
            stabilized,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn add(&mut self, t: usize, s_half: i64, i: usize, j: usize, c: i64) {
        if c == 0 {
            return;
        }
        let n = self.n();
        let m = self.terms.entry((t, s_half)).or_insert_with(|| vec![vec![0; n]; n]);
        m[i][j] += c;
        if m.iter().all(|r| r.iter().all(|&x| x == 0)) {
            self.terms.remove(&(t, s_half));
        }
    }

    pub fn get(&self, t: usize, s_half: i64, i: usize, j: usize) -> i64 {
        self.terms.get(&(t, s_half)).map_or(0, |m| m[i][j])
    }

    pub fn total(&self) -> i64 {
        self.terms.values().flatten().flatten().sum()
    }

    /// Largest `t` with a nonzero coefficient.
    pub fn max_t(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).max()
    }

    /// Largest x-degree (half-units) with a nonzero coefficient.
    pub fn max_s(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// Coefficients of the total series at `s = 1`, indexed by `t`.
    pub fn t_totals(&self) -> Vec<i64> {
        let mut v = vec![0; self.max_t().map_or(0, |m| m + 1)];
        for (&(t, _), m) in &self.terms {
            v[t] += m.iter().flatten().sum::<i64>();
        }
        v
    }

    /// Block matrix at `s = 1` for one `t`.
    pub fn t_matrix(&self, t: usize) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut out = vec![vec![0; n]; n];
        for (_, m) in self.terms.range((t, i64::MIN)..=(t, i64::MAX)) {
            for i in 0..n {
                for j in 0..n {
                    out[i][j] += m[i][j];
                }
            }
        }
        out
    }

    /// Block totals at `t = s = 1`.
    pub fn block_totals(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut out = vec![vec![0; n]; n];
        for m in self.terms.values() {
            for i in 0..n {
                for j in 0..n {
                    out[i][j] += m[i][j];
                }
            }
        }
        out
    }

    /// The `(i, j)` entry as a map `(t, s_half) → coefficient`.
    pub fn entry(&self, i: usize, j: usize) -> BTreeMap<(usize, i64), i64> {
        self.terms
            .iter()
            .filter(|(_, m)| m[i][j] != 0)
            .map(|(&k, m)| (k, m[i][j]))
            .collect()
    }

    /// Keeps only degrees `t <= cutoff`.
    pub fn truncated(&self, cutoff: usize) -> HilbertSeries {
        HilbertSeries {
            terms: self.terms.range(..(cutoff + 1, i64::MIN)).map(|(k, v)| (*k, v.clone())).collect(),
            cutoff: cutoff.min(self.cutoff),
            ..self.clone()
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().flatten().flatten().all(|&x| x >= 0)
    }

    /// JSON with one list of `{t, s_half, dim}` terms per block, blocks in
    /// row-major order.
    pub fn to_json(&self) -> Value {
        let n = self.n();
        let mut blocks = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let terms: Vec<Value> = self
                    .entry(i, j)
                    .into_iter()
                    .map(|((t, s), d)| json!({"t": t, "s_half": s, "dim": d}))
                    .collect();
                blocks.push(Value::Array(terms));
            }
        }
        json!({
            "vertices": self.vertices,
            "cutoff": self.cutoff,
            "blocks": blocks,
            "stabilized": self.stabilized,
            "total": self.total(),
        })
    }

    /// Matrix of polynomials, one row per line; a 1×1 series prints as a
    /// single polynomial.
    pub fn render(&self) -> String {
        let n = self.n();
        if n == 1 {
            return render_poly(&self.entry(0, 0));
        }
        let cells: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| render_poly(&self.entry(i, j))).collect()).collect();
        let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(1);
        let mut out = String::new();
        for row in cells {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:<width$}")).collect();
            out.push_str(&format!("[ {} ]\n", padded.join(" | ")));
        }
        out.pop();
        out
    }

    /// The total series at `s = 1`, e.g. `4 + 6t + 8t^2`.
    pub fn render_s_at_1(&self) -> String {
        let poly: BTreeMap<(usize, i64), i64> = self.t_totals().into_iter().enumerate().map(|(t, c)| ((t, 0), c)).collect();
        render_poly(&poly)
    }
}

fn render_s(s_half: i64) -> String {
    match s_half {
        0 => String::new(),
        2 => "s".into(),
        h if h % 2 == 0 => format!("s^{}", h / 2),
        h => format!("s^{{{h}/2}}"),
    }
}

/// Renders `Σ c t^a s^{b/2}`; the zero polynomial is `0`.
pub fn render_poly(p: &BTreeMap<(usize, i64), i64>) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (&(t, s), &c) in p {
        if c == 0 {
            continue;
        }
        let tpart = match t {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{t}"),
        };
        let spart = render_s(s);
        let vars: String = match (tpart.is_empty(), spart.is_empty()) {
            (true, true) => String::new(),
            (false, true) => tpart,
            (true, false) => spart,
            (false, false) => format!("{tpart} {spart}"),
        };
        let mag = c.abs();
        let body = if vars.is_empty() {
            mag.to_string()
        } else if mag == 1 {
            vars
        } else {
            format!("{mag}{vars}")
        };
        if parts.is_empty() {
            parts.push(if c < 0 { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{} {body}", if c < 0 { "-" } else { "+" }));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

type PMat = Vec<Vec<SPoly>>;

fn padd(a: &mut SPoly, b: &SPoly, scale: i64, shift: i64) {
    for (e, c) in b {
        let v = a.entry(e + shift).or_insert(0);
        *v += c * scale;
        if *v == 0 {
            a.remove(&(e + shift));
        }
    }
}

fn pmul(a: &SPoly, b: &SPoly) -> SPoly {
    let mut out = SPoly::new();
    for (e, c) in a {
        padd(&mut out, b, *c, *e);
    }
    out
}

fn mat_mul(a: &PMat, b: &PMat) -> PMat {
    let n = a.len();
    let mut out = vec![vec![SPoly::new(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_empty() {
                continue;
            }
            for j in 0..n {
                let p = pmul(&a[i][k], &b[k][j]);
                padd(&mut out[i][j], &p, 1, 0);
            }
        }
    }
    out
}

fn diag(d: &[SPoly]) -> PMat {
    let n = d.len();
    let mut m = vec![vec![SPoly::new(); n]; n];
    for i in 0..n {
        m[i][i] = d[i].clone();
    }
    m
}

/// The expansion of `D (1 − A t + B t²)^{-1}` through `cutoff`, multiplied by
/// `(1 + s^X t^{T+2} P)` for Dynkin quivers when a computed series supplies
/// the top bidegree `(T, X)` and its coefficient matrix `P`.
pub fn conjectured_series(dq: &DecoratedQuiver, cutoff: usize, computed: Option<&HilbertSeries>) -> Result<HilbertSeries> {
    let c = cartan_data(dq);
    let n = c.a.len();
    if c.h.iter().any(|h| h.get(&0).copied().unwrap_or(0) == 0) {
        return Err(Error::SingularLeadingTerm);
    }
    let d = diag(&c.h);
    let b = diag(&c.b_s);
    let ident = diag(&vec![SPoly::from([(0, 1)]); n]);
    let mut cs: Vec<PMat> = vec![ident];
    if cutoff >= 1 {
        cs.push(c.a_s.clone());
    }
    for k in 2..=cutoff {
        let mut next = mat_mul(&c.a_s, &cs[k - 1]);
        let bc = mat_mul(&b, &cs[k - 2]);
        for i in 0..n {
            for j in 0..n {
                padd(&mut next[i][j], &bc[i][j], -1, 0);
            }
        }
        cs.push(next);
    }
    let mut terms: Vec<PMat> = cs.iter().map(|m| mat_mul(&d, m)).collect();
    let mut stabilized = false;
    if is_dynkin(dq) {
        if let Some(h) = computed {
            if let (Some(tt), Some(x)) = (h.max_t(), h.max_s()) {
                let p: PMat = h
                    .terms
                    .get(&(tt, x))
                    .map(|m| m.iter().map(|r| r.iter().map(|&v| if v == 0 { SPoly::new() } else { SPoly::from([(0, v)]) }).collect()).collect())
                    .unwrap_or_else(|| vec![vec![SPoly::new(); n]; n]);
                for k in tt + 2..=cutoff {
                    let corr = mat_mul(&p, &mat_mul(&d, &cs[k - tt - 2]));
                    for i in 0..n {
                        for j in 0..n {
                            padd(&mut terms[k][i][j], &corr[i][j], 1, x);
                        }
                    }
                }
                stabilized = h.stabilized;
            }
        }
    }
    let mut out = HilbertSeries::new(dq.vertices().iter().map(|v| v.id.clone()).collect(), cutoff, stabilized);
    for (t, m) in terms.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                for (&s, &v) in &m[i][j] {
                    out.add(t, s, i, j, v);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_examples() {
        let p = BTreeMap::from([((0, 0), 1), ((2, 2), 1)]);
        assert_eq!(render_poly(&p), "1 + t^2 s");
        let p = BTreeMap::from([((1, 0), 1), ((1, 1), 2), ((3, 3), -1)]);
        assert_eq!(render_poly(&p), "t + 2t s^{1/2} - t^3 s^{3/2}");
        assert_eq!(render_poly(&BTreeMap::new()), "0");
    }

    #[test]
    fn s_at_1_rendering() {
        let mut h = HilbertSeries::new(vec!["1".into()], 4, true);
        for (t, c) in [4, 6, 8, 6, 4].iter().enumerate() {
            h.add(t, 0, 0, 0, *c);
        }
        assert_eq!(h.render_s_at_1(), "4 + 6t + 8t^2 + 6t^3 + 4t^4");
        assert_eq!(h.total(), 28);
    }
}
