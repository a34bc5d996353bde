//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs over the rationals by default; set `PREPROJ_FIELD=gf:<p>` to use a
//! prime field. The process fails if the set of failing criteria differs
//! from `KNOWN_FAILURES`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use preproj_core::algebra::{change_form, validate_frobenius};
use preproj_core::degeneration::{flatness_check, flatness_check_degrees, FlatnessReport};
use preproj_core::families::*;
use preproj_core::quiver::FormPolicy;
use preproj_core::repvariety::{lambda_trace, moment_check, phi, phi_matrix, AMatrix};
use preproj_core::rewriting::{parse_rule_file, preprojective_system, RankingStyle};
use preproj_core::standard::*;
use preproj_core::{hilbert_series, DecoratedQuiver, Field, HilbertSeries, PiAlgebra, SignConvention};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail; see the project notes for the analysis.
const KNOWN_FAILURES: [usize; 1] = [11];

const SIGNED: SignConvention = SignConvention::Signed;
const CUTOFF: usize = 40;

type Poly = BTreeMap<(usize, i64), i64>;
type Outcome = Result<(), String>;

struct Ctx {
    field: Field,
    flatness: Vec<(String, FlatnessReport)>,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// Polynomial from `(t, s_half, c)` terms.
fn p(terms: &[(usize, i64, i64)]) -> Poly {
    let mut out = Poly::new();
    for &(t, s, c) in terms {
        *out.entry((t, s)).or_default() += c;
    }
    out.retain(|_, c| *c != 0);
    out
}

fn prod(fs: &[Poly]) -> Poly {
    let mut acc = p(&[(0, 0, 1)]);
    for f in fs {
        let mut out = Poly::new();
        for (&(t1, s1), c1) in &acc {
            for (&(t2, s2), c2) in f {
                *out.entry((t1 + t2, s1 + s2)).or_default() += c1 * c2;
            }
        }
        out.retain(|_, c| *c != 0);
        acc = out;
    }
    acc
}

fn check_table(h: &HilbertSeries, table: &[Vec<Poly>]) -> Outcome {
    for (i, row) in table.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got = h.entry(i, j);
            ensure(&got == want, || format!("block ({}, {}): {got:?} != {want:?}", i + 1, j + 1))?;
        }
    }
    Ok(())
}

fn series(dq: &DecoratedQuiver) -> Result<HilbertSeries, String> {
    hilbert_series(dq, SIGNED, CUTOFF).map_err(err)
}

fn c1_g2(cx: &mut Ctx) -> Outcome {
    let h = series(&g2(cx.field))?;
    ensure(h.total() == 28, || format!("total {}", h.total()))?;
    let s1 = h.render_s_at_1();
    ensure(s1 == "4 + 6t + 8t^2 + 6t^3 + 4t^4", || s1.clone())?;
    let pre = p(&[(0, 0, 1), (2, 2, 1)]);
    let q = p(&[(0, 0, 1), (0, 2, 1), (0, 4, 1)]);
    let t = p(&[(1, 0, 1)]);
    let table = vec![
        vec![prod(&[pre.clone(), p(&[(0, 0, 1), (2, 4, 1)])]), prod(&[pre.clone(), q.clone(), t.clone()])],
        vec![prod(&[pre.clone(), q.clone(), t]), prod(&[pre, q, p(&[(0, 0, 1), (2, 0, 1)])])],
    ];
    check_table(&h, &table)
}

fn c2_f4(cx: &mut Ctx) -> Outcome {
    let h = series(&f4(cx.field))?;
    ensure(h.total() == 156, || format!("total {}", h.total()))?;
    let tt = h.t_totals();
    ensure(tt == [6, 10, 14, 18, 20, 20, 20, 18, 14, 10, 6], || format!("h(t,1) = {tt:?}"))?;
    let bt = h.block_totals();
    let want = vec![vec![4, 6, 8, 4], vec![6, 12, 16, 8], vec![8, 16, 24, 12], vec![4, 8, 12, 8]];
    ensure(bt == want, || format!("blocks {bt:?}"))
}

fn c3_b_n(cx: &mut Ctx) -> Outcome {
    for n in 2..=5i64 {
        let h = series(&b_n(cx.field, n as usize))?;
        let want = n * (2 * n - 1) * (2 * n + 1) / 3;
        ensure(h.stabilized && h.total() == want, || format!("B_{n}: total {} want {want}", h.total()))?;
        let a = series(&a_n(cx.field, 2 * n as usize - 1))?;
        ensure(a.total() == want, || format!("A_{}: total {}", 2 * n - 1, a.total()))?;
    }
    Ok(())
}

fn c4_c_n(cx: &mut Ctx) -> Outcome {
    for n in 4..=6usize {
        let h = series(&c_n(cx.field, n))?;
        let bt = h.block_totals();
        for i in 0..n {
            for j in 0..n {
                let want = 2 * (i.min(j) as i64 + 1);
                ensure(bt[i][j] == want, || format!("C_{n} block ({}, {}) = {}", i + 1, j + 1, bt[i][j]))?;
            }
        }
        let want = (n * (n + 1) * (2 * n + 1) / 3) as i64;
        ensure(h.total() == want, || format!("C_{n}: total {} want {want}", h.total()))?;
    }
    Ok(())
}

fn c5_b2(cx: &mut Ctx) -> Outcome {
    let h = series(&b_n(cx.field, 2))?;
    let table = vec![
        vec![p(&[(0, 0, 1), (2, 2, 1)]), p(&[(1, 0, 1), (1, 2, 1)])],
        vec![p(&[(1, 0, 1), (1, 2, 1)]), prod(&[p(&[(0, 0, 1), (2, 0, 1)]), p(&[(0, 0, 1), (0, 2, 1)])])],
    ];
    check_table(&h, &table)
}

fn c6_star(cx: &mut Ctx) -> Outcome {
    let f = cx.field;
    for n in 2..=8 {
        let z = k_to(f, decoration("Z", z_algebra(f, n).map_err(err)?)).map_err(err)?;
        let rep = flatness_check_degrees(&star(f, n), &z, 5, SIGNED).map_err(err)?;
        let flat = rep.flat;
        cx.flatness.push((format!("star({n}) vs k->Z_{n}"), rep.clone()));
        ensure(flat, || format!("n = {n}: {rep:?}"))?;
    }
    Ok(())
}

fn c7_matrix(cx: &mut Ctx) -> Outcome {
    let f = cx.field;
    for n in [2, 3] {
        let m = k_to(f, decoration("M", matrix_algebra(f, n).map_err(err)?)).map_err(err)?;
        let z = k_to(f, decoration("Z", z_algebra(f, n * n).map_err(err)?)).map_err(err)?;
        let rep = flatness_check(&m, &z, 5, SIGNED).map_err(err)?;
        let flat = rep.flat;
        cx.flatness.push((format!("k->Mat_{n} vs k->Z_{}", n * n), rep.clone()));
        ensure(flat, || format!("n = {n}: {rep:?}"))?;
    }
    Ok(())
}

const C_RULES: &str = include_str!("../../../data/c_algebra.rules");

const C_BASIS: [&str; 24] = [
    "e_1", "b",
    "a", "a.b", "b.a", "b.a.b",
    "a.a", "a.a.b", "a.b.a", "a.b.a.b", "b.a.a", "b.a.a.b",
    "a.a.b.a", "a.a.b.a.b", "a.b.a.a", "a.b.a.a.b", "b.a.a.b.a", "b.a.a.b.a.b",
    "a.a.b.a.a", "a.a.b.a.a.b", "a.b.a.a.b.a", "a.b.a.a.b.a.b",
    "a.a.b.a.a.b.a", "a.a.b.a.a.b.a.b",
];

fn c8_rewriting(cx: &mut Ctx) -> Outcome {
    let f = cx.field;
    let mut cases = vec![("G2".to_string(), g2(f), RankingStyle::TowardLower), ("F4".to_string(), f4(f), RankingStyle::TowardLower)];
    cases.extend((2..=4).map(|n| (format!("B{n}"), b_n(f, n), RankingStyle::TowardLower)));
    cases.extend((2..=5).map(|n| (format!("C{n}"), c_n(f, n), RankingStyle::TowardHigher)));
    for (name, dq, style) in cases {
        let h = series(&dq)?;
        let top = h.max_t().unwrap_or(0);
        let (mut sys, _) = preprojective_system(&dq, SIGNED, style, top + 1).map_err(err)?;
        sys.complete().map_err(err)?;
        let ir = sys.irreducible_series().map_err(err)?;
        ensure(ir.stabilized && ir.terms == h.terms, || format!("{name}: irreducible words disagree with the series"))?;
    }
    let mut sys = parse_rule_file(C_RULES, f).map_err(err)?;
    sys.complete().map_err(err)?;
    let words = sys.irreducible_words(sys.degree_bound).map_err(err)?;
    let found: BTreeSet<String> = words.iter().map(|w| w.render(&sys.alphabet)).collect();
    let want: BTreeSet<String> = C_BASIS.iter().map(|s| s.to_string()).collect();
    ensure(words.len() == 24 && found == want, || format!("C basis: {} words {found:?}", words.len()))
}

fn c9_moment(cx: &mut Ctx) -> Outcome {
    let f = cx.field;
    let dec = |name: &str, s: StandardAlgebra| decoration(name, s);
    let cases = vec![
        ("A2", a_n(f, 2)),
        ("S=S", self_identification(dec("S", truncated_poly(f, 2).map_err(err)?)).map_err(err)?),
        ("S->k", to_k(f, dec("S", truncated_poly(f, 2).map_err(err)?)).map_err(err)?),
        ("S'->k", to_k(f, dec("S'", truncated_poly(f, 3).map_err(err)?)).map_err(err)?),
        ("Z4->k", to_k(f, dec("Z", z_algebra(f, 4).map_err(err)?)).map_err(err)?),
    ];
    for (name, dq) in &cases {
        for d in [[1, 1], [2, 1], [1, 2], [2, 2]] {
            let rep = moment_check(name, dq, &d, 0, 20).map_err(err)?;
            ensure(rep.all_equal, || format!("{name} d={d:?}: {rep:?}"))?;
        }
    }
    let algebras = vec![
        ("k", ground(f)),
        ("S", truncated_poly(f, 2).map_err(err)?),
        ("S'", truncated_poly(f, 3).map_err(err)?),
        ("Z4", z_algebra(f, 4).map_err(err)?),
        ("Mat2", matrix_algebra(f, 2).map_err(err)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draw = |rng: &mut ChaCha8Rng| f.from_i64(rng.gen_range(-4..=4));
    for (name, s) in &algebras {
        let a = &s.algebra;
        let n = a.dim();
        for _ in 0..50 {
            let rows = (0..n).map(|_| (0..n).map(|_| draw(&mut rng)).collect()).collect();
            let m = preproj_core::linalg::Matrix::from_rows(f, rows);
            let c = phi(a, s.form(), &m).map_err(err)?;
            ensure(m.trace() == s.form().eval(&c), || format!("{name}: tr(φ) ≠ λ(Φ(φ)(1))"))?;
        }
        for _ in 0..50 {
            let d = rng.gen_range(1..=3);
            let rows = (0..d * n).map(|_| (0..d * n).map(|_| draw(&mut rng)).collect()).collect();
            let m = preproj_core::linalg::Matrix::from_rows(f, rows);
            let mut psi = AMatrix::zero(a, d, d);
            for e in &mut psi.entries {
                for x in e.iter_mut() {
                    *x = draw(&mut rng);
                }
            }
            let lhs = m.mul(&psi.to_kmatrix(a)).trace();
            let rhs = lambda_trace(a, s.form(), &phi_matrix(a, s.form(), &m, d).map_err(err)?.mul(a, &psi));
            ensure(lhs == rhs, || format!("{name}: restriction-dual identity fails at d = {d}"))?;
        }
    }
    Ok(())
}

fn c10_independence(cx: &mut Ctx) -> Outcome {
    let f = cx.field;
    let cases = vec![
        (g2(f), 1),
        (b_n(f, 3), 1),
        (f4(f), 1),
        (k_to(f, decoration("Z", z_algebra(f, 4).map_err(err)?)).map_err(err)?, 1),
        (self_identification(decoration("S'", truncated_poly(f, 3).map_err(err)?)).map_err(err)?, 0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (dq, dec) in &cases {
        let base = hilbert_series(dq, SIGNED, 16).map_err(err)?;
        let d = &dq.decorations()[*dec];
        let mut tried = 0;
        while tried < 5 {
            let u: Vec<_> = (0..d.algebra.dim()).map(|_| f.from_i64(rng.gen_range(-3..=3))).collect();
            if !d.algebra.is_unit(&u) {
                continue;
            }
            tried += 1;
            let form = change_form(&d.algebra, &d.form, &u).map_err(err)?;
            ensure(validate_frobenius(&d.algebra, &form).nondegenerate, || "changed form is degenerate".into())?;
            let other = dq.with_form(*dec, form, FormPolicy::RequireSymmetric).map_err(err)?;
            let h = hilbert_series(&other, SIGNED, 16).map_err(err)?;
            ensure(h == base, || format!("series changed under the unit {u:?}"))?;
        }
    }
    let bipartite = [b_n(f, 3), c_n(f, 4), g2(f), f4(f), star(f, 4), d4(f).0, a_n(f, 5), folded_a_odd(f, 3).map_err(err)?];
    for dq in &bipartite {
        ensure(dq.is_bipartite(), || "quiver is not bipartite".into())?;
        let a = hilbert_series(dq, SignConvention::Signed, 10).map_err(err)?;
        let b = hilbert_series(dq, SignConvention::AllPlus, 10).map_err(err)?;
        ensure(a == b, || "series depends on the sign convention".into())?;
    }
    Ok(())
}

fn c11_center(cx: &mut Ctx) -> Outcome {
    let pi = PiAlgebra::compute(&g2(cx.field), SIGNED, CUTOFF).map_err(err)?;
    let center = pi.center_dims().map_err(err)?;
    let want = BTreeMap::from([(0, 1), (4, 3)]);
    ensure(center == want, || format!("graded dims {center:?}, expected {want:?}; degree-4 piece has dim {}", pi.std(4).len()))
}

fn c12_monotone(cx: &mut Ctx) -> Outcome {
    let f = cx.field;
    let mut extra: Vec<(String, DecoratedQuiver, DecoratedQuiver, bool)> = vec![
        ("A3 fold vs B2".into(), folded_a_odd(f, 2).map_err(err)?, b_n(f, 2), true),
        ("A5 fold vs B3".into(), folded_a_odd(f, 3).map_err(err)?, b_n(f, 3), true),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..12 {
        let n = rng.gen_range(2..=5);
        let deformed = match rng.gen_range(0..3) {
            0 => decoration("K", sum_of_ground(f, n).map_err(err)?),
            1 => decoration("G", group_like(f, n).map_err(err)?),
            _ => decoration("T", truncated_poly(f, n).map_err(err)?),
        };
        let degenerate = match rng.gen_range(0..2) {
            0 => decoration("Z", z_algebra(f, n).map_err(err)?),
            _ => decoration("T", truncated_poly(f, n).map_err(err)?),
        };
        let (l, r) = match rng.gen_range(0..2) {
            0 => (k_to(f, deformed.clone()).map_err(err)?, k_to(f, degenerate.clone()).map_err(err)?),
            _ => (self_identification(deformed.clone()).map_err(err)?, self_identification(degenerate.clone()).map_err(err)?),
        };
        extra.push((format!("{} vs {} (n = {n})", deformed.name, degenerate.name), l, r, false));
    }
    for (name, l, r, block) in extra {
        let rep = if block {
            flatness_check(&l, &r, 12, SIGNED)
        } else {
            flatness_check(&l, &r, 5, SIGNED)
        }
        .map_err(err)?;
        cx.flatness.push((name, rep));
    }
    ensure(!cx.flatness.is_empty(), || "no flatness comparisons were run".into())?;
    for (name, rep) in &cx.flatness {
        ensure(rep.is_monotone(), || format!("{name}: degenerate side exceeds deformed side at {:?}", rep.violation))?;
    }
    Ok(())
}

fn c13_pairing(cx: &mut Ctx) -> Outcome {
    let f = cx.field;
    for (name, dq) in [("G2", g2(f)), ("F4", f4(f)), ("B2", b_n(f, 2)), ("C4", c_n(f, 4))] {
        let pi = PiAlgebra::compute(&dq, SIGNED, CUTOFF).map_err(err)?;
        let pairing = pi.frobenius_pairing().map_err(err)?;
        ensure(pairing.rank == pi.dim(), || format!("{name}: rank {} of {}", pairing.rank, pi.dim()))?;
    }
    Ok(())
}

fn field_from_env() -> Field {
    match std::env::var("PREPROJ_FIELD") {
        Ok(s) if s.starts_with("gf:") => Field::prime(s[3..].parse().expect("prime")).expect("prime"),
        _ => Field::Rational,
    }
}

fn main() {
    let criteria: [(usize, &str, fn(&mut Ctx) -> Outcome); 13] = [
        (1, "G2 total, series and bigraded table", c1_g2),
        (2, "F4 total, h(t,1) and block totals", c2_f4),
        (3, "B_n totals equal A_{2n-1}, n = 2..5", c3_b_n),
        (4, "C_n block totals 2 min(i,j), n = 4..6", c4_c_n),
        (5, "B2 bigraded matrix", c5_b2),
        (6, "star quivers match k -> Z_n per degree", c6_star),
        (7, "k -> Mat_n matches k -> Z_{n^2} per degree", c7_matrix),
        (8, "rewriting counts match the series; C basis of 24", c8_rewriting),
        (9, "moment map equals evaluation of r; Phi identities", c9_moment),
        (10, "form and sign independence", c10_independence),
        (11, "center of Pi(G2) has graded dims {0:1, 4:3}", c11_center),
        (12, "degeneration monotonicity", c12_monotone),
        (13, "pairing nondegeneracy on G2, F4, B2, C4", c13_pairing),
    ];
    let mut cx = Ctx {
        field: field_from_env(),
        flatness: Vec::new(),
    };
    println!("acceptance over {}", cx.field);
    let start = Instant::now();
    let mut failed = BTreeSet::new();
    for (id, name, run) in criteria {
        let t = Instant::now();
        match run(&mut cx) {
            Ok(()) => println!("criterion {id:>2}: PASS  {name} ({:.1?})", t.elapsed()),
            Err(msg) => {
                println!("criterion {id:>2}: FAIL  {name}: {msg}");
                failed.insert(id);
            }
        }
    }
    let known: BTreeSet<usize> = KNOWN_FAILURES.into_iter().collect();
    println!(
        "{} passed, {} failed ({:?} known) in {:.1?}",
        13 - failed.len(),
        failed.len(),
        known,
        start.elapsed()
    );
    if failed != known {
        println!("unexpected outcome: failing criteria {failed:?}, known {known:?}");
        std::process::exit(1);
    }
}
