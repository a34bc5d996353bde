//! Named bundles of checks run by `preproj reproduce`.

use clap::ValueEnum;
use preproj_core::algebra::{change_form, validate_frobenius};
use preproj_core::degeneration::{flatness_check, flatness_check_degrees, FlatnessReport};
use preproj_core::families::*;
use preproj_core::quiver::FormPolicy;
use preproj_core::repvariety::moment_check;
use preproj_core::standard::*;
use preproj_core::{hilbert_series, DecoratedQuiver, Field, Result, SignConvention};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::RunConfig;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Total dimensions of G2, F4, B_n and C_n.
    Dynkin,
    /// Star quivers against k -> Z_n, per degree.
    Star,
    /// k -> Mat_n against k -> Z_{n^2}.
    Matrix,
    /// Moment map against evaluation of r.
    Moment,
    /// Independence of the series from the form and the signs.
    Forms,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Dynkin => "dynkin",
            Suite::Star => "star",
            Suite::Matrix => "matrix",
            Suite::Moment => "moment",
            Suite::Forms => "forms",
        }
    }
}

/// Outcome of one item; `detail` is set on failure.
pub struct Item {
    pub name: String,
    pub detail: Option<String>,
}

type Check = Box<dyn Fn() -> Result<Option<String>> + Send + Sync>;

fn job(name: impl Into<String>, f: impl Fn() -> Result<Option<String>> + Send + Sync + 'static) -> (String, Check) {
    (name.into(), Box::new(f))
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> Option<String> {
    (got != want).then(|| format!("got {got:?}, expected {want:?}"))
}

/// Runs the suite's items in parallel; results keep the item order.
pub fn run(suite: Suite, config: &RunConfig) -> Result<Vec<Item>> {
    let jobs = match suite {
        Suite::Dynkin => dynkin(config),
        Suite::Star => star_suite(config),
        Suite::Matrix => matrix(config)?,
        Suite::Moment => moment(config)?,
        Suite::Forms => forms(config),
    };
    jobs.par_iter()
        .map(|(name, f)| {
            Ok(Item {
                name: name.clone(),
                detail: f()?,
            })
        })
        .collect()
}

pub fn to_json(suite: Suite, config: &RunConfig, items: &[Item]) -> Value {
    let items: Vec<Value> = items
        .iter()
        .map(|i| match &i.detail {
            None => json!({"name": i.name, "pass": true}),
            Some(d) => json!({"name": i.name, "pass": false, "detail": d}),
        })
        .collect();
    json!({
        "suite": suite.name(),
        "field": config.field.to_string(),
        "seed": config.seed,
        "all_pass": items.iter().all(|i| i["pass"] == true),
        "items": items,
    })
}

fn total(dq: &DecoratedQuiver, conv: SignConvention, cutoff: Option<usize>) -> Result<Option<i64>> {
    let h = hilbert_series(dq, conv, cutoff.unwrap_or_else(|| preproj_core::preprojective::default_cutoff(dq)))?;
    Ok(h.stabilized.then(|| h.total()))
}

fn dynkin(config: &RunConfig) -> Vec<(String, Check)> {
    let (f, conv, cutoff) = (config.field, config.convention(), config.cutoff);
    let mut jobs = vec![
        job("G2 total 28", move || Ok(expect_eq(total(&g2(f), conv, cutoff)?, Some(28)))),
        job("F4 total 156", move || Ok(expect_eq(total(&f4(f), conv, cutoff)?, Some(156)))),
    ];
    for n in 2..=5usize {
        let want = (n * (2 * n - 1) * (2 * n + 1) / 3) as i64;
        jobs.push(job(format!("B{n} total {want}"), move || Ok(expect_eq(total(&b_n(f, n), conv, cutoff)?, Some(want)))));
        jobs.push(job(format!("A{} total {want}", 2 * n - 1), move || {
            Ok(expect_eq(total(&a_n(f, 2 * n - 1), conv, cutoff)?, Some(want)))
        }));
    }
    for n in 4..=6usize {
        let want = (n * (n + 1) * (2 * n + 1) / 3) as i64;
        jobs.push(job(format!("C{n} total {want}"), move || Ok(expect_eq(total(&c_n(f, n), conv, cutoff)?, Some(want)))));
    }
    jobs
}

fn judge(rep: &FlatnessReport) -> Option<String> {
    if let Some(v) = &rep.violation {
        return Some(format!("degenerate side exceeds deformed side at {v:?}"));
    }
    rep.first_difference.as_ref().map(|d| format!("first difference at {d:?}"))
}

fn star_suite(config: &RunConfig) -> Vec<(String, Check)> {
    let (f, conv) = (config.field, config.convention());
    let cutoff = config.cutoff.unwrap_or(5);
    (2..=8usize)
        .map(|n| {
            job(format!("star({n}) vs k->Z_{n} through degree {cutoff}"), move || {
                let z = k_to(f, decoration("Z", z_algebra(f, n)?))?;
                Ok(judge(&flatness_check_degrees(&star(f, n), &z, cutoff, conv)?))
            })
        })
        .collect()
}

fn matrix(config: &RunConfig) -> Result<Vec<(String, Check)>> {
    let (f, conv) = (config.field, config.convention());
    let cutoff = config.cutoff.unwrap_or(5);
    Ok([2usize, 3]
        .into_iter()
        .map(|n| {
            job(format!("k->Mat_{n} vs k->Z_{} through degree {cutoff}", n * n), move || {
                let m = k_to(f, decoration("M", matrix_algebra(f, n)?))?;
                let z = k_to(f, decoration("Z", z_algebra(f, n * n)?))?;
                Ok(judge(&flatness_check(&m, &z, cutoff, conv)?))
            })
        })
        .collect())
}

fn moment_cases(f: Field) -> Result<Vec<(&'static str, DecoratedQuiver)>> {
    Ok(vec![
        ("A2", a_n(f, 2)),
        ("B2", b_n(f, 2)),
        ("S=S", self_identification(decoration("S", truncated_poly(f, 2)?))?),
        ("S->k", to_k(f, decoration("S", truncated_poly(f, 2)?))?),
        ("S'->k", to_k(f, decoration("S'", truncated_poly(f, 3)?))?),
        ("Z4->k", to_k(f, decoration("Z", z_algebra(f, 4)?))?),
    ])
}

fn moment(config: &RunConfig) -> Result<Vec<(String, Check)>> {
    let (f, seed) = (config.field, config.seed);
    let mut jobs = Vec::new();
    for (name, dq) in moment_cases(f)? {
        for d in [[1usize, 1], [2, 1], [1, 2], [2, 2]] {
            let dq = dq.clone();
            jobs.push(job(format!("{name} d = {d:?}, 20 seeds"), move || {
                let rep = moment_check(name, &dq, &d, seed, 20)?;
                Ok((!rep.all_equal).then(|| format!("mismatch at {:?}", rep.first_mismatch)))
            }));
        }
    }
    Ok(jobs)
}

fn form_change(dq: &DecoratedQuiver, dec: usize, seed: u64, conv: SignConvention, cutoff: usize) -> Result<Option<String>> {
    let base = hilbert_series(dq, conv, cutoff)?;
    let d = &dq.decorations()[dec];
    let field = dq.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tried = 0;
    while tried < 5 {
        let u: Vec<_> = (0..d.algebra.dim()).map(|_| field.from_i64(rng.gen_range(-3..=3))).collect();
        if !d.algebra.is_unit(&u) {
            continue;
        }
        tried += 1;
        let form = change_form(&d.algebra, &d.form, &u)?;
        if !validate_frobenius(&d.algebra, &form).nondegenerate {
            return Ok(Some("changed form is degenerate".into()));
        }
        let h = hilbert_series(&dq.with_form(dec, form, FormPolicy::RequireSymmetric)?, conv, cutoff)?;
        if h != base {
            return Ok(Some(format!("series changed under the unit {u:?}")));
        }
    }
    Ok(None)
}

fn forms(config: &RunConfig) -> Vec<(String, Check)> {
    let (f, seed, conv) = (config.field, config.seed, config.convention());
    let cutoff = config.cutoff.unwrap_or(16);
    let mut jobs = vec![
        job("form change on G2", move || form_change(&g2(f), 1, seed, conv, cutoff)),
        job("form change on B3", move || form_change(&b_n(f, 3), 1, seed, conv, cutoff)),
        job("form change on F4", move || form_change(&f4(f), 1, seed, conv, cutoff)),
        job("form change on k->Z_4", move || {
            form_change(&k_to(f, decoration("Z", z_algebra(f, 4)?))?, 1, seed, conv, cutoff)
        }),
        job("form change on S'=S'", move || {
            form_change(&self_identification(decoration("S'", truncated_poly(f, 3)?))?, 0, seed, conv, cutoff)
        }),
    ];
    let bipartite: [(&str, fn(Field) -> Result<DecoratedQuiver>); 6] = [
        ("B3", |f| Ok(b_n(f, 3))),
        ("C4", |f| Ok(c_n(f, 4))),
        ("G2", |f| Ok(g2(f))),
        ("F4", |f| Ok(f4(f))),
        ("star(4)", |f| Ok(star(f, 4))),
        ("A3 fold", |f| folded_a_odd(f, 2)),
    ];
    let cutoff = config.cutoff.unwrap_or(10);
    for (name, build) in bipartite {
        jobs.push(job(format!("sign independence on {name}"), move || {
            let dq = build(f)?;
            if !dq.is_bipartite() {
                return Ok(Some("quiver is not bipartite".into()));
            }
            let a = hilbert_series(&dq, SignConvention::Signed, cutoff)?;
            let b = hilbert_series(&dq, SignConvention::AllPlus, cutoff)?;
            Ok((a != b).then(|| "series depends on the sign convention".into()))
        }));
    }
    jobs
}
