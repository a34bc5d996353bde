//! Text formats for algebras and decorated quivers.
//!
//! ```text
//! algebra k = ground()
//! algebra S = truncated_poly(2)
//! algebra M = matrix_algebra(2) form=offdiag
//! algebra X dim=2 sc=[(0,0,0,1),(0,1,1,1),(1,0,1,1)] unit=[1,0] form=[0,1] xdeg=[0,2]
//! policy nonsymmetric
//! vertex 1 : k
//! vertex 2 : S
//! arrow a : 1 -> 2 kind=tensor xweight=1/2
//! fold by ((1 3); (a b))
//! ```
//!
//! Named kinds: `ground`, `sum_of_ground(n)`, `truncated_poly(n)`,
//! `z_algebra(n)`, `exterior(n)`, `matrix_algebra(n)`, `group_like(n)`,
//! `bilinear_form([[..],..])`, `clifford([[..],..])`, `product(kind, kind)`.

use std::collections::HashMap;

use crate::algebra::{make_algebra, FrobeniusForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quiver::{fold, ArrowKind, ArrowSpec, Automorphism, DecoratedQuiver, Decoration, FormPolicy};
use crate::scalar::{Field, Scalar};
use crate::standard::{standard_algebra, StandardKind};

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

/// Splits on whitespace outside brackets, keeping 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth <= 0 {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Splits `text` at top-level commas.
fn split_top(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = text[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

fn strip_delims(text: &str, open: char, close: char) -> Option<&str> {
    text.trim().strip_prefix(open)?.strip_suffix(close)
}

fn parse_usize(text: &str, line: usize, col: usize) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| perr(line, col, format!("expected a non-negative integer, found `{}`", text.trim())))
}

fn parse_scalars(field: Field, text: &str, line: usize, col: usize) -> Result<Vec<Scalar>> {
    let inner = strip_delims(text, '[', ']').ok_or_else(|| perr(line, col, "expected `[...]`"))?;
    split_top(inner)
        .into_iter()
        .map(|s| field.parse(s).map_err(|e| perr(line, col, e)))
        .collect()
}

fn parse_matrix(field: Field, text: &str, line: usize, col: usize) -> Result<Matrix> {
    let inner = strip_delims(text, '[', ']').ok_or_else(|| perr(line, col, "expected a matrix `[[..],..]`"))?;
    let rows: Vec<Vec<Scalar>> = split_top(inner)
        .into_iter()
        .map(|r| parse_scalars(field, r, line, col))
        .collect::<Result<_>>()?;
    let n = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != n) {
        return Err(perr(line, col, "matrix rows must be nonempty and of equal length"));
    }
    Ok(Matrix::from_rows(field, rows))
}

/// Parses a named kind such as `truncated_poly(3)`.
pub fn parse_kind(field: Field, text: &str, line: usize, col: usize) -> Result<StandardKind> {
    let text = text.trim();
    let (name, args) = match text.find('(') {
        Some(i) => {
            let args = text[i..]
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| perr(line, col, format!("unbalanced parentheses in `{text}`")))?;
            (&text[..i], split_top(args))
        }
        None => (text, Vec::new()),
    };
    let want = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(perr(line, col, format!("`{name}` takes {n} argument(s), found {}", args.len())))
        }
    };
    let int = |i: usize| parse_usize(args[i], line, col);
    let kind = match name.trim() {
        "ground" | "k" => {
            want(0)?;
            StandardKind::Ground
        }
        "sum_of_ground" => {
            want(1)?;
            StandardKind::SumOfGround(int(0)?)
        }
        "truncated_poly" => {
            want(1)?;
            StandardKind::TruncatedPoly(int(0)?)
        }
        "z_algebra" => {
            want(1)?;
            StandardKind::ZAlgebra(int(0)?)
        }
        "exterior" => {
            want(1)?;
            StandardKind::Exterior(int(0)?)
        }
        "matrix_algebra" => {
            want(1)?;
            StandardKind::MatrixAlgebra(int(0)?)
        }
        "group_like" => {
            want(1)?;
            StandardKind::GroupLike(int(0)?)
        }
        "bilinear_form" => {
            want(1)?;
            StandardKind::BilinearForm(parse_matrix(field, args[0], line, col)?)
        }
        "clifford" => {
            want(1)?;
            StandardKind::Clifford(parse_matrix(field, args[0], line, col)?)
        }
        "product" => {
            want(2)?;
            StandardKind::Product(
                Box::new(parse_kind(field, args[0], line, col)?),
                Box::new(parse_kind(field, args[1], line, col)?),
            )
        }
        other => return Err(perr(line, col, format!("unknown algebra kind `{other}`"))),
    };
    Ok(kind)
}

/// Parses one `algebra ...` declaration into a named decoration.
pub fn parse_algebra_line(field: Field, text: &str, line: usize) -> Result<Decoration> {
    let toks = tokens(text);
    if toks.len() < 2 || toks[0].1 != "algebra" {
        return Err(perr(line, 1, "expected `algebra <name> ...`"));
    }
    let name = toks[1].1;
    if toks.get(2).map(|t| t.1) == Some("=") {
        let (col, kind_text) = *toks.get(3).ok_or_else(|| perr(line, toks[2].0, "missing algebra kind"))?;
        let kind = parse_kind(field, kind_text, line, col)?;
        let std = standard_algebra(field, &kind)?;
        let mut form = std.form().clone();
        for &(c, t) in &toks[4..] {
            match t.strip_prefix("form=") {
                Some(f) => {
                    form = std
                        .named_form(f)
                        .ok_or_else(|| perr(line, c, format!("`{name}` has no form named `{f}`")))?
                        .clone();
                }
                None => return Err(perr(line, c, format!("unexpected `{t}`"))),
            }
        }
        return Ok(Decoration::new(name, std.algebra, form));
    }
    let mut attrs: HashMap<&str, (usize, &str)> = HashMap::new();
    for &(c, t) in &toks[2..] {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| perr(line, c, format!("expected `key=value`, found `{t}`")))?;
        attrs.insert(k, (c + k.len() + 1, v));
    }
    let get = |k: &str| attrs.get(k).copied().ok_or_else(|| perr(line, 1, format!("missing `{k}=`")));
    let (dc, d) = get("dim")?;
    let dim = parse_usize(d, line, dc)?;
    let (sc_col, sc_text) = get("sc")?;
    let inner = strip_delims(sc_text, '[', ']').ok_or_else(|| perr(line, sc_col, "expected `sc=[...]`"))?;
    let mut sc = Vec::new();
    for entry in split_top(inner) {
        let parts = strip_delims(entry, '(', ')')
            .map(split_top)
            .filter(|p| p.len() == 4)
            .ok_or_else(|| perr(line, sc_col, format!("expected `(i,j,k,c)`, found `{entry}`")))?;
        sc.push((
            parse_usize(parts[0], line, sc_col)?,
            parse_usize(parts[1], line, sc_col)?,
            parse_usize(parts[2], line, sc_col)?,
            field.parse(parts[3]).map_err(|e| perr(line, sc_col, e))?,
        ));
    }
    let (uc, u) = get("unit")?;
    let unit = parse_scalars(field, u, line, uc)?;
    let (fc, f) = get("form")?;
    let form = parse_scalars(field, f, line, fc)?;
    let xdeg = match attrs.get("xdeg") {
        Some(&(xc, x)) => Some(
            strip_delims(x, '[', ']')
                .ok_or_else(|| perr(line, xc, "expected `xdeg=[...]`"))?
                .split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| perr(line, xc, format!("bad x-degree `{s}`"))))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    if unit.len() != dim || form.len() != dim {
        return Err(perr(line, uc, format!("unit and form need {dim} entries")));
    }
    let algebra = make_algebra(field, dim, &sc, unit, None, xdeg)?;
    Ok(Decoration::new(name, algebra, FrobeniusForm::new(form)))
}

/// Cycles like `(1 3)(2 4)` or `(a, b)`.
fn parse_cycles(text: &str, line: usize, col: usize) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| perr(line, col, format!("expected `(` in cycle notation at `{rest}`")))?;
        let end = body.find(')').ok_or_else(|| perr(line, col, "unclosed cycle"))?;
        let cycle: Vec<String> = body[..end]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if !cycle.is_empty() {
            out.push(cycle);
        }
        rest = body[end + 1..].trim_start();
    }
    Ok(out)
}

/// Parses a quiver spec; algebra declarations may appear in the same file.
/// Syntax errors are `ParseError`s; validation errors keep their own kind.
pub fn parse_quiver_spec(text: &str, field: Field) -> Result<DecoratedQuiver> {
    let mut decorations: Vec<Decoration> = Vec::new();
    let mut vertices: Vec<(String, usize)> = Vec::new();
    let mut arrows: Vec<ArrowSpec> = Vec::new();
    let mut folds: Vec<(Vec<Vec<String>>, Vec<Vec<String>>)> = Vec::new();
    let mut policy = FormPolicy::RequireSymmetric;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks = tokens(body);
        let Some(&(col0, head)) = toks.first() else {
            continue;
        };
        match head {
            "algebra" => {
                let d = parse_algebra_line(field, body, line)?;
                if decorations.iter().any(|x| x.name == d.name) {
                    return Err(perr(line, col0, format!("algebra `{}` declared twice", d.name)));
                }
                decorations.push(d);
            }
            "policy" => match toks.get(1).map(|t| t.1) {
                Some("nonsymmetric") => policy = FormPolicy::AllowNonsymmetric,
                Some("symmetric") => policy = FormPolicy::RequireSymmetric,
                _ => return Err(perr(line, col0, "expected `policy symmetric|nonsymmetric`")),
            },
            "vertex" => {
                let ids: Vec<&str> = toks.iter().map(|t| t.1).collect();
                if ids.len() != 4 || ids[2] != ":" {
                    return Err(perr(line, col0, "expected `vertex <id> : <algebra>`"));
                }
                let d = decorations
                    .iter()
                    .position(|x| x.name == ids[3])
                    .ok_or_else(|| perr(line, toks[3].0, format!("unknown algebra `{}`", ids[3])))?;
                if vertices.iter().any(|v| v.0 == ids[1]) {
                    return Err(perr(line, toks[1].0, format!("vertex `{}` declared twice", ids[1])));
                }
                vertices.push((ids[1].to_string(), d));
            }
            "arrow" => {
                let ids: Vec<&str> = toks.iter().map(|t| t.1).collect();
                if ids.len() < 6 || ids[2] != ":" || ids[4] != "->" {
                    return Err(perr(line, col0, "expected `arrow <id> : <src> -> <tgt> kind=...`"));
                }
                let mut kind = None;
                let mut xweight = None;
                for &(c, t) in &toks[6..] {
                    if let Some(k) = t.strip_prefix("kind=") {
                        kind = Some(match k {
                            "tensor" => ArrowKind::TensorUnit,
                            "ident" => ArrowKind::Identification,
                            _ => return Err(perr(line, c, format!("unknown arrow kind `{k}`"))),
                        });
                    } else if let Some(w) = t.strip_prefix("xweight=") {
                        let num = w
                            .strip_suffix("/2")
                            .ok_or_else(|| perr(line, c, "xweight must be written `<k>/2`"))?;
                        xweight = Some(num.parse::<i64>().map_err(|_| perr(line, c, format!("bad xweight `{w}`")))?);
                    } else {
                        return Err(perr(line, c, format!("unexpected `{t}`")));
                    }
                }
                let kind = kind.ok_or_else(|| perr(line, col0, "missing `kind=`"))?;
                let mut spec = ArrowSpec::new(ids[1], ids[3], ids[5], kind);
                if let Some(w) = xweight {
                    spec = spec.with_xweight(w);
                }
                arrows.push(spec);
            }
            "fold" => {
                let rest = body.trim_start().strip_prefix("fold").unwrap_or("").trim_start();
                let rest = rest
                    .strip_prefix("by")
                    .map(str::trim)
                    .and_then(|r| strip_delims(r, '(', ')'))
                    .ok_or_else(|| perr(line, col0, "expected `fold by (<vertex cycles>; <arrow cycles>)`"))?;
                let (vc, ac) = rest.split_once(';').unwrap_or((rest, ""));
                folds.push((parse_cycles(vc, line, col0)?, parse_cycles(ac, line, col0)?));
            }
            other => return Err(perr(line, col0, format!("unknown declaration `{other}`"))),
        }
    }
    if vertices.is_empty() {
        return Err(perr(1, 1, "no vertices declared"));
    }
    let dq = DecoratedQuiver::build_with(decorations, vertices, arrows, policy)?;
    if folds.is_empty() {
        return Ok(dq);
    }
    let mut gens = Vec::new();
    for (vc, ac) in &folds {
        gens.push(Automorphism::from_cycles(&dq, vc, ac)?);
    }
    fold(&dq, &gens)
}
