//! Diamond-lemma rewriting over path algebras presented by generators.
//!
//! Monomials are paths of generators. A generator has a path length (arrows
//! have length one, algebra generators such as `x` have length zero) and an
//! x-degree in half-units. Monomials compare by path length, then x-degree,
//! then number of symbols, then lexicographically by the per-vertex ranking
//! of generators. All four keys are additive or lexicographic, so the order
//! is compatible with concatenation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::preprojective::{relation_element, SignConvention};
use crate::quiver::{ArrowKind, DecoratedQuiver};
use crate::scalar::{Field, Scalar};
use crate::series::HilbertSeries;
use crate::tensor::{telem_add, PathWord, TElem};

/// A generator of the path algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub source: usize,
    pub target: usize,
    /// Contribution to the path length.
    pub length: usize,
    /// x-degree in half-units.
    pub xdeg: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub vertices: Vec<String>,
    pub generators: Vec<Generator>,
}

impl Alphabet {
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }
}

/// A monomial: a composable sequence of generators starting at `source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub source: usize,
    pub gens: Vec<usize>,
}

impl Word {
    pub fn new(source: usize, gens: Vec<usize>) -> Word {
        Word { source, gens }
    }

    pub fn target(&self, alphabet: &Alphabet) -> usize {
        self.gens.last().map_or(self.source, |&g| alphabet.generators[g].target)
    }

    pub fn degree(&self, alphabet: &Alphabet) -> usize {
        self.gens.iter().map(|&g| alphabet.generators[g].length).sum()
    }

    pub fn xdeg(&self, alphabet: &Alphabet) -> i64 {
        self.gens.iter().map(|&g| alphabet.generators[g].xdeg).sum()
    }

    /// Dot-separated generator names; `e_<vertex>` for the empty word.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.gens.is_empty() {
            return format!("e_{}", alphabet.vertices[self.source]);
        }
        let names: Vec<&str> = self.gens.iter().map(|&g| alphabet.generators[g].name.as_str()).collect();
        names.join(".")
    }
}

/// A linear combination of words.
pub type Elem = BTreeMap<Word, Scalar>;

fn elem_add<K: Ord>(e: &mut BTreeMap<K, Scalar>, k: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match e.get_mut(&k) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                e.remove(&k);
            }
        }
        None => {
            e.insert(k, c);
        }
    }
}

/// Which neighbours rank higher in the default generator ranking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankingStyle {
    /// Length-zero generators first, then arrows toward lower vertex indices.
    TowardLower,
    /// Length-zero generators first, then arrows toward higher vertex indices.
    TowardHigher,
}

/// Length, x-degree, symbol count, then lexicographic by generator rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    /// Per vertex, the generators leaving it from greatest to least.
    pub ranking: Vec<Vec<usize>>,
    weight: Vec<u32>,
}

impl MonomialOrder {
    pub fn new(alphabet: &Alphabet, ranking: Vec<Vec<usize>>) -> Result<MonomialOrder> {
        let n = alphabet.generators.len();
        if ranking.len() != alphabet.vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: alphabet.vertices.len(),
                found: ranking.len(),
            });
        }
        let mut weight = vec![u32::MAX; n];
        for (v, list) in ranking.iter().enumerate() {
            for (pos, &g) in list.iter().enumerate() {
                let gen = alphabet
                    .generators
                    .get(g)
                    .ok_or_else(|| Error::UnsupportedParams(format!("unknown generator {g} in ranking")))?;
                if gen.source != v || weight[g] != u32::MAX {
                    return Err(Error::UnsupportedParams(format!(
                        "generator `{}` ranked twice or at the wrong vertex",
                        gen.name
                    )));
                }
                weight[g] = (list.len() - pos) as u32;
            }
        }
        if let Some(g) = weight.iter().position(|&w| w == u32::MAX) {
            return Err(Error::UnsupportedParams(format!(
                "generator `{}` missing from the ranking",
                alphabet.generators[g].name
            )));
        }
        Ok(MonomialOrder { ranking, weight })
    }

    pub fn with_style(alphabet: &Alphabet, style: RankingStyle) -> MonomialOrder {
        let mut ranking = vec![Vec::new(); alphabet.vertices.len()];
        for (g, gen) in alphabet.generators.iter().enumerate() {
            ranking[gen.source].push(g);
        }
        for list in &mut ranking {
            list.sort_by_key(|&g| {
                let gen = &alphabet.generators[g];
                let t = match style {
                    RankingStyle::TowardLower => gen.target as i64,
                    RankingStyle::TowardHigher => -(gen.target as i64),
                };
                (gen.length, t, g)
            });
        }
        MonomialOrder::new(alphabet, ranking).expect("ranking covers every generator once")
    }

    pub fn compare(&self, alphabet: &Alphabet, a: &Word, b: &Word) -> Ordering {
        key_of(alphabet, self, a.source, &a.gens).cmp(&key_of(alphabet, self, b.source, &b.gens))
    }
}

/// A monomial with its sort key; the derived order is the monomial order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    source: usize,
    plen: usize,
    xdeg: i64,
    nsyms: usize,
    lex: Vec<u32>,
    gens: Vec<usize>,
}

fn key_of(alphabet: &Alphabet, order: &MonomialOrder, source: usize, gens: &[usize]) -> Key {
    let mut plen = 0;
    let mut xdeg = 0;
    let mut lex = Vec::with_capacity(gens.len());
    for &g in gens {
        let gen = &alphabet.generators[g];
        plen += gen.length;
        xdeg += gen.xdeg;
        lex.push(order.weight[g]);
    }
    Key {
        source,
        plen,
        xdeg,
        nsyms: gens.len(),
        lex,
        gens: gens.to_vec(),
    }
}

type KElem = BTreeMap<Key, Scalar>;

/// How a rule entered the system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Built-in relation of a vertex algebra or identification arrow.
    Algebra,
    Input,
    /// Oriented from the witness of an unresolved ambiguity on this word.
    Completion { word: Word },
}

/// `lhs → rhs` with every rhs monomial smaller than `lhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Elem,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
struct IRule {
    lhs: Key,
    rhs: KElem,
    provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmbiguityKind {
    Overlap,
    Inclusion,
}

/// A word with two rule occurrences `(position, length)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambiguity {
    pub kind: AmbiguityKind,
    pub word: Word,
    pub first: (usize, usize),
    pub second: (usize, usize),
}

/// Summary of a completion run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionReport {
    pub initial_rules: usize,
    pub final_rules: usize,
    pub added: Vec<Word>,
    pub rounds: usize,
    pub ambiguities_checked: usize,
    /// Ambiguity words beyond the degree bound in the final round.
    pub beyond_bound: usize,
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    pub field: Field,
    pub alphabet: Alphabet,
    pub order: MonomialOrder,
    pub degree_bound: usize,
    /// Completion gives up once the system holds more rules than this.
    pub max_rules: usize,
    rules: Vec<IRule>,
    index: HashMap<Vec<usize>, usize>,
    lhs_lengths: BTreeMap<usize, usize>,
}

impl RewriteSystem {
    pub fn new(field: Field, alphabet: Alphabet, order: MonomialOrder, degree_bound: usize) -> RewriteSystem {
        RewriteSystem {
            field,
            alphabet,
            order,
            degree_bound,
            max_rules: 20_000,
            rules: Vec::new(),
            index: HashMap::new(),
            lhs_lengths: BTreeMap::new(),
        }
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn rules(&self) -> Vec<Rule> {
        let mut out: Vec<Rule> = self
            .rules
            .iter()
            .map(|r| Rule {
                lhs: self.word(&r.lhs),
                rhs: self.to_elem(&r.rhs),
                provenance: r.provenance.clone(),
            })
            .collect();
        out.sort_by(|a, b| self.order.compare(&self.alphabet, &a.lhs, &b.lhs));
        out
    }

    pub fn compare(&self, a: &Word, b: &Word) -> Ordering {
        self.order.compare(&self.alphabet, a, b)
    }

    /// The largest monomial of `e`.
    pub fn leading(&self, e: &Elem) -> Option<Word> {
        e.keys().max_by(|a, b| self.compare(a, b)).cloned()
    }

    fn key(&self, source: usize, gens: &[usize]) -> Key {
        key_of(&self.alphabet, &self.order, source, gens)
    }

    fn word(&self, k: &Key) -> Word {
        Word::new(k.source, k.gens.clone())
    }

    fn to_kelem(&self, e: &Elem) -> Result<KElem> {
        let mut out = KElem::new();
        for (w, c) in e {
            self.check_word(w)?;
            elem_add(&mut out, self.key(w.source, &w.gens), c.clone());
        }
        Ok(out)
    }

    fn to_elem(&self, e: &KElem) -> Elem {
        e.iter().map(|(k, c)| (self.word(k), c.clone())).collect()
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        let mut v = w.source;
        if v >= self.alphabet.vertices.len() {
            return Err(Error::UnsupportedParams(format!("word starts at unknown vertex {v}")));
        }
        for &g in &w.gens {
            match self.alphabet.generators.get(g) {
                Some(gen) if gen.source == v => v = gen.target,
                _ => return Err(Error::UnsupportedParams(format!("word {:?} is not a path", w.gens))),
            }
        }
        Ok(())
    }

    /// First rule occurrence in `gens`, as (position, rule index).
    fn find_match(&self, gens: &[usize]) -> Option<(usize, usize)> {
        for pos in 0..gens.len() {
            for &len in self.lhs_lengths.keys() {
                if pos + len > gens.len() {
                    break;
                }
                if let Some(&r) = self.index.get(&gens[pos..pos + len]) {
                    return Some((pos, r));
                }
            }
        }
        None
    }

    fn all_matches(&self, gens: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for pos in 0..gens.len() {
            for &len in self.lhs_lengths.keys() {
                if pos + len > gens.len() {
                    break;
                }
                if let Some(&r) = self.index.get(&gens[pos..pos + len]) {
                    out.push((pos, r));
                }
            }
        }
        out
    }

    pub fn is_reducible(&self, w: &Word) -> bool {
        self.find_match(&w.gens).is_some()
    }

    /// `c · k` with rule `r` applied at `pos`, added into `out`.
    fn apply_into(&self, out: &mut KElem, k: &Key, c: &Scalar, pos: usize, r: usize) {
        let rule = &self.rules[r];
        let len = rule.lhs.gens.len();
        for (rk, d) in &rule.rhs {
            let mut gens = Vec::with_capacity(k.gens.len() - len + rk.gens.len());
            gens.extend_from_slice(&k.gens[..pos]);
            gens.extend_from_slice(&rk.gens);
            gens.extend_from_slice(&k.gens[pos + len..]);
            elem_add(out, self.key(k.source, &gens), c.clone() * d.clone());
        }
    }

    fn nf(&self, e: KElem) -> KElem {
        let mut work = e;
        let mut out = KElem::new();
        // Reductions only produce smaller monomials, so each popped maximum
        // is final once it is irreducible.
        while let Some((k, c)) = work.pop_last() {
            match self.find_match(&k.gens) {
                Some((pos, r)) => self.apply_into(&mut work, &k, &c, pos, r),
                None => {
                    out.insert(k, c);
                }
            }
        }
        out
    }

    fn check_bound(&self, e: &KElem) -> Result<()> {
        match e.keys().map(|k| k.plen).max() {
            Some(d) if d > self.degree_bound => Err(Error::DegreeBoundExceeded(self.degree_bound)),
            _ => Ok(()),
        }
    }

    pub fn normal_form(&self, e: &Elem) -> Result<Elem> {
        let k = self.to_kelem(e)?;
        self.check_bound(&k)?;
        Ok(self.to_elem(&self.nf(k)))
    }

    /// Normal form reached by applying a randomly chosen reduction at a
    /// randomly chosen monomial at every step.
    pub fn normal_form_random<R: Rng>(&self, e: &Elem, rng: &mut R) -> Result<Elem> {
        let mut work = self.to_kelem(e)?;
        self.check_bound(&work)?;
        loop {
            let reducible: Vec<(Key, Vec<(usize, usize)>)> = work
                .keys()
                .filter_map(|k| {
                    let m = self.all_matches(&k.gens);
                    (!m.is_empty()).then(|| (k.clone(), m))
                })
                .collect();
            if reducible.is_empty() {
                return Ok(self.to_elem(&work));
            }
            let (k, matches) = &reducible[rng.gen_range(0..reducible.len())];
            let (pos, r) = matches[rng.gen_range(0..matches.len())];
            let c = work.remove(k).expect("present");
            self.apply_into(&mut work, k, &c, pos, r);
        }
    }

    fn insert_rule(&mut self, rule: IRule) {
        let idx = self.rules.len();
        self.index.insert(rule.lhs.gens.clone(), idx);
        *self.lhs_lengths.entry(rule.lhs.gens.len()).or_insert(0) += 1;
        self.rules.push(rule);
    }

    fn remove_rule(&mut self, idx: usize) -> IRule {
        let rule = self.rules.swap_remove(idx);
        self.index.remove(&rule.lhs.gens);
        let len = rule.lhs.gens.len();
        let count = self.lhs_lengths.get_mut(&len).expect("tracked");
        *count -= 1;
        if *count == 0 {
            self.lhs_lengths.remove(&len);
        }
        if idx < self.rules.len() {
            let moved = self.rules[idx].lhs.gens.clone();
            self.index.insert(moved, idx);
        }
        rule
    }

    /// Adds `lhs → rhs` verbatim after checking that it decreases.
    pub fn add_rule(&mut self, lhs: Word, rhs: &Elem, provenance: Provenance) -> Result<()> {
        self.check_word(&lhs)?;
        if lhs.gens.is_empty() {
            return Err(Error::UnsupportedParams("rule with an empty left-hand side".into()));
        }
        let lk = self.key(lhs.source, &lhs.gens);
        let rhs = self.to_kelem(rhs)?;
        if let Some(bad) = rhs.keys().find(|k| **k >= lk || (k.source, k_target(self, k)) != (lk.source, k_target(self, &lk))) {
            return Err(Error::UnsupportedParams(format!(
                "rhs monomial {} is not smaller than lhs {} in the same block",
                self.word(bad).render(&self.alphabet),
                lhs.render(&self.alphabet)
            )));
        }
        if self.index.contains_key(&lk.gens) {
            return Err(Error::UnsupportedParams(format!(
                "duplicate left-hand side {}",
                lhs.render(&self.alphabet)
            )));
        }
        self.insert_rule(IRule {
            lhs: lk,
            rhs,
            provenance,
        });
        Ok(())
    }

    /// Orients `e` (after reduction) as a rule and inter-reduces the system.
    /// Returns whether a rule was added.
    pub fn add_relation(&mut self, e: &Elem, provenance: Provenance) -> Result<bool> {
        let k = self.to_kelem(e)?;
        self.insert_poly(k, provenance)
    }

    fn insert_poly(&mut self, p: KElem, provenance: Provenance) -> Result<bool> {
        let mut stack = vec![(p, provenance)];
        let mut added = false;
        while let Some((p, prov)) = stack.pop() {
            let mut p = self.nf(p);
            let Some((lk, lc)) = p.pop_last() else {
                continue;
            };
            if lk.gens.is_empty() {
                return Err(Error::UnsupportedParams("relations reduce a vertex idempotent".into()));
            }
            let inv = lc.inv()?;
            let rhs: KElem = p.into_iter().map(|(k, c)| (k, -(c * inv.clone()))).collect();
            let mut i = 0;
            while i < self.rules.len() {
                if contains(&self.rules[i].lhs.gens, &lk.gens) {
                    let old = self.remove_rule(i);
                    let mut poly = old.rhs;
                    for c in poly.values_mut() {
                        *c = -c.clone();
                    }
                    poly.insert(old.lhs, self.field.one());
                    stack.push((poly, old.provenance));
                } else {
                    i += 1;
                }
            }
            let new_lhs = lk.gens.clone();
            self.insert_rule(IRule {
                lhs: lk,
                rhs,
                provenance: prov,
            });
            for i in 0..self.rules.len() {
                if self.rules[i].rhs.keys().any(|k| contains(&k.gens, &new_lhs)) {
                    let r = std::mem::take(&mut self.rules[i].rhs);
                    self.rules[i].rhs = self.nf(r);
                }
            }
            added = true;
        }
        Ok(added)
    }

    /// Overlap and inclusion ambiguities whose word has degree within the
    /// bound, plus the number of those beyond it.
    fn ambiguities(&self) -> (Vec<Ambiguity>, usize) {
        let mut out = Vec::new();
        let mut beyond = 0;
        let mut push = |out: &mut Vec<Ambiguity>, amb: Ambiguity| {
            if amb.word.degree(&self.alphabet) > self.degree_bound {
                beyond += 1;
            } else {
                out.push(amb);
            }
        };
        for r1 in &self.rules {
            let l1 = &r1.lhs.gens;
            for r2 in &self.rules {
                let l2 = &r2.lhs.gens;
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] == l2[..k] {
                        let mut gens = l1.clone();
                        gens.extend_from_slice(&l2[k..]);
                        push(
                            &mut out,
                            Ambiguity {
                                kind: AmbiguityKind::Overlap,
                                word: Word::new(r1.lhs.source, gens),
                                first: (0, l1.len()),
                                second: (l1.len() - k, l2.len()),
                            },
                        );
                    }
                }
                if l2.len() < l1.len() {
                    for p in 0..=l1.len() - l2.len() {
                        if l1[p..p + l2.len()] == l2[..] {
                            push(
                                &mut out,
                                Ambiguity {
                                    kind: AmbiguityKind::Inclusion,
                                    word: Word::new(r1.lhs.source, l1.clone()),
                                    first: (0, l1.len()),
                                    second: (p, l2.len()),
                                },
                            );
                        }
                    }
                }
            }
        }
        (out, beyond)
    }

    pub fn find_ambiguities(&self) -> Vec<Ambiguity> {
        self.ambiguities().0
    }

    /// `nf(branch₁) − nf(branch₂)`, or `None` if an occurrence is no longer
    /// a rule of the system.
    fn witness(&self, amb: &Ambiguity) -> Option<KElem> {
        let k = self.key(amb.word.source, &amb.word.gens);
        let one = self.field.one();
        let branch = |(pos, len): (usize, usize)| -> Option<KElem> {
            let &r = self.index.get(&amb.word.gens[pos..pos + len])?;
            let mut e = KElem::new();
            self.apply_into(&mut e, &k, &one, pos, r);
            Some(self.nf(e))
        };
        let mut a = branch(amb.first)?;
        for (kk, c) in branch(amb.second)? {
            elem_add(&mut a, kk, -c);
        }
        Some(a)
    }

    /// `None` if both branches reach the same normal form, otherwise the
    /// nonzero difference of the two normal forms.
    pub fn resolve(&self, amb: &Ambiguity) -> Result<Option<Elem>> {
        if amb.word.degree(&self.alphabet) > self.degree_bound {
            return Err(Error::DegreeBoundExceeded(self.degree_bound));
        }
        let w = self
            .witness(amb)
            .ok_or_else(|| Error::UnsupportedParams("ambiguity does not match the current rules".into()))?;
        Ok((!w.is_empty()).then(|| self.to_elem(&w)))
    }

    /// Bounded completion: every unresolved witness becomes a new rule until
    /// a full pass over the ambiguities adds nothing.
    pub fn complete(&mut self) -> Result<CompletionReport> {
        let initial = self.rules.len();
        let mut report = CompletionReport {
            initial_rules: initial,
            final_rules: initial,
            added: Vec::new(),
            rounds: 0,
            ambiguities_checked: 0,
            beyond_bound: 0,
        };
        // Ambiguities resolved since the last added rule stay resolved.
        let mut seen: HashSet<(Vec<usize>, usize, usize, usize, usize)> = HashSet::new();
        loop {
            report.rounds += 1;
            let (ambs, beyond) = self.ambiguities();
            report.beyond_bound = beyond;
            let mut changed = false;
            let mut pending = 0;
            for amb in &ambs {
                let tag = (amb.word.gens.clone(), amb.first.0, amb.first.1, amb.second.0, amb.second.1);
                if seen.contains(&tag) {
                    continue;
                }
                let Some(w) = self.witness(amb) else {
                    pending += 1;
                    continue;
                };
                report.ambiguities_checked += 1;
                if w.is_empty() {
                    seen.insert(tag);
                    continue;
                }
                let lead = self.word(w.keys().next_back().expect("nonzero"));
                if self.insert_poly(w, Provenance::Completion { word: amb.word.clone() })? {
                    report.added.push(lead);
                    changed = true;
                    seen.clear();
                }
                if self.rules.len() > self.max_rules {
                    return Err(Error::NonTerminatingWithinBound {
                        pending: ambs.len() + pending,
                    });
                }
            }
            if !changed && pending == 0 {
                break;
            }
        }
        report.final_rules = self.rules.len();
        Ok(report)
    }

    /// Irreducible words of degree at most `max_degree`.
    pub fn irreducible_words(&self, max_degree: usize) -> Result<Vec<Word>> {
        let mut out_gens: Vec<Vec<usize>> = vec![Vec::new(); self.alphabet.vertices.len()];
        for (g, gen) in self.alphabet.generators.iter().enumerate() {
            out_gens[gen.source].push(g);
        }
        // Length-zero generators without a nilpotency rule would give
        // infinitely many irreducible words of bounded degree.
        let symbol_cap = 8 * (max_degree + 1) + 64;
        let mut out = Vec::new();
        for v in 0..self.alphabet.vertices.len() {
            let mut stack = vec![(Vec::<usize>::new(), v, 0usize)];
            while let Some((gens, at, plen)) = stack.pop() {
                if gens.len() > symbol_cap {
                    return Err(Error::DegreeBoundExceeded(max_degree));
                }
                for &g in out_gens[at].iter().rev() {
                    let gen = &self.alphabet.generators[g];
                    let np = plen + gen.length;
                    if np > max_degree {
                        continue;
                    }
                    let mut ng = gens.clone();
                    ng.push(g);
                    if !self.has_rule_suffix(&ng) {
                        stack.push((ng, gen.target, np));
                    }
                }
                out.push(Word::new(v, gens));
            }
        }
        out.sort_by(|a, b| self.compare(a, b));
        Ok(out)
    }

    fn has_rule_suffix(&self, gens: &[usize]) -> bool {
        self.lhs_lengths
            .keys()
            .take_while(|&&l| l <= gens.len())
            .any(|&l| self.index.contains_key(&gens[gens.len() - l..]))
    }

    /// Irreducible words counted by (source, target, degree, x-degree).
    pub fn irreducible_count(&self, max_degree: usize) -> Result<BTreeMap<(usize, usize, usize, i64), usize>> {
        let mut out = BTreeMap::new();
        for w in self.irreducible_words(max_degree)? {
            let key = (
                w.source,
                w.target(&self.alphabet),
                w.degree(&self.alphabet),
                w.xdeg(&self.alphabet),
            );
            *out.entry(key).or_insert(0) += 1;
        }
        Ok(out)
    }

    /// The irreducible counts up to the degree bound as a Hilbert series.
    pub fn irreducible_series(&self) -> Result<HilbertSeries> {
        let counts = self.irreducible_count(self.degree_bound)?;
        let top_empty = !counts.keys().any(|k| k.2 == self.degree_bound);
        let mut h = HilbertSeries::new(self.alphabet.vertices.clone(), self.degree_bound, top_empty);
        for ((i, j, t, s), c) in counts {
            h.add(t, s, i, j, c as i64);
        }
        Ok(h)
    }

    pub fn render_elem(&self, e: &Elem) -> String {
        render_elem(&self.alphabet, &self.order, e)
    }

    /// The system in rule-file syntax.
    pub fn to_rule_file(&self) -> String {
        let mut s = String::new();
        for g in &self.alphabet.generators {
            let _ = writeln!(
                s,
                "gen {} : {} -> {} len={} xdeg={}/2",
                g.name, self.alphabet.vertices[g.source], self.alphabet.vertices[g.target], g.length, g.xdeg
            );
        }
        for (v, list) in self.order.ranking.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let names: Vec<&str> = list.iter().map(|&g| self.alphabet.generators[g].name.as_str()).collect();
            let _ = writeln!(s, "order vertex {}: {}", self.alphabet.vertices[v], names.join(" > "));
        }
        for r in self.rules() {
            let _ = writeln!(s, "rule: {} -> {}", r.lhs.render(&self.alphabet), self.render_elem(&r.rhs));
        }
        s
    }

    pub fn report_json(&self, report: &CompletionReport) -> Result<Value> {
        let counts = self.irreducible_count(self.degree_bound)?;
        let total: usize = counts.values().sum();
        let by_degree: BTreeMap<String, usize> = counts.iter().fold(BTreeMap::new(), |mut m, (k, c)| {
            *m.entry(k.2.to_string()).or_insert(0) += c;
            m
        });
        let added: Vec<String> = report.added.iter().map(|w| w.render(&self.alphabet)).collect();
        let rules: Vec<Value> = self
            .rules()
            .iter()
            .map(|r| json!({"lhs": r.lhs.render(&self.alphabet), "rhs": self.render_elem(&r.rhs)}))
            .collect();
        Ok(json!({
            "degree_bound": self.degree_bound,
            "initial_rules": report.initial_rules,
            "final_rules": report.final_rules,
            "rounds": report.rounds,
            "ambiguities_checked": report.ambiguities_checked,
            "beyond_bound": report.beyond_bound,
            "added": added,
            "rules": rules,
            "irreducible_total": total,
            "irreducible_by_degree": by_degree,
        }))
    }
}

fn k_target(sys: &RewriteSystem, k: &Key) -> usize {
    k.gens.last().map_or(k.source, |&g| sys.alphabet.generators[g].target)
}

fn contains(hay: &[usize], needle: &[usize]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Terms in decreasing order, e.g. `-a.b.a.b - b.a.a.b`; `0` if empty.
pub fn render_elem(alphabet: &Alphabet, order: &MonomialOrder, e: &Elem) -> String {
    if e.is_empty() {
        return "0".into();
    }
    let mut terms: Vec<(&Word, &Scalar)> = e.iter().collect();
    terms.sort_by(|a, b| order.compare(alphabet, b.0, a.0));
    let mut s = String::new();
    for (i, (w, c)) in terms.into_iter().enumerate() {
        let neg = c.signum() == Some(-1);
        let mag = if neg { -c.clone() } else { c.clone() };
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if !mag.is_one() {
            let _ = write!(s, "{mag}*");
        }
        s.push_str(&w.render(alphabet));
    }
    s
}

/// Generators of a decorated quiver whose vertex algebras are all `k` or
/// `k[x]/(x^m)`: the arrows of the double plus one `x` per nontrivial vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    /// Generator of each arrow of the doubled quiver.
    pub arrow_gen: Vec<usize>,
    /// The `x` generator at each vertex, if the algebra is not `k`.
    pub x_gen: Vec<Option<usize>>,
    /// `m` with `A_v = k[x]/(x^m)`.
    pub nilpotency: Vec<usize>,
}

/// Whether basis element `p` is `x^p` with `x^m = 0`, `m = dim`.
fn is_monogenic(a: &crate::algebra::FiniteDimAlgebra) -> bool {
    let m = a.dim();
    let f = a.field();
    if a.unit_sparse() != vec![(0, f.one())] {
        return false;
    }
    (1..m).all(|p| {
        let prod = a.basis_product(p, 1);
        if p + 1 < m {
            *prod == vec![(p + 1, f.one())]
        } else {
            prod.is_empty()
        }
    })
}

impl Presentation {
    pub fn new(dq: &DecoratedQuiver) -> Result<Presentation> {
        let d = dq.double();
        let vertices: Vec<String> = d.vertices().iter().map(|v| v.id.clone()).collect();
        let mut generators = Vec::new();
        let mut x_gen = Vec::new();
        let mut nilpotency = Vec::new();
        for v in 0..d.num_vertices() {
            let a = d.algebra(v);
            nilpotency.push(a.dim());
            if a.dim() == 1 {
                x_gen.push(None);
                continue;
            }
            if !is_monogenic(a) {
                return Err(Error::UnsupportedParams(format!(
                    "vertex {} is not decorated by k[x]/(x^m)",
                    vertices[v]
                )));
            }
            x_gen.push(Some(generators.len()));
            generators.push(Generator {
                name: format!("x_{}", vertices[v]),
                source: v,
                target: v,
                length: 0,
                xdeg: a.xdeg(1),
            });
        }
        let mut arrow_gen = Vec::new();
        for a in d.arrows() {
            arrow_gen.push(generators.len());
            generators.push(Generator {
                name: a.id.clone(),
                source: a.source,
                target: a.target,
                length: 1,
                xdeg: a.xweight,
            });
        }
        Ok(Presentation {
            alphabet: Alphabet { vertices, generators },
            arrow_gen,
            x_gen,
            nilpotency,
        })
    }

    /// `x^m = 0` at each vertex and `x β = β x` across identification arrows.
    pub fn algebra_relations(&self, dq: &DecoratedQuiver) -> Vec<Elem> {
        let d = dq.double();
        let f = d.field();
        let mut out = Vec::new();
        for (v, g) in self.x_gen.iter().enumerate() {
            if let Some(g) = *g {
                let w = Word::new(v, vec![g; self.nilpotency[v]]);
                out.push(Elem::from([(w, f.one())]));
            }
        }
        for (a, arr) in d.arrows().iter().enumerate() {
            if arr.kind != ArrowKind::Identification {
                continue;
            }
            if let (Some(xs), Some(xt)) = (self.x_gen[arr.source], self.x_gen[arr.target]) {
                let b = self.arrow_gen[a];
                let mut e = Elem::new();
                e.insert(Word::new(arr.source, vec![xs, b]), f.one());
                e.insert(Word::new(arr.source, vec![b, xt]), -f.one());
                out.push(e);
            }
        }
        out
    }

    /// The word with each slot's powers of `x` at the end of its segment.
    pub fn word_of(&self, dq: &DecoratedQuiver, w: &PathWord) -> Word {
        let d = dq.double();
        let sv = w.slot_vertices(&d);
        let mut gens = Vec::new();
        let mut seg = 0;
        let push_x = |gens: &mut Vec<usize>, seg: usize| {
            if let Some(g) = self.x_gen[sv[seg]] {
                gens.extend(std::iter::repeat_n(g, w.slots[seg]));
            }
        };
        for &a in &w.arrows {
            if d.arrows()[a].kind == ArrowKind::TensorUnit {
                push_x(&mut gens, seg);
                seg += 1;
            }
            gens.push(self.arrow_gen[a]);
        }
        push_x(&mut gens, seg);
        Word::new(w.source, gens)
    }

    /// The path word of `w`, or `None` if a segment's power of `x` vanishes.
    pub fn path_word(&self, dq: &DecoratedQuiver, w: &Word) -> Option<PathWord> {
        let d = dq.double();
        let mut arrows = Vec::new();
        let mut slots = Vec::new();
        let mut v = w.source;
        let mut count = 0;
        for &g in &w.gens {
            if let Some(a) = self.arrow_gen.iter().position(|&x| x == g) {
                let arr = &d.arrows()[a];
                if arr.kind == ArrowKind::TensorUnit {
                    slots.push(count);
                    count = 0;
                }
                arrows.push(a);
                v = arr.target;
            } else {
                count += 1;
                if count >= self.nilpotency[v] {
                    return None;
                }
            }
        }
        slots.push(count);
        Some(PathWord {
            source: w.source,
            arrows,
            slots,
        })
    }

    pub fn elem_of(&self, dq: &DecoratedQuiver, e: &TElem) -> Elem {
        let mut out = Elem::new();
        for (w, c) in e {
            elem_add(&mut out, self.word_of(dq, w), c.clone());
        }
        out
    }

    pub fn telem_of(&self, dq: &DecoratedQuiver, e: &Elem) -> TElem {
        let mut out = TElem::new();
        for (w, c) in e {
            if let Some(p) = self.path_word(dq, w) {
                telem_add(&mut out, p, c.clone());
            }
        }
        out
    }
}

/// The uncompleted system of `Π(dq)`: algebra relations, then the
/// components `e_v r` of the preprojective relation.
pub fn preprojective_system(
    dq: &DecoratedQuiver,
    convention: SignConvention,
    style: RankingStyle,
    degree_bound: usize,
) -> Result<(RewriteSystem, Presentation)> {
    let pres = Presentation::new(dq)?;
    let order = MonomialOrder::with_style(&pres.alphabet, style);
    let mut sys = RewriteSystem::new(dq.field(), pres.alphabet.clone(), order, degree_bound);
    for e in pres.algebra_relations(dq) {
        sys.add_relation(&e, Provenance::Algebra)?;
    }
    let r = relation_element(dq, convention)?;
    for comp in &r.components {
        sys.add_relation(&pres.elem_of(dq, comp), Provenance::Input)?;
    }
    Ok((sys, pres))
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

/// Parses a rule file.
///
/// ```text
/// gen <name> : <src> -> <tgt> [len=<n>] [xdeg=<k>/2]
/// order vertex <v>: g1 > g2 > ...
/// rule: <word> -> <coeff>*<word> ± ...
/// relation: <coeff>*<word> ± ...
/// bound: <n>
/// ```
///
/// Generators named only in an `order` line are loops of length one at that
/// vertex. `rule` lines are added verbatim; `relation` lines are oriented.
pub fn parse_rule_file(text: &str, field: Field) -> Result<RewriteSystem> {
    let mut vertices: Vec<String> = Vec::new();
    let mut generators: Vec<Generator> = Vec::new();
    let mut rankings: Vec<(usize, Vec<String>, usize)> = Vec::new();
    let mut bodies: Vec<(usize, &str, usize, bool)> = Vec::new();
    let mut bound: Option<usize> = None;
    let vertex = |vertices: &mut Vec<String>, id: &str| -> usize {
        match vertices.iter().position(|v| v == id) {
            Some(i) => i,
            None => {
                vertices.push(id.to_string());
                vertices.len() - 1
            }
        }
    };
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col0 = line.len() - line.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix("gen ") {
            let (name, spec) = rest
                .split_once(':')
                .ok_or_else(|| perr(line_no, col0, "expected `gen <name> : <src> -> <tgt>`"))?;
            let name = name.trim();
            let mut parts = spec.split_whitespace();
            let src = parts.next().ok_or_else(|| perr(line_no, col0, "missing source"))?;
            if parts.next() != Some("->") {
                return Err(perr(line_no, col0, "expected `->`"));
            }
            let tgt = parts.next().ok_or_else(|| perr(line_no, col0, "missing target"))?;
            let (mut length, mut xdeg) = (1, 0);
            for p in parts {
                if let Some(v) = p.strip_prefix("len=") {
                    length = v.parse().map_err(|_| perr(line_no, col0, format!("bad length `{v}`")))?;
                } else if let Some(v) = p.strip_prefix("xdeg=") {
                    let num = v.strip_suffix("/2").unwrap_or(v);
                    xdeg = num.parse().map_err(|_| perr(line_no, col0, format!("bad x-degree `{v}`")))?;
                    if !v.ends_with("/2") {
                        xdeg *= 2;
                    }
                } else {
                    return Err(perr(line_no, col0, format!("unknown attribute `{p}`")));
                }
            }
            if name.is_empty() || name.contains('.') || generators.iter().any(|g| g.name == name) {
                return Err(perr(line_no, col0, format!("bad or duplicate generator name `{name}`")));
            }
            let source = vertex(&mut vertices, src);
            let target = vertex(&mut vertices, tgt);
            generators.push(Generator {
                name: name.to_string(),
                source,
                target,
                length,
                xdeg,
            });
        } else if let Some(rest) = trimmed.strip_prefix("order vertex ") {
            let (v, list) = rest
                .split_once(':')
                .ok_or_else(|| perr(line_no, col0, "expected `order vertex <v>: g1 > g2`"))?;
            let v = vertex(&mut vertices, v.trim());
            let names: Vec<String> = list.split('>').map(|s| s.trim().to_string()).collect();
            if names.iter().any(|n| n.is_empty()) {
                return Err(perr(line_no, col0, "empty generator name in ranking"));
            }
            rankings.push((v, names, line_no));
        } else if let Some(rest) = trimmed.strip_prefix("rule:") {
            bodies.push((line_no, rest, line.len() - rest.len() + 1, true));
        } else if let Some(rest) = trimmed.strip_prefix("relation:") {
            bodies.push((line_no, rest, line.len() - rest.len() + 1, false));
        } else if let Some(rest) = trimmed.strip_prefix("bound:") {
            bound = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| perr(line_no, col0, format!("bad bound `{}`", rest.trim())))?,
            );
        } else {
            return Err(perr(line_no, col0, format!("unrecognised line `{trimmed}`")));
        }
    }
    for (v, names, _) in &rankings {
        for n in names {
            if !generators.iter().any(|g| &g.name == n) {
                generators.push(Generator {
                    name: n.clone(),
                    source: *v,
                    target: *v,
                    length: 1,
                    xdeg: 0,
                });
            }
        }
    }
    let alphabet = Alphabet { vertices, generators };
    let mut ranking = vec![Vec::new(); alphabet.vertices.len()];
    for (v, names, line_no) in &rankings {
        for n in names {
            let g = alphabet.generator_index(n).expect("declared above");
            if alphabet.generators[g].source != *v {
                return Err(perr(*line_no, 1, format!("generator `{n}` does not leave this vertex")));
            }
            ranking[*v].push(g);
        }
    }
    for (g, gen) in alphabet.generators.iter().enumerate() {
        if !ranking[gen.source].contains(&g) {
            ranking[gen.source].push(g);
        }
    }
    let order = MonomialOrder::new(&alphabet, ranking).map_err(|e| perr(0, 0, e.to_string()))?;
    let mut sys = RewriteSystem::new(field, alphabet, order, bound.unwrap_or(12));
    for (line_no, body, col, is_rule) in bodies {
        if is_rule {
            let (lhs, rhs) = body
                .split_once("->")
                .ok_or_else(|| perr(line_no, col, "expected `<word> -> <terms>`"))?;
            let lhs_terms = parse_terms(&sys.alphabet, field, lhs, line_no, col)?;
            let rhs_col = col + lhs.len() + 2;
            let rhs = parse_terms(&sys.alphabet, field, rhs, line_no, rhs_col)?;
            let lhs_word = match lhs_terms.iter().next() {
                Some((w, c)) if lhs_terms.len() == 1 && c.is_one() => w.clone(),
                _ => return Err(perr(line_no, col, "left-hand side must be a single word")),
            };
            sys.add_rule(lhs_word, &rhs, Provenance::Input)
                .map_err(|e| perr(line_no, col, e.to_string()))?;
        } else {
            let e = parse_terms(&sys.alphabet, field, body, line_no, col)?;
            sys.add_relation(&e, Provenance::Input)
                .map_err(|e| perr(line_no, col, e.to_string()))?;
        }
    }
    Ok(sys)
}

/// Parses `[±][coeff*]word ± ...`; `0` is the empty sum.
pub fn parse_terms(alphabet: &Alphabet, field: Field, text: &str, line: usize, col: usize) -> Result<Elem> {
    let mut out = Elem::new();
    let bytes = text.as_bytes();
    let mut starts = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        // A sign separates terms unless it belongs to a coefficient such as `1/-2`.
        if (c == b'+' || c == b'-') && text[..i].trim_end().chars().last().is_none_or(|p| p != '/' && p != '*') {
            starts.push(i);
        }
        i += 1;
    }
    let mut pieces = Vec::new();
    let mut prev = 0;
    for &s in &starts {
        pieces.push((prev, &text[prev..s]));
        prev = s;
    }
    pieces.push((prev, &text[prev..]));
    for (off, piece) in pieces {
        let p = piece.trim();
        if p.is_empty() {
            continue;
        }
        let at = col + off + (piece.len() - piece.trim_start().len());
        let (neg, body) = match p.as_bytes()[0] {
            b'-' => (true, p[1..].trim()),
            b'+' => (false, p[1..].trim()),
            _ => (false, p),
        };
        if body.is_empty() {
            return Err(perr(line, at, "dangling sign"));
        }
        let (coeff, word) = match body.split_once('*') {
            Some((c, w)) => (
                field.parse(c.trim()).map_err(|e| perr(line, at, e))?,
                w.trim(),
            ),
            None => (field.one(), body),
        };
        if word == "0" {
            continue;
        }
        let idempotent = word.strip_prefix("e_").filter(|_| alphabet.generator_index(word).is_none());
        let mut gens = Vec::new();
        for tok in word.split('.').filter(|_| idempotent.is_none()) {
            let tok = tok.trim();
            let g = alphabet
                .generator_index(tok)
                .ok_or_else(|| perr(line, at, format!("unknown generator `{tok}`")))?;
            gens.push(g);
        }
        let source = match (idempotent, gens.first()) {
            (_, Some(&g)) => alphabet.generators[g].source,
            (Some(v), None) => alphabet.vertex_index(v).ok_or_else(|| perr(line, at, "unknown vertex"))?,
            _ => return Err(perr(line, at, "empty word")),
        };
        let mut v = source;
        for &g in &gens {
            if alphabet.generators[g].source != v {
                return Err(perr(line, at, format!("`{word}` is not a path")));
            }
            v = alphabet.generators[g].target;
        }
        let c = if neg { -coeff } else { coeff };
        elem_add(&mut out, Word::new(source, gens), c);
    }
    Ok(out)
}
