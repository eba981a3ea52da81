//! Executable checks of the structural facts about word matrices and the
//! series `(S,w)`, run against a single automaton or the built-in suite.
//!
//! Failures are reported as data: every assertion carries a pass/fail
//! status, the number of instances it was checked on, and a counterexample
//! when one was found.

use std::collections::{HashSet, VecDeque};

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automaton::{
    cerny_automaton, cerny_reset_word, kari_automaton, roman_automaton, Dfa, Letter, Word,
    KARI_WORD, ROMAN_WORD,
};
use crate::enumeration::{cerny_bound, upper_bound};
use crate::error::Result;
use crate::linspace::{
    dense_rank, letter_closure_check, rational, span_dimension, standard_basis, supported_word_matrices,
    support_columns, word_span_dimension, word_space_basis, Echelon, FlatMatrix, LetterClosure, Rational,
};
use crate::series::{
    series_linearity_check, suffix_matrices, suffix_space_bound, suffix_space_dimension, threshold_count,
    Linearity, SeriesContext,
};
use crate::sync::{
    is_irreducible, left_stability_holds, near_sync_suffixes, reset_collapse, shortest_reset_word,
    suffix_distinctness_check, Implication,
};
use crate::word_matrix::WordMatrix;

const SEED: u64 = 0x5eed_c0de;

/// Cap on enumerated supported matrices inside the suite.
const SUPPORT_ENUM_LIMIT: usize = 4096;

/// Cap on distinct transition-monoid elements sampled.
const MONOID_SAMPLE: usize = 3000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Diagnostic only; never fails the suite.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub id: String,
    pub statement: String,
    pub status: Status,
    pub instances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Facts published for a specific example automaton.
#[derive(Clone, Debug, Default)]
pub struct Expectations {
    /// A reset word given with the example.
    pub word: Option<Word>,
    pub reset_length: Option<usize>,
    /// `(bound, count)` pairs for [`threshold_count`] on `word`.
    pub threshold_counts: Vec<(i64, usize)>,
    /// Every level `0 < i < n-1` is attained by exactly `n` consecutive suffixes.
    pub consecutive_runs: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomatonVerification {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub synchronizing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reset_word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reset_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    pub assertions: Vec<Assertion>,
}

impl AutomatonVerification {
    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| a.status == Status::Fail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub automata: Vec<AutomatonVerification>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.automata.iter().all(AutomatonVerification::all_passed)
    }
}

/// Accumulates instances and the first counterexample for one assertion.
struct Tally {
    id: &'static str,
    statement: &'static str,
    instances: usize,
    counterexample: Option<String>,
    detail: Option<String>,
}

impl Tally {
    fn new(id: &'static str, statement: &'static str) -> Self {
        Tally {
            id,
            statement,
            instances: 0,
            counterexample: None,
            detail: None,
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    fn finish(self) -> Assertion {
        Assertion {
            id: self.id.to_string(),
            statement: self.statement.to_string(),
            status: if self.counterexample.is_some() { Status::Fail } else { Status::Pass },
            instances: self.instances,
            counterexample: self.counterexample,
            detail: self.detail,
        }
    }

    fn info(self) -> Assertion {
        Assertion {
            status: Status::Info,
            ..self.finish()
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng, k: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::new((0..len).map(|_| rng.gen_range(0..k) as Letter).collect())
}

/// Distinct elements of the transition monoid with a shortest word for
/// each, in shortlex discovery order, up to `cap` elements.
fn monoid_sample(dfa: &Dfa, cap: usize) -> Vec<(Word, WordMatrix)> {
    let e = WordMatrix::identity(dfa.n());
    let mut seen = HashSet::from([e.clone()]);
    let mut out = vec![(Word::empty(), e)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for l in 0..dfa.k() {
            if out.len() >= cap {
                return out;
            }
            let m = out[i].1.mul(&WordMatrix::of_letters(dfa, &[l as Letter]));
            if seen.insert(m.clone()) {
                let mut w = out[i].0.clone();
                w.push(l as Letter);
                out.push((w, m));
                queue.push_back(out.len() - 1);
            }
        }
    }
    out
}

/// Largest suffix `u` of `s` whose suffix matrices `{M_t : t ⪯ u}` (the
/// empty suffix included) are linearly independent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuffixClosedCheck {
    /// `|u|`.
    pub independent_len: usize,
    /// Number of right subwords of `u`, counting the empty one: `|u| + 1`.
    pub suffix_count: usize,
    /// Dimension of their span, recomputed from scratch.
    pub dimension: usize,
    pub holds: bool,
}

/// Finds the longest suffix of `s` with independent suffix matrices and
/// checks that the dimension of their span equals their number.
pub fn suffix_closed_dimension_check(dfa: &Dfa, s: &Word) -> Result<SuffixClosedCheck> {
    s.validate(dfa.k())?;
    let n = dfa.n();
    let mats = suffix_matrices(dfa, s);
    let mut ech = Echelon::new(n * n);
    let mut count = 0;
    for m in &mats {
        if !ech.insert_word_matrix(m)? {
            break;
        }
        count += 1;
    }
    let flats: Vec<FlatMatrix> = mats[..count].iter().map(FlatMatrix::from).collect();
    let dimension = span_dimension(&flats)?;
    Ok(SuffixClosedCheck {
        independent_len: count - 1,
        suffix_count: count,
        dimension,
        holds: dimension == count,
    })
}

/// Runs every check against one automaton. `expectations` adds the checks
/// tied to a published example.
pub fn verify_automaton(name: &str, dfa: &Dfa, expectations: &Expectations) -> Result<AutomatonVerification> {
    let n = dfa.n();
    let k = dfa.k();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = AutomatonVerification {
        name: name.to_string(),
        n,
        k,
        synchronizing: false,
        reset_word: None,
        reset_length: None,
        target: None,
        assertions: Vec::new(),
    };
    let asserts = &mut out.assertions;

    let Some(reset) = shortest_reset_word(dfa)? else {
        let mut t = Tally::new("sync.exists", "the automaton has a reset word");
        t.check(false, || "no word maps all states to one".into());
        asserts.push(t.finish());
        return Ok(out);
    };
    out.synchronizing = true;
    out.reset_word = Some(reset.word.to_string());
    out.reset_length = Some(reset.length);
    out.target = Some(reset.target);
    let s = reset.word.clone();
    let q = reset.target;
    let ctx = SeriesContext::singleton(dfa, q)?;

    // Reset words examined: the shortest one plus any published word.
    let mut reset_words = vec![s.clone()];
    if let Some(w) = &expectations.word {
        if dfa.image(dfa.all_states(), w)?.len() == 1 && *w != s {
            reset_words.push(w.clone());
        }
    }

    let short = dfa.words_up_to(if k <= 2 { 3 } else { 2 });
    let short_m: Vec<WordMatrix> = short.iter().map(|w| WordMatrix::of_letters(dfa, w.letters())).collect();

    // Word matrices form a monoid morphism.
    let mut t = Tally::new("action.morphism", "M_u M_v = M_uv");
    for (u, mu) in short.iter().zip(&short_m) {
        for (v, mv) in short.iter().zip(&short_m) {
            let uv = WordMatrix::of_letters(dfa, u.concat(v).letters());
            t.check(mu.mul(mv) == uv, || format!("u={u}, v={v}"));
        }
    }
    for _ in 0..100 {
        let (u, v) = (random_word(&mut rng, k, 20), random_word(&mut rng, k, 20));
        let lhs = WordMatrix::of_letters(dfa, u.letters()).mul(&WordMatrix::of_letters(dfa, v.letters()));
        t.check(lhs == WordMatrix::of_letters(dfa, u.concat(&v).letters()), || format!("u={u}, v={v}"));
    }
    asserts.push(t.finish());

    // Images shrink under left extension.
    let mut t = Tally::new(
        "image.inclusion",
        "Γus ⊆ Γs, and nonzero columns of M_us are nonzero in M_s",
    );
    for w in &reset_words {
        for (len, ms) in suffix_matrices(dfa, w).iter().enumerate() {
            let sfx = w.suffix(len);
            let img_s = dfa.image(dfa.all_states(), &sfx)?;
            for (u, mu) in short.iter().zip(&short_m) {
                let mus = mu.mul(ms);
                let img_us = dfa.image(dfa.all_states(), &u.concat(&sfx))?;
                t.check(
                    img_us.is_subset(img_s) && mus.nonzero_columns().is_subset(ms.nonzero_columns()),
                    || format!("u={u}, s={sfx}"),
                );
            }
        }
    }
    asserts.push(t.finish());

    // Reset matrices.
    let mut t = Tally::new("matrix.reset", "M_s of a reset word has a single nonzero column of units");
    for w in &reset_words {
        let m = WordMatrix::of_letters(dfa, w.letters());
        let cols = m.nonzero_columns();
        t.check(
            cols.len() == 1 && cols.single().is_some_and(|c| m.q_column(c) == dfa.all_states()),
            || format!("s={w}"),
        );
    }
    asserts.push(t.finish());

    // Rank equals nonzero column count.
    let mut t = Tally::new("matrix.rank", "rank of M_t equals its number of nonzero columns");
    let mut rank_inputs: Vec<WordMatrix> = suffix_matrices(dfa, &s);
    rank_inputs.extend(short_m.iter().cloned());
    for m in &rank_inputs {
        t.check(dense_rank(&FlatMatrix::from(m)) == m.rank(), || format!("{m:?}"));
    }
    asserts.push(t.finish());

    // Dimension of matrices supported on k columns.
    let mut t = Tally::new(
        "span.dimension",
        "matrices supported on k columns span a space of dimension n(k-1)+1",
    );
    for kc in 1..=n {
        let expect = n * (kc - 1) + 1;
        let basis = standard_basis(n, kc, n - 1)?;
        t.check(span_dimension(&basis)? == expect, || format!("standard basis, k={kc}"));
        if kc.checked_pow(n as u32).is_some_and(|c| c <= SUPPORT_ENUM_LIMIT) {
            let cols = support_columns(n, kc, n - 1)?;
            let all: Vec<WordMatrix> = supported_word_matrices(n, &cols).collect();
            t.check(word_span_dimension(&all)? == expect, || format!("all supported matrices, k={kc}"));
        }
    }
    asserts.push(t.finish());

    // Zero column bounds.
    let mut t = Tally::new(
        "span.zero_column",
        "matrices with a common zero column span dimension at most (n-1)^2",
    );
    if n >= 2 {
        let basis = standard_basis(n, n - 1, n - 1)?;
        t.check(span_dimension(&basis)? <= cerny_bound(n), || "standard basis".into());
        let cols = support_columns(n, n - 1, n - 1)?;
        if (n - 1).checked_pow(n as u32).is_some_and(|c| c <= SUPPORT_ENUM_LIMIT) {
            let all: Vec<WordMatrix> = supported_word_matrices(n, &cols).collect();
            t.check(word_span_dimension(&all)? <= cerny_bound(n), || "all supported matrices".into());
        }
    }
    asserts.push(t.finish());

    // Whole word space.
    let basis_words = word_space_basis(dfa);
    let basis_m: Vec<WordMatrix> = basis_words
        .iter()
        .map(|w| WordMatrix::of_letters(dfa, w.letters()))
        .collect();
    let word_dim = basis_words.len();
    let mut t = Tally::new("span.word_space", "matrices of words span dimension at most n(n-1)+1")
        .detail(format!("dimension {word_dim}"));
    t.check(word_dim <= n * (n - 1) + 1, || format!("dimension {word_dim}"));
    let sample = monoid_sample(dfa, MONOID_SAMPLE);
    let sample_dim = word_span_dimension(sample.iter().map(|(_, m)| m))?;
    t.check(sample_dim <= word_dim, || format!("sampled monoid spans {sample_dim}"));
    asserts.push(t.finish());

    // Words ending in a letter with a zero column.
    let mut t = Tally::new(
        "span.last_letter",
        "words ending in a letter whose matrix has a zero column span dimension at most (n-1)^2",
    );
    for l in 0..k {
        let ml = WordMatrix::of_letters(dfa, &[l as Letter]);
        if ml.rank() == n {
            continue;
        }
        let ending: Vec<WordMatrix> = basis_m.iter().map(|b| b.mul(&ml)).collect();
        let dim = word_span_dimension(&ending)?;
        t.check(dim <= cerny_bound(n), || format!("letter {l}: dimension {dim}"));
        let zero_col = (0..n).find(|&c| !ml.nonzero_columns().contains(c)).expect("zero column");
        t.check(
            ending.iter().all(|m| !m.nonzero_columns().contains(zero_col)),
            || format!("letter {l}: column {zero_col} not zero"),
        );
    }
    asserts.push(t.finish());

    // Coefficient sums and series linearity.
    let mut lam = Tally::new("span.coefficient_sum", "M_u = Σ λ_i M_ui implies Σ λ_i = 1");
    let mut lin = Tally::new("series.linearity", "(S,u) = Σ λ_j (S,u_j) for every singleton target");
    let mut tracker = Echelon::tracking(n * n);
    for m in &basis_m {
        tracker.insert_word_matrix(m)?;
    }
    let contexts: Vec<SeriesContext<'_>> = (0..n)
        .map(|p| SeriesContext::singleton(dfa, p))
        .collect::<Result<_>>()?;
    for _ in 0..200 {
        let u = random_word(&mut rng, k, 30);
        let mu = WordMatrix::of_letters(dfa, u.letters());
        let Some(d) = tracker.express(FlatMatrix::from(&mu).entries()) else {
            lam.check(false, || format!("M_{u} outside the word space"));
            continue;
        };
        lam.check(d.coefficient_sum().is_one(), || format!("u={u}, Σλ={}", d.coefficient_sum()));
        for c in &contexts {
            let rhs = d.coefficients.iter().fold(Rational::zero(), |acc, (j, l)| {
                acc + l * rational(c.matrix_value(&basis_m[*j]))
            });
            lin.check(rhs == rational(c.matrix_value(&mu)), || format!("u={u}, q={:?}", c.target()));
        }
    }
    for _ in 0..5 {
        let u = random_word(&mut rng, k, 12);
        let r = series_linearity_check(&ctx, &u, &basis_words)?;
        lin.check(r == Linearity::Holds, || format!("u={u}: {r:?}"));
    }
    asserts.push(lam.finish());
    asserts.push(lin.finish());

    // Constant series on a span.
    let mut t = Tally::new(
        "series.constant",
        "word matrices in the span of words with (S,u)=i have (S,t)=i",
    );
    let profile = ctx.suffix_profile(&s)?;
    let smats = suffix_matrices(dfa, &s);
    let mut levels: Vec<i64> = profile.iter().skip(1).map(|p| p.value).collect();
    levels.sort_unstable();
    levels.dedup();
    for level in levels {
        let mut ech = Echelon::new(n * n);
        for (p, m) in profile.iter().zip(&smats).skip(1) {
            if p.value == level {
                ech.insert_word_matrix(m)?;
            }
        }
        for (w, m) in &sample {
            if ech.contains(FlatMatrix::from(m).entries()) {
                let v = ctx.matrix_value(m);
                t.check(v == level, || format!("level {level}: t={w} has (S,t)={v}"));
            }
        }
    }
    asserts.push(t.finish());

    // Suffix space dimension.
    let mut t = Tally::new(
        "series.suffix_space",
        "suffixes of a reset word with (S,v) >= n-i span dimension at most (i-1)n+1",
    );
    let mut dims = Vec::new();
    for i in 1..n {
        let d = suffix_space_dimension(&ctx, &s, i)?;
        dims.push(d);
        t.check(d <= suffix_space_bound(n, i), || format!("i={i}: dimension {d}"));
    }
    asserts.push(t.detail(format!("dimensions {dims:?}")).finish());

    // Irreducibility and suffix distinctness.
    let mut t = Tally::new(
        "reset.irreducible",
        "a shortest reset word is irreducible and its suffixes are pairwise not q-equivalent",
    );
    t.check(is_irreducible(dfa, &s, q)?, || format!("s={s} is reducible"));
    t.check(suffix_distinctness_check(dfa, &s, q)?, || format!("s={s}: suffix q-columns"));
    asserts.push(t.finish());

    // Near-synchronizing suffixes.
    let mut t = Tally::new(
        "reset.near_sync",
        "at most n suffixes with (S,u)=n-2, stray units in distinct rows, some βu synchronizing",
    );
    if n >= 2 {
        let ns = near_sync_suffixes(dfa, &s, q)?;
        t.check(ns.within_bound, || format!("{} suffixes", ns.suffixes.len()));
        t.check(ns.distinct_rows, || format!("stray rows {:?}", ns.stray_rows));
        t.check(ns.extension.is_some(), || "no letter extends a suffix to a reset word".into());
        t = t.detail(format!("{} suffixes", ns.suffixes.len()));
    }
    asserts.push(t.finish());

    // Reset collapse.
    let mut t = Tally::new(
        "qcol.reset_collapse",
        "M_u ~q M_v (or M_v ⪯q M_u) and M_t M_v reset onto q imply M_t M_u = M_t M_v",
    );
    let mut applied = 0;
    let prefixes: Vec<WordMatrix> = (0..=s.len()).map(|i| WordMatrix::of_letters(dfa, &s.letters()[..i])).collect();
    let mut us = short_m.clone();
    us.extend(smats.iter().cloned());
    for (i, mt) in prefixes.iter().enumerate() {
        let mv = &smats[s.len() - i];
        for mu in &us {
            match reset_collapse(mt, mu, mv, q) {
                Implication::Vacuous => {}
                Implication::Holds => {
                    applied += 1;
                    t.check(true, String::new);
                }
                Implication::Violated => t.check(false, || format!("t={}, {mu:?}", s.prefix(i))),
            }
        }
    }
    asserts.push(t.detail(format!("{applied} non-vacuous instances")).finish());

    // Left stability.
    let mut t = Tally::new(
        "qcol.left_stability",
        "~q and ⪯q are preserved by left multiplication",
    );
    for ma in short_m.iter().take(1 + k + k * k) {
        for mu in &short_m {
            for mv in &short_m {
                for p in 0..n {
                    t.check(left_stability_holds(ma, mu, mv, p), || format!("{ma:?} {mu:?} {mv:?} q={p}"));
                }
            }
        }
    }
    for _ in 0..300 {
        let a = WordMatrix::of_letters(dfa, random_word(&mut rng, k, 10).letters());
        let u = WordMatrix::of_letters(dfa, random_word(&mut rng, k, 10).letters());
        let v = WordMatrix::of_letters(dfa, random_word(&mut rng, k, 10).letters());
        for p in 0..n {
            t.check(left_stability_holds(&a, &u, &v, p), || format!("{a:?} {u:?} {v:?} q={p}"));
        }
    }
    asserts.push(t.finish());

    // Suffix-closed sets.
    let mut t = Tally::new(
        "span.suffix_closed",
        "independent suffix matrices of a suffix-closed set span dimension equal to their number",
    );
    for w in &reset_words {
        let c = suffix_closed_dimension_check(dfa, w)?;
        t.check(c.holds, || format!("s={w}: {c:?}"));
        t = t.detail(format!("independent suffix length {}", c.independent_len));
    }
    asserts.push(t.finish());

    // Letter closure.
    let mut t = Tally::new(
        "span.letter_closure",
        "closure under letters implies closure under all words; escapes are witnessed by a letter",
    );
    for gens in [basis_m.clone(), smats.clone()] {
        let mut ech = Echelon::new(n * n);
        for g in &gens {
            ech.insert_word_matrix(g)?;
        }
        match letter_closure_check(dfa, &gens)? {
            LetterClosure::Closed => {
                for _ in 0..20 {
                    let tw = random_word(&mut rng, k, 15);
                    let mt = FlatMatrix::from(WordMatrix::of_letters(dfa, tw.letters()));
                    let mut comb = FlatMatrix::zero(n);
                    for g in &gens {
                        let c = rational(rng.gen_range(-5..=5));
                        comb = comb.add(&FlatMatrix::from(g).scale(&c))?;
                    }
                    let prod = mt.matmul(&comb)?;
                    t.check(ech.contains(prod.entries()), || format!("t={tw}"));
                }
            }
            LetterClosure::Escapes { letter, generator } => {
                let escaped = WordMatrix::of_letters(dfa, &[letter]).mul(&gens[generator]);
                t.check(!ech.contains(FlatMatrix::from(&escaped).entries()), || {
                    format!("reported escape {letter}·g{generator} lies in the span")
                });
            }
        }
    }
    asserts.push(t.finish());

    // q-classes at level zero (diagnostic).
    let mut t = Tally::new(
        "qcol.level_zero_classes",
        "q-classes of words with (S,w)=0 mix invertible and singular matrices of rank > 1",
    );
    let mut invertible = 0;
    let mut singular = 0;
    for (_, m) in &sample {
        if ctx.matrix_value(m) == 0 {
            t.instances += 1;
            if m.rank() == n {
                invertible += 1;
            } else if m.rank() > 1 {
                singular += 1;
            }
        }
    }
    asserts.push(
        t.detail(format!("{invertible} invertible, {singular} singular of rank > 1"))
            .info(),
    );

    // Bounds on the shortest reset length.
    let mut t = Tally::new(
        "bounds.reset_length",
        "shortest reset length is at most (n^3-n)/6 and at most (n-1)^2",
    );
    t.check(reset.length <= upper_bound(n), || format!("length {}", reset.length));
    t.check(reset.length <= cerny_bound(n), || format!("length {}", reset.length));
    asserts.push(t.finish());

    // Minimality of the search result.
    let mut t = Tally::new("sync.minimal", "no word one letter shorter is synchronizing");
    if reset.length > 0 && k.checked_pow(reset.length as u32 - 1).is_some_and(|c| c <= 1 << 20) {
        for w in dfa.words_up_to(reset.length - 1) {
            let ok = dfa.image(dfa.all_states(), &w)?.len() > 1;
            t.check(ok, || format!("{w} is synchronizing"));
            if !ok {
                break;
            }
        }
    } else {
        t = t.detail("skipped: word space too large for enumeration");
    }
    asserts.push(t.finish());

    if let Some(w) = &expectations.word {
        let mut t = Tally::new("example.word", "the published word is a shortest reset word");
        let img = dfa.image(dfa.all_states(), w)?;
        t.check(img.len() == 1, || format!("{w} maps onto {img}"));
        t.check(w.len() == reset.length, || format!("|{w}| = {} vs {}", w.len(), reset.length));
        asserts.push(t.finish());
    }
    if let Some(len) = expectations.reset_length {
        let mut t = Tally::new("example.reset_length", "shortest reset length matches the published value");
        t.check(reset.length == len, || format!("found {}, expected {len}", reset.length));
        asserts.push(t.finish());
    }
    if let Some(w) = &expectations.word {
        if let Some(wq) = dfa.image(dfa.all_states(), w)?.single() {
            let wctx = SeriesContext::singleton(dfa, wq)?;
            let prof = wctx.suffix_profile(w)?;
            if !expectations.threshold_counts.is_empty() {
                let mut t = Tally::new(
                    "example.threshold_counts",
                    "suffix counts per series level match the published values",
                );
                for &(bound, count) in &expectations.threshold_counts {
                    let got = threshold_count(&prof, bound);
                    t.check(got == count, || format!(">= {bound}: {got}, expected {count}"));
                }
                asserts.push(t.finish());
            }
            if expectations.consecutive_runs {
                let mut t = Tally::new(
                    "example.consecutive_runs",
                    "each level 0 < i < n-1 is taken by exactly n consecutive suffixes",
                );
                for level in 1..(n as i64 - 1) {
                    let at: Vec<usize> = prof.iter().filter(|p| p.value == level).map(|p| p.suffix_len).collect();
                    let consecutive = at.windows(2).all(|x| x[1] == x[0] + 1);
                    t.check(at.len() == n && consecutive, || format!("level {level}: lengths {at:?}"));
                }
                asserts.push(t.finish());
            }
        }
    }

    Ok(out)
}

/// Expectations attached to the built-in automata.
pub fn builtin_expectations(name: &str) -> Expectations {
    match name {
        "kari" => Expectations {
            word: KARI_WORD.parse().ok(),
            reset_length: Some(25),
            threshold_counts: vec![(1, 25), (2, 17), (3, 11), (4, 6)],
            consecutive_runs: false,
        },
        "roman" => Expectations {
            word: ROMAN_WORD.parse().ok(),
            reset_length: Some(16),
            threshold_counts: vec![(1, 16), (2, 10), (3, 4)],
            consecutive_runs: false,
        },
        _ => match name.strip_prefix("cerny:").and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if n >= 2 => Expectations {
                word: Some(cerny_reset_word(n)),
                reset_length: Some((n - 1) * (n - 1)),
                threshold_counts: Vec::new(),
                consecutive_runs: true,
            },
            _ => Expectations::default(),
        },
    }
}

/// The full suite on Černý `C_3`..`C_6`, Kari's and Roman's automata.
pub fn verify_example_suite() -> Result<VerifyReport> {
    let mut automata = Vec::new();
    for n in 3..=6 {
        let name = format!("cerny:{n}");
        automata.push(verify_automaton(&name, &cerny_automaton(n)?, &builtin_expectations(&name))?);
    }
    automata.push(verify_automaton("kari", &kari_automaton(), &builtin_expectations("kari"))?);
    automata.push(verify_automaton("roman", &roman_automaton(), &builtin_expectations("roman"))?);
    Ok(VerifyReport { automata })
}
