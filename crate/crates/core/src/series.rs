//! The rational series `(S,w) = C(M_w - E)P^t` attached to a target set `P`,
//! where `C` is the row of units and `P^t` the characteristic column of `P`.
//!
//! All entries involved are integers, so values are plain `i64`.

use num::{ToPrimitive, Zero};
use serde::Serialize;

use crate::automaton::{Dfa, StateSet, Word};
use crate::error::{Error, Result};
use crate::linspace::{Echelon, FlatMatrix, Rational};
use crate::word_matrix::WordMatrix;

/// A target set `P` on an automaton.
#[derive(Clone, Copy, Debug)]
pub struct SeriesContext<'a> {
    dfa: &'a Dfa,
    target: StateSet,
}

/// Series value of one right subword.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuffixValue {
    pub suffix_len: usize,
    pub value: i64,
}

impl<'a> SeriesContext<'a> {
    pub fn new(dfa: &'a Dfa, target: StateSet) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::invalid("series target set must be nonempty"));
        }
        if !target.is_subset(dfa.all_states()) {
            return Err(Error::invalid(format!("target {target} not within 0..{}", dfa.n())));
        }
        Ok(SeriesContext { dfa, target })
    }

    /// Context for the singleton `{q}`.
    pub fn singleton(dfa: &'a Dfa, q: usize) -> Result<Self> {
        if q >= dfa.n() {
            return Err(Error::invalid(format!("state {q} out of range for n = {}", dfa.n())));
        }
        Self::new(dfa, StateSet::singleton(q))
    }

    pub fn dfa(&self) -> &'a Dfa {
        self.dfa
    }

    pub fn target(&self) -> StateSet {
        self.target
    }

    /// `(S,w)`.
    pub fn value(&self, word: &Word) -> Result<i64> {
        Ok(self.matrix_value(&WordMatrix::of_word(self.dfa, word)?))
    }

    /// `C(M - E)P^t` for a word matrix: rows mapped into `P`, minus `|P|`.
    pub fn matrix_value(&self, m: &WordMatrix) -> i64 {
        let hits = m.rows().filter(|&c| self.target.contains(c)).count();
        hits as i64 - self.target.len() as i64
    }

    /// `C(M - E)P^t` for an arbitrary rational matrix.
    pub fn flat_value(&self, m: &FlatMatrix) -> Rational {
        let n = m.n();
        let mut acc = Rational::zero();
        for i in 0..n {
            for q in self.target.iter() {
                acc += m.entry(i, q);
            }
        }
        acc - Rational::from_integer((self.target.len() as i64).into())
    }

    /// Values of every right subword of `s`, by length `0..=|s|`.
    pub fn suffix_profile(&self, s: &Word) -> Result<Vec<SuffixValue>> {
        s.validate(self.dfa.k())?;
        Ok(suffix_matrices(self.dfa, s)
            .iter()
            .enumerate()
            .map(|(len, m)| SuffixValue {
                suffix_len: len,
                value: self.matrix_value(m),
            })
            .collect())
    }
}

/// `(S,w)` for a word; shorthand for [`SeriesContext::value`].
pub fn series_value(ctx: &SeriesContext<'_>, word: &Word) -> Result<i64> {
    ctx.value(word)
}

/// `M_t` for every suffix `t` of `s`, indexed by suffix length.
pub fn suffix_matrices(dfa: &Dfa, s: &Word) -> Vec<WordMatrix> {
    let letters = s.letters();
    let mut out = Vec::with_capacity(letters.len() + 1);
    let mut m = WordMatrix::identity(dfa.n());
    out.push(m.clone());
    for &l in letters.iter().rev() {
        m = WordMatrix::of_letters(dfa, &[l]).mul(&m);
        out.push(m.clone());
    }
    out
}

/// Number of nonempty suffixes with value at least `bound`. The empty
/// suffix is not counted.
pub fn threshold_count(profile: &[SuffixValue], bound: i64) -> usize {
    profile
        .iter()
        .filter(|sv| sv.suffix_len > 0 && sv.value >= bound)
        .count()
}

/// Dimension of the span of `{M_v : v ⪯ s, (S,v) >= n - i}` for a word `s`
/// synchronizing onto the singleton target of `ctx`. Bounded above by
/// `(i - 1) n + 1`.
pub fn suffix_space_dimension(ctx: &SeriesContext<'_>, s: &Word, i: usize) -> Result<usize> {
    let dfa = ctx.dfa;
    let n = dfa.n();
    let Some(q) = ctx.target.single() else {
        return Err(Error::Precondition("suffix space needs a singleton target".into()));
    };
    if i == 0 || i >= n {
        return Err(Error::invalid(format!("level i = {i} outside 1..={}", n - 1)));
    }
    if dfa.image(dfa.all_states(), s)? != StateSet::singleton(q) {
        return Err(Error::Precondition(format!("word {s} does not synchronize to state {q}")));
    }
    let threshold = (n - i) as i64;
    let mut ech = Echelon::new(n * n);
    for m in suffix_matrices(dfa, s) {
        if ctx.matrix_value(&m) >= threshold {
            ech.insert_word_matrix(&m)?;
        }
    }
    Ok(ech.rank())
}

/// The upper bound `(i - 1) n + 1` on [`suffix_space_dimension`].
pub fn suffix_space_bound(n: usize, i: usize) -> usize {
    (i - 1) * n + 1
}

/// Result of [`series_linearity_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Linearity {
    /// `(S,target) = Σ λ_j (S,parts_j)` for the exact `λ`.
    Holds,
    Fails { lhs: i64, rhs: Rational },
    /// `M_target` is not in the span of the parts.
    NotApplicable,
}

/// Decomposes `M_target` over the matrices of `parts` and compares the
/// series value of the target with the same combination of part values.
pub fn series_linearity_check(ctx: &SeriesContext<'_>, target: &Word, parts: &[Word]) -> Result<Linearity> {
    let dfa = ctx.dfa;
    let n = dfa.n();
    let mut ech = Echelon::tracking(n * n);
    let mut values = Vec::with_capacity(parts.len());
    for p in parts {
        let m = WordMatrix::of_word(dfa, p)?;
        values.push(ctx.matrix_value(&m));
        ech.insert_word_matrix(&m)?;
    }
    let mt = WordMatrix::of_word(dfa, target)?;
    let Some(d) = ech.express(FlatMatrix::from(&mt).entries()) else {
        return Ok(Linearity::NotApplicable);
    };
    let rhs = d.coefficients.iter().fold(Rational::zero(), |acc, (j, c)| {
        acc + c * Rational::from_integer(values[*j].into())
    });
    let lhs = ctx.matrix_value(&mt);
    if rhs.is_integer() && rhs.to_integer().to_i64() == Some(lhs) {
        Ok(Linearity::Holds)
    } else {
        Ok(Linearity::Fails { lhs, rhs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{
        cerny_automaton, cerny_reset_word, kari_automaton, roman_automaton, KARI_WORD, ROMAN_WORD,
    };

    fn target_of(dfa: &Dfa, s: &Word) -> usize {
        dfa.image(dfa.all_states(), s).unwrap().single().unwrap()
    }

    #[test]
    fn empty_word_has_value_zero() {
        let c4 = cerny_automaton(4).unwrap();
        let ctx = SeriesContext::new(&c4, [0, 2].into_iter().collect()).unwrap();
        assert_eq!(ctx.value(&Word::empty()).unwrap(), 0);
        assert_eq!(ctx.suffix_profile(&Word::empty()).unwrap(), vec![SuffixValue { suffix_len: 0, value: 0 }]);
    }

    #[test]
    fn context_validation() {
        let c3 = cerny_automaton(3).unwrap();
        assert!(SeriesContext::new(&c3, StateSet::EMPTY).is_err());
        assert!(SeriesContext::new(&c3, StateSet::singleton(3)).is_err());
        assert!(SeriesContext::singleton(&c3, 5).is_err());
    }

    #[test]
    fn reset_word_reaches_n_minus_one() {
        let c4 = cerny_automaton(4).unwrap();
        let s = cerny_reset_word(4);
        let ctx = SeriesContext::singleton(&c4, target_of(&c4, &s)).unwrap();
        assert_eq!(series_value(&ctx, &s).unwrap(), 3);
    }

    #[test]
    fn value_matches_matrix_formula() {
        let c4 = cerny_automaton(4).unwrap();
        let ctx = SeriesContext::new(&c4, [1, 3].into_iter().collect()).unwrap();
        for w in c4.words_up_to(5) {
            let m = WordMatrix::of_word(&c4, &w).unwrap();
            let via_flat = ctx.flat_value(&FlatMatrix::from(&m));
            assert_eq!(via_flat, Rational::from_integer(ctx.value(&w).unwrap().into()));
        }
    }

    #[test]
    fn kari_counts() {
        let kari = kari_automaton();
        let s: Word = KARI_WORD.parse().unwrap();
        let ctx = SeriesContext::singleton(&kari, target_of(&kari, &s)).unwrap();
        let profile = ctx.suffix_profile(&s).unwrap();
        assert_eq!(profile.len(), 26);
        let counts: Vec<_> = (1..=4).map(|b| threshold_count(&profile, b)).collect();
        assert_eq!(counts, vec![25, 17, 11, 6]);
        assert_eq!(threshold_count(&profile, 6), 0);
    }

    #[test]
    fn roman_counts() {
        let roman = roman_automaton();
        let s: Word = ROMAN_WORD.parse().unwrap();
        let ctx = SeriesContext::singleton(&roman, target_of(&roman, &s)).unwrap();
        let profile = ctx.suffix_profile(&s).unwrap();
        let counts: Vec<_> = (1..=3).map(|b| threshold_count(&profile, b)).collect();
        assert_eq!(counts, vec![16, 10, 4]);
    }

    #[test]
    fn cerny_profile_has_runs_of_n() {
        for n in 3..=7 {
            let c = cerny_automaton(n).unwrap();
            let s = cerny_reset_word(n);
            let ctx = SeriesContext::singleton(&c, target_of(&c, &s)).unwrap();
            let profile = ctx.suffix_profile(&s).unwrap();
            for i in 1..(n as i64 - 1) {
                let at: Vec<usize> = profile.iter().filter(|p| p.value == i).map(|p| p.suffix_len).collect();
                assert_eq!(at.len(), n, "n = {n}, level {i}");
                assert!(at.windows(2).all(|w| w[1] == w[0] + 1), "n = {n}, level {i} not consecutive");
            }
        }
    }

    #[test]
    fn suffix_space_dimensions_respect_bound() {
        let c4 = cerny_automaton(4).unwrap();
        let s = cerny_reset_word(4);
        let ctx = SeriesContext::singleton(&c4, target_of(&c4, &s)).unwrap();
        for i in 1..4 {
            let d = suffix_space_dimension(&ctx, &s, i).unwrap();
            assert!(d <= suffix_space_bound(4, i), "i = {i}: {d}");
        }
        assert_eq!(suffix_space_dimension(&ctx, &s, 1).unwrap(), 1);
        let other = (target_of(&c4, &s) + 1) % 4;
        let bad = SeriesContext::singleton(&c4, other).unwrap();
        assert!(matches!(suffix_space_dimension(&bad, &s, 1), Err(Error::Precondition(_))));
        assert!(suffix_space_dimension(&ctx, &s, 4).is_err());
    }

    #[test]
    fn linearity_trivial_and_not_applicable() {
        let c4 = cerny_automaton(4).unwrap();
        let ctx = SeriesContext::singleton(&c4, 1).unwrap();
        let u: Word = "abba".parse().unwrap();
        assert_eq!(series_linearity_check(&ctx, &u, std::slice::from_ref(&u)).unwrap(), Linearity::Holds);
        assert_eq!(
            series_linearity_check(&ctx, &"a".parse().unwrap(), &[Word::empty()]).unwrap(),
            Linearity::NotApplicable
        );
    }
}
