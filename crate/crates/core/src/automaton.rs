//! Complete deterministic automata, words over their alphabet and state sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letter index. Letters are displayed as `a`, `b`, `c`, ...
pub type Letter = u8;

/// Largest supported state count; state sets are single machine words.
pub const MAX_STATES: usize = 64;
/// Largest supported alphabet size.
pub const MAX_LETTERS: usize = 256;

/// Display name of a letter: `a`..`z`, then `[26]`, `[27]`, ...
pub fn letter_name(letter: Letter) -> String {
    if letter < 26 {
        ((b'a' + letter) as char).to_string()
    } else {
        format!("[{letter}]")
    }
}

/// A subset of `0..n` for `n <= 64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn from_bits(bits: u64) -> Self {
        StateSet(bits)
    }

    /// `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_STATES);
        if n == 64 {
            StateSet(u64::MAX)
        } else {
            StateSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(state: usize) -> Self {
        StateSet(1u64 << state)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn insert(&mut self, state: usize) {
        self.0 |= 1u64 << state;
    }

    pub fn contains(self, state: usize) -> bool {
        state < 64 && self.0 >> state & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    pub fn intersection(self, other: StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// The unique element of a singleton set.
    pub fn single(self) -> Option<usize> {
        (self.len() == 1).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let s = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(s)
        })
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = StateSet::EMPTY;
        for s in iter {
            set.insert(s);
        }
        set
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// A finite word over letter indices. The empty word acts as the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// The right subword (suffix) of the given length.
    pub fn suffix(&self, len: usize) -> Word {
        Word(self.0[self.0.len() - len..].to_vec())
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Compact rendering without block spacing.
    pub fn to_compact_string(&self) -> String {
        self.0.iter().map(|&l| letter_name(l)).collect()
    }

    /// Checks that every letter is below `k`.
    pub fn validate(&self, k: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l as usize >= k) {
            Some(&l) => Err(Error::invalid(format!(
                "letter {} out of range for alphabet of size {k}",
                letter_name(l)
            ))),
            None => Ok(()),
        }
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

/// Parses letter names `a`..`z`; whitespace, `.` and `·` are ignored.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for c in s.chars() {
            match c {
                'a'..='z' => letters.push(c as u8 - b'a'),
                c if c.is_whitespace() || c == '.' || c == '·' => {}
                'ε' => {}
                other => return Err(Error::invalid(format!("unexpected character {other:?} in word"))),
            }
        }
        Ok(Word(letters))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.to_compact_string())
    }
}

/// Letters in blocks of five, `ε` for the empty word.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, chunk) in self.0.chunks(5).enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            for &l in chunk {
                write!(f, "{}", letter_name(l))?;
            }
        }
        Ok(())
    }
}

/// A complete deterministic automaton on states `0..n` over letters `0..k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "DfaJson", into = "DfaJson")]
pub struct Dfa {
    n: usize,
    k: usize,
    /// Letter-major: `delta[l * n + i]` is the image of state `i` under letter `l`.
    delta: Vec<u8>,
}

/// JSON mirror of the text format: one row of targets per letter.
#[derive(Serialize, Deserialize)]
struct DfaJson {
    n: usize,
    k: usize,
    delta: Vec<Vec<usize>>,
}

impl TryFrom<DfaJson> for Dfa {
    type Error = Error;

    fn try_from(value: DfaJson) -> Result<Self> {
        let dfa = Dfa::new(value.n, value.delta)?;
        if dfa.k != value.k {
            return Err(Error::invalid(format!(
                "k = {} but {} letter rows given",
                value.k, dfa.k
            )));
        }
        Ok(dfa)
    }
}

impl From<Dfa> for DfaJson {
    fn from(dfa: Dfa) -> Self {
        DfaJson {
            n: dfa.n,
            k: dfa.k,
            delta: dfa.table(),
        }
    }
}

impl Dfa {
    /// Builds an automaton from one row of `n` targets per letter.
    pub fn new(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || n > MAX_STATES {
            return Err(Error::invalid(format!("state count {n} outside 1..={MAX_STATES}")));
        }
        let k = rows.len();
        if k == 0 || k > MAX_LETTERS {
            return Err(Error::invalid(format!("alphabet size {k} outside 1..={MAX_LETTERS}")));
        }
        let mut delta = Vec::with_capacity(n * k);
        for (l, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "letter {} has {} targets, expected {n}",
                    letter_name(l as Letter),
                    row.len()
                )));
            }
            for &t in row {
                if t >= n {
                    return Err(Error::invalid(format!("target {t} out of range for n = {n}")));
                }
                delta.push(t as u8);
            }
        }
        Ok(Dfa { n, k, delta })
    }

    /// Builds an automaton from a flat letter-major table without validation.
    pub(crate) fn from_raw(n: usize, k: usize, delta: Vec<u8>) -> Self {
        debug_assert_eq!(delta.len(), n * k);
        debug_assert!(delta.iter().all(|&t| (t as usize) < n));
        Dfa { n, k, delta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.delta
    }

    /// The transition of a single letter as a map over states.
    pub fn letter_map(&self, letter: Letter) -> &[u8] {
        let l = letter as usize;
        &self.delta[l * self.n..(l + 1) * self.n]
    }

    /// The transition table as one row per letter.
    pub fn table(&self) -> Vec<Vec<usize>> {
        self.delta
            .chunks(self.n)
            .map(|row| row.iter().map(|&t| t as usize).collect())
            .collect()
    }

    #[inline]
    pub(crate) fn step(&self, state: usize, letter: Letter) -> usize {
        self.delta[letter as usize * self.n + state] as usize
    }

    fn check_state(&self, state: usize) -> Result<()> {
        if state >= self.n {
            return Err(Error::invalid(format!("state {state} out of range for n = {}", self.n)));
        }
        Ok(())
    }

    /// The state reached from `state` by reading `word` left to right.
    pub fn apply(&self, state: usize, word: &Word) -> Result<usize> {
        self.check_state(state)?;
        word.validate(self.k)?;
        Ok(self.apply_unchecked(state, word.letters()))
    }

    pub(crate) fn apply_unchecked(&self, state: usize, letters: &[Letter]) -> usize {
        letters.iter().fold(state, |s, &l| self.step(s, l))
    }

    /// `P w`: the image of a state set under a word.
    pub fn image(&self, set: StateSet, word: &Word) -> Result<StateSet> {
        if set.bits() >> self.n != 0 && self.n < 64 {
            return Err(Error::invalid(format!("state set {set} not within 0..{}", self.n)));
        }
        word.validate(self.k)?;
        Ok(word
            .letters()
            .iter()
            .fold(set, |acc, &l| self.image_letter(acc, l)))
    }

    #[inline]
    pub(crate) fn image_letter(&self, set: StateSet, letter: Letter) -> StateSet {
        let map = self.letter_map(letter);
        let mut out = 0u64;
        let mut bits = set.bits();
        while bits != 0 {
            let s = bits.trailing_zeros() as usize;
            out |= 1u64 << map[s];
            bits &= bits - 1;
        }
        StateSet::from_bits(out)
    }

    /// `Γ`: the set of all states.
    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.n)
    }

    /// Whether every state reaches every other state along labelled edges.
    pub fn is_strongly_connected(&self) -> bool {
        let full = self.all_states();
        let mut succ = vec![StateSet::EMPTY; self.n];
        let mut pred = vec![StateSet::EMPTY; self.n];
        for l in 0..self.k {
            for i in 0..self.n {
                let t = self.step(i, l as Letter);
                succ[i].insert(t);
                pred[t].insert(i);
            }
        }
        let sweep = |edges: &[StateSet]| {
            let mut seen = StateSet::singleton(0);
            let mut frontier = seen;
            while !frontier.is_empty() {
                let next = frontier
                    .iter()
                    .fold(StateSet::EMPTY, |acc, s| acc.union(edges[s]));
                frontier = StateSet::from_bits(next.bits() & !seen.bits());
                seen = seen.union(next);
            }
            seen
        };
        sweep(&succ) == full && sweep(&pred) == full
    }

    /// Whether every letter acts as a permutation of the states.
    pub fn is_permutation_automaton(&self) -> bool {
        (0..self.k).all(|l| {
            let map = self.letter_map(l as Letter);
            map.iter().map(|&t| t as usize).collect::<StateSet>().len() == self.n
        })
    }

    /// All words over the alphabet of length at most `max_len`, shortlex order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * self.k);
            for w in &layer {
                for l in 0..self.k {
                    let mut x = w.clone();
                    x.push(l as Letter);
                    next.push(x);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl fmt::Debug for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dfa(n={}, k={}, {:?})", self.n, self.k, self.table())
    }
}

/// The Černý automaton `C_n`: `a` is the cycle `i -> i+1 mod n`, `b` sends
/// `0 -> 1` and fixes every other state.
pub fn cerny_automaton(n: usize) -> Result<Dfa> {
    if !(2..=MAX_STATES).contains(&n) {
        return Err(Error::invalid(format!("Černý automaton needs 2 <= n <= {MAX_STATES}, got {n}")));
    }
    let a = (0..n).map(|i| (i + 1) % n).collect();
    let b = (0..n).map(|i| if i == 0 { 1 } else { i }).collect();
    Dfa::new(n, vec![a, b])
}

/// `b (a^{n-1} b)^{n-2}`, a reset word of `C_n` of length `(n-1)^2`.
pub fn cerny_reset_word(n: usize) -> Word {
    let mut block = vec![0; n.saturating_sub(1)];
    block.push(1);
    Word::new(vec![1]).concat(&Word::new(block).repeat(n.saturating_sub(2)))
}

/// Kari's 6-state automaton with a shortest reset word of length 25.
///
/// Letter `a` forms two 3-cycles `0 -> 1 -> 2 -> 0` and `3 -> 4 -> 5 -> 3`;
/// letter `b` fixes 0, 1 and 3, swaps 2 and 5, and sends 4 to 2.
pub fn kari_automaton() -> Dfa {
    Dfa::new(6, vec![vec![1, 2, 0, 4, 5, 3], vec![0, 1, 5, 3, 2, 2]]).expect("static table")
}

/// Kari's reset word `ba²bab abaab baba²b a²baba²b`.
pub const KARI_WORD: &str = "baabab abaab babaab aababaab";

/// Roman's 5-state automaton over three letters with a shortest reset word
/// of length 16.
pub fn roman_automaton() -> Dfa {
    Dfa::new(
        5,
        vec![
            vec![0, 4, 2, 4, 3],
            vec![0, 3, 2, 1, 4],
            vec![3, 1, 4, 0, 2],
        ],
    )
    .expect("static table")
}

/// Roman's reset word `ab(ca)²c bca²c abca`.
pub const ROMAN_WORD: &str = "ab caca c bcaac abca";

/// Resolves a built-in automaton name: `cerny:<n>`, `kari` or `roman`.
pub fn builtin(name: &str) -> Option<Result<Dfa>> {
    match name {
        "kari" => Some(Ok(kari_automaton())),
        "roman" => Some(Ok(roman_automaton())),
        _ => {
            let n = name.strip_prefix("cerny:")?;
            Some(
                n.parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad Černý size {n:?}")))
                    .and_then(cerny_automaton),
            )
        }
    }
}

/// The reset word printed alongside a built-in automaton, if any.
pub fn builtin_word(name: &str) -> Option<Word> {
    match name {
        "kari" => KARI_WORD.parse().ok(),
        "roman" => ROMAN_WORD.parse().ok(),
        _ => {
            let n: usize = name.strip_prefix("cerny:")?.parse().ok()?;
            Some(cerny_reset_word(n))
        }
    }
}

/// Parses the text table format: a header line `n k`, then `k` lines of `n`
/// targets each, line `l` position `i` holding the image of state `i` under
/// letter `l`. Blank lines and lines starting with `#` are skipped.
///
/// When `n != k`, a body of `n` lines with `k` targets each is also accepted
/// and read one line per state.
pub fn parse_dfa(text: &str) -> Result<Dfa> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
    let nums = parse_ints(hline, header)?;
    let &[n, k] = nums.as_slice() else {
        return Err(Error::parse(hline, "header must be \"n k\""));
    };
    if n == 0 || n > MAX_STATES {
        return Err(Error::parse(hline, format!("state count {n} outside 1..={MAX_STATES}")));
    }
    if k == 0 || k > MAX_LETTERS {
        return Err(Error::parse(hline, format!("alphabet size {k} outside 1..={MAX_LETTERS}")));
    }

    let body: Vec<(usize, Vec<usize>)> = lines
        .map(|(lineno, line)| parse_ints(lineno, line).map(|row| (lineno, row)))
        .collect::<Result<_>>()?;
    let last_line = body.last().map_or(hline, |(l, _)| *l);

    // Letter-major (k rows of n targets) is the canonical layout; a body of n
    // rows of k targets is read state-major.
    let state_major = body.len() != k && body.len() == n && n != k;
    let (want_rows, want_cols) = if state_major { (n, k) } else { (k, n) };
    if body.len() != want_rows {
        return Err(Error::parse(
            last_line,
            format!("expected {k} letter rows, found {}", body.len()),
        ));
    }
    for (lineno, row) in &body {
        if row.len() != want_cols {
            return Err(Error::parse(
                *lineno,
                format!("expected {want_cols} targets, found {}", row.len()),
            ));
        }
        if let Some(&t) = row.iter().find(|&&t| t >= n) {
            return Err(Error::parse(*lineno, format!("target {t} out of range for n = {n}")));
        }
    }
    let rows: Vec<Vec<usize>> = if state_major {
        (0..k).map(|l| body.iter().map(|(_, row)| row[l]).collect()).collect()
    } else {
        body.into_iter().map(|(_, row)| row).collect()
    };
    Dfa::new(n, rows).map_err(|e| Error::parse(last_line, e.to_string()))
}

fn parse_ints(lineno: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::parse(lineno, format!("not a non-negative integer: {tok:?}")))
        })
        .collect()
}

/// Renders the text table format accepted by [`parse_dfa`].
pub fn serialize_dfa(dfa: &Dfa) -> String {
    let mut out = format!("{} {}\n", dfa.n, dfa.k);
    for row in dfa.delta.chunks(dfa.n) {
        let cells: Vec<String> = row.iter().map(|t| t.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
