//! Synchronization: reset-word search, q-equivalence of word matrices and
//! irreducibility of reset words.

use std::collections::HashMap;

use serde::Serialize;

use crate::automaton::{Dfa, Letter, StateSet, Word};
use crate::error::{Error, Result};
use crate::series::suffix_matrices;
use crate::word_matrix::WordMatrix;

/// Default cap on the state count for the subset search.
pub const DEFAULT_SUBSET_LIMIT: usize = 24;

/// Environment variable overriding [`DEFAULT_SUBSET_LIMIT`].
pub const SUBSET_LIMIT_ENV: &str = "SYNCWORD_SUBSET_LIMIT";

/// Hard ceiling on the configurable limit.
const MAX_SUBSET_LIMIT: usize = 40;

/// The subset limit from the environment, or the default.
pub fn subset_limit_from_env() -> Result<usize> {
    match std::env::var(SUBSET_LIMIT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("{SUBSET_LIMIT_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_SUBSET_LIMIT),
    }
}

/// A shortest reset word together with its target state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResetResult {
    #[serde(serialize_with = "ser_word")]
    pub word: Word,
    pub length: usize,
    pub target: usize,
    /// Subsets taken off the queue during the search.
    pub expanded: usize,
}

fn ser_word<S: serde::Serializer>(w: &Word, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_compact_string())
}

/// Whether some word maps all states onto one. Every pair of states must be
/// mergeable; this is decided on the pair automaton in `O(n² k)`.
pub fn is_synchronizing(dfa: &Dfa) -> bool {
    let n = dfa.n();
    if n == 1 {
        return true;
    }
    let k = dfa.k();
    let idx = |i: usize, j: usize| if i < j { i * n + j } else { j * n + i };

    // preimages[l][t] = states sent to t by letter l
    let mut preimages = vec![vec![Vec::new(); n]; k];
    for (l, pre) in preimages.iter_mut().enumerate() {
        for i in 0..n {
            pre[dfa.step(i, l as Letter)].push(i);
        }
    }

    let mut good = vec![false; n * n];
    let mut stack = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (0..k).any(|l| dfa.step(i, l as Letter) == dfa.step(j, l as Letter)) {
                good[idx(i, j)] = true;
                stack.push((i, j));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for pre in &preimages {
            for &i in &pre[x] {
                for &j in &pre[y] {
                    if i != j && !good[idx(i, j)] {
                        good[idx(i, j)] = true;
                        stack.push((i, j));
                    }
                }
            }
        }
    }
    (0..n).all(|i| (i + 1..n).all(|j| good[idx(i, j)]))
}

const UNSEEN: u64 = u64::MAX;

enum Visited {
    Dense(Vec<(u64, Letter)>),
    Sparse(HashMap<u64, (u64, Letter)>),
}

impl Visited {
    fn new(n: usize) -> Self {
        if n <= DEFAULT_SUBSET_LIMIT {
            Visited::Dense(vec![(UNSEEN, 0); 1usize << n])
        } else {
            Visited::Sparse(HashMap::new())
        }
    }

    fn get(&self, set: u64) -> Option<(u64, Letter)> {
        match self {
            Visited::Dense(v) => Some(v[set as usize]).filter(|e| e.0 != UNSEEN),
            Visited::Sparse(m) => m.get(&set).copied(),
        }
    }

    fn set(&mut self, set: u64, parent: u64, letter: Letter) {
        match self {
            Visited::Dense(v) => v[set as usize] = (parent, letter),
            Visited::Sparse(m) => {
                m.insert(set, (parent, letter));
            }
        }
    }
}

/// Shortest reset word with the default subset limit.
pub fn shortest_reset_word(dfa: &Dfa) -> Result<Option<ResetResult>> {
    shortest_reset_word_with_limit(dfa, DEFAULT_SUBSET_LIMIT)
}

/// Breadth-first search over the subset automaton from the full state set
/// to the first singleton. Letters are expanded in index order, so the word
/// returned is the lexicographically least among all shortest reset words.
///
/// Returns `Ok(None)` when the automaton is not synchronizing and a capacity
/// error when `n` exceeds `limit`.
pub fn shortest_reset_word_with_limit(dfa: &Dfa, limit: usize) -> Result<Option<ResetResult>> {
    let n = dfa.n();
    if n > limit.min(MAX_SUBSET_LIMIT) {
        return Err(Error::Capacity(format!(
            "subset search over {n} states exceeds the limit of {}",
            limit.min(MAX_SUBSET_LIMIT)
        )));
    }
    if n == 1 {
        return Ok(Some(ResetResult {
            word: Word::empty(),
            length: 0,
            target: 0,
            expanded: 0,
        }));
    }
    if !is_synchronizing(dfa) {
        return Ok(None);
    }

    Ok(search(dfa, Visited::new(n)))
}

fn search(dfa: &Dfa, mut visited: Visited) -> Option<ResetResult> {
    let full = dfa.all_states().bits();
    visited.set(full, full, 0);
    let mut frontier = vec![full];
    let mut expanded = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &set in &frontier {
            expanded += 1;
            for l in 0..dfa.k() {
                let img = dfa.image_letter(StateSet::from_bits(set), l as Letter).bits();
                if visited.get(img).is_some() {
                    continue;
                }
                visited.set(img, set, l as Letter);
                if img.count_ones() == 1 {
                    let word = rebuild(&visited, img, full);
                    return Some(ResetResult {
                        length: word.len(),
                        word,
                        target: img.trailing_zeros() as usize,
                        expanded,
                    });
                }
                next.push(img);
            }
        }
        frontier = next;
    }
    None
}

fn rebuild(visited: &Visited, mut set: u64, full: u64) -> Word {
    let mut letters = Vec::new();
    while set != full {
        let (parent, l) = visited.get(set).expect("visited chain");
        letters.push(l);
        set = parent;
    }
    letters.reverse();
    Word::new(letters)
}

fn check_q(n: usize, q: usize) -> Result<()> {
    if q >= n {
        return Err(Error::invalid(format!("state {q} out of range for n = {n}")));
    }
    Ok(())
}

fn check_same_dim(a: &WordMatrix, b: &WordMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

/// `A ~_q B`: column `q` of both matrices is equal.
pub fn q_equivalent(a: &WordMatrix, b: &WordMatrix, q: usize) -> Result<bool> {
    check_same_dim(a, b)?;
    check_q(a.n(), q)?;
    Ok(a.q_column(q) == b.q_column(q))
}

/// `B ⪯_q A`: the units of column `q` of `B` are among those of `A`.
pub fn q_preceq(b: &WordMatrix, a: &WordMatrix, q: usize) -> Result<bool> {
    check_same_dim(a, b)?;
    check_q(a.n(), q)?;
    Ok(b.q_column(q).is_subset(a.q_column(q)))
}

/// Checks both left-stability implications for one triple:
/// `M_u ~_q M_v ⇒ M_a M_u ~_q M_a M_v` and
/// `M_v ⪯_q M_u ⇒ M_a M_v ⪯_q M_a M_u`.
pub fn left_stability_check(dfa: &Dfa, a: &Word, u: &Word, v: &Word, q: usize) -> Result<bool> {
    check_q(dfa.n(), q)?;
    let ma = WordMatrix::of_word(dfa, a)?;
    let mu = WordMatrix::of_word(dfa, u)?;
    let mv = WordMatrix::of_word(dfa, v)?;
    Ok(left_stability_holds(&ma, &mu, &mv, q))
}

pub(crate) fn left_stability_holds(ma: &WordMatrix, mu: &WordMatrix, mv: &WordMatrix, q: usize) -> bool {
    let (cu, cv) = (mu.q_column(q), mv.q_column(q));
    let (au, av) = (ma.mul(mu).q_column(q), ma.mul(mv).q_column(q));
    let equiv = cu != cv || au == av;
    let order = !cv.is_subset(cu) || av.is_subset(au);
    equiv && order
}

/// Outcome of an implication check that may be vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Implication {
    Vacuous,
    Holds,
    Violated,
}

/// Reset collapse for a triple `(t, u, v)`: if `M_u ~_q M_v` (or
/// `M_v ⪯_q M_u`) and `M_t M_v` sends every state to `q`, then
/// `M_t M_u = M_t M_v`.
pub fn reset_collapse_check(dfa: &Dfa, t: &Word, u: &Word, v: &Word, q: usize) -> Result<Implication> {
    check_q(dfa.n(), q)?;
    let mt = WordMatrix::of_word(dfa, t)?;
    let mu = WordMatrix::of_word(dfa, u)?;
    let mv = WordMatrix::of_word(dfa, v)?;
    Ok(reset_collapse(&mt, &mu, &mv, q))
}

pub(crate) fn reset_collapse(mt: &WordMatrix, mu: &WordMatrix, mv: &WordMatrix, q: usize) -> Implication {
    let n = mt.n();
    let tv = mt.mul(mv);
    let premise = tv.q_column(q) == StateSet::full(n) && mv.q_column(q).is_subset(mu.q_column(q));
    if !premise {
        return Implication::Vacuous;
    }
    if mt.mul(mu) == tv {
        Implication::Holds
    } else {
        Implication::Violated
    }
}

fn require_sync_to(dfa: &Dfa, s: &Word, q: usize) -> Result<()> {
    check_q(dfa.n(), q)?;
    if dfa.image(dfa.all_states(), s)? != StateSet::singleton(q) {
        return Err(Error::Precondition(format!("word {s} does not synchronize to state {q}")));
    }
    Ok(())
}

/// Prefix and suffix matrices of `s`, both indexed by length.
fn prefix_suffix(dfa: &Dfa, s: &Word) -> (Vec<WordMatrix>, Vec<WordMatrix>) {
    let mut prefixes = Vec::with_capacity(s.len() + 1);
    let mut m = WordMatrix::identity(dfa.n());
    prefixes.push(m.clone());
    for &l in s.letters() {
        m = m.mul(&WordMatrix::of_letters(dfa, &[l]));
        prefixes.push(m.clone());
    }
    (prefixes, suffix_matrices(dfa, s))
}

/// Leftmost-longest infix `s[i..j]` whose removal keeps column `q` full.
fn find_removable(dfa: &Dfa, s: &Word, q: usize) -> Option<(usize, usize)> {
    let len = s.len();
    let (prefixes, suffixes) = prefix_suffix(dfa, s);
    for i in 0..len {
        for j in (i + 1..=len).rev() {
            let p = &prefixes[i];
            let sfx = &suffixes[len - j];
            if p.rows().all(|c| sfx.col(c) == q) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Whether no factorization `s = u t v` with `t` nonempty has
/// `M_{utv} ~_q M_{uv}`.
pub fn is_irreducible(dfa: &Dfa, s: &Word, q: usize) -> Result<bool> {
    require_sync_to(dfa, s, q)?;
    Ok(find_removable(dfa, s, q).is_none())
}

/// Repeatedly removes the leftmost-longest removable infix until the word
/// is irreducible. The result still synchronizes to `q`.
pub fn reduce_word(dfa: &Dfa, s: &Word, q: usize) -> Result<Word> {
    require_sync_to(dfa, s, q)?;
    let mut w = s.clone();
    while let Some((i, j)) = find_removable(dfa, &w, q) {
        w = w.prefix(i).concat(&w.suffix(w.len() - j));
    }
    Ok(w)
}

/// Whether the `|s| + 1` suffix matrices of `s` have pairwise distinct
/// columns `q`, and no split `s = u t v` with `t` nonempty has
/// `M_{tv} ⪯_q M_v`. The second clause implies the first.
pub fn suffix_distinctness_check(dfa: &Dfa, s: &Word, q: usize) -> Result<bool> {
    require_sync_to(dfa, s, q)?;
    let cols: Vec<StateSet> = suffix_matrices(dfa, s).iter().map(|m| m.q_column(q)).collect();
    let mut sorted = cols.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != cols.len() {
        return Ok(false);
    }
    for (short, &cv) in cols.iter().enumerate() {
        if cols[short + 1..].iter().any(|&ctv| ctv.is_subset(cv)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Suffixes of a reset word whose series value is `n - 2`, with the checks
/// that accompany them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearSync {
    /// Suffixes with value `n - 2`, shortest first.
    pub suffixes: Vec<Word>,
    /// Row holding the single unit outside column `q`, per suffix.
    pub stray_rows: Vec<usize>,
    /// At most `n` such suffixes.
    pub within_bound: bool,
    /// Stray units lie in pairwise distinct rows.
    pub distinct_rows: bool,
    /// A letter `β` and suffix index with `β u` synchronizing.
    pub extension: Option<(Letter, usize)>,
}

impl NearSync {
    pub fn holds(&self) -> bool {
        self.within_bound && self.distinct_rows && self.extension.is_some()
    }
}

/// Collects the suffixes `u ⪯ s` with `(S,u) = n - 2` for the target `{q}`.
pub fn near_sync_suffixes(dfa: &Dfa, s: &Word, q: usize) -> Result<NearSync> {
    require_sync_to(dfa, s, q)?;
    let n = dfa.n();
    let mut suffixes = Vec::new();
    let mut stray_rows = Vec::new();
    for (len, m) in suffix_matrices(dfa, s).iter().enumerate() {
        let col = m.q_column(q);
        if n >= 2 && col.len() == n - 1 {
            let stray = StateSet::full(n).intersection(StateSet::from_bits(!col.bits()));
            stray_rows.push(stray.single().expect("one stray row"));
            suffixes.push(s.suffix(len));
        }
    }
    let mut rows = stray_rows.clone();
    rows.sort_unstable();
    rows.dedup();
    let distinct_rows = rows.len() == stray_rows.len();

    let mut extension = None;
    'outer: for (i, u) in suffixes.iter().enumerate() {
        for l in 0..dfa.k() {
            let bu = Word::new(vec![l as Letter]).concat(u);
            if WordMatrix::of_letters(dfa, bu.letters()).is_reset_matrix() {
                extension = Some((l as Letter, i));
                break 'outer;
            }
        }
    }
    Ok(NearSync {
        within_bound: suffixes.len() <= n,
        suffixes,
        stray_rows,
        distinct_rows,
        extension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{cerny_automaton, cerny_reset_word, kari_automaton, roman_automaton, KARI_WORD};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// Exhaustive enumeration of words in shortlex order.
    fn brute_force_shortest(dfa: &Dfa, max_len: usize) -> Option<Word> {
        dfa.words_up_to(max_len)
            .into_iter()
            .find(|x| dfa.image(dfa.all_states(), x).unwrap().len() == 1)
    }

    #[test]
    fn synchronizing_detection() {
        for n in 2..8 {
            assert!(is_synchronizing(&cerny_automaton(n).unwrap()));
        }
        assert!(is_synchronizing(&kari_automaton()));
        let perm = Dfa::new(3, vec![vec![1, 2, 0], vec![1, 0, 2]]).unwrap();
        assert!(!is_synchronizing(&perm));
        assert_eq!(shortest_reset_word(&perm).unwrap(), None);
    }

    #[test]
    fn pair_criterion_agrees_with_subset_search() {
        // All 3-state 2-letter automata.
        for idx in 0..3usize.pow(6) {
            let mut x = idx;
            let delta: Vec<u8> = (0..6).map(|_| { let d = (x % 3) as u8; x /= 3; d }).collect();
            let dfa = Dfa::from_raw(3, 2, delta);
            let bfs = shortest_reset_word(&dfa).unwrap().is_some();
            let brute = brute_force_shortest(&dfa, 8).is_some();
            assert_eq!(is_synchronizing(&dfa), brute, "{dfa:?}");
            assert_eq!(bfs, brute, "{dfa:?}");
        }
    }

    #[test]
    fn cerny_lengths() {
        let r = shortest_reset_word(&cerny_automaton(4).unwrap()).unwrap().unwrap();
        assert_eq!(r.length, 9);
        let r = shortest_reset_word(&cerny_automaton(3).unwrap()).unwrap().unwrap();
        assert_eq!(r.length, 4);
    }

    #[test]
    fn bfs_word_is_lexicographically_least_shortest() {
        for n in 2..=4 {
            let c = cerny_automaton(n).unwrap();
            let r = shortest_reset_word(&c).unwrap().unwrap();
            let brute = brute_force_shortest(&c, r.length).unwrap();
            assert_eq!(r.word, brute);
            assert_eq!(c.image(c.all_states(), &r.word).unwrap(), StateSet::singleton(r.target));
        }
    }

    #[test]
    fn capacity_limit() {
        let c = cerny_automaton(6).unwrap();
        assert!(matches!(shortest_reset_word_with_limit(&c, 5), Err(Error::Capacity(_))));
        assert!(shortest_reset_word_with_limit(&c, 6).unwrap().is_some());
    }

    #[test]
    fn sparse_visited_table_matches_dense() {
        for dfa in [cerny_automaton(6).unwrap(), kari_automaton(), roman_automaton()] {
            let dense = search(&dfa, Visited::new(dfa.n()));
            let sparse = search(&dfa, Visited::Sparse(HashMap::new()));
            assert_eq!(dense, sparse);
        }
    }

    #[test]
    fn single_state_automaton() {
        let d = Dfa::new(1, vec![vec![0]]).unwrap();
        assert!(is_synchronizing(&d));
        assert_eq!(shortest_reset_word(&d).unwrap().unwrap().length, 0);
    }

    #[test]
    fn q_relations() {
        let n = 4;
        let e = WordMatrix::identity(n);
        let reset = WordMatrix::constant(n, 2);
        assert!(q_equivalent(&reset, &reset, 2).unwrap());
        assert!(!q_equivalent(&e, &reset, 2).unwrap());
        assert!(q_preceq(&reset, &reset, 2).unwrap());
        let empty_col = WordMatrix::constant(n, 0);
        assert!(q_preceq(&empty_col, &e, 2).unwrap());
        assert!(!q_preceq(&reset, &e, 2).unwrap());
        assert!(q_preceq(&e, &reset, 2).unwrap());
        assert!(q_equivalent(&e, &reset, 4).is_err());
        assert!(q_equivalent(&e, &WordMatrix::identity(3), 0).is_err());
    }

    fn example_matrices() -> (WordMatrix, WordMatrix, WordMatrix) {
        let ma = WordMatrix::from_rows(vec![1, 1, 1, 2, 2]).unwrap();
        let v1 = WordMatrix::from_rows(vec![3, 4, 4, 2, 0]).unwrap();
        let v2 = WordMatrix::from_rows(vec![2, 4, 4, 0, 3]).unwrap();
        (ma, v1, v2)
    }

    #[test]
    fn worked_example_matrices() {
        let (ma, v1, v2) = example_matrices();
        assert!(q_equivalent(&v1, &v2, 4).unwrap());
        assert_eq!(ma.mul(&v1), WordMatrix::constant(5, 4));
        assert_eq!(ma.mul(&v2), WordMatrix::constant(5, 4));
        assert!(left_stability_holds(&ma, &v1, &v2, 4));
        assert_eq!(reset_collapse(&ma, &v1, &v2, 4), Implication::Holds);
    }

    #[test]
    fn left_stability_on_kari_short_words() {
        let kari = kari_automaton();
        let words = kari.words_up_to(3);
        let ms: Vec<_> = words.iter().map(|x| WordMatrix::of_word(&kari, x).unwrap()).collect();
        for ma in ms.iter().take(7) {
            for mu in &ms {
                for mv in &ms {
                    for q in 0..6 {
                        assert!(left_stability_holds(ma, mu, mv, q));
                    }
                }
            }
        }
        assert!(left_stability_check(&kari, &w("ab"), &w("b"), &w("b"), 0).unwrap());
    }

    #[test]
    fn irreducibility() {
        let c4 = cerny_automaton(4).unwrap();
        let r = shortest_reset_word(&c4).unwrap().unwrap();
        assert!(is_irreducible(&c4, &r.word, r.target).unwrap());
        let doubled = r.word.repeat(2);
        assert!(!is_irreducible(&c4, &doubled, r.target).unwrap());
        assert!(!suffix_distinctness_check(&c4, &doubled, r.target).unwrap());

        let kari = kari_automaton();
        let s = w(KARI_WORD);
        let q = kari.image(kari.all_states(), &s).unwrap().single().unwrap();
        assert!(is_irreducible(&kari, &s, q).unwrap());
        assert!(suffix_distinctness_check(&kari, &s, q).unwrap());

        assert!(matches!(is_irreducible(&c4, &w("a"), 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn reduction_removes_full_cycle() {
        let c4 = cerny_automaton(4).unwrap();
        let s = cerny_reset_word(4);
        let q = c4.image(c4.all_states(), &s).unwrap().single().unwrap();
        assert_eq!(reduce_word(&c4, &s, q).unwrap(), s);
        // b a⁴ a³ b a³ b: the inserted a⁴ is the identity.
        let padded = s.prefix(1).concat(&w("aaaa")).concat(&s.suffix(8));
        let reduced = reduce_word(&c4, &padded, q).unwrap();
        assert_eq!(reduced, s);
        for pos in 0..=s.len() {
            let padded = s.prefix(pos).concat(&w("aaaa")).concat(&s.suffix(s.len() - pos));
            let reduced = reduce_word(&c4, &padded, q).unwrap();
            assert!(is_irreducible(&c4, &reduced, q).unwrap());
            assert_eq!(reduced.len(), 9);
        }
    }

    #[test]
    fn near_sync_on_examples() {
        let c4 = cerny_automaton(4).unwrap();
        let r = shortest_reset_word(&c4).unwrap().unwrap();
        let ns = near_sync_suffixes(&c4, &r.word, r.target).unwrap();
        assert!(ns.suffixes.len() <= 4);
        assert!(ns.holds(), "{ns:?}");

        let kari = kari_automaton();
        let s = w(KARI_WORD);
        let q = kari.image(kari.all_states(), &s).unwrap().single().unwrap();
        let ns = near_sync_suffixes(&kari, &s, q).unwrap();
        assert_eq!(ns.suffixes.len(), 5);
        assert!(ns.holds());

        let roman = roman_automaton();
        let r = shortest_reset_word(&roman).unwrap().unwrap();
        let ns = near_sync_suffixes(&roman, &r.word, r.target).unwrap();
        assert!(ns.suffixes.len() <= 5 && ns.holds());
    }
}
