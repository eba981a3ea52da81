//! Exact linear algebra over the rationals on flattened `n x n` matrices.
//!
//! Every dimension and membership question goes through [`Echelon`], an
//! incremental reduced row-echelon accumulator over [`Rational`].

use std::collections::VecDeque;

use num::{BigInt, BigRational, One, Zero};

use crate::automaton::{Dfa, Letter, Word};
use crate::error::{Error, Result};
use crate::word_matrix::WordMatrix;

pub type Rational = BigRational;

/// Integer-valued rational.
pub fn rational(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// An `n x n` rational matrix flattened row-major to `n²` entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FlatMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl FlatMatrix {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(FlatMatrix { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        FlatMatrix {
            n,
            entries: vec![Rational::zero(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn scale(&self, factor: &Rational) -> FlatMatrix {
        FlatMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &FlatMatrix) -> Result<FlatMatrix> {
        self.check_dim(other)?;
        Ok(FlatMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Ordinary matrix product.
    pub fn matmul(&self, other: &FlatMatrix) -> Result<FlatMatrix> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = FlatMatrix::zero(n);
        for i in 0..n {
            for m in 0..n {
                let a = self.entry(i, m);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.entry(m, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Sum of all entries.
    pub fn total(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    fn check_dim(&self, other: &FlatMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

impl From<&WordMatrix> for FlatMatrix {
    fn from(m: &WordMatrix) -> Self {
        let n = m.n();
        let mut entries = vec![Rational::zero(); n * n];
        for (i, c) in m.rows().enumerate() {
            entries[i * n + c] = Rational::one();
        }
        FlatMatrix { n, entries }
    }
}

impl From<WordMatrix> for FlatMatrix {
    fn from(m: WordMatrix) -> Self {
        FlatMatrix::from(&m)
    }
}

/// Coefficients `λ_i` of a linear combination, keyed by basis index.
/// Indices that do not appear have coefficient zero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Decomposition {
    pub coefficients: Vec<(usize, Rational)>,
}

impl Decomposition {
    /// `Σ λ_i`.
    pub fn coefficient_sum(&self) -> Rational {
        self.coefficients
            .iter()
            .fold(Rational::zero(), |acc, (_, c)| acc + c)
    }

    pub fn coefficient(&self, index: usize) -> Rational {
        self.coefficients
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// `Σ λ_i basis[i]`.
    pub fn recombine(&self, basis: &[FlatMatrix]) -> Result<FlatMatrix> {
        let n = basis.first().map_or(0, FlatMatrix::n);
        let mut acc = FlatMatrix::zero(n);
        for (i, c) in &self.coefficients {
            let b = basis
                .get(*i)
                .ok_or_else(|| Error::invalid(format!("basis index {i} out of range")))?;
            acc = acc.add(&b.scale(c))?;
        }
        Ok(acc)
    }
}

struct EchelonRow {
    pivot: usize,
    values: Vec<Rational>,
    /// Coefficients over the independent inputs (`Echelon::sources`).
    combo: Vec<Rational>,
}

/// Incremental reduced row-echelon form.
///
/// Vectors are inserted one at a time; the accumulator records which inputs
/// were independent and, when tracking is on, how each stored row is
/// expressed in terms of those inputs so that members of the span can be
/// decomposed.
pub struct Echelon {
    len: usize,
    rows: Vec<EchelonRow>,
    /// Input index of every independent insertion, in insertion order.
    sources: Vec<usize>,
    inserted: usize,
    track: bool,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon {
            len,
            rows: Vec::new(),
            sources: Vec::new(),
            inserted: 0,
            track: false,
        }
    }

    /// An accumulator that can also [`express`](Echelon::express) members.
    pub fn tracking(len: usize) -> Self {
        Echelon {
            track: true,
            ..Echelon::new(len)
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Input indices (in insertion order) that increased the rank.
    pub fn independent_inputs(&self) -> &[usize] {
        &self.sources
    }

    /// Reduces `v` against the stored rows. Returns the residual and, when
    /// tracking, the multipliers of each source used.
    fn reduce(&self, v: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r = v.to_vec();
        let mut combo = if self.track {
            vec![Rational::zero(); self.sources.len()]
        } else {
            Vec::new()
        };
        for row in &self.rows {
            if r[row.pivot].is_zero() {
                continue;
            }
            let f = r[row.pivot].clone();
            for (x, y) in r.iter_mut().zip(&row.values).skip(row.pivot) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            if self.track {
                for (c, y) in combo.iter_mut().zip(&row.combo) {
                    if !y.is_zero() {
                        *c += &f * y;
                    }
                }
            }
        }
        (r, combo)
    }

    /// Inserts a vector; returns whether it was independent of the rows so far.
    pub fn insert(&mut self, v: &[Rational]) -> Result<bool> {
        if v.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: v.len(),
            });
        }
        let index = self.inserted;
        self.inserted += 1;
        let (mut r, used) = self.reduce(v);
        let Some(pivot) = r.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };

        let inv = r[pivot].recip();
        for x in r.iter_mut().skip(pivot) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let combo = if self.track {
            // r = v - Σ used_s * source_s, then scaled by inv.
            let mut c: Vec<Rational> = used.into_iter().map(|u| -u * &inv).collect();
            c.push(inv.clone());
            c
        } else {
            Vec::new()
        };
        self.sources.push(index);

        for row in &mut self.rows {
            if row.values[pivot].is_zero() {
                continue;
            }
            let f = row.values[pivot].clone();
            for (x, y) in row.values.iter_mut().zip(&r).skip(pivot) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            if self.track {
                row.combo.resize(combo.len(), Rational::zero());
                for (x, y) in row.combo.iter_mut().zip(&combo) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        let at = self.rows.partition_point(|row| row.pivot < pivot);
        self.rows.insert(
            at,
            EchelonRow {
                pivot,
                values: r,
                combo,
            },
        );
        Ok(true)
    }

    /// Inserts the flattening of a word matrix.
    pub fn insert_word_matrix(&mut self, m: &WordMatrix) -> Result<bool> {
        self.insert(FlatMatrix::from(m).entries())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        v.len() == self.len && self.reduce(v).0.iter().all(Zero::is_zero)
    }

    /// Coefficients over input indices expressing `v`, or `None` if `v` is
    /// outside the span. Requires a tracking accumulator.
    pub fn express(&self, v: &[Rational]) -> Option<Decomposition> {
        assert!(self.track, "express needs a tracking accumulator");
        if v.len() != self.len {
            return None;
        }
        let (r, used) = self.reduce(v);
        if !r.iter().all(Zero::is_zero) {
            return None;
        }
        let coefficients = used
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (self.sources[s], c))
            .collect();
        Some(Decomposition { coefficients })
    }
}

fn common_n(ms: &[FlatMatrix]) -> Result<usize> {
    let n = ms.first().map_or(0, FlatMatrix::n);
    match ms.iter().find(|m| m.n() != n) {
        Some(m) => Err(Error::DimensionMismatch {
            expected: n,
            found: m.n(),
        }),
        None => Ok(n),
    }
}

/// Dimension of the span of the given matrices as vectors in `Q^{n²}`.
pub fn span_dimension(ms: &[FlatMatrix]) -> Result<usize> {
    let n = common_n(ms)?;
    let mut ech = Echelon::new(n * n);
    for m in ms {
        ech.insert(m.entries())?;
    }
    Ok(ech.rank())
}

/// Dimension of the span of a set of word matrices.
pub fn word_span_dimension<'a, I>(ms: I) -> Result<usize>
where
    I: IntoIterator<Item = &'a WordMatrix>,
{
    let mut ech: Option<Echelon> = None;
    for m in ms {
        let e = ech.get_or_insert_with(|| Echelon::new(m.n() * m.n()));
        e.insert_word_matrix(m)?;
    }
    Ok(ech.map_or(0, |e| e.rank()))
}

/// Exact coefficients expressing `target` over `basis`, or `None` if the
/// target lies outside the span. Dependent basis members get coefficient 0.
pub fn decompose(target: &FlatMatrix, basis: &[FlatMatrix]) -> Result<Option<Decomposition>> {
    let n = common_n(basis)?;
    if !basis.is_empty() && target.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.n(),
        });
    }
    let mut ech = Echelon::tracking(target.n() * target.n());
    for b in basis {
        ech.insert(b.entries())?;
    }
    Ok(ech.express(target.entries()))
}

/// The columns used by [`standard_basis`]: the first `k - 1` columns other
/// than `fixed_col`, followed by `fixed_col`.
pub fn support_columns(n: usize, k: usize, fixed_col: usize) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if fixed_col >= n {
        return Err(Error::invalid(format!("fixed column {fixed_col} out of range for n = {n}")));
    }
    let mut cols: Vec<usize> = (0..n).filter(|&c| c != fixed_col).take(k - 1).collect();
    cols.push(fixed_col);
    Ok(cols)
}

/// The matrices `V_{i,j}` (unit at `(i, j)`, every other row's unit in the
/// fixed column) for each row `i` and non-fixed support column `j`, followed
/// by `I` (all units in the fixed column).
pub fn standard_basis_matrices(n: usize, k: usize, fixed_col: usize) -> Result<Vec<WordMatrix>> {
    let cols = support_columns(n, k, fixed_col)?;
    let mut out = Vec::with_capacity(n * (k - 1) + 1);
    for i in 0..n {
        for &j in &cols[..k - 1] {
            let mut rows = vec![fixed_col; n];
            rows[i] = j;
            out.push(WordMatrix::from_rows(rows)?);
        }
    }
    out.push(WordMatrix::constant(n, fixed_col));
    Ok(out)
}

/// [`standard_basis_matrices`] flattened; `n(k-1) + 1` matrices.
pub fn standard_basis(n: usize, k: usize, fixed_col: usize) -> Result<Vec<FlatMatrix>> {
    Ok(standard_basis_matrices(n, k, fixed_col)?
        .iter()
        .map(FlatMatrix::from)
        .collect())
}

/// Every row-functional `n x n` matrix whose units lie in `columns`.
pub fn supported_word_matrices(n: usize, columns: &[usize]) -> impl Iterator<Item = WordMatrix> + '_ {
    let total = columns.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut idx| {
        let rows = (0..n)
            .map(|_| {
                let c = columns[idx % columns.len()];
                idx /= columns.len();
                c
            })
            .collect();
        WordMatrix::from_rows(rows).expect("columns in range")
    })
}

/// Words whose matrices form a basis of the span of all word matrices of
/// `dfa`, found by closing `{E}` under right multiplication by letters.
///
/// Words are produced in shortlex order, so each basis word is a shortest
/// word whose matrix is independent of shorter ones.
pub fn word_space_basis(dfa: &Dfa) -> Vec<Word> {
    let n = dfa.n();
    let mut ech = Echelon::new(n * n);
    let mut basis = Vec::new();
    let mut queue = VecDeque::from([Word::empty()]);
    ech.insert_word_matrix(&WordMatrix::identity(n)).expect("dimension");
    basis.push(Word::empty());
    while let Some(w) = queue.pop_front() {
        for l in 0..dfa.k() {
            let mut x = w.clone();
            x.push(l as Letter);
            let m = WordMatrix::of_letters(dfa, x.letters());
            if ech.insert_word_matrix(&m).expect("dimension") {
                basis.push(x.clone());
                queue.push_back(x);
            }
        }
    }
    basis
}

/// Outcome of [`letter_closure_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LetterClosure {
    /// `M_α g` lies in the span for every letter `α` and generator `g`.
    Closed,
    /// `M_letter · generators[generator]` escapes the span.
    Escapes { letter: Letter, generator: usize },
}

impl LetterClosure {
    pub fn is_closed(&self) -> bool {
        matches!(self, LetterClosure::Closed)
    }
}

/// Whether the span `W` of `generators` is closed under left multiplication
/// by every letter matrix. When it is, `M_t M ∈ W` for all words `t` and all
/// `M ∈ W`; when it is not, the first escaping pair is returned.
pub fn letter_closure_check(dfa: &Dfa, generators: &[WordMatrix]) -> Result<LetterClosure> {
    let n = dfa.n();
    if let Some(g) = generators.iter().find(|g| g.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.n(),
        });
    }
    let mut ech = Echelon::new(n * n);
    for g in generators {
        ech.insert_word_matrix(g)?;
    }
    for l in 0..dfa.k() {
        let ma = WordMatrix::of_letters(dfa, &[l as Letter]);
        for (gi, g) in generators.iter().enumerate() {
            if !ech.contains(FlatMatrix::from(ma.mul(g)).entries()) {
                return Ok(LetterClosure::Escapes {
                    letter: l as Letter,
                    generator: gi,
                });
            }
        }
    }
    Ok(LetterClosure::Closed)
}

/// Rank of a dense rational matrix by elimination, used to cross-check the
/// combinatorial rank of word matrices.
pub fn dense_rank(m: &FlatMatrix) -> usize {
    let n = m.n();
    let mut ech = Echelon::new(n);
    for i in 0..n {
        ech.insert(&m.entries()[i * n..(i + 1) * n]).expect("row length");
    }
    ech.rank()
}
