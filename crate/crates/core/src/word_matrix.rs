//! Row-functional 0/1 matrices: `M_w` has a single unit in row `i`, at the
//! column of the state `i` is sent to by `w`.

use std::fmt;

use crate::automaton::{Dfa, StateSet, Word};
use crate::error::{Error, Result};

/// An `n x n` matrix with exactly one unit per row, stored as the map
/// row -> column. Columns are identified with states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordMatrix {
    rows: Vec<u8>,
}

impl WordMatrix {
    /// The identity `E = M_ε`.
    pub fn identity(n: usize) -> Self {
        WordMatrix {
            rows: (0..n as u8).collect(),
        }
    }

    /// Builds a matrix from its row -> column map.
    pub fn from_rows(rows: Vec<usize>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > crate::automaton::MAX_STATES {
            return Err(Error::invalid(format!("matrix dimension {n} out of range")));
        }
        if let Some(&c) = rows.iter().find(|&&c| c >= n) {
            return Err(Error::invalid(format!("column {c} out of range for n = {n}")));
        }
        Ok(WordMatrix {
            rows: rows.into_iter().map(|c| c as u8).collect(),
        })
    }

    /// The matrix with all units in column `col`.
    pub fn constant(n: usize, col: usize) -> Self {
        WordMatrix {
            rows: vec![col as u8; n],
        }
    }

    /// `M_w`: row `i` has its unit at column `i w`.
    pub fn of_word(dfa: &Dfa, word: &Word) -> Result<Self> {
        word.validate(dfa.k())?;
        Ok(Self::of_letters(dfa, word.letters()))
    }

    pub(crate) fn of_letters(dfa: &Dfa, letters: &[u8]) -> Self {
        WordMatrix {
            rows: (0..dfa.n())
                .map(|i| dfa.apply_unchecked(i, letters) as u8)
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Column holding the unit of row `i`.
    pub fn col(&self, row: usize) -> usize {
        self.rows[row] as usize
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.rows.iter().map(|&c| c as usize)
    }

    /// Entry `(i, j)` of the dense view.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        u8::from(self.rows[i] as usize == j)
    }

    /// `self * other`; `M_u M_v = M_{uv}`.
    pub fn multiply(&self, other: &WordMatrix) -> Result<WordMatrix> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(self.mul(other))
    }

    pub(crate) fn mul(&self, other: &WordMatrix) -> WordMatrix {
        WordMatrix {
            rows: self.rows.iter().map(|&c| other.rows[c as usize]).collect(),
        }
    }

    /// Columns containing at least one unit; for `M_w` this is `Γw`.
    pub fn nonzero_columns(&self) -> StateSet {
        self.rows().collect()
    }

    /// Number of nonzero columns, which is the rank of the dense view.
    pub fn rank(&self) -> usize {
        self.nonzero_columns().len()
    }

    /// Rank one: every row maps into the same column.
    pub fn is_reset_matrix(&self) -> bool {
        self.rank() == 1
    }

    /// Rows holding a unit in column `q`, i.e. the preimage of `q`.
    pub fn q_column(&self, q: usize) -> StateSet {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, &c)| c as usize == q)
            .map(|(i, _)| i)
            .collect()
    }

    /// Dense 0/1 view, row-major.
    pub fn dense(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.entry(i, j)).collect()).collect()
    }
}

impl fmt::Debug for WordMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WordMatrix{:?}", self.rows)
    }
}

/// `n` lines of space-separated 0/1 entries.
impl fmt::Display for WordMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.dense() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}
