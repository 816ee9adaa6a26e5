//! Bit-packed rectangular matrices over `{+1, -1}`.
//!
//! A set bit encodes the entry `-1`, so the all-ones row is the zero word and
//! the XOR of two column words counts sign disagreements directly. Matrices
//! keep both a row-major and a column-major bit plane in sync: verification
//! is column-dot-heavy while construction is row-heavy.

use std::fmt;
use thiserror::Error;

/// Largest supported row or column count (order 2^14).
pub const MAX_DIM: usize = 1 << 14;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    (bits + WORD - 1) / WORD
}

/// Mask selecting the bits actually used in the final word of a lane.
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("degenerate matrix shape {0}x{1}")]
    EmptyMatrix(usize, usize),
    #[error("dimension {0} exceeds the supported limit {MAX_DIM}")]
    DimensionLimit(usize),
    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("invalid permutation")]
    BadPermutation,
    #[error("row subset: {0}")]
    BadSubset(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Rectangular ±1 matrix with dual bit planes. Immutable after construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PmMatrix {
    n_rows: usize,
    n_cols: usize,
    /// Row-major plane: row `i` occupies `row_bits[i*rw .. (i+1)*rw]`,
    /// bit `j` set iff entry `(i, j)` is `-1`.
    row_bits: Vec<u64>,
    /// Column-major plane kept in sync with `row_bits`.
    col_bits: Vec<u64>,
}

impl PmMatrix {
    fn check_dims(n_rows: usize, n_cols: usize) -> Result<(), MatrixError> {
        if n_rows == 0 || n_cols == 0 {
            return Err(MatrixError::EmptyMatrix(n_rows, n_cols));
        }
        if n_rows > MAX_DIM {
            return Err(MatrixError::DimensionLimit(n_rows));
        }
        if n_cols > MAX_DIM {
            return Err(MatrixError::DimensionLimit(n_cols));
        }
        Ok(())
    }

    /// Builds a matrix from a predicate; `true` encodes the entry `-1`.
    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut is_minus: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, MatrixError> {
        Self::check_dims(n_rows, n_cols)?;
        let rw = words_for(n_cols);
        let cw = words_for(n_rows);
        let mut row_bits = vec![0u64; n_rows * rw];
        let mut col_bits = vec![0u64; n_cols * cw];
        for i in 0..n_rows {
            for j in 0..n_cols {
                if is_minus(i, j) {
                    row_bits[i * rw + j / WORD] |= 1 << (j % WORD);
                    col_bits[j * cw + i / WORD] |= 1 << (i % WORD);
                }
            }
        }
        Ok(PmMatrix {
            n_rows,
            n_cols,
            row_bits,
            col_bits,
        })
    }

    /// Builds from rows of `+1` / `-1` entries.
    pub fn from_rows(rows: &[Vec<i32>]) -> Result<Self, MatrixError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        Self::check_dims(n_rows, n_cols)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(MatrixError::Parse {
                    line: i,
                    msg: format!("ragged row of length {} (expected {})", r.len(), n_cols),
                });
            }
            if let Some(v) = r.iter().find(|&&v| v != 1 && v != -1) {
                return Err(MatrixError::Parse {
                    line: i,
                    msg: format!("entry {v} is not +1/-1"),
                });
            }
        }
        Self::from_fn(n_rows, n_cols, |i, j| rows[i][j] == -1)
    }

    /// All-(+1) matrix.
    pub fn all_plus(n_rows: usize, n_cols: usize) -> Result<Self, MatrixError> {
        Self::from_fn(n_rows, n_cols, |_, _| false)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    fn rw(&self) -> usize {
        words_for(self.n_cols)
    }

    fn cw(&self) -> usize {
        words_for(self.n_rows)
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        let rw = self.rw();
        &self.row_bits[i * rw..(i + 1) * rw]
    }

    pub fn col_words(&self, j: usize) -> &[u64] {
        let cw = self.cw();
        &self.col_bits[j * cw..(j + 1) * cw]
    }

    /// Entry as `+1` or `-1`, read from the row plane.
    pub fn entry(&self, i: usize, j: usize) -> i32 {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        if self.row_bits[i * self.rw() + j / WORD] >> (j % WORD) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// Entry read from the column plane; used by consistency checks.
    pub fn entry_from_cols(&self, i: usize, j: usize) -> i32 {
        if self.col_bits[j * self.cw() + i / WORD] >> (i % WORD) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// Sum of the entries of row `i`.
    pub fn row_sum(&self, i: usize) -> i64 {
        let minus: u32 = self.row_words(i).iter().map(|w| w.count_ones()).sum();
        self.n_cols as i64 - 2 * minus as i64
    }

    /// Index of the all-(+1) row, if present. A Hadamard matrix has at most
    /// one since rows are pairwise distinct.
    pub fn find_all_ones_row(&self) -> Option<usize> {
        (0..self.n_rows).find(|&i| self.row_words(i).iter().all(|&w| w == 0))
    }

    /// Dot product of columns `i` and `j` restricted to `rows`, computed as
    /// `|rows| - 2*popcount((col_i XOR col_j) AND mask)`.
    pub fn column_dot(&self, rows: &RowSubset, i: usize, j: usize) -> Result<i64, MatrixError> {
        if i >= self.n_cols {
            return Err(MatrixError::IndexOutOfRange {
                what: "column",
                index: i,
                size: self.n_cols,
            });
        }
        if j >= self.n_cols {
            return Err(MatrixError::IndexOutOfRange {
                what: "column",
                index: j,
                size: self.n_cols,
            });
        }
        if rows.n_rows != self.n_rows {
            return Err(MatrixError::BadSubset(format!(
                "subset over {} rows applied to a matrix with {} rows",
                rows.n_rows, self.n_rows
            )));
        }
        Ok(self.column_dot_unchecked(rows, i, j))
    }

    #[inline]
    pub(crate) fn column_dot_unchecked(&self, rows: &RowSubset, i: usize, j: usize) -> i64 {
        let ci = self.col_words(i);
        let cj = self.col_words(j);
        let disagree: u32 = ci
            .iter()
            .zip(cj)
            .zip(&rows.mask)
            .map(|((a, b), m)| ((a ^ b) & m).count_ones())
            .sum();
        rows.len() as i64 - 2 * disagree as i64
    }

    /// Dot product of columns `i` and `j` over all rows.
    pub fn column_dot_all(&self, i: usize, j: usize) -> i64 {
        let disagree: u32 = self
            .col_words(i)
            .iter()
            .zip(self.col_words(j))
            .map(|(a, b)| (a ^ b).count_ones())
            .sum();
        self.n_rows as i64 - 2 * disagree as i64
    }

    /// True iff the matrix is square with pairwise orthogonal columns.
    pub fn is_hadamard(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.n_cols {
            for j in (i + 1)..self.n_cols {
                if self.column_dot_all(i, j) != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Kronecker product; block `(i, j)` of the result is `self[i,j] * other`.
    pub fn kronecker(&self, other: &PmMatrix) -> Result<PmMatrix, MatrixError> {
        let n_rows = self
            .n_rows
            .checked_mul(other.n_rows)
            .ok_or(MatrixError::DimensionLimit(usize::MAX))?;
        let n_cols = self
            .n_cols
            .checked_mul(other.n_cols)
            .ok_or(MatrixError::DimensionLimit(usize::MAX))?;
        // (-1)^x * (-1)^y = (-1)^(x XOR y) in the bit encoding.
        PmMatrix::from_fn(n_rows, n_cols, |i, j| {
            (self.entry(i / other.n_rows, j / other.n_cols)
                * other.entry(i % other.n_rows, j % other.n_cols))
                == -1
        })
    }

    /// Negates the columns selected by `select`. Involution for a fixed mask.
    pub fn negate_columns(&self, select: impl Fn(usize) -> bool) -> PmMatrix {
        let rw = self.rw();
        let cw = self.cw();
        let mut toggle = vec![0u64; rw];
        let mut out = self.clone();
        for j in 0..self.n_cols {
            if select(j) {
                toggle[j / WORD] |= 1 << (j % WORD);
                let tm = tail_mask(self.n_rows);
                let base = j * cw;
                for w in 0..cw {
                    out.col_bits[base + w] = !self.col_bits[base + w];
                }
                out.col_bits[base + cw - 1] &= tm;
            }
        }
        for i in 0..self.n_rows {
            for w in 0..rw {
                out.row_bits[i * rw + w] ^= toggle[w];
            }
        }
        out
    }

    /// Negates the rows selected by `select`.
    pub fn negate_rows(&self, select: impl Fn(usize) -> bool) -> PmMatrix {
        let rw = self.rw();
        let cw = self.cw();
        let mut toggle = vec![0u64; cw];
        let mut out = self.clone();
        for i in 0..self.n_rows {
            if select(i) {
                toggle[i / WORD] |= 1 << (i % WORD);
                let tm = tail_mask(self.n_cols);
                let base = i * rw;
                for w in 0..rw {
                    out.row_bits[base + w] = !self.row_bits[base + w];
                }
                out.row_bits[base + rw - 1] &= tm;
            }
        }
        for j in 0..self.n_cols {
            for w in 0..cw {
                out.col_bits[j * cw + w] ^= toggle[w];
            }
        }
        out
    }

    fn check_permutation(perm: &[usize], n: usize) -> Result<(), MatrixError> {
        if perm.len() != n {
            return Err(MatrixError::BadPermutation);
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(MatrixError::BadPermutation);
            }
            seen[p] = true;
        }
        Ok(())
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<PmMatrix, MatrixError> {
        Self::check_permutation(perm, self.n_rows)?;
        PmMatrix::from_fn(self.n_rows, self.n_cols, |i, j| {
            self.entry(perm[i], j) == -1
        })
    }

    /// Column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<PmMatrix, MatrixError> {
        Self::check_permutation(perm, self.n_cols)?;
        PmMatrix::from_fn(self.n_rows, self.n_cols, |i, j| {
            self.entry(i, perm[j]) == -1
        })
    }

    /// Negates columns so that row 0 becomes the all-ones row.
    pub fn normalize_first_row(&self) -> PmMatrix {
        self.negate_columns(|j| self.entry(0, j) == -1)
    }

    /// Entry-by-entry agreement of the two bit planes.
    pub fn transpose_consistent(&self) -> bool {
        (0..self.n_rows)
            .all(|i| (0..self.n_cols).all(|j| self.entry(i, j) == self.entry_from_cols(i, j)))
    }

    /// Serializes to the `HAD` text format.
    pub fn to_text(&self) -> String {
        let mut s = format!("HAD {} {}\n", self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                s.push(if self.entry(i, j) == 1 { '+' } else { '-' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the `HAD` text format: a `HAD <n_rows> <n_cols>` header, then
    /// exactly `n_rows` lines over `{+, -}`. Anything else is rejected.
    pub fn parse(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text.split('\n');
        let header = lines.next().ok_or(MatrixError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut parts = header.split_whitespace();
        let bad_header = || MatrixError::Parse {
            line: 1,
            msg: format!("expected `HAD <n_rows> <n_cols>`, got {header:?}"),
        };
        if parts.next() != Some("HAD") {
            return Err(bad_header());
        }
        let n_rows: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(bad_header)?;
        let n_cols: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(bad_header)?;
        if parts.next().is_some() {
            return Err(bad_header());
        }
        Self::check_dims(n_rows, n_cols)?;
        let mut rows: Vec<Vec<bool>> = Vec::with_capacity(n_rows);
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            if rows.len() == n_rows {
                if !line.is_empty() {
                    return Err(MatrixError::Parse {
                        line: lineno,
                        msg: "trailing content after matrix body".into(),
                    });
                }
                continue;
            }
            if line.len() != n_cols {
                return Err(MatrixError::Parse {
                    line: lineno,
                    msg: format!("row of length {} (expected {})", line.len(), n_cols),
                });
            }
            let mut row = Vec::with_capacity(n_cols);
            for ch in line.chars() {
                match ch {
                    '+' => row.push(false),
                    '-' => row.push(true),
                    other => {
                        return Err(MatrixError::Parse {
                            line: lineno,
                            msg: format!("invalid character {other:?}"),
                        })
                    }
                }
            }
            rows.push(row);
        }
        if rows.len() != n_rows {
            return Err(MatrixError::Parse {
                line: rows.len() + 2,
                msg: format!("expected {} rows, found {}", n_rows, rows.len()),
            });
        }
        Self::from_fn(n_rows, n_cols, |i, j| rows[i][j])
    }
}

impl fmt::Debug for PmMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PmMatrix({}x{})", self.n_rows, self.n_cols)
    }
}

/// Sorted subset of the rows of a host matrix, with a bitmask laid out like
/// the column-plane words so it can be ANDed against them directly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RowSubset {
    n_rows: usize,
    indices: Vec<usize>,
    mask: Vec<u64>,
}

impl RowSubset {
    /// Builds a subset from indices; they are sorted, and duplicates or
    /// out-of-range indices are rejected.
    pub fn new(n_rows: usize, indices: &[usize]) -> Result<Self, MatrixError> {
        let mut indices = indices.to_vec();
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(MatrixError::BadSubset("duplicate row index".into()));
        }
        if let Some(&i) = indices.last() {
            if i >= n_rows {
                return Err(MatrixError::IndexOutOfRange {
                    what: "row",
                    index: i,
                    size: n_rows,
                });
            }
        }
        let mut mask = vec![0u64; words_for(n_rows)];
        for &i in &indices {
            mask[i / WORD] |= 1 << (i % WORD);
        }
        Ok(RowSubset {
            n_rows,
            indices,
            mask,
        })
    }

    /// The full row set.
    pub fn all(n_rows: usize) -> Self {
        Self::new(n_rows, &(0..n_rows).collect::<Vec<_>>()).expect("full set is valid")
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn host_rows(&self) -> usize {
        self.n_rows
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn mask_words(&self) -> &[u64] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n_rows && self.mask[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn complement(&self) -> RowSubset {
        let indices: Vec<usize> = (0..self.n_rows).filter(|&i| !self.contains(i)).collect();
        RowSubset::new(self.n_rows, &indices).expect("complement is valid")
    }

    pub fn with_row(&self, i: usize) -> Result<RowSubset, MatrixError> {
        let mut idx = self.indices.clone();
        idx.push(i);
        RowSubset::new(self.n_rows, &idx)
    }

    pub fn without_row(&self, i: usize) -> Result<RowSubset, MatrixError> {
        if !self.contains(i) {
            return Err(MatrixError::BadSubset(format!("row {i} not in subset")));
        }
        let idx: Vec<usize> = self.indices.iter().copied().filter(|&x| x != i).collect();
        RowSubset::new(self.n_rows, &idx)
    }

    pub fn union(&self, other: &RowSubset) -> Result<RowSubset, MatrixError> {
        if self.n_rows != other.n_rows {
            return Err(MatrixError::BadSubset("host size mismatch".into()));
        }
        let mut idx = self.indices.clone();
        for &i in &other.indices {
            if !self.contains(i) {
                idx.push(i);
            }
        }
        RowSubset::new(self.n_rows, &idx)
    }
}
