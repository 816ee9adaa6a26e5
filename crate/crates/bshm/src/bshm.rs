//! Verification and structural theory of balanced splittable Hadamard
//! matrices: certificates, Type classification, associated strongly regular
//! graphs, and the transforms that move between parameter sets (switching,
//! all-ones row insertion/removal, regular-form negation, unbiased-mate and
//! pairwise-balanced-design extraction, imprimitive structure decomposition).

use crate::pm_matrix::{MatrixError, PmMatrix, RowSubset};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BshmError {
    #[error("matrix is not Hadamard")]
    NotHadamard,
    #[error("row count {ell} outside 1..={max}", max = n - 1)]
    EllOutOfRange { ell: usize, n: usize },
    #[error("column dots take more than two values: {0:?}")]
    TooManyValues(Vec<i64>),
    #[error("k_a is not constant over columns: column {col} has {got}, column 0 has {expected}")]
    InconsistentKa { col: usize, got: i64, expected: i64 },
    #[error("no all-ones row available on the required side")]
    NoAllOnesRow,
    #[error("certificate kind mismatch: expected {expected}, got {got}")]
    KindMismatch { expected: &'static str, got: String },
    #[error("parameters (n, ell) = ({n}, {ell}) are not of the form (4a^2, 2a^2 +- a) for a = {a}")]
    ParamMismatch { n: i64, ell: i64, a: i64 },
    #[error("extracted matrix is not an unbiased Hadamard mate")]
    NotUnbiased,
    #[error("certificate is not of Type 1")]
    NotType1,
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Strongly regular graph parameters `(v, k, lambda, mu)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct SrgParams {
    pub v: i64,
    pub k: i64,
    pub lambda: i64,
    pub mu: i64,
}

impl SrgParams {
    pub fn new(v: i64, k: i64, lambda: i64, mu: i64) -> Self {
        SrgParams { v, k, lambda, mu }
    }

    /// `k(k - lambda - 1) = (v - k - 1) mu`.
    pub fn identity_holds(&self) -> bool {
        self.k * (self.k - self.lambda - 1) == (self.v - self.k - 1) * self.mu
    }

    /// Complement parameters `(v - k - 1, v - 2k + mu - 2, v - 2k + lambda)`.
    pub fn complement(&self) -> SrgParams {
        SrgParams {
            v: self.v,
            k: self.v - self.k - 1,
            lambda: self.v - 2 * self.k + self.mu - 2,
            mu: self.v - 2 * self.k + self.lambda,
        }
    }
}

/// Simple graph on `n` vertices stored as bitset adjacency rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is not regular: vertex {vertex} has degree {got}, vertex 0 has {expected}")]
    NotRegular {
        vertex: usize,
        got: usize,
        expected: usize,
    },
    #[error("not strongly regular: pair ({i}, {j}) has {got} common neighbors, expected {expected}")]
    NotStronglyRegular {
        i: usize,
        j: usize,
        got: i64,
        expected: i64,
    },
    #[error("adjacency must be symmetric with zero diagonal")]
    NotSimple,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = (n + 63) / 64;
        Graph {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        debug_assert!(i != j && i < self.n && j < self.n);
        self.adj[i * self.words + j / 64] |= 1 << (j % 64);
        self.adj[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn common_neighbors(&self, i: usize, j: usize) -> i64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a & b).count_ones() as i64)
            .sum()
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if !self.has_edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn is_simple(&self) -> bool {
        (0..self.n).all(|i| {
            !self.has_edge(i, i) && (i + 1..self.n).all(|j| self.has_edge(i, j) == self.has_edge(j, i))
        })
    }

    /// Disjoint union of `t` copies of the complete graph `K_m`.
    pub fn disjoint_cliques(t: usize, m: usize) -> Graph {
        let mut g = Graph::empty(t * m);
        for c in 0..t {
            for i in 0..m {
                for j in (i + 1)..m {
                    g.add_edge(c * m + i, c * m + j);
                }
            }
        }
        g
    }
}

/// Checks regularity and the identity `A^2 = kI + lambda*A + mu(J - I - A)`
/// by definitional common-neighbor counting.
pub fn srg_params(g: &Graph) -> Result<SrgParams, GraphError> {
    if !g.is_simple() {
        return Err(GraphError::NotSimple);
    }
    let n = g.n();
    let k = g.degree(0);
    for v in 1..n {
        let d = g.degree(v);
        if d != k {
            return Err(GraphError::NotRegular {
                vertex: v,
                got: d,
                expected: k,
            });
        }
    }
    let mut lambda: Option<i64> = None;
    let mut mu: Option<i64> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = g.common_neighbors(i, j);
            let slot = if g.has_edge(i, j) { &mut lambda } else { &mut mu };
            match *slot {
                None => *slot = Some(c),
                Some(expected) if expected != c => {
                    return Err(GraphError::NotStronglyRegular {
                        i,
                        j,
                        got: c,
                        expected,
                    })
                }
                Some(_) => {}
            }
        }
    }
    Ok(SrgParams {
        v: n as i64,
        k: k as i64,
        lambda: lambda.unwrap_or(0),
        mu: mu.unwrap_or(0),
    })
}

/// Primitive iff both the graph and its complement are connected:
/// `mu > 0` and `v - 2k + lambda > 0`.
pub fn primitivity(p: &SrgParams) -> bool {
    p.mu > 0 && p.v - 2 * p.k + p.lambda > 0
}

/// Graph on the columns with `i ~ j` iff their dot product over `rows`
/// equals `value`.
pub fn associated_graph(h: &PmMatrix, rows: &RowSubset, value: i64) -> Graph {
    let n = h.n_cols();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if h.column_dot_unchecked(rows, i, j) == value {
                g.add_edge(i, j);
            }
        }
    }
    g
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BshmKind {
    Equiangular,
    Type1,
    Type2,
    Degenerate,
}

impl BshmKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BshmKind::Equiangular => "equiangular",
            BshmKind::Type1 => "type1",
            BshmKind::Type2 => "type2",
            BshmKind::Degenerate => "degenerate",
        }
    }
}

/// Location of the all-ones row relative to the certified submatrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum AllOnesLocation {
    H1,
    H2,
    #[serde(rename = "none")]
    None,
}

/// Verified witness that a Hadamard matrix is balanced splittable with
/// respect to a row subset. `a >= b` always; `kind` distinguishes the
/// equiangular case `b = -a` from Types 1 and 2 (split by `H1*1 = 0` versus
/// `H2*1 = 0`); `k_a` is the per-column count of value-`a` dots when that
/// count is constant; the graph is attached when the associated graph is
/// strongly regular (always, for `b != -a` nontrivial).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BshmCertificate {
    pub n: usize,
    pub ell: usize,
    pub rows: RowSubset,
    pub a: i64,
    pub b: i64,
    pub kind: BshmKind,
    pub k_a: Option<i64>,
    pub graph: Option<SrgParams>,
    pub primitive: Option<bool>,
    pub allones_row: AllOnesLocation,
    pub trivial: bool,
}

impl BshmCertificate {
    pub fn params(&self) -> (i64, i64, i64, i64) {
        (self.n as i64, self.ell as i64, self.a, self.b)
    }

    /// Fixed-field-order JSON (`bshm-cert/1` schema).
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct CertJson<'a> {
            schema: &'static str,
            n: usize,
            ell: usize,
            rows: &'a [usize],
            a: i64,
            b: i64,
            kind: BshmKind,
            k_a: Option<i64>,
            graph: Option<SrgParams>,
            primitive: Option<bool>,
            allones_row: AllOnesLocation,
            trivial: bool,
        }
        serde_json::to_string(&CertJson {
            schema: "bshm-cert/1",
            n: self.n,
            ell: self.ell,
            rows: self.rows.indices(),
            a: self.a,
            b: self.b,
            kind: self.kind,
            k_a: self.k_a,
            graph: self.graph,
            primitive: self.primitive,
            allones_row: self.allones_row,
            trivial: self.trivial,
        })
        .expect("certificate serialization cannot fail")
    }
}

/// Verifies the balanced splittable property of `h` with respect to `rows`
/// and assembles the full certificate.
///
/// Computes all column-pair dots over the subset, requires at most two
/// distinct values, determines the kind, and for `b != -a` requires `k_a`
/// constant and cross-checks the row-sum Type test against the eigenvalue
/// criterion `c(ell,a,b,k_a) in {0, n}`; disagreement between the two routes
/// is an internal error. Trivial subsets (`ell` in `{1, n-1}`) skip graph
/// extraction.
pub fn verify_bshm(h: &PmMatrix, rows: &RowSubset) -> Result<BshmCertificate, BshmError> {
    if !h.is_hadamard() {
        return Err(BshmError::NotHadamard);
    }
    let n = h.n_rows();
    let ell = rows.len();
    if ell == 0 || ell >= n {
        return Err(BshmError::EllOutOfRange { ell, n });
    }
    if rows.host_rows() != n {
        return Err(BshmError::Matrix(MatrixError::BadSubset(
            "subset host size differs from matrix order".into(),
        )));
    }

    // Collect the distinct dot values over all column pairs.
    let mut values: Vec<i64> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = h.column_dot_unchecked(rows, i, j);
            if !values.contains(&d) {
                values.push(d);
                if values.len() > 2 {
                    values.sort_unstable();
                    return Err(BshmError::TooManyValues(values));
                }
            }
        }
    }
    values.sort_unstable();
    let (a, b) = match values.as_slice() {
        [only] => (*only, *only),
        [lo, hi] => (*hi, *lo),
        _ => unreachable!("n >= 2 guarantees at least one column pair"),
    };

    let trivial = ell == 1 || ell == n - 1;
    let degenerate = a == b;

    // Per-column count of value-a dots.
    let mut k_a: Option<i64> = None;
    let mut ka_constant = true;
    if !degenerate {
        let mut first = 0i64;
        for i in 0..n {
            let mut cnt = 0i64;
            for j in 0..n {
                if j != i && h.column_dot_unchecked(rows, i, j) == a {
                    cnt += 1;
                }
            }
            if i == 0 {
                first = cnt;
            } else if cnt != first {
                ka_constant = false;
                if b != -a {
                    return Err(BshmError::InconsistentKa {
                        col: i,
                        got: cnt,
                        expected: first,
                    });
                }
                break;
            }
        }
        if ka_constant {
            k_a = Some(first);
        }
    }

    let kind = if degenerate {
        BshmKind::Degenerate
    } else if b == -a {
        BshmKind::Equiangular
    } else {
        let h1_zero = rows.indices().iter().all(|&s| h.row_sum(s) == 0);
        let h2_zero = (0..n).filter(|&s| !rows.contains(s)).all(|s| h.row_sum(s) == 0);
        // Eigenvalue cross-check: c = ell - b + (a-b) k_a + b n must be 0
        // (Type 1) or n (Type 2); the two derivations must agree.
        let ka = k_a.expect("k_a constant for b != -a");
        let c = ell as i64 - b + (a - b) * ka + b * n as i64;
        assert!(
            c == 0 || c == n as i64,
            "internal: eigenvalue criterion c = {c} outside {{0, {n}}}"
        );
        assert!(
            !(h1_zero && h2_zero),
            "internal: both row blocks sum to zero"
        );
        let by_rowsum = if h1_zero {
            BshmKind::Type1
        } else if h2_zero {
            BshmKind::Type2
        } else {
            panic!("internal: neither row block sums to zero for b != -a");
        };
        let by_eigen = if c == 0 { BshmKind::Type1 } else { BshmKind::Type2 };
        assert_eq!(
            by_rowsum, by_eigen,
            "internal: row-sum and eigenvalue Type tests disagree"
        );
        by_rowsum
    };

    let allones_row = match h.find_all_ones_row() {
        Some(i) if rows.contains(i) => AllOnesLocation::H1,
        Some(_) => AllOnesLocation::H2,
        None => AllOnesLocation::None,
    };

    let (graph, primitive) = if trivial || degenerate {
        (None, None)
    } else {
        let g = associated_graph(h, rows, a);
        match srg_params(&g) {
            Ok(p) => (Some(p), Some(primitivity(&p))),
            Err(e) => {
                // Guaranteed strongly regular when b != -a.
                assert!(
                    matches!(kind, BshmKind::Equiangular),
                    "internal: associated graph of a Type 1/2 instance failed SRG check: {e}"
                );
                (None, None)
            }
        }
    };

    Ok(BshmCertificate {
        n,
        ell,
        rows: rows.clone(),
        a,
        b,
        kind,
        k_a,
        graph,
        primitive,
        allones_row,
        trivial,
    })
}

/// Switching transformation: certificate for the complementary row block.
/// Parameters map `(ell, a, b) -> (n - ell, -a, -b)` (reordered to `a >= b`)
/// and Type 1 and Type 2 swap when `b != -a`. The graph, tracked through the
/// value correspondence `a -> -a`, is unchanged; under the `a >= b`
/// certificate convention that makes the attached graphs complementary.
pub fn switch(h: &PmMatrix, cert: &BshmCertificate) -> Result<BshmCertificate, BshmError> {
    let out = verify_bshm(h, &cert.rows.complement())?;
    debug_assert_eq!(out.ell, cert.n - cert.ell);
    debug_assert_eq!((out.a, out.b), (-cert.b, -cert.a));
    Ok(out)
}

/// Re-certifies with the all-ones row adjoined: `(ell, a, b)` shifts to
/// `(ell+1, a+1, b+1)` and the associated graph is unchanged.
pub fn add_allones_row(h: &PmMatrix, cert: &BshmCertificate) -> Result<BshmCertificate, BshmError> {
    let row = h.find_all_ones_row().ok_or(BshmError::NoAllOnesRow)?;
    if cert.rows.contains(row) {
        return Err(BshmError::NoAllOnesRow);
    }
    let out = verify_bshm(h, &cert.rows.with_row(row)?)?;
    debug_assert_eq!((out.a, out.b), (cert.a + 1, cert.b + 1));
    Ok(out)
}

/// Re-certifies with the all-ones row removed from the subset: `(ell, a, b)`
/// shifts to `(ell-1, a-1, b-1)` and the associated graph is unchanged.
pub fn remove_allones_row(
    h: &PmMatrix,
    cert: &BshmCertificate,
) -> Result<BshmCertificate, BshmError> {
    let row = h.find_all_ones_row().ok_or(BshmError::NoAllOnesRow)?;
    if !cert.rows.contains(row) {
        return Err(BshmError::NoAllOnesRow);
    }
    let out = verify_bshm(h, &cert.rows.without_row(row)?)?;
    debug_assert_eq!((out.a, out.b), (cert.a - 1, cert.b - 1));
    Ok(out)
}

/// Closed-form graph parameters for an equiangular instance in regular form:
/// the pivot row outside the subset gives the offset `c = 0` variant, inside
/// gives `c = n/(2a)`.
pub fn equiangular_graph_params(n: i64, ell: i64, a: i64, pivot_inside: bool) -> SrgParams {
    let base = SrgParams {
        v: n,
        k: ((n - 1) * a - ell) / (2 * a),
        lambda: (n - 4) / 4 + (n - 4 * ell) / (4 * a),
        mu: n * (a - 1) / (4 * a),
    };
    if pivot_inside {
        let c = n / (2 * a);
        SrgParams {
            v: n,
            k: base.k + c,
            lambda: base.lambda + c,
            mu: base.mu + c,
        }
    } else {
        base
    }
}

/// Negates columns by the sign pattern of `pivot_row`, turning that row into
/// the all-ones row. Valid only for equiangular certificates, whose value
/// set `{a, -a}` is closed under column negation. The resulting instance is
/// in regular form and its graph matches the closed-form parameters (offset
/// 0 for a pivot outside the subset, `n/(2a)` inside).
pub fn to_regular_form(
    h: &PmMatrix,
    cert: &BshmCertificate,
    pivot_row: usize,
) -> Result<PmMatrix, BshmError> {
    if cert.kind != BshmKind::Equiangular {
        return Err(BshmError::KindMismatch {
            expected: "equiangular",
            got: cert.kind.as_str().into(),
        });
    }
    if pivot_row >= h.n_rows() {
        return Err(BshmError::Matrix(MatrixError::IndexOutOfRange {
            what: "row",
            index: pivot_row,
            size: h.n_rows(),
        }));
    }
    let out = h.negate_columns(|j| h.entry(pivot_row, j) == -1);
    let check = verify_bshm(&out, &cert.rows)?;
    assert_eq!(
        (check.a, check.b),
        (cert.a, cert.b),
        "internal: column negation must preserve the equiangular value set"
    );
    if !check.trivial {
        let expect = equiangular_graph_params(
            cert.n as i64,
            cert.ell as i64,
            cert.a,
            cert.rows.contains(pivot_row),
        );
        assert_eq!(
            check.graph,
            Some(expect),
            "internal: regular-form graph differs from the closed form"
        );
    }
    Ok(out)
}

/// Extracts the unbiased Hadamard mate `L = (H1^T H1 - H2^T H2) / (2a)` of
/// an equiangular instance with `(n, ell) = (4a^2, 2a^2 +- a)`; verifies `L`
/// is Hadamard and that every entry of `H L^T` is `+-2a`.
pub fn extract_unbiased_mate(
    h: &PmMatrix,
    cert: &BshmCertificate,
) -> Result<PmMatrix, BshmError> {
    if cert.b != -cert.a || cert.a <= 0 {
        return Err(BshmError::KindMismatch {
            expected: "equiangular",
            got: cert.kind.as_str().into(),
        });
    }
    let (n, ell, a) = (cert.n as i64, cert.ell as i64, cert.a);
    if n != 4 * a * a || (ell != 2 * a * a - a && ell != 2 * a * a + a) {
        return Err(BshmError::ParamMismatch { n, ell, a });
    }
    // H2^T H2 = nI - H1^T H1, so L = (2 H1^T H1 - nI) / (2a); the diagonal
    // is (2 ell - n) / (2a) = +-1 and off-diagonal entries are +-1.
    let two_a = 2 * a;
    let diag = (2 * ell - n) / two_a;
    let l = PmMatrix::from_fn(cert.n, cert.n, |i, j| {
        let e = if i == j {
            diag
        } else {
            2 * h.column_dot_unchecked(&cert.rows, i, j) / two_a
        };
        e == -1
    })?;
    if !l.is_hadamard() {
        return Err(BshmError::NotUnbiased);
    }
    for i in 0..cert.n {
        for j in 0..cert.n {
            let dot: i64 = {
                let disagree: u32 = h
                    .row_words(i)
                    .iter()
                    .zip(l.row_words(j))
                    .map(|(x, y)| (x ^ y).count_ones())
                    .sum();
                n - 2 * disagree as i64
            };
            if dot.abs() != two_a {
                return Err(BshmError::NotUnbiased);
            }
        }
    }
    Ok(l)
}

/// Pairwise balanced design extracted from a Type 1 instance.
#[derive(Clone, Debug, Serialize)]
pub struct PbdReport {
    pub points: usize,
    pub block_count: usize,
    /// Every point pair lies in exactly this many blocks (`n/4`).
    pub pair_coverage: i64,
    /// The two admissible block sizes `{(ell-a)/2, (ell-b)/2}`.
    pub admissible_sizes: [i64; 2],
    /// Distinct block sizes actually attained.
    pub block_sizes: Vec<i64>,
    /// Distinct pairwise block intersection sizes actually attained.
    pub intersection_sizes: Vec<i64>,
    /// Blocks as sorted point lists, one per non-leading column.
    pub blocks: Vec<Vec<usize>>,
}

/// Writes `H1` (rows negated so column 0 is all-ones) as `(1 | J - 2X)` and
/// verifies that `X` is the incidence matrix of a pairwise balanced design:
/// block sizes in `{(ell-a)/2, (ell-b)/2}`, every point pair covered `n/4`
/// times, and pairwise block intersections confined to the four admissible
/// sizes.
pub fn extract_pbd(h: &PmMatrix, cert: &BshmCertificate) -> Result<PbdReport, BshmError> {
    if cert.kind != BshmKind::Type1 {
        return Err(BshmError::NotType1);
    }
    let (n, ell, a, b) = (cert.n as i64, cert.ell as i64, cert.a, cert.b);
    let idx = cert.rows.indices();
    // Row negation leaves column dots unchanged; flip rows with -1 in
    // column 0 so the first column reads all-ones.
    let sign: Vec<i64> = idx.iter().map(|&s| h.entry(s, 0) as i64).collect();

    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(cert.n - 1);
    for col in 1..cert.n {
        let block: Vec<usize> = idx
            .iter()
            .enumerate()
            .filter(|&(p, &s)| sign[p] * h.entry(s, col) as i64 == -1)
            .map(|(p, _)| p)
            .collect();
        blocks.push(block);
    }

    let admissible_sizes = [(ell - a) / 2, (ell - b) / 2];
    let mut block_sizes: Vec<i64> = Vec::new();
    for (q, block) in blocks.iter().enumerate() {
        let size = block.len() as i64;
        if !admissible_sizes.contains(&size) {
            return Err(BshmError::StructureViolation(format!(
                "block {q} has size {size}, admissible sizes {admissible_sizes:?}"
            )));
        }
        if !block_sizes.contains(&size) {
            block_sizes.push(size);
        }
    }
    block_sizes.sort_unstable();

    // Pair coverage n/4.
    let pair_coverage = n / 4;
    let ell_usize = cert.ell;
    for p in 0..ell_usize {
        for q in (p + 1)..ell_usize {
            let cover = blocks
                .iter()
                .filter(|b| b.contains(&p) && b.contains(&q))
                .count() as i64;
            if cover != pair_coverage {
                return Err(BshmError::StructureViolation(format!(
                    "point pair ({p}, {q}) lies in {cover} blocks, expected {pair_coverage}"
                )));
            }
        }
    }

    // Pairwise block intersections.
    let admissible_intersections = [
        (ell - a) / 4,
        (ell - b) / 4,
        (ell + a - 2 * b) / 4,
        (ell + b - 2 * a) / 4,
    ];
    let mut intersection_sizes: Vec<i64> = Vec::new();
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            let inter = blocks[i].iter().filter(|p| blocks[j].contains(p)).count() as i64;
            if !admissible_intersections.contains(&inter) {
                return Err(BshmError::StructureViolation(format!(
                    "blocks {i} and {j} intersect in {inter} points, admissible {admissible_intersections:?}"
                )));
            }
            if !intersection_sizes.contains(&inter) {
                intersection_sizes.push(inter);
            }
        }
    }
    intersection_sizes.sort_unstable();

    Ok(PbdReport {
        points: cert.ell,
        block_count: cert.n - 1,
        pair_coverage,
        admissible_sizes,
        block_sizes,
        intersection_sizes,
        blocks,
    })
}

/// Decomposition of an imprimitive instance into repeated column classes.
pub struct StructureDecomposition {
    /// Column permutation placing identical-column classes contiguously;
    /// position `p` of the reordered matrix holds original column `perm[p]`.
    pub permutation: Vec<usize>,
    /// Distinct column representatives: an order-`4s` Hadamard matrix for
    /// the `(8rs, 4s, 4s, 0)` form, or a `(4s-1) x 4s` matrix whose
    /// extension by the all-ones row is Hadamard for `(4rs, 4s-1, 4s-1, -1)`.
    pub repeated: PmMatrix,
    /// Class multiplicity (`2r`, respectively `r`).
    pub multiplicity: usize,
}

/// Groups identical columns of `H1` (for certificates `(n, 4s, 4s, 0)`), or
/// of `(1^T over H1)` (for `(n, 4s-1, 4s-1, -1)`), into classes. The classes
/// must be uniform in size and their representatives must form the
/// order-`4s` Hadamard matrix the structure theory promises.
pub fn structure_decompose(
    h: &PmMatrix,
    cert: &BshmCertificate,
) -> Result<StructureDecomposition, BshmError> {
    let with_ones = if cert.a == cert.ell as i64 && cert.b == 0 {
        false
    } else if cert.a == cert.ell as i64 && cert.b == -1 {
        true
    } else {
        return Err(BshmError::StructureViolation(format!(
            "certificate ({}, {}, {}, {}) is not of an imprimitive form",
            cert.n, cert.ell, cert.a, cert.b
        )));
    };
    let block = if with_ones { cert.ell + 1 } else { cert.ell };
    if block % 4 != 0 || cert.n % block != 0 {
        return Err(BshmError::StructureViolation(format!(
            "block size {block} does not divide the order {}",
            cert.n
        )));
    }

    // Key of a column: its restriction to the subset rows. Prepending the
    // all-ones row never separates columns, so the same key works for both
    // forms.
    let key = |j: usize| -> Vec<i32> {
        cert.rows.indices().iter().map(|&s| h.entry(s, j)).collect()
    };
    let mut reps: Vec<(Vec<i32>, Vec<usize>)> = Vec::new();
    for j in 0..cert.n {
        let k = key(j);
        match reps.iter_mut().find(|(rk, _)| *rk == k) {
            Some((_, cols)) => cols.push(j),
            None => reps.push((k, vec![j])),
        }
    }
    if reps.len() != block {
        return Err(BshmError::StructureViolation(format!(
            "{} distinct column classes, expected {block}",
            reps.len()
        )));
    }
    let multiplicity = cert.n / block;
    for (_, cols) in &reps {
        if cols.len() != multiplicity {
            return Err(BshmError::StructureViolation(format!(
                "class size {} is not the uniform multiplicity {multiplicity}",
                cols.len()
            )));
        }
    }

    let permutation: Vec<usize> = reps.iter().flat_map(|(_, cols)| cols.clone()).collect();
    let repeated = PmMatrix::from_fn(cert.ell, block, |i, c| reps[c].0[i] == -1)?;
    let check = if with_ones {
        let mut rows: Vec<Vec<i32>> = vec![vec![1; block]];
        for i in 0..cert.ell {
            rows.push((0..block).map(|c| reps[c].0[i]).collect());
        }
        PmMatrix::from_rows(&rows)?
    } else {
        repeated.clone()
    };
    if !check.is_hadamard() {
        return Err(BshmError::StructureViolation(
            "column class representatives are not a Hadamard matrix".into(),
        ));
    }
    Ok(StructureDecomposition {
        permutation,
        repeated,
        multiplicity,
    })
}

/// Eigenvector checks for `H1^T H1`: every row of `H1`, viewed as a vector
/// in R^n, is an eigenvector with eigenvalue `n`, and every row of `H2` one
/// with eigenvalue 0. Exact integer arithmetic.
pub fn eigenvalue_check(h: &PmMatrix, rows: &RowSubset) -> bool {
    let n = h.n_cols();
    let apply = |x: &[i64]| -> Vec<i64> {
        // H1^T (H1 x)
        let hx: Vec<i64> = rows
            .indices()
            .iter()
            .map(|&s| (0..n).map(|j| h.entry(s, j) as i64 * x[j]).sum())
            .collect();
        (0..n)
            .map(|j| {
                rows.indices()
                    .iter()
                    .zip(&hx)
                    .map(|(&s, &v)| h.entry(s, j) as i64 * v)
                    .sum()
            })
            .collect()
    };
    for s in 0..h.n_rows() {
        let x: Vec<i64> = (0..n).map(|j| h.entry(s, j) as i64).collect();
        let y = apply(&x);
        let expect = if rows.contains(s) { n as i64 } else { 0 };
        if !y.iter().zip(&x).all(|(&yi, &xi)| yi == expect * xi) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        bent_difference_set, construct_n_2_2_0, pds_to_bshm, spread_union_pds, sylvester,
    };
    use crate::z2::character_table;

    fn bent16() -> (PmMatrix, BshmCertificate) {
        let d = bent_difference_set(2).unwrap();
        pds_to_bshm(&d).unwrap()
    }

    #[test]
    fn verify_difference_set_instance() {
        let h = character_table(4).unwrap();
        let rows = RowSubset::new(16, &[1, 2, 3, 4, 8, 12]).unwrap();
        let cert = verify_bshm(&h, &rows).unwrap();
        assert_eq!(cert.params(), (16, 6, 2, -2));
        assert_eq!(cert.kind, BshmKind::Equiangular);
        assert_eq!(cert.graph, Some(SrgParams::new(16, 6, 2, 2)));
        assert_eq!(cert.allones_row, AllOnesLocation::H2);
        assert_eq!(cert.primitive, Some(true));
    }

    #[test]
    fn verify_two_row_instance() {
        let h = sylvester(3).unwrap().normalize_first_row();
        let rows = RowSubset::new(8, &[0, 1]).unwrap();
        let cert = verify_bshm(&h, &rows).unwrap();
        assert_eq!(cert.params(), (8, 2, 2, 0));
        assert_eq!(cert.kind, BshmKind::Type2);
        // graph is 2K4
        assert_eq!(cert.graph, Some(SrgParams::new(8, 3, 2, 0)));
        assert_eq!(cert.primitive, Some(false));
    }

    #[test]
    fn verify_spread_union_instance() {
        let d = spread_union_pds(3, 2, None).unwrap();
        let (h, cert) = pds_to_bshm(&d).unwrap();
        assert_eq!(cert.params(), (64, 14, 6, -2));
        assert_eq!(cert.kind, BshmKind::Type1);
        assert_eq!(cert.k_a, Some(14));
        assert_eq!(cert.graph, Some(SrgParams::new(64, 14, 6, 2)));
        assert!(eigenvalue_check(&h, &cert.rows));
    }

    #[test]
    fn three_values_rejected() {
        let h = sylvester(3).unwrap();
        let rows = RowSubset::new(8, &[1, 2, 4]).unwrap();
        assert!(matches!(
            verify_bshm(&h, &rows),
            Err(BshmError::TooManyValues(_))
        ));
    }

    #[test]
    fn non_hadamard_rejected() {
        let m = PmMatrix::all_plus(4, 4).unwrap();
        let rows = RowSubset::new(4, &[0]).unwrap();
        assert_eq!(verify_bshm(&m, &rows), Err(BshmError::NotHadamard));
    }

    #[test]
    fn trivial_single_row() {
        let h = sylvester(2).unwrap();
        let cert = verify_bshm(&h, &RowSubset::new(4, &[1]).unwrap()).unwrap();
        assert!(cert.trivial);
        assert_eq!(cert.kind, BshmKind::Equiangular); // values {1, -1}
        assert!(cert.graph.is_none());
        let cert0 = verify_bshm(&h, &RowSubset::new(4, &[0]).unwrap()).unwrap();
        assert_eq!(cert0.kind, BshmKind::Degenerate); // all dots are 1
        assert_eq!((cert0.a, cert0.b), (1, 1));
    }

    #[test]
    fn graph_complement_swap() {
        let (h, cert) = bent16();
        let ga = associated_graph(&h, &cert.rows, cert.a);
        let gb = associated_graph(&h, &cert.rows, cert.b);
        assert_eq!(ga.complement(), gb);
    }

    #[test]
    fn srg_params_examples() {
        let g = Graph::disjoint_cliques(12, 4);
        assert_eq!(srg_params(&g).unwrap(), SrgParams::new(48, 3, 2, 0));
        assert!(!primitivity(&SrgParams::new(48, 3, 2, 0)));
        assert!(primitivity(&SrgParams::new(16, 6, 2, 2)));
        assert!(primitivity(&SrgParams::new(64, 21, 8, 6)));

        // flip one edge of 3K4: lambda stops being constant
        let mut bad = Graph::disjoint_cliques(3, 4);
        bad.add_edge(0, 4);
        assert!(matches!(
            srg_params(&bad),
            Err(GraphError::NotRegular { .. }) | Err(GraphError::NotStronglyRegular { .. })
        ));
    }

    #[test]
    fn switch_maps_parameters_and_type() {
        let d = spread_union_pds(3, 2, None).unwrap();
        let (h, cert) = pds_to_bshm(&d).unwrap();
        let sw = switch(&h, &cert).unwrap();
        assert_eq!(sw.params(), (64, 50, 2, -6));
        assert_eq!(sw.kind, BshmKind::Type2);
        // value-tracked graph invariance: dot = a on rows iff dot = -a on
        // the complement
        let g1 = associated_graph(&h, &cert.rows, cert.a);
        let g2 = associated_graph(&h, &sw.rows, -cert.a);
        assert_eq!(g1, g2);
        // under the a >= b convention the attached graphs are complements
        assert_eq!(sw.graph, Some(cert.graph.unwrap().complement()));
        let back = switch(&h, &sw).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn switch_equiangular() {
        let (h, cert) = bent16();
        let sw = switch(&h, &cert).unwrap();
        assert_eq!(sw.params(), (16, 10, 2, -2));
        assert_eq!(sw.kind, BshmKind::Equiangular);
        assert_eq!(switch(&h, &sw).unwrap(), cert);
    }

    #[test]
    fn allones_row_shifts() {
        let (h, cert) = bent16();
        let up = add_allones_row(&h, &cert).unwrap();
        assert_eq!(up.params(), (16, 7, 3, -1));
        assert_eq!(up.kind, BshmKind::Type2);
        assert_eq!(up.graph, cert.graph);
        let back = remove_allones_row(&h, &up).unwrap();
        assert_eq!(back, cert);

        // regular-form transform with the pivot inside the subset, then
        // remove the all-ones row: Type 1 (16, 5, 1, -3)
        let pivot = cert.rows.indices()[0];
        let reg = to_regular_form(&h, &cert, pivot).unwrap();
        let reg_cert = verify_bshm(&reg, &cert.rows).unwrap();
        let down = remove_allones_row(&reg, &reg_cert).unwrap();
        assert_eq!(down.params(), (16, 5, 1, -3));
        assert_eq!(down.kind, BshmKind::Type1);
        assert_eq!(down.graph, Some(SrgParams::new(16, 10, 6, 6)));
    }

    #[test]
    fn regular_form_graphs() {
        let (h, cert) = bent16();
        // pivot outside the subset: offset-0 parameters
        let outside = (0..16).find(|&i| !cert.rows.contains(i)).unwrap();
        let reg = to_regular_form(&h, &cert, outside).unwrap();
        let c1 = verify_bshm(&reg, &cert.rows).unwrap();
        assert_eq!(c1.graph, Some(SrgParams::new(16, 6, 2, 2)));
        // pivot inside: offset n/(2a)
        let inside = cert.rows.indices()[0];
        let reg2 = to_regular_form(&h, &cert, inside).unwrap();
        let c2 = verify_bshm(&reg2, &cert.rows).unwrap();
        assert_eq!(c2.graph, Some(SrgParams::new(16, 10, 6, 6)));

        let bad = verify_bshm(&h, &RowSubset::new(16, &[0, 1]).unwrap()).unwrap();
        assert!(matches!(
            to_regular_form(&h, &bad, 0),
            Err(BshmError::KindMismatch { .. })
        ));
    }

    #[test]
    fn unbiased_mate_16() {
        let (h, cert) = bent16();
        let l = extract_unbiased_mate(&h, &cert).unwrap();
        assert!(l.is_hadamard());
        // direct multiplication oracle
        for i in 0..16 {
            for j in 0..16 {
                let dot: i64 = (0..16)
                    .map(|k| (h.entry(i, k) * l.entry(j, k)) as i64)
                    .sum();
                assert_eq!(dot.abs(), 4);
            }
        }
    }

    #[test]
    fn unbiased_mate_param_guard() {
        // (4, 1, 1, -1) trivial equiangular: n = 4 != 4a^2 = 4 with a = 1
        // but ell = 1 is not 2a^2 +- a = 1 or 3 ... a=1: 2-1=1 matches.
        // Use the (16, 2, 2, 0) instance instead: b != -a rejected.
        let h = sylvester(4).unwrap();
        let cert = verify_bshm(&h, &RowSubset::new(16, &[0, 1]).unwrap()).unwrap();
        assert!(matches!(
            extract_unbiased_mate(&h, &cert),
            Err(BshmError::KindMismatch { .. })
        ));
        // equiangular with parameters failing (n, ell) = (4a^2, 2a^2 +- a):
        // switch of the bent instance has ell = 10 = 2a^2 + a, which is
        // admissible; instead take a 6-subset union from the m = 2 packing
        // with ell = 12, a = 0? Not equiangular. Synthesize the guard check
        // directly on a trivial instance of order 8.
        let h8 = sylvester(3).unwrap();
        let c8 = verify_bshm(&h8, &RowSubset::new(8, &[1]).unwrap()).unwrap();
        assert_eq!((c8.a, c8.b), (1, -1));
        assert!(matches!(
            extract_unbiased_mate(&h8, &c8),
            Err(BshmError::ParamMismatch { .. })
        ));
    }

    #[test]
    fn pbd_from_16_5_1_m3() {
        let (h, cert) = bent16();
        let pivot = cert.rows.indices()[0];
        let reg = to_regular_form(&h, &cert, pivot).unwrap();
        let reg_cert = verify_bshm(&reg, &cert.rows).unwrap();
        let t1 = remove_allones_row(&reg, &reg_cert).unwrap();
        assert_eq!(t1.params(), (16, 5, 1, -3));
        let pbd = extract_pbd(&reg, &t1).unwrap();
        assert_eq!(pbd.points, 5);
        assert_eq!(pbd.block_count, 15);
        assert_eq!(pbd.pair_coverage, 4);
        assert_eq!(pbd.block_sizes, vec![2, 4]);
    }

    #[test]
    fn pbd_from_spread_union() {
        let d = spread_union_pds(3, 2, None).unwrap();
        let (h, cert) = pds_to_bshm(&d).unwrap();
        let pbd = extract_pbd(&h, &cert).unwrap();
        assert_eq!(pbd.points, 14);
        assert_eq!(pbd.pair_coverage, 16);
        assert_eq!(pbd.admissible_sizes, [4, 8]);
        assert_eq!(pbd.block_sizes, vec![4, 8]);
    }

    #[test]
    fn pbd_requires_type1() {
        let (h, cert) = bent16();
        let up = add_allones_row(&h, &cert).unwrap(); // type2
        assert_eq!(extract_pbd(&h, &up).unwrap_err(), BshmError::NotType1);
    }

    #[test]
    fn structure_decompose_twin_layer() {
        // (16, 4, 4, 0) block of the Sylvester order-16 matrix
        let h = character_table(4).unwrap();
        let line = crate::z2::spread_lines(2).unwrap()[0].clone();
        let rows: Vec<usize> = line
            .elements()
            .iter()
            .copied()
            .filter(|&e| e != 0)
            .map(|e| e as usize)
            .collect();
        let mut with_id = rows.clone();
        with_id.push(0);
        let cert = verify_bshm(&h, &RowSubset::new(16, &with_id).unwrap()).unwrap();
        assert_eq!(cert.params(), (16, 4, 4, 0));
        let dec = structure_decompose(&h, &cert).unwrap();
        assert_eq!(dec.multiplicity, 4);
        assert_eq!(dec.repeated.n_cols(), 4);
        assert!(dec.repeated.is_hadamard());

        // reordering by the permutation makes H1 literally (L L L L)
        let perm = h.permute_columns(&dec.permutation).unwrap();
        for (p, _) in dec.permutation.iter().enumerate() {
            for (ri, &s) in cert.rows.indices().iter().enumerate() {
                assert_eq!(perm.entry(s, p), dec.repeated.entry(ri, p / 4));
            }
        }
    }

    #[test]
    fn structure_decompose_rejects_primitive() {
        let (h, cert) = bent16();
        assert!(matches!(
            structure_decompose(&h, &cert),
            Err(BshmError::StructureViolation(_))
        ));
    }

    #[test]
    fn n_2_2_0_has_clique_graph() {
        let h = sylvester(3).unwrap();
        let (hh, cert) = construct_n_2_2_0(&h).unwrap();
        assert_eq!(cert.params(), (8, 2, 2, 0));
        let g = associated_graph(&hh, &cert.rows, 2);
        let p = srg_params(&g).unwrap();
        assert_eq!(p, SrgParams::new(8, 3, 2, 0)); // 2K4
    }

    #[test]
    fn certificate_json_shape() {
        let (_, cert) = bent16();
        let json = cert.to_json();
        assert!(json.starts_with(r#"{"schema":"bshm-cert/1","n":16,"ell":6,"rows":[5,7,10,11,13,14],"a":2,"b":-2,"kind":"equiangular","k_a":6,"#));
        assert!(json.contains(r#""graph":{"v":16,"k":6,"lambda":2,"mu":2}"#));
        assert!(json.contains(r#""allones_row":"H2","trivial":false}"#));
    }

    #[test]
    fn mod4_invariants_on_instances() {
        let d = spread_union_pds(3, 3, None).unwrap();
        let (_, cert) = pds_to_bshm(&d).unwrap();
        assert_eq!(cert.params(), (64, 21, 5, -3));
        let (n, ell, a, b) = cert.params();
        assert!(2 < ell && ell < n - 2);
        assert_eq!(ell.rem_euclid(4), a.rem_euclid(4));
        assert_eq!(ell.rem_euclid(4), b.rem_euclid(4));
        assert_eq!(ell.rem_euclid(2), a.rem_euclid(2));
    }
}
