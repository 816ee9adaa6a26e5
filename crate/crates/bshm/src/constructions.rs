//! Explicit generators. Every construction re-verifies its output through
//! [`verify_bshm`] before returning it.

use crate::bshm::{
    add_allones_row, structure_decompose, verify_bshm, BshmCertificate, BshmError, BshmKind,
};
use crate::pds::{verify_pds_char, PdsError};
use crate::pm_matrix::{MatrixError, PmMatrix, RowSubset};
use crate::z2::{character_table, spread_lines, Z2Error, Z2Subset};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("rank/degree {0} out of range")]
    OutOfRange(u32),
    #[error("unsupported q = {0}: {1}")]
    UnsupportedQ(u64, &'static str),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("certificate mismatch: expected {expected}, got ({got_n}, {got_ell}, {got_a}, {got_b})")]
    CertMismatch {
        expected: &'static str,
        got_n: i64,
        got_ell: i64,
        got_a: i64,
        got_b: i64,
    },
    #[error("input matrix is not Hadamard")]
    NotHadamard,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Z2(#[from] Z2Error),
    #[error(transparent)]
    Pds(#[from] PdsError),
    #[error(transparent)]
    Bshm(#[from] BshmError),
}

/// Sylvester matrix of order `2^r`, built by the Kronecker recursion.
/// Bit-exactly equal to `character_table(r)`.
pub fn sylvester(r: u32) -> Result<PmMatrix, ConstructionError> {
    if r > 14 {
        return Err(ConstructionError::OutOfRange(r));
    }
    let s1 = PmMatrix::from_rows(&[vec![1, 1], vec![1, -1]])?;
    let mut out = PmMatrix::all_plus(1, 1)?;
    for _ in 0..r {
        out = s1.kronecker(&out)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PaleyKind {
    /// Order `q + 1`, skew-type, for prime powers `q = 3 (mod 4)`.
    I,
    /// Order `2(q + 1)` for prime powers `q = 1 (mod 4)`.
    II,
}

/// Arithmetic in GF(q) for an odd prime power `q = p^k`; elements are
/// indexed by their base-`p` digit vectors.
struct OddPrimePowerField {
    p: u64,
    k: u32,
    q: u64,
    /// Monic irreducible of degree k as base-p digits (index = degree),
    /// only used for k > 1.
    modulus: Vec<u64>,
}

impl OddPrimePowerField {
    fn new(q: u64) -> Result<Self, ConstructionError> {
        if q < 3 || q % 2 == 0 || q > 1 << 13 {
            return Err(ConstructionError::UnsupportedQ(
                q,
                "need an odd prime power between 3 and 2^13",
            ));
        }
        let mut p = 0;
        for cand in 3..=q {
            if q % cand == 0 {
                p = cand;
                break;
            }
        }
        let mut k = 0;
        let mut rest = q;
        while rest > 1 {
            if rest % p != 0 {
                return Err(ConstructionError::UnsupportedQ(q, "not a prime power"));
            }
            rest /= p;
            k += 1;
        }
        // primality of p: p has no divisor up to sqrt by construction of the
        // smallest factor, so p is prime.
        let modulus = if k > 1 {
            Self::find_irreducible(p, k)
        } else {
            vec![]
        };
        Ok(OddPrimePowerField { p, k, q, modulus })
    }

    /// Smallest monic irreducible of degree k over GF(p), by sieving out
    /// every product of lower-degree monic polynomials.
    fn find_irreducible(p: u64, k: u32) -> Vec<u64> {
        let size = p.pow(k) as usize; // candidates indexed by low digits
        let mut reducible = vec![false; size];
        // all monic polys of degree d are indexed by their p^d low digits
        for d1 in 1..k {
            let d2 = k - d1;
            if d1 > d2 {
                break;
            }
            for a in 0..p.pow(d1) {
                for b in 0..p.pow(d2) {
                    let fa = Self::decode(a, d1, p);
                    let fb = Self::decode(b, d2, p);
                    let prod = Self::poly_mul(&fa, &fb, p);
                    reducible[Self::encode_low(&prod, k, p) as usize] = true;
                }
            }
        }
        for low in 0..size as u64 {
            if !reducible[low as usize] {
                let mut f = Self::decode(low, k, p);
                f.truncate(k as usize);
                f.push(1);
                return f;
            }
        }
        unreachable!("irreducible polynomials of every degree exist")
    }

    /// Digits of a monic polynomial of degree d from its low-digit index.
    fn decode(low: u64, d: u32, p: u64) -> Vec<u64> {
        let mut digits = Vec::with_capacity(d as usize + 1);
        let mut v = low;
        for _ in 0..d {
            digits.push(v % p);
            v /= p;
        }
        digits.push(1);
        digits
    }

    fn encode_low(poly: &[u64], k: u32, p: u64) -> u64 {
        let mut v = 0;
        for i in (0..k as usize).rev() {
            v = v * p + poly.get(i).copied().unwrap_or(0);
        }
        v
    }

    fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }

    fn digits(&self, e: u64) -> Vec<u64> {
        let mut v = e;
        (0..self.k)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    fn from_digits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        let da = self.digits(a);
        let db = self.digits(b);
        let diff: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        self.from_digits(&diff)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return a * b % self.p;
        }
        let prod = Self::poly_mul(&self.digits(a), &self.digits(b), self.p);
        // reduce modulo the monic irreducible
        let mut rem = prod;
        let deg_m = self.k as usize;
        while rem.len() > deg_m {
            let lead = rem.len() - 1;
            let coeff = rem[lead];
            if coeff != 0 {
                for (i, &m) in self.modulus.iter().enumerate() {
                    let idx = lead - deg_m + i;
                    rem[idx] = (rem[idx] + coeff * (self.p - m % self.p)) % self.p;
                }
            }
            rem.pop();
        }
        self.from_digits(&rem)
    }

    /// Quadratic character: 0 at zero, +1 on nonzero squares, -1 otherwise.
    fn chi_table(&self) -> Vec<i32> {
        let mut chi = vec![-1i32; self.q as usize];
        chi[0] = 0;
        for x in 1..self.q {
            chi[self.mul(x, x) as usize] = 1;
        }
        chi
    }
}

/// Paley Hadamard matrix: kind I of order `q + 1` for `q = 3 (mod 4)`
/// (skew-type, `H = C + I` with antisymmetric `C`), kind II of order
/// `2(q + 1)` for `q = 1 (mod 4)`.
pub fn paley_hadamard(q: u64, kind: PaleyKind) -> Result<PmMatrix, ConstructionError> {
    let field = OddPrimePowerField::new(q)?;
    let chi = field.chi_table();
    let m = q as usize + 1;
    // core[i][j] over indices {0 = infinity, 1..q = field elements}
    let core = |i: usize, j: usize| -> i32 {
        if i == j {
            0
        } else if i == 0 {
            1
        } else if j == 0 {
            if q % 4 == 3 {
                -1
            } else {
                1
            }
        } else {
            chi[field.sub(i as u64 - 1, j as u64 - 1) as usize]
        }
    };
    match kind {
        PaleyKind::I => {
            if q % 4 != 3 {
                return Err(ConstructionError::UnsupportedQ(q, "kind I needs q = 3 (mod 4)"));
            }
            let h = PmMatrix::from_fn(m, m, |i, j| {
                let e = if i == j { 1 } else { core(i, j) };
                e == -1
            })?;
            if !h.is_hadamard() {
                return Err(ConstructionError::NotHadamard);
            }
            Ok(h)
        }
        PaleyKind::II => {
            if q % 4 != 1 {
                return Err(ConstructionError::UnsupportedQ(q, "kind II needs q = 1 (mod 4)"));
            }
            // S symmetric; H = S (x) [[1,1],[1,-1]] + I (x) [[1,-1],[-1,-1]]
            let h = PmMatrix::from_fn(2 * m, 2 * m, |i, j| {
                let (bi, si) = (i / 2, i % 2);
                let (bj, sj) = (j / 2, j % 2);
                let s = core(bi, bj);
                let e = if bi == bj {
                    match (si, sj) {
                        (0, 0) => 1,
                        (1, 1) => -1,
                        _ => -1,
                    }
                } else if (si, sj) == (1, 1) {
                    -s
                } else {
                    s
                };
                e == -1
            })?;
            if !h.is_hadamard() {
                return Err(ConstructionError::NotHadamard);
            }
            Ok(h)
        }
    }
}

/// Support of the inner-product bent function on `Z_2^{2m}`: elements
/// `(x, y)` with `x . y` odd, encoded as `(x << m) | y`. The support has
/// size `2^{m-1}(2^m - 1)`, omits 0, and its nonprincipal character sums are
/// exactly `+-2^{m-1}`.
pub fn bent_difference_set(m: u32) -> Result<Z2Subset, ConstructionError> {
    if m < 2 || m > 7 {
        return Err(ConstructionError::OutOfRange(m));
    }
    let mask = (1u64 << m) - 1;
    let elems: Vec<u64> = (0..1u64 << (2 * m))
        .filter(|g| ((g >> m) & g & mask).count_ones() % 2 == 1)
        .collect();
    let d = Z2Subset::from_elements(2 * m, &elems)?;
    debug_assert_eq!(d.len(), (1 << (2 * m - 1)) - (1 << (m - 1)));
    verify_pds_char(&d)?;
    Ok(d)
}

/// Union of `s` spread lines of `Z_2^{2m}` minus the identity: a partial
/// difference set of size `s(2^m - 1)` with character sums in
/// `{2^m - s, -s}`. Lines default to the first `s` in spread order; `which`
/// overrides the selection.
pub fn spread_union_pds(
    m: u32,
    s: usize,
    which: Option<&[usize]>,
) -> Result<Z2Subset, ConstructionError> {
    let lines = spread_lines(m)?;
    if s == 0 || s > lines.len() {
        return Err(ConstructionError::OutOfRange(s as u32));
    }
    let default: Vec<usize> = (0..s).collect();
    let pick = which.unwrap_or(&default);
    if pick.len() != s {
        return Err(ConstructionError::InvalidPartition(format!(
            "{} line indices for s = {s}",
            pick.len()
        )));
    }
    let mut union = Z2Subset::empty(2 * m)?;
    let mut seen = vec![false; lines.len()];
    for &i in pick {
        if i >= lines.len() || seen[i] {
            return Err(ConstructionError::InvalidPartition(format!(
                "line index {i} out of range or repeated"
            )));
        }
        seen[i] = true;
        union = union.union(&lines[i])?;
    }
    let d = union.without_identity()?;
    verify_pds_char(&d)?;
    Ok(d)
}

/// Character table of `Z_2^r` certified with respect to the rows indexed by
/// a partial difference set: parameters `(2^r, |D|, a, b)` where `a, b` are
/// the character sum values; Type 1 when the identity lies outside `D`,
/// Type 2 when inside (for `b != -a`).
pub fn pds_to_bshm(d: &Z2Subset) -> Result<(PmMatrix, BshmCertificate), ConstructionError> {
    let params = verify_pds_char(d)?;
    let h = character_table(d.rank())?;
    let rows: Vec<usize> = d.elements().iter().map(|&e| e as usize).collect();
    let cert = verify_bshm(&h, &RowSubset::new(h.n_rows(), &rows)?)?;
    assert_eq!(
        (cert.a, cert.b),
        (params.a, params.b),
        "certificate values must match the character sums"
    );
    if cert.a != -cert.b && !cert.trivial {
        let expected = if d.contains_identity() {
            BshmKind::Type2
        } else {
            BshmKind::Type1
        };
        assert_eq!(cert.kind, expected, "Type split follows identity membership");
    }
    Ok((h, cert))
}

/// A Hadamard matrix row-decomposed into the all-ones row plus blocks, each
/// block certified, and every union of blocks certified as well.
pub struct MultiBshm {
    pub matrix: PmMatrix,
    /// Half-open row ranges of the blocks, in order; row 0 is the all-ones
    /// row and belongs to the `with_ones` block.
    pub block_ranges: Vec<(usize, usize)>,
    /// Index of the block certified together with the all-ones row.
    pub with_ones: usize,
    pub block_certs: Vec<BshmCertificate>,
    /// Certificates for every nonempty union of blocks (the union including
    /// `with_ones` also includes row 0), keyed by block-index set. The union
    /// of all blocks together with the all-ones row is the whole matrix and
    /// is skipped. Computed when the number of blocks is at most
    /// [`MultiBshm::UNION_LIMIT`].
    pub union_certs: Vec<(Vec<usize>, BshmCertificate)>,
}

impl MultiBshm {
    pub const UNION_LIMIT: usize = 10;
}

/// Builds the spread-packing row decomposition of the order-`2^{2m}`
/// character table: blocks `H_u` stack the spread lines listed in
/// `partition[u]` (1-based line indices, identities removed), and block `j`
/// (1-based) is certified together with the all-ones row. Block `u` carries
/// parameters `(2^{2m}, (2^m - 1)|I_u|, -|I_u|, 2^m - |I_u|)`, with all
/// three shifted by one when joined with the all-ones row.
pub fn packing_to_multibshm(
    m: u32,
    partition: &[Vec<usize>],
    j: usize,
) -> Result<MultiBshm, ConstructionError> {
    let lines = spread_lines(m)?;
    let t = lines.len(); // 2^m + 1
    let w = partition.len();
    if w == 0 || j == 0 || j > w {
        return Err(ConstructionError::InvalidPartition(format!(
            "need 1 <= j <= w (got j = {j}, w = {w})"
        )));
    }
    let mut seen = vec![false; t + 1];
    for part in partition {
        if part.is_empty() {
            return Err(ConstructionError::InvalidPartition("empty part".into()));
        }
        for &i in part {
            if i == 0 || i > t || seen[i] {
                return Err(ConstructionError::InvalidPartition(format!(
                    "line index {i} out of 1..={t} or repeated"
                )));
            }
            seen[i] = true;
        }
    }
    if seen[1..].iter().any(|&s| !s) {
        return Err(ConstructionError::InvalidPartition(format!(
            "partition must cover all {t} lines"
        )));
    }

    // Row order: identity first, then each block's union of lines.
    let mut order: Vec<usize> = vec![0];
    let mut block_ranges = Vec::with_capacity(w);
    for part in partition {
        let start = order.len();
        let mut union = Z2Subset::empty(2 * m)?;
        for &i in part {
            union = union.union(&lines[i - 1])?;
        }
        for &e in union.without_identity()?.elements() {
            order.push(e as usize);
        }
        block_ranges.push((start, order.len()));
    }
    let table = character_table(2 * m)?;
    let matrix = table.permute_rows(&order)?;
    let n = matrix.n_rows();

    let subset_for = |blocks: &[usize]| -> Result<RowSubset, MatrixError> {
        let mut rows: Vec<usize> = Vec::new();
        if blocks.contains(&(j - 1)) {
            rows.push(0);
        }
        for &u in blocks {
            let (s, e) = block_ranges[u];
            rows.extend(s..e);
        }
        RowSubset::new(n, &rows)
    };

    let q = 1i64 << m;
    let mut block_certs = Vec::with_capacity(w);
    for u in 0..w {
        let cert = verify_bshm(&matrix, &subset_for(&[u])?)?;
        let size = partition[u].len() as i64;
        let expect = if u == j - 1 {
            ((q - 1) * size + 1, sort_pair(1 - size, q + 1 - size))
        } else {
            ((q - 1) * size, sort_pair(-size, q - size))
        };
        assert_eq!(
            (cert.ell as i64, (cert.a, cert.b)),
            expect,
            "block certificate parameters follow the packing arithmetic"
        );
        block_certs.push(cert);
    }

    let mut union_certs = Vec::new();
    if w <= MultiBshm::UNION_LIMIT {
        for mask in 1u32..(1 << w) {
            let blocks: Vec<usize> = (0..w).filter(|&u| mask >> u & 1 == 1).collect();
            let rows = subset_for(&blocks)?;
            if rows.len() == n {
                continue; // all blocks plus the all-ones row: the whole matrix
            }
            let cert = verify_bshm(&matrix, &rows)?;
            union_certs.push((blocks, cert));
        }
    }

    Ok(MultiBshm {
        matrix,
        block_ranges,
        with_ones: j - 1,
        block_certs,
        union_certs,
    })
}

fn sort_pair(x: i64, y: i64) -> (i64, i64) {
    if x >= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Kronecker product of a `(n, ell, ell, 0)` instance with a Hadamard matrix
/// of order `m`, certified as `(nm, ell*m, ell*m, 0)`.
pub fn kronecker_bshm(
    h: &PmMatrix,
    cert: &BshmCertificate,
    k: &PmMatrix,
) -> Result<(PmMatrix, BshmCertificate), ConstructionError> {
    if cert.b != 0 || cert.a != cert.ell as i64 {
        return Err(ConstructionError::CertMismatch {
            expected: "(n, ell, ell, 0)",
            got_n: cert.n as i64,
            got_ell: cert.ell as i64,
            got_a: cert.a,
            got_b: cert.b,
        });
    }
    if !k.is_hadamard() {
        return Err(ConstructionError::NotHadamard);
    }
    let prod = h.kronecker(k)?;
    let m = k.n_rows();
    let rows: Vec<usize> = cert
        .rows
        .indices()
        .iter()
        .flat_map(|&i| (0..m).map(move |t| i * m + t))
        .collect();
    let out = verify_bshm(&prod, &RowSubset::new(prod.n_rows(), &rows)?)?;
    assert_eq!(
        out.params(),
        (
            (cert.n * m) as i64,
            (cert.ell * m) as i64,
            cert.a * m as i64,
            0
        ),
        "Kronecker construction parameters"
    );
    Ok((prod, out))
}

/// `(ns, n, n, 0)` from Hadamard matrices of orders `n` and `s >= 2`:
/// `normalize_first_row(Hs) (x) Hn` certified with respect to its first `n`
/// rows, which form `1^T (x) Hn`.
pub fn construct_ns_n_n_0(
    hn: &PmMatrix,
    hs: &PmMatrix,
) -> Result<(PmMatrix, BshmCertificate), ConstructionError> {
    if !hn.is_hadamard() || !hs.is_hadamard() {
        return Err(ConstructionError::NotHadamard);
    }
    let n = hn.n_rows();
    let s = hs.n_rows();
    if n < 2 || s < 2 {
        return Err(ConstructionError::UnsupportedQ(
            n.min(s) as u64,
            "orders n and s must both be at least 2",
        ));
    }
    let h = hs.normalize_first_row().kronecker(hn)?;
    let rows: Vec<usize> = (0..n).collect();
    let cert = verify_bshm(&h, &RowSubset::new(h.n_rows(), &rows)?)?;
    assert_eq!(
        cert.params(),
        ((n * s) as i64, n as i64, n as i64, 0),
        "ns-n-n-0 parameters"
    );
    Ok((h, cert))
}

/// Type 2 `(n, 2, 2, 0)` from any Hadamard matrix of order `n >= 4`:
/// normalize the first row, take the top two rows.
pub fn construct_n_2_2_0(h: &PmMatrix) -> Result<(PmMatrix, BshmCertificate), ConstructionError> {
    if !h.is_hadamard() {
        return Err(ConstructionError::NotHadamard);
    }
    if h.n_rows() < 4 {
        return Err(ConstructionError::OutOfRange(h.n_rows() as u32));
    }
    let norm = h.normalize_first_row();
    let cert = verify_bshm(&norm, &RowSubset::new(norm.n_rows(), &[0, 1])?)?;
    assert_eq!(cert.params(), (h.n_rows() as i64, 2, 2, 0));
    assert_eq!(cert.kind, BshmKind::Type2);
    Ok((norm, cert))
}

/// Transforms a `(4rs, 4s, 4s, 0)` instance into a `(4rs, 4s-1, 4s-1, -1)`
/// instance containing the all-ones row: negate column classes by the sign
/// pattern of the last subset row (constant on classes, so the two-value
/// structure survives), then drop that row from the subset. Round-trips with
/// [`add_allones_row`].
pub fn b0_to_bm1(
    h: &PmMatrix,
    cert: &BshmCertificate,
) -> Result<(PmMatrix, BshmCertificate), ConstructionError> {
    if cert.b != 0 || cert.a != cert.ell as i64 {
        return Err(ConstructionError::CertMismatch {
            expected: "(4rs, 4s, 4s, 0)",
            got_n: cert.n as i64,
            got_ell: cert.ell as i64,
            got_a: cert.a,
            got_b: cert.b,
        });
    }
    // validates the repeated-column structure before touching anything
    structure_decompose(h, cert)?;
    let pivot = *cert
        .rows
        .indices()
        .last()
        .expect("certificate subset is nonempty");
    let negated = h.negate_columns(|col| h.entry(pivot, col) == -1);
    let out_cert = verify_bshm(&negated, &cert.rows.without_row(pivot)?)?;
    assert_eq!(
        out_cert.params(),
        (
            cert.n as i64,
            cert.ell as i64 - 1,
            cert.ell as i64 - 1,
            -1
        ),
        "b0-to-bm1 parameters"
    );
    debug_assert_eq!(negated.find_all_ones_row(), Some(pivot));
    let back = add_allones_row(&negated, &out_cert)?;
    assert_eq!(back.params(), cert.params(), "round trip restores (n, 4s, 4s, 0)");
    Ok((negated, out_cert))
}
