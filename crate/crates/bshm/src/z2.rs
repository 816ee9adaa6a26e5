//! The elementary abelian 2-group `Z_2^r`: elements, characters, the fast
//! Walsh transform, character tables, and GF(2^m) arithmetic for spreads.
//!
//! Elements are bitmasks in `[0, 2^r)` with XOR as the group law, and the
//! index-is-bitmask convention makes `character_table(r)` bit-exactly the
//! Sylvester matrix of order `2^r`.

use crate::pm_matrix::{MatrixError, PmMatrix};
use thiserror::Error;

/// Largest supported rank for character tables (order 2^14).
pub const MAX_TABLE_RANK: u32 = 14;
/// Largest supported rank for subsets and spectra.
pub const MAX_RANK: u32 = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Z2Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u32, u32),
    #[error("rank {0} too large (limit {1})")]
    RankTooLarge(u32, u32),
    #[error("element {0:#b} out of range for rank {1}")]
    ElementOutOfRange(u64, u32),
    #[error("duplicate element {0:#b}")]
    DuplicateElement(u64),
    #[error("degree {0} out of range for spreads (1..=7)")]
    DegreeOutOfRange(u32),
    #[error("polynomial {0:#b} is not irreducible of degree {1}")]
    ReduciblePolynomial(u64, u32),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Element of `Z_2^r`. The group law is XOR, the identity is 0, and every
/// element is its own inverse.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Z2Elem {
    pub value: u64,
    pub rank: u32,
}

impl Z2Elem {
    pub fn new(value: u64, rank: u32) -> Result<Self, Z2Error> {
        if rank > MAX_RANK {
            return Err(Z2Error::RankTooLarge(rank, MAX_RANK));
        }
        if value >> rank != 0 {
            return Err(Z2Error::ElementOutOfRange(value, rank));
        }
        Ok(Z2Elem { value, rank })
    }
}

/// Character value `chi_g(s) = (-1)^popcount(g AND s)`.
pub fn char_value(g: Z2Elem, s: Z2Elem) -> Result<i32, Z2Error> {
    if g.rank != s.rank {
        return Err(Z2Error::RankMismatch(g.rank, s.rank));
    }
    Ok(if (g.value & s.value).count_ones() % 2 == 0 {
        1
    } else {
        -1
    })
}

/// Character table of `Z_2^r` with rows and columns indexed by bitmask; entry
/// `(g, s)` is `chi_g(s)`. Row 0 is the all-ones row and the result is the
/// Sylvester matrix of order `2^r`.
pub fn character_table(r: u32) -> Result<PmMatrix, Z2Error> {
    if r > MAX_TABLE_RANK {
        return Err(Z2Error::RankTooLarge(r, MAX_TABLE_RANK));
    }
    let n = 1usize << r;
    Ok(PmMatrix::from_fn(n, n, |g, s| {
        (g & s).count_ones() % 2 == 1
    })?)
}

/// In-place fast Walsh-Hadamard transform, `O(2^r * r)` word operations.
pub fn fwht(data: &mut [i64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (data[i], data[i + h]);
                data[i] = x + y;
                data[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Subset of `Z_2^r` as an indicator vector with its Walsh spectrum computed
/// once at construction; entry `g` of the spectrum is the character sum
/// `chi_g(D)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Z2Subset {
    rank: u32,
    elements: Vec<u64>,
    indicator: Vec<bool>,
    spectrum: Vec<i64>,
}

impl Z2Subset {
    pub fn from_elements(rank: u32, elements: &[u64]) -> Result<Self, Z2Error> {
        if rank > MAX_RANK {
            return Err(Z2Error::RankTooLarge(rank, MAX_RANK));
        }
        let size = 1usize << rank;
        let mut indicator = vec![false; size];
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        for &e in &sorted {
            if e >> rank != 0 {
                return Err(Z2Error::ElementOutOfRange(e, rank));
            }
            if indicator[e as usize] {
                return Err(Z2Error::DuplicateElement(e));
            }
            indicator[e as usize] = true;
        }
        let mut spectrum: Vec<i64> = indicator.iter().map(|&b| b as i64).collect();
        fwht(&mut spectrum);
        Ok(Z2Subset {
            rank,
            elements: sorted,
            indicator,
            spectrum,
        })
    }

    pub fn empty(rank: u32) -> Result<Self, Z2Error> {
        Self::from_elements(rank, &[])
    }

    pub fn full_group(rank: u32) -> Result<Self, Z2Error> {
        let all: Vec<u64> = (0..1u64 << rank).collect();
        Self::from_elements(rank, &all)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn group_order(&self) -> usize {
        1 << self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn contains(&self, g: u64) -> bool {
        (g >> self.rank) == 0 && self.indicator[g as usize]
    }

    pub fn contains_identity(&self) -> bool {
        self.indicator[0]
    }

    /// Walsh spectrum; entry `g` equals `chi_g(D)` and entry 0 equals `|D|`.
    pub fn spectrum(&self) -> &[i64] {
        &self.spectrum
    }

    /// Character sum by direct summation; the slow oracle for the spectrum.
    pub fn char_sum_naive(&self, g: u64) -> i64 {
        self.elements
            .iter()
            .map(|&s| if (g & s).count_ones() % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn with_identity(&self) -> Result<Z2Subset, Z2Error> {
        let mut e = self.elements.clone();
        e.push(0);
        Z2Subset::from_elements(self.rank, &e)
    }

    pub fn without_identity(&self) -> Result<Z2Subset, Z2Error> {
        let e: Vec<u64> = self.elements.iter().copied().filter(|&x| x != 0).collect();
        Z2Subset::from_elements(self.rank, &e)
    }

    pub fn union(&self, other: &Z2Subset) -> Result<Z2Subset, Z2Error> {
        if self.rank != other.rank {
            return Err(Z2Error::RankMismatch(self.rank, other.rank));
        }
        let mut e = self.elements.clone();
        for &x in &other.elements {
            if !self.contains(x) {
                e.push(x);
            }
        }
        Z2Subset::from_elements(self.rank, &e)
    }

    pub fn is_disjoint(&self, other: &Z2Subset) -> bool {
        self.elements.iter().all(|&x| !other.contains(x))
    }

    /// Serializes to the `Z2` text format: header then one element per line
    /// as an r-character binary string, most significant bit first.
    pub fn to_text(&self) -> String {
        let mut s = format!("Z2 {}\n", self.rank);
        for &e in &self.elements {
            for bit in (0..self.rank).rev() {
                s.push(if e >> bit & 1 == 1 { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, Z2Error> {
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or("");
        let mut parts = header.split_whitespace();
        let bad = || Z2Error::Parse {
            line: 1,
            msg: format!("expected `Z2 <r>`, got {header:?}"),
        };
        if parts.next() != Some("Z2") {
            return Err(bad());
        }
        let rank: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        let mut elements = Vec::new();
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            if line.is_empty() {
                continue;
            }
            if line.len() != rank as usize {
                return Err(Z2Error::Parse {
                    line: lineno,
                    msg: format!("element of length {} (expected {rank})", line.len()),
                });
            }
            let mut v = 0u64;
            for ch in line.chars() {
                v <<= 1;
                match ch {
                    '1' => v |= 1,
                    '0' => {}
                    other => {
                        return Err(Z2Error::Parse {
                            line: lineno,
                            msg: format!("invalid character {other:?}"),
                        })
                    }
                }
            }
            elements.push(v);
        }
        Self::from_elements(rank, &elements)
    }
}

/// Fixed irreducible modulus used for GF(2^m), one per degree, so spreads are
/// deterministic and reproducible.
const FIXED_MODULI: [u64; 8] = [
    0,          // unused (m = 0)
    0b11,       // x + 1
    0b111,      // x^2 + x + 1
    0b1011,     // x^3 + x + 1
    0b10011,    // x^4 + x + 1
    0b100101,   // x^5 + x^2 + 1
    0b1000011,  // x^6 + x + 1
    0b10000011, // x^7 + x + 1
];

/// GF(2^m) with polynomial-basis arithmetic modulo a fixed irreducible.
#[derive(Clone, Copy, Debug)]
pub struct Gf2mField {
    m: u32,
    modulus: u64,
}

impl Gf2mField {
    pub fn new(m: u32) -> Result<Self, Z2Error> {
        if m == 0 || m as usize >= FIXED_MODULI.len() {
            return Err(Z2Error::DegreeOutOfRange(m));
        }
        Self::with_modulus(m, FIXED_MODULI[m as usize])
    }

    /// Validates irreducibility by exhaustive trial division (m <= 8).
    pub fn with_modulus(m: u32, modulus: u64) -> Result<Self, Z2Error> {
        if m == 0 || m > 8 {
            return Err(Z2Error::DegreeOutOfRange(m));
        }
        if modulus >> m != 1 {
            // must be monic of degree exactly m
            return Err(Z2Error::ReduciblePolynomial(modulus, m));
        }
        for d in 1..=m / 2 {
            for low in 0..1u64 << d {
                let g = (1 << d) | low;
                if poly_rem(modulus, g) == 0 {
                    return Err(Z2Error::ReduciblePolynomial(modulus, m));
                }
            }
        }
        Ok(Gf2mField { m, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        1 << self.m
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let mut acc = 0u64;
        let mut b = b;
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        poly_rem(acc, self.modulus)
    }
}

/// Remainder of carry-less polynomial division over GF(2).
fn poly_rem(mut a: u64, b: u64) -> u64 {
    debug_assert!(b != 0);
    let db = 63 - b.leading_zeros() as i32;
    loop {
        if a == 0 {
            return 0;
        }
        let da = 63 - a.leading_zeros() as i32;
        if da < db {
            return a;
        }
        a ^= b << (da - db);
    }
}

/// The classical line spread of `GF(2^m)^2` viewed inside `Z_2^{2m}`: the
/// `2^m + 1` subgroups `U_lambda = {(x, lambda*x)}` plus `U_inf = {(0, y)}`,
/// each of order `2^m`, pairwise intersecting only in 0 and covering the
/// whole group. Elements `(x, y)` are encoded as `(x << m) | y`.
pub fn spread_lines(m: u32) -> Result<Vec<Z2Subset>, Z2Error> {
    if m == 0 || m > 7 {
        return Err(Z2Error::DegreeOutOfRange(m));
    }
    let field = Gf2mField::new(m)?;
    let rank = 2 * m;
    let mut lines = Vec::with_capacity((1usize << m) + 1);
    for lambda in 0..field.order() {
        let elems: Vec<u64> = (0..field.order())
            .map(|x| (x << m) | field.mul(lambda, x))
            .collect();
        lines.push(Z2Subset::from_elements(rank, &elems)?);
    }
    let inf: Vec<u64> = (0..field.order()).collect();
    lines.push(Z2Subset::from_elements(rank, &inf)?);
    Ok(lines)
}
