//! Exhaustive desk-scale searches: difference sets in `Z_2^r` and balanced
//! splittable row subsets of supplied Hadamard matrices.
//!
//! Row-subset searches enumerate subsets in colexicographic order, split the
//! rank space into equal shard blocks, and checkpoint finished blocks as
//! `SHARD <matrix-hash> <ell> <block-index> done` lines so interrupted runs
//! can resume. Results are aggregated order-independently and then sorted,
//! so output does not depend on shard or thread counts.

use crate::bshm::{verify_bshm, BshmCertificate};
use crate::pm_matrix::{PmMatrix, RowSubset};
use crate::z2::{Z2Error, Z2Subset};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("combinatorial budget exceeded: C({n}, {k}) = {total} > {limit}")]
    BudgetExceeded { n: usize, k: usize, total: u128, limit: u128 },
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Z2(#[from] Z2Error),
    #[error(transparent)]
    Matrix(#[from] crate::pm_matrix::MatrixError),
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// All `k`-subsets of the nonzero elements of `Z_2^r` whose difference
/// multiset covers every nonidentity group element exactly `lambda` times.
pub fn search_difference_set(
    r: u32,
    k: usize,
    lambda: i64,
) -> Result<Vec<Z2Subset>, SearchError> {
    let order = 1usize << r;
    let total = binomial(order, k);
    if total > 10_000_000 {
        return Err(SearchError::BudgetExceeded {
            n: order,
            k,
            total,
            limit: 10_000_000,
        });
    }
    let nonzero = order - 1;
    if k > nonzero {
        return Ok(Vec::new());
    }
    let mut hits = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect(); // indices into 1..=nonzero
    loop {
        let elems: Vec<u64> = subset.iter().map(|&i| (i + 1) as u64).collect();
        let mut count = vec![0i64; order];
        let mut ok = true;
        'outer: for (i, &x) in elems.iter().enumerate() {
            for &y in &elems[i + 1..] {
                let d = (x ^ y) as usize;
                count[d] += 2;
                if count[d] > lambda {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok && count[1..].iter().all(|&c| c == lambda) {
            hits.push(Z2Subset::from_elements(r, &elems)?);
        }
        // next lexicographic k-combination of {0..nonzero-1}
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(hits);
            }
            i -= 1;
            if subset[i] != i + nonzero - k {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Options for the row-subset search.
#[derive(Clone, Debug)]
pub struct BshmSearchConfig {
    /// Number of equal colex-rank blocks the search space is split into.
    pub shards: usize,
    /// Checkpoint file; finished blocks are appended and, with `resume`,
    /// skipped on restart.
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
    /// Certificates of hits are appended here as JSON lines.
    pub results: Option<PathBuf>,
}

impl Default for BshmSearchConfig {
    fn default() -> Self {
        BshmSearchConfig {
            shards: 16,
            checkpoint: None,
            resume: false,
            results: None,
        }
    }
}

/// First 16 hex characters of the SHA-256 of the matrix text form; names the
/// matrix in checkpoint files.
pub fn matrix_hash(h: &PmMatrix) -> String {
    let digest = Sha256::digest(h.to_text().as_bytes());
    let mut s = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        s.push_str(&format!("{byte:02x}"));
    }
    s
}

/// Subset of `{0..n-1}` of size `k` at colexicographic rank `rank`.
fn colex_unrank(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0usize; k];
    let mut c = n;
    for i in (1..=k).rev() {
        // largest c with C(c, i) <= rank
        while binomial(c, i) > rank {
            c -= 1;
        }
        out[i - 1] = c;
        rank -= binomial(c, i);
    }
    out
}

/// Advances a colex-ordered subset in place; the successor of
/// `{c_1 < ... < c_k}` increments the lowest index that can move.
fn colex_next(subset: &mut [usize]) {
    let k = subset.len();
    for i in 0..k {
        let limit = if i + 1 < k { subset[i + 1] } else { usize::MAX };
        if subset[i] + 1 < limit {
            subset[i] += 1;
            for (j, slot) in subset.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return;
        }
    }
}

/// All `ell`-row subsets of `h` whose column dots take at most two values
/// (within `targets` when given), each re-verified into a certificate.
/// Deterministic: hits are sorted by their row indices regardless of shard
/// or thread counts. A subset is abandoned as soon as a third distinct dot
/// value (or a value outside the targets) appears.
pub fn search_bshm_rows(
    h: &PmMatrix,
    ell: usize,
    targets: Option<(i64, i64)>,
    config: &BshmSearchConfig,
) -> Result<Vec<(RowSubset, BshmCertificate)>, SearchError> {
    let n = h.n_rows();
    let total = binomial(n, ell);
    if total > 100_000_000 {
        return Err(SearchError::BudgetExceeded {
            n,
            k: ell,
            total,
            limit: 100_000_000,
        });
    }
    let shards = config.shards.max(1);
    let block_size = (total + shards as u128 - 1) / shards as u128;
    let hash = matrix_hash(h);

    let done: HashSet<usize> = if config.resume {
        match config.checkpoint.as_ref().map(std::fs::read_to_string) {
            Some(Ok(text)) => text
                .lines()
                .filter_map(|line| {
                    let mut parts = line.split_whitespace();
                    match (parts.next(), parts.next(), parts.next(), parts.next(), parts.next()) {
                        (Some("SHARD"), Some(fh), Some(fe), Some(fb), Some("done"))
                            if fh == hash && fe == ell.to_string() =>
                        {
                            fb.parse().ok()
                        }
                        _ => None,
                    }
                })
                .collect(),
            _ => HashSet::new(),
        }
    } else {
        HashSet::new()
    };

    let blocks: Vec<usize> = (0..shards).filter(|b| !done.contains(b)).collect();
    let normalized = targets.map(|(a, b)| if a >= b { (a, b) } else { (b, a) });

    let scan_block = |block: usize| -> Result<Vec<(RowSubset, BshmCertificate)>, SearchError> {
        let start = block as u128 * block_size;
        if start >= total {
            return Ok(Vec::new());
        }
        let end = (start + block_size).min(total);
        let mut subset = colex_unrank(start, n, ell);
        let mut hits = Vec::new();
        for _ in start..end {
            if subset_is_candidate(h, &subset, normalized) {
                let rows = RowSubset::new(n, &subset)?;
                if let Ok(cert) = verify_bshm(h, &rows) {
                    hits.push((rows, cert));
                }
            }
            colex_next(&mut subset);
        }
        Ok(hits)
    };

    let mut results: Vec<(usize, Vec<(RowSubset, BshmCertificate)>)> = blocks
        .par_iter()
        .map(|&b| scan_block(b).map(|hits| (b, hits)))
        .collect::<Result<Vec<_>, _>>()?;
    results.sort_by_key(|(b, _)| *b);

    if let Some(path) = &config.checkpoint {
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        for (b, _) in &results {
            writeln!(file, "SHARD {hash} {ell} {b} done")?;
        }
    }

    let mut hits: Vec<(RowSubset, BshmCertificate)> =
        results.into_iter().flat_map(|(_, h)| h).collect();
    hits.sort_by(|(a, _), (b, _)| a.indices().cmp(b.indices()));

    if let Some(path) = &config.results {
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        for (_, cert) in &hits {
            writeln!(file, "{}", cert.to_json())?;
        }
    }
    Ok(hits)
}

/// Early-abort scan: true when the column dots over the subset take at most
/// two distinct values, confined to the targets when given.
fn subset_is_candidate(h: &PmMatrix, subset: &[usize], targets: Option<(i64, i64)>) -> bool {
    let n = h.n_cols();
    let mut seen: [Option<i64>; 2] = [None, None];
    for i in 0..n {
        for j in (i + 1)..n {
            let d: i64 = subset
                .iter()
                .map(|&s| (h.entry(s, i) * h.entry(s, j)) as i64)
                .sum();
            if let Some((a, b)) = targets {
                if d != a && d != b {
                    return false;
                }
            }
            match seen {
                [Some(x), _] if x == d => {}
                [_, Some(y)] if y == d => {}
                [None, _] => seen[0] = Some(d),
                [_, None] => seen[1] = Some(d),
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{paley_hadamard, sylvester, PaleyKind};
    use crate::pds::verify_pds_definition;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(16, 6), 8008);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(4, 5), 0);
    }

    #[test]
    fn colex_enumeration_is_consistent() {
        let n = 7;
        let k = 3;
        let mut subset: Vec<usize> = (0..k).collect();
        for rank in 0..binomial(n, k) {
            assert_eq!(colex_unrank(rank, n, k), subset, "rank {rank}");
            colex_next(&mut subset);
        }
    }

    #[test]
    fn difference_sets_16_6_2() {
        let hits = search_difference_set(4, 6, 2).unwrap();
        assert!(!hits.is_empty());
        for d in &hits {
            let p = verify_pds_definition(d).unwrap();
            assert_eq!((p.alpha, p.beta), (2, 2));
        }
        // the 280 Menon sets of this size
        assert_eq!(hits.len(), 280);
    }

    #[test]
    fn difference_set_boundaries() {
        let full = search_difference_set(3, 7, 6).unwrap();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].len(), 7);
        assert!(!full[0].contains_identity());

        assert!(search_difference_set(4, 5, 1).unwrap().is_empty());
        assert!(matches!(
            search_difference_set(14, 8, 2),
            Err(SearchError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn bshm_search_finds_bent_rows() {
        let h = sylvester(4).unwrap();
        let hits = search_bshm_rows(&h, 6, Some((2, -2)), &BshmSearchConfig::default()).unwrap();
        assert!(!hits.is_empty());
        for (rows, cert) in &hits {
            assert_eq!(cert.params(), (16, 6, 2, -2));
            assert_eq!(rows.len(), 6);
        }
    }

    #[test]
    fn bshm_search_two_rows_order4() {
        let h = sylvester(2).unwrap();
        let hits = search_bshm_rows(&h, 2, Some((2, 0)), &BshmSearchConfig::default()).unwrap();
        // Sylvester is already normalized, so hits are the pairs through row 0
        let index_sets: Vec<&[usize]> = hits.iter().map(|(r, _)| r.indices()).collect();
        assert_eq!(index_sets, vec![&[0, 1][..], &[0, 2], &[0, 3]]);
        // normalize_first_row leaves Sylvester unchanged: same hits
        let hits_norm =
            search_bshm_rows(&h.normalize_first_row(), 2, Some((2, 0)), &BshmSearchConfig::default())
                .unwrap();
        assert_eq!(hits_norm.len(), hits.len());
    }

    #[test]
    fn bshm_search_paley_12() {
        let h = paley_hadamard(11, PaleyKind::I).unwrap();
        let hits = search_bshm_rows(&h, 3, Some((3, -1)), &BshmSearchConfig::default()).unwrap();
        for (_, cert) in &hits {
            assert_eq!(cert.params(), (12, 3, 3, -1));
        }
    }

    #[test]
    fn search_deterministic_across_shard_counts() {
        let h = sylvester(4).unwrap();
        let base = search_bshm_rows(&h, 4, None, &BshmSearchConfig { shards: 1, ..Default::default() })
            .unwrap();
        for shards in [3, 7, 16] {
            let other = search_bshm_rows(
                &h,
                4,
                None,
                &BshmSearchConfig {
                    shards,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(base.len(), other.len());
            for ((r1, c1), (r2, c2)) in base.iter().zip(&other) {
                assert_eq!(r1.indices(), r2.indices());
                assert_eq!(c1, c2);
            }
        }
    }

    #[test]
    fn search_resume_skips_done_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let ckpt = dir.path().join("search.ckpt");
        let h = sylvester(3).unwrap();
        let config = BshmSearchConfig {
            shards: 4,
            checkpoint: Some(ckpt.clone()),
            resume: false,
            results: None,
        };
        let full = search_bshm_rows(&h, 2, Some((2, 0)), &config).unwrap();
        assert!(!full.is_empty());
        let text = std::fs::read_to_string(&ckpt).unwrap();
        assert_eq!(text.lines().count(), 4);
        // resuming with every block done finds nothing new
        let resumed = search_bshm_rows(
            &h,
            2,
            Some((2, 0)),
            &BshmSearchConfig {
                resume: true,
                ..config
            },
        )
        .unwrap();
        assert!(resumed.is_empty());
    }
}
