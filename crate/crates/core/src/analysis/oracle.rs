//! Brute-force counterparts of the closed forms, built from raw line
//! geometry rather than the planners.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{mod_index, PrimeParam};

use super::Partition;

/// Cells `(row, col)` of the full slope-`v` line through `(m, 1)` in columns
/// `2..=p`, imaginary row included.
fn line(p: PrimeParam, v: i32, m: u32) -> impl Iterator<Item = (u32, u32)> {
    (2..=p.get()).map(move |c| (mod_index(m as i64 - v as i64 * (c as i64 - 1), p), c))
}

/// `f` by intersecting the lines' cell sets.
pub fn common_block_count_by_sets(partition: &Partition, slopes: &[i32]) -> u64 {
    let p = partition.prime();
    let mut count = 0;
    let mut tuple = vec![0usize; slopes.len()];
    let sizes: Vec<usize> = slopes.iter().map(|&v| partition.set(v).len()).collect();
    if sizes.contains(&0) {
        return 0;
    }
    loop {
        let mut common: HashSet<(u32, u32)> = line(p, slopes[0], partition.set(slopes[0])[tuple[0]]).collect();
        for (t, &v) in slopes.iter().enumerate().skip(1) {
            let next: HashSet<(u32, u32)> = line(p, v, partition.set(v)[tuple[t]]).collect();
            common.retain(|c| next.contains(c));
        }
        if !common.is_empty() {
            count += 1;
        }
        let mut t = 0;
        while t < tuple.len() {
            tuple[t] += 1;
            if tuple[t] < sizes[t] {
                break;
            }
            tuple[t] = 0;
            t += 1;
        }
        if t == tuple.len() {
            return count;
        }
    }
}

/// Union of the chosen full lines for column 1: `(real cells, imaginary
/// cells)`.
pub fn line_union(partition: &Partition) -> (u64, u64) {
    let p = partition.prime();
    let mut cells = HashSet::new();
    for (v, set) in partition.sets().iter().enumerate() {
        for &m in set {
            cells.extend(line(p, v as i32, m));
        }
    }
    let imaginary = cells.iter().filter(|(row, _)| *row == p.get()).count() as u64;
    (cells.len() as u64 - imaginary, imaginary)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteForce {
    pub p: u32,
    pub min_gamma: u64,
    /// Horizontal-group counts reached by at least one optimal assignment.
    pub optimal_x: Vec<u32>,
    pub assignments: u64,
}

/// Every horizontal/diagonal choice for the `p - 1` rows of EVENODD column 1,
/// counted as the union of transmitted cells plus the two sum blocks.
pub fn brute_force_min_single(p: u32) -> Result<BruteForce> {
    let pp = PrimeParam::new(p)?;
    if p > 13 {
        return Err(Error::OutOfRange(format!("exhaustive search limited to p <= 13, got {p}")));
    }
    let rows = p - 1;
    let mut min = u64::MAX;
    let mut optimal = BTreeSet::new();
    for mask in 0u32..(1 << rows) {
        let mut sent: HashSet<(u32, u32)> = HashSet::new();
        for m in 1..=rows {
            if mask >> (m - 1) & 1 == 1 {
                // diagonal: line plus its parity in column p + 2
                sent.extend(line(pp, 1, m).filter(|&(r, _)| r != p));
                sent.insert((m, p + 2));
            } else {
                sent.extend((2..=p).map(|c| (m, c)));
                sent.insert((m, p + 1));
            }
        }
        let gamma = sent.len() as u64 + 2;
        let x = rows - mask.count_ones();
        if gamma < min {
            min = gamma;
            optimal.clear();
        }
        if gamma == min {
            optimal.insert(x);
        }
    }
    Ok(BruteForce {
        p,
        min_gamma: min,
        optimal_x: optimal.into_iter().collect(),
        assignments: 1 << rows,
    })
}
