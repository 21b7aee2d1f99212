//! Dense GF(2) elimination with block-valued right-hand sides.
//!
//! Equations are XOR relations over two kinds of symbols: unknowns to solve
//! for and knowns whose values are available. Elimination produces, for each
//! unknown that the system pins down, the set of knowns whose XOR equals it.

/// Packed bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a ^= b);
    }

    /// Set bits in `range`, ascending.
    pub fn ones_in(&self, range: std::ops::Range<usize>) -> impl Iterator<Item = usize> + '_ {
        range.filter(move |&i| self.get(i))
    }

    pub fn any_in(&self, range: std::ops::Range<usize>) -> bool {
        range.into_iter().any(|i| self.get(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    Unknown(usize),
    Known(usize),
}

/// Result of eliminating a system.
#[derive(Debug, Clone, Default)]
pub struct Solution {
    /// Per unknown: the knowns XOR-ing to its value, or `None` if the
    /// system leaves it undetermined.
    pub recipes: Vec<Option<Vec<usize>>>,
    /// Combinations of knowns that must XOR to zero on consistent input.
    pub checks: Vec<Vec<usize>>,
    pub rank: usize,
}

impl Solution {
    pub fn is_determined(&self, unknown: usize) -> bool {
        self.recipes[unknown].is_some()
    }
}

pub fn solve(n_unknown: usize, n_known: usize, equations: &[Vec<Term>]) -> Solution {
    let width = n_unknown + n_known;
    let mut rows: Vec<BitRow> = equations
        .iter()
        .map(|eq| {
            let mut row = BitRow::new(width);
            for t in eq {
                match *t {
                    Term::Unknown(u) => row.toggle(u),
                    Term::Known(k) => row.toggle(n_unknown + k),
                }
            }
            row
        })
        .collect();

    let mut pivot_row_of = vec![None; n_unknown];
    let mut next = 0;
    for (col, pivot_row) in pivot_row_of.iter_mut().enumerate() {
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        *pivot_row = Some(next);
        next += 1;
    }

    let recipes = pivot_row_of
        .iter()
        .enumerate()
        .map(|(col, pr)| {
            let row = &rows[(*pr)?];
            // any other unknown left in a reduced pivot row is free
            let free = row.ones_in(0..n_unknown).any(|c| c != col);
            (!free).then(|| row.ones_in(n_unknown..width).map(|k| k - n_unknown).collect())
        })
        .collect();

    let checks = rows[next..]
        .iter()
        .filter(|r| r.any_in(n_unknown..width))
        .map(|r| r.ones_in(n_unknown..width).map(|k| k - n_unknown).collect())
        .collect();

    Solution {
        recipes,
        checks,
        rank: next,
    }
}
