use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{mod_index, PrimeParam};

/// Assignment of the rows `1..p-1` of an erased column to slopes: row `m`
/// in `M_v` is rebuilt from a slope-`v` group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    p: PrimeParam,
    sets: Vec<Vec<u32>>,
}

impl Partition {
    /// `sets[v]` is `M_v`. The sets must be disjoint and cover `1..p-1`.
    pub fn new(p: u32, sets: Vec<Vec<u32>>) -> Result<Self> {
        let p = PrimeParam::new(p)?;
        if sets.len() < 2 || sets.len() as u32 > p.get() {
            return Err(Error::InvalidPartition(format!("need 2..=p slope sets, got {}", sets.len())));
        }
        let mut seen = vec![false; p.get() as usize];
        let mut sets = sets;
        for set in &mut sets {
            set.sort_unstable();
            for &m in set.iter() {
                if m == 0 || m >= p.get() {
                    return Err(Error::InvalidPartition(format!("row {m} outside 1..{}", p.get() - 1)));
                }
                if std::mem::replace(&mut seen[m as usize], true) {
                    return Err(Error::InvalidPartition(format!("row {m} appears twice")));
                }
            }
        }
        if let Some(m) = (1..p.get()).find(|&m| !seen[m as usize]) {
            return Err(Error::InvalidPartition(format!("row {m} is not assigned")));
        }
        Ok(Self { p, sets })
    }

    /// `M_v = { rn + v : 1 <= rn + v <= p - 1 }`.
    pub fn by_residue(p: u32, r: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidPartition(format!("r = {r} is below 2")));
        }
        let sets = (0..r).map(|v| (1..p).filter(|m| m % r == v).collect()).collect();
        Self::new(p, sets)
    }

    pub fn p(&self) -> u32 {
        self.p.get()
    }

    pub fn prime(&self) -> PrimeParam {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.sets.len() as u32
    }

    pub fn set(&self, v: i32) -> &[u32] {
        &self.sets[v as usize]
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    /// `A = floor((p - 1) / r)`.
    pub fn a(&self) -> u32 {
        (self.p() - 1) / self.r()
    }

    pub fn slope_of(&self, row: u32) -> Option<i32> {
        self.sets.iter().position(|s| s.binary_search(&row).is_ok()).map(|v| v as i32)
    }

    fn contains(&self, v: i32, row: u32) -> bool {
        self.sets[v as usize].binary_search(&row).is_ok()
    }
}

fn check_slopes(partition: &Partition, slopes: &[i32]) -> Result<()> {
    if slopes.len() < 3 {
        return Err(Error::InvalidParameters(format!(
            "common block count needs at least 3 slopes, got {}",
            slopes.len()
        )));
    }
    if slopes.windows(2).any(|w| w[0] >= w[1]) || slopes[0] < 0 || *slopes.last().unwrap() >= partition.r() as i32 {
        return Err(Error::InvalidParameters(format!(
            "slopes must increase within 0..{}, got {slopes:?}",
            partition.r()
        )));
    }
    Ok(())
}

/// `f(v_1, .., v_k)`: the number of tuples `(m_1, .., m_k)`, `m_t` in
/// `M_{v_t}`, whose slope lines through `(m_t, 1)` all meet in one block.
///
/// Lines through `(m_1, 1)` and `(m_2, 1)` meet `y = (m_2 - m_1)/(v_2 - v_1)`
/// columns to the right, so every other `m_t` is pinned to
/// `m_1 + (v_t - v_1) y`.
pub fn common_block_count(partition: &Partition, slopes: &[i32]) -> Result<u64> {
    check_slopes(partition, slopes)?;
    let p = partition.prime();
    let (v1, v2) = (slopes[0], slopes[1]);
    let inv = p.inverse((v2 - v1) as i64) as i64;
    let mut count = 0;
    for &m1 in partition.set(v1) {
        for &m2 in partition.set(v2) {
            let y = (m2 as i64 - m1 as i64) * inv;
            let all = slopes[2..].iter().all(|&vt| {
                let mt = mod_index(m1 as i64 + (vt - v1) as i64 * y, p);
                mt != p.get() && partition.contains(vt, mt)
            });
            if all {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Inclusion-exclusion value for one erased systematic column:
/// `p(p-1) + p + r - sum |M_a||M_b| + sum f(a,b,c) - ..`.
pub fn inclusion_exclusion_gamma(partition: &Partition) -> i64 {
    let p = partition.p() as i64;
    let r = partition.r();
    let mut total = p * (p - 1) + p + r as i64;
    for mask in 0u32..(1 << r) {
        let slopes: Vec<i32> = (0..r as i32).filter(|v| mask >> v & 1 == 1).collect();
        let term = match slopes.len() {
            0 | 1 => continue,
            2 => (partition.set(slopes[0]).len() * partition.set(slopes[1]).len()) as i64,
            _ => common_block_count(partition, &slopes).expect("valid slope subset") as i64,
        };
        if slopes.len().is_multiple_of(2) {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

/// `f(v1,v2,v3) < A (1 + A gcd(v3-v2, v2-v1) / (v3-v1))`, by
/// cross-multiplication. Returns `(holds, f)`.
pub fn triple_bound_holds(partition: &Partition, slopes: [i32; 3]) -> Result<(bool, u64)> {
    let f = common_block_count(partition, &slopes)?;
    let a = partition.a() as i64;
    let span = (slopes[2] - slopes[0]) as i64;
    let g = gcd((slopes[2] - slopes[1]) as i64, (slopes[1] - slopes[0]) as i64);
    Ok(((f as i64) * span < a * span + a * a * g, f))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn by_residue_sets() {
        let part = Partition::by_residue(7, 3).unwrap();
        assert_eq!(part.sets(), &[vec![3, 6], vec![1, 4], vec![2, 5]]);
        assert_eq!(part.a(), 2);
        assert_eq!(part.slope_of(4), Some(1));
        assert_eq!(part.slope_of(7), None);
    }

    #[test]
    fn validation() {
        assert!(Partition::new(5, vec![vec![1, 2], vec![3, 4]]).is_ok());
        assert!(matches!(Partition::new(5, vec![vec![1, 2], vec![2, 3, 4]]), Err(Error::InvalidPartition(_))));
        assert!(matches!(Partition::new(5, vec![vec![1, 2], vec![3]]), Err(Error::InvalidPartition(_))));
        assert!(matches!(Partition::new(5, vec![vec![1, 2], vec![3, 5]]), Err(Error::InvalidPartition(_))));
        assert!(matches!(Partition::new(5, vec![vec![1, 2, 3, 4]]), Err(Error::InvalidPartition(_))));
        assert_eq!(Partition::new(4, vec![vec![1], vec![2, 3]]), Err(Error::NotPrime(4)));
    }

    #[test]
    fn p7_r3_counts_arithmetic_progressions() {
        // slopes (0,1,2): y = m1 - m0 and m2 = 2 m1 - m0, i.e. m0, m1, m2 in
        // arithmetic progression mod 7
        let part = Partition::by_residue(7, 3).unwrap();
        let mut expect = 0;
        for &n in part.set(0) {
            for &m in part.set(1) {
                for &l in part.set(2) {
                    if (m as i64 - n as i64 - (l as i64 - m as i64)).rem_euclid(7) == 0 {
                        expect += 1;
                    }
                }
            }
        }
        assert_eq!(common_block_count(&part, &[0, 1, 2]).unwrap(), expect);
        assert!(triple_bound_holds(&part, [0, 1, 2]).unwrap().0);
    }

    #[test]
    fn slope_list_errors_and_empty_set() {
        let part = Partition::by_residue(7, 3).unwrap();
        assert!(common_block_count(&part, &[0, 1]).is_err());
        assert!(common_block_count(&part, &[0, 2, 1]).is_err());
        assert!(common_block_count(&part, &[0, 1, 3]).is_err());
        let empty = Partition::new(5, vec![vec![1, 2], vec![3, 4], vec![]]).unwrap();
        assert_eq!(common_block_count(&empty, &[0, 1, 2]).unwrap(), 0);
    }

    #[test]
    fn r2_collapses_to_two_slope_count() {
        let part = Partition::new(5, vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(inclusion_exclusion_gamma(&part), 20 + 5 + 2 - 4);
    }
}
