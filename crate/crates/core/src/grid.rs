//! Prime-indexed grid geometry shared by every code family.
//!
//! Rows and columns are 1-based. For the EVENODD-style families the grid has
//! `p - 1` stored rows and an imaginary all-zero row `p` which makes every
//! sloped line exactly `p` cells long. Imaginary cells are never stored or
//! transmitted; they show up only as flagged [`Member`]s.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime `p >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeParam(u32);

impl PrimeParam {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 3 && is_prime(p) {
            Ok(Self(p))
        } else {
            Err(Error::NotPrime(p as i64))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of stored rows, `p - 1`.
    #[inline]
    pub fn rows(self) -> u32 {
        self.0 - 1
    }

    /// Multiplicative inverse modulo `p` of a value not divisible by `p`.
    pub fn inverse(self, x: i64) -> u32 {
        let p = self.0 as i64;
        let a = x.rem_euclid(p);
        debug_assert!(a != 0, "zero has no inverse");
        // Fermat: a^(p-2)
        let mut result = 1i64;
        let mut base = a;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result as u32
    }
}

impl TryFrom<u32> for PrimeParam {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeParam> for u32 {
    fn from(p: PrimeParam) -> u32 {
        p.0
    }
}

impl fmt::Display for PrimeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes in the inclusive range `lo..=hi` that are usable as `p`.
pub fn primes_in(lo: u32, hi: u32) -> Vec<u32> {
    (lo.max(3)..=hi).filter(|&n| is_prime(n)).collect()
}

/// `<x> = ((x - 1) mod p) + 1`, always in `1..=p`.
#[inline]
pub fn mod_index(x: i64, p: PrimeParam) -> u32 {
    ((x - 1).rem_euclid(p.0 as i64) + 1) as u32
}

/// A fixed-length byte block, the unit of storage and transfer.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Block(Vec<u8>);

impl Block {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn from_bytes(bytes: impl Into<Vec<u8>>) -> Self {
        Self(bytes.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    /// In-place XOR. Lengths must match.
    pub fn xor_with(&mut self, other: &Block) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a ^= b);
        Ok(())
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block(")?;
        for b in self.0.iter().take(16) {
            write!(f, "{b:02x}")?;
        }
        if self.0.len() > 16 {
            write!(f, "..")?;
        }
        write!(f, ")")
    }
}

/// Panics on length mismatch; use [`xor_blocks`] for the checked form.
impl BitXorAssign<&Block> for Block {
    fn bitxor_assign(&mut self, rhs: &Block) {
        self.xor_with(rhs).expect("xor of blocks with different lengths");
    }
}

impl BitXor<&Block> for &Block {
    type Output = Block;
    fn bitxor(self, rhs: &Block) -> Block {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

pub fn xor_blocks(a: &Block, b: &Block) -> Result<Block> {
    let mut out = a.clone();
    out.xor_with(b)?;
    Ok(out)
}

/// 1-based cell address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub row: u32,
    pub col: u32,
}

impl Coord {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a[{},{}]", self.row, self.col)
    }
}

/// A cell of a parity line, flagged when it sits in the imaginary row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Member {
    pub coord: Coord,
    pub imaginary: bool,
}

/// Parity group `B_{index, slope}`. Index `p` (equivalently 0) names the
/// line through the imaginary cell of column 1, whose XOR is `S_slope`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParityGroupId {
    pub slope: i32,
    pub index: u32,
}

impl ParityGroupId {
    pub const fn new(slope: i32, index: u32) -> Self {
        Self { slope, index }
    }
}

impl fmt::Display for ParityGroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B[{},{}]", self.index, self.slope)
    }
}

fn check_group(p: PrimeParam, g: ParityGroupId) -> Result<u32> {
    let pv = p.get() as i32;
    if g.slope <= -pv || g.slope >= pv {
        return Err(Error::InvalidSlope { slope: g.slope, p: p.get() });
    }
    if g.index > p.get() {
        return Err(Error::InvalidGroupIndex { index: g.index, p: p.get() });
    }
    Ok(if g.index == 0 { p.get() } else { g.index })
}

/// Row of line `B_{index,slope}` in column `col`: `<index + slope(1 - col)>`.
#[inline]
pub fn line_row(p: PrimeParam, slope: i32, index: u32, col: u32) -> u32 {
    mod_index(index as i64 + slope as i64 * (1 - col as i64), p)
}

/// Members `a_{<i+v(1-j)>, j}` for `j = 1..=info_cols`, imaginary ones flagged.
pub fn parity_group_members(p: PrimeParam, g: ParityGroupId, info_cols: u32) -> Result<Vec<Member>> {
    let index = check_group(p, g)?;
    if g.slope == 0 && index == p.get() {
        return Err(Error::InvalidGroupIndex { index: g.index, p: p.get() });
    }
    Ok((1..=info_cols)
        .map(|j| {
            let row = line_row(p, g.slope, index, j);
            Member {
                coord: Coord::new(row, j),
                imaginary: row == p.get(),
            }
        })
        .collect())
}

/// The unique cell shared by two groups of different slopes, solved in
/// closed form: `(v - u)(1 - j) = k - i (mod p)`.
pub fn crossing(p: PrimeParam, g1: ParityGroupId, g2: ParityGroupId) -> Result<Member> {
    let i = check_group(p, g1)? as i64;
    let k = check_group(p, g2)? as i64;
    let pv = p.get() as i64;
    if (g1.slope - g2.slope) as i64 % pv == 0 {
        return Err(Error::EqualSlopes(g1.slope));
    }
    let dv = (g1.slope - g2.slope) as i64;
    let t = ((k - i).rem_euclid(pv) * p.inverse(dv) as i64).rem_euclid(pv);
    let col = mod_index(1 - t, p);
    let row = line_row(p, g1.slope, i as u32, col);
    Ok(Member {
        coord: Coord::new(row, col),
        imaginary: row == p.get(),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;

    fn p(v: u32) -> PrimeParam {
        PrimeParam::new(v).unwrap()
    }

    #[test]
    fn prime_param_rejects_composites_and_two() {
        assert!(PrimeParam::new(4).is_err());
        assert!(PrimeParam::new(2).is_err());
        assert!(PrimeParam::new(1).is_err());
        assert_eq!(p(13).rows(), 12);
    }

    #[test]
    fn mod_index_examples() {
        assert_eq!(mod_index(0, p(5)), 5);
        assert_eq!(mod_index(6, p(5)), 1);
        assert_eq!(mod_index(-1, p(5)), 4);
    }

    #[test]
    fn xor_examples() {
        let x = Block::from_bytes(vec![0x5a, 0x13]);
        assert_eq!(xor_blocks(&x, &Block::zero(2)).unwrap(), x);
        assert!(xor_blocks(&x, &x).unwrap().is_zero());
        let a = Block::from_bytes(vec![0x0f]);
        let b = Block::from_bytes(vec![0xf0]);
        assert_eq!(xor_blocks(&a, &b).unwrap().as_bytes(), &[0xff]);
        assert!(matches!(
            xor_blocks(&a, &x),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn xor_group_axioms_on_single_bytes() {
        let all: Vec<Block> = (0..=255u8).map(|b| Block::from_bytes(vec![b])).collect();
        let zero = Block::zero(1);
        for a in &all {
            assert_eq!(&(a ^ &zero), a);
            assert!((a ^ a).is_zero());
            for b in &all {
                assert_eq!(a ^ b, b ^ a);
            }
        }
        // associativity on a stride to keep it quick
        for a in all.iter().step_by(7) {
            for b in all.iter().step_by(5) {
                for c in all.iter().step_by(3) {
                    assert_eq!(&(a ^ b) ^ c, a ^ &(b ^ c));
                }
            }
        }
    }

    fn coords(ms: &[Member]) -> Vec<(u32, u32, bool)> {
        ms.iter().map(|m| (m.coord.row, m.coord.col, m.imaginary)).collect()
    }

    #[test]
    fn member_examples() {
        let h = parity_group_members(p(5), ParityGroupId::new(0, 1), 5).unwrap();
        assert_eq!(
            coords(&h),
            vec![(1, 1, false), (1, 2, false), (1, 3, false), (1, 4, false), (1, 5, false)]
        );
        let d = parity_group_members(p(5), ParityGroupId::new(1, 3), 5).unwrap();
        assert_eq!(
            coords(&d),
            vec![(3, 1, false), (2, 2, false), (1, 3, false), (5, 4, true), (4, 5, false)]
        );
        let a = parity_group_members(p(3), ParityGroupId::new(-1, 2), 3).unwrap();
        assert_eq!(coords(&a), vec![(2, 1, false), (3, 2, true), (1, 3, false)]);
        assert!(parity_group_members(p(5), ParityGroupId::new(5, 1), 5).is_err());
        assert!(parity_group_members(p(5), ParityGroupId::new(-5, 1), 5).is_err());
    }

    #[test]
    fn crossing_examples() {
        let c = crossing(p(5), ParityGroupId::new(0, 1), ParityGroupId::new(1, 3)).unwrap();
        assert_eq!(c.coord, Coord::new(1, 3));
        assert!(!c.imaginary);
        assert_eq!(
            crossing(p(5), ParityGroupId::new(0, 1), ParityGroupId::new(0, 2)),
            Err(Error::EqualSlopes(0))
        );
    }

    #[test]
    fn zero_crossing_condition() {
        // For u, v != 0 the crossing is imaginary exactly when both lines hit
        // row p in the same column: i*u = k*v (mod p).
        let pp = p(5);
        for (v, u) in [(1, 2), (1, -1), (2, -1), (-2, 1), (1, 3)] {
            for i in 1..5u32 {
                for k in 1..5u32 {
                    let c = crossing(pp, ParityGroupId::new(v, i), ParityGroupId::new(u, k)).unwrap();
                    let cond = (i as i64 * u as i64 - k as i64 * v as i64).rem_euclid(5) == 0;
                    assert_eq!(c.imaginary, cond, "B[{i},{v}] x B[{k},{u}]");
                }
            }
        }
        // B[1,1] and B[2,2] meet in the imaginary cell of column 2
        let c = crossing(pp, ParityGroupId::new(1, 1), ParityGroupId::new(2, 2)).unwrap();
        assert_eq!(c.coord, Coord::new(5, 2));
        assert!(c.imaginary);
        // horizontal groups never have a zero crossing
        for i in 1..5 {
            for k in 1..5 {
                let c = crossing(pp, ParityGroupId::new(0, i), ParityGroupId::new(1, k)).unwrap();
                assert!(!c.imaginary);
            }
        }
    }

    #[test]
    fn each_info_cell_in_one_group_per_slope() {
        let pp = p(7);
        for v in [-3, -1, 0, 1, 2, 6] {
            let mut seen = HashSet::new();
            for i in 1..=7u32 {
                if v == 0 && i == 7 {
                    continue;
                }
                for m in parity_group_members(pp, ParityGroupId::new(v, i), 7).unwrap() {
                    if !m.imaginary {
                        assert!(seen.insert(m.coord), "slope {v}: {} twice", m.coord);
                    }
                }
            }
            assert_eq!(seen.len(), 6 * 7);
        }
    }

    fn prime() -> impl Strategy<Value = PrimeParam> {
        prop::sample::select(vec![3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31]).prop_map(p)
    }

    proptest! {
        #[test]
        fn mod_index_is_periodic(x in -1000i64..1000, pp in prime()) {
            let r = mod_index(x, pp);
            prop_assert!((1..=pp.get()).contains(&r));
            prop_assert_eq!(mod_index(x + pp.get() as i64, pp), r);
        }

        #[test]
        fn crossing_matches_set_intersection(pp in prime(), a in 0u32..1000, b in 0u32..1000, c in 0i32..1000, d in 0i32..1000) {
            let pv = pp.get() as i32;
            let v = c % (2 * pv - 1) - (pv - 1);
            let u = d % (2 * pv - 1) - (pv - 1);
            prop_assume!((u - v) % pp.get() as i32 != 0);
            let i = a % (pp.get() - 1) + 1;
            let k = b % (pp.get() - 1) + 1;
            let g1 = ParityGroupId::new(v, i);
            let g2 = ParityGroupId::new(u, k);
            let c12 = crossing(pp, g1, g2).unwrap();
            prop_assert_eq!(crossing(pp, g2, g1).unwrap(), c12);
            let s1: HashSet<Coord> = parity_group_members(pp, g1, pp.get()).unwrap().iter().map(|m| m.coord).collect();
            let s2: HashSet<Coord> = parity_group_members(pp, g2, pp.get()).unwrap().iter().map(|m| m.coord).collect();
            let shared: Vec<_> = s1.intersection(&s2).copied().collect();
            prop_assert_eq!(shared, vec![c12.coord]);
            prop_assert_eq!(c12.imaginary, c12.coord.row == pp.get());
        }

        #[test]
        fn members_have_p_cells(pp in prime(), i in 1u32..31, v in -30i32..31) {
            prop_assume!(v.abs() < pp.get() as i32 && i < pp.get());
            let ms = parity_group_members(pp, ParityGroupId::new(v, i), pp.get()).unwrap();
            prop_assert_eq!(ms.len() as u32, pp.get());
            prop_assert!(ms.iter().filter(|m| m.imaginary).count() <= 1);
        }
    }
}
