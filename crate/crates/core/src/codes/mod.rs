//! The five array-code families and their parity layouts.
//!
//! Column-parity families (EVENODD, extended EVENODD, STAR) keep `p`
//! information columns followed by one parity column per slope, with `p - 1`
//! stored rows. RDP keeps `p - 1` information columns, a horizontal parity
//! column, and a diagonal parity column that also covers the horizontal one.
//! X-code is a `p x p` array whose last two rows hold slope `-1` and slope
//! `+1` parities.

mod decode;
mod encode;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{line_row, mod_index, parity_group_members, Block, Coord, ParityGroupId, PrimeParam};

pub use decode::decode;
pub use encode::{adjuster, encode, encode_bytes, extract_bytes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeFamily {
    Evenodd,
    ExtendedEvenodd { r: u32 },
    Rdp,
    XCode,
    Star,
}

impl CodeFamily {
    pub fn name(self) -> &'static str {
        match self {
            CodeFamily::Evenodd => "evenodd",
            CodeFamily::ExtendedEvenodd { .. } => "extended-evenodd",
            CodeFamily::Rdp => "rdp",
            CodeFamily::XCode => "xcode",
            CodeFamily::Star => "star",
        }
    }

    /// Wire tag used by the container header.
    pub fn tag(self) -> u8 {
        match self {
            CodeFamily::Evenodd => 0,
            CodeFamily::ExtendedEvenodd { .. } => 1,
            CodeFamily::Rdp => 2,
            CodeFamily::XCode => 3,
            CodeFamily::Star => 4,
        }
    }

    pub fn from_tag(tag: u8, r: u32) -> Result<Self> {
        Ok(match tag {
            0 => CodeFamily::Evenodd,
            1 => CodeFamily::ExtendedEvenodd { r },
            2 => CodeFamily::Rdp,
            3 => CodeFamily::XCode,
            4 => CodeFamily::Star,
            t => return Err(Error::InvalidParameters(format!("unknown family tag {t}"))),
        })
    }

    /// Parse a family name; `r` only matters for extended EVENODD.
    pub fn parse(name: &str, r: Option<u32>) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "evenodd" => Ok(CodeFamily::Evenodd),
            "extended-evenodd" | "extended" | "ext-evenodd" => Ok(CodeFamily::ExtendedEvenodd {
                r: r.unwrap_or(3),
            }),
            "rdp" => Ok(CodeFamily::Rdp),
            "xcode" | "x-code" => Ok(CodeFamily::XCode),
            "star" => Ok(CodeFamily::Star),
            other => Err(Error::InvalidParameters(format!("unknown code family {other:?}"))),
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodeFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, None)
    }
}

/// One parity equation: `parity + members (+ S_slope) = 0`.
///
/// `parity` is `None` only for the index-`p` line of an adjusted slope,
/// whose members XOR to `S_slope` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDef {
    pub id: ParityGroupId,
    pub parity: Option<Coord>,
    /// Real member cells (imaginary cells dropped). RDP diagonal members
    /// include horizontal-parity cells.
    pub members: Vec<Coord>,
    /// Slope whose adjuster `S_v` enters the equation, if any.
    pub adjuster: Option<i32>,
}

/// A concrete code: family plus prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Code {
    family: CodeFamily,
    p: PrimeParam,
}

impl Code {
    pub fn new(family: CodeFamily, p: u32) -> Result<Self> {
        let p = PrimeParam::new(p)?;
        if let CodeFamily::ExtendedEvenodd { r } = family {
            if r < 2 || r > p.get() {
                return Err(Error::InvalidParameters(format!(
                    "extended EVENODD needs 2 <= r <= p, got r = {r}, p = {p}"
                )));
            }
        }
        Ok(Self { family, p })
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn p(&self) -> PrimeParam {
        self.p
    }

    fn pv(&self) -> u32 {
        self.p.get()
    }

    /// Slopes of the parity columns, in column order.
    pub fn slopes(&self) -> Vec<i32> {
        match self.family {
            CodeFamily::Evenodd | CodeFamily::Rdp => vec![0, 1],
            CodeFamily::ExtendedEvenodd { r } => (0..r as i32).collect(),
            CodeFamily::Star => vec![0, 1, -1],
            CodeFamily::XCode => vec![-1, 1],
        }
    }

    /// Number of columns tolerated as erasures.
    pub fn redundancy(&self) -> usize {
        self.slopes().len()
    }

    /// True for families whose non-horizontal parities carry an `S_v` adjuster.
    pub fn has_adjusters(&self) -> bool {
        matches!(
            self.family,
            CodeFamily::Evenodd | CodeFamily::ExtendedEvenodd { .. } | CodeFamily::Star
        )
    }

    /// Total columns (nodes).
    pub fn n(&self) -> u32 {
        match self.family {
            CodeFamily::Rdp => self.pv() + 1,
            CodeFamily::XCode => self.pv(),
            _ => self.pv() + self.redundancy() as u32,
        }
    }

    /// Columns' worth of information (`k`).
    pub fn k(&self) -> u32 {
        match self.family {
            CodeFamily::Rdp => self.pv() - 1,
            CodeFamily::XCode => self.pv() - 2,
            _ => self.pv(),
        }
    }

    /// Stored rows per column.
    pub fn rows(&self) -> u32 {
        match self.family {
            CodeFamily::XCode => self.pv(),
            _ => self.pv() - 1,
        }
    }

    /// Information rows in each systematic column.
    pub fn info_rows(&self) -> u32 {
        match self.family {
            CodeFamily::XCode => self.pv() - 2,
            _ => self.pv() - 1,
        }
    }

    /// Columns holding information blocks.
    pub fn systematic_columns(&self) -> std::ops::RangeInclusive<u32> {
        match self.family {
            CodeFamily::Rdp => 1..=self.pv() - 1,
            _ => 1..=self.pv(),
        }
    }

    pub fn is_systematic(&self, col: u32) -> bool {
        self.systematic_columns().contains(&col)
    }

    /// Total information blocks, `M`.
    pub fn info_blocks(&self) -> u64 {
        self.k() as u64 * self.rows() as u64
    }

    pub fn is_info_cell(&self, c: Coord) -> bool {
        self.is_systematic(c.col) && c.row >= 1 && c.row <= self.info_rows()
    }

    /// Information cells in column-major order.
    pub fn info_cells(&self) -> Vec<Coord> {
        self.systematic_columns()
            .flat_map(|col| (1..=self.info_rows()).map(move |row| Coord::new(row, col)))
            .collect()
    }

    pub fn check_column(&self, col: u32) -> Result<()> {
        if col == 0 || col > self.n() {
            Err(Error::NoSuchColumn(col))
        } else {
            Ok(())
        }
    }

    /// Column storing the parities of `slope` (column-parity families only).
    pub fn parity_column(&self, slope: i32) -> Option<u32> {
        if self.family == CodeFamily::XCode {
            return None;
        }
        let pos = self.slopes().iter().position(|&s| s == slope)? as u32;
        Some(self.systematic_columns().end() + 1 + pos)
    }

    fn check_slope(&self, slope: i32) -> Result<()> {
        if self.slopes().contains(&slope) {
            Ok(())
        } else {
            Err(Error::InvalidSlope { slope, p: self.pv() })
        }
    }

    /// Normalised group index (`0` maps to `p`).
    fn norm_index(&self, g: ParityGroupId) -> Result<u32> {
        if g.index > self.pv() {
            return Err(Error::InvalidGroupIndex { index: g.index, p: self.pv() });
        }
        Ok(if g.index == 0 { self.pv() } else { g.index })
    }

    /// Cell holding the parity block of `g`, or `None` for an index-`p`
    /// adjuster line.
    pub fn parity_cell(&self, g: ParityGroupId) -> Result<Option<Coord>> {
        self.check_slope(g.slope)?;
        let i = self.norm_index(g)?;
        let p = self.pv();
        Ok(match self.family {
            CodeFamily::XCode => {
                let row = if g.slope == -1 { p - 1 } else { p };
                Some(Coord::new(row, i))
            }
            _ if i == p => None,
            _ => Some(Coord::new(i, self.parity_column(g.slope).unwrap())),
        })
    }

    /// Inverse of [`Code::parity_cell`].
    pub fn parity_owner(&self, c: Coord) -> Option<ParityGroupId> {
        let p = self.pv();
        match self.family {
            CodeFamily::XCode => match c.row {
                r if r == p - 1 => Some(ParityGroupId::new(-1, c.col)),
                r if r == p => Some(ParityGroupId::new(1, c.col)),
                _ => None,
            },
            _ => {
                let first = self.systematic_columns().end() + 1;
                if c.col < first || c.row == 0 || c.row >= p {
                    return None;
                }
                let slope = *self.slopes().get((c.col - first) as usize)?;
                Some(ParityGroupId::new(slope, c.row))
            }
        }
    }

    /// The group of `slope` whose line passes through `cell`.
    pub fn group_through(&self, cell: Coord, slope: i32) -> Result<ParityGroupId> {
        self.check_slope(slope)?;
        let (r, e) = (cell.row as i64, cell.col as i64);
        let index = match self.family {
            CodeFamily::XCode if slope == -1 => mod_index(e - r - 1, self.p),
            CodeFamily::XCode => mod_index(r + e + 1, self.p),
            _ => mod_index(r + slope as i64 * (e - 1), self.p),
        };
        Ok(ParityGroupId::new(slope, index))
    }

    /// Full definition of a parity group.
    pub fn group(&self, g: ParityGroupId) -> Result<GroupDef> {
        self.check_slope(g.slope)?;
        let i = self.norm_index(g)?;
        let p = self.pv();
        let id = ParityGroupId::new(g.slope, i);
        let parity = self.parity_cell(id)?;
        let invalid = || Err(Error::InvalidGroupIndex { index: g.index, p });
        let (members, adjuster) = match self.family {
            CodeFamily::XCode => {
                let members = (1..=p)
                    .map(|col| {
                        let row = if g.slope == -1 {
                            mod_index(col as i64 - i as i64 - 1, self.p)
                        } else {
                            mod_index(i as i64 - 1 - col as i64, self.p)
                        };
                        Coord::new(row, col)
                    })
                    .filter(|c| c.row <= p - 2)
                    .collect();
                (members, None)
            }
            CodeFamily::Rdp => {
                if i == p {
                    return invalid();
                }
                let members = if g.slope == 0 {
                    (1..p).map(|col| Coord::new(i, col)).collect()
                } else {
                    (1..=p)
                        .map(|col| Coord::new(line_row(self.p, 1, i, col), col))
                        .filter(|c| c.row != p)
                        .collect()
                };
                (members, None)
            }
            _ => {
                if i == p && g.slope == 0 {
                    return invalid();
                }
                let members = parity_group_members(self.p, id, p)?
                    .into_iter()
                    .filter(|m| !m.imaginary)
                    .map(|m| m.coord)
                    .collect();
                (members, (g.slope != 0).then_some(g.slope))
            }
        };
        Ok(GroupDef {
            id,
            parity,
            members,
            adjuster,
        })
    }

    /// Every group that owns a stored parity block, horizontal slope first.
    pub fn parity_groups(&self) -> Vec<GroupDef> {
        let mut slopes = self.slopes();
        slopes.sort_by_key(|&s| (s != 0, s));
        let indices: Vec<u32> = match self.family {
            CodeFamily::XCode => (1..=self.pv()).collect(),
            _ => (1..self.pv()).collect(),
        };
        slopes
            .iter()
            .flat_map(|&s| indices.iter().map(move |&i| ParityGroupId::new(s, i)))
            .map(|g| self.group(g).expect("enumerated groups are valid"))
            .collect()
    }

    /// Real cells whose XOR is the adjuster `S_slope` (empty for slope 0 and
    /// for families without adjusters).
    pub fn adjuster_cells(&self, slope: i32) -> Vec<Coord> {
        if !self.has_adjusters() || slope == 0 {
            return Vec::new();
        }
        let p = self.pv();
        (1..=p)
            .map(|col| Coord::new(line_row(self.p, slope, p, col), col))
            .filter(|c| c.row != p)
            .collect()
    }

    /// Index of a stored cell in a flat column-major layout.
    pub(crate) fn cell_index(&self, c: Coord) -> usize {
        ((c.col - 1) * self.rows() + (c.row - 1)) as usize
    }

    pub(crate) fn cell_count(&self) -> usize {
        (self.n() * self.rows()) as usize
    }
}

/// Encoded array: `n` columns of `rows()` blocks each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeGrid {
    code: Code,
    block_size: usize,
    columns: Vec<Vec<Block>>,
}

impl CodeGrid {
    pub fn zeroed(code: Code, block_size: usize) -> Self {
        let col = vec![Block::zero(block_size); code.rows() as usize];
        Self {
            code,
            block_size,
            columns: vec![col; code.n() as usize],
        }
    }

    /// Build from raw columns, checking the shape.
    pub fn from_columns(code: Code, block_size: usize, columns: Vec<Vec<Block>>) -> Result<Self> {
        if columns.len() != code.n() as usize {
            return Err(Error::ShapeMismatch {
                expected: format!("{} columns", code.n()),
                actual: format!("{} columns", columns.len()),
            });
        }
        for col in &columns {
            if col.len() != code.rows() as usize {
                return Err(Error::ShapeMismatch {
                    expected: format!("{} rows", code.rows()),
                    actual: format!("{} rows", col.len()),
                });
            }
            if let Some(b) = col.iter().find(|b| b.len() != block_size) {
                return Err(Error::LengthMismatch {
                    left: block_size,
                    right: b.len(),
                });
            }
        }
        Ok(Self {
            code,
            block_size,
            columns,
        })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn get(&self, c: Coord) -> &Block {
        &self.columns[(c.col - 1) as usize][(c.row - 1) as usize]
    }

    pub fn set(&mut self, c: Coord, b: Block) {
        debug_assert_eq!(b.len(), self.block_size);
        self.columns[(c.col - 1) as usize][(c.row - 1) as usize] = b;
    }

    pub fn column(&self, col: u32) -> &[Block] {
        &self.columns[(col - 1) as usize]
    }

    pub fn set_column(&mut self, col: u32, blocks: Vec<Block>) {
        self.columns[(col - 1) as usize] = blocks;
    }

    pub fn columns(&self) -> &[Vec<Block>] {
        &self.columns
    }

    /// Overwrite the listed columns with zero blocks.
    pub fn erase(&mut self, cols: &[u32]) {
        for &c in cols {
            let rows = self.code.rows() as usize;
            self.columns[(c - 1) as usize] = vec![Block::zero(self.block_size); rows];
        }
    }

    /// XOR of the group's parity, members, and adjuster; zero on a codeword.
    pub fn group_syndrome(&self, g: &GroupDef) -> Block {
        let mut acc = Block::zero(self.block_size);
        for c in g.parity.iter().chain(&g.members) {
            acc ^= self.get(*c);
        }
        if let Some(v) = g.adjuster {
            acc ^= &adjuster(self, v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_per_family() {
        let cases = [
            (CodeFamily::Evenodd, 7, 5, 4),
            (CodeFamily::ExtendedEvenodd { r: 3 }, 8, 5, 4),
            (CodeFamily::Rdp, 6, 4, 4),
            (CodeFamily::XCode, 5, 3, 5),
            (CodeFamily::Star, 8, 5, 4),
        ];
        for (fam, n, k, rows) in cases {
            let code = Code::new(fam, 5).unwrap();
            assert_eq!((code.n(), code.k(), code.rows()), (n, k, rows), "{fam}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Code::new(CodeFamily::Evenodd, 4).is_err());
        assert!(Code::new(CodeFamily::ExtendedEvenodd { r: 1 }, 5).is_err());
        assert!(Code::new(CodeFamily::ExtendedEvenodd { r: 6 }, 5).is_err());
    }

    #[test]
    fn parity_owner_inverts_parity_cell() {
        for fam in [CodeFamily::Evenodd, CodeFamily::Rdp, CodeFamily::XCode, CodeFamily::Star] {
            let code = Code::new(fam, 7).unwrap();
            for g in code.parity_groups() {
                let cell = g.parity.unwrap();
                assert_eq!(code.parity_owner(cell), Some(g.id), "{fam} {}", g.id);
            }
        }
    }

    #[test]
    fn group_through_contains_cell() {
        for fam in [CodeFamily::Evenodd, CodeFamily::Rdp, CodeFamily::XCode, CodeFamily::Star] {
            let code = Code::new(fam, 7).unwrap();
            for cell in code.info_cells() {
                for s in code.slopes() {
                    let Ok(g) = code.group_through(cell, s).and_then(|g| code.group(g)) else {
                        // RDP's missing diagonal
                        assert_eq!(fam, CodeFamily::Rdp);
                        continue;
                    };
                    assert!(g.members.contains(&cell), "{fam} {cell} slope {s}");
                }
            }
        }
    }

    #[test]
    fn xcode_groups_have_p_minus_two_members() {
        let code = Code::new(CodeFamily::XCode, 7).unwrap();
        for g in code.parity_groups() {
            assert_eq!(g.members.len(), 5);
            assert!(g.members.iter().all(|c| c.col != g.parity.unwrap().col));
        }
    }

    #[test]
    fn family_names_round_trip() {
        for fam in [
            CodeFamily::Evenodd,
            CodeFamily::ExtendedEvenodd { r: 3 },
            CodeFamily::Rdp,
            CodeFamily::XCode,
            CodeFamily::Star,
        ] {
            assert_eq!(CodeFamily::parse(fam.name(), Some(3)).unwrap(), fam);
            assert_eq!(CodeFamily::from_tag(fam.tag(), 3).unwrap(), fam);
        }
        assert!(CodeFamily::parse("raid9", None).is_err());
    }
}
