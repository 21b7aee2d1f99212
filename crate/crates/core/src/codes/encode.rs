use crate::error::{Error, Result};
use crate::grid::Block;

use super::{Code, CodeGrid};

/// The adjuster `S_v`: XOR of the slope-`v` line through the imaginary cell
/// of column 1. Zero for slope 0 and for families without adjusters.
pub fn adjuster(grid: &CodeGrid, slope: i32) -> Block {
    let mut acc = Block::zero(grid.block_size());
    for c in grid.code().adjuster_cells(slope) {
        acc ^= grid.get(c);
    }
    acc
}

/// Encode one vector of `info_rows()` blocks per systematic column.
pub fn encode(code: Code, info: &[Vec<Block>]) -> Result<CodeGrid> {
    let cols = code.systematic_columns().count();
    if info.len() != cols || info.iter().any(|c| c.len() != code.info_rows() as usize) {
        return Err(Error::ShapeMismatch {
            expected: format!("{} x {}", code.info_rows(), cols),
            actual: format!(
                "{} x {}",
                info.first().map_or(0, |c| c.len()),
                info.len()
            ),
        });
    }
    let block_size = info.first().and_then(|c| c.first()).map_or(1, Block::len);
    let mut grid = CodeGrid::zeroed(code, block_size);
    for (cell, block) in code.info_cells().into_iter().zip(info.iter().flatten()) {
        if block.len() != block_size {
            return Err(Error::LengthMismatch {
                left: block_size,
                right: block.len(),
            });
        }
        grid.set(cell, block.clone());
    }
    fill_parities(&mut grid);
    Ok(grid)
}

/// Recompute every parity cell from the information cells.
pub(crate) fn fill_parities(grid: &mut CodeGrid) {
    let code = *grid.code();
    let adjusters: Vec<(i32, Block)> = code.slopes().iter().map(|&s| (s, adjuster(grid, s))).collect();
    // horizontal groups come first, so RDP diagonals see finished row parities
    for g in code.parity_groups() {
        let mut acc = Block::zero(grid.block_size());
        for c in &g.members {
            acc ^= grid.get(*c);
        }
        if let Some(v) = g.adjuster {
            acc ^= &adjusters.iter().find(|(s, _)| *s == v).unwrap().1;
        }
        grid.set(g.parity.expect("parity groups own a parity cell"), acc);
    }
}

/// Spread `data` over the information cells column-major, zero padding the
/// tail, and encode.
pub fn encode_bytes(code: Code, data: &[u8], block_size: usize) -> Result<CodeGrid> {
    if block_size == 0 {
        return Err(Error::InvalidParameters("block size must be at least 1".into()));
    }
    let capacity = code.info_blocks() as usize * block_size;
    if data.len() > capacity {
        return Err(Error::InvalidParameters(format!(
            "{} bytes exceed the stripe capacity of {capacity}",
            data.len()
        )));
    }
    let mut grid = CodeGrid::zeroed(code, block_size);
    for (i, cell) in code.info_cells().into_iter().enumerate() {
        let start = (i * block_size).min(data.len());
        let end = ((i + 1) * block_size).min(data.len());
        let mut bytes = data[start..end].to_vec();
        bytes.resize(block_size, 0);
        grid.set(cell, Block::from_bytes(bytes));
    }
    fill_parities(&mut grid);
    Ok(grid)
}

/// Inverse of [`encode_bytes`]: the first `len` bytes of the information cells.
pub fn extract_bytes(grid: &CodeGrid, len: usize) -> Vec<u8> {
    let mut out: Vec<u8> = grid
        .code()
        .info_cells()
        .into_iter()
        .flat_map(|c| grid.get(c).as_bytes().to_vec())
        .collect();
    out.truncate(len);
    out
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::codes::CodeFamily;
    use crate::grid::Coord;

    const FAMILIES: [CodeFamily; 6] = [
        CodeFamily::Evenodd,
        CodeFamily::ExtendedEvenodd { r: 3 },
        CodeFamily::ExtendedEvenodd { r: 4 },
        CodeFamily::Rdp,
        CodeFamily::XCode,
        CodeFamily::Star,
    ];

    fn random_info(code: Code, bs: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Block>> {
        (0..code.systematic_columns().count())
            .map(|_| {
                (0..code.info_rows())
                    .map(|_| Block::from_bytes((0..bs).map(|_| rng.random()).collect::<Vec<u8>>()))
                    .collect()
            })
            .collect()
    }

    fn bit(v: u8) -> Block {
        Block::from_bytes(vec![v])
    }

    fn single_bit_evenodd3(cell: Coord) -> CodeGrid {
        let code = Code::new(CodeFamily::Evenodd, 3).unwrap();
        let mut info = vec![vec![bit(0); 2]; 3];
        info[(cell.col - 1) as usize][(cell.row - 1) as usize] = bit(1);
        encode(code, &info).unwrap()
    }

    #[test]
    fn all_zero_info_gives_zero_parities() {
        for fam in FAMILIES {
            let code = Code::new(fam, 7).unwrap();
            let info = vec![vec![Block::zero(4); code.info_rows() as usize]; code.systematic_columns().count()];
            let grid = encode(code, &info).unwrap();
            assert!(grid.columns().iter().flatten().all(Block::is_zero), "{fam}");
        }
    }

    #[test]
    fn evenodd_p3_single_bit_at_a11() {
        let g = single_bit_evenodd3(Coord::new(1, 1));
        // column 4 is slope 0, column 5 is slope 1
        assert_eq!(g.column(4), &[bit(1), bit(0)]);
        assert_eq!(g.column(5), &[bit(1), bit(0)]);
        assert!(adjuster(&g, 1).is_zero());
    }

    #[test]
    fn evenodd_p3_single_bit_at_a13_sets_adjuster() {
        let g = single_bit_evenodd3(Coord::new(1, 3));
        assert_eq!(adjuster(&g, 1), bit(1));
        assert_eq!(g.column(4), &[bit(1), bit(0)]);
        assert_eq!(g.column(5), &[bit(1), bit(1)]);
    }

    #[test]
    fn rejects_wrong_shape() {
        let code = Code::new(CodeFamily::Rdp, 5).unwrap();
        let info = vec![vec![bit(0); 4]; 5];
        assert!(matches!(encode(code, &info), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn every_parity_group_checks_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for fam in FAMILIES {
            for p in [3, 5, 7, 11] {
                let Ok(code) = Code::new(fam, p) else { continue };
                let grid = encode(code, &random_info(code, 3, &mut rng)).unwrap();
                for g in code.parity_groups() {
                    assert!(grid.group_syndrome(&g).is_zero(), "{fam} p={p} {}", g.id);
                }
            }
        }
    }

    #[test]
    fn encode_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for fam in FAMILIES {
            let code = Code::new(fam, 7).unwrap();
            let a = random_info(code, 2, &mut rng);
            let b = random_info(code, 2, &mut rng);
            let ab: Vec<Vec<Block>> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u ^ v).collect())
                .collect();
            let (ga, gb, gab) = (encode(code, &a).unwrap(), encode(code, &b).unwrap(), encode(code, &ab).unwrap());
            for (col, ((ca, cb), cab)) in ga.columns().iter().zip(gb.columns()).zip(gab.columns()).enumerate() {
                for ((x, y), z) in ca.iter().zip(cb).zip(cab) {
                    assert_eq!(&(x ^ y), z, "{fam} column {}", col + 1);
                }
            }
        }
    }

    #[test]
    fn evenodd_parity_sums_give_adjuster() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [3, 5, 7, 13] {
            for fam in [CodeFamily::Evenodd, CodeFamily::Star, CodeFamily::ExtendedEvenodd { r: 3 }] {
                let code = Code::new(fam, p).unwrap();
                let grid = encode(code, &random_info(code, 4, &mut rng)).unwrap();
                let sum = |col: u32| {
                    grid.column(col).iter().fold(Block::zero(4), |acc, b| &acc ^ b)
                };
                for &v in code.slopes().iter().filter(|&&v| v != 0) {
                    let s = &sum(code.parity_column(0).unwrap()) ^ &sum(code.parity_column(v).unwrap());
                    assert_eq!(s, adjuster(&grid, v), "{fam} p={p} slope {v}");
                }
            }
        }
    }

    #[test]
    fn bytes_round_trip_with_padding() {
        let code = Code::new(CodeFamily::Evenodd, 5).unwrap();
        let data: Vec<u8> = (0..100u8).collect();
        let grid = encode_bytes(code, &data, 16).unwrap();
        assert_eq!(grid.columns().len(), 7);
        assert_eq!(extract_bytes(&grid, 100), data);
        assert!(encode_bytes(code, &vec![0; 321], 16).is_err());
        assert!(encode_bytes(code, &[], 0).is_err());
    }
}
