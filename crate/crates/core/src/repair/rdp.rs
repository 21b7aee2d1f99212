use crate::codes::{Code, CodeFamily};
use crate::error::Result;
use crate::grid::{mod_index, Coord, ParityGroupId};

use super::{assemble, require_family, require_systematic, RepairPlan};

/// Single systematic erasure for RDP: `(p - 1) / 2` rows by row parity and
/// the rest by diagonal parity.
///
/// The row whose diagonal is the missing one must go horizontal; the other
/// horizontal rows are the lowest remaining.
pub fn plan_rdp_single(code: &Code, erased_col: u32) -> Result<RepairPlan> {
    require_family(code, code.family() == CodeFamily::Rdp, "RDP single-erasure")?;
    require_systematic(code, erased_col)?;
    let p = code.p().get();
    let forced = mod_index(1 - erased_col as i64, code.p());
    let mut horizontal = Vec::new();
    if forced != p {
        horizontal.push(forced);
    }
    for row in 1..p {
        if horizontal.len() as u32 == (p - 1) / 2 {
            break;
        }
        if !horizontal.contains(&row) {
            horizontal.push(row);
        }
    }
    let groups: Vec<ParityGroupId> = (1..p)
        .map(|row| {
            let slope = if horizontal.contains(&row) { 0 } else { 1 };
            code.group_through(Coord::new(row, erased_col), slope)
        })
        .collect::<Result<_>>()?;
    let mut plan = assemble(code, &[erased_col], erased_col, groups)?;
    plan.horizontal = Some((p - 1) / 2);
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rdp_gamma;
    use crate::codes::encode_bytes;
    use crate::error::Error;
    use crate::repair::execute_on_grid;

    #[test]
    fn examples() {
        for (p, want) in [(3, 3), (5, 12), (7, 27)] {
            let code = Code::new(CodeFamily::Rdp, p).unwrap();
            assert_eq!(plan_rdp_single(&code, 1).unwrap().gamma(), want);
        }
    }

    #[test]
    fn every_column_meets_the_formula_and_rebuilds() {
        for p in [3, 5, 7, 11, 13] {
            let code = Code::new(CodeFamily::Rdp, p).unwrap();
            let data: Vec<u8> = (0..code.info_blocks() as usize * 2).map(|i| (i * 29 + p as usize) as u8).collect();
            let grid = encode_bytes(code, &data, 2).unwrap();
            for e in 1..p {
                let plan = plan_rdp_single(&code, e).unwrap();
                assert_eq!(plan.gamma() as u64, rdp_gamma(p), "p={p} col {e}");
                assert!(plan.groups.iter().all(|g| g.index != p));
                let mut damaged = grid.clone();
                damaged.erase(&[e]);
                assert_eq!(execute_on_grid(&plan, &damaged).unwrap(), grid.column(e));
            }
        }
    }

    #[test]
    fn rejects_parity_columns() {
        let code = Code::new(CodeFamily::Rdp, 5).unwrap();
        assert_eq!(plan_rdp_single(&code, 5), Err(Error::NotSystematic(5)));
        assert_eq!(plan_rdp_single(&code, 9), Err(Error::NoSuchColumn(9)));
    }
}
