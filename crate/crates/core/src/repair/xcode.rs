use crate::codes::{Code, CodeFamily};
use crate::error::{Error, Result};
use crate::grid::{Coord, ParityGroupId};

use super::{assemble, require_family, RepairPlan};

/// Largest γ accepted for an X-code plan, `floor((3p² - 2p + 5) / 4)`.
fn budget(p: u32) -> usize {
    ((3 * p * p - 2 * p + 5) / 4) as usize
}

/// Single column erasure for X-code.
///
/// The two parity blocks of the column can only come back through their own
/// groups. Information rows `1..=(p-1)/2` then use slope 1 and the rest
/// slope -1. If that misses the budget, every slope assignment is tried in
/// lexicographic order.
pub fn plan_xcode_single(code: &Code, erased_col: u32) -> Result<RepairPlan> {
    require_family(code, code.family() == CodeFamily::XCode, "X-code single-erasure")?;
    code.check_column(erased_col)?;
    let p = code.p().get();
    if p < 5 {
        return Err(Error::InvalidParameters("X-code repair needs p >= 5".into()));
    }
    let info_rows = code.info_rows();
    let build = |slope_of: &dyn Fn(u32) -> i32| -> Result<RepairPlan> {
        let mut groups = vec![ParityGroupId::new(-1, erased_col), ParityGroupId::new(1, erased_col)];
        for row in 1..=info_rows {
            let g = code.group_through(Coord::new(row, erased_col), slope_of(row))?;
            if !groups.contains(&g) {
                groups.push(g);
            }
        }
        assemble(code, &[erased_col], erased_col, groups)
    };

    let plan = build(&|row| if row <= (p - 1) / 2 { 1 } else { -1 })?;
    if plan.gamma() <= budget(p) || info_rows > 20 {
        return Ok(plan);
    }
    let mut best = plan;
    for mask in 0u32..(1 << info_rows) {
        let candidate = build(&|row| if mask >> (row - 1) & 1 == 1 { 1 } else { -1 })?;
        if candidate.gamma() < best.gamma() {
            best = candidate;
        }
        if best.gamma() <= budget(p) {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{encode, encode_bytes};
    use crate::grid::Block;
    use crate::repair::{execute_on_grid, solve_plan};

    #[test]
    fn within_budget_and_rebuilds() {
        for p in [5, 7, 11, 13] {
            let code = Code::new(CodeFamily::XCode, p).unwrap();
            let data: Vec<u8> = (0..code.info_blocks() as usize * 3).map(|i| (i * 13 + 7) as u8).collect();
            let grid = encode_bytes(code, &data, 3).unwrap();
            for e in 1..=p {
                let plan = plan_xcode_single(&code, e).unwrap();
                assert!(plan.gamma() <= budget(p), "p={p} col {e}: {}", plan.gamma());
                let mut damaged = grid.clone();
                damaged.erase(&[e]);
                assert_eq!(execute_on_grid(&plan, &damaged).unwrap(), grid.column(e));
            }
        }
        assert_eq!(budget(5), 17);
        assert_eq!(budget(7), 34);
    }

    #[test]
    fn forced_groups_come_first() {
        let code = Code::new(CodeFamily::XCode, 5).unwrap();
        let plan = plan_xcode_single(&code, 1).unwrap();
        assert_eq!(plan.groups[..2], [ParityGroupId::new(-1, 1), ParityGroupId::new(1, 1)]);
        assert_eq!(solve_plan(&code, &plan).unwrap().len(), 5);
    }

    #[test]
    fn zero_data_rebuilds_zero() {
        let code = Code::new(CodeFamily::XCode, 7).unwrap();
        let info = vec![vec![Block::zero(4); 5]; 7];
        let grid = encode(code, &info).unwrap();
        let plan = plan_xcode_single(&code, 4).unwrap();
        let mut damaged = grid.clone();
        damaged.erase(&[4]);
        assert!(execute_on_grid(&plan, &damaged).unwrap().iter().all(Block::is_zero));
    }

    #[test]
    fn refuses_p3() {
        let code = Code::new(CodeFamily::XCode, 3).unwrap();
        assert!(matches!(plan_xcode_single(&code, 1), Err(Error::InvalidParameters(_))));
    }
}
