use crate::codes::Code;
use crate::error::{Error, Result};
use crate::grid::{Coord, ParityGroupId};

use super::{assemble, ensure_sums, require_family, require_systematic, RepairPlan};

/// Single systematic erasure with the horizontal and diagonal parities.
///
/// Rows `1..=x` of the erased column are rebuilt from horizontal groups and
/// the remaining rows from diagonal groups. `x` defaults to `(p - 1) / 2`.
/// Works for any code carrying slopes 0 and 1 with adjusters (EVENODD, STAR,
/// extended EVENODD). The two sum blocks recovering `S_1` are always sent.
pub fn plan_evenodd_single(code: &Code, erased_col: u32, x: Option<u32>) -> Result<RepairPlan> {
    require_family(
        code,
        code.has_adjusters() && code.slopes().contains(&1),
        "EVENODD single-erasure",
    )?;
    require_systematic(code, erased_col)?;
    let p = code.p().get();
    let x = x.unwrap_or((p - 1) / 2);
    if x > p - 1 {
        return Err(Error::OutOfRange(format!("x = {x} exceeds p - 1 = {}", p - 1)));
    }
    let groups: Vec<ParityGroupId> = (1..p)
        .map(|row| {
            let slope = if row <= x { 0 } else { 1 };
            code.group_through(Coord::new(row, erased_col), slope)
        })
        .collect::<Result<_>>()?;
    let mut plan = assemble(code, &[erased_col], erased_col, groups)?;
    ensure_sums(code, &mut plan, &[0, 1])?;
    plan.horizontal = Some(x);
    Ok(plan)
}
