use crate::analysis::Partition;
use crate::codes::{Code, CodeFamily};
use crate::error::{Error, Result};
use crate::grid::{Coord, ParityGroupId};

use super::{assemble, ensure_sums, require_systematic, RepairPlan};

/// Single systematic erasure for extended EVENODD: row `m` of the erased
/// column is rebuilt from the slope-`v` group through it, where `m` is in
/// `M_v`. The default partition is [`Partition::by_residue`].
///
/// All `r` sum blocks are sent. `r = 2` (plain EVENODD) is accepted so
/// partitions can be compared against the two-slope planner.
pub fn plan_extended_single(code: &Code, erased_col: u32, partition: Option<&Partition>) -> Result<RepairPlan> {
    let r = match code.family() {
        CodeFamily::ExtendedEvenodd { r } => r,
        CodeFamily::Evenodd => 2,
        other => {
            return Err(Error::InvalidParameters(format!(
                "extended EVENODD planner does not apply to {other}"
            )))
        }
    };
    if !(2..=5).contains(&r) {
        return Err(Error::InvalidParameters(format!("extended EVENODD repair supports r in 3..=5, got {r}")));
    }
    require_systematic(code, erased_col)?;
    let p = code.p().get();
    let default;
    let partition = match partition {
        Some(part) => part,
        None => {
            default = Partition::by_residue(p, r)?;
            &default
        }
    };
    if partition.p() != p || partition.r() != r {
        return Err(Error::InvalidPartition(format!(
            "partition is for p = {}, r = {} but the code has p = {p}, r = {r}",
            partition.p(),
            partition.r()
        )));
    }
    let groups: Vec<ParityGroupId> = (1..p)
        .map(|row| {
            let v = partition.slope_of(row).expect("partition covers every row");
            code.group_through(Coord::new(row, erased_col), v)
        })
        .collect::<Result<_>>()?;
    let mut plan = assemble(code, &[erased_col], erased_col, groups)?;
    ensure_sums(code, &mut plan, &(0..r as i32).collect::<Vec<_>>())?;
    Ok(plan)
}
