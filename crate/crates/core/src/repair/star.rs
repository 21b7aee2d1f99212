use std::collections::HashSet;

use crate::codes::{Code, CodeFamily};
use crate::error::{Error, Result};
use crate::grid::{mod_index, Coord, ParityGroupId};

use super::{assemble, require_family, require_systematic, solve_plan, RepairPlan, Schedule};

fn check_pair(code: &Code, target: u32, other: u32) -> Result<()> {
    require_family(code, code.family() == CodeFamily::Star, "STAR double-erasure")?;
    require_systematic(code, target)?;
    require_systematic(code, other)?;
    if target == other {
        return Err(Error::InvalidParameters(format!("erased columns must differ, got {target} twice")));
    }
    Ok(())
}

/// The fixed schedule for target column `e` and offset `x`: for
/// `k = 0, 2, .., p-3` the slope -1, 0 and 1 groups through rows `kx`,
/// `(k+1)x` and `(k+2)x` of the target (row 0 read as the imaginary row).
pub(crate) fn literal_schedule(code: &Code, target: u32, x: u32) -> Result<Vec<ParityGroupId>> {
    let p = code.p();
    let mut groups = Vec::new();
    for k in (0..p.get() - 2).step_by(2) {
        for (step, slope) in [(0, -1), (1, 0), (2, 1)] {
            let row = mod_index(((k + step) * x) as i64, p);
            groups.push(code.group_through(Coord::new(row, target), slope)?);
        }
    }
    Ok(groups)
}

/// First column of a STAR double erasure.
///
/// Uses the `3(p-1)/2`-group schedule with `x` the column offset from
/// `target` to `other` (mod p). If the solve check rejects it, falls back to
/// [`plan_star_greedy`]. The plan records which path produced it.
pub fn plan_star_double(code: &Code, target: u32, other: u32) -> Result<RepairPlan> {
    check_pair(code, target, other)?;
    let x = mod_index(other as i64 - target as i64, code.p());
    let groups = literal_schedule(code, target, x)?;
    let mut plan = assemble(code, &[target, other], target, groups)?;
    if solve_plan(code, &plan).is_ok() {
        plan.schedule = Some(Schedule::Literal);
        return Ok(plan);
    }
    plan_star_greedy(code, target, other)
}

/// Peeling search: repeatedly take the group with exactly one unresolved
/// erased cell that costs the fewest new blocks, until the target column is
/// resolved.
pub fn plan_star_greedy(code: &Code, target: u32, other: u32) -> Result<RepairPlan> {
    check_pair(code, target, other)?;
    let p = code.p().get();
    let erased = [target, other];
    let mut candidates = Vec::new();
    for &v in &[0, 1, -1] {
        let top = if v == 0 { p - 1 } else { p };
        for i in 1..=top {
            candidates.push(code.group(ParityGroupId::new(v, i))?);
        }
    }

    let mut unknown: HashSet<Coord> = erased
        .iter()
        .flat_map(|&c| (1..p).map(move |row| Coord::new(row, c)))
        .collect();
    let mut sent: HashSet<Coord> = HashSet::new();
    let mut chosen: Vec<ParityGroupId> = Vec::new();
    while (1..p).any(|row| unknown.contains(&Coord::new(row, target))) {
        let mut best: Option<(usize, usize, Coord)> = None;
        for (ci, g) in candidates.iter().enumerate() {
            if chosen.contains(&g.id) {
                continue;
            }
            let open: Vec<Coord> = g.members.iter().filter(|c| unknown.contains(c)).copied().collect();
            if open.len() != 1 {
                continue;
            }
            let cost = g
                .parity
                .iter()
                .chain(&g.members)
                .filter(|c| !erased.contains(&c.col) && !sent.contains(c))
                .count();
            if best.is_none_or(|(b, _, _)| cost < b) {
                best = Some((cost, ci, open[0]));
            }
        }
        let (_, ci, cell) = best.ok_or_else(|| {
            Error::RankDeficient(format!("no peeling schedule for columns {target} and {other}"))
        })?;
        let g = &candidates[ci];
        sent.extend(g.parity.iter().chain(&g.members).filter(|c| !erased.contains(&c.col)));
        unknown.remove(&cell);
        chosen.push(g.id);
    }
    let mut plan = assemble(code, &erased, target, chosen)?;
    solve_plan(code, &plan)?;
    plan.schedule = Some(Schedule::Greedy);
    Ok(plan)
}

/// Parity-derived values a STAR plan uses: one per group, counting a stored
/// parity block or, for an index-`p` line, the adjuster itself.
pub fn star_parity_values(code: &Code, plan: &RepairPlan) -> Result<usize> {
    let mut n = plan.count("parity");
    for &g in &plan.groups {
        if code.parity_cell(g)?.is_none() {
            n += 1;
        }
    }
    Ok(n)
}
