use std::collections::HashMap;

use crate::codes::{Code, CodeGrid};
use crate::error::{Error, Result};
use crate::gf2::{self, Term};
use crate::grid::{Block, Coord};

use super::{Payload, RepairPlan, Transmission};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Sym {
    Cell(Coord),
    Adjuster(i32),
}

/// Symbolic solve: for each row of the target column, the transmissions
/// whose XOR rebuilds it. Fails with [`Error::RankDeficient`] when the
/// transmitted blocks do not determine the column.
pub fn solve_plan(code: &Code, plan: &RepairPlan) -> Result<Vec<Vec<usize>>> {
    for t in &plan.transmissions {
        if plan.erased.contains(&t.source) {
            return Err(Error::ErasedSource(t.source));
        }
    }

    let mut known_cell: HashMap<Coord, usize> = HashMap::new();
    let mut sums: HashMap<i32, usize> = HashMap::new();
    for (i, t) in plan.transmissions.iter().enumerate() {
        match t.payload {
            Payload::RawBlock(c) => {
                known_cell.insert(c, i);
            }
            Payload::ParityBlock(g) => {
                if let Some(c) = code.parity_cell(g)? {
                    known_cell.insert(c, i);
                }
            }
            Payload::ParitySum(v) => {
                sums.insert(v, i);
            }
        }
    }

    let mut unknowns: HashMap<Sym, usize> = HashMap::new();
    let mut unknown = |s: Sym| {
        let n = unknowns.len();
        Term::Unknown(*unknowns.entry(s).or_insert(n))
    };
    let mut equations = Vec::new();
    let mut adjusted = Vec::new();
    for &g in &plan.groups {
        let def = code.group(g)?;
        let mut eq = Vec::new();
        for &c in def.parity.iter().chain(&def.members) {
            eq.push(match known_cell.get(&c) {
                Some(&i) => Term::Known(i),
                None => unknown(Sym::Cell(c)),
            });
        }
        if let Some(v) = def.adjuster {
            eq.push(unknown(Sym::Adjuster(v)));
            if !adjusted.contains(&v) {
                adjusted.push(v);
            }
        }
        equations.push(eq);
    }
    // S_v = sum of slope-0 parities + sum of slope-v parities
    for v in adjusted {
        if let (Some(&s0), Some(&sv)) = (sums.get(&0), sums.get(&v)) {
            equations.push(vec![unknown(Sym::Adjuster(v)), Term::Known(s0), Term::Known(sv)]);
        }
    }

    let targets: Vec<Coord> = (1..=code.rows()).map(|row| Coord::new(row, plan.target)).collect();
    let sol = gf2::solve(unknowns.len(), plan.transmissions.len(), &equations);
    targets
        .iter()
        .map(|c| {
            unknowns
                .get(&Sym::Cell(*c))
                .and_then(|&u| sol.recipes[u].clone())
                .ok_or_else(|| Error::RankDeficient(format!("{c} is not determined by the plan")))
        })
        .collect()
}

/// Run a plan: fetch every transmission, then rebuild the target column.
pub fn execute_plan<F>(code: &Code, plan: &RepairPlan, block_size: usize, mut fetch: F) -> Result<Vec<Block>>
where
    F: FnMut(&Transmission) -> Result<Block>,
{
    let recipes = solve_plan(code, plan)?;
    let values: Vec<Block> = plan.transmissions.iter().map(&mut fetch).collect::<Result<_>>()?;
    if let Some(b) = values.iter().find(|b| b.len() != block_size) {
        return Err(Error::LengthMismatch {
            left: block_size,
            right: b.len(),
        });
    }
    Ok(recipes
        .iter()
        .map(|idx| {
            idx.iter().fold(Block::zero(block_size), |mut acc, &i| {
                acc ^= &values[i];
                acc
            })
        })
        .collect())
}

/// Answer a transmission from a grid's stored contents.
pub(crate) fn serve(grid: &CodeGrid, t: &Transmission) -> Result<Block> {
    let code = grid.code();
    Ok(match t.payload {
        Payload::RawBlock(c) => grid.get(c).clone(),
        Payload::ParityBlock(g) => {
            let c = code
                .parity_cell(g)?
                .ok_or_else(|| Error::InvalidParameters(format!("{g} has no stored parity block")))?;
            grid.get(c).clone()
        }
        Payload::ParitySum(v) => {
            let col = code.parity_column(v).ok_or(Error::InvalidSlope {
                slope: v,
                p: code.p().get(),
            })?;
            grid.column(col).iter().fold(Block::zero(grid.block_size()), |mut acc, b| {
                acc ^= b;
                acc
            })
        }
    })
}

/// Execute a plan against a grid whose erased columns must not be read.
pub fn execute_on_grid(plan: &RepairPlan, survivors: &CodeGrid) -> Result<Vec<Block>> {
    execute_plan(survivors.code(), plan, survivors.block_size(), |t| serve(survivors, t))
}
