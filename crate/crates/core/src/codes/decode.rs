//! Erasure decoding as a binary linear solve over the parity-check equations.
//!
//! The elimination depends only on the code and the erased columns, so the
//! resulting recipe (which surviving cells XOR into each lost cell) is cached
//! per pattern.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::gf2::{self, Term};
use crate::grid::{Block, Coord};

use super::{Code, CodeFamily, CodeGrid};

#[derive(Debug)]
struct Recipe {
    /// Lost cell and the flat indices of surviving cells XOR-ing to it.
    cells: Vec<(Coord, Vec<usize>)>,
    /// Surviving-cell combinations that must XOR to zero.
    checks: Vec<Vec<usize>>,
}

type Key = (Code, Vec<u32>);

fn cache() -> &'static Mutex<HashMap<Key, Arc<Recipe>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Recipe>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn build_recipe(code: &Code, erased: &[u32]) -> Result<Recipe> {
    let lost: Vec<Coord> = erased
        .iter()
        .flat_map(|&col| (1..=code.rows()).map(move |row| Coord::new(row, col)))
        .collect();
    let unknown_of: HashMap<Coord, usize> = lost.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let term = |c: Coord| match unknown_of.get(&c) {
        Some(&u) => Term::Unknown(u),
        None => Term::Known(code.cell_index(c)),
    };

    let equations: Vec<Vec<Term>> = code
        .parity_groups()
        .iter()
        .map(|g| {
            let adj = g.adjuster.map(|v| code.adjuster_cells(v)).unwrap_or_default();
            g.parity.iter().chain(&g.members).chain(&adj).map(|&c| term(c)).collect()
        })
        .collect();

    let sol = gf2::solve(lost.len(), code.cell_count(), &equations);
    let mut cells = Vec::with_capacity(lost.len());
    for (i, c) in lost.iter().enumerate() {
        match &sol.recipes[i] {
            Some(r) => cells.push((*c, r.clone())),
            None => {
                return Err(Error::RankDeficient(format!(
                    "{} cannot be recovered with columns {erased:?} erased",
                    c
                )))
            }
        }
    }
    Ok(Recipe {
        cells,
        checks: sol.checks,
    })
}

fn recipe_for(code: &Code, erased: &[u32]) -> Result<Arc<Recipe>> {
    let key = (*code, erased.to_vec());
    if let Some(r) = cache().lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let recipe = Arc::new(build_recipe(code, erased)?);
    // concurrent fills compute the same recipe; last write wins harmlessly
    cache().lock().unwrap().insert(key, recipe.clone());
    Ok(recipe)
}

fn max_erasures(code: &Code) -> usize {
    match code.family() {
        CodeFamily::ExtendedEvenodd { r } if r > 3 && !cfg!(feature = "unchecked-mds") => 3,
        _ => code.redundancy(),
    }
}

/// Recover the erased columns of `grid`. Contents of erased columns are
/// ignored. Fails if the pattern exceeds the redundancy or the surviving
/// columns do not form part of a codeword.
pub fn decode(grid: &CodeGrid, erased: &[u32]) -> Result<CodeGrid> {
    let code = *grid.code();
    let mut erased = erased.to_vec();
    erased.sort_unstable();
    erased.dedup();
    for &c in &erased {
        code.check_column(c)?;
    }
    let limit = max_erasures(&code);
    if erased.len() > limit {
        return Err(Error::TooManyErasures {
            erased: erased.len(),
            redundancy: limit,
        });
    }

    let recipe = recipe_for(&code, &erased)?;
    let bs = grid.block_size();
    let flat: Vec<&Block> = grid.columns().iter().flatten().collect();
    let xor_of = |idx: &[usize]| {
        idx.iter().fold(Block::zero(bs), |mut acc, &i| {
            acc ^= flat[i];
            acc
        })
    };

    if recipe.checks.iter().any(|chk| !xor_of(chk).is_zero()) {
        return Err(Error::Corrupt);
    }
    let mut out = grid.clone();
    for (cell, idx) in &recipe.cells {
        out.set(*cell, xor_of(idx));
    }
    Ok(out)
}
