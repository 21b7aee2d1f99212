//! Repair plans: which parity groups rebuild an erased column and which
//! blocks must cross the network to do it.
//!
//! A plan is an ordered, duplicate-free list of [`Transmission`]s. Its length
//! is the repair bandwidth. Blocks shared by several chosen groups (crossings)
//! are sent once; imaginary cells are never sent.

mod evenodd;
mod execute;
mod extended;
mod rdp;
mod star;
mod xcode;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::codes::{Code, CodeFamily, GroupDef};
use crate::error::{Error, Result};
use crate::grid::{Coord, ParityGroupId};

pub use evenodd::plan_evenodd_single;
pub use execute::{execute_plan, execute_on_grid, solve_plan};
pub use extended::plan_extended_single;
pub use rdp::plan_rdp_single;
pub use star::{plan_star_double, plan_star_greedy, star_parity_values};
pub use xcode::plan_xcode_single;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Payload {
    /// A single stored block (information block, or an RDP row parity used
    /// as a diagonal member is sent as [`Payload::ParityBlock`]).
    RawBlock(Coord),
    /// The parity block of a group.
    ParityBlock(ParityGroupId),
    /// XOR of every parity block in the slope's parity column.
    ParitySum(i32),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::RawBlock(_) => "raw",
            Payload::ParityBlock(_) => "parity",
            Payload::ParitySum(_) => "sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub source: u32,
    pub payload: Payload,
    /// Positions in [`RepairPlan::groups`] that use this block.
    pub consumers: Vec<usize>,
}

/// How a STAR double-erasure schedule was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    Literal,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPlan {
    pub family: CodeFamily,
    pub p: u32,
    pub r: u32,
    /// Every column treated as unavailable.
    pub erased: Vec<u32>,
    /// The column this plan rebuilds.
    pub target: u32,
    pub groups: Vec<ParityGroupId>,
    pub transmissions: Vec<Transmission>,
    /// Horizontal group count for two-slope single-erasure plans.
    pub horizontal: Option<u32>,
    pub schedule: Option<Schedule>,
}

impl RepairPlan {
    /// Repair bandwidth in blocks.
    pub fn gamma(&self) -> usize {
        self.transmissions.len()
    }

    pub fn count(&self, kind: &str) -> usize {
        self.transmissions.iter().filter(|t| t.payload.kind() == kind).count()
    }

    /// Transmitted blocks per source node, ascending by node id.
    pub fn per_source(&self) -> Vec<(u32, usize)> {
        let mut m = std::collections::BTreeMap::new();
        for t in &self.transmissions {
            *m.entry(t.source).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }

    pub fn to_document(&self) -> PlanDocument {
        PlanDocument {
            family: self.family.name().to_string(),
            p: self.p,
            r: self.r,
            erased: self.erased.clone(),
            target: self.target,
            groups: self
                .groups
                .iter()
                .map(|g| GroupDoc {
                    slope: g.slope,
                    index: g.index,
                })
                .collect(),
            transmissions: self
                .transmissions
                .iter()
                .map(|t| {
                    let (row, col, slope) = match t.payload {
                        Payload::RawBlock(c) => (Some(c.row), Some(c.col), None),
                        Payload::ParityBlock(g) => (Some(g.index), Some(t.source), Some(g.slope)),
                        Payload::ParitySum(v) => (None, Some(t.source), Some(v)),
                    };
                    TransmissionDoc {
                        source: t.source,
                        kind: t.payload.kind().to_string(),
                        row,
                        col,
                        slope,
                        consumers: t.consumers.clone(),
                    }
                })
                .collect(),
            gamma: self.gamma(),
            horizontal: self.horizontal,
            schedule: self.schedule,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("plan serialises")
    }
}

/// Stable JSON form of a plan. Integers are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub family: String,
    pub p: u32,
    pub r: u32,
    pub erased: Vec<u32>,
    pub target: u32,
    pub groups: Vec<GroupDoc>,
    pub transmissions: Vec<TransmissionDoc>,
    pub gamma: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub horizontal: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<Schedule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub slope: i32,
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionDoc {
    pub source: u32,
    pub kind: String,
    pub row: Option<u32>,
    pub col: Option<u32>,
    pub slope: Option<i32>,
    pub consumers: Vec<usize>,
}

pub(crate) fn require_systematic(code: &Code, col: u32) -> Result<()> {
    code.check_column(col)?;
    if code.is_systematic(col) {
        Ok(())
    } else {
        Err(Error::NotSystematic(col))
    }
}

pub(crate) fn require_family(code: &Code, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "{what} planner does not apply to {}",
            code.family()
        )))
    }
}

/// Turn a group selection into a plan: every surviving member and parity
/// block once, plus the parity-column sums needed for the adjusters.
pub(crate) fn assemble(
    code: &Code,
    erased: &[u32],
    target: u32,
    group_ids: Vec<ParityGroupId>,
) -> Result<RepairPlan> {
    let defs: Vec<GroupDef> = group_ids.iter().map(|&g| code.group(g)).collect::<Result<_>>()?;
    let is_erased = |col: u32| erased.contains(&col);

    let mut transmissions: Vec<Transmission> = Vec::new();
    let mut index_of: HashMap<Payload, usize> = HashMap::new();
    let mut emit = |payload: Payload, source: u32, consumer: usize| {
        let i = *index_of.entry(payload).or_insert_with(|| {
            transmissions.push(Transmission {
                source,
                payload,
                consumers: Vec::new(),
            });
            transmissions.len() - 1
        });
        let t = &mut transmissions[i];
        if !t.consumers.contains(&consumer) {
            t.consumers.push(consumer);
        }
    };

    let mut adjusted = BTreeSet::new();
    for (gi, def) in defs.iter().enumerate() {
        for &cell in def.parity.iter().chain(&def.members) {
            if is_erased(cell.col) {
                continue;
            }
            let payload = match code.parity_owner(cell) {
                Some(owner) => Payload::ParityBlock(owner),
                None => Payload::RawBlock(cell),
            };
            emit(payload, cell.col, gi);
        }
        if let Some(v) = def.adjuster {
            adjusted.insert((v, gi));
        }
    }
    for (v, gi) in adjusted {
        for s in [0, v] {
            let col = code.parity_column(s).expect("adjusted slopes have a parity column");
            if is_erased(col) {
                return Err(Error::ErasedSource(col));
            }
            emit(Payload::ParitySum(s), col, gi);
        }
    }

    let mut erased = erased.to_vec();
    erased.sort_unstable();
    Ok(RepairPlan {
        family: code.family(),
        p: code.p().get(),
        r: code.redundancy() as u32,
        erased,
        target,
        groups: defs.iter().map(|d| d.id).collect(),
        transmissions,
        horizontal: None,
        schedule: None,
    })
}

/// The planner that applies to rebuilding `target` while `dead` (which
/// includes `target`) are down, or `None` when no planner covers the pattern
/// (parity columns, multi-column patterns other than STAR, `r > 5`).
pub fn plan_low_bandwidth(code: &Code, target: u32, dead: &[u32]) -> Option<Result<RepairPlan>> {
    if dead.len() == 1 {
        if code.family() != CodeFamily::XCode && !code.is_systematic(target) {
            return None;
        }
        return Some(match code.family() {
            CodeFamily::Evenodd | CodeFamily::Star => plan_evenodd_single(code, target, None),
            CodeFamily::Rdp => plan_rdp_single(code, target),
            CodeFamily::XCode => plan_xcode_single(code, target),
            CodeFamily::ExtendedEvenodd { r } if r <= 5 => plan_extended_single(code, target, None),
            CodeFamily::ExtendedEvenodd { .. } => return None,
        });
    }
    if dead.len() == 2 && code.family() == CodeFamily::Star && dead.iter().all(|&c| code.is_systematic(c)) {
        let other = *dead.iter().find(|&&c| c != target)?;
        return Some(plan_star_double(code, target, other));
    }
    None
}

/// Add a sum block for each of `slopes` not already in the plan. Unused sums
/// carry no consumers.
pub(crate) fn ensure_sums(code: &Code, plan: &mut RepairPlan, slopes: &[i32]) -> Result<()> {
    for &v in slopes {
        let payload = Payload::ParitySum(v);
        if plan.transmissions.iter().any(|t| t.payload == payload) {
            continue;
        }
        let col = code.parity_column(v).ok_or(Error::InvalidSlope { slope: v, p: plan.p })?;
        if plan.erased.contains(&col) {
            return Err(Error::ErasedSource(col));
        }
        plan.transmissions.push(Transmission {
            source: col,
            payload,
            consumers: Vec::new(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_json_has_stable_fields() {
        let code = Code::new(CodeFamily::Evenodd, 5).unwrap();
        let plan = plan_evenodd_single(&code, 1, Some(2)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&plan.to_json()).unwrap();
        for key in ["family", "p", "r", "erased", "groups", "transmissions", "gamma"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["gamma"], 16);
        assert_eq!(v["family"], "evenodd");
        assert_eq!(v["groups"][0]["slope"], 0);
        let t = &v["transmissions"][0];
        for key in ["source", "kind", "row", "col", "slope"] {
            assert!(t.get(key).is_some(), "missing transmission.{key}");
        }
        let doc: PlanDocument = serde_json::from_value(v).unwrap();
        assert_eq!(doc, plan.to_document());
    }

    #[test]
    fn per_source_sums_to_gamma() {
        let code = Code::new(CodeFamily::Star, 7).unwrap();
        let plan = plan_star_double(&code, 1, 3).unwrap();
        let total: usize = plan.per_source().iter().map(|(_, n)| n).sum();
        assert_eq!(total, plan.gamma());
    }
}
