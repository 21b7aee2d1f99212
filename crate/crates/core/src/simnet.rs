//! In-process storage cluster: one column per node, failure injection, and
//! per-node transfer accounting for repair sessions.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::star_measured_saving;
use crate::codes::{decode, encode_bytes, Code, CodeGrid};
use crate::error::{Error, Result};
use crate::grid::{Block, Coord};
use crate::repair::{execute_plan, plan_low_bandwidth, star_parity_values, Payload, RepairPlan, Schedule, Transmission};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Family-specific planner; falls back to naive where none applies.
    #[serde(rename = "paper")]
    Planned,
    /// Download `k` whole columns and decode.
    Naive,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Strategy::Planned),
            "naive" => Ok(Strategy::Naive),
            other => Err(Error::InvalidParameters(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    id: u32,
    column: Vec<Block>,
    alive: bool,
}

impl Node {
    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn is_alive(&self) -> bool {
        self.alive
    }

    pub fn column(&self) -> Option<&[Block]> {
        self.alive.then_some(&self.column[..])
    }

    fn serve(&self, code: &Code, t: &Transmission) -> Result<Block> {
        if !self.alive {
            return Err(Error::ErasedSource(self.id));
        }
        let at = |c: Coord| self.column[(c.row - 1) as usize].clone();
        Ok(match t.payload {
            Payload::RawBlock(c) => at(c),
            Payload::ParityBlock(g) => at(code
                .parity_cell(g)?
                .ok_or_else(|| Error::InvalidParameters(format!("{g} has no stored parity block")))?),
            Payload::ParitySum(_) => {
                let mut acc = Block::zero(self.column[0].len());
                for b in &self.column {
                    acc ^= b;
                }
                acc
            }
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTransfer {
    pub blocks: u64,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransferLedger {
    pub session: u64,
    pub per_node: BTreeMap<u32, NodeTransfer>,
}

impl TransferLedger {
    fn record(&mut self, node: u32, blocks: u64, block_size: usize) {
        let e = self.per_node.entry(node).or_default();
        e.blocks += blocks;
        e.bytes += blocks * block_size as u64;
    }

    pub fn total_blocks(&self) -> u64 {
        self.per_node.values().map(|e| e.blocks).sum()
    }

    pub fn total_bytes(&self) -> u64 {
        self.per_node.values().map(|e| e.bytes).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: u32,
    pub blocks: u64,
    pub bytes: u64,
}

/// JSON summary of one repair session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionReport {
    pub session: u64,
    pub family: String,
    pub p: u32,
    pub r: u32,
    pub failed: Vec<u32>,
    pub target: u32,
    pub strategy: Strategy,
    /// Set when the planned strategy had no planner for the pattern.
    #[serde(default)]
    pub fallback: bool,
    pub gamma_blocks: u64,
    pub gamma_bytes: u64,
    pub per_node: Vec<NodeEntry>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parity_groups: Option<usize>,
    /// Parity-derived values used (stored parities plus adjusters standing in
    /// for an index-`p` line).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parity_blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<Schedule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub star_saving: Option<u64>,
    /// Later sessions run to finish a multi-node repair.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub followups: Vec<SessionReport>,
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub column: Vec<Block>,
    pub ledger: TransferLedger,
    pub report: SessionReport,
    pub plan: Option<RepairPlan>,
}

/// A set of nodes holding one encoded stripe.
#[derive(Debug, Clone)]
pub struct Cluster {
    code: Code,
    block_size: usize,
    nodes: Vec<Node>,
    // pre-failure columns, read only to verify a rebuild
    shadow: HashMap<u32, Vec<Block>>,
    sessions: u64,
}

impl Cluster {
    /// Encode `data` (zero padded) across `n` fresh nodes.
    pub fn create(code: Code, block_size: usize, data: &[u8]) -> Result<Self> {
        Ok(Self::from_grid(encode_bytes(code, data, block_size)?))
    }

    /// A cluster over `info_blocks * block_size` random bytes.
    pub fn random(code: Code, block_size: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<u8> = (0..code.info_blocks() as usize * block_size).map(|_| rng.random()).collect();
        Self::create(code, block_size, &data)
    }

    pub fn from_grid(grid: CodeGrid) -> Self {
        let nodes = grid
            .columns()
            .iter()
            .enumerate()
            .map(|(i, col)| Node {
                id: i as u32 + 1,
                column: col.clone(),
                alive: true,
            })
            .collect();
        Self {
            code: *grid.code(),
            block_size: grid.block_size(),
            nodes,
            shadow: HashMap::new(),
            sessions: 0,
        }
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: u32) -> Result<&Node> {
        self.code.check_column(id)?;
        Ok(&self.nodes[id as usize - 1])
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn dead(&self) -> Vec<u32> {
        self.nodes.iter().filter(|n| !n.alive).map(|n| n.id).collect()
    }

    /// Live columns as a grid; dead columns read as zero.
    pub fn to_grid(&self) -> CodeGrid {
        let cols = self
            .nodes
            .iter()
            .map(|n| {
                if n.alive {
                    n.column.clone()
                } else {
                    vec![Block::zero(self.block_size); self.code.rows() as usize]
                }
            })
            .collect();
        CodeGrid::from_columns(self.code, self.block_size, cols).expect("nodes match the code shape")
    }

    /// Mark nodes dead. Their data is kept aside for verification only.
    pub fn fail_nodes(&mut self, ids: &[u32]) -> Result<()> {
        for &id in ids {
            self.code.check_column(id)?;
        }
        let mut dead = self.dead();
        for &id in ids {
            if !dead.contains(&id) {
                dead.push(id);
            }
        }
        if dead.len() > self.code.redundancy() {
            return Err(Error::TooManyErasures {
                erased: dead.len(),
                redundancy: self.code.redundancy(),
            });
        }
        for &id in ids {
            let node = &mut self.nodes[id as usize - 1];
            if node.alive {
                node.alive = false;
                let col = std::mem::take(&mut node.column);
                self.shadow.insert(id, col);
            }
        }
        Ok(())
    }

    fn fetch(&self, ledger: &mut TransferLedger, t: &Transmission) -> Result<Block> {
        let node = self.node(t.source)?;
        let block = node.serve(&self.code, t)?;
        ledger.record(t.source, 1, self.block_size);
        Ok(block)
    }

    /// Download whole columns, lowest ids first, until the dead ones decode.
    fn naive(&self, target: u32, ledger: &mut TransferLedger) -> Result<Vec<Block>> {
        let k = self.code.k() as usize;
        let live: Vec<u32> = self.nodes.iter().filter(|n| n.alive).map(|n| n.id).collect();
        if live.len() < k {
            return Err(Error::InsufficientSurvivors {
                alive: live.len(),
                needed: k,
            });
        }
        let rows = self.code.rows() as usize;
        let mut grid = CodeGrid::zeroed(self.code, self.block_size);
        let mut last = Err(Error::RankDeficient("no column set decodes".into()));
        for used in k..=live.len() {
            for &id in &live[..used] {
                if ledger.per_node.contains_key(&id) {
                    continue;
                }
                let col = self.node(id)?.column.clone();
                ledger.record(id, rows as u64, self.block_size);
                grid.set_column(id, col);
            }
            let missing: Vec<u32> = (1..=self.code.n()).filter(|c| !live[..used].contains(c)).collect();
            match decode(&grid, &missing) {
                Ok(full) => return Ok(full.column(target).to_vec()),
                Err(e @ (Error::TooManyErasures { .. } | Error::RankDeficient(_))) => last = Err(e),
                Err(e) => return Err(e),
            }
        }
        last
    }

    /// Rebuild dead node `target` and bring it back online.
    pub fn run_repair(&mut self, target: u32, strategy: Strategy) -> Result<RepairOutcome> {
        if self.node(target)?.alive {
            return Err(Error::NodeAlive(target));
        }
        let dead = self.dead();
        self.sessions += 1;
        let mut ledger = TransferLedger {
            session: self.sessions,
            ..Default::default()
        };

        let planned = match strategy {
            Strategy::Planned => plan_low_bandwidth(&self.code, target, &dead).transpose()?,
            Strategy::Naive => None,
        };
        let column = match &planned {
            Some(plan) => {
                let code = self.code;
                let mut fetched = TransferLedger::default();
                let col = execute_plan(&code, plan, self.block_size, |t| self.fetch(&mut fetched, t))?;
                ledger.per_node = fetched.per_node;
                col
            }
            None => self.naive(target, &mut ledger)?,
        };

        let verified = self.shadow.get(&target).is_some_and(|orig| *orig == column);
        let mut report = SessionReport {
            session: ledger.session,
            family: self.code.family().name().to_string(),
            p: self.code.p().get(),
            r: self.code.redundancy() as u32,
            failed: dead,
            target,
            strategy,
            fallback: strategy == Strategy::Planned && planned.is_none(),
            gamma_blocks: ledger.total_blocks(),
            gamma_bytes: ledger.total_bytes(),
            per_node: ledger
                .per_node
                .iter()
                .map(|(&id, e)| NodeEntry {
                    id,
                    blocks: e.blocks,
                    bytes: e.bytes,
                })
                .collect(),
            verified,
            parity_groups: None,
            parity_blocks: None,
            schedule: None,
            star_saving: None,
            followups: Vec::new(),
        };
        if let Some(plan) = &planned {
            report.parity_groups = Some(plan.groups.len());
            report.parity_blocks = Some(star_parity_values(&self.code, plan)?);
            report.schedule = plan.schedule;
            if plan.schedule.is_some() {
                report.star_saving = Some(star_measured_saving(&self.code, plan));
            }
        }

        let node = &mut self.nodes[target as usize - 1];
        node.column = column.clone();
        node.alive = true;
        self.shadow.remove(&target);
        Ok(RepairOutcome {
            column,
            ledger,
            report,
            plan: planned,
        })
    }

    /// Repair every dead node, lowest id first. The first session's report
    /// carries the rest as follow-ups.
    pub fn repair_all(&mut self, strategy: Strategy) -> Result<SessionReport> {
        let mut dead = self.dead();
        if dead.is_empty() {
            return Err(Error::InvalidParameters("no failed nodes to repair".into()));
        }
        dead.sort_unstable();
        let mut first = self.run_repair(dead[0], strategy)?.report;
        for &id in &dead[1..] {
            first.followups.push(self.run_repair(id, strategy)?.report);
        }
        Ok(first)
    }
}

impl SessionReport {
    /// True when this session and every follow-up verified.
    pub fn all_verified(&self) -> bool {
        self.verified && self.followups.iter().all(|f| f.verified)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::CodeFamily;

    fn cluster(fam: CodeFamily, p: u32) -> Cluster {
        Cluster::random(Code::new(fam, p).unwrap(), 4, 11).unwrap()
    }

    #[test]
    fn node_counts() {
        assert_eq!(cluster(CodeFamily::Evenodd, 5).node_count(), 7);
        assert_eq!(cluster(CodeFamily::Star, 5).node_count(), 8);
        assert_eq!(cluster(CodeFamily::Rdp, 5).node_count(), 6);
    }

    #[test]
    fn failure_limits() {
        let mut c = cluster(CodeFamily::Evenodd, 5);
        c.fail_nodes(&[1]).unwrap();
        assert_eq!(c.dead(), vec![1]);
        assert!(matches!(c.fail_nodes(&[2, 3]), Err(Error::TooManyErasures { .. })));
        assert_eq!(c.dead(), vec![1]);
        let mut s = cluster(CodeFamily::Star, 5);
        s.fail_nodes(&[1, 3]).unwrap();
        assert_eq!(s.dead().len(), 2);
        assert!(s.node(1).unwrap().column().is_none());
    }

    #[test]
    fn evenodd_planned_and_naive() {
        let mut c = cluster(CodeFamily::Evenodd, 5);
        c.fail_nodes(&[1]).unwrap();
        let out = c.run_repair(1, Strategy::Planned).unwrap();
        assert_eq!(out.ledger.total_blocks(), 16);
        assert_eq!(out.ledger.total_bytes(), 64);
        assert!(out.report.verified);
        assert_eq!(out.ledger.total_blocks() as usize, out.plan.unwrap().gamma());

        c.fail_nodes(&[1]).unwrap();
        let out = c.run_repair(1, Strategy::Naive).unwrap();
        assert_eq!(out.ledger.total_blocks(), 20);
        assert!(out.report.verified);
        assert_eq!(out.report.session, 2);
    }

    #[test]
    fn star_double_then_followup() {
        let mut c = cluster(CodeFamily::Star, 5);
        c.fail_nodes(&[1, 2]).unwrap();
        let rep = c.repair_all(Strategy::Planned).unwrap();
        assert_eq!(rep.parity_blocks, Some(6));
        assert_eq!(rep.parity_groups, Some(6));
        assert_eq!(rep.star_saving, Some(2));
        assert_eq!(rep.followups.len(), 1);
        assert!(rep.all_verified());
        assert!(c.dead().is_empty());
    }

    #[test]
    fn parity_node_uses_naive() {
        let mut c = cluster(CodeFamily::Rdp, 7);
        c.fail_nodes(&[7]).unwrap();
        let out = c.run_repair(7, Strategy::Planned).unwrap();
        assert!(out.report.fallback);
        assert!(out.report.verified);
        assert_eq!(out.ledger.total_blocks(), 6 * 6);
    }

    #[test]
    fn refuses_live_target_and_dead_source() {
        let mut c = cluster(CodeFamily::Evenodd, 5);
        assert_eq!(c.run_repair(2, Strategy::Planned).unwrap_err(), Error::NodeAlive(2));
        c.fail_nodes(&[2]).unwrap();
        let t = Transmission {
            source: 2,
            payload: Payload::RawBlock(Coord::new(1, 2)),
            consumers: vec![],
        };
        assert_eq!(c.fetch(&mut TransferLedger::default(), &t), Err(Error::ErasedSource(2)));
    }

    #[test]
    fn deterministic_ledgers() {
        let run = || {
            let mut c = cluster(CodeFamily::ExtendedEvenodd { r: 3 }, 7);
            c.fail_nodes(&[4]).unwrap();
            c.run_repair(4, Strategy::Planned).unwrap().report
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn report_json_fields() {
        let mut c = cluster(CodeFamily::Evenodd, 5);
        c.fail_nodes(&[1]).unwrap();
        let rep = c.run_repair(1, Strategy::Planned).unwrap().report;
        let v = serde_json::to_value(&rep).unwrap();
        for key in [
            "session", "family", "p", "r", "failed", "strategy", "gamma_blocks", "gamma_bytes", "per_node", "verified",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["strategy"], "paper");
        assert_eq!(v["per_node"][0]["id"], 2);
        let back: SessionReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, rep);
    }
}
