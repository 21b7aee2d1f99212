//! `arraycode` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | bad parameters or usage |
//! | 3 | I/O failure or unreadable container |
//! | 4 | erasure pattern cannot be recovered |
//! | 5 | oracle disagrees with the closed form |
//! | 6 | rebuilt data failed verification |

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    brute_force_min_single, common_block_count, common_block_count_by_sets, evenodd_min_gamma, star_measured_saving,
    star_saving, sweep, triple_bound_holds, write_csv, Partition,
};
use crate::codes::{decode, Code, CodeFamily};
use crate::container::Container;
use crate::error::Error;
use crate::grid::primes_in;
use crate::repair::{execute_on_grid, plan_evenodd_single, plan_low_bandwidth, plan_star_double, star_parity_values};
use crate::simnet::{Cluster, Strategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_UNRECOVERABLE: i32 = 4;
pub const EXIT_ORACLE: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

/// Environment variable fixing the seed of randomized data.
pub const SEED_VAR: &str = "ARRAYCODE_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("oracle mismatch: {0}")]
    Oracle(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Core(Error::Container(_)) => EXIT_IO,
            CliError::Core(
                Error::TooManyErasures { .. }
                | Error::RankDeficient(_)
                | Error::InsufficientSurvivors { .. }
                | Error::Corrupt
                | Error::ErasedSource(_),
            ) => EXIT_UNRECOVERABLE,
            CliError::Core(_) | CliError::Usage(_) => EXIT_PARAMS,
            CliError::Oracle(_) => EXIT_ORACLE,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "arraycode", version, about = "XOR array codes with low-bandwidth node repair")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode a file into a container
    Encode(EncodeArgs),
    /// Fail nodes of a container and repair them
    Repair(RepairArgs),
    /// Recover the original file from a container
    Extract(ExtractArgs),
    /// Bandwidth sweep over a prime range
    Analyze(AnalyzeArgs),
    /// Exhaustive checks of the closed forms
    Oracle(OracleArgs),
    /// Print the repair plan for a failure pattern as JSON
    Plan(PlanArgs),
    /// Repair random data in an in-memory cluster
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone)]
struct CodeArgs {
    /// evenodd, extended-evenodd, rdp, xcode or star
    #[arg(long, default_value = "evenodd")]
    family: String,
    #[arg(long)]
    p: u32,
    /// Parity columns; picks r for extended-evenodd (default 3)
    #[arg(long)]
    r: Option<u32>,
}

impl CodeArgs {
    fn code(&self) -> CliResult<Code> {
        let family = CodeFamily::parse(&self.family, self.r)?;
        let code = Code::new(family, self.p)?;
        if let Some(r) = self.r {
            if r as usize != code.redundancy() {
                return Err(CliError::Usage(format!("{family} has r = {}, not {r}", code.redundancy())));
            }
        }
        Ok(code)
    }
}

#[derive(Args, Debug)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    code: CodeArgs,
    /// Bytes per block; defaults to the smallest size that fits the input
    #[arg(long)]
    block_size: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum StrategyArg {
    #[value(name = "paper")]
    Planned,
    Naive,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Planned => Strategy::Planned,
            StrategyArg::Naive => Strategy::Naive,
        }
    }
}

#[derive(Args, Debug)]
struct RepairArgs {
    container: PathBuf,
    /// Columns to fail, e.g. 1,3
    #[arg(long, value_delimiter = ',', required = true)]
    fail: Vec<u32>,
    #[arg(long, value_enum, default_value = "paper")]
    strategy: StrategyArg,
    /// Write the session report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the repaired container here
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    container: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Treat these columns as lost and decode around them
    #[arg(long, value_delimiter = ',')]
    erase: Vec<u32>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, default_value = "evenodd")]
    family: String,
    /// Inclusive range such as 3..13, 3-13 or a single prime
    #[arg(long)]
    p_range: String,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OracleMode {
    EvenoddMin,
    FCheck,
    StarValidate,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, value_enum)]
    mode: OracleMode,
    #[arg(long, default_value_t = 3)]
    r: u32,
    /// Seed for random partitions and data (else $ARRAYCODE_SEED, else 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    fail: Vec<u32>,
    /// Horizontal group count (two-slope single-erasure plans)
    #[arg(long)]
    x: Option<u32>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value_t = 16)]
    block_size: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    fail: Vec<u32>,
    #[arg(long, value_enum, default_value = "paper")]
    strategy: StrategyArg,
    #[arg(long)]
    seed: Option<u64>,
}

fn seed_or_env(seed: Option<u64>) -> CliResult<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_VAR}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_range(s: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::Usage(format!("bad prime range {s:?}"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    for sep in ["..=", "..", "-", ":"] {
        if let Some((a, b)) = s.split_once(sep) {
            return Ok((num(a)?, num(b)?));
        }
    }
    let v = num(s)?;
    Ok((v, v))
}

fn cmd_encode(a: EncodeArgs) -> CliResult {
    let code = a.code.code()?;
    let data = read(&a.input)?;
    let c = Container::encode(code, a.block_size, &data)?;
    write(&a.output, &c.to_bytes())?;
    println!(
        "n={} k={} M={} overhead={:.4} block_size={} bytes={}",
        code.n(),
        code.k(),
        code.info_blocks(),
        code.n() as f64 / code.k() as f64,
        c.header.block_size,
        data.len()
    );
    Ok(())
}

fn cmd_repair(a: RepairArgs) -> CliResult {
    let container = Container::from_bytes(&read(&a.container)?)?;
    let mut cluster = Cluster::from_grid(container.grid.clone());
    cluster.fail_nodes(&a.fail)?;
    let report = cluster.repair_all(a.strategy.into())?;
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    match &a.report {
        Some(path) => write(path, json.as_bytes())?,
        None => println!("{json}"),
    }
    let mut sessions = vec![&report];
    sessions.extend(&report.followups);
    for s in sessions {
        eprintln!(
            "node {}: {} blocks ({} bytes) {}",
            s.target,
            s.gamma_blocks,
            s.gamma_bytes,
            if s.verified { "verified" } else { "MISMATCH" }
        );
    }
    if let Some(out) = &a.output {
        let repaired = Container {
            header: container.header,
            grid: cluster.to_grid(),
        };
        write(out, &repaired.to_bytes())?;
    }
    if report.all_verified() {
        Ok(())
    } else {
        Err(CliError::Verify("rebuilt column differs from the original".into()))
    }
}

fn cmd_extract(a: ExtractArgs) -> CliResult {
    let mut container = Container::from_bytes(&read(&a.container)?)?;
    if !a.erase.is_empty() {
        let mut grid = container.grid.clone();
        grid.erase(&a.erase);
        container.grid = decode(&grid, &a.erase)?;
    }
    write(&a.output, &container.extract())
}

fn cmd_analyze(a: AnalyzeArgs) -> CliResult {
    let family = CodeFamily::parse(&a.family, a.r)?;
    let (lo, hi) = parse_range(&a.p_range)?;
    let primes: Vec<u32> = primes_in(lo, hi).into_iter().filter(|&p| p >= 3).collect();
    if primes.is_empty() {
        return Err(CliError::Usage(format!("no odd primes in {}", a.p_range)));
    }
    let reports = sweep(family, &primes)?;
    let mut csv = Vec::new();
    write_csv(&reports, &mut csv).map_err(|e| CliError::Usage(e.to_string()))?;
    match &a.csv {
        Some(path) => write(path, &csv)?,
        None => print!("{}", String::from_utf8_lossy(&csv)),
    }
    if let Some(path) = &a.json {
        write(path, serde_json::to_string_pretty(&reports).expect("reports serialise").as_bytes())?;
    }
    Ok(())
}

fn verdict(ok: bool, what: String) -> CliResult {
    if ok {
        println!("PASS {what}");
        Ok(())
    } else {
        println!("FAIL {what}");
        Err(CliError::Oracle(what))
    }
}

fn oracle_evenodd_min(p: u32) -> CliResult {
    let bf = brute_force_min_single(p)?;
    let expect = vec![(p - 3) / 2, (p - 1) / 2];
    println!(
        "evenodd-min p={p} assignments={} min={} closed-form={} optimal-x={:?}",
        bf.assignments,
        bf.min_gamma,
        evenodd_min_gamma(p),
        bf.optimal_x
    );
    verdict(
        bf.min_gamma == evenodd_min_gamma(p) && bf.optimal_x == expect,
        format!("evenodd-min p={p} min={}", bf.min_gamma),
    )
}

fn oracle_f_check(p: u32, r: u32, seed: u64) -> CliResult {
    let mut partitions = vec![Partition::by_residue(p, r)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let mut sets = vec![Vec::new(); r as usize];
        for m in 1..p {
            sets[rng.random_range(0..r as usize)].push(m);
        }
        partitions.push(Partition::new(p, sets)?);
    }
    let mut compared = 0;
    let mut mismatches = 0;
    for part in &partitions {
        for mask in 0u32..(1 << r) {
            if mask.count_ones() < 3 {
                continue;
            }
            let slopes: Vec<i32> = (0..r as i32).filter(|v| mask >> v & 1 == 1).collect();
            compared += 1;
            if common_block_count(part, &slopes)? != common_block_count_by_sets(part, &slopes) {
                mismatches += 1;
            }
        }
    }
    let residue = &partitions[0];
    let mut bound_failures = 0;
    for a in 0..r as i32 {
        for b in a + 1..r as i32 {
            for c in b + 1..r as i32 {
                if !triple_bound_holds(residue, [a, b, c])?.0 {
                    bound_failures += 1;
                }
            }
        }
    }
    println!(
        "f-check p={p} r={r} partitions={} comparisons={compared} mismatches={mismatches} triple-bound-failures={bound_failures}",
        partitions.len()
    );
    verdict(mismatches == 0 && bound_failures == 0, format!("f-check p={p} r={r}"))
}

fn oracle_star_validate(p: u32, seed: u64) -> CliResult {
    let code = Code::new(CodeFamily::Star, p)?;
    if p < 5 {
        return Err(CliError::Usage("star-validate needs p >= 5".into()));
    }
    let mut ok = true;
    for x in 1..p {
        let cluster = Cluster::random(code, 4, seed ^ x as u64)?;
        let grid = cluster.to_grid();
        let plan = plan_star_double(&code, 1, 1 + x)?;
        let mut damaged = grid.clone();
        damaged.erase(&[1, 1 + x]);
        let rebuilt = execute_on_grid(&plan, &damaged)? == grid.column(1);
        let parity = star_parity_values(&code, &plan)?;
        let saving = star_measured_saving(&code, &plan);
        let good = rebuilt && parity as u32 == 3 * (p - 1) / 2 && saving == star_saving(p);
        ok &= good;
        println!(
            "x={x} schedule={:?} gamma={} parity-blocks={parity} saving={saving} expected-saving={} rebuilt={rebuilt}",
            plan.schedule.expect("STAR plans record their schedule"),
            plan.gamma(),
            star_saving(p)
        );
    }
    verdict(ok, format!("star-validate p={p}"))
}

fn cmd_oracle(a: OracleArgs) -> CliResult {
    let seed = seed_or_env(a.seed)?;
    match a.mode {
        OracleMode::EvenoddMin => oracle_evenodd_min(a.p),
        OracleMode::FCheck => oracle_f_check(a.p, a.r, seed),
        OracleMode::StarValidate => oracle_star_validate(a.p, seed),
    }
}

fn cmd_plan(a: PlanArgs) -> CliResult {
    let code = a.code.code()?;
    let fail: Vec<u32> = a.fail.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for &c in &fail {
        code.check_column(c)?;
    }
    let target = a.fail[0];
    let plan = match a.x {
        Some(x) if fail.len() == 1 => plan_evenodd_single(&code, target, Some(x))?,
        _ => plan_low_bandwidth(&code, target, &fail)
            .ok_or_else(|| CliError::Usage(format!("no repair planner for columns {fail:?} of {}", code.family())))??,
    };
    println!("{}", plan.to_json());
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    let code = a.code.code()?;
    let mut cluster = Cluster::random(code, a.block_size, seed_or_env(a.seed)?)?;
    cluster.fail_nodes(&a.fail)?;
    let report = cluster.repair_all(a.strategy.into())?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
    if report.all_verified() {
        Ok(())
    } else {
        Err(CliError::Verify("rebuilt column differs from the original".into()))
    }
}

pub fn execute(cli: Cli) -> CliResult {
    match cli.command {
        Command::Encode(a) => cmd_encode(a),
        Command::Repair(a) => cmd_repair(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

/// Parse `args`, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARAMS } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
