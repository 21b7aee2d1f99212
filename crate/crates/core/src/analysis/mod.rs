//! Closed-form bandwidth formulas, bounds, and the counting machinery behind
//! them. Fractions are exact ([`Ratio`]); comparisons never go through floats.

mod oracle;
mod partition;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::codes::{Code, CodeFamily};
use crate::error::{Error, Result};
use crate::repair::{
    plan_evenodd_single, plan_extended_single, plan_rdp_single, plan_star_double, plan_xcode_single, RepairPlan,
};

pub use oracle::{brute_force_min_single, common_block_count_by_sets, line_union, BruteForce};
pub use partition::{common_block_count, inclusion_exclusion_gamma, triple_bound_holds, Partition};

/// `(p-1)p + 2 - (x+1)(p-1-x)` for `0 <= x <= p-1`.
pub fn evenodd_gamma(p: u32, x: u32) -> u64 {
    assert!(x < p, "x = {x} out of range for p = {p}");
    let (p, x) = (p as u64, x as u64);
    (p - 1) * p + 2 - (x + 1) * (p - 1 - x)
}

/// `(3p² - 4p + 9) / 4`, the minimum of [`evenodd_gamma`] over `x`.
pub fn evenodd_min_gamma(p: u32) -> u64 {
    let p = p as u64;
    (3 * p * p - 4 * p + 9) / 4
}

/// `3(p-1)² / 4`.
pub fn rdp_gamma(p: u32) -> u64 {
    let p = p as u64;
    3 * (p - 1) * (p - 1) / 4
}

/// `(3p² - 2p + 5) / 4`.
pub fn xcode_gamma_bound(p: u32) -> Ratio<u64> {
    let p = p as u64;
    Ratio::new(3 * p * p - 2 * p + 5, 4)
}

/// Cut-set bound `Md / (k(d - k + 1))`.
pub fn cutset_bound(m: u64, k: u64, d: u64) -> Result<Ratio<u64>> {
    if k == 0 || d < k {
        return Err(Error::InvalidParameters(format!("cut-set bound needs d >= k >= 1, got k = {k}, d = {d}")));
    }
    Ok(Ratio::new(m * d, k * (d - k + 1)))
}

/// `13/18 p² + 17/9 p - 47/18`, the r = 3 extended EVENODD bound.
pub fn r3_bound(p: u32) -> Ratio<i64> {
    let p = p as i64;
    Ratio::new(13 * p * p + 34 * p - 47, 18)
}

/// `gamma < r3_bound(p)`, exactly.
pub fn r3_bound_holds(p: u32, gamma: u64) -> bool {
    Ratio::from_integer(gamma as i64) < r3_bound(p)
}

/// Blocks saved by the STAR double-erasure schedule through shared blocks.
pub fn star_saving(p: u32) -> u64 {
    let p = p as u64;
    if p.div_ceil(2) % 2 == 1 {
        (p - 1) * (p - 1) / 8
    } else {
        (p + 1) * (p - 3) / 8
    }
}

/// Information blocks of the surviving systematic columns that a STAR
/// double-erasure plan does not send.
pub fn star_measured_saving(code: &Code, plan: &RepairPlan) -> u64 {
    let surviving = code.systematic_columns().filter(|c| !plan.erased.contains(c)).count() as u64;
    surviving * code.info_rows() as u64 - plan.count("raw") as u64
}

/// Render an exact value: integers plainly, everything else as a decimal.
pub fn fmt_ratio(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        let v = *r.numer() as f64 / *r.denom() as f64;
        let s = format!("{v:.6}");
        s.trim_end_matches('0').to_string()
    }
}

fn ser_ratio<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        None => s.serialize_none(),
        Some(r) if r.is_integer() => s.serialize_i64(r.to_integer()),
        Some(r) => s.serialize_f64(*r.numer() as f64 / *r.denom() as f64),
    }
}

/// Bandwidth of one planner run next to the bounds that apply to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthReport {
    pub family: String,
    pub p: u32,
    pub r: u32,
    pub x: Option<u32>,
    pub gamma: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub bound: Option<Ratio<i64>>,
    #[serde(serialize_with = "ser_ratio")]
    pub cutset: Option<Ratio<i64>>,
    /// `M`, the information blocks a naive repair downloads.
    pub naive: u64,
}

pub fn signed(r: Ratio<u64>) -> Ratio<i64> {
    Ratio::new(*r.numer() as i64, *r.denom() as i64)
}

/// Report for column 1 of `code` (for STAR, the first column of the pair
/// `{1, 2}`).
pub fn report(code: &Code) -> Result<BandwidthReport> {
    let p = code.p().get();
    let m = code.info_blocks();
    let k = code.k() as u64;
    let int = |v: u64| Some(Ratio::from_integer(v as i64));
    let single_cutset = || -> Result<Option<Ratio<i64>>> {
        // every other node helps: d = n - 1
        Ok(Some(signed(cutset_bound(m, k, code.n() as u64 - 1)?)))
    };
    let (gamma, x, bound, cutset) = match code.family() {
        CodeFamily::Evenodd => {
            let plan = plan_evenodd_single(code, 1, None)?;
            (plan.gamma(), plan.horizontal, int(evenodd_min_gamma(p)), single_cutset()?)
        }
        CodeFamily::Rdp => {
            let plan = plan_rdp_single(code, 1)?;
            (plan.gamma(), plan.horizontal, int(rdp_gamma(p)), single_cutset()?)
        }
        CodeFamily::XCode => {
            let plan = plan_xcode_single(code, 1)?;
            (plan.gamma(), None, Some(signed(xcode_gamma_bound(p))), single_cutset()?)
        }
        CodeFamily::ExtendedEvenodd { r } => {
            let plan = plan_extended_single(code, 1, None)?;
            let bound = if r == 3 {
                r3_bound(p)
            } else {
                Ratio::from_integer(inclusion_exclusion_gamma(&Partition::by_residue(p, r)?))
            };
            (plan.gamma(), None, Some(bound), single_cutset()?)
        }
        CodeFamily::Star => {
            let plan = plan_star_double(code, 1, 2)?;
            (plan.gamma(), None, None, None)
        }
    };
    Ok(BandwidthReport {
        family: code.family().name().to_string(),
        p,
        r: code.redundancy() as u32,
        x,
        gamma: gamma as u64,
        bound,
        cutset,
        naive: m,
    })
}

/// Reports for every prime in `primes` the family accepts. Fails if none do.
pub fn sweep(family: CodeFamily, primes: &[u32]) -> Result<Vec<BandwidthReport>> {
    let reports: Vec<BandwidthReport> = primes
        .iter()
        .filter_map(|&p| {
            let code = Code::new(family, p).ok()?;
            if family == CodeFamily::XCode && p < 5 || family == CodeFamily::Star && p < 5 {
                return None;
            }
            Some(report(&code))
        })
        .collect::<Result<_>>()?;
    if reports.is_empty() {
        return Err(Error::InvalidParameters(format!("no usable primes for {family} in {primes:?}")));
    }
    Ok(reports)
}

/// CSV with columns `family,p,r,x,gamma,bound,cutset,naive`.
pub fn write_csv<W: std::io::Write>(reports: &[BandwidthReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["family", "p", "r", "x", "gamma", "bound", "cutset", "naive"])?;
    let opt = |r: &Option<Ratio<i64>>| r.as_ref().map(fmt_ratio).unwrap_or_default();
    for rep in reports {
        w.write_record([
            rep.family.clone(),
            rep.p.to_string(),
            rep.r.to_string(),
            rep.x.map(|x| x.to_string()).unwrap_or_default(),
            rep.gamma.to_string(),
            opt(&rep.bound),
            opt(&rep.cutset),
            rep.naive.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        assert_eq!(evenodd_gamma(5, 2), 16);
        assert_eq!(evenodd_gamma(5, 0), 18);
        assert_eq!(evenodd_gamma(3, 1), 6);
        assert_eq!(rdp_gamma(5), 12);
        assert_eq!(rdp_gamma(7), 27);
        assert_eq!(xcode_gamma_bound(5), Ratio::new(35, 2));
        assert_eq!(fmt_ratio(&signed(xcode_gamma_bound(5))), "17.5");
        assert_eq!(star_saving(5), 2);
        assert_eq!(star_saving(7), 4);
        assert_eq!(star_saving(13), 18);
    }

    #[test]
    fn star_schedule_saves_the_closed_form() {
        for p in [5, 7, 11, 13] {
            let code = Code::new(CodeFamily::Star, p).unwrap();
            for x in 1..p {
                let plan = plan_star_double(&code, 1, 1 + x).unwrap();
                assert_eq!(star_measured_saving(&code, &plan), star_saving(p), "p={p} x={x}");
            }
        }
    }

    #[test]
    fn cutset_examples() {
        assert_eq!(cutset_bound(20, 5, 6).unwrap(), Ratio::from_integer(12));
        assert_eq!(cutset_bound(20, 5, 5).unwrap(), Ratio::from_integer(20));
        assert_eq!(cutset_bound(42, 7, 9).unwrap(), Ratio::from_integer(18));
        assert!(cutset_bound(20, 5, 4).is_err());
        for p in [3u64, 5, 7, 11, 31] {
            assert_eq!(cutset_bound(p * (p - 1), p, p + 1).unwrap(), Ratio::from_integer((p * p - 1) / 2));
        }
    }

    #[test]
    fn minimum_over_x() {
        for p in [3, 5, 7, 11, 13, 17, 19, 23] {
            let min = (0..p).map(|x| evenodd_gamma(p, x)).min().unwrap();
            assert_eq!(min, evenodd_min_gamma(p));
            assert_eq!(evenodd_gamma(p, (p - 1) / 2), min);
            assert_eq!(evenodd_gamma(p, (p - 3) / 2), min);
        }
    }

    #[test]
    fn r3_bound_comparison_is_exact() {
        // 18 * bound = 13p² + 34p - 47
        assert_eq!(r3_bound(7), Ratio::new(13 * 49 + 34 * 7 - 47, 18));
        assert!(r3_bound_holds(7, 45));
        assert!(!r3_bound_holds(31, 800));
    }

    #[test]
    fn sweep_rows_and_csv() {
        let reps = sweep(CodeFamily::Evenodd, &[3, 5, 7, 11, 13]).unwrap();
        assert_eq!(reps.len(), 5);
        for r in &reps {
            assert_eq!(r.gamma, evenodd_min_gamma(r.p));
        }
        assert_eq!(reps[1].cutset, Some(Ratio::from_integer(12)));
        let rdp = sweep(CodeFamily::Rdp, &[5]).unwrap();
        assert_eq!(rdp[0].gamma, 12);
        let mut buf = Vec::new();
        write_csv(&reps, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,p,r,x,gamma,bound,cutset,naive\n"));
        assert!(text.contains("evenodd,5,2,2,16,16,12,20"));
        assert!(sweep(CodeFamily::XCode, &[3]).is_err());
        let json = serde_json::to_value(&sweep(CodeFamily::XCode, &[5]).unwrap()[0]).unwrap();
        assert_eq!(json["bound"], 17.5);
    }
}
