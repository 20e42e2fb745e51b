//! Exact verification of the growth bounds satisfied by the count tables.
//!
//! Every verdict here is decided in exact rational arithmetic. Bounds with a
//! half-integer power of d are squared first so that no square root is ever
//! taken.

mod majorant;

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};
use thiserror::Error;

use crate::numerics::ExactRational;
use crate::recursions::{p2_genus0, p2_genus1, p3_genus0, CountTable, Target};
use crate::singularity::{eval_f0, SingularityError};

pub use majorant::{check_p3_majorants, p3_majorants, P3Majorants};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("{check} needs a {expected} table, got {target} genus {genus}")]
    WrongTable { check: &'static str, expected: &'static str, target: Target, genus: u32 },
    #[error("sample x = {sample} is not below the singularity bound {limit}")]
    SampleAboveSingularity { sample: f64, limit: f64 },
    #[error(transparent)]
    Series(#[from] SingularityError),
}

/// One failed inequality lhs <= rhs (or lhs < rhs for strict checks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub d: usize,
    pub p: Option<usize>,
    pub side: &'static str,
    pub lhs: ExactRational,
    pub rhs: ExactRational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.p {
            Some(p) => write!(f, "d={} p={} {}: {} vs {}", self.d, p, self.side, self.lhs, self.rhs),
            None => write!(f, "d={} {}: {} vs {}", self.d, self.side, self.lhs, self.rhs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub bound_id: String,
    pub d_range: RangeInclusive<usize>,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl BoundReport {
    fn new(bound_id: &str, d_range: RangeInclusive<usize>, checked: usize, mut violations: Vec<Violation>) -> Self {
        violations.sort_by_key(|v| (v.d, v.p));
        BoundReport { bound_id: bound_id.to_string(), d_range, checked, violations }
    }

    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

fn expect_table(
    table: &CountTable,
    check: &'static str,
    target: Target,
    genus: u32,
    expected: &'static str,
) -> Result<(), BoundsError> {
    if table.target() != target || table.genus() != genus {
        return Err(BoundsError::WrongTable { check, expected, target: table.target(), genus: table.genus() });
    }
    Ok(())
}

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::from((n, d))
}

fn pow_q(base: &ExactRational, e: u32) -> ExactRational {
    ExactRational::from((Integer::from(base.numer().pow(e)), Integer::from(base.denom().pow(e))))
}

/// (8/5)(1/27)^d d^{−7/2} <= n_{0,d} <= (45/16)(4/15)^d d^{−7/2}, checked as
/// 64·27^{−2d}/25 <= n²d⁷ <= 2025·(4/15)^{2d}/256.
pub fn check_p2_sandwich(table: &CountTable) -> Result<BoundReport, BoundsError> {
    expect_table(table, "p2 sandwich", Target::P2, 0, "genus-0 P2")?;
    let seq = table.sequence().expect("P2 table");
    let violations: Vec<Violation> = seq
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, n)| {
            let d = i + 1;
            let e = 2 * d as u32;
            let mid = ExactRational::from(n.square_ref()) * Integer::from(d).pow(7);
            let lower = q(64, 25) / pow_q(&q(27, 1), e);
            let upper = q(2025, 256) * pow_q(&q(4, 15), e);
            let mut out = Vec::new();
            if lower > mid {
                out.push(Violation { d, p: None, side: "lower", lhs: lower, rhs: mid.clone() });
            }
            if mid > upper {
                out.push(Violation { d, p: None, side: "upper", lhs: mid, rhs: upper });
            }
            out
        })
        .collect();
    Ok(BoundReport::new("p2-sandwich", 1..=table.d_max(), seq.len(), violations))
}

/// (16/45)·4^d·d^{−1/2} <= C(2d,d) <= (3/4)·4^d·d^{−1/2}, checked as
/// 256·16^d <= 2025·d·C² and 16·d·C² <= 9·16^d.
pub fn check_stirling(d_max: usize) -> BoundReport {
    let mut central = Integer::from(1);
    let mut violations = Vec::new();
    for d in 1..=d_max {
        // C(2d, d) = C(2d−2, d−1)·2(2d−1)/d
        central *= 2 * (2 * d as u64 - 1);
        central /= d as u64;
        let c_sq = Integer::from(central.square_ref());
        let sixteen_d = Integer::from(1) << (4 * d as u32);
        let lower = Integer::from(&sixteen_d * 256u32);
        let mid_lower = Integer::from(&c_sq * 2025u32) * d as u64;
        if lower > mid_lower {
            violations.push(Violation { d, p: None, side: "lower", lhs: lower.into(), rhs: mid_lower.into() });
        }
        let mid_upper = Integer::from(&c_sq * 16u32) * d as u64;
        let upper = sixteen_d * 9u32;
        if mid_upper > upper {
            violations.push(Violation { d, p: None, side: "upper", lhs: mid_upper.into(), rhs: upper.into() });
        }
    }
    BoundReport::new("stirling", 1..=d_max, d_max, violations)
}

/// (9/2)·C(2d,d)·108^{−d}·d^{−3} <= n_{0,d} <= (15/4)·C(2d,d)·15^{−d}·d^{−3},
/// the comparison sequences obtained from the two model recursions.
pub fn check_model_sandwich(table: &CountTable) -> Result<BoundReport, BoundsError> {
    expect_table(table, "model sandwich", Target::P2, 0, "genus-0 P2")?;
    let seq = table.sequence().expect("P2 table");
    let mut central = Integer::from(1);
    let mut centrals = Vec::with_capacity(seq.len());
    for d in 1..=seq.len() as u64 {
        central *= 2 * (2 * d - 1);
        central /= d;
        centrals.push(central.clone());
    }
    let violations: Vec<Violation> = seq
        .par_iter()
        .zip(centrals.par_iter())
        .enumerate()
        .flat_map_iter(|(i, (n, c))| {
            let d = i + 1;
            let d3 = Integer::from(d).pow(3);
            let lower = q(9, 2) * c / pow_q(&q(108, 1), d as u32) / &d3;
            let upper = q(15, 4) * c / pow_q(&q(15, 1), d as u32) / &d3;
            let mut out = Vec::new();
            if lower > *n {
                out.push(Violation { d, p: None, side: "lower", lhs: lower, rhs: n.clone() });
            }
            if *n > upper {
                out.push(Violation { d, p: None, side: "upper", lhs: n.clone(), rhs: upper });
            }
            out
        })
        .collect();
    Ok(BoundReport::new("model-sandwich", 1..=table.d_max(), seq.len(), violations))
}

/// n_{0,d}(p) <= 2^{8d}·d^{−4} for every stored (d, p).
pub fn check_p3_coarse_bound(table: &CountTable) -> Result<BoundReport, BoundsError> {
    expect_table(table, "p3 coarse bound", Target::P3, 0, "genus-0 P3")?;
    let violations: Vec<Violation> = table
        .entries()
        .filter_map(|(d, p, n)| {
            let lhs = ExactRational::from(n * Integer::from(d).pow(4));
            let rhs = ExactRational::from(Integer::from(1) << (8 * d as u32));
            (lhs > rhs).then(|| Violation { d, p: Some(p), side: "upper", lhs, rhs })
        })
        .collect();
    Ok(BoundReport::new("p3-coarse", 1..=table.d_max(), table.len(), violations))
}

/// Every entry rescaled by its factorial is a nonnegative integer.
pub fn check_integrality(table: &CountTable) -> BoundReport {
    let p_index = table.target() == Target::P3;
    let violations = table
        .integrality_failures()
        .into_iter()
        .map(|(d, p)| {
            let n = if p_index { table.n_p(d, p) } else { table.n(d) }.expect("listed entry").clone();
            Violation { d, p: p_index.then_some(p), side: "integral", lhs: n, rhs: ExactRational::new() }
        })
        .collect();
    BoundReport::new("integrality", 1..=table.d_max(), table.len(), violations)
}

/// Recomputes the table from scratch and records every entry that differs.
pub fn check_recomputation(table: &CountTable) -> BoundReport {
    let d_max = table.d_max();
    let fresh = match (table.target(), table.genus()) {
        (Target::P2, 0) => p2_genus0(d_max),
        (Target::P2, _) => p2_genus1(d_max, &p2_genus0(d_max)).expect("genus-0 table long enough"),
        (Target::P3, _) => p3_genus0(d_max),
    };
    let p_index = table.target() == Target::P3;
    let violations = table
        .entries()
        .zip(fresh.entries())
        .filter(|((_, _, a), (_, _, b))| a != b)
        .map(|((d, p, a), (_, _, b))| Violation {
            d,
            p: p_index.then_some(p),
            side: "recursion",
            lhs: a.clone(),
            rhs: b.clone(),
        })
        .collect();
    BoundReport::new("recursion", 1..=d_max, table.len(), violations)
}

/// At each sample x below the singularity the partial sums of F0 and its
/// first three derivatives are strictly increasing, and the partial sum of
/// 3F0'' − 2F0' stays below 9.
///
/// All series coefficients are positive, so the partial sums are lower bounds
/// of the true values. `limit` is the largest admissible sample (the root
/// estimate minus its error bar).
pub fn check_ordering_f0(
    table: &CountTable,
    samples: &[Float],
    limit: &Float,
    terms: usize,
) -> Result<BoundReport, BoundsError> {
    expect_table(table, "F0 ordering", Target::P2, 0, "genus-0 P2")?;
    let mut violations = Vec::new();
    for (i, x) in samples.iter().enumerate() {
        if x >= limit {
            return Err(BoundsError::SampleAboveSingularity { sample: x.to_f64(), limit: limit.to_f64() });
        }
        let vals: Vec<ExactRational> = (0..4)
            .map(|r| eval_f0(table, x, r, terms).map(|e| e.partial_sum.to_rational().expect("finite sum")))
            .collect::<Result<_, _>>()?;
        if vals[0] <= 0 {
            violations.push(Violation { d: i, p: None, side: "F0 > 0", lhs: vals[0].clone(), rhs: q(0, 1) });
        }
        for r in 0..3 {
            if vals[r] >= vals[r + 1] {
                violations.push(Violation {
                    d: i,
                    p: Some(r),
                    side: "derivative order",
                    lhs: vals[r].clone(),
                    rhs: vals[r + 1].clone(),
                });
            }
        }
        let combo = ExactRational::from(&vals[2] * 3u32) - ExactRational::from(&vals[1] * 2u32);
        if combo >= 9 {
            violations.push(Violation { d: i, p: None, side: "3F0''-2F0' < 9", lhs: combo, rhs: q(9, 1) });
        }
    }
    Ok(BoundReport::new("f0-ordering", 0..=samples.len().saturating_sub(1), samples.len(), violations))
}
