//! Growth-rate diagnostics on exact sequences: d-th roots and their eventual
//! monotonicity, the growth constant by extrapolated ratios, the power-law
//! exponent, and root sequences along rays of the space grid.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};
use thiserror::Error;

use crate::numerics::{least_squares, ln_rational, to_real, BigReal, ExactRational, Precision};
use crate::recursions::{CountTable, Target};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmpiricsError {
    #[error("entry at d = {0} is not positive")]
    NonPositiveEntry(usize),
    #[error("need at least {needed} terms, have {available}")]
    InsufficientLength { needed: usize, available: usize },
    #[error("fit window {lo}..={hi} is degenerate or outside d = {first}..={last}")]
    DegenerateWindow { lo: usize, hi: usize, first: usize, last: usize },
    #[error("ray ({alpha}, {beta}) leaves the grid: p = {beta}d exceeds 2·{alpha}d")]
    RayOutOfRange { alpha: usize, beta: usize },
    #[error("ray needs positive alpha")]
    BadRay,
    #[error("expected a P2 table")]
    NotASequence,
}

/// n_first, n_{first+1}, ... .
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    pub first_index: usize,
    pub values: Vec<ExactRational>,
}

impl Sequence {
    pub fn new(first_index: usize, values: Vec<ExactRational>) -> Self {
        Sequence { first_index, values }
    }

    /// The P² sequence with its leading zeros dropped. Genus-1 counts vanish
    /// for d = 1, 2, so they start at d = 3.
    pub fn from_table(table: &CountTable) -> Result<Self, EmpiricsError> {
        let seq = table.sequence().ok_or(EmpiricsError::NotASequence)?;
        let skip = seq.iter().take_while(|v| **v == 0).count();
        Ok(Sequence { first_index: 1 + skip, values: seq[skip..].to_vec() })
    }

    pub fn last_index(&self) -> usize {
        self.first_index + self.values.len() - 1
    }

    pub fn get(&self, d: usize) -> Option<&ExactRational> {
        self.values.get(d.checked_sub(self.first_index)?)
    }

    fn require_positive(&self) -> Result<(), EmpiricsError> {
        match self.values.iter().position(|v| *v <= 0) {
            Some(i) => Err(EmpiricsError::NonPositiveEntry(self.first_index + i)),
            None => Ok(()),
        }
    }
}

/// (d, n_d^{1/d}) computed as exp(ln(n_d)/d).
pub fn root_sequence(seq: &Sequence, prec: Precision) -> Result<Vec<(usize, BigReal)>, EmpiricsError> {
    seq.require_positive()?;
    Ok(seq
        .values
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let d = seq.first_index + i;
            (d, dth_root(v, d, prec))
        })
        .collect())
}

fn dth_root(v: &ExactRational, d: usize, prec: Precision) -> BigReal {
    let l = ln_rational(v, prec.with_guard(16));
    Float::with_val(prec.bits(), (l / d as u32).exp())
}

/// Whether n_d^{1/d} <= n_{d+1}^{1/(d+1)}, decided as n_d^{d+1} <= n_{d+1}^d.
pub fn root_increases(n_d: &ExactRational, n_next: &ExactRational, d: usize) -> bool {
    let d = d as u32;
    let lhs = Integer::from(n_d.numer().pow(d + 1)) * Integer::from(n_next.denom().pow(d));
    let rhs = Integer::from(n_next.numer().pow(d)) * Integer::from(n_d.denom().pow(d + 1));
    lhs <= rhs
}

/// Smallest d* with n_d^{1/d} <= n_{d+1}^{1/(d+1)} for every checked d >= d*,
/// or `None` if the last comparison already fails.
pub fn monotone_from(seq: &Sequence) -> Result<Option<usize>, EmpiricsError> {
    if seq.values.len() < 3 {
        return Err(EmpiricsError::InsufficientLength { needed: 3, available: seq.values.len() });
    }
    seq.require_positive()?;
    let ok: Vec<bool> = (0..seq.values.len() - 1)
        .into_par_iter()
        .map(|i| root_increases(&seq.values[i], &seq.values[i + 1], seq.first_index + i))
        .collect();
    if !ok[ok.len() - 1] {
        return Ok(None);
    }
    let last_bad = ok.iter().rposition(|&b| !b);
    Ok(Some(match last_bad {
        Some(i) => seq.first_index + i + 1,
        None => seq.first_index,
    }))
}

#[derive(Clone, Debug)]
pub struct RatioEstimate {
    pub b: BigReal,
    pub exact: ExactRational,
    /// |R_m − R_{m−1}| between successive orders.
    pub error: BigReal,
    pub order: usize,
}

/// Order-m Richardson value of s(d) = n_{d+1}/n_d anchored so that its last
/// ratio uses the final term:
/// R_m(N) = Σ_{k=0..m} s(N+k)·(N+k)^m·(−1)^{k+m} / (k!(m−k)!).
fn richardson(seq: &Sequence, order: usize) -> ExactRational {
    let last = seq.last_index();
    let n0 = last - 1 - order;
    let mut acc = ExactRational::new();
    for k in 0..=order {
        let d = n0 + k;
        let s = ExactRational::from(seq.get(d + 1).expect("in range") / seq.get(d).expect("in range"));
        let mut t = s * Integer::from(d).pow(order as u32);
        t /= Integer::from(Integer::factorial(k as u32)) * Integer::from(Integer::factorial((order - k) as u32));
        if (k + order) % 2 == 1 {
            t = -t;
        }
        acc += t;
    }
    acc
}

/// Growth constant b = lim n_{d+1}/n_d by Richardson extrapolation in 1/d.
///
/// Exact for geometric sequences at every order. The error is the change
/// from order m−1 (order 0 compares the last two raw ratios).
pub fn ratio_extrapolate(seq: &Sequence, order: usize, prec: Precision) -> Result<RatioEstimate, EmpiricsError> {
    let needed = order + 3;
    if seq.values.len() < needed {
        return Err(EmpiricsError::InsufficientLength { needed, available: seq.values.len() });
    }
    seq.require_positive()?;
    let exact = richardson(seq, order);
    let previous = if order == 0 {
        let shorter = Sequence::new(seq.first_index, seq.values[..seq.values.len() - 1].to_vec());
        richardson(&shorter, 0)
    } else {
        richardson(seq, order - 1)
    };
    let error = to_real(&ExactRational::from(&exact - &previous).abs(), prec);
    Ok(RatioEstimate { b: to_real(&exact, prec), exact, error, order })
}

#[derive(Clone, Debug)]
pub struct ExponentFit {
    pub slope: BigReal,
    pub intercept: BigReal,
    /// Root-mean-square residual of the fit.
    pub residual: BigReal,
    pub window: RangeInclusive<usize>,
}

/// Least-squares slope of ln(n_d·b^{−d}) against ln d over the window.
pub fn fit_exponent(
    seq: &Sequence,
    b: &Float,
    window: RangeInclusive<usize>,
    prec: Precision,
) -> Result<ExponentFit, EmpiricsError> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo < seq.first_index || hi > seq.last_index() || hi < lo + 1 || *b <= 0 {
        return Err(EmpiricsError::DegenerateWindow { lo, hi, first: seq.first_index, last: seq.last_index() });
    }
    seq.require_positive()?;
    let wp = prec.bits() + 32;
    let ln_b = Float::with_val(wp, b.ln_ref());
    let mut rows = Vec::with_capacity(hi - lo + 1);
    let mut y = Vec::with_capacity(hi - lo + 1);
    for d in lo..=hi {
        let ln_d = Float::with_val(wp, Float::with_val(wp, d).ln_ref());
        let ln_n = ln_rational(seq.get(d).expect("in window"), Precision::new(wp).expect("valid"));
        y.push(ln_n - Float::with_val(wp, &ln_b * d as u32));
        rows.push(vec![Float::with_val(wp, 1), ln_d]);
    }
    let c = least_squares(&rows, &y, Precision::new(wp).expect("valid"))
        .map_err(|_| EmpiricsError::DegenerateWindow { lo, hi, first: seq.first_index, last: seq.last_index() })?;
    let mut ss = Float::new(wp);
    for (row, yi) in rows.iter().zip(&y) {
        let fitted = Float::with_val(wp, &c[1] * &row[1]) + &c[0];
        ss += Float::with_val(wp, yi - &fitted).square();
    }
    let residual = (ss / (hi - lo + 1) as u32).sqrt();
    Ok(ExponentFit {
        slope: Float::with_val(prec.bits(), &c[1]),
        intercept: Float::with_val(prec.bits(), &c[0]),
        residual: Float::with_val(prec.bits(), residual),
        window,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayVerdict {
    /// Successive roots still move by more than 10^{−3} relative.
    Slow,
    /// Successive roots agree to 10^{−3} relative.
    Settled,
    /// Fewer than three usable points.
    TooShort,
}

impl RayVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RayVerdict::Slow => "slow",
            RayVerdict::Settled => "settled",
            RayVerdict::TooShort => "too-short",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RayReport {
    pub alpha: usize,
    pub beta: usize,
    /// (d, n_{0,αd}(βd)^{1/d}) for every positive entry on the ray.
    pub roots: Vec<(usize, BigReal)>,
    /// Ray points whose count vanishes.
    pub skipped: Vec<usize>,
    /// roots[i+1] − roots[i].
    pub differences: Vec<BigReal>,
    pub verdict: RayVerdict,
}

/// d-th roots of n_{0,αd}(βd) for αd within the table.
pub fn p3_ray(table: &CountTable, alpha: usize, beta: usize, prec: Precision) -> Result<RayReport, EmpiricsError> {
    if alpha == 0 {
        return Err(EmpiricsError::BadRay);
    }
    if beta > 2 * alpha {
        return Err(EmpiricsError::RayOutOfRange { alpha, beta });
    }
    if table.target() != Target::P3 {
        return Err(EmpiricsError::NotASequence);
    }
    let mut roots = Vec::new();
    let mut skipped = Vec::new();
    for d in 1..=table.d_max() / alpha {
        let v = table.n_p(alpha * d, beta * d).expect("inside the grid");
        if *v > 0 {
            roots.push((d, dth_root(v, d, prec)));
        } else {
            skipped.push(d);
        }
    }
    let differences: Vec<BigReal> = roots.windows(2).map(|w| Float::with_val(prec.bits(), &w[1].1 - &w[0].1)).collect();
    let verdict = match (differences.len(), roots.last()) {
        (n, Some((_, last))) if n >= 2 => {
            let rel = Float::with_val(prec.bits(), differences[n - 1].abs_ref()) / last;
            if rel > 1e-3 {
                RayVerdict::Slow
            } else {
                RayVerdict::Settled
            }
        }
        _ => RayVerdict::TooShort,
    };
    Ok(RayReport { alpha, beta, roots, skipped, differences, verdict })
}

/// Summary of one sequence's growth.
#[derive(Clone, Debug)]
pub struct AsymptoticReport {
    pub sequence_id: String,
    pub b_estimate: RatioEstimate,
    pub exponent_fit: Option<ExponentFit>,
    pub monotone_from: Option<usize>,
    /// (d, relative deviation of a prediction from the exact value).
    pub residuals: Vec<(usize, BigReal)>,
}

/// Growth constant, exponent over `window` (skipped when it does not fit the
/// sequence) and monotonicity threshold.
pub fn analyze(
    sequence_id: &str,
    seq: &Sequence,
    ratio_order: usize,
    window: RangeInclusive<usize>,
    prec: Precision,
) -> Result<AsymptoticReport, EmpiricsError> {
    let b_estimate = ratio_extrapolate(seq, ratio_order, prec)?;
    let exponent_fit = fit_exponent(seq, &b_estimate.b, window, prec).ok();
    let monotone = monotone_from(seq)?;
    Ok(AsymptoticReport {
        sequence_id: sequence_id.to_string(),
        b_estimate,
        exponent_fit,
        monotone_from: monotone,
        residuals: Vec::new(),
    })
}
