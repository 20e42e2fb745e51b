use rug::Float;

use super::series::{F0Series, DEFAULT_FIT_TERMS, DEFAULT_WINDOW};
use super::SingularityError;
use crate::empirics::{ratio_extrapolate, Sequence};
use crate::numerics::{ln_rational, BigReal, ExactRational, Precision};
use crate::recursions::CountTable;

/// Smallest table the root solve accepts.
pub const MIN_ROOT_DEGREES: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootOptions {
    /// Terms c_j·d^{−7/2−j} in the tail model.
    pub fit_terms: usize,
    /// Degrees the tail model is fitted on.
    pub window: usize,
    /// Bisection steps per solve.
    pub iterations: u32,
    /// Richardson order of the ratio cross-check.
    pub ratio_order: usize,
    /// The solve is repeated with this many fewer terms to size the error.
    pub truncation_step: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            fit_terms: DEFAULT_FIT_TERMS,
            window: DEFAULT_WINDOW,
            iterations: 80,
            ratio_order: 6,
            truncation_step: 40,
        }
    }
}

#[derive(Clone, Debug)]
pub struct X0Estimate {
    pub value: BigReal,
    /// max(fit_defect, truncation_defect).
    pub error_bar: BigReal,
    /// Root of the raw partial sum; an upper bound for x0 because every
    /// omitted term is positive.
    pub raw_upper: BigReal,
    /// |x0(J) − x0(J−1)| for the number J of tail-model terms.
    pub fit_defect: BigReal,
    /// |x0(D) − x0(D − step)| for the number D of summed terms.
    pub truncation_defect: BigReal,
    /// −ln b from Richardson-extrapolated count ratios.
    pub by_ratio: BigReal,
    pub ratio_error: BigReal,
    pub terms: usize,
    pub fit_terms: usize,
    pub window: usize,
    pub iterations: u32,
}

impl X0Estimate {
    /// |root solve − ratio estimate|.
    pub fn discrepancy(&self) -> BigReal {
        Float::with_val(self.value.prec(), &self.value - &self.by_ratio).abs()
    }

    /// b = e^{−x0}.
    pub fn growth_constant(&self) -> BigReal {
        Float::with_val(self.value.prec(), -&self.value).exp()
    }
}

pub fn solve_x0(table: &CountTable, prec: Precision) -> Result<X0Estimate, SingularityError> {
    solve_x0_with(table, prec, &RootOptions::default())
}

/// Root of 3F0''(x) − 2F0'(x) = 9.
///
/// The raw partial sums bracket the root from above. The tail-corrected
/// defect is then bisected on [x_raw − 0.05, x_raw], refitting the tail model
/// at every candidate so that it is self-consistent at the root.
pub fn solve_x0_with(table: &CountTable, prec: Precision, opts: &RootOptions) -> Result<X0Estimate, SingularityError> {
    if table.d_max() < MIN_ROOT_DEGREES {
        return Err(SingularityError::BracketFailure(format!(
            "the table stops at d = {}; at least {MIN_ROOT_DEGREES} degrees are needed for a tail-corrected root",
            table.d_max()
        )));
    }
    let series = F0Series::new(table, prec)?;
    let terms = table.d_max();
    let fit_terms = opts.fit_terms.max(2);

    let raw_upper = raw_root(&series, terms, opts.iterations)?;
    let value = corrected_root(&series, terms, fit_terms, opts, &raw_upper)?;
    let fewer_fit = corrected_root(&series, terms, fit_terms - 1, opts, &raw_upper)?;
    let shorter = terms - opts.truncation_step.min(terms - opts.window);
    let raw_short = raw_root(&series, shorter, opts.iterations)?;
    let fewer_terms = corrected_root(&series, shorter, fit_terms, opts, &raw_short)?;

    let p = prec.bits();
    let fit_defect = Float::with_val(p, &value - &fewer_fit).abs();
    let truncation_defect = Float::with_val(p, &value - &fewer_terms).abs();
    let error_bar = if fit_defect > truncation_defect { fit_defect.clone() } else { truncation_defect.clone() };

    let seq = Sequence::from_table(table).map_err(|e| SingularityError::Numerics(e.to_string()))?;
    let ratio =
        ratio_extrapolate(&seq, opts.ratio_order, prec).map_err(|e| SingularityError::Numerics(e.to_string()))?;
    let by_ratio = Float::with_val(p, -Float::with_val(p, ratio.b.ln_ref()));
    let ratio_error = Float::with_val(p, &ratio.error / &ratio.b);

    Ok(X0Estimate {
        value,
        error_bar,
        raw_upper,
        fit_defect,
        truncation_defect,
        by_ratio,
        ratio_error,
        terms,
        fit_terms,
        window: opts.window,
        iterations: opts.iterations,
    })
}

fn raw_root(series: &F0Series, terms: usize, iterations: u32) -> Result<BigReal, SingularityError> {
    let prec = series.precision();
    let lo = ln_rational(&ExactRational::from((15, 4)), prec);
    let hi = ln_rational(&ExactRational::from(27), prec);
    // The upper end stays a bound for the raw root.
    Ok(bisect(series, lo, hi, terms, None, iterations + 8)?.1)
}

fn corrected_root(
    series: &F0Series,
    terms: usize,
    fit_terms: usize,
    opts: &RootOptions,
    raw_upper: &Float,
) -> Result<BigReal, SingularityError> {
    let lo = Float::with_val(raw_upper.prec(), raw_upper - 0.05f64);
    let (lo, hi) = bisect(series, lo, raw_upper.clone(), terms, Some((fit_terms, opts.window)), opts.iterations)?;
    Ok(Float::with_val(lo.prec(), &lo + &hi) / 2u32)
}

fn bisect(
    series: &F0Series,
    mut lo: Float,
    mut hi: Float,
    terms: usize,
    tail: Option<(usize, usize)>,
    iterations: u32,
) -> Result<(BigReal, BigReal), SingularityError> {
    let g_lo = series.boundary_defect(&lo, terms, tail)?;
    let g_hi = series.boundary_defect(&hi, terms, tail)?;
    if !(g_lo < 0 && g_hi >= 0) {
        return Err(SingularityError::BracketFailure(format!(
            "defect is {:.3e} at x = {:.6} and {:.3e} at x = {:.6} with {terms} terms; \
             the table is probably too short",
            g_lo.to_f64(),
            lo.to_f64(),
            g_hi.to_f64(),
            hi.to_f64()
        )));
    }
    for _ in 0..iterations {
        let mid = Float::with_val(lo.prec(), &lo + &hi) / 2u32;
        if series.boundary_defect(&mid, terms, tail)? >= 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}
