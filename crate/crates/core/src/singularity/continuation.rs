use rayon::prelude::*;
use rug::Float;

use super::series::{F0Series, DEFAULT_FIT_TERMS, DEFAULT_WINDOW};
use super::SingularityError;
use crate::numerics::{BigReal, Precision};
use crate::recursions::CountTable;

/// Degrees past the table over which the model tail is summed explicitly.
const EXPLICIT_TAIL: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct ContinuationSample {
    pub y: f64,
    /// Re(3F0'' − 2F0') at x0 + iy: table part plus model tail.
    pub value: BigReal,
    /// 9 − value.
    pub margin: BigReal,
    /// Bound on the model tail beyond the explicitly summed range.
    pub remainder_bound: f64,
    /// margin > remainder_bound.
    pub positive: bool,
}

#[derive(Clone, Debug)]
pub struct ContinuationReport {
    pub x0: BigReal,
    pub terms: usize,
    pub samples: Vec<ContinuationSample>,
}

impl ContinuationReport {
    /// Whether every sample with y > 0 keeps a positive margin.
    pub fn all_positive(&self) -> bool {
        self.samples.iter().filter(|s| s.y > 0.0).all(|s| s.positive)
    }
}

/// Re(3F0'' − 2F0') at x0 + iy = (1/3)·Σ d(3d−2)·n_{0,d}·e^{d·x0}·cos(dy).
///
/// Degrees up to `terms` come from the table. Beyond, the fitted model
/// u_d ≈ Σ c_j·d^{−7/2−j} is summed to `terms` + 10⁶ and the rest bounded by
/// g(L+1)/|sin(y/2)| with g(d) = d(3d−2)·u_d/3 decreasing. At y = 0 the
/// model tail is summed in closed form through Hurwitz zeta values.
pub fn continuation_check(
    table: &CountTable,
    x0: &Float,
    y_samples: &[f64],
    terms: usize,
    prec: Precision,
) -> Result<ContinuationReport, SingularityError> {
    let series = F0Series::new(table, prec)?;
    if terms > series.d_max() || terms < DEFAULT_WINDOW {
        return Err(SingularityError::InsufficientTable {
            requested: terms.max(DEFAULT_WINDOW),
            available: series.d_max(),
        });
    }
    if let Some(y) = y_samples.iter().find(|y| !(0.0..std::f64::consts::TAU).contains(*y)) {
        return Err(SingularityError::Numerics(format!("sample y = {y} is outside [0, 2π)")));
    }
    let wp = prec.bits() + 32;
    let u = series.weighted(x0, terms);
    let model = series
        .fit_tail(&u, DEFAULT_FIT_TERMS, DEFAULT_WINDOW)
        .ok_or_else(|| SingularityError::Numerics("tail fit failed".into()))?;
    let c: Vec<f64> = model.coeffs.iter().map(Float::to_f64).collect();
    let g = |d: f64| -> f64 {
        let mut m = 0.0;
        let mut pw = d.powf(-3.5);
        for cj in &c {
            m += cj * pw;
            pw /= d;
        }
        d * (3.0 * d - 2.0) * m / 3.0
    };
    let weights = [(3i64, 2i32), (-2, 1)];
    let zeta_tail =
        model.tail(&weights, terms, prec).ok_or_else(|| SingularityError::Numerics("model tail diverges".into()))?;

    let samples = y_samples
        .par_iter()
        .map(|&y| {
            let yf = Float::with_val(wp, y);
            let mut value = Float::new(wp);
            for (i, ud) in u.iter().enumerate() {
                let d = (i + 1) as u64;
                let cos = Float::with_val(wp, Float::with_val(wp, &yf * d).cos_ref());
                value += Float::with_val(wp, ud * &cos) * (d * (3 * d - 2));
            }
            value /= 3u32;
            let remainder_bound = if y == 0.0 {
                value += Float::with_val(wp, &zeta_tail / 3u32);
                0.0
            } else {
                let last = terms + EXPLICIT_TAIL;
                let explicit: f64 = (terms + 1..=last).map(|d| g(d as f64) * (d as f64 * y).cos()).sum();
                value += explicit;
                g((last + 1) as f64) / (y / 2.0).sin().abs()
            };
            let margin = Float::with_val(prec.bits(), 9u32 - Float::with_val(wp, &value));
            ContinuationSample {
                y,
                positive: margin > remainder_bound,
                value: Float::with_val(prec.bits(), value),
                margin,
                remainder_bound,
            }
        })
        .collect();
    Ok(ContinuationReport { x0: Float::with_val(prec.bits(), x0), terms, samples })
}
