use rug::ops::Pow;
use rug::Float;

use super::SingularityError;
use crate::numerics::{hurwitz_zeta, least_squares, BigReal, Precision};
use crate::recursions::{CountTable, Target};

pub(crate) const DEFAULT_FIT_TERMS: usize = 5;
pub(crate) const DEFAULT_WINDOW: usize = 60;

/// A partial sum of F0^{(r)}(x) = (1/3)·Σ d^r·n_{0,d}·e^{dx}.
#[derive(Clone, Debug)]
pub struct SeriesEvaluation {
    pub x: BigReal,
    pub order: usize,
    pub partial_sum: BigReal,
    pub terms_used: usize,
    /// Fitted-model estimate of the omitted terms; `None` where the model
    /// tail diverges (r = 3 at the singular point) or too few terms exist to
    /// fit it. Not rigorous.
    pub tail_estimate: Option<BigReal>,
    /// All summed terms are positive, so the partial sum is a lower bound.
    pub rigorous_lower: bool,
}

/// Model u_d ≈ Σ_j c_j·d^{−7/2−j} for u_d = n_{0,d}·e^{dx}, fitted on the last
/// `window` degrees before the cut.
#[derive(Clone, Debug)]
pub struct TailModel {
    pub coeffs: Vec<BigReal>,
    pub window: (usize, usize),
}

impl TailModel {
    /// Σ_{d > cut} Σ_j c_j·Σ_(w,p) w·d^{p−7/2−j}, or `None` if some Hurwitz
    /// exponent is <= 1.
    pub fn tail(&self, weights: &[(i64, i32)], cut: usize, prec: Precision) -> Option<BigReal> {
        let wp = prec.bits() + 32;
        let q = Float::with_val(wp, cut + 1);
        let mut total = Float::new(wp);
        for (j, c) in self.coeffs.iter().enumerate() {
            for &(w, p) in weights {
                let s = Float::with_val(wp, 7 + 2 * j as i64 - 2 * p as i64) / 2u32;
                if s <= 1 {
                    return None;
                }
                let z = hurwitz_zeta(&s, &q, Precision::new(wp).ok()?).ok()?;
                total += Float::with_val(wp, c * &z) * w;
            }
        }
        Some(Float::with_val(prec.bits(), total))
    }
}

/// Genus-0 counts converted once to reals, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct F0Series {
    n: Vec<Float>,
    prec: Precision,
    all_positive: bool,
}

impl F0Series {
    pub fn new(table: &CountTable, prec: Precision) -> Result<Self, SingularityError> {
        if table.target() != Target::P2 || table.genus() != 0 {
            return Err(SingularityError::WrongTable { genus: 0 });
        }
        let wp = prec.bits() + 32;
        let seq = table.sequence().expect("P2 table");
        let n = seq.iter().map(|v| Float::with_val(wp, v)).collect();
        let all_positive = seq.iter().all(|v| *v > 0);
        Ok(F0Series { n, prec, all_positive })
    }

    pub fn d_max(&self) -> usize {
        self.n.len()
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    fn wp(&self) -> u32 {
        self.prec.bits() + 32
    }

    fn check_terms(&self, terms: usize) -> Result<(), SingularityError> {
        if terms > self.n.len() || terms == 0 {
            return Err(SingularityError::InsufficientTable { requested: terms, available: self.n.len() });
        }
        Ok(())
    }

    /// u_d = n_{0,d}·e^{dx} for d = 1..=terms.
    pub fn weighted(&self, x: &Float, terms: usize) -> Vec<Float> {
        let wp = self.wp();
        let e = Float::with_val(wp, x.exp_ref());
        let mut pw = e.clone();
        let mut out = Vec::with_capacity(terms);
        for n in &self.n[..terms] {
            out.push(Float::with_val(wp, n * &pw));
            pw *= &e;
        }
        out
    }

    fn weighted_sum(&self, u: &[Float], weights: &[(i64, i32)]) -> Float {
        let wp = self.wp();
        let mut s = Float::new(wp);
        for (i, ud) in u.iter().enumerate() {
            let d = (i + 1) as i64;
            let w: i64 = weights.iter().map(|&(c, p)| c * d.pow(p as u32)).sum();
            s += Float::with_val(wp, ud * w);
        }
        s / 3u32
    }

    /// Least-squares fit of the tail model on u_d, d in (terms−window, terms].
    pub fn fit_tail(&self, u: &[Float], fit_terms: usize, window: usize) -> Option<TailModel> {
        let terms = u.len();
        if fit_terms == 0 || window < fit_terms + 1 || window > terms {
            return None;
        }
        let wp = self.wp();
        let lo = terms - window + 1;
        let mut rows = Vec::with_capacity(window);
        let mut y = Vec::with_capacity(window);
        for d in lo..=terms {
            let df = Float::with_val(wp, d);
            let base = Float::with_val(wp, df.sqrt_ref()).recip() / Float::with_val(wp, df.clone().pow(3u32));
            let mut row = Vec::with_capacity(fit_terms);
            let mut v = base;
            for _ in 0..fit_terms {
                row.push(v.clone());
                v /= &df;
            }
            rows.push(row);
            y.push(u[d - 1].clone());
        }
        let coeffs = least_squares(&rows, &y, Precision::new(wp).ok()?).ok()?;
        Some(TailModel { coeffs, window: (lo, terms) })
    }

    /// Partial sum of F0^{(r)}(x) over d <= terms.
    pub fn partial(&self, x: &Float, r: usize, terms: usize) -> Result<BigReal, SingularityError> {
        check_order(r)?;
        self.check_terms(terms)?;
        let u = self.weighted(x, terms);
        Ok(Float::with_val(self.prec.bits(), self.weighted_sum(&u, &[(1, r as i32)])))
    }

    /// Partial sum plus the fitted tail.
    pub fn corrected(
        &self,
        x: &Float,
        r: usize,
        terms: usize,
        fit_terms: usize,
        window: usize,
    ) -> Result<BigReal, SingularityError> {
        check_order(r)?;
        self.check_terms(terms)?;
        let u = self.weighted(x, terms);
        let weights = [(1, r as i32)];
        let partial = self.weighted_sum(&u, &weights);
        let model =
            self.fit_tail(&u, fit_terms, window).ok_or_else(|| SingularityError::Numerics("tail fit failed".into()))?;
        let tail = model
            .tail(&weights, terms, self.prec)
            .ok_or_else(|| SingularityError::Numerics(format!("model tail diverges for r = {r}")))?;
        Ok(Float::with_val(self.prec.bits(), partial + Float::with_val(self.wp(), &tail / 3u32)))
    }

    /// 3F0''(x) − 2F0'(x) − 9, with or without the fitted tail.
    pub fn boundary_defect(
        &self,
        x: &Float,
        terms: usize,
        tail: Option<(usize, usize)>,
    ) -> Result<BigReal, SingularityError> {
        self.check_terms(terms)?;
        let u = self.weighted(x, terms);
        let weights = [(3, 2), (-2, 1)];
        let mut v = self.weighted_sum(&u, &weights);
        if let Some((fit_terms, window)) = tail {
            let model = self
                .fit_tail(&u, fit_terms, window)
                .ok_or_else(|| SingularityError::Numerics("tail fit failed".into()))?;
            let t = model
                .tail(&weights, terms, self.prec)
                .ok_or_else(|| SingularityError::Numerics("model tail diverges".into()))?;
            v += Float::with_val(self.wp(), &t / 3u32);
        }
        v -= 9u32;
        Ok(Float::with_val(self.prec.bits(), v))
    }

    pub fn evaluate(&self, x: &Float, r: usize, terms: usize) -> Result<SeriesEvaluation, SingularityError> {
        check_order(r)?;
        self.check_terms(terms)?;
        let u = self.weighted(x, terms);
        let weights = [(1, r as i32)];
        let partial_sum = Float::with_val(self.prec.bits(), self.weighted_sum(&u, &weights));
        let window = DEFAULT_WINDOW.min(terms / 2);
        let fit_terms = DEFAULT_FIT_TERMS.min(window / 4);
        let tail_estimate = self
            .fit_tail(&u, fit_terms, window)
            .and_then(|m| m.tail(&weights, terms, self.prec))
            .map(|t| Float::with_val(self.prec.bits(), t / 3u32));
        Ok(SeriesEvaluation {
            x: x.clone(),
            order: r,
            partial_sum,
            terms_used: terms,
            tail_estimate,
            rigorous_lower: self.all_positive,
        })
    }
}

fn check_order(r: usize) -> Result<(), SingularityError> {
    if r > 3 {
        return Err(SingularityError::BadOrder(r));
    }
    Ok(())
}

/// (1/3)·Σ_{d <= terms} d^r·n_{0,d}·e^{dx} with a fitted tail estimate.
pub fn eval_f0(table: &CountTable, x: &Float, r: usize, terms: usize) -> Result<SeriesEvaluation, SingularityError> {
    if terms > table.d_max() {
        return Err(SingularityError::InsufficientTable { requested: terms, available: table.d_max() });
    }
    let bits = x.prec().max(crate::numerics::MIN_PRECISION_BITS);
    let prec = Precision::new(bits).map_err(|e| SingularityError::Numerics(e.to_string()))?;
    F0Series::new(table, prec)?.evaluate(x, r, terms)
}
