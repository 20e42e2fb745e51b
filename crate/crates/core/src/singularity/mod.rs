//! Behaviour of the genus-0 and genus-1 generating series at their dominant
//! singularity.
//!
//! With F0(z) = (1/3)·Σ n_{0,d}·e^{dz}, the singular point x0 is the real root
//! of 3F0'' − 2F0' = 9. Around it F0 has a half-power expansion
//! F0(x0 + z) = Σ a_d·z^{d/2} whose coefficients, after a0 and a2, follow from
//! the differential equation F0 satisfies; the same holds for F1' with a
//! simple pole. Coefficient asymptotics of the counts are read off these
//! expansions.
//!
//! Branch convention: on the negative real axis z = −t the square root is
//! taken as z^{1/2} = −i·√t. With this choice a5 lies on the negative
//! imaginary axis and the counts come out positive.

mod continuation;
mod frobenius;
mod genus1;
mod predict;
mod root;
mod series;

use rug::Float;
use thiserror::Error;

use crate::numerics::{BigReal, HalfPowerCoeff, Precision};
use crate::recursions::CountTable;

pub use continuation::{continuation_check, ContinuationReport, ContinuationSample};
pub use frobenius::{evaluate_expansion, frobenius_coeffs, ode_residual, OdeResidual, TRUST_RADIUS};
pub use genus1::{genus1_coeffs, pole_residue, Genus1Expansion};
pub use predict::asymptotic_predict;
pub use root::{solve_x0, solve_x0_with, RootOptions, X0Estimate};
pub use series::{eval_f0, F0Series, SeriesEvaluation, TailModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularityError {
    #[error("series needs {requested} terms but the table stops at d = {available}")]
    InsufficientTable { requested: usize, available: usize },
    #[error("expected a genus-{genus} P2 table")]
    WrongTable { genus: u32 },
    #[error("derivative order {0} is not supported (0..=3)")]
    BadOrder(usize),
    #[error("no sign change of 3F0''-2F0'-9 in the bracket: {0}")]
    BracketFailure(String),
    #[error("discriminant 4a2^2+45a2+18a0+567 = {0} is not positive")]
    DiscriminantNonPositive(f64),
    #[error("a5 vanishes, the expansion cannot be continued")]
    A5Zero,
    #[error("at least {needed} expansion coefficients are required, {available} available")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("sample z = {0} is outside the trust region -{TRUST_RADIUS} <= z < 0")]
    OutsideTrustRadius(f64),
    #[error("genus must be 0 or 1, got {0}")]
    BadGenus(u32),
    #[error("numerical failure: {0}")]
    Numerics(String),
}

/// Everything the asymptotic formulas need about the singular point.
#[derive(Clone, Debug)]
pub struct SingularityProfile {
    pub x0: X0Estimate,
    pub a0: BigReal,
    pub a2: BigReal,
    /// a_0, a_1, ..., a_M (a_1 = a_3 = 0).
    pub a: Vec<HalfPowerCoeff>,
    pub genus1: Genus1Expansion,
    pub precision: Precision,
}

impl SingularityProfile {
    /// Builds the profile from a genus-0 table: x0 by the tail-corrected root
    /// solve, a0 = F0(x0) and a2 = F0'(x0) from tail-corrected sums, the
    /// coefficients a_4..a_M and b_{-1}..b_{M'} from the expansion recursions.
    pub fn build(
        table: &CountTable,
        prec: Precision,
        max_a_index: usize,
        max_b_index: usize,
    ) -> Result<Self, SingularityError> {
        let x0 = solve_x0(table, prec)?;
        Self::build_at(table, x0, prec, max_a_index, max_b_index)
    }

    /// As [`SingularityProfile::build`] with an already solved x0.
    pub fn build_at(
        table: &CountTable,
        x0: X0Estimate,
        prec: Precision,
        max_a_index: usize,
        max_b_index: usize,
    ) -> Result<Self, SingularityError> {
        let max_a_index = max_a_index.max(max_b_index + 7);
        let series = F0Series::new(table, prec)?;
        let terms = x0.terms;
        let a0 = series.corrected(&x0.value, 0, terms, x0.fit_terms, x0.window)?;
        let a2 = series.corrected(&x0.value, 1, terms, x0.fit_terms, x0.window)?;
        let a = frobenius_coeffs(&a0, &a2, max_a_index, prec)?;
        let genus1 = genus1_coeffs(&a, max_b_index as i32)?;
        Ok(SingularityProfile { x0, a0, a2, a, genus1, precision: prec })
    }

    pub fn coeff(&self, index: usize) -> Option<&HalfPowerCoeff> {
        self.a.get(index)
    }

    /// a4 − 3/2 − a2/3, which the expansion forces to vanish.
    pub fn a4_defect(&self) -> BigReal {
        let p = self.precision.bits();
        let expected = Float::with_val(p, &self.a2 / 3u32) + 1.5f64;
        Float::with_val(p, &self.a[4].value - &expected)
    }

    /// 4a2² + 45a2 + 18a0 + 567.
    pub fn discriminant(&self) -> BigReal {
        frobenius::discriminant(&self.a0, &self.a2, self.precision)
    }
}
