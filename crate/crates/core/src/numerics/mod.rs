//! Exact rationals, configurable-precision reals and the handful of special
//! values the rest of the crate needs.
//!
//! Exact quantities (counts, recursion kernels, bound comparisons) are
//! [`ExactRational`]s and never touch floating point. Everything analytic
//! (series at the singular point, Frobenius coefficients, asymptotic
//! predictions) is carried as a [`BigReal`] at an explicit [`Precision`].

mod lsq;
mod parity;
mod special;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::{Float, Integer};
use thiserror::Error;

pub use lsq::least_squares;
pub use parity::{HalfPowerCoeff, Parity, ParityReal, Sign};
pub use special::{bernoulli_numbers, hurwitz_zeta};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRational = rug::Rational;

/// Binary floating point number with a per-value precision (MPFR, round to
/// nearest).
pub type BigReal = Float;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PRECISION_BITS: u32 = 64;

/// Default working precision for the singularity analysis.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("precision of {0} bits is below the minimum of {MIN_PRECISION_BITS}")]
    PrecisionTooLow(u32),
    #[error("least-squares system is singular or underdetermined ({rows} rows, {cols} columns)")]
    SingularSystem { rows: usize, cols: usize },
    #[error("Hurwitz zeta requires s > 1 and q > 0")]
    ZetaDomain,
}

/// Binary precision of a [`BigReal`] computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(DEFAULT_PRECISION_BITS);

    pub fn new(bits: u32) -> Result<Self, NumericsError> {
        if bits < MIN_PRECISION_BITS {
            return Err(NumericsError::PrecisionTooLow(bits));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// The same precision widened by `extra` guard bits.
    pub fn with_guard(self, extra: u32) -> Precision {
        Precision(self.0 + extra)
    }

    /// 2^{-bits}, the unit roundoff scale of this precision.
    pub fn epsilon(self) -> BigReal {
        Float::with_val(self.0, Float::i_exp(1, -(self.0 as i32)))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

/// Converts an exact rational to a real at `p_bits` of precision.
///
/// The conversion is correctly rounded, so the relative error is at most
/// 2^{-p_bits}.
pub fn rational_to_real(x: &ExactRational, p_bits: u32) -> Result<BigReal, NumericsError> {
    let prec = Precision::new(p_bits)?;
    Ok(to_real(x, prec))
}

/// Infallible form of [`rational_to_real`] for an already validated precision.
pub fn to_real(x: &ExactRational, prec: Precision) -> BigReal {
    Float::with_val(prec.bits(), x)
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(x: &ExactRational, prec: Precision) -> BigReal {
    debug_assert!(*x > 0);
    let guarded = prec.with_guard(32).bits();
    let mut v = Float::with_val(guarded, x);
    v.ln_mut();
    Float::with_val(prec.bits(), &v)
}

/// √π at the requested precision, computed once per precision.
pub fn sqrt_pi(prec: Precision) -> BigReal {
    static CACHE: OnceLock<Mutex<HashMap<u32, Float>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    map.entry(prec.bits())
        .or_insert_with(|| {
            let guarded = prec.bits() + 16;
            let pi = Float::with_val(guarded, Constant::Pi);
            Float::with_val(prec.bits(), pi.sqrt())
        })
        .clone()
}

/// π at the requested precision.
pub fn pi(prec: Precision) -> BigReal {
    Float::with_val(prec.bits(), Constant::Pi)
}

/// The rational factor (2m)! / (4^m m!) with Γ(m + 1/2) = factor · √π.
pub fn half_integer_gamma_factor(m: u32) -> ExactRational {
    let num = Integer::from(Integer::factorial(2 * m));
    let den = Integer::from(Integer::factorial(m)) << (2 * m);
    ExactRational::from((num, den))
}

/// Γ(m + 1/2) = (2m)! / (4^m m!) · √π.
pub fn gamma_half_integer(m: u32, prec: Precision) -> BigReal {
    let factor = Float::with_val(prec.bits() + 8, half_integer_gamma_factor(m));
    let value = factor * sqrt_pi(prec.with_guard(8));
    Float::with_val(prec.bits(), value)
}

/// n! for every n ≤ `max`, as exact integers.
#[derive(Clone, Debug)]
pub struct Factorials {
    values: Vec<Integer>,
}

impl Factorials {
    pub fn up_to(max: usize) -> Self {
        let mut values = Vec::with_capacity(max + 1);
        values.push(Integer::from(1));
        for n in 1..=max {
            let next = Integer::from(&values[n - 1] * n as u64);
            values.push(next);
        }
        Factorials { values }
    }

    pub fn max(&self) -> usize {
        self.values.len() - 1
    }

    /// n!, panicking past the memoized range.
    pub fn get(&self, n: usize) -> &Integer {
        &self.values[n]
    }

    /// Binomial coefficient with the usual convention C(n, k) = 0 outside
    /// 0 ≤ k ≤ n.
    pub fn binomial(&self, n: i64, k: i64) -> Integer {
        if n < 0 || k < 0 || k > n {
            return Integer::new();
        }
        let (n, k) = (n as usize, k as usize);
        Integer::from(self.get(n) / self.get(k)) / self.get(n - k)
    }
}

/// Clears `value·factorial` and reports whether the result is a nonnegative
/// integer.
pub fn is_nonnegative_integer_after_scaling(value: &ExactRational, factorial: &Integer) -> bool {
    if *value.numer() < 0 {
        return false;
    }
    factorial.is_divisible(value.denom())
}
