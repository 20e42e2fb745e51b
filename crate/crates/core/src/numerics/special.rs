use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Float, Integer};

use super::{ExactRational, NumericsError, Precision};

const CACHED_BERNOULLI: usize = 160;

/// Bernoulli numbers B_0..=B_max (B_1 = −1/2 convention).
pub fn bernoulli_numbers(max: usize) -> Vec<ExactRational> {
    // Σ_{k=0}^{m} C(m+1, k) B_k = 0 for m ≥ 1.
    let mut b: Vec<ExactRational> = Vec::with_capacity(max + 1);
    b.push(ExactRational::from(1));
    for m in 1..=max {
        let mut acc = ExactRational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (k, bk) in b.iter().enumerate() {
            acc += ExactRational::from(bk * &binom);
            binom *= (m + 1 - k) as u64;
            binom /= (k + 1) as u64;
        }
        // binom is now C(m+1, m).
        b.push(ExactRational::from(-acc / binom));
    }
    b
}

fn cached_bernoulli() -> &'static [ExactRational] {
    static CACHE: OnceLock<Vec<ExactRational>> = OnceLock::new();
    CACHE.get_or_init(|| bernoulli_numbers(CACHED_BERNOULLI))
}

/// Hurwitz zeta ζ(s, q) = Σ_{n≥0} (n+q)^{-s} for s > 1, q > 0.
///
/// Direct summation up to a shift a = q + N, then Euler–Maclaurin with
/// Bernoulli corrections until they drop below the working precision.
pub fn hurwitz_zeta(s: &Float, q: &Float, prec: Precision) -> Result<Float, NumericsError> {
    if *s <= 1 || *q <= 0 {
        return Err(NumericsError::ZetaDomain);
    }
    let wp = prec.bits() + 32;
    let threshold = prec.bits() / 2 + 16;
    let mut a = Float::with_val(wp, q);
    let mut sum = Float::new(wp);
    while a < threshold {
        let term = Float::with_val(wp, a.clone().pow(s)).recip();
        sum += term;
        a += 1u32;
    }
    let s_minus_1 = Float::with_val(wp, s - 1u32);
    let a_pow_neg_s = Float::with_val(wp, a.clone().pow(s)).recip();
    sum += Float::with_val(wp, &a_pow_neg_s * &a) / &s_minus_1;
    sum += Float::with_val(wp, &a_pow_neg_s / 2u32);

    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let bern = cached_bernoulli();
    let a_sq = Float::with_val(wp, a.square_ref());
    // k = 1 correction: B_2/2! · s · a^{-s-1}
    let mut poch = Float::with_val(wp, s);
    let mut a_pow = Float::with_val(wp, &a_pow_neg_s / &a);
    let mut factorial = Integer::from(2);
    let mut k = 1usize;
    while 2 * k <= CACHED_BERNOULLI {
        let coeff = Float::with_val(wp, &bern[2 * k]) / Float::with_val(wp, &factorial);
        let term = Float::with_val(wp, &coeff * &poch) * &a_pow;
        sum += &term;
        let bound = Float::with_val(wp, sum.abs_ref()) * &eps;
        if Float::with_val(wp, term.abs_ref()) < bound {
            break;
        }
        let s_plus = Float::with_val(wp, s + (2 * k - 1) as u32);
        poch *= &s_plus;
        poch *= Float::with_val(wp, s + (2 * k) as u32);
        a_pow /= &a_sq;
        factorial *= ((2 * k + 1) * (2 * k + 2)) as u64;
        k += 1;
    }
    Ok(Float::with_val(prec.bits(), sum))
}
