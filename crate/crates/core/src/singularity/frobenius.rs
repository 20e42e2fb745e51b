use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use super::SingularityError;
use crate::numerics::{BigReal, HalfPowerCoeff, Parity, ParityReal, Precision};

/// Largest |z| at which the truncated expansion is evaluated.
pub const TRUST_RADIUS: f64 = 1e-2;

/// 4a2² + 45a2 + 18a0 + 567.
pub(crate) fn discriminant(a0: &Float, a2: &Float, prec: Precision) -> BigReal {
    let wp = prec.bits() + 16;
    let mut v = Float::with_val(wp, a2.square_ref()) * 4u32;
    v += Float::with_val(wp, a2 * 45u32);
    v += Float::with_val(wp, a0 * 18u32);
    v += 567u32;
    Float::with_val(prec.bits(), v)
}

fn real(v: Float) -> ParityReal {
    ParityReal::new(v, Parity::Real)
}

/// Coefficients a_0..=a_max of F0(x0 + z) = Σ a_d·z^{d/2}.
///
/// a1 = a3 = 0, a4 = 3/2 + a2/3, a5 = −i·√(32·disc/6075), and a_{d+5} for
/// d >= 1 from
///
/// 45(d+2)(d+3)(d+5)/32·a5·a_{d+5} = −2a_d + 11(d+2)/2·a_{d+2}
///     + (d+2)(d+4)/2·((d−2)a4 − 9)·a_{d+4}
///     − Σ 3(d+2)(d1+3)(d1+5)(d2+3)(d2+5)/64·a_{d1+5}·a_{d2+5}
///     + Σ (d1² + d2² − d1·d2 − 4)(d1+4)(d2+4)/16·a_{d1+4}·a_{d2+4},
///
/// sums over d1 + d2 = d with d1, d2 >= 1.
pub fn frobenius_coeffs(
    a0: &Float,
    a2: &Float,
    max_index: usize,
    prec: Precision,
) -> Result<Vec<HalfPowerCoeff>, SingularityError> {
    if max_index < 6 {
        return Err(SingularityError::InsufficientCoefficients { needed: 6, available: max_index });
    }
    let wp = prec.bits() + 32;
    let disc = discriminant(a0, a2, Precision::new(wp).expect("valid"));
    if disc <= 0 {
        return Err(SingularityError::DiscriminantNonPositive(disc.to_f64()));
    }
    let mut a: Vec<ParityReal> = (0..=max_index).map(|d| ParityReal::zero(wp, Parity::of_index(d as i64))).collect();
    a[0] = real(Float::with_val(wp, a0));
    a[2] = real(Float::with_val(wp, a2));
    let a4 = Float::with_val(wp, a2 / 3u32) + 1.5f64;
    a[4] = real(a4.clone());
    let v5 = -(disc * 32u32 / 6075u32).sqrt();
    if v5.is_zero() {
        return Err(SingularityError::A5Zero);
    }
    a[5] = ParityReal::new(v5, Parity::Imaginary);

    for d in 1..=max_index - 5 {
        let di = d as i64;
        let mut rhs = a[d].scale(-2i32);
        rhs.add_assign(&a[d + 2].scale(Float::with_val(wp, 11 * (di + 2)) / 2u32));
        let c4 = Float::with_val(wp, &a4 * (di - 2)) - 9u32;
        rhs.add_assign(&a[d + 4].scale(c4 * ((di + 2) * (di + 4)) / 2u32));
        let sums: Vec<(ParityReal, ParityReal)> = (1..d)
            .into_par_iter()
            .map(|d1| {
                let d2 = d - d1;
                let (i1, i2) = (d1 as i64, d2 as i64);
                let quad = Float::with_val(wp, 3 * (di + 2) * (i1 + 3) * (i1 + 5) * (i2 + 3) * (i2 + 5)) / 64u32;
                let lin = Float::with_val(wp, (i1 * i1 + i2 * i2 - i1 * i2 - 4) * (i1 + 4) * (i2 + 4)) / 16u32;
                (a[d1 + 5].mul(&a[d2 + 5]).scale(quad), a[d1 + 4].mul(&a[d2 + 4]).scale(lin))
            })
            .collect();
        for (q, l) in &sums {
            rhs.sub_assign(q);
            rhs.add_assign(l);
        }
        let k = Float::with_val(wp, 45 * (di + 2) * (di + 3) * (di + 5)) / 32u32;
        let lead = a[5].scale(k);
        a[d + 5] = rhs.div(&lead);
    }

    let out: Vec<HalfPowerCoeff> = a
        .into_iter()
        .enumerate()
        .map(|(d, v)| {
            let v = ParityReal::new(Float::with_val(prec.bits(), &v.value), v.parity);
            HalfPowerCoeff::from_parity_real(d as i32, v)
        })
        .collect();
    debug_assert!(out.iter().all(HalfPowerCoeff::parity_consistent));
    Ok(out)
}

fn falling_half(d: usize, r: usize) -> i64 {
    // Π_{i<r} (d − 2i), i.e. 2^r·(d/2)(d/2 − 1)...
    (0..r as i64).map(|i| d as i64 - 2 * i).product()
}

/// F0^{(r)}(x0 − t) from the first `kept` coefficients, with
/// z^{1/2} = −i·√t on the negative axis:
/// Σ_{d<kept} (−1)^{⌊d/2⌋+r}·v_d·(d/2)_r·t^{d/2−r}.
pub fn evaluate_expansion(coeffs: &[HalfPowerCoeff], kept: usize, t: &Float, r: usize) -> BigReal {
    let wp = t.prec();
    let sqrt_t = Float::with_val(wp, t.sqrt_ref());
    let mut sum = Float::new(wp);
    let mut pw = Float::with_val(wp, 1);
    for (d, c) in coeffs.iter().take(kept).enumerate() {
        let fall = falling_half(d, r);
        if fall != 0 && !c.value.is_zero() {
            let mut term = Float::with_val(wp, &c.value * &pw) * fall;
            if (d / 2 + r) % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
        pw *= &sqrt_t;
    }
    let denom = Float::with_val(wp, t.pow(r as u32)) * Float::with_val(wp, 1u32 << r);
    sum / denom
}

#[derive(Clone, Debug)]
pub struct OdeResidual {
    /// (z, |LHS − RHS|).
    pub samples: Vec<(BigReal, BigReal)>,
    pub max: BigReal,
}

/// |(9 + 2F0' − 3F0'')·F0''' − (2F0 − 11F0' + 18F0'' + F0''²)| at each z from
/// the first `kept` coefficients. Vanishes to order |z|^{(kept−5)/2}.
pub fn ode_residual(
    coeffs: &[HalfPowerCoeff],
    kept: usize,
    z_samples: &[Float],
    prec: Precision,
) -> Result<OdeResidual, SingularityError> {
    if kept < 6 || kept > coeffs.len() {
        return Err(SingularityError::InsufficientCoefficients { needed: kept.max(6), available: coeffs.len() });
    }
    for z in z_samples {
        if *z >= 0 || z.clone().abs() > TRUST_RADIUS {
            return Err(SingularityError::OutsideTrustRadius(z.to_f64()));
        }
    }
    let wp = prec.bits() + 32;
    let samples: Vec<(BigReal, BigReal)> = z_samples
        .par_iter()
        .map(|z| {
            let t = Float::with_val(wp, -z);
            let f: Vec<Float> = (0..4).map(|r| evaluate_expansion(coeffs, kept, &t, r)).collect();
            let mut lhs = Float::with_val(wp, &f[1] * 2u32) + 9u32;
            lhs -= Float::with_val(wp, &f[2] * 3u32);
            lhs *= &f[3];
            let mut rhs = Float::with_val(wp, &f[0] * 2u32);
            rhs -= Float::with_val(wp, &f[1] * 11u32);
            rhs += Float::with_val(wp, &f[2] * 18u32);
            rhs += Float::with_val(wp, f[2].square_ref());
            (Float::with_val(prec.bits(), z), Float::with_val(prec.bits(), (lhs - rhs).abs()))
        })
        .collect();
    let max = samples.iter().map(|(_, r)| r.clone()).fold(Float::new(prec.bits()), |m, r| if r > m { r } else { m });
    Ok(OdeResidual { samples, max })
}
