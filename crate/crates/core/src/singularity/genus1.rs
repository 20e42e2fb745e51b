use rug::Float;

use super::SingularityError;
use crate::numerics::{ExactRational, HalfPowerCoeff, Parity, ParityReal};

/// F1'(x0 + z) = residue/z + Σ_{j >= −1} b_j·z^{j/2}.
#[derive(Clone, Debug)]
pub struct Genus1Expansion {
    pub residue: ExactRational,
    /// b_{−1}, b_0, ..., b_{M'}.
    pub b: Vec<HalfPowerCoeff>,
}

impl Genus1Expansion {
    pub fn max_index(&self) -> i32 {
        self.b.len() as i32 - 2
    }

    pub fn get(&self, index: i32) -> Option<&HalfPowerCoeff> {
        self.b.get(usize::try_from(index + 1).ok()?)
    }
}

/// Leading terms: the numerator starts at (15/64)·a5·z^{−1/2}, the
/// denominator 9 + 2F0' − 3F0'' at (−45/4)·a5·z^{1/2}, so a5 cancels.
pub fn pole_residue() -> ExactRational {
    ExactRational::from((15, 64)) / ExactRational::from((-45, 4))
}

/// Expansion of F1' = (F0''' − 3F0'' + 2F0')/(8·(9 + 2F0' − 3F0'')) from
/// a_0..a_M, which must reach index M' + 7.
///
/// In w = z^{1/2}, the denominator is w·Σ P_j·w^j with
/// P_j = (j+3)/4·(4a_{j+3} − 3(j+5)a_{j+5}) (a3 ≡ 0) and the numerator is
/// w^{−2}·Σ T_j·w^j with T_j = Q_j + R_{j−1},
/// Q_j = (j+1)(j+3)(j+5)/8·a_{j+5}, R_m = (m+2)a_{m+2} − 3(m+4)(m+2)/4·a_{m+4}.
/// The quotient coefficients S_j give b_{j−2} = S_j.
pub fn genus1_coeffs(a: &[HalfPowerCoeff], max_b_index: i32) -> Result<Genus1Expansion, SingularityError> {
    let max_b_index = max_b_index.max(-1);
    let needed = (max_b_index + 7) as usize;
    if a.len() < needed + 1 {
        return Err(SingularityError::InsufficientCoefficients { needed: needed + 1, available: a.len() });
    }
    if a[5].value.is_zero() {
        return Err(SingularityError::A5Zero);
    }
    let wp = a[5].value.prec();
    let coef = |i: usize| -> ParityReal {
        if i == 3 {
            ParityReal::zero(wp, Parity::Imaginary)
        } else {
            a[i].as_parity_real()
        }
    };
    let count = (max_b_index + 3) as usize;
    let p: Vec<ParityReal> = (0..count)
        .map(|j| {
            let ji = j as i64;
            let mut v = coef(j + 3).scale(4i32);
            v.sub_assign(&coef(j + 5).scale((3 * (ji + 5)) as i32));
            v.scale(Float::with_val(wp, ji + 3) / 4u32)
        })
        .collect();
    let r = |m: usize| -> ParityReal {
        let mi = m as i64;
        let mut v = coef(m + 2).scale((mi + 2) as i32);
        v.sub_assign(&coef(m + 4).scale(Float::with_val(wp, 3 * (mi + 4) * (mi + 2)) / 4u32));
        v
    };
    let mut s: Vec<ParityReal> = Vec::with_capacity(count);
    let lead = p[0].scale(8i32);
    for j in 0..count {
        let ji = j as i64;
        let mut t = coef(j + 5).scale(Float::with_val(wp, (ji + 1) * (ji + 3) * (ji + 5)) / 8u32);
        if j >= 1 {
            t.add_assign(&r(j - 1));
        }
        for k in 1..=j {
            t.sub_assign(&p[k].mul(&s[j - k]).scale(8i32));
        }
        s.push(t.div(&lead));
    }
    let b = s.into_iter().enumerate().skip(1).map(|(j, v)| HalfPowerCoeff::from_parity_real(j as i32 - 2, v)).collect();
    Ok(Genus1Expansion { residue: pole_residue(), b })
}
