use rug::ops::Pow;
use rug::Float;

use super::{SingularityError, SingularityProfile};
use crate::numerics::{gamma_half_integer, pi, BigReal, HalfPowerCoeff, Parity, ParityReal, Precision};

/// Σ_{j odd, lo <= j < 2N−2} c_j·Γ(j/2+1)·d^{−j/2−1} / (πi), real by parity.
fn odd_sum<'a>(
    coeff: impl Fn(i32) -> Option<&'a HalfPowerCoeff>,
    available: usize,
    lo: i32,
    d: u64,
    order: u32,
    prec: Precision,
) -> Result<BigReal, SingularityError> {
    let wp = prec.bits() + 32;
    let gp = Precision::new(wp).expect("valid");
    let df = Float::with_val(wp, d);
    let sqrt_d = Float::with_val(wp, df.sqrt_ref());
    let mut acc = ParityReal::zero(wp, Parity::Imaginary);
    let top = 2 * order as i32 - 2;
    let mut j = lo;
    while j < top {
        let c =
            coeff(j).ok_or(SingularityError::InsufficientCoefficients { needed: (top - lo) as usize, available })?;
        let gamma = gamma_half_integer(((j + 1) / 2) as u32, gp);
        // d^{−j/2−1} = d^{−(j+1)/2}/√d
        let pw = Float::with_val(wp, df.clone().pow(-((j + 1) / 2))) / &sqrt_d;
        acc.add_assign(&c.as_parity_real().scale(gamma * pw));
        j += 2;
    }
    let q = acc.div(&ParityReal::new(pi(gp), Parity::Imaginary));
    debug_assert_eq!(q.parity, Parity::Real);
    Ok(q.value)
}

/// Asymptotic value of n_{g,d} from the first N orders of the singular
/// expansion.
///
/// Genus 0: −3·e^{−d·x0}·Σ_{j odd >= 5, j < 2N−2} a_j·Γ(j/2+1)·d^{−j/2−1}/(πi).
/// Genus 1: (e^{−d·x0}/d)·(1/48 − Σ_{j odd >= −1, j < 2N−2} b_j·Γ(j/2+1)·d^{−j/2−1}/(πi)).
/// N = 0 keeps the pole term alone in genus 1.
pub fn asymptotic_predict(
    genus: u32,
    profile: &SingularityProfile,
    d: u64,
    order: u32,
    prec: Precision,
) -> Result<BigReal, SingularityError> {
    if d == 0 {
        return Err(SingularityError::Numerics("degree must be positive".into()));
    }
    let wp = prec.bits() + 32;
    let decay = Float::with_val(wp, -Float::with_val(wp, &profile.x0.value * d)).exp();
    let value = match genus {
        0 => {
            let s = odd_sum(|j| profile.a.get(j as usize), profile.a.len(), 5, d, order, prec)?;
            Float::with_val(wp, s * decay) * -3i32
        }
        1 => {
            let g = &profile.genus1;
            let s = odd_sum(|j| g.get(j), g.b.len(), -1, d, order, prec)?;
            let pole = -Float::with_val(wp, &g.residue);
            Float::with_val(wp, pole - s) * decay / d
        }
        g => return Err(SingularityError::BadGenus(g)),
    };
    Ok(Float::with_val(prec.bits(), value))
}
