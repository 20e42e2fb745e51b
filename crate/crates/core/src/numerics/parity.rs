use std::fmt;

use rug::Float;

use super::BigReal;

/// Whether a coefficient lies on the real or the imaginary axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Real,
    Imaginary,
}

impl Parity {
    /// Parity dictated by the index of a half-power coefficient: even indices
    /// are real, odd ones purely imaginary.
    pub fn of_index(index: i64) -> Parity {
        if index.rem_euclid(2) == 0 {
            Parity::Real
        } else {
            Parity::Imaginary
        }
    }

    pub fn is_imaginary(self) -> bool {
        matches!(self, Parity::Imaginary)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Real => "real",
            Parity::Imaginary => "imaginary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
}

impl Sign {
    pub fn of(value: &Float) -> Sign {
        if value.is_zero() {
            Sign::Zero
        } else if value.is_sign_negative() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
            Sign::Zero => '0',
        }
    }
}

/// A complex number known to be real or purely imaginary: `value` if the
/// parity is real, `i·value` otherwise.
///
/// Products combine parities with i·i = −1; sums require equal parities. A
/// parity mismatch in a sum is a logic error and panics.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityReal {
    pub value: BigReal,
    pub parity: Parity,
}

impl ParityReal {
    pub fn new(value: BigReal, parity: Parity) -> Self {
        ParityReal { value, parity }
    }

    pub fn zero(prec: u32, parity: Parity) -> Self {
        ParityReal::new(Float::new(prec), parity)
    }

    pub fn mul(&self, other: &ParityReal) -> ParityReal {
        let mut value = Float::with_val(self.value.prec(), &self.value * &other.value);
        let parity = match (self.parity, other.parity) {
            (Parity::Real, Parity::Real) => Parity::Real,
            (Parity::Imaginary, Parity::Imaginary) => {
                value = -value;
                Parity::Real
            }
            _ => Parity::Imaginary,
        };
        ParityReal { value, parity }
    }

    /// Quotient self / other, with 1/i = −i.
    pub fn div(&self, other: &ParityReal) -> ParityReal {
        let mut value = Float::with_val(self.value.prec(), &self.value / &other.value);
        let parity = match (self.parity, other.parity) {
            (Parity::Real, Parity::Real) | (Parity::Imaginary, Parity::Imaginary) => Parity::Real,
            (Parity::Real, Parity::Imaginary) => {
                value = -value;
                Parity::Imaginary
            }
            (Parity::Imaginary, Parity::Real) => Parity::Imaginary,
        };
        ParityReal { value, parity }
    }

    pub fn scale<T>(&self, factor: T) -> ParityReal
    where
        Float: std::ops::MulAssign<T>,
    {
        let mut value = self.value.clone();
        value *= factor;
        ParityReal { value, parity: self.parity }
    }

    pub fn add_assign(&mut self, other: &ParityReal) {
        assert_eq!(self.parity, other.parity, "adding coefficients of different parity");
        self.value += &other.value;
    }

    pub fn sub_assign(&mut self, other: &ParityReal) {
        assert_eq!(self.parity, other.parity, "subtracting coefficients of different parity");
        self.value -= &other.value;
    }
}

/// Coefficient of z^{index/2} in a half-power (Puiseux) expansion.
///
/// Stored as a signed real `value` with a parity flag; the coefficient is
/// `value` or `i·value`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPowerCoeff {
    pub index: i32,
    pub value: BigReal,
    pub parity: Parity,
}

impl HalfPowerCoeff {
    pub fn new(index: i32, value: BigReal, parity: Parity) -> Self {
        HalfPowerCoeff { index, value, parity }
    }

    pub fn from_parity_real(index: i32, v: ParityReal) -> Self {
        HalfPowerCoeff::new(index, v.value, v.parity)
    }

    pub fn as_parity_real(&self) -> ParityReal {
        ParityReal::new(self.value.clone(), self.parity)
    }

    pub fn magnitude(&self) -> BigReal {
        self.value.clone().abs()
    }

    pub fn sign(&self) -> Sign {
        Sign::of(&self.value)
    }

    /// Real for even indices, imaginary for odd ones. A zero coefficient is
    /// consistent with either flag.
    pub fn parity_consistent(&self) -> bool {
        self.value.is_zero() || self.parity == Parity::of_index(self.index as i64)
    }
}

impl fmt::Display for HalfPowerCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let v = self.value.to_string_radix(10, Some(digits));
        match self.parity {
            Parity::Real => write!(f, "a[{}] = {}", self.index, v),
            Parity::Imaginary => write!(f, "a[{}] = {}i", self.index, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(v: f64, parity: Parity) -> ParityReal {
        ParityReal::new(Float::with_val(64, v), parity)
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = pr(1.0, Parity::Imaginary);
        let sq = i.mul(&i);
        assert_eq!(sq.parity, Parity::Real);
        assert_eq!(sq.value, -1.0);
    }

    #[test]
    fn division_by_i() {
        let one = pr(1.0, Parity::Real);
        let i = pr(1.0, Parity::Imaginary);
        let q = one.div(&i);
        assert_eq!(q.parity, Parity::Imaginary);
        assert_eq!(q.value, -1.0);
        let back = q.mul(&i);
        assert_eq!(back, one);
    }

    #[test]
    #[should_panic(expected = "different parity")]
    fn mixed_sum_panics() {
        let mut a = pr(1.0, Parity::Real);
        a.add_assign(&pr(1.0, Parity::Imaginary));
    }

    #[test]
    fn index_parity() {
        assert_eq!(Parity::of_index(-1), Parity::Imaginary);
        assert_eq!(Parity::of_index(4), Parity::Real);
        let c = HalfPowerCoeff::new(5, Float::with_val(64, -2.0), Parity::Imaginary);
        assert!(c.parity_consistent());
        assert_eq!(c.sign(), Sign::Negative);
        assert_eq!(c.magnitude(), 2.0);
    }
}
