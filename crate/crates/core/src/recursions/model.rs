use rug::ops::Pow;
use rug::Integer;

use super::RecursionError;
use crate::numerics::ExactRational;

/// Model recursion n_d = Σ_{d1+d2=d} a·(d1·d2/d)^k · n_{d1}·n_{d2} with first
/// term n1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    a: ExactRational,
    k: u32,
    n1: ExactRational,
}

impl ModelSpec {
    pub fn new(a: ExactRational, k: u32, n1: ExactRational) -> Result<Self, RecursionError> {
        if a <= 0 {
            return Err(RecursionError::InvalidModel(format!("a must be positive, got {a}")));
        }
        if n1 <= 0 {
            return Err(RecursionError::InvalidModel(format!("n1 must be positive, got {n1}")));
        }
        Ok(ModelSpec { a, k, n1 })
    }

    pub fn a(&self) -> &ExactRational {
        &self.a
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n1(&self) -> &ExactRational {
        &self.n1
    }

    /// a·(d1·d2/d)^k.
    pub fn kernel(&self, d1: u64, d2: u64) -> ExactRational {
        let base = ExactRational::from((d1 * d2, d1 + d2));
        let mut k = ExactRational::from(base.pow(self.k));
        k *= &self.a;
        k
    }
}

/// n_d = Catalan(d−1)·a^{d−1}·n1^d / d^k for d = 1..=d_max.
pub fn model_closed_form(spec: &ModelSpec, d_max: usize) -> Vec<ExactRational> {
    let mut out = Vec::with_capacity(d_max);
    let mut a_pow = ExactRational::from(1);
    let mut n1_pow = spec.n1.clone();
    let mut catalan = Integer::from(1);
    for d in 1..=d_max as u64 {
        let mut v = ExactRational::from(&catalan * &a_pow);
        v *= &n1_pow;
        v /= Integer::from(d).pow(spec.k);
        out.push(v);
        // Catalan(d) = Catalan(d−1)·2(2d−1)/(d+1)
        catalan *= 2 * (2 * d - 1);
        catalan /= d + 1;
        a_pow *= &spec.a;
        n1_pow *= &spec.n1;
    }
    out
}

/// The same sequence by direct O(d²) convolution.
pub fn model_recursion(spec: &ModelSpec, d_max: usize) -> Vec<ExactRational> {
    let mut out: Vec<ExactRational> = Vec::with_capacity(d_max);
    if d_max == 0 {
        return out;
    }
    out.push(spec.n1.clone());
    for d in 2..=d_max {
        let mut sum = ExactRational::new();
        for d1 in 1..d {
            let d2 = d - d1;
            let mut t = spec.kernel(d1 as u64, d2 as u64);
            t *= &out[d1 - 1];
            t *= &out[d2 - 1];
            sum += t;
        }
        out.push(sum);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: (i64, i64), k: u32, n1: (i64, i64)) -> ModelSpec {
        ModelSpec::new(ExactRational::from(a), k, ExactRational::from(n1)).unwrap()
    }

    #[test]
    fn catalan_case() {
        let s = spec((1, 1), 0, (1, 1));
        let closed = model_closed_form(&s, 6);
        let want: Vec<ExactRational> = [1, 1, 2, 5, 14, 42].iter().map(|&v| ExactRational::from(v)).collect();
        assert_eq!(closed, want);
        assert_eq!(model_recursion(&s, 4)[3], 5);
    }

    #[test]
    fn hand_substitution() {
        let s = spec((2, 1), 1, (1, 1));
        assert_eq!(model_recursion(&s, 2)[1], 1);
        assert_eq!(model_closed_form(&s, 2)[1], 1);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ModelSpec::new(ExactRational::from(0), 1, ExactRational::from(1)).is_err());
        assert!(ModelSpec::new(ExactRational::from(1), 1, ExactRational::from(-1)).is_err());
    }

    #[test]
    fn recursion_matches_closed_form_on_a_small_grid() {
        for a in [(1, 2), (3, 1)] {
            for k in 0..3 {
                let s = spec(a, k, (2, 1));
                assert_eq!(model_recursion(&s, 12), model_closed_form(&s, 12));
            }
        }
    }
}
