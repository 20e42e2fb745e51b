use rayon::prelude::*;

use super::{no_progress, CountTable, Progress, RecursionError, Target};
use crate::numerics::ExactRational;

/// Genus-0 plane kernel
/// f(d1, d2) = d1·d2·(3·d1·d2·(d+2) − 2d²) / (2(3d−3)(3d−2)(3d−1)), d = d1 + d2.
pub fn p2_kernel(d1: u64, d2: u64) -> Result<ExactRational, RecursionError> {
    if d1 == 0 || d2 == 0 {
        return Err(RecursionError::KernelDomain(format!("degrees must be positive, got ({d1}, {d2})")));
    }
    Ok(kernel(d1, d2))
}

fn kernel(d1: u64, d2: u64) -> ExactRational {
    let d = d1 + d2;
    let num = rug::Integer::from(d1 * d2) * (3 * d1 * d2 * (d + 2) - 2 * d * d);
    let den = rug::Integer::from(2 * (3 * d - 3) * (3 * d - 2)) * (3 * d - 1);
    ExactRational::from((num, den))
}

/// Σ_{d1+d2=d} term(d1)·term(d2)·w(d1,d2) for a symmetric weight, evaluated
/// over d1 <= d2 in parallel.
fn symmetric_convolution<W>(values: &[ExactRational], d: usize, weight: W) -> ExactRational
where
    W: Fn(u64, u64) -> ExactRational + Sync,
{
    (1..=d / 2)
        .into_par_iter()
        .map(|d1| {
            let d2 = d - d1;
            let mut t = weight(d1 as u64, d2 as u64);
            t *= &values[d1 - 1];
            t *= &values[d2 - 1];
            if d1 != d2 {
                t *= 2u32;
            }
            t
        })
        .reduce(ExactRational::new, |a, b| a + b)
}

/// n_{0,d} for 1 <= d <= d_max from n_{0,1} = 1/2 and the quadratic recursion.
pub fn p2_genus0(d_max: usize) -> CountTable {
    p2_genus0_with_progress(d_max, &no_progress)
}

pub fn p2_genus0_with_progress(d_max: usize, progress: Progress<'_>) -> CountTable {
    let d_max = d_max.max(1);
    let mut values = Vec::with_capacity(d_max);
    values.push(ExactRational::from((1, 2)));
    progress(1);
    for d in 2..=d_max {
        let next = symmetric_convolution(&values, d, kernel);
        values.push(next);
        progress(d);
    }
    CountTable::from_p2_values(0, values).expect("non-empty genus-0 table")
}

/// n_{1,d} for 1 <= d <= d_max. No seed value is needed: at d = 1 both terms
/// vanish.
pub fn p2_genus1(d_max: usize, genus0: &CountTable) -> Result<CountTable, RecursionError> {
    p2_genus1_with_progress(d_max, genus0, &no_progress)
}

pub fn p2_genus1_with_progress(
    d_max: usize,
    genus0: &CountTable,
    progress: Progress<'_>,
) -> Result<CountTable, RecursionError> {
    if genus0.target() != Target::P2 || genus0.genus() != 0 {
        return Err(RecursionError::InvalidTable("genus-1 recursion needs a genus-0 P2 table".into()));
    }
    let d_max = d_max.max(1);
    if genus0.d_max() < d_max {
        return Err(RecursionError::MissingPrerequisite { required: d_max, available: genus0.d_max() });
    }
    let n0 = genus0.sequence().expect("P2 table");
    let mut n1: Vec<ExactRational> = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let du = d as u64;
        let mut value = ExactRational::from(((du - 1) * du.saturating_sub(2), 216u64));
        value *= &n0[d - 1];
        let sum = (1..d)
            .into_par_iter()
            .map(|d0| {
                let d1 = d - d0;
                let c = 3 * (d0 as u64) * (d0 as u64) - 2 * d0 as u64;
                let mut t = ExactRational::from(c * d1 as u64);
                t *= &n0[d0 - 1];
                t *= &n1[d1 - 1];
                t
            })
            .reduce(ExactRational::new, |a, b| a + b);
        value += sum / ExactRational::from(27 * du);
        n1.push(value);
        progress(d);
    }
    CountTable::from_p2_values(1, n1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Factorials;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::from((n, d))
    }

    #[test]
    fn kernel_hand_values() {
        assert_eq!(p2_kernel(1, 1).unwrap(), q(1, 30));
        assert_eq!(p2_kernel(1, 2).unwrap(), q(1, 28));
        assert_eq!(p2_kernel(3, 7).unwrap(), p2_kernel(7, 3).unwrap());
        assert!(p2_kernel(0, 2).is_err());
    }

    #[test]
    fn first_genus0_values() {
        let t = p2_genus0(5);
        assert_eq!(*t.n(1).unwrap(), q(1, 2));
        assert_eq!(*t.n(2).unwrap(), q(1, 120));
        let f = Factorials::up_to(t.max_factorial_index());
        assert_eq!(t.count_with(&f, 3, 0).unwrap(), 12);
        assert_eq!(t.count_with(&f, 5, 0).unwrap(), 87304);
    }

    #[test]
    fn first_genus1_values() {
        let g0 = p2_genus0(4);
        let t = p2_genus1(4, &g0).unwrap();
        let f = Factorials::up_to(t.max_factorial_index());
        let counts: Vec<_> = (1..=4).map(|d| t.count_with(&f, d, 0).unwrap()).collect();
        assert_eq!(counts, [0, 0, 1, 225]);
    }

    #[test]
    fn genus1_needs_long_enough_genus0() {
        let g0 = p2_genus0(3);
        assert_eq!(p2_genus1(5, &g0), Err(RecursionError::MissingPrerequisite { required: 5, available: 3 }));
        let wrong = p2_genus1(3, &g0).unwrap();
        assert!(p2_genus1(3, &wrong).is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(p2_genus0(30), p2_genus0(30));
    }
}
