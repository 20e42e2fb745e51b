use rayon::prelude::*;
use rug::Integer;

use super::{no_progress, CountTable, Progress, RecursionError};
use crate::numerics::{ExactRational, Factorials};

/// Quadratic kernel of the genus-0 space recursion.
///
/// f = (2d1+p1)!(2d2+p2)!/(2d+p)! · d2 · C(2d−p−1, 2d1−p1−1)
///     · (d1²·C(2p−2, 2p1) − d2²·C(2p−2, 2p2)),
/// defined for p1 <= 2d1, p2 <= 2d2 and 1 < p < 2d.
pub fn p3_kernel(d1: u64, d2: u64, p1: u64, p2: u64) -> Result<ExactRational, RecursionError> {
    check_kernel_domain(d1, d2, p1, p2)?;
    let f = Factorials::up_to((2 * (d1 + d2) + p1 + p2) as usize);
    Ok(kernel_with(&f, d1 as i64, d2 as i64, p1 as i64, p2 as i64))
}

fn check_kernel_domain(d1: u64, d2: u64, p1: u64, p2: u64) -> Result<(), RecursionError> {
    let (d, p) = (d1 + d2, p1 + p2);
    if d1 == 0 || d2 == 0 {
        return Err(RecursionError::KernelDomain(format!("degrees must be positive, got ({d1}, {d2})")));
    }
    if p1 > 2 * d1 || p2 > 2 * d2 {
        return Err(RecursionError::KernelDomain(format!(
            "line counts ({p1}, {p2}) exceed twice the degrees ({d1}, {d2})"
        )));
    }
    if p <= 1 || p >= 2 * d {
        return Err(RecursionError::KernelDomain(format!("need 1 < p1 + p2 < 2d, got p = {p}, d = {d}")));
    }
    Ok(())
}

fn kernel_with(f: &Factorials, d1: i64, d2: i64, p1: i64, p2: i64) -> ExactRational {
    let (d, p) = (d1 + d2, p1 + p2);
    let lead = f.binomial(2 * d - p - 1, 2 * d1 - p1 - 1);
    if lead == 0 {
        return ExactRational::new();
    }
    let diff =
        Integer::from(d1 * d1) * f.binomial(2 * p - 2, 2 * p1) - Integer::from(d2 * d2) * f.binomial(2 * p - 2, 2 * p2);
    let num = Integer::from(f.get((2 * d1 + p1) as usize) * f.get((2 * d2 + p2) as usize)) * lead * diff * d2;
    ExactRational::from((num, f.get((2 * d + p) as usize).clone()))
}

/// n_{0,d}(p) for 1 <= d <= d_max, 0 <= p <= 2d.
///
/// Each degree is filled in the order p = 0, 1, 2..2d−1, 2d; the two end
/// points and p = 1 use their own closed recursions, the interior uses the
/// kernel above.
pub fn p3_genus0(d_max: usize) -> CountTable {
    p3_genus0_with_progress(d_max, &no_progress)
}

pub fn p3_genus0_with_progress(d_max: usize, progress: Progress<'_>) -> CountTable {
    let d_max = d_max.max(1);
    let f = Factorials::up_to(4 * d_max + 1);
    let mut rows: Vec<Vec<ExactRational>> = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let row = next_row(&rows, d, &f);
        rows.push(row);
        progress(d);
    }
    CountTable::from_p3_rows(rows).expect("rows have the right shape")
}

fn next_row(rows: &[Vec<ExactRational>], d: usize, f: &Factorials) -> Vec<ExactRational> {
    let n = |d: usize, p: usize| &rows[d - 1][p];
    let di = d as i64;
    let mut row: Vec<ExactRational> = Vec::with_capacity(2 * d + 1);

    // p = 0
    if d == 1 {
        row.push(ExactRational::from((1, 2)));
    } else {
        let den = di * (di - 1) * (2 * di - 1);
        let sum = par_sum(1..d, |d1| {
            let (a, b) = (d1 as i64, (d - d1) as i64);
            let mut t = ExactRational::from(((b - a) * a * a * b * (2 * b + 1), den));
            t *= n(d1, 0);
            t *= n(d - d1, 1);
            t
        });
        row.push(sum);
    }

    // p = 1
    let mut v = ExactRational::from((di, 2 * di + 1)) * &row[0];
    let den = di * (2 * di - 1) * (2 * di + 1);
    v += par_sum(1..d, |d1| {
        let (a, b) = (d1 as i64, (d - d1) as i64);
        let mut t = ExactRational::from((a * a * a * b * (2 * b + 1), den));
        t *= n(d1, 0);
        t *= n(d - d1, 1);
        t
    });
    row.push(v);

    // 2 <= p <= 2d − 1
    for p in 2..2 * d {
        let mut v = ExactRational::from((di, 2 * di + p as i64)) * &row[p - 1];
        v += par_sum(1..d, |d1| {
            let d2 = d - d1;
            let lo = p.saturating_sub(2 * d2);
            let hi = p.min(2 * d1);
            let mut acc = ExactRational::new();
            for p1 in lo..=hi {
                let k = kernel_with(f, d1 as i64, d2 as i64, p1 as i64, (p - p1) as i64);
                if k == 0 {
                    continue;
                }
                let mut t = k;
                t *= n(d1, p1);
                t *= n(d2, p - p1);
                acc += t;
            }
            acc
        });
        row.push(v);
    }

    // p = 2d
    let mut v = ExactRational::from((1, 2)) * &row[2 * d - 1];
    let den = 2 * di * (2 * di - 1) * (4 * di - 1);
    v += par_sum(1..d, |d1| {
        let d2 = d - d1;
        let (a, b) = (d1 as i64, d2 as i64);
        let mut t = ExactRational::from((a * b * (4 * di * a * b - di * di + 2 * a * b), den));
        t *= n(d1, 2 * d1);
        t *= n(d2, 2 * d2);
        t
    });
    row.push(v);
    row
}

fn par_sum<F>(range: std::ops::Range<usize>, term: F) -> ExactRational
where
    F: Fn(usize) -> ExactRational + Sync + Send,
{
    range.into_par_iter().map(term).reduce(ExactRational::new, |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(t: &CountTable, d: usize) -> Vec<Integer> {
        let f = Factorials::up_to(t.max_factorial_index());
        (0..=2 * d).map(|p| t.count_with(&f, d, p).unwrap()).collect()
    }

    #[test]
    fn small_degrees() {
        let t = p3_genus0(3);
        assert_eq!(counts(&t, 1), [1, 1, 2]);
        assert_eq!(counts(&t, 2), [0, 1, 4, 18, 92]);
        assert_eq!(counts(&t, 3)[6], 80160);
    }

    #[test]
    fn kernel_at_d2_p2() {
        // (2+1)!(2+1)!/6! · 1 · C(1, 0) · (C(2,2) − C(2,2)) = 0
        assert_eq!(p3_kernel(1, 1, 1, 1).unwrap(), 0);
        // (2)!(4)!/6! · 1 · C(1, 1) · (1·C(2,0) − 1·C(2,4)) = 48/720
        assert_eq!(p3_kernel(1, 1, 0, 2).unwrap(), ExactRational::from((1, 15)));
        // p1 = 2 = 2d1 makes the leading binomial C(1, −1) vanish.
        assert_eq!(p3_kernel(1, 1, 2, 0).unwrap(), 0);
    }

    #[test]
    fn kernel_domain() {
        assert!(p3_kernel(1, 1, 3, 0).is_err());
        assert!(p3_kernel(1, 1, 1, 0).is_err());
        assert!(p3_kernel(1, 1, 2, 2).is_err());
        assert!(p3_kernel(0, 1, 1, 1).is_err());
    }
}
