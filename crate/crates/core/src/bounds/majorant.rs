use rayon::prelude::*;
use rug::ops::Pow;
use rug::Integer;

use super::{expect_table, BoundReport, BoundsError, Violation};
use crate::numerics::ExactRational;
use crate::recursions::{CountTable, Target};

/// Majorant grid ñ′_d(p), 0 <= p <= 2d, dominating d³·n_{0,d}(p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P3Majorants {
    rows: Vec<Vec<ExactRational>>,
}

impl P3Majorants {
    pub fn d_max(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, d: usize, p: usize) -> Option<&ExactRational> {
        self.rows.get(d.checked_sub(1)?)?.get(p)
    }
}

/// ñ′_1(0) = 1/2, ñ′_d(0) = 8·Σ ñ′_{d1}(0)·ñ′_{d2}(0) for d >= 2, and for
/// p >= 1 ñ′_d(p) = ½·ñ′_d(p−1) + 8·ΣΣ ñ′_{d1}(p1)·ñ′_{d2}(p2) over
/// d1 + d2 = d, p1 + p2 = p, 0 <= p_i <= 2d_i.
pub fn p3_majorants(d_max: usize) -> P3Majorants {
    let mut rows: Vec<Vec<ExactRational>> = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let prev = &rows;
        let conv = |p: usize| -> ExactRational {
            (1..d)
                .into_par_iter()
                .map(|d1| {
                    let d2 = d - d1;
                    let mut acc = ExactRational::new();
                    for p1 in p.saturating_sub(2 * d2)..=p.min(2 * d1) {
                        acc += ExactRational::from(&prev[d1 - 1][p1] * &prev[d2 - 1][p - p1]);
                    }
                    acc
                })
                .reduce(ExactRational::new, |a, b| a + b)
                * 8u32
        };
        let mut row = Vec::with_capacity(2 * d + 1);
        row.push(if d == 1 { ExactRational::from((1, 2)) } else { conv(0) });
        for p in 1..=2 * d {
            let half = ExactRational::from(&row[p - 1] / 2u32);
            row.push(half + conv(p));
        }
        rows.push(row);
    }
    P3Majorants { rows }
}

/// n_{0,d}(p) <= ñ′_d(p)/d³ at every stored entry.
pub fn check_p3_majorants(table: &CountTable) -> Result<BoundReport, BoundsError> {
    expect_table(table, "p3 majorant", Target::P3, 0, "genus-0 P3")?;
    let m = p3_majorants(table.d_max());
    let violations = table
        .entries()
        .filter_map(|(d, p, n)| {
            let lhs = ExactRational::from(n * Integer::from(d).pow(3));
            let rhs = m.get(d, p).expect("same shape").clone();
            (lhs > rhs).then(|| Violation { d, p: Some(p), side: "upper", lhs, rhs })
        })
        .collect();
    Ok(BoundReport::new("p3-majorant", 1..=table.d_max(), table.len(), violations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursions::p3_genus0;

    #[test]
    fn first_majorants() {
        let m = p3_majorants(3);
        assert_eq!(*m.get(1, 0).unwrap(), ExactRational::from((1, 2)));
        assert_eq!(*m.get(1, 1).unwrap(), ExactRational::from((1, 4)));
        assert_eq!(*m.get(2, 0).unwrap(), 2);
        assert!(m.get(4, 0).is_none());
    }

    #[test]
    fn dominates_small_grid() {
        let t = p3_genus0(8);
        let r = check_p3_majorants(&t).unwrap();
        assert!(r.pass(), "{:?}", r.first_violation());
        assert_eq!(r.checked, t.len());
    }
}
