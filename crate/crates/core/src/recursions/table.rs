use std::fmt;

use rug::Integer;

use super::RecursionError;
use crate::numerics::{ExactRational, Factorials};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    P2,
    P3,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::P2 => "p2",
            Target::P3 => "p3",
        }
    }

    pub fn parse(s: &str) -> Option<Target> {
        match s.to_ascii_lowercase().as_str() {
            "p2" => Some(Target::P2),
            "p3" => Some(Target::P3),
            _ => None,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Values {
    /// n_{g,d} for d = 1..=d_max.
    Line(Vec<ExactRational>),
    /// n_{0,d}(p) for d = 1..=d_max, 0 <= p <= 2d.
    Grid(Vec<Vec<ExactRational>>),
}

/// Normalized counts for one target and genus, indexed from degree 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    target: Target,
    genus: u32,
    values: Values,
}

impl CountTable {
    /// A P² table from n_{g,1}, n_{g,2}, ... .
    pub fn from_p2_values(genus: u32, values: Vec<ExactRational>) -> Result<Self, RecursionError> {
        if genus > 1 {
            return Err(RecursionError::InvalidTable(format!("genus {genus} is not supported")));
        }
        if values.is_empty() {
            return Err(RecursionError::InvalidTable("no degrees".into()));
        }
        Ok(CountTable { target: Target::P2, genus, values: Values::Line(values) })
    }

    /// A genus-0 P³ table from rows n_{0,d}(0..=2d), d = 1, 2, ... .
    pub fn from_p3_rows(rows: Vec<Vec<ExactRational>>) -> Result<Self, RecursionError> {
        if rows.is_empty() {
            return Err(RecursionError::InvalidTable("no degrees".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            let d = i + 1;
            if row.len() != 2 * d + 1 {
                return Err(RecursionError::InvalidTable(format!(
                    "degree {d} row has {} entries, expected {}",
                    row.len(),
                    2 * d + 1
                )));
            }
        }
        Ok(CountTable { target: Target::P3, genus: 0, values: Values::Grid(rows) })
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn d_max(&self) -> usize {
        match &self.values {
            Values::Line(v) => v.len(),
            Values::Grid(rows) => rows.len(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            Values::Line(v) => v.len(),
            Values::Grid(rows) => rows.iter().map(Vec::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The P² sequence n_1, n_2, ...; `None` for P³ tables.
    pub fn sequence(&self) -> Option<&[ExactRational]> {
        match &self.values {
            Values::Line(v) => Some(v),
            Values::Grid(_) => None,
        }
    }

    /// n_{g,d} of a P² table.
    pub fn n(&self, d: usize) -> Option<&ExactRational> {
        match &self.values {
            Values::Line(v) if d >= 1 => v.get(d - 1),
            _ => None,
        }
    }

    /// The row n_{0,d}(0..=2d) of a P³ table.
    pub fn row(&self, d: usize) -> Option<&[ExactRational]> {
        match &self.values {
            Values::Grid(rows) if d >= 1 => rows.get(d - 1).map(Vec::as_slice),
            _ => None,
        }
    }

    /// n_{0,d}(p) of a P³ table.
    pub fn n_p(&self, d: usize, p: usize) -> Option<&ExactRational> {
        self.row(d).and_then(|r| r.get(p))
    }

    /// Every stored entry as (d, p, value); p is 0 throughout for P².
    pub fn entries(&self) -> Box<dyn Iterator<Item = (usize, usize, &ExactRational)> + '_> {
        match &self.values {
            Values::Line(v) => Box::new(v.iter().enumerate().map(|(i, x)| (i + 1, 0, x))),
            Values::Grid(rows) => Box::new(
                rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(p, x)| (i + 1, p, x))),
            ),
        }
    }

    /// Number of point conditions, i.e. the factorial that turns n into N.
    pub fn factorial_index(&self, d: usize, p: usize) -> usize {
        match self.target {
            Target::P2 => 3 * d - 1 + self.genus as usize,
            Target::P3 => 2 * d + p,
        }
    }

    /// Largest factorial index in the table.
    pub fn max_factorial_index(&self) -> usize {
        let d = self.d_max();
        match self.target {
            Target::P2 => self.factorial_index(d, 0),
            Target::P3 => self.factorial_index(d, 2 * d),
        }
    }

    /// N = n·(factorial index)!, or `None` when that is not an integer.
    pub fn count_with(&self, factorials: &Factorials, d: usize, p: usize) -> Option<Integer> {
        let value = match self.target {
            Target::P2 => self.n(d)?,
            Target::P3 => self.n_p(d, p)?,
        };
        let scaled = ExactRational::from(value * factorials.get(self.factorial_index(d, p)));
        if *scaled.denom() == 1 {
            Some(scaled.numer().clone())
        } else {
            None
        }
    }

    /// Entries whose rescaled count is not a nonnegative integer.
    pub fn integrality_failures(&self) -> Vec<(usize, usize)> {
        let f = Factorials::up_to(self.max_factorial_index());
        self.entries()
            .filter(|&(d, p, _)| !matches!(self.count_with(&f, d, p), Some(n) if n >= 0))
            .map(|(d, p, _)| (d, p))
            .collect()
    }

    /// The same table cut down to degrees 1..=d_max.
    pub fn truncated(&self, d_max: usize) -> Result<CountTable, RecursionError> {
        if d_max == 0 || d_max > self.d_max() {
            return Err(RecursionError::InvalidTable(format!(
                "cannot truncate a table with d_max {} to {d_max}",
                self.d_max()
            )));
        }
        let values = match &self.values {
            Values::Line(v) => Values::Line(v[..d_max].to_vec()),
            Values::Grid(rows) => Values::Grid(rows[..d_max].to_vec()),
        };
        Ok(CountTable { target: self.target, genus: self.genus, values })
    }

    /// Replaces one entry; the test suites use this to build corrupted tables.
    pub fn with_entry(&self, d: usize, p: usize, value: ExactRational) -> Result<CountTable, RecursionError> {
        let mut out = self.clone();
        let slot = match &mut out.values {
            Values::Line(v) if d >= 1 && p == 0 => v.get_mut(d - 1),
            Values::Grid(rows) if d >= 1 => rows.get_mut(d - 1).and_then(|r| r.get_mut(p)),
            _ => None,
        };
        match slot {
            Some(s) => {
                *s = value;
                Ok(out)
            }
            None => Err(RecursionError::InvalidTable(format!("no entry at (d={d}, p={p})"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::from((n, d))
    }

    #[test]
    fn p3_shape_is_checked() {
        assert!(CountTable::from_p3_rows(vec![vec![q(1, 2); 3]]).is_ok());
        assert!(CountTable::from_p3_rows(vec![vec![q(1, 2); 2]]).is_err());
    }

    #[test]
    fn counts_and_integrality() {
        let t = CountTable::from_p2_values(0, vec![q(1, 2), q(1, 120), q(1, 7)]).unwrap();
        let f = Factorials::up_to(t.max_factorial_index());
        assert_eq!(t.count_with(&f, 1, 0).unwrap(), 1);
        assert_eq!(t.count_with(&f, 2, 0).unwrap(), 1);
        // 8! is divisible by 7, so 1/7 still scales to an integer.
        assert_eq!(t.count_with(&f, 3, 0).unwrap(), 5760);
        let bad = t.with_entry(3, 0, q(1, 11)).unwrap();
        assert_eq!(bad.integrality_failures(), vec![(3, 0)]);
        let neg = t.with_entry(2, 0, q(-1, 120)).unwrap();
        assert_eq!(neg.integrality_failures(), vec![(2, 0)]);
    }

    #[test]
    fn entries_enumerate_grid_in_order() {
        let rows = vec![vec![q(1, 2), q(1, 6), q(1, 12)], vec![q(0, 1); 5]];
        let t = CountTable::from_p3_rows(rows).unwrap();
        let idx: Vec<(usize, usize)> = t.entries().map(|(d, p, _)| (d, p)).collect();
        assert_eq!(idx.len(), 8);
        assert_eq!(idx[2], (1, 2));
        assert_eq!(idx[3], (2, 0));
        assert_eq!(t.factorial_index(2, 4), 8);
        assert_eq!(t.truncated(1).unwrap().len(), 3);
        assert!(t.truncated(3).is_err());
    }
}
