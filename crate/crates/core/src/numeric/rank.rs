use super::Rational;

/// Incrementally maintained row space over the rationals.
///
/// Each stored row carries a pivot column holding `1`; every row inserted
/// later is zero in all earlier pivot columns, so reducing a vector against
/// the rows in insertion order is a complete membership test.
#[derive(Debug, Clone)]
pub struct RowSpace {
    width: usize,
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowSpace {
    pub fn new(width: usize) -> Self {
        RowSpace {
            width,
            rows: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    fn reduce(&self, row: &[Rational]) -> Vec<Rational> {
        let mut v = row.to_vec();
        for (pivot, basis) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].clone();
            for (j, b) in basis.iter().enumerate() {
                if !b.is_zero() {
                    v[j] -= &factor * b;
                }
            }
        }
        v
    }

    /// `true` if `row` lies in the span of the rows inserted so far.
    pub fn contains(&self, row: &[Rational]) -> bool {
        assert_eq!(row.len(), self.width, "row width mismatch");
        self.reduce(row).iter().all(Rational::is_zero)
    }

    /// Inserts `row`; returns `true` if it increased the rank.
    pub fn insert(&mut self, row: &[Rational]) -> bool {
        assert_eq!(row.len(), self.width, "row width mismatch");
        let mut v = self.reduce(row);
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("row {row} has length {len}, expected {expected}")]
pub struct ShapeError {
    pub row: usize,
    pub len: usize,
    pub expected: usize,
}

/// Exact rank of a list of equal-length rows.
pub fn rank_of_rows(rows: &[Vec<Rational>]) -> Result<usize, ShapeError> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let width = first.len();
    if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(ShapeError {
            row,
            len: r.len(),
            expected: width,
        });
    }
    let mut space = RowSpace::new(width);
    for r in rows {
        space.insert(r);
        if space.is_full() {
            break;
        }
    }
    Ok(space.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    fn rows(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter()
            .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
            .collect()
    }

    #[test]
    fn identity_has_full_rank() {
        assert_eq!(rank_of_rows(&rows(&[&[1, 0], &[0, 1]])).unwrap(), 2);
    }

    #[test]
    fn scalar_multiples_collapse() {
        assert_eq!(rank_of_rows(&rows(&[&[1, 1], &[2, 2]])).unwrap(), 1);
    }

    #[test]
    fn empty_and_zero_rows() {
        assert_eq!(rank_of_rows(&[]).unwrap(), 0);
        assert_eq!(rank_of_rows(&rows(&[&[0, 0, 0]])).unwrap(), 0);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let err = rank_of_rows(&rows(&[&[1, 0], &[1]])).unwrap_err();
        assert_eq!(err.row, 1);
    }

    #[test]
    fn fractional_dependencies() {
        let r = vec![
            vec![q(1, 2), q(1, 3), q(0, 1)],
            vec![q(3, 2), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(5, 7)],
        ];
        assert_eq!(rank_of_rows(&r).unwrap(), 2);
        let mut space = RowSpace::new(3);
        space.insert(&r[0]);
        assert!(space.contains(&r[1]));
        assert!(!space.contains(&r[2]));
    }
}
