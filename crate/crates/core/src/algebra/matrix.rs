use std::fmt;

use super::field::{FieldElem, FieldTable};
use crate::error::{Error, Result};

/// Dense matrix over F_q, row-major, entries stored as raw field values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixFq {
    q: u32,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixFq[F_{}; {}x{}](", self.q, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            for &x in self.row(r) {
                write!(f, "{x:x}")?;
            }
        }
        write!(f, ")")
    }
}

impl MatrixFq {
    pub fn zeros(field: &FieldTable, rows: usize, cols: usize) -> Self {
        MatrixFq { q: field.order(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &FieldTable, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from explicit rows; every entry must lie in `[0, q)`.
    pub fn from_rows(field: &FieldTable, cols: usize, rows: &[Vec<u8>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| u32::from(x) >= field.order()) {
                return Err(Error::InvalidInput(format!(
                    "entry {bad} in row {r} is not in F_{}",
                    field.order()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(MatrixFq { q: field.order(), rows: rows.len(), cols, data })
    }

    pub fn field(&self) -> &'static FieldTable {
        FieldTable::get(self.q).expect("matrix built from a supported field")
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn raw(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.field()
            .elem(self.data[r * self.cols + c])
            .expect("entries are field elements")
    }

    /// Vertical concatenation; both matrices must share the field and column count.
    pub fn stack(&self, other: &MatrixFq) -> Result<MatrixFq> {
        if self.q != other.q || self.cols != other.cols {
            return Err(Error::InvalidInput(format!(
                "cannot stack F_{} {}-column matrix on F_{} {}-column matrix",
                self.q, self.cols, other.q, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatrixFq { q: self.q, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Reduced row echelon form with zero rows dropped.
    pub fn rref(&self) -> MatrixFq {
        let mut data = self.data.clone();
        let rank = eliminate(self.field(), &mut data, self.rows, self.cols, true);
        data.truncate(rank * self.cols);
        MatrixFq { q: self.q, rows: rank, cols: self.cols, data }
    }

    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        eliminate(self.field(), &mut data, self.rows, self.cols, false)
    }

    /// Pivot column of each row, assuming `self` is in row echelon form.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.rows)
            .filter_map(|r| self.row(r).iter().position(|&x| x != 0))
            .collect()
    }

    pub fn is_rref(&self) -> bool {
        let pivots = self.pivots();
        if pivots.len() != self.rows || pivots.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        pivots.iter().enumerate().all(|(r, &c)| {
            self.data[r * self.cols + c] == 1
                && (0..self.rows).all(|o| o == r || self.data[o * self.cols + c] == 0)
        })
    }
}

/// In-place Gaussian elimination over `field`; returns the rank.
///
/// With `reduce` set, entries above pivots are cleared and pivots scaled to 1,
/// so the first `rank` rows hold the RREF.
pub(crate) fn eliminate(
    field: &FieldTable,
    data: &mut [u8],
    rows: usize,
    cols: usize,
    reduce: bool,
) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| data[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for c in 0..cols {
                data.swap(pivot * cols + c, rank * cols + c);
            }
        }
        let inv = field.inv(data[rank * cols + col]).expect("nonzero pivot");
        if inv != 1 {
            for c in col..cols {
                data[rank * cols + c] = field.mul(data[rank * cols + c], inv);
            }
        }
        let start = if reduce { 0 } else { rank + 1 };
        for r in start..rows {
            if r == rank {
                continue;
            }
            let factor = data[r * cols + col];
            if factor == 0 {
                continue;
            }
            for c in col..cols {
                let sub = field.mul(factor, data[rank * cols + c]);
                data[r * cols + c] = field.sub(data[r * cols + c], sub);
            }
        }
        rank += 1;
    }
    rank
}

/// `dim(U ∩ V) = dim U + dim V − dim(U + V)` for the row spaces of `u` and `v`.
pub fn intersection_dim(u: &MatrixFq, v: &MatrixFq) -> Result<usize> {
    if u.q != v.q || u.cols != v.cols {
        return Err(Error::InvalidInput(format!(
            "ambient mismatch: F_{}^{} vs F_{}^{}",
            u.q, u.cols, v.q, v.cols
        )));
    }
    let mut data = Vec::with_capacity(u.data.len() + v.data.len());
    data.extend_from_slice(&u.data);
    data.extend_from_slice(&v.data);
    let sum = eliminate(u.field(), &mut data, u.rows + v.rows, u.cols, false);
    Ok(u.rank() + v.rank() - sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> &'static FieldTable {
        FieldTable::get(2).unwrap()
    }

    #[test]
    fn identity_is_its_own_rref() {
        let id = MatrixFq::identity(f2(), 4);
        assert_eq!(id.rref(), id);
        assert_eq!(id.rank(), 4);
    }

    #[test]
    fn hand_reduced_example() {
        let m = MatrixFq::from_rows(f2(), 3, &[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let expected = MatrixFq::from_rows(f2(), 3, &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.rref(), expected);
    }

    #[test]
    fn zero_matrix_reduces_to_no_rows() {
        let z = MatrixFq::zeros(f2(), 3, 5);
        let r = z.rref();
        assert_eq!(r.rows(), 0);
        assert_eq!(r.cols(), 5);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn equal_rows_have_rank_one() {
        let f3 = FieldTable::get(3).unwrap();
        let m = MatrixFq::from_rows(f3, 3, &[vec![1, 2, 0], vec![1, 2, 0]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn intersection_of_distinct_points() {
        let a = MatrixFq::from_rows(f2(), 2, &[vec![1, 0]]).unwrap();
        let b = MatrixFq::from_rows(f2(), 2, &[vec![1, 1]]).unwrap();
        assert_eq!(intersection_dim(&a, &b).unwrap(), 0);
        assert_eq!(intersection_dim(&a, &a).unwrap(), 1);
    }

    #[test]
    fn mismatched_ambient_is_rejected() {
        let a = MatrixFq::from_rows(f2(), 2, &[vec![1, 0]]).unwrap();
        let b = MatrixFq::from_rows(f2(), 3, &[vec![1, 1, 0]]).unwrap();
        assert!(intersection_dim(&a, &b).is_err());
        let c = MatrixFq::from_rows(FieldTable::get(3).unwrap(), 2, &[vec![1, 0]]).unwrap();
        assert!(intersection_dim(&a, &c).is_err());
    }

    #[test]
    fn from_rows_rejects_out_of_field_entries() {
        assert!(MatrixFq::from_rows(f2(), 2, &[vec![2, 0]]).is_err());
        assert!(MatrixFq::from_rows(f2(), 2, &[vec![1]]).is_err());
    }
}
