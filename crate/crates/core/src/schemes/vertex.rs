use std::cmp::Ordering;
use std::fmt::Write;

use crate::algebra::MatrixFq;
use crate::error::{Error, Result};

/// A k-subset of the ground set, stored as a bitmask over bit positions
/// `0..n`. Labels and element lists are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetVertex {
    mask: u128,
    n: u8,
    k: u8,
}

impl SetVertex {
    pub fn new(mask: u128, n: usize) -> Result<Self> {
        if n > 128 || (n < 128 && mask >> n != 0) {
            return Err(Error::InvalidInput(format!("mask {mask:#x} does not fit in {n} bits")));
        }
        Ok(SetVertex { mask, n: n as u8, k: mask.count_ones() as u8 })
    }

    /// From 1-based elements of `{1, …, n}`.
    pub fn from_elements(elements: &[usize], n: usize) -> Result<Self> {
        let mut mask = 0u128;
        for &e in elements {
            if e == 0 || e > n || e > 128 {
                return Err(Error::InvalidInput(format!("element {e} not in {{1,...,{n}}}")));
            }
            mask |= 1 << (e - 1);
        }
        if mask.count_ones() as usize != elements.len() {
            return Err(Error::InvalidInput("repeated element".into()));
        }
        Self::new(mask, n)
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// 1-based elements in increasing order.
    pub fn elements(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.mask >> i & 1 == 1).map(|i| i + 1).collect()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.elements().iter().map(usize::to_string).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// A k-subspace of F_q^n, represented by its RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubspaceVertex {
    pivot_mask: u128,
    basis: MatrixFq,
}

impl SubspaceVertex {
    pub fn from_rref(basis: MatrixFq) -> Result<Self> {
        if !basis.is_rref() {
            return Err(Error::InvalidInput(format!("{basis:?} is not in reduced row echelon form")));
        }
        if basis.cols() > 128 {
            return Err(Error::InvalidInput("ambient dimension above 128".into()));
        }
        let pivot_mask = basis.pivots().iter().fold(0u128, |m, &c| m | 1 << c);
        Ok(SubspaceVertex { pivot_mask, basis })
    }

    /// The row space of `m`.
    pub fn span(m: &MatrixFq) -> Result<Self> {
        Self::from_rref(m.rref())
    }

    pub fn basis(&self) -> &MatrixFq {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn q(&self) -> u32 {
        self.basis.order()
    }

    pub fn pivot_mask(&self) -> u128 {
        self.pivot_mask
    }

    /// Rows of the RREF basis, one hex digit per coordinate: `<1000,0110>`.
    pub fn label(&self) -> String {
        let mut s = String::from("<");
        for r in 0..self.basis.rows() {
            if r > 0 {
                s.push(',');
            }
            for &x in self.basis.row(r) {
                write!(s, "{x:x}").expect("write to String");
            }
        }
        s.push('>');
        s
    }
}

impl Ord for SubspaceVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.pivot_mask
            .cmp(&other.pivot_mask)
            .then_with(|| self.basis.raw().cmp(other.basis.raw()))
            .then_with(|| self.basis.cols().cmp(&other.basis.cols()))
            .then_with(|| self.basis.order().cmp(&other.basis.order()))
    }
}

impl PartialOrd for SubspaceVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldTable;

    #[test]
    fn set_labels_are_one_based() {
        let v = SetVertex::from_elements(&[4, 1, 2, 3], 8).unwrap();
        assert_eq!(v.label(), "{1,2,3,4}");
        assert_eq!(v.mask(), 0b1111);
        assert!(SetVertex::from_elements(&[0, 1], 8).is_err());
        assert!(SetVertex::from_elements(&[9], 8).is_err());
        assert!(SetVertex::from_elements(&[2, 2], 8).is_err());
    }

    #[test]
    fn subspace_from_any_spanning_set() {
        let f2 = FieldTable::get(2).unwrap();
        let m = MatrixFq::from_rows(f2, 3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let s = SubspaceVertex::span(&m).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.label(), "<101,011>");
        assert!(SubspaceVertex::from_rref(m).is_err());
    }
}
