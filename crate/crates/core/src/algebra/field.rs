//! Lookup-table arithmetic for the finite fields F_q with q ≤ 16.
//!
//! Elements of F_{p^d} are stored as integers `c_0 + c_1 p + … + c_{d-1} p^{d-1}`
//! whose base-p digits are the coefficients of a polynomial reduced modulo a
//! fixed irreducible polynomial. Every table is checked against the field
//! axioms exhaustively before it is handed out.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const SUPPORTED_ORDERS: [u32; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

/// (q, p, d, irreducible polynomial coefficients low→high, monic, length d+1)
const FIELD_DEFS: [(u32, u32, usize, &[u32]); 10] = [
    (2, 2, 1, &[0, 1]),
    (3, 3, 1, &[0, 1]),
    (4, 2, 2, &[1, 1, 1]),       // x^2 + x + 1
    (5, 5, 1, &[0, 1]),
    (7, 7, 1, &[0, 1]),
    (8, 2, 3, &[1, 1, 0, 1]),    // x^3 + x + 1
    (9, 3, 2, &[1, 0, 1]),       // x^2 + 1
    (11, 11, 1, &[0, 1]),
    (13, 13, 1, &[0, 1]),
    (16, 2, 4, &[1, 1, 0, 0, 1]), // x^4 + x + 1
];

#[derive(Clone)]
pub struct FieldTable {
    q: u32,
    p: u32,
    degree: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for FieldTable {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for FieldTable {}

static TABLES: [OnceLock<FieldTable>; 17] = [const { OnceLock::new() }; 17];

impl FieldTable {
    /// Shared, validated table for F_q.
    pub fn get(q: u32) -> Result<&'static FieldTable> {
        let def = FIELD_DEFS
            .iter()
            .find(|d| d.0 == q)
            .ok_or(Error::UnsupportedField(q))?;
        let slot = &TABLES[q as usize];
        if let Some(t) = slot.get() {
            return Ok(t);
        }
        let table = Self::build(def.0, def.1, def.2, def.3)?;
        Ok(slot.get_or_init(|| table))
    }

    fn build(q: u32, p: u32, degree: usize, modulus: &[u32]) -> Result<FieldTable> {
        let qs = q as usize;
        let digits = |mut x: u32| {
            let mut v = vec![0u32; degree];
            for d in v.iter_mut() {
                *d = x % p;
                x /= p;
            }
            v
        };
        let pack = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &d| acc * p + d);

        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = pack(&sum) as u8;

                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * degree - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for top in (degree..prod.len()).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    for (i, m) in modulus.iter().enumerate().take(degree) {
                        let idx = top - degree + i;
                        prod[idx] = (prod[idx] + (p - c) * m) % p;
                    }
                    prod[top] = 0;
                }
                mul[(a * q + b) as usize] = pack(&prod[..degree]) as u8;
            }
        }

        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap_or(0) as u8;
            if a != 0 {
                inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap_or(0) as u8;
            }
        }

        let table = FieldTable { q, p, degree, add, mul, neg, inv };
        table.check_axioms()?;
        Ok(table)
    }

    /// Exhaustive check of the field axioms.
    pub fn check_axioms(&self) -> Result<()> {
        let q = self.q as u8;
        let fail = |axiom| Err(Error::FieldAxiom { q: self.q, axiom });
        for a in 0..q {
            if self.add(a, 0) != a {
                return fail("additive identity");
            }
            if self.mul(a, 1) != a {
                return fail("multiplicative identity");
            }
            if self.add(a, self.neg(a)) != 0 {
                return fail("additive inverse");
            }
            if a != 0 && self.mul(a, self.inv[a as usize]) != 1 {
                return fail("multiplicative inverse");
            }
            for b in 0..q {
                if self.add(a, b) != self.add(b, a) {
                    return fail("additive commutativity");
                }
                if self.mul(a, b) != self.mul(b, a) {
                    return fail("multiplicative commutativity");
                }
                if a != 0 && b != 0 && self.mul(a, b) == 0 {
                    return fail("no zero divisors");
                }
                for c in 0..q {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return fail("additive associativity");
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return fail("multiplicative associativity");
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return fail("distributivity");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn elem(&'static self, value: u8) -> Result<FieldElem> {
        if u32::from(value) >= self.q {
            return Err(Error::InvalidInput(format!(
                "{value} is not an element of F_{}",
                self.q
            )));
        }
        Ok(FieldElem { value, field: self })
    }
}

/// An element of F_q bound to its table.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct FieldElem {
    value: u8,
    field: &'static FieldTable,
}

impl FieldElem {
    pub fn value(self) -> u8 {
        self.value
    }

    pub fn field(self) -> &'static FieldTable {
        self.field
    }

    pub fn inverse(self) -> Option<FieldElem> {
        self.field.inv(self.value).map(|value| FieldElem { value, ..self })
    }

    fn same_field(self, other: FieldElem) {
        assert_eq!(self.field.q, other.field.q, "mixed-field arithmetic");
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}∈F_{}", self.value, self.field.q)
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        self.same_field(rhs);
        FieldElem { value: self.field.add(self.value, rhs.value), ..self }
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        self.same_field(rhs);
        FieldElem { value: self.field.sub(self.value, rhs.value), ..self }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        self.same_field(rhs);
        FieldElem { value: self.field.mul(self.value, rhs.value), ..self }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { value: self.field.neg(self.value), ..self }
    }
}

impl Div for FieldElem {
    type Output = FieldElem;
    /// Panics on division by zero.
    fn div(self, rhs: FieldElem) -> FieldElem {
        self.same_field(rhs);
        let inv = rhs.inverse().expect("division by zero in F_q");
        self * inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_supported_table_is_a_field() {
        for q in SUPPORTED_ORDERS {
            let f = FieldTable::get(q).unwrap();
            assert_eq!(f.order(), q);
            assert_eq!(f.characteristic().pow(f.degree() as u32), q);
            f.check_axioms().unwrap();
        }
    }

    #[test]
    fn unsupported_orders_are_rejected() {
        for q in [0, 1, 6, 10, 12, 17, 25] {
            assert_eq!(FieldTable::get(q).unwrap_err(), Error::UnsupportedField(q));
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_order_q_minus_one() {
        for q in SUPPORTED_ORDERS {
            let f = FieldTable::get(q).unwrap();
            let has_generator = (1..q as u8).any(|g| {
                let mut x = 1u8;
                let mut order = 0;
                loop {
                    x = f.mul(x, g);
                    order += 1;
                    if x == 1 {
                        break;
                    }
                }
                order == q - 1
            });
            assert!(has_generator, "F_{q}");
        }
    }

    #[test]
    fn elem_ops() {
        let f = FieldTable::get(4).unwrap();
        let a = f.elem(2).unwrap();
        let b = f.elem(3).unwrap();
        assert_eq!((a * b).value(), 1);
        assert_eq!((a + b).value(), 1);
        assert_eq!((a / a).value(), 1);
        assert_eq!((-a + a).value(), 0);
        assert!(f.elem(4).is_err());
    }
}
