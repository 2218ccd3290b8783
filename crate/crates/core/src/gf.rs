//! Arithmetic in the binary extension fields GF(2^m).
//!
//! Subpackets are elements of GF(q) with q = 2^m. An element is stored
//! as the bitmask of its coordinates in the polynomial basis
//! {1, x, ..., x^(m-1)}: bit `i` of the value is the coefficient of
//! x^i. Addition is bitwise XOR; multiplication is a carry-less
//! polynomial product reduced modulo an irreducible polynomial of
//! degree m.
//!
//! Repair of the XOR storage code only ever adds elements, but the
//! reconstruction rule allows arbitrary nonzero coefficients, so the
//! full field is implemented. Fields up to m = 16 are supported;
//! irreducibility of the reduction polynomial is verified at
//! construction by exhaustive trial division.

use crate::{Error, Result};

/// Largest supported extension degree.
pub const MAX_M: u32 = 16;

/// An element of GF(2^m), valid only together with the [`FieldParams`]
/// it was created from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    /// The additive identity of every GF(2^m).
    pub const ZERO: FieldElement = FieldElement(0);
    /// The multiplicative identity of every GF(2^m).
    pub const ONE: FieldElement = FieldElement(1);

    /// Bitmask of polynomial-basis coordinates.
    pub fn value(self) -> u32 {
        self.0
    }

    /// Constructs an element without a range check. Callers must
    /// guarantee `value < q` for the field it will be used with.
    pub(crate) fn from_raw(value: u32) -> FieldElement {
        FieldElement(value)
    }
}

/// Defining data of one field GF(2^m): the degree m, the size q = 2^m,
/// and the monic degree-m irreducible reduction polynomial (stored as
/// a bitmask with bit m set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldParams {
    m: u32,
    q: u32,
    poly: u32,
}

impl FieldParams {
    /// Builds GF(2^m) with an explicit reduction polynomial.
    ///
    /// The polynomial must have degree exactly m and be irreducible
    /// over GF(2); both are checked.
    pub fn new(m: u32, poly: u32) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidFieldParams(format!(
                "degree m={m} outside supported range 1..={MAX_M}"
            )));
        }
        if poly >> m != 1 {
            return Err(Error::InvalidFieldParams(format!(
                "polynomial {poly:#b} does not have degree exactly {m}"
            )));
        }
        if !is_irreducible(poly, m) {
            return Err(Error::InvalidFieldParams(format!(
                "polynomial {poly:#b} is reducible over GF(2)"
            )));
        }
        Ok(FieldParams {
            m,
            q: 1 << m,
            poly,
        })
    }

    /// Builds GF(2^m) with the lexicographically smallest irreducible
    /// polynomial of degree m. The choice of polynomial only fixes the
    /// element representation; error rates do not depend on it.
    pub fn with_default_poly(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidFieldParams(format!(
                "degree m={m} outside supported range 1..={MAX_M}"
            )));
        }
        let start = 1u32 << m;
        let poly = (start..2 * start)
            .find(|&p| is_irreducible(p, m))
            .expect("every degree has an irreducible polynomial");
        FieldParams::new(m, poly)
    }

    /// Builds the field of a given size q = 2^m.
    pub fn for_size(q: u32) -> Result<Self> {
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::InvalidFieldParams(format!(
                "field size q={q} is not a power of two >= 2"
            )));
        }
        FieldParams::with_default_poly(q.trailing_zeros())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Wraps a value as an element of this field.
    pub fn element(&self, value: u32) -> Result<FieldElement> {
        self.check(FieldElement(value))?;
        Ok(FieldElement(value))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// All q elements in value order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.0 < self.q {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                value: a.0,
                q: self.q,
            })
        }
    }

    /// Field addition: bitwise XOR of the coordinate masks.
    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement(a.0 ^ b.0))
    }

    /// Field multiplication: shift-and-reduce carry-less product
    /// modulo the reduction polynomial.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        let mask = self.q - 1;
        let high = 1u32 << (self.m - 1);
        let low_poly = self.poly & mask;
        let mut acc = 0u32;
        let mut a = a.0;
        let mut b = b.0;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            let carry = a & high != 0;
            a = (a << 1) & mask;
            if carry {
                a ^= low_poly;
            }
        }
        Ok(FieldElement(acc))
    }

    /// Decodes a little-endian bit string of length m: `bits[i]` is the
    /// coefficient of x^i.
    pub fn from_bits(&self, bits: &[bool]) -> Result<FieldElement> {
        if bits.len() != self.m as usize {
            return Err(Error::BitLength {
                expected: self.m as usize,
                got: bits.len(),
            });
        }
        let value = bits
            .iter()
            .enumerate()
            .fold(0u32, |v, (i, &bit)| v | (u32::from(bit) << i));
        Ok(FieldElement(value))
    }

    /// Encodes an element as its little-endian bit string of length m.
    pub fn to_bits(&self, a: FieldElement) -> Result<Vec<bool>> {
        self.check(a)?;
        Ok((0..self.m).map(|i| (a.0 >> i) & 1 == 1).collect())
    }
}

fn degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

/// Remainder of `a` under GF(2) polynomial division by `d`.
fn poly_rem(mut a: u32, d: u32) -> u32 {
    let dd = degree(d);
    while a != 0 && degree(a) >= dd {
        a ^= d << (degree(a) - dd);
    }
    a
}

/// Exhaustive trial division by every polynomial of degree 1..=m/2.
/// A reducible polynomial of degree m has a factor in that range.
fn is_irreducible(poly: u32, m: u32) -> bool {
    if m == 1 {
        return true;
    }
    if poly & 1 == 0 {
        return false; // divisible by x
    }
    for d in 1..=m / 2 {
        for div in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(poly, div) == 0 {
                return false;
            }
        }
    }
    true
}
