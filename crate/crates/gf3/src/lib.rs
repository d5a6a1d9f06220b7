//! Exact linear algebra over the prime field of order 3.
//!
//! Everything downstream (Steenrod modules, resolutions, spectral sequence
//! pages) reduces to row operations on matrices over F3, so this crate keeps
//! two representations: the coordinate-list [`SparseMatrixF3`] used at API
//! boundaries and in debug dumps, and the bit-plane packed [`Mat`] used for
//! actual elimination work. Conversion is cheap and lossless.
//!
//! All operations are pure functions on immutable inputs; nothing here holds
//! interior mutability, so values can be shared freely across threads.

mod mat;
mod packed;
mod sparse;

pub use mat::{Mat, RowSolver, RrefResult};
pub use packed::PackedVec;
pub use sparse::{kernel_basis, rref, rref_matrix, solve_preimage, SparseMatrixF3};

/// An element of the field with three elements, stored as a residue in {0,1,2}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct F3(u8);

pub const ZERO: F3 = F3(0);
pub const ONE: F3 = F3(1);
pub const TWO: F3 = F3(2);

impl F3 {
    #[inline]
    pub fn new(v: i64) -> F3 {
        F3(v.rem_euclid(3) as u8)
    }

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; 1 and 2 are self-inverse.
    #[inline]
    pub fn inverse(self) -> Option<F3> {
        match self.0 {
            0 => None,
            v => Some(F3(v)),
        }
    }
}

impl std::ops::Add for F3 {
    type Output = F3;
    #[inline]
    fn add(self, rhs: F3) -> F3 {
        F3((self.0 + rhs.0) % 3)
    }
}

impl std::ops::AddAssign for F3 {
    #[inline]
    fn add_assign(&mut self, rhs: F3) {
        *self = *self + rhs;
    }
}

impl std::ops::Sub for F3 {
    type Output = F3;
    #[inline]
    fn sub(self, rhs: F3) -> F3 {
        F3((3 + self.0 - rhs.0) % 3)
    }
}

impl std::ops::Neg for F3 {
    type Output = F3;
    #[inline]
    fn neg(self) -> F3 {
        F3((3 - self.0) % 3)
    }
}

impl std::ops::Mul for F3 {
    type Output = F3;
    #[inline]
    fn mul(self, rhs: F3) -> F3 {
        F3((self.0 * rhs.0) % 3)
    }
}

impl std::fmt::Debug for F3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for F3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_tables() {
        for a in 0..3i64 {
            for b in 0..3i64 {
                assert_eq!(F3::new(a) + F3::new(b), F3::new(a + b));
                assert_eq!(F3::new(a) * F3::new(b), F3::new(a * b));
                assert_eq!(F3::new(a) - F3::new(b), F3::new(a - b));
            }
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(F3::new(1).inverse(), Some(ONE));
        assert_eq!(F3::new(2).inverse(), Some(TWO));
        assert_eq!(F3::new(0).inverse(), None);
        for v in 1..3i64 {
            let x = F3::new(v);
            assert_eq!(x * x.inverse().unwrap(), ONE);
        }
    }
}
