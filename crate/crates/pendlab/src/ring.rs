//! Coefficient rings for truncated power series.
//!
//! Every series algorithm in this crate is written once, generically over a
//! [`CoeffRing`]. Three rings are provided:
//!
//! - [`Exact`]: arbitrary-precision integers, for identities that must hold
//!   over ℤ.
//! - [`Parity`]: GF(2), for large mod-2 coefficient scans.
//! - [`Residue`]: ℤ/mℤ with a runtime word-sized modulus, for fast
//!   cross-checks modulo one or more primes.
//!
//! A ring value is a *context*: element semantics may depend on runtime state
//! (the modulus of [`Residue`]), so operations take the ring by reference
//! rather than living on the element type.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A commutative ring with identifiable units, used as the coefficient domain
/// of a [`Series`](crate::series::Series).
pub trait CoeffRing: Clone + PartialEq + fmt::Debug + Send + Sync {
    /// Element representation.
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    /// Human-readable backend name, e.g. `residue(3)`. Used in error messages
    /// and cache headers.
    fn name(&self) -> String;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;

    /// Canonical image of a machine integer in the ring. Takes `&self`
    /// because the receiver is the ring descriptor (it may carry a runtime
    /// modulus), not the value being built.
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse, or `None` if `a` is not a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    fn sub_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.sub(a, b);
    }
}

/// Exact integer coefficients (arbitrary precision).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Exact;

impl CoeffRing for Exact {
    type Elem = BigInt;

    fn name(&self) -> String {
        "exact".to_owned()
    }

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        // Units of ℤ are ±1.
        if a.abs().is_one() {
            Some(a.clone())
        } else {
            None
        }
    }

    fn add_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a += b;
    }

    fn sub_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a -= b;
    }
}

/// GF(2) coefficients: `true` = 1, `false` = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Parity;

impl CoeffRing for Parity {
    type Elem = bool;

    fn name(&self) -> String {
        "parity".to_owned()
    }

    fn zero(&self) -> bool {
        false
    }

    fn one(&self) -> bool {
        true
    }

    fn from_i64(&self, v: i64) -> bool {
        v & 1 == 1
    }

    fn is_zero(&self, a: &bool) -> bool {
        !a
    }

    fn neg(&self, a: &bool) -> bool {
        *a
    }

    fn add(&self, a: &bool, b: &bool) -> bool {
        a ^ b
    }

    fn sub(&self, a: &bool, b: &bool) -> bool {
        a ^ b
    }

    fn mul(&self, a: &bool, b: &bool) -> bool {
        a & b
    }

    fn inv(&self, a: &bool) -> Option<bool> {
        if *a {
            Some(true)
        } else {
            None
        }
    }

    fn add_assign(&self, a: &mut bool, b: &bool) {
        *a ^= b;
    }

    fn sub_assign(&self, a: &mut bool, b: &bool) {
        *a ^= b;
    }
}

/// ℤ/mℤ with a runtime modulus m ≥ 2. Elements are canonical representatives
/// in `[0, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Residue {
    modulus: u64,
}

impl Residue {
    /// Modulus must be at least 2.
    pub fn new(modulus: u64) -> Option<Self> {
        if modulus >= 2 {
            Some(Residue { modulus })
        } else {
            None
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl CoeffRing for Residue {
    type Elem = u64;

    fn name(&self) -> String {
        format!("residue({})", self.modulus)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.modulus
    }

    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.modulus as i128) as u64
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.modulus as u128) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        let (g, x) = egcd(*a as i128, self.modulus as i128);
        if g == 1 {
            Some(x.rem_euclid(self.modulus as i128) as u64)
        } else {
            None
        }
    }
}

/// Extended Euclid: returns (gcd(a, m), x) with a·x ≡ gcd (mod m).
fn egcd(a: i128, m: i128) -> (i128, i128) {
    let (mut r0, mut r1) = (a, m);
    let (mut x0, mut x1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
    }
    (r0, x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_units_are_plus_minus_one() {
        let r = Exact;
        assert_eq!(r.inv(&BigInt::from(1)), Some(BigInt::from(1)));
        assert_eq!(r.inv(&BigInt::from(-1)), Some(BigInt::from(-1)));
        assert_eq!(r.inv(&BigInt::from(2)), None);
        assert_eq!(r.inv(&BigInt::from(0)), None);
    }

    #[test]
    fn parity_arithmetic_is_mod_two() {
        let r = Parity;
        assert!(!r.add(&true, &true));
        assert!(r.sub(&false, &true));
        assert!(r.mul(&true, &true));
        assert!(r.from_i64(-3));
        assert!(!r.from_i64(-4));
        assert_eq!(r.inv(&false), None);
    }

    #[test]
    fn residue_canonicalizes_negatives() {
        let r = Residue::new(7).unwrap();
        assert_eq!(r.from_i64(-1), 6);
        assert_eq!(r.from_i64(-15), 6);
        assert_eq!(r.sub(&2, &5), 4);
        assert_eq!(r.neg(&0), 0);
    }

    #[test]
    fn residue_inverse_requires_coprimality() {
        let r = Residue::new(12).unwrap();
        assert_eq!(r.inv(&5), Some(5)); // 5·5 = 25 ≡ 1
        assert_eq!(r.inv(&4), None);
        let p = Residue::new(1_000_000_007).unwrap();
        let x = 123_456_789u64;
        let ix = p.inv(&x).unwrap();
        assert_eq!(p.mul(&x, &ix), 1);
    }

    #[test]
    fn residue_rejects_moduli_below_two() {
        assert!(Residue::new(0).is_none());
        assert!(Residue::new(1).is_none());
        assert!(Residue::new(2).is_some());
    }

    #[test]
    fn large_modulus_arithmetic_avoids_overflow() {
        // A 60-bit modulus: sums and products must route through u128.
        let m = (1u64 << 60) - 93; // arbitrary odd value near 2^60
        let r = Residue::new(m).unwrap();
        let a = m - 1;
        let b = m - 2;
        assert_eq!(r.add(&a, &b), m - 3);
        assert_eq!(r.mul(&a, &a), 1); // (m−1)² ≡ 1
    }
}
