//! Elements of `Z_p` known modulo `p^M`.
//!
//! Precision is absolute: a [`PadicScalar`] with precision `M` carries a
//! residue in `[0, p^M)` and nothing more. Zero comes in two flavours, an
//! exact zero and a residue that merely vanishes at the working precision.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest modulus `p^M` we accept; keeps `a + b` inside a `u64` and `a * b`
/// inside a `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// `p^e`, or `None` when it would exceed [`MAX_MODULUS`].
pub fn checked_pow(p: u32, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p as u64)?;
        if acc > MAX_MODULUS {
            return None;
        }
    }
    Some(acc)
}

/// Trial-division primality test, adequate for the small primes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Validates an odd prime and precision, returning `p^prec`.
pub(crate) fn modulus_for(p: u32, prec: u32) -> Result<u64> {
    if p == 2 || !is_prime(p as u64) {
        return Err(Error::InvalidPrime(p));
    }
    if prec == 0 {
        return Err(Error::PrecisionTooLarge { p, prec });
    }
    checked_pow(p, prec).ok_or(Error::PrecisionTooLarge { p, prec })
}

/// Exponent of `p` in a nonzero integer.
pub fn vp_int(p: u32, n: i128) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Exponent of `p` in a residue, capped at `prec` (the residue is reduced
/// modulo `p^prec`).
pub fn vp_residue(p: u32, prec: u32, residue: u64) -> u32 {
    if residue == 0 {
        return prec;
    }
    let mut r = residue;
    let mut v = 0;
    while r % p as u64 == 0 {
        r /= p as u64;
        v += 1;
    }
    v.min(prec)
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Inverse of a unit modulo `m` by the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(reduce_i128(s0, m))
}

/// `p`-adic valuation of a [`PadicScalar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    /// Residue is zero but the value is only known modulo `p^M`.
    AtLeast(u32),
    ExactZero,
}

impl Valuation {
    /// The valuation as a number, reading `AtLeast(M)` as `M`.
    pub fn floor(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::ExactZero => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    prime: u32,
    precision: u32,
    residue: u64,
    exact_zero: bool,
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            write!(f, "0 (exact, Z_{})", self.prime)
        } else {
            write!(f, "{} + O({}^{})", self.residue, self.prime, self.precision)
        }
    }
}

impl PadicScalar {
    fn check_context(p: u32, prec: u32) -> Result<u64> {
        modulus_for(p, prec)
    }

    /// Residue class of `n` modulo `p^prec`.
    pub fn from_int(n: i128, p: u32, prec: u32) -> Result<Self> {
        let m = Self::check_context(p, prec)?;
        Ok(Self { prime: p, precision: prec, residue: reduce_i128(n, m), exact_zero: false })
    }

    /// Trusted constructor for residues already in range.
    pub(crate) fn from_residue_unchecked(p: u32, prec: u32, residue: u64) -> Self {
        Self { prime: p, precision: prec, residue, exact_zero: false }
    }

    pub fn exact_zero(p: u32, prec: u32) -> Result<Self> {
        Self::check_context(p, prec)?;
        Ok(Self { prime: p, precision: prec, residue: 0, exact_zero: true })
    }

    /// `num / den` in `Z_p`, known modulo `p^prec`.
    pub fn from_rational(num: i128, den: i128, p: u32, prec: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let m = Self::check_context(p, prec)?;
        if num == 0 {
            return Self::exact_zero(p, prec);
        }
        let (vn, vd) = (vp_int(p, num), vp_int(p, den));
        if vd > vn {
            return Err(Error::NotIntegral { p });
        }
        let pd = (p as i128).pow(vd);
        let (num, den) = (num / pd, den / pd);
        let inv = inv_mod(reduce_i128(den, m), m).expect("denominator is a unit after removing p");
        let residue = mul_mod(reduce_i128(num, m), inv, m);
        Ok(Self { prime: p, precision: prec, residue, exact_zero: false })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    pub fn modulus(&self) -> u64 {
        checked_pow(self.prime, self.precision).expect("validated at construction")
    }

    pub fn valuation(&self) -> Valuation {
        if self.exact_zero {
            Valuation::ExactZero
        } else if self.residue == 0 {
            Valuation::AtLeast(self.precision)
        } else {
            Valuation::Finite(vp_residue(self.prime, self.precision, self.residue))
        }
    }

    pub fn is_unit(&self) -> bool {
        self.residue % self.prime as u64 != 0
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime || self.precision != other.precision {
            return Err(Error::MixedContext);
        }
        Ok(())
    }

    fn with_residue(&self, residue: u64, exact_zero: bool) -> Self {
        Self { residue, exact_zero, ..*self }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let m = self.modulus();
        let r = (self.residue + other.residue) % m;
        Ok(self.with_residue(r, self.exact_zero && other.exact_zero))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let m = self.modulus();
        let r = (self.residue + m - other.residue) % m;
        Ok(self.with_residue(r, self.exact_zero && other.exact_zero))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let r = mul_mod(self.residue, other.residue, self.modulus());
        Ok(self.with_residue(r, self.exact_zero || other.exact_zero))
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let m = self.modulus();
        Ok(self.with_residue(inv_mod(self.residue, m).expect("unit"), false))
    }

    /// Reduce to a coarser precision. Never extends.
    pub fn reduce_to(&self, prec: u32) -> Result<Self> {
        if prec > self.precision || prec == 0 {
            return Err(Error::PrecisionTooLarge { p: self.prime, prec });
        }
        let m = checked_pow(self.prime, prec).expect("smaller than current modulus");
        Ok(Self { precision: prec, residue: self.residue % m, ..*self })
    }

    /// Symmetric lift in `(-p^M/2, p^M/2]`.
    pub fn centered(&self) -> i128 {
        let m = self.modulus() as i128;
        let r = self.residue as i128;
        if 2 * r > m {
            r - m
        } else {
            r
        }
    }
}

impl Add for PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("mixed p-adic contexts")
    }
}

impl Sub for PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("mixed p-adic contexts")
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("mixed p-adic contexts")
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> Self {
        let m = self.modulus();
        self.with_residue((m - self.residue) % m, self.exact_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_mod_81() {
        let h = PadicScalar::from_rational(1, 2, 3, 4).unwrap();
        assert_eq!(h.residue(), 41);
        assert_eq!(h.valuation(), Valuation::Finite(0));
        assert_eq!((h + h).residue(), 1);
    }

    #[test]
    fn three_has_valuation_one() {
        let x = PadicScalar::from_rational(3, 1, 3, 4).unwrap();
        assert_eq!(x.residue(), 3);
        assert_eq!(x.valuation(), Valuation::Finite(1));
    }

    #[test]
    fn one_third_is_not_integral() {
        assert_eq!(PadicScalar::from_rational(1, 3, 3, 4), Err(Error::NotIntegral { p: 3 }));
    }

    #[test]
    fn valuations() {
        assert_eq!(PadicScalar::from_int(18, 3, 4).unwrap().valuation(), Valuation::Finite(2));
        assert_eq!(PadicScalar::exact_zero(3, 4).unwrap().valuation(), Valuation::ExactZero);
        assert_eq!(PadicScalar::from_int(81, 3, 4).unwrap().valuation(), Valuation::AtLeast(4));
        assert_eq!(PadicScalar::from_int(41, 3, 4).unwrap().valuation(), Valuation::Finite(0));
    }

    #[test]
    fn inverses() {
        let two = PadicScalar::from_int(2, 3, 4).unwrap();
        assert_eq!(two.inverse().unwrap().residue(), 41);
        let three = PadicScalar::from_int(3, 3, 4).unwrap();
        assert_eq!(three.inverse(), Err(Error::NonUnit));
    }

    #[test]
    fn mixed_contexts_are_rejected() {
        let a = PadicScalar::from_int(1, 3, 4).unwrap();
        let b = PadicScalar::from_int(1, 3, 5).unwrap();
        let c = PadicScalar::from_int(1, 5, 4).unwrap();
        assert_eq!(a.try_add(&b), Err(Error::MixedContext));
        assert_eq!(a.try_mul(&c), Err(Error::MixedContext));
    }

    #[test]
    fn cancelling_rational_with_p_in_both() {
        // 6/3 = 2
        assert_eq!(PadicScalar::from_rational(6, 3, 3, 4).unwrap().residue(), 2);
        assert_eq!(PadicScalar::from_rational(-1, 2, 5, 3).unwrap().residue(), 62);
    }

    fn arb_scalar() -> impl Strategy<Value = PadicScalar> {
        (prop::sample::select(alloc::vec![3u32, 5, 7, 17]), any::<i64>())
            .prop_map(|(p, n)| PadicScalar::from_int(n as i128, p, 6).unwrap())
    }

    proptest! {
        #[test]
        fn valuation_of_product(a in arb_scalar(), b in any::<i64>()) {
            let b = PadicScalar::from_int(b as i128, a.prime(), a.precision()).unwrap();
            let va = a.valuation().floor().unwrap();
            let vb = b.valuation().floor().unwrap();
            let vab = (a * b).valuation().floor().unwrap();
            prop_assert_eq!(vab, (va + vb).min(6));
            let vs = (a + b).valuation().floor().unwrap();
            prop_assert!(vs >= va.min(vb));
        }

        #[test]
        fn rational_times_reciprocal(n in 1i64..1_000_000, d in 1i64..1_000_000) {
            let p = 7;
            prop_assume!(n % 7 != 0 && d % 7 != 0);
            let x = PadicScalar::from_rational(n as i128, d as i128, p, 8).unwrap();
            let y = PadicScalar::from_rational(d as i128, n as i128, p, 8).unwrap();
            prop_assert_eq!((x * y).residue(), 1);
        }

        #[test]
        fn integer_round_trip(n in 0u64..5u64.pow(10)) {
            let x = PadicScalar::from_rational(n as i128, 1, 5, 10).unwrap();
            prop_assert_eq!(x.residue(), n);
        }
    }
}
