//! Truncated arithmetic in the Iwasawa algebra `Λ = Z_p[[X]]`.
//!
//! An element is stored as the residues of a polynomial representative
//! modulo `p^M` and modulo one of `X^D`, `ω_n = (1+X)^{p^n} - 1`, or an
//! arbitrary monic polynomial. The topological generator is `γ = 1 + p`,
//! so `X = γ - 1`.

mod gcd;
mod weierstrass;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::padic::{inv_mod, modulus_for, mul_mod, reduce_i128, vp_residue, PadicScalar};
use crate::poly;

pub use gcd::{gcd_lambda, GcdReport};
pub use weierstrass::{weierstrass, InvariantReport};

/// How the `X`-adic side of an element is cut off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Modulo `X^D`.
    Degree(usize),
    /// Modulo `ω_n`, i.e. the group ring `Z_p[Γ/Γ^{p^n}]`.
    Omega(u32),
    /// Modulo a monic polynomial, coefficients low degree first.
    Modulus(Arc<[u64]>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IwasawaContext {
    p: u32,
    prec: u32,
    modulus: u64,
    trunc: Truncation,
    /// Monic modulus for `Omega` and `Modulus` truncations.
    poly_modulus: Option<Arc<[u64]>>,
}

impl IwasawaContext {
    pub fn new(p: u32, prec: u32, trunc: Truncation) -> Result<Self> {
        let modulus = modulus_for(p, prec)?;
        let poly_modulus = match &trunc {
            Truncation::Degree(0) => {
                return Err(Error::TruncationTooSmall { needed: 1, available: 0 })
            }
            Truncation::Degree(_) => None,
            Truncation::Omega(n) => Some(Arc::from(omega_poly(p, *n, modulus)?)),
            Truncation::Modulus(q) => {
                let q = poly::reduce(q, modulus);
                match poly::degree(&q) {
                    Some(d) if d >= 1 && q[d] == 1 => {}
                    _ => return Err(Error::NotDistinguished),
                }
                let mut q = q;
                poly::trim(&mut q);
                Some(Arc::from(q))
            }
        };
        let trunc = match trunc {
            Truncation::Modulus(_) => Truncation::Modulus(poly_modulus.clone().unwrap()),
            t => t,
        };
        Ok(Self { p, prec, modulus, trunc, poly_modulus })
    }

    pub fn degree(p: u32, prec: u32, d: usize) -> Result<Self> {
        Self::new(p, prec, Truncation::Degree(d))
    }

    pub fn omega(p: u32, prec: u32, n: u32) -> Result<Self> {
        Self::new(p, prec, Truncation::Omega(n))
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `p^M`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    /// The fixed topological generator `1 + p`.
    pub fn gamma(&self) -> u64 {
        1 + self.p as u64
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        match &self.poly_modulus {
            Some(q) => q.len() - 1,
            None => match self.trunc {
                Truncation::Degree(d) => d,
                _ => unreachable!(),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Monic modulus polynomial, absent for `X^D` truncation.
    pub fn poly_modulus(&self) -> Option<&[u64]> {
        self.poly_modulus.as_deref()
    }

    /// Same truncation at a coarser `p`-adic precision.
    pub fn with_precision(&self, prec: u32) -> Result<Self> {
        if prec > self.prec {
            return Err(Error::PrecisionTooLarge { p: self.p, prec });
        }
        let trunc = match &self.trunc {
            Truncation::Modulus(q) => Truncation::Modulus(q.clone()),
            t => t.clone(),
        };
        Self::new(self.p, prec, trunc)
    }

    fn reduce_poly(&self, mut a: Vec<u64>) -> Vec<u64> {
        for c in a.iter_mut() {
            *c %= self.modulus;
        }
        let n = self.len();
        match &self.poly_modulus {
            None => {
                a.resize(n, 0);
                a
            }
            Some(q) => {
                if a.len() <= n {
                    a.resize(n, 0);
                    a
                } else {
                    let mut r = poly::rem_monic(&a, q, self.modulus);
                    r.resize(n, 0);
                    r
                }
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct LambdaElement {
    ctx: IwasawaContext,
    coeffs: Vec<u64>,
}

impl fmt::Debug for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = poly::degree(&self.coeffs).map_or(0, |d| d + 1);
        write!(f, "{:?} + O({}^{}, {:?})", &self.coeffs[..d], self.ctx.p, self.ctx.prec, self.ctx.trunc)
    }
}

impl LambdaElement {
    pub fn zero(ctx: &IwasawaContext) -> Self {
        Self { ctx: ctx.clone(), coeffs: vec![0; ctx.len()] }
    }

    pub fn one(ctx: &IwasawaContext) -> Self {
        Self::from_ints(ctx, &[1])
    }

    /// The element `X`.
    pub fn x(ctx: &IwasawaContext) -> Self {
        Self::from_ints(ctx, &[0, 1])
    }

    /// Image of an integer polynomial, reduced into the context.
    pub fn from_ints(ctx: &IwasawaContext, coeffs: &[i128]) -> Self {
        let raw = coeffs.iter().map(|&c| reduce_i128(c, ctx.modulus)).collect();
        Self::from_residues(ctx, raw)
    }

    /// Image of a polynomial given by residues modulo `p^M`.
    pub fn from_residues(ctx: &IwasawaContext, coeffs: Vec<u64>) -> Self {
        Self { ctx: ctx.clone(), coeffs: ctx.reduce_poly(coeffs) }
    }

    /// Image of a polynomial with `p`-adic coefficients; all must share the
    /// context's prime and precision.
    pub fn from_scalars(ctx: &IwasawaContext, coeffs: &[PadicScalar]) -> Result<Self> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.prime() != ctx.p || c.precision() != ctx.prec {
                return Err(Error::MixedContext);
            }
            raw.push(c.residue());
        }
        Ok(Self::from_residues(ctx, raw))
    }

    pub fn context(&self) -> &IwasawaContext {
        &self.ctx
    }

    /// Residues of the representative, `len()` of them.
    pub fn residues(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicScalar {
        let r = self.coeffs.get(i).copied().unwrap_or(0);
        PadicScalar::from_residue_unchecked(self.ctx.p, self.ctx.prec, r)
    }

    pub fn coefficients(&self) -> Vec<PadicScalar> {
        (0..self.coeffs.len()).map(|i| self.coeff(i)).collect()
    }

    /// Coefficients lifted to `(-p^M/2, p^M/2]`.
    pub fn centered(&self) -> Vec<i128> {
        self.coefficients().iter().map(PadicScalar::centered).collect()
    }

    /// Degree of the representative; `None` when it vanishes.
    pub fn degree(&self) -> Option<usize> {
        poly::degree(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Smallest coefficient valuation, `None` when everything vanishes.
    pub fn min_valuation(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| vp_residue(self.ctx.p, self.ctx.prec, c))
            .min()
    }

    /// Value at `X = 0`. Meaningful when the modulus vanishes at zero.
    pub fn eval_zero(&self) -> PadicScalar {
        self.coeff(0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::MixedContext);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = poly::add(&self.coeffs, &other.coeffs, self.ctx.modulus);
        Ok(Self { ctx: self.ctx.clone(), coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = poly::sub(&self.coeffs, &other.coeffs, self.ctx.modulus);
        Ok(Self { ctx: self.ctx.clone(), coeffs })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.ctx.modulus;
        let prod = match self.ctx.poly_modulus {
            None => poly::mul_trunc(&self.coeffs, &other.coeffs, m, self.ctx.len()),
            Some(_) => poly::mul(&self.coeffs, &other.coeffs, m),
        };
        Ok(Self { ctx: self.ctx.clone(), coeffs: self.ctx.reduce_poly(prod) })
    }

    pub fn scale(&self, c: &PadicScalar) -> Result<Self> {
        if c.prime() != self.ctx.p || c.precision() != self.ctx.prec {
            return Err(Error::MixedContext);
        }
        Ok(self.scale_residue(c.residue()))
    }

    pub fn scale_int(&self, c: i128) -> Self {
        self.scale_residue(reduce_i128(c, self.ctx.modulus))
    }

    fn scale_residue(&self, c: u64) -> Self {
        Self { ctx: self.ctx.clone(), coeffs: poly::scale(&self.coeffs, c, self.ctx.modulus) }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.try_mul(self).expect("same context");
        }
        acc
    }

    /// The same element at a coarser `p`-adic precision.
    pub fn reduce_precision(&self, prec: u32) -> Result<Self> {
        let ctx = self.ctx.with_precision(prec)?;
        Ok(Self::from_residues(&ctx, self.coeffs.clone()))
    }

    /// Image under a coarser truncation. The target modulus must divide the
    /// current one; truncations are never extended.
    pub fn project(&self, target: &IwasawaContext) -> Result<Self> {
        if target.p != self.ctx.p || target.prec > self.ctx.prec {
            return Err(Error::MixedContext);
        }
        let ok = match (&self.ctx.poly_modulus, &target.poly_modulus) {
            (None, None) => target.len() <= self.ctx.len(),
            (None, Some(_)) => false,
            (Some(_), None) => false,
            (Some(src), Some(dst)) => {
                poly::rem_monic(src, dst, target.modulus).iter().all(|&c| c == 0)
            }
        };
        if !ok {
            return Err(Error::ContextMismatch("target truncation does not divide the source".into()));
        }
        Ok(Self::from_residues(target, self.coeffs.clone()))
    }

    /// The representative viewed as a polynomial in a `X^D` context.
    pub fn as_polynomial(&self, d: usize) -> Result<Self> {
        let len = self.degree().map_or(1, |k| k + 1);
        if d < len {
            return Err(Error::TruncationTooSmall { needed: len, available: d });
        }
        let ctx = IwasawaContext::degree(self.ctx.p, self.ctx.prec, d)?;
        Ok(Self::from_residues(&ctx, self.coeffs.clone()))
    }

    /// Divides every coefficient by `p^k`, lowering the precision by `k`.
    pub fn divide_by_p_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k >= self.ctx.prec {
            return Err(Error::PrecisionExhausted);
        }
        let pk = crate::padic::checked_pow(self.ctx.p, k).unwrap();
        if self.coeffs.iter().any(|&c| c % pk != 0) {
            return Err(Error::NotIntegral { p: self.ctx.p });
        }
        let ctx = self.ctx.with_precision(self.ctx.prec - k)?;
        Ok(Self::from_residues(&ctx, poly::div_p_power(&self.coeffs, pk, ctx.modulus)))
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for LambdaElement {
            type Output = LambdaElement;
            fn $m(self, rhs: Self) -> Self {
                self.$f(&rhs).expect("mixed Λ contexts")
            }
        }
        impl<'a> $tr<&'a LambdaElement> for &'a LambdaElement {
            type Output = LambdaElement;
            fn $m(self, rhs: &'a LambdaElement) -> LambdaElement {
                self.$f(rhs).expect("mixed Λ contexts")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl Neg for LambdaElement {
    type Output = LambdaElement;
    fn neg(self) -> Self {
        self.scale_int(-1)
    }
}

/// `(1+X)^N` modulo `p^M`, built from the multiplicative binomial
/// recurrence with the `p`-part of each factor tracked separately.
pub(crate) fn binomial_row(n: usize, p: u32, m: u64) -> Vec<u64> {
    let pp = p as u64;
    let mut row = Vec::with_capacity(n + 1);
    row.push(1 % m);
    let mut unit: u64 = 1;
    let mut val: u32 = 0;
    let split = |mut x: u64| {
        let mut v = 0;
        while x % pp == 0 {
            x /= pp;
            v += 1;
        }
        (x, v)
    };
    for k in 1..=n {
        let (num_u, num_v) = split((n - k + 1) as u64);
        let (den_u, den_v) = split(k as u64);
        unit = mul_mod(unit, num_u % m, m);
        unit = mul_mod(unit, inv_mod(den_u % m, m).expect("unit"), m);
        val = val + num_v - den_v;
        let c = match crate::padic::checked_pow(p, val) {
            Some(pv) if pv < m => mul_mod(unit, pv, m),
            _ => 0,
        };
        row.push(c);
    }
    row
}

pub(crate) fn omega_poly(p: u32, n: u32, m: u64) -> Result<Vec<u64>> {
    let pn = pow_usize(p, n)?;
    let mut w = binomial_row(pn, p, m);
    w[0] = 0;
    Ok(w)
}

pub(crate) fn phi_poly(p: u32, n: u32, m: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(vec![0, 1 % m]);
    }
    let num = omega_poly(p, n, m)?;
    let den = omega_poly(p, n - 1, m)?;
    let (q, r) = poly::divrem_monic(&num, &den, m);
    debug_assert!(r.iter().all(|&c| c == 0));
    Ok(q)
}

fn pow_usize(p: u32, n: u32) -> Result<usize> {
    (p as usize)
        .checked_pow(n)
        .filter(|&v| v <= 1 << 24)
        .ok_or(Error::TruncationTooSmall { needed: usize::MAX, available: 1 << 24 })
}

/// `deg Φ_n = p^{n-1}(p-1)`, and `deg Φ_0 = 1`.
pub fn phi_degree(p: u32, n: u32) -> usize {
    if n == 0 {
        1
    } else {
        (p as usize).pow(n - 1) * (p as usize - 1)
    }
}

fn checked_element(ctx: &IwasawaContext, raw: Vec<u64>) -> Result<LambdaElement> {
    let deg = poly::degree(&raw).unwrap_or(0);
    if deg >= ctx.len() {
        return Err(Error::TruncationTooSmall { needed: deg + 1, available: ctx.len() });
    }
    Ok(LambdaElement::from_residues(ctx, raw))
}

/// The cyclotomic factor `Φ_n` in `1 + X`; `Φ_0 = X`.
pub fn phi(ctx: &IwasawaContext, n: u32) -> Result<LambdaElement> {
    if phi_degree(ctx.p, n) >= ctx.len() {
        return Err(Error::TruncationTooSmall { needed: phi_degree(ctx.p, n) + 1, available: ctx.len() });
    }
    checked_element(ctx, phi_poly(ctx.p, n, ctx.modulus)?)
}

/// `ω_n = (1+X)^{p^n} - 1 = X Φ_1 ⋯ Φ_n`.
pub fn omega(ctx: &IwasawaContext, n: u32) -> Result<LambdaElement> {
    let deg = pow_usize(ctx.p, n)?;
    if deg >= ctx.len() {
        return Err(Error::TruncationTooSmall { needed: deg + 1, available: ctx.len() });
    }
    checked_element(ctx, omega_poly(ctx.p, n, ctx.modulus)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u32) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Product of the `Φ_k`, `1 ≤ k ≤ n`, with `k` of the given parity.
pub(crate) fn parity_product_poly(p: u32, n: u32, parity: Parity, m: u64) -> Result<Vec<u64>> {
    let mut acc = vec![1 % m];
    for k in 1..=n {
        if Parity::of(k) == parity {
            acc = poly::mul(&acc, &phi_poly(p, k, m)?, m);
        }
    }
    poly::trim(&mut acc);
    Ok(acc)
}

/// `X` times the product of the `Φ_i`, `1 ≤ i ≤ n`, of the given index parity.
pub fn omega_signed(ctx: &IwasawaContext, n: u32, parity: Parity) -> Result<LambdaElement> {
    let prod = parity_product_poly(ctx.p, n, parity, ctx.modulus)?;
    let mut raw = vec![0];
    raw.extend_from_slice(&prod);
    checked_element(ctx, raw)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivRem {
    pub quotient: LambdaElement,
    pub remainder: LambdaElement,
    /// `p`-adic digits lost; division by a monic divisor loses none.
    pub precision_loss: u32,
}

/// True when the residues form a distinguished polynomial of degree ≥ 1.
pub(crate) fn is_distinguished(raw: &[u64], p: u32) -> bool {
    match poly::degree(raw) {
        Some(d) if d >= 1 => raw[d] == 1 && raw[..d].iter().all(|&c| c % p as u64 == 0),
        _ => false,
    }
}

/// `F = Q·P + R` with `deg R < deg P` for a distinguished divisor `P`.
pub fn divrem(f: &LambdaElement, p: &LambdaElement) -> Result<DivRem> {
    f.check(p)?;
    if !is_distinguished(&p.coeffs, f.ctx.p) {
        return Err(Error::NotDistinguished);
    }
    let m = f.ctx.modulus;
    let (q, r) = poly::divrem_monic(&f.coeffs, &p.coeffs, m);
    let quotient = LambdaElement::from_residues(&f.ctx, q);
    let remainder = LambdaElement::from_residues(&f.ctx, r);
    #[cfg(test)]
    {
        let back = poly::add(&poly::mul(&quotient.coeffs, &p.coeffs, m), &remainder.coeffs, m);
        debug_assert_eq!(f.ctx.reduce_poly(back), f.coeffs, "divrem identity");
    }
    Ok(DivRem { quotient, remainder, precision_loss: 0 })
}
