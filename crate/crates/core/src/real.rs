//! Thin helpers over `astro_float::BigFloat` at a fixed binary precision.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision plus the constant cache needed by `exp`, `sin`, ….
pub struct RealCtx {
    pub bits: usize,
    cc: Consts,
}

impl core::fmt::Debug for RealCtx {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "RealCtx({} bits)", self.bits)
    }
}

/// Bits needed for `digits` decimal digits plus guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as usize * 3322).div_ceil(1000) + 64
}

impl RealCtx {
    pub fn new(bits: usize) -> Self {
        Self { bits, cc: Consts::new().expect("constant cache") }
    }

    pub fn for_digits(digits: u32) -> Self {
        Self::new(bits_for_digits(digits))
    }

    pub fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.bits)
    }

    pub fn f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn ratio(&self, a: i64, b: i64) -> BigFloat {
        self.div(&self.int(a), &self.int(b))
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.bits, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.bits, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.bits, RM, &mut self.cc)
    }

    /// Arithmetic-geometric mean; stops when the two means agree to the
    /// working precision.
    pub fn agm(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        let (mut a, mut b) = (a.clone(), b.clone());
        let two = self.int(2);
        for _ in 0..(self.bits + 64) {
            let na = self.div(&self.add(&a, &b), &two);
            let nb = self.sqrt(&self.mul(&a, &b));
            let diff = self.sub(&na, &nb).abs();
            a = na;
            b = nb;
            if diff.is_zero() || rel_below(&diff, &a, self.bits.saturating_sub(8)) {
                break;
            }
        }
        a
    }
}

/// `|d| < 2^{-bits} |x|`, judged from exponents.
pub fn rel_below(d: &BigFloat, x: &BigFloat, bits: usize) -> bool {
    match (d.exponent(), x.exponent()) {
        (_, None) => false,
        (None, _) => true,
        (Some(ed), Some(ex)) => (ex as i64 - ed as i64) > bits as i64,
    }
}

/// Nearest `f64`; enough for diagnostics and bounds.
pub fn to_f64(x: &BigFloat) -> f64 {
    let Some((words, _n, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if x.is_zero() {
        return 0.0;
    }
    let wbits = core::mem::size_of_val(&words[0]) as i32 * 8;
    let mut v = 0.0f64;
    let mut scale = e as i32;
    for w in words.iter().rev().take(3) {
        scale -= wbits;
        v += (*w as u64 as f64) * pow2(scale);
    }
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

fn pow2(e: i32) -> f64 {
    let mut v = 1.0f64;
    if e >= 0 {
        for _ in 0..e {
            v *= 2.0;
        }
    } else {
        for _ in 0..(-e) {
            v *= 0.5;
        }
    }
    v
}

/// Exact conversion of an integer-valued float with `|x| < 2^127`.
pub fn to_i128(x: &BigFloat) -> Option<i128> {
    if x.is_zero() {
        return Some(0);
    }
    let (words, _n, sign, e, _) = x.as_raw_parts()?;
    if e <= 0 {
        return Some(0);
    }
    if e > 126 {
        return None;
    }
    let wbits = core::mem::size_of_val(&words[0]) as u32 * 8;
    // Top 128 bits of the mantissa.
    let mut top: u128 = 0;
    let mut got = 0u32;
    for w in words.iter().rev() {
        if got >= 128 {
            break;
        }
        top |= (*w as u64 as u128) << (128 - wbits - got);
        got += wbits;
    }
    let v = (top >> (128 - e as u32)) as i128;
    Some(if sign == Sign::Neg { -v } else { v })
}

/// `⌊x⌋` as an integer.
pub fn floor_i128(x: &BigFloat) -> Option<i128> {
    to_i128(&x.floor())
}

#[derive(Clone, Debug)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn zero(ctx: &RealCtx) -> Self {
        Self { re: ctx.int(0), im: ctx.int(0) }
    }

    pub fn add(&self, o: &Self, ctx: &RealCtx) -> Self {
        Self { re: ctx.add(&self.re, &o.re), im: ctx.add(&self.im, &o.im) }
    }

    pub fn sub(&self, o: &Self, ctx: &RealCtx) -> Self {
        Self { re: ctx.sub(&self.re, &o.re), im: ctx.sub(&self.im, &o.im) }
    }

    pub fn mul(&self, o: &Self, ctx: &RealCtx) -> Self {
        let re = ctx.sub(&ctx.mul(&self.re, &o.re), &ctx.mul(&self.im, &o.im));
        let im = ctx.add(&ctx.mul(&self.re, &o.im), &ctx.mul(&self.im, &o.re));
        Self { re, im }
    }

    pub fn scale(&self, s: &BigFloat, ctx: &RealCtx) -> Self {
        Self { re: ctx.mul(&self.re, s), im: ctx.mul(&self.im, s) }
    }

    /// `e^{iθ}`.
    pub fn cis(theta: &BigFloat, ctx: &mut RealCtx) -> Self {
        Self { re: ctx.cos(theta), im: ctx.sin(theta) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        let c = RealCtx::for_digits(30);
        assert_eq!(to_f64(&c.ratio(1, 4)), 0.25);
        assert_eq!(to_f64(&c.int(-3)), -3.0);
        assert_eq!(floor_i128(&c.ratio(7, 2)), Some(3));
        assert_eq!(floor_i128(&c.ratio(-7, 2)), Some(-4));
        assert_eq!(to_i128(&c.int(1 << 40)), Some(1 << 40));
        assert_eq!(floor_i128(&c.ratio(1, 3)), Some(0));
    }

    #[test]
    fn agm_of_one_and_root_two() {
        // Gauss's constant: 1/agm(1, √2) = 0.8346268416740731862814297...
        let c = RealCtx::for_digits(30);
        let g = c.div(&c.int(1), &c.agm(&c.int(1), &c.sqrt(&c.int(2))));
        let want = c.f64(0.834_626_841_674_073_2);
        assert!(to_f64(&c.sub(&g, &want)).abs() < 1e-15);
    }
}
