use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::weierstrass::factor_distinguished;
use super::{phi_degree, phi_poly, weierstrass, IwasawaContext, LambdaElement, Truncation};
use crate::error::{Error, Result};
use crate::padic::{checked_pow, vp_residue};
use crate::poly;

/// A gcd in `Λ` written as `p^μ · X^α · ∏ Φ_n^{β_n} · residual`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdReport {
    pub mu: u32,
    pub x_exponent: u32,
    pub phi_exponents: BTreeMap<u32, u32>,
    /// Remaining distinguished common factor; `None` means 1.
    pub residual: Option<LambdaElement>,
    pub certified: bool,
}

impl GcdReport {
    pub fn trivial() -> Self {
        Self { mu: 0, x_exponent: 0, phi_exponents: BTreeMap::new(), residual: None, certified: true }
    }

    /// `λ` of the generator.
    pub fn lambda(&self, p: u32) -> usize {
        let phis: usize = self.phi_exponents.iter().map(|(&n, &b)| phi_degree(p, n) * b as usize).sum();
        let res = self.residual.as_ref().and_then(|r| r.degree()).unwrap_or(0);
        self.x_exponent as usize + phis + res
    }

    /// The generator as an element of `ctx`.
    pub fn generator(&self, ctx: &IwasawaContext) -> Result<LambdaElement> {
        let m = ctx.modulus();
        let mut acc = alloc::vec![checked_pow(ctx.prime(), self.mu).unwrap_or(0) % m];
        for _ in 0..self.x_exponent {
            acc.insert(0, 0);
        }
        for (&n, &b) in &self.phi_exponents {
            let f = phi_poly(ctx.prime(), n, m)?;
            for _ in 0..b {
                acc = poly::mul(&acc, &f, m);
            }
        }
        if let Some(r) = &self.residual {
            let rr = poly::reduce(r.residues(), m);
            acc = poly::mul(&acc, &rr, m);
        }
        let deg = poly::degree(&acc).unwrap_or(0);
        if ctx.poly_modulus().is_none() && deg >= ctx.len() {
            return Err(Error::TruncationTooSmall { needed: deg + 1, available: ctx.len() });
        }
        Ok(LambdaElement::from_residues(ctx, acc))
    }
}

impl fmt::Display for GcdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let pow = |base: String, e: u32| if e == 1 { base } else { format!("{base}^{e}") };
        if self.mu > 0 {
            parts.push(pow("p".into(), self.mu));
        }
        if self.x_exponent > 0 {
            parts.push(pow("X".into(), self.x_exponent));
        }
        for (&n, &b) in &self.phi_exponents {
            if b > 0 {
                parts.push(pow(format!("Phi{n}"), b));
            }
        }
        if let Some(r) = &self.residual {
            let c = r.centered();
            let d = r.degree().unwrap_or(0);
            let terms: Vec<String> = c[..=d].iter().map(|x| format!("{x}")).collect();
            parts.push(format!("h[{}]", terms.join(",")));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Largest `e` with `f^e | a` at precision `m`, and the cofactor.
fn strip_factor(mut a: Vec<u64>, f: &[u64], m: u64) -> (u32, Vec<u64>) {
    let df = poly::degree(f).unwrap();
    let mut e = 0;
    loop {
        match poly::degree(&a) {
            Some(d) if d >= df => {}
            _ => return (e, a),
        }
        let (q, r) = poly::divrem_monic(&a, f, m);
        if r.iter().any(|&c| c != 0) {
            return (e, a);
        }
        a = q;
        poly::trim(&mut a);
        e += 1;
    }
}

/// Whether divisibility by `f` of the represented series is decided by the
/// representative: always for `X^D` truncation, otherwise when `f` divides
/// the modulus.
fn testable(ctx: &IwasawaContext, f: &[u64]) -> bool {
    match ctx.poly_modulus() {
        None => true,
        Some(q) => poly::rem_monic(q, f, ctx.modulus()).iter().all(|&c| c == 0),
    }
}

/// Euclid on distinguished polynomials, replacing each remainder by its
/// distinguished part. Returns the gcd and whether it was certified.
fn euclid(mut a: Vec<u64>, mut b: Vec<u64>, p: u32, mut prec: u32) -> Result<(Vec<u64>, u32, bool)> {
    loop {
        let m = checked_pow(p, prec).unwrap();
        if poly::degree(&b).unwrap_or(0) == 0 {
            return Ok((alloc::vec![1 % m], prec, true));
        }
        let r = poly::rem_monic(&a, &b, m);
        let Some((v, lam)) = min_valuation(&r, p, prec) else {
            // Vanishing remainder: b divides a as far as we can see.
            return Ok((b, prec, false));
        };
        if lam == 0 {
            return Ok((alloc::vec![1 % m], prec, true));
        }
        let pv = checked_pow(p, v).unwrap();
        let new_prec = prec - v;
        let nm = checked_pow(p, new_prec).unwrap();
        let scaled = poly::div_p_power(&r, pv, nm);
        let (pr, _) = factor_distinguished(&scaled, lam, p, new_prec);
        a = poly::reduce(&b, nm);
        b = pr;
        prec = new_prec;
        if prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
    }
}

fn min_valuation(a: &[u64], p: u32, prec: u32) -> Option<(u32, usize)> {
    let mut best: Option<(u32, usize)> = None;
    for (i, &c) in a.iter().enumerate() {
        if c != 0 {
            let v = vp_residue(p, prec, c);
            if best.map_or(true, |(bv, _)| v < bv) {
                best = Some((v, i));
            }
        }
    }
    best
}

/// gcd of two conclusive series as `p^μ h`.
///
/// `X` and the `Φ_n` of degree at most `min λ` are found by exact division
/// of the distinguished parts; whatever is left goes through a `p`-adic
/// Euclid. The result is certified when the residual is trivial for a
/// provable reason.
pub fn gcd_lambda(f: &LambdaElement, g: &LambdaElement) -> Result<GcdReport> {
    if f.context() != g.context() {
        return Err(Error::MixedContext);
    }
    let ctx = f.context();
    let p = ctx.prime();
    let (wf, wg) = (weierstrass(f), weierstrass(g));
    if !wf.is_conclusive() || !wg.is_conclusive() {
        return Err(Error::PrecisionExhausted);
    }
    let (muf, mug) = (wf.mu.unwrap(), wg.mu.unwrap());
    let mu = muf.min(mug);
    let prec = (ctx.precision() - muf).min(ctx.precision() - mug);
    let m = checked_pow(p, prec).unwrap();
    let mut pf = poly::reduce(wf.distinguished.unwrap().residues(), m);
    let mut pg = poly::reduce(wg.distinguished.unwrap().residues(), m);
    poly::trim(&mut pf);
    poly::trim(&mut pg);

    let exact = matches!(ctx.truncation(), Truncation::Degree(_));
    let mut certified = exact || mu == 0;
    let min_lambda = wf.lambda.unwrap().min(wg.lambda.unwrap()) as usize;

    let mut x_exponent = 0;
    let mut phi_exponents = BTreeMap::new();
    let mut n = 0u32;
    while phi_degree(p, n) <= min_lambda {
        let fac = phi_poly(p, n, m)?;
        if testable(ctx, &fac) {
            let (ef, rf) = strip_factor(pf, &fac, m);
            let (eg, rg) = strip_factor(pg, &fac, m);
            pf = rf;
            pg = rg;
            let beta = ef.min(eg);
            if n == 0 {
                x_exponent = beta;
            } else if beta > 0 {
                phi_exponents.insert(n, beta);
            }
        }
        n += 1;
    }

    let (df, dg) = (poly::degree(&pf).unwrap_or(0), poly::degree(&pg).unwrap_or(0));
    let residual = if df == 0 || dg == 0 {
        None
    } else {
        let (a, b) = if df >= dg { (pf, pg) } else { (pg, pf) };
        let (h, hprec, sure) = euclid(a, b, p, prec)?;
        certified &= exact && sure;
        if poly::degree(&h).unwrap_or(0) == 0 {
            None
        } else {
            let hctx = IwasawaContext::degree(p, hprec, h.len())?;
            Some(LambdaElement::from_residues(&hctx, h))
        }
    };
    Ok(GcdReport { mu, x_exponent, phi_exponents, residual, certified })
}
