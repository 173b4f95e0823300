//! Signed `p`-adic L-series read off a compatible sequence of theta
//! elements: plus/minus when `a_p = 0`, sharp/flat when `p | a_p ≠ 0`.
//!
//! With `a_p = 0` the norm relation forces
//! `θ_n = (-1)^{⌊n/2⌋} P_n · L^{±}` in `Λ/ω_n`, where `P_n` is the product
//! of the `Φ_k`, `1 ≤ k < n`, with `k ≢ n` mod 2. The quotient is then
//! determined modulo `Q_n = ω_n / P_n`. When `v = v_p(a_p) ≥ 1` the same
//! relation holds modulo `p^v`, which is the precision certified for the
//! sharp/flat pair.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lambda::{
    divrem, parity_product_poly, phi_degree, weierstrass, InvariantReport, IwasawaContext, LambdaElement, Parity,
    Truncation,
};
use crate::padic::vp_int;
use crate::theta::ThetaElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignLabel {
    Plus,
    Minus,
    Sharp,
    Flat,
}

impl fmt::Display for SignLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignLabel::Plus => "+",
            SignLabel::Minus => "-",
            SignLabel::Sharp => "sharp",
            SignLabel::Flat => "flat",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ParityFactor,
    LinearSystem,
    InvariantFit,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ParityFactor => "parity-factor",
            Method::LinearSystem => "linear-system",
            Method::InvariantFit => "invariant-fit",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSeries {
    pub label: SignLabel,
    /// Level of the theta element it was extracted from.
    pub level: u32,
    /// Known modulo `(Q_n, p^{M'})`; the context carries both.
    pub series: LambdaElement,
    pub invariants: InvariantReport,
}

impl SignedSeries {
    pub fn mu_lambda(&self) -> Option<(u32, u32)> {
        Some((self.invariants.mu?, self.invariants.lambda?))
    }

    /// `X` divides the series: its constant term vanishes at the
    /// certified precision.
    pub fn divisible_by_x(&self) -> bool {
        self.series.residues()[0] == 0
    }
}

/// Invariants of the quotient at one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelInvariants {
    pub level: u32,
    pub parity: Parity,
    pub mu: Option<u32>,
    pub lambda: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPair {
    /// Even-level series first.
    pub series: [SignedSeries; 2],
    pub method: Method,
    /// The top two levels of each parity class agree.
    pub stabilized: bool,
    pub history: Vec<LevelInvariants>,
    pub certified_precision: u32,
    /// Independent fit from the thetas' own invariants, when conclusive.
    pub fit: Option<InvariantFit>,
}

impl SignedPair {
    pub fn labels(&self) -> [SignLabel; 2] {
        [self.series[0].label, self.series[1].label]
    }

    /// `(μ, λ)` pairs sorted, for label-free comparisons.
    pub fn invariant_multiset(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = self.series.iter().filter_map(|s| s.mu_lambda()).collect();
        v.sort_unstable();
        v
    }

    /// Whether the fit agrees with the extracted invariants; `None` if
    /// either side is inconclusive.
    pub fn fit_agrees(&self) -> Option<bool> {
        let fit = self.fit.as_ref()?;
        let mut ok = true;
        for s in &self.series {
            let want = fit.for_parity(Parity::of(s.level))?;
            ok &= s.mu_lambda()? == want;
        }
        Some(ok)
    }
}

/// `P_n`, the product of `Φ_k` over `1 ≤ k < n` with `k ≢ n` (mod 2).
fn parity_factor(p: u32, n: u32, m: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(vec![1 % m]);
    }
    parity_product_poly(p, n - 1, Parity::of(n - 1), m)
}

/// Degree of `P_n`.
pub fn parity_degree(p: u32, n: u32) -> usize {
    (1..n).filter(|k| (n - k) % 2 == 1).map(|k| phi_degree(p, k)).sum()
}

/// `Q_n = X ∏_{1 ≤ k ≤ n, k ≡ n} Φ_k`.
fn quotient_modulus(p: u32, n: u32, m: u64) -> Result<Vec<u64>> {
    let mut q = vec![0];
    if n == 0 {
        q.push(1 % m);
    } else {
        q.extend(parity_product_poly(p, n, Parity::of(n), m)?);
    }
    Ok(q)
}

/// Divides `θ_n` by `(-1)^{⌊n/2⌋} P_n`, returning the quotient in
/// `Λ/(Q_n, p^M)`.
pub fn divide_theta(theta: &ThetaElement) -> Result<LambdaElement> {
    let ctx = theta.body.context();
    let (p, prec, n) = (ctx.prime(), ctx.precision(), theta.level);
    let m = ctx.modulus();
    let len = ctx.len() + 1;
    let dctx = IwasawaContext::degree(p, prec, len)?;
    let f = LambdaElement::from_residues(&dctx, theta.body.residues().to_vec());
    let pf = LambdaElement::from_residues(&dctx, parity_factor(p, n, m)?);
    let (quotient, remainder) = if n <= 1 {
        (f, LambdaElement::zero(&dctx))
    } else {
        let dr = divrem(&f, &pf)?;
        (dr.quotient, dr.remainder)
    };
    if let Some(index) = remainder.residues().iter().position(|&c| c != 0) {
        return Err(Error::CompatFailed { level: n, index });
    }
    let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
    let qctx = IwasawaContext::new(p, prec, Truncation::Modulus(quotient_modulus(p, n, m)?.into()))?;
    let deg_q = qctx.len();
    let raw = quotient.residues();
    if raw[deg_q..].iter().any(|&c| c != 0) {
        return Err(Error::CompatFailed { level: n, index: deg_q });
    }
    Ok(LambdaElement::from_residues(&qctx, raw[..deg_q].to_vec()).scale_int(sign))
}

fn label_for(parity: Parity, sharp_flat: bool) -> SignLabel {
    match (parity, sharp_flat) {
        (Parity::Even, false) => SignLabel::Plus,
        (Parity::Odd, false) => SignLabel::Minus,
        (Parity::Even, true) => SignLabel::Sharp,
        (Parity::Odd, true) => SignLabel::Flat,
    }
}

fn extract(thetas: &[ThetaElement], sharp_flat: bool, method: Method) -> Result<SignedPair> {
    let mut levels: Vec<&ThetaElement> = thetas.iter().collect();
    levels.sort_by_key(|t| t.level);
    let top = levels.last().ok_or(Error::NotStabilized("no theta elements".into()))?.level;
    if top == 0 || levels.len() < 2 {
        return Err(Error::NotStabilized("need two consecutive levels".into()));
    }
    let mut history = Vec::new();
    let mut by_level = Vec::new();
    for t in &levels {
        let q = divide_theta(t)?;
        let inv = weierstrass(&q);
        history.push(LevelInvariants { level: t.level, parity: Parity::of(t.level), mu: inv.mu, lambda: inv.lambda });
        by_level.push((t.level, q, inv));
    }
    let take = |level: u32| -> Result<SignedSeries> {
        let (_, q, inv) = by_level
            .iter()
            .find(|(l, _, _)| *l == level)
            .ok_or(Error::NotStabilized(alloc::format!("level {level} missing")))?;
        if !inv.is_conclusive() {
            return Err(Error::NotStabilized(alloc::format!("invariants inconclusive at level {level}")));
        }
        Ok(SignedSeries {
            label: label_for(Parity::of(level), sharp_flat),
            level,
            series: q.clone(),
            invariants: inv.clone(),
        })
    };
    let (a, b) = (take(top)?, take(top - 1)?);
    let series = if Parity::of(top) == Parity::Even { [a, b] } else { [b, a] };
    let stabilized = [Parity::Even, Parity::Odd].iter().all(|&par| {
        let mut vals: Vec<&LevelInvariants> = history.iter().filter(|h| h.parity == par).collect();
        vals.sort_by_key(|h| core::cmp::Reverse(h.level));
        vals.len() >= 2 && vals[0].mu.is_some() && vals[0].lambda.is_some() && vals[0].mu == vals[1].mu && vals[0].lambda == vals[1].lambda
    });
    let certified_precision = series[0].series.context().precision();
    Ok(SignedPair { series, method, stabilized, history, certified_precision, fit: None })
}

/// Plus/minus series for `a_p = 0` from `θ_0, …, θ_N`; the pair comes from
/// the top two levels.
pub fn extract_plus_minus(thetas: &[ThetaElement], a_p: i64) -> Result<SignedPair> {
    if a_p != 0 {
        return Err(Error::WrongReductionType("plus/minus needs a_p = 0".into()));
    }
    let mut pair = extract(thetas, false, Method::ParityFactor)?;
    pair.fit = invariant_fit(thetas).ok();
    Ok(pair)
}

/// Sharp/flat series for `v_p(a_p) ≥ 1`, `a_p ≠ 0`. The two components are
/// certified modulo `p^{v_p(a_p)}`; the even level is labelled sharp.
pub fn extract_sharp_flat(thetas: &[ThetaElement], a_p: i64) -> Result<SignedPair> {
    let first = thetas.first().ok_or(Error::NotStabilized("no theta elements".into()))?;
    let p = first.body.context().prime();
    if a_p == 0 || a_p % p as i64 != 0 {
        return Err(Error::WrongReductionType("sharp/flat needs p | a_p and a_p ≠ 0".into()));
    }
    let v = vp_int(p, a_p as i128);
    let prec = thetas.iter().map(|t| t.body.context().precision()).min().unwrap_or(0);
    if prec < v {
        return Err(Error::SingularSystem(alloc::format!("precision {prec} below v_p(a_p) = {v}")));
    }
    let reduced: Vec<ThetaElement> = thetas
        .iter()
        .map(|t| Ok(ThetaElement { level: t.level, body: t.body.reduce_precision(v)?, table_id: t.table_id.clone() }))
        .collect::<Result<_>>()?;
    let mut pair = extract(&reduced, true, Method::LinearSystem)?;
    pair.fit = invariant_fit(thetas).ok();
    Ok(pair)
}

/// Per-parity `(μ*, λ*)` with `λ(θ_n) = λ* + deg P_n` and `μ(θ_n) = μ*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFit {
    pub even: Option<(u32, u32)>,
    pub odd: Option<(u32, u32)>,
    /// `(n, μ(θ_n), λ(θ_n))` for every conclusive level.
    pub levels: Vec<(u32, u32, u32)>,
}

impl InvariantFit {
    pub fn for_parity(&self, parity: Parity) -> Option<(u32, u32)> {
        match parity {
            Parity::Even => self.even,
            Parity::Odd => self.odd,
        }
    }
}

/// Fits the signed invariants from the thetas' own invariants. Every
/// parity class needs a conclusive level, and all levels of a class must
/// give the same fit.
pub fn invariant_fit(thetas: &[ThetaElement]) -> Result<InvariantFit> {
    let mut levels = Vec::new();
    let mut even: Option<(u32, u32)> = None;
    let mut odd: Option<(u32, u32)> = None;
    for t in thetas {
        let n = t.level;
        let r = weierstrass(&t.body);
        let (Some(mu), Some(lam)) = (r.mu, r.lambda) else { continue };
        levels.push((n, mu, lam));
        let q = parity_degree(t.body.context().prime(), n) as u32;
        if lam < q {
            return Err(Error::NotStabilized(alloc::format!("λ(θ_{n}) = {lam} below the parity degree {q}")));
        }
        let fit = (mu, lam - q);
        let slot = match Parity::of(n) {
            Parity::Even => &mut even,
            Parity::Odd => &mut odd,
        };
        match slot {
            None => *slot = Some(fit),
            Some(prev) if *prev == fit => {}
            Some(prev) => {
                return Err(Error::NotStabilized(alloc::format!(
                    "level {n} gives (μ, λ) = {fit:?}, earlier levels {prev:?}"
                )))
            }
        }
    }
    if even.is_none() || odd.is_none() {
        return Err(Error::NotStabilized("a parity class has no conclusive level".into()));
    }
    levels.sort_unstable();
    Ok(InvariantFit { even, odd, levels })
}
