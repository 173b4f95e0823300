//! gcd of a signed pair and its comparison with rank-based predictions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lambda::{divrem, gcd_lambda, phi_degree, phi_poly, IwasawaContext, LambdaElement};
pub use crate::lambda::GcdReport;
use crate::module_model::{gr_ideal, kp_ideal, Factor, FactoredIdeal, RankSequence};
use crate::poly;
use crate::signed::{SignedPair, SignedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub checks: Vec<Check>,
    /// Set only when `(gcd) = X^δ (fine_char)` was decided.
    pub delta_e: Option<u8>,
}

impl Verdict {
    pub fn push(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
    }

    pub fn status_of(&self, name: &str) -> Option<Status> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }

    /// `Fail` if any check failed, else `Inconclusive` if any was, else `Pass`.
    pub fn overall(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }

    pub fn extend(&mut self, other: Verdict) {
        self.checks.extend(other.checks);
        self.delta_e = self.delta_e.or(other.delta_e);
    }
}

/// Whether divisibility of an element of `ctx` by `f` is decided by its
/// representative.
fn decidable(ctx: &IwasawaContext, f: &[u64]) -> bool {
    match ctx.poly_modulus() {
        None => true,
        Some(q) => poly::rem_monic(q, f, ctx.modulus()).iter().all(|&c| c == 0),
    }
}

fn factor_poly(ctx: &IwasawaContext, n: u32) -> Result<alloc::vec::Vec<u64>> {
    phi_poly(ctx.prime(), n, ctx.modulus())
}

/// Exponent of `Φ_n` (`Φ_0 = X`) in a self-gcd report.
fn exponent_in(r: &GcdReport, n: u32) -> u32 {
    if n == 0 {
        r.x_exponent
    } else {
        r.phi_exponents.get(&n).copied().unwrap_or(0)
    }
}

/// The series' distinguished part is exactly a product of `X` and `Φ_n`
/// whose divisibility is decided by the known data.
fn cyclotomic_factorization(s: &SignedSeries) -> Result<(GcdReport, bool)> {
    let r = gcd_lambda(&s.series, &s.series)?;
    let clean = r.certified && r.residual.is_none();
    Ok((r, clean))
}

/// gcd of the two signed series in `Λ`.
///
/// Each series is only known modulo its own `(Q_n, p^{M'})`. The result is
/// certified when `μ = 0` is visible and one series factors completely
/// into `X` and `Φ_n` whose multiplicity in the other series is decided.
pub fn gcd_signed_pair(pair: &SignedPair) -> Result<GcdReport> {
    let [a, b] = &pair.series;
    let (Some((mua, lama)), Some((mub, lamb))) = (a.mu_lambda(), b.mu_lambda()) else {
        return Err(Error::PrecisionExhausted);
    };
    let mu = mua.min(mub);
    let mu_certified = mu == 0;
    let (ra, clean_a) = cyclotomic_factorization(a)?;
    let (rb, clean_b) = cyclotomic_factorization(b)?;
    let p = a.series.context().prime();

    let pick = if clean_a {
        Some((&ra, b, &rb, lamb))
    } else if clean_b {
        Some((&rb, a, &ra, lama))
    } else {
        None
    };
    let mut report = match pick {
        Some((clean, other, other_r, other_lambda)) => {
            let mut certified = mu_certified;
            let mut x_exponent = 0;
            let mut phi_exponents = BTreeMap::new();
            let ns = core::iter::once(0).chain(clean.phi_exponents.keys().copied());
            for n in ns {
                let e_clean = exponent_in(clean, n);
                if e_clean == 0 {
                    continue;
                }
                let f = factor_poly(other.series.context(), n)?;
                let known = decidable(other.series.context(), &f) || phi_degree(p, n) > other_lambda as usize;
                certified &= known;
                let e = e_clean.min(exponent_in(other_r, n));
                if e > 0 {
                    if n == 0 {
                        x_exponent = e;
                    } else {
                        phi_exponents.insert(n, e);
                    }
                }
            }
            GcdReport { mu, x_exponent, phi_exponents, residual: None, certified }
        }
        None => {
            // Fall back to the representatives as polynomials.
            let len = a.series.context().len().max(b.series.context().len()) + 1;
            let lift = |s: &SignedSeries| -> Result<LambdaElement> {
                let ctx = IwasawaContext::degree(p, s.series.context().precision(), len)?;
                Ok(LambdaElement::from_residues(&ctx, s.series.residues().to_vec()))
            };
            let (la, lb) = (lift(a)?, lift(b)?);
            let prec = la.context().precision().min(lb.context().precision());
            let mut r = gcd_lambda(&la.reduce_precision(prec)?, &lb.reduce_precision(prec)?)?;
            r.certified = false;
            r.mu = mu;
            r
        }
    };
    if !generator_divides(&report, a)? || !generator_divides(&report, b)? {
        report.certified = false;
    }
    Ok(report)
}

/// The distinguished part of the generator divides the representative.
fn generator_divides(g: &GcdReport, s: &SignedSeries) -> Result<bool> {
    let ctx = s.series.context();
    let len = ctx.len() + g.lambda(ctx.prime()) + 1;
    let dctx = IwasawaContext::degree(ctx.prime(), ctx.precision(), len)?;
    let distinguished = GcdReport { mu: 0, ..g.clone() };
    let gen = distinguished.generator(&dctx)?;
    if gen.degree().unwrap_or(0) == 0 {
        return Ok(true);
    }
    let f = LambdaElement::from_residues(&dctx, s.series.residues().to_vec());
    Ok(divrem(&f, &gen)?.remainder.is_zero())
}

/// The gcd as a factored ideal.
pub fn gcd_ideal(g: &GcdReport, p: u32) -> FactoredIdeal {
    let mut out = FactoredIdeal::unit(p).with_factor(Factor::X, g.x_exponent);
    out.p_exp = g.mu;
    for (&n, &e) in &g.phi_exponents {
        out = out.with_factor(Factor::Phi(n), e);
    }
    if let Some(r) = &g.residual {
        let c = r.centered();
        let d = r.degree().unwrap_or(0);
        let f = Factor::from_poly(&c[..=d], p).unwrap_or_else(|_| Factor::Poly(c[..=d].to_vec()));
        out = out.with_factor(f, 1);
    }
    out
}

/// Compares the gcd with the Kurihara–Pollack ideal, the fine
/// characteristic ideal with Greenberg's, and fits `(gcd) = X^δ (fine)`.
pub fn compare_predictions(g: &GcdReport, p: u32, e: &RankSequence, fine_char: &FactoredIdeal) -> Verdict {
    let mut v = Verdict::default();
    let ideal = gcd_ideal(g, p);
    let kp = kp_ideal(e, p);
    let detail = format!("gcd = {ideal}, predicted {kp}");
    let status = if !g.certified {
        Status::Inconclusive
    } else if ideal == kp {
        Status::Pass
    } else {
        Status::Fail
    };
    v.push("KP", status, detail);

    let gr = gr_ideal(e, p);
    let status = if *fine_char == gr { Status::Pass } else { Status::Fail };
    v.push("Gr", status, format!("fine_char = {fine_char}, predicted {gr}"));

    let fits: Vec<u8> = (0..=1u8)
        .filter(|&d| fine_char.clone().with_factor(Factor::X, d as u32) == ideal)
        .collect();
    if !g.certified {
        v.push("Xgcd", Status::Inconclusive, "gcd not certified");
    } else if let Some(&d) = fits.first() {
        v.delta_e = Some(d);
        v.push("Xgcd", Status::Pass, format!("(gcd) = X^{d} (fine_char)"));
    } else {
        v.push("Xgcd", Status::Fail, format!("{ideal} is not X^δ · {fine_char} for δ in {{0, 1}}"));
    }
    v
}

/// Irreducible factors of an ideal other than `X`, with `p` standing for
/// `μ > 0`.
fn non_x_factors(i: &FactoredIdeal) -> Vec<String> {
    let mut out = Vec::new();
    if i.p_exp > 0 {
        out.push("p".to_string());
    }
    for f in i.factors.keys() {
        if *f != Factor::X {
            out.push(f.to_string());
        }
    }
    out
}

fn divides(i: &FactoredIdeal, name: &str) -> bool {
    if name == "p" {
        return i.p_exp > 0;
    }
    i.factors.keys().any(|f| f.to_string() == name)
}

/// Every irreducible `f ≠ X` divides the gcd exactly when it divides the
/// fine characteristic ideal.
pub fn theorem_consistency(g: &GcdReport, p: u32, fine_char: &FactoredIdeal) -> Verdict {
    let mut v = Verdict::default();
    let ideal = gcd_ideal(g, p);
    let gcd_side = non_x_factors(&ideal);
    let fine_side = non_x_factors(fine_char);
    if gcd_side.is_empty() && fine_side.is_empty() {
        let status = if g.certified { Status::Pass } else { Status::Inconclusive };
        v.push("Thm", status, format!("no factor other than X in gcd = {ideal} or fine_char = {fine_char}"));
        return v;
    }
    for f in &gcd_side {
        let status = if !g.certified {
            Status::Inconclusive
        } else if divides(fine_char, f) {
            Status::Pass
        } else {
            Status::Fail
        };
        v.push(format!("Thm[{f} | gcd => {f} | fine_char]"), status, format!("gcd = {ideal}, fine_char = {fine_char}"));
    }
    for f in &fine_side {
        if gcd_side.contains(f) {
            continue;
        }
        let status = if !g.certified { Status::Inconclusive } else { Status::Fail };
        v.push(format!("Thm[{f} | fine_char => {f} | gcd]"), status, format!("gcd = {ideal}, fine_char = {fine_char}"));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{phi, weierstrass, InvariantReport, Parity, Truncation};
    use crate::signed::{Method, SignLabel};
    use proptest::prelude::*;

    fn report(mu: u32, x: u32, phis: &[(u32, u32)]) -> GcdReport {
        GcdReport {
            mu,
            x_exponent: x,
            phi_exponents: phis.iter().copied().collect(),
            residual: None,
            certified: true,
        }
    }

    fn series(label: SignLabel, level: u32, el: LambdaElement) -> SignedSeries {
        let invariants: InvariantReport = weierstrass(&el);
        SignedSeries { label, level, series: el, invariants }
    }

    fn pair(a: LambdaElement, b: LambdaElement) -> SignedPair {
        SignedPair {
            series: [series(SignLabel::Plus, 2, a), series(SignLabel::Minus, 1, b)],
            method: Method::ParityFactor,
            stabilized: false,
            history: Vec::new(),
            certified_precision: 6,
            fit: None,
        }
    }

    fn omega_ctx(p: u32, n: u32, parity: Parity) -> IwasawaContext {
        let big = IwasawaContext::degree(p, 6, 400).unwrap();
        let q = crate::lambda::omega_signed(&big, n, parity).unwrap();
        let d = q.degree().unwrap();
        IwasawaContext::new(p, 6, Truncation::Modulus(q.residues()[..=d].to_vec().into())).unwrap()
    }

    #[test]
    fn x_times_units_give_x() {
        let (ca, cb) = (omega_ctx(5, 2, Parity::Even), omega_ctx(5, 1, Parity::Odd));
        let a = LambdaElement::from_ints(&ca, &[0, 7, 5, 1]);
        let b = LambdaElement::from_ints(&cb, &[0, -3, 10]);
        let g = gcd_signed_pair(&pair(a, b)).unwrap();
        assert_eq!(g.to_string(), "X");
        assert!(g.certified);
    }

    #[test]
    fn common_phi_one() {
        let big = IwasawaContext::degree(3, 6, 200).unwrap();
        let f1 = phi(&big, 1).unwrap();
        let ca = omega_ctx(3, 3, Parity::Odd);
        let cb = omega_ctx(3, 1, Parity::Odd);
        let a = LambdaElement::from_residues(&ca, (&f1 * &LambdaElement::from_ints(&big, &[1, 1])).residues()[..ca.len()].to_vec());
        let b = LambdaElement::from_residues(&cb, (&f1 * &LambdaElement::from_ints(&big, &[2])).residues()[..cb.len()].to_vec());
        let g = gcd_signed_pair(&pair(a, b)).unwrap();
        assert_eq!(g.to_string(), "Phi1");
        assert!(g.certified);
    }

    #[test]
    fn predictions_for_rank_one() {
        let e = RankSequence::new(alloc::vec![1]);
        let v = compare_predictions(&report(0, 1, &[]), 17, &e, &FactoredIdeal::unit(17));
        assert_eq!(v.status_of("KP"), Some(Status::Pass));
        assert_eq!(v.status_of("Gr"), Some(Status::Pass));
        assert_eq!(v.delta_e, Some(1));
        let v = compare_predictions(&report(0, 2, &[]), 17, &e, &FactoredIdeal::unit(17));
        assert_eq!(v.status_of("KP"), Some(Status::Fail));
        let fine_x = FactoredIdeal::unit(17).with_factor(Factor::X, 1);
        let v = compare_predictions(&report(0, 1, &[]), 17, &e, &fine_x);
        assert_eq!((v.status_of("Xgcd"), v.delta_e), (Some(Status::Pass), Some(0)));
        let mut unsure = report(0, 1, &[]);
        unsure.certified = false;
        let v = compare_predictions(&unsure, 17, &e, &FactoredIdeal::unit(17));
        assert_eq!((v.status_of("KP"), v.delta_e), (Some(Status::Inconclusive), None));
    }

    #[test]
    fn consistency_audit() {
        let one = FactoredIdeal::unit(3);
        assert_eq!(theorem_consistency(&report(0, 1, &[]), 3, &one).overall(), Status::Pass);
        let v = theorem_consistency(&report(0, 1, &[(1, 1)]), 3, &one);
        assert_eq!(v.overall(), Status::Fail);
        assert!(v.checks.iter().any(|c| c.name.contains("Phi1") && c.status == Status::Fail));
        let v = theorem_consistency(&report(1, 1, &[]), 3, &one);
        assert!(v.checks.iter().any(|c| c.name.starts_with("Thm[p") && c.status == Status::Fail));
        let fine = one.clone().with_factor(Factor::Phi(1), 2);
        assert_eq!(theorem_consistency(&report(0, 1, &[(1, 1)]), 3, &fine).overall(), Status::Pass);
        assert_eq!(theorem_consistency(&report(0, 0, &[]), 3, &fine).overall(), Status::Fail);
    }

    fn arb_seq() -> impl Strategy<Value = RankSequence> {
        proptest::collection::vec(0u32..=1, 1..5).prop_map(RankSequence::new)
    }

    proptest! {
        #[test]
        fn matching_predictions_fix_delta(e in arb_seq()) {
            let p = 5;
            let kp = kp_ideal(&e, p);
            let g = GcdReport {
                mu: 0,
                x_exponent: kp.exponent(&Factor::X),
                phi_exponents: kp.factors.iter().filter_map(|(f, &x)| match f {
                    Factor::Phi(n) => Some((*n, x)),
                    _ => None,
                }).collect(),
                residual: None,
                certified: true,
            };
            let v = compare_predictions(&g, p, &e, &gr_ideal(&e, p));
            prop_assert_eq!(v.delta_e, Some((e.get(0) >= 1) as u8));
            prop_assert_eq!(v.overall(), Status::Pass);
        }

        #[test]
        fn swapping_labels_keeps_the_verdict(
            a in proptest::collection::vec(-30i128..30, 2..6),
            b in proptest::collection::vec(-30i128..30, 2..4),
        ) {
            let (ca, cb) = (omega_ctx(5, 2, Parity::Even), omega_ctx(5, 1, Parity::Odd));
            let pr = pair(LambdaElement::from_ints(&ca, &a), LambdaElement::from_ints(&cb, &b));
            let mut swapped = pr.clone();
            swapped.series.swap(0, 1);
            let (g1, g2) = (gcd_signed_pair(&pr), gcd_signed_pair(&swapped));
            prop_assert_eq!(g1.is_ok(), g2.is_ok());
            if let (Ok(g1), Ok(g2)) = (g1, g2) {
                prop_assert_eq!(g1.to_string(), g2.to_string());
                let one = FactoredIdeal::unit(5);
                prop_assert_eq!(theorem_consistency(&g1, 5, &one), theorem_consistency(&g2, 5, &one));
            }
        }
    }
}
