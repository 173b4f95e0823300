use alloc::vec;
use alloc::vec::Vec;

use super::{IwasawaContext, LambdaElement};
use crate::padic::{checked_pow, inv_mod, vp_residue};
use crate::poly;

/// Iwasawa invariants of a truncated series, read off `F = p^μ · P · U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    /// `None` when every coefficient vanishes at the working precision.
    pub mu: Option<u32>,
    pub lambda: Option<u32>,
    /// Distinguished polynomial `P` of degree `λ`.
    pub distinguished: Option<LambdaElement>,
    pub unit: Option<LambdaElement>,
    /// `(M', D')`: `P·U` matches `F/p^μ` modulo `(p^{M'}, X^{D'})`.
    pub certified_precision: (u32, usize),
}

impl InvariantReport {
    pub fn is_conclusive(&self) -> bool {
        self.mu.is_some() && self.lambda.is_some()
    }

    fn inconclusive() -> Self {
        Self { mu: None, lambda: None, distinguished: None, unit: None, certified_precision: (0, 0) }
    }
}

/// Weierstrass factorization of a polynomial whose coefficient at `lam` is a
/// unit and whose lower coefficients are divisible by `p`. Returns `(P, U)`
/// with `F = P·U` modulo `(m, X^len)`, where `len = f.len()`.
pub(crate) fn factor_distinguished(f: &[u64], lam: usize, p: u32, prec: u32) -> (Vec<u64>, Vec<u64>) {
    let m = checked_pow(p, prec).unwrap();
    let len = f.len();
    if lam == 0 {
        return (vec![1 % m], f.to_vec());
    }
    // F = A + X^λ B with A ≡ 0 (mod p) and B(0) a unit. Writing
    // X^λ = Q F + R and Q' = Q B, the fixed point Q' = 1 - τ(Q' A B⁻¹)
    // contracts p-adically, τ being division by X^λ with truncation.
    let work = len + (prec as usize + 1) * lam + 1;
    let a = &f[..lam];
    let mut b: Vec<u64> = f[lam..].to_vec();
    b.resize(work, 0);
    let inv_b0 = inv_mod(b[0], m).expect("unit at lambda");
    let b_inv = poly::inverse_series(&b, work, m, inv_b0);
    let s = poly::mul_trunc(a, &b_inv, m, work + lam);
    let mut q = vec![0u64; work];
    q[0] = 1 % m;
    for _ in 0..=prec + 1 {
        let qs = poly::mul_trunc(&q, &s, m, work + lam);
        let mut next: Vec<u64> = qs[lam..].iter().map(|&c| (m - c) % m).collect();
        next.resize(work, 0);
        next[0] = (next[0] + 1) % m;
        if next == q {
            break;
        }
        q = next;
    }
    // R = -(Q' S) mod X^λ, P = X^λ - R, U = B / Q'.
    let qs = poly::mul_trunc(&q, &s, m, lam);
    let mut pp: Vec<u64> = qs.iter().map(|&c| c % m).collect();
    pp.push(1 % m);
    let inv_q0 = inv_mod(q[0], m).expect("Q' is a unit");
    let q_inv = poly::inverse_series(&q, len, m, inv_q0);
    let u = poly::mul_trunc(&b[..len.min(b.len())], &q_inv, m, len);
    (pp, u)
}

/// Iwasawa `μ` and `λ` with the Weierstrass factorization of the
/// representative. The representative is treated as a polynomial, which
/// for `ω`-type truncations gives the invariants of any lift once `μ = 0`.
pub fn weierstrass(f: &LambdaElement) -> InvariantReport {
    let ctx = f.context();
    let (p, prec) = (ctx.prime(), ctx.precision());
    let mut best: Option<(u32, usize)> = None;
    for (i, &c) in f.residues().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let v = vp_residue(p, prec, c);
        if best.map_or(true, |(bv, _)| v < bv) {
            best = Some((v, i));
        }
    }
    let Some((mu, lam)) = best else {
        return InvariantReport::inconclusive();
    };
    let reduced = f.divide_by_p_power(mu).expect("mu is the minimal valuation");
    let prec2 = prec - mu;
    let raw = reduced.residues();
    let len = raw.len();
    let (pp, u) = factor_distinguished(raw, lam, p, prec2);

    let m = checked_pow(p, prec2).unwrap();
    let check = poly::mul_trunc(&pp, &u, m, len);
    if check != raw {
        return InvariantReport::inconclusive();
    }
    let pctx = IwasawaContext::degree(p, prec2, lam + 1).expect("valid context");
    let uctx = IwasawaContext::degree(p, prec2, len).expect("valid context");
    InvariantReport {
        mu: Some(mu),
        lambda: Some(lam as u32),
        distinguished: Some(LambdaElement::from_residues(&pctx, pp)),
        unit: Some(LambdaElement::from_residues(&uctx, u)),
        certified_precision: (prec2, len - lam),
    }
}
