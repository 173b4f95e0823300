//! Mazur–Tate elements `θ_n ∈ Λ/(ω_n, p^M)` for the trivial tame character.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lambda::{phi, IwasawaContext, LambdaElement};
use crate::modsym::SymbolTable;
use crate::padic::{checked_pow, mul_mod, PadicScalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaElement {
    pub level: u32,
    /// Element of `Λ/(ω_n, p^M)`, `p^n` coefficients.
    pub body: LambdaElement,
    pub table_id: String,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Least primitive root modulo the odd prime `p`.
pub fn primitive_root(p: u32) -> u64 {
    let p = p as u64;
    let mut factors = Vec::new();
    let mut n = p - 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p).find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).unwrap_or(1)
}

/// Generator of the Teichmüller roots of unity mod `p^{n+1}`.
fn teichmuller_generator(p: u32, n: u32) -> u64 {
    let m = checked_pow(p, n + 1).unwrap();
    pow_mod(primitive_root(p), checked_pow(p, n).unwrap(), m)
}

/// `a ≡ τ^i γ^j (mod p^{n+1})` with `τ` the Teichmüller lift of the least
/// primitive root, `γ = 1 + p`, `i < p - 1` and `j < p^n`.
pub fn decompose_unit(a: u64, p: u32, n: u32) -> Result<(u32, u64)> {
    let m = checked_pow(p, n + 1).ok_or(Error::PrecisionTooLarge { p, prec: n + 1 })?;
    if a % p as u64 == 0 {
        return Err(Error::NotAUnit { a, p });
    }
    let a = a % m;
    let pn = checked_pow(p, n).unwrap();
    let tau = teichmuller_generator(p, n);
    let omega = pow_mod(a, pn, m);
    let mut t = 1 % m;
    let mut i = 0;
    while t != omega {
        t = mul_mod(t, tau, m);
        i += 1;
    }
    let inv = crate::padic::inv_mod(omega, m).expect("unit");
    let u = mul_mod(a, inv, m);
    let gamma = 1 + p as u64;
    let mut g = 1 % m;
    for j in 0..pn {
        if g == u {
            return Ok((i, j));
        }
        g = mul_mod(g, gamma, m);
    }
    unreachable!("1 + pZ is cyclic on γ")
}

/// `θ_n = Σ_j c_j (1+X)^j` with `c_j = Σ_i [τ^i γ^j / p^{n+1}]^+`.
pub fn build_theta(table: &SymbolTable, n: u32, prec: u32) -> Result<ThetaElement> {
    let p = table.p;
    table.check_complete(n + 1)?;
    let ctx = IwasawaContext::omega(p, prec, n)?;
    let m = checked_pow(p, n + 1).unwrap();
    let pn = checked_pow(p, n).unwrap() as usize;
    let tau = teichmuller_generator(p, n);
    let gamma = 1 + p as u64;
    let modulus = ctx.modulus();
    let mut coeffs = vec![0u64; pn];
    let mut gj = 1 % m;
    for c in coeffs.iter_mut() {
        let mut a = gj;
        let mut acc = PadicScalar::exact_zero(p, prec)?;
        for _ in 0..p - 1 {
            let s = table.plus(n + 1, a)?;
            let v = PadicScalar::from_rational(*s.numer() as i128, *s.denom() as i128, p, prec)?;
            acc = acc.try_add(&v)?;
            a = mul_mod(a, tau, m);
        }
        *c = acc.residue();
        gj = mul_mod(gj, gamma, m);
    }
    // Horner in (1 + X).
    let mut body = vec![0u64; pn];
    for &c in coeffs.iter().rev() {
        for k in (1..pn).rev() {
            body[k] = (body[k] + body[k - 1]) % modulus;
        }
        body[0] = (body[0] + c) % modulus;
    }
    Ok(ThetaElement { level: n, body: LambdaElement::from_residues(&ctx, body), table_id: table.id() })
}

/// All `θ_0, …, θ_top`.
pub fn build_thetas(table: &SymbolTable, top: u32, prec: u32) -> Result<Vec<ThetaElement>> {
    (0..=top).map(|n| build_theta(table, n, prec)).collect()
}

/// Checks `π(θ_n) ≡ a_p θ_{n-1} - Φ_{n-1} θ_{n-2}` in `Λ/(ω_{n-1}, p^M)`.
pub fn check_compat(thetas: &[ThetaElement], n: u32, a_p: i64) -> Result<()> {
    if n < 2 {
        return Err(Error::ContextMismatch("compatibility starts at level 2".into()));
    }
    let get = |k: u32| {
        thetas
            .iter()
            .find(|t| t.level == k)
            .ok_or(Error::ContextMismatch(alloc::format!("theta at level {k} missing")))
    };
    let (tn, t1, t2) = (get(n)?, get(n - 1)?, get(n - 2)?);
    let target = t1.body.context().clone();
    let lhs = tn.body.project(&target)?;
    let lifted = LambdaElement::from_residues(&target, t2.body.residues().to_vec());
    let rhs = t1.body.scale_int(a_p as i128).try_sub(&phi(&target, n - 1)?.try_mul(&lifted)?)?;
    let diff = lhs.try_sub(&rhs)?;
    match diff.residues().iter().position(|&c| c != 0) {
        None => Ok(()),
        Some(index) => Err(Error::CompatFailed { level: n, index }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{a_ell, Curve};
    use crate::modsym::{compute_table, Provenance, Rat};
    use proptest::prelude::*;

    fn e53() -> Curve {
        Curve::new("53a1", [1, -1, 1, 0, 0], 53, 1, None, -1, 1).unwrap()
    }

    fn e37() -> Curve {
        Curve::new("37a1", [0, 0, 1, -1, 0], 37, 1, None, -1, 1).unwrap()
    }

    #[test]
    fn unit_decomposition() {
        assert_eq!(decompose_unit(1, 3, 2).unwrap(), (0, 0));
        assert_eq!(decompose_unit(7, 3, 2).unwrap(), (0, 8));
        let (i, j) = decompose_unit(26, 3, 2).unwrap();
        assert_eq!(j, 0);
        assert_eq!(pow_mod(teichmuller_generator(3, 2), i as u64, 27), 26);
        assert_eq!(decompose_unit(9, 3, 2), Err(Error::NotAUnit { a: 9, p: 3 }));
    }

    #[test]
    fn decomposition_against_discrete_log() {
        for (p, n) in [(3u32, 2u32), (5, 2), (7, 1)] {
            let m = checked_pow(p, n + 1).unwrap();
            let tau = teichmuller_generator(p, n);
            for a in (1..m).filter(|a| a % p as u64 != 0) {
                let (i, j) = decompose_unit(a, p, n).unwrap();
                let back = mul_mod(pow_mod(tau, i as u64, m), pow_mod(1 + p as u64, j, m), m);
                assert_eq!(back, a);
            }
        }
    }

    fn synthetic(p: u32, levels: u32, f: impl Fn(u32, u64) -> Rat) -> SymbolTable {
        let mut t = SymbolTable::new("syn", p, levels, Provenance::Imported);
        t.insert(0, 0, f(0, 0), Rat::from_integer(0)).unwrap();
        for k in 1..=levels {
            let m = checked_pow(p, k).unwrap();
            for a in (1..m).filter(|a| a % p as u64 != 0) {
                t.insert(k, a, f(k, a), Rat::from_integer(0)).unwrap();
            }
        }
        t
    }

    #[test]
    fn zero_and_delta_tables() {
        let z = synthetic(5, 2, |_, _| Rat::from_integer(0));
        assert!(build_theta(&z, 1, 6).unwrap().body.is_zero());
        let d = synthetic(5, 2, |k, a| Rat::from_integer((k == 2 && a == 1) as i64));
        let th = build_theta(&d, 1, 6).unwrap();
        assert_eq!(th.body.centered(), [1, 0, 0, 0, 0]);
    }

    #[test]
    fn non_integral_symbol_is_reported() {
        let t = synthetic(5, 1, |_, _| Rat::new(1, 5));
        assert_eq!(build_theta(&t, 0, 4), Err(Error::NotIntegral { p: 5 }));
    }

    #[test]
    fn rank_one_thetas_vanish_at_zero_and_are_compatible() {
        let c = e53();
        for (p, top) in [(5u32, 2u32), (3, 3)] {
            let t = compute_table(&c, p, top + 1, 30, 1000).unwrap();
            let ap = a_ell(&c, p as u64).unwrap();
            let thetas = build_thetas(&t, top, 8).unwrap();
            for th in &thetas {
                assert_eq!(th.body.residues()[0], 0);
            }
            for n in 2..=top {
                check_compat(&thetas, n, ap).unwrap();
            }
            if ap != 0 {
                assert!(check_compat(&thetas, 2, -ap).is_err() || check_compat(&thetas, 3, -ap).is_err());
            }
        }
    }

    #[test]
    fn compat_on_37a1_at_three() {
        let c = e37();
        let t = compute_table(&c, 3, 4, 30, 1000).unwrap();
        let thetas = build_thetas(&t, 3, 8).unwrap();
        check_compat(&thetas, 2, -3).unwrap();
        check_compat(&thetas, 3, -3).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn linear_in_the_table(seed in 0u64..1000, seed2 in 0u64..1000) {
            let f = move |s: u64| move |k: u32, a: u64| Rat::new(((a * 31 + k as u64 * 7 + s) % 11) as i64 - 5, 2);
            let (t1, t2) = (synthetic(3, 3, f(seed)), synthetic(3, 3, f(seed2)));
            let sum = synthetic(3, 3, |k, a| f(seed)(k, a) + f(seed2)(k, a));
            for n in 0..=2 {
                let (a, b, s) = (build_theta(&t1, n, 6).unwrap(), build_theta(&t2, n, 6).unwrap(), build_theta(&sum, n, 6).unwrap());
                prop_assert_eq!(&a.body + &b.body, s.body);
            }
        }
    }
}
