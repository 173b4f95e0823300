//! Elliptic curves over `Q`: invariants, point counts, Fourier coefficients,
//! reduction types and the period lattice.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use astro_float::BigFloat;

use crate::error::{Error, Result};
use crate::module_model::RankSequence;
use crate::padic::{is_prime, mul_mod};
use crate::real::{self, RealCtx};

/// A curve in long Weierstrass form, assumed minimal, with the arithmetic
/// data the pipeline consumes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub label: String,
    /// `[a1, a2, a3, a4, a6]`.
    pub a: [i64; 5],
    pub conductor: u64,
    pub rank: u32,
    pub e_sequence: RankSequence,
    /// Root number `w` of the functional equation `Λ(2-s) = w Λ(s)`.
    pub fricke_sign: i8,
    pub torsion_bound: u32,
}

impl Curve {
    /// Validates the model. A missing rank sequence defaults to `(rank)`.
    pub fn new(
        label: impl Into<String>,
        a: [i64; 5],
        conductor: u64,
        rank: u32,
        e_sequence: Option<RankSequence>,
        fricke_sign: i8,
        torsion_bound: u32,
    ) -> Result<Self> {
        let e_sequence = e_sequence.unwrap_or_else(|| RankSequence::new(vec![rank]));
        let curve = Self { label: label.into(), a, conductor, rank, e_sequence, fricke_sign, torsion_bound };
        if curve.discriminant() == 0 {
            return Err(Error::SingularCurve);
        }
        if fricke_sign != 1 && fricke_sign != -1 {
            return Err(Error::ContextMismatch("fricke_sign must be +1 or -1".into()));
        }
        if curve.e_sequence.get(0) != rank {
            return Err(Error::ContextMismatch("e_sequence[0] differs from the rank".into()));
        }
        if conductor == 0 || torsion_bound == 0 {
            return Err(Error::ContextMismatch("conductor and torsion bound must be positive".into()));
        }
        Ok(curve)
    }

    pub fn b_invariants(&self) -> [i128; 4] {
        let [a1, a2, a3, a4, a6] = self.a.map(|x| x as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        [b2, b4, b6, b8]
    }

    pub fn c4(&self) -> i128 {
        let [b2, b4, _, _] = self.b_invariants();
        b2 * b2 - 24 * b4
    }

    pub fn c6(&self) -> i128 {
        let [b2, b4, b6, _] = self.b_invariants();
        -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
    }

    pub fn discriminant(&self) -> i128 {
        let [b2, b4, b6, b8] = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// Eigenvalue of the Fricke involution on the newform, `-w`.
    pub fn fricke_eigenvalue(&self) -> i64 {
        -(self.fricke_sign as i64)
    }

    pub fn is_bad(&self, ell: u64) -> bool {
        self.conductor % ell == 0
    }
}

/// `#Ẽ(F_ℓ)` by running over all `x`, singular point included.
pub fn count_points_naive(curve: &Curve, ell: u64) -> u64 {
    if ell == 2 {
        let [a1, a2, a3, a4, a6] = curve.a.map(|x| x.rem_euclid(2) as u64);
        let mut n = 1;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs + rhs) % 2 == 0 {
                    n += 1;
                }
            }
        }
        return n;
    }
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6.
    let [b2, b4, b6, _] = curve.b_invariants();
    let l = ell as i128;
    let (b2, b4, b6) = (b2.rem_euclid(l) as u64, (2 * b4).rem_euclid(l) as u64, b6.rem_euclid(l) as u64);
    let mut squares = vec![0u32; ell as usize];
    for y in 0..ell {
        squares[(y * y % ell) as usize] += 1;
    }
    let mut n = 1u64;
    for x in 0..ell {
        let f = ((4 * x % ell + b2) % ell * x % ell + b4) % ell * x % ell + b6;
        n += squares[(f % ell) as usize] as u64;
    }
    n
}

type Point = Option<(u64, u64)>;

/// Arithmetic on `y² = x³ + A x + B` over `F_ℓ`.
struct ShortCurve {
    a: u64,
    b: u64,
    l: u64,
}

impl ShortCurve {
    fn rhs(&self, x: u64) -> u64 {
        let l = self.l;
        (mul_mod(mul_mod(x, x, l), x, l) + mul_mod(self.a, x, l) + self.b) % l
    }

    fn add(&self, p: Point, q: Point) -> Point {
        let l = self.l;
        let ((x1, y1), (x2, y2)) = match (p, q) {
            (None, q) => return q,
            (p, None) => return p,
            (Some(p), Some(q)) => (p, q),
        };
        let slope = if x1 == x2 {
            if (y1 + y2) % l == 0 {
                return None;
            }
            let num = (3 * mul_mod(x1, x1, l) + self.a) % l;
            mul_mod(num, inv(2 * y1 % l, l), l)
        } else {
            mul_mod((y2 + l - y1) % l, inv((x2 + l - x1) % l, l), l)
        };
        let x3 = (mul_mod(slope, slope, l) + 2 * l - x1 - x2) % l;
        let y3 = (mul_mod(slope, (x1 + l - x3) % l, l) + l - y1) % l;
        Some((x3, y3))
    }

    fn neg(&self, p: Point) -> Point {
        p.map(|(x, y)| (x, (self.l - y) % self.l))
    }

    fn mul(&self, mut k: u64, p: Point) -> Point {
        let mut acc = None;
        let mut base = p;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Deterministic points with `y ≠ 0`, by increasing `x`.
    fn points(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.l).filter_map(move |x| {
            let f = self.rhs(x);
            if f == 0 {
                return None;
            }
            sqrt_mod(f, self.l).map(|y| (x, y))
        })
    }

    /// All traces `k` with `|k| ≤ 2√ℓ` and `(ℓ + 1 - k) P = O`, by
    /// baby-step giant-step.
    fn trace_candidates(&self, p: (u64, u64)) -> Vec<i64> {
        let l = self.l;
        let bound = isqrt(4 * l) as i64 + 1;
        let width = (2 * bound + 1) as u64;
        let s = isqrt(width) + 1;
        let pt = Some(p);
        let mut baby: Vec<(u64, u64, u64)> = Vec::with_capacity(s as usize);
        let mut cur = pt;
        for j in 1..=s {
            match cur {
                Some((x, y)) => {
                    if baby.iter().any(|&(bx, _, _)| bx == x) {
                        return self.candidates_from_small_order(p, bound);
                    }
                    baby.push((x, y, j));
                }
                None => return self.candidates_from_small_order(p, bound),
            }
            cur = self.add(cur, pt);
        }
        baby.sort_unstable();
        let step = 2 * s as i64 + 1;
        let k0 = -bound + s as i64;
        let lead = (l as i64 + 1 - k0) as u64;
        let mut r = self.mul(lead, pt);
        let giant = self.neg(self.mul(step as u64, pt));
        let mut out = Vec::new();
        let mut k = k0;
        while k - (s as i64) <= bound {
            let ds: Vec<i64> = match r {
                None => vec![0],
                Some((x, y)) => match baby.binary_search_by(|&(bx, _, _)| bx.cmp(&x)) {
                    Ok(i) => {
                        let (_, by, j) = baby[i];
                        vec![if by == y { j as i64 } else { -(j as i64) }]
                    }
                    Err(_) => vec![],
                },
            };
            for d in ds {
                let t = k + d;
                if t.abs() <= bound && !out.contains(&t) {
                    out.push(t);
                }
            }
            r = self.add(r, giant);
            k += step;
        }
        out
    }

    fn candidates_from_small_order(&self, p: (u64, u64), bound: i64) -> Vec<i64> {
        let mut cur = Some(p);
        let mut ord = 1u64;
        while cur.is_some() {
            cur = self.add(cur, Some(p));
            ord += 1;
        }
        (-bound..=bound).filter(|&k| (self.l as i64 + 1 - k) as u64 % ord == 0).collect()
    }
}

fn inv(a: u64, l: u64) -> u64 {
    crate::padic::inv_mod(a, l).expect("nonzero mod prime")
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

/// Square root modulo an odd prime (Tonelli–Shanks).
fn sqrt_mod(a: u64, l: u64) -> Option<u64> {
    let a = a % l;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (l - 1) / 2, l) != 1 {
        return None;
    }
    let (mut q, mut s) = (l - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..l).find(|&z| pow_mod(z, (l - 1) / 2, l) == l - 1).unwrap();
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, l), pow_mod(a, q, l), pow_mod(a, (q + 1) / 2, l));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, l);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), l);
        m = i;
        c = mul_mod(b, b, l);
        t = mul_mod(t, c, l);
        r = mul_mod(r, b, l);
    }
    Some(r)
}

fn isqrt(n: u64) -> u64 {
    let mut x = libm::sqrt(n as f64) as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Trace of Frobenius at a prime `ℓ > 3` of good reduction, via the
/// short model `y² = x³ - 27c4 x - 54c6` and Mestre's use of the quadratic
/// twist. Returns `None` if the candidates never narrow to one.
fn trace_bsgs(curve: &Curve, ell: u64) -> Option<i64> {
    let l = ell as i128;
    let a = (-27 * curve.c4()).rem_euclid(l) as u64;
    let b = (-54 * curve.c6()).rem_euclid(l) as u64;
    let e = ShortCurve { a, b, l: ell };
    let d = (2..ell).find(|&d| pow_mod(d, (ell - 1) / 2, ell) == ell - 1)?;
    let d2 = mul_mod(d, d, ell);
    let tw = ShortCurve { a: mul_mod(a, d2, ell), b: mul_mod(b, mul_mod(d2, d, ell), ell), l: ell };
    let mut cands: Option<Vec<i64>> = None;
    let mut pts_e = e.points();
    let mut pts_t = tw.points();
    for round in 0..40 {
        let found = if round % 2 == 0 {
            pts_e.next().map(|pt| e.trace_candidates(pt))
        } else {
            pts_t.next().map(|pt| tw.trace_candidates(pt).into_iter().map(|k| -k).collect())
        };
        let Some(found) = found else { continue };
        cands = Some(match cands {
            None => found,
            Some(c) => c.into_iter().filter(|k| found.contains(k)).collect(),
        });
        if cands.as_ref().is_some_and(|c| c.len() <= 1) {
            break;
        }
    }
    match cands {
        Some(c) if c.len() == 1 => Some(c[0]),
        _ => None,
    }
}

/// Threshold above which point counts switch to baby-step giant-step.
pub const NAIVE_LIMIT: u64 = 1000;

/// `ℓ + 1 - #Ẽ(F_ℓ)` for any prime `ℓ`. On a minimal model this is the
/// Hecke eigenvalue also at bad primes (`±1` multiplicative, `0` additive).
pub fn trace_of_frobenius(curve: &Curve, ell: u64) -> i64 {
    if ell >= NAIVE_LIMIT && curve.discriminant() % ell as i128 != 0 {
        if let Some(t) = trace_bsgs(curve, ell) {
            return t;
        }
    }
    ell as i64 + 1 - count_points_naive(curve, ell) as i64
}

/// `a_ℓ` at a prime of good reduction.
pub fn a_ell(curve: &Curve, ell: u64) -> Result<i64> {
    if !is_prime(ell) {
        return Err(Error::InvalidPrime(ell as u32));
    }
    if curve.is_bad(ell) {
        return Err(Error::BadReduction { ell });
    }
    Ok(trace_of_frobenius(curve, ell))
}

/// `a_1, …, a_{n_max}` (index 0 holds 0) from prime traces, the Hecke
/// recursion at prime powers and multiplicativity.
pub fn an_expansion(curve: &Curve, n_max: usize) -> Vec<i64> {
    let mut spf = vec![0u32; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut a = vec![0i64; n_max + 1];
    if n_max >= 1 {
        a[1] = 1;
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut m = n;
        let mut pk = 1;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        if m > 1 {
            a[n] = a[m] * a[pk];
        } else if pk == p {
            a[n] = trace_of_frobenius(curve, p as u64);
        } else if curve.is_bad(p as u64) {
            a[n] = a[p] * a[n / p];
        } else {
            a[n] = a[p] * a[n / p] - p as i64 * a[n / p / p];
        }
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionType {
    GoodOrdinary,
    GoodSupersingular,
    Multiplicative { split: bool },
    Additive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub kind: ReductionType,
    pub a_p: i64,
    /// `v_p(a_p)`, `None` when `a_p = 0`.
    pub vp_ap: Option<u32>,
}

impl LocalData {
    pub fn is_supersingular(&self) -> bool {
        self.kind == ReductionType::GoodSupersingular
    }
}

pub fn classify_reduction(curve: &Curve, p: u64) -> LocalData {
    let a_p = trace_of_frobenius(curve, p);
    let vp_ap = (a_p != 0).then(|| crate::padic::vp_int(p as u32, a_p as i128));
    let kind = if curve.is_bad(p) {
        if curve.c4() % p as i128 != 0 {
            ReductionType::Multiplicative { split: a_p == 1 }
        } else {
            ReductionType::Additive
        }
    } else if a_p % p as i64 == 0 {
        ReductionType::GoodSupersingular
    } else {
        ReductionType::GoodOrdinary
    };
    LocalData { kind, a_p, vp_ap }
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConductorCheck {
    /// Semistable: the conductor is the radical of the discriminant.
    Verified,
    /// Additive somewhere; only the prime support was compared.
    SupportOnly,
}

/// Compares the stated conductor with the discriminant of the (minimal)
/// model.
pub fn verify_conductor(curve: &Curve) -> Result<ConductorCheck> {
    let mut disc = curve.discriminant().unsigned_abs();
    let factors = prime_factors(curve.conductor);
    let mut semistable = true;
    for &(ell, e) in &factors {
        let l = ell as u128;
        if disc % l != 0 {
            return Err(Error::ContextMismatch("conductor prime does not divide the discriminant".into()));
        }
        while disc % l == 0 {
            disc /= l;
        }
        let mult = curve.c4() % ell as i128 != 0;
        if mult && e != 1 {
            return Err(Error::ContextMismatch("multiplicative prime with exponent above one".into()));
        }
        semistable &= mult;
    }
    if disc != 1 {
        return Err(Error::ContextMismatch("discriminant has primes outside the conductor".into()));
    }
    Ok(if semistable { ConductorCheck::Verified } else { ConductorCheck::SupportOnly })
}

/// `Ω⁺` and the imaginary part `Ω⁻` of the period lattice.
#[derive(Clone, Debug)]
pub struct Periods {
    pub omega_plus: BigFloat,
    pub omega_minus: BigFloat,
}

impl Periods {
    pub fn as_f64(&self) -> (f64, f64) {
        (real::to_f64(&self.omega_plus), real::to_f64(&self.omega_minus))
    }
}

/// Real roots of `4x³ + b2 x² + 2b4 x + b6`, in `f64`, decreasing.
fn cubic_real_roots(curve: &Curve) -> Vec<f64> {
    let [b2, b4, b6, _] = curve.b_invariants().map(|x| x as f64);
    let f = |x: f64| ((4.0 * x + b2) * x + 2.0 * b4) * x + b6;
    let r = 1.0 + (b2 / 4.0).abs().max((b4 / 2.0).abs()).max((b6 / 4.0).abs());
    let bisect = |mut lo: f64, mut hi: f64| {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    if curve.discriminant() > 0 {
        let disc = 4.0 * b2 * b2 - 96.0 * b4;
        let sq = libm::sqrt(disc);
        let (c1, c2) = ((-2.0 * b2 - sq) / 24.0, (-2.0 * b2 + sq) / 24.0);
        vec![bisect(c2, r), bisect(c1, c2), bisect(-r, c1)]
    } else {
        vec![bisect(-r, r)]
    }
}

fn refine_root(curve: &Curve, x0: f64, ctx: &RealCtx) -> BigFloat {
    let [b2, b4, b6, _] = curve.b_invariants().map(|x| ctx.int(x as i64));
    let four = ctx.int(4);
    let twelve = ctx.int(12);
    let two = ctx.int(2);
    let mut x = ctx.f64(x0);
    for _ in 0..(4 + ctx.bits.ilog2()) {
        let fx = ctx.add(&ctx.mul(&ctx.add(&ctx.mul(&ctx.add(&ctx.mul(&four, &x), &b2), &x), &ctx.mul(&two, &b4)), &x), &b6);
        let dfx = ctx.add(&ctx.mul(&ctx.add(&ctx.mul(&twelve, &x), &ctx.mul(&two, &b2)), &x), &ctx.mul(&two, &b4));
        x = ctx.sub(&x, &ctx.div(&fx, &dfx));
    }
    x
}

/// Lattice periods by the arithmetic-geometric mean. `Ω⁺` is the least
/// positive real period times the number of real components.
pub fn periods(curve: &Curve, digits: u32) -> Result<Periods> {
    let mut ctx = RealCtx::for_digits(digits);
    let pi = ctx.pi();
    let roots = cubic_real_roots(curve);
    let two = ctx.int(2);
    if curve.discriminant() > 0 {
        let e: Vec<BigFloat> = roots.iter().map(|&r| refine_root(curve, r, &ctx)).collect();
        let s13 = ctx.sqrt(&ctx.sub(&e[0], &e[2]));
        let s12 = ctx.sqrt(&ctx.sub(&e[0], &e[1]));
        let s23 = ctx.sqrt(&ctx.sub(&e[1], &e[2]));
        let w1 = ctx.div(&pi, &ctx.agm(&s13, &s12));
        let w2 = ctx.div(&pi, &ctx.agm(&s13, &s23));
        Ok(Periods { omega_plus: ctx.mul(&two, &w1), omega_minus: ctx.mul(&two, &w2) })
    } else {
        let [b2, b4, _, _] = curve.b_invariants().map(|x| ctx.int(x as i64));
        let e1 = refine_root(curve, roots[0], &ctx);
        let a = ctx.add(&ctx.mul(&ctx.int(3), &e1), &ctx.div(&b2, &ctx.int(4)));
        let b2e1 = ctx.div(&ctx.mul(&b2, &e1), &two);
        let bsq = ctx.add(&ctx.add(&ctx.mul(&ctx.int(3), &ctx.mul(&e1, &e1)), &b2e1), &ctx.div(&b4, &two));
        let b = ctx.sqrt(&bsq);
        let two_sqrt_b = ctx.mul(&two, &ctx.sqrt(&b));
        let plus = ctx.sqrt(&ctx.add(&ctx.mul(&two, &b), &a));
        let minus = ctx.sqrt(&ctx.sub(&ctx.mul(&two, &b), &a));
        let w1 = ctx.div(&ctx.mul(&two, &pi), &ctx.agm(&two_sqrt_b, &plus));
        let wm = ctx.div(&pi, &ctx.agm(&two_sqrt_b, &minus));
        if !(real::to_f64(&w1) > 0.0 && real::to_f64(&wm) > 0.0) {
            return Err(Error::NonConvergence);
        }
        Ok(Periods { omega_plus: w1, omega_minus: wm })
    }
}

/// `L(E, 1)` from the smoothed series
/// `Σ a_n/n (e^{-2πn t/√N} + w e^{-2πn/(t√N)})`, valid for every `t > 0`
/// exactly when `w` is the root number.
pub fn l_value_at_one(curve: &Curve, an: &[i64], t: f64) -> Result<f64> {
    let sqrt_n = libm::sqrt(curve.conductor as f64);
    let w = curve.fricke_sign as f64;
    let (u1, u2) = (2.0 * core::f64::consts::PI * t / sqrt_n, 2.0 * core::f64::consts::PI / (t * sqrt_n));
    let need = (40.0 / u1.min(u2)) as usize + 1;
    if an.len() <= need {
        return Err(Error::CoefficientSupplyExhausted { needed: need + 1, available: an.len() });
    }
    let mut s = 0.0;
    for (n, &c) in an.iter().enumerate().take(need + 1).skip(1) {
        let n = n as f64;
        s += c as f64 / n * (libm::exp(-u1 * n) + w * libm::exp(-u2 * n));
    }
    Ok(s)
}

/// Checks the supplied root number against the functional equation: the
/// smoothed sum must not depend on the splitting parameter.
pub fn verify_fricke_sign(curve: &Curve) -> Result<()> {
    let sqrt_n = libm::sqrt(curve.conductor as f64);
    let need = (40.0 * 1.6 * sqrt_n / (2.0 * core::f64::consts::PI)) as usize + 2;
    let an = an_expansion(curve, need);
    let (x, y) = (l_value_at_one(curve, &an, 1.3)?, l_value_at_one(curve, &an, 1.6)?);
    let scale: f64 = an.iter().take(20).map(|&c| (c as f64).abs()).sum::<f64>().max(1.0);
    if (x - y).abs() > 1e-9 * scale {
        return Err(Error::ContextMismatch("fricke_sign contradicts the functional equation".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e37() -> Curve {
        Curve::new("37a1", [0, 0, 1, -1, 0], 37, 1, None, -1, 1).unwrap()
    }

    fn e53() -> Curve {
        Curve::new("53a1", [1, -1, 1, 0, 0], 53, 1, None, -1, 1).unwrap()
    }

    /// Affine solutions counted pair by pair, plus the point at infinity.
    fn brute_count(c: &Curve, l: u64) -> u64 {
        let [a1, a2, a3, a4, a6] = c.a.map(|x| x.rem_euclid(l as i64) as u64);
        let mut n = 1;
        for x in 0..l {
            for y in 0..l {
                let lhs = (y * y + a1 * x % l * y + a3 * y) % l;
                let rhs = (x * x % l * x + a2 * x % l * x + a4 * x + a6) % l;
                n += (lhs == rhs) as u64;
            }
        }
        n
    }

    #[test]
    fn traces_from_the_worked_examples() {
        let (c, d) = (e37(), e53());
        assert_eq!(a_ell(&c, 3).unwrap(), -3);
        assert_eq!(a_ell(&c, 17).unwrap(), 0);
        assert_eq!(a_ell(&c, 19).unwrap(), 0);
        assert_eq!(a_ell(&c, 2).unwrap(), -2);
        assert_eq!(a_ell(&d, 3).unwrap(), -3);
        assert_eq!(a_ell(&d, 5).unwrap(), 0);
        assert_eq!(a_ell(&d, 11).unwrap(), 0);
        assert!(matches!(a_ell(&c, 37), Err(Error::BadReduction { ell: 37 })));
    }

    #[test]
    fn naive_count_matches_brute_force() {
        for c in [e37(), e53()] {
            for l in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
                assert_eq!(count_points_naive(&c, l), brute_count(&c, l), "{} at {l}", c.label);
            }
        }
    }

    #[test]
    fn bsgs_matches_naive() {
        for c in [e37(), e53()] {
            for l in (1000u64..1300).filter(|&l| is_prime(l)) {
                let naive = l as i64 + 1 - count_points_naive(&c, l) as i64;
                assert_eq!(trace_bsgs(&c, l), Some(naive), "{} at {l}", c.label);
            }
        }
    }

    #[test]
    fn expansion_recursions() {
        let a = an_expansion(&e37(), 200);
        assert_eq!(a[1], 1);
        assert_eq!(a[9], 6);
        assert_eq!(a[6], a[2] * a[3]);
        assert_eq!(a[37], -1);
        assert_eq!(an_expansion(&e53(), 60)[53], -1);
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    #[test]
    fn multiplicative_and_hasse() {
        for c in [e37(), e53()] {
            let a = an_expansion(&c, 400);
            for m in 1..=20 {
                for n in 1..=20 {
                    if gcd(m, n) == 1 {
                        assert_eq!(a[m * n], a[m] * a[n]);
                    }
                }
            }
            for l in (2..400).filter(|&l| is_prime(l as u64)) {
                assert!(a[l] * a[l] <= 4 * l as i64);
            }
        }
    }

    #[test]
    fn reduction_types() {
        let c = e37();
        assert_eq!(classify_reduction(&c, 17).kind, ReductionType::GoodSupersingular);
        let three = classify_reduction(&c, 3);
        assert_eq!((three.kind, three.a_p, three.vp_ap), (ReductionType::GoodSupersingular, -3, Some(1)));
        assert_eq!(classify_reduction(&c, 37).kind, ReductionType::Multiplicative { split: false });
        assert_eq!(classify_reduction(&c, 5).kind, ReductionType::GoodOrdinary);
        assert_eq!(classify_reduction(&e53(), 53).kind, ReductionType::Multiplicative { split: false });
    }

    #[test]
    fn conductors() {
        assert_eq!(verify_conductor(&e37()).unwrap(), ConductorCheck::Verified);
        assert_eq!(verify_conductor(&e53()).unwrap(), ConductorCheck::Verified);
        let mut wrong = e37();
        wrong.conductor = 74;
        assert!(verify_conductor(&wrong).is_err());
    }

    #[test]
    fn validation() {
        assert_eq!(Curve::new("x", [0, 0, 0, 0, 0], 1, 0, None, 1, 1).unwrap_err(), Error::SingularCurve);
        assert_eq!(e37().e_sequence.get(0), 1);
        assert_eq!(e37().e_sequence.get(3), 0);
    }

    #[test]
    fn fricke_sign_is_checked() {
        verify_fricke_sign(&e37()).unwrap();
        verify_fricke_sign(&e53()).unwrap();
        let mut bad = e37();
        bad.fricke_sign = 1;
        assert!(verify_fricke_sign(&bad).is_err());
    }

    #[test]
    fn central_value_vanishes() {
        for c in [e37(), e53()] {
            let an = an_expansion(&c, 400);
            let l1 = l_value_at_one(&c, &an, 1.0).unwrap();
            let (om, _) = periods(&c, 20).unwrap().as_f64();
            assert!((l1 / om).abs() < 1e-12, "{}", c.label);
        }
    }

    // Period integrals by quadrature, independent of the AGM.

    fn cubic(c: &Curve, x: &BigFloat, ctx: &RealCtx) -> BigFloat {
        let [b2, b4, b6, _] = c.b_invariants().map(|v| ctx.int(v as i64));
        let t = ctx.add(&ctx.mul(&ctx.int(4), x), &b2);
        let t = ctx.add(&ctx.mul(&t, x), &ctx.mul(&ctx.int(2), &b4));
        ctx.add(&ctx.mul(&t, x), &b6)
    }

    /// `∫_0^{π/2} g`, trapezoid; exponentially accurate for smooth even
    /// periodic integrands.
    fn trapezoid(ctx: &mut RealCtx, n: i64, mut g: impl FnMut(&BigFloat, &RealCtx) -> BigFloat) -> BigFloat {
        let pi = ctx.pi();
        let h = ctx.div(&pi, &ctx.int(2 * n));
        let mut acc = ctx.int(0);
        for k in 0..=n {
            let phi = ctx.mul(&h, &ctx.int(k));
            let s = ctx.sin(&phi);
            let mut v = g(&ctx.mul(&s, &s), ctx);
            if k == 0 || k == n {
                v = ctx.div(&v, &ctx.int(2));
            }
            acc = ctx.add(&acc, &v);
        }
        ctx.mul(&acc, &h)
    }

    /// `∫_0^∞ g(s) ds` by the exp-sinh rule `s = e^{π/2 sinh t}`.
    fn half_line(ctx: &mut RealCtx, g: impl Fn(&BigFloat, &RealCtx) -> BigFloat) -> BigFloat {
        let pi = ctx.pi();
        let half_pi = ctx.div(&pi, &ctx.int(2));
        let h = ctx.ratio(1, 64);
        let mut acc = ctx.int(0);
        for k in -400i64..=400 {
            let t = ctx.mul(&h, &ctx.int(k));
            let et = ctx.exp(&t);
            let emt = ctx.div(&ctx.int(1), &et);
            let sinh = ctx.div(&ctx.sub(&et, &emt), &ctx.int(2));
            let cosh = ctx.div(&ctx.add(&et, &emt), &ctx.int(2));
            let s = ctx.exp(&ctx.mul(&half_pi, &sinh));
            let w = ctx.mul(&ctx.mul(&s, &half_pi), &cosh);
            acc = ctx.add(&acc, &ctx.mul(&g(&s, ctx), &w));
        }
        ctx.mul(&acc, &h)
    }

    fn quadrature_periods(c: &Curve, digits: u32) -> (BigFloat, BigFloat) {
        let mut ctx = RealCtx::for_digits(digits);
        let roots: Vec<BigFloat> = cubic_real_roots(c).iter().map(|&r| refine_root(c, r, &ctx)).collect();
        let four = ctx.int(4);
        if roots.len() == 3 {
            let (e1, e2, e3) = (roots[0].clone(), roots[1].clone(), roots[2].clone());
            // Ω⁺ = 4∫_{e3}^{e2} dx/√f, Ω⁻ = 4∫_{e2}^{e1} dx/√(-f), both after
            // x = lower + (upper - lower) sin²φ.
            let plus = trapezoid(&mut ctx, 120, |s2, cx| {
                let x = cx.add(&e3, &cx.mul(&cx.sub(&e2, &e3), s2));
                cx.div(&cx.int(1), &cx.sqrt(&cx.sub(&e1, &x)))
            });
            let minus = trapezoid(&mut ctx, 120, |s2, cx| {
                let x = cx.add(&e2, &cx.mul(&cx.sub(&e1, &e2), s2));
                cx.div(&cx.int(1), &cx.sqrt(&cx.sub(&x, &e3)))
            });
            (ctx.mul(&four, &plus), ctx.mul(&four, &minus))
        } else {
            // f(x) = 4(x - e1) q(x); x = e1 ± s² leaves ∫_0^∞ ds/√q(e1 ± s²).
            let e1 = roots[0].clone();
            let q = |x: &BigFloat, cx: &RealCtx| {
                let d = cx.sub(x, &e1);
                cx.div(&cubic(c, x, cx), &cx.mul(&cx.int(4), &d))
            };
            let plus = half_line(&mut ctx, |s, cx| {
                let x = cx.add(&e1, &cx.mul(s, s));
                cx.div(&cx.int(1), &cx.sqrt(&q(&x, cx)))
            });
            let minus = half_line(&mut ctx, |s, cx| {
                let x = cx.sub(&e1, &cx.mul(s, s));
                cx.div(&cx.int(1), &cx.sqrt(&q(&x, cx)))
            });
            (ctx.mul(&ctx.int(2), &plus), minus)
        }
    }

    #[test]
    fn agm_agrees_with_quadrature() {
        let digits = 30;
        let ctx = RealCtx::for_digits(digits);
        let tol = ctx.f64(1e-28);
        for c in [e37(), e53()] {
            let p = periods(&c, digits).unwrap();
            let (qp, qm) = quadrature_periods(&c, digits);
            for (a, b) in [(&p.omega_plus, &qp), (&p.omega_minus, &qm)] {
                let err = ctx.div(&ctx.sub(a, b), a).abs();
                assert!(err < tol, "{}: {}", c.label, real::to_f64(&err));
            }
        }
        let (a, b) = periods(&e37(), 20).unwrap().as_f64();
        assert!((a - 5.986_917_292_463_918).abs() < 1e-12 && (b - 4.902_778_763_973_583).abs() < 1e-12);
        let (a, b) = periods(&e53(), 20).unwrap().as_f64();
        assert!((a - 4.687_641_048_878_882).abs() < 1e-12 && (b - 1.540_590_670_137_831).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn hasse_bound(i in 0usize..150) {
            let primes: Vec<u64> = (2u64..2000).filter(|&l| is_prime(l) && l != 37 && l != 53).collect();
            let l = primes[i % primes.len()];
            for c in [e37(), e53()] {
                let t = trace_of_frobenius(&c, l);
                prop_assert!((t * t) as u64 <= 4 * l);
            }
        }
    }
}
