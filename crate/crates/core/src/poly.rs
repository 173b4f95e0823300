//! Dense polynomial kernels over `Z/mZ`, coefficients stored low degree first.

use alloc::vec;
use alloc::vec::Vec;

use crate::padic::mul_mod;

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
}

/// Degree of the representative, `None` for zero.
pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn add(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + y) % m
        })
        .collect()
}

pub(crate) fn sub(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + m - y) % m
        })
        .collect()
}

pub(crate) fn scale(a: &[u64], c: u64, m: u64) -> Vec<u64> {
    a.iter().map(|&x| mul_mod(x, c, m)).collect()
}

/// Full product; coefficients are accumulated in `u128` and reduced lazily.
pub(crate) fn mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    mul_trunc(a, b, m, a.len() + b.len() - 1)
}

/// Product truncated to the first `len` coefficients.
pub(crate) fn mul_trunc(a: &[u64], b: &[u64], m: u64, len: usize) -> Vec<u64> {
    if a.is_empty() || b.is_empty() || len == 0 {
        return vec![0; len.max(1)];
    }
    let m128 = m as u128;
    let mut acc = vec![0u128; len];
    // m < 2^62, so each product is < 2^124 and 16 of them fit a u128.
    const FLUSH: usize = 15;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 || i >= len {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            acc[i + j] += x as u128 * y as u128;
        }
        if i % FLUSH == FLUSH - 1 {
            for c in acc.iter_mut() {
                *c %= m128;
            }
        }
    }
    acc.into_iter().map(|c| (c % m128) as u64).collect()
}

/// Long division by a monic polynomial `b` (leading coefficient 1).
pub(crate) fn divrem_monic(a: &[u64], b: &[u64], m: u64) -> (Vec<u64>, Vec<u64>) {
    let db = degree(b).expect("divisor is nonzero");
    debug_assert_eq!(b[db], 1 % m);
    let mut r: Vec<u64> = a.to_vec();
    let da = match degree(a) {
        Some(d) if d >= db => d,
        _ => {
            let mut r = r;
            r.resize(db.max(1), 0);
            r.truncate(db.max(1));
            return (vec![0], r);
        }
    };
    let mut q = vec![0u64; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = r[i + db] % m;
        q[i] = c;
        if c == 0 {
            continue;
        }
        for (j, &y) in b[..=db].iter().enumerate() {
            let t = mul_mod(c, y, m);
            r[i + j] = (r[i + j] + m - t) % m;
        }
    }
    r.truncate(db.max(1));
    r.resize(db.max(1), 0);
    (q, r)
}

pub(crate) fn rem_monic(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    divrem_monic(a, b, m).1
}

/// Power-series inverse modulo `X^len` of a series with unit constant term.
pub(crate) fn inverse_series(a: &[u64], len: usize, m: u64, inv0: u64) -> Vec<u64> {
    let mut out = vec![0u64; len];
    if len == 0 {
        return out;
    }
    out[0] = inv0;
    for k in 1..len {
        let mut s: u128 = 0;
        for j in 1..=k.min(a.len().saturating_sub(1)) {
            s += mul_mod(a[j], out[k - j], m) as u128;
        }
        let s = (s % m as u128) as u64;
        out[k] = mul_mod((m - s) % m, inv0, m);
    }
    out
}

#[cfg(test)]
/// `(1 + X)^e` modulo `m`, via the Pascal recurrence.
pub(crate) fn one_plus_x_pow(e: usize, m: u64) -> Vec<u64> {
    let mut row = vec![0u64; e + 1];
    row[0] = 1 % m;
    for n in 1..=e {
        for k in (1..=n).rev() {
            row[k] = (row[k] + row[k - 1]) % m;
        }
    }
    row
}

/// Divide every coefficient by `p^k`; the caller guarantees divisibility.
pub(crate) fn div_p_power(a: &[u64], pk: u64, new_m: u64) -> Vec<u64> {
    a.iter()
        .map(|&c| {
            debug_assert_eq!(c % pk, 0);
            (c / pk) % new_m
        })
        .collect()
}

pub(crate) fn reduce(a: &[u64], m: u64) -> Vec<u64> {
    a.iter().map(|&c| c % m).collect()
}
