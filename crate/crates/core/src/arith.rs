//! Exact integer factorization helpers for torsion-level enumeration.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // these witnesses decide primality for all u64
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
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

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn factorize_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factorize_u64(d, out);
    factorize_u64(n / d, out);
}

/// Prime factorization n = prod p^k, sorted by p. Errors when n does not
/// fit in u64; callers treat that as out of supported range rather than
/// guessing.
pub fn factorize(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    let v = n
        .to_u64()
        .ok_or_else(|| Error::Unsupported(format!("cannot factor {n}: out of u64 range")))?;
    if v == 0 {
        return Err(Error::BadInput("cannot factor zero".into()));
    }
    let mut primes = Vec::new();
    factorize_u64(v, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, k)) if *q == BigInt::from(p) => *k += 1,
            _ => out.push((BigInt::from(p), 1)),
        }
    }
    Ok(out)
}

/// All prime powers p^j with p^j | n and j >= 1, sorted.
pub fn prime_power_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut out = Vec::new();
    for (p, k) in factorize(n)? {
        let mut q = BigInt::from(1);
        for _ in 0..k {
            q = &q * &p;
            out.push(q.clone());
        }
    }
    out.sort();
    Ok(out)
}
