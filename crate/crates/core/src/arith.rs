//! Small integer helpers: divisors, totient, squarefree parts, Kronecker symbols.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorisation as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Index of Gamma_0(N) in SL_2(Z): N * prod_{p | N} (1 + 1/p).
pub fn gamma0_index(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p + 1))
}

/// Squarefree part of a nonzero integer, keeping the sign.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero(), "squarefree part of zero");
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    out *= m;
    sign * out
}

/// Discriminant of the quadratic field Q(sqrt(n)); 1 when n is a square.
pub fn fundamental_discriminant(n: &BigInt) -> BigInt {
    let s = squarefree_part(n);
    if s.is_one() {
        return s;
    }
    let r = s.mod_floor(&BigInt::from(4));
    if r.is_one() {
        s
    } else {
        s * 4
    }
}

/// Kronecker symbol (d / p) for a prime p.
pub fn kronecker_prime(d: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    if (d % &pb).is_zero() {
        return 0;
    }
    if p == 2 {
        let r = d.mod_floor(&BigInt::from(8));
        return if r == BigInt::from(1) || r == BigInt::from(7) { 1 } else { -1 };
    }
    let a = d.mod_floor(&pb);
    let e = BigInt::from((p - 1) / 2);
    if a.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}
