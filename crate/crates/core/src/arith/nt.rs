//! Small-integer number theory. Everything here is trial division; inputs are
//! desk-scale.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n as u128)
        .into_iter()
        .fold(n, |acc, (q, _)| acc / q as u64 * (q as u64 - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
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

pub fn mobius(n: u64) -> i32 {
    let f = factorize(n as u128);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Multiplicative order of `a` modulo `n` (requires gcd(a, n) = 1).
pub fn multiplicative_order_mod(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let a = a % n;
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % n as u128) as u64;
        k += 1;
    }
    k
}

/// Largest divisor of `n` coprime to `p`.
pub fn prime_to_p_part(mut n: u64, p: u64) -> u64 {
    while n % p == 0 && n > 0 {
        n /= p;
    }
    n
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128 % p as i128, p as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(p as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Residue of a big integer modulo a small prime, in [0, p).
pub fn big_mod(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    u64::try_from(r).expect("residue fits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn phi_and_divisors() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
    }

    #[test]
    fn orders_and_valuations() {
        assert_eq!(multiplicative_order_mod(2, 7), 3);
        assert_eq!(multiplicative_order_mod(7, 3), 1);
        assert_eq!(int_valuation(&BigInt::from(45), 3), 2);
        assert_eq!(mod_inverse(2, 7), Some(4));
        assert_eq!(prime_to_p_part(12, 2), 3);
    }
}
