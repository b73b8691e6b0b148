//! Small rational-integer helpers.

use num_integer::Integer;

pub fn isqrt(n: i128) -> i128 {
    if n < 0 {
        panic!("isqrt of negative");
    }
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Extended gcd: returns (g, x, y) with a x + b y = g >= 0.
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn is_squarefree(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Trial-division factorization, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Kronecker symbol (a / p) for a prime p.
pub fn kronecker_prime(a: i128, p: u64) -> i32 {
    let p_i = p as i128;
    if p == 2 {
        if a % 2 == 0 {
            return 0;
        }
        return match a.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = a.rem_euclid(p_i);
    if r == 0 {
        return 0;
    }
    let e = (p - 1) / 2;
    if powmod(r as u128, e as u128, p as u128) == 1 {
        1
    } else {
        -1
    }
}

pub fn powmod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

pub fn divisor_count(n: u64) -> u64 {
    factor_u64(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    if n == 0 {
        return u32::MAX;
    }
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(100), 10);
        assert_eq!(egcd(240, 46).0, 2);
        let (g, x, y) = egcd(-12, 18);
        assert_eq!(g, 6);
        assert_eq!(-12 * x + 18 * y, 6);
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(is_squarefree(30) && !is_squarefree(12));
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(kronecker_prime(5, 2), -1);
        assert_eq!(kronecker_prime(5, 11), 1);
        assert_eq!(kronecker_prime(5, 3), -1);
    }
}
