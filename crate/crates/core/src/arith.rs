//! Small machine-integer number theory used throughout the crate.

/// `a * b mod m` for `a, b < m`. Takes the native path when the product fits.
#[inline]
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    // Double-and-add; every intermediate stays below 2m < 2^128.
    debug_assert!(m < 1 << 127);
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc += a;
            if acc >= m {
                acc -= m;
            }
        }
        a <<= 1;
        if a >= m {
            a -= m;
        }
        b >>= 1;
    }
    acc
}

pub fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i128, b: i128) -> i128 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i128
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g`.
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

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let mi = m as i128;
    let (g, x, _) = egcd(a.rem_euclid(mi), mi);
    (g == 1).then(|| x.rem_euclid(mi) as u128)
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce(a: i128, m: u128) -> u128 {
    if m <= i128::MAX as u128 {
        a.rem_euclid(m as i128) as u128
    } else if a >= 0 {
        a as u128 % m
    } else {
        let r = a.unsigned_abs() % m;
        if r == 0 {
            0
        } else {
            m - r
        }
    }
}

/// Exponent of `p` in `n`; `n` must be nonzero.
pub fn valuation(n: i128, p: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut n = n.unsigned_abs();
    let p = p as u128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Largest power of `p` dividing `n` (`n != 0`).
pub fn p_part(n: i128, p: u64) -> u128 {
    (p as u128).pow(valuation(n, p))
}

/// `Some(k)` when `n = p^k`.
pub fn p_power_exponent(n: u128, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let v = valuation(n as i128, p);
    ((p as u128).pow(v) == n).then_some(v)
}

pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // Deterministic below 3.3e24; a strong probable-prime test beyond.
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `n > 0`, sorted by prime.
pub fn factor(mut n: u128) -> Vec<(u128, u32)> {
    let mut out: Vec<(u128, u32)> = Vec::new();
    let push = |q: u128, out: &mut Vec<(u128, u32)>| match out.iter_mut().find(|(r, _)| *r == q) {
        Some(e) => e.1 += 1,
        None => out.push((q, 1)),
    };
    let mut q = 2u128;
    while q <= 10_000 && q * q <= n {
        while n % q == 0 {
            push(q, &mut out);
            n /= q;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

/// Primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for `0..=bound`.
pub fn smallest_prime_factors(bound: usize) -> Vec<u32> {
    let mut spf = vec![0u32; bound + 1];
    for i in 2..=bound {
        if spf[i] == 0 {
            let mut j = i;
            while j <= bound {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Multiplicative order of `a` modulo `m` (`gcd(a, m) = 1`).
pub fn multiplicative_order(a: u128, m: u128) -> u128 {
    if m == 1 {
        return 1;
    }
    let phi = euler_phi(m);
    let mut order = phi;
    for (q, _) in factor(phi) {
        while order % q == 0 && pow_mod(a, order / q, m) == 1 {
            order /= q;
        }
    }
    order
}

pub fn euler_phi(n: u128) -> u128 {
    factor(n)
        .into_iter()
        .fold(1, |acc, (q, e)| acc * (q - 1) * q.pow(e - 1))
}

/// Least primitive root modulo the odd prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    let p = p as u128;
    let qs: Vec<u128> = factor(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .unwrap_or(1) as u64
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre(a: i128, p: u64) -> i32 {
    let a = reduce(a, p as u128);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p as u128 - 1) / 2, p as u128) == 1 {
        1
    } else {
        -1
    }
}
