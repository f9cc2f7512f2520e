//! Deterministic 64-bit primality, prime search, and integer factorization.

/// `a * b mod m` with exact 128-bit intermediates.
#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `a^e mod m` by square-and-multiply.
pub(crate) fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    a %= m;
    while e != 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
///
/// The 7-witness SPRP base (Jim Sinclair) is sufficient for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }

    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;

    'witness: for a in WITNESSES {
        let a = a % n;
        if a == 0 {
            continue;
        }
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

/// Least prime `>= n`.
///
/// Panics if no prime fits in `u64` (n beyond 2^64 - 59; unreachable from the
/// supported construction range).
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    loop {
        if is_prime(c) {
            return c;
        }
        c = c.checked_add(1).expect("no prime >= n fits in u64");
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho. `n` must be odd, composite, > 1.
/// Deterministic: the polynomial offset starts at 1 and increments on failure.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && n % 2 == 1 && !is_prime(n));
    let mut c: u64 = 1;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x: u64 = 2;
        let mut y: u64 = 2;
        let mut d: u64 = 1;
        let mut count: u64 = 0;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
            count += 1;
            if count > n {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization as sorted `(prime, exponent)` pairs.
pub(crate) fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut primes: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    for p in primes {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => out.push((p, 1)),
        }
    }
    out.sort_unstable();
    out
}

/// All divisors of `n`, ascending.
pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Writes `q` as `p^e` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    if is_prime(q) {
        return Some((q, 1));
    }
    // Composite prime powers have p <= q^(1/2) <= 2^32; find the least factor.
    let mut p = 0u64;
    let mut d = 2u64;
    while d.saturating_mul(d) <= q {
        if q.is_multiple_of(d) {
            p = d;
            break;
        }
        d += 1;
        if d > 1 << 17 {
            // Beyond this, q = p^e with e >= 2 would exceed u64 only for huge p;
            // fall back to the generic factorizer.
            let f = factor(q);
            if f.len() == 1 {
                return Some(f[0]);
            }
            return None;
        }
    }
    if p == 0 {
        return None;
    }
    let mut rest = q;
    let mut e = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    if rest == 1 {
        Some((p, e))
    } else {
        None
    }
}
