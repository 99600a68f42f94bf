//! Small integer helpers shared by the group and field code.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of `n` in increasing order, or `None` unless `n` is odd and squarefree.
pub fn factor_squarefree_odd(n: u64) -> Option<Vec<u64>> {
    if n == 0 || n.is_multiple_of(2) {
        return None;
    }
    let mut primes = Vec::new();
    let mut rest = n;
    let mut d = 3;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            rest /= d;
            if rest.is_multiple_of(d) {
                return None;
            }
            primes.push(d);
        }
        d += 2;
    }
    if rest > 1 {
        primes.push(rest);
    }
    Some(primes)
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// `-x mod m` for `x < m`.
pub fn neg_mod(x: u64, m: u64) -> u64 {
    (m - x % m) % m
}
