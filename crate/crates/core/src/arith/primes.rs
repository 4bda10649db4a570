//! Prime sieving and small multiplicative helpers.

/// All primes `<= limit`, by a segmented sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);
    let mut out: Vec<u64> = Vec::new();
    const SEGMENT: u64 = 1 << 16;
    let mut low = 2u64;
    let mut mark = vec![true; SEGMENT as usize];
    while low <= limit {
        let high = (low + SEGMENT - 1).min(limit);
        let len = (high - low + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = true);
        for &p in &base {
            if p * p > high {
                break;
            }
            let start = (low.div_ceil(p) * p).max(p * p);
            let mut j = start;
            while j <= high {
                mark[(j - low) as usize] = false;
                j += p;
            }
        }
        out.extend((0..len).filter(|&i| mark[i]).map(|i| low + i as u64));
        low = high + 1;
    }
    out
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&i| is[i]).map(|i| i as u64).collect()
}

/// Smallest-prime-factor table for `0..=n`.
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Number-of-divisors function `d(n)` for `n` in `0..=n_max` (`d(0) = 0`).
pub fn divisor_counts(n_max: usize) -> Vec<u32> {
    let mut d = vec![0u32; n_max + 1];
    for i in 1..=n_max {
        let mut j = i;
        while j <= n_max {
            d[j] += 1;
            j += i;
        }
    }
    d
}

/// If `n = p^r` with `p` prime and `r >= 1`, returns `(p, r)`.
pub fn as_prime_power(n: u64, spf: &[u32]) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = spf[n as usize] as u64;
    let mut m = n;
    let mut r = 0;
    while m.is_multiple_of(p) {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(2), vec![2]);
    }

    #[test]
    fn reciprocal_sum_to_ten() {
        let s: f64 = primes_up_to(10).iter().map(|&p| 1.0 / p as f64).sum();
        // 1/2 + 1/3 + 1/5 + 1/7 = 247/210
        assert!((s - 247.0 / 210.0).abs() < 1e-15);
        assert!((s - 1.176190).abs() < 1e-6);
    }

    #[test]
    fn segmented_matches_simple_sieve() {
        // crosses several segment boundaries
        let limit = 300_000;
        assert_eq!(primes_up_to(limit), simple_sieve(limit));
    }

    #[test]
    fn prime_count_million() {
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let sieve = simple_sieve(20_000);
        let mr: Vec<u64> = (0..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(998_244_353));
        assert!(!is_prime(998_244_353u64 * 3));
    }

    #[test]
    fn divisor_function() {
        let d = divisor_counts(12);
        assert_eq!(&d[1..], &[1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]);
    }

    #[test]
    fn prime_powers() {
        let spf = smallest_prime_factors(100);
        assert_eq!(as_prime_power(64, &spf), Some((2, 6)));
        assert_eq!(as_prime_power(49, &spf), Some((7, 2)));
        assert_eq!(as_prime_power(12, &spf), None);
        assert_eq!(as_prime_power(1, &spf), None);
    }
}
