//! Exact integer convolution by number-theoretic transforms over several
//! 62-bit primes, recombined with Garner's algorithm.
//!
//! Arithmetic modulo each prime is done in Montgomery form with `R = 2^64`.

use super::primes::{is_prime, pow_mod};
use num_bigint::{BigInt, BigUint, Sign};
use std::sync::OnceLock;

/// Every prime in the pool is `c * 2^TWO_ADICITY + 1`, so transforms up to
/// length `2^TWO_ADICITY` are available.
pub const TWO_ADICITY: u32 = 26;
const POOL_SIZE: usize = 24;

#[derive(Debug, Clone, Copy)]
pub struct NttPrime {
    pub p: u64,
    neg_inv: u64,
    r2: u64,
    generator: u64,
}

impl NttPrime {
    fn new(p: u64) -> Self {
        let mut inv: u64 = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        NttPrime {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
            generator: primitive_root(p),
        }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    #[cfg(test)]
    fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    /// Reduce a signed machine integer.
    pub fn reduce_i64(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.p as i64);
        r as u64
    }

    /// Reduce an arbitrary-precision integer.
    pub fn reduce_big(&self, x: &BigInt) -> u64 {
        let (sign, digits) = x.to_u64_digits();
        let p = self.p as u128;
        let mut r: u128 = 0;
        for &d in digits.iter().rev() {
            r = ((r << 64) | d as u128) % p;
        }
        let r = r as u64;
        if sign == Sign::Minus && r != 0 {
            self.p - r
        } else {
            r
        }
    }

    /// Montgomery product without the final correction: for `a * b < p 2^64`
    /// the result lies in `[0, 2p)`.
    #[inline(always)]
    fn mul_lazy(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.neg_inv);
        ((t + m as u128 * self.p as u128) >> 64) as u64
    }

    /// Twiddles for every level, level `h` (half-length `h`) stored at
    /// `[h, 2h)`, in Montgomery form and fully reduced.
    fn twiddle_table(&self, n: usize, inverse: bool) -> Vec<u64> {
        let mut table = vec![0u64; n.max(2)];
        let mut h = 1;
        while h < n {
            let mut w = pow_mod(self.generator, (self.p - 1) / (2 * h) as u64, self.p);
            if inverse {
                w = pow_mod(w, self.p - 2, self.p);
            }
            let w = self.to_mont(w);
            let mut cur = self.to_mont(1);
            for j in 0..h {
                table[h + j] = cur;
                cur = self.mul(cur, w);
            }
            h <<= 1;
        }
        table
    }

    /// Decimation-in-frequency transform: natural order in, bit-reversed
    /// order out. Entries stay in `[0, 2p)`.
    fn forward(&self, a: &mut [u64], tw: &[u64]) {
        let n = a.len();
        let two_p = 2 * self.p;
        let mut h = n / 2;
        while h >= 1 {
            let w = &tw[h..2 * h];
            for chunk in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = chunk.split_at_mut(h);
                for ((x, y), &wj) in lo.iter_mut().zip(hi.iter_mut()).zip(w) {
                    let u = *x;
                    let v = *y;
                    let s = u + v;
                    *x = if s >= two_p { s - two_p } else { s };
                    *y = self.mul_lazy(u + two_p - v, wj);
                }
            }
            h /= 2;
        }
    }

    /// Decimation-in-time inverse (unscaled): bit-reversed in, natural out.
    fn backward(&self, a: &mut [u64], tw: &[u64]) {
        let n = a.len();
        let two_p = 2 * self.p;
        let mut h = 1;
        while h < n {
            let w = &tw[h..2 * h];
            for chunk in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = chunk.split_at_mut(h);
                for ((x, y), &wj) in lo.iter_mut().zip(hi.iter_mut()).zip(w) {
                    let u = *x;
                    let v = self.mul_lazy(*y, wj);
                    let s = u + v;
                    *x = if s >= two_p { s - two_p } else { s };
                    let d = u + two_p - v;
                    *y = if d >= two_p { d - two_p } else { d };
                }
            }
            h *= 2;
        }
    }

    /// Cyclic-free product of two residue vectors, truncated to `out_len`.
    /// Inputs and output are plain (non-Montgomery) residues.
    pub fn multiply(&self, a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
        if a.is_empty() || b.is_empty() || out_len == 0 {
            return vec![0; out_len];
        }
        let a = &a[..a.len().min(out_len)];
        let b = &b[..b.len().min(out_len)];
        let full = a.len() + b.len() - 1;
        let size = full.next_power_of_two();
        assert!(
            size <= 1usize << TWO_ADICITY,
            "convolution length {size} exceeds transform capacity"
        );
        let tw = self.twiddle_table(size, false);
        let load = |src: &[u64]| {
            let mut v = vec![0u64; size];
            for (dst, &x) in v.iter_mut().zip(src) {
                *dst = self.to_mont(x);
            }
            self.forward(&mut v, &tw);
            v
        };
        let mut fa = load(a);
        if std::ptr::eq(a, b) {
            for x in fa.iter_mut() {
                *x = self.mul_lazy(*x, *x);
            }
        } else {
            let fb = load(b);
            for (x, &y) in fa.iter_mut().zip(&fb) {
                *x = self.mul_lazy(*x, y);
            }
        }
        drop(tw);
        self.backward(&mut fa, &self.twiddle_table(size, true));
        // a plain (non-Montgomery) factor both leaves Montgomery form and
        // divides by the length
        let n_inv = pow_mod(size as u64 % self.p, self.p - 2, self.p);
        let keep = out_len.min(full);
        let mut out: Vec<u64> = fa[..keep].iter().map(|&x| self.mul(x, n_inv)).collect();
        out.resize(out_len, 0);
        out
    }

    pub fn square(&self, a: &[u64], out_len: usize) -> Vec<u64> {
        self.multiply(a, a, out_len)
    }
}

fn primitive_root(p: u64) -> u64 {
    let mut factors = vec![2u64];
    let mut c = (p - 1) >> TWO_ADICITY;
    let mut d = 3;
    while d * d <= c {
        if c.is_multiple_of(d) {
            factors.push(d);
            while c.is_multiple_of(d) {
                c /= d;
            }
        }
        d += 2;
    }
    if c > 1 && c != 2 {
        factors.push(c);
    }
    (2..)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("a prime always has a primitive root")
}

/// The fixed, deterministic pool of transform primes (largest first).
pub fn prime_pool() -> &'static [NttPrime] {
    static POOL: OnceLock<Vec<NttPrime>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::with_capacity(POOL_SIZE);
        let mut c: u64 = ((1u64 << 62) - 1) >> TWO_ADICITY;
        while out.len() < POOL_SIZE {
            let p = (c << TWO_ADICITY) + 1;
            if is_prime(p) {
                out.push(NttPrime::new(p));
            }
            c -= 1;
        }
        out
    })
}

/// Number of pool primes whose product exceeds `2^(bits + 1)`, i.e. enough to
/// recover any integer of absolute value below `2^bits`.
pub fn primes_for_bits(bits: u64) -> usize {
    let mut acc = 0.0f64;
    for (i, q) in prime_pool().iter().enumerate() {
        acc += (q.p as f64).log2();
        if acc > (bits + 2) as f64 {
            return i + 1;
        }
    }
    panic!("coefficient bound of {bits} bits exceeds the transform prime pool");
}

/// Garner recombination of residues into signed integers in `(-M/2, M/2]`.
pub struct Crt {
    primes: Vec<NttPrime>,
    /// `inv[i][j] = p_j^{-1} mod p_i` for `j < i`, in Montgomery form.
    inv: Vec<Vec<u64>>,
    /// Little-endian limbs of the modulus and of `floor(M/2)`.
    modulus: Vec<u64>,
    half: Vec<u64>,
}

fn limbs_mul_add(acc: &mut [u64], m: u64, c: u64) {
    let mut carry = c as u128;
    for limb in acc.iter_mut() {
        let t = *limb as u128 * m as u128 + carry;
        *limb = t as u64;
        carry = t >> 64;
    }
    debug_assert_eq!(carry, 0);
}

fn limbs_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

fn limbs_to_biguint(limbs: &[u64]) -> BigUint {
    let digits: Vec<u32> = limbs
        .iter()
        .flat_map(|&l| [l as u32, (l >> 32) as u32])
        .collect();
    BigUint::new(digits)
}

impl Crt {
    pub fn new(primes: &[NttPrime]) -> Self {
        let inv = primes
            .iter()
            .enumerate()
            .map(|(i, qi)| {
                (0..i)
                    .map(|j| qi.to_mont(pow_mod(primes[j].p % qi.p, qi.p - 2, qi.p)))
                    .collect()
            })
            .collect();
        let mut modulus = vec![0u64; primes.len() + 1];
        modulus[0] = 1;
        for q in primes {
            limbs_mul_add(&mut modulus, q.p, 0);
        }
        let mut half = modulus.clone();
        let mut carry = 0u64;
        for limb in half.iter_mut().rev() {
            let next = *limb & 1;
            *limb = (*limb >> 1) | (carry << 63);
            carry = next;
        }
        Crt {
            primes: primes.to_vec(),
            inv,
            modulus,
            half,
        }
    }

    pub fn modulus(&self) -> BigUint {
        limbs_to_biguint(&self.modulus)
    }

    pub fn combine(&self, residues: &[u64]) -> BigInt {
        let k = self.primes.len();
        let mut digits = [0u64; 32];
        for (i, q) in self.primes.iter().enumerate() {
            let mut x = residues[i] % q.p;
            for j in 0..i {
                let dj = if digits[j] >= q.p { digits[j] - q.p } else { digits[j] };
                let diff = if x >= dj { x - dj } else { x + q.p - dj };
                x = q.mul(diff, self.inv[i][j]);
            }
            digits[i] = x;
        }
        let mut acc = vec![0u64; k + 1];
        for i in (0..k).rev() {
            limbs_mul_add(&mut acc, self.primes[i].p, digits[i]);
        }
        if limbs_cmp(&acc, &self.half) == std::cmp::Ordering::Greater {
            let mut borrow = 0u64;
            for (a, &m) in acc.iter_mut().zip(&self.modulus) {
                let (d1, b1) = m.overflowing_sub(*a);
                let (d2, b2) = d1.overflowing_sub(borrow);
                *a = d2;
                borrow = (b1 || b2) as u64;
            }
            BigInt::from_biguint(Sign::Minus, limbs_to_biguint(&acc))
        } else {
            BigInt::from_biguint(Sign::Plus, limbs_to_biguint(&acc))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pool_is_prime_and_distinct() {
        let pool = prime_pool();
        assert_eq!(pool.len(), POOL_SIZE);
        for w in pool.windows(2) {
            assert!(w[0].p > w[1].p);
        }
        for q in pool {
            assert!(is_prime(q.p));
            assert!(q.p < 1 << 62);
            assert_eq!((q.p - 1) % (1 << TWO_ADICITY), 0);
            assert_ne!(pow_mod(q.generator, (q.p - 1) / 2, q.p), 1);
        }
    }

    #[test]
    fn montgomery_round_trip() {
        let q = prime_pool()[0];
        for x in [0u64, 1, 2, 12345, q.p - 1] {
            assert_eq!(q.from_mont(q.to_mont(x)), x);
        }
        let a = q.p - 3;
        let b = 987_654_321_123;
        let expect = ((a as u128 * b as u128) % q.p as u128) as u64;
        assert_eq!(q.from_mont(q.mul(q.to_mont(a), q.to_mont(b))), expect);
    }

    #[test]
    fn crt_recovers_negative_values() {
        let primes = &prime_pool()[..3];
        let crt = Crt::new(primes);
        let big: BigInt = BigInt::from(-7i64) * BigInt::from(u64::MAX) * BigInt::from(u64::MAX);
        let residues: Vec<u64> = primes.iter().map(|q| q.reduce_big(&big)).collect();
        assert_eq!(crt.combine(&residues), big);
    }

    fn naive(a: &[i64], b: &[i64], len: usize) -> Vec<i64> {
        let mut out = vec![0i64; len];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i + j < len {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn transform_product_matches_schoolbook(
            a in proptest::collection::vec(-1000i64..1000, 1..200),
            b in proptest::collection::vec(-1000i64..1000, 1..200),
        ) {
            let q = prime_pool()[1];
            let len = a.len() + b.len() - 1;
            let ra: Vec<u64> = a.iter().map(|&x| q.reduce_i64(x)).collect();
            let rb: Vec<u64> = b.iter().map(|&x| q.reduce_i64(x)).collect();
            let got = q.multiply(&ra, &rb, len);
            let want: Vec<u64> = naive(&a, &b, len).into_iter().map(|x| q.reduce_i64(x)).collect();
            prop_assert_eq!(got, want);
        }
    }
}
