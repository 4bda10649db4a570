//! Level-1 eigenforms in one-dimensional cusp spaces.

use super::series::{reconstruct, IntegerSeries};
use crate::arith::ntt::{prime_pool, primes_for_bits, NttPrime};
use crate::arith::primes::{is_prime, smallest_prime_factors};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Guard bits added on top of the Deligne bound when sizing the CRT modulus.
const GUARD_BITS: u64 = 64;

/// `(a, b)` with `4a + 6b = k - 12`.
fn eisenstein_exponents(k: u32) -> Result<(u32, u32)> {
    match k {
        12 => Ok((0, 0)),
        16 => Ok((1, 0)),
        18 => Ok((0, 1)),
        20 => Ok((2, 0)),
        22 => Ok((1, 1)),
        26 => Ok((2, 1)),
        _ => Err(Error::UnsupportedWeight(k)),
    }
}

/// Root number of the L-function of a level-1 form of weight `k`.
pub fn root_number(k: u32) -> i32 {
    if (k / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `σ_{w-1}(n)` for `n <= len - 1`, exact.
fn divisor_power_sums(w: u32, len: usize) -> Vec<u128> {
    let mut s = vec![0u128; len];
    for d in 1..len {
        let dp = (d as u128).pow(w - 1);
        let mut m = d;
        while m < len {
            s[m] += dp;
            m += d;
        }
    }
    s
}

fn eisenstein_scale(w: u32) -> Result<i64> {
    match w {
        4 => Ok(240),
        6 => Ok(-504),
        _ => Err(Error::UnsupportedEisensteinWeight(w)),
    }
}

/// `E_4 = 1 + 240 Σ σ_3(n) q^n` or `E_6 = 1 - 504 Σ σ_5(n) q^n` to order `n`.
pub fn eisenstein(w: u32, n: usize) -> Result<IntegerSeries> {
    let scale = BigInt::from(eisenstein_scale(w)?);
    let sigma = divisor_power_sums(w, n + 1);
    let mut coeffs: Vec<BigInt> = sigma.iter().map(|&x| &scale * BigInt::from(x)).collect();
    coeffs[0] = BigInt::one();
    IntegerSeries::new(coeffs)
}

fn eisenstein_residues(q: &NttPrime, scale: i64, sigma: &[u128]) -> Vec<u64> {
    let sc = q.reduce_i64(scale) as u128;
    let p = q.p as u128;
    let mut out: Vec<u64> = sigma.iter().map(|&x| ((x % p) * sc % p) as u64).collect();
    out[0] = 1;
    out
}

/// `∏ (1 - q^m)` to `len` coefficients by the pentagonal number theorem.
#[cfg(test)]
fn eta_residues(q: &NttPrime, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    let minus_one = q.p - 1;
    let mut j: i64 = 0;
    loop {
        let g1 = (j * (3 * j - 1) / 2) as usize;
        if g1 >= len {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { minus_one };
        out[g1] = sign;
        if j > 0 {
            let g2 = (j * (3 * j + 1) / 2) as usize;
            if g2 < len {
                out[g2] = sign;
            }
        }
        j += 1;
    }
    out
}

/// `∏ (1 - q^m)^3 = Σ_{j≥0} (-1)^j (2j+1) q^{j(j+1)/2}` (Jacobi).
fn eta_cubed_residues(q: &NttPrime, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    let mut j: i64 = 0;
    loop {
        let e = (j * (j + 1) / 2) as usize;
        if e >= len {
            break;
        }
        let c = if j % 2 == 0 { 2 * j + 1 } else { -(2 * j + 1) };
        out[e] = q.reduce_i64(c);
        j += 1;
    }
    out
}

/// `∏ (1 - q^m)^24` to `len` coefficients as three squarings of η³.
fn eta24_residues(q: &NttPrime, len: usize) -> Vec<u64> {
    let e3 = eta_cubed_residues(q, len);
    let e6 = q.square(&e3, len);
    let e12 = q.square(&e6, len);
    q.square(&e12, len)
}

fn delta_residues(q: &NttPrime, order: usize) -> Vec<u64> {
    let p = eta24_residues(q, order);
    let mut out = Vec::with_capacity(order + 1);
    out.push(0);
    out.extend_from_slice(&p);
    out
}

/// Bits needed to hold `d(n) n^{(k-1)/2}` for all `n <= order`, using
/// `d(n) <= 2 sqrt(n)`.
fn deligne_bits(k: u32, order: usize) -> u64 {
    let n = order.max(2) as f64;
    let log2 = (2.0 * n.sqrt()).log2() + 0.5 * (k as f64 - 1.0) * n.log2();
    log2.ceil() as u64 + GUARD_BITS
}

fn cusp_form_series(k: u32, order: usize) -> Result<IntegerSeries> {
    if order == 0 {
        return Err(Error::EmptyTruncation);
    }
    let (a, b) = eisenstein_exponents(k)?;
    let len = order + 1;
    let s3 = (a > 0).then(|| divisor_power_sums(4, len));
    let s5 = (b > 0).then(|| divisor_power_sums(6, len));
    let primes = &prime_pool()[..primes_for_bits(deligne_bits(k, order))];
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|q| {
            let mut f = delta_residues(q, order);
            if let Some(s3) = &s3 {
                let e4 = eisenstein_residues(q, 240, s3);
                for _ in 0..a {
                    f = q.multiply(&f, &e4, len);
                }
            }
            if let Some(s5) = &s5 {
                let e6 = eisenstein_residues(q, -504, s5);
                for _ in 0..b {
                    f = q.multiply(&f, &e6, len);
                }
            }
            f
        })
        .collect();
    IntegerSeries::new(reconstruct(primes, &residues))
}

/// `Δ = q ∏ (1 - q^m)^24` to order `n`.
pub fn eta_pow24(n: usize) -> Result<IntegerSeries> {
    cusp_form_series(12, n)
}

#[derive(Debug, Clone)]
pub struct Eigenform {
    weight: u32,
    a: IntegerSeries,
    lambda: Vec<f64>,
}

impl Eigenform {
    /// The normalized eigenform of weight `k`, with coefficients to `n_max`.
    pub fn generate(k: u32, n_max: usize) -> Result<Self> {
        let a = cusp_form_series(k, n_max)?;
        Self::from_coefficients(k, a)
    }

    /// Wrap an exact coefficient table, running the full self-test.
    pub fn from_coefficients(k: u32, a: IntegerSeries) -> Result<Self> {
        eisenstein_exponents(k)?;
        if !a.coeff(0).is_zero() {
            return Err(Error::HeckeSelfTest(0));
        }
        if a.truncation_order() >= 1 && !a.coeff(1).is_one() {
            return Err(Error::HeckeSelfTest(1));
        }
        self_test(k, &a)?;
        let lambda = normalize(k, a.coeffs());
        Ok(Self {
            weight: k,
            a,
            lambda,
        })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u32 {
        1
    }

    pub fn n_max(&self) -> usize {
        self.a.truncation_order()
    }

    pub fn coefficients(&self) -> &IntegerSeries {
        &self.a
    }

    pub fn a(&self, n: usize) -> &BigInt {
        self.a.coeff(n)
    }

    /// `λ(0..=n_max)`, with `λ(0) = 0`.
    pub fn lambda_table(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    pub fn root_number(&self) -> i32 {
        root_number(self.weight)
    }

    /// Ensure coefficients are available up to `n`.
    pub fn require(&self, n: u64) -> Result<()> {
        if n as usize > self.n_max() {
            return Err(Error::InsufficientCoefficients {
                needed: n,
                available: self.n_max() as u64,
            });
        }
        Ok(())
    }

    /// Satake parameters at `p`: the roots of `X² - λ(p) X + 1`.
    pub fn local_params(&self, p: u64) -> Result<(Complex64, Complex64)> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        self.require(p)?;
        Ok(satake(self.lambda(p as usize)))
    }
}

pub(crate) fn satake(l: f64) -> (Complex64, Complex64) {
    let disc = l * l - 4.0;
    if disc <= 0.0 {
        let im = 0.5 * (-disc).sqrt();
        (Complex64::new(0.5 * l, im), Complex64::new(0.5 * l, -im))
    } else {
        let r = 0.5 * disc.sqrt();
        (Complex64::new(0.5 * l + r, 0.0), Complex64::new(0.5 * l - r, 0.0))
    }
}

/// `λ(n) = a(n) / n^{(k-1)/2}`, computed as `a(n) / n^{k/2-1} / sqrt(n)`.
fn normalize(k: u32, a: &[BigInt]) -> Vec<f64> {
    let e = (k / 2 - 1) as i32;
    a.par_iter()
        .enumerate()
        .with_min_len(4096)
        .map(|(n, c)| {
            if n == 0 {
                return 0.0;
            }
            let x = n as f64;
            c.to_f64().unwrap() / x.powi(e) / x.sqrt()
        })
        .collect()
}

/// Exact verification of the whole table: the Hecke recursion at every prime
/// power, and `a(n) = a(p^e) a(n / p^e)` at every other `n`.
fn self_test(k: u32, a: &IntegerSeries) -> Result<()> {
    let n_max = a.truncation_order();
    if n_max < 2 {
        return Ok(());
    }
    let spf = smallest_prime_factors(n_max);
    let coeffs = a.coeffs();
    // Hecke recursion along prime powers
    let primes: Vec<usize> = (2..=n_max).filter(|&n| spf[n] as usize == n).collect();
    primes.par_iter().try_for_each(|&p| {
        let pk = BigInt::from(p).pow(k - 1);
        let mut prev = BigInt::one();
        let mut cur_idx = p;
        while let Some(next_idx) = cur_idx.checked_mul(p).filter(|&m| m <= n_max) {
            let expect = &coeffs[p] * &coeffs[cur_idx] - &pk * &prev;
            if coeffs[next_idx] != expect {
                return Err(Error::HeckeSelfTest(next_idx as u64));
            }
            prev = coeffs[cur_idx].clone();
            cur_idx = next_idx;
        }
        Ok(())
    })?;
    // multiplicativity at composite non-prime-powers
    (2..n_max + 1)
        .into_par_iter()
        .with_min_len(4096)
        .try_for_each(|n| {
            let p = spf[n] as usize;
            let mut pe = p;
            while (n / pe).is_multiple_of(p) {
                pe *= p;
            }
            if pe == n {
                return Ok(());
            }
            if coeffs[n] != &coeffs[pe] * &coeffs[n / pe] {
                return Err(Error::HeckeSelfTest(n as u64));
            }
            Ok(())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_cube_matches_pentagonal_eta() {
        let q = prime_pool()[2];
        let len = 3000;
        let e1 = eta_residues(&q, len);
        let e3 = q.multiply(&q.square(&e1, len), &e1, len);
        assert_eq!(e3, eta_cubed_residues(&q, len));
    }

    #[test]
    fn delta_first_coefficients() {
        let d = eta_pow24(6).unwrap();
        let want: Vec<BigInt> = [0, 1, -24, 252, -1472, 4830, -6048].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(d.coeffs(), &want[..]);
        assert_eq!(eta_pow24(1).unwrap().coeffs(), &[BigInt::zero(), BigInt::one()]);
        assert!(matches!(eta_pow24(0), Err(Error::EmptyTruncation)));
    }

    #[test]
    fn eisenstein_leading_terms() {
        let e4 = eisenstein(4, 2).unwrap();
        assert_eq!(e4.coeffs(), &[BigInt::from(1), BigInt::from(240), BigInt::from(2160)]);
        let e6 = eisenstein(6, 1).unwrap();
        assert_eq!(e6.coeffs(), &[BigInt::from(1), BigInt::from(-504)]);
        assert_eq!(eisenstein(4, 0).unwrap().coeffs(), &[BigInt::from(1)]);
        assert!(matches!(eisenstein(8, 3), Err(Error::UnsupportedEisensteinWeight(8))));
    }

    #[test]
    fn weight_sixteen_second_coefficient() {
        let f = Eigenform::generate(16, 10).unwrap();
        assert_eq!(f.a(2), &BigInt::from(216));
    }

    #[test]
    fn delta_lambda_values() {
        let f = Eigenform::generate(12, 10).unwrap();
        assert!((f.lambda(2) - (-0.530_330_085_889_910_6)).abs() < 1e-15);
        assert_eq!(f.lambda(4), -0.71875);
        assert!((f.lambda(4) - (f.lambda(2).powi(2) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn unsupported_weights() {
        for k in [2, 10, 14, 24, 28] {
            assert!(matches!(Eigenform::generate(k, 10), Err(Error::UnsupportedWeight(_))));
        }
    }

    #[test]
    fn satake_pair_on_unit_circle() {
        let f = Eigenform::generate(12, 10).unwrap();
        let (a1, a2) = f.local_params(2).unwrap();
        assert!(((a1 + a2).re - f.lambda(2)).abs() < 1e-15);
        assert!((a1.norm() - 1.0).abs() < 1e-15);
        assert!(((a1 * a2) - 1.0).norm() < 1e-15);
        let (d1, d2) = satake(2.0);
        assert_eq!((d1, d2), (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)));
        assert!(matches!(f.local_params(4), Err(Error::NotPrime(4))));
        assert!(f.local_params(11).is_err());
    }

    #[test]
    fn self_test_rejects_corruption() {
        let f = Eigenform::generate(12, 50).unwrap();
        let mut c = f.coefficients().coeffs().to_vec();
        c[12] += 1;
        let bad = IntegerSeries::new(c).unwrap();
        assert!(matches!(Eigenform::from_coefficients(12, bad), Err(Error::HeckeSelfTest(12))));
    }

    #[test]
    fn root_numbers() {
        let signs: Vec<i32> = SUPPORTED_WEIGHTS.iter().map(|&k| root_number(k)).collect();
        assert_eq!(signs, vec![1, 1, -1, 1, -1, -1]);
    }
}
