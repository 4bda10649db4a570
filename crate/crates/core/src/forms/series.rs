//! Truncated power series with exact integer coefficients.

use crate::arith::ntt::{prime_pool, primes_for_bits, Crt, NttPrime};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

/// Below this length the schoolbook product beats the transform pipeline.
const SCHOOLBOOK_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSeries {
    coeffs: Vec<BigInt>,
}

impl IntegerSeries {
    /// Coefficients of `q^0 .. q^N`; at least one entry is required.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyTruncation);
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Truncate to a smaller order; larger orders are not invented.
    pub fn truncated(&self, order: usize) -> Self {
        let n = order.min(self.truncation_order());
        Self {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

/// Cauchy product truncated at the smaller of the two orders.
pub fn series_mul(a: &IntegerSeries, b: &IntegerSeries) -> IntegerSeries {
    let order = a.truncation_order().min(b.truncation_order());
    let len = order + 1;
    if len <= SCHOOLBOOK_LIMIT {
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in a.coeffs[..len].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs[..len - i].iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return IntegerSeries { coeffs: out };
    }
    // |c_n| <= len * max|a| * max|b|
    let bits = a.max_bits() + b.max_bits() + (usize::BITS - len.leading_zeros()) as u64;
    let primes = &prime_pool()[..primes_for_bits(bits)];
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|q| {
            let ra: Vec<u64> = a.coeffs[..len].iter().map(|c| q.reduce_big(c)).collect();
            let rb: Vec<u64> = b.coeffs[..len].iter().map(|c| q.reduce_big(c)).collect();
            q.multiply(&ra, &rb, len)
        })
        .collect();
    IntegerSeries {
        coeffs: reconstruct(primes, &residues),
    }
}

/// CRT-combine per-prime residue vectors of equal length.
pub(crate) fn reconstruct(primes: &[NttPrime], residues: &[Vec<u64>]) -> Vec<BigInt> {
    let crt = Crt::new(primes);
    let len = residues[0].len();
    (0..len)
        .into_par_iter()
        .with_min_len(4096)
        .map(|n| {
            let r: Vec<u64> = residues.iter().map(|v| v[n]).collect();
            crt.combine(&r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn difference_of_squares() {
        let a = IntegerSeries::from_i64(&[1, 1, 0]).unwrap();
        let b = IntegerSeries::from_i64(&[1, -1, 0]).unwrap();
        assert_eq!(series_mul(&a, &b), IntegerSeries::from_i64(&[1, 0, -1]).unwrap());
    }

    #[test]
    fn unit_is_identity() {
        let a = IntegerSeries::from_i64(&[3, -7, 11, 0, 5]).unwrap();
        let one = IntegerSeries::from_i64(&[1, 0, 0, 0, 0]).unwrap();
        assert_eq!(series_mul(&a, &one), a);
    }

    #[test]
    fn uses_smaller_order() {
        let a = IntegerSeries::from_i64(&[1, 2, 3, 4]).unwrap();
        let b = IntegerSeries::from_i64(&[1, 1]).unwrap();
        assert_eq!(series_mul(&a, &b).coeffs(), IntegerSeries::from_i64(&[1, 3]).unwrap().coeffs());
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(IntegerSeries::new(vec![]), Err(Error::EmptyTruncation)));
    }

    fn schoolbook(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); len];
        for i in 0..len {
            for j in 0..len - i {
                out[i + j] += &a[i] * &b[j];
            }
        }
        out
    }

    proptest! {
        #[test]
        fn transform_path_is_exact(
            a in proptest::collection::vec(any::<i64>(), 65..300),
            b in proptest::collection::vec(any::<i64>(), 65..300),
            scale in 0u32..200,
        ) {
            let big = BigInt::from(3).pow(scale);
            let a: Vec<BigInt> = a.into_iter().map(|x| BigInt::from(x) * &big).collect();
            let b: Vec<BigInt> = b.into_iter().map(BigInt::from).collect();
            let sa = IntegerSeries::new(a.clone()).unwrap();
            let sb = IntegerSeries::new(b.clone()).unwrap();
            let len = a.len().min(b.len());
            prop_assert_eq!(series_mul(&sa, &sb).into_coeffs(), schoolbook(&a, &b, len));
        }
    }
}
