//! Error-free-transformation summation.
//!
//! `Accumulator` keeps a (sum, correction) pair updated with Knuth's TwoSum,
//! so the rounding error of every addition is captured exactly in the
//! correction term. Merging two accumulators is itself compensated, which is
//! what the chunked prefix sums rely on.

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    hi: f64,
    lo: f64,
}

impl Accumulator {
    pub const fn new() -> Self {
        Self { hi: 0.0, lo: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        self.hi = s;
        self.lo += e;
    }

    #[inline]
    pub fn merge(&mut self, other: &Accumulator) {
        let (s, e) = two_sum(self.hi, other.hi);
        self.hi = s;
        self.lo += e + other.lo;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice or iterator of reals.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Accumulator>().value()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexAccumulator {
    re: Accumulator,
    im: Accumulator,
}

impl ComplexAccumulator {
    pub const fn new() -> Self {
        Self {
            re: Accumulator::new(),
            im: Accumulator::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn merge(&mut self, other: &ComplexAccumulator) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn re(&self) -> &Accumulator {
        &self.re
    }
}

impl FromIterator<Complex64> for ComplexAccumulator {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexAccumulator::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

pub fn complex_sum<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    iter.into_iter().collect::<ComplexAccumulator>().value()
}

/// Fixed chunk length of the parallel prefix sums. Changing it changes the
/// rounding of every prefix value, so it is part of the output contract.
pub const PREFIX_CHUNK: usize = 4096;

/// Compensated inclusive prefix sums, computed chunk-parallel.
///
/// Within a chunk the terms are accumulated left to right; chunk totals are
/// then folded sequentially, so the result does not depend on thread count.
/// `prefix_value` reproduces any single entry with the same arithmetic.
pub fn prefix_sums(terms: &[f64]) -> Vec<f64> {
    use rayon::prelude::*;
    let locals: Vec<Vec<Accumulator>> = terms
        .par_chunks(PREFIX_CHUNK)
        .map(|chunk| {
            let mut acc = Accumulator::new();
            chunk
                .iter()
                .map(|&x| {
                    acc.add(x);
                    acc
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(terms.len());
    let mut offset = Accumulator::new();
    for local in &locals {
        for partial in local {
            let mut v = offset;
            v.merge(partial);
            out.push(v.value());
        }
        if let Some(last) = local.last() {
            offset.merge(last);
        }
    }
    out
}

/// Single prefix entry `terms[0] + ... + terms[len-1]` with exactly the
/// arithmetic of [`prefix_sums`].
pub fn prefix_value(terms: &[f64], len: usize) -> f64 {
    if len == 0 {
        return 0.0;
    }
    let mut offset = Accumulator::new();
    let full = (len - 1) / PREFIX_CHUNK;
    for chunk in terms[..full * PREFIX_CHUNK].chunks(PREFIX_CHUNK) {
        let total: Accumulator = chunk.iter().copied().collect();
        offset.merge(&total);
    }
    let local: Accumulator = terms[full * PREFIX_CHUNK..len].iter().copied().collect();
    offset.merge(&local);
    offset.value()
}

/// Complex analogue of [`prefix_sums`].
pub fn complex_prefix_sums(terms: &[Complex64]) -> Vec<Complex64> {
    use rayon::prelude::*;
    let locals: Vec<Vec<ComplexAccumulator>> = terms
        .par_chunks(PREFIX_CHUNK)
        .map(|chunk| {
            let mut acc = ComplexAccumulator::new();
            chunk
                .iter()
                .map(|&z| {
                    acc.add(z);
                    acc
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(terms.len());
    let mut offset = ComplexAccumulator::new();
    for local in &locals {
        for partial in local {
            let mut v = offset;
            v.merge(partial);
            out.push(v.value());
        }
        if let Some(last) = local.last() {
            offset.merge(last);
        }
    }
    out
}

pub fn complex_prefix_value(terms: &[Complex64], len: usize) -> Complex64 {
    if len == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut offset = ComplexAccumulator::new();
    let full = (len - 1) / PREFIX_CHUNK;
    for chunk in terms[..full * PREFIX_CHUNK].chunks(PREFIX_CHUNK) {
        let total: ComplexAccumulator = chunk.iter().copied().collect();
        offset.merge(&total);
    }
    let local: ComplexAccumulator = terms[full * PREFIX_CHUNK..len].iter().copied().collect();
    offset.merge(&local);
    offset.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(terms), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn empty_prefix_is_zero() {
        assert_eq!(prefix_value(&[], 0), 0.0);
        assert!(prefix_sums(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn prefix_table_matches_single_entry(
            terms in proptest::collection::vec(-300.0f64..300.0, 1..20_000),
            pick in 0usize..20_000,
        ) {
            let table = prefix_sums(&terms);
            let len = 1 + pick % terms.len();
            prop_assert_eq!(table[len - 1].to_bits(), prefix_value(&terms, len).to_bits());
        }

        #[test]
        fn complex_prefix_matches_single_entry(
            re in proptest::collection::vec(-10.0f64..10.0, 1..10_000),
            pick in 0usize..10_000,
        ) {
            let terms: Vec<Complex64> = re.iter().map(|&x| Complex64::new(x, 0.5 * x - 1.0)).collect();
            let table = complex_prefix_sums(&terms);
            let len = 1 + pick % terms.len();
            prop_assert_eq!(table[len - 1], complex_prefix_value(&terms, len));
        }
    }
}
