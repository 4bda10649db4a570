//! Integer arithmetic: sieves, primality and exact multimodular convolution.

pub mod ntt;
pub mod primes;
