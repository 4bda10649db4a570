//! Exact q-expansions of level-1 eigenforms and their normalized
//! coefficients.

mod cache;
mod eigenform;
mod series;

pub use cache::{cache_load, cache_store, write_lambda_csv};
pub use eigenform::{eisenstein, eta_pow24, root_number, Eigenform, SUPPORTED_WEIGHTS};
pub use series::{series_mul, IntegerSeries};
