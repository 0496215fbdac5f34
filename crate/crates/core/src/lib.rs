//! Exact and p-adic arithmetic for the p-adic incomplete gamma function.
//!
//! The crate is organised bottom-up:
//!
//! - [`exact`]: rationals, valuations, digit sums and rigorous enclosures of `e^{1/r}`
//! - [`padic`]: fixed absolute precision p-adic integers with `exp_p` and `log_p`
//! - [`mahler`]: finite differences, Mahler series and regularity diagnostics
//! - [`mvalues`]: m-values, EGF algebra and the m-value continuity criterion
//! - [`combinat`]: brute-force counts in wreath products and symmetric groups
//! - [`gammap`]: the p-adic incomplete gamma function and its evaluation routes

pub mod combinat;
pub mod error;
pub mod exact;
pub mod gammap;
pub mod mahler;
pub mod mvalues;
pub mod padic;

pub use error::{Error, Result};
pub use exact::{Rational, RationalInterval};
pub use padic::{PadicContext, PadicInt};
