//! Finite-precision Iwasawa theory for elliptic curves at supersingular
//! primes: `p`-adic scalars, the Iwasawa algebra, modular symbols,
//! Mazur–Tate elements and the signed `p`-adic L-series built from them.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod analyzer;
pub mod curve;
pub mod error;
pub mod lambda;
pub mod modsym;
pub mod module_model;
pub mod padic;
mod poly;
pub mod real;
pub mod signed;
pub mod theta;

pub use error::{Error, Result};
pub use lambda::{IwasawaContext, LambdaElement, Truncation};
pub use padic::{PadicScalar, Valuation};
