//! Cospectral mates in the Johnson and Grassmann schemes.
//!
//! Builds generalized Johnson graphs `J_S(n,k)` and generalized Grassmann
//! graphs `J_{q,S}(n,k)`, validates and applies Godsil–McKay and
//! Wang–Qiu–Hu switching, decides cospectrality through characteristic
//! polynomials modulo random primes, and certifies non-isomorphism.

pub mod algebra;
pub mod error;

pub use error::{Error, Result};
pub mod graph;
pub mod schemes;
pub mod switching;
pub mod spectra;
pub mod certify;
pub mod families;
pub mod search;
