//! Frobenius powers, Frobenius and tight closure, syzygy-bundle instability
//! and Hilbert-Kunz colengths in Fermat rings `GF(p)[x,y,z]/(x^d + y^d - z^d)`.

pub mod certificate;
pub mod closure;
pub mod error;
pub mod gfp;
pub mod hk;
pub mod linalg;
pub mod parse;
pub mod ring;
pub mod scan;
pub mod semistability;
pub mod system;

pub use error::{Error, Result};
pub use ring::{NormalHomogPoly, NormalMonomial, RingContext};
