//! Explicit automorphic-form computations over Q and real quadratic fields:
//! ideal arithmetic, Hecke characters, Whittaker functions, Kloosterman sums,
//! Eisenstein local data, Kuznetsov transforms and shifted convolution sums.

pub mod characters;
pub mod eisenstein;
pub mod error;
pub mod exec;
pub mod kloosterman;
pub mod nf;
pub mod shifted_conv;
pub mod special;
pub mod spectral;
pub mod whittaker;

pub use error::{Error, Result};
pub use exec::Exec;
