//! Parity-assisted measurement-based computation (l2-MBQC) of Boolean functions.
//!
//! The crate covers the whole path from a Boolean function to a verified
//! measurement schedule:
//!
//! - [`boolean`]: truth tables, ANF, Walsh-Hadamard spectra, NCHVM bounds.
//! - [`pfd`]: periodic Fourier decompositions via the Sierpinski system.
//! - [`qsp`]: quantum signal processing synthesis for symmetric functions.
//! - [`onequbit`]: the one-qubit-computation IR and its builders.
//! - [`mbqc`]: measurement schedules, compilers and named protocols.
//! - [`sim`]: dense and MPS engines, branch enumeration, effective circuits.
//! - [`cli`]: the `l2mbqc` command-line front end.
//!
//! Input bit `x_1` is the least significant bit of the integer index of an
//! input everywhere in the crate.

pub mod boolean;
pub mod cli;
mod dd;
pub mod error;
pub mod gates;
pub mod mbqc;
pub mod onequbit;
pub mod pfd;
pub mod qsp;
pub mod sim;

pub use error::{Error, Result};
