//! Numerical core for test-function (partition-of-unity) regularization and
//! the regulated QED triangle-loop integrals.
//!
//! The crate is `no_std` (with `alloc`); all IO, configuration parsing and the
//! command-line front end live in the companion `plateau-cli` crate.
//!
//! Layout:
//! - [`quad`]: Gauss-Legendre quadrature on intervals and composite panels.
//! - [`tensor`]: Euclidean 4-vectors and Levi-Civita contractions.
//! - [`testfn`]: mollifiers, plateau functions, partitions of unity and the
//!   radial momentum-space regulator.
//! - [`wilson`]: line integrals of classical gauge fields along parametrized
//!   paths, gauge-covariance and path-variation checks.
//! - [`mc`]: seeded, worker-partitioned Monte Carlo integration over 4-balls
//!   and 4-shells.
//! - [`triangle`]: the regulated triangle integrands, shell reduction and
//!   anomaly assembly.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod mc;
pub mod quad;
pub mod tensor;
pub mod testfn;
pub mod triangle;
pub mod wilson;

pub use tensor::Vec4;
