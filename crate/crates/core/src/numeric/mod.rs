//! Shared numeric kernels: small dense DFTs, Gauss–Legendre rules, dense and
//! banded complex LU factorizations, power iteration, and a scoped-thread
//! parallel map.

pub mod dft;
pub mod linalg;
pub mod par;
pub mod quad;
