//! Forward and inverse Born scattering series for scalar (Helmholtz) and
//! diffuse waves under `L²`-based Sobolev norms.
//!
//! The crate provides:
//!
//! * discrete `H^s` operators and norms on regular grids ([`sobolev`]),
//! * closed-form Green's functions and the special functions they need
//!   ([`greens`]),
//! * spherical-harmonic analysis on the measurement sphere and the spectral
//!   spherical Sobolev norm ([`sphere`]),
//! * every convergence / stability / approximation constant of the series
//!   theory, with sweep generators ([`bounds`]),
//! * discretized forward and inverse scattering series on small scenes,
//!   together with a direct Lippmann–Schwinger oracle ([`series`]),
//! * a 2D frequency-domain Helmholtz solver with absorbing layers exposing
//!   forward map, Jacobian action, and adjoint ([`helmholtz2d`]),
//! * Sobolev-gradient L-BFGS inversion experiments ([`invert`]).
//!
//! All floating point work is `f64`; complex samples use [`C64`].

pub mod bounds;
pub mod greens;
pub mod grid;
pub mod helmholtz2d;
pub mod invert;
pub mod io;
pub mod numeric;
pub mod series;
pub mod sobolev;
pub mod sphere;

pub use grid::{GridField, Scalar};
pub use sobolev::SobolevPair;

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Array shapes or grid metadata do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A linear system is singular or too ill-conditioned to trust.
    #[error("singular system: {what} (condition estimate {cond:.3e})")]
    Singular { what: String, cond: f64 },
    /// An iterative refinement or band-limit search did not converge.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// The combinatorial budget of the inverse series was exceeded.
    #[error("series budget exceeded: {0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Number of worker threads granted to embarrassingly parallel loops.
///
/// Reads `BORN_SOBOLEV_THREADS`; unset or unparsable values fall back to the
/// machine parallelism capped at 8. The value never changes numeric results,
/// only wall-clock time.
pub fn thread_cap() -> usize {
    if let Ok(v) = std::env::var("BORN_SOBOLEV_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}
