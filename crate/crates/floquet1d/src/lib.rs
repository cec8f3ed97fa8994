//! Scattering off a time-periodic zero-range potential in one dimension.
//!
//! The potential is `g0 δ(x) + g1 cos(ωt) δ(x)` acting on a particle of
//! reduced mass 1/2 (ħ = 1). A monochromatic incoming wave `e^{ipx}` is
//! scattered into sidebands with momenta `p_n = sqrt(p² + nω)`; the sideband
//! amplitudes follow from a complex tridiagonal linear system. On top of the
//! solver this crate provides analytic zero-transmission predictors, a
//! complex pole search on the determinant, and the bound-state overlap
//! machinery used to watch metastable states form and decay.
//!
//! All quantities are expressed in units where couplings scale as `√ω` and
//! momenta as `√ω`; nothing in the crate assumes `ω = 1`.

pub mod channels;
pub mod error;
pub mod quad;
pub mod resonance;
pub mod scatter;
pub mod tridiag;
pub mod wavepacket;

pub use channels::{channel_momentum, channel_set, Channel, ChannelSet, ScatteringParams};
pub use error::{Error, Result};
pub use scatter::{
    continued_fraction_oracle, converge_amplitudes, solve_amplitudes, static_amplitudes,
    AmplitudeSet, ConvergedAmplitudes,
};
pub use tridiag::{FloquetMatrix, ScaledDeterminant};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
