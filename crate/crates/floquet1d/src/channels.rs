//! Physical parameters and the sideband channel structure.
//!
//! A drive of angular frequency `ω` couples the incoming wave of momentum
//! `p` to sidebands with energies `p² + nω`. Open channels (`p² + nω ≥ 0`)
//! carry real momenta and outgoing flux; closed channels are evanescent with
//! purely imaginary momenta on the positive imaginary axis, so `e^{i p_n x}`
//! decays away from the scatterer.

use crate::error::{Error, Result};
use crate::C64;

/// Couplings, drive frequency, incoming momentum, and truncation order.
///
/// Units fix ħ = 1 and reduced mass 1/2, so momenta and couplings both carry
/// `√ω` scale and energies carry `ω` scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringParams {
    /// Static coupling; negative values bind a state at energy `-g0²/4`.
    pub g0: f64,
    /// Drive coupling, `g1 ≥ 0`.
    pub g1: f64,
    /// Drive angular frequency, `ω > 0`.
    pub omega: f64,
    /// Incoming momentum, `p > 0`.
    pub p: f64,
    /// Truncation order: sidebands `n = -n_max ..= n_max` are retained.
    pub n_max: usize,
}

impl ScatteringParams {
    pub fn new(g0: f64, g1: f64, omega: f64, p: f64, n_max: usize) -> Result<Self> {
        if !(g0.is_finite() && g1.is_finite() && omega.is_finite() && p.is_finite()) {
            return Err(Error::InvalidParams(
                "all parameters must be finite".into(),
            ));
        }
        if g1 < 0.0 {
            return Err(Error::InvalidParams(format!("g1 must be >= 0, got {g1}")));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if p <= 0.0 {
            return Err(Error::InvalidParams(format!("p must be > 0, got {p}")));
        }
        if n_max < 1 {
            return Err(Error::InvalidParams("n_max must be >= 1".into()));
        }
        Ok(Self {
            g0,
            g1,
            omega,
            p,
            n_max,
        })
    }

    pub fn sqrt_omega(&self) -> f64 {
        self.omega.sqrt()
    }

    /// Same parameters at a different truncation order.
    pub fn with_n_max(&self, n_max: usize) -> Self {
        Self { n_max, ..*self }
    }

    /// Same parameters at a different incoming momentum.
    pub fn with_momentum(&self, p: f64) -> Result<Self> {
        Self::new(self.g0, self.g1, self.omega, p, self.n_max)
    }

    /// Matrix dimension `d = 2 n_max + 1`.
    pub fn dimension(&self) -> usize {
        2 * self.n_max + 1
    }
}

/// One sideband: index, complex momentum, energy, and open/closed flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub n: i32,
    /// `sqrt(p² + nω)`: real non-negative when open, `i·|p_n|` when closed.
    pub momentum: C64,
    /// `p² + nω`, always real.
    pub energy: f64,
    pub open: bool,
}

/// Momentum of sideband `n` with the branch fixed by normalizability.
///
/// Exact thresholds `p² + nω = 0` classify as open with zero momentum; the
/// flux weight vanishes there so no downstream division occurs.
pub fn channel_momentum(params: &ScatteringParams, n: i32) -> Channel {
    let energy = params.p * params.p + n as f64 * params.omega;
    if energy >= 0.0 {
        Channel {
            n,
            momentum: C64::new(energy.sqrt(), 0.0),
            energy,
            open: true,
        }
    } else {
        Channel {
            n,
            momentum: C64::new(0.0, (-energy).sqrt()),
            energy,
            open: false,
        }
    }
}

/// Ordered channels `n = -n_max ..= n_max` with index `k = n + n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    channels: Vec<Channel>,
    n_max: usize,
}

pub fn channel_set(params: &ScatteringParams) -> ChannelSet {
    let n_max = params.n_max as i32;
    let channels = (-n_max..=n_max)
        .map(|n| channel_momentum(params, n))
        .collect();
    ChannelSet {
        channels,
        n_max: params.n_max,
    }
}

impl ChannelSet {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Storage index of sideband `n` (0-based; the 1-based matrix convention
    /// is `k = n + 1 + n_max`).
    pub fn index_of(&self, n: i32) -> usize {
        (n + self.n_max as i32) as usize
    }

    pub fn get(&self, n: i32) -> &Channel {
        &self.channels[self.index_of(n)]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Channel> {
        self.channels.iter()
    }

    pub fn open_channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels.iter().filter(|c| c.open)
    }

    pub fn closed_channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels.iter().filter(|c| !c.open)
    }
}

impl<'a> IntoIterator for &'a ChannelSet {
    type Item = &'a Channel;
    type IntoIter = std::slice::Iter<'a, Channel>;

    fn into_iter(self) -> Self::IntoIter {
        self.channels.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(g0: f64, g1: f64, omega: f64, p: f64, n_max: usize) -> ScatteringParams {
        ScatteringParams::new(g0, g1, omega, p, n_max).unwrap()
    }

    #[test]
    fn zeroth_channel_is_the_incoming_momentum() {
        let pr = params(-1.0, 0.5, 1.0, 0.5, 4);
        let ch = channel_momentum(&pr, 0);
        assert_eq!(ch.momentum, C64::new(0.5, 0.0));
        assert!(ch.open);
    }

    #[test]
    fn first_sideband_momentum() {
        let pr = params(-1.0, 0.5, 1.0, 0.5, 4);
        let ch = channel_momentum(&pr, 1);
        assert!((ch.momentum.re - 1.25_f64.sqrt()).abs() < 1e-15);
        assert_eq!(ch.momentum.im, 0.0);
        assert!(ch.open);
    }

    #[test]
    fn closed_channel_sits_on_positive_imaginary_axis() {
        let pr = params(-1.0, 0.5, 1.0, 0.5, 4);
        let ch = channel_momentum(&pr, -1);
        assert_eq!(ch.momentum.re, 0.0);
        assert!((ch.momentum.im - 0.75_f64.sqrt()).abs() < 1e-15);
        assert!(!ch.open);
    }

    #[test]
    fn exact_threshold_is_open_with_zero_momentum() {
        let pr = params(0.0, 0.5, 1.0, 1.0, 2);
        let ch = channel_momentum(&pr, -1);
        assert!(ch.open);
        assert_eq!(ch.momentum, C64::new(0.0, 0.0));
    }

    #[test]
    fn set_has_expected_length_and_order() {
        let pr = params(0.0, 0.5, 1.0, 0.5, 1);
        let set = channel_set(&pr);
        assert_eq!(set.len(), 3);
        let ns: Vec<i32> = set.iter().map(|c| c.n).collect();
        assert_eq!(ns, vec![-1, 0, 1]);
        assert_eq!(set.index_of(0), 1);
    }

    #[test]
    fn closed_channels_for_sub_band_momentum() {
        let pr = params(0.0, 0.5, 1.0, 0.9, 2);
        let set = channel_set(&pr);
        let closed: Vec<i32> = set.closed_channels().map(|c| c.n).collect();
        assert_eq!(closed, vec![-2, -1]);
    }

    #[test]
    fn open_channels_for_small_momentum() {
        let pr = params(0.0, 0.5, 1.0, 0.5, 3);
        let set = channel_set(&pr);
        let open: Vec<i32> = set.open_channels().map(|c| c.n).collect();
        assert_eq!(open, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ScatteringParams::new(0.0, -0.1, 1.0, 0.5, 1).is_err());
        assert!(ScatteringParams::new(0.0, 0.1, 0.0, 0.5, 1).is_err());
        assert!(ScatteringParams::new(0.0, 0.1, 1.0, -0.5, 1).is_err());
        assert!(ScatteringParams::new(0.0, 0.1, 1.0, 0.5, 0).is_err());
        assert!(ScatteringParams::new(f64::NAN, 0.1, 1.0, 0.5, 1).is_err());
    }

    proptest! {
        #[test]
        fn momentum_squares_back_to_energy(
            g0 in -2.0..2.0f64,
            g1 in 1e-6..5.0f64,
            omega in 0.1..10.0f64,
            p_scale in 1e-3..2.0f64,
            n in -8i32..8,
        ) {
            let p = p_scale * omega.sqrt();
            let pr = params(g0, g1, omega, p, 8);
            let ch = channel_momentum(&pr, n);
            let sq = ch.momentum * ch.momentum;
            prop_assert!((sq.re - ch.energy).abs() <= 1e-12 * ch.energy.abs().max(1.0));
            prop_assert!(sq.im.abs() <= 1e-12 * ch.energy.abs().max(1.0));
        }

        #[test]
        fn open_momenta_increase_with_n(
            omega in 0.1..10.0f64,
            p_scale in 1e-3..2.0f64,
        ) {
            let p = p_scale * omega.sqrt();
            let pr = params(0.0, 1.0, omega, p, 6);
            let set = channel_set(&pr);
            let mut prev: Option<f64> = None;
            for ch in set.open_channels() {
                if let Some(q) = prev {
                    prop_assert!(ch.momentum.re > q);
                }
                prev = Some(ch.momentum.re);
            }
        }

        #[test]
        fn closed_channels_decay_for_positive_x(
            omega in 0.1..10.0f64,
            p_scale in 1e-3..0.99f64,
            x in 1e-3..50.0f64,
        ) {
            let p = p_scale * omega.sqrt();
            let pr = params(0.0, 1.0, omega, p, 6);
            for ch in channel_set(&pr).closed_channels() {
                let wave = (C64::new(0.0, 1.0) * ch.momentum * x).exp();
                prop_assert!(wave.norm() < 1.0);
            }
        }
    }
}
