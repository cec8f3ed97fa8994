//! Sideband amplitudes, flux bookkeeping, and truncation control.
//!
//! The coupled equations `2 p_n C_n = 2p δ_{n,0} - i g0 C_n - (i g1/2)(C_{n+1} + C_{n-1})`
//! are solved three ways: the tridiagonal matrix route (production path), a
//! closed form for the undriven `g1 = 0` case, and a two-sided
//! continued-fraction sweep kept as an independent cross-check.

use crate::channels::{channel_set, ChannelSet, ScatteringParams};
use crate::error::{Error, Result};
use crate::tridiag::FloquetMatrix;
use crate::C64;

/// Hard cap on the number of retained channels during auto-convergence.
pub const MAX_CHANNELS: usize = 1 << 14;

/// Solved sideband coefficients with per-channel flux-normalized
/// probabilities. Closed channels carry exactly zero probability so the
/// vectors stay rectangular for serialization.
#[derive(Debug, Clone)]
pub struct AmplitudeSet {
    params: ScatteringParams,
    channels: ChannelSet,
    /// Transmission-side coefficients `C_n`, indexed `k = n + n_max`.
    c: Vec<C64>,
    /// Reflection-side coefficients `B_n = C_n - δ_{n,0}`.
    b: Vec<C64>,
    /// `(p_n / p) |B_n|²` for open channels, `0` for closed.
    reflect_prob: Vec<f64>,
    /// `(p_n / p) |C_n|²` for open channels, `0` for closed.
    transmit_prob: Vec<f64>,
}

impl AmplitudeSet {
    fn from_coefficients(params: ScatteringParams, channels: ChannelSet, c: Vec<C64>) -> Self {
        let center = channels.index_of(0);
        let mut b = c.clone();
        b[center] -= 1.0;
        let reflect_prob = channels
            .iter()
            .zip(&b)
            .map(|(ch, bn)| {
                if ch.open {
                    ch.momentum.re / params.p * bn.norm_sqr()
                } else {
                    0.0
                }
            })
            .collect();
        let transmit_prob = channels
            .iter()
            .zip(&c)
            .map(|(ch, cn)| {
                if ch.open {
                    ch.momentum.re / params.p * cn.norm_sqr()
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            params,
            channels,
            c,
            b,
            reflect_prob,
            transmit_prob,
        }
    }

    pub fn params(&self) -> &ScatteringParams {
        &self.params
    }

    pub fn channels(&self) -> &ChannelSet {
        &self.channels
    }

    pub fn c(&self, n: i32) -> C64 {
        self.c[self.channels.index_of(n)]
    }

    pub fn b(&self, n: i32) -> C64 {
        self.b[self.channels.index_of(n)]
    }

    /// Reflection probability `|B_0|²` into the elastic channel.
    pub fn b0_squared(&self) -> f64 {
        self.b(0).norm_sqr()
    }

    pub fn reflection_probability(&self, n: i32) -> f64 {
        self.reflect_prob[self.channels.index_of(n)]
    }

    pub fn transmission_probability(&self, n: i32) -> f64 {
        self.transmit_prob[self.channels.index_of(n)]
    }

    pub fn reflection_probabilities(&self) -> &[f64] {
        &self.reflect_prob
    }

    pub fn transmission_probabilities(&self) -> &[f64] {
        &self.transmit_prob
    }

    /// `|Σ_open p_n |C_n|² - p Re C_0|`: exact zero in exact arithmetic.
    pub fn flux_residual(&self) -> f64 {
        let sum: f64 = self
            .channels
            .iter()
            .zip(&self.c)
            .filter(|(ch, _)| ch.open)
            .map(|(ch, cn)| ch.momentum.re * cn.norm_sqr())
            .sum();
        (sum - self.params.p * self.c[self.channels.index_of(0)].re).abs()
    }

    /// `|Σ_open p_n (|C_n|² + |B_n|²) - p|`: reflected plus transmitted flux
    /// against the incoming flux.
    pub fn unitarity_residual(&self) -> f64 {
        let total: f64 = self
            .reflect_prob
            .iter()
            .zip(&self.transmit_prob)
            .map(|(r, t)| r + t)
            .sum();
        (total - 1.0).abs() * self.params.p
    }
}

/// Solves the truncated coupling equations for `params`.
///
/// Dispatches to [`static_amplitudes`] when `g1 = 0`; otherwise solves
/// `M C = (4 p i / g1) e_center` through the tridiagonal elimination.
pub fn solve_amplitudes(params: &ScatteringParams) -> Result<AmplitudeSet> {
    if params.g1 == 0.0 {
        return static_amplitudes(params);
    }
    let channels = channel_set(params);
    let matrix = FloquetMatrix::assemble(params)?;
    let mut rhs = vec![C64::new(0.0, 0.0); params.dimension()];
    rhs[channels.index_of(0)] = C64::new(0.0, 4.0 * params.p / params.g1);
    let c = matrix.solve(&rhs)?;
    Ok(AmplitudeSet::from_coefficients(*params, channels, c))
}

/// Closed form for the undriven potential: `C_0 = 2p/(2p + i g0)`, all other
/// sidebands decoupled and empty.
pub fn static_amplitudes(params: &ScatteringParams) -> Result<AmplitudeSet> {
    if params.g1 != 0.0 {
        return Err(Error::InvalidParams(
            "static closed form requires g1 = 0".into(),
        ));
    }
    let channels = channel_set(params);
    let mut c = vec![C64::new(0.0, 0.0); params.dimension()];
    c[channels.index_of(0)] =
        2.0 * params.p / C64::new(2.0 * params.p, params.g0);
    Ok(AmplitudeSet::from_coefficients(*params, channels, c))
}

/// One row of the truncation-convergence history.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceLevel {
    pub n_max: usize,
    pub b0_squared: f64,
    /// `|Δ|B_0|²|` against the previous level; `None` on the first row.
    pub change: Option<f64>,
}

/// Result of [`converge_amplitudes`]: the converged solution plus the level
/// history for reporting.
#[derive(Debug, Clone)]
pub struct ConvergedAmplitudes {
    pub amplitudes: AmplitudeSet,
    pub n_max: usize,
    pub levels: Vec<ConvergenceLevel>,
}

/// Doubles `n_max` from `params.n_max` until `|B_0|²` moves by less than
/// `tol` between successive levels.
///
/// The undriven case returns immediately: its channels are decoupled and the
/// closed form is exact at any truncation. Fails once the doubling would
/// exceed [`MAX_CHANNELS`] retained channels.
pub fn converge_amplitudes(params: &ScatteringParams, tol: f64) -> Result<ConvergedAmplitudes> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol must be > 0, got {tol}")));
    }
    let mut current = solve_amplitudes(params)?;
    let mut levels = vec![ConvergenceLevel {
        n_max: params.n_max,
        b0_squared: current.b0_squared(),
        change: None,
    }];
    if params.g1 == 0.0 {
        return Ok(ConvergedAmplitudes {
            amplitudes: current,
            n_max: params.n_max,
            levels,
        });
    }
    let mut n_max = params.n_max;
    let mut last_change = f64::INFINITY;
    loop {
        let doubled = 2 * n_max;
        if 2 * doubled + 1 > MAX_CHANNELS {
            return Err(Error::TruncationNotConverged {
                reached: n_max,
                cap: MAX_CHANNELS,
                last_change,
            });
        }
        let next = solve_amplitudes(&params.with_n_max(doubled))?;
        last_change = (next.b0_squared() - current.b0_squared()).abs();
        levels.push(ConvergenceLevel {
            n_max: doubled,
            b0_squared: next.b0_squared(),
            change: Some(last_change),
        });
        current = next;
        n_max = doubled;
        if last_change < tol {
            return Ok(ConvergedAmplitudes {
                amplitudes: current,
                n_max,
                levels,
            });
        }
    }
}

/// Independent solution of the same truncated system by backward
/// continued-fraction ratios from both tails, with `C_0` fixed from the
/// central equation. Kept free of the elimination path so the two routes
/// cross-check each other.
pub fn continued_fraction_oracle(params: &ScatteringParams) -> Result<AmplitudeSet> {
    if params.g1 <= 0.0 {
        return Err(Error::InvalidParams(
            "continued-fraction solution requires g1 > 0".into(),
        ));
    }
    let channels = channel_set(params);
    let n_max = params.n_max as i32;
    let i_g0 = C64::new(0.0, params.g0);
    let i_g1_half = C64::new(0.0, 0.5 * params.g1);

    let ratio = |n: i32, inner: C64| -> Result<C64> {
        let denom = -(2.0 * channels.get(n).momentum + i_g0) - i_g1_half * inner;
        if denom.norm() == 0.0 {
            return Err(Error::ContinuedFractionBreakdown(n));
        }
        let r = i_g1_half / denom;
        if !(r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::ContinuedFractionBreakdown(n));
        }
        Ok(r)
    };

    // Upward tail: s_n = C_n / C_{n-1}, swept inward from s_{n_max+1} = 0.
    let mut up = vec![C64::new(0.0, 0.0); params.n_max + 1];
    let mut inner = C64::new(0.0, 0.0);
    for n in (1..=n_max).rev() {
        inner = ratio(n, inner)?;
        up[n as usize] = inner;
    }
    // Downward tail: t_n = C_n / C_{n+1}, swept inward from t_{-n_max-1} = 0.
    let mut down = vec![C64::new(0.0, 0.0); params.n_max + 1];
    inner = C64::new(0.0, 0.0);
    for n in -n_max..=-1 {
        inner = ratio(n, inner)?;
        down[(-n) as usize] = inner;
    }

    let denom = C64::new(2.0 * params.p, params.g0) + i_g1_half * (up[1] + down[1]);
    if denom.norm() == 0.0 {
        return Err(Error::ContinuedFractionBreakdown(0));
    }
    let c0 = 2.0 * params.p / denom;

    let mut c = vec![C64::new(0.0, 0.0); params.dimension()];
    c[channels.index_of(0)] = c0;
    let mut value = c0;
    for n in 1..=n_max {
        value *= up[n as usize];
        c[channels.index_of(n)] = value;
    }
    value = c0;
    for n in 1..=n_max {
        value *= down[n as usize];
        c[channels.index_of(-n)] = value;
    }
    Ok(AmplitudeSet::from_coefficients(*params, channels, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(g0: f64, g1: f64, omega: f64, p: f64, n_max: usize) -> ScatteringParams {
        ScatteringParams::new(g0, g1, omega, p, n_max).unwrap()
    }

    /// Amplitudes below this magnitude contribute nothing at double
    /// precision (their squares underflow), so relative comparison stops
    /// being meaningful.
    const NEGLIGIBLE: f64 = 1e-200;

    fn assert_rel_close(a: C64, b: C64, tol: f64, what: &str) {
        let scale = a.norm().max(b.norm());
        if scale < NEGLIGIBLE {
            return;
        }
        let rel = (a - b).norm() / scale;
        assert!(rel <= tol, "{what}: relative difference {rel:.3e}");
    }

    #[test]
    fn static_free_propagation() {
        let set = static_amplitudes(&params(0.0, 0.0, 1.0, 0.7, 2)).unwrap();
        assert_eq!(set.c(0), C64::new(1.0, 0.0));
        assert_eq!(set.b(0), C64::new(0.0, 0.0));
        assert_eq!(set.b0_squared(), 0.0);
    }

    #[test]
    fn static_reflection_closed_form() {
        let set = static_amplitudes(&params(-1.0, 0.0, 1.0, 0.5, 2)).unwrap();
        assert!((set.b0_squared() - 0.5).abs() < 1e-15);
        assert!((set.c(0).norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn static_high_energy_transparency() {
        let set = static_amplitudes(&params(-1.0, 0.0, 1.0, 1e6, 1)).unwrap();
        assert!(set.b0_squared() < 1e-10);
    }

    #[test]
    fn static_rejects_driven_coupling() {
        assert!(static_amplitudes(&params(-1.0, 0.3, 1.0, 0.5, 2)).is_err());
    }

    #[test]
    fn solve_dispatches_to_static_form() {
        let pr = params(-1.0, 0.0, 1.0, 0.5, 3);
        let set = solve_amplitudes(&pr).unwrap();
        let expected = 1.0 / (1.0 + 4.0 * 0.25);
        assert!((set.b0_squared() - expected).abs() < 1e-15);
        for n in 1..=3 {
            assert_eq!(set.c(n), C64::new(0.0, 0.0));
            assert_eq!(set.c(-n), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn flux_identity_holds_at_reference_point() {
        let set = solve_amplitudes(&params(-1.0, 0.4, 1.0, 0.6, 32)).unwrap();
        assert!(set.flux_residual() < 1e-12);
        assert!(set.unitarity_residual() < 1e-12);
    }

    #[test]
    fn reflection_probability_is_b0_squared_for_elastic_channel() {
        let set = solve_amplitudes(&params(-1.0, 0.4, 1.0, 0.6, 16)).unwrap();
        assert!((set.reflection_probability(0) - set.b0_squared()).abs() < 1e-15);
        // Closed channels report exactly zero probability.
        assert_eq!(set.reflection_probability(-5), 0.0);
        assert_eq!(set.transmission_probability(-5), 0.0);
    }

    #[test]
    fn oracle_matches_matrix_solution() {
        for (g0, g1, p) in [
            (-1.0, 0.4, 0.6),
            (0.0, 1.5, 0.3),
            (1.0, 2.5, 1.3),
            (-2.0, 4.9, 0.05),
        ] {
            let pr = params(g0, g1, 1.0, p, 32);
            let solved = solve_amplitudes(&pr).unwrap();
            let oracle = continued_fraction_oracle(&pr).unwrap();
            for n in -(pr.n_max as i32)..=(pr.n_max as i32) {
                assert_rel_close(
                    solved.c(n),
                    oracle.c(n),
                    1e-10,
                    &format!("C_{n} at g0={g0}, g1={g1}, p={p}"),
                );
            }
        }
    }

    #[test]
    fn oracle_approaches_static_limit() {
        let driven = continued_fraction_oracle(&params(-1.0, 1e-6, 1.0, 0.5, 16)).unwrap();
        let fixed = static_amplitudes(&params(-1.0, 0.0, 1.0, 0.5, 16)).unwrap();
        assert!((driven.c(0) - fixed.c(0)).norm() < 1e-6);
    }

    #[test]
    fn tail_ratio_follows_inverse_sqrt_scaling() {
        // Asymptotically |C_{n+1}/C_n| -> g1 / (4 p_{n+1}).
        let pr = params(-1.0, 0.4, 1.0, 0.6, 24);
        let set = solve_amplitudes(&pr).unwrap();
        for n in 14..22 {
            let r = (set.c(n + 1) / set.c(n)).norm();
            let expected = pr.g1 / (4.0 * set.channels().get(n + 1).momentum.re);
            assert!(
                (r / expected - 1.0).abs() < 0.2,
                "n = {n}: ratio {r:.3e}, expected {expected:.3e}"
            );
        }
    }

    #[test]
    fn convergence_reaches_small_truncation() {
        let out = converge_amplitudes(&params(-1.0, 0.4, 1.0, 0.6, 2), 1e-10).unwrap();
        assert!(out.n_max <= 16, "converged n_max = {}", out.n_max);
        assert!(out.levels.last().unwrap().change.unwrap() < 1e-10);
    }

    #[test]
    fn convergence_static_returns_initial_level() {
        let out = converge_amplitudes(&params(-1.0, 0.0, 1.0, 0.6, 8), 1e-10).unwrap();
        assert_eq!(out.n_max, 8);
        assert_eq!(out.levels.len(), 1);
        assert!(out.levels[0].change.is_none());
    }

    #[test]
    fn convergence_strong_drive_is_stable_under_doubling() {
        let out = converge_amplitudes(&params(0.0, 4.5, 1.0, 0.6, 8), 1e-10).unwrap();
        let again = solve_amplitudes(&params(0.0, 4.5, 1.0, 0.6, 2 * out.n_max)).unwrap();
        assert!((again.b0_squared() - out.amplitudes.b0_squared()).abs() < 1e-10);
    }

    #[test]
    fn convergence_rejects_bad_tolerance() {
        assert!(converge_amplitudes(&params(0.0, 1.0, 1.0, 0.5, 2), 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn randomized_invariants(
            g0_scaled in -2.0..2.0f64,
            g1_scaled in 1e-3..5.0f64,
            p_scaled in 1e-3..2.0f64,
            omega in 0.25..4.0f64,
        ) {
            let root = omega.sqrt();
            let pr = params(g0_scaled * root, g1_scaled * root, omega, p_scaled * root, 32);
            let set = solve_amplitudes(&pr).unwrap();

            // Flux identity and unitarity, both scaled by the incoming momentum.
            prop_assert!(set.flux_residual() <= 1e-10 * pr.p);
            prop_assert!(set.unitarity_residual() <= 1e-10 * pr.p);

            // Elastic reflection stays a probability.
            let b0 = set.b0_squared();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&b0));

            // Route equivalence against the continued-fraction sweep.
            let oracle = continued_fraction_oracle(&pr).unwrap();
            for n in -(pr.n_max as i32)..=(pr.n_max as i32) {
                let a = set.c(n);
                let b = oracle.c(n);
                let scale = a.norm().max(b.norm());
                if scale >= NEGLIGIBLE {
                    prop_assert!((a - b).norm() / scale <= 1e-10);
                }
            }
        }

        #[test]
        fn static_limit_continuity(
            g0_scaled in -2.0..2.0f64,
            p_scaled in 0.05..2.0f64,
        ) {
            let pr = params(g0_scaled, 1e-6, 1.0, p_scaled, 16);
            let driven = solve_amplitudes(&pr).unwrap();
            let g0 = pr.g0;
            let expected = g0 * g0 / (g0 * g0 + 4.0 * pr.p * pr.p);
            prop_assert!((driven.b0_squared() - expected).abs() < 1e-5);
        }
    }
}
