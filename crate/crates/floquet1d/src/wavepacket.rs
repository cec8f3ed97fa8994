//! Wave-packet overlap with the static bound state and decay-rate fits.
//!
//! A Gaussian packet confined to the first Floquet band is scattered off the
//! driven potential; the projection `F(t)` onto the bound state of the
//! undriven potential measures how strongly the metastable state is
//! populated and how fast it decays. The momentum integral runs over
//! `(ε, √ω)` with fixed-node Gauss-Legendre rules, doubling the node count
//! until every reported `|F(t)|²` sample settles.

use rayon::prelude::*;

use crate::channels::ScatteringParams;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre_on;
use crate::scatter::{converge_amplitudes, solve_amplitudes};
use crate::C64;

/// Lower edge of the quadrature support, as a fraction of `√ω`; keeps the
/// integrand away from the `p = 0` channel threshold corner.
const SUPPORT_EPS: f64 = 1e-8;

/// Node-doubling target for every `|F(t)|²` sample.
const QUADRATURE_TOL: f64 = 1e-8;

const INITIAL_NODES: usize = 64;
const MAX_NODES: usize = 8192;

/// Tolerance used when converging the truncation order at the quadrature
/// nodes.
const TRUNCATION_TOL: f64 = 1e-10;

/// Fraction of the packet norm allowed outside `(0, √ω)` before the packet
/// stops being considered well-peaked.
pub const WELL_PEAKED_LEAKAGE: f64 = 1e-4;

/// Gaussian momentum packet `φ(p) = (2Δπ³)^{-1/4} e^{-(p-p0)²/Δ}`,
/// truncated to the first Floquet band `(0, √ω)`.
///
/// The untruncated packet is unit-normalized in position space, which in
/// this plane-wave convention means `2π ∫ |φ|² dp = 1`.
#[derive(Debug, Clone, Copy)]
pub struct WavePacket {
    pub p0: f64,
    pub delta: f64,
    pub omega: f64,
    leakage: f64,
}

impl WavePacket {
    pub fn new(p0: f64, delta: f64, omega: f64) -> Result<Self> {
        if !(p0.is_finite() && delta.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidParams(
                "packet parameters must be finite".into(),
            ));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if delta <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "packet width must be > 0, got {delta}"
            )));
        }
        let sqrt_omega = omega.sqrt();
        if p0 <= 0.0 || p0 >= sqrt_omega {
            return Err(Error::InvalidParams(format!(
                "central momentum must lie inside (0, sqrt(omega)) = (0, {sqrt_omega:.6}), got {p0}"
            )));
        }
        let mut packet = Self {
            p0,
            delta,
            omega,
            leakage: 0.0,
        };
        // Norm retained inside the band, by quadrature of the Gaussian.
        let (xs, ws) = gauss_legendre_on(0.0, sqrt_omega, 200);
        let kept: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(x, w)| {
                let a = packet.amplitude(*x);
                w * a * a
            })
            .sum();
        packet.leakage = (1.0 - 2.0 * std::f64::consts::PI * kept).max(0.0);
        Ok(packet)
    }

    /// Truncated momentum amplitude; zero for `p < 0` and `p² > ω`.
    pub fn amplitude(&self, p: f64) -> f64 {
        if p < 0.0 || p * p > self.omega {
            return 0.0;
        }
        let norm = (2.0 * self.delta * std::f64::consts::PI.powi(3)).powf(-0.25);
        let arg = (p - self.p0) * (p - self.p0) / self.delta;
        norm * (-arg).exp()
    }

    /// Norm fraction lost to the band truncation.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn is_well_peaked(&self) -> bool {
        self.leakage <= WELL_PEAKED_LEAKAGE
    }
}

/// Sampled `|F(t)|²` trace together with the inputs and quadrature
/// diagnostics that produced it.
#[derive(Debug, Clone)]
pub struct OverlapSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub g0: f64,
    pub g1: f64,
    pub omega: f64,
    pub packet: WavePacket,
    /// Nodes in the final Gauss-Legendre rule.
    pub quadrature_nodes: usize,
    /// Largest `|F(t)|²` change produced by the last node doubling.
    pub quadrature_change: f64,
    /// Truncation order used for the amplitudes at every node.
    pub n_max: usize,
}

impl OverlapSeries {
    pub fn peak(&self) -> (f64, f64) {
        let mut best = (0.0, f64::NEG_INFINITY);
        for (t, v) in self.times.iter().zip(&self.values) {
            if *v > best.1 {
                best = (*t, *v);
            }
        }
        best
    }
}

/// Validates the normalization of the bound state used in the projection:
/// `∫ (|g0|/2) e^{-|g0 x|} dx` evaluated by quadrature on a box spanning 60
/// decay lengths each side. Returns the numeric value (exactly 1 in exact
/// arithmetic).
pub fn bound_state_overlap_check(g0: f64) -> Result<f64> {
    if !g0.is_finite() || g0 >= 0.0 {
        return Err(Error::InvalidParams(format!(
            "bound state requires g0 < 0, got {g0}"
        )));
    }
    let kappa = g0.abs();
    let half_box = 60.0 / kappa;
    let (xs, ws) = gauss_legendre_on(0.0, half_box, 128);
    let half: f64 = xs
        .iter()
        .zip(&ws)
        .map(|(x, w)| w * 0.5 * kappa * (-kappa * x).exp())
        .sum();
    Ok(2.0 * half)
}

/// Samples `|F(t)|²` on `times`, where
/// `F(t) = sqrt(2|g0|) ∫ dp φ(p) [ -i p e^{-ip²t} / (g0²/4 + p²)
///   + Σ_n C_n(p) e^{-i p_n² t} / (|g0|/2 - i p_n) ]`.
///
/// The sideband amplitudes are solved at every quadrature node with a
/// single truncation order, the largest produced by auto-convergence over
/// the initial node set. Node counts double until every sample moves by
/// less than `1e-8`.
pub fn overlap_trace(
    g0: f64,
    g1: f64,
    packet: &WavePacket,
    times: &[f64],
) -> Result<OverlapSeries> {
    if !g0.is_finite() || g0 >= 0.0 {
        return Err(Error::InvalidParams(format!(
            "overlap requires a bound state, so g0 < 0; got {g0}"
        )));
    }
    if !g1.is_finite() || g1 < 0.0 {
        return Err(Error::InvalidParams(format!("g1 must be >= 0, got {g1}")));
    }
    let omega = packet.omega;
    let sqrt_omega = omega.sqrt();
    let support = (SUPPORT_EPS * sqrt_omega, sqrt_omega);

    // One truncation order for the whole node set: the maximum the
    // auto-convergence picks across the initial rule.
    let (probe_nodes, _) = gauss_legendre_on(support.0, support.1, INITIAL_NODES);
    let mut n_max = 1;
    for p in &probe_nodes {
        let params = ScatteringParams::new(g0, g1, omega, *p, 4)?;
        n_max = n_max.max(converge_amplitudes(&params, TRUNCATION_TOL)?.n_max);
    }

    let mut nodes = INITIAL_NODES;
    let mut previous: Option<Vec<f64>> = None;
    let mut change = f64::INFINITY;
    loop {
        let values = sample_overlap(g0, g1, omega, packet, times, nodes, n_max, support)?;
        if let Some(prev) = &previous {
            change = prev
                .iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if change < QUADRATURE_TOL {
                return Ok(OverlapSeries {
                    times: times.to_vec(),
                    values,
                    g0,
                    g1,
                    omega,
                    packet: *packet,
                    quadrature_nodes: nodes,
                    quadrature_change: change,
                    n_max,
                });
            }
        }
        if nodes >= MAX_NODES {
            return Err(Error::QuadratureNotConverged {
                nodes,
                achieved: change,
                target: QUADRATURE_TOL,
            });
        }
        previous = Some(values);
        nodes *= 2;
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_overlap(
    g0: f64,
    g1: f64,
    omega: f64,
    packet: &WavePacket,
    times: &[f64],
    nodes: usize,
    n_max: usize,
    support: (f64, f64),
) -> Result<Vec<f64>> {
    let (ps, ws) = gauss_legendre_on(support.0, support.1, nodes);
    let kappa = 0.5 * g0.abs();
    let n_max_i = n_max as i32;

    // Flatten the integral into phasor terms F(t) = Σ_k a_k e^{-i e_k t}.
    let mut terms: Vec<(C64, f64)> = Vec::with_capacity(nodes * (2 * n_max + 2));
    for (p, w) in ps.iter().zip(&ws) {
        let phi = packet.amplitude(*p);
        let weight = w * phi;
        terms.push((
            weight * C64::new(0.0, -p / (kappa * kappa + p * p)),
            p * p,
        ));
        let params = ScatteringParams::new(g0, g1, omega, *p, n_max)?;
        let amps = solve_amplitudes(&params)?;
        for n in -n_max_i..=n_max_i {
            let channel = amps.channels().get(n);
            let denom = C64::new(kappa, 0.0) - C64::new(0.0, 1.0) * channel.momentum;
            terms.push((weight * amps.c(n) / denom, channel.energy));
        }
    }

    let prefactor = (2.0 * g0.abs()).sqrt();
    let values = times
        .par_iter()
        .map(|t| {
            let f: C64 = terms
                .iter()
                .map(|(a, e)| a * C64::cis(-e * t))
                .sum();
            (prefactor * f.norm()).powi(2)
        })
        .collect();
    Ok(values)
}

/// Exponential decay rate extracted from a window of the trace.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Decay rate `Γ` (energy units).
    pub gamma: f64,
    /// Prefactor of the fitted `a e^{-Γt}`.
    pub amplitude: f64,
    pub window: (f64, f64),
    /// Goodness of the linear fit on the log scale.
    pub r_squared: f64,
    pub samples: usize,
}

impl DecayFit {
    /// A fit is accepted when it decays and the log-linear model explains
    /// the window.
    pub fn accepted(&self) -> bool {
        self.gamma > 0.0 && self.r_squared >= 0.99
    }
}

/// Least-squares fit of `ln |F(t)|²` against `t` over `window`; `Γ` is the
/// negated slope.
///
/// Needs at least 20 strictly positive samples inside the window.
pub fn fit_decay(series: &OverlapSeries, window: (f64, f64)) -> Result<DecayFit> {
    if !(window.0.is_finite() && window.1.is_finite()) || window.0 >= window.1 {
        return Err(Error::DegenerateFitWindow(format!(
            "window [{}, {}] is empty or not finite",
            window.0, window.1
        )));
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (t, v) in series.times.iter().zip(&series.values) {
        if *t < window.0 || *t > window.1 {
            continue;
        }
        if *v <= 0.0 {
            return Err(Error::DegenerateFitWindow(format!(
                "nonpositive overlap sample {v:.3e} at t = {t:.6}"
            )));
        }
        ts.push(*t);
        logs.push(v.ln());
    }
    if ts.len() < 20 {
        return Err(Error::DegenerateFitWindow(format!(
            "only {} samples inside the window, need at least 20",
            ts.len()
        )));
    }

    let n = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_y = logs.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, y) in ts.iter().zip(&logs) {
        sxx += (t - mean_t) * (t - mean_t);
        sxy += (t - mean_t) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFitWindow(
            "all samples share one time value".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_t;

    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (t, y) in ts.iter().zip(&logs) {
        ss_res += (y - (intercept + slope * t)) * (y - (intercept + slope * t));
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };

    Ok(DecayFit {
        gamma: -slope,
        amplitude: intercept.exp(),
        window,
        r_squared,
        samples: ts.len(),
    })
}

/// Default fit window `[t_peak + 2/Γ, t_peak + 8/Γ]` behind the trace peak.
pub fn default_fit_window(series: &OverlapSeries, gamma_guess: f64) -> Result<(f64, f64)> {
    if !(gamma_guess > 0.0) || !gamma_guess.is_finite() {
        return Err(Error::InvalidParams(format!(
            "decay-rate guess must be > 0, got {gamma_guess}"
        )));
    }
    let (t_peak, _) = series.peak();
    Ok((t_peak + 2.0 / gamma_guess, t_peak + 8.0 / gamma_guess))
}

/// Default sampling grid: 400 uniform samples over `ωt ∈ [0, 600]`.
pub fn default_time_grid(omega: f64) -> Vec<f64> {
    let samples = 400;
    (0..samples)
        .map(|j| 600.0 * j as f64 / ((samples - 1) as f64 * omega))
        .collect()
}
