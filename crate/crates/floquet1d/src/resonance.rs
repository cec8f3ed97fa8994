//! Zero-transmission predictors and the complex pole of the determinant.
//!
//! Full reflection inside the first band traces back to the bound state of
//! the static potential: the leading predictor places it at
//! `p²/ω = 1 - g0²/(4ω)`, the corrected predictor adds the second-order
//! shift from the drive, and the driven-only predictor handles `g0 = 0`,
//! where the closed-channel product `16 p_{-1} p_{-2} = -g1²` replaces the
//! bound-state condition. The resonance width comes from a complex root of
//! the determinant, located by a secant iteration with every channel
//! momentum analytically continued by branch tracking.

use crate::error::{Error, Result};
use crate::tridiag::{floquet_diagonal, FloquetMatrix, ScaledDeterminant};
use crate::C64;

/// Which closure produced a zero-transmission prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionOrder {
    Leading,
    Corrected,
}

/// Predicted zero-transmission position inside the first Floquet band.
#[derive(Debug, Clone, Copy)]
pub struct ZtpPrediction {
    pub p_over_sqrt_omega: f64,
    pub p_squared_over_omega: f64,
    pub order: PredictionOrder,
    /// Bound-state energy `-g0²/4` of the undriven potential when `g0 < 0`.
    pub bound_state_energy: Option<f64>,
}

fn check_couplings(g0: f64, omega: f64) -> Result<()> {
    if !g0.is_finite() || !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidParams(
            "couplings must be finite and omega > 0".into(),
        ));
    }
    if g0 >= 0.0 {
        return Err(Error::InvalidParams(format!(
            "bound-state predictor requires g0 < 0, got {g0}"
        )));
    }
    Ok(())
}

/// Leading-order position: the drive bridges the bound state at `-g0²/4`
/// into the continuum, so `p²/ω = 1 - g0²/(4ω)`.
///
/// The band edge `g0² = 4ω` returns the degenerate position `p = 0`;
/// anything deeper is out of band.
pub fn ztp_leading(g0: f64, omega: f64) -> Result<ZtpPrediction> {
    check_couplings(g0, omega)?;
    let x = 1.0 - g0 * g0 / (4.0 * omega);
    if x < 0.0 {
        return Err(Error::OutOfBand(format!(
            "g0²/(4ω) = {:.6} exceeds 1; the bound state sits below the first band",
            g0 * g0 / (4.0 * omega)
        )));
    }
    Ok(ZtpPrediction {
        p_over_sqrt_omega: x.sqrt(),
        p_squared_over_omega: x,
        order: PredictionOrder::Leading,
        bound_state_energy: Some(-g0 * g0 / 4.0),
    })
}

/// Second-order position including the drive-induced shift:
/// `p²/ω = 1 - g0²/(4ω) - |g0| g1² / (8 ω^{3/2} (sqrt(g0²/ω + 4) + g0/√ω))`.
///
/// Reduces to [`ztp_leading`] exactly as `g1 → 0`. The shift is always
/// towards smaller momenta.
pub fn ztp_corrected(g0: f64, g1: f64, omega: f64) -> Result<ZtpPrediction> {
    check_couplings(g0, omega)?;
    if !g1.is_finite() || g1 < 0.0 {
        return Err(Error::InvalidParams(format!("g1 must be >= 0, got {g1}")));
    }
    let u0 = g0 / omega.sqrt();
    let u1 = g1 / omega.sqrt();
    let shift = u0.abs() * u1 * u1 / (8.0 * ((u0 * u0 + 4.0).sqrt() + u0));
    // Leading part written exactly as in `ztp_leading` so the g1 -> 0 limit
    // is bit-identical.
    let x = 1.0 - g0 * g0 / (4.0 * omega) - shift;
    if x <= 0.0 {
        return Err(Error::OutOfBand(format!(
            "corrected position p²/ω = {x:.6} left the band"
        )));
    }
    Ok(ZtpPrediction {
        p_over_sqrt_omega: x.sqrt(),
        p_squared_over_omega: x,
        order: PredictionOrder::Corrected,
        bound_state_energy: Some(-g0 * g0 / 4.0),
    })
}

/// Zero-transmission position without a bound state (`g0 = 0`), from
/// `16 p_{-1} p_{-2} = -g1²` with both momenta evanescent:
/// `16 sqrt((ω - p²)(2ω - p²)) = g1²`.
///
/// The left side peaks at `16 sqrt(2) ω` as `p² → 0`, so larger drives have
/// no root in the band.
pub fn ztp_driven_only(g1: f64, omega: f64) -> Result<ZtpPrediction> {
    if !g1.is_finite() || !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidParams(
            "couplings must be finite and omega > 0".into(),
        ));
    }
    if g1 <= 0.0 {
        return Err(Error::InvalidParams(format!("g1 must be > 0, got {g1}")));
    }
    let limit = 16.0 * std::f64::consts::SQRT_2 * omega;
    if g1 * g1 > limit {
        return Err(Error::NoZtpRoot {
            g1_squared: g1 * g1,
            limit,
        });
    }
    // With x = p²/ω the condition reads (1 - x)(2 - x) = q², whose in-band
    // root is x = (3 - sqrt(1 + 4 q²)) / 2.
    let q = g1 * g1 / (16.0 * omega);
    let x = (3.0 - (1.0 + 4.0 * q * q).sqrt()) / 2.0;
    Ok(ZtpPrediction {
        p_over_sqrt_omega: x.max(0.0).sqrt(),
        p_squared_over_omega: x.max(0.0),
        order: PredictionOrder::Corrected,
        bound_state_energy: None,
    })
}

/// Small-drive estimate of the first determinant zero:
/// `p² = ω - g0²/4 - i g1² |g0| / (16 √ω)`. Default starting point for
/// [`find_pole`] when `g0 < 0`.
pub fn leading_pole_estimate(g0: f64, g1: f64, omega: f64) -> C64 {
    C64::new(
        omega - g0 * g0 / 4.0,
        -g1 * g1 * g0.abs() / (16.0 * omega.sqrt()),
    )
}

/// Width implied by the leading pole estimate, `Γ = g1² |g0| / (8 √ω)`.
pub fn gamma_estimate(g0: f64, g1: f64, omega: f64) -> f64 {
    g1 * g1 * g0.abs() / (8.0 * omega.sqrt())
}

/// A located determinant zero in the complex quasi-energy plane.
#[derive(Debug, Clone, Copy)]
pub struct ResonancePole {
    /// Complex quasi-energy of the zero (energy units; divide by `ω` for
    /// the dimensionless position).
    pub p_squared: C64,
    /// Decay rate `Γ = -2 Im(p²)`, clamped at zero, so `|F(t)|² ~ e^{-Γt}`.
    pub gamma: f64,
    /// `|det|` at the root relative to the largest determinant scale seen
    /// along the iteration path.
    pub residual: f64,
    pub iterations: usize,
}

/// Continues every channel momentum `p_n(z) = sqrt(z + nω)` along the
/// iteration path by picking, at each step, the square-root branch closer
/// to the previous value. Started on the physical sheet (`Im p_n > 0` for
/// closed channels) at a real quasi-energy.
pub(crate) struct BranchTracker {
    omega: f64,
    n_max: i32,
    momenta: Vec<C64>,
}

impl BranchTracker {
    /// Threshold on the distance ratio between the two branch candidates
    /// above which the continuation is declared ambiguous.
    const AMBIGUITY_RATIO: f64 = 0.8;

    pub(crate) fn new(omega: f64, n_max: usize, start: f64) -> Self {
        let n_max = n_max as i32;
        let momenta = (-n_max..=n_max)
            .map(|n| {
                let energy = start + n as f64 * omega;
                if energy >= 0.0 {
                    C64::new(energy.sqrt(), 0.0)
                } else {
                    C64::new(0.0, (-energy).sqrt())
                }
            })
            .collect();
        Self {
            omega,
            n_max,
            momenta,
        }
    }

    pub(crate) fn advance(&mut self, z: C64) -> Result<&[C64]> {
        for (k, n) in (-self.n_max..=self.n_max).enumerate() {
            let root = (z + n as f64 * self.omega).sqrt();
            let prev = self.momenta[k];
            let d_plus = (root - prev).norm();
            let d_minus = (-root - prev).norm();
            let (chosen, near, far) = if d_plus <= d_minus {
                (root, d_plus, d_minus)
            } else {
                (-root, d_minus, d_plus)
            };
            if far > 0.0 && near > Self::AMBIGUITY_RATIO * far {
                return Err(Error::BranchJump(n));
            }
            self.momenta[k] = chosen;
        }
        Ok(&self.momenta)
    }
}

const POLE_MAX_ITER: usize = 200;

/// Locates a complex zero of `det M(p²)` by a damped secant iteration on
/// the scaled determinant.
///
/// `guess` defaults to [`leading_pole_estimate`] when `g0 < 0`; for
/// `g0 ≥ 0` an explicit starting point is required. Converged when the
/// step drops below `10⁻¹² ω`.
pub fn find_pole(
    g0: f64,
    g1: f64,
    omega: f64,
    n_max: usize,
    guess: Option<C64>,
) -> Result<ResonancePole> {
    if !(g0.is_finite() && g1.is_finite() && omega.is_finite()) || omega <= 0.0 {
        return Err(Error::InvalidParams(
            "couplings must be finite and omega > 0".into(),
        ));
    }
    if g1 <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "pole search requires g1 > 0, got {g1}"
        )));
    }
    if n_max < 1 {
        return Err(Error::InvalidParams("n_max must be >= 1".into()));
    }
    let start = match guess {
        Some(z) => z,
        None if g0 < 0.0 => leading_pole_estimate(g0, g1, omega),
        None => {
            return Err(Error::InvalidParams(
                "an explicit guess is required when g0 >= 0".into(),
            ))
        }
    };

    let mut tracker = BranchTracker::new(omega, n_max, start.re);
    let eval = |z: C64, tracker: &mut BranchTracker| -> Result<ScaledDeterminant> {
        let momenta = tracker.advance(z)?;
        let diag = floquet_diagonal(g0, g1, momenta);
        Ok(FloquetMatrix::from_diagonal(diag).determinant())
    };

    let tol = 1e-12 * omega;
    let max_step = 0.25 * omega;

    let mut z_prev = start;
    let mut f_prev = eval(z_prev, &mut tracker)?;
    let mut z_cur = start + C64::new(1e-3 * omega, -1e-3 * omega);
    let mut f_cur = eval(z_cur, &mut tracker)?;
    let mut exponent_ref = f_prev.exponent.max(f_cur.exponent);

    fn pole_result(
        f_root: ScaledDeterminant,
        z_root: C64,
        exponent_ref: i64,
        iterations: usize,
    ) -> ResonancePole {
        ResonancePole {
            p_squared: z_root,
            gamma: (-2.0 * z_root.im).max(0.0),
            residual: f_root.mantissa.norm()
                * 2f64.powi((f_root.exponent - exponent_ref).clamp(-1_000, 0) as i32),
            iterations,
        }
    }

    let mut last_step = f64::INFINITY;
    for iteration in 1..=POLE_MAX_ITER {
        if f_cur.is_zero() {
            return Ok(pole_result(f_cur, z_cur, exponent_ref, iteration));
        }
        // Secant step on the common-scaled determinant values.
        let shift = f_prev.exponent.max(f_cur.exponent);
        let a = f_cur.mantissa * 2f64.powi((f_cur.exponent - shift).max(-1_000) as i32);
        let b = f_prev.mantissa * 2f64.powi((f_prev.exponent - shift).max(-1_000) as i32);
        let df = a - b;
        if df.norm() == 0.0 {
            return Err(Error::PoleNotConverged {
                iterations: iteration,
                last_step,
            });
        }
        let mut step = -a * (z_cur - z_prev) / df;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        z_prev = z_cur;
        f_prev = f_cur;
        z_cur += step;
        f_cur = eval(z_cur, &mut tracker)?;
        exponent_ref = exponent_ref.max(f_cur.exponent);
        last_step = step.norm();
        if last_step < tol {
            return Ok(pole_result(f_cur, z_cur, exponent_ref, iteration));
        }
    }
    Err(Error::PoleNotConverged {
        iterations: POLE_MAX_ITER,
        last_step,
    })
}
