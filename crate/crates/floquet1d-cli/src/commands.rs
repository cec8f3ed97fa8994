//! The four subcommands: scan, resonance, overlap, converge.

use rayon::prelude::*;
use serde::Serialize;

use floquet1d::resonance::{
    find_pole, gamma_estimate, ztp_corrected, ztp_driven_only, ztp_leading, ResonancePole,
};
use floquet1d::wavepacket::{default_fit_window, fit_decay, overlap_trace, WavePacket};
use floquet1d::{converge_amplitudes, solve_amplitudes, ScatteringParams, C64};

use crate::output::{emit, fmt_f64};
use crate::{CliError, ConvergeArgs, Format, OverlapArgs, ResonanceArgs, ScanArgs};

/// Scan rows whose flux residual exceeds this bound make the process exit
/// with a numerical-failure code even though the output is written.
const FLUX_AUDIT_LIMIT: f64 = 1e-8;

#[derive(Serialize)]
struct Report<I: Serialize, R: Serialize, D: Serialize> {
    inputs: I,
    results: R,
    diagnostics: D,
}

// ---------------------------------------------------------------------------
// scan

#[derive(Serialize)]
struct ScanInputs {
    g0_over_sqrt_omega: f64,
    g1_over_sqrt_omega: f64,
    omega: f64,
    p_min_over_sqrt_omega: f64,
    p_max_over_sqrt_omega: f64,
    steps: usize,
    tol: f64,
}

#[derive(Serialize)]
struct ScanRow {
    p_over_sqrt_omega: f64,
    b0_sq: f64,
    refl: Vec<f64>,
    trans: Vec<f64>,
    flux_residual: f64,
}

#[derive(Serialize)]
struct ScanResults {
    sidebands: Vec<i32>,
    rows: Vec<ScanRow>,
}

#[derive(Serialize)]
struct ScanDiagnostics {
    n_max: usize,
    max_flux_residual: f64,
}

pub fn run_scan(args: &ScanArgs) -> Result<(), CliError> {
    if args.format == Format::Text {
        return Err(CliError::Validation(
            "scan output is tabular; use --format csv or json".into(),
        ));
    }
    if !(args.p_min > 0.0 && args.p_max > args.p_min) {
        return Err(CliError::Validation(format!(
            "momentum grid needs 0 < p-min < p-max, got [{}, {}]",
            args.p_min, args.p_max
        )));
    }
    if args.steps < 2 {
        return Err(CliError::Validation(format!(
            "steps must be at least 2, got {}",
            args.steps
        )));
    }
    let root = validate_omega(args.omega)?;
    let g0 = args.g0 * root;
    let g1 = args.g1 * root;

    let scaled_grid: Vec<f64> = (0..args.steps)
        .map(|i| {
            args.p_min + (args.p_max - args.p_min) * i as f64 / (args.steps - 1) as f64
        })
        .collect();

    // One truncation order for the whole scan keeps the rows rectangular.
    let n_max = match args.n_max {
        Some(n) if n >= 1 => n,
        Some(n) => {
            return Err(CliError::Validation(format!(
                "nmax must be at least 1, got {n}"
            )))
        }
        None => {
            let mut n_max = 1;
            for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let p_scaled = args.p_min + (args.p_max - args.p_min) * frac;
                let params = ScatteringParams::new(g0, g1, args.omega, p_scaled * root, 4)?;
                n_max = n_max.max(converge_amplitudes(&params, args.tol)?.n_max);
            }
            n_max
        }
    };

    let rows: Vec<ScanRow> = scaled_grid
        .par_iter()
        .map(|p_scaled| -> Result<ScanRow, CliError> {
            let params = ScatteringParams::new(g0, g1, args.omega, p_scaled * root, n_max)?;
            let set = solve_amplitudes(&params)?;
            Ok(ScanRow {
                p_over_sqrt_omega: *p_scaled,
                b0_sq: set.b0_squared(),
                refl: set.reflection_probabilities().to_vec(),
                trans: set.transmission_probabilities().to_vec(),
                flux_residual: set.flux_residual(),
            })
        })
        .collect::<Result<_, _>>()?;

    let max_residual = rows.iter().map(|r| r.flux_residual).fold(0.0, f64::max);
    let sidebands: Vec<i32> = (-(n_max as i32)..=n_max as i32).collect();

    let content = match args.format {
        Format::Csv => {
            let mut header = String::from("p_over_sqrt_omega,B0_sq");
            for n in &sidebands {
                header.push_str(&format!(",refl_{n}"));
            }
            for n in &sidebands {
                header.push_str(&format!(",trans_{n}"));
            }
            header.push_str(",flux_residual\n");
            let mut body = header;
            for row in &rows {
                body.push_str(&fmt_f64(row.p_over_sqrt_omega));
                body.push(',');
                body.push_str(&fmt_f64(row.b0_sq));
                for v in row.refl.iter().chain(&row.trans) {
                    body.push(',');
                    body.push_str(&fmt_f64(*v));
                }
                body.push(',');
                body.push_str(&fmt_f64(row.flux_residual));
                body.push('\n');
            }
            body
        }
        Format::Json => {
            let report = Report {
                inputs: ScanInputs {
                    g0_over_sqrt_omega: args.g0,
                    g1_over_sqrt_omega: args.g1,
                    omega: args.omega,
                    p_min_over_sqrt_omega: args.p_min,
                    p_max_over_sqrt_omega: args.p_max,
                    steps: args.steps,
                    tol: args.tol,
                },
                results: ScanResults { sidebands, rows },
                diagnostics: ScanDiagnostics {
                    n_max,
                    max_flux_residual: max_residual,
                },
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => unreachable!(),
    };
    emit(args.out.as_deref(), &content)?;

    if max_residual > FLUX_AUDIT_LIMIT {
        return Err(CliError::Numerical(format!(
            "flux residual {max_residual:.3e} exceeds the {FLUX_AUDIT_LIMIT:.0e} audit limit"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// resonance

#[derive(Serialize)]
struct PredictionReport {
    p_over_sqrt_omega: f64,
    p_squared_over_omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_state_energy_over_omega: Option<f64>,
}

#[derive(Serialize)]
struct PoleReport {
    p_squared_over_omega_re: f64,
    p_squared_over_omega_im: f64,
    gamma_over_omega: f64,
}

#[derive(Serialize)]
struct ResonanceInputs {
    g0_over_sqrt_omega: f64,
    g1_over_sqrt_omega: f64,
    omega: f64,
    n_max: usize,
}

#[derive(Serialize)]
struct ResonanceResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    leading: Option<PredictionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    corrected: Option<PredictionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    driven_only: Option<PredictionReport>,
    pole: PoleReport,
}

#[derive(Serialize)]
struct ResonanceDiagnostics {
    pole_residual: f64,
    pole_iterations: usize,
}

fn prediction_report(p: &floquet1d::resonance::ZtpPrediction, omega: f64) -> PredictionReport {
    PredictionReport {
        p_over_sqrt_omega: p.p_over_sqrt_omega,
        p_squared_over_omega: p.p_squared_over_omega,
        bound_state_energy_over_omega: p.bound_state_energy.map(|e| e / omega),
    }
}

pub fn run_resonance(args: &ResonanceArgs) -> Result<(), CliError> {
    if args.format == Format::Csv {
        return Err(CliError::Validation(
            "resonance produces a report; use --format text or json".into(),
        ));
    }
    let root = validate_omega(args.omega)?;
    let g0 = args.g0 * root;
    let g1 = args.g1 * root;
    if args.g0 > 0.0 {
        return Err(CliError::Validation(
            "predictors need g0 <= 0: a repulsive static coupling has no bound state \
             and no driven-only closure"
                .into(),
        ));
    }

    let (leading, corrected, driven_only, pole): (
        Option<_>,
        Option<_>,
        Option<_>,
        ResonancePole,
    ) = if args.g0 == 0.0 {
        let driven = ztp_driven_only(g1, args.omega)?;
        // Start below the predicted position; the width scale is unknown
        // until the root is found.
        let guess = C64::new(
            driven.p_squared_over_omega * args.omega,
            -0.05 * args.omega,
        );
        let pole = find_pole(g0, g1, args.omega, args.n_max, Some(guess))?;
        (None, None, Some(driven), pole)
    } else {
        let leading = ztp_leading(g0, args.omega)?;
        let corrected = ztp_corrected(g0, g1, args.omega)?;
        let pole = find_pole(g0, g1, args.omega, args.n_max, None)?;
        (Some(leading), Some(corrected), None, pole)
    };

    let content = match args.format {
        Format::Json => {
            let report = Report {
                inputs: ResonanceInputs {
                    g0_over_sqrt_omega: args.g0,
                    g1_over_sqrt_omega: args.g1,
                    omega: args.omega,
                    n_max: args.n_max,
                },
                results: ResonanceResults {
                    leading: leading.as_ref().map(|p| prediction_report(p, args.omega)),
                    corrected: corrected.as_ref().map(|p| prediction_report(p, args.omega)),
                    driven_only: driven_only
                        .as_ref()
                        .map(|p| prediction_report(p, args.omega)),
                    pole: PoleReport {
                        p_squared_over_omega_re: pole.p_squared.re / args.omega,
                        p_squared_over_omega_im: pole.p_squared.im / args.omega,
                        gamma_over_omega: pole.gamma / args.omega,
                    },
                },
                diagnostics: ResonanceDiagnostics {
                    pole_residual: pole.residual,
                    pole_iterations: pole.iterations,
                },
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            if let Some(p) = &leading {
                s.push_str(&format!(
                    "leading:     p/sqrt(omega) = {}  (p^2/omega = {})\n",
                    fmt_f64(p.p_over_sqrt_omega),
                    fmt_f64(p.p_squared_over_omega)
                ));
            }
            if let Some(p) = &corrected {
                s.push_str(&format!(
                    "corrected:   p/sqrt(omega) = {}  (p^2/omega = {})\n",
                    fmt_f64(p.p_over_sqrt_omega),
                    fmt_f64(p.p_squared_over_omega)
                ));
            }
            if let Some(p) = &driven_only {
                s.push_str(&format!(
                    "driven-only: p/sqrt(omega) = {}  (p^2/omega = {})\n",
                    fmt_f64(p.p_over_sqrt_omega),
                    fmt_f64(p.p_squared_over_omega)
                ));
            }
            if let Some(e) = leading.as_ref().and_then(|p| p.bound_state_energy) {
                s.push_str(&format!(
                    "bound state: E_b/omega = {}\n",
                    fmt_f64(e / args.omega)
                ));
            }
            s.push_str(&format!(
                "pole:        p^2/omega = {} {} i\n",
                fmt_f64(pole.p_squared.re / args.omega),
                fmt_f64(pole.p_squared.im / args.omega)
            ));
            s.push_str(&format!(
                "width:       gamma/omega = {}\n",
                fmt_f64(pole.gamma / args.omega)
            ));
            s
        }
        Format::Csv => unreachable!(),
    };
    emit(args.out.as_deref(), &content)
}

// ---------------------------------------------------------------------------
// overlap

#[derive(Serialize)]
struct OverlapInputs {
    g0_over_sqrt_omega: f64,
    g1_over_sqrt_omega: f64,
    omega: f64,
    p0_over_sqrt_omega: f64,
    delta_over_omega: f64,
    t_max_omega_t: f64,
    t_steps: usize,
}

#[derive(Serialize)]
struct FitReport {
    gamma_over_omega: f64,
    window_start_omega_t: f64,
    window_end_omega_t: f64,
    r_squared: f64,
    samples: usize,
}

#[derive(Serialize)]
struct OverlapResults {
    omega_t: Vec<f64>,
    f_sq: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitReport>,
}

#[derive(Serialize)]
struct OverlapDiagnostics {
    quadrature_nodes: usize,
    quadrature_change: f64,
    n_max: usize,
    packet_leakage: f64,
}

pub fn run_overlap(args: &OverlapArgs) -> Result<(), CliError> {
    if args.format == Format::Text {
        return Err(CliError::Validation(
            "overlap output is tabular; use --format csv or json".into(),
        ));
    }
    if args.t_steps < 2 {
        return Err(CliError::Validation(format!(
            "t-steps must be at least 2, got {}",
            args.t_steps
        )));
    }
    if !(args.t_max > 0.0) {
        return Err(CliError::Validation(format!(
            "t-max must be > 0, got {}",
            args.t_max
        )));
    }
    let root = validate_omega(args.omega)?;
    let g0 = args.g0 * root;
    let g1 = args.g1 * root;
    let packet = WavePacket::new(args.p0 * root, args.delta * args.omega, args.omega)?;
    if !packet.is_well_peaked() {
        eprintln!(
            "warning: packet leaks {:.3e} of its norm outside the first band",
            packet.leakage()
        );
    }

    let times: Vec<f64> = (0..args.t_steps)
        .map(|j| args.t_max * j as f64 / ((args.t_steps - 1) as f64 * args.omega))
        .collect();
    let series = overlap_trace(g0, g1, &packet, &times)?;

    let fit = if args.fit {
        let window = default_fit_window(&series, gamma_estimate(g0, g1, args.omega))?;
        let fit = fit_decay(&series, window)?;
        if !fit.accepted() {
            eprintln!(
                "warning: decay fit not accepted (gamma = {:.3e}, r^2 = {:.6})",
                fit.gamma, fit.r_squared
            );
        }
        Some(FitReport {
            gamma_over_omega: fit.gamma / args.omega,
            window_start_omega_t: window.0 * args.omega,
            window_end_omega_t: window.1 * args.omega,
            r_squared: fit.r_squared,
            samples: fit.samples,
        })
    } else {
        None
    };

    let omega_t: Vec<f64> = times.iter().map(|t| t * args.omega).collect();
    let content = match args.format {
        Format::Csv => {
            let mut body = String::from("omega_t,F_sq\n");
            for (t, v) in omega_t.iter().zip(&series.values) {
                body.push_str(&fmt_f64(*t));
                body.push(',');
                body.push_str(&fmt_f64(*v));
                body.push('\n');
            }
            if let Some(fit) = &fit {
                body.push_str(
                    "# fit: gamma_over_omega,window_start_omega_t,window_end_omega_t,r_squared,samples\n",
                );
                body.push_str(&format!(
                    "# fit: {},{},{},{},{}\n",
                    fmt_f64(fit.gamma_over_omega),
                    fmt_f64(fit.window_start_omega_t),
                    fmt_f64(fit.window_end_omega_t),
                    fmt_f64(fit.r_squared),
                    fit.samples
                ));
            }
            body
        }
        Format::Json => {
            let report = Report {
                inputs: OverlapInputs {
                    g0_over_sqrt_omega: args.g0,
                    g1_over_sqrt_omega: args.g1,
                    omega: args.omega,
                    p0_over_sqrt_omega: args.p0,
                    delta_over_omega: args.delta,
                    t_max_omega_t: args.t_max,
                    t_steps: args.t_steps,
                },
                results: OverlapResults {
                    omega_t,
                    f_sq: series.values.clone(),
                    fit,
                },
                diagnostics: OverlapDiagnostics {
                    quadrature_nodes: series.quadrature_nodes,
                    quadrature_change: series.quadrature_change,
                    n_max: series.n_max,
                    packet_leakage: packet.leakage(),
                },
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => unreachable!(),
    };
    emit(args.out.as_deref(), &content)
}

// ---------------------------------------------------------------------------
// converge

#[derive(Serialize)]
struct ConvergeInputs {
    g0_over_sqrt_omega: f64,
    g1_over_sqrt_omega: f64,
    omega: f64,
    p_over_sqrt_omega: f64,
    start_n_max: usize,
    tol: f64,
}

#[derive(Serialize)]
struct ConvergeLevelReport {
    n_max: usize,
    b0_sq: f64,
    change: f64,
}

#[derive(Serialize)]
struct ConvergeResults {
    levels: Vec<ConvergeLevelReport>,
    converged_n_max: usize,
    b0_sq: f64,
}

#[derive(Serialize)]
struct ConvergeDiagnostics {
    final_change: f64,
}

pub fn run_converge(args: &ConvergeArgs) -> Result<(), CliError> {
    let root = validate_omega(args.omega)?;
    let params = ScatteringParams::new(
        args.g0 * root,
        args.g1 * root,
        args.omega,
        args.p0 * root,
        args.n_max.max(1),
    )?;
    let converged = converge_amplitudes(&params, args.tol)?;
    let levels: Vec<ConvergeLevelReport> = converged
        .levels
        .iter()
        .map(|level| ConvergeLevelReport {
            n_max: level.n_max,
            b0_sq: level.b0_squared,
            change: level.change.unwrap_or(0.0),
        })
        .collect();
    let final_change = levels.last().map(|l| l.change).unwrap_or(0.0);

    let content = match args.format {
        Format::Text => {
            let mut s = String::from("n_max  B0_sq                   change\n");
            for level in &levels {
                s.push_str(&format!(
                    "{:<6} {}  {}\n",
                    level.n_max,
                    fmt_f64(level.b0_sq),
                    fmt_f64(level.change)
                ));
            }
            s.push_str(&format!(
                "converged: n_max = {}, B0_sq = {}\n",
                converged.n_max,
                fmt_f64(converged.amplitudes.b0_squared())
            ));
            s
        }
        Format::Csv => {
            let mut s = String::from("n_max,B0_sq,change\n");
            for level in &levels {
                s.push_str(&format!(
                    "{},{},{}\n",
                    level.n_max,
                    fmt_f64(level.b0_sq),
                    fmt_f64(level.change)
                ));
            }
            s
        }
        Format::Json => {
            let report = Report {
                inputs: ConvergeInputs {
                    g0_over_sqrt_omega: args.g0,
                    g1_over_sqrt_omega: args.g1,
                    omega: args.omega,
                    p_over_sqrt_omega: args.p0,
                    start_n_max: args.n_max,
                    tol: args.tol,
                },
                results: ConvergeResults {
                    levels,
                    converged_n_max: converged.n_max,
                    b0_sq: converged.amplitudes.b0_squared(),
                },
                diagnostics: ConvergeDiagnostics { final_change },
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    emit(args.out.as_deref(), &content)
}

fn validate_omega(omega: f64) -> Result<f64, CliError> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(CliError::Validation(format!(
            "omega must be finite and > 0, got {omega}"
        )));
    }
    Ok(omega.sqrt())
}
