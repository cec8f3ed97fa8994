use floquet1d::resonance::{find_pole, gamma_estimate, ztp_corrected, ztp_driven_only};
use floquet1d::wavepacket::{default_fit_window, default_time_grid, fit_decay, overlap_trace, WavePacket};
use floquet1d::{converge_amplitudes, solve_amplitudes, ScatteringParams};
use std::time::Instant;

fn scan_peak(g0: f64, g1: f64, steps: usize) -> (f64, f64) {
    let curve: Vec<(f64, f64)> = (0..steps)
        .map(|j| {
            let p = (j as f64 + 0.5) / steps as f64;
            let params = ScatteringParams::new(g0, g1, 1.0, p, 32).unwrap();
            (p, solve_amplitudes(&params).unwrap().b0_squared())
        })
        .collect();
    let mut best = (0.0, 0.0);
    for w in curve.windows(3) {
        if w[1].1 > w[0].1 && w[1].1 >= w[2].1 && w[1].1 > best.1 {
            best = w[1];
        }
    }
    best
}

fn main() {
    let t0 = Instant::now();

    println!("== criterion 4: fine-scan resonance positions (1e4 midpoints) ==");
    for g1 in [0.2, 0.4, 0.8, 1.0] {
        let (pos, val) = scan_peak(-1.0, g1, 10_000);
        let eq5 = ztp_corrected(-1.0, g1, 1.0).unwrap().p_over_sqrt_omega;
        println!(
            "g1={g1}: peak at {pos:.6} value {val:.8}  eq5 {eq5:.6}  |d|={:.5}",
            (pos - eq5).abs()
        );
    }
    println!("t = {:?}", t0.elapsed());

    println!("\n== criterion 5: plateau g0=0, g1=3.5 over (0.05, 0.5] ==");
    let mut min_val: f64 = 2.0;
    let mut min_p = 0.0;
    for j in 0..=900 {
        let p = 0.05 + 0.45 * j as f64 / 900.0;
        let params = ScatteringParams::new(0.0, 3.5, 1.0, p, 48).unwrap();
        let b0 = solve_amplitudes(&params).unwrap().b0_squared();
        if b0 < min_val {
            min_val = b0;
            min_p = p;
        }
    }
    println!("min |B0|^2 = {min_val:.6} at p = {min_p:.4}");
    println!("ztp_driven_only(3.5): {:?}", ztp_driven_only(3.5, 1.0).map(|z| z.p_over_sqrt_omega));

    println!("\n== criterion 6: pole at g1=0.2 ==");
    let pole = find_pole(-1.0, 0.2, 1.0, 24, None).unwrap();
    let re_rel = (pole.p_squared.re - 0.75).abs() / 0.75;
    let im_rel = (pole.p_squared.im + 0.0025).abs() / 0.0025;
    println!(
        "root {:.8} {:+.8}i  re_rel {:.4} im_rel {:.4} residual {:.3e} iters {}",
        pole.p_squared.re, pole.p_squared.im, re_rel, im_rel, pole.residual, pole.iterations
    );

    println!("\n== criterion 9: truncation + tails at p=0.6 ==");
    let sets: Vec<(f64, f64)> = vec![
        (-1.0, 0.2), (-1.0, 0.4), (-1.0, 0.8), (-1.0, 1.0),
        (0.0, 1.5), (0.0, 2.5), (0.0, 3.5), (0.0, 4.5),
        (0.1, 1.5), (0.5, 1.5), (1.0, 1.5), (1.5, 1.5),
        (-0.1, 1.5), (-0.8, 1.5), (-1.4, 1.5), (-2.0, 1.5),
    ];
    for (g0, g1) in sets {
        let params = ScatteringParams::new(g0, g1, 1.0, 0.6, 2).unwrap();
        let conv = converge_amplitudes(&params, 1e-10).unwrap();
        let doubled = solve_amplitudes(&params.with_n_max(2 * conv.n_max)).unwrap();
        let drift = (doubled.b0_squared() - conv.amplitudes.b0_squared()).abs();
        let set = &conv.amplitudes;
        let nm = conv.n_max as i32;
        let mut ratios = Vec::new();
        for n in (nm - 10)..nm {
            let r = (set.c(n + 1) / set.c(n)).norm() * (n as f64).sqrt();
            ratios.push(r);
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
        println!(
            "g0={g0:+.1} g1={g1}: n_max={} drift={drift:.2e} ratio*sqrt(n) in [{lo:.4}, {hi:.4}] (g1/4={:.4})",
            conv.n_max,
            g1 / 4.0
        );
    }

    println!("\n== criterion 7: resonant decay fit ==");
    let t1 = Instant::now();
    let packet = WavePacket::new((3.0f64 / 4.0).sqrt(), 0.01, 1.0).unwrap();
    let times = default_time_grid(1.0);
    let series = overlap_trace(-1.0, 0.4, &packet, &times).unwrap();
    println!(
        "trace: nodes={} change={:.2e} n_max={} peak={:?} t={:?}",
        series.quadrature_nodes,
        series.quadrature_change,
        series.n_max,
        series.peak(),
        t1.elapsed()
    );
    let window = default_fit_window(&series, gamma_estimate(-1.0, 0.4, 1.0)).unwrap();
    let fit = fit_decay(&series, window).unwrap();
    let coeff = fit.gamma / (0.4 * 0.4 * 1.0 / 1.0);
    println!(
        "fit: gamma={:.6} coeff={coeff:.4} r2={:.6} window=({:.1},{:.1}) samples={}",
        fit.gamma, fit.r_squared, window.0, window.1, fit.samples
    );
    let pole = find_pole(-1.0, 0.4, 1.0, 24, None).unwrap();
    println!(
        "pole gamma = {:.6}, fit/pole = {:.4}, fit vs 1/8 pred: {:.4}",
        pole.gamma,
        fit.gamma / pole.gamma,
        (fit.gamma - 0.02).abs() / 0.02
    );

    println!("\n== criterion 8: peaks ==");
    let t2 = Instant::now();
    let off_packet = WavePacket::new(0.5, 0.01, 1.0).unwrap();
    let off = overlap_trace(-1.0, 0.4, &off_packet, &times).unwrap();
    println!(
        "off-resonant peak {:?} nodes {} t={:?}",
        off.peak(),
        off.quadrature_nodes,
        t2.elapsed()
    );
    println!("resonant/off ratio = {:.2}", series.peak().1 / off.peak().1);
    for delta in [1.0 / 400.0, 1.0 / 100.0, 1.0 / 10.0] {
        let pk = WavePacket::new((3.0f64 / 4.0).sqrt(), delta, 1.0).unwrap();
        let tr = overlap_trace(-1.0, 0.4, &pk, &times).unwrap();
        println!(
            "delta={delta:.4}: peak={:.6} nodes={} leak={:.2e}",
            tr.peak().1,
            tr.quadrature_nodes,
            pk.leakage()
        );
    }

    println!("\ntotal t = {:?}", t0.elapsed());
}
