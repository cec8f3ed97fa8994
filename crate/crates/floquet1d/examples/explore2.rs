use floquet1d::{continued_fraction_oracle, converge_amplitudes, solve_amplitudes, ScatteringParams};

fn main() {
    println!("== plateau curve g0=0, g1=3.5 ==");
    for j in 0..=24 {
        let p = 0.05 + 0.55 * j as f64 / 24.0;
        let params = ScatteringParams::new(0.0, 3.5, 1.0, p, 64).unwrap();
        let set = solve_amplitudes(&params).unwrap();
        let conv = converge_amplitudes(&params, 1e-12).unwrap();
        let oracle = continued_fraction_oracle(&params).unwrap();
        println!(
            "p={p:.4}  |B0|^2={:.8} (conv {:.8} @ n_max={}, oracle {:.8})  flux_res={:.2e}",
            set.b0_squared(),
            conv.amplitudes.b0_squared(),
            conv.n_max,
            oracle.b0_squared(),
            set.flux_residual()
        );
    }
    println!("\n== where does |B0|^2 drop below 0.99? ==");
    let mut prev = (0.0, 1.0);
    for j in 1..=6000 {
        let p = 0.0001 + 0.6 * j as f64 / 6000.0;
        let params = ScatteringParams::new(0.0, 3.5, 1.0, p, 64).unwrap();
        let b0 = solve_amplitudes(&params).unwrap().b0_squared();
        if prev.1 >= 0.99 && b0 < 0.99 {
            println!("crosses 0.99 between p={:.4} and p={:.4}", prev.0, p);
        }
        prev = (p, b0);
    }
    for g1 in [1.5, 2.5, 4.5] {
        println!("\n== sample curve g0=0, g1={g1} ==");
        for j in 0..=11 {
            let p = 0.05 + 0.9 * j as f64 / 11.0;
            let params = ScatteringParams::new(0.0, g1, 1.0, p, 64).unwrap();
            let b0 = solve_amplitudes(&params).unwrap().b0_squared();
            print!("({p:.3},{b0:.4}) ");
        }
        println!();
    }
}
