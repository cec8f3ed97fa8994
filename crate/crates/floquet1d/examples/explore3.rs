use floquet1d::resonance::{find_pole, ztp_driven_only};
use floquet1d::C64;

fn main() {
    println!("== pole search for g0 = 0 from driven-only guesses ==");
    for g1 in [1.5, 2.5, 3.5, 4.5] {
        let ztp = ztp_driven_only(g1, 1.0).unwrap();
        for im_scale in [0.01, 0.05, 0.15] {
            let guess = C64::new(ztp.p_squared_over_omega, -im_scale);
            match find_pole(0.0, g1, 1.0, 48, Some(guess)) {
                Ok(pole) => println!(
                    "g1={g1} guess_im=-{im_scale}: root {:.6} {:+.6}i residual {:.2e} iters {}",
                    pole.p_squared.re, pole.p_squared.im, pole.residual, pole.iterations
                ),
                Err(e) => println!("g1={g1} guess_im=-{im_scale}: {e}"),
            }
        }
    }
    println!("\n== pole for g0<0 at larger g1 (CLI robustness) ==");
    for g1 in [0.8, 1.0, 1.5] {
        match find_pole(-1.0, g1, 1.0, 32, None) {
            Ok(pole) => println!(
                "g1={g1}: root {:.6} {:+.6}i residual {:.2e} iters {}",
                pole.p_squared.re, pole.p_squared.im, pole.residual, pole.iterations
            ),
            Err(e) => println!("g1={g1}: {e}"),
        }
    }
}
