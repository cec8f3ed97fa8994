//! Gauss-Legendre quadrature nodes and weights.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
/// iteration from the Chebyshev-like initial guess; weights follow from
/// `w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Symmetric rule: compute the non-negative half and mirror.
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        // One last refinement so the weight uses a consistent derivative.
        let (p, d) = legendre_with_derivative(n, x);
        x -= p / d;
        let dp = legendre_with_derivative(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `n`-point Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let scale = 0.5 * (b - a);
    (
        xs.iter().map(|x| mid + scale * x).collect(),
        ws.iter().map(|w| scale * w).collect(),
    )
}

/// Evaluates `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n_f = n as f64;
    let dp = n_f * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_nodes_match_reference() {
        let (xs, ws) = gauss_legendre(5);
        // Classical values for n = 5.
        let x_ref = (245.0 + 14.0 * 70.0_f64.sqrt()).sqrt() / 21.0;
        let x_ref2 = (245.0 - 14.0 * 70.0_f64.sqrt()).sqrt() / 21.0;
        assert!((xs[0] + x_ref).abs() < 1e-14);
        assert!((xs[1] + x_ref2).abs() < 1e-14);
        assert!(xs[2].abs() < 1e-15);
        let w_ref = (322.0 - 13.0 * 70.0_f64.sqrt()) / 900.0;
        assert!((ws[0] - w_ref).abs() < 1e-14);
        assert!((ws[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // n-point rule is exact up to degree 2n - 1.
        for n in [2usize, 6, 11] {
            let (xs, ws) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let num: f64 = xs
                    .iter()
                    .zip(&ws)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 0 {
                    2.0 / (deg as f64 + 1.0)
                } else {
                    0.0
                };
                assert!(
                    (num - exact).abs() < 1e-13,
                    "n = {n}, degree {deg}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn mapped_rule_integrates_exponential() {
        let (xs, ws) = gauss_legendre_on(0.0, 1.0, 24);
        let num: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.exp()).sum();
        assert!((num - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let (_, ws) = gauss_legendre_on(0.25, 2.5, 40);
        let total: f64 = ws.iter().sum();
        assert!((total - 2.25).abs() < 1e-13);
    }
}
