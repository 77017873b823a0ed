//! Quadrature: composite trapezoid on sampled nodes and Gauss-Legendre rules.
//!
//! Polar meshes are open intervals `(0, pi)`; [`integrate_theta`] recognises
//! Gauss-Legendre node sets and applies the matching weights, falling back to
//! trapezoid with zero-closure at the poles (valid for `sin(theta)`-weighted
//! integrands, which vanish there).

/// Composite trapezoid rule over sampled nodes.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    assert_eq!(x.len(), f.len());
    let mut s = 0.0;
    for i in 1..x.len() {
        s += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    }
    s
}

/// Gauss-Legendre nodes and weights on `(-1, 1)`.
///
/// Newton iteration on the Legendre polynomial; nodes are accurate to
/// machine precision for the sizes used here (n <= 512).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x =
            (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x).
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to `(a, b)`.
pub fn gauss_legendre_ab(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&t| half * t).collect(),
    )
}

/// True if `theta` coincides with the Gauss-Legendre node set on `(0, pi)`.
pub fn is_gauss_theta_mesh(theta: &[f64]) -> bool {
    if theta.len() < 2 {
        return false;
    }
    let (nodes, _) = gauss_legendre_ab(theta.len(), 0.0, std::f64::consts::PI);
    theta
        .iter()
        .zip(&nodes)
        .all(|(&a, &b)| (a - b).abs() < 1e-10)
}

/// Integral over `(0, pi)` of a sampled polar function whose integrand
/// vanishes at the poles.
pub fn integrate_theta(theta: &[f64], f: &[f64]) -> f64 {
    assert_eq!(theta.len(), f.len());
    if is_gauss_theta_mesh(theta) {
        let (_, w) = gauss_legendre_ab(theta.len(), 0.0, std::f64::consts::PI);
        return f.iter().zip(&w).map(|(&v, &wi)| v * wi).sum();
    }
    // Trapezoid with zero-closure on the open interval.
    let mut x = Vec::with_capacity(theta.len() + 2);
    let mut g = Vec::with_capacity(theta.len() + 2);
    x.push(0.0);
    g.push(0.0);
    x.extend_from_slice(theta);
    g.extend_from_slice(f);
    x.push(std::f64::consts::PI);
    g.push(0.0);
    trapezoid(&x, &g)
}
