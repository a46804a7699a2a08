//! Gauss-Legendre rules and the radial/angular profiles of the separable
//! hard-sphere kernel.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// `phi(s) = int_{-R}^{R} |rho| e^{i rho s} d rho`, real and even in `s`.
pub fn radial_profile(s: f64, radius: f64) -> f64 {
    let x = radius * s;
    let r2 = radius * radius;
    if x.abs() < 0.5 {
        // 2 R^2 sum_n (-1)^n x^{2n} / ((2n)! (2n + 2))
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..20 {
            let nf = n as f64;
            sum += term / (2.0 * nf + 2.0);
            term *= -x2 / ((2.0 * nf + 1.0) * (2.0 * nf + 2.0));
            if term.abs() < 1e-18 {
                break;
            }
        }
        2.0 * r2 * sum
    } else {
        2.0 * r2 * (x.sin() / x + (x.cos() - 1.0) / (x * x))
    }
}

/// `psi(s) = int_0^pi phi(s cos t) dt` by a fixed Gauss-Legendre rule in `t`.
#[derive(Debug, Clone)]
pub struct AngularProfile {
    radius: f64,
    cosines: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularProfile {
    pub const DEFAULT_ORDER: usize = 64;

    pub fn new(radius: f64, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let half = PI / 2.0;
        Self {
            radius,
            cosines: x.iter().map(|xi| ((xi + 1.0) * half).cos()).collect(),
            weights: w.iter().map(|wi| wi * half).collect(),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.cosines
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * radial_profile(s * c, self.radius))
            .sum()
    }
}
