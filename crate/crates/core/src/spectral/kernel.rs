use std::f64::consts::PI;
use std::time::Instant;

use super::modes::multi_index;
use super::quadrature::{radial_profile, AngularProfile};
use super::SpectralConfig;
use crate::phase_space::dot;

/// Weight tables of one discrete collision direction
/// `e = (sin t cos p, sin t sin p, cos t)`, `(t, p) = (p pi / A1, q pi / A2)`.
#[derive(Debug, Clone)]
pub struct AnglePair {
    pub p: usize,
    pub q: usize,
    pub direction: [f64; 3],
    /// `phi(l . e)` per mode, FFT order.
    pub alpha: Vec<f64>,
    /// `sin(t) psi(|m - (m . e) e|)` per mode, FFT order.
    pub alpha_prime: Vec<f64>,
}

/// Precomputed decoupled weights of the hard-sphere kernel,
/// `B_F(l, m) = w sum_pairs alpha(l) alpha'(m)` with
/// `w = 4 C_alpha pi^2 / (A1 A2)`.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    n: usize,
    a1: usize,
    a2: usize,
    weight: f64,
    pairs: Vec<AnglePair>,
    loss_diagonal: Vec<f64>,
    precompute_seconds: f64,
}

pub fn precompute_kernel(config: &SpectralConfig) -> SpectralKernel {
    let start = Instant::now();
    let n = config.n_modes_per_axis();
    let (a1, a2) = (config.a1(), config.a2());
    let radius = config.radius();
    let psi = AngularProfile::new(radius, config.psi_order());
    let weight = 4.0 * config.c_alpha() * PI * PI / (a1 * a2) as f64;

    let modes: Vec<[f64; 3]> = (0..n * n * n)
        .map(|idx| multi_index(n, idx).map(|c| c as f64))
        .collect();

    let mut pairs = Vec::new();
    // p = 0 sits on the pole where the surface weight sin(t) vanishes
    for p in 1..a1 {
        let theta = p as f64 * PI / a1 as f64;
        let sin_t = theta.sin();
        for q in 0..a2 {
            let phi = q as f64 * PI / a2 as f64;
            let e = [sin_t * phi.cos(), sin_t * phi.sin(), theta.cos()];
            let mut alpha = Vec::with_capacity(modes.len());
            let mut alpha_prime = Vec::with_capacity(modes.len());
            for m in &modes {
                let along = dot(*m, e);
                alpha.push(radial_profile(along, radius));
                let perp = [m[0] - along * e[0], m[1] - along * e[1], m[2] - along * e[2]];
                alpha_prime.push(sin_t * psi.eval(dot(perp, perp).sqrt()));
            }
            pairs.push(AnglePair {
                p,
                q,
                direction: e,
                alpha,
                alpha_prime,
            });
        }
    }

    let loss_diagonal = (0..modes.len())
        .map(|i| weight * pairs.iter().map(|pr| pr.alpha[i] * pr.alpha_prime[i]).sum::<f64>())
        .collect();

    SpectralKernel {
        n,
        a1,
        a2,
        weight,
        pairs,
        loss_diagonal,
        precompute_seconds: start.elapsed().as_secs_f64(),
    }
}

impl SpectralKernel {
    pub fn n_modes_per_axis(&self) -> usize {
        self.n
    }

    pub fn angles(&self) -> (usize, usize) {
        (self.a1, self.a2)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn pairs(&self) -> &[AnglePair] {
        &self.pairs
    }

    /// `B_F(m, m)` per mode, FFT order, weight included.
    pub fn loss_diagonal(&self) -> &[f64] {
        &self.loss_diagonal
    }

    pub fn precompute_seconds(&self) -> f64 {
        self.precompute_seconds
    }

    /// `B_F(l, m)` for FFT-ordered flat mode indices.
    pub fn entry(&self, l: usize, m: usize) -> f64 {
        self.weight * self.pairs.iter().map(|p| p.alpha[l] * p.alpha_prime[m]).sum::<f64>()
    }

    /// `beta_F(l, m) = B_F(l, m) - B_F(m, m)`.
    pub fn beta(&self, l: usize, m: usize) -> f64 {
        self.entry(l, m) - self.loss_diagonal[m]
    }
}
