//! Fourier coefficients of one cell's distribution on the scaled velocity
//! cube `[-pi, pi)^3`.
//!
//! The grid velocity `v_min + (j + 1/2) dv` maps to `xi_j = -pi + (j + 1/2) h`
//! with `h = 2 pi / N`. The forward transform carries the `1 / N^3`
//! normalization, so `f_j = sum_k fhat_k e^{i k . xi_j}` exactly inverts it.

use rustfft::num_complex::Complex64;

use super::fft3::Fft3;
use super::SpectralConfig;
use crate::error::{FksError, Result};
use crate::phase_space::VelocityGrid;

/// Signed wavenumber of FFT-ordered index `i` on an `n`-point axis,
/// in `[-n/2, n/2)`.
#[inline]
pub fn wavenumber(n: usize, i: usize) -> i64 {
    let half = n / 2;
    if i < n - half {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT-ordered flat index of multi-index `k` on an `n^3` mode grid.
#[inline]
pub fn mode_index(n: usize, k: [i64; 3]) -> usize {
    let w = |c: i64| c.rem_euclid(n as i64) as usize;
    w(k[0]) + n * (w(k[1]) + n * w(k[2]))
}

/// Signed multi-index of flat FFT-ordered position `idx` on an `n^3` grid.
#[inline]
pub fn multi_index(n: usize, idx: usize) -> [i64; 3] {
    [
        wavenumber(n, idx % n),
        wavenumber(n, (idx / n) % n),
        wavenumber(n, idx / (n * n)),
    ]
}

/// Complex coefficients `fhat_k`, `k in [-N/2, N/2)^3`, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeArray {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl ModeArray {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: [i64; 3]) -> Complex64 {
        self.coeffs[mode_index(self.n, k)]
    }

    pub fn set(&mut self, k: [i64; 3], value: Complex64) {
        let i = mode_index(self.n, k);
        self.coeffs[i] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Signed multi-index of flat FFT-ordered position `idx`.
    pub fn multi_index(&self, idx: usize) -> [i64; 3] {
        multi_index(self.n, idx)
    }

    /// Zeroes every coefficient with a component equal to `-N/2`, leaving a
    /// mode set symmetric under `k -> -k`.
    pub fn drop_nyquist(&mut self) {
        let n = self.n;
        if !n.is_multiple_of(2) {
            return;
        }
        let ny = n / 2;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    if i == ny || j == ny || k == ny {
                        self.coeffs[i + n * (j + n * k)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
    }
}

/// Forward/inverse mode transforms for one grid size, with the half-cell
/// phase shift of the cell-centred velocity points folded in.
#[derive(Debug)]
pub struct ModeTransform {
    fft: Fft3,
    // e^{i k (pi - h/2)} per axis, FFT order
    phase: Vec<Complex64>,
}

impl ModeTransform {
    pub fn new(n: usize) -> Self {
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let shift = std::f64::consts::PI - 0.5 * h;
        let phase = (0..n)
            .map(|i| Complex64::from_polar(1.0, wavenumber(n, i) as f64 * shift))
            .collect();
        Self {
            fft: Fft3::new(n),
            phase,
        }
    }

    pub fn n(&self) -> usize {
        self.fft.n()
    }

    pub fn transforms(&self) -> u64 {
        self.fft.transforms()
    }

    pub fn forward(&mut self, masses: &[f64], out: &mut ModeArray) {
        let n = self.n();
        assert_eq!(masses.len(), n * n * n);
        assert_eq!(out.n, n);
        for (o, m) in out.coeffs.iter_mut().zip(masses) {
            *o = Complex64::new(*m, 0.0);
        }
        self.fft.forward(&mut out.coeffs);
        let norm = 1.0 / (n * n * n) as f64;
        for k in 0..n {
            for j in 0..n {
                let pjk = self.phase[j] * self.phase[k] * norm;
                let row = &mut out.coeffs[n * (j + n * k)..n * (j + n * k + 1)];
                for (c, pi) in row.iter_mut().zip(&self.phase) {
                    *c *= pi * pjk;
                }
            }
        }
    }

    /// Values `sum_k fhat_k e^{i k . xi_j}` at the grid points; complex
    /// because truncated or filtered coefficients need not be symmetric.
    pub fn inverse(&mut self, modes: &ModeArray, out: &mut [Complex64]) {
        let n = self.n();
        assert_eq!(modes.n, n);
        assert_eq!(out.len(), n * n * n);
        for k in 0..n {
            for j in 0..n {
                let pjk = (self.phase[j] * self.phase[k]).conj();
                let base = n * (j + n * k);
                for i in 0..n {
                    out[base + i] = modes.coeffs[base + i] * (self.phase[i].conj() * pjk);
                }
            }
        }
        self.fft.inverse(out);
    }
}

/// Discrete Fourier coefficients of one cell's masses.
pub fn forward_modes(masses: &[f64], vgrid: &VelocityGrid, config: &SpectralConfig) -> Result<ModeArray> {
    config.check_grid(vgrid)?;
    if masses.len() != vgrid.len() {
        return Err(FksError::Dimension(format!(
            "cell has {} masses, velocity grid has {} points",
            masses.len(),
            vgrid.len()
        )));
    }
    let n = config.n_modes_per_axis();
    let mut out = ModeArray::zeros(n);
    ModeTransform::new(n).forward(masses, &mut out);
    Ok(out)
}
