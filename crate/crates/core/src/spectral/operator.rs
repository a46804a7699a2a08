//! Boltzmann collision operator `Qhat_k = sum_{l+m=k} beta_F(l,m) fhat_l fhat_m`.
//!
//! The fast path evaluates the gain term as one convolution per angle pair
//! and the loss term as a single convolution against the precomputed
//! diagonal, all as pointwise products on a zero-padded grid of `3N/2`
//! points per axis. The padding makes the products alias-free, so the fast
//! and direct paths compute the same truncated sum. Modes with a component
//! at `-N/2` are dropped from both input and output, which keeps the
//! retained set symmetric and the back-transform real.

use rustfft::num_complex::Complex64;

use super::fft3::Fft3;
use super::kernel::SpectralKernel;
use super::modes::{mode_index, multi_index, ModeArray, ModeTransform};
use super::SpectralConfig;
use crate::error::{FksError, Result};
use crate::phase_space::VelocityGrid;

/// Largest mode grid per axis the direct double sum accepts without override.
pub const DIRECT_COST_GUARD: usize = 16;

/// Diagnostics of one operator evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CollisionDiagnostics {
    /// Largest `|Im|` of the back-transformed `Qhat`, before it is discarded.
    pub max_imag_residue: f64,
    /// `max |Q|` of the returned values.
    pub max_abs: f64,
}

impl CollisionDiagnostics {
    pub fn is_real(&self, rel_tol: f64) -> bool {
        self.max_imag_residue <= rel_tol * self.max_abs.max(f64::MIN_POSITIVE)
    }
}

/// Per-thread scratch for the fast operator.
#[derive(Debug)]
pub struct SpectralWorkspace {
    n: usize,
    padded_n: usize,
    modes: ModeTransform,
    padded: Fft3,
    // (FFT-ordered index on the N grid, same mode on the padded grid)
    retained: Vec<(usize, usize)>,
    fhat: ModeArray,
    qhat: ModeArray,
    lhs: Vec<Complex64>,
    rhs: Vec<Complex64>,
    gain: Vec<Complex64>,
    values: Vec<Complex64>,
    velocity_factor: f64,
}

impl SpectralWorkspace {
    pub fn new(config: &SpectralConfig, vgrid: &VelocityGrid) -> Result<Self> {
        config.check_grid(vgrid)?;
        let n = config.n_modes_per_axis();
        let padded_n = config.padded_modes_per_axis();
        let half = (n / 2) as i64;
        let mut retained = Vec::new();
        for idx in 0..n * n * n {
            let k = multi_index(n, idx);
            if k.iter().all(|&c| c > -half) {
                retained.push((idx, mode_index(padded_n, k)));
            }
        }
        let m3 = padded_n * padded_n * padded_n;
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            n,
            padded_n,
            modes: ModeTransform::new(n),
            padded: Fft3::new(padded_n),
            retained,
            fhat: ModeArray::zeros(n),
            qhat: ModeArray::zeros(n),
            lhs: vec![zero; m3],
            rhs: vec![zero; m3],
            gain: vec![zero; m3],
            values: vec![zero; n * n * n],
            velocity_factor: config.velocity_factor(vgrid),
        })
    }

    pub fn n_modes_per_axis(&self) -> usize {
        self.n
    }

    pub fn padded_modes_per_axis(&self) -> usize {
        self.padded_n
    }

    /// 3D transforms executed so far by this workspace.
    pub fn transforms(&self) -> u64 {
        self.modes.transforms() + self.padded.transforms()
    }

    /// Transforms per cell for `kernel`: forward, two loss, two per angle
    /// pair, padded forward, and the back-transform.
    pub fn transforms_per_cell(kernel: &SpectralKernel) -> usize {
        5 + 2 * kernel.pairs().len()
    }

    fn check(&self, kernel: &SpectralKernel, masses: &[f64]) -> Result<()> {
        if kernel.n_modes_per_axis() != self.n {
            return Err(FksError::Dimension(format!(
                "kernel built for {}^3 modes, workspace for {}^3",
                kernel.n_modes_per_axis(),
                self.n
            )));
        }
        if masses.len() != self.n * self.n * self.n {
            return Err(FksError::Dimension(format!(
                "cell has {} masses, mode grid needs {}",
                masses.len(),
                self.n * self.n * self.n
            )));
        }
        Ok(())
    }

    fn load_modes(&mut self, masses: &[f64]) {
        self.modes.forward(masses, &mut self.fhat);
        self.fhat.drop_nyquist();
    }

    /// Scatter `weights[i] * fhat_i` onto the padded grid and bring it to
    /// physical space.
    fn padded_field(&mut self, weights: Option<&[f64]>, into_lhs: bool) {
        let buf = if into_lhs { &mut self.lhs } else { &mut self.rhs };
        buf.fill(Complex64::new(0.0, 0.0));
        let f = self.fhat.as_slice();
        match weights {
            Some(w) => {
                for &(i, p) in &self.retained {
                    buf[p] = f[i] * w[i];
                }
            }
            None => {
                for &(i, p) in &self.retained {
                    buf[p] = f[i];
                }
            }
        }
        self.padded.inverse(buf);
    }

    fn finish(&mut self, out: &mut [f64]) -> CollisionDiagnostics {
        let m3 = (self.padded_n * self.padded_n * self.padded_n) as f64;
        self.padded.forward(&mut self.gain);
        let q = self.qhat.as_mut_slice();
        q.fill(Complex64::new(0.0, 0.0));
        for &(i, p) in &self.retained {
            q[i] = self.gain[p] / m3;
        }
        self.back_transform(out)
    }

    fn back_transform(&mut self, out: &mut [f64]) -> CollisionDiagnostics {
        self.modes.inverse(&self.qhat, &mut self.values);
        let mut diag = CollisionDiagnostics::default();
        for (o, v) in out.iter_mut().zip(&self.values) {
            *o = v.re * self.velocity_factor;
            diag.max_imag_residue = diag.max_imag_residue.max(v.im.abs() * self.velocity_factor);
            diag.max_abs = diag.max_abs.max(o.abs());
        }
        diag
    }

    /// Fast evaluation of `Q(f)` at the grid velocities.
    pub fn q_fast(&mut self, masses: &[f64], kernel: &SpectralKernel, out: &mut [f64]) -> Result<CollisionDiagnostics> {
        self.check(kernel, masses)?;
        self.load_modes(masses);

        // loss: -(F * L) with L built from the diagonal table
        self.padded_field(None, true);
        self.padded_field(Some(kernel.loss_diagonal()), false);
        for ((g, a), b) in self.gain.iter_mut().zip(&self.lhs).zip(&self.rhs) {
            *g = -(a * b);
        }

        let w = kernel.weight();
        for pair in kernel.pairs() {
            self.padded_field(Some(&pair.alpha), true);
            self.padded_field(Some(&pair.alpha_prime), false);
            for ((g, a), b) in self.gain.iter_mut().zip(&self.lhs).zip(&self.rhs) {
                *g += a * b * w;
            }
        }
        Ok(self.finish(out))
    }

    /// Direct `O(N^6)` double sum over the same kernel tables.
    pub fn q_direct(
        &mut self,
        masses: &[f64],
        kernel: &SpectralKernel,
        out: &mut [f64],
        allow_large: bool,
    ) -> Result<CollisionDiagnostics> {
        self.check(kernel, masses)?;
        if self.n > DIRECT_COST_GUARD && !allow_large {
            return Err(FksError::config(format!(
                "direct collision sum refused for {}^3 modes (limit {}^3); pass the override to force it",
                self.n, DIRECT_COST_GUARD
            )));
        }
        self.load_modes(masses);
        let n = self.n;
        let half = (n / 2) as i64;
        let retained: Vec<([i64; 3], usize)> = self
            .retained
            .iter()
            .map(|&(i, _)| (self.fhat.multi_index(i), i))
            .collect();
        let f = self.fhat.as_slice();
        let q = self.qhat.as_mut_slice();
        q.fill(Complex64::new(0.0, 0.0));
        for &(k, ki) in &retained {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(l, li) in &retained {
                let m = [k[0] - l[0], k[1] - l[1], k[2] - l[2]];
                if m.iter().any(|&c| c <= -half || c >= half) {
                    continue;
                }
                let mi = mode_index(n, m);
                acc += f[li] * f[mi] * kernel.beta(li, mi);
            }
            q[ki] = acc;
        }
        Ok(self.back_transform(out))
    }
}

fn checked_workspace(
    config: &SpectralConfig,
    vgrid: &VelocityGrid,
    kernel: &SpectralKernel,
) -> Result<SpectralWorkspace> {
    if kernel.n_modes_per_axis() != config.n_modes_per_axis() {
        return Err(FksError::Dimension(format!(
            "kernel built for {}^3 modes, config asks for {}^3",
            kernel.n_modes_per_axis(),
            config.n_modes_per_axis()
        )));
    }
    SpectralWorkspace::new(config, vgrid)
}

/// Fast spectral collision operator for one cell.
pub fn q_boltzmann_fast(
    masses: &[f64],
    kernel: &SpectralKernel,
    config: &SpectralConfig,
    vgrid: &VelocityGrid,
) -> Result<Vec<f64>> {
    let mut ws = checked_workspace(config, vgrid, kernel)?;
    let mut out = vec![0.0; masses.len()];
    ws.q_fast(masses, kernel, &mut out)?;
    Ok(out)
}

/// Direct double-sum collision operator for one cell; the oracle for
/// [`q_boltzmann_fast`]. Refuses mode grids above [`DIRECT_COST_GUARD`]
/// unless `allow_large` is set.
pub fn q_boltzmann_direct(
    masses: &[f64],
    kernel: &SpectralKernel,
    config: &SpectralConfig,
    vgrid: &VelocityGrid,
    allow_large: bool,
) -> Result<Vec<f64>> {
    let mut ws = checked_workspace(config, vgrid, kernel)?;
    let mut out = vec![0.0; masses.len()];
    ws.q_direct(masses, kernel, &mut out, allow_large)?;
    Ok(out)
}

/// Explicit Euler collision update `m <- m + dt Q(m)` in place.
pub fn boltzmann_step(
    masses: &mut [f64],
    kernel: &SpectralKernel,
    ws: &mut SpectralWorkspace,
    dt: f64,
    q: &mut Vec<f64>,
) -> Result<CollisionDiagnostics> {
    q.resize(masses.len(), 0.0);
    let diag = ws.q_fast(masses, kernel, q)?;
    for (m, qk) in masses.iter_mut().zip(q.iter()) {
        *m += dt * qk;
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::precompute_kernel;

    fn setup(n: usize) -> (SpectralConfig, VelocityGrid, SpectralKernel) {
        let cfg = SpectralConfig::new(n, 4, 4).unwrap();
        let vg = VelocityGrid::new(n, -6.0, 6.0).unwrap();
        let k = precompute_kernel(&cfg);
        (cfg, vg, k)
    }

    #[test]
    fn zero_field_has_zero_collisions() {
        let (cfg, vg, k) = setup(8);
        let zero = vec![0.0; vg.len()];
        assert!(q_boltzmann_fast(&zero, &k, &cfg, &vg)
            .unwrap()
            .iter()
            .all(|&q| q == 0.0));
        assert!(q_boltzmann_direct(&zero, &k, &cfg, &vg, false)
            .unwrap()
            .iter()
            .all(|&q| q == 0.0));
    }

    #[test]
    fn direct_refuses_large_grids_without_override() {
        let cfg = SpectralConfig::new(18, 1, 1).unwrap();
        let vg = VelocityGrid::new(18, -6.0, 6.0).unwrap();
        let k = precompute_kernel(&cfg);
        let f = vec![0.0; vg.len()];
        let err = q_boltzmann_direct(&f, &k, &cfg, &vg, false).unwrap_err();
        assert!(matches!(err, FksError::Config(_)));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let (cfg, vg, _) = setup(8);
        let other = precompute_kernel(&SpectralConfig::new(6, 2, 2).unwrap());
        let f = vec![1.0; vg.len()];
        assert!(matches!(
            q_boltzmann_fast(&f, &other, &cfg, &vg),
            Err(FksError::Dimension(_))
        ));
        let (cfg, _, k) = setup(8);
        let mut ws = SpectralWorkspace::new(&cfg, &vg).unwrap();
        let mut out = vec![0.0; 10];
        assert!(ws.q_fast(&[1.0; 10], &k, &mut out).is_err());
    }

    #[test]
    fn zero_step_is_identity() {
        let (cfg, vg, k) = setup(8);
        let mut ws = SpectralWorkspace::new(&cfg, &vg).unwrap();
        let f0: Vec<f64> = (0..vg.len()).map(|i| 1.0 + (i % 5) as f64).collect();
        let mut f = f0.clone();
        boltzmann_step(&mut f, &k, &mut ws, 0.0, &mut Vec::new()).unwrap();
        assert_eq!(f, f0);
    }

    #[test]
    fn transform_count_is_reported() {
        let (cfg, vg, k) = setup(8);
        let mut ws = SpectralWorkspace::new(&cfg, &vg).unwrap();
        let f = vec![1.0; vg.len()];
        let mut out = vec![0.0; vg.len()];
        ws.q_fast(&f, &k, &mut out).unwrap();
        assert_eq!(ws.transforms() as usize, SpectralWorkspace::transforms_per_cell(&k));
        assert_eq!(SpectralWorkspace::transforms_per_cell(&k), 5 + 2 * 12);
    }
}
