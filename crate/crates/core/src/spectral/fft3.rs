//! Unnormalized 3D FFT on an `n^3` cube stored x-fastest.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    lines: Vec<Complex64>,
    count: u64,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            lines: vec![Complex64::new(0.0, 0.0); n * n * n],
            count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of 3D transforms executed so far.
    pub fn transforms(&self) -> u64 {
        self.count
    }

    /// `X_k = sum_j x_j e^{-2 pi i k.j / n}`
    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.run(data, Direction::Forward);
    }

    /// `x_j = sum_k X_k e^{+2 pi i k.j / n}` (no `1/n^3`).
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.run(data, Direction::Inverse);
    }

    fn run(&mut self, data: &mut [Complex64], dir: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "FFT buffer size mismatch");
        self.count += 1;
        let plan = match dir {
            Direction::Forward => Arc::clone(&self.forward),
            Direction::Inverse => Arc::clone(&self.inverse),
        };

        // x lines are contiguous
        plan.process_with_scratch(data, &mut self.scratch);

        // y lines: gather (x, z) -> contiguous y
        for z in 0..n {
            for x in 0..n {
                let dst = &mut self.lines[(z * n + x) * n..(z * n + x + 1) * n];
                for (y, d) in dst.iter_mut().enumerate() {
                    *d = data[x + n * (y + n * z)];
                }
            }
        }
        plan.process_with_scratch(&mut self.lines, &mut self.scratch);
        for z in 0..n {
            for x in 0..n {
                let src = &self.lines[(z * n + x) * n..(z * n + x + 1) * n];
                for (y, s) in src.iter().enumerate() {
                    data[x + n * (y + n * z)] = *s;
                }
            }
        }

        // z lines
        let plane = n * n;
        for xy in 0..plane {
            let dst = &mut self.lines[xy * n..(xy + 1) * n];
            for (z, d) in dst.iter_mut().enumerate() {
                *d = data[xy + plane * z];
            }
        }
        plan.process_with_scratch(&mut self.lines, &mut self.scratch);
        for xy in 0..plane {
            let src = &self.lines[xy * n..(xy + 1) * n];
            for (z, s) in src.iter().enumerate() {
                data[xy + plane * z] = *s;
            }
        }
    }
}
