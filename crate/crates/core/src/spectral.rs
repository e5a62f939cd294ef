//! Fourier pseudospectral helpers on a uniform periodic grid.
//!
//! Derivatives are computed by multiplying Fourier coefficients with
//! `(ik)^m`; the Nyquist mode is zeroed for odd derivative orders. Fields
//! entering nonlinear products can be filtered with the standard 2/3-rule
//! mask to suppress aliasing.

use num_traits::Zero;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

/// FFT machinery for one grid size and period.
pub struct SpectralGrid {
    n: usize,
    length: f64,
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
    /// Signed wavenumbers `2π j / L` in FFT layout.
    k: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(n: usize, length: f64) -> Self {
        assert!(n >= 2 && length > 0.0, "bad spectral grid");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let k = (0..n)
            .map(|j| {
                let signed = if j <= n / 2 {
                    j as isize
                } else {
                    j as isize - n as isize
                };
                2.0 * std::f64::consts::PI * signed as f64 / length
            })
            .collect();
        SpectralGrid {
            n,
            length,
            forward,
            inverse,
            k,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn period(&self) -> f64 {
        self.length
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        self.k[j]
    }

    pub fn fft(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform, returning the real part (inputs are spectra of
    /// real fields).
    pub fn ifft(&self, spectrum: &[Complex64]) -> Vec<f64> {
        assert_eq!(spectrum.len(), self.n);
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Multiplies a spectrum by `(ik)^order` in place; zeroes the Nyquist
    /// mode for odd orders.
    pub fn derivative_spectrum(&self, spectrum: &mut [Complex64], order: usize) {
        if order == 0 {
            return;
        }
        let nyquist = if self.n % 2 == 0 { Some(self.n / 2) } else { None };
        for (j, c) in spectrum.iter_mut().enumerate() {
            if order % 2 == 1 && Some(j) == nyquist {
                *c = Complex64::zero();
                continue;
            }
            let ik = Complex64::new(0.0, self.k[j]);
            *c *= ik.powu(order as u32);
        }
    }

    /// `d^order/ds^order` of a periodic field.
    pub fn derivative(&self, values: &[f64], order: usize) -> Vec<f64> {
        let mut spec = self.fft(values);
        self.derivative_spectrum(&mut spec, order);
        self.ifft(&spec)
    }

    /// Zeroes the top third of the spectrum (2/3-rule dealiasing).
    pub fn dealias(&self, spectrum: &mut [Complex64]) {
        let cutoff = self.n / 3;
        let nyq = self.n / 2;
        for (j, c) in spectrum.iter_mut().enumerate() {
            let signed = if j <= nyq { j } else { self.n - j };
            if signed > cutoff {
                *c = Complex64::zero();
            }
        }
    }

    /// The jet `(u, u_s, …, u_(max_order))` of a periodic field, each entry a
    /// grid function. With `dealias` set, every jet field is 2/3-filtered
    /// (used when the jets feed nonlinear products).
    pub fn jets(&self, values: &[f64], max_order: usize, dealias: bool) -> Vec<Vec<f64>> {
        let mut base = self.fft(values);
        if dealias {
            self.dealias(&mut base);
        }
        (0..=max_order)
            .map(|m| {
                let mut spec = base.clone();
                self.derivative_spectrum(&mut spec, m);
                self.ifft(&spec)
            })
            .collect()
    }

    /// Translates a periodic field by `delta` (positive moves features to
    /// larger `s`) via the Fourier phase shift.
    pub fn translate(&self, values: &[f64], delta: f64) -> Vec<f64> {
        let mut spec = self.fft(values);
        let nyq = if self.n % 2 == 0 { Some(self.n / 2) } else { None };
        for (j, c) in spec.iter_mut().enumerate() {
            if Some(j) == nyq {
                // keep the Nyquist mode real under the shift
                *c *= Complex64::new((self.k[j] * delta).cos(), 0.0);
            } else {
                *c *= Complex64::new(0.0, -self.k[j] * delta).exp();
            }
        }
        self.ifft(&spec)
    }
}

/// Node values `s_k = k L / N` of the periodic grid.
pub fn grid_nodes(n: usize, length: f64) -> Vec<f64> {
    (0..n).map(|k| k as f64 * length / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_sin_are_spectrally_exact() {
        let n = 64;
        let length = 2.0 * std::f64::consts::PI;
        let g = SpectralGrid::new(n, length);
        let s = grid_nodes(n, length);
        let u: Vec<f64> = s.iter().map(|&x| x.sin()).collect();
        let d1 = g.derivative(&u, 1);
        let d3 = g.derivative(&u, 3);
        for (k, &x) in s.iter().enumerate() {
            assert!((d1[k] - x.cos()).abs() < 1e-12);
            assert!((d3[k] + x.cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn translate_shifts_features() {
        let n = 128;
        let length = 10.0;
        let g = SpectralGrid::new(n, length);
        let s = grid_nodes(n, length);
        let u: Vec<f64> = s
            .iter()
            .map(|&x| (2.0 * std::f64::consts::PI * x / length).cos())
            .collect();
        let shifted = g.translate(&u, 2.5);
        for (k, &x) in s.iter().enumerate() {
            let expect = (2.0 * std::f64::consts::PI * (x - 2.5) / length).cos();
            assert!((shifted[k] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn dealias_kills_top_third() {
        let n = 32;
        let g = SpectralGrid::new(n, 1.0);
        let u: Vec<f64> = (0..n).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect();
        let mut spec = g.fft(&u);
        g.dealias(&mut spec);
        for (j, c) in spec.iter().enumerate() {
            let signed = if j <= n / 2 { j } else { n - j };
            if signed > n / 3 {
                assert_eq!(c.norm(), 0.0);
            }
        }
    }
}
