//! Periodic box discretization of R^N.
//!
//! The box is `[-L/2, L/2)^N` sampled at `P` points per axis. Values are
//! stored row-major with the last axis contiguous. The frequency lattice per
//! axis is `xi_k = 2 pi k / L` for `k` in `{-P/2, ..., P/2 - 1}`; the Nyquist
//! index `k = -P/2` is assigned the positive magnitude `pi P / L`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid with quadrature weights and a frequency lattice.
#[derive(Clone)]
pub struct Grid {
    dimension: usize,
    points_per_axis: usize,
    box_length: f64,
    wave_norms: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dimension", &self.dimension)
            .field("points_per_axis", &self.points_per_axis)
            .field("box_length", &self.box_length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension
            && self.points_per_axis == other.points_per_axis
            && self.box_length == other.box_length
    }
}

/// Builds a shareable grid. See [`Grid::new`].
pub fn make_grid(dimension: usize, points_per_axis: usize, box_length: f64) -> Result<Arc<Grid>> {
    Grid::new(dimension, points_per_axis, box_length).map(Arc::new)
}

impl Grid {
    pub fn new(dimension: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidDimension(dimension));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidResolution(points_per_axis));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidBoxLength(box_length));
        }

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points_per_axis);
        let inverse = planner.plan_fft_inverse(points_per_axis);

        let axis: Vec<f64> = (0..points_per_axis)
            .map(|j| axis_wavenumber(j, points_per_axis, box_length))
            .collect();
        let total = points_per_axis.pow(dimension as u32);
        let wave_norms = (0..total)
            .map(|flat| {
                let mut sq = 0.0;
                let mut rest = flat;
                for _ in 0..dimension {
                    let xi = axis[rest % points_per_axis];
                    sq += xi * xi;
                    rest /= points_per_axis;
                }
                sq.sqrt()
            })
            .collect();

        Ok(Self {
            dimension,
            points_per_axis,
            box_length,
            wave_norms,
            forward,
            inverse,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of grid points, `P^N`.
    pub fn len(&self) -> usize {
        self.wave_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wave_norms.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Quadrature weight of one cell, `(L/P)^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dimension as i32)
    }

    /// Weight turning `sum |u_hat|^2` of the unnormalized DFT into `int |u|^2`.
    pub fn spectral_weight(&self) -> f64 {
        self.cell_volume() / self.len() as f64
    }

    /// `|xi|` for every flat spectral index.
    pub fn wave_norms(&self) -> &[f64] {
        &self.wave_norms
    }

    /// Signed wavenumbers of one axis, in DFT order.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        (0..self.points_per_axis)
            .map(|j| signed_wavenumber(j, self.points_per_axis, self.box_length))
            .collect()
    }

    /// Coordinates of one axis, `-L/2 + j h`.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points_per_axis)
            .map(|j| -0.5 * self.box_length + j as f64 * h)
            .collect()
    }

    /// Multi-index of a flat index, first axis slowest.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dimension];
        let mut rest = flat;
        for slot in idx.iter_mut().rev() {
            *slot = rest % self.points_per_axis;
            rest /= self.points_per_axis;
        }
        idx
    }

    /// Physical coordinates of the grid point at `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(flat)
            .into_iter()
            .map(|j| -0.5 * self.box_length + j as f64 * h)
            .collect()
    }

    /// Euclidean distance of every grid point to the box center.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.point(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension
            && x.iter()
                .all(|&c| c >= -0.5 * self.box_length && c < 0.5 * self.box_length)
    }

    /// Unnormalized forward DFT of real data.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &*self.forward);
        buf
    }

    /// Inverse DFT (normalized by `1/P^N`), real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut spectrum, &*self.inverse);
        let scale = 1.0 / self.len() as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let p = self.points_per_axis;
        if self.dimension == 1 {
            fft.process(data);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); p];
        for axis in 0..self.dimension {
            let stride = p.pow((self.dimension - 1 - axis) as u32);
            let block = stride * p;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, value) in line.iter().enumerate() {
                        data[base + k * stride] = *value;
                    }
                }
            }
        }
    }
}

fn signed_wavenumber(j: usize, p: usize, length: f64) -> f64 {
    let k = if j < p / 2 { j as f64 } else { j as f64 - p as f64 };
    2.0 * PI * k / length
}

fn axis_wavenumber(j: usize, p: usize, length: f64) -> f64 {
    signed_wavenumber(j, p, length).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_grid() {
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        assert_eq!(g.len(), 64);
        assert!((g.cell_volume() - 2.0 * PI / 64.0).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_grid() {
        let g = Grid::new(2, 32, 40.0).unwrap();
        assert_eq!(g.len(), 1024);
        assert!((g.cell_volume() - 1.5625).abs() < 1e-15);
        assert!((g.cell_volume() * g.len() as f64 - g.volume()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(Grid::new(1, 17, 10.0), Err(Error::InvalidResolution(17))));
        assert!(matches!(Grid::new(1, 8, 10.0), Err(Error::InvalidResolution(8))));
        assert!(matches!(Grid::new(1, 32, 0.0), Err(Error::InvalidBoxLength(_))));
        assert!(matches!(Grid::new(1, 32, -1.0), Err(Error::InvalidBoxLength(_))));
        assert!(matches!(Grid::new(4, 16, 1.0), Err(Error::InvalidDimension(4))));
        assert!(matches!(Grid::new(0, 16, 1.0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn lattice_symmetric_except_nyquist() {
        let g = Grid::new(1, 16, 2.0 * PI).unwrap();
        let k = g.axis_wavenumbers();
        assert_eq!(k[8], -8.0);
        for j in 1..8 {
            assert_eq!(k[j], -k[16 - j]);
        }
        assert_eq!(g.wave_norms()[8], 8.0);
    }

    #[test]
    fn transforms_roundtrip_in_three_dimensions() {
        let g = Grid::new(3, 16, 5.0).unwrap();
        let values: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let back = g.inverse_real(g.forward(&values));
        for (a, b) in values.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_index_matches_row_major_layout() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        assert_eq!(g.multi_index(16 * 3 + 5), vec![3, 5]);
        let x = g.point(16 * 3 + 5);
        assert!((x[0] - (-0.5 + 3.0 / 16.0)).abs() < 1e-15);
        assert!((x[1] - (-0.5 + 5.0 / 16.0)).abs() < 1e-15);
    }
}
