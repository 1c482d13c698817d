//! The fractional Laplacian as a Fourier multiplier, and the Sobolev norms
//! built from it.
//!
//! All norms use the Plancherel weight of [`Grid::spectral_weight`], so for a
//! field `u`
//!
//! ```text
//! |u|_{H^s dot}^2 = int |xi|^{2s} |u_hat(xi)|^2   (periodic lattice sum)
//! ```
//!
//! which is the Fourier form of the Gagliardo seminorm; the double integral
//! equals `2 / c_{N,s}` times this quantity.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::params::Regime;

fn check_order(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(s))
    }
}

/// Applies the real, even multiplier `m(|xi|)` to `u`.
pub fn apply_multiplier(u: &Field, m: impl Fn(f64) -> f64) -> Field {
    let grid = u.grid();
    let mut spec = grid.forward(u.values());
    for (c, &k) in spec.iter_mut().zip(grid.wave_norms()) {
        *c *= m(k);
    }
    Field::from_raw(grid, grid.inverse_real(spec))
}

/// `(-Delta)^s u` with multiplier `|xi|^{2s}`; the zero mode maps to zero.
pub fn frac_laplacian(u: &Field, s: f64) -> Result<Field> {
    check_order(s)?;
    Ok(apply_multiplier(u, |k| k.powf(2.0 * s)))
}

/// `(-Delta)^s + gamma` for the regime.
pub fn regime_operator(u: &Field, s: f64, regime: Regime) -> Result<Field> {
    check_order(s)?;
    let shift = regime.shift();
    Ok(apply_multiplier(u, |k| k.powf(2.0 * s) + shift))
}

/// Inverse of [`regime_operator`]. In the critical regime the zero mode is
/// projected out (the operator is singular there).
pub fn regime_inverse(u: &Field, s: f64, regime: Regime) -> Result<Field> {
    check_order(s)?;
    let shift = regime.shift();
    Ok(apply_multiplier(u, |k| {
        let m = k.powf(2.0 * s) + shift;
        if m > 0.0 {
            1.0 / m
        } else {
            0.0
        }
    }))
}

/// Removes the zero Fourier mode (the mean).
pub fn project_mean_out(u: &Field) -> Field {
    let mean = u.mean();
    u.map(|v| v - mean)
}

/// `int m(|xi|) |u_hat|^2` with the Plancherel weight.
pub fn spectral_energy(u: &Field, m: impl Fn(f64) -> f64) -> f64 {
    let grid = u.grid();
    let spec = grid.forward(u.values());
    weighted_sum(grid, &spec, m)
}

fn weighted_sum(grid: &Grid, spec: &[Complex64], m: impl Fn(f64) -> f64) -> f64 {
    let sum: f64 = spec
        .iter()
        .zip(grid.wave_norms())
        .map(|(c, &k)| m(k) * c.norm_sqr())
        .sum();
    sum * grid.spectral_weight()
}

/// `||u||_{H^s dot}`, the Fourier-side Gagliardo seminorm.
pub fn hs_seminorm(u: &Field, s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(spectral_energy(u, |k| k.powf(2.0 * s)).max(0.0).sqrt())
}

/// `(||u||_2^2 + ||u||_{H^s dot}^2)^{1/2}`.
pub fn hs_full_norm(u: &Field, s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(spectral_energy(u, |k| 1.0 + k.powf(2.0 * s)).max(0.0).sqrt())
}

/// The norm of the regime's energy space: seminorm (critical) or full norm.
pub fn regime_norm(u: &Field, s: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::Critical => hs_seminorm(u, s),
        Regime::Subcritical => hs_full_norm(u, s),
    }
}

/// `<A u, u>` for the regime operator `A`.
pub fn regime_energy(u: &Field, s: f64, regime: Regime) -> Result<f64> {
    check_order(s)?;
    let shift = regime.shift();
    Ok(spectral_energy(u, |k| k.powf(2.0 * s) + shift))
}

/// Dual norm of a density in `(H^s dot)'`: `(sum_{xi != 0} |xi|^{-2s} |f_hat|^2)^{1/2}`.
/// The zero mode never contributes.
pub fn dual_norm_homogeneous(f: &Field, s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(spectral_energy(f, |k| if k > 0.0 { k.powf(-2.0 * s) } else { 0.0 })
        .max(0.0)
        .sqrt())
}

/// Dual norm of a density for the full norm `||.||_{H^s}` used here:
/// `(sum (1 + |xi|^{2s})^{-1} |f_hat|^2)^{1/2}`.
pub fn dual_norm_full(f: &Field, s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(spectral_energy(f, |k| 1.0 / (1.0 + k.powf(2.0 * s)))
        .max(0.0)
        .sqrt())
}

/// Dual norm matching [`regime_norm`].
pub fn regime_dual_norm(f: &Field, s: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::Critical => dual_norm_homogeneous(f, s),
        Regime::Subcritical => dual_norm_full(f, s),
    }
}

/// `c_{N,s} = 4^s Gamma(N/2 + s) / (pi^{N/2} |Gamma(-s)|)` for `0 < s < 1`.
pub fn operator_constant(dimension: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidOrder(s));
    }
    let n = dimension as f64;
    Ok(4f64.powf(s) * gamma(0.5 * n + s) / (PI.powf(0.5 * n) * gamma(-s).abs()))
}
