//! Nonnegative forcing densities and their dual norms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::params::Regime;
use crate::report::Record;
use crate::spectral::{dual_norm_full, dual_norm_homogeneous};

/// Relative threshold below which a density value counts as zero.
pub const SUPPORT_EPS: f64 = 1e-12;

/// A forcing term represented by a nonnegative density, with cached dual
/// norms for both regimes.
#[derive(Debug, Clone)]
pub struct Functional {
    density: Field,
    s: f64,
    dual_norm_hdot: f64,
    dual_norm_hfull: f64,
    support_mask: Vec<bool>,
    projected_mean: f64,
}

impl Functional {
    pub fn density(&self) -> &Field {
        &self.density
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// Dual norm on the homogeneous space. The mean of the density is not
    /// part of this pairing and is reported by [`Self::projected_mean`].
    pub fn dual_norm_hdot(&self) -> f64 {
        self.dual_norm_hdot
    }

    pub fn dual_norm_hfull(&self) -> f64 {
        self.dual_norm_hfull
    }

    pub fn dual_norm(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Critical => self.dual_norm_hdot,
            Regime::Subcritical => self.dual_norm_hfull,
        }
    }

    /// `density > SUPPORT_EPS * max(density)` per grid point.
    pub fn support_mask(&self) -> &[bool] {
        &self.support_mask
    }

    /// Mean of the density, dropped from the homogeneous dual norm.
    pub fn projected_mean(&self) -> f64 {
        self.projected_mean
    }

    /// `<f, u> = int f u`.
    pub fn pair(&self, u: &Field) -> Result<f64> {
        self.density.dot(u)
    }

    /// The same functional multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Functional> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidForcing(format!("scale must be > 0, got {t}")));
        }
        make_forcing(self.density.scaled(t), self.s)
    }

    pub fn record(&self) -> Record {
        Record::new()
            .with("dual_norm_hdot", self.dual_norm_hdot)
            .with("dual_norm_hfull", self.dual_norm_hfull)
            .with("projected_mean", self.projected_mean)
            .with(
                "support_fraction",
                self.support_mask.iter().filter(|&&b| b).count() as f64 / self.support_mask.len() as f64,
            )
    }
}

/// Validates a density and caches its dual norms at order `s`.
pub fn make_forcing(density: Field, s: f64) -> Result<Functional> {
    if let Some(x) = density.values().iter().find(|&&x| x < 0.0) {
        return Err(Error::InvalidForcing(format!("density has a negative entry {x}")));
    }
    let max = density.max();
    if max <= 0.0 {
        return Err(Error::InvalidForcing("density is identically zero".into()));
    }
    let dual_norm_hdot = dual_norm_homogeneous(&density, s)?;
    let dual_norm_hfull = dual_norm_full(&density, s)?;
    let eps = SUPPORT_EPS * max;
    let support_mask = density.values().iter().map(|&x| x > eps).collect();
    let projected_mean = density.mean();
    Ok(Functional {
        density,
        s,
        dual_norm_hdot,
        dual_norm_hfull,
        support_mask,
        projected_mean,
    })
}

/// Rescales `f` so its dual norm in `regime` equals `target`.
pub fn scale_to_norm(f: &Functional, target: f64, regime: Regime) -> Result<Functional> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidForcing(format!("target norm must be > 0, got {target}")));
    }
    let current = f.dual_norm(regime);
    if current <= 0.0 {
        return Err(Error::InvalidForcing(
            "current dual norm is zero (a constant density has no homogeneous dual norm)".into(),
        ));
    }
    f.scaled(target / current)
}

/// `amplitude * exp(-|x - center|^2 / (2 width^2))`.
pub fn gaussian(grid: &Arc<Grid>, center: &[f64], width: f64, amplitude: f64) -> Result<Field> {
    check_shape(grid, center, width, amplitude)?;
    Ok(Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
        amplitude * (-0.5 * r2 / (width * width)).exp()
    }))
}

/// `amplitude` on the closed ball of `radius` about `center`, zero elsewhere.
pub fn indicator(grid: &Arc<Grid>, center: &[f64], radius: f64, amplitude: f64) -> Result<Field> {
    check_shape(grid, center, radius, amplitude)?;
    Ok(Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
        if r2 <= radius * radius {
            amplitude
        } else {
            0.0
        }
    }))
}

/// `amplitude * (1 + cos(xi . x))` with `xi = 2 pi k / L`; nonnegative.
pub fn mode(grid: &Arc<Grid>, k: &[i64], amplitude: f64) -> Result<Field> {
    if k.len() != grid.dimension() {
        return Err(Error::InvalidForcing(format!(
            "mode index has {} entries, grid dimension is {}",
            k.len(),
            grid.dimension()
        )));
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidForcing(format!("amplitude must be > 0, got {amplitude}")));
    }
    let base = 2.0 * std::f64::consts::PI / grid.box_length();
    Ok(Field::from_fn(grid, |x| {
        let phase: f64 = x.iter().zip(k).map(|(a, &kk)| a * base * kk as f64).sum();
        amplitude * (1.0 + phase.cos())
    }))
}

fn check_shape(grid: &Grid, center: &[f64], size: f64, amplitude: f64) -> Result<()> {
    if center.len() != grid.dimension() {
        return Err(Error::InvalidForcing(format!(
            "center has {} coordinates, grid dimension is {}",
            center.len(),
            grid.dimension()
        )));
    }
    if !(size > 0.0 && size.is_finite()) {
        return Err(Error::InvalidForcing(format!("width/radius must be > 0, got {size}")));
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidForcing(format!("amplitude must be > 0, got {amplitude}")));
    }
    Ok(())
}

/// Support comparison of two densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMatch {
    /// Symmetric difference of the supports is at most `1e-6` of the points.
    pub matches: bool,
    pub symmetric_difference: f64,
    /// Fraction of `f`'s support inside `g`'s support.
    pub overlap_f: f64,
    /// Fraction of `g`'s support inside `f`'s support.
    pub overlap_g: f64,
}

/// Compares the supports of two densities on the same grid.
pub fn kernel_match_check(f: &Functional, g: &Functional) -> Result<KernelMatch> {
    f.density.check_grid(&g.density)?;
    let (mut both, mut only_f, mut only_g) = (0usize, 0usize, 0usize);
    for (&a, &b) in f.support_mask.iter().zip(&g.support_mask) {
        match (a, b) {
            (true, true) => both += 1,
            (true, false) => only_f += 1,
            (false, true) => only_g += 1,
            _ => {}
        }
    }
    let total = f.support_mask.len() as f64;
    let symmetric_difference = (only_f + only_g) as f64 / total;
    let frac = |inside: usize, outside: usize| {
        if inside + outside == 0 {
            0.0
        } else {
            inside as f64 / (inside + outside) as f64
        }
    };
    Ok(KernelMatch {
        matches: symmetric_difference <= 1e-6,
        symmetric_difference,
        overlap_f: frac(both, only_f),
        overlap_g: frac(both, only_g),
    })
}
