//! Extremal profiles: the critical bubble, the subcritical ground state, the
//! paired vector minimizer, and a tail-exponent fit.

use std::sync::Arc;

use crate::constants::{initial_profile, signed_pow, QuotientDescent};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::params::{critical_exponent, MinimizeOpts, QuotientSpec, Regime, SystemParams};
use crate::spectral::regime_operator;

/// Dilation, center and amplitude of a bubble profile.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleParams {
    pub lambda: f64,
    pub center: Vec<f64>,
    /// Multiplies the profile; the amplitude that makes the bubble an exact
    /// solution is not fixed here.
    pub normalization: f64,
}

impl BubbleParams {
    /// Centered at the origin with unit normalization.
    pub fn centered(grid: &Grid, lambda: f64) -> Self {
        Self {
            lambda,
            center: vec![0.0; grid.dimension()],
            normalization: 1.0,
        }
    }
}

/// `normalization * (lambda / (lambda^2 + |x - x0|^2))^{(N-2s)/2}` on the grid.
///
/// Only defined for the critical regime.
pub fn talenti_bubble(grid: &Arc<Grid>, params: &SystemParams, bubble: &BubbleParams) -> Result<Field> {
    if params.regime() != Regime::Critical {
        return Err(Error::WrongRegime { required: "gamma = 0" });
    }
    if params.dimension() != grid.dimension() {
        return Err(Error::InvalidProfile(format!(
            "parameters are {}-dimensional, grid is {}-dimensional",
            params.dimension(),
            grid.dimension()
        )));
    }
    let BubbleParams {
        lambda,
        center,
        normalization,
    } = bubble;
    if !(*lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidProfile(format!("lambda must be > 0, got {lambda}")));
    }
    if !(*normalization > 0.0 && normalization.is_finite()) {
        return Err(Error::InvalidProfile(format!(
            "normalization must be > 0, got {normalization}"
        )));
    }
    if center.len() != grid.dimension() || !grid.contains(center) {
        return Err(Error::InvalidProfile(format!("center {center:?} is outside the box")));
    }
    let exponent = 0.5 * (params.dimension() as f64 - 2.0 * params.s());
    Ok(Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
        normalization * (lambda / (lambda * lambda + r2)).powf(exponent)
    }))
}

/// Positive solution of `(-Delta)^s w + w = w^{p-1}`.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub profile: Field,
    /// `||(-Delta)^s w + w - w^{p-1}||_2`.
    pub residual: f64,
    /// Full-norm Sobolev quotient of the profile.
    pub quotient: f64,
    /// Factor `mu` with `w = mu u`, `||u||_p = 1`.
    pub scale: f64,
    pub iterations: usize,
}

/// Minimizes the `H^s` quotient with exponent `p` and rescales the minimizer
/// so it solves the equation; iterates until the `L^2` residual is at most
/// `opts.tol`.
///
/// The profile is centered at the origin (the box center); the initial guess
/// is an even Gaussian, and the descent preserves evenness.
pub fn subcritical_ground_state(
    grid: &Arc<Grid>,
    s: f64,
    p: f64,
    opts: MinimizeOpts,
) -> Result<GroundState> {
    let crit = critical_exponent(grid.dimension(), s);
    if !(p > 2.0 && p < crit) {
        return Err(Error::InvalidParams(format!(
            "ground state needs 2 < p < 2*_s = {crit}, got {p}"
        )));
    }
    let spec = QuotientSpec::new(grid.dimension(), s, 0.5 * p, 0.5 * p, Regime::Subcritical)?;
    let mut state = QuotientDescent::scalar(grid, spec, initial_profile(grid, 1.0))?;
    let mut last = f64::INFINITY;
    for it in 0..=opts.max_iter {
        let scale = state.value.powf(1.0 / (p - 2.0));
        let w = state.u.scaled(scale);
        let residual = equation_residual(&w, s, p)?;
        last = residual;
        if residual <= opts.tol {
            let profile = if w.mean() < 0.0 { w.scaled(-1.0) } else { w };
            return Ok(GroundState {
                profile,
                residual,
                quotient: state.value,
                scale,
                iterations: it,
            });
        }
        if it == opts.max_iter {
            break;
        }
        if state.step()?.stalled {
            break;
        }
    }
    Err(Error::NotConverged {
        what: "ground state",
        iterations: opts.max_iter,
        last_change: last,
    })
}

/// `||(-Delta)^s w + w - |w|^{p-2} w||_2`.
pub fn equation_residual(w: &Field, s: f64, p: f64) -> Result<f64> {
    let aw = regime_operator(w, s, Regime::Subcritical)?;
    let nl = w.map(|x| signed_pow(x, p - 1.0));
    Ok(aw.sub(&nl)?.l2_norm())
}

/// `(sqrt(alpha/beta) w, w)`, the pair attaining the vector constant when `w`
/// attains the scalar one.
pub fn paired_minimizer(w: &Field, alpha: f64, beta: f64) -> Result<(Field, Field)> {
    if w.is_zero() {
        return Err(Error::ZeroField("paired minimizer"));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "exponents must be positive, got ({alpha}, {beta})"
        )));
    }
    Ok((w.scaled((alpha / beta).sqrt()), w.clone()))
}

/// Result of a tail power-law fit `u ~ c |x|^{-q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// The decay exponent `q`.
    pub exponent: f64,
    /// `c`.
    pub prefactor: f64,
    pub samples: usize,
    pub window: (f64, f64),
}

/// Default fit window as fractions of the half box length.
pub const DECAY_WINDOW: (f64, f64) = (0.25, 0.45);

/// [`decay_fit_window`] over radii in `[0.25, 0.45] L/2` from the box center.
pub fn decay_exponent_fit(u: &Field) -> Result<DecayFit> {
    decay_fit_window(u, DECAY_WINDOW.0, DECAY_WINDOW.1)
}

/// Least-squares slope of `log u` against `log |x|`, negated, over grid
/// points whose radius lies in `[lo, hi] * L/2`.
pub fn decay_fit_window(u: &Field, lo: f64, hi: f64) -> Result<DecayFit> {
    if !(lo > 0.0 && hi > lo && hi <= 1.0) {
        return Err(Error::DecayFit(format!("invalid window [{lo}, {hi}]")));
    }
    let grid = u.grid();
    let half = 0.5 * grid.box_length();
    let (r_lo, r_hi) = (lo * half, hi * half);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (r, &val) in grid.radii().into_iter().zip(u.values()) {
        if r >= r_lo && r <= r_hi {
            if val <= 0.0 {
                return Err(Error::DecayFit(format!(
                    "value {val} at radius {r} is not positive"
                )));
            }
            xs.push(r.ln());
            ys.push(val.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::DecayFit("fewer than two samples in the window".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        exponent: -slope,
        prefactor: (my - slope * mx).exp(),
        samples: xs.len(),
        window: (r_lo, r_hi),
    })
}
