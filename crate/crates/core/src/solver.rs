//! Minimization of the positive-part energy over the convexity ball.
//!
//! Gradient descent preconditioned by `A^{-1}`, `A = (-Delta)^s + gamma`,
//! with Armijo backtracking and radial projection onto the ball of radius
//! `0.99 r` in the regime norm. When `gamma = 0` the zero Fourier mode is
//! outside the energy space; iterates stay mean-zero and the gradient is
//! measured after projecting out its mean.

use std::sync::Arc;

use crate::energy::{energy, gradient, pair_l2_norm, pair_norm, EnergyVariant};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::forcing::Functional;
use crate::grid::Grid;
use crate::params::{Regime, SystemParams};
use crate::report::{fmt_f64, Record};
use crate::spectral::{project_mean_out, regime_inverse};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
/// Iterates are kept inside this fraction of the convexity radius.
pub const BALL_SHRINK: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOpts {
    /// Stop when the gradient `L^2` norm is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Convexity radius `r`.
    pub radius: f64,
    /// Smallness threshold `d`; forcing above it only produces a warning.
    pub threshold: Option<f64>,
}

impl SolveOpts {
    pub fn new(radius: f64) -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            radius,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub ball_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u_bar: Field,
    pub v_bar: Field,
    pub energy: f64,
    pub grad_norm: f64,
    /// `||(u, v)|| / r`.
    pub ball_fraction: f64,
    pub min_u: f64,
    pub min_v: f64,
    /// `||u - v||_2 / ||u + v||_2`, zero when both vanish.
    pub distinctness: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The final iterate sits on the projection sphere.
    pub projection_active: bool,
    pub trace: Vec<TraceRow>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn record(&self) -> Record {
        Record::new()
            .with("energy", self.energy)
            .with("grad_norm", self.grad_norm)
            .with("ball_fraction", self.ball_fraction)
            .with("min_u", self.min_u)
            .with("min_v", self.min_v)
            .with("distinctness", self.distinctness)
            .with("iterations", self.iterations)
            .with("converged", self.converged)
            .with("projection_active", self.projection_active)
            .with("warnings", self.warnings.join("; "))
    }

    /// CSV `iter,energy,grad_norm,ball_fraction`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,energy,grad_norm,ball_fraction\n");
        for r in &self.trace {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.iteration,
                fmt_f64(r.energy),
                fmt_f64(r.grad_norm),
                fmt_f64(r.ball_fraction)
            ));
        }
        out
    }
}

/// `||u - v||_2 / ||u + v||_2`.
pub fn distinctness(u: &Field, v: &Field) -> Result<f64> {
    let sum = u.add_scaled(1.0, v)?.l2_norm();
    let diff = u.sub(v)?.l2_norm();
    Ok(if sum == 0.0 { diff } else { diff / sum })
}

/// Minimizes the energy from `(0, 0)`.
pub fn solve_system(
    f: &Functional,
    g: &Functional,
    params: &SystemParams,
    grid: &Arc<Grid>,
    opts: &SolveOpts,
) -> Result<SolveReport> {
    let z = Field::zeros(grid);
    solve_from(f, g, params, opts, z.clone(), z)
}

/// Minimizes the energy from the given starting pair (projected into the
/// ball, and onto mean-zero fields when `gamma = 0`).
pub fn solve_from(
    f: &Functional,
    g: &Functional,
    params: &SystemParams,
    opts: &SolveOpts,
    u0: Field,
    v0: Field,
) -> Result<SolveReport> {
    if !(opts.radius > 0.0 && opts.radius.is_finite()) {
        return Err(Error::InvalidParams(format!("radius must be > 0, got {}", opts.radius)));
    }
    u0.check_grid(&v0)?;
    u0.check_grid(f.density())?;
    u0.check_grid(g.density())?;
    let regime = params.regime();
    let s = params.s();
    let mut warnings = Vec::new();
    if let Some(d) = opts.threshold {
        let m = f.dual_norm(regime).max(g.dual_norm(regime));
        if m > d {
            warnings.push(format!("forcing norm {m} exceeds the sufficient threshold {d}"));
        }
    }
    let limit = BALL_SHRINK * opts.radius;
    let (mut u, mut v) = match regime {
        Regime::Critical => (project_mean_out(&u0), project_mean_out(&v0)),
        Regime::Subcritical => (u0, v0),
    };
    let n0 = pair_norm(&u, &v, params)?;
    if n0 > limit {
        u = u.scaled(limit / n0);
        v = v.scaled(limit / n0);
    }

    let variant = EnergyVariant::PositivePart;
    let mut e = energy(&u, &v, f, g, params, variant)?.total;
    let mut tau = 1.0;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut stalled = false;
    let (grad_norm, converged) = loop {
        let (mut gu, mut gv) = gradient(&u, &v, f, g, params, variant)?;
        if regime == Regime::Critical {
            gu = project_mean_out(&gu);
            gv = project_mean_out(&gv);
        }
        let gnorm = pair_l2_norm(&gu, &gv);
        trace.push(TraceRow {
            iteration: iterations,
            energy: e,
            grad_norm: gnorm,
            ball_fraction: pair_norm(&u, &v, params)? / opts.radius,
        });
        if gnorm <= opts.tol {
            break (gnorm, true);
        }
        if iterations >= opts.max_iter || stalled {
            break (gnorm, false);
        }
        let du = regime_inverse(&gu, s, regime)?;
        let dv = regime_inverse(&gv, s, regime)?;
        loop {
            let mut tu = u.add_scaled(-tau, &du)?;
            let mut tv = v.add_scaled(-tau, &dv)?;
            let n = pair_norm(&tu, &tv, params)?;
            if n > limit {
                tu = tu.scaled(limit / n);
                tv = tv.scaled(limit / n);
            }
            // first-order decrease <G, x - x_trial>
            let decrease = gu.dot(&u.sub(&tu)?)? + gv.dot(&v.sub(&tv)?)?;
            let te = energy(&tu, &tv, f, g, params, variant)?.total;
            if decrease > 0.0 && te <= e - ARMIJO * decrease {
                u = tu;
                v = tv;
                e = te;
                tau = (2.0 * tau).min(1.0);
                break;
            }
            tau *= 0.5;
            if tau < MIN_STEP {
                stalled = true;
                tau = 1.0;
                break;
            }
        }
        if !stalled {
            iterations += 1;
        }
    };

    let norm = pair_norm(&u, &v, params)?;
    let projection_active = norm >= limit * (1.0 - 1e-12) && norm > 0.0;
    let report = SolveReport {
        min_u: u.min(),
        min_v: v.min(),
        distinctness: distinctness(&u, &v)?,
        energy: e,
        grad_norm,
        ball_fraction: norm / opts.radius,
        iterations,
        converged: converged && !projection_active,
        projection_active,
        trace,
        warnings,
        u_bar: u,
        v_bar: v,
    };
    if !converged {
        let reason = if stalled {
            "line search stalled before the gradient tolerance was met".to_string()
        } else {
            format!("gradient tolerance not met in {} iterations", opts.max_iter)
        };
        return Err(Error::Solve {
            reason,
            report: Box::new(report),
        });
    }
    if projection_active {
        return Err(Error::Solve {
            reason: "the minimizer lies on the projection sphere, not in the interior".into(),
            report: Box::new(report),
        });
    }
    Ok(report)
}

/// `L^2` norm of the pair of strong-form residuals of the positive-part
/// system; with `gamma = 0` the means are projected out first.
pub fn residual(u: &Field, v: &Field, f: &Functional, g: &Functional, params: &SystemParams) -> Result<f64> {
    let (mut gu, mut gv) = gradient(u, v, f, g, params, EnergyVariant::PositivePart)?;
    if params.regime() == Regime::Critical {
        gu = project_mean_out(&gu);
        gv = project_mean_out(&gv);
    }
    Ok(pair_l2_norm(&gu, &gv))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positivity {
    pub min_u: f64,
    pub min_v: f64,
    /// Fraction of grid points with `u <= 0`.
    pub nonpositive_u: f64,
    pub nonpositive_v: f64,
}

impl Positivity {
    pub fn passed(&self) -> bool {
        self.min_u > 0.0 && self.min_v > 0.0
    }
}

pub fn positivity_check(report: &SolveReport) -> Positivity {
    let frac = |f: &Field| f.values().iter().filter(|&&x| x <= 0.0).count() as f64 / f.values().len() as f64;
    Positivity {
        min_u: report.u_bar.min(),
        min_v: report.v_bar.min(),
        nonpositive_u: frac(&report.u_bar),
        nonpositive_v: frac(&report.v_bar),
    }
}

/// `||(A^{-1} f, A^{-1} g)||`, the norm of the solution of the decoupled
/// linear equations.
pub fn linear_response_norm(f: &Functional, g: &Functional, params: &SystemParams) -> Result<f64> {
    let (s, regime) = (params.s(), params.regime());
    let lu = regime_inverse(f.density(), s, regime)?;
    let lv = regime_inverse(g.density(), s, regime)?;
    pair_norm(&lu, &lv, params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponsePoint {
    pub t: f64,
    pub norm: f64,
    /// `norm / t`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub points: Vec<ResponsePoint>,
    pub linear_norm: f64,
    /// Solution norms increase with `t`.
    pub monotone: bool,
}

/// Solves with forcing `(t f, t g)` for each `t > 0` and compares the
/// solution norm per unit `t` with the linear solve.
pub fn neumann_series_sanity(
    t_scale: &[f64],
    f: &Functional,
    g: &Functional,
    params: &SystemParams,
    grid: &Arc<Grid>,
    opts: &SolveOpts,
) -> Result<ResponseCurve> {
    let mut points = Vec::with_capacity(t_scale.len());
    for &t in t_scale {
        let r = solve_system(&f.scaled(t)?, &g.scaled(t)?, params, grid, opts)?;
        let norm = pair_norm(&r.u_bar, &r.v_bar, params)?;
        points.push(ResponsePoint { t, norm, ratio: norm / t });
    }
    let mut sorted = points.clone();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let monotone = sorted.windows(2).all(|w| w[1].norm > w[0].norm);
    Ok(ResponseCurve {
        points,
        linear_norm: linear_response_norm(f, g, params)?,
        monotone,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalMargin {
    /// The sufficient threshold `d`.
    pub sufficient: f64,
    /// Largest forcing norm (found by bisection) at which the solve still
    /// converges in the interior.
    pub empirical: f64,
    pub ratio: f64,
}

/// Scales `(f, g)` so the larger dual norm is `m d` and finds the largest `m`
/// (doubling, then `bisections` halvings) for which the interior solve
/// succeeds. Says nothing about the sharp threshold.
pub fn empirical_threshold(
    f: &Functional,
    g: &Functional,
    params: &SystemParams,
    grid: &Arc<Grid>,
    opts: &SolveOpts,
    d: f64,
    bisections: usize,
) -> Result<EmpiricalMargin> {
    let regime = params.regime();
    let base = f.dual_norm(regime).max(g.dual_norm(regime));
    if base <= 0.0 {
        return Err(Error::InvalidForcing("forcing has zero dual norm".into()));
    }
    let ok = |m: f64| -> Result<bool> {
        let k = m * d / base;
        let mut o = opts.clone();
        o.threshold = None;
        match solve_system(&f.scaled(k)?, &g.scaled(k)?, params, grid, &o) {
            Ok(_) => Ok(true),
            Err(Error::Solve { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while ok(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            break;
        }
    }
    for _ in 0..bisections {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EmpiricalMargin {
        sufficient: d,
        empirical: lo * d,
        ratio: lo,
    })
}
