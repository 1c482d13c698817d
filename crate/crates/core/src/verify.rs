//! Invariant checks shared by the acceptance tests and the `verify` command.
//!
//! Every check returns a [`CheckOutcome`] instead of panicking so callers can
//! print a summary and choose their own exit behavior. Random samples come
//! from `ChaCha8Rng::seed_from_u64(seed)`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constants::{
    coercivity_lhs, constants_report, coupling_bound_constant, minimize_quotient, ratio_formula,
    ConstantsReport, QuotientMode,
};
use crate::energy::{energy, gradient, hessian_lower_bound, hessian_quadform, pair_norm, small_t_sign_scan, EnergyVariant};
use crate::error::Result;
use crate::field::{coupling_integral, Field};
use crate::forcing::{gaussian, make_forcing, scale_to_norm, Functional};
use crate::grid::Grid;
use crate::params::{MinimizeOpts, QuotientSpec, Regime, SystemParams};
use crate::report::{fmt_f64, Record};
use crate::spectral::{frac_laplacian, project_mean_out};

/// Result of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// The quantity compared against `limit` (worst case over samples).
    pub metric: f64,
    pub limit: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} {}: metric {} (limit {}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            fmt_f64(self.metric),
            fmt_f64(self.limit),
            self.detail
        )
    }

    pub fn record(&self) -> Record {
        Record::new()
            .with("check", self.name)
            .with("passed", self.passed)
            .with("metric", self.metric)
            .with("limit", self.limit)
            .with("detail", self.detail.clone())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sum of eight random plane waves with integer wave indices in `[-4, 4]`
/// and amplitudes decaying like `1/(1+|k|)`.
pub fn random_smooth(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> Field {
    let base = 2.0 * PI / grid.box_length();
    let waves: Vec<(Vec<f64>, f64, f64)> = (0..8)
        .map(|_| {
            let k: Vec<f64> = (0..grid.dimension()).map(|_| rng.gen_range(-4i32..=4) as f64).collect();
            let norm = k.iter().map(|x| x * x).sum::<f64>().sqrt();
            let amp = rng.gen_range(-1.0..1.0) / (1.0 + norm);
            (k, amp, rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    Field::from_fn(grid, |x| {
        waves
            .iter()
            .map(|(k, a, ph)| a * (base * x.iter().zip(k).map(|(xi, ki)| xi * ki).sum::<f64>() + ph).cos())
            .sum()
    })
}

/// `exp(random_smooth)`: strictly positive and smooth.
pub fn random_positive(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> Field {
    random_smooth(grid, rng).map(f64::exp)
}

/// Signature of a fractional-Laplacian implementation under test.
pub type Operator<'a> = &'a dyn Fn(&Field, f64) -> Result<Field>;

/// The library's own operator, for [`multiplier_exactness`].
pub fn library_operator(u: &Field, s: f64) -> Result<Field> {
    frac_laplacian(u, s)
}

/// Applies `op` to ten single Fourier modes (orders `s` and `1`) and compares
/// with `|xi|^{2s}` times the mode. Metric: worst relative max-norm error.
pub fn multiplier_exactness(grid: &Arc<Grid>, s: f64, op: Operator) -> Result<CheckOutcome> {
    let base = 2.0 * PI / grid.box_length();
    let n = grid.dimension();
    let half = (grid.points_per_axis() / 2) as i64;
    let mut worst: f64 = 0.0;
    for j in 1..=10i64 {
        // spread the modes over the resolved band, including the highest
        let k: Vec<i64> = (0..n)
            .map(|a| if a == 0 { (j * (half - 1) / 10).max(1) } else { (j + a as i64) % half })
            .collect();
        let xi = base * k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
        let mode = Field::from_fn(grid, |x| {
            (base * x.iter().zip(&k).map(|(xi, &ki)| xi * ki as f64).sum::<f64>()).cos()
        });
        for order in [s, 1.0] {
            let out = op(&mode, order)?;
            let expect = mode.scaled(xi.powf(2.0 * order));
            let err = out
                .values()
                .iter()
                .zip(expect.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let scale = expect.values().iter().map(|x| x.abs()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        }
    }
    let limit = 1e-12;
    Ok(CheckOutcome {
        name: "multiplier exactness",
        passed: worst <= limit,
        metric: worst,
        limit,
        detail: format!("10 single modes at s = {s} and s = 1"),
    })
}

/// Central difference (step `1e-5`) of the energy against the gradient
/// pairing, for `directions` random directions at each of `bases` random
/// positive base points. Metric: worst relative error.
pub fn gradient_check(
    params: &SystemParams,
    f: &Functional,
    g: &Functional,
    bases: usize,
    directions: usize,
    seed: u64,
) -> Result<CheckOutcome> {
    let grid = f.density().grid().clone();
    let mut rng = rng(seed);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..bases {
        let u = random_positive(&grid, &mut rng).scaled(0.5);
        let v = random_positive(&grid, &mut rng).scaled(0.5);
        let (gu, gv) = gradient(&u, &v, f, g, params, EnergyVariant::PositivePart)?;
        for _ in 0..directions {
            let phi = random_smooth(&grid, &mut rng);
            let psi = random_smooth(&grid, &mut rng);
            let e = |t: f64| -> Result<f64> {
                Ok(energy(
                    &u.add_scaled(t, &phi)?,
                    &v.add_scaled(t, &psi)?,
                    f,
                    g,
                    params,
                    EnergyVariant::PositivePart,
                )?
                .total)
            };
            let fd = (e(h)? - e(-h)?) / (2.0 * h);
            let exact = gu.dot(&phi)? + gv.dot(&psi)?;
            let rel = (fd - exact).abs() / exact.abs().max(fd.abs()).max(1e-300);
            worst = worst.max(rel);
        }
    }
    let limit = 1e-6;
    Ok(CheckOutcome {
        name: "gradient vs finite differences",
        passed: worst <= limit,
        metric: worst,
        limit,
        detail: format!("{bases} base points x {directions} directions, step {h}"),
    })
}

/// Base pair for the convexity certificate with `||(u, v)|| = rho`. Strictly
/// positive when `gamma = 1`; mean-zero when `gamma = 0`, whose energy space
/// excludes constants.
fn certificate_base(
    grid: &Arc<Grid>,
    params: &SystemParams,
    rho: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Field, Field)> {
    let (u, v) = match params.regime() {
        Regime::Subcritical => (random_positive(grid, rng), random_positive(grid, rng)),
        Regime::Critical => (
            project_mean_out(&random_positive(grid, rng)),
            project_mean_out(&random_positive(grid, rng)),
        ),
    };
    let n = pair_norm(&u, &v, params)?;
    Ok((u.scaled(rho / n), v.scaled(rho / n)))
}

/// Second variation at `samples` random points with `||(u,v)|| <= 0.95 r`
/// in random directions: positive, and above the explicit lower bound.
/// Metric: smallest `quadform / ||(phi,psi)||^2`.
pub fn hessian_certificate(
    grid: &Arc<Grid>,
    params: &SystemParams,
    s_scalar: f64,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut worst = f64::INFINITY;
    let mut bound_violations = 0;
    for _ in 0..samples {
        let rho = 0.95 * radius * rng.gen_range(0.0f64..1.0).max(1e-3);
        let (u, v) = certificate_base(grid, params, rho, &mut rng)?;
        let phi = random_smooth(grid, &mut rng);
        let psi = random_smooth(grid, &mut rng);
        let dn = pair_norm(&phi, &psi, params)?;
        let q = hessian_quadform(&u, &v, &phi, &psi, params)?;
        let bound = hessian_lower_bound(params, s_scalar, rho, dn);
        if q < bound - 1e-12 * dn * dn {
            bound_violations += 1;
        }
        worst = worst.min(q / (dn * dn));
    }
    Ok(CheckOutcome {
        name: "convexity certificate",
        passed: worst > 0.0 && bound_violations == 0,
        metric: worst,
        limit: 0.0,
        detail: format!("{samples} samples, {bound_violations} lower-bound violations"),
    })
}

/// `(int |u|^a |v|^b)^{1/p} <= S^{-1/2} ||(u, v)||` on random pairs.
/// Metric: largest ratio of the two sides.
pub fn coupling_bound_check(
    grid: &Arc<Grid>,
    params: &SystemParams,
    s_scalar: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let c = coupling_bound_constant(s_scalar);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (u, v) = certificate_base(grid, params, 1.0, &mut rng)?;
        let lhs = coupling_integral(&u, &v, params.alpha(), params.beta(), false)?.powf(1.0 / params.exponent());
        worst = worst.max(lhs / (c * pair_norm(&u, &v, params)?));
    }
    Ok(CheckOutcome {
        name: "coupling bound",
        passed: worst <= 1.0,
        metric: worst,
        limit: 1.0,
        detail: format!("{samples} random pairs, C = {}", fmt_f64(c)),
    })
}

/// Minimized vector/scalar quotient ratio against the closed form, relative
/// error at most `limit`.
pub fn constant_ratio_check(
    grid: &Arc<Grid>,
    spec: QuotientSpec,
    opts: MinimizeOpts,
    limit: f64,
) -> Result<CheckOutcome> {
    let scalar = minimize_quotient(grid, spec, QuotientMode::Scalar, opts)?;
    let vector = minimize_quotient(grid, spec, QuotientMode::Vector, opts)?;
    let measured = vector.value / scalar.value;
    let formula = ratio_formula(spec.alpha, spec.beta);
    let rel = (measured / formula - 1.0).abs();
    Ok(CheckOutcome {
        name: "vector/scalar constant ratio",
        passed: rel <= limit,
        metric: rel,
        limit,
        detail: format!(
            "alpha = {}, beta = {}: measured {} vs formula {}",
            spec.alpha,
            spec.beta,
            fmt_f64(measured),
            fmt_f64(formula)
        ),
    })
}

/// `K (S_vector/S_scalar)^{p/2} > 2` over `count` pairs with `alpha + beta = p`,
/// using the closed-form ratio. Metric: smallest `lhs - 2`.
pub fn coercivity_check(p: f64, count: usize) -> Result<CheckOutcome> {
    let span = p - 2.0;
    let mut margin = f64::INFINITY;
    for i in 1..=count {
        let alpha = 1.0 + span * i as f64 / (count + 1) as f64;
        let beta = p - alpha;
        let lhs = coercivity_lhs(alpha, beta, p, 1.0, ratio_formula(alpha, beta))?;
        margin = margin.min(lhs - 2.0);
    }
    Ok(CheckOutcome {
        name: "coercivity sweep",
        passed: margin > 0.0,
        metric: margin,
        limit: 0.0,
        detail: format!("{count} pairs with alpha + beta = {p}"),
    })
}

/// Energy along `t (bump, bump)` at `t = -1e-3, 1e-3` with the given forcing.
pub fn sign_check(params: &SystemParams, f: &Functional, g: &Functional) -> Result<CheckOutcome> {
    let grid = f.density().grid().clone();
    let width = 1.0_f64.max(4.0 * grid.spacing());
    let bump = Field::from_fn(&grid, |x| (-0.5 * x.iter().map(|c| c * c).sum::<f64>() / (width * width)).exp());
    let scan = small_t_sign_scan(&bump, &bump, f, g, params, &[-1e-3, 1e-3])?;
    let (neg, pos) = (scan.rows[0].1, scan.rows[1].1);
    Ok(CheckOutcome {
        name: "small-t sign dichotomy",
        passed: scan.passed(),
        metric: pos,
        limit: 0.0,
        detail: format!("E(+1e-3) = {}, E(-1e-3) = {}", fmt_f64(pos), fmt_f64(neg)),
    })
}

/// Gaussian density (unit width, centered) scaled to dual norm `fraction * d`.
pub fn gaussian_forcing(grid: &Arc<Grid>, params: &SystemParams, target: f64) -> Result<Functional> {
    let width = 1.0_f64.max(4.0 * grid.spacing());
    let raw = make_forcing(gaussian(grid, &vec![0.0; grid.dimension()], width, 1.0)?, params.s())?;
    scale_to_norm(&raw, target, params.regime())
}

/// Everything the `verify` command runs.
pub struct SuiteConfig<'a> {
    pub grid: Arc<Grid>,
    pub params: SystemParams,
    pub opts: MinimizeOpts,
    pub seed: u64,
    pub operator: Operator<'a>,
}

/// Runs all checks. Errors from a check become a failed outcome named after
/// the check, so one failure does not hide the others.
pub fn run_suite(cfg: &SuiteConfig) -> Result<(ConstantsReport, Vec<CheckOutcome>)> {
    let params = &cfg.params;
    let constants = constants_report(&cfg.grid, params, cfg.opts)?;
    let f = gaussian_forcing(&cfg.grid, params, 0.5 * constants.threshold)?;
    let mut out = Vec::new();
    let mut push = |name: &'static str, r: Result<CheckOutcome>| {
        out.push(r.unwrap_or_else(|e| CheckOutcome {
            name,
            passed: false,
            metric: f64::NAN,
            limit: f64::NAN,
            detail: format!("error: {e}"),
        }))
    };
    push("multiplier exactness", multiplier_exactness(&cfg.grid, params.s(), cfg.operator));
    push("gradient vs finite differences", gradient_check(params, &f, &f, 5, 20, cfg.seed));
    push(
        "convexity certificate",
        hessian_certificate(&cfg.grid, params, constants.s_scalar, constants.radius, 200, cfg.seed.wrapping_add(1)),
    );
    push(
        "coupling bound",
        coupling_bound_check(&cfg.grid, params, constants.s_scalar, 50, cfg.seed.wrapping_add(2)),
    );
    if params.regime() == Regime::Subcritical {
        push("vector/scalar constant ratio", constant_ratio_check(&cfg.grid, params.into(), cfg.opts, 0.02));
    } else {
        let rel = (constants.ratio_measured / constants.ratio_formula - 1.0).abs();
        push(
            "vector/scalar constant ratio",
            Ok(CheckOutcome {
                name: "vector/scalar constant ratio",
                passed: rel <= 0.02,
                metric: rel,
                limit: 0.02,
                detail: "paired bubble quotients".into(),
            }),
        );
    }
    push("coercivity sweep", coercivity_check(params.exponent(), 50));
    push("small-t sign dichotomy", sign_check(params, &f, &f));
    Ok((constants, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn library_operator_passes_and_a_corrupted_one_fails() {
        let g = make_grid(1, 64, 20.0).unwrap();
        assert!(multiplier_exactness(&g, 0.3, &library_operator).unwrap().passed);
        let bad = |u: &Field, s: f64| frac_laplacian(u, s).map(|f| f.scaled(1.0 + 1e-6));
        let out = multiplier_exactness(&g, 0.3, &bad).unwrap();
        assert!(!out.passed);
        assert!(out.line().starts_with("FAIL multiplier exactness"));
    }

    #[test]
    fn multiplier_check_in_three_dimensions() {
        let g = make_grid(3, 16, 6.0).unwrap();
        assert!(multiplier_exactness(&g, 0.7, &library_operator).unwrap().passed);
    }

    #[test]
    fn random_fields_are_reproducible() {
        let g = make_grid(2, 16, 5.0).unwrap();
        let a = random_smooth(&g, &mut rng(7));
        let b = random_smooth(&g, &mut rng(7));
        assert_eq!(a.values(), b.values());
        assert!(random_positive(&g, &mut rng(3)).min() > 0.0);
    }

    #[test]
    fn default_suite_passes() {
        let grid = make_grid(1, 64, 20.0).unwrap();
        let params = SystemParams::new(1, 0.25, 2.0, 2.0, Regime::Subcritical).unwrap();
        let cfg = SuiteConfig {
            grid,
            params,
            opts: MinimizeOpts::default(),
            seed: 1,
            operator: &library_operator,
        };
        let (_, checks) = run_suite(&cfg).unwrap();
        for c in &checks {
            assert!(c.passed, "{}", c.line());
        }
    }
}
