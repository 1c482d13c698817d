//! Sobolev-type constants and the closed-form quantities of the existence
//! argument: the vector/scalar ratio, the convexity radius, the coercivity
//! claim and a sufficient smallness threshold for the forcing.
//!
//! The quotient numerators use the energy-space norm of the regime: the
//! seminorm when `gamma = 0` and the full `H^s` norm when `gamma = 1`.
//! Minimization is a normalized gradient descent preconditioned by the
//! inverse of `(-Delta)^s + gamma`, with Armijo backtracking, so the
//! quotient value never increases.

use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::field::{coupling_integral, lp_norm, Field};
use crate::grid::Grid;
use crate::params::{MinimizeOpts, QuotientSpec, Regime, SystemParams};
use crate::profiles::{paired_minimizer, talenti_bubble, BubbleParams};
use crate::report::Record;
use crate::spectral::{regime_energy, regime_inverse};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;

/// `sign(x) |x|^e`, zero at zero.
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// `||u||^2 / ||u||_p^2` with `p = 2*_s` (critical) or `alpha + beta`.
pub fn sobolev_quotient(u: &Field, spec: QuotientSpec) -> Result<f64> {
    let p = spec.exponent();
    let denom = lp_norm(u, p)?;
    if denom == 0.0 {
        return Err(Error::ZeroField("Sobolev quotient"));
    }
    Ok(regime_energy(u, spec.s, spec.regime)? / (denom * denom))
}

/// `(||u||^2 + ||v||^2) / (int |u|^alpha |v|^beta)^{2/p}`.
pub fn vector_quotient(u: &Field, v: &Field, spec: QuotientSpec) -> Result<f64> {
    let p = spec.exponent();
    let coupling = coupling_integral(u, v, spec.alpha, spec.beta, false)?;
    if coupling <= 0.0 {
        return Err(Error::ZeroField("vector quotient coupling integral"));
    }
    let num = regime_energy(u, spec.s, spec.regime)? + regime_energy(v, spec.s, spec.regime)?;
    Ok(num / coupling.powf(2.0 / p))
}

/// Whether [`minimize_quotient`] works on one field or on a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientMode {
    Scalar,
    Vector,
}

/// Result of a quotient minimization.
#[derive(Debug, Clone)]
pub struct QuotientMinimum {
    pub u: Field,
    /// Second component in vector mode.
    pub v: Option<Field>,
    pub value: f64,
    pub iterations: usize,
    /// Quotient value after every accepted iteration, starting with the
    /// initial guess.
    pub history: Vec<f64>,
}

/// Numerical infimum of the scalar or vector quotient on `grid`.
///
/// Stops once the accepted relative change and the predicted first-order
/// relative decrease are both at most `opts.tol`.
///
/// The critical quotient has no minimizer on a periodic box (constants have
/// zero seminorm), so `gamma = 0` is rejected with [`Error::IllPosed`].
pub fn minimize_quotient(
    grid: &Arc<Grid>,
    spec: QuotientSpec,
    mode: QuotientMode,
    opts: MinimizeOpts,
) -> Result<QuotientMinimum> {
    if spec.regime == Regime::Critical {
        return Err(Error::IllPosed(
            "the homogeneous critical quotient tends to zero along constants on a periodic box; \
             use sharp_sobolev_constant or bubble quotients instead"
                .into(),
        ));
    }
    let mut state = match mode {
        QuotientMode::Scalar => QuotientDescent::scalar(grid, spec, initial_profile(grid, 1.0))?,
        QuotientMode::Vector => QuotientDescent::vector(
            grid,
            spec,
            initial_profile(grid, 1.0),
            initial_profile(grid, 1.3).scaled(0.7),
        )?,
    };
    let mut history = vec![state.value];
    for it in 1..=opts.max_iter {
        let step = state.step()?;
        history.push(state.value);
        let rel_change = step.decrease / state.value;
        if rel_change <= opts.tol && step.predicted / state.value <= opts.tol {
            return Ok(state.finish(it, history));
        }
        if step.stalled {
            return Err(Error::NotConverged {
                what: "quotient descent (line search stalled)",
                iterations: it,
                last_change: rel_change,
            });
        }
    }
    Err(Error::NotConverged {
        what: "quotient descent",
        iterations: opts.max_iter,
        last_change: history
            .windows(2)
            .last()
            .map(|w| (w[0] - w[1]) / w[1])
            .unwrap_or(f64::NAN),
    })
}

/// Centered Gaussian of width `scale * clamp(1, 2h, L/16)`.
pub(crate) fn initial_profile(grid: &Arc<Grid>, scale: f64) -> Field {
    let width = scale * 1.0_f64.clamp(2.0 * grid.spacing(), grid.box_length() / 16.0);
    Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        (-0.5 * r2 / (width * width)).exp()
    })
}

pub(crate) struct StepInfo {
    /// Accepted decrease of the quotient.
    pub decrease: f64,
    /// First-order decrease a unit step would give, `2 ||g||_A^2`.
    pub predicted: f64,
    pub stalled: bool,
}

/// Preconditioned normalized descent on a scalar or vector quotient.
pub(crate) struct QuotientDescent {
    spec: QuotientSpec,
    pub u: Field,
    pub v: Option<Field>,
    pub value: f64,
    step: f64,
    /// Preconditioned gradient from the last evaluation.
    pub gradient_u: Option<Field>,
}

impl QuotientDescent {
    pub fn scalar(grid: &Arc<Grid>, spec: QuotientSpec, start: Field) -> Result<Self> {
        debug_assert!(start.grid() == grid || **start.grid() == **grid);
        let u = normalize_scalar(&start, spec.exponent())?;
        let value = regime_energy(&u, spec.s, spec.regime)?;
        Ok(Self {
            spec,
            u,
            v: None,
            value,
            step: 1.0,
            gradient_u: None,
        })
    }

    pub fn vector(grid: &Arc<Grid>, spec: QuotientSpec, u0: Field, v0: Field) -> Result<Self> {
        debug_assert!(u0.grid() == grid || **u0.grid() == **grid);
        let (u, v) = normalize_pair(&u0, &v0, spec)?;
        let value = regime_energy(&u, spec.s, spec.regime)? + regime_energy(&v, spec.s, spec.regime)?;
        Ok(Self {
            spec,
            u,
            v: Some(v),
            value,
            step: 1.0,
            gradient_u: None,
        })
    }

    /// Preconditioned gradient(s) at the current normalized iterate, and
    /// `||g||_A^2`.
    fn gradient(&self) -> Result<(Field, Option<Field>, f64)> {
        let s = self.spec.s;
        let regime = self.spec.regime;
        let r = self.value;
        match &self.v {
            None => {
                let p = self.spec.exponent();
                let nl = self.u.map(|x| signed_pow(x, p - 1.0));
                let g = self.u.add_scaled(-r, &regime_inverse(&nl, s, regime)?)?;
                let norm = regime_energy(&g, s, regime)?;
                Ok((g, None, norm))
            }
            Some(v) => {
                let (a, b, p) = (self.spec.alpha, self.spec.beta, self.spec.exponent());
                let nu: Vec<f64> = self
                    .u
                    .values()
                    .iter()
                    .zip(v.values())
                    .map(|(&x, &y)| signed_pow(x, a - 1.0) * y.abs().powf(b))
                    .collect();
                let nv: Vec<f64> = self
                    .u
                    .values()
                    .iter()
                    .zip(v.values())
                    .map(|(&x, &y)| signed_pow(y, b - 1.0) * x.abs().powf(a))
                    .collect();
                let grid = self.u.grid();
                let gu = self.u.add_scaled(
                    -r * a / p,
                    &regime_inverse(&Field::from_raw(grid, nu), s, regime)?,
                )?;
                let gv = v.add_scaled(
                    -r * b / p,
                    &regime_inverse(&Field::from_raw(grid, nv), s, regime)?,
                )?;
                let norm = regime_energy(&gu, s, regime)? + regime_energy(&gv, s, regime)?;
                Ok((gu, Some(gv), norm))
            }
        }
    }

    pub fn step(&mut self) -> Result<StepInfo> {
        let (gu, gv, gnorm) = self.gradient()?;
        let predicted = 2.0 * gnorm;
        self.gradient_u = Some(gu.clone());
        let mut tau = self.step;
        loop {
            let trial_u = self.u.add_scaled(-tau, &gu)?;
            let trial = match (&self.v, &gv) {
                (Some(v), Some(gv)) => {
                    let trial_v = v.add_scaled(-tau, gv)?;
                    normalize_pair(&trial_u, &trial_v, self.spec).and_then(|(u, v)| {
                        let val = regime_energy(&u, self.spec.s, self.spec.regime)?
                            + regime_energy(&v, self.spec.s, self.spec.regime)?;
                        Ok((u, Some(v), val))
                    })
                }
                _ => normalize_scalar(&trial_u, self.spec.exponent()).and_then(|u| {
                    let val = regime_energy(&u, self.spec.s, self.spec.regime)?;
                    Ok((u, None, val))
                }),
            };
            if let Ok((u, v, val)) = trial {
                if val <= self.value - ARMIJO * tau * predicted {
                    let decrease = self.value - val;
                    self.u = u;
                    self.v = v;
                    self.value = val;
                    self.step = (2.0 * tau).min(1.0);
                    return Ok(StepInfo {
                        decrease,
                        predicted,
                        stalled: false,
                    });
                }
            }
            tau *= 0.5;
            if tau < MIN_STEP {
                self.step = 1.0;
                return Ok(StepInfo {
                    decrease: 0.0,
                    predicted,
                    stalled: true,
                });
            }
        }
    }

    fn finish(self, iterations: usize, history: Vec<f64>) -> QuotientMinimum {
        QuotientMinimum {
            u: self.u,
            v: self.v,
            value: self.value,
            iterations,
            history,
        }
    }
}

fn normalize_scalar(u: &Field, p: f64) -> Result<Field> {
    let n = lp_norm(u, p)?;
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroField("quotient iterate collapsed"));
    }
    Ok(u.scaled(1.0 / n))
}

fn normalize_pair(u: &Field, v: &Field, spec: QuotientSpec) -> Result<(Field, Field)> {
    let c = coupling_integral(u, v, spec.alpha, spec.beta, false)?;
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::ZeroField("vector quotient iterate collapsed"));
    }
    let k = c.powf(-1.0 / spec.exponent());
    Ok((u.scaled(k), v.scaled(k)))
}

/// `(alpha/beta)^{beta/(alpha+beta)} + (alpha/beta)^{-alpha/(alpha+beta)}`,
/// the ratio of the vector constant to the scalar one.
pub fn ratio_formula(alpha: f64, beta: f64) -> f64 {
    let q = alpha / beta;
    let sum = alpha + beta;
    q.powf(beta / sum) + q.powf(-alpha / sum)
}

/// `ratio_formula(alpha, beta) - 1`, positive for all admissible pairs.
pub fn verify_strictness(alpha: f64, beta: f64) -> f64 {
    ratio_formula(alpha, beta) - 1.0
}

/// `K = alpha^2 + beta^2 + alpha beta - p`.
pub fn coercivity_factor(alpha: f64, beta: f64, p: f64) -> f64 {
    alpha * alpha + beta * beta + alpha * beta - p
}

/// `K (S_vector / S_scalar)^{p/2}`; the existence argument needs this `> 2`.
pub fn coercivity_lhs(alpha: f64, beta: f64, p: f64, s_scalar: f64, s_vector: f64) -> Result<f64> {
    let k = coercivity_factor(alpha, beta, p);
    if k <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "alpha^2 + beta^2 + alpha beta - p = {k} is not positive"
        )));
    }
    Ok(k * (s_vector / s_scalar).powf(0.5 * p))
}

/// Radius of the ball in which the second variation is positive definite:
/// `r = (p/K)^{1/(p-2)} S^{p/(2(p-2))}`, which is `S^{N/(4s)}` scaling at
/// `p = 2*_s`.
pub fn convexity_radius(params: &SystemParams, s_scalar: f64) -> f64 {
    radius_for(params.alpha(), params.beta(), params.exponent(), s_scalar)
}

pub(crate) fn radius_for(alpha: f64, beta: f64, p: f64, s_scalar: f64) -> f64 {
    let k = coercivity_factor(alpha, beta, p);
    (p / k).powf(1.0 / (p - 2.0)) * s_scalar.powf(p / (2.0 * (p - 2.0)))
}

/// `A = 1/2 - (1/K)(S_scalar/S_vector)^{p/2}`, the coefficient of `r^2` in
/// the lower bound for the energy on the sphere of radius `r`.
pub fn boundary_coefficient(params: &SystemParams, s_scalar: f64, s_vector: f64) -> f64 {
    let p = params.exponent();
    let k = coercivity_factor(params.alpha(), params.beta(), p);
    0.5 - (s_scalar / s_vector).powf(0.5 * p) / k
}

/// A sufficient forcing bound: `d = A r / 2`. If both dual norms are below
/// `d`, the energy is positive on the sphere of radius `r`.
pub fn smallness_threshold(params: &SystemParams, r: f64, s_scalar: f64, s_vector: f64) -> Result<f64> {
    let a = boundary_coefficient(params, s_scalar, s_vector);
    if a <= 0.0 {
        return Err(Error::SmallnessFails(format!(
            "boundary coefficient {a} <= 0 at S_scalar = {s_scalar}, S_vector = {s_vector}"
        )));
    }
    Ok(0.5 * a * r)
}

/// Constant `C = S^{-1/2}` in `(int |u|^a |v|^b)^{1/p} <= C ||(u, v)||`.
pub fn coupling_bound_constant(s_scalar: f64) -> f64 {
    s_scalar.powf(-0.5)
}

/// Sharp constant of `||u||_{H^s dot}^2 >= S ||u||_{2*_s}^2` on R^N for the
/// Fourier seminorm:
/// `2^{2s} pi^s Gamma((N+2s)/2) / Gamma((N-2s)/2) (Gamma(N/2)/Gamma(N))^{2s/N}`.
pub fn sharp_sobolev_constant(dimension: usize, s: f64) -> Result<f64> {
    let n = dimension as f64;
    if !(s > 0.0 && 2.0 * s < n) {
        return Err(Error::InvalidParams(format!("need 0 < 2s < N, got N = {n}, s = {s}")));
    }
    Ok(4f64.powf(s) * std::f64::consts::PI.powf(s) * gamma(0.5 * (n + 2.0 * s))
        / gamma(0.5 * (n - 2.0 * s))
        * (gamma(0.5 * n) / gamma(n)).powf(2.0 * s / n))
}

/// Estimated constants and derived proof quantities for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsReport {
    pub s_scalar: f64,
    pub s_vector: f64,
    pub ratio_measured: f64,
    pub ratio_formula: f64,
    pub radius: f64,
    pub threshold: f64,
    pub coercivity_lhs: f64,
    pub regime: Regime,
    pub dimension: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
    /// How `s_scalar` was obtained.
    pub source: &'static str,
    pub scalar_iterations: usize,
    pub vector_iterations: usize,
}

impl ConstantsReport {
    pub fn record(&self) -> Record {
        Record::new()
            .with("S_scalar", self.s_scalar)
            .with("S_vector", self.s_vector)
            .with("ratio_measured", self.ratio_measured)
            .with("ratio_formula", self.ratio_formula)
            .with("radius", self.radius)
            .with("threshold", self.threshold)
            .with("coercivity_lhs", self.coercivity_lhs)
            .with("regime", self.regime.gamma())
            .with("dimension", self.dimension)
            .with("points_per_axis", self.points_per_axis)
            .with("box_length", self.box_length)
            .with("source", self.source)
            .with("scalar_iterations", self.scalar_iterations)
            .with("vector_iterations", self.vector_iterations)
    }
}

/// Measures the constants on `grid` and evaluates the proof quantities.
///
/// Subcritical: both quotients are minimized. Critical: the scalar constant
/// is the sharp value on R^N, and the ratio is measured on the paired
/// bubble, because the periodic box has no critical minimizer.
pub fn constants_report(
    grid: &Arc<Grid>,
    params: &SystemParams,
    opts: MinimizeOpts,
) -> Result<ConstantsReport> {
    let spec = QuotientSpec::from(params);
    let (s_scalar, s_vector, source, it_s, it_v) = match params.regime() {
        Regime::Subcritical => {
            let scalar = minimize_quotient(grid, spec, QuotientMode::Scalar, opts)?;
            let vector = minimize_quotient(grid, spec, QuotientMode::Vector, opts)?;
            (scalar.value, vector.value, "minimized", scalar.iterations, vector.iterations)
        }
        Regime::Critical => {
            let s = sharp_sobolev_constant(params.dimension(), params.s())?;
            let bubble = talenti_bubble(grid, params, &BubbleParams::centered(grid, 1.0))?;
            let (bu, bv) = paired_minimizer(&bubble, params.alpha(), params.beta())?;
            let ratio = vector_quotient(&bu, &bv, spec)? / sobolev_quotient(&bubble, spec)?;
            (s, ratio * s, "sharp constant, paired bubble ratio", 0, 0)
        }
    };
    let radius = convexity_radius(params, s_scalar);
    let threshold = smallness_threshold(params, radius, s_scalar, s_vector)?;
    let coercivity = coercivity_lhs(params.alpha(), params.beta(), params.exponent(), s_scalar, s_vector)?;
    Ok(ConstantsReport {
        s_scalar,
        s_vector,
        ratio_measured: s_vector / s_scalar,
        ratio_formula: ratio_formula(params.alpha(), params.beta()),
        radius,
        threshold,
        coercivity_lhs: coercivity,
        regime: params.regime(),
        dimension: grid.dimension(),
        points_per_axis: grid.points_per_axis(),
        box_length: grid.box_length(),
        source,
        scalar_iterations: it_s,
        vector_iterations: it_v,
    })
}

/// One row of the closed-form sweep over `alpha + beta = p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub ratio_formula: f64,
    pub strictness: f64,
    pub coercivity_lhs: f64,
    pub radius: f64,
    pub threshold: f64,
}

impl SweepRow {
    pub fn record(&self) -> Record {
        Record::new()
            .with("alpha", self.alpha)
            .with("beta", self.beta)
            .with("ratio_formula", self.ratio_formula)
            .with("strictness", self.strictness)
            .with("coercivity_lhs", self.coercivity_lhs)
            .with("radius", self.radius)
            .with("threshold", self.threshold)
    }
}

/// `count` evenly spaced `alpha` strictly inside `(1, p - 1)`, `beta = p - alpha`,
/// with ratios from [`ratio_formula`] and radius/threshold at `s_scalar`.
pub fn coercivity_sweep(p: f64, count: usize, s_scalar: f64) -> Result<Vec<SweepRow>> {
    if !(p > 2.0) {
        return Err(Error::InvalidParams(format!("sweep needs p > 2, got {p}")));
    }
    let span = p - 2.0;
    (1..=count)
        .map(|i| {
            let alpha = 1.0 + span * i as f64 / (count + 1) as f64;
            let beta = p - alpha;
            let ratio = ratio_formula(alpha, beta);
            let lhs = coercivity_lhs(alpha, beta, p, 1.0, ratio)?;
            let k = coercivity_factor(alpha, beta, p);
            let radius = radius_for(alpha, beta, p, s_scalar);
            let a = 0.5 - ratio.powf(-0.5 * p) / k;
            Ok(SweepRow {
                alpha,
                beta,
                ratio_formula: ratio,
                strictness: ratio - 1.0,
                coercivity_lhs: lhs,
                radius,
                threshold: 0.5 * a * radius,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn sub(alpha: f64, beta: f64) -> QuotientSpec {
        QuotientSpec::new(1, 0.25, alpha, beta, Regime::Subcritical).unwrap()
    }

    #[test]
    fn ratio_formula_values() {
        assert_eq!(ratio_formula(2.0, 2.0), 2.0);
        let expect = 3f64.powf(0.25) + 3f64.powf(-0.75);
        assert!((ratio_formula(3.0, 1.0) - expect).abs() < 1e-15);
        assert!((ratio_formula(3.0, 1.0) - 1.754_765_350_603_323).abs() < 1e-12);
        for (a, b) in [(3.0, 1.0), (1.1, 5.0), (2.5, 1.5)] {
            assert!((ratio_formula(a, b) - ratio_formula(b, a)).abs() < 1e-14);
        }
    }

    #[test]
    fn strictness_values() {
        assert_eq!(verify_strictness(2.0, 2.0), 1.0);
        assert!((verify_strictness(3.0, 1.0) - 0.754_765_350_603_323).abs() < 1e-12);
        assert!(verify_strictness(1.1, 5.0) > 0.0);
    }

    #[test]
    fn coercivity_examples() {
        assert_eq!(coercivity_lhs(2.0, 2.0, 4.0, 1.0, 2.0).unwrap(), 32.0);
        let v = coercivity_lhs(3.0, 1.0, 4.0, 1.0, ratio_formula(3.0, 1.0)).unwrap();
        assert!((v - 9.0 * ratio_formula(3.0, 1.0).powi(2)).abs() < 1e-12);
        assert!((v - 27.712).abs() < 1e-2);
        assert!(coercivity_lhs(1.0, 1.0, 4.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn radius_examples() {
        let crit = SystemParams::new(2, 0.5, 2.0, 2.0, Regime::Critical).unwrap();
        assert!((convexity_radius(&crit, 1.0) - 0.5f64.sqrt()).abs() < 1e-15);
        // N/(4s) = 1: doubling S doubles r
        assert!((convexity_radius(&crit, 2.0) - 2.0 * 0.5f64.sqrt()).abs() < 1e-15);
        let subc = SystemParams::new(1, 0.25, 2.0, 2.0, Regime::Subcritical).unwrap();
        assert!((convexity_radius(&subc, 1.0) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn critical_radius_exponent_is_n_over_4s() {
        let p = SystemParams::new(3, 0.5, 1.5, 1.5, Regime::Critical).unwrap();
        let r1 = convexity_radius(&p, 1.0);
        let r2 = convexity_radius(&p, 2.0);
        assert!(((r2 / r1).log2() - 3.0 / (4.0 * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn threshold_example() {
        let p = SystemParams::new(2, 0.5, 2.0, 2.0, Regime::Critical).unwrap();
        assert!((boundary_coefficient(&p, 1.0, 2.0) - 15.0 / 32.0).abs() < 1e-15);
        let d = smallness_threshold(&p, 1.0, 1.0, 2.0).unwrap();
        assert!((d - 15.0 / 64.0).abs() < 1e-15);
        // A r^2 - r (|f| + |g|) at |f| = |g| = d/2 equals A r^2 / 2
        let a = boundary_coefficient(&p, 1.0, 2.0);
        let r = 0.8;
        let d = smallness_threshold(&p, r, 1.0, 2.0).unwrap();
        assert!((a * r * r - r * d - 0.5 * a * r * r).abs() < 1e-15);
        // a vector constant no larger than the scalar one breaks the bound
        assert!(matches!(smallness_threshold(&p, 1.0, 1.0, 0.1), Err(Error::SmallnessFails(_))));
    }

    #[test]
    fn sharp_constant_matches_classical_value() {
        // N = 3, s = 1: S = 3 (pi/2)^{4/3}
        let s = sharp_sobolev_constant(3, 1.0).unwrap();
        assert!((s - 3.0 * (std::f64::consts::FRAC_PI_2).powf(4.0 / 3.0)).abs() < 1e-10);
    }

    #[test]
    fn quotient_homogeneity() {
        let g = make_grid(1, 64, 20.0).unwrap();
        let u = Field::from_fn(&g, |x| (-x[0] * x[0] / 3.0).exp() + 0.1 * x[0].sin());
        let spec = sub(1.5, 1.5);
        let q = sobolev_quotient(&u, spec).unwrap();
        for t in [-3.0, 0.01, 7.5] {
            let qt = sobolev_quotient(&u.scaled(t), spec).unwrap();
            assert!(((qt - q) / q).abs() < 1e-12);
        }
        assert!(sobolev_quotient(&Field::zeros(&g), spec).is_err());
    }

    #[test]
    fn vector_quotient_on_the_diagonal() {
        let g = make_grid(1, 64, 20.0).unwrap();
        let w = Field::from_fn(&g, |x| 1.0 / (1.0 + x[0] * x[0]));
        let spec = sub(1.5, 1.5);
        let vq = vector_quotient(&w, &w, spec).unwrap();
        let sq = sobolev_quotient(&w, spec).unwrap();
        assert!((vq / sq - 2.0).abs() < 1e-12);
        let vt = vector_quotient(&w.scaled(3.0), &w.scaled(3.0), spec).unwrap();
        assert!(((vt - vq) / vq).abs() < 1e-12);
        assert!(matches!(
            vector_quotient(&w, &Field::zeros(&g), spec),
            Err(Error::ZeroField(_))
        ));
    }

    #[test]
    fn critical_minimization_is_rejected() {
        let g = make_grid(1, 64, 20.0).unwrap();
        let spec = QuotientSpec::new(1, 0.25, 2.0, 2.0, Regime::Critical).unwrap();
        assert!(matches!(
            minimize_quotient(&g, spec, QuotientMode::Scalar, MinimizeOpts::default()),
            Err(Error::IllPosed(_))
        ));
    }

    #[test]
    fn scalar_descent_is_monotone_and_converges() {
        let g = make_grid(1, 128, 40.0).unwrap();
        let m = minimize_quotient(&g, sub(1.5, 1.5), QuotientMode::Scalar, MinimizeOpts::default())
            .unwrap();
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.u.min() > 0.0);
        // the minimizer beats a few other positive profiles
        for width in [0.5, 2.0, 6.0] {
            let trial = Field::from_fn(&g, |x| (-x[0] * x[0] / (2.0 * width * width)).exp());
            assert!(sobolev_quotient(&trial, sub(1.5, 1.5)).unwrap() > m.value);
        }
    }

    #[test]
    fn vector_descent_recovers_the_diagonal_when_exponents_agree() {
        let g = make_grid(1, 128, 40.0).unwrap();
        let opts = MinimizeOpts { tol: 1e-12, max_iter: 5000 };
        let m = minimize_quotient(&g, sub(1.5, 1.5), QuotientMode::Vector, opts).unwrap();
        let v = m.v.unwrap();
        let diff = m.u.sub(&v).unwrap().l2_norm() / m.u.l2_norm();
        assert!(diff <= 1e-3, "relative difference {diff}");
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn sweep_has_requested_rows() {
        let rows = coercivity_sweep(4.0, 50, 1.0).unwrap();
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| r.alpha > 1.0 && r.beta > 1.0 && r.coercivity_lhs > 2.0));
        assert!(coercivity_sweep(2.0, 10, 1.0).is_err());
    }
}
