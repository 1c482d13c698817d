//! The system energy, its gradient, and its second variation.
//!
//! ```text
//! E(u, v) = 1/2 (||u||^2 + ||v||^2) - (1/p) int c(u, v) - <f, u> - <g, v>
//! ```
//!
//! with the regime norm, `p = 2*_s` or `alpha + beta`, and coupling density
//! `c = |u|^alpha |v|^beta` ([`EnergyVariant::Absolute`]) or
//! `c = u_+^alpha v_+^beta` ([`EnergyVariant::PositivePart`]).

use crate::error::{Error, Result};
use crate::field::{coupling_integral, pos_pow, Field};
use crate::forcing::Functional;
use crate::params::SystemParams;
use crate::report::{fmt_f64, Record};
use crate::spectral::{regime_energy, regime_operator};

/// Which coupling density the energy uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyVariant {
    /// `|u|^alpha |v|^beta`.
    Absolute,
    /// `u_+^alpha v_+^beta`; its minimizers are nonnegative.
    PositivePart,
}

impl EnergyVariant {
    fn positive_parts(self) -> bool {
        self == EnergyVariant::PositivePart
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `1/2 ||(u, v)||^2`.
    pub quadratic: f64,
    /// `(1/p) int c(u, v)`.
    pub coupling: f64,
    /// `<f, u> + <g, v>`.
    pub forcing: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn record(&self) -> Record {
        Record::new()
            .with("quadratic", self.quadratic)
            .with("coupling", self.coupling)
            .with("forcing", self.forcing)
            .with("total", self.total)
    }
}

/// `||(u, v)||` in the regime norm.
pub fn pair_norm(u: &Field, v: &Field, params: &SystemParams) -> Result<f64> {
    u.check_grid(v)?;
    let (s, regime) = (params.s(), params.regime());
    Ok((regime_energy(u, s, regime)? + regime_energy(v, s, regime)?).sqrt())
}

fn check_all(u: &Field, v: &Field, f: &Functional, g: &Functional) -> Result<()> {
    u.check_grid(v)?;
    u.check_grid(f.density())?;
    u.check_grid(g.density())
}

pub fn energy(
    u: &Field,
    v: &Field,
    f: &Functional,
    g: &Functional,
    params: &SystemParams,
    variant: EnergyVariant,
) -> Result<EnergyBreakdown> {
    check_all(u, v, f, g)?;
    let quadratic = 0.5 * pair_norm(u, v, params)?.powi(2);
    let coupling = coupling_integral(u, v, params.alpha(), params.beta(), variant.positive_parts())?
        / params.exponent();
    let forcing = f.pair(u)? + g.pair(v)?;
    Ok(EnergyBreakdown {
        quadratic,
        coupling,
        forcing,
        total: quadratic - coupling - forcing,
    })
}

/// Pointwise derivatives `(d/du, d/dv)` of the coupling density.
fn coupling_derivatives(
    u: &Field,
    v: &Field,
    params: &SystemParams,
    variant: EnergyVariant,
) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (params.alpha(), params.beta());
    let pairs = u.values().iter().zip(v.values());
    match variant {
        EnergyVariant::PositivePart => pairs
            .map(|(&x, &y)| {
                (
                    a * pos_pow(x, a - 1.0) * pos_pow(y, b),
                    b * pos_pow(y, b - 1.0) * pos_pow(x, a),
                )
            })
            .unzip(),
        EnergyVariant::Absolute => pairs
            .map(|(&x, &y)| {
                let du = if x == 0.0 { 0.0 } else { a * x.signum() * x.abs().powf(a - 1.0) * y.abs().powf(b) };
                let dv = if y == 0.0 { 0.0 } else { b * y.signum() * y.abs().powf(b - 1.0) * x.abs().powf(a) };
                (du, dv)
            })
            .unzip(),
    }
}

/// `L^2` representer of the first variation:
/// `(A u - (1/p) d_u c - f, A v - (1/p) d_v c - g)` with `A = (-Delta)^s + gamma`.
pub fn gradient(
    u: &Field,
    v: &Field,
    f: &Functional,
    g: &Functional,
    params: &SystemParams,
    variant: EnergyVariant,
) -> Result<(Field, Field)> {
    check_all(u, v, f, g)?;
    let (s, regime, p) = (params.s(), params.regime(), params.exponent());
    let (du, dv) = coupling_derivatives(u, v, params, variant);
    let grid = u.grid();
    let gu = regime_operator(u, s, regime)?
        .add_scaled(-1.0 / p, &Field::from_raw(grid, du))?
        .sub(f.density())?;
    let gv = regime_operator(v, s, regime)?
        .add_scaled(-1.0 / p, &Field::from_raw(grid, dv))?
        .sub(g.density())?;
    Ok((gu, gv))
}

/// `(||G_u||_2^2 + ||G_v||_2^2)^{1/2}`.
pub fn pair_l2_norm(a: &Field, b: &Field) -> f64 {
    (a.l2_norm().powi(2) + b.l2_norm().powi(2)).sqrt()
}

/// Second variation of the positive-part energy at `(u, v)` in direction
/// `(phi, psi)`:
///
/// ```text
/// ||(phi, psi)||^2 - (1/p) int [ a(a-1) u_+^{a-2} v_+^b phi^2
///                              + b(b-1) u_+^a v_+^{b-2} psi^2
///                              + 2ab u_+^{a-1} v_+^{b-1} phi psi ]
/// ```
///
/// Negative powers of zero contribute zero.
pub fn hessian_quadform(
    u: &Field,
    v: &Field,
    phi: &Field,
    psi: &Field,
    params: &SystemParams,
) -> Result<f64> {
    u.check_grid(v)?;
    u.check_grid(phi)?;
    u.check_grid(psi)?;
    let (a, b, p) = (params.alpha(), params.beta(), params.exponent());
    let mut integral = 0.0;
    for (((&x, &y), &h), &k) in u.values().iter().zip(v.values()).zip(phi.values()).zip(psi.values()) {
        integral += a * (a - 1.0) * pos_pow(x, a - 2.0) * pos_pow(y, b) * h * h
            + b * (b - 1.0) * pos_pow(x, a) * pos_pow(y, b - 2.0) * k * k
            + 2.0 * a * b * pos_pow(x, a - 1.0) * pos_pow(y, b - 1.0) * h * k;
    }
    integral *= u.grid().cell_volume();
    let q = pair_norm(phi, psi, params)?.powi(2) - integral / p;
    if !q.is_finite() {
        return Err(Error::NonFinite("second variation"));
    }
    Ok(q)
}

/// `alpha(alpha-1) + beta(beta-1) + alpha beta`.
pub fn hessian_factor(alpha: f64, beta: f64) -> f64 {
    alpha * (alpha - 1.0) + beta * (beta - 1.0) + alpha * beta
}

/// Lower bound for [`hessian_quadform`]:
/// `(1 - (S^{-p/2}/p) ||(u,v)||^{p-2} K) ||(phi, psi)||^2`,
/// `K = alpha(alpha-1) + beta(beta-1) + alpha beta`.
pub fn hessian_lower_bound(params: &SystemParams, s_scalar: f64, base_norm: f64, direction_norm: f64) -> f64 {
    let p = params.exponent();
    let k = hessian_factor(params.alpha(), params.beta());
    (1.0 - s_scalar.powf(-0.5 * p) / p * base_norm.powf(p - 2.0) * k) * direction_norm * direction_norm
}

/// Energy along the ray `t -> (t u, t v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignScan {
    /// `(t, E(t u, t v))` in the order given.
    pub rows: Vec<(f64, f64)>,
    /// Energy at the smallest positive `t` is negative.
    pub negative_side_ok: bool,
    /// Energy at the negative `t` of smallest magnitude is positive.
    pub positive_side_ok: bool,
    /// The forcing is zero, so the linear term vanishes and no sign is
    /// asserted.
    pub degenerate: bool,
    /// The offending `t` if a side failed.
    pub failure: Option<f64>,
}

impl SignScan {
    pub fn passed(&self) -> bool {
        !self.degenerate && self.negative_side_ok && self.positive_side_ok
    }

    /// CSV rows `t,energy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,energy\n");
        for (t, e) in &self.rows {
            out.push_str(&format!("{},{}\n", fmt_f64(*t), fmt_f64(*e)));
        }
        out
    }
}

/// Evaluates the positive-part energy at `(t u, t v)` for each `t` and checks
/// that it is negative for small `t > 0` and positive for small `t < 0`.
pub fn small_t_sign_scan(
    u: &Field,
    v: &Field,
    f: &Functional,
    g: &Functional,
    params: &SystemParams,
    t_values: &[f64],
) -> Result<SignScan> {
    check_all(u, v, f, g)?;
    if u.min() <= 0.0 || v.min() < 0.0 {
        return Err(Error::InvalidParams(
            "sign scan needs u > 0 and v >= 0 pointwise".into(),
        ));
    }
    let mut rows = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let e = energy(&u.scaled(t), &v.scaled(t), f, g, params, EnergyVariant::PositivePart)?;
        rows.push((t, e.total));
    }
    let degenerate = f.density().is_zero() && g.density().is_zero();
    let smallest_pos = rows
        .iter()
        .filter(|(t, _)| *t > 0.0)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .copied();
    let smallest_neg = rows
        .iter()
        .filter(|(t, _)| *t < 0.0)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .copied();
    let negative_side_ok = smallest_pos.is_some_and(|(_, e)| e < 0.0);
    let positive_side_ok = smallest_neg.is_some_and(|(_, e)| e > 0.0);
    let failure = if !negative_side_ok {
        smallest_pos.map(|(t, _)| t)
    } else if !positive_side_ok {
        smallest_neg.map(|(t, _)| t)
    } else {
        None
    };
    Ok(SignScan {
        rows,
        negative_side_ok,
        positive_side_ok,
        degenerate,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{gaussian, make_forcing};
    use crate::grid::make_grid;
    use crate::params::Regime;
    use std::sync::Arc;

    fn setup() -> (Arc<crate::grid::Grid>, SystemParams, Functional) {
        let g = make_grid(1, 64, 20.0).unwrap();
        let p = SystemParams::new(1, 0.25, 2.0, 2.0, Regime::Subcritical).unwrap();
        let f = make_forcing(gaussian(&g, &[0.0], 1.0, 0.1).unwrap(), 0.25).unwrap();
        (g, p, f)
    }

    #[test]
    fn energy_at_origin_is_zero() {
        let (g, p, f) = setup();
        let z = Field::zeros(&g);
        let e = energy(&z, &z, &f, &f, &p, EnergyVariant::PositivePart).unwrap();
        assert_eq!(e.total, 0.0);
        let (gu, gv) = gradient(&z, &z, &f, &f, &p, EnergyVariant::Absolute).unwrap();
        for (a, b) in gu.values().iter().zip(f.density().values()) {
            assert!((a + b).abs() < 1e-15);
        }
        assert_eq!(gu.values(), gv.values());
    }

    #[test]
    fn positive_parts_kill_negative_coupling() {
        let (g, p, _) = setup();
        let zero_forcing = make_forcing(gaussian(&g, &[0.0], 1.0, 1.0).unwrap(), 0.25).unwrap();
        let u = Field::from_fn(&g, |x| -1.0 - (-x[0] * x[0]).exp());
        let e = energy(&u, &u, &zero_forcing, &zero_forcing, &p, EnergyVariant::PositivePart).unwrap();
        assert_eq!(e.coupling, 0.0);
        assert!((e.total - (e.quadratic - e.forcing)).abs() < 1e-12);
        let ea = energy(&u, &u, &zero_forcing, &zero_forcing, &p, EnergyVariant::Absolute).unwrap();
        assert!(ea.coupling > 0.0);
    }

    #[test]
    fn variants_agree_on_nonnegative_pairs() {
        let (g, p, f) = setup();
        let u = Field::from_fn(&g, |x| (-x[0] * x[0] / 4.0).exp());
        let v = Field::from_fn(&g, |x| 0.5 / (1.0 + x[0] * x[0]));
        let a = energy(&u, &v, &f, &f, &p, EnergyVariant::Absolute).unwrap();
        let b = energy(&u, &v, &f, &f, &p, EnergyVariant::PositivePart).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hessian_at_origin_is_the_norm() {
        let (g, p, _) = setup();
        let z = Field::zeros(&g);
        let phi = Field::from_fn(&g, |x| x[0].sin());
        let psi = Field::from_fn(&g, |x| (-x[0] * x[0]).exp());
        let q = hessian_quadform(&z, &z, &phi, &psi, &p).unwrap();
        assert!((q - pair_norm(&phi, &psi, &p).unwrap().powi(2)).abs() < 1e-12);
        let u = Field::from_fn(&g, |x| 0.3 * (-x[0] * x[0]).exp());
        let q1 = hessian_quadform(&u, &u, &phi, &psi, &p).unwrap();
        let q2 = hessian_quadform(&u, &u, &phi.scaled(-1.0), &psi.scaled(-1.0), &p).unwrap();
        assert!((q1 - q2).abs() < 1e-14);
    }

    #[test]
    fn sign_scan_dichotomy() {
        let (g, p, f) = setup();
        let bump = Field::from_fn(&g, |x| (-x[0] * x[0] / 2.0).exp());
        let scan = small_t_sign_scan(&bump, &bump, &f, &f, &p, &[-1e-3, 0.0, 1e-3]).unwrap();
        assert!(scan.passed(), "{scan:?}");
        assert_eq!(scan.rows[1].1, 0.0);
        assert!(small_t_sign_scan(&bump.scaled(-1.0), &bump, &f, &f, &p, &[1e-3]).is_err());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let (g, p, f) = setup();
        let other = make_grid(1, 32, 20.0).unwrap();
        let u = Field::zeros(&g);
        let v = Field::zeros(&other);
        assert!(matches!(
            energy(&u, &v, &f, &f, &p, EnergyVariant::Absolute),
            Err(Error::GridMismatch)
        ));
    }
}
