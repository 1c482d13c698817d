//! System parameters `(N, s, alpha, beta, gamma)` and iteration options.

use crate::error::{Error, Result};

/// Which of the two problem settings is in force.
///
/// `Critical` is `gamma = 0` with `alpha + beta = 2N/(N - 2s)` and the
/// homogeneous space; `Subcritical` is `gamma = 1` with the inhomogeneous
/// space `H^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Critical,
    Subcritical,
}

impl Regime {
    pub fn from_gamma(gamma: u8) -> Result<Self> {
        match gamma {
            0 => Ok(Regime::Critical),
            1 => Ok(Regime::Subcritical),
            other => Err(Error::InvalidParams(format!("gamma must be 0 or 1, got {other}"))),
        }
    }

    pub fn gamma(self) -> u8 {
        match self {
            Regime::Critical => 0,
            Regime::Subcritical => 1,
        }
    }

    /// Zero-order coefficient of the regime operator `(-Delta)^s + gamma`.
    pub fn shift(self) -> f64 {
        f64::from(self.gamma())
    }
}

/// `2N / (N - 2s)`.
pub fn critical_exponent(dimension: usize, s: f64) -> f64 {
    let n = dimension as f64;
    2.0 * n / (n - 2.0 * s)
}

const CRITICAL_MATCH: f64 = 1e-12;

/// Parameters of the coupled system, validated against the hypotheses under
/// which a small-forcing solution exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    dimension: usize,
    s: f64,
    alpha: f64,
    beta: f64,
    regime: Regime,
}

impl SystemParams {
    /// Checks `N > 2s`, `0 < s <= 1`, `alpha, beta > 1`, and the regime's
    /// exponent condition: `alpha + beta = 2*_s` (critical) or
    /// `2 < alpha + beta <= 2*_s` (subcritical).
    pub fn new(dimension: usize, s: f64, alpha: f64, beta: f64, regime: Regime) -> Result<Self> {
        check_order(dimension, s)?;
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be > 1, got {alpha}")));
        }
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::InvalidParams(format!("beta must be > 1, got {beta}")));
        }
        check_exponents(dimension, s, alpha, beta, regime)?;
        Ok(Self {
            dimension,
            s,
            alpha,
            beta,
            regime,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn gamma(&self) -> u8 {
        self.regime.gamma()
    }

    pub fn crit_exp(&self) -> f64 {
        critical_exponent(self.dimension, self.s)
    }

    /// The exponent `p` dividing the coupling term: `2*_s` or `alpha + beta`.
    pub fn exponent(&self) -> f64 {
        match self.regime {
            Regime::Critical => self.crit_exp(),
            Regime::Subcritical => self.alpha + self.beta,
        }
    }

    /// Same parameters with `alpha` and `beta` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
            ..*self
        }
    }
}

/// Exponent data for the Sobolev quotients.
///
/// Looser than [`SystemParams`]: the quotient identities only need
/// `alpha, beta > 0` and `2 < alpha + beta <= 2*_s`, so a pair such as
/// `(3, 1)` is admissible here although it is not an admissible system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientSpec {
    pub dimension: usize,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub regime: Regime,
}

impl QuotientSpec {
    pub fn new(dimension: usize, s: f64, alpha: f64, beta: f64, regime: Regime) -> Result<Self> {
        check_order(dimension, s)?;
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "quotient exponents must be positive, got ({alpha}, {beta})"
            )));
        }
        check_exponents(dimension, s, alpha, beta, regime)?;
        Ok(Self {
            dimension,
            s,
            alpha,
            beta,
            regime,
        })
    }

    pub fn exponent(&self) -> f64 {
        match self.regime {
            Regime::Critical => critical_exponent(self.dimension, self.s),
            Regime::Subcritical => self.alpha + self.beta,
        }
    }
}

impl From<SystemParams> for QuotientSpec {
    fn from(p: SystemParams) -> Self {
        Self {
            dimension: p.dimension,
            s: p.s,
            alpha: p.alpha,
            beta: p.beta,
            regime: p.regime,
        }
    }
}

impl From<&SystemParams> for QuotientSpec {
    fn from(p: &SystemParams) -> Self {
        (*p).into()
    }
}

fn check_order(dimension: usize, s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidOrder(s));
    }
    if dimension == 0 || (dimension as f64) <= 2.0 * s {
        return Err(Error::InvalidParams(format!(
            "need N > 2s, got N = {dimension}, s = {s}"
        )));
    }
    Ok(())
}

fn check_exponents(dimension: usize, s: f64, alpha: f64, beta: f64, regime: Regime) -> Result<()> {
    let crit = critical_exponent(dimension, s);
    let total = alpha + beta;
    match regime {
        Regime::Critical => {
            if (total - crit).abs() > CRITICAL_MATCH * crit.max(1.0) {
                return Err(Error::InvalidParams(format!(
                    "gamma = 0 needs alpha + beta = 2*_s = {crit}, got {total}"
                )));
            }
        }
        Regime::Subcritical => {
            if !(total > 2.0 && total <= crit + CRITICAL_MATCH * crit.max(1.0)) {
                return Err(Error::InvalidParams(format!(
                    "gamma = 1 needs 2 < alpha + beta <= 2*_s = {crit}, got {total}"
                )));
            }
        }
    }
    Ok(())
}

/// Options shared by the iterative minimizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOpts {
    /// Stopping tolerance (relative value change for quotients, gradient or
    /// residual norm elsewhere).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizeOpts {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(1, 0.25), 4.0);
        assert_eq!(critical_exponent(2, 0.5), 4.0);
        assert_eq!(critical_exponent(3, 1.0), 6.0);
    }

    #[test]
    fn accepts_admissible_systems() {
        let p = SystemParams::new(1, 0.25, 2.0, 2.0, Regime::Critical).unwrap();
        assert_eq!(p.exponent(), 4.0);
        assert_eq!(p.gamma(), 0);
        let q = SystemParams::new(1, 0.25, 1.5, 1.5, Regime::Subcritical).unwrap();
        assert_eq!(q.exponent(), 3.0);
        // the endpoint alpha + beta = 2*_s is accepted with gamma = 1
        assert!(SystemParams::new(1, 0.25, 2.5, 1.5, Regime::Subcritical).is_ok());
    }

    #[test]
    fn rejects_violations() {
        let bad = [
            (1, 0.25, 1.0, 3.0, Regime::Critical),
            (1, 0.25, 3.0, 0.9, Regime::Critical),
            (1, 0.25, 2.0, 1.5, Regime::Critical),
            (1, 0.25, 1.0, 1.0, Regime::Subcritical),
            (1, 0.25, 3.0, 2.0, Regime::Subcritical),
            (1, 0.5, 2.0, 2.0, Regime::Subcritical),
            (2, 0.0, 2.0, 2.0, Regime::Subcritical),
            (2, 1.5, 2.0, 2.0, Regime::Subcritical),
        ];
        for (n, s, a, b, r) in bad {
            assert!(SystemParams::new(n, s, a, b, r).is_err(), "{n} {s} {a} {b} {r:?}");
        }
        assert!(Regime::from_gamma(2).is_err());
    }

    #[test]
    fn error_names_the_violated_invariant() {
        let msg = SystemParams::new(1, 0.25, 0.5, 3.5, Regime::Critical)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("alpha must be > 1"), "{msg}");
    }

    #[test]
    fn quotient_spec_admits_unit_exponent() {
        let q = QuotientSpec::new(1, 0.25, 3.0, 1.0, Regime::Subcritical).unwrap();
        assert_eq!(q.exponent(), 4.0);
        assert!(QuotientSpec::new(1, 0.25, 0.0, 3.0, Regime::Subcritical).is_err());
    }
}
