//! Experiment configuration: a TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use serde::Deserialize;

use fracsys::field::FieldFormat;
use fracsys::forcing::{gaussian, indicator, mode};
use fracsys::profiles::BubbleParams;
use fracsys::report::Record;
use fracsys::{make_grid, Field, Grid, MinimizeOpts, Regime, SystemParams};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: u8,
    pub grid_size: usize,
    pub box_length: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub output: PathBuf,
    pub seed: u64,
    /// `csv` or `binary` for field files.
    pub field_format: String,
    pub bubble: BubbleConfig,
    pub ground_state: GroundStateConfig,
    pub forcing: ForcingPair,
    pub solve: SolveConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            s: 0.25,
            alpha: 2.0,
            beta: 2.0,
            gamma: 1,
            grid_size: 64,
            box_length: 20.0,
            tol: 1e-8,
            max_iter: 5000,
            output: PathBuf::from("."),
            seed: 0,
            field_format: "csv".into(),
            bubble: BubbleConfig::default(),
            ground_state: GroundStateConfig::default(),
            forcing: ForcingPair::default(),
            solve: SolveConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BubbleConfig {
    pub lambda: f64,
    pub normalization: f64,
    /// Defaults to the box center.
    pub center: Option<Vec<f64>>,
}

impl Default for BubbleConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            normalization: 1.0,
            center: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundStateConfig {
    /// Residual tolerance.
    pub tol: f64,
    pub window: [f64; 2],
}

impl Default for GroundStateConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            window: [0.25, 0.45],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingSpec {
    /// `gaussian`, `indicator` or `mode`.
    pub kind: String,
    pub center: Option<Vec<f64>>,
    /// Gaussian width or indicator radius.
    pub width: f64,
    pub amplitude: f64,
    /// Mode index per axis.
    pub k: Option<Vec<i64>>,
    /// Target dual norm as a fraction of the threshold `d`.
    pub fraction: f64,
}

impl Default for ForcingSpec {
    fn default() -> Self {
        Self {
            kind: "gaussian".into(),
            center: None,
            width: 1.0,
            amplitude: 1.0,
            k: None,
            fraction: 0.5,
        }
    }
}

impl ForcingSpec {
    pub fn density(&self, grid: &Arc<Grid>) -> fracsys::Result<Field> {
        let center = self.center.clone().unwrap_or_else(|| vec![0.0; grid.dimension()]);
        match self.kind.as_str() {
            "gaussian" => gaussian(grid, &center, self.width, self.amplitude),
            "indicator" => indicator(grid, &center, self.width, self.amplitude),
            "mode" => {
                let k = self.k.clone().unwrap_or_else(|| vec![1; grid.dimension()]);
                mode(grid, &k, self.amplitude)
            }
            other => Err(fracsys::Error::InvalidForcing(format!(
                "unknown forcing kind {other:?} (expected gaussian, indicator or mode)"
            ))),
        }
    }

    fn record(&self) -> Record {
        let join = |v: &[f64]| v.iter().map(|x| fracsys::report::fmt_f64(*x)).collect::<Vec<_>>().join(" ");
        Record::new()
            .with("kind", self.kind.as_str())
            .with("center", self.center.as_deref().map(join).unwrap_or_else(|| "origin".into()))
            .with("width", self.width)
            .with("amplitude", self.amplitude)
            .with(
                "k",
                self.k
                    .as_ref()
                    .map(|k| k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                    .unwrap_or_else(|| "default".into()),
            )
            .with("fraction", self.fraction)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingPair {
    pub f: ForcingSpec,
    pub g: ForcingSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Gradient tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra solves from random interior starting points.
    pub restarts: usize,
    /// Bisection steps for the empirical threshold (0 disables it).
    pub bisect: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            restarts: 0,
            bisect: 0,
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dimension: Option<usize>,
    pub s: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<u8>,
    pub grid_size: Option<usize>,
    pub box_length: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> anyhow::Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => ExperimentConfig::default(),
        };
        macro_rules! apply {
            ($($f:ident),*) => { $(if let Some(v) = o.$f.clone() { cfg.$f = v; })* };
        }
        apply!(dimension, s, alpha, beta, gamma, grid_size, box_length, tol, max_iter, output, seed);
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> anyhow::Result<()> {
        for (name, spec) in [("f", &self.forcing.f), ("g", &self.forcing.g)] {
            if !(spec.fraction > 0.0 && spec.fraction <= 1.0) {
                bail!("forcing.{name}.fraction must be in (0, 1], got {}", spec.fraction);
            }
        }
        if !(self.tol > 0.0) || !(self.solve.tol > 0.0) || !(self.ground_state.tol > 0.0) {
            bail!("tolerances must be positive");
        }
        self.field_format()?;
        Ok(())
    }

    pub fn regime(&self) -> fracsys::Result<Regime> {
        Regime::from_gamma(self.gamma)
    }

    pub fn params(&self) -> fracsys::Result<SystemParams> {
        SystemParams::new(self.dimension, self.s, self.alpha, self.beta, self.regime()?)
    }

    pub fn grid(&self) -> fracsys::Result<Arc<Grid>> {
        make_grid(self.dimension, self.grid_size, self.box_length)
    }

    pub fn minimize_opts(&self) -> MinimizeOpts {
        MinimizeOpts {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn bubble_params(&self, grid: &Grid) -> BubbleParams {
        BubbleParams {
            lambda: self.bubble.lambda,
            center: self.bubble.center.clone().unwrap_or_else(|| vec![0.0; grid.dimension()]),
            normalization: self.bubble.normalization,
        }
    }

    pub fn field_format(&self) -> anyhow::Result<FieldFormat> {
        match self.field_format.as_str() {
            "csv" => Ok(FieldFormat::Csv),
            "binary" => Ok(FieldFormat::Binary),
            other => bail!("field_format must be csv or binary, got {other:?}"),
        }
    }

    /// Every resolved setting, flat, for embedding in reports. The output
    /// directory is left out so reruns elsewhere stay byte-identical.
    pub fn record(&self) -> Record {
        let mut r = Record::new()
            .with("dimension", self.dimension)
            .with("s", self.s)
            .with("alpha", self.alpha)
            .with("beta", self.beta)
            .with("gamma", self.gamma)
            .with("grid_size", self.grid_size)
            .with("box_length", self.box_length)
            .with("tol", self.tol)
            .with("max_iter", self.max_iter)
            .with("seed", self.seed)
            .with("field_format", self.field_format.as_str())
            .with("bubble.lambda", self.bubble.lambda)
            .with("bubble.normalization", self.bubble.normalization)
            .with(
                "bubble.center",
                self.bubble
                    .center
                    .as_ref()
                    .map(|c| c.iter().map(|x| fracsys::report::fmt_f64(*x)).collect::<Vec<_>>().join(" "))
                    .unwrap_or_else(|| "origin".into()),
            )
            .with("ground_state.tol", self.ground_state.tol)
            .with("ground_state.window_lo", self.ground_state.window[0])
            .with("ground_state.window_hi", self.ground_state.window[1])
            .with("solve.tol", self.solve.tol)
            .with("solve.max_iter", self.solve.max_iter)
            .with("solve.restarts", self.solve.restarts)
            .with("solve.bisect", self.solve.bisect);
        r.extend_prefixed("forcing.f.", &self.forcing.f.record());
        r.extend_prefixed("forcing.g.", &self.forcing.g.record());
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "alpha = 2.5\nbeta = 1.5\n[forcing.f]\nkind = \"indicator\"\nwidth = 2.0\n").unwrap();
        let o = Overrides {
            grid_size: Some(128),
            ..Default::default()
        };
        let c = ExperimentConfig::load(Some(&path), &o).unwrap();
        assert_eq!((c.alpha, c.beta, c.grid_size), (2.5, 1.5, 128));
        assert_eq!(c.forcing.f.kind, "indicator");
        assert_eq!(c.forcing.g.kind, "gaussian");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "alpah = 2.0\n").unwrap();
        assert!(ExperimentConfig::load(Some(&path), &Overrides::default()).is_err());
    }

    #[test]
    fn fraction_must_be_in_unit_interval() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[forcing.g]\nfraction = 1.5\n").unwrap();
        let err = ExperimentConfig::load(Some(&path), &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("forcing.g.fraction"));
    }
}
