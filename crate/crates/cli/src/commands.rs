//! One function per subcommand. Each writes its files into the output
//! directory and prints a short summary.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;

use fracsys::constants::{coercivity_sweep, constants_report, ConstantsReport};
use fracsys::energy::pair_norm;
use fracsys::field::{write_field, FieldFormat};
use fracsys::forcing::{make_forcing, scale_to_norm, Functional};
use fracsys::profiles::{decay_fit_window, subcritical_ground_state, talenti_bubble, DecayFit};
use fracsys::report::{to_csv, Record};
use fracsys::solver::{empirical_threshold, positivity_check, residual, solve_from, solve_system, SolveOpts, SolveReport};
use fracsys::spectral::frac_laplacian;
use fracsys::verify::{library_operator, random_positive, rng, run_suite, SuiteConfig};
use fracsys::{Error, Field, Grid, MinimizeOpts, Regime, SystemParams};

use crate::config::ExperimentConfig;

pub enum Outcome {
    Ok,
    /// Outputs were written but a numerical requirement failed.
    Failed(String),
}

/// 2 for errors that a different configuration would avoid, 1 otherwise.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    let lib = e.chain().find_map(|c| c.downcast_ref::<Error>());
    match lib {
        Some(
            Error::InvalidResolution(_)
            | Error::InvalidBoxLength(_)
            | Error::InvalidDimension(_)
            | Error::InvalidOrder(_)
            | Error::InvalidLebesgueExponent(_)
            | Error::InvalidParams(_)
            | Error::WrongRegime { .. }
            | Error::InvalidProfile(_)
            | Error::InvalidForcing(_)
            | Error::IllPosed(_),
        ) => 2,
        _ => 1,
    }
}

struct Out<'a> {
    dir: &'a Path,
    format: FieldFormat,
}

impl<'a> Out<'a> {
    fn new(cfg: &'a ExperimentConfig) -> anyhow::Result<Self> {
        fs::create_dir_all(&cfg.output).with_context(|| format!("creating {}", cfg.output.display()))?;
        Ok(Self {
            dir: &cfg.output,
            format: cfg.field_format()?,
        })
    }

    fn text(&self, name: &str, body: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn field(&self, stem: &str, u: &Field) -> anyhow::Result<()> {
        let ext = match self.format {
            FieldFormat::Csv => "csv",
            FieldFormat::Binary => "bin",
        };
        let path = self.dir.join(format!("{stem}.{ext}"));
        let mut buf = Vec::new();
        write_field(u, self.format, &mut buf)?;
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn with_config(mut r: Record, cfg: &ExperimentConfig) -> Record {
    r.extend_prefixed("config.", &cfg.record());
    r
}

fn setup(cfg: &ExperimentConfig) -> anyhow::Result<(Arc<Grid>, SystemParams)> {
    Ok((cfg.grid()?, cfg.params()?))
}

fn fit_record(fit: &DecayFit, expected: f64) -> Record {
    Record::new()
        .with("decay_exponent", fit.exponent)
        .with("decay_prefactor", fit.prefactor)
        .with("decay_samples", fit.samples)
        .with("decay_window_lo", fit.window.0)
        .with("decay_window_hi", fit.window.1)
        .with("decay_expected", expected)
}

pub fn constants(cfg: &ExperimentConfig, sweep: Option<usize>) -> anyhow::Result<Outcome> {
    let (grid, params) = setup(cfg)?;
    let report = constants_report(&grid, &params, cfg.minimize_opts())?;
    let out = Out::new(cfg)?;
    let rec = with_config(report.record(), cfg);
    out.text("constants.json", &rec.to_json())?;
    out.text("constants.csv", &to_csv(std::slice::from_ref(&rec)))?;
    if let Some(count) = sweep {
        let rows: Vec<Record> = coercivity_sweep(params.exponent(), count, report.s_scalar)?
            .iter()
            .map(|r| r.record())
            .collect();
        out.text("sweep.csv", &to_csv(&rows))?;
    }
    print!("{}", report.record().to_key_value());
    Ok(Outcome::Ok)
}

pub fn bubble(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (grid, params) = setup(cfg)?;
    let u = talenti_bubble(&grid, &params, &cfg.bubble_params(&grid))?;
    let [lo, hi] = cfg.ground_state.window;
    let fit = decay_fit_window(&u, lo, hi)?;
    let out = Out::new(cfg)?;
    out.field("bubble", &u)?;
    let expected = params.dimension() as f64 - 2.0 * params.s();
    let rec = with_config(
        fit_record(&fit, expected).with("max", u.max()).with("l2_norm", u.l2_norm()),
        cfg,
    );
    out.text("bubble.meta", &rec.to_key_value())?;
    println!("decay exponent {:.6} (profile tail N - 2s = {expected})", fit.exponent);
    Ok(Outcome::Ok)
}

pub fn ground_state(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (grid, params) = setup(cfg)?;
    if params.regime() != Regime::Subcritical {
        return Err(Error::WrongRegime { required: "subcritical (gamma = 1)" }.into());
    }
    let opts = MinimizeOpts {
        tol: cfg.ground_state.tol,
        max_iter: cfg.max_iter,
    };
    let gs = subcritical_ground_state(&grid, params.s(), params.exponent(), opts)?;
    let [lo, hi] = cfg.ground_state.window;
    let fit = decay_fit_window(&gs.profile, lo, hi)?;
    let out = Out::new(cfg)?;
    out.field("ground_state", &gs.profile)?;
    let expected = params.dimension() as f64 + 2.0 * params.s();
    let mut rec = Record::new()
        .with("residual", gs.residual)
        .with("quotient", gs.quotient)
        .with("scale", gs.scale)
        .with("iterations", gs.iterations)
        .with("max", gs.profile.max())
        .with("min", gs.profile.min());
    rec.extend_prefixed("", &fit_record(&fit, expected));
    let rec = with_config(rec, cfg);
    out.text("ground_state.json", &rec.to_json())?;
    println!(
        "residual {:e}, decay exponent {:.6} (expected N + 2s = {expected})",
        gs.residual, fit.exponent
    );
    Ok(Outcome::Ok)
}

fn forcing(
    cfg: &ExperimentConfig,
    grid: &Arc<Grid>,
    params: &SystemParams,
    d: f64,
) -> anyhow::Result<(Functional, Functional)> {
    let build = |spec: &crate::config::ForcingSpec, name: &str| -> anyhow::Result<Functional> {
        let raw = make_forcing(spec.density(grid)?, params.s()).with_context(|| format!("forcing {name}"))?;
        Ok(scale_to_norm(&raw, spec.fraction * d, params.regime()).with_context(|| format!("forcing {name}"))?)
    };
    Ok((build(&cfg.forcing.f, "f")?, build(&cfg.forcing.g, "g")?))
}

fn constants_summary(c: &ConstantsReport) -> Record {
    Record::new()
        .with("S_scalar", c.s_scalar)
        .with("S_vector", c.s_vector)
        .with("radius", c.radius)
        .with("threshold", c.threshold)
}

pub fn solve(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (grid, params) = setup(cfg)?;
    let constants = constants_report(&grid, &params, cfg.minimize_opts())?;
    let (f, g) = forcing(cfg, &grid, &params, constants.threshold)?;
    let opts = SolveOpts {
        tol: cfg.solve.tol,
        max_iter: cfg.solve.max_iter,
        radius: constants.radius,
        threshold: Some(constants.threshold),
    };
    let (report, failure) = match solve_system(&f, &g, &params, &grid, &opts) {
        Ok(r) => (r, None),
        Err(Error::Solve { reason, report }) => (*report, Some(reason)),
        Err(e) => return Err(e.into()),
    };

    let mut rec = report.record();
    rec.push("residual", residual(&report.u_bar, &report.v_bar, &f, &g, &params)?);
    rec.push("pair_norm", pair_norm(&report.u_bar, &report.v_bar, &params)?);
    let pos = positivity_check(&report);
    rec.push("positive", pos.passed());
    rec.push("nonpositive_fraction_u", pos.nonpositive_u);
    rec.push("nonpositive_fraction_v", pos.nonpositive_v);
    rec.extend_prefixed("", &constants_summary(&constants));
    rec.extend_prefixed("f.", &f.record());
    rec.extend_prefixed("g.", &g.record());

    let mut failure = failure;
    if failure.is_none() && cfg.solve.restarts > 0 {
        let spread = restart_spread(cfg, &grid, &params, &f, &g, &opts, &report)?;
        rec.push("restart_spread", spread);
    }
    if failure.is_none() && cfg.solve.bisect > 0 {
        let m = empirical_threshold(&f, &g, &params, &grid, &opts, constants.threshold, cfg.solve.bisect)?;
        rec.push("empirical_threshold", m.empirical);
        rec.push("empirical_ratio", m.ratio);
    }
    if failure.is_none() && params.regime() == Regime::Subcritical && !pos.passed() {
        failure = Some(format!("minimizer is not positive (min u {:e}, min v {:e})", pos.min_u, pos.min_v));
    }
    rec.push("failure", failure.clone().unwrap_or_default());

    let out = Out::new(cfg)?;
    out.text("solve.json", &with_config(rec, cfg).to_json())?;
    out.text("trace.csv", &report.trace_csv())?;
    out.field("u_bar", &report.u_bar)?;
    out.field("v_bar", &report.v_bar)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "energy {:e}, gradient {:e}, ball fraction {:.4}, {} iterations",
        report.energy, report.grad_norm, report.ball_fraction, report.iterations
    );
    Ok(match failure {
        None => Outcome::Ok,
        Some(reason) => Outcome::Failed(reason),
    })
}

/// Largest `L^2` distance between the minimizer from `(0, 0)` and minimizers
/// from random positive starts at half the radius.
fn restart_spread(
    cfg: &ExperimentConfig,
    grid: &Arc<Grid>,
    params: &SystemParams,
    f: &Functional,
    g: &Functional,
    opts: &SolveOpts,
    base: &SolveReport,
) -> anyhow::Result<f64> {
    let mut r = rng(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.solve.restarts {
        let u0 = random_positive(grid, &mut r);
        let v0 = random_positive(grid, &mut r);
        let k = 0.5 * opts.radius / pair_norm(&u0, &v0, params)?;
        let rep = solve_from(f, g, params, opts, u0.scaled(k), v0.scaled(k))?;
        let d = (rep.u_bar.sub(&base.u_bar)?.l2_norm().powi(2) + rep.v_bar.sub(&base.v_bar)?.l2_norm().powi(2)).sqrt();
        worst = worst.max(d);
    }
    Ok(worst)
}

pub fn verify(cfg: &ExperimentConfig, fault: bool) -> anyhow::Result<Outcome> {
    let (grid, params) = setup(cfg)?;
    let faulty = |u: &Field, s: f64| frac_laplacian(u, s).map(|v| v.scaled(1.0 + 1e-6));
    let suite = SuiteConfig {
        grid,
        params,
        opts: cfg.minimize_opts(),
        seed: cfg.seed,
        operator: if fault { &faulty } else { &library_operator },
    };
    let (constants, checks) = run_suite(&suite)?;
    for c in &checks {
        println!("{}", c.line());
    }
    let out = Out::new(cfg)?;
    let rows: Vec<Record> = checks.iter().map(|c| c.record()).collect();
    out.text("verify.csv", &to_csv(&rows))?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let rec = constants_summary(&constants)
        .with("checks", checks.len())
        .with("failed", failed.join("; "));
    out.text("verify.json", &with_config(rec, cfg).to_json())?;
    Ok(if failed.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Failed(format!("{} of {} checks failed: {}", failed.len(), checks.len(), failed.join(", ")))
    })
}
