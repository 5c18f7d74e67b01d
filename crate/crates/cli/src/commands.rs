use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use horofourier_core::kernels::{
    eisenstein, phi_lambda, plancherel_density, q_poly, KTypeIndex, SpectralParameter,
};
use horofourier_core::transforms::{
    hft_forward_grid, round_trip_error, PlanCache, PolarSamples, RadialProfile, SpectralSynthesis,
};
use horofourier_core::verify::{self, Criterion, Suite, SuiteOptions, PW_RADII};
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_e, Table};
use crate::profiles;

/// Values of `a`, a comma list `a,b,c`, or `start:end:count`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse grid '{spec}' (use a value, a,b,c or start:end:count)"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()
            .and_then(|v| if v.iter().all(|x| x.is_finite()) { Ok(v) } else { Err(bad()) }),
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            if n == 0 || !(a.is_finite() && b.is_finite()) {
                return Err(bad());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        _ => Err(bad()),
    }
}

fn check_parity(cfg: &RunConfig, n: i32) -> Result<(), CliError> {
    if cfg.strict_parity && n % 2 != 0 {
        return Err(CliError::Usage(format!("--strict-parity admits even n only (got n = {n})")));
    }
    Ok(())
}

fn announce(path: Option<PathBuf>) {
    if let Some(p) = path {
        eprintln!("wrote {}", p.display());
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    /// Spherical function φ_λ(t).
    Phi,
    /// Eisenstein integral Φ_{λ,n}(t).
    Eisenstein,
    /// Plancherel density ν_P(λ) (t-independent; t is written as 0).
    Density,
    /// Polynomial Q_n(λ) (t-independent; t is written as 0).
    Qpoly,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub kind: EvalKind,
    /// Real parts of λ: a value, a,b,c or start:end:count.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub lambda: String,
    /// Imaginary part of λ.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda_im: f64,
    /// Radii: a value, a,b,c or start:end:count.
    #[arg(long, default_value = "0")]
    pub t: String,
    /// K-type index.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub n: i32,
}

pub fn eval(args: &EvalArgs, cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let lambdas = parse_grid(&args.lambda)?;
    let ts = parse_grid(&args.t)?;
    if ts.iter().any(|&t| t < 0.0) {
        return Err(CliError::Usage("radii must be non-negative".into()));
    }
    let n = match args.kind {
        EvalKind::Phi | EvalKind::Density => 0,
        EvalKind::Eisenstein | EvalKind::Qpoly => args.n,
    };
    check_parity(cfg, n)?;
    if args.kind == EvalKind::Density && args.lambda_im != 0.0 {
        return Err(CliError::Usage("the Plancherel density is evaluated at real λ only".into()));
    }
    let kt = KTypeIndex::new(n);
    let name = format!("eval_{}.csv", format!("{:?}", args.kind).to_lowercase());
    let mut table = Table::create(
        out,
        &name,
        &["lambda_re", "lambda_im", "t", "n", "value_re", "value_im"],
    )?;
    for &re in &lambdas {
        let l = Complex64::new(re, args.lambda_im);
        let radial = matches!(args.kind, EvalKind::Phi | EvalKind::Eisenstein);
        let rows: Vec<(f64, Complex64)> = if radial {
            let sp = SpectralParameter::unrestricted(l)?;
            ts.iter()
                .map(|&t| {
                    let v = match args.kind {
                        EvalKind::Phi => phi_lambda(&sp, t)?,
                        _ => eisenstein(&sp, kt, t)?,
                    };
                    Ok((t, v))
                })
                .collect::<horofourier_core::Result<_>>()?
        } else if args.kind == EvalKind::Density {
            vec![(0.0, Complex64::new(plancherel_density(re), 0.0))]
        } else {
            vec![(0.0, q_poly(kt, l))]
        };
        for (t, v) in rows {
            table.row([
                fmt_e(l.re),
                fmt_e(l.im),
                fmt_e(t),
                n.to_string(),
                fmt_e(v.re),
                fmt_e(v.im),
            ])?;
        }
    }
    announce(table.finish()?);
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// δ-spherical transform of a radial profile onto the λ grid.
    Forward,
    /// Inverse transform of spectral samples (or forward-then-inverse of a profile).
    Inverse,
    /// Helgason Fourier transform of `f(t, ψ) = g(t) e^{inψ}` or of the mixed test function.
    Hft,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(value_enum)]
    pub direction: Direction,
    /// Bundled profile, e.g. sech4_n0 (or `mixed` for hft).
    #[arg(long, conflicts_with = "input")]
    pub profile: Option<String>,
    /// CSV input: radial (t,value_re,value_im) or, for inverse, spectral
    /// (lambda_re,lambda_im,h_re,h_im).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// K-type of a file input (overrides a `# n = ...` line).
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i32>,
    /// Decay rate of a radial file input (overrides `# kappa = ...`).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Schwartz exponent the profile must admit.
    #[arg(long)]
    pub p: Option<f64>,
    /// Output radii of the inverse transform.
    #[arg(long, default_value = "0:4:81")]
    pub t: String,
    /// Boundary angles of the Helgason transform.
    #[arg(long)]
    pub theta_count: Option<usize>,
}

enum Source {
    Radial(String, RadialProfile),
    Mixed,
}

fn radial_source(args: &TransformArgs, cfg: &RunConfig, p: f64) -> Result<Source, CliError> {
    let (name, f) = match (&args.profile, &args.input) {
        (Some(name), None) if name == "mixed" => return Ok(Source::Mixed),
        (Some(name), None) => (name.clone(), profiles::bundled(name)?),
        (None, Some(path)) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input").to_string();
            (stem, profiles::read_radial(path, args.n, args.kappa)?)
        }
        _ => return Err(CliError::Usage("give exactly one of --profile or --input".into())),
    };
    check_parity(cfg, f.n().get())?;
    f.check_schwartz_exponent(p)?;
    Ok(Source::Radial(name, f))
}

pub fn transform(args: &TransformArgs, cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let p = args.p.unwrap_or(cfg.transform.p);
    if !(p > 0.0 && p <= 2.0) {
        return Err(CliError::Usage(format!("p = {p} outside (0, 2]")));
    }
    let spec = cfg.grid.spec();
    let cache = PlanCache::new(spec);
    match args.direction {
        Direction::Forward => {
            let Source::Radial(name, f) = radial_source(args, cfg, p)? else {
                return Err(CliError::Usage("the mixed function is two-dimensional; use `transform hft`".into()));
            };
            let h = cache.get(f.n(), f.kappa())?.forward_profile(&f)?;
            let mut table = Table::create(out, &format!("forward_{name}.csv"), &["lambda_re", "lambda_im", "h_re", "h_im"])?;
            for (l, v) in h.real_grid() {
                table.row([fmt_e(l), fmt_e(0.0), fmt_e(v.re), fmt_e(v.im)])?;
            }
            announce(table.finish()?);
        }
        Direction::Inverse => {
            let ts = parse_grid(&args.t)?;
            if ts.iter().any(|&t| t < 0.0) {
                return Err(CliError::Usage("radii must be non-negative".into()));
            }
            let (name, n, synth) = match (&args.profile, &args.input) {
                (None, Some(path)) if is_spectral(path) => {
                    let n = args.n.unwrap_or(0);
                    check_parity(cfg, n)?;
                    let rule = spec.lambda_rule()?;
                    let h = profiles::read_spectral(path, Some(n), &rule, spec.strip)?;
                    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input").to_string();
                    (stem, n, SpectralSynthesis::new(&h)?)
                }
                _ => {
                    let Source::Radial(name, f) = radial_source(args, cfg, p)? else {
                        return Err(CliError::Usage("the mixed function is two-dimensional; use `transform hft`".into()));
                    };
                    let plan = cache.get(f.n(), f.kappa())?;
                    let h = plan.forward_profile(&f)?;
                    let t_end = cfg.transform.round_trip_t;
                    let err = round_trip_error(&plan, &f, t_end)?;
                    eprintln!("round-trip relative L2 error on [0, {t_end}]: {}", fmt_e(err));
                    (name, f.n().get(), SpectralSynthesis::new(&h)?)
                }
            };
            let mut table = Table::create(out, &format!("inverse_{name}.csv"), &["t", "n", "value_re", "value_im"])?;
            for &t in &ts {
                let v = synth.value(t)?;
                table.row([fmt_e(t), n.to_string(), fmt_e(v.re), fmt_e(v.im)])?;
            }
            announce(table.finish()?);
        }
        Direction::Hft => {
            let theta_count = args.theta_count.unwrap_or(cfg.transform.theta_count);
            if theta_count < 4 {
                return Err(CliError::Usage("theta_count must be at least 4".into()));
            }
            let (name, samples) = match radial_source(args, cfg, p)? {
                Source::Mixed => {
                    let opts = SuiteOptions {
                        strict_parity: cfg.strict_parity,
                        ..SuiteOptions::default()
                    };
                    ("mixed".to_string(), verify::mixed_samples(&cache, &opts)?)
                }
                Source::Radial(name, f) => {
                    let rule = spec.for_decay(f.kappa())?.t_rule()?;
                    let n = f.n().get() as f64;
                    let psi_count = theta_count.max(2 * f.n().abs() as usize + 2);
                    let samples = PolarSamples::from_fn(&rule, psi_count, f.kappa(), move |t, psi| {
                        f.value(t) * Complex64::from_polar(1.0, n * psi)
                    })?;
                    (name, samples)
                }
            };
            let big_f = hft_forward_grid(&cache, &samples, theta_count)?;
            let spatial = samples.energy();
            let spectral = big_f.energy()?;
            eprintln!(
                "plancherel: spatial {} spectral {} relative defect {}",
                fmt_e(spatial),
                fmt_e(spectral),
                fmt_e((spatial - spectral).abs() / spatial.max(spectral))
            );
            let mut table = Table::create(
                out,
                &format!("hft_{name}.csv"),
                &["lambda_re", "lambda_im", "theta", "h_re", "h_im"],
            )?;
            for (l, row) in big_f.lambdas().iter().zip(big_f.values()) {
                for (m, v) in row.iter().enumerate() {
                    let theta = std::f64::consts::TAU * m as f64 / theta_count as f64;
                    table.row([fmt_e(*l), fmt_e(0.0), fmt_e(theta), fmt_e(v.re), fmt_e(v.im)])?;
                }
            }
            announce(table.finish()?);
        }
    }
    Ok(())
}

/// Whether a CSV file carries spectral columns.
fn is_spectral(path: &Path) -> bool {
    std::fs::read_to_string(path)
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
                .map(|header| header.split(',').any(|c| c.trim() == "lambda_re"))
        })
        .unwrap_or(false)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, estimates, plancherel, pw or schwartz.
    pub suite: String,
    /// Multiplies every tolerance (e.g. 1e-3 to tighten).
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
    /// Seed of the random test functions.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub const DEFAULT_REPORT_DIR: &str = "horofourier-report";

pub fn verify(args: &VerifyArgs, cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse().map_err(|e: horofourier_core::Error| CliError::Usage(e.to_string()))?;
    let scale = args.tolerance_scale.unwrap_or(cfg.verify.tolerance_scale);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CliError::Usage("tolerance scale must be positive and finite".into()));
    }
    let opts = SuiteOptions {
        tolerance_scale: scale,
        strict_parity: cfg.strict_parity,
        seed: args.seed.unwrap_or(cfg.verify.seed),
    };
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT_DIR));
    let cache = PlanCache::new(cfg.grid.spec());

    let mut full = horofourier_core::report::VerificationReport::new();
    let criteria = suite.criteria();
    for c in &criteria {
        let rep = c.run(&cache, &opts);
        let failed = rep.failures().count();
        println!(
            "[{}] {}: {}/{} checks passed",
            if failed == 0 { "pass" } else { "fail" },
            c.title(),
            rep.len() - failed,
            rep.len()
        );
        for f in rep.failures() {
            println!("    {}: measured {} tolerance {} {}", f.id, fmt_e(f.measured), fmt_e(f.tolerance), f.detail);
        }
        full.extend(rep);
    }

    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("report.txt"), format!("{full}\n"))?;
    let mut summary = Table::create(Some(&dir), "summary.csv", &["check_id", "status", "measured", "tolerance"])?;
    for c in &full.checks {
        summary.row([c.id.clone(), c.status().to_string(), fmt_e(c.measured), fmt_e(c.tolerance)])?;
    }
    summary.finish()?;

    if criteria.contains(&Criterion::PaleyWiener) {
        let mut table = Table::create(Some(&dir), "pw_types.csv", &["radius", "radius_hat", "relative_error"])?;
        println!("{:>8} {:>12} {:>12}", "R", "R_hat", "rel_error");
        for r in PW_RADII {
            let r_hat = verify::pw_type_of_bump(r)?;
            let err = (r_hat - r).abs() / r;
            println!("{r:>8.3} {r_hat:>12.6} {err:>12.3e}");
            table.row([fmt_e(r), fmt_e(r_hat), fmt_e(err)])?;
        }
        table.finish()?;
    }
    eprintln!("wrote {}", dir.display());

    let failed = full.failures().count();
    println!("{} checks, {} failed", full.len(), failed);
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("0").unwrap(), vec![0.0]);
        assert_eq!(parse_grid("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("-1:1:5").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("2:3:1").unwrap(), vec![2.0]);
        for bad in ["", "a", "0:1", "0:1:0", "0:1:x", "inf", "1:2:3:4"] {
            assert!(matches!(parse_grid(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }
}
