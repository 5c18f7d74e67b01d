//! Verification suites: each [`Criterion`] bundles the numerical checks of
//! one property of the transforms into a [`VerificationReport`].

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::disk::{busemann, integrate_x, BoundaryPoint, Chart, DiskPoint};
use crate::kernels::{
    eisenstein, eisenstein_closed_form, phi_zero, plancherel_density, KTypeIndex, KernelNodes, SpectralParameter,
};
use crate::quadrature::{circle_average, TailPolicy};
use crate::report::{CheckResult, VerificationReport};
use crate::schwartz::{
    analyticity_check, bump_profile, evenness_defect, decay_bound_check, nu_seminorms, pw_type_estimate,
    radial_laplacian, strip_evaluator, tau_table, SchwartzConfig,
};
use crate::transforms::{
    delta_project_spatial, family_profile, hft_forward_grid, hft_forward_many, plancherel_check, q_delta,
    round_trip_error, HorocyclicTransform, PlanCache, PolarSamples, RadialProfile, SpectralProfile,
};
use crate::{Error, Result};

/// Knobs shared by every suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Multiplies every tolerance; values below 1 tighten the checks.
    pub tolerance_scale: f64,
    /// Restrict K-types to even `n`.
    pub strict_parity: bool,
    /// Seed for the randomly drawn test functions.
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            tolerance_scale: 1.0,
            strict_parity: false,
            seed: 20_240_521,
        }
    }
}

impl SuiteOptions {
    fn tol(&self, base: f64) -> f64 {
        base * self.tolerance_scale
    }

    /// K-types `0..=max`, even ones only under strict parity.
    pub fn types(&self, max: i32) -> Vec<i32> {
        (0..=max).filter(|n| !self.strict_parity || n % 2 == 0).collect()
    }
}

/// One verified property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Kernels,
    Estimates,
    RoundTrip,
    Plancherel,
    BoundaryIdentities,
    Evenness,
    Analyticity,
    Seminorms,
    PaleyWiener,
    Infrastructure,
}

impl Criterion {
    pub const ALL: [Criterion; 10] = [
        Criterion::Kernels,
        Criterion::Estimates,
        Criterion::RoundTrip,
        Criterion::Plancherel,
        Criterion::BoundaryIdentities,
        Criterion::Evenness,
        Criterion::Analyticity,
        Criterion::Seminorms,
        Criterion::PaleyWiener,
        Criterion::Infrastructure,
    ];

    pub fn title(&self) -> &'static str {
        match self {
            Criterion::Kernels => "kernel correctness",
            Criterion::Estimates => "pointwise estimates",
            Criterion::RoundTrip => "inversion round trip",
            Criterion::Plancherel => "plancherel identity",
            Criterion::BoundaryIdentities => "boundary transform identities",
            Criterion::Evenness => "evenness",
            Criterion::Analyticity => "strip analyticity",
            Criterion::Seminorms => "seminorm suite",
            Criterion::PaleyWiener => "paley-wiener",
            Criterion::Infrastructure => "determinism and charts",
        }
    }

    pub fn run(&self, cache: &PlanCache, opts: &SuiteOptions) -> VerificationReport {
        let result = match self {
            Criterion::Kernels => kernels(opts),
            Criterion::Estimates => estimates(opts),
            Criterion::RoundTrip => round_trip(cache, opts),
            Criterion::Plancherel => plancherel(cache, opts),
            Criterion::BoundaryIdentities => boundary_identities(cache, opts),
            Criterion::Evenness => evenness(cache, opts),
            Criterion::Analyticity => analyticity(opts),
            Criterion::Seminorms => seminorms(cache, opts),
            Criterion::PaleyWiener => paley_wiener(opts),
            Criterion::Infrastructure => infrastructure(cache, opts),
        };
        result.unwrap_or_else(|e| {
            let mut rep = VerificationReport::new();
            rep.push(CheckResult::new(
                format!("{}.setup", self.slug()),
                false,
                f64::NAN,
                f64::NAN,
                e.to_string(),
            ));
            rep
        })
    }

    fn slug(&self) -> &'static str {
        match self {
            Criterion::Kernels => "kernel",
            Criterion::Estimates => "estimate",
            Criterion::RoundTrip => "round_trip",
            Criterion::Plancherel => "plancherel",
            Criterion::BoundaryIdentities => "hft",
            Criterion::Evenness => "evenness",
            Criterion::Analyticity => "analyticity",
            Criterion::Seminorms => "seminorm",
            Criterion::PaleyWiener => "pw",
            Criterion::Infrastructure => "infra",
        }
    }
}

/// Named groups of criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Estimates,
    Plancherel,
    Pw,
    Schwartz,
}

impl Suite {
    pub fn criteria(&self) -> Vec<Criterion> {
        use Criterion::*;
        match self {
            Suite::All => Criterion::ALL.to_vec(),
            Suite::Estimates => vec![Kernels, Estimates],
            Suite::Plancherel => vec![RoundTrip, Plancherel, BoundaryIdentities],
            Suite::Schwartz => vec![Evenness, Analyticity, Seminorms],
            Suite::Pw => vec![PaleyWiener],
        }
    }

    pub fn run(&self, cache: &PlanCache, opts: &SuiteOptions) -> VerificationReport {
        let mut rep = VerificationReport::new();
        for c in self.criteria() {
            rep.extend(c.run(cache, opts));
        }
        rep
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "estimates" => Ok(Suite::Estimates),
            "plancherel" => Ok(Suite::Plancherel),
            "pw" => Ok(Suite::Pw),
            "schwartz" => Ok(Suite::Schwartz),
            other => Err(Error::Parameter(format!("unknown suite '{other}'"))),
        }
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn range(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step).round() as usize;
    (0..=n).map(|i| a + step * i as f64).collect()
}

fn failed(id: impl Into<String>, tol: f64, e: Error) -> CheckResult {
    CheckResult::new(id, false, f64::NAN, tol, e.to_string())
}

/// Keeps the largest value and where it occurred.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: String::new(),
        }
    }

    fn update(&mut self, v: f64, at: impl FnOnce() -> String) {
        if v > self.value || v.is_nan() {
            self.value = if v.is_nan() { f64::INFINITY } else { v };
            self.at = at();
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = b.norm();
    if s == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / s
    }
}

// ---------------------------------------------------------------------------

const KERNEL_LAMBDAS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 0.5)];

fn kernels(opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let ts = [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5];
    let types = opts.types(3);

    let mut worst = Worst::new();
    for &n in &types {
        for &(re, im) in &KERNEL_LAMBDAS {
            let l = SpectralParameter::unrestricted(c64(re, im))?;
            for &t in &ts {
                let kt = KTypeIndex::new(n);
                let q = eisenstein(&l, kt, t)?;
                let c = eisenstein_closed_form(&l, kt, t)?;
                worst.update(rel(q, c), || format!("n={n} λ={re}{im:+}i t={t}"));
            }
        }
    }
    let tol = opts.tol(1e-9);
    rep.push(CheckResult::below("kernel.closed_form", worst.value, tol, worst.at));

    let ts = range(0.2, 4.0, 0.05);
    let mut worst = Worst::new();
    for &n in &types {
        for &(re, im) in &KERNEL_LAMBDAS {
            let l = SpectralParameter::unrestricted(c64(re, im))?;
            let eig = c64(re, im) * c64(re, im) + 1.0;
            let kt = KTypeIndex::new(n);
            let prof = RadialProfile::from_fn(kt, 0.5, move |t| {
                eisenstein(&l, kt, t).unwrap_or(c64(f64::NAN, f64::NAN))
            })?;
            let res: Vec<f64> = ts
                .par_iter()
                .map(|&t| radial_laplacian(&prof, t).map(|lap| (lap + prof.value(t) * eig).norm()))
                .collect::<Result<_>>()?;
            for (&t, r) in ts.iter().zip(res) {
                worst.update(r, || format!("n={n} λ={re}{im:+}i t={t:.2}"));
            }
        }
    }
    rep.push(CheckResult::below("kernel.eigen_residual", worst.value, opts.tol(1e-6), worst.at));
    Ok(rep)
}

// ---------------------------------------------------------------------------

/// Inequality `lhs <= rhs` checked as `max lhs/rhs <= 1` (times the scale).
fn ratio_check(id: &str, ratio: Worst, opts: &SuiteOptions) -> CheckResult {
    let tol = opts.tol(1.0 + 1e-12);
    CheckResult::new(id, ratio.value <= tol, ratio.value, tol, ratio.at)
}

fn q_fit(step: f64) -> Result<f64> {
    let mut q = 0.0f64;
    for t in range(step, 10.0, step) {
        q = q.max(phi_zero(t)? * t.exp() / (1.0 + t));
    }
    Ok(q)
}

fn estimates(opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let ts = range(0.0, 10.0, 0.05);
    let phi0: Vec<f64> = ts.iter().map(|&t| phi_zero(t)).collect::<Result<_>>()?;

    // 0 < φ_0 <= 1
    let min = phi0.iter().copied().fold(f64::INFINITY, f64::min);
    rep.push(CheckResult::new(
        "estimate.phi0_positive",
        min > 0.0,
        min,
        0.0,
        "minimum of φ_0 on [0, 10]",
    ));
    let mut w = Worst::new();
    for (&t, &p) in ts.iter().zip(&phi0) {
        w.update(p, || format!("t={t:.2}"));
    }
    rep.push(ratio_check("estimate.phi0_at_most_one", w, opts));

    // e^{-t} <= φ_0 <= q (1+t) e^{-t}
    let mut w = Worst::new();
    for (&t, &p) in ts.iter().zip(&phi0) {
        w.update((-t).exp() / p, || format!("t={t:.2}"));
    }
    rep.push(ratio_check("estimate.phi0_lower", w, opts));
    let (q1, q2) = (q_fit(0.05)?, q_fit(0.025)?);
    let change = (q2 - q1).abs() / q2;
    rep.push(CheckResult::below(
        "estimate.phi0_upper_fit",
        change,
        opts.tol(0.05),
        format!("q = {q2:.10} (coarse grid {q1:.10})"),
    ));

    // 0 < φ_{-iλ}(t) <= e^{λt} φ_0(t)
    for lam in [0.25, 0.5, 1.0] {
        let l = SpectralParameter::unrestricted(c64(0.0, -lam))?;
        let mut w = Worst::new();
        let mut positive = true;
        for (&t, &p) in ts.iter().zip(&phi0) {
            let v = eisenstein(&l, KTypeIndex::new(0), t)?;
            positive &= v.re > 0.0 && v.im.abs() <= 1e-12 * v.re;
            w.update(v.re / ((lam * t).exp() * p), || format!("t={t:.2}"));
        }
        let id = format!("estimate.phi_imaginary[{lam}]");
        rep.push(CheckResult::new(format!("{id}.positive"), positive, f64::from(u8::from(positive)), 1.0, ""));
        rep.push(ratio_check(&id, w, opts));
    }

    // |B(z, b)| <= d(0, z)
    let mut w = Worst::new();
    for t in range(0.1, 10.0, 0.1) {
        for k in 0..16 {
            let z = DiskPoint::new(t, TAU * k as f64 / 16.0)?;
            for j in 0..16 {
                let b = BoundaryPoint::new(TAU * (j as f64 + 0.5) / 16.0 - 0.5)?;
                w.update(busemann(&z, &b).abs() / t, || format!("t={t:.1} ψ-θ={:.3}", z.psi() - b.theta()));
            }
        }
    }
    rep.push(ratio_check("estimate.busemann", w, opts));

    // ν_P(λ) <= (1 + |λ|)
    let mut w = Worst::new();
    for l in range(-100.0, 100.0, 0.05) {
        w.update(plancherel_density(l) / (1.0 + l.abs()), || format!("λ={l:.2}"));
    }
    rep.push(ratio_check("estimate.density_growth", w, opts));

    // |Φ_{λ,n}(t)| <= c (1+|λ|)^b φ_0(t) e^{|Im λ|(1+t)} on the strip ε = 1
    let res: Vec<Vec<(f64, f64)>> = opts
        .types(4)
        .par_iter()
        .map(|&n| {
            let mut rows = Vec::new();
            let probes = [c64(20.0, 1.0), c64(20.0, -1.0), c64(-20.0, 1.0), c64(-20.0, -1.0)];
            let mut per_lambda = vec![0.0f64; 21 * 5];
            for t in range(0.25, 6.0, 0.25) {
                let nodes = KernelNodes::new(KTypeIndex::new(n), t, &probes)?;
                let p0 = phi_zero(t)?;
                for (i, re) in range(-20.0, 20.0, 2.0).into_iter().enumerate() {
                    for (j, im) in range(-1.0, 1.0, 0.5).into_iter().enumerate() {
                        let v = nodes.eval(c64(re, im)).norm() / (p0 * (im.abs() * (1.0 + t)).exp());
                        let slot = &mut per_lambda[i * 5 + j];
                        *slot = slot.max(v);
                    }
                }
            }
            for (i, re) in range(-20.0, 20.0, 2.0).into_iter().enumerate() {
                for (j, im) in range(-1.0, 1.0, 0.5).into_iter().enumerate() {
                    rows.push((c64(re, im).norm(), per_lambda[i * 5 + j]));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<(f64, f64)> = res.into_iter().flatten().collect();
    let xs: Vec<f64> = rows.iter().map(|r| (1.0 + r.0).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = (sxy / sxx).max(0.0);
    let c = rows
        .iter()
        .map(|&(l, r)| r / (1.0 + l).powf(b))
        .fold(0.0f64, f64::max);
    rep.push(CheckResult::new(
        "estimate.eisenstein_growth",
        c.is_finite() && b.is_finite(),
        c,
        f64::INFINITY,
        format!("fitted c = {c:.6}, b = {b:.4}"),
    ));
    Ok(rep)
}

// ---------------------------------------------------------------------------

const FAMILY_A: [f64; 2] = [2.0, 3.0];
const FAMILY_P: [f64; 2] = [2.0, 1.0];

fn family(opts: &SuiteOptions) -> Result<Vec<(i32, f64, RadialProfile)>> {
    let mut out = Vec::new();
    for n in opts.types(3) {
        for a in FAMILY_A {
            out.push((n, a, family_profile(n, a)?));
        }
    }
    Ok(out)
}

fn round_trip(cache: &PlanCache, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let tol = opts.tol(1e-6);
    for (n, a, f) in family(opts)? {
        let plan = cache.get(f.n(), f.kappa())?;
        let err = round_trip_error(&plan, &f, 4.0);
        for p in FAMILY_P {
            let id = format!("round_trip[n={n},a={a},p={p}]");
            let check = f
                .check_schwartz_exponent(p)
                .and_then(|_| err.clone())
                .map(|e| CheckResult::below(&id, e, tol, "relative L2 error on [0, 4]"));
            rep.push(check.unwrap_or_else(|e| failed(&id, tol, e)));
        }
    }
    Ok(rep)
}

/// Components `(n, coefficient, a)` of the mixed-type test function
/// `Σ c_n tanh^{|n|} t sech^{2a} t e^{inψ}`.
pub fn mixed_components(opts: &SuiteOptions) -> Vec<(i32, Complex64, f64)> {
    [(0, c64(1.0, 0.0), 2.0), (1, c64(0.5, -0.25), 2.0), (-2, c64(0.0, 0.3), 2.5)]
        .into_iter()
        .filter(|c| !opts.strict_parity || c.0 % 2 == 0)
        .collect()
}

fn mixed_value(comps: &[(i32, Complex64, f64)], t: f64, psi: f64) -> Complex64 {
    let (th, ch) = (t.tanh(), t.cosh());
    comps
        .iter()
        .map(|&(n, c, a)| c * th.powi(n.abs()) * ch.powf(-2.0 * a) * Complex64::from_polar(1.0, n as f64 * psi))
        .sum()
}

const MIXED_KAPPA: f64 = 4.0;
const MIXED_PSI: usize = 16;

/// The mixed-type test function sampled on the radial rule of `cache` for
/// its decay rate, with 16 angles.
pub fn mixed_samples(cache: &PlanCache, opts: &SuiteOptions) -> Result<PolarSamples> {
    let comps = mixed_components(opts);
    let rule = cache.spec().for_decay(MIXED_KAPPA)?.t_rule()?;
    PolarSamples::from_fn(&rule, MIXED_PSI, MIXED_KAPPA, move |t, psi| mixed_value(&comps, t, psi))
}

fn plancherel(cache: &PlanCache, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let tol = opts.tol(1e-6);
    for (n, a, f) in family(opts)? {
        let id = format!("plancherel[n={n},a={a}]");
        let check = cache
            .get(f.n(), f.kappa())
            .and_then(|plan| plancherel_check(&plan, &f))
            .map(|r| CheckResult::below(&id, r.defect, tol, format!("spatial {:.12e}, spectral {:.12e}", r.lhs, r.rhs)));
        rep.push(check.unwrap_or_else(|e| failed(&id, tol, e)));
    }
    let tol = opts.tol(1e-5);
    let id = "plancherel.hft_mixed";
    let check = mixed_samples(cache, opts).and_then(|f| {
        let lhs = f.energy();
        let rhs = hft_forward_grid(cache, &f, MIXED_PSI)?.energy()?;
        let defect = (lhs - rhs).abs() / lhs.max(rhs);
        Ok(CheckResult::below(id, defect, tol, format!("spatial {lhs:.12e}, spectral {rhs:.12e}")))
    });
    rep.push(check.unwrap_or_else(|e| failed(id, tol, e)));
    Ok(rep)
}

fn boundary_identities(cache: &PlanCache, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let tol = opts.tol(1e-9);
    let f = mixed_samples(cache, opts)?;
    let lambdas = [c64(0.0, 0.0), c64(0.8, 0.0), c64(2.5, 0.0), c64(-3.7, 0.0), c64(0.4, 0.5)];
    let thetas: Vec<f64> = (0..MIXED_PSI).map(|m| TAU * m as f64 / MIXED_PSI as f64).collect();
    let mut types: Vec<i32> = (-3..=3).collect();
    types.retain(|n| !opts.strict_parity || n % 2 == 0);
    let plans = types
        .iter()
        .map(|&n| {
            let kt = KTypeIndex::new(n);
            Ok((kt, delta_project_spatial(&f, kt)?, cache.get(kt, MIXED_KAPPA)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut origin = Worst::new();
    let mut square = Worst::new();
    for &l in &lambdas {
        let sp = SpectralParameter::new(l, 1.0)?;
        let boundary = hft_forward_many(&f, &sp, &thetas)?;
        let mut components = Vec::new();
        for (kt, comp, plan) in &plans {
            components.push((*kt, plan.forward(comp, &sp)?));
        }
        let scale = components.iter().map(|c| c.1.norm()).fold(0.0f64, f64::max);
        // At θ = 0 the boundary transform is the sum of the δ-spherical transforms.
        let sum: Complex64 = components.iter().map(|c| c.1).sum();
        origin.update((boundary[0] - sum).norm() / scale, || format!("λ={l}"));
        // Fourier coefficient in θ against the projected component.
        for (kt, fk) in &components {
            let coeff: Complex64 = boundary
                .iter()
                .zip(&thetas)
                .map(|(v, &th)| v * Complex64::from_polar(1.0, -kt.get() as f64 * th))
                .sum::<Complex64>()
                / thetas.len() as f64;
            square.update((coeff - fk).norm() / scale, || format!("λ={l} n={}", kt.get()));
        }
    }
    rep.push(CheckResult::below("hft.origin_identity", origin.value, tol, origin.at));
    rep.push(CheckResult::below("hft.commuting_square", square.value, tol, square.at));
    Ok(rep)
}

// ---------------------------------------------------------------------------

fn evenness(cache: &PlanCache, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let tol = opts.tol(1e-9);
    for (n, a, f) in family(opts)? {
        let id = format!("evenness[n={n},a={a}]");
        let check = (|| -> Result<CheckResult> {
            let plan = cache.get(f.n(), f.kappa())?;
            let mut strip = Vec::new();
            for re in [0.5, 1.5, 3.0] {
                for im in [-1.0, -0.5, 0.5, 1.0] {
                    for l in [c64(re, im), c64(-re, -im)] {
                        strip.push((l, plan.forward(&f, &SpectralParameter::new(l, 1.0)?)?));
                    }
                }
            }
            let h: SpectralProfile = plan.forward_profile(&f)?.with_strip_samples(strip)?;
            Ok(CheckResult::below(&id, evenness_defect(&h), tol, "real grid and strip pairs"))
        })();
        rep.push(check.unwrap_or_else(|e| failed(&id, tol, e)));
    }
    Ok(rep)
}

fn analyticity(opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let tol = opts.tol(1e-7);
    let cfg = SchwartzConfig::new(1.0)?;
    for (n, a, f) in family(opts)? {
        let id = format!("analyticity[n={n},a={a}]");
        let check = strip_evaluator(&f, &cfg).map(|h| {
            let sub = analyticity_check(&h, &cfg);
            let mut w = Worst::new();
            for c in &sub.checks {
                w.update(c.measured, || c.id.clone());
            }
            CheckResult::below(&id, w.value, tol, format!("20 interior points, worst at {}", w.at))
        });
        rep.push(check.unwrap_or_else(|e| failed(&id, tol, e)));
    }
    Ok(rep)
}

fn seminorms(cache: &PlanCache, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let qs = [0, 1, 2, 3, 4];
    let fam = family(opts)?;
    for p in FAMILY_P {
        let cfg = SchwartzConfig::new(p)?;
        for (n, a, f) in &fam {
            let id = format!("seminorm.tau[n={n},a={a},p={p}]");
            let check = strip_evaluator(f, &cfg)
                .and_then(|h| tau_table(&h, 3, 2, &cfg.clone().excluding_q_zeros(f.n())))
                .map(|table| {
                    let finite = table.iter().all(|s| s.is_finite());
                    let max = table.iter().map(|s| s.value).fold(0.0f64, f64::max);
                    let delta = table.iter().map(|s| s.refinement_delta).fold(0.0f64, f64::max);
                    CheckResult::new(&id, finite, max, f64::INFINITY, format!("r<=3, order<=2; refinement change {delta:.2e}"))
                });
            rep.push(check.unwrap_or_else(|e| failed(&id, f64::INFINITY, e)));
            let id = format!("seminorm.nu[n={n},a={a},p={p}]");
            rep.push(nu_check(&id, f, p, &qs));
        }
    }

    let cfg = SchwartzConfig::new(1.0)?;
    let f = family_profile(0, 3.0)?;
    match decay_bound_check(&f, &cfg, 2, 1) {
        Ok(fit) => {
            let mut sub = fit.to_report("seminorm.bound");
            for c in &mut sub.checks {
                if c.id.ends_with(".stability") {
                    c.tolerance = opts.tol(c.tolerance);
                    c.passed = fit.m.is_some() && c.measured <= c.tolerance;
                }
            }
            rep.extend(sub);
        }
        Err(e) => rep.push(failed("seminorm.bound", 12.0, e)),
    }

    for n in opts.types(3) {
        let id = format!("seminorm.gaussian_inverse[n={n}]");
        let check = (|| -> Result<Vec<CheckResult>> {
            let kt = KTypeIndex::new(n);
            let plan = cache.get(kt, 4.0)?;
            let h = SpectralProfile::from_fn(kt, 1.0, plan.lambda_rule(), move |l| {
                q_delta(kt, c64(l, 0.0)) * (-l * l).exp()
            })?;
            let g = plan.synthesize(&h, 4.0)?;
            Ok(FAMILY_P.iter().map(|&p| nu_check(&format!("{id}.p={p}"), &g, p, &qs)).collect())
        })();
        match check {
            Ok(cs) => cs.into_iter().for_each(|c| rep.push(c)),
            Err(e) => rep.push(failed(&id, f64::INFINITY, e)),
        }
    }
    Ok(rep)
}

fn nu_check(id: &str, f: &RadialProfile, p: f64, qs: &[u32]) -> CheckResult {
    let mut all = Vec::new();
    for k in 0..=2 {
        match nu_seminorms(f, k, qs, p) {
            Ok(r) => all.extend(r),
            Err(e) => return failed(id, f64::INFINITY, e),
        }
    }
    let finite = all.iter().all(|s| s.is_finite());
    let max = all.iter().map(|s| s.value).fold(0.0f64, f64::max);
    CheckResult::new(id, finite, max, f64::INFINITY, "k<=2, q<=4")
}

// ---------------------------------------------------------------------------

/// Sharpness of the bumps whose exponential type is estimated.
pub const PW_BUMP_SHARPNESS: f64 = 0.02;
/// `σ_max · R` for the type estimate.
pub const PW_SIGMA_RADIUS: f64 = 150.0;

/// Support radii of the bumps whose exponential type is estimated.
pub const PW_RADII: [f64; 3] = [0.5, 1.0, 2.0];

/// Estimated exponential type `R̂` of the transform of a bump supported in `t <= radius`.
pub fn pw_type_of_bump(radius: f64) -> Result<f64> {
    let f = bump_profile(radius, PW_BUMP_SHARPNESS)?;
    let h = HorocyclicTransform::compact(&f, radius)?;
    Ok(pw_type_estimate(|s| h.eval(c64(0.0, s)), PW_SIGMA_RADIUS / radius)?.radius())
}

fn paley_wiener(opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let tol = opts.tol(0.05);
    for radius in PW_RADII {
        let id = format!("pw.type[R={radius}]");
        let check = pw_type_of_bump(radius).map(|r_hat| {
            CheckResult::below(
                &id,
                (r_hat - radius).abs() / radius,
                tol,
                format!("estimated type {r_hat:.6}"),
            )
        });
        rep.push(check.unwrap_or_else(|e| failed(&id, tol, e)));
    }

    let tol = opts.tol(0.1);
    let check = (|| -> Result<Vec<CheckResult>> {
        let radius = 3.0;
        let f = bump_profile(radius, 4.0)?;
        let h = HorocyclicTransform::compact(&f, radius)?;
        let lambdas = range(0.0, 32.0, 0.25);
        let vals: Vec<f64> = lambdas
            .par_iter()
            .map(|&l| h.eval(c64(l, 0.0)).map(|v| v.norm()))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for big_n in 0..=6 {
            let w: Vec<f64> = lambdas.iter().zip(&vals).map(|(l, v)| v * (1.0 + l).powi(big_n)).collect();
            let (arg, sup) = w
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            let edge = *w.last().unwrap() / sup;
            let interior = lambdas[arg] <= 0.9 * 32.0;
            out.push(CheckResult::new(
                format!("pw.spectral_decay[N={big_n}]"),
                interior && edge <= tol,
                edge,
                tol,
                format!("sup {sup:.3e} at λ={}", lambdas[arg]),
            ));
        }
        Ok(out)
    })();
    match check {
        Ok(cs) => cs.into_iter().for_each(|c| rep.push(c)),
        Err(e) => rep.push(failed("pw.spectral_decay", tol, e)),
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------

/// Radius of the ball used for chart comparisons.
pub const CHART_RADIUS: f64 = 14.0;
pub const CHART_FUNCTIONS: usize = 20;

/// Random mixed-type test functions for the chart comparison.
pub fn random_test_functions(seed: u64, count: usize) -> Vec<Vec<(i32, Complex64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let terms = rng.gen_range(1..=3);
            (0..terms)
                .map(|_| {
                    let n = rng.gen_range(-3..=3);
                    let c = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    let a = rng.gen_range(2.0..3.0);
                    (n, c, a)
                })
                .collect()
        })
        .collect()
}

/// Relative difference of `∫ (f + |f|²) dx` in polar and horocyclic coordinates.
pub fn chart_defect(comps: &[(i32, Complex64, f64)]) -> Result<f64> {
    let policy = TailPolicy::new(1e-10, CHART_RADIUS, 2.0)?;
    let g = |z: &DiskPoint| {
        let v = mixed_value(comps, z.t(), z.psi());
        v + v.norm_sqr()
    };
    // Smooth radial majorant of |f| + |f|², so the scale is cheap to integrate.
    let scale = integrate_x(
        |z: &DiskPoint| {
            let (th, ch) = (z.t().tanh(), z.t().cosh());
            let m: f64 = comps.iter().map(|&(n, c, a)| c.norm() * th.powi(n.abs()) * ch.powf(-2.0 * a)).sum();
            c64(m + m * m, 0.0)
        },
        Chart::Polar,
        &policy,
    )?
    .re;
    let polar = integrate_x(g, Chart::Polar, &policy)?;
    let horo = integrate_x(g, Chart::Horocyclic, &policy)?;
    Ok((polar - horo).norm() / scale)
}

fn infrastructure(cache: &PlanCache, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();

    let tol = opts.tol(1e-7);
    let funcs = random_test_functions(opts.seed, CHART_FUNCTIONS);
    let defects: Vec<Result<f64>> = funcs.par_iter().map(|c| chart_defect(c)).collect();
    let mut w = Worst::new();
    let mut error = None;
    for (i, d) in defects.into_iter().enumerate() {
        match d {
            Ok(v) => w.update(v, || format!("function {i}")),
            Err(e) => {
                error.get_or_insert(e);
            }
        }
    }
    rep.push(match error {
        Some(e) => failed("infra.chart_consistency", tol, e),
        None => CheckResult::below(
            "infra.chart_consistency",
            w.value,
            tol,
            format!("{CHART_FUNCTIONS} random functions, worst {}", w.at),
        ),
    });

    let tol = opts.tol(1e-14);
    let mut w = Worst::new();
    for j in -8i32..=8 {
        for k in -8i32..=8 {
            let avg = circle_average(|th| Complex64::from_polar(1.0, (j - k) as f64 * th), 64)?;
            let expect = if j == k { 1.0 } else { 0.0 };
            w.update((avg - expect).norm(), || format!("j={j} k={k}"));
        }
    }
    rep.push(CheckResult::below("infra.character_orthogonality", w.value, tol, w.at));

    // Two evaluations of the same pipeline must agree bit for bit.
    let f = family_profile(1, 2.0)?;
    let plan = cache.get(f.n(), f.kappa())?;
    let run = || -> Result<Vec<u64>> {
        let h = plan.forward_profile(&f)?;
        let back = plan.inverse_on_nodes(&h)?;
        Ok(h.values()
            .iter()
            .chain(&back)
            .flat_map(|v| [v.re.to_bits(), v.im.to_bits()])
            .collect())
    };
    let (a, b) = (run()?, run()?);
    let mismatches = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    rep.push(CheckResult::new(
        "infra.determinism",
        mismatches == 0,
        mismatches as f64,
        0.0,
        "bitwise comparison of forward and inverse transforms",
    ));
    Ok(rep)
}
