//! Schwartz-space checks: the radial Laplacian, the ν seminorms on the disk,
//! the τ seminorms on the strip, contour derivatives, analyticity and
//! Paley-Wiener type estimates, and the seminorm bound verifier.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{phi_zero, KTypeIndex};
use crate::report::{CheckResult, VerificationReport};
use crate::transforms::{
    q_delta, HorocyclicTransform, ProfileSource, RadialProfile, SpectralProfile, STRIP_MARGIN,
};

/// Points on each Cauchy circle.
pub const CAUCHY_POINTS: usize = 64;
/// Largest Cauchy radius.
pub const CAUCHY_MAX_RADIUS: f64 = 0.3;
/// Default radial grid: `t_i = RADIAL_STEP · i`, `i = 1..=RADIAL_POINTS`.
pub const RADIAL_STEP: f64 = 0.02;
pub const RADIAL_POINTS: usize = 600;
/// Step of the five-point stencil for `L`.
pub const LAPLACIAN_STEP: f64 = 1e-3;
/// Step used at every level when `L` is applied more than once.
pub const NESTED_LAPLACIAN_STEP: f64 = 0.01;
/// Radius of the disks around zeros of `Q^δ` excluded from division.
pub const Q_ZERO_EXCLUSION: f64 = 0.1;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// A function analytic on `|Im λ| < analytic_bound()`.
pub trait StripFunction: Sync {
    fn eval(&self, lambda: Complex64) -> Result<Complex64>;
    /// `f64::INFINITY` for entire functions.
    fn analytic_bound(&self) -> f64;
}

impl StripFunction for HorocyclicTransform {
    fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        HorocyclicTransform::eval(self, lambda)
    }

    fn analytic_bound(&self) -> f64 {
        self.strip_bound()
    }
}

/// Closure together with its strip of analyticity.
pub struct AnalyticFn<F> {
    f: F,
    bound: f64,
}

impl<F: Fn(Complex64) -> Complex64 + Sync> AnalyticFn<F> {
    pub fn entire(f: F) -> Self {
        Self { f, bound: f64::INFINITY }
    }

    pub fn on_strip(f: F, bound: f64) -> Self {
        Self { f, bound }
    }
}

impl<F: Fn(Complex64) -> Complex64 + Sync> StripFunction for AnalyticFn<F> {
    fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        Ok((self.f)(lambda))
    }

    fn analytic_bound(&self) -> f64 {
        self.bound
    }
}

/// Sampling grids for a Schwartz exponent `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwartzConfig {
    p: f64,
    epsilon: f64,
    strip_grid: Vec<Complex64>,
    radial_grid: Vec<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl SchwartzConfig {
    /// Default grids: `40 × 9` strip points on `[-20, 20] × [-ε, ε]` and the
    /// radial grid `0.02, 0.04, ..., 12`.
    pub fn new(p: f64) -> Result<Self> {
        let epsilon = epsilon_for(p)?;
        let ims = if epsilon == 0.0 { vec![0.0] } else { linspace(-epsilon, epsilon, 9) };
        let mut strip_grid = Vec::with_capacity(40 * ims.len());
        for &im in &ims {
            for re in linspace(-20.0, 20.0, 40) {
                strip_grid.push(Complex64::new(re, im));
            }
        }
        let radial_grid = (1..=RADIAL_POINTS).map(|i| RADIAL_STEP * i as f64).collect();
        Self::with_grids(p, strip_grid, radial_grid)
    }

    pub fn with_grids(p: f64, strip_grid: Vec<Complex64>, radial_grid: Vec<f64>) -> Result<Self> {
        let epsilon = epsilon_for(p)?;
        if strip_grid.is_empty() || radial_grid.is_empty() {
            return Err(Error::Parameter("Schwartz grids must be nonempty".into()));
        }
        if let Some(l) = strip_grid.iter().find(|l| l.im.abs() > epsilon + 1e-12) {
            return Err(Error::Parameter(format!("strip point {l} outside |Im λ| <= {epsilon}")));
        }
        if radial_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Parameter("radial grid points must be positive".into()));
        }
        Ok(Self {
            p,
            epsilon,
            strip_grid,
            radial_grid,
        })
    }

    /// Drops strip points within [`Q_ZERO_EXCLUSION`] of a zero of `Q^δ_n`.
    pub fn excluding_q_zeros(mut self, n: KTypeIndex) -> Self {
        let zeros = q_delta_zeros(n);
        self.strip_grid
            .retain(|l| zeros.iter().all(|z| (l - z).norm() >= Q_ZERO_EXCLUSION));
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn strip_grid(&self) -> &[Complex64] {
        &self.strip_grid
    }

    pub fn radial_grid(&self) -> &[f64] {
        &self.radial_grid
    }
}

fn epsilon_for(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::Parameter(format!("p = {p} outside (0, 2]")));
    }
    Ok(2.0 / p - 1.0)
}

/// Zeros of `Q^δ_n(λ) = Q_n(-λ)`: `λ = -i(1 + 2j)`.
pub fn q_delta_zeros(n: KTypeIndex) -> Vec<Complex64> {
    (0..n.abs())
        .map(|j| Complex64::new(0.0, -(1.0 + 2.0 * j as f64)))
        .collect()
}

/// Where a supremum was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Radial(f64),
    Spectral(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeminormKind {
    /// `sup |L^k f| φ_0^{-2/p} (1+t)^q`.
    Nu { k: u32, q: u32, p: f64 },
    /// `sup |(d/dλ)^order {(1+λ²)^r h}|`.
    Tau { r: u32, order: u32 },
}

/// Supremum of a seminorm over a finite grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormReport {
    /// Grid supremum, or `+∞` when the supremum grows with the grid extent.
    pub value: f64,
    /// Largest value seen on the refined grid.
    pub grid_sup: f64,
    pub arg_max: Location,
    /// Relative change of the supremum when the grid density doubles.
    pub refinement_delta: f64,
    pub divergent: bool,
    pub kind: SeminormKind,
}

impl SeminormReport {
    pub fn is_finite(&self) -> bool {
        !self.divergent && self.value.is_finite()
    }
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    if fine == 0.0 {
        0.0
    } else {
        (fine - coarse).abs() / fine
    }
}

// ---------------------------------------------------------------------------
// Radial Laplacian

fn laplacian_stencil<G: Fn(f64) -> Complex64>(g: G, n: i32, h: f64, t: f64) -> Complex64 {
    let (m2, m1, c0, p1, p2) = (g(t - 2.0 * h), g(t - h), g(t), g(t + h), g(t + 2.0 * h));
    let d1 = (m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h);
    let d2 = ((m2 + p2) * -1.0 + (m1 + p1) * 16.0 - c0 * 30.0) / (12.0 * h * h);
    let s = (2.0 * t).sinh();
    let nn = (n * n) as f64;
    d2 + d1 * (2.0 / (2.0 * t).tanh()) - c0 * (4.0 * nn / (s * s))
}

/// `L^k g` by nested five-point differences; the step shrinks near the
/// origin so that every stencil point stays positive.
fn nested_laplacian(f: &RadialProfile, k: u32, t: f64, step: f64) -> Complex64 {
    if k == 0 {
        return f.value(t);
    }
    let h = step.min(t / 2.5);
    let n = f.n().get();
    laplacian_stencil(|s| nested_laplacian(f, k - 1, s, step), n, h, t)
}

/// `L_n g(t) = g'' + 2 coth(2t) g' - 4n²/sinh²(2t) g`, the radial part of
/// the Laplace-Beltrami operator on type-n functions.
pub fn radial_laplacian(f: &RadialProfile, t: f64) -> Result<Complex64> {
    laplacian_power(f, 1, t)
}

/// `L^k g(t)`: exact for spectrally defined profiles, otherwise by finite
/// differences (step `1e-3` for `k = 1`, `0.01` per level beyond).
pub fn laplacian_power(f: &RadialProfile, k: u32, t: f64) -> Result<Complex64> {
    if let Some(v) = f.exact_laplacian_power(k, t) {
        return v;
    }
    if k == 0 {
        return Ok(f.value(t));
    }
    let min_t = match f.source() {
        ProfileSource::Samples => 4.0 * sample_spacing(f),
        _ => 1e-6,
    };
    if !(t >= min_t) {
        return Err(Error::Domain(format!(
            "L is singular at the origin in polar coordinates; t = {t} is below {min_t:e}"
        )));
    }
    let step = match f.source() {
        ProfileSource::Samples => sample_spacing(f).max(NESTED_LAPLACIAN_STEP),
        _ if k == 1 => LAPLACIAN_STEP,
        _ => NESTED_LAPLACIAN_STEP,
    };
    let v = nested_laplacian(f, k, t, step);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { theta: t })
    }
}

fn sample_spacing(f: &RadialProfile) -> f64 {
    let s = f.samples();
    s.windows(2).map(|w| w[1].0 - w[0].0).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// ν seminorms

const NU_EXTENT_FRACTION: f64 = 0.9;
const NU_GROWTH_RATIO: f64 = 2.0;

/// `φ_0` on the refined radial grid `t = 0.01 i`, `i = 1..=1200`.
fn phi_zero_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=2 * RADIAL_POINTS)
            .into_par_iter()
            .map(|i| phi_zero(0.5 * RADIAL_STEP * i as f64).expect("φ_0 on the default grid"))
            .collect()
    })
}

/// `ν_{k,q,p}(f) = sup_t |L^k f(t)| φ_0(t)^{-2/p} (1+t)^q` on the default
/// radial grid, with a doubled-density refinement.
///
/// The value is `+∞` (and `divergent` set) when the supremum sits in the
/// outer tenth of the grid and exceeds twice the supremum over the inner
/// half, i.e. it grows with the grid extent.
pub fn nu_seminorm(f: &RadialProfile, k: u32, q: u32, p: f64) -> Result<SeminormReport> {
    nu_seminorms(f, k, &[q], p).map(|mut v| v.remove(0))
}

/// [`nu_seminorm`] for several `q` sharing one set of `L^k f` samples.
pub fn nu_seminorms(f: &RadialProfile, k: u32, qs: &[u32], p: f64) -> Result<Vec<SeminormReport>> {
    epsilon_for(p)?;
    let phi0 = phi_zero_table();
    let ts: Vec<f64> = (1..=phi0.len()).map(|i| 0.5 * RADIAL_STEP * i as f64).collect();
    let lk: Vec<f64> = ts
        .par_iter()
        .map(|&t| laplacian_power(f, k, t).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let extent = ts[ts.len() - 1];
    Ok(qs
        .iter()
        .map(|&q| {
            let vals: Vec<f64> = ts
                .iter()
                .zip(&lk)
                .zip(phi0)
                .map(|((&t, &v), &ph)| v * ph.powf(-2.0 / p) * (1.0 + t).powi(q as i32))
                .collect();
            let (mut fine, mut coarse, mut inner, mut arg) = (0.0f64, 0.0f64, 0.0f64, ts[0]);
            for (i, (&t, &v)) in ts.iter().zip(&vals).enumerate() {
                if v > fine {
                    fine = v;
                    arg = t;
                }
                if i % 2 == 1 {
                    coarse = coarse.max(v);
                }
                if t <= 0.5 * extent {
                    inner = inner.max(v);
                }
            }
            let divergent = arg > NU_EXTENT_FRACTION * extent && fine > NU_GROWTH_RATIO * inner;
            SeminormReport {
                value: if divergent { f64::INFINITY } else { fine },
                grid_sup: fine,
                arg_max: Location::Radial(arg),
                refinement_delta: relative_change(coarse, fine),
                divergent,
                kind: SeminormKind::Nu { k, q, p },
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Contour derivatives and τ seminorms

/// Cauchy radius at `λ0`: `min(0.4 · distance to the strip edge, 0.3)`.
pub fn cauchy_radius<H: StripFunction + ?Sized>(h: &H, lambda0: Complex64) -> f64 {
    let room = h.analytic_bound() - lambda0.im.abs();
    (0.4 * room).min(CAUCHY_MAX_RADIUS)
}

fn check_disk<H: StripFunction + ?Sized>(h: &H, lambda0: Complex64, radius: f64) -> Result<()> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("Cauchy radius {radius} must be positive")));
    }
    if lambda0.im.abs() + radius >= h.analytic_bound() {
        return Err(Error::Domain(format!(
            "disk of radius {radius} around {lambda0} leaves the strip |Im λ| < {}",
            h.analytic_bound()
        )));
    }
    Ok(())
}

fn circle_samples<H: StripFunction + ?Sized>(h: &H, lambda0: Complex64, radius: f64) -> Result<Vec<Complex64>> {
    (0..CAUCHY_POINTS)
        .map(|k| h.eval(lambda0 + Complex64::from_polar(radius, TAU * k as f64 / CAUCHY_POINTS as f64)))
        .collect()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `order!/ρ^order · (1/2π) ∮ w(θ) e^{-i order θ} dθ` from equispaced samples.
fn cauchy_from_samples(samples: &[Complex64], radius: f64, order: u32) -> Result<Complex64> {
    let m = samples.len();
    let avg = crate::quadrature::circle_average(
        |theta| {
            let k = ((theta / TAU) * m as f64).round() as usize % m;
            samples[k] * Complex64::from_polar(1.0, -(order as f64) * theta)
        },
        m,
    )?;
    Ok(avg * (factorial(order) / radius.powi(order as i32)))
}

/// `h^{(order)}(λ0) = order!/(2πi) ∮ h(ζ)/(ζ-λ0)^{order+1} dζ` on the
/// circle of the given radius.
pub fn cauchy_derivative<H: StripFunction + ?Sized>(
    h: &H,
    lambda0: Complex64,
    order: u32,
    radius: f64,
) -> Result<Complex64> {
    check_disk(h, lambda0, radius)?;
    let samples = circle_samples(h, lambda0, radius)?;
    cauchy_from_samples(&samples, radius, order)
}

/// `τ_{r,order}(h) = sup |(d/dλ)^order {(1+λ²)^r h(λ)}|` over the strip grid.
pub fn tau_seminorm<H: StripFunction + ?Sized>(h: &H, r: u32, order: u32, cfg: &SchwartzConfig) -> Result<SeminormReport> {
    let table = tau_table(h, r, order, cfg)?;
    Ok(table
        .into_iter()
        .find(|s| s.kind == SeminormKind::Tau { r, order })
        .expect("requested seminorm is in the table"))
}

/// All `τ_{r,o}` with `r <= r_max`, `o <= order_max`, from one set of
/// circle samples per strip point. The refinement adds the midpoints
/// between neighbouring real parts of the grid.
pub fn tau_table<H: StripFunction + ?Sized>(
    h: &H,
    r_max: u32,
    order_max: u32,
    cfg: &SchwartzConfig,
) -> Result<Vec<SeminormReport>> {
    let grid = cfg.strip_grid();
    let mut points: Vec<(Complex64, bool)> = grid.iter().map(|&l| (l, false)).collect();
    points.extend(refinement_points(grid).into_iter().map(|l| (l, true)));
    let per_point: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&(l0, _)| {
            let radius = cauchy_radius(h, l0);
            check_disk(h, l0, radius)?;
            let samples = circle_samples(h, l0, radius)?;
            let center = h.eval(l0)?;
            let mut out = Vec::with_capacity(((r_max + 1) * (order_max + 1)) as usize);
            for r in 0..=r_max {
                let weighted: Vec<Complex64> = samples
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| {
                        let z = l0 + Complex64::from_polar(radius, TAU * k as f64 / CAUCHY_POINTS as f64);
                        v * (Complex64::new(1.0, 0.0) + z * z).powu(r)
                    })
                    .collect();
                for o in 0..=order_max {
                    let d = if o == 0 {
                        center * (Complex64::new(1.0, 0.0) + l0 * l0).powu(r)
                    } else {
                        cauchy_from_samples(&weighted, radius, o)?
                    };
                    out.push(d.norm());
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    let mut idx = 0;
    for r in 0..=r_max {
        for o in 0..=order_max {
            let (mut coarse, mut fine, mut arg) = (0.0f64, 0.0f64, points[0].0);
            for (&(l, refined), vals) in points.iter().zip(&per_point) {
                let v = vals[idx];
                if !refined {
                    coarse = coarse.max(v);
                }
                if v > fine {
                    fine = v;
                    arg = l;
                }
            }
            reports.push(SeminormReport {
                value: coarse,
                grid_sup: fine,
                arg_max: Location::Spectral(arg),
                refinement_delta: relative_change(coarse, fine),
                divergent: false,
                kind: SeminormKind::Tau { r, order: o },
            });
            idx += 1;
        }
    }
    Ok(reports)
}

/// Midpoints between consecutive real parts on each horizontal line of the grid.
fn refinement_points(grid: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for w in grid.windows(2) {
        if w[0].im == w[1].im && w[1].re > w[0].re {
            out.push((w[0] + w[1]) * 0.5);
        }
    }
    out
}

/// Strip evaluator for `f̃` through horocyclic integrals. It is validated up to
/// `min(κ - 1 - margin, ε + 0.75, (κ - 1 + ε)/2)`, which leaves Cauchy
/// circles room around every grid point and keeps the quadrature range finite.
pub fn strip_evaluator(f: &RadialProfile, cfg: &SchwartzConfig) -> Result<HorocyclicTransform> {
    let eps = cfg.epsilon();
    let bound = (f.kappa() - 1.0 - STRIP_MARGIN)
        .min(eps + 0.75)
        .min(0.5 * (f.kappa() - 1.0 + eps));
    if !(bound > eps) {
        return Err(Error::Domain(format!(
            "profile decay κ = {} leaves no room around the strip |Im λ| <= {eps}",
            f.kappa()
        )));
    }
    HorocyclicTransform::new(f, bound)
}

/// Compares the order-0 contour integral with direct evaluation at 20
/// interior points (real parts `-3..3`, imaginary parts `±0.2ε`, `±0.6ε`).
pub fn analyticity_check<H: StripFunction + ?Sized>(h: &H, cfg: &SchwartzConfig) -> VerificationReport {
    const TOL: f64 = 1e-7;
    let eps = cfg.epsilon();
    let mut points = Vec::with_capacity(20);
    for re in linspace(-3.0, 3.0, 5) {
        for im in [-0.6 * eps, -0.2 * eps, 0.2 * eps, 0.6 * eps] {
            points.push(Complex64::new(re, im));
        }
    }
    let results: Vec<CheckResult> = points
        .par_iter()
        .map(|&l0| {
            let id = format!("analyticity[{:+.2}{:+.2}i]", l0.re, l0.im);
            let radius = cauchy_radius(h, l0);
            let outcome = cauchy_derivative(h, l0, 0, radius).and_then(|c| h.eval(l0).map(|d| (c, d)));
            match outcome {
                Ok((c, d)) => {
                    let scale = d.norm().max(c.norm());
                    let defect = if scale == 0.0 { 0.0 } else { (c - d).norm() / scale };
                    CheckResult::below(id, defect, TOL, format!("radius {radius:.3}"))
                }
                Err(e) => CheckResult::new(id, false, f64::NAN, TOL, e.to_string()),
            }
        })
        .collect();
    VerificationReport { checks: results }
}

/// `sup |h(λ)/Q^δ(λ) - h(-λ)/Q^δ(-λ)|` over grid pairs `±λ` away from the
/// zeros of `Q^δ`.
pub fn evenness_defect(h: &SpectralProfile) -> f64 {
    let n = h.n();
    let zeros = q_delta_zeros(n);
    let away = |l: Complex64| zeros.iter().all(|z| (l - z).norm() >= Q_ZERO_EXCLUSION && (-l - z).norm() >= Q_ZERO_EXCLUSION);
    let mut worst = 0.0f64;
    let real: Vec<(f64, Complex64)> = h.real_grid().collect();
    let m = real.len();
    for j in 0..m / 2 {
        let (l, a) = real[m - 1 - j];
        let (_, b) = real[j];
        let lc = Complex64::new(l, 0.0);
        if away(lc) {
            worst = worst.max((a / q_delta(n, lc) - b / q_delta(n, -lc)).norm());
        }
    }
    let strip = h.strip_samples();
    for &(l, a) in strip {
        if let Some(&(_, b)) = strip.iter().find(|(x, _)| (*x + l).norm() < 1e-12) {
            if away(l) {
                worst = worst.max((a / q_delta(n, l) - b / q_delta(n, -l)).norm());
            }
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Paley-Wiener type

/// Outcome of [`pw_type_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PwType {
    /// Exponential type `R̂ > 0`.
    Finite(f64),
    /// No exponential growth along the imaginary axis.
    Zero,
    /// Growth faster than any exponential: the fitted slope keeps increasing.
    SuperExponential,
}

impl PwType {
    /// `R̂`, with `0` for [`PwType::Zero`] and `+∞` for super-exponential growth.
    pub fn radius(&self) -> f64 {
        match self {
            PwType::Finite(r) => *r,
            PwType::Zero => 0.0,
            PwType::SuperExponential => f64::INFINITY,
        }
    }
}

const PW_SAMPLES: usize = 48;
const PW_ZERO_SLOPE: f64 = 1e-3;
const PW_SUPER_RATIO: f64 = 1.5;

fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 3 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Estimates the exponential type `lim sup log|h(iσ)|/σ` by the least-squares
/// slope of `log|h(iσ)|` on `σ ∈ [σ_max/2, σ_max]`. The slope on
/// `[σ_max/4, σ_max/2]` is compared to detect super-exponential growth.
pub fn pw_type_estimate<H>(h: H, sigma_max: f64) -> Result<PwType>
where
    H: Fn(f64) -> Result<Complex64> + Sync,
{
    if !(sigma_max >= 4.0) || !sigma_max.is_finite() {
        return Err(Error::Parameter(format!("σ_max = {sigma_max} must be at least 4")));
    }
    let sigmas = linspace(0.25 * sigma_max, sigma_max, PW_SAMPLES + 1);
    let mags: Vec<f64> = sigmas
        .par_iter()
        .map(|&s| h(s).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    if mags.iter().all(|&m| !(m >= 1e-300)) {
        return Err(Error::Underflow);
    }
    let fit = |lo: f64, hi: f64| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = sigmas
            .iter()
            .zip(&mags)
            .filter(|(s, m)| **s >= lo - 1e-12 && **s <= hi + 1e-12 && **m >= 1e-300)
            .map(|(&s, &m)| (s, m.ln()))
            .unzip();
        ls_slope(&xs, &ys)
    };
    let Some(high) = fit(0.5 * sigma_max, sigma_max) else {
        return Err(Error::Underflow);
    };
    let low = fit(0.25 * sigma_max, 0.5 * sigma_max);
    if let Some(low) = low {
        if low > PW_ZERO_SLOPE && high > PW_SUPER_RATIO * low {
            return Ok(PwType::SuperExponential);
        }
    }
    if high <= PW_ZERO_SLOPE {
        Ok(PwType::Zero)
    } else {
        Ok(PwType::Finite(high))
    }
}

/// `g(t) = exp(-δ / (1 - (t/R)²))` for `t < R`, zero beyond: a smooth radial
/// bump supported in the ball of radius `R`. Its decay rate is recorded as
/// `100`, standing in for "faster than any exponential".
pub fn bump_profile(radius: f64, delta: f64) -> Result<RadialProfile> {
    if !(radius > 0.0 && delta > 0.0) {
        return Err(Error::Parameter("bump radius and sharpness must be positive".into()));
    }
    RadialProfile::from_fn(KTypeIndex::new(0), 100.0, move |t| {
        let u = t / radius;
        if u >= 1.0 {
            zero()
        } else {
            Complex64::new((-delta / (1.0 - u * u)).exp(), 0.0)
        }
    })
}

// ---------------------------------------------------------------------------
// Seminorm bound

/// Dilations used to test stability of the fitted constant.
pub const DECAY_BOUND_DILATIONS: [f64; 3] = [0.5, 1.0, 2.0];
pub const DECAY_BOUND_MAX_M: u32 = 12;
pub const DECAY_BOUND_STABILITY: f64 = 10.0;

/// Fitted constants of the bound `τ_{r,order}(f̃) <= c · ν_{r,m,p}(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayBoundFit {
    /// Common `m` for all admissible dilations.
    pub m: Option<u32>,
    /// `(s, τ, m*(s), c_fit(s))` per admissible dilation, with `c_fit`
    /// evaluated at the common `m`.
    pub dilations: Vec<(f64, f64, Option<u32>, f64)>,
    /// `max c_fit / min c_fit` across dilations.
    pub spread: f64,
    pub skipped: Vec<f64>,
}

impl DecayBoundFit {
    pub fn stable(&self) -> bool {
        self.m.is_some() && self.spread <= DECAY_BOUND_STABILITY
    }

    pub fn to_report(&self, id: &str) -> VerificationReport {
        let mut rep = VerificationReport::new();
        let m = self.m.map_or(f64::INFINITY, f64::from);
        let detail = self
            .dilations
            .iter()
            .map(|(s, tau, ms, c)| {
                format!("s={s}: tau={tau:.3e} m*={} c={c:.3e}", ms.map_or("none".into(), |m| m.to_string()))
            })
            .collect::<Vec<_>>()
            .join("; ");
        rep.push(CheckResult::new(
            format!("{id}.m"),
            self.m.is_some(),
            m,
            f64::from(DECAY_BOUND_MAX_M),
            detail,
        ));
        rep.push(CheckResult::new(
            format!("{id}.stability"),
            self.stable(),
            self.spread,
            DECAY_BOUND_STABILITY,
            if self.skipped.is_empty() {
                String::new()
            } else {
                format!("inadmissible dilations skipped: {:?}", self.skipped)
            },
        ));
        rep
    }
}

/// For each dilation `g_s(t) = g(st)` with `sκ > 2/p`: `τ = τ_{r,order}(g̃_s)`
/// and `m*(s)`, the least `m <= 12` with `τ <= ν_{r,m,p}(g_s)` finite. The
/// common `m` is the least `m >= max m*` whose `c_fit(s) = τ / ν_{r,m,p}(g_s)`
/// is stable across dilations (the largest `m*` if none is).
pub fn decay_bound_check(f: &RadialProfile, cfg: &SchwartzConfig, r: u32, order: u32) -> Result<DecayBoundFit> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &s in &DECAY_BOUND_DILATIONS {
        let fs = f.dilated(s)?;
        if fs.check_schwartz_exponent(cfg.p()).is_err() || strip_evaluator(&fs, cfg).is_err() {
            skipped.push(s);
            continue;
        }
        let h = strip_evaluator(&fs, cfg)?;
        let tau = tau_seminorm(&h, r, order, cfg)?.value;
        let qs: Vec<u32> = (0..=DECAY_BOUND_MAX_M).collect();
        let nus: Vec<f64> = nu_seminorms(&fs, r, &qs, cfg.p())?
            .into_iter()
            .map(|rep| if rep.is_finite() { rep.value } else { f64::INFINITY })
            .collect();
        let m_star = nus.iter().position(|&nu| nu.is_finite() && tau <= nu).map(|m| m as u32);
        rows.push((s, tau, m_star, nus));
    }
    let spread_at = |m: u32| -> f64 {
        let cs: Vec<f64> = rows
            .iter()
            .map(|r| r.3[m as usize])
            .filter(|nu| *nu > 0.0)
            .zip(&rows)
            .map(|(nu, r)| r.1 / nu)
            .filter(|c| c.is_finite() && *c > 0.0)
            .collect();
        if cs.is_empty() {
            1.0
        } else {
            cs.iter().cloned().fold(0.0, f64::max) / cs.iter().cloned().fold(f64::INFINITY, f64::min)
        }
    };
    // Least m where the bound holds for every dilation; raised further (up
    // to the cap) while that makes the fitted constant dilation-stable.
    let m = if rows.is_empty() || rows.iter().any(|r| r.2.is_none()) {
        None
    } else {
        rows.iter().filter_map(|r| r.2).max().map(|m0| {
            (m0..=DECAY_BOUND_MAX_M)
                .find(|&m| rows.iter().all(|r| r.3[m as usize].is_finite()) && spread_at(m) <= DECAY_BOUND_STABILITY)
                .unwrap_or(m0)
        })
    };
    let spread = m.map_or(f64::INFINITY, spread_at);
    let dilations = rows
        .into_iter()
        .map(|(s, tau, m_star, nus)| {
            let c = match m {
                Some(m) if nus[m as usize] > 0.0 => tau / nus[m as usize],
                Some(_) => 0.0,
                None => f64::NAN,
            };
            (s, tau, m_star, c)
        })
        .collect();
    Ok(DecayBoundFit {
        m,
        dilations,
        spread,
        skipped,
    })
}
