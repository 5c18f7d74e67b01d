//! δ-spherical transform and its inverse, the Helgason Fourier transform on
//! the disk, δ-projections, Plancherel identities and the spectral
//! realization of `D^δ`.
//!
//! Conventions (type-n function `f(t, ψ) = g(t) e^{inψ}`):
//!
//! ```text
//! f̃(λ)   = ∫₀^∞ g(t) Φ_{-λ,n}(t) 2 sinh(2t) dt
//! g(t)    = (1/ω) ∫_R Φ_{λ,n}(t) f̃(λ) ν_P(λ) dλ,        ω = 2
//! 𝓕f(λ,b) = ∫_X f(z) P(z,b)^{(1-iλ)/2} dx
//! ```
//!
//! Since the forward kernel is `Φ_{-λ,n}`, the transform side factor is
//! `Q^δ(λ) = Q_n(-λ)`: `f̃(λ)/Q_n(-λ)` is even.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::disk::{HorocyclicPoint, MeasureConvention, WEYL_ORDER};
use crate::error::{Error, Result};
use crate::kernels::{plancherel_density, q_poly, KTypeIndex, KernelNodes, SpectralParameter};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, integrate_adaptive, QuadratureRule};

/// Safety margin subtracted from the decay-limited strip width.
pub const STRIP_MARGIN: f64 = 0.05;

/// Largest `|h ν_P|` tolerated at the edge of a spectral grid, relative to
/// its peak on the grid.
pub const SPECTRAL_EDGE_TOL: f64 = 1e-9;

/// The radial grid of a plan extends to `t_max` with `(κ - 1) t_max >= RADIAL_LOG_RANGE`.
pub const RADIAL_LOG_RANGE: f64 = 40.0;

const MAX_T_PANELS: usize = 64;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Transform-side polynomial `Q^δ(λ) = Q_n(-λ)`.
pub fn q_delta(n: KTypeIndex, lambda: Complex64) -> Complex64 {
    q_poly(n, -lambda)
}

/// Radial and spectral grids of a [`TransformPlan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_max: f64,
    pub t_panels: usize,
    pub t_order: usize,
    pub lambda_max: f64,
    pub lambda_panels: usize,
    pub lambda_order: usize,
    /// Largest `|Im λ|` at which the forward kernel tables are validated.
    pub strip: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_max: 8.0,
            t_panels: 4,
            t_order: 48,
            lambda_max: 32.0,
            lambda_panels: 8,
            lambda_order: 64,
            strip: 1.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_max > 0.0
            && self.lambda_max > 0.0
            && self.t_panels > 0
            && self.t_order > 0
            && self.lambda_panels > 0
            && self.lambda_order > 0
            && self.strip >= 0.0
            && self.t_max.is_finite()
            && self.lambda_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid grid specification {self:?}")))
        }
    }

    /// Same grid with the radial range extended (in whole panels) far
    /// enough for profiles with decay rate `kappa`.
    pub fn for_decay(&self, kappa: f64) -> Result<Self> {
        if !(kappa > 1.0) {
            return Err(Error::Domain(format!(
                "decay rate κ = {kappa} is too slow for the δ-spherical transform (need κ > 1)"
            )));
        }
        let width = self.t_max / self.t_panels as f64;
        let needed = (RADIAL_LOG_RANGE / (kappa - 1.0) / width).ceil() as usize;
        let panels = needed.clamp(self.t_panels, MAX_T_PANELS.max(self.t_panels));
        Ok(Self {
            t_panels: panels,
            t_max: width * panels as f64,
            ..*self
        })
    }

    pub fn t_rule(&self) -> Result<QuadratureRule> {
        composite_gauss_legendre(self.t_panels, self.t_order, 0.0, self.t_max)
    }

    pub fn lambda_rule(&self) -> Result<QuadratureRule> {
        composite_gauss_legendre(self.lambda_panels, self.lambda_order, -self.lambda_max, self.lambda_max)
    }
}

type Evaluator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Where the values of a [`RadialProfile`] come from.
#[derive(Clone)]
pub enum ProfileSource {
    /// Closed-form evaluator.
    Analytic(Evaluator),
    /// Inverse transform of spectral data; `L^k` is exact through the
    /// multiplier `(-(λ²+1))^k`.
    Spectral(Arc<SpectralSynthesis>),
    /// Only the stored samples; values between nodes are interpolated.
    Samples,
}

impl std::fmt::Debug for ProfileSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Analytic(_) => write!(f, "Analytic"),
            Self::Spectral(_) => write!(f, "Spectral"),
            Self::Samples => write!(f, "Samples"),
        }
    }
}

/// Radial part `g` of a type-n function `g(t) e^{inψ}`, with decay rate
/// `κ` such that `|g(t)| <= C e^{-κt}`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    n: KTypeIndex,
    kappa: f64,
    samples: Vec<(f64, Complex64)>,
    source: ProfileSource,
}

fn default_sample_grid() -> Vec<f64> {
    GridSpec::default()
        .t_rule()
        .expect("default grid is valid")
        .nodes()
        .to_vec()
}

impl RadialProfile {
    /// Profile with a closed-form evaluator, sampled on the default radial grid.
    pub fn from_fn<F>(n: KTypeIndex, kappa: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let f: Evaluator = Arc::new(f);
        let samples = default_sample_grid().into_iter().map(|t| (t, f(t))).collect();
        let p = Self {
            n,
            kappa,
            samples,
            source: ProfileSource::Analytic(f),
        };
        p.validate()?;
        Ok(p)
    }

    /// Profile known only through samples.
    pub fn from_samples(n: KTypeIndex, kappa: f64, samples: Vec<(f64, Complex64)>) -> Result<Self> {
        let p = Self {
            n,
            kappa,
            samples,
            source: ProfileSource::Samples,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> KTypeIndex {
        self.n
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    pub fn source(&self) -> &ProfileSource {
        &self.source
    }

    pub fn has_evaluator(&self) -> bool {
        !matches!(self.source, ProfileSource::Samples)
    }

    /// Checks the stored invariants: finite, strictly increasing, non-negative
    /// nodes; positive decay rate; `g(t) = O(t^{|n|})` near the origin.
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::Invariant(format!("decay rate κ = {} must be positive", self.kappa)));
        }
        if self.samples.is_empty() {
            return Err(Error::Invariant("profile has no samples".into()));
        }
        let mut last = -1.0;
        for &(t, v) in &self.samples {
            if !(t > last) || !t.is_finite() {
                return Err(Error::Invariant(format!("sample nodes must be non-negative and strictly increasing (at t = {t})")));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Invariant(format!("non-finite sample at t = {t}")));
            }
            last = t;
        }
        let m = self.n.abs();
        if m > 0 {
            let scale = self.samples.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
            if let Some(&(t0, v0)) = self.samples.first() {
                if t0 == 0.0 && v0.norm() > 1e-12 * scale.max(1e-300) {
                    return Err(Error::Invariant(format!(
                        "type-{} profile must vanish at the origin (g(0) = {v0})",
                        self.n.get()
                    )));
                }
            }
            let small: Vec<_> = self.samples.iter().filter(|s| s.0 > 0.0).take(3).collect();
            if small.len() == 3 {
                let ratio = |s: &(f64, Complex64)| s.1.norm() / s.0.powi(m as i32);
                let (r1, r3) = (ratio(small[0]), ratio(small[2]));
                if r1 > 2.0 * r3 && small[0].1.norm() > 1e-10 * scale.max(1.0) {
                    return Err(Error::Invariant(format!(
                        "type-{} profile is not O(t^{m}) near the origin (|g|/t^{m} = {r1:e} at t = {:e} vs {r3:e} at t = {:e})",
                        self.n.get(),
                        small[0].0,
                        small[2].0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rejects the profile for `S^p` operations unless `κ > 2/p`.
    pub fn check_schwartz_exponent(&self, p: f64) -> Result<()> {
        if !(p > 0.0 && p <= 2.0) {
            return Err(Error::Parameter(format!("p = {p} outside (0, 2]")));
        }
        if self.kappa > 2.0 / p {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "decay rate κ = {} does not exceed 2/p = {}",
                self.kappa,
                2.0 / p
            )))
        }
    }

    /// Strip half-width on which the forward transform converges absolutely.
    pub fn epsilon(&self, requested: f64) -> f64 {
        requested.min(self.kappa - 1.0 - STRIP_MARGIN).max(0.0)
    }

    /// `g(t)`: evaluator if present, otherwise local interpolation of the
    /// samples (zero beyond the last node).
    pub fn value(&self, t: f64) -> Complex64 {
        match &self.source {
            ProfileSource::Analytic(f) => f(t),
            ProfileSource::Spectral(s) => s.value(t).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            ProfileSource::Samples => interpolate(&self.samples, t),
        }
    }

    /// Values at the given nodes, reusing stored samples where nodes coincide.
    pub fn values_at(&self, ts: &[f64]) -> Vec<Complex64> {
        if self.samples.len() == ts.len() && self.samples.iter().zip(ts).all(|(s, &t)| s.0 == t) {
            return self.samples.iter().map(|s| s.1).collect();
        }
        ts.par_iter().map(|&t| self.value(t)).collect()
    }

    /// `L^k g(t)` when it is available without differencing.
    pub fn exact_laplacian_power(&self, k: u32, t: f64) -> Option<Result<Complex64>> {
        match &self.source {
            ProfileSource::Spectral(s) => Some(s.laplacian_power(k, t)),
            _ => None,
        }
    }

    /// `c·g`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let samples = self.samples.iter().map(|&(t, v)| (t, c * v)).collect();
        let source = match &self.source {
            ProfileSource::Analytic(f) => {
                let f = f.clone();
                ProfileSource::Analytic(Arc::new(move |t| c * f(t)))
            }
            ProfileSource::Spectral(s) => ProfileSource::Spectral(Arc::new(s.scaled(c))),
            ProfileSource::Samples => ProfileSource::Samples,
        };
        Self {
            n: self.n,
            kappa: self.kappa,
            samples,
            source,
        }
    }

    /// `α f + β h` for two analytic profiles of the same type.
    pub fn linear_combination(alpha: Complex64, f: &Self, beta: Complex64, h: &Self) -> Result<Self> {
        if f.n != h.n {
            return Err(Error::Parameter("profiles of different K-types".into()));
        }
        match (&f.source, &h.source) {
            (ProfileSource::Analytic(a), ProfileSource::Analytic(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Self::from_fn(f.n, f.kappa.min(h.kappa), move |t| alpha * a(t) + beta * b(t))
            }
            _ => Err(Error::Parameter("linear combinations require closed-form profiles".into())),
        }
    }

    /// `t ↦ g(s t)`, with decay rate `s κ`.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Parameter(format!("dilation factor {s} must be positive")));
        }
        match &self.source {
            ProfileSource::Analytic(f) => {
                let f = f.clone();
                Self::from_fn(self.n, self.kappa * s, move |t| f(s * t))
            }
            _ => Err(Error::Parameter("dilation requires a closed-form profile".into())),
        }
    }
}

/// Six-point Lagrange interpolation on a sorted sample list.
fn interpolate(samples: &[(f64, Complex64)], t: f64) -> Complex64 {
    let n = samples.len();
    if n == 0 || t > samples[n - 1].0 {
        return zero();
    }
    if n == 1 {
        return samples[0].1;
    }
    let idx = samples.partition_point(|s| s.0 < t);
    let width = 6.min(n);
    let start = idx.saturating_sub(width / 2).min(n - width);
    let pts = &samples[start..start + width];
    let mut acc = zero();
    for (i, &(ti, vi)) in pts.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(tj, _)) in pts.iter().enumerate() {
            if i != j {
                w *= (t - tj) / (ti - tj);
            }
        }
        acc += vi * w;
    }
    acc
}

/// Standard test profile `g_{n,a}(t) = tanh^{|n|}(t) sech^{2a}(t)`, decay `κ = 2a`.
pub fn family_profile(n: i32, a: f64) -> Result<RadialProfile> {
    let m = n.unsigned_abs() as i32;
    RadialProfile::from_fn(KTypeIndex::new(n), 2.0 * a, move |t| {
        Complex64::new(t.tanh().powi(m) * t.cosh().powf(-2.0 * a), 0.0)
    })
}

/// Spectral data `h(λ)` of type n, sampled on a real grid (with quadrature
/// weights when the grid is a rule) plus optional strip samples.
#[derive(Clone)]
pub struct SpectralProfile {
    n: KTypeIndex,
    epsilon: f64,
    lambdas: Vec<f64>,
    weights: Option<Vec<f64>>,
    values: Vec<Complex64>,
    strip_samples: Vec<(Complex64, Complex64)>,
    evaluator: Option<Arc<dyn Fn(f64) -> Complex64 + Send + Sync>>,
}

impl std::fmt::Debug for SpectralProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralProfile")
            .field("n", &self.n)
            .field("epsilon", &self.epsilon)
            .field("points", &self.lambdas.len())
            .finish()
    }
}

impl SpectralProfile {
    /// Samples `h` on the nodes of `rule`.
    pub fn from_fn<F>(n: KTypeIndex, epsilon: f64, rule: &QuadratureRule, h: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let values = rule.nodes().iter().map(|&l| h(l)).collect();
        let p = Self {
            n,
            epsilon,
            lambdas: rule.nodes().to_vec(),
            weights: Some(rule.weights().to_vec()),
            values,
            strip_samples: Vec::new(),
            evaluator: Some(Arc::new(h)),
        };
        p.validate()?;
        Ok(p)
    }

    /// Samples on an arbitrary grid; `weights` must match when given.
    pub fn from_samples(
        n: KTypeIndex,
        epsilon: f64,
        lambdas: Vec<f64>,
        weights: Option<Vec<f64>>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let p = Self {
            n,
            epsilon,
            lambdas,
            weights,
            values,
            strip_samples: Vec::new(),
            evaluator: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.len() != self.values.len() {
            return Err(Error::Invariant("spectral grid and values differ in length".into()));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.lambdas.len() {
                return Err(Error::Invariant("spectral weights differ in length from the grid".into()));
            }
        }
        if self.values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Invariant("non-finite spectral value".into()));
        }
        let n = self.lambdas.len();
        for i in 0..n {
            let (a, b) = (self.lambdas[i], self.lambdas[n - 1 - i]);
            if (a + b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::Invariant("real spectral grid must be symmetric about 0".into()));
            }
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::Invariant("strip bound must be non-negative".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> KTypeIndex {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_grid(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.lambdas.iter().copied().zip(self.values.iter().copied())
    }

    pub fn strip_samples(&self) -> &[(Complex64, Complex64)] {
        &self.strip_samples
    }

    pub fn with_strip_samples(mut self, samples: Vec<(Complex64, Complex64)>) -> Result<Self> {
        for (l, _) in &samples {
            if l.im.abs() > self.epsilon + 1e-12 {
                return Err(Error::Invariant(format!("strip sample {l} outside |Im λ| <= {}", self.epsilon)));
            }
        }
        self.strip_samples = samples;
        Ok(self)
    }

    /// Largest `|h ν_P|` at the ends of the grid relative to its peak on the
    /// grid (evaluator at `±λ_max` if present).
    pub fn edge_magnitude(&self) -> f64 {
        let peak = self
            .real_grid()
            .map(|(l, v)| v.norm() * plancherel_density(l))
            .fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.absolute_edge() / peak
    }

    fn absolute_edge(&self) -> f64 {
        let Some(&lmax) = self.lambdas.last() else {
            return 0.0;
        };
        let lmax = lmax.abs();
        if let Some(h) = &self.evaluator {
            let edge = self.lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
            let e = edge.max(lmax);
            return (h(e).norm() * plancherel_density(e)).max(h(-e).norm() * plancherel_density(e));
        }
        let first = self.values[0].norm() * plancherel_density(self.lambdas[0]);
        let last = self.values[self.values.len() - 1].norm() * plancherel_density(lmax);
        first.max(last)
    }

    /// Fails when the data has not decayed at the grid edge.
    pub fn check_edge_decay(&self) -> Result<()> {
        let edge = self.edge_magnitude();
        if edge < SPECTRAL_EDGE_TOL {
            Ok(())
        } else {
            Err(Error::Truncation {
                cutoff: self.lambdas.last().copied().unwrap_or(0.0),
                tail: edge,
            })
        }
    }

    /// `m(λ)·h(λ)` on the same grid.
    pub fn multiplied<M: Fn(f64) -> Complex64>(&self, n: KTypeIndex, m: M) -> Self {
        let values = self.lambdas.iter().zip(&self.values).map(|(&l, &v)| m(l) * v).collect();
        Self {
            n,
            epsilon: self.epsilon,
            lambdas: self.lambdas.clone(),
            weights: self.weights.clone(),
            values,
            strip_samples: Vec::new(),
            evaluator: None,
        }
    }
}

/// Inverse-transform evaluator `t ↦ (1/ω) Σ_j w_j ν_P(λ_j) h_j Φ_{λ_j,n}(t)`.
#[derive(Debug, Clone)]
pub struct SpectralSynthesis {
    n: KTypeIndex,
    lambdas: Vec<f64>,
    coeffs: Vec<Complex64>,
    lambda_max: f64,
    table: Option<Arc<PanelTable>>,
}

/// Highest power of `L` tabulated on the radial panels of a plan.
pub const TABULATED_POWERS: u32 = 4;

/// `L^k g` on Gauss-Legendre panels, interpolated barycentrically per panel.
#[derive(Debug)]
struct PanelTable {
    width: f64,
    order: usize,
    t_max: f64,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    /// `values[k][i] = L^k g(t_i)`.
    values: Vec<Vec<Complex64>>,
}

impl PanelTable {
    fn new(nodes: &[f64], width: f64, order: usize, values: Vec<Vec<Complex64>>) -> Self {
        let mut bary = Vec::with_capacity(nodes.len());
        for panel in nodes.chunks(order) {
            for (j, &xj) in panel.iter().enumerate() {
                let mut w = 1.0;
                for (k, &xk) in panel.iter().enumerate() {
                    if k != j {
                        w *= (xj - xk) / width;
                    }
                }
                bary.push(1.0 / w);
            }
        }
        Self {
            width,
            order,
            t_max: width * (nodes.len() / order) as f64,
            nodes: nodes.to_vec(),
            bary,
            values,
        }
    }

    fn covers(&self, t: f64, k: u32) -> bool {
        t <= self.t_max && (k as usize) < self.values.len()
    }

    fn eval(&self, t: f64, kmax: u32) -> Vec<Complex64> {
        let panels = self.nodes.len() / self.order;
        let p = ((t / self.width) as usize).min(panels - 1);
        let range = p * self.order..(p + 1) * self.order;
        let mut out = vec![zero(); kmax as usize + 1];
        let mut den = 0.0;
        for i in range.clone() {
            let d = t - self.nodes[i];
            if d == 0.0 {
                return (0..=kmax as usize).map(|k| self.values[k][i]).collect();
            }
            let c = self.bary[i] / d;
            den += c;
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += self.values[k][i] * c;
            }
        }
        for slot in out.iter_mut() {
            *slot /= den;
        }
        out
    }
}

impl SpectralSynthesis {
    pub fn new(h: &SpectralProfile) -> Result<Self> {
        let Some(weights) = &h.weights else {
            return Err(Error::Parameter("inversion needs a spectral quadrature rule".into()));
        };
        h.check_edge_decay()?;
        let coeffs = h
            .lambdas
            .iter()
            .zip(weights)
            .zip(&h.values)
            .map(|((&l, &w), &v)| v * (w * plancherel_density(l) / WEYL_ORDER))
            .collect();
        let lambda_max = h.lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(1.0);
        Ok(Self {
            n: h.n,
            lambdas: h.lambdas.clone(),
            coeffs,
            lambda_max,
            table: None,
        })
    }

    fn scaled(&self, c: Complex64) -> Self {
        let table = self.table.as_ref().map(|t| {
            Arc::new(PanelTable {
                width: t.width,
                order: t.order,
                t_max: t.t_max,
                nodes: t.nodes.clone(),
                bary: t.bary.clone(),
                values: t.values.iter().map(|row| row.iter().map(|&v| v * c).collect()).collect(),
            })
        });
        Self {
            coeffs: self.coeffs.iter().map(|&v| v * c).collect(),
            table,
            ..self.clone()
        }
    }

    fn nodes(&self, t: f64) -> Result<KernelNodes> {
        KernelNodes::new(self.n, t, &[Complex64::new(self.lambda_max, 0.0)])
    }

    pub fn value(&self, t: f64) -> Result<Complex64> {
        Ok(self.powers(t, 0)?[0])
    }

    /// `L^k g(t)` through the multiplier `(-(λ²+1))^k`.
    pub fn laplacian_power(&self, k: u32, t: f64) -> Result<Complex64> {
        Ok(self.powers(t, k)?[k as usize])
    }

    /// `[g(t), L g(t), ..., L^{kmax} g(t)]`.
    pub fn powers(&self, t: f64, kmax: u32) -> Result<Vec<Complex64>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t = {t} must be non-negative")));
        }
        if let Some(table) = &self.table {
            if table.covers(t, kmax) {
                return Ok(table.eval(t, kmax));
            }
        }
        let nodes = self.nodes(t)?;
        let mut out = vec![zero(); kmax as usize + 1];
        for (&l, &c) in self.lambdas.iter().zip(&self.coeffs) {
            let mut term = nodes.eval_real(l) * c;
            let mult = -(l * l + 1.0);
            for slot in out.iter_mut() {
                *slot += term;
                term *= mult;
            }
        }
        Ok(out)
    }
}

/// Kernel tables for one K-type on fixed radial and spectral grids.
#[derive(Debug)]
pub struct TransformPlan {
    n: KTypeIndex,
    spec: GridSpec,
    t_rule: QuadratureRule,
    lambda_rule: QuadratureRule,
    nodes: Vec<KernelNodes>,
    /// `table[i][j] = Φ_{λ_j,n}(t_i)`.
    table: Vec<Vec<Complex64>>,
}

impl TransformPlan {
    pub fn new(n: KTypeIndex, spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let t_rule = spec.t_rule()?;
        let lambda_rule = spec.lambda_rule()?;
        let lm = spec.lambda_max;
        let e = spec.strip;
        let probes = [
            Complex64::new(lm, 0.0),
            Complex64::new(lm, e),
            Complex64::new(lm, -e),
            Complex64::new(0.0, e),
            Complex64::new(0.0, -e),
        ];
        let nodes = t_rule
            .nodes()
            .par_iter()
            .map(|&t| KernelNodes::new(n, t, &probes))
            .collect::<Result<Vec<_>>>()?;
        let lambdas = lambda_rule.nodes();
        let m = lambdas.len();
        let table = nodes
            .par_iter()
            .map(|k| {
                let mut row = vec![zero(); m];
                for j in (m / 2)..m {
                    row[j] = k.eval_real(lambdas[j]);
                    // Φ_{-λ} = conj Φ_λ for real λ; the rule is symmetric.
                    row[m - 1 - j] = row[j].conj();
                }
                row
            })
            .collect();
        Ok(Self {
            n,
            spec: *spec,
            t_rule,
            lambda_rule,
            nodes,
            table,
        })
    }

    pub fn n(&self) -> KTypeIndex {
        self.n
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn t_rule(&self) -> &QuadratureRule {
        &self.t_rule
    }

    pub fn lambda_rule(&self) -> &QuadratureRule {
        &self.lambda_rule
    }

    fn check_type(&self, f: &RadialProfile) -> Result<()> {
        if f.n.abs() != self.n.abs() {
            return Err(Error::Parameter(format!(
                "profile of type {} used with a plan for type {}",
                f.n.get(),
                self.n.get()
            )));
        }
        Ok(())
    }

    /// `w_i Δ(t_i) g(t_i)` on the radial nodes.
    fn weighted_values(&self, f: &RadialProfile) -> Result<Vec<Complex64>> {
        let range = (f.kappa - 1.0) * self.spec.t_max;
        if range < RADIAL_LOG_RANGE - 1e-9 {
            return Err(Error::Truncation {
                cutoff: self.spec.t_max,
                tail: (-range).exp(),
            });
        }
        let values = f.values_at(self.t_rule.nodes());
        let mut out = Vec::with_capacity(values.len());
        for ((&t, &w), v) in self.t_rule.nodes().iter().zip(self.t_rule.weights()).zip(values) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { theta: t });
            }
            out.push(v * (w * MeasureConvention::radial_weight(t)));
        }
        Ok(out)
    }

    /// `f̃(λ)` at one point of the strip `|Im λ| <= ε(f)`.
    pub fn forward(&self, f: &RadialProfile, lambda: &SpectralParameter) -> Result<Complex64> {
        self.check_type(f)?;
        check_strip(f, lambda)?;
        let l = lambda.lambda();
        let c = self.weighted_values(f)?;
        let inside = l.re.abs() <= self.spec.lambda_max && l.im.abs() <= self.spec.strip;
        let terms: Result<Vec<Complex64>> = self
            .nodes
            .par_iter()
            .zip(&c)
            .map(|(k, &ci)| {
                if inside {
                    Ok(ci * k.eval(-l))
                } else {
                    Ok(ci * KernelNodes::new(self.n, k.t(), &[-l])?.eval(-l))
                }
            })
            .collect();
        Ok(terms?.into_iter().sum())
    }

    /// `f̃` on the spectral rule of the plan.
    pub fn forward_profile(&self, f: &RadialProfile) -> Result<SpectralProfile> {
        self.check_type(f)?;
        let c = self.weighted_values(f)?;
        let m = self.lambda_rule.len();
        let values: Vec<Complex64> = (0..m)
            .into_par_iter()
            .map(|j| {
                self.table
                    .iter()
                    .zip(&c)
                    .map(|(row, &ci)| ci * row[m - 1 - j])
                    .sum()
            })
            .collect();
        SpectralProfile::from_samples(
            f.n,
            f.epsilon(self.spec.strip),
            self.lambda_rule.nodes().to_vec(),
            Some(self.lambda_rule.weights().to_vec()),
            values,
        )
    }

    /// Inverse transform at one radius.
    pub fn inverse(&self, h: &SpectralProfile, t: f64) -> Result<Complex64> {
        SpectralSynthesis::new(h)?.value(t)
    }

    /// Inverse transform at many radii.
    pub fn inverse_many(&self, h: &SpectralProfile, ts: &[f64]) -> Result<Vec<Complex64>> {
        let synth = SpectralSynthesis::new(h)?;
        ts.par_iter().map(|&t| synth.value(t)).collect()
    }

    fn on_plan_grid(&self, h: &SpectralProfile) -> bool {
        h.lambdas.len() == self.lambda_rule.len()
            && h.lambdas.iter().zip(self.lambda_rule.nodes()).all(|(a, b)| a == b)
            && h.weights.is_some()
    }

    /// Inverse transform at the radial nodes of the plan.
    pub fn inverse_on_nodes(&self, h: &SpectralProfile) -> Result<Vec<Complex64>> {
        let synth = SpectralSynthesis::new(h)?;
        if !self.on_plan_grid(h) {
            return self.inverse_many(h, self.t_rule.nodes());
        }
        Ok(self.powers_on_nodes(&synth, 0).swap_remove(0))
    }

    /// `L^k g` at the radial nodes for `k <= kmax`, from the kernel table.
    fn powers_on_nodes(&self, synth: &SpectralSynthesis, kmax: u32) -> Vec<Vec<Complex64>> {
        let mults: Vec<f64> = synth.lambdas.iter().map(|l| -(l * l + 1.0)).collect();
        let rows: Vec<Vec<Complex64>> = self
            .table
            .par_iter()
            .map(|row| {
                let mut out = vec![zero(); kmax as usize + 1];
                for ((&k, &c), &m) in row.iter().zip(&synth.coeffs).zip(&mults) {
                    let mut term = k * c;
                    for slot in out.iter_mut() {
                        *slot += term;
                        term *= m;
                    }
                }
                out
            })
            .collect();
        (0..=kmax as usize).map(|k| rows.iter().map(|r| r[k]).collect()).collect()
    }

    /// Type-n profile whose transform is `h`, evaluated through the inverse.
    pub fn synthesize(&self, h: &SpectralProfile, kappa: f64) -> Result<RadialProfile> {
        if h.n.abs() != self.n.abs() {
            return Err(Error::Parameter("spectral data of a different K-type".into()));
        }
        let mut synth = SpectralSynthesis::new(h)?;
        let values = if self.on_plan_grid(h) {
            let powers = self.powers_on_nodes(&synth, TABULATED_POWERS);
            let width = self.spec.t_max / self.spec.t_panels as f64;
            let values = powers[0].clone();
            synth.table = Some(Arc::new(PanelTable::new(self.t_rule.nodes(), width, self.spec.t_order, powers)));
            values
        } else {
            self.inverse_many(h, self.t_rule.nodes())?
        };
        let synth = Arc::new(synth);
        let samples = self.t_rule.nodes().iter().copied().zip(values).collect();
        let p = RadialProfile {
            n: synth.n,
            kappa,
            samples,
            source: ProfileSource::Spectral(synth),
        };
        p.validate()?;
        Ok(p)
    }
}

fn check_strip(f: &RadialProfile, lambda: &SpectralParameter) -> Result<()> {
    let l = lambda.lambda();
    let eps = f.epsilon(lambda.strip_bound().max(l.im.abs()));
    if l.im.abs() > eps + 1e-12 {
        return Err(Error::Domain(format!(
            "λ = {l} outside the convergence strip |Im λ| <= {eps} of the profile"
        )));
    }
    Ok(())
}

/// Plans shared by `|n|` and radial extent.
#[derive(Debug, Default)]
pub struct PlanCache {
    spec: GridSpec,
    plans: Mutex<HashMap<(u32, usize), Arc<TransformPlan>>>,
}

impl PlanCache {
    pub fn new(spec: GridSpec) -> Self {
        Self {
            spec,
            plans: Mutex::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Plan for type `n` whose radial grid suits profiles with decay rate `kappa`.
    pub fn get(&self, n: KTypeIndex, kappa: f64) -> Result<Arc<TransformPlan>> {
        let spec = self.spec.for_decay(kappa)?;
        let key = (n.abs(), spec.t_panels);
        if let Some(p) = self.plans.lock().expect("plan cache poisoned").get(&key) {
            return Ok(p.clone());
        }
        let plan = Arc::new(TransformPlan::new(KTypeIndex::new(key.0 as i32), &spec)?);
        self.plans
            .lock()
            .expect("plan cache poisoned")
            .entry(key)
            .or_insert_with(|| plan.clone());
        Ok(plan)
    }
}

/// `f̃(λ)` for a single parameter with a plan from `cache`.
pub fn delta_spherical_forward(cache: &PlanCache, f: &RadialProfile, lambda: &SpectralParameter) -> Result<Complex64> {
    check_strip(f, lambda)?;
    cache.get(f.n(), f.kappa())?.forward(f, lambda)
}

/// Inverse δ-spherical transform at `t`.
pub fn delta_spherical_inverse(h: &SpectralProfile, t: f64) -> Result<Complex64> {
    SpectralSynthesis::new(h)?.value(t)
}

/// Relative `L²(Δ dt)` distance between the round trip of `f` and `f` on `[0, t_end]`.
pub fn round_trip_error(plan: &TransformPlan, f: &RadialProfile, t_end: f64) -> Result<f64> {
    let spectral = plan.forward_profile(f)?;
    let width = plan.spec.t_max / plan.spec.t_panels as f64;
    let panels = t_end / width;
    let (nodes, weights, back) = if panels.fract() == 0.0 && t_end <= plan.spec.t_max {
        // Whole panels of the plan's own rule: reuse the kernel table.
        let count = panels as usize * plan.spec.t_order;
        let back = plan.inverse_on_nodes(&spectral)?;
        (
            plan.t_rule.nodes()[..count].to_vec(),
            plan.t_rule.weights()[..count].to_vec(),
            back[..count].to_vec(),
        )
    } else {
        let rule = composite_gauss_legendre(8, 24, 0.0, t_end)?;
        let back = plan.inverse_many(&spectral, rule.nodes())?;
        (rule.nodes().to_vec(), rule.weights().to_vec(), back)
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&t, &w), b) in nodes.iter().zip(&weights).zip(back) {
        let d = MeasureConvention::radial_weight(t) * w;
        let g = f.value(t);
        num += (b - g).norm_sqr() * d;
        den += g.norm_sqr() * d;
    }
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}

/// Both sides of the Plancherel identity and their relative defect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelResult {
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
}

fn relative_defect(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// `∫_X |f|² dx` against `(1/ω) ∫ |f̃|² ν_P dλ`.
pub fn plancherel_check(plan: &TransformPlan, f: &RadialProfile) -> Result<PlancherelResult> {
    let lhs = if f.has_evaluator() {
        // Independent radial quadrature: unit panels, adaptive.
        let mut acc = 0.0;
        let t_end = plan.spec().t_max.max(1.0).ceil() as usize;
        for k in 0..t_end {
            let a = k as f64;
            acc += integrate_adaptive(
                |t| Complex64::new(f.value(t).norm_sqr() * MeasureConvention::radial_weight(t), 0.0),
                a,
                a + 1.0,
                24,
                1e-16,
            )?
            .re;
        }
        acc
    } else {
        plan.t_rule()
            .iter()
            .map(|(t, w)| w * MeasureConvention::radial_weight(t) * f.value(t).norm_sqr())
            .sum()
    };
    let spectral = plan.forward_profile(f)?;
    let rhs = spectral_energy(&spectral)?;
    Ok(PlancherelResult {
        lhs,
        rhs,
        defect: relative_defect(lhs, rhs),
    })
}

/// `(1/ω) ∫ |h|² ν_P dλ` on the spectral rule.
pub fn spectral_energy(h: &SpectralProfile) -> Result<f64> {
    let Some(w) = h.weights() else {
        return Err(Error::Parameter("spectral energy needs quadrature weights".into()));
    };
    Ok(h
        .real_grid()
        .zip(w)
        .map(|((l, v), &wj)| wj * plancherel_density(l) * v.norm_sqr())
        .sum::<f64>()
        / WEYL_ORDER)
}

/// Spectral realization of `D^δ`: the type-`n_target` profile whose
/// transform is `Q^δ_{n_target}(λ) φ̂(λ)`.
pub fn apply_ddelta_spectral(cache: &PlanCache, phi: &RadialProfile, n_target: KTypeIndex) -> Result<RadialProfile> {
    if phi.n().get() != 0 {
        return Err(Error::Invariant(format!(
            "D^δ acts on K-invariant profiles; got type {}",
            phi.n().get()
        )));
    }
    let plan0 = cache.get(KTypeIndex::new(0), phi.kappa())?;
    let phi_hat = plan0.forward_profile(phi)?;
    let h = phi_hat.multiplied(n_target, |l| q_delta(n_target, Complex64::new(l, 0.0)));
    cache.get(n_target, phi.kappa())?.synthesize(&h, phi.kappa())
}

/// Samples of a function on `X` on a product grid: radial rule × `M`
/// equispaced angles `ψ_m = 2π m / M`.
#[derive(Debug, Clone)]
pub struct PolarSamples {
    t_rule: QuadratureRule,
    psi_count: usize,
    kappa: f64,
    /// `values[i][m] = f(t_i, ψ_m)`.
    values: Vec<Vec<Complex64>>,
}

impl PolarSamples {
    pub fn from_fn<F>(t_rule: &QuadratureRule, psi_count: usize, kappa: f64, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        if psi_count < 4 {
            return Err(Error::Parameter("at least 4 angular samples are required".into()));
        }
        let values = t_rule
            .nodes()
            .par_iter()
            .map(|&t| {
                (0..psi_count)
                    .map(|m| f(t, TAU * m as f64 / psi_count as f64))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        for (row, &t) in values.iter().zip(t_rule.nodes()) {
            if row.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::NonFinite { theta: t });
            }
        }
        Ok(Self {
            t_rule: t_rule.clone(),
            psi_count,
            kappa,
            values,
        })
    }

    pub fn t_rule(&self) -> &QuadratureRule {
        &self.t_rule
    }

    pub fn psi_count(&self) -> usize {
        self.psi_count
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    /// `∫_X |f|² dx`.
    pub fn energy(&self) -> f64 {
        self.t_rule
            .iter()
            .zip(&self.values)
            .map(|((t, w), row)| {
                w * MeasureConvention::radial_weight(t) * row.iter().map(|v| v.norm_sqr()).sum::<f64>()
                    / self.psi_count as f64
            })
            .sum()
    }
}

/// Discrete Fourier coefficients `c_k = (1/M) Σ_m v_m e^{-ikψ_m}` for the
/// trigonometric interpolant; the Nyquist mode of even `M` is split evenly
/// between `±M/2`. Returned as `(k, c_k)`.
fn trig_coefficients(row: &[Complex64]) -> Vec<(i32, Complex64)> {
    let m = row.len();
    let half = (m / 2) as i32;
    let mut out = Vec::with_capacity(m + 1);
    for k in -half..=half {
        if m % 2 == 1 || k.abs() < half {
            out.push((k, dft(row, k)));
        } else {
            out.push((k, dft(row, k) * 0.5));
        }
    }
    out
}

fn dft(row: &[Complex64], k: i32) -> Complex64 {
    let m = row.len() as f64;
    row.iter()
        .enumerate()
        .map(|(j, &v)| v * Complex64::from_polar(1.0, -(k as f64) * TAU * j as f64 / m))
        .sum::<Complex64>()
        / m
}

fn check_alias(n: KTypeIndex, m: usize) -> Result<()> {
    if 2 * n.abs() as usize >= m {
        return Err(Error::Parameter(format!(
            "K-type {} aliases on a grid of {m} angles (need |n| < {})",
            n.get(),
            m / 2
        )));
    }
    Ok(())
}

/// Spatial δ-projection `f^δ(t) = (1/2π) ∫ f(t, ψ) e^{-inψ} dψ`.
pub fn delta_project_spatial(f: &PolarSamples, n: KTypeIndex) -> Result<RadialProfile> {
    check_alias(n, f.psi_count)?;
    let samples = f
        .t_rule
        .nodes()
        .iter()
        .zip(&f.values)
        .map(|(&t, row)| (t, dft(row, n.get())))
        .collect();
    RadialProfile::from_samples(n, f.kappa, samples)
}

/// Samples `F(λ_j, θ_m)` of a function on `R × boundary`, `θ_m = 2π m / M`.
#[derive(Debug, Clone)]
pub struct BoundaryFunction2D {
    lambdas: Vec<f64>,
    weights: Option<Vec<f64>>,
    theta_count: usize,
    epsilon: f64,
    /// `values[j][m] = F(λ_j, θ_m)`.
    values: Vec<Vec<Complex64>>,
}

impl BoundaryFunction2D {
    pub fn new(lambdas: Vec<f64>, weights: Option<Vec<f64>>, epsilon: f64, values: Vec<Vec<Complex64>>) -> Result<Self> {
        let theta_count = values.first().map_or(0, |r| r.len());
        if theta_count < 4 || values.len() != lambdas.len() || values.iter().any(|r| r.len() != theta_count) {
            return Err(Error::Invariant("boundary function grid is inconsistent".into()));
        }
        if values.iter().flatten().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Invariant("non-finite boundary function sample".into()));
        }
        Ok(Self {
            lambdas,
            weights,
            theta_count,
            epsilon,
            values,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn theta_count(&self) -> usize {
        self.theta_count
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    /// `(1/ω) ∫ ∮ |F|² dθ/2π ν_P dλ`.
    pub fn energy(&self) -> Result<f64> {
        let Some(w) = &self.weights else {
            return Err(Error::Parameter("energy needs spectral quadrature weights".into()));
        };
        Ok(self
            .lambdas
            .iter()
            .zip(w)
            .zip(&self.values)
            .map(|((&l, &wj), row)| {
                wj * plancherel_density(l) * row.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.theta_count as f64
            })
            .sum::<f64>()
            / WEYL_ORDER)
    }
}

/// Spectral δ-projection: the `n`-th Fourier coefficient of `F` in `θ`.
pub fn delta_project_spectral(f: &BoundaryFunction2D, n: KTypeIndex) -> Result<SpectralProfile> {
    check_alias(n, f.theta_count)?;
    let values = f.values.iter().map(|row| dft(row, n.get())).collect();
    SpectralProfile::from_samples(n, f.epsilon, f.lambdas.clone(), f.weights.clone(), values)
}

/// `𝓕f(λ, e^{iθ})` at several boundary angles, by direct quadrature of
/// `∫ f(z) P(z, b)^{(1-iλ)/2} dx` on the polar grid. The angular integral
/// at each radius follows the peak of the Poisson kernel, with `f`
/// interpolated trigonometrically in `ψ`.
pub fn hft_forward_many(f: &PolarSamples, lambda: &SpectralParameter, thetas: &[f64]) -> Result<Vec<Complex64>> {
    let l = lambda.lambda();
    let eps = (f.kappa - 1.0 - STRIP_MARGIN).max(0.0);
    if l.im.abs() > eps + 1e-12 {
        return Err(Error::Domain(format!("λ = {l} outside the convergence strip |Im λ| <= {eps}")));
    }
    let probe_type = KTypeIndex::new((f.psi_count / 2) as i32);
    let s = (Complex64::new(1.0, 0.0) - Complex64::i() * l) * 0.5;
    let rows: Result<Vec<Vec<Complex64>>> = f
        .t_rule
        .nodes()
        .par_iter()
        .zip(f.t_rule.weights())
        .zip(&f.values)
        .map(|((&t, &w), row)| {
            let coeffs = trig_coefficients(row);
            let interp = |psi: f64| -> Complex64 {
                coeffs
                    .iter()
                    .map(|&(k, c)| c * Complex64::from_polar(1.0, k as f64 * psi))
                    .sum()
            };
            let nodes = KernelNodes::new(probe_type, t, &[-l])?;
            let dens = w * MeasureConvention::radial_weight(t);
            let out = thetas
                .iter()
                .map(|&theta| {
                    let mut acc = zero();
                    for (lp, a, b) in nodes.angular_nodes() {
                        let pair = (interp(theta + a) + interp(theta - a)) * 0.5;
                        acc += pair * (s * lp).exp() * b;
                    }
                    acc * dens
                })
                .collect();
            Ok(out)
        })
        .collect();
    let rows = rows?;
    Ok((0..thetas.len()).map(|k| rows.iter().map(|r| r[k]).sum()).collect())
}

/// `𝓕f(λ, b)` at one boundary point.
pub fn hft_forward(f: &PolarSamples, lambda: &SpectralParameter, b: &crate::disk::BoundaryPoint) -> Result<Complex64> {
    Ok(hft_forward_many(f, lambda, &[b.theta()])?[0])
}

/// `𝓕f` on the spectral rule of `cache` × `theta_count` boundary angles,
/// assembled from the K-type components `e^{ikθ} (f^{δ_k})~(λ)`.
pub fn hft_forward_grid(cache: &PlanCache, f: &PolarSamples, theta_count: usize) -> Result<BoundaryFunction2D> {
    let m = f.psi_count;
    let half = (m.min(theta_count) as i32 - 1) / 2;
    let rule = cache.spec().lambda_rule()?;
    let mut values = vec![vec![zero(); theta_count]; rule.len()];
    let scale = f.values.iter().flatten().fold(0.0f64, |m, v| m.max(v.norm()));
    for k in -half..=half {
        let kt = KTypeIndex::new(k);
        let comp = delta_project_spatial(f, kt)?;
        if comp.samples().iter().all(|s| s.1.norm() <= 1e-15 * scale) {
            // Absent K-type: its transform vanishes to rounding.
            continue;
        }
        let spec = cache.get(kt, f.kappa)?.forward_profile(&comp)?;
        for (row, &v) in values.iter_mut().zip(spec.values()) {
            for (mm, slot) in row.iter_mut().enumerate() {
                let theta = TAU * mm as f64 / theta_count as f64;
                *slot += v * Complex64::from_polar(1.0, k as f64 * theta);
            }
        }
    }
    let eps = (f.kappa - 1.0 - STRIP_MARGIN).max(0.0).min(cache.spec().strip);
    BoundaryFunction2D::new(rule.nodes().to_vec(), Some(rule.weights().to_vec()), eps, values)
}

/// Inverse Helgason Fourier transform at `z`:
/// `(1/ω) ∫ ∮ F(λ, θ) P(z, e^{iθ})^{(1+iλ)/2} dθ/2π ν_P(λ) dλ`.
pub fn hft_inverse(f: &BoundaryFunction2D, z: &crate::disk::DiskPoint) -> Result<Complex64> {
    let Some(weights) = &f.weights else {
        return Err(Error::Parameter("inversion needs spectral quadrature weights".into()));
    };
    let lmax = f.lambdas.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let row_mag = |(&l, row): (&f64, &Vec<Complex64>)| row.iter().fold(0.0f64, |m, v| m.max(v.norm())) * plancherel_density(l);
    let peak = f.lambdas.iter().zip(&f.values).map(row_mag).fold(0.0, f64::max);
    let edge = f
        .lambdas
        .iter()
        .zip(&f.values)
        .filter(|(l, _)| l.abs() >= lmax - 1e-12)
        .map(row_mag)
        .fold(0.0, f64::max);
    if peak > 0.0 && edge >= SPECTRAL_EDGE_TOL * peak {
        return Err(Error::Truncation {
            cutoff: f.lambdas.last().copied().unwrap_or(0.0),
            tail: edge,
        });
    }
    let t = z.t();
    let psi = z.psi();
    let coeffs: Vec<Vec<(i32, Complex64)>> = f.values.iter().map(|r| trig_coefficients(r)).collect();
    if t == 0.0 {
        // Only the mean over the boundary survives at the origin.
        let acc: Complex64 = f
            .lambdas
            .iter()
            .zip(weights)
            .zip(&coeffs)
            .map(|((&l, &w), c)| {
                let mean = c.iter().find(|(k, _)| *k == 0).map_or(zero(), |p| p.1);
                mean * (w * plancherel_density(l))
            })
            .sum();
        return Ok(acc / WEYL_ORDER);
    }
    let lmax = f.lambdas.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let probe_type = KTypeIndex::new((f.theta_count / 2) as i32);
    let nodes = KernelNodes::new(probe_type, t, &[Complex64::new(lmax, 0.0)])?;
    let angular: Vec<(f64, f64, f64)> = nodes.angular_nodes().collect();
    let acc: Complex64 = f
        .lambdas
        .par_iter()
        .zip(weights)
        .zip(&coeffs)
        .map(|((&l, &w), c)| {
            let s = Complex64::new(0.5, 0.5 * l);
            let mut total = zero();
            for &(lp, a, b) in &angular {
                let mut pair = zero();
                for &(k, ck) in c {
                    let kf = k as f64;
                    pair += ck * Complex64::from_polar(1.0, kf * psi) * (kf * a).cos();
                }
                total += pair * (s * lp).exp() * b;
            }
            total * (w * plancherel_density(l))
        })
        .sum();
    Ok(acc / WEYL_ORDER)
}

/// `f̃` through horocyclic coordinates: `f̃(λ) = ∫ B(s) e^{-iλs} ds` with
/// `B(s) = e^{-s} (1/π) ∫ f dξ` the horocycle integral at height `s`
/// toward the boundary point `1`. Independent of the Eisenstein kernels, and
/// cheap once `B` is tabulated, which makes it suited to dense sampling of
/// the strip.
#[derive(Debug, Clone)]
pub struct HorocyclicTransform {
    n: KTypeIndex,
    strip_bound: f64,
    nodes: Vec<f64>,
    /// `w_j B(s_j)`.
    weighted: Vec<f64>,
}

const ABEL_LOG_RANGE: f64 = 42.0;
const ABEL_MAX_S: f64 = 400.0;

impl HorocyclicTransform {
    /// Tabulates `B` for a profile with a closed-form evaluator, accurate for
    /// `|Im λ| <= strip` (which must leave a positive decay margin).
    pub fn new(f: &RadialProfile, strip: f64) -> Result<Self> {
        let ProfileSource::Analytic(g) = f.source() else {
            return Err(Error::Parameter("horocyclic transform requires a closed-form profile".into()));
        };
        let limit = f.kappa() - 1.0 - STRIP_MARGIN;
        if !(strip >= 0.0) || strip > limit + 1e-12 {
            return Err(Error::Domain(format!(
                "strip {strip} exceeds the decay-limited width {limit}"
            )));
        }
        let rate = f.kappa() - 1.0 - strip;
        let s_max = (ABEL_LOG_RANGE / rate).min(ABEL_MAX_S);
        let x_max = (ABEL_LOG_RANGE / (f.kappa() - 1.0)).min(60.0);
        let n = f.n();
        let g = g.clone();
        let x_rule = composite_gauss_legendre(x_max.ceil() as usize, 24, 0.0, x_max)?;
        let row = move |s: f64| -> f64 {
            let mut acc = 0.0;
            for (x, w) in x_rule.iter() {
                let hp = HorocyclicPoint { s, x };
                let z = hp.to_disk();
                acc += w * g(z.t()).re * (n.get() as f64 * z.psi()).cos() * x.cosh();
            }
            acc * 2.0 / PI * (2.0 * (2.0 * s).cosh()).sqrt()
        };
        Self::tabulate(n, strip, -s_max, s_max, 1.0, row, f)
    }

    /// Tabulates `B` for a profile supported in `t <= radius`, resolving the
    /// support edge adaptively. Valid on the whole complex plane.
    pub fn compact(f: &RadialProfile, radius: f64) -> Result<Self> {
        let ProfileSource::Analytic(g) = f.source() else {
            return Err(Error::Parameter("horocyclic transform requires a closed-form profile".into()));
        };
        let n = f.n();
        let g = g.clone();
        let row = move |s: f64| -> f64 {
            let Some(xe) = HorocyclicPoint::x_extent(s, radius) else {
                return 0.0;
            };
            if xe == 0.0 {
                return 0.0;
            }
            let integrand = |x: f64| {
                let z = HorocyclicPoint { s, x }.to_disk();
                Complex64::new(g(z.t()).re * (n.get() as f64 * z.psi()).cos() * x.cosh(), 0.0)
            };
            // Near the support edge rounding in t(x) is amplified by the steep
            // profile to ~1e-12 relative, so the tolerance follows the row's magnitude.
            let coarse = gauss_legendre(24, 0.0, xe)
                .map(|r| r.iter().map(|(x, w)| w * integrand(x).norm()).sum::<f64>())
                .unwrap_or(f64::NAN);
            let tol = 1e-11 * coarse + 1e-30;
            let v = integrate_adaptive(integrand, 0.0, xe, 24, tol)
                .map(|v| v.re)
                .unwrap_or(f64::NAN);
            v * 2.0 / PI * (2.0 * (2.0 * s).cosh()).sqrt()
        };
        Self::tabulate(n, f64::INFINITY, -radius, radius, radius / 64.0, row, f)
    }

    fn tabulate<R: Fn(f64) -> f64 + Sync>(
        n: KTypeIndex,
        strip: f64,
        a: f64,
        b: f64,
        panel: f64,
        row: R,
        f: &RadialProfile,
    ) -> Result<Self> {
        if f.source().is_sample_only() {
            return Err(Error::Parameter("horocyclic transform requires an evaluator".into()));
        }
        let panels = ((b - a) / panel).ceil().max(1.0) as usize;
        let rule = composite_gauss_legendre(panels, 32, a, b)?;
        let values: Vec<f64> = rule.nodes().par_iter().map(|&s| row(s)).collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { theta: rule.nodes()[i] });
        }
        let weighted = values.iter().zip(rule.weights()).map(|(v, w)| v * w).collect();
        Ok(Self {
            n,
            strip_bound: strip,
            nodes: rule.nodes().to_vec(),
            weighted,
        })
    }

    pub fn n(&self) -> KTypeIndex {
        self.n
    }

    pub fn strip_bound(&self) -> f64 {
        self.strip_bound
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        if lambda.im.abs() > self.strip_bound + 1e-12 {
            return Err(Error::Domain(format!(
                "λ = {lambda} outside the validated strip |Im λ| <= {}",
                self.strip_bound
            )));
        }
        let mi = -Complex64::i() * lambda;
        Ok(self
            .nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&s, &w)| (mi * s).exp() * w)
            .sum())
    }
}

impl ProfileSource {
    fn is_sample_only(&self) -> bool {
        matches!(self, ProfileSource::Samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{BoundaryPoint, DiskPoint};
    use crate::kernels::eisenstein_adjoint;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_spec() -> GridSpec {
        GridSpec::default()
    }

    fn shared() -> &'static PlanCache {
        static CACHE: std::sync::OnceLock<PlanCache> = std::sync::OnceLock::new();
        CACHE.get_or_init(|| PlanCache::new(GridSpec::default()))
    }

    #[test]
    fn family_profiles_validate() {
        for n in 0..=3 {
            for a in [2.0, 3.0] {
                let p = family_profile(n, a).unwrap();
                assert_eq!(p.kappa(), 2.0 * a);
                assert!(p.check_schwartz_exponent(1.0).is_ok());
            }
        }
        let slow = family_profile(0, 0.25).unwrap();
        assert!(slow.check_schwartz_exponent(2.0).is_err());
    }

    #[test]
    fn near_origin_invariant_detects_bad_profiles() {
        let bad = RadialProfile::from_fn(KTypeIndex::new(2), 4.0, |t| c(t.tanh() / t.cosh().powi(4), 0.0));
        assert!(matches!(bad, Err(Error::Invariant(_))));
        let bad0 = RadialProfile::from_samples(KTypeIndex::new(1), 4.0, vec![(0.0, c(1.0, 0.0)), (0.1, c(0.1, 0.0))]);
        assert!(bad0.is_err());
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let samples: Vec<_> = (0..20).map(|i| (0.1 * i as f64, c((0.1 * i as f64).powi(3), 0.0))).collect();
        let v = interpolate(&samples, 0.733);
        assert!((v.re - 0.733f64.powi(3)).abs() < 1e-13);
        assert_eq!(interpolate(&samples, 5.0), zero());
    }

    #[test]
    fn zero_profile_transforms_to_zero() {
        let cache = shared();
        let z = RadialProfile::from_fn(KTypeIndex::new(0), 4.0, |_| zero()).unwrap();
        let l = SpectralParameter::new(c(1.3, 0.4), 1.0).unwrap();
        assert_eq!(delta_spherical_forward(cache, &z, &l).unwrap(), zero());
        let h = SpectralProfile::from_fn(KTypeIndex::new(0), 0.0, &small_spec().lambda_rule().unwrap(), |_| zero()).unwrap();
        assert_eq!(delta_spherical_inverse(&h, 1.0).unwrap(), zero());
    }

    #[test]
    fn forward_matches_pointwise_kernel_quadrature() {
        let cache = shared();
        let f = family_profile(1, 2.0).unwrap();
        let plan = cache.get(f.n(), f.kappa()).unwrap();
        for l in [c(0.0, 0.0), c(2.5, 0.0), c(-7.0, 0.0), c(1.0, 0.7)] {
            let lam = SpectralParameter::new(l, 1.0).unwrap();
            let got = plan.forward(&f, &lam).unwrap();
            let oracle: Complex64 = plan
                .t_rule()
                .iter()
                .map(|(t, w)| f.value(t) * eisenstein_adjoint(&lam, f.n(), t).unwrap() * (w * MeasureConvention::radial_weight(t)))
                .sum();
            assert!((got - oracle).norm() < 1e-12 * oracle.norm().max(1e-6), "λ={l}: {got} vs {oracle}");
        }
        let grid = plan.forward_profile(&f).unwrap();
        for (l, v) in grid.real_grid().step_by(37) {
            let direct = plan.forward(&f, &SpectralParameter::real(l).unwrap()).unwrap();
            assert!((v - direct).norm() < 1e-13 * direct.norm().max(1e-3), "λ={l}: {v} vs {direct}");
        }
    }

    #[test]
    fn strip_violation_is_rejected() {
        let cache = shared();
        let f = family_profile(0, 0.7).unwrap();
        let lam = SpectralParameter::new(c(0.0, 0.5), 1.0).unwrap();
        assert!(matches!(delta_spherical_forward(cache, &f, &lam), Err(Error::Domain(_))));
    }

    #[test]
    fn spherical_transform_matches_two_dimensional_integral() {
        use crate::disk::{integrate_x, Chart};
        use crate::kernels::phi_lambda;
        use crate::quadrature::TailPolicy;
        let cache = shared();
        let f = family_profile(0, 2.0).unwrap();
        let l = 1.7;
        let lam = SpectralParameter::real(l).unwrap();
        let got = delta_spherical_forward(cache, &f, &lam).unwrap();
        let neg = SpectralParameter::real(-l).unwrap();
        let policy = TailPolicy::new(1e-12, 14.0, 2.0).unwrap();
        let oracle = integrate_x(|z| f.value(z.t()) * phi_lambda(&neg, z.t()).unwrap(), Chart::Polar, &policy).unwrap();
        assert!((got - oracle).norm() < 1e-8 * oracle.norm(), "{got} vs {oracle}");
    }

    #[test]
    fn horocyclic_route_matches_kernel_route() {
        let cache = shared();
        for n in 0..=3 {
            let f = family_profile(n, 2.0).unwrap();
            let abel = HorocyclicTransform::new(&f, 1.3).unwrap();
            let plan = cache.get(f.n(), f.kappa()).unwrap();
            for l in [c(0.0, 0.0), c(1.5, 0.0), c(-4.0, 0.5), c(2.0, -1.0)] {
                let direct = plan.forward(&f, &SpectralParameter::new(l, 1.0).unwrap()).unwrap();
                let horo = abel.eval(l).unwrap();
                assert!((direct - horo).norm() < 1e-9 * direct.norm().max(1e-3), "n={n} λ={l}: {direct} vs {horo}");
            }
        }
    }

    #[test]
    fn round_trip_on_family_member() {
        let cache = shared();
        let f = family_profile(2, 2.0).unwrap();
        let plan = cache.get(f.n(), f.kappa()).unwrap();
        let err = round_trip_error(&plan, &f, 4.0).unwrap();
        assert!(err < 1e-6, "round trip error {err}");
    }

    #[test]
    fn plancherel_and_homogeneity() {
        let cache = shared();
        let f = family_profile(0, 2.0).unwrap();
        let plan = cache.get(f.n(), f.kappa()).unwrap();
        let r = plancherel_check(&plan, &f).unwrap();
        assert!(r.defect < 1e-6, "{r:?}");
        let scaled = plancherel_check(&plan, &f.scaled(c(3.0, 0.0))).unwrap();
        assert!((scaled.lhs / r.lhs - 9.0).abs() < 1e-10);
        assert!((scaled.rhs / r.rhs - 9.0).abs() < 1e-10);
        assert!((scaled.defect - r.defect).abs() < 1e-9);
        let z = plancherel_check(&plan, &f.scaled(zero())).unwrap();
        assert_eq!((z.lhs, z.rhs, z.defect), (0.0, 0.0, 0.0));
    }

    #[test]
    fn linearity_of_forward_transform() {
        let cache = shared();
        let f = family_profile(1, 2.0).unwrap();
        let h = family_profile(1, 3.0).unwrap();
        let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
        let comb = RadialProfile::linear_combination(a, &f, b, &h).unwrap();
        let plan = cache.get(f.n(), f.kappa()).unwrap();
        let (ff, hh, cc) = (
            plan.forward_profile(&f).unwrap(),
            plan.forward_profile(&h).unwrap(),
            plan.forward_profile(&comb).unwrap(),
        );
        for j in 0..cc.values().len() {
            let expect = a * ff.values()[j] + b * hh.values()[j];
            assert!((cc.values()[j] - expect).norm() < 1e-12 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn inverse_of_gaussian_data_decays() {
        for n in 0..=2 {
            let k = KTypeIndex::new(n);
            let rule = small_spec().lambda_rule().unwrap();
            let h = SpectralProfile::from_fn(k, 1.0, &rule, move |l| q_delta(k, c(l, 0.0)) * (-l * l).exp()).unwrap();
            let synth = SpectralSynthesis::new(&h).unwrap();
            let mut t_star = None;
            for i in 4..=60 {
                let t = 0.25 * i as f64;
                let v = synth.value(t).unwrap().norm();
                if v < 1e-10 && t_star.is_none() {
                    t_star = Some(t);
                }
                if let Some(ts) = t_star {
                    assert!(v < 1e-10 || t < ts, "n={n}: |g({t})| = {v:e} after t* = {ts}");
                }
            }
            assert!(t_star.is_some());
        }
    }

    #[test]
    fn insufficient_spectral_decay_is_a_truncation_error() {
        let rule = small_spec().lambda_rule().unwrap();
        let h = SpectralProfile::from_fn(KTypeIndex::new(0), 0.0, &rule, |l| c(1.0 / (1.0 + l * l), 0.0)).unwrap();
        assert!(matches!(delta_spherical_inverse(&h, 1.0), Err(Error::Truncation { .. })));
    }

    fn mixed_function() -> impl Fn(f64, f64) -> Complex64 + Sync {
        |t: f64, psi: f64| {
            let s = 1.0 / t.cosh().powi(4);
            let th = t.tanh();
            c(s, 0.0) + Complex64::from_polar(0.5 * th * s, psi) + Complex64::from_polar(0.25 * th * th * s, -2.0 * psi)
        }
    }

    #[test]
    fn spatial_projection_properties() {
        let rule = small_spec().t_rule().unwrap();
        let f = PolarSamples::from_fn(&rule, 16, 4.0, mixed_function()).unwrap();
        let comps: Vec<_> = [0, 1, -2].iter().map(|&n| delta_project_spatial(&f, KTypeIndex::new(n)).unwrap()).collect();
        for (i, row) in f.values().iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                let psi = TAU * m as f64 / 16.0;
                let re: Complex64 = comps
                    .iter()
                    .map(|p| p.samples()[i].1 * Complex64::from_polar(1.0, p.n().get() as f64 * psi))
                    .sum();
                assert!((re - v).norm() < 1e-12);
            }
        }
        let pure = delta_project_spatial(&f, KTypeIndex::new(3)).unwrap();
        assert!(pure.samples().iter().all(|s| s.1.norm() < 1e-14));
        assert!(delta_project_spatial(&f, KTypeIndex::new(8)).is_err());
        // Idempotence: a pure type-1 function projects onto itself.
        let one = PolarSamples::from_fn(&rule, 16, 4.0, |t, psi| Complex64::from_polar(t.tanh() / t.cosh().powi(4), psi)).unwrap();
        let p = delta_project_spatial(&one, KTypeIndex::new(1)).unwrap();
        for (s, row) in p.samples().iter().zip(one.values()) {
            assert!((s.1 - row[0]).norm() < 1e-14);
        }
    }

    #[test]
    fn spectral_projection_properties() {
        let lambdas = vec![-1.0, 0.0, 1.0];
        let flat = BoundaryFunction2D::new(lambdas.clone(), None, 0.0, vec![vec![c(2.0, 0.0); 8]; 3]).unwrap();
        let p = delta_project_spectral(&flat, KTypeIndex::new(2)).unwrap();
        assert!(p.values().iter().all(|v| v.norm() < 1e-15));
        let mode = BoundaryFunction2D::new(
            lambdas.clone(),
            None,
            0.0,
            lambdas
                .iter()
                .map(|&l| (0..8).map(|m| Complex64::from_polar(l + 3.0, 2.0 * TAU * m as f64 / 8.0)).collect())
                .collect(),
        )
        .unwrap();
        let p = delta_project_spectral(&mode, KTypeIndex::new(2)).unwrap();
        for (l, v) in p.real_grid() {
            assert!((v - c(l + 3.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn hft_of_typed_function_rotates_by_character() {
        let cache = shared();
        let rule = small_spec().t_rule().unwrap();
        let g = |t: f64| t.tanh() / t.cosh().powi(4);
        let f = PolarSamples::from_fn(&rule, 8, 4.0, move |t, psi| Complex64::from_polar(g(t), psi)).unwrap();
        let prof = family_profile(1, 2.0).unwrap();
        let lam = SpectralParameter::real(1.1).unwrap();
        let ft = delta_spherical_forward(cache, &prof, &lam).unwrap();
        let thetas = [0.0, 0.9, 2.0, 4.4];
        let vals = hft_forward_many(&f, &lam, &thetas).unwrap();
        for (&th, v) in thetas.iter().zip(vals) {
            let expect = Complex64::from_polar(1.0, th) * ft;
            assert!((v - expect).norm() < 1e-9 * ft.norm(), "θ={th}: {v} vs {expect}");
        }
        // Radial functions give b-independent transforms.
        let radial = PolarSamples::from_fn(&rule, 8, 4.0, |t, _| c(1.0 / t.cosh().powi(4), 0.0)).unwrap();
        let vals = hft_forward_many(&radial, &lam, &thetas).unwrap();
        for v in &vals {
            assert!((v - vals[0]).norm() < 1e-10 * vals[0].norm());
        }
        let zero_f = PolarSamples::from_fn(&rule, 8, 4.0, |_, _| zero()).unwrap();
        assert_eq!(hft_forward(&zero_f, &lam, &BoundaryPoint::new(1.0).unwrap()).unwrap(), zero());
    }

    #[test]
    fn hft_inverse_matches_radial_inverse() {
        let cache = shared();
        let prof = family_profile(1, 2.0).unwrap();
        let plan = cache.get(prof.n(), prof.kappa()).unwrap();
        let spec = plan.forward_profile(&prof).unwrap();
        let values = spec
            .values()
            .iter()
            .map(|&v| (0..8).map(|m| v * Complex64::from_polar(1.0, TAU * m as f64 / 8.0)).collect())
            .collect();
        let big = BoundaryFunction2D::new(spec.lambdas().to_vec(), spec.weights().map(|w| w.to_vec()), 1.0, values).unwrap();
        for t in [0.3, 1.0, 2.5] {
            let a = hft_inverse(&big, &DiskPoint::new(t, 0.0).unwrap()).unwrap();
            let b = plan.inverse(&spec, t).unwrap();
            assert!((a - b).norm() < 1e-9 * b.norm().max(1e-6), "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn ddelta_identity_and_first_order() {
        let cache = shared();
        let rule = small_spec().lambda_rule().unwrap();
        let k0 = KTypeIndex::new(0);
        let gauss = SpectralProfile::from_fn(k0, 1.0, &rule, |l| c((-l * l).exp(), 0.0)).unwrap();
        let phi = cache.get(k0, 4.0).unwrap().synthesize(&gauss, 4.0).unwrap();
        let same = apply_ddelta_spectral(cache, &phi, k0).unwrap();
        for (a, b) in same.samples().iter().zip(phi.samples()) {
            assert!((a.1 - b.1).norm() < 1e-12);
        }
        let k1 = KTypeIndex::new(1);
        let out = apply_ddelta_spectral(cache, &phi, k1).unwrap();
        let back = cache.get(k1, 4.0).unwrap().forward_profile(&out).unwrap();
        for (l, v) in back.real_grid().filter(|(l, _)| l.abs() < 5.0) {
            let expect = c(0.5, -0.5 * l) * (-l * l).exp();
            assert!((v - expect).norm() < 1e-7, "λ={l}: {v} vs {expect}");
        }
        let first = out.samples().iter().take(3).map(|s| s.1.norm() / s.0).collect::<Vec<_>>();
        assert!(first[0] <= 2.0 * first[2]);
    }

    #[test]
    fn tabulated_synthesis_matches_direct_sums() {
        let cache = shared();
        let k = KTypeIndex::new(2);
        let rule = small_spec().lambda_rule().unwrap();
        let h = SpectralProfile::from_fn(k, 1.0, &rule, move |l| q_delta(k, c(l, 0.0)) * (-l * l / 2.0).exp()).unwrap();
        let prof = cache.get(k, 4.0).unwrap().synthesize(&h, 4.0).unwrap();
        let direct = SpectralSynthesis::new(&h).unwrap();
        for t in [0.013, 0.77, 3.3, 9.9] {
            let ProfileSource::Spectral(s) = prof.source() else { panic!() };
            let a = s.powers(t, 2).unwrap();
            let b = direct.powers(t, 2).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-11 * (1.0 + y.norm()), "t={t}: {x} vs {y}");
            }
        }
    }
}
