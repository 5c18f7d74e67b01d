//! Spherical functions, Eisenstein integrals, the polynomial `Q_n` and the
//! Plancherel density.
//!
//! For a radial point `z_t = (t, 0)` the Eisenstein integral is
//!
//! ```text
//! Φ_{λ,n}(t) = (1/2π) ∫ P(z_t, e^{iθ})^{s} e^{inθ} dθ,   s = (1 + iλ)/2.
//! ```
//!
//! The production evaluator substitutes `θ = 2 arctan(e^{u-t})`, which gives
//! `P = cosh(u-t)/cosh(u+t)`, `dθ = sech(u-t) du` and
//!
//! ```text
//! Φ_{λ,n}(t) = (1/π) ∫_R P(u)^{s} cos(n α(u)) sech(u-t) du,   α = 2 arctan(e^{u-t}).
//! ```
//!
//! The new integrand is analytic in `|Im u| < π/2` and decays like `e^{-|u|}`,
//! so the trapezoid rule on the line converges geometrically for every `t`,
//! including large `t` where the Poisson kernel is sharply peaked in `θ`.
//! The equispaced circle average is kept as an independent oracle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::disk::{ln_cosh, log_poisson_kernel, BoundaryPoint, DiskPoint};
use crate::error::{Error, Result};
use crate::quadrature::circle_average_adaptive;
use crate::specfun::{gamma_complex, hyp2f1, pochhammer, HypergeometricArgs, HYP2F1_MAX_X};

/// Slack allowed on the strip constraint.
pub const STRIP_SLACK: f64 = 1e-12;

/// A spectral parameter in the closed strip `|Im λ| <= ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    lambda: Complex64,
    strip_bound: f64,
}

impl SpectralParameter {
    pub fn new(lambda: Complex64, strip_bound: f64) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite spectral parameter {lambda}")));
        }
        if !(strip_bound >= 0.0) {
            return Err(Error::Parameter(format!("strip bound {strip_bound} must be non-negative")));
        }
        if lambda.im.abs() > strip_bound + STRIP_SLACK {
            return Err(Error::Domain(format!(
                "λ = {lambda} outside the strip |Im λ| <= {strip_bound}"
            )));
        }
        Ok(Self { lambda, strip_bound })
    }

    /// A parameter whose strip is exactly wide enough to contain it.
    pub fn unrestricted(lambda: Complex64) -> Result<Self> {
        Self::new(lambda, lambda.im.abs())
    }

    pub fn real(lambda: f64) -> Result<Self> {
        Self::new(Complex64::new(lambda, 0.0), 0.0)
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn strip_bound(&self) -> f64 {
        self.strip_bound
    }

    /// Exponent `s = (1 + iλ)/2` of the Poisson kernel.
    pub fn exponent(&self) -> Complex64 {
        exponent(self.lambda)
    }

    pub fn negated(&self) -> Self {
        Self {
            lambda: -self.lambda,
            strip_bound: self.strip_bound,
        }
    }
}

fn exponent(lambda: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) + Complex64::i() * lambda) * 0.5
}

/// The character `e^{inθ}` of the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KTypeIndex(i32);

impl KTypeIndex {
    pub fn new(n: i32) -> Self {
        Self(n)
    }

    pub fn get(&self) -> i32 {
        self.0
    }

    pub fn abs(&self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_even(&self) -> bool {
        self.0 % 2 == 0
    }
}

impl From<i32> for KTypeIndex {
    fn from(n: i32) -> Self {
        Self(n)
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radial coordinate t = {t} must be finite and non-negative")))
    }
}

// Trapezoid control for the substituted integral.
const START_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1.0 / 512.0;
const REL_TOL: f64 = 2e-14;
// Integrand magnitudes below e^{-LOG_CUTOFF} times the peak are dropped.
const LOG_CUTOFF: f64 = 42.0;
const SCAN_STEP: f64 = 0.5;

/// Trapezoid nodes for `u ↦ Φ_{λ,n}(t)` at a fixed `(n, t)`, reusable across
/// many values of `λ`.
///
/// The step is chosen so that every probe parameter passed to
/// [`KernelNodes::new`] is resolved; parameters with smaller `|λ|` and
/// `|Im λ|` inside the probed range are then resolved as well.
#[derive(Debug, Clone)]
pub struct KernelNodes {
    t: f64,
    n: KTypeIndex,
    ln_p: Vec<f64>,
    alpha: Vec<f64>,
    base: Vec<f64>,
    weights: Vec<f64>,
    /// `weights · P^{1/2}`, the magnitude on the real line.
    mag: Vec<f64>,
    step: f64,
}

impl KernelNodes {
    pub fn new(n: KTypeIndex, t: f64, probes: &[Complex64]) -> Result<Self> {
        check_t(t)?;
        if probes.is_empty() {
            return Err(Error::Parameter("at least one probe parameter is required".into()));
        }
        if t == 0.0 {
            let w = if n.get() == 0 { 1.0 } else { 0.0 };
            return Ok(Self {
                t,
                n,
                ln_p: vec![0.0],
                alpha: vec![0.0],
                base: vec![1.0],
                weights: vec![w],
                mag: vec![w],
                step: 0.0,
            });
        }
        let sigmas: Vec<f64> = probes.iter().map(|&l| exponent(l).re).collect();
        let (lo, hi) = truncation_window(t, &sigmas);
        let nf = n.get() as f64;
        let node = |u: f64| -> (f64, f64, f64) {
            let v = u - t;
            let ln_p = ln_cosh(v) - ln_cosh(u + t);
            let alpha = 2.0 * v.exp().atan();
            let base = 1.0 / v.cosh() / PI;
            (ln_p, alpha, base)
        };

        let mut h = START_STEP;
        let mut k_lo = (lo / h).floor() as i64;
        let mut k_hi = (hi / h).ceil() as i64;
        let mut ln_p = Vec::new();
        let mut alpha = Vec::new();
        let mut base = Vec::new();
        let mut weights = Vec::new();
        let mut push = |ln_p: &mut Vec<f64>, weights: &mut Vec<f64>, (l, a, b): (f64, f64, f64)| {
            ln_p.push(l);
            alpha.push(a);
            base.push(b);
            weights.push(b * (nf * a).cos());
        };
        for k in k_lo..=k_hi {
            push(&mut ln_p, &mut weights, node(k as f64 * h));
        }
        let mut prev: Vec<Complex64> = probes.iter().map(|&l| raw_sum(&ln_p, &weights, l) * h).collect();
        loop {
            if h * 0.5 < MIN_STEP {
                return Err(Error::Convergence {
                    what: "Eisenstein kernel trapezoid",
                    iterations: ln_p.len(),
                    last_change: f64::NAN,
                });
            }
            for k in k_lo..k_hi {
                push(&mut ln_p, &mut weights, node((k as f64 + 0.5) * h));
            }
            h *= 0.5;
            k_lo *= 2;
            k_hi *= 2;
            let mut worst: f64 = 0.0;
            let mut next = Vec::with_capacity(probes.len());
            for (&l, &p) in probes.iter().zip(&prev) {
                let cur = raw_sum(&ln_p, &weights, l) * h;
                let scale = raw_abs_sum(&ln_p, &weights, l) * h;
                worst = worst.max((cur - p).norm() / scale.max(f64::MIN_POSITIVE));
                next.push(cur);
            }
            prev = next;
            if worst <= REL_TOL {
                break;
            }
            if h * 0.5 < MIN_STEP {
                return Err(Error::Convergence {
                    what: "Eisenstein kernel trapezoid",
                    iterations: ln_p.len(),
                    last_change: worst,
                });
            }
        }
        for w in weights.iter_mut() {
            *w *= h;
        }
        for b in base.iter_mut() {
            *b *= h;
        }
        let mag = ln_p.iter().zip(&weights).map(|(&l, &w)| w * (0.5 * l).exp()).collect();
        Ok(Self {
            t,
            n,
            ln_p,
            alpha,
            base,
            weights,
            mag,
            step: h,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> KTypeIndex {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ln_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_p.is_empty()
    }

    /// Final trapezoid step (zero at the origin).
    pub fn step(&self) -> f64 {
        self.step
    }

    /// `Φ_{λ,n}(t)`.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        raw_sum(&self.ln_p, &self.weights, lambda)
    }

    /// `Φ_{λ,n}(t)` for real `λ`, using a single `sin_cos` per node.
    pub fn eval_real(&self, lambda: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (&l, &mag) in self.ln_p.iter().zip(&self.mag) {
            let (s, c) = (0.5 * lambda * l).sin_cos();
            re += mag * c;
            im += mag * s;
        }
        Complex64::new(re, im)
    }

    /// Nodes as `(ln P, weight)` pairs, where the weight already includes
    /// the step, the factor `1/π` and `cos(nα) sech(u - t)`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ln_p.iter().copied().zip(self.weights.iter().copied())
    }

    /// Nodes as `(ln P, α, w)` where `θ = ±α` are the two boundary angles
    /// mapped to the node and `w` includes the step, `1/π` and `sech(u - t)`
    /// but no character factor, so that
    /// `(1/2π) ∮ F(θ) P^s dθ = Σ w P^s (F(α) + F(-α))/2`.
    pub fn angular_nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ln_p
            .iter()
            .zip(&self.alpha)
            .zip(&self.base)
            .map(|((&l, &a), &b)| (l, a, b))
    }
}

fn raw_sum(ln_p: &[f64], weights: &[f64], lambda: Complex64) -> Complex64 {
    let s = exponent(lambda);
    ln_p
        .iter()
        .zip(weights)
        .map(|(&l, &w)| (s * l).exp() * w)
        .sum()
}

fn raw_abs_sum(ln_p: &[f64], weights: &[f64], lambda: Complex64) -> f64 {
    let sigma = exponent(lambda).re;
    ln_p
        .iter()
        .zip(weights)
        .map(|(&l, &w)| (sigma * l).exp() * w.abs())
        .sum()
}

/// Interval of `u` outside which the integrand is negligible for every
/// exponent real part in `sigmas`.
fn truncation_window(t: f64, sigmas: &[f64]) -> (f64, f64) {
    let log_mag = |u: f64| -> f64 {
        let ln_p = ln_cosh(u - t) - ln_cosh(u + t);
        let damp = ln_cosh(u - t);
        sigmas
            .iter()
            .map(|&s| s * ln_p - damp)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut peak = log_mag(0.0);
    let reach = t + 3.0;
    let mut hi = 0.0;
    loop {
        hi += SCAN_STEP;
        let m = log_mag(hi);
        peak = peak.max(m);
        if hi > reach && m < peak - LOG_CUTOFF {
            break;
        }
    }
    let mut lo = 0.0;
    loop {
        lo -= SCAN_STEP;
        let m = log_mag(lo);
        peak = peak.max(m);
        if -lo > reach && m < peak - LOG_CUTOFF {
            break;
        }
    }
    // A late peak on one side can make the other side's stopping point
    // premature; both tails decay at unit rate, so extend by the deficit.
    let m_hi = log_mag(hi);
    let m_lo = log_mag(lo);
    let hi = hi + (m_hi - (peak - LOG_CUTOFF)).max(0.0);
    let lo = lo - (m_lo - (peak - LOG_CUTOFF)).max(0.0);
    (lo, hi)
}

/// Eisenstein integral `Φ_{λ,n}(t)` at the radial point `(t, 0)`.
pub fn eisenstein(lambda: &SpectralParameter, n: KTypeIndex, t: f64) -> Result<Complex64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(if n.get() == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    let nodes = KernelNodes::new(n, t, &[lambda.lambda()])?;
    Ok(nodes.eval(lambda.lambda()))
}

/// Adjoint kernel `Φ_{λ̄,n}(t)^* = Φ_{-λ,n}(t)`; the kernel of the forward transform.
pub fn eisenstein_adjoint(lambda: &SpectralParameter, n: KTypeIndex, t: f64) -> Result<Complex64> {
    eisenstein(&lambda.negated(), n, t)
}

/// Elementary spherical function `φ_λ(t) = Φ_{λ,0}(t)`.
pub fn phi_lambda(lambda: &SpectralParameter, t: f64) -> Result<Complex64> {
    eisenstein(lambda, KTypeIndex::new(0), t)
}

/// `φ_0(t)`, strictly positive and at most 1.
pub fn phi_zero(t: f64) -> Result<f64> {
    Ok(phi_lambda(&SpectralParameter::real(0.0)?, t)?.re)
}

/// Reference evaluation of `Φ_{λ,n}(t)` as an equispaced average over the
/// boundary circle, doubling the point count until successive averages agree
/// to `abs_tol`. Practical for `t` up to about 3.
pub fn eisenstein_circle(lambda: &SpectralParameter, n: KTypeIndex, t: f64, abs_tol: f64) -> Result<Complex64> {
    check_t(t)?;
    let z = DiskPoint::radial(t)?;
    let s = lambda.exponent();
    let nf = n.get() as f64;
    let avg = circle_average_adaptive(
        |theta| {
            let b = BoundaryPoint::new(theta).expect("finite angle");
            let lp = log_poisson_kernel(&z, &b);
            (s * lp).exp() * Complex64::from_polar(1.0, nf * theta)
        },
        abs_tol,
    )?;
    Ok(avg.value)
}

/// Hypergeometric closed form
///
/// ```text
/// Φ_{λ,n}(t) = (s)_{|n|}/|n|! · tanh^{|n|} t · cosh^{-2s} t · ₂F₁(s, s+|n|; |n|+1; tanh² t)
/// ```
///
/// valid where the power series is validated (`tanh² t <= 0.9`).
pub fn eisenstein_closed_form(lambda: &SpectralParameter, n: KTypeIndex, t: f64) -> Result<Complex64> {
    check_t(t)?;
    let s = lambda.exponent();
    let m = n.abs();
    let x = t.tanh().powi(2);
    if x > HYP2F1_MAX_X {
        return Err(Error::OutOfValidatedRange(x));
    }
    let mf = m as f64;
    let args = HypergeometricArgs::new(s, s + mf, Complex64::new(mf + 1.0, 0.0), x)?;
    let f = hyp2f1(&args)?;
    let factorial: f64 = (1..=m).map(|j| j as f64).product();
    let prefactor = pochhammer(s, m) / factorial * t.tanh().powi(m as i32);
    Ok(prefactor * (-2.0 * s * ln_cosh(t)).exp() * f)
}

/// `Q_n(λ) = ((1 + iλ)/2)_{|n|}`, the factor through which `Φ_{λ,n}` depends
/// on `n`: `λ ↦ Φ_{λ,n}(t)/Q_n(λ)` is even.
pub fn q_poly(n: KTypeIndex, lambda: Complex64) -> Complex64 {
    pochhammer(exponent(lambda), n.abs())
}

/// Zeros `λ = i(1 + 2j)` of `Q_n`, `j = 0..|n|`.
pub fn q_poly_zeros(n: KTypeIndex) -> Vec<Complex64> {
    (0..n.abs())
        .map(|j| Complex64::new(0.0, 1.0 + 2.0 * j as f64))
        .collect()
}

/// Harish-Chandra function `c(λ) = Γ(iλ/2) / (√π Γ((1+iλ)/2))`.
pub fn c_function(lambda: Complex64) -> Result<Complex64> {
    let i = Complex64::i();
    let num = gamma_complex(i * lambda * 0.5)?;
    let den = gamma_complex(exponent(lambda))? * PI.sqrt();
    Ok(num / den)
}

/// Plancherel density `ν_P(λ) = (λ/4) tanh(πλ/2) = |c(λ)|^{-2}/(2π)`.
pub fn plancherel_density(lambda: f64) -> f64 {
    0.25 * lambda * (0.5 * PI * lambda).tanh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sp(re: f64, im: f64) -> SpectralParameter {
        SpectralParameter::unrestricted(Complex64::new(re, im)).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn strip_is_enforced() {
        assert!(SpectralParameter::new(Complex64::new(0.0, 1.5), 1.0).is_err());
        assert!(SpectralParameter::new(Complex64::new(3.0, -1.0), 1.0).is_ok());
        assert!(phi_lambda(&sp(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn phi_at_origin_and_trivial_parameters() {
        for l in [0.0, 1.0, 7.5] {
            assert_eq!(phi_lambda(&sp(l, 0.0), 0.0).unwrap(), Complex64::new(1.0, 0.0));
        }
        for t in [0.3, 1.0, 4.0, 9.0] {
            for im in [1.0, -1.0] {
                let v = phi_lambda(&sp(0.0, im), t).unwrap();
                assert!((v - 1.0).norm() < 1e-13, "t={t} im={im}: {v}");
            }
        }
    }

    #[test]
    fn nonzero_type_vanishes_at_origin() {
        for n in [1, -2, 5] {
            assert_eq!(eisenstein(&sp(1.3, 0.0), KTypeIndex::new(n), 0.0).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn substituted_trapezoid_matches_circle_average() {
        for &(re, im) in &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 0.5), (5.0, -0.8)] {
            for n in 0..=3 {
                for t in [0.05, 0.4, 1.0, 1.5, 2.5] {
                    let l = sp(re, im);
                    let k = KTypeIndex::new(n);
                    let fast = eisenstein(&l, k, t).unwrap();
                    let oracle = eisenstein_circle(&l, k, t, 1e-16).unwrap();
                    assert!((fast - oracle).norm() < 1e-12 * oracle.norm().max(1e-3), "λ=({re},{im}) n={n} t={t}: {fast} vs {oracle}");
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for &(re, im) in &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 0.5)] {
            for n in 0..=3 {
                for t in [0.1, 0.5, 1.0, 1.5] {
                    let l = sp(re, im);
                    let k = KTypeIndex::new(n);
                    let closed = eisenstein_closed_form(&l, k, t).unwrap();
                    let oracle = eisenstein_circle(&l, k, t, 1e-16).unwrap();
                    assert!(rel(closed, oracle) < 1e-10, "λ=({re},{im}) n={n} t={t}: {closed} vs {oracle}");
                }
            }
        }
        assert!(matches!(
            eisenstein_closed_form(&sp(0.0, 0.0), KTypeIndex::new(0), 2.0),
            Err(Error::OutOfValidatedRange(_))
        ));
    }

    #[test]
    fn adjoint_is_reflected_parameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let l = sp(rng.gen_range(-10.0..10.0), rng.gen_range(-1.0..1.0));
            let n = KTypeIndex::new(rng.gen_range(-4..=4));
            let t = rng.gen_range(0.0..3.0);
            let adj = eisenstein_adjoint(&l, n, t).unwrap();
            // Direct evaluation of the average of P^{(1-iλ)/2} e^{-inθ}.
            let s = exponent(-l.lambda());
            let z = DiskPoint::radial(t).unwrap();
            let nf = n.get() as f64;
            let direct = circle_average_adaptive(
                |th| (s * log_poisson_kernel(&z, &BoundaryPoint::new(th).unwrap())).exp() * Complex64::from_polar(1.0, -nf * th),
                1e-16,
            )
            .unwrap()
            .value;
            assert!((adj - direct).norm() < 1e-12 * direct.norm().max(1e-2), "{adj} vs {direct}");
        }
        let real = sp(2.0, 0.0);
        let t = 1.2;
        let a = eisenstein_adjoint(&real, KTypeIndex::new(0), t).unwrap();
        let e = eisenstein(&real, KTypeIndex::new(0), t).unwrap();
        assert!((a - e.conj()).norm() < 1e-14);
        assert_eq!(eisenstein_adjoint(&real, KTypeIndex::new(0), 0.0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn type_sign_symmetry() {
        for n in 1..=4 {
            for t in [0.3, 2.0, 6.0] {
                let l = sp(1.7, 0.4);
                let a = eisenstein(&l, KTypeIndex::new(n), t).unwrap();
                let b = eisenstein(&l, KTypeIndex::new(-n), t).unwrap();
                assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn q_poly_values() {
        let l = Complex64::new(0.7, 0.2);
        assert_eq!(q_poly(KTypeIndex::new(0), l), Complex64::new(1.0, 0.0));
        let s = exponent(l);
        assert!((q_poly(KTypeIndex::new(1), l) - s).norm() < 1e-15);
        assert!((q_poly(KTypeIndex::new(-2), l) - s * (s + 1.0)).norm() < 1e-15);
        for z in q_poly_zeros(KTypeIndex::new(3)) {
            assert!(q_poly(KTypeIndex::new(3), z).norm() < 1e-14);
        }
    }

    #[test]
    fn q_poly_has_real_coefficients_in_i_lambda() {
        // Real coefficients in iλ means Q(λ) is real on the imaginary axis.
        for n in 0..6 {
            for y in [-2.5, -0.3, 0.0, 1.7] {
                assert!(q_poly(KTypeIndex::new(n), Complex64::new(0.0, y)).im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn eisenstein_over_q_is_even() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let n = KTypeIndex::new(rng.gen_range(0..=3));
            let lam = Complex64::new(rng.gen_range(-6.0..6.0), if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(-1.0..1.0) });
            if q_poly_zeros(n).iter().any(|z| (z - lam).norm() < 0.1 || (z + lam).norm() < 0.1) {
                continue;
            }
            for t in [0.5, 1.0, 2.0] {
                let g = |l: Complex64| eisenstein(&SpectralParameter::unrestricted(l).unwrap(), n, t).unwrap() / q_poly(n, l);
                let (a, b) = (g(lam), g(-lam));
                assert!((a - b).norm() < 1e-9, "n={} λ={lam} t={t}: {a} vs {b}", n.get());
            }
        }
    }

    #[test]
    fn plancherel_density_matches_c_function() {
        assert_eq!(plancherel_density(0.0), 0.0);
        assert!((plancherel_density(1.0) - 0.229_288_083_916_818_6).abs() < 1e-15);
        for l in [0.1, 0.5, 1.0, 3.0, 10.0, 40.0] {
            let c = c_function(Complex64::new(l, 0.0)).unwrap();
            let from_gamma = 1.0 / (2.0 * PI * c.norm_sqr());
            assert!((plancherel_density(l) - from_gamma).abs() < 1e-10 * from_gamma.max(1.0), "λ={l}");
            assert_eq!(plancherel_density(-l), plancherel_density(l));
        }
    }

    #[test]
    fn plancherel_density_polynomial_bound() {
        let mut l = -100.0;
        while l <= 100.0 {
            assert!(plancherel_density(l) <= 1.0 + l.abs());
            l += 0.01;
        }
    }

    #[test]
    fn phi_zero_bounds() {
        let mut q: f64 = 0.0;
        for i in 0..=120 {
            let t = 0.1 * i as f64;
            let v = phi_zero(t).unwrap();
            assert!(v > 0.0 && v <= 1.0 + 1e-15, "t={t}: {v}");
            assert!(v >= (-t).exp() * (1.0 - 1e-13), "t={t}: {v}");
            q = q.max(v * t.exp() / (1.0 + t));
        }
        let v2 = phi_zero(2.0).unwrap();
        assert!(v2 >= (-2.0f64).exp() && v2 <= q * 3.0 * (-2.0f64).exp());
    }

    #[test]
    fn large_parameters_converge() {
        for t in [0.01, 1.0, 5.0, 8.0, 12.0] {
            for l in [0.0, 24.0, 60.0] {
                let v = eisenstein(&sp(l, 0.9), KTypeIndex::new(3), t).unwrap();
                assert!(v.re.is_finite() && v.im.is_finite());
            }
        }
    }

    #[test]
    fn shared_nodes_agree_with_single_evaluations() {
        let probes = [Complex64::new(24.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        for n in 0..3 {
            for t in [0.2, 3.0, 7.5] {
                let nodes = KernelNodes::new(KTypeIndex::new(n), t, &probes).unwrap();
                for l in [0.0, 3.3, -11.0, 23.9] {
                    let a = nodes.eval_real(l);
                    let b = nodes.eval(Complex64::new(l, 0.0));
                    let c = eisenstein(&SpectralParameter::real(l).unwrap(), KTypeIndex::new(n), t).unwrap();
                    assert!((a - b).norm() < 1e-14);
                    assert!((a - c).norm() < 1e-13 * c.norm().max(1e-3), "n={n} t={t} λ={l}: {a} vs {c}");
                }
            }
        }
    }

    #[test]
    fn eigen_equation_residual() {
        let h = 1e-3;
        for &(re, im) in &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.5)] {
            let l = sp(re, im);
            let ev = l.lambda() * l.lambda() + 1.0;
            for n in 0..=3 {
                let k = KTypeIndex::new(n);
                let f = |t: f64| eisenstein(&l, k, t).unwrap();
                let mut t = 0.2;
                while t <= 4.0 + 1e-9 {
                    let (f2m, fm, f0, fp, f2p) = (f(t - 2.0 * h), f(t - h), f(t), f(t + h), f(t + 2.0 * h));
                    let d2 = (-f2p + 16.0 * fp - 30.0 * f0 + 16.0 * fm - f2m) / (12.0 * h * h);
                    let d1 = (-f2p + 8.0 * fp - 8.0 * fm + f2m) / (12.0 * h);
                    let nf = n as f64;
                    let lap = d2 + d1 * (2.0 / (2.0 * t).tanh()) - f0 * (4.0 * nf * nf / (2.0 * t).sinh().powi(2));
                    let res = (lap + ev * f0).norm();
                    assert!(res < 1e-6, "λ=({re},{im}) n={n} t={t}: residual {res}");
                    t += 0.2;
                }
            }
        }
    }
}
