//! Deterministic quadrature: Gauss-Legendre rules on intervals, the
//! equispaced trapezoid average on the circle, adaptive bisection on
//! finite intervals and panel-wise truncation on the half-line.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest Gauss-Legendre order accepted by [`gauss_legendre`].
pub const MAX_GL_ORDER: usize = 4096;

/// First point count of the doubling circle average.
pub const CIRCLE_START_POINTS: usize = 32;

/// Point-count cap of the doubling circle average (2^16).
pub const CIRCLE_MAX_POINTS: usize = 1 << 16;

/// Nodes and positive weights on an interval `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.iter().map(|(x, w)| f(x) * w).sum()
    }

    /// Concatenates rules on adjacent intervals into one rule.
    pub fn concat(parts: &[QuadratureRule]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Parameter("cannot concatenate zero rules".into()))?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut end = first.interval.0;
        for p in parts {
            if (p.interval.0 - end).abs() > 1e-12 * (1.0 + end.abs()) {
                return Err(Error::Parameter("rules are not on adjacent intervals".into()));
            }
            nodes.extend_from_slice(&p.nodes);
            weights.extend_from_slice(&p.weights);
            end = p.interval.1;
        }
        Ok(Self {
            nodes,
            weights,
            interval: (first.interval.0, end),
        })
    }
}

/// Gauss-Legendre rule of the given order on `(a, b)`.
///
/// Nodes are the roots of `P_order`, located by Newton iteration on the
/// three-term recurrence and polished until the update drops below 1e-15.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_GL_ORDER {
        return Err(Error::Parameter(format!(
            "Gauss-Legendre order {order} outside 1..={MAX_GL_ORDER}"
        )));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Parameter(format!("invalid interval ({a}, {b})")));
    }
    let n = order;
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let mut ref_nodes = vec![0.0; n];
    let mut ref_weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi-type initial guess, descending in i.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp.is_finite() {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        ref_nodes[n - 1 - i] = x;
        ref_nodes[i] = -x;
        ref_weights[n - 1 - i] = w;
        ref_weights[i] = w;
    }
    if n % 2 == 1 {
        ref_nodes[n / 2] = 0.0;
    }
    let nodes = ref_nodes.iter().map(|x| mid + half * x).collect();
    let weights = ref_weights.iter().map(|w| half * w).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        interval: (a, b),
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
    let dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, dp)
}

/// `panels` equal Gauss-Legendre panels of `order` nodes each on `(a, b)`.
pub fn composite_gauss_legendre(panels: usize, order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if panels == 0 {
        return Err(Error::Parameter("panel count must be positive".into()));
    }
    let width = (b - a) / panels as f64;
    let parts = (0..panels)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == panels { b } else { lo + width };
            gauss_legendre(order, lo, hi)
        })
        .collect::<Result<Vec<_>>>()?;
    QuadratureRule::concat(&parts)
}

/// Equispaced trapezoid average `(1/N) Σ f(2πk/N)` of a 2π-periodic function.
pub fn circle_average<F>(mut f: F, n_points: usize) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    if n_points < 4 {
        return Err(Error::Parameter(format!("circle average needs at least 4 points, got {n_points}")));
    }
    let step = 2.0 * PI / n_points as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n_points {
        let theta = step * k as f64;
        let v = f(theta);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { theta });
        }
        acc += v;
    }
    Ok(acc / n_points as f64)
}

/// Result of the doubling circle average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleAverage {
    pub value: Complex64,
    pub points: usize,
    /// Difference between the last two refinements.
    pub change: f64,
}

/// Doubles the point count from 32 until two successive trapezoid averages
/// differ by less than `abs_tol`, or by less than the rounding level of the
/// summed samples. Each refinement reuses the previous nodes.
pub fn circle_average_adaptive<F>(mut f: F, abs_tol: f64) -> Result<CircleAverage>
where
    F: FnMut(f64) -> Complex64,
{
    if !(abs_tol > 0.0) {
        return Err(Error::Parameter("abs_tol must be positive".into()));
    }
    let mut n = CIRCLE_START_POINTS;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 0..n {
        let theta = 2.0 * PI * k as f64 / n as f64;
        let v = checked(theta, f(theta))?;
        abs_sum += v.norm();
        sum += v;
    }
    let mut prev = sum / n as f64;
    let mut change = f64::INFINITY;
    while n < CIRCLE_MAX_POINTS {
        let step = 2.0 * PI / (2 * n) as f64;
        for k in 0..n {
            let theta = step * (2 * k + 1) as f64;
            let v = checked(theta, f(theta))?;
            abs_sum += v.norm();
            sum += v;
        }
        n *= 2;
        let cur = sum / n as f64;
        change = (cur - prev).norm();
        let rounding = 64.0 * f64::EPSILON * abs_sum / n as f64;
        if change < abs_tol.max(rounding) {
            return Ok(CircleAverage {
                value: cur,
                points: n,
                change,
            });
        }
        prev = cur;
    }
    Err(Error::Convergence {
        what: "circle average",
        iterations: n,
        last_change: change,
    })
}

fn checked(theta: f64, v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { theta })
    }
}

/// Stopping rule for [`integrate_halfline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPolicy {
    pub abs_tol: f64,
    pub max_cutoff: f64,
    /// Known exponential growth rate of the integrand's weight; the tail
    /// past the cutoff is estimated as one unit window inflated by this rate.
    pub growth_exponent: f64,
}

impl TailPolicy {
    pub fn new(abs_tol: f64, max_cutoff: f64, growth_exponent: f64) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::Parameter("abs_tol must be positive".into()));
        }
        if !(max_cutoff >= 1.0) || !max_cutoff.is_finite() {
            return Err(Error::Parameter("max_cutoff must be finite and >= 1".into()));
        }
        if !growth_exponent.is_finite() {
            return Err(Error::Parameter("growth_exponent must be finite".into()));
        }
        Ok(Self {
            abs_tol,
            max_cutoff,
            growth_exponent,
        })
    }
}

impl Default for TailPolicy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            max_cutoff: 40.0,
            growth_exponent: 0.0,
        }
    }
}

/// Value of a half-line integral together with the cutoff actually used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalflineIntegral {
    pub value: Complex64,
    pub cutoff: f64,
    pub tail_estimate: f64,
}

/// Integrates over `[0, ∞)` on unit panels (each refined adaptively) until
/// the tail estimate falls below `policy.abs_tol`.
pub fn integrate_halfline<F>(mut integrand: F, policy: &TailPolicy, panel_order: usize) -> Result<HalflineIntegral>
where
    F: FnMut(f64) -> Complex64,
{
    let rule = gauss_legendre(panel_order, -1.0, 1.0)?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut t = 0.0;
    let mut tail = f64::INFINITY;
    let inflate = policy.growth_exponent.max(0.0).exp();
    while t < policy.max_cutoff {
        let hi = (t + 1.0).min(policy.max_cutoff);
        let panel = adaptive_panel(&mut integrand, &rule, t, hi, policy.abs_tol * 1e-2, policy.abs_tol * 1e-2, 0)?;
        total += panel;
        let end = integrand(hi);
        if !(end.re.is_finite() && end.im.is_finite()) {
            return Err(Error::NonFinite { theta: hi });
        }
        tail = end.norm() * inflate;
        t = hi;
        let settled = panel.norm() < policy.abs_tol.max(1e-3 * total.norm()) || t >= policy.max_cutoff;
        if tail < policy.abs_tol && settled {
            return Ok(HalflineIntegral {
                value: total,
                cutoff: t,
                tail_estimate: tail,
            });
        }
    }
    Err(Error::Truncation { cutoff: t, tail })
}

/// Adaptive bisection on `[a, b]`: a panel is accepted when the rule and its
/// two halves agree to `abs_tol`.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, order: usize, abs_tol: f64) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a < b) {
        return Err(Error::Parameter(format!("invalid interval ({a}, {b})")));
    }
    let rule = gauss_legendre(order, -1.0, 1.0)?;
    adaptive_panel(&mut f, &rule, a, b, abs_tol, abs_tol, 0)
}

const MAX_BISECTION_DEPTH: usize = 40;

/// Rule applied on `[a, b]`, together with the integral of `|f|`.
fn panel_sum<F: FnMut(f64) -> Complex64>(f: &mut F, rule: &QuadratureRule, a: f64, b: f64) -> Result<(Complex64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (x, w) in rule.iter() {
        let t = mid + half * x;
        let v = f(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { theta: t });
        }
        acc += v * w;
        abs += v.norm() * w;
    }
    Ok((acc * half, abs * half))
}

fn adaptive_panel<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    rule: &QuadratureRule,
    a: f64,
    b: f64,
    abs_tol: f64,
    root_tol: f64,
    depth: usize,
) -> Result<Complex64> {
    let (whole, _) = panel_sum(f, rule, a, b)?;
    let m = 0.5 * (a + b);
    let (left, labs) = panel_sum(f, rule, a, m)?;
    let (right, rabs) = panel_sum(f, rule, m, b)?;
    let refined = left + right;
    let diff = (refined - whole).norm();
    // Differences below the rounding level of the panel cannot be resolved.
    let tol = abs_tol.max(64.0 * f64::EPSILON * (labs + rabs));
    if diff <= tol || depth >= MAX_BISECTION_DEPTH {
        // Panels this narrow sit on rounding noise of the integrand; they are
        // accepted while their disagreement is a negligible share of the budget.
        if diff > tol && diff > 1e-6 * root_tol {
            return Err(Error::Convergence {
                what: "adaptive bisection",
                iterations: depth,
                last_change: diff,
            });
        }
        return Ok(refined);
    }
    let l = adaptive_panel(f, rule, a, m, abs_tol * 0.5, root_tol, depth + 1)?;
    let r = adaptive_panel(f, rule, m, b, abs_tol * 0.5, root_tol, depth + 1)?;
    Ok(l + r)
}
