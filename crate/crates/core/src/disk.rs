//! The hyperbolic disk with metric `|dz| / (1 - |z|^2)` (curvature -4, so
//! that ρ = 1): points, boundary, Poisson kernel, Busemann function and the
//! polar and horocyclic charts of the invariant measure.
//!
//! Measure normalization used throughout the crate:
//!
//! ```text
//! dx = 2 sinh(2t) dt · dψ/(2π)          (polar chart)
//!    = e^{-2s} dξ ds / π                (horocyclic chart, ζ = ξ + i e^{2s})
//! ```
//!
//! where ζ = i(1+z)/(1-z) is the Cayley map sending the boundary point
//! `b = 1` to `∞`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{circle_average_adaptive, integrate_adaptive, integrate_halfline, TailPolicy};

/// Order of the Weyl group, `ω = |W| = 2`.
pub const WEYL_ORDER: f64 = 2.0;

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// A point of the disk in geodesic polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    t: f64,
    psi: f64,
}

impl DiskPoint {
    pub fn new(t: f64, psi: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() || !psi.is_finite() {
            return Err(Error::Domain(format!("invalid disk point (t = {t}, psi = {psi})")));
        }
        let psi = if t == 0.0 { 0.0 } else { wrap_angle(psi) };
        Ok(Self { t, psi })
    }

    pub fn origin() -> Self {
        Self { t: 0.0, psi: 0.0 }
    }

    /// Point on the radius at angle 0.
    pub fn radial(t: f64) -> Result<Self> {
        Self::new(t, 0.0)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// Euclidean radius `tanh t`.
    pub fn radius(&self) -> f64 {
        self.t.tanh()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.radius(), self.psi)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let r = z.norm();
        Self::new(distance_from_origin(r)?, z.arg())
    }
}

/// A point `e^{iθ}` of the boundary circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    theta: f64,
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("invalid boundary angle {theta}")));
        }
        Ok(Self {
            theta: wrap_angle(theta),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Fixed measure data of the instantiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeasureConvention;

impl MeasureConvention {
    /// Radial density `Δ(t) = 2 sinh(2t)`.
    pub fn radial_weight(t: f64) -> f64 {
        2.0 * (2.0 * t).sinh()
    }

    /// `Δ(t) e^{-2t} = 1 - e^{-4t}`, evaluated without overflow.
    pub fn radial_weight_scaled(t: f64) -> f64 {
        -(-4.0 * t).exp_m1()
    }

    pub fn weyl_order() -> f64 {
        WEYL_ORDER
    }
}

/// `1 - r` for `r = tanh t`, without cancellation.
fn one_minus_tanh(t: f64) -> f64 {
    let e = (-2.0 * t).exp();
    2.0 * e / (1.0 + e)
}

/// `|z - b|^2 / (1 - |z|^2)`, i.e. the reciprocal Poisson kernel, in a form
/// that stays accurate near the boundary.
fn inverse_poisson(t: f64, delta: f64) -> f64 {
    let r = t.tanh();
    let omr = one_minus_tanh(t);
    let s = (0.5 * delta).sin();
    let dist2 = omr * omr + 4.0 * r * s * s;
    let cosh = t.cosh();
    dist2 * cosh * cosh
}

/// Poisson kernel `P(z, b) = (1 - |z|^2) / |z - b|^2`.
pub fn poisson_kernel(z: &DiskPoint, b: &BoundaryPoint) -> f64 {
    if z.t == 0.0 {
        return 1.0;
    }
    1.0 / inverse_poisson(z.t, z.psi - b.theta)
}

/// `ln P(z, b)`; stays finite where `P` itself would overflow.
pub fn log_poisson_kernel(z: &DiskPoint, b: &BoundaryPoint) -> f64 {
    if z.t == 0.0 {
        return 0.0;
    }
    let t = z.t;
    let delta = z.psi - b.theta;
    let r = t.tanh();
    let omr = one_minus_tanh(t);
    let s = (0.5 * delta).sin();
    let dist2 = omr * omr + 4.0 * r * s * s;
    // ln(1 - r^2) = -2 ln cosh t
    -2.0 * ln_cosh(t) - dist2.ln()
}

/// Busemann function `B(z, b) = ½ ln P(z, b)`; positive toward `b`.
pub fn busemann(z: &DiskPoint, b: &BoundaryPoint) -> f64 {
    0.5 * log_poisson_kernel(z, b)
}

/// Geodesic distance from the origin of a point at Euclidean radius `r`.
pub fn distance_from_origin(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
    }
    Ok(r.atanh())
}

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Coordinates of the invariant measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Polar,
    Horocyclic,
}

/// Horocyclic coordinates `(s, x)`: ζ = ξ + i e^{2s} with ξ = √(1+e^{4s}) sinh x.
///
/// `s` is the Busemann coordinate toward the boundary point `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorocyclicPoint {
    pub s: f64,
    pub x: f64,
}

impl HorocyclicPoint {
    /// Polar coordinates of the point.
    pub fn to_disk(&self) -> DiskPoint {
        let (s, x) = (self.s, self.x);
        // sinh^2 t = (cosh 2s sinh^2 x + 2 sinh^2 s) / 2
        let sh = x.sinh();
        let ss = s.sinh();
        let sinh2_t = 0.5 * ((2.0 * s).cosh() * sh * sh + 2.0 * ss * ss);
        let t = sinh2_t.sqrt().asinh();
        let y_minus = (2.0 * s).exp_m1();
        let y_plus = (2.0 * s).exp() + 1.0;
        let xi = (1.0 + (4.0 * s).exp()).sqrt() * sh;
        let psi = y_minus.atan2(xi) - y_plus.atan2(xi);
        DiskPoint::new(t, psi).expect("horocyclic coordinates map into the disk")
    }

    /// Density of `dx` with respect to `ds dx_coord`.
    pub fn jacobian(&self) -> f64 {
        (1.0 + (-4.0 * self.s).exp()).sqrt() * self.x.cosh() / PI
    }

    /// Half-width in `x` of the horocycle at height `s` inside the ball `t <= radius`.
    pub fn x_extent(s: f64, radius: f64) -> Option<f64> {
        if s.abs() >= radius {
            return None;
        }
        // cosh 2t = cosh 2s cosh^2 x
        let ratio = ((2.0 * radius).cosh() / (2.0 * s).cosh()).sqrt();
        Some(ratio.acosh())
    }
}

const CHART_PANEL_ORDER: usize = 16;

/// Integrates `f` over the disk against `dx`.
///
/// The polar chart truncates adaptively in `t` according to `policy`; the
/// horocyclic chart integrates over the ball `t <= policy.max_cutoff` and
/// checks that the integrand is negligible on its boundary.
pub fn integrate_x<F>(f: F, chart: Chart, policy: &TailPolicy) -> Result<Complex64>
where
    F: Fn(&DiskPoint) -> Complex64,
{
    match chart {
        Chart::Polar => integrate_polar(&f, policy),
        Chart::Horocyclic => integrate_horocyclic(&f, policy),
    }
}

fn integrate_polar<F: Fn(&DiskPoint) -> Complex64>(f: &F, policy: &TailPolicy) -> Result<Complex64> {
    let ang_tol = policy.abs_tol * 1e-3;
    let mut failure = None;
    let radial = |t: f64| -> Complex64 {
        if failure.is_some() {
            return Complex64::new(0.0, 0.0);
        }
        let w = MeasureConvention::radial_weight(t);
        if t == 0.0 || w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let res = circle_average_adaptive(
            |psi| f(&DiskPoint { t, psi: wrap_angle(psi) }),
            (ang_tol / w).max(1e-17),
        );
        match res {
            Ok(avg) => avg.value * w,
            Err(e) => {
                failure = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let policy = TailPolicy {
        growth_exponent: policy.growth_exponent.max(2.0),
        ..*policy
    };
    let out = integrate_halfline(radial, &policy, CHART_PANEL_ORDER);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(out?.value)
}

fn integrate_horocyclic<F: Fn(&DiskPoint) -> Complex64>(f: &F, policy: &TailPolicy) -> Result<Complex64> {
    let radius = policy.max_cutoff;
    // The ball boundary must carry negligible mass.
    let mut edge: f64 = 0.0;
    for k in 0..32 {
        let z = DiskPoint::new(radius, TAU * k as f64 / 32.0)?;
        edge = edge.max(f(&z).norm());
    }
    let edge_mass = edge * MeasureConvention::radial_weight(radius);
    if !(edge_mass < policy.abs_tol) {
        return Err(Error::Truncation {
            cutoff: radius,
            tail: edge_mass,
        });
    }
    let tol = policy.abs_tol * 1e-3;
    let panels = (2.0 * radius).ceil() as usize;
    let width = 2.0 * radius / panels as f64;
    let failure = std::cell::RefCell::new(None);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = -radius + width * k as f64;
        let hi = lo + width;
        let row = |s: f64| match horocycle_integral(f, s, radius, tol) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        };
        total += integrate_adaptive(row, lo, hi, CHART_PANEL_ORDER, tol)?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
    }
    Ok(total)
}

/// `∫ f dξ / π · e^{-2s}` along the horocycle at height `s`, restricted to the ball.
fn horocycle_integral<F: Fn(&DiskPoint) -> Complex64>(f: &F, s: f64, radius: f64, tol: f64) -> Result<Complex64> {
    let Some(xmax) = HorocyclicPoint::x_extent(s, radius) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    if xmax == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let panels = (2.0 * xmax).ceil().max(2.0) as usize;
    let width = 2.0 * xmax / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = -xmax + width * k as f64;
        acc += integrate_adaptive(
            |x| {
                let hp = HorocyclicPoint { s, x };
                f(&hp.to_disk()) * hp.jacobian()
            },
            lo,
            lo + width,
            CHART_PANEL_ORDER,
            tol,
        )?;
    }
    Ok(acc)
}
