//! Complex Gamma, Pochhammer symbols and the Gauss hypergeometric series.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// Γ(s) for complex `s`, with reflection for `Re s < 1/2`.
pub fn gamma_complex(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("gamma of non-finite argument {s}")));
    }
    if is_nonpositive_integer(s) {
        return Err(Error::Domain(format!("gamma has a pole at {}", s.re)));
    }
    if s.re < 0.5 {
        let sin = (s * PI).sin();
        let g = lanczos(Complex64::new(1.0, 0.0) - s);
        return Ok(Complex64::new(PI, 0.0) / (sin * g));
    }
    Ok(lanczos(s))
}

fn lanczos(s: Complex64) -> Complex64 {
    let z = s - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let log_part = (z + 0.5) * t.ln() - t;
    (2.0 * PI).sqrt() * log_part.exp() * x
}

/// Rising factorial `s (s+1) ··· (s+k-1)`, computed as a direct product.
pub fn pochhammer(s: Complex64, k: u32) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (s + j as f64))
}

/// Parameters of `₂F₁(a, b; c; x)` on the validated real range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricArgs {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub x: f64,
}

impl HypergeometricArgs {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, x: f64) -> Result<Self> {
        if is_nonpositive_integer(c) {
            return Err(Error::Domain(format!("c = {} is a non-positive integer", c.re)));
        }
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1)")));
        }
        Ok(Self { a, b, c, x })
    }
}

/// Largest argument accepted by the direct power series.
pub const HYP2F1_MAX_X: f64 = 0.9;
const HYP2F1_MAX_TERMS: usize = 1_000_000;

/// Gauss hypergeometric function by its power series on `0 <= x <= 0.9`.
pub fn hyp2f1(args: &HypergeometricArgs) -> Result<Complex64> {
    let HypergeometricArgs { a, b, c, x } = *args;
    if x > HYP2F1_MAX_X {
        return Err(Error::OutOfValidatedRange(x));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small_run = 0;
    for k in 0..HYP2F1_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.norm() < 1e-16 * sum.norm() || term.norm() == 0.0 {
            small_run += 1;
            if small_run >= 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Convergence {
        what: "hypergeometric series",
        iterations: HYP2F1_MAX_TERMS,
        last_change: term.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_special_values() {
        assert!(rel(gamma_complex(c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        assert!(rel(gamma_complex(c(0.5, 0.0)).unwrap(), c(PI.sqrt(), 0.0)) < 1e-14);
        assert!(rel(gamma_complex(c(6.0, 0.0)).unwrap(), c(120.0, 0.0)) < 1e-13);
        let gi = gamma_complex(c(0.0, 1.0)).unwrap();
        let expect = PI / PI.sinh();
        assert!(((gi.norm_sqr() - expect) / expect).abs() < 1e-12);
        assert!((expect - 0.272_029_055_0).abs() < 1e-10);
    }

    #[test]
    fn gamma_poles_are_domain_errors() {
        for k in 0..5 {
            assert!(matches!(gamma_complex(c(-(k as f64), 0.0)), Err(Error::Domain(_))));
        }
    }

    fn random_points(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < n {
            let s = c(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
            if s.norm() <= radius && (s - c(s.re.round(), 0.0)).norm() > 0.05 {
                out.push(s);
            }
        }
        out
    }

    #[test]
    fn gamma_recurrence_reflection_duplication() {
        for s in random_points(100, 20.0, 7) {
            let g = gamma_complex(s).unwrap();
            let g1 = gamma_complex(s + 1.0).unwrap();
            assert!(rel(g1, s * g) < 1e-11, "recurrence at {s}");

            let refl = g * gamma_complex(c(1.0, 0.0) - s).unwrap() * (s * PI).sin() / PI;
            assert!((refl - c(1.0, 0.0)).norm() < 1e-10, "reflection at {s}");

            if (2.0 * s).norm() < 40.0 && (2.0 * s - c((2.0 * s).re.round(), 0.0)).norm() > 0.05 {
                let lhs = gamma_complex(2.0 * s).unwrap();
                let rhs = c(2.0, 0.0).powc(2.0 * s - 1.0) * g * gamma_complex(s + 0.5).unwrap() / PI.sqrt();
                assert!(rel(lhs, rhs) < 1e-10, "duplication at {s}");
            }
        }
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(c(3.3, -1.0), 0), c(1.0, 0.0));
        assert_eq!(pochhammer(c(1.0, 0.0), 4), c(24.0, 0.0));
        let s = c(0.5, 0.5);
        let expect = s * c(1.5, 0.5);
        assert!((pochhammer(s, 2) - expect).norm() < 1e-15);
        assert!((expect - c(0.5, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn hyp2f1_trivial_cases() {
        let one = c(1.0, 0.0);
        let args = HypergeometricArgs::new(c(0.3, 0.2), c(1.1, 0.0), c(2.0, 0.0), 0.0).unwrap();
        assert_eq!(hyp2f1(&args).unwrap(), one);
        for x in [0.1, 0.5, 0.9] {
            let args = HypergeometricArgs::new(c(0.0, 0.0), c(1.1, 3.0), c(2.5, 0.0), x).unwrap();
            assert_eq!(hyp2f1(&args).unwrap(), one);
        }
    }

    #[test]
    fn hyp2f1_logarithm_identity() {
        let args = HypergeometricArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 0.5).unwrap();
        let v = hyp2f1(&args).unwrap();
        let expect = -(0.5f64.ln()) / 0.5;
        assert!((v.re - expect).abs() < 1e-11 * expect);
        assert!((expect - 1.386_294_361_1).abs() < 1e-10);
    }

    #[test]
    fn hyp2f1_range_and_parameter_errors() {
        let args = HypergeometricArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 0.95).unwrap();
        assert_eq!(hyp2f1(&args), Err(Error::OutOfValidatedRange(0.95)));
        assert!(HypergeometricArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0), 0.5).is_err());
        assert!(HypergeometricArgs::new(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn hyp2f1_contiguous_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let cc = c(rng.gen_range(0.5..4.0), rng.gen_range(-1.0..1.0));
            let x = rng.gen_range(0.0..0.5);
            let f = |a, b, cc| hyp2f1(&HypergeometricArgs::new(a, b, cc, x).unwrap()).unwrap();
            let lhs = cc * (1.0 - x) * f(a, b, cc) - cc * f(a - 1.0, b, cc) + (cc - b) * x * f(a, b, cc + 1.0);
            let scale = (cc * f(a, b, cc)).norm().max(1.0);
            assert!(lhs.norm() < 1e-9 * scale, "residual {lhs} at a={a} b={b} c={cc} x={x}");
        }
    }
}
