use std::f64::consts::TAU;

use horofourier_core::disk::{busemann, distance_from_origin, poisson_kernel, BoundaryPoint, DiskPoint};
use horofourier_core::kernels::{eisenstein, eisenstein_adjoint, plancherel_density, q_poly, KTypeIndex, SpectralParameter};
use horofourier_core::quadrature::{circle_average, composite_gauss_legendre, gauss_legendre};
use horofourier_core::specfun::{gamma_complex, pochhammer};
use horofourier_core::transforms::{delta_project_spatial, q_delta, PolarSamples};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1(
        order in 1usize..24,
        coeffs in proptest::collection::vec(-1.0f64..1.0, 48),
        a in -2.0f64..0.0,
        len in 0.1f64..3.0,
    ) {
        let b = a + len;
        let deg = 2 * order - 1;
        let rule = gauss_legendre(order, a, b).unwrap();
        let p = |x: f64| coeffs[..=deg].iter().rev().fold(0.0, |acc, &k| acc * x + k);
        let exact: f64 = coeffs[..=deg]
            .iter()
            .enumerate()
            .map(|(j, k)| k * (b.powi(j as i32 + 1) - a.powi(j as i32 + 1)) / (j as f64 + 1.0))
            .sum();
        let scale: f64 = coeffs[..=deg].iter().map(|k| k.abs()).sum::<f64>() * 3f64.powi(deg as i32 + 1);
        prop_assert!((rule.integrate(p) - exact).abs() < 1e-13 * scale.max(1.0));
        prop_assert!(rule.weights().iter().all(|&w| w > 0.0));
        prop_assert!((rule.weights().iter().sum::<f64>() - len).abs() < 1e-13 * len.max(1.0));
    }

    #[test]
    fn composite_rules_stay_inside_their_interval(panels in 1usize..8, order in 1usize..16, len in 0.1f64..10.0) {
        let rule = composite_gauss_legendre(panels, order, 0.0, len).unwrap();
        prop_assert_eq!(rule.len(), panels * order);
        prop_assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rule.nodes().iter().all(|&x| x > 0.0 && x < len));
    }

    #[test]
    fn gamma_recurrence(re in 0.1f64..6.0, im in -6.0f64..6.0) {
        let s = c(re, im);
        let g = gamma_complex(s).unwrap();
        let g1 = gamma_complex(s + 1.0).unwrap();
        prop_assert!((g1 - s * g).norm() < 1e-12 * g1.norm());
        prop_assert!((gamma_complex(s.conj()).unwrap() - g.conj()).norm() < 1e-13 * g.norm());
    }

    #[test]
    fn pochhammer_shift(re in -3.0f64..3.0, im in -3.0f64..3.0, k in 0u32..8) {
        let s = c(re, im);
        let lhs = pochhammer(s, k + 1);
        let rhs = pochhammer(s, k) * (s + k as f64);
        prop_assert!((lhs - rhs).norm() <= 1e-13 * lhs.norm().max(1.0));
    }

    #[test]
    fn poisson_kernel_positive_with_unit_mean(t in 0.0f64..4.0, psi in 0.0f64..TAU, theta in 0.0f64..TAU) {
        let z = DiskPoint::new(t, psi).unwrap();
        let b = BoundaryPoint::new(theta).unwrap();
        prop_assert!(poisson_kernel(&z, &b) > 0.0);
        // The trapezoid error decays like r^N.
        let points = 64 + (40.0 / (1.0 - t.tanh())) as usize;
        let mean = circle_average(|th| c(poisson_kernel(&z, &BoundaryPoint::new(th).unwrap()), 0.0), points).unwrap();
        prop_assert!((mean.re - 1.0).abs() < 1e-11);
    }

    #[test]
    fn busemann_is_bounded_by_distance(t in 0.0f64..8.0, psi in 0.0f64..TAU, theta in 0.0f64..TAU) {
        let z = DiskPoint::new(t, psi).unwrap();
        let h = busemann(&z, &BoundaryPoint::new(theta).unwrap());
        prop_assert!(h.abs() <= t * (1.0 + 1e-12) + 1e-14);
        // r = tanh t is well conditioned for the inverse pair only away from the boundary.
        if t < 3.0 {
            prop_assert!((distance_from_origin(t.tanh()).unwrap() - t).abs() < 1e-13);
        }
    }

    #[test]
    fn eisenstein_over_q_is_even(
        re in -8.0f64..8.0,
        im in -0.9f64..0.9,
        n in -3i32..=3,
        t in 0.1f64..3.0,
    ) {
        let l = c(re, im);
        let k = KTypeIndex::new(n);
        // Stay clear of the zeros of Q_n at λ = i(2j+1).
        prop_assume!(q_poly(k, l).norm() > 0.05 && q_poly(k, -l).norm() > 0.05);
        let g = |l: Complex64| eisenstein(&SpectralParameter::unrestricted(l).unwrap(), k, t).unwrap() / q_poly(k, l);
        let (a, b) = (g(l), g(-l));
        prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn adjoint_kernel_is_the_reflected_parameter(re in -8.0f64..8.0, im in -0.9f64..0.9, n in -3i32..=3, t in 0.0f64..4.0) {
        let sp = SpectralParameter::unrestricted(c(re, im)).unwrap();
        let k = KTypeIndex::new(n);
        let adj = eisenstein_adjoint(&sp, k, t).unwrap();
        let refl = eisenstein(&SpectralParameter::unrestricted(c(-re, -im)).unwrap(), k, t).unwrap();
        prop_assert_eq!(adj, refl);
        // Type sign symmetry: Φ_{λ,-n} = Φ_{λ,n} on the radius.
        let neg = eisenstein(&sp, KTypeIndex::new(-n), t).unwrap();
        let pos = eisenstein(&sp, k, t).unwrap();
        prop_assert!((neg - pos).norm() < 1e-13 * pos.norm().max(1e-3));
    }

    #[test]
    fn real_spherical_functions_conjugate(l in -10.0f64..10.0, t in 0.0f64..4.0) {
        let a = eisenstein(&SpectralParameter::real(l).unwrap(), KTypeIndex::new(0), t).unwrap();
        let b = eisenstein(&SpectralParameter::real(-l).unwrap(), KTypeIndex::new(0), t).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-13);
        prop_assert!(a.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn plancherel_density_even_nonnegative_and_bounded(l in -100.0f64..100.0) {
        let v = plancherel_density(l);
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v, plancherel_density(-l));
        prop_assert!(v <= 1.0 + l.abs());
    }

    #[test]
    fn q_delta_is_reflected_q(re in -5.0f64..5.0, im in -2.0f64..2.0, n in -4i32..=4) {
        let k = KTypeIndex::new(n);
        let l = c(re, im);
        prop_assert_eq!(q_delta(k, l), q_poly(k, -l));
    }

    #[test]
    fn spatial_projection_recovers_components(
        a0 in -1.0f64..1.0,
        a1 in -1.0f64..1.0,
        a2 in -1.0f64..1.0,
    ) {
        let rule = composite_gauss_legendre(2, 8, 0.0, 4.0).unwrap();
        let g = |t: f64| 1.0 / t.cosh().powi(4);
        let f = PolarSamples::from_fn(&rule, 16, 4.0, move |t, psi| {
            let th = t.tanh();
            c(a0 * g(t), 0.0)
                + Complex64::from_polar(a1 * th * g(t), psi)
                + Complex64::from_polar(a2 * th * th * g(t), 2.0 * psi)
        })
        .unwrap();
        for (n, a, pow) in [(0, a0, 0), (1, a1, 1), (2, a2, 2), (3, 0.0, 0)] {
            let p = delta_project_spatial(&f, KTypeIndex::new(n)).unwrap();
            for &(t, v) in p.samples() {
                let expect = a * t.tanh().powi(pow) * g(t);
                prop_assert!((v - expect).norm() < 1e-14, "n={} t={}: {} vs {}", n, t, v, expect);
            }
        }
    }
}

fn transform_cache() -> &'static horofourier_core::transforms::PlanCache {
    static CACHE: std::sync::OnceLock<horofourier_core::transforms::PlanCache> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| horofourier_core::transforms::PlanCache::new(Default::default()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn forward_transform_is_linear_and_q_delta_even(
        n in 0i32..=3,
        alpha in (-2.0f64..2.0, -2.0f64..2.0),
        beta in (-2.0f64..2.0, -2.0f64..2.0),
        re in 0.0f64..10.0,
        im in -0.8f64..0.8,
    ) {
        use horofourier_core::transforms::{family_profile, RadialProfile};
        let cache = transform_cache();
        let f = family_profile(n, 2.0).unwrap();
        let g = family_profile(n, 3.0).unwrap();
        let (a, b) = (c(alpha.0, alpha.1), c(beta.0, beta.1));
        let h = RadialProfile::linear_combination(a, &f, b, &g).unwrap();
        let plan = cache.get(h.n(), h.kappa()).unwrap();
        let k = KTypeIndex::new(n);
        let l = c(re, im);
        let sp = SpectralParameter::new(l, 1.0).unwrap();
        let hf = plan.forward(&f, &sp).unwrap();
        let hg = plan.forward(&g, &sp).unwrap();
        let hh = plan.forward(&h, &sp).unwrap();
        let scale = (a * hf).norm() + (b * hg).norm() + 1e-12;
        prop_assert!((hh - (a * hf + b * hg)).norm() < 1e-11 * scale);
        prop_assume!(q_delta(k, l).norm() > 0.05 && q_delta(k, -l).norm() > 0.05);
        let minus = plan.forward(&f, &SpectralParameter::new(-l, 1.0).unwrap()).unwrap();
        let (u, v) = (hf / q_delta(k, l), minus / q_delta(k, -l));
        prop_assert!((u - v).norm() < 1e-9 * u.norm().max(1e-6), "{} vs {}", u, v);
    }
}
