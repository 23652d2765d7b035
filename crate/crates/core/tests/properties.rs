//! Randomized invariants of the core objects.

use std::f64::consts::{PI, TAU};

use hbspace::model::{self, ExtensionParams};
use hbspace::{isometry, lattice, spectral, HbSpace, Poly, RationalFn, Settings, Truncation, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_deg + 1)
        .prop_map(|v| Poly::new(v.into_iter().map(|(re, im)| c(re, im)).collect()))
        .prop_filter("nonzero", |p| p.max_abs() > 1e-3)
}

/// `r p / ‖p‖₁`, so `sup |b| <= r < 1` on the circle.
fn interior_b() -> impl Strategy<Value = RationalFn> {
    (poly(3), 0.1..0.9f64).prop_map(|(p, r)| {
        let l1: f64 = p.coeffs().iter().map(|x| x.norm()).sum();
        RationalFn::from_poly(p.scale_real(r / l1))
    })
}

/// Brownian shifts and the first two model spaces, all with `b(1) = 1`.
fn boundary_b() -> impl Strategy<Value = RationalFn> {
    prop_oneof![
        (0.3..3.0f64).prop_map(|s| model::brownian_shift_b(s).unwrap()),
        (0.2..2.0f64, 0.2..2.0f64, 0.5..2.5f64).prop_map(|(re, im, t)| {
            let steps = [ExtensionParams::new(c(1.0, 0.0), PI), ExtensionParams::new(c(re, im), t)];
            model::build_model(&steps, false, &Settings::default()).unwrap().b
        }),
    ]
}

fn any_b() -> impl Strategy<Value = RationalFn> {
    prop_oneof![interior_b(), boundary_b()]
}

fn disk_point() -> impl Strategy<Value = C64> {
    (0.0..0.9f64, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn space(b: RationalFn) -> HbSpace {
    HbSpace::new(b, Settings::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn backward_shift_undoes_shift(p in poly(8)) {
        prop_assert_eq!(p.shift().backward_shift(), p);
    }

    #[test]
    fn mate_is_outer_and_pythagorean(b in any_b(), seed in any::<u64>()) {
        let s = Settings::with_seed(seed);
        let m = spectral::pythagorean_mate(&b, &s).unwrap();
        prop_assert!(m.residual < 1e-9);
        prop_assert!(m.a.eval(c(0.0, 0.0)).re > 0.0);
        prop_assert!(spectral::interior_zeros(m.a.num(), &s).unwrap().is_empty());
        // Does not depend on the root finder's seed.
        let other = spectral::pythagorean_mate(&b, &Settings::default()).unwrap();
        for z in spectral::circle_grid(64) {
            prop_assert!((m.a.eval(z * 0.9) - other.a.eval(z * 0.9)).norm() < 1e-8);
        }
    }

    #[test]
    fn plus_function_solves_its_system(b in any_b(), f in poly(10)) {
        let sp = space(b);
        let fp = sp.plus_function(&f).unwrap();
        prop_assert!(sp.plus_residual(&f, &fp) < 1e-12);
    }

    #[test]
    fn gram_is_hermitian_positive_and_consistent(b in any_b(), n in 1usize..8) {
        let sp = space(b);
        let g = sp.gram_matrix(n).unwrap();
        prop_assert!((&g - g.adjoint()).camax() < 1e-12 * g.camax());
        prop_assert!(g.clone().cholesky().is_some());
        let (j, k) = (n / 2, n - 1);
        let ip = sp.inner_product(&Poly::monomial(k), &Poly::monomial(j)).unwrap();
        prop_assert!((g[(j, k)] - ip).norm() < 1e-12 * g.camax());
    }

    #[test]
    fn norm_dominates_h2(b in any_b(), f in poly(8)) {
        let sp = space(b);
        prop_assert!(sp.norm_sq(&f).unwrap() >= f.norm_sq() * (1.0 - 1e-12));
    }

    #[test]
    fn kernel_diagonal_is_nonnegative(b in any_b(), l in disk_point(), z in disk_point()) {
        let sp = space(b.clone());
        let d = sp.kernel(l, l).unwrap();
        prop_assert!(d.re >= 0.0 && d.im.abs() < 1e-14);
        let expect = (1.0 - b.eval(l).norm_sqr()) / (1.0 - l.norm_sqr());
        prop_assert!((d.re - expect).abs() < 1e-12);
        // Hermitian symmetry K_λ(z) = conj(K_z(λ)).
        prop_assert!((sp.kernel(l, z).unwrap() - sp.kernel(z, l).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn reproducing_with_auto_truncation(b in any_b(), l in disk_point(), f in poly(6)) {
        let sp = space(b);
        let k = sp.truncate(&sp.kernel_fn(l).unwrap(), Truncation::auto()).unwrap();
        let v = sp.inner_product(&f, &k.poly).unwrap();
        prop_assert!((v - f.eval(l)).norm() < 1e-10, "{} vs {}", v, f.eval(l));
    }

    #[test]
    fn rank_one_identity(b in any_b(), seed in any::<u64>()) {
        prop_assert!(isometry::rank_one_identity_check(&space(b), 4, seed).unwrap() < 1e-9);
    }

    #[test]
    fn defect_recursion(b in any_b(), f in poly(5), g in poly(5), m in 1usize..5) {
        let sp = space(b);
        let scale = sp.norm_sq(&f.shift_by(m + 1)).unwrap().max(sp.norm_sq(&g.shift_by(m + 1)).unwrap());
        prop_assert!(isometry::recursion_residual(&sp, &f, &g, m).unwrap() < 1e-11 * scale * (1 << m) as f64);
    }

    #[test]
    fn inner_outer_splits(p in poly(4)) {
        let f = RationalFn::from_poly(p);
        let s = Settings::default();
        let (inner, outer) = spectral::inner_outer(&f, &s).unwrap();
        for z in spectral::circle_grid(32) {
            prop_assert!((inner.eval(z).norm() - 1.0).abs() < 1e-9);
        }
        let z = c(0.3, -0.2);
        prop_assert!((inner.eval(z) * outer.eval(z) - f.eval(z)).norm() < 1e-9 * f.num().max_abs());
        prop_assert!(spectral::interior_zeros(outer.num(), &s).unwrap().is_empty());
    }

    #[test]
    fn extension_certificates(b0 in boundary_b(), re in -2.0..2.0f64, im in -2.0..2.0f64, t in 0.3..(TAU - 0.3)) {
        prop_assume!(re.hypot(im) > 0.05);
        let s = Settings::default();
        let b0 = model::mobius_normalize(&b0, b0.eval(c(0.0, 0.0)), &s).unwrap();
        let ext = model::extend(&b0, ExtensionParams::new(c(re, im), t), &s).unwrap();
        prop_assert!(ext.certificate.deviation() < 1e-8);
        prop_assert!(ext.s > 0.0 && ext.s < 1.0);
        prop_assert_eq!(ext.b_t.degree(), b0.degree() + 1);
        prop_assert!(model::kernel_factorization_check(&ext, 20, 5) < 1e-8);
    }

    #[test]
    fn extension_rejects_forbidden_phase(sigma in 0.3..3.0f64, re in 0.1..2.0f64) {
        let b0 = model::brownian_shift_b(sigma).unwrap();
        let s = Settings::default();
        let t0 = model::forbidden_phase(&b0, &s).unwrap();
        let r = model::extend(&b0, ExtensionParams::new(c(re, 0.0), t0), &s);
        let forbidden = matches!(r, Err(hbspace::HbError::ForbiddenPhase { .. }));
        prop_assert!(forbidden);
    }

    #[test]
    fn mobius_keeps_isometry_order(sigma in 0.3..3.0f64, alpha in disk_point()) {
        let s = Settings::default();
        let b = model::brownian_shift_b(sigma).unwrap();
        let ba = model::mobius_normalize(&b, alpha * 0.8, &s).unwrap();
        let before = isometry::isometry_order(&space(b), 4, 8).unwrap().map(|o| o.0);
        let after = isometry::isometry_order(&space(ba), 4, 8).unwrap().map(|o| o.0);
        prop_assert_eq!(before, Some(2));
        prop_assert_eq!(after, before);
    }

    #[test]
    fn rotation_moves_boundary_zero(sigma in 0.3..3.0f64, t in 0.0..TAU) {
        let lambda = C64::from_polar(1.0, t);
        let sp = space(model::rotate(&model::brownian_shift_b(sigma).unwrap(), lambda));
        let bz = sp.boundary_zeros();
        prop_assert_eq!(bz.len(), 1);
        prop_assert!((bz[0].lambda - lambda).norm() < 1e-6);
        // (T* - conj(point)) kills the defect vector.
        let r = isometry::annihilation_check(&sp, bz[0].lambda.conj(), 1, 6).unwrap();
        prop_assert!(r[1] < 1e-9 && r[0] > 1e-3);
    }

    #[test]
    fn boundary_derivative_kernels_reproduce(b in boundary_b(), f in poly(6)) {
        let sp = space(b);
        let bz = sp.boundary_zeros()[0];
        for i in 0..bz.mult {
            let k = sp.kernel_derivative(bz.lambda, i).unwrap();
            let k = sp.truncate(&k, Truncation::auto()).unwrap();
            let v = sp.inner_product(&f, &k.poly).unwrap();
            let expect = RationalFn::from_poly(f.clone()).derivative_at(bz.lambda, i);
            prop_assert!((v - expect).norm() < 1e-8 * (1.0 + expect.norm()), "i = {}: {} vs {}", i, v, expect);
        }
    }

    #[test]
    fn principal_angles_of_a_span_with_itself(b in any_b(), f in poly(3), k in 1usize..5) {
        let sp = space(b);
        prop_assert!(lattice::orbit_gap(&sp, &f, &f, k, k).unwrap() < 1e-6);
    }

    #[test]
    fn classification_is_stable_under_outer_factors(b in boundary_b(), r in 1.5..3.0f64, t in 0.0..TAU) {
        let sp = space(b);
        let lambda = sp.boundary_zeros()[0].lambda;
        let f = RationalFn::from_poly(Poly::linear(lambda));
        let g = f.mul_poly(&Poly::linear(C64::from_polar(r, t)));
        let (df, dg) = (lattice::classify(&sp, &f).unwrap(), lattice::classify(&sp, &g).unwrap());
        prop_assert_eq!(df.boundary_orders[0].j, dg.boundary_orders[0].j);
        prop_assert_eq!(df.theta_zeros.len(), dg.theta_zeros.len());
        prop_assert!(!lattice::is_cyclic(&sp, &g).unwrap().cyclic);
    }
}
