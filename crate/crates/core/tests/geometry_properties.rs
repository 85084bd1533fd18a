use adsfront::fixtures::{hopf_torus, perturbed_torus};
use adsfront::frames::{frame_at, frames_along, frenet_residual};
use adsfront::fronts::{focal_point, focal_tangent, front_point, FocalTangentForm, SignChoice};
use adsfront::oracle::{fd_vector, FDScheme};
use adsfront::pseudo_metric::{inner, on_ads};
use adsfront::singularities::{height, sigma, sigma_from, versality_determinant};
use adsfront::{Tolerances, WorldSheet};
use proptest::prelude::*;

fn sheets() -> [WorldSheet; 2] {
    [hopf_torus(), perturbed_torus()]
}

fn sign() -> impl Strategy<Value = SignChoice> {
    prop_oneof![Just(SignChoice::Plus), Just(SignChoice::Minus)]
}

/// Arc-length position given as a fraction of the curve length.
fn arc(curve: &adsfront::MomentaryCurve<'_>, frac: f64) -> f64 {
    let (a, b) = curve.arc_range();
    a + frac * (b - a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_is_pseudo_orthonormal_and_adapted(which in 0usize..2, frac in 0.0f64..1.0, t in -1.0f64..1.0) {
        let tol = Tolerances::default();
        let w = &sheets()[which];
        let c = w.curve(t, &tol).unwrap();
        let f = frame_at(&c, arc(&c, frac), &tol).unwrap();
        prop_assert!(f.gram_residual() <= 1e-10, "{}", f.gram_residual());
        prop_assert!(f.adaptedness() > 0.0);
        let bound = if which == 0 { 1e-9 } else { 1e-7 };
        for r in frenet_residual(&c, arc(&c, frac), &tol).unwrap() {
            prop_assert!(r <= bound, "frenet {}", r);
        }
    }

    #[test]
    fn curvatures_agree_with_defining_products(which in 0usize..2, frac in 0.0f64..1.0, t in -1.0f64..1.0) {
        let tol = Tolerances::default();
        let w = &sheets()[which];
        let c = w.curve(t, &tol).unwrap();
        let s = arc(&c, frac);
        let f = frame_at(&c, s, &tol).unwrap();
        let d = c.symbolic_derivatives(s).unwrap();
        prop_assert!((inner(&d[2], &f.bvec) - f.kappa_g).abs() <= 1e-9);
        prop_assert!((inner(&d[2], &f.nvec) - f.kappa_n).abs() <= 1e-9);
        let (a, b) = c.arc_range();
        let s = s.clamp(a + 0.05, b - 0.05);
        let f = frame_at(&c, s, &tol).unwrap();
        let bs = fd_vector(|x| frame_at(&c, x, &tol).map(|g| g.bvec), s, 1, FDScheme::new(4, 1e-3).unwrap()).unwrap();
        prop_assert!((inner(&bs, &f.nvec) - f.tau_g).abs() <= 1e-7);
    }

    #[test]
    fn front_points_lie_on_ads_and_the_lightcone(
        which in 0usize..2,
        frac in 0.0f64..1.0,
        t in -1.0f64..1.0,
        mu in -3.0f64..3.0,
        sign in sign(),
    ) {
        let tol = Tolerances::default();
        let w = &sheets()[which];
        let c = w.curve(t, &tol).unwrap();
        let s = arc(&c, frac);
        let p = front_point(&c, s, mu, sign, &tol).unwrap();
        prop_assert!(on_ads(&p.point, 1e-8));
        let g = c.point(s).unwrap();
        let d = p.point - g;
        prop_assert!(d.norm_sq().abs() <= 1e-8 * (1.0 + d.euclid_norm().powi(2)));
        let h = height(&c, s, &p.point, &tol).unwrap();
        prop_assert!(h.h.abs() <= 1e-8 && h.dh(1).abs() <= 1e-8, "{:?}", h);
        prop_assert!(front_point(&c, s, 0.0, sign, &tol).unwrap().point.euclid_dist(&g) <= 1e-14);
    }

    #[test]
    fn focal_points_are_degenerate_critical_points(
        which in 0usize..2,
        frac in 0.0f64..1.0,
        t in -1.0f64..1.0,
        sign in sign(),
    ) {
        let tol = Tolerances::default();
        let w = &sheets()[which];
        let c = w.curve(t, &tol).unwrap();
        let s = arc(&c, frac);
        let l = focal_point(&c, s, sign, &tol).unwrap();
        prop_assert!(on_ads(&l.point, 1e-8));
        let h = height(&c, s, &l.point, &tol).unwrap();
        for v in [h.h, h.dh(1), h.dh(2)] {
            prop_assert!(v.abs() <= 1e-8, "{:?}", h);
        }
        let v = versality_determinant(&c, s, sign, None, &tol).unwrap();
        prop_assert!(v.mismatch() <= 1e-6, "{:?}", v);
    }

    #[test]
    fn sigma_agrees_between_frame_and_jet(frac in 0.0f64..1.0, t in -1.0f64..1.0, sign in sign()) {
        let tol = Tolerances::default();
        let w = perturbed_torus();
        let c = w.curve(t, &tol).unwrap();
        let s = arc(&c, frac);
        let f = frame_at(&c, s, &tol).unwrap();
        let a = sigma_from(&f, sign);
        let b = sigma(&c, s, sign, &tol).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn derived_focal_tangent_matches_finite_differences(frac in 0.02f64..0.98, t in -1.0f64..1.0, sign in sign()) {
        let tol = Tolerances::default();
        let w = perturbed_torus();
        let c = w.curve(t, &tol).unwrap();
        let s = arc(&c, frac);
        let f = frame_at(&c, s, &tol).unwrap();
        let fd = fd_vector(|x| focal_point(&c, x, sign, &tol).map(|l| l.point), s, 1, FDScheme::new(4, 1e-3).unwrap()).unwrap();
        let derived = focal_tangent(&f, sign, FocalTangentForm::Derived, &tol).unwrap();
        prop_assert!((derived - fd).euclid_norm() <= 1e-6, "{:?} vs {:?}", derived, fd);
    }
}

#[test]
fn frames_keep_a_continuous_normal() {
    let tol = Tolerances::default();
    for w in sheets() {
        for t in [-1.0, -0.3, 0.4, 1.0] {
            let c = w.curve(t, &tol).unwrap();
            let frames = frames_along(&c, &c.arc_samples(200), &tol).unwrap();
            for pair in frames.windows(2) {
                let (a, b) = (pair[0].data(), pair[1].data());
                assert!(inner(&a.nvec, &b.nvec) > 0.0);
                assert!(inner(&a.bvec, &b.bvec) < 0.0);
            }
        }
    }
}
