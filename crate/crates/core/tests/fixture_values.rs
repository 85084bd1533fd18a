use std::f64::consts::SQRT_2;

use adsfront::caustic_maxwell::{br_caustic_slices, maxwell_slices, MaxwellKind};
use adsfront::fixtures::{hopf_torus, perturbed_torus};
use adsfront::frames::frame_at;
use adsfront::fronts::{focal_curve, front_point, SignChoice};
use adsfront::singularities::{analyze_curve, sigma_roots, versality_determinant, SingularityClass};
use adsfront::{SampleGrid, SemiVector, Tolerances};

/// Length of every momentary curve of the perturbed torus, from adaptive
/// quadrature of the speed in the original parameter.
const PERTURBED_LENGTH: f64 = 6.894578517174366;

#[test]
fn hopf_frame_and_curvatures() {
    let tol = Tolerances::default();
    let w = hopf_torus();
    let c = w.curve(0.0, &tol).unwrap();
    let f = frame_at(&c, 0.0, &tol).unwrap();
    assert!(f.gamma.euclid_dist(&SemiVector([SQRT_2, 0.0, 1.0, 0.0])) <= 1e-14);
    assert!(f.tvec.euclid_dist(&SemiVector([0.0, 0.0, 0.0, 1.0])) <= 1e-14);
    assert!(f.kappa_g.abs() <= 1e-12);
    assert!((f.kappa_n.abs() - SQRT_2).abs() <= 1e-12);
    assert!(f.tau_g.abs() <= 1e-12);
    let p = front_point(&c, 0.0, 1.0, SignChoice::Plus, &tol).unwrap();
    assert!((p.point.norm_sq() + 1.0).abs() <= 1e-12);
}

#[test]
fn hopf_focal_points_are_two_circles() {
    let tol = Tolerances::default();
    let w = hopf_torus();
    for t in [-1.0, 0.0, 0.6] {
        let c = w.curve(t, &tol).unwrap();
        for sign in SignChoice::BOTH {
            let fc = focal_curve(&c, sign, 32, &tol).unwrap();
            assert!(fc.gaps.is_empty());
            let first = fc.samples[0].point;
            assert!((first.0[0].hypot(first.0[1]) - 1.0).abs() <= 1e-12);
            assert!(first.0[2].abs() <= 1e-12 && first.0[3].abs() <= 1e-12);
            for s in &fc.samples {
                assert!(s.point.euclid_dist(&first) <= 1e-12);
            }
            let r = analyze_curve(&c, sign, 32, &tol).unwrap();
            assert_eq!(r.count(SingularityClass::ConstantFocal), r.entries.len());
        }
    }
    let v = versality_determinant(&w.curve(0.0, &tol).unwrap(), 0.0, SignChoice::Plus, None, &tol).unwrap();
    assert!((v.det.abs() - SQRT_2).abs() <= 1e-7);
}

#[test]
fn perturbed_length_and_swallowtails() {
    let tol = Tolerances::default();
    let w = perturbed_torus();
    for t in [-1.0, 0.0, 0.5] {
        let c = w.curve(t, &tol).unwrap();
        assert!((c.length() - PERTURBED_LENGTH).abs() <= 1e-9);
        for sign in SignChoice::BOTH {
            let roots = sigma_roots(&c, sign, 256, &tol).unwrap();
            let mut got: Vec<f64> = roots.iter().map(|r| r.s.rem_euclid(PERTURBED_LENGTH)).collect();
            got.sort_by(f64::total_cmp);
            got.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            if got.len() == 5 && (got[4] - PERTURBED_LENGTH).abs() < 1e-6 {
                got.pop();
            }
            assert_eq!(got.len(), 4, "{got:?}");
            for (k, s) in got.iter().enumerate() {
                assert!((s - k as f64 * PERTURBED_LENGTH / 4.0).abs() <= 1e-8, "{got:?}");
            }
            let r = analyze_curve(&c, sign, 256, &tol).unwrap();
            assert_eq!(r.count(SingularityClass::Swallowtail), 4);
            assert_eq!(r.count(SingularityClass::CuspidalEdge) + 4, r.entries.len());
        }
    }
}

#[test]
fn perturbed_root_set_has_half_turn_symmetry() {
    let tol = Tolerances::default();
    let w = perturbed_torus();
    let c = w.curve(0.0, &tol).unwrap();
    let half = PERTURBED_LENGTH / 2.0;
    for sign in SignChoice::BOTH {
        let roots: Vec<f64> = sigma_roots(&c, sign, 256, &tol).unwrap().iter().map(|r| r.s).collect();
        for &r in &roots {
            let shifted = (r + half).rem_euclid(PERTURBED_LENGTH);
            let hit = roots
                .iter()
                .any(|&q| ((q - shifted + half).rem_euclid(PERTURBED_LENGTH) - half).abs() <= 1e-8);
            assert!(hit, "{r} has no partner in {roots:?}");
        }
    }
}

#[test]
fn caustic_has_no_gaps_on_either_fixture() {
    let tol = Tolerances::default();
    for w in [hopf_torus(), perturbed_torus()] {
        let c = br_caustic_slices(&w, &[-0.5, 0.5], 64, &SignChoice::BOTH, &tol).unwrap();
        assert_eq!(c.samples.len(), 2 * 2 * 64);
        assert!(c.gaps.is_empty());
        assert!(c.max_residual <= 1e-8);
    }
}

#[test]
fn maxwell_samples_are_true_coincidences_and_deterministic() {
    let tol = Tolerances::default();
    let w = perturbed_torus();
    let grid = SampleGrid {
        n_s: 64,
        n_mu: 64,
        ..SampleGrid::default()
    };
    let ts = [-0.4, 0.3];
    let a = maxwell_slices(&w, &ts, &grid, &SignChoice::BOTH, &tol).unwrap();
    let b = maxwell_slices(&w, &ts, &grid, &SignChoice::BOTH, &tol).unwrap();
    assert_eq!(a, b);
    assert!(!a.samples.is_empty());
    assert!(a.samples.iter().any(|s| s.kind == MaxwellKind::SameSheet));
    for m in &a.samples {
        let c = w.curve(m.t, &tol).unwrap();
        let [p, q] = m.preimages;
        let x = front_point(&c, p.s, p.mu, p.sign, &tol).unwrap().point;
        let y = front_point(&c, q.s, q.mu, q.sign, &tol).unwrap().point;
        assert!(x.euclid_dist(&y) <= grid.refine_tol, "{m:?}");
        assert!(x.euclid_dist(&m.point) <= grid.refine_tol);
    }
}

#[test]
fn focal_displacement_is_along_b_plus_minus_n() {
    use adsfront::singularities::height;
    let tol = Tolerances::default();
    let w = perturbed_torus();
    let c = w.curve(0.3, &tol).unwrap();
    let (mut along_n, mut along_t) = (0.0f64, f64::INFINITY);
    for s in c.arc_samples(16) {
        let f = frame_at(&c, s, &tol).unwrap();
        for sign in SignChoice::BOTH {
            let e = sign.eps();
            let kappa = f.kappa_g + e * f.kappa_n;
            let n_form = f.gamma + (1.0 / kappa) * (f.bvec + e * f.nvec);
            let t_form = f.gamma + (1.0 / kappa) * (f.bvec + e * f.tvec);
            let hn = height(&c, s, &n_form, &tol).unwrap();
            let ht = height(&c, s, &t_form, &tol).unwrap();
            along_n = along_n.max(hn.h.abs()).max(hn.dh(1).abs()).max(hn.dh(2).abs());
            along_t = along_t.min(ht.h.abs().max(ht.dh(1).abs()).max(ht.dh(2).abs()));
        }
    }
    assert!(along_n <= 1e-12, "{along_n}");
    assert!(along_t >= 1e-2, "{along_t}");
}
