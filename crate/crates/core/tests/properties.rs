use multipolar_hardy::comparison::{laplace_comparison_check, BoundSide};
use multipolar_hardy::curvature::{ct_c, d_c, d_c_lower_bound, r_ij_correction, s_c};
use multipolar_hardy::geometry::{cosine_law_vertex_angle, AxiGrid, GeodesicBump, GridResolution, Region};
use multipolar_hardy::hardy::{verify_theorem1, weight_bipolar_curved, weight_pairwise_gradient};
use multipolar_hardy::{Curvature, ModelSpace, PoleSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn curv(c: f64) -> Curvature {
    Curvature::new(c).unwrap()
}

fn sampling_radius(c: f64) -> f64 {
    if c > 0.0 {
        (0.4 * std::f64::consts::PI / c.sqrt()).min(1.0)
    } else {
        1.0
    }
}

proptest! {
    #[test]
    fn s_c_scaling_law(c in -4.0f64..4.0, r in 0.01f64..1.0, lam in 0.2f64..5.0) {
        let lhs = s_c(curv(c), r).unwrap();
        let rhs = s_c(curv(c / (lam * lam)), lam * r).unwrap() / lam;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
    }

    #[test]
    fn s_c_derivative_identity(c in -4.0f64..4.0, r in 0.05f64..1.0) {
        let k = curv(c);
        let h = 1e-6;
        let fd = (s_c(k, r + h).unwrap() - s_c(k, r - h).unwrap()) / (2.0 * h);
        let exact = s_c(k, r).unwrap() * ct_c(k, r).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
    }

    #[test]
    fn r_ij_symmetric(k0 in -4.0f64..0.0, di in 0.01f64..10.0, dj in 0.01f64..10.0) {
        let a = r_ij_correction(curv(k0), di, dj).unwrap();
        let b = r_ij_correction(curv(k0), dj, di).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a >= -1e-12 * (1.0 / (di * di) + 1.0 / (dj * dj)));
    }

    #[test]
    fn d_c_dominates_bound(c in -4.0f64..-0.01, r in 1e-3f64..20.0) {
        let k = curv(c);
        prop_assert!(d_c(k, r).unwrap() >= d_c_lower_bound(k, r));
    }

    #[test]
    fn distance_metric_axioms(c in prop::sample::select(vec![-2.0, -1.0, 0.0, 1.0, 3.0]), seed in any::<u64>()) {
        let s = ModelSpace::new(3, curv(c)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = s.base_point();
        let rad = sampling_radius(c);
        let x = s.random_point(&mut rng, &base, rad);
        let y = s.random_point(&mut rng, &base, rad);
        let z = s.random_point(&mut rng, &base, rad);
        let dxy = s.distance(&x, &y).unwrap();
        prop_assert!((dxy - s.distance(&y, &x).unwrap()).abs() <= 1e-12 * dxy.max(1.0));
        prop_assert!(s.distance(&x, &z).unwrap() <= dxy + s.distance(&y, &z).unwrap() + 1e-12);
    }

    #[test]
    fn eikonal_and_exp_log(c in prop::sample::select(vec![-2.0, -1.0, 0.0, 1.0, 3.0]), seed in any::<u64>()) {
        let s = ModelSpace::new(4, curv(c)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = s.base_point();
        let rad = sampling_radius(c);
        let x = s.random_point(&mut rng, &base, rad);
        let y = s.random_point(&mut rng, &base, rad);
        let g = s.grad_distance(&x, &y).unwrap();
        prop_assert!((s.norm(&g) - 1.0).abs() <= 1e-10);
        let back = s.exp(&x, &s.log_map(&x, &y).unwrap()).unwrap();
        prop_assert!(s.distance(&back, &y).unwrap() <= 1e-9);
    }

    #[test]
    fn angle_matches_cosine_law(c in prop::sample::select(vec![-1.0, 0.0, 1.0]), seed in any::<u64>()) {
        let s = ModelSpace::new(3, curv(c)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = s.base_point();
        let rad = sampling_radius(c);
        let x = s.random_point(&mut rng, &base, rad);
        let a = s.random_point(&mut rng, &base, rad);
        let b = s.random_point(&mut rng, &base, rad);
        let (da, db, dab) = (s.distance(&x, &a).unwrap(), s.distance(&x, &b).unwrap(), s.distance(&a, &b).unwrap());
        prop_assume!(da > 1e-3 && db > 1e-3 && dab > 1e-3);
        let direct = s.vertex_angle(&x, &a, &b).unwrap();
        let law = cosine_law_vertex_angle(s.curvature(), da, db, dab).unwrap();
        prop_assert!((direct - law).abs() <= 1e-9);
    }

    #[test]
    fn comparison_angle_monotone_in_curvature(a in 0.1f64..0.9, b in 0.1f64..0.9, t in 0.05f64..0.95) {
        // third side strictly between |a-b| and a+b in every target curvature
        let e = (a - b).abs() + t * (a + b - (a - b).abs());
        let mut last = f64::NEG_INFINITY;
        for &c in &[-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 2.0] {
            let Ok(g) = cosine_law_vertex_angle(curv(c), a, b, e) else { continue };
            prop_assert!(g >= last - 1e-12);
            last = g;
        }
    }

    #[test]
    fn pairwise_weight_dominates_curved(c in prop::sample::select(vec![-1.0, 0.0, 1.0]), k0 in -4.0f64..0.0, seed in any::<u64>()) {
        prop_assume!(k0 <= c);
        let s = ModelSpace::new(3, curv(c)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = s.base_point();
        let rad = sampling_radius(c);
        let x = s.random_point(&mut rng, &base, rad);
        let p = s.random_point(&mut rng, &base, rad);
        let q = s.random_point(&mut rng, &base, rad);
        prop_assume!(s.distance(&x, &p).unwrap() > 1e-3 && s.distance(&x, &q).unwrap() > 1e-3);
        let wp = weight_pairwise_gradient(&s, &x, &p, &q).unwrap();
        let wc = weight_bipolar_curved(&s, &x, &p, &q, curv(k0)).unwrap();
        prop_assert!(wp >= wc - 1e-10 * (1.0 + wp));
        prop_assert!((wp - weight_pairwise_gradient(&s, &x, &q, &p).unwrap()).abs() <= 1e-12 * (1.0 + wp));
    }

    #[test]
    fn laplace_comparison_ordered(c in -3.0f64..1.0, gap in 0.0f64..2.0) {
        let grid: Vec<f64> = (1..200).map(|k| k as f64 * 0.015).collect();
        let upper = laplace_comparison_check(3, curv(c), curv(c + gap), BoundSide::Upper, &grid).unwrap();
        prop_assert!(upper.pass);
        let lower = laplace_comparison_check(3, curv(c + gap), curv(c), BoundSide::Lower, &grid).unwrap();
        prop_assert!(lower.pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn euclidean_scaling_covariance(lam in 0.3f64..3.0, sep in 0.3f64..1.0) {
        let s = ModelSpace::euclidean(3).unwrap();
        let res = GridResolution { n_r: 96, n_theta: 48 };
        let margin = |l: f64| {
            let poles = PoleSet::on_axis(s, &[-0.5 * sep * l, 0.5 * sep * l]).unwrap();
            let bump = GeodesicBump::new(s.base_point(), 1.5 * l, 1.0);
            let grid = AxiGrid::build(s, &poles, Region::Ball { radius: 1.6 * l }, res, None).unwrap();
            let r = verify_theorem1(&poles, &bump, &grid).unwrap();
            (r.relative_margin, r.tol / r.lhs)
        };
        let (m1, t1) = margin(1.0);
        let (ml, tl) = margin(lam);
        prop_assert!((m1 - ml).abs() <= 10.0 * (t1 + tl), "{m1} vs {ml}");
    }
}
