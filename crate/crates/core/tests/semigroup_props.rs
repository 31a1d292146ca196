mod common;

use common::*;
use loglab_core::field::phi_forward;
use loglab_core::grid::LogRadialGrid;
use loglab_core::norms::{lp_integral_rn, lq_norm_line, RadialWeight};
use loglab_core::semigroup::{evolve, evolve_derivative, evolve_l_star_l, Method, SemigroupQuery};
use loglab_core::special::smoothing_linf_constant;
use proptest::prelude::*;
use std::f64::consts::PI;

fn query(t: f64, m: Method) -> SemigroupQuery {
    SemigroupQuery::new(t, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn semigroup_law(u in unit_point(6), i in 0usize..3, j in 0usize..3) {
        let times = [0.05, 0.2, 1.0];
        let (t1, t2) = (times[i], times[j]);
        // P_{t₁+t₂} spreads by √(2(t₁+t₂)) ≈ 2, so the grid leaves room for the tails
        let g = gaussian_sum_on(LogRadialGrid::symmetric(20.0, 4096).unwrap(), &u);
        let m = Method::FastConvolution;
        let once = evolve(&g, &query(t1 + t2, m)).unwrap();
        let twice = evolve(&evolve(&g, &query(t2, m)).unwrap(), &query(t1, m)).unwrap();
        prop_assert!(once.max_distance(&twice) <= 1e-8 * g.max_abs());
    }

    #[test]
    fn positivity_and_max_principle(u in unit_point(6), t in 0.01f64..2.0, direct in any::<bool>()) {
        let g = gaussian_sum(&u);
        let m = if direct { Method::Direct } else { Method::FastConvolution };
        let out = evolve(&g, &query(t, m)).unwrap();
        let top = g.max_abs();
        for z in out.values() {
            prop_assert!(z.re >= -1e-12 * top);
            prop_assert!(z.norm() <= top * (1.0 + 1e-12));
        }
    }

    #[test]
    fn l2_contraction(n in 1usize..=4, u in unit_point(8), t in 0.01f64..1.0) {
        let f = mixture(n, n as f64 / 2.0, &u);
        let q = query(t, Method::FastConvolution);
        let g = phi_forward(&f).unwrap();
        let before = g.l2_norm();
        prop_assert!(evolve(&g, &q).unwrap().l2_norm() <= before * (1.0 + 1e-12));
        // ‖e^{-tL*L}f‖ ≤ e^{-tn²/4}‖f‖
        let out = evolve_l_star_l(&f, &q).unwrap();
        let lhs = lp_integral_rn(&out, 2.0, RadialWeight::One).unwrap().sqrt();
        let rhs = (-t * (n * n) as f64 / 4.0).exp() * lp_integral_rn(&f, 2.0, RadialWeight::One).unwrap().sqrt();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10));
    }

    #[test]
    fn smoothing_bounds(u in unit_point(6), pi in 0usize..3, t in 0.02f64..2.0) {
        let p = [1.0, 2.0, 4.0][pi];
        let g = gaussian_sum(&u);
        let q = query(t, Method::FastConvolution);
        let norm = lq_norm_line(&g, p).unwrap();
        let sup = evolve(&g, &q).unwrap().max_abs();
        prop_assert!(sup <= smoothing_linf_constant(p) * t.powf(-0.5 / p) * norm * (1.0 + 1e-9));
        let deriv = lq_norm_line(&evolve_derivative(&g, &q).unwrap(), p).unwrap();
        prop_assert!(deriv <= (PI * t).powf(-0.5) * norm * (1.0 + 1e-9));
    }

    #[test]
    fn evolution_commutes_with_spherical_mean(u in unit_point(3), t in 0.05f64..1.0) {
        use loglab_core::extremal::{FamilyKind, TrialFamily};
        let fam = TrialFamily::new(FamilyKind::PerturbedRadial { power: 1.5 }, 3).unwrap();
        let g = phi_forward(&fam.generate(&fam.from_unit(&u)).unwrap()).unwrap();
        let q = query(t, Method::FastConvolution);
        let a = evolve(&g, &q).unwrap().spherical_mean().unwrap();
        let b = evolve(&g.spherical_mean().unwrap(), &q).unwrap();
        prop_assert!(a.max_distance(&b) <= 1e-12 * b.max_abs().max(1e-300));
    }
}

#[test]
fn methods_agree_on_random_profiles() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let u: Vec<f64> = (0..6).map(|_| rng.gen()).collect();
        let g = gaussian_sum(&u);
        for t in [0.01, 0.1, 1.0] {
            let fast = evolve(&g, &query(t, Method::FastConvolution)).unwrap();
            for m in [Method::Direct, Method::MellinMultiplier] {
                assert!(evolve(&g, &query(t, m)).unwrap().max_distance(&fast) <= 1e-8, "{m:?} {t}");
            }
        }
    }
}
