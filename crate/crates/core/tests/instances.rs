mod common;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

use pifo_bounds::instances::{avg_c_eps_limit, c_eps_limit, nc_alpha, nc_gap_bound, InstanceDoc};
use pifo_bounds::nonconvex::{gamma, GAMMA_LOWER_CURVATURE};
use pifo_bounds::probe::average_smoothness_pairs;
use pifo_bounds::{
    certificate, component_gradient, component_prox, full_gradient, full_value, make_avg_c, make_avg_sc, make_c,
    make_nc, make_one_d, make_sc, minimizer, restricted_gap, restricted_min, restricted_min_distance,
    restricted_minimizer, Error, Family, HardInstance,
};

use common::*;

fn quadratic_instances() -> Vec<HardInstance> {
    vec![
        make_sc(10.0, 1.0, 4, 1.0, 1e-4).unwrap(),
        make_sc(50.0, 1.0, 5, 2.0, 1e-6).unwrap(),
        make_sc(3.0, 1.5, 2, 1.0, 1e-3).unwrap(),
        make_c(1.0, 1.0, 4, 1e-5).unwrap(),
        make_c(3.0, 2.0, 3, 1e-3).unwrap(),
        make_avg_sc(40.0, 1.0, 6, 1.0, 1e-6).unwrap(),
        make_avg_c(1.0, 1.0, 6, 1e-5).unwrap(),
    ]
}

fn average_hessian(inst: &HardInstance) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(inst.m, inst.m);
    for i in 1..=inst.n {
        h += dense_hessian(inst, i) / inst.n as f64;
    }
    h
}

#[test]
fn closed_form_minimizers_match_dense_solves() {
    for inst in quadratic_instances() {
        let (x, f) = minimizer(&inst).unwrap();
        let dense = dense_minimizer(&inst);
        assert!(rel_err(&x, dense.as_slice()) <= 1e-9, "{}", inst.family);
        let fx = full_value(&inst, &x).unwrap();
        assert!((fx - f).abs() <= 1e-9 * f.abs(), "{}: {fx} vs {f}", inst.family);
        assert!((dense_full_value(&inst, &dense) - f).abs() <= 1e-9 * f.abs());
        let g = full_gradient(&inst, &x).unwrap();
        assert!(norm(&g) <= 1e-9 * (1.0 + max_abs(&x)), "{}: |grad| = {:e}", inst.family, norm(&g));
    }
}

#[test]
fn small_sc_matches_dense() {
    // smallest admissible dimension
    let inst = make_sc(3.0, 1.0, 2, 1.0, 3e-3).unwrap();
    assert!(inst.m <= 3, "m = {}", inst.m);
    let (x, f) = minimizer(&inst).unwrap();
    assert!(rel_err(&x, dense_minimizer(&inst).as_slice()) <= 1e-9);
    assert!((f + 1.0).abs() <= 1e-12);
}

#[test]
fn optimal_values() {
    let sc = make_sc(50.0, 1.0, 5, 2.0, 1e-6).unwrap();
    assert_eq!(minimizer(&sc).unwrap().1, -2.0);
    let c = make_c(1.0, 1.0, 4, 1e-5).unwrap();
    let expect = -(c.m as f64) * c.s.xi * c.s.xi / (c.n as f64 * c.s.l);
    assert!((minimizer(&c).unwrap().1 - expect).abs() <= 1e-15 * expect.abs());
    let xi = 3f64.sqrt() / 2.0 * c.s.bdist * c.s.l / ((c.m + 1) as f64).powf(1.5);
    assert!((c.s.xi - xi).abs() <= 1e-15 * xi);
}

#[test]
fn restricted_gaps_match_dense() {
    for inst in quadratic_instances() {
        let m = inst.m;
        let h = average_hessian(&inst);
        let xstar = dense_minimizer(&inst);
        for k in [1, m / 2, m - 1] {
            let d = dense_restricted_minimizer(&inst, k) - &xstar;
            let dense = 0.5 * d.dot(&(&h * &d));
            let gap = restricted_gap(&inst, k).unwrap();
            assert!(((gap - dense) / dense).abs() <= 1e-9, "{} k = {k}: {gap} vs {dense}", inst.family);
            let xk = restricted_minimizer(&inst, k).unwrap();
            assert!(rel_err(&xk, dense_restricted_minimizer(&inst, k).as_slice()) <= 1e-9);
        }
        assert_eq!(restricted_gap(&inst, m).unwrap(), 0.0);
        assert!(restricted_gap(&inst, m + 1).is_err());
    }
}

#[test]
fn sc_gap_dominates_geometric_decay() {
    for inst in quadratic_instances().into_iter().filter(|i| i.family.is_strongly_convex()) {
        for k in 0..inst.m {
            let q2k = inst.s.q.powi(2 * k as i32);
            assert!(restricted_gap(&inst, k).unwrap() >= inst.s.delta * q2k);
        }
    }
}

#[test]
fn c_gap_is_affine_in_k() {
    let inst = make_c(2.0, 3.0, 4, 1e-4).unwrap();
    let slope = inst.s.xi * inst.s.xi / (inst.n as f64 * inst.s.l);
    for k in 0..inst.m {
        let diff = restricted_gap(&inst, k).unwrap() - restricted_gap(&inst, k + 1).unwrap();
        assert!((diff - slope).abs() <= 1e-12 * slope);
    }
}

#[test]
fn restricted_min_nonincreasing() {
    for inst in quadratic_instances() {
        let values: Vec<f64> = (0..=inst.m).map(|k| restricted_min(&inst, k).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0]), "{}", inst.family);
    }
}

#[test]
fn restricted_distances() {
    for inst in quadratic_instances().into_iter().filter(|i| i.family.is_strongly_convex()) {
        let (x, _) = minimizer(&inst).unwrap();
        let m = inst.m;
        for k in 0..=m {
            // the closest point of F_k copies the last k coordinates of x*
            let direct: f64 = x[..m - k].iter().map(|v| v * v).sum();
            let d = restricted_min_distance(&inst, k).unwrap();
            assert!((d - direct).abs() <= 1e-10 * (1.0 + direct), "k = {k}");
        }
        assert_eq!(restricted_min_distance(&inst, m).unwrap(), 0.0);
        let cert = certificate(&inst, inst.s.eps).unwrap();
        if cert.depth <= m / 2 {
            let ratio = restricted_min_distance(&inst, cert.depth).unwrap() / restricted_min_distance(&inst, 0).unwrap();
            assert!(ratio >= inst.s.q.powi(2 * cert.depth as i32) / 2.0);
        }
    }
    assert!(restricted_min_distance(&make_c(1.0, 1.0, 4, 1e-5).unwrap(), 1).is_err());
}

#[test]
fn boundary_condition_number_gives_sqrt_two() {
    for n in [2, 4, 10] {
        let nf = n as f64;
        let inst = make_sc(nf / 2.0 + 1.0, 1.0, n, 1.0, 1e-6).unwrap();
        let r2 = 2f64.sqrt();
        assert!((inst.s.alpha - r2).abs() <= 1e-15);
        assert!((inst.s.q - (r2 - 1.0) / (r2 + 1.0)).abs() <= 1e-15);
    }
}

#[test]
fn sc_constructor_rejects_small_condition_number() {
    match make_sc(2.0, 1.0, 4, 1.0, 1e-4) {
        Err(Error::ParameterDomain { condition, .. }) => assert!(condition.contains("n/2 + 1")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(make_sc(10.0, 1.0, 4, 1.0, 0.1), Err(Error::ParameterDomain { .. })));
    assert!(matches!(make_sc(10.0, 1.0, 1, 1.0, 1e-4), Err(Error::ParameterDomain { .. })));
}

#[test]
fn component_spectra_within_declared_constants() {
    for inst in quadratic_instances() {
        let l = inst.declared_smoothness();
        for i in 1..=inst.n {
            let eig = SymmetricEigen::new(dense_hessian(&inst, i)).eigenvalues;
            assert!(eig.max() <= l * (1.0 + 1e-12), "{}: {} > {l}", inst.family, eig.max());
            assert!(eig.min() >= inst.s.mu - 1e-12);
        }
        let avg = SymmetricEigen::new(average_hessian(&inst)).eigenvalues;
        assert!(avg.min() >= inst.s.mu - 1e-12);
    }
}

#[test]
fn average_smooth_mappings() {
    for (lavg, mu, n) in [(40.0, 1.0, 6), (10.0, 0.5, 4), (100.0, 1.0, 32)] {
        let inst = make_avg_sc(lavg, mu, n, 1.0, 1e-6).unwrap();
        let nf = n as f64;
        let l = inst.s.l;
        assert!((nf / 3.0).sqrt() * lavg <= l * (1.0 + 1e-12) && l <= (nf / 2.0).sqrt() * lavg);
        assert!(l / mu >= nf / 2.0 + 1.0 - 1e-12);
        // L' = 2 sqrt((4/n)[(λ₁+λ₂)² + λ₁²] + λ₂²)
        let (l1, l2) = (inst.s.lambda1, inst.s.lambda2);
        let lprime = 2.0 * ((4.0 / nf) * ((l1 + l2).powi(2) + l1 * l1) + l2 * l2).sqrt();
        assert!((lprime - lavg).abs() <= 1e-10 * lavg);
        let probe = average_smoothness_pairs(&inst, 1000, 11).unwrap();
        assert!(probe <= lavg * (1.0 + 1e-12), "{probe} > {lavg}");
    }
    let inst = make_avg_c(1.0, 1.0, 6, 1e-5).unwrap();
    assert!(average_smoothness_pairs(&inst, 1000, 12).unwrap() <= 1.0 + 1e-12);
}

#[test]
fn avg_convex_identities() {
    for (lavg, b, n) in [(1.0, 1.0, 6), (3.0, 2.0, 10), (0.5, 4.0, 64)] {
        let nf = n as f64;
        let l = (nf / 2.0).sqrt() * lavg;
        let lhs = avg_c_eps_limit(lavg, b, n);
        let rhs = c_eps_limit(l, b, n);
        assert!((lhs - rhs).abs() <= 1e-14 * rhs);
        for eps in [lhs / 3.0, lhs / 100.0, lhs / 1e4] {
            let direct = 18f64.powf(0.25) / 12.0 * b * nf.powf(-0.25) * (lavg / eps).sqrt();
            let via_l = (b * b * l / (24.0 * nf * eps)).sqrt();
            assert!((direct - via_l).abs() <= 1e-12 * via_l, "{direct} vs {via_l}");
            // eps values here make the root an exact integer, so floor with a rounding allowance
            let m = (via_l * (1.0 + 1e-12)).floor() as usize - 1;
            let inst = make_avg_c(lavg, b, n, eps).unwrap();
            assert_eq!(inst.m, m.max(3));
        }
    }
}

#[test]
fn convex_regime_boundary() {
    let (l, b, n) = (2.0, 3.0, 4);
    let limit = c_eps_limit(l, b, n);
    let inst = make_c(l, b, n, limit).unwrap();
    assert!(inst.m >= 3);
    match make_c(l, b, n, limit * 1.01) {
        Err(Error::Regime { directive, .. }) => assert_eq!(directive, "ONE_D"),
        other => panic!("{other:?}"),
    }
    match make_avg_c(1.0, 1.0, 4, 1.0) {
        Err(Error::Regime { directive, .. }) => assert_eq!(directive, "ONE_D"),
        other => panic!("{other:?}"),
    }
    for inst in [make_c(1.0, 1.0, 4, 1e-5).unwrap(), make_c(l, b, n, limit).unwrap()] {
        let (x, _) = minimizer(&inst).unwrap();
        let d2: f64 = x.iter().map(|v| v * v).sum();
        assert!(d2 <= inst.s.bdist * inst.s.bdist * (1.0 + 1e-12));
    }
}

#[test]
fn one_dimensional_family() {
    let inst = make_one_d(2.0, 3.0, 5).unwrap();
    let (x, f) = minimizer(&inst).unwrap();
    assert_eq!(x, vec![3.0]);
    let f0 = full_value(&inst, &[0.0]).unwrap();
    assert!((f0 - f - 2.0 * 9.0 / 2.0).abs() <= 1e-12);
    for i in 2..=5 {
        assert_eq!(component_gradient(&inst, i, &[0.0]).unwrap(), vec![0.0]);
        assert_eq!(component_prox(&inst, i, &[0.0], 0.7).unwrap(), vec![0.0]);
    }
    let probe = average_smoothness_pairs(&inst, 200, 3).unwrap();
    assert!(probe <= 2.0 * (1.0 + 1e-12));
}

#[test]
fn nonconvex_constants() {
    assert_eq!(gamma(1.0), 0.0);
    for (l, sigma, n) in [(1.0, 1.0, 10), (1.0, 0.01, 50), (2.0, 5.0, 400)] {
        let alpha = nc_alpha(l, sigma, n);
        let nf = n as f64;
        let lower = -GAMMA_LOWER_CURVATURE * l * alpha / (3.0 * nf);
        let upper = l / (3.0 * nf) * (2.0 * nf + 180.0 * alpha);
        assert!(lower <= sigma * (1.0 + 1e-12), "{lower} > {sigma}");
        assert!(upper <= l * (1.0 + 1e-12), "{upper} > {l}");
        let delta = 1.0;
        let eps = (delta * l * alpha / (81648.0 * nf)).sqrt() / 2.0;
        let inst = make_nc(l, sigma, n, delta, eps).unwrap();
        assert_eq!(inst.dim(), inst.m + 1);
        assert!(nc_gap_bound(&inst) <= delta * (1.0 + 1e-12));
        let cert = certificate(&inst, eps).unwrap();
        assert!(cert.gap_at_depth >= 9.0 * eps * (1.0 - 1e-12));
    }
    assert!(matches!(make_nc(1.0, 1.0, 10, 1.0, 1.0), Err(Error::ParameterDomain { .. })));
}

#[test]
fn certificates_reach_nine_eps() {
    for inst in quadratic_instances() {
        let cert = certificate(&inst, inst.s.eps).unwrap();
        assert!(cert.depth >= 1 && cert.depth < inst.m);
        assert!(cert.gap_at_depth >= 9.0 * inst.s.eps);
        assert_eq!(cert.budget, inst.n * (cert.depth + 1) / 4);
        match inst.family {
            Family::Sc | Family::AvgSc => {
                assert!(inst.s.delta * inst.s.q.powi(2 * cert.depth as i32) >= 9.0 * inst.s.eps * (1.0 - 1e-12));
            }
            _ => {
                let s = &inst.s;
                let floor = 3.0 * s.bdist * s.bdist * s.l / (8.0 * inst.n as f64) / ((inst.m + 1) as f64).powi(2);
                assert!(cert.gap_at_depth >= floor * (1.0 - 1e-12));
                assert!(floor >= 9.0 * s.eps * (1.0 - 1e-12));
            }
        }
    }
    assert!(certificate(&make_one_d(1.0, 1.0, 4).unwrap(), 1e-3).is_err());
}

fn family_strategy() -> impl Strategy<Value = HardInstance> {
    prop_oneof![
        (2usize..20, 1.0f64..50.0, -8.0f64..-3.0)
            .prop_map(|(n, r, e)| make_sc((n as f64 / 2.0 + 1.0) * r, 1.0, n, 1.0, 10f64.powf(e)).unwrap()),
        (2usize..20, 0.1f64..10.0, -8.0f64..-5.0).prop_map(|(n, l, e)| make_c(l, 1.0, n, 10f64.powf(e)).unwrap()),
        (2usize..20, 1.0f64..50.0, -8.0f64..-3.0).prop_map(|(n, r, e)| {
            let nf = n as f64;
            make_avg_sc((3.0 / nf).sqrt() * (nf / 2.0 + 1.0) * r, 1.0, n, 1.0, 10f64.powf(e)).unwrap()
        }),
        (2usize..20, 0.1f64..10.0, -8.0f64..-5.0).prop_map(|(n, l, e)| make_avg_c(l, 1.0, n, 10f64.powf(e)).unwrap()),
        (2usize..20, 0.1f64..10.0).prop_map(|(n, l)| make_one_d(l, 2.0, n).unwrap()),
        (2usize..40, 0.05f64..5.0, 0.1f64..0.5).prop_map(|(n, sigma, frac)| {
            let alpha = nc_alpha(1.0, sigma, n);
            let eps = (alpha / (81648.0 * n as f64)).sqrt() * frac;
            make_nc(1.0, sigma, n, 1.0, eps).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_roundtrip_preserves_every_double(inst in family_strategy()) {
        let text = inst.to_json();
        let back = HardInstance::from_json(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        let doc: InstanceDoc = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(doc.into_instance().unwrap(), inst);
    }

    #[test]
    fn sc_value_at_minimizer_is_minus_delta(n in 2usize..12, r in 1.0f64..100.0, delta in 0.1f64..10.0, e in -8.0f64..-3.0) {
        let inst = make_sc((n as f64 / 2.0 + 1.0) * r, 1.0, n, delta, delta * 10f64.powf(e)).unwrap();
        let (x, _) = minimizer(&inst).unwrap();
        let f = full_value(&inst, &x).unwrap();
        prop_assert!(((f + delta) / delta).abs() <= 1e-9);
    }
}
