use lognsum::{
    empirical_cdf, exact_cdf_two, gm_bound_cdf, left_tail_cdf, left_tail_params, tm_bound_cdf,
    tm_bound_curve, tm_bound_pdf_grid, GaussianParams, MCConfig, QuadratureConfig, SumProblem,
};
use proptest::prelude::*;

fn g(mu: f64, sigma: f64) -> GaussianParams {
    GaussianParams::new(mu, sigma).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn frozen_two_component_values() {
    // P(V₁ + V₂ ≤ 2 ln(1 + γ/(2δ))) with V = ln(1 + e^X/δ), from a 30-digit
    // one-dimensional quadrature of the conditional CDF.
    let cases = [
        (0.1, 10.0, g(0.0, 1.0), g(0.0, 1.0), 5.646_179_271_921_39e-6),
        (2.0, 10.0, g(0.0, 1.0), g(0.0, 1.0), 0.399_964_797_898_223),
        (2.0, 100.0, g(0.0, 1.0), g(0.0, 1.0), 0.394_765_215_721_866),
        (20.0, 10.0, g(0.0, 2.0), g(0.0, 2.0), 0.886_062_825_175_338),
        (1.0, 10.0, g(0.0, 1.0), g(0.5, 2.0), 0.126_048_907_196_957),
    ];
    for (gamma, delta, a, b, want) in cases {
        let p = SumProblem::new(vec![a, b], delta).unwrap();
        let r = tm_bound_cdf(gamma, &p, &cfg()).unwrap();
        assert!(((r.value - want) / want).abs() < 1e-7, "γ={gamma} δ={delta}: {} vs {want}", r.value);
    }
    let p = SumProblem::uniform(2, g(0.0, 1.0), 100.0).unwrap();
    let r = tm_bound_cdf(50.0, &p, &cfg()).unwrap();
    assert!((r.complement / 7.100_633_073_19e-5 - 1.0).abs() < 1e-6, "{}", r.complement);
}

#[test]
fn bound_dominates_exact_two_component_cdf() {
    let a = g(0.0, 1.0);
    for delta in [1.0, 10.0, 100.0] {
        let p = SumProblem::uniform(2, a, delta).unwrap();
        for gamma in [0.05, 0.3, 1.0, 2.0, 5.0, 20.0] {
            let exact = exact_cdf_two(gamma, a, a).unwrap();
            let b = tm_bound_cdf(gamma, &p, &cfg()).unwrap();
            assert!(b.value >= exact * (1.0 - 1e-9), "δ={delta} γ={gamma}");
        }
    }
}

#[test]
fn gap_shrinks_with_delta() {
    let a = g(0.0, 1.0);
    let exact = exact_cdf_two(1.0, a, a).unwrap();
    let gaps: Vec<f64> = [1.0, 10.0, 100.0, 1000.0]
        .iter()
        .map(|&d| {
            let p = SumProblem::uniform(2, a, d).unwrap();
            tm_bound_cdf(1.0, &p, &cfg()).unwrap().value - exact
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] < 1e-4);
}

#[test]
fn zero_threshold_and_monotonicity() {
    let p = SumProblem::uniform(3, g(0.0, 1.0), 10.0).unwrap();
    assert_eq!(tm_bound_cdf(0.0, &p, &cfg()).unwrap().value, 0.0);
    let grid: Vec<f64> = (0..40).map(|i| 0.05 * 1.25f64.powi(i)).collect();
    let vals: Vec<f64> = tm_bound_curve(&grid, &p, &cfg())
        .into_iter()
        .map(|r| r.unwrap().value)
        .collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0]), "{vals:?}");
    assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn tighter_than_geometric_mean_bound() {
    for (n, sigma, delta) in [(2, 1.0, 10.0), (6, 1.0, 10.0), (2, 2.0, 100.0), (6, 2.0, 1.0)] {
        let comps = vec![g(0.0, sigma); n];
        let p = SumProblem::new(comps.clone(), delta).unwrap();
        for i in 0..25 {
            let gamma = 0.01 * 1.5f64.powi(i);
            let tm = tm_bound_cdf(gamma, &p, &cfg()).unwrap();
            let gm = gm_bound_cdf(gamma, &comps).unwrap();
            assert!(tm.value <= gm + 2e-10, "N={n} σ={sigma} δ={delta} γ={gamma}");
        }
    }
}

#[test]
fn left_tail_parameters_and_reduction() {
    let (m, s) = left_tail_params(&[g(0.0, 1.0), g(0.0, 1.0)]).unwrap();
    assert!((m - 2f64.ln()).abs() < 1e-15 && (s - 0.5f64.sqrt()).abs() < 1e-15);
    let one = [g(0.3, 0.8)];
    for gamma in [0.2, 1.0, 4.0] {
        let want = lognsum::normal_cdf((f64::ln(gamma) - 0.3) / 0.8);
        assert!((left_tail_cdf(gamma, &one).unwrap() - want).abs() < 1e-15);
    }
}

#[test]
fn left_tail_tracks_the_exact_cdf() {
    // The absolute gap to the exact CDF shrinks as γ decreases.
    let a = g(0.0, 1.0);
    let gaps: Vec<f64> = [0.3, 0.2, 0.1, 0.05, 0.02]
        .iter()
        .map(|&x| (left_tail_cdf(x, &[a, a]).unwrap() - exact_cdf_two(x, a, a).unwrap()).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn bound_density_matches_simulated_histogram() {
    let a = g(0.0, 1.0);
    let p = SumProblem::uniform(2, a, 100.0).unwrap();
    let edges: Vec<f64> = (0..=10).map(|i| 0.5 * 1.3f64.powi(i)).collect();
    let mc = empirical_cdf(&p, &edges, &MCConfig::new(400_000, 11)).unwrap();
    for k in 0..10 {
        let (lo, hi) = (edges[k], edges[k + 1]);
        // Simpson over the bin
        let m = 16;
        let xs: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
        let f = tm_bound_pdf_grid(&xs, &p, &cfg()).unwrap();
        let w = |i: usize| if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let mass: f64 = (0..=m).map(|i| w(i) * f[i]).sum::<f64>() * (hi - lo) / (3.0 * m as f64);
        let emp = mc.cdf[k + 1] - mc.cdf[k];
        let se = (emp * (1.0 - emp) / mc.samples as f64).sqrt();
        assert!((mass - emp).abs() < 3.0 * se, "bin {k}: {mass} vs {emp} ± {se}");
    }
}

#[test]
fn rejects_unshifted_problem() {
    let p = SumProblem::uniform(2, g(0.0, 1.0), 0.0).unwrap();
    assert!(tm_bound_cdf(1.0, &p, &cfg()).is_err());
    let p = SumProblem::uniform(2, g(0.0, 1.0), 1.0).unwrap();
    assert!(tm_bound_cdf(-1.0, &p, &cfg()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bound_below_gm_bound(
        n in 2usize..6, sigma in 0.5f64..2.5, ln_delta in 0.0f64..5.0, ln_gamma in -3.0f64..4.0
    ) {
        let comps = vec![g(0.0, sigma); n];
        let p = SumProblem::new(comps.clone(), ln_delta.exp()).unwrap();
        let gamma = ln_gamma.exp();
        let tm = tm_bound_cdf(gamma, &p, &cfg()).unwrap();
        prop_assert!(tm.value <= gm_bound_cdf(gamma, &comps).unwrap() + 2e-10);
        prop_assert!((0.0..=1.0).contains(&tm.value));
        prop_assert!((tm.value + tm.complement - 1.0).abs() < 1e-12);
    }
}
