use lognsum::approx::{conditional_mean_and_norm, gauss_hermite_rule};
use lognsum::{
    approx_n2, approx_recursive, clt_cdf, clt_moments, exact_cdf_two, farley_ccdf, x0_solve,
    GaussianParams,
};
use proptest::prelude::*;

fn g(mu: f64, sigma: f64) -> GaussianParams {
    GaussianParams::new(mu, sigma).unwrap()
}

#[test]
fn jensen_direction_where_g_is_concave() {
    // Under the truncated density h₂, E[g(x)] = F(γ)/C₂ and g(E[x]) is the
    // approximation divided by C₂.
    for sigma in [0.5, 1.0, 2.0] {
        let q = g(0.0, sigma);
        let mut checked = 0;
        for i in 0..60 {
            let gamma = 0.05 * 1.2f64.powi(i);
            let Ok(x0) = x0_solve(gamma, q) else { continue };
            if x0.epsilon >= 0.1 {
                continue;
            }
            let (_, c2) = conditional_mean_and_norm(gamma.ln(), q).unwrap();
            let lhs = exact_cdf_two(gamma, q, q).unwrap() / c2;
            let rhs = approx_n2(gamma, q).unwrap() / c2;
            assert!(lhs <= rhs + 1e-9, "σ={sigma} γ={gamma}: {lhs} > {rhs}");
            checked += 1;
        }
        assert!(checked > 5, "σ={sigma}: only {checked} points with ε < 0.1");
    }
}

#[test]
fn approximation_beats_farley_against_exact() {
    for sigma in [0.5, 1.0] {
        let q = g(0.0, sigma);
        let (mut e_apx, mut e_far) = (0.0, 0.0);
        for i in 0..20 {
            let gamma = 1.0 + 0.25 * i as f64;
            let exact = 1.0 - exact_cdf_two(gamma, q, q).unwrap();
            e_apx += (1.0 - approx_n2(gamma, q).unwrap() - exact).abs();
            e_far += (farley_ccdf(gamma, q, 2).unwrap() - exact).abs();
        }
        assert!(e_apx < e_far, "σ={sigma}: {e_apx} vs {e_far}");
    }
}

#[test]
fn farley_is_below_exact_ccdf() {
    let q = g(0.0, 1.0);
    for i in 0..30 {
        let gamma = 0.05 * 1.3f64.powi(i);
        let exact = 1.0 - exact_cdf_two(gamma, q, q).unwrap();
        assert!(farley_ccdf(gamma, q, 2).unwrap() <= exact + 1e-12);
    }
}

#[test]
fn gauss_hermite_rules_are_shared() {
    let a = gauss_hermite_rule(20).unwrap();
    let b = gauss_hermite_rule(20).unwrap();
    assert!(std::ptr::eq(a, b));
    let threads: Vec<_> = (0..4)
        .map(|_| std::thread::spawn(|| gauss_hermite_rule(33).unwrap() as *const _ as usize))
        .collect();
    let ptrs: Vec<usize> = threads.into_iter().map(|t| t.join().unwrap()).collect();
    assert!(ptrs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn clt_moment_convergence_on_large_n_settings() {
    for delta in [10.0, 25.0, 50.0, 100.0, 150.0, 200.0] {
        let a = clt_moments(g(0.0, 1.0), delta, 30, 20).unwrap();
        let b = clt_moments(g(0.0, 1.0), delta, 30, 40).unwrap();
        assert!((a.mu_tilde - b.mu_tilde).abs() < 1e-10);
        assert!((a.sigma_tilde - b.sigma_tilde).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn approximations_are_monotone_probabilities(
        sigma in 0.3f64..2.5, n in 2usize..7, a in -4.0f64..5.0, b in -4.0f64..5.0
    ) {
        let q = g(0.0, sigma);
        let (lo, hi) = (a.min(b).exp(), a.max(b).exp());
        let pairs = [
            (approx_n2(lo, q).unwrap(), approx_n2(hi, q).unwrap()),
            (approx_recursive(lo, q, n).unwrap(), approx_recursive(hi, q, n).unwrap()),
            (1.0 - farley_ccdf(hi, q, n).unwrap(), 1.0 - farley_ccdf(lo, q, n).unwrap()),
            (clt_cdf(lo, q, 10.0, n, 20).unwrap(), clt_cdf(hi, q, 10.0, n, 20).unwrap()),
        ];
        for (i, (x, y)) in pairs.into_iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
            if i == 2 {
                prop_assert!(x >= y - 1e-15);
            } else {
                prop_assert!(y >= x - 1e-15, "method {}: {} > {}", i, x, y);
            }
        }
    }
}
