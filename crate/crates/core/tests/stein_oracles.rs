mod common;

use std::f64::consts::PI;

use common::*;
use malstein_core::malliavin::d_k;
use malstein_core::montecarlo::SplitMix64;
use malstein_core::stein::{
    chain_remainders, kolmogorov_distance, ln_normal_cdf, mills_ratio, normal_cdf, normal_pdf, normal_quantile, psi_z,
    psi_z_prime, wasserstein_distance,
};
use malstein_core::verify::{random_functional, random_space};
use malstein_core::{CoordSet, Functional, LawOfF};

#[test]
fn cdf_against_series_oracle() {
    for i in -1000..=1000 {
        let x = i as f64 * 0.01;
        assert!((normal_cdf(x) - oracle_cdf(x)).abs() <= 1e-15, "x = {x}");
        assert!((normal_pdf(x) - oracle_pdf(x)).abs() <= 1e-14 * oracle_pdf(x));
    }
    for x in [-30.0, -20.0, -12.0, -8.5] {
        let rel = (normal_cdf(x) - oracle_cdf(x)).abs() / oracle_cdf(x);
        assert!(rel < 1e-12, "x = {x}: relative error {rel}");
        assert!((ln_normal_cdf(x) - oracle_cdf(x).ln()).abs() < 1e-10);
        let t = -x;
        assert!((mills_ratio(t) - oracle_cdf(x) / oracle_pdf(t)).abs() / mills_ratio(t) < 1e-12);
    }
    assert_eq!(normal_cdf(40.0), 1.0);
}

#[test]
fn quantile_round_trip() {
    for i in 1..1000 {
        let p = i as f64 / 1000.0;
        let x = normal_quantile(p).unwrap();
        assert!((normal_cdf(x) - p).abs() <= 1e-12, "p = {p}");
    }
    for p in [1e-12, 1e-8, 1e-4, 1.0 - 1e-6] {
        let x = normal_quantile(p).unwrap();
        assert!(((normal_cdf(x) - p) / p.min(1.0 - p)).abs() < 1e-9);
    }
    assert!((normal_quantile(0.975).unwrap() - 1.959963984540054).abs() < 1e-13);
    assert!(normal_quantile(0.0).is_err() && normal_quantile(1.0).is_err());
}

#[test]
fn golden_distances() {
    let point = LawOfF::point_mass(0.0);
    assert_eq!(kolmogorov_distance(&point), 0.5);
    assert!((wasserstein_distance(&point) - (2.0 / PI).sqrt()).abs() <= 1e-12);

    let coin = LawOfF::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
    assert!((kolmogorov_distance(&coin) - (0.5 - oracle_cdf(-1.0)).abs()).abs() <= 1e-12);
    let oracle = oracle_wasserstein(&[-1.0, 1.0], &[0.5, 0.5]);
    assert!((wasserstein_distance(&coin) - oracle).abs() <= 1e-9, "{} vs {oracle}", wasserstein_distance(&coin));
}

#[test]
fn random_laws_against_quadrature() {
    let mut rng = SplitMix64::new(2024);
    for _ in 0..60 {
        let n = 1 + rng.below(7);
        let mut atoms: Vec<f64> = Vec::new();
        while atoms.len() < n {
            let a = (rng.next_f64() - 0.5) * 8.0;
            if atoms.iter().all(|b| (a - b).abs() > 1e-3) {
                atoms.push(a);
            }
        }
        let weights: Vec<f64> = (0..n).map(|_| 0.05 + rng.next_f64()).collect();
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let law = LawOfF::from_unsorted(atoms.iter().copied().zip(probs.iter().copied()).collect()).unwrap();
        let (sa, sp) = law_arrays(&law);
        let d_w = wasserstein_distance(&law);
        let d_k = kolmogorov_distance(&law);
        assert!((d_w - oracle_wasserstein(&sa, &sp)).abs() <= 1e-9);
        assert!((d_k - oracle_kolmogorov(&sa, &sp)).abs() <= 1e-14);
        assert!(d_k <= 1.0);
        assert!(d_w >= law.mean().abs() - 1e-12);
        assert!(d_k <= d_w.sqrt() + 1e-12);
    }
}

#[test]
fn quantile_grid_laws_converge() {
    let mut last = f64::INFINITY;
    for bins in [10, 100, 1000] {
        let atoms: Vec<f64> = (0..bins).map(|i| normal_quantile((i as f64 + 0.5) / bins as f64).unwrap()).collect();
        let law = LawOfF::new(atoms, vec![1.0 / bins as f64; bins]).unwrap();
        assert!(kolmogorov_distance(&law) <= 0.5 / bins as f64 + 1e-6);
        let d_w = wasserstein_distance(&law);
        assert!(d_w < last);
        last = d_w;
    }
}

#[test]
fn stein_solution_grid() {
    let bound = (2.0 * PI).sqrt() / 4.0;
    assert!((psi_z(0.0, 0.0) - bound).abs() < 1e-15);
    for zi in 0..100 {
        let z = -5.0 + 10.0 * zi as f64 / 99.0;
        let mut prev = f64::NEG_INFINITY;
        for xi in 0..100 {
            let x = -6.0 + 12.0 * xi as f64 / 99.0;
            let psi = psi_z(z, x);
            let dpsi = psi_z_prime(z, x);
            let h = if x <= z { 1.0 } else { 0.0 } - oracle_cdf(z);
            assert!((dpsi - x * psi - h).abs() <= 1e-10, "residual at z={z}, x={x}");
            // Independent closed form √(2π)e^{x²/2}Φ(min)(1−Φ(max)).
            let closed = (2.0 * PI).sqrt() * (0.5 * x * x).exp() * oracle_cdf(x.min(z)) * oracle_cdf(-x.max(z));
            assert!((psi - closed).abs() <= 1e-12 * closed.max(1.0));
            assert!(psi.abs() <= bound + 1e-12);
            assert!(dpsi.abs() <= 1.0 + 1e-10);
            let xpsi = x * psi;
            assert!(xpsi.abs() <= 1.0);
            assert!(xpsi >= prev - 1e-14, "x ψ not monotone at z={z}, x={x}");
            prev = xpsi;
        }
    }
}

#[test]
fn stein_derivative_against_finite_differences() {
    for &(z, x) in &[(0.3, -1.2), (-1.0, 0.7), (2.0, 2.5), (0.0, -3.0)] {
        let h = 1e-6;
        let fd = (psi_z(z, x + h) - psi_z(z, x - h)) / (2.0 * h);
        assert!((fd - psi_z_prime(z, x)).abs() < 1e-6);
    }
}

fn trapezoid_s(z: f64, fk: f64, f: f64, d: f64) -> f64 {
    // S_k = ∫_0^{D_kF} (ψ′(F) − ψ′(F_k + t)) dt, splitting at the jump of ψ′ at z.
    let g = |t: f64| psi_z_prime(z, f) - psi_z_prime(z, fk + t);
    let (lo, hi) = if d >= 0.0 { (0.0, d) } else { (d, 0.0) };
    let mut pieces = vec![lo];
    if z - fk > lo && z - fk < hi {
        pieces.push(z - fk);
    }
    pieces.push(hi);
    let mut total = 0.0;
    for w in pieces.windows(2) {
        let n = 10_000;
        let step = (w[1] - w[0]) / n as f64;
        if step == 0.0 {
            continue;
        }
        // Nudge the endpoints inward so each piece sees one branch of ψ′.
        let eval = |t: f64| g(t.clamp(w[0] + 1e-13, w[1] - 1e-13));
        let mut s = 0.5 * (eval(w[0]) + eval(w[1]));
        for i in 1..n {
            s += eval(w[0] + i as f64 * step);
        }
        total += s * step;
    }
    if d >= 0.0 {
        total
    } else {
        -total
    }
}

#[test]
fn chain_remainders_bounds_and_integral_form() {
    let mut rng = SplitMix64::new(99);
    for case in 0..40 {
        let space = random_space(&mut rng, 2, 3);
        let f = standardize(&random_functional(&mut rng, &space)).unwrap_or_else(|| Functional::zero(&space));
        let z = (rng.next_f64() - 0.5) * 4.0;
        let full = CoordSet::full(space.num_coords());
        for k in 0..space.num_coords() {
            let (r, s) = chain_remainders(&f, z, k).unwrap();
            let dk = d_k(&f, k).unwrap();
            let fk = oracle_cond_exp(&f, full.without(k));
            for i in 0..f.len() {
                let d = dk.table()[i];
                assert!(r.table()[i].abs().max(s.table()[i].abs()) <= 2.0 * d.abs() + 1e-12, "case {case}");
                let oracle = trapezoid_s(z, fk.table()[i], f.table()[i], d);
                assert!((s.table()[i] - oracle).abs() <= 1e-6, "case {case}: {} vs {oracle}", s.table()[i]);
            }
            // D_kψ(F) = ψ′(F)D_kF − S_k − E[R_k | 𝒢_k].
            let psi_f = f.map(|v| psi_z(z, v));
            let lhs = d_k(&psi_f, k).unwrap();
            let er = oracle_cond_exp(&r, full.without(k));
            for i in 0..f.len() {
                let rhs = psi_z_prime(z, f.table()[i]) * dk.table()[i] - s.table()[i] - er.table()[i];
                assert!((lhs.table()[i] - rhs).abs() <= 1e-9);
            }
        }
    }
    let space = coins(2);
    let (r, s) = chain_remainders(&Functional::constant(&space, 0.4), 0.1, 1).unwrap();
    assert!(r.max_abs() == 0.0 && s.max_abs() == 0.0);
}
