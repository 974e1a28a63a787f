//! Standard normal helpers, the solution of the Stein equation for the
//! indicator test functions `h_z = 1_{(−∞, z]}`, exact Kolmogorov and
//! Wasserstein distances of a finitely supported law to `N(0, 1)`, and the
//! remainders of the approximate chain rule.

use crate::error::{Error, Result};
use crate::malliavin::d_k;
use crate::math::{abs, erfc, exp, ln, sqrt, LN_SQRT_2PI, SQRT_2PI};
use crate::product_space::{Functional, LawOfF};

/// Beyond this magnitude the Mills ratio switches to its continued fraction
/// and `ψ_z` is evaluated in log-space.
pub const TAIL_SWITCH: f64 = 8.0;

/// `Φ(x)` and `φ(x)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalEval {
    pub x: f64,
    pub cdf: f64,
    pub pdf: f64,
}

impl NormalEval {
    pub fn at(x: f64) -> Self {
        Self { x, cdf: normal_cdf(x), pdf: normal_pdf(x) }
    }
}

pub fn normal_pdf(x: f64) -> f64 {
    exp(-0.5 * x * x) / SQRT_2PI
}

/// `Φ(x) = ½·erfc(−x/√2)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

/// Mills ratio `R(t) = (1 − Φ(t)) / φ(t)`.
pub fn mills_ratio(t: f64) -> f64 {
    if t > TAIL_SWITCH {
        // R(t) = 1/(t + 1/(t + 2/(t + 3/(t + …)))), evaluated bottom-up.
        let mut acc = t;
        for j in (1..=60).rev() {
            acc = t + j as f64 / acc;
        }
        1.0 / acc
    } else if t < -TAIL_SWITCH {
        exp(ln_mills_ratio(t))
    } else {
        normal_cdf(-t) / normal_pdf(t)
    }
}

/// `ln R(t)`, finite for every finite `t`.
pub fn ln_mills_ratio(t: f64) -> f64 {
    if t < -TAIL_SWITCH {
        ln_normal_cdf(-t) + 0.5 * t * t + LN_SQRT_2PI
    } else {
        ln(mills_ratio(t))
    }
}

/// `ln Φ(x)`, accurate deep into the left tail.
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x < -TAIL_SWITCH {
        -0.5 * x * x - LN_SQRT_2PI + ln(mills_ratio(-x))
    } else {
        ln(normal_cdf(x))
    }
}

/// `Φ⁻¹(p)` for `0 < p < 1`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(p));
    }
    let mut x = acklam(p);
    // Halley steps against Φ itself, measured on the smaller tail.
    for _ in 0..3 {
        let e = if x <= 0.0 { normal_cdf(x) - p } else { (1.0 - p) - normal_cdf(-x) };
        let pdf = normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let u = e / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209_460_984_245_205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] =
        [-5.447609879822406e1, 1.615858368580409e2, -1.556989798598866e2, 6.680131188771972e1, -1.328068155288572e1];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [7.784695709041462e-3, 3.224671290700398e-1, 2.445134137142996, 3.754408661907416];
    const P_LOW: f64 = 0.02425;
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail(sqrt(-2.0 * ln(p)))
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(sqrt(-2.0 * ln(1.0 - p)))
    }
}

/// The bounded solution `ψ_z` of `ψ′(x) − xψ(x) = 1_{x≤z} − Φ(z)`:
/// `√(2π)·e^{x²/2}·Φ(min(x,z))·(1 − Φ(max(x,z)))`.
pub fn psi_z(z: f64, x: f64) -> f64 {
    let (lo, hi) = if x <= z { (x, z) } else { (z, x) };
    if abs(x) > TAIL_SWITCH {
        return exp(ln_normal_cdf(lo) + ln_normal_cdf(-hi) + 0.5 * x * x + LN_SQRT_2PI);
    }
    // Φ(z)·R(x) when x ≥ z, Φ(−z)·R(−x) otherwise.
    if x >= z {
        normal_cdf(z) * mills_ratio(x)
    } else {
        normal_cdf(-z) * mills_ratio(-x)
    }
}

/// `ψ_z′(x) = xψ_z(x) + 1_{x≤z} − Φ(z)`, taking the left-continuous version at `x = z`.
pub fn psi_z_prime(z: f64, x: f64) -> f64 {
    let indicator = if x <= z { 1.0 } else { 0.0 };
    x * psi_z(z, x) + indicator - normal_cdf(z)
}

/// Exact `d_K(law, N(0,1))` for a step distribution function.
pub fn kolmogorov_distance(law: &LawOfF) -> f64 {
    let mut below = 0.0;
    let mut best: f64 = 0.0;
    for (&v, &p) in law.atoms().iter().zip(law.probs()) {
        let phi = normal_cdf(v);
        let at = below + p;
        best = best.max(abs(at - phi)).max(abs(below - phi));
        below = at;
    }
    best
}

/// `∫_a^b Φ(t) dt` via the antiderivative `tΦ(t) + φ(t)`.
fn integral_cdf(a: f64, b: f64) -> f64 {
    (b * normal_cdf(b) + normal_pdf(b)) - (a * normal_cdf(a) + normal_pdf(a))
}

/// `∫_a^b (1 − Φ(t)) dt` via the antiderivative `t(1 − Φ(t)) − φ(t)`.
fn integral_sf(a: f64, b: f64) -> f64 {
    (b * normal_cdf(-b) - normal_pdf(b)) - (a * normal_cdf(-a) - normal_pdf(a))
}

/// `∫_a^b (c − Φ(t)) dt`, picking the representation with less cancellation.
fn integral_gap(c: f64, a: f64, b: f64) -> f64 {
    if c <= 0.5 {
        c * (b - a) - integral_cdf(a, b)
    } else {
        integral_sf(a, b) - (1.0 - c) * (b - a)
    }
}

/// `∫_a^b |c − Φ(t)| dt` for a constant level `c ∈ [0, 1]`.
fn interval_distance(c: f64, a: f64, b: f64) -> f64 {
    if c <= 0.0 {
        return integral_cdf(a, b);
    }
    if c >= 1.0 {
        return integral_sf(a, b);
    }
    let t = normal_quantile(c).expect("level strictly inside (0, 1)");
    if t <= a {
        -integral_gap(c, a, b)
    } else if t >= b {
        integral_gap(c, a, b)
    } else {
        integral_gap(c, a, t) - integral_gap(c, t, b)
    }
}

/// Exact `d_W(law, N(0,1)) = ∫|F_law(t) − Φ(t)| dt`.
pub fn wasserstein_distance(law: &LawOfF) -> f64 {
    let atoms = law.atoms();
    let probs = law.probs();
    let first = atoms[0];
    let last = atoms[atoms.len() - 1];
    let mut total = first * normal_cdf(first) + normal_pdf(first);
    let mut level = 0.0;
    for i in 0..atoms.len() - 1 {
        level += probs[i];
        total += interval_distance(level, atoms[i], atoms[i + 1]);
    }
    total + normal_pdf(last) - last * normal_cdf(-last)
}

/// The chain-rule remainders for `ψ = ψ_z` and coordinate `k`:
/// `R_k = ψ(F) − ψ(F_k) − ψ′(F_k)D_kF` and `S_k = ψ(F_k) − ψ(F) + ψ′(F)D_kF`,
/// where `F_k = E[F | 𝒢_k]`.
pub fn chain_remainders(f: &Functional, z: f64, k: usize) -> Result<(Functional, Functional)> {
    let fk = f.conditional_expectation_except(k)?;
    let dk = d_k(f, k)?;
    let mut r = alloc::vec::Vec::with_capacity(f.len());
    let mut s = alloc::vec::Vec::with_capacity(f.len());
    for ((&v, &vk), &d) in f.table().iter().zip(fk.table()).zip(dk.table()) {
        r.push(psi_z(z, v) - psi_z(z, vk) - psi_z_prime(z, vk) * d);
        s.push(psi_z(z, vk) - psi_z(z, v) + psi_z_prime(z, v) * d);
    }
    Ok((Functional::from_table_unchecked(f.space().clone(), r), Functional::from_table_unchecked(f.space().clone(), s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn cdf_examples() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_eq!(normal_cdf(40.0), 1.0);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-13);
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            assert!((normal_cdf(normal_quantile(p).unwrap()) - p).abs() < 1e-12, "p = {p}");
        }
        assert!(matches!(normal_quantile(0.0), Err(Error::OutOfRange(_))));
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn mills_ratio_is_continuous_at_switch() {
        let a = mills_ratio(TAIL_SWITCH);
        let b = mills_ratio(TAIL_SWITCH + 1e-12);
        assert!((a - b).abs() / a < 1e-10);
        let c = ln_normal_cdf(-TAIL_SWITCH);
        let d = ln_normal_cdf(-TAIL_SWITCH - 1e-12);
        assert!((c - d).abs() / c.abs() < 1e-10);
    }

    #[test]
    fn psi_examples() {
        assert!((psi_z(0.0, 0.0) - SQRT_2PI / 4.0).abs() < 1e-15);
        for &x in &[-30.0, -9.0, -8.0, 8.0, 9.0, 30.0] {
            for &z in &[-2.0, 0.0, 2.0] {
                let v = psi_z(z, x);
                assert!(v.is_finite() && v > 0.0);
                assert!((x * v).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let point = LawOfF::point_mass(0.0);
        assert_eq!(kolmogorov_distance(&point), 0.5);
        assert!((wasserstein_distance(&point) - crate::math::SQRT_2_OVER_PI).abs() < 1e-15);
        let coin = LawOfF::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!((kolmogorov_distance(&coin) - (0.5 - normal_cdf(-1.0))).abs() < 1e-15);
        assert!((wasserstein_distance(&coin) - 0.535_377_321_547_879_9).abs() < 1e-13);
    }
}
