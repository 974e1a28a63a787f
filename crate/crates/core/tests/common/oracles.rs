//! Reference implementations used only by the tests. They are written from
//! the definitions, favor clarity over speed, and share no code with the
//! library beyond the data types.

#![allow(dead_code, clippy::too_many_arguments, clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::sync::Arc;

use malstein_core::{CoordSet, DiscreteDistribution, Functional, LawOfF, ProductSpace};

pub fn oracle_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Φ by the everywhere-convergent series `½ + φ(x)·Σ x^{2n+1}/(2n+1)!!` for
/// `|x| ≤ 3`, and by the Laplace continued fraction for the Mills ratio beyond.
pub fn oracle_cdf(x: f64) -> f64 {
    if x.abs() <= 3.0 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) {
            n += 1.0;
            term *= x * x / (2.0 * n + 1.0);
            sum += term;
        }
        0.5 + oracle_pdf(x) * sum
    } else {
        let t = x.abs();
        // R(t) = 1/(t + 1/(t + 2/(t + 3/(t + …)))), evaluated bottom-up.
        let mut frac = t;
        for k in (1..=2000).rev() {
            frac = t + k as f64 / frac;
        }
        let tail = oracle_pdf(t) / frac;
        if x > 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, eps, 50)
}

/// `∫|CDF(t) − Φ(t)| dt` by adaptive quadrature between consecutive atoms and
/// over `[first − 40, first]` and `[last, last + 40]`, where the integrand is
/// below `1e-300`.
pub fn oracle_wasserstein(atoms: &[f64], probs: &[f64]) -> f64 {
    let mut pairs: Vec<(f64, f64)> = atoms.iter().copied().zip(probs.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut knots = vec![pairs[0].0 - 40.0];
    knots.extend(pairs.iter().map(|p| p.0));
    knots.push(pairs.last().unwrap().0 + 40.0);
    let mut total = 0.0;
    let mut level = 0.0;
    for (i, w) in knots.windows(2).enumerate() {
        if i > 0 {
            level += pairs[i - 1].1;
        }
        let c = level;
        let g = move |t: f64| (c - oracle_cdf(t)).abs();
        // Split where the integrand has a kink so Simpson sees smooth pieces.
        let mut cuts = vec![w[0]];
        let mut lo = -40.0;
        let mut hi = 40.0;
        if c > 0.0 && c < 1.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if oracle_cdf(mid) < c {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo > w[0] && lo < w[1] {
                cuts.push(lo);
            }
        }
        cuts.push(w[1]);
        for piece in cuts.windows(2) {
            if piece[1] > piece[0] {
                total += adaptive_simpson(&g, piece[0], piece[1], 1e-13);
            }
        }
    }
    total
}

/// `sup_t |CDF(t) − Φ(t)|` by checking both sides of every atom.
pub fn oracle_kolmogorov(atoms: &[f64], probs: &[f64]) -> f64 {
    let mut pairs: Vec<(f64, f64)> = atoms.iter().copied().zip(probs.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut below = 0.0;
    let mut best: f64 = 0.0;
    for (a, p) in pairs {
        let phi = oracle_cdf(a);
        best = best.max((below - phi).abs());
        below += p;
        best = best.max((below - phi).abs());
    }
    best
}

/// `E[F | ℱ_set]` by summing, for each outcome, over all outcomes that agree
/// on `set`.
pub fn oracle_cond_exp(f: &Functional, set: CoordSet) -> Functional {
    let space = f.space();
    let n = space.num_coords();
    let size = f.len();
    let digits: Vec<Vec<usize>> = (0..size).map(|i| space.decode(i).digits).collect();
    let mut out = vec![0.0; size];
    for i in 0..size {
        let mut acc = 0.0;
        for j in 0..size {
            if set.iter().all(|k| digits[i][k] == digits[j][k]) {
                let mut w = 1.0;
                for k in 0..n {
                    if !set.contains(k) {
                        w *= space.coord(k).probs()[digits[j][k]];
                    }
                }
                acc += w * f.table()[j];
            }
        }
        out[i] = acc;
    }
    Functional::new(space.clone(), out).unwrap()
}

/// `F_M = Σ_{L ⊆ M} (−1)^{|M|−|L|} E[F | ℱ_L]`.
pub fn oracle_component(f: &Functional, m: CoordSet) -> Functional {
    let mut acc = Functional::zero(f.space());
    for l in m.subsets() {
        let sign = if (m.len() - l.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc = &acc + &(&oracle_cond_exp(f, l) * sign);
    }
    acc
}

/// `½ Σ_k E[(f(X^{(k)}) − f(X))(g(X^{(k)}) − g(X)) | X]` with `X^{(k)}` the
/// outcome whose coordinate `k` is redrawn independently.
pub fn oracle_gamma0(f: &Functional, g: &Functional) -> Functional {
    let space = f.space();
    let mut out = vec![0.0; f.len()];
    for i in 0..f.len() {
        let digits = space.decode(i).digits;
        for k in 0..space.num_coords() {
            for (x, &p) in space.coord(k).probs().iter().enumerate() {
                let mut d = digits.clone();
                d[k] = x;
                let j = space.encode(&d).unwrap();
                out[i] += 0.5 * p * (f.table()[j] - f.table()[i]) * (g.table()[j] - g.table()[i]);
            }
        }
    }
    Functional::new(space.clone(), out).unwrap()
}

pub fn expectation(f: &Functional) -> f64 {
    f.space().weights().iter().zip(f.table()).map(|(w, v)| w * v).sum()
}

pub fn law_arrays(law: &LawOfF) -> (Vec<f64>, Vec<f64>) {
    (law.atoms().to_vec(), law.probs().to_vec())
}

/// Centers and scales `f` to mean 0 and second moment 1; `None` if `f` is
/// numerically constant.
pub fn standardize(f: &Functional) -> Option<Functional> {
    let mean = expectation(f);
    let centered = f.map(|v| v - mean);
    let var = expectation(&(&centered * &centered));
    if var < 1e-6 {
        return None;
    }
    Some(centered.scale(1.0 / var.sqrt()))
}

/// Fair ±1 coins.
pub fn coins(n: usize) -> Arc<ProductSpace> {
    Arc::new(ProductSpace::new(vec![DiscreteDistribution::fair_coin(); n]).unwrap())
}
