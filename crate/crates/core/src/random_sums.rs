//! Random sums `S = Σ_{j=1}^N X_j` of i.i.d. centered summands with an
//! independent, finitely supported index `N`.
//!
//! `N` sits at coordinate 0 and `X_1, …, X_{n_max}` at coordinates
//! `1..=n_max`, so every prefix `σ(X_0, …, X_k)` with `k ≥ 1` contains `N`.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{BoundMetadata, BoundReport, Term};
use crate::error::{Error, Result};
use crate::math::{abs, sqrt, SQRT_2_OVER_PI};
use crate::product_space::{DiscreteDistribution, Functional, ProductSpace, DEFAULT_MAX_OUTCOMES};

/// Largest tolerated `|E X|`.
pub const MEAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSumSpec {
    law_n: DiscreteDistribution,
    law_x: DiscreteDistribution,
    n_max: usize,
    /// Probability mass of `N` discarded by the caller's truncation.
    pub truncated_mass: f64,
    pub ex2: f64,
    pub ex3_abs: f64,
    pub ex4: f64,
    pub en: f64,
    pub var_n: f64,
}

impl RandomSumSpec {
    pub fn new(law_n: DiscreteDistribution, law_x: DiscreteDistribution) -> Result<Self> {
        let mut n_max = 0usize;
        for &v in law_n.values() {
            if v < 0.0 || v != libm::floor(v) || v > u32::MAX as f64 {
                return Err(Error::InvalidSpec(alloc::format!("N must take nonnegative integer values, got {v}")));
            }
            n_max = n_max.max(v as usize);
        }
        let mean_x = law_x.mean();
        if abs(mean_x) > MEAN_TOL {
            return Err(Error::InvalidSpec(alloc::format!("X must be centered, got E X = {mean_x}")));
        }
        let ex2 = law_x.expect(|x| x * x);
        let ex4 = law_x.expect(|x| x * x * x * x);
        if !(ex2 > 0.0 && ex4 > 0.0) {
            return Err(Error::InvalidSpec("X must have positive variance".to_string()));
        }
        let en = law_n.mean();
        if !(en > 0.0) {
            return Err(Error::DegenerateN);
        }
        Ok(Self {
            n_max,
            truncated_mass: 0.0,
            ex2,
            ex3_abs: law_x.expect(|x| abs(x * x * x)),
            ex4,
            en,
            var_n: law_n.variance().max(0.0),
            law_n,
            law_x,
        })
    }

    /// Builds `N` from the weights `pmf[0..=n_max]` of a longer distribution,
    /// renormalizing and recording the discarded mass `1 − Σ pmf`.
    pub fn truncated(pmf: &[f64], law_x: DiscreteDistribution) -> Result<Self> {
        let kept: f64 = pmf.iter().sum();
        if !(kept > 0.0 && kept <= 1.0 + 1e-12) || pmf.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidSpec("truncated N weights must be nonnegative with sum in (0, 1]".to_string()));
        }
        let (values, probs): (Vec<f64>, Vec<f64>) =
            pmf.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(n, &p)| (n as f64, p / kept)).unzip();
        let mut spec = Self::new(DiscreteDistribution::new(values, probs)?, law_x)?;
        spec.truncated_mass = (1.0 - kept).max(0.0);
        Ok(spec)
    }

    pub fn law_n(&self) -> &DiscreteDistribution {
        &self.law_n
    }

    pub fn law_x(&self) -> &DiscreteDistribution {
        &self.law_x
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `σ = √(E N · E X²)`.
    pub fn sigma(&self) -> f64 {
        sqrt(self.en * self.ex2)
    }

    /// `Var(Σ_k 1{N ≥ k} X_k²) = (E X²)²·Var N + (E X⁴ − (E X²)²)·E N`.
    pub fn square_sum_variance(&self) -> f64 {
        self.ex2 * self.ex2 * self.var_n + (self.ex4 - self.ex2 * self.ex2) * self.en
    }
}

/// The space `(N, X_1, …, X_{n_max})` and `F = S/σ`.
pub fn random_sum_functional(spec: &RandomSumSpec) -> Result<(Arc<ProductSpace>, Functional)> {
    random_sum_functional_with_cap(spec, DEFAULT_MAX_OUTCOMES)
}

pub fn random_sum_functional_with_cap(spec: &RandomSumSpec, cap: usize) -> Result<(Arc<ProductSpace>, Functional)> {
    let mut dists = vec![spec.law_n.clone()];
    dists.extend(core::iter::repeat_n(spec.law_x.clone(), spec.n_max));
    let space = Arc::new(ProductSpace::with_cap(dists, cap)?);
    let sigma = spec.sigma();
    let f = Functional::from_values_fn(&space, |x| {
        let n = x[0] as usize;
        x[1..=n].iter().sum::<f64>() / sigma
    })?;
    Ok((space, f))
}

/// The Wasserstein bound
/// `[√(2/π)(E X⁴/(E X²)² − 1)^{1/2} + E|X|³/(E X²)^{3/2}]/√(E N) + √(Var N)/E N`.
pub fn rs_bound(spec: &RandomSumSpec) -> Result<BoundReport> {
    if !(spec.en > 0.0) {
        return Err(Error::DegenerateN);
    }
    let root_en = sqrt(spec.en);
    let kurtosis_gap = (spec.ex4 / (spec.ex2 * spec.ex2) - 1.0).max(0.0);
    let terms = vec![
        Term {
            label: "fourth_moment".to_string(),
            value: SQRT_2_OVER_PI * sqrt(kurtosis_gap) / root_en,
            included: true,
        },
        Term {
            label: "third_moment".to_string(),
            value: spec.ex3_abs / (spec.ex2 * sqrt(spec.ex2)) / root_en,
            included: true,
        },
        Term { label: "index_spread".to_string(), value: sqrt(spec.var_n) / spec.en, included: true },
    ];
    let meta = BoundMetadata {
        params: vec![
            ("E_N".to_string(), spec.en),
            ("Var_N".to_string(), spec.var_n),
            ("E_X2".to_string(), spec.ex2),
            ("E_absX3".to_string(), spec.ex3_abs),
            ("E_X4".to_string(), spec.ex4),
            ("truncated_mass".to_string(), spec.truncated_mass),
        ],
        ..BoundMetadata::default()
    };
    Ok(BoundReport::new("randsum_wasserstein", terms, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_n(lo: usize, hi: usize) -> DiscreteDistribution {
        DiscreteDistribution::uniform((lo..=hi).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn deterministic_index() {
        let spec = RandomSumSpec::new(uniform_n(4, 4), DiscreteDistribution::fair_coin()).unwrap();
        let (_, f) = random_sum_functional(&spec).unwrap();
        let expected = Functional::from_values_fn(f.space(), |x| x[1..].iter().sum::<f64>() / 2.0).unwrap();
        assert!(f.approx_eq(&expected, 1e-15));
        assert!((rs_bound(&spec).unwrap().total - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_index() {
        let spec = RandomSumSpec::new(uniform_n(1, 2), DiscreteDistribution::fair_coin()).unwrap();
        let (space, f) = random_sum_functional(&spec).unwrap();
        assert_eq!(space.total_outcomes(), 8);
        let s = f.scale(spec.sigma());
        assert!((s.variance() - 1.5).abs() < 1e-14);
        assert!(f.expectation().abs() < 1e-15);

        let spec = RandomSumSpec::new(uniform_n(1, 10), DiscreteDistribution::fair_coin()).unwrap();
        let expected = 1.0 / sqrt(5.5) + sqrt(8.25) / 5.5;
        assert!((rs_bound(&spec).unwrap().total - expected).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        let x = DiscreteDistribution::fair_coin();
        assert_eq!(RandomSumSpec::new(uniform_n(0, 0), x.clone()).unwrap_err(), Error::DegenerateN);
        let bad_n = DiscreteDistribution::uniform(vec![0.5, 1.0]).unwrap();
        assert!(matches!(RandomSumSpec::new(bad_n, x.clone()), Err(Error::InvalidSpec(_))));
        let shifted = DiscreteDistribution::uniform(vec![0.0, 1.0]).unwrap();
        assert!(matches!(RandomSumSpec::new(uniform_n(1, 2), shifted), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn truncation_is_recorded() {
        let spec = RandomSumSpec::truncated(&[0.25, 0.25, 0.25], DiscreteDistribution::fair_coin()).unwrap();
        assert!((spec.truncated_mass - 0.25).abs() < 1e-15);
        assert!((spec.en - 1.0).abs() < 1e-15);
        assert_eq!(spec.n_max(), 2);
    }
}
