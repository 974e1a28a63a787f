//! Oracles plus proptest strategies over small product spaces.

#![allow(dead_code)]

mod oracles;

use std::sync::Arc;

use malstein_core::{DiscreteDistribution, Functional, ProductSpace};
use proptest::prelude::*;

pub use oracles::*;

/// A distribution with `s` distinct values and positive probabilities.
pub fn arb_distribution(s: usize) -> impl Strategy<Value = DiscreteDistribution> {
    (prop::collection::vec(0.1f64..1.0, s), prop::collection::vec(0.2f64..1.5, s), -2.0f64..1.0).prop_map(
        |(weights, gaps, start)| {
            let total: f64 = weights.iter().sum();
            let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let head: f64 = probs[1..].iter().sum();
            probs[0] = 1.0 - head;
            let mut v = start;
            let values = gaps
                .iter()
                .map(|g| {
                    v += g;
                    v
                })
                .collect();
            DiscreteDistribution::new(values, probs).unwrap()
        },
    )
}

/// A space of 2–4 coordinates with supports of size 2–3.
pub fn arb_space() -> impl Strategy<Value = Arc<ProductSpace>> {
    prop::collection::vec(2usize..=3, 2..=4).prop_flat_map(|sizes| {
        sizes
            .into_iter()
            .map(arb_distribution)
            .collect::<Vec<_>>()
            .prop_map(|d| Arc::new(ProductSpace::new(d).unwrap()))
    })
}

pub fn arb_functional() -> impl Strategy<Value = Functional> {
    arb_space().prop_flat_map(|space| {
        let size = space.total_outcomes();
        prop::collection::vec(-2.0f64..2.0, size).prop_map(move |t| Functional::new(space.clone(), t).unwrap())
    })
}

pub fn arb_pair() -> impl Strategy<Value = (Functional, Functional)> {
    arb_space().prop_flat_map(|space| {
        let size = space.total_outcomes();
        (prop::collection::vec(-2.0f64..2.0, size), prop::collection::vec(-2.0f64..2.0, size)).prop_map(
            move |(a, b)| (Functional::new(space.clone(), a).unwrap(), Functional::new(space.clone(), b).unwrap()),
        )
    })
}

/// Standardized functionals, skipping near-constant draws.
pub fn arb_standardized() -> impl Strategy<Value = Functional> {
    arb_functional().prop_filter_map("near-constant", |f| standardize(&f))
}
