//! Seeded sampling for instances too large to enumerate.
//!
//! Samples are produced in fixed-size chunks. Chunk `j` of a run with seed
//! `s` draws from its own [`SplitMix64`] stream seeded with `s + j`, so the
//! multiset of values depends only on `(s, n_samples)` and never on how chunks
//! are distributed over workers.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph_coloring::{t2_moments, Graph};
use crate::math::{ln, sqrt};
use crate::product_space::{Functional, LawOfF};
use crate::stein::kolmogorov_distance;

/// Samples per chunk.
pub const CHUNK_SIZE: usize = 4096;

/// Minimum sample count for [`empirical_kolmogorov`].
pub const MIN_SAMPLES: usize = 100;

/// SplitMix64: `state += 0x9E3779B97F4A7C15`, followed by the usual
/// xor-shift-multiply finalizer. Seed 1 starts
/// `0x910A2DEC89025CC1, 0xBEEB8DA1658EEC67, 0xF893A2EEFB32555E, 0x71C18690EE42C90B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Integer in `0..bound` by the multiply-shift map `⌊x·bound / 2⁶⁴⌋`.
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }
}

/// A source of i.i.d. real samples.
pub trait Sampler {
    fn draw(&self, rng: &mut SplitMix64, scratch: &mut Vec<usize>) -> f64;
}

/// Standardized monochromatic-edge counts under uniform colorings.
#[derive(Debug, Clone)]
pub struct MonoEdgeSampler<'a> {
    graph: &'a Graph,
    colors: usize,
    mean: f64,
    sigma: f64,
}

impl<'a> MonoEdgeSampler<'a> {
    pub fn new(graph: &'a Graph, colors: usize) -> Result<Self> {
        let (mean, var) = t2_moments(graph.num_edges(), colors)?;
        Ok(Self { graph, colors, mean, sigma: sqrt(var) })
    }
}

impl Sampler for MonoEdgeSampler<'_> {
    fn draw(&self, rng: &mut SplitMix64, scratch: &mut Vec<usize>) -> f64 {
        scratch.clear();
        scratch.extend((0..self.graph.num_vertices()).map(|_| rng.below(self.colors)));
        (self.graph.monochromatic_edges(scratch) as f64 - self.mean) / self.sigma
    }
}

/// Draws outcomes of a product space coordinatewise by inversion and reads the table.
#[derive(Debug, Clone)]
pub struct FunctionalSampler<'a> {
    f: &'a Functional,
    cumulative: Vec<Vec<f64>>,
}

impl<'a> FunctionalSampler<'a> {
    pub fn new(f: &'a Functional) -> Self {
        let cumulative = f
            .space()
            .coords()
            .iter()
            .map(|d| {
                let mut acc = 0.0;
                d.probs()
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { f, cumulative }
    }
}

impl Sampler for FunctionalSampler<'_> {
    fn draw(&self, rng: &mut SplitMix64, _scratch: &mut Vec<usize>) -> f64 {
        let space = self.f.space();
        let mut index = 0;
        for (k, cum) in self.cumulative.iter().enumerate() {
            let u = rng.next_f64();
            let digit = cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1);
            index += digit * space.stride(k);
        }
        self.f.table()[index]
    }
}

pub fn chunk_count(n_samples: usize) -> usize {
    n_samples.div_ceil(CHUNK_SIZE)
}

/// The values of chunk `chunk` in a run of `n_samples` draws.
pub fn sample_chunk<S: Sampler + ?Sized>(sampler: &S, seed: u64, chunk: usize, n_samples: usize) -> Vec<f64> {
    let start = chunk * CHUNK_SIZE;
    let count = CHUNK_SIZE.min(n_samples.saturating_sub(start));
    let mut rng = SplitMix64::new(seed.wrapping_add(chunk as u64));
    let mut scratch = Vec::new();
    (0..count).map(|_| sampler.draw(&mut rng, &mut scratch)).collect()
}

/// All chunks in order on the calling thread.
pub fn sample_serial<S: Sampler + ?Sized>(sampler: &S, n_samples: usize, seed: u64) -> SampleSummary {
    let mut values = Vec::with_capacity(n_samples);
    for chunk in 0..chunk_count(n_samples) {
        values.extend(sample_chunk(sampler, seed, chunk, n_samples));
    }
    SampleSummary::from_values(values, seed)
}

pub fn sample_mono_edges(g: &Graph, c: usize, n_samples: usize, seed: u64) -> Result<SampleSummary> {
    let sampler = MonoEdgeSampler::new(g, c)?;
    Ok(sample_serial(&sampler, n_samples, seed))
}

pub fn sample_functional(f: &Functional, n_samples: usize, seed: u64) -> SampleSummary {
    sample_serial(&FunctionalSampler::new(f), n_samples, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub n_samples: usize,
    pub sorted_values: Vec<f64>,
    pub seed: u64,
}

impl SampleSummary {
    pub fn from_values(mut values: Vec<f64>, seed: u64) -> Self {
        values.sort_by(f64::total_cmp);
        Self { n_samples: values.len(), sorted_values: values, seed }
    }

    pub fn mean(&self) -> f64 {
        self.sorted_values.iter().sum::<f64>() / self.n_samples as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.sorted_values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (self.n_samples as f64 - 1.0)
    }

    /// The empirical law, with exactly equal values pooled.
    pub fn empirical_law(&self) -> LawOfF {
        let n = self.n_samples as f64;
        let mut atoms: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for &v in &self.sorted_values {
            if atoms.last() == Some(&v) {
                *counts.last_mut().expect("nonempty") += 1;
            } else {
                atoms.push(v);
                counts.push(1);
            }
        }
        let probs = counts.iter().map(|&c| c as f64 / n).collect();
        LawOfF::new(atoms, probs).expect("sorted distinct atoms with counts summing to n")
    }
}

/// `√(ln(2/α)/(2n))` at `α = 0.01`.
pub fn dkw_radius(n: usize) -> f64 {
    sqrt(ln(2.0 / 0.01) / (2.0 * n as f64))
}

/// `(sup_t |F_n(t) − Φ(t)|, 99% DKW radius)`.
pub fn empirical_kolmogorov(summary: &SampleSummary) -> Result<(f64, f64)> {
    if summary.n_samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples(summary.n_samples));
    }
    Ok((kolmogorov_distance(&summary.empirical_law()), dkw_radius(summary.n_samples)))
}

/// `n` points at the normal quantiles `Φ⁻¹((i + ½)/n)`.
pub fn normal_quantile_sample(n: usize) -> SampleSummary {
    let values = (0..n)
        .map(|i| crate::stein::normal_quantile((i as f64 + 0.5) / n as f64).expect("level inside (0, 1)"))
        .collect();
    SampleSummary::from_values(values, 0)
}
