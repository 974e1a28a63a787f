//! Finite product probability spaces and dense functionals over them.
//!
//! Outcomes are addressed by a mixed-radix linear index with coordinate 0
//! varying fastest. A [`Functional`] is the value table of a random variable
//! `F = f(X_0, …, X_{n-1})` over that grid.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

/// Default cap on the number of outcomes of a product space.
pub const DEFAULT_MAX_OUTCOMES: usize = 1 << 24;

/// Largest coordinate count representable by a [`CoordSet`] bitmask.
pub const MAX_COORDS: usize = 63;

const PROB_SUM_TOL: f64 = 1e-12;

/// A finite discrete distribution with pairwise distinct support points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || probs.is_empty() {
            return Err(Error::EmptySupport);
        }
        if values.len() != probs.len() {
            return Err(Error::LengthMismatch { values: values.len(), probs: probs.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        for &p in &probs {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidProbability(p));
            }
        }
        let sum = math::compensated_sum(probs.iter().copied());
        if math::abs(sum - 1.0) > PROB_SUM_TOL {
            return Err(Error::ProbSumNotOne(sum));
        }
        for (i, &v) in values.iter().enumerate() {
            if values[..i].contains(&v) {
                return Err(Error::DuplicateValue(v));
            }
        }
        Ok(Self { values, probs })
    }

    /// Uniform distribution over the given support points.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::EmptySupport);
        }
        let probs = vec![1.0 / n as f64; n];
        Self::new(values, probs)
    }

    /// The symmetric ±1 coin.
    pub fn fair_coin() -> Self {
        Self { values: vec![-1.0, 1.0], probs: vec![0.5, 0.5] }
    }

    /// A ±1 variable with `P(X = 1) = p`.
    pub fn rademacher(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        Self::new(vec![-1.0, 1.0], vec![1.0 - p, p])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `E[g(X)]`.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        math::compensated_sum(self.values.iter().zip(&self.probs).map(|(&v, &p)| p * g(v)))
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|x| (x - m) * (x - m))
    }
}

/// A subset of coordinates stored as a 64-bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoordSet(pub u64);

impl CoordSet {
    pub const EMPTY: CoordSet = CoordSet(0);

    /// `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_COORDS);
        CoordSet((1u64 << n) - 1)
    }

    pub fn singleton(k: usize) -> Self {
        CoordSet(1u64 << k)
    }

    /// `{0, …, k}`, the coordinates generating the prefix filtration at `k`.
    pub fn prefix_through(k: usize) -> Self {
        Self::full(k + 1)
    }

    pub fn from_coords<I: IntoIterator<Item = usize>>(coords: I) -> Self {
        CoordSet(coords.into_iter().fold(0, |m, k| m | (1u64 << k)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, k: usize) -> bool {
        k < 64 && self.0 >> k & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, k: usize) -> Self {
        CoordSet(self.0 | 1u64 << k)
    }

    pub fn without(self, k: usize) -> Self {
        CoordSet(self.0 & !(1u64 << k))
    }

    pub fn is_subset_of(self, other: CoordSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: CoordSet) -> Self {
        CoordSet(self.0 | other.0)
    }

    pub fn complement_within(self, n: usize) -> Self {
        CoordSet(!self.0 & Self::full(n).0)
    }

    /// Coordinates in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(k)
            }
        })
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = CoordSet> {
        let full = self.0;
        let mut next = Some(0u64);
        core::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(CoordSet(cur))
        })
    }
}

/// A realization of the coordinate sequence, as support indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub digits: Vec<usize>,
    pub linear_index: usize,
}

/// A finite product of discrete distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    coords: Vec<DiscreteDistribution>,
    strides: Vec<usize>,
    total: usize,
    weights: Vec<f64>,
}

impl ProductSpace {
    pub fn new(dists: Vec<DiscreteDistribution>) -> Result<Self> {
        Self::with_cap(dists, DEFAULT_MAX_OUTCOMES)
    }

    pub fn with_cap(dists: Vec<DiscreteDistribution>, cap: usize) -> Result<Self> {
        if dists.is_empty() {
            return Err(Error::NoCoordinates);
        }
        if dists.len() > MAX_COORDS {
            return Err(Error::TooManyCoordinates(dists.len()));
        }
        let mut outcomes: u128 = 1;
        for d in &dists {
            if d.is_empty() {
                return Err(Error::EmptySupport);
            }
            outcomes = outcomes.saturating_mul(d.len() as u128);
        }
        if outcomes > cap as u128 {
            return Err(Error::SpaceTooLarge { outcomes, cap });
        }
        let total = outcomes as usize;
        let mut strides = Vec::with_capacity(dists.len());
        let mut weights = Vec::with_capacity(total);
        weights.push(1.0);
        for d in &dists {
            strides.push(weights.len());
            let prev = weights.len();
            weights.resize(prev * d.len(), 0.0);
            for x in (0..d.len()).rev() {
                for i in 0..prev {
                    weights[x * prev + i] = weights[i] * d.probs()[x];
                }
            }
        }
        Ok(Self { coords: dists, strides, total, weights })
    }

    /// Convenience constructor returning a shareable handle.
    pub fn shared(dists: Vec<DiscreteDistribution>) -> Result<Arc<Self>> {
        Self::new(dists).map(Arc::new)
    }

    pub fn num_coords(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[DiscreteDistribution] {
        &self.coords
    }

    pub fn coord(&self, k: usize) -> &DiscreteDistribution {
        &self.coords[k]
    }

    pub fn total_outcomes(&self) -> usize {
        self.total
    }

    /// Probability of each outcome, indexed linearly.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn size(&self, k: usize) -> usize {
        self.coords[k].len()
    }

    pub fn full_set(&self) -> CoordSet {
        CoordSet::full(self.num_coords())
    }

    pub fn check_coord(&self, k: usize) -> Result<()> {
        if k < self.num_coords() {
            Ok(())
        } else {
            Err(Error::CoordinateOutOfRange { k, coords: self.num_coords() })
        }
    }

    pub fn check_subset(&self, set: CoordSet) -> Result<()> {
        if set.is_subset_of(self.full_set()) {
            Ok(())
        } else {
            Err(Error::SubsetOutOfRange { mask: set.0, coords: self.num_coords() })
        }
    }

    /// Support index of coordinate `k` in the outcome at `index`.
    #[inline]
    pub fn digit(&self, index: usize, k: usize) -> usize {
        index / self.strides[k] % self.coords[k].len()
    }

    /// Linear index of the outcome obtained by setting coordinate `k` to support index `x`.
    #[inline]
    pub fn resample_index(&self, index: usize, k: usize, x: usize) -> usize {
        let s = self.strides[k];
        index - self.digit(index, k) * s + x * s
    }

    pub fn encode(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.num_coords() {
            return Err(Error::TableLength { expected: self.num_coords(), got: digits.len() });
        }
        let mut index = 0;
        for (k, &d) in digits.iter().enumerate() {
            if d >= self.size(k) {
                return Err(Error::CoordinateOutOfRange { k: d, coords: self.size(k) });
            }
            index += d * self.strides[k];
        }
        Ok(index)
    }

    pub fn decode(&self, linear_index: usize) -> Outcome {
        let digits = (0..self.num_coords()).map(|k| self.digit(linear_index, k)).collect();
        Outcome { digits, linear_index }
    }

    /// Calls `f(index, digits)` for every outcome in linear order.
    pub fn for_each_outcome<F: FnMut(usize, &[usize])>(&self, mut f: F) {
        let n = self.num_coords();
        let mut digits = vec![0usize; n];
        for index in 0..self.total {
            f(index, &digits);
            for k in 0..n {
                digits[k] += 1;
                if digits[k] < self.size(k) {
                    break;
                }
                digits[k] = 0;
            }
        }
    }

    /// Replaces each entry by its average over coordinate `k`, i.e. `E[·|𝒢_k]`.
    pub(crate) fn average_out(&self, table: &[f64], k: usize) -> Vec<f64> {
        let s = self.strides[k];
        let d = self.size(k);
        let probs = self.coords[k].probs();
        let block = s * d;
        let mut out = vec![0.0; table.len()];
        for base in (0..table.len()).step_by(block) {
            for low in 0..s {
                let mut acc = 0.0;
                for (x, &p) in probs.iter().enumerate() {
                    acc += p * table[base + low + x * s];
                }
                for x in 0..d {
                    out[base + low + x * s] = acc;
                }
            }
        }
        out
    }
}

/// A real random variable on a product space, stored as its value table.
#[derive(Debug, Clone)]
pub struct Functional {
    space: Arc<ProductSpace>,
    table: Vec<f64>,
}

impl PartialEq for Functional {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.table == other.table
    }
}

pub(crate) fn same_space(a: &Arc<ProductSpace>, b: &Arc<ProductSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Functional {
    pub fn new(space: Arc<ProductSpace>, table: Vec<f64>) -> Result<Self> {
        if table.len() != space.total_outcomes() {
            return Err(Error::TableLength { expected: space.total_outcomes(), got: table.len() });
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(Self { space, table })
    }

    pub(crate) fn from_table_unchecked(space: Arc<ProductSpace>, table: Vec<f64>) -> Self {
        debug_assert_eq!(table.len(), space.total_outcomes());
        Self { space, table }
    }

    /// Builds `f(digits)` over all outcomes, where `digits[k]` is the support index of coordinate `k`.
    pub fn from_digits_fn<F: FnMut(&[usize]) -> f64>(space: &Arc<ProductSpace>, mut f: F) -> Result<Self> {
        let mut table = Vec::with_capacity(space.total_outcomes());
        space.for_each_outcome(|_, digits| table.push(f(digits)));
        Self::new(space.clone(), table)
    }

    /// Builds `f(x)` over all outcomes, where `x[k]` is the realized value of coordinate `k`.
    pub fn from_values_fn<F: FnMut(&[f64]) -> f64>(space: &Arc<ProductSpace>, mut f: F) -> Result<Self> {
        let mut values = vec![0.0; space.num_coords()];
        Self::from_digits_fn(space, |digits| {
            for (k, &d) in digits.iter().enumerate() {
                values[k] = space.coord(k).values()[d];
            }
            f(&values)
        })
    }

    pub fn constant(space: &Arc<ProductSpace>, c: f64) -> Self {
        Self { space: space.clone(), table: vec![c; space.total_outcomes()] }
    }

    pub fn zero(space: &Arc<ProductSpace>) -> Self {
        Self::constant(space, 0.0)
    }

    /// The coordinate variable `X_k`.
    pub fn coordinate(space: &Arc<ProductSpace>, k: usize) -> Result<Self> {
        space.check_coord(k)?;
        let values = space.coord(k).values();
        let table = (0..space.total_outcomes()).map(|i| values[space.digit(i, k)]).collect();
        Ok(Self { space: space.clone(), table })
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn into_table(self) -> Vec<f64> {
        self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn same_space_as(&self, other: &Functional) -> bool {
        same_space(&self.space, &other.space)
    }

    pub fn check_same_space(&self, other: &Functional) -> Result<()> {
        if self.same_space_as(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `max |F|` over the grid.
    pub fn max_abs(&self) -> f64 {
        self.table.iter().fold(0.0, |m, &v| if math::abs(v) > m { math::abs(v) } else { m })
    }

    /// `base · max(1, max|F|)`, the scaled tolerance used by identity checks.
    pub fn scaled_tol(&self, base: f64) -> f64 {
        let s = self.max_abs();
        base * if s > 1.0 { s } else { 1.0 }
    }

    pub fn map<G: FnMut(f64) -> f64>(&self, mut g: G) -> Self {
        Self { space: self.space.clone(), table: self.table.iter().map(|&v| g(v)).collect() }
    }

    /// Pointwise combination. Panics if the spaces differ.
    pub fn zip_with<G: FnMut(f64, f64) -> f64>(&self, other: &Functional, mut g: G) -> Self {
        assert!(self.same_space_as(other), "functionals live on different spaces");
        let table = self.table.iter().zip(&other.table).map(|(&a, &b)| g(a, b)).collect();
        Self { space: self.space.clone(), table }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(math::abs)
    }

    /// `E[g(F)]`.
    pub fn expect_with<G: FnMut(f64) -> f64>(&self, mut g: G) -> f64 {
        math::compensated_sum(self.space.weights().iter().zip(&self.table).map(|(&w, &v)| w * g(v)))
    }

    /// `E[F]`.
    pub fn expectation(&self) -> f64 {
        self.expect_with(|v| v)
    }

    pub fn second_moment(&self) -> f64 {
        self.expect_with(|v| v * v)
    }

    pub fn variance(&self) -> f64 {
        let m = self.expectation();
        self.expect_with(|v| (v - m) * (v - m))
    }

    /// `E[F·G]`.
    pub fn inner(&self, other: &Functional) -> f64 {
        assert!(self.same_space_as(other), "functionals live on different spaces");
        math::compensated_sum(
            self.space.weights().iter().zip(self.table.iter().zip(&other.table)).map(|(&w, (&a, &b))| w * a * b),
        )
    }

    pub fn covariance(&self, other: &Functional) -> f64 {
        self.inner(other) - self.expectation() * other.expectation()
    }

    /// `max_ω |F(ω) − G(ω)|`.
    pub fn max_abs_diff(&self, other: &Functional) -> f64 {
        assert!(self.same_space_as(other), "functionals live on different spaces");
        self.table.iter().zip(&other.table).fold(0.0, |m, (&a, &b)| {
            let d = math::abs(a - b);
            if d > m {
                d
            } else {
                m
            }
        })
    }

    pub fn approx_eq(&self, other: &Functional, tol: f64) -> bool {
        self.same_space_as(other) && self.max_abs_diff(other) <= tol
    }

    /// `E[F | ℱ_L]` where `ℱ_L = σ(X_j, j ∈ L)`.
    pub fn conditional_expectation(&self, set: CoordSet) -> Result<Functional> {
        self.space.check_subset(set)?;
        let mut table = self.table.clone();
        for k in set.complement_within(self.space.num_coords()).iter() {
            table = self.space.average_out(&table, k);
        }
        Ok(Self { space: self.space.clone(), table })
    }

    /// `E[F | 𝒢_k]` where `𝒢_k = σ(X_j, j ≠ k)`.
    pub fn conditional_expectation_except(&self, k: usize) -> Result<Functional> {
        self.space.check_coord(k)?;
        Ok(Self { space: self.space.clone(), table: self.space.average_out(&self.table, k) })
    }

    /// Default merge tolerance for [`Functional::law_of`]: `1e-12·(1 + max|F|)`.
    pub fn default_merge_tol(&self) -> f64 {
        1e-12 * (1.0 + self.max_abs())
    }

    /// Distribution of `F`, merging values closer than `merge_tol`.
    pub fn law_of(&self, merge_tol: f64) -> LawOfF {
        self.partition_by_value(merge_tol).0
    }

    /// Distribution of `F` with the default merge tolerance.
    pub fn law(&self) -> LawOfF {
        self.law_of(self.default_merge_tol())
    }

    /// The law of `F` together with the atom index of every outcome.
    ///
    /// Sorted values are merged into one atom while consecutive gaps stay
    /// within `merge_tol`; the atom sits at the probability-weighted mean of
    /// its group so the law keeps the expectation of `F`.
    pub fn partition_by_value(&self, merge_tol: f64) -> (LawOfF, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.table.len()).collect();
        order.sort_by(|&a, &b| self.table[a].total_cmp(&self.table[b]).then(a.cmp(&b)));
        let weights = self.space.weights();
        let mut atoms: Vec<f64> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        let mut groups = vec![0usize; self.table.len()];
        let mut mass = 0.0;
        let mut moment = 0.0;
        let mut prev = f64::NAN;
        for &i in &order {
            let v = self.table[i];
            if (!atoms.is_empty() || mass > 0.0) && v - prev > merge_tol {
                atoms.push(moment / mass);
                probs.push(mass);
                mass = 0.0;
                moment = 0.0;
            }
            groups[i] = atoms.len();
            mass += weights[i];
            moment += weights[i] * v;
            prev = v;
        }
        atoms.push(moment / mass);
        probs.push(mass);
        (LawOfF { atoms, probs }, groups)
    }
}

impl Add for &Functional {
    type Output = Functional;
    fn add(self, rhs: &Functional) -> Functional {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Functional {
    type Output = Functional;
    fn sub(self, rhs: &Functional) -> Functional {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Functional {
    type Output = Functional;
    fn mul(self, rhs: &Functional) -> Functional {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &Functional {
    type Output = Functional;
    fn mul(self, rhs: f64) -> Functional {
        self.scale(rhs)
    }
}

impl Neg for &Functional {
    type Output = Functional;
    fn neg(self) -> Functional {
        self.scale(-1.0)
    }
}

/// The distribution of a functional: sorted distinct atoms with their masses.
#[derive(Debug, Clone, PartialEq)]
pub struct LawOfF {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl LawOfF {
    /// Validates and builds a law from explicit atoms. Atoms must be strictly increasing.
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        if atoms.len() != probs.len() {
            return Err(Error::LengthMismatch { values: atoms.len(), probs: probs.len() });
        }
        if atoms.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        for w in atoms.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidSpec(alloc::format!(
                    "atoms must be strictly increasing ({} then {})",
                    w[0],
                    w[1]
                )));
            }
        }
        for &p in &probs {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidProbability(p));
            }
        }
        let sum = math::compensated_sum(probs.iter().copied());
        if math::abs(sum - 1.0) > PROB_SUM_TOL {
            return Err(Error::ProbSumNotOne(sum));
        }
        Ok(Self { atoms, probs })
    }

    /// Sorts and merges unsorted (value, probability) pairs; equal values are combined.
    pub fn from_unsorted(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        for (v, p) in pairs {
            if atoms.last() == Some(&v) {
                *probs.last_mut().unwrap() += p;
            } else {
                atoms.push(v);
                probs.push(p);
            }
        }
        Self::new(atoms, probs)
    }

    pub fn point_mass(x: f64) -> Self {
        Self { atoms: vec![x], probs: vec![1.0] }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> f64 {
        math::compensated_sum(self.atoms.iter().zip(&self.probs).map(|(&a, &p)| a * p))
    }

    pub fn total_mass(&self) -> f64 {
        math::compensated_sum(self.probs.iter().copied())
    }
}
