//! Finite Hoeffding decomposition `F = Σ_M F_M`, chaos projections and influences.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::product_space::{CoordSet, Functional};

/// Table-entry budget for [`decompose`]: `2^n · |Ω|` must not exceed this.
pub const DEFAULT_DECOMPOSITION_BUDGET: usize = 1 << 25;

/// Components whose variance falls below this multiple of `scale²` are dropped.
pub const ZERO_COMPONENT_REL: f64 = 1e-18;

/// The Hoeffding component `F_M = Σ_{L⊆M} (−1)^{|M|−|L|} E[F | ℱ_L]`.
pub fn component(f: &Functional, m: CoordSet) -> Result<Functional> {
    let space = f.space();
    space.check_subset(m)?;
    let top = f.conditional_expectation(m)?;
    let mut acc = vec![0.0; f.len()];
    for l in m.subsets() {
        let mut cond = top.table().to_vec();
        for k in m.iter().filter(|&k| !l.contains(k)) {
            cond = space.average_out(&cond, k);
        }
        let sign = if (m.len() - l.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
        for (a, c) in acc.iter_mut().zip(cond) {
            *a += sign * c;
        }
    }
    Ok(Functional::from_table_unchecked(space.clone(), acc))
}

/// All nonzero Hoeffding components of a functional.
#[derive(Debug, Clone)]
pub struct HoeffdingDecomposition {
    base: Functional,
    components: BTreeMap<CoordSet, Functional>,
    variances: BTreeMap<CoordSet, f64>,
}

/// Full decomposition with the default memory budget.
pub fn decompose(f: &Functional) -> Result<HoeffdingDecomposition> {
    decompose_with_budget(f, DEFAULT_DECOMPOSITION_BUDGET)
}

/// Computes every `F_M` from the cached lattice of conditional expectations.
///
/// `E[F|ℱ_L]` is built once per subset by averaging one coordinate out of a
/// superset, then the alternating sums are taken by an in-place Möbius
/// inversion over the subset lattice.
pub fn decompose_with_budget(f: &Functional, budget: usize) -> Result<HoeffdingDecomposition> {
    let space = f.space();
    let n = space.num_coords();
    let entries = (1u128 << n) * space.total_outcomes() as u128;
    if n >= 32 || entries > budget as u128 {
        return Err(Error::SpaceTooLargeForFullDecomposition { entries, budget });
    }
    let full = (1usize << n) - 1;
    let mut lattice: Vec<Vec<f64>> = vec![Vec::new(); 1 << n];
    lattice[full] = f.table().to_vec();
    for mask in (0..full).rev() {
        let k = (!mask & full).trailing_zeros() as usize;
        lattice[mask] = space.average_out(&lattice[mask | 1 << k], k);
    }
    for k in 0..n {
        for mask in 0..=full {
            if mask >> k & 1 == 1 {
                let (lo, hi) = lattice.split_at_mut(mask);
                let sub = &lo[mask & !(1 << k)];
                for (a, b) in hi[0].iter_mut().zip(sub) {
                    *a -= b;
                }
            }
        }
    }
    let scale = f.max_abs();
    let threshold = ZERO_COMPONENT_REL * scale * scale;
    let mut components = BTreeMap::new();
    let mut variances = BTreeMap::new();
    for (mask, table) in lattice.into_iter().enumerate() {
        let comp = Functional::from_table_unchecked(space.clone(), table);
        let set = CoordSet(mask as u64);
        let var = if mask == 0 { 0.0 } else { comp.second_moment() };
        if mask == 0 || var >= threshold && var > 0.0 {
            variances.insert(set, var);
            components.insert(set, comp);
        }
    }
    Ok(HoeffdingDecomposition { base: f.clone(), components, variances })
}

impl HoeffdingDecomposition {
    pub fn base(&self) -> &Functional {
        &self.base
    }

    /// Stored components, keyed by coordinate subset. Always contains the empty set.
    pub fn components(&self) -> &BTreeMap<CoordSet, Functional> {
        &self.components
    }

    /// `F_M`; dropped (numerically zero) components come back as the zero table.
    pub fn component(&self, m: CoordSet) -> Functional {
        self.components.get(&m).cloned().unwrap_or_else(|| Functional::zero(self.base.space()))
    }

    /// `Var(F_M)`, zero for dropped components and for `M = ∅`.
    pub fn variance(&self, m: CoordSet) -> f64 {
        self.variances.get(&m).copied().unwrap_or(0.0)
    }

    pub fn variances(&self) -> &BTreeMap<CoordSet, f64> {
        &self.variances
    }

    /// `Σ_M F_M`.
    pub fn reconstruct(&self) -> Functional {
        let mut table = vec![0.0; self.base.len()];
        for comp in self.components.values() {
            for (t, v) in table.iter_mut().zip(comp.table()) {
                *t += v;
            }
        }
        Functional::from_table_unchecked(self.base.space().clone(), table)
    }

    /// `J_p(F) = Σ_{|M|=p} F_M`.
    pub fn chaos(&self, p: usize) -> Functional {
        let mut table = vec![0.0; self.base.len()];
        for (m, comp) in &self.components {
            if m.len() == p {
                for (t, v) in table.iter_mut().zip(comp.table()) {
                    *t += v;
                }
            }
        }
        Functional::from_table_unchecked(self.base.space().clone(), table)
    }

    /// `Inf_k(F) = Σ_{M∋k} E[F_M²]`.
    pub fn influence(&self, k: usize) -> f64 {
        self.variances.iter().filter(|(m, _)| m.contains(k)).map(|(_, v)| v).sum()
    }

    /// `Σ_M |M|·Var(F_M)`.
    pub fn weighted_variance_sum(&self) -> f64 {
        self.variances.iter().map(|(m, v)| m.len() as f64 * v).sum()
    }
}

/// All chaos projections `J_0(F), …, J_n(F)` at once.
///
/// Expands `F = Π_k (A_k + (I − A_k)) F`, where `A_k` averages out coordinate
/// `k`, keeping terms grouped by the number of `(I − A_k)` factors. Each
/// group is exactly `Σ_{|M|=p} F_M`.
pub fn chaos_decomposition(f: &Functional) -> Vec<Functional> {
    let space = f.space();
    let n = space.num_coords();
    let mut poly: Vec<Vec<f64>> = vec![f.table().to_vec()];
    for k in 0..n {
        let averaged: Vec<Vec<f64>> = poly.iter().map(|t| space.average_out(t, k)).collect();
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(poly.len() + 1);
        for p in 0..=poly.len() {
            let mut t = if p < poly.len() { averaged[p].clone() } else { vec![0.0; f.len()] };
            if p > 0 {
                for ((a, b), c) in t.iter_mut().zip(&poly[p - 1]).zip(&averaged[p - 1]) {
                    *a += b - c;
                }
            }
            next.push(t);
        }
        poly = next;
    }
    poly.into_iter().map(|t| Functional::from_table_unchecked(space.clone(), t)).collect()
}

/// `J_p(F)`; the zero functional for `p` beyond the coordinate count.
pub fn chaos_projection(f: &Functional, p: usize) -> Functional {
    chaos_decomposition(f).into_iter().nth(p).unwrap_or_else(|| Functional::zero(f.space()))
}

/// `Inf_k(F) = E[Var(F | 𝒢_k)] = E[(D_kF)²]`.
pub fn influence(f: &Functional, k: usize) -> Result<f64> {
    let cond = f.conditional_expectation_except(k)?;
    Ok(f.zip_with(&cond, |a, b| a - b).second_moment())
}

/// `ρ²(F) = max_k Inf_k(F)`.
pub fn max_influence(f: &Functional) -> f64 {
    (0..f.space().num_coords()).map(|k| influence(f, k).expect("coordinate in range")).fold(0.0, f64::max)
}

/// Whether `F` is a degenerate U-statistic of order `p`: centered, with all
/// chaos projections other than the `p`-th of second moment below `tol`.
pub fn is_degenerate_ustat(f: &Functional, p: usize, tol: f64) -> bool {
    if p == 0 || libm::fabs(f.expectation()) > tol {
        return false;
    }
    chaos_decomposition(f).iter().enumerate().skip(1).all(|(q, j)| q == p || j.second_moment() < tol)
}
