//! Malliavin operators on a finite product space.
//!
//! * `D_kF = F − E[F | 𝒢_k]`, an orthogonal projection.
//! * `δU = Σ_k D_kU_k`, the adjoint of `D`.
//! * `LF = −δDF = −Σ_k D_kF`, acting as `−p` on the `p`-th chaos.
//! * `Γ₀(F,G) = ½ Σ_k E[(f(𝕏^{(k)}) − f(𝕏))(g(𝕏^{(k)}) − g(𝕏)) | 𝕏]`, where
//!   `𝕏^{(k)}` resamples coordinate `k` independently.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hoeffding;
use crate::product_space::{same_space, CoordSet, Functional, ProductSpace};

/// Tolerance multiplier for the centering precondition of [`ou_pseudo_inverse`].
pub const CENTERING_TOL: f64 = 1e-9;

/// A family `(U_k)` of functionals indexed by coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Process {
    space: Arc<ProductSpace>,
    entries: Vec<Functional>,
}

impl Process {
    pub fn new(space: Arc<ProductSpace>, entries: Vec<Functional>) -> Result<Self> {
        if entries.len() != space.num_coords() {
            return Err(Error::TableLength { expected: space.num_coords(), got: entries.len() });
        }
        if entries.iter().any(|e| !same_space(e.space(), &space)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space, entries })
    }

    pub fn zero(space: &Arc<ProductSpace>) -> Self {
        let entries = (0..space.num_coords()).map(|_| Functional::zero(space)).collect();
        Self { space: space.clone(), entries }
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn entries(&self) -> &[Functional] {
        &self.entries
    }

    pub fn entry(&self, k: usize) -> &Functional {
        &self.entries[k]
    }

    /// `⟨U, V⟩ = Σ_k E[U_k V_k]`.
    pub fn inner(&self, other: &Process) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.inner(b)).sum()
    }
}

/// `D_kF = F − E[F | 𝒢_k]`.
pub fn d_k(f: &Functional, k: usize) -> Result<Functional> {
    let cond = f.conditional_expectation_except(k)?;
    Ok(f.zip_with(&cond, |a, b| a - b))
}

/// `DF = (D_kF)_k`.
pub fn gradient(f: &Functional) -> Process {
    let entries = (0..f.space().num_coords()).map(|k| d_k(f, k).expect("coordinate in range")).collect();
    Process { space: f.space().clone(), entries }
}

/// `δU = Σ_k D_kU_k`.
pub fn divergence(u: &Process) -> Functional {
    let mut table = vec![0.0; u.space.total_outcomes()];
    for (k, uk) in u.entries.iter().enumerate() {
        let dk = d_k(uk, k).expect("coordinate in range");
        for (t, v) in table.iter_mut().zip(dk.table()) {
            *t += v;
        }
    }
    Functional::from_table_unchecked(u.space.clone(), table)
}

/// `LF = −Σ_k D_kF`.
pub fn ou_generator(f: &Functional) -> Functional {
    let space = f.space();
    let n = space.num_coords() as f64;
    let mut table: Vec<f64> = f.table().iter().map(|&v| -n * v).collect();
    for k in 0..space.num_coords() {
        for (t, c) in table.iter_mut().zip(space.average_out(f.table(), k)) {
            *t += c;
        }
    }
    Functional::from_table_unchecked(space.clone(), table)
}

/// `LF` computed from the Hoeffding side as `−Σ_M |M|·F_M`.
pub fn ou_generator_via_chaos(f: &Functional) -> Functional {
    let parts = hoeffding::chaos_decomposition(f);
    let mut table = vec![0.0; f.len()];
    for (p, j) in parts.iter().enumerate().skip(1) {
        for (t, v) in table.iter_mut().zip(j.table()) {
            *t -= p as f64 * v;
        }
    }
    Functional::from_table_unchecked(f.space().clone(), table)
}

/// `L⁻¹G = −Σ_{p≥1} J_p(G)/p` for centered `G`.
pub fn ou_pseudo_inverse(g: &Functional) -> Result<Functional> {
    let mean = g.expectation();
    if libm::fabs(mean) > g.scaled_tol(CENTERING_TOL) {
        return Err(Error::NotCentered(mean));
    }
    let parts = hoeffding::chaos_decomposition(g);
    let mut table = vec![0.0; g.len()];
    for (p, j) in parts.iter().enumerate().skip(1) {
        let w = 1.0 / p as f64;
        for (t, v) in table.iter_mut().zip(j.table()) {
            *t -= w * v;
        }
    }
    Ok(Functional::from_table_unchecked(g.space().clone(), table))
}

/// Optional cross-checks between the direct operator definitions and the Hoeffding side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Verification(pub bool);

/// `L⁻¹G`, optionally confirming `L L⁻¹G = G` to within `1e-9·scale`.
pub fn ou_pseudo_inverse_checked(g: &Functional, verify: Verification) -> Result<Functional> {
    let inv = ou_pseudo_inverse(g)?;
    if verify.0 {
        let back = ou_generator(&inv);
        let via_chaos = ou_generator_via_chaos(&inv);
        let tol = g.scaled_tol(1e-9);
        if !back.approx_eq(g, tol) || !via_chaos.approx_eq(g, tol) {
            return Err(Error::InvalidParameter(alloc::string::String::from(
                "pseudo-inverse failed the L L⁻¹ G = G cross-check",
            )));
        }
    }
    Ok(inv)
}

/// Calls `visit(index, k, x_prob, resampled_index)` for every outcome, coordinate and
/// replacement support point.
#[inline]
pub(crate) fn for_each_resample<V: FnMut(usize, usize, f64, usize)>(space: &ProductSpace, mut visit: V) {
    for k in 0..space.num_coords() {
        let probs = space.coord(k).probs();
        for index in 0..space.total_outcomes() {
            for (x, &p) in probs.iter().enumerate() {
                visit(index, k, p, space.resample_index(index, k, x));
            }
        }
    }
}

/// Exact carré-du-champ `Γ₀(F, G)`.
pub fn gamma0(f: &Functional, g: &Functional) -> Result<Functional> {
    f.check_same_space(g)?;
    let space = f.space();
    let (ft, gt) = (f.table(), g.table());
    let mut table = vec![0.0; f.len()];
    for_each_resample(space, |i, _, p, j| {
        table[i] += 0.5 * p * (ft[j] - ft[i]) * (gt[j] - gt[i]);
    });
    Ok(Functional::from_table_unchecked(space.clone(), table))
}

/// `Γ(F,G) = ½(L(FG) − G·LF − F·LG)`.
pub fn gamma_via_generator(f: &Functional, g: &Functional) -> Result<Functional> {
    f.check_same_space(g)?;
    let lfg = ou_generator(&(f * g));
    let lf = ou_generator(f);
    let lg = ou_generator(g);
    let table = (0..f.len())
        .map(|i| 0.5 * (lfg.table()[i] - g.table()[i] * lf.table()[i] - f.table()[i] * lg.table()[i]))
        .collect();
    Ok(Functional::from_table_unchecked(f.space().clone(), table))
}

/// `E[(f(𝕏^{(k)}) − f(𝕏))(g(𝕏^{(k)}) − g(𝕏))]` by double enumeration over `(ω, x′)`.
pub fn efron_stein_term(f: &Functional, g: &Functional, k: usize) -> Result<f64> {
    f.check_same_space(g)?;
    let space = f.space();
    space.check_coord(k)?;
    let w = space.weights();
    let probs = space.coord(k).probs();
    let (ft, gt) = (f.table(), g.table());
    let mut acc = 0.0;
    for i in 0..f.len() {
        for (x, &p) in probs.iter().enumerate() {
            let j = space.resample_index(i, k, x);
            acc += w[i] * p * (ft[j] - ft[i]) * (gt[j] - gt[i]);
        }
    }
    Ok(acc)
}

/// `Σ_k E[(f(𝕏^{(k)}) − f(𝕏))⁴]`.
pub fn resampled_fourth_moment(f: &Functional) -> f64 {
    let w = f.space().weights();
    let ft = f.table();
    let mut acc = 0.0;
    for_each_resample(f.space(), |i, _, p, j| {
        let d = ft[j] - ft[i];
        acc += w[i] * p * d * d * d * d;
    });
    acc
}

/// `F_M = E[D_{i₁}…D_{i_p}F | ℱ_M]`, applying the derivatives in increasing coordinate order.
pub fn stroock_component(f: &Functional, m: CoordSet) -> Result<Functional> {
    stroock_component_ordered(f, m, &m.iter().collect::<Vec<_>>())
}

/// Stroock formula with an explicit derivative order; `order` must list the elements of `m`.
pub fn stroock_component_ordered(f: &Functional, m: CoordSet, order: &[usize]) -> Result<Functional> {
    f.space().check_subset(m)?;
    if m.is_empty() || CoordSet::from_coords(order.iter().copied()) != m || order.len() != m.len() {
        return Err(Error::SubsetOutOfRange { mask: m.0, coords: f.space().num_coords() });
    }
    let mut cur = f.clone();
    for &k in order {
        cur = d_k(&cur, k)?;
    }
    cur.conditional_expectation(m)
}

/// `D_kE[F | ℱ_k]` with the prefix filtration `ℱ_k = σ(X_0, …, X_k)` in coordinate order.
pub fn clark_ocone_integrand(f: &Functional, k: usize) -> Result<Functional> {
    f.space().check_coord(k)?;
    let cond = f.conditional_expectation(CoordSet::prefix_through(k))?;
    d_k(&cond, k)
}
