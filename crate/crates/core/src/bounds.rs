//! Normal-approximation bounds as itemized reports.
//!
//! Every generic bound is evaluated by exact enumeration. Term values are
//! stored with their constant prefactors applied, so a report's total is the
//! plain sum of its included terms. Alternative estimates of a term are kept
//! in the report with `included = false`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hoeffding::{is_degenerate_ustat, max_influence};
use crate::malliavin::{
    clark_ocone_integrand, d_k, for_each_resample, gamma0, ou_generator, ou_pseudo_inverse, CENTERING_TOL,
};
use crate::math::{abs, sqrt, SQRT_2_OVER_PI};
use crate::product_space::{same_space, CoordSet, DiscreteDistribution, Functional, ProductSpace};

/// Tolerance for the `E[F²] = 1` and degeneracy preconditions.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub label: String,
    pub value: f64,
    /// Whether the term contributes to the report total.
    pub included: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundMetadata {
    pub coords: Option<usize>,
    pub space_size: Option<usize>,
    pub mean: Option<f64>,
    pub second_moment: Option<f64>,
    /// Merge tolerance used where the bound conditions on `F`.
    pub merge_tol: Option<f64>,
    /// `E[F²]` is numerically zero, so the bound says nothing useful.
    pub degenerate_normalization: bool,
    /// The total exceeds 1.
    pub vacuous: bool,
    /// Scalar inputs that determine the bound, such as `c` or `κ_p`.
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound_name: String,
    pub total: f64,
    pub terms: Vec<Term>,
    pub metadata: BoundMetadata,
}

impl BoundReport {
    pub fn new(bound_name: &str, terms: Vec<Term>, mut metadata: BoundMetadata) -> Self {
        let total: f64 = terms.iter().filter(|t| t.included).map(|t| t.value).sum();
        metadata.vacuous = total > 1.0;
        Self { bound_name: bound_name.to_string(), total, terms, metadata }
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.label == label).map(|t| t.value)
    }
}

fn term(label: &str, value: f64) -> Term {
    Term { label: label.to_string(), value, included: true }
}

fn alternative(label: &str, value: f64) -> Term {
    Term { label: label.to_string(), value, included: false }
}

fn functional_metadata(f: &Functional) -> BoundMetadata {
    let second = f.second_moment();
    BoundMetadata {
        coords: Some(f.space().num_coords()),
        space_size: Some(f.len()),
        mean: Some(f.expectation()),
        second_moment: Some(second),
        degenerate_normalization: second < 1e-18,
        ..BoundMetadata::default()
    }
}

fn check_centered(f: &Functional) -> Result<()> {
    let mean = f.expectation();
    if abs(mean) > f.scaled_tol(CENTERING_TOL) {
        return Err(Error::NotCentered(mean));
    }
    Ok(())
}

/// Shared building blocks of the Malliavin–Stein and Clark–Ocone bounds for a
/// family `a_k` paired with `b_k = D_kF`.
struct PairSums {
    /// `E|1 − Σ_k a_k b_k|`
    first: f64,
    /// `Σ_k E[|a_k| b_k²]`
    cubic: f64,
    /// `Σ_k E|D_k(|a_k|)·b_k|`
    derivative: f64,
    /// `E|Σ_k E[|a_k| | 𝒢_k]·b_k|`
    conditional: f64,
    /// `Σ_k E|b_k|³`, `Σ_k E b_k⁴`, `Σ_k E b_k²`, `Σ_k E[a_k² b_k²]`
    b3: f64,
    b4: f64,
    b2: f64,
    a2b2: f64,
}

fn pair_sums<A: FnMut(usize) -> Result<Functional>>(f: &Functional, mut a_of: A) -> Result<PairSums> {
    let n = f.space().num_coords();
    let w = f.space().weights();
    let mut sum_ab = vec![0.0; f.len()];
    let mut sum_cond = vec![0.0; f.len()];
    let mut out =
        PairSums { first: 0.0, cubic: 0.0, derivative: 0.0, conditional: 0.0, b3: 0.0, b4: 0.0, b2: 0.0, a2b2: 0.0 };
    for k in 0..n {
        let a = a_of(k)?;
        let b = d_k(f, k)?;
        let abs_a = a.abs();
        let d_abs_a = d_k(&abs_a, k)?;
        let cond_abs_a = abs_a.conditional_expectation_except(k)?;
        for i in 0..f.len() {
            let (ai, bi) = (a.table()[i], b.table()[i]);
            let b_sq = bi * bi;
            sum_ab[i] += ai * bi;
            sum_cond[i] += cond_abs_a.table()[i] * bi;
            out.cubic += w[i] * abs(ai) * b_sq;
            out.derivative += w[i] * abs(d_abs_a.table()[i] * bi);
            out.b3 += w[i] * abs(bi) * b_sq;
            out.b4 += w[i] * b_sq * b_sq;
            out.b2 += w[i] * b_sq;
            out.a2b2 += w[i] * ai * ai * b_sq;
        }
    }
    out.first = w.iter().zip(&sum_ab).map(|(p, s)| p * abs(1.0 - s)).sum();
    out.conditional = w.iter().zip(&sum_cond).map(|(p, s)| p * abs(*s)).sum();
    Ok(out)
}

/// Malliavin–Stein bounds `(Wasserstein, Kolmogorov)` with `a_k = D_k(−L⁻¹F)`.
pub fn ms_bounds(f: &Functional) -> Result<(BoundReport, BoundReport)> {
    check_centered(f)?;
    let u = ou_pseudo_inverse(f)?.scale(-1.0);
    let s = pair_sums(f, |k| d_k(&u, k))?;
    let meta = functional_metadata(f);
    let wass = BoundReport::new(
        "ms_wasserstein",
        vec![term("first", SQRT_2_OVER_PI * s.first), term("second", s.cubic)],
        meta.clone(),
    );
    let kol = BoundReport::new(
        "ms_kolmogorov",
        vec![term("first", s.first), term("second", 2.0 * s.derivative), term("third", 2.0 * s.conditional)],
        meta,
    );
    Ok((wass, kol))
}

/// Clark–Ocone bounds `(Wasserstein, Kolmogorov)` with `a_k = D_kE[F | ℱ_k]`
/// for the prefix filtration in coordinate order.
pub fn co_bounds(f: &Functional) -> Result<(BoundReport, BoundReport)> {
    check_centered(f)?;
    let s = pair_sums(f, |k| clark_ocone_integrand(f, k))?;
    let meta = functional_metadata(f);
    let wass = BoundReport::new(
        "co_wasserstein",
        vec![
            term("first", SQRT_2_OVER_PI * s.first),
            term("second", s.cubic),
            alternative("second_alt_third_moment", s.b3),
            alternative("second_alt_fourth_moment", sqrt(s.b4)),
            alternative("second_alt_variance_form", sqrt(s.a2b2) * sqrt(s.b2)),
        ],
        meta.clone(),
    );
    let kol = BoundReport::new(
        "co_kolmogorov",
        vec![term("first", s.first), term("second", 2.0 * s.derivative), term("third", 2.0 * s.conditional)],
        meta,
    );
    Ok((wass, kol))
}

/// Carré-du-champ bounds `(Wasserstein, Kolmogorov)`; `g` is the table of `L⁻¹F`.
pub fn cdc_bounds(f: &Functional) -> Result<(BoundReport, BoundReport)> {
    check_centered(f)?;
    let g = ou_pseudo_inverse(f)?;
    let neg_g = g.scale(-1.0);
    let gamma = gamma0(f, &neg_g)?;
    let w = f.space().weights();
    let first: f64 = w.iter().zip(gamma.table()).map(|(p, v)| p * abs(1.0 - v)).sum();

    let (ft, gt) = (f.table(), g.table());
    let mut cubic = 0.0;
    // E[Σ_k |Δg|Δf | 𝕏] as a table, before conditioning on F.
    let mut cross = vec![0.0; f.len()];
    for_each_resample(f.space(), |i, _, p, j| {
        let df = ft[j] - ft[i];
        let dg = abs(gt[j] - gt[i]);
        cubic += w[i] * p * dg * df * df;
        cross[i] += p * dg * df;
    });
    let merge_tol = f.default_merge_tol();
    let (law, groups) = f.partition_by_value(merge_tol);
    let mut group_sum = vec![0.0; law.len()];
    for (i, &grp) in groups.iter().enumerate() {
        group_sum[grp] += w[i] * cross[i];
    }
    let conditional: f64 = group_sum.iter().map(|s| abs(*s)).sum();

    let lf = ou_generator(f);
    let gamma_ff = gamma0(f, f)?;
    let mut e_f2_gamma = 0.0;
    let mut e_f3_lf = 0.0;
    for i in 0..f.len() {
        let x = ft[i];
        e_f2_gamma += w[i] * x * x * gamma_ff.table()[i];
        e_f3_lf += w[i] * x * x * x * lf.table()[i];
    }
    let neg_f_linv_f = -f.inner(&g);
    let variant = sqrt(neg_f_linv_f.max(0.0)) * sqrt((3.0 * e_f2_gamma + e_f3_lf).max(0.0));

    let mut meta = functional_metadata(f);
    let wass = BoundReport::new(
        "cdc_wasserstein",
        vec![
            term("first", SQRT_2_OVER_PI * first),
            term("second", 0.5 * cubic),
            alternative("second_alt_fourth_moment_identity", variant),
        ],
        meta.clone(),
    );
    meta.merge_tol = Some(merge_tol);
    let kol = BoundReport::new("cdc_kolmogorov", vec![term("first", first), term("second", conditional)], meta);
    Ok((wass, kol))
}

/// All six generic reports, in the order ms, co, cdc with Wasserstein first.
pub fn all_generic_bounds(f: &Functional) -> Result<Vec<BoundReport>> {
    let (a, b) = ms_bounds(f)?;
    let (c, d) = co_bounds(f)?;
    let (e, g) = cdc_bounds(f)?;
    Ok(vec![a, b, c, d, e, g])
}

/// A product of independent `{−1, +1}` coordinates with `P(X_k = 1) = p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RademacherSpace {
    p: Vec<f64>,
    space: Arc<ProductSpace>,
}

impl RademacherSpace {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let dists = p.iter().map(|&pk| DiscreteDistribution::rademacher(pk)).collect::<Result<Vec<_>>>()?;
        let space = ProductSpace::shared(dists)?;
        Ok(Self { p, space })
    }

    /// Reads the success probabilities off an existing space; every coordinate
    /// must be supported on exactly `{−1, +1}`.
    pub fn from_space(space: &Arc<ProductSpace>) -> Result<Self> {
        let mut p = Vec::with_capacity(space.num_coords());
        for (k, d) in space.coords().iter().enumerate() {
            if d.values() != [-1.0, 1.0] {
                return Err(Error::NotTwoPoint { k });
            }
            p.push(d.probs()[1]);
        }
        Ok(Self { p, space: space.clone() })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self, k: usize) -> f64 {
        1.0 - self.p[k]
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    /// `Y_k = (X_k + q_k − p_k) / (2√(p_k q_k))`.
    pub fn y_k(&self, k: usize) -> Result<Functional> {
        self.space.check_coord(k)?;
        let (p, q) = (self.p[k], self.q(k));
        let scale = 2.0 * sqrt(p * q);
        Functional::from_values_fn(&self.space, |x| (x[k] + q - p) / scale)
    }

    /// `D̂_kF = √(p_k q_k)·(F|_{X_k=1} − F|_{X_k=−1})`.
    pub fn d_hat(&self, f: &Functional, k: usize) -> Result<Functional> {
        if !same_space(f.space(), &self.space) {
            return Err(Error::SpaceMismatch);
        }
        self.space.check_coord(k)?;
        let root = sqrt(self.p[k] * self.q(k));
        let t = f.table();
        let table = (0..f.len())
            .map(|i| root * (t[self.space.resample_index(i, k, 1)] - t[self.space.resample_index(i, k, 0)]))
            .collect();
        Ok(Functional::from_table_unchecked(self.space.clone(), table))
    }
}

/// The four Rademacher-specific reports `(ms Wasserstein, ms Kolmogorov,
/// co Wasserstein, co Kolmogorov)` written in terms of `D̂_k` and `Y_k`.
pub fn rademacher_bounds(space: &RademacherSpace, f: &Functional) -> Result<[BoundReport; 4]> {
    let derived = RademacherSpace::from_space(f.space())?;
    if derived.p != space.p {
        return Err(Error::SpaceMismatch);
    }
    check_centered(f)?;
    let n = space.p.len();
    let w = space.space.weights();
    let len = f.len();
    let linv = ou_pseudo_inverse(f)?;

    let mut ms_sum = vec![0.0; len];
    let mut co_sum = vec![0.0; len];
    let mut ms_kol_third = vec![0.0; len];
    let mut co_kol_third = vec![0.0; len];
    let (mut ms_w2, mut co_w2, mut ms_k2, mut co_k2) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..n {
        let (p, q) = (space.p[k], space.q(k));
        let root = sqrt(p * q);
        let y = space.y_k(k)?;
        let hat_f = space.d_hat(f, k)?;
        let hat_u = space.d_hat(&linv, k)?.scale(-1.0);
        // D̂_kF does not depend on X_k, so conditioning on ℱ_k equals conditioning on ℱ_{k−1}.
        let strict_prefix = if k == 0 { CoordSet::EMPTY } else { CoordSet::prefix_through(k - 1) };
        let hat_c = hat_f.conditional_expectation(strict_prefix)?;
        let third_moment = (1.0 - 2.0 * p * q) / root;
        for i in 0..len {
            let (yi, bf, bu, bc) = (y.table()[i], hat_f.table()[i], hat_u.table()[i], hat_c.table()[i]);
            ms_sum[i] += bu * bf * yi * yi;
            co_sum[i] += bc * bf * yi * yi;
            ms_kol_third[i] += root * abs(bu) * bf * yi;
            co_kol_third[i] += root * abs(bc) * bf * yi;
            ms_w2 += w[i] * third_moment * abs(bu) * bf * bf;
            co_w2 += w[i] * third_moment * abs(bc) * bf * bf;
            ms_k2 += w[i] * abs(p - q) * abs(bu) * abs(bf);
            co_k2 += w[i] * abs(p - q) * abs(bc) * abs(bf);
        }
    }
    let mean_abs = |t: &[f64], shift: f64| -> f64 { w.iter().zip(t).map(|(p, v)| p * abs(shift - v)).sum() };
    let ms_first = mean_abs(&ms_sum, 1.0);
    let co_first = mean_abs(&co_sum, 1.0);
    let ms_third = mean_abs(&ms_kol_third, 0.0);
    let co_third = mean_abs(&co_kol_third, 0.0);

    let mut meta = functional_metadata(f);
    meta.params = space.p.iter().enumerate().map(|(k, &p)| (alloc::format!("p_{k}"), p)).collect();
    Ok([
        BoundReport::new(
            "rademacher_ms_wasserstein",
            vec![term("first", SQRT_2_OVER_PI * ms_first), term("second", ms_w2)],
            meta.clone(),
        ),
        BoundReport::new(
            "rademacher_ms_kolmogorov",
            vec![term("first", ms_first), term("second", 2.0 * ms_k2), term("third", 4.0 * ms_third)],
            meta.clone(),
        ),
        BoundReport::new(
            "rademacher_co_wasserstein",
            vec![term("first", SQRT_2_OVER_PI * co_first), term("second", co_w2)],
            meta.clone(),
        ),
        BoundReport::new(
            "rademacher_co_kolmogorov",
            vec![term("first", co_first), term("second", 2.0 * co_k2), term("third", 4.0 * co_third)],
            meta,
        ),
    ])
}

/// de Jong bounds `(Wasserstein, Kolmogorov)` for a normalized degenerate
/// U-statistic of order `p`; `kappa` is the caller's constant `κ_p`.
pub fn dejong_bounds(f: &Functional, p: usize, kappa: f64) -> Result<(BoundReport, BoundReport)> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("kappa must be positive and finite, got {kappa}")));
    }
    if !is_degenerate_ustat(f, p, NORMALIZATION_TOL) {
        return Err(Error::NotDegenerate { order: p });
    }
    let second = f.second_moment();
    if abs(second - 1.0) > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(second));
    }
    let fourth = f.expect_with(|x| x * x * x * x);
    let excess = sqrt(abs(fourth - 3.0));
    let rho = sqrt(max_influence(f));
    let root_kappa = sqrt(kappa);

    let mut meta = functional_metadata(f);
    meta.params = vec![
        ("p".to_string(), p as f64),
        ("kappa".to_string(), kappa),
        ("fourth_moment".to_string(), fourth),
        ("rho".to_string(), rho),
    ];
    let wass = BoundReport::new(
        "dejong_wasserstein",
        vec![
            term("fourth_moment", (SQRT_2_OVER_PI + 4.0 / 3.0) * excess),
            term("max_influence", root_kappa * (SQRT_2_OVER_PI + 2.0 * sqrt(2.0) / sqrt(3.0)) * rho),
        ],
        meta.clone(),
    );
    let kol = BoundReport::new(
        "dejong_kolmogorov",
        vec![term("fourth_moment", 11.9 * excess), term("max_influence", (3.5 + 10.8 * root_kappa) * rho)],
        meta,
    );
    Ok((wass, kol))
}
