//! Randomized invariant suite for the exact operators.
//!
//! Each case draws a product space with 2–4 coordinates (supports of size
//! 2–3), two random functionals `F`, `G` and a random process `U`, and checks
//! every operator identity. Tolerances are `1e-9` times the appropriate power
//! of `scale = max(1, max|F|, max|G|, max|U|)`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::hoeffding::{chaos_decomposition, component, decompose, influence};
use crate::malliavin::{
    clark_ocone_integrand, d_k, divergence, efron_stein_term, gamma0, gamma_via_generator, gradient, ou_generator,
    ou_generator_via_chaos, ou_pseudo_inverse, resampled_fourth_moment, stroock_component, stroock_component_ordered,
    Process,
};
use crate::math::abs;
use crate::montecarlo::SplitMix64;
use crate::product_space::{CoordSet, DiscreteDistribution, Functional, ProductSpace};

pub const DEFAULT_CASES: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Largest observed `error / tolerance`.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub families: Vec<FamilyResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.families.iter().all(|f| f.failed == 0)
    }

    pub fn family(&self, name: &str) -> Option<&FamilyResult> {
        self.families.iter().find(|f| f.name == name)
    }
}

#[derive(Default)]
struct Recorder {
    families: Vec<FamilyResult>,
}

impl Recorder {
    /// Records one check; `error ≤ tol` passes.
    fn check(&mut self, name: &'static str, error: f64, tol: f64) {
        let idx = match self.families.iter().position(|f| f.name == name) {
            Some(i) => i,
            None => {
                self.families.push(FamilyResult { name, passed: 0, failed: 0, worst_ratio: 0.0 });
                self.families.len() - 1
            }
        };
        let fam = &mut self.families[idx];
        let ratio = if error.is_nan() { f64::INFINITY } else { error / tol };
        if ratio <= 1.0 {
            fam.passed += 1;
        } else {
            fam.failed += 1;
        }
        fam.worst_ratio = fam.worst_ratio.max(ratio);
    }
}

/// A random space with `lo..=hi` coordinates and supports of size `2..=3`.
pub fn random_space(rng: &mut SplitMix64, lo: usize, hi: usize) -> Arc<ProductSpace> {
    let n = lo + rng.below(hi - lo + 1);
    let dists = (0..n)
        .map(|_| {
            let size = 2 + rng.below(2);
            let mut v = -1.0 - rng.next_f64();
            let values: Vec<f64> = (0..size)
                .map(|_| {
                    v += 0.25 + rng.next_f64();
                    v
                })
                .collect();
            let weights: Vec<f64> = (0..size).map(|_| 0.1 + rng.next_f64()).collect();
            let total: f64 = weights.iter().sum();
            DiscreteDistribution::new(values, weights.iter().map(|w| w / total).collect())
                .expect("distinct values and positive normalized weights")
        })
        .collect();
    ProductSpace::shared(dists).expect("small space")
}

/// Independent uniform entries on `[−2, 2]`.
pub fn random_functional(rng: &mut SplitMix64, space: &Arc<ProductSpace>) -> Functional {
    let table = (0..space.total_outcomes()).map(|_| 4.0 * rng.next_f64() - 2.0).collect();
    Functional::new(space.clone(), table).expect("finite table")
}

fn diff(a: &Functional, b: &Functional) -> f64 {
    a.max_abs_diff(b)
}

/// Runs `cases` randomized cases starting from `seed`.
pub fn run_suite(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = SplitMix64::new(seed);
    let mut rec = Recorder::default();
    for _ in 0..cases {
        let space = random_space(&mut rng, 2, 4);
        let f = random_functional(&mut rng, &space);
        let g = random_functional(&mut rng, &space);
        let u_entries = (0..space.num_coords()).map(|_| random_functional(&mut rng, &space)).collect();
        let u = Process::new(space.clone(), u_entries).expect("entries share the space");
        let m_pick = CoordSet(1 + rng.next_u64() % (space.full_set().0));
        check_case(&mut rec, &f, &g, &u, m_pick);
    }
    SuiteReport { seed, cases, families: rec.families }
}

fn check_case(rec: &mut Recorder, f: &Functional, g: &Functional, u: &Process, m_pick: CoordSet) {
    let space = f.space();
    let n = space.num_coords();
    let full = space.full_set();
    let scale = u.entries().iter().map(Functional::max_abs).fold(f.max_abs().max(g.max_abs()).max(1.0), f64::max);
    let tol1 = 1e-9 * scale;
    let tol2 = 1e-9 * scale * scale;
    let tol4 = 1e-8 * scale * scale * scale * scale;

    // Conditional expectations.
    for k_set in full.subsets() {
        let outer = f.conditional_expectation(k_set).unwrap();
        for l_set in k_set.subsets() {
            let twice = outer.conditional_expectation(l_set).unwrap();
            let once = f.conditional_expectation(l_set).unwrap();
            rec.check("tower_property", diff(&twice, &once), 1e-12 * scale);
        }
        rec.check("conditional_mean", abs(outer.expectation() - f.expectation()), 1e-12 * scale);
    }
    let law = f.law();
    rec.check("law_mass_and_mean", abs(law.total_mass() - 1.0), 1e-12);
    rec.check("law_mass_and_mean", abs(law.mean() - f.expectation()), 1e-10 * scale);

    // Hoeffding decomposition.
    let dec = decompose(f).unwrap();
    rec.check("hoeffding_reconstruction", diff(&dec.reconstruct(), f), tol1);
    let all: Vec<(CoordSet, Functional)> = full.subsets().map(|m| (m, dec.component(m))).collect();
    for (i, (m, fm)) in all.iter().enumerate() {
        for (_, fnn) in all.iter().skip(i + 1) {
            rec.check("hoeffding_orthogonality", abs(fm.inner(fnn)), tol2);
        }
        for k_set in full.subsets() {
            if !m.is_subset_of(k_set) {
                let cond = fm.conditional_expectation(k_set).unwrap();
                rec.check("hoeffding_degeneracy", cond.max_abs(), tol1);
            }
        }
        rec.check("hoeffding_inclusion_exclusion", diff(fm, &component(f, *m).unwrap()), tol1);
    }
    let var_sum: f64 = all.iter().filter(|(m, _)| !m.is_empty()).map(|(_, c)| c.variance()).sum();
    rec.check("variance_additivity", abs(f.variance() - var_sum), tol2);
    let picked = dec.component(m_pick);
    let redec = decompose(&picked).unwrap();
    let leak: f64 = full.subsets().filter(|&s| s != m_pick).map(|s| redec.component(s).second_moment()).sum();
    rec.check("hoeffding_uniqueness", leak, tol2);

    let mut inf_sum = 0.0;
    for k in 0..n {
        let inf = influence(f, k).unwrap();
        rec.check("influence_formulas", abs(inf - dec.influence(k)), tol2);
        inf_sum += inf;
    }
    rec.check("influence_formulas", abs(inf_sum - dec.weighted_variance_sum()), tol2);

    // Stroock formula in both orders.
    for m in full.subsets().filter(|m| !m.is_empty()) {
        let expected = dec.component(m);
        rec.check("stroock", diff(&stroock_component(f, m).unwrap(), &expected), tol1);
        let mut rev: Vec<usize> = m.iter().collect();
        rev.reverse();
        rec.check("stroock", diff(&stroock_component_ordered(f, m, &rev).unwrap(), &expected), tol1);
    }

    // Derivatives, divergence, generator.
    let df = gradient(f);
    let dg = gradient(g);
    for k in 0..n {
        let dkf = df.entry(k);
        rec.check("d_k_projection", diff(&d_k(dkf, k).unwrap(), dkf), tol1);
        rec.check("d_k_projection", dkf.conditional_expectation_except(k).unwrap().max_abs(), tol1);
        rec.check("d_k_self_adjoint", abs(f.inner(dg.entry(k)) - g.inner(dkf)), tol2);
    }
    let lf = ou_generator(f);
    let lg = ou_generator(g);
    rec.check("generator_definition", diff(&lf, &divergence(&df).scale(-1.0)), tol1);
    rec.check("generator_definition", diff(&lf, &ou_generator_via_chaos(f)), tol1);
    rec.check("generator_self_adjoint", abs(f.inner(&lg) - g.inner(&lf)), tol2);
    rec.check("generator_positive", (f.inner(&lf)).max(0.0), tol2);
    let chaoses = chaos_decomposition(f);
    for (p, j) in chaoses.iter().enumerate() {
        rec.check("chaos_eigen_relation", diff(&ou_generator(j), &j.scale(-(p as f64))), tol1);
    }
    let g_centered = g.map(|v| v - g.expectation());
    let g_inv = ou_pseudo_inverse(&g_centered).unwrap();
    rec.check("pseudo_inverse", diff(&ou_generator(&g_inv), &g_centered), tol1);
    rec.check("pseudo_inverse", abs(g_inv.expectation()), tol1);

    // Carré-du-champ.
    let gamma_fg = gamma0(f, g).unwrap();
    rec.check("gamma_formula", diff(&gamma_fg, &gamma_via_generator(f, g).unwrap()), tol2);
    rec.check("gamma_formula", diff(&gamma_fg, &gamma0(g, f).unwrap()), tol2);

    // Integration by parts.
    rec.check("malliavin_ibp", abs(f.inner(&divergence(u)) - df.inner(u)), tol2);
    rec.check("carre_du_champ_ibp", abs(f.inner(&lg) + gamma_fg.expectation()), tol2);

    // Covariance identities.
    let cov = f.covariance(g);
    let f_centered = f.map(|v| v - f.expectation());
    let f_inv = ou_pseudo_inverse(&f_centered).unwrap();
    let malliavin: f64 = (0..n).map(|k| d_k(&f_inv, k).unwrap().inner(dg.entry(k))).sum();
    rec.check("covariance_malliavin", abs(cov + malliavin), tol2);
    let clark: f64 = (0..n).map(|k| clark_ocone_integrand(f, k).unwrap().inner(dg.entry(k))).sum();
    rec.check("covariance_clark_ocone", abs(cov - clark), tol2);
    let cdc = gamma0(&f_inv.scale(-1.0), g).unwrap().expectation();
    rec.check("covariance_carre_du_champ", abs(cov - cdc), tol2);

    // Poincaré chain.
    let energy: f64 = df.entries().iter().map(Functional::second_moment).sum();
    let var = f.variance();
    rec.check("poincare", (var - energy).max(0.0), tol2);
    let top = chaoses.iter().rposition(|j| j.second_moment() > 1e-18 * scale * scale).unwrap_or(0);
    rec.check("poincare", (energy - top as f64 * var).max(0.0), tol2);

    // Efron–Stein and the fourth-moment identity.
    for k in 0..n {
        let lhs = df.entry(k).inner(dg.entry(k));
        let rhs = 0.5 * efron_stein_term(f, g, k).unwrap();
        rec.check("efron_stein", abs(lhs - rhs), tol2);
    }
    let gamma_ff = gamma0(f, f).unwrap();
    let w = space.weights();
    let (mut e_f2_gamma, mut e_f3_lf) = (0.0, 0.0);
    for i in 0..f.len() {
        let x = f.table()[i];
        e_f2_gamma += w[i] * x * x * gamma_ff.table()[i];
        e_f3_lf += w[i] * x * x * x * lf.table()[i];
    }
    let fourth = resampled_fourth_moment(f);
    rec.check("fourth_moment_identity", abs(fourth - (12.0 * e_f2_gamma + 4.0 * e_f3_lf)), tol4);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_suite(7, 20);
        assert!(report.all_passed(), "{:?}", report.families);
        assert!(report.families.len() >= 20);
    }
}
