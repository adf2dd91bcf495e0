//! Limit predictors and finite-N convergence studies.
//!
//! The limits here are stated for `N → ∞`; the table drivers measure the
//! corresponding finite-N quantities exactly so their approach to the limit
//! can be checked.

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{marginal_spin_count_pmf, mixed_binomial_pmf, MixingLaw};
use crate::error::{Error, Result};
use crate::model::{
    critical_cdf, critical_density, exact_spin_count_pmf, gamma_pair, solve_magnetization,
    GammaPair, ModelParams, Regime,
};
use crate::quad::adaptive_simpson;
use crate::tv::{gaussian_tv, tv_discrete, GaussianComponent, GaussianMixture};

/// Beta parameters `(γ1, γ2)` whose mixed binomial has success mean `a` and
/// per-trial variance `sigma_sq` in the large-`N` scaling.
pub fn beta_param_match(a: f64, sigma_sq: f64) -> Result<GammaPair> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("mean {a} outside (0, 1)")));
    }
    let floor = a * (1.0 - a);
    let excess = sigma_sq - floor;
    if !(excess > 0.0) {
        return Err(Error::DegenerateVariance { a, sigma_sq, floor });
    }
    Ok(GammaPair {
        gamma1: a * a * (1.0 - a) / excess,
        gamma2: a * (1.0 - a) * (1.0 - a) / excess,
    })
}

/// Per-trial variance of `Bin(k, Beta(γ1 N, γ2 N))` when `k / N → alpha`.
pub fn alpha_variance(gammas: &GammaPair, alpha: f64) -> f64 {
    let (g1, g2) = (gammas.gamma1, gammas.gamma2);
    let s = g1 + g2;
    g1 * g2 / (s * s) + alpha * g1 * g2 / (s * s * s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPrediction {
    pub regime: Regime,
    pub alpha: f64,
    /// Product-measure approximant the marginal is compared against.
    pub reference_law: MixingLaw,
    pub predicted_tv: f64,
    /// Limiting per-spin variance of the marginal spin count.
    pub sigma_alpha_sq: f64,
}

/// Limit of the TV distance between the `k`-spin count and its product-measure
/// reference when `k / N → alpha`.
pub fn theorem1_limit(params: &ModelParams, alpha: f64) -> Result<LimitPrediction> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha {alpha} outside [0, 1]")));
    }
    let sol = solve_magnetization(params)?;
    let (beta, m) = (params.beta(), sol.m);
    let q = (1.0 - m) * (1.0 + m);
    let base = q / 4.0;
    let sigma_alpha_sq = base * (1.0 + alpha * beta * q / (1.0 - beta * q));
    let up = (1.0 + m) / 2.0;
    let reference_law = match params.regime() {
        Regime::Subcritical => MixingLaw::point(0.5)?,
        Regime::Field => MixingLaw::point(up)?,
        Regime::Supercritical => MixingLaw::finite(
            &[0.5, 0.5],
            vec![MixingLaw::point(up)?, MixingLaw::point((1.0 - m) / 2.0)?],
        )?,
        Regime::Critical => unreachable!("rejected by solve_magnetization"),
    };
    let predicted_tv = if alpha == 0.0 {
        0.0
    } else {
        gaussian_tv(sigma_alpha_sq, base)?
    };
    Ok(LimitPrediction {
        regime: params.regime(),
        alpha,
        reference_law,
        predicted_tv,
        sigma_alpha_sq,
    })
}

/// Local limit target of the full spin count on the per-spin scale.
pub fn llt_target(params: &ModelParams) -> Result<GaussianMixture> {
    let sol = solve_magnetization(params)?;
    let variance = sol.v2 / 4.0;
    let components = match params.regime() {
        Regime::Supercritical => vec![
            GaussianComponent {
                weight: 0.5,
                mean: (1.0 + sol.m) / 2.0,
                variance,
            },
            GaussianComponent {
                weight: 0.5,
                mean: (1.0 - sol.m) / 2.0,
                variance,
            },
        ],
        _ => vec![GaussianComponent {
            weight: 1.0,
            mean: (1.0 + sol.m) / 2.0,
            variance,
        }],
    };
    GaussianMixture::new(components)
}

/// `√N · max_l |P(spin count = l) - target(l)|` over `l = 0..=N`.
pub fn llt_sup_error(n: u64, params: &ModelParams) -> Result<f64> {
    let target = llt_target(params)?.scaled(n as f64);
    let pmf = exact_spin_count_pmf(n, params)?;
    let sup = pmf
        .iter()
        .map(|(l, p)| (p - target.density(l as f64)).abs())
        .fold(0.0, f64::max);
    Ok((n as f64).sqrt() * sup)
}

fn check_k(n: u64, k: u64) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= N, got k = {k}, N = {n}")));
    }
    Ok(())
}

/// Beta-binomial approximant `Bin(k, Beta(γ1 N, γ2 N))` of the marginal, for
/// the subcritical and field regimes.
pub fn unimodal_approximant(n: u64, params: &ModelParams) -> Result<MixingLaw> {
    match params.regime() {
        Regime::Subcritical | Regime::Field => {}
        Regime::Critical => params.require_noncritical()?,
        other => {
            return Err(Error::Regime {
                required: "subcritical or field",
                actual: other.name(),
            })
        }
    }
    let g = gamma_pair(params)?;
    let nf = n as f64;
    MixingLaw::beta(g.gamma1 * nf, g.gamma2 * nf)
}

/// Symmetric two-beta approximant of the marginal at `h = 0`, `beta > 1`.
pub fn bimodal_approximant(n: u64, beta: f64) -> Result<MixingLaw> {
    let params = ModelParams::new(beta, 0.0)?;
    if params.regime() != Regime::Supercritical {
        return Err(Error::Regime {
            required: "supercritical",
            actual: params.regime().name(),
        });
    }
    let g = gamma_pair(&params)?;
    let nf = n as f64;
    MixingLaw::finite(
        &[0.5, 0.5],
        vec![
            MixingLaw::beta(g.gamma1 * nf, g.gamma2 * nf)?,
            MixingLaw::beta(g.gamma2 * nf, g.gamma1 * nf)?,
        ],
    )
}

/// TV between the exact `k`-spin count and its beta-binomial approximant.
pub fn theorem34_gap(n: u64, k: u64, params: &ModelParams) -> Result<f64> {
    check_k(n, k)?;
    let law = unimodal_approximant(n, params)?;
    tv_discrete(
        &marginal_spin_count_pmf(n, k, params)?,
        &mixed_binomial_pmf(k, &law)?,
    )
}

/// TV between the exact `k`-spin count and the symmetric two-beta approximant.
pub fn theorem36_gap(n: u64, k: u64, beta: f64) -> Result<f64> {
    check_k(n, k)?;
    let law = bimodal_approximant(n, beta)?;
    let params = ModelParams::new(beta, 0.0)?;
    tv_discrete(
        &marginal_spin_count_pmf(n, k, &params)?,
        &mixed_binomial_pmf(k, &law)?,
    )
}

/// How the marginal size `k` grows with `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSequence {
    /// `k = round(alpha N)`, ties to even, at least 1.
    Linear(f64),
    /// `k = ceil(√N)`, the canonical sublinear sequence.
    Sqrt,
    Fixed(u64),
}

impl KSequence {
    pub fn k_for(&self, n: u64) -> Result<u64> {
        let k = match *self {
            KSequence::Linear(alpha) => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::domain(format!("alpha {alpha} outside (0, 1]")));
                }
                ((alpha * n as f64).round_ties_even() as u64).max(1)
            }
            KSequence::Sqrt => {
                let mut r = (n as f64).sqrt() as u64;
                while r * r < n {
                    r += 1;
                }
                r.max(1)
            }
            KSequence::Fixed(k) => k,
        };
        check_k(n, k)?;
        Ok(k)
    }

    /// `lim k/N`.
    pub fn alpha(&self) -> f64 {
        match *self {
            KSequence::Linear(alpha) => alpha,
            KSequence::Sqrt | KSequence::Fixed(_) => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    pub observed: f64,
    pub predicted: f64,
    pub gap: f64,
}

impl ConvergenceRow {
    pub fn new(n: u64, k: u64, observed: f64, predicted: f64) -> Self {
        ConvergenceRow {
            n,
            k,
            observed,
            predicted,
            gap: (observed - predicted).abs(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gap).collect()
    }

    pub fn observed(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.observed).collect()
    }
}

/// Rows are computed in parallel and returned in the order of `ns`.
fn build_table<F>(ns: &[u64], row: F) -> Result<ConvergenceTable>
where
    F: Fn(u64) -> Result<ConvergenceRow> + Sync,
{
    let rows = ns.par_iter().map(|&n| row(n)).collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { rows })
}

/// Observed TV between the `k`-spin count and the reference product law,
/// next to the predicted limit, for each `N`.
pub fn theorem1_table(params: &ModelParams, ks: KSequence, ns: &[u64]) -> Result<ConvergenceTable> {
    let prediction = theorem1_limit(params, ks.alpha())?;
    build_table(ns, |n| {
        let k = ks.k_for(n)?;
        let observed = tv_discrete(
            &marginal_spin_count_pmf(n, k, params)?,
            &mixed_binomial_pmf(k, &prediction.reference_law)?,
        )?;
        Ok(ConvergenceRow::new(n, k, observed, prediction.predicted_tv))
    })
}

/// [`theorem1_table`] along `k = round(alpha N)`.
pub fn theorem1_empirical(params: &ModelParams, alpha: f64, ns: &[u64]) -> Result<ConvergenceTable> {
    theorem1_table(params, KSequence::Linear(alpha), ns)
}

pub fn theorem34_table(params: &ModelParams, ks: KSequence, ns: &[u64]) -> Result<ConvergenceTable> {
    build_table(ns, |n| {
        let k = ks.k_for(n)?;
        Ok(ConvergenceRow::new(n, k, theorem34_gap(n, k, params)?, 0.0))
    })
}

pub fn theorem36_table(beta: f64, ks: KSequence, ns: &[u64]) -> Result<ConvergenceTable> {
    build_table(ns, |n| {
        let k = ks.k_for(n)?;
        Ok(ConvergenceRow::new(n, k, theorem36_gap(n, k, beta)?, 0.0))
    })
}

pub fn llt_table(params: &ModelParams, ns: &[u64]) -> Result<ConvergenceTable> {
    build_table(ns, |n| Ok(ConvergenceRow::new(n, n, llt_sup_error(n, params)?, 0.0)))
}

/// Kolmogorov distance between the exact law of `N^{1/4} m_N` at
/// `(beta, h) = (1, 0)` and the quartic limit law.
pub fn critical_cdf_distance(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("critical distance needs N >= 2, got {n}")));
    }
    let pmf = exact_spin_count_pmf(n, &ModelParams::new(1.0, 0.0)?)?;
    let nf = n as f64;
    let scale = nf.powf(0.25);
    let atom = |l: i64| scale * (2.0 * l as f64 / nf - 1.0);

    let mut limit_cdf = critical_cdf(atom(0));
    let mut below = 0.0;
    let mut dist: f64 = 0.0;
    for (l, p) in pmf.iter() {
        if l > 0 {
            limit_cdf += adaptive_simpson(critical_density, atom(l - 1), atom(l), 1e-15);
        }
        let at = below + p;
        dist = dist.max((below - limit_cdf).abs()).max((at - limit_cdf).abs());
        below = at;
    }
    Ok(dist.min(1.0))
}

pub fn critical_table(ns: &[u64]) -> Result<ConvergenceTable> {
    build_table(ns, |n| Ok(ConvergenceRow::new(n, n, critical_cdf_distance(n)?, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::magnetization;
    use crate::tv::gaussian_tv_quadrature;

    fn params(beta: f64, h: f64) -> ModelParams {
        ModelParams::new(beta, h).unwrap()
    }

    #[test]
    fn beta_param_match_examples() {
        let g = beta_param_match(0.5, 0.5).unwrap();
        assert!((g.gamma1 - 0.5).abs() < 1e-15 && (g.gamma2 - 0.5).abs() < 1e-15);
        let cw = gamma_pair(&params(0.5, 0.0)).unwrap();
        assert!((g.gamma1 - cw.gamma1).abs() < 1e-15);
        for &(a, s) in &[(0.1, 0.2), (0.7, 0.3), (0.99, 0.0100001)] {
            let g = beta_param_match(a, s).unwrap();
            assert!((g.gamma1 / (g.gamma1 + g.gamma2) - a).abs() < 1e-12);
            // second moment line at alpha = 1
            assert!((alpha_variance(&g, 1.0) - s).abs() < 1e-9 * s);
        }
        assert!(matches!(
            beta_param_match(0.5, 0.25),
            Err(Error::DegenerateVariance { .. })
        ));
        assert!(matches!(
            beta_param_match(0.5, 0.1),
            Err(Error::DegenerateVariance { .. })
        ));
        assert!(beta_param_match(0.0, 1.0).is_err());
        assert!(beta_param_match(1.0, 1.0).is_err());
    }

    #[test]
    fn limit_examples() {
        let p = theorem1_limit(&params(0.5, 0.0), 1.0).unwrap();
        assert!((p.sigma_alpha_sq - 0.5).abs() < 1e-15);
        assert_eq!(p.predicted_tv, gaussian_tv(0.5, 0.25).unwrap());
        assert_eq!(p.reference_law, MixingLaw::Point(0.5));
        for &(beta, h) in &[(0.5, 0.0), (2.0, 0.0), (0.8, 0.3)] {
            assert_eq!(theorem1_limit(&params(beta, h), 0.0).unwrap().predicted_tv, 0.0);
        }
        let m = magnetization(&params(2.0, 0.0)).unwrap();
        let q = 1.0 - m * m;
        let s2 = q / 4.0 * (1.0 + 2.0 * q / (1.0 - 2.0 * q));
        let oracle = gaussian_tv_quadrature(s2, q / 4.0).unwrap();
        let sup = theorem1_limit(&params(2.0, 0.0), 1.0).unwrap();
        assert!((sup.predicted_tv - oracle).abs() < 1e-8);
        assert_eq!(sup.regime, Regime::Supercritical);
        assert!(matches!(
            theorem1_limit(&params(1.0, 0.0), 0.5),
            Err(Error::CriticalPoint { .. })
        ));
        assert!(theorem1_limit(&params(0.5, 0.0), 1.5).is_err());
    }

    #[test]
    fn limit_is_continuous_in_alpha() {
        for &(beta, h) in &[(0.5, 0.0), (2.0, 0.0), (0.8, 0.3)] {
            let mut prev = 0.0;
            for i in 0..=1000 {
                let a = i as f64 / 1000.0;
                let p = theorem1_limit(&params(beta, h), a).unwrap();
                assert!((p.predicted_tv - prev).abs() < 2e-3);
                assert!(p.predicted_tv >= prev);
                let m = magnetization(&params(beta, h)).unwrap();
                let base = (1.0 - m * m) / 4.0;
                assert!(p.sigma_alpha_sq >= base - 1e-15);
                prev = p.predicted_tv;
            }
        }
    }

    #[test]
    fn sigma_alpha_consistency() {
        for &(beta, h) in &[(0.5, 0.0), (2.0, 0.0), (0.8, 0.3), (3.0, -1.0)] {
            let p = params(beta, h);
            let g = gamma_pair(&p).unwrap();
            for &a in &[0.0, 0.25, 1.0] {
                let pred = theorem1_limit(&p, a).unwrap();
                assert!((alpha_variance(&g, a) - pred.sigma_alpha_sq).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn llt_errors_decay() {
        let e256 = llt_sup_error(256, &params(0.5, 0.0)).unwrap();
        let e1024 = llt_sup_error(1024, &params(0.5, 0.0)).unwrap();
        assert!(e1024 < e256);
        let s512 = llt_sup_error(512, &params(2.0, 0.0)).unwrap();
        let s2048 = llt_sup_error(2048, &params(2.0, 0.0)).unwrap();
        assert!(s2048 < s512);
        assert!(matches!(
            llt_sup_error(64, &params(1.0, 0.0)),
            Err(Error::CriticalPoint { .. })
        ));
    }

    #[test]
    fn theorem34_examples() {
        let p = params(0.5, 0.0);
        let g: Vec<f64> = [256u64, 1024, 4096]
            .iter()
            .map(|&n| theorem34_gap(n, n, &p).unwrap())
            .collect();
        assert!(g[2] < g[1] && g[1] < g[0], "{g:?}");
        for &n in &[64u64, 300] {
            assert!(theorem34_gap(n, 1, &p).unwrap() <= theorem34_gap(n, n, &p).unwrap() + 1e-15);
        }
        assert!(matches!(
            theorem34_gap(64, 64, &params(2.0, 0.0)),
            Err(Error::Regime { .. })
        ));
        assert!(matches!(
            theorem34_gap(64, 64, &params(1.0, 0.0)),
            Err(Error::CriticalPoint { .. })
        ));
        assert!(theorem34_gap(64, 0, &p).is_err());
    }

    #[test]
    fn theorem36_examples() {
        assert!(theorem36_gap(4096, 4096, 2.0).unwrap() < theorem36_gap(1024, 1024, 2.0).unwrap());
        let law = bimodal_approximant(500, 1.5).unwrap();
        let pmf = mixed_binomial_pmf(250, &law).unwrap();
        for l in 0..=250 {
            assert_eq!(pmf.log_prob(l), pmf.log_prob(250 - l));
        }
        assert!(matches!(theorem36_gap(64, 64, 0.5), Err(Error::Regime { .. })));
        assert!(matches!(theorem36_gap(64, 64, 1.0), Err(Error::Regime { .. })));
    }

    #[test]
    fn k_sequences() {
        assert_eq!(KSequence::Linear(0.5).k_for(1024).unwrap(), 512);
        // 2.5 rounds to even
        assert_eq!(KSequence::Linear(0.5).k_for(5).unwrap(), 2);
        assert_eq!(KSequence::Linear(1e-6).k_for(10).unwrap(), 1);
        assert_eq!(KSequence::Sqrt.k_for(4096).unwrap(), 64);
        assert_eq!(KSequence::Sqrt.k_for(4097).unwrap(), 65);
        assert_eq!(KSequence::Sqrt.k_for(1).unwrap(), 1);
        assert!(KSequence::Linear(0.0).k_for(10).is_err());
        assert!(KSequence::Fixed(11).k_for(10).is_err());
    }

    #[test]
    fn empirical_table_shape() {
        let t = theorem1_empirical(&params(0.5, 0.0), 1.0, &[64, 32, 128]).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![64, 32, 128]);
        for r in &t.rows {
            assert_eq!(r.k, r.n);
            assert!((0.0..=1.0).contains(&r.observed));
            assert!((r.gap - (r.observed - r.predicted).abs()).abs() == 0.0);
        }
        assert!(theorem1_empirical(&params(1.0, 0.0), 1.0, &[64]).is_err());
    }

    #[test]
    fn critical_distance_examples() {
        let d256 = critical_cdf_distance(256).unwrap();
        let d4096 = critical_cdf_distance(4096).unwrap();
        assert!(d4096 < d256, "{d256} {d4096}");
        assert!(d256 <= 1.0);
        assert!(critical_cdf_distance(1).is_err());
        // the exact law is symmetric about 0, so its distribution function
        // satisfies F(x) + F(-x-) = 1 and its median sits at 0 like the limit's
        let pmf = exact_spin_count_pmf(301, &params(1.0, 0.0)).unwrap();
        let below_zero: f64 = pmf.iter().filter(|(l, _)| 2 * l < 301).map(|(_, p)| p).sum();
        assert!((below_zero - 0.5).abs() < 1e-14);
    }
}
