//! Verification harness: characteristic-function convergence studies,
//! simulator-versus-analytic consistency, two-sample Kolmogorov–Smirnov
//! tests and the hyperuniformity report.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{FddSpec, LimitVariant, MovingAverage};
use crate::error::{Error, Result};
use crate::kernel::{Kernel1D, ProductKernel};
use crate::simulate::{self, monte_carlo, replicate_rng, sample_jumps, SimConfig};

pub const DEFAULT_THRESHOLD: f64 = 1e-3;

/// `[-5, 5]` in steps of `0.25`.
pub fn default_z_grid() -> Vec<f64> {
    (-20..=20).map(|i| i as f64 * 0.25).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Claimed,
    BoundaryAugmented,
    Inconclusive,
}

impl From<LimitVariant> for Winner {
    fn from(v: LimitVariant) -> Self {
        match v {
            LimitVariant::Claimed => Winner::Claimed,
            LimitVariant::BoundaryAugmented => Winner::BoundaryAugmented,
        }
    }
}

impl Winner {
    pub fn name(self) -> &'static str {
        match self {
            Winner::Claimed => "claimed",
            Winner::BoundaryAugmented => "boundary_augmented",
            Winner::Inconclusive => "inconclusive",
        }
    }
}

/// Sup-distances between the window characteristic function at one `T`
/// and each candidate limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEntry {
    pub t: f64,
    pub dist_claimed: Option<f64>,
    pub dist_boundary: Option<f64>,
    /// Largest quadrature error estimate among the log-CFs that entered.
    pub error_estimate: Option<f64>,
    /// Set when a quadrature failed for this `T`.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t_grid: Vec<f64>,
    pub z_grid: Vec<f64>,
    pub threshold: f64,
    pub entries: Vec<ConvergenceEntry>,
    pub monotone_claimed: bool,
    pub monotone_boundary: bool,
    pub winner: Winner,
}

/// Compares `φ_{S_T}` with both candidate limits for every `T`.
///
/// The frequency vector at grid point `z` is `z` times the frequencies of
/// `base`. A candidate wins when its distance at the largest `T` is at most
/// `threshold` and its distances do not increase over the last three `T`
/// values; exactly one candidate must qualify. Increases smaller than ten
/// times the quadrature tolerance count as flat.
pub fn cf_convergence(
    model: &MovingAverage,
    base: &FddSpec,
    t_grid: &[f64],
    z_grid: &[f64],
    threshold: f64,
) -> Result<ConvergenceReport> {
    if !model.kernel().has_antiderivative() {
        return Err(Error::NotAvailable {
            operation: "cf_convergence",
            kernel: first_without_g(model.kernel()),
        });
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[0] < w[1])) || t_grid[0] < 0.0 {
        return Err(Error::invalid("the T grid must be non-empty, non-negative and increasing"));
    }
    if z_grid.is_empty() {
        return Err(Error::invalid("the z grid must not be empty"));
    }

    let limit = |variant| -> Result<Vec<(Complex64, f64)>> {
        z_grid
            .par_iter()
            .map(|&z| model.log_cf_limit(&base.scaled(z), variant).map(|v| (v.cf(), v.error_estimate)))
            .collect()
    };
    let claimed = limit(LimitVariant::Claimed)?;
    let boundary = limit(LimitVariant::BoundaryAugmented)?;
    let limit_err = claimed.iter().chain(&boundary).fold(0.0f64, |m, v| m.max(v.1));

    let entries: Vec<ConvergenceEntry> = t_grid
        .par_iter()
        .map(|&t| {
            let spec = base.with_t(t).expect("validated grid");
            let window: Result<Vec<_>> = z_grid
                .par_iter()
                .map(|&z| model.log_cf_window(&spec.scaled(z)).map(|v| (v.cf(), v.error_estimate)))
                .collect();
            match window {
                Ok(w) => {
                    let sup = |cand: &[(Complex64, f64)]| {
                        w.iter().zip(cand).fold(0.0f64, |m, (a, b)| m.max((a.0 - b.0).norm()))
                    };
                    ConvergenceEntry {
                        t,
                        dist_claimed: Some(sup(&claimed)),
                        dist_boundary: Some(sup(&boundary)),
                        error_estimate: Some(w.iter().fold(limit_err, |m, v| m.max(v.1))),
                        error: None,
                    }
                }
                Err(e) => ConvergenceEntry {
                    t,
                    dist_claimed: None,
                    dist_boundary: None,
                    error_estimate: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let floor = 10.0 * model.quad().tol;
    let tail = entries.len().saturating_sub(3);
    let monotone = |pick: fn(&ConvergenceEntry) -> Option<f64>| {
        entries.len() >= 3 && {
            let ds: Option<Vec<f64>> = entries[tail..].iter().map(pick).collect();
            ds.is_some_and(|ds| ds.windows(2).all(|w| w[1] <= w[0] + floor))
        }
    };
    let monotone_claimed = monotone(|e| e.dist_claimed);
    let monotone_boundary = monotone(|e| e.dist_boundary);
    let last = entries.last().expect("non-empty grid");
    let below = |d: Option<f64>| d.is_some_and(|d| d <= threshold);
    let ok_claimed = monotone_claimed && below(last.dist_claimed);
    let ok_boundary = monotone_boundary && below(last.dist_boundary);
    let winner = match (ok_claimed, ok_boundary) {
        (true, false) => Winner::Claimed,
        (false, true) => Winner::BoundaryAugmented,
        _ => Winner::Inconclusive,
    };

    Ok(ConvergenceReport {
        t_grid: t_grid.to_vec(),
        z_grid: z_grid.to_vec(),
        threshold,
        entries,
        monotone_claimed,
        monotone_boundary,
        winner,
    })
}

fn first_without_g(kernel: &ProductKernel) -> &'static str {
    kernel
        .components()
        .iter()
        .find(|k| !k.has_antiderivative())
        .map_or("unknown", |k| k.kind().name())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfCheck {
    pub l_index: usize,
    pub z: f64,
    pub empirical: Complex64,
    pub analytic: Complex64,
    pub distance: f64,
    pub pass: bool,
}

/// An empirical moment against its analytic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub l_index: usize,
    pub empirical: f64,
    pub standard_error: f64,
    pub analytic: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub replicates: usize,
    /// `5/√N`.
    pub band: f64,
    pub cf: Vec<CfCheck>,
    /// Absent when the second moment of the measure diverges.
    pub variance: Option<Vec<MomentCheck>>,
    pub mean: Vec<MomentCheck>,
    pub pass: bool,
}

/// Simulates `cfg` and compares, for each anchor, the empirical
/// characteristic function with the analytic one (band `5/√N`), the sample
/// variance with `variance_window` and the sample mean with zero (both
/// within four standard errors).
pub fn mc_consistency(model: &MovingAverage, cfg: &SimConfig, z_grid: &[f64], threads: usize) -> Result<ConsistencyReport> {
    if cfg.replicates < 10_000 {
        return Err(Error::invalid(format!(
            "consistency checks need at least 10000 replicates, got {}",
            cfg.replicates
        )));
    }
    let mc = monte_carlo(cfg, threads)?;
    let n = cfg.replicates;
    let band = 5.0 / (n as f64).sqrt();
    let analytic_var = match model.variance_window(cfg.t) {
        Ok(v) => Some(v),
        Err(Error::DivergentMoment(_)) => None,
        Err(e) => return Err(e),
    };

    let mut cf = Vec::new();
    let mut variance = analytic_var.map(|_| Vec::new());
    let mut mean = Vec::new();
    for (j, l) in cfg.ls.iter().enumerate() {
        let column = mc.s_column(j);
        let emp = simulate::empirical_cf(&column, z_grid, 5.0)?;
        let analytic: Vec<Complex64> = z_grid
            .par_iter()
            .map(|&z| Ok(model.log_cf_window(&FddSpec::single(l.clone(), z, cfg.t)?)?.cf()))
            .collect::<Result<_>>()?;
        for (p, a) in emp.points.iter().zip(analytic) {
            let distance = (p.cf - a).norm();
            cf.push(CfCheck {
                l_index: j,
                z: p.z,
                empirical: p.cf,
                analytic: a,
                distance,
                pass: distance <= band,
            });
        }
        let (m, se) = simulate::mean_and_se(&column);
        mean.push(MomentCheck {
            l_index: j,
            empirical: m,
            standard_error: se,
            analytic: 0.0,
            pass: m.abs() <= 4.0 * se,
        });
        if let (Some(v), Some(checks)) = (analytic_var, variance.as_mut()) {
            let (ev, se) = simulate::variance_and_se(&column);
            checks.push(MomentCheck {
                l_index: j,
                empirical: ev,
                standard_error: se,
                analytic: v,
                pass: (ev - v).abs() <= 4.0 * se,
            });
        }
    }
    let pass = cf.iter().all(|c| c.pass)
        && mean.iter().all(|c| c.pass)
        && variance.as_ref().is_none_or(|v| v.iter().all(|c| c.pass));
    Ok(ConsistencyReport {
        replicates: n,
        band,
        cf,
        variance,
        mean,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_1pct: f64,
    pub reject: bool,
}

/// Two-sample Kolmogorov–Smirnov test at the 1% level, using the
/// asymptotic critical value `1.628 √((n + m)/(n m))`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::invalid(format!(
            "the KS test needs at least 100 samples on each side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::invalid("KS samples must not contain NaN"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    let critical = 1.628 * ((nf + mf) / (nf * mf)).sqrt();
    Ok(KsResult {
        statistic: d,
        critical_1pct: critical,
        reject: d > critical,
    })
}

/// Independent draws of `-∫ g(-s) Λ(ds)` (from `seed_a`) and `∫ g(s) Λ(ds)`
/// (from `seed_b`), `n` of each, for a one-dimensional kernel with
/// antiderivative.
pub fn reflection_samples(
    kernel: &Kernel1D,
    measure: crate::levy::LevyMeasure,
    n: usize,
    epsilon: f64,
    seed_a: u64,
    seed_b: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let product: ProductKernel = kernel.clone().into();
    let cfg = SimConfig::new(measure, product.clone(), 0.0, vec![vec![0.0]])?.with_epsilon(epsilon);
    let draw = |seed: u64, reflect: bool| -> Result<Vec<f64>> {
        (0..n as u64)
            .into_par_iter()
            .map(|r| {
                let jumps = sample_jumps(&cfg, &mut replicate_rng(seed, r))?;
                if reflect {
                    Ok(simulate::limit_values(&jumps, &product, &cfg.ls)?[0])
                } else {
                    let mut total = 0.0;
                    for (s, y) in jumps.iter() {
                        total += y * kernel.g_or_err(s[0], "reflection_samples")?;
                    }
                    Ok(total)
                }
            })
            .collect()
    };
    Ok((draw(seed_a, true)?, draw(seed_b, false)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Hyperuniform,
    Persistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperRow {
    pub t: f64,
    pub var_analytic: f64,
    pub var_empirical: Option<f64>,
    pub var_empirical_se: Option<f64>,
    pub var_control: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperReport {
    pub kernel: String,
    pub rows: Vec<HyperRow>,
    /// Least-squares slope of `Var S_T` against `T` for the persistent
    /// control kernel.
    pub control_slope: f64,
    pub control_intercept: f64,
    /// Last analytic variance within 10% of the preceding one.
    pub plateau: bool,
    /// The same test applied to the empirical curve, when simulated.
    pub empirical_plateau: Option<bool>,
    pub classification: Classification,
}

/// Options of [`hyperuniformity`] that only concern the empirical curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperSimulation {
    /// Replicates per window size; `0` skips simulation.
    pub replicates: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub threads: usize,
}

impl Default for HyperSimulation {
    fn default() -> Self {
        HyperSimulation {
            replicates: 0,
            seed: 0,
            epsilon: simulate::DEFAULT_EPSILON,
            threads: 0,
        }
    }
}

fn plateau(v: &[f64]) -> bool {
    let (prev, last) = (v[v.len() - 2], v[v.len() - 1]);
    (last - prev).abs() <= 0.1 * prev.abs()
}

/// Window-variance curves of `model` and of the persistent control kernel
/// (same measure, same dimension), with the classification
/// hyperuniform ⇔ plateau of the analytic curve and positive control slope.
pub fn hyperuniformity(model: &MovingAverage, t_grid: &[f64], sim: HyperSimulation) -> Result<HyperReport> {
    if t_grid.len() < 3 {
        return Err(Error::invalid(format!(
            "the hyperuniformity classification needs at least three window sizes, got {}",
            t_grid.len()
        )));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) || t_grid[0] <= 0.0 {
        return Err(Error::invalid("the T grid must be positive and increasing"));
    }
    model.measure().second_moment()?;
    let d = model.dim();
    let control = MovingAverage::new(ProductKernel::power(Kernel1D::persistent_control(), d)?, *model.measure())
        .with_quad(*model.quad());

    let variance = |t: f64| {
        if model.kernel().has_antiderivative() {
            model.variance_window(t)
        } else {
            model.variance_window_from_covariance(t)
        }
    };
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (var_empirical, var_empirical_se) = if sim.replicates > 0 {
            let cfg = SimConfig::new(*model.measure(), model.kernel().clone(), t, vec![vec![0.0; d]])?
                .with_epsilon(sim.epsilon)
                .with_replicates(sim.replicates)
                .with_seed(sim.seed);
            let mc = monte_carlo(&cfg, sim.threads)?;
            let (v, se) = simulate::variance_and_se(&mc.s);
            (Some(v), Some(se))
        } else {
            (None, None)
        };
        rows.push(HyperRow {
            t,
            var_analytic: variance(t)?,
            var_empirical,
            var_empirical_se,
            var_control: control.variance_window_from_covariance(t)?,
        });
    }

    let (control_slope, control_intercept) = least_squares(
        &rows.iter().map(|r| r.t).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.var_control).collect::<Vec<_>>(),
    );
    let analytic: Vec<f64> = rows.iter().map(|r| r.var_analytic).collect();
    let plateau_analytic = plateau(&analytic);
    let empirical_plateau = rows
        .iter()
        .map(|r| r.var_empirical)
        .collect::<Option<Vec<f64>>>()
        .map(|v| plateau(&v));
    let classification = if plateau_analytic && control_slope > 0.0 {
        Classification::Hyperuniform
    } else {
        Classification::Persistent
    };
    Ok(HyperReport {
        kernel: model.kernel().name(),
        rows,
        control_slope,
        control_intercept,
        plateau: plateau_analytic,
        empirical_plateau,
        classification,
    })
}

/// Ordinary least-squares fit `y ≈ slope · x + intercept`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fraction of `reps` KS comparisons between independently seeded sample
/// pairs from `draw` that do not reject at 1%.
pub fn ks_acceptance_rate<F>(reps: usize, mut draw: F) -> Result<f64>
where
    F: FnMut(usize) -> Result<(Vec<f64>, Vec<f64>)>,
{
    let mut accepted = 0;
    for r in 0..reps {
        let (a, b) = draw(r)?;
        if !ks_two_sample(&a, &b)?.reject {
            accepted += 1;
        }
    }
    Ok(accepted as f64 / reps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyMeasure;
    use approx::assert_relative_eq;

    fn ou_two_point() -> MovingAverage {
        MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::two_point(1.0).unwrap())
    }

    #[test]
    fn zero_frequency_is_inconclusive() {
        let base = FddSpec::single(vec![0.0], 1.0, 0.0).unwrap();
        let r = cf_convergence(&ou_two_point(), &base, &[5.0, 10.0, 20.0], &[0.0], 1e-3).unwrap();
        assert!(r.entries.iter().all(|e| e.dist_claimed == Some(0.0) && e.dist_boundary == Some(0.0)));
        assert_eq!(r.winner, Winner::Inconclusive);
    }

    #[test]
    fn empty_window_distance_is_distance_from_one() {
        let m = ou_two_point();
        let base = FddSpec::single(vec![0.0], 1.0, 0.0).unwrap();
        let zs = [-1.0, 0.5, 2.0];
        let r = cf_convergence(&m, &base, &[0.0], &zs, 1e-3).unwrap();
        let sup = |v| {
            zs.iter().fold(0.0f64, |acc, &z| {
                let c = m.log_cf_limit(&base.scaled(z), v).unwrap().cf();
                acc.max((Complex64::new(1.0, 0.0) - c).norm())
            })
        };
        assert_relative_eq!(r.entries[0].dist_claimed.unwrap(), sup(LimitVariant::Claimed), epsilon = 1e-14);
        assert_relative_eq!(r.entries[0].dist_boundary.unwrap(), sup(LimitVariant::BoundaryAugmented), epsilon = 1e-14);
        assert_eq!(r.winner, Winner::Inconclusive);
    }

    #[test]
    fn control_kernel_rejected() {
        let m = MovingAverage::new(Kernel1D::persistent_control(), LevyMeasure::two_point(1.0).unwrap());
        let base = FddSpec::single(vec![0.0], 1.0, 0.0).unwrap();
        assert!(matches!(
            cf_convergence(&m, &base, &[1.0], &[1.0], 1e-3),
            Err(Error::NotAvailable { .. })
        ));
    }

    #[test]
    fn ks_identical_and_shifted() {
        let a: Vec<f64> = (0..500).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
        let b: Vec<f64> = a.iter().map(|x| x + 250.0).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert_relative_eq!(r.statistic, 0.5, epsilon = 1e-12);
        assert!(r.reject);
        assert_relative_eq!(r.critical_1pct, 1.628 * (2.0f64 / 500.0).sqrt());
        assert!(ks_two_sample(&a[..50], &a).is_err());
    }

    #[test]
    fn ks_handles_ties() {
        let a = vec![1.0; 200];
        let b: Vec<f64> = (0..200).map(|i| if i < 100 { 1.0 } else { 2.0 }).collect();
        assert_relative_eq!(ks_two_sample(&a, &b).unwrap().statistic, 0.5);
    }

    #[test]
    fn hyperuniform_signed_ou() {
        let r = hyperuniformity(&ou_two_point(), &[1.0, 2.0, 5.0, 10.0, 20.0], HyperSimulation::default()).unwrap();
        for row in &r.rows {
            let t = row.t;
            assert_relative_eq!(row.var_analytic, 2.0 - 2.0 * (-t).exp() * (1.0 + t), epsilon = 1e-12);
        }
        assert_relative_eq!(r.rows[0].var_analytic, 0.528482, epsilon = 1e-6);
        assert_relative_eq!(r.rows[1].var_analytic, 1.187988, epsilon = 1e-6);
        assert_eq!(r.classification, Classification::Hyperuniform);
        assert!((r.control_slope - 1.0).abs() < 0.1, "{}", r.control_slope);
    }

    #[test]
    fn control_kernel_is_persistent() {
        let m = MovingAverage::new(Kernel1D::persistent_control(), LevyMeasure::two_point(1.0).unwrap());
        let r = hyperuniformity(&m, &[1.0, 2.0, 5.0, 10.0, 20.0], HyperSimulation::default()).unwrap();
        assert_eq!(r.classification, Classification::Persistent);
        assert!(!r.plateau);
    }

    #[test]
    fn hyperuniformity_needs_three_sizes() {
        assert!(matches!(
            hyperuniformity(&ou_two_point(), &[1.0], HyperSimulation::default()),
            Err(Error::InvalidParameter(_))
        ));
        let its = MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::inner_truncated_stable(1.5, 1.0, 0.1).unwrap());
        assert!(matches!(
            hyperuniformity(&its, &[1.0, 2.0, 3.0], HyperSimulation::default()),
            Err(Error::DivergentMoment(_))
        ));
    }

    #[test]
    fn least_squares_line() {
        let (s, i) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert_relative_eq!(s, 2.0);
        assert_relative_eq!(i, 1.0);
    }

    #[test]
    fn consistency_needs_enough_replicates() {
        let cfg = SimConfig::new(LevyMeasure::two_point(1.0).unwrap(), Kernel1D::signed_ou(), 1.0, vec![vec![0.0]])
            .unwrap()
            .with_replicates(100);
        assert!(mc_consistency(&ou_two_point(), &cfg, &[1.0], 1).is_err());
    }
}
