//! Characteristic functions, covariances and integrability diagnostics of
//! the moving average `X(t) = ∫ f(t - x) Λ(dx)`.
//!
//! All log-characteristic functions are computed from the shot-noise form
//!
//! ```text
//! log E exp(i Σⱼ zⱼ Vⱼ) = ∫ ds ∫ ν(dy) (e^{i y w(s)} - 1)
//! ```
//!
//! where `w(s)` is the deterministic weight a single jump at `s` contributes
//! to the linear functional `Σⱼ zⱼ Vⱼ`. The inner integral is the Lévy
//! exponent `ψ(w)` of the measure; the outer one runs over a box outside of
//! which `|e^{iyw} - 1| ≤ |y||w|` is below the quadrature tolerance.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::ProductKernel;
use crate::levy::{LevyKind, LevyMeasure};
use crate::quadrature::{
    knots_between, try_integrate_box, try_integrate_levy, try_integrate_pieces, QuadOptions, QuadResult,
};

/// `e^{ix} - 1` without cancellation for small `x`.
pub(crate) fn expm1_i(x: f64) -> Complex64 {
    let h = (0.5 * x).sin();
    Complex64::new(-2.0 * h * h, x.sin())
}

/// `∫_0^b (cos x - 1) x^{-1-α} dx` for `0 ≤ b ≤ 1`, by its power series.
fn cos_power_head(alpha: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 1..=12 {
        let n = 2 * k;
        fact *= ((n - 1) * n) as f64;
        let term = b.powf(n as f64 - alpha) / (fact * (n as f64 - alpha));
        sum += if k % 2 == 1 { -term } else { term };
    }
    sum
}

/// `∫_X^∞ cos x · x^{-p} dx` for large `X`, from the expansion obtained by
/// repeated integration by parts.
fn cos_power_tail(p: f64, x: f64) -> f64 {
    // Σ_n (-i)^n (p)_n X^{-n}, times i e^{iX} X^{-p}.
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..10 {
        term *= Complex64::new(0.0, -(p + n as f64) / x);
        sum += term;
    }
    (Complex64::new(0.0, 1.0) * Complex64::from_polar(x.powf(-p), x) * sum).re
}

/// `ψ(w) = 2c |w|^α ∫_{|w|δ}^∞ (cos x - 1) x^{-1-α} dx` for the
/// inner-truncated stable measure. The oscillatory tail beyond `X = 40` is
/// summed asymptotically instead of integrated.
fn stable_tail_exponent(alpha: f64, scale: f64, delta: f64, w: f64, opts: &QuadOptions) -> Result<QuadResult<Complex64>> {
    const X: f64 = 40.0;
    let pre = 2.0 * scale * w.abs().powf(alpha);
    let a = w.abs() * delta;
    let mut integral = 0.0;
    let mut lo = a;
    if a < 1.0 {
        integral += cos_power_head(alpha, 1.0) - cos_power_head(alpha, a);
        lo = 1.0;
    }
    let hi = lo.max(X);
    let body = try_integrate_pieces(
        |x: f64| Ok((-2.0 * (0.5 * x).sin().powi(2)) * x.powf(-1.0 - alpha)),
        &[lo, hi],
        &QuadOptions {
            tol: opts.tol / pre,
            ..*opts
        },
    )?;
    integral += body.value + cos_power_tail(1.0 + alpha, hi) - hi.powf(-alpha) / alpha;
    Ok(QuadResult {
        value: Complex64::new(pre * integral, 0.0),
        error_estimate: pre * body.error_estimate,
        evaluations: body.evaluations,
    })
}

/// Window side `T`, anchor points `l_j ∈ ℝ^d` and frequencies `z_j` of a
/// joint characteristic function of window integrals `S_{T,l_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FddSpec {
    ls: Vec<Vec<f64>>,
    zs: Vec<f64>,
    t: f64,
}

impl FddSpec {
    pub fn new(ls: Vec<Vec<f64>>, zs: Vec<f64>, t: f64) -> Result<Self> {
        if ls.is_empty() {
            return Err(Error::invalid("at least one anchor point is required"));
        }
        if ls.len() != zs.len() {
            return Err(Error::invalid(format!(
                "{} anchor points but {} frequencies",
                ls.len(),
                zs.len()
            )));
        }
        let d = ls[0].len();
        if d == 0 || ls.iter().any(|l| l.len() != d) {
            return Err(Error::invalid("anchor points must share a positive dimension"));
        }
        if ls.iter().flatten().chain(&zs).any(|v| !v.is_finite()) {
            return Err(Error::invalid("anchor points and frequencies must be finite"));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid(format!("window side must be finite and non-negative, got {t}")));
        }
        Ok(FddSpec { ls, zs, t })
    }

    /// One window anchored at `l` with frequency `z`.
    pub fn single(l: Vec<f64>, z: f64, t: f64) -> Result<Self> {
        FddSpec::new(vec![l], vec![z], t)
    }

    pub fn dim(&self) -> usize {
        self.ls[0].len()
    }

    pub fn m(&self) -> usize {
        self.ls.len()
    }

    pub fn ls(&self) -> &[Vec<f64>] {
        &self.ls
    }

    pub fn zs(&self) -> &[f64] {
        &self.zs
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        FddSpec::new(self.ls.clone(), self.zs.clone(), t)
    }

    /// Same anchors with every frequency multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        FddSpec {
            ls: self.ls.clone(),
            zs: self.zs.iter().map(|z| z * factor).collect(),
            t: self.t,
        }
    }

    fn max_abs_z(&self) -> f64 {
        self.zs.iter().fold(0.0, |m, z| m.max(z.abs()))
    }

    fn anchor_range(&self, k: usize) -> (f64, f64) {
        self.ls.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
            (lo.min(l[k]), hi.max(l[k]))
        })
    }
}

/// A log-characteristic-function value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfValue {
    pub log_cf: Complex64,
    pub error_estimate: f64,
}

impl CfValue {
    fn zero() -> Self {
        CfValue {
            log_cf: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
        }
    }

    pub fn cf(&self) -> Complex64 {
        self.log_cf.exp()
    }
}

/// Candidate weak limits of the window integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitVariant {
    /// `Y_l = (-1)^d ∫ ∏ gₖ(lₖ - xₖ) Λ(dx)`.
    Claimed,
    /// The claimed field plus the contribution of the far corners of the
    /// window, which separate from the near corner as `T` grows. For `d = 1`
    /// this adds an independent copy of `+∫ g(l - u) Λ(du)`.
    BoundaryAugmented,
}

impl LimitVariant {
    pub fn name(self) -> &'static str {
        match self {
            LimitVariant::Claimed => "claimed",
            LimitVariant::BoundaryAugmented => "boundary_augmented",
        }
    }
}

/// One row of a characteristic-function table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfPoint {
    pub z: f64,
    pub log_cf: Complex64,
    pub cf: Complex64,
    /// Quadrature error estimate for analytic tables, confidence radius for
    /// empirical ones.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfEvaluation {
    pub label: String,
    pub points: Vec<CfPoint>,
}

impl CfEvaluation {
    /// Evaluates `eval` on every grid point, in parallel. The output order
    /// follows `zs` regardless of scheduling.
    pub fn tabulate<F>(label: impl Into<String>, zs: &[f64], eval: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<CfValue> + Sync,
    {
        let points = zs
            .par_iter()
            .map(|&z| {
                let v = eval(z)?;
                Ok(CfPoint {
                    z,
                    log_cf: v.log_cf,
                    cf: v.cf(),
                    error: v.error_estimate,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CfEvaluation {
            label: label.into(),
            points,
        })
    }
}

/// Integrals (i)–(iii) guaranteeing that the kernel is integrable with
/// respect to the random measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub pass: [bool; 3],
    pub error_estimates: [f64; 3],
}

/// Exact and quadrature values of `∫ C(t) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceIntegral {
    pub exact: f64,
    pub quadrature: f64,
}

/// A stationary infinitely divisible moving average: kernel, Lévy measure
/// and the quadrature settings used for every analytic quantity.
#[derive(Debug, Clone)]
pub struct MovingAverage {
    kernel: ProductKernel,
    measure: LevyMeasure,
    quad: QuadOptions,
}

impl MovingAverage {
    pub fn new(kernel: impl Into<ProductKernel>, measure: LevyMeasure) -> Self {
        MovingAverage {
            kernel: kernel.into(),
            measure,
            quad: QuadOptions::default(),
        }
    }

    pub fn with_quad(mut self, quad: QuadOptions) -> Self {
        self.quad = quad;
        self
    }

    pub fn kernel(&self) -> &ProductKernel {
        &self.kernel
    }

    pub fn measure(&self) -> &LevyMeasure {
        &self.measure
    }

    pub fn quad(&self) -> &QuadOptions {
        &self.quad
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    fn require_antiderivative(&self, operation: &'static str) -> Result<()> {
        match self.kernel.components().iter().find(|k| !k.has_antiderivative()) {
            None => Ok(()),
            Some(k) => Err(Error::NotAvailable {
                operation,
                kernel: k.kind().name(),
            }),
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d == self.dim() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "point of dimension {d} for a kernel of dimension {}",
                self.dim()
            )))
        }
    }

    /// `a = ∫ f · ∫_{-1}^{1} y ν(dy)`.
    pub fn shift_constant(&self) -> f64 {
        self.kernel.integral_f() * self.measure.compensator_integral()
    }

    /// `ψ(w) = ∫ (e^{iyw} - 1) ν(dy)`.
    pub fn levy_exponent(&self, w: f64, opts: &QuadOptions) -> Result<QuadResult<Complex64>> {
        if w == 0.0 {
            return Ok(QuadResult {
                value: Complex64::new(0.0, 0.0),
                error_estimate: 0.0,
                evaluations: 0,
            });
        }
        if let LevyKind::InnerTruncatedStable { alpha, scale, delta } = *self.measure.kind() {
            return stable_tail_exponent(alpha, scale, delta, w, opts);
        }
        try_integrate_levy(|y| Ok(expm1_i(y * w)), &self.measure, opts)
    }

    // Radius outside of which a weight bounded by |z| m sup|kernel| is
    // negligible at the configured tolerance.
    fn truncation_radius(&self, m: usize, max_z: f64) -> f64 {
        let scale = self.measure.abs_moment() * m as f64 * max_z;
        self.kernel.decay_radius(self.quad.tol / scale.max(f64::MIN_POSITIVE))
    }

    /// `∫ ψ(w(s)) ds` over the box described by `knots`.
    fn integrate_exponent<W>(&self, knots: Vec<Vec<f64>>, weight: W) -> Result<CfValue>
    where
        W: Fn(&[f64]) -> Result<f64>,
    {
        let volume: f64 = knots
            .iter()
            .map(|k| (k[k.len() - 1] - k[0]).max(1.0))
            .product();
        let inner = QuadOptions {
            tol: 0.5 * self.quad.tol / volume,
            ..self.quad
        };
        let outer = QuadOptions {
            tol: 0.5 * self.quad.tol,
            ..self.quad
        };
        let mut inner_error: f64 = 0.0;
        let r = try_integrate_box(
            &mut |s: &[f64]| {
                let psi = self.levy_exponent(weight(s)?, &inner)?;
                inner_error = inner_error.max(psi.error_estimate);
                Ok(psi.value)
            },
            &knots,
            &outer,
        )?;
        Ok(CfValue {
            log_cf: r.value,
            error_estimate: r.error_estimate + volume * inner_error,
        })
    }

    /// `log E e^{izX(0)} = -iza + ∫∫ (e^{izyf(s)} - 1) ds ν(dy)`.
    pub fn log_cf_stationary(&self, z: f64) -> Result<CfValue> {
        if z == 0.0 {
            return Ok(CfValue::zero());
        }
        let r = self.truncation_radius(1, z.abs());
        let knots = self
            .kernel
            .components()
            .iter()
            .map(|k| knots_between(-r, r, k.kinks()))
            .collect();
        let mut v = self.integrate_exponent(knots, |s| Ok(z * self.kernel.f(s)))?;
        v.log_cf -= Complex64::new(0.0, z * self.shift_constant());
        Ok(v)
    }

    /// `J_T(s) = Σⱼ zⱼ ∏ₖ (gₖ(T + l_{j,k} - sₖ) - gₖ(l_{j,k} - sₖ))`, exact.
    pub fn j_t(&self, spec: &FddSpec, s: &[f64]) -> Result<f64> {
        self.require_antiderivative("j_t")?;
        self.check_dim(spec.dim())?;
        self.check_dim(s.len())?;
        let t = spec.t();
        let mut total = 0.0;
        for (l, &z) in spec.ls().iter().zip(spec.zs()) {
            let mut prod = z;
            for ((k, &lk), &sk) in self.kernel.components().iter().zip(l).zip(s) {
                prod *= k.window_increment(lk - sk, t + lk - sk)?;
            }
            total += prod;
        }
        Ok(total)
    }

    /// `Σⱼ zⱼ ∏ₖ gₖ(l_{j,k} - sₖ)`.
    fn anchored_g_sum(&self, spec: &FddSpec, s: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (l, &z) in spec.ls().iter().zip(spec.zs()) {
            let mut prod = z;
            for ((k, &lk), &sk) in self.kernel.components().iter().zip(l).zip(s) {
                prod *= k.g_or_err(lk - sk, "log_cf_limit")?;
            }
            total += prod;
        }
        Ok(total)
    }

    // Per-coordinate knots covering [min l - R, T + max l + R] with the
    // kernel kinks translated to every place they show up in J_T.
    fn window_knots(&self, spec: &FddSpec, t: f64) -> Vec<Vec<f64>> {
        let r = self.truncation_radius(spec.m(), spec.max_abs_z());
        self.kernel
            .components()
            .iter()
            .enumerate()
            .map(|(k, comp)| {
                let (lo, hi) = spec.anchor_range(k);
                let mut breaks = Vec::new();
                for l in spec.ls() {
                    for kink in comp.kinks() {
                        breaks.push(l[k] - kink);
                        if t > 0.0 {
                            breaks.push(t + l[k] - kink);
                        }
                    }
                }
                knots_between(lo - r, t + hi + r, &breaks)
            })
            .collect()
    }

    /// Joint log-characteristic function of `(S_{T,l_1}, …, S_{T,l_m})`.
    pub fn log_cf_window(&self, spec: &FddSpec) -> Result<CfValue> {
        self.require_antiderivative("log_cf_window")?;
        self.check_dim(spec.dim())?;
        if spec.max_abs_z() == 0.0 || spec.t() == 0.0 {
            return Ok(CfValue::zero());
        }
        self.integrate_exponent(self.window_knots(spec, spec.t()), |s| self.j_t(spec, s))
    }

    /// Log-characteristic function of a candidate limit field at `spec`
    /// (the window side is ignored).
    pub fn log_cf_limit(&self, spec: &FddSpec, variant: LimitVariant) -> Result<CfValue> {
        self.require_antiderivative("log_cf_limit")?;
        self.check_dim(spec.dim())?;
        if spec.max_abs_z() == 0.0 {
            return Ok(CfValue::zero());
        }
        let knots = self.window_knots(spec, 0.0);
        let d = self.dim() as i32;
        match variant {
            LimitVariant::Claimed => {
                let sign = (-1f64).powi(d);
                self.integrate_exponent(knots, |s| Ok(sign * self.anchored_g_sum(spec, s)?))
            }
            LimitVariant::BoundaryAugmented => {
                // The 2^d corners of the window carry weight ±G; half of
                // them have each sign.
                let plus = self.integrate_exponent(knots.clone(), |s| self.anchored_g_sum(spec, s))?;
                let minus = self.integrate_exponent(knots, |s| Ok(-self.anchored_g_sum(spec, s)?))?;
                let corners = 2f64.powi(d - 1);
                Ok(CfValue {
                    log_cf: (plus.log_cf + minus.log_cf) * corners,
                    error_estimate: (plus.error_estimate + minus.error_estimate) * corners,
                })
            }
        }
    }

    /// `C(t) = ∫ y² ν(dy) ∫ f(-x) f(t - x) dx`.
    pub fn covariance(&self, t: &[f64]) -> Result<f64> {
        self.check_dim(t.len())?;
        Ok(self.measure.second_moment()? * self.kernel.autocorrelation_f(t))
    }

    /// `∫ C(t) dt = ∫ y² ν(dy) (∫ f)²`, together with a direct quadrature of
    /// the covariance over `[-R, R]^d`, `R = 2 · decay_radius(1e-8)`.
    pub fn covariance_integral(&self) -> Result<CovarianceIntegral> {
        let m2 = self.measure.second_moment()?;
        let exact = m2 * self.kernel.integral_f().powi(2);
        let mut quadrature = m2;
        for k in self.kernel.components() {
            let r = 2.0 * k.decay_radius(1e-8);
            let q = try_integrate_pieces(
                |u| Ok(k.autocorrelation_f(u)),
                &knots_between(-r, r, &k.lag_kinks()),
                &self.quad,
            )?;
            quadrature *= q.value;
        }
        Ok(CovarianceIntegral { exact, quadrature })
    }

    /// `Var S_{T,0} = ∫ y² ν(dy) ∫ J_T(s)² ds` with a single unit frequency,
    /// which factorises into `∏ₖ (2 ∫gₖ² - 2 ∫ gₖ(u) gₖ(u + T) du)`.
    pub fn variance_window(&self, t: f64) -> Result<f64> {
        self.require_antiderivative("variance_window")?;
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("window side must be non-negative, got {t}")));
        }
        let m2 = self.measure.second_moment()?;
        let mut v = m2;
        for k in self.kernel.components() {
            let l2 = k.norms().l2sq_g.expect("antiderivative checked");
            let lag = k.autocorrelation_g(t).expect("antiderivative checked");
            v *= 2.0 * (l2 - lag);
        }
        Ok(v)
    }

    /// `Var S_{T,0}` from the covariance: `∏ₖ ∫_{-T}^{T} (T - |u|) R_{fₖ}(u) du`
    /// times the second moment. Works for any kernel.
    pub fn variance_window_from_covariance(&self, t: f64) -> Result<f64> {
        let m2 = self.measure.second_moment()?;
        let mut v = m2;
        for k in self.kernel.components() {
            v *= k.window_autocorrelation_mass(t, &self.quad)?;
        }
        Ok(v)
    }

    /// Evaluates integrability conditions (i)–(iii) with an evaluation
    /// budget of `budget` per condition.
    pub fn check_conditions(&self, budget: usize) -> ConditionsReport {
        let opts = QuadOptions {
            tol: self.quad.tol,
            max_evaluations: budget,
        };
        let r = self.kernel.decay_radius(self.quad.tol);
        let knots: Vec<Vec<f64>> = self
            .kernel
            .components()
            .iter()
            .map(|k| knots_between(-r, r, k.kinks()))
            .collect();
        let nu = &self.measure;

        let c1 = |a: f64| {
            let inv = 1.0 / a;
            a * (nu.signed_moment_between(1.0, inv) - nu.signed_moment_between(inv, 1.0)).abs()
        };
        let c2 = |a: f64| nu.mass_at_least(1.0 / a);
        let c3 = |a: f64| a * a * nu.second_moment_below(1.0 / a);
        let integrands: [&dyn Fn(f64) -> f64; 3] = [&c1, &c2, &c3];

        let mut report = ConditionsReport {
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            pass: [false; 3],
            error_estimates: [0.0; 3],
        };
        for (i, h) in integrands.iter().enumerate() {
            let result = try_integrate_box(
                &mut |s: &[f64]| {
                    let a = self.kernel.f(s).abs();
                    Ok(if a == 0.0 { 0.0 } else { h(a) })
                },
                &knots,
                &opts,
            );
            let (value, err, ok) = match result {
                Ok(q) => (q.value, q.error_estimate, q.value.is_finite()),
                Err(Error::NonConvergence {
                    value_estimate,
                    error_estimate,
                    ..
                }) => (value_estimate, error_estimate, false),
                Err(_) => (f64::NAN, f64::NAN, false),
            };
            match i {
                0 => report.c1 = value,
                1 => report.c2 = value,
                _ => report.c3 = value,
            }
            report.error_estimates[i] = err;
            report.pass[i] = ok;
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_exponent_against_gamma_route() {
        // ∫_0^∞ (cos x - 1) x^{-5/2} dx = Γ(-3/2) cos(3π/4), Γ(-3/2) = 4√π/3.
        let full = 4.0 * std::f64::consts::PI.sqrt() / 3.0 * (0.75 * std::f64::consts::PI).cos();
        let opts = QuadOptions::with_tol(1e-12);
        for (w, delta) in [(3.0, 0.1), (0.5, 0.05), (50.0, 0.1), (-7.0, 2.0)] {
            let a: f64 = f64::abs(w) * delta;
            // Reference: the full-line value minus the head, the head split at 1
            // when needed so the series stays accurate.
            let head = if a <= 1.0 {
                cos_power_head(1.5, a)
            } else {
                let q = try_integrate_pieces(
                    |x: f64| Ok((x.cos() - 1.0) * x.powf(-2.5)),
                    &[1.0, a],
                    &QuadOptions::with_tol(1e-14),
                )
                .unwrap();
                cos_power_head(1.5, 1.0) + q.value
            };
            let expected = 2.0 * 0.7 * f64::abs(w).powf(1.5) * (full - head);
            let got = stable_tail_exponent(1.5, 0.7, delta, w, &opts).unwrap();
            assert!((got.value.re - expected).abs() < 1e-9 * expected.abs().max(1.0), "w={w}: {} vs {expected}", got.value.re);
        }
    }
    use crate::kernel::Kernel1D;
    use approx::assert_relative_eq;

    // Cin(1) = Σ_{k≥1} (-1)^{k+1} / (2k (2k)!), summed to machine precision.
    fn cin_one() -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 1..12 {
            fact *= ((2 * k - 1) * (2 * k)) as f64;
            let term = 1.0 / (2.0 * k as f64 * fact);
            sum += if k % 2 == 1 { term } else { -term };
        }
        sum
    }

    fn ou_two_point() -> MovingAverage {
        MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::two_point(1.0).unwrap())
    }

    #[test]
    fn shift_constants() {
        let d = LevyMeasure::dickman();
        assert_eq!(MovingAverage::new(Kernel1D::signed_ou(), d).shift_constant(), 0.0);
        assert_eq!(MovingAverage::new(Kernel1D::persistent_control(), d).shift_constant(), 1.0);
        let tp = LevyMeasure::two_point(1.0).unwrap();
        assert_eq!(MovingAverage::new(Kernel1D::persistent_control(), tp).shift_constant(), 0.0);
    }

    #[test]
    fn stationary_cf_at_one() {
        let v = ou_two_point().log_cf_stationary(1.0).unwrap();
        assert!((v.log_cf.re + 2.0 * cin_one()).abs() < 1e-8, "{:?}", v);
        assert!(v.log_cf.im.abs() < 1e-12);
        assert_eq!(ou_two_point().log_cf_stationary(0.0).unwrap().log_cf, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn stationary_cf_small_z_matches_second_order() {
        let z = 0.05;
        let v = ou_two_point().log_cf_stationary(z).unwrap();
        let approx = -z * z / 2.0;
        assert!(((v.log_cf.re - approx) / approx).abs() < 0.01);
    }

    #[test]
    fn j_t_examples() {
        let ma = ou_two_point();
        let spec = FddSpec::single(vec![0.0], 1.0, 1.0).unwrap();
        assert_relative_eq!(ma.j_t(&spec, &[0.0]).unwrap(), (-1f64).exp() - 1.0, epsilon = 1e-15);
        assert_eq!(ma.j_t(&spec, &[1e6]).unwrap(), 0.0);

        let ma2 = MovingAverage::new(
            ProductKernel::power(Kernel1D::signed_ou(), 2).unwrap(),
            LevyMeasure::two_point(1.0).unwrap(),
        );
        let spec2 = FddSpec::single(vec![0.0, 0.0], 1.0, 1.0).unwrap();
        let e = (-1f64).exp() - 1.0;
        assert!((ma2.j_t(&spec2, &[0.0, 0.0]).unwrap() - e * e).abs() < 1e-12);
        assert!(ma2.j_t(&spec2, &[0.0]).is_err());
    }

    #[test]
    fn limit_cfs() {
        let ma = ou_two_point();
        let spec = FddSpec::single(vec![0.0], 1.0, 0.0).unwrap();
        let c = ma.log_cf_limit(&spec, LimitVariant::Claimed).unwrap();
        let b = ma.log_cf_limit(&spec, LimitVariant::BoundaryAugmented).unwrap();
        assert!((c.log_cf.re + 2.0 * cin_one()).abs() < 1e-8);
        assert!((b.log_cf.re + 4.0 * cin_one()).abs() < 1e-8);
        let zero = FddSpec::single(vec![0.0], 0.0, 3.0).unwrap();
        assert_eq!(ma.log_cf_limit(&zero, LimitVariant::Claimed).unwrap().log_cf.re, 0.0);
    }

    #[test]
    fn window_cf_edge_cases() {
        let ma = ou_two_point();
        assert_eq!(
            ma.log_cf_window(&FddSpec::single(vec![0.0], 0.0, 5.0).unwrap()).unwrap().log_cf,
            Complex64::new(0.0, 0.0)
        );
        let tiny = ma.log_cf_window(&FddSpec::single(vec![0.0], 1.0, 1e-6).unwrap()).unwrap();
        assert!(tiny.log_cf.norm() < 1e-9);
        let control = MovingAverage::new(Kernel1D::persistent_control(), LevyMeasure::dickman());
        assert!(matches!(
            control.log_cf_window(&FddSpec::single(vec![0.0], 1.0, 1.0).unwrap()),
            Err(Error::NotAvailable { .. })
        ));
    }

    #[test]
    fn covariances() {
        let ma = ou_two_point();
        assert_relative_eq!(ma.covariance(&[0.0]).unwrap(), 1.0);
        assert!(ma.covariance(&[1.0]).unwrap().abs() < 1e-16);
        let dk = MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::dickman());
        assert_relative_eq!(dk.covariance(&[2.0]).unwrap(), -0.5 * (-2f64).exp(), epsilon = 1e-15);
        let its = MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::inner_truncated_stable(1.5, 1.0, 0.1).unwrap());
        assert!(matches!(its.covariance(&[0.0]), Err(Error::DivergentMoment(_))));
    }

    #[test]
    fn covariance_integrals() {
        let ci = ou_two_point().covariance_integral().unwrap();
        assert_eq!(ci.exact, 0.0);
        assert!(ci.quadrature.abs() < 1e-6);
        let pc = MovingAverage::new(Kernel1D::persistent_control(), LevyMeasure::two_point(1.0).unwrap());
        let ci = pc.covariance_integral().unwrap();
        assert_eq!(ci.exact, 1.0);
        assert!(ci.quadrature > 0.9);
        let gd = MovingAverage::new(Kernel1D::gauss_deriv(), LevyMeasure::dickman());
        assert_eq!(gd.covariance_integral().unwrap().exact, 0.0);
    }

    #[test]
    fn window_variances() {
        let ma = ou_two_point();
        assert_eq!(ma.variance_window(0.0).unwrap(), 0.0);
        assert_relative_eq!(ma.variance_window(2.0).unwrap(), 2.0 - 6.0 * (-2f64).exp(), epsilon = 1e-14);
        let dk = MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::dickman());
        assert!((dk.variance_window(60.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditions_signed_ou_dickman() {
        let r = MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::dickman()).check_conditions(1_000_000);
        assert_eq!(r.pass, [true, true, true]);
        assert!(r.c1.abs() < 1e-12);
        assert!(r.c2.abs() < 1e-12);
        assert!((r.c3 - 0.5).abs() < 1e-6, "{}", r.c3);
    }

    #[test]
    fn conditions_signed_ou_two_point() {
        let r = ou_two_point().check_conditions(1_000_000);
        assert_eq!(r.pass, [true, true, true]);
        assert!((r.c3 - 1.0).abs() < 1e-6);
        assert!(r.c2.abs() < 1e-12);
    }

    #[test]
    fn conditions_budget_exhaustion_fails_flags() {
        let r = MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::dickman())
            .with_quad(QuadOptions::with_tol(1e-15))
            .check_conditions(30);
        assert!(r.pass.iter().any(|p| !p));
    }
}
