//! Exact shot-noise simulation.
//!
//! A realisation of the Poisson point process of (location, jump size)
//! pairs is drawn on a box that covers every window of interest plus a pad
//! on each side. Jumps with `|y| < ε` are discarded. Window integrals are
//! then evaluated in closed form, jump by jump, from increments of the
//! kernel antiderivative, so they carry no discretisation error.
//!
//! Replicate `r` of a Monte Carlo run draws from ChaCha8 keyed by the run
//! seed with stream number `r`. Results therefore do not depend on the
//! number of worker threads or on the order in which replicates finish.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{CfEvaluation, CfPoint};
use crate::error::{Error, Result};
use crate::kernel::ProductKernel;
use crate::levy::LevyMeasure;

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_GRID_STEP: f64 = 0.05;

/// Axis-aligned box `∏ [loₖ, hiₖ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("window bounds must have the same positive dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(Error::invalid("window bounds must be finite and ordered"));
        }
        Ok(Window { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// The box shrunk by `pad` on every side (possibly empty).
    pub fn shrink(&self, pad: f64) -> (Vec<f64>, Vec<f64>) {
        (
            self.lo.iter().map(|a| a + pad).collect(),
            self.hi.iter().map(|b| b - pad).collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub measure: LevyMeasure,
    pub kernel: ProductKernel,
    /// Window side `T`.
    pub t: f64,
    /// Anchor points `l`; the windows are `[0, T]^d + l`.
    pub ls: Vec<Vec<f64>>,
    /// Jumps with `|y| < epsilon` are not simulated.
    pub epsilon: f64,
    pub window_pad: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Trapezoid step for kernels without an antiderivative.
    pub grid_step: f64,
}

impl SimConfig {
    /// Defaults: `ε = 1e-3`, pad `= decay_radius(1e-8)`, one replicate,
    /// seed 0.
    pub fn new(measure: LevyMeasure, kernel: impl Into<ProductKernel>, t: f64, ls: Vec<Vec<f64>>) -> Result<Self> {
        let kernel = kernel.into();
        let window_pad = kernel.decay_radius(1e-8);
        let cfg = SimConfig {
            measure,
            kernel,
            t,
            ls,
            epsilon: DEFAULT_EPSILON,
            window_pad,
            replicates: 1,
            seed: 0,
            grid_step: DEFAULT_GRID_STEP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_window_pad(mut self, pad: f64) -> Self {
        self.window_pad = pad;
        self
    }

    pub fn with_replicates(mut self, n: usize) -> Self {
        self.replicates = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_grid_step(mut self, step: f64) -> Self {
        self.grid_step = step;
        self
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.ls.is_empty() {
            return Err(Error::invalid("at least one anchor point is required"));
        }
        if self.ls.iter().any(|l| l.len() != d || l.iter().any(|v| !v.is_finite())) {
            return Err(Error::invalid(format!("anchor points must be finite and of dimension {d}")));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::invalid(format!("window side must be finite and non-negative, got {}", self.t)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.window_pad >= 0.0 && self.window_pad.is_finite()) {
            return Err(Error::invalid(format!("window pad must be finite and non-negative, got {}", self.window_pad)));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("at least one replicate is required"));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::invalid(format!("grid step must be positive, got {}", self.grid_step)));
        }
        Ok(())
    }

    /// `∏ₖ [min lₖ - pad, T + max lₖ + pad]`.
    pub fn window(&self) -> Window {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for l in &self.ls {
            for k in 0..d {
                lo[k] = lo[k].min(l[k]);
                hi[k] = hi[k].max(l[k]);
            }
        }
        Window {
            lo: lo.iter().map(|a| a - self.window_pad).collect(),
            hi: hi.iter().map(|b| b + self.t + self.window_pad).collect(),
        }
    }
}

/// A realisation of the jump point process inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSet {
    d: usize,
    locations: Vec<f64>,
    sizes: Vec<f64>,
    window: Window,
    pad: f64,
    epsilon: f64,
}

impl JumpSet {
    pub fn empty(window: Window, epsilon: f64) -> Self {
        JumpSet {
            d: window.dim(),
            locations: Vec::new(),
            sizes: Vec::new(),
            window,
            pad: 0.0,
            epsilon,
        }
    }

    /// A hand-built jump set; every point must lie in `window` and every
    /// size must satisfy `|y| ≥ epsilon`.
    pub fn from_points(window: Window, epsilon: f64, points: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut set = JumpSet::empty(window, epsilon);
        for (s, y) in points {
            if s.len() != set.d || !set.window.contains(s) {
                return Err(Error::invalid(format!("jump location {s:?} is outside the window")));
            }
            if y.abs() < epsilon {
                return Err(Error::invalid(format!("jump size {y} is below the truncation level {epsilon}")));
            }
            set.locations.extend_from_slice(s);
            set.sizes.push(*y);
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.locations.chunks_exact(self.d).zip(self.sizes.iter().copied())
    }

    /// `Σᵢ yᵢ w(sᵢ)`: the stochastic integral of `w` against the simulated
    /// measure.
    pub fn weighted_sum<W: FnMut(&[f64]) -> f64>(&self, mut w: W) -> f64 {
        self.iter().map(|(s, y)| y * w(s)).sum()
    }

    /// The jumps that fall inside `window`.
    pub fn restrict(&self, window: Window) -> JumpSet {
        let mut out = JumpSet::empty(window, self.epsilon);
        out.pad = self.pad;
        for (s, y) in self.iter() {
            if out.window.contains(s) {
                out.locations.extend_from_slice(s);
                out.sizes.push(y);
            }
        }
        out
    }

    fn in_interior(&self, t: &[f64]) -> bool {
        let (lo, hi) = self.window.shrink(self.pad);
        t.iter().zip(lo.iter().zip(&hi)).all(|(x, (a, b))| a <= x && x <= b)
    }
}

/// The random stream of replicate `replicate` under `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Draws the jumps of `η` restricted to the simulation window and to
/// `|y| ≥ ε`: a Poisson number of points with mean `|W| ν(|y| ≥ ε)`,
/// uniform locations, sizes by inversion.
pub fn sample_jumps<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<JumpSet> {
    let mass = cfg.measure.tail_mass(cfg.epsilon);
    if !(mass > 0.0) {
        return Err(Error::EmptyTruncation { epsilon: cfg.epsilon });
    }
    let window = cfg.window();
    let mean = window.volume() * mass;
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::invalid(format!("Poisson mean {mean}: {e}")))?
            .sample(rng) as usize
    } else {
        0
    };
    let d = window.dim();
    let mut set = JumpSet::empty(window, cfg.epsilon);
    set.pad = cfg.window_pad;
    set.locations.reserve(count * d);
    set.sizes.reserve(count);
    for _ in 0..count {
        for k in 0..d {
            let u: f64 = rng.random();
            let (a, b) = (set.window.lo[k], set.window.hi[k]);
            set.locations.push(a + u * (b - a));
        }
        let u: f64 = rng.random();
        set.sizes.push(cfg.measure.truncated_quantile(cfg.epsilon, u)?);
    }
    Ok(set)
}

/// `X(t) = Σᵢ yᵢ f(t - sᵢ) - a`.
pub fn eval_field(jumps: &JumpSet, kernel: &ProductKernel, shift: f64, t: &[f64]) -> f64 {
    if !jumps.in_interior(t) {
        log::warn!("field evaluated at {t:?}, within the pad of the simulation window; the value is biased");
    }
    let mut diff = vec![0.0; t.len()];
    jumps.weighted_sum(|s| {
        for k in 0..t.len() {
            diff[k] = t[k] - s[k];
        }
        kernel.f(&diff)
    }) - shift
}

/// `S_{T,l} = Σᵢ yᵢ ∏ₖ (gₖ(T + lₖ - sᵢₖ) - gₖ(lₖ - sᵢₖ)) - a T^d`, exact.
pub fn window_integral(jumps: &JumpSet, kernel: &ProductKernel, shift: f64, t: f64, l: &[f64]) -> Result<f64> {
    if !kernel.has_antiderivative() {
        let k = kernel
            .components()
            .iter()
            .find(|k| !k.has_antiderivative())
            .expect("some component lacks g");
        return Err(Error::NotAvailable {
            operation: "window_integral",
            kernel: k.kind().name(),
        });
    }
    let comps = kernel.components();
    let mut total = 0.0;
    for (s, y) in jumps.iter() {
        let mut prod = y;
        for ((k, &lk), &sk) in comps.iter().zip(l).zip(s) {
            prod *= k.window_increment(lk - sk, t + lk - sk)?;
        }
        total += prod;
    }
    Ok(total - shift * t.powi(kernel.dim() as i32))
}

/// Trapezoid approximation of a window integral of [`eval_field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridIntegral {
    pub value: f64,
    /// `|S_h - S_{2h}| / 3`, the Richardson estimate of the step error.
    pub step_error: f64,
}

/// Tensor trapezoid rule over `[0, T]^d + l` with step at most `step`.
pub fn window_integral_grid(
    jumps: &JumpSet,
    kernel: &ProductKernel,
    shift: f64,
    t: f64,
    l: &[f64],
    step: f64,
) -> GridIntegral {
    if t == 0.0 {
        return GridIntegral {
            value: 0.0,
            step_error: 0.0,
        };
    }
    let d = l.len();
    // An even number of intervals so the coarse grid reuses every other node.
    let mut n = (t / step).ceil() as usize;
    n += n % 2;
    n = n.max(2);
    let h = t / n as f64;
    let fine_w = |i: usize| if i == 0 || i == n { 0.5 * h } else { h };
    let coarse_w = |i: usize| {
        if i % 2 == 1 {
            0.0
        } else if i == 0 || i == n {
            h
        } else {
            2.0 * h
        }
    };

    let mut idx = vec![0usize; d];
    let mut point = vec![0.0; d];
    let (mut fine, mut coarse) = (0.0, 0.0);
    loop {
        for k in 0..d {
            point[k] = l[k] + idx[k] as f64 * h;
        }
        let x = eval_field(jumps, kernel, shift, &point);
        let wf: f64 = idx.iter().map(|&i| fine_w(i)).product();
        let wc: f64 = idx.iter().map(|&i| coarse_w(i)).product();
        fine += wf * x;
        coarse += wc * x;

        let mut k = 0;
        loop {
            if k == d {
                return GridIntegral {
                    value: fine,
                    step_error: (fine - coarse).abs() / 3.0,
                };
            }
            idx[k] += 1;
            if idx[k] <= n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `Y_l = (-1)^d Σᵢ yᵢ ∏ₖ gₖ(lₖ - sᵢₖ)` for every anchor `l`.
pub fn limit_values(jumps: &JumpSet, kernel: &ProductKernel, ls: &[Vec<f64>]) -> Result<Vec<f64>> {
    let sign = (-1f64).powi(kernel.dim() as i32);
    let comps = kernel.components();
    ls.iter()
        .map(|l| {
            let mut total = 0.0;
            for (s, y) in jumps.iter() {
                let mut prod = y;
                for ((k, &lk), &sk) in comps.iter().zip(l).zip(s) {
                    prod *= k.g_or_err(lk - sk, "sample_limit")?;
                }
                total += prod;
            }
            Ok(sign * total)
        })
        .collect()
}

/// One draw of the claimed limit field at the configured anchors.
pub fn sample_limit<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<Vec<f64>> {
    let jumps = sample_jumps(cfg, rng)?;
    limit_values(&jumps, &cfg.kernel, &cfg.ls)
}

/// Window integrals and limit-field values, replicate-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateMatrix {
    pub replicates: usize,
    pub anchors: usize,
    /// `s[r * anchors + j] = S_{T,l_j}` of replicate `r`.
    pub s: Vec<f64>,
    /// Same layout for `Y_{l_j}`; absent for kernels without antiderivative.
    pub y: Option<Vec<f64>>,
    /// Largest trapezoid step-error estimate when the grid fallback was used.
    pub max_step_error: Option<f64>,
}

impl ReplicateMatrix {
    /// All replicates of `S_{T,l_j}`.
    pub fn s_column(&self, j: usize) -> Vec<f64> {
        self.s.iter().skip(j).step_by(self.anchors).copied().collect()
    }

    pub fn y_column(&self, j: usize) -> Option<Vec<f64>> {
        self.y
            .as_ref()
            .map(|y| y.iter().skip(j).step_by(self.anchors).copied().collect())
    }
}

struct Replicate {
    s: Vec<f64>,
    y: Option<Vec<f64>>,
    step_error: f64,
}

fn run_replicate(cfg: &SimConfig, shift: f64, r: u64) -> Result<Replicate> {
    let mut rng = replicate_rng(cfg.seed, r);
    let jumps = sample_jumps(cfg, &mut rng)?;
    if cfg.kernel.has_antiderivative() {
        let s = cfg
            .ls
            .iter()
            .map(|l| window_integral(&jumps, &cfg.kernel, shift, cfg.t, l))
            .collect::<Result<Vec<_>>>()?;
        let y = limit_values(&jumps, &cfg.kernel, &cfg.ls)?;
        Ok(Replicate {
            s,
            y: Some(y),
            step_error: 0.0,
        })
    } else {
        let mut step_error: f64 = 0.0;
        let s = cfg
            .ls
            .iter()
            .map(|l| {
                let g = window_integral_grid(&jumps, &cfg.kernel, shift, cfg.t, l, cfg.grid_step);
                step_error = step_error.max(g.step_error);
                g.value
            })
            .collect();
        Ok(Replicate { s, y: None, step_error })
    }
}

/// Runs `cfg.replicates` independent replicates on `threads` workers
/// (`0` lets rayon decide). Output is bit-identical for any thread count.
pub fn monte_carlo(cfg: &SimConfig, threads: usize) -> Result<ReplicateMatrix> {
    cfg.validate()?;
    let shift = cfg.kernel.integral_f() * cfg.measure.compensator_integral();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let reps: Vec<Replicate> = pool.install(|| {
        (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|r| run_replicate(cfg, shift, r))
            .collect::<Result<Vec<_>>>()
    })?;

    let anchors = cfg.ls.len();
    let mut s = Vec::with_capacity(reps.len() * anchors);
    let mut y = cfg.kernel.has_antiderivative().then(|| Vec::with_capacity(reps.len() * anchors));
    let mut max_step_error: f64 = 0.0;
    for rep in reps {
        s.extend(rep.s);
        if let (Some(y), Some(ry)) = (y.as_mut(), rep.y) {
            y.extend(ry);
        }
        max_step_error = max_step_error.max(rep.step_error);
    }
    Ok(ReplicateMatrix {
        replicates: cfg.replicates,
        anchors,
        s,
        y,
        max_step_error: (!cfg.kernel.has_antiderivative()).then_some(max_step_error),
    })
}

/// `φ̂(z) = N⁻¹ Σ e^{izSᵣ}` on a grid, with confidence radius `c/√N`.
pub fn empirical_cf(samples: &[f64], zs: &[f64], c: f64) -> Result<CfEvaluation> {
    if samples.len() < 100 {
        return Err(Error::invalid(format!(
            "the empirical characteristic function needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let band = c / n.sqrt();
    let points = zs
        .iter()
        .map(|&z| {
            let cf = if z == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                let (re, im) = samples.iter().fold((0.0, 0.0), |(re, im), &x| {
                    let (s, c) = (z * x).sin_cos();
                    (re + c, im + s)
                });
                Complex64::new(re / n, im / n)
            };
            CfPoint {
                z,
                log_cf: cf.ln(),
                cf,
                error: band,
            }
        })
        .collect();
    Ok(CfEvaluation {
        label: "empirical".into(),
        points,
    })
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance and its standard error
/// `√((m₄ - s⁴ (n-3)/(n-1)) / n)`.
pub fn variance_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - var * var * (n - 3.0) / (n - 1.0)).max(0.0) / n).sqrt();
    (var, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Kernel1D;
    use approx::assert_relative_eq;

    fn window_1d(a: f64, b: f64) -> Window {
        Window::new(vec![a], vec![b]).unwrap()
    }

    #[test]
    fn empty_set_gives_zero() {
        let k: ProductKernel = Kernel1D::signed_ou().into();
        let j = JumpSet::empty(window_1d(-5.0, 5.0), 1e-3);
        assert_eq!(eval_field(&j, &k, 0.0, &[0.0]), 0.0);
        assert_eq!(window_integral(&j, &k, 0.0, 1.0, &[0.0]).unwrap(), 0.0);
        assert_eq!(limit_values(&j, &k, &[vec![0.0]]).unwrap(), vec![0.0]);
    }

    #[test]
    fn single_and_double_jump_fields() {
        let k: ProductKernel = Kernel1D::signed_ou().into();
        let j = JumpSet::from_points(window_1d(-5.0, 5.0), 1e-3, &[(vec![0.0], 1.0)]).unwrap();
        assert_relative_eq!(eval_field(&j, &k, 0.0, &[1.0]), -(-1f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(window_integral(&j, &k, 0.0, 1.0, &[0.0]).unwrap(), (-1f64).exp() - 1.0, epsilon = 1e-15);
        assert_relative_eq!(limit_values(&j, &k, &[vec![0.0]]).unwrap()[0], -1.0);

        let j2 = JumpSet::from_points(window_1d(-5.0, 5.0), 1e-3, &[(vec![0.0], 1.0), (vec![1.0], -1.0)]).unwrap();
        assert_relative_eq!(eval_field(&j2, &k, 0.0, &[0.5]), -2.0 * (-0.5f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn two_dimensional_single_jump() {
        let k = ProductKernel::power(Kernel1D::signed_ou(), 2).unwrap();
        let w = Window::new(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap();
        let e = (-1f64).exp() - 1.0;
        let j = JumpSet::from_points(w.clone(), 1e-3, &[(vec![0.0, 0.0], 2.0)]).unwrap();
        assert_relative_eq!(window_integral(&j, &k, 0.0, 1.0, &[0.0, 0.0]).unwrap(), 2.0 * e * e, epsilon = 1e-15);
        let j = JumpSet::from_points(w, 1e-3, &[(vec![1.0, 1.0], 1.0)]).unwrap();
        assert_relative_eq!(limit_values(&j, &k, &[vec![0.0, 0.0]]).unwrap()[0], (-2f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn from_points_checks_invariants() {
        assert!(JumpSet::from_points(window_1d(0.0, 1.0), 0.1, &[(vec![2.0], 1.0)]).is_err());
        assert!(JumpSet::from_points(window_1d(0.0, 1.0), 0.1, &[(vec![0.5], 0.01)]).is_err());
    }

    #[test]
    fn sampled_jumps_respect_window_and_truncation() {
        let cfg = SimConfig::new(LevyMeasure::dickman(), Kernel1D::signed_ou(), 3.0, vec![vec![0.0]])
            .unwrap()
            .with_epsilon(0.01);
        let j = sample_jumps(&cfg, &mut replicate_rng(1, 0)).unwrap();
        assert!(!j.is_empty());
        assert!(j.iter().all(|(s, y)| cfg.window().contains(s) && y >= 0.01 && y <= 1.0));
    }

    #[test]
    fn truncation_at_support_bound_is_empty() {
        let cfg = SimConfig::new(LevyMeasure::dickman(), Kernel1D::signed_ou(), 1.0, vec![vec![0.0]])
            .unwrap()
            .with_epsilon(1.0);
        assert_eq!(sample_jumps(&cfg, &mut replicate_rng(0, 0)).unwrap_err(), Error::EmptyTruncation { epsilon: 1.0 });
    }

    #[test]
    fn control_kernel_uses_grid_fallback() {
        let k: ProductKernel = Kernel1D::persistent_control().into();
        let j = JumpSet::from_points(window_1d(-20.0, 20.0), 1e-3, &[(vec![0.3], 1.0)]).unwrap();
        assert!(matches!(window_integral(&j, &k, 0.0, 1.0, &[0.0]), Err(Error::NotAvailable { .. })));
        // ∫_0^1 e^{-|t-0.3|}/2 dt = 1 - (e^{-0.3} + e^{-0.7})/2
        let exact = 1.0 - 0.5 * ((-0.3f64).exp() + (-0.7f64).exp());
        let g = window_integral_grid(&j, &k, 0.0, 1.0, &[0.0], 0.01);
        assert!((g.value - exact).abs() < 1e-4);
        assert!(g.step_error < 1e-4);
    }

    #[test]
    fn monte_carlo_n1_matches_single_run() {
        let cfg = SimConfig::new(LevyMeasure::two_point(1.0).unwrap(), Kernel1D::signed_ou(), 2.0, vec![vec![0.0], vec![1.5]])
            .unwrap()
            .with_seed(42);
        let mc = monte_carlo(&cfg, 1).unwrap();
        let j = sample_jumps(&cfg, &mut replicate_rng(42, 0)).unwrap();
        assert_eq!(mc.s[0], window_integral(&j, &cfg.kernel, 0.0, 2.0, &[0.0]).unwrap());
        assert_eq!(mc.s[1], window_integral(&j, &cfg.kernel, 0.0, 2.0, &[1.5]).unwrap());
        assert_eq!(mc.y.as_ref().unwrap()[1], limit_values(&j, &cfg.kernel, &[vec![1.5]]).unwrap()[0]);
    }

    #[test]
    fn empirical_cf_trivial_cases() {
        let zeros = vec![0.0; 200];
        let e = empirical_cf(&zeros, &[0.0, 1.0, -3.0], 3.0).unwrap();
        assert!(e.points.iter().all(|p| p.cf == Complex64::new(1.0, 0.0)));
        assert_relative_eq!(e.points[0].error, 3.0 / 200f64.sqrt());
        assert!(empirical_cf(&[1.0; 10], &[1.0], 3.0).is_err());
    }

    #[test]
    fn variance_estimator() {
        let xs: Vec<f64> = (0..1000).map(|i| (i % 2) as f64 * 2.0 - 1.0).collect();
        let (v, se) = variance_and_se(&xs);
        assert_relative_eq!(v, 1000.0 / 999.0, epsilon = 1e-12);
        assert!(se < 1e-2);
    }
}
