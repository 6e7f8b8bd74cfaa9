//! Deterministic adaptive integration.
//!
//! A 15-point Gauss–Kronrod rule with a nested 7-point Gauss rule is applied
//! to each panel; the panel with the largest error estimate is bisected until
//! the summed estimate drops below the absolute tolerance. Panels are kept in
//! a binary heap keyed on `(error, left endpoint)` so the refinement order,
//! and therefore every result bit, depends only on the inputs.
//!
//! Infinite domains are never integrated directly. Callers truncate them with
//! a decay radius they know about (see [`Domain`]).
//!
//! Integration against a Lévy measure lives here too, in [`integrate_levy`]:
//! atoms are summed exactly and power-law densities are mapped onto `(0, 1)`
//! by a substitution that cancels their singularity at the origin.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::levy::{LevyKind, LevyMeasure};

/// Scalar types the integrator can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute tolerance on the summed error estimate.
    pub tol: f64,
    /// Evaluation budget; exceeding it yields [`Error::NonConvergence`].
    pub max_evaluations: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-9,
            max_evaluations: 1_000_000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions {
            tol,
            ..QuadOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<V> {
    pub value: V,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integration domain. Half-lines and the full line are truncated at the
/// caller-supplied radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval(f64, f64),
    /// `[start, start + radius]`, standing in for `[start, ∞)`.
    HalfLine { start: f64, radius: f64 },
    /// `[-radius, radius]`, standing in for `ℝ`.
    FullLine { radius: f64 },
}

impl Domain {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Interval(a, b) => (a, b),
            Domain::HalfLine { start, radius } => (start, start + radius),
            Domain::FullLine { radius } => (-radius, radius),
        }
    }
}

// Abscissae and weights of the 7/15 Gauss–Kronrod pair on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<V, F>(h: &mut F, a: f64, b: f64) -> Result<Panel<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [V::zero(); 15];
    fv[7] = h(center)?;
    for j in 0..7 {
        let dx = half * XGK[j];
        fv[j] = h(center - dx)?;
        fv[14 - j] = h(center + dx)?;
    }

    let mut kronrod = fv[7] * WGK[7];
    let mut gauss = fv[7] * WG[3];
    let mut res_abs = fv[7].magnitude() * WGK[7];
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        kronrod = kronrod + pair * WGK[j];
        res_abs += WGK[j] * (fv[j].magnitude() + fv[14 - j].magnitude());
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fv[7] - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).magnitude() + (fv[14 - j] - mean).magnitude());
    }

    let scale = half.abs();
    let value = kronrod * half;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut error = ((kronrod - gauss) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    if !value.magnitude().is_finite() || !error.is_finite() {
        return Err(Error::invalid(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    Ok(Panel { a, b, value, error })
}

/// Adaptive integration over `[knots[0], knots[last]]`, with the interior
/// knots used as initial panel boundaries. The integrand may fail; the first
/// failure aborts the integration.
pub fn try_integrate_pieces<V, F>(
    mut h: F,
    knots: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    if knots.len() < 2 {
        return Err(Error::invalid("at least two knots are required"));
    }
    if knots.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("knots must be non-decreasing"));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in knots.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(&mut h, w[0], w[1])?);
            evaluations += EVALS_PER_PANEL;
        }
    }
    // Panels too narrow to bisect further; their error stays in the total.
    let mut frozen: Vec<Panel<V>> = Vec::new();
    let exact_total = |heap: &BinaryHeap<Panel<V>>, frozen: &[Panel<V>]| {
        heap.iter().map(|p| p.error).sum::<f64>() + frozen.iter().map(|p| p.error).sum::<f64>()
    };
    let mut total_error = exact_total(&heap, &frozen);

    loop {
        if total_error <= opts.tol || heap.is_empty() {
            // The running sum drifts; confirm before stopping.
            total_error = exact_total(&heap, &frozen);
            if total_error <= opts.tol || heap.is_empty() {
                return Ok(finish(heap, frozen, total_error, evaluations));
            }
        }
        if evaluations + 2 * EVALS_PER_PANEL > opts.max_evaluations {
            let done = finish(heap, frozen, total_error, evaluations);
            return Err(Error::NonConvergence {
                evaluations,
                value_estimate: done.value.magnitude(),
                error_estimate: total_error,
                tol: opts.tol,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(1.0) {
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(&mut h, worst.a, mid)?;
        let right = gauss_kronrod(&mut h, mid, worst.b)?;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        evaluations += 2 * EVALS_PER_PANEL;
    }
}

fn finish<V: QuadValue>(
    heap: BinaryHeap<Panel<V>>,
    frozen: Vec<Panel<V>>,
    error_estimate: f64,
    evaluations: usize,
) -> QuadResult<V> {
    let mut panels: Vec<Panel<V>> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().fold(V::zero(), |acc, p| acc + p.value);
    QuadResult {
        value,
        error_estimate,
        evaluations,
    }
}

pub fn integrate_pieces<V, F>(mut h: F, knots: &[f64], opts: &QuadOptions) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    try_integrate_pieces(|x| Ok(h(x)), knots, opts)
}

/// Integrates `h` over `domain`, splitting initial panels at every
/// breakpoint that falls strictly inside it.
pub fn integrate_line<V, F>(
    h: F,
    domain: Domain,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let (a, b) = domain.bounds();
    integrate_pieces(h, &knots_between(a, b, breakpoints), opts)
}

/// Sorted knot vector `a, (breakpoints inside (a, b)), b`.
pub fn knots_between(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut knots = Vec::with_capacity(breakpoints.len() + 2);
    knots.push(a);
    knots.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    knots.push(b);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots
}

/// Computes `∫ h(y) ν(dy)`.
///
/// The integrand must satisfy `|h(y)| <= K |y|` near the origin. Atoms are
/// summed exactly. Densities with a `|y|^(-1-p)` singularity at zero are
/// integrated in a variable `u` on `(0, 1)` in which the combined integrand
/// `h(y)/y` is bounded; the open Gauss–Kronrod rule never samples `u = 0`.
pub fn try_integrate_levy<V, F>(mut h: F, nu: &LevyMeasure, opts: &QuadOptions) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    match *nu.kind() {
        LevyKind::TwoPoint { lambda } => Ok(QuadResult {
            value: (h(1.0)? + h(-1.0)?) * (0.5 * lambda),
            error_estimate: 0.0,
            evaluations: 2,
        }),
        LevyKind::Dickman {} => try_integrate_pieces(
            |y| {
                if y == 0.0 {
                    Ok(V::zero())
                } else {
                    Ok(h(y)? * (1.0 / y))
                }
            },
            &[0.0, 1.0],
            opts,
        ),
        LevyKind::TruncatedStable { beta, scale } => {
            // y = u^{1/(1-beta)} turns C y^{-1-beta} dy into C/(1-beta) du / y.
            let p = 1.0 / (1.0 - beta);
            let weight = scale / (1.0 - beta);
            try_integrate_pieces(
                |u| {
                    let y = u.powf(p);
                    if y == 0.0 {
                        return Ok(V::zero());
                    }
                    Ok((h(y)? + h(-y)?) * (weight / y))
                },
                &[0.0, 1.0],
                opts,
            )
        }
        LevyKind::InnerTruncatedStable { alpha, scale, delta } => {
            // y = delta w^{-1/alpha} turns c y^{-1-alpha} dy on [delta, ∞) into
            // c delta^{-alpha}/alpha dw on (0, 1].
            let weight = scale * delta.powf(-alpha) / alpha;
            try_integrate_pieces(
                |w| {
                    let y = delta * w.powf(-1.0 / alpha);
                    if !y.is_finite() {
                        return Ok(V::zero());
                    }
                    Ok((h(y)? + h(-y)?) * weight)
                },
                &[0.0, 1.0],
                opts,
            )
        }
    }
}

pub fn integrate_levy<V, F>(mut h: F, nu: &LevyMeasure, opts: &QuadOptions) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    try_integrate_levy(|y| Ok(h(y)), nu, opts)
}

/// Iterated integration over a box, one coordinate per nesting level.
///
/// `knots[k]` holds the knot vector (endpoints included) for coordinate `k`.
/// Inner integrals run at a tolerance scaled by the outer extent so the
/// accumulated inner error stays within `opts.tol`.
pub fn try_integrate_box<V, F>(h: &mut F, knots: &[Vec<f64>], opts: &QuadOptions) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(&[f64]) -> Result<V>,
{
    let mut point = vec![0.0; knots.len()];
    integrate_level(h, knots, 0, &mut point, opts)
}

fn integrate_level<V, F>(
    h: &mut F,
    knots: &[Vec<f64>],
    level: usize,
    point: &mut Vec<f64>,
    opts: &QuadOptions,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(&[f64]) -> Result<V>,
{
    let here = &knots[level];
    if level + 1 == knots.len() {
        return try_integrate_pieces(
            |x| {
                point[level] = x;
                h(point)
            },
            here,
            opts,
        );
    }
    let extent = (here[here.len() - 1] - here[0]).abs().max(1.0);
    let inner_opts = QuadOptions {
        tol: 0.5 * opts.tol / extent,
        ..*opts
    };
    let mut inner_error: f64 = 0.0;
    let mut inner_evals = 0usize;
    let outer = try_integrate_pieces(
        |x| {
            point[level] = x;
            let r = integrate_level(h, knots, level + 1, point, &inner_opts)?;
            inner_error = inner_error.max(r.error_estimate);
            inner_evals += r.evaluations;
            Ok(r.value)
        },
        here,
        &QuadOptions {
            tol: 0.5 * opts.tol,
            ..*opts
        },
    )?;
    Ok(QuadResult {
        value: outer.value,
        error_estimate: outer.error_estimate + extent * inner_error,
        evaluations: inner_evals,
    })
}
