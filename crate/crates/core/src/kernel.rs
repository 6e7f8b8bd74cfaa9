//! Kernel pairs `(g, f = g′)` and their tensor products.
//!
//! Sample integrals of the field reduce to increments of `g`, so every kernel
//! that the limit theory applies to carries its antiderivative explicitly.
//! The library convention is `f = g′` throughout. The signed two-sided
//! Ornstein–Uhlenbeck kernel is therefore `f(x) = -sgn(x) e^{-|x|}`, the
//! negative of `sgn(x) e^{-|x|}`; for symmetric Lévy measures the two give
//! the same law.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, knots_between, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    SignedOu,
    GaussDeriv,
    PersistentControl,
    UserTable,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::SignedOu => "signed_ou",
            KernelKind::GaussDeriv => "gauss_deriv",
            KernelKind::PersistentControl => "persistent_control",
            KernelKind::UserTable => "user_table",
        }
    }
}

/// `∫|f|`, `∫f²`, `∫|g|`, `∫g²`. The `g` entries are `None` for kernels
/// without an antiderivative in `W^{1,1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelNorms {
    pub l1_f: f64,
    pub l2sq_f: f64,
    pub l1_g: Option<f64>,
    pub l2sq_g: Option<f64>,
}

/// Piecewise-linear `g` on a strictly increasing grid, zero outside it.
#[derive(Debug, Clone, PartialEq)]
struct Table {
    x: Vec<f64>,
    g: Vec<f64>,
}

impl Table {
    fn new(x: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if x.len() != g.len() {
            return Err(Error::Table(format!("{} x values but {} g values", x.len(), g.len())));
        }
        if x.len() < 2 {
            return Err(Error::Table("at least two rows are required".into()));
        }
        if x.iter().chain(&g).any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite entry".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Table("x must be strictly increasing".into()));
        }
        let (first, last) = (g[0], g[g.len() - 1]);
        if first.abs() > 1e-12 || last.abs() > 1e-12 {
            return Err(Error::Table(format!(
                "g must vanish at both ends of the table, got g = {first} and {last}"
            )));
        }
        Ok(Table { x, g })
    }

    fn segment(&self, t: f64) -> Option<usize> {
        if t < self.x[0] || t >= self.x[self.x.len() - 1] {
            return None;
        }
        Some(self.x.partition_point(|&v| v <= t) - 1)
    }

    fn g(&self, t: f64) -> f64 {
        match self.segment(t) {
            None => 0.0,
            Some(i) => {
                let w = (t - self.x[i]) / (self.x[i + 1] - self.x[i]);
                self.g[i] + w * (self.g[i + 1] - self.g[i])
            }
        }
    }

    fn f(&self, t: f64) -> f64 {
        match self.segment(t) {
            None => 0.0,
            Some(i) => (self.g[i + 1] - self.g[i]) / (self.x[i + 1] - self.x[i]),
        }
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.x
            .windows(2)
            .zip(self.g.windows(2))
            .map(|(x, g)| (x[0], x[1], g[0], g[1]))
    }

    fn norms(&self) -> KernelNorms {
        let mut n = KernelNorms {
            l1_f: 0.0,
            l2sq_f: 0.0,
            l1_g: Some(0.0),
            l2sq_g: Some(0.0),
        };
        let (mut l1_g, mut l2sq_g) = (0.0, 0.0);
        for (x0, x1, g0, g1) in self.segments() {
            let dx = x1 - x0;
            let dg = g1 - g0;
            n.l1_f += dg.abs();
            n.l2sq_f += dg * dg / dx;
            l1_g += if g0 * g1 >= 0.0 {
                0.5 * dx * (g0.abs() + g1.abs())
            } else {
                0.5 * dx * (g0 * g0 + g1 * g1) / (g0.abs() + g1.abs())
            };
            l2sq_g += dx * (g0 * g0 + g0 * g1 + g1 * g1) / 3.0;
        }
        n.l1_g = Some(l1_g);
        n.l2sq_g = Some(l2sq_g);
        n
    }

    // Breakpoints of u ↦ φ(u) φ(u + t) for functions with knots at self.x.
    fn lag_knots(&self, t: f64) -> Vec<f64> {
        let mut k: Vec<f64> = self.x.iter().copied().chain(self.x.iter().map(|x| x - t)).collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    // f is piecewise constant, so the midpoint rule is exact per merged piece.
    fn autocorrelation_f(&self, t: f64) -> f64 {
        self.lag_knots(t)
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                (w[1] - w[0]) * self.f(m) * self.f(m + t)
            })
            .sum()
    }

    // g is piecewise linear, so the product is quadratic and Simpson is exact.
    fn autocorrelation_g(&self, t: f64) -> f64 {
        self.lag_knots(t)
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let m = 0.5 * (a + b);
                let p = |u: f64| self.g(u) * self.g(u + t);
                (b - a) / 6.0 * (p(a) + 4.0 * p(m) + p(b))
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    SignedOu,
    GaussDeriv,
    PersistentControl,
    Table(Table),
}

/// A one-dimensional kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel1D {
    repr: Repr,
    kinks: Vec<f64>,
}

impl Kernel1D {
    /// `g(x) = e^{-|x|}`, `f(x) = -sgn(x) e^{-|x|}`.
    pub fn signed_ou() -> Self {
        Kernel1D {
            repr: Repr::SignedOu,
            kinks: vec![0.0],
        }
    }

    /// `g(x) = e^{-x²}`, `f(x) = -2x e^{-x²}`.
    pub fn gauss_deriv() -> Self {
        Kernel1D {
            repr: Repr::GaussDeriv,
            kinks: Vec::new(),
        }
    }

    /// `f(x) = e^{-|x|}/2`, with `∫f = 1`. Not a derivative of a vanishing
    /// function; only useful as a short-range-dependent contrast.
    pub fn persistent_control() -> Self {
        Kernel1D {
            repr: Repr::PersistentControl,
            kinks: vec![0.0],
        }
    }

    /// Piecewise-linear `g` through `(x[i], g[i])`, extended by zero.
    pub fn user_table(x: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        let table = Table::new(x, g)?;
        let kinks = table.x.clone();
        Ok(Kernel1D {
            repr: Repr::Table(table),
            kinks,
        })
    }

    /// Reads a CSV with a header row and columns `x,g`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Table(format!("missing column `{name}`")))
        };
        let (ix, ig) = (col("x")?, col("g")?);
        let (mut x, mut g) = (Vec::new(), Vec::new());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .unwrap_or("")
                    .parse::<f64>()
                    .map_err(|e| Error::Table(format!("row {}: {e}", row + 1)))
            };
            x.push(parse(ix)?);
            g.push(parse(ig)?);
        }
        Kernel1D::user_table(x, g)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Kernel1D::from_csv_reader(file)
    }

    pub fn kind(&self) -> KernelKind {
        match self.repr {
            Repr::SignedOu => KernelKind::SignedOu,
            Repr::GaussDeriv => KernelKind::GaussDeriv,
            Repr::PersistentControl => KernelKind::PersistentControl,
            Repr::Table(_) => KernelKind::UserTable,
        }
    }

    /// Whether `g` exists, so that window integrals have a closed form.
    pub fn has_antiderivative(&self) -> bool {
        !matches!(self.repr, Repr::PersistentControl)
    }

    /// Points where `f` or `g` fails to be smooth.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn f(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::SignedOu => {
                if x == 0.0 {
                    0.0
                } else {
                    -x.signum() * (-x.abs()).exp()
                }
            }
            Repr::GaussDeriv => -2.0 * x * (-x * x).exp(),
            Repr::PersistentControl => 0.5 * (-x.abs()).exp(),
            Repr::Table(t) => t.f(x),
        }
    }

    /// The antiderivative, `None` for the persistent control.
    pub fn g(&self, x: f64) -> Option<f64> {
        match &self.repr {
            Repr::SignedOu => Some((-x.abs()).exp()),
            Repr::GaussDeriv => Some((-x * x).exp()),
            Repr::PersistentControl => None,
            Repr::Table(t) => Some(t.g(x)),
        }
    }

    fn not_available(&self, operation: &'static str) -> Error {
        Error::NotAvailable {
            operation,
            kernel: self.kind().name(),
        }
    }

    pub(crate) fn g_or_err(&self, x: f64, operation: &'static str) -> Result<f64> {
        self.g(x).ok_or_else(|| self.not_available(operation))
    }

    /// A radius `R` with `|f(x)| ≤ tol` and `|g(x)| ≤ tol` for all `|x| > R`.
    pub fn decay_radius(&self, tol: f64) -> f64 {
        let tol = tol.max(f64::MIN_POSITIVE);
        match &self.repr {
            Repr::SignedOu => (-tol.ln()).max(0.0),
            Repr::PersistentControl => (-(2.0 * tol).ln()).max(0.0),
            Repr::GaussDeriv => {
                if tol >= 1.0 {
                    return 0.0;
                }
                let tail = (-tol.ln()).sqrt();
                // 2x e^{-x²} peaks at x = 1/√2 and decreases afterwards.
                let peak = 2.0f64.sqrt() * (-0.5f64).exp();
                if tol >= peak {
                    return tail;
                }
                let h = |x: f64| 2.0 * x * (-x * x).exp() - tol;
                let (mut lo, mut hi) = (std::f64::consts::FRAC_1_SQRT_2, 40.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                tail.max(hi)
            }
            Repr::Table(t) => t.x[0].abs().max(t.x[t.x.len() - 1].abs()),
        }
    }

    /// `∫_a^b f = g(b) - g(a)`, exact. Infinite limits are allowed.
    pub fn window_increment(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::invalid(format!("window [{a}, {b}] is reversed")));
        }
        let g = |x: f64| self.g_or_err(x, "window_increment");
        Ok(g(b)? - g(a)?)
    }

    pub fn norms(&self) -> KernelNorms {
        match &self.repr {
            Repr::SignedOu => KernelNorms {
                l1_f: 2.0,
                l2sq_f: 1.0,
                l1_g: Some(2.0),
                l2sq_g: Some(1.0),
            },
            Repr::GaussDeriv => KernelNorms {
                l1_f: 2.0,
                l2sq_f: (PI / 2.0).sqrt(),
                l1_g: Some(PI.sqrt()),
                l2sq_g: Some((PI / 2.0).sqrt()),
            },
            Repr::PersistentControl => KernelNorms {
                l1_f: 1.0,
                l2sq_f: 0.25,
                l1_g: None,
                l2sq_g: None,
            },
            Repr::Table(t) => t.norms(),
        }
    }

    /// `∫ f`; zero for every kernel with an antiderivative.
    pub fn integral_f(&self) -> f64 {
        match &self.repr {
            Repr::SignedOu | Repr::GaussDeriv => 0.0,
            Repr::PersistentControl => 1.0,
            Repr::Table(t) => t.g[t.g.len() - 1] - t.g[0],
        }
    }

    /// Largest `|(g(x+h) - g(x-h))/(2h) - f(x)|` over grid points at least
    /// `h` away from every declared kink.
    pub fn check_derivative(&self, grid: &[f64], h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::invalid(format!("step must be positive, got {h}")));
        }
        if !self.has_antiderivative() {
            return Err(self.not_available("check_derivative"));
        }
        let mut worst: f64 = 0.0;
        for &x in grid {
            if self.kinks.iter().any(|k| (x - k).abs() <= h) {
                continue;
            }
            let g = |t| self.g(t).expect("checked above");
            let fd = (g(x + h) - g(x - h)) / (2.0 * h);
            worst = worst.max((fd - self.f(x)).abs());
        }
        Ok(worst)
    }

    /// `∫ f(u) f(u + t) du`.
    pub fn autocorrelation_f(&self, t: f64) -> f64 {
        let a = t.abs();
        match &self.repr {
            Repr::SignedOu => (-a).exp() * (1.0 - a),
            Repr::GaussDeriv => (PI / 2.0).sqrt() * (1.0 - t * t) * (-0.5 * t * t).exp(),
            Repr::PersistentControl => 0.25 * (-a).exp() * (1.0 + a),
            Repr::Table(tab) => tab.autocorrelation_f(t),
        }
    }

    /// `∫ g(u) g(u + t) du`.
    pub fn autocorrelation_g(&self, t: f64) -> Option<f64> {
        let a = t.abs();
        match &self.repr {
            Repr::SignedOu => Some((-a).exp() * (1.0 + a)),
            Repr::GaussDeriv => Some((PI / 2.0).sqrt() * (-0.5 * t * t).exp()),
            Repr::PersistentControl => None,
            Repr::Table(tab) => Some(tab.autocorrelation_g(t)),
        }
    }

    /// `∫_{-T}^{T} (T - |u|) R_f(u) du`, the variance factor of a window of
    /// length `T` computed from the kernel autocorrelation alone.
    pub fn window_autocorrelation_mass(&self, t: f64, opts: &QuadOptions) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let r = integrate_pieces(
            |u: f64| (t - u) * self.autocorrelation_f(u),
            &knots_between(0.0, t, &self.lag_kinks()),
            opts,
        )?;
        Ok(2.0 * r.value)
    }

    /// Kinks of the autocorrelation: differences of kernel kinks.
    pub(crate) fn lag_kinks(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .kinks
            .iter()
            .flat_map(|a| self.kinks.iter().map(move |b| a - b))
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// `f(x) = ∏ fⱼ(xⱼ)` on `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductKernel {
    components: Vec<Kernel1D>,
}

impl From<Kernel1D> for ProductKernel {
    fn from(k: Kernel1D) -> Self {
        ProductKernel { components: vec![k] }
    }
}

impl ProductKernel {
    pub fn new(components: Vec<Kernel1D>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("a product kernel needs at least one component"));
        }
        Ok(ProductKernel { components })
    }

    /// `d` copies of the same one-dimensional kernel.
    pub fn power(k: Kernel1D, d: usize) -> Result<Self> {
        ProductKernel::new(vec![k; d])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Kernel1D] {
        &self.components
    }

    pub fn has_antiderivative(&self) -> bool {
        self.components.iter().all(Kernel1D::has_antiderivative)
    }

    pub fn name(&self) -> String {
        self.components
            .iter()
            .map(|k| k.kind().name())
            .collect::<Vec<_>>()
            .join("⊗")
    }

    pub fn f(&self, x: &[f64]) -> f64 {
        self.components.iter().zip(x).map(|(k, &xi)| k.f(xi)).product()
    }

    /// `∏ gⱼ(xⱼ)`.
    pub fn g(&self, x: &[f64]) -> Option<f64> {
        self.components.iter().zip(x).map(|(k, &xi)| k.g(xi)).product()
    }

    /// `∫_{∏[aⱼ,bⱼ]} f = ∏ (gⱼ(bⱼ) - gⱼ(aⱼ))`.
    pub fn window_increment(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.components
            .iter()
            .zip(a.iter().zip(b))
            .map(|(k, (&lo, &hi))| k.window_increment(lo, hi))
            .product()
    }

    /// Largest component decay radius.
    pub fn decay_radius(&self, tol: f64) -> f64 {
        self.components
            .iter()
            .map(|k| k.decay_radius(tol))
            .fold(0.0, f64::max)
    }

    pub fn integral_f(&self) -> f64 {
        self.components.iter().map(Kernel1D::integral_f).product()
    }

    pub fn l1_f(&self) -> f64 {
        self.components.iter().map(|k| k.norms().l1_f).product()
    }

    pub fn l2sq_f(&self) -> f64 {
        self.components.iter().map(|k| k.norms().l2sq_f).product()
    }

    pub fn autocorrelation_f(&self, t: &[f64]) -> f64 {
        self.components
            .iter()
            .zip(t)
            .map(|(k, &ti)| k.autocorrelation_f(ti))
            .product()
    }
}
