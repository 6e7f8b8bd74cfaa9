//! One-dimensional Lévy measures without a Gaussian part.
//!
//! Every measure constructible here has a finite first absolute moment,
//! `∫ |y| ν(dy) < ∞`. That is what makes the moving average integrable and
//! lets the shot-noise representation get away with a single shift constant.
//! A plain α-stable measure with α ∈ (1, 2) has infinite first moment near
//! the origin, which is why only the inner-truncated version is offered.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevyKind {
    /// `ν(dy) = y⁻¹ 1(0 < y < 1) dy`.
    Dickman {},
    /// `ψ(y) = C |y|^(-1-β) 1(0 < |y| ≤ 1)`, β ∈ (0, 1).
    TruncatedStable {
        beta: f64,
        #[serde(rename = "C")]
        scale: f64,
    },
    /// `ν = (λ/2)(δ₊₁ + δ₋₁)`.
    TwoPoint { lambda: f64 },
    /// `ψ(y) = c |y|^(-1-α) 1(|y| ≥ δ)`, α ∈ (1, 2).
    InnerTruncatedStable {
        alpha: f64,
        #[serde(rename = "c")]
        scale: f64,
        delta: f64,
    },
}

/// A validated Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LevyKind", into = "LevyKind")]
pub struct LevyMeasure {
    kind: LevyKind,
}

impl TryFrom<LevyKind> for LevyMeasure {
    type Error = Error;

    fn try_from(kind: LevyKind) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match kind {
            LevyKind::Dickman {} => {}
            LevyKind::TruncatedStable { beta, scale } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::invalid(format!("beta must lie in (0, 1), got {beta}")));
                }
                positive("C", scale)?;
            }
            LevyKind::TwoPoint { lambda } => positive("lambda", lambda)?,
            LevyKind::InnerTruncatedStable { alpha, scale, delta } => {
                if !(alpha > 1.0 && alpha < 2.0) {
                    return Err(Error::invalid(format!("alpha must lie in (1, 2), got {alpha}")));
                }
                positive("c", scale)?;
                positive("delta", delta)?;
            }
        }
        Ok(LevyMeasure { kind })
    }
}

impl From<LevyMeasure> for LevyKind {
    fn from(m: LevyMeasure) -> Self {
        m.kind
    }
}

impl LevyMeasure {
    pub fn dickman() -> Self {
        LevyMeasure {
            kind: LevyKind::Dickman {},
        }
    }

    pub fn truncated_stable(beta: f64, scale: f64) -> Result<Self> {
        LevyKind::TruncatedStable { beta, scale }.try_into()
    }

    pub fn two_point(lambda: f64) -> Result<Self> {
        LevyKind::TwoPoint { lambda }.try_into()
    }

    pub fn inner_truncated_stable(alpha: f64, scale: f64, delta: f64) -> Result<Self> {
        LevyKind::InnerTruncatedStable { alpha, scale, delta }.try_into()
    }

    pub fn kind(&self) -> &LevyKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            LevyKind::Dickman {} => "dickman",
            LevyKind::TruncatedStable { .. } => "truncated_stable",
            LevyKind::TwoPoint { .. } => "two_point",
            LevyKind::InnerTruncatedStable { .. } => "inner_truncated_stable",
        }
    }

    /// Smallest `b` with `ν(|y| > b) = 0`.
    pub fn support_bound(&self) -> f64 {
        match self.kind {
            LevyKind::InnerTruncatedStable { .. } => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// `ν(A) = ν(-A)` for all Borel `A`.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self.kind, LevyKind::Dickman {})
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.kind, LevyKind::TwoPoint { .. })
    }

    /// `∫ |y| ν(dy)`.
    pub fn abs_moment(&self) -> f64 {
        match self.kind {
            LevyKind::Dickman {} => 1.0,
            LevyKind::TruncatedStable { beta, scale } => 2.0 * scale / (1.0 - beta),
            LevyKind::TwoPoint { lambda } => lambda,
            LevyKind::InnerTruncatedStable { alpha, scale, delta } => {
                2.0 * scale * delta.powf(1.0 - alpha) / (alpha - 1.0)
            }
        }
    }

    /// `∫ y² ν(dy)`; infinite for the inner-truncated stable measure.
    pub fn second_moment(&self) -> Result<f64> {
        match self.kind {
            LevyKind::Dickman {} => Ok(0.5),
            LevyKind::TruncatedStable { beta, scale } => Ok(2.0 * scale / (2.0 - beta)),
            LevyKind::TwoPoint { lambda } => Ok(lambda),
            LevyKind::InnerTruncatedStable { alpha, .. } => Err(Error::DivergentMoment(format!(
                "∫ y² ν(dy) = ∞ for the inner-truncated stable measure with alpha = {alpha}"
            ))),
        }
    }

    /// `ν(|y| ≥ ε)`.
    pub fn tail_mass(&self, epsilon: f64) -> f64 {
        self.mass_at_least(epsilon)
    }

    /// `ν(|y| ≥ r)` for any `r ≥ 0`; `r = 0` gives the total mass.
    pub fn mass_at_least(&self, r: f64) -> f64 {
        match self.kind {
            LevyKind::Dickman {} => {
                if r >= 1.0 {
                    0.0
                } else if r <= 0.0 {
                    f64::INFINITY
                } else {
                    -r.ln()
                }
            }
            LevyKind::TruncatedStable { beta, scale } => {
                if r > 1.0 {
                    0.0
                } else if r <= 0.0 {
                    f64::INFINITY
                } else {
                    2.0 * scale * (r.powf(-beta) - 1.0) / beta
                }
            }
            LevyKind::TwoPoint { lambda } => {
                if r <= 1.0 {
                    lambda
                } else {
                    0.0
                }
            }
            LevyKind::InnerTruncatedStable { alpha, scale, delta } => {
                2.0 * scale * r.max(delta).powf(-alpha) / alpha
            }
        }
    }

    /// `∫_{|y|<ε} y² ν(dy)`, the variance carried by the jumps a simulation
    /// truncated at `ε` leaves out (per unit of squared kernel mass).
    pub fn small_jump_variance(&self, epsilon: f64) -> f64 {
        self.second_moment_below(epsilon)
    }

    /// `∫_{|y|<r} y² ν(dy)`; may be infinite for unbounded support.
    pub fn second_moment_below(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self.kind {
            LevyKind::Dickman {} => 0.5 * r.min(1.0).powi(2),
            LevyKind::TruncatedStable { beta, scale } => 2.0 * scale * r.min(1.0).powf(2.0 - beta) / (2.0 - beta),
            LevyKind::TwoPoint { lambda } => {
                if r > 1.0 {
                    lambda
                } else {
                    0.0
                }
            }
            LevyKind::InnerTruncatedStable { alpha, scale, delta } => {
                if r <= delta {
                    0.0
                } else if r.is_infinite() {
                    f64::INFINITY
                } else {
                    2.0 * scale * (r.powf(2.0 - alpha) - delta.powf(2.0 - alpha)) / (2.0 - alpha)
                }
            }
        }
    }

    /// `∫_{lo ≤ |y| ≤ hi} y ν(dy)`; zero when `lo > hi`.
    pub fn signed_moment_between(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(0.0);
        if lo > hi {
            return 0.0;
        }
        match self.kind {
            LevyKind::Dickman {} => {
                let (a, b) = (lo, hi.min(1.0));
                (b - a).max(0.0)
            }
            // The remaining measures are symmetric.
            _ => 0.0,
        }
    }

    /// `∫_{|y| ≥ r} |y| ν(dy)`.
    pub fn abs_moment_above(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        match self.kind {
            LevyKind::Dickman {} => (1.0 - r).max(0.0),
            LevyKind::TruncatedStable { beta, scale } => {
                if r > 1.0 {
                    0.0
                } else {
                    2.0 * scale * (1.0 - r.powf(1.0 - beta)) / (1.0 - beta)
                }
            }
            LevyKind::TwoPoint { lambda } => {
                if r <= 1.0 {
                    lambda
                } else {
                    0.0
                }
            }
            LevyKind::InnerTruncatedStable { alpha, scale, delta } => {
                2.0 * scale * r.max(delta).powf(1.0 - alpha) / (alpha - 1.0)
            }
        }
    }

    /// `∫_{-1}^{1} y ν(dy)`, the compensator entering the shift constant.
    pub fn compensator_integral(&self) -> f64 {
        match self.kind {
            LevyKind::Dickman {} => 1.0,
            _ => 0.0,
        }
    }

    /// Quantile function of `ν` restricted to `{|y| ≥ ε}` and normalised.
    ///
    /// For symmetric measures the lower half of `(0, 1)` maps to negative
    /// jumps, so the function is non-decreasing in `u`.
    pub fn truncated_quantile(&self, epsilon: f64, u: f64) -> Result<f64> {
        if !(epsilon > 0.0) {
            return Err(Error::invalid(format!("truncation level must be positive, got {epsilon}")));
        }
        if self.tail_mass(epsilon) <= 0.0 {
            return Err(Error::EmptyTruncation { epsilon });
        }
        let u = u.clamp(0.0, 1.0);
        if let LevyKind::Dickman {} = self.kind {
            return Ok(epsilon.powf(1.0 - u));
        }
        let (sign, q) = if u < 0.5 { (-1.0, 1.0 - 2.0 * u) } else { (1.0, 2.0 * u - 1.0) };
        Ok(sign * self.magnitude_quantile(epsilon, q))
    }

    // Quantile of |y| for the symmetric measures.
    fn magnitude_quantile(&self, epsilon: f64, q: f64) -> f64 {
        match self.kind {
            LevyKind::TwoPoint { .. } => 1.0,
            LevyKind::TruncatedStable { beta, .. } => {
                let lo = epsilon.powf(-beta);
                (lo - q * (lo - 1.0)).powf(-1.0 / beta)
            }
            LevyKind::InnerTruncatedStable { alpha, delta, .. } => {
                let r = epsilon.max(delta);
                if q >= 1.0 {
                    f64::MAX
                } else {
                    r * (1.0 - q).powf(-1.0 / alpha)
                }
            }
            LevyKind::Dickman {} => unreachable!("Dickman is one-sided"),
        }
    }

    /// `n` independent draws from `ν` restricted to `{|y| ≥ ε}`, by inversion.
    pub fn sample_jump_sizes<R: Rng + ?Sized>(&self, epsilon: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        // Validate once; the quantile cannot fail afterwards.
        self.truncated_quantile(epsilon, 0.5)?;
        Ok((0..n)
            .map(|_| {
                let u: f64 = rng.random();
                self.truncated_quantile(epsilon, u).expect("validated above")
            })
            .collect())
    }
}
