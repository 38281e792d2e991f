//! The two-parameter unified entropy `S_{α,β}` and its limits.
//!
//! ```text
//! S_{α,β}(ρ) = [(Tr ρ^α)^β − 1] / ((1 − α) β)     α ≠ 1, β > 0
//! R_α(ρ)     = log₂(Tr ρ^α) / (1 − α)             β = 0   (Rényi)
//! S(ρ)       = −Tr ρ log₂ ρ                        α = 1   (von Neumann)
//! ```
//!
//! The Rényi and von Neumann branches are in bits. The generic branch is
//! unit-free; its β → 0 and α → 1 limits are the natural-log versions of the
//! two named branches, so approaching a limit numerically converges to
//! `ln 2` times the bit-valued branch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{spectrum_power, DensityOperator};

/// `|α − 1|` below this routes to the von Neumann branch.
pub const ALPHA_ONE_TOL: f64 = 1e-9;
/// `β` below this routes to the Rényi branch.
pub const BETA_ZERO_TOL: f64 = 1e-12;
/// Normalization tolerance for probability vectors.
pub const PROB_TOL: f64 = 1e-10;

/// The entropy parameters `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct EntropyParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for EntropyParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        EntropyParams::new(r.alpha, r.beta)
    }
}

/// Which closed form evaluates a given `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    VonNeumann,
    Renyi,
    Unified,
}

impl EntropyParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha = {alpha} must be > 0")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!("beta = {beta} must be >= 0")));
        }
        Ok(Self { alpha, beta })
    }

    pub const fn von_neumann() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }

    /// `R_α`, i.e. `β = 0`.
    pub fn renyi(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    /// `T_α`, i.e. `β = 1`.
    pub fn tsallis(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    /// `(2, 1)`: the linear entropy `1 − Tr ρ²`.
    pub const fn linear() -> Self {
        Self { alpha: 2.0, beta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn branch(&self) -> Branch {
        if (self.alpha - 1.0).abs() < ALPHA_ONE_TOL {
            Branch::VonNeumann
        } else if self.beta < BETA_ZERO_TOL {
            Branch::Renyi
        } else {
            Branch::Unified
        }
    }

    /// `(1 − α) β`, zero on the two limit branches.
    pub fn cross_coefficient(&self) -> f64 {
        match self.branch() {
            Branch::Unified => (1.0 - self.alpha) * self.beta,
            _ => 0.0,
        }
    }

    /// Parameters where the unified entropy is concave:
    /// `{0<α≤1, αβ≤1} ∪ {α≥1, αβ≥1} ∪ {0<α<1, 0≤β≤1}`.
    pub fn in_concavity_region(&self) -> bool {
        let (a, b) = (self.alpha, self.beta);
        if self.branch() == Branch::VonNeumann {
            return true;
        }
        (a <= 1.0 && a * b <= 1.0) || (a >= 1.0 && a * b >= 1.0) || (a < 1.0 && b <= 1.0)
    }

    /// Parameters where subadditivity across disjoint subsets is claimed:
    /// `{α ≥ 1, β = 1}` plus the von Neumann point.
    pub fn in_subadditivity_region(&self) -> bool {
        self.branch() == Branch::VonNeumann || (self.alpha >= 1.0 && self.beta == 1.0)
    }

    /// Largest value on a `d`-dimensional system, attained by `I/d`.
    pub fn max_value(&self, d: usize) -> f64 {
        let d = d as f64;
        match self.branch() {
            Branch::VonNeumann | Branch::Renyi => d.log2(),
            Branch::Unified => {
                let c = (1.0 - self.alpha) * self.beta;
                (d.powf(c) - 1.0) / c
            }
        }
    }
}

/// Unified entropy of a density operator.
pub fn unified_entropy(rho: &DensityOperator, params: EntropyParams) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.spectrum()?, params))
}

/// Unified entropy of a clamped eigenvalue list (no normalization check).
pub fn entropy_of_spectrum(spectrum: &[f64], params: EntropyParams) -> f64 {
    let value = match params.branch() {
        Branch::VonNeumann => -spectrum
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.log2())
            .sum::<f64>(),
        Branch::Renyi => spectrum_power(spectrum, params.alpha).log2() / (1.0 - params.alpha),
        Branch::Unified => {
            let tr = spectrum_power(spectrum, params.alpha);
            let c = (1.0 - params.alpha) * params.beta;
            (params.beta * tr.ln()).exp_m1() / c
        }
    };
    value.max(0.0)
}

/// `h(ε) = −ε log₂ ε − (1−ε) log₂(1−ε)`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("binary entropy argument {eps} outside [0,1]")));
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(eps) + term(1.0 - eps))
}

fn check_probabilities(v: &[f64]) -> Result<()> {
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL || v.iter().any(|&x| x < -PROB_TOL || !x.is_finite()) {
        return Err(Error::Domain(format!("probability vector sums to {sum}")));
    }
    Ok(())
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `λ ≻ μ`: every descending partial sum of `λ` dominates that of `μ`.
/// Vectors of different length are padded with zeros.
pub fn majorizes(lambda: &[f64], mu: &[f64]) -> Result<bool> {
    check_probabilities(lambda)?;
    check_probabilities(mu)?;
    let (l, m) = (sorted_desc(lambda), sorted_desc(mu));
    let len = l.len().max(m.len());
    let (mut sl, mut sm) = (0.0, 0.0);
    for k in 0..len {
        sl += l.get(k).copied().unwrap_or(0.0);
        sm += m.get(k).copied().unwrap_or(0.0);
        if sl < sm - PROB_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `S(diag λ) − S(diag μ)`. Schur-concavity requires this to be
/// non-negative whenever `μ ≻ λ`.
pub fn schur_concavity_witness(lambda: &[f64], mu: &[f64], params: EntropyParams) -> Result<f64> {
    check_probabilities(lambda)?;
    check_probabilities(mu)?;
    let clean = |v: &[f64]| v.iter().map(|&x| x.max(0.0)).collect::<Vec<_>>();
    Ok(entropy_of_spectrum(&clean(lambda), params) - entropy_of_spectrum(&clean(mu), params))
}

/// `S_{α′,β}(ρ) − S_{α,β}(ρ)` for `0 < α′ ≤ α`, `β ≥ 1`; non-negative by
/// monotonicity in `α`.
pub fn alpha_monotonicity_gap(
    rho: &DensityOperator,
    alpha_prime: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if !(alpha_prime > 0.0 && alpha_prime <= alpha) {
        return Err(Error::InvalidParams(format!(
            "need 0 < alpha' <= alpha, got alpha' = {alpha_prime}, alpha = {alpha}"
        )));
    }
    if !(beta >= 1.0) {
        return Err(Error::InvalidParams(format!("need beta >= 1, got {beta}")));
    }
    let spectrum = rho.spectrum()?;
    let lo = EntropyParams::new(alpha_prime, beta)?;
    let hi = EntropyParams::new(alpha, beta)?;
    Ok(entropy_of_spectrum(&spectrum, lo) - entropy_of_spectrum(&spectrum, hi))
}

/// `ε log₂(d − 1) + h(ε)`, defined for `0 ≤ ε < 1/2`.
pub fn fannes_audenaert_bound(eps: f64, d: usize) -> Result<f64> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::Domain(format!("epsilon {eps} outside [0, 1/2)")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("dimension {d} < 2")));
    }
    let first = if d == 2 { 0.0 } else { eps * ((d - 1) as f64).log2() };
    Ok(first + binary_entropy(eps)?)
}
