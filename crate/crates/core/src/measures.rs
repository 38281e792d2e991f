//! Unified-entropy concentratable entanglement of pure states.
//!
//! For a pure state `ψ` on `n` subsystems and a subset `s ⊆ [n]`,
//!
//! ```text
//! E^{(s)}_{α,β}(ψ) = 2^{−|s|} Σ_{χ ∈ P(s)} S_{α,β}(ψ_χ),   S(ψ_∅) = 0.
//! ```
//!
//! Reduced states of a pure state on `χ` and on its complement share their
//! nonzero spectrum, so every term is evaluated on whichever side has the
//! smaller dimension. When `s = [n]` the power set is closed under
//! complement and each pair is eigensolved once.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::entropy::{entropy_of_spectrum, fannes_audenaert_bound, Branch, EntropyParams};
use crate::error::{Error, Result};
use crate::subset::{mask_key, power_set, SubsetSpec};
use crate::tensor::{
    hermitian_eigenvalues, reduced_matrix, reshape_amplitudes, trace_distance, CMatrix, PureState,
};

/// Largest `|s|` accepted by the power-set enumeration.
pub const MAX_SUBSET_SIZE: usize = 20;
/// Tolerance for the inequality checks in this module.
pub const INEQ_TOL: f64 = 1e-10;
/// Schmidt coefficients at or below this are rounding noise.
pub const SCHMIDT_FLOOR: f64 = 1e-13;

fn check_subset(psi: &PureState, s: &SubsetSpec) -> Result<()> {
    s.check_range(psi.num_subsystems())?;
    if s.len() > MAX_SUBSET_SIZE {
        return Err(Error::EnumerationGuard(s.len(), MAX_SUBSET_SIZE));
    }
    Ok(())
}

/// Spectrum of `ψ_χ` computed on the smaller of `χ` and its complement.
fn reduced_spectrum(psi: &PureState, chi: u32) -> Result<Vec<f64>> {
    let dims = psi.dims();
    let full = dims.full_mask();
    let comp = full & !chi;
    if chi == 0 || comp == 0 {
        return Ok(vec![1.0]);
    }
    let side = if dims.subset_dim(chi) <= dims.subset_dim(comp) {
        chi
    } else {
        comp
    };
    Ok(schmidt_spectrum(psi, side))
}

/// Squared singular values of the amplitudes reshaped as (`side` x rest),
/// i.e. the nonzero spectrum of `ψ_side`, descending. Singular values below
/// [`SCHMIDT_FLOOR`] are dropped and the rest renormalized to sum 1.
pub(crate) fn schmidt_spectrum(psi: &PureState, side: u32) -> Vec<f64> {
    let m = reshape_amplitudes(psi.amplitudes(), psi.dims(), side);
    let mut vals: Vec<f64> = m
        .singular_values()
        .iter()
        .filter(|&&sv| sv > SCHMIDT_FLOOR)
        .map(|&sv| sv * sv)
        .collect();
    let total: f64 = vals.iter().sum();
    vals.iter_mut().for_each(|v| *v /= total);
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Spectra of `ψ_χ` for every `χ ∈ P(mask)`, in power-set order. The empty
/// subset carries the spectrum `[1]` (a pure one-dimensional state).
pub(crate) fn subset_spectra(psi: &PureState, mask: u32) -> Result<Vec<(u32, Vec<f64>)>> {
    let subsets: Vec<u32> = power_set(mask).collect();
    let full = psi.dims().full_mask();
    if mask == full && mask != 0 {
        // One representative per complement pair: subsets without the top bit.
        let top = 1u32 << (31 - full.leading_zeros());
        let reps: Vec<u32> = subsets.iter().copied().filter(|c| c & top == 0).collect();
        let spectra = spectra_of(psi, &reps)?;
        let lookup: BTreeMap<u32, &Vec<f64>> = reps.iter().copied().zip(spectra.iter()).collect();
        return Ok(subsets
            .iter()
            .map(|&c| {
                let rep = if c & top == 0 { c } else { full & !c };
                (c, lookup[&rep].clone())
            })
            .collect());
    }
    let spectra = spectra_of(psi, &subsets)?;
    Ok(subsets.into_iter().zip(spectra).collect())
}

/// Below this much work (subsets x state dimension) the spectra are
/// computed on the calling thread.
const PARALLEL_WORK: usize = 1 << 12;

fn spectra_of(psi: &PureState, subsets: &[u32]) -> Result<Vec<Vec<f64>>> {
    if subsets.len() * psi.dims().total() < PARALLEL_WORK {
        subsets.iter().map(|&c| reduced_spectrum(psi, c)).collect()
    } else {
        subsets.par_iter().map(|&c| reduced_spectrum(psi, c)).collect()
    }
}

/// Averages per-subset entropies for several parameter points at once.
/// `mask == 0` gives zero for every point.
pub(crate) fn cce_values_mask(
    psi: &PureState,
    mask: u32,
    params: &[EntropyParams],
) -> Result<Vec<f64>> {
    let spectra = subset_spectra(psi, mask)?;
    let norm = (spectra.len() as f64).recip();
    Ok(params
        .iter()
        .map(|&p| {
            spectra
                .iter()
                .filter(|(c, _)| *c != 0)
                .map(|(_, spec)| entropy_of_spectrum(spec, p))
                .sum::<f64>()
                * norm
        })
        .collect())
}

/// Result of evaluating the measure with its per-subset terms.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub value: f64,
    /// `χ` bitmask (bit `i−1` for label `i`) to `S_{α,β}(ψ_χ)`.
    pub per_subset_terms: BTreeMap<u32, f64>,
    pub params: EntropyParams,
    pub subset: SubsetSpec,
}

impl Serialize for MeasureReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a BTreeMap<u32, f64>);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    map.serialize_entry(&mask_key(*k), v)?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(5))?;
        map.serialize_entry("value", &self.value)?;
        map.serialize_entry("alpha", &self.params.alpha())?;
        map.serialize_entry("beta", &self.params.beta())?;
        map.serialize_entry("subset", &self.subset)?;
        map.serialize_entry("terms", &Terms(&self.per_subset_terms))?;
        map.end()
    }
}

/// `E^{(s)}_{α,β}(ψ)` with every term of the power-set average.
pub fn cce_pure(psi: &PureState, s: &SubsetSpec, params: EntropyParams) -> Result<MeasureReport> {
    check_subset(psi, s)?;
    let spectra = subset_spectra(psi, s.mask())?;
    let terms: BTreeMap<u32, f64> = spectra
        .iter()
        .map(|(c, spec)| (*c, if *c == 0 { 0.0 } else { entropy_of_spectrum(spec, params) }))
        .collect();
    // Sum in power-set order for a deterministic result.
    let value = spectra.iter().map(|(c, _)| terms[c]).sum::<f64>() / spectra.len() as f64;
    Ok(MeasureReport {
        value,
        per_subset_terms: terms,
        params,
        subset: s.clone(),
    })
}

pub fn cce_value(psi: &PureState, s: &SubsetSpec, params: EntropyParams) -> Result<f64> {
    check_subset(psi, s)?;
    Ok(cce_values_mask(psi, s.mask(), &[params])?[0])
}

/// Straightforward evaluation: every term is computed from `χ` itself,
/// sequentially, without complement reuse. Used to cross-check
/// [`cce_pure`].
pub fn cce_pure_naive(psi: &PureState, s: &SubsetSpec, params: EntropyParams) -> Result<f64> {
    check_subset(psi, s)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for chi in power_set(s.mask()) {
        count += 1;
        if chi == 0 {
            continue;
        }
        sum += entropy_of_spectrum(&schmidt_spectrum(psi, chi), params);
    }
    Ok(sum / count as f64)
}

/// The four benchmark measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NamedMeasures {
    /// von Neumann, `α = 1`.
    pub e: f64,
    /// Rényi, `(2, 0)`.
    pub r2: f64,
    /// Tsallis, `(3, 1)`.
    pub t3: f64,
    /// Linear, `(2, 1)`.
    pub c: f64,
}

impl NamedMeasures {
    pub fn params() -> [EntropyParams; 4] {
        [
            EntropyParams::von_neumann(),
            EntropyParams::renyi(2.0).expect("valid"),
            EntropyParams::tsallis(3.0).expect("valid"),
            EntropyParams::linear(),
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        Self {
            e: v[0],
            r2: v[1],
            t3: v[2],
            c: v[3],
        }
    }
}

pub fn named_measures(psi: &PureState, s: &SubsetSpec) -> Result<NamedMeasures> {
    check_subset(psi, s)?;
    Ok(NamedMeasures::from_values(&cce_values_mask(
        psi,
        s.mask(),
        &NamedMeasures::params(),
    )?))
}

/// `1 − 2^{−|s|} Σ_χ Tr ψ_χ²`, with purities taken as squared Frobenius
/// norms instead of eigenvalues.
pub fn concentratable_from_purities(psi: &PureState, s: &SubsetSpec) -> Result<f64> {
    check_subset(psi, s)?;
    let mut purity_sum = 0.0;
    let mut count = 0usize;
    for chi in power_set(s.mask()) {
        count += 1;
        purity_sum += if chi == 0 {
            1.0
        } else {
            reduced_matrix(psi.amplitudes(), psi.dims(), chi).norm_squared()
        };
    }
    Ok(1.0 - purity_sum / count as f64)
}

/// Values and pass flags of the ordering relations between the benchmark
/// measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingReport {
    pub measures: NamedMeasures,
    pub alpha_prime: f64,
    pub alpha: f64,
    pub renyi_alpha_prime: f64,
    pub renyi_alpha: f64,
    /// `E ≥ C / ln 2`
    pub e_ge_c_over_ln2: bool,
    /// `E ≥ 2C − 1/2`
    pub e_ge_2c_minus_half: bool,
    /// `R₂ ≥ C / ln 2`
    pub r2_ge_c_over_ln2: bool,
    /// `C ≥ T₃`
    pub c_ge_t3: bool,
    /// `R_{α′} ≥ R_α`
    pub renyi_monotone: bool,
    /// `E ≥ R₂`
    pub e_ge_r2: bool,
    /// `E` and `R₂` agree within tolerance on an entangled state; the
    /// strict form of the chain does not hold for this state.
    pub e_equals_r2: bool,
}

impl OrderingReport {
    pub fn all_hold(&self) -> bool {
        self.e_ge_c_over_ln2
            && self.e_ge_2c_minus_half
            && self.r2_ge_c_over_ln2
            && self.c_ge_t3
            && self.renyi_monotone
            && self.e_ge_r2
    }
}

/// Checks the ordering relations on `ψ`, including Rényi monotonicity for
/// the supplied `α′ ≤ α`.
pub fn ordering_report(
    psi: &PureState,
    s: &SubsetSpec,
    alpha_prime: f64,
    alpha: f64,
) -> Result<OrderingReport> {
    if !(alpha_prime > 0.0 && alpha_prime <= alpha) {
        return Err(Error::InvalidParams(format!(
            "need 0 < alpha' <= alpha, got {alpha_prime} and {alpha}"
        )));
    }
    check_subset(psi, s)?;
    let mut params = NamedMeasures::params().to_vec();
    params.push(EntropyParams::renyi(alpha_prime)?);
    params.push(EntropyParams::renyi(alpha)?);
    let v = cce_values_mask(psi, s.mask(), &params)?;
    let m = NamedMeasures::from_values(&v);
    let ln2 = std::f64::consts::LN_2;
    Ok(OrderingReport {
        measures: m,
        alpha_prime,
        alpha,
        renyi_alpha_prime: v[4],
        renyi_alpha: v[5],
        e_ge_c_over_ln2: m.e - m.c / ln2 >= -INEQ_TOL,
        e_ge_2c_minus_half: m.e - (2.0 * m.c - 0.5) >= -INEQ_TOL,
        r2_ge_c_over_ln2: m.r2 - m.c / ln2 >= -INEQ_TOL,
        c_ge_t3: m.c - m.t3 >= -INEQ_TOL,
        renyi_monotone: v[4] - v[5] >= -INEQ_TOL,
        e_ge_r2: m.e - m.r2 >= -INEQ_TOL,
        e_equals_r2: m.e > 1e-6 && (m.e - m.r2).abs() <= 1e-10,
    })
}

/// `E^{(s)}_{α′,β}(ψ) − E^{(s)}_{α,β}(ψ)` for `0 < α′ ≤ α`, `β ≥ 1`.
pub fn alpha_monotone_gap_pure(
    psi: &PureState,
    s: &SubsetSpec,
    alpha_prime: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if !(alpha_prime > 0.0 && alpha_prime <= alpha) || !(beta >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < alpha' <= alpha and beta >= 1, got ({alpha_prime}, {alpha}, {beta})"
        )));
    }
    check_subset(psi, s)?;
    let v = cce_values_mask(
        psi,
        s.mask(),
        &[EntropyParams::new(alpha_prime, beta)?, EntropyParams::new(alpha, beta)?],
    )?;
    Ok(v[0] - v[1])
}

/// Splits `s` (labels over the joint system) into the parts on the first
/// `n_a` subsystems and on the rest, the latter relabeled from 1.
fn split_mask(mask: u32, n_a: usize) -> (u32, u32) {
    let low = (1u32 << n_a) - 1;
    (mask & low, mask >> n_a)
}

/// Residual of the tensor-product identity
/// `E(ψ_A ⊗ ψ_B) = E_A + E_B + (1−α)β E_A E_B` on `s` (labels over the
/// joint system, `A` first).
pub fn tensor_identity_residual(
    psi_a: &PureState,
    psi_b: &PureState,
    s: &SubsetSpec,
    params: EntropyParams,
) -> Result<f64> {
    let joint = psi_a.tensor(psi_b)?;
    check_subset(&joint, s)?;
    let (sa, sb) = split_mask(s.mask(), psi_a.num_subsystems());
    let e = cce_values_mask(&joint, s.mask(), &[params])?[0];
    let ea = cce_values_mask(psi_a, sa, &[params])?[0];
    let eb = cce_values_mask(psi_b, sb, &[params])?[0];
    Ok((e - ea - eb - params.cross_coefficient() * ea * eb).abs())
}

/// `E^{(s)} + E^{(s′)} − E^{(s ∪ s′)}` for disjoint subsets in the
/// subadditivity region.
pub fn subadditivity_gap(
    psi: &PureState,
    s: &SubsetSpec,
    s2: &SubsetSpec,
    params: EntropyParams,
) -> Result<f64> {
    if !s.is_disjoint(s2) {
        return Err(Error::OverlappingSubsets);
    }
    if !params.in_subadditivity_region() {
        return Err(Error::InvalidParams(
            "subadditivity is only claimed for alpha >= 1, beta = 1 or alpha = 1".into(),
        ));
    }
    let union = s.union(s2);
    check_subset(psi, &union)?;
    let e1 = cce_values_mask(psi, s.mask(), &[params])?[0];
    let e2 = cce_values_mask(psi, s2.mask(), &[params])?[0];
    let e12 = cce_values_mask(psi, union.mask(), &[params])?[0];
    Ok(e1 + e2 - e12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmeCertificate {
    pub value: f64,
    pub threshold: f64,
    pub certified: bool,
}

/// Sufficient condition for genuine tripartite entanglement of three
/// equal-dimension qudits: `E^{([3])}` above the largest value any state
/// that factorizes across a cut can reach. Values within [`INEQ_TOL`] of
/// the threshold are not certified.
pub fn gme_threshold(d: usize, params: EntropyParams) -> f64 {
    params.max_value(d) / 2.0
}

pub fn gme_certificate(psi: &PureState, params: EntropyParams) -> Result<GmeCertificate> {
    let dims = psi.dims().as_slice();
    if dims.len() != 3 {
        return Err(Error::Precondition(format!(
            "GME certificate needs exactly 3 subsystems, got {}",
            dims.len()
        )));
    }
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(Error::Precondition("GME certificate needs equal local dimensions".into()));
    }
    let value = cce_value(psi, &SubsetSpec::full(3)?, params)?;
    let threshold = gme_threshold(dims[0], params);
    Ok(GmeCertificate {
        value,
        threshold,
        certified: value > threshold + INEQ_TOL,
    })
}

/// Which continuity bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContinuityBound {
    /// `2αε/(α−1)` for `α > 1`, `β ≥ 1`.
    Unified,
    /// `ε log₂(d−1) + h(ε)` at `α = 1`.
    FannesAudenaert,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityCheck {
    pub epsilon: f64,
    pub lhs: f64,
    pub bound: f64,
    pub kind: ContinuityBound,
}

impl ContinuityCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound + INEQ_TOL
    }
}

/// `|E^{(s)}(ψ) − E^{(s)}(φ)|` against the continuity bound at
/// `ε = D(ψ, φ)`.
pub fn continuity_gap(
    psi: &PureState,
    phi: &PureState,
    s: &SubsetSpec,
    params: EntropyParams,
) -> Result<ContinuityCheck> {
    if psi.dims() != phi.dims() {
        return Err(Error::DimensionMismatch(psi.dims().total(), phi.dims().total()));
    }
    let eps = trace_distance(&psi.to_density(), &phi.to_density())?;
    if eps >= 0.5 {
        return Err(Error::Domain(format!("trace distance {eps} >= 1/2")));
    }
    let (kind, bound) = match params.branch() {
        Branch::VonNeumann => (
            ContinuityBound::FannesAudenaert,
            fannes_audenaert_bound(eps, psi.dims().total())?,
        ),
        Branch::Unified if params.alpha() > 1.0 && params.beta() >= 1.0 => {
            let a = params.alpha();
            (ContinuityBound::Unified, 2.0 * a * eps / (a - 1.0))
        }
        _ => {
            return Err(Error::InvalidParams(
                "continuity bound needs alpha = 1, or alpha > 1 with beta >= 1".into(),
            ))
        }
    };
    let lhs = (cce_value(psi, s, params)? - cce_value(phi, s, params)?).abs();
    Ok(ContinuityCheck {
        epsilon: eps,
        lhs,
        bound,
        kind,
    })
}

/// Rank-one test on `K†K`: the second eigenvalue must vanish relative to
/// the first.
pub fn is_rank_one(k: &CMatrix) -> bool {
    let vals = match hermitian_eigenvalues(&(k.adjoint() * k)) {
        Ok(v) => v,
        Err(_) => return false,
    };
    vals[0] > 0.0 && vals.get(1).map_or(true, |&v| v.abs() <= 1e-10 * vals[0])
}

/// `E^{(s)}(ψ) − Σ_k p_k E^{(s)}(ψ_k)` after a rank-one local Kraus set on
/// `site`; non-negative when the entropy is concave at `params`.
pub fn locc_monotonicity_spotcheck(
    psi: &PureState,
    s: &SubsetSpec,
    params: EntropyParams,
    site: usize,
    kraus: &[CMatrix],
) -> Result<f64> {
    if !params.in_concavity_region() {
        return Err(Error::InvalidParams(format!(
            "({}, {}) is outside the concavity region",
            params.alpha(),
            params.beta()
        )));
    }
    let n = psi.num_subsystems();
    if site == 0 || site > n {
        return Err(Error::LabelOutOfRange { label: site, n });
    }
    let d = psi.dims().as_slice()[site - 1];
    let dev = crate::tensor::kraus_completeness_deviation(kraus, d);
    if kraus.is_empty() || dev > crate::tensor::KRAUS_TOL {
        return Err(Error::IncompleteKraus(dev));
    }
    // A lone element is unitary by completeness; otherwise every element
    // must be rank one.
    if kraus.len() > 1 {
        if let Some(i) = kraus.iter().position(|k| !is_rank_one(k)) {
            return Err(Error::Precondition(format!("Kraus element {i} is not rank one")));
        }
    }
    let before = cce_value(psi, s, params)?;
    let mut after = 0.0;
    for k in kraus {
        let v = psi.apply_local_unnormalized(site, k)?;
        let p = v.norm_squared();
        if p <= 1e-14 {
            continue;
        }
        let branch = PureState::normalized(v, psi.dims().clone())?;
        after += p * cce_value(&branch, s, params)?;
    }
    Ok(before - after)
}
