//! Randomized property suites. Each trial draws everything from its own
//! seed, so a failing trial can be rerun alone with [`run_trial`].

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{
    alpha_monotonicity_gap, majorizes, schur_concavity_witness, EntropyParams,
};
use crate::error::{Error, Result};
use crate::measures::{
    cce_value, continuity_gap, locc_monotonicity_spotcheck, ordering_report, subadditivity_gap,
    tensor_identity_residual, INEQ_TOL,
};
use crate::oracle::entanglement_of_formation;
use crate::roof::{cce_mixed_upper, Ensemble, RoofOptions};
use crate::states::{
    haar_random_with, random_density_with, random_isometry, random_local_unitaries,
    random_product_with, seeded_rng, gaussian_vector,
};
use crate::subset::SubsetSpec;
use crate::swaptest::{cce_from_distribution, distribution_from_purities, swap_test_distribution};
use crate::tensor::{CMatrix, CVector, DensityOperator, Dims, PureState};

/// Tolerance of the separable-roof suite.
pub const ROOF_ZERO_TOL: f64 = 1e-3;
/// Tolerance of the roof vs. closed-form comparison.
pub const ROOF_EOF_TOL: f64 = 5e-3;
/// Tolerance of exact identities (tensor product, SWAP test, local unitaries).
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Schur,
    AlphaMono,
    Ordering,
    Subadd,
    TensorId,
    Continuity,
    Locc,
    SwapConsistency,
    RoofSeparable,
    RoofEof,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Schur,
        Suite::AlphaMono,
        Suite::Ordering,
        Suite::Subadd,
        Suite::TensorId,
        Suite::Continuity,
        Suite::Locc,
        Suite::SwapConsistency,
        Suite::RoofSeparable,
        Suite::RoofEof,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Schur => "schur",
            Suite::AlphaMono => "alpha-mono",
            Suite::Ordering => "ordering",
            Suite::Subadd => "subadd",
            Suite::TensorId => "tensor-id",
            Suite::Continuity => "continuity",
            Suite::Locc => "locc",
            Suite::SwapConsistency => "swap-consistency",
            Suite::RoofSeparable => "roof-separable",
            Suite::RoofEof => "roof-eof",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::RoofSeparable | Suite::RoofEof => 20,
            _ => 200,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::Parse(format!("unknown suite '{s}'; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub pass: bool,
    pub detail: String,
}

impl TrialOutcome {
    fn check(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    /// Pass this to [`run_trial`] to reproduce.
    pub trial_seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seed of trial `t` under master seed `seed` (splitmix64 finalizer).
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    let mut z = seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let outcomes: Vec<(usize, u64, TrialOutcome)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, t);
            run_trial(suite, ts).map(|o| (t, ts, o))
        })
        .collect::<Result<_>>()?;
    let failures: Vec<TrialFailure> = outcomes
        .iter()
        .filter(|(_, _, o)| !o.pass)
        .map(|(t, ts, o)| TrialFailure {
            trial: *t,
            trial_seed: *ts,
            detail: o.detail.clone(),
        })
        .collect();
    Ok(SuiteReport {
        suite,
        seed,
        trials,
        passed: trials - failures.len(),
        failures,
    })
}

pub fn run_trial(suite: Suite, trial_seed: u64) -> Result<TrialOutcome> {
    let mut rng = seeded_rng(trial_seed);
    match suite {
        Suite::Schur => schur_trial(&mut rng),
        Suite::AlphaMono => alpha_mono_trial(&mut rng),
        Suite::Ordering => ordering_trial(&mut rng),
        Suite::Subadd => subadd_trial(&mut rng),
        Suite::TensorId => tensor_id_trial(&mut rng),
        Suite::Continuity => continuity_trial(&mut rng),
        Suite::Locc => locc_trial(&mut rng),
        Suite::SwapConsistency => swap_trial(&mut rng),
        Suite::RoofSeparable => roof_separable_trial(&mut rng, trial_seed),
        Suite::RoofEof => roof_eof_trial(&mut rng, trial_seed),
    }
}

// ---- parameter and state samplers ----

/// Any valid `(α, β)`, with the limit branches drawn a quarter of the time each.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> Result<EntropyParams> {
    match rng.random_range(0..4) {
        0 => Ok(EntropyParams::von_neumann()),
        1 => EntropyParams::renyi(rng.random_range(0.1..5.0)),
        _ => EntropyParams::new(rng.random_range(0.1..5.0), rng.random_range(0.05..3.0)),
    }
}

/// `(α, β)` in the concavity region.
pub fn random_concave_params<R: Rng + ?Sized>(rng: &mut R) -> Result<EntropyParams> {
    match rng.random_range(0..4) {
        0 => Ok(EntropyParams::von_neumann()),
        1 => {
            let a = rng.random_range(0.1..=1.0);
            EntropyParams::new(a, rng.random_range(0.0..=1.0 / a))
        }
        2 => {
            let a = rng.random_range(1.0..5.0);
            EntropyParams::new(a, rng.random_range(1.0 / a..3.0))
        }
        _ => EntropyParams::new(rng.random_range(0.1..1.0), rng.random_range(0.0..=1.0)),
    }
}

/// `(α, β)` with `α ≥ 1, β = 1` or `α = 1`.
pub fn random_subadditive_params<R: Rng + ?Sized>(rng: &mut R) -> Result<EntropyParams> {
    if rng.random_bool(0.5) {
        EntropyParams::tsallis(rng.random_range(1.0..5.0))
    } else {
        EntropyParams::new(1.0, rng.random_range(0.0..3.0))
    }
}

fn random_mask<R: Rng + ?Sized>(rng: &mut R, n: usize) -> u32 {
    rng.random_range(1..(1u32 << n))
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SubsetSpec> {
    SubsetSpec::from_mask(random_mask(rng, n))
}

fn random_dims<R: Rng + ?Sized>(rng: &mut R, min_n: usize, max_n: usize, max_total: usize) -> Result<Dims> {
    loop {
        let n = rng.random_range(min_n..=max_n);
        let dims: Vec<usize> = (0..n)
            .map(|_| if rng.random_bool(0.75) { 2 } else { 3 })
            .collect();
        if dims.iter().product::<usize>() <= max_total {
            return Dims::new(dims);
        }
    }
}

/// Probability vector from normalized exponentials, with a few exact zeros.
fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                -rng.random_range(f64::EPSILON..1.0f64).ln()
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

fn fmt_params(p: EntropyParams) -> String {
    format!("(α={}, β={})", p.alpha(), p.beta())
}

// ---- trials ----

/// `μ` is mixed by random T-transforms into `λ ≺ μ`; then `S(λ) ≥ S(μ)`.
fn schur_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let len = rng.random_range(2..=8);
    let mu = random_probabilities(rng, len);
    let mut lambda = mu.clone();
    for _ in 0..rng.random_range(1..=4) {
        let i = rng.random_range(0..len);
        let j = (i + rng.random_range(1..len)) % len;
        let t = rng.random_range(0.0..=1.0);
        let (a, b) = (lambda[i], lambda[j]);
        lambda[i] = t * a + (1.0 - t) * b;
        lambda[j] = (1.0 - t) * a + t * b;
    }
    let params = random_params(rng)?;
    let ordered = majorizes(&mu, &lambda)?;
    let w = schur_concavity_witness(&lambda, &mu, params)?;
    let scale = 1.0f64.max(w.abs());
    Ok(TrialOutcome::check(
        ordered && w >= -INEQ_TOL * scale,
        format!("len={len} {} majorized={ordered} S(λ)−S(μ)={w:e}", fmt_params(params)),
    ))
}

fn alpha_mono_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let dims = random_dims(rng, 1, 3, 16)?;
    let rank = rng.random_range(1..=dims.total());
    let rho = random_density_with(&dims, rank, rng)?;
    let a1 = rng.random_range(0.1..5.0);
    let a2 = rng.random_range(0.1..5.0);
    let (ap, a) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
    let beta = rng.random_range(1.0..3.0);
    let gap = alpha_monotonicity_gap(&rho, ap, a, beta)?;
    Ok(TrialOutcome::check(
        gap >= -INEQ_TOL,
        format!("dims={:?} rank={rank} α′={ap} α={a} β={beta} gap={gap:e}", dims.as_slice()),
    ))
}

fn ordering_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let dims = Dims::qubits(4)?;
    let psi = haar_random_with(&dims, rng)?;
    let s = SubsetSpec::full(4)?;
    let a1 = rng.random_range(0.1..5.0);
    let a2 = rng.random_range(0.1..5.0);
    let (ap, a) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
    let rep = ordering_report(&psi, &s, ap, a)?;
    let m = rep.measures;
    Ok(TrialOutcome::check(
        rep.all_hold(),
        format!(
            "E={} R2={} T3={} C={} R_α′={} R_α={} (α′={ap}, α={a})",
            m.e, m.r2, m.t3, m.c, rep.renyi_alpha_prime, rep.renyi_alpha
        ),
    ))
}

/// Random disjoint nonempty `s, s′` on a random state of up to 5 subsystems.
fn subadd_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let n = 5;
    let psi = haar_random_with(&Dims::qubits(n)?, rng)?;
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let k = rng.random_range(1..n);
    let k2 = rng.random_range(1..=n - k);
    let s = SubsetSpec::new(&labels[..k])?;
    let s2 = SubsetSpec::new(&labels[k..k + k2])?;
    let params = random_subadditive_params(rng)?;
    let gap = subadditivity_gap(&psi, &s, &s2, params)?;
    Ok(TrialOutcome::check(
        gap >= -INEQ_TOL,
        format!("s={s} s′={s2} {} gap={gap:e}", fmt_params(params)),
    ))
}

fn tensor_id_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let da = random_dims(rng, 1, 3, 12)?;
    let db = random_dims(rng, 1, 3, 12)?;
    let a = haar_random_with(&da, rng)?;
    let b = haar_random_with(&db, rng)?;
    let n = da.len() + db.len();
    let s = random_subset(rng, n)?;
    let params = match rng.random_range(0..5) {
        0 => EntropyParams::linear(),
        _ => random_params(rng)?,
    };
    let res = tensor_identity_residual(&a, &b, &s, params)?;
    Ok(TrialOutcome::check(
        res <= IDENTITY_TOL,
        format!(
            "A={:?} B={:?} s={s} {} residual={res:e}",
            da.as_slice(),
            db.as_slice(),
            fmt_params(params)
        ),
    ))
}

/// `φ ∝ ψ + t·g` with `g` Gaussian, rescaled until `D(ψ, φ) < 0.4`.
pub fn nearby_state<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> Result<PureState> {
    let d = psi.dims().total();
    let g = gaussian_vector(d, rng);
    let mut t = rng.random_range(0.0..1.0);
    loop {
        let v: CVector = psi.amplitudes() + g.scale(t / (d as f64).sqrt());
        let phi = PureState::normalized(v, psi.dims().clone())?;
        let overlap = psi.inner(&phi)?.norm_sqr().min(1.0);
        if (1.0 - overlap).sqrt() < 0.4 {
            return Ok(phi);
        }
        t *= 0.5;
    }
}

/// Both bounds on one nearby pair.
fn continuity_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let dims = random_dims(rng, 2, 4, 27)?;
    let psi = haar_random_with(&dims, rng)?;
    let phi = nearby_state(&psi, rng)?;
    let s = random_subset(rng, dims.len())?;
    let unified = EntropyParams::new(rng.random_range(1.05..5.0), rng.random_range(1.0..3.0))?;
    let fa = continuity_gap(&psi, &phi, &s, EntropyParams::von_neumann())?;
    let un = continuity_gap(&psi, &phi, &s, unified)?;
    Ok(TrialOutcome::check(
        fa.holds() && un.holds(),
        format!(
            "dims={:?} s={s} ε={} FA: {} ≤ {} | {}: {} ≤ {}",
            dims.as_slice(),
            fa.epsilon,
            fa.lhs,
            fa.bound,
            fmt_params(unified),
            un.lhs,
            un.bound
        ),
    ))
}

/// Rank-one Kraus set `K_i = |x_i⟩ V_{i,·}` from an m×d isometry `V`.
pub fn random_rank_one_kraus<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<CMatrix> {
    let m = rng.random_range(d..=2 * d);
    let v = random_isometry(m, d, rng);
    (0..m)
        .map(|i| {
            let x = gaussian_vector(d, rng);
            let x = x.unscale(x.norm());
            &x * v.row(i)
        })
        .collect()
}

/// Local-unitary invariance and non-increase on average under a random
/// rank-one local operation.
fn locc_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let dims = random_dims(rng, 2, 4, 24)?;
    let psi = haar_random_with(&dims, rng)?;
    let s = random_subset(rng, dims.len())?;
    let params = random_concave_params(rng)?;
    let lu = random_local_unitaries(&psi, rng)?;
    let lu_diff = (cce_value(&psi, &s, params)? - cce_value(&lu, &s, params)?).abs();
    let site = rng.random_range(1..=dims.len());
    let kraus = random_rank_one_kraus(dims.as_slice()[site - 1], rng);
    let gap = locc_monotonicity_spotcheck(&psi, &s, params, site, &kraus)?;
    Ok(TrialOutcome::check(
        lu_diff <= IDENTITY_TOL && gap >= -INEQ_TOL,
        format!(
            "dims={:?} s={s} {} site={site} kraus={} LU Δ={lu_diff:e} gap={gap:e}",
            dims.as_slice(),
            fmt_params(params),
            kraus.len()
        ),
    ))
}

fn swap_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let n = rng.random_range(2..=5);
    let psi = haar_random_with(&Dims::qubits(n)?, rng)?;
    let s = random_subset(rng, n)?;
    let sim = cce_from_distribution(&swap_test_distribution(&psi)?, &s)?;
    let formula = cce_from_distribution(&distribution_from_purities(&psi)?, &s)?;
    let direct = cce_value(&psi, &s, EntropyParams::linear())?;
    let diff = (sim - direct).abs().max((formula - direct).abs());
    Ok(TrialOutcome::check(
        diff <= IDENTITY_TOL,
        format!("n={n} s={s} circuit={sim} purities={formula} direct={direct}"),
    ))
}

/// Roof search budget used by the roof suites.
pub fn suite_roof_options(seed: u64) -> RoofOptions {
    RoofOptions {
        seed,
        ..Default::default()
    }
}

/// Mixture of 2 or 3 random product states on two subsystems, with its
/// product decomposition.
pub fn random_separable<R: Rng + ?Sized>(rng: &mut R) -> Result<(DensityOperator, Ensemble)> {
    let dims = Dims::qubits(2)?;
    let k = rng.random_range(2..=3);
    let weights = random_probabilities(rng, k)
        .into_iter()
        .map(|p| p.max(0.05))
        .collect::<Vec<_>>();
    let total: f64 = weights.iter().sum();
    let members: Vec<(f64, PureState)> = weights
        .iter()
        .map(|&w| Ok((w / total, random_product_with(&dims, rng)?)))
        .collect::<Result<_>>()?;
    let ens = Ensemble::new(members)?;
    let rho = DensityOperator::new(ens.density_matrix(), dims)?;
    Ok((rho, ens))
}

fn roof_separable_trial(rng: &mut ChaCha8Rng, seed: u64) -> Result<TrialOutcome> {
    let (rho, product) = random_separable(rng)?;
    let s = random_subset(rng, 2)?;
    let params = random_concave_params(rng)?;
    let mut opts = suite_roof_options(seed);
    opts.warm_starts.push(product);
    let res = cce_mixed_upper(&rho, &s, params, &opts)?;
    Ok(TrialOutcome::check(
        res.upper_bound <= ROOF_ZERO_TOL,
        format!("s={s} {} upper={}", fmt_params(params), res.upper_bound),
    ))
}

/// Roof at `s = {1}`, `α = 1` against `EoF/2` on a random rank-2 two-qubit state.
fn roof_eof_trial(rng: &mut ChaCha8Rng, seed: u64) -> Result<TrialOutcome> {
    let rho = random_density_with(&Dims::qubits(2)?, 2, rng)?;
    let s = SubsetSpec::new(&[1])?;
    let res = cce_mixed_upper(&rho, &s, EntropyParams::von_neumann(), &suite_roof_options(seed))?;
    let target = entanglement_of_formation(&rho)? / 2.0;
    let diff = res.upper_bound - target;
    Ok(TrialOutcome::check(
        diff.abs() <= ROOF_EOF_TOL && diff >= -1e-8,
        format!("upper={} EoF/2={target} diff={diff:e}", res.upper_bound),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fast_suites_pass() {
        for suite in [
            Suite::Schur,
            Suite::AlphaMono,
            Suite::Ordering,
            Suite::Subadd,
            Suite::TensorId,
            Suite::Continuity,
            Suite::Locc,
            Suite::SwapConsistency,
        ] {
            let rep = run_suite(suite, 7, 40).unwrap();
            assert!(rep.all_passed(), "{suite}: {:?}", rep.failures);
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let a = run_trial(Suite::Locc, 99).unwrap();
        let b = run_trial(Suite::Locc, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
    }

    #[test]
    fn rank_one_kraus_is_complete() {
        let mut rng = seeded_rng(4);
        let k = random_rank_one_kraus(3, &mut rng);
        assert!(crate::tensor::kraus_completeness_deviation(&k, 3) < 1e-10);
        assert!(k.iter().all(crate::measures::is_rank_one));
    }

    #[test]
    fn separable_sampler_reconstructs() {
        let mut rng = seeded_rng(2);
        let (rho, ens) = random_separable(&mut rng).unwrap();
        assert!(ens.reconstruction_error(&rho) < 1e-12);
    }
}
