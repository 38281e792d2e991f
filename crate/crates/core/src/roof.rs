//! Convex-roof upper bounds for mixed states.
//!
//! Every decomposition of a rank-`r` state `ρ = Σ_j λ_j |e_j⟩⟨e_j|` has the
//! form `|ψ̃_i⟩ = Σ_j M_ij √λ_j |e_j⟩` for an isometry `M` (m×r). The search
//! runs over `M = first r columns of Π G_k`, a product of complex Givens
//! rotations, and keeps the lowest ensemble average it sees.

use rand::Rng;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::entropy::EntropyParams;
use crate::error::{Error, Result};
use crate::measures::{cce_values_mask, NamedMeasures, INEQ_TOL, MAX_SUBSET_SIZE};
use crate::optimize::{pattern_search, PatternOptions};
use crate::states::{random_isometry, seeded_rng};
use crate::subset::SubsetSpec;
use crate::tensor::{CMatrix, CVector, DensityOperator, Dims, PureState, C64};

/// Largest rank handled by the optimizer.
pub const MAX_ROOF_RANK: usize = 6;
/// Eigenvalues at or below this do not count toward the rank.
pub const RANK_TOL: f64 = 1e-12;
/// Members lighter than this are dropped from an ensemble.
pub const MEMBER_FLOOR: f64 = 1e-12;
pub const ENSEMBLE_SUM_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
const ISOMETRY_TOL: f64 = 1e-10;

/// A pure-state decomposition `ρ = Σ p_i |ψ_i⟩⟨ψ_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Domain("ensemble has no members".into()))?;
        let dims = first.1.dims().clone();
        for (p, psi) in &members {
            if !(*p > 0.0) || !p.is_finite() {
                return Err(Error::Domain(format!("member weight {p} is not positive")));
            }
            if psi.dims() != &dims {
                return Err(Error::DimensionMismatch(psi.dims().total(), dims.total()));
            }
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > ENSEMBLE_SUM_TOL {
            return Err(Error::Domain(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> &Dims {
        self.members[0].1.dims()
    }

    pub fn density_matrix(&self) -> CMatrix {
        let d = self.dims().total();
        let mut m = CMatrix::zeros(d, d);
        for (p, psi) in &self.members {
            let a = psi.amplitudes();
            m += (a * a.adjoint()).scale(*p);
        }
        m
    }

    /// Frobenius distance between `Σ p_i ψ_iψ_i†` and `ρ`.
    pub fn reconstruction_error(&self, rho: &DensityOperator) -> f64 {
        if rho.dims() != self.dims() {
            return f64::INFINITY;
        }
        (self.density_matrix() - rho.matrix()).norm()
    }

    /// `Σ p_i E^{(s)}(ψ_i)` for each parameter point.
    pub fn averages(&self, s: &SubsetSpec, params: &[EntropyParams]) -> Result<Vec<f64>> {
        check_subset(self.dims(), s)?;
        let mut acc = vec![0.0; params.len()];
        for (p, psi) in &self.members {
            for (a, v) in acc.iter_mut().zip(cce_values_mask(psi, s.mask(), params)?) {
                *a += p * v;
            }
        }
        Ok(acc)
    }

    pub fn average(&self, s: &SubsetSpec, params: EntropyParams) -> Result<f64> {
        Ok(self.averages(s, &[params])?[0])
    }
}

impl Serialize for Ensemble {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Member {
            p: f64,
            amplitudes: Vec<[f64; 2]>,
        }
        let members: Vec<Member> = self
            .members
            .iter()
            .map(|(p, psi)| Member {
                p: *p,
                amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect();
        let mut st = serializer.serialize_struct("Ensemble", 2)?;
        st.serialize_field("dims", self.dims().as_slice())?;
        st.serialize_field("members", &members)?;
        st.end()
    }
}

fn check_subset(dims: &Dims, s: &SubsetSpec) -> Result<()> {
    s.check_range(dims.len())?;
    if s.len() > MAX_SUBSET_SIZE {
        return Err(Error::EnumerationGuard(s.len(), MAX_SUBSET_SIZE));
    }
    Ok(())
}

/// `√λ_j |e_j⟩` for the nonzero part of the spectrum of `ρ`.
#[derive(Debug, Clone)]
struct ScaledEigenbasis {
    columns: CMatrix,
    dims: Dims,
}

impl ScaledEigenbasis {
    fn new(rho: &DensityOperator) -> Result<Self> {
        let (vals, vecs) = rho.eigen()?;
        let r = vals.iter().filter(|&&v| v > RANK_TOL).count();
        let mut columns = CMatrix::zeros(vecs.nrows(), r);
        for j in 0..r {
            columns.set_column(j, &(vecs.column(j) * C64::new(vals[j].sqrt(), 0.0)));
        }
        Ok(Self {
            columns,
            dims: rho.dims().clone(),
        })
    }

    fn rank(&self) -> usize {
        self.columns.ncols()
    }

    /// Unnormalized members `Σ_j M_ij √λ_j |e_j⟩`, as columns.
    fn unnormalized(&self, mixer: &CMatrix) -> CMatrix {
        &self.columns * mixer.transpose()
    }

    fn members(&self, mixer: &CMatrix) -> Result<Vec<(f64, PureState)>> {
        let raw = self.unnormalized(mixer);
        let mut out = Vec::with_capacity(raw.ncols());
        for col in raw.column_iter() {
            let p = col.norm_squared();
            if p < MEMBER_FLOOR {
                continue;
            }
            let v: CVector = col.into_owned();
            out.push((p, PureState::normalized(v, self.dims.clone())?));
        }
        let total: f64 = out.iter().map(|(p, _)| p).sum();
        for (p, _) in out.iter_mut() {
            *p /= total;
        }
        Ok(out)
    }

    fn average(&self, mixer: &CMatrix, mask: u32, params: EntropyParams) -> Result<f64> {
        let members = self.members(mixer)?;
        let mut acc = 0.0;
        for (p, psi) in &members {
            acc += p * cce_values_mask(psi, mask, &[params])?[0];
        }
        Ok(acc)
    }
}

fn isometry_deviation(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    let id = CMatrix::identity(g.nrows(), g.ncols());
    (g - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Decomposition of `ρ` induced by an m×r isometry, with `r = rank(ρ)`.
pub fn mixing_ensemble(rho: &DensityOperator, mixer: &CMatrix) -> Result<Ensemble> {
    let basis = ScaledEigenbasis::new(rho)?;
    let r = basis.rank();
    let m = mixer.nrows();
    if mixer.ncols() != r {
        return Err(Error::DimensionMismatch(mixer.ncols(), r));
    }
    if m < r || m > r * r {
        return Err(Error::InvalidDims(format!(
            "mixer has {m} rows; rank {r} needs between {r} and {}",
            r * r
        )));
    }
    let dev = isometry_deviation(mixer);
    if dev > ISOMETRY_TOL {
        return Err(Error::NotIsometry(dev));
    }
    Ensemble::new(basis.members(mixer)?)
}

/// Number of angle/phase parameters for an m×m Givens product.
fn parameter_count(m: usize) -> usize {
    m * (m - 1)
}

/// First `r` columns of `Π_{i<j} G_ij(θ, φ)` applied to the identity.
fn givens_isometry(m: usize, r: usize, params: &[f64]) -> CMatrix {
    let mut u = CMatrix::zeros(m, r);
    for j in 0..r {
        u[(j, j)] = C64::new(1.0, 0.0);
    }
    let mut k = 0;
    for i in 0..m {
        for j in (i + 1)..m {
            let (theta, phi) = (params[k], params[k + 1]);
            k += 2;
            let (s, c) = theta.sin_cos();
            let ph = C64::from_polar(1.0, phi);
            for col in 0..r {
                let (a, b) = (u[(i, col)], u[(j, col)]);
                u[(i, col)] = a * c - ph * b * s;
                u[(j, col)] = ph.conj() * a * s + b * c;
            }
        }
    }
    u
}

/// Search budget and seeding for [`cce_mixed_upper`].
#[derive(Debug, Clone)]
pub struct RoofOptions {
    pub restarts: usize,
    /// Pattern-search sweeps per restart.
    pub iterations: usize,
    pub seed: u64,
    /// Rows of the mixer; defaults to `min(r², r + 2)`.
    pub mixer_size: Option<usize>,
    pub initial_step: f64,
    pub min_step: f64,
    /// Known decompositions evaluated as extra candidates.
    pub warm_starts: Vec<Ensemble>,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            iterations: 500,
            seed: 0,
            mixer_size: None,
            initial_step: 0.5,
            min_step: 1e-6,
            warm_starts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    pub upper_bound: f64,
    pub best_ensemble: Ensemble,
    pub restarts_used: usize,
    /// The winning candidate's search reached the minimum step size.
    /// Always true when a warm start wins.
    pub converged: bool,
}

impl Serialize for RoofResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RoofResult", 4)?;
        st.serialize_field("upper_bound", &self.upper_bound)?;
        st.serialize_field("restarts_used", &self.restarts_used)?;
        st.serialize_field("converged", &self.converged)?;
        st.serialize_field("best_ensemble", &self.best_ensemble)?;
        st.end()
    }
}

fn default_mixer_size(r: usize) -> usize {
    (r * r).min(r + 2)
}

/// Smallest ensemble average of `E^{(s)}_{α,β}` found over decompositions
/// of `ρ`. This is an upper bound on the convex roof.
pub fn cce_mixed_upper(
    rho: &DensityOperator,
    s: &SubsetSpec,
    params: EntropyParams,
    options: &RoofOptions,
) -> Result<RoofResult> {
    check_subset(rho.dims(), s)?;
    if options.restarts == 0 {
        return Err(Error::InvalidParams("at least one restart is required".into()));
    }
    let basis = ScaledEigenbasis::new(rho)?;
    let r = basis.rank();
    if r == 0 {
        return Err(Error::Domain("state has no positive eigenvalue".into()));
    }
    if r > MAX_ROOF_RANK {
        return Err(Error::ResourceGuard(format!(
            "rank {r} exceeds the roof limit of {MAX_ROOF_RANK}"
        )));
    }
    let m = options.mixer_size.unwrap_or_else(|| default_mixer_size(r));
    if m < r || m > r * r {
        return Err(Error::InvalidParams(format!(
            "mixer size {m} must lie in [{r}, {}]",
            r * r
        )));
    }
    for ens in &options.warm_starts {
        let err = ens.reconstruction_error(rho);
        if err >= RECONSTRUCTION_TOL {
            return Err(Error::Precondition(format!(
                "warm-start ensemble misses the state by {err:e}"
            )));
        }
    }

    let mask = s.mask();
    let n_params = parameter_count(m);
    let restarts = if n_params == 0 { 1 } else { options.restarts };
    let pattern = PatternOptions {
        initial_step: options.initial_step,
        min_step: options.min_step,
        max_iterations: options.iterations,
    };

    let runs: Vec<(f64, Vec<f64>, bool)> = (0..restarts)
        .into_par_iter()
        .map(|idx| {
            let x0 = if idx == 0 {
                vec![0.0; n_params]
            } else {
                let mut rng = seeded_rng(options.seed);
                rng.set_stream(idx as u64);
                (0..n_params)
                    .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                    .collect()
            };
            let objective = |x: &[f64]| {
                basis
                    .average(&givens_isometry(m, r, x), mask, params)
                    .unwrap_or(f64::INFINITY)
            };
            let res = pattern_search(objective, x0, pattern);
            (res.value, res.x, res.converged)
        })
        .collect();

    // lowest value, ties to the lowest index
    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .fold((0usize, f64::INFINITY), |(bi, bv), (i, (v, _, _))| {
            if *v < bv {
                (i, *v)
            } else {
                (bi, bv)
            }
        });
    let (_, ref x, converged) = runs[best_idx];
    let mut best_ensemble = Ensemble::new(basis.members(&givens_isometry(m, r, x))?)?;
    let mut upper_bound = best_ensemble.average(s, params)?;
    let mut best_converged = converged;

    for ens in &options.warm_starts {
        let v = ens.average(s, params)?;
        if v < upper_bound {
            upper_bound = v;
            best_ensemble = ens.clone();
            best_converged = true;
        }
    }

    Ok(RoofResult {
        upper_bound,
        best_ensemble,
        restarts_used: restarts,
        converged: best_converged,
    })
}

/// Outcome of the matched-ensemble ordering checks. Each flag holds when
/// its inequality held for every sampled ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedOrderingReport {
    pub samples: usize,
    pub e_ge_c_over_ln2: bool,
    pub e_ge_2c_minus_half: bool,
    pub r2_ge_c_over_ln2: bool,
    pub c_ge_t3: bool,
    pub e_ge_r2: bool,
    /// Smallest slack seen across all inequalities and samples.
    pub worst_margin: f64,
}

impl MixedOrderingReport {
    pub fn all_hold(&self) -> bool {
        self.e_ge_c_over_ln2
            && self.e_ge_2c_minus_half
            && self.r2_ge_c_over_ln2
            && self.c_ge_t3
            && self.e_ge_r2
    }
}

fn random_ensemble<R: Rng + ?Sized>(basis: &ScaledEigenbasis, rng: &mut R) -> Result<Ensemble> {
    let r = basis.rank();
    let mixer = random_isometry(default_mixer_size(r), r, rng);
    Ensemble::new(basis.members(&mixer)?)
}

fn rank_guarded_basis(rho: &DensityOperator) -> Result<ScaledEigenbasis> {
    let basis = ScaledEigenbasis::new(rho)?;
    if basis.rank() > MAX_ROOF_RANK {
        return Err(Error::ResourceGuard(format!(
            "rank {} exceeds the roof limit of {MAX_ROOF_RANK}",
            basis.rank()
        )));
    }
    Ok(basis)
}

/// Evaluates the four named measures on the same random ensembles and
/// checks the pure-state ordering chain on the averages.
pub fn mixed_ordering_spotcheck(
    rho: &DensityOperator,
    s: &SubsetSpec,
    samples: usize,
    seed: u64,
) -> Result<MixedOrderingReport> {
    check_subset(rho.dims(), s)?;
    let basis = rank_guarded_basis(rho)?;
    let mut rng = seeded_rng(seed);
    let ln2 = std::f64::consts::LN_2;
    let mut report = MixedOrderingReport {
        samples,
        e_ge_c_over_ln2: true,
        e_ge_2c_minus_half: true,
        r2_ge_c_over_ln2: true,
        c_ge_t3: true,
        e_ge_r2: true,
        worst_margin: f64::INFINITY,
    };
    for _ in 0..samples {
        let ens = random_ensemble(&basis, &mut rng)?;
        let v = ens.averages(s, &NamedMeasures::params())?;
        let (e, r2, t3, c) = (v[0], v[1], v[2], v[3]);
        let checks = [
            (&mut report.e_ge_c_over_ln2, e - c / ln2),
            (&mut report.e_ge_2c_minus_half, e - (2.0 * c - 0.5)),
            (&mut report.r2_ge_c_over_ln2, r2 - c / ln2),
            (&mut report.c_ge_t3, c - t3),
            (&mut report.e_ge_r2, e - r2),
        ];
        for (flag, margin) in checks {
            *flag &= margin >= -INEQ_TOL;
            report.worst_margin = report.worst_margin.min(margin);
        }
    }
    Ok(report)
}

/// Smallest `Σp E_{α′,β} − Σp E_{α,β}` over random matched ensembles.
pub fn matched_alpha_monotone_gap(
    rho: &DensityOperator,
    s: &SubsetSpec,
    alpha_prime: f64,
    alpha: f64,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if !(alpha_prime > 0.0 && alpha_prime <= alpha && beta >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < α′ ≤ α and β ≥ 1, got α′={alpha_prime}, α={alpha}, β={beta}"
        )));
    }
    check_subset(rho.dims(), s)?;
    let basis = rank_guarded_basis(rho)?;
    let pts = [
        EntropyParams::new(alpha_prime, beta)?,
        EntropyParams::new(alpha, beta)?,
    ];
    let mut rng = seeded_rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let v = random_ensemble(&basis, &mut rng)?.averages(s, &pts)?;
        worst = worst.min(v[0] - v[1]);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::cce_value;
    use crate::oracle::entanglement_of_formation;
    use crate::states::{ghz, haar_random, random_density};
    use approx::assert_abs_diff_eq;

    fn quick() -> RoofOptions {
        RoofOptions {
            restarts: 8,
            iterations: 300,
            seed: 1,
            ..Default::default()
        }
    }

    fn two_qubits() -> Dims {
        Dims::qubits(2).unwrap()
    }

    #[test]
    fn identity_mixer_gives_eigen_ensemble() {
        let rho = DensityOperator::diagonal(&[0.7, 0.3, 0.0, 0.0], two_qubits()).unwrap();
        let id = CMatrix::identity(2, 2);
        let ens = mixing_ensemble(&rho, &id).unwrap();
        assert_eq!(ens.len(), 2);
        assert_abs_diff_eq!(ens.members()[0].0, 0.7, epsilon = 1e-12);
        assert!(ens.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn rank_one_is_singleton() {
        let rho = ghz(2).unwrap().to_density();
        let phase = CMatrix::from_element(1, 1, C64::from_polar(1.0, 0.3));
        let ens = mixing_ensemble(&rho, &phase).unwrap();
        assert_eq!(ens.len(), 1);
        assert!(ens.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn random_mixer_reconstructs() {
        let rho = random_density(&two_qubits(), 2, 4).unwrap();
        let mut rng = seeded_rng(9);
        for m in 2..=4 {
            let mixer = random_isometry(m, 2, &mut rng);
            let ens = mixing_ensemble(&rho, &mixer).unwrap();
            assert!(ens.reconstruction_error(&rho) < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_mixers() {
        let rho = random_density(&two_qubits(), 2, 4).unwrap();
        let not_iso = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(mixing_ensemble(&rho, &not_iso), Err(Error::NotIsometry(_))));
        let tall = random_isometry(5, 2, &mut seeded_rng(1));
        assert!(mixing_ensemble(&rho, &tall).is_err());
        let wrong_cols = CMatrix::identity(3, 3);
        assert!(mixing_ensemble(&rho, &wrong_cols).is_err());
    }

    #[test]
    fn givens_product_is_isometric() {
        let params: Vec<f64> = (0..parameter_count(4)).map(|k| 0.37 * k as f64).collect();
        let u = givens_isometry(4, 2, &params);
        assert!(isometry_deviation(&u) < 1e-12);
    }

    #[test]
    fn pure_state_is_exact() {
        let psi = haar_random(&Dims::qubits(3).unwrap(), 2).unwrap();
        let s = SubsetSpec::full(3).unwrap();
        let p = EntropyParams::von_neumann();
        let res = cce_mixed_upper(&psi.to_density(), &s, p, &quick()).unwrap();
        assert_abs_diff_eq!(res.upper_bound, cce_value(&psi, &s, p).unwrap(), epsilon = 1e-10);
        assert_eq!(res.restarts_used, 1);
    }

    #[test]
    fn classical_correlation_is_separable() {
        // ½|00⟩⟨00| + ½|11⟩⟨11|: eigen ensemble is already product
        let rho = DensityOperator::diagonal(&[0.5, 0.0, 0.0, 0.5], two_qubits()).unwrap();
        for s in ["1", "2", "1,2"] {
            let s = SubsetSpec::parse(s).unwrap();
            let res = cce_mixed_upper(&rho, &s, EntropyParams::von_neumann(), &quick()).unwrap();
            assert!(res.upper_bound <= 1e-3, "{}", res.upper_bound);
        }
    }

    #[test]
    fn result_invariant_and_determinism() {
        let rho = random_density(&two_qubits(), 2, 8).unwrap();
        let s = SubsetSpec::parse("1").unwrap();
        let p = EntropyParams::von_neumann();
        let a = cce_mixed_upper(&rho, &s, p, &quick()).unwrap();
        let b = cce_mixed_upper(&rho, &s, p, &quick()).unwrap();
        assert_eq!(a, b);
        assert_abs_diff_eq!(a.upper_bound, a.best_ensemble.average(&s, p).unwrap(), epsilon = 1e-10);
        assert!(a.best_ensemble.reconstruction_error(&rho) < RECONSTRUCTION_TOL);
    }

    #[test]
    fn rank_two_matches_half_eof() {
        let s = SubsetSpec::parse("1").unwrap();
        for seed in 0..3 {
            let rho = random_density(&two_qubits(), 2, 100 + seed).unwrap();
            let res = cce_mixed_upper(&rho, &s, EntropyParams::von_neumann(), &quick()).unwrap();
            let eof = entanglement_of_formation(&rho).unwrap();
            assert!((res.upper_bound - eof / 2.0).abs() < 5e-3, "{} vs {}", res.upper_bound, eof / 2.0);
        }
    }

    #[test]
    fn warm_start_can_win() {
        let dims = two_qubits();
        let a = PureState::basis(0, dims.clone()).unwrap();
        let plus = PureState::normalized(
            CVector::from_element(4, C64::new(1.0, 0.0)),
            dims.clone(),
        )
        .unwrap();
        let rho = a.to_density().mix(&plus.to_density(), 0.5).unwrap();
        let warm = Ensemble::new(vec![(0.5, a), (0.5, plus)]).unwrap();
        let opts = RoofOptions {
            restarts: 1,
            iterations: 0,
            warm_starts: vec![warm],
            ..Default::default()
        };
        let s = SubsetSpec::full(2).unwrap();
        let res = cce_mixed_upper(&rho, &s, EntropyParams::von_neumann(), &opts).unwrap();
        assert!(res.upper_bound < 1e-12);
        assert!(res.converged);
    }

    #[test]
    fn rank_guard() {
        let rho = DensityOperator::maximally_mixed(Dims::qubits(3).unwrap());
        let s = SubsetSpec::parse("1").unwrap();
        let err = cce_mixed_upper(&rho, &s, EntropyParams::von_neumann(), &quick()).unwrap_err();
        assert!(err.is_resource_guard());
    }

    #[test]
    fn matched_ordering() {
        let rho = random_density(&two_qubits(), 2, 21).unwrap();
        let s = SubsetSpec::full(2).unwrap();
        let rep = mixed_ordering_spotcheck(&rho, &s, 100, 5).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        let gap = matched_alpha_monotone_gap(&rho, &s, 0.5, 2.5, 1.5, 50, 3).unwrap();
        assert!(gap >= -INEQ_TOL);
    }

    #[test]
    fn json_has_ensemble() {
        let rho = DensityOperator::diagonal(&[0.5, 0.0, 0.0, 0.5], two_qubits()).unwrap();
        let s = SubsetSpec::parse("1").unwrap();
        let res = cce_mixed_upper(&rho, &s, EntropyParams::von_neumann(), &quick()).unwrap();
        let v = serde_json::to_value(&res).unwrap();
        assert!(v["best_ensemble"]["members"][0]["amplitudes"].is_array());
        assert!(v["upper_bound"].is_number());
    }
}
