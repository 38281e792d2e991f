//! Dense complex linear algebra on small tensor-product Hilbert spaces.
//!
//! Subsystem 1 is the slowest-varying tensor index, so for dims
//! `(d_1, ..., d_n)` the basis index of `|i_1 ... i_n>` is
//! `((i_1 * d_2 + i_2) * d_3 + ...) + i_n`. Reduced states keep their
//! subsystems in ascending label order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::{SubsetSpec, MAX_SUBSYSTEMS};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-10;
/// Nonnegative eigenvalues below this are rounding noise of a unit-trace
/// operator and are set to zero.
pub const EIGEN_NOISE_FLOOR: f64 = 1e-14;
pub const KRAUS_TOL: f64 = 1e-10;

/// Tolerance used by [`hermitian_eigen`] for generic Hermitian input.
const EIGEN_HERMITIAN_TOL: f64 = 1e-10;

/// Local dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("no subsystems".into()));
        }
        if dims.len() > MAX_SUBSYSTEMS {
            return Err(Error::InvalidDims(format!(
                "{} subsystems exceeds {MAX_SUBSYSTEMS}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("local dimension {d} < 2")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidDims("total dimension overflows".into()))?;
        Ok(Self(dims))
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of subsystems.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Mask with every subsystem set.
    pub fn full_mask(&self) -> u32 {
        if self.0.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.0.len()) - 1
        }
    }

    /// Product of local dimensions over the subsystems in `mask`.
    pub fn subset_dim(&self, mask: u32) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &d)| d)
            .product()
    }

    pub fn restrict(&self, mask: u32) -> Result<Dims> {
        Dims::new(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &d)| d)
                .collect(),
        )
    }

    pub fn concat(&self, other: &Dims) -> Result<Dims> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Dims::new(v)
    }

    pub fn all_qubits(&self) -> bool {
        self.0.iter().all(|&d| d == 2)
    }

    fn check_mask(&self, mask: u32) -> Result<()> {
        if mask & !self.full_mask() != 0 {
            let label = (0..32).find(|i| mask & !self.full_mask() & (1 << i) != 0).unwrap() + 1;
            return Err(Error::LabelOutOfRange {
                label,
                n: self.len(),
            });
        }
        Ok(())
    }

    /// For every basis index, its position within the `mask` factor and
    /// within the complementary factor.
    fn split_indices(&self, mask: u32) -> (Vec<usize>, Vec<usize>) {
        let total = self.total();
        let mut keep = vec![0usize; total];
        let mut rest = vec![0usize; total];
        let mut digits = vec![0usize; self.len()];
        for idx in 0..total {
            let mut r = idx;
            for (i, &d) in self.0.iter().enumerate().rev() {
                digits[i] = r % d;
                r /= d;
            }
            let (mut k, mut t) = (0usize, 0usize);
            for (i, &d) in self.0.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    k = k * d + digits[i];
                } else {
                    t = t * d + digits[i];
                }
            }
            keep[idx] = k;
            rest[idx] = t;
        }
        (keep, rest)
    }
}

impl TryFrom<Vec<usize>> for Dims {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Dims::new(v)
    }
}

impl From<Dims> for Vec<usize> {
    fn from(d: Dims) -> Self {
        d.0
    }
}

/// A normalized amplitude vector with explicit local dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    dims: Dims,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: Dims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(amplitudes.len(), dims.total()));
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes `amplitudes` before construction.
    pub fn normalized(amplitudes: CVector, dims: Dims) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    /// Computational basis state `|index>`.
    pub fn basis(index: usize, dims: Dims) -> Result<Self> {
        let total = dims.total();
        if index >= total {
            return Err(Error::Domain(format!("basis index {index} >= {total}")));
        }
        let mut v = CVector::zeros(total);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v, dims)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(PureState {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
            dims,
        })
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(self.dims.total(), other.dims.total()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Applies `op` to subsystem `site` (1-based) without renormalizing.
    pub fn apply_local_unnormalized(&self, site: usize, op: &CMatrix) -> Result<CVector> {
        let i = self.site_index(site)?;
        apply_local_vec(&self.amplitudes, &self.dims, i, op)
    }

    /// Applies a unitary (or any norm-preserving map) to `site`.
    pub fn apply_local(&self, site: usize, op: &CMatrix) -> Result<PureState> {
        let v = self.apply_local_unnormalized(site, op)?;
        PureState::normalized(v, self.dims.clone())
    }

    /// Reorders subsystems so that new subsystem `k` is old subsystem
    /// `perm[k]` (both 0-based).
    pub fn permute(&self, perm: &[usize]) -> Result<PureState> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Precondition("not a permutation of the subsystems".into()));
        }
        let old = self.dims.as_slice();
        let new_dims = Dims::new(perm.iter().map(|&p| old[p]).collect())?;
        let total = self.dims.total();
        let mut out = CVector::zeros(total);
        let mut digits = vec![0usize; n];
        for idx in 0..total {
            let mut r = idx;
            for i in (0..n).rev() {
                digits[i] = r % old[i];
                r /= old[i];
            }
            let new_idx = perm.iter().fold(0usize, |acc, &p| acc * old[p] + digits[p]);
            out[new_idx] = self.amplitudes[idx];
        }
        Ok(PureState {
            amplitudes: out,
            dims: new_dims,
        })
    }

    fn site_index(&self, site: usize) -> Result<usize> {
        if site == 0 || site > self.dims.len() {
            return Err(Error::LabelOutOfRange {
                label: site,
                n: self.dims.len(),
            });
        }
        Ok(site - 1)
    }
}

/// A Hermitian, positive-semidefinite, unit-trace matrix with its
/// dimension structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Dims,
}

impl DensityOperator {
    /// Validates hermiticity, trace and positivity.
    pub fn new(matrix: CMatrix, dims: Dims) -> Result<Self> {
        let total = dims.total();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch(matrix.nrows(), total));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let rho = Self { matrix, dims };
        rho.spectrum()?;
        Ok(rho)
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_raw(matrix: CMatrix, dims: Dims) -> Self {
        Self { matrix, dims }
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let d = dims.total();
        Self {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
            dims,
        }
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64], dims: Dims) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| C64::new(p, 0.0)),
        ));
        Self::new(m, dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Eigenvalues in descending order with the small-negative clamp
    /// applied. Larger negatives are an error.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        clamp_spectrum(hermitian_eigenvalues(&self.matrix)?)
    }

    pub fn eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        let (vals, vecs) = hermitian_eigen(&self.matrix)?;
        Ok((clamp_spectrum(vals)?, vecs))
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator {
            matrix: self.matrix.kronecker(&other.matrix),
            dims: self.dims.concat(&other.dims)?,
        })
    }

    /// `q * self + (1 - q) * other`.
    pub fn mix(&self, other: &DensityOperator, q: f64) -> Result<DensityOperator> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(self.dims.total(), other.dims.total()));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("mixing weight {q} outside [0,1]")));
        }
        Ok(DensityOperator {
            matrix: self.matrix.scale(q) + other.matrix.scale(1.0 - q),
            dims: self.dims.clone(),
        })
    }

    /// `U rho U^dagger` for a unitary acting on the whole space.
    pub fn conjugate(&self, unitary: &CMatrix) -> Result<DensityOperator> {
        if unitary.nrows() != self.matrix.nrows() || !unitary.is_square() {
            return Err(Error::DimensionMismatch(unitary.nrows(), self.matrix.nrows()));
        }
        Ok(DensityOperator {
            matrix: unitary * &self.matrix * unitary.adjoint(),
            dims: self.dims.clone(),
        })
    }
}

/// Either side of a Kronecker product.
#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Vector(CVector),
    Matrix(CMatrix),
}

pub fn kron(a: &Operand, b: &Operand) -> Result<Operand> {
    match (a, b) {
        (Operand::Vector(x), Operand::Vector(y)) => Ok(Operand::Vector(kron_vec(x, y))),
        (Operand::Matrix(x), Operand::Matrix(y)) => Ok(Operand::Matrix(x.kronecker(y))),
        _ => Err(Error::MixedOperands),
    }
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

pub fn kron_mat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Reduced state `Tr_{complement}(|psi><psi|)` on the subsystems of `keep`.
pub fn reduced_state(psi: &PureState, keep: &SubsetSpec) -> Result<DensityOperator> {
    keep.check_range(psi.num_subsystems())?;
    reduced_state_mask(psi, keep.mask())
}

/// Mask-based variant of [`reduced_state`]; `mask` must be nonzero.
pub fn reduced_state_mask(psi: &PureState, mask: u32) -> Result<DensityOperator> {
    if mask == 0 {
        return Err(Error::EmptySubset);
    }
    psi.dims.check_mask(mask)?;
    let dims = psi.dims.restrict(mask)?;
    Ok(DensityOperator::from_raw(reduced_matrix(&psi.amplitudes, &psi.dims, mask), dims))
}

/// The amplitudes reshaped into a (kept x traced) matrix.
pub(crate) fn reshape_amplitudes(amps: &CVector, dims: &Dims, mask: u32) -> CMatrix {
    let dk = dims.subset_dim(mask);
    let dt = dims.total() / dk;
    let (keep, rest) = dims.split_indices(mask);
    let mut m = CMatrix::zeros(dk, dt);
    for (idx, a) in amps.iter().enumerate() {
        m[(keep[idx], rest[idx])] = *a;
    }
    m
}

/// `M M^dagger` with `M` from [`reshape_amplitudes`].
pub(crate) fn reduced_matrix(amps: &CVector, dims: &Dims, mask: u32) -> CMatrix {
    let m = reshape_amplitudes(amps, dims, mask);
    &m * m.adjoint()
}

/// Partial trace keeping the subsystems in `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &SubsetSpec) -> Result<DensityOperator> {
    keep.check_range(rho.num_subsystems())?;
    partial_trace_mask(rho, keep.mask())
}

pub fn partial_trace_mask(rho: &DensityOperator, mask: u32) -> Result<DensityOperator> {
    if mask == 0 {
        return Err(Error::EmptySubset);
    }
    rho.dims.check_mask(mask)?;
    let dk = rho.dims.subset_dim(mask);
    let dt = rho.dims.total() / dk;
    let (keep, rest) = rho.dims.split_indices(mask);
    let mut index_of = vec![0usize; dk * dt];
    for idx in 0..keep.len() {
        index_of[keep[idx] * dt + rest[idx]] = idx;
    }
    let mut out = CMatrix::zeros(dk, dk);
    for k1 in 0..dk {
        for k2 in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += rho.matrix[(index_of[k1 * dt + t], index_of[k2 * dt + t])];
            }
            out[(k1, k2)] = acc;
        }
    }
    Ok(DensityOperator::from_raw(out, rho.dims.restrict(mask)?))
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Real eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Eigenvalues (descending) and the matching eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(m)?;
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok((vals, vecs))
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let dev = hermitian_deviation(m);
    if dev > EIGEN_HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Applies the eigenvalue clamp: `[-EIGEN_CLAMP, EIGEN_NOISE_FLOOR)` goes
/// to zero.
pub fn clamp_spectrum(mut vals: Vec<f64>) -> Result<Vec<f64>> {
    for v in vals.iter_mut() {
        if *v < -EIGEN_CLAMP {
            return Err(Error::NotPsd(*v));
        }
        if *v < EIGEN_NOISE_FLOOR {
            *v = 0.0;
        }
    }
    Ok(vals)
}

/// `sum_i lambda_i^alpha` over the clamped spectrum, with `0^alpha = 0`.
pub fn trace_power(rho: &DensityOperator, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParams(format!("alpha = {alpha} must be > 0")));
    }
    Ok(spectrum_power(&rho.spectrum()?, alpha))
}

pub(crate) fn spectrum_power(spectrum: &[f64], alpha: f64) -> f64 {
    spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| if alpha == 2.0 { l * l } else { l.powf(alpha) })
        .sum()
}

/// Half the trace norm of `rho - sigma`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(Error::DimensionMismatch(rho.dims.total(), sigma.dims.total()));
    }
    let diff = &rho.matrix - &sigma.matrix;
    let vals = hermitian_eigenvalues(&diff)?;
    Ok((0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()).min(1.0))
}

/// `sum_k K_k^dagger K_k` deviation from the identity.
pub fn kraus_completeness_deviation(kraus: &[CMatrix], d: usize) -> f64 {
    let mut acc = CMatrix::zeros(d, d);
    for k in kraus {
        if k.nrows() != d || k.ncols() != d {
            return f64::INFINITY;
        }
        acc += k.adjoint() * k;
    }
    (acc - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Applies a local Kraus set on `site` (1-based) and returns the
/// normalized branch states with their outcome probabilities. Branches of
/// vanishing probability are dropped.
pub fn apply_local_kraus(
    rho: &DensityOperator,
    site: usize,
    kraus: &[CMatrix],
) -> Result<Vec<(f64, DensityOperator)>> {
    let n = rho.num_subsystems();
    if site == 0 || site > n {
        return Err(Error::LabelOutOfRange { label: site, n });
    }
    let d = rho.dims.as_slice()[site - 1];
    let dev = kraus_completeness_deviation(kraus, d);
    if kraus.is_empty() || dev > KRAUS_TOL {
        return Err(Error::IncompleteKraus(dev));
    }
    let mut branches = Vec::with_capacity(kraus.len());
    for k in kraus {
        let full = embed_local(&rho.dims, site - 1, k);
        let out = &full * &rho.matrix * full.adjoint();
        let p = out.trace().re;
        if p > 1e-14 {
            branches.push((p, DensityOperator::from_raw(out.unscale(p), rho.dims.clone())));
        }
    }
    Ok(branches)
}

/// `I ⊗ op ⊗ I` with `op` on subsystem index `i` (0-based).
pub fn embed_local(dims: &Dims, i: usize, op: &CMatrix) -> CMatrix {
    let s = dims.as_slice();
    let left: usize = s[..i].iter().product();
    let right: usize = s[i + 1..].iter().product();
    CMatrix::identity(left, left)
        .kronecker(op)
        .kronecker(&CMatrix::identity(right, right))
}

/// `(I ⊗ op ⊗ I) v` without forming the full operator.
pub(crate) fn apply_local_vec(v: &CVector, dims: &Dims, i: usize, op: &CMatrix) -> Result<CVector> {
    let s = dims.as_slice();
    let d = s[i];
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch(op.nrows(), d));
    }
    let right: usize = s[i + 1..].iter().product();
    let left: usize = s[..i].iter().product();
    let mut out = CVector::zeros(v.len());
    for l in 0..left {
        for r in 0..right {
            let base = l * d * right + r;
            for a in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..d {
                    acc += op[(a, b)] * v[base + b * right];
                }
                out[base + a * right] = acc;
            }
        }
    }
    Ok(out)
}
