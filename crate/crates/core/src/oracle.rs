//! Closed-form two-qubit entanglement of formation.

use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigen, hermitian_eigenvalues, CMatrix, DensityOperator, C64};

fn check_two_qubits(rho: &DensityOperator) -> Result<()> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::Precondition("expected a two-qubit state".into()));
    }
    Ok(())
}

/// Wootters concurrence `max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄)` with `λ` the
/// eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    check_two_qubits(rho)?;
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let sy = CMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]);
    let yy = sy.kronecker(&sy);
    let m = rho.matrix();
    let tilde = &yy * m.conjugate() * &yy;

    // sqrt(ρ) ρ̃ sqrt(ρ) is Hermitian with the same spectrum as ρ ρ̃.
    let (vals, vecs) = hermitian_eigen(m)?;
    let sqrt_diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)),
    ));
    let root = &vecs * sqrt_diag * vecs.adjoint();
    let h = &root * tilde * &root;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut lam: Vec<f64> = hermitian_eigenvalues(&h)?
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// `h((1 + √(1 − C²))/2)` in bits.
pub fn entanglement_of_formation(rho: &DensityOperator) -> Result<f64> {
    let c = concurrence(rho)?.min(1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}
