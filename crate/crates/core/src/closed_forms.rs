//! Measures of permutation-symmetric benchmark states from their reduced
//! spectra, without building statevectors.
//!
//! A GHZ reduction to any nonempty proper subset is `diag(½, ½)`. A Dicke
//! reduction `D(n,k)` to `m` qubits is diagonal in the `D(m,j)` basis with
//! hypergeometric weights `C(m,j) C(n−m,k−j) / C(n,k)`.

use crate::entropy::{entropy_of_spectrum, EntropyParams};
use crate::error::{Error, Result};

/// Largest `n` accepted; binomials stay exact in `f64`.
pub const MAX_CLOSED_FORM_N: usize = 60;

fn check(n: usize, size: usize) -> Result<()> {
    if n < 1 || n > MAX_CLOSED_FORM_N {
        return Err(Error::Domain(format!("n = {n} outside 1..={MAX_CLOSED_FORM_N}")));
    }
    if size < 1 || size > n {
        return Err(Error::Domain(format!("|s| = {size} outside 1..={n}")));
    }
    Ok(())
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// `E^{(s)}(GHZ_n)` for any `s` with `|s| = size`.
pub fn ghz_cce(n: usize, size: usize, params: EntropyParams) -> Result<f64> {
    check(n, size)?;
    let proper = (1u64 << size) as f64 - 1.0 - if size == n { 1.0 } else { 0.0 };
    Ok(proper * entropy_of_spectrum(&[0.5, 0.5], params) / (1u64 << size) as f64)
}

/// Spectrum of `D(n,k)` reduced to `m` qubits.
pub fn dicke_reduced_spectrum(n: usize, k: usize, m: usize) -> Vec<f64> {
    let total = binomial(n, k);
    (0..=m.min(k))
        .map(|j| binomial(m, j) * binomial(n - m, k - j) / total)
        .filter(|&p| p > 0.0)
        .collect()
}

/// `E^{(s)}(D(n,k))` for any `s` with `|s| = size`.
pub fn dicke_cce(n: usize, k: usize, size: usize, params: EntropyParams) -> Result<f64> {
    check(n, size)?;
    if k > n {
        return Err(Error::Domain(format!("Dicke excitation k = {k} > n = {n}")));
    }
    let sum: f64 = (1..=size)
        .map(|m| binomial(size, m) * entropy_of_spectrum(&dicke_reduced_spectrum(n, k, m), params))
        .sum();
    Ok(sum / (1u64 << size) as f64)
}

/// `E^{(s)}(W_n)` for any `s` with `|s| = size`.
pub fn w_cce(n: usize, size: usize, params: EntropyParams) -> Result<f64> {
    dicke_cce(n, 1, size, params)
}
