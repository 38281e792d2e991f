//! Parallelized SWAP test on two copies of an `n`-qubit state.
//!
//! Register layout (qubit 1 is the most significant bit of the state
//! index): controls `1..=n`, first copy `n+1..=2n`, second copy
//! `2n+1..=3n`. A control bitstring `z` is read with control 1 leftmost.

use std::collections::BTreeMap;

use rand_distr::{Binomial, Distribution};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::seeded_rng;
use crate::subset::{power_set, SubsetSpec};
use crate::tensor::{reduced_matrix, PureState, C64};

/// Largest register simulated exactly (3n qubits).
pub const MAX_SWAP_QUBITS: usize = 5;

/// Probabilities of the control bitstrings.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl ControlDistribution {
    /// Negative entries down to `-1e-12` are clamped; the total must be 1.
    pub fn new(n: usize, mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << n {
            return Err(Error::DimensionMismatch(probs.len(), 1 << n));
        }
        for p in probs.iter_mut() {
            if *p < -1e-12 || !p.is_finite() {
                return Err(Error::Domain(format!("probability {p} is negative")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, z: usize) -> f64 {
        self.probs[z]
    }

    pub fn bitstring(&self, z: usize) -> String {
        bitstring(z, self.n)
    }
}

fn bitstring(z: usize, n: usize) -> String {
    (0..n)
        .map(|i| if z >> (n - 1 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl Serialize for ControlDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Probs<'a>(&'a ControlDistribution);
        impl Serialize for Probs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.probs.len()))?;
                for (z, p) in self.0.probs.iter().enumerate() {
                    map.serialize_entry(&self.0.bitstring(z), p)?;
                }
                map.end()
            }
        }
        let mut st = serializer.serialize_struct("ControlDistribution", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("probs", &Probs(self))?;
        st.end()
    }
}

/// Counts from a finite number of shots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    n: usize,
    counts: Vec<u64>,
    shots: u64,
    seed: u64,
}

impl ShotRecord {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Empirical `C^{(s)}` and its binomial standard error.
    pub fn estimate(&self, s: &SubsetSpec) -> Result<(f64, f64)> {
        s.check_range(self.n)?;
        let zero_mask = label_mask(s, self.n);
        let hits: u64 = self
            .counts
            .iter()
            .enumerate()
            .filter(|(z, _)| z & zero_mask == 0)
            .map(|(_, &c)| c)
            .sum();
        let c = 1.0 - hits as f64 / self.shots as f64;
        Ok((c, (c * (1.0 - c) / self.shots as f64).sqrt()))
    }
}

impl Serialize for ShotRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let counts: BTreeMap<String, u64> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(z, &c)| (bitstring(z, self.n), c))
            .collect();
        let mut st = serializer.serialize_struct("ShotRecord", 3)?;
        st.serialize_field("counts", &counts)?;
        st.serialize_field("shots", &self.shots)?;
        st.serialize_field("seed", &self.seed)?;
        st.end()
    }
}

/// Bits of a control bitstring `z` that correspond to the labels in `s`.
fn label_mask(s: &SubsetSpec, n: usize) -> usize {
    s.labels().iter().fold(0usize, |m, &l| m | 1 << (n - l))
}

fn check_qubits(psi: &PureState) -> Result<usize> {
    if !psi.dims().all_qubits() {
        return Err(Error::Precondition("SWAP test needs qubit subsystems".into()));
    }
    let n = psi.num_subsystems();
    if n > MAX_SWAP_QUBITS {
        return Err(Error::ResourceGuard(format!(
            "SWAP test simulates 3n = {} qubits; n is limited to {MAX_SWAP_QUBITS}",
            3 * n
        )));
    }
    Ok(n)
}

/// Exact control distribution from a statevector simulation of the circuit.
pub fn swap_test_distribution(psi: &PureState) -> Result<ControlDistribution> {
    let n = check_qubits(psi)?;
    let total_qubits = 3 * n;
    let dim = 1usize << total_qubits;
    let bit = |q: usize| 1usize << (total_qubits - q);

    let amps = psi.amplitudes();
    let mut state = vec![C64::new(0.0, 0.0); dim];
    for (i, a) in amps.iter().enumerate() {
        for (j, b) in amps.iter().enumerate() {
            state[(i << n) | j] = a * b;
        }
    }
    for c in 1..=n {
        hadamard(&mut state, bit(c));
    }
    for c in 1..=n {
        controlled_swap(&mut state, bit(c), bit(n + c), bit(2 * n + c));
    }
    for c in 1..=n {
        hadamard(&mut state, bit(c));
    }

    let mut probs = vec![0.0; 1 << n];
    let shift = 2 * n;
    for (idx, a) in state.iter().enumerate() {
        probs[idx >> shift] += a.norm_sqr();
    }
    ControlDistribution::new(n, probs)
}

fn hadamard(state: &mut [C64], b: usize) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for idx in 0..state.len() {
        if idx & b == 0 {
            let (x, y) = (state[idx], state[idx | b]);
            state[idx] = (x + y) * h;
            state[idx | b] = (x - y) * h;
        }
    }
}

fn controlled_swap(state: &mut [C64], control: usize, a: usize, b: usize) {
    for idx in 0..state.len() {
        if idx & control != 0 && idx & a != 0 && idx & b == 0 {
            state.swap(idx, (idx & !a) | b);
        }
    }
}

/// `p(z) = 2^{−n} Σ_u (−1)^{z·u} Tr ψ_u²`, from purities alone.
pub fn distribution_from_purities(psi: &PureState) -> Result<ControlDistribution> {
    let n = check_qubits(psi)?;
    // purity indexed by control-bit pattern u (control 1 = MSB)
    let purity: Vec<f64> = (0..1usize << n)
        .map(|u| {
            let mask = (1..=n)
                .filter(|&l| u >> (n - l) & 1 == 1)
                .fold(0u32, |m, l| m | 1 << (l - 1));
            if mask == 0 {
                1.0
            } else {
                reduced_matrix(psi.amplitudes(), psi.dims(), mask).norm_squared()
            }
        })
        .collect();
    let scale = (1u64 << n) as f64;
    let probs = (0..1usize << n)
        .map(|z| {
            purity
                .iter()
                .enumerate()
                .map(|(u, &t)| if (z & u).count_ones() % 2 == 0 { t } else { -t })
                .sum::<f64>()
                / scale
        })
        .collect();
    ControlDistribution::new(n, probs)
}

/// `C^{(s)} = 1 − Σ_{z ∈ Z₀(s)} p(z)` where `Z₀(s)` holds the bitstrings
/// with 0 on every label of `s`.
pub fn cce_from_distribution(dist: &ControlDistribution, s: &SubsetSpec) -> Result<f64> {
    s.check_range(dist.n)?;
    let zero_mask = label_mask(s, dist.n);
    let mass: f64 = dist
        .probs
        .iter()
        .enumerate()
        .filter(|(z, _)| z & zero_mask == 0)
        .map(|(_, &p)| p)
        .sum();
    Ok(1.0 - mass)
}

/// Exact multinomial draw of `shots` outcomes, as a sequence of
/// conditional binomials in bitstring order.
pub fn sample_shots(dist: &ControlDistribution, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut counts = vec![0u64; dist.probs.len()];
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    let last = dist.probs.len() - 1;
    for (z, &p) in dist.probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if z == last {
            counts[z] = remaining;
            break;
        }
        let q = if mass_left > 0.0 { (p / mass_left).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, q)
            .map_err(|e| Error::Domain(format!("binomial draw: {e}")))?
            .sample(&mut rng);
        counts[z] = k;
        remaining -= k;
        mass_left -= p;
    }
    Ok(ShotRecord {
        n: dist.n,
        counts,
        shots,
        seed,
    })
}

/// Bounds implied by an estimate `c` of `C^{(s)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateBounds {
    /// `max(c / ln 2, 2c − 1/2) ≤ E^{(s)}`
    pub e_lower: f64,
    /// `c / ln 2 ≤ R₂^{(s)}`
    pub r2_lower: f64,
    /// `T₃^{(s)} ≤ c`
    pub t3_upper: f64,
}

pub fn bounds_from_estimate(c: f64) -> Result<EstimateBounds> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain(format!("estimate {c} outside [0,1]")));
    }
    let r2_lower = c / std::f64::consts::LN_2;
    Ok(EstimateBounds {
        e_lower: r2_lower.max(2.0 * c - 0.5),
        r2_lower,
        t3_upper: c,
    })
}

/// `2^{−|s|} Σ_{χ ∈ P(s)} Tr ψ_χ²` for a qubit state, summed directly.
pub fn mean_purity(psi: &PureState, s: &SubsetSpec) -> Result<f64> {
    s.check_range(psi.num_subsystems())?;
    let mut total = 0.0;
    let mut count = 0usize;
    for chi in power_set(s.mask()) {
        count += 1;
        total += if chi == 0 {
            1.0
        } else {
            reduced_matrix(psi.amplitudes(), psi.dims(), chi).norm_squared()
        };
    }
    Ok(total / count as f64)
}
