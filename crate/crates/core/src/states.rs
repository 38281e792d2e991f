//! State families: GHZ, W, Dicke, the star network, products, and seeded
//! random states for property sweeps.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CMatrix, CVector, DensityOperator, Dims, PureState, C64};

/// Deterministic generator used everywhere a seed is accepted.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 qubits, got {n}")));
    }
    Ok(())
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Result<PureState> {
    check_n(n)?;
    let dims = Dims::qubits(n)?;
    let mut v = CVector::zeros(dims.total());
    v[0] = real(std::f64::consts::FRAC_1_SQRT_2);
    v[dims.total() - 1] = real(std::f64::consts::FRAC_1_SQRT_2);
    PureState::new(v, dims)
}

/// Uniform superposition of the weight-one bitstrings.
pub fn w(n: usize) -> Result<PureState> {
    check_n(n)?;
    dicke(n, 1)
}

/// Dicke state with `k` excitations over `n` qubits.
pub fn dicke(n: usize, k: usize) -> Result<PureState> {
    if n < 1 {
        return Err(Error::Domain("Dicke state needs n >= 1".into()));
    }
    if k > n {
        return Err(Error::Domain(format!("Dicke excitation {k} > n = {n}")));
    }
    let dims = Dims::qubits(n)?;
    let mut v = CVector::zeros(dims.total());
    // Lexicographic k-combinations of qubit positions; position 0 is the
    // most significant bit.
    let mut comb: Vec<usize> = (0..k).collect();
    let mut count = 0usize;
    loop {
        let idx = comb.iter().fold(0usize, |acc, &p| acc | (1 << (n - 1 - p)));
        v[idx] = real(1.0);
        count += 1;
        let mut i = k;
        loop {
            if i == 0 {
                return PureState::new(v.unscale((count as f64).sqrt()), dims);
            }
            i -= 1;
            if comb[i] < n - k + i {
                comb[i] += 1;
                for j in i + 1..k {
                    comb[j] = comb[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `(cos θ |00⟩ + sin θ |11⟩)^{⊗3}` regrouped as an 8-dimensional hub
/// holding the first register of every pair, followed by three qubit leaves.
pub fn star(theta: f64) -> Result<PureState> {
    let dims = Dims::new(vec![8, 2, 2, 2])?;
    let (a, b) = (theta.cos(), theta.sin());
    let mut v = CVector::zeros(64);
    for j in 0..8usize {
        let w = j.count_ones() as i32;
        // hub index j, leaves carry the same three bits
        v[j * 8 + j] = real(a.powi(3 - w) * b.powi(w));
    }
    PureState::normalized(v, dims)
}

/// `|0…0⟩` on the given dimensions.
pub fn product_zero(dims: Dims) -> Result<PureState> {
    PureState::basis(0, dims)
}

/// Normalized standard complex Gaussian vector.
pub fn haar_random_with<R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> Result<PureState> {
    PureState::normalized(gaussian_vector(dims.total(), rng), dims.clone())
}

pub fn haar_random(dims: &Dims, seed: u64) -> Result<PureState> {
    haar_random_with(dims, &mut seeded_rng(seed))
}

/// Tensor product of independent Haar-random local states.
pub fn random_product_with<R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> Result<PureState> {
    let mut amps = CVector::from_element(1, real(1.0));
    for &d in dims.as_slice() {
        let local = gaussian_vector(d, rng);
        let local = local.unscale(local.norm());
        amps = crate::tensor::kron_vec(&amps, &local);
    }
    PureState::normalized(amps, dims.clone())
}

pub fn random_product(dims: &Dims, seed: u64) -> Result<PureState> {
    random_product_with(dims, &mut seeded_rng(seed))
}

/// Random density operator of rank at most `rank`: the reduction of a
/// Haar-random state on `dims ⊗ C^rank`.
pub fn random_density_with<R: Rng + ?Sized>(
    dims: &Dims,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    let d = dims.total();
    if rank == 0 || rank > d {
        return Err(Error::Domain(format!("rank {rank} outside 1..={d}")));
    }
    let g = gaussian_vector(d * rank, rng);
    let g = g.unscale(g.norm());
    // row index = system, column index = auxiliary
    let m = CMatrix::from_fn(d, rank, |i, j| g[i * rank + j]);
    let mut rho = &m * m.adjoint();
    let tr = rho.trace().re;
    rho.unscale_mut(tr);
    let rho = (&rho + rho.adjoint()).unscale(2.0);
    DensityOperator::new(rho, dims.clone())
}

pub fn random_density(dims: &Dims, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(dims, rank, &mut seeded_rng(seed))
}

pub fn gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    CVector::from_iterator(
        len,
        (0..len).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    )
}

/// Haar-random `rows x cols` isometry (`rows >= cols`) from Gram–Schmidt on
/// Gaussian columns.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let mut q = CMatrix::zeros(rows, cols);
    let mut j = 0;
    while j < cols {
        let mut v = gaussian_vector(rows, rng);
        for k in 0..j {
            let qk = q.column(k);
            let proj = qk.dotc(&v);
            v -= qk * proj;
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue;
        }
        q.set_column(j, &v.unscale(norm));
        j += 1;
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    random_isometry(d, d, rng)
}

/// Applies an independent random unitary to every subsystem.
pub fn random_local_unitaries<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> Result<PureState> {
    let mut out = psi.clone();
    for (i, &d) in psi.dims().as_slice().iter().enumerate() {
        out = out.apply_local(i + 1, &random_unitary(d, rng))?;
    }
    Ok(out)
}

/// A state family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateRecipe {
    Ghz { n: usize },
    W { n: usize },
    Dicke { n: usize, k: usize },
    Star { theta: f64 },
    Product {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Haar { n: usize, seed: u64 },
    MixedRandom { n: usize, rank: usize, seed: u64 },
}

/// A built recipe.
#[derive(Debug, Clone, PartialEq)]
pub enum Prepared {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl StateRecipe {
    pub fn from_json(text: &str) -> Result<Self> {
        let recipe: StateRecipe =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("state recipe: {e}")))?;
        recipe.validate()?;
        Ok(recipe)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StateRecipe::Ghz { n } | StateRecipe::W { n } => check_n(n),
            StateRecipe::Dicke { n, k } => {
                if n < 1 || k > n {
                    Err(Error::Domain(format!("Dicke parameters n = {n}, k = {k}")))
                } else {
                    Ok(())
                }
            }
            StateRecipe::Star { theta } if !theta.is_finite() => {
                Err(Error::Domain("star angle must be finite".into()))
            }
            StateRecipe::Star { .. } => Ok(()),
            StateRecipe::Product { n, .. } | StateRecipe::Haar { n, .. } => {
                if n < 1 {
                    Err(Error::Domain("need at least one qubit".into()))
                } else {
                    Ok(())
                }
            }
            StateRecipe::MixedRandom { n, rank, .. } => {
                if n < 1 || rank < 1 || rank > 1usize.checked_shl(n as u32).unwrap_or(usize::MAX) {
                    Err(Error::Domain(format!("mixed-random parameters n = {n}, rank = {rank}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn build(&self) -> Result<Prepared> {
        self.validate()?;
        Ok(match *self {
            StateRecipe::Ghz { n } => Prepared::Pure(ghz(n)?),
            StateRecipe::W { n } => Prepared::Pure(w(n)?),
            StateRecipe::Dicke { n, k } => Prepared::Pure(dicke(n, k)?),
            StateRecipe::Star { theta } => Prepared::Pure(star(theta)?),
            StateRecipe::Product { n, seed: None } => Prepared::Pure(product_zero(Dims::qubits(n)?)?),
            StateRecipe::Product { n, seed: Some(s) } => {
                Prepared::Pure(random_product(&Dims::qubits(n)?, s)?)
            }
            StateRecipe::Haar { n, seed } => Prepared::Pure(haar_random(&Dims::qubits(n)?, seed)?),
            StateRecipe::MixedRandom { n, rank, seed } => {
                Prepared::Mixed(random_density(&Dims::qubits(n)?, rank, seed)?)
            }
        })
    }

    /// Builds a pure state; mixed families are rejected.
    pub fn build_pure(&self) -> Result<PureState> {
        match self.build()? {
            Prepared::Pure(psi) => Ok(psi),
            Prepared::Mixed(_) => Err(Error::Precondition(format!("{self} is not a pure state"))),
        }
    }

    pub fn build_density(&self) -> Result<DensityOperator> {
        Ok(match self.build()? {
            Prepared::Pure(psi) => psi.to_density(),
            Prepared::Mixed(rho) => rho,
        })
    }
}

impl fmt::Display for StateRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateRecipe::Ghz { n } => write!(f, "ghz:{n}"),
            StateRecipe::W { n } => write!(f, "w:{n}"),
            StateRecipe::Dicke { n, k } => write!(f, "dicke:{n}:{k}"),
            StateRecipe::Star { theta } => write!(f, "star:{theta}"),
            StateRecipe::Product { n, seed: None } => write!(f, "product:{n}"),
            StateRecipe::Product { n, seed: Some(s) } => write!(f, "product:{n}:{s}"),
            StateRecipe::Haar { n, seed } => write!(f, "haar:{n}:{seed}"),
            StateRecipe::MixedRandom { n, rank, seed } => write!(f, "mixed-random:{n}:{rank}:{seed}"),
        }
    }
}

impl FromStr for StateRecipe {
    type Err = Error;

    /// Shorthand such as `ghz:4`, `dicke:4:2`, `star:0.7853`, `haar:4:7`.
    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        if text.starts_with('{') {
            return Self::from_json(text);
        }
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::Parse(format!("unrecognized state recipe '{s}'"));
        let int = |i: usize| -> Result<u64> {
            parts
                .get(i)
                .ok_or_else(bad)?
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad integer in state recipe '{s}'")))
        };
        let recipe = match (parts[0], parts.len()) {
            ("ghz", 2) => StateRecipe::Ghz { n: int(1)? as usize },
            ("w", 2) => StateRecipe::W { n: int(1)? as usize },
            ("dicke", 3) => StateRecipe::Dicke {
                n: int(1)? as usize,
                k: int(2)? as usize,
            },
            ("star", 2) => StateRecipe::Star {
                theta: parts[1]
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad angle in state recipe '{s}'")))?,
            },
            ("product", 2) => StateRecipe::Product {
                n: int(1)? as usize,
                seed: None,
            },
            ("product", 3) => StateRecipe::Product {
                n: int(1)? as usize,
                seed: Some(int(2)?),
            },
            ("haar", 3) => StateRecipe::Haar {
                n: int(1)? as usize,
                seed: int(2)?,
            },
            ("mixed-random", 4) => StateRecipe::MixedRandom {
                n: int(1)? as usize,
                rank: int(2)? as usize,
                seed: int(3)?,
            },
            _ => return Err(bad()),
        };
        recipe.validate()?;
        Ok(recipe)
    }
}
