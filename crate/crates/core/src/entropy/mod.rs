//! Entropies, coherent information and the Holevo quantity (base-2 logarithms).

mod min_entropy;
mod typical;

pub use min_entropy::{min_entropy, min_entropy_sdp, MinEntropySolution};
pub use typical::{
    choi_purification, schumacher_compress, truncated_choi_purification, typical_projector, Schumacher,
    TruncatedPurification, TypicalConfig, TypicalProjector,
};

use crate::channels::QuantumChannel;
use crate::linalg::{zeros, DensityMatrix};
use crate::{Error, Result};

/// Eigenvalues below this are treated as zero when forming `−λ log λ`.
const ZERO_EIGENVALUE: f64 = 1e-15;

/// Shannon entropy of a probability vector; `0 log 0 = 0`.
pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > ZERO_EIGENVALUE).map(|&x| x * x.log2()).sum::<f64>()
}

pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim() as f64;
    Ok(shannon(&rho.eigenvalues()?).clamp(0.0, d.log2()))
}

fn marginal_b(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<DensityMatrix> {
    if dims[0] * dims[1] != rho_ab.dim() {
        return Err(Error::DimensionMismatch(format!("bipartition {dims:?} of a {}-dimensional state", rho_ab.dim())));
    }
    rho_ab.partial_trace(&dims, &[1])
}

/// `S(A|B) = S(AB) − S(B)`.
pub fn conditional_entropy(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    let b = marginal_b(rho_ab, dims)?;
    Ok(von_neumann(rho_ab)? - von_neumann(&b)?)
}

/// `I(A⟩B) = S(B) − S(AB)`.
pub fn coherent_information_state(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    Ok(-conditional_entropy(rho_ab, dims)?)
}

/// Coherent information of `(id ⊗ T)(ρ)` for `ρ` on `A' ⊗ A`.
pub fn coherent_information_channel(rho: &DensityMatrix, t: &QuantumChannel) -> Result<f64> {
    let d_in = t.d_in();
    if !rho.dim().is_multiple_of(d_in) {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional state has no factor of dimension {d_in}",
            rho.dim()
        )));
    }
    let d_ref = rho.dim() / d_in;
    let out = t.apply_local(rho, &[d_ref, d_in], 1)?;
    coherent_information_state(&out, [d_ref, t.d_out()])
}

/// A finite ensemble `{p_i, ρ_i}`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    probabilities: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probabilities: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probabilities.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidParameter("ensemble needs one probability per state".into()));
        }
        if probabilities.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter("negative probability in ensemble".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}")));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch("ensemble states of different dimension".into()));
        }
        Ok(Self { probabilities, states })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn average(&self) -> DensityMatrix {
        let d = self.states[0].dim();
        let mut m = zeros(d, d);
        for (p, s) in self.probabilities.iter().zip(&self.states) {
            m += s.matrix() * crate::linalg::c64(*p, 0.0);
        }
        DensityMatrix::from_matrix_unchecked(m)
    }

    /// Ensemble of channel outputs.
    pub fn map(&self, t: &QuantumChannel) -> Result<Self> {
        let states = self.states.iter().map(|s| t.apply(s)).collect::<Result<Vec<_>>>()?;
        Ok(Self { probabilities: self.probabilities.clone(), states })
    }
}

/// `χ = S(Σ p_i ρ_i) − Σ p_i S(ρ_i)`.
pub fn holevo_chi(e: &Ensemble) -> Result<f64> {
    let mut chi = von_neumann(&e.average())?;
    for (p, s) in e.probabilities.iter().zip(&e.states) {
        chi -= p * von_neumann(s)?;
    }
    Ok(chi.max(0.0))
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(shannon(&[p, 1.0 - p]))
}

/// `δ log d + H(δ)`, bounding `|S(ρ) − S(σ)|` when `½‖ρ − σ‖₁ ≤ δ`.
pub fn fannes_audenaert_bound(delta: f64, d: usize) -> Result<f64> {
    Ok(delta * (d as f64).log2() + binary_entropy(delta)?)
}

/// `8 ε d_B + 4 H(ε)`.
pub fn continuity_capacity_bound(eps: f64, d_b: usize) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside (0, 1]")));
    }
    Ok(8.0 * eps * d_b as f64 + 4.0 * binary_entropy(eps)?)
}
