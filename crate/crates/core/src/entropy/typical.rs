//! Entropy-typical subspaces, Schumacher compression and truncated Choi purifications.

use crate::channels::QuantumChannel;
use crate::linalg::{c64, herm_eig, permute_vector, ComplexMatrix, ComplexVector, DensityMatrix, PureState};
use crate::{Error, Result};

use super::von_neumann;

/// Largest `d^ν` handled by the typical-subspace routines.
pub const MAX_TYPICAL_DIM: usize = 4096;

/// Window and exponent constants of a typical subspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalConfig {
    pub delta: f64,
    /// Dimension exponent: `tr Π ≤ 2^{ν(S + c δ)}`. The construction here achieves `c = 1`.
    pub c: f64,
    /// Probability exponent: `tr(Π ρ^{⊗ν}) ≥ 1 − 2^{−ν c' δ²}`.
    pub c_prime: f64,
}

impl TypicalConfig {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("typicality window {delta} must be positive")));
        }
        Ok(Self { delta, c: 1.0, c_prime: 0.0 })
    }
}

/// Projector onto the span of eigenvector products `|x_1⟩⊗…⊗|x_ν⟩` whose
/// empirical entropy `−(1/ν) log₂ p(x)` lies within `δ` of `S(ρ)`.
#[derive(Clone, Debug)]
pub struct TypicalProjector {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    nu: usize,
    /// Typical sequences as base-`d` indices, first factor most significant, ascending.
    typical: Vec<usize>,
    entropy: f64,
}

impl TypicalProjector {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len().pow(self.nu as u32)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn rank(&self) -> usize {
        self.typical.len()
    }

    /// `S(ρ)` of the single-copy state.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn typical_indices(&self) -> &[usize] {
        &self.typical
    }

    fn digits(&self, mut x: usize) -> Vec<usize> {
        let d = self.eigenvalues.len();
        let mut out = vec![0; self.nu];
        for k in (0..self.nu).rev() {
            out[k] = x % d;
            x /= d;
        }
        out
    }

    pub fn sequence_probability(&self, x: usize) -> f64 {
        self.digits(x).iter().map(|&i| self.eigenvalues[i].max(0.0)).product()
    }

    /// `tr(Π ρ^{⊗ν})`.
    pub fn p_typical(&self) -> f64 {
        self.typical.iter().map(|&x| self.sequence_probability(x)).sum()
    }

    /// Product eigenvector for sequence `x`.
    pub fn sequence_vector(&self, x: usize) -> ComplexVector {
        let mut v = ComplexVector::from_element(1, c64(1.0, 0.0));
        for i in self.digits(x) {
            let col = self.eigenvectors.column(i);
            v = v.kronecker(&col);
        }
        v
    }

    /// Columns are the typical product vectors, so `Π = W W†`.
    pub fn isometry(&self) -> ComplexMatrix {
        let mut w = ComplexMatrix::zeros(self.dim(), self.rank());
        for (j, &x) in self.typical.iter().enumerate() {
            w.set_column(j, &self.sequence_vector(x));
        }
        w
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let w = self.isometry();
        &w * w.adjoint()
    }

    /// Smallest `c'` consistent with the exact typical weight at this `ν` and `δ`.
    pub fn fitted_c_prime(&self, delta: f64) -> f64 {
        let miss = (1.0 - self.p_typical()).max(f64::MIN_POSITIVE);
        -miss.log2() / (self.nu as f64 * delta * delta)
    }
}

pub fn typical_projector(rho0: &DensityMatrix, nu: usize, cfg: &TypicalConfig) -> Result<TypicalProjector> {
    if nu == 0 {
        return Err(Error::InvalidParameter("typical projector needs ν ≥ 1".into()));
    }
    if !(cfg.delta > 0.0) {
        return Err(Error::InvalidParameter(format!("typicality window {} must be positive", cfg.delta)));
    }
    let d = rho0.dim();
    let total = (d as u128).checked_pow(nu as u32).unwrap_or(u128::MAX);
    if total > MAX_TYPICAL_DIM as u128 {
        return Err(Error::DimensionOverflow { size: total.min(usize::MAX as u128) as usize, max: MAX_TYPICAL_DIM });
    }
    let eig = herm_eig(rho0.matrix())?;
    let entropy = von_neumann(rho0)?;
    let logs: Vec<f64> = eig.values.iter().map(|&p| if p > 1e-15 { p.log2() } else { f64::NEG_INFINITY }).collect();
    let mut proj = TypicalProjector {
        eigenvalues: eig.values.clone(),
        eigenvectors: eig.vectors,
        nu,
        typical: Vec::new(),
        entropy,
    };
    for x in 0..total as usize {
        let log_p: f64 = proj.digits(x).iter().map(|&i| logs[i]).sum();
        if !log_p.is_finite() {
            continue;
        }
        if (-log_p / nu as f64 - entropy).abs() <= cfg.delta + 1e-12 {
            proj.typical.push(x);
        }
    }
    Ok(proj)
}

/// Result of Schumacher-compressing `ν` copies of a qubit-register state.
#[derive(Clone, Debug)]
pub struct Schumacher {
    /// Sends typical vector number `j` to the basis state `|j⟩ ⊗ |0…0⟩`.
    pub unitary: ComplexMatrix,
    pub n_compressed: usize,
    pub p_typical: f64,
    pub projector: TypicalProjector,
}

pub fn schumacher_compress(rho0: &DensityMatrix, nu: usize, cfg: &TypicalConfig) -> Result<Schumacher> {
    let proj = typical_projector(rho0, nu, cfg)?;
    let dim = proj.dim();
    if !dim.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("register dimension {dim} is not a power of two")));
    }
    let qubits = dim.trailing_zeros() as usize;
    let rank = proj.rank();
    let n_compressed = if rank <= 1 { 0 } else { (usize::BITS - (rank - 1).leading_zeros()) as usize };
    let stride = 1usize << (qubits - n_compressed);

    let mut target = vec![usize::MAX; dim];
    let mut used = vec![false; dim];
    for (j, &x) in proj.typical.iter().enumerate() {
        target[x] = j * stride;
        used[j * stride] = true;
    }
    let mut free = (0..dim).filter(|&i| !used[i]);
    for t in target.iter_mut().filter(|t| **t == usize::MAX) {
        *t = free.next().expect("permutation has room");
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (x, &row) in target.iter().enumerate() {
        let v = proj.sequence_vector(x);
        for (c, z) in v.iter().enumerate() {
            u[(row, c)] = z.conj();
        }
    }
    Ok(Schumacher { unitary: u, n_compressed, p_typical: proj.p_typical(), projector: proj })
}

/// Environment-truncated purification of `σ^{⊗m}`, where `σ` is the Choi state of a channel.
#[derive(Clone, Debug)]
pub struct TruncatedPurification {
    /// Normalized state on `(A'B)^{⊗m} ⊗ E^{⊗m}`.
    pub state: PureState,
    /// `tr Π^E`, which bounds the rank of the environment marginal.
    pub env_rank_bound: usize,
    /// `‖|σ̃⟩⟨σ̃| − |σ⟩⟨σ|^{⊗m}‖₁`.
    pub trace_dist: f64,
    pub dims: [usize; 2],
}

/// Purification `Σ_i |i⟩ ⊗ V|i⟩ / √d` of the Choi state on `A' ⊗ B ⊗ E`.
pub fn choi_purification(t: &QuantumChannel) -> PureState {
    let v = t.stinespring();
    let d = t.d_in();
    let out = v.d_to();
    let s = c64(1.0 / (d as f64).sqrt(), 0.0);
    let amps = ComplexVector::from_fn(d * out, |idx, _| v.matrix()[(idx % out, idx / out)] * s);
    PureState::new(amps).expect("Choi purification is normalized")
}

pub fn truncated_choi_purification(t: &QuantumChannel, m: usize, cfg: &TypicalConfig) -> Result<TruncatedPurification> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one copy".into()));
    }
    let (da, db, de) = (t.d_in(), t.d_out(), t.env_dim());
    let single = da * db * de;
    let total = (single as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > MAX_TYPICAL_DIM as u128 {
        return Err(Error::DimensionOverflow { size: total.min(usize::MAX as u128) as usize, max: MAX_TYPICAL_DIM });
    }
    let psi = choi_purification(t);
    let sigma_e = psi.to_density().partial_trace(&[da * db, de], &[1])?;
    let proj = typical_projector(&sigma_e, m, cfg)?;

    let mut full = ComplexVector::from_element(1, c64(1.0, 0.0));
    for _ in 0..m {
        full = full.kronecker(psi.amplitudes());
    }
    let mut dims = Vec::with_capacity(2 * m);
    for _ in 0..m {
        dims.push(da * db);
        dims.push(de);
    }
    let perm: Vec<usize> = (0..m).map(|k| 2 * k).chain((0..m).map(|k| 2 * k + 1)).collect();
    let ordered = permute_vector(&full, &dims, &perm)?;

    let sys = (da * db).pow(m as u32);
    let env = de.pow(m as u32);
    let psi_mat = ComplexMatrix::from_fn(sys, env, |a, e| ordered[a * env + e]);
    let w = proj.isometry();
    let projected = &psi_mat * w.conjugate() * w.transpose();
    let norm = projected.norm();
    if norm <= 0.0 {
        return Err(Error::InvalidState("typical projection annihilates the state".into()));
    }
    let amps = ComplexVector::from_fn(sys * env, |idx, _| projected[(idx / env, idx % env)] / c64(norm, 0.0));
    let state = PureState::new(amps)?;
    // For P|ψ⟩/‖P|ψ⟩‖ the distance is 2√(1 − ‖Pψ‖²) = 2‖(1 − P)ψ‖.
    let trace_dist = 2.0 * (&psi_mat - &projected).norm();
    Ok(TruncatedPurification { state, env_rank_bound: proj.rank(), trace_dist, dims: [sys, env] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, max_abs};

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn pure_and_maximally_mixed_extremes() {
        let cfg = TypicalConfig::new(0.1).unwrap();
        let pure = typical_projector(&DensityMatrix::basis(2, 1), 4, &cfg).unwrap();
        assert_eq!(pure.rank(), 1);
        let want = DensityMatrix::basis(16, 15);
        assert!(max_abs(&(pure.matrix() - want.matrix())) < 1e-12);

        let mixed = typical_projector(&DensityMatrix::maximally_mixed(2), 5, &cfg).unwrap();
        assert_eq!(mixed.rank(), 32);
        assert!(max_abs(&(mixed.matrix() - ComplexMatrix::identity(32, 32))) < 1e-12);
    }

    #[test]
    fn binomial_tail_oracle() {
        let rho = DensityMatrix::new(diag(&[0.75, 0.25])).unwrap();
        let s = 0.8112781244591328;
        let cfg = TypicalConfig::new(0.2).unwrap();
        let proj = typical_projector(&rho, 10, &cfg).unwrap();
        let mut p = 0.0;
        let mut count = 0.0;
        for k in 0..=10u64 {
            let lp = (10 - k) as f64 * 0.75f64.log2() + k as f64 * 0.25f64.log2();
            if (-lp / 10.0 - s).abs() <= 0.2 {
                p += binom(10, k) * 0.75f64.powi(10 - k as i32) * 0.25f64.powi(k as i32);
                count += binom(10, k);
            }
        }
        assert!((proj.p_typical() - p).abs() < 1e-12);
        assert_eq!(proj.rank() as f64, count);
        assert!((proj.rank() as f64) <= 2f64.powf(10.0 * (s + 0.2)));
    }

    #[test]
    fn schumacher_extremes() {
        let cfg = TypicalConfig::new(0.1).unwrap();
        let pure = schumacher_compress(&DensityMatrix::basis(2, 0), 3, &cfg).unwrap();
        assert_eq!(pure.n_compressed, 0);
        assert!((pure.p_typical - 1.0).abs() < 1e-12);
        let mixed = schumacher_compress(&DensityMatrix::maximally_mixed(2), 4, &cfg).unwrap();
        assert_eq!(mixed.n_compressed, 4);
        let u = &mixed.unitary;
        assert!(max_abs(&(u.adjoint() * u - ComplexMatrix::identity(16, 16))) < 1e-12);
    }

    #[test]
    fn unitary_channel_purification_is_exact() {
        let t = QuantumChannel::unitary(&crate::pauli::Pauli::Y.matrix()).unwrap();
        let tp = truncated_choi_purification(&t, 2, &TypicalConfig::new(0.1).unwrap()).unwrap();
        assert!(tp.trace_dist < 1e-12, "{}", tp.trace_dist);
        assert_eq!(tp.env_rank_bound, 1);
    }
}
