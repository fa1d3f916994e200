//! Quantum channels and their Kraus, Choi, superoperator and Stinespring views.
//!
//! Conventions:
//! - Kraus operators are `d_out × d_in`.
//! - The Choi matrix is normalized, `J(T) = (id ⊗ T)(ω)` with the reference
//!   system first, so it is a state on `C^{d_in} ⊗ C^{d_out}`.
//! - The superoperator acts on column-stacked matrices:
//!   `vec(T(X)) = S · vec(X)` with `S = Σ_k conj(K_k) ⊗ K_k`.

use serde::{Deserialize, Serialize};

use crate::io::MatrixJson;
use crate::linalg::{
    c64, embed, frobenius, herm_eig, identity, kron, min_eigenvalue, partial_trace, partial_transpose, trace_norm,
    zeros, ComplexMatrix, DensityMatrix, PureState, C64,
};
use crate::pauli::Pauli;
use crate::rng::{ginibre, Rng};
use crate::{Error, Result};

/// Tolerance on `Σ K†K = I` and Choi positivity.
pub const CPTP_TOL: f64 = 1e-8;
/// Choi eigenvalues below this are dropped when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-10;

/// Completely positive trace-preserving map `M_{d_in} → M_{d_out}`.
///
/// Immutable; the Choi matrix and superoperator are computed at construction.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
    superop: ComplexMatrix,
}

impl PartialEq for QuantumChannel {
    fn eq(&self, other: &Self) -> bool {
        self.d_in == other.d_in && self.d_out == other.d_out && self.superop == other.superop
    }
}

/// Isometry `V: C^{d_from} → C^{d_to}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    matrix: ComplexMatrix,
}

impl Isometry {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() < matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "an isometry cannot map dimension {} into {}",
                matrix.ncols(),
                matrix.nrows()
            )));
        }
        let defect = frobenius(&(matrix.adjoint() * &matrix - identity(matrix.ncols())));
        if defect > 1e-9 {
            return Err(Error::InvalidParameter(format!("V†V deviates from identity by {defect:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: identity(d) }
    }

    pub fn d_from(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn d_to(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// The channel `ρ ↦ VρV†`.
    pub fn channel(&self) -> QuantumChannel {
        QuantumChannel::from_kraus_unchecked(vec![self.matrix.clone()])
    }
}

impl QuantumChannel {
    /// Builds a channel from Kraus operators, checking `Σ K†K = I`.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("a channel needs at least one Kraus operator".into()))?;
        let (d_out, d_in) = first.shape();
        if kraus.iter().any(|k| k.shape() != (d_out, d_in)) {
            return Err(Error::DimensionMismatch("Kraus operators of different shapes".into()));
        }
        if d_in == 0 || d_out == 0 {
            return Err(Error::DimensionMismatch("empty Kraus operator".into()));
        }
        let mut sum = zeros(d_in, d_in);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = frobenius(&(sum - identity(d_in)));
        if defect > CPTP_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraus operators are not trace preserving (defect {defect:e})"
            )));
        }
        Ok(Self::from_kraus_unchecked(kraus))
    }

    pub(crate) fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Self {
        let (d_out, d_in) = kraus[0].shape();
        let choi = kraus_to_choi(&kraus);
        let superop = kraus_to_superop(&kraus);
        Self { d_in, d_out, kraus, choi, superop }
    }

    /// Builds a channel from its normalized Choi matrix.
    pub fn from_choi(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        let kraus = choi_to_kraus(choi, d_in, d_out)?;
        let marginal = partial_trace(choi, &[d_in, d_out], &[0])?;
        let defect = frobenius(&(marginal - identity(d_in) / c64(d_in as f64, 0.0)));
        if defect > CPTP_TOL {
            return Err(Error::InvalidParameter(format!("Choi matrix is not trace preserving (defect {defect:e})")));
        }
        Self::from_kraus(kraus)
    }

    pub fn from_superop(superop: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        Self::from_choi(&superop_to_choi(superop, d_in, d_out)?, d_in, d_out)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus_unchecked(vec![identity(d)])
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(vec![u.clone()])
    }

    /// The qubit channel `ρ ↦ (XρX + YρY + ZρZ)/3`.
    pub fn pauli_depolarizing() -> Self {
        let w = c64((1.0f64 / 3.0).sqrt(), 0.0);
        Self::from_kraus_unchecked(Pauli::NONTRIVIAL.iter().map(|p| p.matrix() * w).collect())
    }

    /// Qubit depolarizing family `ρ ↦ λρ + (1−λ) tr(ρ) I/2`, valid for `λ ∈ [−1/3, 1]`.
    pub fn qubit_depolarizing(lambda: f64) -> Result<Self> {
        if !(-1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("depolarizing parameter {lambda} outside [-1/3, 1]")));
        }
        let w0 = ((1.0 + 3.0 * lambda) / 4.0).max(0.0).sqrt();
        let w = ((1.0 - lambda) / 4.0).max(0.0).sqrt();
        let mut kraus = vec![Pauli::I.matrix() * c64(w0, 0.0)];
        kraus.extend(Pauli::NONTRIVIAL.iter().map(|p| p.matrix() * c64(w, 0.0)));
        Ok(Self::from_kraus_unchecked(kraus))
    }

    /// `ρ ↦ tr(ρ) I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        Self::replacement(&DensityMatrix::maximally_mixed(d), d)
    }

    /// `ρ ↦ tr(ρ) σ` on inputs of dimension `d_in`.
    pub fn replacement(sigma: &DensityMatrix, d_in: usize) -> Self {
        let eig = herm_eig(sigma.matrix()).expect("density matrices are Hermitian");
        let d_out = sigma.dim();
        let mut kraus = Vec::new();
        for (idx, &p) in eig.values.iter().enumerate() {
            if p <= KRAUS_CUTOFF {
                continue;
            }
            let v = eig.vectors.column(idx);
            for i in 0..d_in {
                let mut k = zeros(d_out, d_in);
                for b in 0..d_out {
                    k[(b, i)] = v[b] * p.sqrt();
                }
                kraus.push(k);
            }
        }
        Self::from_kraus_unchecked(kraus)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("damping {gamma} outside [0, 1]")));
        }
        let k0 = crate::linalg::real_matrix(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]);
        let k1 = crate::linalg::real_matrix(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0]);
        Ok(Self::from_kraus_unchecked(vec![k0, k1]))
    }

    /// Random channel from a Haar-random Stinespring isometry with `n_kraus` outputs.
    ///
    /// Needs `d_out · n_kraus ≥ d_in`, otherwise no isometry exists.
    pub fn random(d_in: usize, d_out: usize, n_kraus: usize, rng: &mut Rng) -> Result<Self> {
        if d_in == 0 || d_out * n_kraus < d_in {
            return Err(Error::DimensionMismatch(format!("no isometry from dimension {d_in} into {d_out}·{n_kraus}")));
        }
        let big = ginibre(d_out * n_kraus, d_in, rng);
        let q = big.qr().q();
        let kraus = (0..n_kraus).map(|k| ComplexMatrix::from_fn(d_out, d_in, |b, a| q[(b * n_kraus + k, a)])).collect();
        Ok(Self::from_kraus_unchecked(kraus))
    }

    /// Convex combination `λ·S + (1−λ)·T`.
    pub fn mix(lambda: f64, s: &QuantumChannel, t: &QuantumChannel) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("mixing weight {lambda} outside [0, 1]")));
        }
        if s.d_in != t.d_in || s.d_out != t.d_out {
            return Err(Error::DimensionMismatch("mixing channels of different shapes".into()));
        }
        let a = c64(lambda.sqrt(), 0.0);
        let b = c64((1.0 - lambda).sqrt(), 0.0);
        let kraus = s.kraus.iter().map(|k| k * a).chain(t.kraus.iter().map(|k| k * b)).collect();
        Ok(Self::from_kraus_unchecked(kraus))
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn superop(&self) -> &ComplexMatrix {
        &self.superop
    }

    /// Applies the channel to an arbitrary (not necessarily positive) matrix.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.d_in, self.d_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input {} vs matrix {}x{}",
                self.d_in,
                x.nrows(),
                x.ncols()
            )));
        }
        let mut out = zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_unchecked(self.apply_matrix(rho.matrix())?))
    }

    /// Applies the channel to subsystem `site` of a state with subsystem `dims`.
    pub fn apply_local(&self, rho: &DensityMatrix, dims: &[usize], site: usize) -> Result<DensityMatrix> {
        if site >= dims.len() || dims[site] != self.d_in || dims.iter().product::<usize>() != rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "channel on subsystem {site} of {dims:?} (input dimension {})",
                self.d_in
            )));
        }
        let left = identity(dims[..site].iter().product());
        let right = identity(dims[site + 1..].iter().product());
        let mut out = zeros(0, 0);
        for (n, k) in self.kraus.iter().enumerate() {
            let big = kron(&kron(&left, k), &right);
            let term = &big * rho.matrix() * big.adjoint();
            if n == 0 {
                out = term;
            } else {
                out += term;
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// Stinespring isometry `V = Σ_k K_k ⊗ |k⟩` into `B ⊗ E`.
    pub fn stinespring(&self) -> Isometry {
        let ne = self.kraus.len();
        let matrix = ComplexMatrix::from_fn(self.d_out * ne, self.d_in, |row, a| self.kraus[row % ne][(row / ne, a)]);
        Isometry { matrix }
    }

    pub fn env_dim(&self) -> usize {
        self.kraus.len()
    }

    /// Complementary channel `ρ ↦ tr_B(VρV†)` onto the Stinespring environment.
    pub fn complementary(&self) -> QuantumChannel {
        let ne = self.kraus.len();
        let kraus =
            (0..self.d_out).map(|b| ComplexMatrix::from_fn(ne, self.d_in, |k, a| self.kraus[k][(b, a)])).collect();
        Self::from_kraus_unchecked(kraus)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &QuantumChannel) -> Result<QuantumChannel> {
        if inner.d_out != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose channel with input {} after output {}",
                self.d_in, inner.d_out
            )));
        }
        let kraus = self.kraus.iter().flat_map(|s| inner.kraus.iter().map(move |t| s * t)).collect();
        Ok(Self::from_kraus_unchecked(kraus).compressed())
    }

    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let kraus = self.kraus.iter().flat_map(|s| other.kraus.iter().map(move |t| kron(s, t))).collect();
        Self::from_kraus_unchecked(kraus).compressed()
    }

    pub fn tensor_power(&self, m: usize) -> Result<QuantumChannel> {
        if m == 0 {
            return Err(Error::InvalidParameter("tensor power must be at least 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..m {
            out = out.tensor(self);
        }
        Ok(out)
    }

    /// Replaces the Kraus list by a minimal one when it exceeds the Choi rank bound.
    pub fn compressed(self) -> QuantumChannel {
        if self.kraus.len() <= self.d_in * self.d_out {
            return self;
        }
        match choi_to_kraus(&self.choi, self.d_in, self.d_out) {
            Ok(kraus) if !kraus.is_empty() => Self { kraus, ..self },
            _ => self,
        }
    }

    /// Checks Choi positivity and trace preservation.
    pub fn validate(&self) -> Result<()> {
        let min = min_eigenvalue(&self.choi)?;
        if min < -CPTP_TOL {
            return Err(Error::NotPositive(min));
        }
        let marginal = partial_trace(&self.choi, &[self.d_in, self.d_out], &[0])?;
        let defect = frobenius(&(marginal - identity(self.d_in) / c64(self.d_in as f64, 0.0)));
        if defect > CPTP_TOL {
            return Err(Error::InvalidParameter(format!("not trace preserving (defect {defect:e})")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ChannelJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<ChannelJson>(s)?.try_into()
    }
}

/// Wire format `{d_in, d_out, kraus}` with matrices as rows of `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(t: &QuantumChannel) -> Self {
        Self { d_in: t.d_in, d_out: t.d_out, kraus: t.kraus.iter().map(MatrixJson::from_matrix).collect() }
    }
}

impl TryFrom<ChannelJson> for QuantumChannel {
    type Error = Error;

    fn try_from(j: ChannelJson) -> Result<Self> {
        let kraus = j.kraus.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        if kraus.iter().any(|k| k.shape() != (j.d_out, j.d_in)) {
            return Err(Error::DimensionMismatch(format!("Kraus operators must be {}x{}", j.d_out, j.d_in)));
        }
        QuantumChannel::from_kraus(kraus)
    }
}

impl Serialize for QuantumChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ChannelJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

/// Normalized Choi matrix `(1/d_in) Σ_k |K_k⟩⟩⟨⟨K_k|` with `|K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩`.
pub fn kraus_to_choi(kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let (d_out, d_in) = kraus[0].shape();
    let n = d_in * d_out;
    let mut choi = zeros(n, n);
    let scale = c64(1.0 / d_in as f64, 0.0);
    for k in kraus {
        let v = crate::linalg::ComplexVector::from_fn(n, |idx, _| k[(idx % d_out, idx / d_out)]);
        choi.ger(scale, &v, &v.conjugate(), c64(1.0, 0.0));
    }
    choi
}

/// Kraus operators from the spectral decomposition of the Choi matrix.
pub fn choi_to_kraus(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<Vec<ComplexMatrix>> {
    if choi.shape() != (d_in * d_out, d_in * d_out) {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix {}x{} for a {d_in}→{d_out} channel",
            choi.nrows(),
            choi.ncols()
        )));
    }
    let eig = herm_eig(&(choi * c64(d_in as f64, 0.0)))?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -CPTP_TOL {
        return Err(Error::NotPositive(min / d_in as f64));
    }
    let mut kraus = Vec::new();
    for (idx, &lam) in eig.values.iter().enumerate() {
        if lam < KRAUS_CUTOFF {
            continue;
        }
        let v = eig.vectors.column(idx);
        let s = lam.sqrt();
        kraus.push(ComplexMatrix::from_fn(d_out, d_in, |b, i| v[i * d_out + b] * s));
    }
    Ok(kraus)
}

/// `Σ_k conj(K_k) ⊗ K_k`.
pub fn kraus_to_superop(kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let (d_out, d_in) = kraus[0].shape();
    let mut s = zeros(d_out * d_out, d_in * d_in);
    for k in kraus {
        add_kron_conj(&mut s, k, k, c64(1.0, 0.0));
    }
    s
}

/// `s += w · conj(b) ⊗ a`: the superoperator of `X ↦ w·A X B†`.
pub(crate) fn add_kron_conj(s: &mut ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, w: C64) {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    for j in 0..bc {
        for i in 0..br {
            let bij = b[(i, j)].conj() * w;
            if bij == c64(0.0, 0.0) {
                continue;
            }
            for q in 0..ac {
                let col = j * ac + q;
                for p in 0..ar {
                    let apq = a[(p, q)];
                    if apq != c64(0.0, 0.0) {
                        s[(i * ar + p, col)] += bij * apq;
                    }
                }
            }
        }
    }
}

/// Superoperator from a normalized Choi matrix.
pub fn choi_to_superop(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<ComplexMatrix> {
    if choi.shape() != (d_in * d_out, d_in * d_out) {
        return Err(Error::DimensionMismatch("Choi shape does not match dimensions".into()));
    }
    let mut s = zeros(d_out * d_out, d_in * d_in);
    let scale = d_in as f64;
    for i in 0..d_in {
        for j in 0..d_in {
            for b in 0..d_out {
                for bp in 0..d_out {
                    s[(bp * d_out + b, j * d_in + i)] = choi[(i * d_out + b, j * d_out + bp)] * scale;
                }
            }
        }
    }
    Ok(s)
}

/// Normalized Choi matrix from a superoperator.
pub fn superop_to_choi(superop: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<ComplexMatrix> {
    if superop.shape() != (d_out * d_out, d_in * d_in) {
        return Err(Error::DimensionMismatch(format!(
            "superoperator {}x{} for a {d_in}→{d_out} map",
            superop.nrows(),
            superop.ncols()
        )));
    }
    let n = d_in * d_out;
    let mut choi = zeros(n, n);
    let scale = 1.0 / d_in as f64;
    for i in 0..d_in {
        for j in 0..d_in {
            for b in 0..d_out {
                for bp in 0..d_out {
                    choi[(i * d_out + b, j * d_out + bp)] = superop[(bp * d_out + b, j * d_in + i)] * scale;
                }
            }
        }
    }
    Ok(choi)
}

/// Completes `V` to a unitary `U` with `U(ψ ⊗ |0⟩) = Vψ`.
///
/// The columns `U(|i⟩⊗|0⟩)` are fixed to `V|i⟩`; the remaining columns are
/// filled by Gram–Schmidt over the standard basis.
pub fn isometry_to_unitary(v: &Isometry) -> Result<(ComplexMatrix, PureState)> {
    let (n, big) = (v.d_from(), v.d_to());
    if big % n != 0 {
        return Err(Error::DimensionMismatch(format!(
            "target dimension {big} is not a multiple of source dimension {n}"
        )));
    }
    let k = big / n;
    let mut u = zeros(big, big);
    let mut filled = vec![false; big];
    for i in 0..n {
        u.set_column(i * k, &v.matrix().column(i));
        filled[i * k] = true;
    }
    let mut basis: Vec<crate::linalg::ComplexVector> = (0..n).map(|i| v.matrix().column(i).into_owned()).collect();
    let mut candidates: Vec<usize> = (0..big).collect();
    #[allow(clippy::needless_range_loop)]
    for slot in 0..big {
        if filled[slot] {
            continue;
        }
        // Prefer the slot's own basis vector so that embeddings give U = I.
        candidates.sort_by_key(|&c| (c != slot, c));
        let mut chosen = None;
        for (pos, &c) in candidates.iter().enumerate() {
            let mut w = crate::linalg::ComplexVector::zeros(big);
            w[c] = c64(1.0, 0.0);
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.dotc(&w);
                    w -= b * proj;
                }
            }
            let norm = w.norm();
            if norm > 0.5 {
                chosen = Some((pos, w / c64(norm, 0.0)));
                break;
            }
        }
        let (pos, w) = chosen.ok_or_else(|| Error::InvalidParameter("basis completion failed".into()))?;
        candidates.remove(pos);
        u.set_column(slot, &w);
        basis.push(w);
    }
    Ok((u, PureState::basis(k, 0)))
}

/// `⟨ω|(id ⊗ T)(ω)|ω⟩ = Σ_k |tr K_k|² / d²`.
pub fn entanglement_fidelity(t: &QuantumChannel) -> Result<f64> {
    if t.d_in != t.d_out {
        return Err(Error::DimensionMismatch("entanglement fidelity of a non-square channel".into()));
    }
    let d2 = (t.d_in * t.d_in) as f64;
    Ok(t.kraus.iter().map(|k| k.trace().norm_sqr()).sum::<f64>() / d2)
}

/// Two-sided bounds on the diamond distance between two channels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondBounds {
    /// `‖(id ⊗ (S−T))(ω)‖₁`
    pub lower: f64,
    /// `d_in · ‖J(S) − J(T)‖₁`, the trace norm of the unnormalized Choi difference
    pub upper: f64,
}

pub fn diamond_distance_bounds(s: &QuantumChannel, t: &QuantumChannel) -> Result<DiamondBounds> {
    if s.d_in != t.d_in || s.d_out != t.d_out {
        return Err(Error::DimensionMismatch("diamond distance between channels of different shapes".into()));
    }
    let lower = trace_norm(&(&s.choi - &t.choi));
    Ok(DiamondBounds { lower, upper: lower * s.d_in as f64 })
}

/// Smallest eigenvalue of the partially transposed Choi matrix.
pub fn ppt_min_eigenvalue(t: &QuantumChannel) -> Result<f64> {
    let pt = partial_transpose(&t.choi, &[t.d_in, t.d_out], &[1])?;
    min_eigenvalue(&pt)
}

/// Whether the Choi matrix has a positive partial transpose (within 1e-9).
pub fn is_ppt_channel(t: &QuantumChannel) -> Result<bool> {
    Ok(ppt_min_eigenvalue(t)? >= -1e-9)
}

/// Kraus operators of `T` embedded on site `site` of `n` identical subsystems.
pub fn embedded_kraus(t: &QuantumChannel, site: usize, n: usize) -> Vec<ComplexMatrix> {
    assert_eq!(t.d_in, t.d_out);
    t.kraus.iter().map(|k| embed(k, t.d_in, site, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, max_abs};
    use crate::rng::{random_density, random_pure_state};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn pauli_depolarizing_on_ground_state() {
        let out = QuantumChannel::pauli_depolarizing().apply(&DensityMatrix::basis(2, 0)).unwrap();
        assert!(close(out.matrix(), &diag(&[1.0 / 3.0, 2.0 / 3.0])) < 1e-14);
    }

    #[test]
    fn identity_and_completely_depolarizing_apply() {
        let mut rng = Rng::new(1);
        let rho = random_density(3, &mut rng);
        let out = QuantumChannel::identity(3).apply(&rho).unwrap();
        assert!(close(out.matrix(), rho.matrix()) < 1e-14);
        let out = QuantumChannel::completely_depolarizing(3).apply(&rho).unwrap();
        assert!(close(out.matrix(), DensityMatrix::maximally_mixed(3).matrix()) < 1e-12);
    }

    #[test]
    fn identity_choi_is_maximally_entangled() {
        let j = QuantumChannel::identity(2);
        assert!(close(j.choi(), DensityMatrix::maximally_entangled(2).matrix()) < 1e-15);
    }

    #[test]
    fn pauli_depolarizing_choi_spectrum() {
        let mut vals = crate::linalg::herm_eigvals(QuantumChannel::pauli_depolarizing().choi()).unwrap();
        vals.reverse();
        let expected = [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn choi_kraus_round_trip() {
        let mut rng = Rng::new(7);
        let t = QuantumChannel::random(3, 2, 4, &mut rng).unwrap();
        let back = QuantumChannel::from_kraus(choi_to_kraus(t.choi(), 3, 2).unwrap()).unwrap();
        for _ in 0..5 {
            let rho = random_density(3, &mut rng);
            let a = t.apply(&rho).unwrap();
            let b = back.apply(&rho).unwrap();
            assert!(close(a.matrix(), b.matrix()) < 1e-10);
        }
        let s = choi_to_superop(t.choi(), 3, 2).unwrap();
        assert!(close(&s, t.superop()) < 1e-12);
        let j = superop_to_choi(t.superop(), 3, 2).unwrap();
        assert!(close(&j, t.choi()) < 1e-12);
    }

    #[test]
    fn choi_to_kraus_rejects_negative_choi() {
        let bad = diag(&[0.75, -0.25, 0.25, 0.25]);
        assert!(matches!(choi_to_kraus(&bad, 2, 2), Err(Error::NotPositive(_))));
    }

    #[test]
    fn superop_acts_on_vectorized_input() {
        let mut rng = Rng::new(3);
        let t = QuantumChannel::random(2, 3, 3, &mut rng).unwrap();
        let rho = random_density(2, &mut rng);
        let via_superop = crate::linalg::unvectorize(&(t.superop() * crate::linalg::vectorize(rho.matrix())), 3, 3);
        assert!(close(&via_superop, t.apply(&rho).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn stinespring_reconstructs_channel() {
        let mut rng = Rng::new(11);
        for t in [QuantumChannel::pauli_depolarizing(), QuantumChannel::random(2, 2, 4, &mut rng).unwrap()] {
            let v = t.stinespring();
            let ne = t.env_dim();
            for i in 0..2 {
                for j in 0..2 {
                    let mut x = zeros(2, 2);
                    x[(i, j)] = c64(1.0, 0.0);
                    let big = v.matrix() * &x * v.matrix().adjoint();
                    let reduced = partial_trace(&big, &[2, ne], &[0]).unwrap();
                    assert!(close(&reduced, &t.apply_matrix(&x).unwrap()) < 1e-9);
                }
            }
        }
        assert_eq!(QuantumChannel::pauli_depolarizing().stinespring().d_to(), 6);
    }

    #[test]
    fn unitary_channel_has_trivial_environment() {
        let u = crate::rng::haar_unitary(3, &mut Rng::new(5));
        let t = QuantumChannel::unitary(&u).unwrap();
        assert!(close(t.stinespring().matrix(), &u) < 1e-15);
        let c = t.complementary();
        assert_eq!(c.d_out(), 1);
        let rho = random_density(3, &mut Rng::new(6));
        assert!((c.apply(&rho).unwrap().matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_complement_has_matching_output_spectra() {
        let mut rng = Rng::new(13);
        let t = QuantumChannel::random(2, 2, 3, &mut rng).unwrap();
        let cc = t.complementary().complementary();
        for _ in 0..5 {
            let rho = random_density(2, &mut rng);
            let mut a = t.apply(&rho).unwrap().eigenvalues().unwrap();
            let mut b = cc.apply(&rho).unwrap().eigenvalues().unwrap();
            a.retain(|x| x.abs() > 1e-10);
            b.retain(|x| x.abs() > 1e-10);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn complement_of_depolarizing_preserves_trace() {
        let out =
            QuantumChannel::pauli_depolarizing().complementary().apply(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(out.dim(), 3);
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_and_tensor_products() {
        let mut rng = Rng::new(17);
        let t = QuantumChannel::random(2, 2, 2, &mut rng).unwrap();
        let s = QuantumChannel::random(2, 2, 3, &mut rng).unwrap();
        let rho = random_density(2, &mut rng);
        let ti = t.compose(&QuantumChannel::identity(2)).unwrap();
        assert!(close(ti.apply(&rho).unwrap().matrix(), t.apply(&rho).unwrap().matrix()) < 1e-12);
        let st = s.compose(&t).unwrap();
        let direct = s.apply(&t.apply(&rho).unwrap()).unwrap();
        assert!(close(st.apply(&rho).unwrap().matrix(), direct.matrix()) < 1e-12);

        let id8 = QuantumChannel::identity(2).tensor_power(3).unwrap();
        assert!(close(id8.superop(), QuantumChannel::identity(8).superop()) < 1e-14);

        let sigma = random_density(2, &mut rng);
        let prod = t.tensor(&s).apply(&rho.tensor(&sigma)).unwrap();
        let expected = t.apply(&rho).unwrap().tensor(&s.apply(&sigma).unwrap());
        assert!(close(prod.matrix(), expected.matrix()) < 1e-12);
        assert!(matches!(s.compose(&QuantumChannel::identity(3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn isometry_to_unitary_cases() {
        let (u, phi) = isometry_to_unitary(&Isometry::identity(3)).unwrap();
        assert!(close(&u, &identity(3)) < 1e-15);
        assert_eq!(phi.dim(), 1);

        let mut emb = zeros(6, 2);
        emb[(0, 0)] = c64(1.0, 0.0);
        emb[(3, 1)] = c64(1.0, 0.0);
        let (u, phi) = isometry_to_unitary(&Isometry::new(emb).unwrap()).unwrap();
        assert!(close(&u, &identity(6)) < 1e-15);
        assert_eq!(phi, PureState::basis(3, 0));

        let mut rng = Rng::new(19);
        let v = Isometry::new(crate::rng::haar_isometry(2, 8, &mut rng)).unwrap();
        let (u, phi) = isometry_to_unitary(&v).unwrap();
        assert!(close(&(u.adjoint() * &u), &identity(8)) < 1e-12);
        for _ in 0..20 {
            let psi = random_pure_state(2, &mut rng);
            let lhs = &u * psi.tensor(&phi).amplitudes();
            let rhs = v.matrix() * psi.amplitudes();
            assert!((lhs - rhs).norm() < 1e-9);
        }
        let odd = Isometry::new(crate::rng::haar_isometry(2, 5, &mut rng)).unwrap();
        assert!(isometry_to_unitary(&odd).is_err());
    }

    #[test]
    fn entanglement_fidelity_values() {
        assert!((entanglement_fidelity(&QuantumChannel::identity(2)).unwrap() - 1.0).abs() < 1e-15);
        let cd = QuantumChannel::completely_depolarizing(2);
        assert!((entanglement_fidelity(&cd).unwrap() - 0.25).abs() < 1e-14);
        let mut rng = Rng::new(23);
        let s = QuantumChannel::random(2, 2, 3, &mut rng).unwrap();
        let lam = 0.3;
        let mix = QuantumChannel::mix(lam, &QuantumChannel::identity(2), &s).unwrap();
        let expected = lam + (1.0 - lam) * entanglement_fidelity(&s).unwrap();
        assert!((entanglement_fidelity(&mix).unwrap() - expected).abs() < 1e-12);
        // Direct definition via the Choi matrix.
        let omega = PureState::maximally_entangled(2);
        let direct = (omega.amplitudes().adjoint() * s.choi() * omega.amplitudes())[(0, 0)].re;
        assert!((direct - entanglement_fidelity(&s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn diamond_bounds_are_ordered() {
        let t = QuantumChannel::pauli_depolarizing();
        let b = diamond_distance_bounds(&t, &t).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let z = QuantumChannel::unitary(&Pauli::Z.matrix()).unwrap();
        let b = diamond_distance_bounds(&z, &QuantumChannel::identity(2)).unwrap();
        assert!(b.lower <= b.upper);
        assert!((b.lower - 2.0).abs() < 1e-12);
        let mut rng = Rng::new(29);
        for _ in 0..20 {
            let s = QuantumChannel::random(2, 3, 2, &mut rng).unwrap();
            let t = QuantumChannel::random(2, 3, 3, &mut rng).unwrap();
            let b = diamond_distance_bounds(&s, &t).unwrap();
            assert!(b.lower <= b.upper + 1e-12);
        }
    }

    #[test]
    fn ppt_predicate() {
        assert!(!is_ppt_channel(&QuantumChannel::identity(2)).unwrap());
        assert!(is_ppt_channel(&QuantumChannel::completely_depolarizing(2)).unwrap());
        for i in 0..=40 {
            let lam = -1.0 / 3.0 + i as f64 * (4.0 / 3.0) / 40.0;
            let t = QuantumChannel::qubit_depolarizing(lam).unwrap();
            // Partial transpose of the Choi matrix has eigenvalues (1+λ)/4 (x3) and (1-3λ)/4.
            let oracle = ((1.0 - 3.0 * lam) / 4.0).min((1.0 + lam) / 4.0);
            assert!((ppt_min_eigenvalue(&t).unwrap() - oracle).abs() < 1e-12);
            if (lam - 1.0 / 3.0).abs() > 1e-6 {
                assert_eq!(is_ppt_channel(&t).unwrap(), lam <= 1.0 / 3.0, "λ = {lam}");
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = QuantumChannel::random(2, 2, 2, &mut Rng::new(31)).unwrap();
        let s = t.to_json().unwrap();
        assert!(s.starts_with("{\"d_in\":2,\"d_out\":2,\"kraus\":[[[["));
        let back = QuantumChannel::from_json(&s).unwrap();
        assert!(close(back.superop(), t.superop()) < 1e-15);
        let bad = r#"{"d_in":2,"d_out":2,"kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        assert!(QuantumChannel::from_json(bad).is_err());
    }
}
