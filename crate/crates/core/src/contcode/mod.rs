//! Continuous-time error correction with stabilizer codes.
//!
//! A coding generator `L_c = r(R − id)` runs alongside local noise
//! `L^{⊕m}`, and the logical channel is `V†·R(e^{t(L^{⊕m} + L_c)}(V·V†))·V`.

mod classical;
mod fbound;

pub use classical::{
    classical_alpha_check, classical_repetition, ChainKind, ClassicalAlphaCheck, ClassicalChain, ClassicalRepetition,
};
pub use fbound::{f_closed_form, f_series, SeriesValue};

use crate::channels::{entanglement_fidelity, Isometry, QuantumChannel};
use crate::linalg::{
    c64, embed, expm_scaled, frobenius, identity, unvectorize, vectorize, zeros, ComplexMatrix, ComplexVector,
};
use crate::lindblad::{Liouvillian, MAX_DIM};
use crate::pauli::{Pauli, PauliString};
use crate::{Error, Result};

/// A stabilizer code encoding one logical qubit.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    encoder: Isometry,
    /// Lowest-weight correction for each syndrome, indexed by syndrome bits
    /// (generator 0 is the most significant bit).
    corrections: Vec<PauliString>,
    recovery_kraus: Vec<ComplexMatrix>,
}

impl StabilizerCode {
    pub fn new(generators: Vec<PauliString>, logical_x: PauliString, logical_z: PauliString) -> Result<Self> {
        let m = logical_x.len();
        if m == 0 || generators.is_empty() {
            return Err(Error::InvalidParameter("code needs qubits and generators".into()));
        }
        if generators.iter().chain([&logical_z]).any(|g| g.len() != m) {
            return Err(Error::DimensionMismatch("Pauli strings of different length".into()));
        }
        let dim = 1usize << m;
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow { size: dim, max: MAX_DIM });
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::InvalidParameter(format!("generators {a} and {b} anticommute")));
                }
            }
            if !a.commutes_with(&logical_x) || !a.commutes_with(&logical_z) {
                return Err(Error::InvalidParameter(format!("logical operator anticommutes with {a}")));
            }
        }
        if logical_x.commutes_with(&logical_z) {
            return Err(Error::InvalidParameter("logical X and Z must anticommute".into()));
        }
        if generators.len() + 1 != m {
            return Err(Error::InvalidParameter(format!(
                "{} generators on {m} qubits do not leave exactly one logical qubit",
                generators.len()
            )));
        }

        let gmats: Vec<ComplexMatrix> = generators.iter().map(PauliString::matrix).collect();
        let eye = identity(dim);
        let half = c64(0.5, 0.0);
        let syndrome_projector = |s: usize| {
            let g = gmats.len();
            gmats.iter().enumerate().fold(eye.clone(), |acc, (j, gm)| {
                let sign = if (s >> (g - 1 - j)) & 1 == 1 { -1.0 } else { 1.0 };
                acc * ((&eye + gm * c64(sign, 0.0)) * half)
            })
        };
        let code_projector = syndrome_projector(0);

        let zl = logical_z.matrix();
        let plus_z = (&eye + &zl) * half;
        let zero_l = (0..dim)
            .map(|b| {
                let mut e = ComplexVector::zeros(dim);
                e[b] = c64(1.0, 0.0);
                &code_projector * (&plus_z * e)
            })
            .find(|v| v.norm() > 1e-6)
            .ok_or_else(|| Error::InvalidParameter("empty codespace".into()))?;
        let zero_l = &zero_l / c64(zero_l.norm(), 0.0);
        let one_l = logical_x.matrix() * &zero_l;
        let mut v = zeros(dim, 2);
        v.set_column(0, &zero_l);
        v.set_column(1, &one_l);
        let encoder = Isometry::new(v)?;

        let n_syndromes = 1usize << generators.len();
        let mut corrections: Vec<Option<PauliString>> = vec![None; n_syndromes];
        'search: for weight in 0..=m {
            for p in paulis_of_weight(m, weight) {
                let s = syndrome_of(&generators, &p);
                if corrections[s].is_none() {
                    corrections[s] = Some(p);
                }
                if corrections.iter().all(Option::is_some) {
                    break 'search;
                }
            }
        }
        let corrections: Vec<PauliString> =
            corrections.into_iter().map(|c| c.expect("every syndrome is reachable")).collect();
        let recovery_kraus = corrections.iter().enumerate().map(|(s, u)| u.matrix() * syndrome_projector(s)).collect();
        Ok(Self { generators, logical_x, logical_z, encoder, corrections, recovery_kraus })
    }

    pub fn n_logical(&self) -> usize {
        1
    }

    pub fn m_physical(&self) -> usize {
        self.logical_x.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn encoder(&self) -> &Isometry {
        &self.encoder
    }

    pub fn corrections(&self) -> &[PauliString] {
        &self.corrections
    }

    pub fn recovery_kraus(&self) -> &[ComplexMatrix] {
        &self.recovery_kraus
    }

    pub fn recovery(&self) -> QuantumChannel {
        QuantumChannel::from_kraus(self.recovery_kraus.clone()).expect("syndrome projectors resolve the identity")
    }

    pub fn syndrome(&self, p: &PauliString) -> usize {
        syndrome_of(&self.generators, p)
    }

    /// Projector onto the codespace, `V V†`.
    pub fn code_projector(&self) -> ComplexMatrix {
        let v = self.encoder.matrix();
        v * v.adjoint()
    }

    fn recover(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = zeros(x.nrows(), x.ncols());
        for k in &self.recovery_kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    fn encode(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = self.encoder.matrix();
        v * x * v.adjoint()
    }

    fn logical_basis(&self) -> Vec<(usize, ComplexMatrix)> {
        let mut out = Vec::with_capacity(4);
        for j in 0..2 {
            for i in 0..2 {
                let mut e = zeros(2, 2);
                e[(i, j)] = c64(1.0, 0.0);
                out.push((j * 2 + i, e));
            }
        }
        out
    }
}

fn syndrome_of(generators: &[PauliString], p: &PauliString) -> usize {
    generators.iter().fold(0, |acc, g| (acc << 1) | usize::from(!g.commutes_with(p)))
}

/// Pauli strings of exactly the given weight, in lexicographic site and label order.
fn paulis_of_weight(m: usize, weight: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    let mut current = vec![Pauli::I; m];
    fn rec(start: usize, left: usize, current: &mut Vec<Pauli>, out: &mut Vec<PauliString>) {
        if left == 0 {
            out.push(PauliString(current.clone()));
            return;
        }
        for site in start..current.len() {
            for p in Pauli::NONTRIVIAL {
                current[site] = p;
                rec(site + 1, left - 1, current, out);
                current[site] = Pauli::I;
            }
        }
    }
    rec(0, weight, &mut current, &mut out);
    out
}

/// The `[[5,1,3]]` code with generators `XZZXI` and its cyclic shifts.
pub fn five_qubit_code() -> StabilizerCode {
    let g: PauliString = "XZZXI".parse().expect("valid Pauli label");
    let generators = (0..4).map(|k| g.rotate(k)).collect();
    StabilizerCode::new(generators, "XXXXX".parse().unwrap(), "ZZZZZ".parse().unwrap())
        .expect("five-qubit code is well formed")
}

/// Three-qubit bit-flip code, generators `ZZI` and `IZZ`.
pub fn bit_flip_code() -> StabilizerCode {
    StabilizerCode::new(
        vec!["ZZI".parse().unwrap(), "IZZ".parse().unwrap()],
        "XXX".parse().unwrap(),
        "ZZZ".parse().unwrap(),
    )
    .expect("bit-flip code is well formed")
}

/// Frobenius residuals of `R∘V = V` and `R∘T^{⊕m}∘V = m V` as superoperators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeConditions {
    pub recovery_residual: f64,
    pub correction_residual: f64,
}

/// `T^{⊕m}` is the local sum `Σ_i id ⊗ … ⊗ T ⊗ … ⊗ id`, not a tensor power.
pub fn verify_code_conditions(code: &StabilizerCode, t: &QuantumChannel) -> Result<CodeConditions> {
    if t.d_in() != 2 || t.d_out() != 2 {
        return Err(Error::DimensionMismatch("noise must act on a single qubit".into()));
    }
    let m = code.m_physical();
    let local: Vec<Vec<ComplexMatrix>> = (0..m).map(|site| crate::channels::embedded_kraus(t, site, m)).collect();
    let mut recovery = 0.0;
    let mut correction = 0.0;
    for (_, e) in code.logical_basis() {
        let x = code.encode(&e);
        let fixed = code.recover(&x);
        recovery += frobenius(&(&fixed - &x)).powi(2);
        let mut noisy = zeros(x.nrows(), x.ncols());
        for kraus in &local {
            for k in kraus {
                noisy += k * &x * k.adjoint();
            }
        }
        let corrected = code.recover(&noisy);
        correction += frobenius(&(corrected - &x * c64(m as f64, 0.0))).powi(2);
    }
    Ok(CodeConditions { recovery_residual: recovery.sqrt(), correction_residual: correction.sqrt() })
}

/// `L_c = r(R − id)` on the physical register.
pub fn coding_liouvillian(code: &StabilizerCode, r: f64) -> Result<Liouvillian> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("rate {r} must be finite and non-negative")));
    }
    Liouvillian::from_channel(&code.recovery())?.scaled(r)
}

/// `L^{⊕m} + r(R − id)` acting on `2^m × 2^m` matrices without forming its superoperator.
struct CodingGenerator<'a> {
    hamiltonian: ComplexMatrix,
    jumps: Vec<(ComplexMatrix, ComplexMatrix)>,
    code: &'a StabilizerCode,
    r: f64,
}

impl<'a> CodingGenerator<'a> {
    fn new(code: &'a StabilizerCode, noise: &Liouvillian, r: f64) -> Self {
        let m = code.m_physical();
        let d = noise.d();
        let dim = 1usize << m;
        let mut hamiltonian = zeros(dim, dim);
        let mut jumps = Vec::new();
        for site in 0..m {
            hamiltonian += embed(noise.hamiltonian(), d, site, m);
            for a in noise.lindblad_ops() {
                let big = embed(a, d, site, m);
                let ada = big.adjoint() * &big;
                jumps.push((big, ada));
            }
        }
        Self { hamiltonian, jumps, code, r }
    }

    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let h = &self.hamiltonian;
        let mut out = (h * x - x * h) * c64(0.0, -1.0);
        for (a, ada) in &self.jumps {
            out += a * x * a.adjoint() - (ada * x + x * ada) * c64(0.5, 0.0);
        }
        if self.r != 0.0 {
            out += (self.code.recover(x) - x) * c64(self.r, 0.0);
        }
        out
    }
}

/// Orthonormal basis `Q` of the smallest generator-invariant subspace containing
/// the encoded operators, and the restriction `Q† G Q`.
struct InvariantSubspace {
    basis: Vec<ComplexVector>,
    restricted: ComplexMatrix,
}

const KRYLOV_DROP: f64 = 1e-9;
const KRYLOV_RESIDUAL: f64 = 1e-8;

fn invariant_subspace(gen: &CodingGenerator<'_>, start: &[ComplexMatrix]) -> Result<InvariantSubspace> {
    let dim = start[0].nrows();
    let n = dim * dim;
    let mut basis: Vec<ComplexVector> = Vec::new();
    let push = |basis: &mut Vec<ComplexVector>, mut w: ComplexVector, scale: f64| {
        for _ in 0..2 {
            for q in basis.iter() {
                let c = q.dotc(&w);
                w -= q * c;
            }
        }
        let norm = w.norm();
        if norm > KRYLOV_DROP * scale.max(f64::MIN_POSITIVE) {
            basis.push(w / c64(norm, 0.0));
        }
    };
    for s in start {
        let v = vectorize(s);
        let scale = v.norm();
        push(&mut basis, v, scale);
    }
    let mut images: Vec<ComplexVector> = Vec::new();
    let mut k = 0;
    while k < basis.len() {
        if basis.len() > n {
            return Err(Error::NoConvergence);
        }
        let gq = vectorize(&gen.apply(&unvectorize(&basis[k], dim, dim)));
        let scale = gq.norm();
        images.push(gq.clone());
        push(&mut basis, gq, scale);
        k += 1;
    }
    let q = ComplexMatrix::from_columns(&basis);
    let gq = ComplexMatrix::from_columns(&images);
    let restricted = q.adjoint() * &gq;
    let residual = frobenius(&(&gq - &q * &restricted));
    if residual > KRYLOV_RESIDUAL * frobenius(&gq).max(1.0) {
        return Err(Error::NoConvergence);
    }
    Ok(InvariantSubspace { basis, restricted })
}

const LEAKAGE_TOL: f64 = 1e-6;

/// `Λ(ρ) = V† R(e^{t(L^{⊕m} + L_c)}(V ρ V†)) V` with `L_c = r(R − id)`.
///
/// The evolution is computed on the invariant operator subspace generated from
/// the encoded basis (64-dimensional for the five-qubit code), so the
/// `4^m`-dimensional superoperator is never exponentiated.
pub fn logical_channel(code: &StabilizerCode, noise: &Liouvillian, t: f64, r: f64) -> Result<QuantumChannel> {
    if noise.d() != 2 {
        return Err(Error::DimensionMismatch("noise generator must act on one qubit".into()));
    }
    for (name, x) in [("t", t), ("r", r)] {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} = {x} must be finite and non-negative")));
        }
    }
    let gen = CodingGenerator::new(code, noise, r);
    let inputs: Vec<(usize, ComplexMatrix)> = code.logical_basis();
    let encoded: Vec<ComplexMatrix> = inputs.iter().map(|(_, e)| code.encode(e)).collect();
    let sub = invariant_subspace(&gen, &encoded)?;
    let prop = expm_scaled(&sub.restricted, t)?;
    let q = ComplexMatrix::from_columns(&sub.basis);
    let dim = encoded[0].nrows();
    let p = code.code_projector();
    let v = code.encoder.matrix();

    let mut superop = zeros(4, 4);
    for ((col, _), x) in inputs.iter().zip(&encoded) {
        let coeffs = q.adjoint() * vectorize(x);
        let evolved = unvectorize(&(&q * (&prop * coeffs)), dim, dim);
        let y = code.recover(&evolved);
        let leak = frobenius(&(&y - &p * &y * &p));
        if leak > LEAKAGE_TOL {
            return Err(Error::Leakage(leak));
        }
        let logical = v.adjoint() * &y * v;
        superop.set_column(*col, &vectorize(&logical));
    }
    QuantumChannel::from_superop(&superop, 2, 2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaCheck {
    pub f_e: f64,
    pub f_bound: f64,
    pub pass: bool,
}

/// Compares the entanglement fidelity of the logical channel with `f(mt, r/m)`.
///
/// Writing the encoded evolution as `α V + (1 − α) S`, linearity of the
/// entanglement fidelity gives `F_e ≥ α`, and `α ≥ f(mt, r/m)`.
pub fn alpha_lower_bound_check(code: &StabilizerCode, noise: &QuantumChannel, t: f64, r: f64) -> Result<AlphaCheck> {
    let l = Liouvillian::from_channel(noise)?;
    let lambda = logical_channel(code, &l, t, r)?;
    let f_e = entanglement_fidelity(&lambda)?;
    let m = code.m_physical() as f64;
    let f_bound = f_closed_form(m * t, r / m);
    Ok(AlphaCheck { f_e, f_bound, pass: f_e >= f_bound - 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_qubit_syndromes_are_distinct() {
        let code = five_qubit_code();
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(code.syndrome(&PauliString::identity(5)));
        for site in 0..5 {
            for p in Pauli::NONTRIVIAL {
                assert!(seen.insert(code.syndrome(&PauliString::single(5, site, p))));
            }
        }
        assert_eq!(seen.len(), 16);
        assert!(code.corrections().iter().all(|c| c.weight() <= 1));
    }

    #[test]
    fn rejects_anticommuting_generators() {
        let r = StabilizerCode::new(vec!["XI".parse().unwrap()], "ZZ".parse().unwrap(), "XX".parse().unwrap());
        assert!(r.is_err());
    }

    #[test]
    fn logical_channel_at_zero_time_is_identity() {
        let code = five_qubit_code();
        let l = Liouvillian::from_channel(&QuantumChannel::pauli_depolarizing()).unwrap();
        let lam = logical_channel(&code, &l, 0.0, 10.0).unwrap();
        assert!((entanglement_fidelity(&lam).unwrap() - 1.0).abs() < 1e-12);
    }
}
