//! Lindblad generators and the channels they generate.
//!
//! Superoperators act on column-stacked vectors, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)` and
//!
//! ```text
//! S = −i(I⊗H − Hᵀ⊗I) + Σ_k (Ā_k⊗A_k − ½ I⊗A_k†A_k − ½ (A_k†A_k)ᵀ⊗I)
//! ```

use serde::{Deserialize, Serialize};

use crate::channels::{add_kron_conj, QuantumChannel};
use crate::io::MatrixJson;
use crate::linalg::{
    c64, embed, expm_scaled, frobenius, herm_eig, hermitian_part, hermiticity_defect, identity, max_abs, trace,
    unvectorize, vectorize, zeros, ComplexMatrix, DensityMatrix,
};
use crate::{Error, Result};

/// Largest Hilbert-space dimension for which a generator is materialized.
pub const MAX_DIM: usize = 32;

const HERMITIAN_TOL: f64 = 1e-9;
const FIXED_POINT_TOL: f64 = 1e-8;

/// A time-independent generator `L(ρ) = −i[H,ρ] + Σ_k (A_k ρ A_k† − ½{A_k†A_k, ρ})`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    d: usize,
    h: ComplexMatrix,
    lindblad_ops: Vec<ComplexMatrix>,
    superop: ComplexMatrix,
}

impl Liouvillian {
    pub fn build(h: ComplexMatrix, lindblad_ops: Vec<ComplexMatrix>) -> Result<Self> {
        if !h.is_square() || h.nrows() == 0 {
            return Err(Error::DimensionMismatch("Hamiltonian must be square and non-empty".into()));
        }
        let d = h.nrows();
        if d > MAX_DIM {
            return Err(Error::DimensionOverflow { size: d, max: MAX_DIM });
        }
        let defect = hermiticity_defect(&h);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        if lindblad_ops.iter().any(|a| a.shape() != (d, d)) {
            return Err(Error::DimensionMismatch(format!("Lindblad operators must be {d}x{d}")));
        }
        let h = hermitian_part(&h);
        let superop = assemble(&h, &lindblad_ops);
        Ok(Self { d, h, lindblad_ops, superop })
    }

    pub fn zero(d: usize) -> Result<Self> {
        Self::build(zeros(d, d), Vec::new())
    }

    /// `L = T − id`, with the Kraus operators of `T` as jump operators.
    pub fn from_channel(t: &QuantumChannel) -> Result<Self> {
        if t.d_in() != t.d_out() {
            return Err(Error::DimensionMismatch(format!("generator from a {}→{} channel", t.d_in(), t.d_out())));
        }
        Self::build(zeros(t.d_in(), t.d_in()), t.kraus().to_vec())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad_ops
    }

    pub fn superop(&self) -> &ComplexMatrix {
        &self.superop
    }

    /// `L(x)` for an arbitrary `d×d` matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.d, self.d) {
            return Err(Error::DimensionMismatch(format!("generator acts on {0}x{0} matrices", self.d)));
        }
        Ok(unvectorize(&(&self.superop * vectorize(x)), self.d, self.d))
    }

    /// `c·L` for `c ≥ 0`: jump operators scale by `√c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("generator scale {c} must be finite and non-negative")));
        }
        let s = c64(c.sqrt(), 0.0);
        Ok(Self {
            d: self.d,
            h: &self.h * c64(c, 0.0),
            lindblad_ops: self.lindblad_ops.iter().map(|a| a * s).collect(),
            superop: &self.superop * c64(c, 0.0),
        })
    }

    /// `L₁ + L₂`: Hamiltonians add and jump operators are concatenated.
    pub fn plus(&self, other: &Liouvillian) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("adding generators of different dimension".into()));
        }
        let mut ops = self.lindblad_ops.clone();
        ops.extend(other.lindblad_ops.iter().cloned());
        Ok(Self { d: self.d, h: &self.h + &other.h, lindblad_ops: ops, superop: &self.superop + &other.superop })
    }

    /// Superoperator of `e^{tL}`.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("evolution time {t} must be finite and non-negative")));
        }
        expm_scaled(&self.superop, t)
    }

    /// The channel `e^{tL}`.
    pub fn semigroup_channel(&self, t: f64) -> Result<QuantumChannel> {
        QuantumChannel::from_superop(&self.propagator(t)?, self.d, self.d)
    }

    /// `Σ_i id ⊗ … ⊗ L ⊗ … ⊗ id` on `m` copies.
    pub fn local_sum(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("local sum needs at least one site".into()));
        }
        let size = (self.d as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if size > MAX_DIM as u128 {
            return Err(Error::DimensionOverflow { size: size.min(usize::MAX as u128) as usize, max: MAX_DIM });
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let mut h = zeros(size as usize, size as usize);
        let mut ops = Vec::with_capacity(m * self.lindblad_ops.len());
        for site in 0..m {
            h += embed(&self.h, self.d, site, m);
            ops.extend(self.lindblad_ops.iter().map(|a| embed(a, self.d, site, m)));
        }
        Self::build(h, ops)
    }

    /// No Hamiltonian and only traceless jump operators, as stored.
    pub fn is_purely_dissipative(&self) -> bool {
        max_abs(&self.h) <= HERMITIAN_TOL && self.lindblad_ops.iter().all(|a| trace(a).norm() <= HERMITIAN_TOL)
    }

    /// Same generator with traceless jump operators.
    ///
    /// With `a_k = tr(A_k)/d` and `A_k' = A_k − a_k I`, the dissipator loses the
    /// term `(i/2) Σ_k [ā_k A_k' − a_k A_k'†, ρ]`, which is absorbed into `H`.
    pub fn normalized(&self) -> Result<Self> {
        let d = self.d;
        let eye = identity(d);
        let mut h = self.h.clone();
        let mut ops = Vec::with_capacity(self.lindblad_ops.len());
        for a in &self.lindblad_ops {
            let ak = trace(a) / c64(d as f64, 0.0);
            let shifted = a - &eye * ak;
            h += (&shifted * ak.conj() - shifted.adjoint() * ak) * c64(0.0, 0.5);
            if max_abs(&shifted) > 0.0 {
                ops.push(shifted);
            }
        }
        Self::build(hermitian_part(&h), ops)
    }

    /// Density matrices annihilated by the generator, spanning its stationary states.
    ///
    /// The null space of the superoperator is split into Hermitian elements and
    /// each is decomposed into positive and negative parts, which are fixed points
    /// on their own. The result is pruned to a linearly independent set, purest first.
    pub fn fixed_points(&self) -> Result<Vec<DensityMatrix>> {
        let d = self.d;
        let n = d * d;
        let svd = self.superop.clone().svd(false, true);
        let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
        let scale = svd.singular_values.max().max(1.0);
        let mut candidates = Vec::new();
        for (idx, &s) in svd.singular_values.iter().enumerate() {
            if s > 1e-9 * scale {
                continue;
            }
            let v = v_t.row(idx).adjoint();
            let x = unvectorize(&v, d, d);
            let herm = [hermitian_part(&x), hermitian_part(&(&x * c64(0.0, -1.0)))];
            for part in herm {
                if frobenius(&part) < 1e-8 {
                    continue;
                }
                let eig = herm_eig(&part)?;
                for sign in [1.0, -1.0] {
                    let p = eig.map(|l| if sign * l > 1e-12 { sign * l } else { 0.0 });
                    let tr = trace(&p).re;
                    if tr > 1e-8 {
                        candidates.push(p / c64(tr, 0.0));
                    }
                }
            }
        }
        let mut certified: Vec<(f64, ComplexMatrix)> = Vec::new();
        for c in candidates {
            let residual = frobenius(&self.apply(&c)?);
            if residual > FIXED_POINT_TOL {
                continue;
            }
            let purity = (&c * &c).trace().re;
            certified.push((purity, c));
        }
        certified.sort_by(|a, b| b.0.total_cmp(&a.0));

        let mut basis: Vec<crate::linalg::ComplexVector> = Vec::new();
        let mut out = Vec::new();
        for (_, c) in certified {
            let mut v = vectorize(&c);
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
            let norm = v.norm();
            if norm > 1e-6 * frobenius(&c) {
                basis.push(v / c64(norm, 0.0));
                out.push(DensityMatrix::new(hermitian_part(&c))?);
            }
            if basis.len() == n {
                break;
            }
        }
        if out.is_empty() {
            return Err(Error::NotFixedPoint(f64::NAN));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&LiouvillianJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<LiouvillianJson>(s)?.try_into()
    }
}

fn assemble(h: &ComplexMatrix, ops: &[ComplexMatrix]) -> ComplexMatrix {
    let d = h.nrows();
    let eye = identity(d);
    let mut s = zeros(d * d, d * d);
    add_kron_conj(&mut s, h, &eye, c64(0.0, -1.0));
    add_kron_conj(&mut s, &eye, h, c64(0.0, 1.0));
    for a in ops {
        let ada = a.adjoint() * a;
        add_kron_conj(&mut s, a, a, c64(1.0, 0.0));
        add_kron_conj(&mut s, &ada, &eye, c64(-0.5, 0.0));
        add_kron_conj(&mut s, &eye, &ada, c64(-0.5, 0.0));
    }
    s
}

/// `L(ρ) = r(tr(ρ)ρ₀ − ρ)`, realized as `r` times the replacement channel minus the identity.
pub fn depolarizing_liouvillian(r: f64, rho0: &DensityMatrix) -> Result<Liouvillian> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("rate {r} must be finite and non-negative")));
    }
    let d = rho0.dim();
    Liouvillian::from_channel(&QuantumChannel::replacement(rho0, d))?.scaled(r)
}

/// `e^{tL}` as a channel.
pub fn semigroup_channel(l: &Liouvillian, t: f64) -> Result<QuantumChannel> {
    l.semigroup_channel(t)
}

/// Piecewise-constant time-dependent generator.
#[derive(Clone, Debug)]
pub struct PiecewiseLiouvillian {
    segments: Vec<(f64, Liouvillian)>,
}

impl PiecewiseLiouvillian {
    pub fn new(segments: Vec<(f64, Liouvillian)>) -> Result<Self> {
        let Some((_, first)) = segments.first() else {
            return Err(Error::InvalidParameter("piecewise generator needs a segment".into()));
        };
        let d = first.d();
        for (dt, l) in &segments {
            if !(*dt >= 0.0) || !dt.is_finite() {
                return Err(Error::InvalidParameter(format!("segment duration {dt} must be non-negative")));
            }
            if l.d() != d {
                return Err(Error::DimensionMismatch("segments act on different dimensions".into()));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[(f64, Liouvillian)] {
        &self.segments
    }

    pub fn d(&self) -> usize {
        self.segments[0].1.d()
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|(dt, _)| dt).sum()
    }

    /// Superoperator of the time-ordered exponential.
    pub fn propagator(&self) -> Result<ComplexMatrix> {
        let n = self.d() * self.d();
        let mut acc = identity(n);
        for (dt, l) in &self.segments {
            acc = l.propagator(*dt)? * acc;
        }
        Ok(acc)
    }
}

/// Time-ordered exponential; later segments act after earlier ones.
pub fn evolve_piecewise(p: &PiecewiseLiouvillian) -> Result<QuantumChannel> {
    QuantumChannel::from_superop(&p.propagator()?, p.d(), p.d())
}

/// Wire format `{d, H, lindblad_ops}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiouvillianJson {
    pub d: usize,
    #[serde(rename = "H")]
    pub h: MatrixJson,
    pub lindblad_ops: Vec<MatrixJson>,
}

impl From<&Liouvillian> for LiouvillianJson {
    fn from(l: &Liouvillian) -> Self {
        Self {
            d: l.d,
            h: MatrixJson::from_matrix(&l.h),
            lindblad_ops: l.lindblad_ops.iter().map(MatrixJson::from_matrix).collect(),
        }
    }
}

impl TryFrom<LiouvillianJson> for Liouvillian {
    type Error = Error;

    fn try_from(j: LiouvillianJson) -> Result<Self> {
        let h = j.h.to_matrix()?;
        if h.shape() != (j.d, j.d) {
            return Err(Error::DimensionMismatch(format!("H must be {0}x{0}", j.d)));
        }
        let ops = j.lindblad_ops.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        Liouvillian::build(h, ops)
    }
}

impl Serialize for Liouvillian {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LiouvillianJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Liouvillian {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        LiouvillianJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;
    use crate::pauli::Pauli;
    use crate::rng::{random_density, random_hermitian, Rng};

    fn lowering() -> ComplexMatrix {
        crate::linalg::real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    #[test]
    fn zero_generator_is_identity() {
        let l = Liouvillian::zero(3).unwrap();
        let t = l.semigroup_channel(2.0).unwrap();
        assert!(max_abs(&(t.superop() - identity(9))) < 1e-12);
    }

    #[test]
    fn hamiltonian_only_is_unitary() {
        let mut rng = Rng::new(3);
        let h = random_hermitian(3, &mut rng);
        let l = Liouvillian::build(h.clone(), vec![]).unwrap();
        let rho = random_density(3, &mut rng);
        let out = l.semigroup_channel(0.7).unwrap().apply(&rho).unwrap();
        let u = crate::linalg::expm(&(&h * c64(0.0, -0.7))).unwrap();
        let want = &u * rho.matrix() * u.adjoint();
        assert!(max_abs(&(out.matrix() - want)) < 1e-10);
    }

    #[test]
    fn lowering_operator_gives_amplitude_damping() {
        let l = Liouvillian::build(zeros(2, 2), vec![lowering()]).unwrap();
        for t in [0.1, 1.0, 3.0] {
            let got = l.semigroup_channel(t).unwrap();
            let want = QuantumChannel::amplitude_damping(1.0 - (-t).exp()).unwrap();
            assert!(max_abs(&(got.superop() - want.superop())) < 1e-10);
        }
        let fp = l.fixed_points().unwrap();
        assert_eq!(fp.len(), 1);
        assert!(max_abs(&(fp[0].matrix() - diag(&[1.0, 0.0]))) < 1e-9);
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        assert!(matches!(Liouvillian::build(lowering(), vec![]), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn channel_generator_acts_on_paulis() {
        let l = Liouvillian::from_channel(&QuantumChannel::pauli_depolarizing()).unwrap();
        assert!(max_abs(&l.apply(&identity(2)).unwrap()) < 1e-12);
        for p in Pauli::NONTRIVIAL {
            let s = p.matrix();
            assert!(max_abs(&(l.apply(&s).unwrap() + &s * c64(4.0 / 3.0, 0.0))) < 1e-12);
        }
        let id = Liouvillian::from_channel(&QuantumChannel::identity(2)).unwrap();
        assert!(max_abs(id.superop()) < 1e-12);
    }

    #[test]
    fn depolarizing_matches_closed_form() {
        let mut rng = Rng::new(11);
        let rho0 = random_density(3, &mut rng);
        let r = 1.7;
        let l = depolarizing_liouvillian(r, &rho0).unwrap();
        let rho = random_density(3, &mut rng);
        for t in [0.0, 0.3, 2.0] {
            let out = l.semigroup_channel(t).unwrap().apply(&rho).unwrap();
            let e = (-r * t).exp();
            let want = rho0.matrix() * c64(1.0 - e, 0.0) + rho.matrix() * c64(e, 0.0);
            assert!(max_abs(&(out.matrix() - want)) < 1e-10);
        }
        let far = l.semigroup_channel(50.0).unwrap().apply(&rho).unwrap();
        assert!(far.trace_distance(&rho0) < 1e-9);
        let fp = l.fixed_points().unwrap();
        assert_eq!(fp.len(), 1);
        assert!(fp[0].trace_distance(&rho0) < 1e-8);
        assert!(depolarizing_liouvillian(-1.0, &rho0).is_err());
    }

    #[test]
    fn depolarizing_half_life() {
        let l = depolarizing_liouvillian(1.0, &DensityMatrix::maximally_mixed(2)).unwrap();
        let rho = DensityMatrix::basis(2, 0);
        let out = l.semigroup_channel(std::f64::consts::LN_2).unwrap().apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - diag(&[0.75, 0.25]))) < 1e-12);
    }

    #[test]
    fn semigroup_law_and_negative_time() {
        let mut rng = Rng::new(5);
        let t = QuantumChannel::random(3, 3, 2, &mut rng).unwrap();
        let l = Liouvillian::from_channel(&t).unwrap();
        let a = l.propagator(0.3).unwrap();
        let b = l.propagator(0.7).unwrap();
        let c = l.propagator(1.0).unwrap();
        assert!(max_abs(&(&b * &a - c)) < 1e-10);
        assert!(l.semigroup_channel(-0.1).is_err());
    }

    #[test]
    fn local_sum_tensor_factorizes() {
        let l = Liouvillian::build(diag(&[0.0, 0.4]), vec![lowering()]).unwrap();
        assert!(max_abs(&(l.local_sum(1).unwrap().superop() - l.superop())) < 1e-15);
        let l2 = l.local_sum(2).unwrap();
        let lhs = l2.semigroup_channel(0.8).unwrap();
        let e = l.semigroup_channel(0.8).unwrap();
        let rhs = e.tensor(&e);
        assert!(max_abs(&(lhs.superop() - rhs.superop())) < 1e-10);
        assert!(matches!(l.local_sum(6), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn piecewise_composes_in_time_order() {
        let l1 = Liouvillian::build(zeros(2, 2), vec![lowering()]).unwrap();
        let l2 = Liouvillian::build(Pauli::X.matrix(), vec![]).unwrap();
        let p = PiecewiseLiouvillian::new(vec![(0.4, l1.clone()), (0.9, l2.clone())]).unwrap();
        let got = evolve_piecewise(&p).unwrap();
        let manual = l2.semigroup_channel(0.9).unwrap().compose(&l1.semigroup_channel(0.4).unwrap()).unwrap();
        assert!(max_abs(&(got.superop() - manual.superop())) < 1e-10);
        assert!(PiecewiseLiouvillian::new(vec![(-1.0, l1)]).is_err());
    }

    #[test]
    fn dissipative_predicate_and_normalizer() {
        let h_only = Liouvillian::build(Pauli::Z.matrix(), vec![]).unwrap();
        assert!(!h_only.is_purely_dissipative());
        let x = Liouvillian::build(zeros(2, 2), vec![Pauli::X.matrix()]).unwrap();
        assert!(x.is_purely_dissipative());

        let mut rng = Rng::new(8);
        let a = crate::rng::ginibre(3, 3, &mut rng);
        let l = Liouvillian::build(random_hermitian(3, &mut rng), vec![a, identity(3)]).unwrap();
        let n = l.normalized().unwrap();
        assert!(n.lindblad_ops().iter().all(|a| trace(a).norm() < 1e-12));
        assert!(max_abs(&(n.superop() - l.superop())) < 1e-12);
    }

    #[test]
    fn hamiltonian_fixed_points_are_commutant() {
        let l = Liouvillian::build(diag(&[0.0, 1.0]), vec![]).unwrap();
        let fp = l.fixed_points().unwrap();
        assert_eq!(fp.len(), 2);
        for rho in &fp {
            assert!(frobenius(&l.apply(rho.matrix()).unwrap()) < 1e-8);
            assert!(rho.matrix()[(0, 1)].norm() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip() {
        let l = Liouvillian::build(diag(&[0.0, 0.5]), vec![lowering()]).unwrap();
        let back = Liouvillian::from_json(&l.to_json().unwrap()).unwrap();
        assert!(max_abs(&(back.superop() - l.superop())) < 1e-15);
        let bad = r#"{"d":2,"H":[[[0,0],[1,0]],[[0,0],[0,0]]],"lindblad_ops":[]}"#;
        assert!(Liouvillian::from_json(bad).is_err());
    }
}
