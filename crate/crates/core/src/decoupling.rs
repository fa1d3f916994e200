//! Decoupling experiments, Uhlmann decoders and information–disturbance probes.
//!
//! The decoupling bound is checked with non-smooth min-entropies. Since the
//! smooth min-entropy is never smaller than the non-smooth one, the exponent
//! `−½H_min(A'|E)_σ − ½H_min(A|R)_ρ` dominates the smooth version at `ε → 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{Isometry, QuantumChannel};
use crate::entropy::min_entropy;
use crate::linalg::{c64, herm_eig, kron, trace_norm, zeros, ComplexMatrix, ComplexVector, DensityMatrix, PureState};
use crate::rng::{haar_unitary, Rng};
use crate::{Error, Result};

/// Largest channel input dimension for Monte-Carlo decoupling.
pub const MAX_INPUT_DIM: usize = 8;

/// Monte-Carlo estimate of the Haar-averaged decoupling distance
/// `‖(id ⊗ T^c∘U∘V)(ρ) − ρ^{R'} ⊗ σ^E‖₁`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecouplingRun {
    pub label: String,
    pub seed: u64,
    /// `[d_R', d_R, d_A, d_E]`.
    pub dims: [usize; 4],
    pub samples: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Standard error of the mean.
    pub std_err: f64,
}

/// `(id_{R'} ⊗ T^c∘U∘V)` on a state of `R' ⊗ R`, with the Kraus operators of `T^c` given.
fn apply_after(kraus: &[ComplexMatrix], map: &ComplexMatrix, rho: &ComplexMatrix, d_ref: usize) -> ComplexMatrix {
    let eye = ComplexMatrix::identity(d_ref, d_ref);
    let d_out = kraus[0].nrows();
    let mut out = zeros(d_ref * d_out, d_ref * d_out);
    for k in kraus {
        let big = kron(&eye, &(k * map));
        out += &big * rho * big.adjoint();
    }
    out
}

fn check_probe(rho: &DensityMatrix, d_r: usize) -> Result<usize> {
    if d_r == 0 || !rho.dim().is_multiple_of(d_r) {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional probe has no factor of dimension {d_r}",
            rho.dim()
        )));
    }
    Ok(rho.dim() / d_r)
}

pub fn decoupling_experiment(
    label: &str,
    t: &QuantumChannel,
    rho: &DensityMatrix,
    v: &Isometry,
    n: usize,
    rng: &Rng,
) -> Result<DecouplingRun> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let d_a = t.d_in();
    if d_a > MAX_INPUT_DIM {
        return Err(Error::DimensionOverflow { size: d_a, max: MAX_INPUT_DIM });
    }
    if v.d_to() != d_a {
        return Err(Error::DimensionMismatch(format!("encoder maps into {} but the channel takes {d_a}", v.d_to())));
    }
    let d_r = v.d_from();
    let d_rp = check_probe(rho, d_r)?;
    let comp = t.complementary();
    let d_e = comp.d_out();
    let sigma_e = comp.apply(&DensityMatrix::maximally_mixed(d_a))?;
    let rho_rp = rho.partial_trace(&[d_rp, d_r], &[0])?;
    let target = kron(rho_rp.matrix(), sigma_e.matrix());

    let samples: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut sub = rng.substream(i);
            let u = haar_unitary(d_a, &mut sub);
            let out = apply_after(comp.kraus(), &(u * v.matrix()), rho.matrix(), d_rp);
            trace_norm(&(out - &target))
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = if n > 1 { samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    Ok(DecouplingRun {
        label: label.to_string(),
        seed: rng.seed(),
        dims: [d_rp, d_r, d_a, d_e],
        min: samples.iter().copied().fold(f64::INFINITY, f64::min),
        max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        std_err: (var / n as f64).sqrt(),
        mean,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecouplingCheck {
    pub lhs_mean: f64,
    pub rhs: f64,
    /// `H_min(A'|E)` of the Choi state of the complementary channel.
    pub h_min_choi: f64,
    /// `H_min(A|R')` of the encoded probe.
    pub h_min_probe: f64,
    pub pass: bool,
}

/// `rhs = 2^{−½H_min(A'|E)_σ − ½H_min(A|R')_ρ}`; passes when the mean is within three standard errors.
pub fn decoupling_bound_check(
    run: &DecouplingRun,
    rho: &DensityMatrix,
    t: &QuantumChannel,
    v: &Isometry,
) -> Result<DecouplingCheck> {
    let comp = t.complementary();
    let (d_a, d_e) = (comp.d_in(), comp.d_out());
    let sigma = DensityMatrix::from_matrix_unchecked(comp.choi().clone());
    let h_min_choi = min_entropy(&sigma, [d_a, d_e])?;

    let d_r = v.d_from();
    let d_rp = check_probe(rho, d_r)?;
    let lift = kron(&ComplexMatrix::identity(d_rp, d_rp), v.matrix());
    let encoded = DensityMatrix::from_matrix_unchecked(&lift * rho.matrix() * lift.adjoint());
    let swapped = encoded.permute(&[d_rp, d_a], &[1, 0])?;
    let h_min_probe = min_entropy(&swapped, [d_a, d_rp])?;

    let rhs = 2f64.powf(-0.5 * h_min_choi - 0.5 * h_min_probe);
    let pass = run.mean <= rhs + 3.0 * run.std_err;
    Ok(DecouplingCheck { lhs_mean: run.mean, rhs, h_min_choi, h_min_probe, pass })
}

/// Decoder obtained by aligning purifications, with the quantities of its error bound.
#[derive(Clone, Debug)]
pub struct UhlmannDecoder {
    pub decoder: QuantumChannel,
    /// `‖(id ⊗ T^c)(ψ) − ψ^R ⊗ σ‖₁`.
    pub eps_measured: f64,
    /// `‖(id ⊗ D∘T)(ψ) − ψ‖₁`.
    pub achieved_error: f64,
    /// `2√(ε(1 − ε/4))`.
    pub bound: f64,
}

/// Builds `D(X) = tr_{E''}(W X W†)` for a pure probe on `R ⊗ A`.
///
/// `(1 ⊗ V)|ψ⟩` on `R B E` and `|ψ⟩ ⊗ |s⟩` on `R A E E''` (with `|s⟩` purifying
/// `σ_target`) both purify states on `R E`. With `M = Θ†Φ = X S Y†`, the
/// isometry `W = conj(X Y†)` from `B` to `A E''` maximizes their overlap.
pub fn uhlmann_decoder(t: &QuantumChannel, sigma_target: &DensityMatrix, probe: &PureState) -> Result<UhlmannDecoder> {
    let (d_a, d_b, d_e) = (t.d_in(), t.d_out(), t.env_dim());
    if sigma_target.dim() != d_e {
        return Err(Error::DimensionMismatch(format!(
            "target environment state has dimension {}, channel environment {d_e}",
            sigma_target.dim()
        )));
    }
    if !probe.dim().is_multiple_of(d_a) {
        return Err(Error::DimensionMismatch("probe has no channel-input factor".into()));
    }
    let d_r = probe.dim() / d_a;
    if d_r * d_b * d_e > 4096 {
        return Err(Error::DimensionOverflow { size: d_r * d_b * d_e, max: 4096 });
    }
    let d_epp = d_e.max(d_b.div_ceil(d_a));

    // |s⟩ = Σ_k √λ_k |v_k⟩_E |k⟩_{E''}, zero-padded to d_E''.
    let eig = herm_eig(sigma_target.matrix())?;
    let s = ComplexMatrix::from_fn(d_e, d_epp, |e, k| {
        if k < d_e {
            eig.vectors[(e, k)] * c64(eig.values[k].max(0.0).sqrt(), 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });

    let stine = t.stinespring();
    let vm = stine.matrix();
    let psi = probe.amplitudes();
    // Φ[(r,e), b] = Σ_a ψ[r,a] V[(b,e), a]
    let phi = ComplexMatrix::from_fn(d_r * d_e, d_b, |re, b| {
        let (r, e) = (re / d_e, re % d_e);
        (0..d_a).map(|a| psi[r * d_a + a] * vm[(b * d_e + e, a)]).sum()
    });
    // Θ[(r,e), (a,e'')] = ψ[r,a] s[e,e'']
    let theta = ComplexMatrix::from_fn(d_r * d_e, d_a * d_epp, |re, ae| {
        let (r, e) = (re / d_e, re % d_e);
        let (a, k) = (ae / d_epp, ae % d_epp);
        psi[r * d_a + a] * s[(e, k)]
    });
    let m = theta.adjoint() * &phi;
    let svd = m.svd(true, true);
    let x = svd.u.ok_or(Error::NoConvergence)?;
    let y_t = svd.v_t.ok_or(Error::NoConvergence)?;
    let w = orthonormalize_columns((x * y_t).conjugate());

    let kraus: Vec<ComplexMatrix> =
        (0..d_epp).map(|k| ComplexMatrix::from_fn(d_a, d_b, |a, b| w[(a * d_epp + k, b)])).collect();
    let decoder = QuantumChannel::from_kraus(kraus)?.compressed();

    let rho = probe.to_density();
    let comp = t.complementary();
    let out_re = comp.apply_local(&rho, &[d_r, d_a], 1)?;
    let rho_r = rho.partial_trace(&[d_r, d_a], &[0])?;
    let eps_measured = trace_norm(&(out_re.matrix() - kron(rho_r.matrix(), sigma_target.matrix())));

    let recovered = decoder.compose(t)?.apply_local(&rho, &[d_r, d_a], 1)?;
    let achieved_error = trace_norm(&(recovered.matrix() - rho.matrix()));
    let bound = 2.0 * (eps_measured * (1.0 - eps_measured / 4.0)).max(0.0).sqrt();
    Ok(UhlmannDecoder { decoder, eps_measured, achieved_error, bound })
}

/// Gram–Schmidt on the columns; directions that vanish are replaced by
/// standard basis vectors so the result is an isometry.
fn orthonormalize_columns(w: ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = w.shape();
    let mut out: Vec<ComplexVector> = Vec::with_capacity(cols);
    let mut spare = 0;
    for j in 0..cols {
        let mut v = w.column(j).into_owned();
        loop {
            for _ in 0..2 {
                for q in &out {
                    let c = q.dotc(&v);
                    v -= q * c;
                }
            }
            let norm = v.norm();
            if norm > 1e-8 {
                out.push(v / c64(norm, 0.0));
                break;
            }
            v = ComplexVector::zeros(rows);
            v[spare] = c64(1.0, 0.0);
            spare += 1;
        }
    }
    ComplexMatrix::from_columns(&out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InfoDisturbance {
    /// `‖(id ⊗ T^c)(ρ) − ρ^R ⊗ σ^E‖₁` with `σ^E` the exact environment marginal.
    pub forgetfulness: f64,
    /// `‖(id ⊗ D∘T)(ρ) − ρ‖₁`.
    pub decode_error: f64,
    /// `forgetfulness ≤ 2√decode_error`, evaluated only when `decode_error ≤ 1`.
    pub pass: Option<bool>,
}

pub fn information_disturbance_probe(
    t: &QuantumChannel,
    d: &QuantumChannel,
    probe: &DensityMatrix,
) -> Result<InfoDisturbance> {
    let d_a = t.d_in();
    if d.d_in() != t.d_out() || d.d_out() != d_a {
        return Err(Error::DimensionMismatch("decoder must map the channel output back to its input".into()));
    }
    let d_r = check_probe(probe, d_a)?;
    let comp = t.complementary();
    let d_e = comp.d_out();
    let out_re = comp.apply_local(probe, &[d_r, d_a], 1)?;
    let rho_r = out_re.partial_trace(&[d_r, d_e], &[0])?;
    let sigma_e = out_re.partial_trace(&[d_r, d_e], &[1])?;
    let forgetfulness = trace_norm(&(out_re.matrix() - kron(rho_r.matrix(), sigma_e.matrix())));
    let recovered = d.compose(t)?.apply_local(probe, &[d_r, d_a], 1)?;
    let decode_error = trace_norm(&(recovered.matrix() - probe.matrix()));
    let pass = (decode_error <= 1.0).then(|| forgetfulness <= 2.0 * decode_error.sqrt() + 1e-8);
    Ok(InfoDisturbance { forgetfulness, decode_error, pass })
}

/// One member of the fixed decoupling suite.
pub struct SuiteInstance {
    pub label: String,
    pub channel: QuantumChannel,
    /// Pure probe on `R' ⊗ R`.
    pub probe: PureState,
    pub encoder: Isometry,
}

impl SuiteInstance {
    pub fn probe_density(&self) -> DensityMatrix {
        self.probe.to_density()
    }

    /// `(1 ⊗ V)|ψ⟩` on `R' ⊗ A`.
    pub fn encoded_probe(&self) -> Result<PureState> {
        let d_rp = self.probe.dim() / self.encoder.d_from();
        let lift = kron(&ComplexMatrix::identity(d_rp, d_rp), self.encoder.matrix());
        PureState::normalized(lift * self.probe.amplitudes())
    }
}

/// Ten (channel, probe) pairs with channel inputs of dimension 2 or 4.
pub fn decoupling_suite(seed: u64) -> Result<Vec<SuiteInstance>> {
    let mut rng = Rng::new(seed);
    let omega2 = PureState::maximally_entangled(2);
    let omega4 = PureState::maximally_entangled(4);
    let id2 = Isometry::identity(2);
    let id4 = Isometry::identity(4);
    let hadamard = crate::linalg::real_matrix(2, 2, &[1.0, 1.0, 1.0, -1.0]) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ad = QuantumChannel::amplitude_damping;
    let mut out: Vec<SuiteInstance> = vec![
        ("depolarizing-0.5", QuantumChannel::qubit_depolarizing(0.5)?, omega2.clone(), id2.clone()),
        ("depolarizing-0.9", QuantumChannel::qubit_depolarizing(0.9)?, omega2.clone(), id2.clone()),
        ("amplitude-damping-0.3", ad(0.3)?, omega2.clone(), id2.clone()),
        ("completely-depolarizing-2", QuantumChannel::completely_depolarizing(2), omega2.clone(), id2.clone()),
        ("hadamard", QuantumChannel::unitary(&hadamard)?, omega2.clone(), id2.clone()),
        ("pauli-depolarizing", QuantumChannel::pauli_depolarizing(), omega2.clone(), id2),
        ("random-4-2", QuantumChannel::random(4, 4, 2, &mut rng)?, omega4.clone(), id4.clone()),
        ("random-4-3", QuantumChannel::random(4, 4, 3, &mut rng)?, omega4.clone(), id4.clone()),
        ("amplitude-damping-pair", ad(0.4)?.tensor(&ad(0.2)?), omega4, id4),
    ]
    .into_iter()
    .map(|(l, c, p, e)| SuiteInstance { label: l.to_string(), channel: c, probe: p, encoder: e })
    .collect();
    let v = Isometry::new(crate::rng::haar_isometry(2, 4, &mut rng))?;
    out.push(SuiteInstance {
        label: "random-4-2-encoded".into(),
        channel: QuantumChannel::random(4, 4, 2, &mut rng)?,
        probe: omega2,
        encoder: v,
    });
    Ok(out)
}
