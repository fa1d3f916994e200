//! Closed-form capacity bounds for semigroups and the PPT-time certificate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channels::superop_to_choi;
use crate::entropy::{shannon, von_neumann};
use crate::linalg::{
    frobenius, herm_eigvals, min_eigenvalue, partial_trace, partial_transpose, ComplexMatrix, DensityMatrix,
};
use crate::lindblad::Liouvillian;
use crate::{Error, Result};

/// A named bound with the parameters it was evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    /// Bits per channel use.
    pub value: f64,
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    /// `(k, value_k)` pairs when the bound is a maximum over a scan.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scan: Vec<(usize, f64)>,
}

impl BoundReport {
    fn new(name: &str, value: f64, params: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_string(),
            value,
            parameters: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            certificate: None,
            scan: Vec::new(),
        }
    }
}

fn check_non_negative(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {x} must be finite and non-negative")));
    }
    Ok(())
}

/// `log₂ d − (1 − e^{−rt}) S(ρ₀)` for the generator depolarizing onto `ρ₀`.
pub fn unitary_upper_bound_depolarizing(r: f64, t: f64, rho0: &DensityMatrix) -> Result<BoundReport> {
    check_non_negative("r", r)?;
    check_non_negative("t", t)?;
    let d = rho0.dim();
    let s = von_neumann(rho0)?;
    let value = (d as f64).log2() - (1.0 - (-r * t).exp()) * s;
    Ok(BoundReport::new(
        "unitary_upper_bound_depolarizing",
        value,
        &[("r", r), ("t", t), ("d", d as f64), ("S(rho0)", s)],
    ))
}

/// `e^{−rt} log₂ d`, the previous bound at `ρ₀ = I/d`.
pub fn cd_upper_bound(r: f64, t: f64, d: usize) -> Result<BoundReport> {
    check_non_negative("r", r)?;
    check_non_negative("t", t)?;
    let value = (-r * t).exp() * (d as f64).log2();
    Ok(BoundReport::new("cd_upper_bound", value, &[("r", r), ("t", t), ("d", d as f64)]))
}

/// Coherent information `S(B) − S(A'B)` of a normalized Choi matrix.
pub fn choi_coherent_information(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<f64> {
    let b = partial_trace(choi, &[d_in, d_out], &[1])?;
    Ok(shannon(&herm_eigvals(&b)?) - shannon(&herm_eigvals(choi)?))
}

/// `I(ω, e^{sL})` evaluated from the propagator without a Kraus decomposition.
fn coherent_information_at(l: &Liouvillian, s: f64) -> Result<f64> {
    let d = l.d();
    let choi = superop_to_choi(&l.propagator(s)?, d, d)?;
    choi_coherent_information(&crate::linalg::hermitian_part(&choi), d, d)
}

/// `δ_k = log₂ d − I(ω, e^{(t/k)L})`.
pub fn delta_k(l: &Liouvillian, t: f64, k: usize) -> Result<f64> {
    check_non_negative("t", t)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Ok((l.d() as f64).log2() - coherent_information_at(l, t / k as f64)?)
}

pub const DEFAULT_K_MAX: usize = 256;

/// Lower bound from a fixed point `ρ₀`, maximized over `k = 1..=k_max`:
/// `I(ω, T_{t/k}) (log d − S(ρ₀)) / (log d − S(ρ₀) + k δ_k (1 + c))`.
pub fn lower_bound_fixed_point(
    l: &Liouvillian,
    t: f64,
    rho0: &DensityMatrix,
    k_max: usize,
    c: f64,
) -> Result<BoundReport> {
    check_non_negative("t", t)?;
    check_non_negative("c", c)?;
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    if rho0.dim() != l.d() {
        return Err(Error::DimensionMismatch("fixed point and generator dimensions differ".into()));
    }
    let residual = frobenius(&l.apply(rho0.matrix())?);
    if residual > 1e-8 {
        return Err(Error::NotFixedPoint(residual));
    }
    let log_d = (l.d() as f64).log2();
    let s = von_neumann(rho0)?;
    let gap = log_d - s;
    if gap <= 1e-12 {
        return Err(Error::InvalidParameter("fixed point is maximally mixed; the bound degenerates to zero".into()));
    }
    let mut scan = Vec::with_capacity(k_max);
    let mut best = (1, f64::NEG_INFINITY, 0.0);
    for k in 1..=k_max {
        let icoh = coherent_information_at(l, t / k as f64)?;
        let dk = log_d - icoh;
        let value = icoh * gap / (gap + k as f64 * dk * (1.0 + c));
        scan.push((k, value));
        if value > best.1 {
            best = (k, value, dk);
        }
    }
    let mut report = BoundReport::new(
        "lower_bound_fixed_point",
        best.1,
        &[("t", t), ("c", c), ("k", best.0 as f64), ("k_max", k_max as f64), ("S(rho0)", s), ("delta_k", best.2)],
    );
    report.scan = scan;
    Ok(report)
}

/// Smallest time after which `e^{tL}` has a PPT Choi matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptTime {
    pub t: f64,
    /// Minimum eigenvalue of the partially transposed Choi matrix at `t − 1e-4`.
    pub min_eig_before: f64,
    /// The same at `t + 1e-4`.
    pub min_eig_after: f64,
}

/// Minimum eigenvalue of the partially transposed Choi matrix of `e^{tL}`.
pub fn ppt_margin(l: &Liouvillian, t: f64) -> Result<f64> {
    let d = l.d();
    let choi = superop_to_choi(&l.propagator(t)?, d, d)?;
    min_eigenvalue(&crate::linalg::hermitian_part(&partial_transpose(&choi, &[d, d], &[1])?))
}

const PPT_TOL: f64 = -1e-9;
const PPT_GRID: usize = 200;

pub fn ppt_time(l: &Liouvillian, t_max: f64) -> Result<PptTime> {
    check_non_negative("t_max", t_max)?;
    let is_ppt = |t: f64| -> Result<bool> { Ok(ppt_margin(l, t)? >= PPT_TOL) };
    if !is_ppt(t_max)? {
        return Err(Error::NeverPpt(t_max));
    }
    let grid: Vec<f64> = (0..=PPT_GRID).map(|i| t_max * i as f64 / PPT_GRID as f64).collect();
    let mut last_npt = None;
    for (i, &t) in grid.iter().enumerate() {
        if !is_ppt(t)? {
            last_npt = Some(i);
        }
    }
    let Some(i) = last_npt else {
        let margin = ppt_margin(l, 0.0)?;
        return Ok(PptTime { t: 0.0, min_eig_before: margin, min_eig_after: margin });
    };
    let (mut lo, mut hi) = (grid[i], grid[i + 1]);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if is_ppt(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PptTime {
        t: hi,
        min_eig_before: ppt_margin(l, (hi - 1e-4).max(0.0))?,
        min_eig_after: ppt_margin(l, hi + 1e-4)?,
    })
}
