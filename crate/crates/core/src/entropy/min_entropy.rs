//! Conditional min-entropy by a primal-dual barrier method.
//!
//! Primal: minimize `tr σ` subject to `I_A ⊗ σ ⪰ ρ_AB`.
//! Dual: maximize `tr(ρ Y)` subject to `Y ⪰ 0`, `tr_A Y = I_B`.
//! `H_min(A|B) = −log₂` of the common optimum.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{c64, herm_eig, herm_eigvals, partial_trace, ComplexMatrix, DensityMatrix};
use crate::{Error, Result};

/// Largest `d_A · d_B` accepted by the solver.
pub const MAX_JOINT_DIM: usize = 64;
const GAP_TOL: f64 = 1e-8;
const MAX_OUTER: usize = 80;
const MAX_NEWTON: usize = 200;

#[derive(Clone, Debug)]
pub struct MinEntropySolution {
    /// `−log₂(tr σ)` at the returned primal point.
    pub value: f64,
    /// Optimal `σ_B` (primal feasible).
    pub sigma: ComplexMatrix,
    /// Feasible dual `Y` with `tr_A Y = I`.
    pub dual_certificate: ComplexMatrix,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
}

pub fn min_entropy(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    Ok(min_entropy_sdp(rho_ab, dims)?.value)
}

pub fn min_entropy_sdp(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<MinEntropySolution> {
    let [da, db] = dims;
    let n = da * db;
    if n != rho_ab.dim() {
        return Err(Error::DimensionMismatch(format!("bipartition {dims:?} of a {}-dimensional state", rho_ab.dim())));
    }
    if n > MAX_JOINT_DIM {
        return Err(Error::DimensionOverflow { size: n, max: MAX_JOINT_DIM });
    }
    let rho = rho_ab.matrix();
    let basis = hermitian_basis(db);
    let cost: DVector<f64> = DVector::from_iterator(basis.len(), basis.iter().map(|e| e.trace().re));

    let lmax = herm_eigvals(rho)?.first().copied().unwrap_or(0.0);
    let start = ComplexMatrix::identity(db, db) * c64(lmax + 1.0, 0.0);
    let mut x = DVector::from_iterator(basis.len(), basis.iter().map(|e| (e * &start).trace().re));

    let mut t = 1.0;
    let mut iterations = 0;
    let mut best: Option<MinEntropySolution> = None;
    for _ in 0..MAX_OUTER {
        for _ in 0..MAX_NEWTON {
            iterations += 1;
            let sigma = assemble(&basis, &x);
            let m = slack(&sigma, rho, da);
            let minv = pd_cholesky(m).ok_or(Error::NoConvergence)?.inverse();
            let g: Vec<ComplexMatrix> = basis.iter().map(|e| right_lift(&minv, e, da)).collect();
            let k = basis.len();
            let mut grad = DVector::zeros(k);
            let mut hess = DMatrix::zeros(k, k);
            for a in 0..k {
                grad[a] = t * cost[a] - g[a].trace().re;
                for b in 0..=a {
                    let h = trace_product(&g[a], &g[b]);
                    hess[(a, b)] = h;
                    hess[(b, a)] = h;
                }
            }
            let Some(dx) = solve_spd(&hess, &(-&grad)) else {
                break;
            };
            let decrement = -grad.dot(&dx);
            if decrement < 1e-14 {
                break;
            }
            let f0 = barrier(t, &cost, &x, &basis, rho, da).unwrap_or(f64::INFINITY);
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-12 {
                let trial = &x + &dx * alpha;
                if let Some(f) = barrier(t, &cost, &trial, &basis, rho, da) {
                    if f <= f0 - 0.25 * alpha * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved || decrement < 1e-10 {
                break;
            }
        }

        let sigma = assemble(&basis, &x);
        let m = slack(&sigma, rho, da);
        let minv = pd_cholesky(m).ok_or(Error::NoConvergence)?.inverse();
        let candidate = certify(&sigma, &minv, rho, da, db, iterations)?;
        let done = candidate.gap <= GAP_TOL;
        if best.as_ref().is_none_or(|b| candidate.gap < b.gap) {
            best = Some(candidate);
        }
        if done {
            break;
        }
        t *= 8.0;
    }
    let best = best.ok_or(Error::NoConvergence)?;
    if !(best.gap.abs() <= GAP_TOL) || !best.value.is_finite() {
        return Err(Error::Solver { gap: best.gap, iterations });
    }
    Ok(best)
}

/// Builds a feasible dual point from the barrier multiplier `M⁻¹` and returns both objectives.
fn certify(
    sigma: &ComplexMatrix,
    minv: &ComplexMatrix,
    rho: &ComplexMatrix,
    da: usize,
    db: usize,
    iterations: usize,
) -> Result<MinEntropySolution> {
    let x = partial_trace(minv, &[da, db], &[1])?;
    let eig = herm_eig(&x)?;
    if eig.values.last().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::NoConvergence);
    }
    let inv_sqrt = eig.map(|v| 1.0 / v.sqrt());
    let s = crate::linalg::kron(&ComplexMatrix::identity(da, da), &inv_sqrt);
    let y = &s * minv * &s;
    let dual = (rho * &y).trace().re;
    let primal = sigma.trace().re;
    Ok(MinEntropySolution {
        value: -primal.log2(),
        sigma: crate::linalg::hermitian_part(sigma),
        dual_certificate: crate::linalg::hermitian_part(&y),
        primal,
        dual,
        gap: primal - dual,
        iterations,
    })
}

/// Orthonormal (Hilbert–Schmidt) basis of `d×d` Hermitian matrices.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = c64(1.0, 0.0);
        out.push(e);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(i, j)] = c64(s, 0.0);
            re[(j, i)] = c64(s, 0.0);
            out.push(re);
            let mut im = ComplexMatrix::zeros(d, d);
            im[(i, j)] = c64(0.0, -s);
            im[(j, i)] = c64(0.0, s);
            out.push(im);
        }
    }
    out
}

fn assemble(basis: &[ComplexMatrix], x: &DVector<f64>) -> ComplexMatrix {
    let d = basis[0].nrows();
    let mut m = ComplexMatrix::zeros(d, d);
    for (e, &w) in basis.iter().zip(x.iter()) {
        m += e * c64(w, 0.0);
    }
    m
}

/// `I_A ⊗ σ − ρ`.
fn slack(sigma: &ComplexMatrix, rho: &ComplexMatrix, da: usize) -> ComplexMatrix {
    let db = sigma.nrows();
    let mut m = -rho.clone();
    for a in 0..da {
        for i in 0..db {
            for j in 0..db {
                m[(a * db + i, a * db + j)] += sigma[(i, j)];
            }
        }
    }
    m
}

/// `X (I_A ⊗ E)` using the block structure.
fn right_lift(x: &ComplexMatrix, e: &ComplexMatrix, da: usize) -> ComplexMatrix {
    let db = e.nrows();
    let n = x.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..da {
        let cols = x.columns(a * db, db);
        out.columns_mut(a * db, db).copy_from(&(cols * e));
    }
    out
}

/// `Re tr(A B)`.
fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (p, q) = (a[(i, j)], b[(j, i)]);
            s += p.re * q.re - p.im * q.im;
        }
    }
    s
}

fn barrier(
    t: f64,
    cost: &DVector<f64>,
    x: &DVector<f64>,
    basis: &[ComplexMatrix],
    rho: &ComplexMatrix,
    da: usize,
) -> Option<f64> {
    let m = slack(&assemble(basis, x), rho, da);
    let chol = pd_cholesky(m)?;
    let logdet: f64 = chol.l_dirty().diagonal().iter().map(|z| 2.0 * z.re.ln()).sum();
    Some(t * cost.dot(x) - logdet)
}

/// Cholesky factor of a Hermitian matrix, or `None` unless it is positive definite.
///
/// nalgebra takes complex square roots of negative pivots instead of failing,
/// so the diagonal of the factor has to be checked.
fn pd_cholesky(m: ComplexMatrix) -> Option<nalgebra::Cholesky<crate::linalg::C64, nalgebra::Dyn>> {
    let chol = m.cholesky()?;
    chol.l_dirty()
        .diagonal()
        .iter()
        .all(|z| z.re > 0.0 && z.re.is_finite() && z.im.abs() <= 1e-8 * z.re)
        .then_some(chol)
}

fn solve_spd(h: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(c) = h.clone().cholesky() {
        return Some(c.solve(rhs));
    }
    h.clone().lu().solve(rhs)
}
