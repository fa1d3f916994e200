//! Dense complex linear algebra shared by every other module.
//!
//! Matrices are `nalgebra` dense matrices over `Complex<f64>`. Composite
//! systems follow the Kronecker convention: for dimensions `[d_1, .., d_n]`
//! the first subsystem carries the most significant index digit.
//! Vectorization is column stacking throughout.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Absolute tolerance used for Hermiticity, positivity and trace checks.
pub const STATE_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let d = values.len();
    let mut m = zeros(d, d);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c64(v, 0.0);
    }
    m
}

/// Builds a matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(data.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| c64(data[i * cols + j], 0.0))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors.into_iter().fold(identity(1), |acc, f| acc.kronecker(f))
}

/// Embeds `op` acting on subsystem `site` of `n` subsystems of dimension `d`.
pub fn embed(op: &ComplexMatrix, d: usize, site: usize, n: usize) -> ComplexMatrix {
    let left = identity(d.pow(site as u32));
    let right = identity(d.pow((n - site - 1) as u32));
    left.kronecker(op).kronecker(&right)
}

pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    a * b.adjoint()
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// Column-stacking vectorization.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, cols, v.as_slice())
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = diag(&self.values);
        &self.vectors * d * self.vectors.adjoint()
    }

    /// Applies a real function to the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let vals: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        &self.vectors * diag(&vals) * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition (Householder tridiagonalization followed by
/// implicit shifted QR sweeps).
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("eigendecomposition of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermiticity_defect(m);
    if defect > 1e-8 * scale {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermEig { values: vec![], vectors: zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(hermitian_part(m), f64::EPSILON, 1000 * n.max(10)).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn herm_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermiticity_defect(m);
    if defect > 1e-8 * scale {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.nrows();
    let mut vals: Vec<f64> = if n == 0 {
        vec![]
    } else {
        let eig =
            SymmetricEigen::try_new(hermitian_part(m), f64::EPSILON, 1000 * n.max(10)).ok_or(Error::NoConvergence)?;
        eig.eigenvalues.iter().copied().collect()
    };
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eigvals(m)?.last().copied().unwrap_or(0.0))
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    m.clone().singular_values().iter().copied().collect()
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && hermiticity_defect(m) <= 1e-13 * max_abs(m).max(1e-300) {
        if let Ok(vals) = herm_eigvals(m) {
            return vals.iter().map(|v| v.abs()).sum();
        }
    }
    singular_values(m).iter().sum()
}

/// Square root of a positive semidefinite matrix (negative eigenvalues clipped).
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig(m)?.map(|x| x.max(0.0).sqrt()))
}

/// Root fidelity `F(ρ,σ) = ‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("fidelity between dimensions {} and {}", rho.dim(), sigma.dim())));
    }
    let a = psd_sqrt(rho.matrix())?;
    let b = psd_sqrt(sigma.matrix())?;
    Ok(singular_values(&(a * b)).iter().sum::<f64>().min(1.0))
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.nrows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not match subsystem dimensions {:?}",
            m.nrows(),
            m.ncols(),
            dims
        )));
    }
    Ok(total)
}

/// Row-major strides for the composite index.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// All offsets of the composite index spanned by the listed subsystems.
fn offsets(dims: &[usize], strides: &[usize], systems: &[usize]) -> Vec<usize> {
    let mut offs = vec![0usize];
    for &s in systems {
        let mut next = Vec::with_capacity(offs.len() * dims[s]);
        for &o in &offs {
            for digit in 0..dims[s] {
                next.push(o + digit * strides[s]);
            }
        }
        offs = next;
    }
    offs
}

/// Partial trace keeping the subsystems listed in `keep` (in their original order).
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem index out of range in {keep:?} for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let st = strides(dims);
    let kept_off = offsets(dims, &st, &keep);
    let traced_off = offsets(dims, &st, &traced);
    let dk = kept_off.len();
    let mut out = zeros(dk, dk);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &cb) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += m[(ra + t, cb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Partial transpose on the subsystems listed in `which`.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], which: &[usize]) -> Result<ComplexMatrix> {
    let total = check_dims(m, dims)?;
    if which.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!("subsystem index out of range in {which:?}")));
    }
    let st = strides(dims);
    let mut out = zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            let (mut ni, mut nj) = (i, j);
            for &s in which {
                let di = (i / st[s]) % dims[s];
                let dj = (j / st[s]) % dims[s];
                ni = ni - di * st[s] + dj * st[s];
                nj = nj - dj * st[s] + di * st[s];
            }
            out[(ni, nj)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorders subsystems: output subsystem `k` is input subsystem `perm[k]`.
pub fn permute_subsystems(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let total = check_dims(m, dims)?;
    let map = permutation_map(dims, perm)?;
    let mut out = zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Same as [`permute_subsystems`] for a state vector.
pub fn permute_vector(v: &ComplexVector, dims: &[usize], perm: &[usize]) -> Result<ComplexVector> {
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(Error::DimensionMismatch(format!("vector of length {} vs dims {dims:?}", v.len())));
    }
    let map = permutation_map(dims, perm)?;
    let mut out = ComplexVector::zeros(total);
    for i in 0..total {
        out[map[i]] = v[i];
    }
    Ok(out)
}

fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let st_old = strides(dims);
    let st_new = strides(&new_dims);
    let total: usize = dims.iter().product();
    Ok((0..total)
        .map(|i| perm.iter().enumerate().map(|(k, &p)| ((i / st_old[p]) % dims[p]) * st_new[k]).sum())
        .collect())
}

// Padé coefficients for the scaling-and-squaring exponential.
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// Backward-error thresholds on the 1-norm for each Padé degree.
#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.539398330063230e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA13: f64 = 5.371920351148152;

/// Largest 1-norm accepted by [`expm`].
pub const EXPM_MAX_NORM: f64 = 1e4;

pub fn norm1<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.clone().modulus()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
pub fn expm<T>(a: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    if !a.is_square() {
        return Err(Error::DimensionMismatch("exponential of a non-square matrix".into()));
    }
    let n = a.nrows();
    let norm = norm1(a);
    if !norm.is_finite() || norm > EXPM_MAX_NORM {
        return Err(Error::ExpmOverflow(norm));
    }
    let eye = DMatrix::<T>::identity(n, n);
    if n == 0 {
        return Ok(eye);
    }
    let scal = |c: f64| T::from_real(c);

    for &(deg, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let a2 = a * a;
            let mut pow = eye.clone();
            let mut u = &eye * scal(coeffs[1]);
            let mut v = &eye * scal(coeffs[0]);
            for k in 1..=deg / 2 {
                pow = &pow * &a2;
                u += &pow * scal(coeffs[2 * k + 1]);
                v += &pow * scal(coeffs[2 * k]);
            }
            let u = a * u;
            return pade_solve(u, v);
        }
    }

    let s = if norm > THETA13 { (norm / THETA13).log2().ceil().max(0.0) as i32 } else { 0 };
    let a = a * scal(0.5f64.powi(s));
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * scal(b[13]) + &a4 * scal(b[11]) + &a2 * scal(b[9]))
        + &a6 * scal(b[7])
        + &a4 * scal(b[5])
        + &a2 * scal(b[3])
        + &eye * scal(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * scal(b[12]) + &a4 * scal(b[10]) + &a2 * scal(b[8]))
        + &a6 * scal(b[6])
        + &a4 * scal(b[4])
        + &a2 * scal(b[2])
        + &eye * scal(b[0]);
    let mut r = pade_solve(u, v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_solve<T>(u: DMatrix<T>, v: DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let p = &v + &u;
    let q = v - u;
    q.lu().solve(&p).ok_or(Error::Singular("Padé denominator"))
}

/// `exp(t·a)` for generators whose scaled norm may exceed [`EXPM_MAX_NORM`]:
/// the interval is split into `2^k` equal steps and the step propagator squared.
pub fn expm_scaled<T>(a: &DMatrix<T>, t: f64) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let norm = norm1(a) * t.abs();
    let mut k = 0;
    while norm / 2f64.powi(k) > 1e3 {
        k += 1;
    }
    let step = a * T::from_real(t / 2f64.powi(k));
    let mut r = expm(&step)?;
    for _ in 0..k {
        r = &r * &r;
    }
    Ok(r)
}

/// A validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::io::MatrixJson", into = "crate::io::MatrixJson")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_finite(&matrix) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -STATE_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix: hermitian_part(&matrix) })
    }

    /// Wraps a matrix known to be a state up to rounding (it is hermitized).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix: hermitian_part(&matrix) }
    }

    /// Normalizes a nonzero positive semidefinite matrix to unit trace.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(matrix / c64(tr, 0.0))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: identity(d) / c64(d as f64, 0.0) }
    }

    /// `|i⟩⟨i|` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut m = zeros(d, d);
        m[(i, i)] = c64(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(diag(probabilities))
    }

    /// The normalized maximally entangled state on `d × d`.
    pub fn maximally_entangled(d: usize) -> Self {
        PureState::maximally_entangled(d).to_density()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self { matrix: kron(&self.matrix, &other.matrix) }
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        Ok(Self::from_matrix_unchecked(partial_trace(&self.matrix, dims, keep)?))
    }

    pub fn permute(&self, dims: &[usize], perm: &[usize]) -> Result<DensityMatrix> {
        Ok(Self { matrix: permute_subsystems(&self.matrix, dims, perm)? })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        herm_eigvals(&self.matrix)
    }

    /// Trace distance `½‖ρ−σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        0.5 * trace_norm(&(&self.matrix - &other.matrix))
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state vector norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / c64(norm, 0.0) })
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = ComplexVector::zeros(d);
        v[i] = c64(1.0, 0.0);
        Self { amplitudes: v }
    }

    /// `Σ_i |ii⟩ / √d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = ComplexVector::zeros(d * d);
        let amp = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            v[i * d + i] = c64(amp, 0.0);
        }
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { matrix: outer(&self.amplitudes, &self.amplitudes) }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self { amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}
