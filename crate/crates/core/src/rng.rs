//! Seeded randomness and random quantum objects.

use nalgebra::DMatrix;
use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, ComplexMatrix, ComplexVector, DensityMatrix, PureState};

/// Reproducible random stream. Equal seeds give identical streams, and
/// [`Rng::substream`] derives independent streams for parallel work.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream `index` derived from the same seed.
    pub fn substream(&self, index: u64) -> Rng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(index.wrapping_add(1));
        Self { seed: self.seed, inner }
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut Rng) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re = rng.normal();
        let im = rng.normal();
        c64(re * s, im * s)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let z = ginibre(d, d, rng);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c64(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random isometry `C^{d_from} → C^{d_to}` (first columns of a Haar unitary).
pub fn haar_isometry(d_from: usize, d_to: usize, rng: &mut Rng) -> ComplexMatrix {
    assert!(d_to >= d_from, "isometry needs d_to >= d_from");
    haar_unitary(d_to, rng).columns(0, d_from).into_owned()
}

pub fn random_pure_state(d: usize, rng: &mut Rng) -> PureState {
    let v = ComplexVector::from_iterator(d, ginibre(d, 1, rng).iter().copied());
    PureState::normalized(v).expect("Gaussian vector is nonzero")
}

/// Random mixed state `G G† / tr(G G†)` from a square Ginibre matrix.
pub fn random_density(d: usize, rng: &mut Rng) -> DensityMatrix {
    random_density_rank(d, d, rng)
}

pub fn random_density_rank(d: usize, rank: usize, rng: &mut Rng) -> DensityMatrix {
    let g = ginibre(d, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m / c64(tr, 0.0))
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()) * c64(0.5, 0.0)
}
