//! Three-bit repetition code under independent bit flips.
//!
//! Matrices are column stochastic: column `x` is the distribution after
//! starting in state `x`. Bit strings are indexed with the first bit most significant.

use nalgebra::DMatrix;

use super::fbound::f_closed_form;
use crate::linalg::expm;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// Columns sum to one.
    Stochastic,
    /// Columns sum to zero, off-diagonal entries non-negative.
    Intensity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalChain {
    matrix: DMatrix<f64>,
    kind: ChainKind,
}

impl ClassicalChain {
    pub fn new(matrix: DMatrix<f64>, kind: ChainKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("chain matrix must be square".into()));
        }
        let n = matrix.nrows();
        for j in 0..n {
            let col = matrix.column(j);
            let sum: f64 = col.iter().sum();
            let target = match kind {
                ChainKind::Stochastic => 1.0,
                ChainKind::Intensity => 0.0,
            };
            if (sum - target).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("column {j} sums to {sum}, expected {target}")));
            }
            for i in 0..n {
                let off_diagonal = i != j;
                let must_be_nonneg = kind == ChainKind::Stochastic || off_diagonal;
                if must_be_nonneg && col[i] < 0.0 {
                    return Err(Error::InvalidParameter(format!("negative rate at ({i}, {j})")));
                }
            }
        }
        Ok(Self { matrix, kind })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    /// `e^{tQ}` for an intensity matrix `Q`.
    pub fn transition(&self, t: f64) -> Result<ClassicalChain> {
        if self.kind != ChainKind::Intensity {
            return Err(Error::InvalidParameter("only intensity matrices generate transitions".into()));
        }
        let p = expm(&(&self.matrix * t))?;
        Ok(Self { matrix: p, kind: ChainKind::Stochastic })
    }
}

/// Encoder, majority-vote recovery and bit-flip noise of the repetition code.
#[derive(Clone, Debug)]
pub struct ClassicalRepetition {
    /// `8×2`: columns are the indicator vectors of `000` and `111`.
    pub encoder: DMatrix<i64>,
    /// `8×8`: each string is sent to its majority codeword.
    pub recovery: DMatrix<i64>,
    /// `Σ_i` flip of bit `i`.
    pub local_flips: DMatrix<i64>,
    /// `local_flips − 3·I`.
    pub noise: ClassicalChain,
}

impl ClassicalRepetition {
    /// `R V == V`.
    pub fn recovery_fixes_code(&self) -> bool {
        &self.recovery * &self.encoder == self.encoder
    }

    /// `R T^{⊕3} V == 3 V`.
    pub fn single_flips_corrected(&self) -> bool {
        &self.recovery * &self.local_flips * &self.encoder == &self.encoder * 3
    }
}

pub fn classical_repetition() -> ClassicalRepetition {
    let mut encoder = DMatrix::zeros(8, 2);
    encoder[(0, 0)] = 1;
    encoder[(7, 1)] = 1;
    let mut recovery = DMatrix::zeros(8, 8);
    for x in 0..8usize {
        let target = if x.count_ones() >= 2 { 7 } else { 0 };
        recovery[(target, x)] = 1;
    }
    let mut local_flips = DMatrix::zeros(8, 8);
    for x in 0..8usize {
        for bit in 0..3 {
            local_flips[(x ^ (1 << bit), x)] += 1;
        }
    }
    let q = local_flips.map(|v: i64| v as f64) - DMatrix::identity(8, 8) * 3.0;
    let noise = ClassicalChain::new(q, ChainKind::Intensity).expect("bit-flip generator is an intensity matrix");
    ClassicalRepetition { encoder, recovery, local_flips, noise }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalAlphaCheck {
    pub tv_distance: f64,
    pub f_bound: f64,
    pub pass: bool,
}

/// Compares `R e^{t(Q + r(R − I))} V` against `V` in total variation.
pub fn classical_alpha_check(t: f64, r: f64) -> Result<ClassicalAlphaCheck> {
    if !(t >= 0.0) || !(r >= 0.0) || !t.is_finite() || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("t = {t}, r = {r} must be finite and non-negative")));
    }
    let code = classical_repetition();
    let rec = code.recovery.map(|v| v as f64);
    let enc = code.encoder.map(|v| v as f64);
    let gen = code.noise.matrix() + (&rec - DMatrix::identity(8, 8)) * r;
    let chain = ClassicalChain::new(gen, ChainKind::Intensity)?.transition(t)?;
    let out = &rec * chain.matrix() * &enc;
    let tv_distance =
        (0..2).map(|j| 0.5 * (0..8).map(|i| (out[(i, j)] - enc[(i, j)]).abs()).sum::<f64>()).fold(0.0, f64::max);
    let f_bound = f_closed_form(3.0 * t, r / 3.0);
    Ok(ClassicalAlphaCheck { tv_distance, f_bound, pass: tv_distance <= 1.0 - f_bound + 1e-9 })
}
