//! Single-qubit Pauli operators and Pauli strings.

use std::fmt;
use std::str::FromStr;

use crate::linalg::{c64, kron_all, ComplexMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let (o, z, i) = (c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0));
        match self {
            Pauli::I => ComplexMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            Pauli::X => ComplexMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Pauli::Y => ComplexMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            Pauli::Z => ComplexMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    /// Whether two single-qubit Paulis commute.
    pub fn commutes(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Tensor product of single-qubit Paulis; qubit 0 is the leftmost factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    /// `p` on qubit `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, p: Pauli) -> Self {
        let mut s = vec![Pauli::I; n];
        s[site] = p;
        PauliString(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self.0.iter().zip(&other.0).filter(|(a, b)| !a.commutes(**b)).count();
        anti % 2 == 0
    }

    /// Cyclic shift by `k` positions to the right.
    pub fn rotate(&self, k: usize) -> PauliString {
        let mut v = self.0.clone();
        let n = v.len().max(1);
        v.rotate_right(k % n);
        PauliString(v)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mats: Vec<ComplexMatrix> = self.0.iter().map(|p| p.matrix()).collect();
        kron_all(&mats)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidParameter(format!("'{other}' is not a Pauli label"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
