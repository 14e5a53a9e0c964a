//! Partial transpose over the qubit and entanglement negativity.

use crate::error::Result;
use crate::linalg::{self, ComplexMatrix};
use crate::state::{basis_index, DensityMatrix, COMPOSITE_DIM, QUBIT_DIM, QUTRIT_DIM};

/// Eigenvalues at or above this value are not counted as negative.
pub const NEGATIVE_EIGENVALUE_THRESHOLD: f64 = -1e-12;

/// Hermiticity tolerance handed to the eigensolver. The partial transpose
/// of a Hermitian matrix is Hermitian, so anything above round-off is a bug.
const PT_HERMITIAN_TOL: f64 = 1e-12;

/// Spectrum of the partially transposed state.
#[derive(Debug, Clone, PartialEq)]
pub struct PtSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub negativity: f64,
    pub min_eigenvalue: f64,
}

impl PtSpectrum {
    /// Number of eigenvalues below [`NEGATIVE_EIGENVALUE_THRESHOLD`].
    pub fn negative_count(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&x| x < NEGATIVE_EIGENVALUE_THRESHOLD)
            .count()
    }
}

/// Transposes the qubit indices: `out[(A,a),(B,b)] = rho[(B,a),(A,b)]`.
///
/// With the `3A + a` ordering this keeps the two diagonal 3x3 blocks and
/// swaps the off-diagonal ones.
pub fn partial_transpose_qubit(rho: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(rho.shape(), (COMPOSITE_DIM, COMPOSITE_DIM), "6x6 input");
    let mut out = ComplexMatrix::zeros(COMPOSITE_DIM, COMPOSITE_DIM);
    for qa in 0..QUBIT_DIM {
        for qb in 0..QUBIT_DIM {
            for a in 0..QUTRIT_DIM {
                for b in 0..QUTRIT_DIM {
                    let v = rho.get(basis_index(qb, a), basis_index(qa, b));
                    out.set(basis_index(qa, a), basis_index(qb, b), v);
                }
            }
        }
    }
    out
}

/// Sum of `|lambda|` over eigenvalues below the negativity threshold.
pub fn negativity_from_eigenvalues(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x < NEGATIVE_EIGENVALUE_THRESHOLD)
        .map(|x| -x)
        .sum()
}

/// Partial-transpose spectrum of any Hermitian 6x6 matrix, including the
/// unnormalised outputs of incomplete channels.
pub fn pt_spectrum(m: &ComplexMatrix) -> Result<PtSpectrum> {
    let pt = partial_transpose_qubit(m);
    let eigenvalues = linalg::hermitian_eigenvalues(&pt, PT_HERMITIAN_TOL)?;
    Ok(PtSpectrum {
        negativity: negativity_from_eigenvalues(&eigenvalues),
        min_eigenvalue: eigenvalues[0],
        eigenvalues,
    })
}

pub fn negativity(rho: &DensityMatrix) -> Result<PtSpectrum> {
    pt_spectrum(rho.matrix())
}
