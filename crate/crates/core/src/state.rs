//! The accelerated qubit-qutrit state and density-matrix validation.
//!
//! Composite basis ordering is `index = 3*A + a`, with `A` the qubit level
//! (Alice) and `a` the qutrit level (Rob). Every other module relies on it.

use std::f64::consts::FRAC_PI_4;
use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

pub const QUBIT_DIM: usize = 2;
pub const QUTRIT_DIM: usize = 3;
pub const COMPOSITE_DIM: usize = QUBIT_DIM * QUTRIT_DIM;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Composite index of qubit level `qubit` and qutrit level `qutrit`.
pub const fn basis_index(qubit: usize, qutrit: usize) -> usize {
    QUTRIT_DIM * qubit + qutrit
}

/// Acceleration parameter `r` in radians, restricted to `[0, pi/4]`.
///
/// `r = 0` is an inertial observer and `r = pi/4` the infinite-acceleration
/// limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Acceleration(f64);

impl Acceleration {
    pub const MAX: f64 = FRAC_PI_4;

    pub fn new(r: f64) -> Result<Self> {
        if (0.0..=Self::MAX).contains(&r) {
            Ok(Self(r))
        } else {
            Err(Error::OutOfRange {
                name: "r",
                value: r,
                min: 0.0,
                max: Self::MAX,
            })
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// A validated 6x6 density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// I/6.
    pub fn maximally_mixed() -> Self {
        Self(linalg::scale_real(
            &ComplexMatrix::identity(COMPOSITE_DIM),
            1.0 / COMPOSITE_DIM as f64,
        ))
    }

    /// Trace over the qubit, leaving the 3x3 qutrit state.
    pub fn reduced_qutrit(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(QUTRIT_DIM, QUTRIT_DIM);
        for a in 0..QUTRIT_DIM {
            for b in 0..QUTRIT_DIM {
                let v: Complex64 = (0..QUBIT_DIM)
                    .map(|q| self.0.get(basis_index(q, a), basis_index(q, b)))
                    .sum();
                out.set(a, b, v);
            }
        }
        out
    }
}

impl Deref for DensityMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// The Unruh-Rindler state shared by inertial Alice and accelerated Rob:
///
/// `1/2 [cos^2 r (|01><01| + |01><10| + |10><01| + |10><10|) + sin^2 r (|02><02| + |12><12|)]`
pub fn unruh_state(r: Acceleration) -> DensityMatrix {
    let (s, c) = r.radians().sin_cos();
    let coherent = 0.5 * c * c;
    let mixed = 0.5 * s * s;
    let mut m = ComplexMatrix::zeros(COMPOSITE_DIM, COMPOSITE_DIM);
    let k01 = basis_index(0, 1);
    let k10 = basis_index(1, 0);
    for &(i, j) in &[(k01, k01), (k01, k10), (k10, k01), (k10, k10)] {
        m.set(i, j, Complex64::new(coherent, 0.0));
    }
    m.set(
        basis_index(0, 2),
        basis_index(0, 2),
        Complex64::new(mixed, 0.0),
    );
    m.set(
        basis_index(1, 2),
        basis_index(1, 2),
        Complex64::new(mixed, 0.0),
    );
    DensityMatrix(m)
}

/// Checks Hermiticity, unit trace and positivity with the module tolerances.
pub fn validate_density(m: ComplexMatrix) -> Result<DensityMatrix> {
    if m.shape() != (COMPOSITE_DIM, COMPOSITE_DIM) {
        return Err(Error::DimensionMismatch {
            op: "validate_density",
            left: m.shape(),
            right: (COMPOSITE_DIM, COMPOSITE_DIM),
        });
    }
    let deviation = linalg::hermiticity_defect(&m)?;
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tol: HERMITIAN_TOL,
        });
    }
    let tr = linalg::trace(&m)?;
    let deviation = (tr - Complex64::new(1.0, 0.0)).norm();
    if deviation > TRACE_TOL {
        return Err(Error::TraceDeviation {
            deviation,
            tol: TRACE_TOL,
        });
    }
    let min_eigenvalue = linalg::hermitian_eigenvalues(&m, HERMITIAN_TOL)?[0];
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NegativeEigenvalue {
            min_eigenvalue,
            tol: PSD_TOL,
        });
    }
    Ok(DensityMatrix(m))
}
