//! Dense complex matrices and a cyclic Jacobi eigensolver for small
//! Hermitian problems.
//!
//! Everything here is value-oriented: operations take references and return
//! fresh matrices. Sizes in this crate never exceed 6x6, so no attempt is made
//! at blocking or cache tuning.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Upper bound on full Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 50;
/// Default Hermiticity tolerance for [`hermitian_eigenvalues`] callers.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes,
    /// length mismatches and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                bad / cols,
                bad % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty shape");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Sets a single entry. Non-finite values are rejected by panicking, since
    /// they can only come from a programming error at the call site.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(
            value.re.is_finite() && value.im.is_finite(),
            "non-finite entry"
        );
        self.data[i * self.cols + j] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product. Entry `(i*b.rows + k, j*b.cols + l)` holds `a(i,j)*b(k,l)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![ZERO; rows * cols];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                let row = i * b.rows + k;
                for l in 0..b.cols {
                    data[row * cols + j * b.cols + l] = aij * b.get(k, l);
                }
            }
        }
    }
    ComplexMatrix { rows, cols, data }
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    let mut data = Vec::with_capacity(a.data.len());
    for j in 0..a.cols {
        for i in 0..a.rows {
            data.push(a.get(i, j).conj());
        }
    }
    ComplexMatrix {
        rows: a.cols,
        cols: a.rows,
        data,
    }
}

pub fn trace(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "trace",
            left: a.shape(),
            right: a.shape(),
        });
    }
    Ok((0..a.rows).map(|i| a.get(i, i)).sum())
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "mat_mul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (n, m, p) = (a.rows, a.cols, b.cols);
    let mut data = vec![ZERO; n * p];
    for i in 0..n {
        let out = &mut data[i * p..(i + 1) * p];
        for k in 0..m {
            let aik = a.data[i * m + k];
            if aik == ZERO {
                continue;
            }
            let brow = &b.data[k * p..(k + 1) * p];
            for (o, &bkj) in out.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(ComplexMatrix {
        rows: n,
        cols: p,
        data,
    })
}

pub fn add(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "add",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
    Ok(ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}

pub fn scale(a: &ComplexMatrix, s: Complex64) -> ComplexMatrix {
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().map(|z| z * s).collect(),
    }
}

pub fn scale_real(a: &ComplexMatrix, s: f64) -> ComplexMatrix {
    scale(a, Complex64::new(s, 0.0))
}

/// Max-norm of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "max_abs_diff",
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Max-norm of `h - dagger(h)`; zero for exactly Hermitian input.
pub fn hermiticity_defect(h: &ComplexMatrix) -> Result<f64> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            op: "hermiticity_defect",
            left: h.shape(),
            right: h.shape(),
        });
    }
    let n = h.rows;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h.get(i, j) - h.get(j, i).conj()).norm());
        }
    }
    Ok(worst)
}

/// `a * x * dagger(a)` without materialising the adjoint.
pub(crate) fn sandwich(a: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let ax = mat_mul(a, x).expect("sandwich: a.cols == x.rows");
    let (n, m) = (ax.rows, ax.cols);
    debug_assert_eq!(m, a.cols);
    let mut data = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..m {
                acc += ax.data[i * m + k] * a.data[j * m + k].conj();
            }
            data[i * n + j] = acc;
        }
    }
    ComplexMatrix {
        rows: n,
        cols: n,
        data,
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Cyclic Jacobi with unitary 2x2 rotations, pivots visited in row-major
/// order over the strict upper triangle. Iteration stops once the
/// off-diagonal Frobenius norm drops below [`JACOBI_OFF_DIAGONAL_TOL`] or
/// after [`JACOBI_MAX_SWEEPS`] sweeps.
pub fn hermitian_eigenvalues(h: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    let deviation = hermiticity_defect(h)?;
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let n = h.rows;
    // Work on the exactly Hermitian part.
    let mut a = h.data.clone();
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, n) < JACOBI_OFF_DIAGONAL_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, n, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilates `a[p][q]` with `A <- U^dagger A U`, where `U` is the phase
/// fix `diag(1, e^{-i phi})` followed by a real Givens rotation.
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / mag;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    // Columns: A <- A U
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * u_pp + akq * u_qp;
        a[k * n + q] = akp * u_pq + akq * u_qq;
    }
    // Rows: A <- U^dagger A
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
}
