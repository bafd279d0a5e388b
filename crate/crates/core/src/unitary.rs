use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::PureState;
use crate::CONSTRUCTION_TOL;

/// Square complex matrix whose unitarity was checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: DMatrix<Complex64>,
}

impl Unitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(matrix, CONSTRUCTION_TOL)
    }

    /// Accepts a looser unitarity tolerance, for products of many gates.
    pub fn with_tolerance(matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > tol {
            return Err(Error::NotUnitary(deviation));
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(phases: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(phases)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Operator product `self · other` (`other` acts first).
    pub fn compose(&self, other: &Unitary) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Unitary) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Largest elementwise deviation from another matrix of equal size.
    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let product = m.adjoint() * m;
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = (product[(i, j)] - Complex64::new(target, 0.0)).norm();
            // NaN must not compare as small
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Returns `(I ⊗ u ⊗ I) s` with `u` acting on `targets`.
///
/// `targets[0]` is the most significant subsystem of `u`'s own index; the
/// targets need not be adjacent or sorted.
pub fn apply(u: &Unitary, s: &PureState, targets: &[usize]) -> Result<PureState> {
    let n = s.layout().subsystems();
    let k = targets.len();
    if u.dim() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            found: u.dim(),
        });
    }
    let mut mask = 0usize;
    for &t in targets {
        if t >= n {
            return Err(Error::TargetOutOfRange {
                target: t,
                count: n,
            });
        }
        let bit = 1 << (n - 1 - t);
        if mask & bit != 0 {
            return Err(Error::DuplicateTarget(t));
        }
        mask |= bit;
    }

    // offsets[j] is the full-register bit pattern of local index j
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|j| {
            targets.iter().enumerate().fold(0, |acc, (pos, &t)| {
                if (j >> (k - 1 - pos)) & 1 == 1 {
                    acc | 1 << (n - 1 - t)
                } else {
                    acc
                }
            })
        })
        .collect();

    let input = s.amplitudes();
    let mut output = DVector::zeros(s.dim());
    let mut local = DVector::zeros(1 << k);
    for base in (0..s.dim()).filter(|idx| idx & mask == 0) {
        for (j, off) in offsets.iter().enumerate() {
            local[j] = input[base | off];
        }
        let mapped = u.matrix() * &local;
        for (j, off) in offsets.iter().enumerate() {
            output[base | off] = mapped[j];
        }
    }
    Ok(PureState::from_parts(output, s.layout()))
}

impl PureState {
    pub fn apply(&self, u: &Unitary, targets: &[usize]) -> Result<PureState> {
        apply(u, self, targets)
    }
}
