//! Truncated Fock-space and qubit operator algebra.
//!
//! Composite operators always carry the qubit factor first, so a composite
//! basis index is `qubit * n_max + n` with qubit index 0 = |e⟩ and 1 = |g⟩.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Number of Fock states kept: the basis is |0⟩ … |n_max − 1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockTruncation(usize);

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::TruncationTooSmall(n_max));
        }
        Ok(Self(n_max))
    }

    pub fn n_max(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for FockTruncation {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<FockTruncation> for usize {
    fn from(t: FockTruncation) -> usize {
        t.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense complex operator over a (possibly composite) Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    data: CMatrix,
}

impl Operator {
    pub fn new(dims: Vec<usize>, data: CMatrix) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimensions must be >= 1, got {dims:?}"
            )));
        }
        let side: usize = dims.iter().product();
        if data.nrows() != side || data.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need a {side}x{side} matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { dims, data })
    }

    /// Builds an operator from real entries given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let data = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rows[i].get(j).copied().unwrap_or(f64::NAN), 0.0)
        });
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "rows must form a square matrix".into(),
            ));
        }
        Self::new(vec![n], data)
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let side = dims.iter().product();
        Self::new(dims, CMatrix::identity(side, side))
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let side = dims.iter().product();
        Self::new(dims, CMatrix::zeros(side, side))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let data = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self {
            dims: vec![n],
            data,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Side length of the matrix.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: &self.data * Complex64::new(factor, 0.0),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Retags the subsystem structure without touching the matrix.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != self.dim() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "cannot retag a {}-dimensional operator as {dims:?}",
                self.dim()
            )));
        }
        self.dims = dims;
        Ok(self)
    }
}

fn check_same_shape(a: &Operator, b: &Operator) {
    assert_eq!(
        a.dim(),
        b.dim(),
        "operator size mismatch ({:?} vs {:?})",
        a.dims,
        b.dims
    );
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        check_same_shape(self, rhs);
        Operator {
            dims: self.dims.clone(),
            data: &self.data + &rhs.data,
        }
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        check_same_shape(self, rhs);
        Operator {
            dims: self.dims.clone(),
            data: &self.data - &rhs.data,
        }
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        check_same_shape(self, rhs);
        Operator {
            dims: self.dims.clone(),
            data: &self.data * &rhs.data,
        }
    }
}

/// Lowering operator `a` with ⟨n−1|a|n⟩ = √n.
pub fn annihilation(trunc: FockTruncation) -> Operator {
    let n = trunc.n_max();
    let mut data = CMatrix::zeros(n, n);
    for k in 1..n {
        data[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    Operator {
        dims: vec![n],
        data,
    }
}

pub fn creation(trunc: FockTruncation) -> Operator {
    dagger(&annihilation(trunc))
}

/// a†a, exactly diagonal.
pub fn number(trunc: FockTruncation) -> Operator {
    let values: Vec<f64> = (0..trunc.n_max()).map(|k| k as f64).collect();
    Operator::diagonal(&values)
}

/// Pauli matrix in the (|e⟩, |g⟩) basis, so σ_z = diag(+1, −1).
pub fn pauli(which: Axis) -> Operator {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let entries = match which {
        Axis::X => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        Axis::Y => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        Axis::Z => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
    };
    Operator {
        dims: vec![2],
        data: CMatrix::from_row_slice(2, 2, &entries),
    }
}

/// Kronecker product; `left` becomes the leading (slow) index.
pub fn tensor(left: &Operator, right: &Operator) -> Operator {
    let mut dims = left.dims.clone();
    dims.extend_from_slice(&right.dims);
    Operator {
        dims,
        data: left.data.kronecker(&right.data),
    }
}

pub fn dagger(op: &Operator) -> Operator {
    Operator {
        dims: op.dims.clone(),
        data: op.data.adjoint(),
    }
}

pub fn hermiticity_defect(op: &Operator) -> f64 {
    let n = op.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((op.data[(i, j)] - op.data[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(op: &Operator, tol: f64) -> bool {
    hermiticity_defect(op) <= tol
}
